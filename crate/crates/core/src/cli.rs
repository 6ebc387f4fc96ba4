//! Command-line front end.
//!
//! Every subcommand writes a JSON [`RunReport`] to stdout (or `--report`)
//! and a short human-readable summary to stderr. Exit codes: 0 on success,
//! 2 on user error, 1 on internal failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::audio_io::{read_wav, write_wav};
use crate::error::{Error, Result};
use crate::gammatone::magnitude_response;
use crate::metrics::{si_snr, si_snr_improvement};
use crate::mpgtf::{
    build_mpgtf, Filterbank, MpgtfConfig, DEFAULT_F_HIGH_HZ, DEFAULT_F_LOW_HZ, DEFAULT_N_FILTERS,
    DEFAULT_SAMPLE_RATE,
};
use crate::oracle::oracle_separate;
use crate::report::RunReport;
use crate::transform::{interior, pinv_round_trip, DEFAULT_FRAME_SHIFT};

#[derive(Debug, Parser)]
#[command(name = "mpgtf", version, about = "Multi-phase gammatone filterbank toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a filterbank and export it as JSON or CSV.
    Gen(GenArgs),
    /// Export per-filter magnitude spectra of a bank as CSV.
    Spectra(SpectraArgs),
    /// Encode, rectify and resynthesize a WAV file, reporting interior SI-SNR.
    Roundtrip(RoundtripArgs),
    /// Mix two sources and separate them with oracle ratio masks.
    OracleSeparate(OracleArgs),
    /// SI-SNR of an estimate, and SI-SNRi when a mixture is given.
    Sisnr(SisnrArgs),
    /// SI-SNR over many files listed in a CSV (est,ref[,mix] per line).
    SisnrBatch(BatchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BankFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecoderMode {
    Pinv,
}

#[derive(Debug, Args)]
pub struct BankArgs {
    /// Number of filters (even, at least twice the number of center frequencies).
    #[arg(long, default_value_t = DEFAULT_N_FILTERS)]
    pub n: usize,
    /// Sampling rate in Hz.
    #[arg(long, default_value_t = DEFAULT_SAMPLE_RATE)]
    pub fs: u32,
    /// Filter duration in milliseconds.
    #[arg(long, default_value_t = 2.0)]
    pub duration_ms: f64,
    #[arg(long, default_value_t = DEFAULT_F_LOW_HZ)]
    pub f_low: f64,
    #[arg(long, default_value_t = DEFAULT_F_HIGH_HZ)]
    pub f_high: f64,
}

impl BankArgs {
    fn config(&self) -> MpgtfConfig {
        MpgtfConfig {
            n_filters: self.n,
            sample_rate: self.fs,
            duration_s: self.duration_ms / 1000.0,
            f_low_hz: self.f_low,
            f_high_hz: self.f_high,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub bank: BankArgs,
    /// Output format.
    #[arg(long, value_enum, default_value_t = BankFormat::Json)]
    pub out: BankFormat,
    /// Destination file; the bank goes to stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectraArgs {
    /// Filterbank JSON produced by `gen`.
    #[arg(long)]
    pub bank: PathBuf,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Transform size; `nfft/2 + 1` bins per filter.
    #[arg(long, default_value_t = 1024)]
    pub nfft: usize,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_N_FILTERS)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = DecoderMode::Pinv)]
    pub mode: DecoderMode,
    #[arg(long, default_value_t = DEFAULT_FRAME_SHIFT)]
    pub frame_shift: usize,
    /// Optional WAV destination for the reconstruction (peak-normalized).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub s1: PathBuf,
    #[arg(long)]
    pub s2: PathBuf,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub snr_db: f64,
    #[arg(long, default_value_t = DEFAULT_N_FILTERS)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_FRAME_SHIFT)]
    pub frame_shift: usize,
    /// Directory for mixture.wav, est1.wav and est2.wav.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SisnrArgs {
    #[arg(long)]
    pub est: PathBuf,
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long)]
    pub mix: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// CSV with `est,ref[,mix]` per line; relative paths resolve against the CSV's directory.
    #[arg(long)]
    pub pairs: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// Output produced by a command, separated from the process boundary so it
/// can be tested without spawning.
#[derive(Debug)]
pub struct Outcome {
    pub report: RunReport,
    pub report_path: Option<PathBuf>,
    /// Primary artifact written to stdout instead of the report.
    pub stdout_payload: Option<Vec<u8>>,
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let start = Instant::now();
    let mut outcome = match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Spectra(a) => cmd_spectra(&a),
        Command::Roundtrip(a) => cmd_roundtrip(&a),
        Command::OracleSeparate(a) => cmd_oracle_separate(&a),
        Command::Sisnr(a) => cmd_sisnr(&a),
        Command::SisnrBatch(a) => cmd_sisnr_batch(&a),
    }?;
    outcome.report.timing_ms = start.elapsed().as_secs_f64() * 1000.0;
    Ok(outcome)
}

fn plain(report: RunReport, report_path: Option<PathBuf>) -> Outcome {
    Outcome {
        report,
        report_path,
        stdout_payload: None,
    }
}

fn bank_params(report: RunReport, a: &BankArgs) -> RunReport {
    report
        .param("n", a.n)
        .param("fs", a.fs)
        .param("duration_ms", a.duration_ms)
        .param("f_low", a.f_low)
        .param("f_high", a.f_high)
}

pub fn cmd_gen(a: &GenArgs) -> Result<Outcome> {
    let bank = build_mpgtf(&a.bank.config())?;
    let payload = match a.out {
        BankFormat::Json => bank.to_json()?.into_bytes(),
        BankFormat::Csv => {
            let mut buf = Vec::new();
            bank.write_csv(&mut buf)?;
            buf
        }
    };
    let mut report = bank_params(RunReport::new("gen"), &a.bank).param(
        "out",
        match a.out {
            BankFormat::Json => "json",
            BankFormat::Csv => "csv",
        },
    );
    report.detail("n_filters", bank.n_filters());
    report.detail("filter_length", bank.filter_length());
    report.detail("n_center_frequencies", bank.center_frequencies().len());
    report.detail("center_frequencies_hz", bank.center_frequencies());
    report.detail("phase_counts", bank.phase_counts());
    match &a.output {
        Some(path) => {
            std::fs::write(path, &payload)?;
            report.detail("output", path.display().to_string());
            Ok(plain(report, None))
        }
        None => Ok(Outcome {
            report,
            report_path: None,
            stdout_payload: Some(payload),
        }),
    }
}

fn read_bank(path: &Path) -> Result<Filterbank> {
    Filterbank::from_json(&std::fs::read_to_string(path)?)
}

/// Writes `filter_index,frequency_hz,magnitude` rows for every filter.
pub fn write_spectra<W: Write>(bank: &Filterbank, nfft: usize, mut out: W) -> Result<()> {
    writeln!(out, "filter_index,frequency_hz,magnitude")?;
    let fs = f64::from(bank.sample_rate());
    for (i, f) in bank.filters().iter().enumerate() {
        for (k, m) in magnitude_response(&f.coeffs, nfft).iter().enumerate() {
            writeln!(out, "{i},{:.6},{m:.17e}", k as f64 * fs / nfft as f64)?;
        }
    }
    Ok(())
}

pub fn cmd_spectra(a: &SpectraArgs) -> Result<Outcome> {
    let bank = read_bank(&a.bank)?;
    if a.nfft < bank.filter_length() || a.nfft < 2 {
        return Err(Error::Domain(format!(
            "nfft must be at least the filter length ({}), got {}",
            bank.filter_length(),
            a.nfft
        )));
    }
    let mut report = RunReport::new("spectra")
        .param("bank", a.bank.display().to_string())
        .param("nfft", a.nfft);
    report.detail("n_filters", bank.n_filters());
    report.detail("bins_per_filter", a.nfft / 2 + 1);
    match &a.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_spectra(&bank, a.nfft, &mut w)?;
            w.flush()?;
            report.detail("output", path.display().to_string());
            Ok(plain(report, None))
        }
        None => {
            let mut buf = Vec::new();
            write_spectra(&bank, a.nfft, &mut buf)?;
            Ok(Outcome {
                report,
                report_path: None,
                stdout_payload: Some(buf),
            })
        }
    }
}

pub fn cmd_roundtrip(a: &RoundtripArgs) -> Result<Outcome> {
    let x = read_wav(&a.input)?;
    if x.power() == 0.0 {
        return Err(Error::ZeroPower);
    }
    let bank = build_mpgtf(&MpgtfConfig {
        n_filters: a.n,
        sample_rate: x.sample_rate(),
        ..MpgtfConfig::default()
    })?;
    let y = match a.mode {
        DecoderMode::Pinv => pinv_round_trip(&x, &bank, a.frame_shift)?,
    };
    let l = bank.filter_length();
    let snr = si_snr(interior(y.samples(), l), interior(x.samples(), l))?;
    let mut report = RunReport::new("roundtrip")
        .param("in", a.input.display().to_string())
        .param("n", a.n)
        .param("mode", "pinv")
        .param("frame_shift", a.frame_shift);
    report.metric("interior_si_snr_db", snr);
    report.detail("samples", x.len());
    report.detail("interior_samples", interior(x.samples(), l).len());
    if let Some(path) = &a.output {
        write_wav(path, &y, true)?;
        report.detail("output", path.display().to_string());
    }
    Ok(plain(report, a.report.clone()))
}

pub fn cmd_oracle_separate(a: &OracleArgs) -> Result<Outcome> {
    let s1 = read_wav(&a.s1)?;
    let s2 = read_wav(&a.s2)?;
    let bank = build_mpgtf(&MpgtfConfig {
        n_filters: a.n,
        sample_rate: s1.sample_rate(),
        ..MpgtfConfig::default()
    })?;
    let sep = oracle_separate(&s1, &s2, a.snr_db, &bank, a.frame_shift)?;
    let mut report = RunReport::new("oracle-separate")
        .param("s1", a.s1.display().to_string())
        .param("s2", a.s2.display().to_string())
        .param("snr_db", a.snr_db)
        .param("n", a.n)
        .param("frame_shift", a.frame_shift);
    for (k, src) in sep.sources.iter().enumerate() {
        let c = k + 1;
        report.metric(&format!("s{c}_si_snr_db"), src.si_snr_db);
        report.metric(&format!("s{c}_mixture_si_snr_db"), src.mixture_si_snr_db);
        report.metric(&format!("s{c}_si_snri_db"), src.si_snr_improvement_db);
    }
    let max_mask_sum = sep.masks[0]
        .values()
        .iter()
        .zip(sep.masks[1].values().iter())
        .map(|(a, b)| a + b)
        .fold(0.0, f64::max);
    report.detail("max_mask_sum", max_mask_sum);
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir)?;
        write_wav(dir.join("mixture.wav"), &sep.mixture.mixture, true)?;
        write_wav(dir.join("est1.wav"), &sep.sources[0].estimate, true)?;
        write_wav(dir.join("est2.wav"), &sep.sources[1].estimate, true)?;
        report.detail("out_dir", dir.display().to_string());
    }
    Ok(plain(report, a.report.clone()))
}

struct SisnrValues {
    si_snr: f64,
    improvement: Option<f64>,
}

fn evaluate_files(est: &Path, reference: &Path, mix: Option<&Path>) -> Result<SisnrValues> {
    let est = read_wav(est)?;
    let reference = read_wav(reference)?;
    let si = si_snr(est.samples(), reference.samples())?;
    let improvement = match mix {
        Some(m) => {
            let mix = read_wav(m)?;
            Some(si_snr_improvement(est.samples(), mix.samples(), reference.samples())?)
        }
        None => None,
    };
    Ok(SisnrValues {
        si_snr: si,
        improvement,
    })
}

pub fn cmd_sisnr(a: &SisnrArgs) -> Result<Outcome> {
    let v = evaluate_files(&a.est, &a.reference, a.mix.as_deref())?;
    let mut report = RunReport::new("sisnr")
        .param("est", a.est.display().to_string())
        .param("ref", a.reference.display().to_string());
    if let Some(m) = &a.mix {
        report = report.param("mix", m.display().to_string());
    }
    report.metric("si_snr_db", v.si_snr);
    if let Some(i) = v.improvement {
        report.metric("si_snri_db", i);
    }
    Ok(plain(report, a.report.clone()))
}

pub fn cmd_sisnr_batch(a: &BatchArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&a.pairs)?;
    let base = a.pairs.parent().unwrap_or(Path::new("."));
    let resolve = |p: &str| -> PathBuf {
        let p = Path::new(p.trim());
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    };
    let rows: Vec<(PathBuf, PathBuf, Option<PathBuf>)> = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            match cols.as_slice() {
                [e, r] => Ok((resolve(e), resolve(r), None)),
                [e, r, m] => Ok((resolve(e), resolve(r), Some(resolve(m)))),
                _ => Err(Error::Domain(format!("expected est,ref[,mix] but got `{l}`"))),
            }
        })
        .collect::<Result<_>>()?;
    // Files are independent; results keep input order.
    let results: Vec<Result<SisnrValues>> = rows
        .par_iter()
        .map(|(e, r, m)| evaluate_files(e, r, m.as_deref()))
        .collect();
    let mut entries = Vec::with_capacity(rows.len());
    let mut sis = Vec::new();
    let mut imps = Vec::new();
    for ((e, r, m), res) in rows.iter().zip(results) {
        let v = res?;
        sis.push(v.si_snr);
        if let Some(i) = v.improvement {
            imps.push(i);
        }
        entries.push(json!({
            "est": e.display().to_string(),
            "ref": r.display().to_string(),
            "mix": m.as_ref().map(|p| p.display().to_string()),
            "si_snr_db": crate::report::Db(v.si_snr),
            "si_snri_db": v.improvement.map(crate::report::Db),
        }));
    }
    let mut report = RunReport::new("sisnr-batch").param("pairs", a.pairs.display().to_string());
    let ceiling = crate::metrics::DEFAULT_CEILING_DB;
    if let Some(m) = crate::metrics::mean_capped_db(&sis, ceiling) {
        report.metric("mean_si_snr_db", m);
    }
    if let Some(m) = crate::metrics::mean_capped_db(&imps, ceiling) {
        report.metric("mean_si_snri_db", m);
    }
    report.detail("ceiling_db", ceiling);
    report.detail("entries", Value::Array(entries));
    Ok(plain(report, a.report.clone()))
}

/// Writes the outcome: payload or report to stdout, summary to stderr.
pub fn emit(outcome: &Outcome) -> io::Result<()> {
    let json = outcome.report.to_json();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match (&outcome.stdout_payload, &outcome.report_path) {
        (Some(payload), _) => {
            out.write_all(payload)?;
            if let Some(p) = &outcome.report_path {
                std::fs::write(p, json + "\n")?;
            } else {
                eprintln!("{json}");
            }
        }
        (None, Some(p)) => std::fs::write(p, json + "\n")?,
        (None, None) => writeln!(out, "{json}")?,
    }
    out.flush()?;
    for line in outcome.report.summary_lines() {
        eprintln!("{line}");
    }
    Ok(())
}

/// Exit status for a command error.
pub fn exit_code(_err: &Error) -> i32 {
    2
}
