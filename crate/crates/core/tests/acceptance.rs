//! Acceptance criteria, one line per criterion. Exits non-zero on any failure.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use mpgtf::audio_io::{synth_test_signal, SignalKind};
use mpgtf::erb::{center_frequencies, erb_bandwidth, erbscale_to_hz, hz_to_erbscale, FrequencyHz};
use mpgtf::metrics::{si_snr, si_snr_improvement};
use mpgtf::mpgtf::{build_mpgtf, Filterbank, MpgtfConfig};
use mpgtf::oracle::oracle_separate;
use mpgtf::transform::{decode, encode, interior, pinv_round_trip, pseudo_inverse_decoder, EncodedSignal};
use mpgtf::{AudioSignal, Error};
use nalgebra::DMatrix;

/// Regression floors: SI-SNRi achieved by the first run of the oracle
/// separation (300 Hz vs 2 kHz sines, 0 dB, N=128), rounded down.
const ORACLE_FLOOR_S1_DB: f64 = 21.89;
const ORACLE_FLOOR_S2_DB: f64 = 21.50;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed <= limit, format!("took {elapsed:?}, limit {limit:?}"))
}

fn hz(v: f64) -> FrequencyHz {
    FrequencyHz::new(v).unwrap()
}

fn bank(n: usize) -> Filterbank {
    build_mpgtf(&MpgtfConfig::with_filters(n)).unwrap()
}

fn center_count() -> Check {
    let t = Instant::now();
    let cf = center_frequencies(hz(100.0), hz(4000.0)).map_err(|e| e.to_string())?;
    let el = t.elapsed();
    ensure(cf.len() == 24, format!("got {} center frequencies", cf.len()))?;
    within(el, Duration::from_millis(1))?;
    Ok(format!("24 center frequencies, last {:.2} Hz, {el:?}", cf[23].value()))
}

fn minimum_n_and_parity() -> Check {
    let ok = build_mpgtf(&MpgtfConfig::with_filters(48)).map_err(|e| e.to_string())?;
    ensure(ok.n_filters() == 48, "N=48 bank has wrong size")?;
    let odd = build_mpgtf(&MpgtfConfig::with_filters(47));
    ensure(matches!(odd, Err(Error::OddFilterCount(47))), format!("N=47 gave {odd:?}"))?;
    let msg = odd.unwrap_err().to_string();
    ensure(msg.contains("N must be even"), msg.clone())?;
    let small = build_mpgtf(&MpgtfConfig::with_filters(46));
    ensure(
        matches!(small, Err(Error::TooFewFilters { n: 46, min: 48, .. })),
        format!("N=46 gave {small:?}"),
    )?;
    Ok(format!("N=48 ok; N=47 -> \"{msg}\"; N=46 -> minimum-N error"))
}

fn phase_ledger() -> Check {
    let expected = |n: usize| -> Vec<usize> {
        let half = n / 2;
        (0..24).map(|j| half / 24 + usize::from(j < half % 24)).collect()
    };
    for n in [48, 64, 128, 512] {
        let counts = bank(n).phase_counts();
        ensure(counts.iter().sum::<usize>() == n / 2, format!("N={n}: sum {}", counts.iter().sum::<usize>()))?;
        ensure(counts == expected(n), format!("N={n}: {counts:?}"))?;
    }
    let c128 = bank(128).phase_counts();
    ensure(c128.iter().filter(|&&k| k == 3).count() == 16 && c128.iter().filter(|&&k| k == 2).count() == 8, "N=128 split")?;
    let c512 = bank(512).phase_counts();
    ensure(c512.iter().filter(|&&k| k == 11).count() == 16 && c512.iter().filter(|&&k| k == 10).count() == 8, "N=512 split")?;
    Ok("N in {48,64,128,512} sum to N/2; 128 -> 16x3+8x2; 512 -> 16x11+8x10".into())
}

fn pair_antisymmetry() -> Check {
    let mut worst: f64 = 0.0;
    let t = Instant::now();
    for n in [48, 64, 128, 512] {
        let b = bank(n);
        let d = b.max_pair_deviation().ok_or(format!("N={n}: bank is not pair-adjacent"))?;
        worst = worst.max(d);
    }
    let el = t.elapsed();
    ensure(worst <= 1e-12, format!("max deviation {worst:e}"))?;
    within(el, Duration::from_secs(1))?;
    Ok(format!("max |h + h_inv| = {worst:.2e} (<= 1e-12)"))
}

fn normalization() -> Check {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for n in [48, 64, 128, 512] {
        for p in bank(n).spectral_peaks() {
            lo = lo.min(p);
            hi = hi.max(p);
        }
    }
    ensure(lo >= 1.0 - 1e-9 && hi <= 1.0, format!("peaks in [{lo}, {hi}]"))?;
    Ok(format!("peaks in [{lo:.15}, {hi:.15}]"))
}

fn erb_consistency() -> Check {
    let mut worst_rt: f64 = 0.0;
    for k in 0..=8000 {
        let f = k as f64;
        let back = erbscale_to_hz(hz_to_erbscale(hz(f))).value();
        let err = if f == 0.0 { back.abs() } else { ((back - f) / f).abs() };
        worst_rt = worst_rt.max(err);
    }
    ensure(worst_rt <= 1e-9, format!("round-trip error {worst_rt:e}"))?;
    let mut worst_fd: f64 = 0.0;
    for f in [100.0, 500.0, 1000.0, 3000.0] {
        let h = 1e-3;
        let d = (hz_to_erbscale(hz(f + h)).value() - hz_to_erbscale(hz(f - h)).value()) / (2.0 * h);
        worst_fd = worst_fd.max((d * erb_bandwidth(hz(f)) - 1.0).abs());
    }
    ensure(worst_fd <= 1e-6, format!("finite-difference error {worst_fd:e}"))?;
    Ok(format!("round-trip {worst_rt:.1e}, d/df * ERB - 1 = {worst_fd:.1e}"))
}

fn encoder_oracle() -> Check {
    let t = Instant::now();
    let b = bank(128);
    let filters: Vec<Vec<f64>> = b.filters().iter().map(|f| f.coeffs.clone()).collect();
    let dec = pseudo_inverse_decoder(&b).map_err(|e| e.to_string())?;
    let dec_rows: Vec<Vec<f64>> = dec.bank().filters().iter().map(|f| f.coeffs.clone()).collect();
    let mut worst: f64 = 0.0;
    for (seed, len) in [(1u64, 64usize), (2, 100), (3, 333), (4, 1024)] {
        let x = random_signal(seed, len);
        let enc = encode(&AudioSignal::new(x.clone(), 8000).unwrap(), &b, 8).map_err(|e| e.to_string())?;
        let naive = naive_encode(&x, &filters, 8);
        for (n, row) in naive.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                worst = worst.max((enc.values()[(n, i)] - v).abs());
            }
        }
        let values = DMatrix::from_fn(128, enc.n_frames(), |n, i| random_signal(seed * 100_000 + (n * 1000 + i) as u64, 1)[0]);
        let coded = EncodedSignal::new(values.clone(), 8, 16, 8000).unwrap();
        let y = decode(&coded, &dec, len).map_err(|e| e.to_string())?;
        let rows: Vec<Vec<f64>> = values.row_iter().map(|r| r.iter().copied().collect()).collect();
        let naive_y = naive_decode(&rows, &dec_rows, 8, len);
        worst = worst.max(max_abs_diff(y.samples(), &naive_y));
    }
    let el = t.elapsed();
    ensure(worst <= 1e-12, format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation from nested loops {worst:.2e}, {el:?}"))
}

fn pinv_reconstruction() -> Check {
    let t = Instant::now();
    let x = synth_test_signal(SignalKind::Noise, 2024, 8000, 8000).unwrap();
    let mut parts = Vec::new();
    for n in [48, 128, 512] {
        let b = bank(n);
        let y = pinv_round_trip(&x, &b, 8).map_err(|e| e.to_string())?;
        let snr = si_snr(interior(y.samples(), 16), interior(x.samples(), 16)).map_err(|e| e.to_string())?;
        ensure(snr >= 50.0, format!("N={n}: {snr:.2} dB"))?;
        // Independent check of the decoder against a normal-equation solve.
        let filters: Vec<Vec<f64>> = b.filters().iter().map(|f| f.coeffs.clone()).collect();
        let oracle = normal_equation_decoder(&filters);
        let enc = mpgtf::rectify(&encode(&x, &b, 8).map_err(|e| e.to_string())?);
        let rows: Vec<Vec<f64>> = enc.values().row_iter().map(|r| r.iter().copied().collect()).collect();
        let y_oracle = naive_decode(&rows, &oracle, 8, x.len());
        let agree = si_snr(interior(&y_oracle, 16), interior(x.samples(), 16)).map_err(|e| e.to_string())?;
        ensure(agree >= 50.0, format!("N={n}: normal-equation oracle {agree:.2} dB"))?;
        parts.push(format!("N={n}: {snr:.1} dB"));
    }
    let el = t.elapsed();
    within(el, Duration::from_secs(5))?;
    Ok(format!("{} (>= 50 dB), {el:?}", parts.join(", ")))
}

fn rank_property() -> Check {
    let mut worst = f64::INFINITY;
    for n in [48, 64, 128, 512] {
        let sv = bank(n).singular_values();
        ensure(sv.len() == 16, format!("N={n}: {} singular values", sv.len()))?;
        worst = worst.min(sv[15] / sv[0]);
    }
    ensure(worst > 1e-8, format!("min ratio {worst:e}"))?;
    Ok(format!("min sigma_min/sigma_max = {worst:.3e} (> 1e-8)"))
}

fn si_snr_units() -> Check {
    let hand = si_snr(&[1.0, 1.0], &[1.0, 0.0]).map_err(|e| e.to_string())?;
    ensure(format!("{hand:.2}") == "0.00", format!("hand case {hand}"))?;
    let s = random_signal(5, 256);
    let e: Vec<f64> = s.iter().zip(random_signal(6, 256)).map(|(a, b)| a + 0.3 * b).collect();
    let base = si_snr(&e, &s).unwrap();
    let mut worst: f64 = 0.0;
    for k in -3..=3 {
        let a = 10f64.powi(k);
        let scaled: Vec<f64> = e.iter().map(|v| v * a).collect();
        worst = worst.max((si_snr(&scaled, &s).unwrap() - base).abs());
    }
    ensure(worst <= 1e-10, format!("scale deviation {worst:e}"))?;
    let imp = si_snr_improvement(&e, &e, &s).unwrap();
    ensure(imp == 0.0, format!("est=mix gives {imp}"))?;
    Ok(format!("hand case {hand:.2} dB; scale deviation {worst:.1e} dB; est=mix -> {imp:.2} dB"))
}

fn oracle_smoke() -> Check {
    let t = Instant::now();
    let s1 = synth_test_signal(SignalKind::Sine { freq_hz: 300.0 }, 0, 8000, 8000).unwrap();
    let s2 = synth_test_signal(SignalKind::Sine { freq_hz: 2000.0 }, 0, 8000, 8000).unwrap();
    let sep = oracle_separate(&s1, &s2, 0.0, &bank(128), 8).map_err(|e| e.to_string())?;
    let (a, b) = (sep.sources[0].si_snr_improvement_db, sep.sources[1].si_snr_improvement_db);
    let el = t.elapsed();
    ensure(a > 0.0 && b > 0.0, format!("SI-SNRi {a:.2} / {b:.2} dB"))?;
    ensure(a >= ORACLE_FLOOR_S1_DB, format!("s1 {a:.4} dB below floor {ORACLE_FLOOR_S1_DB}"))?;
    ensure(b >= ORACLE_FLOOR_S2_DB, format!("s2 {b:.4} dB below floor {ORACLE_FLOOR_S2_DB}"))?;
    within(el, Duration::from_secs(5))?;
    Ok(format!("SI-SNRi {a:.2} / {b:.2} dB (floors {ORACLE_FLOOR_S1_DB} / {ORACLE_FLOOR_S2_DB}), {el:?}"))
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str| -> Result<Vec<u8>, String> {
        let path = dir.path().join(name);
        let st = Command::new(env!("CARGO_BIN_EXE_mpgtf"))
            .args(["gen", "--n", "128", "--output", path.to_str().unwrap()])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(st.status.success(), String::from_utf8_lossy(&st.stderr).to_string())?;
        std::fs::read(&path).map_err(|e| e.to_string())
    };
    let a = run("a.json")?;
    let b = run("b.json")?;
    ensure(a == b, "outputs differ")?;
    Ok(format!("two `gen --n 128` runs byte-identical ({} bytes)", a.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("center-frequency count", center_count),
        ("minimum-N and parity gates", minimum_n_and_parity),
        ("phase-allocation ledger", phase_ledger),
        ("pair antisymmetry", pair_antisymmetry),
        ("normalization", normalization),
        ("ERB self-consistency", erb_consistency),
        ("encoder/decoder oracle equivalence", encoder_oracle),
        ("pseudo-inverse reconstruction", pinv_reconstruction),
        ("rank property", rank_property),
        ("SI-SNR unit behavior", si_snr_units),
        ("oracle separation smoke test", oracle_smoke),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match std::panic::catch_unwind(check) {
            Ok(Ok(detail)) => println!("PASS  {name}: {detail}"),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL  {name}: panicked");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
