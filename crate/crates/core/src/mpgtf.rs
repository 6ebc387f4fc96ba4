//! Multi-phase gammatone filterbank construction and serialization.
//!
//! Center frequencies are placed one ERB-rate unit apart between `f_low` and
//! `f_high`. Each frequency receives one or more phases spread evenly over
//! `[0, pi)`; every filter is followed by its pi-shifted (negated) partner, so
//! the bank holds `N = 2 * sum(phases)` filters and `N` must be even.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::erb::{center_frequencies, FrequencyHz};
use crate::error::{Error, Result};
use crate::gammatone::{normalized_gammatone, spectral_peak, FilterSpec};

pub const DEFAULT_N_FILTERS: usize = 128;
pub const DEFAULT_SAMPLE_RATE: u32 = 8000;
pub const DEFAULT_DURATION_S: f64 = 0.002;
pub const DEFAULT_F_LOW_HZ: f64 = 100.0;
pub const DEFAULT_F_HIGH_HZ: f64 = 4000.0;

pub const BANK_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BankKind {
    Analysis,
    Synthesis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Filter {
    pub spec: FilterSpec,
    pub coeffs: Vec<f64>,
}

/// An ordered set of equal-length FIR filters.
#[derive(Debug, Clone, PartialEq)]
pub struct Filterbank {
    filters: Vec<Filter>,
    sample_rate: u32,
    filter_length: usize,
    f_low_hz: f64,
    f_high_hz: f64,
    kind: BankKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpgtfConfig {
    pub n_filters: usize,
    pub sample_rate: u32,
    pub duration_s: f64,
    pub f_low_hz: f64,
    pub f_high_hz: f64,
}

impl Default for MpgtfConfig {
    fn default() -> Self {
        Self {
            n_filters: DEFAULT_N_FILTERS,
            sample_rate: DEFAULT_SAMPLE_RATE,
            duration_s: DEFAULT_DURATION_S,
            f_low_hz: DEFAULT_F_LOW_HZ,
            f_high_hz: DEFAULT_F_HIGH_HZ,
        }
    }
}

impl MpgtfConfig {
    pub fn with_filters(n_filters: usize) -> Self {
        Self {
            n_filters,
            ..Self::default()
        }
    }

    /// Filter length in samples, `round(duration * fs)`.
    pub fn filter_length(&self) -> Result<usize> {
        let len = (self.duration_s * f64::from(self.sample_rate)).round();
        if !len.is_finite() || len < 1.0 {
            return Err(Error::FilterTooShort {
                duration_s: self.duration_s,
                sample_rate: self.sample_rate,
            });
        }
        Ok(len as usize)
    }
}

/// Phases for each center frequency (ascending), given `n_filters` total.
///
/// `N/2` free phases are split as evenly as possible; the remainder goes one
/// each to the lowest center frequencies. A frequency with `k` phases gets
/// `m * pi / k` for `m = 0..k`.
pub fn allocate_phases(n_filters: usize, n_center_freqs: usize) -> Result<Vec<Vec<f64>>> {
    if !n_filters.is_multiple_of(2) {
        return Err(Error::OddFilterCount(n_filters));
    }
    if n_center_freqs == 0 {
        return Err(Error::Domain("at least one center frequency is required".into()));
    }
    let min = 2 * n_center_freqs;
    if n_filters < min {
        return Err(Error::TooFewFilters {
            n: n_filters,
            min,
            n_center: n_center_freqs,
        });
    }
    let half = n_filters / 2;
    let base = half / n_center_freqs;
    let remainder = half % n_center_freqs;
    Ok((0..n_center_freqs)
        .map(|j| {
            let k = if j < remainder { base + 1 } else { base };
            (0..k).map(|m| m as f64 * PI / k as f64).collect()
        })
        .collect())
}

/// Builds the multi-phase gammatone analysis filterbank.
///
/// Filters are ordered by ascending center frequency, then ascending phase,
/// with each filter immediately followed by its inverted partner.
pub fn build_mpgtf(config: &MpgtfConfig) -> Result<Filterbank> {
    if config.sample_rate == 0 {
        return Err(Error::Domain("sample rate must be positive".into()));
    }
    let length = config.filter_length()?;
    let f_low = FrequencyHz::new(config.f_low_hz)?;
    let f_high = FrequencyHz::new(config.f_high_hz)?;
    let centers = center_frequencies(f_low, f_high)?;
    let phases = allocate_phases(config.n_filters, centers.len())?;

    let mut filters = Vec::with_capacity(config.n_filters);
    for (fc, fc_phases) in centers.iter().zip(&phases) {
        for &phase in fc_phases {
            let spec = FilterSpec::mpgtf(*fc, phase)?;
            for s in [spec, spec.inverted_partner()] {
                let (spec, coeffs) = normalized_gammatone(&s, config.sample_rate, length)?;
                filters.push(Filter {
                    spec,
                    coeffs: coeffs.coeffs,
                });
            }
        }
    }
    Ok(Filterbank {
        filters,
        sample_rate: config.sample_rate,
        filter_length: length,
        f_low_hz: config.f_low_hz,
        f_high_hz: config.f_high_hz,
        kind: BankKind::Analysis,
    })
}

impl Filterbank {
    /// Assembles a bank from explicit filters, checking shapes.
    pub fn from_filters(
        filters: Vec<Filter>,
        sample_rate: u32,
        f_low_hz: f64,
        f_high_hz: f64,
        kind: BankKind,
    ) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidBank("sample rate must be positive".into()));
        }
        let filter_length = filters
            .first()
            .map(|f| f.coeffs.len())
            .ok_or_else(|| Error::InvalidBank("bank has no filters".into()))?;
        if filter_length == 0 {
            return Err(Error::InvalidBank("filters must have at least one coefficient".into()));
        }
        for (i, f) in filters.iter().enumerate() {
            if f.coeffs.len() != filter_length {
                return Err(Error::InvalidBank(format!(
                    "filter {i} has {} coefficients, expected {filter_length}",
                    f.coeffs.len()
                )));
            }
            if f.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidBank(format!("filter {i} has non-finite coefficients")));
            }
        }
        Ok(Self {
            filters,
            sample_rate,
            filter_length,
            f_low_hz,
            f_high_hz,
            kind,
        })
    }

    pub fn filters(&self) -> &[Filter] {
        &self.filters
    }

    pub fn n_filters(&self) -> usize {
        self.filters.len()
    }

    pub fn filter_length(&self) -> usize {
        self.filter_length
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn f_low_hz(&self) -> f64 {
        self.f_low_hz
    }

    pub fn f_high_hz(&self) -> f64 {
        self.f_high_hz
    }

    pub fn kind(&self) -> BankKind {
        self.kind
    }

    /// Distinct center frequencies in order of first appearance.
    pub fn center_frequencies(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for f in &self.filters {
            if !out.contains(&f.spec.center_hz) {
                out.push(f.spec.center_hz);
            }
        }
        out
    }

    /// Number of non-inverted phases at each distinct center frequency.
    pub fn phase_counts(&self) -> Vec<usize> {
        self.center_frequencies()
            .iter()
            .map(|&fc| {
                self.filters
                    .iter()
                    .filter(|f| f.spec.center_hz == fc && !f.spec.inverted)
                    .count()
            })
            .collect()
    }

    /// The `N x L` coefficient matrix, one filter per row.
    pub fn coefficient_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n_filters(), self.filter_length, |r, c| {
            self.filters[r].coeffs[c]
        })
    }

    /// Singular values of the coefficient matrix, largest first.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self
            .coefficient_matrix()
            .singular_values()
            .iter()
            .copied()
            .collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Largest deviation from exact negation over adjacent (filter, partner)
    /// pairs, or `None` if the bank is not pair-adjacent.
    pub fn max_pair_deviation(&self) -> Option<f64> {
        if !self.filters.len().is_multiple_of(2) {
            return None;
        }
        let mut worst: f64 = 0.0;
        for pair in self.filters.chunks_exact(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if a.spec.inverted || !b.spec.inverted || a.spec.center_hz != b.spec.center_hz {
                return None;
            }
            for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
                worst = worst.max((x + y).abs());
            }
        }
        Some(worst)
    }

    /// Spectral peak of every filter on the dense normalization grid.
    pub fn spectral_peaks(&self) -> Vec<f64> {
        self.filters.iter().map(|f| spectral_peak(&f.coeffs)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = BankDocumentOut {
            schema_version: BANK_SCHEMA_VERSION,
            kind: self.kind,
            sample_rate: self.sample_rate,
            filter_length: self.filter_length,
            n_filters: self.n_filters(),
            f_low_hz: self.f_low_hz,
            f_high_hz: self.f_high_hz,
            filters: self
                .filters
                .iter()
                .map(|f| {
                    Ok(FilterRecordOut {
                        fc_hz: f.spec.center_hz,
                        phase_rad: f.spec.phase_rad,
                        inverted: f.spec.inverted,
                        order: f.spec.order,
                        bandwidth_hz: f.spec.bandwidth_hz,
                        amplitude_a: f.spec.amplitude,
                        coeffs: f.coeffs.iter().map(|&c| fixed_digits(c)).collect::<Result<_>>()?,
                    })
                })
                .collect::<Result<_>>()?,
        };
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: BankDocumentIn = serde_json::from_str(text)?;
        if doc.schema_version != BANK_SCHEMA_VERSION {
            return Err(Error::InvalidBank(format!(
                "unsupported schema_version {}",
                doc.schema_version
            )));
        }
        if doc.filters.len() != doc.n_filters {
            return Err(Error::InvalidBank(format!(
                "n_filters is {} but {} filters are listed",
                doc.n_filters,
                doc.filters.len()
            )));
        }
        let filters = doc
            .filters
            .into_iter()
            .map(|r| Filter {
                spec: FilterSpec {
                    center_hz: r.fc_hz,
                    phase_rad: r.phase_rad,
                    order: r.order,
                    bandwidth_hz: r.bandwidth_hz,
                    inverted: r.inverted,
                    amplitude: r.amplitude_a,
                },
                coeffs: r.coeffs,
            })
            .collect();
        let bank = Self::from_filters(filters, doc.sample_rate, doc.f_low_hz, doc.f_high_hz, doc.kind)?;
        if bank.filter_length != doc.filter_length {
            return Err(Error::InvalidBank(format!(
                "filter_length is {} but coefficients have length {}",
                doc.filter_length, bank.filter_length
            )));
        }
        Ok(bank)
    }

    /// One row per filter: `index, fc_hz, phase_rad, inverted, c0, c1, ...`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "index,fc_hz,phase_rad,inverted")?;
        for l in 0..self.filter_length {
            write!(out, ",c{l}")?;
        }
        writeln!(out)?;
        for (i, f) in self.filters.iter().enumerate() {
            write!(
                out,
                "{i},{:.16e},{:.16e},{}",
                f.spec.center_hz, f.spec.phase_rad, f.spec.inverted
            )?;
            for c in &f.coeffs {
                write!(out, ",{c:.16e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Formats a double with 17 significant digits as a raw JSON number.
fn fixed_digits(v: f64) -> Result<Box<RawValue>> {
    Ok(RawValue::from_string(format!("{v:.16e}"))?)
}

#[derive(Serialize)]
struct BankDocumentOut {
    schema_version: u32,
    kind: BankKind,
    sample_rate: u32,
    filter_length: usize,
    n_filters: usize,
    f_low_hz: f64,
    f_high_hz: f64,
    filters: Vec<FilterRecordOut>,
}

#[derive(Serialize)]
struct FilterRecordOut {
    fc_hz: f64,
    phase_rad: f64,
    inverted: bool,
    order: u32,
    bandwidth_hz: f64,
    amplitude_a: f64,
    coeffs: Vec<Box<RawValue>>,
}

fn default_kind() -> BankKind {
    BankKind::Analysis
}

fn default_order() -> u32 {
    crate::gammatone::MPGTF_ORDER
}

#[derive(Deserialize)]
struct BankDocumentIn {
    schema_version: u32,
    #[serde(default = "default_kind")]
    kind: BankKind,
    sample_rate: u32,
    filter_length: usize,
    n_filters: usize,
    #[serde(default)]
    f_low_hz: f64,
    #[serde(default)]
    f_high_hz: f64,
    filters: Vec<FilterRecordIn>,
}

#[derive(Deserialize)]
struct FilterRecordIn {
    #[serde(default)]
    fc_hz: f64,
    #[serde(default)]
    phase_rad: f64,
    #[serde(default)]
    inverted: bool,
    #[serde(default = "default_order")]
    order: u32,
    #[serde(default)]
    bandwidth_hz: f64,
    #[serde(default = "one")]
    amplitude_a: f64,
    coeffs: Vec<f64>,
}

fn one() -> f64 {
    1.0
}
