//! Reference implementations used only by tests. Deliberately naive.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// X[n][i] = sum_l x[iD + l] * h_n[L-1-l], as a plain triple loop.
pub fn naive_encode(x: &[f64], filters: &[Vec<f64>], shift: usize) -> Vec<Vec<f64>> {
    let len = filters[0].len();
    let mut frames = 0;
    while frames * shift + len <= x.len() {
        frames += 1;
    }
    let mut out = vec![vec![0.0; frames]; filters.len()];
    for (n, h) in filters.iter().enumerate() {
        for i in 0..frames {
            let mut acc = 0.0;
            for l in 0..len {
                acc += x[i * shift + l] * h[len - 1 - l];
            }
            out[n][i] = acc;
        }
    }
    out
}

/// Per-frame synthesis followed by overlap-add, sample by sample.
pub fn naive_decode(values: &[Vec<f64>], decoder: &[Vec<f64>], shift: usize, out_len: usize) -> Vec<f64> {
    let len = decoder[0].len();
    let frames = values[0].len();
    let mut out = vec![0.0; out_len];
    for (k, o) in out.iter_mut().enumerate() {
        for i in 0..frames {
            if k < i * shift || k - i * shift >= len {
                continue;
            }
            let l = k - i * shift;
            let mut s = 0.0;
            for n in 0..decoder.len() {
                s += values[n][i] * decoder[n][l];
            }
            *o += s;
        }
    }
    out
}

/// Solves A y = b for a small dense system with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut y = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * y[c]).sum();
        y[r] = (b[r] - s) / a[r][r];
    }
    y
}

/// Pseudo-inverse decoder rows through the normal equations: for every
/// encoder row n, d_n = (E^T E)^{-1} e_n with E the time-reversed bank.
pub fn normal_equation_decoder(filters: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let len = filters[0].len();
    let rev: Vec<Vec<f64>> = filters.iter().map(|h| h.iter().rev().copied().collect()).collect();
    let mut gram = vec![vec![0.0; len]; len];
    for row in &rev {
        for i in 0..len {
            for j in 0..len {
                gram[i][j] += row[i] * row[j];
            }
        }
    }
    rev.iter().map(|row| gauss_solve(gram.clone(), row.clone())).collect()
}

pub fn random_signal(seed: u64, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Plain SI-SNR straight from the projection definition.
pub fn naive_si_snr(est: &[f64], reference: &[f64]) -> f64 {
    let dot: f64 = est.iter().zip(reference).map(|(a, b)| a * b).sum();
    let rr: f64 = reference.iter().map(|v| v * v).sum();
    let target: Vec<f64> = reference.iter().map(|r| dot / rr * r).collect();
    let noise: f64 = est.iter().zip(&target).map(|(e, t)| (e - t) * (e - t)).sum();
    let tt: f64 = target.iter().map(|v| v * v).sum();
    10.0 * (tt / noise).log10()
}
