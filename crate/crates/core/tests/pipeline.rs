mod common;

use common::*;
use mpgtf::audio_io::{synth_test_signal, SignalKind};
use mpgtf::metrics::si_snr;
use mpgtf::mpgtf::{build_mpgtf, Filterbank, MpgtfConfig};
use mpgtf::transform::*;
use mpgtf::AudioSignal;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn bank(n: usize) -> Filterbank {
    build_mpgtf(&MpgtfConfig::with_filters(n)).unwrap()
}

fn rows(b: &Filterbank) -> Vec<Vec<f64>> {
    b.filters().iter().map(|f| f.coeffs.clone()).collect()
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn sig(v: Vec<f64>) -> AudioSignal {
    AudioSignal::new(v, 8000).unwrap()
}

#[test]
fn encode_matches_nested_loops() {
    let b = bank(128);
    for (seed, len) in [(1, 64), (2, 100), (3, 1024)] {
        let x = random_signal(seed, len);
        let got = encode(&sig(x.clone()), &b, 8).unwrap();
        let want = naive_encode(&x, &rows(&b), 8);
        assert_eq!(got.n_frames(), (len - 16) / 8 + 1);
        for (g, w) in to_rows(got.values()).iter().zip(&want) {
            assert!(max_abs_diff(g, w) < 1e-12);
        }
    }
}

#[test]
fn sixty_four_samples_give_seven_frames() {
    let e = encode(&sig(random_signal(9, 64)), &bank(48), 8).unwrap();
    assert_eq!(e.n_frames(), 7);
}

#[test]
fn decode_matches_nested_loops() {
    let b = bank(128);
    let dec = pseudo_inverse_decoder(&b).unwrap();
    let values = DMatrix::from_fn(128, 3, |n, i| random_signal((n * 3 + i) as u64, 1)[0]);
    let enc = EncodedSignal::new(values.clone(), 8, 16, 8000).unwrap();
    let got = decode(&enc, &dec, 40).unwrap();
    let want = naive_decode(&to_rows(&values), &rows(dec.bank()), 8, 40);
    assert!(max_abs_diff(got.samples(), &want) < 1e-12);
}

#[test]
fn pinv_decoder_matches_normal_equations() {
    for n in [48, 128, 512] {
        let b = bank(n);
        let dec = pseudo_inverse_decoder(&b).unwrap();
        let oracle = normal_equation_decoder(&rows(&b));
        for (got, want) in dec.bank().filters().iter().zip(&oracle) {
            let scale = want.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            assert!(max_abs_diff(&got.coeffs, want) <= 1e-8 * scale.max(1.0));
        }
    }
}

#[test]
fn pinv_is_a_left_inverse() {
    for n in [48, 64, 128, 512] {
        let b = bank(n);
        let dec = pseudo_inverse_decoder(&b).unwrap();
        let len = b.filter_length();
        let e = DMatrix::from_fn(n, len, |r, l| b.filters()[r].coeffs[len - 1 - l]);
        let p = DMatrix::from_fn(len, n, |l, r| dec.bank().filters()[r].coeffs[l]);
        let id = p * e;
        assert!((id - DMatrix::<f64>::identity(len, len)).abs().max() < 1e-8);
    }
}

#[test]
fn unrectified_round_trip_reconstructs_every_frame() {
    let b = bank(128);
    let dec = pseudo_inverse_decoder(&b).unwrap();
    let x = random_signal(4, 16);
    let y = decode(&encode(&sig(x.clone()), &b, 8).unwrap(), &dec, 16).unwrap();
    assert!(max_abs_diff(y.samples(), &x) < 1e-10);
}

#[test]
fn rectified_pairs_recombine() {
    let b = bank(128);
    let x = sig(random_signal(21, 400));
    let e = encode(&x, &b, 8).unwrap();
    let r = rectify(&e);
    for k in 0..64 {
        for i in 0..e.n_frames() {
            let diff = r.values()[(2 * k, i)] - r.values()[(2 * k + 1, i)];
            assert!((diff - e.values()[(2 * k, i)]).abs() < 1e-12);
        }
    }
}

#[test]
fn pinv_pipeline_reconstructs_interior() {
    for n in [48, 64, 128, 512] {
        let b = bank(n);
        let x = synth_test_signal(SignalKind::Noise, 77, 2000, 8000).unwrap();
        let y = pinv_round_trip(&x, &b, 8).unwrap();
        let got = si_snr(interior(y.samples(), 16), interior(x.samples(), 16)).unwrap();
        assert!(got >= 50.0, "N={n}: {got}");
        // Interior gain is exactly one: half from rectification, two from overlap.
        assert!(max_abs_diff(interior(y.samples(), 16), interior(x.samples(), 16)) < 1e-9);
    }
}

#[test]
fn sweep_reconstructs_too() {
    let b = bank(128);
    let x = synth_test_signal(SignalKind::Sweep, 0, 4000, 8000).unwrap();
    let y = pinv_round_trip(&x, &b, 8).unwrap();
    assert!(si_snr(interior(y.samples(), 16), interior(x.samples(), 16)).unwrap() >= 50.0);
}

#[test]
fn complementary_masks_add_up() {
    let b = bank(64);
    let x = sig(random_signal(8, 300));
    let xp = rectify(&encode(&x, &b, 8).unwrap());
    let (r, c) = (xp.n_filters(), xp.n_frames());
    let m = DMatrix::from_fn(r, c, |i, j| ((i * 7 + j * 3) % 11) as f64 / 10.0);
    let m1 = Mask::new(m.clone()).unwrap();
    let m2 = Mask::new(m.map(|v| 1.0 - v)).unwrap();
    let sum = apply_mask(&xp, &m1).unwrap().values() + apply_mask(&xp, &m2).unwrap().values();
    assert!((sum - xp.values()).abs().max() < 1e-12);
}

#[test]
fn mask_additivity_through_decoder() {
    let b = bank(128);
    let dec = pseudo_inverse_decoder(&b).unwrap();
    let x = sig(random_signal(12, 500));
    let xp = rectify(&encode(&x, &b, 8).unwrap());
    let (r, c) = (xp.n_filters(), xp.n_frames());
    let a = DMatrix::from_fn(r, c, |i, j| ((i + 2 * j) % 5) as f64 * 0.3);
    let bm = DMatrix::from_fn(r, c, |i, j| ((3 * i + j) % 7) as f64 * 0.2);
    let d = |m: DMatrix<f64>| decode(&apply_mask(&xp, &Mask::new(m).unwrap()).unwrap(), &dec, 500).unwrap();
    let lhs: Vec<f64> = d(a.clone())
        .samples()
        .iter()
        .zip(d(bm.clone()).samples())
        .map(|(p, q)| p + q)
        .collect();
    let rhs = d(a + bm);
    assert!(max_abs_diff(&lhs, rhs.samples()) < 1e-10);
}

#[test]
fn time_shift_moves_frames() {
    let b = bank(48);
    let x = random_signal(30, 400);
    let shifted: Vec<f64> = std::iter::repeat_n(0.0, 8).chain(x.iter().copied()).collect();
    let e = encode(&sig(x), &b, 8).unwrap();
    let s = encode(&sig(shifted), &b, 8).unwrap();
    for i in 0..e.n_frames() {
        for n in 0..48 {
            assert!((e.values()[(n, i)] - s.values()[(n, i + 1)]).abs() < 1e-12);
        }
    }
}

#[test]
fn si_snr_agrees_with_naive_definition() {
    let s = random_signal(40, 300);
    let e: Vec<f64> = s.iter().zip(random_signal(41, 300)).map(|(a, b)| 0.7 * a + 0.2 * b).collect();
    assert!((si_snr(&e, &s).unwrap() - naive_si_snr(&e, &s)).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn encode_is_linear(seed in 0u64..1000, alpha in -3.0f64..3.0, beta in -3.0f64..3.0, len in 16usize..300) {
        let b = bank(48);
        let x = random_signal(seed, len);
        let y = random_signal(seed + 7919, len);
        let combo: Vec<f64> = x.iter().zip(&y).map(|(p, q)| alpha * p + beta * q).collect();
        let ex = encode(&sig(x), &b, 8).unwrap();
        let ey = encode(&sig(y), &b, 8).unwrap();
        let ec = encode(&sig(combo), &b, 8).unwrap();
        let lin = ex.values() * alpha + ey.values() * beta;
        prop_assert!((lin - ec.values()).abs().max() < 1e-10);
    }

    #[test]
    fn rectify_is_nonnegative_and_idempotent(seed in 0u64..1000, len in 16usize..200) {
        let e = encode(&sig(random_signal(seed, len)), &bank(48), 8).unwrap();
        let r = rectify(&e);
        prop_assert!(r.values().iter().all(|&v| v >= 0.0));
        prop_assert_eq!(rectify(&r), r);
    }

    #[test]
    fn frame_count_law(len in 16usize..2000, shift in 1usize..20) {
        let e = encode(&sig(vec![0.0; len]), &bank(48), shift).unwrap();
        prop_assert_eq!(e.n_frames(), (len - 16) / shift + 1);
    }
}
