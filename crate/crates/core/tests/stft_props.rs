use proptest::prelude::*;
use tfinpaint::stft::StftOperator;
use tfinpaint::{affected_samples, istft, stft, synth, Spectrogram, StftParams, TfMask, TimeSignal};

fn padded(x: &[f64], params: &StftParams) -> Vec<f64> {
    let mut v = x.to_vec();
    v.resize(params.padded_len(x.len()), 0.0);
    v
}

fn params_strategy() -> impl Strategy<Value = StftParams> {
    (1usize..=4, prop::sample::select(vec![4usize, 8]), 0usize..3).prop_map(|(k, ratio, extra)| {
        let hop = 4 * k;
        let win = hop * ratio;
        StftParams::new(win, hop, win * (1 << extra)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn parseval_and_perfect_reconstruction(params in params_strategy(), n in 1usize..700, seed in any::<u64>()) {
        let x = synth::white_noise(n, 1.0, seed);
        let spec = stft(&TimeSignal::new(x.clone(), 8000).unwrap(), &params).unwrap();
        let e = x.iter().map(|v| v * v).sum::<f64>();
        prop_assert!((spec.energy() - e).abs() <= 1e-9 * e);
        let y = istft(&spec).unwrap();
        prop_assert_eq!(y.len(), n);
        for (a, b) in x.iter().zip(y.samples()) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn linearity(n in 64usize..600, alpha in -3.0f64..3.0, beta in -3.0f64..3.0, seed in any::<u64>()) {
        let params = StftParams::new(32, 8, 32).unwrap();
        let x = synth::white_noise(n, 1.0, seed);
        let y = synth::white_noise(n, 1.0, seed.wrapping_add(1));
        let mix: Vec<f64> = x.iter().zip(&y).map(|(a, b)| alpha * a + beta * b).collect();
        let sx = stft(&TimeSignal::new(x, 8000).unwrap(), &params).unwrap();
        let sy = stft(&TimeSignal::new(y, 8000).unwrap(), &params).unwrap();
        let sm = stft(&TimeSignal::new(mix, 8000).unwrap(), &params).unwrap();
        let scale = sm.energy().sqrt().max(1.0);
        for ((m, a), b) in sm.coeffs().iter().zip(sx.coeffs()).zip(sy.coeffs()) {
            prop_assert!((m - (a * alpha + b * beta)).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn consecutive_gap_footprint(g in 1usize..7, start in 4usize..30) {
        let params = StftParams::default();
        let n = 512 * 48;
        let mask = TfMask::new(params.n_frames(n), start..start + g).unwrap();
        let tm = affected_samples(&mask, &params, n).unwrap();
        prop_assert_eq!(tm.n_missing(), (g - 1) * 512 + 2048);
        let runs = tm.missing_runs();
        prop_assert_eq!(runs.len(), 1);
        prop_assert_eq!(runs[0].start, start * 512);
    }
}

#[test]
fn tight_frame_on_long_signals() {
    let params = StftParams::default();
    for (i, n) in [512usize, 5000, 80000].into_iter().enumerate() {
        let x = synth::white_noise(n, 0.3, 100 + i as u64);
        let spec = stft(&TimeSignal::new(x.clone(), 16000).unwrap(), &params).unwrap();
        let e = x.iter().map(|v| v * v).sum::<f64>();
        assert!((spec.energy() - e).abs() <= 1e-9 * e);
        let op = StftOperator::new(params).unwrap();
        let full = op.synthesize_padded(&spec);
        let xp = padded(&x, &params);
        let worst = full.iter().zip(&xp).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-9, "n = {n}: {worst}");
    }
}

#[test]
fn synthesis_of_zero_and_single_column() {
    let params = StftParams::new(64, 16, 64).unwrap();
    let zero = Spectrogram::zeros(params, 640, 8000);
    assert!(istft(&zero).unwrap().samples().iter().all(|v| *v == 0.0));

    let x = synth::white_noise(640, 1.0, 5);
    let full = stft(&TimeSignal::new(x, 8000).unwrap(), &params).unwrap();
    let mut one = Spectrogram::zeros(params, 640, 8000);
    one.column_mut(10).copy_from_slice(full.column(10));
    let y = istft(&one).unwrap();
    for (i, v) in y.samples().iter().enumerate() {
        if !(160..224).contains(&i) {
            assert_eq!(*v, 0.0, "sample {i}");
        }
    }
    assert!(y.samples()[170..220].iter().any(|v| v.abs() > 0.0));
}

#[test]
fn two_adjacent_columns_footprint() {
    let params = StftParams::default();
    let n = 80000;
    let mask = TfMask::new(params.n_frames(n), [20, 21]).unwrap();
    let tm = affected_samples(&mask, &params, n).unwrap();
    assert_eq!(tm.n_missing(), 2560);
    assert!(affected_samples(&TfMask::empty(params.n_frames(n)), &params, n)
        .unwrap()
        .flags()
        .iter()
        .all(|r| *r));
    assert!(affected_samples(&TfMask::empty(3), &params, n).is_err());
}
