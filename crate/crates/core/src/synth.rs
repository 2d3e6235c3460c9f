//! Seeded synthetic signals for tests, demos and the synthetic corpus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const BURN_IN: usize = 2000;

/// Gaussian white noise with standard deviation `std`.
pub fn white_noise(n: usize, std: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            std * z
        })
        .collect()
}

/// Realization of the AR process `sum_i a_i x_{n-i} = e_n` driven by
/// Gaussian innovation of standard deviation `noise_std`. The first
/// coefficient must be 1. A burn-in segment is discarded so the output is
/// stationary from the first sample.
pub fn ar_process(coeffs: &[f64], n: usize, noise_std: f64, seed: u64) -> Vec<f64> {
    assert_eq!(coeffs.first(), Some(&1.0), "AR coefficients must start with 1");
    let innovation = white_noise(n + BURN_IN, noise_std, seed);
    let mut x = vec![0.0; n + BURN_IN];
    for t in 0..x.len() {
        let mut v = innovation[t];
        for (i, a) in coeffs.iter().enumerate().skip(1) {
            if i <= t {
                v -= a * x[t - i];
            }
        }
        x[t] = v;
    }
    x.split_off(BURN_IN)
}

/// Prediction-error filter with resonances at the given `(frequency_hz,
/// pole_radius)` pairs, i.e. the product of
/// `1 - 2 r cos(w) z^-1 + r^2 z^-2` sections.
pub fn resonant_ar_coeffs(resonances: &[(f64, f64)], sample_rate: f64) -> Vec<f64> {
    let mut a = vec![1.0];
    for &(freq, radius) in resonances {
        let w = 2.0 * std::f64::consts::PI * freq / sample_rate;
        let section = [1.0, -2.0 * radius * w.cos(), radius * radius];
        let mut next = vec![0.0; a.len() + 2];
        for (i, ai) in a.iter().enumerate() {
            for (j, sj) in section.iter().enumerate() {
                next[i + j] += ai * sj;
            }
        }
        a = next;
    }
    a
}

/// Sum of decaying harmonic partials on a few repeating notes plus a light
/// noise floor, loosely resembling a plucked-string recording.
pub fn harmonic_tones(n: usize, sample_rate: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let note_len = (sample_rate * 0.5) as usize;
    let fundamentals: Vec<f64> = (0..4).map(|_| rng.random_range(110.0..440.0)).collect();
    let n_partials = 8;
    let amps: Vec<f64> = (0..n_partials)
        .map(|k| rng.random_range(0.5..1.0) / (k + 1) as f64)
        .collect();
    let phases: Vec<f64> = (0..n_partials)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect();
    let noise = white_noise(n, 1e-3, seed ^ 0x5eed);
    (0..n)
        .map(|i| {
            let note = (i / note_len.max(1)) % fundamentals.len();
            let t_note = (i % note_len.max(1)) as f64 / sample_rate;
            let t = i as f64 / sample_rate;
            let f0 = fundamentals[note];
            let env = (-3.0 * t_note).exp();
            let tone: f64 = amps
                .iter()
                .zip(&phases)
                .enumerate()
                .map(|(k, (a, ph))| {
                    let f = f0 * (k + 1) as f64;
                    if f < sample_rate / 2.0 {
                        a * (std::f64::consts::TAU * f * t + ph).sin()
                    } else {
                        0.0
                    }
                })
                .sum();
            0.1 * env * tone + noise[i]
        })
        .collect()
}

/// Voiced-speech-like signal: a glottal pulse train with a gliding pitch,
/// shaped by three formant resonators and a syllabic envelope.
pub fn formant_pulses(n: usize, sample_rate: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f0_lo = rng.random_range(90.0..130.0);
    let f0_hi = f0_lo * rng.random_range(1.3..1.8);
    let syllable_hz = rng.random_range(3.0..5.0);
    let formants = [
        (rng.random_range(500.0..800.0), 0.97),
        (rng.random_range(1000.0..1600.0), 0.96),
        (rng.random_range(2300.0..2900.0), 0.95),
    ];
    let a = resonant_ar_coeffs(&formants, sample_rate);
    let jitter = white_noise(n, 1.0, seed ^ 0x1177);
    let breath = white_noise(n, 0.02, seed ^ 0xb4ea);

    let mut phase = 0.0;
    let mut excitation = vec![0.0; n];
    for i in 0..n {
        let t = i as f64 / sample_rate;
        let glide = 0.5 - 0.5 * (std::f64::consts::TAU * 0.3 * t).cos();
        let f0 = (f0_lo + (f0_hi - f0_lo) * glide) * (1.0 + 0.003 * jitter[i]);
        phase += f0 / sample_rate;
        if phase >= 1.0 {
            phase -= 1.0;
            excitation[i] = 1.0;
        }
        excitation[i] += breath[i];
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut v = excitation[i];
        for (k, ak) in a.iter().enumerate().skip(1) {
            if k <= i {
                v -= ak * y[i - k];
            }
        }
        y[i] = v;
    }
    let peak = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    y.iter()
        .enumerate()
        .map(|(i, v)| {
            let t = i as f64 / sample_rate;
            let env = 0.55 - 0.45 * (std::f64::consts::TAU * syllable_hz * t).cos();
            0.5 * env * v / peak
        })
        .collect()
}
