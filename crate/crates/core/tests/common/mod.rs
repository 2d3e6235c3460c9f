#![allow(dead_code)]

pub mod oracle;

use std::path::Path;

use tfinpaint::synth;

pub const RATE: u32 = 16_000;

pub fn ar4_coeffs() -> Vec<f64> {
    synth::resonant_ar_coeffs(&[(440.0, 0.98), (2200.0, 0.95)], f64::from(RATE))
}

/// AR(4) realization scaled to a peak of `peak`.
pub fn ar4_signal(n: usize, seed: u64, peak: f64) -> Vec<f64> {
    normalize(synth::ar_process(&ar4_coeffs(), n, 0.01, seed), peak)
}

pub fn normalize(x: Vec<f64>, peak: f64) -> Vec<f64> {
    let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    x.into_iter().map(|v| v * peak / m).collect()
}

pub fn write_pcm16(path: &Path, x: &[f64], rate: u32) {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::create(path, spec).unwrap();
    for v in x {
        w.write_sample((v * 32768.0).round().clamp(-32768.0, 32767.0) as i16)
            .unwrap();
    }
    w.finalize().unwrap();
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
