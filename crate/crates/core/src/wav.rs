//! Mono WAV input/output.
//!
//! Reading accepts 16-bit integer PCM (scaled by 1/32768, so full-scale
//! positive is 32767/32768) and 32-bit float. Multichannel files yield
//! their first channel. Writing always produces 32-bit float mono.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::error::{Error, Result};
use crate::stft::TimeSignal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SaveReport {
    /// Samples outside [-1, 1] that were clipped before writing.
    pub clipped: usize,
}

// Reader failures after the file opened are reported as format problems:
// hound surfaces short reads as generic I/O errors.
fn read_error(path: &Path, err: hound::Error) -> Error {
    Error::UnsupportedFormat(format!("{}: {err}", path.display()))
}

fn write_error(path: &Path, err: hound::Error) -> Error {
    match err {
        hound::Error::IoError(e) => Error::io(path, e),
        other => Error::UnsupportedFormat(format!("{}: {other}", path.display())),
    }
}

pub fn load_wav(path: impl AsRef<Path>) -> Result<TimeSignal> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = WavReader::new(BufReader::new(file)).map_err(|e| read_error(path, e))?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(Error::UnsupportedFormat(format!("{}: zero channels", path.display())));
    }
    if channels > 1 {
        log::warn!(
            "{}: {channels} channels, using the first one",
            path.display()
        );
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => reader
            .into_samples::<i16>()
            .map(|s| s.map(|v| f64::from(v) / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| read_error(path, e))?,
        (SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| read_error(path, e))?,
        (fmt, bits) => {
            return Err(Error::UnsupportedFormat(format!(
                "{}: {bits}-bit {fmt:?} samples",
                path.display()
            )))
        }
    };
    let samples = interleaved.into_iter().step_by(channels).collect();
    TimeSignal::new(samples, spec.sample_rate)
}

pub fn save_wav(path: impl AsRef<Path>, x: &TimeSignal) -> Result<SaveReport> {
    let path = path.as_ref();
    let spec = WavSpec {
        channels: 1,
        sample_rate: x.sample_rate(),
        bits_per_sample: 32,
        sample_format: SampleFormat::Float,
    };
    let mut writer = WavWriter::create(path, spec).map_err(|e| write_error(path, e))?;
    let mut report = SaveReport::default();
    for &v in x.samples() {
        if v.abs() > 1.0 {
            report.clipped += 1;
        }
        writer
            .write_sample(v.clamp(-1.0, 1.0) as f32)
            .map_err(|e| write_error(path, e))?;
    }
    writer.finalize().map_err(|e| write_error(path, e))?;
    if report.clipped > 0 {
        log::warn!("{}: clipped {} samples", path.display(), report.clipped);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pcm16_full_scale_square() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("square.wav");
        let spec = WavSpec {
            channels: 1,
            sample_rate: 16000,
            bits_per_sample: 16,
            sample_format: SampleFormat::Int,
        };
        let mut w = WavWriter::create(&path, spec).unwrap();
        for i in 0..64 {
            w.write_sample(if (i / 8) % 2 == 0 { i16::MAX } else { i16::MIN })
                .unwrap();
        }
        w.finalize().unwrap();

        let x = load_wav(&path).unwrap();
        assert_eq!(x.sample_rate(), 16000);
        assert_eq!(x.len(), 64);
        assert_eq!(x.samples()[0], 32767.0 / 32768.0);
        assert_eq!(x.samples()[8], -1.0);
    }

    #[test]
    fn stereo_takes_first_channel() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stereo.wav");
        let spec = WavSpec {
            channels: 2,
            sample_rate: 8000,
            bits_per_sample: 32,
            sample_format: SampleFormat::Float,
        };
        let mut w = WavWriter::create(&path, spec).unwrap();
        for i in 0..10 {
            w.write_sample(i as f32 * 0.1).unwrap();
            w.write_sample(-1.0f32).unwrap();
        }
        w.finalize().unwrap();
        let x = load_wav(&path).unwrap();
        assert_eq!(x.len(), 10);
        assert_eq!(x.samples()[3], f64::from(0.3f32));
    }

    #[test]
    fn silent_file_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("silence.wav");
        save_wav(&path, &TimeSignal::zeros(16000, 16000).unwrap()).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let reader = WavReader::open(&path).unwrap();
        let spec = reader.spec();
        assert_eq!(spec.channels, 1);
        assert_eq!(spec.sample_rate, 16000);
        assert_eq!(spec.bits_per_sample, 32);
        assert_eq!(spec.sample_format, SampleFormat::Float);
        assert_eq!(reader.len(), 16000);
        assert_eq!(&bytes[..4], b"RIFF");
        let x = load_wav(&path).unwrap();
        assert!(x.samples().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn round_trip_and_clipping() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.wav");
        let samples = vec![0.1, -0.25, 0.3333, 1.5, -2.0, 0.999];
        let report = save_wav(&path, &TimeSignal::new(samples.clone(), 44100).unwrap()).unwrap();
        assert_eq!(report.clipped, 2);
        let x = load_wav(&path).unwrap();
        assert_eq!(x.sample_rate(), 44100);
        let expected: Vec<f64> = samples
            .iter()
            .map(|v| f64::from(v.clamp(-1.0, 1.0) as f32))
            .collect();
        assert_eq!(x.samples(), expected.as_slice());

        // A float file loaded and saved again keeps its payload bit for bit.
        let path2 = dir.path().join("rt2.wav");
        save_wav(&path2, &x).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&path2).unwrap());
    }

    #[test]
    fn truncated_header_is_unsupported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trunc.wav");
        std::fs::write(&path, b"RIFF\x24\x00\x00\x00WAVEfmt ").unwrap();
        let r = load_wav(&path);
        assert!(matches!(r, Err(Error::UnsupportedFormat(_))), "{r:?}");
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_wav("/definitely/not/here.wav"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn pcm24_is_unsupported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p24.wav");
        let spec = WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 24,
            sample_format: SampleFormat::Int,
        };
        let mut w = WavWriter::create(&path, spec).unwrap();
        w.write_sample(1000i32).unwrap();
        w.finalize().unwrap();
        assert!(matches!(load_wav(&path), Err(Error::UnsupportedFormat(_))));
    }
}
