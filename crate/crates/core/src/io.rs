//! File ingestion and persistence: RIFF/WAVE PCM reading, decimation, the
//! TFSP spectrogram binary format, pitch-track parsing, CSV emission.
//!
//! TFSP layout (all multi-byte fields little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "TFSP"
//! 4       1     version = 1
//! 5       1     flags = 0
//! 6       4     M (u32, frequency bins)
//! 10      4     N (u32, time frames)
//! 14      8     sample_rate (f64, Hz)
//! 22      8     window_len (f64, s)
//! 30      4     hop (u32, samples)
//! 34      8*M   frequency axis (f64, Hz, strictly increasing)
//! ..      8*N   time axis (f64, s, strictly increasing)
//! ..      8*M*N values, column-major
//! ```

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::PitchTrack;
use crate::tf_core::{Spectrogram, TFSupport};

const TFSP_MAGIC: &[u8; 4] = b"TFSP";
const TFSP_VERSION: u8 = 1;
const TFSP_HEADER_LEN: usize = 34;

// ---------------------------------------------------------------------------
// WAV

/// Reads a RIFF/WAVE file: integer PCM (8/16/24-bit) or 32-bit IEEE float,
/// any channel count (channels are averaged to mono).
///
/// Integer samples are scaled to `[-1, 1]` by their nominal full scale
/// (1/32768 for 16-bit); float samples pass through unscaled.
pub fn read_wav(path: &Path) -> Result<(Vec<f64>, f64)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_wav(&bytes)
}

fn fmt_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Format {
        offset: offset as u64,
        message: message.into(),
    }
}

fn parse_wav(bytes: &[u8]) -> Result<(Vec<f64>, f64)> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" {
        return Err(fmt_err(0, "expected RIFF header"));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(fmt_err(8, "expected WAVE form type"));
    }

    let mut pos = 12usize;
    let mut fmt: Option<(u16, u16, u32, u16)> = None; // codec, channels, rate, bits
    let mut data: Option<(usize, usize)> = None; // offset, len
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body = pos + 8;
        if body + size > bytes.len() {
            return Err(fmt_err(pos + 4, "chunk size exceeds file length"));
        }
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(fmt_err(body, "fmt chunk too short"));
                }
                let codec = u16::from_le_bytes(bytes[body..body + 2].try_into().unwrap());
                let channels = u16::from_le_bytes(bytes[body + 2..body + 4].try_into().unwrap());
                let rate = u32::from_le_bytes(bytes[body + 4..body + 8].try_into().unwrap());
                let bits = u16::from_le_bytes(bytes[body + 14..body + 16].try_into().unwrap());
                fmt = Some((codec, channels, rate, bits));
            }
            b"data" => data = Some((body, size)),
            _ => {} // LIST, fact, ... skipped
        }
        pos = body + size + (size & 1); // chunks are word-aligned
    }

    let (codec, channels, rate, bits) =
        fmt.ok_or_else(|| fmt_err(12, "missing fmt chunk"))?;
    let (data_off, data_len) = data.ok_or_else(|| fmt_err(12, "missing data chunk"))?;
    if channels == 0 {
        return Err(fmt_err(data_off, "zero channels"));
    }
    let decode: fn(&[u8]) -> f64 = match (codec, bits) {
        (1, 8) => |b| (b[0] as f64 - 128.0) / 128.0,
        (1, 16) => |b| i16::from_le_bytes([b[0], b[1]]) as f64 / 32768.0,
        (1, 24) => |b| {
            let v = ((b[2] as i32) << 24 | (b[1] as i32) << 16 | (b[0] as i32) << 8) >> 8;
            v as f64 / 8_388_608.0
        },
        (3, 32) => |b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
        _ => {
            return Err(fmt_err(
                data_off,
                format!("unsupported codec {codec} at {bits} bits (PCM 8/16/24 or float32 only)"),
            ))
        }
    };
    let sample_bytes = (bits / 8) as usize;
    let frame_bytes = sample_bytes * channels as usize;
    let n_frames = data_len / frame_bytes;
    let mut out = Vec::with_capacity(n_frames);
    for f in 0..n_frames {
        let mut acc = 0.0;
        for c in 0..channels as usize {
            let s = data_off + f * frame_bytes + c * sample_bytes;
            acc += decode(&bytes[s..s + sample_bytes]);
        }
        out.push(acc / channels as f64);
    }
    Ok((out, rate as f64))
}

/// Writes a mono 16-bit PCM WAV. Samples are clamped to `[-1, 1)` full scale.
pub fn write_wav_pcm16(path: &Path, samples: &[f64], sample_rate: f64) -> Result<()> {
    let data_len = samples.len() * 2;
    let mut bytes = Vec::with_capacity(44 + data_len);
    bytes.extend_from_slice(b"RIFF");
    bytes.extend_from_slice(&(36 + data_len as u32).to_le_bytes());
    bytes.extend_from_slice(b"WAVE");
    bytes.extend_from_slice(b"fmt ");
    bytes.extend_from_slice(&16u32.to_le_bytes());
    bytes.extend_from_slice(&1u16.to_le_bytes()); // PCM
    bytes.extend_from_slice(&1u16.to_le_bytes()); // mono
    bytes.extend_from_slice(&(sample_rate as u32).to_le_bytes());
    bytes.extend_from_slice(&((sample_rate as u32) * 2).to_le_bytes());
    bytes.extend_from_slice(&2u16.to_le_bytes());
    bytes.extend_from_slice(&16u16.to_le_bytes());
    bytes.extend_from_slice(b"data");
    bytes.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in samples {
        let q = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        bytes.extend_from_slice(&q.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// Decimation

/// Number of taps of the anti-aliasing FIR.
pub const DECIMATE_TAPS: usize = 127;

/// Low-pass filters and keeps every `factor`-th sample.
///
/// The filter is a Hamming-windowed sinc with `cutoff` (default 0.45) as a
/// fraction of the decimated sample rate, 127 taps, group delay compensated,
/// taps normalized to unit DC gain. `factor = 1` returns the signal
/// unchanged.
pub fn decimate(signal: &[f64], factor: usize, cutoff: f64) -> Result<Vec<f64>> {
    if factor == 0 {
        return Err(Error::InvalidArgument("decimation factor must be >= 1".into()));
    }
    if factor == 1 {
        return Ok(signal.to_vec());
    }
    if !(cutoff > 0.0 && cutoff < 0.5 * factor as f64) {
        return Err(Error::InvalidArgument(format!(
            "cutoff fraction {cutoff} must lie in (0, {})",
            0.5 * factor as f64
        )));
    }
    let half = (DECIMATE_TAPS - 1) / 2; // 63
    let fc = cutoff / factor as f64; // cycles per input sample
    let mut taps = [0.0f64; DECIMATE_TAPS];
    let mut norm = 0.0;
    for (i, tap) in taps.iter_mut().enumerate() {
        let x = i as f64 - half as f64;
        let sinc = if x == 0.0 {
            2.0 * fc
        } else {
            (2.0 * std::f64::consts::PI * fc * x).sin() / (std::f64::consts::PI * x)
        };
        let window =
            0.54 - 0.46 * (2.0 * std::f64::consts::PI * i as f64 / (DECIMATE_TAPS - 1) as f64).cos();
        *tap = sinc * window;
        norm += *tap;
    }
    for tap in &mut taps {
        *tap /= norm;
    }

    let out_len = signal.len().div_ceil(factor);
    let mut out = Vec::with_capacity(out_len);
    for j in 0..out_len {
        let center = (j * factor) as i64;
        let mut acc = 0.0;
        for (i, tap) in taps.iter().enumerate() {
            let s = center + i as i64 - half as i64;
            if s >= 0 && (s as usize) < signal.len() {
                acc += tap * signal[s as usize];
            }
        }
        out.push(acc);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// TFSP

/// Serializes a spectrogram to the TFSP layout.
pub fn write_spectrogram(path: &Path, spec: &Spectrogram) -> Result<()> {
    let m = spec.n_freqs();
    let n = spec.n_times();
    let mut bytes = Vec::with_capacity(TFSP_HEADER_LEN + 8 * (m + n + m * n));
    bytes.extend_from_slice(TFSP_MAGIC);
    bytes.push(TFSP_VERSION);
    bytes.push(0); // flags
    bytes.extend_from_slice(&(m as u32).to_le_bytes());
    bytes.extend_from_slice(&(n as u32).to_le_bytes());
    bytes.extend_from_slice(&spec.sample_rate().to_le_bytes());
    bytes.extend_from_slice(&spec.window_len().to_le_bytes());
    bytes.extend_from_slice(&spec.hop().to_le_bytes());
    for &f in spec.support().freqs() {
        bytes.extend_from_slice(&f.to_le_bytes());
    }
    for &t in spec.support().times() {
        bytes.extend_from_slice(&t.to_le_bytes());
    }
    for &v in spec.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Deserializes a TFSP file; the inverse of [`write_spectrogram`] bit-exactly.
pub fn read_spectrogram(path: &Path) -> Result<Spectrogram> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < TFSP_HEADER_LEN {
        return Err(fmt_err(bytes.len(), "truncated TFSP header (need 34 bytes)"));
    }
    if &bytes[0..4] != TFSP_MAGIC {
        return Err(fmt_err(0, "bad magic, expected \"TFSP\""));
    }
    if bytes[4] != TFSP_VERSION {
        return Err(fmt_err(4, format!("unsupported version {}", bytes[4])));
    }
    if bytes[5] != 0 {
        return Err(fmt_err(5, format!("unsupported flags 0x{:02x}", bytes[5])));
    }
    let m = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
    let n = u32::from_le_bytes(bytes[10..14].try_into().unwrap()) as usize;
    let sample_rate = f64::from_le_bytes(bytes[14..22].try_into().unwrap());
    let window_len = f64::from_le_bytes(bytes[22..30].try_into().unwrap());
    let hop = u32::from_le_bytes(bytes[30..34].try_into().unwrap());
    let expect = TFSP_HEADER_LEN + 8 * (m + n + m * n);
    if bytes.len() != expect {
        return Err(fmt_err(
            bytes.len().min(expect),
            format!(
                "file length {} does not match header-implied length {expect}",
                bytes.len()
            ),
        ));
    }
    let read_f64s = |start: usize, count: usize| -> Vec<f64> {
        (0..count)
            .map(|i| {
                f64::from_le_bytes(bytes[start + 8 * i..start + 8 * i + 8].try_into().unwrap())
            })
            .collect()
    };
    let freqs = read_f64s(TFSP_HEADER_LEN, m);
    let times = read_f64s(TFSP_HEADER_LEN + 8 * m, n);
    let values = read_f64s(TFSP_HEADER_LEN + 8 * (m + n), m * n);
    let support = TFSupport::new(freqs, times)?;
    Spectrogram::new(support, values, window_len, hop, sample_rate)
}

// ---------------------------------------------------------------------------
// Pitch tracks

/// Parses a whitespace-separated pitch annotation file: one frame per line,
/// `f0` in Hz at column `f0_column` (0-based), `0` marking unvoiced frames;
/// extra columns are ignored. Frame `i` is stamped at `i * frame_hop_s`.
pub fn parse_pitch_track(path: &Path, frame_hop_s: f64, f0_column: usize) -> Result<PitchTrack> {
    if !(frame_hop_s > 0.0) {
        return Err(Error::InvalidArgument("frame hop must be positive".into()));
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut f0 = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let field = line.split_whitespace().nth(f0_column).ok_or(Error::Parse {
            line: idx + 1,
            message: format!("missing column {f0_column}"),
        })?;
        let value: f64 = field.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("not a number: {field:?}"),
        })?;
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("f0 must be finite and nonnegative, got {value}"),
            });
        }
        f0.push(value);
    }
    let times = (0..f0.len()).map(|i| i as f64 * frame_hop_s).collect();
    PitchTrack::new(times, f0)
}

// ---------------------------------------------------------------------------
// CSV

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum CsvField {
    Text(String),
    Float(f64),
    Int(i64),
}

impl From<&str> for CsvField {
    fn from(v: &str) -> Self {
        CsvField::Text(v.to_string())
    }
}
impl From<String> for CsvField {
    fn from(v: String) -> Self {
        CsvField::Text(v)
    }
}
impl From<f64> for CsvField {
    fn from(v: f64) -> Self {
        CsvField::Float(v)
    }
}
impl From<usize> for CsvField {
    fn from(v: usize) -> Self {
        CsvField::Int(v as i64)
    }
}

fn push_field(out: &mut String, field: &CsvField) {
    match field {
        // floats use the shortest representation that parses back bit-exactly
        CsvField::Float(v) => out.push_str(&format!("{v}")),
        CsvField::Int(v) => out.push_str(&format!("{v}")),
        CsvField::Text(v) => {
            debug_assert!(!v.contains(',') && !v.contains('\n'));
            out.push_str(v);
        }
    }
}

/// Writes a header row and records as comma-separated values. Floats use `.`
/// as the decimal separator and round-trip bit-exactly through `parse`.
pub fn write_results_csv(path: &Path, header: &[&str], rows: &[Vec<CsvField>]) -> Result<()> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        for (i, field) in row.iter().enumerate() {
            if i > 0 {
                text.push(',');
            }
            push_field(&mut text, field);
        }
        text.push('\n');
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}
