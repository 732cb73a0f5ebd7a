//! File formats: PFM and PNG images, packed normal maps, validity masks and
//! SH coefficient tables.
//!
//! PFM layout written here:
//!
//! ```text
//! PF\n            (Pf\n for one channel)
//! <width> <height>\n
//! -1\n            (negative scale = little-endian samples)
//! <f32 samples, rows bottom-to-top, channels interleaved>
//! ```
//!
//! Images are top-to-bottom in memory. PNG samples are treated as linear
//! values in [0, 1].
//!
//! Coefficient tables are CSV with header `l,m,R,G,B` and exactly 81 rows
//! ordered by `k = l(l+1)+m`, floats printed in shortest round-trip form.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageBuffer, Luma, Rgb};
use thiserror::Error;

use crate::envlight::SHLight;
use crate::sh::{flat_index, BandIndex, NUM_COEFFS};

#[derive(Debug, Error)]
pub enum TexioError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: byte {offset}: {message}", path.display())]
    Format { path: PathBuf, offset: usize, message: String },
    #[error("{}: row {row}: {message}", path.display())]
    Row { path: PathBuf, row: usize, message: String },
    #[error("{}: pixel ({x}, {y}) channel {channel}: {message}", path.display())]
    Pixel { path: PathBuf, x: usize, y: usize, channel: usize, message: String },
    #[error("{}: {message}", path.display())]
    Unsupported { path: PathBuf, message: String },
    #[error("image data: {0}")]
    Data(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> TexioError + '_ {
    move |source| TexioError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Pfm,
    Png8,
    Png16,
}

impl ImageFormat {
    /// `.pfm` → PFM, `.png` → 16-bit PNG.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "pfm" => Some(ImageFormat::Pfm),
            "png" => Some(ImageFormat::Png16),
            _ => None,
        }
    }
}

/// Interleaved samples, rows top-to-bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<f32>,
}

impl Image {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f32>) -> Result<Self, TexioError> {
        if channels != 1 && channels != 3 {
            return Err(TexioError::Data(format!("{channels} channels; only 1 or 3 are supported")));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(channels))
            .ok_or_else(|| TexioError::Data("dimensions overflow".into()))?;
        if data.len() != expected {
            return Err(TexioError::Data(format!("{} samples for {width}x{height}x{channels}", data.len())));
        }
        Ok(Image { width, height, channels, data })
    }

    pub fn from_rgb(width: usize, height: usize, rgb: &[[f64; 3]]) -> Result<Self, TexioError> {
        let data = rgb.iter().flat_map(|p| p.map(|v| v as f32)).collect();
        Image::new(width, height, 3, data)
    }

    pub fn from_scalar(width: usize, height: usize, values: &[f64]) -> Result<Self, TexioError> {
        Image::new(width, height, 1, values.iter().map(|v| *v as f32).collect())
    }

    pub fn to_rgb(&self) -> Result<Vec<[f64; 3]>, TexioError> {
        if self.channels != 3 {
            return Err(TexioError::Data(format!("expected 3 channels, got {}", self.channels)));
        }
        Ok(self.data.chunks_exact(3).map(|p| [p[0] as f64, p[1] as f64, p[2] as f64]).collect())
    }

    pub fn to_scalar(&self) -> Result<Vec<f64>, TexioError> {
        if self.channels != 1 {
            return Err(TexioError::Data(format!("expected 1 channel, got {}", self.channels)));
        }
        Ok(self.data.iter().map(|v| *v as f64).collect())
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn find_nan(&self) -> Option<(usize, usize, usize)> {
        let i = self.data.iter().position(|v| v.is_nan())?;
        let px = i / self.channels;
        Some((px % self.width, px / self.width, i % self.channels))
    }
}

// ---------------------------------------------------------------- PFM

/// Parses PFM bytes; `path` only labels errors.
pub fn decode_pfm(bytes: &[u8], path: &Path) -> Result<Image, TexioError> {
    let fail = |offset: usize, message: &str| TexioError::Format {
        path: path.to_path_buf(),
        offset,
        message: message.to_string(),
    };
    let mut pos = 0;
    // Whitespace-separated header token starting at `pos`.
    let mut token = |what: &str| -> Result<(usize, String), TexioError> {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(fail(start, &format!("missing {what}")));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).map_err(|_| fail(start, &format!("{what} is not ASCII")))?;
        Ok((start, text.to_string()))
    };

    let (at, magic) = token("magic")?;
    let channels = match magic.as_str() {
        "PF" => 3,
        "Pf" => 1,
        _ => return Err(fail(at, &format!("bad magic '{magic}', expected PF or Pf"))),
    };
    let (at, w) = token("width")?;
    let width: usize = w.parse().map_err(|_| fail(at, &format!("bad width '{w}'")))?;
    let (at, h) = token("height")?;
    let height: usize = h.parse().map_err(|_| fail(at, &format!("bad height '{h}'")))?;
    if width == 0 || height == 0 {
        return Err(fail(at, "zero dimension"));
    }
    let (at, sc) = token("scale")?;
    let scale: f32 = sc.parse().map_err(|_| fail(at, &format!("bad scale '{sc}'")))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(fail(at, "scale must be finite and nonzero"));
    }
    let little = scale < 0.0;
    // Exactly one whitespace byte separates the header from the samples.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(fail(pos, "header must end with a single whitespace byte"));
    }
    let data_start = pos + 1;

    let count = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| fail(at, "dimensions overflow"))?;
    let need = count.checked_mul(4).ok_or_else(|| fail(at, "dimensions overflow"))?;
    let body = &bytes[data_start..];
    if body.len() < need {
        return Err(fail(bytes.len(), &format!("truncated: {} sample bytes, need {need}", body.len())));
    }
    if body.len() > need {
        return Err(fail(data_start + need, &format!("{} trailing bytes", body.len() - need)));
    }

    let row_len = width * channels;
    let mut data = vec![0.0f32; count];
    for (file_row, chunk) in body.chunks_exact(row_len * 4).enumerate() {
        let row = height - 1 - file_row;
        for (j, b) in chunk.chunks_exact(4).enumerate() {
            let raw = [b[0], b[1], b[2], b[3]];
            data[row * row_len + j] = if little { f32::from_le_bytes(raw) } else { f32::from_be_bytes(raw) };
        }
    }
    Image::new(width, height, channels, data)
}

/// Little-endian PFM bytes. NaN samples are rejected.
pub fn encode_pfm(image: &Image, path: &Path) -> Result<Vec<u8>, TexioError> {
    if let Some((x, y, channel)) = image.find_nan() {
        return Err(TexioError::Pixel { path: path.to_path_buf(), x, y, channel, message: "NaN".into() });
    }
    let magic = if image.channels == 3 { "PF" } else { "Pf" };
    let mut out = format!("{magic}\n{} {}\n-1\n", image.width, image.height).into_bytes();
    out.reserve(image.data.len() * 4);
    let row_len = image.width * image.channels;
    for row in (0..image.height).rev() {
        for v in &image.data[row * row_len..(row + 1) * row_len] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- PNG

fn decode_png(path: &Path) -> Result<Image, TexioError> {
    let img = image::ImageReader::open(path)
        .map_err(io_err(path))?
        .with_guessed_format()
        .map_err(io_err(path))?
        .decode()
        .map_err(|e| TexioError::Unsupported { path: path.to_path_buf(), message: e.to_string() })?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let (channels, data): (usize, Vec<f32>) = match img {
        DynamicImage::ImageLuma8(b) => (1, b.into_raw().into_iter().map(|v| v as f32 / 255.0).collect()),
        DynamicImage::ImageLuma16(b) => (1, b.into_raw().into_iter().map(|v| v as f32 / 65535.0).collect()),
        DynamicImage::ImageRgb8(b) => (3, b.into_raw().into_iter().map(|v| v as f32 / 255.0).collect()),
        DynamicImage::ImageRgb16(b) => (3, b.into_raw().into_iter().map(|v| v as f32 / 65535.0).collect()),
        other => {
            return Err(TexioError::Unsupported {
                path: path.to_path_buf(),
                message: format!("color type {:?}; only gray or RGB are accepted", other.color()),
            })
        }
    };
    Image::new(w, h, channels, data)
}

fn quantize(v: f32, max: f32) -> f32 {
    (v.clamp(0.0, 1.0) * max).round()
}

fn encode_png(image: &Image, path: &Path, sixteen: bool) -> Result<(), TexioError> {
    if let Some((x, y, channel)) = image.find_nan() {
        return Err(TexioError::Pixel { path: path.to_path_buf(), x, y, channel, message: "NaN".into() });
    }
    let (w, h) = (
        u32::try_from(image.width).map_err(|_| TexioError::Data("width too large for PNG".into()))?,
        u32::try_from(image.height).map_err(|_| TexioError::Data("height too large for PNG".into()))?,
    );
    let bad = || TexioError::Data("buffer does not match dimensions".into());
    let dynamic = match (image.channels, sixteen) {
        (1, false) => DynamicImage::ImageLuma8(
            ImageBuffer::<Luma<u8>, _>::from_raw(w, h, image.data.iter().map(|v| quantize(*v, 255.0) as u8).collect())
                .ok_or_else(bad)?,
        ),
        (1, true) => DynamicImage::ImageLuma16(
            ImageBuffer::<Luma<u16>, _>::from_raw(w, h, image.data.iter().map(|v| quantize(*v, 65535.0) as u16).collect())
                .ok_or_else(bad)?,
        ),
        (3, false) => DynamicImage::ImageRgb8(
            ImageBuffer::<Rgb<u8>, _>::from_raw(w, h, image.data.iter().map(|v| quantize(*v, 255.0) as u8).collect())
                .ok_or_else(bad)?,
        ),
        (3, true) => DynamicImage::ImageRgb16(
            ImageBuffer::<Rgb<u16>, _>::from_raw(w, h, image.data.iter().map(|v| quantize(*v, 65535.0) as u16).collect())
                .ok_or_else(bad)?,
        ),
        (c, _) => return Err(TexioError::Data(format!("{c} channels"))),
    };
    dynamic
        .save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| TexioError::Unsupported { path: path.to_path_buf(), message: e.to_string() })
}

// ---------------------------------------------------------------- dispatch

/// Reads a PFM or PNG, detected from the leading bytes.
pub fn read_image(path: &Path) -> Result<(Image, ImageFormat), TexioError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    if bytes.starts_with(b"PF") || bytes.starts_with(b"Pf") {
        return Ok((decode_pfm(&bytes, path)?, ImageFormat::Pfm));
    }
    if bytes.starts_with(b"\x89PNG") {
        let img = decode_png(path)?;
        // Bit depth of the stored samples.
        let depth16 = bytes.get(24).is_some_and(|d| *d == 16);
        return Ok((img, if depth16 { ImageFormat::Png16 } else { ImageFormat::Png8 }));
    }
    Err(TexioError::Format { path: path.to_path_buf(), offset: 0, message: "not a PFM or PNG file".into() })
}

pub fn write_image(image: &Image, path: &Path, format: ImageFormat) -> Result<(), TexioError> {
    match format {
        ImageFormat::Pfm => {
            let bytes = encode_pfm(image, path)?;
            fs::write(path, bytes).map_err(io_err(path))
        }
        ImageFormat::Png8 => encode_png(image, path, false),
        ImageFormat::Png16 => encode_png(image, path, true),
    }
}

// ---------------------------------------------------------------- normals & masks

/// Unpacks `n = normalize(2·rgb − 1)`. Texels that decode to (near) zero
/// length are flagged invalid and get +z.
pub fn decode_normals(image: &Image) -> Result<(Vec<[f64; 3]>, Vec<bool>), TexioError> {
    let rgb = image.to_rgb()?;
    let mut normals = Vec::with_capacity(rgb.len());
    let mut mask = Vec::with_capacity(rgb.len());
    for p in rgb {
        let v = p.map(|c| 2.0 * c - 1.0);
        let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if len < 1e-6 || !len.is_finite() {
            normals.push([0.0, 0.0, 1.0]);
            mask.push(false);
        } else {
            normals.push(v.map(|c| c / len));
            mask.push(true);
        }
    }
    Ok((normals, mask))
}

/// Packs normals as `(normalize(n) + 1) / 2`; zero vectors become mid-gray.
pub fn encode_normals(width: usize, height: usize, normals: &[[f64; 3]]) -> Result<Image, TexioError> {
    let rgb: Vec<[f64; 3]> = normals
        .iter()
        .map(|n| {
            let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            if len < 1e-12 || !len.is_finite() {
                [0.5; 3]
            } else {
                n.map(|c| (c / len + 1.0) / 2.0)
            }
        })
        .collect();
    Image::from_rgb(width, height, &rgb)
}

/// One-channel image; any nonzero sample is valid.
pub fn read_mask(path: &Path) -> Result<(usize, usize, Vec<bool>), TexioError> {
    let (img, _) = read_image(path)?;
    if img.channels != 1 {
        return Err(TexioError::Unsupported {
            path: path.to_path_buf(),
            message: format!("mask must have 1 channel, found {}", img.channels),
        });
    }
    Ok((img.width, img.height, img.data.iter().map(|v| *v > 0.0).collect()))
}

pub fn write_mask(width: usize, height: usize, mask: &[bool], path: &Path) -> Result<(), TexioError> {
    let img = Image::new(width, height, 1, mask.iter().map(|m| if *m { 1.0 } else { 0.0 }).collect())?;
    write_image(&img, path, ImageFormat::Png8)
}

// ---------------------------------------------------------------- coefficients

const COEFF_HEADER: [&str; 5] = ["l", "m", "R", "G", "B"];

pub fn coeffs_to_string(light: &SHLight) -> String {
    let mut s = String::from("l,m,R,G,B\n");
    for k in 0..NUM_COEFFS {
        let b = BandIndex::from_flat(k).expect("k < NUM_COEFFS");
        s.push_str(&format!(
            "{},{},{:e},{:e},{:e}\n",
            b.l(),
            b.m(),
            light.coeffs[0][k],
            light.coeffs[1][k],
            light.coeffs[2][k]
        ));
    }
    s
}

/// Parses a coefficient table; `path` only labels errors. Row numbers count
/// data rows from 1.
pub fn parse_coeffs(text: &str, path: &Path) -> Result<SHLight, TexioError> {
    let row_err = |row: usize, message: String| TexioError::Row { path: path.to_path_buf(), row, message };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| row_err(0, e.to_string()))?;
    if header.iter().ne(COEFF_HEADER) {
        return Err(row_err(0, format!("header must be 'l,m,R,G,B', found '{}'", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut light = SHLight::zero();
    let mut rows = 0;
    for (k, record) in reader.records().enumerate() {
        let row = k + 1;
        let record = record.map_err(|e| row_err(row, e.to_string()))?;
        if k >= NUM_COEFFS {
            return Err(row_err(row, format!("more than {NUM_COEFFS} rows")));
        }
        if record.len() != 5 {
            return Err(row_err(row, format!("{} fields, expected 5", record.len())));
        }
        let l: usize = record[0].parse().map_err(|_| row_err(row, format!("bad l '{}'", &record[0])))?;
        let m: i64 = record[1].parse().map_err(|_| row_err(row, format!("bad m '{}'", &record[1])))?;
        let expected = BandIndex::from_flat(k).expect("k < NUM_COEFFS");
        let in_range = l <= crate::sh::MAX_DEGREE && m.unsigned_abs() as usize <= l;
        if !in_range || flat_index(l, m) != k {
            return Err(row_err(
                row,
                format!("(l, m) = ({l}, {m}) out of order, expected ({}, {})", expected.l(), expected.m()),
            ));
        }
        for c in 0..3 {
            let v: f64 = record[2 + c]
                .parse()
                .map_err(|_| row_err(row, format!("bad value '{}'", &record[2 + c])))?;
            if !v.is_finite() {
                return Err(row_err(row, format!("non-finite value '{}'", &record[2 + c])));
            }
            light.coeffs[c][k] = v;
        }
        rows += 1;
    }
    if rows != NUM_COEFFS {
        return Err(row_err(rows, format!("{rows} rows, expected {NUM_COEFFS}")));
    }
    Ok(light)
}

pub fn read_coeffs(path: &Path) -> Result<SHLight, TexioError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_coeffs(&text, path)
}

pub fn write_coeffs(light: &SHLight, path: &Path) -> Result<(), TexioError> {
    if !light.is_finite() {
        return Err(TexioError::Data("coefficients are not finite".into()));
    }
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(coeffs_to_string(light).as_bytes()).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p() -> &'static Path {
        Path::new("mem")
    }

    #[test]
    fn pfm_known_bytes() {
        let img = Image::new(2, 2, 1, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let bytes = encode_pfm(&img, p()).unwrap();
        let header = b"Pf\n2 2\n-1\n";
        assert_eq!(&bytes[..header.len()], header);
        // Bottom row first.
        let body: Vec<f32> = bytes[header.len()..].chunks(4).map(|b| f32::from_le_bytes(b.try_into().unwrap())).collect();
        assert_eq!(body, vec![3.0, 4.0, 1.0, 2.0]);
        assert_eq!(decode_pfm(&bytes, p()).unwrap(), img);
    }

    #[test]
    fn pfm_round_trip_is_byte_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let data: Vec<f32> = (0..5 * 3 * 3).map(|_| rng.random_range(-1e6..1e6)).collect();
        let img = Image::new(5, 3, 3, data).unwrap();
        let bytes = encode_pfm(&img, p()).unwrap();
        let back = decode_pfm(&bytes, p()).unwrap();
        assert_eq!(back, img);
        assert_eq!(encode_pfm(&back, p()).unwrap(), bytes);
    }

    #[test]
    fn pfm_big_endian() {
        let mut bytes = b"PF\n1 1\n1.0\n".to_vec();
        for v in [0.5f32, -2.0, 7.25] {
            bytes.extend_from_slice(&v.to_be_bytes());
        }
        assert_eq!(decode_pfm(&bytes, p()).unwrap().data, vec![0.5, -2.0, 7.25]);
    }

    #[test]
    fn pfm_rejections() {
        let body = [0u8; 12];
        let with = |h: &str| [h.as_bytes(), &body].concat();
        assert!(decode_pfm(&with("PF\n1 1\n0\n"), p()).is_err());
        assert!(decode_pfm(&with("PX\n1 1\n-1\n"), p()).is_err());
        assert!(decode_pfm(&with("PF\n1 x\n-1\n"), p()).is_err());
        assert!(decode_pfm(&with("PF\n0 1\n-1\n"), p()).is_err());
        assert!(decode_pfm(&with("PF\n99999999999999999999 1\n-1\n"), p()).is_err());
        assert!(decode_pfm(&with("PF\n4611686018427387904 4\n-1\n"), p()).is_err());
        // Truncated and oversized bodies.
        match decode_pfm(&with("PF\n2 1\n-1\n"), p()) {
            Err(TexioError::Format { offset, .. }) => assert_eq!(offset, 10 + 12),
            other => panic!("{other:?}"),
        }
        let mut long = with("PF\n1 1\n-1\n");
        long.push(0);
        match decode_pfm(&long, p()) {
            Err(TexioError::Format { offset, .. }) => assert_eq!(offset, 10 + 12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pfm_nan_rejected_on_write() {
        let img = Image::new(2, 2, 3, vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, f32::NAN, 0.0, 0.0, 0.0, 0.0]).unwrap();
        match encode_pfm(&img, p()) {
            Err(TexioError::Pixel { x, y, channel, .. }) => assert_eq!((x, y, channel), (0, 1, 1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn png_quantization() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.png");
        let img = Image::new(2, 1, 1, vec![128.0 / 255.0, 1.0]).unwrap();
        write_image(&img, &path, ImageFormat::Png8).unwrap();
        let (back, fmt) = read_image(&path).unwrap();
        assert_eq!(fmt, ImageFormat::Png8);
        assert!((back.data[0] - 0.50196).abs() < 1e-5);
        write_image(&back, &path, ImageFormat::Png8).unwrap();
        let raw = image::open(&path).unwrap().into_luma8().into_raw();
        assert_eq!(raw, vec![128, 255]);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let data: Vec<f32> = (0..4 * 3 * 3).map(|_| rng.random_range(0.0..1.0)).collect();
        let img = Image::new(4, 3, 3, data).unwrap();
        let path = dir.path().join("c.png");
        write_image(&img, &path, ImageFormat::Png16).unwrap();
        let (back, fmt) = read_image(&path).unwrap();
        assert_eq!(fmt, ImageFormat::Png16);
        assert_eq!(back.channels, 3);
        for (a, b) in img.data.iter().zip(&back.data) {
            assert!((a - b).abs() <= 0.5 / 65535.0 + 1e-7);
        }
    }

    #[test]
    fn png_rejects_alpha() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.png");
        image::RgbaImage::new(2, 2).save(&path).unwrap();
        assert!(matches!(read_image(&path), Err(TexioError::Unsupported { .. })));
    }

    #[test]
    fn normal_axes() {
        let img = Image::from_rgb(3, 1, &[[0.5, 0.5, 1.0], [1.0, 0.5, 0.5], [0.5, 0.5, 0.5]]).unwrap();
        let (n, mask) = decode_normals(&img).unwrap();
        assert_eq!(n[0], [0.0, 0.0, 1.0]);
        assert_eq!(n[1], [1.0, 0.0, 0.0]);
        assert_eq!(mask, vec![true, true, false]);
        let enc = encode_normals(1, 1, &[[0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(enc.data, vec![0.5, 0.5, 1.0]);
        assert!(decode_normals(&Image::from_scalar(1, 1, &[0.5]).unwrap()).is_err());
    }

    #[test]
    fn normals_survive_16_bit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("n.png");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let normals: Vec<[f64; 3]> = (0..256)
            .map(|_| {
                let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
                let l = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                v.map(|c| c / l)
            })
            .collect();
        write_image(&encode_normals(16, 16, &normals).unwrap(), &path, ImageFormat::Png16).unwrap();
        let (img, _) = read_image(&path).unwrap();
        let (back, mask) = decode_normals(&img).unwrap();
        assert!(mask.iter().all(|m| *m));
        for (a, b) in normals.iter().zip(&back) {
            for c in 0..3 {
                assert!((a[c] - b[c]).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn masks() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.png");
        let mask = vec![true, false, false, true, true, false];
        write_mask(3, 2, &mask, &path).unwrap();
        assert_eq!(read_mask(&path).unwrap(), (3, 2, mask));
    }

    fn random_light(seed: u64) -> SHLight {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut l = SHLight::zero();
        for ch in &mut l.coeffs {
            for v in ch.iter_mut() {
                *v = rng.random_range(-10.0..10.0) * 10f64.powi(rng.random_range(-8..3));
            }
        }
        l
    }

    #[test]
    fn coeff_round_trip() {
        let light = random_light(4);
        let text = coeffs_to_string(&light);
        assert!(text.starts_with("l,m,R,G,B\n0,0,"));
        assert_eq!(text.lines().count(), 82);
        let back = parse_coeffs(&text, p()).unwrap();
        assert_eq!(back, light);
    }

    #[test]
    fn dc_only_file() {
        let text = coeffs_to_string(&SHLight::dc([1.5, 0.0, 0.0]));
        let l = parse_coeffs(&text, p()).unwrap();
        let nonzero: usize = l.coeffs.iter().map(|c| c.iter().filter(|v| **v != 0.0).count()).sum();
        assert_eq!(nonzero, 1);
        assert_eq!(l.coeffs[0][0], 1.5);
    }

    #[test]
    fn coeff_rejections() {
        let good = coeffs_to_string(&random_light(5));
        let mut lines: Vec<&str> = good.lines().collect();
        lines.swap(5, 6);
        match parse_coeffs(&lines.join("\n"), p()) {
            Err(TexioError::Row { row, .. }) => assert_eq!(row, 5),
            other => panic!("{other:?}"),
        }
        let short: Vec<&str> = good.lines().take(50).collect();
        assert!(matches!(parse_coeffs(&short.join("\n"), p()), Err(TexioError::Row { row: 49, .. })));
        let long = format!("{good}9,0,0,0,0\n");
        assert!(matches!(parse_coeffs(&long, p()), Err(TexioError::Row { row: 82, .. })));
        let bad_val = good.lines().map(|l| if l.starts_with("0,0,") { "0,0,NaN,1,1" } else { l }).collect::<Vec<_>>().join("\n");
        assert!(matches!(parse_coeffs(&bad_val, p()), Err(TexioError::Row { row: 1, .. })));
        assert!(parse_coeffs(&good.replacen("l,m,R,G,B", "l,m,r,g,b", 1), p()).is_err());
        let wide = good.lines().map(|l| if l.starts_with("1,0,") { "1,0,1,2,3,4" } else { l }).collect::<Vec<_>>().join("\n");
        assert!(parse_coeffs(&wide, p()).is_err());
    }

    #[test]
    fn coeff_file_io() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let light = random_light(6);
        write_coeffs(&light, &path).unwrap();
        assert_eq!(read_coeffs(&path).unwrap(), light);
        assert!(read_coeffs(&dir.path().join("missing.csv")).is_err());
    }
}
