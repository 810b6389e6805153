//! Lossless raster I/O: PNG (8/16-bit, gray/RGB) and binary PGM/PPM.
//!
//! Samples are taken as stored and scaled to `[0, 1]` by `1/(2^depth - 1)`;
//! no metadata (ICC profiles, gamma chunks) is interpreted.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::ImageBuffer;

/// Decode a PNG, PGM, or PPM file (by extension) into an [`ImageBuffer`].
pub fn read_image(path: &Path) -> Result<ImageBuffer> {
    match extension_of(path)?.as_str() {
        "png" => read_png(path),
        "pgm" | "ppm" => read_pnm(path),
        other => Err(Error::UnsupportedFormat(format!(
            "unknown extension .{other} ({})",
            path.display()
        ))),
    }
}

/// Encode an [`ImageBuffer`] to PNG, PGM, or PPM (by extension), quantizing
/// samples back to the buffer's source bit depth.
pub fn write_image(img: &ImageBuffer, path: &Path) -> Result<()> {
    match extension_of(path)?.as_str() {
        "png" => write_png(img, path),
        "pgm" => {
            if img.channels() != 1 {
                return Err(Error::UnsupportedFormat(
                    "PGM holds single-channel images only".into(),
                ));
            }
            write_pnm(img, path)
        }
        "ppm" => {
            if img.channels() != 3 {
                return Err(Error::UnsupportedFormat(
                    "PPM holds three-channel images only".into(),
                ));
            }
            write_pnm(img, path)
        }
        other => Err(Error::UnsupportedFormat(format!(
            "unknown extension .{other} ({})",
            path.display()
        ))),
    }
}

fn extension_of(path: &Path) -> Result<String> {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .ok_or_else(|| {
            Error::UnsupportedFormat(format!("path has no extension: {}", path.display()))
        })
}

fn bytes_to_samples(bytes: &[u8], depth: u8) -> Vec<f64> {
    match depth {
        8 => bytes.iter().map(|&b| f64::from(b) / 255.0).collect(),
        16 => bytes
            .chunks_exact(2)
            .map(|c| f64::from(u16::from_be_bytes([c[0], c[1]])) / 65535.0)
            .collect(),
        _ => unreachable!("depth is validated to 8 or 16"),
    }
}

fn samples_to_bytes(samples: &[f64], depth: u8) -> Vec<u8> {
    match depth {
        8 => samples
            .iter()
            .map(|&s| (s * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect(),
        16 => {
            let mut out = Vec::with_capacity(samples.len() * 2);
            for &s in samples {
                let q = (s * 65535.0).round().clamp(0.0, 65535.0) as u16;
                out.extend_from_slice(&q.to_be_bytes());
            }
            out
        }
        _ => unreachable!("depth is validated to 8 or 16"),
    }
}

fn read_png(path: &Path) -> Result<ImageBuffer> {
    let decoder = png::Decoder::new(BufReader::new(File::open(path)?));
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::CorruptFile(format!("{}: {e}", path.display())))?;
    let buf_size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::CorruptFile(format!("{}: image too large", path.display())))?;
    let mut buf = vec![0u8; buf_size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::CorruptFile(format!("{}: {e}", path.display())))?;
    let channels = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::Rgb => 3,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "PNG color type {other:?} (only grayscale and RGB are handled)"
            )))
        }
    };
    let depth = match info.bit_depth {
        png::BitDepth::Eight => 8,
        png::BitDepth::Sixteen => 16,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "PNG bit depth {other:?} (only 8 and 16 are handled)"
            )))
        }
    };
    let data = bytes_to_samples(&buf[..info.buffer_size()], depth);
    ImageBuffer::new(info.width as usize, info.height as usize, channels, depth, data)
}

fn write_png(img: &ImageBuffer, path: &Path) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    let mut encoder = png::Encoder::new(file, img.width() as u32, img.height() as u32);
    encoder.set_color(if img.channels() == 1 {
        png::ColorType::Grayscale
    } else {
        png::ColorType::Rgb
    });
    encoder.set_depth(if img.source_depth() == 8 {
        png::BitDepth::Eight
    } else {
        png::BitDepth::Sixteen
    });
    let mut writer = encoder
        .write_header()
        .map_err(|e| Error::CorruptFile(format!("{}: {e}", path.display())))?;
    writer
        .write_image_data(&samples_to_bytes(img.samples(), img.source_depth()))
        .map_err(|e| Error::CorruptFile(format!("{}: {e}", path.display())))?;
    Ok(())
}

/// Pulls whitespace-separated header tokens, honoring `#` comments.
struct PnmHeader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PnmHeader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_separators();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self) -> Option<usize> {
        let tok = self.token()?;
        std::str::from_utf8(tok).ok()?.parse().ok()
    }

    /// Position of the first raster byte: one whitespace after the maxval.
    fn raster_start(&self) -> usize {
        self.pos + 1
    }
}

fn read_pnm(path: &Path) -> Result<ImageBuffer> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    let corrupt = |msg: &str| Error::CorruptFile(format!("{}: {msg}", path.display()));

    let mut header = PnmHeader::new(&bytes);
    let magic = header.token().ok_or_else(|| corrupt("missing magic"))?;
    let channels = match magic {
        b"P5" => 1,
        b"P6" => 3,
        _ => {
            return Err(Error::UnsupportedFormat(
                "only binary PGM (P5) and PPM (P6) are handled".into(),
            ))
        }
    };
    let width = header.number().ok_or_else(|| corrupt("bad width"))?;
    let height = header.number().ok_or_else(|| corrupt("bad height"))?;
    let maxval = header.number().ok_or_else(|| corrupt("bad maxval"))?;
    let depth = match maxval {
        255 => 8,
        65535 => 16,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "PNM maxval {other} (only 255 and 65535 are handled)"
            )))
        }
    };
    let start = header.raster_start();
    let expected = width * height * channels * usize::from(depth / 8);
    let raster = bytes
        .get(start..start + expected)
        .ok_or_else(|| corrupt("truncated raster data"))?;
    let data = bytes_to_samples(raster, depth);
    ImageBuffer::new(width, height, channels, depth, data)
}

fn write_pnm(img: &ImageBuffer, path: &Path) -> Result<()> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let maxval: u32 = if img.source_depth() == 8 { 255 } else { 65535 };
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "{magic}\n{} {}\n{maxval}\n", img.width(), img.height())?;
    out.write_all(&samples_to_bytes(img.samples(), img.source_depth()))?;
    Ok(())
}
