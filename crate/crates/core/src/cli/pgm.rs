//! Binary 8-bit PGM (`P5`, maxval 255).
//!
//! Writing always emits the header `P5\n<width> <height>\n255\n` followed by
//! row-major bytes. Reading accepts any netpbm-conformant header whitespace
//! and `#` comments, and rejects trailing data.

use std::fs;
use std::path::Path;

use crate::config::DisplayConfig;
use crate::error::{Error, Result};
use crate::synth::MultiviewImage;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

pub fn encode(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Returns the value and the offset where it starts.
    fn number(&mut self, what: &str) -> Result<(usize, usize)> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::at_byte(start, format!("expected {what}")));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        let value = text
            .parse()
            .map_err(|_| Error::at_byte(start, format!("{what} `{text}` is out of range")))?;
        Ok((value, start))
    }
}

pub fn decode(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::at_byte(0, "not a binary PGM (magic `P5` expected)"));
    }
    let mut h = Header { bytes, pos: 2 };
    if !h.bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(Error::at_byte(2, "expected whitespace after magic"));
    }
    let (width, _) = h.number("width")?;
    let (height, _) = h.number("height")?;
    let (maxval, maxval_at) = h.number("maxval")?;
    if maxval != 255 {
        return Err(Error::at_byte(maxval_at, format!("maxval {maxval} is not supported (only 255)")));
    }
    if !h.bytes.get(h.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::at_byte(h.pos, "expected a single whitespace byte before the raster"));
    }
    let data_at = h.pos + 1;
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| Error::at_byte(0, "image dimensions overflow"))?;
    let available = bytes.len() - data_at;
    if available < expected {
        return Err(Error::at_byte(
            bytes.len(),
            format!("truncated raster: {available} of {expected} bytes present"),
        ));
    }
    if available > expected {
        return Err(Error::at_byte(data_at + expected, "unexpected data after the raster"));
    }
    Ok(GrayImage {
        width,
        height,
        pixels: bytes[data_at..].to_vec(),
    })
}

pub fn write_gray(path: &Path, width: usize, height: usize, pixels: &[u8]) -> Result<()> {
    fs::write(path, encode(width, height, pixels)).map_err(|e| Error::io(path, e))
}

pub fn write_pgm(img: &MultiviewImage, path: &Path) -> Result<()> {
    write_gray(path, img.width(), img.height(), img.pixels())
}

/// Reads a PGM as a multiview image under `cfg`; the sides must be whole
/// numbers of cells.
pub fn read_pgm(path: &Path, cfg: &DisplayConfig) -> Result<MultiviewImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let gray = decode(&bytes)?;
    MultiviewImage::new(gray.width, gray.height, gray.pixels, *cfg)
}
