//! Netpbm reader for PBM (P1/P4) and PGM (P2/P5), and canonical plain writers.

use std::fmt::Write as _;

use super::{BinaryImage, GrayImage, Pixel};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pnm {
    Binary(BinaryImage),
    Gray(GrayImage),
}

impl Pnm {
    /// Binary images pass through; gray images are thresholded.
    pub fn into_binary(self, threshold: u8) -> BinaryImage {
        match self {
            Pnm::Binary(img) => img,
            Pnm::Gray(gray) => super::binarize(&gray, threshold),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    PbmPlain,
    PgmPlain,
    PbmRaw,
    PgmRaw,
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn uint(&mut self, what: &str) -> Result<u32> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(if self.pos >= self.data.len() {
                Error::Format(format!("truncated stream: missing {what}"))
            } else {
                Error::Format(format!("expected {what} at byte {start}"))
            });
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format(format!("{what} out of range")))
    }

    fn plain_bit(&mut self) -> Result<Pixel> {
        self.skip_space_and_comments();
        match self.data.get(self.pos) {
            Some(b'1') => {
                self.pos += 1;
                Ok(Pixel::Black)
            }
            Some(b'0') => {
                self.pos += 1;
                Ok(Pixel::White)
            }
            Some(&other) => Err(Error::Format(format!(
                "unexpected byte {:?} in PBM raster",
                other as char
            ))),
            None => Err(Error::Format("truncated PBM raster".into())),
        }
    }

    /// The single whitespace byte separating a raw header from its raster.
    fn raster_separator(&mut self) -> Result<()> {
        match self.data.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(())
            }
            Some(_) => Err(Error::Format("missing whitespace after header".into())),
            None => Err(Error::Format("truncated stream: no raster".into())),
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len());
        match end {
            Some(end) => {
                let out = &self.data[self.pos..end];
                self.pos = end;
                Ok(out)
            }
            None => Err(Error::Format(format!(
                "truncated raster: need {n} bytes, {} left",
                self.data.len() - self.pos
            ))),
        }
    }
}

/// Decodes a PBM or PGM stream. PBM sample `1` becomes [`Pixel::Black`].
/// PGM samples are rescaled to 0..=255 when the stream's maxval differs.
pub fn load_pnm(bytes: &[u8]) -> Result<Pnm> {
    let kind = match bytes.get(..2) {
        Some(b"P1") => Kind::PbmPlain,
        Some(b"P2") => Kind::PgmPlain,
        Some(b"P4") => Kind::PbmRaw,
        Some(b"P5") => Kind::PgmRaw,
        _ => return Err(Error::Format("not a PBM/PGM stream (bad magic)".into())),
    };
    let mut cur = Cursor {
        data: bytes,
        pos: 2,
    };
    if !cur
        .data
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(Error::Format("bad magic".into()));
    }
    let width = cur.uint("width")?;
    let height = cur.uint("height")?;
    if width == 0 || height == 0 {
        return Err(Error::Format(format!(
            "invalid dimensions {width}x{height}"
        )));
    }
    let count = (width as usize)
        .checked_mul(height as usize)
        .ok_or_else(|| Error::Format("dimensions overflow".into()))?;

    match kind {
        Kind::PbmPlain => {
            let pixels = (0..count)
                .map(|_| cur.plain_bit())
                .collect::<Result<Vec<_>>>()?;
            Ok(Pnm::Binary(BinaryImage::new(width, height, pixels)?))
        }
        Kind::PbmRaw => {
            cur.raster_separator()?;
            let stride = (width as usize).div_ceil(8);
            let raster = cur.take(stride * height as usize)?;
            let mut pixels = Vec::with_capacity(count);
            for row in raster.chunks_exact(stride) {
                for x in 0..width as usize {
                    let bit = row[x / 8] >> (7 - x % 8) & 1;
                    pixels.push(if bit == 1 { Pixel::Black } else { Pixel::White });
                }
            }
            Ok(Pnm::Binary(BinaryImage::new(width, height, pixels)?))
        }
        Kind::PgmPlain | Kind::PgmRaw => {
            let maxval = cur.uint("maxval")?;
            if maxval == 0 || maxval > 65535 {
                return Err(Error::Format(format!("invalid maxval {maxval}")));
            }
            let raw: Vec<u32> = if kind == Kind::PgmPlain {
                (0..count)
                    .map(|_| cur.uint("sample"))
                    .collect::<Result<_>>()?
            } else {
                cur.raster_separator()?;
                if maxval < 256 {
                    cur.take(count)?.iter().map(|&b| b as u32).collect()
                } else {
                    cur.take(count * 2)?
                        .chunks_exact(2)
                        .map(|c| u16::from_be_bytes([c[0], c[1]]) as u32)
                        .collect()
                }
            };
            let samples = raw
                .into_iter()
                .map(|v| {
                    if v > maxval {
                        Err(Error::Format(format!("sample {v} exceeds maxval {maxval}")))
                    } else if maxval == 255 {
                        Ok(v as u8)
                    } else {
                        Ok(((v as u64 * 255 * 2 + maxval as u64) / (2 * maxval as u64)) as u8)
                    }
                })
                .collect::<Result<Vec<u8>>>()?;
            Ok(Pnm::Gray(GrayImage::new(width, height, samples)?))
        }
    }
}

/// Canonical plain PBM: `P1`, dimensions, then one line per row with
/// single-space separated samples.
pub fn save_pnm(img: &BinaryImage) -> Vec<u8> {
    let mut out = format!("P1\n{} {}\n", img.width(), img.height());
    for y in 0..img.height() {
        push_row(
            &mut out,
            img.row(y).iter().map(|p| if p.is_black() { 1 } else { 0 }),
        );
    }
    out.into_bytes()
}

/// Plain PGM with maxval 255.
pub fn save_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P2\n{} {}\n255\n", img.width(), img.height());
    for row in img.samples().chunks(img.width() as usize) {
        push_row(&mut out, row.iter().copied());
    }
    out.into_bytes()
}

fn push_row<T: std::fmt::Display>(out: &mut String, values: impl Iterator<Item = T>) {
    for (i, v) in values.enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{v}");
    }
    out.push('\n');
}
