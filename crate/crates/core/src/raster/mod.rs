//! Binary and gray rasters plus the geometric utilities the matcher needs.
//!
//! Coordinates follow image convention: `x` is the column, `y` the row,
//! origin at the top-left, pixel centers on integer coordinates.
//!
//! **Foreground convention:** [`Pixel::Black`] is foreground. In PBM files the
//! sample value `1` is black, which is the reverse of what most people expect
//! from "1 = on = bright".

mod pnm;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use pnm::{load_pnm, save_pgm, save_pnm, Pnm};

/// Default blank border kept around a glyph by [`normalize`].
pub const DEFAULT_MARGIN: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Pixel {
    Black,
    White,
}

impl Pixel {
    #[inline]
    pub fn is_black(self) -> bool {
        self == Pixel::Black
    }

    #[inline]
    pub fn inverted(self) -> Pixel {
        match self {
            Pixel::Black => Pixel::White,
            Pixel::White => Pixel::Black,
        }
    }
}

/// Width × height of an image or of the common canvas glyphs are placed on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Canvas {
    pub width: u32,
    pub height: u32,
}

impl Canvas {
    pub const DEFAULT: Canvas = Canvas {
        width: 64,
        height: 64,
    };

    pub fn new(width: u32, height: u32) -> Self {
        Canvas { width, height }
    }
}

impl Default for Canvas {
    fn default() -> Self {
        Canvas::DEFAULT
    }
}

impl fmt::Display for Canvas {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

impl FromStr for Canvas {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("canvas must look like WxH, got {s:?}"));
        let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let width: u32 = w.trim().parse().map_err(|_| bad())?;
        let height: u32 = h.trim().parse().map_err(|_| bad())?;
        if width == 0 || height == 0 {
            return Err(bad());
        }
        Ok(Canvas { width, height })
    }
}

/// A rectangular grid of black/white pixels stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: u32,
    height: u32,
    pixels: Vec<Pixel>,
}

impl BinaryImage {
    pub fn new(width: u32, height: u32, pixels: Vec<Pixel>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width as usize * height as usize;
        if pixels.len() != expected {
            return Err(Error::Dimension(format!(
                "{width}x{height} image needs {expected} pixels, got {}",
                pixels.len()
            )));
        }
        Ok(BinaryImage {
            width,
            height,
            pixels,
        })
    }

    /// # Panics
    /// If either dimension is zero.
    pub fn filled(width: u32, height: u32, value: Pixel) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        BinaryImage {
            width,
            height,
            pixels: vec![value; width as usize * height as usize],
        }
    }

    /// # Panics
    /// If either dimension is zero.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> Pixel) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let mut pixels = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        BinaryImage {
            width,
            height,
            pixels,
        }
    }

    /// Parses a text picture where `#` (or `X`, `1`) is black and `.` (or
    /// `0`) is white, one row per line. Indentation and blank leading or
    /// trailing lines are ignored; all rows must have the same length.
    pub fn from_art(art: &str) -> Result<Self> {
        let rows: Vec<&str> = art
            .lines()
            .map(str::trim_end)
            .skip_while(|l| l.trim().is_empty())
            .collect();
        let rows: Vec<&str> = {
            let end = rows
                .iter()
                .rposition(|l| !l.trim().is_empty())
                .map_or(0, |i| i + 1);
            rows[..end].iter().map(|l| l.trim_start()).collect()
        };
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut pixels = Vec::new();
        for row in &rows {
            if row.chars().count() != width {
                return Err(Error::Dimension("ragged rows in pixel art".into()));
            }
            for c in row.chars() {
                pixels.push(match c {
                    '#' | 'X' | '1' => Pixel::Black,
                    '.' | '0' => Pixel::White,
                    other => {
                        return Err(Error::Format(format!("unexpected {other:?} in pixel art")))
                    }
                });
            }
        }
        BinaryImage::new(width as u32, rows.len() as u32, pixels)
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn canvas(&self) -> Canvas {
        Canvas::new(self.width, self.height)
    }

    pub fn pixels(&self) -> &[Pixel] {
        &self.pixels
    }

    pub fn row(&self, y: u32) -> &[Pixel] {
        let w = self.width as usize;
        let start = y as usize * w;
        &self.pixels[start..start + w]
    }

    /// Pixels of column `x`, top to bottom.
    pub fn column(&self, x: u32) -> Vec<Pixel> {
        (0..self.height).map(|y| self.get(x, y)).collect()
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> Pixel {
        debug_assert!(x < self.width && y < self.height);
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    /// `None` outside the frame.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> Option<Pixel> {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            None
        } else {
            Some(self.pixels[y as usize * self.width as usize + x as usize])
        }
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: Pixel) {
        let idx = y as usize * self.width as usize + x as usize;
        self.pixels[idx] = value;
    }

    pub fn black_count(&self) -> usize {
        self.pixels.iter().filter(|p| p.is_black()).count()
    }

    /// Coordinates of all black pixels in row-major order.
    pub fn black_pixels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width as usize;
        self.pixels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_black())
            .map(move |(i, _)| ((i % w) as u32, (i / w) as u32))
    }

    /// Inclusive `(x0, y0, x1, y1)` box around the black pixels.
    pub fn bounding_box(&self) -> Option<(u32, u32, u32, u32)> {
        let mut bbox: Option<(u32, u32, u32, u32)> = None;
        for (x, y) in self.black_pixels() {
            bbox = Some(match bbox {
                None => (x, y, x, y),
                Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
            });
        }
        bbox
    }
}

impl fmt::Debug for BinaryImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryImage {}x{}", self.width, self.height)?;
        for y in 0..self.height {
            let line: String = self
                .row(y)
                .iter()
                .map(|p| if p.is_black() { '#' } else { '.' })
                .collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// 8-bit intensity image, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: u32,
    height: u32,
    samples: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, samples: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width as usize * height as usize;
        if samples.len() != expected {
            return Err(Error::Dimension(format!(
                "{width}x{height} image needs {expected} samples, got {}",
                samples.len()
            )));
        }
        Ok(GrayImage {
            width,
            height,
            samples,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.samples[y as usize * self.width as usize + x as usize]
    }
}

/// Samples strictly below `threshold` become black.
pub fn binarize(gray: &GrayImage, threshold: u8) -> BinaryImage {
    BinaryImage {
        width: gray.width,
        height: gray.height,
        pixels: gray
            .samples
            .iter()
            .map(|&s| {
                if s < threshold {
                    Pixel::Black
                } else {
                    Pixel::White
                }
            })
            .collect(),
    }
}

/// Center of gravity of the black pixels.
///
/// Kept as exact coordinate sums over a pixel count so that translating an
/// image moves its centroid by exactly the translation, and so that centroid
/// differences round the same way regardless of where the glyph sits.
#[derive(Clone, Copy, Debug)]
pub struct Centroid {
    sum_x: i64,
    sum_y: i64,
    count: u64,
}

impl Centroid {
    /// Centroid of `count` points whose coordinates sum to `(sum_x, sum_y)`.
    ///
    /// # Panics
    /// If `count` is zero.
    pub fn from_sums(sum_x: i64, sum_y: i64, count: u64) -> Self {
        assert!(count > 0, "centroid of zero points");
        Centroid {
            sum_x,
            sum_y,
            count,
        }
    }

    /// Centroid sitting exactly on an integer coordinate.
    pub fn at(x: i64, y: i64) -> Self {
        Centroid::from_sums(x, y, 1)
    }

    pub fn cx(&self) -> f64 {
        self.sum_x as f64 / self.count as f64
    }

    pub fn cy(&self) -> f64 {
        self.sum_y as f64 / self.count as f64
    }

    /// `(sum_x, sum_y, count)`
    pub fn sums(&self) -> (i64, i64, u64) {
        (self.sum_x, self.sum_y, self.count)
    }

    pub fn translated(&self, dx: i64, dy: i64) -> Self {
        let n = self.count as i64;
        Centroid {
            sum_x: self.sum_x + dx * n,
            sum_y: self.sum_y + dy * n,
            count: self.count,
        }
    }
}

impl PartialEq for Centroid {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self.count as i128, other.count as i128);
        self.sum_x as i128 * b == other.sum_x as i128 * a
            && self.sum_y as i128 * b == other.sum_y as i128 * a
    }
}

impl Eq for Centroid {}

impl fmt::Display for Centroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.cx(), self.cy())
    }
}

pub fn centroid(img: &BinaryImage) -> Result<Centroid> {
    let (mut sx, mut sy, mut n) = (0i64, 0i64, 0u64);
    for (x, y) in img.black_pixels() {
        sx += x as i64;
        sy += y as i64;
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptyForeground);
    }
    Ok(Centroid::from_sums(sx, sy, n))
}

/// Crops to the black bounding box, scales it (nearest neighbour) to fit
/// inside `canvas` less `margin` on every side, and centers it on a white
/// canvas.
pub fn normalize(img: &BinaryImage, canvas: Canvas, margin: u32) -> Result<BinaryImage> {
    let inner_w = canvas.width.checked_sub(2 * margin).filter(|&w| w > 0);
    let inner_h = canvas.height.checked_sub(2 * margin).filter(|&h| h > 0);
    let (Some(inner_w), Some(inner_h)) = (inner_w, inner_h) else {
        return Err(Error::InvalidParameter(format!(
            "canvas {canvas} leaves no room inside a margin of {margin}"
        )));
    };
    let (x0, y0, x1, y1) = img.bounding_box().ok_or(Error::EmptyForeground)?;
    let (bw, bh) = (x1 - x0 + 1, y1 - y0 + 1);

    let scale = f64::min(inner_w as f64 / bw as f64, inner_h as f64 / bh as f64);
    let out_w = ((bw as f64 * scale).round() as u32).clamp(1, inner_w);
    let out_h = ((bh as f64 * scale).round() as u32).clamp(1, inner_h);
    let off_x = (canvas.width - out_w) / 2;
    let off_y = (canvas.height - out_h) / 2;

    let src = |u: u32, extent: u32| -> u32 {
        (((u as f64 + 0.5) / scale).floor() as u32).min(extent - 1)
    };
    let mut out = BinaryImage::filled(canvas.width, canvas.height, Pixel::White);
    for v in 0..out_h {
        let sy = y0 + src(v, bh);
        for u in 0..out_w {
            let sx = x0 + src(u, bw);
            if img.get(sx, sy).is_black() {
                out.set(off_x + u, off_y + v, Pixel::Black);
            }
        }
    }
    Ok(out)
}

/// Moves every pixel by `(dx, dy)`; pixels pushed off the frame are lost and
/// vacated pixels are white.
pub fn translate(img: &BinaryImage, dx: i64, dy: i64) -> BinaryImage {
    let mut out = BinaryImage::filled(img.width, img.height, Pixel::White);
    for (x, y) in img.black_pixels() {
        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
        if nx >= 0 && ny >= 0 && nx < img.width as i64 && ny < img.height as i64 {
            out.set(nx as u32, ny as u32, Pixel::Black);
        }
    }
    out
}
