//! Sketch extraction.
//!
//! Every row and column of a glyph is cut into maximal runs of one color.
//! Each run is replaced by a segment centered on its middle pixel whose width
//! is `bias × run length` (at least one pixel). The union of those segments,
//! split by color, is the sketch: black points are where a matching glyph is
//! most likely to be black, white points where it is most likely white.
//!
//! White runs that touch the frame are treated as background and contribute
//! nothing; only white areas enclosed by black on both sides of the line are
//! character structure.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::raster::{BinaryImage, Canvas, GrayImage, Pixel};

/// Fraction of a run's length kept in its sketch segment, `0 < bias <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Bias(f64);

impl Bias {
    pub const DEFAULT: Bias = Bias(0.4);

    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value <= 1.0 {
            Ok(Bias(value))
        } else {
            Err(Error::InvalidParameter(format!(
                "bias must satisfy 0 < bias ≤ 1, got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Bias {
    fn default() -> Self {
        Bias::DEFAULT
    }
}

impl fmt::Display for Bias {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Bias {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v: f64 = s.trim().parse().map_err(|_| {
            Error::InvalidParameter(format!("bias must satisfy 0 < bias ≤ 1, got {s:?}"))
        })?;
        Bias::new(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// Inclusive index interval along one line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: u32,
    pub end: u32,
}

impl Span {
    pub fn new(start: u32, end: u32) -> Self {
        debug_assert!(start <= end);
        Span { start, end }
    }

    pub fn len(&self) -> u32 {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Middle pixel; the lower one for even lengths.
    pub fn median(&self) -> u32 {
        (self.start + self.end) / 2
    }

    /// The bias-scaled segment centered on the median, never leaving the span.
    pub fn segment(&self, bias: Bias) -> Span {
        let width = segment_width(self.len(), bias);
        let m = self.median();
        let left = (width - 1) / 2;
        let right = width / 2; // ceil((width - 1) / 2)
        Span {
            start: m.saturating_sub(left).max(self.start),
            end: (m + right).min(self.end),
        }
    }
}

/// `max(1, round(bias × len))`, rounding halves away from zero.
fn segment_width(len: u32, bias: Bias) -> u32 {
    ((bias.0 * len as f64).round() as u32).max(1)
}

/// A maximal single-color run in one row or column of an image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Run {
    pub line_index: u32,
    pub span: Span,
    pub orientation: Orientation,
    pub color: Pixel,
}

/// Maximal spans of `color` along `line`, left to right.
///
/// Black spans are returned wherever they are. White spans are returned only
/// when black pixels bound them on both sides.
pub fn find_runs(line: &[Pixel], color: Pixel) -> Vec<Span> {
    let mut runs = Vec::new();
    let mut start: Option<usize> = None;
    for (i, &p) in line.iter().enumerate() {
        match (p == color, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push(Span::new(s as u32, i as u32 - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push(Span::new(s as u32, line.len() as u32 - 1));
    }
    if color == Pixel::White {
        let last = line.len() as u32 - 1;
        runs.retain(|r| r.start > 0 && r.end < last);
    }
    runs
}

pub fn run_to_segment(run: &Run, bias: Bias) -> Span {
    run.span.segment(bias)
}

/// All runs of `color` in one row (`Horizontal`) or column (`Vertical`).
pub fn line_runs(
    img: &BinaryImage,
    orientation: Orientation,
    index: u32,
    color: Pixel,
) -> Vec<Run> {
    let spans = match orientation {
        Orientation::Horizontal => find_runs(img.row(index), color),
        Orientation::Vertical => find_runs(&img.column(index), color),
    };
    spans
        .into_iter()
        .map(|span| Run {
            line_index: index,
            span,
            orientation,
            color,
        })
        .collect()
}

/// One scan of the image: along rows or columns, for one color.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    HorizontalBlack,
    HorizontalWhite,
    VerticalBlack,
    VerticalWhite,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::HorizontalBlack,
        Direction::HorizontalWhite,
        Direction::VerticalBlack,
        Direction::VerticalWhite,
    ];

    pub fn orientation(self) -> Orientation {
        match self {
            Direction::HorizontalBlack | Direction::HorizontalWhite => Orientation::Horizontal,
            Direction::VerticalBlack | Direction::VerticalWhite => Orientation::Vertical,
        }
    }

    pub fn color(self) -> Pixel {
        match self {
            Direction::HorizontalBlack | Direction::VerticalBlack => Pixel::Black,
            Direction::HorizontalWhite | Direction::VerticalWhite => Pixel::White,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Direction::HorizontalBlack => "hb",
            Direction::HorizontalWhite => "hw",
            Direction::VerticalBlack => "vb",
            Direction::VerticalWhite => "vw",
        }
    }

    fn bit(self) -> u8 {
        1 << self as u8
    }
}

/// A non-empty subset of the four scans.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Directions(u8);

impl Directions {
    pub const ALL: Directions = Directions(0b1111);

    pub fn from_slice(dirs: &[Direction]) -> Result<Self> {
        let bits = dirs.iter().fold(0, |acc, d| acc | d.bit());
        if bits == 0 {
            return Err(Error::InvalidParameter("direction set is empty".into()));
        }
        Ok(Directions(bits))
    }

    pub fn contains(self, d: Direction) -> bool {
        self.0 & d.bit() != 0
    }

    pub fn iter(self) -> impl Iterator<Item = Direction> {
        Direction::ALL
            .into_iter()
            .filter(move |d| self.contains(*d))
    }
}

impl Default for Directions {
    fn default() -> Self {
        Directions::ALL
    }
}

impl FromStr for Directions {
    type Err = Error;

    /// Comma list of `hb`, `hw`, `vb`, `vw`.
    fn from_str(s: &str) -> Result<Self> {
        let dirs = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                Direction::ALL
                    .into_iter()
                    .find(|d| d.code().eq_ignore_ascii_case(t))
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "unknown direction {t:?} (expected hb, hw, vb, vw)"
                        ))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Directions::from_slice(&dirs)
    }
}

impl fmt::Display for Directions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let codes: Vec<_> = self.iter().map(Direction::code).collect();
        f.write_str(&codes.join(","))
    }
}

/// Black and white representative points of an image, each list in
/// row-major order without duplicates.
#[derive(Clone, Debug, PartialEq)]
pub struct Sketch {
    extent: Canvas,
    black_points: Vec<(u32, u32)>,
    white_points: Vec<(u32, u32)>,
    bias: Bias,
}

impl Sketch {
    /// Builds a sketch from explicit points. Points are sorted and
    /// deduplicated; they must lie inside `extent` and the two sets must be
    /// disjoint.
    pub fn from_points(
        extent: Canvas,
        black: impl IntoIterator<Item = (u32, u32)>,
        white: impl IntoIterator<Item = (u32, u32)>,
        bias: Bias,
    ) -> Result<Self> {
        let prepare = |pts: &mut Vec<(u32, u32)>| -> Result<()> {
            if let Some(&(x, y)) = pts
                .iter()
                .find(|&&(x, y)| x >= extent.width || y >= extent.height)
            {
                return Err(Error::Dimension(format!(
                    "sketch point ({x}, {y}) outside {extent}"
                )));
            }
            pts.sort_unstable_by_key(|&(x, y)| (y, x));
            pts.dedup();
            Ok(())
        };
        let mut black: Vec<_> = black.into_iter().collect();
        let mut white: Vec<_> = white.into_iter().collect();
        prepare(&mut black)?;
        prepare(&mut white)?;
        if let Some(p) = black.iter().find(|p| {
            white
                .binary_search_by_key(&(p.1, p.0), |&(x, y)| (y, x))
                .is_ok()
        }) {
            return Err(Error::InvalidParameter(format!(
                "point {p:?} is both black and white"
            )));
        }
        Ok(Sketch {
            extent,
            black_points: black,
            white_points: white,
            bias,
        })
    }

    pub fn extent(&self) -> Canvas {
        self.extent
    }

    pub fn bias(&self) -> Bias {
        self.bias
    }

    pub fn black_points(&self) -> &[(u32, u32)] {
        &self.black_points
    }

    pub fn white_points(&self) -> &[(u32, u32)] {
        &self.white_points
    }

    /// N_b
    pub fn n_black(&self) -> usize {
        self.black_points.len()
    }

    /// N_w
    pub fn n_white(&self) -> usize {
        self.white_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.black_points.is_empty() && self.white_points.is_empty()
    }
}

const MARK_NONE: u8 = 0;
const MARK_BLACK: u8 = 1;
const MARK_WHITE: u8 = 2;

/// Extracts the sketch of `img` from the selected scans, merging them by
/// set union.
pub fn extract_sketch(img: &BinaryImage, bias: Bias, directions: Directions) -> Sketch {
    let (w, h) = (img.width(), img.height());
    let mut marks = vec![MARK_NONE; w as usize * h as usize];
    let mut column = Vec::with_capacity(h as usize);

    for dir in directions.iter() {
        let (color, mark) = match dir.color() {
            Pixel::Black => (Pixel::Black, MARK_BLACK),
            Pixel::White => (Pixel::White, MARK_WHITE),
        };
        match dir.orientation() {
            Orientation::Horizontal => {
                for y in 0..h {
                    let base = y as usize * w as usize;
                    for span in find_runs(img.row(y), color) {
                        let seg = span.segment(bias);
                        marks[base + seg.start as usize..=base + seg.end as usize].fill(mark);
                    }
                }
            }
            Orientation::Vertical => {
                for x in 0..w {
                    column.clear();
                    column.extend((0..h).map(|y| img.get(x, y)));
                    for span in find_runs(&column, color) {
                        let seg = span.segment(bias);
                        for y in seg.start..=seg.end {
                            marks[y as usize * w as usize + x as usize] = mark;
                        }
                    }
                }
            }
        }
    }

    let mut black_points = Vec::new();
    let mut white_points = Vec::new();
    for (i, &m) in marks.iter().enumerate() {
        let p = ((i % w as usize) as u32, (i / w as usize) as u32);
        match m {
            MARK_BLACK => black_points.push(p),
            MARK_WHITE => white_points.push(p),
            _ => {}
        }
    }
    Sketch {
        extent: img.canvas(),
        black_points,
        white_points,
        bias,
    }
}

/// Gray picture of a sketch: 128 background, 0 for black points, 255 for
/// white points.
pub fn render_sketch(sketch: &Sketch) -> GrayImage {
    let Canvas { width, height } = sketch.extent;
    let mut samples = vec![128u8; width as usize * height as usize];
    for &(x, y) in &sketch.black_points {
        samples[y as usize * width as usize + x as usize] = 0;
    }
    for &(x, y) in &sketch.white_points {
        samples[y as usize * width as usize + x as usize] = 255;
    }
    GrayImage::new(width, height, samples).expect("extent is non-empty")
}
