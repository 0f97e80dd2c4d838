//! Centroid-aligned matching of a sketch against a target image.
//!
//! A sketch taken from a template is laid over the query so that the two
//! black-pixel centroids coincide: with `d = centroid(target) − centroid(source)`
//! rounded to whole pixels, sketch point `p` is compared with target pixel
//! `p + d`. Serif-like elongations move a glyph's centroid along with its
//! mass, so aligning centroids rather than frames absorbs most of the offset
//! they cause.

use crate::error::{Error, Result};
use crate::raster::{centroid, BinaryImage, Centroid, Pixel};
use crate::sketch::Sketch;
use crate::templates::TemplateSet;

/// Integer offset applied to sketch coordinates when sampling the target.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Shift {
    pub dx: i64,
    pub dy: i64,
}

impl Shift {
    pub const ZERO: Shift = Shift { dx: 0, dy: 0 };

    pub fn new(dx: i64, dy: i64) -> Self {
        Shift { dx, dy }
    }
}

/// `num / den` rounded to the nearest integer, halves away from zero.
fn round_ratio(num: i128, den: i128) -> i64 {
    debug_assert!(den > 0);
    let q = (2 * num.abs() + den) / (2 * den);
    (if num < 0 { -q } else { q }) as i64
}

/// `round(target − source)` per axis, computed exactly.
pub fn gravity_shift(target: &Centroid, source: &Centroid) -> Shift {
    let (tx, ty, tn) = target.sums();
    let (sx, sy, sn) = source.sums();
    let (tn, sn) = (tn as i128, sn as i128);
    let den = tn * sn;
    Shift {
        dx: round_ratio(tx as i128 * sn - sx as i128 * tn, den),
        dy: round_ratio(ty as i128 * sn - sy as i128 * tn, den),
    }
}

/// Outcome of one sketch-vs-image comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchScore {
    /// white sketch points landing on white
    pub w: usize,
    pub n_w: usize,
    /// black sketch points landing on black
    pub b: usize,
    pub n_b: usize,
    /// percentage in `[0, 100]`
    pub accuracy: f64,
}

impl MatchScore {
    /// Averages the white and black hit rates. A color with no sketch points
    /// drops out and the other rate counts alone; with no points at all the
    /// score is 0.
    pub fn from_counts(w: usize, n_w: usize, b: usize, n_b: usize) -> Self {
        assert!(w <= n_w && b <= n_b, "hits exceed totals");
        let rate = |hit: usize, total: usize| hit as f64 / total as f64;
        let accuracy = match (n_w, n_b) {
            (0, 0) => 0.0,
            (0, _) => rate(b, n_b) * 100.0,
            (_, 0) => rate(w, n_w) * 100.0,
            _ => (rate(w, n_w) + rate(b, n_b)) * 50.0,
        };
        MatchScore {
            w,
            n_w,
            b,
            n_b,
            accuracy,
        }
    }
}

/// Counts hits of `sketch` on `target` sampled at `p + shift`. Samples that
/// fall outside the frame read as white.
pub fn score_at_shift(sketch: &Sketch, target: &BinaryImage, shift: Shift) -> Result<MatchScore> {
    check_extent(sketch, target)?;
    let hits = |points: &[(u32, u32)], want: Pixel| -> usize {
        points
            .iter()
            .filter(|&&(x, y)| {
                let got = target
                    .get_signed(x as i64 + shift.dx, y as i64 + shift.dy)
                    .unwrap_or(Pixel::White);
                got == want
            })
            .count()
    };
    let b = hits(sketch.black_points(), Pixel::Black);
    let w = hits(sketch.white_points(), Pixel::White);
    Ok(MatchScore::from_counts(
        w,
        sketch.n_white(),
        b,
        sketch.n_black(),
    ))
}

fn check_extent(sketch: &Sketch, target: &BinaryImage) -> Result<()> {
    if sketch.extent() != target.canvas() {
        return Err(Error::Dimension(format!(
            "sketch extent {} does not match target {}",
            sketch.extent(),
            target.canvas()
        )));
    }
    Ok(())
}

/// Scores `sketch` (taken from an image whose centroid is `source_centroid`)
/// against `target` after centroid alignment.
pub fn match_score(
    sketch: &Sketch,
    source_centroid: &Centroid,
    target: &BinaryImage,
) -> Result<MatchScore> {
    check_extent(sketch, target)?;
    let target_centroid = centroid(target)?;
    score_at_shift(
        sketch,
        target,
        gravity_shift(&target_centroid, source_centroid),
    )
}

/// How the sketch frame is placed over the query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Alignment {
    /// Align black-pixel centroids.
    #[default]
    Gravity,
    /// Compare frame to frame (`d = 0`).
    Fixed,
}

/// Labels with their scores, best first; equal accuracies are ordered by
/// ascending label.
#[derive(Clone, Debug, PartialEq)]
pub struct Ranking(Vec<(String, MatchScore)>);

impl Ranking {
    pub fn new(mut entries: Vec<(String, MatchScore)>) -> Self {
        entries.sort_by(|(la, sa), (lb, sb)| {
            sb.accuracy.total_cmp(&sa.accuracy).then_with(|| la.cmp(lb))
        });
        Ranking(entries)
    }

    pub fn top(&self) -> Option<(&str, &MatchScore)> {
        self.0.first().map(|(l, s)| (l.as_str(), s))
    }

    pub fn entries(&self) -> &[(String, MatchScore)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &MatchScore)> {
        self.0.iter().map(|(l, s)| (l.as_str(), s))
    }
}

/// Matches `query` against every entry of `templates`.
pub fn classify(query: &BinaryImage, templates: &TemplateSet) -> Result<Ranking> {
    classify_with(query, templates, Alignment::Gravity)
}

pub fn classify_with(
    query: &BinaryImage,
    templates: &TemplateSet,
    alignment: Alignment,
) -> Result<Ranking> {
    if templates.entries().is_empty() {
        return Err(Error::Config(format!(
            "template set {:?} has no entries",
            templates.name()
        )));
    }
    if query.canvas() != templates.canvas() {
        return Err(Error::Dimension(format!(
            "query is {} but template set {:?} uses {}",
            query.canvas(),
            templates.name(),
            templates.canvas()
        )));
    }
    let query_centroid = centroid(query)?;
    let scores = templates
        .entries()
        .iter()
        .map(|entry| {
            let shift = match alignment {
                Alignment::Gravity => gravity_shift(&query_centroid, &entry.centroid),
                Alignment::Fixed => Shift::ZERO,
            };
            score_at_shift(&entry.sketch, query, shift).map(|s| (entry.label.clone(), s))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Ranking::new(scores))
}
