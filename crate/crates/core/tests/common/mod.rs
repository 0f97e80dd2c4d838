//! Shared test support: fixture access, seeded random images, and a
//! brute-force reference pipeline that shares no code with the library's
//! sketch extraction, shift computation, or matching.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;

use sketchocr::raster::Pixel;
use sketchocr::rng::SplitMix64;
use sketchocr::templates::{load_set, TemplateSet};
use sketchocr::BinaryImage;

pub const STYLES: [&str; 2] = ["sans5x7", "serif7x9"];

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture_set(name: &str) -> TemplateSet {
    load_set(&fixtures_dir().join(name)).expect("bundled fixture set loads")
}

/// Random image with black density `density`.
pub fn random_image(rng: &mut SplitMix64, width: u32, height: u32, density: f64) -> BinaryImage {
    BinaryImage::from_fn(width, height, |_, _| {
        if rng.next_f64() < density {
            Pixel::Black
        } else {
            Pixel::White
        }
    })
}

/// Random image from `seed` with a seed-dependent density in [0.1, 0.9),
/// guaranteed to contain at least one black pixel.
pub fn seeded_image(seed: u64, width: u32, height: u32) -> BinaryImage {
    let mut rng = SplitMix64::new(seed);
    let density = 0.1 + 0.8 * rng.next_f64();
    let mut img = random_image(&mut rng, width, height, density);
    if img.black_count() == 0 {
        img.set(width / 2, height / 2, Pixel::Black);
    }
    img
}

pub type Points = BTreeSet<(u32, u32)>;

/// Reference sketch: for every pixel and each of the four scans, walk
/// outward to find the pixel's own run, then test whether the pixel falls in
/// that run's segment.
pub fn oracle_sketch(img: &BinaryImage, bias: f64, scans: &[(bool, Pixel)]) -> (Points, Points) {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let at = |x: i64, y: i64| img.get(x as u32, y as u32);
    let mut black = Points::new();
    let mut white = Points::new();
    for y in 0..h {
        for x in 0..w {
            let here = at(x, y);
            for &(horizontal, color) in scans {
                if here != color {
                    continue;
                }
                let (pos, len, step): (i64, i64, Box<dyn Fn(i64) -> Pixel>) = if horizontal {
                    (x, w, Box::new(|i| at(i, y)))
                } else {
                    (y, h, Box::new(|i| at(x, i)))
                };
                let mut start = pos;
                while start > 0 && step(start - 1) == color {
                    start -= 1;
                }
                let mut end = pos;
                while end < len - 1 && step(end + 1) == color {
                    end += 1;
                }
                if color == Pixel::White && (start == 0 || end == len - 1) {
                    continue;
                }
                let run_len = end - start + 1;
                let width = ((bias * run_len as f64).round() as i64).max(1);
                let median = (start + end).div_euclid(2);
                let lo = median - (width - 1) / 2;
                let hi = lo + width - 1;
                if (lo..=hi).contains(&pos) {
                    let p = (x as u32, y as u32);
                    if color == Pixel::Black {
                        black.insert(p);
                    } else {
                        white.insert(p);
                    }
                }
            }
        }
    }
    (black, white)
}

pub const ALL_SCANS: [(bool, Pixel); 4] = [
    (true, Pixel::Black),
    (true, Pixel::White),
    (false, Pixel::Black),
    (false, Pixel::White),
];

/// Exact centroid as (sum_x, sum_y, count).
pub fn oracle_centroid(img: &BinaryImage) -> (i64, i64, i64) {
    let mut acc = (0, 0, 0);
    for y in 0..img.height() {
        for x in 0..img.width() {
            if img.get(x, y) == Pixel::Black {
                acc.0 += x as i64;
                acc.1 += y as i64;
                acc.2 += 1;
            }
        }
    }
    acc
}

/// Nearest integer to `a/n − b/m` (halves away from zero), by searching the
/// integers around a float estimate and comparing exact integer distances.
pub fn oracle_round_diff(a: i64, n: i64, b: i64, m: i64) -> i64 {
    // |a/n − b/m − k| ∝ |a·m − b·n − k·n·m|
    let num = a as i128 * m as i128 - b as i128 * n as i128;
    let den = n as i128 * m as i128;
    let mut best: Option<(i128, i64)> = None;
    let estimate = (num as f64 / den as f64).floor() as i64;
    for k in estimate - 2..=estimate + 2 {
        let dist = (num - k as i128 * den).abs();
        best = match best {
            None => Some((dist, k)),
            Some((d, bk)) if dist < d || (dist == d && k.abs() > bk.abs()) => Some((dist, k)),
            keep => keep,
        };
    }
    best.unwrap().1
}

pub fn oracle_shift(target: &BinaryImage, source: (i64, i64, i64)) -> (i64, i64) {
    let t = oracle_centroid(target);
    (
        oracle_round_diff(t.0, t.2, source.0, source.2),
        oracle_round_diff(t.1, t.2, source.1, source.2),
    )
}

/// (w, b) by checking every sketch point against the target.
pub fn oracle_hits(
    black: &Points,
    white: &Points,
    target: &BinaryImage,
    d: (i64, i64),
) -> (usize, usize) {
    let sample = |&(x, y): &(u32, u32)| {
        let (tx, ty) = (x as i64 + d.0, y as i64 + d.1);
        if tx < 0 || ty < 0 || tx >= target.width() as i64 || ty >= target.height() as i64 {
            Pixel::White
        } else {
            target.get(tx as u32, ty as u32)
        }
    };
    let b = black.iter().filter(|p| sample(p) == Pixel::Black).count();
    let w = white.iter().filter(|p| sample(p) == Pixel::White).count();
    (w, b)
}

pub fn oracle_accuracy(w: usize, n_w: usize, b: usize, n_b: usize) -> f64 {
    match (n_w, n_b) {
        (0, 0) => 0.0,
        (0, _) => 100.0 * b as f64 / n_b as f64,
        (_, 0) => 100.0 * w as f64 / n_w as f64,
        _ => 0.5 * (w as f64 / n_w as f64 + b as f64 / n_b as f64) * 100.0,
    }
}

/// A template as the reference pipeline sees it.
pub struct OracleTemplate {
    pub label: String,
    pub black: Points,
    pub white: Points,
    pub centroid: (i64, i64, i64),
}

pub fn oracle_templates(set: &TemplateSet, bias: f64) -> Vec<OracleTemplate> {
    set.entries()
        .iter()
        .map(|e| {
            let (black, white) = oracle_sketch(&e.image, bias, &ALL_SCANS);
            OracleTemplate {
                label: e.label.clone(),
                black,
                white,
                centroid: oracle_centroid(&e.image),
            }
        })
        .collect()
}

/// Top-1 label: best accuracy, ties to the smallest label.
pub fn oracle_classify(query: &BinaryImage, templates: &[OracleTemplate], gravity: bool) -> String {
    let mut best: Option<(f64, &str)> = None;
    for t in templates {
        let d = if gravity {
            oracle_shift(query, t.centroid)
        } else {
            (0, 0)
        };
        let (w, b) = oracle_hits(&t.black, &t.white, query, d);
        let acc = oracle_accuracy(w, t.white.len(), b, t.black.len());
        best = match best {
            Some((a, l)) if a > acc || (a == acc && l <= t.label.as_str()) => Some((a, l)),
            _ => Some((acc, t.label.as_str())),
        };
    }
    best.unwrap().1.to_owned()
}

pub fn as_set(points: &[(u32, u32)]) -> Points {
    points.iter().copied().collect()
}

pub fn hash_set(points: &[(u32, u32)]) -> HashSet<(u32, u32)> {
    points.iter().copied().collect()
}
