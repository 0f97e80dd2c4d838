use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::raster::{centroid, translate, BinaryImage, Pixel};
use crate::rng::SplitMix64;
use crate::sketch::find_runs;

/// A deterministic image perturbation used to build sample corpora.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Distortion {
    Translate {
        dx: i64,
        dy: i64,
    },
    /// Resize about the black-pixel centroid.
    Scale(f64),
    /// One dilation with a 3×3 cross.
    Thicken,
    /// One erosion with a 3×3 cross.
    Thin,
    /// Flip every pixel independently with this probability.
    Noise(f64),
    /// Serif-like extension of the outermost runs on the top and bottom rows.
    Elongate(u32),
}

impl Distortion {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Distortion::Scale(f) if !(f > 0.0 && f.is_finite()) => Err(Error::InvalidParameter(
                format!("scale factor must be positive, got {f}"),
            )),
            Distortion::Noise(p) if !(0.0..=1.0).contains(&p) => Err(Error::InvalidParameter(
                format!("noise probability must be in [0, 1], got {p}"),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Distortion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distortion::Translate { dx, dy } => write!(f, "translate:{dx},{dy}"),
            Distortion::Scale(s) => write!(f, "scale:{s}"),
            Distortion::Thicken => f.write_str("thicken"),
            Distortion::Thin => f.write_str("thin"),
            Distortion::Noise(p) => write!(f, "noise:{p}"),
            Distortion::Elongate(e) => write!(f, "elongate:{e}"),
        }
    }
}

impl FromStr for Distortion {
    type Err = Error;

    /// `translate:DX,DY`, `scale:F`, `thicken`, `thin`, `noise:P`, `elongate:E`
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("cannot parse distortion {s:?}"));
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s, None),
        };
        let d = match (kind.to_ascii_lowercase().as_str(), arg) {
            ("translate", Some(a)) => {
                let (dx, dy) = a.split_once(',').ok_or_else(bad)?;
                Distortion::Translate {
                    dx: dx.trim().parse().map_err(|_| bad())?,
                    dy: dy.trim().parse().map_err(|_| bad())?,
                }
            }
            ("scale", Some(a)) => Distortion::Scale(a.parse().map_err(|_| bad())?),
            ("thicken", None) => Distortion::Thicken,
            ("thin", None) => Distortion::Thin,
            ("noise", Some(a)) => Distortion::Noise(a.parse().map_err(|_| bad())?),
            ("elongate", Some(a)) => Distortion::Elongate(a.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        d.validate()?;
        Ok(d)
    }
}

/// Applies `d` to `img`. Only [`Distortion::Noise`] consumes `seed`.
pub fn distort(img: &BinaryImage, d: &Distortion, seed: u64) -> BinaryImage {
    match *d {
        Distortion::Translate { dx, dy } => translate(img, dx, dy),
        Distortion::Scale(factor) => scale_about_centroid(img, factor),
        Distortion::Thicken => morph_cross(img, true),
        Distortion::Thin => morph_cross(img, false),
        Distortion::Noise(p) => noise(img, p, seed),
        Distortion::Elongate(e) => elongate(img, e),
    }
}

fn scale_about_centroid(img: &BinaryImage, factor: f64) -> BinaryImage {
    let Ok(c) = centroid(img) else {
        return img.clone();
    };
    let (cx, cy) = (c.cx(), c.cy());
    BinaryImage::from_fn(img.width(), img.height(), |x, y| {
        let sx = (cx + (x as f64 - cx) / factor).round() as i64;
        let sy = (cy + (y as f64 - cy) / factor).round() as i64;
        img.get_signed(sx, sy).unwrap_or(Pixel::White)
    })
}

const CROSS: [(i64, i64); 5] = [(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)];

/// Dilation (`grow`) or erosion with a 3×3 cross; the frame reads as white.
fn morph_cross(img: &BinaryImage, grow: bool) -> BinaryImage {
    BinaryImage::from_fn(img.width(), img.height(), |x, y| {
        let mut hood = CROSS.iter().map(|&(ox, oy)| {
            img.get_signed(x as i64 + ox, y as i64 + oy)
                .unwrap_or(Pixel::White)
                .is_black()
        });
        let black = if grow {
            hood.any(|b| b)
        } else {
            hood.all(|b| b)
        };
        if black {
            Pixel::Black
        } else {
            Pixel::White
        }
    })
}

/// One SplitMix64 draw per pixel in row-major order; the pixel flips when the
/// draw, as a uniform in `[0, 1)`, is below `p`.
fn noise(img: &BinaryImage, p: f64, seed: u64) -> BinaryImage {
    let mut rng = SplitMix64::new(seed);
    let mut out = img.clone();
    for y in 0..img.height() {
        for x in 0..img.width() {
            if rng.next_f64() < p {
                out.set(x, y, img.get(x, y).inverted());
            }
        }
    }
    out
}

fn elongate(img: &BinaryImage, e: u32) -> BinaryImage {
    let mut out = img.clone();
    let Some((_, top, _, bottom)) = img.bounding_box() else {
        return out;
    };
    let last = img.width() as i64 - 1;
    let rows = if top == bottom {
        vec![top]
    } else {
        vec![top, bottom]
    };
    for y in rows {
        let runs = find_runs(img.row(y), Pixel::Black);
        let (Some(first), Some(final_run)) = (runs.first(), runs.last()) else {
            continue;
        };
        let left = (first.start as i64 - e as i64).max(0);
        for x in left..first.start as i64 {
            out.set(x as u32, y, Pixel::Black);
        }
        let right = (final_run.end as i64 + e as i64).min(last);
        for x in final_run.end as i64 + 1..=right {
            out.set(x as u32, y, Pixel::Black);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dot(w: u32, h: u32, x: u32, y: u32) -> BinaryImage {
        let mut img = BinaryImage::filled(w, h, Pixel::White);
        img.set(x, y, Pixel::Black);
        img
    }

    #[test]
    fn zero_noise_is_identity() {
        let img = BinaryImage::from_art("#..#\n.##.\n#..#").unwrap();
        for seed in [0, 1, 42, u64::MAX] {
            assert_eq!(distort(&img, &Distortion::Noise(0.0), seed), img);
        }
    }

    #[test]
    fn full_noise_inverts() {
        let img = BinaryImage::from_art("#..#\n.##.").unwrap();
        let out = distort(&img, &Distortion::Noise(1.0), 3);
        assert!(img
            .pixels()
            .iter()
            .zip(out.pixels())
            .all(|(a, b)| *a == b.inverted()));
    }

    #[test]
    fn noise_depends_on_seed() {
        let img = BinaryImage::filled(32, 32, Pixel::White);
        let a = distort(&img, &Distortion::Noise(0.1), 42);
        let b = distort(&img, &Distortion::Noise(0.1), 43);
        assert_ne!(a, b);
        assert_eq!(a, distort(&img, &Distortion::Noise(0.1), 42));
    }

    #[test]
    fn thicken_single_pixel() {
        let out = distort(&dot(11, 11, 5, 5), &Distortion::Thicken, 0);
        let mut got: Vec<_> = out.black_pixels().collect();
        got.sort();
        assert_eq!(got, vec![(4, 5), (5, 4), (5, 5), (5, 6), (6, 5)]);
    }

    #[test]
    fn thin_undoes_thicken_of_a_dot() {
        let img = dot(11, 11, 5, 5);
        let thick = distort(&img, &Distortion::Thicken, 0);
        assert_eq!(distort(&thick, &Distortion::Thin, 0), img);
        // frame counts as white
        let full = BinaryImage::filled(3, 3, Pixel::Black);
        assert_eq!(distort(&full, &Distortion::Thin, 0), dot(3, 3, 1, 1));
    }

    #[test]
    fn elongate_square() {
        let square = BinaryImage::from_fn(9, 7, |x, y| {
            if (2..7).contains(&x) && (1..6).contains(&y) {
                Pixel::Black
            } else {
                Pixel::White
            }
        });
        let out = distort(&square, &Distortion::Elongate(2), 0);
        let expected = BinaryImage::from_art(
            ".........
             #########
             ..#####..
             ..#####..
             ..#####..
             #########
             .........",
        )
        .unwrap();
        assert_eq!(out, expected);

        // frame-filling square: nothing to extend into
        let full = BinaryImage::filled(5, 5, Pixel::Black);
        assert_eq!(distort(&full, &Distortion::Elongate(2), 0), full);

        // clamped on one side only
        let off = BinaryImage::from_art(
            ".##....
             .##....",
        )
        .unwrap();
        let expected = BinaryImage::from_art(
            "#####..
             #####..",
        )
        .unwrap();
        assert_eq!(distort(&off, &Distortion::Elongate(2), 0), expected);
    }

    #[test]
    fn elongate_uses_outer_runs_only() {
        let img = BinaryImage::from_art(
            "...#.#...
             ...#.#...",
        )
        .unwrap();
        // left run [3,3] grows to [1,3]; right run [5,5] grows to [5,7]
        assert_eq!(
            distort(&img, &Distortion::Elongate(2), 0),
            BinaryImage::from_art(
                ".###.###.
                 .###.###."
            )
            .unwrap()
        );
    }

    #[test]
    fn scale_about_centroid_doubles() {
        let img = BinaryImage::from_art(
            ".......
             .......
             ..###..
             ..###..
             ..###..
             .......
             .......",
        )
        .unwrap();
        let big = distort(&img, &Distortion::Scale(2.0), 0);
        // source coordinate 3 + (x - 3) / 2 rounds halves up: x = 0 maps to 2,
        // x = 6 maps to 5
        assert_eq!(big.bounding_box(), Some((0, 0, 5, 5)));
        assert_eq!(big.black_count(), 36);
        assert_eq!(distort(&img, &Distortion::Scale(1.0), 0), img);
    }

    #[test]
    fn parse_and_display() {
        for s in [
            "translate:2,-1",
            "scale:1.5",
            "thicken",
            "thin",
            "noise:0.02",
            "elongate:3",
        ] {
            let d: Distortion = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert!("noise:1.5".parse::<Distortion>().is_err());
        assert!("scale:0".parse::<Distortion>().is_err());
        assert!("wobble".parse::<Distortion>().is_err());
        assert!("translate:2".parse::<Distortion>().is_err());
    }
}
