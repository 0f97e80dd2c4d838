use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::distort::{distort, Distortion};
use crate::error::{Error, Result};
use crate::fsutil;
use crate::raster::{load_pnm, save_pnm, BinaryImage, Canvas, Pnm};
use crate::templates::TemplateSet;

pub const CORPUS_FILE: &str = "corpus.tsv";
const CORPUS_HEADER: &str = "#CORPUS v1";

/// Distortions applied in order, repeated `count` times per glyph.
#[derive(Clone, Debug, PartialEq)]
pub struct RecipeStep {
    pub distortions: Vec<Distortion>,
    pub count: usize,
}

/// An ordered list of steps. Text form: steps separated by `;`, each step
/// `d1+d2+...*count` (count defaults to 1), e.g.
/// `noise:0.02+translate:2,1*5;elongate:3`.
#[derive(Clone, Debug, PartialEq)]
pub struct Recipe(pub Vec<RecipeStep>);

impl Recipe {
    /// Five noisy, shifted copies of every glyph.
    pub fn bench_default() -> Recipe {
        Recipe(vec![RecipeStep {
            distortions: vec![
                Distortion::Noise(0.02),
                Distortion::Translate { dx: 2, dy: 1 },
            ],
            count: 5,
        }])
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{}*{}", DistortionList(&step.distortions), step.count)?;
        }
        Ok(())
    }
}

impl FromStr for Recipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let steps = s
            .split(';')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|step| {
                let (list, count) = match step.rsplit_once('*') {
                    Some((l, c)) => (
                        l,
                        c.trim().parse::<usize>().map_err(|_| {
                            Error::InvalidParameter(format!("bad repetition count in {step:?}"))
                        })?,
                    ),
                    None => (step, 1),
                };
                Ok(RecipeStep {
                    distortions: parse_distortion_list(list)?,
                    count,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if steps.is_empty() {
            return Err(Error::InvalidParameter("recipe is empty".into()));
        }
        Ok(Recipe(steps))
    }
}

/// `-` for an empty list, else distortions joined by `+`.
fn parse_distortion_list(s: &str) -> Result<Vec<Distortion>> {
    let s = s.trim();
    if s == "-" || s.is_empty() {
        return Ok(Vec::new());
    }
    s.split('+').map(str::parse).collect()
}

struct DistortionList<'a>(&'a [Distortion]);

impl fmt::Display for DistortionList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub source_set: String,
    pub distortions: Vec<Distortion>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusItem {
    pub true_label: String,
    pub image: BinaryImage,
    pub provenance: Provenance,
}

/// Seed handed to the `index`-th distortion of an item. The first distortion
/// gets the item seed itself.
pub fn distortion_seed(item_seed: u64, index: usize) -> u64 {
    item_seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Builds a corpus from `base`: for each recipe step, each entry in label
/// order, and each repetition, one item whose seed is `master_seed ^ i`,
/// `i` being the item's position in the corpus.
pub fn generate_corpus(base: &TemplateSet, recipe: &Recipe, master_seed: u64) -> Vec<CorpusItem> {
    let mut items = Vec::new();
    append_items(&mut items, base, recipe, master_seed);
    items
}

/// [`generate_corpus`] over several sets in turn; item positions (and so
/// seeds) keep counting across sets.
pub fn generate_corpus_from(
    bases: &[TemplateSet],
    recipe: &Recipe,
    master_seed: u64,
) -> Result<Vec<CorpusItem>> {
    let first = bases
        .first()
        .ok_or_else(|| Error::Config("no template sets to build a corpus from".into()))?;
    if let Some(odd) = bases.iter().find(|b| b.canvas() != first.canvas()) {
        return Err(Error::Dimension(format!(
            "set {:?} uses canvas {} but {:?} uses {}",
            odd.name(),
            odd.canvas(),
            first.name(),
            first.canvas()
        )));
    }
    let mut items = Vec::new();
    for base in bases {
        append_items(&mut items, base, recipe, master_seed);
    }
    Ok(items)
}

fn append_items(
    items: &mut Vec<CorpusItem>,
    base: &TemplateSet,
    recipe: &Recipe,
    master_seed: u64,
) {
    for step in &recipe.0 {
        for entry in base.entries() {
            for _ in 0..step.count {
                let seed = master_seed ^ items.len() as u64;
                let image = step
                    .distortions
                    .iter()
                    .enumerate()
                    .fold(entry.image.clone(), |img, (j, d)| {
                        distort(&img, d, distortion_seed(seed, j))
                    });
                items.push(CorpusItem {
                    true_label: entry.label.clone(),
                    image,
                    provenance: Provenance {
                        source_set: base.name().to_owned(),
                        distortions: step.distortions.clone(),
                        seed,
                    },
                });
            }
        }
    }
}

/// Writes items as numbered P1 files plus `corpus.tsv`
/// (`file, label, source set, distortions, seed`).
pub fn save_corpus(items: &[CorpusItem], dir: &Path) -> Result<()> {
    let canvas = items
        .first()
        .map(|i| i.image.canvas())
        .ok_or_else(|| Error::Config("corpus is empty".into()))?;
    let mut index = format!(
        "{CORPUS_HEADER}\t{}\t{}\n#file\tlabel\tsource\tdistortions\tseed\n",
        canvas.width, canvas.height
    );
    let mut files = Vec::with_capacity(items.len() + 1);
    for (i, item) in items.iter().enumerate() {
        if item.image.canvas() != canvas {
            return Err(Error::Dimension(format!(
                "corpus item {i} is {} but the corpus canvas is {canvas}",
                item.image.canvas()
            )));
        }
        let file = format!("{i:05}.pbm");
        index.push_str(&format!(
            "{file}\t{}\t{}\t{}\t{}\n",
            item.true_label,
            item.provenance.source_set,
            DistortionList(&item.provenance.distortions),
            item.provenance.seed
        ));
        files.push((PathBuf::from(file), save_pnm(&item.image)));
    }
    files.push((PathBuf::from(CORPUS_FILE), index.into_bytes()));
    fsutil::write_dir_atomic(dir, &files, |d| d.join(CORPUS_FILE).is_file())
}

pub fn load_corpus(dir: &Path) -> Result<Vec<CorpusItem>> {
    let path = dir.join(CORPUS_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    let canvas = parse_corpus_header(header)?;
    let mut items = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.starts_with("#file") || line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Format(format!("{}: malformed line {}", path.display(), n + 2));
        let fields: Vec<&str> = line.split('\t').collect();
        let [file, label, source, distortions, seed] = fields[..] else {
            return Err(bad());
        };
        let img_path = dir.join(file);
        let bytes = fs::read(&img_path).map_err(|e| Error::io(&img_path, e))?;
        let Pnm::Binary(image) = load_pnm(&bytes)? else {
            return Err(Error::Format(format!(
                "{} is not a PBM",
                img_path.display()
            )));
        };
        if image.canvas() != canvas {
            return Err(Error::Dimension(format!(
                "{} is {} but the corpus canvas is {canvas}",
                img_path.display(),
                image.canvas()
            )));
        }
        items.push(CorpusItem {
            true_label: label.to_owned(),
            image,
            provenance: Provenance {
                source_set: source.to_owned(),
                distortions: parse_distortion_list(distortions)?,
                seed: seed.parse().map_err(|_| bad())?,
            },
        });
    }
    Ok(items)
}

fn parse_corpus_header(line: &str) -> Result<Canvas> {
    let rest = line
        .strip_prefix(CORPUS_HEADER)
        .and_then(|r| r.strip_prefix('\t'))
        .ok_or_else(|| Error::Format(format!("expected {CORPUS_HEADER:?} header")))?;
    let (w, h) = rest
        .split_once('\t')
        .ok_or_else(|| Error::Format("corpus header lacks canvas".into()))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<u32>()
            .map_err(|_| Error::Format(format!("bad canvas dimension {v:?}")))
    };
    Ok(Canvas::new(parse(w)?, parse(h)?))
}
