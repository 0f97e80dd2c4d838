//! Recognizer sets: labeled glyphs on a shared canvas with their sketches.
//!
//! On disk a set is a directory holding `set.tsv` and one canonical P1 PBM
//! per glyph:
//!
//! ```text
//! #SKETCHSET v1<TAB>name<TAB>canvas_w<TAB>canvas_h<TAB>bias<TAB>margin
//! A<TAB>u0041.pbm
//! B<TAB>u0042.pbm
//! ```
//!
//! Sketches and centroids are not stored; they are recomputed on load.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fsutil;
use crate::raster::{centroid, load_pnm, normalize, save_pnm, BinaryImage, Canvas, Centroid};
use crate::sketch::{extract_sketch, Bias, Directions, Sketch};

pub const SET_FILE: &str = "set.tsv";
const HEADER_TAG: &str = "#SKETCHSET";
const VERSION: &str = "v1";

/// Threshold applied to gray glyph images at ingest.
pub const DEFAULT_THRESHOLD: u8 = 128;

#[derive(Clone, Debug, PartialEq)]
pub struct TemplateEntry {
    pub label: String,
    pub image: BinaryImage,
    pub sketch: Sketch,
    pub centroid: Centroid,
}

/// Parameters shared by every entry of a set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SetParams {
    pub canvas: Canvas,
    pub bias: Bias,
    pub margin: u32,
}

impl Default for SetParams {
    fn default() -> Self {
        SetParams {
            canvas: Canvas::DEFAULT,
            bias: Bias::DEFAULT,
            margin: crate::raster::DEFAULT_MARGIN,
        }
    }
}

/// One recognizer "font".
#[derive(Clone, Debug, PartialEq)]
pub struct TemplateSet {
    name: String,
    params: SetParams,
    entries: Vec<TemplateEntry>,
}

impl TemplateSet {
    /// Builds a set from glyphs already on `params.canvas`. Entries are
    /// sorted by label.
    pub fn from_images(
        name: impl Into<String>,
        params: SetParams,
        glyphs: Vec<(String, BinaryImage)>,
    ) -> Result<Self> {
        let name = name.into();
        check_text_field("set name", &name)?;
        let mut glyphs = glyphs;
        glyphs.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in glyphs.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::Config(format!("duplicate label {:?}", pair[0].0)));
            }
        }
        let entries = glyphs
            .into_par_iter()
            .map(|(label, image)| {
                check_label(&label)?;
                if image.canvas() != params.canvas {
                    return Err(Error::Dimension(format!(
                        "glyph {label:?} is {} but the set canvas is {}",
                        image.canvas(),
                        params.canvas
                    )));
                }
                let centroid = centroid(&image)
                    .map_err(|_| Error::Format(format!("glyph {label:?} has no black pixels")))?;
                let sketch = extract_sketch(&image, params.bias, Directions::ALL);
                Ok(TemplateEntry {
                    label,
                    image,
                    sketch,
                    centroid,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TemplateSet {
            name,
            params,
            entries,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> SetParams {
        self.params
    }

    pub fn canvas(&self) -> Canvas {
        self.params.canvas
    }

    pub fn bias(&self) -> Bias {
        self.params.bias
    }

    pub fn margin(&self) -> u32 {
        self.params.margin
    }

    pub fn entries(&self) -> &[TemplateEntry] {
        &self.entries
    }

    pub fn get(&self, label: &str) -> Option<&TemplateEntry> {
        self.entries
            .binary_search_by(|e| e.label.as_str().cmp(label))
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.label.as_str())
    }

    /// Same glyphs with sketches recomputed at another bias.
    pub fn with_bias(&self, bias: Bias) -> TemplateSet {
        let params = SetParams {
            bias,
            ..self.params
        };
        let glyphs = self
            .entries
            .iter()
            .map(|e| (e.label.clone(), e.image.clone()))
            .collect();
        TemplateSet::from_images(self.name.clone(), params, glyphs)
            .expect("entries were already validated")
    }
}

fn check_label(label: &str) -> Result<()> {
    let mut chars = label.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if !c.is_control() => Ok(()),
        (Some(c), None) => Err(Error::Config(format!("label {c:?} is a control character"))),
        _ => Err(Error::Config(format!(
            "label {label:?} must be exactly one character"
        ))),
    }
}

fn check_text_field(what: &str, value: &str) -> Result<()> {
    if value.contains(['\t', '\n', '\r']) {
        return Err(Error::Config(format!(
            "{what} {value:?} contains a tab or newline"
        )));
    }
    Ok(())
}

/// A set built by [`ingest`] plus the glyphs that had to be dropped.
#[derive(Debug)]
pub struct Ingested {
    pub set: TemplateSet,
    pub warnings: Vec<String>,
}

/// Reads a manifest of `label<TAB>image path` rows (paths relative to the
/// manifest's directory; `#` lines are comments), normalizes every glyph onto
/// the canvas and computes its sketch. Glyphs without black pixels are
/// skipped with a warning.
pub fn ingest(manifest: &Path, name: &str, params: SetParams, threshold: u8) -> Result<Ingested> {
    let text = fs::read_to_string(manifest).map_err(|e| Error::io(manifest, e))?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let rows = parse_rows(&text)?;

    let mut seen = std::collections::HashSet::new();
    for (label, _) in &rows {
        check_label(label)?;
        if !seen.insert(label.as_str()) {
            return Err(Error::Config(format!("duplicate label {label:?}")));
        }
    }

    let loaded = rows
        .par_iter()
        .map(|(label, file)| {
            let path = base.join(file);
            let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            let img = load_pnm(&bytes)
                .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?
                .into_binary(threshold);
            match normalize(&img, params.canvas, params.margin) {
                Ok(img) => Ok(Ok((label.clone(), img))),
                Err(Error::EmptyForeground) => Ok(Err(format!(
                    "skipping {label:?} ({}): glyph has no black pixels",
                    path.display()
                ))),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut glyphs = Vec::new();
    let mut warnings = Vec::new();
    for item in loaded {
        match item {
            Ok(g) => glyphs.push(g),
            Err(w) => warnings.push(w),
        }
    }
    Ok(Ingested {
        set: TemplateSet::from_images(name, params, glyphs)?,
        warnings,
    })
}

/// `label<TAB>file` rows; skips blank lines and `#` comments. A line that
/// starts with `#<TAB>` is a row for the label `#`.
fn parse_rows(text: &str) -> Result<Vec<(String, String)>> {
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() || (line.starts_with('#') && !line.starts_with("#\t")) {
            continue;
        }
        let (label, file) = line
            .split_once('\t')
            .ok_or_else(|| Error::Format(format!("line {}: expected label<TAB>file", n + 1)))?;
        if file.is_empty() || file.contains('\t') {
            return Err(Error::Format(format!(
                "line {}: expected exactly two tab-separated fields",
                n + 1
            )));
        }
        rows.push((label.to_owned(), file.to_owned()));
    }
    Ok(rows)
}

/// Reads a glyph sheet: `#` comment lines, then blocks made of a
/// `== <label>` line followed by pixel-art rows (see
/// [`BinaryImage::from_art`]). Glyphs keep their drawn size.
pub fn parse_glyph_sheet(text: &str) -> Result<Vec<(String, BinaryImage)>> {
    let mut glyphs = Vec::new();
    let mut current: Option<(String, String)> = None;
    let mut flush = |cur: Option<(String, String)>| -> Result<()> {
        if let Some((label, art)) = cur {
            let img = BinaryImage::from_art(&art)
                .map_err(|e| Error::Format(format!("glyph {label:?}: {e}")))?;
            glyphs.push((label, img));
        }
        Ok(())
    };
    for line in text.lines() {
        if let Some(label) = line.strip_prefix("== ") {
            flush(current.take())?;
            current = Some((label.to_owned(), String::new()));
        } else if line.starts_with('#') && current.is_none() {
            continue;
        } else if let Some((_, art)) = current.as_mut() {
            art.push_str(line);
            art.push('\n');
        } else if !line.trim().is_empty() {
            return Err(Error::Format(format!(
                "pixel row {line:?} before any `== label` line"
            )));
        }
    }
    flush(current)?;
    Ok(glyphs)
}

/// Normalizes drawn glyphs onto `params.canvas` and builds a set.
pub fn set_from_glyphs(
    name: &str,
    params: SetParams,
    glyphs: Vec<(String, BinaryImage)>,
) -> Result<TemplateSet> {
    let placed = glyphs
        .into_iter()
        .map(|(label, img)| {
            normalize(&img, params.canvas, params.margin)
                .map(|img| (label.clone(), img))
                .map_err(|e| Error::Format(format!("glyph {label:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    TemplateSet::from_images(name, params, placed)
}

/// File name used for a label's glyph, e.g. `u0041.pbm` for `A`.
pub fn glyph_file_name(label: &str) -> String {
    let code = label.chars().next().map_or(0, |c| c as u32);
    format!("u{code:04X}.pbm")
}

/// Writes `set` to `dir`, replacing a previously saved set there. The
/// directory only appears once every file has been written.
pub fn save_set(set: &TemplateSet, dir: &Path) -> Result<()> {
    let mut manifest = format!(
        "{HEADER_TAG} {VERSION}\t{}\t{}\t{}\t{}\t{}\n",
        set.name,
        set.params.canvas.width,
        set.params.canvas.height,
        set.params.bias,
        set.params.margin
    );
    let mut files: Vec<(PathBuf, Vec<u8>)> = Vec::with_capacity(set.entries.len() + 1);
    for entry in &set.entries {
        let file = glyph_file_name(&entry.label);
        manifest.push_str(&format!("{}\t{}\n", entry.label, file));
        files.push((PathBuf::from(file), save_pnm(&entry.image)));
    }
    files.push((PathBuf::from(SET_FILE), manifest.into_bytes()));
    fsutil::write_dir_atomic(dir, &files, |existing| existing.join(SET_FILE).is_file())
}

pub fn load_set(dir: &Path) -> Result<TemplateSet> {
    let manifest_path = dir.join(SET_FILE);
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let header = text
        .lines()
        .next()
        .ok_or_else(|| Error::Format(format!("{}: empty file", manifest_path.display())))?;
    let (name, params) = parse_header(header)?;

    let glyphs = parse_rows(&text)?
        .into_par_iter()
        .map(|(label, file)| {
            let path = dir.join(&file);
            let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            let img = match load_pnm(&bytes)
                .map_err(|e| Error::Format(format!("entry {label:?} ({file}): {e}")))?
            {
                crate::raster::Pnm::Binary(img) => img,
                crate::raster::Pnm::Gray(_) => {
                    return Err(Error::Format(format!(
                        "entry {label:?} ({file}) is not a PBM image"
                    )))
                }
            };
            if img.canvas() != params.canvas {
                return Err(Error::Dimension(format!(
                    "entry {label:?} ({file}) is {} but the set canvas is {}",
                    img.canvas(),
                    params.canvas
                )));
            }
            Ok((label, img))
        })
        .collect::<Result<Vec<_>>>()?;
    TemplateSet::from_images(name, params, glyphs)
}

fn parse_header(line: &str) -> Result<(String, SetParams)> {
    let rest = line
        .strip_prefix(HEADER_TAG)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| Error::Format("missing #SKETCHSET header".into()))?;
    let fields: Vec<&str> = rest.split('\t').collect();
    if fields[0] != VERSION {
        return Err(Error::Format(format!(
            "unsupported version {:?}",
            fields[0]
        )));
    }
    let [_, name, w, h, bias, margin] = fields[..] else {
        return Err(Error::Format(format!(
            "header needs 6 tab-separated fields, got {}",
            fields.len()
        )));
    };
    let num = |what: &str, v: &str| -> Result<u32> {
        v.parse()
            .map_err(|_| Error::Format(format!("bad {what} {v:?} in header")))
    };
    let canvas = Canvas::new(num("canvas width", w)?, num("canvas height", h)?);
    if canvas.width == 0 || canvas.height == 0 {
        return Err(Error::Format(format!("bad canvas {canvas} in header")));
    }
    let bias: Bias = bias
        .parse()
        .map_err(|e| Error::Format(format!("header: {e}")))?;
    Ok((
        name.to_owned(),
        SetParams {
            canvas,
            bias,
            margin: num("margin", margin)?,
        },
    ))
}
