use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sketchocr::bench::{
    evaluate, generate_corpus_from, load_corpus, save_corpus, write_report, Recipe,
};
use sketchocr::matcher::{classify, match_score};
use sketchocr::raster::{self, Canvas};
use sketchocr::sketch::{extract_sketch, render_sketch, Bias, Directions};
use sketchocr::templates::{ingest, load_set, save_set, SetParams, TemplateSet};
use sketchocr::{write_atomic, BinaryImage, Error};

/// Character recognition by run-midpoint sketches and centroid alignment.
#[derive(Debug, Parser)]
#[command(name = "sketchocr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract the sketch of an image and save it as a gray PGM.
    Sketch {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "0.4", value_parser = parse_bias)]
        bias: Bias,
        #[arg(long, default_value = "hb,hw,vb,vw", value_parser = parse_directions)]
        directions: Directions,
        #[arg(long, default_value_t = 128)]
        threshold: u8,
    },
    /// Print the black-pixel centroid as `cx<TAB>cy`.
    Centroid {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 128)]
        threshold: u8,
    },
    /// Score the sketch of one image against another.
    Match {
        /// image the sketch is taken from
        #[arg(long = "in")]
        input: PathBuf,
        /// image the sketch is sampled against
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value = "0.4", value_parser = parse_bias)]
        bias: Bias,
        #[arg(long, default_value = "hb,hw,vb,vw", value_parser = parse_directions)]
        directions: Directions,
        #[command(flatten)]
        layout: Layout,
        #[arg(long, default_value_t = 128)]
        threshold: u8,
    },
    /// Rank the labels of a template set against a query image.
    Classify {
        #[arg(long)]
        templates: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        /// recompute template sketches at this bias instead of the stored one
        #[arg(long, value_parser = parse_bias)]
        bias: Option<Bias>,
        #[arg(long, default_value_t = 128)]
        threshold: u8,
    },
    /// Build a template set from a `label<TAB>image` manifest.
    Ingest {
        /// manifest file
        #[arg(long = "in")]
        input: PathBuf,
        /// output set directory
        #[arg(long)]
        out: PathBuf,
        /// set name (defaults to the output directory name)
        #[arg(long)]
        name: Option<String>,
        #[arg(long, default_value = "0.4", value_parser = parse_bias)]
        bias: Bias,
        #[command(flatten)]
        layout: Layout,
        #[arg(long, default_value_t = 128)]
        threshold: u8,
    },
    /// Generate a distorted sample corpus from one or more template sets.
    GenCorpus {
        /// comma-separated template set directories
        #[arg(long, value_delimiter = ',', required = true)]
        templates: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "noise:0.02+translate:2,1*5", value_parser = parse_recipe)]
        recipe: Recipe,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Evaluate every template set against a corpus and write a report.
    Bench {
        /// comma-separated template set directories (recognizers, and the
        /// corpus source unless --in is given)
        #[arg(long, value_delimiter = ',', required = true)]
        templates: Vec<PathBuf>,
        /// existing corpus directory
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value = "noise:0.02+translate:2,1*5", value_parser = parse_recipe)]
        recipe: Recipe,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_parser = parse_bias)]
        bias: Option<Bias>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Normalize an image onto the canvas and save it as canonical PBM.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        layout: Layout,
        #[arg(long, default_value_t = 128)]
        threshold: u8,
    },
}

#[derive(Debug, Args)]
struct Layout {
    #[arg(long, default_value = "64x64", value_parser = parse_canvas)]
    canvas: Canvas,
    #[arg(long, default_value_t = 4)]
    margin: u32,
}

fn parse_bias(s: &str) -> Result<Bias, String> {
    s.parse::<f64>()
        .ok()
        .and_then(|v| Bias::new(v).ok())
        .ok_or_else(|| "bias must satisfy 0 < bias ≤ 1".to_owned())
}

fn parse_directions(s: &str) -> Result<Directions, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_canvas(s: &str) -> Result<Canvas, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_recipe(s: &str) -> Result<Recipe, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidParameter(_) => 1,
        Error::Io { .. } => 2,
        Error::Format(_) | Error::Dimension(_) | Error::EmptyForeground => 3,
        Error::Config(_) => 4,
    }
}

fn read_image(path: &Path, threshold: u8) -> Result<BinaryImage, Error> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })?;
    let pnm =
        raster::load_pnm(&bytes).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    Ok(pnm.into_binary(threshold))
}

fn load_sets(dirs: &[PathBuf], bias: Option<Bias>) -> Result<Vec<TemplateSet>, Error> {
    dirs.iter()
        .map(|d| {
            let set = load_set(d)?;
            Ok(match bias {
                Some(b) if b != set.bias() => set.with_bias(b),
                _ => set,
            })
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Sketch {
            input,
            out,
            bias,
            directions,
            threshold,
        } => {
            let img = read_image(&input, threshold)?;
            let sketch = extract_sketch(&img, bias, directions);
            write_atomic(&out, &raster::save_pgm(&render_sketch(&sketch)))?;
            println!(
                "{}\tblack={}\twhite={}\tbias={bias}\tdirections={directions}",
                out.display(),
                sketch.n_black(),
                sketch.n_white()
            );
        }
        Command::Centroid { input, threshold } => {
            let c = raster::centroid(&read_image(&input, threshold)?)?;
            println!("{}\t{}", c.cx(), c.cy());
        }
        Command::Match {
            input,
            target,
            bias,
            directions,
            layout,
            threshold,
        } => {
            let place = |p: &Path| -> Result<BinaryImage, Error> {
                raster::normalize(&read_image(p, threshold)?, layout.canvas, layout.margin)
            };
            let source = place(&input)?;
            let target = place(&target)?;
            let sketch = extract_sketch(&source, bias, directions);
            let score = match_score(&sketch, &raster::centroid(&source)?, &target)?;
            println!("w\tn_w\tb\tn_b\taccuracy");
            println!(
                "{}\t{}\t{}\t{}\t{:.3}",
                score.w, score.n_w, score.b, score.n_b, score.accuracy
            );
        }
        Command::Classify {
            templates,
            input,
            bias,
            threshold,
        } => {
            let set = load_sets(&[templates], bias)?.remove(0);
            let query =
                raster::normalize(&read_image(&input, threshold)?, set.canvas(), set.margin())?;
            for (label, score) in classify(&query, &set)?.iter() {
                println!("{label}\t{:.3}", score.accuracy);
            }
        }
        Command::Ingest {
            input,
            out,
            name,
            bias,
            layout,
            threshold,
        } => {
            let name = name.unwrap_or_else(|| {
                out.file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default()
            });
            let params = SetParams {
                canvas: layout.canvas,
                bias,
                margin: layout.margin,
            };
            let ingested = ingest(&input, &name, params, threshold)?;
            for w in &ingested.warnings {
                eprintln!("warning: {w}");
            }
            save_set(&ingested.set, &out)?;
            println!(
                "{}\t{} glyphs\tbias={bias}\tcanvas={}\tmargin={}",
                out.display(),
                ingested.set.entries().len(),
                layout.canvas,
                layout.margin
            );
        }
        Command::GenCorpus {
            templates,
            out,
            recipe,
            seed,
        } => {
            let sets = load_sets(&templates, None)?;
            let corpus = generate_corpus_from(&sets, &recipe, seed)?;
            save_corpus(&corpus, &out)?;
            println!(
                "{}\t{} items\trecipe={recipe}\tseed={seed}",
                out.display(),
                corpus.len()
            );
        }
        Command::Bench {
            templates,
            input,
            recipe,
            seed,
            bias,
            report,
        } => {
            let sets = load_sets(&templates, bias)?;
            let corpus = match &input {
                Some(dir) => load_corpus(dir)?,
                None => generate_corpus_from(&sets, &recipe, seed)?,
            };
            let result = evaluate(&corpus, &sets)?;
            let source = match &input {
                Some(dir) => format!("corpus={}", dir.display()),
                None => format!("recipe={recipe}\tseed={seed}"),
            };
            let biases: Vec<String> = sets
                .iter()
                .map(|s| format!("{}={}", s.name(), s.bias()))
                .collect();
            println!(
                "# {source}\tbias={}\tcanvas={}",
                biases.join(","),
                sets[0].canvas()
            );
            println!("recognizer\tsamples\tcorrect\tpercent");
            for row in &result.rows {
                println!(
                    "{}\t{}\t{}\t{:.1}",
                    row.recognizer, row.samples, row.correct, row.percent
                );
            }
            if let Some(path) = report {
                write_report(&result, &path)?;
            }
        }
        Command::Render {
            input,
            out,
            layout,
            threshold,
        } => {
            let img = raster::normalize(
                &read_image(&input, threshold)?,
                layout.canvas,
                layout.margin,
            )?;
            write_atomic(&out, &raster::save_pnm(&img))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sketchocr: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
