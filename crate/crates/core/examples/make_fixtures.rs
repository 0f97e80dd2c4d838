//! Regenerates the bundled recognizer sets from their glyph sheets.
//!
//! ```text
//! cargo run -p sketchocr-core --example make_fixtures -- fixtures
//! ```

use std::path::PathBuf;

use sketchocr::templates::{parse_glyph_sheet, save_set, set_from_glyphs, SetParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    for name in ["sans5x7", "serif7x9"] {
        let sheet = std::fs::read_to_string(root.join("src").join(format!("{name}.txt")))?;
        let set = set_from_glyphs(name, SetParams::default(), parse_glyph_sheet(&sheet)?)?;
        save_set(&set, &root.join(name))?;
        println!("{name}: {} glyphs", set.entries().len());
    }
    Ok(())
}
