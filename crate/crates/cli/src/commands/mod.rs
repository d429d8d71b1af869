pub mod eval;
pub mod extract;
pub mod fuse;
pub mod morphometry;
pub mod postproc;
pub mod render_cmd;
pub mod synth;

use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

/// Opens `--out` or falls back to stdout.
pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let file =
                File::create(p).with_context(|| format!("creating output {}", p.display()))?;
            Ok(Box::new(file))
        }
        None => Ok(Box::new(std::io::stdout())),
    }
}
