use std::path::{Path, PathBuf};

use anyhow::Context;
use dcscn_core::data::{load_image, RgbImage};

use crate::{CliError, CliResult};

const EXTENSIONS: [&str; 2] = ["png", "bmp"];

/// Image files directly inside `dir`, sorted by name.
pub fn list_images(dir: &Path) -> CliResult<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(CliError::usage(format!("{} is not a directory", dir.display())));
    }
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry.with_context(|| format!("reading {}", dir.display()))?.path();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if path.is_file() && ext.is_some_and(|e| EXTENSIONS.contains(&e.as_str())) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

pub fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn load_named(paths: &[PathBuf]) -> CliResult<Vec<(String, RgbImage)>> {
    paths.iter().map(|p| Ok((stem(p), load_image(p)?))).collect()
}
