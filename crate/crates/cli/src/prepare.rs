use std::collections::HashSet;
use std::io::Write;

use anyhow::Context;
use dcscn_core::data::{load_image, save_image, DatasetManifest, Flip, Flippable, ManifestEntry, Role};

use crate::images::stem;
use crate::{CliError, CliResult, PrepareArgs};

/// Name of the manifest written next to the augmented images.
pub const PREPARED_MANIFEST: &str = "manifest.tsv";

/// Writes four flipped copies of every training image plus a manifest that
/// lists them alongside the untouched validation and test entries.
pub fn cmd_prepare(args: &PrepareArgs, out: &mut dyn Write) -> CliResult {
    let manifest = DatasetManifest::load(&args.manifest).map_err(|e| CliError::usage(e.to_string()))?;
    let train: Vec<_> = manifest.paths(Role::Train).map(|p| p.to_path_buf()).collect();
    if train.is_empty() {
        return Err(CliError::usage(format!("{} lists no training images", args.manifest.display())));
    }
    let mut stems = HashSet::new();
    for p in &train {
        if !stems.insert(stem(p)) {
            return Err(CliError::usage(format!("two training images share the name `{}`", stem(p))));
        }
    }
    manifest.check_paths()?;

    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let mut entries = Vec::with_capacity(train.len() * Flip::ALL.len());
    for path in &train {
        let img = load_image(path)?;
        let name = stem(path);
        for flip in Flip::ALL {
            let file = format!("{name}{}.png", flip.suffix());
            save_image(&img.flipped(flip), args.out.join(&file))?;
            entries.push(ManifestEntry { role: Role::Train, path: file.into() });
        }
    }
    let abs = |p: &std::path::Path| std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf());
    for e in manifest.entries.iter().filter(|e| e.role != Role::Train) {
        entries.push(ManifestEntry { role: e.role, path: abs(&e.path) });
    }
    let prepared = DatasetManifest { entries, scale: manifest.scale, augmented: true };
    let target = args.out.join(PREPARED_MANIFEST);
    std::fs::write(&target, prepared.to_text()).with_context(|| format!("writing {}", target.display()))?;

    let count = |r| prepared.paths(r).count();
    writeln!(
        out,
        "train_images={} augmented={} validation={} test={} manifest={}",
        train.len(),
        count(Role::Train),
        count(Role::Validation),
        count(Role::Test),
        target.display()
    )?;
    Ok(())
}
