use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::Context;
use dcscn_core::data::{augment_flips, extract_patches, load_image, luma_from_rgb, DatasetManifest, Role, SamplePair};
use dcscn_core::model::save_weights;
use dcscn_core::training::{train_with, TrainReport};

use crate::config::{sidecar, RunConfig, TrainSource};
use crate::images::{list_images, stem};
use crate::{CliError, CliResult, TrainArgs};

struct Dataset {
    train: Vec<PathBuf>,
    validation: Vec<PathBuf>,
}

fn gather(rc: &RunConfig) -> CliResult<Dataset> {
    let (train, mut validation) = match &rc.source {
        TrainSource::Manifest(path) => {
            let m = DatasetManifest::load(path).map_err(|e| CliError::usage(e.to_string()))?;
            if let Some(s) = m.scale.filter(|&s| s != rc.model.scale) {
                return Err(CliError::usage(format!("manifest was prepared for scale {s}, training scale is {}", rc.model.scale)));
            }
            m.check_paths().map_err(|e| CliError::usage(e.to_string()))?;
            let owned = |r| m.paths(r).map(|p| p.to_path_buf()).collect::<Vec<_>>();
            (owned(Role::Train), owned(Role::Validation))
        }
        TrainSource::Directory(dir) => (list_images(dir)?, Vec::new()),
    };
    if let Some(dir) = &rc.validation_dir {
        validation = list_images(dir)?;
    }
    if train.is_empty() {
        return Err(CliError::usage("no training images"));
    }
    if validation.is_empty() {
        return Err(CliError::usage("no validation images: add validation entries or pass --validation-dir"));
    }
    Ok(Dataset { train, validation })
}

fn training_pairs(rc: &RunConfig, paths: &[PathBuf]) -> CliResult<Vec<SamplePair<f32>>> {
    let mut images = paths.iter().map(|p| Ok((stem(p), load_image(p)?))).collect::<CliResult<Vec<_>>>()?;
    if rc.augment {
        let names: Vec<_> = images.iter().map(|(n, _)| n.clone()).collect();
        let flipped = augment_flips(&images.into_iter().map(|(_, i)| i).collect::<Vec<_>>());
        images = flipped.into_iter().enumerate().map(|(i, img)| (format!("{}#{}", names[i / 4], i % 4), img)).collect();
    }
    let mut pairs = Vec::new();
    for (name, img) in &images {
        let y = luma_from_rgb(img);
        match extract_patches(&y, rc.model.scale, rc.patch_size, rc.patch_stride, name) {
            Ok(p) => pairs.extend(p),
            // Images too small for a single patch contribute nothing.
            Err(dcscn_core::Error::InvalidArgument(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    if pairs.is_empty() {
        return Err(CliError::usage(format!("no training image is large enough for {} patches", rc.patch_size)));
    }
    Ok(pairs)
}

fn validation_pairs(rc: &RunConfig, paths: &[PathBuf]) -> CliResult<Vec<SamplePair<f32>>> {
    paths
        .iter()
        .map(|p| Ok(SamplePair::from_image(&luma_from_rgb(&load_image(p)?), rc.model.scale, stem(p))?))
        .collect()
}

/// Trains per the resolved configuration; writes the best-validation weights,
/// a `<weights>.manifest` sidecar (best epoch, its validation loss, final lr) and one progress line per epoch.
pub fn cmd_train(args: &TrainArgs, out: &mut dyn Write) -> CliResult<TrainReport> {
    let rc = RunConfig::resolve(args)?;
    let data = gather(&rc)?;
    let train = training_pairs(&rc, &data.train)?;
    let validation = validation_pairs(&rc, &data.validation)?;
    writeln!(
        out,
        "preset={} scale={} train_images={} patches={} validation_images={} seed={}",
        rc.preset,
        rc.model.scale,
        data.train.len(),
        train.len(),
        validation.len(),
        rc.train.seed
    )?;

    let mut log = BufWriter::new(File::create(&rc.report).with_context(|| format!("creating {}", rc.report.display()))?);
    let mut io_err = None;
    let result = train_with(&rc.model, &rc.train, &train, &validation, |rec| {
        let line = rec.to_line();
        let w = writeln!(out, "{line}").and_then(|_| writeln!(log, "{line}")).and_then(|_| log.flush());
        if let Err(e) = w {
            io_err.get_or_insert(e);
        }
    });
    if let Some(e) = io_err {
        return Err(anyhow::Error::from(e).context("writing progress").into());
    }
    let (params, report) = result.context("training failed")?;

    save_weights(&params, &rc.weights)?;
    let meta = format!(
        "preset={}\nscale={}\nseed={}\nepoch={}\nval_loss={:.8e}\nepochs={}\nsteps={}\nstop_reason={}\nlr={:e}\nwall_clock_s={:.1}\n",
        rc.preset,
        rc.model.scale,
        rc.train.seed,
        report.best_epoch,
        report.best_val_loss,
        report.epochs.len(),
        report.steps,
        report.stop_reason.as_str(),
        report.epochs.last().map_or(rc.train.lr_initial, |e| e.lr),
        report.wall_clock.as_secs_f64(),
    );
    let meta_path = sidecar(&rc.weights, "manifest");
    std::fs::write(&meta_path, &meta).with_context(|| format!("writing {}", meta_path.display()))?;
    let summary = format!("done {} weights={}", meta.trim_end().replace('\n', " "), rc.weights.display());
    writeln!(out, "{summary}")?;
    writeln!(log, "{summary}")?;
    log.flush()?;
    Ok(report)
}
