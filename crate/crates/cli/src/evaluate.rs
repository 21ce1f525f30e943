use std::fmt::Write as _;
use std::io::Write;

use anyhow::Context;
use dcscn_core::metrics::{evaluate_bicubic, evaluate_model, EvalResult};
use dcscn_core::model::load_weights;

use crate::images::{list_images, load_named};
use crate::{CliError, CliResult, EvaluateArgs};

#[derive(Debug, Clone)]
pub struct DatasetScores {
    pub dataset: String,
    pub bicubic: EvalResult,
    pub model: Option<EvalResult>,
}

fn render(rows: &[DatasetScores]) -> String {
    let mut s = format!("{:<16} {:<8} {:>6} {:>9} {:>8}\n", "dataset", "method", "images", "psnr", "ssim");
    for r in rows {
        for (method, res) in std::iter::once(("bicubic", &r.bicubic)).chain(r.model.as_ref().map(|m| ("model", m))) {
            let _ = writeln!(s, "{:<16} {:<8} {:>6} {:>9.3} {:>8.4}", r.dataset, method, res.images.len(), res.mean_psnr, res.mean_ssim);
        }
    }
    for r in rows {
        for (method, res) in std::iter::once(("bicubic", &r.bicubic)).chain(r.model.as_ref().map(|m| ("model", m))) {
            for img in &res.images {
                let _ = writeln!(s, "dataset={} method={method} image={} psnr={:.6} ssim={:.6}", r.dataset, img.name, img.psnr, img.ssim);
            }
            let _ = writeln!(
                s,
                "dataset={} method={method} mean_psnr={:.6} mean_ssim={:.6} scale={} shave={}",
                r.dataset, res.mean_psnr, res.mean_ssim, res.scale, res.shave
            );
        }
    }
    s
}

/// Per-dataset mean Y-PSNR/SSIM of the model and of bicubic upscaling.
pub fn cmd_evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> CliResult<Vec<DatasetScores>> {
    let params = match &args.weights {
        Some(p) => Some(load_weights::<f32>(p).map_err(|e| CliError::usage(e.to_string()))?),
        None => None,
    };
    let s = match (&params, args.scale) {
        (Some(p), Some(a)) if a != p.config.scale => {
            return Err(CliError::usage(format!("weights are for scale {}, --scale asks for {a}", p.config.scale)))
        }
        (Some(p), _) => p.config.scale,
        (None, a) => a.unwrap_or(2),
    };
    if s < 2 {
        return Err(CliError::usage(format!("scale must be at least 2, got {s}")));
    }
    let mut listed = Vec::new();
    for dir in &args.datasets {
        let paths = list_images(dir)?;
        if paths.is_empty() {
            return Err(CliError::usage(format!("{} contains no images", dir.display())));
        }
        listed.push((dir, paths));
    }
    let mut rows = Vec::new();
    for (dir, paths) in listed {
        let images = load_named(&paths)?;
        let dataset = dir.file_name().map_or_else(|| dir.display().to_string(), |n| n.to_string_lossy().into_owned());
        let bicubic = evaluate_bicubic(&images, s)?;
        let model = params.as_ref().map(|p| evaluate_model(p, &images, s)).transpose()?;
        rows.push(DatasetScores { dataset, bicubic, model });
    }
    let text = render(&rows);
    out.write_all(text.as_bytes())?;
    if let Some(path) = &args.report {
        std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(rows)
}
