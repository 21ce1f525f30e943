use std::io::Write;

use dcscn_core::data::{load_image, rgb_to_ycbcr, save_image, ycbcr_to_rgb, RgbImage, YCbCr};
use dcscn_core::model::{forward, load_weights};
use dcscn_core::tensor::{bicubic_resize, Plane, Tensor};
use dcscn_core::ModelParams32;

use crate::{CliError, CliResult, UpscaleArgs};

pub enum Upscaler {
    Bicubic,
    Model(Box<ModelParams32>),
}

impl Upscaler {
    /// Luma in `[0, 1]` to the `s×` grid, clipped to `[0, 1]`.
    pub fn luma(&self, y: &Plane<f32>, s: usize) -> dcscn_core::Result<Plane<f32>> {
        let up = match self {
            Upscaler::Bicubic => bicubic_resize(y, y.height() * s, y.width() * s)?,
            Upscaler::Model(p) => forward(p, &Tensor::from_planes(&[y])?)?.plane(0, 0),
        };
        Ok(up.clamped(0.0, 1.0))
    }
}

/// Y through the upscaler, Cb/Cr bicubic (fixed at 128 for gray input).
pub fn upscale_image(img: &RgbImage, upscaler: &Upscaler, s: usize) -> dcscn_core::Result<RgbImage> {
    let ycc = rgb_to_ycbcr(img);
    let (oh, ow) = (img.height() * s, img.width() * s);
    let y = upscaler.luma(&ycc.y.map(|v| v / 255.0), s)?.map(|v| v * 255.0);
    let (cb, cr) = if img.is_gray() {
        (Plane::filled(oh, ow, 128.0), Plane::filled(oh, ow, 128.0))
    } else {
        (bicubic_resize(&ycc.cb, oh, ow)?, bicubic_resize(&ycc.cr, oh, ow)?)
    };
    ycbcr_to_rgb(&YCbCr { y, cb, cr })
}

pub fn cmd_upscale(args: &UpscaleArgs, out: &mut dyn Write) -> CliResult {
    let (upscaler, s) = match &args.weights {
        Some(path) => {
            let params = load_weights::<f32>(path).map_err(|e| CliError::usage(e.to_string()))?;
            let s = params.config.scale;
            if args.scale.is_some_and(|a| a != s) {
                return Err(CliError::usage(format!("weights are for scale {s}, --scale asks for {}", args.scale.unwrap_or(0))));
            }
            (Upscaler::Model(Box::new(params)), s)
        }
        None => (Upscaler::Bicubic, args.scale.unwrap_or(2)),
    };
    if s < 2 {
        return Err(CliError::usage(format!("scale must be at least 2, got {s}")));
    }
    let img = load_image(&args.input)?;
    let hr = upscale_image(&img, &upscaler, s)?;
    save_image(&hr, &args.output)?;
    writeln!(out, "input={}x{} output={}x{} scale={s} path={}", img.width(), img.height(), hr.width(), hr.height(), args.output.display())?;
    Ok(())
}
