use super::{psnr, ssim};
use crate::data::{luma_from_rgb, RgbImage, SamplePair};
use crate::error::{Error, Result};
use crate::model::{forward, ModelParams};
use crate::tensor::{bicubic_resize, Plane, Tensor};

#[derive(Debug, Clone, PartialEq)]
pub struct ImageScore {
    pub name: String,
    pub psnr: f64,
    pub ssim: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub images: Vec<ImageScore>,
    pub mean_psnr: f64,
    pub mean_ssim: f64,
    pub shave: usize,
    pub scale: usize,
}

impl EvalResult {
    fn from_scores(images: Vec<ImageScore>, scale: usize) -> Self {
        let n = images.len() as f64;
        let mean_psnr = images.iter().map(|s| s.psnr).sum::<f64>() / n;
        let mean_ssim = images.iter().map(|s| s.ssim).sum::<f64>() / n;
        EvalResult { images, mean_psnr, mean_ssim, shave: scale, scale }
    }
}

/// Evaluates an arbitrary LR→HR upscaler on the Y channel.
///
/// Per image: Y in `[0,1]` → crop to a multiple of `s` → downscale → upscale
/// → clip to `[0,1]` → PSNR/SSIM on the 0–255 scale with `shave = s`.
pub fn evaluate_with(
    images: &[(String, RgbImage)],
    s: usize,
    mut upscale: impl FnMut(&Plane<f32>) -> Result<Plane<f32>>,
) -> Result<EvalResult> {
    if images.is_empty() {
        return Err(Error::invalid("no images to evaluate"));
    }
    let mut scores = Vec::with_capacity(images.len());
    for (name, img) in images {
        let pair = SamplePair::from_image(&luma_from_rgb(img), s, name.clone())?;
        let sr = upscale(&pair.lr)?;
        let sr = sr.clamped(0.0, 1.0).map(|v| v * 255.0);
        let hr = pair.hr.map(|v| v * 255.0);
        scores.push(ImageScore { name: name.clone(), psnr: psnr(&sr, &hr, s)?, ssim: ssim(&sr, &hr, s)? });
    }
    Ok(EvalResult::from_scores(scores, s))
}

pub fn evaluate_model(params: &ModelParams<f32>, images: &[(String, RgbImage)], s: usize) -> Result<EvalResult> {
    if params.config.scale != s {
        return Err(Error::invalid(format!("model scale {} does not match {s}", params.config.scale)));
    }
    evaluate_with(images, s, |lr| Ok(forward(params, &Tensor::from_planes(&[lr])?)?.plane(0, 0)))
}

/// The bicubic baseline under the identical protocol.
pub fn evaluate_bicubic(images: &[(String, RgbImage)], s: usize) -> Result<EvalResult> {
    evaluate_with(images, s, |lr| bicubic_resize(lr, lr.height() * s, lr.width() * s))
}
