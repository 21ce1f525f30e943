//! Y-channel PSNR/SSIM with border shaving and dataset evaluation.

mod evaluate;
mod psnr;
mod ssim;

pub use evaluate::{evaluate_bicubic, evaluate_model, evaluate_with, EvalResult, ImageScore};
pub use psnr::psnr;
pub use ssim::{ssim, SSIM_K1, SSIM_K2, SSIM_SIGMA, SSIM_WINDOW};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Plane;

/// Shaved copies of both planes, as f64.
pub(crate) fn shaved_pair<T: Scalar>(a: &Plane<T>, b: &Plane<T>, shave: usize) -> Result<(Plane<f64>, Plane<f64>)> {
    if a.height() != b.height() || a.width() != b.width() {
        return Err(Error::shape(format!(
            "cannot compare {}x{} with {}x{}",
            a.height(),
            a.width(),
            b.height(),
            b.width()
        )));
    }
    if 2 * shave >= a.height() || 2 * shave >= a.width() {
        return Err(Error::invalid(format!("shave {shave} leaves nothing of {}x{}", a.height(), a.width())));
    }
    let (h, w) = (a.height() - 2 * shave, a.width() - 2 * shave);
    Ok((a.crop(shave, shave, h, w)?.cast(), b.crop(shave, shave, h, w)?.cast()))
}
