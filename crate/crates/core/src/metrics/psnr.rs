use super::shaved_pair;
use crate::error::Result;
use crate::scalar::Scalar;
use crate::tensor::Plane;

/// PSNR in dB for values on the 0–255 scale; `+∞` for identical inputs.
pub fn psnr<T: Scalar>(a: &Plane<T>, b: &Plane<T>, shave: usize) -> Result<f64> {
    let (a, b) = shaved_pair(a, b, shave)?;
    let n = a.data().len() as f64;
    let sse: f64 = a.data().iter().zip(b.data()).map(|(x, y)| (x - y) * (x - y)).sum();
    if sse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0 * 255.0 / (sse / n)).log10())
}
