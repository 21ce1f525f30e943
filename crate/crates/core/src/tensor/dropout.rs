use rand::Rng;

use super::{Shape, Tensor};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Inverted-dropout mask: each entry is `0` or `1 / keep_prob`.
#[derive(Debug, Clone, PartialEq)]
pub struct DropoutMask<T> {
    scale: Tensor<T>,
}

impl<T: Scalar> DropoutMask<T> {
    pub fn sample<R: Rng + ?Sized>(shape: Shape, keep_prob: f64, rng: &mut R) -> Result<Self> {
        check_keep(keep_prob)?;
        let keep = T::from_f64_lossy(1.0 / keep_prob);
        let data = (0..shape.numel())
            .map(|_| if rng.random::<f64>() < keep_prob { keep } else { T::zero() })
            .collect();
        Ok(DropoutMask { scale: Tensor::new(shape, data)? })
    }

    /// Elementwise product; also the backward pass of the dropout itself.
    pub fn apply(&self, t: &Tensor<T>) -> Result<Tensor<T>> {
        t.zip_map(&self.scale, |a, m| a * m)
    }

    pub fn scales(&self) -> &Tensor<T> {
        &self.scale
    }
}

fn check_keep(keep_prob: f64) -> Result<()> {
    if !(keep_prob > 0.0 && keep_prob <= 1.0) {
        return Err(Error::invalid(format!("keep probability {keep_prob} outside (0, 1]")));
    }
    Ok(())
}

/// Inverted dropout. Identity at inference time or when `keep_prob == 1`.
pub fn dropout<T: Scalar, R: Rng + ?Sized>(input: &Tensor<T>, keep_prob: f64, training: bool, rng: &mut R) -> Result<Tensor<T>> {
    check_keep(keep_prob)?;
    if !training || keep_prob == 1.0 {
        return Ok(input.clone());
    }
    DropoutMask::sample(input.shape(), keep_prob, rng)?.apply(input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn keep_one_and_inference_are_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = Tensor::from_fn(Shape::new(1, 2, 3, 3), |_, c, y, w| (c * 9 + y * 3 + w) as f32);
        assert_eq!(dropout(&x, 1.0, true, &mut rng).unwrap(), x);
        assert_eq!(dropout(&x, 1.0, false, &mut rng).unwrap(), x);
        assert_eq!(dropout(&x, 0.3, false, &mut rng).unwrap(), x);
    }

    #[test]
    fn expectation_is_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let x = Tensor::<f32>::filled(Shape::new(1, 1, 1000, 1000), 1.0);
        let y = dropout(&x, 0.8, true, &mut rng).unwrap();
        let mean = y.data().iter().map(|&v| v as f64).sum::<f64>() / 1e6;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
        assert!(y.data().iter().all(|&v| v == 0.0 || v == 1.25));
    }

    #[test]
    fn keep_range_checked() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = Tensor::<f32>::zeros(Shape::new(1, 1, 1, 1));
        assert!(dropout(&x, 0.0, true, &mut rng).is_err());
        assert!(dropout(&x, 1.5, true, &mut rng).is_err());
    }
}
