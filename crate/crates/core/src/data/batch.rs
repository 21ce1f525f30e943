use rand::seq::SliceRandom;
use rand::Rng;

use super::patches::SamplePair;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

#[derive(Debug, Clone)]
pub struct Batch<T> {
    pub lr: Tensor<T>,
    pub hr: Tensor<T>,
    /// Sample indices in batch order.
    pub indices: Vec<usize>,
}

/// Shuffled index chunks for one epoch; the last chunk may be short.
pub fn epoch_order<R: Rng + ?Sized>(n: usize, batch_size: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.chunks(batch_size.max(1)).map(<[usize]>::to_vec).collect()
}

pub struct BatchStream<'a, T> {
    samples: &'a [SamplePair<T>],
    chunks: std::vec::IntoIter<Vec<usize>>,
}

impl<T: Scalar> Iterator for BatchStream<'_, T> {
    type Item = Result<Batch<T>>;

    fn next(&mut self) -> Option<Self::Item> {
        let indices = self.chunks.next()?;
        let lr: Vec<_> = indices.iter().map(|&i| &self.samples[i].lr).collect();
        let hr: Vec<_> = indices.iter().map(|&i| &self.samples[i].hr).collect();
        Some(Tensor::from_planes(&lr).and_then(|lr| Ok(Batch { lr, hr: Tensor::from_planes(&hr)?, indices })))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.chunks.size_hint()
    }
}

/// One epoch of shuffled mini-batches, shuffled with `rng`.
pub fn batches<'a, T: Scalar, R: Rng + ?Sized>(
    samples: &'a [SamplePair<T>],
    batch_size: usize,
    rng: &mut R,
) -> Result<BatchStream<'a, T>> {
    if samples.is_empty() {
        return Err(Error::invalid("no samples to batch"));
    }
    if batch_size == 0 {
        return Err(Error::invalid("batch size must be positive"));
    }
    Ok(BatchStream { samples, chunks: epoch_order(samples.len(), batch_size, rng).into_iter() })
}
