//! Separable bicubic resampling with the Keys cubic-convolution kernel.
//!
//! Sample positions use half-pixel centres, taps are clamped at the edges,
//! and on downscale the kernel is stretched by the inverse scale so the
//! filter also acts as an antialiasing low-pass.

use super::Plane;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const KEYS_A: f64 = -0.5;

/// Keys cubic convolution kernel with `a = -0.5`; support `(-2, 2)`.
pub fn keys_kernel(x: f64) -> f64 {
    let a = KEYS_A;
    let x = x.abs();
    if x <= 1.0 {
        ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a
    } else {
        0.0
    }
}

/// One axis worth of filter taps: `taps` (index, weight) pairs per output sample.
struct AxisFilter<T> {
    taps: usize,
    index: Vec<usize>,
    weight: Vec<T>,
}

impl<T: Scalar> AxisFilter<T> {
    fn new(in_len: usize, out_len: usize) -> Self {
        let scale = out_len as f64 / in_len as f64;
        let stretch = if scale < 1.0 { scale } else { 1.0 };
        let support = 2.0 / stretch;
        let taps = (2.0 * support).ceil() as usize + 2;
        let mut index = Vec::with_capacity(out_len * taps);
        let mut weight = Vec::with_capacity(out_len * taps);
        let mut w = vec![0.0f64; taps];
        for i in 0..out_len {
            let center = (i as f64 + 0.5) / scale - 0.5;
            let left = (center - support).floor() as i64;
            for (t, wt) in w.iter_mut().enumerate() {
                *wt = keys_kernel((center - (left + t as i64) as f64) * stretch);
            }
            let sum: f64 = w.iter().sum();
            for (t, &wt) in w.iter().enumerate() {
                let j = (left + t as i64).clamp(0, in_len as i64 - 1) as usize;
                index.push(j);
                weight.push(T::from_f64_lossy(wt / sum));
            }
        }
        AxisFilter { taps, index, weight }
    }

    #[inline]
    fn apply(&self, i: usize, fetch: impl Fn(usize) -> T) -> T {
        let r = i * self.taps..(i + 1) * self.taps;
        self.index[r.clone()].iter().zip(&self.weight[r]).fold(T::zero(), |acc, (&j, &w)| acc + w * fetch(j))
    }
}

/// Resizes a plane to `out_h × out_w`.
pub fn bicubic_resize<T: Scalar>(input: &Plane<T>, out_h: usize, out_w: usize) -> Result<Plane<T>> {
    if out_h == 0 || out_w == 0 {
        return Err(Error::invalid(format!("target size {out_h}x{out_w} must be positive")));
    }
    let (h, w) = (input.height(), input.width());
    if h == 0 || w == 0 {
        return Err(Error::invalid("cannot resize an empty plane"));
    }
    let fx = AxisFilter::<T>::new(w, out_w);
    let fy = AxisFilter::<T>::new(h, out_h);

    let mut horiz = Vec::with_capacity(h * out_w);
    for y in 0..h {
        let row = input.row(y);
        for x in 0..out_w {
            horiz.push(fx.apply(x, |j| row[j]));
        }
    }
    let mut out = Vec::with_capacity(out_h * out_w);
    for y in 0..out_h {
        for x in 0..out_w {
            out.push(fy.apply(y, |j| horiz[j * out_w + x]));
        }
    }
    Plane::new(out_h, out_w, out)
}
