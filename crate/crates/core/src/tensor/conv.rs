//! Stride-1 zero same-padded convolution (cross-correlation, no kernel flip).
//!
//! Each batch item is lowered to an im2col matrix in row bands and multiplied
//! against the weight matrix; 1×1 kernels skip the lowering entirely.

use rayon::prelude::*;

use super::{Shape, Tensor};
use crate::error::{Error, Result};
use crate::scalar::{Scalar, Strides};

/// Upper bound on im2col band size, in elements.
const BAND_ELEMS: usize = 1 << 21;

/// Weights of one convolution plus its optional bias and PReLU slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayerParams<T> {
    /// `(out_channels, in_channels, kernel_h, kernel_w)`.
    pub weights: Tensor<T>,
    pub bias: Option<Vec<T>>,
    pub prelu_slopes: Option<Vec<T>>,
}

impl<T: Scalar> ConvLayerParams<T> {
    pub fn new(weights: Tensor<T>, bias: Option<Vec<T>>, prelu_slopes: Option<Vec<T>>) -> Result<Self> {
        let p = ConvLayerParams { weights, bias, prelu_slopes };
        p.validate()?;
        Ok(p)
    }

    pub fn zeros(out_channels: usize, in_channels: usize, kernel: usize, bias: bool, prelu: bool) -> Self {
        ConvLayerParams {
            weights: Tensor::zeros(Shape::new(out_channels, in_channels, kernel, kernel)),
            bias: bias.then(|| vec![T::zero(); out_channels]),
            prelu_slopes: prelu.then(|| vec![T::zero(); out_channels]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.weights.shape();
        if s.height.is_multiple_of(2) || s.width.is_multiple_of(2) {
            return Err(Error::invalid(format!("kernel {}x{} must be odd", s.height, s.width)));
        }
        for (name, v) in [("bias", &self.bias), ("prelu slopes", &self.prelu_slopes)] {
            if let Some(v) = v {
                if v.len() != s.batch {
                    return Err(Error::shape(format!("{name} length {} != out channels {}", v.len(), s.batch)));
                }
            }
        }
        Ok(())
    }

    pub fn out_channels(&self) -> usize {
        self.weights.shape().batch
    }

    pub fn in_channels(&self) -> usize {
        self.weights.shape().channels
    }

    pub fn kernel_h(&self) -> usize {
        self.weights.shape().height
    }

    pub fn kernel_w(&self) -> usize {
        self.weights.shape().width
    }

    fn is_pointwise(&self) -> bool {
        self.kernel_h() == 1 && self.kernel_w() == 1
    }

    /// Rows of the lowered patch matrix: `in_channels * kh * kw`.
    fn patch_len(&self) -> usize {
        self.in_channels() * self.kernel_h() * self.kernel_w()
    }
}

/// Gradients of `sum(upstream ⊙ conv2d(input, params))`.
#[derive(Debug, Clone)]
pub struct ConvGrads<T> {
    pub input: Tensor<T>,
    pub weights: Tensor<T>,
    pub bias: Vec<T>,
}

fn check_input<T: Scalar>(input: &Tensor<T>, params: &ConvLayerParams<T>) -> Result<()> {
    params.validate()?;
    if input.channels() != params.in_channels() {
        return Err(Error::shape(format!(
            "conv expects {} input channels, got {}",
            params.in_channels(),
            input.channels()
        )));
    }
    Ok(())
}

fn band_rows(patch_len: usize, height: usize, width: usize) -> usize {
    (BAND_ELEMS / (patch_len * width).max(1)).clamp(1, height.max(1))
}

/// Writes the patch matrix for output rows `r0..r1` into `cols`
/// (`patch_len` rows × `(r1 - r0) * width` columns).
#[allow(clippy::too_many_arguments)]
fn im2col<T: Scalar>(
    x: &[T],
    channels: usize,
    height: usize,
    width: usize,
    kh: usize,
    kw: usize,
    r0: usize,
    r1: usize,
    cols: &mut [T],
) {
    let (ph, pw) = ((kh / 2) as isize, (kw / 2) as isize);
    let n = (r1 - r0) * width;
    let mut row = 0;
    for c in 0..channels {
        let src = &x[c * height * width..(c + 1) * height * width];
        for ky in 0..kh {
            for kx in 0..kw {
                let dst = &mut cols[row * n..(row + 1) * n];
                let dx = kx as isize - pw;
                for y in r0..r1 {
                    let out = &mut dst[(y - r0) * width..(y - r0 + 1) * width];
                    let sy = y as isize + ky as isize - ph;
                    if sy < 0 || sy >= height as isize {
                        out.fill(T::zero());
                        continue;
                    }
                    let src_row = &src[sy as usize * width..(sy as usize + 1) * width];
                    // valid x: 0 <= x + dx < width
                    let lo = (-dx).clamp(0, width as isize) as usize;
                    let hi = (width as isize - dx).clamp(0, width as isize) as usize;
                    out[..lo].fill(T::zero());
                    out[hi.max(lo)..].fill(T::zero());
                    if hi > lo {
                        let s0 = (lo as isize + dx) as usize;
                        out[lo..hi].copy_from_slice(&src_row[s0..s0 + (hi - lo)]);
                    }
                }
                row += 1;
            }
        }
    }
}

/// Scatter-adds a patch-matrix gradient back onto the input gradient.
#[allow(clippy::too_many_arguments)]
fn col2im_add<T: Scalar>(
    cols: &[T],
    channels: usize,
    height: usize,
    width: usize,
    kh: usize,
    kw: usize,
    r0: usize,
    r1: usize,
    gx: &mut [T],
) {
    let (ph, pw) = ((kh / 2) as isize, (kw / 2) as isize);
    let n = (r1 - r0) * width;
    let mut row = 0;
    for c in 0..channels {
        let dst = &mut gx[c * height * width..(c + 1) * height * width];
        for ky in 0..kh {
            for kx in 0..kw {
                let src = &cols[row * n..(row + 1) * n];
                let dx = kx as isize - pw;
                for y in r0..r1 {
                    let sy = y as isize + ky as isize - ph;
                    if sy < 0 || sy >= height as isize {
                        continue;
                    }
                    let lo = (-dx).clamp(0, width as isize) as usize;
                    let hi = (width as isize - dx).clamp(0, width as isize) as usize;
                    if hi <= lo {
                        continue;
                    }
                    let s0 = (lo as isize + dx) as usize;
                    let d = &mut dst[sy as usize * width + s0..sy as usize * width + s0 + (hi - lo)];
                    let s = &src[(y - r0) * width + lo..(y - r0) * width + hi];
                    for (a, &b) in d.iter_mut().zip(s) {
                        *a += b;
                    }
                }
                row += 1;
            }
        }
    }
}

/// Same-padded stride-1 cross-correlation plus bias. PReLU is not applied.
pub fn conv2d<T: Scalar>(input: &Tensor<T>, params: &ConvLayerParams<T>) -> Result<Tensor<T>> {
    check_input(input, params)?;
    let s = input.shape();
    let (c_out, c_in) = (params.out_channels(), params.in_channels());
    let (kh, kw) = (params.kernel_h(), params.kernel_w());
    let hw = s.spatial();
    let k = params.patch_len();
    let w = params.weights.data();
    let mut out = Tensor::zeros(Shape::new(s.batch, c_out, s.height, s.width));
    if hw == 0 || s.batch == 0 {
        return Ok(out);
    }

    out.data_mut().par_chunks_mut(c_out * hw).enumerate().for_each(|(b, y)| {
        let x = input.item(b);
        if params.is_pointwise() {
            T::gemm(c_out, c_in, hw, T::one(), w, Strides::row_major(c_in), x, Strides::row_major(hw), T::zero(), y, Strides::row_major(hw));
        } else {
            let rows = band_rows(k, s.height, s.width);
            let mut cols = vec![T::zero(); k * rows * s.width];
            let mut r0 = 0;
            while r0 < s.height {
                let r1 = (r0 + rows).min(s.height);
                let n = (r1 - r0) * s.width;
                im2col(x, c_in, s.height, s.width, kh, kw, r0, r1, &mut cols[..k * n]);
                T::gemm(
                    c_out,
                    k,
                    n,
                    T::one(),
                    w,
                    Strides::row_major(k),
                    &cols[..k * n],
                    Strides::row_major(n),
                    T::zero(),
                    &mut y[r0 * s.width..],
                    Strides { row: hw as isize, col: 1 },
                );
                r0 = r1;
            }
        }
        if let Some(bias) = &params.bias {
            for (plane, &bv) in y.chunks_mut(hw).zip(bias) {
                for v in plane {
                    *v += bv;
                }
            }
        }
    });
    Ok(out)
}

/// Analytic gradients of the convolution with respect to input, weights and bias.
///
/// Per-item weight gradients are reduced in batch order, so results do not
/// depend on how many threads ran the items.
pub fn conv2d_grad<T: Scalar>(
    input: &Tensor<T>,
    params: &ConvLayerParams<T>,
    upstream: &Tensor<T>,
) -> Result<ConvGrads<T>> {
    check_input(input, params)?;
    let s = input.shape();
    let (c_out, c_in) = (params.out_channels(), params.in_channels());
    let (kh, kw) = (params.kernel_h(), params.kernel_w());
    upstream.expect_shape(Shape::new(s.batch, c_out, s.height, s.width))?;
    let hw = s.spatial();
    let k = params.patch_len();
    let w = params.weights.data();

    let mut grad_input = Tensor::zeros(s);
    let mut grad_w = Tensor::zeros(params.weights.shape());
    let mut grad_b = vec![T::zero(); c_out];
    if hw == 0 || s.batch == 0 {
        return Ok(ConvGrads { input: grad_input, weights: grad_w, bias: grad_b });
    }

    let partials: Vec<Vec<T>> = grad_input
        .data_mut()
        .par_chunks_mut(c_in * hw)
        .enumerate()
        .map(|(b, gx)| {
            let x = input.item(b);
            let up = upstream.item(b);
            let mut gw = vec![T::zero(); c_out * k];
            if params.is_pointwise() {
                // gW = up · xᵀ ; gx = Wᵀ · up
                T::gemm(c_out, hw, c_in, T::one(), up, Strides::row_major(hw), x, Strides::transposed(hw), T::zero(), &mut gw, Strides::row_major(c_in));
                T::gemm(c_in, c_out, hw, T::one(), w, Strides::transposed(c_in), up, Strides::row_major(hw), T::zero(), gx, Strides::row_major(hw));
            } else {
                let rows = band_rows(k, s.height, s.width);
                let mut cols = vec![T::zero(); k * rows * s.width];
                let mut gcols = vec![T::zero(); k * rows * s.width];
                let mut r0 = 0;
                while r0 < s.height {
                    let r1 = (r0 + rows).min(s.height);
                    let n = (r1 - r0) * s.width;
                    let up_band = &up[r0 * s.width..];
                    let up_strides = Strides { row: hw as isize, col: 1 };
                    im2col(x, c_in, s.height, s.width, kh, kw, r0, r1, &mut cols[..k * n]);
                    T::gemm(c_out, n, k, T::one(), up_band, up_strides, &cols[..k * n], Strides::transposed(n), T::one(), &mut gw, Strides::row_major(k));
                    T::gemm(k, c_out, n, T::one(), w, Strides::transposed(k), up_band, up_strides, T::zero(), &mut gcols[..k * n], Strides::row_major(n));
                    col2im_add(&gcols[..k * n], c_in, s.height, s.width, kh, kw, r0, r1, gx);
                    r0 = r1;
                }
            }
            gw
        })
        .collect();

    for gw in &partials {
        for (a, &b) in grad_w.data_mut().iter_mut().zip(gw) {
            *a += b;
        }
    }
    for b in 0..s.batch {
        for (co, plane) in upstream.item(b).chunks(hw).enumerate() {
            grad_b[co] += plane.iter().copied().sum::<T>();
        }
    }
    Ok(ConvGrads { input: grad_input, weights: grad_w, bias: grad_b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tensor(shape: Shape, rng: &mut ChaCha8Rng) -> Tensor<f64> {
        Tensor::from_fn(shape, |_, _, _, _| rng.random_range(-1.0..1.0))
    }

    fn random_params(out: usize, inp: usize, k: usize, bias: bool, rng: &mut ChaCha8Rng) -> ConvLayerParams<f64> {
        let weights = random_tensor(Shape::new(out, inp, k, k), rng);
        let bias = bias.then(|| (0..out).map(|_| rng.random_range(-1.0..1.0)).collect());
        ConvLayerParams::new(weights, bias, None).unwrap()
    }

    /// Direct quadruple loop, zero padding, no flip.
    fn direct_conv(x: &Tensor<f64>, p: &ConvLayerParams<f64>) -> Tensor<f64> {
        let s = x.shape();
        let (kh, kw) = (p.kernel_h() as isize, p.kernel_w() as isize);
        Tensor::from_fn(Shape::new(s.batch, p.out_channels(), s.height, s.width), |n, co, y, xx| {
            let mut acc = p.bias.as_ref().map_or(0.0, |b| b[co]);
            for ci in 0..s.channels {
                for ky in 0..kh {
                    for kx in 0..kw {
                        let sy = y as isize + ky - kh / 2;
                        let sx = xx as isize + kx - kw / 2;
                        if sy >= 0 && sx >= 0 && (sy as usize) < s.height && (sx as usize) < s.width {
                            acc += p.weights.at(co, ci, ky as usize, kx as usize) * x.at(n, ci, sy as usize, sx as usize);
                        }
                    }
                }
            }
            acc
        })
    }

    #[test]
    fn pointwise_scaling() {
        let x = Tensor::<f32>::filled(Shape::new(1, 1, 4, 4), 1.0);
        let w = Tensor::filled(Shape::new(3, 1, 1, 1), 2.0);
        let y = conv2d(&x, &ConvLayerParams::new(w, None, None).unwrap()).unwrap();
        assert_eq!(y.shape(), Shape::new(1, 3, 4, 4));
        assert!(y.data().iter().all(|&v| v == 2.0));
    }

    #[test]
    fn box_kernel_counts_padding_overlap() {
        let x = Tensor::<f32>::filled(Shape::new(1, 1, 3, 3), 1.0);
        let w = Tensor::filled(Shape::new(1, 1, 3, 3), 1.0);
        let y = conv2d(&x, &ConvLayerParams::new(w, None, None).unwrap()).unwrap();
        assert_eq!(y.data(), &[4.0, 6.0, 4.0, 6.0, 9.0, 6.0, 4.0, 6.0, 4.0]);
    }

    #[test]
    fn matches_direct_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (k, bias) in [(3, false), (3, true), (1, true), (5, false)] {
            let x = random_tensor(Shape::new(2, 3, 5, 5), &mut rng);
            let p = random_params(4, 3, k, bias, &mut rng);
            let got = conv2d(&x, &p).unwrap();
            let want = direct_conv(&x, &p);
            for (a, b) in got.data().iter().zip(want.data()) {
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn banded_lowering_matches_single_band() {
        // Tall enough input to force several im2col bands.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_tensor(Shape::new(1, 64, 80, 64), &mut rng);
        let p = random_params(2, 64, 3, true, &mut rng);
        assert!(band_rows(p.patch_len(), 80, 64) < 80);
        let got = conv2d(&x, &p).unwrap();
        let want = direct_conv(&x, &p);
        for (a, b) in got.data().iter().zip(want.data()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_channel_mismatch_and_even_kernel() {
        let x = Tensor::<f32>::zeros(Shape::new(1, 2, 4, 4));
        let p = ConvLayerParams::<f32>::zeros(1, 3, 3, false, false);
        assert!(matches!(conv2d(&x, &p), Err(Error::Shape(_))));
        let even = Tensor::<f32>::zeros(Shape::new(1, 2, 2, 2));
        assert!(ConvLayerParams::new(even, None, None).is_err());
        let short_bias = ConvLayerParams::new(Tensor::<f32>::zeros(Shape::new(2, 1, 3, 3)), Some(vec![0.0]), None);
        assert!(short_bias.is_err());
    }

    #[test]
    fn zero_upstream_gives_zero_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_tensor(Shape::new(1, 3, 4, 4), &mut rng);
        let p = random_params(2, 3, 3, true, &mut rng);
        let g = conv2d_grad(&x, &p, &Tensor::zeros(Shape::new(1, 2, 4, 4))).unwrap();
        assert!(g.input.data().iter().chain(g.weights.data()).chain(&g.bias).all(|&v| v == 0.0));
    }

    #[test]
    fn identity_pointwise_passes_upstream_through() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_tensor(Shape::new(2, 3, 4, 5), &mut rng);
        let w = Tensor::from_fn(Shape::new(3, 3, 1, 1), |o, i, _, _| if o == i { 1.0 } else { 0.0 });
        let p = ConvLayerParams::new(w, None, None).unwrap();
        let up = random_tensor(Shape::new(2, 3, 4, 5), &mut rng);
        let g = conv2d_grad(&x, &p, &up).unwrap();
        assert_eq!(g.input.data(), up.data());
    }

    #[test]
    fn upstream_shape_is_checked() {
        let x = Tensor::<f32>::zeros(Shape::new(1, 1, 4, 4));
        let p = ConvLayerParams::<f32>::zeros(2, 1, 3, true, false);
        assert!(conv2d_grad(&x, &p, &Tensor::zeros(Shape::new(1, 1, 4, 4))).is_err());
    }

    #[test]
    fn gradients_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_tensor(Shape::new(2, 3, 5, 6), &mut rng);
        let p = random_params(2, 3, 3, true, &mut rng);
        let up = random_tensor(Shape::new(2, 2, 5, 6), &mut rng);
        let g = conv2d_grad(&x, &p, &up).unwrap();
        let objective = |x: &Tensor<f64>, p: &ConvLayerParams<f64>| -> f64 {
            conv2d(x, p).unwrap().data().iter().zip(up.data()).map(|(a, b)| a * b).sum()
        };
        let h = 1e-3;
        let close = |a: f64, n: f64| (a - n).abs() <= 1e-3 * a.abs().max(n.abs()).max(1e-2);
        for i in 0..x.len() {
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp.data_mut()[i] += h;
            xm.data_mut()[i] -= h;
            let num = (objective(&xp, &p) - objective(&xm, &p)) / (2.0 * h);
            assert!(close(g.input.data()[i], num));
        }
        for i in 0..p.weights.len() {
            let (mut pp, mut pm) = (p.clone(), p.clone());
            pp.weights.data_mut()[i] += h;
            pm.weights.data_mut()[i] -= h;
            let num = (objective(&x, &pp) - objective(&x, &pm)) / (2.0 * h);
            assert!(close(g.weights.data()[i], num));
        }
        for i in 0..2 {
            let (mut pp, mut pm) = (p.clone(), p.clone());
            pp.bias.as_mut().unwrap()[i] += h;
            pm.bias.as_mut().unwrap()[i] -= h;
            let num = (objective(&x, &pp) - objective(&x, &pm)) / (2.0 * h);
            assert!(close(g.bias[i], num));
        }
    }
}
