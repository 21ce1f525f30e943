use super::{Shape, Tensor};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Stacks tensors along the channel axis in list order.
pub fn concat_channels<T: Scalar>(inputs: &[&Tensor<T>]) -> Result<Tensor<T>> {
    let first = inputs.first().ok_or_else(|| Error::invalid("concat of zero tensors"))?;
    let s = first.shape();
    for t in inputs {
        let o = t.shape();
        if o.batch != s.batch || o.height != s.height || o.width != s.width {
            return Err(Error::shape(format!("cannot concat {o} with {s}")));
        }
    }
    let channels = inputs.iter().map(|t| t.channels()).sum();
    let out_shape = Shape::new(s.batch, channels, s.height, s.width);
    let mut data = Vec::with_capacity(out_shape.numel());
    for n in 0..s.batch {
        for t in inputs {
            data.extend_from_slice(t.item(n));
        }
    }
    Tensor::new(out_shape, data)
}

/// Channels `start..start + len` of every batch item.
pub fn channel_slice<T: Scalar>(input: &Tensor<T>, start: usize, len: usize) -> Result<Tensor<T>> {
    let s = input.shape();
    if start + len > s.channels {
        return Err(Error::shape(format!("channel slice {start}+{len} exceeds {}", s.channels)));
    }
    let hw = s.spatial();
    let mut data = Vec::with_capacity(s.batch * len * hw);
    for n in 0..s.batch {
        data.extend_from_slice(&input.item(n)[start * hw..(start + len) * hw]);
    }
    Tensor::new(Shape::new(s.batch, len, s.height, s.width), data)
}

/// Inverse of [`concat_channels`] for the given channel counts.
pub fn split_channels<T: Scalar>(input: &Tensor<T>, sizes: &[usize]) -> Result<Vec<Tensor<T>>> {
    if sizes.iter().sum::<usize>() != input.channels() {
        return Err(Error::shape(format!("split {sizes:?} does not cover {} channels", input.channels())));
    }
    let mut start = 0;
    sizes
        .iter()
        .map(|&len| {
            let t = channel_slice(input, start, len);
            start += len;
            t
        })
        .collect()
}

/// Rearranges groups of `s²` channels into `s×s` spatial blocks.
///
/// Channel `g·s² + i·s + j` lands at sub-pixel `(i, j)` of output channel `g`.
pub fn depth_to_space<T: Scalar>(input: &Tensor<T>, s: usize) -> Result<Tensor<T>> {
    let sh = input.shape();
    if s == 0 || !sh.channels.is_multiple_of(s * s) {
        return Err(Error::shape(format!("{} channels not divisible by {s}²", sh.channels)));
    }
    let c_out = sh.channels / (s * s);
    let out_shape = Shape::new(sh.batch, c_out, sh.height * s, sh.width * s);
    let mut out = Tensor::zeros(out_shape);
    let ow = out_shape.width;
    let src = input.data();
    let dst = out.data_mut();
    for n in 0..sh.batch {
        for g in 0..c_out {
            for i in 0..s {
                for j in 0..s {
                    let c = g * s * s + i * s + j;
                    let plane = &src[((n * sh.channels + c) * sh.height) * sh.width..][..sh.spatial()];
                    let base = (n * c_out + g) * out_shape.spatial();
                    for y in 0..sh.height {
                        let row = base + (y * s + i) * ow + j;
                        for x in 0..sh.width {
                            dst[row + x * s] = plane[y * sh.width + x];
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Inverse of [`depth_to_space`].
pub fn space_to_depth<T: Scalar>(input: &Tensor<T>, s: usize) -> Result<Tensor<T>> {
    let sh = input.shape();
    if s == 0 || !sh.height.is_multiple_of(s) || !sh.width.is_multiple_of(s) {
        return Err(Error::shape(format!("{}x{} not divisible by {s}", sh.height, sh.width)));
    }
    let (h, w) = (sh.height / s, sh.width / s);
    let c_out = sh.channels * s * s;
    Ok(Tensor::from_fn(Shape::new(sh.batch, c_out, h, w), |n, c, y, x| {
        let (g, r) = (c / (s * s), c % (s * s));
        input.at(n, g, y * s + r / s, x * s + r % s)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ramp(shape: Shape) -> Tensor<f32> {
        let mut i = 0.0;
        Tensor::from_fn(shape, |_, _, _, _| {
            i += 1.0;
            i
        })
    }

    #[test]
    fn concat_single_is_identity() {
        let a = ramp(Shape::new(2, 3, 2, 2));
        assert_eq!(concat_channels(&[&a]).unwrap(), a);
    }

    #[test]
    fn concat_of_extractor_widths() {
        let parts: Vec<_> = [96, 76, 65, 55, 47, 39, 32].iter().map(|&c| Tensor::<f32>::zeros(Shape::new(1, c, 2, 2))).collect();
        let refs: Vec<_> = parts.iter().collect();
        assert_eq!(concat_channels(&refs).unwrap().channels(), 410);
    }

    #[test]
    fn concat_then_slice_recovers_parts() {
        let a = ramp(Shape::new(2, 3, 2, 3));
        let b = ramp(Shape::new(2, 2, 2, 3)).map(|v| -v);
        let ab = concat_channels(&[&a, &b]).unwrap();
        assert_eq!(channel_slice(&ab, 0, 3).unwrap(), a);
        assert_eq!(channel_slice(&ab, 3, 2).unwrap(), b);
        assert_eq!(split_channels(&ab, &[3, 2]).unwrap(), vec![a, b]);
    }

    #[test]
    fn concat_rejects_spatial_mismatch() {
        let a = Tensor::<f32>::zeros(Shape::new(1, 1, 2, 2));
        let b = Tensor::<f32>::zeros(Shape::new(1, 1, 2, 3));
        assert!(concat_channels(&[&a, &b]).is_err());
    }

    #[test]
    fn depth_to_space_corner_convention() {
        let t = Tensor::new(Shape::new(1, 4, 1, 1), vec![1.0f32, 2.0, 3.0, 4.0]).unwrap();
        let d = depth_to_space(&t, 2).unwrap();
        assert_eq!(d.shape(), Shape::new(1, 1, 2, 2));
        assert_eq!(d.data(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn depth_to_space_scale_one_is_identity() {
        let t = ramp(Shape::new(2, 3, 2, 4));
        assert_eq!(depth_to_space(&t, 1).unwrap(), t);
    }

    #[test]
    fn depth_to_space_rejects_bad_channels() {
        assert!(depth_to_space(&Tensor::<f32>::zeros(Shape::new(1, 3, 2, 2)), 2).is_err());
    }

    proptest! {
        #[test]
        fn depth_space_roundtrip(seed in any::<u32>(), s in 1usize..4, g in 1usize..3, h in 1usize..4, w in 1usize..4) {
            let t = Tensor::from_fn(Shape::new(2, g * s * s, h, w), |n, c, y, x| {
                ((seed as usize ^ (n * 131 + c * 17 + y * 7 + x)) % 1000) as f32
            });
            let back = space_to_depth(&depth_to_space(&t, s).unwrap(), s).unwrap();
            prop_assert_eq!(back, t);
        }
    }
}
