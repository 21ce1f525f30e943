use super::Tensor;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn check_slopes<T: Scalar>(input: &Tensor<T>, slopes: &[T]) -> Result<()> {
    if slopes.len() != input.channels() {
        return Err(Error::shape(format!(
            "prelu has {} slopes for {} channels",
            slopes.len(),
            input.channels()
        )));
    }
    Ok(())
}

/// Per-channel parametric ReLU: `x` for `x >= 0`, `slope[c] * x` otherwise.
pub fn prelu<T: Scalar>(input: &Tensor<T>, slopes: &[T]) -> Result<Tensor<T>> {
    check_slopes(input, slopes)?;
    let hw = input.shape().spatial();
    let mut out = input.clone();
    if hw == 0 {
        return Ok(out);
    }
    for (i, plane) in out.data_mut().chunks_mut(hw).enumerate() {
        let a = slopes[i % slopes.len()];
        for v in plane {
            if *v < T::zero() {
                *v = a * *v;
            }
        }
    }
    Ok(out)
}

/// Returns `(grad_input, grad_slopes)` given the pre-activation `input`.
pub fn prelu_grad<T: Scalar>(input: &Tensor<T>, slopes: &[T], upstream: &Tensor<T>) -> Result<(Tensor<T>, Vec<T>)> {
    check_slopes(input, slopes)?;
    upstream.expect_shape(input.shape())?;
    let hw = input.shape().spatial();
    let mut gx = upstream.clone();
    let mut gs = vec![T::zero(); slopes.len()];
    if hw == 0 {
        return Ok((gx, gs));
    }
    for (i, (g, x)) in gx.data_mut().chunks_mut(hw).zip(input.data().chunks(hw)).enumerate() {
        let c = i % slopes.len();
        let mut acc = T::zero();
        for (g, &x) in g.iter_mut().zip(x) {
            if x < T::zero() {
                acc += *g * x;
                *g *= slopes[c];
            }
        }
        gs[c] += acc;
    }
    Ok((gx, gs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Shape;

    #[test]
    fn definition_cases() {
        let x = Tensor::new(Shape::new(1, 1, 1, 2), vec![3.0f32, -2.0]).unwrap();
        assert_eq!(prelu(&x, &[0.25]).unwrap().data(), &[3.0, -0.5]);
        let (gx, gs) = prelu_grad(&x, &[0.25], &Tensor::filled(x.shape(), 1.0)).unwrap();
        assert_eq!(gx.data(), &[1.0, 0.25]);
        assert_eq!(gs, vec![-2.0]);
    }

    #[test]
    fn zero_slope_is_relu() {
        let x = Tensor::from_fn(Shape::new(2, 3, 2, 2), |n, c, y, w| (n + c + y) as f32 - 2.5 + w as f32 * 0.3);
        let y = prelu(&x, &[0.0; 3]).unwrap();
        for (a, b) in y.data().iter().zip(x.data()) {
            assert_eq!(*a, b.max(0.0));
        }
    }

    #[test]
    fn slope_count_checked() {
        let x = Tensor::<f32>::zeros(Shape::new(1, 2, 2, 2));
        assert!(prelu(&x, &[0.1]).is_err());
        assert!(prelu_grad(&x, &[0.1], &x).is_err());
    }

    #[test]
    fn gradient_matches_central_differences() {
        let x = Tensor::from_fn(Shape::new(2, 3, 3, 3), |n, c, y, w| ((n * 31 + c * 7 + y * 5 + w * 3) % 11) as f64 / 5.0 - 1.1);
        let slopes = [0.1, -0.3, 0.7];
        let up = Tensor::from_fn(x.shape(), |n, c, y, w| ((n + c * 3 + y * 2 + w) % 5) as f64 - 2.0);
        let (gx, gs) = prelu_grad(&x, &slopes, &up).unwrap();
        let f = |x: &Tensor<f64>, s: &[f64]| -> f64 { prelu(x, s).unwrap().data().iter().zip(up.data()).map(|(a, b)| a * b).sum() };
        let h = 1e-3;
        for i in 0..x.len() {
            let (mut p, mut m) = (x.clone(), x.clone());
            p.data_mut()[i] += h;
            m.data_mut()[i] -= h;
            let num = (f(&p, &slopes) - f(&m, &slopes)) / (2.0 * h);
            assert!((num - gx.data()[i]).abs() < 1e-6);
        }
        for c in 0..3 {
            let (mut p, mut m) = (slopes, slopes);
            p[c] += h;
            m[c] -= h;
            let num = (f(&x, &p) - f(&x, &m)) / (2.0 * h);
            assert!((num - gs[c]).abs() < 1e-6);
        }
    }
}
