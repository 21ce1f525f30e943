use crate::error::Result;
use crate::model::ModelParams;
use crate::scalar::Scalar;
use crate::tensor::Tensor;

#[derive(Debug, Clone)]
pub struct LossValue<T> {
    /// `mse + l2_term`.
    pub total: f64,
    pub mse: f64,
    pub l2_term: f64,
    /// d(mse)/d(pred) = `2 (pred - target) / N`.
    pub output_grad: Tensor<T>,
}

/// Mean squared error plus `l2_coeff · Σ w²` over convolution weights.
pub fn loss<T: Scalar>(pred: &Tensor<T>, target: &Tensor<T>, params: &ModelParams<T>, l2_coeff: f64) -> Result<LossValue<T>> {
    pred.expect_shape(target.shape())?;
    let n = pred.len().max(1) as f64;
    let mut sse = 0.0f64;
    for (&p, &t) in pred.data().iter().zip(target.data()) {
        let d = p.as_f64() - t.as_f64();
        sse += d * d;
    }
    let two_over_n = T::from_f64_lossy(2.0 / n);
    let output_grad = pred.zip_map(target, |p, t| two_over_n * (p - t))?;
    let mse = sse / n;
    let l2_term = l2_coeff * params.weight_sum_squares();
    Ok(LossValue { total: mse + l2_term, mse, l2_term, output_grad })
}

/// Adds the regularizer gradient `2 · l2_coeff · w` to the weight gradients.
pub fn add_weight_decay<T: Scalar>(grads: &mut ModelParams<T>, params: &ModelParams<T>, l2_coeff: f64) {
    if l2_coeff == 0.0 {
        return;
    }
    let k = T::from_f64_lossy(2.0 * l2_coeff);
    for (g, p) in grads.layers_mut().zip(params.layers()) {
        for (gw, &w) in g.weights.data_mut().iter_mut().zip(p.weights.data()) {
            *gw += k * w;
        }
    }
}
