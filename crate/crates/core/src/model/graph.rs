use rand::Rng;

use super::params::{LayerId, ModelParams};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{
    bicubic_resize, channel_slice, concat_channels, conv2d, conv2d_grad, depth_to_space, prelu, prelu_grad,
    space_to_depth, split_channels, ConvLayerParams, DropoutMask, Tensor,
};

/// Intermediate values kept by a training-mode forward pass.
#[derive(Debug, Clone)]
pub struct ForwardTrace<T> {
    input: Tensor<T>,
    upsampled: Tensor<T>,
    /// Conv+bias outputs of the ten activated layers, canonical order.
    pre: Vec<Tensor<T>>,
    masks: Vec<Option<DropoutMask<T>>>,
    /// Concatenated (post-dropout) extractor outputs.
    features: Tensor<T>,
    b1_out: Tensor<T>,
    /// `concat(A1, B2)`, the input of the final layer.
    head: Tensor<T>,
}

impl<T: Scalar> ForwardTrace<T> {
    pub fn upsampled(&self) -> &Tensor<T> {
        &self.upsampled
    }

    pub fn features(&self) -> &Tensor<T> {
        &self.features
    }
}

fn upsample_batch<T: Scalar>(input: &Tensor<T>, s: usize) -> Result<Tensor<T>> {
    let planes = (0..input.batch())
        .map(|n| bicubic_resize(&input.plane(n, 0), input.height() * s, input.width() * s))
        .collect::<Result<Vec<_>>>()?;
    Tensor::from_planes(&planes.iter().collect::<Vec<_>>())
}

struct Recorder<'a, T, R: ?Sized> {
    rng: &'a mut R,
    keep: f64,
    pre: Vec<Tensor<T>>,
    masks: Vec<Option<DropoutMask<T>>>,
}

/// conv → bias → PReLU, then dropout when recording a training pass.
fn activated_layer<T: Scalar, R: Rng + ?Sized>(
    x: &Tensor<T>,
    layer: &ConvLayerParams<T>,
    rec: &mut Option<Recorder<'_, T, R>>,
) -> Result<Tensor<T>> {
    let z = conv2d(x, layer)?;
    let slopes = layer.prelu_slopes.as_deref().ok_or_else(|| Error::shape("activated layer without slopes"))?;
    let a = prelu(&z, slopes)?;
    let Some(rec) = rec else {
        return Ok(a);
    };
    let (out, mask) = if rec.keep < 1.0 {
        let m = DropoutMask::sample(a.shape(), rec.keep, rec.rng)?;
        (m.apply(&a)?, Some(m))
    } else {
        (a, None)
    };
    rec.pre.push(z);
    rec.masks.push(mask);
    Ok(out)
}

fn run<T: Scalar, R: Rng + ?Sized>(
    params: &ModelParams<T>,
    input: &Tensor<T>,
    mut rec: Option<Recorder<'_, T, R>>,
) -> Result<(Tensor<T>, Option<ForwardTrace<T>>)> {
    if input.channels() != 1 {
        return Err(Error::shape(format!("model expects 1 input channel, got {}", input.channels())));
    }
    let s = params.config.scale;

    let mut outs = Vec::with_capacity(params.feature.len());
    let mut x = input.clone();
    for layer in &params.feature {
        x = activated_layer(&x, layer, &mut rec)?;
        outs.push(x.clone());
    }
    drop(x);
    let features = concat_channels(&outs.iter().collect::<Vec<_>>())?;
    drop(outs);

    let a1 = activated_layer(&features, &params.a1, &mut rec)?;
    let b1 = activated_layer(&features, &params.b1, &mut rec)?;
    let b2 = activated_layer(&b1, &params.b2, &mut rec)?;
    let head = concat_channels(&[&a1, &b2])?;
    let residual = depth_to_space(&conv2d(&head, &params.last)?, s)?;
    let upsampled = upsample_batch(input, s)?;
    let output = residual.add(&upsampled)?;

    let trace = rec.map(|r| ForwardTrace {
        input: input.clone(),
        upsampled,
        pre: r.pre,
        masks: r.masks,
        features,
        b1_out: b1,
        head,
    });
    Ok((output, trace))
}

/// Inference pass: no dropout, no trace. Output is not clipped.
pub fn forward<T: Scalar>(params: &ModelParams<T>, input: &Tensor<T>) -> Result<Tensor<T>> {
    run::<T, rand::rngs::ThreadRng>(params, input, None).map(|(out, _)| out)
}

/// Training pass: dropout after every PReLU, intermediate values recorded.
pub fn forward_train<T: Scalar, R: Rng + ?Sized>(
    params: &ModelParams<T>,
    input: &Tensor<T>,
    rng: &mut R,
) -> Result<(Tensor<T>, ForwardTrace<T>)> {
    let rec = Recorder { rng, keep: params.config.dropout_keep, pre: Vec::new(), masks: Vec::new() };
    let (out, trace) = run(params, input, Some(rec))?;
    Ok((out, trace.expect("trace recorded")))
}

/// Backward through dropout, PReLU and the convolution of one activated layer.
/// Returns the gradient with respect to the layer input.
fn activated_layer_back<T: Scalar>(
    layer: &ConvLayerParams<T>,
    grads: &mut ConvLayerParams<T>,
    input: &Tensor<T>,
    pre: &Tensor<T>,
    mask: Option<&DropoutMask<T>>,
    upstream: Tensor<T>,
) -> Result<Tensor<T>> {
    let g_act = match mask {
        Some(m) => m.apply(&upstream)?,
        None => upstream,
    };
    let slopes = layer.prelu_slopes.as_deref().ok_or_else(|| Error::shape("activated layer without slopes"))?;
    let (g_pre, g_slopes) = prelu_grad(pre, slopes, &g_act)?;
    let g = conv2d_grad(input, layer, &g_pre)?;
    grads.weights = g.weights;
    grads.bias = Some(g.bias);
    grads.prelu_slopes = Some(g_slopes);
    Ok(g.input)
}

/// Gradient of `Σ(output_grad ⊙ output)` with respect to every parameter.
pub fn backward<T: Scalar>(
    params: &ModelParams<T>,
    trace: &ForwardTrace<T>,
    output_grad: &Tensor<T>,
) -> Result<ModelParams<T>> {
    let cfg = &params.config;
    let n_act = cfg.fe_filters.len() + 3;
    if trace.pre.len() != n_act || trace.features.channels() != cfg.feature_channels() || trace.head.channels() != cfg.head_channels() {
        return Err(Error::shape("trace was not produced by these parameters"));
    }
    output_grad.expect_shape(trace.upsampled.shape())?;
    let mut grads = params.zeros_like();

    let g_res = space_to_depth(output_grad, cfg.scale)?;
    let g_last = conv2d_grad(&trace.head, &params.last, &g_res)?;
    grads.last.weights = g_last.weights;
    let mut head_parts = split_channels(&g_last.input, &[cfg.a1_filters, cfg.b2_filters])?.into_iter();
    let (g_a1, g_b2) = (head_parts.next().expect("two parts"), head_parts.next().expect("two parts"));

    let fe = cfg.fe_filters.len();
    let (i_a1, i_b1, i_b2) = (fe, fe + 1, fe + 2);
    let mask = |i: usize| trace.masks[i].as_ref();

    let g_b1 = activated_layer_back(&params.b2, &mut grads.b2, &trace.b1_out, &trace.pre[i_b2], mask(i_b2), g_b2)?;
    let mut g_feat = activated_layer_back(&params.b1, &mut grads.b1, &trace.features, &trace.pre[i_b1], mask(i_b1), g_b1)?;
    let g_feat_a = activated_layer_back(&params.a1, &mut grads.a1, &trace.features, &trace.pre[i_a1], mask(i_a1), g_a1)?;
    g_feat.add_assign(&g_feat_a)?;

    let skip = split_channels(&g_feat, &cfg.fe_filters)?;
    let offsets: Vec<usize> = cfg.fe_filters.iter().scan(0, |acc, &f| {
        let start = *acc;
        *acc += f;
        Some(start)
    }).collect();
    let mut carry: Option<Tensor<T>> = None;
    for k in (0..fe).rev() {
        let mut upstream = skip[k].clone();
        if let Some(c) = carry.take() {
            upstream.add_assign(&c)?;
        }
        let input = if k == 0 {
            trace.input.clone()
        } else {
            channel_slice(&trace.features, offsets[k - 1], cfg.fe_filters[k - 1])?
        };
        let id = LayerId::Feature(k);
        let g_in = activated_layer_back(params.layer(id), grads.layer_mut(id), &input, &trace.pre[k], mask(k), upstream)?;
        carry = Some(g_in);
    }
    Ok(grads)
}
