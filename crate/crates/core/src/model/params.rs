use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::config::{ModelConfig, FE_LAYERS};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{ConvLayerParams, Shape};

/// Position of a layer in the canonical order FE1..FE7, A1, B1, B2, L.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerId {
    Feature(usize),
    A1,
    B1,
    B2,
    Last,
}

impl LayerId {
    pub fn all() -> impl Iterator<Item = LayerId> {
        (0..FE_LAYERS).map(LayerId::Feature).chain([LayerId::A1, LayerId::B1, LayerId::B2, LayerId::Last])
    }

    pub fn name(&self) -> String {
        match self {
            LayerId::Feature(k) => format!("FE{}", k + 1),
            LayerId::A1 => "A1".into(),
            LayerId::B1 => "B1".into(),
            LayerId::B2 => "B2".into(),
            LayerId::Last => "L".into(),
        }
    }
}

/// Learned parameters, also used as the container for their gradients and
/// for optimizer moment buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<T> {
    pub config: ModelConfig,
    pub feature: Vec<ConvLayerParams<T>>,
    pub a1: ConvLayerParams<T>,
    pub b1: ConvLayerParams<T>,
    pub b2: ConvLayerParams<T>,
    pub last: ConvLayerParams<T>,
}

impl<T: Scalar> ModelParams<T> {
    pub fn zeros(config: &ModelConfig) -> Result<Self> {
        config.validate()?;
        let mut layers: Vec<_> = config
            .layer_dims()
            .into_iter()
            .map(|(o, i, k, act)| ConvLayerParams::zeros(o, i, k, act, act))
            .collect();
        let last = layers.pop().expect("11 layers");
        let b2 = layers.pop().expect("11 layers");
        let b1 = layers.pop().expect("11 layers");
        let a1 = layers.pop().expect("11 layers");
        Ok(ModelParams { config: config.clone(), feature: layers, a1, b1, b2, last })
    }

    /// Same structure, every entry zero.
    pub fn zeros_like(&self) -> Self {
        Self::zeros(&self.config).expect("config already validated")
    }

    pub fn from_layers(config: ModelConfig, mut layers: Vec<ConvLayerParams<T>>) -> Result<Self> {
        config.validate()?;
        let dims = config.layer_dims();
        if layers.len() != dims.len() {
            return Err(Error::shape(format!("expected {} layers, got {}", dims.len(), layers.len())));
        }
        for (id, (layer, &(o, i, k, act))) in LayerId::all().zip(layers.iter().zip(&dims)) {
            layer.validate()?;
            let s = layer.weights.shape();
            if s != Shape::new(o, i, k, k) || layer.bias.is_some() != act || layer.prelu_slopes.is_some() != act {
                return Err(Error::shape(format!("layer {} has shape {s}, expected {o}x{i}x{k}x{k}", id.name())));
            }
        }
        let last = layers.pop().expect("checked length");
        let b2 = layers.pop().expect("checked length");
        let b1 = layers.pop().expect("checked length");
        let a1 = layers.pop().expect("checked length");
        Ok(ModelParams { config, feature: layers, a1, b1, b2, last })
    }

    pub fn layer(&self, id: LayerId) -> &ConvLayerParams<T> {
        match id {
            LayerId::Feature(k) => &self.feature[k],
            LayerId::A1 => &self.a1,
            LayerId::B1 => &self.b1,
            LayerId::B2 => &self.b2,
            LayerId::Last => &self.last,
        }
    }

    pub fn layer_mut(&mut self, id: LayerId) -> &mut ConvLayerParams<T> {
        match id {
            LayerId::Feature(k) => &mut self.feature[k],
            LayerId::A1 => &mut self.a1,
            LayerId::B1 => &mut self.b1,
            LayerId::B2 => &mut self.b2,
            LayerId::Last => &mut self.last,
        }
    }

    pub fn layers(&self) -> impl Iterator<Item = &ConvLayerParams<T>> {
        self.feature.iter().chain([&self.a1, &self.b1, &self.b2, &self.last])
    }

    pub fn layers_mut(&mut self) -> impl Iterator<Item = &mut ConvLayerParams<T>> {
        self.feature.iter_mut().chain([&mut self.a1, &mut self.b1, &mut self.b2, &mut self.last])
    }

    /// Every parameter array (weights, then bias, then slopes, layer by layer).
    pub fn arrays(&self) -> Vec<&[T]> {
        let mut out = Vec::new();
        for l in self.layers() {
            out.push(l.weights.data());
            out.extend(l.bias.as_deref());
            out.extend(l.prelu_slopes.as_deref());
        }
        out
    }

    pub fn arrays_mut(&mut self) -> Vec<&mut [T]> {
        let mut out = Vec::new();
        for l in self.layers_mut() {
            out.push(l.weights.data_mut());
            out.extend(l.bias.as_deref_mut());
            out.extend(l.prelu_slopes.as_deref_mut());
        }
        out
    }

    /// `Σ w²` over convolution weights only.
    pub fn weight_sum_squares(&self) -> f64 {
        self.layers().map(|l| l.weights.sum_squares()).sum()
    }

    pub fn cast<U: Scalar>(&self) -> ModelParams<U> {
        let cast_vec = |v: &Option<Vec<T>>| v.as_ref().map(|v| v.iter().map(|x| U::from_f64_lossy(x.as_f64())).collect());
        let cast_layer = |l: &ConvLayerParams<T>| ConvLayerParams {
            weights: l.weights.cast(),
            bias: cast_vec(&l.bias),
            prelu_slopes: cast_vec(&l.prelu_slopes),
        };
        ModelParams {
            config: self.config.clone(),
            feature: self.feature.iter().map(cast_layer).collect(),
            a1: cast_layer(&self.a1),
            b1: cast_layer(&self.b1),
            b2: cast_layer(&self.b2),
            last: cast_layer(&self.last),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.arrays().iter().all(|a| a.iter().all(|v| v.is_finite()))
    }
}

/// He-normal weights (`std = sqrt(2 / (k²·c_in))`), zero biases and slopes.
pub fn init_params<T: Scalar>(config: &ModelConfig, seed: u64) -> Result<ModelParams<T>> {
    let mut params = ModelParams::zeros(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for layer in params.layers_mut() {
        let s = layer.weights.shape();
        let fan_in = (s.height * s.width * s.channels) as f64;
        let normal = Normal::new(0.0, (2.0 / fan_in).sqrt()).expect("positive std");
        for w in layer.weights.data_mut() {
            *w = T::from_f64_lossy(normal.sample(&mut rng));
        }
    }
    Ok(params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamCount {
    pub weights: usize,
    pub biases: usize,
    pub prelu_slopes: usize,
}

impl ParamCount {
    pub fn total(&self) -> usize {
        self.weights + self.biases + self.prelu_slopes
    }
}

pub fn param_count(config: &ModelConfig) -> ParamCount {
    config.layer_dims().iter().fold(ParamCount { weights: 0, biases: 0, prelu_slopes: 0 }, |acc, &(o, i, k, act)| ParamCount {
        weights: acc.weights + o * i * k * k,
        biases: acc.biases + if act { o } else { 0 },
        prelu_slopes: acc.prelu_slopes + if act { o } else { 0 },
    })
}
