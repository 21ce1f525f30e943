//! Super-resolution engine built around a skip-connected convolutional
//! feature extractor, a network-in-network reconstruction head and a
//! bicubic residual path.
//!
//! All numeric code is generic over [`Scalar`]; the `*32` aliases are the
//! production instantiation and the `*64` aliases back gradient checks.

pub mod complexity;
pub mod data;
pub mod error;
pub mod metrics;
pub mod model;
pub mod scalar;
pub mod synthetic;
pub mod tensor;
pub mod training;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Tensor32 = tensor::Tensor<f32>;
pub type Tensor64 = tensor::Tensor<f64>;
pub type PlaneImage = tensor::Plane<f32>;
pub type ConvLayerParams32 = tensor::ConvLayerParams<f32>;
pub type ModelParams32 = model::ModelParams<f32>;
pub type ModelParams64 = model::ModelParams<f64>;
pub type SamplePair = data::SamplePair<f32>;
