//! Binary weights file.
//!
//! ```text
//! "DCSN" | version: u32 | scale: u8 | layers: u32
//! per layer: out, in, kh, kw: u32 | flags: u8 (bit0 bias, bit1 prelu)
//!            weights | bias | slopes        (f32, little-endian)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::config::{ModelConfig, FE_LAYERS};
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{ConvLayerParams, Shape, Tensor};

pub const WEIGHTS_MAGIC: &[u8; 4] = b"DCSN";
pub const WEIGHTS_VERSION: u32 = 1;

const FLAG_BIAS: u8 = 1;
const FLAG_PRELU: u8 = 2;

fn io_err(e: std::io::Error) -> Error {
    Error::Weights(e.to_string())
}

fn write_reals<T: Scalar, W: Write>(w: &mut W, values: &[T]) -> Result<()> {
    for v in values {
        w.write_all(&v.to_le_f32_bytes()).map_err(io_err)?;
    }
    Ok(())
}

pub fn write_weights<T: Scalar, W: Write>(params: &ModelParams<T>, mut w: W) -> Result<()> {
    let scale = u8::try_from(params.config.scale).map_err(|_| Error::Weights("scale exceeds 255".into()))?;
    w.write_all(WEIGHTS_MAGIC).map_err(io_err)?;
    w.write_all(&WEIGHTS_VERSION.to_le_bytes()).map_err(io_err)?;
    w.write_all(&[scale]).map_err(io_err)?;
    let layers: Vec<_> = params.layers().collect();
    w.write_all(&(layers.len() as u32).to_le_bytes()).map_err(io_err)?;
    for l in layers {
        let s = l.weights.shape();
        for d in [s.batch, s.channels, s.height, s.width] {
            w.write_all(&(d as u32).to_le_bytes()).map_err(io_err)?;
        }
        let flags = if l.bias.is_some() { FLAG_BIAS } else { 0 } | if l.prelu_slopes.is_some() { FLAG_PRELU } else { 0 };
        w.write_all(&[flags]).map_err(io_err)?;
        write_reals(&mut w, l.weights.data())?;
        write_reals(&mut w, l.bias.as_deref().unwrap_or(&[]))?;
        write_reals(&mut w, l.prelu_slopes.as_deref().unwrap_or(&[]))?;
    }
    w.flush().map_err(io_err)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(io_err)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u8<R: Read>(r: &mut R) -> Result<u8> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b).map_err(io_err)?;
    Ok(b[0])
}

fn read_reals<T: Scalar, R: Read>(r: &mut R, n: usize) -> Result<Vec<T>> {
    let mut buf = vec![0u8; n * 4];
    r.read_exact(&mut buf).map_err(io_err)?;
    Ok(buf.chunks_exact(4).map(|c| T::from_f64_lossy(f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)).collect())
}

/// Reads a weights stream and rebuilds the configuration from layer shapes.
/// The dropout keep probability is not stored and comes back as 0.8.
pub fn read_weights<T: Scalar, R: Read>(mut r: R) -> Result<ModelParams<T>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != WEIGHTS_MAGIC {
        return Err(Error::Weights(format!("bad magic {magic:?}")));
    }
    let version = read_u32(&mut r)?;
    if version != WEIGHTS_VERSION {
        return Err(Error::Weights(format!("unsupported version {version}")));
    }
    let scale = read_u8(&mut r)? as usize;
    let count = read_u32(&mut r)? as usize;
    if count != FE_LAYERS + 4 {
        return Err(Error::Weights(format!("expected {} layers, found {count}", FE_LAYERS + 4)));
    }
    let mut layers = Vec::with_capacity(count);
    for _ in 0..count {
        let mut dims = [0usize; 4];
        for d in &mut dims {
            *d = read_u32(&mut r)? as usize;
        }
        let numel = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        let numel = match numel {
            Some(n) if n <= 1 << 28 => n,
            _ => return Err(Error::Weights(format!("implausible layer dims {dims:?}"))),
        };
        let flags = read_u8(&mut r)?;
        let weights = Tensor::new(Shape::new(dims[0], dims[1], dims[2], dims[3]), read_reals(&mut r, numel)?)?;
        let bias = if flags & FLAG_BIAS != 0 { Some(read_reals(&mut r, dims[0])?) } else { None };
        let slopes = if flags & FLAG_PRELU != 0 { Some(read_reals(&mut r, dims[0])?) } else { None };
        layers.push(ConvLayerParams::new(weights, bias, slopes).map_err(|e| Error::Weights(e.to_string()))?);
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing).map_err(io_err)? != 0 {
        return Err(Error::Weights("trailing bytes after last layer".into()));
    }

    let out = |i: usize| layers[i].out_channels();
    let mut fe_filters = [0; FE_LAYERS];
    for (k, f) in fe_filters.iter_mut().enumerate() {
        *f = out(k);
    }
    let config = ModelConfig {
        scale,
        fe_filters,
        a1_filters: out(FE_LAYERS),
        b1_filters: out(FE_LAYERS + 1),
        b2_filters: out(FE_LAYERS + 2),
        last_kernel: layers[FE_LAYERS + 3].kernel_h(),
        dropout_keep: 0.8,
    };
    ModelParams::from_layers(config, layers).map_err(|e| Error::Weights(e.to_string()))
}

pub fn save_weights<T: Scalar>(params: &ModelParams<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_weights(params, BufWriter::new(f))
}

pub fn load_weights<T: Scalar>(path: impl AsRef<Path>) -> Result<ModelParams<T>> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_weights(BufReader::new(f))
}
