//! Per-pixel operation counts for convolutional SR networks.
//!
//! A k×k convolution costs `k² · c_in · c_out` per output position; bias,
//! activation, addition and multiplication layers cost one op per filter.
//! Networks that run on the bicubic-upsampled grid pay `s²` times as much
//! per LR input pixel.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::ModelConfig;

/// Names accepted by [`builtin_spec`].
pub const BUILTIN_NAMES: [&str; 7] = ["srcnn", "fsrcnn", "drcn", "vdsr", "red30", "dcscn", "c-dcscn"];

/// Bicubic upsampling cost per produced HR pixel, when it is counted.
pub const BICUBIC_OPS_PER_PIXEL: u64 = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerCost {
    pub kernel: u64,
    pub c_in: u64,
    pub c_out: u64,
    pub has_bias: bool,
    pub has_activation: bool,
    /// Evaluations per input-grid pixel: `s²` for a transposed conv that
    /// emits an HR block, or the number of times a shared layer is reused.
    pub grid_multiplier: u64,
}

impl LayerCost {
    pub const fn conv(kernel: u64, c_in: u64, c_out: u64, has_bias: bool, has_activation: bool) -> Self {
        LayerCost { kernel, c_in, c_out, has_bias, has_activation, grid_multiplier: 1 }
    }

    pub const fn times(mut self, grid_multiplier: u64) -> Self {
        self.grid_multiplier = grid_multiplier;
        self
    }

    pub fn ops(&self) -> u64 {
        let mac = self.kernel * self.kernel * self.c_in * self.c_out;
        let bias = if self.has_bias { self.c_out } else { 0 };
        let act = if self.has_activation { self.c_out } else { 0 };
        self.grid_multiplier * (mac + bias + act)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkCostSpec {
    pub name: String,
    pub layers: Vec<LayerCost>,
    /// `s²` for networks fed the pre-upsampled image, 1 for direct-LR networks.
    pub input_grid_scale: u64,
    pub extra_ops: u64,
    /// HR pixels per LR pixel produced by bicubic upsampling, when that
    /// cost is included. Builtins leave it out.
    pub bicubic_pixels: Option<u64>,
    /// Published total for specs whose layer breakdown is a reconstruction.
    pub reference_ops: Option<f64>,
    pub approximate: bool,
}

impl NetworkCostSpec {
    pub fn new(name: impl Into<String>, layers: Vec<LayerCost>, input_grid_scale: u64) -> Self {
        NetworkCostSpec {
            name: name.into(),
            layers,
            input_grid_scale,
            extra_ops: 0,
            bicubic_pixels: None,
            reference_ops: None,
            approximate: false,
        }
    }

    pub fn with_bicubic(mut self, scale: u64) -> Self {
        self.bicubic_pixels = Some(scale * scale);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::invalid(format!("{}: no layers", self.name)));
        }
        if self.input_grid_scale == 0 {
            return Err(Error::invalid(format!("{}: input grid scale must be positive", self.name)));
        }
        for l in &self.layers {
            if l.kernel == 0 || l.c_in == 0 || l.c_out == 0 || l.grid_multiplier == 0 {
                return Err(Error::invalid(format!("{}: layer with zero dimension", self.name)));
            }
        }
        Ok(())
    }

    pub fn bias_layers(&self) -> usize {
        self.layers.iter().filter(|l| l.has_bias).count()
    }

    pub fn activation_layers(&self) -> usize {
        self.layers.iter().filter(|l| l.has_activation).count()
    }
}

/// Operations per LR input pixel.
pub fn per_pixel_ops(spec: &NetworkCostSpec) -> u64 {
    let layers: u64 = spec.layers.iter().map(LayerCost::ops).sum();
    let bicubic = spec.bicubic_pixels.map_or(0, |p| p * BICUBIC_OPS_PER_PIXEL);
    spec.input_grid_scale * layers + spec.extra_ops + bicubic
}

/// Cost spec mirroring the model graph for `config`.
pub fn spec_from_config(name: &str, config: &ModelConfig) -> NetworkCostSpec {
    let layers = config
        .layer_dims()
        .into_iter()
        .map(|(o, i, k, act)| LayerCost::conv(k as u64, i as u64, o as u64, act, act))
        .collect();
    NetworkCostSpec::new(name, layers, 1)
}

fn srcnn() -> NetworkCostSpec {
    // (f1, f2, f3, n1, n2) = (9, 5, 5, 64, 32)
    NetworkCostSpec::new(
        "SRCNN",
        vec![LayerCost::conv(9, 1, 64, true, true), LayerCost::conv(5, 64, 32, true, true), LayerCost::conv(5, 32, 1, true, false)],
        4,
    )
}

fn fsrcnn() -> NetworkCostSpec {
    // (d, s, m) = (56, 12, 4); the 9×9 deconvolution emits a 2×2 HR block.
    let mut layers = vec![LayerCost::conv(5, 1, 56, true, true), LayerCost::conv(1, 56, 12, true, true)];
    layers.extend((0..4).map(|_| LayerCost::conv(3, 12, 12, true, true)));
    layers.push(LayerCost::conv(1, 12, 56, true, true));
    layers.push(LayerCost::conv(9, 56, 1, false, false).times(4));
    NetworkCostSpec::new("FSRCNN", layers, 1)
}

fn drcn() -> NetworkCostSpec {
    // Embedding (2), 16 shared recursions, reconstruction (2) applied to
    // every recursion output, 16-way weighted output ensemble.
    let mut layers = vec![LayerCost::conv(3, 1, 256, true, true), LayerCost::conv(3, 256, 256, true, true)];
    layers.extend((0..16).map(|_| LayerCost::conv(3, 256, 256, true, true)));
    layers.push(LayerCost::conv(3, 256, 256, true, true).times(16));
    layers.push(LayerCost::conv(3, 256, 1, true, false).times(16));
    let mut spec = NetworkCostSpec::new("DRCN", layers, 4);
    spec.extra_ops = 16 * 4;
    spec.reference_ops = Some(78_083_200.0);
    spec.approximate = true;
    spec
}

fn vdsr() -> NetworkCostSpec {
    let mut layers = vec![LayerCost::conv(3, 1, 64, true, true)];
    layers.extend((0..18).map(|_| LayerCost::conv(3, 64, 64, true, true)));
    layers.push(LayerCost::conv(3, 64, 1, true, false));
    NetworkCostSpec::new("VDSR", layers, 4)
}

fn red30() -> NetworkCostSpec {
    // 15 conv + 15 deconv, no bias, ReLU everywhere but the output, and
    // seven symmetric skip additions.
    let mut layers = vec![LayerCost::conv(3, 1, 64, false, true)];
    layers.extend((0..28).map(|_| LayerCost::conv(3, 64, 64, false, true)));
    layers.push(LayerCost::conv(3, 64, 1, false, false));
    let mut spec = NetworkCostSpec::new("RED30", layers, 4);
    spec.extra_ops = 4 * 7 * 64;
    spec.reference_ops = Some(4_152_800.0);
    spec.approximate = true;
    spec
}

pub fn builtin_spec(name: &str) -> Result<NetworkCostSpec> {
    match name.to_ascii_lowercase().as_str() {
        "srcnn" => Ok(srcnn()),
        "fsrcnn" => Ok(fsrcnn()),
        "drcn" => Ok(drcn()),
        "vdsr" => Ok(vdsr()),
        "red30" | "red" => Ok(red30()),
        "dcscn" => Ok(spec_from_config("DCSCN", &ModelConfig::dcscn(2))),
        "c-dcscn" | "cdcscn" => Ok(spec_from_config("c-DCSCN", &ModelConfig::compact(2))),
        _ => Err(Error::UnknownNetwork { name: name.to_string(), valid: BUILTIN_NAMES.join(", ") }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityRow {
    pub name: String,
    pub layers: usize,
    pub bias_layers: usize,
    pub activation_layers: usize,
    pub input_grid_scale: u64,
    pub ops: u64,
    pub reference_ops: Option<f64>,
    /// Relative to DCSCN, using the reference total when one is declared.
    pub ratio: f64,
    pub approximate: bool,
}

impl ComplexityRow {
    pub fn effective_ops(&self) -> f64 {
        self.reference_ops.unwrap_or(self.ops as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityTable {
    pub rows: Vec<ComplexityRow>,
}

impl ComplexityTable {
    /// Aligned plain-text table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<10} {:>6} {:>10} {:>5} {:>14} {:>8}",
            "network", "layers", "bias/act", "grid", "complexity[k]", "ratio"
        );
        for r in &self.rows {
            let mark = if r.approximate { "*" } else { "" };
            let _ = writeln!(
                out,
                "{:<10} {:>6} {:>10} {:>5} {:>14} {:>8.2}",
                r.name,
                r.layers,
                format!("{}, {}", r.bias_layers, r.activation_layers),
                format!("x{}", r.input_grid_scale),
                format!("{:.1}{mark}", r.effective_ops() / 1000.0),
                r.ratio
            );
        }
        if self.rows.iter().any(|r| r.approximate) {
            out.push_str("* published total; layer breakdown reconstructed\n");
        }
        out
    }

    /// One `name=.. ops=.. ratio=..` record per network.
    pub fn to_records(&self) -> String {
        self.rows
            .iter()
            .map(|r| format!("name={} ops={} computed_ops={} ratio={:.4}\n", r.name, r.effective_ops(), r.ops, r.ratio))
            .collect()
    }
}

pub fn report_table(specs: &[NetworkCostSpec]) -> Result<ComplexityTable> {
    if specs.is_empty() {
        return Err(Error::invalid("no networks to compare"));
    }
    let baseline = per_pixel_ops(&builtin_spec("dcscn")?) as f64;
    let rows = specs
        .iter()
        .map(|s| {
            s.validate()?;
            let ops = per_pixel_ops(s);
            let effective = s.reference_ops.unwrap_or(ops as f64);
            Ok(ComplexityRow {
                name: s.name.clone(),
                layers: s.layers.len(),
                bias_layers: s.bias_layers(),
                activation_layers: s.activation_layers(),
                input_grid_scale: s.input_grid_scale,
                ops,
                reference_ops: s.reference_ops,
                ratio: effective / baseline,
                approximate: s.approximate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComplexityTable { rows })
}
