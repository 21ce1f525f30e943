use crate::error::{Error, Result};

/// Number of layers in the feature extractor.
pub const FE_LAYERS: usize = 7;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub scale: usize,
    pub fe_filters: [usize; FE_LAYERS],
    pub a1_filters: usize,
    pub b1_filters: usize,
    pub b2_filters: usize,
    /// Kernel size of the final reconstruction layer.
    pub last_kernel: usize,
    pub dropout_keep: f64,
}

impl ModelConfig {
    /// Full-size network: 96→32 extractor, A1=64, B1=B2=32.
    pub fn dcscn(scale: usize) -> Self {
        ModelConfig {
            scale,
            fe_filters: [96, 76, 65, 55, 47, 39, 32],
            a1_filters: 64,
            b1_filters: 32,
            b2_filters: 32,
            last_kernel: 1,
            dropout_keep: 0.8,
        }
    }

    /// Compact network: 32→8 extractor, A1=24, B1=B2=8.
    pub fn compact(scale: usize) -> Self {
        ModelConfig {
            scale,
            fe_filters: [32, 26, 22, 18, 14, 11, 8],
            a1_filters: 24,
            b1_filters: 8,
            b2_filters: 8,
            last_kernel: 1,
            dropout_keep: 0.8,
        }
    }

    /// Looks up `dcscn` or `c-dcscn`.
    pub fn preset(name: &str, scale: usize) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "dcscn" => Ok(Self::dcscn(scale)),
            "c-dcscn" | "cdcscn" | "compact" => Ok(Self::compact(scale)),
            other => Err(Error::invalid(format!("unknown preset `{other}` (expected dcscn or c-dcscn)"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scale < 1 {
            return Err(Error::invalid("scale must be positive"));
        }
        if self.fe_filters.iter().chain([&self.a1_filters, &self.b1_filters, &self.b2_filters]).any(|&f| f == 0) {
            return Err(Error::invalid("filter counts must be positive"));
        }
        if self.last_kernel.is_multiple_of(2) {
            return Err(Error::invalid(format!("last kernel {} must be odd", self.last_kernel)));
        }
        if !(self.dropout_keep > 0.0 && self.dropout_keep <= 1.0) {
            return Err(Error::invalid(format!("dropout keep {} outside (0, 1]", self.dropout_keep)));
        }
        Ok(())
    }

    /// Channels of the concatenated extractor output.
    pub fn feature_channels(&self) -> usize {
        self.fe_filters.iter().sum()
    }

    /// Channels entering the final layer.
    pub fn head_channels(&self) -> usize {
        self.a1_filters + self.b2_filters
    }

    pub fn output_channels(&self) -> usize {
        self.scale * self.scale
    }

    /// `(out, in, kernel, bias+prelu)` for every layer in canonical order.
    pub fn layer_dims(&self) -> Vec<(usize, usize, usize, bool)> {
        let mut dims = Vec::with_capacity(FE_LAYERS + 4);
        let mut c_in = 1;
        for &f in &self.fe_filters {
            dims.push((f, c_in, 3, true));
            c_in = f;
        }
        let feat = self.feature_channels();
        dims.push((self.a1_filters, feat, 1, true));
        dims.push((self.b1_filters, feat, 1, true));
        dims.push((self.b2_filters, self.b1_filters, 3, true));
        dims.push((self.output_channels(), self.head_channels(), self.last_kernel, false));
        dims
    }
}
