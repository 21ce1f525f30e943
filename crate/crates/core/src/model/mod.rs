//! The skip-connected super-resolution network.
//!
//! Graph: seven 3×3 conv+PReLU feature layers whose outputs are all
//! concatenated; a 1×1 branch (A1) and a 1×1→3×3 branch (B1→B2) read the
//! concatenation; the final 1×1 layer (L) maps `concat(A1, B2)` to `s²`
//! channels that are reshaped onto the HR grid and added to the bicubic
//! upscale of the input.

mod config;
mod graph;
mod io;
mod params;

pub use config::{ModelConfig, FE_LAYERS};
pub use graph::{backward, forward, forward_train, ForwardTrace};
pub use io::{load_weights, read_weights, save_weights, write_weights, WEIGHTS_MAGIC, WEIGHTS_VERSION};
pub use params::{init_params, param_count, LayerId, ModelParams, ParamCount};
