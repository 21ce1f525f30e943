//! Image I/O, colour conversion, augmentation, LR synthesis, patches and batches.

mod augment;
mod batch;
mod color;
mod degrade;
mod image_io;
mod manifest;
mod patches;

pub use augment::{augment_flips, Flip, Flippable};
pub use batch::{batches, epoch_order, Batch, BatchStream};
pub use color::{luma_from_rgb, rgb_to_ycbcr, ycbcr_to_rgb, YCbCr};
pub use degrade::make_lr;
pub use image_io::{decode_image, load_image, save_image, RgbImage};
pub use manifest::{DatasetManifest, ManifestEntry, Role};
pub use patches::{extract_patches, SamplePair, PATCH_SIZE, PATCH_STRIDE};
