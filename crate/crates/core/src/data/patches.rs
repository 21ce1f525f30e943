use super::degrade::make_lr;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Plane;

/// LR-grid patch edge.
pub const PATCH_SIZE: usize = 32;
pub const PATCH_STRIDE: usize = 16;

/// Aligned low/high resolution Y patches; `hr` is exactly `s×` larger.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePair<T> {
    pub lr: Plane<T>,
    pub hr: Plane<T>,
    pub source: String,
}

impl<T: Scalar> SamplePair<T> {
    /// Whole-image pair: HR cropped to a multiple of `s`, LR from [`make_lr`].
    pub fn from_image(hr: &Plane<T>, s: usize, source: impl Into<String>) -> Result<Self> {
        let hr = hr.crop_to_multiple(s);
        let lr = make_lr(&hr, s)?;
        Ok(SamplePair { lr, hr, source: source.into() })
    }

    pub fn scale(&self) -> usize {
        self.hr.height() / self.lr.height().max(1)
    }
}

/// Cuts `patch × patch` LR patches on a `stride` grid (positions that would
/// overrun are dropped) and pairs each with the aligned HR patch.
pub fn extract_patches<T: Scalar>(
    hr: &Plane<T>,
    s: usize,
    patch: usize,
    stride: usize,
    source: &str,
) -> Result<Vec<SamplePair<T>>> {
    if patch == 0 || stride == 0 {
        return Err(Error::invalid("patch and stride must be positive"));
    }
    let whole = SamplePair::from_image(hr, s, source)?;
    let (lh, lw) = (whole.lr.height(), whole.lr.width());
    if lh < patch || lw < patch {
        return Err(Error::invalid(format!("{source}: LR image {lh}x{lw} is smaller than patch {patch}")));
    }
    let mut out = Vec::with_capacity(((lh - patch) / stride + 1) * ((lw - patch) / stride + 1));
    for y in (0..=lh - patch).step_by(stride) {
        for x in (0..=lw - patch).step_by(stride) {
            out.push(SamplePair {
                lr: whole.lr.crop(y, x, patch, patch)?,
                hr: whole.hr.crop(y * s, x * s, patch * s, patch * s)?,
                source: format!("{source}@{y},{x}"),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(h: usize, w: usize) -> Plane<f32> {
        Plane::from_fn(h, w, |y, x| ((y * 31 + x * 17) % 97) as f32 / 97.0)
    }

    #[test]
    fn grid_count() {
        let p = extract_patches(&field(128, 128), 2, 32, 16, "img").unwrap();
        assert_eq!(p.len(), 9);
        // 70 LR px: positions 0, 16, 32 fit, 48 would overrun.
        assert_eq!(extract_patches(&field(140, 140), 2, 32, 16, "img").unwrap().len(), 9);
    }

    #[test]
    fn pairs_obey_scale_law() {
        for s in [2, 3] {
            for pair in extract_patches(&field(100, 120), s, 16, 8, "img").unwrap() {
                assert_eq!(pair.hr.height(), s * pair.lr.height());
                assert_eq!(pair.hr.width(), s * pair.lr.width());
            }
        }
    }

    #[test]
    fn origin_patch_is_a_manual_crop() {
        let hr = field(96, 80);
        let pairs = extract_patches(&hr, 2, 32, 16, "img").unwrap();
        let lr = make_lr(&hr, 2).unwrap();
        assert_eq!(pairs[0].lr, lr.crop(0, 0, 32, 32).unwrap());
        assert_eq!(pairs[0].hr, hr.crop(0, 0, 64, 64).unwrap());
        // LR is 48x40: only x = 0 fits, so the next patch moves down.
        assert_eq!(pairs[1].hr, hr.crop(32, 0, 64, 64).unwrap());
    }

    #[test]
    fn patches_cover_interior() {
        let hr = field(100, 100);
        let pairs = extract_patches(&hr, 2, 16, 8, "img").unwrap();
        let mut seen = vec![false; 48 * 48];
        for p in &pairs {
            let (y, x) = p.source.rsplit_once('@').unwrap().1.split_once(',').unwrap();
            let (y, x): (usize, usize) = (y.parse().unwrap(), x.parse().unwrap());
            for yy in y..y + 16 {
                for xx in x..x + 16 {
                    seen[yy * 48 + xx] = true;
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn too_small_is_an_error() {
        assert!(extract_patches(&field(40, 40), 2, 32, 16, "small").is_err());
    }
}
