use super::image_io::RgbImage;
use crate::scalar::Scalar;
use crate::tensor::Plane;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flip {
    None,
    Horizontal,
    Vertical,
    Both,
}

impl Flip {
    pub const ALL: [Flip; 4] = [Flip::None, Flip::Horizontal, Flip::Vertical, Flip::Both];

    pub fn suffix(&self) -> &'static str {
        match self {
            Flip::None => "",
            Flip::Horizontal => "_h",
            Flip::Vertical => "_v",
            Flip::Both => "_hv",
        }
    }

    fn source(&self, y: usize, x: usize, h: usize, w: usize) -> (usize, usize) {
        match self {
            Flip::None => (y, x),
            Flip::Horizontal => (y, w - 1 - x),
            Flip::Vertical => (h - 1 - y, x),
            Flip::Both => (h - 1 - y, w - 1 - x),
        }
    }
}

pub trait Flippable: Sized {
    fn flipped(&self, flip: Flip) -> Self;
}

impl Flippable for RgbImage {
    fn flipped(&self, flip: Flip) -> Self {
        let (h, w) = (self.height(), self.width());
        RgbImage::from_fn(h, w, |y, x| {
            let (sy, sx) = flip.source(y, x, h, w);
            self.pixel(sy, sx)
        })
    }
}

impl<T: Scalar> Flippable for Plane<T> {
    fn flipped(&self, flip: Flip) -> Self {
        let (h, w) = (self.height(), self.width());
        Plane::from_fn(h, w, |y, x| {
            let (sy, sx) = flip.source(y, x, h, w);
            self.get(sy, sx)
        })
    }
}

/// Original, h-flip, v-flip, hv-flip for every input, in that order.
pub fn augment_flips<I: Flippable>(images: &[I]) -> Vec<I> {
    images.iter().flat_map(|img| Flip::ALL.map(|f| img.flipped(f))).collect()
}
