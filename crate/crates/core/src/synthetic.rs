//! Procedural test images: smooth backgrounds, antialiased shapes and
//! striped textures. Used as stand-in data when no real image set is at hand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::RgbImage;

#[derive(Debug, Clone, Copy)]
enum Shape {
    Disc { cy: f64, cx: f64, r: f64 },
    Rect { y0: f64, x0: f64, y1: f64, x1: f64 },
    /// Half-plane cut of a disc: `n·p > d` inside a bounding radius.
    Wedge { cy: f64, cx: f64, r: f64, ny: f64, nx: f64 },
    Stripes { cy: f64, cx: f64, r: f64, fy: f64, fx: f64 },
}

impl Shape {
    fn contains(&self, y: f64, x: f64) -> bool {
        match *self {
            Shape::Disc { cy, cx, r } => (y - cy).powi(2) + (x - cx).powi(2) < r * r,
            Shape::Rect { y0, x0, y1, x1 } => y >= y0 && y < y1 && x >= x0 && x < x1,
            Shape::Wedge { cy, cx, r, ny, nx } => {
                (y - cy).powi(2) + (x - cx).powi(2) < r * r && (y - cy) * ny + (x - cx) * nx > 0.0
            }
            Shape::Stripes { cy, cx, r, fy, fx } => {
                (y - cy).abs() < r && (x - cx).abs() < r && ((y * fy + x * fx).sin() > 0.0)
            }
        }
    }
}

struct Scene {
    base: [f64; 3],
    gradient: [[f64; 3]; 2],
    shapes: Vec<(Shape, [f64; 3])>,
}

impl Scene {
    fn random(h: usize, w: usize, rng: &mut ChaCha8Rng) -> Self {
        let color = |rng: &mut ChaCha8Rng| [rng.random_range(0.0..255.0), rng.random_range(0.0..255.0), rng.random_range(0.0..255.0)];
        let base = color(rng);
        let gradient = [
            [rng.random_range(-60.0..60.0), rng.random_range(-60.0..60.0), rng.random_range(-60.0..60.0)],
            [rng.random_range(-60.0..60.0), rng.random_range(-60.0..60.0), rng.random_range(-60.0..60.0)],
        ];
        let (hf, wf) = (h as f64, w as f64);
        let scale = hf.min(wf);
        let n = rng.random_range(8..16);
        let mut shapes = Vec::with_capacity(n);
        for _ in 0..n {
            let cy = rng.random_range(0.0..hf);
            let cx = rng.random_range(0.0..wf);
            let r = rng.random_range(0.05..0.3) * scale;
            let shape = match rng.random_range(0..4) {
                0 => Shape::Disc { cy, cx, r },
                1 => Shape::Rect { y0: cy - r, x0: cx - r * rng.random_range(0.3..1.5), y1: cy + r * rng.random_range(0.3..1.0), x1: cx + r },
                2 => {
                    let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    Shape::Wedge { cy, cx, r, ny: a.sin(), nx: a.cos() }
                }
                _ => {
                    let period = rng.random_range(3.0..9.0);
                    let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    let f = std::f64::consts::TAU / period;
                    Shape::Stripes { cy, cx, r, fy: f * a.sin(), fx: f * a.cos() }
                }
            };
            shapes.push((shape, color(rng)));
        }
        Scene { base, gradient, shapes }
    }

    fn sample(&self, y: f64, x: f64, h: f64, w: f64) -> [f64; 3] {
        let mut c = [0.0; 3];
        for (k, v) in c.iter_mut().enumerate() {
            *v = self.base[k] + self.gradient[0][k] * (y / h - 0.5) + self.gradient[1][k] * (x / w - 0.5);
        }
        for (shape, color) in &self.shapes {
            if shape.contains(y, x) {
                c = *color;
            }
        }
        c
    }
}

/// Deterministic synthetic RGB image, 4×4 supersampled.
pub fn synthetic_image(height: usize, width: usize, seed: u64) -> RgbImage {
    const SS: usize = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scene = Scene::random(height, width, &mut rng);
    let (hf, wf) = (height as f64, width as f64);
    RgbImage::from_fn(height, width, |y, x| {
        let mut acc = [0.0; 3];
        for sy in 0..SS {
            for sx in 0..SS {
                let py = y as f64 + (sy as f64 + 0.5) / SS as f64;
                let px = x as f64 + (sx as f64 + 0.5) / SS as f64;
                let c = scene.sample(py, px, hf, wf);
                for k in 0..3 {
                    acc[k] += c[k];
                }
            }
        }
        acc.map(|v| (v / (SS * SS) as f64).round().clamp(0.0, 255.0) as u8)
    })
}

/// `count` named images `{prefix}{i:03}`.
pub fn synthetic_set(prefix: &str, count: usize, height: usize, width: usize, seed: u64) -> Vec<(String, RgbImage)> {
    (0..count)
        .map(|i| (format!("{prefix}{i:03}"), synthetic_image(height, width, seed.wrapping_mul(1_000_003).wrapping_add(i as u64))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_varied() {
        let a = synthetic_image(40, 30, 1);
        assert_eq!(a, synthetic_image(40, 30, 1));
        assert_ne!(a, synthetic_image(40, 30, 2));
        assert_eq!((a.height(), a.width()), (40, 30));
    }
}
