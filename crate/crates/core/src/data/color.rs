//! ITU-R BT.601 studio-swing YCbCr (Y in 16..235, chroma centred on 128).

use super::image_io::RgbImage;
use crate::error::{Error, Result};
use crate::tensor::Plane;

const FORWARD: [[f64; 3]; 3] = [
    [65.481, 128.553, 24.966],
    [-37.797, -74.203, 112.0],
    [112.0, -93.786, -18.214],
];
const OFFSET: [f64; 3] = [16.0, 128.0, 128.0];

/// Planes on the 0–255 scale.
#[derive(Debug, Clone, PartialEq)]
pub struct YCbCr {
    pub y: Plane<f32>,
    pub cb: Plane<f32>,
    pub cr: Plane<f32>,
}

fn inverse() -> [[f64; 3]; 3] {
    let m = FORWARD.map(|r| r.map(|v| v / 255.0));
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let c = |r0: usize, c0: usize, r1: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    [
        [c(1, 1, 2, 2) / det, -c(0, 1, 2, 2) / det, c(0, 1, 1, 2) / det],
        [-c(1, 0, 2, 2) / det, c(0, 0, 2, 2) / det, -c(0, 0, 1, 2) / det],
        [c(1, 0, 2, 1) / det, -c(0, 0, 2, 1) / det, c(0, 0, 1, 1) / det],
    ]
}

pub fn rgb_to_ycbcr(img: &RgbImage) -> YCbCr {
    let (h, w) = (img.height(), img.width());
    let mut planes = [Vec::with_capacity(h * w), Vec::with_capacity(h * w), Vec::with_capacity(h * w)];
    for px in img.data().chunks_exact(3) {
        let rgb = [px[0] as f64, px[1] as f64, px[2] as f64];
        for (k, plane) in planes.iter_mut().enumerate() {
            let v = OFFSET[k] + (FORWARD[k][0] * rgb[0] + FORWARD[k][1] * rgb[1] + FORWARD[k][2] * rgb[2]) / 255.0;
            plane.push(v as f32);
        }
    }
    let [y, cb, cr] = planes.map(|d| Plane::new(h, w, d).expect("sized above"));
    YCbCr { y, cb, cr }
}

/// Y normalized to `[0, 1]` by dividing the 0–255 value by 255.
pub fn luma_from_rgb(img: &RgbImage) -> Plane<f32> {
    rgb_to_ycbcr(img).y.map(|v| v / 255.0)
}

/// Rounds and clamps to 8 bits.
pub fn ycbcr_to_rgb(planes: &YCbCr) -> Result<RgbImage> {
    let (h, w) = (planes.y.height(), planes.y.width());
    for p in [&planes.cb, &planes.cr] {
        if p.height() != h || p.width() != w {
            return Err(Error::shape("Y, Cb and Cr planes differ in size"));
        }
    }
    let inv = inverse();
    let mut data = Vec::with_capacity(3 * h * w);
    for i in 0..h * w {
        let ycc = [
            planes.y.data()[i] as f64 - OFFSET[0],
            planes.cb.data()[i] as f64 - OFFSET[1],
            planes.cr.data()[i] as f64 - OFFSET[2],
        ];
        for row in &inv {
            let v = row[0] * ycc[0] + row[1] * ycc[1] + row[2] * ycc[2];
            data.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    RgbImage::new(h, w, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(r: u8, g: u8, b: u8) -> YCbCr {
        rgb_to_ycbcr(&RgbImage::new(1, 1, vec![r, g, b]).unwrap())
    }

    #[test]
    fn white_and_black_levels() {
        let w = single(255, 255, 255);
        assert!((w.y.data()[0] - 235.0).abs() < 1e-4);
        assert!((w.cb.data()[0] - 128.0).abs() < 1e-4);
        assert!((w.cr.data()[0] - 128.0).abs() < 1e-4);
        let k = single(0, 0, 0);
        assert_eq!((k.y.data()[0], k.cb.data()[0], k.cr.data()[0]), (16.0, 128.0, 128.0));
    }

    #[test]
    fn roundtrip_over_color_cube() {
        let levels = [0u8, 36, 73, 109, 146, 182, 219, 255];
        let mut colors = Vec::new();
        for r in levels {
            for g in levels {
                for b in levels {
                    colors.push([r, g, b]);
                }
            }
        }
        assert_eq!(colors.len(), 512);
        let img = RgbImage::new(1, 512, colors.concat()).unwrap();
        let back = ycbcr_to_rgb(&rgb_to_ycbcr(&img)).unwrap();
        for (a, b) in img.data().iter().zip(back.data()) {
            assert!((*a as i32 - *b as i32).abs() <= 1);
        }
    }

    #[test]
    fn gray_has_neutral_chroma() {
        let c = single(77, 77, 77);
        assert!((c.cb.data()[0] - 128.0).abs() < 1e-3 && (c.cr.data()[0] - 128.0).abs() < 1e-3);
    }
}
