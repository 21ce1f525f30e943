use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{bicubic_resize, Plane};

/// Antialiased bicubic downscale by `s`, after cropping to a multiple of `s`.
pub fn make_lr<T: Scalar>(hr: &Plane<T>, s: usize) -> Result<Plane<T>> {
    if s == 0 {
        return Err(Error::invalid("scale must be positive"));
    }
    let cropped = hr.crop_to_multiple(s);
    if cropped.height() == 0 || cropped.width() == 0 {
        return Err(Error::invalid(format!("{}x{} image is smaller than scale {s}", hr.height(), hr.width())));
    }
    bicubic_resize(&cropped, cropped.height() / s, cropped.width() / s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_stays_constant() {
        let lr = make_lr(&Plane::<f32>::filled(20, 12, 0.6), 2).unwrap();
        assert!(lr.data().iter().all(|&v| (v - 0.6).abs() < 1e-6));
    }

    #[test]
    fn crops_before_downscaling() {
        let lr = make_lr(&Plane::<f32>::filled(33, 33, 0.5), 2).unwrap();
        assert_eq!((lr.height(), lr.width()), (16, 16));
    }

    #[test]
    fn smooth_field_survives_down_up() {
        let hr = Plane::from_fn(64, 64, |y, x| {
            let (fy, fx) = (y as f64 / 64.0, x as f64 / 64.0);
            (0.5 + 0.2 * (std::f64::consts::PI * fx).sin() * (std::f64::consts::PI * fy).cos() + 0.1 * fx) as f32
        });
        let lr = make_lr(&hr, 2).unwrap();
        let up = bicubic_resize(&lr, 64, 64).unwrap();
        let max_err = hr.data().iter().zip(up.data()).map(|(a, b)| (a - b).abs()).fold(0.0, f32::max);
        assert!(max_err < 2.0 / 255.0, "max error {max_err}");
    }

    #[test]
    fn degenerate_sizes() {
        assert!(make_lr(&Plane::<f32>::filled(1, 5, 0.0), 2).is_err());
        assert!(make_lr(&Plane::<f32>::filled(4, 4, 0.0), 0).is_err());
    }
}
