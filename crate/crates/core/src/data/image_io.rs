use std::path::Path;

use image::{ColorType, DynamicImage, ImageFormat, ImageReader};

use crate::error::{Error, Result};

/// 8-bit interleaved RGB.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    height: usize,
    width: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(height: usize, width: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != 3 * height * width {
            return Err(Error::shape(format!(
                "rgb image {height}x{width} needs {} bytes, got {}",
                3 * height * width,
                data.len()
            )));
        }
        Ok(RgbImage { height, width, data })
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Self {
        let mut data = Vec::with_capacity(3 * height * width);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(y, x));
            }
        }
        RgbImage { height, width, data }
    }

    /// Grey image with R = G = B.
    pub fn from_gray(height: usize, width: usize, gray: &[u8]) -> Result<Self> {
        if gray.len() != height * width {
            return Err(Error::shape("gray buffer length mismatch"));
        }
        Ok(RgbImage { height, width, data: gray.iter().flat_map(|&g| [g, g, g]).collect() })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn pixel(&self, y: usize, x: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn is_gray(&self) -> bool {
        self.data.chunks_exact(3).all(|p| p[0] == p[1] && p[1] == p[2])
    }

    pub fn crop(&self, top: usize, left: usize, height: usize, width: usize) -> Result<Self> {
        if top + height > self.height || left + width > self.width {
            return Err(Error::shape("crop exceeds image"));
        }
        Ok(RgbImage::from_fn(height, width, |y, x| self.pixel(top + y, left + x)))
    }

    pub fn crop_to_multiple(&self, s: usize) -> Self {
        self.crop(0, 0, self.height - self.height % s, self.width - self.width % s).expect("within bounds")
    }
}

fn from_dynamic(img: DynamicImage, path: &Path) -> Result<RgbImage> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img.color() {
        ColorType::L8 | ColorType::La8 => RgbImage::from_gray(h, w, img.to_luma8().as_raw()),
        ColorType::Rgb8 | ColorType::Rgba8 => RgbImage::new(h, w, img.to_rgb8().into_raw()),
        other => Err(Error::UnsupportedFormat {
            path: path.to_path_buf(),
            message: format!("{other:?} (only 8-bit gray or RGB is accepted)"),
        }),
    }
}

/// Decodes PNG or BMP bytes; `path` is only used in error messages.
pub fn decode_image(bytes: &[u8], path: &Path) -> Result<RgbImage> {
    let reader = ImageReader::new(std::io::Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?;
    match reader.format() {
        Some(ImageFormat::Png) | Some(ImageFormat::Bmp) => {}
        other => {
            return Err(Error::UnsupportedFormat { path: path.to_path_buf(), message: format!("container {other:?}") });
        }
    }
    let img = reader.decode().map_err(|e| Error::Decode { path: path.to_path_buf(), message: e.to_string() })?;
    from_dynamic(img, path)
}

pub fn load_image(path: impl AsRef<Path>) -> Result<RgbImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes, path)
}

/// Writes PNG (lossless) or BMP depending on the extension.
pub fn save_image(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let format = match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("png") => ImageFormat::Png,
        Some("bmp") => ImageFormat::Bmp,
        other => {
            return Err(Error::UnsupportedFormat { path: path.to_path_buf(), message: format!("extension {other:?}") });
        }
    };
    image::save_buffer_with_format(path, &img.data, img.width as u32, img.height as u32, image::ExtendedColorType::Rgb8, format)
        .map_err(|e| Error::Encode { path: path.to_path_buf(), message: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 2×2 RGB PNG written by Pillow: red, green / blue, (10, 20, 30).
    const FIXTURE_2X2: &[u8] = include_bytes!("../../tests/fixtures/rgb_2x2.png");
    /// 2×2 8-bit grayscale PNG written by Pillow: 0, 85 / 170, 255.
    const FIXTURE_GRAY: &[u8] = include_bytes!("../../tests/fixtures/gray_2x2.png");

    #[test]
    fn decodes_known_fixture() {
        let img = decode_image(FIXTURE_2X2, Path::new("rgb_2x2.png")).unwrap();
        assert_eq!((img.height(), img.width()), (2, 2));
        assert_eq!(img.data(), &[255, 0, 0, 0, 255, 0, 0, 0, 255, 10, 20, 30]);
    }

    #[test]
    fn gray_is_replicated() {
        let img = decode_image(FIXTURE_GRAY, Path::new("gray_2x2.png")).unwrap();
        assert_eq!(img.pixel(0, 1), [85, 85, 85]);
        assert_eq!(img.pixel(1, 1), [255, 255, 255]);
        assert!(img.is_gray());
    }

    #[test]
    fn truncated_file_is_an_error() {
        let cut = &FIXTURE_2X2[..FIXTURE_2X2.len() / 2];
        assert!(decode_image(cut, Path::new("cut.png")).is_err());
        assert!(decode_image(&[], Path::new("empty.png")).is_err());
    }

    #[test]
    fn png_and_bmp_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let img = RgbImage::from_fn(5, 7, |y, x| [(y * 50) as u8, (x * 30) as u8, ((x * y) % 256) as u8]);
        for name in ["a.png", "a.bmp"] {
            let p = dir.path().join(name);
            save_image(&img, &p).unwrap();
            assert_eq!(load_image(&p).unwrap(), img);
        }
        assert!(save_image(&img, dir.path().join("a.jpg")).is_err());
    }

    #[test]
    fn sixteen_bit_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("deep.png");
        let buf: Vec<u16> = vec![1000, 2000, 3000, 4000];
        image::ImageBuffer::<image::Luma<u16>, _>::from_raw(2, 2, buf).unwrap().save(&p).unwrap();
        assert!(matches!(load_image(&p), Err(Error::UnsupportedFormat { .. })));
    }
}
