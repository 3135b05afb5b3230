//! Raster types shared by the whole pipeline: per-pixel label masks and RGB
//! scene images, plus their PNG round-trips.

use crate::error::{Error, Result};
use ndarray::Array3;
use std::path::Path;

/// Reserved mask value excluded from loss and metrics.
pub const IGNORE: u8 = 255;

/// Per-pixel class-id raster. Values are class ids in `[0, C)` or [`IGNORE`].
///
/// The unit of both real and pseudo supervision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMask {
    height: usize,
    width: usize,
    data: Vec<u8>,
}

impl LabelMask {
    pub fn new(height: usize, width: usize, data: Vec<u8>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::invalid("mask dimensions must be at least 1x1"));
        }
        if data.len() != height * width {
            return Err(Error::ShapeMismatch(format!(
                "mask data length {} does not match {}x{}",
                data.len(),
                height,
                width
            )));
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    /// A mask of the given size with every pixel set to `value`.
    pub fn filled(height: usize, width: usize, value: u8) -> Self {
        Self {
            height,
            width,
            data: vec![value; height * width],
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.data[row * self.width + col] = value;
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [u8] {
        &mut self.data
    }

    /// Checks that every pixel is a class id below `num_classes` or [`IGNORE`],
    /// naming the first offending pixel otherwise.
    pub fn validate(&self, num_classes: usize) -> Result<()> {
        for (i, &v) in self.data.iter().enumerate() {
            if v != IGNORE && (v as usize) >= num_classes {
                return Err(Error::InvalidMaskValue {
                    row: i / self.width,
                    col: i % self.width,
                    value: v,
                    num_classes,
                });
            }
        }
        Ok(())
    }

    /// Count of pixels that are not [`IGNORE`].
    pub fn non_ignore_count(&self) -> usize {
        self.data.iter().filter(|&&v| v != IGNORE).count()
    }

    /// Per-class pixel histogram over `num_classes` classes; ignore excluded.
    pub fn class_histogram(&self, num_classes: usize) -> Vec<u64> {
        let mut hist = vec![0u64; num_classes];
        for &v in &self.data {
            if v != IGNORE {
                hist[v as usize] += 1;
            }
        }
        hist
    }
}

/// An RGB raster with `f64` channels in `[0, 1]`, laid out `(3, height, width)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneImage {
    data: Array3<f64>,
}

impl SceneImage {
    pub fn new(data: Array3<f64>) -> Result<Self> {
        if data.shape()[0] != 3 || data.shape()[1] == 0 || data.shape()[2] == 0 {
            return Err(Error::ShapeMismatch(format!(
                "scene image must be (3, h>=1, w>=1), got {:?}",
                data.shape()
            )));
        }
        Ok(Self { data })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self {
            data: Array3::zeros((3, height, width)),
        }
    }

    pub fn height(&self) -> usize {
        self.data.shape()[1]
    }

    pub fn width(&self) -> usize {
        self.data.shape()[2]
    }

    pub fn data(&self) -> &Array3<f64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut Array3<f64> {
        &mut self.data
    }

    /// Quantizes to 8-bit RGB. Values are clamped to `[0, 1]` first.
    pub fn to_rgb8(&self) -> image::RgbImage {
        let (h, w) = (self.height(), self.width());
        let mut out = image::RgbImage::new(w as u32, h as u32);
        for r in 0..h {
            for c in 0..w {
                let px = [
                    quantize8(self.data[[0, r, c]]),
                    quantize8(self.data[[1, r, c]]),
                    quantize8(self.data[[2, r, c]]),
                ];
                out.put_pixel(c as u32, r as u32, image::Rgb(px));
            }
        }
        out
    }

    pub fn from_rgb8(img: &image::RgbImage) -> Self {
        let (w, h) = img.dimensions();
        let mut data = Array3::zeros((3, h as usize, w as usize));
        for (c, r, px) in img.enumerate_pixels() {
            for ch in 0..3 {
                data[[ch, r as usize, c as usize]] = px.0[ch] as f64 / 255.0;
            }
        }
        Self { data }
    }
}

fn quantize8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn save_image_png(image: &SceneImage, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    image.to_rgb8().save(path).map_err(|e| Error::image(path, e))
}

pub fn load_image_png(path: &Path) -> Result<SceneImage> {
    let img = image::open(path).map_err(|e| Error::image(path, e))?.to_rgb8();
    Ok(SceneImage::from_rgb8(&img))
}

pub fn save_mask_png(mask: &LabelMask, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let img = image::GrayImage::from_raw(
        mask.width() as u32,
        mask.height() as u32,
        mask.as_slice().to_vec(),
    )
    .expect("mask buffer matches dimensions");
    img.save(path).map_err(|e| Error::image(path, e))
}

pub fn load_mask_png(path: &Path) -> Result<LabelMask> {
    let img = image::open(path).map_err(|e| Error::image(path, e))?.to_luma8();
    let (w, h) = img.dimensions();
    LabelMask::new(h as usize, w as usize, img.into_raw())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_names_offending_pixel() {
        let mut mask = LabelMask::filled(4, 5, 0);
        mask.set(2, 3, 7);
        let err = mask.validate(6).unwrap_err();
        match err {
            Error::InvalidMaskValue {
                row,
                col,
                value,
                num_classes,
            } => {
                assert_eq!((row, col, value, num_classes), (2, 3, 7, 6));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn ignore_is_always_valid() {
        let mut mask = LabelMask::filled(2, 2, 0);
        mask.set(0, 1, IGNORE);
        mask.validate(1).unwrap();
        assert_eq!(mask.non_ignore_count(), 3);
    }

    #[test]
    fn png_round_trip_mask() {
        let dir = tempfile::tempdir().unwrap();
        let mut mask = LabelMask::filled(6, 7, 2);
        mask.set(0, 0, IGNORE);
        mask.set(5, 6, 4);
        let path = dir.path().join("m.png");
        save_mask_png(&mask, &path).unwrap();
        let back = load_mask_png(&path).unwrap();
        assert_eq!(mask, back);
    }

    #[test]
    fn png_round_trip_image_quantized() {
        let dir = tempfile::tempdir().unwrap();
        let mut img = SceneImage::zeros(3, 4);
        img.data_mut()[[0, 1, 2]] = 0.5;
        img.data_mut()[[2, 0, 0]] = 1.0;
        let path = dir.path().join("i.png");
        save_image_png(&img, &path).unwrap();
        let back = load_image_png(&path).unwrap();
        for ch in 0..3 {
            for r in 0..3 {
                for c in 0..4 {
                    let a = img.data()[[ch, r, c]];
                    let b = back.data()[[ch, r, c]];
                    assert!((a - b).abs() < 1.0 / 255.0 + 1e-12);
                }
            }
        }
    }
}
