//! Image decoding into the floating-point RGB planes the extractors
//! consume.

use std::path::Path;

use camid_core::dataset::ImageRgb;
use camid_core::mat::Mat;
use camid_core::Error as CoreError;
use image::ImageFormat;

use crate::error::{CliError, Result};

/// Decodes a PNG or JPEG into an [`ImageRgb`].
///
/// Other raster formats are rejected rather than silently accepted so a
/// cache always reflects the supported decode paths.
pub fn decode_image(path: &Path) -> Result<ImageRgb> {
    let format = ImageFormat::from_path(path)
        .map_err(|_| CliError::UnsupportedFormat(path.to_path_buf()))?;
    if !matches!(format, ImageFormat::Png | ImageFormat::Jpeg) {
        return Err(CliError::UnsupportedFormat(path.to_path_buf()));
    }
    let decoded = image::open(path).map_err(|e| match e {
        // a truncated stream surfaces as UnexpectedEof; that is file
        // corruption, not an environment problem
        image::ImageError::IoError(io) if io.kind() != std::io::ErrorKind::UnexpectedEof => {
            CliError::io(format!("reading {}", path.display()), io)
        }
        other => CliError::CorruptFile {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    })?;
    let rgb = decoded.into_rgb8();
    let (width, height) = (rgb.width() as usize, rgb.height() as usize);
    if width < camid_core::dataset::MIN_DIMENSION || height < camid_core::dataset::MIN_DIMENSION {
        return Err(CliError::Core(CoreError::ImageTooSmall {
            width,
            height,
            min: camid_core::dataset::MIN_DIMENSION,
        }));
    }
    let mut planes = [
        Mat::zeros(height, width),
        Mat::zeros(height, width),
        Mat::zeros(height, width),
    ];
    for (x, y, pixel) in rgb.enumerate_pixels() {
        for (plane, &v) in planes.iter_mut().zip(&pixel.0) {
            plane.set(y as usize, x as usize, v as f64);
        }
    }
    Ok(ImageRgb::new(planes)?)
}

/// Writes an [`ImageRgb`] as an 8-bit PNG (intensities are rounded).
pub fn encode_png(image: &ImageRgb, path: &Path) -> Result<()> {
    let (w, h) = (image.width() as u32, image.height() as u32);
    let mut out = image::RgbImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let px = [0, 1, 2].map(|c| {
                image.channel(c).get(y as usize, x as usize).round().clamp(0.0, 255.0) as u8
            });
            out.put_pixel(x, y, image::Rgb(px));
        }
    }
    out.save_with_format(path, ImageFormat::Png)
        .map_err(|e| CliError::CorruptFile {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
}
