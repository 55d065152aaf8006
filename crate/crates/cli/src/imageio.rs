//! Image decoding and patch writing at the CLI boundary.

use std::fs;
use std::io::BufWriter;
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ColorType, DynamicImage, ImageEncoder};
use pedscan_core::pixel::to_grayscale;
use pedscan_core::GrayImage;

use crate::error::{CliError, CliResult};

/// Decodes PNG, JPEG or PNM into grayscale. Colour inputs go through the
/// core luma conversion.
pub fn load_gray(path: &Path) -> CliResult<GrayImage> {
    let bytes = fs::read(path).map_err(|e| CliError::read(path, e))?;
    let img = image::load_from_memory(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let gray = match img {
        DynamicImage::ImageLuma8(g) => GrayImage::new(w, h, g.into_raw())?,
        other => to_grayscale(other.to_rgb8().as_raw(), w, h)?,
    };
    Ok(gray)
}

/// Writes a binary PGM.
pub fn save_pgm(path: &Path, img: &GrayImage) -> CliResult<()> {
    let f = fs::File::create(path).map_err(|e| CliError::write(path, e))?;
    let enc = PnmEncoder::new(BufWriter::new(f)).with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary));
    enc.write_image(img.data(), img.width() as u32, img.height() as u32, ColorType::L8)
        .map_err(|e| CliError::Other(format!("{}: {e}", path.display())))
}

/// Writes a grayscale PNG.
pub fn save_png(path: &Path, img: &GrayImage) -> CliResult<()> {
    image::save_buffer(path, img.data(), img.width() as u32, img.height() as u32, ColorType::L8)
        .map_err(|e| CliError::Other(format!("{}: {e}", path.display())))
}
