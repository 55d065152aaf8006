//! Image primitives: 8-bit grayscale rasters, grayscale conversion, bilinear
//! resizing, and exclusive-prefix integral images.

use crate::{Error, Result};

/// Axis-aligned rectangle in pixel coordinates, origin at the top-left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub const fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Rect { x, y, w, h }
    }

    #[inline]
    pub fn right(&self) -> usize {
        self.x + self.w
    }

    #[inline]
    pub fn bottom(&self) -> usize {
        self.y + self.h
    }

    #[inline]
    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    pub fn fits_in(&self, width: usize, height: usize) -> bool {
        self.w >= 1 && self.h >= 1 && self.right() <= width && self.bottom() <= height
    }

    pub fn intersection_area(&self, other: &Rect) -> u64 {
        let x0 = self.x.max(other.x);
        let y0 = self.y.max(other.y);
        let x1 = self.right().min(other.right());
        let y1 = self.bottom().min(other.bottom());
        if x1 <= x0 || y1 <= y0 {
            0
        } else {
            (x1 - x0) as u64 * (y1 - y0) as u64
        }
    }

    /// Intersection over union; zero when both rects are empty.
    pub fn iou(&self, other: &Rect) -> f64 {
        let inter = self.intersection_area(other);
        let union = self.area() + other.area() - inter;
        if union == 0 {
            0.0
        } else {
            inter as f64 / union as f64
        }
    }
}

/// Row-major 8-bit intensity raster.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::DimensionMismatch {
                width,
                height,
                channels: 1,
                actual: data.len(),
            });
        }
        Ok(GrayImage { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        GrayImage {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        GrayImage { width, height, data }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.data[y * self.width + x] = v;
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[u8] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(0, 0, self.width, self.height)
    }

    pub fn check_rect(&self, r: &Rect) -> Result<()> {
        if r.fits_in(self.width, self.height) {
            Ok(())
        } else {
            Err(Error::RectOutOfBounds {
                rect: *r,
                width: self.width,
                height: self.height,
            })
        }
    }

    pub fn crop(&self, r: &Rect) -> Result<GrayImage> {
        self.check_rect(r)?;
        let mut data = Vec::with_capacity(r.w * r.h);
        for y in r.y..r.bottom() {
            data.extend_from_slice(&self.row(y)[r.x..r.right()]);
        }
        Ok(GrayImage {
            width: r.w,
            height: r.h,
            data,
        })
    }

    /// Copies `patch` into this image with its top-left corner at `(x, y)`,
    /// discarding whatever falls outside.
    pub fn paste(&mut self, patch: &GrayImage, x: usize, y: usize) {
        for py in 0..patch.height {
            let ty = y + py;
            if ty >= self.height {
                break;
            }
            for px in 0..patch.width {
                let tx = x + px;
                if tx >= self.width {
                    break;
                }
                self.set(tx, ty, patch.get(px, py));
            }
        }
    }
}

/// BT.601 luma of an interleaved 8-bit RGB raster.
///
/// Evaluated in integer thousandths so that `round(0.299R + 0.587G + 0.114B)`
/// is exact (halves round up).
pub fn to_grayscale(rgb: &[u8], width: usize, height: usize) -> Result<GrayImage> {
    if rgb.len() != width * height * 3 {
        return Err(Error::DimensionMismatch {
            width,
            height,
            channels: 3,
            actual: rgb.len(),
        });
    }
    let data = rgb
        .chunks_exact(3)
        .map(|p| {
            let y = (299 * p[0] as u32 + 587 * p[1] as u32 + 114 * p[2] as u32 + 500) / 1000;
            y.min(255) as u8
        })
        .collect();
    Ok(GrayImage { width, height, data })
}

/// Bilinear resize with corner-aligned sampling, 11-bit fixed-point weights.
/// Aspect ratio is not preserved.
pub fn resize(img: &GrayImage, out_w: usize, out_h: usize) -> Result<GrayImage> {
    if img.is_empty() {
        return Err(Error::EmptyImage);
    }
    if out_w == 0 || out_h == 0 {
        return Err(Error::InvalidSize {
            width: out_w,
            height: out_h,
        });
    }
    if out_w == img.width && out_h == img.height {
        return Ok(img.clone());
    }
    let xs = sample_coords(img.width, out_w);
    let ys = sample_coords(img.height, out_h);
    let mut data = Vec::with_capacity(out_w * out_h);
    for &(y0, y1, fy) in &ys {
        let r0 = img.row(y0);
        let r1 = img.row(y1);
        for &(x0, x1, fx) in &xs {
            let top = r0[x0] as u32 * (ONE - fx) + r0[x1] as u32 * fx;
            let bot = r1[x0] as u32 * (ONE - fx) + r1[x1] as u32 * fx;
            let v = (top * (ONE - fy) + bot * fy + HALF_SQ) >> (2 * FRAC_BITS);
            data.push(v.min(255) as u8);
        }
    }
    Ok(GrayImage {
        width: out_w,
        height: out_h,
        data,
    })
}

const FRAC_BITS: u32 = 11;
const ONE: u32 = 1 << FRAC_BITS;
const HALF_SQ: u32 = 1 << (2 * FRAC_BITS - 1);

/// Source index pair and fixed-point blend fraction for each output coordinate.
fn sample_coords(src: usize, dst: usize) -> Vec<(usize, usize, u32)> {
    (0..dst)
        .map(|i| {
            let s = if dst == 1 {
                0.0
            } else {
                i as f64 * (src - 1) as f64 / (dst - 1) as f64
            };
            let i0 = (s.floor() as usize).min(src - 1);
            let i1 = (i0 + 1).min(src - 1);
            let f = ((s - i0 as f64) * ONE as f64).round() as u32;
            (i0, i1, f.min(ONE))
        })
        .collect()
}

/// Exclusive-prefix sum table of size `(w + 1) x (h + 1)` with a zero first
/// row and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralImage {
    width: usize,
    height: usize,
    sums: Vec<u64>,
}

impl IntegralImage {
    pub fn new(img: &GrayImage) -> Self {
        Self::build(img, &mut 0)
    }

    /// Same as [`IntegralImage::new`], adding one to `adds` per pixel
    /// accumulated.
    pub fn build(img: &GrayImage, adds: &mut u64) -> Self {
        let w = img.width + 1;
        let h = img.height + 1;
        let mut sums = vec![0u64; w * h];
        for y in 0..img.height {
            let mut row_sum = 0u64;
            let src = img.row(y);
            let (prev, cur) = sums.split_at_mut((y + 1) * w);
            let prev = &prev[y * w..];
            let cur = &mut cur[..w];
            for x in 0..img.width {
                row_sum += src[x] as u64;
                cur[x + 1] = prev[x + 1] + row_sum;
            }
            *adds += img.width as u64;
        }
        IntegralImage {
            width: w,
            height: h,
            sums,
        }
    }

    /// Table width, i.e. source width plus one.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Table height, i.e. source height plus one.
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> u64 {
        self.sums[y * self.width + x]
    }

    pub fn sums(&self) -> &[u64] {
        &self.sums
    }

    pub fn rect_sum(&self, r: &Rect) -> Result<u64> {
        if !r.fits_in(self.width - 1, self.height - 1) {
            return Err(Error::RectOutOfBounds {
                rect: *r,
                width: self.width - 1,
                height: self.height - 1,
            });
        }
        Ok(self.rect_sum_unchecked(r.x, r.y, r.w, r.h))
    }

    #[inline]
    pub fn rect_sum_unchecked(&self, x: usize, y: usize, w: usize, h: usize) -> u64 {
        let top = y * self.width;
        let bot = (y + h) * self.width;
        self.sums[bot + x + w] + self.sums[top + x] - self.sums[top + x + w] - self.sums[bot + x]
    }
}
