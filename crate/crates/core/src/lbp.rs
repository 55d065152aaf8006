//! Batch local binary patterns.
//!
//! Each of the nine cells of a 3x3 neighbourhood is the sum of a
//! `batch_w x batch_h` pixel rectangle rather than a single pixel. Sums are read
//! off an [`IntegralImage`], so the whole code map costs one prefix-sum pass
//! plus eight comparisons per code.
//!
//! Bit layout: neighbours TL, T, TR, R, BR, B, BL, L with TL as the most
//! significant bit. A bit is set iff the neighbour sum is strictly greater than
//! the centre sum.

use crate::pixel::{GrayImage, IntegralImage};
use crate::{Error, Result};

/// Neighbour offsets in batch units, in bit order (MSB first).
pub const NEIGHBOR_OFFSETS: [(usize, usize); 8] = [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LbpConfig {
    pub batch_w: usize,
    pub batch_h: usize,
    /// Pixel distance between neighbouring code positions. `1` gives a dense
    /// map; `batch_w == batch_h == stride` tiles the image into disjoint batches.
    pub stride: usize,
}

impl Default for LbpConfig {
    fn default() -> Self {
        LbpConfig {
            batch_w: 2,
            batch_h: 2,
            stride: 1,
        }
    }
}

impl LbpConfig {
    pub fn square(edge: usize) -> Self {
        LbpConfig {
            batch_w: edge,
            batch_h: edge,
            stride: 1,
        }
    }

    /// Disjoint batches: code positions advance by one batch.
    pub fn tiled(edge: usize) -> Self {
        LbpConfig {
            batch_w: edge,
            batch_h: edge,
            stride: edge,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_w == 0 || self.batch_h == 0 || self.stride == 0 {
            return Err(Error::Config(format!(
                "LBP batch {}x{} / stride {} must be positive",
                self.batch_w, self.batch_h, self.stride
            )));
        }
        Ok(())
    }

    fn grid_dims(&self, img: &GrayImage) -> Result<(usize, usize)> {
        self.validate()?;
        let (nw, nh) = (3 * self.batch_w, 3 * self.batch_h);
        if img.width() < nw || img.height() < nh {
            return Err(Error::ImageTooSmall {
                width: img.width(),
                height: img.height(),
                min_w: nw,
                min_h: nh,
            });
        }
        Ok((
            (img.width() - nw) / self.stride + 1,
            (img.height() - nh) / self.stride + 1,
        ))
    }
}

/// Codes for every position where a full 3x3 batch neighbourhood fits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LbpCodeMap {
    pub grid_w: usize,
    pub grid_h: usize,
    pub codes: Vec<u8>,
}

impl LbpCodeMap {
    #[inline]
    pub fn get(&self, gx: usize, gy: usize) -> u8 {
        self.codes[gy * self.grid_w + gx]
    }
}

/// Work tally for one code-map construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCount {
    /// Pixel accumulations into the integral image.
    pub integral_adds: u64,
    /// Batch sums evaluated (each one O(1) rect-sum on the integral image).
    pub batch_lookups: u64,
    /// Neighbour-versus-centre comparisons.
    pub comparisons: u64,
}

impl OpCount {
    /// Integral pass plus comparisons, the two terms of the `S + 8 * codes`
    /// cost model.
    pub fn model_cost(&self) -> u64 {
        self.integral_adds + self.comparisons
    }
}

#[inline]
pub fn lbp_code(neighbors: &[u64; 8], center: u64) -> u8 {
    neighbors.iter().fold(0u8, |code, &n| (code << 1) | (n > center) as u8)
}

pub fn lbp_map_integral(img: &GrayImage, cfg: &LbpConfig) -> Result<LbpCodeMap> {
    lbp_map_integral_counted(img, cfg, &mut OpCount::default())
}

/// Integral-image code map with an operation tally.
///
/// Batch sums are first gathered on the stride lattice (one rect-sum each);
/// codes then compare lattice entries. When the stride does not divide the
/// batch size the lattice cannot be shared and each code reads its nine sums
/// directly.
pub fn lbp_map_integral_counted(img: &GrayImage, cfg: &LbpConfig, ops: &mut OpCount) -> Result<LbpCodeMap> {
    let (grid_w, grid_h) = cfg.grid_dims(img)?;
    let ii = IntegralImage::build(img, &mut ops.integral_adds);
    let (bw, bh, s) = (cfg.batch_w, cfg.batch_h, cfg.stride);
    let mut codes = Vec::with_capacity(grid_w * grid_h);

    if bw % s == 0 && bh % s == 0 {
        let (kx, ky) = (bw / s, bh / s);
        let lat_w = (img.width() - bw) / s + 1;
        let lat_h = (img.height() - bh) / s + 1;
        let mut lattice = Vec::with_capacity(lat_w * lat_h);
        for ly in 0..lat_h {
            for lx in 0..lat_w {
                lattice.push(ii.rect_sum_unchecked(lx * s, ly * s, bw, bh));
            }
        }
        ops.batch_lookups += lattice.len() as u64;
        for gy in 0..grid_h {
            for gx in 0..grid_w {
                let at = |i: usize, j: usize| lattice[(gy + j * ky) * lat_w + gx + i * kx];
                let mut nb = [0u64; 8];
                for (k, &(i, j)) in NEIGHBOR_OFFSETS.iter().enumerate() {
                    nb[k] = at(i, j);
                }
                codes.push(lbp_code(&nb, at(1, 1)));
            }
        }
    } else {
        for gy in 0..grid_h {
            for gx in 0..grid_w {
                let (x0, y0) = (gx * s, gy * s);
                let sum = |i: usize, j: usize| ii.rect_sum_unchecked(x0 + i * bw, y0 + j * bh, bw, bh);
                let mut nb = [0u64; 8];
                for (k, &(i, j)) in NEIGHBOR_OFFSETS.iter().enumerate() {
                    nb[k] = sum(i, j);
                }
                codes.push(lbp_code(&nb, sum(1, 1)));
            }
        }
        ops.batch_lookups += 9 * codes.len() as u64;
    }
    ops.comparisons += 8 * codes.len() as u64;
    Ok(LbpCodeMap { grid_w, grid_h, codes })
}

/// Reference code map: every batch sum is an explicit pixel loop.
pub fn lbp_map_direct(img: &GrayImage, cfg: &LbpConfig) -> Result<LbpCodeMap> {
    let (grid_w, grid_h) = cfg.grid_dims(img)?;
    let (bw, bh) = (cfg.batch_w, cfg.batch_h);
    let batch_sum = |x0: usize, y0: usize| -> u64 {
        let mut s = 0u64;
        for y in y0..y0 + bh {
            for x in x0..x0 + bw {
                s += img.get(x, y) as u64;
            }
        }
        s
    };
    let mut codes = Vec::with_capacity(grid_w * grid_h);
    for gy in 0..grid_h {
        for gx in 0..grid_w {
            let (x0, y0) = (gx * cfg.stride, gy * cfg.stride);
            let mut nb = [0u64; 8];
            for (k, &(i, j)) in NEIGHBOR_OFFSETS.iter().enumerate() {
                nb[k] = batch_sum(x0 + i * bw, y0 + j * bh);
            }
            codes.push(lbp_code(&nb, batch_sum(x0 + bw, y0 + bh)));
        }
    }
    Ok(LbpCodeMap { grid_w, grid_h, codes })
}

/// Classic single-pixel LBP with one code per pixel; neighbours outside the
/// image replicate the nearest edge pixel. Baseline for the cost comparison.
pub fn lbp_map_single_pixel_counted(img: &GrayImage, ops: &mut OpCount) -> Vec<u8> {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let px = |x: isize, y: isize| img.get(x.clamp(0, w - 1) as usize, y.clamp(0, h - 1) as usize) as u64;
    let mut codes = Vec::with_capacity(img.data().len());
    for y in 0..h {
        for x in 0..w {
            let mut nb = [0u64; 8];
            for (k, &(i, j)) in NEIGHBOR_OFFSETS.iter().enumerate() {
                nb[k] = px(x + i as isize - 1, y + j as isize - 1);
            }
            codes.push(lbp_code(&nb, px(x, y)));
        }
    }
    ops.comparisons += 8 * codes.len() as u64;
    codes
}

/// One candidate weak-learner feature: a 3x3 neighbourhood of `scale x scale`
/// batches whose top-left corner sits at `(x, y)` inside the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LbpFeatureId {
    pub x: usize,
    pub y: usize,
    pub scale: usize,
}

impl LbpFeatureId {
    pub fn fits(&self, window_w: usize, window_h: usize) -> bool {
        self.scale >= 1 && self.x + 3 * self.scale <= window_w && self.y + 3 * self.scale <= window_h
    }

    /// Code of this feature for a window whose top-left is `(ox, oy)` in the
    /// image behind `ii`.
    #[inline]
    pub fn code_at(&self, ii: &IntegralImage, ox: usize, oy: usize) -> u8 {
        let s = self.scale;
        let (x0, y0) = (ox + self.x, oy + self.y);
        // the 3x3 batches share a 4x4 lattice of integral-table corners
        let stride = ii.width();
        let sums = ii.sums();
        let mut c = [[0u64; 4]; 4];
        for (j, row) in c.iter_mut().enumerate() {
            let base = (y0 + j * s) * stride + x0;
            for (i, v) in row.iter_mut().enumerate() {
                *v = sums[base + i * s];
            }
        }
        let sum = |i: usize, j: usize| c[j + 1][i + 1] + c[j][i] - c[j][i + 1] - c[j + 1][i];
        let mut nb = [0u64; 8];
        for (k, &(i, j)) in NEIGHBOR_OFFSETS.iter().enumerate() {
            nb[k] = sum(i, j);
        }
        lbp_code(&nb, sum(1, 1))
    }
}

/// All features fitting in the window, ordered by (scale, y, x).
pub fn feature_pool(window_w: usize, window_h: usize, scales: &[usize]) -> Vec<LbpFeatureId> {
    let mut pool = Vec::new();
    for &scale in scales {
        if scale == 0 || 3 * scale > window_w || 3 * scale > window_h {
            continue;
        }
        for y in 0..=window_h - 3 * scale {
            for x in 0..=window_w - 3 * scale {
                pool.push(LbpFeatureId { x, y, scale });
            }
        }
    }
    pool
}
