//! HOG descriptors with a precomputed gradient-voting table.
//!
//! Pixel values are 8-bit, so central differences lie in `[-255, 255]` and
//! every possible `(dx, dy)` pair can be resolved ahead of time into its two
//! adjacent orientation bins and their magnitude-weighted votes. The
//! descriptor path then replaces a square root and an arctangent per pixel
//! with one table read.

use std::f64::consts::PI;

use crate::pixel::{GrayImage, Rect};
use crate::{Error, Result, WINDOW_H, WINDOW_W};

pub const GRAD_RANGE: i32 = 255;
const LUT_SIDE: usize = (2 * GRAD_RANGE + 1) as usize;
const HYS_CLIP: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HogConfig {
    pub window_w: usize,
    pub window_h: usize,
    /// Cell edge in pixels.
    pub cell: usize,
    /// Block edge in cells.
    pub block: usize,
    /// Block stride in pixels; a multiple of `cell`.
    pub block_stride: usize,
    /// Unsigned orientation bins over [0, 180) degrees.
    pub n_bins: usize,
}

impl Default for HogConfig {
    fn default() -> Self {
        HogConfig {
            window_w: WINDOW_W,
            window_h: WINDOW_H,
            cell: 8,
            block: 2,
            block_stride: 8,
            n_bins: 9,
        }
    }
}

impl HogConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(format!("HOG: {msg} ({self:?})")));
        if self.cell == 0 || self.block == 0 || self.block_stride == 0 {
            return bad("cell, block and block stride must be positive");
        }
        if !(2..=255).contains(&self.n_bins) {
            return bad("n_bins must be in 2..=255");
        }
        if self.window_w % self.cell != 0 || self.window_h % self.cell != 0 {
            return bad("window must be divisible by cell");
        }
        if self.block_stride % self.cell != 0 {
            return bad("block stride must be a multiple of the cell size");
        }
        let span = self.block * self.cell;
        if span > self.window_w || span > self.window_h {
            return bad("block larger than window");
        }
        if (self.window_w - span) % self.block_stride != 0 || (self.window_h - span) % self.block_stride != 0 {
            return bad("block stride must divide window minus block");
        }
        Ok(())
    }

    pub fn cells_x(&self) -> usize {
        self.window_w / self.cell
    }

    pub fn cells_y(&self) -> usize {
        self.window_h / self.cell
    }

    pub fn blocks_x(&self) -> usize {
        (self.window_w - self.block * self.cell) / self.block_stride + 1
    }

    pub fn blocks_y(&self) -> usize {
        (self.window_h - self.block * self.cell) / self.block_stride + 1
    }

    pub fn block_len(&self) -> usize {
        self.block * self.block * self.n_bins
    }

    pub fn descriptor_len(&self) -> usize {
        self.blocks_x() * self.blocks_y() * self.block_len()
    }

    fn block_step_cells(&self) -> usize {
        self.block_stride / self.cell
    }
}

/// Two-bin split of one gradient. The second bin is `(bin0 + 1) % n_bins`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vote {
    pub w0: f64,
    pub w1: f64,
    pub bin0: u8,
}

/// Resolves a gradient into its two adjacent unsigned-orientation bins.
///
/// Bin `k` is centred at `(k + 0.5) * 180 / n_bins` degrees; votes interpolate
/// linearly between neighbouring centres with wraparound at 180 degrees.
pub fn orientation_vote(dx: i32, dy: i32, n_bins: usize) -> Vote {
    if dx == 0 && dy == 0 {
        return Vote::default();
    }
    // (dx, dy) and (-dx, -dy) share an orientation; fold into the upper half
    // plane so both hit the identical arctangent.
    let (dx, dy) = if dy < 0 || (dy == 0 && dx < 0) {
        (-dx, -dy)
    } else {
        (dx, dy)
    };
    let (fx, fy) = (dx as f64, dy as f64);
    let magnitude = (fx * fx + fy * fy).sqrt();
    let mut angle = fy.atan2(fx);
    if angle >= PI {
        angle -= PI;
    }
    let t = angle * n_bins as f64 / PI - 0.5;
    let lo = t.floor();
    let frac = t - lo;
    let bin0 = (lo as i64).rem_euclid(n_bins as i64) as u8;
    Vote {
        w0: magnitude * (1.0 - frac),
        w1: magnitude * frac,
        bin0,
    }
}

/// Votes for every `(dx, dy)` in `[-255, 255]^2`.
#[derive(Debug, Clone)]
pub struct GradientLut {
    n_bins: usize,
    entries: Vec<Vote>,
}

impl GradientLut {
    pub fn new(cfg: &HogConfig) -> Self {
        Self::with_bins(cfg.n_bins)
    }

    pub fn with_bins(n_bins: usize) -> Self {
        let mut entries = Vec::with_capacity(LUT_SIDE * LUT_SIDE);
        for dy in -GRAD_RANGE..=GRAD_RANGE {
            for dx in -GRAD_RANGE..=GRAD_RANGE {
                entries.push(orientation_vote(dx, dy, n_bins));
            }
        }
        GradientLut { n_bins, entries }
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn get(&self, dx: i32, dy: i32) -> &Vote {
        let idx = (dy + GRAD_RANGE) as usize * LUT_SIDE + (dx + GRAD_RANGE) as usize;
        &self.entries[idx]
    }

    #[inline]
    pub fn bin1(&self, v: &Vote) -> usize {
        (v.bin0 as usize + 1) % self.n_bins
    }
}

/// Central differences with replicate-border padding; no division by two.
#[inline]
pub fn gradients(img: &GrayImage, x: usize, y: usize) -> (i32, i32) {
    let (w, h) = (img.width(), img.height());
    let xl = x.saturating_sub(1);
    let xr = (x + 1).min(w - 1);
    let yu = y.saturating_sub(1);
    let yd = (y + 1).min(h - 1);
    (
        img.get(xr, y) as i32 - img.get(xl, y) as i32,
        img.get(x, yd) as i32 - img.get(x, yu) as i32,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct HogDescriptor {
    pub values: Vec<f64>,
}

impl HogDescriptor {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Per-cell orientation histograms over a rectangular grid of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGrid {
    pub cells_x: usize,
    pub cells_y: usize,
    pub n_bins: usize,
    pub hist: Vec<f64>,
}

impl CellGrid {
    #[inline]
    pub fn cell(&self, cx: usize, cy: usize) -> &[f64] {
        let o = (cy * self.cells_x + cx) * self.n_bins;
        &self.hist[o..o + self.n_bins]
    }

    pub fn total(&self) -> f64 {
        self.hist.iter().sum()
    }
}

/// Accumulates votes for `cells_x x cells_y` cells whose grid starts at pixel
/// `(x0, y0)`. Gradients see the whole image, so cells on a window edge use
/// pixels outside the window where they exist.
fn accumulate<F>(
    img: &GrayImage,
    x0: usize,
    y0: usize,
    cells_x: usize,
    cells_y: usize,
    cfg: &HogConfig,
    vote: F,
) -> CellGrid
where
    F: Fn(i32, i32) -> (usize, f64, usize, f64),
{
    let n = cfg.n_bins;
    let mut hist = vec![0.0; cells_x * cells_y * n];
    let (w, h) = (img.width(), img.height());
    let data = img.data();
    for py in 0..cells_y * cfg.cell {
        let y = y0 + py;
        let yu = y.saturating_sub(1);
        let yd = (y + 1).min(h - 1);
        let row = &data[y * w..(y + 1) * w];
        let up = &data[yu * w..(yu + 1) * w];
        let down = &data[yd * w..(yd + 1) * w];
        let cy = py / cfg.cell;
        for px in 0..cells_x * cfg.cell {
            let x = x0 + px;
            let xl = x.saturating_sub(1);
            let xr = (x + 1).min(w - 1);
            let dx = row[xr] as i32 - row[xl] as i32;
            let dy = down[x] as i32 - up[x] as i32;
            let (b0, w0, b1, w1) = vote(dx, dy);
            let o = (cy * cells_x + px / cfg.cell) * n;
            hist[o + b0] += w0;
            hist[o + b1] += w1;
        }
    }
    CellGrid {
        cells_x,
        cells_y,
        n_bins: n,
        hist,
    }
}

/// Cell histograms over the largest cell-aligned region of `img`, votes from
/// the lookup table.
pub fn image_cell_grid(img: &GrayImage, cfg: &HogConfig, lut: &GradientLut) -> CellGrid {
    let (cx, cy) = (img.width() / cfg.cell, img.height() / cfg.cell);
    accumulate(img, 0, 0, cx, cy, cfg, lut_voter(lut))
}

fn lut_voter(lut: &GradientLut) -> impl Fn(i32, i32) -> (usize, f64, usize, f64) + '_ {
    move |dx, dy| {
        let v = lut.get(dx, dy);
        (v.bin0 as usize, v.w0, lut.bin1(v), v.w1)
    }
}

fn direct_voter(n_bins: usize) -> impl Fn(i32, i32) -> (usize, f64, usize, f64) {
    move |dx, dy| {
        let v = orientation_vote(dx, dy, n_bins);
        (v.bin0 as usize, v.w0, (v.bin0 as usize + 1) % n_bins, v.w1)
    }
}

/// L2 normalise, clip at 0.2, renormalise. Zero blocks stay zero.
pub fn l2_hys(block: &mut [f64]) {
    let norm = block.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm <= 0.0 {
        block.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    for v in block.iter_mut() {
        *v = (*v / norm).min(HYS_CLIP);
    }
    let norm = block.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        block.iter_mut().for_each(|v| *v /= norm);
    }
}

/// Writes the normalised block whose top-left cell is `(cx, cy)` into `out`.
fn gather_block(cells: &CellGrid, cx: usize, cy: usize, block: usize, out: &mut [f64]) {
    let n = cells.n_bins;
    let mut o = 0;
    for j in 0..block {
        for i in 0..block {
            out[o..o + n].copy_from_slice(cells.cell(cx + i, cy + j));
            o += n;
        }
    }
    l2_hys(out);
}

fn descriptor_from_cells(cells: &CellGrid, cx0: usize, cy0: usize, cfg: &HogConfig) -> HogDescriptor {
    let bl = cfg.block_len();
    let step = cfg.block_step_cells();
    let mut values = vec![0.0; cfg.descriptor_len()];
    let mut o = 0;
    for by in 0..cfg.blocks_y() {
        for bx in 0..cfg.blocks_x() {
            gather_block(
                cells,
                cx0 + bx * step,
                cy0 + by * step,
                cfg.block,
                &mut values[o..o + bl],
            );
            o += bl;
        }
    }
    HogDescriptor { values }
}

fn check_window(img: &GrayImage, origin: &Rect, cfg: &HogConfig) -> Result<()> {
    cfg.validate()?;
    if origin.w != cfg.window_w || origin.h != cfg.window_h {
        return Err(Error::Config(format!(
            "window {}x{} does not match HOG window {}x{}",
            origin.w, origin.h, cfg.window_w, cfg.window_h
        )));
    }
    img.check_rect(origin)
}

/// Descriptor of one window, orientation votes read from `lut`.
///
/// Blocks are concatenated row-major; cells are row-major within a block and
/// bins ascend within a cell.
pub fn window_descriptor(img: &GrayImage, origin: &Rect, cfg: &HogConfig, lut: &GradientLut) -> Result<HogDescriptor> {
    check_window(img, origin, cfg)?;
    if lut.n_bins() != cfg.n_bins {
        return Err(Error::Config(format!(
            "lookup table has {} bins, config wants {}",
            lut.n_bins(),
            cfg.n_bins
        )));
    }
    let cells = accumulate(
        img,
        origin.x,
        origin.y,
        cfg.cells_x(),
        cfg.cells_y(),
        cfg,
        lut_voter(lut),
    );
    Ok(descriptor_from_cells(&cells, 0, 0, cfg))
}

/// Same contract as [`window_descriptor`] with magnitude and angle evaluated
/// per pixel.
pub fn window_descriptor_direct(img: &GrayImage, origin: &Rect, cfg: &HogConfig) -> Result<HogDescriptor> {
    check_window(img, origin, cfg)?;
    let cells = accumulate(
        img,
        origin.x,
        origin.y,
        cfg.cells_x(),
        cfg.cells_y(),
        cfg,
        direct_voter(cfg.n_bins),
    );
    Ok(descriptor_from_cells(&cells, 0, 0, cfg))
}

/// Un-normalised cell histograms of one window (direct votes). Used to check
/// vote conservation.
pub fn window_cells_direct(img: &GrayImage, origin: &Rect, cfg: &HogConfig) -> Result<CellGrid> {
    check_window(img, origin, cfg)?;
    Ok(accumulate(
        img,
        origin.x,
        origin.y,
        cfg.cells_x(),
        cfg.cells_y(),
        cfg,
        direct_voter(cfg.n_bins),
    ))
}

/// Normalised blocks at every cell position of an image, so that any window
/// starting on a cell boundary can be assembled without recomputation.
#[derive(Debug, Clone)]
pub struct BlockGrid {
    cfg: HogConfig,
    /// Block positions per row/column (cell granularity).
    pub nx: usize,
    pub ny: usize,
    blocks: Vec<f64>,
}

impl BlockGrid {
    pub fn new(img: &GrayImage, cfg: &HogConfig, lut: &GradientLut) -> Result<Self> {
        cfg.validate()?;
        let cells = image_cell_grid(img, cfg, lut);
        if cells.cells_x < cfg.block || cells.cells_y < cfg.block {
            return Err(Error::ImageTooSmall {
                width: img.width(),
                height: img.height(),
                min_w: cfg.block * cfg.cell,
                min_h: cfg.block * cfg.cell,
            });
        }
        let nx = cells.cells_x - cfg.block + 1;
        let ny = cells.cells_y - cfg.block + 1;
        let bl = cfg.block_len();
        let mut blocks = vec![0.0; nx * ny * bl];
        for cy in 0..ny {
            for cx in 0..nx {
                let o = (cy * nx + cx) * bl;
                gather_block(&cells, cx, cy, cfg.block, &mut blocks[o..o + bl]);
            }
        }
        Ok(BlockGrid {
            cfg: *cfg,
            nx,
            ny,
            blocks,
        })
    }

    #[inline]
    pub fn block(&self, cx: usize, cy: usize) -> &[f64] {
        let bl = self.cfg.block_len();
        let o = (cy * self.nx + cx) * bl;
        &self.blocks[o..o + bl]
    }

    /// Descriptor of the window whose top-left pixel is `(cx * cell, cy * cell)`.
    pub fn window_descriptor(&self, cx: usize, cy: usize) -> HogDescriptor {
        let mut values = Vec::with_capacity(self.cfg.descriptor_len());
        self.for_each_block(cx, cy, |_, b| values.extend_from_slice(b));
        HogDescriptor { values }
    }

    /// Calls `f(offset_in_descriptor, block)` for every block of a window.
    #[inline]
    pub fn for_each_block(&self, cx: usize, cy: usize, mut f: impl FnMut(usize, &[f64])) {
        let step = self.cfg.block_step_cells();
        let bl = self.cfg.block_len();
        let mut o = 0;
        for by in 0..self.cfg.blocks_y() {
            for bx in 0..self.cfg.blocks_x() {
                f(o, self.block(cx + bx * step, cy + by * step));
                o += bl;
            }
        }
    }
}
