//! Synthetic pedestrian scenes.
//!
//! Stick-figure silhouettes (head, torso, arms, legs) painted over cluttered
//! backgrounds. Used by tests, the benchmark harness and the browser demo where
//! no annotated corpus is available. Everything is deterministic in the RNG.

use rand::Rng;

use crate::pixel::{resize, GrayImage, Rect};
use crate::{WINDOW_H, WINDOW_W};

#[derive(Debug, Clone, Copy)]
struct Pose {
    jx: f64,
    jy: f64,
    left_leg: f64,
    right_leg: f64,
    arm_drop: f64,
}

impl Pose {
    fn random(rng: &mut impl Rng) -> Self {
        Pose {
            jx: rng.gen_range(-1.5..=1.5),
            jy: rng.gen_range(-1.5..=1.5),
            left_leg: rng.gen_range(-2.0..=1.0),
            right_leg: rng.gen_range(-1.0..=2.0),
            arm_drop: rng.gen_range(-2.0..=2.0),
        }
    }

    /// Silhouette test in window units (32x64 frame).
    fn contains(&self, u: f64, v: f64) -> bool {
        let (u, v) = (u - self.jx, v - self.jy);
        let head = (u - 16.0).powi(2) + (v - 9.0).powi(2) <= 25.0;
        let torso = (10.0..22.0).contains(&u) && (15.0..36.0).contains(&v);
        let arm_v = 16.0..34.0 + self.arm_drop;
        let arms = ((6.5..9.5).contains(&u) || (22.5..25.5).contains(&u)) && arm_v.contains(&v);
        let legs = (36.0..60.0).contains(&v)
            && ((10.0 + self.left_leg..15.0 + self.left_leg).contains(&u)
                || (17.0 + self.right_leg..22.0 + self.right_leg).contains(&u));
        head || torso || arms || legs
    }
}

fn clamp_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Paints one figure whose window-sized frame, scaled by `scale`, has its
/// top-left at `(x, y)`. Returns the frame rectangle clipped to the canvas.
pub fn draw_figure(canvas: &mut GrayImage, x: usize, y: usize, scale: f64, rng: &mut impl Rng) -> Rect {
    let pose = Pose::random(rng);
    let fw = ((WINDOW_W as f64 * scale).round() as usize).min(canvas.width() - x);
    let fh = ((WINDOW_H as f64 * scale).round() as usize).min(canvas.height() - y);
    // contrast against the local background mean
    let mut bg = 0.0;
    for py in y..y + fh {
        for px in x..x + fw {
            bg += canvas.get(px, py) as f64;
        }
    }
    bg /= (fw * fh).max(1) as f64;
    let delta = rng.gen_range(60.0..110.0);
    let fg = if bg > 128.0 || (bg > 70.0 && rng.gen_bool(0.5)) {
        bg - delta
    } else {
        bg + delta
    };
    for py in y..y + fh {
        for px in x..x + fw {
            let u = (px - x) as f64 / scale;
            let v = (py - y) as f64 / scale;
            if pose.contains(u, v) {
                let n: f64 = rng.gen_range(-8.0..8.0);
                canvas.set(px, py, clamp_u8(fg + n));
            }
        }
    }
    Rect::new(x, y, fw, fh)
}

/// Smooth gradient with pixel noise and random rectangles, bars and discs.
pub fn clutter(w: usize, h: usize, rng: &mut impl Rng) -> GrayImage {
    let base = rng.gen_range(60.0..190.0);
    let gx = rng.gen_range(-0.15..0.15);
    let gy = rng.gen_range(-0.15..0.15);
    let mut img = GrayImage::from_fn(w, h, |x, y| {
        clamp_u8(base + gx * x as f64 + gy * y as f64 + rng.gen_range(-10.0..10.0))
    });
    let n_shapes = 2 + (w * h) / 3000;
    for _ in 0..n_shapes {
        let v = rng.gen_range(0.0..255.0);
        match rng.gen_range(0..3) {
            0 => {
                let rw = rng.gen_range(3..=(w / 3).max(4));
                let rh = rng.gen_range(3..=(h / 3).max(4));
                let x0 = rng.gen_range(0..w);
                let y0 = rng.gen_range(0..h);
                for y in y0..(y0 + rh).min(h) {
                    for x in x0..(x0 + rw).min(w) {
                        img.set(x, y, clamp_u8(v + rng.gen_range(-6.0..6.0)));
                    }
                }
            }
            1 => {
                let (cx, cy) = (rng.gen_range(0.0..w as f64), rng.gen_range(0.0..h as f64));
                let r: f64 = rng.gen_range(2.0..(w.min(h) as f64 / 5.0).max(3.0));
                let (x0, x1) = ((cx - r).max(0.0) as usize, ((cx + r) as usize + 1).min(w));
                let (y0, y1) = ((cy - r).max(0.0) as usize, ((cy + r) as usize + 1).min(h));
                for y in y0..y1 {
                    for x in x0..x1 {
                        if (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= r * r {
                            img.set(x, y, clamp_u8(v));
                        }
                    }
                }
            }
            _ => {
                // straight bar at a random angle
                let (cx, cy) = (rng.gen_range(0.0..w as f64), rng.gen_range(0.0..h as f64));
                let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
                let len = rng.gen_range(5.0..(w.max(h) as f64 / 2.0).max(6.0));
                let half = rng.gen_range(0.5..2.5);
                let (dx, dy) = (theta.cos(), theta.sin());
                let steps = (len * 2.0) as usize;
                for s in 0..steps {
                    let t = s as f64 / 2.0 - len / 2.0;
                    let (px, py) = (cx + t * dx, cy + t * dy);
                    let mut o = -half;
                    while o <= half {
                        let (qx, qy) = (px - o * dy, py + o * dx);
                        if qx >= 0.0 && qy >= 0.0 && (qx as usize) < w && (qy as usize) < h {
                            img.set(qx as usize, qy as usize, clamp_u8(v));
                        }
                        o += 0.5;
                    }
                }
            }
        }
    }
    img
}

/// Window-sized patch containing one centred figure.
pub fn figure_patch(rng: &mut impl Rng) -> GrayImage {
    let mut img = clutter(WINDOW_W, WINDOW_H, rng);
    draw_figure(&mut img, 0, 0, 1.0, rng);
    img
}

/// Window-sized background-only patch.
pub fn background_patch(rng: &mut impl Rng) -> GrayImage {
    // draw larger and downscale so clutter statistics match scene crops
    let s = rng.gen_range(1.0..2.0);
    let big = clutter((WINDOW_W as f64 * s) as usize, (WINDOW_H as f64 * s) as usize, rng);
    resize(&big, WINDOW_W, WINDOW_H).expect("non-empty")
}

/// Cluttered scene with up to `n_figures` non-overlapping figures at scales
/// `[1, max_scale]`. Returns the image and the figure frames.
pub fn scene(w: usize, h: usize, n_figures: usize, max_scale: f64, rng: &mut impl Rng) -> (GrayImage, Vec<Rect>) {
    let mut img = clutter(w, h, rng);
    let mut boxes: Vec<Rect> = Vec::new();
    let mut tries = 0;
    while boxes.len() < n_figures && tries < 200 {
        tries += 1;
        let scale = rng.gen_range(1.0..=max_scale.max(1.0));
        let fw = (WINDOW_W as f64 * scale).round() as usize;
        let fh = (WINDOW_H as f64 * scale).round() as usize;
        if fw > w || fh > h {
            continue;
        }
        let x = rng.gen_range(0..=w - fw);
        let y = rng.gen_range(0..=h - fh);
        let cand = Rect::new(x, y, fw, fh);
        if boxes.iter().any(|b| b.intersection_area(&cand) > 0) {
            continue;
        }
        boxes.push(draw_figure(&mut img, x, y, scale, rng));
    }
    (img, boxes)
}

/// `n_pos` figure patches and `n_neg` background patches.
pub fn patch_set(n_pos: usize, n_neg: usize, rng: &mut impl Rng) -> (Vec<GrayImage>, Vec<GrayImage>) {
    let pos = (0..n_pos).map(|_| figure_patch(rng)).collect();
    let neg = (0..n_neg).map(|_| background_patch(rng)).collect();
    (pos, neg)
}

/// Window patches separable by one scale-2 LBP feature at (0, 0): positives
/// carry a bright 2x2 spot at the neighbourhood centre, negatives at its
/// top-left neighbour. Backgrounds differ slightly per patch.
pub fn separable_patch_set(n: usize) -> (Vec<GrayImage>, Vec<GrayImage>) {
    let make = |cx: usize, cy: usize, base: u8| {
        GrayImage::from_fn(WINDOW_W, WINDOW_H, |x, y| {
            if (cx..cx + 2).contains(&x) && (cy..cy + 2).contains(&y) {
                200
            } else {
                base
            }
        })
    };
    let base = |k: usize| 10 + (k % 100) as u8;
    let pos = (0..n).map(|k| make(2, 2, base(k))).collect();
    let neg = (0..n).map(|k| make(0, 0, base(k))).collect();
    (pos, neg)
}
