use pedscan_core::hog::{
    orientation_vote, window_cells_direct, window_descriptor, window_descriptor_direct, BlockGrid, GradientLut,
    HogConfig,
};
use pedscan_core::{GrayImage, Rect};
use proptest::prelude::*;

fn image(w: usize, h: usize) -> impl Strategy<Value = GrayImage> {
    proptest::collection::vec(any::<u8>(), w * h).prop_map(move |d| GrayImage::new(w, h, d).unwrap())
}

fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn lut_weights_sum_to_magnitude() {
    let lut = GradientLut::new(&HogConfig::default());
    assert_eq!(lut.len(), 511 * 511);
    for dy in -255..=255 {
        for dx in -255..=255 {
            let v = lut.get(dx, dy);
            let m = ((dx * dx + dy * dy) as f64).sqrt();
            assert!((v.w0 as f64 + v.w1 as f64 - m).abs() < 1e-9, "({dx},{dy})");
            assert!(v.w0 >= 0.0 && v.w1 >= 0.0);
        }
    }
}

#[test]
fn opposite_gradients_vote_identically() {
    for dy in -255..=255 {
        for dx in -255..=255 {
            assert_eq!(orientation_vote(dx, dy, 9), orientation_vote(-dx, -dy, 9));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lut_equals_direct(img in image(48, 80), ox in 0usize..=16, oy in 0usize..=16) {
        let cfg = HogConfig::default();
        let lut = GradientLut::new(&cfg);
        let r = Rect::new(ox, oy, 32, 64);
        let a = window_descriptor(&img, &r, &cfg, &lut).unwrap();
        let b = window_descriptor_direct(&img, &r, &cfg).unwrap();
        prop_assert_eq!(a.len(), 756);
        prop_assert!(max_abs(&a.values, &b.values) <= 1e-6);
    }

    #[test]
    fn block_grid_equals_window_path(img in image(64, 96), cx in 0usize..=4, cy in 0usize..=4) {
        let cfg = HogConfig::default();
        let lut = GradientLut::new(&cfg);
        let grid = BlockGrid::new(&img, &cfg, &lut).unwrap();
        let a = grid.window_descriptor(cx, cy);
        let b = window_descriptor(&img, &Rect::new(cx * 8, cy * 8, 32, 64), &cfg, &lut).unwrap();
        prop_assert!(max_abs(&a.values, &b.values) <= 1e-12);
    }

    #[test]
    fn votes_conserve_gradient_mass(img in image(32, 64)) {
        let cfg = HogConfig::default();
        let cells = window_cells_direct(&img, &Rect::new(0, 0, 32, 64), &cfg).unwrap();
        let mut mass = 0.0;
        for y in 0..64 {
            for x in 0..32 {
                let (dx, dy) = pedscan_core::hog::gradients(&img, x, y);
                mass += ((dx * dx + dy * dy) as f64).sqrt();
            }
        }
        prop_assert!((cells.total() - mass).abs() <= 1e-6 * mass.max(1.0));
    }

    #[test]
    fn descriptor_is_bounded(img in image(32, 64)) {
        let cfg = HogConfig::default();
        let d = window_descriptor(&img, &Rect::new(0, 0, 32, 64), &cfg, &GradientLut::new(&cfg)).unwrap();
        // after L2-Hys each block has unit norm or is all zero
        for b in d.values.chunks(cfg.block_len()) {
            let n: f64 = b.iter().map(|v| v * v).sum();
            prop_assert!(n == 0.0 || (n - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn rotating_the_window_180_degrees_permutes_cells() {
    // rotating by 180 degrees negates every gradient; unsigned bins are unchanged
    let img = GrayImage::from_fn(32, 64, |x, y| ((x * 37 + y * 11 + x * y) % 251) as u8);
    let rot = GrayImage::from_fn(32, 64, |x, y| img.get(31 - x, 63 - y));
    let cfg = HogConfig::default();
    let a = window_cells_direct(&img, &Rect::new(0, 0, 32, 64), &cfg).unwrap();
    let b = window_cells_direct(&rot, &Rect::new(0, 0, 32, 64), &cfg).unwrap();
    for cy in 0..a.cells_y {
        for cx in 0..a.cells_x {
            let p = a.cell(cx, cy);
            let q = b.cell(a.cells_x - 1 - cx, a.cells_y - 1 - cy);
            assert!(max_abs(p, q) < 1e-9, "cell ({cx},{cy})");
        }
    }
}
