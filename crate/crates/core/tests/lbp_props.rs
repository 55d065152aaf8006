use pedscan_core::lbp::{feature_pool, lbp_map_direct, lbp_map_integral, LbpConfig};
use pedscan_core::{GrayImage, IntegralImage};
use proptest::prelude::*;

fn image(w: usize, h: usize) -> impl Strategy<Value = GrayImage> {
    proptest::collection::vec(any::<u8>(), w * h).prop_map(move |d| GrayImage::new(w, h, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integral_equals_direct(img in image(30, 22), e in 1usize..4, tiled in any::<bool>()) {
        let cfg = if tiled { LbpConfig::tiled(e) } else { LbpConfig::square(e) };
        prop_assert_eq!(lbp_map_integral(&img, &cfg).unwrap(), lbp_map_direct(&img, &cfg).unwrap());
    }

    #[test]
    fn strictly_monotone_maps_preserve_codes(img in image(20, 20), e in 1usize..3, k in 0u8..100) {
        // a constant shift preserves every batch-sum comparison
        let cfg = LbpConfig::square(e);
        let shifted = GrayImage::from_fn(20, 20, |x, y| (img.get(x, y) / 2).saturating_add(k));
        let halved = GrayImage::from_fn(20, 20, |x, y| img.get(x, y) / 2);
        prop_assert_eq!(lbp_map_integral(&shifted, &cfg).unwrap(), lbp_map_integral(&halved, &cfg).unwrap());
    }

    #[test]
    fn feature_code_matches_map(img in image(32, 64), pick in any::<prop::sample::Index>()) {
        let pool = feature_pool(32, 64, &[1, 2, 4]);
        let f = pool[pick.index(pool.len())];
        let ii = IntegralImage::new(&img);
        let map = lbp_map_direct(&img, &LbpConfig::square(f.scale)).unwrap();
        prop_assert_eq!(f.code_at(&ii, 0, 0), map.get(f.x, f.y));
    }
}

#[test]
fn constant_image_codes_are_zero() {
    let img = GrayImage::filled(16, 16, 77);
    for e in [1, 2, 4] {
        let m = lbp_map_integral(&img, &LbpConfig::square(e)).unwrap();
        assert!(m.codes.iter().all(|&c| c == 0));
    }
}
