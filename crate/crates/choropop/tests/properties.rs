//! Property tests over the geometry and classification invariants.

use choropop::classify::{classify, quantile_breaks};
use choropop::geometry::{polygon_area, ring_signed_area, Point, Ring};
use choropop::scene::{depth_sort, PrismFaces};
use proptest::prelude::*;

fn arbitrary_ring() -> impl Strategy<Value = Ring> {
    // Star-shaped rings around the origin: strictly positive area, no
    // self-intersections.
    (3usize..24, proptest::collection::vec(0.2f64..10.0, 24))
        .prop_map(|(n, radii)| {
            let mut ring: Ring = (0..n)
                .map(|i| {
                    let angle = i as f64 / n as f64 * std::f64::consts::TAU;
                    let r = radii[i % radii.len()];
                    Point::new(r * angle.cos(), r * angle.sin())
                })
                .collect();
            ring.push(ring[0]);
            ring
        })
}

proptest! {
    #[test]
    fn area_translation_invariant(ring in arbitrary_ring(), dx in -1e3f64..1e3, dy in -1e3f64..1e3) {
        let base = polygon_area(&[ring.clone()]).unwrap();
        let moved: Ring = ring.iter().map(|p| Point::new(p.x + dx, p.y + dy)).collect();
        let moved_area = polygon_area(&[moved]).unwrap();
        prop_assert!((moved_area - base).abs() <= 1e-6 * base.max(1.0));
    }

    #[test]
    fn area_scales_quadratically(ring in arbitrary_ring(), scale in 0.1f64..10.0) {
        let base = polygon_area(&[ring.clone()]).unwrap();
        let scaled: Ring = ring.iter().map(|p| Point::new(p.x * scale, p.y * scale)).collect();
        let scaled_area = polygon_area(&[scaled]).unwrap();
        prop_assert!((scaled_area - base * scale * scale).abs() <= 1e-9 * (base * scale * scale));
    }

    #[test]
    fn area_invariant_under_cycle_rotation(ring in arbitrary_ring(), shift in 0usize..24) {
        let base = polygon_area(&[ring.clone()]).unwrap();
        let mut open: Ring = ring[..ring.len() - 1].to_vec();
        let shift = shift % open.len();
        open.rotate_left(shift);
        open.push(open[0]);
        prop_assert!((polygon_area(&[open]).unwrap() - base).abs() <= 1e-9 * base);
    }

    #[test]
    fn ring_orientation_flips_sign(ring in arbitrary_ring()) {
        let signed = ring_signed_area(&ring);
        let mut reversed = ring.clone();
        reversed.reverse();
        prop_assert!((ring_signed_area(&reversed) + signed).abs() <= 1e-12 * signed.abs());
    }

    #[test]
    fn classify_is_monotone(values in proptest::collection::vec(0.0f64..1000.0, 1..200), k in 1usize..=9) {
        let breaks = quantile_breaks(&values, k).unwrap();
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let classes: Vec<usize> = sorted.iter().map(|&v| classify(v, &breaks)).collect();
        prop_assert!(classes.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(breaks.effective_k >= 1 && breaks.effective_k <= k);
        prop_assert!(breaks.boundaries.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn quantile_classes_balanced_when_divisible(seed in 0u64..1000) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(1..=8usize);
        let n = k * rng.random_range(1..=25usize);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let mut distinct = values.clone();
        distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        distinct.dedup();
        prop_assume!(distinct.len() == n);

        let breaks = quantile_breaks(&values, k).unwrap();
        let mut counts = vec![0usize; breaks.effective_k];
        for &v in &values {
            counts[classify(v, &breaks)] += 1;
        }
        prop_assert!(counts.iter().all(|&c| c == n / k), "{:?}", counts);
    }

    #[test]
    fn depth_sort_is_descending_permutation(keys in proptest::collection::vec(-1e6f64..1e6, 0..100)) {
        let faces: Vec<PrismFaces> = keys
            .iter()
            .enumerate()
            .map(|(i, &depth_key)| PrismFaces {
                id: format!("f{i:03}"),
                top: vec![],
                sides: vec![],
                depth_key,
            })
            .collect();
        let sorted = depth_sort(faces);
        prop_assert_eq!(sorted.len(), keys.len());
        prop_assert!(sorted.windows(2).all(|w| w[0].depth_key >= w[1].depth_key));
        let mut seen: Vec<&str> = sorted.iter().map(|f| f.id.as_str()).collect();
        seen.sort_unstable();
        prop_assert!(seen.windows(2).all(|w| w[0] != w[1]));
    }
}
