//! Invariants of the statistics that hold for any input.

mod common;

use common::*;
use crg::domain::SimilaritySets;
use crg::gap::gap;
use crg::stats::similarity_sets;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sets_of(g: &Views, l: &Views) -> [f64; 6] {
    sets_array(&similarity_sets(&subset(g, l)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn image_order_does_not_matter(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, l) = random_views(&mut rng, 7, 3, 4, 8);
        let mut order: Vec<usize> = (0..g.len()).collect();
        order.shuffle(&mut rng);
        let g2: Views = order.iter().map(|&i| g[i].clone()).collect();
        let l2: Views = order.iter().map(|&i| l[i].clone()).collect();
        let (a, b) = (sets_of(&g, &l), sets_of(&g2, &l2));
        for c in 0..6 {
            prop_assert!((a[c] - b[c]).abs() < 1e-12);
        }
    }

    #[test]
    fn positive_rescaling_does_not_matter(seed in any::<u64>(), scale in 1e-3f64..1e3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, l) = random_views(&mut rng, 6, 3, 4, 8);
        let scaled = |v: &Views| -> Views {
            v.iter().map(|r| r.iter().map(|e| e.iter().map(|x| x * scale).collect()).collect()).collect()
        };
        let (a, b) = (sets_of(&g, &l), sets_of(&scaled(&g), &scaled(&l)));
        for c in 0..6 {
            prop_assert!((a[c] - b[c]).abs() < 1e-9);
        }
    }

    #[test]
    fn components_stay_in_range(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, l) = random_views(&mut rng, 8, 3, 6, 16);
        let s = sets_of(&g, &l);
        for u in &s[..3] {
            prop_assert!((-1.0..=1.0).contains(u));
        }
        for b in &s[3..] {
            prop_assert!(*b <= 0.0 && *b >= -2.0);
        }
    }

    #[test]
    fn swapping_subsets_negates_unit_gap(
        u1 in prop::array::uniform3(-1.0f64..1.0),
        b1 in prop::array::uniform3(-2.0f64..0.0),
        u2 in prop::array::uniform3(-1.0f64..1.0),
        b2 in prop::array::uniform3(-2.0f64..0.0),
    ) {
        let p = SimilaritySets::new(u1, b1).unwrap();
        let q = SimilaritySets::new(u2, b2).unwrap();
        let (x, y) = (gap(&p, &q, 1.0, 1).unwrap(), gap(&q, &p, 1.0, 1).unwrap());
        prop_assert!((x.unary_gap + y.unary_gap).abs() < 1e-12);
        prop_assert!((x.binary_gap + y.binary_gap).abs() < 1e-12);
    }
}

#[test]
fn identical_views_give_unit_unary_and_zero_binary() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (g, _) = random_views(&mut rng, 5, 3, 3, 6);
    let same = |v: &Views, k: usize| -> Views { v.iter().map(|r| vec![r[0].clone(); k]).collect() };
    let s = sets_of(&same(&g, 3), &same(&g, 4));
    for u in &s[..3] {
        assert!((u - 1.0).abs() < 1e-12);
    }
    for b in &s[3..] {
        assert_eq!(*b, 0.0);
    }
}
