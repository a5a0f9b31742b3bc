mod common;

use proptest::prelude::*;
use wrtlab::multidim::LiftedWeight;
use wrtlab::sampling::{haar_orthogonal, random_ray, rng, signed_permutation};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn signed_permutations_leave_w_unchanged(seed in any::<u64>(), r in 0.0f64..2.5, s in -2.0f64..2.0) {
        let w = common::small_weight();
        let mut g = rng(seed);
        let ray = random_ray(2, r, &mut g).unwrap();
        let x = ray.point(s);
        let a = signed_permutation(2, &mut g);
        let before = w.eval(&x, &ray.dir).unwrap();
        let after = w.eval(&a.apply(&x), &a.apply(&ray.dir)).unwrap();
        prop_assert_eq!(before.to_bits(), after.to_bits());
    }

    #[test]
    fn rotations_leave_w_unchanged(seed in any::<u64>(), r in 0.0f64..2.5, s in -2.0f64..2.0) {
        let w = common::small_weight();
        let mut g = rng(seed);
        let ray = random_ray(2, r, &mut g).unwrap();
        let x = ray.point(s);
        let a = haar_orthogonal(2, &mut g);
        let before = w.eval(&x, &ray.dir).unwrap();
        let after = w.eval(&a.apply(&x), &a.apply(&ray.dir)).unwrap();
        prop_assert!((before - after).abs() <= 1e-12, "{} vs {}", before, after);
    }

    #[test]
    fn reversing_the_direction_leaves_w_unchanged(seed in any::<u64>(), r in 0.0f64..2.5, s in -2.0f64..2.0) {
        let w = common::small_weight();
        let mut g = rng(seed);
        let ray = random_ray(2, r, &mut g).unwrap();
        let x = ray.point(s);
        let back = ray.reversed();
        let a = w.eval(&x, &ray.dir).unwrap();
        let b = w.eval(&x, &back.dir).unwrap();
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn lifted_weight_is_rotation_invariant(seed in any::<u64>(), r in 0.0f64..2.5, s in -2.0f64..2.0) {
        let w = common::small_weight();
        let lw = LiftedWeight::new(w, 3).unwrap();
        let mut g = rng(seed);
        let ray = random_ray(3, r, &mut g).unwrap();
        let x = ray.point(s);
        let p = signed_permutation(3, &mut g);
        let q = haar_orthogonal(3, &mut g);
        let before = lw.eval(&x, &ray.dir).unwrap();
        let permuted = lw.eval(&p.apply(&x), &p.apply(&ray.dir)).unwrap();
        let rotated = lw.eval(&q.apply(&x), &q.apply(&ray.dir)).unwrap();
        prop_assert_eq!(before.to_bits(), permuted.to_bits());
        prop_assert!((before - rotated).abs() <= 1e-12);
    }
}
