use std::collections::BTreeMap;

use algdyn::classify::SystemPresentation;
use algdyn::shiftspace::{build_window, complete_window, region_membership, verify_window, Coord, Region, RESIDUAL_BOUND};
use proptest::prelude::*;

fn helmet() -> SystemPresentation {
    SystemPresentation::parse("helmet", "1 + u1 + u2", "u3 - 2").unwrap()
}

fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn seeds(dims: [usize; 3], values: &[f64]) -> BTreeMap<Coord, f64> {
    let space = build_window(&helmet(), dims).unwrap();
    space.free_set().iter().zip(values.iter().cycle()).map(|(n, v)| (*n, *v)).collect()
}

fn window_dims() -> impl Strategy<Value = [usize; 3]> {
    (2usize..=7, 2usize..=7, 2usize..=5).prop_map(|(a, b, c)| [a, b, c])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn completions_satisfy_every_relation(dims in window_dims(), values in prop::collection::vec(0.0..1.0f64, 1..64)) {
        let space = build_window(&helmet(), dims).unwrap();
        let x = complete_window(&space, &seeds(dims, &values)).unwrap();
        prop_assert!(verify_window(&space, &x) < RESIDUAL_BOUND);
    }

    #[test]
    fn completion_is_additive_in_the_seeds(
        dims in window_dims(),
        a in prop::collection::vec(0.0..1.0f64, 1..64),
        b in prop::collection::vec(0.0..1.0f64, 1..64),
    ) {
        let space = build_window(&helmet(), dims).unwrap();
        let (sa, sb) = (seeds(dims, &a), seeds(dims, &b));
        let sum: BTreeMap<Coord, f64> = sa.iter().map(|(n, v)| (*n, (v + sb[n]).fract())).collect();
        let (xa, xb, xs) = (
            complete_window(&space, &sa).unwrap(),
            complete_window(&space, &sb).unwrap(),
            complete_window(&space, &sum).unwrap(),
        );
        for (n, v) in xs.iter() {
            prop_assert!(circle_dist(v, xa.get(n) + xb.get(n)) < RESIDUAL_BOUND);
        }
    }

    #[test]
    fn shifted_restrictions_are_completions(dims in window_dims(), values in prop::collection::vec(0.0..1.0f64, 1..64), axis in 0usize..3) {
        let mut small = dims;
        small[axis] -= 1;
        let big_space = build_window(&helmet(), dims).unwrap();
        let x = complete_window(&big_space, &seeds(dims, &values)).unwrap();
        let Ok(space) = build_window(&helmet(), small) else { return Ok(()) };
        let shift = |n: Coord| {
            let mut m = n;
            m[axis] += 1;
            m
        };
        let restricted: BTreeMap<Coord, f64> = space.free_set().iter().map(|&n| (n, x.get(shift(n)))).collect();
        let y = complete_window(&space, &restricted).unwrap();
        for (n, v) in y.iter() {
            prop_assert!(circle_dist(v, x.get(shift(n))) < RESIDUAL_BOUND, "at {n:?}");
        }
    }

    #[test]
    fn regions_are_nested(n in 1i64..8, m in prop::array::uniform3(-10i64..=10)) {
        let r = region_membership(n, m).unwrap();
        if r == Region::Future {
            for k in 1..=n {
                prop_assert_eq!(region_membership(k, m).unwrap(), Region::Future);
            }
            let mut up = m;
            up[2] += 1;
            prop_assert_eq!(region_membership(n, up).unwrap(), Region::Future);
        }
        if r == Region::Slab {
            prop_assert_ne!(region_membership(n + 1, m).unwrap(), Region::Neither);
            prop_assert!(m[1] >= 0 && m[2] >= 0);
        }
    }
}

#[test]
fn doubling_along_the_third_axis() {
    let dims = [3, 3, 21];
    let space = build_window(&helmet(), dims).unwrap();
    let x = complete_window(&space, &seeds(dims, &[0.123456789, 0.5, 0.987654321])).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            for h in 0..20 {
                assert!(circle_dist(x.get([i, j, h + 1]), 2.0 * x.get([i, j, h])) < 1e-9);
            }
        }
    }
}
