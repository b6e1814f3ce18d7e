use algdyn::laurent::{newton_polygon, parse_poly, univariate_roots, Exponent, IntLaurentPoly, RootConfig};
use num_complex::Complex64;
use proptest::prelude::*;

fn poly(arity: usize, max_exp: i64, max_terms: usize) -> impl Strategy<Value = IntLaurentPoly> {
    prop::collection::vec((prop::collection::vec(-max_exp..=max_exp, arity), -9i64..=9), 1..=max_terms).prop_map(
        move |terms| IntLaurentPoly::from_terms(arity, terms.into_iter().map(|(e, c)| (Exponent::new(&e), c))),
    )
}

fn nonzero(arity: usize, max_exp: i64, max_terms: usize) -> impl Strategy<Value = IntLaurentPoly> {
    poly(arity, max_exp, max_terms).prop_filter("nonzero", |p| !p.is_zero())
}

proptest! {
    #[test]
    fn format_then_parse_is_identity(p in poly(3, 4, 6)) {
        prop_assert_eq!(parse_poly(&p.to_string(), 3).unwrap(), p);
    }

    #[test]
    fn ring_laws(p in poly(2, 3, 4), q in poly(2, 3, 4), r in poly(2, 3, 4)) {
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn evaluation_is_a_homomorphism(p in poly(2, 3, 4), q in poly(2, 3, 4), s in 0.0..1.0f64, t in 0.0..1.0f64) {
        let at = [Complex64::from_polar(1.0, 6.3 * s), Complex64::from_polar(1.0, 6.3 * t)];
        let lhs = (&p * &q).eval(&at);
        let rhs = p.eval(&at) * q.eval(&at);
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
    }

    #[test]
    fn newton_polygon_of_product_is_minkowski_sum(p in nonzero(2, 3, 5), q in nonzero(2, 3, 5)) {
        let np = newton_polygon(&p).unwrap();
        let nq = newton_polygon(&q).unwrap();
        prop_assert_eq!(newton_polygon(&(&p * &q)).unwrap(), np.minkowski_sum(&nq));
    }

    #[test]
    fn root_balls_satisfy_residual_and_vieta(
        coeffs in prop::collection::vec(-20i64..=20, 2..=9).prop_filter("degree", |c| *c.last().unwrap() != 0 && c[0] != 0)
    ) {
        let p = IntLaurentPoly::from_terms(1, coeffs.iter().enumerate().map(|(i, &c)| (Exponent::new(&[i as i64]), c)));
        let set = univariate_roots(&p, &RootConfig::default()).unwrap();
        let n = coeffs.len() - 1;
        prop_assert_eq!(set.roots.len(), n);
        let scale = |z: Complex64| coeffs.iter().enumerate().map(|(i, &c)| (c as f64).abs() * z.norm().powi(i as i32)).sum::<f64>();
        for r in &set.roots {
            prop_assert!(r.radius < 1e-6, "radius {}", r.radius);
            prop_assert!(p.eval(&[r.value]).norm() <= 1e-9 * scale(r.value));
        }
        // sum of roots = -a_{n-1} / a_n
        let sum: Complex64 = set.roots.iter().map(|r| r.value).sum();
        let expected = -(coeffs[n - 1] as f64) / coeffs[n] as f64;
        let slack: f64 = set.roots.iter().map(|r| r.radius).sum::<f64>() + 1e-9 * (1.0 + expected.abs());
        prop_assert!((sum - expected).norm() <= slack);
    }
}

#[test]
fn parse_rejects_malformed_input() {
    for bad in ["", "1 +", "u", "u4", "1.5*u1", "u1^", "(1 + u1", "2**u1"] {
        assert!(parse_poly(bad, 3).is_err(), "{bad:?} accepted");
    }
    assert!(parse_poly("u3", 2).is_err());
}
