use filtra::fdnorm::FiniteDimNorm;
use filtra::rational::{dot, pow_q, q, to_f64};
use filtra::sampling;
use filtra::{Exponent, Q};
use num_traits::Signed;
use proptest::prelude::*;

fn powered(a: &FiniteDimNorm, b: &FiniteDimNorm, p: Exponent) -> Q {
    a.distance(b, &p).unwrap().powered().cloned().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fd_metric_axioms(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = sampling::rng(seed);
        let (x, y, z) = (sampling::fd_norm(&mut rng, n), sampling::fd_norm(&mut rng, n), sampling::fd_norm(&mut rng, n));
        for p in [Exponent::int(1), Exponent::Infinity] {
            prop_assert_eq!(powered(&x, &y, p.clone()), powered(&y, &x, p.clone()));
            prop_assert_eq!(powered(&x, &x, p.clone()), q(0));
            prop_assert!(powered(&x, &z, p.clone()) <= powered(&x, &y, p.clone()) + powered(&y, &z, p.clone()));
        }
        let d2 = |a: &FiniteDimNorm, b: &FiniteDimNorm| a.distance(b, &Exponent::int(2)).unwrap().to_f64();
        prop_assert!(d2(&x, &z) <= d2(&x, &y) + d2(&y, &z) + 1e-12);
        if powered(&x, &y, Exponent::Infinity) == q(0) {
            prop_assert_eq!(x.relative_spectrum(&y).unwrap().values().iter().filter(|v| **v != q(0)).count(), 0);
        }
    }

    #[test]
    fn fd_interpolation(seed in any::<u64>(), p in 2u32..=4) {
        let mut rng = sampling::rng(seed);
        let (x, y) = (sampling::fd_norm(&mut rng, 5), sampling::fd_norm(&mut rng, 5));
        let d1 = powered(&x, &y, Exponent::int(1));
        let dp = powered(&x, &y, Exponent::int(p));
        let dinf = powered(&x, &y, Exponent::Infinity);
        prop_assert!(pow_q(&d1, p) <= dp);
        prop_assert!(dp <= pow_q(&dinf, p - 1) * &d1);
        prop_assert!(pow_q(&dinf, p - 1) * &d1 <= pow_q(&dinf, p));
    }

    #[test]
    fn fd_spectral_measure_transformations(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let (x, y) = (sampling::fd_norm(&mut rng, 4), sampling::fd_norm(&mut rng, 4));
        let s = x.spectral_measure(&y).unwrap();
        prop_assert_eq!(y.spectral_measure(&x).unwrap(), s.reflect());
        let c = sampling::rational(&mut rng, 5, 3);
        prop_assert_eq!(x.translate(&c).spectral_measure(&y).unwrap(), s.translate(&c));
        let t = sampling::rational(&mut rng, 5, 3).abs() + q(1);
        let st = x.scale(&t).unwrap().spectral_measure(&y.scale(&t).unwrap()).unwrap();
        prop_assert_eq!(st, s.scale(&t));
    }

    #[test]
    fn joint_basis_is_orthogonal_for_both(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = sampling::rng(seed);
        let (x, y) = (sampling::fd_norm(&mut rng, n), sampling::fd_norm(&mut rng, n));
        let jb = x.joint_basis(&y).unwrap();
        prop_assert!(x.is_orthogonal_basis(&jb.columns).unwrap());
        prop_assert!(y.is_orthogonal_basis(&jb.columns).unwrap());
    }

    #[test]
    fn retraction_preserves_volume_and_contracts(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let (x, y) = (sampling::fd_norm(&mut rng, 4), sampling::fd_norm(&mut rng, 4));
        let e = sampling::basis(&mut rng, 4);
        let (rx, ry) = (x.gram_schmidt_retract(&e).unwrap(), y.gram_schmidt_retract(&e).unwrap());
        prop_assert_eq!(rx.volume(), x.volume());
        prop_assert!(powered(&rx, &ry, Exponent::int(1)) <= powered(&x, &y, Exponent::int(1)));
    }

    #[test]
    fn legendre_matches_vertex_maximum(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = sampling::rng(seed);
        let p = sampling::carrier(&mut rng, n);
        let g = sampling::pl_norm(&mut rng, &p, 4);
        let pl = g.as_pl().unwrap();
        let leg = pl.legendre();
        for _ in 0..20 {
            let xi = sampling::vector(&mut rng, n, 6, 5);
            let direct = pl.subdivision_vertices().iter().map(|v| dot(v, &xi) + pl.evaluate(v)).max().unwrap();
            prop_assert_eq!(leg.evaluate(&xi), direct);
        }
        let total: Q = pl.active_cells().map(|(_, c)| c.volume()).sum();
        prop_assert_eq!(total, p.volume());
    }

    #[test]
    fn integration_is_monotone(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = sampling::rng(seed);
        let p = sampling::carrier(&mut rng, n);
        let (g, h) = (sampling::pl_norm(&mut rng, &p, 3), sampling::pl_norm(&mut rng, &p, 3));
        let m = g.min(&h).unwrap();
        prop_assert!(m.as_pl().unwrap().integrate() <= g.as_pl().unwrap().integrate());
        prop_assert!(to_f64(&m.as_pl().unwrap().integrate()) <= to_f64(&h.as_pl().unwrap().integrate()));
    }

    #[test]
    fn toric_pythagorean(seed in any::<u64>(), n in 1usize..=2, p in 1u32..=3) {
        let mut rng = sampling::rng(seed);
        let c = sampling::carrier(&mut rng, n);
        let (g, h) = (sampling::pl_norm(&mut rng, &c, 3), sampling::pl_norm(&mut rng, &c, 3));
        let m = g.min(&h).unwrap();
        let d = |a: &filtra::toric::ToricHomNorm, b: &filtra::toric::ToricHomNorm| {
            a.distance(b, &Exponent::int(p)).unwrap().powered.lower
        };
        prop_assert_eq!(d(&g, &h), d(&g, &m) + d(&m, &h));
    }
}
