mod common;

use common::*;
use fell_geometry::groupoid::Arrow;
use fell_geometry::representation::AlgebraElement;
use fell_geometry::Complex64;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn groupoid_laws(seed: u64, k in 1usize..7) {
        let g = random_groupoid(&mut rng(seed), k);
        let arrows: Vec<Arrow> = g.arrows().collect();
        for &a in &arrows {
            prop_assert_eq!(g.compose(Arrow::unit(a.range), a).unwrap(), a);
            prop_assert_eq!(g.compose(a, Arrow::unit(a.source)).unwrap(), a);
            let inv = g.inverse(a).unwrap();
            prop_assert_eq!(g.compose(a, inv).unwrap(), Arrow::unit(a.range));
            prop_assert_eq!(g.compose(inv, a).unwrap(), Arrow::unit(a.source));
            for &b in arrows.iter().filter(|b| b.range == a.source) {
                for &c in arrows.iter().filter(|c| c.range == b.source) {
                    let left = g.compose(g.compose(a, b).unwrap(), c).unwrap();
                    let right = g.compose(a, g.compose(b, c).unwrap()).unwrap();
                    prop_assert_eq!(left, right);
                }
            }
            for &b in arrows.iter().filter(|b| b.range != a.source) {
                prop_assert!(g.compose(a, b).is_err());
            }
        }
    }

    #[test]
    fn fiber_products_are_compatible(seed: u64) {
        let mut r = rng(seed);
        let b = random_bundle(&mut r, 5, 3);
        let arrows: Vec<Arrow> = b.groupoid().arrows().collect();
        let pick = |r: &mut rand_chacha::ChaCha8Rng, range: Option<usize>| {
            let pool: Vec<Arrow> = arrows.iter().copied().filter(|a| range.is_none_or(|x| a.range == x)).collect();
            pool[r.gen_range(0..pool.len())]
        };
        let elem = |r: &mut rand_chacha::ChaCha8Rng, a: Arrow| {
            let (p, q) = b.fiber_shape(a);
            b.element(a, random_matrix(r, p, q)).unwrap()
        };
        for _ in 0..10 {
            let g1 = pick(&mut r, None);
            let g2 = pick(&mut r, Some(g1.source));
            let (e1, e2) = (elem(&mut r, g1), elem(&mut r, g2));
            let p = b.multiply(&e1, &e2).unwrap();
            // Homomorphism onto the composite arrow, via the matrix product.
            prop_assert_eq!(p.arrow, b.groupoid().compose(g1, g2).unwrap());
            prop_assert!((&p.value - &(&e1.value * &e2.value)).max_abs() < 1e-12);
            // * covers the groupoid inverse.
            prop_assert_eq!(b.involution(&e1).arrow, g1.inverse());
            let lhs = b.involution(&p);
            let rhs = b.multiply(&b.involution(&e2), &b.involution(&e1)).unwrap();
            prop_assert!((&lhs.value - &rhs.value).max_abs() < 1e-12);
        }
        prop_assert!(b.is_saturated());
        prop_assert!(b.opposite().is_saturated());
    }

    #[test]
    fn representation_is_faithful_and_multiplicative(seed: u64, k in 1usize..6) {
        let mut r = rng(seed);
        let rep = random_geometry(&mut r, k, 2);
        let a = random_algebra_element(&mut r, &rep);
        let b = random_algebra_element(&mut r, &rep);
        let ra = rep.rho(&a).unwrap();
        let rb = rep.rho(&b).unwrap();
        let rab = rep.rho(&a.multiply(&b).unwrap()).unwrap();
        prop_assert!((&rab - &(&ra * &rb)).max_abs() < 1e-12);
        // Faithful: each block can be read back off ρ(a).
        let bs = rep.blocks();
        for (i, block) in a.blocks.iter().enumerate() {
            prop_assert_eq!(&bs.get_block(&ra, i, i), block);
        }
        let star = AlgebraElement::new(a.blocks.iter().map(|x| x.adjoint()).collect());
        prop_assert!((&rep.rho(&star).unwrap() - &ra.adjoint()).max_abs() < 1e-12);
        prop_assert!((&(&ra * rep.chi()) - &(rep.chi() * &ra)).max_abs() < 1e-12);
    }

    #[test]
    fn j_is_antiunitary_with_the_declared_square(seed: u64, k in 1usize..6) {
        let mut r = rng(seed);
        let rep = random_geometry(&mut r, k, 2);
        let m = rep.dim();
        let v: Vec<Complex64> = (0..m).map(|_| random_complex(&mut r)).collect();
        let w: Vec<Complex64> = (0..m).map(|_| random_complex(&mut r)).collect();
        let z = random_complex(&mut r);
        let jv = rep.apply_j(&v).unwrap();
        let jw = rep.apply_j(&w).unwrap();
        let inner = |x: &[Complex64], y: &[Complex64]| x.iter().zip(y).map(|(a, b)| a.conj() * b).sum::<Complex64>();
        // <Jv, Jw> = <w, v>
        prop_assert!((inner(&jv, &jw) - inner(&w, &v)).norm() < 1e-12);
        // J(zv) = conj(z) Jv
        let zv: Vec<Complex64> = v.iter().map(|x| z * x).collect();
        let jzv = rep.apply_j(&zv).unwrap();
        for (a, b) in jzv.iter().zip(&jv) {
            prop_assert!((a - z.conj() * b).norm() < 1e-12);
        }
        let jj = rep.apply_j(&jv).unwrap();
        let s = rep.config().j_squared.value();
        for (a, b) in jj.iter().zip(&v) {
            prop_assert!((a - b * s).norm() < 1e-12);
        }
        prop_assert!(rep.check_j_squared(1e-12).pass);
        prop_assert!(rep.check_grading(1e-12).pass);
    }

    #[test]
    fn conjugation_by_j_is_multiplicative(seed: u64, k in 1usize..6) {
        let mut r = rng(seed);
        let rep = random_geometry(&mut r, k, 2);
        let m = rep.dim();
        let x = random_matrix(&mut r, m, m);
        let y = random_matrix(&mut r, m, m);
        let lhs = rep.conjugate_by_j(&(&x * &y));
        let rhs = &rep.conjugate_by_j(&x) * &rep.conjugate_by_j(&y);
        prop_assert!((&lhs - &rhs).max_abs() < 1e-12);
        prop_assert!((&rep.conjugate_by_j(&rep.conjugate_by_j(&x)) - &x).max_abs() < 1e-12);
        prop_assert!((&rep.conjugate_by_j(&x.adjoint()) - &rep.conjugate_by_j(&x).adjoint()).max_abs() < 1e-12);
    }
}
