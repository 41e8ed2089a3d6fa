mod common;

use common::*;
use fell_geometry::sheaf::{all_patterns, DiscreteSheaf, Direction, Member, MorphismField};
use proptest::prelude::*;
use rand::Rng;

fn random_field(r: &mut rand_chacha::ChaCha8Rng, b: &fell_geometry::bundle::FellBundle, direction: Direction) -> MorphismField {
    let patterns = all_patterns(b.groupoid(), direction);
    let p = patterns[r.gen_range(0..patterns.len())].clone();
    let blocks = (0..p.len())
        .map(|i| {
            let (rows, cols) = b.fiber_shape(p.arrow(i));
            random_matrix(r, rows, cols)
        })
        .collect();
    MorphismField::new(b, p, blocks).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_products_stay_fields(seed: u64) {
        let mut r = rng(seed);
        let b = random_bundle(&mut r, 4, 2);
        for direction in [Direction::Tangent, Direction::Cotangent] {
            let f = random_field(&mut r, &b, direction);
            let g = random_field(&mut r, &b, direction);
            let fg = MorphismField::multiply(&b, &f, &g).unwrap();
            let prod = &f.as_matrix(&b) * &g.as_matrix(&b);
            prop_assert!((&fg.as_matrix(&b) - &prod).max_abs() < 1e-12);
            let back = MorphismField::from_matrix(&b, &f.as_matrix(&b), direction, 1e-12).unwrap();
            prop_assert!((&back.as_matrix(&b) - &f.as_matrix(&b)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn adjoint_exchanges_tangent_and_cotangent(seed: u64) {
        let mut r = rng(seed);
        let b = random_bundle(&mut r, 4, 2);
        for direction in [Direction::Tangent, Direction::Cotangent] {
            let f = random_field(&mut r, &b, direction);
            let a = f.adjoint();
            prop_assert_eq!(a.direction(), direction.dual());
            prop_assert_eq!(a.as_matrix(&b), f.as_matrix(&b).adjoint());
            prop_assert_eq!(a.adjoint(), f.clone());
        }
        let tangent = all_patterns(b.groupoid(), Direction::Tangent).len();
        let cotangent = all_patterns(b.groupoid(), Direction::Cotangent).len();
        prop_assert_eq!(tangent, cotangent);
    }

    #[test]
    fn restriction_composes(seed: u64, k in 1usize..6, n in 1usize..4) {
        let mut r = rng(seed);
        let sheaf = DiscreteSheaf::constant(k, (0..n).collect::<Vec<usize>>()).unwrap();
        let u = Member::full(k);
        let sections = sheaf.sections_over(u);
        let s = &sections[r.gen_range(0..sections.len())];
        let v = Member::from_units((0..k).filter(|_| r.gen_bool(0.6)));
        let w = Member::from_units(v.units().filter(|_| r.gen_bool(0.6)));
        let once = sheaf.restrict(s, w).unwrap();
        let twice = sheaf.restrict(&sheaf.restrict(s, v).unwrap(), w).unwrap();
        prop_assert_eq!(once, twice);
        prop_assert!(sheaf.restrict(&sheaf.restrict(s, w).unwrap(), v).is_err() || w == v);
    }

    #[test]
    fn gluing_is_unique(seed: u64, k in 1usize..5) {
        let mut r = rng(seed);
        let sheaf = DiscreteSheaf::constant(k, vec![0u8, 1, 2]).unwrap();
        let u = Member::full(k);
        let sections = sheaf.sections_over(u);
        let s = &sections[r.gen_range(0..sections.len())];
        let cover: Vec<Member> = (0..k).map(Member::singleton).chain([Member::from_units((0..k).filter(|_| r.gen_bool(0.5)))]).collect();
        let family: Vec<_> = cover.iter().map(|&v| sheaf.restrict(s, v).unwrap()).collect();
        let glued = sheaf.glue(&family);
        prop_assert_eq!(glued.as_ref(), Some(s));
        // Any section with the same restrictions is s itself.
        let matching = sections
            .iter()
            .filter(|t| cover.iter().all(|&v| sheaf.restrict(t, v).unwrap() == sheaf.restrict(s, v).unwrap()))
            .count();
        prop_assert_eq!(matching, 1);
    }
}

#[test]
fn sums_of_fields_need_not_be_fields() {
    let rep = two_point();
    let one = c(1.0, 0.0);
    let f = families(one, one, one, one, one, one);
    let sum = &f.swap + &f.diag;
    assert!(MorphismField::from_matrix(rep.bundle(), &f.swap, Direction::Cotangent, 1e-12).is_ok());
    assert!(MorphismField::from_matrix(rep.bundle(), &f.diag, Direction::Cotangent, 1e-12).is_ok());
    assert!(MorphismField::from_matrix(rep.bundle(), &sum, Direction::Cotangent, 1e-12).is_err());
    assert!(MorphismField::from_matrix(rep.bundle(), &sum, Direction::Tangent, 1e-12).is_err());
}
