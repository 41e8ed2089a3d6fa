#![allow(dead_code)]

use fell_geometry::bundle::FellBundle;
use fell_geometry::groupoid::FiniteGroupoid;
use fell_geometry::representation::{AlgebraElement, GeometryConfig, Representation, Sector, Sign};
use fell_geometry::spec::parse_spec;
use fell_geometry::{Complex64, ComplexMatrix};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TWO_POINT: &str = include_str!("../../fixtures/two-point.json");

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn two_point() -> Representation {
    parse_spec(TWO_POINT).unwrap().representation().unwrap()
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_complex(rng: &mut impl Rng) -> Complex64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let entries = (0..rows * cols).map(|_| random_complex(rng)).collect();
    ComplexMatrix::new(rows, cols, entries).unwrap()
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let a = random_matrix(rng, n, n);
    &a + &a.adjoint()
}

/// Haar-ish unitary from the QR factor of a random matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let a = random_matrix(rng, n, n);
    let q: DMatrix<Complex64> = a.as_nalgebra().clone().qr().q();
    ComplexMatrix::from_nalgebra(q)
}

/// Random unit ids and a random partition of them.
pub fn random_groupoid(rng: &mut impl Rng, k: usize) -> FiniteGroupoid {
    let ids: Vec<String> = (0..k).map(|i| format!("u{i}")).collect();
    let labels: Vec<usize> = (0..k).map(|_| rng.gen_range(0..k)).collect();
    let mut classes: Vec<Vec<String>> = Vec::new();
    for l in 0..k {
        let class: Vec<String> = (0..k).filter(|&i| labels[i] == l).map(|i| ids[i].clone()).collect();
        if !class.is_empty() {
            classes.push(class);
        }
    }
    FiniteGroupoid::partition(&ids, &classes).unwrap()
}

pub fn random_bundle(rng: &mut impl Rng, max_k: usize, max_dim: usize) -> FellBundle {
    let k = rng.gen_range(1..=max_k);
    let g = random_groupoid(rng, k);
    let dims = (0..k).map(|_| rng.gen_range(1..=max_dim)).collect();
    FellBundle::new(g, dims).unwrap()
}

fn find(parent: &mut [usize], x: usize) -> usize {
    if parent[x] != x {
        let r = find(parent, parent[x]);
        parent[x] = r;
    }
    parent[x]
}

/// A valid geometry with `k` units: random pairing, dims and chirality
/// shared within pairs, and a partition closed under the pairing.
pub fn random_geometry(rng: &mut impl Rng, k: usize, max_dim: usize) -> Representation {
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(rng);
    let pairs = rng.gen_range(0..=k / 2);
    let mut conjugation: Vec<usize> = (0..k).collect();
    for p in 0..pairs {
        let (a, b) = (order[2 * p], order[2 * p + 1]);
        conjugation[a] = b;
        conjugation[b] = a;
    }
    let mut dims = vec![0; k];
    let mut chirality = vec![Sign::Plus; k];
    let mut sector = vec![Sector::Particle; k];
    for i in 0..k {
        let j = conjugation[i];
        if j < i {
            continue;
        }
        let n = rng.gen_range(1..=max_dim);
        let s = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
        dims[i] = n;
        dims[j] = n;
        chirality[i] = s;
        chirality[j] = s;
        if j != i {
            sector[j] = Sector::Antiparticle;
        } else if rng.gen_bool(0.5) {
            sector[i] = Sector::Antiparticle;
        }
    }
    // Join a random partition with its image under the pairing.
    let labels: Vec<usize> = (0..k).map(|_| rng.gen_range(0..k.max(1))).collect();
    let mut parent: Vec<usize> = (0..k).collect();
    for i in 0..k {
        for j in 0..k {
            if labels[i] == labels[j] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
                let (a, b) = (find(&mut parent, conjugation[i]), find(&mut parent, conjugation[j]));
                parent[a] = b;
            }
        }
    }
    let ids: Vec<String> = (0..k).map(|i| format!("u{i}")).collect();
    let mut classes: Vec<Vec<String>> = Vec::new();
    for r in 0..k {
        let class: Vec<String> = (0..k).filter(|&i| find(&mut parent, i) == r).map(|i| ids[i].clone()).collect();
        if !class.is_empty() {
            classes.push(class);
        }
    }
    let self_conjugate = (0..k).any(|i| conjugation[i] == i);
    let j_squared = if !self_conjugate && rng.gen_bool(0.5) { Sign::Minus } else { Sign::Plus };
    let spin_sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
    let bundle = FellBundle::new(FiniteGroupoid::partition(&ids, &classes).unwrap(), dims).unwrap();
    Representation::new(GeometryConfig {
        name: "random".into(),
        bundle,
        chirality,
        sector,
        conjugation,
        j_squared,
        spin_sign,
        opp_dims: None,
    })
    .unwrap()
}

/// Random matrix supported on the arrows of the geometry's groupoid.
pub fn random_section(rng: &mut impl Rng, rep: &Representation) -> ComplexMatrix {
    let g = rep.bundle().groupoid();
    let bs = rep.blocks();
    let mut x = ComplexMatrix::zeros(rep.dim(), rep.dim());
    for a in g.arrows() {
        let b = random_matrix(rng, bs.dim(a.range), bs.dim(a.source));
        bs.set_block(&mut x, a.range, a.source, &b);
    }
    x
}

/// Projection of a random section onto the sections commuting with `J`.
pub fn random_j_commuting(rng: &mut impl Rng, rep: &Representation) -> ComplexMatrix {
    let x = random_section(rng, rep);
    (&x + &rep.conjugate_by_j(&x)).scale_real(0.5)
}

pub fn random_algebra_element(rng: &mut impl Rng, rep: &Representation) -> AlgebraElement {
    AlgebraElement::new(rep.blocks().dims().iter().map(|&n| random_matrix(rng, n, n)).collect())
}

pub fn random_unitary_element(rng: &mut impl Rng, rep: &Representation) -> AlgebraElement {
    AlgebraElement::new(rep.blocks().dims().iter().map(|&n| random_unitary(rng, n)).collect())
}

/// The four cotangent families of the example, with independent parameters.
pub struct Families {
    pub swap: ComplexMatrix,
    pub gh: ComplexMatrix,
    pub diag: ComplexMatrix,
    pub cross: ComplexMatrix,
}

pub fn families(m: Complex64, g: Complex64, h: Complex64, w: Complex64, z: Complex64, y: Complex64) -> Families {
    let o = c(0.0, 0.0);
    let rows = |r: [[Complex64; 4]; 4]| ComplexMatrix::from_rows(&r.map(|x| x.to_vec())).unwrap();
    Families {
        swap: rows([[o, m.conj(), o, o], [m, o, o, o], [o, o, o, m], [o, o, m.conj(), o]]),
        gh: rows([[o, o, g, o], [o, o, o, h], [g.conj(), o, o, o], [o, h.conj(), o, o]]),
        diag: rows([[w, o, o, o], [o, z, o, o], [o, o, w.conj(), o], [o, o, o, z.conj()]]),
        cross: rows([[o, o, o, y], [o, o, y, o], [o, y.conj(), o, o], [y.conj(), o, o, o]]),
    }
}
