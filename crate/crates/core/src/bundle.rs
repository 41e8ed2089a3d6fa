//! Finite-dimensional Fell bundles over finite principal groupoids.
//!
//! The fiber over a unit `i` is the full matrix algebra `M_{n_i}`, the fiber
//! over an arrow `(i, j)` is the space of `n_i x n_j` complex matrices, and
//! multiplication is the matrix product. The opposite bundle keeps the same
//! groupoid and dims; an element over `(r, s)` is stored as an element of the
//! original bundle over `(s, r)` and products are taken in reverse order.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::groupoid::{Arrow, FiniteGroupoid};
use crate::matrix::{numerical_rank, BlockStructure, ComplexMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct FellBundle {
    groupoid: FiniteGroupoid,
    dims: Vec<usize>,
    opposite: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberElement {
    pub arrow: Arrow,
    pub value: ComplexMatrix,
}

/// One fiber element per arrow. Arrows that are absent carry zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Section {
    elements: BTreeMap<Arrow, ComplexMatrix>,
}

impl Section {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn get(&self, arrow: Arrow) -> Option<&ComplexMatrix> {
        self.elements.get(&arrow)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Arrow, &ComplexMatrix)> {
        self.elements.iter()
    }
}

impl FellBundle {
    pub fn new(groupoid: FiniteGroupoid, dims: Vec<usize>) -> Result<Self> {
        if dims.len() != groupoid.len() {
            return Err(Error::Invalid(format!(
                "{} dimensions declared for {} units",
                dims.len(),
                groupoid.len()
            )));
        }
        if let Some(i) = dims.iter().position(|&n| n == 0) {
            return Err(Error::Invalid(format!(
                "unit `{}` has nonpositive dimension",
                groupoid.unit_id(i)
            )));
        }
        Ok(Self {
            groupoid,
            dims,
            opposite: false,
        })
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.groupoid
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, unit: usize) -> usize {
        self.dims[unit]
    }

    pub fn is_opposite(&self) -> bool {
        self.opposite
    }

    /// Same groupoid and dims, multiplication order reversed.
    pub fn opposite(&self) -> Self {
        Self {
            opposite: !self.opposite,
            ..self.clone()
        }
    }

    pub fn block_structure(&self) -> BlockStructure {
        BlockStructure::new(self.dims.clone()).expect("dims validated at construction")
    }

    /// Ambient Hilbert space dimension `m = Σ n_i`.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Shape of the matrices stored over `arrow`.
    pub fn fiber_shape(&self, arrow: Arrow) -> (usize, usize) {
        let (r, s) = (self.dims[arrow.range], self.dims[arrow.source]);
        if self.opposite {
            (s, r)
        } else {
            (r, s)
        }
    }

    /// Complex dimension of the section algebra, `Σ_{(i,j)} n_i n_j`.
    pub fn section_dimension(&self) -> usize {
        self.groupoid
            .arrows()
            .map(|g| self.dims[g.range] * self.dims[g.source])
            .sum()
    }

    pub fn element(&self, arrow: Arrow, value: ComplexMatrix) -> Result<FiberElement> {
        if !self.groupoid.contains(arrow) {
            return Err(Error::NotAnArrow(self.groupoid.describe(arrow)));
        }
        let want = self.fiber_shape(arrow);
        if value.shape() != want {
            return Err(Error::Dimension(format!(
                "fiber over {} is {}x{}, got {}x{}",
                self.groupoid.describe(arrow),
                want.0,
                want.1,
                value.rows(),
                value.cols()
            )));
        }
        Ok(FiberElement { arrow, value })
    }

    pub fn zero_element(&self, arrow: Arrow) -> FiberElement {
        let (r, c) = self.fiber_shape(arrow);
        FiberElement {
            arrow,
            value: ComplexMatrix::zeros(r, c),
        }
    }

    /// Identity of the unit fiber `M_{n_i}`.
    pub fn unit_element(&self, i: usize) -> FiberElement {
        FiberElement {
            arrow: Arrow::unit(i),
            value: ComplexMatrix::identity(self.dims[i]),
        }
    }

    /// Basis of matrix units of the fiber over `arrow`.
    pub fn fiber_basis(&self, arrow: Arrow) -> Vec<FiberElement> {
        let (r, c) = self.fiber_shape(arrow);
        let mut out = Vec::with_capacity(r * c);
        for a in 0..r {
            for b in 0..c {
                out.push(FiberElement {
                    arrow,
                    value: ComplexMatrix::unit(r, c, a, b),
                });
            }
        }
        out
    }

    pub fn multiply(&self, e1: &FiberElement, e2: &FiberElement) -> Result<FiberElement> {
        let arrow = self.groupoid.compose(e1.arrow, e2.arrow)?;
        let value = if self.opposite {
            e2.value.try_mul(&e1.value)?
        } else {
            e1.value.try_mul(&e2.value)?
        };
        Ok(FiberElement { arrow, value })
    }

    pub fn involution(&self, e: &FiberElement) -> FiberElement {
        FiberElement {
            arrow: e.arrow.inverse(),
            value: e.value.adjoint(),
        }
    }

    /// Checks that products of fibers span the fiber over every composite arrow.
    pub fn is_saturated(&self) -> bool {
        let g = &self.groupoid;
        for g1 in g.arrows() {
            for g2 in g.arrows().filter(|g2| g2.range == g1.source) {
                let target = Arrow::new(g1.range, g2.source);
                let (tr, tc) = self.fiber_shape(target);
                let want = tr * tc;
                let mut products = Vec::new();
                for b1 in self.fiber_basis(g1) {
                    for b2 in self.fiber_basis(g2) {
                        match self.multiply(&b1, &b2) {
                            Ok(p) => products.push(p.value.entries()),
                            Err(_) => return false,
                        }
                    }
                }
                let stacked = ComplexMatrix::new(products.len(), want, products.concat());
                match stacked {
                    Ok(m) if numerical_rank(&m, 1e-12) == want => {}
                    _ => return false,
                }
            }
        }
        true
    }

    /// Builds a section from `(arrow, value)` pairs, validating each fiber.
    pub fn section<I>(&self, elements: I) -> Result<Section>
    where
        I: IntoIterator<Item = (Arrow, ComplexMatrix)>,
    {
        let mut out = BTreeMap::new();
        for (arrow, value) in elements {
            let e = self.element(arrow, value)?;
            out.insert(e.arrow, e.value);
        }
        Ok(Section { elements: out })
    }

    /// Convolution product `(s t)_γ = Σ_{γ1 γ2 = γ} s_γ1 t_γ2`.
    pub fn multiply_sections(&self, s: &Section, t: &Section) -> Section {
        let mut out: BTreeMap<Arrow, ComplexMatrix> = BTreeMap::new();
        for (&g1, v1) in &s.elements {
            for (&g2, v2) in t.elements.range(Arrow::new(g1.source, 0)..Arrow::new(g1.source + 1, 0)) {
                let p = self
                    .multiply(
                        &FiberElement { arrow: g1, value: v1.clone() },
                        &FiberElement { arrow: g2, value: v2.clone() },
                    )
                    .expect("sections hold validated fibers");
                out.entry(p.arrow)
                    .and_modify(|acc| *acc = &*acc + &p.value)
                    .or_insert(p.value);
            }
        }
        Section { elements: out }
    }

    pub fn section_involution(&self, s: &Section) -> Section {
        Section {
            elements: s
                .elements
                .iter()
                .map(|(g, v)| (g.inverse(), v.adjoint()))
                .collect(),
        }
    }

    /// The `m x m` block matrix of a section. For the opposite bundle the stored
    /// fibers are transposed into place, which turns the reversed product into
    /// the ordinary matrix product.
    pub fn section_as_matrix(&self, s: &Section) -> ComplexMatrix {
        let blocks = self.block_structure();
        let m = blocks.total();
        let mut out = ComplexMatrix::zeros(m, m);
        for (g, v) in &s.elements {
            let placed = if self.opposite { v.transpose() } else { v.clone() };
            blocks.set_block(&mut out, g.range, g.source, &placed);
        }
        out
    }

    /// Inverse of [`section_as_matrix`](Self::section_as_matrix); fails when the
    /// matrix has support outside the groupoid.
    pub fn matrix_as_section(&self, m: &ComplexMatrix, tol: f64) -> Result<Section> {
        let blocks = self.block_structure();
        if m.shape() != (blocks.total(), blocks.total()) {
            return Err(Error::Dimension("matrix does not match the bundle".into()));
        }
        let mut elements = BTreeMap::new();
        for r in 0..self.groupoid.len() {
            for c in 0..self.groupoid.len() {
                let b = blocks.get_block(m, r, c);
                let g = Arrow::new(r, c);
                if self.groupoid.contains(g) {
                    let stored = if self.opposite { b.transpose() } else { b };
                    elements.insert(g, stored);
                } else if !b.is_zero(tol) {
                    return Err(Error::NotAnArrow(self.groupoid.describe(g)));
                }
            }
        }
        Ok(Section { elements })
    }

    /// The canonical isomorphism `E^opp -> E`, `e ↦ e^T`, on a single element
    /// of this (opposite) bundle.
    pub fn transpose_to_opposite(&self, e: &FiberElement) -> FiberElement {
        FiberElement {
            arrow: e.arrow,
            value: e.value.transpose(),
        }
    }

    /// Section with every fiber filled by `f(arrow, row, col)`.
    pub fn section_from_fn(&self, mut f: impl FnMut(Arrow, usize, usize) -> Complex64) -> Section {
        let mut elements = BTreeMap::new();
        for g in self.groupoid.arrows() {
            let (r, c) = self.fiber_shape(g);
            let mut v = ComplexMatrix::zeros(r, c);
            for a in 0..r {
                for b in 0..c {
                    v.set(a, b, f(g, a, b));
                }
            }
            elements.insert(g, v);
        }
        Section { elements }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn example() -> FellBundle {
        FellBundle::new(FiniteGroupoid::pair(&["L", "R", "Lbar", "Rbar"]).unwrap(), vec![1; 4]).unwrap()
    }

    fn pair2(dims: Vec<usize>) -> FellBundle {
        FellBundle::new(FiniteGroupoid::pair(&["1", "2"]).unwrap(), dims).unwrap()
    }

    #[test]
    fn build_examples() {
        let e = example();
        assert_eq!(e.section_dimension(), 16);
        assert!(e.groupoid().arrows().all(|g| e.fiber_shape(g) == (1, 1)));

        let single = FellBundle::new(FiniteGroupoid::pair(&["x"]).unwrap(), vec![2]).unwrap();
        assert_eq!(single.fiber_shape(Arrow::unit(0)), (2, 2));

        let b = pair2(vec![1, 2]);
        let shapes: Vec<_> = b.groupoid().arrows().map(|g| b.fiber_shape(g)).collect();
        assert_eq!(shapes, vec![(1, 1), (1, 2), (2, 1), (2, 2)]);

        assert!(FellBundle::new(FiniteGroupoid::pair(&["x"]).unwrap(), vec![0]).is_err());
        assert!(FellBundle::new(FiniteGroupoid::pair(&["x", "y"]).unwrap(), vec![1]).is_err());
    }

    #[test]
    fn multiply_examples() {
        let e = example();
        let a = e.element(Arrow::new(0, 1), ComplexMatrix::from_rows(&[vec![c(2.0, 1.0)]]).unwrap()).unwrap();
        let b = e.element(Arrow::new(1, 0), ComplexMatrix::from_rows(&[vec![c(0.0, 3.0)]]).unwrap()).unwrap();
        let ab = e.multiply(&a, &b).unwrap();
        assert_eq!(ab.arrow, Arrow::unit(0));
        assert_eq!(ab.value.get(0, 0), c(2.0, 1.0) * c(0.0, 3.0));
        assert!(e.multiply(&a, &a).is_err());

        let b2 = pair2(vec![1, 2]);
        let x = b2
            .element(Arrow::new(0, 1), ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 1.0)]]).unwrap())
            .unwrap();
        let y = b2.element(Arrow::unit(1), ComplexMatrix::identity(2).scale_real(3.0)).unwrap();
        let xy = b2.multiply(&x, &y).unwrap();
        assert_eq!(xy.value.shape(), (1, 2));
        assert_eq!(b2.multiply(&b2.unit_element(0), &x).unwrap(), x);
        assert_eq!(b2.multiply(&x, &b2.unit_element(1)).unwrap(), x);

        assert!(b2.element(Arrow::new(0, 1), ComplexMatrix::zeros(2, 1)).is_err());
    }

    #[test]
    fn involution_examples() {
        let b = pair2(vec![1, 2]);
        let x = b
            .element(Arrow::new(0, 1), ComplexMatrix::from_rows(&[vec![c(1.0, 2.0), c(0.0, -1.0)]]).unwrap())
            .unwrap();
        let xs = b.involution(&x);
        assert_eq!(xs.arrow, Arrow::new(1, 0));
        assert_eq!(xs.value.shape(), (2, 1));
        assert_eq!(b.involution(&xs), x);
        assert_eq!(b.involution(&b.unit_element(1)), b.unit_element(1));
    }

    #[test]
    fn saturation_examples() {
        assert!(example().is_saturated());
        assert!(pair2(vec![1, 2]).is_saturated());
        assert!(pair2(vec![3, 2]).is_saturated());
        assert!(pair2(vec![1, 2]).opposite().is_saturated());
    }

    #[test]
    fn opposite_examples() {
        let b = pair2(vec![1, 2]);
        let opp = b.opposite();
        assert_eq!(opp.opposite(), b);
        assert_eq!(opp.fiber_shape(Arrow::new(0, 1)), (2, 1));

        // Involution and the opposite structure commute.
        let x = opp
            .element(Arrow::new(0, 1), ComplexMatrix::from_rows(&[vec![c(1.0, 2.0)], vec![c(3.0, -1.0)]]).unwrap())
            .unwrap();
        let via_opp = opp.involution(&x);
        let via_orig = b.involution(&FiberElement { arrow: x.arrow.inverse(), value: x.value.clone() });
        assert_eq!(via_opp.value, via_orig.value);
        assert_eq!(via_opp.arrow, via_orig.arrow.inverse());

        // With scalar fibers, the opposite bundle multiplies exactly like the original.
        let e = example();
        let eo = e.opposite();
        for g1 in e.groupoid().arrows() {
            for g2 in e.groupoid().arrows().filter(|g| g.range == g1.source) {
                let u = ComplexMatrix::from_rows(&[vec![c(g1.range as f64, 1.0)]]).unwrap();
                let v = ComplexMatrix::from_rows(&[vec![c(2.0, g2.source as f64)]]).unwrap();
                let p = e.multiply(&e.element(g1, u.clone()).unwrap(), &e.element(g2, v.clone()).unwrap()).unwrap();
                let q = eo.multiply(&eo.element(g1, u).unwrap(), &eo.element(g2, v).unwrap()).unwrap();
                assert_eq!(p, q);
            }
        }
    }

    #[test]
    fn section_matrix_examples() {
        let e = example();
        assert_eq!(e.section_as_matrix(&Section::zero()), ComplexMatrix::zeros(4, 4));

        // The 16 matrix-unit sections give the 16 matrix units of M_4.
        let mut seen = Vec::new();
        for g in e.groupoid().arrows() {
            let s = e.section([(g, ComplexMatrix::unit(1, 1, 0, 0))]).unwrap();
            let m = e.section_as_matrix(&s);
            assert_eq!(m, ComplexMatrix::unit(4, 4, g.range, g.source));
            seen.push(m.entries());
        }
        let stacked = ComplexMatrix::new(16, 16, seen.concat()).unwrap();
        assert_eq!(numerical_rank(&stacked, 1e-12), 16);
    }

    #[test]
    fn matrix_as_section_rejects_cross_class_support() {
        let g = FiniteGroupoid::partition(&["a", "b"], &[vec!["a"], vec!["b"]]).unwrap();
        let b = FellBundle::new(g, vec![1, 1]).unwrap();
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(b.matrix_as_section(&m, 1e-12).is_err());
        let d = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]).unwrap();
        assert_eq!(b.section_as_matrix(&b.matrix_as_section(&d, 1e-12).unwrap()), d);
    }
}
