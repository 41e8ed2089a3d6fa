//! Concrete spectral data of a geometry: `H = C^m`, the left action `rho`, the
//! right action `rho_opp`, the grading `chi` and the real structure `J`.
//!
//! `J` is always a signed block permutation followed by entrywise conjugation:
//! `(J v)_i = s_i conj(v_{σ(i)})` where `σ` is the conjugation pairing of
//! units. The signs are `+1` on the first unit of each pair and `j_squared` on
//! the second, which gives `J^2 = j_squared`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bundle::FellBundle;
use crate::error::{Error, Result};
use crate::matrix::{BlockStructure, ComplexMatrix, KronDims, ONE, ZERO};
use crate::spec::Check;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_i64(v: i64) -> Option<Self> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Particle,
    Antiparticle,
}

impl Sector {
    pub fn opposite(self) -> Self {
        match self {
            Sector::Particle => Sector::Antiparticle,
            Sector::Antiparticle => Sector::Particle,
        }
    }
}

/// Everything needed to build a representation besides the bundle itself.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    pub name: String,
    pub bundle: FellBundle,
    pub chirality: Vec<Sign>,
    pub sector: Vec<Sector>,
    /// Involution on units; `conjugation[i]` is the partner of `i`.
    pub conjugation: Vec<usize>,
    pub j_squared: Sign,
    /// `ε'` in `D J = ε' J D`.
    pub spin_sign: Sign,
    /// Optional `(n, n')` factorization of every unit dimension, used by the
    /// tensor-factor test.
    pub opp_dims: Option<Vec<(usize, usize)>>,
}

impl GeometryConfig {
    pub fn validate(&self) -> Result<()> {
        let k = self.bundle.groupoid().len();
        let id = |i: usize| self.bundle.groupoid().unit_id(i).to_owned();
        if self.chirality.len() != k || self.sector.len() != k || self.conjugation.len() != k {
            return Err(Error::Invalid(
                "chirality, sector and conjugation must cover every unit".into(),
            ));
        }
        for i in 0..k {
            let j = self.conjugation[i];
            if j >= k || self.conjugation[j] != i {
                return Err(Error::spec("conjugation", format!("pairing of `{}` is not an involution", id(i))));
            }
            if j == i {
                if self.j_squared == Sign::Minus {
                    return Err(Error::spec(
                        "j_squared",
                        format!("unit `{}` is self-conjugate, which forces J^2 = +1", id(i)),
                    ));
                }
                continue;
            }
            if self.bundle.dim(i) != self.bundle.dim(j) {
                return Err(Error::spec(
                    "conjugation",
                    format!("`{}` and `{}` have different dims", id(i), id(j)),
                ));
            }
            if self.chirality[i] != self.chirality[j] {
                return Err(Error::spec(
                    "conjugation",
                    format!("`{}` and `{}` have different chirality", id(i), id(j)),
                ));
            }
            if self.sector[i] != self.sector[j].opposite() {
                return Err(Error::spec(
                    "conjugation",
                    format!("`{}` and `{}` must lie in opposite sectors", id(i), id(j)),
                ));
            }
        }
        // J must map sections to sections: conjugation respects the classes.
        let g = self.bundle.groupoid();
        for i in 0..k {
            for j in 0..k {
                if g.related(i, j) && !g.related(self.conjugation[i], self.conjugation[j]) {
                    return Err(Error::spec(
                        "conjugation",
                        format!("pairing does not preserve the class of `{}` and `{}`", id(i), id(j)),
                    ));
                }
            }
        }
        if let Some(opp) = &self.opp_dims {
            if opp.len() != k {
                return Err(Error::spec("opp_dims", "must give one pair per unit"));
            }
            for (i, &(n, np)) in opp.iter().enumerate() {
                if n == 0 || np == 0 || n * np != self.bundle.dim(i) {
                    return Err(Error::spec(
                        "opp_dims",
                        format!("factorization {n}x{np} of `{}` does not match dim {}", id(i), self.bundle.dim(i)),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn units(&self) -> usize {
        self.bundle.groupoid().len()
    }

    pub fn unit_index(&self, id: &str) -> Result<usize> {
        self.bundle
            .groupoid()
            .unit_index(id)
            .ok_or_else(|| Error::UnknownUnit(id.to_owned()))
    }

    /// Kronecker shape of block `(i, j)` when `opp_dims` is declared.
    pub fn kron_dims(&self, i: usize, j: usize) -> Option<KronDims> {
        self.opp_dims.as_ref().map(|opp| KronDims {
            n_i: opp[i].0,
            n_j: opp[j].0,
            n_i_opp: opp[i].1,
            n_j_opp: opp[j].1,
        })
    }
}

/// An element of `A = ⊕ M_{n_i}`, one square block per unit.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    pub blocks: Vec<ComplexMatrix>,
}

impl AlgebraElement {
    pub fn new(blocks: Vec<ComplexMatrix>) -> Self {
        Self { blocks }
    }

    /// Scalars on one-dimensional blocks.
    pub fn scalars(values: &[Complex64]) -> Self {
        Self {
            blocks: values
                .iter()
                .map(|&z| ComplexMatrix::from_diagonal(&[z]))
                .collect(),
        }
    }

    pub fn identity(dims: &[usize]) -> Self {
        Self {
            blocks: dims.iter().map(|&n| ComplexMatrix::identity(n)).collect(),
        }
    }

    pub fn multiply(&self, rhs: &Self) -> Result<Self> {
        if self.blocks.len() != rhs.blocks.len() {
            return Err(Error::Dimension("algebra elements over different unit sets".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&rhs.blocks)
            .map(|(a, b)| a.try_mul(b))
            .collect::<Result<_>>()?;
        Ok(Self { blocks })
    }
}

#[derive(Debug, Clone)]
pub struct Representation {
    config: GeometryConfig,
    blocks: BlockStructure,
    chi: ComplexMatrix,
    /// Real orthogonal part `K` of `J = K ∘ conj`.
    j_linear: ComplexMatrix,
}

impl Representation {
    pub fn new(config: GeometryConfig) -> Result<Self> {
        config.validate()?;
        let blocks = config.bundle.block_structure();
        let m = blocks.total();

        let mut chi_diag = Vec::with_capacity(m);
        for (i, s) in config.chirality.iter().enumerate() {
            chi_diag.extend(std::iter::repeat_n(Complex64::new(s.value(), 0.0), blocks.dim(i)));
        }
        let chi = ComplexMatrix::from_diagonal(&chi_diag);

        let mut j_linear = ComplexMatrix::zeros(m, m);
        for i in 0..blocks.len() {
            let partner = config.conjugation[i];
            let sign = if i <= partner { 1.0 } else { config.j_squared.value() };
            let n = blocks.dim(i);
            blocks.set_block(&mut j_linear, i, partner, &ComplexMatrix::identity(n).scale_real(sign));
        }

        Ok(Self {
            config,
            blocks,
            chi,
            j_linear,
        })
    }

    pub fn config(&self) -> &GeometryConfig {
        &self.config
    }

    pub fn bundle(&self) -> &FellBundle {
        &self.config.bundle
    }

    pub fn blocks(&self) -> &BlockStructure {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.blocks.total()
    }

    pub fn units(&self) -> usize {
        self.blocks.len()
    }

    pub fn chi(&self) -> &ComplexMatrix {
        &self.chi
    }

    /// The real signed permutation `K` with `J v = K conj(v)`.
    pub fn j_linear_part(&self) -> &ComplexMatrix {
        &self.j_linear
    }

    fn check_element(&self, a: &AlgebraElement) -> Result<()> {
        if a.blocks.len() != self.units() {
            return Err(Error::Dimension(format!(
                "algebra element has {} blocks, geometry has {} units",
                a.blocks.len(),
                self.units()
            )));
        }
        for (i, b) in a.blocks.iter().enumerate() {
            let n = self.blocks.dim(i);
            if b.shape() != (n, n) {
                return Err(Error::Dimension(format!(
                    "block {i} is {}x{}, expected {n}x{n}",
                    b.rows(),
                    b.cols()
                )));
            }
        }
        Ok(())
    }

    /// `diag(a_1, ..., a_k)`.
    pub fn rho(&self, a: &AlgebraElement) -> Result<ComplexMatrix> {
        self.check_element(a)?;
        let m = self.dim();
        let mut out = ComplexMatrix::zeros(m, m);
        for (i, b) in a.blocks.iter().enumerate() {
            self.blocks.set_block(&mut out, i, i, b);
        }
        Ok(out)
    }

    /// `ρ(b^opp) = J ρ(b)* J^{-1}`.
    pub fn rho_opp(&self, b: &AlgebraElement) -> Result<ComplexMatrix> {
        Ok(self.conjugate_by_j(&self.rho(b)?.adjoint()))
    }

    pub fn apply_j(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim() {
            return Err(Error::Dimension(format!("vector of length {} on C^{}", v.len(), self.dim())));
        }
        let col = ComplexMatrix::new(v.len(), 1, v.iter().map(|z| z.conj()).collect())?;
        Ok((&self.j_linear * &col).entries())
    }

    /// `J M J^{-1} = K conj(M) K^T`.
    pub fn conjugate_by_j(&self, m: &ComplexMatrix) -> ComplexMatrix {
        &(&self.j_linear * &m.conj()) * &self.j_linear.transpose()
    }

    /// Matrix units of every block, ordered by unit then row then column.
    pub fn algebra_basis(&self) -> Vec<AlgebraElement> {
        let dims = self.blocks.dims();
        let mut out = Vec::new();
        for (i, &n) in dims.iter().enumerate() {
            for r in 0..n {
                for c in 0..n {
                    let blocks = dims
                        .iter()
                        .enumerate()
                        .map(|(k, &nk)| {
                            if k == i {
                                ComplexMatrix::unit(n, n, r, c)
                            } else {
                                ComplexMatrix::zeros(nk, nk)
                            }
                        })
                        .collect();
                    out.push(AlgebraElement { blocks });
                }
            }
        }
        out
    }

    /// `ρ` of every basis element, in basis order.
    pub fn rho_basis(&self) -> Vec<ComplexMatrix> {
        self.algebra_basis()
            .iter()
            .map(|a| self.rho(a).expect("basis elements have the right shape"))
            .collect()
    }

    pub fn rho_opp_basis(&self) -> Vec<ComplexMatrix> {
        self.algebra_basis()
            .iter()
            .map(|a| self.rho_opp(a).expect("basis elements have the right shape"))
            .collect()
    }

    /// `max ‖[ρ(a), ρ_opp(b)]‖` over basis pairs.
    pub fn check_order_zero(&self, tol: f64) -> Check {
        let left = self.rho_basis();
        let right = self.rho_opp_basis();
        let mut worst: f64 = 0.0;
        for a in &left {
            for b in &right {
                let k = a.commutator(b).expect("same dimension");
                worst = worst.max(k.operator_norm());
            }
        }
        Check::new("order_zero", worst, tol)
    }

    /// `χ^2 = I` and `[ρ(a), χ] = 0` on the basis.
    pub fn check_grading(&self, tol: f64) -> Check {
        let m = self.dim();
        let mut worst = (&(&self.chi * &self.chi) - &ComplexMatrix::identity(m)).operator_norm();
        for a in self.rho_basis() {
            worst = worst.max(a.commutator(&self.chi).expect("same dimension").operator_norm());
        }
        Check::new("grading", worst, tol)
    }

    /// `‖J^2 - j_squared‖` on the standard basis.
    pub fn check_j_squared(&self, tol: f64) -> Check {
        let m = self.dim();
        let want = self.config.j_squared.value();
        let mut worst: f64 = 0.0;
        for k in 0..m {
            let mut e = vec![ZERO; m];
            e[k] = ONE;
            let jj = self.apply_j(&self.apply_j(&e).expect("dims")).expect("dims");
            for (idx, z) in jj.iter().enumerate() {
                let target = if idx == k { want } else { 0.0 };
                worst = worst.max((z - Complex64::new(target, 0.0)).norm());
            }
        }
        Check::new("j_squared", worst, tol)
    }
}
