use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::{constraint_residual, Constraint, ConstraintSet};
use crate::error::{Error, Result};
use crate::matrix::{real_nullspace, ComplexMatrix, Part, RealLinearSystem, UnknownLabel, DEFAULT_TOLERANCE};
use crate::representation::Representation;
use crate::sheaf::{all_patterns, enumerate_patterns, Direction, Pattern};

pub const DEFAULT_MAX_UNITS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub max_units: usize,
    /// Prune patterns by the necessary conditions of the chosen constraints.
    /// Turning this off solves every pattern and must give the same answer.
    pub prune: bool,
    pub tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_units: DEFAULT_MAX_UNITS,
            prune: true,
            tol: DEFAULT_TOLERANCE,
        }
    }
}

/// The admissible fields supported on one pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracSolution {
    pub pattern: Pattern,
    /// Real dimension of the solution space.
    pub real_dimension: usize,
    /// Orthonormal real basis, as `m x m` matrices.
    pub basis: Vec<ComplexMatrix>,
    /// Independent post-solve residual of each constraint, maximised over the basis.
    pub residuals: BTreeMap<Constraint, f64>,
    /// Every basis element commutes with the left action.
    pub zero_derivation: bool,
}

impl DiracSolution {
    /// Sum of the basis: a generic representative with every block nonzero.
    pub fn representative(&self) -> ComplexMatrix {
        let m = self.basis[0].rows();
        self.basis
            .iter()
            .fold(ComplexMatrix::zeros(m, m), |acc, b| &acc + b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiracSpace {
    pub constraints: ConstraintSet,
    /// Reported solutions in lexicographic pattern order.
    pub solutions: Vec<DiracSolution>,
    pub patterns_examined: usize,
}

impl DiracSpace {
    pub fn total_real_dimension(&self) -> usize {
        self.solutions.iter().map(|s| s.real_dimension).sum()
    }

    pub fn patterns(&self) -> Vec<Vec<usize>> {
        self.solutions.iter().map(|s| s.pattern.map.clone()).collect()
    }
}

/// Real basis of fields on `pattern`: one matrix per real unknown.
fn unknowns(rep: &Representation, pattern: &Pattern) -> (Vec<UnknownLabel>, Vec<ComplexMatrix>) {
    let bs = rep.blocks();
    let m = rep.dim();
    let mut labels = Vec::new();
    let mut mats = Vec::new();
    for (br, bc) in pattern.blocks() {
        for row in 0..bs.dim(br) {
            for col in 0..bs.dim(bc) {
                for (part, z) in [(Part::Re, Complex64::new(1.0, 0.0)), (Part::Im, Complex64::new(0.0, 1.0))] {
                    let mut e = ComplexMatrix::zeros(m, m);
                    e.set(bs.offset(br) + row, bs.offset(bc) + col, z);
                    labels.push(UnknownLabel { block: (br, bc), row, col, part });
                    mats.push(e);
                }
            }
        }
    }
    (labels, mats)
}

/// The real-linear maps `Φ` whose kernels are the linear constraints.
type LinearMap<'a> = Box<dyn Fn(&ComplexMatrix) -> ComplexMatrix + Send + Sync + 'a>;

fn linear_maps<'a>(rep: &'a Representation, constraints: &ConstraintSet) -> Vec<LinearMap<'a>> {
    let mut out: Vec<LinearMap<'a>> = Vec::new();
    let cfg = rep.config();
    for c in constraints.iter().filter(|c| c.is_linear()) {
        match c {
            Constraint::SelfAdjoint => out.push(Box::new(|x| x - &x.adjoint())),
            Constraint::JReal => {
                let eps = cfg.spin_sign.value();
                out.push(Box::new(move |x| x - &rep.conjugate_by_j(x).scale_real(eps)));
            }
            Constraint::ChiAnticommute => {
                let chi = rep.chi();
                out.push(Box::new(move |x| &(x * chi) + &(chi * x)));
            }
            Constraint::S0Reality => {
                let bs = rep.blocks();
                out.push(Box::new(move |x| {
                    let mut y = ComplexMatrix::zeros(x.rows(), x.cols());
                    for i in 0..bs.len() {
                        for j in 0..bs.len() {
                            if cfg.sector[i] != cfg.sector[j] {
                                bs.set_block(&mut y, i, j, &bs.get_block(x, i, j));
                            }
                        }
                    }
                    y
                }));
            }
            Constraint::FirstOrder => {
                let left = rep.rho_basis();
                let right = rep.rho_opp_basis();
                for a in left {
                    for b in &right {
                        let b = b.clone();
                        let a = a.clone();
                        out.push(Box::new(move |x| {
                            let inner = &(x * &a) - &(&a * x);
                            &(&inner * &b) - &(&b * &inner)
                        }));
                    }
                }
            }
            Constraint::TensorFactor => unreachable!("filtered above"),
        }
    }
    out
}

/// The realified homogeneous system for fields supported on `pattern`.
/// Identically zero rows are dropped.
pub fn constraint_system(rep: &Representation, pattern: &Pattern, constraints: &ConstraintSet) -> Result<RealLinearSystem> {
    if pattern.len() != rep.units() {
        return Err(Error::Dimension("pattern does not match the geometry".into()));
    }
    let (labels, mats) = unknowns(rep, pattern);
    let maps = linear_maps(rep, constraints);
    let columns: Vec<Vec<f64>> = mats
        .iter()
        .map(|b| maps.iter().flat_map(|phi| phi(b).realify()).collect())
        .collect();
    let nrows = columns.first().map_or(0, Vec::len);
    let keep: Vec<usize> = (0..nrows)
        .filter(|&r| columns.iter().any(|col| col[r] != 0.0))
        .collect();
    let a = DMatrix::from_fn(keep.len(), columns.len(), |r, c| columns[c][keep[r]]);
    RealLinearSystem::new(a, labels)
}

fn combine(mats: &[ComplexMatrix], v: &DVector<f64>) -> ComplexMatrix {
    let m = mats[0].rows();
    mats.iter()
        .zip(v.iter())
        .filter(|(_, &w)| w != 0.0)
        .fold(ComplexMatrix::zeros(m, m), |acc, (b, &w)| &acc + &b.scale_real(w))
}

fn solve_pattern(
    rep: &Representation,
    pattern: &Pattern,
    constraints: &ConstraintSet,
    tol: f64,
) -> Result<Option<DiracSolution>> {
    let system = constraint_system(rep, pattern, constraints)?;
    let kernel = real_nullspace(&system, tol);
    if kernel.is_empty() {
        return Ok(None);
    }
    let (_, mats) = unknowns(rep, pattern);
    let basis: Vec<ComplexMatrix> = kernel.iter().map(|v| combine(&mats, v)).collect();

    // Only fields touching every block of the pattern are attributed to it;
    // a field vanishing on some block belongs to a smaller support.
    let bs = rep.blocks();
    let full_support = pattern
        .blocks()
        .all(|(i, j)| basis.iter().any(|b| !bs.get_block(b, i, j).is_zero(tol)));
    if !full_support {
        return Ok(None);
    }

    if constraints.contains(Constraint::TensorFactor) && rep.config().opp_dims.is_some() {
        let generic = basis.iter().fold(ComplexMatrix::zeros(rep.dim(), rep.dim()), |acc, b| &acc + b);
        let worst = constraint_residual(rep, &generic, Constraint::TensorFactor)?
            .max(basis.iter().try_fold(0.0f64, |w, b| {
                constraint_residual(rep, b, Constraint::TensorFactor).map(|r| w.max(r))
            })?);
        if worst > tol {
            return Ok(None);
        }
    }

    let mut residuals = BTreeMap::new();
    for c in constraints.iter() {
        let mut worst: f64 = 0.0;
        for b in &basis {
            worst = worst.max(constraint_residual(rep, b, c)?);
        }
        residuals.insert(c, worst);
    }
    let left = rep.rho_basis();
    let zero_derivation = basis
        .iter()
        .all(|b| left.iter().all(|a| b.commutator(a).map(|k| k.is_zero(tol)).unwrap_or(false)));

    Ok(Some(DiracSolution {
        pattern: pattern.clone(),
        real_dimension: basis.len(),
        basis,
        residuals,
        zero_derivation,
    }))
}

/// Every cotangent pattern carrying a nonzero field that satisfies all
/// `constraints` and is nonzero on each of its blocks.
pub fn dirac_space(rep: &Representation, constraints: &ConstraintSet, options: SolveOptions) -> Result<DiracSpace> {
    if constraints.is_empty() {
        return Err(Error::EmptyConstraints);
    }
    let k = rep.units();
    if k > options.max_units {
        return Err(Error::CapExceeded {
            units: k,
            cap: options.max_units,
        });
    }
    let patterns = if options.prune {
        enumerate_patterns(rep.config(), Direction::Cotangent, &constraints.pattern_filters())
    } else {
        all_patterns(rep.bundle().groupoid(), Direction::Cotangent)
    };

    #[cfg(feature = "parallel")]
    let iter = patterns.par_iter();
    #[cfg(not(feature = "parallel"))]
    let iter = patterns.iter();
    let solved: Vec<Option<DiracSolution>> = iter
        .map(|p| solve_pattern(rep, p, constraints, options.tol))
        .collect::<Result<_>>()?;

    Ok(DiracSpace {
        constraints: constraints.clone(),
        solutions: solved.into_iter().flatten().collect(),
        patterns_examined: patterns.len(),
    })
}
