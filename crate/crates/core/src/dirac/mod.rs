//! Dirac operators on a finite Fell bundle geometry.
//!
//! [`dirac_space`] finds, for every cotangent pattern, the real-linear space of
//! fields satisfying a chosen [`ConstraintSet`]. The remaining submodules work
//! with a concrete operator: first-order machinery, fluctuations, observables,
//! spectrum and distance.

mod distance;
mod first_order;
mod fluctuation;
mod observables;
mod solver;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{tensor_rank_one, ComplexMatrix, ONE};
use crate::representation::Representation;
use crate::sheaf::PatternFilter;

pub use distance::{connes_distance, spectrum_report, Distance, SpectrumReport};
pub use first_order::{derivation_identity_residual, first_order_residual, FirstOrderReport};
pub use fluctuation::{fluctuate, FluctuationReport, FluctuationTerm};
pub use observables::{
    check_s0_reality, generate_observable_algebra, j_commutation_residual, j_identity_residual,
    observable_closure_check, AlgebraClosure, ClosureReport,
};
pub use solver::{constraint_system, dirac_space, DiracSolution, DiracSpace, SolveOptions, DEFAULT_MAX_UNITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// `x = x*`
    SelfAdjoint,
    /// `x J = ε' J x`
    JReal,
    /// `x χ = -χ x`
    ChiAnticommute,
    /// `[[x, ρ(a)], ρ_opp(b)] = 0` for all basis `a`, `b`
    FirstOrder,
    /// No block joins a particle unit to an antiparticle unit.
    S0Reality,
    /// Every nonzero block is a Kronecker product `e ⊗ f`.
    TensorFactor,
}

impl Constraint {
    pub const ALL: [Constraint; 6] = [
        Constraint::SelfAdjoint,
        Constraint::JReal,
        Constraint::ChiAnticommute,
        Constraint::FirstOrder,
        Constraint::S0Reality,
        Constraint::TensorFactor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Constraint::SelfAdjoint => "self_adjoint",
            Constraint::JReal => "j_real",
            Constraint::ChiAnticommute => "chi_anticommute",
            Constraint::FirstOrder => "first_order",
            Constraint::S0Reality => "s0_reality",
            Constraint::TensorFactor => "tensor_factor",
        }
    }

    /// Whether the condition is linear in the field (and so goes into the solver's system).
    pub fn is_linear(self) -> bool {
        !matches!(self, Constraint::TensorFactor)
    }

    /// Pattern filter implied by the condition for fully supported fields.
    pub fn pattern_filter(self) -> Option<PatternFilter> {
        match self {
            Constraint::SelfAdjoint => Some(PatternFilter::Involution),
            Constraint::JReal => Some(PatternFilter::ConjugationEquivariant),
            Constraint::ChiAnticommute => Some(PatternFilter::ChiralityFlip),
            Constraint::S0Reality => Some(PatternFilter::SectorPreserving),
            Constraint::FirstOrder | Constraint::TensorFactor => None,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Constraint::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::UnknownConstraint(s.trim().to_owned()))
    }
}

/// A non-empty set of conditions, iterated in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ConstraintSet(BTreeSet<Constraint>);

impl ConstraintSet {
    pub fn new<I: IntoIterator<Item = Constraint>>(items: I) -> Self {
        Self(items.into_iter().collect())
    }

    /// The selection used for the two-point example.
    pub fn standard() -> Self {
        Self::new([
            Constraint::SelfAdjoint,
            Constraint::JReal,
            Constraint::ChiAnticommute,
            Constraint::S0Reality,
        ])
    }

    /// Parses a comma separated list of names.
    pub fn parse_list(list: &str) -> Result<Self> {
        list.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(str::parse)
            .collect::<Result<BTreeSet<_>>>()
            .map(Self)
    }

    pub fn contains(&self, c: Constraint) -> bool {
        self.0.contains(&c)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Constraint> + '_ {
        self.0.iter().copied()
    }

    pub fn without(&self, c: Constraint) -> Self {
        Self(self.0.iter().copied().filter(|&x| x != c).collect())
    }

    pub fn with(&self, c: Constraint) -> Self {
        let mut s = self.0.clone();
        s.insert(c);
        Self(s)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.iter().map(Constraint::name).collect()
    }

    pub fn pattern_filters(&self) -> Vec<PatternFilter> {
        self.iter().filter_map(Constraint::pattern_filter).collect()
    }
}

impl FromIterator<Constraint> for ConstraintSet {
    fn from_iter<I: IntoIterator<Item = Constraint>>(iter: I) -> Self {
        Self::new(iter)
    }
}

fn require_square(rep: &Representation, x: &ComplexMatrix) -> Result<()> {
    let m = rep.dim();
    if x.shape() != (m, m) {
        return Err(Error::Dimension(format!(
            "operator is {}x{}, geometry acts on C^{m}",
            x.rows(),
            x.cols()
        )));
    }
    Ok(())
}

/// Residual of one condition on a concrete operator.
///
/// These are evaluated directly (entrywise, or through the antiunitary action
/// of `J` on vectors) and do not share code with the solver's linear system,
/// so they double as an independent check of solver output.
pub fn constraint_residual(rep: &Representation, x: &ComplexMatrix, c: Constraint) -> Result<f64> {
    require_square(rep, x)?;
    let m = rep.dim();
    let bs = rep.blocks();
    Ok(match c {
        Constraint::SelfAdjoint => {
            let mut worst: f64 = 0.0;
            for r in 0..m {
                for col in 0..m {
                    worst = worst.max((x.get(r, col) - x.get(col, r).conj()).norm());
                }
            }
            worst
        }
        Constraint::JReal => {
            // ‖x J v - ε' J x v‖ over v = e_k and v = i e_k covers the real-linear map.
            let eps = rep.config().spin_sign.value();
            let mut worst: f64 = 0.0;
            for k in 0..m {
                for phase in [ONE, Complex64::new(0.0, 1.0)] {
                    let mut v = vec![Complex64::new(0.0, 0.0); m];
                    v[k] = phase;
                    let jv = rep.apply_j(&v)?;
                    let xjv = apply(x, &jv);
                    let jxv = rep.apply_j(&apply(x, &v))?;
                    for (a, b) in xjv.iter().zip(&jxv) {
                        worst = worst.max((a - b * eps).norm());
                    }
                }
            }
            worst
        }
        Constraint::ChiAnticommute => {
            let chir = &rep.config().chirality;
            let mut worst: f64 = 0.0;
            for r in 0..m {
                for col in 0..m {
                    let s = chir[bs.block_of(r)].value() + chir[bs.block_of(col)].value();
                    worst = worst.max((x.get(r, col) * s).norm());
                }
            }
            worst
        }
        Constraint::FirstOrder => first_order_residual(rep, x)?.residual,
        Constraint::S0Reality => {
            let sector = &rep.config().sector;
            let mut worst: f64 = 0.0;
            for r in 0..m {
                for col in 0..m {
                    if sector[bs.block_of(r)] != sector[bs.block_of(col)] {
                        worst = worst.max(x.get(r, col).norm());
                    }
                }
            }
            worst
        }
        Constraint::TensorFactor => tensor_factor_residual(rep, x)?,
    })
}

/// Largest second singular value over reshaped nonzero blocks; zero when no
/// factorization is declared (scalar fibers factor trivially).
fn tensor_factor_residual(rep: &Representation, x: &ComplexMatrix) -> Result<f64> {
    let cfg = rep.config();
    if cfg.opp_dims.is_none() {
        return Ok(0.0);
    }
    let bs = rep.blocks();
    let mut worst: f64 = 0.0;
    for i in 0..bs.len() {
        for j in 0..bs.len() {
            let block = bs.get_block(x, i, j);
            let dims = cfg.kron_dims(i, j).expect("opp_dims present");
            if block.max_abs() == 0.0 || tensor_rank_one(&block, dims, 0.0)? {
                continue;
            }
            let mut reshaped = ComplexMatrix::zeros(dims.n_i * dims.n_j, dims.n_i_opp * dims.n_j_opp);
            for a in 0..dims.n_i {
                for ap in 0..dims.n_i_opp {
                    for b in 0..dims.n_j {
                        for bp in 0..dims.n_j_opp {
                            reshaped.set(
                                a * dims.n_j + b,
                                ap * dims.n_j_opp + bp,
                                block.get(a * dims.n_i_opp + ap, b * dims.n_j_opp + bp),
                            );
                        }
                    }
                }
            }
            let sv = reshaped.as_nalgebra().singular_values();
            let mut s: Vec<f64> = sv.iter().copied().collect();
            s.sort_by(|a, b| b.total_cmp(a));
            worst = worst.max(s.get(1).copied().unwrap_or(0.0));
        }
    }
    Ok(worst)
}

fn apply(x: &ComplexMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (0..x.rows())
        .map(|r| (0..x.cols()).map(|c| x.get(r, c) * v[c]).sum())
        .collect()
}

/// Per-condition residuals for every condition, in a fixed order.
pub fn residual_table(rep: &Representation, x: &ComplexMatrix) -> Result<Vec<(Constraint, f64)>> {
    Constraint::ALL
        .into_iter()
        .map(|c| constraint_residual(rep, x, c).map(|r| (c, r)))
        .collect()
}
