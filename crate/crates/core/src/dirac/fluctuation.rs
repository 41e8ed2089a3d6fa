use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{check_s0_reality, constraint_residual, require_square, Constraint};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::representation::{AlgebraElement, Representation};

/// One summand `r U D U*` of a fluctuation, with `U = ρ(u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluctuationTerm {
    pub r: f64,
    /// One square block per unit.
    pub u: Vec<ComplexMatrix>,
}

impl FluctuationTerm {
    pub fn new(r: f64, u: AlgebraElement) -> Self {
        Self { r, u: u.blocks }
    }

    pub fn identity(rep: &Representation) -> Self {
        Self::new(1.0, AlgebraElement::identity(rep.blocks().dims()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationReport {
    pub fluctuated: ComplexMatrix,
    /// Residual of every condition, before and after.
    pub before: BTreeMap<Constraint, f64>,
    pub after: BTreeMap<Constraint, f64>,
    pub s0_reality: bool,
}

/// `D^f = Σ r_j U_j D U_j*`. Each `U_j` must be unitary to `tol`.
pub fn fluctuate(rep: &Representation, d: &ComplexMatrix, terms: &[FluctuationTerm], tol: f64) -> Result<FluctuationReport> {
    require_square(rep, d)?;
    let m = rep.dim();
    let mut out = ComplexMatrix::zeros(m, m);
    for (index, t) in terms.iter().enumerate() {
        if !t.r.is_finite() {
            return Err(Error::NonFinite);
        }
        let u = rep.rho(&AlgebraElement::new(t.u.clone()))?;
        let defect = (&(&u * &u.adjoint()) - &ComplexMatrix::identity(m)).operator_norm();
        if defect > tol {
            return Err(Error::NotUnitary { index, defect });
        }
        let conjugated = &(&u * d) * &u.adjoint();
        out = &out + &conjugated.scale_real(t.r);
    }
    let table = |x: &ComplexMatrix| -> Result<BTreeMap<Constraint, f64>> {
        Constraint::ALL
            .into_iter()
            .map(|c| constraint_residual(rep, x, c).map(|r| (c, r)))
            .collect()
    };
    Ok(FluctuationReport {
        before: table(d)?,
        after: table(&out)?,
        s0_reality: check_s0_reality(rep, &out, tol)?,
        fluctuated: out,
    })
}
