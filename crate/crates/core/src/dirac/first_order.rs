use super::require_square;
use crate::error::Result;
use crate::matrix::ComplexMatrix;
use crate::representation::Representation;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderReport {
    /// `max ‖[[x, ρ(a)], ρ_opp(b)]‖` over basis pairs.
    pub residual: f64,
    /// The same with the brackets nested the other way.
    pub reversed_residual: f64,
    /// Largest gap between the two nestings for a single pair.
    pub max_gap: f64,
}

/// First-order residual, computed by expanding the double commutator.
pub fn first_order_residual(rep: &Representation, x: &ComplexMatrix) -> Result<FirstOrderReport> {
    require_square(rep, x)?;
    let left = rep.rho_basis();
    let right = rep.rho_opp_basis();
    let mut report = FirstOrderReport {
        residual: 0.0,
        reversed_residual: 0.0,
        max_gap: 0.0,
    };
    for a in &left {
        let xa = x * a;
        let ax = a * x;
        for b in &right {
            // [[x,a],b] = xab - axb - bxa + bax
            let xab = &xa * b;
            let axb = &ax * b;
            let bxa = b * &xa;
            let bax = b * &ax;
            let outer = &(&(&xab - &axb) - &bxa) + &bax;
            // [[x,b],a] = xba - bxa - axb + abx
            let xba = &(x * b) * a;
            let abx = &(a * b) * x;
            let reversed = &(&(&xba - &bxa) - &axb) + &abx;
            report.residual = report.residual.max(outer.operator_norm());
            report.reversed_residual = report.reversed_residual.max(reversed.operator_norm());
            report.max_gap = report.max_gap.max((&outer - &reversed).operator_norm());
        }
    }
    Ok(report)
}

/// `max ‖[x, ab] - (a[x, b] + [x, a]b)‖` over basis pairs of the left action.
pub fn derivation_identity_residual(rep: &Representation, x: &ComplexMatrix) -> Result<f64> {
    require_square(rep, x)?;
    let left = rep.rho_basis();
    let mut worst: f64 = 0.0;
    for a in &left {
        let da = x.commutator(a)?;
        for b in &left {
            let db = x.commutator(b)?;
            let dab = x.commutator(&(a * b))?;
            let leibniz = &(a * &db) + &(&da * b);
            worst = worst.max((&dab - &leibniz).operator_norm());
        }
    }
    Ok(worst)
}
