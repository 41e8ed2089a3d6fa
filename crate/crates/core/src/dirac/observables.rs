use num_complex::Complex64;

use super::{constraint_residual, require_square, Constraint};
use crate::error::Result;
use crate::matrix::ComplexMatrix;
use crate::representation::Representation;

/// `‖xJ - Jx‖` with `J` acting antilinearly; equals `‖xK - K conj(x)‖`.
pub fn j_commutation_residual(rep: &Representation, x: &ComplexMatrix) -> Result<f64> {
    require_square(rep, x)?;
    let k = rep.j_linear_part();
    Ok((&(x * k) - &(k * &x.conj())).operator_norm())
}

/// `‖x - J x* J*‖`, the matrix form of J-commutation for self-adjoint `x`.
pub fn j_identity_residual(rep: &Representation, x: &ComplexMatrix) -> Result<f64> {
    require_square(rep, x)?;
    Ok((x - &rep.conjugate_by_j(&x.adjoint())).operator_norm())
}

/// True iff no nonzero block joins the particle and antiparticle sectors.
pub fn check_s0_reality(rep: &Representation, x: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(constraint_residual(rep, x, Constraint::S0Reality)? <= tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureReport {
    pub accepted: usize,
    pub rejected: usize,
    pub pairs_checked: usize,
    pub max_residual: f64,
    pub pass: bool,
}

/// Keeps the samples commuting with `J` and checks that all their pairwise
/// products do too.
pub fn observable_closure_check(rep: &Representation, samples: &[ComplexMatrix], tol: f64) -> Result<ClosureReport> {
    let mut kept = Vec::new();
    for x in samples {
        if j_commutation_residual(rep, x)? < tol {
            kept.push(x);
        }
    }
    let mut max_residual: f64 = 0.0;
    let mut pairs = 0;
    for x in &kept {
        for y in &kept {
            max_residual = max_residual.max(j_commutation_residual(rep, &(*x * *y))?);
            pairs += 1;
        }
    }
    Ok(ClosureReport {
        accepted: kept.len(),
        rejected: samples.len() - kept.len(),
        pairs_checked: pairs,
        max_residual,
        pass: max_residual < tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraClosure {
    /// Complex dimension of the generated *-algebra.
    pub dimension: usize,
    /// Orthonormal basis (Frobenius inner product) of the algebra.
    pub basis: Vec<ComplexMatrix>,
}

fn inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    a.as_nalgebra()
        .iter()
        .zip(b.as_nalgebra().iter())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

/// Adds `c` to the orthonormal list if it is independent to `tol`.
fn absorb(basis: &mut Vec<ComplexMatrix>, c: &ComplexMatrix, tol: f64) -> bool {
    let scale = c.frobenius_norm();
    if scale == 0.0 {
        return false;
    }
    let mut r = c.scale_real(1.0 / scale);
    for _ in 0..2 {
        for b in basis.iter() {
            let p = inner(b, &r);
            r = &r - &b.scale(p);
        }
    }
    let n = r.frobenius_norm();
    if n <= tol {
        return false;
    }
    basis.push(r.scale_real(1.0 / n));
    true
}

/// Closes the span of `generators` under products and adjoints.
pub fn generate_observable_algebra(generators: &[ComplexMatrix], tol: f64) -> AlgebraClosure {
    let Some(first) = generators.first() else {
        return AlgebraClosure {
            dimension: 0,
            basis: Vec::new(),
        };
    };
    let cap = first.rows() * first.cols();
    let mut basis = Vec::new();
    for g in generators {
        absorb(&mut basis, g, tol);
    }
    let mut i = 0;
    while i < basis.len() && basis.len() < cap {
        let bi = basis[i].clone();
        absorb(&mut basis, &bi.adjoint(), tol);
        for j in 0..=i {
            let bj = basis[j].clone();
            absorb(&mut basis, &(&bi * &bj), tol);
            absorb(&mut basis, &(&bj * &bi), tol);
        }
        i += 1;
    }
    AlgebraClosure {
        dimension: basis.len(),
        basis,
    }
}
