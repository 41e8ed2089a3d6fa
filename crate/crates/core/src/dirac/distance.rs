use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::require_square;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::representation::Representation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Absolute values of the eigenvalues, ascending.
    pub masses: Vec<f64>,
}

pub fn spectrum_report(rep: &Representation, d: &ComplexMatrix, tol: f64) -> Result<SpectrumReport> {
    require_square(rep, d)?;
    let eigenvalues = d.hermitian_spectrum(tol)?;
    let mut masses: Vec<f64> = eigenvalues.iter().map(|e| e.abs()).collect();
    masses.sort_by(f64::total_cmp);
    Ok(SpectrumReport { eigenvalues, masses })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Distance {
    Finite(f64),
    /// No operator in the connected part of `D` separates the two units.
    Unbounded,
}

impl Distance {
    pub fn value(self) -> Option<f64> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Unbounded => None,
        }
    }
}

/// `sup { |a_i - a_j| : ‖[D, ρ(a)]‖ <= 1 }` over real multiples of the identity
/// on each block.
///
/// The sup is `1 / min ‖[D, ρ(a)]‖` with `a_i = 1`, `a_j = 0`, a convex problem
/// in the remaining coefficients. It is solved with the ellipsoid method until
/// the certified gap in the distance falls below `resolution`. Units not
/// connected to `i` through nonzero blocks of `D` are set to zero; if `j` is
/// among them the distance is unbounded.
pub fn connes_distance(rep: &Representation, d: &ComplexMatrix, i: usize, j: usize, resolution: f64, tol: f64) -> Result<Distance> {
    require_square(rep, d)?;
    let bs = rep.blocks();
    let k = bs.len();
    for u in [i, j] {
        if u >= k {
            return Err(Error::UnknownUnit(format!("#{u}")));
        }
        if bs.dim(u) != 1 {
            return Err(Error::NonabelianEndpoint(rep.bundle().groupoid().unit_id(u).to_owned()));
        }
    }
    if !d.is_hermitian(tol) {
        return Err(Error::NotHermitian((d - &d.adjoint()).max_abs()));
    }
    if i == j {
        return Ok(Distance::Finite(0.0));
    }

    let linked = |p: usize, q: usize| !bs.get_block(d, p, q).is_zero(tol);
    let mut seen = vec![false; k];
    let mut queue = VecDeque::from([i]);
    seen[i] = true;
    while let Some(p) = queue.pop_front() {
        for (q, s) in seen.iter_mut().enumerate() {
            if !*s && linked(p, q) {
                *s = true;
                queue.push_back(q);
            }
        }
    }
    if !seen[j] {
        return Ok(Distance::Unbounded);
    }

    // [D, P_u] for every unit of the component.
    let m = rep.dim();
    let comm = |u: usize| {
        let mut p = ComplexMatrix::zeros(m, m);
        bs.set_block(&mut p, u, u, &ComplexMatrix::identity(bs.dim(u)));
        d.commutator(&p).expect("square")
    };
    let base = comm(i);
    let free: Vec<usize> = (0..k).filter(|&u| seen[u] && u != i && u != j).collect();
    let dirs: Vec<DMatrix<Complex64>> = free.iter().map(|&u| comm(u).as_nalgebra().clone()).collect();
    let objective = Objective {
        base: base.as_nalgebra().clone(),
        dirs,
    };

    let best = match free.len() {
        0 => objective.value(&DVector::zeros(0)),
        1 => golden_section(&objective),
        _ => ellipsoid(&objective, resolution),
    };
    Ok(Distance::Finite(1.0 / best))
}

struct Objective {
    base: DMatrix<Complex64>,
    dirs: Vec<DMatrix<Complex64>>,
}

impl Objective {
    fn matrix(&self, t: &DVector<f64>) -> DMatrix<Complex64> {
        let mut out = self.base.clone();
        for (dir, &w) in self.dirs.iter().zip(t.iter()) {
            out += dir * Complex64::new(w, 0.0);
        }
        out
    }

    fn value(&self, t: &DVector<f64>) -> f64 {
        self.matrix(t).singular_values().max()
    }

    /// Value and a subgradient `Re(u* L_k v)` from the top singular pair.
    fn value_and_subgradient(&self, t: &DVector<f64>) -> (f64, DVector<f64>) {
        let svd = self.matrix(t).svd(true, true);
        let (top, &sigma) = svd
            .singular_values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        let u = svd.u.as_ref().expect("requested").column(top).into_owned();
        let v = svd.v_t.as_ref().expect("requested").row(top).adjoint();
        let g = DVector::from_iterator(
            self.dirs.len(),
            self.dirs.iter().map(|l| (u.adjoint() * l * &v)[(0, 0)].re),
        );
        (sigma, g)
    }
}

/// Initial search radius around `t = 1/2`. Optimal coefficients interpolate
/// between the endpoint values, so this is generous.
const RADIUS: f64 = 10.0;

fn golden_section(f: &Objective) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.5 - RADIUS, 0.5 + RADIUS);
    let at = |x: f64| f.value(&DVector::from_element(1, x));
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (at(x1), at(x2));
    for _ in 0..200 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = at(x2);
        }
    }
    f1.min(f2)
}

fn ellipsoid(f: &Objective, resolution: f64) -> f64 {
    let n = f.dirs.len();
    let nf = n as f64;
    let r = RADIUS * nf.sqrt();
    let mut x = DVector::from_element(n, 0.5);
    let mut p = DMatrix::identity(n, n) * (r * r);
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    for _ in 0..200_000 {
        let (value, g) = f.value_and_subgradient(&x);
        upper = upper.min(value);
        let pg = &p * &g;
        let width = g.dot(&pg).max(0.0).sqrt();
        lower = lower.max(value - width);
        // Distance error is about (upper - lower) / upper^2.
        if width == 0.0 || upper - lower <= 0.5 * resolution * upper * upper {
            break;
        }
        let step = &pg / width;
        x -= &step / (nf + 1.0);
        p = (&p - (&step * step.transpose()) * (2.0 / (nf + 1.0))) * (nf * nf / (nf * nf - 1.0));
    }
    upper
}
