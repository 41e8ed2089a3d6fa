//! Browser bindings for the two-point geometry. Every export returns a JSON
//! string; failures come back as `{"error": "..."}`.

use fell_geometry::dirac::{
    connes_distance, constraint_residual, dirac_space, fluctuate, spectrum_report, Constraint, ConstraintSet,
    Distance, FluctuationTerm, SolveOptions,
};
use fell_geometry::representation::{AlgebraElement, Representation};
use fell_geometry::spec::{parse_spec, solution_to_value};
use fell_geometry::{Complex64, ComplexMatrix, Result, DEFAULT_TOLERANCE};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const TWO_POINT: &str = include_str!("../../core/fixtures/two-point.json");

fn geometry() -> Result<Representation> {
    parse_spec(TWO_POINT)?.representation()
}

/// The swap-pattern operator with mass parameter `m`.
fn swap_dirac(m: Complex64) -> ComplexMatrix {
    let mut d = ComplexMatrix::zeros(4, 4);
    d.set(0, 1, m.conj());
    d.set(1, 0, m);
    d.set(2, 3, m);
    d.set(3, 2, m.conj());
    d
}

fn finish(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

/// Spectrum and `d(L, R)` for `m = re + i im`.
#[wasm_bindgen]
pub fn two_point(re: f64, im: f64) -> String {
    finish((|| {
        let rep = geometry()?;
        let d = swap_dirac(Complex64::new(re, im));
        let s = spectrum_report(&rep, &d, DEFAULT_TOLERANCE)?;
        let dist = match connes_distance(&rep, &d, 0, 1, 1e-9, DEFAULT_TOLERANCE)? {
            Distance::Finite(x) => json!(x),
            Distance::Unbounded => Value::Null,
        };
        Ok(json!({ "eigenvalues": s.eigenvalues, "masses": s.masses, "distance": dist }))
    })())
}

/// Solver output for a comma separated constraint list.
#[wasm_bindgen]
pub fn solve(constraints: &str) -> String {
    finish((|| {
        let rep = geometry()?;
        let cs = ConstraintSet::parse_list(constraints)?;
        let space = dirac_space(&rep, &cs, SolveOptions::default())?;
        Ok(json!({
            "patterns_examined": space.patterns_examined,
            "moduli_dimension": space.total_real_dimension(),
            "solutions": space.solutions.iter().map(|s| solution_to_value(&rep, s)).collect::<Vec<_>>(),
        }))
    })())
}

/// One-term fluctuation of the `m = 2` operator by the phases `e^{i θ}` on
/// `L, R, Lbar, Rbar`, optionally averaged with the identity.
#[wasm_bindgen]
pub fn fluctuate_phases(theta_l: f64, theta_r: f64, theta_lbar: f64, theta_rbar: f64, average: bool) -> String {
    finish((|| {
        let rep = geometry()?;
        let d = swap_dirac(Complex64::new(1.2, 1.6));
        let u = AlgebraElement::scalars(&[theta_l, theta_r, theta_lbar, theta_rbar].map(|t| Complex64::from_polar(1.0, t)));
        let terms = if average {
            vec![
                FluctuationTerm::new(0.5, AlgebraElement::identity(&[1; 4])),
                FluctuationTerm::new(0.5, u),
            ]
        } else {
            vec![FluctuationTerm::new(1.0, u)]
        };
        let f = fluctuate(&rep, &d, &terms, 1e-9)?;
        let residuals: serde_json::Map<String, Value> = Constraint::ALL
            .into_iter()
            .map(|c| constraint_residual(&rep, &f.fluctuated, c).map(|r| (c.name().to_owned(), json!(r))))
            .collect::<Result<_>>()?;
        let spectrum = spectrum_report(&rep, &f.fluctuated, 1e-9)?;
        Ok(json!({
            "matrix": f.fluctuated,
            "residuals": residuals,
            "eigenvalues": spectrum.eigenvalues,
        }))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn distance_is_inverse_mass() {
        let v = parse(two_point(0.0, 4.0));
        assert!((v["distance"].as_f64().unwrap() - 0.25).abs() < 1e-8);
        assert!(v["masses"].as_array().unwrap().iter().all(|m| (m.as_f64().unwrap() - 4.0).abs() < 1e-12));
        assert!(parse(two_point(0.0, 0.0))["distance"].is_null());
    }

    #[test]
    fn solver_toggles() {
        let v = parse(solve("self_adjoint,j_real,chi_anticommute,s0_reality"));
        assert_eq!(v["solutions"].as_array().unwrap().len(), 1);
        let v = parse(solve("self_adjoint,j_real,chi_anticommute"));
        assert_eq!(v["solutions"].as_array().unwrap().len(), 2);
        assert!(parse(solve("")).get("error").is_some());
        assert!(parse(solve("nonsense")).get("error").is_some());
    }

    #[test]
    fn phases_keep_the_spectrum() {
        let v = parse(fluctuate_phases(0.3, -1.0, 0.2, 2.0, false));
        for (e, want) in v["eigenvalues"].as_array().unwrap().iter().zip([-2.0, -2.0, 2.0, 2.0]) {
            assert!((e.as_f64().unwrap() - want).abs() < 1e-12);
        }
        let avg = parse(fluctuate_phases(std::f64::consts::PI, 0.0, 0.0, 0.0, true));
        assert!(avg["residuals"]["j_real"].as_f64().unwrap() > 1.0);
    }
}
