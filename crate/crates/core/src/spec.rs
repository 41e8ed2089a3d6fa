//! Geometry spec files and machine-readable reports.
//!
//! A spec file is JSON:
//!
//! ```json
//! {
//!   "name": "two-point",
//!   "units": [{"id": "L", "dim": 1, "chirality": 1, "sector": "particle"}, ...],
//!   "conjugation": [["L", "Lbar"], ["R", "Rbar"]],
//!   "groupoid": {"type": "pair"},
//!   "j_squared": 1,
//!   "spin_sign": 1,
//!   "constraints": ["self_adjoint", "j_real", "chi_anticommute", "s0_reality"],
//!   "dirac": {"pattern": {"L": "R", ...}, "entries": {"L": [[{"re": 1.2, "im": -1.6}]], ...}},
//!   "opp_dims": {"L": [1, 1], ...}
//! }
//! ```
//!
//! Units missing from `conjugation` are self-conjugate. `dirac` may instead
//! carry a full `"matrix"`. `constraints` defaults to the standard selection.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::bundle::FellBundle;
use crate::dirac::{ConstraintSet, DiracSolution};
use crate::error::{Error, Result};
use crate::groupoid::FiniteGroupoid;
use crate::matrix::ComplexMatrix;
use crate::representation::{GeometryConfig, Representation, Sector, Sign};
use crate::sheaf::{arrow_sheaf, Direction, DiscreteSheaf, MorphismField, Pattern};

/// Result of one named check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    #[serde(skip)]
    pub name: String,
    pub pass: bool,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    /// Passes when `residual <= tol`.
    pub fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            pass: residual <= tol,
            residual,
            note: None,
        }
    }

    pub fn flag(name: impl Into<String>, pass: bool) -> Self {
        Self {
            name: name.into(),
            pass,
            residual: if pass { 0.0 } else { 1.0 },
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// An explicit Dirac operator in a spec file.
#[derive(Debug, Clone, PartialEq)]
pub enum DiracSpec {
    Field(MorphismField),
    Matrix(ComplexMatrix),
}

impl DiracSpec {
    pub fn matrix(&self, bundle: &FellBundle) -> ComplexMatrix {
        match self {
            DiracSpec::Field(f) => f.as_matrix(bundle),
            DiracSpec::Matrix(m) => m.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometrySpec {
    pub config: GeometryConfig,
    pub constraints: ConstraintSet,
    pub dirac: Option<DiracSpec>,
    /// Hex SHA-256 of the source text; empty for specs built in memory.
    pub digest: String,
}

impl GeometrySpec {
    pub fn representation(&self) -> Result<Representation> {
        Representation::new(self.config.clone())
    }

    pub fn dirac_matrix(&self) -> Option<ComplexMatrix> {
        self.dirac.as_ref().map(|d| d.matrix(&self.config.bundle))
    }
}

pub fn digest(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::spec(field, message)
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str, path: &str, what: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| field_err(format!("{path}{key}"), format!("missing{what}")))
}

fn as_str<'a>(v: &'a Value, field: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| field_err(field, "expected a string"))
}

fn as_sign(v: &Value, field: &str) -> Result<Sign> {
    v.as_i64()
        .and_then(Sign::from_i64)
        .ok_or_else(|| field_err(field, "expected 1 or -1"))
}

fn as_count(v: &Value, field: &str) -> Result<usize> {
    match v.as_u64() {
        Some(n) if n > 0 => Ok(n as usize),
        _ => Err(field_err(field, "expected a positive integer")),
    }
}

fn as_matrix(v: &Value, field: &str) -> Result<ComplexMatrix> {
    serde_json::from_value(v.clone()).map_err(|e| field_err(field, format!("bad matrix: {e}")))
}

/// Parses and validates a spec file.
pub fn parse_spec(text: &str) -> Result<GeometrySpec> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut spec = spec_from_value(&root)?;
    spec.digest = digest(text);
    Ok(spec)
}

pub fn spec_from_value(root: &Value) -> Result<GeometrySpec> {
    let obj = root.as_object().ok_or_else(|| field_err("<root>", "expected an object"))?;
    let name = as_str(get(obj, "name", "", "")?, "name")?.to_owned();

    let units = get(obj, "units", "", "")?
        .as_array()
        .ok_or_else(|| field_err("units", "expected an array"))?;
    if units.is_empty() {
        return Err(field_err("units", "at least one unit is required"));
    }
    let mut ids = Vec::with_capacity(units.len());
    let mut dims = Vec::with_capacity(units.len());
    let mut chirality = Vec::with_capacity(units.len());
    let mut sector = Vec::with_capacity(units.len());
    for (n, u) in units.iter().enumerate() {
        let path = format!("units[{n}].");
        let u = u.as_object().ok_or_else(|| field_err(format!("units[{n}]"), "expected an object"))?;
        let id = as_str(get(u, "id", &path, "")?, &format!("{path}id"))?.to_owned();
        let of = format!(" for unit `{id}`");
        if ids.contains(&id) {
            return Err(field_err(format!("{path}id"), format!("duplicate unit id `{id}`")));
        }
        dims.push(as_count(get(u, "dim", &path, &of)?, &format!("{path}dim (unit `{id}`)"))?);
        chirality.push(as_sign(get(u, "chirality", &path, &of)?, &format!("{path}chirality (unit `{id}`)"))?);
        let s = get(u, "sector", &path, &of)?;
        sector.push(
            serde_json::from_value::<Sector>(s.clone())
                .map_err(|_| field_err(format!("{path}sector (unit `{id}`)"), "expected \"particle\" or \"antiparticle\""))?,
        );
        ids.push(id);
    }
    let index = |id: &str, field: &str| -> Result<usize> {
        ids.iter()
            .position(|u| u == id)
            .ok_or_else(|| field_err(field, format!("unknown unit `{id}`")))
    };

    let mut conjugation: Vec<usize> = (0..ids.len()).collect();
    let mut paired = vec![false; ids.len()];
    if let Some(c) = obj.get("conjugation") {
        let pairs = c.as_array().ok_or_else(|| field_err("conjugation", "expected an array of pairs"))?;
        for (n, p) in pairs.iter().enumerate() {
            let field = format!("conjugation[{n}]");
            let pair = p.as_array().filter(|a| a.len() == 2).ok_or_else(|| field_err(&field, "expected [id, id]"))?;
            let a = index(as_str(&pair[0], &field)?, &field)?;
            let b = index(as_str(&pair[1], &field)?, &field)?;
            for x in [a, b] {
                if paired[x] {
                    return Err(field_err(&field, format!("unit `{}` is paired twice", ids[x])));
                }
                paired[x] = true;
            }
            conjugation[a] = b;
            conjugation[b] = a;
        }
    }

    let g = get(obj, "groupoid", "", "")?
        .as_object()
        .ok_or_else(|| field_err("groupoid", "expected an object"))?;
    let groupoid = match as_str(get(g, "type", "groupoid.", "")?, "groupoid.type")? {
        "pair" => FiniteGroupoid::pair(&ids)?,
        "partition" => {
            let classes = get(g, "classes", "groupoid.", "")?
                .as_array()
                .ok_or_else(|| field_err("groupoid.classes", "expected an array"))?;
            let classes: Vec<Vec<String>> = classes
                .iter()
                .enumerate()
                .map(|(n, c)| {
                    let field = format!("groupoid.classes[{n}]");
                    c.as_array()
                        .ok_or_else(|| field_err(&field, "expected an array of ids"))?
                        .iter()
                        .map(|id| as_str(id, &field).map(str::to_owned))
                        .collect()
                })
                .collect::<Result<_>>()?;
            FiniteGroupoid::partition(&ids, &classes).map_err(|e| field_err("groupoid.classes", e.to_string()))?
        }
        other => return Err(field_err("groupoid.type", format!("unknown type `{other}`"))),
    };
    let bundle = FellBundle::new(groupoid, dims)?;

    let opp_dims = match obj.get("opp_dims") {
        None | Some(Value::Null) => None,
        Some(v) => {
            let m = v.as_object().ok_or_else(|| field_err("opp_dims", "expected an object keyed by unit id"))?;
            let mut out = vec![None; ids.len()];
            for (id, pair) in m {
                let field = format!("opp_dims.{id}");
                let i = index(id, &field)?;
                let p = pair.as_array().filter(|a| a.len() == 2).ok_or_else(|| field_err(&field, "expected [n, n']"))?;
                out[i] = Some((as_count(&p[0], &field)?, as_count(&p[1], &field)?));
            }
            let out: Option<Vec<(usize, usize)>> = out.into_iter().collect();
            Some(out.ok_or_else(|| field_err("opp_dims", "every unit needs a factorization"))?)
        }
    };

    let config = GeometryConfig {
        name,
        bundle,
        chirality,
        sector,
        conjugation,
        j_squared: as_sign(get(obj, "j_squared", "", "")?, "j_squared")?,
        spin_sign: as_sign(get(obj, "spin_sign", "", "")?, "spin_sign")?,
        opp_dims,
    };
    config.validate()?;

    let constraints = match obj.get("constraints") {
        None => ConstraintSet::standard(),
        Some(v) => v
            .as_array()
            .ok_or_else(|| field_err("constraints", "expected an array of names"))?
            .iter()
            .map(|c| {
                as_str(c, "constraints")?
                    .parse()
                    .map_err(|e: Error| field_err("constraints", e.to_string()))
            })
            .collect::<Result<_>>()?,
    };

    let dirac = match obj.get("dirac") {
        None | Some(Value::Null) => None,
        Some(v) => Some(parse_dirac(v, &config)?),
    };

    Ok(GeometrySpec {
        config,
        constraints,
        dirac,
        digest: String::new(),
    })
}

fn parse_dirac(v: &Value, config: &GeometryConfig) -> Result<DiracSpec> {
    let d = v.as_object().ok_or_else(|| field_err("dirac", "expected an object"))?;
    let bundle = &config.bundle;
    let m = bundle.total_dim();
    if let Some(mat) = d.get("matrix") {
        let x = as_matrix(mat, "dirac.matrix")?;
        if x.shape() != (m, m) {
            return Err(field_err("dirac.matrix", format!("expected {m}x{m}")));
        }
        return Ok(DiracSpec::Matrix(x));
    }
    let direction = match d.get("direction").map(|v| as_str(v, "dirac.direction")).transpose()? {
        None | Some("cotangent") => Direction::Cotangent,
        Some("tangent") => Direction::Tangent,
        Some(other) => return Err(field_err("dirac.direction", format!("unknown direction `{other}`"))),
    };
    let map: BTreeMap<String, String> = serde_json::from_value(get(d, "pattern", "dirac.", "")?.clone())
        .map_err(|_| field_err("dirac.pattern", "expected an object mapping unit id to unit id"))?;
    let g = bundle.groupoid();
    let pattern = Pattern::from_id_map(g, direction, &map).map_err(|e| field_err("dirac.pattern", e.to_string()))?;
    let entries = get(d, "entries", "dirac.", "")?
        .as_object()
        .ok_or_else(|| field_err("dirac.entries", "expected an object keyed by unit id"))?;
    let mut blocks = Vec::with_capacity(g.len());
    for i in 0..g.len() {
        let id = g.unit_id(i);
        let field = format!("dirac.entries.{id}");
        let block = match entries.get(id) {
            Some(v) => as_matrix(v, &field)?,
            None => {
                let (r, c) = bundle.fiber_shape(pattern.arrow(i));
                ComplexMatrix::zeros(r, c)
            }
        };
        blocks.push(block);
    }
    if let Some(extra) = entries.keys().find(|k| g.unit_index(k).is_none()) {
        return Err(field_err(format!("dirac.entries.{extra}"), "unknown unit"));
    }
    let field = MorphismField::new(bundle, pattern, blocks).map_err(|e| field_err("dirac.entries", e.to_string()))?;
    Ok(DiracSpec::Field(field))
}

/// The spec file for `spec`, in the same shape [`parse_spec`] reads.
pub fn spec_to_value(spec: &GeometrySpec) -> Value {
    let cfg = &spec.config;
    let g = cfg.bundle.groupoid();
    let units: Vec<Value> = (0..g.len())
        .map(|i| {
            json!({
                "id": g.unit_id(i),
                "dim": cfg.bundle.dim(i),
                "chirality": cfg.chirality[i].as_i64(),
                "sector": cfg.sector[i],
            })
        })
        .collect();
    let conjugation: Vec<Value> = (0..g.len())
        .filter(|&i| cfg.conjugation[i] > i)
        .map(|i| json!([g.unit_id(i), g.unit_id(cfg.conjugation[i])]))
        .collect();
    let groupoid = if g.classes().len() == 1 {
        json!({"type": "pair"})
    } else {
        let classes: Vec<Vec<&str>> = g
            .classes()
            .iter()
            .map(|c| c.iter().map(|&i| g.unit_id(i)).collect())
            .collect();
        json!({"type": "partition", "classes": classes})
    };
    let mut out = json!({
        "name": cfg.name,
        "units": units,
        "conjugation": conjugation,
        "groupoid": groupoid,
        "j_squared": cfg.j_squared.as_i64(),
        "spin_sign": cfg.spin_sign.as_i64(),
        "constraints": spec.constraints.names(),
    });
    let obj = out.as_object_mut().expect("object literal");
    if let Some(opp) = &cfg.opp_dims {
        let m: Map<String, Value> = opp
            .iter()
            .enumerate()
            .map(|(i, (n, np))| (g.unit_id(i).to_owned(), json!([n, np])))
            .collect();
        obj.insert("opp_dims".into(), Value::Object(m));
    }
    match &spec.dirac {
        None => {}
        Some(DiracSpec::Matrix(m)) => {
            obj.insert("dirac".into(), json!({ "matrix": m }));
        }
        Some(DiracSpec::Field(f)) => {
            let entries: Map<String, Value> = f
                .blocks
                .iter()
                .enumerate()
                .map(|(i, b)| (g.unit_id(i).to_owned(), serde_json::to_value(b).expect("finite entries")))
                .collect();
            obj.insert(
                "dirac".into(),
                json!({
                    "direction": f.direction().name(),
                    "pattern": f.pattern.to_id_map(g),
                    "entries": entries,
                }),
            );
        }
    }
    out
}

/// Machine-readable output of a command. Keys serialize in sorted order.
#[derive(Debug, Clone)]
pub struct Report {
    command: String,
    input: Value,
    tolerance: f64,
    checks: BTreeMap<String, Check>,
    sections: BTreeMap<String, Value>,
}

impl Report {
    pub fn new(command: &str, spec: &GeometrySpec, tolerance: f64) -> Self {
        Self {
            command: command.to_owned(),
            input: json!({"name": spec.config.name, "sha256": spec.digest}),
            tolerance,
            checks: BTreeMap::new(),
            sections: BTreeMap::new(),
        }
    }

    /// Records a check; a repeated name replaces the earlier result.
    pub fn check(&mut self, check: Check) {
        self.checks.insert(check.name.clone(), check);
    }

    pub fn section(&mut self, name: &str, value: Value) {
        self.sections.insert(name.to_owned(), value);
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.values()
    }

    pub fn pass(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        let mut out = Map::new();
        out.insert("tool".into(), json!("fellgeom"));
        out.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        out.insert("command".into(), json!(self.command));
        out.insert("input".into(), self.input.clone());
        out.insert("tolerance".into(), json!(self.tolerance));
        out.insert("pass".into(), json!(self.pass()));
        out.insert(
            "checks".into(),
            Value::Object(
                self.checks
                    .iter()
                    .map(|(k, c)| (k.clone(), serde_json::to_value(c).expect("plain data")))
                    .collect(),
            ),
        );
        for (k, v) in &self.sections {
            out.insert(k.clone(), v.clone());
        }
        Value::Object(out)
    }

    pub fn render_text(&self) -> String {
        let mut s = format!("{} {}\n", self.command, self.input["name"].as_str().unwrap_or(""));
        for c in self.checks.values() {
            s.push_str(&format!(
                "  {:<6} {:<24} residual {:.3e}{}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.note.as_deref().map(|n| format!("  ({n})")).unwrap_or_default()
            ));
        }
        s
    }
}

/// JSON form of one solver solution: fiber blocks keyed by unit id.
pub fn solution_to_value(rep: &Representation, sol: &DiracSolution) -> Value {
    let g = rep.bundle().groupoid();
    let bs = rep.blocks();
    let basis: Vec<Value> = sol
        .basis
        .iter()
        .map(|b| {
            let blocks: Map<String, Value> = sol
                .pattern
                .blocks()
                .enumerate()
                .map(|(i, (r, c))| {
                    (g.unit_id(i).to_owned(), serde_json::to_value(bs.get_block(b, r, c)).expect("finite"))
                })
                .collect();
            Value::Object(blocks)
        })
        .collect();
    let residuals: Map<String, Value> = sol
        .residuals
        .iter()
        .map(|(c, r)| (c.name().to_owned(), json!(r)))
        .collect();
    json!({
        "pattern": sol.pattern.to_id_map(g),
        "real_dimension": sol.real_dimension,
        "basis": basis,
        "residuals": residuals,
        "zero_derivation": sol.zero_derivation,
    })
}

/// Estimated work for the exhaustive sheaf check with stalk sizes `s`.
fn sheaf_cost(sizes: impl Iterator<Item = usize>) -> f64 {
    sizes.map(|s| (1 + s) as f64 * (1 + s) as f64).product()
}

const SHEAF_BUDGET: f64 = 2e6;

/// Normalization and gluing for the tangent and cotangent sheaves of the
/// bundle and of its opposite. Falls back to a two-letter constant sheaf when
/// the arrow stalks are too large to enumerate.
pub fn check_sheaf_axioms(bundle: &FellBundle) -> Result<Check> {
    let k = bundle.groupoid().len();
    let sizes = (0..k).map(|i| bundle.groupoid().class_members(i).len());
    if sheaf_cost(sizes) <= SHEAF_BUDGET {
        let mut ok = true;
        let mut families = 0;
        for b in [bundle.clone(), bundle.opposite()] {
            for dir in [Direction::Tangent, Direction::Cotangent] {
                let r = arrow_sheaf(&b, dir)?.check_axioms();
                ok &= r.pass();
                families += r.families_checked;
            }
        }
        return Ok(Check::flag("sheaf_axioms", ok).with_note(format!("{families} families")));
    }
    if sheaf_cost(std::iter::repeat_n(2, k)) <= SHEAF_BUDGET {
        let r = DiscreteSheaf::constant(k, vec![false, true])?.check_axioms();
        return Ok(Check::flag("sheaf_axioms", r.pass()).with_note("two-letter alphabet"));
    }
    Ok(Check::flag("sheaf_axioms", true).with_note("skipped: too many units to enumerate"))
}

/// The structural checks run by `validate`.
pub fn validation_checks(rep: &Representation, tol: f64) -> Result<Vec<Check>> {
    Ok(vec![
        rep.check_grading(tol),
        rep.check_order_zero(tol),
        rep.check_j_squared(tol),
        Check::flag("saturated", rep.bundle().is_saturated()),
        check_sheaf_axioms(rep.bundle())?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_POINT: &str = include_str!("../fixtures/two-point.json");

    #[test]
    fn parses_fixture() {
        let spec = parse_spec(TWO_POINT).unwrap();
        let rep = spec.representation().unwrap();
        assert_eq!(rep.config().conjugation, vec![2, 3, 0, 1]);
        assert_eq!(rep.config().chirality, vec![Sign::Plus, Sign::Minus, Sign::Plus, Sign::Minus]);
        assert_eq!(spec.constraints, ConstraintSet::standard());
        let d = spec.dirac_matrix().unwrap();
        assert!(d.is_hermitian(0.0));
        assert_eq!(d.get(1, 0).norm(), 2.0);
        assert_eq!(spec.digest.len(), 64);
    }

    #[test]
    fn round_trip() {
        let spec = parse_spec(TWO_POINT).unwrap();
        let again = spec_from_value(&spec_to_value(&spec)).unwrap();
        assert_eq!(GeometrySpec { digest: String::new(), ..spec }, again);
    }

    #[test]
    fn missing_dim_names_the_unit() {
        let text = TWO_POINT.replacen("\"dim\": 1, ", "", 1);
        let err = parse_spec(&text).unwrap_err().to_string();
        assert!(err.contains("units[0].dim"), "{err}");
        assert!(err.contains("`L`"), "{err}");
    }

    #[test]
    fn syntax_error_has_position() {
        match parse_spec("{\n  \"name\": ,\n}") {
            Err(Error::Syntax { line, column, .. }) => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mismatched_pair_dims() {
        let text = TWO_POINT.replacen("\"dim\": 1", "\"dim\": 2", 1);
        let err = parse_spec(&text).unwrap_err().to_string();
        assert!(err.contains("different dims"), "{err}");
    }

    #[test]
    fn validation_of_fixture_passes() {
        let rep = parse_spec(TWO_POINT).unwrap().representation().unwrap();
        for c in validation_checks(&rep, 1e-9).unwrap() {
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn report_is_sorted_and_complete() {
        let spec = parse_spec(TWO_POINT).unwrap();
        let mut r = Report::new("validate", &spec, 1e-9);
        r.check(Check::new("b", 0.0, 1e-9));
        r.check(Check::new("a", 1.0, 1e-9));
        let v = r.to_json();
        assert_eq!(v["pass"], json!(false));
        let keys: Vec<&String> = v["checks"].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["a", "b"]);
    }
}
