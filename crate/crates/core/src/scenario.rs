//! JSON scenarios: a generator system with its window, named regions and
//! seeds. A few scenarios ship with the crate.
//!
//! Scalars are written `"p"`, `"p@q"` (meaning `p + q√d`) or
//! `{"p": "...", "q": "..."}`. Interval bounds are scalars or `"-inf"` /
//! `"+inf"`; endpoints are open unless `lo_open` / `hi_open` say otherwise.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::exactnum::{parse_rational, Scalar, ScalarRepr};
use crate::localmaps::{DomainSet, Interval, MoebiusMap, PartialMap, Space};
use crate::pseudogroup::{full_domain, Generator, GeneratorSystem};
use crate::recurrence::{build_nonrecurrent_example, NonRecurrentExample, NonRecurrentParams};

pub const SCHEMA: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error("invalid `{field}`: {msg}")]
    Invalid { field: String, msg: String },
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

fn invalid(field: impl Into<String>, msg: impl ToString) -> ScenarioError {
    ScenarioError::Invalid { field: field.into(), msg: msg.to_string() }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarJson {
    Text(String),
    Repr(ScalarRepr),
}

#[derive(Deserialize)]
struct IntervalJson {
    lo: ScalarJson,
    hi: ScalarJson,
    #[serde(default = "yes")]
    lo_open: bool,
    #[serde(default = "yes")]
    hi_open: bool,
}

fn yes() -> bool {
    true
}

#[derive(Deserialize)]
struct MoebiusJson {
    a: ScalarJson,
    b: ScalarJson,
    c: ScalarJson,
    d: ScalarJson,
}

#[derive(Deserialize)]
struct PieceJson {
    interval: IntervalJson,
    moebius: MoebiusJson,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorJson {
    name: String,
    #[serde(default)]
    pieces: Vec<PieceJson>,
    /// Circle shorthand: `x ↦ x + α mod 1`.
    rotation: Option<ScalarJson>,
    bar: Option<Vec<PieceJson>>,
    #[serde(default)]
    bar_is_self: bool,
    inverse: Option<String>,
}

#[derive(Deserialize)]
struct NonRecurrentJson {
    a: ScalarJson,
    a1: ScalarJson,
    a2: ScalarJson,
    b2: ScalarJson,
    b1: ScalarJson,
    b: ScalarJson,
    lambda: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioJson {
    schema: u32,
    #[serde(default)]
    name: String,
    #[serde(default)]
    d: u64,
    space: Space,
    #[serde(default)]
    generators: Vec<GeneratorJson>,
    nonrecurrent: Option<NonRecurrentJson>,
    window: Option<Vec<IntervalJson>>,
    #[serde(default)]
    regions: BTreeMap<String, IntervalJson>,
    #[serde(default)]
    seeds: Vec<ScalarJson>,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub d: u64,
    pub system: GeneratorSystem,
    pub regions: BTreeMap<String, Interval>,
    pub seeds: Vec<Scalar>,
    pub notes: Vec<String>,
    pub nonrecurrent: Option<NonRecurrentExample>,
}

impl Scenario {
    pub fn space(&self) -> Space {
        self.system.space()
    }

    pub fn region(&self, name: &str) -> Option<&Interval> {
        self.regions.get(name)
    }
}

/// Parses `"p"` or `"p@q"` in `Q(√d)`.
pub fn parse_scalar(s: &str, d: u64) -> Result<Scalar, String> {
    let (p, q) = match s.split_once('@') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "0"),
    };
    let p = parse_rational(p).map_err(|e| e.to_string())?;
    let q = parse_rational(q).map_err(|e| e.to_string())?;
    if q == num_traits::Zero::zero() {
        return Ok(Scalar::rational(p));
    }
    Scalar::new(p, q, d).map_err(|e| e.to_string())
}

fn scalar(v: &ScalarJson, d: u64, field: &str) -> Result<Scalar, ScenarioError> {
    match v {
        ScalarJson::Text(s) => parse_scalar(s, d).map_err(|e| invalid(field, e)),
        ScalarJson::Repr(r) => r.to_scalar(d).map_err(|e| invalid(field, e)),
    }
}

fn bound(v: &ScalarJson, d: u64, field: &str) -> Result<crate::exactnum::ExtScalar, ScenarioError> {
    use crate::exactnum::ExtScalar;
    match v {
        ScalarJson::Text(s) if s == "-inf" => Ok(ExtScalar::NegInf),
        ScalarJson::Text(s) if s == "+inf" || s == "inf" => Ok(ExtScalar::PosInf),
        _ => Ok(ExtScalar::Finite(scalar(v, d, field)?)),
    }
}

fn interval(v: &IntervalJson, d: u64, field: &str) -> Result<Interval, ScenarioError> {
    let lo = bound(&v.lo, d, field)?;
    let hi = bound(&v.hi, d, field)?;
    Interval::new(lo, hi, v.lo_open, v.hi_open).map_err(|e| invalid(field, e))
}

fn pieces(ps: &[PieceJson], space: Space, d: u64, field: &str) -> Result<PartialMap, ScenarioError> {
    let mut out = Vec::new();
    for (k, p) in ps.iter().enumerate() {
        let f = format!("{field}[{k}]");
        let iv = interval(&p.interval, d, &f)?;
        let m = &p.moebius;
        let mm = MoebiusMap::new(scalar(&m.a, d, &f)?, scalar(&m.b, d, &f)?, scalar(&m.c, d, &f)?, scalar(&m.d, d, &f)?)
            .map_err(|e| invalid(&f, e))?;
        out.push((iv, mm));
    }
    PartialMap::new(space, out).map_err(|e| invalid(field, e))
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let raw: ScenarioJson =
        serde_json::from_str(text).map_err(|e| ScenarioError::Parse { line: e.line(), column: e.column(), msg: e.to_string() })?;
    if raw.schema != SCHEMA {
        return Err(invalid("schema", format!("expected {SCHEMA}, found {}", raw.schema)));
    }
    let d = raw.d;
    let space = raw.space;
    let mut notes = Vec::new();
    let mut nonrecurrent = None;
    let system = if let Some(nr) = &raw.nonrecurrent {
        if !raw.generators.is_empty() {
            return Err(invalid("generators", "give either generators or a nonrecurrent block"));
        }
        if space != Space::Line {
            return Err(invalid("space", "the nonrecurrent construction lives on the line"));
        }
        let p = NonRecurrentParams {
            a: scalar(&nr.a, d, "nonrecurrent.a")?,
            a1: scalar(&nr.a1, d, "nonrecurrent.a1")?,
            a2: scalar(&nr.a2, d, "nonrecurrent.a2")?,
            b2: scalar(&nr.b2, d, "nonrecurrent.b2")?,
            b1: scalar(&nr.b1, d, "nonrecurrent.b1")?,
            b: scalar(&nr.b, d, "nonrecurrent.b")?,
            lambda: parse_rational(&nr.lambda).map_err(|e| invalid("nonrecurrent.lambda", e))?,
        };
        let ex = build_nonrecurrent_example(&p).map_err(|e| invalid("nonrecurrent", e))?;
        notes.extend(ex.notes.iter().cloned());
        let sys = ex.system.clone();
        nonrecurrent = Some(ex);
        sys
    } else {
        if raw.generators.is_empty() {
            return Err(invalid("generators", "no generators"));
        }
        let mut gens = Vec::new();
        for g in &raw.generators {
            let field = format!("generators.{}", g.name);
            let map = match (&g.rotation, g.pieces.is_empty()) {
                (Some(a), true) => {
                    if space != Space::Circle {
                        return Err(invalid(&field, "rotation needs the circle"));
                    }
                    PartialMap::rotation(&scalar(a, d, &field)?)
                }
                (None, false) => pieces(&g.pieces, space, d, &field)?,
                _ => return Err(invalid(&field, "give exactly one of `pieces` or `rotation`")),
            };
            let mut gen = Generator::new(g.name.clone(), map.clone());
            if g.bar_is_self {
                gen = gen.with_bar(map);
            } else if let Some(b) = &g.bar {
                gen = gen.with_bar(pieces(b, space, d, &format!("{field}.bar"))?);
            }
            if let Some(inv) = &g.inverse {
                gen = gen.with_inverse(inv.clone());
            }
            gens.push(gen);
        }
        let window = match &raw.window {
            Some(ivs) => DomainSet::from_intervals(
                ivs.iter().enumerate().map(|(k, iv)| interval(iv, d, &format!("window[{k}]"))).collect::<Result<_, _>>()?,
            ),
            None if space == Space::Circle => full_domain(space),
            None => DomainSet::empty(),
        };
        let sys = GeneratorSystem::new(space, window, gens).map_err(|e| invalid("generators", e))?;
        notes.extend(sys.notes().iter().cloned());
        sys
    };
    let mut regions = BTreeMap::new();
    for (k, iv) in &raw.regions {
        regions.insert(k.clone(), interval(iv, d, &format!("regions.{k}"))?);
    }
    let seeds = raw
        .seeds
        .iter()
        .enumerate()
        .map(|(k, s)| scalar(s, d, &format!("seeds[{k}]")).map(|x| space.reduce(&x)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Scenario { name: raw.name, d, system, regions, seeds, notes, nonrecurrent })
}

const BUNDLED: &[(&str, &str)] = &[
    ("rotation_sqrt2", include_str!("../scenarios/rotation_sqrt2.json")),
    ("rotation_third", include_str!("../scenarios/rotation_third.json")),
    ("translation", include_str!("../scenarios/translation.json")),
    ("nonrecurrent", include_str!("../scenarios/nonrecurrent.json")),
];

pub const ATLAS_TWO_PATCH: &str = include_str!("../scenarios/atlas_two_patch.json");

pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

pub fn bundled(name: &str) -> Option<Scenario> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| parse_scenario(t).expect("bundled scenario is valid"))
}

/// A bundled scenario by name, or a scenario file.
pub fn load(name_or_path: &str) -> Result<Scenario, ScenarioError> {
    if let Some(s) = bundled(name_or_path) {
        return Ok(s);
    }
    let text = std::fs::read_to_string(name_or_path).map_err(|e| ScenarioError::Io { path: name_or_path.into(), msg: e.to_string() })?;
    parse_scenario(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenarios_parse() {
        for n in bundled_names() {
            let s = bundled(n).unwrap();
            assert!(!s.system.is_empty(), "{n}");
        }
        let nr = bundled("nonrecurrent").unwrap();
        assert!(nr.notes.iter().any(|l| l.starts_with("g1(a'') =")));
        assert!(nr.nonrecurrent.is_some());
        crate::metrization::Atlas::from_json(ATLAS_TWO_PATCH).unwrap();
    }

    #[test]
    fn scalar_syntax() {
        assert_eq!(parse_scalar("3/4", 2).unwrap(), Scalar::frac(3, 4));
        assert_eq!(parse_scalar("-1@1", 2).unwrap(), Scalar::sqrt(2).unwrap() - Scalar::one());
        assert!(parse_scalar("1@1", 4).is_err());
        assert!(parse_scalar("x", 2).is_err());
    }

    #[test]
    fn missing_inverse_is_completed() {
        let text = r#"{"schema": 1, "space": "line",
            "generators": [{"name": "t", "pieces": [{"interval": {"lo": "0", "hi": "2"},
                "moebius": {"a": "1", "b": "1", "c": "0", "d": "1"}}]}]}"#;
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.system.len(), 2);
        assert!(s.notes.iter().any(|n| n.contains("t^-1")));
    }

    #[test]
    fn diagnostics() {
        let e = parse_scenario("{\"schema\": 1,\n \"space\": \"plane\"}").unwrap_err();
        assert!(matches!(e, ScenarioError::Parse { line: 2, .. }), "{e}");
        let e = parse_scenario(r#"{"schema": 2, "space": "line"}"#).unwrap_err();
        assert!(e.to_string().contains("schema"));
        let text = r#"{"schema": 1, "space": "line",
            "generators": [{"name": "f", "pieces": [{"interval": {"lo": "0", "hi": "1"},
                "moebius": {"a": "-1", "b": "0", "c": "0", "d": "1"}}]}]}"#;
        let e = parse_scenario(text).unwrap_err();
        assert!(e.to_string().contains("generators.f"), "{e}");
    }
}
