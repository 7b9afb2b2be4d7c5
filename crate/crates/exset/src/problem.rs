//! Problem files: parsing, validation and serialization.

use exset_core::bundle::SupportSet;
use exset_core::target::{SelectionPolicy, TargetKind};
use exset_core::{GaussRat, PiExpr};
use serde_json::{json, Map, Value};

use crate::json::{pi_from_json, pi_to_json, point_from_json, point_to_json, DecodeError, Decoded};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Prescribe,
    Exceptional,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Prescribe => "prescribe",
            Mode::Exceptional => "exceptional",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "prescribe" => Some(Mode::Prescribe),
            "exceptional" => Some(Mode::Exceptional),
            _ => None,
        }
    }
}

/// What a problem point asks for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointKind {
    Target(TargetKind),
    /// Role `S`: the value must be algebraic.
    Algebraic,
    /// Role `V`: the value must be transcendental.
    Transcendental,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemPoint {
    pub coords: Vec<GaussRat>,
    pub kind: PointKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemFile {
    pub variables: usize,
    pub seed: u64,
    pub stages: Option<usize>,
    pub degree: Option<u32>,
    pub precision: Option<u32>,
    pub mode: Mode,
    pub policy: SelectionPolicy,
    pub points: Vec<ProblemPoint>,
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Option<&'a Value> {
    obj.get(key).filter(|v| !v.is_null())
}

fn uint(obj: &Map<String, Value>, key: &str) -> Decoded<Option<u64>> {
    field(obj, key).map(|v| v.as_u64().ok_or_else(|| DecodeError::shape(key, "a non-negative integer"))).transpose()
}

fn small<T: TryFrom<u64>>(v: Option<u64>, key: &str) -> Decoded<Option<T>> {
    v.map(|x| T::try_from(x).map_err(|_| DecodeError::new("BadField", key, "value out of range"))).transpose()
}

impl ProblemFile {
    pub fn parse(text: &str) -> Decoded<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| DecodeError::new("BadJson", "$", e.to_string()))?;
        Self::from_json(&value)
    }

    pub fn from_json(v: &Value) -> Decoded<Self> {
        let obj = v.as_object().ok_or_else(|| DecodeError::shape("$", "an object"))?;
        for key in obj.keys() {
            if !["variables", "seed", "stages", "degree", "precision", "mode", "policy", "points"]
                .contains(&key.as_str())
            {
                return Err(DecodeError::new("BadField", key, "unknown field"));
            }
        }
        let variables = small(uint(obj, "variables")?, "variables")?
            .ok_or_else(|| DecodeError::new("BadField", "variables", "missing"))?;
        let mode = match field(obj, "mode") {
            None => Mode::Prescribe,
            Some(m) => m
                .as_str()
                .and_then(Mode::from_name)
                .ok_or_else(|| DecodeError::new("BadField", "mode", "expected \"prescribe\" or \"exceptional\""))?,
        };
        let policy = match field(obj, "policy") {
            None => SelectionPolicy::default(),
            Some(p) => p.as_str().and_then(SelectionPolicy::from_name).ok_or_else(|| {
                DecodeError::new("BadField", "policy", "expected \"smallest-denominator\" or \"seeded\"")
            })?,
        };
        let points = field(obj, "points")
            .and_then(Value::as_array)
            .ok_or_else(|| DecodeError::shape("points", "an array"))?
            .iter()
            .enumerate()
            .map(|(i, p)| parse_point(p, &format!("points[{i}]")))
            .collect::<Decoded<Vec<_>>>()?;
        Ok(Self {
            variables,
            seed: uint(obj, "seed")?.unwrap_or(0),
            stages: small(uint(obj, "stages")?, "stages")?,
            degree: small(uint(obj, "degree")?, "degree")?,
            precision: small(uint(obj, "precision")?, "precision")?,
            mode,
            policy,
            points,
        })
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("variables".into(), json!(self.variables));
        obj.insert("seed".into(), json!(self.seed));
        if let Some(n) = self.stages {
            obj.insert("stages".into(), json!(n));
        }
        if let Some(d) = self.degree {
            obj.insert("degree".into(), json!(d));
        }
        if let Some(p) = self.precision {
            obj.insert("precision".into(), json!(p));
        }
        obj.insert("mode".into(), json!(self.mode.name()));
        obj.insert("policy".into(), json!(self.policy.name()));
        let points = self
            .points
            .iter()
            .map(|p| {
                let mut o = Map::new();
                o.insert("coords".into(), point_to_json(&p.coords));
                match &p.kind {
                    PointKind::Target(k) => {
                        o.insert("target".into(), target_to_json(k));
                    }
                    PointKind::Algebraic => {
                        o.insert("role".into(), json!("S"));
                    }
                    PointKind::Transcendental => {
                        o.insert("role".into(), json!("V"));
                    }
                }
                Value::Object(o)
            })
            .collect();
        obj.insert("points".into(), Value::Array(points));
        Value::Object(obj)
    }

    /// Number of points with no zero coordinate; each needs one stage.
    pub fn full_support_count(&self) -> usize {
        let full = SupportSet::full(self.variables);
        self.points.iter().filter(|p| p.coords.len() == self.variables && SupportSet::of(&p.coords) == full).count()
    }

    /// All hypothesis and structure checks; empty when the problem is well formed.
    pub fn validate(&self) -> Vec<DecodeError> {
        let mut issues = Vec::new();
        let m = self.variables;
        if m == 0 || m > 16 {
            issues.push(DecodeError::new("BadField", "variables", "must be between 1 and 16"));
            return issues;
        }
        for (i, p) in self.points.iter().enumerate() {
            let path = format!("points[{i}]");
            if p.coords.len() != m {
                issues.push(DecodeError::new(
                    "ArityMismatch",
                    &path,
                    format!("{} coordinates, expected {m}", p.coords.len()),
                ));
                continue;
            }
            if let Some(j) = self.points[..i].iter().position(|q| q.coords == p.coords) {
                let code = match (&self.points[j].kind, &p.kind) {
                    (PointKind::Algebraic, PointKind::Transcendental)
                    | (PointKind::Transcendental, PointKind::Algebraic) => "OverlapSV",
                    _ => "DuplicatePoint",
                };
                issues.push(DecodeError::new(code, &path, format!("same coordinates as points[{j}]")));
            }
            let origin = p.coords.iter().all(GaussRat::is_zero);
            match (&p.kind, self.mode) {
                (PointKind::Target(_), Mode::Exceptional) => {
                    issues.push(DecodeError::new("BadField", &path, "exceptional mode takes roles S/V, not targets"))
                }
                (PointKind::Algebraic | PointKind::Transcendental, Mode::Prescribe) => {
                    issues.push(DecodeError::new("BadField", &path, "prescribe mode takes targets, not roles"))
                }
                (PointKind::Target(TargetKind::PiPowerScaled(0)), _) => {
                    issues.push(DecodeError::new("BadField", &path, "pi-power needs power >= 1"))
                }
                (PointKind::Target(TargetKind::PiPowerScaled(_)), _) if origin => {
                    issues.push(DecodeError::new("NotInK", &path, "the value at the origin must lie in K"))
                }
                (PointKind::Target(TargetKind::ExplicitValue(v)), _)
                    if origin && !v.as_gauss().is_some_and(|g| g.in_k()) =>
                {
                    issues.push(DecodeError::new("NotInK", &path, "the value at the origin must lie in K"))
                }
                _ => {}
            }
        }
        if self.mode == Mode::Exceptional {
            let of = |k: &PointKind| -> Vec<&Vec<GaussRat>> {
                self.points.iter().filter(|p| &p.kind == k).map(|p| &p.coords).collect()
            };
            let (s, v) = (of(&PointKind::Algebraic), of(&PointKind::Transcendental));
            if !s.iter().any(|p| p.iter().all(GaussRat::is_zero)) {
                issues.push(DecodeError::new("OriginMissing", "points", "the origin must have role S"));
            }
            for (name, set) in [("S", &s), ("V", &v)] {
                for p in set.iter() {
                    let c: Vec<GaussRat> = p.iter().map(GaussRat::conj).collect();
                    if !set.iter().any(|q| **q == c) {
                        issues.push(DecodeError::new(
                            "NotConjClosed",
                            "points",
                            format!("conjugate of a role-{name} point is missing"),
                        ));
                        break;
                    }
                }
            }
        }
        let n = self.full_support_count();
        if let Some(stages) = self.stages {
            if stages != n {
                issues.push(DecodeError::new(
                    "BadStages",
                    "stages",
                    format!("{n} full-support points need exactly {n} stages"),
                ));
            }
        }
        if let Some(d) = self.degree {
            if (d as usize) < n + m - 1 {
                issues.push(DecodeError::new("BadDegree", "degree", format!("degree must be at least {}", n + m - 1)));
            }
        }
        if self.precision == Some(0) {
            issues.push(DecodeError::new("BadField", "precision", "must be positive"));
        }
        issues
    }
}

fn parse_point(v: &Value, path: &str) -> Decoded<ProblemPoint> {
    let obj = v.as_object().ok_or_else(|| DecodeError::shape(path, "an object"))?;
    let coords = point_from_json(
        obj.get("coords").ok_or_else(|| DecodeError::new("BadField", path, "missing coords"))?,
        &format!("{path}.coords"),
    )?;
    let kind = match (field(obj, "target"), field(obj, "role")) {
        (Some(t), None) => PointKind::Target(parse_target(t, &format!("{path}.target"))?),
        (None, Some(r)) => match r.as_str() {
            Some("S") => PointKind::Algebraic,
            Some("V") => PointKind::Transcendental,
            _ => return Err(DecodeError::new("BadField", &format!("{path}.role"), "expected \"S\" or \"V\"")),
        },
        _ => return Err(DecodeError::new("BadField", path, "exactly one of target or role is required")),
    };
    Ok(ProblemPoint { coords, kind })
}

fn parse_target(v: &Value, path: &str) -> Decoded<TargetKind> {
    let obj = v.as_object().ok_or_else(|| DecodeError::shape(path, "an object"))?;
    match obj.get("kind").and_then(Value::as_str) {
        Some("gaussian-k") => Ok(TargetKind::GaussianK),
        Some("pi-power") => {
            let n =
                obj.get("power").and_then(Value::as_u64).and_then(|n| u32::try_from(n).ok()).ok_or_else(|| {
                    DecodeError::new("BadField", &format!("{path}.power"), "expected a positive integer")
                })?;
            Ok(TargetKind::PiPowerScaled(n))
        }
        Some("explicit") => {
            let value: PiExpr = pi_from_json(
                obj.get("value").ok_or_else(|| DecodeError::new("BadField", path, "missing value"))?,
                &format!("{path}.value"),
            )?;
            Ok(TargetKind::ExplicitValue(value))
        }
        _ => Err(DecodeError::new("BadField", &format!("{path}.kind"), "expected gaussian-k, pi-power or explicit")),
    }
}

pub fn target_to_json(k: &TargetKind) -> Value {
    match k {
        TargetKind::GaussianK => json!({"kind": "gaussian-k"}),
        TargetKind::PiPowerScaled(n) => json!({"kind": "pi-power", "power": n}),
        TargetKind::ExplicitValue(v) => json!({"kind": "explicit", "value": pi_to_json(v)}),
    }
}
