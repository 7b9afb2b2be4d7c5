//! The JSON artifacts written by a run.

use exset_core::bundle::{FunctionBundle, PsiBundle, Role, SupportSet};
use exset_core::steering::{ConstructionState, Correction, StageRecord};
use exset_core::target::{SelectionPolicy, Target};
use exset_core::verify::{transcendence_verdict, Certificate};
use exset_core::GaussRat;
use serde_json::{json, Map, Value};

use crate::json::{gauss_poly_to_json, gauss_to_json, pi_to_json, point_to_json, rat_to_json, real_poly_to_json};
use crate::problem::{target_to_json, Mode};

/// Run parameters echoed into every artifact.
#[derive(Clone, Copy, Debug)]
pub struct RunInfo {
    pub mode: Mode,
    pub seed: u64,
    pub policy: SelectionPolicy,
}

fn header(info: &RunInfo, bundle: &FunctionBundle) -> Map<String, Value> {
    let mut o = Map::new();
    o.insert("mode".into(), json!(info.mode.name()));
    o.insert("seed".into(), json!(info.seed));
    o.insert("policy".into(), json!(info.policy.name()));
    o.insert("variables".into(), json!(bundle.arity()));
    o.insert("degree".into(), json!(bundle.degree()));
    o
}

pub fn series(info: &RunInfo, bundle: &FunctionBundle) -> Value {
    let mut o = header(info, bundle);
    o.insert("terms".into(), gauss_poly_to_json(&bundle.assembled_prefix()));
    Value::Object(o)
}

pub fn psi(info: &RunInfo, bundle: &FunctionBundle, psi: &PsiBundle) -> Value {
    let mut o = header(info, bundle);
    o.insert("terms".into(), real_poly_to_json(&psi.prefix));
    let values = psi.values.iter().map(|(z, v)| json!({"coords": point_to_json(z), "value": pi_to_json(v)})).collect();
    o.insert("values".into(), Value::Array(values));
    Value::Object(o)
}

fn role_name(role: Role) -> Value {
    match role {
        Role::Prescribed => json!("prescribed"),
        Role::Exceptional => json!("S"),
        Role::Transcendental(_) => json!("V"),
        Role::Auxiliary => json!("auxiliary"),
    }
}

fn target_json(t: &Target) -> Value {
    let mut v = target_to_json(&t.kind);
    if !t.is_identity() {
        v["offset"] = pi_to_json(&t.offset);
        v["scale"] = gauss_to_json(&t.scale);
    }
    v
}

fn corrections_json(cs: &[Correction]) -> Value {
    cs.iter()
        .map(|c| json!({"monomial": c.monomial.0, "delta": pi_to_json(&c.delta), "coefficient": gauss_to_json(&c.coefficient)}))
        .collect()
}

fn stage_json(s: &StageRecord) -> Value {
    let planes: Vec<Value> =
        s.planes.iter().map(|h| json!({"mu": point_to_json(&h.mu), "lambda": gauss_to_json(&h.lambda)})).collect();
    json!({
        "n": s.n,
        "point": point_to_json(&s.point),
        "offset": pi_to_json(&s.offset),
        "center": pi_to_json(&s.center),
        "multiplier": gauss_to_json(&s.multiplier),
        "delta0": pi_to_json(&s.delta0),
        "delta_bound": rat_to_json(&s.delta_bound),
        "target_element": pi_to_json(&s.target_element),
        "pinned_value": pi_to_json(&s.pinned_value),
        "witness": s.witness.as_deref().map(point_to_json),
        "hyperplanes": planes,
        "corrections": corrections_json(&s.corrections),
    })
}

fn fstar_json(state: &ConstructionState) -> Value {
    let layers: Vec<Value> = state
        .free_layers()
        .iter()
        .map(|l| json!({"degree": l.degree, "corrections": corrections_json(&l.corrections)}))
        .collect();
    json!({
        "seed": state.config().seed,
        "finalized_degree": state.finalized_degree(),
        "stages": state.stages().iter().map(stage_json).collect::<Vec<_>>(),
        "free_layers": layers,
    })
}

fn support_json(s: SupportSet, m: usize) -> Value {
    s.indices(m).map(|i| i + 1).collect()
}

/// Every stage of every component, recursively.
pub fn stagelog(bundle: &FunctionBundle) -> Value {
    let m = bundle.arity();
    let points: Vec<Value> = bundle
        .points()
        .iter()
        .map(|p| {
            json!({
                "coords": point_to_json(&p.spec.coords),
                "role": role_name(p.spec.role),
                "target": target_json(&p.spec.target),
                "value": pi_to_json(&p.value),
                "element": pi_to_json(&p.element),
            })
        })
        .collect();
    let subs: Vec<Value> = bundle
        .subfunctions()
        .iter()
        .map(|(&s, sub)| json!({"support": support_json(s, m), "bundle": stagelog(sub)}))
        .collect();
    json!({
        "variables": m,
        "degree": bundle.degree(),
        "a0": gauss_to_json(bundle.a0()),
        "points": points,
        "fstar": fstar_json(bundle.fstar()),
        "subfunctions": subs,
    })
}

fn conj(z: &[GaussRat]) -> Vec<GaussRat> {
    z.iter().map(GaussRat::conj).collect()
}

/// Per input point: exact value, target kind and verdict.
pub fn report(info: &RunInfo, bundle: &FunctionBundle, psi: Option<&PsiBundle>, inputs: usize) -> Value {
    let mut o = header(info, bundle);
    let points: Vec<Value> = bundle.points()[..inputs]
        .iter()
        .map(|p| {
            let mut e = Map::new();
            e.insert("coords".into(), point_to_json(&p.spec.coords));
            e.insert("role".into(), role_name(p.spec.role));
            e.insert("target".into(), target_json(&p.spec.target));
            e.insert("value".into(), pi_to_json(&p.value));
            let shown = match psi {
                Some(psi) => {
                    let v = psi.value(&p.spec.coords).expect("ψ covers every point");
                    e.insert("psi_value".into(), pi_to_json(v));
                    v
                }
                None => &p.value,
            };
            e.insert("pi_degree".into(), json!(shown.pi_degree()));
            e.insert("verdict".into(), json!(transcendence_verdict(shown).name()));
            if let (Some(_), Role::Transcendental(n)) = (psi, p.spec.role) {
                let mirror = bundle.point(&conj(&p.spec.coords)).expect("conjugate-closed");
                let l = match mirror.spec.role {
                    Role::Transcendental(l) => l,
                    _ => unreachable!("conjugates of V points are V points"),
                };
                let (g1, _) = p.element.as_monomial().expect("K π^n value");
                let (g2, _) = mirror.element.as_monomial().expect("K π^l value");
                e.insert(
                    "witness".into(),
                    json!({"gamma1": gauss_to_json(&g1), "n": n, "gamma2": gauss_to_json(&g2.conj()), "l": l}),
                );
            }
            Value::Object(e)
        })
        .collect();
    o.insert("points".into(), Value::Array(points));
    o.insert("auxiliary_points".into(), json!(bundle.points().len() - inputs));
    Value::Object(o)
}

pub fn certificate(cert: &Certificate) -> Value {
    let checks: Vec<Value> = cert
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "statement": c.statement,
                "evidence": c.evidence.name(),
                "pass": c.pass,
                "detail": c.detail,
            })
        })
        .collect();
    json!({"pass": cert.pass(), "checks": checks})
}
