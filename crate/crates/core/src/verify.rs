//! Independent re-checking of a finished construction.
//!
//! Nothing here trusts the incremental bookkeeping of the builder: values are
//! recomputed from the recorded δ's and hyperplanes, and f* is re-expanded with
//! a separate naive multiplication routine.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::bundle::{FunctionBundle, PsiBundle, Role, SupportSet};
use crate::gauss::GaussRat;
use crate::geometry::{coordinate_product, is_complex_collinear, product_of_planes};
use crate::interval::{cert_abs_lt, enclose, Certainty, ComplexBox};
use crate::pi_expr::PiExpr;
use crate::poly::{lex_monomials, ExpVec, MPoly};
use crate::rational::{binomial, factorial, sqrt_upper, Rat};
use crate::steering::{delta_bound, s_bound, ConstructionState};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evidence {
    ExactEquality,
    IntervalBound,
    StructuralScan,
}

impl Evidence {
    pub fn name(self) -> &'static str {
        match self {
            Evidence::ExactEquality => "exact-equality",
            Evidence::IntervalBound => "interval-bound",
            Evidence::StructuralScan => "structural-scan",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub statement: String,
    pub evidence: Evidence,
    pub pass: bool,
    /// First failure found, empty on success.
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Certificate {
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    fn push(&mut self, name: String, statement: &str, evidence: Evidence, outcome: Result<(), String>) {
        let (pass, detail) = match outcome {
            Ok(()) => (true, String::new()),
            Err(e) => (false, e),
        };
        self.checks.push(Check { name, statement: statement.into(), evidence, pass, detail });
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Algebraic,
    Transcendental,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Algebraic => "algebraic",
            Verdict::Transcendental => "transcendental",
        }
    }
}

/// A polynomial in π of positive degree with algebraic coefficients is
/// transcendental; a π-free value is algebraic.
pub fn transcendence_verdict(v: &PiExpr) -> Verdict {
    match v.pi_degree() {
        None | Some(0) => Verdict::Algebraic,
        Some(_) => Verdict::Transcendental,
    }
}

/// Upper bound for `Σ_{n>D} ρ^n / n!` with `ρ = max(1, R)`.
pub fn tail_bound(degree: u32, radius: &Rat) -> Rat {
    let rho = if radius > &Rat::one() { radius.clone() } else { Rat::one() };
    let mut sum = Rat::zero();
    let mut d = degree as u64;
    while rho >= Rat::from_integer(BigInt::from(d + 2)) {
        d += 1;
        sum += power_over_factorial(&rho, d);
    }
    let ratio = &rho / Rat::from_integer(BigInt::from(d + 2));
    sum + power_over_factorial(&rho, d + 1) / (Rat::one() - ratio)
}

fn power_over_factorial(rho: &Rat, n: u64) -> Rat {
    num_traits::pow(rho.clone(), n as usize) / Rat::from_integer(factorial(n))
}

/// Upper bound for `max_i |z_i|`.
pub fn sup_norm_upper(z: &[GaussRat]) -> Rat {
    z.iter().map(|x| sqrt_upper(&x.norm_sqr(), 64)).max().unwrap_or_else(Rat::zero)
}

/// Bound on the terms of degree `> degree` of a bundle on the polydisc of
/// radius `radius`, given that every coefficient obeys its `s`-bound.
///
/// The constant, the subfunction pieces `z^{1_S} f_S(z_S)` and `f*` are
/// bounded separately; `f_S` contributes its own tail beyond `degree - |S|`.
pub fn bundle_tail_bound(bundle: &FunctionBundle, degree: i64, radius: &Rat) -> Rat {
    let rho = if radius > &Rat::one() { radius.clone() } else { Rat::one() };
    let mut total = if degree < 0 { bundle.a0().re.abs() + bundle.a0().im.abs() } else { Rat::zero() };
    total += tail_bound(degree.max(0) as u32, radius);
    for (s, sub) in bundle.subfunctions() {
        let k = s.len();
        total += num_traits::pow(rho.clone(), k) * bundle_tail_bound(sub, degree - k as i64, radius);
    }
    total
}

/// Enclosure of the completed function at `z`: exact prefix value inflated by
/// the tail bound.
pub fn certified_eval(bundle: &FunctionBundle, z: &[GaussRat], precision: u32) -> crate::Result<ComplexBox> {
    let value = bundle.assembled_prefix().eval(z)?;
    let tail = bundle_tail_bound(bundle, bundle.degree() as i64, &sup_norm_upper(z));
    Ok(enclose(&value, precision).inflate(&tail))
}

/// Enclosure of the completed `f*` at `z` from a single construction state.
pub fn certified_eval_state(state: &ConstructionState, z: &[GaussRat], precision: u32) -> crate::Result<ComplexBox> {
    certified_eval_within(state, z, &sup_norm_upper(z), precision)
}

/// Like [`certified_eval_state`], with the tail taken over the whole polydisc
/// `‖z‖∞ <= radius`.
pub fn certified_eval_within(
    state: &ConstructionState,
    z: &[GaussRat],
    radius: &Rat,
    precision: u32,
) -> crate::Result<ComplexBox> {
    let r2 = radius * radius;
    if radius.is_negative() || z.iter().any(|x| x.norm_sqr() > r2) {
        return Err(crate::Error::DegenerateConfiguration(format!("point outside the polydisc of radius {radius}")));
    }
    let value = state.prefix().eval(z)?;
    let tail = tail_bound(state.finalized_degree(), radius);
    Ok(enclose(&value, precision).inflate(&tail))
}

/// Naive dense-free re-expansion used as an oracle for `f*`.
type Oracle = BTreeMap<Vec<u32>, PiExpr>;

fn oracle_mul(a: &Oracle, b: &Oracle) -> Oracle {
    let mut out = Oracle::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let c = ca * cb;
            let slot = out.entry(e).or_insert_with(PiExpr::zero);
            *slot = &*slot + &c;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn oracle_add_scaled(acc: &mut Oracle, p: &Oracle, k: &PiExpr) {
    for (e, c) in p {
        let slot = acc.entry(e.clone()).or_insert_with(PiExpr::zero);
        *slot = &*slot + &(c * k);
    }
    acc.retain(|_, c| !c.is_zero());
}

fn oracle_monomial(e: Vec<u32>) -> Oracle {
    Oracle::from([(e, PiExpr::one())])
}

fn oracle_annihilator(m: usize, planes: &[crate::geometry::Hyperplane]) -> Oracle {
    let mut acc = oracle_monomial(alloc::vec![0; m]);
    for h in planes {
        let mut form = Oracle::new();
        for (i, mu) in h.mu.iter().enumerate().filter(|(_, mu)| !mu.is_zero()) {
            let mut e = alloc::vec![0; m];
            e[i] = 1;
            form.insert(e, PiExpr::constant(mu.clone()));
        }
        form.insert(alloc::vec![0; m], PiExpr::constant(-&h.lambda));
        acc = oracle_mul(&acc, &form);
    }
    acc
}

/// Re-expands `f*` from the recorded stage data alone.
pub fn oracle_fstar(state: &ConstructionState) -> Oracle {
    let m = state.arity();
    let mut acc = Oracle::new();
    let mut prev = oracle_monomial(alloc::vec![1; m]);
    let mut last = oracle_monomial(alloc::vec![0; m]);
    for st in state.stages() {
        let mut e = alloc::vec![1u32; m];
        if st.n > 1 {
            e[0] = st.n as u32;
        }
        let mult = if st.n == 1 { prev.clone() } else { oracle_mul(&prev, &oracle_monomial(e)) };
        oracle_add_scaled(&mut acc, &mult, &st.delta0);
        let cur = oracle_annihilator(m, &st.planes);
        for c in &st.corrections {
            oracle_add_scaled(&mut acc, &oracle_mul(&cur, &oracle_monomial(c.monomial.0.clone())), &c.delta);
        }
        prev = cur.clone();
        last = cur;
    }
    for layer in state.free_layers() {
        for c in &layer.corrections {
            oracle_add_scaled(&mut acc, &oracle_mul(&last, &oracle_monomial(c.monomial.0.clone())), &c.delta);
        }
    }
    acc
}

fn to_oracle(p: &MPoly) -> Oracle {
    p.terms().map(|(e, c)| (e.0.clone(), c.clone())).collect()
}

fn eval_oracle(p: &Oracle, z: &[GaussRat]) -> PiExpr {
    p.iter().fold(PiExpr::zero(), |acc, (e, c)| {
        let mono = e.iter().zip(z).fold(GaussRat::one(), |m, (k, x)| &m * &x.pow(*k));
        &acc + &c.scalar_mul(&mono)
    })
}

fn truncate_oracle(p: &Oracle, degree: u32) -> Oracle {
    p.iter().filter(|(e, _)| e.iter().sum::<u32>() <= degree).map(|(e, c)| (e.clone(), c.clone())).collect()
}

/// Runs every invariant of a single construction state.
pub fn check_state(state: &ConstructionState) -> Certificate {
    let mut cert = Certificate::default();
    state_checks(state, "", &mut cert);
    cert
}

fn state_checks(state: &ConstructionState, prefix: &str, cert: &mut Certificate) {
    let name = |s: &str| format!("{prefix}{s}");
    let m = state.arity();
    let precision = state.config().max_precision;
    let stages = state.stages();
    let points: Vec<&[GaussRat]> = state.points().iter().map(|p| p.coords.as_slice()).collect();

    cert.push(
        name("annihilator-vanishing"),
        "A_n vanishes at u_1..u_n and is nonzero at the origin and at its witness",
        Evidence::ExactEquality,
        (|| {
            for st in stages {
                let expected_prev = match st.n {
                    1 => coordinate_product(m),
                    n => stages[n - 2].annihilator_cur.clone().unwrap_or_else(|| MPoly::zero(m)),
                };
                ensure(st.annihilator_prev == expected_prev, || format!("stage {}: A_(n-1) mismatch", st.n))?;
                let (Some(a), Some(w)) = (&st.annihilator_cur, &st.witness) else {
                    return Err(format!("stage {} not finalized", st.n));
                };
                for (j, u) in points[..st.n].iter().enumerate() {
                    ensure(a.eval(u).map_err(|e| format!("{e}"))?.is_zero(), || {
                        format!("A_{}(u_{}) != 0", st.n, j + 1)
                    })?;
                }
                ensure(!a.eval(&alloc::vec![GaussRat::zero(); m]).map_err(|e| format!("{e}"))?.is_zero(), || {
                    format!("A_{}(0) = 0", st.n)
                })?;
                ensure(!a.eval(w).map_err(|e| format!("{e}"))?.is_zero(), || {
                    format!("A_{} vanishes at its witness", st.n)
                })?;
            }
            Ok(())
        })(),
    );

    cert.push(
        name("hyperplane-invariants"),
        "every plane passes through its point, avoids the origin and the witness; parallel planes satisfy mu.next = 0",
        Evidence::ExactEquality,
        (|| {
            for st in stages {
                let w = st.witness.as_deref().unwrap_or(&[]);
                ensure(st.planes.len() == st.n, || format!("stage {}: {} planes", st.n, st.planes.len()))?;
                for (h, u) in st.planes.iter().zip(&points) {
                    ensure(!h.lambda.is_zero(), || format!("stage {}: lambda = 0", st.n))?;
                    ensure(h.contains(u), || format!("stage {}: plane misses its point", st.n))?;
                    ensure(!h.contains(w), || format!("stage {}: plane contains the witness", st.n))?;
                    let collinear = is_complex_collinear(u, w).map_err(|e| format!("{e}"))?;
                    if !collinear {
                        ensure(crate::gauss::dot(&h.mu, w).is_zero(), || format!("stage {}: mu.next != 0", st.n))?;
                    }
                }
                ensure(st.annihilator_cur.as_ref() == Some(&product_of_planes(m, &st.planes)), || {
                    format!("stage {}: A_n is not the product of its planes", st.n)
                })?;
            }
            Ok(())
        })(),
    );

    cert.push(
        name("correction-order"),
        "each layer of degree d has one correction per full-support monomial, in lexicographic order",
        Evidence::StructuralScan,
        (|| {
            let layers = stages
                .iter()
                .map(|st| (st.degree(), &st.corrections))
                .chain(state.free_layers().iter().map(|l| (l.degree, &l.corrections)));
            for (d, corrections) in layers {
                let expected = lex_monomials(d, m);
                let count = binomial(d as u64 - 1, m as u64 - 1);
                ensure(BigInt::from(corrections.len()) == count, || {
                    format!("degree {d}: {} corrections", corrections.len())
                })?;
                ensure(corrections.iter().map(|c| &c.monomial).eq(expected.iter()), || {
                    format!("degree {d}: order differs")
                })?;
            }
            Ok(())
        })(),
    );

    cert.push(
        name("coefficient-membership"),
        "every finalized coefficient is a pi-free element of K with |c| < s_d",
        Evidence::IntervalBound,
        (|| {
            let fstar = state.fstar();
            for d in m as u32..=state.finalized_degree() {
                let s = s_bound(d, m);
                for e in lex_monomials(d, m) {
                    let c = fstar.coeff(&e);
                    let g = c.as_gauss().ok_or_else(|| format!("{e:?}: coefficient carries pi"))?;
                    ensure(g.in_k(), || format!("{e:?}: coefficient {g} not in K"))?;
                    ensure(cert_abs_lt(&c, &s, precision) == Certainty::Proved, || format!("{e:?}: |{g}| >= s_{d}"))?;
                }
            }
            let layers = stages
                .iter()
                .flat_map(|st| st.corrections.iter())
                .chain(state.free_layers().iter().flat_map(|l| l.corrections.iter()));
            for c in layers {
                ensure(fstar.coeff(&c.monomial) == PiExpr::constant(c.coefficient.clone()), || {
                    format!("{:?}: recorded coefficient differs", c.monomial)
                })?;
            }
            Ok(())
        })(),
    );

    cert.push(
        name("delta-bounds"),
        "0 < |delta_(n,0)| < s_(n+m-1)/(n+m-1) and delta_(n,0) steers the center onto the pinned value",
        Evidence::IntervalBound,
        (|| {
            for st in stages {
                ensure(!st.delta0.is_zero(), || format!("stage {}: delta = 0", st.n))?;
                ensure(st.delta_bound == delta_bound(st.n, m), || format!("stage {}: wrong bound", st.n))?;
                ensure(cert_abs_lt(&st.delta0, &st.delta_bound, precision) == Certainty::Proved, || {
                    format!("stage {}: |delta| not below bound", st.n)
                })?;
                let mult = state.steering_multiplier(st.n, &st.annihilator_prev);
                let mv = mult.eval(&st.point).map_err(|e| format!("{e}"))?;
                ensure(mv == PiExpr::constant(st.multiplier.clone()), || format!("stage {}: multiplier", st.n))?;
                ensure(&st.center + &st.delta0.scalar_mul(&st.multiplier) == st.pinned_value, || {
                    format!("stage {}: center + delta * multiplier != pinned", st.n)
                })?;
            }
            Ok(())
        })(),
    );

    cert.push(
        name("full-support"),
        "f* has only full-support monomials and vanishes on coordinate hyperplanes",
        Evidence::StructuralScan,
        (|| {
            for (e, _) in state.fstar().terms() {
                ensure(e.full_support(), || format!("monomial {e:?} lacks full support"))?;
            }
            for u in &points {
                for i in 0..m {
                    let mut z = u.to_vec();
                    z[i] = GaussRat::zero();
                    ensure(state.fstar().eval(&z).map_err(|e| format!("{e}"))?.is_zero(), || {
                        format!("f* nonzero at {z:?}")
                    })?;
                }
            }
            Ok(())
        })(),
    );

    // Replay the construction step by step from the records.
    let replay = replay(state);
    let final_oracle = to_oracle(state.fstar());
    cert.push(
        name("finalization-stability"),
        "layers finalized at a stage are identical in every later state",
        Evidence::ExactEquality,
        replay.iter().try_for_each(|(d, snapshot)| {
            ensure(truncate_oracle(snapshot, *d) == truncate_oracle(&final_oracle, *d), || {
                format!("degree <= {d} changed")
            })
        }),
    );

    cert.push(
        name("pinned-stability"),
        "Theta_j + f*_n(u_j) equals the pinned value for every n >= j",
        Evidence::ExactEquality,
        (|| {
            for (k, (_, snapshot)) in replay.iter().enumerate() {
                let done = stages.len().min(k + 1);
                for st in &stages[..done] {
                    let v = &st.offset + &eval_oracle(snapshot, &st.point);
                    ensure(v == st.pinned_value, || format!("pinned value {} moved at step {}", st.n, k + 1))?;
                }
            }
            for st in stages {
                ensure(state.pinned_value(st.n).as_ref() == Ok(&st.pinned_value), || format!("pinned {}", st.n))?;
                let v = &st.offset + &state.fstar().eval(&st.point).map_err(|e| format!("{e}"))?;
                ensure(v == st.pinned_value, || format!("final f* misses pinned value {}", st.n))?;
            }
            Ok(())
        })(),
    );

    cert.push(
        name("pinned-membership"),
        "each pinned value maps into its target set",
        Evidence::ExactEquality,
        (|| {
            for (st, p) in stages.iter().zip(state.points()) {
                ensure(p.target.push_forward(&st.pinned_value) == st.target_element, || {
                    format!("stage {}: pullback", st.n)
                })?;
                ensure(p.target.kind.contains(&st.target_element), || {
                    format!("stage {}: {} not in {}", st.n, st.target_element, p.target.kind.name())
                })?;
            }
            Ok(())
        })(),
    );

    cert.push(
        name("oracle-equivalence"),
        "independent re-expansion of all recorded additions equals f* term by term",
        Evidence::ExactEquality,
        ensure(oracle_fstar(state) == final_oracle, || "re-expansion differs from f*".into()),
    );
}

/// Snapshots `(finalized degree, f*)` after each stage and free layer.
fn replay(state: &ConstructionState) -> Vec<(u32, Oracle)> {
    let m = state.arity();
    let mut acc = Oracle::new();
    let mut out = Vec::new();
    let mut last = oracle_monomial(alloc::vec![0; m]);
    for st in state.stages() {
        let mut mult = to_oracle(&st.annihilator_prev);
        if st.n > 1 {
            let mut e = alloc::vec![1u32; m];
            e[0] = st.n as u32;
            mult = oracle_mul(&mult, &oracle_monomial(e));
        }
        oracle_add_scaled(&mut acc, &mult, &st.delta0);
        if let Some(a) = &st.annihilator_cur {
            last = to_oracle(a);
        }
        for c in &st.corrections {
            oracle_add_scaled(&mut acc, &oracle_mul(&last, &oracle_monomial(c.monomial.0.clone())), &c.delta);
        }
        out.push((st.degree(), acc.clone()));
    }
    for layer in state.free_layers() {
        for c in &layer.corrections {
            oracle_add_scaled(&mut acc, &oracle_mul(&last, &oracle_monomial(c.monomial.0.clone())), &c.delta);
        }
        out.push((layer.degree, acc.clone()));
    }
    out
}

fn support_label(s: SupportSet, m: usize) -> String {
    let idx: Vec<String> = s.indices(m).map(|i| format!("{}", i + 1)).collect();
    format!("{{{}}}", idx.join(","))
}

/// Runs every invariant of a bundle, its subfunctions and (optionally) `ψ`.
pub fn check_bundle(bundle: &FunctionBundle, psi: Option<&PsiBundle>) -> Certificate {
    let mut cert = Certificate::default();
    bundle_checks(bundle, "", &mut cert);
    if let Some(psi) = psi {
        psi_checks(bundle, psi, &mut cert);
    }
    cert
}

fn bundle_checks(bundle: &FunctionBundle, path: &str, cert: &mut Certificate) {
    let m = bundle.arity();
    let name = |s: &str| format!("{path}{s}");
    state_checks(bundle.fstar(), &name("fstar/"), cert);
    for (&s, sub) in bundle.subfunctions() {
        bundle_checks(sub, &format!("{path}f_{}/", support_label(s, m)), cert);
    }

    cert.push(
        name("constant-term"),
        "a0 lies in K",
        Evidence::ExactEquality,
        ensure(bundle.a0().in_k(), || format!("a0 = {}", bundle.a0())),
    );

    cert.push(
        name("constraint-values"),
        "at every constraint point the recomputed value equals the recorded one and lands in its target set",
        Evidence::ExactEquality,
        (|| {
            for p in bundle.points() {
                let v = bundle.eval_exact(&p.spec.coords).map_err(|e| format!("{e}"))?;
                ensure(v == p.value, || format!("{:?}: recomputed value differs", p.spec.coords))?;
                ensure(p.spec.target.push_forward(&v) == p.element, || format!("{:?}: pullback", p.spec.coords))?;
                ensure(p.spec.target.kind.contains(&p.element), || format!("{:?}: not in target set", p.spec.coords))?;
            }
            Ok(())
        })(),
    );

    cert.push(
        name("prefix-coefficients"),
        "the assembled prefix has every monomial of degree <= D, each coefficient a pi-free element of K taken from the component of matching support",
        Evidence::StructuralScan,
        (|| {
            let d = bundle.degree();
            let prefix = bundle.assembled_prefix();
            let expected = binomial(d as u64 + m as u64, m as u64);
            ensure(BigInt::from(prefix.len()) == expected, || format!("{} terms, expected {expected}", prefix.len()))?;
            for (e, c) in prefix.terms() {
                ensure(c.as_gauss().is_some_and(|g| g.in_k()), || format!("{e:?}: {c} not in K"))?;
                let s = SupportSet(e.0.iter().enumerate().filter(|(_, &x)| x > 0).fold(0, |a, (i, _)| a | 1 << i));
                let source = if s.is_empty() {
                    PiExpr::constant(bundle.a0().clone())
                } else if s == SupportSet::full(m) {
                    bundle.fstar().fstar().coeff(e)
                } else {
                    let inner: Vec<u32> = s.indices(m).map(|i| e.0[i] - 1).collect();
                    bundle.subfunctions()[&s].assembled_prefix().coeff(&ExpVec(inner))
                };
                ensure(&source == c, || format!("{e:?}: coefficient not from its support component"))?;
            }
            Ok(())
        })(),
    );
}

fn psi_checks(bundle: &FunctionBundle, psi: &PsiBundle, cert: &mut Certificate) {
    cert.push(
        "psi/real-coefficients".into(),
        "every coefficient of the symmetrized prefix is real and nonzero",
        Evidence::StructuralScan,
        (|| {
            let f = bundle.assembled_prefix();
            ensure(psi.prefix.len() == f.len(), || "prefix size differs".into())?;
            for (e, c) in psi.prefix.terms() {
                let g = c.as_gauss().ok_or_else(|| format!("{e:?}: carries pi"))?;
                ensure(g.is_real() && !g.is_zero(), || format!("{e:?}: {g}"))?;
                ensure(c == &f.coeff(e).re(), || format!("{e:?}: not the real part"))?;
            }
            Ok(())
        })(),
    );
    cert.push(
        "psi/value-law".into(),
        "psi(u) = (f(u) + conj(f(conj u))) / 2 at every constraint point",
        Evidence::ExactEquality,
        (|| {
            let half = GaussRat::real(Rat::new(BigInt::one(), BigInt::from(2)));
            for (z, v) in &psi.values {
                let zc: Vec<GaussRat> = z.iter().map(GaussRat::conj).collect();
                let a = bundle.eval_exact(z).map_err(|e| format!("{e}"))?;
                let b = bundle.eval_exact(&zc).map_err(|e| format!("{e}"))?;
                ensure(&(&a + &b.conj()).scalar_mul(&half) == v, || format!("{z:?}"))?;
            }
            Ok(())
        })(),
    );
    cert.push(
        "psi/exceptional-set".into(),
        "among input points, psi is algebraic exactly on the algebraic set",
        Evidence::StructuralScan,
        (|| {
            for p in bundle.points() {
                let expected = match p.spec.role {
                    Role::Exceptional => Verdict::Algebraic,
                    Role::Transcendental(_) => Verdict::Transcendental,
                    Role::Prescribed | Role::Auxiliary => continue,
                };
                let v = psi.value(&p.spec.coords).ok_or_else(|| format!("{:?}: no value", p.spec.coords))?;
                ensure(transcendence_verdict(v) == expected, || {
                    format!("{:?}: verdict {}", p.spec.coords, expected.name())
                })?;
            }
            Ok(())
        })(),
    );
}

/// Whether the enclosure, shifted to the origin, is within `bound` in both parts.
pub fn box_within(b: &ComplexBox, center: &GaussRat, bound: &Rat) -> bool {
    let re = (b.re.hi() - &center.re).abs().max((b.re.lo() - &center.re).abs());
    let im = (b.im.hi() - &center.im).abs().max((b.im.lo() - &center.im).abs());
    re <= *bound && im <= *bound
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{build_bundle, BundleConfig, PointSpec};
    use crate::rational::{int, rat};
    use crate::steering::{run, ConstraintPoint, SteeringConfig};
    use crate::target::{SelectionPolicy, Target, TargetKind};

    fn g(a: i64, b: i64) -> GaussRat {
        GaussRat::from_i64(a, b)
    }

    fn walkthrough() -> ConstructionState {
        let points = [1, 2].iter().map(|&x| ConstraintPoint::new(alloc::vec![g(x, 0)], Target::gaussian_k())).collect();
        let config = SteeringConfig { policy: SelectionPolicy::SmallestDenominator, ..Default::default() };
        run(1, points, alloc::vec![PiExpr::one(); 2], config, 2).unwrap()
    }

    #[test]
    fn walkthrough_certificate_passes() {
        let cert = check_state(&walkthrough());
        assert!(cert.pass(), "{:?}", cert.failures().collect::<Vec<_>>());
        assert_eq!(cert.checks.len(), 10);
    }

    #[test]
    fn empty_run_passes_vacuously() {
        let st = run(2, Vec::new(), Vec::new(), SteeringConfig::default(), 0).unwrap();
        assert!(check_state(&st).pass());
    }

    #[test]
    fn corrupted_coefficient_is_caught() {
        let st = walkthrough().with_coefficient(&ExpVec(alloc::vec![1]), PiExpr::constant(g(2, 0)));
        let cert = check_state(&st);
        assert!(!cert.check("coefficient-membership").unwrap().pass);
        for ok in ["annihilator-vanishing", "hyperplane-invariants", "delta-bounds", "full-support", "correction-order"]
        {
            assert!(cert.check(ok).unwrap().pass, "{ok}");
        }
    }

    #[test]
    fn tail_bound_examples() {
        let expected = Rat::from_integer(12.into()) / Rat::from_integer(BigInt::from(11) * factorial(11));
        assert_eq!(tail_bound(10, &int(1)), expected);
        assert_eq!(tail_bound(10, &int(0)), expected);
        for d in 0..12 {
            assert!(tail_bound(d + 1, &int(3)) < tail_bound(d, &int(3)));
        }
        // rho = 5 forces internal extension from D = 1 up to 4.
        let b = tail_bound(1, &int(5));
        let mut partial = Rat::zero();
        for n in 2..30u64 {
            partial += power_over_factorial(&int(5), n);
        }
        assert!(partial < b);
    }

    #[test]
    fn verdict_examples() {
        assert_eq!(transcendence_verdict(&PiExpr::constant(GaussRat::new(rat(3, 2), int(1)))), Verdict::Algebraic);
        assert_eq!(transcendence_verdict(&PiExpr::monomial(GaussRat::real(rat(1, 2)), 3)), Verdict::Transcendental);
        let mixed = &PiExpr::monomial(g(1, 2), 2) + &PiExpr::monomial(g(3, 0), 5);
        assert_eq!(transcendence_verdict(&mixed.scalar_mul(&GaussRat::real(rat(1, 2)))), Verdict::Transcendental);
        assert_eq!(transcendence_verdict(&PiExpr::zero()), Verdict::Algebraic);
    }

    fn walkthrough_bundle() -> FunctionBundle {
        let mut points = alloc::vec![PointSpec::new(
            alloc::vec![g(0, 0)],
            TargetKind::ExplicitValue(PiExpr::one()),
            Role::Prescribed
        )];
        for x in [1, 2] {
            points.push(PointSpec::new(alloc::vec![g(x, 0)], TargetKind::GaussianK, Role::Prescribed));
        }
        let config = BundleConfig {
            steering: SteeringConfig { policy: SelectionPolicy::SmallestDenominator, ..Default::default() },
            ..Default::default()
        };
        build_bundle(1, &points, &config).unwrap()
    }

    #[test]
    fn certified_eval_examples() {
        let b = walkthrough_bundle();
        assert!(check_bundle(&b, None).pass());
        let half = GaussRat::real(rat(1, 2));
        let bx = certified_eval(&b, std::slice::from_ref(&half), 64).unwrap();
        let prefix_value = GaussRat::real(Rat::one() + rat(1, 4) - rat(1, 32));
        assert!(bx.contains(&prefix_value));
        assert!(box_within(&bx, &prefix_value, &tail_bound(2, &rat(1, 2))));
        assert!(certified_eval(&b, &[g(0, 0)], 64).unwrap().contains(&g(1, 0)));
        for (x, v) in [(1, rat(3, 2)), (2, rat(5, 2))] {
            assert!(certified_eval(&b, &[g(x, 0)], 64).unwrap().contains(&GaussRat::real(v)));
        }
    }
}
