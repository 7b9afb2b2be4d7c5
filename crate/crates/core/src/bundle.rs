//! Assembly of the full function
//! `f = a0 + Σ_S (∏_{i∈S} z_i) f_S(z_S) + f*` from subfunctions of lower arity,
//! and its conjugation-symmetric companion `ψ`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::gauss::GaussRat;
use crate::interval::cert_abs_lt;
use crate::pi_expr::PiExpr;
use crate::poly::{ExpVec, MPoly};
use crate::rational::Rat;
use crate::steering::{run, ConstraintPoint, ConstructionState, SteeringConfig};
use crate::target::{choice_rng, select, SelectionRequest, Target, TargetKind};
use crate::verify::{transcendence_verdict, Verdict};

/// A subset of `{0, ..., m-1}` stored as a bit mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SupportSet(pub u32);

impl SupportSet {
    pub fn full(m: usize) -> Self {
        Self((1u32 << m) - 1)
    }

    pub fn of(z: &[GaussRat]) -> Self {
        Self(z.iter().enumerate().filter(|(_, x)| !x.is_zero()).fold(0, |acc, (i, _)| acc | 1 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn indices(self, m: usize) -> impl Iterator<Item = usize> {
        (0..m).filter(move |&i| self.contains(i))
    }

    /// Coordinates of `z` indexed by the set, in increasing index order.
    pub fn restrict(self, z: &[GaussRat]) -> Vec<GaussRat> {
        self.indices(z.len()).map(|i| z[i].clone()).collect()
    }

    /// `z` with every coordinate outside the set replaced by zero.
    pub fn project(self, z: &[GaussRat]) -> Vec<GaussRat> {
        z.iter().enumerate().map(|(i, x)| if self.contains(i) { x.clone() } else { GaussRat::zero() }).collect()
    }

    /// `∏_{i∈S} z_i`.
    pub fn coordinate_product(self, z: &[GaussRat]) -> GaussRat {
        self.indices(z.len()).fold(GaussRat::one(), |acc, i| &acc * &z[i])
    }

    /// Nonempty proper subsets of `{0, ..., m-1}`, by size then mask.
    pub fn proper_subsets(m: usize) -> Vec<Self> {
        let mut v: Vec<Self> = (1..(1u32 << m) - 1).map(Self).collect();
        v.sort_by_key(|s| (s.len(), s.0));
        v
    }

    /// Nonempty subsets of `self`, including `self`.
    pub fn subsets(self) -> impl Iterator<Item = Self> {
        (1..=self.0).filter(move |t| t & !self.0 == 0).map(Self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// A point with a prescribed target set.
    Prescribed,
    /// Member of the algebraic set of the exceptional problem.
    Exceptional,
    /// The `n`-th transcendental point, sent to `K π^n`.
    Transcendental(u32),
    /// Added by projection closure.
    Auxiliary,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSpec {
    pub coords: Vec<GaussRat>,
    pub target: Target,
    pub role: Role,
}

impl PointSpec {
    pub fn new(coords: Vec<GaussRat>, kind: TargetKind, role: Role) -> Self {
        Self { coords, target: Target::new(kind), role }
    }

    fn auxiliary(coords: Vec<GaussRat>) -> Self {
        Self { coords, target: Target::gaussian_k(), role: Role::Auxiliary }
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(GaussRat::is_zero)
    }
}

/// Groups points by their exact support, keeping input order inside groups.
pub fn partition_by_support(points: &[PointSpec]) -> BTreeMap<SupportSet, Vec<PointSpec>> {
    let mut map: BTreeMap<SupportSet, Vec<PointSpec>> = BTreeMap::new();
    for p in points {
        map.entry(SupportSet::of(&p.coords)).or_default().push(p.clone());
    }
    map
}

/// Adds every coordinate projection of every point as an auxiliary point.
pub fn projection_closure(points: &[PointSpec]) -> Vec<PointSpec> {
    let mut out = points.to_vec();
    for p in points {
        let s = SupportSet::of(&p.coords);
        let projections = core::iter::once(SupportSet(0)).chain(s.subsets());
        for t in projections {
            let q = t.project(&p.coords);
            if !out.iter().any(|o| o.coords == q) {
                out.push(PointSpec::auxiliary(q));
            }
        }
    }
    out
}

/// A constrained point of a built bundle with its exact value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundlePoint {
    pub spec: PointSpec,
    /// `f(u)`.
    pub value: PiExpr,
    /// The element of the underlying target set that `value` maps to.
    pub element: PiExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionBundle {
    arity: usize,
    degree: u32,
    a0: GaussRat,
    subfunctions: BTreeMap<SupportSet, FunctionBundle>,
    fstar: ConstructionState,
    points: Vec<BundlePoint>,
}

/// Options shared by every level of a bundle build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct BundleConfig {
    pub steering: SteeringConfig,
    /// Number of stages of the top-level `f*`; all full-support points when `None`.
    pub stages: Option<usize>,
    /// Degree of the finalized prefix; `N + m - 1` when `None`.
    pub degree: Option<u32>,
}

impl FunctionBundle {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn a0(&self) -> &GaussRat {
        &self.a0
    }

    pub fn subfunctions(&self) -> &BTreeMap<SupportSet, FunctionBundle> {
        &self.subfunctions
    }

    pub fn fstar(&self) -> &ConstructionState {
        &self.fstar
    }

    /// The closed constraint set with values, input points first.
    pub fn points(&self) -> &[BundlePoint] {
        &self.points
    }

    pub fn point(&self, z: &[GaussRat]) -> Option<&BundlePoint> {
        self.points.iter().find(|p| p.spec.coords == z)
    }

    /// `Θ_{S,u} = a0 + Σ_{T ⊊ S} (∏_{i∈T} u_i) f_T(u_T)`; for `S` the full set
    /// this is the offset of `f*` at `u`.
    pub fn theta(&self, s: SupportSet, u: &[GaussRat]) -> Result<PiExpr> {
        let mut acc = PiExpr::constant(self.a0.clone());
        for (&t, sub) in &self.subfunctions {
            if t == s || !t.is_subset(s) {
                continue;
            }
            let value = sub.eval_exact(&t.restrict(u))?;
            acc = &acc + &value.scalar_mul(&t.coordinate_product(u));
        }
        Ok(acc)
    }

    /// Exact value at a constraint point, recomputed from the pieces.
    pub fn eval_exact(&self, u: &[GaussRat]) -> Result<PiExpr> {
        if u.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: u.len() });
        }
        if self.point(u).is_none() {
            return Err(Error::NotPinned);
        }
        let s = SupportSet::of(u);
        if s.is_empty() {
            return Ok(PiExpr::constant(self.a0.clone()));
        }
        let theta = self.theta(s, u)?;
        let own = if s == SupportSet::full(self.arity) {
            self.fstar.fstar().eval(u)?
        } else {
            self.subfunctions[&s].eval_exact(&s.restrict(u))?.scalar_mul(&s.coordinate_product(u))
        };
        Ok(&theta + &own)
    }

    /// All terms of `f` of degree `<= degree`.
    pub fn prefix(&self, degree: u32) -> MPoly {
        let m = self.arity;
        let mut out = MPoly::constant(m, PiExpr::constant(self.a0.clone()));
        for (&s, sub) in &self.subfunctions {
            let Some(d) = degree.checked_sub(s.len() as u32) else { continue };
            for (e, c) in sub.prefix(d).terms() {
                let mut exp = alloc::vec![0u32; m];
                for (k, i) in s.indices(m).enumerate() {
                    exp[i] = e.0[k] + 1;
                }
                out.add_term(ExpVec(exp), c);
            }
        }
        for (e, c) in self.fstar.fstar().truncate(degree).terms() {
            out.add_term(e.clone(), c);
        }
        out
    }

    /// The certified prefix at the bundle's own degree.
    pub fn assembled_prefix(&self) -> MPoly {
        self.prefix(self.degree)
    }
}

fn sub_seed(seed: u64, s: SupportSet) -> u64 {
    choice_rng(seed, 1 << 48 | s.0 as u64).next_u64()
}

/// Builds the bundle for the given points.
///
/// Points are projection-closed first. Subfunctions are built by increasing
/// support size, each with targets pulled back through `Θ_{S,u}` and `∏ u_i`.
pub fn build_bundle(arity: usize, points: &[PointSpec], config: &BundleConfig) -> Result<FunctionBundle> {
    for (i, p) in points.iter().enumerate() {
        if p.coords.len() != arity {
            return Err(Error::ArityMismatch { expected: arity, found: p.coords.len() });
        }
        if points[..i].iter().any(|q| q.coords == p.coords) {
            return Err(Error::DuplicatePoint(i));
        }
    }
    let mut closed = projection_closure(points);
    if !closed.iter().any(PointSpec::is_origin) {
        closed.push(PointSpec::auxiliary(alloc::vec![GaussRat::zero(); arity]));
    }
    let groups = partition_by_support(&closed);
    let full = SupportSet::full(arity);
    let full_points = groups.get(&full).cloned().unwrap_or_default();
    let n_stages = match config.stages {
        None => full_points.len(),
        Some(n) if n > full_points.len() => {
            return Err(Error::NotEnoughPoints { requested: n, available: full_points.len() })
        }
        Some(n) if n < full_points.len() => {
            return Err(Error::DegenerateConfiguration("every full-support point needs its own stage".into()))
        }
        Some(n) => n,
    };
    let degree = config.degree.unwrap_or((n_stages + arity - 1) as u32);
    let steering = config.steering;

    let origin = groups[&SupportSet(0)][0].clone();
    let (a0, a0_element) = select_constant(&origin.target, &steering)?;
    let mut bundle = FunctionBundle {
        arity,
        degree,
        a0: a0.clone(),
        subfunctions: BTreeMap::new(),
        fstar: ConstructionState::new(arity, Vec::new(), Vec::new(), steering)?,
        points: Vec::new(),
    };
    let mut values: Vec<Option<(PiExpr, PiExpr)>> = alloc::vec![None; closed.len()];
    let index_of = |z: &[GaussRat]| closed.iter().position(|p| p.coords == z).expect("closed point");
    values[index_of(&origin.coords)] = Some((PiExpr::constant(a0), a0_element));

    for s in SupportSet::proper_subsets(arity) {
        let members = groups.get(&s).cloned().unwrap_or_default();
        let mut sub_points = Vec::new();
        for p in &members {
            let theta = bundle.theta(s, &p.coords)?;
            let scale = s.coordinate_product(&p.coords);
            let target = compose(&p.target, &theta, &scale);
            sub_points.push(PointSpec { coords: s.restrict(&p.coords), target, role: p.role });
        }
        let sub_config = BundleConfig {
            steering: SteeringConfig { seed: sub_seed(steering.seed, s), ..steering },
            stages: None,
            degree: Some(degree.saturating_sub(s.len() as u32)),
        };
        let sub = build_bundle(s.len(), &sub_points, &sub_config)?;
        for p in &members {
            let sp = sub.point(&s.restrict(&p.coords)).expect("sub-bundle keeps its points");
            let theta = bundle.theta(s, &p.coords)?;
            let value = &theta + &sp.value.scalar_mul(&s.coordinate_product(&p.coords));
            values[index_of(&p.coords)] = Some((value, sp.element.clone()));
        }
        bundle.subfunctions.insert(s, sub);
    }

    let mut offsets = Vec::new();
    let mut constraint_points = Vec::new();
    for p in &full_points {
        offsets.push(bundle.theta(full, &p.coords)?);
        constraint_points.push(ConstraintPoint::new(p.coords.clone(), p.target.clone()));
    }
    let mut fstar = run(arity, constraint_points, offsets, steering, n_stages)?;
    fstar.extend_to_degree(degree)?;
    for (p, stage) in full_points.iter().zip(fstar.stages()) {
        values[index_of(&p.coords)] = Some((stage.pinned_value.clone(), stage.target_element.clone()));
    }
    bundle.fstar = fstar;

    bundle.points = closed
        .into_iter()
        .zip(values)
        .map(|(spec, v)| {
            let (value, element) = v.expect("every closed point is assigned");
            BundlePoint { spec, value, element }
        })
        .collect();
    Ok(bundle)
}

/// Target seen by a subfunction: `w_S = (w - Θ) / P` where `w` is the value
/// the parent target asks for.
fn compose(target: &Target, theta: &PiExpr, scale: &GaussRat) -> Target {
    let offset = &target.offset + &theta.scalar_mul(&target.scale);
    Target::pullback(target.kind.clone(), offset, &target.scale * scale)
}

/// Chooses `a0 ∈ K` for the origin; free origins get `|a0| < 1`.
fn select_constant(target: &Target, steering: &SteeringConfig) -> Result<(GaussRat, PiExpr)> {
    match &target.kind {
        TargetKind::ExplicitValue(v) => {
            let w = (v - &target.offset).scalar_div(&target.scale)?;
            match w.as_gauss().filter(GaussRat::in_k) {
                Some(g) => Ok((g, v.clone())),
                None => Err(Error::NotInK(alloc::format!("{v}"))),
            }
        }
        TargetKind::PiPowerScaled(_) => Err(Error::NotInK(alloc::format!("origin target {}", target.kind.name()))),
        TargetKind::GaussianK => {
            let one = Rat::one();
            let mut rng = choice_rng(steering.seed, 1 << 47);
            let s = select(
                &Target::gaussian_k(),
                SelectionRequest {
                    center: &PiExpr::zero(),
                    radius: &one,
                    policy: steering.policy,
                    rng: &mut rng,
                    max_precision: steering.max_precision,
                    stage: 0,
                },
                |w| cert_abs_lt(w, &one, steering.max_precision),
            )?;
            let a0 = s.value.as_gauss().expect("π-free choice");
            // A pulled-back GaussianK origin only arises for identity targets.
            debug_assert!(target.is_identity());
            Ok((a0, s.element))
        }
    }
}

/// Symmetrized prefix and exact values of `ψ(z) = (f(z) + conj(f(conj z))) / 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiBundle {
    pub arity: usize,
    pub degree: u32,
    pub prefix: MPoly,
    /// `ψ(u)` for every point of the closed constraint set, in bundle order.
    pub values: Vec<(Vec<GaussRat>, PiExpr)>,
}

impl PsiBundle {
    pub fn value(&self, z: &[GaussRat]) -> Option<&PiExpr> {
        self.values.iter().find(|(c, _)| c == z).map(|(_, v)| v)
    }
}

fn conj_point(z: &[GaussRat]) -> Vec<GaussRat> {
    z.iter().map(GaussRat::conj).collect()
}

pub fn symmetrize(bundle: &FunctionBundle) -> Result<PsiBundle> {
    let half = GaussRat::real(Rat::new(BigInt::one(), BigInt::from(2)));
    let mut values = Vec::new();
    for p in bundle.points() {
        let mirror = bundle.point(&conj_point(&p.spec.coords)).ok_or(Error::NotConjClosed)?;
        let v = (&p.value + &mirror.value.conj()).scalar_mul(&half);
        values.push((p.spec.coords.clone(), v));
    }
    let mut prefix = MPoly::zero(bundle.arity());
    for (e, c) in bundle.assembled_prefix().terms() {
        prefix.add_term(e.clone(), &c.re());
    }
    Ok(PsiBundle { arity: bundle.arity(), degree: bundle.degree(), prefix, values })
}

/// Per-point outcome of the exceptional pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointReport {
    pub coords: Vec<GaussRat>,
    pub role: Role,
    pub value: PiExpr,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalOutcome {
    pub bundle: FunctionBundle,
    pub psi: PsiBundle,
    /// Input points only: `S` first, then `V`.
    pub report: Vec<PointReport>,
}

fn conj_closed(points: &[Vec<GaussRat>]) -> bool {
    points.iter().all(|p| points.contains(&conj_point(p)))
}

/// Builds `f` with algebraic targets on `s_points` and `K π^n` on the `n`-th
/// point of `v_points`, then symmetrizes.
pub fn exceptional_pipeline(
    s_points: &[Vec<GaussRat>],
    v_points: &[Vec<GaussRat>],
    arity: usize,
    config: &BundleConfig,
) -> Result<ExceptionalOutcome> {
    if s_points.iter().any(|p| v_points.contains(p)) {
        return Err(Error::OverlapSV);
    }
    if !s_points.iter().any(|p| p.iter().all(GaussRat::is_zero)) {
        return Err(Error::OriginMissing);
    }
    if !conj_closed(s_points) || !conj_closed(v_points) {
        return Err(Error::NotConjClosed);
    }
    let mut points: Vec<PointSpec> =
        s_points.iter().map(|p| PointSpec::new(p.clone(), TargetKind::GaussianK, Role::Exceptional)).collect();
    for (i, p) in v_points.iter().enumerate() {
        let n = i as u32 + 1;
        points.push(PointSpec::new(p.clone(), TargetKind::PiPowerScaled(n), Role::Transcendental(n)));
    }
    let bundle = build_bundle(arity, &points, config)?;
    let psi = symmetrize(&bundle)?;
    let report = points
        .iter()
        .map(|p| {
            let value = psi.value(&p.coords).expect("input point has a value").clone();
            PointReport { coords: p.coords.clone(), role: p.role, verdict: transcendence_verdict(&value), value }
        })
        .collect();
    Ok(ExceptionalOutcome { bundle, psi, report })
}
