//! Stagewise construction of `f*`.
//!
//! Stage `n` first steers the value at `u_n` into its target set with a
//! multiple of `z_1^n z_2 ... z_m A_{n-1}` (just `A_0` at stage 1), then
//! finalizes every coefficient of degree `n + m - 1` with multiples of
//! `z^j A_n`. Because `A_n` vanishes at `u_1, ..., u_n`, neither step moves
//! earlier pinned values, and the additions of later stages start in higher
//! degree, so finalized layers never change again.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gauss::GaussRat;
use crate::geometry::{annihilator_planes, coordinate_product, product_of_planes, Hyperplane};
use crate::interval::{cert_abs_lt, Certainty, DEFAULT_MAX_PRECISION};
use crate::pi_expr::PiExpr;
use crate::poly::{lex_monomials, ExpVec, MPoly};
use crate::rational::{binomial, factorial, Rat};
use crate::target::{abs_lower, choice_rng, select, SelectionPolicy, SelectionRequest, Target};

/// `s_d = 1 / (C(d-1, m-1) d!)`.
pub fn s_bound(d: u32, m: usize) -> Rat {
    assert!(m >= 1 && d as usize >= m, "s_bound needs d >= m >= 1");
    let denom = binomial(d as u64 - 1, m as u64 - 1) * factorial(d as u64);
    Rat::new(BigInt::one(), denom)
}

/// Bound on `|δ_{n,0}|`: `s_{n+m-1} / (n+m-1)`.
pub fn delta_bound(n: usize, m: usize) -> Rat {
    let d = (n + m - 1) as u32;
    s_bound(d, m) / Rat::from_integer(BigInt::from(d))
}

/// A point together with the set its value must land in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintPoint {
    pub coords: Vec<GaussRat>,
    pub target: Target,
}

impl ConstraintPoint {
    pub fn new(coords: Vec<GaussRat>, target: Target) -> Self {
        Self { coords, target }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SteeringConfig {
    pub seed: u64,
    pub policy: SelectionPolicy,
    pub max_precision: u32,
}

impl Default for SteeringConfig {
    fn default() -> Self {
        Self { seed: 0, policy: SelectionPolicy::default(), max_precision: DEFAULT_MAX_PRECISION }
    }
}

/// One coefficient finalization: `δ z^monomial A` was added, leaving `coefficient`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correction {
    pub monomial: ExpVec,
    pub delta: PiExpr,
    pub coefficient: GaussRat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRecord {
    pub n: usize,
    pub point: Vec<GaussRat>,
    /// `Θ_n`.
    pub offset: PiExpr,
    /// `Θ_n + f*_{n-1}(u_n)`.
    pub center: PiExpr,
    /// Value of the steering multiplier at `u_n`.
    pub multiplier: GaussRat,
    pub delta0: PiExpr,
    pub delta_bound: Rat,
    /// Element of the underlying target set that was hit.
    pub target_element: PiExpr,
    /// `Θ_n + f*(u_n)`.
    pub pinned_value: PiExpr,
    pub annihilator_prev: MPoly,
    /// Set by finalization.
    pub witness: Option<Vec<GaussRat>>,
    pub planes: Vec<Hyperplane>,
    pub annihilator_cur: Option<MPoly>,
    pub corrections: Vec<Correction>,
}

impl StageRecord {
    pub fn degree(&self) -> u32 {
        (self.n + self.point.len() - 1) as u32
    }

    pub fn is_finalized(&self) -> bool {
        self.annihilator_cur.is_some()
    }
}

/// A layer finalized after the last stage, using the last annihilator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeLayerRecord {
    pub degree: u32,
    pub corrections: Vec<Correction>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionState {
    arity: usize,
    points: Vec<ConstraintPoint>,
    offsets: Vec<PiExpr>,
    config: SteeringConfig,
    stages: Vec<StageRecord>,
    free_layers: Vec<FreeLayerRecord>,
    fstar: MPoly,
    finalized_degree: u32,
}

impl ConstructionState {
    /// Validates the inputs; no stage is run yet.
    pub fn new(
        arity: usize,
        points: Vec<ConstraintPoint>,
        offsets: Vec<PiExpr>,
        config: SteeringConfig,
    ) -> Result<Self> {
        if arity == 0 {
            return Err(Error::DegenerateConfiguration("arity must be positive".into()));
        }
        if offsets.len() != points.len() {
            return Err(Error::ArityMismatch { expected: points.len(), found: offsets.len() });
        }
        for (i, p) in points.iter().enumerate() {
            if p.coords.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, found: p.coords.len() });
            }
            if p.coords.iter().any(GaussRat::is_zero) {
                return Err(Error::ZeroCoordinate { index: i });
            }
            if points[..i].iter().any(|q| q.coords == p.coords) {
                return Err(Error::DuplicatePoint(i));
            }
        }
        Ok(Self {
            arity,
            points,
            offsets,
            config,
            stages: Vec::new(),
            free_layers: Vec::new(),
            fstar: MPoly::zero(arity),
            finalized_degree: arity as u32 - 1,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn points(&self) -> &[ConstraintPoint] {
        &self.points
    }

    pub fn offsets(&self) -> &[PiExpr] {
        &self.offsets
    }

    pub fn config(&self) -> &SteeringConfig {
        &self.config
    }

    pub fn stages(&self) -> &[StageRecord] {
        &self.stages
    }

    pub fn free_layers(&self) -> &[FreeLayerRecord] {
        &self.free_layers
    }

    pub fn fstar(&self) -> &MPoly {
        &self.fstar
    }

    pub fn finalized_degree(&self) -> u32 {
        self.finalized_degree
    }

    /// The finalized part of `f*`: every term of degree `<= finalized_degree`.
    pub fn prefix(&self) -> MPoly {
        self.fstar.truncate(self.finalized_degree)
    }

    /// `Θ_j + f*(u_j)` as fixed at stage `j` (1-based).
    pub fn pinned_value(&self, j: usize) -> Result<PiExpr> {
        j.checked_sub(1)
            .and_then(|i| self.stages.get(i))
            .map(|s| s.pinned_value.clone())
            .ok_or(Error::StageOutOfRange(j))
    }

    /// Multiplier of stage `n`'s steering term.
    pub fn steering_multiplier(&self, n: usize, prev: &MPoly) -> MPoly {
        if n == 1 {
            return prev.clone();
        }
        let mut e = ExpVec::ones(self.arity);
        e.0[0] = n as u32;
        prev.shift(&e)
    }

    /// A copy with one coefficient of `f*` overwritten; the stage records are
    /// untouched. Used to exercise the verifier.
    pub fn with_coefficient(&self, exp: &ExpVec, value: PiExpr) -> Self {
        let mut out = self.clone();
        let old = out.fstar.coeff(exp);
        out.fstar.add_term(exp.clone(), &(&value - &old));
        out
    }

    /// Steers the value at `u_n` into its target set.
    pub fn stage_advance(&mut self, n: usize) -> Result<()> {
        if n == 0 || n != self.stages.len() + 1 || n > self.points.len() {
            return Err(Error::StageOutOfRange(n));
        }
        if !self.free_layers.is_empty() || self.stages.last().is_some_and(|s| !s.is_finalized()) {
            return Err(Error::StageOutOfRange(n));
        }
        let m = self.arity;
        let point = self.points[n - 1].clone();
        let prev = match self.stages.last() {
            None => coordinate_product(m),
            Some(s) => s.annihilator_cur.clone().expect("finalized"),
        };
        let mult_poly = self.steering_multiplier(n, &prev);
        let multiplier = mult_poly.eval(&point.coords)?.as_gauss().expect("annihilators have π-free coefficients");
        assert!(!multiplier.is_zero(), "steering multiplier vanishes at the stage point");

        let offset = self.offsets[n - 1].clone();
        let center = &offset + &self.fstar.eval(&point.coords)?;
        let bound = delta_bound(n, m);
        let radius = &bound * abs_lower(&multiplier);
        let inv = multiplier.inv()?;
        let max_precision = self.config.max_precision;
        let mut rng = choice_rng(self.config.seed, stream(n as u64, 0));
        let selection = select(
            &point.target,
            SelectionRequest {
                center: &center,
                radius: &radius,
                policy: self.config.policy,
                rng: &mut rng,
                max_precision,
                stage: n,
            },
            |w| cert_abs_lt(&(w - &center).scalar_mul(&inv), &bound, max_precision),
        )?;
        let delta0 = (&selection.value - &center).scalar_mul(&inv);
        self.fstar = self.fstar.add(&mult_poly.scalar_mul(&delta0))?;
        debug_assert_eq!(&offset + &self.fstar.eval(&point.coords)?, selection.value);

        self.stages.push(StageRecord {
            n,
            point: point.coords,
            offset,
            center,
            multiplier,
            delta0,
            delta_bound: bound,
            target_element: selection.element,
            pinned_value: selection.value,
            annihilator_prev: prev,
            witness: None,
            planes: Vec::new(),
            annihilator_cur: None,
            corrections: Vec::new(),
        });
        Ok(())
    }

    /// Builds `A_n` and lands every coefficient of degree `n + m - 1` in `K`.
    pub fn finalize_degree(&mut self, n: usize) -> Result<()> {
        if n == 0 || n != self.stages.len() || self.stages[n - 1].is_finalized() {
            return Err(Error::StageOutOfRange(n));
        }
        let m = self.arity;
        let witness = match self.points.get(n) {
            Some(p) => p.coords.clone(),
            None => self.synthetic_witness(),
        };
        let coords: Vec<Vec<GaussRat>> = self.points[..n].iter().map(|p| p.coords.clone()).collect();
        let planes = annihilator_planes(&coords, &witness)?;
        let annihilator = product_of_planes(m, &planes);
        let d = (n + m - 1) as u32;
        let corrections = self.finalize_layer(d, &annihilator, stream(n as u64, 1))?;

        let stage = &mut self.stages[n - 1];
        stage.witness = Some(witness);
        stage.planes = planes;
        stage.annihilator_cur = Some(annihilator);
        stage.corrections = corrections;
        self.finalized_degree = d;
        Ok(())
    }

    /// Finalizes further layers up to `degree` after the last stage. No stage
    /// can run afterwards.
    pub fn extend_to_degree(&mut self, degree: u32) -> Result<()> {
        if self.stages.last().is_some_and(|s| !s.is_finalized()) {
            return Err(Error::StageOutOfRange(self.stages.len()));
        }
        let closing = match self.stages.last() {
            Some(s) => s.annihilator_cur.clone().expect("finalized"),
            None => MPoly::constant(self.arity, PiExpr::one()),
        };
        while self.finalized_degree < degree {
            let d = self.finalized_degree + 1;
            let corrections = self.finalize_layer(d, &closing, stream(1 << 31 | d as u64, 1))?;
            self.free_layers.push(FreeLayerRecord { degree: d, corrections });
            self.finalized_degree = d;
        }
        Ok(())
    }

    fn finalize_layer(&mut self, d: u32, annihilator: &MPoly, first_stream: u64) -> Result<Vec<Correction>> {
        let m = self.arity;
        let a0 = annihilator.coeff(&ExpVec::zeros(m)).as_gauss().expect("annihilators have π-free coefficients");
        assert!(!a0.is_zero(), "annihilator vanishes at the origin");
        let a0_inv = a0.inv()?;
        let s = s_bound(d, m);
        let half = &s / Rat::from_integer(BigInt::from(2));
        let max_precision = self.config.max_precision;
        let stage = self.stages.len();
        let mut corrections = Vec::new();
        for (l, e) in lex_monomials(d, m).into_iter().enumerate() {
            let old = self.fstar.coeff(&e);
            if let Some(g) = old.as_gauss().filter(|g| g.in_k()) {
                if cert_abs_lt(&old, &s, max_precision) == Certainty::Proved {
                    corrections.push(Correction { monomial: e, delta: PiExpr::zero(), coefficient: g });
                    continue;
                }
            }
            let (center, radius) = if cert_abs_lt(&old, &half, max_precision) == Certainty::Proved {
                (old.clone(), half.clone())
            } else {
                (PiExpr::zero(), s.clone())
            };
            let mut rng = choice_rng(self.config.seed, first_stream + l as u64);
            let k = select(
                &Target::gaussian_k(),
                SelectionRequest {
                    center: &center,
                    radius: &radius,
                    policy: self.config.policy,
                    rng: &mut rng,
                    max_precision,
                    stage,
                },
                |w| cert_abs_lt(w, &s, max_precision),
            )?
            .value;
            let delta = (&k - &old).scalar_mul(&a0_inv);
            self.fstar = self.fstar.add(&annihilator.shift(&e).scalar_mul(&delta))?;
            let coefficient = self.fstar.coeff(&e).as_gauss().expect("landed coefficient is π-free");
            debug_assert_eq!(PiExpr::constant(coefficient.clone()), k);
            corrections.push(Correction { monomial: e, delta, coefficient });
        }
        Ok(corrections)
    }

    /// First `(w, 1, ..., 1)` with `w = 2, 3, ...` that is not an input point.
    fn synthetic_witness(&self) -> Vec<GaussRat> {
        (2i64..)
            .map(|w| {
                let mut v = alloc::vec![GaussRat::one(); self.arity];
                v[0] = GaussRat::from_i64(w, 0);
                v
            })
            .find(|v| self.points.iter().all(|p| &p.coords != v))
            .expect("infinitely many candidates")
    }
}

fn stream(stage: u64, slot: u64) -> u64 {
    stage << 32 | slot
}

/// Runs `n_stages` stages, finalizing each.
pub fn run(
    arity: usize,
    points: Vec<ConstraintPoint>,
    offsets: Vec<PiExpr>,
    config: SteeringConfig,
    n_stages: usize,
) -> Result<ConstructionState> {
    if n_stages > points.len() {
        return Err(Error::NotEnoughPoints { requested: n_stages, available: points.len() });
    }
    let mut state = ConstructionState::new(arity, points, offsets, config)?;
    for n in 1..=n_stages {
        state.stage_advance(n)?;
        state.finalize_degree(n)?;
    }
    Ok(state)
}
