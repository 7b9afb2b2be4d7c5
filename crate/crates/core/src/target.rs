//! Target sets and the deterministic choice of admissible elements in them.
//!
//! Every dense target set is searched on dyadic grids. A grid level fixes a
//! step `2^-j`; the candidate on that level is taken just above the current
//! center (plus a seeded offset under [`SelectionPolicy::Seeded`]), and the
//! level is refined until the caller's magnitude certificate succeeds.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::gauss::GaussRat;
use crate::interval::{enclose_to_width, pi_enclosure, Certainty, ComplexBox, RatInterval};
use crate::pi_expr::PiExpr;
use crate::rational::{abs_max, ceil_log2, dyadic, floor_scaled, pow2, Rat};

/// Number of grid refinements tried before giving up.
pub const MAX_RESELECTIONS: u32 = 64;

/// The dense set a constrained value must land in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetKind {
    /// `K = Q* + iQ`.
    GaussianK,
    /// `K · π^n`.
    PiPowerScaled(u32),
    /// A single prescribed value; only usable when it lies in the admissible ball.
    ExplicitValue(PiExpr),
}

impl TargetKind {
    /// Exact membership of `t` in the set.
    pub fn contains(&self, t: &PiExpr) -> bool {
        match self {
            TargetKind::GaussianK => t.as_gauss().is_some_and(|g| g.in_k()),
            TargetKind::PiPowerScaled(n) => t.as_monomial().is_some_and(|(q, k)| k == *n as usize && q.in_k()),
            TargetKind::ExplicitValue(v) => t == v,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TargetKind::GaussianK => "gaussian-k",
            TargetKind::PiPowerScaled(_) => "pi-power",
            TargetKind::ExplicitValue(_) => "explicit",
        }
    }
}

/// A target set pulled back through `w = (t - offset) / scale`.
///
/// The identity pullback is the plain set. Subfunctions steer their values
/// inside `(E - Θ) / ∏α` this way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Target {
    pub kind: TargetKind,
    pub offset: PiExpr,
    pub scale: GaussRat,
}

impl Target {
    pub fn new(kind: TargetKind) -> Self {
        Self { kind, offset: PiExpr::zero(), scale: GaussRat::one() }
    }

    pub fn gaussian_k() -> Self {
        Self::new(TargetKind::GaussianK)
    }

    pub fn pullback(kind: TargetKind, offset: PiExpr, scale: GaussRat) -> Self {
        assert!(!scale.is_zero(), "pullback scale must be nonzero");
        Self { kind, offset, scale }
    }

    pub fn is_identity(&self) -> bool {
        self.offset.is_zero() && self.scale.is_one()
    }

    /// Maps a value `w` to the underlying set element `t = offset + scale * w`.
    pub fn push_forward(&self, w: &PiExpr) -> PiExpr {
        &self.offset + &w.scalar_mul(&self.scale)
    }

    fn pull_back(&self, t: &PiExpr) -> PiExpr {
        (t - &self.offset).scalar_div(&self.scale).expect("nonzero scale")
    }
}

/// How the free choices of the construction are resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SelectionPolicy {
    /// First grid point strictly above the center, on dyadic grids of step
    /// `1/2, 1/4, ...`; does not consult the seed.
    SmallestDenominator,
    /// Grid points at a seed-dependent offset from the center.
    #[default]
    Seeded,
}

impl SelectionPolicy {
    pub fn name(self) -> &'static str {
        match self {
            SelectionPolicy::SmallestDenominator => "smallest-denominator",
            SelectionPolicy::Seeded => "seeded",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "smallest-denominator" => Some(SelectionPolicy::SmallestDenominator),
            "seeded" => Some(SelectionPolicy::Seeded),
            _ => None,
        }
    }
}

/// Deterministic generator for one choice slot of a seeded run.
pub fn choice_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A selected value `w` and the set element `t` it corresponds to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    pub value: PiExpr,
    pub element: PiExpr,
}

/// Everything a selection needs besides the target itself.
pub struct SelectionRequest<'a> {
    pub center: &'a PiExpr,
    /// Rational lower bound on the admissible distance from `center`.
    pub radius: &'a Rat,
    pub policy: SelectionPolicy,
    pub rng: &'a mut ChaCha8Rng,
    pub max_precision: u32,
    /// Stage index reported on failure.
    pub stage: usize,
}

/// Lower bound of `|z|` that is cheap and exact.
pub fn abs_lower(z: &GaussRat) -> Rat {
    abs_max(&z.re, &z.im)
}

/// Picks `w` with `push_forward(w)` in the target set, `w != center` and
/// `accept(w)` proved.
pub fn select(
    target: &Target,
    req: SelectionRequest<'_>,
    mut accept: impl FnMut(&PiExpr) -> Certainty,
) -> Result<Selection> {
    let SelectionRequest { center, radius, policy, rng, max_precision, stage } = req;
    let set_center = target.push_forward(center);
    let set_radius = radius * abs_lower(&target.scale);

    if let TargetKind::ExplicitValue(t) = &target.kind {
        let w = target.pull_back(t);
        if !(&w - center).is_zero() && accept(&w) == Certainty::Proved {
            return Ok(Selection { value: w, element: t.clone() });
        }
        return Err(Error::TargetUnreachable { stage });
    }

    let pi_power = match target.kind {
        TargetKind::PiPowerScaled(n) => n,
        _ => 0,
    };
    let mut level = base_level(&set_radius) + 2 * pi_power as i64;
    if policy == SelectionPolicy::Seeded {
        level += 2;
    }
    for _ in 0..MAX_RESELECTIONS {
        let bits = level as u32;
        let scaled_center = scaled_center_box(&set_center, pi_power, bits, max_precision);
        let q = grid_candidate(&scaled_center, bits, policy, rng);
        level += 1;
        let element = PiExpr::monomial(q, pi_power as usize);
        let w = target.pull_back(&element);
        if (&w - center).is_zero() {
            continue;
        }
        if accept(&w) == Certainty::Proved {
            return Ok(Selection { value: w, element });
        }
    }
    Err(Error::SteeringStuck { stage })
}

/// Finest level `j >= 1` with `2^-j <= radius / 2`.
fn base_level(radius: &Rat) -> i64 {
    if !radius.is_positive() {
        return 1;
    }
    (1 + ceil_log2(&(Rat::one() / radius))).max(1)
}

/// Box around `center / π^k`, tight relative to the grid step `2^-bits`.
fn scaled_center_box(center: &PiExpr, pi_power: u32, bits: u32, max_precision: u32) -> ComplexBox {
    let width = pow2(-(bits as i64) - 4);
    let b = enclose_to_width(center, &width, max_precision);
    if pi_power == 0 {
        return b;
    }
    let precision = (bits + 8 + 2 * pi_power).max(64);
    let pis = pi_enclosure(precision).powi(pi_power);
    let inv = RatInterval::new(Rat::one() / pis.hi(), Rat::one() / pis.lo());
    ComplexBox { re: &b.re * &inv, im: &b.im * &inv }
}

fn grid_candidate(center: &ComplexBox, bits: u32, policy: SelectionPolicy, rng: &mut ChaCha8Rng) -> GaussRat {
    let (re_step, im_step) = match policy {
        SelectionPolicy::SmallestDenominator => (1, 0),
        SelectionPolicy::Seeded => (1 + (rng.next_u32() % 3) as i64, (rng.next_u32() % 3) as i64 - 1),
    };
    let mut re = floor_scaled(center.re.hi(), bits) + BigInt::from(re_step);
    if re.is_zero() {
        re = BigInt::one();
    }
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    let im = floor_scaled(&(center.im.midpoint() + half / Rat::from_integer(BigInt::one() << bits as usize)), bits)
        + BigInt::from(im_step);
    GaussRat::new(dyadic(re, bits), dyadic(im, bits))
}
