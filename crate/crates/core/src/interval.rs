//! Rational-endpoint interval enclosures and magnitude certification.
//!
//! Everything here is exact: endpoints are rationals, so containment claims
//! hold without any rounding-mode reasoning. The only transcendental input
//! is π, enclosed by [`pi_enclosure`].

use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::gauss::GaussRat;
use crate::pi_expr::PiExpr;
use crate::rational::{dyadic, floor_scaled, Rat};

/// Closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    lo: Rat,
    hi: Rat,
}

impl RatInterval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Self { lo, hi }
    }

    pub fn point(x: Rat) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::point(Rat::zero())
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(Self { lo, hi })
    }

    pub fn scale(&self, k: &Rat) -> Self {
        if k.is_negative() {
            Self { lo: &self.hi * k, hi: &self.lo * k }
        } else {
            Self { lo: &self.lo * k, hi: &self.hi * k }
        }
    }

    /// `[lo - r, hi + r]` for `r >= 0`.
    pub fn inflate(&self, r: &Rat) -> Self {
        Self { lo: &self.lo - r, hi: &self.hi + r }
    }

    /// `max |x|` over the interval.
    pub fn abs_upper(&self) -> Rat {
        crate::rational::abs_max(&self.lo, &self.hi)
    }

    /// `min |x|` over the interval.
    pub fn abs_lower(&self) -> Rat {
        if self.lo.is_positive() {
            self.lo.clone()
        } else if self.hi.is_negative() {
            -&self.hi
        } else {
            Rat::zero()
        }
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn powi(&self, exp: u32) -> Self {
        (0..exp).fold(Self::point(Rat::one()), |acc, _| &acc * self)
    }
}

impl<'a> Add<&'a RatInterval> for &'a RatInterval {
    type Output = RatInterval;
    fn add(self, rhs: &RatInterval) -> RatInterval {
        RatInterval { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }
}

impl<'a> Sub<&'a RatInterval> for &'a RatInterval {
    type Output = RatInterval;
    fn sub(self, rhs: &RatInterval) -> RatInterval {
        RatInterval { lo: &self.lo - &rhs.hi, hi: &self.hi - &rhs.lo }
    }
}

impl Neg for &RatInterval {
    type Output = RatInterval;
    fn neg(self) -> RatInterval {
        RatInterval { lo: -&self.hi, hi: -&self.lo }
    }
}

impl<'a> Mul<&'a RatInterval> for &'a RatInterval {
    type Output = RatInterval;
    fn mul(self, rhs: &RatInterval) -> RatInterval {
        let products = [&self.lo * &rhs.lo, &self.lo * &rhs.hi, &self.hi * &rhs.lo, &self.hi * &rhs.hi];
        let lo = products.iter().min().unwrap().clone();
        let hi = products.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }
}

/// Axis-aligned box in the complex plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBox {
    pub re: RatInterval,
    pub im: RatInterval,
}

impl ComplexBox {
    pub fn point(z: &GaussRat) -> Self {
        Self { re: RatInterval::point(z.re.clone()), im: RatInterval::point(z.im.clone()) }
    }

    pub fn contains(&self, z: &GaussRat) -> bool {
        self.re.contains(&z.re) && self.im.contains(&z.im)
    }

    pub fn contains_box(&self, other: &Self) -> bool {
        self.re.contains_interval(&other.re) && self.im.contains_interval(&other.im)
    }

    pub fn inflate(&self, r: &Rat) -> Self {
        Self { re: self.re.inflate(r), im: self.im.inflate(r) }
    }

    pub fn width(&self) -> Rat {
        crate::rational::abs_max(&self.re.width(), &self.im.width())
    }

    pub fn midpoint(&self) -> GaussRat {
        GaussRat::new(self.re.midpoint(), self.im.midpoint())
    }

    /// Upper bound of `|z|^2` over the box.
    pub fn abs_sqr_upper(&self) -> Rat {
        let (a, b) = (self.re.abs_upper(), self.im.abs_upper());
        &a * &a + &b * &b
    }

    /// Lower bound of `|z|^2` over the box.
    pub fn abs_sqr_lower(&self) -> Rat {
        let (a, b) = (self.re.abs_lower(), self.im.abs_lower());
        &a * &a + &b * &b
    }
}

impl<'a> Add<&'a ComplexBox> for &'a ComplexBox {
    type Output = ComplexBox;
    fn add(self, rhs: &ComplexBox) -> ComplexBox {
        ComplexBox { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

/// Bracket for `arctan(1/x)` from `terms` and `terms + 1` partial sums of the
/// alternating series; the terms decrease, so the limit lies between them.
fn arctan_inv_bracket(x: u32, terms: usize) -> (Rat, Rat) {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = x.clone();
    let mut sum = Rat::zero();
    let mut prev = sum.clone();
    for k in 0..=terms {
        prev = sum.clone();
        let term = Rat::new(BigInt::one(), BigInt::from(2 * k + 1) * &power);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power *= &x2;
    }
    if prev < sum {
        (prev, sum)
    } else {
        (sum, prev)
    }
}

/// Raw Machin bracket `16 atan(1/5) - 4 atan(1/239)` with `terms` terms.
fn machin_bracket(terms: usize) -> (Rat, Rat) {
    let (lo5, hi5) = arctan_inv_bracket(5, terms);
    let (lo239, hi239) = arctan_inv_bracket(239, terms);
    let (k16, k4) = (Rat::from_integer(16.into()), Rat::from_integer(4.into()));
    (&k16 * &lo5 - &k4 * &hi239, &k16 * &hi5 - &k4 * &lo239)
}

/// Enclosure of π of width exactly `2^-precision` with dyadic endpoints.
///
/// The result is `[floor(π 2^p) / 2^p, (floor(π 2^p) + 1) / 2^p]`, which is
/// canonical: higher precisions are always nested inside lower ones.
pub fn pi_enclosure(precision: u32) -> RatInterval {
    assert!(precision >= 1, "precision must be positive");
    // Each term gains log2(25) > 4.6 bits.
    let mut terms = precision as usize / 4 + 2;
    loop {
        let (lo, hi) = machin_bracket(terms);
        let (flo, fhi) = (floor_scaled(&lo, precision), floor_scaled(&hi, precision));
        if flo == fhi {
            let next = &flo + BigInt::one();
            return RatInterval::new(dyadic(flo, precision), dyadic(next, precision));
        }
        terms += terms / 2 + 1;
    }
}

/// Precomputed enclosures of π^k at one precision.
#[derive(Clone, Debug)]
pub struct PiPowers {
    precision: u32,
    powers: Vec<RatInterval>,
}

impl PiPowers {
    pub fn new(precision: u32) -> Self {
        Self { precision, powers: alloc::vec![RatInterval::point(Rat::one()), pi_enclosure(precision)] }
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn pi(&self) -> &RatInterval {
        &self.powers[1]
    }

    fn power(&mut self, k: usize) -> &RatInterval {
        while self.powers.len() <= k {
            let next = self.powers.last().unwrap() * &self.powers[1];
            self.powers.push(next);
        }
        &self.powers[k]
    }

    pub fn enclose(&mut self, v: &PiExpr) -> ComplexBox {
        let mut re = RatInterval::zero();
        let mut im = RatInterval::zero();
        for (k, c) in v.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let p = self.power(k).clone();
            re = &re + &p.scale(&c.re);
            im = &im + &p.scale(&c.im);
        }
        ComplexBox { re, im }
    }
}

/// Box containing the complex value of `v` for every real π in
/// `pi_enclosure(precision)`.
pub fn enclose(v: &PiExpr, precision: u32) -> ComplexBox {
    if let Some(g) = v.as_gauss() {
        return ComplexBox::point(&g);
    }
    PiPowers::new(precision).enclose(v)
}

/// Outcome of a semidecidable magnitude test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certainty {
    Proved,
    Disproved,
    Undecided,
}

/// Starting precision for adaptive refinement.
pub const BASE_PRECISION: u32 = 64;

/// Default ceiling for adaptive refinement.
pub const DEFAULT_MAX_PRECISION: u32 = 1024;

/// Certifies `|v| < bound`, refining π from [`BASE_PRECISION`] up to `max_precision` bits.
pub fn cert_abs_lt(v: &PiExpr, bound: &Rat, max_precision: u32) -> Certainty {
    assert!(bound.is_positive(), "bound must be positive");
    let bound_sqr = bound * bound;
    if let Some(g) = v.as_gauss() {
        let n = g.norm_sqr();
        return match n.cmp(&bound_sqr) {
            core::cmp::Ordering::Less => Certainty::Proved,
            core::cmp::Ordering::Greater => Certainty::Disproved,
            core::cmp::Ordering::Equal => Certainty::Undecided,
        };
    }
    let mut p = BASE_PRECISION.min(max_precision.max(1));
    loop {
        let b = enclose(v, p);
        if b.abs_sqr_upper() < bound_sqr {
            return Certainty::Proved;
        }
        if b.abs_sqr_lower() > bound_sqr {
            return Certainty::Disproved;
        }
        if p >= max_precision {
            return Certainty::Undecided;
        }
        p = (2 * p).min(max_precision);
    }
}

/// Enclosure of `v` refined until its width is at most `target_width`, or
/// until `max_precision` is reached.
pub fn enclose_to_width(v: &PiExpr, target_width: &Rat, max_precision: u32) -> ComplexBox {
    if let Some(g) = v.as_gauss() {
        return ComplexBox::point(&g);
    }
    let mut p = BASE_PRECISION.min(max_precision.max(1));
    loop {
        let b = enclose(v, p);
        if &b.width() <= target_width || p >= max_precision {
            return b;
        }
        p = (2 * p).min(max_precision);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, pow2, rat};
    use proptest::prelude::*;

    // Published bound 3.14159265 < π < 3.14159266.
    fn pi_oracle() -> (Rat, Rat) {
        (rat(314159265, 100000000), rat(314159266, 100000000))
    }

    #[test]
    fn coarse_pi() {
        let e = pi_enclosure(2);
        let (lo, hi) = pi_oracle();
        assert!(e.lo() >= &int(3) && e.hi() <= &rat(13, 4));
        assert!(e.lo() < &lo && e.hi() > &hi);
    }

    #[test]
    fn fine_pi() {
        let e = pi_enclosure(10);
        let (lo, hi) = pi_oracle();
        assert!(e.width() <= rat(1, 1024));
        assert!(e.lo() < &lo && e.hi() > &hi);
        let e = pi_enclosure(200);
        assert_eq!(e.width(), pow2(-200));
        assert!(e.lo() > &lo && e.hi() < &hi);
    }

    #[test]
    fn nesting() {
        let mut prev = pi_enclosure(1);
        for p in 2..80 {
            let next = pi_enclosure(p);
            assert_eq!(prev.intersect(&next).as_ref(), Some(&next));
            assert!(next.width() <= prev.width());
            prev = next;
        }
    }

    #[test]
    fn enclose_examples() {
        let z = PiExpr::constant(GaussRat::from_i64(1, 1));
        let b = enclose(&z, 7);
        assert_eq!(b, ComplexBox::point(&GaussRat::from_i64(1, 1)));
        let b = enclose(&PiExpr::pi(), 12);
        assert_eq!(b.re, pi_enclosure(12));
        assert_eq!(b.im, RatInterval::zero());
        let v = &PiExpr::pi() - &PiExpr::constant(GaussRat::real(rat(22, 7)));
        for p in 12..40 {
            assert!(enclose(&v, p).re.is_negative(), "p = {p}");
        }
    }

    #[test]
    fn certification_examples() {
        let half = PiExpr::constant(GaussRat::real(rat(1, 2)));
        assert_eq!(cert_abs_lt(&half, &int(1), 64), Certainty::Proved);
        assert_eq!(cert_abs_lt(&PiExpr::pi(), &int(3), 64), Certainty::Disproved);
        let zero = &PiExpr::pi() - &PiExpr::pi();
        assert_eq!(cert_abs_lt(&zero, &rat(1, 1000), 64), Certainty::Proved);
        let one = PiExpr::constant(GaussRat::one());
        assert_eq!(cert_abs_lt(&one, &int(1), 64), Certainty::Undecided);
    }

    fn small_pi() -> impl Strategy<Value = PiExpr> {
        proptest::collection::vec((-9i64..=9, 1i64..=9, -9i64..=9, 1i64..=9), 0..4).prop_map(|cs| {
            PiExpr::from_coeffs(cs.into_iter().map(|(a, b, c, d)| GaussRat::new(rat(a, b), rat(c, d))).collect())
        })
    }

    proptest! {
        #[test]
        fn value_membership(v in small_pi(), p in 2u32..60, t in 0u32..=16) {
            let e = pi_enclosure(p);
            let pi_hat = e.lo() + &(e.width() * rat(t as i64, 16));
            prop_assert!(enclose(&v, p).contains(&v.evaluate_at(&pi_hat)));
        }

        #[test]
        fn certification_is_sound(v in small_pi(), num in 1i64..200, den in 1i64..20) {
            let bound = rat(num, den);
            let verdicts: Vec<_> = [64u32, 128, 256].iter().map(|&p| cert_abs_lt(&v, &bound, p)).collect();
            prop_assert!(!(verdicts.contains(&Certainty::Proved) && verdicts.contains(&Certainty::Disproved)));
        }
    }
}
