//! The ring Q(i)[π] with π kept as a formal real symbol.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::Result;
use crate::gauss::GaussRat;

/// `Σ_k coeffs[k] π^k`, stored without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PiExpr {
    coeffs: Vec<GaussRat>,
}

impl PiExpr {
    pub fn from_coeffs(mut coeffs: Vec<GaussRat>) -> Self {
        while coeffs.last().is_some_and(GaussRat::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant(c: GaussRat) -> Self {
        Self::from_coeffs(alloc::vec![c])
    }

    /// `c π^k`.
    pub fn monomial(c: GaussRat, k: usize) -> Self {
        let mut coeffs = alloc::vec![GaussRat::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn pi() -> Self {
        Self::monomial(GaussRat::one(), 1)
    }

    pub fn coeffs(&self) -> &[GaussRat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> GaussRat {
        self.coeffs.get(k).cloned().unwrap_or_else(GaussRat::zero)
    }

    /// Exact symbolic zero test.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest π-power with a nonzero coefficient; `None` for zero.
    pub fn pi_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_pi_free(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// The value as a Gaussian rational when no π-power occurs.
    pub fn as_gauss(&self) -> Option<GaussRat> {
        match self.coeffs.len() {
            0 => Some(GaussRat::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    /// If the expression is exactly `q π^k`, returns `(q, k)`.
    pub fn as_monomial(&self) -> Option<(GaussRat, usize)> {
        let k = self.pi_degree()?;
        self.coeffs[..k].iter().all(GaussRat::is_zero).then(|| (self.coeffs[k].clone(), k))
    }

    pub fn conj(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(GaussRat::conj).collect() }
    }

    pub fn scalar_mul(&self, k: &GaussRat) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn scalar_div(&self, k: &GaussRat) -> Result<Self> {
        Ok(self.scalar_mul(&k.inv()?))
    }

    /// Substitutes a rational stand-in for π.
    pub fn evaluate_at(&self, pi: &crate::rational::Rat) -> GaussRat {
        self.coeffs.iter().rev().fold(GaussRat::zero(), |acc, c| &acc.scale(pi) + c)
    }

    /// Real part, coefficientwise (π is real).
    pub fn re(&self) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| GaussRat::real(c.re.clone())).collect())
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&GaussRat, &GaussRat) -> GaussRat) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = GaussRat::zero();
        let coeffs =
            (0..n).map(|k| f(self.coeffs.get(k).unwrap_or(&zero), rhs.coeffs.get(k).unwrap_or(&zero))).collect();
        Self::from_coeffs(coeffs)
    }
}

impl From<GaussRat> for PiExpr {
    fn from(c: GaussRat) -> Self {
        Self::constant(c)
    }
}

impl Zero for PiExpr {
    fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        PiExpr::is_zero(self)
    }
}

impl One for PiExpr {
    fn one() -> Self {
        Self::constant(GaussRat::one())
    }
}

impl<'a> Add<&'a PiExpr> for &'a PiExpr {
    type Output = PiExpr;
    fn add(self, rhs: &PiExpr) -> PiExpr {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<'a> Sub<&'a PiExpr> for &'a PiExpr {
    type Output = PiExpr;
    fn sub(self, rhs: &PiExpr) -> PiExpr {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<'a> Mul<&'a PiExpr> for &'a PiExpr {
    type Output = PiExpr;
    fn mul(self, rhs: &PiExpr) -> PiExpr {
        if self.is_zero() || rhs.is_zero() {
            return PiExpr::zero();
        }
        let mut coeffs = alloc::vec![GaussRat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        PiExpr::from_coeffs(coeffs)
    }
}

impl Neg for &PiExpr {
    type Output = PiExpr;
    fn neg(self) -> PiExpr {
        PiExpr { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Add for PiExpr {
    type Output = PiExpr;
    fn add(self, rhs: PiExpr) -> PiExpr {
        &self + &rhs
    }
}

impl Sub for PiExpr {
    type Output = PiExpr;
    fn sub(self, rhs: PiExpr) -> PiExpr {
        &self - &rhs
    }
}

impl Mul for PiExpr {
    type Output = PiExpr;
    fn mul(self, rhs: PiExpr) -> PiExpr {
        &self * &rhs
    }
}

impl Neg for PiExpr {
    type Output = PiExpr;
    fn neg(self) -> PiExpr {
        -&self
    }
}

impl fmt::Display for PiExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})π")?,
                _ => write!(f, "({c})π^{k}")?,
            }
        }
        Ok(())
    }
}
