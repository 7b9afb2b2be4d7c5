//! Sparse multivariate polynomials with coefficients in Q(i)[π].

use alloc::collections::btree_map::{BTreeMap, Entry};
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gauss::GaussRat;
use crate::interval::PiPowers;
use crate::pi_expr::PiExpr;
use crate::rational::{sqrt_upper, Rat};

/// Exponent vector of a monomial.
///
/// Ordered by total degree ascending, then lexicographically descending, which
/// is the canonical term order used everywhere (including serialized files).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpVec(pub Vec<u32>);

impl ExpVec {
    pub fn zeros(arity: usize) -> Self {
        Self(alloc::vec![0; arity])
    }

    pub fn ones(arity: usize) -> Self {
        Self(alloc::vec![1; arity])
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn full_support(&self) -> bool {
        self.0.iter().all(|&e| e >= 1)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for ExpVec {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for ExpVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Vec<u32>> for ExpVec {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

/// All full-support exponent vectors of total degree `degree` in `arity`
/// variables, lexicographically descending. There are `C(degree-1, arity-1)`.
pub fn lex_monomials(degree: u32, arity: usize) -> Vec<ExpVec> {
    let mut out = Vec::new();
    if arity == 0 || (degree as usize) < arity {
        return out;
    }
    let mut prefix = Vec::with_capacity(arity);
    push_compositions(degree, arity, &mut prefix, &mut out);
    out
}

fn push_compositions(remaining: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<ExpVec>) {
    if slots == 1 {
        prefix.push(remaining);
        out.push(ExpVec(prefix.clone()));
        prefix.pop();
        return;
    }
    let max_first = remaining - (slots as u32 - 1);
    for first in (1..=max_first).rev() {
        prefix.push(first);
        push_compositions(remaining - first, slots - 1, prefix, out);
        prefix.pop();
    }
}

/// Sparse polynomial in `arity` variables; no stored coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    arity: usize,
    terms: BTreeMap<ExpVec, PiExpr>,
}

impl MPoly {
    pub fn zero(arity: usize) -> Self {
        assert!(arity >= 1, "polynomials need at least one variable");
        Self { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: PiExpr) -> Self {
        Self::monomial(ExpVec::zeros(arity), c)
    }

    pub fn monomial(exp: ExpVec, c: PiExpr) -> Self {
        let mut p = Self::zero(exp.arity());
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    /// The variable `z_{index}` (0-based).
    pub fn variable(arity: usize, index: usize) -> Self {
        let mut e = ExpVec::zeros(arity);
        e.0[index] = 1;
        Self::monomial(e, PiExpr::constant(GaussRat::from_i64(1, 0)))
    }

    /// Affine linear form `Σ coeffs_i z_i - rhs`.
    pub fn linear_form(coeffs: &[GaussRat], rhs: &GaussRat) -> Self {
        let arity = coeffs.len();
        let mut p = Self::constant(arity, PiExpr::constant(-rhs));
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = ExpVec::zeros(arity);
            e.0[i] = 1;
            p.add_term(e, &PiExpr::constant(c.clone()));
        }
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExpVec, &PiExpr)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &ExpVec) -> PiExpr {
        self.terms.get(exp).cloned().unwrap_or_else(PiExpr::zero)
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(ExpVec::degree)
    }

    /// Adds `c z^exp` in place.
    pub fn add_term(&mut self, exp: ExpVec, c: &PiExpr) {
        debug_assert_eq!(exp.arity(), self.arity);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: other.arity });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self { arity: self.arity, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = Self::zero(self.arity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.add(eb), &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, k: &PiExpr) -> Self {
        let mut out = Self::zero(self.arity);
        if k.is_zero() {
            return out;
        }
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &(c * k));
        }
        out
    }

    /// Multiplies by the monomial `z^exp`.
    pub fn shift(&self, exp: &ExpVec) -> Self {
        Self { arity: self.arity, terms: self.terms.iter().map(|(e, c)| (e.add(exp), c.clone())).collect() }
    }

    /// Exact value at a Gaussian-rational point.
    pub fn eval(&self, point: &[GaussRat]) -> Result<PiExpr> {
        if point.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: point.len() });
        }
        let max_exp = self.terms.keys().flat_map(|e| e.0.iter().copied()).max().unwrap_or(0) as usize;
        let powers: Vec<Vec<GaussRat>> = point
            .iter()
            .map(|x| {
                let mut row = Vec::with_capacity(max_exp + 1);
                row.push(GaussRat::from_i64(1, 0));
                for k in 0..max_exp {
                    let next = &row[k] * x;
                    row.push(next);
                }
                row
            })
            .collect();
        let mut acc = PiExpr::zero();
        for (e, c) in &self.terms {
            let mono = e.0.iter().enumerate().fold(GaussRat::from_i64(1, 0), |m, (i, &k)| &m * &powers[i][k as usize]);
            acc = &acc + &c.scalar_mul(&mono);
        }
        Ok(acc)
    }

    /// Sum of the terms of total degree exactly `degree`.
    pub fn homogeneous_layer(&self, degree: u32) -> Self {
        Self {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.degree() == degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Terms of total degree at most `degree`.
    pub fn truncate(&self, degree: u32) -> Self {
        Self {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.degree() <= degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Rational upper bound of the length `Σ |c|` of the polynomial.
    pub fn length_upper(&self, precision: u32) -> Rat {
        let mut pis = PiPowers::new(precision.max(1));
        self.terms.values().fold(Rat::zero(), |acc, c| {
            let abs_sqr = match c.as_gauss() {
                Some(g) => g.norm_sqr(),
                None => pis.enclose(c).abs_sqr_upper(),
            };
            acc + sqrt_upper(&abs_sqr, precision)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::enclose;
    use crate::rational::{binomial, int, rat, sqrt_upper};
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn c(re: i64) -> PiExpr {
        PiExpr::constant(GaussRat::from_i64(re, 0))
    }

    fn z(arity: usize, i: usize) -> MPoly {
        MPoly::variable(arity, i)
    }

    #[test]
    fn distributivity_example() {
        let z1z2 = z(2, 0).mul(&z(2, 1)).unwrap();
        let rhs = z(2, 0).scalar_mul(&c(2)).sub(&MPoly::constant(2, c(2))).unwrap();
        let prod = z1z2.mul(&rhs).unwrap();
        let mut expected = MPoly::zero(2);
        expected.add_term(ExpVec(vec![2, 1]), &c(2));
        expected.add_term(ExpVec(vec![1, 1]), &c(-2));
        assert_eq!(prod, expected);
        assert!(prod.add(&prod.scalar_mul(&c(-1))).unwrap().is_zero());
        let pz = z(2, 0).scalar_mul(&PiExpr::pi());
        assert_eq!(pz.coeff(&ExpVec(vec![1, 0])), PiExpr::pi());
        assert!(z(1, 0).add(&z(2, 0)).is_err());
    }

    #[test]
    fn evaluation() {
        let p = MPoly::linear_form(&[GaussRat::from_i64(2, 0)], &GaussRat::from_i64(2, 0));
        assert!(p.eval(&[GaussRat::from_i64(1, 0)]).unwrap().is_zero());
        let z1z2 = z(2, 0).mul(&z(2, 1)).unwrap();
        assert!(z1z2.eval(&[GaussRat::zero(), GaussRat::new(rat(7, 3), rat(-1, 2))]).unwrap().is_zero());
        let piz = z(1, 0).scalar_mul(&PiExpr::pi());
        assert_eq!(piz.eval(&[GaussRat::from_i64(2, 0)]).unwrap(), PiExpr::monomial(GaussRat::from_i64(2, 0), 1));
        assert!(piz.eval(&[GaussRat::zero(), GaussRat::zero()]).is_err());
    }

    #[test]
    fn layers() {
        let mut p = MPoly::zero(2);
        p.add_term(ExpVec(vec![2, 1]), &c(2));
        p.add_term(ExpVec(vec![1, 1]), &c(-2));
        assert_eq!(p.homogeneous_layer(3), MPoly::monomial(ExpVec(vec![2, 1]), c(2)));
        let sum = (0..=3).fold(MPoly::zero(2), |acc, d| acc.add(&p.homogeneous_layer(d)).unwrap());
        assert_eq!(sum, p);
        assert!(MPoly::constant(2, c(5)).homogeneous_layer(1).is_zero());
    }

    // Independent generator: every vector in [1, d]^m, filtered by sum, sorted.
    fn brute_force_monomials(d: u32, m: usize) -> Vec<Vec<u32>> {
        let mut all = Vec::new();
        let total = (d as usize).pow(m as u32);
        for mut code in 0..total {
            let mut v = Vec::with_capacity(m);
            for _ in 0..m {
                v.push((code % d as usize) as u32 + 1);
                code /= d as usize;
            }
            if v.iter().sum::<u32>() == d {
                all.push(v);
            }
        }
        all.sort_by(|a, b| b.cmp(a));
        all
    }

    #[test]
    fn lex_examples() {
        let got: Vec<Vec<u32>> = lex_monomials(4, 2).into_iter().map(|e| e.0).collect();
        assert_eq!(got, vec![vec![3, 1], vec![2, 2], vec![1, 3]]);
        assert_eq!(lex_monomials(3, 3), vec![ExpVec::ones(3)]);
        assert_eq!(lex_monomials(5, 3).len(), 6);
        assert!(lex_monomials(2, 3).is_empty());
    }

    #[test]
    fn lex_matches_brute_force() {
        for m in 1..=4usize {
            for d in m as u32..=12 {
                let got: Vec<Vec<u32>> = lex_monomials(d, m).into_iter().map(|e| e.0).collect();
                assert_eq!(got, brute_force_monomials(d, m), "d={d} m={m}");
                assert_eq!(got.len(), binomial(d as u64 - 1, m as u64 - 1).to_usize().unwrap());
            }
        }
    }

    #[test]
    fn canonical_term_order() {
        let mut p = MPoly::zero(2);
        for e in [[0, 0], [1, 2], [2, 1], [0, 1], [1, 0], [3, 0]] {
            p.add_term(ExpVec(e.to_vec()), &c(1));
        }
        let order: Vec<Vec<u32>> = p.terms().map(|(e, _)| e.0.clone()).collect();
        assert_eq!(order, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![3, 0], vec![2, 1], vec![1, 2]]);
    }

    #[test]
    fn length_examples() {
        let p = MPoly::linear_form(&[GaussRat::from_i64(2, 0)], &GaussRat::from_i64(2, 0));
        assert_eq!(p.length_upper(20), int(4));
        assert_eq!(MPoly::zero(3).length_upper(20), int(0));
        let l = z(1, 0).scalar_mul(&PiExpr::pi()).length_upper(20);
        assert!(l >= rat(314159, 100000) && l <= rat(31416, 10000) + rat(1, 100000));
    }

    fn small_gauss() -> impl Strategy<Value = GaussRat> {
        (-3i64..=3, 1i64..=3, -3i64..=3, 1i64..=3).prop_map(|(a, b, c, d)| GaussRat::new(rat(a, b), rat(c, d)))
    }

    fn small_poly(arity: usize) -> impl Strategy<Value = MPoly> {
        proptest::collection::vec((proptest::collection::vec(0u32..3, arity), small_gauss(), 0usize..2), 0..5).prop_map(
            move |terms| {
                let mut p = MPoly::zero(arity);
                for (e, g, k) in terms {
                    p.add_term(ExpVec(e), &PiExpr::monomial(g, k));
                }
                p
            },
        )
    }

    fn homogeneous(arity: usize, degree: u32) -> impl Strategy<Value = MPoly> {
        proptest::collection::vec((small_gauss(), 0usize..2), 1..4).prop_map(move |cs| {
            let mut p = MPoly::zero(arity);
            let basis: Vec<Vec<u32>> = brute_force_all(degree, arity);
            for (i, (g, k)) in cs.into_iter().enumerate() {
                p.add_term(ExpVec(basis[i % basis.len()].clone()), &PiExpr::monomial(g, k));
            }
            p
        })
    }

    fn brute_force_all(d: u32, m: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let total = (d as usize + 1).pow(m as u32);
        for mut code in 0..total {
            let mut v = Vec::with_capacity(m);
            for _ in 0..m {
                v.push((code % (d as usize + 1)) as u32);
                code /= d as usize + 1;
            }
            if v.iter().sum::<u32>() == d {
                out.push(v);
            }
        }
        out
    }

    proptest! {
        #[test]
        fn mul_commutes_and_associates(a in small_poly(2), b in small_poly(2), c in small_poly(2)) {
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        }

        #[test]
        fn eval_is_homomorphism(a in small_poly(2), b in small_poly(2), u in proptest::collection::vec(small_gauss(), 2)) {
            let lhs = a.mul(&b).unwrap().eval(&u).unwrap();
            prop_assert_eq!(lhs, &a.eval(&u).unwrap() * &b.eval(&u).unwrap());
            prop_assert_eq!(a.add(&b).unwrap().eval(&u).unwrap(), &a.eval(&u).unwrap() + &b.eval(&u).unwrap());
        }

        #[test]
        fn length_bounds_homogeneous_values(p in homogeneous(2, 3), u in proptest::collection::vec(small_gauss(), 2)) {
            let prec = 64;
            let value = enclose(&p.eval(&u).unwrap(), prec);
            let norm = u.iter().map(|x| sqrt_upper(&x.norm_sqr(), 40)).fold(int(1), |a, b| if b > a { b } else { a });
            let bound = p.length_upper(prec) * norm.pow(3);
            prop_assert!(value.abs_sqr_upper() <= &bound * &bound);
        }
    }
}
