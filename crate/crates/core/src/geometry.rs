//! Hyperplanes through constraint points and the annihilator products built
//! from them.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gauss::{dot, GaussRat};
use crate::pi_expr::PiExpr;
use crate::poly::{ExpVec, MPoly};

/// The affine hyperplane `mu . z = lambda`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperplane {
    pub mu: Vec<GaussRat>,
    pub lambda: GaussRat,
}

impl Hyperplane {
    /// `mu . z - lambda`.
    pub fn residual(&self, z: &[GaussRat]) -> GaussRat {
        &dot(&self.mu, z) - &self.lambda
    }

    pub fn contains(&self, z: &[GaussRat]) -> bool {
        self.residual(z).is_zero()
    }

    pub fn linear_form(&self) -> MPoly {
        MPoly::linear_form(&self.mu, &self.lambda)
    }
}

fn is_origin(z: &[GaussRat]) -> bool {
    z.iter().all(GaussRat::is_zero)
}

/// Whether `u = t v` for some complex `t`.
pub fn is_complex_collinear(u: &[GaussRat], v: &[GaussRat]) -> Result<bool> {
    if u.len() != v.len() {
        return Err(Error::ArityMismatch { expected: v.len(), found: u.len() });
    }
    if is_origin(v) {
        return Err(Error::DegenerateDirection);
    }
    for i in 0..u.len() {
        for k in i + 1..u.len() {
            if &u[i] * &v[k] != &u[k] * &v[i] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Hyperplane through `point` that avoids `next` and the origin.
///
/// When `point` is not on the complex line through `next`, the plane is
/// parallel to that line (`mu . next = 0`). Otherwise its normal is the
/// Hermitian one, `mu = conj(next)`.
pub fn build_hyperplane(point: &[GaussRat], next: &[GaussRat]) -> Result<Hyperplane> {
    if point.len() != next.len() {
        return Err(Error::ArityMismatch { expected: next.len(), found: point.len() });
    }
    if is_origin(point) || is_origin(next) {
        return Err(Error::DegenerateConfiguration("hyperplane through the origin".into()));
    }
    if point == next {
        return Err(Error::DegenerateConfiguration("point coincides with the next point".into()));
    }
    let mu = if is_complex_collinear(point, next)? {
        next.iter().map(GaussRat::conj).collect()
    } else {
        parallel_normal(point, next)
    };
    let lambda = dot(&mu, point);
    debug_assert!(!lambda.is_zero());
    debug_assert!(dot(&mu, next) != lambda);
    Ok(Hyperplane { mu, lambda })
}

// Basis of {mu : mu . next = 0}: for each i != k, mu_k = next_i, mu_i = -next_k,
// where k is the first nonzero coordinate of next. The first basis vector not
// orthogonal to point is used; one exists since point is off the line C next.
fn parallel_normal(point: &[GaussRat], next: &[GaussRat]) -> Vec<GaussRat> {
    let k = next.iter().position(|x| !x.is_zero()).expect("nonzero direction");
    (0..next.len())
        .filter(|&i| i != k)
        .map(|i| {
            let mut mu = alloc::vec![GaussRat::zero(); next.len()];
            mu[k] = next[i].clone();
            mu[i] = -&next[k];
            mu
        })
        .find(|mu| !dot(mu, point).is_zero())
        .expect("non-collinear point has a separating normal")
}

/// `A_0 = z_1 ... z_m`.
pub fn coordinate_product(arity: usize) -> MPoly {
    MPoly::monomial(ExpVec::ones(arity), PiExpr::constant(GaussRat::from_i64(1, 0)))
}

/// The hyperplanes `π(n, j)`, one per point, all built against `next`.
pub fn annihilator_planes(points: &[Vec<GaussRat>], next: &[GaussRat]) -> Result<Vec<Hyperplane>> {
    for (i, p) in points.iter().enumerate() {
        if p.iter().any(GaussRat::is_zero) {
            return Err(Error::DegenerateConfiguration(format!("point {i} has a zero coordinate")));
        }
        if points[..i].contains(p) {
            return Err(Error::DegenerateConfiguration(format!("point {i} is repeated")));
        }
    }
    points.iter().map(|p| build_hyperplane(p, next)).collect()
}

/// Product of the linear forms of `planes`; the empty product is `1`.
pub fn product_of_planes(arity: usize, planes: &[Hyperplane]) -> MPoly {
    planes.iter().fold(MPoly::constant(arity, PiExpr::constant(GaussRat::from_i64(1, 0))), |acc, h| {
        acc.mul(&h.linear_form()).expect("planes share the arity")
    })
}

/// `A_n` for the given points against the witness `next`; `A_0` when `points` is empty.
pub fn build_annihilator(points: &[Vec<GaussRat>], next: &[GaussRat]) -> Result<MPoly> {
    if points.is_empty() {
        return Ok(coordinate_product(next.len()));
    }
    let planes = annihilator_planes(points, next)?;
    Ok(product_of_planes(next.len(), &planes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn pt(xs: &[(i64, i64)]) -> Vec<GaussRat> {
        xs.iter().map(|&(a, b)| GaussRat::from_i64(a, b)).collect()
    }

    fn val(p: &MPoly, z: &[GaussRat]) -> PiExpr {
        p.eval(z).unwrap()
    }

    fn c(re: i64) -> PiExpr {
        PiExpr::constant(GaussRat::from_i64(re, 0))
    }

    #[test]
    fn collinearity() {
        assert!(is_complex_collinear(&pt(&[(1, 0), (2, 0)]), &pt(&[(2, 0), (4, 0)])).unwrap());
        assert!(!is_complex_collinear(&pt(&[(1, 0), (0, 0)]), &pt(&[(0, 0), (1, 0)])).unwrap());
        assert!(is_complex_collinear(&pt(&[(0, 1), (1, 0)]), &pt(&[(1, 0), (0, -1)])).unwrap());
        assert_eq!(is_complex_collinear(&pt(&[(1, 0)]), &pt(&[(0, 0)])), Err(Error::DegenerateDirection));
    }

    #[test]
    fn hyperplane_examples() {
        let h = build_hyperplane(&pt(&[(1, 0)]), &pt(&[(2, 0)])).unwrap();
        assert_eq!(h, Hyperplane { mu: pt(&[(2, 0)]), lambda: GaussRat::from_i64(2, 0) });
        assert_eq!(dot(&h.mu, &pt(&[(2, 0)])), GaussRat::from_i64(4, 0));

        let h = build_hyperplane(&pt(&[(1, 0), (1, 0)]), &pt(&[(1, 0), (2, 0)])).unwrap();
        assert_eq!(h.mu, pt(&[(2, 0), (-1, 0)]));
        assert_eq!(h.lambda, GaussRat::from_i64(1, 0));
        assert!(dot(&h.mu, &pt(&[(1, 0), (2, 0)])).is_zero());

        let h = build_hyperplane(&pt(&[(2, 0), (2, 0)]), &pt(&[(1, 0), (1, 0)])).unwrap();
        assert_eq!(h.mu, pt(&[(1, 0), (1, 0)]));
        assert_eq!(h.lambda, GaussRat::from_i64(4, 0));
        assert!(!h.contains(&pt(&[(1, 0), (1, 0)])));

        // Complex collinear: (i, 1) = i (1, -i).
        let h = build_hyperplane(&pt(&[(0, 1), (1, 0)]), &pt(&[(1, 0), (0, -1)])).unwrap();
        assert_eq!(h.mu, pt(&[(1, 0), (0, 1)]));
        assert!(!h.lambda.is_zero());
    }

    #[test]
    fn hyperplane_rejects_degenerate_input() {
        let u = pt(&[(1, 0), (1, 0)]);
        assert!(matches!(build_hyperplane(&u, &u), Err(Error::DegenerateConfiguration(_))));
        assert!(matches!(build_hyperplane(&pt(&[(0, 0), (0, 0)]), &u), Err(Error::DegenerateConfiguration(_))));
    }

    #[test]
    fn annihilator_examples() {
        assert_eq!(build_annihilator(&[], &pt(&[(1, 0), (1, 0)])).unwrap(), coordinate_product(2));

        let a1 = build_annihilator(&[pt(&[(1, 0)])], &pt(&[(2, 0)])).unwrap();
        let expected = MPoly::linear_form(&pt(&[(2, 0)]), &GaussRat::from_i64(2, 0));
        assert_eq!(a1, expected);
        assert!(val(&a1, &pt(&[(1, 0)])).is_zero());
        assert_eq!(val(&a1, &pt(&[(0, 0)])), c(-2));
        assert_eq!(val(&a1, &pt(&[(2, 0)])), c(2));

        let a2 = build_annihilator(&[pt(&[(1, 0)]), pt(&[(2, 0)])], &pt(&[(3, 0)])).unwrap();
        let f1 = MPoly::linear_form(&pt(&[(3, 0)]), &GaussRat::from_i64(3, 0));
        let f2 = MPoly::linear_form(&pt(&[(3, 0)]), &GaussRat::from_i64(6, 0));
        assert_eq!(a2, f1.mul(&f2).unwrap());
        assert!(val(&a2, &pt(&[(1, 0)])).is_zero());
        assert!(val(&a2, &pt(&[(2, 0)])).is_zero());
        assert_eq!(val(&a2, &pt(&[(0, 0)])), c(18));
        assert_eq!(val(&a2, &pt(&[(3, 0)])), c(18));
    }

    fn nonzero_gauss() -> impl Strategy<Value = GaussRat> {
        (-4i64..=4, 1i64..=3, -4i64..=4, 1i64..=3)
            .prop_map(|(a, b, c, d)| GaussRat::new(rat(a, b), rat(c, d)))
            .prop_filter("nonzero", |g| !g.is_zero())
    }

    fn points(m: usize) -> impl Strategy<Value = Vec<Vec<GaussRat>>> {
        proptest::collection::vec(proptest::collection::vec(nonzero_gauss(), m), 2..6)
            .prop_filter("distinct", |ps| ps.iter().enumerate().all(|(i, p)| !ps[..i].contains(p)))
    }

    proptest! {
        #[test]
        fn annihilator_invariants(ps in (1usize..4).prop_flat_map(points)) {
            let m = ps[0].len();
            let (known, next) = ps.split_at(ps.len() - 1);
            let next = &next[0];
            let planes = annihilator_planes(known, next).unwrap();
            for (h, u) in planes.iter().zip(known) {
                prop_assert!(!h.lambda.is_zero());
                prop_assert!(h.contains(u));
                prop_assert!(!h.contains(next));
                if !is_complex_collinear(u, next).unwrap() {
                    prop_assert!(dot(&h.mu, next).is_zero());
                }
            }
            let a = product_of_planes(m, &planes);
            for u in known {
                prop_assert!(a.eval(u).unwrap().is_zero());
            }
            prop_assert!(!a.eval(&vec![GaussRat::zero(); m]).unwrap().is_zero());
            prop_assert!(!a.eval(next).unwrap().is_zero());
        }
    }
}
