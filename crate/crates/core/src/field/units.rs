//! Fundamental units of real quadratic fields by the continued fraction
//! of theta, the totally positive generator eps_+, unit indices modulo an
//! ideal, and brute-force principal generator search inside a proven
//! unit-fundamental-domain box.

use super::{Field, FieldElem, Ideal};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

/// Fundamental unit of Z_E (norm +1 or -1), normalized so its second
/// embedding exceeds 1. Found along the continued fraction convergents
/// of theta; the first convergent combination of norm +-1 is fundamental.
pub fn fundamental_unit(field: Field) -> Result<FieldElem> {
    let d = field
        .d()
        .ok_or_else(|| Error::Invalid("units: quadratic field required".into()))?;
    let db = BigInt::from(d);
    let s = db.sqrt(); // floor sqrt, D not a square
    let (mut p, mut q) = if d % 4 == 1 {
        (BigInt::one(), BigInt::from(2))
    } else {
        (BigInt::zero(), BigInt::one())
    };
    // convergent seeds: h_{-2} = 0, h_{-1} = 1; l_{-2} = 1, l_{-1} = 0
    let (mut h_prev, mut h_cur) = (BigInt::zero(), BigInt::one());
    let (mut l_prev, mut l_cur) = (BigInt::one(), BigInt::zero());
    // theta = (P + sqrt D)/Q at the start; standard surd iteration
    for _ in 0..1_000_000u64 {
        let a = (&p + &s).div_floor(&q);
        let (h_next, l_next) = (&a * &h_cur + &h_prev, &a * &l_cur + &l_prev);
        h_prev = std::mem::replace(&mut h_cur, h_next);
        l_prev = std::mem::replace(&mut l_cur, l_next);
        // candidate h - l * conj(theta)
        let theta = field.theta();
        let cand = FieldElem::from_bigints(field, h_cur.clone(), BigInt::zero())
            .sub(&theta.conj().mul_bigint(&l_cur));
        let n = cand.norm();
        if n.is_integer() && n.to_integer().abs().is_one() {
            return Ok(normalize_above_one(cand));
        }
        let p_next = &a * &q - &p;
        let q_next = (&db - &p_next * &p_next) / &q;
        p = p_next;
        q = q_next;
    }
    Err(Error::Internal(
        "continued fraction did not produce a unit".into(),
    ))
}

fn normalize_above_one(mut u: FieldElem) -> FieldElem {
    if u.embedding_sign(2) == Ordering::Less {
        u = u.neg();
    }
    if u.embedding_cmp_int(2, &BigInt::one()) == Ordering::Less {
        u = u.inv().expect("unit is invertible");
        // the inverse of a unit has denominator +-1 only
        assert!(u.is_integral());
    }
    assert_eq!(u.embedding_cmp_int(2, &BigInt::one()), Ordering::Greater);
    u
}

/// Generator eps_+ of the totally positive units, oriented so that
/// eps_+^(2) > 1 > eps_+^(1) > 0.
pub fn fundamental_totally_positive_unit(field: Field) -> Result<FieldElem> {
    let eps = fundamental_unit(field)?;
    let n = eps.norm().to_integer();
    let mut ep = if n == BigInt::from(-1) {
        eps.mul(&eps)
    } else if eps.is_totally_positive() {
        eps
    } else {
        eps.neg()
    };
    // orientation: norm 1 and total positivity leave exactly one embedding
    // above 1; make it the second
    if ep.embedding_cmp_int(2, &BigInt::one()) == Ordering::Less {
        ep = ep.conj();
    }
    assert!(ep.is_totally_positive());
    assert!(ep.norm().is_one());
    assert_eq!(ep.embedding_cmp_int(2, &BigInt::one()), Ordering::Greater);
    assert_eq!(ep.embedding_cmp_int(1, &BigInt::one()), Ordering::Less);
    Ok(ep)
}

/// Least i >= 1 with eps_+^i = 1 mod f; eps_m := eps_+^i generates
/// U_m(E) for the modulus with finite part f (all real places ramified).
pub fn unit_index(field: Field, f: &Ideal) -> Result<u64> {
    if field == Field::Rational {
        return Ok(1);
    }
    let eps = fundamental_totally_positive_unit(field)?;
    let one = field.one();
    let mut w = eps.clone();
    for i in 1..=1_000_000u64 {
        if f.contains(&w.sub(&one)) {
            return Ok(i);
        }
        w = reduce_elem_mod(f, &w.mul(&eps));
    }
    Err(Error::BoundExceeded(
        "unit index exceeds search ceiling".into(),
    ))
}

/// Reduce an integral element modulo the ideal lattice, keeping it
/// congruent; used so repeated unit powers stay small.
fn reduce_elem_mod(f: &Ideal, w: &FieldElem) -> FieldElem {
    let (x, y) = w.integer_coords().expect("integral element");
    let (rx, ry) = f.reduce_coords(&x, &y);
    FieldElem::from_bigints(w.field, rx, ry)
}

/// Search for a generator of the ideal inside the box derived from one
/// eps_+-fundamental domain; None proves the ideal non-principal.
pub fn principal_generator(ideal: &Ideal, eps_plus: &FieldElem) -> Option<FieldElem> {
    let field = ideal.field();
    match field {
        Field::Rational => {
            let Ideal::Rational { n } = ideal else {
                unreachable!()
            };
            Some(FieldElem::from_bigints(field, n.clone(), BigInt::zero()))
        }
        Field::Quadratic { d } => {
            let n = ideal.norm();
            // |alpha^(i)| <= sqrt(n) * eps_+^(2) for a suitable unit multiple
            let ep_ceil = eps_plus.embedding_ceil(2) + 1;
            let s = n.sqrt() + 1;
            let bound = &s * &ep_ceil;
            let sqd = BigInt::from(d).sqrt();
            let y_bound: BigInt = (&bound * 2) / &sqd + 1;
            let theta_ceil = BigInt::from(d).sqrt() + 2;
            let x_bound: BigInt = &bound + &y_bound * &theta_ceil + 2;
            let mut y = -y_bound.clone();
            while y <= y_bound {
                let mut x = -x_bound.clone();
                while x <= x_bound {
                    if !x.is_zero() || !y.is_zero() {
                        let alpha = FieldElem::from_bigints(field, x.clone(), y.clone());
                        if alpha.norm().to_integer().abs() == n && ideal.contains(&alpha) {
                            return Some(alpha);
                        }
                    }
                    x += 1;
                }
                y += 1;
            }
            None
        }
    }
}

impl Ideal {
    /// Canonical residue of coordinates modulo the ideal lattice.
    pub fn reduce_coords(&self, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
        match self {
            Ideal::Rational { n } => (x.mod_floor(n), BigInt::zero()),
            Ideal::Quadratic { a, b, c, .. } => {
                let ry = y.mod_floor(c);
                let k = (y - &ry) / c;
                let rx = (x - k * b).mod_floor(a);
                (rx, ry)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fundamental_units_of_small_fields() {
        // D=5: eps = theta (golden ratio), norm -1
        let f5 = Field::quadratic(5).unwrap();
        let e5 = fundamental_unit(f5).unwrap();
        assert_eq!(e5, f5.theta());
        // D=2: eps = 1 + sqrt(2)
        let f2 = Field::quadratic(2).unwrap();
        let e2 = fundamental_unit(f2).unwrap();
        assert_eq!(e2, FieldElem::from_integers(f2, 1, 1));
        // D=13: eps = 1 + theta = (3+sqrt 13)/2
        let f13 = Field::quadratic(13).unwrap();
        let e13 = fundamental_unit(f13).unwrap();
        assert_eq!(e13, FieldElem::from_integers(f13, 1, 1));
        // D=3: eps = 2 + sqrt(3), norm +1
        let f3 = Field::quadratic(3).unwrap();
        let e3 = fundamental_unit(f3).unwrap();
        assert_eq!(e3, FieldElem::from_integers(f3, 2, 1));
        assert!(e3.norm().is_one());
    }

    #[test]
    fn totally_positive_units() {
        // D=5: eps_+ = eps^2 = (3+sqrt5)/2 = 1 + theta
        let f5 = Field::quadratic(5).unwrap();
        let ep = fundamental_totally_positive_unit(f5).unwrap();
        assert_eq!(ep, FieldElem::from_integers(f5, 1, 1));
        // D=2: eps_+ = (1+sqrt2)^2 = 3 + 2 sqrt2
        let f2 = Field::quadratic(2).unwrap();
        let ep2 = fundamental_totally_positive_unit(f2).unwrap();
        assert_eq!(ep2, FieldElem::from_integers(f2, 3, 2));
        // D=13: eps_+ = eps^2 = (11+3sqrt13)/2 = 4 + 3 theta
        let f13 = Field::quadratic(13).unwrap();
        let ep13 = fundamental_totally_positive_unit(f13).unwrap();
        assert_eq!(ep13.norm().to_integer(), BigInt::from(1));
        assert_eq!(ep13, FieldElem::from_integers(f13, 4, 3));
    }

    #[test]
    fn unit_index_mod_7_over_sqrt5() {
        // order of eps_+ in (Z_E/7)^x: eps has order 16 in F_49, eps_+ = eps^2
        let f5 = Field::quadratic(5).unwrap();
        let i = unit_index(f5, &Ideal::scalar(f5, 7)).unwrap();
        assert_eq!(i, 8);
        // trivial modulus
        assert_eq!(unit_index(f5, &Ideal::scalar(f5, 1)).unwrap(), 1);
        // postcondition recheck: eps_+^i = 1 mod f
        let ep = fundamental_totally_positive_unit(f5).unwrap();
        let mut w = f5.one();
        for _ in 0..i {
            w = w.mul(&ep);
        }
        assert!(Ideal::scalar(f5, 7).contains(&w.sub(&f5.one())));
    }

    #[test]
    fn brute_force_unit_index_confirmation() {
        // independent route: multiplicative order of eps_+ among all powers
        let f5 = Field::quadratic(5).unwrap();
        let f = Ideal::scalar(f5, 7);
        let ep = fundamental_totally_positive_unit(f5).unwrap();
        let one = f5.one();
        let mut w = ep.clone();
        let mut order = 0;
        for i in 1..=200u64 {
            if f.contains(&w.sub(&one)) {
                order = i;
                break;
            }
            w = w.mul(&ep);
        }
        assert_eq!(order, unit_index(f5, &f).unwrap());
    }

    #[test]
    fn principal_generator_search() {
        let f5 = Field::quadratic(5).unwrap();
        let ep = fundamental_totally_positive_unit(f5).unwrap();
        // (11, theta - 4) is principal in class number one
        let p11 = Ideal::prime_deg1(f5, 11, 4).unwrap();
        let g = principal_generator(&p11, &ep).expect("h = 1");
        assert_eq!(g.norm().to_integer().abs(), BigInt::from(11));
        assert!(p11.contains(&g));
        assert_eq!(Ideal::principal(&g).unwrap(), p11);
    }
}
