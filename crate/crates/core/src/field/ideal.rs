//! Integral ideals as canonical 2x2 upper-triangular HNF lattices over
//! the fixed integral basis (1, theta); a bare positive integer over Q.

use super::linalg::hnf_rank2;
use super::{Field, FieldElem};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub enum Ideal {
    Rational {
        n: BigInt,
    },
    /// Z a + Z (b + c theta) with a, c > 0 and 0 <= b < a.
    Quadratic {
        field: Field,
        a: BigInt,
        b: BigInt,
        c: BigInt,
    },
}

impl Ideal {
    pub fn scalar(field: Field, n: i64) -> Ideal {
        Ideal::scalar_big(field, BigInt::from(n))
    }

    pub fn scalar_big(field: Field, n: BigInt) -> Ideal {
        let n = n.abs();
        assert!(!n.is_zero(), "zero ideal not supported");
        match field {
            Field::Rational => Ideal::Rational { n },
            Field::Quadratic { .. } => Ideal::Quadratic {
                field,
                a: n.clone(),
                b: BigInt::zero(),
                c: n,
            },
        }
    }

    pub fn principal(alpha: &FieldElem) -> Result<Ideal> {
        Ideal::from_generators(alpha.field, std::slice::from_ref(alpha))
    }

    /// Module closure of the generators under multiplication by theta.
    pub fn from_generators(field: Field, gens: &[FieldElem]) -> Result<Ideal> {
        match field {
            Field::Rational => {
                let mut g = BigInt::zero();
                for e in gens {
                    if !e.is_integral() {
                        return Err(Error::Invalid("ideal generators must be integral".into()));
                    }
                    g = g.gcd(&e.a.to_integer());
                }
                if g.is_zero() {
                    return Err(Error::Invalid("zero ideal".into()));
                }
                Ok(Ideal::Rational { n: g })
            }
            Field::Quadratic { .. } => {
                let theta = field.theta();
                let mut cols = Vec::with_capacity(gens.len() * 2);
                for e in gens {
                    for elem in [e.clone(), e.mul(&theta)] {
                        let (x, y) = elem
                            .integer_coords()
                            .ok_or_else(|| Error::Invalid("ideal generators must be integral".into()))?;
                        cols.push((x, y));
                    }
                }
                let (a, b, c) =
                    hnf_rank2(&cols).ok_or_else(|| Error::Invalid("zero ideal".into()))?;
                Ok(Ideal::Quadratic { field, a, b, c })
            }
        }
    }

    /// The degree-one prime (r, theta - t) with theta = t mod the ideal.
    pub fn prime_deg1(field: Field, r: u64, t: u64) -> Result<Ideal> {
        match field {
            Field::Rational => Ok(Ideal::Rational { n: BigInt::from(r) }),
            Field::Quadratic { .. } => {
                let gen1 = FieldElem::from_integers(field, r as i64, 0);
                let gen2 = FieldElem::from_integers(field, -(t as i64), 1);
                let ideal = Ideal::from_generators(field, &[gen1, gen2])?;
                if ideal.norm() != BigInt::from(r) {
                    return Err(Error::Invalid(format!(
                        "theta = {t} is not a root of its minimal polynomial mod {r}"
                    )));
                }
                Ok(ideal)
            }
        }
    }

    pub fn field(&self) -> Field {
        match self {
            Ideal::Rational { .. } => Field::Rational,
            Ideal::Quadratic { field, .. } => *field,
        }
    }

    pub fn norm(&self) -> BigInt {
        match self {
            Ideal::Rational { n } => n.clone(),
            Ideal::Quadratic { a, c, .. } => a * c,
        }
    }

    pub fn norm_u64(&self) -> Result<u64> {
        self.norm()
            .to_u64()
            .ok_or_else(|| Error::BoundExceeded("ideal norm exceeds u64".into()))
    }

    /// Z-basis of the ideal as field elements.
    pub fn basis(&self) -> (FieldElem, FieldElem) {
        match self {
            Ideal::Rational { n } => {
                let e = FieldElem::from_bigints(Field::Rational, n.clone(), BigInt::zero());
                (e.clone(), e)
            }
            Ideal::Quadratic { field, a, b, c } => (
                FieldElem::from_bigints(*field, a.clone(), BigInt::zero()),
                FieldElem::from_bigints(*field, b.clone(), c.clone()),
            ),
        }
    }

    pub fn contains(&self, alpha: &FieldElem) -> bool {
        if !alpha.is_integral() {
            return false;
        }
        match self {
            Ideal::Rational { n } => (alpha.a.to_integer() % n).is_zero(),
            Ideal::Quadratic { a, b, c, .. } => {
                let (x, y) = alpha.integer_coords().unwrap();
                if !(&y % c).is_zero() {
                    return false;
                }
                let k = &y / c;
                ((x - k * b) % a).is_zero()
            }
        }
    }

    pub fn mul(&self, other: &Ideal) -> Ideal {
        match (self, other) {
            (Ideal::Rational { n }, Ideal::Rational { n: m }) => Ideal::Rational { n: n * m },
            (Ideal::Quadratic { field, .. }, Ideal::Quadratic { field: f2, .. }) => {
                assert_eq!(field, f2);
                let (u1, u2) = self.basis();
                let (v1, v2) = other.basis();
                let gens = [u1.mul(&v1), u1.mul(&v2), u2.mul(&v1), u2.mul(&v2)];
                Ideal::from_generators(*field, &gens).expect("product of nonzero ideals")
            }
            _ => panic!("ideal field mismatch"),
        }
    }

    /// Sum of ideals (gcd); used for coprimality and divisibility tests.
    pub fn sum(&self, other: &Ideal) -> Ideal {
        match (self, other) {
            (Ideal::Rational { n }, Ideal::Rational { n: m }) => Ideal::Rational { n: n.gcd(m) },
            (Ideal::Quadratic { field, .. }, Ideal::Quadratic { .. }) => {
                let (u1, u2) = self.basis();
                let (v1, v2) = other.basis();
                Ideal::from_generators(*field, &[u1, u2, v1, v2]).expect("sum of nonzero ideals")
            }
            _ => panic!("ideal field mismatch"),
        }
    }

    pub fn is_coprime_to(&self, other: &Ideal) -> bool {
        self.sum(other).norm().is_one()
    }

    /// self | other, i.e. other is contained in self.
    pub fn divides(&self, other: &Ideal) -> bool {
        let (b1, b2) = other.basis();
        self.contains(&b1) && self.contains(&b2)
    }

    /// For a degree-one prime (c entry 1): the residue t with
    /// theta = t mod the ideal.
    pub fn theta_residue(&self) -> Option<u64> {
        match self {
            Ideal::Rational { .. } => None,
            Ideal::Quadratic { a, b, c, .. } => {
                if c.is_one() {
                    Some((-b).mod_floor(a).to_u64().expect("desk-scale prime"))
                } else {
                    None
                }
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Ideal::Rational { n } => format!("({n})"),
            Ideal::Quadratic { a, b, c, .. } => format!("[{a}, {b}+{c}*theta]"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Field {
        Field::quadratic(5).unwrap()
    }

    #[test]
    fn scalar_and_norm() {
        let i = Ideal::scalar(f5(), 7);
        assert_eq!(i.norm(), BigInt::from(49));
        let j = Ideal::scalar(Field::Rational, -6);
        assert_eq!(j.norm(), BigInt::from(6));
    }

    #[test]
    fn principal_norm_matches_element_norm() {
        let f = f5();
        for (a, b) in [(3i64, 1i64), (2, -5), (7, 0), (1, 1)] {
            let alpha = FieldElem::from_integers(f, a, b);
            let ideal = Ideal::principal(&alpha).unwrap();
            let n = alpha.norm().to_integer().abs();
            assert_eq!(ideal.norm(), n, "alpha = {a}+{b}theta");
            assert!(ideal.contains(&alpha));
            assert!(ideal.contains(&alpha.mul(&f.theta())));
        }
    }

    #[test]
    fn degree_one_prime_over_11() {
        // theta^2 - theta - 1 = 0 mod 11 has roots 4 and 8
        let f = f5();
        let p = Ideal::prime_deg1(f, 11, 4).unwrap();
        assert_eq!(p.norm(), BigInt::from(11));
        assert_eq!(p.theta_residue(), Some(4));
        // theta - 4 is in the ideal
        assert!(p.contains(&FieldElem::from_integers(f, -4, 1)));
        assert!(!p.contains(&FieldElem::from_integers(f, -5, 1)));
        // a non-root is rejected
        assert!(Ideal::prime_deg1(f, 11, 5).is_err());
    }

    #[test]
    fn products_and_coprimality() {
        let f = f5();
        let p11a = Ideal::prime_deg1(f, 11, 4).unwrap();
        let p11b = Ideal::prime_deg1(f, 11, 8).unwrap();
        assert!(p11a != p11b);
        // conjugate primes multiply to (11)
        assert_eq!(p11a.mul(&p11b), Ideal::scalar(f, 11));
        assert!(p11a.is_coprime_to(&p11b));
        assert!(!p11a.is_coprime_to(&Ideal::scalar(f, 11)));
        assert!(Ideal::scalar(f, 7).is_coprime_to(&Ideal::scalar(f, 11)));
    }

    #[test]
    fn divisibility() {
        let f = f5();
        let q = Ideal::scalar(f, 5);
        let f20 = Ideal::scalar(f, 20);
        assert!(q.divides(&f20));
        assert!(!f20.divides(&q));
        let r = Ideal::Rational {
            n: BigInt::from(5),
        };
        let r20 = Ideal::Rational {
            n: BigInt::from(20),
        };
        assert!(r.divides(&r20));
    }
}
