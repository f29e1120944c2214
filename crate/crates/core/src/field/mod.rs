//! E = Q or a real quadratic field Q(sqrt D): exact element and ideal
//! arithmetic, totally positive units, moduli, ray class groups,
//! characters on them, and auxiliary-prime selection. Every embedding
//! comparison is an exact integer test; no floating point enters any
//! decision.

mod auxprime;
mod character;
mod ideal;
pub(crate) mod linalg;
mod rayclass;
mod units;

pub use auxprime::{choose_aux_prime, compute_e};
pub use character::{kappa_twist, Character, TwistedCharacter};
pub use ideal::Ideal;
pub use rayclass::{ray_class_group, Modulus, RayClassGroup};
pub use units::{fundamental_totally_positive_unit, fundamental_unit, unit_index};

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// The base field: the rationals or a real quadratic field of square-free
/// discriminant-core D > 1, with integral basis (1, theta) where
/// theta = (1 + sqrt D)/2 if D = 1 mod 4 and sqrt D otherwise.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Field {
    Rational,
    Quadratic { d: u64 },
}

impl Field {
    pub fn quadratic(d: u64) -> Result<Field> {
        if d <= 1 {
            return Err(Error::Invalid(format!("D = {d} must be > 1")));
        }
        let mut k = 2u64;
        while k * k <= d {
            if d % (k * k) == 0 {
                return Err(Error::Invalid(format!("D = {d} is not square-free")));
            }
            k += 1;
        }
        Ok(Field::Quadratic { d })
    }

    pub fn degree(&self) -> usize {
        match self {
            Field::Rational => 1,
            Field::Quadratic { .. } => 2,
        }
    }

    pub fn d(&self) -> Option<u64> {
        match self {
            Field::Rational => None,
            Field::Quadratic { d } => Some(*d),
        }
    }

    /// theta satisfies theta^2 = s theta + r.
    pub(crate) fn theta_rel(&self) -> (BigInt, BigInt) {
        match self {
            Field::Rational => (BigInt::zero(), BigInt::zero()),
            Field::Quadratic { d } => {
                if d % 4 == 1 {
                    (BigInt::one(), BigInt::from((d - 1) / 4))
                } else {
                    (BigInt::zero(), BigInt::from(*d))
                }
            }
        }
    }

    pub fn discriminant(&self) -> BigInt {
        match self {
            Field::Rational => BigInt::one(),
            Field::Quadratic { d } => {
                if d % 4 == 1 {
                    BigInt::from(*d)
                } else {
                    BigInt::from(4 * d)
                }
            }
        }
    }

    pub fn one(&self) -> FieldElem {
        FieldElem::from_integers(*self, 1, 0)
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::from_integers(*self, 0, 0)
    }

    pub fn theta(&self) -> FieldElem {
        FieldElem::from_integers(*self, 0, 1)
    }
}

/// Element a + b theta with exact rational coordinates (b = 0 over Q).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FieldElem {
    pub field: Field,
    pub a: BigRational,
    pub b: BigRational,
}

impl FieldElem {
    pub fn new(field: Field, a: BigRational, b: BigRational) -> FieldElem {
        if field == Field::Rational {
            assert!(b.is_zero(), "rational field elements have b = 0");
        }
        FieldElem { field, a, b }
    }

    pub fn from_integers(field: Field, a: i64, b: i64) -> FieldElem {
        FieldElem::new(
            field,
            BigRational::from_integer(BigInt::from(a)),
            BigRational::from_integer(BigInt::from(b)),
        )
    }

    pub fn from_bigints(field: Field, a: BigInt, b: BigInt) -> FieldElem {
        FieldElem::new(
            field,
            BigRational::from_integer(a),
            BigRational::from_integer(b),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    /// Integer coordinates when integral and small enough for the hot loops.
    pub fn to_i128_coords(&self) -> Option<(i128, i128)> {
        if !self.is_integral() {
            return None;
        }
        Some((
            self.a.to_integer().to_i128()?,
            self.b.to_integer().to_i128()?,
        ))
    }

    pub fn integer_coords(&self) -> Option<(BigInt, BigInt)> {
        if !self.is_integral() {
            return None;
        }
        Some((self.a.to_integer(), self.b.to_integer()))
    }

    pub fn add(&self, o: &FieldElem) -> FieldElem {
        assert_eq!(self.field, o.field);
        FieldElem::new(self.field, &self.a + &o.a, &self.b + &o.b)
    }

    pub fn sub(&self, o: &FieldElem) -> FieldElem {
        assert_eq!(self.field, o.field);
        FieldElem::new(self.field, &self.a - &o.a, &self.b - &o.b)
    }

    pub fn neg(&self) -> FieldElem {
        FieldElem::new(self.field, -self.a.clone(), -self.b.clone())
    }

    pub fn mul(&self, o: &FieldElem) -> FieldElem {
        assert_eq!(self.field, o.field);
        let (s, r) = self.field.theta_rel();
        let s = BigRational::from_integer(s);
        let r = BigRational::from_integer(r);
        // (a1 + b1 t)(a2 + b2 t) = a1 a2 + b1 b2 r + (a1 b2 + a2 b1 + b1 b2 s) t
        let bb = &self.b * &o.b;
        FieldElem::new(
            self.field,
            &self.a * &o.a + &bb * r,
            &self.a * &o.b + &o.a * &self.b + bb * s,
        )
    }

    pub fn mul_int(&self, k: i64) -> FieldElem {
        let kk = BigRational::from_integer(BigInt::from(k));
        FieldElem::new(self.field, &self.a * &kk, &self.b * &kk)
    }

    pub fn mul_bigint(&self, k: &BigInt) -> FieldElem {
        let kk = BigRational::from_integer(k.clone());
        FieldElem::new(self.field, &self.a * &kk, &self.b * &kk)
    }

    /// Galois conjugate: theta -> s - theta.
    pub fn conj(&self) -> FieldElem {
        match self.field {
            Field::Rational => self.clone(),
            Field::Quadratic { .. } => {
                let (s, _) = self.field.theta_rel();
                let s = BigRational::from_integer(s);
                FieldElem::new(self.field, &self.a + &self.b * s, -self.b.clone())
            }
        }
    }

    pub fn norm(&self) -> BigRational {
        match self.field {
            Field::Rational => self.a.clone(),
            Field::Quadratic { .. } => {
                let (s, r) = self.field.theta_rel();
                // N(a + b t) = a^2 + a b s - b^2 r
                &self.a * &self.a + &self.a * &self.b * BigRational::from_integer(s)
                    - &self.b * &self.b * BigRational::from_integer(r)
            }
        }
    }

    pub fn trace(&self) -> BigRational {
        match self.field {
            Field::Rational => self.a.clone(),
            Field::Quadratic { .. } => {
                let (s, _) = self.field.theta_rel();
                &self.a + &self.a + &self.b * BigRational::from_integer(s)
            }
        }
    }

    pub fn inv(&self) -> Result<FieldElem> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::Invalid("division by zero field element".into()));
        }
        let c = self.conj();
        Ok(FieldElem::new(self.field, &c.a / &n, &c.b / &n))
    }

    pub fn div(&self, o: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(&o.inv()?))
    }

    /// The embedding value as u + v sqrt(D); embedding 2 sends sqrt(D) to
    /// the positive root, embedding 1 to the negative one.
    fn surd_parts(&self, embedding: usize) -> (BigRational, BigRational) {
        match self.field {
            Field::Rational => (self.a.clone(), BigRational::zero()),
            Field::Quadratic { d } => {
                let half = BigRational::new(BigInt::one(), BigInt::from(2));
                let (u, v) = if d % 4 == 1 {
                    (&self.a + &self.b * &half, &self.b * &half)
                } else {
                    (self.a.clone(), self.b.clone())
                };
                match embedding {
                    2 => (u, v),
                    1 => (u, -v),
                    _ => panic!("embedding index must be 1 or 2"),
                }
            }
        }
    }

    /// Exact sign of the chosen real embedding.
    pub fn embedding_sign(&self, embedding: usize) -> Ordering {
        let (u, v) = self.surd_parts(embedding);
        surd_sign(&u, &v, self.field)
    }

    pub fn is_totally_positive(&self) -> bool {
        match self.field {
            Field::Rational => self.a.is_positive(),
            Field::Quadratic { .. } => {
                self.embedding_sign(1) == Ordering::Greater
                    && self.embedding_sign(2) == Ordering::Greater
            }
        }
    }

    /// Exact comparison of an embedding value with an integer.
    pub fn embedding_cmp_int(&self, embedding: usize, n: &BigInt) -> Ordering {
        let (u, v) = self.surd_parts(embedding);
        surd_sign(&(u - BigRational::from_integer(n.clone())), &v, self.field)
    }

    /// Exact comparison of two embedding values.
    pub fn embedding_cmp(&self, other: &FieldElem, embedding: usize) -> Ordering {
        self.sub(other).embedding_sign(embedding)
    }

    /// Exact floor of an embedding value.
    pub fn embedding_floor(&self, embedding: usize) -> BigInt {
        let (u, v) = self.surd_parts(embedding);
        // coarse bracket around u + v sqrt(D), then exact binary search
        let d = BigInt::from(self.field.d().unwrap_or(0));
        let sq = d.sqrt() + 1;
        let vmag = v.abs().ceil().to_integer() + 1;
        let base = u.floor().to_integer();
        let mut lo = &base - &vmag * &sq - 1;
        let mut hi = &base + &vmag * &sq + 1;
        // invariant: value >= lo, value < hi
        debug_assert_ne!(self.embedding_cmp_int(embedding, &lo), Ordering::Less);
        while &hi - &lo > BigInt::one() {
            let sum: BigInt = &lo + &hi;
            let mid = sum.div_floor(&BigInt::from(2));
            if self.embedding_cmp_int(embedding, &mid) == Ordering::Less {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    /// Exact ceiling of an embedding value.
    pub fn embedding_ceil(&self, embedding: usize) -> BigInt {
        -self.neg().embedding_floor(embedding)
    }

    /// Display form used in JSON dumps: "a" or "a+b*theta".
    pub fn coord_string(&self) -> String {
        if self.b.is_zero() {
            format!("{}", self.a)
        } else {
            format!("{}+{}*theta", self.a, self.b)
        }
    }
}

/// Exact sign of u + v sqrt(D) (sqrt(D) the positive root; D = 0 over Q).
fn surd_sign(u: &BigRational, v: &BigRational, field: Field) -> Ordering {
    let d = match field {
        Field::Rational => return u.cmp(&BigRational::zero()),
        Field::Quadratic { d } => BigInt::from(d),
    };
    let su = u.cmp(&BigRational::zero());
    let sv = v.cmp(&BigRational::zero());
    match (su, sv) {
        (Ordering::Equal, s) => s,
        (s, Ordering::Equal) => s,
        (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
        (Ordering::Less, Ordering::Less) => Ordering::Less,
        (Ordering::Greater, Ordering::Less) => {
            // sign of u^2 - v^2 D
            (u * u).cmp(&(v * v * BigRational::from_integer(d)))
        }
        (Ordering::Less, Ordering::Greater) => (v * v * BigRational::from_integer(d)).cmp(&(u * u)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Field {
        Field::quadratic(5).unwrap()
    }

    #[test]
    fn field_construction() {
        assert!(Field::quadratic(5).is_ok());
        assert!(Field::quadratic(12).is_err()); // 4 | 12
        assert!(Field::quadratic(1).is_err());
        assert_eq!(golden().discriminant(), BigInt::from(5));
        assert_eq!(Field::quadratic(2).unwrap().discriminant(), BigInt::from(8));
    }

    #[test]
    fn norm_trace_conj() {
        let f = golden();
        let theta = f.theta();
        assert_eq!(theta.norm(), BigRational::from_integer(BigInt::from(-1)));
        assert_eq!(theta.trace(), BigRational::from_integer(BigInt::from(1)));
        let x = FieldElem::from_integers(f, 2, 3); // 2 + 3 theta
        assert_eq!(x.mul(&x.conj()).a, x.norm());
        assert!(x.mul(&x.conj()).b.is_zero());
        // sqrt(2) over Q(sqrt 2)
        let f2 = Field::quadratic(2).unwrap();
        let r2 = f2.theta();
        assert_eq!(r2.norm(), BigRational::from_integer(BigInt::from(-2)));
        assert_eq!(r2.mul(&r2).a, BigRational::from_integer(BigInt::from(2)));
    }

    #[test]
    fn embedding_signs_exact() {
        let f = golden();
        // theta = (1+sqrt5)/2: embedding 2 positive, embedding 1 negative
        let theta = f.theta();
        assert_eq!(theta.embedding_sign(2), Ordering::Greater);
        assert_eq!(theta.embedding_sign(1), Ordering::Less);
        // 2 - theta: both embeddings positive (2 - 1.618, 2 + 0.618)
        let x = FieldElem::from_integers(f, 2, -1);
        assert!(x.is_totally_positive());
        // theta itself is not totally positive
        assert!(!theta.is_totally_positive());
        // eps_+ = 1 + theta = (3+sqrt5)/2
        let eps = FieldElem::from_integers(f, 1, 1);
        assert!(eps.is_totally_positive());
        assert_eq!(eps.embedding_cmp_int(2, &BigInt::from(1)), Ordering::Greater);
        assert_eq!(eps.embedding_cmp_int(1, &BigInt::from(1)), Ordering::Less);
    }

    #[test]
    fn floors_and_ceils() {
        let f = golden();
        let theta = f.theta(); // 1.618..., -0.618...
        assert_eq!(theta.embedding_floor(2), BigInt::from(1));
        assert_eq!(theta.embedding_floor(1), BigInt::from(-1));
        assert_eq!(theta.embedding_ceil(2), BigInt::from(2));
        assert_eq!(theta.embedding_ceil(1), BigInt::from(0));
        // integers floor to themselves
        let five = FieldElem::from_integers(f, 5, 0);
        assert_eq!(five.embedding_floor(1), BigInt::from(5));
        assert_eq!(five.embedding_ceil(1), BigInt::from(5));
        // ratio ceiling: ceil(7 / (1+theta)) at embedding 2 = ceil(7/2.618) = 3
        let seven = FieldElem::from_integers(f, 7, 0);
        let eps = FieldElem::from_integers(f, 1, 1);
        let ratio = seven.div(&eps).unwrap();
        assert_eq!(ratio.embedding_ceil(2), BigInt::from(3));
    }

    #[test]
    fn rational_field_elements() {
        let f = Field::Rational;
        let x = FieldElem::from_integers(f, -7, 0);
        assert_eq!(x.norm(), BigRational::from_integer(BigInt::from(-7)));
        assert!(!x.is_totally_positive());
        assert_eq!(x.embedding_floor(1), BigInt::from(-7));
    }
}
