//! The invariant e of the cyclotomic tower data and the search for an
//! auxiliary prime ideal satisfying (H3) and (H4).

use super::{Character, Field, Ideal, Modulus, RayClassGroup};
use crate::error::{Error, Result};
use crate::padic::{angle, is_prime, PAdicInt, Zring};
use num_bigint::BigInt;
use num_traits::Zero;

/// (e, m_0): m_0 = 1 exactly for p = 2 over Q(sqrt 2) among the degrees
/// handled here, and e = m_0 + v_p(q).
pub fn compute_e(field: Field, p: u64) -> (u32, u32) {
    let m0 = if p == 2 && field == (Field::Quadratic { d: 2 }) {
        1
    } else {
        0
    };
    let vq = if p == 2 { 2 } else { 1 };
    (m0 + vq, m0)
}

/// Default ceiling for the auxiliary prime search.
pub const AUX_PRIME_CEILING: u64 = 20_000;

/// Smallest rational prime c, not dividing p, N(f), D_E, or any
/// representative norm, below a degree-one prime ideal at which the
/// character condition (H4) holds. Returns the prime ideal and c.
pub fn choose_aux_prime(
    field: Field,
    modulus: &Modulus,
    group: &RayClassGroup,
    chi: &Character,
    p: u64,
    e: u32,
    ceiling: u64,
) -> Result<(Ideal, u64)> {
    let mut excluded: Vec<BigInt> = vec![BigInt::from(p), modulus.f.norm(), field.discriminant()];
    for rep in group.reps() {
        excluded.push(rep.norm());
    }
    let mut c = 2u64;
    while c <= ceiling {
        if is_prime(c) && !excluded.iter().any(|n| (n % BigInt::from(c)).is_zero()) {
            for ideal in degree_one_primes_above(field, c) {
                if aux_condition_holds(group, chi, &ideal, c, p, e)? {
                    return Ok((ideal, c));
                }
            }
        }
        c += 1;
    }
    Err(Error::NoAdmissiblePrime(ceiling))
}

fn aux_condition_holds(
    group: &RayClassGroup,
    chi: &Character,
    ideal: &Ideal,
    c: u64,
    p: u64,
    e: u32,
) -> Result<bool> {
    if chi.is_trivial() {
        // <c> must not lie in 1 + p^(e+1) Z_p
        let work = Zring::new(p, e + 2);
        let a = angle(&PAdicInt::from_ring(work, c % work.pm))?;
        let pe1 = Zring::new(p, e + 1).pm;
        Ok(a.residue() % pe1 != 1 % pe1)
    } else {
        Ok(chi.exponent_on_ideal(group, ideal)? != 0)
    }
}

/// Degree-one prime ideals above c, in increasing theta-residue order.
pub fn degree_one_primes_above(field: Field, c: u64) -> Vec<Ideal> {
    match field {
        Field::Rational => vec![Ideal::Rational { n: BigInt::from(c) }],
        Field::Quadratic { .. } => {
            let (s, r) = field.theta_rel();
            let mut out = Vec::new();
            for t in 0..c {
                let val = (BigInt::from(t) * BigInt::from(t)
                    - &s * BigInt::from(t)
                    - &r)
                    % BigInt::from(c);
                if val.is_zero() {
                    if let Ok(ideal) = Ideal::prime_deg1(field, c, t) {
                        out.push(ideal);
                    }
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ray_class_group, Character, Modulus};

    #[test]
    fn e_values() {
        assert_eq!(compute_e(Field::Rational, 5), (1, 0));
        assert_eq!(compute_e(Field::quadratic(5).unwrap(), 7), (1, 0));
        assert_eq!(compute_e(Field::Rational, 2), (2, 0));
        assert_eq!(compute_e(Field::quadratic(2).unwrap(), 2), (3, 1));
        assert_eq!(compute_e(Field::quadratic(3).unwrap(), 2), (2, 0));
    }

    #[test]
    fn aux_prime_for_quadratic_character_mod_5() {
        let field = Field::Rational;
        let m = Modulus::new(field, Ideal::scalar(field, 5)).unwrap();
        let g = ray_class_group(field, &m).unwrap();
        let chi = Character::new(&g, 2, vec![1]).unwrap();
        let (ideal, c) = choose_aux_prime(field, &m, &g, &chi, 5, 1, AUX_PRIME_CEILING).unwrap();
        // (2|5) = -1 so c = 2 works
        assert_eq!(c, 2);
        assert_eq!(chi.exponent_on_ideal(&g, &ideal).unwrap(), 1);
        assert!(ideal.is_coprime_to(&m.f));
    }

    #[test]
    fn aux_prime_for_trivial_character_mod_5() {
        let field = Field::Rational;
        let m = Modulus::new(field, Ideal::scalar(field, 5)).unwrap();
        let g = ray_class_group(field, &m).unwrap();
        let chi = Character::trivial();
        let (_, c) = choose_aux_prime(field, &m, &g, &chi, 5, 1, AUX_PRIME_CEILING).unwrap();
        // <2> = 11 mod 125 is not in 1 + 25 Z_5
        assert_eq!(c, 2);
    }

    #[test]
    fn degree_one_primes_in_sqrt5() {
        let field = Field::quadratic(5).unwrap();
        // 11 = +-1 mod 5 splits; 2 and 3 are inert
        assert_eq!(degree_one_primes_above(field, 11).len(), 2);
        assert!(degree_one_primes_above(field, 2).is_empty());
        assert!(degree_one_primes_above(field, 3).is_empty());
        // ramified: 5
        assert_eq!(degree_one_primes_above(field, 5).len(), 1);
    }
}
