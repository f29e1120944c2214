//! Exact cone-series derivatives: the truncated series F_N(C, Xi; T)
//! built over exact cyclotomic rationals, differentiated with the
//! (1+T) d/dT operator and traced down to Q. Together with the Hurwitz
//! route this yields two independent exact values for every moment the
//! p-adic engine produces.

use super::bernoulli::hurwitz_partial_zeta;
use super::exact::{ExactCyc, ExactCycRing};
use crate::error::{Error, Result};
use crate::shintani::Cone;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::sync::Arc;

/// The auxiliary-prime context on the exact side: c and the residues of
/// the integral basis (1, theta) modulo the chosen degree-one prime.
#[derive(Clone, Debug)]
pub struct ExactAux {
    pub c: u64,
    pub t: Vec<u64>,
}

impl ExactAux {
    /// Additive character exponent of an integral element.
    pub fn exponent(&self, x: &BigInt, y: &BigInt) -> u64 {
        let c = BigInt::from(self.c);
        let mut acc = x * BigInt::from(self.t[0]);
        if self.t.len() > 1 {
            acc += y * BigInt::from(self.t[1]);
        }
        acc.mod_floor(&c).to_u64().unwrap()
    }
}

/// B_{k,K}(eta^a) by the defining sum
/// (-1)^k sum_{n=k}^K C(n,k) (x/(x-1))^n.
pub fn exact_b_value(ring: &Arc<ExactCycRing>, a_exp: u64, k: usize, kk: usize) -> ExactCyc {
    let x = ExactCyc::root_pow(ring, a_exp);
    let w = x
        .sub(&ExactCyc::one(ring))
        .invert()
        .expect("x - 1 invertible for a nonzero exponent")
        .mul(&x);
    let mut acc = ExactCyc::zero(ring);
    let mut wn = w.pow(k as u64);
    let mut c_nk = BigRational::one(); // C(n, k) starting at n = k
    for n in k..=kk {
        acc = acc.add(&wn.scalar_mul(&c_nk));
        // C(n+1, k) = C(n, k) (n+1)/(n+1-k)
        c_nk = c_nk * BigRational::from_integer(BigInt::from(n + 1))
            / BigRational::from_integer(BigInt::from(n + 1 - k));
        wn = wn.mul(&w);
    }
    if k % 2 == 1 {
        acc.neg()
    } else {
        acc
    }
}

/// The full table B_{0..K, K}(eta^a) by the recurrence
/// B_{0,K} = x (x/(x-1))^K - x + 1,
/// B_{k+1,K} = x [ (-1)^(k+1) C(K+1,k+1) (x/(x-1))^K + B_{k,K} ].
pub fn exact_b_recurrence(ring: &Arc<ExactCycRing>, a_exp: u64, kk: usize) -> Vec<ExactCyc> {
    let x = ExactCyc::root_pow(ring, a_exp);
    let w = x
        .sub(&ExactCyc::one(ring))
        .invert()
        .expect("x - 1 invertible")
        .mul(&x);
    let wk = w.pow(kk as u64);
    let mut out = Vec::with_capacity(kk + 1);
    let b0 = x.mul(&wk).sub(&x).add(&ExactCyc::one(ring));
    out.push(b0);
    let mut c_binom = BigRational::from_integer(BigInt::from(kk + 1)); // C(K+1, 1)
    for k in 0..kk {
        let sign = if (k + 1) % 2 == 1 {
            -c_binom.clone()
        } else {
            c_binom.clone()
        };
        let term = wk.scalar_mul(&sign).add(&out[k]);
        out.push(x.mul(&term));
        // C(K+1, k+2) = C(K+1, k+1) (K+1-(k+1))/(k+2)
        c_binom = c_binom * BigRational::from_integer(BigInt::from(kk - k))
            / BigRational::from_integer(BigInt::from(k + 2));
    }
    out
}

/// Exact value of Z(C, c; -k): build F_{k+1}(C, Xi; T), apply the
/// (1+T) d/dT operator k times, evaluate at 0 and trace down to Q.
pub fn exact_cone_series_value(cone: &Cone, aux: &ExactAux, k: usize) -> Result<BigRational> {
    if k > 6 {
        return Err(Error::BoundExceeded("oracle degree cap is k <= 6".into()));
    }
    let d = cone.base.field.degree();
    let g = cone.gens.len();
    let ring = ExactCycRing::aux_prime(aux.c);
    let n_coeffs = k + 1;
    let kk = k * d; // K = (N-1) d with N = k+1

    // additive character data
    let beta_exp = {
        let (x, y) = cone.base.integer_coords().unwrap();
        aux.exponent(&x, &y)
    };
    let gen_exp: Vec<u64> = cone
        .gens
        .iter()
        .map(|gen| {
            let (x, y) = gen.integer_coords().unwrap();
            aux.exponent(&x, &y)
        })
        .collect();
    for &e in &gen_exp {
        if e == 0 {
            return Err(Error::Hypothesis(
                "cone generator lies in the auxiliary prime".into(),
            ));
        }
    }
    // A(C, Xi) = Xi(beta) / prod (1 - Xi(lambda_i))
    let mut a_factor = ExactCyc::root_pow(&ring, beta_exp);
    for &e in &gen_exp {
        let inv = ExactCyc::one(&ring)
            .sub(&ExactCyc::root_pow(&ring, e))
            .invert()
            .expect("1 - Xi(lambda) invertible");
        a_factor = a_factor.mul(&inv);
    }
    let b_tables: Vec<Vec<ExactCyc>> = gen_exp
        .iter()
        .map(|&e| (0..=kk).map(|j| exact_b_value(&ring, e, j, kk)).collect())
        .collect();

    // series accumulation
    let mut series = vec![ExactCyc::zero(&ring); n_coeffs];
    let mut tuple = vec![0usize; g];
    loop {
        // norm of beta + sum k_i lambda_i
        let mut elem = cone.base.clone();
        for (i, &ki) in tuple.iter().enumerate() {
            elem = elem.add(&cone.gens[i].mul_bigint(&BigInt::from(ki)));
        }
        let nrm = elem.norm();
        assert!(nrm.is_integer());
        let nrm = nrm.to_integer();
        let mut inner = ExactCyc::one(&ring);
        for (i, &ki) in tuple.iter().enumerate() {
            inner = inner.mul(&b_tables[i][ki]);
        }
        // (1+T)^norm truncated: C(norm, j)
        let mut c_nj = BigRational::one();
        for (j, slot) in series.iter_mut().enumerate() {
            *slot = slot.add(&inner.scalar_mul(&c_nj));
            // C(norm, j+1) = C(norm, j) (norm - j)/(j+1)
            c_nj = c_nj * BigRational::from_integer(&nrm - BigInt::from(j))
                / BigRational::from_integer(BigInt::from(j + 1));
        }
        // odometer over {0..K}^g
        let mut pos = 0;
        loop {
            if pos == g {
                break;
            }
            tuple[pos] += 1;
            if tuple[pos] <= kk {
                break;
            }
            tuple[pos] = 0;
            pos += 1;
        }
        if pos == g {
            break;
        }
    }
    for slot in series.iter_mut() {
        *slot = slot.mul(&a_factor);
    }
    // Delta^k then T = 0
    for _ in 0..k {
        let mut next = vec![ExactCyc::zero(&ring); series.len() - 1];
        for (j, slot) in next.iter_mut().enumerate() {
            let a = series[j + 1].scalar_mul(&BigRational::from_integer(BigInt::from(j + 1)));
            let b = series[j].scalar_mul(&BigRational::from_integer(BigInt::from(j)));
            *slot = a.add(&b);
        }
        series = next;
    }
    Ok(series[0].trace())
}

/// Independent second oracle over Q:
/// Z_m(a^{-1}, c; -k) = c^(1+k) Z_m((ac)^{-1}; -k) - Z_m(a^{-1}; -k)
/// through the Hurwitz route.
pub fn exact_twisted_partial_zeta_q(a: u64, f: u64, c: u64, k: usize) -> BigRational {
    let inv_mod = |x: u64, m: u64| -> u64 {
        let e = BigInt::from(x).extended_gcd(&BigInt::from(m));
        assert!(e.gcd.is_one(), "inverse requires coprimality");
        e.x.mod_floor(&BigInt::from(m)).to_u64().unwrap()
    };
    let norm1 = |b: u64, m: u64| -> u64 {
        if b == 0 {
            m
        } else {
            b
        }
    };
    let b_ac = norm1(inv_mod(a * c % f, f), f);
    let b_a = norm1(inv_mod(a % f, f), f);
    let ck1 = BigRational::from_integer(BigInt::from(c)).pow(1 + k as i32);
    ck1 * hurwitz_partial_zeta(b_ac, f, k) - hurwitz_partial_zeta(b_a, f, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Field, FieldElem};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn fixture_cone() -> (Cone, ExactAux) {
        // E = Q, m = 5 inf, a = Z, c = 2, cone C(1; 5)
        let field = Field::Rational;
        (
            Cone {
                base: FieldElem::from_integers(field, 1, 0),
                gens: vec![FieldElem::from_integers(field, 5, 0)],
            },
            ExactAux { c: 2, t: vec![1] },
        )
    }

    #[test]
    fn b_tables_cross_check() {
        // defining sum vs recurrence, exact, K <= 8, all exponents
        for c in [2u64, 3, 7] {
            let ring = ExactCycRing::aux_prime(c);
            for kk in [0usize, 1, 3, 8] {
                for a in 1..c {
                    let rec = exact_b_recurrence(&ring, a, kk);
                    for k in 0..=kk {
                        assert_eq!(
                            rec[k],
                            exact_b_value(&ring, a, k, kk),
                            "c={c}, K={kk}, a={a}, k={k}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn b_zero_zero_is_one() {
        // K = 0: B_{0,0}(x) = 1 for any x
        for c in [2u64, 3, 7] {
            let ring = ExactCycRing::aux_prime(c);
            for a in 1..c {
                assert_eq!(exact_b_value(&ring, a, 0, 0), ExactCyc::one(&ring));
            }
        }
    }

    #[test]
    fn b_values_at_minus_one() {
        // c = 2, eta = -1: B_{k,K}(-1) = (-1)^k sum C(n,k) 2^{-n}
        let ring = ExactCycRing::aux_prime(2);
        let b = exact_b_value(&ring, 1, 1, 3);
        // -(1*2^-1 ... ) for n=1..3: C(1,1)/2 + C(2,1)/4 + C(3,1)/8 = 11/8
        assert_eq!(b.coeffs()[0], rat(-11, 8));
    }

    #[test]
    fn fixture_cone_values() {
        let (cone, aux) = fixture_cone();
        assert_eq!(exact_cone_series_value(&cone, &aux, 0).unwrap(), rat(-1, 2));
        assert_eq!(exact_cone_series_value(&cone, &aux, 1).unwrap(), rat(3, 4));
        assert_eq!(exact_cone_series_value(&cone, &aux, 3).unwrap(), rat(-99, 8));
    }

    #[test]
    fn hurwitz_route_agrees() {
        // Z_m(a^{-1}, c; -k) for a = Z: both oracles, k <= 4
        for k in 0..=4usize {
            let via_cones = {
                let (cone, aux) = fixture_cone();
                exact_cone_series_value(&cone, &aux, k).unwrap()
            };
            let via_hurwitz = exact_twisted_partial_zeta_q(1, 5, 2, k);
            assert_eq!(via_cones, via_hurwitz, "k = {k}");
        }
        // spot values from the fixture
        assert_eq!(exact_twisted_partial_zeta_q(1, 5, 2, 0), rat(-1, 2));
        assert_eq!(exact_twisted_partial_zeta_q(1, 5, 2, 1), rat(3, 4));
        assert_eq!(exact_twisted_partial_zeta_q(1, 5, 2, 3), rat(-99, 8));
    }

    #[test]
    fn cross_oracle_other_classes() {
        // decomposition of (a) for a = 2, 3, 4 against the Hurwitz oracle,
        // scaled by N(a)^{-k} per the interpolation identity
        use crate::field::{Ideal, Modulus};
        use crate::shintani::decompose_rational;
        let field = Field::Rational;
        let m = Modulus::new(field, Ideal::scalar(field, 5)).unwrap();
        let c = 3u64;
        let aux_ideal = Ideal::scalar(field, c as i64);
        let aux = ExactAux { c, t: vec![1] };
        for a in [1u64, 2, 4] {
            let dec = decompose_rational(&Ideal::scalar(field, a as i64), &m, &aux_ideal).unwrap();
            for k in 0..=3usize {
                let mut total = BigRational::zero();
                for cone in &dec.cones {
                    total += exact_cone_series_value(cone, &aux, k).unwrap();
                }
                let scale = BigRational::from_integer(BigInt::from(a)).pow(k as i32);
                let lhs = total / scale; // N(a)^{-k} Delta^k F at 0
                let rhs = exact_twisted_partial_zeta_q(a, 5, c, k);
                assert_eq!(lhs, rhs, "a = {a}, k = {k}");
            }
        }
    }
}
