//! Bernoulli polynomials and the exact special values they generate: the
//! regularized partial sums sum_{n = b mod f} n^k and generalized
//! Bernoulli values of Dirichlet-type characters on ray classes of Q.

use super::exact::{ExactCyc, ExactCycRing};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::sync::Arc;

fn binom(n: usize, k: usize) -> BigRational {
    let mut c = BigRational::one();
    for j in 0..k {
        c = c * BigRational::from_integer(BigInt::from(n - j))
            / BigRational::from_integer(BigInt::from(j + 1));
    }
    c
}

/// Bernoulli numbers B_0..B_k by the defining recurrence.
pub fn bernoulli_number(k: usize) -> BigRational {
    assert!(k <= 64, "oracle degree cap");
    let mut b = vec![BigRational::zero(); k + 1];
    b[0] = BigRational::one();
    for n in 1..=k {
        // B_n = -1/(n+1) sum_{j<n} C(n+1, j) B_j
        let mut s = BigRational::zero();
        for (j, bj) in b.iter().enumerate().take(n) {
            s += binom(n + 1, j) * bj;
        }
        b[n] = -s / BigRational::from_integer(BigInt::from(n + 1));
    }
    b[k].clone()
}

/// Coefficients of B_k(x), low to high: B_k(x) = sum C(k,j) B_j x^(k-j).
pub fn bernoulli_polynomial(k: usize) -> Vec<BigRational> {
    assert!(k <= 64, "oracle degree cap");
    let mut coeffs = vec![BigRational::zero(); k + 1];
    for j in 0..=k {
        coeffs[k - j] = binom(k, j) * bernoulli_number(j);
    }
    coeffs
}

fn eval_poly(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Regularized value of sum_{n > 0, n = b mod f} n^k, namely
/// f^k (-B_{k+1}(b/f)/(k+1)); this is Z_m(class; -k) over Q.
pub fn hurwitz_partial_zeta(b: u64, f: u64, k: usize) -> BigRational {
    assert!(0 < b && b <= f, "residue must satisfy 0 < b <= f");
    let poly = bernoulli_polynomial(k + 1);
    let x = BigRational::new(BigInt::from(b), BigInt::from(f));
    let val = eval_poly(&poly, &x);
    let fk = BigRational::from_integer(BigInt::from(f)).pow(k as i32);
    -fk * val / BigRational::from_integer(BigInt::from(k + 1))
}

/// Exact value of L_m(chi; 1-k) for a character on (Z/f)^x given by its
/// exponent function (None on residues sharing a factor with f): the
/// generalized Bernoulli value -B_{k,chi}/k with chi viewed modulo f,
/// which removes the Euler factors at primes dividing f.
pub fn classical_l_value(
    f: u64,
    k: usize,
    order: u64,
    chi_exponent: impl Fn(u64) -> Option<u64>,
) -> ExactCyc {
    assert!(k >= 1);
    let ring = ExactCycRing::character(order);
    let b_chi = generalized_bernoulli(f, k, &ring, chi_exponent);
    b_chi.scalar_mul(&-BigRational::new(BigInt::one(), BigInt::from(k)))
}

/// B_{k,chi} = f^{k-1} sum_{a=1}^{f} chi(a) B_k(a/f).
fn generalized_bernoulli(
    f: u64,
    k: usize,
    ring: &Arc<ExactCycRing>,
    chi_exponent: impl Fn(u64) -> Option<u64>,
) -> ExactCyc {
    let poly = bernoulli_polynomial(k);
    let mut acc = ExactCyc::zero(ring);
    for a in 1..=f {
        let Some(e) = chi_exponent(a) else { continue };
        let x = BigRational::new(BigInt::from(a), BigInt::from(f));
        let val = eval_poly(&poly, &x);
        acc = acc.add(&ExactCyc::root_pow(ring, e).scalar_mul(&val));
    }
    let fk = BigRational::from_integer(BigInt::from(f)).pow(k as i32 - 1);
    acc.scalar_mul(&fk)
}
