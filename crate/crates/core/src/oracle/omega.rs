//! The variable-merging operator on two-variable polynomials, used only
//! as a test oracle: it sends (1+T_1)^a (1+T_2)^b to (1+T)^(ab) and
//! commutes with the product of the (1+T_i) d/dT_i operators.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Dense two-variable polynomial with rational coefficients,
/// coeffs[i][j] the coefficient of T_1^i T_2^j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    pub coeffs: Vec<Vec<BigRational>>,
}

impl MultiPoly {
    pub fn zero(deg1: usize, deg2: usize) -> MultiPoly {
        MultiPoly {
            coeffs: vec![vec![BigRational::zero(); deg2 + 1]; deg1 + 1],
        }
    }

    pub fn monomial(a: usize, b: usize) -> MultiPoly {
        let mut p = MultiPoly::zero(a, b);
        p.coeffs[a][b] = BigRational::one();
        p
    }

    fn deg1(&self) -> usize {
        self.coeffs.len() - 1
    }
    fn deg2(&self) -> usize {
        self.coeffs[0].len() - 1
    }
}

fn binom(n: usize, k: usize) -> BigRational {
    let mut c = BigRational::one();
    for j in 0..k {
        c = c * BigRational::from_integer(BigInt::from(n - j))
            / BigRational::from_integer(BigInt::from(j + 1));
    }
    c
}

/// (1+T)^n as an exact polynomial.
fn one_plus_t_pow(n: usize) -> Vec<BigRational> {
    (0..=n).map(|j| binom(n, j)).collect()
}

/// The merge operator on monomials:
/// T_1^a T_2^b -> (-1)^(a+b) sum_{n1<=a, n2<=b} (-1)^(n1+n2)
///                C(a,n1) C(b,n2) (1+T)^(n1 n2).
pub fn omega(p: &MultiPoly) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); p.deg1() * p.deg2() + 1];
    for a in 0..=p.deg1() {
        for b in 0..=p.deg2() {
            let coef = &p.coeffs[a][b];
            if coef.is_zero() {
                continue;
            }
            for n1 in 0..=a {
                for n2 in 0..=b {
                    let mut w = binom(a, n1) * binom(b, n2) * coef;
                    if (a + b + n1 + n2) % 2 == 1 {
                        w = -w;
                    }
                    for (j, c) in one_plus_t_pow(n1 * n2).into_iter().enumerate() {
                        out[j] += c * &w;
                    }
                }
            }
        }
    }
    out
}

/// (1+T_1) d/dT_1 (1+T_2) d/dT_2 acting on polynomials, exactly.
pub fn delta_multi(p: &MultiPoly) -> MultiPoly {
    let apply_var1 = |p: &MultiPoly| -> MultiPoly {
        let mut out = MultiPoly::zero(p.deg1(), p.deg2());
        for i in 1..=p.deg1() {
            for j in 0..=p.deg2() {
                let c = &p.coeffs[i][j] * BigRational::from_integer(BigInt::from(i));
                out.coeffs[i - 1][j] += &c;
                out.coeffs[i][j] += c;
            }
        }
        out
    };
    let apply_var2 = |p: &MultiPoly| -> MultiPoly {
        let mut out = MultiPoly::zero(p.deg1(), p.deg2());
        for i in 0..=p.deg1() {
            for j in 1..=p.deg2() {
                let c = &p.coeffs[i][j] * BigRational::from_integer(BigInt::from(j));
                out.coeffs[i][j - 1] += &c;
                out.coeffs[i][j] += c;
            }
        }
        out
    };
    apply_var2(&apply_var1(p))
}

/// (1+T) d/dT on one-variable polynomials.
pub fn delta_one(f: &[BigRational]) -> Vec<BigRational> {
    if f.len() <= 1 {
        return vec![BigRational::zero()];
    }
    let mut out = vec![BigRational::zero(); f.len()];
    for (i, c) in f.iter().enumerate().skip(1) {
        let t = c * BigRational::from_integer(BigInt::from(i));
        out[i - 1] += &t;
        out[i] += t;
    }
    out
}

fn poly_eq(a: &[BigRational], b: &[BigRational]) -> bool {
    let n = a.len().max(b.len());
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
        let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
        if x != y {
            return false;
        }
    }
    true
}

/// Omega(Delta A) = Delta(Omega A), exactly on polynomials.
pub fn omega_commutation_check(p: &MultiPoly) -> bool {
    let lhs = omega(&delta_multi(p));
    let rhs = delta_one(&omega(p));
    poly_eq(&lhs, &rhs)
}

/// Omega(T_1^a T_2^b) is divisible by T^max(a,b).
pub fn omega_monomial_divisible(a: usize, b: usize) -> bool {
    let f = omega(&MultiPoly::monomial(a, b));
    f.iter().take(a.max(b)).all(|c| c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn omega_on_product_of_units() {
        // (1+T1)(1+T2) maps to (1+T), and both sides equal Delta(1+T)
        let mut p = MultiPoly::zero(1, 1);
        p.coeffs[0][0] = BigRational::one();
        p.coeffs[1][0] = BigRational::one();
        p.coeffs[0][1] = BigRational::one();
        p.coeffs[1][1] = BigRational::one();
        let img = omega(&p);
        assert!(poly_eq(&img, &one_plus_t_pow(1)));
        assert!(omega_commutation_check(&p));
    }

    #[test]
    fn omega_on_t1t2() {
        // direct expansion of the definition for the mixed monomial
        let p = MultiPoly::monomial(1, 1);
        let img = omega(&p);
        // (-1)^2 [ (1+T)^0 - (1+T)^0 - (1+T)^0 + (1+T)^1 ] = T
        assert!(poly_eq(
            &img,
            &[BigRational::zero(), BigRational::one()]
        ));
        assert!(omega_commutation_check(&p));
    }

    #[test]
    fn monomial_divisibility() {
        for a in 0..=4 {
            for b in 0..=4 {
                assert!(omega_monomial_divisible(a, b), "a={a}, b={b}");
            }
        }
    }

    #[test]
    fn random_commutation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let mut p = MultiPoly::zero(4, 4);
            for i in 0..=4 {
                for j in 0..=4 {
                    p.coeffs[i][j] =
                        BigRational::from_integer(BigInt::from(rng.gen_range(-9i64..=9)));
                }
            }
            assert!(omega_commutation_check(&p));
        }
    }
}
