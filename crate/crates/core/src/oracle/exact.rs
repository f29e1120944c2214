//! Exact cyclotomic arithmetic over Q: elements of Q[x]/Phi with Phi
//! either 1 + x + ... + x^(c-1) or the n-th cyclotomic polynomial, with
//! inversion by extended gcd over Q[x] and reduction into the modular
//! character rings.

use crate::cyclotomic::{cyclotomic_polynomial, CycElem, CycRing};
use crate::error::{Error, Result};
use crate::padic::Zring;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactRingKind {
    AuxPrime { c: u64 },
    Character { order: u64 },
}

/// Q[x]/Phi with a monic integer modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactCycRing {
    pub kind: ExactRingKind,
    modulus: Vec<BigRational>,
    degree: usize,
    root_order: u64,
}

/// A reduced element: rational coefficient vector of length deg Phi.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactCyc {
    ring: Arc<ExactCycRing>,
    coeffs: Vec<BigRational>,
}

impl ExactCycRing {
    pub fn aux_prime(c: u64) -> Arc<ExactCycRing> {
        assert!(crate::padic::is_prime(c));
        let degree = (c - 1) as usize;
        Arc::new(ExactCycRing {
            kind: ExactRingKind::AuxPrime { c },
            modulus: vec![BigRational::one(); degree + 1],
            degree,
            root_order: c,
        })
    }

    pub fn character(n: u64) -> Arc<ExactCycRing> {
        let phi = cyclotomic_polynomial(n);
        let modulus: Vec<BigRational> = phi
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        let degree = modulus.len() - 1;
        Arc::new(ExactCycRing {
            kind: ExactRingKind::Character { order: n },
            modulus,
            degree,
            root_order: n,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn root_order(&self) -> u64 {
        self.root_order
    }
}

impl ExactCyc {
    pub fn zero(ring: &Arc<ExactCycRing>) -> ExactCyc {
        ExactCyc {
            ring: ring.clone(),
            coeffs: vec![BigRational::zero(); ring.degree],
        }
    }

    pub fn one(ring: &Arc<ExactCycRing>) -> ExactCyc {
        ExactCyc::scalar(ring, BigRational::one())
    }

    pub fn scalar(ring: &Arc<ExactCycRing>, v: BigRational) -> ExactCyc {
        let mut coeffs = vec![BigRational::zero(); ring.degree];
        coeffs[0] = v;
        ExactCyc {
            ring: ring.clone(),
            coeffs,
        }
    }

    pub fn root_pow(ring: &Arc<ExactCycRing>, a: u64) -> ExactCyc {
        let a = (a % ring.root_order) as usize;
        let mut raw = vec![BigRational::zero(); a + 1];
        raw[a] = BigRational::one();
        ExactCyc::from_raw(ring, raw)
    }

    fn from_raw(ring: &Arc<ExactCycRing>, raw: Vec<BigRational>) -> ExactCyc {
        ExactCyc {
            ring: ring.clone(),
            coeffs: reduce_poly(ring, raw),
        }
    }

    pub fn ring(&self) -> &Arc<ExactCycRing> {
        &self.ring
    }
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &ExactCyc) -> ExactCyc {
        ExactCyc {
            ring: self.ring.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, o: &ExactCyc) -> ExactCyc {
        ExactCyc {
            ring: self.ring.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> ExactCyc {
        ExactCyc {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn scalar_mul(&self, v: &BigRational) -> ExactCyc {
        ExactCyc {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|a| a * v).collect(),
        }
    }

    pub fn mul(&self, o: &ExactCyc) -> ExactCyc {
        assert!(Arc::ptr_eq(&self.ring, &o.ring) || self.ring == o.ring);
        let d = self.ring.degree;
        let mut raw = vec![BigRational::zero(); 2 * d.max(1)];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                raw[i + j] += a * b;
            }
        }
        ExactCyc::from_raw(&self.ring, raw)
    }

    pub fn pow(&self, mut e: u64) -> ExactCyc {
        let mut base = self.clone();
        let mut acc = ExactCyc::one(&self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Inverse by extended gcd over Q[x]; None iff the element is a zero
    /// divisor in the etale algebra.
    pub fn invert(&self) -> Option<ExactCyc> {
        let (g, s) = ext_gcd_q(&self.coeffs, &self.ring.modulus);
        if g.len() != 1 || g[0].is_zero() {
            return None;
        }
        let gi = g[0].recip();
        Some(ExactCyc::from_raw(
            &self.ring,
            s.into_iter().map(|c| c * &gi).collect(),
        ))
    }

    /// Galois action root -> root^k.
    pub fn galois(&self, k: u64) -> ExactCyc {
        let ord = self.ring.root_order;
        let mut acc = ExactCyc::zero(&self.ring);
        for (a, coef) in self.coeffs.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            acc = acc.add(&ExactCyc::root_pow(&self.ring, (a as u64 * k) % ord).scalar_mul(coef));
        }
        acc
    }

    /// Trace to Q of an aux-prime ring element: c z_0 - sum z_a.
    pub fn trace(&self) -> BigRational {
        let ExactRingKind::AuxPrime { c } = self.ring.kind else {
            panic!("trace is defined on the aux-prime ring")
        };
        let sum: BigRational = self.coeffs.iter().sum();
        BigRational::from_integer(BigInt::from(c)) * &self.coeffs[0] - sum
    }

    /// Reduce into the modular ring, requiring p-integral coefficients.
    pub fn reduce_mod(&self, ring: &Arc<CycRing>) -> Result<CycElem> {
        assert_eq!(self.ring.degree, ring.degree(), "ring shape mismatch");
        let z = ring.zring();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(reduce_rational_mod(c, z)?);
        }
        Ok(CycElem::from_coeffs(ring, out))
    }
}

/// num/den mod p^M for a p-integral rational.
pub fn reduce_rational_mod(r: &BigRational, z: Zring) -> Result<u64> {
    let num = z.reduce_bigint(r.numer());
    let den = r.denom();
    if (den % BigInt::from(z.p)).is_zero() {
        return Err(Error::Precision(format!(
            "rational {r} is not p-integral at p = {}",
            z.p
        )));
    }
    let deni = z.inv(z.reduce_bigint(den))?;
    Ok(z.mul(num, deni))
}

fn reduce_poly(ring: &ExactCycRing, mut v: Vec<BigRational>) -> Vec<BigRational> {
    let d = ring.degree;
    if v.len() <= d {
        v.resize(d, BigRational::zero());
        return v;
    }
    for k in (d..v.len()).rev() {
        let c = v[k].clone();
        if !c.is_zero() {
            v[k] = BigRational::zero();
            for j in 0..d {
                let t = &c * &ring.modulus[j];
                v[k - d + j] -= t;
            }
        }
    }
    v.truncate(d);
    v
}

/// Extended gcd over Q[x]: returns (g, s) with s*a = g mod modulus.
fn ext_gcd_q(a: &[BigRational], modulus: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let norm = |v: &mut Vec<BigRational>| {
        while v.last().map(|x| x.is_zero()).unwrap_or(false) {
            v.pop();
        }
    };
    let mut r0: Vec<BigRational> = modulus.to_vec();
    let mut r1: Vec<BigRational> = a.to_vec();
    norm(&mut r0);
    norm(&mut r1);
    let mut t0: Vec<BigRational> = vec![];
    let mut t1: Vec<BigRational> = vec![BigRational::one()];
    while !r1.is_empty() {
        // r0 = q r1 + rem
        let mut rem = r0.clone();
        let mut quot = vec![BigRational::zero(); rem.len().saturating_sub(r1.len()) + 1];
        while rem.len() >= r1.len() && !rem.is_empty() {
            let k = rem.len() - r1.len();
            let c = rem.last().unwrap() / r1.last().unwrap();
            quot[k] += &c;
            for (j, rc) in r1.iter().enumerate() {
                let t = &c * rc;
                rem[k + j] -= t;
            }
            norm(&mut rem);
        }
        norm(&mut quot);
        let mut qt = vec![BigRational::zero(); quot.len() + t1.len()];
        for (i, qc) in quot.iter().enumerate() {
            for (j, tc) in t1.iter().enumerate() {
                qt[i + j] += qc * tc;
            }
        }
        let mut nt = vec![BigRational::zero(); t0.len().max(qt.len())];
        for (i, slot) in nt.iter_mut().enumerate() {
            let x = t0.get(i).cloned().unwrap_or_else(BigRational::zero);
            let y = qt.get(i).cloned().unwrap_or_else(BigRational::zero);
            *slot = x - y;
        }
        norm(&mut nt);
        t0 = std::mem::take(&mut t1);
        t1 = nt;
        r0 = std::mem::take(&mut r1);
        r1 = rem;
    }
    (r0, t0)
}
