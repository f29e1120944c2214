//! Continuous functions on Z_p as finite Mahler-coefficient vectors with a
//! certified length, and measures as truncated power series in T. The
//! certified length comes from a proved decay bound; integration refuses
//! measures that are too short rather than silently truncating.

use crate::error::{Error, Result};
use crate::padic::{
    self, binomial_row_raw, ilog_p, pow1q, pow1q_terms, row_guard, PAdicInt, TeichTable,
    Zring,
};

/// A continuous function given by Mahler coefficients f_0..f_{N-1} at
/// precision p^M; the tail beyond N is certified to be <= p^-M.
#[derive(Clone, Debug)]
pub struct MahlerFn {
    ring: Zring,
    coeffs: Vec<u64>,
}

/// A measure as the truncated power series F_mu mod (p^M, T^N); the
/// coefficient F_n is the integral of C(x,n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measure {
    ring: Zring,
    coeffs: Vec<u64>,
}

impl MahlerFn {
    pub fn from_coeffs(ring: Zring, coeffs: Vec<u64>) -> MahlerFn {
        let coeffs = coeffs.into_iter().map(|c| c % ring.pm).collect();
        MahlerFn { ring, coeffs }
    }

    pub fn declared_n(&self) -> usize {
        self.coeffs.len()
    }
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
    pub fn ring(&self) -> Zring {
        self.ring
    }

    /// max |f_n|_p expressed as the minimal coefficient valuation.
    pub fn min_valuation(&self) -> u32 {
        self.coeffs
            .iter()
            .map(|&c| self.ring.val(c))
            .min()
            .unwrap_or(self.ring.prec)
    }

    /// Evaluate at a non-negative integer through the expansion.
    pub fn eval_int(&self, x: u64) -> PAdicInt {
        let n = self.coeffs.len();
        let v = row_guard(self.ring.p, n);
        let big = Zring::new(self.ring.p, self.ring.prec + v);
        let row = binomial_row_raw(self.ring, x % big.pm, n);
        let mut acc = 0u64;
        for (f, c) in self.coeffs.iter().zip(&row) {
            acc = self.ring.add(acc, self.ring.mul(*f, *c));
        }
        PAdicInt::from_ring(self.ring, acc)
    }
}

impl Measure {
    pub fn from_coeffs(ring: Zring, coeffs: Vec<u64>) -> Measure {
        let coeffs = coeffs.into_iter().map(|c| c % ring.pm).collect();
        Measure { ring, coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
    pub fn ring(&self) -> Zring {
        self.ring
    }

    pub fn add(&self, other: &Measure) -> Measure {
        assert_eq!(self.ring, other.ring, "measure ring mismatch");
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.ring.add(self.coeffs[i], other.coeffs[i]))
            .collect();
        Measure {
            ring: self.ring,
            coeffs,
        }
    }
}

/// Finite-difference triangle: after the sweep, coefficient n holds
/// (nabla^n f)(0) mod p^M.
pub fn mahler_coeffs(
    ring: Zring,
    n_count: usize,
    mut evaluate: impl FnMut(u64) -> Result<u64>,
) -> Result<MahlerFn> {
    let mut f = Vec::with_capacity(n_count);
    for n in 0..n_count {
        f.push(evaluate(n as u64)? % ring.pm);
    }
    for j in 1..n_count {
        for n in (j..n_count).rev() {
            f[n] = ring.sub(f[n], f[n - 1]);
        }
    }
    Ok(MahlerFn { ring, coeffs: f })
}

/// Certified coefficient count for phi_s at precision M.
pub fn phi_s_declared_n(p: u64, m: u32) -> usize {
    if p == 2 {
        2 * m as usize + 2
    } else {
        p as usize * m as usize + 2
    }
}

/// Mahler vector of phi_s: 0 on pZ_p and <x>^s on units.
pub fn phi_s_fn(s: &PAdicInt, m: u32) -> Result<MahlerFn> {
    let p = s.p();
    let ring = Zring::new(p, m);
    let need = m + row_guard(p, pow1q_terms(p, m));
    if s.precision() < need {
        return Err(Error::Precision(format!(
            "phi_s needs the exponent mod p^{need}, got precision {}",
            s.precision()
        )));
    }
    let s_use = s.coerce_down(need);
    let table = TeichTable::new(ring);
    let n_count = phi_s_declared_n(p, m);
    mahler_coeffs(ring, n_count, |n| {
        if n % p == 0 {
            Ok(0)
        } else {
            let ax = PAdicInt::from_ring(ring, table.angle_raw(n % ring.pm));
            Ok(pow1q(&ax, &s_use)?.residue())
        }
    })
}

/// Certified coefficient count for psi_ell at precision M.
pub fn psi_ell_declared_n(p: u64, e: u32, m: u32, ell: usize) -> usize {
    let pe = Zring::new(p, e).pm as usize;
    pe * (p as usize * m as usize + ell)
}

/// Mahler vector of psi_ell: x^{-1} C(L_u(x), ell) on the set where
/// <x> lies in 1 + p^e Z_p, and 0 elsewhere.
pub fn psi_ell_fn(ell: usize, u: &PAdicInt, e: u32, m: u32) -> Result<MahlerFn> {
    let p = u.p();
    let ring = Zring::new(p, m);
    let v_row = ilog_p(p, ell.max(1) as u64);
    let work_prec = m + v_row + e;
    if u.precision() < work_prec {
        return Err(Error::Precision(format!(
            "psi_ell needs u at precision >= {work_prec}, got {}",
            u.precision()
        )));
    }
    let u_work = u.coerce_down(work_prec);
    let work = Zring::new(p, work_prec);
    let pe = Zring::new(p, e).pm;
    let table = TeichTable::new(work);
    let n_count = psi_ell_declared_n(p, e, m, ell);
    let row_ring = Zring::new(p, m);
    mahler_coeffs(ring, n_count, |n| {
        if n % p == 0 {
            return Ok(0);
        }
        let nw = n % work.pm;
        let ax = table.angle_raw(nw);
        if ax % pe != 1 % pe {
            return Ok(0);
        }
        let t = padic::lu(&PAdicInt::from_ring(work, nw), &u_work, e)?;
        // C(t, ell) mod p^M from the row of length ell + 1
        let row = binomial_row_raw(row_ring, t.residue() % Zring::new(p, m + v_row).pm, ell + 1);
        let xinv = ring.inv(n % ring.pm)?;
        Ok(ring.mul(xinv, row[ell]))
    })
}

/// Mahler vector of the characteristic function of 1 + p^e Z_p, with the
/// certified length coming from local analyticity of order e.
pub fn indicator_fn(p: u64, e: u32, m: u32) -> MahlerFn {
    let ring = Zring::new(p, m);
    let pe = Zring::new(p, e).pm;
    let n_count = Zring::new(p, e).pm as usize * (p as usize * m as usize + 1);
    mahler_coeffs(ring, n_count, |n| Ok(u64::from(n % pe == 1 % pe)))
        .expect("indicator evaluation cannot fail")
}

/// sum f_n F_n; the measure must be at least as long as the certified
/// coefficient count of f.
pub fn integrate(f: &MahlerFn, mu: &Measure) -> Result<PAdicInt> {
    assert_eq!(f.ring, mu.ring, "precision context mismatch");
    if mu.len() < f.declared_n() {
        return Err(Error::Precision(format!(
            "measure has {} coefficients, function needs {}",
            mu.len(),
            f.declared_n()
        )));
    }
    let ring = f.ring;
    let mut acc = 0u64;
    for (a, b) in f.coeffs.iter().zip(&mu.coeffs) {
        acc = ring.add(acc, ring.mul(*a, *b));
    }
    Ok(PAdicInt::from_ring(ring, acc))
}

/// The operator (1+T) d/dT on truncated series: coefficient n of
/// Delta F is (n+1) F_{n+1} + n F_n; one coefficient is consumed.
pub fn delta(mu: &Measure) -> Measure {
    let ring = mu.ring;
    let n = mu.len();
    let coeffs = (0..n.saturating_sub(1))
        .map(|i| {
            let a = ring.mul((i as u64 + 1) % ring.pm, mu.coeffs[i + 1]);
            let b = ring.mul(i as u64 % ring.pm, mu.coeffs[i]);
            ring.add(a, b)
        })
        .collect();
    Measure { ring, coeffs }
}

/// k-th moment: Delta^k F at T = 0. Each application consumes one
/// coefficient, so the measure must carry more than k of them.
pub fn moment(mu: &Measure, k: usize) -> Result<PAdicInt> {
    if mu.len() <= k {
        return Err(Error::Precision(format!(
            "moment {k} needs more than {k} coefficients, measure has {}",
            mu.len()
        )));
    }
    let mut cur = mu.clone();
    for _ in 0..k {
        cur = delta(&cur);
    }
    Ok(PAdicInt::from_ring(mu.ring, cur.coeffs[0]))
}

/// Dirac measure at a: coefficients C(a, n).
pub fn dirac(a: &PAdicInt, n_count: usize, m: u32) -> Result<Measure> {
    let rows = crate::padic::binomial_row(a, n_count, m)?;
    Ok(Measure {
        ring: Zring::new(a.p(), m),
        coeffs: rows.into_iter().map(|c| c.residue()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::default_u;

    fn zr(p: u64, m: u32) -> Zring {
        Zring::new(p, m)
    }

    #[test]
    fn triangle_on_x_squared() {
        // x^2 = C(x,1) + 2 C(x,2)
        let ring = zr(5, 3);
        let f = mahler_coeffs(ring, 6, |n| Ok((n * n) % ring.pm)).unwrap();
        assert_eq!(f.coeffs(), &[0, 1, 2, 0, 0, 0]);
    }

    #[test]
    fn triangle_on_binomial_is_unit_vector() {
        let ring = zr(5, 3);
        for k in 0..5usize {
            let f = mahler_coeffs(ring, 7, |n| {
                // C(n, k) as an exact integer
                let mut c: u64 = 1;
                if (n as usize) < k {
                    c = 0;
                } else {
                    for j in 0..k as u64 {
                        c = c * (n - j) / (j + 1);
                    }
                }
                Ok(c % ring.pm)
            })
            .unwrap();
            let mut expect = vec![0u64; 7];
            expect[k] = 1;
            assert_eq!(f.coeffs(), &expect[..], "k = {k}");
        }
    }

    #[test]
    fn phi0_first_coefficients() {
        let s = PAdicInt::new(5, 8, 0);
        let f = phi_s_fn(&s, 3).unwrap();
        // unit indicator: values 0,1,1,1,1,0,...
        assert_eq!(f.coeffs()[0], 0);
        assert_eq!(f.coeffs()[1], 1);
        assert_eq!(f.coeffs()[2], 125 - 1);
    }

    #[test]
    fn phi_s_against_dirac() {
        // integral of phi_4 against the Dirac at 2 is <2>^4 = 16 (p = 5)
        let m = 3;
        let s = PAdicInt::new(5, 8, 4);
        let f = phi_s_fn(&s, m).unwrap();
        let a = PAdicInt::new(5, 8, 2);
        let mu = dirac(&a, f.declared_n(), m).unwrap();
        assert_eq!(integrate(&f, &mu).unwrap().residue(), 16);
    }

    #[test]
    fn phi_s_decay_bound() {
        // |f_n|_p <= |n!|_p for p odd, up to the working precision
        let p = 5u64;
        let m = 6u32;
        let s = PAdicInt::new(p, m + 3, 4_321);
        let ring = zr(p, m);
        let f = mahler_coeffs(ring, 101, |n| {
            if n % p == 0 {
                Ok(0)
            } else {
                let t = TeichTable::new(ring);
                let ax = PAdicInt::from_ring(ring, t.angle_raw(n % ring.pm));
                Ok(pow1q(&ax, &s.coerce_down(m + row_guard(p, pow1q_terms(p, m))))?.residue())
            }
        })
        .unwrap();
        let mut vfact = 0u32; // v_p(n!)
        for n in 0..101usize {
            if n > 0 {
                let mut k = n as u64;
                while k % p == 0 {
                    vfact += 1;
                    k /= p;
                }
            }
            let bound = vfact.min(m);
            assert!(
                ring.val(f.coeffs()[n]) >= bound,
                "phi_s coefficient {n} too large"
            );
        }
    }

    #[test]
    fn psi_ell_values() {
        let p = 5;
        let e = 1;
        let m = 4;
        let u = default_u(p, 12, e);
        let f0 = psi_ell_fn(0, &u, e, m).unwrap();
        // psi_0(u) = u^{-1}
        let ring = zr(p, m);
        let ur = u.coerce_down(m).residue();
        assert_eq!(f0.eval_int(ur).residue(), ring.inv(ur).unwrap());
        // zero on pZ_p
        assert_eq!(f0.eval_int(10).residue(), 0);
        // with e = 2 the support shrinks: <2> = 11 is not in 1 + 25 Z_5
        let u2 = default_u(p, 12, 2);
        let g0 = psi_ell_fn(0, &u2, 2, 3).unwrap();
        assert_eq!(g0.eval_int(2).residue(), 0);
        assert_eq!(
            g0.eval_int(26).residue(),
            zr(p, 3).inv(26).unwrap(),
            "26 = 1 + 25 lies in the support"
        );
    }

    #[test]
    fn psi_ell_partial_sum_identity() {
        // sum_{l<L} psi_l(x) (u^s - 1)^l = x^{-1} <x>^s mod p^M for x in support
        let p = 5u64;
        let e = 1u32;
        let m = 4u32;
        let l_count = m as usize; // tail bound p^{-eL} <= p^-M
        let big = 14;
        let u = default_u(p, big, e);
        let ring = zr(p, m);
        let s = PAdicInt::new(p, big, 1234);
        let us = pow1q(&u.coerce_down(m + row_guard(p, pow1q_terms(p, m))), &s).unwrap();
        let sval = ring.sub(us.residue(), 1);
        for x in [6u64, 11, 26, 121, 3131 % 625] {
            let table = TeichTable::new(ring);
            if table.angle_raw(x % ring.pm) % 5 != 1 {
                continue;
            }
            let mut acc = 0u64;
            let mut spow = 1u64;
            for ell in 0..l_count {
                let f = psi_ell_fn(ell, &u, e, m).unwrap();
                acc = ring.add(acc, ring.mul(f.eval_int(x).residue(), spow));
                spow = ring.mul(spow, sval);
            }
            let ax = PAdicInt::from_ring(ring, table.angle_raw(x % ring.pm));
            let rhs = ring.mul(
                ring.inv(x % ring.pm).unwrap(),
                pow1q(&ax, &s.coerce_down(m + row_guard(p, pow1q_terms(p, m))))
                    .unwrap()
                    .residue(),
            );
            assert_eq!(acc, rhs, "x = {x}");
        }
    }

    #[test]
    fn dirac_and_integration() {
        let m = 3;
        let zero = PAdicInt::new(5, 8, 0);
        let mu = dirac(&zero, 5, m).unwrap();
        assert_eq!(mu.coeffs(), &[1, 0, 0, 0, 0]);
        let one = PAdicInt::new(5, 8, 1);
        let mu1 = dirac(&one, 5, m).unwrap();
        assert_eq!(mu1.coeffs(), &[1, 1, 0, 0, 0]);
        // integrate(f, dirac(a)) = f(a)
        let ring = zr(5, m);
        let f = mahler_coeffs(ring, 5, |n| Ok((3 * n * n + n + 2) % ring.pm)).unwrap();
        let a = PAdicInt::new(5, 8, 3);
        let mu3 = dirac(&a, 5, m).unwrap();
        assert_eq!(integrate(&f, &mu3).unwrap().residue(), (3 * 9 + 3 + 2) % 125);
    }

    #[test]
    fn integration_refuses_short_measures() {
        let ring = zr(5, 3);
        let f = MahlerFn::from_coeffs(ring, vec![1, 2, 3, 4]);
        let mu = Measure::from_coeffs(ring, vec![1, 1]);
        assert!(matches!(integrate(&f, &mu), Err(Error::Precision(_))));
    }

    #[test]
    fn delta_on_dirac_scales() {
        // Delta (1+T)^a = a (1+T)^a, truncated
        let m = 3;
        let a = PAdicInt::new(5, 8, 7);
        let mu = dirac(&a, 8, m).unwrap();
        let d = delta(&mu);
        let ring = zr(5, m);
        for (i, c) in d.coeffs().iter().enumerate() {
            assert_eq!(*c, ring.mul(7, mu.coeffs()[i]));
        }
        // Delta of a constant is 0
        let cst = Measure::from_coeffs(ring, vec![9, 0, 0, 0]);
        assert!(delta(&cst).coeffs().iter().all(|&c| c == 0));
    }

    #[test]
    fn moments_of_dirac() {
        let m = 4;
        let ring = zr(5, m);
        let a = PAdicInt::new(5, 9, 12);
        let mu = dirac(&a, 8, m).unwrap();
        for k in 0..4usize {
            assert_eq!(
                moment(&mu, k).unwrap().residue(),
                ring.pow(12, k as u64),
                "moment {k}"
            );
        }
        assert_eq!(moment(&mu, 0).unwrap().residue(), mu.coeffs()[0]);
        assert!(moment(&mu, 8).is_err());
    }

    #[test]
    fn indicator_values() {
        let f = indicator_fn(5, 1, 3);
        assert_eq!(f.eval_int(1).residue(), 1);
        assert_eq!(f.eval_int(0).residue(), 0);
        assert_eq!(f.eval_int(6).residue(), 1);
        assert_eq!(f.eval_int(7).residue(), 0);
    }

    #[test]
    fn mahler_round_trip_on_binomials() {
        // re-expanding x -> C(x,k) recovers the unit vector e_k
        let ring = zr(7, 4);
        for k in [0usize, 2, 5] {
            let src = {
                let mut v = vec![0u64; 9];
                v[k] = 1;
                MahlerFn::from_coeffs(ring, v)
            };
            let f = mahler_coeffs(ring, 9, |n| Ok(src.eval_int(n).residue())).unwrap();
            assert_eq!(f.coeffs(), src.coeffs());
        }
    }
}
