//! Fixed-precision arithmetic in Z/p^M together with the structural maps
//! of Z_p^x: the Teichmueller character omega, the angle projection <.>,
//! the p-adic logarithm, exponentiation x^s on 1 + qZ_p, binomial rows
//! C(s,0..N-1), and the logarithm-to-base-u map L_u.
//!
//! A value is a single residue carried together with (p, M); p^M is
//! precomputed once per value. Binary operations require equal (p, M) and
//! panic otherwise; precision coercion is explicit and only downward.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Trial-division primality test; moduli here are desk-scale.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// q = 4 if p = 2, otherwise p.
pub fn q_of(p: u64) -> u64 {
    if p == 2 {
        4
    } else {
        p
    }
}

/// Largest v >= 0 with p^v <= n; 0 for n = 0.
pub fn ilog_p(p: u64, n: u64) -> u32 {
    let mut v = 0;
    let mut pw = p;
    while n >= pw {
        v += 1;
        match pw.checked_mul(p) {
            Some(next) => pw = next,
            None => break,
        }
    }
    v
}

/// Raw modular ring Z/p^M used by the hot loops; the public `PAdicInt`
/// wraps one residue of such a ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Zring {
    pub p: u64,
    pub prec: u32,
    pub pm: u64,
}

impl Zring {
    pub fn new(p: u64, prec: u32) -> Self {
        assert!(is_prime(p), "p = {p} is not prime");
        assert!(prec >= 1, "precision exponent must be >= 1");
        let mut pm: u64 = 1;
        for _ in 0..prec {
            pm = pm
                .checked_mul(p)
                .filter(|&x| x < (1u64 << 62))
                .unwrap_or_else(|| panic!("p^M = {p}^{prec} exceeds the supported word size"));
        }
        Zring { p, prec, pm }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.pm {
            s - self.pm
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.pm - b
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.pm as u128) as u64
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.pm - a
        }
    }

    pub fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.pm;
        base %= self.pm;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// v_p of a residue, capped at the precision (0 maps to `prec`).
    pub fn val(&self, a: u64) -> u32 {
        if a == 0 {
            return self.prec;
        }
        let mut v = 0;
        let mut a = a;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        v
    }

    /// Inverse of a residue coprime to p, by extended Euclid modulo p^M.
    pub fn inv(&self, a: u64) -> Result<u64> {
        if a % self.p == 0 {
            return Err(Error::UnitRequired(a, self.p));
        }
        let (mut r0, mut r1) = (self.pm as i128, (a % self.pm) as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(((t0 % self.pm as i128 + self.pm as i128) % self.pm as i128) as u64)
    }

    #[inline]
    pub fn reduce_i128(&self, x: i128) -> u64 {
        let m = self.pm as i128;
        (((x % m) + m) % m) as u64
    }

    pub fn reduce_bigint(&self, x: &BigInt) -> u64 {
        let m = BigInt::from(self.pm);
        let r = ((x % &m) + &m) % &m;
        r.to_u64().expect("reduced residue fits u64")
    }

    /// Drop to a lower precision.
    pub fn truncate(&self, a: u64, prec: u32) -> u64 {
        assert!(prec <= self.prec, "precision coercion is downward only");
        if prec == self.prec {
            return a;
        }
        a % Zring::new(self.p, prec).pm
    }
}

/// A p-adic integer known to absolute precision p^M.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PAdicInt {
    ring: Zring,
    residue: u64,
}

impl PAdicInt {
    pub fn new(p: u64, prec: u32, residue: u64) -> Self {
        let ring = Zring::new(p, prec);
        PAdicInt {
            ring,
            residue: residue % ring.pm,
        }
    }

    pub fn from_ring(ring: Zring, residue: u64) -> Self {
        PAdicInt {
            ring,
            residue: residue % ring.pm,
        }
    }

    pub fn from_int(p: u64, prec: u32, v: i64) -> Self {
        let ring = Zring::new(p, prec);
        PAdicInt {
            ring,
            residue: ring.reduce_i128(v as i128),
        }
    }

    pub fn from_bigint(p: u64, prec: u32, v: &BigInt) -> Self {
        let ring = Zring::new(p, prec);
        PAdicInt {
            ring,
            residue: ring.reduce_bigint(v),
        }
    }

    pub fn p(&self) -> u64 {
        self.ring.p
    }
    pub fn precision(&self) -> u32 {
        self.ring.prec
    }
    pub fn residue(&self) -> u64 {
        self.residue
    }
    pub fn ring(&self) -> Zring {
        self.ring
    }
    pub fn q(&self) -> u64 {
        q_of(self.ring.p)
    }

    pub fn is_unit(&self) -> bool {
        self.residue % self.ring.p != 0
    }

    /// v_p capped at the precision.
    pub fn valuation(&self) -> u32 {
        self.ring.val(self.residue)
    }

    fn check_same(&self, other: &PAdicInt) {
        assert!(
            self.ring == other.ring,
            "mixed (p, M): ({}, {}) vs ({}, {}); coerce explicitly",
            self.ring.p,
            self.ring.prec,
            other.ring.p,
            other.ring.prec
        );
    }

    pub fn add(&self, other: &PAdicInt) -> PAdicInt {
        self.check_same(other);
        PAdicInt {
            ring: self.ring,
            residue: self.ring.add(self.residue, other.residue),
        }
    }

    pub fn sub(&self, other: &PAdicInt) -> PAdicInt {
        self.check_same(other);
        PAdicInt {
            ring: self.ring,
            residue: self.ring.sub(self.residue, other.residue),
        }
    }

    pub fn mul(&self, other: &PAdicInt) -> PAdicInt {
        self.check_same(other);
        PAdicInt {
            ring: self.ring,
            residue: self.ring.mul(self.residue, other.residue),
        }
    }

    pub fn neg(&self) -> PAdicInt {
        PAdicInt {
            ring: self.ring,
            residue: self.ring.neg(self.residue),
        }
    }

    pub fn inv(&self) -> Result<PAdicInt> {
        Ok(PAdicInt {
            ring: self.ring,
            residue: self.ring.inv(self.residue)?,
        })
    }

    pub fn pow_u64(&self, e: u64) -> PAdicInt {
        PAdicInt {
            ring: self.ring,
            residue: self.ring.pow(self.residue, e),
        }
    }

    /// Explicit downward precision coercion.
    pub fn coerce_down(&self, prec: u32) -> PAdicInt {
        PAdicInt::new(self.ring.p, prec, self.ring.truncate(self.residue, prec))
    }
}

/// p^v times a unit; the extension of `PAdicInt` used to express oracle
/// values such as -31/30 whose p-adic valuation may be negative.
#[derive(Clone, Debug)]
pub struct ValuedPAdic {
    pub valuation: i64,
    pub unit: PAdicInt,
    pub zero: bool,
}

impl ValuedPAdic {
    pub fn from_rational(r: &BigRational, p: u64, prec: u32) -> ValuedPAdic {
        let ring = Zring::new(p, prec);
        if r.is_zero() {
            return ValuedPAdic {
                valuation: 0,
                unit: PAdicInt::from_ring(ring, 0),
                zero: true,
            };
        }
        let pb = BigInt::from(p);
        let strip = |x: &BigInt| -> (i64, BigInt) {
            let mut v = 0i64;
            let mut y = x.abs();
            while (&y % &pb).is_zero() {
                y /= &pb;
                v += 1;
            }
            if x.is_negative() {
                y = -y;
            }
            (v, y)
        };
        let (vn, nu) = strip(r.numer());
        let (vd, du) = strip(r.denom());
        let nr = ring.reduce_bigint(&nu);
        let dr = ring.reduce_bigint(&du);
        let unit = ring.mul(nr, ring.inv(dr).expect("denominator unit after stripping p"));
        ValuedPAdic {
            valuation: vn - vd,
            unit: PAdicInt::from_ring(ring, unit),
            zero: false,
        }
    }
}

/// Teichmueller character omega(x): the unique phi(q)-th root of unity
/// congruent to x modulo q, computed by iterating x <- x^p to its fixed
/// point. For p = 2 this is the sign component +-1 read off x mod 4.
pub fn teichmuller(x: &PAdicInt) -> Result<PAdicInt> {
    if !x.is_unit() {
        return Err(Error::UnitRequired(x.residue, x.p()));
    }
    let ring = x.ring;
    if ring.p == 2 {
        let r = if ring.prec == 1 { 1 } else { x.residue % 4 };
        let w = if r == 1 { 1 } else { ring.pm - 1 };
        return Ok(PAdicInt::from_ring(ring, w));
    }
    let mut y = x.residue;
    loop {
        let next = ring.pow(y, ring.p);
        if next == y {
            return Ok(PAdicInt::from_ring(ring, y));
        }
        y = next;
    }
}

/// Angle projection <x> = x / omega(x), congruent to 1 modulo q.
pub fn angle(x: &PAdicInt) -> Result<PAdicInt> {
    let w = teichmuller(x)?;
    Ok(x.mul(&w.inv()?))
}

/// Small lookup table for omega and its inverse on units, prec-fixed once
/// per context and read-only afterwards.
#[derive(Clone, Debug)]
pub(crate) struct TeichTable {
    ring: Zring,
    omega: Vec<u64>,
    omega_inv: Vec<u64>,
}

impl TeichTable {
    pub fn new(ring: Zring) -> TeichTable {
        let idx = if ring.p == 2 { 4.min(ring.pm) } else { ring.p };
        let mut omega = vec![0u64; idx as usize];
        let mut omega_inv = vec![0u64; idx as usize];
        for r in 0..idx {
            if r % ring.p != 0 {
                let w = teichmuller(&PAdicInt::from_ring(ring, r)).expect("unit residue");
                omega[r as usize] = w.residue();
                omega_inv[r as usize] = ring.inv(w.residue()).expect("omega is a unit");
            }
        }
        TeichTable {
            ring,
            omega,
            omega_inv,
        }
    }

    #[inline]
    pub fn angle_raw(&self, a: u64) -> u64 {
        let idx = if self.ring.p == 2 {
            (a % 4.min(self.ring.pm)) as usize
        } else {
            (a % self.ring.p) as usize
        };
        self.ring.mul(a, self.omega_inv[idx])
    }

    #[inline]
    pub fn omega_raw(&self, a: u64) -> u64 {
        let idx = if self.ring.p == 2 {
            (a % 4.min(self.ring.pm)) as usize
        } else {
            (a % self.ring.p) as usize
        };
        self.omega[idx]
    }
}

/// log_p on 1 + qZ_p via the alternating series on x - 1, truncated once
/// the tail is below p^-M. Any lift of the residue gives the same answer
/// modulo p^M since log is an isometry there.
pub fn plog(x: &PAdicInt) -> Result<PAdicInt> {
    let ring = x.ring;
    let q = q_of(ring.p);
    if ring.pm >= q && x.residue % q.min(ring.pm) != 1 % q.min(ring.pm) {
        return Err(Error::NotOneModQ {
            residue: x.residue,
            q,
        });
    }
    let m = ring.prec;
    let vq = if ring.p == 2 { 2 } else { 1 };
    // first n from which n*vq - ilog_p(n) >= M holds onward
    let mut cutoff = 1u64;
    while (cutoff * vq) < m as u64 + ilog_p(ring.p, cutoff) as u64 {
        cutoff += 1;
    }
    let vmax = ilog_p(ring.p, cutoff);
    let work = Zring::new(ring.p, m + vmax);
    let t = x.residue.wrapping_sub(1) % ring.pm; // x - 1, lifted as is
    let mut tp = 1u64; // t^n mod p^(M+vmax)
    let mut acc = 0u64;
    for n in 1..=cutoff {
        tp = work.mul(tp, t);
        let v = ilog_p(ring.p, n); // v_p(n) <= ilog; exact below
        let mut nn = n;
        let mut vn = 0u32;
        while nn % ring.p == 0 {
            nn /= ring.p;
            vn += 1;
        }
        let _ = v;
        // t^n is divisible by p^(n*vq) >= p^vn, so the shifted quotient is
        // known mod p^(M + vmax - vn) which contains p^M
        let mut quot = tp;
        for _ in 0..vn {
            debug_assert_eq!(quot % ring.p, 0);
            quot /= ring.p;
        }
        let term = work.mul(quot % ring.pm.min(work.pm), work.inv(nn % work.pm)?) % ring.pm;
        if n % 2 == 1 {
            acc = ring.add(acc, term % ring.pm);
        } else {
            acc = ring.sub(acc, term % ring.pm);
        }
    }
    Ok(PAdicInt::from_ring(ring, acc))
}

/// Number of terms needed by `pow1q` at precision M.
pub fn pow1q_terms(p: u64, m: u32) -> usize {
    if p == 2 {
        (m as usize).div_ceil(2) + 1
    } else {
        m as usize
    }
}

/// Extra digits of s required by a binomial row of length `n_count`.
pub fn row_guard(p: u64, n_count: usize) -> u32 {
    if n_count <= 1 {
        0
    } else {
        ilog_p(p, n_count as u64 - 1)
    }
}

/// x^s for x in 1 + qZ_p and s in Z_p, via the binomial series
/// sum (x-1)^n C(s,n). The exponent must be supplied with at least
/// row_guard extra digits of precision.
pub fn pow1q(x: &PAdicInt, s: &PAdicInt) -> Result<PAdicInt> {
    let ring = x.ring;
    let q = q_of(ring.p);
    if ring.pm >= q && x.residue % q.min(ring.pm) != 1 % q.min(ring.pm) {
        return Err(Error::NotOneModQ {
            residue: x.residue,
            q,
        });
    }
    assert_eq!(ring.p, s.p(), "exponent lives over a different prime");
    let n_count = pow1q_terms(ring.p, ring.prec).max(1);
    let v = row_guard(ring.p, n_count);
    if s.precision() < ring.prec + v {
        return Err(Error::Precision(format!(
            "exponent needs precision >= {} + {} digits, got {}",
            ring.prec,
            v,
            s.precision()
        )));
    }
    let s_t = Zring::new(ring.p, ring.prec + v).truncate(
        if s.precision() == ring.prec + v {
            s.residue()
        } else {
            s.coerce_down(ring.prec + v).residue()
        },
        ring.prec + v,
    );
    let row = binomial_row_raw(ring, s_t, n_count);
    let t = ring.sub(x.residue, 1);
    let mut tp = 1u64;
    let mut acc = 0u64;
    for c in row {
        acc = ring.add(acc, ring.mul(c, tp));
        tp = ring.mul(tp, t);
    }
    Ok(PAdicInt::from_ring(ring, acc))
}

/// Binomial row C(s,0),...,C(s,N-1) modulo p^M, tracking the prime-to-p
/// part and the valuation separately, with early zero fill when the
/// shifted argument hits zero. `s_tilde` is s reduced mod p^(M+V) where V
/// is the largest integer with p^V <= N-1.
pub(crate) fn binomial_row_raw(ring: Zring, s_tilde: u64, n_count: usize) -> Vec<u64> {
    let mut out = vec![0u64; n_count];
    if n_count == 0 {
        return out;
    }
    out[0] = 1 % ring.pm;
    if n_count == 1 {
        return out;
    }
    let p = ring.p;
    let mut a_part = 1u64; // prime-to-p part, mod p^M
    let mut b_val = 0i64; // valuation
    for n in 1..n_count {
        let t = s_tilde as i128 - n as i128 + 1;
        if t == 0 {
            break; // remaining entries stay zero
        }
        let mut tb = 0u32;
        let mut ta = t.unsigned_abs();
        while ta % p as u128 == 0 {
            ta /= p as u128;
            tb += 1;
        }
        let mut ua = (ta % ring.pm as u128) as u64;
        if t < 0 {
            ua = ring.neg(ua);
        }
        let mut nn = n as u64;
        let mut vn = 0u32;
        while nn % p == 0 {
            nn /= p;
            vn += 1;
        }
        let un = ring.inv(nn % ring.pm).expect("prime-to-p part is a unit");
        a_part = ring.mul(ring.mul(ua, un), a_part);
        b_val += tb as i64 - vn as i64;
        debug_assert!(b_val >= 0, "binomial coefficients of p-adic integers are integral");
        out[n] = if b_val >= ring.prec as i64 {
            0
        } else {
            ring.mul(a_part, ring.pow(p, b_val as u64))
        };
    }
    out
}

/// Public wrapper: the row C(s,0..N-1) at precision M. `s` must carry
/// precision at least M + V.
pub fn binomial_row(s: &PAdicInt, n_count: usize, m: u32) -> Result<Vec<PAdicInt>> {
    let p = s.p();
    let v = row_guard(p, n_count);
    if s.precision() < m + v {
        return Err(Error::Precision(format!(
            "binomial row of length {} needs s mod p^{}, got precision {}",
            n_count,
            m + v,
            s.precision()
        )));
    }
    let ring = Zring::new(p, m);
    let s_t = s.coerce_down(m + v);
    let raw = binomial_row_raw(ring, s_t.residue(), n_count);
    Ok(raw
        .into_iter()
        .map(|r| PAdicInt::from_ring(ring, r))
        .collect())
}

/// L_u(x) = log_p <x> / log_p u for <x> in 1 + p^e Z_p, u a topological
/// generator of that group. Computed internally at the precision of x and
/// returned with e digits fewer, since the division loses e digits.
pub fn lu(x: &PAdicInt, u: &PAdicInt, e: u32) -> Result<PAdicInt> {
    let ring = x.ring;
    assert_eq!(ring, u.ring(), "x and u must share (p, M)");
    assert!(ring.prec > e, "need working precision above e");
    let pe = Zring::new(ring.p, e).pm;
    let table = TeichTable::new(ring);
    let ax = table.angle_raw(x.residue);
    if ax % pe != 1 % pe {
        return Err(Error::Support { e });
    }
    let lx = plog(&PAdicInt::from_ring(ring, ax))?;
    let lu_ = plog(u)?;
    let out_prec = ring.prec - e;
    let out = Zring::new(ring.p, out_prec);
    let shift = |r: u64| -> Result<u64> {
        let mut y = r;
        for _ in 0..e {
            if y % ring.p != 0 {
                return Err(Error::Support { e });
            }
            y /= ring.p;
        }
        Ok(y % out.pm)
    };
    let num = shift(lx.residue())?;
    let den = shift(lu_.residue())?;
    if den % ring.p == 0 {
        return Err(Error::Hypothesis(
            "u is not a topological generator of 1 + p^e Z_p".into(),
        ));
    }
    Ok(PAdicInt::from_ring(out, out.mul(num, out.inv(den)?)))
}

/// Default topological generator 1 + p^e at the given precision.
pub fn default_u(p: u64, prec: u32, e: u32) -> PAdicInt {
    let pe = Zring::new(p, e).pm;
    PAdicInt::new(p, prec, 1 + pe)
}
