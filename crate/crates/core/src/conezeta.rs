//! Per-cone p-adic computations: the additive character into the etale
//! algebra, B-value tables, the truncated cone measure, direct values of
//! the p-adic cone zeta function, and per-cone Iwasawa polynomials.
//!
//! The hot loops run over k-tuples in {0..K}^g with exact integer norms
//! reduced at a bumped precision, binomial rows per term, and a rank-one
//! accumulation into series with coefficients in the etale algebra. All
//! merging is plain modular addition, so any deterministic partition of
//! the loop produces bit-identical results.

use crate::cyclotomic::{eta_pow, trace, CycElem, CycRing};
use crate::error::{Error, Result};
use crate::field::{compute_e, Field, FieldElem, Ideal};
use crate::mahler::Measure;
use crate::padic::{
    ilog_p, pow1q_terms, q_of, row_guard, PAdicInt, TeichTable, Zring,
};
use crate::shintani::Cone;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Auxiliary-prime context: the prime ideal, its residue characteristic
/// c, the residues of the integral basis modulo the ideal, the tower
/// invariant e, and a memo of B-value tables keyed by character exponent.
pub struct AuxContext {
    pub field: Field,
    pub p: u64,
    pub e: u32,
    pub c: u64,
    pub aux_ideal: Ideal,
    /// residues t_i with theta_i = t_i mod the prime (t_0 = 1)
    pub t: Vec<u64>,
    btables: Mutex<HashMap<(u64, usize, u32), Arc<Vec<CycElem>>>>,
}

impl AuxContext {
    pub fn new(field: Field, p: u64, aux_ideal: Ideal) -> Result<AuxContext> {
        let c = aux_ideal.norm_u64()?;
        if !crate::padic::is_prime(c) || c == p {
            return Err(Error::Hypothesis(format!(
                "auxiliary prime must have prime norm different from p, got {c}"
            )));
        }
        let t = match field {
            Field::Rational => vec![1],
            Field::Quadratic { .. } => {
                let t1 = aux_ideal.theta_residue().ok_or_else(|| {
                    Error::Hypothesis("auxiliary prime must have residual degree one".into())
                })?;
                vec![1, t1]
            }
        };
        let (e, _) = compute_e(field, p);
        Ok(AuxContext {
            field,
            p,
            e,
            c,
            aux_ideal,
            t,
            btables: Mutex::new(HashMap::new()),
        })
    }

    /// Exponent a with Xi(alpha) = eta^a.
    pub fn additive_char(&self, alpha: &FieldElem) -> u64 {
        let (x, y) = alpha
            .integer_coords()
            .expect("additive character needs an integral element");
        self.exponent_xy(&x, &y)
    }

    fn exponent_xy(&self, x: &BigInt, y: &BigInt) -> u64 {
        let c = BigInt::from(self.c);
        let mut acc = x * BigInt::from(self.t[0]);
        if self.t.len() > 1 {
            acc += y * BigInt::from(self.t[1]);
        }
        acc.mod_floor(&c).to_u64().unwrap()
    }

    pub fn aux_ring(&self, prec: u32) -> Result<Arc<CycRing>> {
        CycRing::aux_prime(self.p, prec, self.c)
    }

    fn b_table(&self, ring: &Arc<CycRing>, a: u64, kk: usize) -> Result<Arc<Vec<CycElem>>> {
        let key = (a, kk, ring.zring().prec);
        if let Some(t) = self.btables.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let table = Arc::new(b_values(ring, a, kk)?);
        self.btables
            .lock()
            .unwrap()
            .insert(key, table.clone());
        Ok(table)
    }
}

/// The table B_{0..K,K}(eta^a) by the recurrence
/// B_{0,K}(x) = x (x/(x-1))^K - x + 1,
/// B_{k+1,K}(x) = x [ (-1)^(k+1) C(K+1,k+1) (x/(x-1))^K + B_{k,K} ],
/// with the power (x/(x-1))^K computed once.
pub fn b_values(ring: &Arc<CycRing>, a: u64, kk: usize) -> Result<Vec<CycElem>> {
    let c = ring
        .aux_c()
        .ok_or_else(|| Error::Invalid("B values live in the aux-prime ring".into()))?;
    if a % c == 0 {
        return Err(Error::Hypothesis(
            "admissibility violated: character exponent is zero".into(),
        ));
    }
    let z = ring.zring();
    let x = eta_pow(ring, a);
    let w = x
        .sub(&CycElem::one(ring))
        .invert()?
        .mul(&x); // x/(x-1)
    let wk = w.pow(kk as u64);
    let mut out = Vec::with_capacity(kk + 1);
    out.push(
        x.mul(&wk)
            .sub(&x)
            .add(&CycElem::one(ring)),
    );
    // binomial row C(K+1, 0..=K+1) at the working precision
    let v = row_guard(z.p, kk + 2);
    let big = Zring::new(z.p, z.prec + v);
    let binoms = crate::padic::binomial_row_raw(z, (kk as u64 + 1) % big.pm, kk + 2);
    for k in 0..kk {
        let coef = binoms[k + 1];
        let signed = if (k + 1) % 2 == 1 {
            z.neg(coef)
        } else {
            coef
        };
        let term = wk.scalar_mul(signed).add(&out[k]);
        out.push(x.mul(&term));
    }
    Ok(out)
}

/// Exact integer quadratic form for the norms N(beta + k . lambda).
struct NormForm {
    degree: usize,
    g: usize,
    base: i128,
    lin: [i128; 2],
    sq: [i128; 2],
    cross: i128,
}

impl NormForm {
    fn new(cone: &Cone) -> Result<NormForm> {
        let field = cone.base.field;
        let g = cone.gens.len();
        let to_i = |r: num_rational::BigRational| -> Result<i128> {
            r.to_integer()
                .to_i128()
                .ok_or_else(|| Error::BoundExceeded("cone data exceeds i128".into()))
        };
        let mut form = NormForm {
            degree: field.degree(),
            g,
            base: 0,
            lin: [0; 2],
            sq: [0; 2],
            cross: 0,
        };
        match field {
            Field::Rational => {
                form.base = to_i(cone.base.norm())?;
                for (i, gen) in cone.gens.iter().enumerate() {
                    form.lin[i] = to_i(gen.norm())?;
                }
            }
            Field::Quadratic { .. } => {
                form.base = to_i(cone.base.norm())?;
                for (i, gen) in cone.gens.iter().enumerate() {
                    form.lin[i] = to_i(cone.base.mul(&gen.conj()).trace())?;
                    form.sq[i] = to_i(gen.norm())?;
                }
                if g == 2 {
                    form.cross = to_i(cone.gens[0].mul(&cone.gens[1].conj()).trace())?;
                }
            }
        }
        Ok(form)
    }

    #[inline]
    fn eval(&self, k1: i128, k2: i128) -> i128 {
        match self.degree {
            1 => self.base + k1 * self.lin[0],
            _ => {
                self.base
                    + k1 * self.lin[0]
                    + k2 * self.lin[1]
                    + k1 * k1 * self.sq[0]
                    + k2 * k2 * self.sq[1]
                    + k1 * k2 * self.cross
            }
        }
    }

    fn check_range(&self, kk: i128) -> Result<()> {
        let m = self.base.unsigned_abs()
            + (kk as u128) * (self.lin[0].unsigned_abs() + self.lin[1].unsigned_abs())
            + (kk as u128)
                * (kk as u128)
                * (self.sq[0].unsigned_abs() + self.sq[1].unsigned_abs() + self.cross.unsigned_abs());
        if m >= (1u128 << 120) {
            return Err(Error::BoundExceeded("norm form exceeds i128 range".into()));
        }
        Ok(())
    }
}

/// Precomputed state for repeated binomial rows of a fixed length
/// (step 0 of the row algorithm done once).
struct RowComputer {
    ring: Zring,
    n_count: usize,
    vn: Vec<u32>,
    un_inv: Vec<u64>,
}

impl RowComputer {
    fn new(ring: Zring, n_count: usize) -> RowComputer {
        let mut vn = vec![0u32; n_count];
        let mut un_inv = vec![0u64; n_count];
        for n in 1..n_count {
            let mut m = n as u64;
            let mut v = 0;
            while m % ring.p == 0 {
                m /= ring.p;
                v += 1;
            }
            vn[n] = v;
            un_inv[n] = ring.inv(m % ring.pm).expect("prime-to-p part");
        }
        RowComputer {
            ring,
            n_count,
            vn,
            un_inv,
        }
    }

    /// out[n] = C(s_tilde, n) mod p^M for n < n_count.
    #[inline]
    fn fill(&self, s_tilde: u64, out: &mut [u64]) {
        let ring = self.ring;
        out[0] = 1 % ring.pm;
        let mut a_part = 1u64;
        let mut b_val = 0i64;
        for n in 1..self.n_count {
            let t = s_tilde as i128 - n as i128 + 1;
            if t == 0 {
                for slot in out.iter_mut().skip(n) {
                    *slot = 0;
                }
                return;
            }
            let mut tb = 0u32;
            let mut ta = t.unsigned_abs();
            while ta % ring.p as u128 == 0 {
                ta /= ring.p as u128;
                tb += 1;
            }
            let mut ua = (ta % ring.pm as u128) as u64;
            if t < 0 {
                ua = ring.neg(ua);
            }
            a_part = ring.mul(ring.mul(ua, self.un_inv[n]), a_part);
            b_val += tb as i64 - self.vn[n] as i64;
            out[n] = if b_val >= ring.prec as i64 {
                0
            } else {
                ring.mul(a_part, ring.pow(ring.p, b_val as u64))
            };
        }
    }
}

/// Lazy-reduction accumulator: u128 slots are safe for small moduli,
/// otherwise every addition reduces.
struct LazyAcc {
    pm: u64,
    lazy: bool,
    slots: Vec<u128>,
}

impl LazyAcc {
    fn new(ring: Zring, len: usize) -> LazyAcc {
        LazyAcc {
            pm: ring.pm,
            // products are < pm^2; u128 then absorbs 2^(128 - 2 log2 pm)
            // additions, far beyond any loop here when pm < 2^31
            lazy: ring.pm < (1 << 31),
            slots: vec![0u128; len],
        }
    }

    #[inline]
    fn add_product(&mut self, idx: usize, a: u64, b: u64) {
        let prod = a as u128 * b as u128;
        if self.lazy {
            self.slots[idx] += prod;
        } else {
            self.slots[idx] = (self.slots[idx] + prod) % self.pm as u128;
        }
    }

    fn finish(self, _ring: Zring) -> Vec<u64> {
        self.slots
            .into_iter()
            .map(|s| (s % self.pm as u128) as u64)
            .collect()
    }
}

/// Shared scaffolding of the three per-cone operations.
struct ConeEngine {
    ring: Arc<CycRing>,
    dim: usize,
    form: NormForm,
    b1: Arc<Vec<CycElem>>,
    b2: Option<Arc<Vec<CycElem>>>,
    a_factor: CycElem,
    kk: usize,
}

impl ConeEngine {
    fn new(cone: &Cone, ctx: &AuxContext, prec: u32, kk: usize) -> Result<ConeEngine> {
        let ring = ctx.aux_ring(prec)?;
        let beta_exp = ctx.additive_char(&cone.base);
        let gen_exp: Vec<u64> = cone.gens.iter().map(|g| ctx.additive_char(g)).collect();
        for &a in &gen_exp {
            if a == 0 {
                return Err(Error::Hypothesis(
                    "cone is not admissible: a generator lies in the auxiliary prime".into(),
                ));
            }
        }
        let mut a_factor = eta_pow(&ring, beta_exp);
        for &a in &gen_exp {
            a_factor = a_factor.mul(
                &CycElem::one(&ring)
                    .sub(&eta_pow(&ring, a))
                    .invert()?,
            );
        }
        let form = NormForm::new(cone)?;
        form.check_range(kk as i128)?;
        let b1 = ctx.b_table(&ring, gen_exp[0], kk)?;
        let b2 = if gen_exp.len() == 2 {
            Some(ctx.b_table(&ring, gen_exp[1], kk)?)
        } else {
            None
        };
        let dim = ring.degree();
        Ok(ConeEngine {
            ring,
            dim,
            form,
            b1,
            b2,
            a_factor,
            kk,
        })
    }

    /// Drive `scalars` once per tuple to fill a scalar series of length
    /// `width` for that tuple's norm; accumulate series x B products.
    fn run(
        &self,
        width: usize,
        mut scalars: impl FnMut(i128, &mut [u64]) -> Result<()>,
    ) -> Result<Vec<CycElem>> {
        let z = self.ring.zring();
        let dim = self.dim;
        let mut row = vec![0u64; width];
        let mut total: Vec<CycElem> = vec![CycElem::zero(&self.ring); width];
        match &self.b2 {
            None => {
                let mut acc = LazyAcc::new(z, width * dim);
                for k1 in 0..=self.kk {
                    let nrm = self.form.eval(k1 as i128, 0);
                    scalars(nrm, &mut row)?;
                    let b = self.b1[k1].coeffs();
                    for (j, &r) in row.iter().enumerate() {
                        if r == 0 {
                            continue;
                        }
                        for (t, &bt) in b.iter().enumerate() {
                            acc.add_product(j * dim + t, r, bt);
                        }
                    }
                }
                let flat = acc.finish(z);
                for (j, slot) in total.iter_mut().enumerate() {
                    *slot = CycElem::from_coeffs(
                        &self.ring,
                        flat[j * dim..(j + 1) * dim].to_vec(),
                    );
                }
            }
            Some(b2) => {
                for k1 in 0..=self.kk {
                    let mut acc = LazyAcc::new(z, width * dim);
                    for k2 in 0..=self.kk {
                        let nrm = self.form.eval(k1 as i128, k2 as i128);
                        scalars(nrm, &mut row)?;
                        let b = b2[k2].coeffs();
                        for (j, &r) in row.iter().enumerate() {
                            if r == 0 {
                                continue;
                            }
                            for (t, &bt) in b.iter().enumerate() {
                                acc.add_product(j * dim + t, r, bt);
                            }
                        }
                    }
                    let flat = acc.finish(z);
                    let b1k = &self.b1[k1];
                    for (j, slot) in total.iter_mut().enumerate() {
                        let inner = CycElem::from_coeffs(
                            &self.ring,
                            flat[j * dim..(j + 1) * dim].to_vec(),
                        );
                        *slot = slot.add(&inner.mul(b1k));
                    }
                }
            }
        }
        Ok(total
            .into_iter()
            .map(|c| c.mul(&self.a_factor))
            .collect())
    }
}

/// The measure of the cone, as the truncated series F_N(C, c; T)
/// mod (p^M, T^N): K = (N-1) d, norms at the bumped precision p^(M+V),
/// one binomial row per k-tuple, B-products, the A(C, Xi) factor, and a
/// coefficientwise trace at the end.
pub fn cone_measure(cone: &Cone, ctx: &AuxContext, m: u32, n_coeffs: usize) -> Result<Measure> {
    assert!(n_coeffs >= 1);
    let d = cone.base.field.degree();
    let kk = (n_coeffs - 1) * d;
    let engine = ConeEngine::new(cone, ctx, m, kk)?;
    let z = engine.ring.zring();
    let v = row_guard(ctx.p, n_coeffs);
    let work = Zring::new(ctx.p, m + v);
    let rows = RowComputer::new(z, n_coeffs);
    let series = engine.run(n_coeffs, |nrm, out| {
        rows.fill(work.reduce_i128(nrm), out);
        Ok(())
    })?;
    let coeffs = series.iter().map(|c| trace(c).residue()).collect();
    Ok(Measure::from_coeffs(z, coeffs))
}

/// Direct value of the p-adic cone zeta function at s: the truncated sum
/// with K = (pM+1) d (p odd; (2M+3) d for p = 2), each term the norm
/// raised to -s through the binomial series on 1 + qZ_p.
pub fn cone_value(cone: &Cone, ctx: &AuxContext, s: &PAdicInt, m: u32) -> Result<PAdicInt> {
    let d = cone.base.field.degree();
    let kk = if ctx.p == 2 {
        (2 * m as usize + 3) * d
    } else {
        (ctx.p as usize * m as usize + 1) * d
    };
    let engine = ConeEngine::new(cone, ctx, m, kk)?;
    let z = engine.ring.zring();
    let q = q_of(ctx.p);
    // row of C(-s, n); the exponent is shared by every term
    let n_pow = pow1q_terms(ctx.p, m).max(1);
    let v = row_guard(ctx.p, n_pow);
    if s.precision() < m + v {
        return Err(Error::Precision(format!(
            "cone value needs s at precision >= {}, got {}",
            m + v,
            s.precision()
        )));
    }
    let neg_s = s.coerce_down(m + v).neg();
    let row_neg_s = crate::padic::binomial_row_raw(z, neg_s.residue(), n_pow);
    let series = engine.run(1, |nrm, out| {
        let a = z.reduce_i128(nrm);
        if a % q.min(z.pm) != 1 % q.min(z.pm) {
            return Err(Error::Hypothesis(
                "cone norm is not 1 mod q; the cone violates the modulus hypotheses".into(),
            ));
        }
        // a^{-s} = sum C(-s, n) (a-1)^n
        let t = z.sub(a, 1);
        let mut tp = 1u64;
        let mut acc = 0u64;
        for &cn in &row_neg_s {
            acc = z.add(acc, z.mul(cn, tp));
            tp = z.mul(tp, t);
        }
        out[0] = acc;
        Ok(())
    })?;
    Ok(trace(&series[0]))
}

/// Precomputed logarithm state for the Iwasawa loops: log of norms that
/// lie in 1 + p^e Z_p, divided by log u, at an internal precision e
/// digits above the target.
struct LuComputer {
    work: Zring,
    out: Zring,
    e: u32,
    cutoff: u64,
    series: Zring,
    inv_table: Vec<u64>,
    vn_table: Vec<u32>,
    log_u_inv: u64, // inverse of log(u)/p^e mod p^(target)
    teich: TeichTable,
    pe: u64,
}

impl LuComputer {
    fn new(p: u64, e: u32, target: u32, u_residue_mod_work: u64) -> Result<LuComputer> {
        let work = Zring::new(p, target + e);
        let out = Zring::new(p, target);
        // cutoff: first n with n e - v_p(n) >= target + e for all larger n
        let mut cutoff = 1u64;
        while cutoff * (e as u64) < (target + e) as u64 + ilog_p(p, cutoff) as u64 {
            cutoff += 1;
        }
        let vmax = ilog_p(p, cutoff);
        let series = Zring::new(p, target + e + vmax);
        let mut inv_table = vec![0u64; cutoff as usize + 1];
        let mut vn_table = vec![0u32; cutoff as usize + 1];
        for n in 1..=cutoff as usize {
            let mut m = n as u64;
            let mut v = 0;
            while m % p == 0 {
                m /= p;
                v += 1;
            }
            vn_table[n] = v;
            inv_table[n] = series.inv(m % series.pm)?;
        }
        let teich = TeichTable::new(work);
        let pe = Zring::new(p, e).pm;
        let mut lu = LuComputer {
            work,
            out,
            e,
            cutoff,
            series,
            inv_table,
            vn_table,
            log_u_inv: 0,
            teich,
            pe,
        };
        let log_u = lu.raw_log(u_residue_mod_work % work.pm)?;
        let mut shifted = log_u;
        for _ in 0..e {
            if shifted % p != 0 {
                return Err(Error::Hypothesis(
                    "u is not a topological generator of 1 + p^e Z_p".into(),
                ));
            }
            shifted /= p;
        }
        lu.log_u_inv = out.inv(shifted % out.pm)?;
        Ok(lu)
    }

    /// log of x (which must be 1 mod p^e) at the working precision.
    fn raw_log(&self, x: u64) -> Result<u64> {
        if x % self.pe.min(self.work.pm) != 1 % self.pe.min(self.work.pm) {
            return Err(Error::Support { e: self.e });
        }
        let t = self.work.sub(x, 1);
        let mut tp = 1u64;
        let mut acc = 0u64;
        for n in 1..=self.cutoff {
            tp = self.series.mul(tp, t);
            let vn = self.vn_table[n as usize];
            let mut quot = tp;
            for _ in 0..vn {
                debug_assert_eq!(quot % self.work.p, 0);
                quot /= self.work.p;
            }
            let term = self.series.mul(quot, self.inv_table[n as usize]) % self.work.pm;
            if n % 2 == 1 {
                acc = self.work.add(acc, term);
            } else {
                acc = self.work.sub(acc, term);
            }
        }
        Ok(acc)
    }

    /// L_u of a unit given at the working precision, at the target.
    #[inline]
    fn lu_of(&self, a: u64) -> Result<u64> {
        let ang = self.teich.angle_raw(a);
        let la = self.raw_log(ang)?;
        let mut shifted = la;
        for _ in 0..self.e {
            debug_assert_eq!(shifted % self.work.p, 0);
            shifted /= self.work.p;
        }
        Ok(self.out.mul(shifted % self.out.pm, self.log_u_inv))
    }
}

/// Per-cone Iwasawa polynomial mod (p^M, X^L) with K = (p^e(pM+L)-1) d:
/// terms norm^{-1} (1+X)^{L_u(norm)} times B-products, then the A factor
/// and the trace. Evaluating at X = u^{1-s} - 1 recovers the cone value
/// at s up to p^-M once L e >= M.
pub fn cone_iwasawa(
    cone: &Cone,
    ctx: &AuxContext,
    u: &PAdicInt,
    m: u32,
    l_count: usize,
) -> Result<Vec<PAdicInt>> {
    assert!(l_count >= 1);
    let d = cone.base.field.degree();
    let e = ctx.e;
    let pe = Zring::new(ctx.p, e).pm as usize;
    let kk = (pe * (ctx.p as usize * m as usize + l_count) - 1) * d;
    let engine = ConeEngine::new(cone, ctx, m, kk)?;
    let z = engine.ring.zring();
    let v_l = row_guard(ctx.p, l_count);
    let target = m + v_l;
    let work_prec = target + e;
    if u.precision() < work_prec {
        return Err(Error::Precision(format!(
            "iwasawa computation needs u at precision >= {work_prec}, got {}",
            u.precision()
        )));
    }
    let lu = LuComputer::new(ctx.p, e, target, u.coerce_down(work_prec).residue())?;
    let rows = RowComputer::new(z, l_count);
    let work = lu.work;
    let series = engine.run(l_count, |nrm, out| {
        let a = work.reduce_i128(nrm);
        let t = lu.lu_of(a)?;
        rows.fill(t, out);
        let inv = z.inv(a % z.pm)?;
        for slot in out.iter_mut() {
            *slot = z.mul(*slot, inv);
        }
        Ok(())
    })?;
    Ok(series
        .iter()
        .map(|c| trace(c))
        .collect())
}

/// Evaluate a polynomial over Z/p^M at t (Horner).
pub fn eval_poly_at(coeffs: &[PAdicInt], t: &PAdicInt) -> PAdicInt {
    let ring = t.ring();
    let mut acc = PAdicInt::from_ring(ring, 0);
    for c in coeffs.iter().rev() {
        acc = acc.mul(t).add(c);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Modulus;
    use crate::mahler::{integrate, moment, phi_s_fn, psi_ell_fn};
    use crate::oracle::{
        exact_b_recurrence, exact_cone_series_value, reduce_rational_mod, ExactAux, ExactCycRing,
    };
    use crate::padic::{default_u, pow1q};
    use crate::shintani::decompose_rational;
    use rand::{Rng, SeedableRng};

    /// E = Q, p = 5, M = 3, m = 5 inf, a = Z, c = 2, cone C(1; 5).
    fn fixture() -> (Cone, AuxContext) {
        let field = Field::Rational;
        let m = Modulus::new(field, Ideal::scalar(field, 5)).unwrap();
        let aux_ideal = Ideal::scalar(field, 2);
        let dec = decompose_rational(&Ideal::scalar(field, 1), &m, &aux_ideal).unwrap();
        let ctx = AuxContext::new(field, 5, aux_ideal).unwrap();
        (dec.cones[0].clone(), ctx)
    }

    #[test]
    fn additive_character_values() {
        let (_, ctx) = fixture();
        assert_eq!(ctx.additive_char(&Field::Rational.one()), 1);
        let four = FieldElem::from_integers(Field::Rational, 4, 0);
        assert_eq!(ctx.additive_char(&four), 0); // 4 is in (2)
        // additivity
        let a = FieldElem::from_integers(Field::Rational, 3, 0);
        let b = FieldElem::from_integers(Field::Rational, 7, 0);
        assert_eq!(
            ctx.additive_char(&a.add(&b)),
            (ctx.additive_char(&a) + ctx.additive_char(&b)) % 2
        );
    }

    #[test]
    fn b_values_match_exact_recurrence() {
        // modular table vs exact rational table reduced mod p^M
        for c in [2u64, 3, 7] {
            let ring = CycRing::aux_prime(5, 3, c).unwrap();
            let exact_ring = ExactCycRing::aux_prime(c);
            for kk in [0usize, 2, 5] {
                for a in 1..c {
                    let modular = b_values(&ring, a, kk).unwrap();
                    let exact = exact_b_recurrence(&exact_ring, a, kk);
                    for k in 0..=kk {
                        let reduced = exact[k].reduce_mod(&ring).unwrap();
                        assert_eq!(modular[k], reduced, "c={c} K={kk} a={a} k={k}");
                    }
                }
            }
        }
        // K = 0 gives the constant 1
        let ring = CycRing::aux_prime(5, 3, 7).unwrap();
        assert_eq!(b_values(&ring, 3, 0).unwrap()[0], CycElem::one(&ring));
        // zero exponent violates admissibility
        assert!(b_values(&ring, 0, 4).is_err());
    }

    #[test]
    fn fixture_moments() {
        let (cone, ctx) = fixture();
        let m = 3;
        let mu = cone_measure(&cone, &ctx, m, 8).unwrap();
        // moment 0 = -1/2 = 62, moment 1 = 3/4 = 32, moment 3 = -99/8 = 97
        assert_eq!(moment(&mu, 0).unwrap().residue(), 62);
        assert_eq!(moment(&mu, 1).unwrap().residue(), 32);
        assert_eq!(moment(&mu, 3).unwrap().residue(), 97);
    }

    #[test]
    fn moments_match_exact_oracle() {
        let (cone, ctx) = fixture();
        let m = 3;
        let z = Zring::new(5, m);
        let mu = cone_measure(&cone, &ctx, m, 8).unwrap();
        let aux = ExactAux { c: 2, t: vec![1] };
        for k in 0..=4usize {
            let exact = exact_cone_series_value(&cone, &aux, k).unwrap();
            let expect = reduce_rational_mod(&exact, z).unwrap();
            assert_eq!(moment(&mu, k).unwrap().residue(), expect, "k = {k}");
        }
    }

    #[test]
    fn value_at_minus_three() {
        let (cone, ctx) = fixture();
        let m = 3;
        let s = PAdicInt::from_int(5, 8, -3);
        let v = cone_value(&cone, &ctx, &s, m).unwrap();
        assert_eq!(v.residue(), 97);
        // s = 0 equals moment 0
        let s0 = PAdicInt::from_int(5, 8, 0);
        assert_eq!(cone_value(&cone, &ctx, &s0, m).unwrap().residue(), 62);
    }

    #[test]
    fn value_agrees_with_integration() {
        let (cone, ctx) = fixture();
        let m = 3;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n_coeffs = crate::mahler::phi_s_declared_n(5, m);
        let mu = cone_measure(&cone, &ctx, m, n_coeffs).unwrap();
        for _ in 0..5 {
            let s = PAdicInt::new(5, 8, rng.gen_range(0..Zring::new(5, 8).pm));
            let via_value = cone_value(&cone, &ctx, &s, m).unwrap();
            let phi = phi_s_fn(&s.neg(), m).unwrap();
            let via_integral = integrate(&phi, &mu).unwrap();
            assert_eq!(via_value.residue(), via_integral.residue());
        }
    }

    #[test]
    fn iwasawa_three_path_agreement() {
        let (cone, ctx) = fixture();
        let m = 3;
        let e = ctx.e;
        let l_count = m as usize; // L e >= M
        let big = 12;
        let u = default_u(5, big, e);
        let poly = cone_iwasawa(&cone, &ctx, &u, m, l_count).unwrap();
        // at X = 0 the polynomial gives the value at s = 1
        let s1 = PAdicInt::from_int(5, big as u32, 1);
        let direct_s1 = cone_value(&cone, &ctx, &s1, m).unwrap();
        assert_eq!(poly[0].residue(), direct_s1.residue());
        // at X = u^{1-s0} - 1 with s0 = -3 it matches the direct value 97
        let z = Zring::new(5, m);
        let one_minus_s0 = PAdicInt::from_int(5, big as u32, 4);
        let t = pow1q(&u.coerce_down(m + row_guard(5, pow1q_terms(5, m))), &one_minus_s0)
            .unwrap()
            .sub(&PAdicInt::from_ring(z, 1));
        let val = eval_poly_at(&poly, &t);
        assert_eq!(val.residue(), 97);
        // random three-path agreement
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let n_coeffs = crate::mahler::phi_s_declared_n(5, m);
        let mu = cone_measure(&cone, &ctx, m, n_coeffs).unwrap();
        for _ in 0..10 {
            let s = PAdicInt::new(5, big, rng.gen_range(0..Zring::new(5, big).pm));
            let direct = cone_value(&cone, &ctx, &s, m).unwrap();
            let phi = phi_s_fn(&s.neg(), m).unwrap();
            let via_mu = integrate(&phi, &mu).unwrap();
            // X = u^{1-s} - 1
            let one = PAdicInt::new(5, big, 1);
            let exps = one.sub(&s);
            let t = pow1q(
                &u.coerce_down(m + row_guard(5, pow1q_terms(5, m))),
                &exps,
            )
            .unwrap()
            .sub(&PAdicInt::from_ring(z, 1));
            let via_iwasawa = eval_poly_at(&poly, &t);
            assert_eq!(direct.residue(), via_mu.residue());
            assert_eq!(direct.residue(), via_iwasawa.residue());
        }
    }

    #[test]
    fn iwasawa_coefficients_are_psi_integrals() {
        let (cone, ctx) = fixture();
        let m = 2;
        let e = ctx.e;
        let l_count = 3usize;
        let big = 12;
        let u = default_u(5, big, e);
        let poly = cone_iwasawa(&cone, &ctx, &u, m, l_count).unwrap();
        let pe = Zring::new(5, e).pm as usize;
        let n_coeffs = pe * (5usize * m as usize + l_count);
        let mu = cone_measure(&cone, &ctx, m, n_coeffs).unwrap();
        for (ell, coeff) in poly.iter().enumerate() {
            let psi = psi_ell_fn(ell, &u, e, m).unwrap();
            let via_mu = integrate(&psi, &mu).unwrap();
            assert_eq!(coeff.residue(), via_mu.residue(), "coefficient {ell}");
        }
    }

    #[test]
    fn measure_supported_on_one_plus_q() {
        // indicator integration equals moment 0, and multiplying any f by
        // the indicator leaves integrals unchanged
        use crate::mahler::{indicator_fn, mahler_coeffs, MahlerFn};
        let (cone, ctx) = fixture();
        let m = 3;
        let e = ctx.e;
        let ind = indicator_fn(5, e, m);
        let n_need = ind.declared_n().max(crate::mahler::phi_s_declared_n(5, m)) + 8;
        let mu = cone_measure(&cone, &ctx, m, n_need).unwrap();
        let total = integrate(&ind, &mu).unwrap();
        assert_eq!(total.residue(), moment(&mu, 0).unwrap().residue());
        // random f: compare integral of f against f * indicator re-expanded
        let z = Zring::new(5, m);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for _ in 0..5 {
            let coeffs: Vec<u64> = (0..20).map(|_| rng.gen_range(0..z.pm)).collect();
            let f = MahlerFn::from_coeffs(z, coeffs);
            let pe = Zring::new(5, e).pm;
            let prod = mahler_coeffs(z, n_need, |n| {
                Ok(if n % pe == 1 % pe {
                    f.eval_int(n).residue()
                } else {
                    0
                })
            })
            .unwrap();
            let lhs = integrate(&f, &mu).unwrap();
            let rhs = integrate(&prod, &mu).unwrap();
            assert_eq!(lhs.residue(), rhs.residue());
        }
    }
}
