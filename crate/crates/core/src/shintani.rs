//! Discrete cones and c-admissible cone decompositions of a modulo m,
//! for degree one (a single arithmetic progression) and degree two (the
//! convexity-polygon walk), plus a brute-force coverage verifier that
//! certifies a decomposition below a height bound with exact arithmetic.

use crate::error::{Error, Result};
use crate::field::linalg::{inv_unimodular2, snf_2x2};
use crate::field::{
    fundamental_totally_positive_unit, unit_index, Field, FieldElem, Ideal, Modulus,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::cmp::Ordering;

/// Discrete cone C(beta; lambda_1, ..., lambda_g): the set of points
/// beta + sum n_i lambda_i with n_i in N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub base: FieldElem,
    pub gens: Vec<FieldElem>,
}

/// A c-admissible cone decomposition of a modulo m: disjoint cones whose
/// union represents (a meet E_m) / U_m(E).
#[derive(Clone, Debug)]
pub struct ConeDecomposition {
    pub field: Field,
    pub ideal: Ideal,
    pub modulus: Modulus,
    pub aux: Ideal,
    pub cones: Vec<Cone>,
    /// eps_m = eps_+^(i_m) for quadratic fields
    pub unit_gen: Option<FieldElem>,
}

impl Cone {
    /// Base in a meet E_m, generators totally positive in a*f and outside
    /// the auxiliary prime, independent.
    pub fn validate(&self, dec: &ConeDecomposition) -> Result<()> {
        let f = &dec.modulus.f;
        let af = dec.ideal.mul(f);
        let one = self.base.field.one();
        if !dec.ideal.contains(&self.base)
            || !f.contains(&self.base.sub(&one))
            || !self.base.is_totally_positive()
        {
            return Err(Error::Hypothesis(
                "cone base must lie in the ideal, be 1 mod f, and be totally positive".into(),
            ));
        }
        for g in &self.gens {
            if !af.contains(g) || !g.is_totally_positive() {
                return Err(Error::Hypothesis(
                    "cone generators must be totally positive elements of a*f".into(),
                ));
            }
            if dec.aux.contains(g) {
                return Err(Error::Hypothesis(
                    "cone generator lies in the auxiliary prime".into(),
                ));
            }
        }
        if self.gens.len() == 2 {
            let det = &self.gens[0].a * &self.gens[1].b - &self.gens[0].b * &self.gens[1].a;
            if det.is_zero() {
                return Err(Error::Hypothesis("cone generators are dependent".into()));
            }
        }
        Ok(())
    }
}

/// Degree one: the unique cone C(b; a f) with b = a (a^{-1} mod f).
pub fn decompose_rational(
    a_ideal: &Ideal,
    modulus: &Modulus,
    aux: &Ideal,
) -> Result<ConeDecomposition> {
    let field = Field::Rational;
    let (Ideal::Rational { n: a }, Ideal::Rational { n: f }, Ideal::Rational { n: c }) =
        (a_ideal, &modulus.f, aux)
    else {
        return Err(Error::Invalid("rational decomposition over Q only".into()));
    };
    if !a.gcd(&(f * c)).is_one() {
        return Err(Error::Hypothesis(
            "the ideal must be coprime to f and to the auxiliary prime".into(),
        ));
    }
    // b = a * (a^{-1} mod f)
    let e = a.extended_gcd(f);
    let ainv = e.x.mod_floor(f);
    let b = a * ainv;
    let b = if b.is_zero() { f.clone() } else { b };
    let cone = Cone {
        base: FieldElem::from_bigints(field, b, BigInt::zero()),
        gens: vec![FieldElem::from_bigints(field, a * f, BigInt::zero())],
    };
    let dec = ConeDecomposition {
        field,
        ideal: a_ideal.clone(),
        modulus: modulus.clone(),
        aux: aux.clone(),
        cones: vec![cone],
        unit_gen: None,
    };
    dec.cones[0].validate(&dec)?;
    Ok(dec)
}

/// R(gamma_0, gamma_1) = -gamma_0 + ceil(gamma_0^(1)/gamma_1^(1)) gamma_1.
fn walk_step(g0: &FieldElem, g1: &FieldElem) -> FieldElem {
    let b = g0
        .div(g1)
        .expect("polygon points are totally positive")
        .embedding_ceil(1);
    g0.neg().add(&g1.mul_bigint(&b))
}

/// Exact check that gamma^(2)/gamma^(1) strictly increases along the
/// walk: the second embedding of g0 * conj(g1) equals g0^(2) g1^(1), so
/// the sign of (g0 conj(g1) - g1 conj(g0))^(2) decides the slopes.
fn ratio_increases(g0: &FieldElem, g1: &FieldElem) -> bool {
    let diff = g0.mul(&g1.conj()).sub(&g1.mul(&g0.conj()));
    diff.embedding_sign(2) == Ordering::Less
}

fn same_lattice(af: &Ideal, g0: &FieldElem, g1: &FieldElem) -> bool {
    match Ideal::from_generators(g0.field, &[g0.clone(), g1.clone()]) {
        Ok(l) => &l == af,
        Err(_) => false,
    }
}

/// Degree two: the convexity-polygon walk with in-walk avoidance of the
/// auxiliary prime, one eps_m-fundamental period long.
pub fn decompose_quadratic(
    a_ideal: &Ideal,
    modulus: &Modulus,
    aux: &Ideal,
) -> Result<ConeDecomposition> {
    let field = a_ideal.field();
    if field.degree() != 2 {
        return Err(Error::Invalid(
            "quadratic decomposition needs a degree-2 field".into(),
        ));
    }
    if !a_ideal.is_coprime_to(aux) || !a_ideal.is_coprime_to(&modulus.f) {
        return Err(Error::Hypothesis(
            "the ideal must be coprime to f and to the auxiliary prime".into(),
        ));
    }
    let af = a_ideal.mul(&modulus.f);
    let i_m = unit_index(field, &modulus.f)?;
    let eps_plus = fundamental_totally_positive_unit(field)?;
    let mut eps_m = field.one();
    for _ in 0..i_m {
        eps_m = eps_m.mul(&eps_plus);
    }

    // step 1: Z-basis (g, h) of a*f with g a rational integer
    let (g_elem, mut h) = af.basis();
    // step 2: orient h with h^(2) > h^(1), then translate h^(1) into (0, g]
    if h.sub(&h.conj()).embedding_sign(2) == Ordering::Less {
        h = h.neg();
    }
    let g_int = g_elem.a.to_integer();
    let g_fe = FieldElem::from_bigints(field, g_int.clone(), BigInt::zero());
    let shift = h.neg().div(&g_fe).unwrap().embedding_ceil(1); // ceil(-h^(1)/g)
    h = h.add(&g_fe.mul_bigint(&shift));
    let (mut g0, mut g1) = (g_elem, h);
    assert!(g1.is_totally_positive(), "oriented basis must be totally positive");

    // step 3: walk down to the convexity polygon
    let mut iterations = 0u64;
    while g1.embedding_cmp(&g0, 2) == Ordering::Less {
        let next = walk_step(&g0, &g1);
        g0 = std::mem::replace(&mut g1, next);
        iterations += 1;
        if iterations > 10_000_000 {
            return Err(Error::Internal("polygon descent failed to stabilize".into()));
        }
    }
    // step 4: keep the starting point out of the auxiliary prime
    if aux.contains(&g0) {
        let next = walk_step(&g0, &g1);
        g0 = std::mem::replace(&mut g1, next);
    }
    assert!(!aux.contains(&g0));

    // steps 5-6: one fundamental period, skipping points in the prime
    let g_last = g0.mul(&eps_m);
    let mut dec = ConeDecomposition {
        field,
        ideal: a_ideal.clone(),
        modulus: modulus.clone(),
        aux: aux.clone(),
        cones: Vec::new(),
        unit_gen: Some(eps_m.clone()),
    };
    let mut cones: Vec<Cone> = Vec::new();
    iterations = 0;
    while g0 != g_last {
        iterations += 1;
        if iterations > 10_000_000 {
            return Err(Error::Internal(
                "polygon walk failed to reach the unit translate; exact comparisons broken"
                    .into(),
            ));
        }
        // walk invariants, exact at every step
        assert!(same_lattice(&af, &g0, &g1), "lattice invariant lost");
        assert_eq!(
            g0.embedding_cmp(&g1, 1),
            Ordering::Greater,
            "first embedding must strictly decrease"
        );
        assert!(ratio_increases(&g0, &g1), "slope invariant lost");
        let (b0, b1);
        if !aux.contains(&g1) {
            b0 = g0.clone();
            b1 = g1.clone();
            let next = walk_step(&g0, &g1);
            g0 = std::mem::replace(&mut g1, next);
        } else {
            let g2 = walk_step(&g0, &g1);
            assert!(
                !aux.contains(&g2),
                "two consecutive polygon points inside the auxiliary prime"
            );
            b0 = g0.clone();
            b1 = g2.clone();
            let next = walk_step(&g1, &g2);
            g0 = g2;
            g1 = next;
        }
        for alpha in pc_points(&b0, &b1, a_ideal, modulus)? {
            cones.push(Cone {
                base: alpha,
                gens: vec![b0.clone(), b1.clone()],
            });
        }
    }
    dec.cones = cones;
    for cone in &dec.cones {
        cone.validate(&dec)?;
    }
    Ok(dec)
}

/// Representatives of the half-open rational cone: classes of
/// a/(Z b0 + Z b1) congruent to 1 mod f, in normal form inside the
/// parallelogram 0 < s <= 1, 0 <= t < 1.
pub fn pc_points(
    b0: &FieldElem,
    b1: &FieldElem,
    a_ideal: &Ideal,
    modulus: &Modulus,
) -> Result<Vec<FieldElem>> {
    let field = a_ideal.field();
    let (alpha0, alpha1) = a_ideal.basis();
    // coordinates of b0, b1 in the basis (alpha0, alpha1)
    let coord = |v: &FieldElem| -> Result<(BigInt, BigInt)> {
        let (x, y) = v
            .integer_coords()
            .ok_or_else(|| Error::Invalid("cone data must be integral".into()))?;
        let (a0x, _) = alpha0.integer_coords().unwrap();
        let (a1x, a1y) = alpha1.integer_coords().unwrap();
        if a1y.is_zero() {
            return Err(Error::Invalid("degenerate ideal basis".into()));
        }
        let (m1, r) = y.div_rem(&a1y);
        if !r.is_zero() {
            return Err(Error::Invalid("element outside the ideal".into()));
        }
        let (m0, r) = (&x - &m1 * &a1x).div_rem(&a0x);
        if !r.is_zero() {
            return Err(Error::Invalid("element outside the ideal".into()));
        }
        Ok((m0, m1))
    };
    let (m00, m10) = coord(b0)?;
    let (m01, m11) = coord(b1)?;
    let det = &m00 * &m11 - &m01 * &m10;
    if det.is_zero() {
        return Err(Error::Invalid("dependent cone generators".into()));
    }
    let m = [[m00, m01], [m10, m11]];
    let (u, d, _v) = snf_2x2(m);
    let u_inv = inv_unimodular2(&u);
    // adapted basis alpha'_j = sum_i alpha_i (u_inv)_{ij}:
    // a = Z alpha'_0 + Z alpha'_1 and the sublattice is d0 alpha'_0, d1 alpha'_1
    let ap0 = alpha0
        .mul_bigint(&u_inv[0][0])
        .add(&alpha1.mul_bigint(&u_inv[1][0]));
    let ap1 = alpha0
        .mul_bigint(&u_inv[0][1])
        .add(&alpha1.mul_bigint(&u_inv[1][1]));
    let d0 = d[0]
        .to_u64()
        .ok_or_else(|| Error::BoundExceeded("lattice index too large".into()))?;
    let d1 = d[1]
        .to_u64()
        .ok_or_else(|| Error::BoundExceeded("lattice index too large".into()))?;

    // exact solver for alpha = s b0 + t b1
    let sys_det: BigRational = &b0.a * &b1.b - &b0.b * &b1.a;
    if sys_det.is_zero() {
        return Err(Error::Invalid("dependent cone generators".into()));
    }
    let one = field.one();
    let f = &modulus.f;
    let mut out = Vec::new();
    for i in 0..d0 {
        for j in 0..d1 {
            let lift = ap0
                .mul_bigint(&BigInt::from(i))
                .add(&ap1.mul_bigint(&BigInt::from(j)));
            if !f.contains(&lift.sub(&one)) {
                continue;
            }
            let s = (&lift.a * &b1.b - &lift.b * &b1.a) / &sys_det;
            let t = (&b0.a * &lift.b - &b0.b * &lift.a) / &sys_det;
            let s_new = &s - s.ceil() + BigRational::one();
            let t_new = &t - t.floor();
            let rep_a = &b0.a * &s_new + &b1.a * &t_new;
            let rep_b = &b0.b * &s_new + &b1.b * &t_new;
            let rep = FieldElem::new(field, rep_a, rep_b);
            assert!(rep.is_integral(), "normal form must be a lattice point");
            out.push(rep);
        }
    }
    let expected = (d0 * d1) / modulus.f.norm_u64()?;
    if out.len() as u64 != expected {
        return Err(Error::Internal(format!(
            "parallelogram point count {} differs from index quotient {}",
            out.len(),
            expected
        )));
    }
    Ok(out)
}

/// Coverage report from `verify_decomposition`.
#[derive(Clone, Debug, Default)]
pub struct CoverageReport {
    pub points_checked: usize,
    pub covered_once: usize,
    pub duplicates: Vec<String>,
    pub misses: Vec<String>,
}

impl CoverageReport {
    pub fn clean(&self) -> bool {
        self.duplicates.is_empty() && self.misses.is_empty()
    }
}

fn cone_membership_i128(
    alpha: (i128, i128),
    cone_base: (i128, i128),
    gens: &[(i128, i128)],
) -> bool {
    let dx = alpha.0 - cone_base.0;
    let dy = alpha.1 - cone_base.1;
    match gens.len() {
        1 => {
            let (gx, gy) = gens[0];
            if gx != 0 {
                if dx % gx != 0 {
                    return false;
                }
                let n = dx / gx;
                n >= 0 && n * gy == dy
            } else {
                if gy == 0 || dy % gy != 0 {
                    return false;
                }
                let n = dy / gy;
                n >= 0 && dx == 0
            }
        }
        2 => {
            let (x1, y1) = gens[0];
            let (x2, y2) = gens[1];
            let det = x1 * y2 - y1 * x2;
            if det == 0 {
                return false;
            }
            let n1_num = dx * y2 - dy * x2;
            let n2_num = x1 * dy - y1 * dx;
            if n1_num % det != 0 || n2_num % det != 0 {
                return false;
            }
            (n1_num / det) >= 0 && (n2_num / det) >= 0
        }
        _ => false,
    }
}

/// Enumerate all alpha in (a meet E_m) with both embeddings in
/// (0, height] and count how often each unit orbit meets the cones.
pub fn verify_decomposition(dec: &ConeDecomposition, height: u64) -> Result<CoverageReport> {
    let mut report = CoverageReport::default();
    match dec.field {
        Field::Rational => verify_rational(dec, height, &mut report)?,
        Field::Quadratic { .. } => verify_quadratic(dec, height, &mut report)?,
    }
    Ok(report)
}

fn verify_rational(
    dec: &ConeDecomposition,
    height: u64,
    report: &mut CoverageReport,
) -> Result<()> {
    let Ideal::Rational { n: a } = &dec.ideal else {
        unreachable!()
    };
    let Ideal::Rational { n: f } = &dec.modulus.f else {
        unreachable!()
    };
    let cones: Vec<((i128, i128), Vec<(i128, i128)>)> = dec
        .cones
        .iter()
        .map(|c| {
            (
                c.base.to_i128_coords().unwrap(),
                c.gens.iter().map(|g| g.to_i128_coords().unwrap()).collect(),
            )
        })
        .collect();
    let a = a.to_i128().unwrap();
    let f = f.to_i128().unwrap();
    for alpha in 1..=height as i128 {
        if alpha % a != 0 || (alpha - 1) % f != 0 {
            continue;
        }
        report.points_checked += 1;
        let mut count = 0;
        for (base, gens) in &cones {
            if cone_membership_i128((alpha, 0), *base, gens) {
                count += 1;
            }
        }
        match count {
            1 => report.covered_once += 1,
            0 => report.misses.push(format!("{alpha}")),
            _ => report.duplicates.push(format!("{alpha} ({count} cones)")),
        }
    }
    Ok(())
}

fn verify_quadratic(
    dec: &ConeDecomposition,
    height: u64,
    report: &mut CoverageReport,
) -> Result<()> {
    let field = dec.field;
    let d = field.d().unwrap();
    let eps_m = dec
        .unit_gen
        .clone()
        .ok_or_else(|| Error::Internal("missing unit generator".into()))?;
    let eps_inv = eps_m.inv()?;
    assert!(eps_inv.is_integral());
    if dec.cones.is_empty() {
        // no cones: every point is a miss
        let mut inner = CoverageReport::default();
        enumerate_em_points(dec, height, d, |alpha| {
            inner.points_checked += 1;
            inner.misses.push(alpha.coord_string());
        })?;
        *report = inner;
        return Ok(());
    }
    let cones: Vec<((i128, i128), Vec<(i128, i128)>)> = dec
        .cones
        .iter()
        .map(|c| {
            (
                c.base.to_i128_coords().unwrap(),
                c.gens.iter().map(|g| g.to_i128_coords().unwrap()).collect(),
            )
        })
        .collect();
    // minimal base embeddings bound the unit-translate window exactly
    let min_base_1 = dec
        .cones
        .iter()
        .map(|c| &c.base)
        .min_by(|a, b| a.embedding_cmp(b, 1))
        .unwrap()
        .clone();
    let min_base_2 = dec
        .cones
        .iter()
        .map(|c| &c.base)
        .min_by(|a, b| a.embedding_cmp(b, 2))
        .unwrap()
        .clone();
    let mut inner = CoverageReport::default();
    enumerate_em_points(dec, height, d, |alpha| {
        inner.points_checked += 1;
        let mut count = 0usize;
        // translate upward while embedding 1 stays above the least base
        let mut translate = alpha.clone();
        loop {
            if translate.embedding_cmp(&min_base_1, 1) == Ordering::Less {
                break;
            }
            let tc = translate.to_i128_coords().unwrap();
            for (base, gens) in &cones {
                if cone_membership_i128(tc, *base, gens) {
                    count += 1;
                }
            }
            translate = translate.mul(&eps_m);
        }
        // translate downward while embedding 2 stays above the least base
        let mut translate = alpha.mul(&eps_inv);
        loop {
            if translate.embedding_cmp(&min_base_2, 2) == Ordering::Less {
                break;
            }
            let tc = translate.to_i128_coords().unwrap();
            for (base, gens) in &cones {
                if cone_membership_i128(tc, *base, gens) {
                    count += 1;
                }
            }
            translate = translate.mul(&eps_inv);
        }
        match count {
            1 => inner.covered_once += 1,
            0 => inner.misses.push(alpha.coord_string()),
            _ => inner
                .duplicates
                .push(format!("{} ({count} cones)", alpha.coord_string())),
        }
    })?;
    *report = inner;
    Ok(())
}

/// Exact enumeration of alpha in a meet E_m with both embeddings in
/// (0, height].
fn enumerate_em_points(
    dec: &ConeDecomposition,
    height: u64,
    d: u64,
    mut visit: impl FnMut(&FieldElem),
) -> Result<()> {
    let field = dec.field;
    let (fa, fb, fc) = match &dec.modulus.f {
        Ideal::Quadratic { a, b, c, .. } => (
            a.to_i128().unwrap(),
            b.to_i128().unwrap(),
            c.to_i128().unwrap(),
        ),
        _ => unreachable!(),
    };
    let (ia, ib, ic) = match &dec.ideal {
        Ideal::Quadratic { a, b, c, .. } => (
            a.to_i128().unwrap(),
            b.to_i128().unwrap(),
            c.to_i128().unwrap(),
        ),
        _ => unreachable!(),
    };
    let in_lattice = |x: i128, y: i128, a: i128, b: i128, c: i128| -> bool {
        if y % c != 0 {
            return false;
        }
        let k = y / c;
        (x - k * b) % a == 0
    };
    let height_b = BigInt::from(height);
    let sqd = BigInt::from(d).sqrt().to_i128().unwrap().max(1);
    let y_cap = (height as i128) / sqd + 2;
    for y in -y_cap..=y_cap {
        let ytheta = field.theta().mul_bigint(&BigInt::from(y));
        let mut lower: Option<BigInt> = None;
        let mut upper: Option<BigInt> = None;
        for emb in [1usize, 2] {
            let lo = ytheta.neg().embedding_floor(emb); // x > -y theta^(emb)
            let hi_elem =
                FieldElem::from_bigints(field, height_b.clone(), BigInt::zero()).sub(&ytheta);
            let hi = hi_elem.embedding_floor(emb); // x <= height - y theta^(emb)
            lower = Some(match lower {
                None => lo.clone(),
                Some(v) => v.max(lo.clone()),
            });
            upper = Some(match upper {
                None => hi.clone(),
                Some(v) => v.min(hi.clone()),
            });
        }
        let lo = lower.unwrap().to_i128().unwrap() + 1;
        let hi = upper.unwrap().to_i128().unwrap();
        for x in lo..=hi {
            if !in_lattice(x, y, ia, ib, ic) || !in_lattice(x - 1, y, fa, fb, fc) {
                continue;
            }
            let alpha = FieldElem::from_bigints(field, BigInt::from(x), BigInt::from(y));
            debug_assert!(alpha.is_totally_positive());
            visit(&alpha);
        }
    }
    Ok(())
}
