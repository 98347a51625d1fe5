//! Exponential sums: complete sums over F_p^ℓ (where the Deligne bound
//! bites), local sums G(a,q) with the w_{d,q} weights, the weighted
//! generating sum S(α), major/minor arc classification, and additive energy.
//!
//! Phases always come from exact integer residues before any conversion to
//! an angle; accumulation is compensated (Kahan) in a fixed graded-lex order
//! over the summation box.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::aux::AuxPoly;
use crate::padic::pow_u64_checked;
use crate::poly::MultiPoly;
use crate::sieve::{self, SieveProfile};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Compensated accumulation and fixed enumeration order
// ---------------------------------------------------------------------------

/// Kahan-compensated f64 accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Complex value as (re, im); kept dependency-free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn arg(&self) -> f64 {
        self.im.atan2(self.re)
    }

    pub fn conj(&self) -> Complex {
        Complex {
            re: self.re,
            im: -self.im,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct ComplexKahan {
    re: KahanSum,
    im: KahanSum,
}

impl ComplexKahan {
    fn add_polar(&mut self, magnitude: f64, angle: f64) {
        self.re.add(magnitude * angle.cos());
        self.im.add(magnitude * angle.sin());
    }

    fn value(&self) -> Complex {
        Complex {
            re: self.re.value(),
            im: self.im.value(),
        }
    }
}

/// Points of Π [lo, hi_i] in graded-lex order (total sum first, then lex).
pub fn graded_lex_points(lo: i64, hi: &[i64], cap: u64) -> Result<Vec<Vec<i64>>> {
    let volume = hi.iter().try_fold(1u64, |acc, &h| {
        if h < lo {
            return Err(Error::Invalid(format!("empty box: hi {h} < lo {lo}")));
        }
        acc.checked_mul((h - lo + 1) as u64)
            .filter(|&v| v <= cap)
            .ok_or_else(|| Error::SearchCapExceeded(format!("box volume exceeds cap {cap}")))
    })?;
    let mut points = Vec::with_capacity(volume as usize);
    let mut point = vec![lo; hi.len()];
    'outer: loop {
        points.push(point.clone());
        for i in (0..hi.len()).rev() {
            point[i] += 1;
            if point[i] <= hi[i] {
                continue 'outer;
            }
            point[i] = lo;
        }
        break;
    }
    points.sort_by(|a, b| {
        let sa: i64 = a.iter().sum();
        let sb: i64 = b.iter().sum();
        sa.cmp(&sb).then_with(|| a.cmp(b))
    });
    Ok(points)
}

fn two_pi_over(den: u64) -> f64 {
    2.0 * std::f64::consts::PI / den as f64
}

// ---------------------------------------------------------------------------
// Complete sums over F_p^l
// ---------------------------------------------------------------------------

/// Σ_{x ∈ F_p^ℓ} e(g(x)/p), phases from exact residues of g.
pub fn complete_sum(g: &MultiPoly, p: u64, cap: u64) -> Result<Complex> {
    let ell = g.nvars();
    let points = graded_lex_points(0, &vec![p as i64 - 1; ell], cap)?;
    let compiled = g.compile_mod(p);
    let unit = two_pi_over(p);
    let mut acc = ComplexKahan::default();
    let mut residues = vec![0u64; ell];
    for x in &points {
        for (r, &xi) in residues.iter_mut().zip(x) {
            *r = xi as u64;
        }
        let v = compiled.eval(&residues);
        acc.add_polar(1.0, unit * v as f64);
    }
    Ok(acc.value())
}

/// (deg g − 1)^ℓ · p^(ℓ/2), the Deligne bound for a Deligne polynomial.
pub fn deligne_bound(k: u32, ell: usize, p: u64) -> f64 {
    ((k as f64) - 1.0).powi(ell as i32) * (p as f64).powf(ell as f64 / 2.0)
}

// ---------------------------------------------------------------------------
// Local sums G(a, q)
// ---------------------------------------------------------------------------

/// Per-prime data for the w_{d,q}(s) product: the bad classes mod p^γ and
/// the denominator ((p − ε_{d,q}(p))·p^{γ−ord_p(q)−1})^ℓ.
struct LocalPrimeData {
    /// p^{ord_p(q)}.
    congruence_modulus: u64,
    /// Bad classes c mod p^γ (gradient ≡ 0, unit condition), keyed by the
    /// residue of c mod p^{ord_p(q)}; `None` when ord_p(q) = 0 (constant j).
    bad_by_residue: Option<BTreeMap<Vec<u64>, u64>>,
    /// j_d(p) when ord_p(q) = 0.
    constant_j: u64,
    denominator: f64,
}

/// Everything needed per point of the s-grid, assembled once per (d, q).
struct LocalContext {
    q: u64,
    r: Vec<i64>,
    d: u64,
    h_mod_q: crate::poly::ModularPoly,
    /// Primes with p^{γ_d(p)} | q: gradient mod p^γ must not all vanish.
    w_conditions: Vec<(u64, Vec<crate::poly::ModularPoly>)>,
    weight_data: Vec<LocalPrimeData>,
}

impl LocalContext {
    fn build(aux: &AuxPoly, profile: &SieveProfile, q: u64, cap: u64) -> Result<Self> {
        let ell = aux.h_d.nvars();
        let grad = aux.h_d.gradient();
        let r: Vec<i64> = aux
            .r_d
            .iter()
            .map(|v| {
                v.to_i64()
                    .ok_or_else(|| Error::SearchCapExceeded("r_d exceeds i64".into()))
            })
            .collect::<Result<_>>()?;
        let mut w_conditions = Vec::new();
        let mut weight_data = Vec::new();
        for rec in &profile.records {
            let gamma_modulus = pow_u64_checked(rec.p, rec.gamma)?;
            if q % gamma_modulus == 0 {
                let compiled = grad.iter().map(|g| g.compile_mod(gamma_modulus)).collect();
                w_conditions.push((gamma_modulus, compiled));
                continue;
            }
            let ord = q_ord(q, rec.p);
            let congruence_modulus = pow_u64_checked(rec.p, ord)?;
            // enumerate bad classes mod p^γ once
            let volume = (0..ell).try_fold(1u64, |acc, _| {
                acc.checked_mul(gamma_modulus)
                    .filter(|&v| v <= cap)
                    .ok_or_else(|| Error::SearchCapExceeded("local prime grid exceeds cap".into()))
            })?;
            let compiled_grad: Vec<crate::poly::ModularPoly> =
                grad.iter().map(|g| g.compile_mod(gamma_modulus)).collect();
            let r_mod_p: Vec<u64> = r
                .iter()
                .map(|&v| v.rem_euclid(rec.p as i64) as u64)
                .collect();
            let d_mod_p = aux.d % rec.p;
            let mut bad: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
            let mut total_bad = 0u64;
            let mut c = vec![0u64; ell];
            for _ in 0..volume {
                let in_j = (0..ell).all(|i| (r_mod_p[i] + d_mod_p * (c[i] % rec.p)) % rec.p != 0);
                if in_j && compiled_grad.iter().all(|g| g.eval(&c) == 0) {
                    total_bad += 1;
                    let key: Vec<u64> = c.iter().map(|&ci| ci % congruence_modulus).collect();
                    *bad.entry(key).or_insert(0) += 1;
                }
                for i in (0..ell).rev() {
                    c[i] += 1;
                    if c[i] < gamma_modulus {
                        break;
                    }
                    c[i] = 0;
                }
            }
            let eps_dq: u64 = if aux.d % rec.p == 0 || q % rec.p == 0 {
                0
            } else {
                1
            };
            let denom_base = (rec.p - eps_dq) * pow_u64_checked(rec.p, rec.gamma - ord - 1)?;
            weight_data.push(LocalPrimeData {
                congruence_modulus,
                bad_by_residue: (ord > 0).then_some(bad),
                constant_j: total_bad,
                denominator: (denom_base as f64).powi(ell as i32),
            });
        }
        Ok(LocalContext {
            q,
            r,
            d: aux.d,
            h_mod_q: aux.h_d.compile_mod(q),
            w_conditions,
            weight_data,
        })
    }

    /// s ∈ W_{d,q}(Y): images coprime to q, gradient alive at p^γ | q.
    fn member(&self, s: &[i64]) -> bool {
        for (i, &si) in s.iter().enumerate() {
            let v = self.r[i] + self.d as i64 * si;
            debug_assert!(v != 0);
            if (v.unsigned_abs()).gcd(&self.q) != 1 {
                return false;
            }
        }
        for (modulus, grads) in &self.w_conditions {
            let local: Vec<u64> = s
                .iter()
                .map(|&si| si.rem_euclid(*modulus as i64) as u64)
                .collect();
            if grads.iter().all(|g| g.eval(&local) == 0) {
                return false;
            }
        }
        true
    }

    fn weight(&self, s: &[i64]) -> f64 {
        let mut w = 1.0f64;
        for pd in &self.weight_data {
            let j = match &pd.bad_by_residue {
                None => pd.constant_j,
                Some(map) => {
                    let key: Vec<u64> = s
                        .iter()
                        .map(|&si| si.rem_euclid(pd.congruence_modulus as i64) as u64)
                        .collect();
                    map.get(&key).copied().unwrap_or(0)
                }
            };
            w *= 1.0 - j as f64 / pd.denominator;
        }
        w
    }
}

fn q_ord(mut q: u64, p: u64) -> u32 {
    let mut v = 0;
    while q % p == 0 {
        q /= p;
        v += 1;
    }
    v
}

/// G(a,q) = Σ_{s ∈ [q]^ℓ ∩ W_{d,q}(Y)} w_{d,q}(s)·e(h_d(s)·a/q), summed in
/// graded-lex order with exact integer phase residues.
pub fn local_sum_g(
    aux: &AuxPoly,
    profile: &SieveProfile,
    a: u64,
    q: u64,
    cap: u64,
) -> Result<Complex> {
    if q == 0 || a.gcd(&q) != 1 {
        return Err(Error::Invalid(format!(
            "need gcd(a, q) = 1, got a={a}, q={q}"
        )));
    }
    if q >= (1 << 31) {
        return Err(Error::SearchCapExceeded(format!("q = {q} too large")));
    }
    let ell = aux.h_d.nvars();
    let ctx = LocalContext::build(aux, profile, q, cap)?;
    let points = graded_lex_points(1, &vec![q as i64; ell], cap)?;
    let unit = two_pi_over(q);
    let mut acc = ComplexKahan::default();
    let mut residues = vec![0u64; ell];
    for s in &points {
        for (r, &si) in residues.iter_mut().zip(s) {
            *r = si.rem_euclid(q as i64) as u64;
        }
        if !ctx.member(s) {
            continue;
        }
        let w = ctx.weight(s);
        let hp = ctx.h_mod_q.eval(&residues);
        let phase_res = (hp as u128 * a as u128 % q as u128) as u64;
        acc.add_polar(w, unit * phase_res as f64);
    }
    Ok(acc.value())
}

/// G(a,q) for every a coprime to q, sharing one pass over the s-grid: the
/// weights are binned by the residue of h_d(s) mod q, then each character
/// sum is q terms. Agrees with `local_sum_g` up to summation order.
pub fn local_sum_g_all(
    aux: &AuxPoly,
    profile: &SieveProfile,
    q: u64,
    cap: u64,
) -> Result<Vec<(u64, Complex)>> {
    if q == 0 {
        return Err(Error::Invalid("q must be positive".into()));
    }
    if q >= (1 << 31) {
        return Err(Error::SearchCapExceeded(format!("q = {q} too large")));
    }
    let ell = aux.h_d.nvars();
    let ctx = LocalContext::build(aux, profile, q, cap)?;
    let points = graded_lex_points(1, &vec![q as i64; ell], cap)?;
    let mut bins = vec![0.0f64; q as usize];
    let mut residues = vec![0u64; ell];
    for s in &points {
        for (r, &si) in residues.iter_mut().zip(s) {
            *r = si.rem_euclid(q as i64) as u64;
        }
        if !ctx.member(s) {
            continue;
        }
        let w = ctx.weight(s);
        let hp = ctx.h_mod_q.eval(&residues);
        bins[hp as usize] += w;
    }
    let unit = two_pi_over(q);
    let mut out = Vec::new();
    for a in 1..=q {
        if a.gcd(&q) != 1 {
            continue;
        }
        let mut acc = ComplexKahan::default();
        for (v, &w) in bins.iter().enumerate() {
            if w != 0.0 {
                let phase_res = (v as u128 * a as u128 % q as u128) as u64;
                acc.add_polar(w, unit * phase_res as f64);
            }
        }
        out.push((a % q, acc.value()));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// S(alpha)
// ---------------------------------------------------------------------------

/// A frequency α = a/q + β with gcd(a,q) = 1 and |β| < 1/2, or a plain real.
#[derive(Debug, Clone, PartialEq)]
pub enum Alpha {
    Rational { a: u64, q: u64, beta: f64 },
    Real(f64),
}

impl Alpha {
    pub fn rational(a: u64, q: u64) -> Result<Alpha> {
        Alpha::with_offset(a, q, 0.0)
    }

    pub fn with_offset(a: u64, q: u64, beta: f64) -> Result<Alpha> {
        if q == 0 || a.gcd(&q) != 1 {
            return Err(Error::Invalid(format!("need gcd(a,q) = 1, got {a}/{q}")));
        }
        if !(beta.abs() < 0.5) {
            return Err(Error::Invalid(format!("|beta| must be < 1/2, got {beta}")));
        }
        Ok(Alpha::Rational { a: a % q, q, beta })
    }

    pub fn value(&self) -> f64 {
        match self {
            Alpha::Rational { a, q, beta } => *a as f64 / *q as f64 + beta,
            Alpha::Real(x) => *x,
        }
    }
}

/// S(α) = Σ_{n ∈ [M]^ℓ ∩ W_d(Y)} ν_d(n)·e(h_d(n)·α). For rational α the
/// a/q part of the phase comes from exact residues.
pub fn s_alpha(
    aux: &AuxPoly,
    profile: &SieveProfile,
    m_box: i64,
    alpha: &Alpha,
    cap: u64,
) -> Result<Complex> {
    assert!(m_box >= 1);
    let ell = aux.h_d.nvars();
    let points = graded_lex_points(1, &vec![m_box; ell], cap)?;
    let mut acc = ComplexKahan::default();
    let tau = 2.0 * std::f64::consts::PI;
    for n in &points {
        let w = sieve::nu_weight(aux, profile, n)?;
        if w == 0.0 {
            continue;
        }
        let h_val = aux.h_d.evaluate_i64(n)?;
        let angle = match alpha {
            Alpha::Rational { a, q, beta } => {
                let res = h_val.mod_floor(&BigInt::from(*q)).to_u64().unwrap();
                let phase_res = (res as u128 * *a as u128 % *q as u128) as u64;
                let frac_part = phase_res as f64 / *q as f64;
                let beta_part = h_val.to_f64().unwrap() * beta;
                tau * (frac_part + beta_part - beta_part.round())
            }
            Alpha::Real(x) => {
                let t = h_val.to_f64().unwrap() * x;
                tau * (t - t.round())
            }
        };
        acc.add_polar(w, angle);
    }
    Ok(acc.value())
}

// ---------------------------------------------------------------------------
// Arc classification
// ---------------------------------------------------------------------------

/// Major-arc geometry: radius γ around rationals with denominator ≤ Q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcPartition {
    pub gamma: f64,
    pub q_max: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcClass {
    Major { a: u64, q: u64 },
    Minor,
}

impl ArcPartition {
    pub fn new(gamma: f64, q_max: u64) -> Result<Self> {
        if !(gamma > 0.0) || q_max == 0 {
            return Err(Error::Invalid("need gamma > 0 and Q ≥ 1".into()));
        }
        Ok(ArcPartition { gamma, q_max })
    }

    /// Pairwise-disjoint centers are guaranteed when 2γQ² < 1.
    pub fn centers_disjoint(&self) -> bool {
        2.0 * self.gamma * (self.q_max as f64).powi(2) < 1.0
    }

    /// The covering center with smallest q (ties: smallest a), or Minor.
    pub fn classify(&self, alpha: f64) -> ArcClass {
        let x = alpha.rem_euclid(1.0);
        for q in 1..=self.q_max {
            let qf = q as f64;
            let base = (x * qf).floor() as i64;
            let mut candidates = [base, base + 1];
            candidates.sort_unstable();
            for &a_raw in &candidates {
                let dist = (x - a_raw as f64 / qf).abs();
                if dist < self.gamma {
                    let a = a_raw.rem_euclid(q as i64) as u64;
                    if a.gcd(&q) == 1 || (a == 0 && q == 1) {
                        return ArcClass::Major { a, q };
                    }
                }
            }
        }
        ArcClass::Minor
    }
}

// ---------------------------------------------------------------------------
// Additive energy
// ---------------------------------------------------------------------------

/// Torus distance ‖x‖: distance to the nearest integer, exact on rationals.
pub fn torus_norm(x: &BigRational) -> BigRational {
    let f = x - x.floor();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if f > half {
        BigRational::one() - f
    } else {
        f
    }
}

/// E_{2m}(B, ε): ordered 2m-tuples whose half-sums differ by at most ε in
/// torus norm; ε = 0 is exact equality. Everything is exact rational.
pub fn additive_energy(b: &[BigRational], m: u32, eps: &BigRational, cap: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::Invalid("m must be ≥ 1".into()));
    }
    if eps.is_negative() {
        return Err(Error::Invalid("eps must be ≥ 0".into()));
    }

    // distribution of m-fold sums on the torus; the cap bounds the work
    // actually enumerated (distinct sums × |B| per convolution round)
    let mut counts: BTreeMap<BigRational, u64> = BTreeMap::new();
    counts.insert(BigRational::zero(), 1);
    for _ in 0..m {
        let work = (counts.len() as u64)
            .checked_mul(b.len() as u64)
            .filter(|&w| w <= cap)
            .ok_or_else(|| {
                Error::SearchCapExceeded(format!(
                    "energy convolution with {} sums × |B| = {} exceeds cap {cap}",
                    counts.len(),
                    b.len()
                ))
            })?;
        let _ = work;
        let mut next: BTreeMap<BigRational, u64> = BTreeMap::new();
        for (s, c) in &counts {
            for x in b {
                let t = s + x;
                let t = &t - t.floor();
                *next.entry(t).or_insert(0) += c;
            }
        }
        counts = next;
    }

    if eps.is_zero() {
        return Ok(counts.values().map(|&c| c * c).sum());
    }

    // window counting on the circle: |s1 − s2| ≤ eps in torus norm
    let entries: Vec<(&BigRational, u64)> = counts.iter().map(|(s, &c)| (s, c)).collect();
    let mut total = 0u64;
    for &(s1, c1) in &entries {
        for &(s2, c2) in &entries {
            if torus_norm(&(s1 - s2)) <= *eps {
                total += c1 * c2;
            }
        }
    }
    Ok(total)
}

#[derive(Debug, Clone)]
pub struct EnergyBoundReport {
    pub m: u32,
    pub q_bound: u64,
    /// max_q |B_q| over reduced denominators.
    pub n_max: u64,
    pub energy: u64,
    /// E_{2m} / (Qn)^m.
    pub ratio: f64,
    /// Asserted bound (Qn)^m · (ln Q)^K.
    pub log_exponent: u32,
    pub holds: bool,
}

/// The additive-energy bound check: E_{2m}(B) against (Qn)^m·(log Q)^K for a
/// set of rationals with denominators ≤ Q.
pub fn bme_bound_check(
    b: &[BigRational],
    m: u32,
    q_bound: u64,
    log_exponent: u32,
    cap: u64,
) -> Result<EnergyBoundReport> {
    if m < 2 || q_bound < 4 {
        return Err(Error::Invalid("the bound needs m ≥ 2 and Q ≥ 4".into()));
    }
    let mut per_denominator: BTreeMap<BigInt, u64> = BTreeMap::new();
    for x in b {
        let f = x - x.floor();
        let den = f.denom().clone();
        if den > BigInt::from(q_bound) {
            return Err(Error::Invalid(format!(
                "element {x} has reduced denominator above Q = {q_bound}"
            )));
        }
        *per_denominator.entry(den).or_insert(0) += 1;
    }
    let n_max = per_denominator.values().copied().max().unwrap_or(0);
    let energy = additive_energy(b, m, &BigRational::zero(), cap)?;
    let base = ((q_bound * n_max) as f64).powi(m as i32);
    let ratio = energy as f64 / base;
    let bound = base * (q_bound as f64).ln().powi(log_exponent as i32);
    Ok(EnergyBoundReport {
        m,
        q_bound,
        n_max,
        energy,
        ratio,
        log_exponent,
        holds: (energy as f64) <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aux::{build_aux, RootChoice};
    use crate::padic::CertifyMode;
    use crate::sieve::build_profile;

    const CAP: u64 = 1 << 22;

    fn poly(s: &str) -> MultiPoly {
        MultiPoly::parse(s).unwrap()
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    fn setup(h: &str, d: u64, y: u64) -> (AuxPoly, SieveProfile) {
        let h = poly(h);
        let choice = RootChoice::certify(&h, CertifyMode::PIntersective, 50, 8, CAP).unwrap();
        let aux = build_aux(&choice, d).unwrap();
        let profile = build_profile(&aux, y, 8, CAP).unwrap();
        (aux, profile)
    }

    #[test]
    fn gauss_sum_magnitude() {
        let s = complete_sum(&poly("x^2"), 5, CAP).unwrap();
        assert!((s.abs() - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn linear_complete_sum_vanishes() {
        let s = complete_sum(&poly("x"), 7, CAP).unwrap();
        assert!(s.abs() < 1e-12);
    }

    #[test]
    fn two_variable_gauss_product() {
        let s = complete_sum(&poly("x^2+y^2"), 5, CAP).unwrap();
        assert!((s.abs() - 5.0).abs() < 1e-10);
    }

    #[test]
    fn local_sum_q1_is_w_d() {
        // q = 1: single point s = (1,…,1), no phase, weight = w_{d,1}(s);
        // with no bad classes at all this is exactly w_d · w_d^{-1}-free
        // product over p ≤ Y of (1 − j_d(p)/|J_d(p)|) = w_d.
        let (aux, profile) = setup("x^2-1", 1, 5);
        let g = local_sum_g(&aux, &profile, 1, 1, CAP).unwrap();
        assert!((g.re - profile.w_d_float).abs() < 1e-12);
        assert!(g.im.abs() < 1e-15);
    }

    #[test]
    fn hensel_vanishing_at_p_squared() {
        // q = 25 = 5², v = 2 ≥ 2γ₁(5) = 2 ⇒ G(a, 25) = 0
        let (aux, profile) = setup("x^2-1", 1, 5);
        let g = local_sum_g(&aux, &profile, 1, 25, CAP).unwrap();
        assert!(g.abs() <= 1e-9 * 25.0, "|G| = {}", g.abs());
    }

    #[test]
    fn local_sum_three_terms_by_hand() {
        // h = x²−1, d = 1, Y = 2, q = 3: s ∈ {1,2,3}; s = 3 has image 3
        // sharing a factor with q; classes s=1,2 both give h₁(s) ≡ 0 mod 3.
        // With γ₁(2) = 2 and 4 ∤ 3, w_{1,3}(s) = 1 − j/((2−1)·2)^1 = 1.
        let (aux, profile) = setup("x^2-1", 1, 2);
        let g = local_sum_g(&aux, &profile, 1, 3, CAP).unwrap();
        assert!((g.re - 2.0).abs() < 1e-12, "{g:?}");
        assert!(g.im.abs() < 1e-12);
    }

    #[test]
    fn local_sum_all_a_matches_direct() {
        let (aux, profile) = setup("x^2+y^2-2", 2, 5);
        let all = local_sum_g_all(&aux, &profile, 9, CAP).unwrap();
        for (a, g) in &all {
            let direct = local_sum_g(&aux, &profile, *a, 9, CAP).unwrap();
            assert!((g.re - direct.re).abs() < 1e-9);
            assert!((g.im - direct.im).abs() < 1e-9);
        }
    }

    #[test]
    fn s_alpha_identities() {
        let (aux, profile) = setup("x^2-1", 1, 3);
        let t = s_alpha(&aux, &profile, 50, &Alpha::rational(0, 1).unwrap(), CAP).unwrap();
        assert!(t.re > 0.0);
        assert!(t.im.abs() < 1e-12);

        // period 1: α = 1 ≡ 0
        let t1 = s_alpha(&aux, &profile, 50, &Alpha::Real(1.0), CAP).unwrap();
        assert!((t1.re - t.re).abs() < 1e-9);

        // conjugation: S(−α) = conj S(α)
        let plus = s_alpha(&aux, &profile, 50, &Alpha::Real(0.3), CAP).unwrap();
        let minus = s_alpha(&aux, &profile, 50, &Alpha::Real(-0.3), CAP).unwrap();
        assert!((plus.re - minus.re).abs() < 1e-9);
        assert!((plus.im + minus.im).abs() < 1e-9);
    }

    #[test]
    fn s_alpha_half_parity() {
        // at α = 1/2 each phase is (−1)^{h₁(n)} = (−1)^{n²−1}; odd prime
        // images n give even exponent, so only n = 2 can flip sign
        let (aux, profile) = setup("x^2-1", 1, 3);
        let t0 = s_alpha(&aux, &profile, 50, &Alpha::rational(0, 1).unwrap(), CAP).unwrap();
        let th = s_alpha(&aux, &profile, 50, &Alpha::rational(1, 2).unwrap(), CAP).unwrap();
        let nu2 = sieve::nu_weight(&aux, &profile, &[2]).unwrap();
        let h2 = aux.h_d.evaluate_i64(&[2]).unwrap().to_f64().unwrap();
        let expected = if (h2 as i64) % 2 == 0 {
            t0.re
        } else {
            t0.re - 2.0 * nu2
        };
        assert!((th.re - expected).abs() < 1e-9, "{} vs {}", th.re, expected);
    }

    #[test]
    fn arc_classification_examples() {
        let part = ArcPartition::new(0.01, 5).unwrap();
        assert_eq!(part.classify(1.0 / 3.0), ArcClass::Major { a: 1, q: 3 });

        let part = ArcPartition::new(1e-6, 10).unwrap();
        assert_eq!(part.classify(0.41421356), ArcClass::Minor);

        let part = ArcPartition::new(0.3, 4).unwrap();
        assert_eq!(part.classify(0.0), ArcClass::Major { a: 0, q: 1 });
    }

    #[test]
    fn arc_centers_unique_when_disjoint() {
        let part = ArcPartition::new(1e-3, 7).unwrap();
        assert!(part.centers_disjoint());
        // every classified center must be within gamma and reduced
        for i in 0..200 {
            let alpha = i as f64 / 200.0;
            if let ArcClass::Major { a, q } = part.classify(alpha) {
                let dist = (alpha - a as f64 / q as f64)
                    .abs()
                    .min((alpha - a as f64 / q as f64 - 1.0).abs());
                assert!(dist < part.gamma);
                assert!(q <= 7);
                if q > 1 {
                    assert_eq!(a.gcd(&q), 1);
                }
            }
        }
    }

    #[test]
    fn energy_examples() {
        let b = vec![rat(0, 1), rat(1, 2)];
        assert_eq!(
            additive_energy(&b, 1, &BigRational::zero(), CAP).unwrap(),
            2
        );

        let b = vec![rat(1, 3), rat(2, 3)];
        assert_eq!(
            additive_energy(&b, 2, &BigRational::zero(), CAP).unwrap(),
            6
        );

        let b = vec![rat(1, 5), rat(2, 5), rat(3, 5), rat(4, 7)];
        assert_eq!(
            additive_energy(&b, 1, &BigRational::zero(), CAP).unwrap(),
            b.len() as u64
        );
    }

    #[test]
    fn energy_monotone_in_eps() {
        let b = vec![rat(1, 7), rat(2, 7), rat(3, 7), rat(1, 3)];
        let mut last = 0;
        for (num, den) in [(0i64, 1i64), (1, 100), (1, 20), (1, 7), (1, 2)] {
            let e = additive_energy(&b, 2, &rat(num, den), CAP).unwrap();
            assert!(e >= last, "energy decreased at eps = {num}/{den}");
            last = e;
        }
    }

    #[test]
    fn bme_bound_on_farey_sets() {
        let mut b = Vec::new();
        for q in 1..=8i64 {
            for a in 0..q {
                if (a as u64).gcd(&(q as u64)) == 1 || (a == 0 && q == 1) {
                    b.push(rat(a, q));
                }
            }
        }
        let report = bme_bound_check(&b, 2, 8, 4, CAP).unwrap();
        assert!(report.holds, "ratio {}", report.ratio);

        // singleton
        let report = bme_bound_check(&[rat(1, 5)], 2, 5, 4, CAP).unwrap();
        assert_eq!(report.energy, 1);
        assert!(report.holds);
    }
}
