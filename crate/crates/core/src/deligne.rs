//! Smoothness and Deligne classification over finite fields, with small
//! extension degrees, plus the executable criteria for P-Deligne-ness.
//!
//! A homogeneous g is smooth when g and its full gradient share no common
//! zero besides the origin; checking over F_{p^m} for m up to a cap is a
//! stand-in for the algebraic closure, and verdicts say so ("SmoothUpTo")
//! rather than overclaiming.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::padic::{self, CertStatus, CertifyMode};
use crate::poly::MultiPoly;
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// F_{p^m} arithmetic
// ---------------------------------------------------------------------------

/// F_{p^m} presented as F_p[t]/(modulus), with the deterministic modulus
/// choice: the monic irreducible of degree m whose coefficient vector
/// (c_0, c_1, …) is smallest read as a base-p integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteFieldSpec {
    pub p: u64,
    pub m: u32,
    /// Monic modulus, little-endian, length m+1, modulus[m] = 1.
    pub modulus: Vec<u64>,
}

impl FiniteFieldSpec {
    pub fn new(p: u64, m: u32) -> Result<Self> {
        assert!(m >= 1);
        padic::pow_u64_checked(p, m)?;
        let deg = m as usize;
        let mut coeffs = vec![0u64; deg];
        loop {
            let mut f = coeffs.clone();
            f.push(1);
            if is_irreducible(&f, p) {
                return Ok(FiniteFieldSpec { p, m, modulus: f });
            }
            let mut i = 0;
            loop {
                if i == deg {
                    return Err(Error::Invalid(format!(
                        "no irreducible of degree {m} over F_{p} (impossible)"
                    )));
                }
                coeffs[i] += 1;
                if coeffs[i] < p {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
        }
    }

    pub fn order(&self) -> u64 {
        padic::pow_u64_checked(self.p, self.m).expect("checked at construction")
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.m as usize]
    }

    pub fn one(&self) -> Vec<u64> {
        let mut e = self.zero();
        e[0] = 1;
        e
    }

    pub fn is_zero_el(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn from_residue(&self, c: u64) -> Vec<u64> {
        let mut e = self.zero();
        e[0] = c % self.p;
        e
    }

    /// Element numbered `idx` in [0, p^m): base-p digits as coefficients.
    pub fn element(&self, mut idx: u64) -> Vec<u64> {
        let mut e = self.zero();
        for c in e.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        e
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.p as u128;
        let deg = self.m as usize;
        let mut prod = vec![0u64; 2 * deg - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u128 + x as u128 * y as u128) % p) as u64;
            }
        }
        // reduce by the monic modulus
        for i in (deg..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..deg {
                let sub = c as u128 * self.modulus[j] as u128 % p;
                prod[i - deg + j] = ((prod[i - deg + j] as u128 + p - sub) % p) as u64;
            }
        }
        prod.truncate(deg);
        prod
    }

    pub fn pow(&self, a: &[u64], mut e: u32) -> Vec<u64> {
        let mut acc = self.one();
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Evaluate an integer polynomial at a point of F_{p^m}^ℓ.
    pub fn eval(&self, h: &MultiPoly, point: &[Vec<u64>]) -> Vec<u64> {
        assert_eq!(point.len(), h.nvars());
        let pb = BigInt::from(self.p);
        let mut acc = self.zero();
        for (e, c) in h.terms() {
            let cr = c.mod_floor(&pb).to_u64().unwrap();
            if cr == 0 {
                continue;
            }
            let mut t = self.from_residue(cr);
            for (x, &ei) in point.iter().zip(e) {
                if ei > 0 {
                    t = self.mul(&t, &self.pow(x, ei));
                }
            }
            acc = self.add(&acc, &t);
        }
        acc
    }
}

// dense univariate arithmetic over F_p, little-endian, for the modulus search

fn poly_trim(f: &mut Vec<u64>) {
    while f.len() > 1 && *f.last().unwrap() == 0 {
        f.pop();
    }
}

fn poly_rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.iter().map(|&c| c % p).collect();
    poly_trim(&mut r);
    let df = f.len() - 1;
    if df == 0 {
        return vec![0]; // nonzero constant divisor
    }
    let lead_inv = inv_mod(f[df], p);
    while r.len() > df {
        let c = *r.last().unwrap();
        if c != 0 {
            let shift = r.len() - 1 - df;
            let factor = c as u128 * lead_inv as u128 % p as u128;
            for j in 0..=df {
                let sub = factor * f[j] as u128 % p as u128;
                r[shift + j] = ((r[shift + j] as u128 + p as u128 - sub) % p as u128) as u64;
            }
        }
        r.pop();
        poly_trim(&mut r);
    }
    poly_trim(&mut r);
    r
}

fn poly_mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    poly_rem(&prod, f, p)
}

fn poly_pow_mod(a: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut base = poly_rem(a, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mul_mod(&acc, &base, f, p);
        }
        base = poly_mul_mod(&base, &base, f, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !(y.len() == 1 && y[0] == 0) {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0) % p;
        let y = b.get(i).copied().unwrap_or(0) % p;
        *o = (x + p - y) % p;
    }
    poly_trim(&mut out);
    out
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * base as u128 % p as u128) as u64;
        }
        base = (base as u128 * base as u128 % p as u128) as u64;
        e >>= 1;
    }
    acc
}

/// x^{p^m} ≡ x mod f, and gcd(x^{p^{m/t}} − x, f) = 1 for prime t | m.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let m = (f.len() - 1) as u32;
    if m == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    // frobs[i] = x^{p^{i+1}} mod f
    let mut frobs = Vec::with_capacity(m as usize);
    let mut cur = x.clone();
    for _ in 0..m {
        cur = poly_pow_mod(&cur, p, f, p);
        frobs.push(cur.clone());
    }
    if poly_sub(&frobs[m as usize - 1], &x, p) != vec![0] {
        return false;
    }
    let mut t = 2;
    let mut rem = m;
    let mut prime_divisors = Vec::new();
    while t * t <= rem {
        if rem % t == 0 {
            prime_divisors.push(t);
            while rem % t == 0 {
                rem /= t;
            }
        }
        t += 1;
    }
    if rem > 1 {
        prime_divisors.push(rem);
    }
    for t in prime_divisors {
        let idx = (m / t) as usize - 1;
        let diff = poly_sub(&frobs[idx], &x, p);
        let g = poly_gcd(f, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Smoothness / Deligne verdicts
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SmoothVerdict {
    SmoothUpTo(u32),
    NotSmooth(SingularWitness),
}

/// A common zero of g and its gradient, other than the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularWitness {
    pub p: u64,
    pub ext_degree: u32,
    /// Coordinates as F_{p^m} elements (coefficient vectors over F_p).
    pub point: Vec<Vec<u64>>,
}

/// Exhaustive smoothness check of a homogeneous g over F_{p^m}, m ≤ ext_cap,
/// on projective representatives (first nonzero coordinate normalized to 1).
pub fn is_smooth_mod(g: &MultiPoly, p: u64, ext_cap: u32, cap: u64) -> Result<SmoothVerdict> {
    let gbar = g.reduce_mod(p);
    if gbar.is_zero() {
        return Err(Error::Invalid("polynomial is zero mod p".into()));
    }
    if !gbar.is_homogeneous() {
        return Err(Error::Invalid(
            "smoothness is defined for homogeneous polynomials".into(),
        ));
    }
    let ell = g.nvars();
    let grad: Vec<MultiPoly> = g.gradient();
    for m in 1..=ext_cap {
        let field = FiniteFieldSpec::new(p, m)?;
        let q = field.order();
        // projective point count (q^l - 1)/(q - 1)
        let mut proj_points: u64 = 0;
        let mut qk = 1u64;
        for _ in 0..ell {
            proj_points = proj_points.checked_add(qk).ok_or_else(|| {
                Error::SearchCapExceeded("projective point count overflow".into())
            })?;
            qk = qk
                .checked_mul(q)
                .ok_or_else(|| Error::SearchCapExceeded("field order overflow".into()))?;
        }
        if proj_points > cap {
            return Err(Error::SearchCapExceeded(format!(
                "{proj_points} projective points at p={p}, m={m} exceeds cap {cap}"
            )));
        }
        let verdict = if m <= 2 {
            smooth_scan_small_ext(&gbar, &grad, &field)
        } else {
            smooth_scan_generic(&gbar, &grad, &field)
        };
        if let Some(witness) = verdict {
            return Ok(SmoothVerdict::NotSmooth(witness));
        }
    }
    Ok(SmoothVerdict::SmoothUpTo(ext_cap))
}

fn smooth_scan_generic(
    gbar: &MultiPoly,
    grad: &[MultiPoly],
    field: &FiniteFieldSpec,
) -> Option<SingularWitness> {
    let ell = gbar.nvars();
    let q = field.order();
    for lead in 0..ell {
        let tail = ell - lead - 1;
        let combos = q.pow(tail as u32);
        for idx in 0..combos {
            let mut point: Vec<Vec<u64>> = vec![field.zero(); lead];
            point.push(field.one());
            let mut rest = idx;
            for _ in 0..tail {
                point.push(field.element(rest % q));
                rest /= q;
            }
            if !field.is_zero_el(&field.eval(gbar, &point)) {
                continue;
            }
            if grad
                .iter()
                .all(|gi| field.is_zero_el(&field.eval(gi, &point)))
            {
                return Some(SingularWitness {
                    p: field.p,
                    ext_degree: field.m,
                    point,
                });
            }
        }
    }
    None
}

/// Allocation-free scan for m ≤ 2: elements are pairs a0 + a1·t with
/// t² = −c1·t − c0.
fn smooth_scan_small_ext(
    gbar: &MultiPoly,
    grad: &[MultiPoly],
    field: &FiniteFieldSpec,
) -> Option<SingularWitness> {
    let p = field.p;
    let m = field.m;
    let q = field.order();
    let ell = gbar.nvars();
    let (c0, c1) = if m == 2 {
        (field.modulus[0], field.modulus[1])
    } else {
        (0, 0)
    };
    let pb = BigInt::from(p);
    let compile = |h: &MultiPoly| -> Vec<(Vec<u32>, u64)> {
        h.terms()
            .filter_map(|(e, c)| {
                let cr = c.mod_floor(&pb).to_u64().unwrap();
                (cr != 0).then(|| (e.to_vec(), cr))
            })
            .collect()
    };
    let g_c = compile(gbar);
    let grads_c: Vec<Vec<(Vec<u32>, u64)>> = grad.iter().map(&compile).collect();

    let mul = |a: (u64, u64), b: (u64, u64)| -> (u64, u64) {
        let pp = p as u128;
        let m0 = a.0 as u128 * b.0 as u128 % pp;
        let m1 = (a.0 as u128 * b.1 as u128 + a.1 as u128 * b.0 as u128) % pp;
        let m2 = a.1 as u128 * b.1 as u128 % pp;
        // t² = −c1·t − c0
        let r0 = (m0 + m2 * (pp - c0 as u128)) % pp;
        let r1 = (m1 + m2 * (pp - c1 as u128)) % pp;
        (r0 as u64, r1 as u64)
    };
    let pow = |a: (u64, u64), mut e: u32| -> (u64, u64) {
        let mut acc = (1u64, 0u64);
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            e >>= 1;
        }
        acc
    };
    let eval = |terms: &[(Vec<u32>, u64)], point: &[(u64, u64)]| -> (u64, u64) {
        let mut acc = (0u64, 0u64);
        for (exps, c) in terms {
            let mut t = (*c, 0u64);
            for (&x, &e) in point.iter().zip(exps) {
                if e > 0 {
                    t = mul(t, pow(x, e));
                }
            }
            acc = ((acc.0 + t.0) % p, (acc.1 + t.1) % p);
        }
        acc
    };
    let element = |idx: u64| -> (u64, u64) { (idx % p, idx / p) };

    let mut point = vec![(0u64, 0u64); ell];
    for lead in 0..ell {
        let tail = ell - lead - 1;
        let combos = q.pow(tail as u32);
        for idx in 0..combos {
            for slot in point.iter_mut().take(lead) {
                *slot = (0, 0);
            }
            point[lead] = (1, 0);
            let mut rest = idx;
            for j in 0..tail {
                point[lead + 1 + j] = element(rest % q);
                rest /= q;
            }
            if eval(&g_c, &point) != (0, 0) {
                continue;
            }
            if grads_c.iter().all(|gc| eval(gc, &point) == (0, 0)) {
                return Some(SingularWitness {
                    p,
                    ext_degree: m,
                    point: point
                        .iter()
                        .map(|&(a0, a1)| if m == 1 { vec![a0] } else { vec![a0, a1] })
                        .collect(),
                });
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeligneVerdict {
    Deligne { k: u32, smooth_up_to: u32 },
    NotDeligne(NotDeligneReason),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotDeligneReason {
    ZeroReduction,
    ConstantReduction,
    CharDividesDegree { k: u32 },
    TopPartNotSmooth(SingularWitness),
}

impl DeligneVerdict {
    pub fn is_deligne(&self) -> bool {
        matches!(self, DeligneVerdict::Deligne { .. })
    }
}

/// Deligne mod p: k = deg(h mod p) not divisible by p, and the top
/// homogeneous part of h mod p smooth.
pub fn is_deligne_mod(h: &MultiPoly, p: u64, ext_cap: u32, cap: u64) -> Result<DeligneVerdict> {
    let hbar = h.reduce_mod(p);
    let k = match hbar.degree() {
        None => return Ok(DeligneVerdict::NotDeligne(NotDeligneReason::ZeroReduction)),
        Some(0) => {
            return Ok(DeligneVerdict::NotDeligne(
                NotDeligneReason::ConstantReduction,
            ))
        }
        Some(k) => k,
    };
    if k as u64 % p == 0 {
        return Ok(DeligneVerdict::NotDeligne(
            NotDeligneReason::CharDividesDegree { k },
        ));
    }
    let top = hbar.homogeneous_part(k);
    match is_smooth_mod(&top, p, ext_cap, cap)? {
        SmoothVerdict::SmoothUpTo(m) => Ok(DeligneVerdict::Deligne { k, smooth_up_to: m }),
        SmoothVerdict::NotSmooth(w) => Ok(DeligneVerdict::NotDeligne(
            NotDeligneReason::TopPartNotSmooth(w),
        )),
    }
}

/// |{x ∈ F_p^ℓ : h(x) = 0}| by enumeration, with the diagnostic ratio
/// |count − p^(ℓ−1)| / p^(ℓ−3/2) for the hypersurface case.
pub fn point_count(h: &MultiPoly, p: u64, cap: u64) -> Result<(u64, f64)> {
    let hbar = h.reduce_mod(p);
    if hbar.degree().unwrap_or(0) == 0 {
        return Err(Error::Invalid(
            "point_count needs h nonconstant mod p".into(),
        ));
    }
    let ell = h.nvars();
    let total = (0..ell).try_fold(1u64, |acc, _| {
        acc.checked_mul(p)
            .filter(|&m| m <= cap)
            .ok_or_else(|| Error::SearchCapExceeded(format!("p^l = {p}^{ell} exceeds cap {cap}")))
    })?;
    let mut count = 0u64;
    let mut point = vec![0u64; ell];
    for _ in 0..total {
        if hbar.evaluate_mod(&point, p)? == 0 {
            count += 1;
        }
        for i in (0..ell).rev() {
            point[i] += 1;
            if point[i] < p {
                break;
            }
            point[i] = 0;
        }
    }
    let pf = p as f64;
    let expected = pf.powi(ell as i32 - 1);
    let gap = (count as f64 - expected).abs() / pf.powf(ell as f64 - 1.5);
    Ok((count, gap))
}

// ---------------------------------------------------------------------------
// Smoothness over Q by prime sampling
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    /// Implies the rational statement outright.
    Certified(String),
    /// Consistent samples, no proof.
    Empirical(String),
}

/// Smooth over ℚ, decided by sampling: smooth mod one prime of good
/// reduction certifies smoothness over ℚ; an exact small-integer singular
/// point certifies non-smoothness; otherwise the verdict is empirical.
pub fn smooth_over_q(g: &MultiPoly, ext_cap: u32, cap: u64) -> Result<(bool, Evidence)> {
    if g.is_zero() || !g.is_homogeneous() {
        return Err(Error::Invalid(
            "need a nonzero homogeneous polynomial".into(),
        ));
    }
    let k = g.degree().unwrap();

    // rational witness probe on a small integer box
    let ell = g.nvars();
    let grad = g.gradient();
    let bound = 3i64;
    let mut point = vec![-bound; ell];
    'probe: loop {
        if point.iter().any(|&c| c != 0) && g.evaluate_i64(&point)?.is_zero() {
            let singular = grad
                .iter()
                .map(|gi| gi.evaluate_i64(&point))
                .collect::<Result<Vec<_>>>()?
                .iter()
                .all(|v| v.is_zero());
            if singular {
                return Ok((
                    false,
                    Evidence::Certified(format!("integer singular point {point:?}")),
                ));
            }
        }
        for i in (0..ell).rev() {
            point[i] += 1;
            if point[i] <= bound {
                continue 'probe;
            }
            point[i] = -bound;
        }
        break;
    }

    let mut failures = Vec::new();
    let mut sampled = 0;
    let mut p = 2u64;
    while sampled < 4 {
        p = next_prime_after(p);
        let gbar = g.reduce_mod(p);
        if gbar.degree() != Some(k) {
            continue; // bad reduction
        }
        sampled += 1;
        match is_smooth_mod(g, p, ext_cap, cap)? {
            SmoothVerdict::SmoothUpTo(m) => {
                return Ok((
                    true,
                    Evidence::Certified(format!("smooth mod {p} up to extension degree {m}")),
                ));
            }
            SmoothVerdict::NotSmooth(w) => failures.push(w),
        }
    }
    let ps: Vec<u64> = failures.iter().map(|w| w.p).collect();
    Ok((
        false,
        Evidence::Empirical(format!("singular mod every sampled prime {ps:?}")),
    ))
}

fn next_prime_after(n: u64) -> u64 {
    let mut c = n + 1;
    while !crate::primes::is_prime_u64(c) {
        c += 1;
    }
    c
}

// ---------------------------------------------------------------------------
// P-Deligne criteria
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CriterionVerdict {
    Satisfied(Evidence),
    NotSatisfied(String),
    NotEvaluated(String),
}

#[derive(Debug, Clone)]
pub struct CriteriaReport {
    /// P-intersectivity certification summary for p ≤ p_max.
    pub p_intersective_certified: Vec<u64>,
    pub p_intersective_failures: Vec<u64>,
    pub p_intersective_unknown: Vec<u64>,
    /// Deligne over ℚ (nonzero degree + top part smooth, by sampling).
    pub deligne_over_q: CriterionVerdict,
    pub criterion_i: CriterionVerdict,
    pub criterion_ii: CriterionVerdict,
    pub criterion_iii: CriterionVerdict,
    pub criterion_iv: CriterionVerdict,
}

impl CriteriaReport {
    /// P-Deligne follows when any criterion holds on top of the preconditions.
    pub fn any_satisfied(&self) -> bool {
        [
            &self.criterion_i,
            &self.criterion_ii,
            &self.criterion_iii,
            &self.criterion_iv,
        ]
        .iter()
        .any(|c| matches!(c, CriterionVerdict::Satisfied(_)))
    }
}

pub fn p_deligne_criteria(
    h: &MultiPoly,
    p_max: u64,
    depth_max: u32,
    ext_cap: u32,
    cap: u64,
) -> Result<CriteriaReport> {
    let ell = h.nvars();
    let k = h
        .degree()
        .ok_or_else(|| Error::Invalid("zero polynomial".into()))?;
    if k < 2 {
        return Err(Error::Invalid("criteria apply to degree ≥ 2".into()));
    }

    // preconditions
    let certs = padic::certify(h, CertifyMode::PIntersective, p_max, depth_max, cap)?;
    let mut certified = Vec::new();
    let mut failures = Vec::new();
    let mut unknown = Vec::new();
    let mut mults: Vec<(u64, Option<u32>)> = Vec::new();
    for c in &certs {
        match &c.status {
            CertStatus::Certified { root, .. } => {
                certified.push(c.p);
                mults.push((c.p, root.multiplicity));
            }
            CertStatus::NotIntersective { .. } => failures.push(c.p),
            CertStatus::Unknown { .. } => unknown.push(c.p),
        }
    }
    let top = h.homogeneous_part(k);
    let deligne_over_q = match smooth_over_q(&top, ext_cap, cap)? {
        (true, e) => CriterionVerdict::Satisfied(e),
        (false, e) => CriterionVerdict::NotSatisfied(format!("top part not smooth ({e:?})")),
    };

    // (i) structural
    let criterion_i = if ell != 2 {
        CriterionVerdict::Satisfied(Evidence::Certified(format!("{ell} variables ≠ 2")))
    } else {
        CriterionVerdict::NotSatisfied("exactly 2 variables".into())
    };

    // (ii) ±1 root with smooth extreme parts of the recentered polynomial
    let criterion_ii = if ell != 2 {
        CriterionVerdict::NotEvaluated("two-variable criterion".into())
    } else {
        criterion_two(h, ext_cap, cap)?
    };

    // (iii) rational sub-case of the absolute-factorization criterion
    let criterion_iii = criterion_three(h, ext_cap, cap)?;

    // (iv) root multiplicities in {1, k}
    let criterion_iv = if k == 2 {
        CriterionVerdict::Satisfied(Evidence::Certified(
            "degree 2: every root multiplicity lies in {1, 2}".into(),
        ))
    } else {
        let bad: Vec<u64> = mults
            .iter()
            .filter(|(_, m)| *m != Some(1) && *m != Some(k))
            .map(|(p, _)| *p)
            .collect();
        if !failures.is_empty() {
            CriterionVerdict::NotSatisfied(format!("not P-intersective at primes {failures:?}"))
        } else if bad.is_empty() {
            CriterionVerdict::Satisfied(Evidence::Empirical(format!(
                "all certified roots for p ≤ {p_max} have multiplicity 1 or {k} (unknown at {unknown:?})"
            )))
        } else {
            CriterionVerdict::NotSatisfied(format!(
                "certified multiplicity outside {{1, {k}}} at primes {bad:?}"
            ))
        }
    };

    Ok(CriteriaReport {
        p_intersective_certified: certified,
        p_intersective_failures: failures,
        p_intersective_unknown: unknown,
        deligne_over_q,
        criterion_i,
        criterion_ii,
        criterion_iii,
        criterion_iv,
    })
}

fn criterion_two(h: &MultiPoly, ext_cap: u32, cap: u64) -> Result<CriterionVerdict> {
    let mut tried = Vec::new();
    for a in [-1i64, 1] {
        for b in [-1i64, 1] {
            if !h.evaluate_i64(&[a, b])?.is_zero() {
                continue;
            }
            tried.push((a, b));
            let shifted = h.shift_scale(&[BigInt::from(a), BigInt::from(b)], &BigInt::from(1))?;
            let k = shifted.degree().unwrap();
            let low_deg = match (0..=k).find(|&i| !shifted.homogeneous_part(i).is_zero()) {
                Some(0) | None => continue, // excluded by h(a,b) = 0
                Some(d) => d,
            };
            let top = shifted.homogeneous_part(k);
            let low = shifted.homogeneous_part(low_deg);
            let (top_ok, te) = smooth_over_q(&top, ext_cap, cap)?;
            let (low_ok, le) = smooth_over_q(&low, ext_cap, cap)?;
            if top_ok && low_ok {
                return Ok(CriterionVerdict::Satisfied(Evidence::Certified(format!(
                    "h({a},{b}) = 0; top part: {te:?}; bottom part: {le:?}"
                ))));
            }
        }
    }
    if tried.is_empty() {
        Ok(CriterionVerdict::NotSatisfied(
            "h(a,b) ≠ 0 for all a,b ∈ {-1,1}".into(),
        ))
    } else {
        Ok(CriterionVerdict::NotSatisfied(format!(
            "roots {tried:?} found, but some extreme part is not smooth"
        )))
    }
}

/// The rational sub-case: strip coordinate-variable factors, then certify the
/// remaining factor absolutely irreducible (degree 1; Deligne in ≥ 3
/// variables; nondegenerate conic), or split a degenerate conic exactly.
fn criterion_three(h: &MultiPoly, ext_cap: u32, cap: u64) -> Result<CriterionVerdict> {
    let ell = h.nvars();
    let mut g = h.clone();
    loop {
        let mut stripped = false;
        for i in 0..ell {
            if let Some(q) = divide_by_variable(&g, i) {
                g = q;
                stripped = true;
            }
        }
        if !stripped {
            break;
        }
    }
    let k = match g.degree() {
        None | Some(0) => {
            return Ok(CriterionVerdict::NotSatisfied(
                "every irreducible factor is a coordinate variable".into(),
            ))
        }
        Some(k) => k,
    };
    if k == 1 {
        return Ok(CriterionVerdict::Satisfied(Evidence::Certified(
            "a rational linear factor not divisible by any variable".into(),
        )));
    }
    if ell >= 3 {
        let top = g.homogeneous_part(k);
        if let (true, e) = smooth_over_q(&top, ext_cap, cap)? {
            return Ok(CriterionVerdict::Satisfied(Evidence::Certified(format!(
                "factor is Deligne in {ell} ≥ 3 variables, hence geometrically irreducible ({e:?})"
            ))));
        }
        return Ok(CriterionVerdict::NotEvaluated(
            "absolute factorization beyond the Deligne shortcut is out of scope".into(),
        ));
    }
    if ell == 2 && k == 2 {
        return conic_case(&g);
    }
    Ok(CriterionVerdict::NotEvaluated(
        "no rational sub-case applies; absolute factorization is out of scope".into(),
    ))
}

/// Exact conic analysis over ℚ via the 3×3 symmetric matrix of the
/// homogenization.
fn conic_case(g: &MultiPoly) -> Result<CriterionVerdict> {
    let c = |e: &[u32]| g.coefficient(e);
    let (a, b, cc) = (c(&[2, 0]), c(&[1, 1]), c(&[0, 2]));
    let (d, e, f) = (c(&[1, 0]), c(&[0, 1]), c(&[0, 0]));
    // det of [[2a, b, d], [b, 2c, e], [d, e, 2f]]
    let two = BigInt::from(2);
    let det = &two * &a * (&two * &cc * &two * &f - &e * &e) - &b * (&b * &two * &f - &e * &d)
        + &d * (&b * &e - &two * &cc * &d);
    if !det.is_zero() {
        return Ok(CriterionVerdict::Satisfied(Evidence::Certified(
            "nondegenerate conic (nonzero homogenization determinant), hence absolutely irreducible"
                .into(),
        )));
    }
    // degenerate: a pair of lines, rational exactly when the top-form
    // discriminant is a perfect square
    let disc = &b * &b - BigInt::from(4) * &a * &cc;
    if is_perfect_square(&disc) {
        Ok(CriterionVerdict::Satisfied(Evidence::Certified(
            "degenerate conic splitting into rational lines, neither a coordinate axis".into(),
        )))
    } else {
        Ok(CriterionVerdict::NotSatisfied(
            "degenerate conic splitting over a quadratic field: at inert primes no factor has Z_p coefficients"
                .into(),
        ))
    }
}

fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &(&r * &r) == n
}

fn divide_by_variable(g: &MultiPoly, i: usize) -> Option<MultiPoly> {
    if !g.divisible_by_variable(i) {
        return None;
    }
    let terms: Vec<(Vec<u32>, BigInt)> = g
        .terms()
        .map(|(e, c)| {
            let mut e = e.to_vec();
            e[i] -= 1;
            (e, c.clone())
        })
        .collect();
    Some(MultiPoly::from_terms(g.nvars(), terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> MultiPoly {
        MultiPoly::parse(s).unwrap()
    }

    const CAP: u64 = 1 << 22;

    #[test]
    fn modulus_is_irreducible_by_brute_force() {
        for p in [2u64, 3, 5, 7] {
            for m in 2..=3u32 {
                let f = FiniteFieldSpec::new(p, m).unwrap();
                // degree 2 and 3: irreducible iff no roots in F_p
                for x in 0..p {
                    let mut acc = 0u64;
                    let mut pw = 1u64;
                    for &c in &f.modulus {
                        acc = (acc + c * pw) % p;
                        pw = pw * x % p;
                    }
                    assert_ne!(acc, 0, "modulus for F_{{{p}^{m}}} has root {x}");
                }
            }
        }
    }

    #[test]
    fn field_elements_satisfy_fermat() {
        let f = FiniteFieldSpec::new(3, 2).unwrap();
        for idx in 1..f.order() {
            let a = f.element(idx);
            assert_eq!(f.pow(&a, 8), f.one(), "a^(q-1) != 1 for idx {idx}");
        }
    }

    #[test]
    fn smoothness_examples() {
        let v = is_smooth_mod(&poly("x^2+y^2"), 5, 2, CAP).unwrap();
        assert_eq!(v, SmoothVerdict::SmoothUpTo(2));

        let v = is_smooth_mod(&poly("(x+y)^2"), 7, 2, CAP).unwrap();
        match v {
            SmoothVerdict::NotSmooth(w) => {
                assert_eq!(w.ext_degree, 1);
                // witness lies on the line x + y = 0
                let f = FiniteFieldSpec::new(7, 1).unwrap();
                let s = f.add(&w.point[0], &w.point[1]);
                assert!(f.is_zero_el(&s));
            }
            other => panic!("expected NotSmooth, got {other:?}"),
        }

        let v = is_smooth_mod(&poly("x^2"), 3, 2, CAP).unwrap();
        assert_eq!(v, SmoothVerdict::SmoothUpTo(2));
    }

    #[test]
    fn not_smooth_witnesses_verify_in_the_extension() {
        let g = poly("(x+2*y)^2");
        for p in [3u64, 7, 11] {
            match is_smooth_mod(&g, p, 2, CAP).unwrap() {
                SmoothVerdict::NotSmooth(w) => {
                    let f = FiniteFieldSpec::new(w.p, w.ext_degree).unwrap();
                    assert!(f.is_zero_el(&f.eval(&g, &w.point)));
                    for gi in g.gradient() {
                        assert!(f.is_zero_el(&f.eval(&gi, &w.point)));
                    }
                }
                other => panic!("expected NotSmooth at p={p}, got {other:?}"),
            }
        }
    }

    #[test]
    fn deligne_examples() {
        let v = is_deligne_mod(&poly("x^2+y^2+x"), 2, 2, CAP).unwrap();
        assert_eq!(
            v,
            DeligneVerdict::NotDeligne(NotDeligneReason::CharDividesDegree { k: 2 })
        );

        let v = is_deligne_mod(&poly("x^2+y^2+x"), 5, 2, CAP).unwrap();
        assert!(v.is_deligne());

        let v = is_deligne_mod(&poly("2*x^2-2*x"), 2, 2, CAP).unwrap();
        assert_eq!(
            v,
            DeligneVerdict::NotDeligne(NotDeligneReason::ZeroReduction)
        );
    }

    #[test]
    fn deligne_stable_under_unit_scaling() {
        let h = poly("x^2+y^2+x");
        for p in [3u64, 5, 7, 11] {
            let base = is_deligne_mod(&h, p, 2, CAP).unwrap().is_deligne();
            for c in 1..p {
                let scaled = h.scale(&BigInt::from(c));
                assert_eq!(
                    is_deligne_mod(&scaled, p, 2, CAP).unwrap().is_deligne(),
                    base,
                    "p={p}, c={c}"
                );
            }
        }
    }

    #[test]
    fn point_count_examples() {
        let (n, _) = point_count(&poly("x^2+y^2"), 5, CAP).unwrap();
        assert_eq!(n, 9);
        let (n, _) = point_count(&poly("x^2+y^2"), 7, CAP).unwrap();
        assert_eq!(n, 1);
        let (n, _) = point_count(&poly("x-y"), 11, CAP).unwrap();
        assert_eq!(n, 11);
    }

    #[test]
    fn smooth_conic_counts_match_classical_values() {
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
            let (n, _) = point_count(&poly("x^2+y^2"), p, CAP).unwrap();
            assert!(n == 1 || n == 2 * p - 1, "p={p}, count={n}");
        }
    }

    #[test]
    fn lang_weil_gap_bounded_for_irreducible_hypersurfaces() {
        // smooth conics/quadrics are geometrically irreducible
        let conic = poly("x^2+y^2-2");
        let quadric = poly("x^2+y^2+z^2-3");
        let mut worst = 0.0f64;
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
            let (_, gap) = point_count(&conic, p, CAP).unwrap();
            worst = worst.max(gap);
            let (_, gap) = point_count(&quadric, p, CAP).unwrap();
            worst = worst.max(gap);
        }
        // expected O(k^2) scale; k = 2 here
        assert!(worst <= 4.0, "worst Lang-Weil ratio {worst}");
    }

    #[test]
    fn criteria_examples() {
        // l = 3: criterion (i) structural
        let r = p_deligne_criteria(&poly("x^2+y^2+z^2-3"), 30, 6, 2, CAP).unwrap();
        assert!(matches!(r.criterion_i, CriterionVerdict::Satisfied(_)));
        assert!(r.any_satisfied());

        // x^2+y^2-2: (iv) structural for k=2, (ii) via (1,1), (iii) via the conic route
        let r = p_deligne_criteria(&poly("x^2+y^2-2"), 30, 6, 2, CAP).unwrap();
        assert!(matches!(r.criterion_iv, CriterionVerdict::Satisfied(_)));
        assert!(matches!(r.criterion_ii, CriterionVerdict::Satisfied(_)));
        assert!(matches!(r.criterion_i, CriterionVerdict::NotSatisfied(_)));
        assert!(matches!(r.criterion_iii, CriterionVerdict::Satisfied(_)));
    }

    #[test]
    fn criterion_iii_degenerate_cases() {
        // x*y: all factors are coordinate variables
        let v = criterion_three(&poly("x*y"), 2, CAP).unwrap();
        assert!(matches!(v, CriterionVerdict::NotSatisfied(_)));
        // x^2 - 2*y^2 splits over Q(sqrt 2) only
        let v = criterion_three(&poly("x^2-2*y^2"), 2, CAP).unwrap();
        assert!(matches!(v, CriterionVerdict::NotSatisfied(_)));
        // x^2 - y^2: rational lines x±y
        let v = criterion_three(&poly("x^2-y^2"), 2, CAP).unwrap();
        assert!(matches!(v, CriterionVerdict::Satisfied(_)));
    }
}
