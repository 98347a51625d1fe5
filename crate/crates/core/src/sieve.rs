//! The gradient sieve: levels γ_d(p), bad-class counts j_d(p), the positive
//! density product w_d, membership in W_d(Y) and W_{d,q}(Y), the ν_d weights,
//! and the truncated inclusion-exclusion sandwich.
//!
//! Primality of sieve inputs uses the deterministic Miller–Rabin base set
//! {2,…,37}, which decides every u64 exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::aux::{euler_phi, AuxPoly};
use crate::padic::pow_u64_checked;
use crate::poly::MultiPoly;
use crate::primes::{is_prime_u64, PrimeTable};
use crate::{Error, Result};

/// Per-prime sieve data for one auxiliary polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSieveRecord {
    pub p: u64,
    /// Smallest γ with ∇h_d not identically zero mod p^γ on J_d(p).
    pub gamma: u32,
    /// Solutions of ∇h_d ≡ 0 mod p^γ on J_d(p).
    pub j: u64,
    /// |J_d(p)| = ((p − ε_d(p))·p^(γ−1))^ℓ.
    pub j_set_size: u64,
    /// 0 if p | d, 1 otherwise.
    pub eps: u8,
}

/// Sieve data for all p ≤ Y plus the product w_d, exact and floating.
#[derive(Debug, Clone)]
pub struct SieveProfile {
    pub d: u64,
    pub y: u64,
    pub records: Vec<PrimeSieveRecord>,
    pub w_d: BigRational,
    pub w_d_float: f64,
}

impl SieveProfile {
    pub fn record(&self, p: u64) -> Option<&PrimeSieveRecord> {
        self.records.iter().find(|r| r.p == p)
    }
}

/// The smallest γ ≤ cap with ∇h_d not identically vanishing mod p^γ on
/// J_d(p), the bad-class count j at that level, and |J_d(p)|.
pub fn gamma_and_j(
    aux: &AuxPoly,
    p: u64,
    gamma_cap: u32,
    volume_cap: u64,
) -> Result<(u32, u64, u64)> {
    let h_d = &aux.h_d;
    let ell = h_d.nvars();
    let grad = h_d.gradient();
    if grad.iter().all(|g| g.is_zero()) {
        return Err(Error::Invalid(
            "constant h_d has no gradient sieve level".into(),
        ));
    }
    let eps: u8 = if aux.d % p == 0 { 0 } else { 1 };
    // unit condition (r_d)_i + d·c_i ≢ 0 (mod p) depends on c_i mod p only
    let r_mod_p: Vec<u64> = aux
        .r_d
        .iter()
        .map(|r| r.mod_floor(&BigInt::from(p)).to_u64().unwrap())
        .collect();
    let d_mod_p = aux.d % p;

    for gamma in 1..=gamma_cap {
        let modulus = pow_u64_checked(p, gamma)?;
        let volume = (0..ell).try_fold(1u64, |acc, _| {
            acc.checked_mul(modulus)
                .filter(|&v| v <= volume_cap)
                .ok_or_else(|| {
                    Error::SearchCapExceeded(format!(
                        "sieve grid {p}^({gamma}·{ell}) exceeds cap {volume_cap}"
                    ))
                })
        })?;
        let mut j_count = 0u64;
        let mut j_set = 0u64;
        let mut all_vanish = true;
        let mut c = vec![0u64; ell];
        for _ in 0..volume {
            let in_j = (0..ell).all(|i| (r_mod_p[i] + d_mod_p * (c[i] % p)) % p != 0);
            if in_j {
                j_set += 1;
                let vanishes = grad
                    .iter()
                    .map(|g| g.evaluate_mod(&c, modulus))
                    .collect::<Result<Vec<_>>>()?
                    .iter()
                    .all(|&v| v == 0);
                if vanishes {
                    j_count += 1;
                } else {
                    all_vanish = false;
                }
            }
            for i in (0..ell).rev() {
                c[i] += 1;
                if c[i] < modulus {
                    break;
                }
                c[i] = 0;
            }
        }
        if j_set == 0 {
            // J empty can only happen for non-unit roots with p | d
            return Err(Error::Invalid(format!(
                "J_d({p}) is empty; the sieve requires unit coordinates at p | d"
            )));
        }
        if !all_vanish {
            let expected = ((p - eps as u64) * pow_u64_checked(p, gamma - 1)?).pow(ell as u32);
            debug_assert_eq!(j_set, expected);
            return Ok((gamma, j_count, j_set));
        }
    }
    Err(Error::GammaCapExceeded { p, cap: gamma_cap })
}

/// Build the per-prime records for p ≤ Y and the exact product
/// w_d = Π (1 − j_d(p)/|J_d(p)|).
pub fn build_profile(
    aux: &AuxPoly,
    y: u64,
    gamma_cap: u32,
    volume_cap: u64,
) -> Result<SieveProfile> {
    let table = PrimeTable::up_to(y)?;
    let records: Vec<PrimeSieveRecord> = table
        .primes()
        .par_iter()
        .map(|&p| -> Result<PrimeSieveRecord> {
            let (gamma, j, j_set_size) = gamma_and_j(aux, p, gamma_cap, volume_cap)?;
            Ok(PrimeSieveRecord {
                p,
                gamma,
                j,
                j_set_size,
                eps: if aux.d % p == 0 { 0 } else { 1 },
            })
        })
        .collect::<Result<_>>()?;
    let w_d = w_d_exact(&records)?;
    let w_d_float = w_d.to_f64().unwrap_or(f64::NAN);
    Ok(SieveProfile {
        d: aux.d,
        y,
        records,
        w_d,
        w_d_float,
    })
}

/// Exact w_d from records; errors if some factor vanishes (j = |J|), which
/// contradicts w_d > 0 and flags a broken root choice.
pub fn w_d_exact(records: &[PrimeSieveRecord]) -> Result<BigRational> {
    let mut w = BigRational::one();
    for r in records {
        if r.j >= r.j_set_size {
            return Err(Error::Invalid(format!(
                "j_d({}) = {} equals |J_d({})| = {}; w_d would vanish",
                r.p, r.j, r.p, r.j_set_size
            )));
        }
        w *= BigRational::new(BigInt::from(r.j_set_size - r.j), BigInt::from(r.j_set_size));
    }
    Ok(w)
}

/// r_d + d·n componentwise, as exact integers.
pub fn affine_image(aux: &AuxPoly, n: &[i64]) -> Vec<BigInt> {
    aux.r_d
        .iter()
        .zip(n)
        .map(|(r, &ni)| r + BigInt::from(aux.d) * BigInt::from(ni))
        .collect()
}

/// Λ_d membership: every coordinate of r_d + d·n is a (positive) prime.
pub fn in_lambda(aux: &AuxPoly, n: &[i64]) -> bool {
    affine_image(aux, n)
        .iter()
        .all(|v| v.is_positive() && v.to_u64().map(is_prime_u64).unwrap_or(false))
}

/// Gradient conditions of W_d(Y): ∇h_d(n) ≢ 0 mod p^{γ_d(p)} for all p ≤ Y.
pub fn gradient_nonvanishing(profile: &SieveProfile, h_d: &MultiPoly, n: &[i64]) -> Result<bool> {
    let grad = h_d.gradient();
    for rec in &profile.records {
        let modulus = pow_u64_checked(rec.p, rec.gamma)?;
        let residues: Vec<u64> = n
            .iter()
            .map(|&x| (x.rem_euclid(modulus as i64)) as u64)
            .collect();
        let all_zero = grad
            .iter()
            .map(|g| g.evaluate_mod(&residues, modulus))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .all(|&v| v == 0);
        if all_zero {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Full W_d(Y) membership (Λ_d plus gradient nonvanishing).
pub fn in_w(aux: &AuxPoly, profile: &SieveProfile, n: &[i64]) -> Result<bool> {
    Ok(in_lambda(aux, n) && gradient_nonvanishing(profile, &aux.h_d, n)?)
}

/// W_{d,q}(Y) membership: coordinates of r_d + d·n coprime to q, and the
/// gradient conditions at primes p ≤ Y with p^{γ_d(p)} | q.
pub fn in_w_dq(aux: &AuxPoly, profile: &SieveProfile, n: &[i64], q: u64) -> Result<bool> {
    assert!(q >= 1);
    let qb = BigInt::from(q);
    for v in affine_image(aux, n) {
        if !v.gcd(&qb).is_one() {
            return Ok(false);
        }
    }
    let grad = aux.h_d.gradient();
    for rec in &profile.records {
        let modulus = pow_u64_checked(rec.p, rec.gamma)?;
        if q % modulus != 0 {
            continue;
        }
        let residues: Vec<u64> = n
            .iter()
            .map(|&x| (x.rem_euclid(modulus as i64)) as u64)
            .collect();
        let all_zero = grad
            .iter()
            .map(|g| g.evaluate_mod(&residues, modulus))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .all(|&v| v == 0);
        if all_zero {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A box point with its ν_d weight and membership flags.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPoint {
    pub n: Vec<i64>,
    pub nu: f64,
    pub in_lambda: bool,
    pub in_w: bool,
}

/// The full record behind `nu_weight`: the weight is zero unless the point
/// lies in both Λ_d and W_d(Y).
pub fn weighted_point(aux: &AuxPoly, profile: &SieveProfile, n: &[i64]) -> Result<WeightedPoint> {
    let lambda = in_lambda(aux, n);
    let w = lambda && gradient_nonvanishing(profile, &aux.h_d, n)?;
    let nu = if w { nu_weight(aux, profile, n)? } else { 0.0 };
    Ok(WeightedPoint {
        n: n.to_vec(),
        nu,
        in_lambda: lambda,
        in_w: w,
    })
}

/// ν_d(n): w_d^{-1}·(φ(d)/d)^ℓ·Π log((r_d)_i + d·n_i)·1_{W_d(Y)}(n), with the
/// extra h_d′(n) factor when ℓ = 1. Zero when n ∉ Λ_d or n ∉ W_d(Y).
pub fn nu_weight(aux: &AuxPoly, profile: &SieveProfile, n: &[i64]) -> Result<f64> {
    let image = affine_image(aux, n);
    for v in &image {
        if !v.is_positive() {
            return Err(Error::Invalid(format!(
                "nu_weight needs positive components, got {v} at n = {n:?}"
            )));
        }
    }
    if !in_w(aux, profile, n)? {
        return Ok(0.0);
    }
    Ok(nu_unnormalized(aux, n, &image)? * norm_factor(aux, profile))
}

/// The n-independent prefactor w_d^{-1}·(φ(d)/d)^ℓ.
pub fn norm_factor(aux: &AuxPoly, profile: &SieveProfile) -> f64 {
    let ell = aux.h_d.nvars() as i32;
    let phi_ratio = euler_phi(aux.d) as f64 / aux.d as f64;
    phi_ratio.powi(ell) / profile.w_d_float
}

/// Π log((r_d)_i + d·n_i) times the ℓ = 1 derivative factor. The weight's
/// exact sign is the sign of h_d′(n) (the logs are positive on primes).
fn nu_unnormalized(aux: &AuxPoly, n: &[i64], image: &[BigInt]) -> Result<f64> {
    let mut w = 1.0f64;
    for v in image {
        w *= v.to_f64().unwrap().ln();
    }
    if aux.h_d.nvars() == 1 {
        let deriv = aux.h_d.partial(0).evaluate_i64(n)?;
        w *= deriv.to_f64().unwrap();
    }
    Ok(w)
}

// ---------------------------------------------------------------------------
// Truncated inclusion-exclusion sandwich
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SandwichReport {
    pub d: u64,
    pub y: u64,
    pub box_dims: Vec<i64>,
    /// Points of the box lying in Λ_d.
    pub lambda_points: usize,
    /// Σ_{n ∈ box} ν_d(n).
    pub true_sum: f64,
    /// (t, truncated alternating sum over subsets of ≤ t sieve primes).
    pub truncated: Vec<(u32, f64)>,
    /// Exact per-point certificate: every Λ_d point with a nonempty bad-prime
    /// set has nonnegative weight, and the integer Bonferroni inequalities
    /// hold, which implies the real bracketing rigorously.
    pub exact_certificate: bool,
    pub negative_weight_points: usize,
    pub violations: Vec<String>,
}

/// Compute Σ ν_d over the box and every truncated alternating sum
/// Σ_{s ≤ t} (−1)^s Σ_{p_1<…<p_s ≤ Y} (weighted counts over A_{p_1…p_s}),
/// asserting the sandwich inequalities exactly.
///
/// For a point with m vanishing primes, the truncation at level t contributes
/// the integer coefficient Σ_{s≤min(t,m)} (−1)^s C(m,s) = (−1)^t C(m−1,t)
/// (1 when m = 0); the bracketing certificate reduces to integer sign checks
/// against the exact (integer) sign of each point's weight.
pub fn sieve_sum_sandwich(
    aux: &AuxPoly,
    profile: &SieveProfile,
    box_dims: &[i64],
    t_values: &[u32],
    volume_cap: u64,
) -> Result<SandwichReport> {
    let ell = aux.h_d.nvars();
    assert_eq!(box_dims.len(), ell);
    let volume = box_dims.iter().try_fold(1u64, |acc, &b| {
        if b < 1 {
            return Err(Error::Invalid("box dimensions must be ≥ 1".into()));
        }
        acc.checked_mul(b as u64)
            .filter(|&v| v <= volume_cap)
            .ok_or_else(|| Error::SearchCapExceeded(format!("box exceeds cap {volume_cap}")))
    })?;
    let _ = volume;

    let z = profile.records.len() as u32;
    let mut ts: Vec<u32> = t_values.to_vec();
    if !ts.contains(&z) {
        ts.push(z); // the untruncated expansion, equal to the true sum
    }
    ts.sort_unstable();
    ts.dedup();

    let norm = norm_factor(aux, profile);
    let grad = aux.h_d.gradient();

    let mut true_sum = 0.0f64;
    let mut truncated: Vec<f64> = vec![0.0; ts.len()];
    let mut lambda_points = 0usize;
    let mut negative_weight_points = 0usize;
    let mut violations: Vec<String> = Vec::new();
    let mut exact_certificate = true;

    let mut n = vec![1i64; ell];
    'outer: loop {
        if in_lambda(aux, &n) {
            lambda_points += 1;
            // bad primes: ∇h_d(n) ≡ 0 mod p^γ
            let mut m = 0u32;
            for rec in &profile.records {
                let modulus = pow_u64_checked(rec.p, rec.gamma)?;
                let residues: Vec<u64> = n
                    .iter()
                    .map(|&x| (x.rem_euclid(modulus as i64)) as u64)
                    .collect();
                let all_zero = grad
                    .iter()
                    .map(|g| g.evaluate_mod(&residues, modulus))
                    .collect::<Result<Vec<_>>>()?
                    .iter()
                    .all(|&v| v == 0);
                if all_zero {
                    m += 1;
                }
            }
            let image = affine_image(aux, &n);
            let weight = nu_unnormalized(aux, &n, &image)?;
            // exact sign of the weight: logs of primes are positive, so only
            // the l = 1 derivative factor can flip it
            let weight_sign: i32 = if ell == 1 {
                let deriv = aux.h_d.partial(0).evaluate_i64(&n)?;
                if deriv.is_zero() {
                    0
                } else if deriv.is_positive() {
                    1
                } else {
                    -1
                }
            } else {
                1
            };
            if weight_sign < 0 {
                negative_weight_points += 1;
                if m >= 1 {
                    exact_certificate = false;
                    violations.push(format!(
                        "negative weight at sieved point n = {n:?}; bracketing not certified"
                    ));
                }
            }
            if m == 0 {
                true_sum += norm * weight;
            }
            for (ti, &t) in ts.iter().enumerate() {
                let coeff = bonferroni_coefficient(m, t);
                // integer Bonferroni: (coeff − [m = 0]) has sign (−1)^t
                let drift = coeff - i64::from(m == 0);
                let expected_nonneg = t % 2 == 0;
                if (expected_nonneg && drift < 0) || (!expected_nonneg && drift > 0) {
                    exact_certificate = false;
                    violations.push(format!(
                        "Bonferroni sign violation at n = {n:?}, t = {t}, m = {m}"
                    ));
                }
                truncated[ti] += norm * weight * coeff as f64;
            }
        }
        for i in (0..ell).rev() {
            n[i] += 1;
            if n[i] <= box_dims[i] {
                continue 'outer;
            }
            n[i] = 1;
        }
        break;
    }

    Ok(SandwichReport {
        d: aux.d,
        y: profile.y,
        box_dims: box_dims.to_vec(),
        lambda_points,
        true_sum,
        truncated: ts.into_iter().zip(truncated).collect(),
        exact_certificate,
        negative_weight_points,
        violations,
    })
}

/// Σ_{s=0}^{min(t,m)} (−1)^s C(m,s), exactly.
fn bonferroni_coefficient(m: u32, t: u32) -> i64 {
    let mut acc: i64 = 0;
    let mut binom: i64 = 1; // C(m, s)
    for s in 0..=t.min(m) {
        acc += if s % 2 == 0 { binom } else { -binom };
        binom = binom * (m as i64 - s as i64) / (s as i64 + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aux::{build_aux, RootChoice};
    use crate::padic::CertifyMode;

    const CAP: u64 = 1 << 22;

    fn poly(s: &str) -> MultiPoly {
        MultiPoly::parse(s).unwrap()
    }

    fn aux_for(h: &str, d: u64) -> AuxPoly {
        let h = poly(h);
        let choice = RootChoice::certify(&h, CertifyMode::PIntersective, 50, 8, CAP).unwrap();
        build_aux(&choice, d).unwrap()
    }

    #[test]
    fn gamma_and_j_examples() {
        let a = aux_for("x^2-1", 1);
        assert_eq!(gamma_and_j(&a, 5, 8, CAP).unwrap(), (1, 0, 4));
        assert_eq!(gamma_and_j(&a, 2, 8, CAP).unwrap(), (2, 0, 2));

        let a = aux_for("x^2+y^2-2", 1);
        assert_eq!(gamma_and_j(&a, 3, 8, CAP).unwrap(), (1, 0, 4));
    }

    #[test]
    fn w_d_examples() {
        let a = aux_for("x^2-1", 1);
        let profile = build_profile(&a, 5, 8, CAP).unwrap();
        assert!(profile.w_d.is_one());
        assert_eq!(profile.w_d_float, 1.0);

        // synthetic record: j = 1 of 4 at p = 5 only
        let records = vec![PrimeSieveRecord {
            p: 5,
            gamma: 1,
            j: 1,
            j_set_size: 4,
            eps: 1,
        }];
        let w = w_d_exact(&records).unwrap();
        assert_eq!(w, BigRational::new(BigInt::from(3), BigInt::from(4)));
    }

    #[test]
    fn nu_weight_examples() {
        let a = aux_for("x^2-1", 1);
        let profile = build_profile(&a, 3, 8, CAP).unwrap();
        let v = nu_weight(&a, &profile, &[5]).unwrap();
        assert!((v - 10.0 * 5f64.ln()).abs() < 1e-12);

        // composite image ⇒ 0
        let v = nu_weight(&a, &profile, &[9]).unwrap();
        assert_eq!(v, 0.0);

        let a = aux_for("x^2+y^2-2", 1);
        let profile = build_profile(&a, 3, 8, CAP).unwrap();
        let v = nu_weight(&a, &profile, &[3, 5]).unwrap();
        assert!((v - 3f64.ln() * 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn weighted_points_flag_memberships() {
        let a = aux_for("x^2-1", 1);
        let profile = build_profile(&a, 3, 8, CAP).unwrap();
        let wp = weighted_point(&a, &profile, &[5]).unwrap();
        assert!(wp.in_lambda && wp.in_w);
        assert!(wp.nu > 0.0);
        // image 9 is composite
        let wp = weighted_point(&a, &profile, &[9]).unwrap();
        assert!(!wp.in_lambda && !wp.in_w);
        assert_eq!(wp.nu, 0.0);
        // image 3 is prime but the gradient dies at p = 3
        let wp = weighted_point(&a, &profile, &[3]).unwrap();
        assert!(wp.in_lambda && !wp.in_w);
        assert_eq!(wp.nu, 0.0);
    }

    #[test]
    fn profile_strictness_invariant() {
        // j < |J| strictly on certified P-intersective instances
        for (h, ds) in [("x^2-1", vec![1u64, 2, 3, 6]), ("x^2+y^2-2", vec![1, 2, 3])] {
            for &d in &ds {
                let a = aux_for(h, d);
                let profile = build_profile(&a, 7, 8, CAP).unwrap();
                for r in &profile.records {
                    assert!(r.j < r.j_set_size, "h={h}, d={d}, p={}", r.p);
                }
                assert!(profile.w_d_float > 0.0);
            }
        }
    }

    #[test]
    fn gamma_bounded_across_d_scan() {
        // gamma_d(p) stays bounded (constant b(h)) over a d range
        let h = poly("x^2-1");
        let choice = RootChoice::certify(&h, CertifyMode::PIntersective, 20, 8, CAP).unwrap();
        let mut max_gamma = 0;
        for d in 1..=20u64 {
            let a = build_aux(&choice, d).unwrap();
            let profile = build_profile(&a, 7, 8, CAP).unwrap();
            for r in &profile.records {
                max_gamma = max_gamma.max(r.gamma);
                assert!(r.j <= 2, "j_d(p) blows up at d={d}, p={}", r.p);
            }
        }
        assert!(max_gamma <= 3, "gamma exceeded expected bound: {max_gamma}");
    }

    #[test]
    fn sandwich_untruncated_equals_true_sum() {
        let a = aux_for("x^2-1", 1);
        let profile = build_profile(&a, 5, 8, CAP).unwrap();
        let report = sieve_sum_sandwich(&a, &profile, &[200], &[0, 1, 2, 3], CAP).unwrap();
        assert!(report.exact_certificate, "{:?}", report.violations);
        let full = report
            .truncated
            .iter()
            .find(|(t, _)| *t == profile.records.len() as u32)
            .unwrap();
        assert_eq!(full.1, report.true_sum);
    }

    #[test]
    fn sandwich_collapses_when_no_point_is_sieved() {
        // x²−1 at d=6, Y=2: ∇h₆ = 12x−10 ≡ 2 (mod 4) for every x, so no box
        // point has a vanishing gradient and every truncation equals the true
        // sum exactly. (j_d(p) = 0 alone is not enough: points whose image is
        // the sieve prime itself sit in non-unit classes and can be sieved.)
        let a = aux_for("x^2-1", 6);
        let profile = build_profile(&a, 2, 8, CAP).unwrap();
        for r in &profile.records {
            assert_eq!(r.j, 0);
        }
        let report = sieve_sum_sandwich(&a, &profile, &[200], &[0, 1], CAP).unwrap();
        assert!(report.lambda_points > 10);
        for (_, v) in &report.truncated {
            assert_eq!(*v, report.true_sum);
        }
    }

    #[test]
    fn sandwich_brackets_strictly_when_prime_images_are_sieved() {
        // x²−1 at d=1, Y=5: the points n ∈ {2,3,5} have prime image n and
        // gradient 2n ≡ 0 at p = n, so t = 0 strictly over-counts while the
        // bracketing certificate still holds.
        let a = aux_for("x^2-1", 1);
        let profile = build_profile(&a, 5, 8, CAP).unwrap();
        let report = sieve_sum_sandwich(&a, &profile, &[150], &[0, 1], CAP).unwrap();
        assert!(report.exact_certificate, "{:?}", report.violations);
        let t0 = report.truncated.iter().find(|(t, _)| *t == 0).unwrap().1;
        let t1 = report.truncated.iter().find(|(t, _)| *t == 1).unwrap().1;
        assert!(t0 > report.true_sum);
        assert!(t1 <= report.true_sum);
    }

    #[test]
    fn sandwich_brackets_on_two_variable_corpus() {
        let a = aux_for("x^2+y^2-2", 1);
        let profile = build_profile(&a, 5, 8, CAP).unwrap();
        let report = sieve_sum_sandwich(&a, &profile, &[50, 50], &[0, 1, 2], CAP).unwrap();
        assert!(report.exact_certificate, "{:?}", report.violations);
        assert_eq!(report.negative_weight_points, 0);
        // consecutive truncations bracket the true sum
        let slack = 1e-9 * report.true_sum.abs().max(1.0);
        for pair in report.truncated.windows(2) {
            let (ta, va) = pair[0];
            let (_tb, vb) = pair[1];
            let (lo, hi) = if ta % 2 == 1 { (va, vb) } else { (vb, va) };
            assert!(
                lo <= report.true_sum + slack && report.true_sum <= hi + slack,
                "sandwich fails between t={ta}: [{lo}, {hi}] vs {}",
                report.true_sum
            );
        }
    }

    #[test]
    fn membership_w_dq_examples() {
        let a = aux_for("x^2-1", 1);
        let profile = build_profile(&a, 2, 8, CAP).unwrap();
        // q = 1 reduces to the W_d gradient conditions on Λ points
        assert!(in_w_dq(&a, &profile, &[3], 1).unwrap());
        // shared factor with q
        assert!(!in_w_dq(&a, &profile, &[3], 6).unwrap());
        // q = 4: gcd(3,4) = 1 and ∇h₁(3) = 6 ≢ 0 mod 4
        assert!(in_w_dq(&a, &profile, &[3], 4).unwrap());
    }

    #[test]
    fn bonferroni_coefficients_are_partial_binomial_sums() {
        // c(m, t) = (−1)^t C(m−1, t) for m ≥ 1
        assert_eq!(bonferroni_coefficient(0, 0), 1);
        assert_eq!(bonferroni_coefficient(0, 3), 1);
        assert_eq!(bonferroni_coefficient(3, 0), 1);
        assert_eq!(bonferroni_coefficient(3, 1), -2);
        assert_eq!(bonferroni_coefficient(3, 2), 1);
        assert_eq!(bonferroni_coefficient(3, 3), 0);
        assert_eq!(bonferroni_coefficient(4, 2), 3);
    }
}
