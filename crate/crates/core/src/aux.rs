//! The auxiliary-polynomial calculus: r_d by CRT, the completely
//! multiplicative weight λ, the rescaled shifts h_d = h(r_d + d·x)/λ(d),
//! the inheritance identity as an executable check, and empirical
//! strongly-Deligne / P-Deligne scanning.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::deligne::{self, DeligneVerdict};
use crate::padic::{self, CertStatus, CertifyMode, PAdicRoot};
use crate::poly::MultiPoly;
use crate::primes::is_prime_u64;
use crate::{Error, Result};

/// A fixed choice of certified p-adic roots for the primes in play.
///
/// Everything downstream (r_d, λ, h_d, the sieve, local sums) depends on
/// this choice; the canonical tie-break lives in `padic::certify_prime`.
#[derive(Debug, Clone)]
pub struct RootChoice {
    polynomial: MultiPoly,
    mode: CertifyMode,
    roots: BTreeMap<u64, PAdicRoot>,
}

impl RootChoice {
    /// Certify and store roots for every prime ≤ p_max.
    pub fn certify(
        h: &MultiPoly,
        mode: CertifyMode,
        p_max: u64,
        depth_max: u32,
        cap: u64,
    ) -> Result<Self> {
        let certs = padic::certify(h, mode, p_max, depth_max, cap)?;
        let mut roots = BTreeMap::new();
        for c in certs {
            if let CertStatus::Certified { root, .. } = c.status {
                if mode == CertifyMode::PIntersective && !root.unit_coords {
                    return Err(Error::Invalid(format!(
                        "P-mode root at p={} lacks unit coordinates",
                        c.p
                    )));
                }
                roots.insert(c.p, root);
            }
        }
        Ok(RootChoice {
            polynomial: h.clone(),
            mode,
            roots,
        })
    }

    /// Certify exactly the primes needed (e.g. the prime factors of a d range).
    pub fn certify_primes(
        h: &MultiPoly,
        mode: CertifyMode,
        primes: &[u64],
        depth_max: u32,
        cap: u64,
    ) -> Result<Self> {
        let mut roots = BTreeMap::new();
        for &p in primes {
            let cert = padic::certify_prime(h, mode, p, depth_max, cap);
            if let CertStatus::Certified { root, .. } = cert.status {
                roots.insert(p, root);
            }
        }
        Ok(RootChoice {
            polynomial: h.clone(),
            mode,
            roots,
        })
    }

    /// Build from explicit roots (tests and reproducibility runs).
    pub fn from_roots(h: &MultiPoly, mode: CertifyMode, roots: Vec<PAdicRoot>) -> Self {
        RootChoice {
            polynomial: h.clone(),
            mode,
            roots: roots.into_iter().map(|r| (r.p, r)).collect(),
        }
    }

    pub fn polynomial(&self) -> &MultiPoly {
        &self.polynomial
    }

    pub fn mode(&self) -> CertifyMode {
        self.mode
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.roots.keys().copied()
    }

    pub fn root(&self, p: u64) -> Result<&PAdicRoot> {
        self.roots.get(&p).ok_or(Error::MissingRoot { p })
    }

    /// Root at precision ≥ v, re-lifting on demand.
    pub fn root_at(&self, p: u64, v: u32) -> Result<PAdicRoot> {
        let root = self.root(p)?;
        padic::raise_precision(&self.polynomial, root, v)
    }

    pub fn multiplicity(&self, p: u64) -> Result<u32> {
        self.root(p)?
            .multiplicity
            .ok_or(Error::UnknownMultiplicity { p })
    }
}

/// The (d, r_d, λ(d), h_d) package.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxPoly {
    pub d: u64,
    /// The unique representative in (−d, 0]^ℓ.
    pub r_d: Vec<BigInt>,
    pub lambda: u64,
    pub h_d: MultiPoly,
}

pub use crate::primes::{euler_phi, factorize};

/// The unique r_d ∈ (−d, 0]^ℓ with r_d ≡ z_p mod p^{ord_p(d)} for all p | d,
/// assembled by the Chinese Remainder Theorem. d = 1 gives the zero vector.
pub fn compute_r_d(choice: &RootChoice, d: u64) -> Result<Vec<BigInt>> {
    assert!(d >= 1);
    let ell = choice.polynomial().nvars();
    if d == 1 {
        return Ok(vec![BigInt::zero(); ell]);
    }
    let factors = factorize(d);
    let mut roots_at = Vec::new();
    for &(p, a) in &factors {
        roots_at.push((p, a, choice.root_at(p, a)?));
    }
    let db = BigInt::from(d);
    let mut r = Vec::with_capacity(ell);
    for i in 0..ell {
        // CRT across the prime powers dividing d
        let mut residue = BigInt::zero();
        let mut modulus = BigInt::one();
        for (p, a, root) in &roots_at {
            let pa = BigInt::from(padic::pow_u64_checked(*p, *a)?);
            let target = BigInt::from(root.value[i]).mod_floor(&pa);
            // residue + modulus * t ≡ target (mod pa)
            let inv = mod_inverse_big(&modulus, &pa)
                .ok_or_else(|| Error::Invalid(format!("CRT moduli not coprime at p={p}")))?;
            let t = ((&target - &residue) * inv).mod_floor(&pa);
            residue += &modulus * t;
            modulus *= &pa;
        }
        debug_assert_eq!(modulus, db);
        let residue = residue.mod_floor(&db);
        // shift the representative into (−d, 0]
        r.push(if residue.is_zero() {
            residue
        } else {
            residue - &db
        });
    }
    Ok(r)
}

fn mod_inverse_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// λ(d) = Π p^{a·m_p} over p^a ∥ d.
pub fn compute_lambda(choice: &RootChoice, d: u64) -> Result<u64> {
    assert!(d >= 1);
    let mut lambda: u64 = 1;
    for (p, a) in factorize(d) {
        let m_p = choice.multiplicity(p)?;
        let factor = padic::pow_u64_checked(p, a * m_p)?;
        lambda = lambda
            .checked_mul(factor)
            .ok_or_else(|| Error::SearchCapExceeded(format!("lambda({d}) overflows u64")))?;
    }
    Ok(lambda)
}

/// h_d = h(r_d + d·x)/λ(d), with the division exact by construction; a
/// NotDivisible error here means the stored roots are not genuine roots.
pub fn build_aux(choice: &RootChoice, d: u64) -> Result<AuxPoly> {
    let r_d = compute_r_d(choice, d)?;
    let lambda = compute_lambda(choice, d)?;
    let shifted = choice.polynomial().shift_scale(&r_d, &BigInt::from(d))?;
    let h_d = shifted.divide_exact(&BigInt::from(lambda))?;
    Ok(AuxPoly {
        d,
        r_d,
        lambda,
        h_d,
    })
}

// ---------------------------------------------------------------------------
// Inheritance check
// ---------------------------------------------------------------------------

/// One t ∈ (A′−A′) ∩ h_{qd}(Λ_{qd}) together with the constructed membership
/// witnesses for λ(q)·t ∈ (A−A) ∩ h_d(Λ_d).
#[derive(Debug, Clone)]
pub struct InheritanceWitness {
    pub t: BigInt,
    pub n: Vec<i64>,
    pub scaled: BigInt,
    /// m = s + q·n with h_d(m) = λ(q)·t and r_d + d·m prime in each coordinate.
    pub m: Vec<BigInt>,
}

#[derive(Debug, Clone)]
pub struct InheritanceReport {
    pub d: u64,
    pub q: u64,
    pub lambda_q: u64,
    pub inputs_enumerated: u64,
    pub lattice_points: usize,
    pub witnesses: Vec<InheritanceWitness>,
    pub violations: Vec<String>,
}

impl InheritanceReport {
    pub fn vacuous(&self) -> bool {
        self.witnesses.is_empty() && self.violations.is_empty()
    }
}

/// Check the inheritance containment: for every t ∈ (A′−A′) ∩ h_{qd}(Λ_{qd})
/// (inputs from [−box, box]^ℓ), λ(q)·t must land in (A−A) ∩ h_d(Λ_d).
///
/// The h_d-membership is verified constructively through m = s + q·n where
/// r_{qd} = r_d + d·s. Hypothesis A′ ⊆ {a : x + λ(q)·a ∈ A} is enforced.
pub fn verify_inheritance(
    choice: &RootChoice,
    d: u64,
    q: u64,
    a_set: &BTreeSet<i64>,
    a_prime: &BTreeSet<i64>,
    x: i64,
    box_radius: i64,
    volume_cap: u64,
) -> Result<InheritanceReport> {
    let lambda_q = compute_lambda(choice, q)?;
    for &a in a_prime {
        let image = x
            .checked_add(
                (lambda_q as i64)
                    .checked_mul(a)
                    .ok_or_else(|| Error::Invalid("lambda(q)*a overflows".into()))?,
            )
            .ok_or_else(|| Error::Invalid("x + lambda(q)*a overflows".into()))?;
        if !a_set.contains(&image) {
            return Err(Error::Invalid(format!(
                "hypothesis violated: {a} ∈ A' but x + lambda(q)*{a} = {image} ∉ A"
            )));
        }
    }

    let aux_qd = build_aux(choice, q * d)?;
    let aux_d = build_aux(choice, d)?;
    let ell = choice.polynomial().nvars();

    let mut violations = Vec::new();

    // r_{qd} ≡ r_d (mod d), giving s with r_{qd} = r_d + d·s
    let db = BigInt::from(d);
    let mut s = Vec::with_capacity(ell);
    for i in 0..ell {
        let diff = &aux_qd.r_d[i] - &aux_d.r_d[i];
        let (quot, rem) = diff.div_rem(&db);
        if !rem.is_zero() {
            violations.push(format!(
                "r_{{{}}} ≢ r_{{{}}} (mod {}) in coordinate {}",
                q * d,
                d,
                d,
                i
            ));
            s.push(BigInt::zero());
        } else {
            s.push(quot);
        }
    }

    // difference sets
    let a_prime_diffs: BTreeSet<i64> = a_prime
        .iter()
        .flat_map(|&a| a_prime.iter().map(move |&b| a - b))
        .collect();
    let a_diffs: BTreeSet<i64> = a_set
        .iter()
        .flat_map(|&a| a_set.iter().map(move |&b| a - b))
        .collect();

    let side = 2 * box_radius as u64 + 1;
    let volume = (0..ell).try_fold(1u64, |acc, _| {
        acc.checked_mul(side)
            .filter(|&v| v <= volume_cap)
            .ok_or_else(|| Error::SearchCapExceeded(format!("box volume exceeds cap {volume_cap}")))
    })?;

    let qd = BigInt::from(q * d);
    let lambda_q_big = BigInt::from(lambda_q);
    let mut witnesses = Vec::new();
    let mut lattice_points = 0usize;

    let mut n = vec![-box_radius; ell];
    'outer: loop {
        // r_{qd} + qd·n must be a vector of (positive) primes
        let affine: Vec<BigInt> = (0..ell)
            .map(|i| &aux_qd.r_d[i] + &qd * BigInt::from(n[i]))
            .collect();
        let all_prime = affine
            .iter()
            .all(|v| v.is_positive() && v.to_u64().map(is_prime_u64).unwrap_or(false));
        if all_prime {
            lattice_points += 1;
            let t = aux_qd
                .h_d
                .evaluate(&n.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>())?;
            if t.to_i64().map(|v| a_prime_diffs.contains(&v)) == Some(true) {
                let scaled = &lambda_q_big * &t;
                // membership in A − A
                match scaled.to_i64() {
                    Some(v) if a_diffs.contains(&v) => {}
                    _ => violations.push(format!(
                        "λ(q)·{t} = {scaled} missing from A−A (witness n = {n:?})"
                    )),
                }
                // membership in h_d(Λ_d) through the constructed preimage
                let m: Vec<BigInt> = (0..ell)
                    .map(|i| &s[i] + BigInt::from(q) * BigInt::from(n[i]))
                    .collect();
                let image: Vec<BigInt> = (0..ell).map(|i| &aux_d.r_d[i] + &db * &m[i]).collect();
                if image != affine {
                    violations.push(format!(
                        "preimage mismatch: r_d + d·m ≠ r_{{qd}} + qd·n at n = {n:?}"
                    ));
                }
                let value = aux_d.h_d.evaluate(&m)?;
                if value != scaled {
                    violations.push(format!(
                        "identity failure: h_d(s+q·n) = {value} ≠ λ(q)·t = {scaled} at n = {n:?}"
                    ));
                }
                witnesses.push(InheritanceWitness {
                    t,
                    n: n.clone(),
                    scaled,
                    m,
                });
            }
        }
        for i in (0..ell).rev() {
            n[i] += 1;
            if n[i] <= box_radius {
                continue 'outer;
            }
            n[i] = -box_radius;
        }
        break;
    }

    Ok(InheritanceReport {
        d,
        q,
        lambda_q,
        inputs_enumerated: volume,
        lattice_points,
        witnesses,
        violations,
    })
}

// ---------------------------------------------------------------------------
// Strongly-Deligne / P-Deligne scan
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ScanEntry {
    pub d: u64,
    pub p: u64,
    pub verdict: DeligneVerdict,
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub entries: Vec<ScanEntry>,
    /// Primes p with h_d not Deligne mod p for some scanned d: the empirical
    /// estimate of the exceptional set X(h).
    pub exceptional_primes: Vec<u64>,
}

/// Deligne status of h_d mod p over a (d, p) grid.
pub fn scan_strongly_deligne(
    choice: &RootChoice,
    d_max: u64,
    p_max: u64,
    ext_cap: u32,
    cap: u64,
) -> Result<ScanReport> {
    let table = crate::primes::PrimeTable::up_to(p_max)?;
    let aux: Vec<AuxPoly> = (1..=d_max)
        .map(|d| build_aux(choice, d))
        .collect::<Result<_>>()?;
    let entries: Vec<ScanEntry> = aux
        .par_iter()
        .map(|a| -> Result<Vec<ScanEntry>> {
            let mut rows = Vec::new();
            for &p in table.primes() {
                let verdict = deligne::is_deligne_mod(&a.h_d, p, ext_cap, cap)?;
                rows.push(ScanEntry { d: a.d, p, verdict });
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut exceptional: BTreeSet<u64> = BTreeSet::new();
    for e in &entries {
        if !e.verdict.is_deligne() {
            exceptional.insert(e.p);
        }
    }
    Ok(ScanReport {
        entries,
        exceptional_primes: exceptional.into_iter().collect(),
    })
}
