//! Prime generation and Chebyshev-type counts over arithmetic progressions.

use num_traits::ToPrimitive;

use crate::poly::MultiPoly;
use crate::{Error, Result};

/// Sorted table of the primes up to `limit`.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

const SEGMENT: usize = 1 << 18;

impl PrimeTable {
    /// Segmented sieve of Eratosthenes up to `limit` (inclusive), capped.
    pub fn up_to(limit: u64) -> Result<Self> {
        Self::up_to_capped(limit, 100_000_000)
    }

    pub fn up_to_capped(limit: u64, cap: u64) -> Result<Self> {
        if limit > cap {
            return Err(Error::SearchCapExceeded(format!(
                "prime table limit {limit} exceeds cap {cap}"
            )));
        }
        let mut primes = Vec::new();
        if limit < 2 {
            return Ok(PrimeTable { limit, primes });
        }
        // base primes up to sqrt(limit) by a plain sieve
        let root = (limit as f64).sqrt() as u64 + 1;
        let mut base = vec![true; (root + 1) as usize];
        base[0] = false;
        if root >= 1 {
            base[1] = false;
        }
        let mut i = 2u64;
        while i * i <= root {
            if base[i as usize] {
                let mut j = i * i;
                while j <= root {
                    base[j as usize] = false;
                    j += i;
                }
            }
            i += 1;
        }
        let base_primes: Vec<u64> = (2..=root).filter(|&n| base[n as usize]).collect();

        let mut lo = 2u64;
        let mut segment = vec![true; SEGMENT];
        while lo <= limit {
            let hi = (lo + SEGMENT as u64 - 1).min(limit);
            let len = (hi - lo + 1) as usize;
            segment[..len].fill(true);
            for &p in &base_primes {
                if p * p > hi {
                    break;
                }
                let mut start = p * p;
                if start < lo {
                    start = lo.div_ceil(p) * p;
                }
                let mut j = start;
                while j <= hi {
                    segment[(j - lo) as usize] = false;
                    j += p;
                }
            }
            for off in 0..len {
                let n = lo + off as u64;
                if n >= 2 && segment[off] {
                    primes.push(n);
                }
            }
            lo = hi + 1;
        }
        Ok(PrimeTable { limit, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Membership for n within the table limit; panics beyond it.
    pub fn contains(&self, n: u64) -> bool {
        assert!(
            n <= self.limit,
            "queried {n} beyond table limit {}",
            self.limit
        );
        self.primes.binary_search(&n).is_ok()
    }
}

/// Deterministic Miller–Rabin for u64 (bases 2, 3, 5, 7, 11, 13, 17, 19, 23,
/// 29, 31, 37 suffice for the full 64-bit range).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// ψ(x,a,q) = Σ log p over primes p ≤ x with p ≡ a (mod q).
///
/// Returns the value together with the number of primes summed. Primes are
/// visited in increasing order and accumulated left to right, which pins the
/// float result bit-for-bit for a given (x,a,q).
pub fn psi(table: &PrimeTable, x: f64, a: i64, q: u64) -> (f64, usize) {
    assert!(q >= 1);
    if x < 2.0 {
        return (0.0, 0);
    }
    let xf = x.floor() as u64;
    assert!(
        xf <= table.limit(),
        "psi upper limit {xf} beyond prime table limit {}",
        table.limit()
    );
    let residue = a.rem_euclid(q as i64) as u64;
    let mut sum = 0.0f64;
    let mut count = 0usize;
    for &p in table.primes() {
        if p > xf {
            break;
        }
        if p % q == residue {
            sum += (p as f64).ln();
            count += 1;
        }
    }
    (sum, count)
}

/// Σ g(p)·log p over the same progression, term-by-term with exact integer
/// g(p) before the float conversion. With g ≡ 1 this reduces to ψ.
pub fn psi_weighted(
    table: &PrimeTable,
    x: f64,
    a: i64,
    q: u64,
    g: &MultiPoly,
) -> Result<(f64, usize)> {
    if g.nvars() != 1 {
        return Err(Error::Invalid(format!(
            "weight polynomial must be univariate, got {} variables",
            g.nvars()
        )));
    }
    assert!(q >= 1);
    if x < 2.0 {
        return Ok((0.0, 0));
    }
    let xf = x.floor() as u64;
    assert!(xf <= table.limit());
    let residue = a.rem_euclid(q as i64) as u64;
    let mut sum = 0.0f64;
    let mut count = 0usize;
    for &p in table.primes() {
        if p > xf {
            break;
        }
        if p % q == residue {
            let w = g.evaluate_i64(&[p as i64])?.to_f64().unwrap_or(f64::NAN);
            sum += w * (p as f64).ln();
            count += 1;
        }
    }
    Ok((sum, count))
}

pub fn factorize(mut d: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= d {
        if d % p == 0 {
            let mut a = 0;
            while d % p == 0 {
                d /= p;
                a += 1;
            }
            out.push((p, a));
        }
        p += 1;
    }
    if d > 1 {
        out.push((d, 1));
    }
    out
}

/// Euler phi.
pub fn euler_phi(d: u64) -> u64 {
    factorize(d)
        .into_iter()
        .map(|(p, a)| (p - 1) * p.pow(a - 1))
        .product::<u64>()
        .max(1)
}

/// A caller-supplied exceptional-zero triple (q₀, ρ, χ values on residues
/// mod q₀). No algorithm is provided to find one; this only feeds main-term
/// comparison experiments.
#[derive(Debug, Clone)]
pub struct ExceptionalZeroHook {
    pub q0: u64,
    /// ρ ∈ [1/2, 1).
    pub rho: f64,
    /// χ(0), …, χ(q0−1); real (the exceptional character is quadratic).
    pub chi: Vec<f64>,
}

/// The two-term main-term prediction x/φ(q) − χ(a)·x^ρ/(φ(q)·ρ); without a
/// hook this is the classical x/φ(q). Requires q0 | q when a hook is given.
pub fn psi_main_term(x: f64, a: i64, q: u64, hook: Option<&ExceptionalZeroHook>) -> Result<f64> {
    assert!(q >= 1);
    let phi = euler_phi(q) as f64;
    let leading = x / phi;
    match hook {
        None => Ok(leading),
        Some(h) => {
            if h.q0 == 0 || q % h.q0 != 0 {
                return Err(Error::Invalid(format!(
                    "hook modulus {} must divide q = {q}",
                    h.q0
                )));
            }
            if h.chi.len() != h.q0 as usize {
                return Err(Error::Invalid(format!(
                    "need {} character values, got {}",
                    h.q0,
                    h.chi.len()
                )));
            }
            if !(0.5..1.0).contains(&h.rho) {
                return Err(Error::Invalid(format!("rho = {} outside [1/2, 1)", h.rho)));
            }
            let chi_a = h.chi[a.rem_euclid(h.q0 as i64) as usize];
            Ok(leading - chi_a * x.powf(h.rho) / (phi * h.rho))
        }
    }
}

/// Trial-division ψ, independent of the sieve, with the same summation order.
/// This is the oracle side of the ψ cross-check.
pub fn psi_trial_division(x: f64, a: i64, q: u64) -> (f64, usize) {
    assert!(q >= 1);
    if x < 2.0 {
        return (0.0, 0);
    }
    let xf = x.floor() as u64;
    let residue = a.rem_euclid(q as i64) as u64;
    let mut sum = 0.0f64;
    let mut count = 0usize;
    for n in 2..=xf {
        if n % q == residue && trial_is_prime(n) {
            sum += (n as f64).ln();
            count += 1;
        }
    }
    (sum, count)
}

fn trial_is_prime(n: u64) -> bool {
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
