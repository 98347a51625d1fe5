//! Roots modulo prime powers, multivariable Hensel lifting, and
//! certification of intersective / P-intersective polynomials.
//!
//! A root is certified once it satisfies the multivariable Hensel hypothesis
//! (known mod p^{2γ−1} with some gradient coordinate of p-adic valuation
//! below γ), or once its representative is an exact integer root. Either way
//! it determines a genuine p-adic root and can be lifted to any precision.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::poly::MultiPoly;
use crate::primes::PrimeTable;
use crate::{Error, Result};

/// A p-adic root approximation known modulo p^v.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicRoot {
    pub p: u64,
    pub v: u32,
    /// Coordinates in [0, p^v).
    pub value: Vec<u64>,
    /// m_p, when certified; `None` means unknown at this precision.
    pub multiplicity: Option<u32>,
    /// Every coordinate coprime to p.
    pub unit_coords: bool,
    /// Hensel level: some gradient coordinate has valuation < gamma at the
    /// root, and v ≥ 2·gamma − 1.
    pub gamma: Option<u32>,
    /// Set when the (possibly sign-shifted) representative is an exact
    /// integer root, which lifts to every precision trivially.
    pub exact: Option<Vec<i64>>,
}

/// Per-prime certification outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub p: u64,
    pub status: CertStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertStatus {
    Certified {
        root: PAdicRoot,
        lift_reason: LiftReason,
    },
    NotIntersective {
        depth: u32,
    },
    Unknown {
        depth: u32,
        reason: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftReason {
    ExactRoot,
    Hensel { gamma: u32 },
}

impl std::fmt::Display for LiftReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LiftReason::ExactRoot => write!(f, "exact integer root"),
            LiftReason::Hensel { gamma } => write!(f, "hensel(gamma={gamma})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertifyMode {
    Intersective,
    PIntersective,
}

pub fn pow_u64_checked(p: u64, v: u32) -> Result<u64> {
    let mut acc: u64 = 1;
    for _ in 0..v {
        acc = acc
            .checked_mul(p)
            .filter(|&m| m < (1 << 62))
            .ok_or_else(|| Error::SearchCapExceeded(format!("modulus {p}^{v} overflows")))?;
    }
    Ok(acc)
}

/// p-adic valuation of an exact integer; `None` encodes +∞ (the zero value).
pub fn valuation(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0u32;
    while (&m % &pb).is_zero() {
        m /= &pb;
        v += 1;
    }
    Some(v)
}

/// All x in [0,p^v)^ℓ with h(x) ≡ 0 mod p^v, by level-by-level tree lifting
/// from mod p (never by direct enumeration of the full box). `unit_only`
/// keeps roots with every coordinate coprime to p.
pub fn roots_mod(
    h: &MultiPoly,
    p: u64,
    v: u32,
    unit_only: bool,
    cap: u64,
) -> Result<Vec<Vec<u64>>> {
    let levels = roots_mod_levels(h, p, v, unit_only, cap)?;
    Ok(levels.into_iter().next_back().unwrap_or_default())
}

/// Tree lifting, returning the roots at every level 1..=v.
pub fn roots_mod_levels(
    h: &MultiPoly,
    p: u64,
    v: u32,
    unit_only: bool,
    cap: u64,
) -> Result<Vec<Vec<Vec<u64>>>> {
    assert!(v >= 1);
    let ell = h.nvars();
    pow_u64_checked(p, v)?;
    (0..ell).try_fold(1u64, |acc, _| {
        acc.checked_mul(p)
            .filter(|&m| m <= cap)
            .ok_or_else(|| Error::SearchCapExceeded(format!("p^l = {p}^{ell} exceeds cap {cap}")))
    })?;

    // level 1: enumerate residues mod p in lex order
    let mut level: Vec<Vec<u64>> = Vec::new();
    let mut point = vec![0u64; ell];
    'outer: loop {
        let ok_units = !unit_only || point.iter().all(|&c| c % p != 0);
        if ok_units && h.evaluate_mod(&point, p)? == 0 {
            level.push(point.clone());
        }
        for i in (0..ell).rev() {
            point[i] += 1;
            if point[i] < p {
                continue 'outer;
            }
            point[i] = 0;
        }
        break;
    }
    let mut levels = vec![level];
    for j in 2..=v {
        let next = lift_level(h, p, j, levels.last().unwrap(), cap)?;
        levels.push(next);
    }
    Ok(levels)
}

/// Minimum over coordinates of the p-adic valuation of ∇h at an exact
/// integer point; `None` is +∞ (gradient identically vanishing there).
fn gradient_min_valuation(grad: &[MultiPoly], point: &[BigInt], p: u64) -> Result<Option<u32>> {
    let mut best: Option<u32> = None;
    for g in grad {
        let val = g.evaluate(point)?;
        if let Some(v) = valuation(&val, p) {
            best = Some(best.map_or(v, |b| b.min(v)));
        }
    }
    Ok(best)
}

/// Lift a root satisfying the Hensel hypothesis to precision `target_v`,
/// one p-digit per step along the lowest-valuation gradient coordinate.
/// The output is congruent to the input mod p^gamma.
pub fn hensel_lift(
    h: &MultiPoly,
    root: &PAdicRoot,
    target_v: u32,
    gamma: u32,
) -> Result<PAdicRoot> {
    assert!(gamma >= 1);
    if root.v < 2 * gamma - 1 {
        return Err(Error::Invalid(format!(
            "root precision {} below 2*gamma-1 = {}",
            root.v,
            2 * gamma - 1
        )));
    }
    let p = root.p;
    let target_v = target_v.max(root.v);
    let target_mod = pow_u64_checked(p, target_v)?;
    let grad = h.gradient();

    let point: Vec<BigInt> = root.value.iter().map(|&c| BigInt::from(c)).collect();
    // pick the first coordinate attaining the minimal gradient valuation
    let mut coord = None;
    for (i, g) in grad.iter().enumerate() {
        let val = valuation(&g.evaluate(&point)?, p);
        match val {
            Some(v) if v < gamma => {
                if coord.map_or(true, |(_, best)| v < best) {
                    coord = Some((i, v));
                }
            }
            _ => {}
        }
    }
    let (i, gamma_prime) = coord.ok_or(Error::HypothesisFailed { gamma })?;

    let mut n: Vec<u64> = root.value.clone();
    // current precision: h(n) ≡ 0 mod p^s
    let mut s = root.v;
    {
        let m = pow_u64_checked(p, s)?;
        let val = h.evaluate_mod(&n, m)?;
        if val != 0 {
            return Err(Error::Invalid(format!(
                "claimed root is not a root mod {p}^{s}"
            )));
        }
    }
    while s < target_v {
        let m_next = pow_u64_checked(p, s + 1)?;
        let h_val = h.evaluate_mod(&n, m_next)?;
        if h_val != 0 {
            let step = pow_u64_checked(p, s)?;
            debug_assert_eq!(h_val % step, 0);
            let c = (h_val / step) % p;
            let nb: Vec<BigInt> = n.iter().map(|&x| BigInt::from(x)).collect();
            let gval = grad[i].evaluate(&nb)?;
            let unit = (&gval / BigInt::from(pow_u64_checked(p, gamma_prime)?)).mod_floor_u64(p);
            let t = (p - c) * mod_inverse(unit, p) % p;
            let delta = t * pow_u64_checked(p, s - gamma_prime)?;
            n[i] = (n[i] + delta) % target_mod;
        }
        s += 1;
    }
    for x in n.iter_mut() {
        *x %= target_mod;
    }
    debug_assert_eq!(h.evaluate_mod(&n, target_mod)?, 0);
    Ok(PAdicRoot {
        p,
        v: target_v,
        unit_coords: n.iter().all(|&c| c % p != 0),
        value: n,
        multiplicity: root.multiplicity,
        gamma: Some(gamma),
        exact: root.exact.clone(),
    })
}

trait ModFloorU64 {
    fn mod_floor_u64(&self, m: u64) -> u64;
}

impl ModFloorU64 for BigInt {
    fn mod_floor_u64(&self, m: u64) -> u64 {
        use num_integer::Integer;
        self.mod_floor(&BigInt::from(m)).to_u64().unwrap()
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat; p prime and p ∤ a
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Smallest total order of a partial derivative certified nonzero in ℤ_p at
/// the root, or `None` when nothing up to deg h certifies at this precision.
///
/// A partial is certified nonzero when its exact value at the representative
/// has valuation strictly below the representative's precision (below +∞ for
/// exact roots).
pub fn multiplicity(h: &MultiPoly, root: &PAdicRoot) -> Result<Option<u32>> {
    let deg = match h.degree() {
        Some(d) => d,
        None => return Ok(None),
    };
    let exact_point: Option<Vec<BigInt>> = root
        .exact
        .as_ref()
        .map(|e| e.iter().map(|&c| BigInt::from(c)).collect());
    let rep_point: Vec<BigInt> = root.value.iter().map(|&c| BigInt::from(c)).collect();
    let point = exact_point.as_ref().unwrap_or(&rep_point);
    let threshold = if root.exact.is_some() {
        None // exact root: any finite valuation certifies
    } else {
        Some(root.v)
    };

    let mut frontier = vec![h.clone()];
    for order in 1..=deg {
        let mut next = Vec::new();
        for g in &frontier {
            for i in 0..h.nvars() {
                next.push(g.partial(i));
            }
        }
        for g in &next {
            let val = g.evaluate(point)?;
            match (valuation(&val, root.p), threshold) {
                (Some(_), None) => return Ok(Some(order)),
                (Some(v), Some(t)) if v < t => return Ok(Some(order)),
                _ => {}
            }
        }
        frontier = next;
    }
    Ok(None)
}

/// Certify intersectivity (or P-intersectivity) for every prime ≤ p_max,
/// searching root trees to depth ≤ depth_max.
pub fn certify(
    h: &MultiPoly,
    mode: CertifyMode,
    p_max: u64,
    depth_max: u32,
    cap: u64,
) -> Result<Vec<Certificate>> {
    if h.is_zero() {
        return Err(Error::Invalid("cannot certify the zero polynomial".into()));
    }
    let table = PrimeTable::up_to(p_max)?;
    let certs: Vec<Certificate> = table
        .primes()
        .par_iter()
        .map(|&p| certify_prime(h, mode, p, depth_max, cap))
        .collect();
    Ok(certs)
}

pub fn certify_prime(
    h: &MultiPoly,
    mode: CertifyMode,
    p: u64,
    depth_max: u32,
    cap: u64,
) -> Certificate {
    let unit_only = mode == CertifyMode::PIntersective;
    let grad = h.gradient();

    let mut depth = 0u32;
    let mut roots: Vec<Vec<u64>> = Vec::new();
    while depth < depth_max {
        depth += 1;
        let next = if depth == 1 {
            roots_mod_levels(h, p, 1, unit_only, cap).map(|mut l| l.pop().unwrap())
        } else {
            lift_level(h, p, depth, &roots, cap)
        };
        roots = match next {
            Ok(r) => r,
            Err(e) => {
                return Certificate {
                    p,
                    status: CertStatus::Unknown {
                        depth,
                        reason: e.to_string(),
                    },
                }
            }
        };
        if roots.is_empty() {
            return Certificate {
                p,
                status: CertStatus::NotIntersective { depth },
            };
        }
        let modulus = match pow_u64_checked(p, depth) {
            Ok(m) => m,
            Err(e) => {
                return Certificate {
                    p,
                    status: CertStatus::Unknown {
                        depth,
                        reason: e.to_string(),
                    },
                }
            }
        };
        let mut candidates: Vec<PAdicRoot> = Vec::new();
        for r in &roots {
            if let Some(root) = try_certify_root(h, &grad, r, p, depth, modulus) {
                candidates.push(root);
            }
        }
        if !candidates.is_empty() {
            // canonical choice: minimal multiplicity, then lex-smallest value
            candidates.sort_by(|a, b| {
                let ma = a.multiplicity.unwrap_or(u32::MAX);
                let mb = b.multiplicity.unwrap_or(u32::MAX);
                ma.cmp(&mb).then_with(|| a.value.cmp(&b.value))
            });
            let root = candidates.into_iter().next().unwrap();
            let lift_reason = match root.gamma {
                Some(g) => LiftReason::Hensel { gamma: g },
                None => LiftReason::ExactRoot,
            };
            return Certificate {
                p,
                status: CertStatus::Certified { root, lift_reason },
            };
        }
    }
    Certificate {
        p,
        status: CertStatus::Unknown {
            depth: depth_max,
            reason: format!("no certifiable root mod {p}^j for j <= {depth_max}"),
        },
    }
}

/// One tree-lifting step: roots mod p^depth from the roots mod p^(depth-1).
fn lift_level(
    h: &MultiPoly,
    p: u64,
    depth: u32,
    prev: &[Vec<u64>],
    cap: u64,
) -> Result<Vec<Vec<u64>>> {
    let ell = h.nvars();
    let modulus = pow_u64_checked(p, depth)?;
    let step = pow_u64_checked(p, depth - 1)?;
    let work = (prev.len() as u64)
        .checked_mul(p.pow(ell as u32))
        .ok_or_else(|| Error::SearchCapExceeded("root tree width overflow".into()))?;
    if work > cap {
        return Err(Error::SearchCapExceeded(format!(
            "root tree width {work} exceeds cap {cap} at level {depth}"
        )));
    }
    let mut next = Vec::new();
    for r in prev {
        let mut t = vec![0u64; ell];
        'lift: loop {
            let cand: Vec<u64> = r.iter().zip(&t).map(|(&ri, &ti)| ri + ti * step).collect();
            if h.evaluate_mod(&cand, modulus)? == 0 {
                next.push(cand);
            }
            for i in (0..ell).rev() {
                t[i] += 1;
                if t[i] < p {
                    continue 'lift;
                }
                t[i] = 0;
            }
            break;
        }
    }
    next.sort();
    Ok(next)
}

/// A root mod p^depth certifies if (a) some signed shift of the representative
/// is an exact integer root, or (b) the Hensel hypothesis holds:
/// 2·(min gradient valuation) + 1 ≤ depth.
fn try_certify_root(
    h: &MultiPoly,
    grad: &[MultiPoly],
    r: &[u64],
    p: u64,
    depth: u32,
    modulus: u64,
) -> Option<PAdicRoot> {
    let ell = r.len();
    // exact-root probe over the 2^l representative sign shifts
    for mask in 0u32..(1 << ell) {
        let shifted: Vec<i64> = r
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if mask >> i & 1 == 1 {
                    c as i64 - modulus as i64
                } else {
                    c as i64
                }
            })
            .collect();
        let val = h.evaluate_i64(&shifted).ok()?;
        if val.is_zero() {
            let mut root = PAdicRoot {
                p,
                v: depth,
                value: r.to_vec(),
                multiplicity: None,
                unit_coords: r.iter().all(|&c| c % p != 0),
                gamma: None,
                exact: Some(shifted),
            };
            root.multiplicity = multiplicity(h, &root).ok().flatten();
            let point: Vec<BigInt> = root.value.iter().map(|&c| BigInt::from(c)).collect();
            if let Ok(Some(gv)) = gradient_min_valuation(grad, &point, p) {
                if 2 * gv + 1 <= depth {
                    root.gamma = Some(gv + 1);
                }
            }
            return Some(root);
        }
    }

    let point: Vec<BigInt> = r.iter().map(|&c| BigInt::from(c)).collect();
    let gv = gradient_min_valuation(grad, &point, p).ok()??;
    if 2 * gv + 1 > depth {
        return None;
    }
    let gamma = gv + 1;
    let mut root = PAdicRoot {
        p,
        v: depth,
        value: r.to_vec(),
        multiplicity: Some(1), // certified: valuation gv < precision
        unit_coords: r.iter().all(|&c| c % p != 0),
        gamma: Some(gamma),
        exact: None,
    };
    // the certified gradient coordinate gives m_p = 1 directly, but keep the
    // general computation as a cross-check at debug time
    debug_assert_eq!(multiplicity(h, &root).ok().flatten(), Some(1));
    root.multiplicity = Some(1);
    Some(root)
}

/// Raise a certified root to precision ≥ v.
pub fn raise_precision(h: &MultiPoly, root: &PAdicRoot, v: u32) -> Result<PAdicRoot> {
    if root.v >= v {
        return Ok(root.clone());
    }
    if let Some(exact) = &root.exact {
        let modulus = pow_u64_checked(root.p, v)?;
        let value: Vec<u64> = exact
            .iter()
            .map(|&c| (BigInt::from(c)).mod_floor_u64(modulus))
            .collect();
        return Ok(PAdicRoot {
            p: root.p,
            v,
            unit_coords: value.iter().all(|&c| c % root.p != 0),
            value,
            multiplicity: root.multiplicity,
            gamma: root.gamma,
            exact: Some(exact.clone()),
        });
    }
    match root.gamma {
        Some(g) => hensel_lift(h, root, v, g),
        None => Err(Error::InsufficientPrecision {
            p: root.p,
            have: root.v,
            need: v,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> MultiPoly {
        MultiPoly::parse(s).unwrap()
    }

    const CAP: u64 = 1 << 22;

    #[test]
    fn roots_mod_examples() {
        let r = roots_mod(&poly("x^2-1"), 2, 3, true, CAP).unwrap();
        assert_eq!(r, vec![vec![1], vec![3], vec![5], vec![7]]);
        let r = roots_mod(&poly("x^2"), 2, 2, true, CAP).unwrap();
        assert!(r.is_empty());
        let r = roots_mod(&poly("x^2-1"), 3, 1, true, CAP).unwrap();
        assert_eq!(r, vec![vec![1], vec![2]]);
    }

    #[test]
    fn roots_satisfy_congruence() {
        let h = poly("x^2+y^2-2");
        for v in 1..=3 {
            let m = pow_u64_checked(5, v).unwrap();
            for r in roots_mod(&h, 5, v, true, CAP).unwrap() {
                assert_eq!(h.evaluate_mod(&r, m).unwrap(), 0);
            }
        }
    }

    #[test]
    fn hensel_lift_examples() {
        let h = poly("x^2-2");
        let root = PAdicRoot {
            p: 7,
            v: 1,
            value: vec![3],
            multiplicity: None,
            unit_coords: true,
            gamma: Some(1),
            exact: None,
        };
        let lifted = hensel_lift(&h, &root, 2, 1).unwrap();
        assert_eq!(lifted.value, vec![10]);

        let h = poly("x^2-1");
        let root = PAdicRoot {
            p: 5,
            v: 1,
            value: vec![1],
            multiplicity: None,
            unit_coords: true,
            gamma: Some(1),
            exact: None,
        };
        let lifted = hensel_lift(&h, &root, 2, 1).unwrap();
        assert_eq!(lifted.value, vec![1]);

        let h = poly("x^2+y^2-2");
        let root = PAdicRoot {
            p: 5,
            v: 1,
            value: vec![1, 1],
            multiplicity: None,
            unit_coords: true,
            gamma: Some(1),
            exact: None,
        };
        let lifted = hensel_lift(&h, &root, 2, 1).unwrap();
        assert_eq!(h.evaluate_mod(&lifted.value, 25).unwrap(), 0);
        assert_eq!(lifted.value[0] % 5, 1);
        assert_eq!(lifted.value[1] % 5, 1);
    }

    #[test]
    fn hensel_lift_reduces_to_input_mod_p_gamma() {
        let h = poly("x^2-2");
        let root = PAdicRoot {
            p: 7,
            v: 1,
            value: vec![3],
            multiplicity: None,
            unit_coords: true,
            gamma: Some(1),
            exact: None,
        };
        let lifted = hensel_lift(&h, &root, 6, 1).unwrap();
        assert_eq!(lifted.value[0] % 7, 3);
        let m = pow_u64_checked(7, 6).unwrap();
        assert_eq!(h.evaluate_mod(&lifted.value, m).unwrap(), 0);
    }

    #[test]
    fn hensel_hypothesis_failure_detected() {
        let h = poly("x^2");
        let root = PAdicRoot {
            p: 5,
            v: 2,
            value: vec![0],
            multiplicity: None,
            unit_coords: false,
            gamma: None,
            exact: Some(vec![0]),
        };
        assert!(matches!(
            hensel_lift(&h, &root, 4, 1),
            Err(Error::HypothesisFailed { .. })
        ));
    }

    #[test]
    fn multiplicity_examples() {
        let root = |p, v, value: Vec<u64>, exact: Option<Vec<i64>>| PAdicRoot {
            p,
            v,
            value,
            multiplicity: None,
            unit_coords: true,
            gamma: None,
            exact,
        };
        // h'(1) = 2 is a 3-adic unit
        let m = multiplicity(&poly("x^2-1"), &root(3, 2, vec![1], Some(vec![1]))).unwrap();
        assert_eq!(m, Some(1));
        // first derivative vanishes identically at 1, second is 2
        let m = multiplicity(&poly("(x-1)^2"), &root(7, 2, vec![1], Some(vec![1]))).unwrap();
        assert_eq!(m, Some(2));
        // valuation check, not mod-p: ord_2(2) = 1 < precision 2
        let m = multiplicity(&poly("x^2-1"), &root(2, 2, vec![1], None)).unwrap();
        assert_eq!(m, Some(1));
        // at precision 1 the same root cannot certify order 1
        let m = multiplicity(&poly("x^2-1"), &root(2, 1, vec![1], None)).unwrap();
        assert_eq!(m, None);
    }

    #[test]
    fn certify_regressions() {
        // x^2: no odd root of x^2 ≡ 0 (mod 2)
        let certs = certify(&poly("x^2"), CertifyMode::PIntersective, 5, 4, CAP).unwrap();
        let at2 = certs.iter().find(|c| c.p == 2).unwrap();
        assert!(matches!(
            at2.status,
            CertStatus::NotIntersective { depth } if depth <= 2
        ));

        // x^2-1 certifies everywhere in P-mode
        let certs = certify(&poly("x^2-1"), CertifyMode::PIntersective, 100, 6, CAP).unwrap();
        assert_eq!(certs.len(), 25);
        for c in &certs {
            match &c.status {
                CertStatus::Certified { root, .. } => {
                    assert!(root.unit_coords);
                    assert_eq!(root.multiplicity, Some(1));
                }
                other => panic!("p={} not certified: {other:?}", c.p),
            }
        }

        // 2 is a quadratic non-residue mod 3
        let certs = certify(&poly("x^2-2"), CertifyMode::Intersective, 5, 4, CAP).unwrap();
        let at3 = certs.iter().find(|c| c.p == 3).unwrap();
        assert_eq!(at3.status, CertStatus::NotIntersective { depth: 1 });
    }

    #[test]
    fn not_intersective_certificates_are_sound() {
        // re-running the exhaustive search at the certified depth reproduces
        // emptiness
        for (h, mode, p) in [
            ("x^2-2", CertifyMode::Intersective, 3u64),
            ("x^2", CertifyMode::PIntersective, 2),
            ("x^2", CertifyMode::PIntersective, 5),
        ] {
            let cert = certify_prime(&poly(h), mode, p, 4, CAP);
            let depth = match cert.status {
                CertStatus::NotIntersective { depth } => depth,
                other => panic!("expected NotIntersective for {h} at p={p}, got {other:?}"),
            };
            let unit_only = mode == CertifyMode::PIntersective;
            let roots = roots_mod(&poly(h), p, depth, unit_only, CAP).unwrap();
            assert!(roots.is_empty(), "{h} at p={p}^{depth} is not empty");
        }
    }

    #[test]
    fn certify_is_monotone_in_depth() {
        for depth in [3, 5, 7] {
            let certs =
                certify(&poly("x^2-1"), CertifyMode::PIntersective, 20, depth, CAP).unwrap();
            for c in certs {
                assert!(matches!(c.status, CertStatus::Certified { .. }));
            }
        }
    }

    #[test]
    fn exact_roots_certify_singular_polynomials() {
        // x^2 has the exact (non-unit) root 0 with m_p = 2
        let certs = certify(&poly("x^2"), CertifyMode::Intersective, 10, 4, CAP).unwrap();
        for c in certs {
            match c.status {
                CertStatus::Certified { root, lift_reason } => {
                    assert_eq!(lift_reason, LiftReason::ExactRoot);
                    assert_eq!(root.multiplicity, Some(2));
                }
                other => panic!("expected exact certification, got {other:?}"),
            }
        }
    }

    #[test]
    fn negative_exact_roots_are_found() {
        // x^2 - x - 1 mod 11: roots 4 and 8; neither exact. x+1: exact root -1.
        let h = poly("x+1");
        let cert = certify_prime(&h, CertifyMode::PIntersective, 3, 3, CAP);
        match cert.status {
            CertStatus::Certified { root, .. } => {
                assert_eq!(root.exact, Some(vec![-1]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn raise_precision_round_trips() {
        let h = poly("x^2-1");
        let cert = certify_prime(&h, CertifyMode::PIntersective, 7, 3, CAP);
        let root = match cert.status {
            CertStatus::Certified { root, .. } => root,
            other => panic!("{other:?}"),
        };
        let raised = raise_precision(&h, &root, 6).unwrap();
        assert_eq!(raised.v, 6);
        let m = pow_u64_checked(7, 6).unwrap();
        assert_eq!(h.evaluate_mod(&raised.value, m).unwrap(), 0);
        assert_eq!(raised.value[0] % 7, root.value[0] % 7);
    }
}
