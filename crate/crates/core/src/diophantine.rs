//! Continued fractions, nodal-gap profiles `g(K) = min_{k≤K} |sin(πkx₀)|`
//! and a heuristic arithmetic label for observation points in `(0,1)`.
//!
//! Rationals and quadratic surds are expanded in exact integer arithmetic.

use alloc::vec::Vec;

use crate::{sin_pi, Error, Result};

/// A point of `(0,1)` in one of three exact or inexact representations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Real {
    Rational { num: i128, den: i128 },
    /// `(a + b√d) / c` with `d` not a perfect square.
    QuadraticSurd { a: i128, b: i128, d: i128, c: i128 },
    Float(f64),
}

impl Real {
    pub fn rational(num: i128, den: i128) -> Result<Real> {
        if den == 0 {
            return Err(Error::domain("rational with zero denominator"));
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i128;
        let s = if den < 0 { -1 } else { 1 };
        Real::Rational { num: s * num / g, den: s * den / g }.checked()
    }

    pub fn surd(a: i128, b: i128, d: i128, c: i128) -> Result<Real> {
        if c == 0 || d <= 0 {
            return Err(Error::domain("surd needs c ≠ 0 and d > 0"));
        }
        let r = d.isqrt();
        if r * r == d || b == 0 {
            let num = a.checked_add(b.checked_mul(r).ok_or_else(overflow)?).ok_or_else(overflow)?;
            return Real::rational(num, c);
        }
        Real::QuadraticSurd { a, b, d, c }.checked()
    }

    pub fn float(x: f64) -> Result<Real> {
        Real::Float(x).checked()
    }

    /// `(√5 − 1)/2`
    pub fn golden() -> Real {
        Real::QuadraticSurd { a: -1, b: 1, d: 5, c: 2 }
    }

    fn checked(self) -> Result<Real> {
        let inside = match self {
            Real::Rational { num, den } => num > 0 && num < den,
            _ => {
                let x = self.to_f64();
                x > 0.0 && x < 1.0
            }
        };
        if inside {
            Ok(self)
        } else {
            Err(Error::domain("x0 must lie in (0, 1)"))
        }
    }

    pub fn to_f64(&self) -> f64 {
        let (hi, lo) = self.to_dd();
        hi + lo
    }

    /// Double-double approximation `hi + lo`.
    fn to_dd(&self) -> (f64, f64) {
        match *self {
            Real::Rational { num, den } => {
                let (n, d) = (num as f64, den as f64);
                let q = n / d;
                // exact when num, den < 2^53
                let r = libm::fma(-q, d, n) + (num - n as i128) as f64 - q * (den - d as i128) as f64;
                (q, r / d)
            }
            Real::QuadraticSurd { a, b, d, c } => {
                let s = libm::sqrt(d as f64);
                let s_lo = libm::fma(-s, s, d as f64) / (2.0 * s);
                let bf = b as f64;
                let p = bf * s;
                let p_lo = libm::fma(bf, s, -p) + bf * s_lo;
                let (num, num_lo) = two_sum(a as f64, p);
                let num_lo = num_lo + p_lo;
                let cf = c as f64;
                let q = num / cf;
                let r = libm::fma(-q, cf, num) + num_lo;
                (q, r / cf)
            }
            Real::Float(x) => (x, 0.0),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Real::Rational { .. })
    }
}

impl core::fmt::Display for Real {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match *self {
            Real::Rational { num, den } => write!(f, "{num}/{den}"),
            Real::QuadraticSurd { a, b, d, c } => write!(f, "({a}+{b}*sqrt({d}))/{c}"),
            Real::Float(x) => write!(f, "{x}"),
        }
    }
}

fn overflow() -> Error {
    Error::domain("integer overflow in exact arithmetic")
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

pub const MAX_CF_DEPTH: usize = 40;

#[derive(Clone, Debug, PartialEq)]
pub struct CFExpansion {
    pub x0: Real,
    /// `a_1, a_2, …` of `x0 = [0; a_1, a_2, …]`.
    pub quotients: Vec<u128>,
    /// `(p_i, q_i)` for `i = 1..=quotients.len()`.
    pub convergents: Vec<(u128, u128)>,
    /// The expansion ended because `x0` is rational.
    pub terminated: bool,
    /// Stopped before `depth`: integer overflow, or a float input whose
    /// remaining quotients are below its resolution.
    pub truncated: bool,
}

/// Partial quotients of `x0 ∈ (0,1)` by the Gauss map in exact integer
/// arithmetic; a float is expanded as the dyadic rational it stores.
pub fn continued_fraction(x0: &Real, depth: usize) -> Result<CFExpansion> {
    if depth > MAX_CF_DEPTH {
        return Err(Error::domain("continued fraction depth is limited to 40"));
    }
    let x0 = x0.checked()?;
    let mut quotients = Vec::new();
    let mut terminated = false;
    let mut truncated = false;
    match x0 {
        Real::Rational { num, den } => {
            let (mut n, mut d) = (num as u128, den as u128);
            while quotients.len() < depth {
                // x = n/d ∈ (0,1); 1/x = d/n
                let (a, r) = (d / n, d % n);
                quotients.push(a);
                if r == 0 {
                    terminated = true;
                    break;
                }
                (d, n) = (n, r);
            }
        }
        Real::QuadraticSurd { a, b, d, c } => {
            let (a, b, c) = if b < 0 { (-a, -b, -c) } else { (a, b, c) };
            // x = (P + √D)/Q with Q | D − P²
            let terms = || -> Option<(i128, i128, i128)> {
                let ac = a.checked_mul(c.checked_abs()?)?;
                let dd = b.checked_mul(b)?.checked_mul(c.checked_mul(c)?)?.checked_mul(d)?;
                Some((ac, dd, c.checked_mul(c.checked_abs()?)?))
            };
            match terms() {
                None => truncated = true,
                Some((mut p, dd, mut q)) => {
                    let s = dd.isqrt();
                    let step = |p: i128, q: i128| -> Option<(i128, i128, i128)> {
                        let a = if q > 0 {
                            (p + s).div_euclid(q)
                        } else {
                            (-p - s - 1).div_euclid(-q)
                        };
                        let p2 = a.checked_mul(q)?.checked_sub(p)?;
                        let q2 = dd.checked_sub(p2.checked_mul(p2)?)? / q;
                        Some((a, p2, q2))
                    };
                    // a_0 = 0 for x ∈ (0,1)
                    match step(p, q) {
                        Some((0, p2, q2)) => {
                            (p, q) = (p2, q2);
                            // x = 1/((P' + √D)/Q') after the swap
                            while quotients.len() < depth {
                                match step(p, q) {
                                    Some((ai, p2, q2)) if ai > 0 => {
                                        quotients.push(ai as u128);
                                        (p, q) = (p2, q2);
                                    }
                                    _ => {
                                        truncated = true;
                                        break;
                                    }
                                }
                            }
                        }
                        _ => truncated = true,
                    }
                }
            }
        }
        Real::Float(x) => {
            let bits = x.to_bits();
            let exp = ((bits >> 52) & 0x7ff) as i32;
            let mant = (bits & ((1u64 << 52) - 1)) | if exp > 0 { 1u64 << 52 } else { 0 };
            let shift = 1075 - exp.max(1);
            if shift > 126 {
                truncated = true;
            } else {
                let inner = continued_fraction(&Real::rational(mant as i128, 1i128 << shift)?, depth)?;
                // keep a_i while 1/q_i² stays well above the spacing of doubles near x
                let ulp = (x.abs() * f64::EPSILON).max(f64::MIN_POSITIVE);
                for (i, &(_, q)) in inner.convergents.iter().enumerate() {
                    let qf = q as f64;
                    if 4.0 * qf * qf * ulp > 1.0 && !(inner.terminated && i + 1 == inner.quotients.len()) {
                        truncated = true;
                        break;
                    }
                    quotients.push(inner.quotients[i]);
                }
                terminated = inner.terminated && !truncated;
            }
        }
    }
    let convergents = convergents_of(&quotients);
    if convergents.len() < quotients.len() {
        quotients.truncate(convergents.len());
        truncated = true;
        terminated = false;
    }
    if !terminated && quotients.len() < depth {
        truncated = true;
    }
    Ok(CFExpansion { x0, quotients, convergents, terminated, truncated })
}

/// `p_i/q_i` for `[0; a_1, …, a_i]`, stopping at the first `u128` overflow.
pub fn convergents_of(quotients: &[u128]) -> Vec<(u128, u128)> {
    let mut out = Vec::with_capacity(quotients.len());
    let (mut p_prev, mut q_prev) = (1u128, 0u128);
    let (mut p, mut q) = (0u128, 1u128);
    for &a in quotients {
        let next = a
            .checked_mul(p)
            .and_then(|v| v.checked_add(p_prev))
            .zip(a.checked_mul(q).and_then(|v| v.checked_add(q_prev)));
        let Some((pn, qn)) = next else { break };
        (p_prev, q_prev, p, q) = (p, q, pn, qn);
        out.push((p, q));
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodalGapProfile {
    pub x0: Real,
    pub k_max: u64,
    /// `g[K-1] = min_{k≤K} |sin(πkx₀)|`
    pub g: Vec<f64>,
    /// Smallest minimizing `k` for each `K`.
    pub argmin: Vec<u64>,
}

impl NodalGapProfile {
    pub fn at(&self, k: u64) -> f64 {
        self.g[(k - 1) as usize]
    }
}

/// `|sin(πkx₀)|` evaluated from the distance of `kx₀` to the nearest
/// integer; exact reduction for rationals, double-double otherwise.
pub fn nodal_value(x0: &Real, k: u64) -> f64 {
    match *x0 {
        Real::Rational { num, den } => {
            let r = (u128::from(k) * num as u128 % den as u128) as i128;
            let dist = r.min(den - r);
            let (n, d) = (dist as f64, den as f64);
            sin_pi(n / d).abs()
        }
        _ => {
            let (hi, lo) = x0.to_dd();
            let kf = k as f64;
            let p = kf * hi;
            let e = libm::fma(kf, hi, -p) + kf * lo;
            let frac = (p - libm::round(p)) + e;
            let frac = frac - libm::round(frac);
            sin_pi(frac).abs()
        }
    }
}

pub fn nodal_gap_profile(x0: &Real, k_max: u64) -> Result<NodalGapProfile> {
    if k_max == 0 {
        return Err(Error::domain("K_max must be at least 1"));
    }
    if k_max > 100_000_000 {
        return Err(Error::resource("nodal profile length", 100_000_000));
    }
    let x0 = x0.checked()?;
    let mut g = Vec::with_capacity(k_max as usize);
    let mut argmin = Vec::with_capacity(k_max as usize);
    let (mut best, mut best_k) = (f64::INFINITY, 0);
    for k in 1..=k_max {
        let v = nodal_value(&x0, k);
        if v < best {
            best = v;
            best_k = k;
        }
        g.push(best);
        argmin.push(best_k);
    }
    Ok(NodalGapProfile { x0, k_max, g, argmin })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithmeticLabel {
    RationalLike,
    BadlyApproximableLike,
    LiouvilleLike,
    Inconclusive,
}

impl ArithmeticLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ArithmeticLabel::RationalLike => "rational_like",
            ArithmeticLabel::BadlyApproximableLike => "badly_approximable_like",
            ArithmeticLabel::LiouvilleLike => "liouville_like",
            ArithmeticLabel::Inconclusive => "inconclusive",
        }
    }
}

/// Thresholds on the exponent `e(K) = ln g(K) / ln K`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifyThresholds {
    pub window_start: u64,
    /// Badly approximable if `e(K) ≥` this on the whole window.
    pub badly_min_exponent: f64,
    /// Liouville-like if `e(K) ≤` this on `sustain` consecutive `K`.
    pub liouville_max_exponent: f64,
    pub sustain: usize,
    pub zero_tol: f64,
    pub min_k_max: u64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        ClassifyThresholds {
            window_start: 10,
            badly_min_exponent: -1.5,
            liouville_max_exponent: -3.0,
            sustain: 10,
            zero_tol: 1e-12,
            min_k_max: 100,
        }
    }
}

pub fn exponents(profile: &NodalGapProfile, window_start: u64) -> Vec<(u64, f64)> {
    (window_start.max(2)..=profile.k_max)
        .map(|k| (k, libm::log(profile.at(k)) / libm::log(k as f64)))
        .collect()
}

/// Heuristic label; a pure function of the profile and thresholds.
pub fn classify(profile: &NodalGapProfile, th: &ClassifyThresholds) -> ArithmeticLabel {
    if profile.k_max < th.min_k_max {
        return ArithmeticLabel::Inconclusive;
    }
    if profile.g.last().is_some_and(|&g| g <= th.zero_tol) {
        return ArithmeticLabel::RationalLike;
    }
    let e = exponents(profile, th.window_start);
    let mut run = 0;
    for &(_, v) in &e {
        run = if v <= th.liouville_max_exponent { run + 1 } else { 0 };
        if run >= th.sustain.max(1) {
            return ArithmeticLabel::LiouvilleLike;
        }
    }
    if !e.is_empty() && e.iter().all(|&(_, v)| v >= th.badly_min_exponent) {
        return ArithmeticLabel::BadlyApproximableLike;
    }
    ArithmeticLabel::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn classical_expansions() {
        let g = continued_fraction(&Real::golden(), 40).unwrap();
        assert_eq!(g.quotients, vec![1; 40]);
        assert!(!g.truncated && !g.terminated);
        // consecutive Fibonacci numbers
        assert_eq!(g.convergents[9], (55, 89));
        let r2 = continued_fraction(&Real::surd(-1, 1, 2, 1).unwrap(), 40).unwrap();
        assert_eq!(r2.quotients, vec![2; 40]);
        let third = continued_fraction(&Real::rational(1, 3).unwrap(), 10).unwrap();
        assert_eq!(third.quotients, vec![3]);
        assert!(third.terminated && !third.truncated);
        let q = continued_fraction(&Real::rational(415, 93 * 5 + 1).unwrap(), 40).unwrap();
        let (p, qq) = *q.convergents.last().unwrap();
        assert_eq!((p, qq), (415, 466));
    }

    #[test]
    fn surd_from_other_forms() {
        // (3 − √3)/2 = [0; 1, 1, 1, 2, 1, 2, …]
        let x = Real::surd(3, -1, 3, 2).unwrap();
        let cf = continued_fraction(&x, 7).unwrap();
        assert_eq!(cf.quotients, vec![1, 1, 1, 2, 1, 2, 1]);
        assert_eq!(Real::surd(1, 1, 4, 4).unwrap(), Real::Rational { num: 3, den: 4 });
        assert!(Real::surd(1, 1, 5, 2).is_err());
        assert!(continued_fraction(&Real::golden(), 41).is_err());
    }

    #[test]
    fn float_expansion_stops_at_resolution() {
        let x = Real::float(0.5 * (5f64.sqrt() - 1.0)).unwrap();
        let cf = continued_fraction(&x, 40).unwrap();
        assert!(cf.truncated);
        assert!(cf.quotients.len() >= 30 && cf.quotients.len() < 40);
        assert!(cf.quotients.iter().all(|&a| a == 1));
        let half = continued_fraction(&Real::float(0.5).unwrap(), 40).unwrap();
        assert_eq!(half.quotients, vec![2]);
        assert!(half.terminated);
    }

    #[test]
    fn convergent_error_bound_exact() {
        let x = Real::rational(1_234_567, 7_654_321).unwrap();
        let cf = continued_fraction(&x, 40).unwrap();
        let (num, den) = (1_234_567i128, 7_654_321i128);
        let n = cf.convergents.len();
        for (i, w) in cf.convergents.windows(2).enumerate() {
            let ((p, q), (_, q1)) = (w[0], w[1]);
            // |num/den − p/q| < 1/(q q1)  ⇔  |num·q − p·den|·q1 < den,
            // with equality at the last step of a finite expansion
            let lhs = (num * q as i128 - p as i128 * den).abs() * q1 as i128;
            if i + 2 == n {
                assert_eq!(lhs, den);
            } else {
                assert!(lhs < den);
            }
        }
    }

    #[test]
    fn dd_values() {
        let g = Real::golden();
        let (hi, lo) = g.to_dd();
        assert_eq!(hi, 0.5 * (5f64.sqrt() - 1.0));
        assert!(lo.abs() < 1e-16 && lo != 0.0);
        let r = Real::rational(100_000_003, 300_000_000).unwrap();
        assert!((r.to_f64() - (1.0 / 3.0 + 1e-8)).abs() < 1e-16);
    }

    #[test]
    fn midpoint_profile() {
        let p = nodal_gap_profile(&Real::rational(1, 2).unwrap(), 10).unwrap();
        assert_eq!(p.at(1), 1.0);
        assert_eq!(p.at(2), 0.0);
        assert_eq!(p.argmin[9], 2);
    }

    #[test]
    fn near_rational_plateau() {
        let x = Real::rational(100_000_003, 300_000_000).unwrap();
        let p = nodal_gap_profile(&x, 1000).unwrap();
        let expect = 3.0 * core::f64::consts::PI * 1e-8;
        for k in 3..=1000 {
            assert!((p.at(k) / expect - 1.0).abs() < 1e-6);
            assert_eq!(p.argmin[(k - 1) as usize], 3);
        }
        assert_eq!(classify(&p, &ClassifyThresholds::default()), ArithmeticLabel::LiouvilleLike);
    }

    #[test]
    fn golden_is_badly_approximable() {
        let p = nodal_gap_profile(&Real::golden(), 10_000).unwrap();
        let worst = (1..=10_000u64).map(|k| k as f64 * p.at(k)).fold(f64::INFINITY, f64::min);
        assert!(worst > 0.5, "{worst}");
        assert_eq!(classify(&p, &ClassifyThresholds::default()), ArithmeticLabel::BadlyApproximableLike);
        // argmins are Fibonacci denominators
        assert_eq!(p.argmin[9_999], 6765);
    }

    #[test]
    fn labels() {
        let th = ClassifyThresholds::default();
        let half = nodal_gap_profile(&Real::rational(1, 2).unwrap(), 200).unwrap();
        assert_eq!(classify(&half, &th), ArithmeticLabel::RationalLike);
        let short = nodal_gap_profile(&Real::golden(), 50).unwrap();
        assert_eq!(classify(&short, &th), ArithmeticLabel::Inconclusive);
        assert_eq!(classify(&half, &th), classify(&half.clone(), &th));
    }

    #[test]
    fn float_and_surd_agree() {
        let s = nodal_gap_profile(&Real::golden(), 2000).unwrap();
        let f = nodal_gap_profile(&Real::float(Real::golden().to_f64()).unwrap(), 2000).unwrap();
        for k in 1..=2000 {
            assert!((s.at(k) - f.at(k)).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn profile_monotone_and_bracketed(x in 0.001f64..0.999) {
            let r = Real::float(x).unwrap();
            let p = nodal_gap_profile(&r, 300).unwrap();
            let mut min_dist = f64::INFINITY;
            for k in 1..=300u64 {
                if k > 1 {
                    prop_assert!(p.at(k) <= p.at(k - 1));
                }
                let y = k as f64 * x;
                min_dist = min_dist.min((y - y.round()).abs());
                // 2‖y‖ ≤ |sin πy| ≤ π‖y‖
                prop_assert!(p.at(k) >= 2.0 * min_dist / 1.0001);
                prop_assert!(p.at(k) <= core::f64::consts::PI * min_dist * 1.0001);
            }
        }

        #[test]
        fn rational_zero_iff_denominator(num in 1i128..50, den in 2i128..60) {
            prop_assume!(num < den);
            let r = Real::rational(num, den).unwrap();
            let Real::Rational { den: d, .. } = r else { unreachable!() };
            let p = nodal_gap_profile(&r, 80).unwrap();
            for k in 1..=80u64 {
                prop_assert_eq!(p.at(k) == 0.0, k as i128 >= d);
            }
        }

        #[test]
        fn rational_expansion_reconstructs(num in 1i128..100_000, den in 2i128..100_000) {
            prop_assume!(num < den);
            let r = Real::rational(num, den).unwrap();
            let Real::Rational { num: n, den: d } = r else { unreachable!() };
            let cf = continued_fraction(&r, 40).unwrap();
            prop_assert!(cf.terminated);
            prop_assert_eq!(*cf.convergents.last().unwrap(), (n as u128, d as u128));
        }
    }
}
