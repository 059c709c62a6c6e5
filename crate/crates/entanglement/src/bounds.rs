//! Counting and threshold formulas behind the probabilistic arguments:
//! perfect-matching counts, Hamiltonicity and edge-membership probabilities
//! for uniform matchings, ternary entropy minimization, and the exponent
//! bookkeeping for sparse-cut failure probabilities. Counts and probabilities
//! are exact (big integers and rationals); floats appear only as display
//! values and in the transcendental entropy formulas.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::rational::{BigRational, Ratio};
use num::{BigUint, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("not a probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("parameter out of domain: {0}")]
    Domain(String),
}

/// A named numeric bound with the inputs that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub parameters: BTreeMap<String, f64>,
    pub value: f64,
    /// Exact rendering when the quantity is rational; `None` for
    /// transcendental values.
    pub exact: Option<String>,
    pub formula: String,
    pub feasible: bool,
}

impl BoundReport {
    fn new(name: &str, formula: &str, value: f64, feasible: bool) -> Self {
        BoundReport {
            name: name.to_string(),
            parameters: BTreeMap::new(),
            value,
            exact: None,
            formula: formula.to_string(),
            feasible,
        }
    }

    fn with_param(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }
}

fn entropy_term(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Binary entropy in bits; 0 log 0 = 0 at both endpoints.
pub fn binary_entropy(x: f64) -> Result<f64, BoundsError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(BoundsError::Domain(format!("binary entropy argument {x} outside [0,1]")));
    }
    Ok(entropy_term(x) + entropy_term(1.0 - x))
}

/// Ternary entropy in bits over a distribution (x, y, z).
pub fn entropy3(x: f64, y: f64, z: f64) -> Result<f64, BoundsError> {
    for (label, c) in [("x", x), ("y", y), ("z", z)] {
        if !(0.0..=1.0).contains(&c) {
            return Err(BoundsError::InvalidDistribution(format!("{label} = {c}")));
        }
    }
    if (x + y + z - 1.0).abs() > 1e-12 {
        return Err(BoundsError::InvalidDistribution(format!("sum {} != 1", x + y + z)));
    }
    Ok(entropy_term(x) + entropy_term(y) + entropy_term(z))
}

/// Minimum of [`entropy3`] over the simplex slice with every coordinate at
/// most 1/2, found by coarse-to-fine grid refinement. The function is concave
/// so the minimum sits at a polytope vertex, i.e. a permutation of
/// (1/2, 1/2, 0) with value exactly 1.
pub fn entropy3_min_constrained() -> (f64, (f64, f64, f64)) {
    let eval = |x: f64, y: f64| -> Option<f64> {
        let z = 1.0 - x - y;
        if z < -1e-15 || x > 0.5 || y > 0.5 || z > 0.5 + 1e-15 {
            return None;
        }
        let z = z.max(0.0).min(0.5);
        entropy3(x, y, z).ok()
    };
    let mut best = (f64::INFINITY, (0.0, 0.0, 0.0));
    // Polytope vertices first: corners of {x,y,z >= 0, x+y+z = 1, coords <= 1/2}.
    for &(x, y) in &[(0.5, 0.5), (0.5, 0.0), (0.0, 0.5)] {
        if let Some(h) = eval(x, y) {
            if h < best.0 {
                best = (h, (x, y, 1.0 - x - y));
            }
        }
    }
    // Coarse grid, then halve the step around the incumbent.
    let mut center = (best.1 .0, best.1 .1);
    let mut step = 1.0 / 32.0;
    for x in 0..=32 {
        for y in 0..=32 {
            let (xf, yf) = (x as f64 / 32.0, y as f64 / 32.0);
            if let Some(h) = eval(xf, yf) {
                if h < best.0 {
                    best = (h, (xf, yf, 1.0 - xf - yf));
                    center = (xf, yf);
                }
            }
        }
    }
    while step > 1e-12 {
        step /= 2.0;
        for dx in -8i32..=8 {
            for dy in -8i32..=8 {
                let xf = (center.0 + dx as f64 * step).clamp(0.0, 0.5);
                let yf = (center.1 + dy as f64 * step).clamp(0.0, 0.5);
                if let Some(h) = eval(xf, yf) {
                    if h < best.0 {
                        best = (h, (xf, yf, 1.0 - xf - yf));
                    }
                }
            }
        }
        center = (best.1 .0, best.1 .1);
    }
    best
}

/// Number of perfect (n even) or near-perfect (n odd) matchings of K_n:
/// n! / (floor(n/2)! * 2^floor(n/2)), exactly.
pub fn matching_count(n: usize) -> BigUint {
    let mut num = BigUint::one();
    for i in 1..=n {
        num *= BigUint::from(i);
    }
    let half = n / 2;
    let mut den = BigUint::one();
    for i in 1..=half {
        den *= BigUint::from(i);
    }
    den <<= half;
    num / den
}

/// Probability that the union of two independent uniform perfect matchings
/// of K_n is a Hamilton cycle: (n-1)! / ((n-1)!!)^2, exactly.
pub fn ham_probability(n: usize) -> Result<BigRational, BoundsError> {
    if n < 4 || n % 2 != 0 {
        return Err(BoundsError::Domain(format!("Hamiltonicity probability needs even n >= 4, got {n}")));
    }
    let mut num = BigInt::one();
    for i in 1..n {
        num *= BigInt::from(i);
    }
    let den: BigInt = matching_count(n).into();
    Ok(BigRational::new(num, den.clone() * den))
}

/// Probability that a fixed edge of K_n belongs to a uniform perfect
/// matching: 1/(n-1).
pub fn edge_in_matching_probability(n: usize) -> Result<Ratio<u64>, BoundsError> {
    if n < 2 || n % 2 != 0 {
        return Err(BoundsError::Domain(format!("edge membership needs even n >= 2, got {n}")));
    }
    Ok(Ratio::new(1, (n - 1) as u64))
}

/// Expected number of shared edges between two independent uniform perfect
/// matchings of K_n: n / (2(n-1)).
pub fn matching_overlap_expectation(n: usize) -> Result<Ratio<u64>, BoundsError> {
    if n < 2 || n % 2 != 0 {
        return Err(BoundsError::Domain(format!("overlap expectation needs even n >= 2, got {n}")));
    }
    Ok(Ratio::new(n as u64, 2 * (n - 1) as u64))
}

/// Per-vertex exponent (in nats) of the union bound
/// 2^(H(a)n) * 2^(a n) * exp(-(C/4)(a^2 - b^2) n) with b = (2/3)a, as a
/// function of the edge-density constant `c`.
pub fn gnp_union_exponent(alpha_bar: f64, c: f64) -> Result<f64, BoundsError> {
    if !(alpha_bar > 0.0 && alpha_bar <= 1.0) {
        return Err(BoundsError::Domain(format!("alpha_bar {alpha_bar} outside (0,1]")));
    }
    let h = binary_entropy(alpha_bar)?;
    let beta = 2.0 / 3.0 * alpha_bar;
    Ok((h + alpha_bar) * std::f64::consts::LN_2 - c / 4.0 * (alpha_bar * alpha_bar - beta * beta))
}

/// Threshold edge-density constant: the infimum of C for which the union
/// bound exponent is negative, C* = 4 ln 2 (H(a) + a) / (a^2 - (2a/3)^2).
/// Every C strictly above the reported value is feasible.
pub fn gnp_constant(alpha_bar: f64) -> Result<BoundReport, BoundsError> {
    if !(alpha_bar > 0.0 && alpha_bar <= 1.0) {
        return Err(BoundsError::Domain(format!("alpha_bar {alpha_bar} outside (0,1]")));
    }
    let h = binary_entropy(alpha_bar)?;
    let beta = 2.0 / 3.0 * alpha_bar;
    let c_star = 4.0 * std::f64::consts::LN_2 * (h + alpha_bar)
        / (alpha_bar * alpha_bar - beta * beta);
    debug_assert!(gnp_union_exponent(alpha_bar, c_star + 1e-9).unwrap() < 0.0);
    Ok(BoundReport::new(
        "gnp_constant",
        "C* = 4 ln2 (H(a)+a)/(a^2-(2a/3)^2); exponent negative for C > C*",
        c_star,
        true,
    )
    .with_param("alpha_bar", alpha_bar))
}

/// Base-2 exponent of the failure probability that a random matching union
/// is not alpha-robust: H(a) - a/2 + 3 eps with a = 1 - alpha. Negative
/// means the bound is useful. Requires alpha <= 1/2 and eps > 0.
pub fn robust_failure_exponent(alpha: f64, eps: f64) -> Result<BoundReport, BoundsError> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(BoundsError::Domain(format!("alpha {alpha} outside (0, 1/2]")));
    }
    if eps <= 0.0 {
        return Err(BoundsError::Domain(format!("eps {eps} must be positive")));
    }
    let a_bar = 1.0 - alpha;
    let value = binary_entropy(a_bar)? - a_bar / 2.0 + 3.0 * eps;
    // Same bracket rewritten around small alpha; tends to -1/2 as alpha -> 0.
    let bracket = -0.5 + binary_entropy(alpha)? + alpha / 2.0;
    debug_assert!((bracket + 3.0 * eps - value).abs() < 1e-12);
    Ok(BoundReport::new(
        "robust_failure_exponent",
        "H(1-alpha) - (1-alpha)/2 + 3 eps = -1/2 + H(alpha) + alpha/2 + 3 eps",
        value,
        value < 0.0,
    )
    .with_param("alpha", alpha)
    .with_param("eps", eps)
    .with_param("bracket", bracket))
}

/// Largest alpha for which the eps -> 0 failure exponent is still negative:
/// the root of H(alpha) + alpha/2 = 1/2 on (0, 1/2), by bisection to 1e-6.
pub fn feasibility_root_alpha() -> f64 {
    let f = |a: f64| binary_entropy(a).unwrap() + a / 2.0 - 0.5;
    let (mut lo, mut hi) = (1e-12, 0.5);
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Float view of a big rational for display.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    let num = r.numer().to_f64().unwrap_or(f64::NAN);
    let den = r.denom().to_f64().unwrap_or(f64::NAN);
    if num.is_finite() && den.is_finite() && den != 0.0 {
        num / den
    } else {
        // Fall back to digit-limited division for huge operands.
        let scaled = (r * BigRational::from(BigInt::from(1u64 << 53))).trunc();
        scaled.numer().to_f64().unwrap_or(f64::NAN) / (1u64 << 53) as f64
    }
}

pub fn is_zero_ratio(r: &BigRational) -> bool {
    r.numer().is_zero()
}
