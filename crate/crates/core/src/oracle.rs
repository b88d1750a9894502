//! Brute-force ground truth for every sparsifier the crate emits.
//!
//! The evaluators here are written independently of the modules under test:
//! they share only the data types, never the weight computation paths, so a
//! bug in `code::encode` or `csp::evaluate_csp` cannot silently cancel out.

use crate::code::GeneratingMatrix;
use crate::csp::CspInstance;
use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::One;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

/// How the message space was covered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum VerifyMode {
    Exhaustive,
    /// Uniform random messages; never used where exhaustiveness is demanded.
    Sampled { seed: u64, samples: u64 },
}

/// A single out-of-tolerance observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub input: Vec<u64>,
    pub exact: f64,
    pub approx: f64,
}

/// Result of sweeping a sparsifier against exact recomputation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub instances_checked: u64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub violations: Vec<Violation>,
    pub passed: bool,
    pub epsilon: f64,
    /// Extra multiplicative slack applied on top of (1 +- epsilon).
    pub slack: f64,
    pub mode: VerifyMode,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Relative slack applied on top of the (1 +- eps) window.
pub const DEFAULT_SLACK: f64 = 1e-6;

// --- independent evaluators -------------------------------------------------

/// Independent encoder: straightforward per-row accumulation.
fn oracle_codeword(g: &GeneratingMatrix, message: &[u64]) -> Vec<u64> {
    let spec = g.spec();
    let u = spec.components();
    let moduli = spec.moduli();
    let mut flat = vec![0u64; g.rows() * u];
    for i in 0..g.rows() {
        for (j, &x) in message.iter().enumerate() {
            let cell = g.entry(i, j);
            for p in 0..u {
                let q = moduli[p] as u128;
                let acc = flat[i * u + p] as u128;
                flat[i * u + p] = ((acc + (x as u128 % q) * (cell[p] as u128)) % q) as u64;
            }
        }
    }
    flat
}

fn oracle_exact_weight(g: &GeneratingMatrix, flat_codeword: &[u64]) -> f64 {
    let u = g.spec().components();
    let mut total = 0.0;
    for i in 0..g.rows() {
        if flat_codeword[i * u..(i + 1) * u].iter().any(|&v| v != 0) {
            total += g.weights()[i];
        }
    }
    total
}

fn oracle_sparse_weight(entries: &[(usize, f64)], flat_codeword: &[u64], u: usize) -> f64 {
    let mut total = 0.0;
    for &(j, w) in entries {
        if flat_codeword[j * u..(j + 1) * u].iter().any(|&v| v != 0) {
            total += w;
        }
    }
    total
}

/// Independent CSP evaluator.
fn oracle_csp_value(inst: &CspInstance, assignment: &[u8]) -> f64 {
    let mut total = 0.0;
    for c in &inst.constraints {
        let mut idx = 0usize;
        for &v in &c.vars {
            idx = (idx << 1) | assignment[v] as usize;
        }
        if c.predicate.table()[idx] {
            total += c.weight;
        }
    }
    total
}

fn column_order(g: &GeneratingMatrix, j: usize) -> u64 {
    let moduli = g.spec().moduli();
    let mut ord = 1u64;
    for i in 0..g.rows() {
        for (p, &v) in g.entry(i, j).iter().enumerate() {
            let q = moduli[p];
            let o = if v == 0 { 1 } else { q / gcd(v, q) };
            ord = ord / gcd(ord, o) * o;
        }
    }
    ord
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

struct RatioTracker {
    min_ratio: f64,
    max_ratio: f64,
    violations: Vec<Violation>,
    lo: f64,
    hi: f64,
    checked: u64,
}

impl RatioTracker {
    fn new(epsilon: f64, slack: f64) -> Self {
        RatioTracker {
            min_ratio: f64::INFINITY,
            max_ratio: 0.0,
            violations: Vec::new(),
            lo: (1.0 - epsilon) * (1.0 - slack),
            hi: (1.0 + epsilon) * (1.0 + slack),
            checked: 0,
        }
    }

    fn observe(&mut self, input: &[u64], exact: f64, approx: f64) {
        self.checked += 1;
        if exact == 0.0 {
            // zero-weight inputs must stay exactly zero
            if approx != 0.0 {
                self.violations.push(Violation { input: input.to_vec(), exact, approx });
            }
            return;
        }
        let ratio = approx / exact;
        self.min_ratio = self.min_ratio.min(ratio);
        self.max_ratio = self.max_ratio.max(ratio);
        if ratio < self.lo || ratio > self.hi {
            self.violations.push(Violation { input: input.to_vec(), exact, approx });
        }
    }

    fn finish(self, epsilon: f64, slack: f64, mode: VerifyMode) -> VerificationReport {
        let passed = self.violations.is_empty();
        VerificationReport {
            instances_checked: self.checked,
            min_ratio: if self.min_ratio.is_finite() { self.min_ratio } else { 1.0 },
            max_ratio: if self.max_ratio > 0.0 { self.max_ratio } else { 1.0 },
            violations: self.violations,
            passed,
            epsilon,
            slack,
            mode,
        }
    }
}

/// Check every codeword weight of `g` against the reweighted subset, either
/// exhaustively (message count within `cap`) or on `samples` random messages
/// when a sampling fallback is supplied.
pub fn verify_code_sparsifier(
    g: &GeneratingMatrix,
    entries: &[(usize, f64)],
    epsilon: f64,
    cap: u64,
    sample_fallback: Option<(u64, u64)>,
) -> Result<VerificationReport> {
    let u = g.spec().components();
    let orders: Vec<u64> = (0..g.cols()).map(|j| column_order(g, j)).collect();
    let mut total = BigUint::one();
    for &o in &orders {
        total *= BigUint::from(o);
    }
    let mut tracker = RatioTracker::new(epsilon, DEFAULT_SLACK);
    if total <= BigUint::from(cap) {
        let mut message = vec![0u64; g.cols()];
        loop {
            let cw = oracle_codeword(g, &message);
            let exact = oracle_exact_weight(g, &cw);
            let approx = oracle_sparse_weight(entries, &cw, u);
            tracker.observe(&message, exact, approx);
            let mut j = 0;
            loop {
                if j == message.len() {
                    return Ok(tracker.finish(epsilon, DEFAULT_SLACK, VerifyMode::Exhaustive));
                }
                message[j] += 1;
                if message[j] < orders[j] {
                    break;
                }
                message[j] = 0;
                j += 1;
            }
        }
    }
    let Some((seed, samples)) = sample_fallback else {
        return Err(Error::EnumerationCapExceeded { needed: total, cap });
    };
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..samples {
        let message: Vec<u64> =
            orders.iter().map(|&o| rng.gen_range(0..o.max(1))).collect();
        let cw = oracle_codeword(g, &message);
        let exact = oracle_exact_weight(g, &cw);
        let approx = oracle_sparse_weight(entries, &cw, u);
        tracker.observe(&message, exact, approx);
    }
    Ok(tracker.finish(epsilon, DEFAULT_SLACK, VerifyMode::Sampled { seed, samples }))
}

/// Sweep all 2^n assignments of both instances with the independent CSP
/// evaluator.
pub fn verify_csp_sparsifier(
    inst: &CspInstance,
    sparsified: &CspInstance,
    epsilon: f64,
    cap: u64,
) -> Result<VerificationReport> {
    if inst.n >= 63 || (1u64 << inst.n) > cap {
        return Err(Error::EnumerationCapExceeded {
            needed: BigUint::from(2u32).pow(inst.n as u32),
            cap,
        });
    }
    let mut tracker = RatioTracker::new(epsilon, DEFAULT_SLACK);
    let mut bits = vec![0u8; inst.n];
    for mask in 0..1u64 << inst.n {
        for (i, b) in bits.iter_mut().enumerate() {
            *b = ((mask >> i) & 1) as u8;
        }
        let exact = oracle_csp_value(inst, &bits);
        let approx = oracle_csp_value(sparsified, &bits);
        let input: Vec<u64> = bits.iter().map(|&b| b as u64).collect();
        tracker.observe(&input, exact, approx);
    }
    Ok(tracker.finish(epsilon, DEFAULT_SLACK, VerifyMode::Exhaustive))
}

/// One row of the counting-bound table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    pub alpha: u64,
    /// Exact number of distinct codewords of weight <= alpha * d.
    pub count: u64,
    /// binom(ceil(log2 |C|), alpha) * q^(alpha + 1), serialized as decimal.
    pub bound: String,
    pub within: bool,
}

/// Exact weight census of the distinct codewords of `g` against the counting
/// bound for parameter `d`, for alpha = 1..=alpha_max.
pub fn counting_bound_census(
    g: &GeneratingMatrix,
    d: u64,
    alpha_max: u64,
    cap: u64,
) -> Result<Vec<CensusRow>> {
    let orders: Vec<u64> = (0..g.cols()).map(|j| column_order(g, j)).collect();
    let mut total = BigUint::one();
    for &o in &orders {
        total *= BigUint::from(o);
    }
    if total > BigUint::from(cap) {
        return Err(Error::EnumerationCapExceeded { needed: total, cap });
    }
    // distinct codewords with their weights
    let mut weights: std::collections::HashMap<Vec<u64>, f64> = Default::default();
    let mut message = vec![0u64; g.cols()];
    'outer: loop {
        let cw = oracle_codeword(g, &message);
        let w = oracle_exact_weight(g, &cw);
        weights.entry(cw).or_insert(w);
        let mut j = 0;
        loop {
            if j == message.len() {
                break 'outer;
            }
            message[j] += 1;
            if message[j] < orders[j] {
                break;
            }
            message[j] = 0;
            j += 1;
        }
    }
    let nlogq = crate::code::log2_biguint(&BigUint::from(weights.len() as u64)).ceil() as u64;
    let mut rows = Vec::new();
    for alpha in 1..=alpha_max {
        let count =
            weights.values().filter(|&&w| w <= (alpha * d) as f64).count() as u64;
        // the binomial factor floors at 1 so the trivial code (only the zero
        // word) stays within its q^(alpha+1) allowance
        let bound = binom(nlogq, alpha).max(BigUint::one())
            * g.spec().order().pow(alpha as u32 + 1);
        rows.push(CensusRow {
            alpha,
            count,
            within: BigUint::from(count) <= bound,
            bound: bound.to_string(),
        });
    }
    Ok(rows)
}

fn binom(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= BigUint::from(n - i);
        den *= BigUint::from(i + 1);
    }
    num / den
}
