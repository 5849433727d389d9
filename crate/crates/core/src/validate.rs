//! Empirical validation of moduli against the sequences they claim to govern.
//!
//! For each `k ≤ k_max` the defining inequality of the modulus kind is checked
//! by direct evaluation over a finite tail window. Float roundoff is absorbed
//! by a relative tolerance; a modulus whose value exceeds the evaluation
//! ceiling at some `k` is reported *unverifiable* there, not failed.

use crate::bigmath::leq_with_tol;
use crate::moduli::{Modulus, ModulusError, ModulusKind, ProductModulus, RealSequence};
use num::ToPrimitive;
use std::fmt;

/// Default relative tolerance for inequality verification.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Default per-call evaluation ceiling (largest index that will be scanned).
pub const DEFAULT_EVAL_CEILING: u64 = 100_000_000;

/// One failed inequality instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub k: u64,
    pub n: u64,
    pub lhs: f64,
    pub rhs: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k={} n={}: lhs {:.6e} > rhs {:.6e}",
            self.k, self.n, self.lhs, self.rhs
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unverifiable {
    pub k: u64,
    pub reason: String,
}

/// Outcome of validating one modulus against one sequence.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub subject: String,
    pub checks: u64,
    pub violations: Vec<Violation>,
    pub unverifiable: Vec<Unverifiable>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn record_eval_error(&mut self, k: u64, err: ModulusError) {
        self.unverifiable.push(Unverifiable {
            k,
            reason: err.to_string(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} checks, {} violations, {} unverifiable",
            self.subject,
            self.checks,
            self.violations.len(),
            self.unverifiable.len()
        )
    }
}

/// Settings for a validation sweep.
#[derive(Debug, Clone, Copy)]
pub struct ValidationConfig {
    pub k_max: u64,
    pub tail: u64,
    pub tolerance: f64,
    pub eval_ceiling: u64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            k_max: 50,
            tail: 10_000,
            tolerance: DEFAULT_TOLERANCE,
            eval_ceiling: DEFAULT_EVAL_CEILING,
        }
    }
}

/// Check the defining inequality of `m.kind` against `seq`.
///
/// * `ConvergenceRate`: `seq(n) ≤ 1/(k+1)` for `n ∈ [m(k), m(k)+tail]`.
/// * `CauchyModulus` (series): `Σ_{i=n+1}^{n+l} seq(i) ≤ 1/(k+1)` for
///   `n ∈ [m(k), m(k)+tail]`, `l ≤ tail`.
/// * `DivergenceRate`: `Σ_{i≤m(n)} seq(i) ≥ n` for `n ≤ k_max`.
pub fn validate_modulus(
    m: &Modulus,
    seq: &RealSequence,
    cfg: &ValidationConfig,
) -> ValidationReport {
    let mut report = ValidationReport {
        subject: format!("{} [{}] vs {}", m.description, m.kind, seq.description),
        ..Default::default()
    };
    for k in 0..=cfg.k_max {
        let start = match m.eval_u64(k) {
            Ok(v) => match v.to_u64().filter(|&s| s <= cfg.eval_ceiling) {
                Some(s) => s,
                None => {
                    report.unverifiable.push(Unverifiable {
                        k,
                        reason: format!("modulus value {v} exceeds evaluation ceiling"),
                    });
                    continue;
                }
            },
            Err(e) => {
                report.record_eval_error(k, e);
                continue;
            }
        };
        let budget = 1.0 / (k as f64 + 1.0);
        match m.kind {
            ModulusKind::ConvergenceRate => {
                for n in start..=start + cfg.tail {
                    report.checks += 1;
                    let lhs = seq.eval(n);
                    if !leq_with_tol(lhs, budget, cfg.tolerance) {
                        report.violations.push(Violation {
                            k,
                            n,
                            lhs,
                            rhs: budget,
                        });
                    }
                }
            }
            ModulusKind::CauchyModulus => {
                // terms are nonnegative, so the worst tail sum from n within
                // the window ends at the window edge
                let end = start + 2 * cfg.tail;
                let mut suffix = vec![0.0f64; (end - start + 2) as usize];
                for i in (start + 1..=end).rev() {
                    let idx = (i - start) as usize;
                    suffix[idx] = suffix[idx + 1] + seq.eval(i);
                }
                for n in start..=start + cfg.tail {
                    report.checks += 1;
                    let lhs = suffix[(n + 1 - start) as usize];
                    if !leq_with_tol(lhs, budget, cfg.tolerance) {
                        report.violations.push(Violation {
                            k,
                            n,
                            lhs,
                            rhs: budget,
                        });
                    }
                }
            }
            ModulusKind::DivergenceRate => {
                report.checks += 1;
                let sum: f64 = (0..=start).map(|i| seq.eval(i)).sum();
                let target = k as f64;
                if !leq_with_tol(target, sum, cfg.tolerance) {
                    report.violations.push(Violation {
                        k,
                        n: start,
                        lhs: target,
                        rhs: sum,
                    });
                }
            }
        }
    }
    report
}

/// Check the product-modulus hypothesis `A(m,k) ≥ m` and
/// `∏_{i=m}^{A(m,k)} (1−seq(i)) ≤ 1/(k+1)` for `m ≤ m_max`, `k ≤ k_max`.
pub fn validate_product_modulus(
    a: &ProductModulus,
    seq: &RealSequence,
    m_max: u64,
    cfg: &ValidationConfig,
) -> ValidationReport {
    let mut report = ValidationReport {
        subject: format!("{} [product modulus] vs {}", a.description, seq.description),
        ..Default::default()
    };
    for m in 0..=m_max {
        for k in 0..=cfg.k_max {
            let end = match a.eval_u64(m, k) {
                Ok(v) => match v.to_u64().filter(|&s| s <= cfg.eval_ceiling) {
                    Some(s) => s,
                    None => {
                        report.unverifiable.push(Unverifiable {
                            k,
                            reason: format!(
                                "A({m},{k}) = {v} exceeds evaluation ceiling"
                            ),
                        });
                        continue;
                    }
                },
                Err(e) => {
                    report.record_eval_error(k, e);
                    continue;
                }
            };
            report.checks += 1;
            if end < m {
                report.violations.push(Violation {
                    k,
                    n: m,
                    lhs: m as f64,
                    rhs: end as f64,
                });
                continue;
            }
            let mut prod = 1.0f64;
            for i in m..=end {
                prod *= 1.0 - seq.eval(i);
            }
            let budget = 1.0 / (k as f64 + 1.0);
            if !leq_with_tol(prod, budget, cfg.tolerance) {
                report.violations.push(Violation {
                    k,
                    n: m,
                    lhs: prod,
                    rhs: budget,
                });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigmath::nat;
    use crate::moduli::{inverse_square_moduli, Modulus};
    use crate::bigmath::Nat;

    fn small_cfg() -> ValidationConfig {
        ValidationConfig {
            k_max: 20,
            tail: 500,
            ..Default::default()
        }
    }

    #[test]
    fn zero_sequence_passes_anything() {
        let zero = RealSequence::new("0", |_| 0.0);
        let m = Modulus::zero(ModulusKind::CauchyModulus);
        let r = validate_modulus(&m, &zero, &small_cfg());
        assert!(r.passed());
        let m = Modulus::zero(ModulusKind::ConvergenceRate);
        assert!(validate_modulus(&m, &zero, &small_cfg()).passed());
    }

    #[test]
    fn correct_cauchy_modulus_passes() {
        let m = inverse_square_moduli(1.0, 1).unwrap();
        let seq = RealSequence::new("1/(n+1)^2", |n| 1.0 / ((n + 1) as f64).powi(2));
        assert!(validate_modulus(&m.phi, &seq, &small_cfg()).passed());
        assert!(validate_modulus(&m.phi_star, &seq, &small_cfg()).passed());
        assert!(validate_modulus(&m.psi, &seq, &small_cfg()).passed());
        assert!(validate_modulus(&m.psi_star, &seq, &small_cfg()).passed());
    }

    #[test]
    fn wrong_modulus_is_flagged() {
        // σ(k) = 0 cannot be a Cauchy modulus of Σ|δₙ−δ_{n+1}| for Example 1
        // parameters (J = 2): the tail from 0 is δ₁ ≈ 1/3 > 1/(k+1) for k ≥ 3.
        let bad = Modulus::zero(ModulusKind::CauchyModulus);
        let seq = RealSequence::new("|δn−δn+1|, J=2", |n| {
            let d = |i: u64| 1.0 / ((i + 2) as f64);
            (d(n) - d(n + 1)).abs()
        });
        let r = validate_modulus(&bad, &seq, &small_cfg());
        assert!(!r.passed());
        assert!(r.violations.iter().any(|v| v.k >= 1));
    }

    #[test]
    fn divergence_rate_checked_by_direct_summation() {
        // Σ 1/(n+2) diverges with rate σ₁(n)=⌈2eⁿ⌉−2
        let sigma = Modulus::new(ModulusKind::DivergenceRate, "⌈2eⁿ⌉−2", |n: &Nat| {
            use num::ToPrimitive;
            let n = n.to_u64().unwrap();
            Ok(crate::bigmath::trunc_sub(
                &crate::bigmath::ceil_scaled_exp(&crate::bigmath::rat_u64(2), n)?,
                &nat(2),
            ))
        });
        let seq = RealSequence::new("1/(n+2)", |n| 1.0 / ((n + 2) as f64));
        let cfg = ValidationConfig {
            k_max: 10,
            ..Default::default()
        };
        let r = validate_modulus(&sigma, &seq, &cfg);
        assert!(r.passed(), "{:?}", r.violations);
        assert!(r.unverifiable.is_empty());
    }

    #[test]
    fn product_modulus_validates() {
        // aₙ = 1/(n+2): ∏_{i=m}^{A}(1−aᵢ) telescopes to (m+1)/(A+2), so
        // A(m,k) = (m+2)(k+1)−2 works.
        let a = ProductModulus::total("(m+2)(k+1)−2", |m: &Nat, k: &Nat| {
            (m + 2u32) * (k + 1u32) - 2u32
        });
        let seq = RealSequence::new("1/(n+2)", |n| 1.0 / ((n + 2) as f64));
        let cfg = ValidationConfig {
            k_max: 15,
            ..Default::default()
        };
        let r = validate_product_modulus(&a, &seq, 40, &cfg);
        assert!(r.passed(), "{:?}", r.violations);
    }

    #[test]
    fn oversized_modulus_reports_unverifiable() {
        let huge = Modulus::total(ModulusKind::ConvergenceRate, "huge", |_: &Nat| {
            nat(u64::MAX) * nat(2)
        });
        let seq = RealSequence::new("0", |_| 0.0);
        let r = validate_modulus(&huge, &seq, &small_cfg());
        assert!(r.passed());
        assert_eq!(r.unverifiable.len(), 21);
    }
}
