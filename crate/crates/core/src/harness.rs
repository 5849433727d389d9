//! End-to-end empirical verification: run the iteration, replay every
//! certified bound against the computed trace, validate every bundle modulus
//! against the concrete sequence it governs, and classify any failure.
//!
//! Three independent check classes:
//!
//! * **modulus validity** — each bundle modulus versus its own series;
//! * **trace inequalities** — the pointwise bounds `‖xₙ−p‖ ≤ K_pⁿ`,
//!   `‖xₙ‖, ‖Txₙ‖, ‖f(xₙ)‖ ≤ K_p`, the one-step recursion
//!   `‖x_{n+2}−x_{n+1}‖ ≤ (1−(1−ρ)δ_{n+1})‖x_{n+1}−xₙ‖ + K_p dₙ +
//!   ‖r_{n+1}−rₙ‖`, and `‖Txₙ−xₙ‖ ≤ ‖x_{n+1}−xₙ‖ + 2K_p(1−βₙ) + ‖rₙ‖`;
//! * **certificates** — each rate checked at `n = rate(k)` and at 32 seeded
//!   sample points beyond it, plus consistency of any externally claimed
//!   `K_p` against the recomputed value.
//!
//! A rate too large to reach within the trace is *unverifiable*, not failed:
//! exponential rates are sound but astronomically large, and the report says
//! so honestly.

use crate::bigmath::leq_with_tol;
use crate::certificates::{CertificateTarget, RateCertificate, Route};
use crate::iteration::{kp, run, IterationTrace, ParameterSchedule, ProblemInstance};
use crate::moduli::RealSequence;
use crate::space::Point;
use crate::validate::{validate_modulus, ValidationConfig, ValidationReport, Violation};
use num::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::fmt;
use std::time::Duration;

/// Sample count beyond the boundary index `rate(k)`.
pub const SAMPLES_PER_K: usize = 32;

/// Which family of checks flagged a problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckClass {
    ModulusValidity,
    TraceInequality,
    Certificate,
}

impl fmt::Display for CheckClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckClass::ModulusValidity => write!(f, "modulus-validity"),
            CheckClass::TraceInequality => write!(f, "trace-inequality"),
            CheckClass::Certificate => write!(f, "certificate"),
        }
    }
}

/// Outcome for a single `k` of a certificate check.
#[derive(Debug, Clone, PartialEq)]
pub enum KStatus {
    Verified,
    Violated { n: u64, lhs: f64, rhs: f64 },
    Unverifiable { reason: String },
}

#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub description: String,
    pub target: CertificateTarget,
    pub route: Route,
    pub statuses: Vec<(u64, KStatus)>,
}

impl CertificateReport {
    pub fn verified(&self) -> u64 {
        self.count(|s| matches!(s, KStatus::Verified))
    }

    pub fn violated(&self) -> u64 {
        self.count(|s| matches!(s, KStatus::Violated { .. }))
    }

    pub fn unverifiable(&self) -> u64 {
        self.count(|s| matches!(s, KStatus::Unverifiable { .. }))
    }

    fn count(&self, pred: impl Fn(&KStatus) -> bool) -> u64 {
        self.statuses.iter().filter(|(_, s)| pred(s)).count() as u64
    }
}

/// One named experiment: instance, schedule, certificates to replay, and
/// optional fault-injection knobs.
#[derive(Clone)]
pub struct Scenario {
    pub name: String,
    pub instance: ProblemInstance,
    pub schedule: ParameterSchedule,
    pub trace_length: u64,
    pub k_max: u64,
    pub tolerance: f64,
    pub seed: u64,
    pub certificates: Vec<RateCertificate>,
    /// Externally claimed `K_p`, cross-checked against the recomputed value.
    pub claimed_kp: Option<u64>,
    /// Overwrite point `n` after the run (fault-injection support).
    pub tamper: Option<(usize, Point)>,
    /// Largest `k` for the divergence-rate check of `σ₁` (direct summation).
    pub sigma1_k_max: u64,
}

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scenario {}", self.name)
    }
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub scenario: String,
    pub certificate_reports: Vec<CertificateReport>,
    /// `(inequality name, violation)` pairs from the trace checks.
    pub trace_violations: Vec<(String, Violation)>,
    pub trace_checks: u64,
    pub modulus_reports: Vec<ValidationReport>,
    /// `(claimed, recomputed)` when they disagree.
    pub kp_mismatch: Option<(u64, u64)>,
    pub error: Option<String>,
    pub wall_clock: Duration,
}

impl VerificationReport {
    pub fn failed_classes(&self) -> BTreeSet<CheckClass> {
        let mut out = BTreeSet::new();
        if self.modulus_reports.iter().any(|r| !r.passed()) {
            out.insert(CheckClass::ModulusValidity);
        }
        if !self.trace_violations.is_empty() {
            out.insert(CheckClass::TraceInequality);
        }
        if self.kp_mismatch.is_some()
            || self.certificate_reports.iter().any(|r| r.violated() > 0)
        {
            out.insert(CheckClass::Certificate);
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.failed_classes().is_empty() && self.error.is_none()
    }

    /// Deterministic machine-readable rows (`|`-separated); the wall clock
    /// is deliberately excluded so reruns are byte-identical.
    pub fn rows(&self) -> Vec<String> {
        let mut rows = Vec::new();
        if let Some(e) = &self.error {
            rows.push(format!("{}|error|{}", self.scenario, e));
            return rows;
        }
        for r in &self.certificate_reports {
            rows.push(format!(
                "{}|certificate|{}|{}|verified={} violated={} unverifiable={}",
                self.scenario,
                r.target,
                r.description,
                r.verified(),
                r.violated(),
                r.unverifiable()
            ));
        }
        rows.push(format!(
            "{}|trace-inequality|checks={}|violations={}",
            self.scenario,
            self.trace_checks,
            self.trace_violations.len()
        ));
        for r in &self.modulus_reports {
            rows.push(format!(
                "{}|modulus-validity|{}|violations={} unverifiable={}",
                self.scenario,
                r.subject,
                r.violations.len(),
                r.unverifiable.len()
            ));
        }
        if let Some((claimed, actual)) = self.kp_mismatch {
            rows.push(format!(
                "{}|certificate|Kp-consistency|claimed={claimed} recomputed={actual}",
                self.scenario
            ));
        }
        rows.push(format!(
            "{}|result|{}",
            self.scenario,
            if self.passed() { "pass" } else { "FAIL" }
        ));
        rows
    }
}

fn residual_at(trace: &IterationTrace, target: CertificateTarget, n: u64) -> f64 {
    match target {
        CertificateTarget::StepResidual => trace.step_residuals[n as usize],
        CertificateTarget::FixResidual => trace.fix_residuals[n as usize],
    }
}

fn max_index(trace: &IterationTrace, target: CertificateTarget) -> u64 {
    match target {
        CertificateTarget::StepResidual => trace.step_residuals.len() as u64 - 1,
        CertificateTarget::FixResidual => trace.fix_residuals.len() as u64 - 1,
    }
}

/// Replay one certificate against a trace: for each `k ≤ k_max` the target
/// residual must be `≤ 1/(k+1)` at `n = rate(k)` and at [`SAMPLES_PER_K`]
/// seeded sample points in `(rate(k), trace end]`.
pub fn verify_certificate(
    trace: &IterationTrace,
    cert: &RateCertificate,
    k_max: u64,
    tolerance: f64,
    seed: u64,
) -> CertificateReport {
    let mut statuses = Vec::with_capacity(k_max as usize + 1);
    let last = max_index(trace, cert.target);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..=k_max {
        let start = match cert.rate.eval_u64(k) {
            Ok(v) => match v.to_u64().filter(|&s| s <= last) {
                Some(s) => s,
                None => {
                    statuses.push((
                        k,
                        KStatus::Unverifiable {
                            reason: format!(
                                "rate(k) = {v} exceeds trace length {last}; unverifiable at this scale"
                            ),
                        },
                    ));
                    continue;
                }
            },
            Err(e) => {
                statuses.push((
                    k,
                    KStatus::Unverifiable {
                        reason: e.to_string(),
                    },
                ));
                continue;
            }
        };
        let budget = 1.0 / (k as f64 + 1.0);
        let mut status = KStatus::Verified;
        let check = |n: u64, status: &mut KStatus| {
            if !matches!(status, KStatus::Verified) {
                return;
            }
            let lhs = residual_at(trace, cert.target, n);
            if !leq_with_tol(lhs, budget, tolerance) {
                *status = KStatus::Violated {
                    n,
                    lhs,
                    rhs: budget,
                };
            }
        };
        check(start, &mut status);
        for _ in 0..SAMPLES_PER_K {
            if start >= last {
                break;
            }
            let n = rng.gen_range(start + 1..=last);
            check(n, &mut status);
        }
        statuses.push((k, status));
    }
    CertificateReport {
        description: cert.rate.description.clone(),
        target: cert.target,
        route: cert.route,
        statuses,
    }
}

/// Check the pointwise trace bounds. Residuals are recomputed from the raw
/// stored points (not the cached residual arrays), so a corrupted point is
/// caught here.
pub fn verify_trace_inequalities(
    trace: &IterationTrace,
    inst: &ProblemInstance,
    sched: &ParameterSchedule,
    kp: u64,
    tolerance: f64,
) -> (u64, Vec<(String, Violation)>) {
    let mut violations = Vec::new();
    let mut checks = 0u64;
    let space = &inst.space;
    let rho = inst.rho();
    let kpf = kp as f64;
    let len = trace.len() as u64;
    fn record(out: &mut Vec<(String, Violation)>, name: &str, n: u64, lhs: f64, rhs: f64) {
        out.push((name.to_string(), Violation { k: 0, n, lhs, rhs }));
    }
    let mut prev_step = f64::NAN;
    let mut prev_r_norm = f64::NAN;
    for n in 0..len {
        let x = trace.point(n as usize);
        let tx = inst.t_op.apply(x);
        let fx = inst.f_op.apply(x);
        let kp_n = trace.kp_path[n as usize];
        let r = (sched.residual)(n);
        let r_norm = space.norm(&r);

        // iterate bounds against K_pⁿ and K_p
        checks += 7;
        let dist_p = space.dist(x, &inst.p);
        if !leq_with_tol(dist_p, kp_n, tolerance) {
            record(&mut violations, "‖xn−p‖ ≤ Kpⁿ", n, dist_p, kp_n);
        }
        let fdist_p = space.dist(&fx, &inst.p);
        if !leq_with_tol(fdist_p, kp_n, tolerance) {
            record(&mut violations, "‖f(xn)−p‖ ≤ Kpⁿ", n, fdist_p, kp_n);
        }
        for (name, v) in [
            ("‖xn‖ ≤ Kp", space.norm(x)),
            ("‖Txn‖ ≤ Kp", space.norm(&tx)),
            ("‖f(xn)‖ ≤ Kp", space.norm(&fx)),
        ] {
            if !leq_with_tol(v, kpf, tolerance) {
                record(&mut violations, name, n, v, kpf);
            }
        }
        let fix_res = space.dist(&tx, x);
        let xf_dist = space.dist(x, &fx);
        if !leq_with_tol(xf_dist, 2.0 * kpf, tolerance) {
            record(&mut violations, "‖xn−f(xn)‖ ≤ 2Kp", n, xf_dist, 2.0 * kpf);
        }

        let step_res = if n + 1 < len {
            let next = trace.point(n as usize + 1);
            let d = space.dist(next, x);
            checks += 1;
            if !leq_with_tol(d, 2.0 * kpf, tolerance) {
                record(&mut violations, "‖xn+1−xn‖ ≤ 2Kp", n, d, 2.0 * kpf);
            }
            d
        } else {
            f64::NAN
        };

        // one-step recursion on consecutive step residuals
        if n >= 1 && n + 1 < len {
            checks += 1;
            let m = n - 1;
            let d_m = ((sched.alpha)(m + 1) - (sched.alpha)(m)).abs()
                + ((sched.beta)(m + 1) - (sched.beta)(m)).abs()
                + ((sched.delta)(m + 1) - (sched.delta)(m)).abs();
            let r_diff = {
                let rm = (sched.residual)(m);
                let diff: Vec<f64> = rm.iter().zip(r.iter()).map(|(a, b)| a - b).collect();
                space.norm(&diff)
            };
            let rhs =
                (1.0 - (1.0 - rho) * (sched.delta)(m + 1)) * prev_step + kpf * d_m + r_diff;
            if !leq_with_tol(step_res, rhs, tolerance) {
                record(&mut violations, "step recursion", m, step_res, rhs);
            }
        }
        let _ = prev_r_norm;
        prev_step = step_res;
        prev_r_norm = r_norm;

        // fixed-point residual bound via the step residual
        if n + 1 < len {
            checks += 1;
            let rhs = step_res + 2.0 * kpf * (1.0 - (sched.beta)(n)) + r_norm;
            if !leq_with_tol(fix_res, rhs, tolerance) {
                record(&mut violations, "‖Txn−xn‖ ≤ ‖xn+1−xn‖+2Kp(1−βn)+‖rn‖", n, fix_res, rhs);
            }
        }
        if violations.len() > 64 {
            break; // enough evidence; keep reports bounded
        }
    }
    (checks, violations)
}

/// Validate every bundle modulus of a schedule against the concrete
/// sequences the schedule actually produces.
pub fn verify_bundle_moduli(
    inst: &ProblemInstance,
    sched: &ParameterSchedule,
    k_max: u64,
    sigma1_k_max: u64,
    tolerance: f64,
) -> Vec<ValidationReport> {
    let cfg = ValidationConfig {
        k_max: k_max.min(50),
        tail: 2_000,
        tolerance,
        ..Default::default()
    };
    let b = &sched.bundle;
    let mut reports = Vec::new();
    let seq_abs_diff = |f: std::sync::Arc<dyn Fn(u64) -> f64 + Send + Sync>, name: &str| {
        RealSequence::new(name, move |n| (f(n) - f(n + 1)).abs())
    };
    reports.push(validate_modulus(
        &b.sigma2,
        &seq_abs_diff(sched.delta.clone(), "|δn−δn+1|"),
        &cfg,
    ));
    reports.push(validate_modulus(
        &b.theta1,
        &seq_abs_diff(sched.alpha.clone(), "|αn−αn+1|"),
        &cfg,
    ));
    reports.push(validate_modulus(
        &b.gamma1,
        &seq_abs_diff(sched.beta.clone(), "|βn−βn+1|"),
        &cfg,
    ));
    if let Some(gamma2) = &b.gamma2 {
        let beta = sched.beta.clone();
        reports.push(validate_modulus(
            gamma2,
            &RealSequence::new("1−βn", move |n| 1.0 - beta(n)),
            &cfg,
        ));
    }
    let space = inst.space;
    let residual = sched.residual.clone();
    let r_norm = RealSequence::new("‖rn‖", move |n| space.norm(&residual(n)));
    let space = inst.space;
    let residual = sched.residual.clone();
    let r_diff = RealSequence::new("‖rn−rn+1‖", move |n| {
        let a = residual(n);
        let b = residual(n + 1);
        let diff: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| x - y).collect();
        space.norm(&diff)
    });
    reports.push(validate_modulus(&b.lambda1, &r_diff, &cfg));
    reports.push(validate_modulus(&b.lambda2, &r_norm, &cfg));
    if let Some(sigma1) = &b.sigma1 {
        let delta = sched.delta.clone();
        let cfg1 = ValidationConfig {
            k_max: sigma1_k_max,
            ..cfg
        };
        reports.push(validate_modulus(
            sigma1,
            &RealSequence::new("δn", move |n| delta(n)),
            &cfg1,
        ));
    }
    reports
}

/// Run one scenario end to end.
pub fn run_scenario(s: &Scenario) -> VerificationReport {
    let started = std::time::Instant::now();
    debug_assert!(s.trace_length >= 2 && s.tolerance > 0.0);
    let mut report = VerificationReport {
        scenario: s.name.clone(),
        certificate_reports: Vec::new(),
        trace_violations: Vec::new(),
        trace_checks: 0,
        modulus_reports: Vec::new(),
        kp_mismatch: None,
        error: None,
        wall_clock: Duration::ZERO,
    };
    let trace = match run(&s.instance, &s.schedule, s.trace_length) {
        Ok(mut t) => {
            if let Some((n, point)) = &s.tamper {
                t.tamper_point(*n, point);
            }
            t
        }
        Err(e) => {
            report.error = Some(e.to_string());
            report.wall_clock = started.elapsed();
            return report;
        }
    };
    let actual_kp = kp(&s.instance, &s.schedule.bundle);
    if let Some(claimed) = s.claimed_kp {
        if claimed != actual_kp {
            report.kp_mismatch = Some((claimed, actual_kp));
        }
    }
    for cert in &s.certificates {
        report.certificate_reports.push(verify_certificate(
            &trace,
            cert,
            s.k_max,
            s.tolerance,
            s.seed,
        ));
        // claimed K_p embedded in a certificate must match the recomputed one
        if cert.kp != actual_kp && report.kp_mismatch.is_none() {
            report.kp_mismatch = Some((cert.kp, actual_kp));
        }
    }
    let (checks, violations) =
        verify_trace_inequalities(&trace, &s.instance, &s.schedule, actual_kp, s.tolerance);
    report.trace_checks = checks;
    report.trace_violations = violations;
    report.modulus_reports = verify_bundle_moduli(
        &s.instance,
        &s.schedule,
        s.k_max.max(20),
        s.sigma1_k_max,
        s.tolerance,
    );
    report.wall_clock = started.elapsed();
    report
}

/// Run all scenarios; the suite passes only if every report passes.
pub fn run_suite(scenarios: &[Scenario]) -> Vec<VerificationReport> {
    scenarios.iter().map(run_scenario).collect()
}

pub fn suite_passed(reports: &[VerificationReport]) -> bool {
    reports.iter().all(|r| r.passed())
}
