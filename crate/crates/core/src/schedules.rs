//! The three worked parameter families, each shipping with its certified
//! moduli bundle and closed-form rates.
//!
//! * Family 1: `αₙ = λ/(n+J)`, `βₙ = 1−(λ+1)/(n+J)`, `δₙ = 1/(n+J)`,
//!   `rₙ = r*/(n+P)²` — convex weights, exponential divergence-route rates
//!   and quadratic product-route rates.
//! * Family 2: `αₙ = 1/(n+J)`, `βₙ = 1−2/(n+J)−1/(n+J)²` — weights sum to
//!   `1−1/(n+J)²`, same `δₙ` and `rₙ`.
//! * Family 3: `αₙ = 1/(n+J)`, `βₙ = 1−(3−ρ)/((1−ρ)(n+J))`,
//!   `δₙ = 2/((1−ρ)(n+J))` with `P ≥ J > (3−ρ)/(1−ρ)` — linear rates
//!   `Φ(k) = ⌈JL(k+1)/(1−ρ)⌉`, `Ψ(k) = ⌈(2+J)L(k+1)/(1−ρ)⌉` via the
//!   Sabach–Shtern recurrence lemma, where `L` is any integer with
//!   `L ≥ max{‖x₁−x₀‖, K_p(3−ρ) + ((1−ρ)‖r*‖/2)(2P+1)/(P(P+1))}`.

use crate::bigmath::{
    ceil_ln_nat, ceil_mul, ceil_scaled_exp, ceil_scaled_rpow, ceil_sqrt_rat, nat, rat_from_f64,
    rat_nat, rat_u64, trunc_sub, BudgetExceeded, Exponent, Nat,
};
use crate::certificates::{CertificateTarget, RateCertificate, Route};
use crate::iteration::{kp0, step, IterationError, ModuliBundle, ParameterSchedule, ProblemInstance};
use crate::moduli::{
    ceil_div_one_minus_rho, Modulus, ModulusError, ModulusKind, ProductModulus, RealSequence,
};
use crate::space::{NormedSpace, OperatorKind, Point};
use crate::validate::Violation;
use num::ToPrimitive;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScheduleError {
    #[error("J must be positive")]
    JZero,
    #[error("P must be positive")]
    PZero,
    #[error("λ = {lambda} outside [0, J−1] for J = {j}")]
    LambdaOutOfRange { lambda: f64, j: u64 },
    #[error("J = {j} must be at least 3")]
    JTooSmall { j: u64 },
    #[error("J = {j} must exceed (3−ρ)/(1−ρ) = {threshold}")]
    JNotAboveThreshold { j: u64, threshold: f64 },
    #[error("P = {p} must be at least J = {j}")]
    PBelowJ { p: u64, j: u64 },
    #[error("L = {l} is below the least admissible value {minimal}")]
    LTooSmall { l: u64, minimal: u64 },
    #[error("r* has dimension {got}, expected {expected}")]
    RStarDimension { expected: usize, got: usize },
    #[error("closed-form rates require ρ = 0, a vanishing error term, and a constant contraction")]
    CorollaryHypothesesUnmet,
    #[error(transparent)]
    Iteration(#[from] IterationError),
}

/// `λ/(n+J)` weights with convex sum; `λ ∈ [0, J−1]`.
#[derive(Debug, Clone)]
pub struct Example1Params {
    pub j: u64,
    pub p: u64,
    pub lambda: f64,
    pub r_star: Point,
}

/// `αₙ = 1/(n+J)`, slack `1/(n+J)²`; requires `J ≥ 3`.
#[derive(Debug, Clone)]
pub struct Example2Params {
    pub j: u64,
    pub p: u64,
    pub r_star: Point,
}

/// Linear-rate family; `L = None` selects the least admissible integer.
#[derive(Debug, Clone)]
pub struct Example3Params {
    pub j: u64,
    pub p: u64,
    pub r_star: Point,
    pub l: Option<u64>,
}

fn check_r_star(space: &NormedSpace, r_star: &[f64]) -> Result<(), ScheduleError> {
    if r_star.len() != space.dimension {
        return Err(ScheduleError::RStarDimension {
            expected: space.dimension,
            got: r_star.len(),
        });
    }
    Ok(())
}

/// `σ₁(n) = ⌈J·eⁿ⌉ − J`, a rate of divergence of `Σ 1/(n+J)`.
fn delta_divergence(j: u64) -> Modulus {
    Modulus::new(
        ModulusKind::DivergenceRate,
        format!("⌈{j}eⁿ⌉−{j}"),
        move |n: &Nat| {
            let n = n.to_u64().ok_or_else(|| {
                ModulusError::Budget(BudgetExceeded(format!("exp argument {n} too large")))
            })?;
            Ok(trunc_sub(&ceil_scaled_exp(&rat_u64(j), n)?, &nat(j)))
        },
    )
}

/// `σ₁*(m,k) = ⌈(m+J+1)(k+1)^{1/(1−ρ)}⌉ − J − 1`, a product modulus for
/// `∏ (1 − (1−ρ)/(i+J+1))`.
fn delta_product(j: u64, rho: f64) -> ProductModulus {
    let exp = Exponent::from_rho(rho);
    ProductModulus::total(
        format!("⌈(m+{j}+1)(k+1)^(1/(1−{rho}))⌉−{j}−1"),
        move |m: &Nat, k: &Nat| {
            let scale = rat_nat(&(m + nat(j + 1)));
            let v = ceil_scaled_rpow(&scale, &(k + 1u32), &exp);
            trunc_sub(&v, &nat(j + 1))
        },
    )
}

/// `λ₁(k) = ⌈√(‖r*‖(k+1))⌉` and `λ₂(k) = ⌈‖r*‖(k+1)⌉` for the inverse-square
/// error term `rₙ = r*/(n+P)²`, plus `M_r = 2⌈‖r*‖⌉`.
fn residual_moduli(r_norm: f64) -> (Modulus, Modulus, u64) {
    let rr = rat_from_f64(r_norm).expect("finite ‖r*‖");
    let rr2 = rr.clone();
    let lambda1 = Modulus::total(
        ModulusKind::CauchyModulus,
        format!("⌈√({r_norm}(k+1))⌉"),
        move |k: &Nat| ceil_sqrt_rat(&(&rr * rat_nat(&(k + 1u32)))),
    );
    let lambda2 = Modulus::total(
        ModulusKind::CauchyModulus,
        format!("⌈{r_norm}(k+1)⌉"),
        move |k: &Nat| ceil_mul(&rr2, &(k + 1u32)),
    );
    let m_r = if r_norm == 0.0 {
        0
    } else {
        2 * (r_norm.ceil() as u64)
    };
    (lambda1, lambda2, m_r)
}

fn inverse_square_residual(r_star: Point, p: u64) -> Arc<dyn Fn(u64) -> Point + Send + Sync> {
    Arc::new(move |n| {
        let s = 1.0 / (((n + p) as f64) * ((n + p) as f64));
        r_star.iter().map(|v| v * s).collect()
    })
}

/// Family-1 schedule. The space fixes `‖r*‖`; `ρ` enters only through the
/// product modulus `σ₁*`.
pub fn example1_schedule(
    params: &Example1Params,
    space: &NormedSpace,
    rho: f64,
) -> Result<ParameterSchedule, ScheduleError> {
    let Example1Params { j, p, lambda, r_star } = params.clone();
    if j == 0 {
        return Err(ScheduleError::JZero);
    }
    if p == 0 {
        return Err(ScheduleError::PZero);
    }
    if !(0.0..=(j - 1) as f64).contains(&lambda) {
        return Err(ScheduleError::LambdaOutOfRange { lambda, j });
    }
    check_r_star(space, &r_star)?;
    let r_norm = space.norm(&r_star);
    let (lambda1, lambda2, m_r) = residual_moduli(r_norm);
    let lr = rat_from_f64(lambda).expect("finite λ");
    let lr1 = rat_from_f64(lambda + 1.0).expect("finite λ+1");
    let bundle = ModuliBundle {
        m_abd: 0,
        sigma1: Some(delta_divergence(j)),
        sigma1_star: Some(delta_product(j, rho)),
        sigma2: Modulus::total(ModulusKind::CauchyModulus, "k+1", |k: &Nat| k + 1u32),
        sigma3: None,
        theta1: Modulus::total(
            ModulusKind::CauchyModulus,
            format!("⌈{lambda}(k+1)⌉"),
            move |k: &Nat| ceil_mul(&lr, &(k + 1u32)),
        ),
        gamma1: Modulus::total(
            ModulusKind::CauchyModulus,
            format!("⌈({lambda}+1)(k+1)⌉"),
            move |k: &Nat| ceil_mul(&lr1, &(k + 1u32)),
        ),
        gamma2: Some(Modulus::total(
            ModulusKind::ConvergenceRate,
            format!("⌈({lambda}+1)(k+1)⌉"),
            {
                let lr1 = rat_from_f64(lambda + 1.0).expect("finite λ+1");
                move |k: &Nat| ceil_mul(&lr1, &(k + 1u32))
            },
        )),
        lambda1,
        lambda2,
        m_r,
    };
    Ok(ParameterSchedule {
        description: format!("α=λ/(n+J), λ={lambda}, J={j}, P={p}, ‖r*‖={r_norm}"),
        alpha: Arc::new(move |n| lambda / ((n + j) as f64)),
        beta: Arc::new(move |n| 1.0 - (lambda + 1.0) / ((n + j) as f64)),
        delta: Arc::new(move |n| 1.0 / ((n + j) as f64)),
        residual: inverse_square_residual(r_star, p),
        bundle,
    })
}

/// Family-2 schedule (`J ≥ 3`, slack `1/(n+J)²`).
pub fn example2_schedule(
    params: &Example2Params,
    space: &NormedSpace,
    rho: f64,
) -> Result<ParameterSchedule, ScheduleError> {
    let Example2Params { j, p, r_star } = params.clone();
    if j < 3 {
        return Err(ScheduleError::JTooSmall { j });
    }
    if p == 0 {
        return Err(ScheduleError::PZero);
    }
    check_r_star(space, &r_star)?;
    let r_norm = space.norm(&r_star);
    let (lambda1, lambda2, m_r) = residual_moduli(r_norm);
    let bundle = ModuliBundle {
        m_abd: 2,
        sigma1: Some(delta_divergence(j)),
        sigma1_star: Some(delta_product(j, rho)),
        sigma2: Modulus::total(ModulusKind::CauchyModulus, "k+1", |k: &Nat| k + 1u32),
        sigma3: None,
        theta1: Modulus::total(ModulusKind::CauchyModulus, "k+1", |k: &Nat| k + 1u32),
        gamma1: Modulus::total(ModulusKind::CauchyModulus, "3(k+1)", |k: &Nat| {
            (k + 1u32) * 3u32
        }),
        gamma2: Some(Modulus::total(
            ModulusKind::ConvergenceRate,
            "3(k+1)",
            |k: &Nat| (k + 1u32) * 3u32,
        )),
        lambda1,
        lambda2,
        m_r,
    };
    Ok(ParameterSchedule {
        description: format!("α=1/(n+J), β=1−2/(n+J)−1/(n+J)², J={j}, P={p}, ‖r*‖={r_norm}"),
        alpha: Arc::new(move |n| 1.0 / ((n + j) as f64)),
        beta: Arc::new(move |n| {
            let d = (n + j) as f64;
            1.0 - 2.0 / d - 1.0 / (d * d)
        }),
        delta: Arc::new(move |n| 1.0 / ((n + j) as f64)),
        residual: inverse_square_residual(r_star, p),
        bundle,
    })
}

/// Which closed-form family a rate set belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleFamily {
    Ex1,
    Ex2,
}

/// The closed-form rate set of families 1 and 2: exponential
/// divergence-route rates `Φ`, `Ψ`, quadratic product-route rates `Φ*`,
/// `Ψ*`, and — when `ρ = 0`, `r* = 0`, and the contraction is constant —
/// the simplified quadratic rates `Φ̃`, `Ψ̃`.
#[derive(Debug, Clone)]
pub struct ExampleRates {
    pub family: ExampleFamily,
    pub kp: u64,
    pub phi: RateCertificate,
    pub psi: RateCertificate,
    pub phi_star: RateCertificate,
    pub psi_star: RateCertificate,
    pub phi_tilde: Option<RateCertificate>,
    pub psi_tilde: Option<RateCertificate>,
}

impl ExampleRates {
    pub fn all(&self) -> Vec<&RateCertificate> {
        let mut v = vec![&self.phi, &self.psi, &self.phi_star, &self.psi_star];
        if let Some(c) = &self.phi_tilde {
            v.push(c);
        }
        if let Some(c) = &self.psi_tilde {
            v.push(c);
        }
        v
    }
}

fn max_with_residual_tail(
    base: &Modulus,
    r_norm: f64,
    desc: String,
) -> Modulus {
    // Ψ(k) = max{Φ(3k+2), ⌈3‖r*‖(k+1)⌉+1}; the residual term drops at r*=0
    let base = base.clone();
    let r3 = rat_from_f64(3.0 * r_norm).expect("finite ‖r*‖");
    Modulus::new(ModulusKind::ConvergenceRate, desc, move |k| {
        let phi_at = base.eval(&(k * 3u32 + 2u32))?;
        if r3 == rat_u64(0) {
            return Ok(phi_at);
        }
        Ok(phi_at.max(ceil_mul(&r3, &(k + 1u32)) + 1u32))
    })
}

/// Closed-form rates for families 1 and 2. `K_p` is recomputed from the
/// instance (`⌈2K_p⁰⌉` for family 1, `⌈4K_p⁰⌉` for family 2, plus
/// `2⌈‖r*‖⌉+1`); a caller-supplied `K_p` is deliberately not accepted.
pub fn example_rates(
    family: ExampleFamily,
    j: u64,
    lambda: f64,
    r_norm: f64,
    inst: &ProblemInstance,
) -> Result<ExampleRates, ScheduleError> {
    let rho = inst.rho();
    let kp0_mult = match family {
        ExampleFamily::Ex1 => 2.0,
        ExampleFamily::Ex2 => 4.0,
    };
    let m_r = if r_norm == 0.0 {
        0
    } else {
        2 * (r_norm.ceil() as u64)
    };
    let kp = (kp0_mult * kp0(inst)).ceil() as u64 + m_r + 1;

    // χ(k): family 1 uses ⌈6λK_p(k+1)⌉ + 6K_p(k+1); family 2 uses 12K_p(k+1);
    // both take the max with ⌈√(2‖r*‖(k+1))⌉
    let chi: Arc<dyn Fn(&Nat) -> Nat + Send + Sync> = {
        let sqrt_term = rat_from_f64(2.0 * r_norm).expect("finite ‖r*‖");
        match family {
            ExampleFamily::Ex1 => {
                let l6 = rat_from_f64(6.0 * lambda).expect("finite λ") * rat_u64(kp);
                Arc::new(move |k: &Nat| {
                    let kp1 = k + 1u32;
                    let main = ceil_mul(&l6, &kp1) + nat(6 * kp) * &kp1;
                    main.max(ceil_sqrt_rat(&(&sqrt_term * rat_nat(&kp1))))
                })
            }
            ExampleFamily::Ex2 => Arc::new(move |k: &Nat| {
                let kp1 = k + 1u32;
                let main = nat(12 * kp) * &kp1;
                main.max(ceil_sqrt_rat(&(&sqrt_term * rat_nat(&kp1))))
            }),
        }
    };

    // Φ(k) = ⌈J·exp(⌈(χ(2k+1)+1+⌈ln(4K_p(k+1))⌉)/(1−ρ)⌉+1)⌉ − J
    let phi_rate = {
        let chi = chi.clone();
        Modulus::new(
            ModulusKind::ConvergenceRate,
            format!("⌈{j}·exp(⌈(χ(2k+1)+1+⌈ln(4·{kp}(k+1))⌉)/(1−{rho})⌉+1)⌉−{j}"),
            move |k| {
                let c = chi(&(k * 2u32 + 1u32));
                let ln = ceil_ln_nat(&(nat(4 * kp) * (k + 1u32)))?;
                let q = ceil_div_one_minus_rho(&(c + 1u32 + nat(ln)), rho) + 1u32;
                let q = q.to_u64().ok_or_else(|| {
                    ModulusError::Budget(BudgetExceeded(format!("exp argument {q} too large")))
                })?;
                Ok(trunc_sub(&ceil_scaled_exp(&rat_u64(j), q)?, &nat(j)))
            },
        )
    };
    // Φ*(k) = ⌈(χ(2k+1)+J+2)(4K_p(k+1))^{1/(1−ρ)}⌉ − J
    let phi_star_rate = {
        let chi = chi.clone();
        let exp = Exponent::from_rho(rho);
        Modulus::total(
            ModulusKind::ConvergenceRate,
            format!("⌈(χ(2k+1)+{j}+2)(4·{kp}(k+1))^(1/(1−{rho}))⌉−{j}"),
            move |k: &Nat| {
                let scale = rat_nat(&(chi(&(k * 2u32 + 1u32)) + nat(j + 2)));
                let x = nat(4 * kp) * (k + 1u32);
                trunc_sub(&ceil_scaled_rpow(&scale, &x, &exp), &nat(j))
            },
        )
    };
    let psi_rate = max_with_residual_tail(
        &phi_rate,
        r_norm,
        format!("max{{Φ(3k+2), ⌈3·{r_norm}(k+1)⌉+1}}"),
    );
    let psi_star_rate = max_with_residual_tail(
        &phi_star_rate,
        r_norm,
        format!("max{{Φ*(3k+2), ⌈3·{r_norm}(k+1)⌉+1}}"),
    );

    // simplified quadratic rates; valid only for ρ = 0, r* = 0, f constant
    let tilde_ok = rho == 0.0
        && r_norm == 0.0
        && matches!(inst.f_op.kind, OperatorKind::Constant { .. });
    let (phi_tilde, psi_tilde) = if tilde_ok {
        let phi_tilde_rate = match family {
            ExampleFamily::Ex1 => {
                let l12 = rat_from_f64(12.0 * lambda).expect("finite λ") * rat_u64(kp);
                Modulus::total(
                    ModulusKind::ConvergenceRate,
                    format!(
                        "4·{kp}⌈12·{lambda}·{kp}(k+1)⌉(k+1)+48·{kp}²(k+1)²+4·{kp}({j}+2)(k+1)−{j}"
                    ),
                    move |k: &Nat| {
                        let kp1 = k + 1u32;
                        let a = nat(4 * kp) * ceil_mul(&l12, &kp1) * &kp1;
                        let b = nat(48 * kp * kp) * &kp1 * &kp1;
                        let c = nat(4 * kp * (j + 2)) * &kp1;
                        trunc_sub(&(a + b + c), &nat(j))
                    },
                )
            }
            ExampleFamily::Ex2 => Modulus::total(
                ModulusKind::ConvergenceRate,
                format!("144·{kp}²(k+1)²+4({j}+2)·{kp}(k+1)−{j}"),
                move |k: &Nat| {
                    let kp1 = k + 1u32;
                    let a = nat(144 * kp * kp) * &kp1 * &kp1;
                    let b = nat(4 * (j + 2) * kp) * &kp1;
                    trunc_sub(&(a + b), &nat(j))
                },
            ),
        };
        let psi_tilde_rate = {
            let inner = phi_tilde_rate.clone();
            Modulus::new(
                ModulusKind::ConvergenceRate,
                "Φ̃(3k+2)".to_string(),
                move |k| inner.eval(&(k * 3u32 + 2u32)),
            )
        };
        let mk = |target, rate| RateCertificate {
            target,
            route: Route::ClosedForm,
            kp,
            rate,
        };
        (
            Some(mk(CertificateTarget::StepResidual, phi_tilde_rate)),
            Some(mk(CertificateTarget::FixResidual, psi_tilde_rate)),
        )
    } else {
        (None, None)
    };

    let mk = |target, route, rate| RateCertificate {
        target,
        route,
        kp,
        rate,
    };
    Ok(ExampleRates {
        family,
        kp,
        phi: mk(CertificateTarget::StepResidual, Route::Divergence, phi_rate),
        psi: mk(CertificateTarget::FixResidual, Route::Divergence, psi_rate),
        phi_star: mk(CertificateTarget::StepResidual, Route::Product, phi_star_rate),
        psi_star: mk(CertificateTarget::FixResidual, Route::Product, psi_star_rate),
        phi_tilde,
        psi_tilde,
    })
}

/// A family-3 schedule together with the data its linear rates need.
#[derive(Debug, Clone)]
pub struct Example3Schedule {
    pub schedule: ParameterSchedule,
    pub j: u64,
    pub p: u64,
    pub rho: f64,
    /// The integer `L` in effect (chosen least admissible if not supplied).
    pub l: u64,
    pub kp: u64,
    pub r_norm: f64,
}

impl Example3Schedule {
    /// Pointwise bound `‖x_{n+1}−xₙ‖ ≤ JL/((1−ρ)(n+J))`.
    pub fn step_bound(&self, n: u64) -> f64 {
        (self.j * self.l) as f64 / ((1.0 - self.rho) * (n + self.j) as f64)
    }

    /// Pointwise bound `‖Txₙ−xₙ‖ ≤ (J+2)L/((1−ρ)(n+J))`.
    pub fn fix_bound(&self, n: u64) -> f64 {
        ((self.j + 2) * self.l) as f64 / ((1.0 - self.rho) * (n + self.j) as f64)
    }
}

/// Least admissible `L`: the smallest positive integer at or above
/// `max{‖x₁−x₀‖, K_p(3−ρ) + ((1−ρ)‖r*‖/2)(2P+1)/(P(P+1))}`.
fn minimal_l(inst: &ProblemInstance, sched: &ParameterSchedule, kp: u64, p: u64, r_norm: f64) -> Result<u64, ScheduleError> {
    let rho = inst.rho();
    let x1 = step(inst, sched, &inst.x0, 0)?;
    let first = inst.space.dist(&x1, &inst.x0);
    let pf = p as f64;
    let second = kp as f64 * (3.0 - rho)
        + (1.0 - rho) * r_norm / 2.0 * (2.0 * pf + 1.0) / (pf * (pf + 1.0));
    Ok((first.max(second).ceil() as u64).max(1))
}

/// Family-3 schedule with validated `L`. An inadmissible `L` is rejected
/// with the least admissible integer in the error.
pub fn example3_schedule(
    params: &Example3Params,
    inst: &ProblemInstance,
) -> Result<Example3Schedule, ScheduleError> {
    let Example3Params { j, p, r_star, l } = params.clone();
    let rho = inst.rho();
    let threshold = (3.0 - rho) / (1.0 - rho);
    if (j as f64) <= threshold {
        return Err(ScheduleError::JNotAboveThreshold { j, threshold });
    }
    if p < j {
        return Err(ScheduleError::PBelowJ { p, j });
    }
    check_r_star(&inst.space, &r_star)?;
    let r_norm = inst.space.norm(&r_star);
    let (lambda1, lambda2, m_r) = residual_moduli(r_norm);
    let kp = (2.0 * kp0(inst)).ceil() as u64 + m_r + 1;

    // tails telescope: Σ|δ−δ'| from n is δ_{n+1}, Σ|α−α'| is α_{n+1},
    // Σ|β−β'| is (3−ρ)/((1−ρ)(n+J+1))
    let two_over = rat_from_f64(2.0 / (1.0 - rho)).expect("finite ρ");
    let beta_coeff = rat_from_f64((3.0 - rho) / (1.0 - rho)).expect("finite ρ");
    let beta_coeff2 = beta_coeff.clone();
    let bundle = ModuliBundle {
        m_abd: 0,
        sigma1: Some(delta_divergence(j)),
        sigma1_star: Some(delta_product(j, rho)),
        sigma2: Modulus::total(
            ModulusKind::CauchyModulus,
            format!("⌈2(k+1)/(1−{rho})⌉"),
            move |k: &Nat| ceil_mul(&two_over, &(k + 1u32)),
        ),
        sigma3: None,
        theta1: Modulus::total(ModulusKind::CauchyModulus, "k+1", |k: &Nat| k + 1u32),
        gamma1: Modulus::total(
            ModulusKind::CauchyModulus,
            format!("⌈(3−ρ)(k+1)/(1−{rho})⌉"),
            move |k: &Nat| ceil_mul(&beta_coeff, &(k + 1u32)),
        ),
        gamma2: Some(Modulus::total(
            ModulusKind::ConvergenceRate,
            format!("⌈(3−ρ)(k+1)/(1−{rho})⌉"),
            move |k: &Nat| ceil_mul(&beta_coeff2, &(k + 1u32)),
        )),
        lambda1,
        lambda2,
        m_r,
    };
    let schedule = ParameterSchedule {
        description: format!("δ=2/((1−ρ)(n+J)), J={j}, P={p}, ρ={rho}, ‖r*‖={r_norm}"),
        alpha: Arc::new(move |n| 1.0 / ((n + j) as f64)),
        beta: Arc::new(move |n| 1.0 - (3.0 - rho) / ((1.0 - rho) * (n + j) as f64)),
        delta: Arc::new(move |n| 2.0 / ((1.0 - rho) * (n + j) as f64)),
        residual: inverse_square_residual(r_star, p),
        bundle,
    };
    let minimal = minimal_l(inst, &schedule, kp, p, r_norm)?;
    let l = match l {
        Some(l) if l < minimal => return Err(ScheduleError::LTooSmall { l, minimal }),
        Some(l) => l,
        None => minimal,
    };
    Ok(Example3Schedule {
        schedule,
        j,
        p,
        rho,
        l,
        kp,
        r_norm,
    })
}

/// Linear rates `Φ(k) = ⌈JL(k+1)/(1−ρ)⌉`, `Ψ(k) = ⌈(2+J)L(k+1)/(1−ρ)⌉`.
pub fn example3_rates(ex3: &Example3Schedule) -> (RateCertificate, RateCertificate) {
    let (j, l, rho, kp) = (ex3.j, ex3.l, ex3.rho, ex3.kp);
    let step_slope = rat_u64(j * l);
    let fix_slope = rat_u64((j + 2) * l);
    let phi = Modulus::total(
        ModulusKind::ConvergenceRate,
        format!("⌈{j}·{l}(k+1)/(1−{rho})⌉"),
        move |k: &Nat| {
            let num = ceil_mul(&step_slope, &(k + 1u32));
            ceil_div_one_minus_rho(&num, rho)
        },
    );
    let psi = Modulus::total(
        ModulusKind::ConvergenceRate,
        format!("⌈(2+{j})·{l}(k+1)/(1−{rho})⌉"),
        move |k: &Nat| {
            let num = ceil_mul(&fix_slope, &(k + 1u32));
            ceil_div_one_minus_rho(&num, rho)
        },
    );
    (
        RateCertificate {
            target: CertificateTarget::StepResidual,
            route: Route::ClosedForm,
            kp,
            rate: phi,
        },
        RateCertificate {
            target: CertificateTarget::FixResidual,
            route: Route::ClosedForm,
            kp,
            rate: psi,
        },
    )
}

/// Outcome of checking the Sabach–Shtern recurrence lemma on concrete
/// sequences: hypotheses are validated separately from the conclusion, so a
/// failing conclusion with unmet hypotheses is not a counterexample.
#[derive(Debug, Clone, Default)]
pub struct SabachShternReport {
    pub checks: u64,
    pub hypothesis_failures: Vec<String>,
    pub conclusion_violations: Vec<Violation>,
    /// Seed of the generator that produced randomized inputs, if any.
    pub seed: Option<u64>,
}

impl SabachShternReport {
    pub fn hypotheses_met(&self) -> bool {
        self.hypothesis_failures.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.hypotheses_met() && self.conclusion_violations.is_empty()
    }
}

/// Check the recurrence lemma: with `aₙ = N/(γ(n+J))`, `J ≥ N ≥ 2`,
/// `γ ∈ (0,1]`, `cₙ ≤ L`, `s₀ ≤ L`, and
/// `s_{n+1} ≤ (1−γa_{n+1})sₙ + (aₙ−a_{n+1})cₙ`, the conclusion is
/// `sₙ ≤ JL/(γ(n+J))` for all `n ≤ n_max`.
#[allow(clippy::too_many_arguments)]
pub fn sabach_shtern_check(
    l: f64,
    j: u64,
    n_cap: u64,
    gamma: f64,
    a: &RealSequence,
    c: &RealSequence,
    s: &RealSequence,
    n_max: u64,
    seed: Option<u64>,
    tolerance: f64,
) -> SabachShternReport {
    let mut report = SabachShternReport {
        seed,
        ..Default::default()
    };
    if !(2 <= n_cap && n_cap <= j) {
        report
            .hypothesis_failures
            .push(format!("need J ≥ N ≥ 2, got J = {j}, N = {n_cap}"));
    }
    if !(0.0 < gamma && gamma <= 1.0) {
        report
            .hypothesis_failures
            .push(format!("need γ ∈ (0,1], got γ = {gamma}"));
    }
    if l.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        report
            .hypothesis_failures
            .push(format!("need L > 0, got L = {l}"));
    }
    if !crate::bigmath::leq_with_tol(s.eval(0), l, tolerance) {
        report
            .hypothesis_failures
            .push(format!("s₀ = {} exceeds L = {l}", s.eval(0)));
    }
    let a_expected = |n: u64| n_cap as f64 / (gamma * (n + j) as f64);
    for n in 0..=n_max {
        let an = a.eval(n);
        if (an - a_expected(n)).abs() > tolerance * a_expected(n).abs() + 1e-15 {
            report
                .hypothesis_failures
                .push(format!("a({n}) = {an}, expected N/(γ(n+J)) = {}", a_expected(n)));
            break;
        }
        if !crate::bigmath::leq_with_tol(c.eval(n), l, tolerance) {
            report
                .hypothesis_failures
                .push(format!("c({n}) = {} exceeds L = {l}", c.eval(n)));
            break;
        }
        if n < n_max {
            let rhs = (1.0 - gamma * a.eval(n + 1)) * s.eval(n)
                + (a.eval(n) - a.eval(n + 1)) * c.eval(n);
            if !crate::bigmath::leq_with_tol(s.eval(n + 1), rhs, tolerance) {
                report.hypothesis_failures.push(format!(
                    "recurrence fails at n = {n}: s(n+1) = {} > {rhs}",
                    s.eval(n + 1)
                ));
                break;
            }
        }
    }
    for n in 0..=n_max {
        report.checks += 1;
        let bound = (j as f64) * l / (gamma * (n + j) as f64);
        let sn = s.eval(n);
        if !crate::bigmath::leq_with_tol(sn, bound, tolerance) {
            report.conclusion_violations.push(Violation {
                k: 0,
                n,
                lhs: sn,
                rhs: bound,
            });
        }
    }
    report
}
