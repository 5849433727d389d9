//! Assembly of rate-of-asymptotic-regularity certificates from a moduli
//! bundle and a problem instance.
//!
//! With `K_p = ⌈(2+M_{α,β,δ})K_p⁰⌉ + M_r + 1` and
//! `χ(k) = max{σ₂(6K_p(k+1)−1), θ₁(6K_p(k+1)−1), γ₁(6K_p(k+1)−1), λ₁(2k+1)}`
//! the two routes are
//!
//! * divergence (`σ₁`):
//!   `Φ(k) = σ₁⁺(⌈(χ(2k+1)+1+⌈ln(4K_p(k+1))⌉)/(1−ρ)⌉+1)`,
//! * product (`σ₁*`): `Φ*(k) = σ₁*(χ(2k+1)+1, 4K_p(k+1)−1) + 1`,
//!
//! each with the companion fixed-point-residual rate
//! `Ψ(k) = max{Φ(3k+2), γ₂(6K_p(k+1)−1), λ₂(3k+2)+1}` (the `λ₂` term is
//! dropped when the error terms vanish identically). Special cases cover the
//! constant-anchor iteration (`f ≡ u`, ρ = 0) and sequential averaging
//! (`αₙ = 0`, `βₙ = 1−δₙ`, `rₙ = 0`). `K_p` is always recomputed here from
//! the instance and bundle; a caller-claimed `K_p` is never trusted.

use crate::bigmath::{ceil_ln_nat, nat, Nat};
use crate::iteration::{kp, ModuliBundle, ProblemInstance};
use crate::moduli::{ceil_div_one_minus_rho, g_plus, Modulus, ModulusError, ModulusKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CertificateError {
    #[error("bundle is missing the {name} modulus required by this route")]
    MissingModulus { name: &'static str },
    #[error("this route requires ρ = 0, got ρ = {rho}")]
    RhoNotZero { rho: f64 },
    #[error("this route requires a vanishing error term (M_r = 0), got M_r = {m_r}")]
    ResidualNotZero { m_r: u64 },
    #[error("this route requires exact convex weights (M_α,β,δ = 0), got {m_abd}")]
    SlackNotZero { m_abd: u64 },
    #[error(transparent)]
    Modulus(#[from] ModulusError),
}

/// Which residual sequence a certificate bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateTarget {
    /// `‖x_{n+1} − xₙ‖ ≤ 1/(k+1)` for `n ≥ rate(k)`.
    StepResidual,
    /// `‖Txₙ − xₙ‖ ≤ 1/(k+1)` for `n ≥ rate(k)`.
    FixResidual,
}

impl std::fmt::Display for CertificateTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CertificateTarget::StepResidual => write!(f, "‖x(n+1)−x(n)‖"),
            CertificateTarget::FixResidual => write!(f, "‖Tx(n)−x(n)‖"),
        }
    }
}

/// Which assembly route produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Via a rate of divergence `σ₁` of `Σδₙ`.
    Divergence,
    /// Via a product modulus `σ₁*` for `∏(1−(1−ρ)δ_{i+1})`.
    Product,
    /// Constant-anchor simplification (`f ≡ u`, ρ = 0) of the divergence route.
    ConstantAnchor,
    /// Sequential averaging (`αₙ = 0`, `βₙ = 1−δₙ`, `rₙ = 0`).
    SequentialAveraging,
    /// Closed-form rate for a worked parameter family.
    ClosedForm,
}

/// A certified rate: `target ≤ 1/(k+1)` for all `n ≥ rate(k)`.
#[derive(Debug, Clone)]
pub struct RateCertificate {
    pub target: CertificateTarget,
    pub route: Route,
    /// The `K_p` constant baked into the rate, recomputed from the instance.
    pub kp: u64,
    pub rate: Modulus,
}

impl RateCertificate {
    pub fn describe(&self) -> String {
        format!("{} ≤ 1/(k+1) for n ≥ {}", self.target, self.rate.description)
    }
}

/// `6K_p(k+1) − 1` (always ≥ 5, so the subtraction is safe).
fn arg6(kp: u64, k: &Nat) -> Nat {
    nat(6 * kp) * (k + 1u32) - 1u32
}

/// `χ(k) = max{σ₂, θ₁, γ₁ at 6K_p(k+1)−1, λ₁(2k+1)}`; the `λ₁` term is
/// omitted when the error terms vanish identically.
pub fn chi(bundle: &ModuliBundle, kp: u64) -> Modulus {
    let (s2, t1, g1) = (
        bundle.sigma2.clone(),
        bundle.theta1.clone(),
        bundle.gamma1.clone(),
    );
    let l1 = if bundle.residual_is_zero() {
        None
    } else {
        Some(bundle.lambda1.clone())
    };
    let desc = match &l1 {
        Some(l1) => format!(
            "max{{({}|{}|{})(6·{kp}(k+1)−1), ({})(2k+1)}}",
            s2.description, t1.description, g1.description, l1.description
        ),
        None => format!(
            "max{{({}|{}|{})(6·{kp}(k+1)−1)}}",
            s2.description, t1.description, g1.description
        ),
    };
    Modulus::new(ModulusKind::CauchyModulus, desc, move |k| {
        let a = arg6(kp, k);
        let mut best = s2.eval(&a)?.max(t1.eval(&a)?).max(g1.eval(&a)?);
        if let Some(l1) = &l1 {
            best = best.max(l1.eval(&(k * 2u32 + 1u32))?);
        }
        Ok(best)
    })
}

/// Inner argument `χ(2k+1) + 1 + ⌈ln(4K_p(k+1))⌉` shared by the divergence
/// routes.
fn divergence_inner(chi: &Modulus, kp: u64, k: &Nat) -> Result<Nat, ModulusError> {
    let c = chi.eval(&(k * 2u32 + 1u32))?;
    let ln = ceil_ln_nat(&(nat(4 * kp) * (k + 1u32)))?;
    Ok(c + 1u32 + nat(ln))
}

/// Step-residual rate via the divergence route:
/// `Φ(k) = σ₁⁺(⌈(χ(2k+1)+1+⌈ln(4K_p(k+1))⌉)/(1−ρ)⌉+1)`.
pub fn phi_step_divergence(
    inst: &ProblemInstance,
    bundle: &ModuliBundle,
) -> Result<RateCertificate, CertificateError> {
    let sigma1 = bundle
        .sigma1
        .clone()
        .ok_or(CertificateError::MissingModulus { name: "σ₁" })?;
    let kp = kp(inst, bundle);
    let rho = inst.rho();
    let chi = chi(bundle, kp);
    let desc = format!(
        "({})⁺(⌈(χ(2k+1)+1+⌈ln(4·{kp}(k+1))⌉)/(1−{rho})⌉+1), χ = {}",
        sigma1.description, chi.description
    );
    let rate = Modulus::new(ModulusKind::ConvergenceRate, desc, move |k| {
        let inner = divergence_inner(&chi, kp, k)?;
        let arg = ceil_div_one_minus_rho(&inner, rho) + 1u32;
        g_plus(&sigma1, &arg)
    });
    Ok(RateCertificate {
        target: CertificateTarget::StepResidual,
        route: Route::Divergence,
        kp,
        rate,
    })
}

/// Step-residual rate via the product route:
/// `Φ*(k) = σ₁*(χ(2k+1)+1, 4K_p(k+1)−1) + 1`.
pub fn phi_step_product(
    inst: &ProblemInstance,
    bundle: &ModuliBundle,
) -> Result<RateCertificate, CertificateError> {
    let sigma1_star = bundle
        .sigma1_star
        .clone()
        .ok_or(CertificateError::MissingModulus { name: "σ₁*" })?;
    let kp = kp(inst, bundle);
    let chi = chi(bundle, kp);
    let desc = format!(
        "({})(χ(2k+1)+1, 4·{kp}(k+1)−1)+1, χ = {}",
        sigma1_star.description, chi.description
    );
    let rate = Modulus::new(ModulusKind::ConvergenceRate, desc, move |k| {
        let m = chi.eval(&(k * 2u32 + 1u32))? + 1u32;
        let second = nat(4 * kp) * (k + 1u32) - 1u32;
        Ok(sigma1_star.eval(&m, &second)? + 1u32)
    });
    Ok(RateCertificate {
        target: CertificateTarget::StepResidual,
        route: Route::Product,
        kp,
        rate,
    })
}

/// Fixed-point-residual rate companion to a step-residual rate `Φ`:
/// `Ψ(k) = max{Φ(3k+2), γ₂(6K_p(k+1)−1), λ₂(3k+2)+1}` (the `λ₂` term
/// drops when the error terms vanish identically).
pub fn psi_fix_from_step(
    phi: &RateCertificate,
    bundle: &ModuliBundle,
) -> Result<RateCertificate, CertificateError> {
    debug_assert_eq!(phi.target, CertificateTarget::StepResidual);
    let gamma2 = bundle
        .gamma2
        .clone()
        .ok_or(CertificateError::MissingModulus { name: "γ₂" })?;
    let kp = phi.kp;
    let phi_rate = phi.rate.clone();
    let l2 = if bundle.residual_is_zero() {
        None
    } else {
        Some(bundle.lambda2.clone())
    };
    let desc = match &l2 {
        Some(l2) => format!(
            "max{{Φ(3k+2), ({})(6·{kp}(k+1)−1), ({})(3k+2)+1}}",
            gamma2.description, l2.description
        ),
        None => format!("max{{Φ(3k+2), ({})(6·{kp}(k+1)−1)}}", gamma2.description),
    };
    let rate = Modulus::new(ModulusKind::ConvergenceRate, desc, move |k| {
        let a = k * 3u32 + 2u32;
        let mut best = phi_rate.eval(&a)?.max(gamma2.eval(&arg6(kp, k))?);
        if let Some(l2) = &l2 {
            best = best.max(l2.eval(&a)? + 1u32);
        }
        Ok(best)
    });
    Ok(RateCertificate {
        target: CertificateTarget::FixResidual,
        route: phi.route,
        kp,
        rate,
    })
}

/// Constant-anchor iteration (`f ≡ u`, so ρ = 0):
/// `Φ(k) = σ₁⁺(χ(2k+1)+⌈ln(4K_p(k+1))⌉+2)`.
pub fn constant_anchor_phi(
    inst: &ProblemInstance,
    bundle: &ModuliBundle,
) -> Result<RateCertificate, CertificateError> {
    let rho = inst.rho();
    if rho != 0.0 {
        return Err(CertificateError::RhoNotZero { rho });
    }
    let sigma1 = bundle
        .sigma1
        .clone()
        .ok_or(CertificateError::MissingModulus { name: "σ₁" })?;
    let kp = kp(inst, bundle);
    let chi = chi(bundle, kp);
    let desc = format!(
        "({})⁺(χ(2k+1)+⌈ln(4·{kp}(k+1))⌉+2), χ = {}",
        sigma1.description, chi.description
    );
    let rate = Modulus::new(ModulusKind::ConvergenceRate, desc, move |k| {
        let arg = divergence_inner(&chi, kp, k)? + 1u32;
        g_plus(&sigma1, &arg)
    });
    Ok(RateCertificate {
        target: CertificateTarget::StepResidual,
        route: Route::ConstantAnchor,
        kp,
        rate,
    })
}

/// Sequential averaging (`αₙ = 0`, `βₙ = 1−δₙ`, `rₙ = 0`): here
/// `K_p = ⌈2K_p⁰⌉+1`, `χ(k) = σ₂(6K_p(k+1)−1)`, the step-residual rate is
/// taken through the product route when `σ₁*` is present (it gives the
/// tighter, typically polynomial bound) and the divergence route otherwise,
/// and `Ψ₀(k) = max{Φ₀(3k+2), σ₃(6K_p(k+1)−1)}`.
pub fn sequential_averaging_rates(
    inst: &ProblemInstance,
    bundle: &ModuliBundle,
) -> Result<(RateCertificate, RateCertificate), CertificateError> {
    if bundle.m_r != 0 {
        return Err(CertificateError::ResidualNotZero { m_r: bundle.m_r });
    }
    if bundle.m_abd != 0 {
        return Err(CertificateError::SlackNotZero {
            m_abd: bundle.m_abd,
        });
    }
    let sigma3 = bundle
        .sigma3
        .clone()
        .ok_or(CertificateError::MissingModulus { name: "σ₃" })?;
    let kp = kp(inst, bundle);
    let chi = bundle.sigma2.clone();
    let rho = inst.rho();

    let phi_rate = if let Some(sigma1_star) = bundle.sigma1_star.clone() {
        let chi = chi.clone();
        Modulus::new(
            ModulusKind::ConvergenceRate,
            format!(
                "({})(({})(6·{kp}(2k+2)−1)+1, 4·{kp}(k+1)−1)+1",
                sigma1_star.description, chi.description
            ),
            move |k| {
                let m = chi.eval(&arg6(kp, &(k * 2u32 + 1u32)))? + 1u32;
                let second = nat(4 * kp) * (k + 1u32) - 1u32;
                Ok(sigma1_star.eval(&m, &second)? + 1u32)
            },
        )
    } else {
        let sigma1 = bundle
            .sigma1
            .clone()
            .ok_or(CertificateError::MissingModulus { name: "σ₁" })?;
        let chi = chi.clone();
        Modulus::new(
            ModulusKind::ConvergenceRate,
            format!(
                "({})⁺(⌈(({})(6·{kp}(2k+2)−1)+1+⌈ln(4·{kp}(k+1))⌉)/(1−{rho})⌉+1)",
                sigma1.description, chi.description
            ),
            move |k| {
                let c = chi.eval(&arg6(kp, &(k * 2u32 + 1u32)))?;
                let ln = ceil_ln_nat(&(nat(4 * kp) * (k + 1u32)))?;
                let inner = c + 1u32 + nat(ln);
                let arg = ceil_div_one_minus_rho(&inner, rho) + 1u32;
                g_plus(&sigma1, &arg)
            },
        )
    };
    let phi = RateCertificate {
        target: CertificateTarget::StepResidual,
        route: Route::SequentialAveraging,
        kp,
        rate: phi_rate,
    };
    let phi_rate = phi.rate.clone();
    let psi_rate = Modulus::new(
        ModulusKind::ConvergenceRate,
        format!(
            "max{{Φ₀(3k+2), ({})(6·{kp}(k+1)−1)}}",
            sigma3.description
        ),
        move |k| {
            Ok(phi_rate
                .eval(&(k * 3u32 + 2u32))?
                .max(sigma3.eval(&arg6(kp, k))?))
        },
    );
    let psi = RateCertificate {
        target: CertificateTarget::FixResidual,
        route: Route::SequentialAveraging,
        kp,
        rate: psi_rate,
    };
    Ok((phi, psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigmath::{ceil_scaled_exp, rat_u64, trunc_sub};
    use crate::moduli::{affine_modulus, ProductModulus};
    use crate::space::{Norm, NormedSpace, Operator, OperatorClaim, OperatorKind};
    use num::ToPrimitive;

    /// Rotation by π/2 in the plane with anchor u = (1,0), fixed point 0.
    fn rotation_instance(x0: Vec<f64>) -> ProblemInstance {
        let sp = NormedSpace::new(2, Norm::L2);
        let t = Operator::new(
            OperatorKind::Rotation {
                angle: std::f64::consts::FRAC_PI_2,
            },
            OperatorClaim::Nonexpansive,
            &sp,
        )
        .unwrap();
        let f = Operator::new(
            OperatorKind::Constant {
                point: vec![1.0, 0.0],
            },
            OperatorClaim::Contraction { rho: 0.0 },
            &sp,
        )
        .unwrap();
        ProblemInstance::new(sp, t, f, x0, vec![0.0, 0.0]).unwrap()
    }

    /// The moduli of the convex schedule αₙ = 1/(n+2), βₙ = 1−2/(n+2),
    /// δₙ = 1/(n+2) with no error term: σ₂(k) = θ₁(k) = k+1,
    /// γ₁(k) = 2(k+1), γ₂(k) = 2(k+1), σ₁(n) = ⌈2eⁿ⌉−2,
    /// σ₁*(m,k) = (m+3)(k+1)−3.
    fn harmonic_bundle() -> ModuliBundle {
        let sigma1 = Modulus::new(ModulusKind::DivergenceRate, "⌈2eⁿ⌉−2", |n: &Nat| {
            let n = n.to_u64().expect("small divergence argument");
            Ok(trunc_sub(&ceil_scaled_exp(&rat_u64(2), n)?, &nat(2)))
        });
        let sigma1_star = ProductModulus::total("(m+3)(k+1)−3", |m: &Nat, k: &Nat| {
            (m + 3u32) * (k + 1u32) - 3u32
        });
        ModuliBundle {
            m_abd: 0,
            sigma1: Some(sigma1),
            sigma1_star: Some(sigma1_star),
            sigma2: affine_modulus(ModulusKind::CauchyModulus, 1.0, 0),
            sigma3: Some(affine_modulus(ModulusKind::ConvergenceRate, 1.0, 0)),
            theta1: affine_modulus(ModulusKind::CauchyModulus, 1.0, 0),
            gamma1: affine_modulus(ModulusKind::CauchyModulus, 2.0, 0),
            gamma2: Some(affine_modulus(ModulusKind::ConvergenceRate, 2.0, 0)),
            lambda1: Modulus::zero(ModulusKind::CauchyModulus),
            lambda2: Modulus::zero(ModulusKind::CauchyModulus),
            m_r: 0,
        }
    }

    #[test]
    fn chi_takes_pointwise_max() {
        let inst = rotation_instance(vec![1.0, 1.0]);
        let bundle = harmonic_bundle();
        let kp = kp(&inst, &bundle);
        assert_eq!(kp, 4); // ⌈2√2⌉+1
        let chi = chi(&bundle, kp);
        // χ(k) = γ₁(24(k+1)−1) = 2·24(k+1) = 48(k+1): γ₁ dominates
        for k in 0..8u64 {
            assert_eq!(chi.eval_u64(k).unwrap(), nat(48 * (k + 1)));
        }
    }

    #[test]
    fn product_route_closed_form() {
        // Φ*(k) = σ₁*(96(k+1)+1, 16(k+1)−1)+1 = (96(k+1)+4)·16(k+1)−2
        let inst = rotation_instance(vec![1.0, 1.0]);
        let bundle = harmonic_bundle();
        let phi = phi_step_product(&inst, &bundle).unwrap();
        assert_eq!(phi.kp, 4);
        for k in [0u64, 1, 5, 20] {
            let expect = (96 * (k + 1) + 4) * 16 * (k + 1) - 2;
            assert_eq!(phi.rate.eval_u64(k).unwrap(), nat(expect), "k = {k}");
        }
        assert_eq!(phi.rate.eval_u64(20).unwrap(), nat(678_718));
    }

    #[test]
    fn divergence_route_matches_constant_anchor_at_rho_zero() {
        // For ρ = 0 the general inner argument ⌈c/1⌉+1 equals the simplified
        // χ(2k+1)+⌈ln(4K_p(k+1))⌉+2, so the two rates must agree exactly.
        let inst = rotation_instance(vec![1.0, 1.0]);
        let bundle = harmonic_bundle();
        let general = phi_step_divergence(&inst, &bundle).unwrap();
        let anchor = constant_anchor_phi(&inst, &bundle).unwrap();
        for k in 0..4u64 {
            assert_eq!(
                general.rate.eval_u64(k).unwrap(),
                anchor.rate.eval_u64(k).unwrap(),
                "k = {k}"
            );
        }
    }

    #[test]
    fn divergence_route_small_value() {
        // K_p⁰ = 1 at x₀ = 0: K_p = 3, χ(k) = 36(k+1), and
        // Φ(0) = σ₁(χ(1)+1+⌈ln 12⌉+1) = σ₁(77) = ⌈2e⁷⁷⌉−2.
        let inst = rotation_instance(vec![0.0, 0.0]);
        let bundle = harmonic_bundle();
        let phi = phi_step_divergence(&inst, &bundle).unwrap();
        assert_eq!(phi.kp, 3);
        let expect = trunc_sub(&ceil_scaled_exp(&rat_u64(2), 77).unwrap(), &nat(2));
        assert_eq!(phi.rate.eval_u64(0).unwrap(), expect);
    }

    #[test]
    fn fix_residual_rate_dominates_step_rate() {
        let inst = rotation_instance(vec![1.0, 1.0]);
        let bundle = harmonic_bundle();
        let phi = phi_step_product(&inst, &bundle).unwrap();
        let psi = psi_fix_from_step(&phi, &bundle).unwrap();
        assert_eq!(psi.target, CertificateTarget::FixResidual);
        for k in 0..6u64 {
            let phi_at = phi.rate.eval_u64(3 * k + 2).unwrap();
            let psi_at = psi.rate.eval_u64(k).unwrap();
            assert!(psi_at >= phi_at, "k = {k}");
        }
    }

    #[test]
    fn missing_moduli_are_reported() {
        let inst = rotation_instance(vec![1.0, 1.0]);
        let mut bundle = harmonic_bundle();
        bundle.sigma1 = None;
        assert!(matches!(
            phi_step_divergence(&inst, &bundle),
            Err(CertificateError::MissingModulus { name: "σ₁" })
        ));
        let mut bundle = harmonic_bundle();
        bundle.sigma1_star = None;
        assert!(phi_step_product(&inst, &bundle).is_err());
        let mut bundle = harmonic_bundle();
        bundle.gamma2 = None;
        let phi = phi_step_product(&inst, &harmonic_bundle()).unwrap();
        assert!(matches!(
            psi_fix_from_step(&phi, &bundle),
            Err(CertificateError::MissingModulus { name: "γ₂" })
        ));
    }

    #[test]
    fn constant_anchor_requires_rho_zero() {
        let sp = NormedSpace::new(2, Norm::L2);
        let t = Operator::new(OperatorKind::Identity, OperatorClaim::Nonexpansive, &sp).unwrap();
        let f = Operator::new(
            OperatorKind::AffineContraction {
                matrix: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                offset: vec![0.0, 0.0],
                rho: 0.5,
            },
            OperatorClaim::Contraction { rho: 0.5 },
            &sp,
        )
        .unwrap();
        let inst =
            ProblemInstance::new(sp, t, f, vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            constant_anchor_phi(&inst, &harmonic_bundle()),
            Err(CertificateError::RhoNotZero { rho }) if rho == 0.5
        ));
    }

    #[test]
    fn sequential_averaging_prefers_product_route() {
        let inst = rotation_instance(vec![1.0, 1.0]);
        let bundle = harmonic_bundle();
        let (phi, psi) = sequential_averaging_rates(&inst, &bundle).unwrap();
        assert_eq!(phi.route, Route::SequentialAveraging);
        // K_p = 4, χ = σ₂, so Φ₀(k) = σ₁*(24(2k+2)−1+1+1, 16(k+1)−1)+1
        //  = (48(k+1)+4)·16(k+1)−2
        for k in 0..5u64 {
            let expect = (48 * (k + 1) + 4) * 16 * (k + 1) - 2;
            assert_eq!(phi.rate.eval_u64(k).unwrap(), nat(expect), "k = {k}");
        }
        // Ψ₀(k) = max{Φ₀(3k+2), σ₃(24(k+1)−1)} — Φ₀ dominates here
        for k in 0..5u64 {
            assert_eq!(
                psi.rate.eval_u64(k).unwrap(),
                phi.rate.eval_u64(3 * k + 2).unwrap()
            );
        }
    }

    #[test]
    fn sequential_averaging_rejects_error_terms() {
        let inst = rotation_instance(vec![1.0, 1.0]);
        let mut bundle = harmonic_bundle();
        bundle.m_r = 2;
        assert!(matches!(
            sequential_averaging_rates(&inst, &bundle),
            Err(CertificateError::ResidualNotZero { m_r: 2 })
        ));
        let mut bundle = harmonic_bundle();
        bundle.sigma3 = None;
        assert!(sequential_averaging_rates(&inst, &bundle).is_err());
    }
}
