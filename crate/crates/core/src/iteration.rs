//! The inexact generalized Halpern iteration
//! `x_{n+1} = δₙ f(xₙ) + αₙ xₙ + βₙ T xₙ + rₙ`
//! together with the `K_p` bound machinery.
//!
//! `K_p⁰ = max{‖x₀−p‖, ‖f(p)−p‖/(1−ρ), ‖p‖}` and
//! `K_p^{n+1} = K_pⁿ + (1−αₙ−βₙ−δₙ)‖p‖ + ‖rₙ‖`; the uniform bound is
//! `K_p = ⌈(2+M_{α,β,δ})·K_p⁰⌉ + M_r + 1`.

use crate::moduli::{Modulus, ProductModulus};
use crate::space::{axpy, NormedSpace, Operator, OperatorClaim, Point, SpaceError};
use std::sync::Arc;

/// How close the designated fixed point must be to actually fixed.
pub const FIXED_POINT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IterationError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("T must claim nonexpansiveness")]
    TNotNonexpansive,
    #[error("f must claim a contraction factor in [0,1)")]
    FNotContraction,
    #[error("designated point p is not fixed: ‖Tp−p‖ = {residual:.3e}")]
    NotAFixedPoint { residual: f64 },
    #[error("trace must have at least one step")]
    EmptyTrace,
    #[error("non-finite coordinate at step {n}")]
    NonFinite { n: u64 },
    #[error("moduli bundle must carry σ₁ or σ₁*")]
    MissingSigma1,
    #[error("schedule weights exceed 1 at n = {n}: α+β+δ = {sum}")]
    WeightsExceedOne { n: u64, sum: f64 },
}

/// The moduli witnessing the quantitative hypotheses (Q0)–(Q2rₙ).
#[derive(Debug, Clone)]
pub struct ModuliBundle {
    /// (Q0) upper bound on `Σ(1−αₙ−βₙ−δₙ)`.
    pub m_abd: u64,
    /// (Q1δₙ) rate of divergence of `Σδₙ`.
    pub sigma1: Option<Modulus>,
    /// (Q1*δₙ) product modulus for `∏(1−(1−ρ)δ_{i+1})`.
    pub sigma1_star: Option<ProductModulus>,
    /// (Q2δₙ) Cauchy modulus of `Σ|δₙ−δ_{n+1}|`.
    pub sigma2: Modulus,
    /// (Q3δₙ) rate of convergence of `δₙ → 0`.
    pub sigma3: Option<Modulus>,
    /// (Q1αₙ) Cauchy modulus of `Σ|αₙ−α_{n+1}|`.
    pub theta1: Modulus,
    /// (Q1βₙ) Cauchy modulus of `Σ|βₙ−β_{n+1}|`.
    pub gamma1: Modulus,
    /// (Q2βₙ) rate of convergence of `βₙ → 1`.
    pub gamma2: Option<Modulus>,
    /// (Q1rₙ) Cauchy modulus of `Σ‖rₙ−r_{n+1}‖`.
    pub lambda1: Modulus,
    /// (Q2rₙ) Cauchy modulus of `Σ‖rₙ‖`.
    pub lambda2: Modulus,
    /// Upper bound on `Σ‖rₙ‖`; 0 exactly when `rₙ ≡ 0`.
    pub m_r: u64,
}

impl ModuliBundle {
    pub fn check(&self) -> Result<(), IterationError> {
        if self.sigma1.is_none() && self.sigma1_star.is_none() {
            return Err(IterationError::MissingSigma1);
        }
        Ok(())
    }

    /// `M_r = 0` is the paper's convention for an identically zero residual.
    pub fn residual_is_zero(&self) -> bool {
        self.m_r == 0
    }
}

type ScalarSeq = Arc<dyn Fn(u64) -> f64 + Send + Sync>;
type PointSeq = Arc<dyn Fn(u64) -> Point + Send + Sync>;

/// Parameter sequences `(αₙ)`, `(βₙ)`, `(δₙ)`, `(rₙ)` with their moduli
/// bundle. Sequences evaluate lazily, so trace length is unbounded.
#[derive(Clone)]
pub struct ParameterSchedule {
    pub description: String,
    pub alpha: ScalarSeq,
    pub beta: ScalarSeq,
    pub delta: ScalarSeq,
    pub residual: PointSeq,
    pub bundle: ModuliBundle,
}

impl std::fmt::Debug for ParameterSchedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ParameterSchedule {}", self.description)
    }
}

impl ParameterSchedule {
    /// Check `αₙ + βₙ + δₙ ≤ 1` for `n < upto`.
    pub fn check_weights(&self, upto: u64) -> Result<(), IterationError> {
        for n in 0..upto {
            let s = (self.alpha)(n) + (self.beta)(n) + (self.delta)(n);
            if s > 1.0 + 1e-12 {
                return Err(IterationError::WeightsExceedOne { n, sum: s });
            }
        }
        Ok(())
    }
}

/// A problem instance: space, nonexpansive `T`, ρ-contraction `f`, start
/// point, and a designated fixed point `p` of `T`.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub space: NormedSpace,
    pub t_op: Operator,
    pub f_op: Operator,
    pub x0: Point,
    pub p: Point,
}

impl ProblemInstance {
    pub fn new(
        space: NormedSpace,
        t_op: Operator,
        f_op: Operator,
        x0: Point,
        p: Point,
    ) -> Result<Self, IterationError> {
        if t_op.claim != OperatorClaim::Nonexpansive {
            return Err(IterationError::TNotNonexpansive);
        }
        if !matches!(f_op.claim, OperatorClaim::Contraction { .. }) {
            return Err(IterationError::FNotContraction);
        }
        space.check_point(&x0)?;
        space.check_point(&p)?;
        let residual = space.dist(&t_op.apply(&p), &p);
        if residual > FIXED_POINT_TOLERANCE {
            return Err(IterationError::NotAFixedPoint { residual });
        }
        Ok(ProblemInstance {
            space,
            t_op,
            f_op,
            x0,
            p,
        })
    }

    pub fn rho(&self) -> f64 {
        match self.f_op.claim {
            OperatorClaim::Contraction { rho } => rho,
            OperatorClaim::Nonexpansive => 1.0,
        }
    }
}

/// A computed orbit with its residual sequences and the `K_pⁿ` path.
#[derive(Debug, Clone)]
pub struct IterationTrace {
    dim: usize,
    coords: Vec<f64>,
    /// `‖x_{n+1} − xₙ‖` for `n = 0..steps`.
    pub step_residuals: Vec<f64>,
    /// `‖xₙ − Txₙ‖` for `n = 0..=steps`.
    pub fix_residuals: Vec<f64>,
    /// `K_pⁿ` for `n = 0..=steps`.
    pub kp_path: Vec<f64>,
}

impl IterationTrace {
    /// Number of stored points (`steps + 1`).
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, n: usize) -> &[f64] {
        &self.coords[n * self.dim..(n + 1) * self.dim]
    }

    /// Overwrite a stored point (fault-injection support; residuals are
    /// deliberately left untouched).
    pub fn tamper_point(&mut self, n: usize, coords: &[f64]) {
        assert_eq!(coords.len(), self.dim);
        self.coords[n * self.dim..(n + 1) * self.dim].copy_from_slice(coords);
    }
}

/// One step of the iteration: `δₙ f(x) + αₙ x + βₙ T x + rₙ`.
pub fn step(
    inst: &ProblemInstance,
    sched: &ParameterSchedule,
    x: &[f64],
    n: u64,
) -> Result<Point, IterationError> {
    inst.space.check_point(x)?;
    let fx = inst.f_op.apply(x);
    let tx = inst.t_op.apply(x);
    let r = (sched.residual)(n);
    inst.space.check_point(&r)?;
    let mut next = r;
    axpy(&mut next, (sched.delta)(n), &fx);
    axpy(&mut next, (sched.alpha)(n), x);
    axpy(&mut next, (sched.beta)(n), &tx);
    Ok(next)
}

/// Run `steps` iterations from `x₀`, recording both residual sequences and
/// the `K_pⁿ` path. Deterministic: identical inputs give identical traces.
pub fn run(
    inst: &ProblemInstance,
    sched: &ParameterSchedule,
    steps: u64,
) -> Result<IterationTrace, IterationError> {
    if steps == 0 {
        return Err(IterationError::EmptyTrace);
    }
    let dim = inst.space.dimension;
    let norm_p = inst.space.norm(&inst.p);
    let mut coords = Vec::with_capacity(((steps + 1) as usize) * dim);
    let mut step_residuals = Vec::with_capacity(steps as usize);
    let mut fix_residuals = Vec::with_capacity(steps as usize + 1);
    let mut kp_path = Vec::with_capacity(steps as usize + 1);

    let mut x = inst.x0.clone();
    let mut kp_n = kp0(inst);
    coords.extend_from_slice(&x);
    fix_residuals.push(inst.space.dist(&x, &inst.t_op.apply(&x)));
    kp_path.push(kp_n);

    for n in 0..steps {
        let next = step(inst, sched, &x, n)?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(IterationError::NonFinite { n: n + 1 });
        }
        let r = (sched.residual)(n);
        let slack = 1.0 - (sched.alpha)(n) - (sched.beta)(n) - (sched.delta)(n);
        kp_n += slack.max(0.0) * norm_p + inst.space.norm(&r);
        step_residuals.push(inst.space.dist(&next, &x));
        fix_residuals.push(inst.space.dist(&next, &inst.t_op.apply(&next)));
        kp_path.push(kp_n);
        coords.extend_from_slice(&next);
        x = next;
    }
    Ok(IterationTrace {
        dim,
        coords,
        step_residuals,
        fix_residuals,
        kp_path,
    })
}

/// `K_p⁰ = max{‖x₀−p‖, ‖f(p)−p‖/(1−ρ), ‖p‖}`.
pub fn kp0(inst: &ProblemInstance) -> f64 {
    let rho = inst.rho();
    debug_assert!(rho < 1.0);
    let a = inst.space.dist(&inst.x0, &inst.p);
    let b = inst.space.dist(&inst.f_op.apply(&inst.p), &inst.p) / (1.0 - rho);
    let c = inst.space.norm(&inst.p);
    a.max(b).max(c)
}

/// `K_pⁿ` by the recursion `K_p^{n+1} = K_pⁿ + (1−αₙ−βₙ−δₙ)‖p‖ + ‖rₙ‖`.
pub fn kp_path(inst: &ProblemInstance, sched: &ParameterSchedule, n: u64) -> f64 {
    let norm_p = inst.space.norm(&inst.p);
    let mut kp_n = kp0(inst);
    for i in 0..n {
        let slack = 1.0 - (sched.alpha)(i) - (sched.beta)(i) - (sched.delta)(i);
        kp_n += slack.max(0.0) * norm_p + inst.space.norm(&(sched.residual)(i));
    }
    kp_n
}

/// `K_p = ⌈(2 + M_{α,β,δ})·K_p⁰⌉ + M_r + 1`.
pub fn kp(inst: &ProblemInstance, bundle: &ModuliBundle) -> u64 {
    let base = (2.0 + bundle.m_abd as f64) * kp0(inst);
    base.ceil() as u64 + bundle.m_r + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moduli::{Modulus, ModulusKind};
    use crate::space::{Norm, OperatorKind};

    fn l2_plane() -> NormedSpace {
        NormedSpace::new(2, Norm::L2)
    }

    fn trivial_bundle() -> ModuliBundle {
        ModuliBundle {
            m_abd: 0,
            sigma1: Some(Modulus::total(ModulusKind::DivergenceRate, "n", |k| {
                k.clone()
            })),
            sigma1_star: None,
            sigma2: Modulus::zero(ModulusKind::CauchyModulus),
            sigma3: None,
            theta1: Modulus::zero(ModulusKind::CauchyModulus),
            gamma1: Modulus::zero(ModulusKind::CauchyModulus),
            gamma2: None,
            lambda1: Modulus::zero(ModulusKind::CauchyModulus),
            lambda2: Modulus::zero(ModulusKind::CauchyModulus),
            m_r: 0,
        }
    }

    fn const_schedule(alpha: f64, beta: f64, delta: f64) -> ParameterSchedule {
        ParameterSchedule {
            description: "const".into(),
            alpha: Arc::new(move |_| alpha),
            beta: Arc::new(move |_| beta),
            delta: Arc::new(move |_| delta),
            residual: Arc::new(|_| vec![0.0, 0.0]),
            bundle: trivial_bundle(),
        }
    }

    fn rotation_instance(x0: Point) -> ProblemInstance {
        let sp = l2_plane();
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

    #[test]
    fn frozen_step_keeps_point() {
        let inst = rotation_instance(vec![0.3, 0.4]);
        let sched = const_schedule(1.0, 0.0, 0.0);
        let x = vec![0.3, 0.4];
        assert_eq!(step(&inst, &sched, &x, 0).unwrap(), x);
    }

    #[test]
    fn pure_contraction_step() {
        let inst = rotation_instance(vec![0.3, 0.4]);
        let sched = const_schedule(0.0, 0.0, 1.0);
        let y = step(&inst, &sched, &[0.3, 0.4], 0).unwrap();
        assert_eq!(y, vec![1.0, 0.0]);
    }

    #[test]
    fn halpern_style_step_by_hand() {
        // δ₀=1/2, α₀=0, β₀=1/2 from x₀=(0,0): T(0)=0, so x₁=(1/2,0)
        let inst = rotation_instance(vec![0.0, 0.0]);
        let sched = const_schedule(0.0, 0.5, 0.5);
        let y = step(&inst, &sched, &[0.0, 0.0], 0).unwrap();
        assert!((y[0] - 0.5).abs() < 1e-15 && y[1].abs() < 1e-15);
    }

    #[test]
    fn stationary_orbit_has_zero_residuals() {
        // T = identity, f ≡ u, x₀ = u: every convex combination returns u
        let sp = l2_plane();
        let u = vec![1.0, 0.0];
        let t = Operator::new(OperatorKind::Identity, OperatorClaim::Nonexpansive, &sp).unwrap();
        let f = Operator::new(
            OperatorKind::Constant { point: u.clone() },
            OperatorClaim::Contraction { rho: 0.0 },
            &sp,
        )
        .unwrap();
        let inst = ProblemInstance::new(sp, t, f, u.clone(), u.clone()).unwrap();
        let sched = const_schedule(0.25, 0.25, 0.5);
        let trace = run(&inst, &sched, 50).unwrap();
        assert_eq!(trace.len(), 51);
        assert!(trace.step_residuals.iter().all(|&r| r == 0.0));
        assert!(trace.fix_residuals.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn zero_steps_rejected() {
        let inst = rotation_instance(vec![0.0, 0.0]);
        let sched = const_schedule(0.0, 0.5, 0.5);
        assert!(matches!(
            run(&inst, &sched, 0),
            Err(IterationError::EmptyTrace)
        ));
    }

    #[test]
    fn determinism_bit_identical() {
        let inst = rotation_instance(vec![1.0, 1.0]);
        let sched = const_schedule(0.1, 0.6, 0.3);
        let a = run(&inst, &sched, 200).unwrap();
        let b = run(&inst, &sched, 200).unwrap();
        assert_eq!(a.coords, b.coords);
        assert_eq!(a.step_residuals, b.step_residuals);
        assert_eq!(a.fix_residuals, b.fix_residuals);
        assert_eq!(a.kp_path, b.kp_path);
    }

    #[test]
    fn kp0_cases() {
        // x₀ = p = 0, f ≡ u with ‖u‖ = 1, ρ = 0 ⇒ K_p⁰ = 1
        let inst = rotation_instance(vec![0.0, 0.0]);
        assert_eq!(kp0(&inst), 1.0);
        // dominated by ‖x₀ − p‖ = 5
        let inst = rotation_instance(vec![3.0, 4.0]);
        assert_eq!(kp0(&inst), 5.0);
    }

    #[test]
    fn kp_formula() {
        let inst = rotation_instance(vec![0.0, 0.0]);
        let bundle = trivial_bundle();
        // K_p⁰ = 1, M = 0, M_r = 0 ⇒ K_p = 3
        assert_eq!(kp(&inst, &bundle), 3);
    }

    #[test]
    fn kp_path_constant_when_weights_sum_to_one() {
        let inst = rotation_instance(vec![1.0, 1.0]);
        let sched = const_schedule(0.2, 0.5, 0.3);
        let k0 = kp_path(&inst, &sched, 0);
        for n in [1, 5, 40] {
            assert_eq!(kp_path(&inst, &sched, n), k0);
        }
    }

    #[test]
    fn non_fixed_point_rejected() {
        let sp = l2_plane();
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
        let r = ProblemInstance::new(sp, t, f, vec![0.0, 0.0], vec![1.0, 0.0]);
        assert!(matches!(r, Err(IterationError::NotAFixedPoint { .. })));
    }
}
