//! Experiment configuration: a human-editable TOML schema that parses into
//! a harness [`Scenario`]. Unknown keys are errors, so typos fail fast with
//! a line-anchored diagnostic.
//!
//! ```toml
//! [instance]
//! dimension = 2
//! norm = "l2"
//! x0 = [1.0, 1.0]
//! p = [0.0, 0.0]
//!
//! [instance.t]
//! kind = "rotation"
//! angle = 1.5707963267948966
//!
//! [instance.f]
//! kind = "constant"
//! point = [1.0, 0.0]
//!
//! [schedule]
//! family = "example3"
//! j = 4
//! p = 4
//! r_star = [0.0, 0.0]
//!
//! [run]
//! trace_length = 10000
//! k_max = 10
//! ```

use asymreg::harness::Scenario;
use asymreg::schedules::{
    example1_schedule, example2_schedule, example3_rates, example3_schedule, example_rates,
    Example1Params, Example2Params, Example3Params, ExampleFamily,
};
use asymreg::space::Point;
use asymreg::{
    Norm, NormedSpace, Operator, OperatorClaim, OperatorKind, ParameterSchedule, ProblemInstance,
};
use asymreg::certificates::RateCertificate;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error("invalid run section: {0}")]
    Run(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    pub schedule: ScheduleSpec,
    pub run: RunSpec,
    /// Fault-injection knobs for sensitivity testing; absent in normal use.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<FaultSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub dimension: usize,
    pub norm: NormSpec,
    pub x0: Vec<f64>,
    pub p: Vec<f64>,
    pub t: OperatorSpec,
    pub f: ContractionSpec,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormSpec {
    L1,
    L2,
    LInf,
}

impl From<NormSpec> for Norm {
    fn from(n: NormSpec) -> Norm {
        match n {
            NormSpec::L1 => Norm::L1,
            NormSpec::L2 => Norm::L2,
            NormSpec::LInf => Norm::LInf,
        }
    }
}

/// Nonexpansive operator `T`, by kind.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    Identity,
    Rotation { angle: f64 },
    Reflection { normal: Vec<f64> },
    AveragedLinear { matrix: Vec<Vec<f64>>, weight: f64 },
    BoxProjection { lower: Vec<f64>, upper: Vec<f64> },
    BallProjection { center: Vec<f64>, radius: f64 },
    Constant { point: Vec<f64> },
}

impl OperatorSpec {
    fn kind(&self) -> OperatorKind {
        match self.clone() {
            OperatorSpec::Identity => OperatorKind::Identity,
            OperatorSpec::Rotation { angle } => OperatorKind::Rotation { angle },
            OperatorSpec::Reflection { normal } => OperatorKind::Reflection { normal },
            OperatorSpec::AveragedLinear { matrix, weight } => {
                OperatorKind::AveragedLinear { matrix, weight }
            }
            OperatorSpec::BoxProjection { lower, upper } => {
                OperatorKind::BoxProjection { lower, upper }
            }
            OperatorSpec::BallProjection { center, radius } => {
                OperatorKind::BallProjection { center, radius }
            }
            OperatorSpec::Constant { point } => OperatorKind::Constant { point },
        }
    }
}

/// ρ-contraction `f`, by kind. A constant map is a 0-contraction; an affine
/// map `ρ·M·x + offset` with `‖M‖ ≤ 1` is a ρ-contraction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ContractionSpec {
    Constant {
        point: Vec<f64>,
    },
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
        rho: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSpec {
    /// `αₙ = λ/(n+J)`, `βₙ = 1−(λ+1)/(n+J)`, `δₙ = 1/(n+J)`.
    Example1 {
        j: u64,
        p: u64,
        lambda: f64,
        r_star: Vec<f64>,
    },
    /// `αₙ = 1/(n+J)`, `βₙ = 1−2/(n+J)−1/(n+J)²`, `δₙ = 1/(n+J)`.
    Example2 { j: u64, p: u64, r_star: Vec<f64> },
    /// `αₙ = 1/(n+J)`, `βₙ = 1−(3−ρ)/((1−ρ)(n+J))`, `δₙ = 2/((1−ρ)(n+J))`.
    Example3 {
        j: u64,
        p: u64,
        r_star: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        l: Option<u64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub trace_length: u64,
    pub k_max: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_tolerance() -> f64 {
    1e-9
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultSpec {
    /// Replace the Cauchy modulus `σ₂` by the constant-zero modulus.
    #[serde(default)]
    pub falsify_sigma2: bool,
    /// Overwrite trace point `tamper_n` with `tamper_point` after the run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tamper_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tamper_point: Option<Vec<f64>>,
    /// Claim this `K_p` instead of the recomputed one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_kp: Option<u64>,
}

/// A built scenario plus display labels for its certificates.
pub struct Experiment {
    pub scenario: Scenario,
    pub rate_labels: Vec<String>,
}

pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
    Ok(toml::from_str(text)?)
}

fn build_instance(spec: &InstanceSpec) -> Result<ProblemInstance, ConfigError> {
    let space = NormedSpace::new(spec.dimension, spec.norm.into());
    let t = Operator::new(spec.t.kind(), OperatorClaim::Nonexpansive, &space)
        .map_err(|e| ConfigError::Instance(format!("T: {e}")))?;
    let (f_kind, rho) = match spec.f.clone() {
        ContractionSpec::Constant { point } => (OperatorKind::Constant { point }, 0.0),
        ContractionSpec::Affine {
            matrix,
            offset,
            rho,
        } => (
            OperatorKind::AffineContraction {
                matrix,
                offset,
                rho,
            },
            rho,
        ),
    };
    let f = Operator::new(f_kind, OperatorClaim::Contraction { rho }, &space)
        .map_err(|e| ConfigError::Instance(format!("f: {e}")))?;
    ProblemInstance::new(space, t, f, spec.x0.clone(), spec.p.clone())
        .map_err(|e| ConfigError::Instance(e.to_string()))
}

fn build_schedule(
    spec: &ScheduleSpec,
    inst: &ProblemInstance,
) -> Result<(ParameterSchedule, Vec<(String, RateCertificate)>), ConfigError> {
    let rho = inst.rho();
    let err = |e: asymreg::schedules::ScheduleError| ConfigError::Schedule(e.to_string());
    match spec.clone() {
        ScheduleSpec::Example1 {
            j,
            p,
            lambda,
            r_star,
        } => {
            let r_norm = inst.space.norm(&r_star);
            let sched =
                example1_schedule(&Example1Params { j, p, lambda, r_star }, &inst.space, rho)
                    .map_err(err)?;
            let rates = example_rates(ExampleFamily::Ex1, j, lambda, r_norm, inst).map_err(err)?;
            Ok((sched, labelled(rates)))
        }
        ScheduleSpec::Example2 { j, p, r_star } => {
            let r_norm = inst.space.norm(&r_star);
            let sched =
                example2_schedule(&Example2Params { j, p, r_star }, &inst.space, rho).map_err(err)?;
            let rates = example_rates(ExampleFamily::Ex2, j, 0.0, r_norm, inst).map_err(err)?;
            Ok((sched, labelled(rates)))
        }
        ScheduleSpec::Example3 { j, p, r_star, l } => {
            let ex3 = example3_schedule(&Example3Params { j, p, r_star, l }, inst).map_err(err)?;
            let (phi, psi) = example3_rates(&ex3);
            Ok((
                ex3.schedule,
                vec![("Φ".into(), phi), ("Ψ".into(), psi)],
            ))
        }
    }
}

fn labelled(rates: asymreg::schedules::ExampleRates) -> Vec<(String, RateCertificate)> {
    let mut out = vec![
        ("Φ".to_string(), rates.phi),
        ("Ψ".to_string(), rates.psi),
        ("Φ*".to_string(), rates.phi_star),
        ("Ψ*".to_string(), rates.psi_star),
    ];
    if let Some(c) = rates.phi_tilde {
        out.push(("Φ̃".to_string(), c));
    }
    if let Some(c) = rates.psi_tilde {
        out.push(("Ψ̃".to_string(), c));
    }
    out
}

/// Build the full experiment, applying any fault-injection knobs.
pub fn build(config: &ExperimentConfig, name: &str) -> Result<Experiment, ConfigError> {
    if config.run.trace_length < 2 {
        return Err(ConfigError::Run("trace_length must be at least 2".into()));
    }
    if config.run.tolerance.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(ConfigError::Run("tolerance must be positive".into()));
    }
    let instance = build_instance(&config.instance)?;
    let (mut schedule, labelled_rates) = build_schedule(&config.schedule, &instance)?;
    let mut claimed_kp = None;
    let mut tamper: Option<(usize, Point)> = None;
    if let Some(fault) = &config.fault {
        if fault.falsify_sigma2 {
            schedule.bundle.sigma2 =
                asymreg::Modulus::zero(asymreg::ModulusKind::CauchyModulus);
        }
        match (&fault.tamper_n, &fault.tamper_point) {
            (Some(n), Some(point)) => tamper = Some((*n, point.clone())),
            (None, None) => {}
            _ => {
                return Err(ConfigError::Run(
                    "tamper_n and tamper_point must be given together".into(),
                ))
            }
        }
        claimed_kp = fault.claimed_kp;
    }
    let (rate_labels, certificates) = labelled_rates.into_iter().unzip();
    Ok(Experiment {
        scenario: Scenario {
            name: name.to_string(),
            instance,
            schedule,
            trace_length: config.run.trace_length,
            k_max: config.run.k_max,
            tolerance: config.run.tolerance,
            seed: config.run.seed,
            certificates,
            claimed_kp,
            tamper,
            sigma1_k_max: 8,
        },
        rate_labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serialized_config_reparses_to_equivalent_scenario() {
        let text = include_str!("../examples/example3-linear.toml");
        let parsed = parse(text).unwrap();
        let round_tripped = parse(&toml::to_string(&parsed).unwrap()).unwrap();
        let a = build(&parsed, "a").unwrap();
        let b = build(&round_tripped, "b").unwrap();
        assert_eq!(a.rate_labels, b.rate_labels);
        assert_eq!(a.scenario.trace_length, b.scenario.trace_length);
        for (ca, cb) in a
            .scenario
            .certificates
            .iter()
            .zip(&b.scenario.certificates)
        {
            for k in 0..=10u64 {
                assert_eq!(ca.rate.eval_u64(k).unwrap(), cb.rate.eval_u64(k).unwrap());
            }
        }
        let ta = asymreg::run(&a.scenario.instance, &a.scenario.schedule, 100).unwrap();
        let tb = asymreg::run(&b.scenario.instance, &b.scenario.schedule, 100).unwrap();
        assert_eq!(ta.step_residuals, tb.step_residuals);
    }
}
