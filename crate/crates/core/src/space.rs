//! Finite-dimensional normed spaces and the built-in operator families.
//!
//! The iteration itself is norm-generic; experiments run on ℝᵈ under ℓ1, ℓ2,
//! or ℓ∞. Built-in nonexpansive operators are admitted per norm (rotations,
//! reflections and ball projections only under ℓ2) and spot-checked on
//! sampled pairs at construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::sync::Arc;

/// A point is a coordinate vector whose length matches the space dimension.
pub type Point = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    LInf,
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::L1 => write!(f, "l1"),
            Norm::L2 => write!(f, "l2"),
            Norm::LInf => write!(f, "linf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormedSpace {
    pub dimension: usize,
    pub norm: Norm,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpaceError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operator {op} requires the l2 norm, space uses {norm}")]
    NormNotAdmitted { op: &'static str, norm: Norm },
    #[error("{op} failed the sampled {claim} check: pair #{pair}, ratio {ratio}")]
    ClaimCheckFailed {
        op: String,
        claim: String,
        pair: usize,
        ratio: f64,
    },
    #[error("contraction factor must lie in [0,1), got {0}")]
    BadContractionFactor(f64),
    #[error("matrix must be {dim}x{dim}")]
    BadMatrix { dim: usize },
    #[error("rotation requires dimension >= 2")]
    RotationNeedsPlane,
}

impl NormedSpace {
    pub fn new(dimension: usize, norm: Norm) -> Self {
        assert!(dimension >= 1, "dimension must be positive");
        NormedSpace { dimension, norm }
    }

    pub fn check_point(&self, x: &[f64]) -> Result<(), SpaceError> {
        if x.len() != self.dimension {
            return Err(SpaceError::DimensionMismatch {
                expected: self.dimension,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        match self.norm {
            Norm::L1 => x.iter().map(|v| v.abs()).sum(),
            Norm::L2 => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Norm::LInf => x.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    pub fn dist(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        match self.norm {
            Norm::L1 => x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum(),
            Norm::L2 => x
                .iter()
                .zip(y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
            Norm::LInf => x.iter().zip(y).fold(0.0, |m, (a, b)| m.max((a - b).abs())),
        }
    }
}

pub fn sub(x: &[f64], y: &[f64]) -> Point {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn axpy(acc: &mut [f64], c: f64, x: &[f64]) {
    for (a, v) in acc.iter_mut().zip(x) {
        *a += c * v;
    }
}

type CustomFn = dyn Fn(&[f64]) -> Point + Send + Sync;

/// The built-in operator families.
#[derive(Clone)]
pub enum OperatorKind {
    Identity,
    /// Plane rotation in the first two coordinates (ℓ2 only).
    Rotation { angle: f64 },
    /// Reflection across the hyperplane orthogonal to `normal` (ℓ2 only).
    Reflection { normal: Point },
    /// `(1−w)·x + w·M·x` for a row-major matrix `M`.
    AveragedLinear { matrix: Vec<Vec<f64>>, weight: f64 },
    /// Coordinatewise clamp onto a box (all norms).
    BoxProjection { lower: Point, upper: Point },
    /// Metric projection onto a closed ball (ℓ2 only).
    BallProjection { center: Point, radius: f64 },
    /// `ρ·M·x + offset` with `‖M‖ ≤ 1`: a ρ-contraction.
    AffineContraction {
        matrix: Vec<Vec<f64>>,
        offset: Point,
        rho: f64,
    },
    Constant { point: Point },
    /// User-supplied map; claims are only spot-checked, never certified.
    Custom { apply: Arc<CustomFn>, label: String },
}

impl fmt::Debug for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl OperatorKind {
    pub fn name(&self) -> String {
        match self {
            OperatorKind::Identity => "identity".into(),
            OperatorKind::Rotation { angle } => format!("rotation({angle})"),
            OperatorKind::Reflection { .. } => "reflection".into(),
            OperatorKind::AveragedLinear { weight, .. } => format!("averaged_linear(w={weight})"),
            OperatorKind::BoxProjection { .. } => "box_projection".into(),
            OperatorKind::BallProjection { .. } => "ball_projection".into(),
            OperatorKind::AffineContraction { rho, .. } => format!("affine_contraction(ρ={rho})"),
            OperatorKind::Constant { .. } => "constant".into(),
            OperatorKind::Custom { label, .. } => format!("custom({label})"),
        }
    }
}

/// What Lipschitz behaviour the operator claims.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorClaim {
    Nonexpansive,
    Contraction { rho: f64 },
}

impl OperatorClaim {
    pub fn lipschitz_bound(&self) -> f64 {
        match self {
            OperatorClaim::Nonexpansive => 1.0,
            OperatorClaim::Contraction { rho } => *rho,
        }
    }
}

/// An operator together with its claimed Lipschitz class.
#[derive(Clone, Debug)]
pub struct Operator {
    pub kind: OperatorKind,
    pub claim: OperatorClaim,
    /// Set for `Custom` kinds: the claim was sampled, not certified.
    pub unverified: bool,
}

/// Number of sampled pairs used by the construction-time Lipschitz check.
pub const CLAIM_CHECK_PAIRS: usize = 10_000;

impl Operator {
    /// Build and spot-check an operator for `space`. Rotations, reflections
    /// and ball projections are rejected outside ℓ2.
    pub fn new(
        kind: OperatorKind,
        claim: OperatorClaim,
        space: &NormedSpace,
    ) -> Result<Self, SpaceError> {
        if let OperatorClaim::Contraction { rho } = claim {
            if !(0.0..1.0).contains(&rho) {
                return Err(SpaceError::BadContractionFactor(rho));
            }
        }
        match &kind {
            OperatorKind::Rotation { .. } => {
                if space.dimension < 2 {
                    return Err(SpaceError::RotationNeedsPlane);
                }
                if space.norm != Norm::L2 {
                    return Err(SpaceError::NormNotAdmitted {
                        op: "rotation",
                        norm: space.norm,
                    });
                }
            }
            OperatorKind::Reflection { normal } => {
                space.check_point(normal)?;
                if space.norm != Norm::L2 {
                    return Err(SpaceError::NormNotAdmitted {
                        op: "reflection",
                        norm: space.norm,
                    });
                }
            }
            OperatorKind::BallProjection { center, .. } => {
                space.check_point(center)?;
                if space.norm != Norm::L2 {
                    return Err(SpaceError::NormNotAdmitted {
                        op: "ball_projection",
                        norm: space.norm,
                    });
                }
            }
            OperatorKind::BoxProjection { lower, upper } => {
                space.check_point(lower)?;
                space.check_point(upper)?;
            }
            OperatorKind::AveragedLinear { matrix, .. }
            | OperatorKind::AffineContraction { matrix, .. } => {
                if matrix.len() != space.dimension
                    || matrix.iter().any(|row| row.len() != space.dimension)
                {
                    return Err(SpaceError::BadMatrix {
                        dim: space.dimension,
                    });
                }
            }
            OperatorKind::Constant { point } => space.check_point(point)?,
            OperatorKind::Identity | OperatorKind::Custom { .. } => {}
        }
        let unverified = matches!(kind, OperatorKind::Custom { .. });
        let op = Operator {
            kind,
            claim,
            unverified,
        };
        op.sampled_claim_check(space, CLAIM_CHECK_PAIRS)?;
        Ok(op)
    }

    pub fn apply(&self, x: &[f64]) -> Point {
        match &self.kind {
            OperatorKind::Identity => x.to_vec(),
            OperatorKind::Rotation { angle } => {
                let (s, c) = angle.sin_cos();
                let mut y = x.to_vec();
                y[0] = c * x[0] - s * x[1];
                y[1] = s * x[0] + c * x[1];
                y
            }
            OperatorKind::Reflection { normal } => {
                let nn: f64 = normal.iter().map(|v| v * v).sum();
                if nn == 0.0 {
                    return x.to_vec();
                }
                let xn: f64 = x.iter().zip(normal).map(|(a, b)| a * b).sum();
                let c = 2.0 * xn / nn;
                x.iter().zip(normal).map(|(a, b)| a - c * b).collect()
            }
            OperatorKind::AveragedLinear { matrix, weight } => {
                let mx = mat_vec(matrix, x);
                x.iter()
                    .zip(&mx)
                    .map(|(a, b)| (1.0 - weight) * a + weight * b)
                    .collect()
            }
            OperatorKind::BoxProjection { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(v, (lo, hi))| v.clamp(*lo, *hi))
                .collect(),
            OperatorKind::BallProjection { center, radius } => {
                let d = sub(x, center);
                let len: f64 = d.iter().map(|v| v * v).sum::<f64>().sqrt();
                if len <= *radius {
                    x.to_vec()
                } else {
                    let c = radius / len;
                    center.iter().zip(&d).map(|(m, v)| m + c * v).collect()
                }
            }
            OperatorKind::AffineContraction {
                matrix,
                offset,
                rho,
            } => {
                let mx = mat_vec(matrix, x);
                offset.iter().zip(&mx).map(|(o, v)| o + rho * v).collect()
            }
            OperatorKind::Constant { point } => point.clone(),
            OperatorKind::Custom { apply, .. } => apply(x),
        }
    }

    fn sampled_claim_check(&self, space: &NormedSpace, pairs: usize) -> Result<(), SpaceError> {
        let bound = self.claim.lipschitz_bound();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0b5e);
        for pair in 0..pairs {
            let x: Point = (0..space.dimension)
                .map(|_| rng.gen_range(-10.0..10.0))
                .collect();
            let y: Point = (0..space.dimension)
                .map(|_| rng.gen_range(-10.0..10.0))
                .collect();
            let dxy = space.dist(&x, &y);
            if dxy < 1e-12 {
                continue;
            }
            let dfx = space.dist(&self.apply(&x), &self.apply(&y));
            let ratio = dfx / dxy;
            if ratio > bound * (1.0 + 1e-9) + 1e-12 {
                return Err(SpaceError::ClaimCheckFailed {
                    op: self.kind.name(),
                    claim: format!("{:?}", self.claim),
                    pair,
                    ratio,
                });
            }
        }
        Ok(())
    }
}

fn mat_vec(m: &[Vec<f64>], x: &[f64]) -> Point {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l2(dim: usize) -> NormedSpace {
        NormedSpace::new(dim, Norm::L2)
    }

    #[test]
    fn norms_satisfy_axioms_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for norm in [Norm::L1, Norm::L2, Norm::LInf] {
            let sp = NormedSpace::new(3, norm);
            for _ in 0..500 {
                let x: Point = (0..3).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let y: Point = (0..3).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let c: f64 = rng.gen_range(-3.0..3.0);
                let sum: Point = x.iter().zip(&y).map(|(a, b)| a + b).collect();
                assert!(sp.norm(&sum) <= sp.norm(&x) + sp.norm(&y) + 1e-12);
                let scaled: Point = x.iter().map(|v| c * v).collect();
                assert!((sp.norm(&scaled) - c.abs() * sp.norm(&x)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rotation_is_nonexpansive_in_l2() {
        let sp = l2(2);
        let op = Operator::new(
            OperatorKind::Rotation {
                angle: std::f64::consts::FRAC_PI_2,
            },
            OperatorClaim::Nonexpansive,
            &sp,
        )
        .unwrap();
        let y = op.apply(&[1.0, 0.0]);
        assert!((y[0]).abs() < 1e-12 && (y[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_rejected_outside_l2() {
        let sp = NormedSpace::new(2, Norm::L1);
        assert!(matches!(
            Operator::new(
                OperatorKind::Rotation { angle: 1.0 },
                OperatorClaim::Nonexpansive,
                &sp
            ),
            Err(SpaceError::NormNotAdmitted { .. })
        ));
    }

    #[test]
    fn box_projection_nonexpansive_in_all_norms() {
        for norm in [Norm::L1, Norm::L2, Norm::LInf] {
            let sp = NormedSpace::new(3, norm);
            let op = Operator::new(
                OperatorKind::BoxProjection {
                    lower: vec![-1.0; 3],
                    upper: vec![1.0; 3],
                },
                OperatorClaim::Nonexpansive,
                &sp,
            );
            assert!(op.is_ok(), "{norm}");
        }
    }

    #[test]
    fn expansive_custom_operator_fails_check() {
        let sp = l2(2);
        let op = Operator::new(
            OperatorKind::Custom {
                apply: Arc::new(|x: &[f64]| x.iter().map(|v| 2.0 * v).collect()),
                label: "double".into(),
            },
            OperatorClaim::Nonexpansive,
            &sp,
        );
        assert!(matches!(op, Err(SpaceError::ClaimCheckFailed { .. })));
    }

    #[test]
    fn contraction_claim_checked() {
        let sp = l2(2);
        // ρ = 0.5 scaling really is a 0.5-contraction
        let ok = Operator::new(
            OperatorKind::AffineContraction {
                matrix: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                offset: vec![0.3, 0.3],
                rho: 0.5,
            },
            OperatorClaim::Contraction { rho: 0.5 },
            &sp,
        );
        assert!(ok.is_ok());
        // but claiming ρ = 0.25 for it must fail
        let bad = Operator::new(
            OperatorKind::AffineContraction {
                matrix: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                offset: vec![0.3, 0.3],
                rho: 0.5,
            },
            OperatorClaim::Contraction { rho: 0.25 },
            &sp,
        );
        assert!(matches!(bad, Err(SpaceError::ClaimCheckFailed { .. })));
    }

    #[test]
    fn invalid_rho_rejected() {
        let sp = l2(1);
        let r = Operator::new(
            OperatorKind::Identity,
            OperatorClaim::Contraction { rho: 1.0 },
            &sp,
        );
        assert!(matches!(r, Err(SpaceError::BadContractionFactor(_))));
    }

    #[test]
    fn custom_operator_is_flagged_unverified() {
        let sp = l2(2);
        let op = Operator::new(
            OperatorKind::Custom {
                apply: Arc::new(|x: &[f64]| x.to_vec()),
                label: "id".into(),
            },
            OperatorClaim::Nonexpansive,
            &sp,
        )
        .unwrap();
        assert!(op.unverified);
    }
}
