//! Certified rates of asymptotic regularity for the inexact generalized
//! Halpern iteration `x_{n+1} = δₙ f(xₙ) + αₙ xₙ + βₙ T xₙ + rₙ`, where `T`
//! is nonexpansive and `f` is a ρ-contraction.
//!
//! The crate has three layers:
//!
//! * **moduli calculus** ([`bigmath`], [`moduli`], [`validate`]) — exact
//!   arbitrary-precision arithmetic on rates (convergence / Cauchy /
//!   divergence moduli, product moduli) plus empirical validation of each
//!   modulus against the concrete sequence it claims to govern;
//! * **iteration and certificates** ([`space`], [`iteration`],
//!   [`certificates`], [`schedules`]) — deterministic orbit computation,
//!   and construction of explicit rates `Φ` (for `‖x_{n+1}−xₙ‖`) and `Ψ`
//!   (for `‖Txₙ−xₙ‖`) from a bundle of moduli, including the closed-form
//!   rates of the worked parameter families;
//! * **harness** ([`harness`]) — scenario suite that replays every
//!   certified bound against computed traces and classifies any failure.

pub mod bigmath;
pub mod certificates;
pub mod harness;
pub mod iteration;
pub mod moduli;
pub mod schedules;
pub mod space;
pub mod validate;

pub use bigmath::{Nat, Rat};
pub use iteration::{kp, kp0, run, IterationTrace, ModuliBundle, ParameterSchedule, ProblemInstance};
pub use moduli::{Modulus, ModulusKind, ProductModulus, RealSequence};
pub use space::{Norm, NormedSpace, Operator, OperatorClaim, OperatorKind};
