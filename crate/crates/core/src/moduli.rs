//! The quantitative calculus of rates and moduli, in exact integer arithmetic.
//!
//! A *rate of convergence* of `(aₙ)` to `a` is a `φ` with `|aₙ − a| ≤ 1/(k+1)`
//! for all `n ≥ φ(k)`. A *Cauchy modulus* of a series of nonnegative terms
//! bounds every tail sum from `φ(k)` on by `1/(k+1)`. A *rate of divergence*
//! `φ` of `Σaₙ` satisfies `Σ_{i≤φ(n)} aᵢ ≥ n`. A *product modulus* `A(m,k)`
//! satisfies `A(m,k) ≥ m` and `∏_{i=m}^{A(m,k)} (1−aᵢ) ≤ 1/(k+1)`.
//!
//! All modulus values are arbitrary-precision naturals and every combinator
//! here is exact; transcendental ceilings round upward (see [`crate::bigmath`]).

use crate::bigmath::{
    self, ceil_div, ceil_ln_nat, ceil_mul, ceil_sqrt_rat, nat, rat_from_f64, rat_u64, trunc_sub,
    BudgetExceeded, Nat,
};
use num::{ToPrimitive, Zero};
use std::fmt;
use std::sync::Arc;

/// Enumeration cap for `g⁺` and other point-by-point scans.
pub const ENUMERATION_LIMIT: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModulusError {
    #[error("{0}")]
    Budget(#[from] BudgetExceeded),
    #[error("g+ argument {0} exceeds the enumeration limit {ENUMERATION_LIMIT}")]
    EnumerationLimit(String),
    #[error("partial sum is negative at index {index}: {value}")]
    NegativePartialSum { index: u64, value: String },
    #[error("coefficient must be positive, got {0}")]
    NonpositiveCoefficient(String),
    #[error("parameter {name} must be positive")]
    ZeroParameter { name: &'static str },
    #[error("parameter {name} must be nonnegative, got {value}")]
    NegativeParameter { name: &'static str, value: String },
}

/// What defining inequality a [`Modulus`] claims to witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulusKind {
    /// Rate of convergence of a sequence to its limit (here: to 0).
    ConvergenceRate,
    /// Cauchy modulus of a series of nonnegative terms.
    CauchyModulus,
    /// Rate of divergence of a series.
    DivergenceRate,
}

impl fmt::Display for ModulusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModulusKind::ConvergenceRate => write!(f, "convergence rate"),
            ModulusKind::CauchyModulus => write!(f, "Cauchy modulus"),
            ModulusKind::DivergenceRate => write!(f, "divergence rate"),
        }
    }
}

type EvalFn = dyn Fn(&Nat) -> Result<Nat, ModulusError> + Send + Sync;

/// A total function `ℕ → ℕ` tagged with the role it plays.
#[derive(Clone)]
pub struct Modulus {
    pub kind: ModulusKind,
    pub description: String,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Modulus[{}] {}", self.kind, self.description)
    }
}

impl Modulus {
    pub fn new<F>(kind: ModulusKind, description: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&Nat) -> Result<Nat, ModulusError> + Send + Sync + 'static,
    {
        Modulus {
            kind,
            description: description.into(),
            eval: Arc::new(eval),
        }
    }

    /// Total modulus from an infallible function.
    pub fn total<F>(kind: ModulusKind, description: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&Nat) -> Nat + Send + Sync + 'static,
    {
        Modulus::new(kind, description, move |k| Ok(eval(k)))
    }

    /// The constant-zero modulus.
    pub fn zero(kind: ModulusKind) -> Self {
        Modulus::total(kind, "0", |_| Nat::zero())
    }

    pub fn eval(&self, k: &Nat) -> Result<Nat, ModulusError> {
        (self.eval)(k)
    }

    pub fn eval_u64(&self, k: u64) -> Result<Nat, ModulusError> {
        self.eval(&nat(k))
    }

    /// Same underlying function under a different role tag.
    pub fn retagged(&self, kind: ModulusKind) -> Self {
        Modulus {
            kind,
            description: self.description.clone(),
            eval: self.eval.clone(),
        }
    }
}

type ProductEvalFn = dyn Fn(&Nat, &Nat) -> Result<Nat, ModulusError> + Send + Sync;

/// Two-argument modulus `A(m,k)` for products `∏_{i=m}^{A(m,k)} (1−aᵢ)`.
#[derive(Clone)]
pub struct ProductModulus {
    pub description: String,
    eval: Arc<ProductEvalFn>,
}

impl fmt::Debug for ProductModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProductModulus {}", self.description)
    }
}

impl ProductModulus {
    pub fn new<F>(description: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&Nat, &Nat) -> Result<Nat, ModulusError> + Send + Sync + 'static,
    {
        ProductModulus {
            description: description.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn total<F>(description: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&Nat, &Nat) -> Nat + Send + Sync + 'static,
    {
        ProductModulus::new(description, move |m, k| Ok(eval(m, k)))
    }

    pub fn eval(&self, m: &Nat, k: &Nat) -> Result<Nat, ModulusError> {
        (self.eval)(m, k)
    }

    pub fn eval_u64(&self, m: u64, k: u64) -> Result<Nat, ModulusError> {
        self.eval(&nat(m), &nat(k))
    }
}

type SeqFn = dyn Fn(u64) -> f64 + Send + Sync;

/// A nonnegative real sequence, evaluated lazily.
#[derive(Clone)]
pub struct RealSequence {
    pub description: String,
    eval: Arc<SeqFn>,
}

impl fmt::Debug for RealSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealSequence {}", self.description)
    }
}

impl RealSequence {
    pub fn new<F>(description: impl Into<String>, eval: F) -> Self
    where
        F: Fn(u64) -> f64 + Send + Sync + 'static,
    {
        RealSequence {
            description: description.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn eval(&self, n: u64) -> f64 {
        (self.eval)(n)
    }

    /// Partial sums `n ↦ Σ_{i≤n} aᵢ` of this sequence.
    pub fn partial_sums(&self) -> RealSequence {
        let inner = self.eval.clone();
        // recomputed from scratch per call; callers needing speed use prefix
        // sums directly
        RealSequence::new(format!("partial sums of {}", self.description), move |n| {
            (0..=n).map(|i| inner(i)).sum()
        })
    }
}

/// `g⁺(n) = max{g(i) | 0 ≤ i ≤ n}`, evaluated by honest enumeration.
pub fn g_plus(g: &Modulus, n: &Nat) -> Result<Nat, ModulusError> {
    let n = n
        .to_u64()
        .filter(|&v| v <= ENUMERATION_LIMIT)
        .ok_or_else(|| ModulusError::EnumerationLimit(n.to_string()))?;
    let mut best = Nat::zero();
    for i in 0..=n {
        let v = g.eval_u64(i)?;
        if v > best {
            best = v;
        }
    }
    Ok(best)
}

/// Lemma: a Cauchy modulus `φ` of `Σaₙ` yields the convergence rate
/// `ψ(k) = φ(k) + 1` of the terms to 0.
pub fn rate_from_cauchy(phi: &Modulus) -> Modulus {
    let inner = phi.clone();
    Modulus::new(
        ModulusKind::ConvergenceRate,
        format!("({}) + 1", phi.description),
        move |k| Ok(inner.eval(k)? + 1u32),
    )
}

/// Least natural `M ≥ Σ_{i≤φ(0)} aᵢ + 1`; an upper bound on the full series.
pub fn series_bound(phi: &Modulus, partial_sums: &RealSequence) -> Result<Nat, ModulusError> {
    let at = phi
        .eval_u64(0)?
        .to_u64()
        .filter(|&v| v <= ENUMERATION_LIMIT)
        .ok_or_else(|| ModulusError::EnumerationLimit("series_bound at φ(0)".into()))?;
    let s = partial_sums.eval(at);
    if s < 0.0 {
        return Err(ModulusError::NegativePartialSum {
            index: at,
            value: format!("{s}"),
        });
    }
    Ok(nat((s + 1.0).ceil() as u64))
}

/// Cauchy modulus of `Σ(q·aₙ + r·bₙ)` from moduli of the two series:
/// `φ(k) = max{φ₁(⌈2q(k+1)⌉−1), φ₂(⌈2r(k+1)⌉−1)}`.
pub fn combine_linear(
    phi1: &Modulus,
    phi2: &Modulus,
    q: f64,
    r: f64,
) -> Result<Modulus, ModulusError> {
    if q.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(ModulusError::NonpositiveCoefficient(format!("q = {q}")));
    }
    if r.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(ModulusError::NonpositiveCoefficient(format!("r = {r}")));
    }
    let (p1, p2) = (phi1.clone(), phi2.clone());
    let (qr, rr) = (
        rat_from_f64(q).expect("finite q"),
        rat_from_f64(r).expect("finite r"),
    );
    Ok(Modulus::new(
        ModulusKind::CauchyModulus,
        format!(
            "max{{({})(⌈2·{q}(k+1)⌉−1), ({})(⌈2·{r}(k+1)⌉−1)}}",
            p1.description, p2.description
        ),
        move |k| {
            let kp1 = k + 1u32;
            let a1 = trunc_sub(&ceil_mul(&(&qr * rat_u64(2)), &kp1), &nat(1));
            let a2 = trunc_sub(&ceil_mul(&(&rr * rat_u64(2)), &kp1), &nat(1));
            Ok(p1.eval(&a1)?.max(p2.eval(&a2)?))
        },
    ))
}

/// The four inverse-square moduli for `t/(n+L)²`:
/// `φ, φ*` are Cauchy moduli of the series and rates for `t/(n+L) → 0`;
/// `ψ, ψ*` are rates for `t/(n+L)² → 0`.
pub struct InverseSquareModuli {
    pub phi: Modulus,
    pub phi_star: Modulus,
    pub psi: Modulus,
    pub psi_star: Modulus,
}

pub fn inverse_square_moduli(t: f64, l: u64) -> Result<InverseSquareModuli, ModulusError> {
    if t < 0.0 || !t.is_finite() {
        return Err(ModulusError::NegativeParameter {
            name: "t",
            value: format!("{t}"),
        });
    }
    if l == 0 {
        return Err(ModulusError::ZeroParameter { name: "L" });
    }
    let tr = rat_from_f64(t).expect("finite t");
    let mk = |star: bool, sqrt: bool, kind: ModulusKind| {
        let tr = tr.clone();
        let desc = match (sqrt, star) {
            (false, false) => format!("⌈{t}(k+1)⌉"),
            (false, true) => format!("⌈{t}(k+1)⌉∸{l}"),
            (true, false) => format!("⌈√({t}(k+1))⌉"),
            (true, true) => format!("⌈√({t}(k+1))⌉∸{l}"),
        };
        Modulus::total(kind, desc, move |k: &Nat| {
            let arg = &tr * bigmath::rat_nat(&(k + 1u32));
            let v = if sqrt {
                ceil_sqrt_rat(&arg)
            } else {
                bigmath::ceil_rat(&arg)
            };
            if star {
                trunc_sub(&v, &nat(l))
            } else {
                v
            }
        })
    };
    Ok(InverseSquareModuli {
        phi: mk(false, false, ModulusKind::CauchyModulus),
        phi_star: mk(true, false, ModulusKind::CauchyModulus),
        psi: mk(false, true, ModulusKind::ConvergenceRate),
        psi_star: mk(true, true, ModulusKind::ConvergenceRate),
    })
}

/// Quantitative Xu lemma, divergence branch: for `s_{n+1} ≤ (1−aₙ)sₙ + cₙ`
/// with `Σaₙ` diverging with rate `θ`, `Σcₙ` Cauchy with modulus `χ`, and
/// `L ≥ sₙ`, the sequence `sₙ → 0` with rate
/// `Σ(k) = θ(χ(2k+1) + 1 + ⌈ln(2L(k+1))⌉) + 1`.
pub fn xu_rate(theta: &Modulus, chi: &Modulus, l: u64) -> Result<Modulus, ModulusError> {
    if l == 0 {
        return Err(ModulusError::ZeroParameter { name: "L" });
    }
    let (theta, chi) = (theta.clone(), chi.clone());
    Ok(Modulus::new(
        ModulusKind::ConvergenceRate,
        format!(
            "({})(({})(2k+1)+1+⌈ln(2·{l}(k+1))⌉)+1",
            theta.description, chi.description
        ),
        move |k| {
            let kp1 = k + 1u32;
            let c = chi.eval(&(k * 2u32 + 1u32))?;
            let ln_arg = nat(2 * l) * &kp1;
            let ln = ceil_ln_nat(&ln_arg)?;
            Ok(theta.eval(&(c + 1u32 + nat(ln)))? + 1u32)
        },
    ))
}

/// Quantitative Xu lemma, product branch:
/// `Σ*(k) = A(χ(2k+1)+1, 2L(k+1)−1) + 1`.
pub fn xu_rate_product(
    a: &ProductModulus,
    chi: &Modulus,
    l: u64,
) -> Result<Modulus, ModulusError> {
    if l == 0 {
        return Err(ModulusError::ZeroParameter { name: "L" });
    }
    let (a, chi) = (a.clone(), chi.clone());
    Ok(Modulus::new(
        ModulusKind::ConvergenceRate,
        format!(
            "({})(({})(2k+1)+1, 2·{l}(k+1)−1)+1",
            a.description, chi.description
        ),
        move |k| {
            let kp1 = k + 1u32;
            let m = chi.eval(&(k * 2u32 + 1u32))? + 1u32;
            let second = nat(2 * l) * &kp1 - 1u32;
            Ok(a.eval(&m, &second)? + 1u32)
        },
    ))
}

/// `θ(n) = σ₁⁺(⌈n/(1−ρ)⌉+1) ∸ 1`: a rate of divergence of
/// `Σ(1−ρ)δ_{n+1}` from a rate of divergence `σ₁` of `Σδₙ`.
pub fn h1delta_to_theta(sigma1: &Modulus, rho: f64) -> Modulus {
    assert!((0.0..1.0).contains(&rho), "rho must lie in [0,1)");
    let sigma1 = sigma1.clone();
    let inv = rat_from_f64(1.0 - rho).expect("finite rho").recip();
    Modulus::new(
        ModulusKind::DivergenceRate,
        format!("({})⁺(⌈n/(1−{rho})⌉+1)∸1", sigma1.description),
        move |n| {
            let arg = ceil_mul(&inv, n) + 1u32;
            Ok(trunc_sub(&g_plus(&sigma1, &arg)?, &nat(1)))
        },
    )
}

/// Convenience: the affine modulus `k ↦ ⌈a(k+1)⌉ + b` (`a ≥ 0` finite).
pub fn affine_modulus(kind: ModulusKind, a: f64, b: u64) -> Modulus {
    let ar = rat_from_f64(a).expect("finite slope");
    Modulus::total(kind, format!("⌈{a}(k+1)⌉+{b}"), move |k: &Nat| {
        ceil_mul(&ar, &(k + 1u32)) + nat(b)
    })
}

/// `⌈a/(1−ρ)⌉` helper shared by certificate assembly: exact ceiling of a
/// natural divided by `1−ρ`.
pub fn ceil_div_one_minus_rho(a: &Nat, rho: f64) -> Nat {
    let one_minus = rat_from_f64(1.0 - rho).expect("finite rho");
    let num = one_minus.numer().to_biguint().expect("1-rho > 0");
    let den = one_minus.denom().to_biguint().expect("positive denom");
    // a/(1−ρ) = a·den/num
    ceil_div(&(a * den), &num)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigmath::nat;

    fn linear(kind: ModulusKind, a: u64, b: u64) -> Modulus {
        Modulus::total(kind, format!("{a}k+{b}"), move |k: &Nat| k * a + nat(b))
    }

    #[test]
    fn rate_from_cauchy_formula() {
        let phi = linear(ModulusKind::CauchyModulus, 1, 0);
        let psi = rate_from_cauchy(&phi);
        assert_eq!(psi.eval_u64(3).unwrap(), nat(4));
        let phi = linear(ModulusKind::CauchyModulus, 2, 3);
        let psi = rate_from_cauchy(&phi);
        assert_eq!(psi.eval_u64(0).unwrap(), nat(4));
    }

    #[test]
    fn rate_from_cauchy_governs_inverse_square_terms() {
        // aₙ = 1/(n+1)² has Cauchy modulus φ(k)=k+1; ψ = φ+1 must bound the
        // terms: a_{ψ(k)+j} ≤ 1/(k+1).
        let phi = linear(ModulusKind::CauchyModulus, 1, 1);
        let psi = rate_from_cauchy(&phi);
        for k in 0..=50u64 {
            let start = psi.eval_u64(k).unwrap().to_u64().unwrap();
            for j in 0..=1000u64 {
                let n = start + j;
                let a = 1.0 / ((n + 1) as f64).powi(2);
                assert!(a <= 1.0 / (k as f64 + 1.0) + 1e-12, "k={k} j={j}");
            }
        }
    }

    #[test]
    fn series_bound_examples() {
        let phi = linear(ModulusKind::CauchyModulus, 1, 0);
        let zero = RealSequence::new("0", |_| 0.0);
        assert_eq!(series_bound(&phi, &zero.partial_sums()).unwrap(), nat(1));

        let phi = linear(ModulusKind::CauchyModulus, 1, 1);
        let inv_sq = RealSequence::new("1/(n+1)^2", |n| 1.0 / ((n + 1) as f64).powi(2));
        assert_eq!(series_bound(&phi, &inv_sq.partial_sums()).unwrap(), nat(3));
    }

    #[test]
    fn series_bound_cross_checks_inverse_square_cap() {
        // Σ t/(n+L)² ≤ 2⌈t⌉ must dominate the Lemma 2.1 bound
        for (t, l) in [(1.0, 1u64), (2.5, 1), (4.0, 3)] {
            let m = inverse_square_moduli(t, l).unwrap();
            let seq =
                RealSequence::new("t/(n+L)^2", move |n| t / ((n + l) as f64).powi(2));
            let bound = series_bound(&m.phi, &seq.partial_sums()).unwrap();
            assert!(bound <= nat(2 * (t.ceil() as u64) + 1), "t={t} L={l}");
        }
    }

    #[test]
    fn series_bound_rejects_negative() {
        let phi = linear(ModulusKind::CauchyModulus, 1, 0);
        let neg = RealSequence::new("-1", |_| -1.0);
        assert!(matches!(
            series_bound(&phi, &neg),
            Err(ModulusError::NegativePartialSum { .. })
        ));
    }

    #[test]
    fn combine_linear_examples() {
        let p1 = linear(ModulusKind::CauchyModulus, 1, 0);
        let p2 = linear(ModulusKind::CauchyModulus, 2, 0);
        let c = combine_linear(&p1, &p2, 1.0, 1.0).unwrap();
        assert_eq!(c.eval_u64(0).unwrap(), nat(2));

        // q = r = 1/2 on a common modulus is the identity
        let c = combine_linear(&p1, &p1, 0.5, 0.5).unwrap();
        for k in 0..20u64 {
            assert_eq!(c.eval_u64(k).unwrap(), p1.eval_u64(k).unwrap());
        }
    }

    #[test]
    fn combine_linear_rejects_nonpositive() {
        let p = linear(ModulusKind::CauchyModulus, 1, 0);
        assert!(combine_linear(&p, &p, 0.0, 1.0).is_err());
        assert!(combine_linear(&p, &p, 1.0, -2.0).is_err());
    }

    #[test]
    fn inverse_square_formulas() {
        let m = inverse_square_moduli(1.0, 1).unwrap();
        for k in 0..10u64 {
            assert_eq!(m.phi.eval_u64(k).unwrap(), nat(k + 1));
            assert_eq!(m.phi_star.eval_u64(k).unwrap(), nat(k));
        }
        // t = 0 kills everything
        let m = inverse_square_moduli(0.0, 2).unwrap();
        for k in 0..10u64 {
            assert_eq!(m.phi.eval_u64(k).unwrap(), nat(0));
            assert_eq!(m.psi_star.eval_u64(k).unwrap(), nat(0));
        }
        // t=2, L=1, k=4: φ(4)=10 and 2/(10+1) ≤ 1/5
        let m = inverse_square_moduli(2.0, 1).unwrap();
        assert_eq!(m.phi.eval_u64(4).unwrap(), nat(10));
        // rejects bad input
        assert!(inverse_square_moduli(-1.0, 1).is_err());
        assert!(inverse_square_moduli(1.0, 0).is_err());
    }

    #[test]
    fn xu_rate_formula() {
        let theta = linear(ModulusKind::DivergenceRate, 1, 0);
        let chi = linear(ModulusKind::CauchyModulus, 1, 0);
        let sigma = xu_rate(&theta, &chi, 1).unwrap();
        // Σ(0) = θ(χ(1)+1+⌈ln 2⌉)+1 = θ(1+1+1)+1 = 4
        assert_eq!(sigma.eval_u64(0).unwrap(), nat(4));
        assert!(xu_rate(&theta, &chi, 0).is_err());
    }

    #[test]
    fn xu_rate_product_formula() {
        let a = ProductModulus::total("m+k", |m: &Nat, k: &Nat| m + k);
        let chi = Modulus::zero(ModulusKind::CauchyModulus);
        let sigma = xu_rate_product(&a, &chi, 1).unwrap();
        // Σ*(0) = A(1,1)+1 = 3
        assert_eq!(sigma.eval_u64(0).unwrap(), nat(3));
        assert!(xu_rate_product(&a, &chi, 0).is_err());
    }

    #[test]
    fn g_plus_examples() {
        let id = linear(ModulusKind::ConvergenceRate, 1, 0);
        assert_eq!(g_plus(&id, &nat(4)).unwrap(), nat(4));

        let table = Modulus::total(ModulusKind::ConvergenceRate, "[3,1,5,2]", |k: &Nat| {
            match k.to_u64() {
                Some(0) => nat(3),
                Some(1) => nat(1),
                Some(2) => nat(5),
                Some(3) => nat(2),
                _ => nat(0),
            }
        });
        assert_eq!(g_plus(&table, &nat(3)).unwrap(), nat(5));
        assert_eq!(g_plus(&table, &nat(1)).unwrap(), nat(3));

        let c = Modulus::total(ModulusKind::ConvergenceRate, "7", |_: &Nat| nat(7));
        assert_eq!(g_plus(&c, &nat(100)).unwrap(), nat(7));
    }

    #[test]
    fn g_plus_respects_enumeration_limit() {
        let id = linear(ModulusKind::ConvergenceRate, 1, 0);
        assert!(g_plus(&id, &nat(ENUMERATION_LIMIT + 1)).is_err());
    }

    #[test]
    fn h1delta_theta_examples() {
        // ρ=0, monotone σ₁ ⇒ θ(n)=σ₁(n+1)∸1
        let s1 = linear(ModulusKind::DivergenceRate, 2, 1);
        let theta = h1delta_to_theta(&s1, 0.0);
        for n in 0..10u64 {
            assert_eq!(theta.eval_u64(n).unwrap(), nat(2 * (n + 1)));
        }
        // ρ=1/2, σ₁(n)=n ⇒ θ(n)=2n
        let id = linear(ModulusKind::DivergenceRate, 1, 0);
        let theta = h1delta_to_theta(&id, 0.5);
        for n in 0..10u64 {
            assert_eq!(theta.eval_u64(n).unwrap(), nat(2 * n));
        }
    }

    #[test]
    fn ceil_div_one_minus_rho_exact() {
        assert_eq!(ceil_div_one_minus_rho(&nat(3), 0.0), nat(3));
        assert_eq!(ceil_div_one_minus_rho(&nat(3), 0.5), nat(6));
        // 5 / 0.75 = 6.66 → 7
        assert_eq!(ceil_div_one_minus_rho(&nat(5), 0.25), nat(7));
    }
}
