//! Exact natural-number arithmetic with outward-rounded transcendental ceilings.
//!
//! Rate certificates are built from ceilings of the form `⌈q·n⌉`, `⌈√q⌉`,
//! `⌈ln n⌉`, `⌈q·eⁿ⌉`, and `⌈q·n^{p/q}⌉`. Everything here rounds *upward*:
//! a computed value may exceed the true real value by at most one unit of the
//! outer ceiling, never fall below it. Ceilings of exactly representable
//! values are exact (`⌈x⌉ = x` for integer `x`).
//!
//! Transcendental comparisons (`eᵐ ≥ x`) are decided with rational interval
//! arithmetic: `e` is bracketed by truncated Taylor sums and the bracket is
//! tightened until the comparison resolves. Since `eᵐ` is irrational for
//! `m ≥ 1`, the loop terminates on natural inputs.

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{FromPrimitive, Integer, One, Signed, ToPrimitive, Zero};
use std::f64::consts::LN_2;

/// Arbitrary-precision natural number.
pub type Nat = BigUint;
/// Arbitrary-precision rational.
pub type Rat = BigRational;

/// Hard cap on the exponent accepted by [`ceil_scaled_exp`]. `e^n` has about
/// `0.43·n` digits, so this keeps values under roughly 10⁵ digits.
pub const EXP_ARG_LIMIT: u64 = 200_000;

/// Raised when an exact evaluation would blow past the desk-scale budget.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("evaluation budget exceeded: {0}")]
pub struct BudgetExceeded(pub String);

pub fn nat(n: u64) -> Nat {
    Nat::from(n)
}

/// Truncated subtraction on naturals: `max{a − b, 0}`.
pub fn trunc_sub(a: &Nat, b: &Nat) -> Nat {
    if a > b {
        a - b
    } else {
        Nat::zero()
    }
}

/// Exact rational from a finite `f64`. Every finite double is dyadic, so no
/// rounding happens here. Negative or non-finite inputs are rejected.
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    Rat::from_float(x)
}

pub fn rat_u64(n: u64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_nat(n: &Nat) -> Rat {
    Rat::from_integer(BigInt::from(n.clone()))
}

/// `⌈q⌉` as a natural, clamping negatives to 0.
pub fn ceil_rat(q: &Rat) -> Nat {
    if q.is_negative() || q.is_zero() {
        return Nat::zero();
    }
    q.ceil().to_integer().to_biguint().unwrap_or_default()
}

/// `⌈q·n⌉` exactly.
pub fn ceil_mul(q: &Rat, n: &Nat) -> Nat {
    ceil_rat(&(q * rat_nat(n)))
}

/// Least natural `m` with `m² ≥ q` (i.e. `⌈√q⌉` for `q ≥ 0`).
pub fn ceil_sqrt_rat(q: &Rat) -> Nat {
    if q.is_negative() || q.is_zero() {
        return Nat::zero();
    }
    let c = ceil_rat(q);
    let mut m = c.sqrt();
    while rat_nat(&(&m * &m)) < *q {
        m += 1u32;
    }
    while m > Nat::zero() {
        let prev = &m - 1u32;
        if rat_nat(&(&prev * &prev)) >= *q {
            m = prev;
        } else {
            break;
        }
    }
    m
}

/// Lower/upper rational brackets of `e` from `terms` Taylor terms.
/// The tail bound `Σ_{i>T} 1/i! ≤ 2/(T+1)!` is valid for `T ≥ 1`.
fn e_bracket(terms: u32) -> (Rat, Rat) {
    let terms = terms.max(4);
    let mut sum = Rat::zero();
    let mut fact = BigInt::one();
    for i in 0..=terms {
        if i > 0 {
            fact *= BigInt::from(i);
        }
        sum += Rat::new(BigInt::one(), fact.clone());
    }
    let next_fact = fact * BigInt::from(terms + 1);
    let rem = Rat::new(BigInt::from(2), next_fact);
    (sum.clone(), sum + rem)
}

/// `⌊e·2ᵖ⌋` and `⌈e·2ᵖ⌉+1` from a Taylor bracket tight to `2⁻ᵖ`.
fn e_fixed(p: u64) -> (Nat, Nat) {
    // smallest T with (T+1)! ≥ 2^{p+2}, so the tail 2/(T+1)! ≤ 2^{-p-1}
    let target = Nat::one() << (p + 2) as usize;
    let mut fact = Nat::one();
    let mut t = 1u32;
    while fact < target {
        t += 1;
        fact *= t;
    }
    let (lo, hi) = e_bracket(t);
    let lo_num = lo.numer().to_biguint().expect("e > 0");
    let lo_den = lo.denom().to_biguint().expect("positive denom");
    let hi_num = hi.numer().to_biguint().expect("e > 0");
    let hi_den = hi.denom().to_biguint().expect("positive denom");
    let lo_fixed = (lo_num << p as usize) / lo_den;
    let hi_fixed = ceil_div(&(hi_num << p as usize), &hi_den) + 1u32;
    (lo_fixed, hi_fixed)
}

/// Fixed-point interval power with directed rounding: given
/// `lo/2ᵖ ≤ b ≤ hi/2ᵖ`, returns `(rl, rh)` with `rl/2ᵖ ≤ bⁿ ≤ rh/2ᵖ`.
fn pow_fixed(lo: &Nat, hi: &Nat, p: u64, n: u64) -> (Nat, Nat) {
    let p = p as usize;
    let one = Nat::one() << p;
    let (mut rl, mut rh) = (one.clone(), one);
    let (mut bl, mut bh) = (lo.clone(), hi.clone());
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            rl = (&rl * &bl) >> p;
            rh = ((&rh * &bh) >> p) + 1u32;
        }
        e >>= 1;
        if e > 0 {
            bl = (&bl * &bl) >> p;
            bh = ((&bh * &bh) >> p) + 1u32;
        }
    }
    (rl, rh)
}

/// `⌈scale·eⁿ⌉` exactly, by fixed-point interval arithmetic whose working
/// precision is widened until both interval ends round to the same integer.
/// `scale` must be nonnegative.
pub fn ceil_scaled_exp(scale: &Rat, n: u64) -> Result<Nat, BudgetExceeded> {
    ceil_scaled_exp_with_guard(scale, n, 64)
}

/// As [`ceil_scaled_exp`] but starting from a caller-chosen working precision
/// (guard bits beyond the magnitude of `eⁿ`). Different starting precisions
/// must agree on the result.
pub fn ceil_scaled_exp_with_guard(
    scale: &Rat,
    n: u64,
    guard_bits: u64,
) -> Result<Nat, BudgetExceeded> {
    if n > EXP_ARG_LIMIT {
        return Err(BudgetExceeded(format!(
            "exp argument {n} exceeds limit {EXP_ARG_LIMIT}"
        )));
    }
    if scale.is_negative() || scale.is_zero() {
        return Ok(Nat::zero());
    }
    if n == 0 {
        return Ok(ceil_rat(scale));
    }
    // e^n has about 1.4427·n bits; add the guard on top
    let base_bits = (n as f64 * std::f64::consts::LOG2_E).ceil() as u64 + 8;
    let mut guard = guard_bits.max(32);
    loop {
        let p = base_bits + guard;
        let (el, eh) = e_fixed(p);
        let (rl, rh) = pow_fixed(&el, &eh, p, n);
        let denom = rat_nat(&(Nat::one() << p as usize));
        let a = ceil_rat(&(scale * rat_nat(&rl) / &denom));
        let b = ceil_rat(&(scale * rat_nat(&rh) / &denom));
        if a == b {
            return Ok(a);
        }
        if guard > 1 << 16 {
            return Err(BudgetExceeded(format!(
                "exp interval for e^{n} did not resolve at {guard} guard bits"
            )));
        }
        guard *= 2;
    }
}

/// Decide `eᵐ ≥ x` exactly for naturals `m`, `x`.
fn exp_ge(m: u64, x: &Nat) -> bool {
    if m == 0 {
        return *x <= Nat::one();
    }
    let base_bits = (m as f64 * std::f64::consts::LOG2_E).ceil() as u64 + 8;
    let mut guard = 32u64;
    loop {
        let p = base_bits + guard;
        let (el, eh) = e_fixed(p);
        let (rl, rh) = pow_fixed(&el, &eh, p, m);
        let scaled_x = x << p as usize;
        if rl >= scaled_x {
            return true;
        }
        if rh < scaled_x {
            return false;
        }
        guard *= 2;
    }
}

/// `⌈ln x⌉` for a natural `x ≥ 1`, i.e. the least `m` with `eᵐ ≥ x`.
pub fn ceil_ln_nat(x: &Nat) -> Result<u64, BudgetExceeded> {
    if x.is_zero() || x.is_one() {
        return Ok(0);
    }
    let est = (x.bits() as f64 * LN_2) as u64;
    let mut m = est.saturating_sub(2);
    while !exp_ge(m, x) {
        m += 1;
        if m > est + 8 {
            return Err(BudgetExceeded(format!("ceil_ln search diverged at {m}")));
        }
    }
    while m > 0 && exp_ge(m - 1, x) {
        m -= 1;
    }
    Ok(m)
}

/// The exponent `1/(1−ρ)` appearing in `σ₁*`-style moduli.
///
/// Computed exactly as a rational whenever the parts are small (ρ = 0 gives
/// exponent 1, ρ = 1/2 gives 2, ρ = 3/4 gives 4, ...); otherwise falls back
/// to upward-nudged floating point.
#[derive(Debug, Clone, PartialEq)]
pub enum Exponent {
    Exact { num: u64, den: u64 },
    Approx(f64),
}

impl Exponent {
    pub fn from_rho(rho: f64) -> Self {
        assert!((0.0..1.0).contains(&rho), "rho must lie in [0,1)");
        if let Some(one_minus) = rat_from_f64(1.0 - rho) {
            let inv = one_minus.recip();
            let (num, den) = (inv.numer(), inv.denom());
            if let (Some(n), Some(d)) = (num.to_u64(), den.to_u64()) {
                if n <= 64 && d <= 64 {
                    return Exponent::Exact { num: n, den: d };
                }
            }
        }
        Exponent::Approx(1.0 / (1.0 - rho))
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Exponent::Exact { num, den } => *num as f64 / *den as f64,
            Exponent::Approx(e) => *e,
        }
    }
}

/// `⌈scale · x^exp⌉` with upward rounding. Exact for rational exponents with
/// small parts; the floating-point fallback nudges the result upward before
/// taking the ceiling so certificates can only grow.
pub fn ceil_scaled_rpow(scale: &Rat, x: &Nat, exp: &Exponent) -> Nat {
    if scale.is_negative() || scale.is_zero() {
        return Nat::zero();
    }
    match exp {
        Exponent::Exact { num, den } => {
            if *den == 1 {
                // scale · x^num exactly
                let p = num::pow::pow(x.clone(), *num as usize);
                return ceil_mul(scale, &p);
            }
            // least v with (v·sd)^den ≥ sn^den · x^num
            let sn = scale.numer().to_biguint().expect("scale >= 0");
            let sd = scale.denom().to_biguint().expect("positive denominator");
            let rhs =
                num::pow::pow(sn, *den as usize) * num::pow::pow(x.clone(), *num as usize);
            let holds = |v: &Nat| num::pow::pow(v * &sd, *den as usize) >= rhs;
            let est = scale.to_f64().unwrap_or(f64::MAX)
                * x.to_f64().unwrap_or(f64::MAX).powf(exp.as_f64());
            let mut hi = Nat::from_f64((est * 1.5).max(4.0)).unwrap_or_else(|| nat(4));
            while !holds(&hi) {
                hi *= 2u32;
            }
            let mut lo = Nat::zero();
            while &lo + 1u32 < hi {
                let mid: Nat = (&lo + &hi) >> 1;
                if holds(&mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            if holds(&lo) {
                lo
            } else {
                hi
            }
        }
        Exponent::Approx(e) => {
            let est = scale.to_f64().unwrap_or(f64::MAX)
                * x.to_f64().unwrap_or(f64::MAX).powf(*e);
            let nudged = (est * (1.0 + 1e-12)).ceil();
            Nat::from_f64(nudged).unwrap_or_default()
        }
    }
}

/// Ceiling division `⌈a / b⌉` on naturals, `b > 0`.
pub fn ceil_div(a: &Nat, b: &Nat) -> Nat {
    let (q, r) = a.div_rem(b);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

/// Tolerance-aware inequality `lhs ≤ rhs`, relative against the larger
/// magnitude with an absolute floor of 10⁻¹⁵.
pub fn leq_with_tol(lhs: f64, rhs: f64, tol: f64) -> bool {
    lhs <= rhs + tol * lhs.abs().max(rhs.abs()) + 1e-15
}
