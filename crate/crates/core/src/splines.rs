//! Time-domain evaluation of cardinal B-splines of integral, real, complex and
//! hypercomplex order, exponential B-splines and complex exponential B-splines.
//!
//! All families are supported on `[0, ∞)`. The series representations are
//! finite at every `x` because `(x - k)_+` vanishes for `k > x`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::clifford::{ComplexParavector, Paravector, SubalgebraValue};
use crate::error::{Error, Result};
use crate::numeric::{truncated_power, CompensatedComplexSum, CompensatedSum};
use crate::quad::adaptive_with_error;
use crate::specialfn::{binom_complex_sequence, binom_hc_sequence, gamma};

/// Order of a cardinal B-spline; the real part must exceed 1 except for integers.
#[derive(Debug, Clone, PartialEq)]
pub enum SplineOrder {
    Integer(u32),
    Real(f64),
    Complex(Complex64),
    Hypercomplex(Paravector),
}

impl SplineOrder {
    pub fn integer(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Order("B_n needs n >= 1".into()));
        }
        Ok(Self::Integer(n))
    }

    pub fn real(alpha: f64) -> Result<Self> {
        check_complex_order(Complex64::new(alpha, 0.0))?;
        Ok(Self::Real(alpha))
    }

    pub fn complex(z: Complex64) -> Result<Self> {
        check_complex_order(z)?;
        Ok(Self::Complex(z))
    }

    pub fn hypercomplex(upsilon: Paravector) -> Result<Self> {
        check_hypercomplex_order(&upsilon)?;
        Ok(Self::Hypercomplex(upsilon))
    }

    pub fn eval(&self, x: f64) -> Result<SplineEvalResult> {
        match self {
            Self::Integer(n) => Ok(SplineEvalResult {
                x,
                value: SplineValue::Real(eval_bn(*n, x)?),
                terms_used: terms_for(x, Some(*n as usize)),
            }),
            Self::Real(alpha) => {
                let r = eval_bz_full(Complex64::new(*alpha, 0.0), x)?;
                Ok(SplineEvalResult {
                    x,
                    value: SplineValue::Real(r.0.re),
                    terms_used: r.1,
                })
            }
            Self::Complex(z) => {
                let r = eval_bz_full(*z, x)?;
                Ok(SplineEvalResult {
                    x,
                    value: SplineValue::Complex(r.0),
                    terms_used: r.1,
                })
            }
            Self::Hypercomplex(ups) => {
                let r = eval_bupsilon_full(ups, x)?;
                Ok(SplineEvalResult {
                    x,
                    value: SplineValue::Paravector(r.0),
                    terms_used: r.1,
                })
            }
        }
    }
}

fn check_complex_order(z: Complex64) -> Result<()> {
    if z.re > 1.0 {
        Ok(())
    } else {
        Err(Error::Order(format!(
            "complex B-splines need re z > 1, got re z = {}",
            z.re
        )))
    }
}

fn check_hypercomplex_order(upsilon: &Paravector) -> Result<()> {
    if upsilon.s > 1.0 {
        Ok(())
    } else {
        Err(Error::Order(format!(
            "hypercomplex B-splines need Sc Υ > 1, got {}",
            upsilon.s
        )))
    }
}

fn check_decay(a: f64) -> Result<()> {
    if a > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "E_z^a is well-defined only for a > 0, got a = {a}"
        )))
    }
}

/// Weights `(a_1, ..., a_n)` of the exponential B-spline `E_{n,a}`, at least one nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialWeights(Vec<f64>);

impl ExponentialWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Parameter("exponential B-spline needs n >= 1 weights".into()));
        }
        if weights.iter().all(|&a| a == 0.0) {
            return Err(Error::Parameter(
                "exponential B-spline needs a_i != 0 for at least one i".into(),
            ));
        }
        if weights.iter().any(|a| !a.is_finite()) {
            return Err(Error::Parameter("exponential weights must be finite".into()));
        }
        Ok(Self(weights))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Value of a spline: real, complex, or a complexified paravector.
#[derive(Debug, Clone, PartialEq)]
pub enum SplineValue {
    Real(f64),
    Complex(Complex64),
    Paravector(ComplexParavector),
}

impl SplineValue {
    /// Components `[s, v_1, ..., v_n]` as complex numbers.
    pub fn components(&self) -> Vec<Complex64> {
        match self {
            Self::Real(r) => vec![Complex64::new(*r, 0.0)],
            Self::Complex(c) => vec![*c],
            Self::Paravector(p) => p.components(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplineEvalResult {
    pub x: f64,
    pub value: SplineValue,
    pub terms_used: usize,
}

/// Number of series terms `k = 0..=⌊x⌋`, capped for terminating series.
fn terms_for(x: f64, cap: Option<usize>) -> usize {
    if x < 0.0 {
        return 0;
    }
    let n = x.floor() as usize + 1;
    match cap {
        Some(c) => n.min(c + 1),
        None => n,
    }
}

/// Classical cardinal B-spline
/// `B_n(x) = 1/(n-1)! Σ_{k=0}^{n} (-1)^k C(n,k) (x-k)_+^{n-1}`, zero outside `[0, n)`.
pub fn eval_bn(n: u32, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Order("B_n needs n >= 1".into()));
    }
    if !(0.0..n as f64).contains(&x) {
        return Ok(0.0);
    }
    let p = (n - 1) as i32;
    let kmax = (x.floor() as u32).min(n);
    let mut sum = CompensatedSum::new();
    let mut binom = 1.0;
    for k in 0..=kmax {
        let term = binom * (x - k as f64).powi(p);
        sum.add(if k % 2 == 0 { term } else { -term });
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    let factorial: f64 = (1..n).map(|k| k as f64).product();
    Ok(sum.value() / factorial)
}

fn eval_bz_full(z: Complex64, x: f64) -> Result<(Complex64, usize)> {
    check_complex_order(z)?;
    if x < 0.0 {
        return Ok((Complex64::new(0.0, 0.0), 0));
    }
    // integer order: B_n vanishes on [n, ∞), where the finite sum only cancels to rounding
    if z.im == 0.0 && z.re.fract() == 0.0 && x >= z.re {
        return Ok((Complex64::new(0.0, 0.0), 0));
    }
    let terms = terms_for(x, None);
    let binoms = binom_complex_sequence(z, terms - 1);
    let p = z - 1.0;
    let mut sum = CompensatedComplexSum::new();
    for (k, b) in binoms.iter().enumerate() {
        let term = b * truncated_power(x - k as f64, p);
        sum.add(if k % 2 == 0 { term } else { -term });
    }
    Ok((sum.value() / gamma(z)?, terms))
}

/// Complex B-spline `B_z(x) = 1/Γ(z) Σ_{k<=x} (-1)^k binom(z,k) (x-k)_+^{z-1}`.
pub fn eval_bz(z: Complex64, x: f64) -> Result<Complex64> {
    Ok(eval_bz_full(z, x)?.0)
}

/// Like [`eval_bz`] but also reports the number of series terms.
pub fn eval_bz_with_terms(z: Complex64, x: f64) -> Result<SplineEvalResult> {
    let (value, terms_used) = eval_bz_full(z, x)?;
    Ok(SplineEvalResult {
        x,
        value: SplineValue::Complex(value),
        terms_used,
    })
}

/// Complex exponential B-spline
/// `E_z^a(x) = 1/Γ(z) Σ_{ℓ<=x} binom(z,ℓ) (-1)^ℓ e^{-ℓa} e^{-a(x-ℓ)} (x-ℓ)_+^{z-1}`.
pub fn eval_ez(a: f64, z: Complex64, x: f64) -> Result<Complex64> {
    Ok(eval_ez_full(a, z, x)?.0)
}

fn eval_ez_full(a: f64, z: Complex64, x: f64) -> Result<(Complex64, usize)> {
    check_decay(a)?;
    check_complex_order(z)?;
    if x < 0.0 {
        return Ok((Complex64::new(0.0, 0.0), 0));
    }
    // integer order: B_n vanishes on [n, ∞), where the finite sum only cancels to rounding
    if z.im == 0.0 && z.re.fract() == 0.0 && x >= z.re {
        return Ok((Complex64::new(0.0, 0.0), 0));
    }
    let terms = terms_for(x, None);
    let binoms = binom_complex_sequence(z, terms - 1);
    let p = z - 1.0;
    let mut sum = CompensatedComplexSum::new();
    for (l, b) in binoms.iter().enumerate() {
        let shift = x - l as f64;
        let damping = (-(l as f64) * a).exp() * (-a * shift).exp();
        let term = b * truncated_power(shift, p) * damping;
        sum.add(if l % 2 == 0 { term } else { -term });
    }
    Ok((sum.value() / gamma(z)?, terms))
}

fn eval_bupsilon_full(upsilon: &Paravector, x: f64) -> Result<(ComplexParavector, usize)> {
    check_hypercomplex_order(upsilon)?;
    let e = upsilon.decompose();
    if x < 0.0 {
        return Ok((ComplexParavector::zero(upsilon.dim()), 0));
    }
    let g = gamma(e.as_complex())?;
    if g.norm() < 1e-300 {
        return Err(Error::Numeric(format!("Γ(Υ) = {g} too small to divide by")));
    }
    let inv_gamma = SubalgebraValue::from_real(g.re, g.im)
        .inverse()
        .ok_or_else(|| Error::Numeric("Γ(Υ) is a zero divisor".into()))?;
    let terms = terms_for(x, None);
    let binoms = binom_hc_sequence(upsilon, terms - 1);
    let mut shifted = e.clone();
    shifted.x0 -= 1.0;
    let mut one = CompensatedComplexSum::new();
    let mut unit = CompensatedComplexSum::new();
    for (k, b) in binoms.iter().enumerate() {
        let base = x - k as f64;
        if base <= 0.0 {
            continue;
        }
        let term = *b * shifted.power_of(Complex64::new(base, 0.0));
        let term = if k % 2 == 0 { term } else { -term };
        one.add(term.one);
        unit.add(term.unit);
    }
    let sum = SubalgebraValue::new(one.value(), unit.value()) * inv_gamma;
    Ok((e.span(sum).to_paravector(), terms))
}

/// Hypercomplex B-spline `B_Υ(x) = Γ(Υ)^{-1} Σ_{k<=x} (-1)^k binom(Υ,k) (x-k)_+^{Υ-1}`.
pub fn eval_bupsilon(upsilon: &Paravector, x: f64) -> Result<ComplexParavector> {
    Ok(eval_bupsilon_full(upsilon, x)?.0)
}

/// Exponential B-spline `E_{n,a} = ε^{a_1} * ... * ε^{a_n}` with
/// `ε^a(x) = e^{ax} χ_{[0,1)}(x)`, by recursive adaptive quadrature.
pub fn eval_exp_bspline(weights: &ExponentialWeights, x: f64) -> Result<f64> {
    let a = weights.as_slice();
    Ok(exp_bspline_recursive(a, x, 1e-10))
}

fn exp_bspline_recursive(a: &[f64], x: f64, tol: f64) -> f64 {
    let n = a.len();
    if x < 0.0 || x >= n as f64 {
        return 0.0;
    }
    if n == 1 {
        return (a[0] * x).exp();
    }
    let (inner, last) = a.split_at(n - 1);
    let ak = last[0];
    // E_n(x) = ∫_0^1 e^{a_n t} E_{n-1}(x - t) dt, the inner spline living on [0, n-1)
    let lo = (x - (n - 1) as f64).max(0.0);
    let hi = x.min(1.0);
    if hi <= lo {
        return 0.0;
    }
    let integrand = |t: f64| (ak * t).exp() * exp_bspline_recursive(inner, x - t, tol);
    // the inner spline has knots at integers: split where x - t crosses one
    let knot = x - x.floor();
    let mut total = 0.0;
    let mut pieces = vec![lo];
    if knot > lo && knot < hi {
        pieces.push(knot);
    }
    pieces.push(hi);
    for w in pieces.windows(2) {
        total += adaptive_with_error(&integrand, w[0], w[1], tol, 200).0;
    }
    total
}

/// Any spline family with its parameters, as selected on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum SplineFamily {
    Classical(u32),
    Fractional(f64),
    Complex(Complex64),
    Exponential(ExponentialWeights),
    ComplexExponential { a: f64, z: Complex64 },
    Hypercomplex(Paravector),
}

impl SplineFamily {
    /// Checks the parameter constraints of the family.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Classical(n) => SplineOrder::integer(*n).map(|_| ()),
            Self::Fractional(alpha) => check_complex_order(Complex64::new(*alpha, 0.0)),
            Self::Complex(z) => check_complex_order(*z),
            Self::Exponential(_) => Ok(()),
            Self::ComplexExponential { a, z } => {
                check_decay(*a)?;
                check_complex_order(*z)
            }
            Self::Hypercomplex(ups) => check_hypercomplex_order(ups),
        }
    }

    pub fn eval(&self, x: f64) -> Result<SplineEvalResult> {
        match self {
            Self::Classical(n) => SplineOrder::Integer(*n).eval(x),
            Self::Fractional(alpha) => SplineOrder::Real(*alpha).eval(x),
            Self::Complex(z) => SplineOrder::Complex(*z).eval(x),
            Self::Hypercomplex(ups) => SplineOrder::Hypercomplex(ups.clone()).eval(x),
            Self::Exponential(w) => Ok(SplineEvalResult {
                x,
                value: SplineValue::Real(eval_exp_bspline(w, x)?),
                terms_used: 0,
            }),
            Self::ComplexExponential { a, z } => {
                let (value, terms_used) = eval_ez_full(*a, *z, x)?;
                Ok(SplineEvalResult {
                    x,
                    value: SplineValue::Complex(value),
                    terms_used,
                })
            }
        }
    }

    /// Evaluates on every abscissa in parallel; output order follows `xs`.
    pub fn eval_grid(&self, xs: &[f64]) -> Result<Vec<SplineEvalResult>> {
        self.validate()?;
        xs.par_iter().map(|&x| self.eval(x)).collect()
    }

    /// Number of value components: 1 for scalar families, `n + 1` for `Cl(n)` paravectors.
    pub fn component_count(&self) -> usize {
        match self {
            Self::Hypercomplex(ups) => ups.dim() + 1,
            _ => 1,
        }
    }
}
