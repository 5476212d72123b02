//! Gamma function for complex and hypercomplex arguments, generalized binomial
//! coefficients, the binomial series and the truncated-power kernels `K_z`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::clifford::{ComplexParavector, Paravector, SpanElement, SubalgebraValue};
use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Hypercomplex Gamma values live in the span of `1` and the argument's direction.
pub type GammaValue = SpanElement;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// `ln Γ(z)` for `re z >= 0.5` by the Lanczos approximation.
fn ln_gamma_lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// `ln Γ(z)`. The real part is exact up to rounding; the imaginary part is
/// determined only modulo `2π` in the reflected half-plane.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole(z.re));
    }
    if z.re < 0.5 {
        let s = (z * PI).sin();
        Ok(Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_lanczos(1.0 - z))
    } else {
        Ok(ln_gamma_lanczos(z))
    }
}

/// Euler Gamma function.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole(z.re));
    }
    if z.im == 0.0 && z.re == z.re.round() && z.re <= 171.0 {
        let mut f = 1.0;
        for k in 2..(z.re as u32) {
            f *= k as f64;
        }
        return Ok(Complex64::new(f, 0.0));
    }
    if z.re < 0.5 {
        let s = (z * PI).sin();
        Ok(PI / (s * ln_gamma_lanczos(1.0 - z).exp()))
    } else {
        Ok(ln_gamma_lanczos(z).exp())
    }
}

/// `Γ(Υ) = Re Γ(x0 + i|v|) + u Im Γ(x0 + i|v|)` for `x0 > 0`.
pub fn gamma_hc(upsilon: &Paravector) -> Result<GammaValue> {
    let e = upsilon.decompose();
    if e.x0 <= 0.0 {
        return Err(Error::Domain(format!(
            "hypercomplex Gamma needs positive scalar part, got {}",
            e.x0
        )));
    }
    let g = gamma(e.as_complex())?;
    Ok(e.span(SubalgebraValue::from_real(g.re, g.im)))
}

/// `binom(z, k)` for `k = 0..=max_k` by the multiplicative recurrence.
pub fn binom_complex_sequence(z: Complex64, max_k: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(max_k + 1);
    let mut b = Complex64::new(1.0, 0.0);
    out.push(b);
    for k in 1..=max_k {
        b = b * (z - (k - 1) as f64) / k as f64;
        out.push(b);
    }
    out
}

/// Generalized binomial coefficient `binom(z, k)`; exactly zero for integer
/// `z = n >= 0` and `k > n`.
pub fn binom_complex(z: Complex64, k: usize) -> Complex64 {
    if z.im == 0.0 && z.re >= 0.0 && z.re == z.re.round() && k as f64 > z.re {
        return Complex64::new(0.0, 0.0);
    }
    binom_complex_sequence(z, k)[k]
}

/// `binom(Υ, k)` for `k = 0..=max_k` in the subalgebra of `Υ`.
pub fn binom_hc_sequence(upsilon: &Paravector, max_k: usize) -> Vec<SubalgebraValue> {
    let e = upsilon.decompose();
    let ups = e.as_subalgebra();
    let mut out = Vec::with_capacity(max_k + 1);
    let mut b = SubalgebraValue::identity();
    out.push(b);
    for k in 1..=max_k {
        let factor = ups - SubalgebraValue::from_real((k - 1) as f64, 0.0);
        b = b * factor / k as f64;
        out.push(b);
    }
    out
}

/// Hypercomplex binomial coefficient `binom(Υ, k) = Γ(Υ+1) / (k! Γ(Υ-k+1))`,
/// realized through `binom(Υ, k) = binom(Υ, k-1) (Υ-k+1) / k`.
pub fn binom_hc(upsilon: &Paravector, k: usize) -> GammaValue {
    let e = upsilon.decompose();
    let mut value = binom_hc_sequence(upsilon, k)[k];
    if e.direction.is_none() && e.x0 >= 0.0 && e.x0 == e.x0.round() && k as f64 > e.x0 {
        value = SubalgebraValue::zero();
    }
    e.span(value)
}

/// Upper estimate of `Σ_{n > from} t_n` for terms decaying like `n^{-(1+order)}`:
/// explicit summation to `4·from + 1000` plus an integral bound beyond.
pub(crate) fn series_tail(term: impl Fn(usize) -> f64, from: usize, order: f64) -> f64 {
    let last = 4 * from + 1000;
    let mut sum = 0.0;
    for n in from + 1..=last {
        sum += term(n);
    }
    if order > 0.0 {
        sum += term(last) * last as f64 / order;
    }
    sum
}

/// Partial sum `Σ_{n<=N} binom(Υ, n) z^n` of the binomial series of `(1+z)^Υ`
/// and an estimate of the neglected `Σ_{n>N} |binom(Υ, n)| |z|^n`.
pub fn binomial_series(
    upsilon: &Paravector,
    z: Complex64,
    truncation: usize,
) -> Result<(ComplexParavector, f64)> {
    let e = upsilon.decompose();
    if z.norm() > 1.0 {
        return Err(Error::Domain(format!(
            "binomial series needs |z| <= 1, got {}",
            z.norm()
        )));
    }
    if e.x0 <= 0.0 {
        return Err(Error::Domain(format!(
            "binomial series needs positive scalar part, got {}",
            e.x0
        )));
    }
    let last = 4 * truncation + 1000;
    let coeffs = binom_hc_sequence(upsilon, last);
    let mut acc = SubalgebraValue::zero();
    let mut power = Complex64::new(1.0, 0.0);
    for b in &coeffs[..=truncation] {
        acc = acc + b.scale(power);
        power *= z;
    }
    let r = z.norm();
    let remainder = series_tail(|n| coeffs[n].norm() * r.powi(n as i32), truncation, e.x0);
    Ok((e.span(acc).to_paravector(), remainder))
}

/// Kernel `K_z(x - shift) = (x - shift)_+^{z-1} / Γ(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub order: Complex64,
    pub shift: f64,
}

impl KernelSpec {
    pub fn new(order: Complex64) -> Self {
        Self { order, shift: 0.0 }
    }

    pub fn shifted(order: Complex64, shift: f64) -> Self {
        Self { order, shift }
    }
}

/// Pointwise value of `K_z`; `K_z(0) = 0` except `K_1(0) = 1`.
pub fn kernel_eval(spec: &KernelSpec, x: f64) -> Result<Complex64> {
    let z = spec.order;
    if z.re <= 0.0 {
        return Err(Error::Domain(format!(
            "K_z is a pseudo-function for re z = {} <= 0",
            z.re
        )));
    }
    let y = x - spec.shift;
    let one = Complex64::new(1.0, 0.0);
    if y < 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if y == 0.0 {
        return Ok(if z == one { one } else { Complex64::new(0.0, 0.0) });
    }
    Ok(((z - 1.0) * y.ln()).exp() / gamma(z)?)
}
