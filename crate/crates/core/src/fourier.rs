//! Fourier-domain evaluators for every spline family and a certified
//! inverse-transform quadrature.
//!
//! Convention: `F f(ω) = ∫ f(x) e^{-iωx} dx`, inverse `(1/2π) ∫ F(ω) e^{iωx} dω`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{ComplexParavector, Paravector};
use crate::error::{Error, Result};
use crate::numeric::{cpow, fit_slope, log_space};
use crate::splines::{ExponentialWeights, SplineFamily};

/// Radius below which `(1 - e^{-w}) / w` is summed as a Taylor series.
pub const SERIES_RADIUS: f64 = 1e-2;
const SERIES_TERMS: usize = 12;

/// Symmetric frequency grid `ω_j = -ω_max + j·step`, `count` odd.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub omega_max: f64,
    pub count: usize,
    /// Points with `|ω| < exclusion_radius` are dropped by the verifiers.
    #[serde(default)]
    pub exclusion_radius: f64,
    /// Optional band `lo <= ω <= hi` that the verifiers restrict to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<(f64, f64)>,
}

impl FrequencyGrid {
    pub fn new(omega_max: f64, count: usize) -> Result<Self> {
        if !(omega_max > 0.0 && omega_max.is_finite()) {
            return Err(Error::Grid(format!("ω_max must be positive, got {omega_max}")));
        }
        if count < 3 || count % 2 == 0 {
            return Err(Error::Grid(format!("grid count must be odd and >= 3, got {count}")));
        }
        Ok(Self {
            omega_max,
            count,
            exclusion_radius: 0.0,
            band: None,
        })
    }

    pub fn with_exclusion(mut self, radius: f64) -> Self {
        self.exclusion_radius = radius;
        self
    }

    pub fn with_band(mut self, lo: f64, hi: f64) -> Self {
        self.band = Some((lo, hi));
        self
    }

    pub fn step(&self) -> f64 {
        2.0 * self.omega_max / (self.count - 1) as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        // symmetric construction keeps ω_j = -ω_{count-1-j} exactly
        let half = (self.count - 1) / 2;
        if j >= half {
            (j - half) as f64 * self.step()
        } else {
            -((half - j) as f64 * self.step())
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|j| self.point(j)).collect()
    }

    /// Grid points that survive the exclusion radius and the band filter.
    pub fn selected_points(&self) -> Vec<f64> {
        self.points()
            .into_iter()
            .filter(|w| w.abs() >= self.exclusion_radius)
            .filter(|w| match self.band {
                Some((lo, hi)) => *w >= lo && *w <= hi,
                None => true,
            })
            .collect()
    }
}

/// A transform value at one frequency; `components` is `[s, v_1, ..., v_n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformValue {
    pub omega: f64,
    pub components: Vec<Complex64>,
}

/// `(1 - e^{-(a+iω)}) / (a+iω)`, with the removable singularity at `a + iω = 0`.
fn phi(a: f64, omega: f64) -> Complex64 {
    let w = Complex64::new(a, omega);
    if w.norm() <= SERIES_RADIUS {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 0..SERIES_TERMS {
            sum += term;
            term *= -w / (k + 2) as f64;
        }
        return sum;
    }
    let ea = (-a).exp();
    let s = (0.5 * omega).sin();
    // 1 - e^{-a} cos ω written without cancellation near a = 0, ω = 2πk
    let numerator = Complex64::new(-(-a).exp_m1() + ea * 2.0 * s * s, ea * omega.sin());
    numerator / w
}

/// `Ω(ω) = (1 - e^{-iω}) / (iω)`, `Ω(0) = 1`.
pub fn omega_fn(omega: f64) -> Complex64 {
    phi(0.0, omega)
}

/// `Ω_a(ω) = (1 - e^{-a} e^{-iω}) / (iω + a)`. At `a = ω = 0` the removable
/// singularity is filled with its limit `1`, i.e. `Ω(0)`.
pub fn omega_a_fn(a: f64, omega: f64) -> Complex64 {
    phi(a, omega)
}

/// Principal logarithm of `Ω(ω)`.
pub fn log_omega(omega: f64) -> Complex64 {
    omega_fn(omega).ln()
}

fn check_order(z: Complex64) -> Result<()> {
    if z.re > 1.0 {
        Ok(())
    } else {
        Err(Error::Order(format!("transform needs re z > 1, got {}", z.re)))
    }
}

/// `B̂_z(ω) = Ω(ω)^z`, principal branch.
pub fn hat_bz(z: Complex64, omega: f64) -> Result<Complex64> {
    check_order(z)?;
    Ok(cpow(omega_fn(omega), z))
}

/// Classical `B̂_n(ω) = Ω(ω)^n`.
pub fn hat_bn(n: u32, omega: f64) -> Complex64 {
    omega_fn(omega).powu(n)
}

/// Transform of `E_{n,a} = ε^{a_1} * ... * ε^{a_n}` in the convolution
/// convention of [`crate::splines::eval_exp_bspline`]:
/// `F(ε^{a}) = Ω_{-a}`, so the product runs over the negated weights.
pub fn hat_en(weights: &ExponentialWeights, omega: f64) -> Complex64 {
    weights
        .as_slice()
        .iter()
        .map(|&a| omega_a_fn(-a, omega))
        .product()
}

/// `Ê_z^a(ω) = Ω_a(ω)^z` for `a > 0`.
pub fn hat_ez(a: f64, z: Complex64, omega: f64) -> Result<Complex64> {
    if a <= 0.0 {
        return Err(Error::Parameter(format!(
            "E_z^a is well-defined only for a > 0, got a = {a}"
        )));
    }
    check_order(z)?;
    Ok(cpow(omega_a_fn(a, omega), z))
}

/// `B̂_Υ(ω) = Ω(ω)^Υ`.
pub fn hat_bupsilon(upsilon: &Paravector, omega: f64) -> Result<ComplexParavector> {
    if upsilon.s <= 1.0 {
        return Err(Error::Order(format!(
            "hypercomplex B-splines need Sc Υ > 1, got {}",
            upsilon.s
        )));
    }
    let e = upsilon.decompose();
    // Ω never meets the negative real axis, so the unchecked power is safe;
    // rounding can only place tiny values near the cut at the zeros 2πk.
    Ok(e.span(e.power_of(omega_fn(omega))).to_paravector())
}

impl SplineFamily {
    /// Transform components `[s, v_1, ...]` at `ω`.
    pub fn transform(&self, omega: f64) -> Result<Vec<Complex64>> {
        Ok(match self {
            Self::Classical(n) => vec![hat_bn(*n, omega)],
            Self::Fractional(alpha) => vec![hat_bz(Complex64::new(*alpha, 0.0), omega)?],
            Self::Complex(z) => vec![hat_bz(*z, omega)?],
            Self::Exponential(w) => vec![hat_en(w, omega)],
            Self::ComplexExponential { a, z } => vec![hat_ez(*a, *z, omega)?],
            Self::Hypercomplex(ups) => hat_bupsilon(ups, omega)?.components(),
        })
    }

    /// Exponent `s` of the transform decay `O(|ω|^{-s})`.
    pub fn decay_order(&self) -> f64 {
        match self {
            Self::Classical(n) => *n as f64,
            Self::Fractional(alpha) => *alpha,
            Self::Complex(z) => z.re,
            Self::Exponential(w) => w.len() as f64,
            Self::ComplexExponential { z, .. } => z.re,
            Self::Hypercomplex(ups) => ups.s,
        }
    }

    /// Transform values on every grid point, in grid order.
    pub fn transform_grid(&self, grid: &FrequencyGrid) -> Result<Vec<TransformValue>> {
        self.validate()?;
        grid.points()
            .into_par_iter()
            .map(|omega| {
                Ok(TransformValue {
                    omega,
                    components: self.transform(omega)?,
                })
            })
            .collect()
    }
}

/// Result of an inverse transform at one abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseValue {
    pub x: f64,
    pub components: Vec<Complex64>,
    /// Discretization error estimate of the composite Simpson rule.
    pub discretization_error: f64,
    /// Analytic bound for `|ω| > ω_max`.
    pub tail_bound: f64,
}

impl InverseValue {
    pub fn error(&self) -> f64 {
        self.discretization_error + self.tail_bound
    }
}

/// Sampled transform ready for repeated inversion at different `x`.
pub struct InverseQuadrature {
    grid: FrequencyGrid,
    decay_order: f64,
    omegas: Vec<f64>,
    samples: Vec<Vec<Complex64>>,
    tail_left: f64,
    tail_right: f64,
}

/// Largest `step·|x|` accepted; beyond it `e^{iωx}` is under-resolved.
const MAX_PHASE_STEP: f64 = 0.5;

impl InverseQuadrature {
    /// Samples `transform` on `grid`. `decay_order` is the exponent `s > 1` with
    /// `|F(ω)| = O(|ω|^{-s})`.
    pub fn new<F>(transform: F, grid: &FrequencyGrid, decay_order: f64) -> Result<Self>
    where
        F: Fn(f64) -> Result<Vec<Complex64>> + Sync,
    {
        if decay_order <= 1.0 {
            return Err(Error::Order(format!(
                "inverse quadrature needs decay order > 1, got {decay_order}"
            )));
        }
        if (grid.count - 1) % 4 != 0 {
            return Err(Error::Grid(format!(
                "inverse quadrature needs count = 4m + 1 for the error estimate, got {}",
                grid.count
            )));
        }
        let omegas = grid.points();
        let samples = omegas
            .par_iter()
            .map(|&w| transform(w))
            .collect::<Result<Vec<_>>>()?;
        let mut q = Self {
            grid: grid.clone(),
            decay_order,
            omegas,
            samples,
            tail_left: 0.0,
            tail_right: 0.0,
        };
        q.tail_left = q.tail_side(false);
        q.tail_right = q.tail_side(true);
        Ok(q)
    }

    /// Tail bound for one side. With `g(ω) = |F(ω)| |ω|^s` (asymptotically
    /// 2π-periodic) and `ḡ` its mean over the outer whole periods,
    /// `∫_W^∞ |F| <= ḡ (2π W^{-s} + W^{1-s}/(s-1))`.
    fn tail_side(&self, right: bool) -> f64 {
        let w = self.grid.omega_max;
        let s = self.decay_order;
        let periods = ((0.9 * w) / (2.0 * PI)).floor().max(1.0);
        let lo = w - periods * 2.0 * PI;
        let mut acc = 0.0;
        let mut count = 0usize;
        for (omega, vals) in self.omegas.iter().zip(&self.samples) {
            let a = if right { *omega } else { -*omega };
            if a > lo && a <= w {
                let magnitude = vals.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                acc += magnitude * a.powf(s);
                count += 1;
            }
        }
        let mean = if count > 0 { acc / count as f64 } else { 0.0 };
        mean * (2.0 * PI * w.powf(-s) + w.powf(1.0 - s) / (s - 1.0)) / (2.0 * PI)
    }

    fn simpson(&self, x: f64, stride: usize) -> Vec<Complex64> {
        let dim = self.samples[0].len();
        let h = self.grid.step() * stride as f64;
        let n = (self.omegas.len() - 1) / stride;
        let mut acc = vec![Complex64::new(0.0, 0.0); dim];
        for j in 0..=n {
            let idx = j * stride;
            let weight = if j == 0 || j == n {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let phase = Complex64::new(0.0, self.omegas[idx] * x).exp() * weight;
            for (a, v) in acc.iter_mut().zip(&self.samples[idx]) {
                *a += v * phase;
            }
        }
        acc.iter().map(|a| a * (h / 3.0) / (2.0 * PI)).collect()
    }

    /// Inverse transform at `x` with its certified error.
    pub fn eval(&self, x: f64) -> Result<InverseValue> {
        if self.grid.step() * x.abs() > MAX_PHASE_STEP {
            return Err(Error::Resolution(format!(
                "step {} too coarse for x = {x}",
                self.grid.step()
            )));
        }
        let fine = self.simpson(x, 1);
        let coarse = self.simpson(x, 2);
        let diff = fine
            .iter()
            .zip(&coarse)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        // near the zeros 2πk the transforms behave like |ω - 2πk|^s, which
        // limits the Simpson rate to min(4, s + 1)
        let rate = (self.decay_order + 1.0).min(4.0);
        Ok(InverseValue {
            x,
            components: fine,
            discretization_error: diff / (2f64.powf(rate) - 1.0),
            tail_bound: self.tail_left + self.tail_right,
        })
    }

    /// Like [`eval`](Self::eval) but fails when the certified error exceeds `tol`.
    pub fn eval_within(&self, x: f64, tol: f64) -> Result<InverseValue> {
        let v = self.eval(x)?;
        if v.error() > tol {
            return Err(Error::Resolution(format!(
                "certified error {:.3e} exceeds tolerance {tol:.3e} at x = {x}",
                v.error()
            )));
        }
        Ok(v)
    }
}

/// One-shot inverse transform of a scalar transform at `x`.
pub fn inverse_quadrature<F>(
    transform: F,
    x: f64,
    grid: &FrequencyGrid,
    decay_order: f64,
) -> Result<InverseValue>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    InverseQuadrature::new(|w| Ok(vec![transform(w)?]), grid, decay_order)?.eval(x)
}

/// Log-log slope of the envelope of `|F|` on `[lo, hi]`; the envelope at `ω`
/// is the maximum over one period `[ω, ω + 2π]`.
pub fn fit_decay_slope(magnitude: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> f64 {
    let centres = log_space(lo, hi, points);
    let lx: Vec<f64> = centres.iter().map(|w| w.ln()).collect();
    let ly: Vec<f64> = centres
        .iter()
        .map(|&w| {
            (0..64)
                .map(|j| magnitude(w + 2.0 * PI * j as f64 / 64.0))
                .fold(0.0, f64::max)
                .ln()
        })
        .collect();
    fit_slope(&lx, &ly)
}
