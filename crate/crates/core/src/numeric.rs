//! Small numerical helpers shared across modules.

use num_complex::Complex64;

/// Neumaier-compensated accumulator for real sums.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Compensated accumulator for complex sums (componentwise Neumaier).
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl CompensatedComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Principal power `w^z` with `0^z = 0` (callers guarantee `re z > 0`).
pub(crate) fn cpow(w: Complex64, z: Complex64) -> Complex64 {
    if w == Complex64::new(0.0, 0.0) {
        Complex64::new(0.0, 0.0)
    } else {
        (z * w.ln()).exp()
    }
}

/// Truncated power `x_+^p` for complex exponent with `re p > 0`, and the
/// left-closed step for `p = 0`.
pub(crate) fn truncated_power(x: f64, p: Complex64) -> Complex64 {
    if p == Complex64::new(0.0, 0.0) {
        return if x >= 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    if x <= 0.0 {
        Complex64::new(0.0, 0.0)
    } else if p.im == 0.0 {
        Complex64::new(x.powf(p.re), 0.0)
    } else {
        (p * x.ln()).exp()
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Log-spaced points on `[lo, hi]`.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
