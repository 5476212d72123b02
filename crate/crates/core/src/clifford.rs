//! Clifford algebra `Cl(n)` with generators satisfying `e_i e_j + e_j e_i = -2 δ_ij`,
//! its complexification, and the paravector (hypercomplex number) subspace.
//!
//! Elements are stored densely: coefficient `k` belongs to the basis blade whose
//! generator set is the bitmask `k` (bit `i-1` set iff `e_i` occurs). Coefficients
//! are complex so the same type covers `Cl(n)` and `Cl_C(n)`.
//!
//! Every hypercomplex power, Gamma value and binomial coefficient of a fixed
//! exponent lives in the commuting subalgebra `span{1, u}` where `u` is the
//! unit direction of the exponent's vector part. [`SubalgebraValue`] is the
//! arithmetic of that subalgebra; [`SpanElement`] pairs it with `u`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_DIMENSION: usize = 5;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Sign and index of `e_A e_B` for every pair of blades in `Cl(n)`.
struct ProductTable {
    size: usize,
    signs: Vec<f64>,
}

impl ProductTable {
    fn build(dim: usize) -> Self {
        let size = 1usize << dim;
        let mut signs = Vec::with_capacity(size * size);
        for a in 0..size {
            for b in 0..size {
                signs.push(blade_product_sign(a, b));
            }
        }
        Self { size, signs }
    }

    #[inline]
    fn sign(&self, a: usize, b: usize) -> f64 {
        self.signs[a * self.size + b]
    }
}

/// Sign of `e_A e_B = ± e_{A xor B}`: one factor -1 per transposition needed
/// to sort the generators, and one per generator occurring in both blades.
fn blade_product_sign(a: usize, b: usize) -> f64 {
    let mut swaps = 0u32;
    let mut shifted = a >> 1;
    while shifted != 0 {
        swaps += (shifted & b).count_ones();
        shifted >>= 1;
    }
    swaps += (a & b).count_ones();
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn product_table(dim: usize) -> &'static ProductTable {
    static TABLES: [OnceLock<ProductTable>; MAX_DIMENSION + 1] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    TABLES[dim].get_or_init(|| ProductTable::build(dim))
}

fn check_dimension(dim: usize) -> Result<()> {
    if (1..=MAX_DIMENSION).contains(&dim) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

/// Element of the (complexified) Clifford algebra `Cl(n)`, `1 <= n <= 5`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordElement {
    dim: usize,
    coeffs: Vec<Complex64>,
}

impl CliffordElement {
    pub fn new(dim: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        check_dimension(dim)?;
        if coeffs.len() != 1 << dim {
            return Err(Error::Format(format!(
                "Cl({dim}) needs {} coefficients, got {}",
                1 << dim,
                coeffs.len()
            )));
        }
        Ok(Self { dim, coeffs })
    }

    pub fn from_real(dim: usize, coeffs: &[f64]) -> Result<Self> {
        Self::new(dim, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(dim: usize) -> Result<Self> {
        check_dimension(dim)?;
        Ok(Self {
            dim,
            coeffs: vec![ZERO; 1 << dim],
        })
    }

    pub fn scalar(dim: usize, value: Complex64) -> Result<Self> {
        let mut x = Self::zero(dim)?;
        x.coeffs[0] = value;
        Ok(x)
    }

    pub fn one(dim: usize) -> Result<Self> {
        Self::scalar(dim, ONE)
    }

    /// Basis blade `e_A` for the generator bitmask `mask`.
    pub fn blade(dim: usize, mask: usize) -> Result<Self> {
        let mut x = Self::zero(dim)?;
        if mask >= 1 << dim {
            return Err(Error::Domain(format!("blade mask {mask} outside Cl({dim})")));
        }
        x.coeffs[mask] = ONE;
        Ok(x)
    }

    /// Generator `e_i`, `1 <= i <= n`.
    pub fn generator(dim: usize, i: usize) -> Result<Self> {
        if i == 0 || i > dim {
            return Err(Error::Domain(format!("generator e_{i} outside Cl({dim})")));
        }
        Self::blade(dim, 1 << (i - 1))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: usize) -> Complex64 {
        self.coeffs[mask]
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }

    /// Clifford product.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let table = product_table(self.dim);
        let mut out = vec![ZERO; self.coeffs.len()];
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca == ZERO {
                continue;
            }
            for (b, &cb) in other.coeffs.iter().enumerate() {
                if cb == ZERO {
                    continue;
                }
                out[a ^ b] += ca * cb * table.sign(a, b);
            }
        }
        Ok(Self {
            dim: self.dim,
            coeffs: out,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|&c| c * factor).collect(),
        }
    }

    /// Clifford conjugation: reverses blade order and negates every generator,
    /// extended linearly.
    pub fn conjugate(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(mask, &c)| {
                let grade = mask.count_ones() as usize;
                let reversal = (grade * grade.saturating_sub(1) / 2) % 2;
                if (grade + reversal) % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .collect();
        Self {
            dim: self.dim,
            coeffs,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Clifford norm `sqrt(Σ_A |x_A|²)`.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Exponential series with scaling and squaring.
    pub fn exp(&self) -> Self {
        let nrm = self.norm();
        let squarings = if nrm > 0.5 {
            (nrm / 0.5).log2().ceil() as u32
        } else {
            0
        };
        let y = self.scale(Complex64::new(0.5f64.powi(squarings as i32), 0.0));
        let mut sum = Self::one(self.dim).expect("dimension already validated");
        let mut term = sum.clone();
        for k in 1..60 {
            term = term
                .multiply(&y)
                .expect("same dimension")
                .scale(Complex64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term).expect("same dimension");
            if term.norm() <= 1e-18 * sum.norm() {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum.multiply(&sum).expect("same dimension");
        }
        sum
    }

    /// Paravector part, if every coefficient of grade >= 2 is below `tol`.
    pub fn to_paravector(&self, tol: f64) -> Option<ComplexParavector> {
        let higher = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(m, _)| m.count_ones() >= 2)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max);
        if higher > tol {
            return None;
        }
        Some(ComplexParavector {
            s: self.coeffs[0],
            v: (0..self.dim).map(|i| self.coeffs[1 << i]).collect(),
        })
    }
}

impl fmt::Display for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (mask, c) in self.coeffs.iter().enumerate() {
            if *c == ZERO {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for i in 0..self.dim {
                if mask & (1 << i) != 0 {
                    write!(f, "e{}", i + 1)?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SerialScalar {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Serialize, Deserialize)]
struct SerialClifford {
    n: usize,
    coeffs: Vec<SerialScalar>,
}

impl Serialize for CliffordElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let real = self.is_real();
        SerialClifford {
            n: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| {
                    if real {
                        SerialScalar::Real(c.re)
                    } else {
                        SerialScalar::Complex([c.re, c.im])
                    }
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CliffordElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = SerialClifford::deserialize(deserializer)?;
        let coeffs = raw
            .coeffs
            .into_iter()
            .map(|c| match c {
                SerialScalar::Real(r) => Complex64::new(r, 0.0),
                SerialScalar::Complex([r, i]) => Complex64::new(r, i),
            })
            .collect();
        CliffordElement::new(raw.n, coeffs).map_err(serde::de::Error::custom)
    }
}

/// Real paravector `s + Σ v_i e_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Paravector {
    pub s: f64,
    pub v: Vec<f64>,
}

impl Paravector {
    pub fn new(s: f64, v: Vec<f64>) -> Result<Self> {
        check_dimension(v.len())?;
        Ok(Self { s, v })
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn vector_norm(&self) -> f64 {
        self.v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn norm(&self) -> f64 {
        (self.s * self.s + self.v.iter().map(|x| x * x).sum::<f64>()).sqrt()
    }

    pub fn conjugate(&self) -> Self {
        Self {
            s: self.s,
            v: self.v.iter().map(|x| -x).collect(),
        }
    }

    pub fn to_clifford(&self) -> CliffordElement {
        self.to_complex().to_clifford()
    }

    pub fn to_complex(&self) -> ComplexParavector {
        ComplexParavector {
            s: Complex64::new(self.s, 0.0),
            v: self.v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    /// Split into scalar part, vector modulus and unit direction.
    pub fn decompose(&self) -> HypercomplexExponent {
        let modulus = self.vector_norm();
        let direction = if modulus > 0.0 {
            Some(self.v.iter().map(|x| x / modulus).collect())
        } else {
            None
        };
        HypercomplexExponent {
            dim: self.dim(),
            x0: self.s,
            modulus,
            direction,
        }
    }
}

/// Complexified paravector `s + Σ v_i e_i` with complex components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexParavector {
    pub s: Complex64,
    pub v: Vec<Complex64>,
}

impl ComplexParavector {
    pub fn zero(dim: usize) -> Self {
        Self {
            s: ZERO,
            v: vec![ZERO; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn norm(&self) -> f64 {
        (self.s.norm_sqr() + self.v.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// `conj(s) - Σ conj(v_j) e_j`.
    pub fn conjugate(&self) -> Self {
        Self {
            s: self.s.conj(),
            v: self.v.iter().map(|c| -c.conj()).collect(),
        }
    }

    pub fn to_clifford(&self) -> CliffordElement {
        let dim = self.dim();
        let mut coeffs = vec![ZERO; 1 << dim];
        coeffs[0] = self.s;
        for (i, c) in self.v.iter().enumerate() {
            coeffs[1 << i] = *c;
        }
        CliffordElement { dim, coeffs }
    }

    /// All components as `[s, v_1, ..., v_n]`.
    pub fn components(&self) -> Vec<Complex64> {
        std::iter::once(self.s).chain(self.v.iter().copied()).collect()
    }

    pub fn from_components(c: &[Complex64]) -> Self {
        Self {
            s: c[0],
            v: c[1..].to_vec(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            s: self.s - other.s,
            v: self.v.iter().zip(&other.v).map(|(a, b)| a - b).collect(),
        }
    }

    /// Image under the algebra homomorphism `span_C{1, u} -> C`, `a + b u ↦ a + i b`.
    pub fn to_complex_along(&self, direction: &[f64]) -> Complex64 {
        let b: Complex64 = self.v.iter().zip(direction).map(|(c, d)| c * d).sum();
        self.s + Complex64::i() * b
    }
}

/// Decomposition `Υ = x0 + |v| u` of a real paravector.
#[derive(Debug, Clone, PartialEq)]
pub struct HypercomplexExponent {
    pub dim: usize,
    pub x0: f64,
    pub modulus: f64,
    /// Unit direction `u = v / |v|`, present iff `|v| > 0`.
    pub direction: Option<Vec<f64>>,
}

impl HypercomplexExponent {
    pub fn reconstruct(&self) -> Paravector {
        let v = match &self.direction {
            Some(u) => u.iter().map(|x| x * self.modulus).collect(),
            None => vec![0.0; self.dim],
        };
        Paravector { s: self.x0, v }
    }

    /// The exponent as an element of its own commuting subalgebra.
    pub fn as_subalgebra(&self) -> SubalgebraValue {
        SubalgebraValue::new(
            Complex64::new(self.x0, 0.0),
            Complex64::new(self.modulus, 0.0),
        )
    }

    /// Image of the exponent under `u ↦ i`: the complex order `x0 + i|v|`.
    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.x0, self.modulus)
    }

    pub fn span(&self, value: SubalgebraValue) -> SpanElement {
        SpanElement {
            dim: self.dim,
            direction: self.direction.clone(),
            value,
        }
    }

    /// `z^Υ = z^{x0} (cos(|v| log z) + u sin(|v| log z))`, principal log,
    /// with `0^Υ = 0`. No domain checks.
    pub(crate) fn power_of(&self, z: Complex64) -> SubalgebraValue {
        if z == ZERO {
            return SubalgebraValue::zero();
        }
        if z.im == 0.0 && z.re > 0.0 {
            let scale = z.re.powf(self.x0);
            if self.modulus == 0.0 {
                return SubalgebraValue::from_complex(Complex64::new(scale, 0.0));
            }
            let t = self.modulus * z.re.ln();
            return SubalgebraValue::new(
                Complex64::new(scale * t.cos(), 0.0),
                Complex64::new(scale * t.sin(), 0.0),
            );
        }
        let log = z.ln();
        let scale = (log * self.x0).exp();
        if self.modulus == 0.0 {
            return SubalgebraValue::from_complex(scale);
        }
        let t = log * self.modulus;
        SubalgebraValue::new(scale * t.cos(), scale * t.sin())
    }
}

/// Element `one + unit·u` of `span_C{1, u}` with `u² = -1`.
///
/// The subalgebra is commutative; it is isomorphic to the bicomplex numbers,
/// so it has zero divisors (`a² + b² = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SubalgebraValue {
    pub one: Complex64,
    pub unit: Complex64,
}

impl SubalgebraValue {
    pub const fn new(one: Complex64, unit: Complex64) -> Self {
        Self { one, unit }
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO)
    }

    pub const fn from_complex(c: Complex64) -> Self {
        Self::new(c, ZERO)
    }

    pub fn from_real(one: f64, unit: f64) -> Self {
        Self::new(Complex64::new(one, 0.0), Complex64::new(unit, 0.0))
    }

    /// `(a + bu)(a - bu) = a² + b²`.
    pub fn quadratic_form(&self) -> Complex64 {
        self.one * self.one + self.unit * self.unit
    }

    pub fn inverse(&self) -> Option<Self> {
        let q = self.quadratic_form();
        if q == ZERO {
            None
        } else {
            Some(Self::new(self.one / q, -self.unit / q))
        }
    }

    pub fn norm(&self) -> f64 {
        (self.one.norm_sqr() + self.unit.norm_sqr()).sqrt()
    }

    /// `exp(a + bu) = e^a (cos b + u sin b)`.
    pub fn exp(&self) -> Self {
        let ea = self.one.exp();
        Self::new(ea * self.unit.cos(), ea * self.unit.sin())
    }

    /// Image under `u ↦ i`.
    pub fn to_complex(&self) -> Complex64 {
        self.one + Complex64::i() * self.unit
    }

    /// Image under `u ↦ -i`.
    pub fn to_complex_conjugate_direction(&self) -> Complex64 {
        self.one - Complex64::i() * self.unit
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.one * c, self.unit * c)
    }
}

impl Add for SubalgebraValue {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.one + rhs.one, self.unit + rhs.unit)
    }
}

impl Sub for SubalgebraValue {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.one - rhs.one, self.unit - rhs.unit)
    }
}

impl Neg for SubalgebraValue {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.one, -self.unit)
    }
}

impl Mul for SubalgebraValue {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.one * rhs.one - self.unit * rhs.unit,
            self.one * rhs.unit + self.unit * rhs.one,
        )
    }
}

impl Mul<f64> for SubalgebraValue {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.one * rhs, self.unit * rhs)
    }
}

impl Div<f64> for SubalgebraValue {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        Self::new(self.one / rhs, self.unit / rhs)
    }
}

/// A subalgebra value together with the direction `u` it refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanElement {
    pub dim: usize,
    pub direction: Option<Vec<f64>>,
    pub value: SubalgebraValue,
}

impl SpanElement {
    pub fn to_paravector(&self) -> ComplexParavector {
        let v = match &self.direction {
            Some(u) => u.iter().map(|d| self.value.unit * *d).collect(),
            None => vec![ZERO; self.dim],
        };
        ComplexParavector {
            s: self.value.one,
            v,
        }
    }

    pub fn norm(&self) -> f64 {
        if self.direction.is_some() {
            self.value.norm()
        } else {
            self.value.one.norm()
        }
    }
}

/// Hypercomplex power `z^Υ` of a complex base with the principal logarithm.
pub fn hc_power(z: Complex64, upsilon: &Paravector) -> Result<ComplexParavector> {
    let exponent = upsilon.decompose();
    if z == ZERO {
        if exponent.x0 > 0.0 {
            return Ok(ComplexParavector::zero(upsilon.dim()));
        }
        return Err(Error::Domain(format!(
            "0^Υ undefined for scalar part {} <= 0",
            exponent.x0
        )));
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(Error::Branch(format!(
            "base {} lies on the negative real axis",
            z.re
        )));
    }
    Ok(exponent.span(exponent.power_of(z)).to_paravector())
}

/// Hypercomplex exponential by series summation in the Clifford algebra.
pub fn hc_exp(upsilon: &ComplexParavector) -> ComplexParavector {
    upsilon
        .to_clifford()
        .exp()
        .to_paravector(f64::INFINITY)
        .expect("infinite tolerance always yields a paravector")
}
