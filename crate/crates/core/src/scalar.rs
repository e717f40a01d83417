//! Scalar types used by the linear algebra.
//!
//! Two evaluation modes are supported: exact Gaussian rationals `a + bi` with
//! `a, b ∈ ℚ`, and double precision complex numbers. Edge weights are always
//! stored as exact positive rationals; the float mode converts on the way in.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Edge weight. Always an exact, strictly positive rational.
pub type Weight = BigRational;

/// Exact Gaussian rational.
pub type Exact = Complex<BigRational>;

/// Evaluation mode, chosen per computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(format!("unknown mode `{other}` (expected exact|float)")),
        }
    }
}

/// A real result in either mode.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Value::Float(x) => *x,
        }
    }

    /// Equality: exact when both sides are exact, else relative to `tol`.
    pub fn agrees(&self, other: &Value, tol: f64) -> bool {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
            }
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Exact(q) => f.write_str(&format_rational(q)),
            Value::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Relative tolerance for skew-symmetry checks on floating matrices.
pub const FLOAT_SKEW_TOL: f64 = 1e-12;

/// Field operations needed by elimination.
pub trait Field: Clone + Debug + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Approximate modulus, used for pivot selection only.
    fn magnitude(&self) -> f64;
    /// Zero test; floating types accept a residue relative to `scale`.
    fn near_zero(&self, _scale: f64) -> bool {
        self.is_zero()
    }
    /// `row[j] += si * tau[j] - ti * s[j]` for all `j`.
    fn rank2_update(row: &mut [Self], si: &Self, tau: &[Self], ti: &Self, s: &[Self]) {
        for ((r, t), x) in row.iter_mut().zip(tau).zip(s) {
            *r = r.add(&si.mul(t)).sub(&ti.mul(x));
        }
    }
}

/// A field containing the Gaussian integers, so that `i^ω` entries can be built.
pub trait GaussianField: Field {
    const IS_FLOAT: bool;
    fn from_f64_parts(re: f64, im: f64) -> Self;
    /// `|z|` as a real element of the field. Exact values must lie on the
    /// real or imaginary axis; otherwise `None`.
    fn axis_modulus(&self) -> Option<Self>;
    /// Real part as a scalar value.
    fn real_value(&self) -> Value;
    fn from_weight(w: &Weight) -> Self;
    /// `i^k` for `k` taken mod 4.
    fn i_pow(k: i64) -> Self;
    fn re_f64(&self) -> f64;
    fn im_f64(&self) -> f64;
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn near_zero(&self, scale: f64) -> bool {
        self.abs() <= FLOAT_SKEW_TOL * scale
    }
    fn rank2_update(row: &mut [f64], si: &f64, tau: &[f64], ti: &f64, s: &[f64]) {
        let (si, ti) = (*si, *ti);
        for ((r, t), x) in row.iter_mut().zip(tau).zip(s) {
            *r += si * t - ti * x;
        }
    }
}

impl Field for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn near_zero(&self, scale: f64) -> bool {
        self.norm() <= FLOAT_SKEW_TOL * scale
    }
}

impl GaussianField for Complex64 {
    const IS_FLOAT: bool = true;
    fn from_f64_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
    fn from_weight(w: &Weight) -> Self {
        Complex64::new(w.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
    fn axis_modulus(&self) -> Option<Self> {
        Some(Complex64::new(self.norm(), 0.0))
    }
    fn real_value(&self) -> Value {
        Value::Float(self.re)
    }
    fn re_f64(&self) -> f64 {
        self.re
    }
    fn im_f64(&self) -> f64 {
        self.im
    }
}

impl Field for Exact {
    fn zero() -> Self {
        Complex::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        Complex::new(BigRational::one(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn magnitude(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(f64::MAX);
        let im = self.im.to_f64().unwrap_or(f64::MAX);
        re.hypot(im)
    }
}

impl GaussianField for Exact {
    const IS_FLOAT: bool = false;
    fn from_f64_parts(re: f64, im: f64) -> Self {
        let conv = |x: f64| BigRational::from_float(x).unwrap_or_else(BigRational::zero);
        Complex::new(conv(re), conv(im))
    }
    fn from_weight(w: &Weight) -> Self {
        Complex::new(w.clone(), BigRational::zero())
    }
    fn i_pow(k: i64) -> Self {
        let one = BigRational::one();
        let zero = BigRational::zero();
        match k.rem_euclid(4) {
            0 => Complex::new(one, zero),
            1 => Complex::new(zero, one),
            2 => Complex::new(-one, zero),
            _ => Complex::new(zero, -one),
        }
    }
    fn axis_modulus(&self) -> Option<Self> {
        exact_axis_modulus(self).map(|r| Complex::new(r, BigRational::zero()))
    }
    fn real_value(&self) -> Value {
        Value::Exact(self.re.clone())
    }
    fn re_f64(&self) -> f64 {
        self.re.to_f64().unwrap_or(f64::NAN)
    }
    fn im_f64(&self) -> f64 {
        self.im.to_f64().unwrap_or(f64::NAN)
    }
}

/// Modulus of a Gaussian rational that is a unit multiple of a rational,
/// i.e. purely real or purely imaginary. Returns `None` otherwise.
pub fn exact_axis_modulus(z: &Exact) -> Option<BigRational> {
    match (z.re.is_zero(), z.im.is_zero()) {
        (_, true) => Some(z.re.abs()),
        (true, false) => Some(z.im.abs()),
        _ => None,
    }
}

/// Squared modulus `re² + im²`, exact.
pub fn exact_norm_sqr(z: &Exact) -> BigRational {
    &z.re * &z.re + &z.im * &z.im
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Canonical text form: `"3"` for integers, `"2/7"` otherwise.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Renders an exact Gaussian rational, dropping a zero imaginary part.
pub fn format_exact(z: &Exact) -> String {
    if z.im.is_zero() {
        format_rational(&z.re)
    } else if z.re.is_zero() {
        format!("{}i", format_rational(&z.im))
    } else {
        let sign = if z.im.is_negative() { "-" } else { "+" };
        format!(
            "{}{}{}i",
            format_rational(&z.re),
            sign,
            format_rational(&z.im.abs())
        )
    }
}

/// Parses `"3"`, `"-2/7"`, or a finite decimal such as `"0.125"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if all_digits.is_empty() {
        BigInt::zero()
    } else {
        all_digits.parse().ok()?
    };
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(numer);
    if scale >= 0 {
        q *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -q } else { q })
}
