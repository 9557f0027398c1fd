//! Dense complex polynomials: evaluation, Taylor coefficients at a point,
//! the amplitude `A(z)`, synthetic division and a root radius.
//!
//! Coefficients are stored in ascending order, so `coeffs[j]` multiplies
//! `z^j`. Constructors strip trailing zeros and reject non-finite input,
//! which keeps the leading coefficient nonzero for every value of this type.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use num_complex::Complex64 as Complex;

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex>) -> Result<Self> {
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite("polynomial coefficients"));
        }
        while coeffs.last().is_some_and(|c| *c == Complex::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(Polynomial { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    /// Monic polynomial with the given roots, `prod (z - r)`.
    pub fn from_roots(roots: &[Complex]) -> Result<Self> {
        let mut coeffs = vec![Complex::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex::new(0.0, 0.0); coeffs.len() + 1];
            for (j, &c) in coeffs.iter().enumerate() {
                next[j + 1] += c;
                next[j] -= r * c;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex {
        self.coeffs[self.degree()]
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    pub(crate) fn require_degree(&self, op: &'static str, need: usize) -> Result<()> {
        if self.degree() < need {
            return Err(Error::DegreeTooLow {
                op,
                need,
                got: self.degree(),
            });
        }
        Ok(())
    }

    /// `p(z)` by Horner's rule.
    pub fn evaluate(&self, z: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `(p(z), p'(z))` in one Horner pass.
    pub fn evaluate_with_derivative(&self, z: Complex) -> (Complex, Complex) {
        let mut value = Complex::new(0.0, 0.0);
        let mut slope = Complex::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            slope = slope * z + value;
            value = value * z + c;
        }
        (value, slope)
    }

    /// `F(z) = |p(z)|^2`.
    pub fn modulus_squared(&self, z: Complex) -> f64 {
        self.evaluate(z).norm_sqr()
    }

    /// Coefficients of `q(w) = p(z + w)`, i.e. `p^(j)(z)/j!` for `j = 0..=n`,
    /// by `n` rounds of synthetic division.
    pub fn normalized_derivatives(&self, z: Complex) -> DerivativeTable {
        let mut values = self.coeffs.clone();
        let n = self.degree();
        for i in 0..n {
            for j in (i..n).rev() {
                let carry = values[j + 1] * z;
                values[j] += carry;
            }
        }
        DerivativeTable { point: z, values }
    }

    /// The polynomial `w -> p(w + shift)`.
    pub fn taylor_shift(&self, shift: Complex) -> Polynomial {
        Polynomial {
            coeffs: self.normalized_derivatives(shift).values,
        }
    }

    pub fn derivative(&self) -> Result<Polynomial> {
        self.require_degree("derivative", 1)?;
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &c)| c * j as f64)
                .collect(),
        )
    }

    /// Divides every coefficient by the leading one.
    pub fn monic(&self) -> Polynomial {
        let lead = self.leading();
        Polynomial {
            coeffs: self.coeffs.iter().map(|&c| c / lead).collect(),
        }
    }

    /// Synthetic division by `(z - r)`: returns `(quotient, p(r))`.
    pub fn deflate(&self, r: Complex) -> Result<(Polynomial, Complex)> {
        self.require_degree("deflate", 1)?;
        let n = self.degree();
        let mut quotient = vec![Complex::new(0.0, 0.0); n];
        let mut carry = self.coeffs[n];
        for j in (0..n).rev() {
            quotient[j] = carry;
            carry = self.coeffs[j] + r * carry;
        }
        Ok((Polynomial { coeffs: quotient }, carry))
    }

    /// Cauchy bound `1 + max_j |a_j / a_n|`; every root lies in the closed
    /// disc of this radius.
    pub fn root_radius(&self) -> f64 {
        let lead = self.leading().norm();
        let n = self.degree();
        1.0 + self.coeffs[..n]
            .iter()
            .map(|c| c.norm() / lead)
            .fold(0.0, f64::max)
    }
}

/// Taylor coefficients of `p` at `point`: entry `j` is `p^(j)(point)/j!`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeTable {
    pub point: Complex,
    pub values: Vec<Complex>,
}

impl DerivativeTable {
    pub fn value(&self) -> Complex {
        self.values[0]
    }

    pub fn derivative(&self) -> Complex {
        self.values[1]
    }

    pub fn degree(&self) -> usize {
        self.values.len() - 1
    }

    /// `A(z) = max_j |p^(j)(z)| / j!`.
    pub fn amplitude(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also `i`, `-i`, exponents like `1e-3`).
pub fn parse_complex(text: &str) -> Result<Complex> {
    let s = text.trim();
    let bad = || Error::Parse(format!("invalid complex literal `{text}`"));
    if s.is_empty() {
        return Err(bad());
    }
    let real = |t: &str| t.parse::<f64>().map_err(|_| bad());
    let imag = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => real(t),
        }
    };
    let value = if let Some(body) = s.strip_suffix(['i', 'j']) {
        // The split point is the last sign that is not leading and not part
        // of an exponent.
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        match split {
            Some(k) => Complex::new(real(&body[..k])?, imag(&body[k..])?),
            None => Complex::new(0.0, imag(body)?),
        }
    } else {
        Complex::new(real(s)?, 0.0)
    };
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::NonFinite("complex literal"));
    }
    Ok(value)
}

/// Formats a complex number in the literal syntax accepted by [`parse_complex`].
pub fn format_complex(z: Complex) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

impl FromStr for Polynomial {
    type Err = Error;

    /// Ascending comma-separated coefficients, e.g. `-1,0,1` for `z^2 - 1`.
    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(parse_complex)
            .collect::<Result<Vec<_>>>()?;
        Polynomial::new(coeffs)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, &c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            f.write_str(&format_complex(c))?;
        }
        Ok(())
    }
}

/// JSON form: `{"coeffs": [[re, im], ...]}`, ascending.
#[derive(Serialize, Deserialize)]
struct PolynomialJson {
    coeffs: Vec<[f64; 2]>,
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        PolynomialJson {
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let raw = PolynomialJson::deserialize(deserializer)?;
        Polynomial::new(
            raw.coeffs
                .iter()
                .map(|&[re, im]| Complex::new(re, im))
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}
