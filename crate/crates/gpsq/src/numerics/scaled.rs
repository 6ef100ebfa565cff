//! Exponent-scaled complex values.
//!
//! Transform evaluations on the left half of the Talbot contour involve
//! factors like e^{-wp} with Re(p) ≪ 0 that overflow f64 long before the
//! resolvent ratio S/(1+S) saturates. Carrying the value as
//! `mantissa · e^{log_scale}` keeps the ratio computable.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy)]
pub struct ScaledComplex {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl ScaledComplex {
    pub fn new(mantissa: Complex64, log_scale: f64) -> Self {
        ScaledComplex { mantissa, log_scale }
    }

    pub fn from_complex(v: Complex64) -> Self {
        ScaledComplex { mantissa: v, log_scale: 0.0 }
    }

    pub fn zero() -> Self {
        ScaledComplex { mantissa: Complex64::new(0.0, 0.0), log_scale: 0.0 }
    }

    /// Collapse to a plain complex number (may overflow by design).
    pub fn value(&self) -> Complex64 {
        self.mantissa * self.log_scale.exp()
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.norm() == 0.0
    }

    /// Sum terms by normalizing to the largest scale; terms more than
    /// ~700 nats below the maximum underflow harmlessly.
    pub fn sum(terms: &[ScaledComplex]) -> ScaledComplex {
        let m = terms
            .iter()
            .filter(|t| !t.is_zero())
            .map(|t| t.log_scale)
            .fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return ScaledComplex::zero();
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for t in terms {
            if !t.is_zero() {
                acc += t.mantissa * (t.log_scale - m).exp();
            }
        }
        ScaledComplex { mantissa: acc, log_scale: m }
    }

    /// S / (1 + S) evaluated stably for arbitrarily large |S|.
    pub fn ratio_over_one_plus(&self) -> Complex64 {
        // S/(1+S) = m e^c / (1 + m e^c) = m / (e^{-c} + m)
        let den = (-self.log_scale).exp() + self.mantissa;
        self.mantissa / den
    }
}
