//! Complex gamma and lower incomplete gamma functions.
//!
//! γ(s, x) = ∫₀ˣ t^{s−1} e^{−t} dt for Re(s) > 0 and complex x.
//!
//! Evaluation routes:
//! * |x| < |s| + 1 — power series γ(s,x) = x^s e^{−x} Σ xⁿ / (s(s+1)…(s+n)),
//! * otherwise, Re(x) ≥ 0 — γ = Γ(s) − Γ(s,x) with the upper function by
//!   the Lentz continued fraction,
//! * otherwise — γ = Γ(s) − Γ(s,x) with Γ(s,x) from its large-|x|
//!   asymptotic series (the continued fraction degrades as arg x → π,
//!   which is exactly where the scaled resolvent evaluations live).

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_ITER: usize = 500;

/// Lanczos coefficients, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(z) for complex z via the Lanczos approximation (reflection for Re z < 1/2).
pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z)Γ(1−z) = π / sin(πz)
        let pi = std::f64::consts::PI;
        return pi / ((pi * z).sin() * gamma(Complex64::new(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    let sqrt_two_pi = (2.0 * std::f64::consts::PI).sqrt();
    sqrt_two_pi * t.powc(z + 0.5) * (-t).exp() * x
}

/// ln Γ(z) on the principal branch, Re(z) > 0.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    let z1 = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z1 + i as f64);
    }
    let t = z1 + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z1 + 0.5) * t.ln() - t + x.ln()
}

fn series_p(s: Complex64, x: Complex64) -> Result<Complex64> {
    // Σ x^n / (s (s+1) … (s+n)), n ≥ 0
    let mut term = 1.0 / s;
    let mut sum = term;
    let mut sn = s;
    for _ in 0..MAX_ITER {
        sn += 1.0;
        term *= x / sn;
        sum += term;
        if term.norm() < sum.norm() * 1e-17 {
            return Ok(sum);
        }
    }
    Err(Error::QuadratureFailure("incomplete gamma series stalled".into()))
}

fn cf_upper(s: Complex64, x: Complex64) -> Result<Complex64> {
    // Γ(s,x) = e^{-x} x^s / (x + 1 - s - 1(1-s)/(x + 3 - s - ...)), Lentz
    let tiny = Complex64::new(1e-300, 0.0);
    let b0 = x + 1.0 - s;
    let mut f = if b0.norm() < 1e-300 { tiny } else { b0 };
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for n in 1..=MAX_ITER {
        let nf = n as f64;
        let an = nf * (s - nf);
        let bn = x + (2.0 * nf + 1.0) - s;
        d = bn + an * d;
        if d.norm() < 1e-300 {
            d = tiny;
        }
        d = 1.0 / d;
        c = bn + an / c;
        if c.norm() < 1e-300 {
            c = tiny;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            return Ok((-x).exp() * x.powc(s) / f);
        }
    }
    Err(Error::QuadratureFailure("incomplete gamma continued fraction stalled".into()))
}

fn asymptotic_upper(s: Complex64, x: Complex64) -> Complex64 {
    // Γ(s,x) ~ x^{s-1} e^{-x} Σ_k (s-1)(s-2)…(s-k) / x^k, truncated at the
    // smallest term; adequate for |x| ≳ 30 (|arg x| < 3π/2)
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut best = f64::INFINITY;
    for k in 1..60 {
        term *= (s - k as f64) / x;
        let m = term.norm();
        if m > best {
            break;
        }
        best = m;
        sum += term;
    }
    x.powc(s - 1.0) * (-x).exp() * sum
}

/// Lower incomplete gamma γ(s, x) for Re(s) > 0 and complex x.
pub fn lower_incomplete_gamma(s: Complex64, x: Complex64) -> Result<Complex64> {
    if s.re <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "lower incomplete gamma requires Re(s) > 0, got s = {s}"
        )));
    }
    if x.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if x.norm() < s.norm() + 1.0 {
        let pref = x.powc(s) * (-x).exp();
        return Ok(pref * series_p(s, x)?);
    }
    if x.re >= 0.0 {
        Ok(gamma(s) - cf_upper(s, x)?)
    } else if x.norm() > 30.0 {
        Ok(gamma(s) - asymptotic_upper(s, x))
    } else {
        // moderate left-half-plane arguments: the series still converges
        let pref = x.powc(s) * (-x).exp();
        Ok(pref * series_p(s, x)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64 as C;

    #[test]
    fn gamma_matches_factorials() {
        for n in 1..8 {
            let g = gamma(C::new(n as f64 + 1.0, 0.0));
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            assert_relative_eq!(g.re, fact, max_relative = 1e-13);
            assert!(g.im.abs() < 1e-10 * fact);
        }
    }

    #[test]
    fn gamma_half() {
        let g = gamma(C::new(0.5, 0.0));
        assert_relative_eq!(g.re, std::f64::consts::PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn closed_form_s_equals_one() {
        // γ(1, x) = 1 − e^{−x}
        let v = lower_incomplete_gamma(C::new(1.0, 0.0), C::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(v.re, 1.0 - (-1.0f64).exp(), max_relative = 1e-13);
    }

    #[test]
    fn zero_argument_is_zero() {
        let v = lower_incomplete_gamma(C::new(2.3, 0.4), C::new(0.0, 0.0)).unwrap();
        assert_eq!(v, C::new(0.0, 0.0));
    }

    #[test]
    fn erf_identity() {
        // γ(1/2, 1) = √π erf(1)
        let v = lower_incomplete_gamma(C::new(0.5, 0.0), C::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(v.re, 1.493_648_265_624_854, max_relative = 1e-12);
    }

    #[test]
    fn recurrence_on_a_grid() {
        // γ(s+1, x) = s γ(s, x) − x^s e^{−x}
        let mut fails = 0;
        for i in 0..50 {
            let s = C::new(0.2 + 4.8 * (i as f64) / 49.0, 0.3 * ((i % 5) as f64 - 2.0));
            let x = C::new(
                -8.0 + 16.0 * ((i * 7 % 50) as f64) / 49.0,
                -6.0 + 12.0 * ((i * 13 % 50) as f64) / 49.0,
            );
            if x.norm() < 1e-6 {
                continue;
            }
            let lhs = lower_incomplete_gamma(s + 1.0, x).unwrap();
            let rhs = s * lower_incomplete_gamma(s, x).unwrap() - x.powc(s) * (-x).exp();
            let scale = lhs.norm().max(rhs.norm()).max(1.0);
            if (lhs - rhs).norm() / scale > 1e-10 {
                fails += 1;
            }
        }
        assert_eq!(fails, 0);
    }

    #[test]
    fn rejects_nonpositive_re_s() {
        assert!(lower_incomplete_gamma(C::new(-0.5, 0.0), C::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn quadrature_cross_check_complex() {
        use crate::numerics::quad::integrate_complex;
        // γ(0.7, 2+1i) against direct quadrature of t^{s-1} e^{-t} along [0, x]
        let s = C::new(0.7, 0.0);
        let x = C::new(2.0, 1.0);
        let path = |r: f64| {
            let t = x * r;
            t.powc(s - 1.0) * (-t).exp() * x
        };
        let q = integrate_complex(path, 1e-14, 1.0, 1e-12).unwrap().value;
        let g = lower_incomplete_gamma(s, x).unwrap();
        assert!((q - g).norm() < 1e-9, "quad {q} vs gamma {g}");
    }
}
