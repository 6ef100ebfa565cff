//! Concrete scheduling-policy kernels and the time-change construction.
//!
//! A policy supplies, per job class and service requirement z:
//!
//! * the weight A(x) as a function of attained service x (the simulator's
//!   rate-sharing input),
//! * the virtual clock R(x) = ∫₀ˣ dy/A(y), its inverse, and the virtual
//!   lifespan L(z) = R(z),
//! * the characteristic C(y) = (R⁻¹)′(y) = A(R⁻¹(y)) on the virtual age
//!   axis — also the spawn intensity of the branching representation,
//!   so the fixed-point pipeline's memory kernel is Γ·C(y; z),
//! * the resolvent memory kernel h₂(t, w) and, where available, its
//!   Laplace transform ĥ₂(p, w) in closed form.
//!
//! The resolvent kernels follow the per-policy displayed forms (step
//! kernel for egalitarian and discriminatory sharing, truncated power
//! kernels for the limit families); the gamma-function argument in the
//! power-family transforms is w·p, which the cross-check tests confirm
//! against direct quadrature.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::gamma::{gamma, lower_incomplete_gamma};
use crate::numerics::quad::integrate_complex;
use crate::numerics::scaled::ScaledComplex;

/// Policy families.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicyKind {
    /// Egalitarian processor sharing: A ≡ 1 on [0, ℓ).
    Eps,
    /// Discriminatory PS with random class assignment: A = ν_c on [0, ℓ).
    DpsRandom { weights: Vec<f64>, probs: Vec<f64> },
    /// Shortest-residual limit family: A_N(x) = (ℓ − x)^{N+1} 1{x ≤ ℓ}.
    Srpt { n: u32 },
    /// Least-attained-service limit family: A_N(x) = x^{−N} 1{x ≤ ℓ}.
    Fb { n: u32 },
    /// Time-function limit family: A_N(x) = ν_c x^{−N} 1{x ≤ ℓ}.
    Tfs { n: u32, weights: Vec<f64>, probs: Vec<f64> },
}

/// A policy bound to the arrival rate Γ (the memory kernels carry Γ).
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyKernel {
    pub kind: PolicyKind,
    pub gamma: f64,
}

/// Normalized class probabilities: given weights ν and optional probs,
/// default to μ_c = ν_c / Σ ν.
fn default_probs(weights: &[f64], probs: Option<Vec<f64>>) -> Vec<f64> {
    match probs {
        Some(p) => p,
        None => {
            let s: f64 = weights.iter().sum();
            weights.iter().map(|w| w / s).collect()
        }
    }
}

impl PolicyKernel {
    pub fn eps() -> Self {
        PolicyKernel { kind: PolicyKind::Eps, gamma: 1.0 }
    }

    pub fn dps_random(weights: Vec<f64>, probs: Option<Vec<f64>>) -> Result<Self> {
        let probs = default_probs(&weights, probs);
        let k = PolicyKernel { kind: PolicyKind::DpsRandom { weights, probs }, gamma: 1.0 };
        k.check_result()?;
        Ok(k)
    }

    pub fn srpt(n: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("limit family needs N >= 1".into()));
        }
        Ok(PolicyKernel { kind: PolicyKind::Srpt { n }, gamma: 1.0 })
    }

    pub fn fb(n: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("limit family needs N >= 1".into()));
        }
        Ok(PolicyKernel { kind: PolicyKind::Fb { n }, gamma: 1.0 })
    }

    pub fn tfs(n: u32, weights: Vec<f64>, probs: Option<Vec<f64>>) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("limit family needs N >= 1".into()));
        }
        let probs = default_probs(&weights, probs);
        let k = PolicyKernel { kind: PolicyKind::Tfs { n, weights, probs }, gamma: 1.0 };
        k.check_result()?;
        Ok(k)
    }

    /// Bind the arrival rate into the memory kernels.
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            PolicyKind::Eps => "eps",
            PolicyKind::DpsRandom { .. } => "dps",
            PolicyKind::Srpt { .. } => "srpt",
            PolicyKind::Fb { .. } => "fb",
            PolicyKind::Tfs { .. } => "tfs",
        }
    }

    pub fn check(&self) -> Vec<String> {
        let mut issues = Vec::new();
        let probs_weights: Option<(&[f64], &[f64])> = match &self.kind {
            PolicyKind::DpsRandom { weights, probs } | PolicyKind::Tfs { weights, probs, .. } => {
                Some((weights, probs))
            }
            _ => None,
        };
        if let Some((w, p)) = probs_weights {
            if w.is_empty() || w.iter().any(|x| *x <= 0.0) {
                issues.push("class weights must be positive".into());
            }
            if p.len() != w.len() {
                issues.push("class probs/weights length mismatch".into());
            }
            if p.iter().any(|x| *x < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                issues.push("class probabilities must be nonnegative and sum to 1".into());
            }
        }
        issues
    }

    fn check_result(&self) -> Result<()> {
        let issues = self.check();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidModel(issues.join("; ")))
        }
    }

    pub fn n_classes(&self) -> usize {
        match &self.kind {
            PolicyKind::DpsRandom { weights, .. } | PolicyKind::Tfs { weights, .. } => {
                weights.len()
            }
            _ => 1,
        }
    }

    pub fn class_probs(&self) -> Vec<f64> {
        match &self.kind {
            PolicyKind::DpsRandom { probs, .. } | PolicyKind::Tfs { probs, .. } => probs.clone(),
            _ => vec![1.0],
        }
    }

    fn class_weight(&self, c: usize) -> f64 {
        match &self.kind {
            PolicyKind::DpsRandom { weights, .. } | PolicyKind::Tfs { weights, .. } => weights[c],
            _ => 1.0,
        }
    }

    // ---- attained-service axis (simulator) -------------------------------

    /// Weight A(x; z, c) as a function of attained service x.
    pub fn a_weight(&self, x: f64, z: f64, c: usize) -> f64 {
        if x >= z {
            return 0.0;
        }
        match &self.kind {
            PolicyKind::Eps => 1.0,
            PolicyKind::DpsRandom { weights, .. } => weights[c],
            PolicyKind::Srpt { n } => (z - x).powi(*n as i32 + 1),
            PolicyKind::Fb { n } => x.powi(-(*n as i32)),
            PolicyKind::Tfs { n, weights, .. } => weights[c] * x.powi(-(*n as i32)),
        }
    }

    /// Virtual clock R(x; z, c) = ∫₀ˣ dy / A(y).
    pub fn r_virtual(&self, x: f64, z: f64, c: usize) -> f64 {
        match &self.kind {
            PolicyKind::Eps => x,
            PolicyKind::DpsRandom { weights, .. } => x / weights[c],
            PolicyKind::Srpt { n } => {
                let n = *n as f64;
                ((z - x).powf(-n) - z.powf(-n)) / n
            }
            PolicyKind::Fb { n } => {
                let n1 = *n as f64 + 1.0;
                x.powf(n1) / n1
            }
            PolicyKind::Tfs { n, weights, .. } => {
                let n1 = *n as f64 + 1.0;
                x.powf(n1) / (n1 * weights[c])
            }
        }
    }

    /// Inverse virtual clock: attained service at virtual age a (uncapped).
    pub fn r_inverse(&self, a: f64, z: f64, c: usize) -> f64 {
        if a <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            PolicyKind::Eps => a,
            PolicyKind::DpsRandom { weights, .. } => weights[c] * a,
            PolicyKind::Srpt { n } => {
                let n = *n as f64;
                z - (n * a + z.powf(-n)).powf(-1.0 / n)
            }
            PolicyKind::Fb { n } => {
                let n1 = *n as f64 + 1.0;
                (n1 * a).powf(1.0 / n1)
            }
            PolicyKind::Tfs { n, weights, .. } => {
                let n1 = *n as f64 + 1.0;
                (n1 * weights[c] * a).powf(1.0 / n1)
            }
        }
    }

    /// Virtual lifespan L(z, c) = R(z); infinite for the SRPT family.
    pub fn lifespan(&self, z: f64, c: usize) -> f64 {
        match &self.kind {
            PolicyKind::Srpt { .. } => f64::INFINITY,
            _ => self.r_virtual(z, z, c),
        }
    }

    // ---- virtual-age axis (fixed-point pipeline) --------------------------

    /// System-size metric indicator on the virtual age axis.
    pub fn chi(&self, y: f64, z: f64, c: usize) -> f64 {
        if y >= 0.0 && y < self.lifespan(z, c) {
            1.0
        } else {
            0.0
        }
    }

    /// Characteristic C(y; z, c) = (R⁻¹)′(y) on [0, L).
    pub fn c_char(&self, y: f64, z: f64, c: usize) -> f64 {
        if y < 0.0 || y >= self.lifespan(z, c) {
            return 0.0;
        }
        match &self.kind {
            PolicyKind::Eps => 1.0,
            PolicyKind::DpsRandom { weights, .. } => weights[c],
            PolicyKind::Srpt { n } => {
                let n = *n as f64;
                (n * y + z.powf(-n)).powf(-(n + 1.0) / n)
            }
            PolicyKind::Fb { n } => {
                let n = *n as f64;
                (n + 1.0).powf(-n / (n + 1.0)) * y.powf(-n / (n + 1.0))
            }
            PolicyKind::Tfs { n, weights, .. } => {
                let n = *n as f64;
                let nu = weights[c];
                nu.powf(1.0 / (n + 1.0))
                    * (n + 1.0).powf(-n / (n + 1.0))
                    * y.powf(-n / (n + 1.0))
            }
        }
    }

    /// Spawn kernel of the branching representation: Γ · C(y; z, c).
    pub fn h2_phi(&self, y: f64, z: f64, c: usize) -> f64 {
        self.gamma * self.c_char(y, z, c)
    }

    /// Exact primitive ∫₀ʸ Γ C = Γ · R⁻¹(min(y, L)); this is what the
    /// marching quadrature integrates against (singularity-proof).
    pub fn h2_phi_primitive(&self, y: f64, z: f64, c: usize) -> f64 {
        let l = self.lifespan(z, c);
        let y = y.min(l);
        if y <= 0.0 {
            return 0.0;
        }
        self.gamma * self.r_inverse(y, z, c).min(z)
    }

    // ---- resolvent kernels -------------------------------------------------

    /// Mixture weight Σ_c μ_c ν_c entering the class-mixed resolvent kernels.
    fn mixed_weight(&self) -> f64 {
        match &self.kind {
            PolicyKind::DpsRandom { weights, probs } | PolicyKind::Tfs { weights, probs, .. } => {
                weights.iter().zip(probs).map(|(w, p)| w * p).sum()
            }
            _ => 1.0,
        }
    }

    /// Memory kernel h₂(t, w) of the resolvent construction (includes Γ).
    pub fn h2_resolvent(&self, t: f64, w: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match &self.kind {
            PolicyKind::Eps => {
                if t >= w {
                    self.gamma
                } else {
                    0.0
                }
            }
            PolicyKind::DpsRandom { .. } => {
                if t >= w {
                    self.gamma * self.mixed_weight()
                } else {
                    0.0
                }
            }
            PolicyKind::Srpt { n } => {
                if t <= w {
                    let n = *n as f64;
                    self.gamma * (n * t + w.powf(-n)).powf(-(n + 1.0) / n)
                } else {
                    0.0
                }
            }
            PolicyKind::Fb { n } => {
                if t <= w && t > 0.0 {
                    let n = *n as f64;
                    self.gamma
                        * (n + 1.0).powf(-n / (n + 1.0))
                        * t.powf(-n / (n + 1.0))
                } else {
                    0.0
                }
            }
            PolicyKind::Tfs { n, .. } => {
                if t <= w && t > 0.0 {
                    let n = *n as f64;
                    self.gamma
                        * self.mixed_weight()
                        * (n + 1.0).powf(-n / (n + 1.0))
                        * t.powf(-n / (n + 1.0))
                } else {
                    0.0
                }
            }
        }
    }

    /// Exact primitive ∫₀ᵗ h₂(y, w) dy.
    pub fn h2_resolvent_primitive(&self, t: f64, w: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            PolicyKind::Eps => self.gamma * (t - w).max(0.0),
            PolicyKind::DpsRandom { .. } => self.gamma * self.mixed_weight() * (t - w).max(0.0),
            PolicyKind::Srpt { n } => {
                let n = *n as f64;
                let tc = t.min(w);
                self.gamma * (w - (n * tc + w.powf(-n)).powf(-1.0 / n))
            }
            PolicyKind::Fb { n } => {
                let n1 = *n as f64 + 1.0;
                self.gamma * (n1 * t.min(w)).powf(1.0 / n1)
            }
            PolicyKind::Tfs { n, .. } => {
                let n1 = *n as f64 + 1.0;
                self.gamma * self.mixed_weight() * (n1 * t.min(w)).powf(1.0 / n1)
            }
        }
    }

    /// Upper end of the support of h₂(·, w); infinite for step kernels.
    pub fn h2_support_end(&self, w: f64) -> f64 {
        match &self.kind {
            PolicyKind::Eps | PolicyKind::DpsRandom { .. } => f64::INFINITY,
            _ => w,
        }
    }

    /// Delay form: `Some(coef)` when ĥ₂(p, w) = coef · e^{−pw} / p, which
    /// lets the resolvent be inverted term-by-term with the shift rule.
    pub fn delay_form(&self) -> Option<f64> {
        match &self.kind {
            PolicyKind::Eps => Some(self.gamma),
            PolicyKind::DpsRandom { .. } => Some(self.gamma * self.mixed_weight()),
            _ => None,
        }
    }

    /// Closed-form ĥ₂(p, w), exponent-scaled so left-half-plane contour
    /// nodes do not overflow. `None` when the family admits no closed form
    /// (the SRPT family at N = 1).
    pub fn hhat2_closed(&self, p: Complex64, w: f64) -> Option<Result<ScaledComplex>> {
        match &self.kind {
            PolicyKind::Eps => Some(Ok(eps_hhat2_scaled(self.gamma, p, w))),
            PolicyKind::DpsRandom { .. } => {
                Some(Ok(eps_hhat2_scaled(self.gamma * self.mixed_weight(), p, w)))
            }
            PolicyKind::Fb { n } => Some(fb_hhat2_scaled(self.gamma, *n as f64, p, w)),
            PolicyKind::Tfs { n, .. } => {
                Some(fb_hhat2_scaled(self.gamma * self.mixed_weight(), *n as f64, p, w))
            }
            PolicyKind::Srpt { n } => {
                if *n >= 2 {
                    Some(srpt_hhat2_scaled(self.gamma, *n as f64, p, w))
                } else {
                    None
                }
            }
        }
    }

    /// ĥ₂(p, w) by quadrature of the definition; requires Re(p) > 0.
    pub fn hhat2_quadrature(&self, p: Complex64, w: f64) -> Result<Complex64> {
        if p.re <= 0.0 {
            return Err(Error::InvalidArgument("hhat2 quadrature requires Re(p) > 0".into()));
        }
        let end = self.h2_support_end(w);
        if end.is_infinite() {
            // step kernel: Γ̃ ∫_w^∞ e^{-pt} dt; truncating at 40 decay scales
            // leaves a tail below e^{-40}/|p|
            let coef = self.delay_form().expect("step kernels carry a delay form");
            let r = integrate_complex(|t| (-p * t).exp() * coef, w, w + 40.0 / p.re, 1e-13)?;
            return Ok(r.value);
        }
        // bounded support: desingularized substitution for the power kernels
        match &self.kind {
            PolicyKind::Fb { n } | PolicyKind::Tfs { n, .. } => {
                // t = ξ^{N+1}: C^N(t) dt = (N+1)^{1/(N+1)} dξ
                let nf = *n as f64;
                let n1 = nf + 1.0;
                let coef = self.gamma * self.mixed_weight() * n1.powf(1.0 / n1 - 1.0) * n1;
                let r = integrate_complex(
                    |xi| (-p * xi.powf(n1)).exp() * coef,
                    0.0,
                    w.powf(1.0 / n1),
                    1e-12,
                )?;
                Ok(r.value)
            }
            _ => {
                let r = integrate_complex(
                    |t| Complex64::new(self.h2_resolvent(t, w), 0.0) * (-p * t).exp(),
                    0.0,
                    end,
                    1e-12,
                )?;
                Ok(r.value)
            }
        }
    }
}

fn eps_hhat2_scaled(coef: f64, p: Complex64, w: f64) -> ScaledComplex {
    // coef · e^{-pw} / p  =  (coef/p) e^{-i w Im p} · e^{-w Re p}
    let phase = Complex64::new(0.0, -w * p.im).exp();
    ScaledComplex::new(phase * coef / p, -w * p.re)
}

/// γ(s, x) carried as mantissa·e^σ so Re(x) ≪ 0 arguments stay finite.
fn lower_gamma_scaled(s: f64, x: Complex64) -> Result<ScaledComplex> {
    let s = Complex64::new(s, 0.0);
    if x.re >= -600.0 && x.norm() < 650.0 {
        return Ok(ScaledComplex::from_complex(lower_incomplete_gamma(s, x)?));
    }
    // γ(s,x) = Γ(s) − Γ(s,x), Γ(s,x) ~ x^{s−1} e^{−x} Σ (s−1)…(s−k)/x^k
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..40 {
        let next = term * (s - k as f64) / x;
        if next.norm() > term.norm() {
            break;
        }
        term = next;
        sum += term;
    }
    let mantissa = -x.powc(s - 1.0) * Complex64::new(0.0, -x.im).exp() * sum;
    let tail = ScaledComplex::new(mantissa, -x.re);
    Ok(ScaledComplex::sum(&[ScaledComplex::from_complex(gamma(s)), tail]))
}

fn fb_hhat2_scaled(coef: f64, n: f64, p: Complex64, w: f64) -> Result<ScaledComplex> {
    // coef (N+1)^{-N/(N+1)} p^{-1/(N+1)} γ(1/(N+1), w p)
    let n1 = n + 1.0;
    let s = 1.0 / n1;
    let g = lower_gamma_scaled(s, p * w)?;
    let front = coef * n1.powf(-n / n1) * p.powc(Complex64::new(-s, 0.0));
    Ok(ScaledComplex::new(g.mantissa * front, g.log_scale))
}

fn srpt_hhat2_scaled(coef: f64, n: f64, p: Complex64, w: f64) -> Result<ScaledComplex> {
    // ∫₀^w (Nt + w^{-N})^{-(N+1)/N} e^{-pt} dt via the substitution
    // τ = Nt + w^{-N} and one integration by parts; needs N ≥ 2 so the
    // shifted gamma parameter 1 − 1/N stays positive.
    let a = w.powf(-n);
    let b = n * w + a;
    let c = p / n;
    let s = 1.0 - 1.0 / n;
    let ca = c * a;
    let cb = c * b;
    let g_b = lower_gamma_scaled(s, cb)?;
    let g_a = lower_gamma_scaled(s, ca)?;
    // e^{ca} { a^{-1/N} e^{-ca} − b^{-1/N} e^{-cb} − c^{1/N} [γ(s,cb) − γ(s,ca)] }
    let t1 = ScaledComplex::from_complex(Complex64::new(a.powf(-1.0 / n), 0.0));
    let shift = Complex64::new(0.0, (ca - cb).im).exp();
    let t2 = ScaledComplex::new(-b.powf(-1.0 / n) * shift, (ca - cb).re);
    let cpow = c.powc(Complex64::new(1.0 / n, 0.0));
    let phase_a = Complex64::new(0.0, ca.im).exp();
    let t3 = ScaledComplex::new(-cpow * g_b.mantissa * phase_a, g_b.log_scale + ca.re);
    let t4 = ScaledComplex::new(cpow * g_a.mantissa * phase_a, g_a.log_scale + ca.re);
    let total = ScaledComplex::sum(&[t1, t2, t3, t4]);
    Ok(ScaledComplex::new(total.mantissa * coef, total.log_scale))
}

/// Generic time-change construction R(u) = ∫₀ᵘ dy/c(y), its inverse, and
/// C(t) = c(R⁻¹(t)); numeric fallback for weight functions outside the
/// analytic power families.
pub struct TimeChange<F: Fn(f64) -> f64> {
    c_fn: F,
    ell: f64,
}

impl<F: Fn(f64) -> f64> TimeChange<F> {
    pub fn new(c_fn: F, ell: f64) -> Self {
        TimeChange { c_fn, ell }
    }

    pub fn r(&self, u: f64) -> Result<f64> {
        if u <= 0.0 {
            return Ok(0.0);
        }
        let f = &self.c_fn;
        Ok(crate::numerics::quad::integrate(|y| 1.0 / f(y), 0.0, u.min(self.ell), 1e-12)?
            .real())
    }

    /// Inverse by bisection to 1e−12.
    pub fn r_inv(&self, target: f64) -> Result<f64> {
        if target <= 0.0 {
            return Ok(0.0);
        }
        let (mut lo, mut hi) = (0.0, self.ell);
        if self.r(hi)? < target {
            return Ok(self.ell);
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.r(mid)? < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-12 * self.ell.max(1.0) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// C(t) = (R⁻¹)′(t) = c(R⁻¹(t)).
    pub fn c_of_virtual(&self, t: f64) -> Result<f64> {
        let x = self.r_inv(t)?;
        Ok((self.c_fn)(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64 as C;

    #[test]
    fn eps_weight_and_characteristic() {
        let k = PolicyKernel::eps();
        assert_eq!(k.a_weight(0.3, 1.0, 0), 1.0);
        assert_eq!(k.a_weight(1.5, 1.0, 0), 0.0);
        assert_eq!(k.c_char(0.3, 1.0, 0), 1.0);
        assert_eq!(k.c_char(1.5, 1.0, 0), 0.0);
    }

    #[test]
    fn eps_hhat2_matches_quadrature() {
        let k = PolicyKernel::eps().with_gamma(1.0);
        // ĥ₂(1, 0)/Γ = 1
        let v = k.hhat2_closed(C::new(1.0, 0.0), 0.0).unwrap().unwrap().value();
        assert_relative_eq!(v.re, 1.0, epsilon = 1e-12);
        // ĥ₂(2, 1)/Γ = e^{−2}/2
        let v = k.hhat2_closed(C::new(2.0, 0.0), 1.0).unwrap().unwrap().value();
        assert_relative_eq!(v.re, (-2.0f64).exp() / 2.0, max_relative = 1e-12);
        let q = k.hhat2_quadrature(C::new(2.0, 0.0), 1.0).unwrap();
        assert_relative_eq!(q.re, v.re, epsilon = 1e-9);
    }

    #[test]
    fn dps_weighting() {
        let k = PolicyKernel::dps_random(vec![2.0, 1.0], None).unwrap().with_gamma(1.0);
        assert_eq!(k.a_weight(0.5, 1.0, 0), 2.0);
        assert_eq!(k.a_weight(0.5, 1.0, 1), 1.0);
        // class probs default to ν_c / Σν
        assert_relative_eq!(k.class_probs()[0], 2.0 / 3.0, epsilon = 1e-14);
        // equal weights reduce to the egalitarian weight ratio
        let e = PolicyKernel::dps_random(vec![3.0, 3.0], None).unwrap();
        assert_eq!(e.a_weight(0.2, 1.0, 0) / e.a_weight(0.2, 1.0, 1), 1.0);
    }

    #[test]
    fn dps_rejects_bad_probs() {
        assert!(PolicyKernel::dps_random(vec![1.0, 2.0], Some(vec![0.7, 0.7])).is_err());
        assert!(PolicyKernel::dps_random(vec![-1.0], None).is_err());
    }

    #[test]
    fn srpt_virtual_clock_matches_printed_value() {
        // N=2, ℓ=1: R(0.5) = −(1/2)(1 − 0.5^{−2}) = 1.5
        let k = PolicyKernel::srpt(2).unwrap();
        assert_relative_eq!(k.r_virtual(0.5, 1.0, 0), 1.5, epsilon = 1e-12);
        // weight vanishes at completion
        assert_eq!(k.a_weight(1.0, 1.0, 0), 0.0);
    }

    #[test]
    fn fb_time_change_forms() {
        let k = PolicyKernel::fb(1).unwrap();
        // R(2) = 2²/2 = 2
        assert_relative_eq!(k.r_virtual(2.0, 3.0, 0), 2.0, epsilon = 1e-14);
        assert_relative_eq!(k.r_inverse(2.0, 3.0, 0), 2.0, epsilon = 1e-14);
        // C(0.5) = (2 · 0.5)^{−1/2} = 1
        assert_relative_eq!(k.c_char(0.5, 3.0, 0), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn fb_hhat2_gamma_argument_reading() {
        // ĥ₂(1,1)/Γ = 2^{−1/2} γ(1/2, 1) ≈ 1.05617, equal to the
        // quadrature ∫₀^1 (2y)^{−1/2} e^{−y} dy
        let k = PolicyKernel::fb(1).unwrap().with_gamma(1.0);
        let closed = k.hhat2_closed(C::new(1.0, 0.0), 1.0).unwrap().unwrap().value();
        assert_relative_eq!(closed.re, 1.056_168_9, max_relative = 1e-6);
        let quad = k.hhat2_quadrature(C::new(1.0, 0.0), 1.0).unwrap();
        assert!((closed - quad).norm() < 1e-8, "closed {closed} quad {quad}");
    }

    #[test]
    fn srpt_closed_form_cross_check() {
        let k = PolicyKernel::srpt(2).unwrap().with_gamma(1.0);
        let p = C::new(1.0, 1.0);
        let closed = k.hhat2_closed(p, 0.3).unwrap().unwrap().value();
        let quad = k.hhat2_quadrature(p, 0.3).unwrap();
        assert!((closed - quad).norm() < 1e-7, "closed {closed} quad {quad}");
    }

    #[test]
    fn srpt_n1_has_no_closed_form() {
        let k = PolicyKernel::srpt(1).unwrap();
        assert!(k.hhat2_closed(C::new(1.0, 0.0), 0.5).is_none());
    }

    #[test]
    fn tfs_reduces_to_fb_and_scales_linearly() {
        let fb = PolicyKernel::fb(2).unwrap().with_gamma(1.0);
        let tfs1 = PolicyKernel::tfs(2, vec![1.0], None).unwrap().with_gamma(1.0);
        let tfs2 = PolicyKernel::tfs(2, vec![2.0], None).unwrap().with_gamma(1.0);
        let p = C::new(1.5, 0.3);
        let a = fb.hhat2_closed(p, 0.8).unwrap().unwrap().value();
        let b = tfs1.hhat2_closed(p, 0.8).unwrap().unwrap().value();
        let c2 = tfs2.hhat2_closed(p, 0.8).unwrap().unwrap().value();
        assert!((a - b).norm() < 1e-12);
        assert!((c2 - a * 2.0).norm() < 1e-12);
        // equal weights with any probs mix back to the single-class kernel
        let mix = PolicyKernel::tfs(2, vec![1.0, 1.0], Some(vec![0.3, 0.7])).unwrap()
            .with_gamma(1.0);
        let m = mix.hhat2_closed(p, 0.8).unwrap().unwrap().value();
        assert!((m - a).norm() < 1e-12);
    }

    #[test]
    fn generic_time_change_round_trip() {
        // FB with N = 1 through the numeric construction
        let tc = TimeChange::new(|y: f64| y.powi(-1), 2.0);
        assert_relative_eq!(tc.r(2.0).unwrap(), 2.0, epsilon = 1e-10);
        assert_relative_eq!(tc.r_inv(2.0).unwrap(), 2.0, epsilon = 1e-9);
        assert_relative_eq!(tc.c_of_virtual(0.5).unwrap(), 1.0, epsilon = 1e-8);
        // round trip on 50 points
        for k in 1..=50 {
            let u = 2.0 * k as f64 / 50.0;
            let r = tc.r(u).unwrap();
            assert_relative_eq!(tc.r_inv(r).unwrap(), u, epsilon = 1e-9);
        }
    }

    #[test]
    fn separation_ratio_grows_with_n() {
        // c_N(T1)/c_N(T2) increasing in N for T1 < T2 (both families)
        let (t1, t2, ell): (f64, f64, f64) = (0.4, 1.2, 2.0);
        let mut prev_srpt = 0.0;
        let mut prev_fb = 0.0;
        for n in [1u32, 2, 4, 8] {
            let srpt = ((ell - t1) / (ell - t2)).powi(n as i32);
            let fb = (t2 / t1).powi(n as i32);
            assert!(srpt > prev_srpt && fb > prev_fb);
            prev_srpt = srpt;
            prev_fb = fb;
        }
    }

    #[test]
    fn h2_primitive_consistency() {
        // primitive differentiates back to the kernel (where smooth)
        for k in [
            PolicyKernel::eps().with_gamma(0.7),
            PolicyKernel::fb(2).unwrap().with_gamma(0.7),
            PolicyKernel::srpt(2).unwrap().with_gamma(0.7),
        ] {
            let w = 1.3;
            for t in [0.2, 0.5, 0.9, 1.1] {
                let h = 1e-6;
                let fd = (k.h2_resolvent_primitive(t + h, w)
                    - k.h2_resolvent_primitive(t - h, w))
                    / (2.0 * h);
                assert_relative_eq!(fd, k.h2_resolvent(t, w), epsilon = 1e-5);
            }
        }
    }
}
