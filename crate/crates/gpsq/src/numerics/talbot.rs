//! Fixed-contour Talbot inversion of Laplace transforms.
//!
//! For order `I` the method approximates f(t) by
//!
//! ```text
//! f(t, I) = (2 / 5t) Σ_{k=0}^{I-1} Re( γ_k · f̂(δ_k / t) )
//! ```
//!
//! with nodes and weights
//!
//! ```text
//! δ_0 = 2I/5,            δ_k = (2kπ/5) [cot(kπ/I) + i]
//! γ_0 = e^{δ_0} / 2,     γ_k = {1 + i (kπ/I)(1 + cot²(kπ/I)) − i cot(kπ/I)} e^{δ_k}
//! ```
//!
//! Each folded term of the sum stands for a conjugate pair of contour
//! points; for real-valued originals the pair collapses into one
//! transform evaluation. The two-dimensional inversion nests a second
//! contour inside the first, where the inner inversion runs at complex
//! outer nodes and therefore evaluates both members of each inner pair
//! explicitly. The evaluation counter counts contour nodes (folded
//! pairs), which is what the `I` and `I₁·I₂` budgets refer to.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Counts transform evaluations (contour nodes) during inversion calls.
#[derive(Debug, Default)]
pub struct EvalCounter(AtomicUsize);

impl EvalCounter {
    pub fn new() -> Self {
        Self(AtomicUsize::new(0))
    }

    pub fn count(&self) -> usize {
        self.0.load(Ordering::Relaxed)
    }

    pub fn add(&self, n: usize) {
        self.0.fetch_add(n, Ordering::Relaxed);
    }

    pub fn reset(&self) {
        self.0.store(0, Ordering::Relaxed);
    }
}

/// Talbot contour nodes δ_k and weights γ_k for a fixed order.
#[derive(Debug, Clone)]
pub struct TalbotNodes {
    pub order: usize,
    pub deltas: Vec<Complex64>,
    pub gammas: Vec<Complex64>,
}

/// cot with a series guard near the real zeros of sin.
fn cot(x: f64) -> f64 {
    let s = x.sin();
    if s.abs() < 1e-8 {
        // x near 0 or π: cot x ≈ 1/x − x/3 (shifted for the π case)
        let r = if x > std::f64::consts::FRAC_PI_2 { x - std::f64::consts::PI } else { x };
        return 1.0 / r - r / 3.0;
    }
    x.cos() / s
}

/// Generate the order-`I` node/weight set.
pub fn talbot_nodes(order: usize) -> Result<TalbotNodes> {
    if order < 1 {
        return Err(Error::InvalidArgument("talbot order must be >= 1".into()));
    }
    let i_f = order as f64;
    let mut deltas = Vec::with_capacity(order);
    let mut gammas = Vec::with_capacity(order);
    deltas.push(Complex64::new(2.0 * i_f / 5.0, 0.0));
    gammas.push(0.5 * deltas[0].exp());
    for k in 1..order {
        let theta = k as f64 * std::f64::consts::PI / i_f;
        let c = cot(theta);
        let delta = Complex64::new(2.0 * k as f64 * std::f64::consts::PI / 5.0 * c,
                                   2.0 * k as f64 * std::f64::consts::PI / 5.0);
        let gamma = (Complex64::new(1.0, 0.0)
            + Complex64::new(0.0, theta * (1.0 + c * c))
            - Complex64::new(0.0, c))
            * delta.exp();
        deltas.push(delta);
        gammas.push(gamma);
    }
    Ok(TalbotNodes { order, deltas, gammas })
}

/// Invert `fhat` at time `t > 0` with the given order.
pub fn talbot_invert<F>(fhat: F, t: f64, order: usize, counter: Option<&EvalCounter>) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64,
{
    let nodes = talbot_nodes(order)?;
    talbot_invert_with(&nodes, fhat, t, counter)
}

/// Invert using a precomputed node set (the nodes scale as δ_k / t).
pub fn talbot_invert_with<F>(
    nodes: &TalbotNodes,
    fhat: F,
    t: f64,
    counter: Option<&EvalCounter>,
) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64,
{
    if t <= 0.0 {
        return Err(Error::InvalidArgument(format!("talbot_invert requires t > 0, got {t}")));
    }
    let mut acc = 0.0;
    for k in 0..nodes.order {
        let v = fhat(nodes.deltas[k] / t);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite(format!("s = {}", nodes.deltas[k] / t)));
        }
        acc += (nodes.gammas[k] * v).re;
    }
    if let Some(c) = counter {
        c.add(nodes.order);
    }
    Ok(2.0 / (5.0 * t) * acc)
}

/// Inner inversion at a complex outer node: the original is complex-valued,
/// so each folded term evaluates its conjugate pair explicitly.
fn talbot_invert_complex<F>(nodes: &TalbotNodes, fhat: F, t: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    // unfolded trapezoid over the full contour:
    //   (1/5t) [ 2γ_0 f̂(δ_0/t) + Σ_{k≥1} γ_k f̂(δ_k/t) + conj(γ_k) f̂(conj(δ_k)/t) ]
    let mut acc = 2.0 * nodes.gammas[0] * fhat(nodes.deltas[0] / t);
    for k in 1..nodes.order {
        acc += nodes.gammas[k] * fhat(nodes.deltas[k] / t)
            + nodes.gammas[k].conj() * fhat(nodes.deltas[k].conj() / t);
    }
    if !acc.re.is_finite() || !acc.im.is_finite() {
        return Err(Error::NonFinite("2-d inner inversion".into()));
    }
    Ok(acc / (5.0 * t))
}

/// Nested two-dimensional inversion: outer contour in s₁ at `t1`, inner
/// contour in s₂ at `t2`. Exactly `order1 · order2` contour nodes are
/// recorded on the counter.
pub fn talbot_invert_2d<F>(
    fhat2: F,
    t1: f64,
    t2: f64,
    order1: usize,
    order2: usize,
    counter: Option<&EvalCounter>,
) -> Result<f64>
where
    F: Fn(Complex64, Complex64) -> Complex64,
{
    if t1 <= 0.0 || t2 <= 0.0 {
        return Err(Error::InvalidArgument("2-d inversion requires t1, t2 > 0".into()));
    }
    let outer = talbot_nodes(order1)?;
    let inner = talbot_nodes(order2)?;
    let mut acc = 0.0;
    for j in 0..order1 {
        let s1 = outer.deltas[j] / t1;
        let g = talbot_invert_complex(&inner, |s2| fhat2(s1, s2), t2)?;
        acc += (outer.gammas[j] * g).re;
    }
    if let Some(c) = counter {
        c.add(order1 * order2);
    }
    Ok(2.0 / (5.0 * t1) * acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64 as C;

    #[test]
    fn node_invariants() {
        let n = talbot_nodes(10).unwrap();
        assert_eq!(n.deltas.len(), 10);
        assert_eq!(n.gammas.len(), 10);
        // δ_0 = 2I/5 = 4, real
        assert_relative_eq!(n.deltas[0].re, 4.0);
        assert_eq!(n.deltas[0].im, 0.0);
        // Im(δ_k) = 2kπ/5
        for k in 1..10 {
            assert_relative_eq!(
                n.deltas[k].im,
                2.0 * k as f64 * std::f64::consts::PI / 5.0,
                max_relative = 1e-14
            );
        }
        // δ_5 = 2πi (cot(π/2) = 0)
        assert!(n.deltas[5].re.abs() < 1e-12);
        assert_relative_eq!(n.deltas[5].im, 2.0 * std::f64::consts::PI, max_relative = 1e-14);
        // γ_0 = e^4 / 2
        assert_relative_eq!(n.gammas[0].re, 0.5 * 4.0f64.exp(), max_relative = 1e-14);
    }

    #[test]
    fn inverts_reference_transforms() {
        let c = EvalCounter::new();
        let v = talbot_invert(|s| 1.0 / s, 1.0, 24, Some(&c)).unwrap();
        assert_relative_eq!(v, 1.0, epsilon = 1e-10);
        assert_eq!(c.count(), 24);

        let v = talbot_invert(|s| 1.0 / (s + 1.0), 1.0, 24, None).unwrap();
        assert_relative_eq!(v, (-1.0f64).exp(), epsilon = 1e-10);

        let v = talbot_invert(|s| 1.0 / (s * s), 2.0, 24, None).unwrap();
        assert_relative_eq!(v, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn linear_in_the_transform() {
        let f = |s: C| 1.0 / (s + 1.0);
        let g = |s: C| 1.0 / (s * s + s + 2.0);
        let (a, b) = (2.5, -1.25);
        let lhs = talbot_invert(|s| a * f(s) + b * g(s), 0.7, 24, None).unwrap();
        let rhs = a * talbot_invert(f, 0.7, 24, None).unwrap()
            + b * talbot_invert(g, 0.7, 24, None).unwrap();
        assert_relative_eq!(lhs, rhs, epsilon = 1e-12);
    }

    #[test]
    fn two_dimensional_separable() {
        let c = EvalCounter::new();
        let v = talbot_invert_2d(|s1, s2| 1.0 / (s1 * s2), 1.0, 1.0, 16, 16, Some(&c)).unwrap();
        assert_relative_eq!(v, 1.0, epsilon = 1e-8);
        assert_eq!(c.count(), 256);

        let v = talbot_invert_2d(
            |s1, s2| 1.0 / ((s1 + 1.0) * (s2 + 1.0)),
            1.0,
            1.0,
            24,
            24,
            None,
        )
        .unwrap();
        assert_relative_eq!(v, (-2.0f64).exp(), epsilon = 1e-8);
    }

    #[test]
    fn two_dimensional_eval_count() {
        let c = EvalCounter::new();
        talbot_invert_2d(|s1, s2| 1.0 / (s1 * s2), 1.0, 1.0, 8, 8, Some(&c)).unwrap();
        assert_eq!(c.count(), 64);
    }

    #[test]
    fn product_of_one_dimensional_inversions() {
        // separable transform: 2-d inversion equals the product of 1-d ones
        let f = |s: C| 1.0 / (s + 0.5);
        let g = |s: C| 1.0 / (s + 2.0);
        let v2 = talbot_invert_2d(|s1, s2| f(s1) * g(s2), 0.8, 1.3, 24, 24, None).unwrap();
        let v1 = talbot_invert(f, 0.8, 24, None).unwrap() * talbot_invert(g, 1.3, 24, None).unwrap();
        assert_relative_eq!(v2, v1, epsilon = 1e-8);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(talbot_nodes(0).is_err());
        assert!(talbot_invert(|s| 1.0 / s, 0.0, 8, None).is_err());
        assert!(talbot_invert(|s| C::new(f64::NAN, 0.0) + s * 0.0, 1.0, 8, None).is_err());
    }
}
