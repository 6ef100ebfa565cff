//! Problem-instance description: batch arrival process, bounded-support
//! service distribution, attached scheduling policy, traffic intensity.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::policies::PolicyKernel;

/// Compound-Poisson batch arrivals: epoch rate Γ and the batch-size
/// PGF coefficients f₀ … f_n.
#[derive(Debug, Clone)]
pub struct BatchArrivalSpec {
    pub rate: f64,
    pub pgf_coeffs: Vec<f64>,
}

impl BatchArrivalSpec {
    pub fn new(rate: f64, pgf_coeffs: Vec<f64>) -> Result<Self> {
        let spec = BatchArrivalSpec { rate, pgf_coeffs };
        let issues = spec.check();
        if issues.is_empty() {
            Ok(spec)
        } else {
            Err(Error::InvalidModel(issues.join("; ")))
        }
    }

    /// Unit batches (every arrival is a single job).
    pub fn unit(rate: f64) -> Result<Self> {
        Self::new(rate, vec![0.0, 1.0])
    }

    pub fn degree(&self) -> usize {
        self.pgf_coeffs.len().saturating_sub(1)
    }

    fn check(&self) -> Vec<String> {
        let mut issues = Vec::new();
        if !(self.rate > 0.0) {
            issues.push(format!("arrival rate must be positive, got {}", self.rate));
        }
        if self.degree() < 1 {
            issues.push("batch pgf needs degree >= 1".into());
        }
        if self.pgf_coeffs.iter().any(|f| *f < 0.0) {
            issues.push("pgf coefficients must be nonnegative".into());
        }
        let sum: f64 = self.pgf_coeffs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            issues.push(format!("pgf coefficients sum to {sum}"));
        }
        issues
    }

    /// f(x) = Σ fₗ xˡ.
    pub fn pgf_eval(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.pgf_coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// f′(x) = Σ ℓ fₗ x^{ℓ−1}.
    pub fn pgf_derivative(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (l, &c) in self.pgf_coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * x + c * l as f64;
        }
        acc
    }

    /// Mean batch size f′(1).
    pub fn mean_batch(&self) -> f64 {
        self.pgf_derivative(Complex64::new(1.0, 0.0)).re
    }

    /// Draw a batch size (requires f₀ = 0 contexts to have been validated).
    pub fn sample_batch<R: Rng>(&self, rng: &mut R) -> usize {
        let mut u: f64 = rng.gen();
        for (l, &p) in self.pgf_coeffs.iter().enumerate() {
            if u < p {
                return l;
            }
            u -= p;
        }
        self.degree()
    }
}

/// One polynomial density piece on [lo, hi): g(x) = Σ cₖ xᵏ.
#[derive(Debug, Clone)]
pub struct PolyPiece {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

impl PolyPiece {
    pub fn density(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// ∫_{lo}^{min(x, hi)} g
    fn mass_below(&self, x: f64) -> f64 {
        let hi = x.min(self.hi);
        if hi <= self.lo {
            return 0.0;
        }
        let anti = |y: f64| -> f64 {
            let mut acc = 0.0;
            for (k, &c) in self.coeffs.iter().enumerate().rev() {
                acc = acc * y + c / (k as f64 + 1.0);
            }
            acc * y
        };
        anti(hi) - anti(self.lo)
    }

    fn mass(&self) -> f64 {
        self.mass_below(self.hi)
    }

    fn first_moment(&self) -> f64 {
        // ∫ x g(x) dx over the piece
        let anti = |y: f64| -> f64 {
            let mut acc = 0.0;
            for (k, &c) in self.coeffs.iter().enumerate().rev() {
                acc = acc * y + c / (k as f64 + 2.0);
            }
            acc * y * y
        };
        anti(self.hi) - anti(self.lo)
    }
}

/// A point mass in the service distribution.
#[derive(Debug, Clone, Copy)]
pub struct PointMass {
    pub at: f64,
    pub weight: f64,
}

/// Bounded-support service distribution: piecewise-polynomial density
/// plus a finite set of atoms.
#[derive(Debug, Clone)]
pub struct ServiceSpec {
    pub pieces: Vec<PolyPiece>,
    pub atoms: Vec<PointMass>,
    pub support_max: f64,
    pub mean: f64,
}

impl ServiceSpec {
    pub fn new(pieces: Vec<PolyPiece>, atoms: Vec<PointMass>) -> Result<Self> {
        let support_max = pieces
            .iter()
            .map(|p| p.hi)
            .chain(atoms.iter().map(|a| a.at))
            .fold(0.0f64, f64::max);
        let mean = pieces.iter().map(|p| p.first_moment()).sum::<f64>()
            + atoms.iter().map(|a| a.at * a.weight).sum::<f64>();
        let spec = ServiceSpec { pieces, atoms, support_max, mean };
        let issues = spec.check();
        if issues.is_empty() {
            Ok(spec)
        } else {
            Err(Error::InvalidModel(issues.join("; ")))
        }
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![PolyPiece { lo, hi, coeffs: vec![1.0 / (hi - lo)] }], vec![])
    }

    pub fn deterministic(x: f64) -> Result<Self> {
        Self::new(vec![], vec![PointMass { at: x, weight: 1.0 }])
    }

    fn check(&self) -> Vec<String> {
        let mut issues = Vec::new();
        if !(self.support_max > 0.0) {
            issues.push("service support must have positive upper bound".into());
        }
        for p in &self.pieces {
            if !(p.lo < p.hi) || p.lo < 0.0 {
                issues.push(format!("bad piece bounds [{}, {}]", p.lo, p.hi));
                continue;
            }
            for k in 0..=200 {
                let x = p.lo + (p.hi - p.lo) * k as f64 / 200.0;
                if p.density(x) < -1e-12 {
                    issues.push(format!("density negative at x = {x}"));
                    break;
                }
            }
        }
        for a in &self.atoms {
            if a.weight < 0.0 || a.at <= 0.0 {
                issues.push(format!("bad atom ({}, {})", a.at, a.weight));
            }
        }
        let total: f64 = self.pieces.iter().map(|p| p.mass()).sum::<f64>()
            + self.atoms.iter().map(|a| a.weight).sum::<f64>();
        if (total - 1.0).abs() > 1e-10 {
            issues.push(format!("density integrates to {total}"));
        }
        let mean_check: f64 = self.pieces.iter().map(|p| p.first_moment()).sum::<f64>()
            + self.atoms.iter().map(|a| a.at * a.weight).sum::<f64>();
        if (mean_check - self.mean).abs() > 1e-10 {
            issues.push("stored mean out of sync with density".into());
        }
        issues
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let mut acc: f64 = self.pieces.iter().map(|p| p.mass_below(x)).sum();
        for a in &self.atoms {
            if a.at <= x {
                acc += a.weight;
            }
        }
        acc.min(1.0)
    }

    pub fn survival(&self, x: f64) -> f64 {
        (1.0 - self.cdf(x)).max(0.0)
    }

    /// Deterministic inverse-CDF draw.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        self.quantile(u)
    }

    pub fn quantile(&self, u: f64) -> f64 {
        // walk atoms and pieces in position order
        let mut events: Vec<(f64, f64, Option<usize>)> = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            events.push((p.lo, p.mass(), Some(i)));
        }
        for a in &self.atoms {
            events.push((a.at, a.weight, None));
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut rem = u;
        for (at, mass, idx) in &events {
            if rem <= *mass {
                return match idx {
                    None => *at,
                    Some(i) => {
                        let p = &self.pieces[*i];
                        // bisect mass_below(x) = rem on [lo, hi]
                        let (mut lo, mut hi) = (p.lo, p.hi);
                        for _ in 0..80 {
                            let mid = 0.5 * (lo + hi);
                            if p.mass_below(mid) < rem {
                                lo = mid;
                            } else {
                                hi = mid;
                            }
                        }
                        0.5 * (lo + hi)
                    }
                };
            }
            rem -= mass;
        }
        self.support_max
    }

    /// Breakpoints of the density (piece boundaries), used by the
    /// transform pipelines to split z-integrals.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .pieces
            .iter()
            .flat_map(|p| [p.lo, p.hi])
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        b
    }
}

/// A full problem instance.
#[derive(Debug, Clone)]
pub struct QueueModel {
    pub arrival: BatchArrivalSpec,
    pub service: ServiceSpec,
    pub policy: PolicyKernel,
    pub rho: f64,
}

impl QueueModel {
    pub fn new(arrival: BatchArrivalSpec, service: ServiceSpec, policy: PolicyKernel) -> Self {
        let rho = arrival.rate * arrival.mean_batch() * service.mean;
        let policy = policy.with_gamma(arrival.rate);
        QueueModel { arrival, service, policy, rho }
    }

    /// ρ = Γ · f′(1) · E[ℓ].
    pub fn traffic_intensity(&self) -> f64 {
        self.rho
    }

    /// Check every type invariant; `stationary` additionally requires
    /// ρ < 1 and a zero-probability empty batch. All violations are
    /// reported, not just the first.
    pub fn validate(&self, stationary: bool) -> std::result::Result<(), Vec<String>> {
        let mut issues = self.arrival.check();
        issues.extend(self.service.check());
        issues.extend(self.policy.check());
        if stationary {
            if self.rho >= 1.0 {
                issues.push(format!("rho = {} >= 1", self.rho));
            }
            if self.arrival.pgf_coeffs[0] > 0.0 {
                issues.push("empty batches (f0 > 0) not allowed for stationary analysis".into());
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }
}
