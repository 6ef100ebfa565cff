//! Double-double arithmetic for the high-order Talbot path.
//!
//! The inversion weights grow like e^{2I/5}, so the number of digits an
//! order-I inversion can deliver in plain f64 saturates near 11–13. The
//! accuracy budget of the order-32 contour (≈19 digits) therefore needs
//! roughly twice the f64 mantissa. A pair-of-doubles representation
//! (~31 significant digits) is enough, and keeps everything in fixed
//! precision; only the node generation, the weighted sum and the test
//! transforms run in it.

/// Unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

pub const DD_PI: Dd = Dd { hi: 3.141592653589793116e0, lo: 1.224646799147353207e-16 };
pub const DD_2PI: Dd = Dd { hi: 6.283185307179586232e0, lo: 2.449293598294706414e-16 };
pub const DD_PI_2: Dd = Dd { hi: 1.570796326794896558e0, lo: 6.123233995736766036e-17 };
pub const DD_LN2: Dd = Dd { hi: 6.931471805599452862e-1, lo: 2.319046813846299558e-17 };

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::from(q2)));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from(q3))
    }

    #[inline]
    pub fn scale(self, k: f64) -> Dd {
        self.mul(Dd::from(k))
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) { self.neg() } else { self }
    }

    /// exp(x) by base-2 argument reduction and a Taylor tail.
    pub fn exp(self) -> Dd {
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let m = (self.hi / DD_LN2.hi).round();
        let r = self.sub(DD_LN2.mul(Dd::from(m)));
        // |r| <= ln2/2; Taylor sum of e^r
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for n in 1..32 {
            term = term.mul(r).div(Dd::from(n as f64));
            sum = sum.add(term);
            if term.hi.abs() < 1e-36 * sum.hi.abs() {
                break;
            }
        }
        Dd { hi: ldexp(sum.hi, m as i32), lo: ldexp(sum.lo, m as i32) }
    }

    /// sin(x) for |x| ≲ 50 via mod-2π reduction and quadrant folding.
    pub fn sin(self) -> Dd {
        let (r, quadrant) = reduce_pi_2(self);
        match quadrant {
            0 => sin_taylor(r),
            1 => cos_taylor(r),
            2 => sin_taylor(r).neg(),
            _ => cos_taylor(r).neg(),
        }
    }

    /// cos(x) under the same reduction as [`Dd::sin`].
    pub fn cos(self) -> Dd {
        let (r, quadrant) = reduce_pi_2(self);
        match quadrant {
            0 => cos_taylor(r),
            1 => sin_taylor(r).neg(),
            2 => cos_taylor(r).neg(),
            _ => sin_taylor(r),
        }
    }
}

fn ldexp(x: f64, e: i32) -> f64 {
    x * (2.0f64).powi(e)
}

/// Reduce to r ∈ [−π/4, π/4] plus quadrant index mod 4.
fn reduce_pi_2(x: Dd) -> (Dd, i32) {
    let k = (x.hi / DD_PI_2.hi).round();
    let r = x.sub(DD_PI_2.mul(Dd::from(k)));
    ((r), ((k as i64) % 4 + 4) as i32 % 4)
}

fn sin_taylor(x: Dd) -> Dd {
    let x2 = x.mul(x);
    let mut term = x;
    let mut sum = x;
    for n in 1..20 {
        let d = ((2 * n) * (2 * n + 1)) as f64;
        term = term.mul(x2).div(Dd::from(d)).neg();
        sum = sum.add(term);
        if term.hi.abs() < 1e-36 * sum.hi.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn cos_taylor(x: Dd) -> Dd {
    let x2 = x.mul(x);
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    for n in 1..20 {
        let d = ((2 * n - 1) * (2 * n)) as f64;
        term = term.mul(x2).div(Dd::from(d)).neg();
        sum = sum.add(term);
        if term.hi.abs() < 1e-36 * sum.hi.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Complex double-double.
#[derive(Debug, Clone, Copy)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ONE: DdComplex = DdComplex { re: Dd::ONE, im: Dd::ZERO };

    pub fn new(re: Dd, im: Dd) -> Self {
        DdComplex { re, im }
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        DdComplex { re: Dd::from(re), im: Dd::from(im) }
    }

    pub fn add(self, o: DdComplex) -> DdComplex {
        DdComplex { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    pub fn sub(self, o: DdComplex) -> DdComplex {
        DdComplex { re: self.re.sub(o.re), im: self.im.sub(o.im) }
    }

    pub fn mul(self, o: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    pub fn div(self, o: DdComplex) -> DdComplex {
        let den = o.re.mul(o.re).add(o.im.mul(o.im));
        let num = self.mul(DdComplex { re: o.re, im: o.im.neg() });
        DdComplex { re: num.re.div(den), im: num.im.div(den) }
    }

    /// e^{re} (cos im + i sin im)
    pub fn exp(self) -> DdComplex {
        let m = self.re.exp();
        DdComplex { re: m.mul(self.im.cos()), im: m.mul(self.im.sin()) }
    }

    pub fn scale(self, k: Dd) -> DdComplex {
        DdComplex { re: self.re.mul(k), im: self.im.mul(k) }
    }
}

/// Order-`I` Talbot inversion carried out entirely in double-double
/// arithmetic. The transform must itself be evaluated in double-double;
/// this is what the accuracy-scaling tests use.
pub fn talbot_invert_dd<F>(fhat: F, t: Dd, order: usize) -> Dd
where
    F: Fn(DdComplex) -> DdComplex,
{
    let i_f = order as f64;
    let mut acc = Dd::ZERO;
    for k in 0..order {
        let (delta, gamma) = if k == 0 {
            // 2I/5 formed in double-double: the f64 rounding of the node
            // alone would cap the sum at f64 accuracy
            let d = Dd::from(2.0 * i_f).div(Dd::from(5.0));
            let g = d.exp().scale(0.5);
            (DdComplex { re: d, im: Dd::ZERO }, DdComplex { re: g, im: Dd::ZERO })
        } else {
            let theta = DD_PI.mul(Dd::from(k as f64)).div(Dd::from(i_f));
            let c = theta.cos().div(theta.sin());
            let coef = DD_2PI.mul(Dd::from(k as f64)).div(Dd::from(5.0));
            let delta = DdComplex { re: coef.mul(c), im: coef };
            // {1 + i θ (1 + c²) − i c} e^{δ}
            let bracket = DdComplex {
                re: Dd::ONE,
                im: theta.mul(Dd::ONE.add(c.mul(c))).sub(c),
            };
            (delta, bracket.mul(delta.exp()))
        };
        let s = DdComplex { re: delta.re.div(t), im: delta.im.div(t) };
        let v = fhat(s);
        acc = acc.add(gamma.re.mul(v.re).sub(gamma.im.mul(v.im)));
    }
    acc.mul(Dd::from(2.0)).div(Dd::from(5.0).mul(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_round_trip() {
        let a = Dd::from(1.0).div(Dd::from(3.0));
        let b = a.mul(Dd::from(3.0));
        assert!((b.sub(Dd::ONE)).abs().to_f64() < 1e-31);
    }

    #[test]
    fn exp_log_identity_points() {
        let e1 = Dd::from(1.0).exp();
        assert!((e1.to_f64() - std::f64::consts::E).abs() < 1e-15);
        let big = Dd::from(12.8).exp();
        assert!((big.to_f64() - 12.8f64.exp()).abs() / 12.8f64.exp() < 1e-15);
    }

    #[test]
    fn trig_against_f64() {
        for k in 1..32 {
            let x = k as f64 * std::f64::consts::PI / 32.0;
            assert!((Dd::from(x).sin().to_f64() - x.sin()).abs() < 1e-15);
            assert!((Dd::from(x).cos().to_f64() - x.cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn dd_talbot_reaches_contour_accuracy() {
        // order 32 must deliver ≥ 0.6·32 − 1 = 18.2 digits on 1/(s+1)
        let t = Dd::from(1.0);
        let v = talbot_invert_dd(|s| DdComplex::ONE.div(s.add(DdComplex::ONE)), t, 32);
        let truth = Dd::from(-1.0).exp();
        let rel = v.sub(truth).abs().div(truth.abs()).to_f64();
        assert!(rel < 10f64.powf(-18.2), "relative error {rel:e}");
    }
}
