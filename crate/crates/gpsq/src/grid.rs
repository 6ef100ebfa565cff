//! Tabulated functions on nonuniform grids with monotone cubic
//! (Fritsch–Carlson) interpolation. Complex-valued tables interpolate
//! the real and imaginary parts independently.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Value types a [`GridFunction`] can hold.
pub trait GridScalar: Copy + std::fmt::Debug {
    fn split(self) -> [f64; 2];
    fn join(parts: [f64; 2]) -> Self;
    fn is_finite_value(self) -> bool;
}

impl GridScalar for f64 {
    fn split(self) -> [f64; 2] {
        [self, 0.0]
    }
    fn join(parts: [f64; 2]) -> Self {
        parts[0]
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl GridScalar for Complex64 {
    fn split(self) -> [f64; 2] {
        [self.re, self.im]
    }
    fn join(parts: [f64; 2]) -> Self {
        Complex64::new(parts[0], parts[1])
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// A function tabulated on a strictly increasing grid.
#[derive(Debug, Clone)]
pub struct GridFunction<T: GridScalar = f64> {
    grid: Vec<f64>,
    values: Vec<T>,
    // PCHIP endpoint-derivatives per component
    slopes: [Vec<f64>; 2],
}

impl<T: GridScalar> GridFunction<T> {
    pub fn new(grid: Vec<f64>, values: Vec<T>) -> Result<Self> {
        if grid.len() != values.len() || grid.len() < 2 {
            return Err(Error::InvalidArgument(
                "grid function needs matching grid/value lengths >= 2".into(),
            ));
        }
        if !grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("grid must be strictly increasing".into()));
        }
        if !values.iter().all(|v| v.is_finite_value()) {
            return Err(Error::NonFinite("grid function value".into()));
        }
        let comp0: Vec<f64> = values.iter().map(|v| v.split()[0]).collect();
        let comp1: Vec<f64> = values.iter().map(|v| v.split()[1]).collect();
        let slopes = [pchip_slopes(&grid, &comp0), pchip_slopes(&grid, &comp1)];
        Ok(GridFunction { grid, values, slopes })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn t_max(&self) -> f64 {
        *self.grid.last().expect("non-empty grid")
    }

    /// Interpolated value; clamps outside the tabulated range.
    pub fn eval(&self, x: f64) -> T {
        if x <= self.grid[0] {
            return self.values[0];
        }
        if x >= self.t_max() {
            return *self.values.last().expect("non-empty values");
        }
        let i = match self.grid.binary_search_by(|g| g.total_cmp(&x)) {
            Ok(j) => return self.values[j],
            Err(j) => j - 1,
        };
        let h = self.grid[i + 1] - self.grid[i];
        let s = (x - self.grid[i]) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        let mut parts = [0.0; 2];
        for (c, part) in parts.iter_mut().enumerate() {
            let y0 = self.values[i].split()[c];
            let y1 = self.values[i + 1].split()[c];
            let m0 = self.slopes[c][i];
            let m1 = self.slopes[c][i + 1];
            *part = h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
        }
        T::join(parts)
    }
}

/// Fritsch–Carlson monotone slopes.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut d = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        d.push((y[i + 1] - y[i]) / (x[i + 1] - x[i]));
    }
    let mut m = vec![0.0; n];
    m[0] = edge_slope(x[1] - x[0], x[2.min(n - 1)] - x[1.min(n - 2)], d[0], d[1.min(d.len() - 1)]);
    m[n - 1] = edge_slope(
        x[n - 1] - x[n - 2],
        x[n - 2] - x[n - 3.min(n - 2)],
        d[n - 2],
        d[n - 2 - usize::from(n > 2)],
    );
    for i in 1..n - 1 {
        if d[i - 1] * d[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let w1 = 2.0 * h1 + h0;
            let w2 = h1 + 2.0 * h0;
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    m
}

fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    // three-point estimate, clamped to keep the interpolant monotone
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

/// Power-graded grid on [0, t_max], denser near zero.
pub fn graded_grid(t_max: f64, n_points: usize, grade: f64) -> Vec<f64> {
    let m = n_points.max(2) - 1;
    (0..=m).map(|j| t_max * ((j as f64) / (m as f64)).powf(grade)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_at_grid_points() {
        let g = graded_grid(5.0, 33, 2.0);
        let v: Vec<f64> = g.iter().map(|t| (-t).exp()).collect();
        let gf = GridFunction::new(g.clone(), v.clone()).unwrap();
        for (x, y) in g.iter().zip(&v) {
            assert_eq!(gf.eval(*x), *y);
        }
    }

    #[test]
    fn interpolation_error_small_on_smooth_data() {
        let g = graded_grid(5.0, 200, 1.5);
        let v: Vec<f64> = g.iter().map(|t| (-t).exp()).collect();
        let gf = GridFunction::new(g, v).unwrap();
        for k in 0..500 {
            let x = 5.0 * (k as f64 + 0.5) / 500.0;
            assert_relative_eq!(gf.eval(x), (-x).exp(), epsilon = 2e-6);
        }
    }

    #[test]
    fn monotone_data_stays_monotone() {
        let g = vec![0.0, 1.0, 1.5, 4.0, 4.5, 6.0];
        let v = vec![0.0, 0.2, 0.5, 0.9, 0.95, 1.0];
        let gf = GridFunction::new(g, v).unwrap();
        let mut prev = -1.0;
        for k in 0..=600 {
            let x = 6.0 * k as f64 / 600.0;
            let y = gf.eval(x);
            assert!(y >= prev - 1e-12, "overshoot at {x}: {y} < {prev}");
            prev = y;
        }
    }

    #[test]
    fn complex_values_interpolate_componentwise() {
        let g = vec![0.0, 0.5, 1.0, 2.0];
        let v: Vec<Complex64> =
            g.iter().map(|t| Complex64::new(*t, -t)).collect();
        let gf = GridFunction::new(g, v).unwrap();
        let z = gf.eval(0.75);
        assert_relative_eq!(z.re, 0.75, epsilon = 1e-12);
        assert_relative_eq!(z.im, -0.75, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridFunction::new(vec![0.0, 0.0, 1.0], vec![1.0, 2.0, 3.0]).is_err());
        assert!(GridFunction::new(vec![0.0], vec![1.0]).is_err());
    }
}
