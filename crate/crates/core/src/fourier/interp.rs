//! Interpolation and root-finding helpers for the risk curves.

use crate::error::{Result, RiskError};

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes).
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl MonotoneCubic {
    /// `x` must be strictly increasing; `y` monotone.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(RiskError::InvalidInput(
                "monotone cubic needs at least two aligned points".into(),
            ));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(RiskError::InvalidInput(
                "interpolation abscissae must be strictly increasing".into(),
            ));
        }
        let d: Vec<f64> = (0..n - 1)
            .map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i]))
            .collect();
        let mut m = vec![0.0; n];
        m[0] = d[0];
        m[n - 1] = d[n - 2];
        for i in 1..n - 1 {
            m[i] = if d[i - 1] * d[i] <= 0.0 {
                0.0
            } else {
                0.5 * (d[i - 1] + d[i])
            };
        }
        for i in 0..n - 1 {
            if d[i] == 0.0 {
                m[i] = 0.0;
                m[i + 1] = 0.0;
                continue;
            }
            let a = m[i] / d[i];
            let b = m[i + 1] / d[i];
            let s = a * a + b * b;
            if s > 9.0 {
                let tau = 3.0 / s.sqrt();
                m[i] = tau * a * d[i];
                m[i + 1] = tau * b * d[i];
            }
        }
        Ok(Self { x, y, m })
    }

    pub fn eval(&self, xq: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|&v| v <= xq) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let s = (xq - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.m[i] + h01 * self.y[i + 1] + h11 * h * self.m[i + 1]
    }
}

/// Number of nodes of the local interpolating polynomial on uniform grids.
pub(crate) const LAGRANGE_NODES: usize = 8;

/// Value and derivative of the degree-7 polynomial through the eight uniform
/// nodes around `x`. `x0` is the abscissa of `values[0]`.
pub(crate) fn lagrange_uniform(values: &[f64], x0: f64, dx: f64, x: f64) -> (f64, f64) {
    let n = values.len();
    let half = LAGRANGE_NODES / 2;
    let u = (x - x0) / dx;
    let j = (u.floor() as isize).clamp(half as isize - 1, (n - half - 1) as isize) as usize;
    let start = j + 1 - half;
    let s = u - start as f64;
    let nodes = &values[start..start + LAGRANGE_NODES];
    let mut val = 0.0;
    let mut der = 0.0;
    for (k, &yk) in nodes.iter().enumerate() {
        let mut num = 1.0;
        let mut den = 1.0;
        let mut dnum = 0.0;
        for l in 0..LAGRANGE_NODES {
            if l == k {
                continue;
            }
            let fac = s - l as f64;
            dnum = dnum * fac + num;
            num *= fac;
            den *= k as f64 - l as f64;
        }
        val += yk * num / den;
        der += yk * dnum / den;
    }
    (val, der / dx)
}

/// Brent's method on a sign-changing bracket.
pub fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    xtol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(RiskError::NoConvergence(format!(
            "root not bracketed on [{a}, {b}]: f = {fa}, {fb}"
        )));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(RiskError::NoConvergence(format!(
        "Brent iteration did not converge within {max_iter} steps"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_cubic_reproduces_nodes_and_preserves_order() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.3).collect();
        // steep step: a plain cubic spline would overshoot
        let y: Vec<f64> = x.iter().map(|&v| if v < 3.0 { 0.0 } else { 1.0 }).collect();
        let c = MonotoneCubic::new(x.clone(), y.clone()).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert_eq!(c.eval(*xi), *yi);
        }
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=600 {
            let v = c.eval(k as f64 * 0.0095);
            assert!(v >= prev - 1e-15 && (-1e-15..=1.0 + 1e-15).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn monotone_cubic_exact_on_lines() {
        let x = vec![0.0, 1.0, 2.5, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let c = MonotoneCubic::new(x, y).unwrap();
        assert!((c.eval(3.3) - 5.6).abs() < 1e-14);
        assert!(MonotoneCubic::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn lagrange_is_exact_for_degree_seven() {
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(3) - 0.1 * x.powi(7);
        let dp = |x: f64| -2.0 + 1.5 * x * x - 0.7 * x.powi(6);
        let x0 = -1.3;
        let dx = 0.11;
        let v: Vec<f64> = (0..30).map(|i| p(x0 + dx * i as f64)).collect();
        for &x in &[-1.25, -0.4, 0.0, 0.77, 1.8] {
            let (val, der) = lagrange_uniform(&v, x0, dx, x);
            assert!((val - p(x)).abs() < 1e-12, "{x}");
            assert!((der - dp(x)).abs() < 1e-10, "{x}");
        }
    }

    #[test]
    fn brent_finds_roots() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14, 100).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-13);
        let r = brent(|x| (x - 0.3).tanh(), -5.0, 9.0, 1e-14, 100).unwrap();
        assert!((r - 0.3).abs() < 1e-13);
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100).is_err());
    }
}
