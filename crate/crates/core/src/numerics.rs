//! Small numerical helpers shared across modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (n - 1) as f64;
            (0..n).map(|i| start + step * i as f64).collect()
        }
    }
}

/// Trapezoidal integral of `y` sampled at `x`.
pub fn trapz(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Linear interpolation on a sorted grid; clamps outside the grid.
pub fn interp1(x: &[f64], y: &[f64], xq: f64) -> f64 {
    let n = x.len();
    if n == 0 {
        return 0.0;
    }
    if xq <= x[0] {
        return y[0];
    }
    if xq >= x[n - 1] {
        return y[n - 1];
    }
    let i = x.partition_point(|&v| v <= xq).saturating_sub(1).min(n - 2);
    let t = (xq - x[i]) / (x[i + 1] - x[i]);
    y[i] + t * (y[i + 1] - y[i])
}

/// Bisection on a bracketing interval. `f(lo)` and `f(hi)` must differ in sign.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NonConvergence(format!(
            "no sign change on [{lo}, {hi}]"
        )));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo < xtol {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_section<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Gauss-Legendre nodes and weights on [-1, 1] (8 points).
const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

/// Composite 8-point Gauss-Legendre quadrature with `panels` sub-intervals.
pub fn gauss_legendre<F, T>(f: F, a: f64, b: f64, panels: usize) -> T
where
    F: Fn(f64) -> T,
    T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
{
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut acc = T::default();
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        for &(xi, wi) in GL8.iter() {
            acc = acc + f(mid + 0.5 * h * xi) * (0.5 * h * wi);
        }
    }
    acc
}

/// Solve the complex system `(j*omega*I - A) X = B` for a real state matrix `A`.
pub fn resolvent_solve(
    a: &DMatrix<f64>,
    omega: f64,
    rhs: &DMatrix<Complex64>,
) -> Result<DMatrix<Complex64>> {
    let n = a.nrows();
    let mut m = DMatrix::<Complex64>::from_fn(n, n, |i, j| Complex64::new(-a[(i, j)], 0.0));
    for i in 0..n {
        m[(i, i)] += Complex64::new(0.0, omega);
    }
    m.lu()
        .solve(rhs)
        .ok_or_else(|| Error::Numerical(format!("singular resolvent at omega = {omega}")))
}

/// Central-difference Jacobian of a vector function.
pub fn jacobian<F>(f: F, x: &DVector<f64>, steps: &[f64]) -> DMatrix<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let n = x.len();
    let f0 = f(x);
    let mut jac = DMatrix::zeros(f0.len(), n);
    for j in 0..n {
        let h = steps[j];
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        let col = (f(&xp) - f(&xm)) / (2.0 * h);
        jac.set_column(j, &col);
    }
    jac
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapz_of_line() {
        let x = linspace(0.0, 2.0, 11);
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        assert!((trapz(&x, &y) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn interp_clamps() {
        let x = [0.0, 1.0, 2.0];
        let y = [0.0, 10.0, 40.0];
        assert_eq!(interp1(&x, &y, -1.0), 0.0);
        assert_eq!(interp1(&x, &y, 5.0), 40.0);
        assert!((interp1(&x, &y, 1.5) - 25.0).abs() < 1e-12);
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-12, 200).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-10);
        assert!(bisect(|x| x * x + 1.0, 0.0, 2.0, 1e-9, 100).is_err());
    }

    #[test]
    fn golden_finds_parabola_min() {
        let x = golden_section(|x| (x - 1.3).powi(2), -5.0, 5.0, 1e-9);
        assert!((x - 1.3).abs() < 1e-7);
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let v: f64 = gauss_legendre(|x| x.powi(7) - 2.0 * x * x, -1.0, 3.0, 1);
        let exact = (3f64.powi(8) - 1.0) / 8.0 - 2.0 * (27.0 + 1.0) / 3.0;
        assert!((v - exact).abs() < 1e-9);
    }
}
