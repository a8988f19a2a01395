use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{max_diff, power, CMat};
use crate::{Error, Result};

/// Cyclic dilogarithm: values on the points `w_k = exp(i pi / N) omega^k`
/// (the `N`-th roots of `-1`) solving
/// `Psi(omega w) (1 - w lambda) / lambda' = Psi(w)`.
#[derive(Clone, Debug, Serialize)]
pub struct CyclicPsi {
    pub n: usize,
    pub lambda: f64,
    pub lambda_prime: f64,
    pub points: Vec<Complex64>,
    pub values: Vec<Complex64>,
}

pub fn cyclic_psi(n: usize, lambda: f64) -> Result<CyclicPsi> {
    cyclic_psi_from(n, lambda, 0)
}

/// Normalised by `Psi(w_base) = 1`.
pub fn cyclic_psi_from(n: usize, lambda: f64, base: usize) -> Result<CyclicPsi> {
    if n < 2 || base >= n {
        return Err(Error::Constraint(format!(
            "need N >= 2 and base < N, got N={n}, base={base}"
        )));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let omega = Complex64::from_polar(1.0, 2.0 * PI / n as f64);
    let w0 = Complex64::from_polar(1.0, PI / n as f64);
    let points: Vec<Complex64> = (0..n).map(|k| w0 * omega.powu(k as u32)).collect();
    let lambda_prime = (1.0 + lambda.powi(n as i32)).powf(1.0 / n as f64);
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    values[base] = Complex64::new(1.0, 0.0);
    for step in 0..n - 1 {
        let k = (base + step) % n;
        values[(k + 1) % n] = values[k] * lambda_prime / (1.0 - points[k] * lambda);
    }
    Ok(CyclicPsi {
        n,
        lambda,
        lambda_prime,
        points,
        values,
    })
}

impl CyclicPsi {
    /// `|prod_k (1 - omega^k w0 lambda) - lambda'^N|`.
    pub fn closure_residual(&self) -> f64 {
        let prod: Complex64 = self.points.iter().map(|w| 1.0 - w * self.lambda).product();
        (prod - self.lambda_prime.powi(self.n as i32)).norm()
    }

    /// Largest residual of the functional equation over all points,
    /// including the step that wraps around the cycle.
    pub fn functional_residual(&self) -> f64 {
        (0..self.n)
            .map(|k| {
                let next = self.values[(k + 1) % self.n];
                (next * (1.0 - self.points[k] * self.lambda) / self.lambda_prime - self.values[k])
                    .norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max |self - c other|` for the best single factor `c`.
    pub fn distance_up_to_factor(&self, other: &Self) -> f64 {
        let c = self.values[0] / other.values[0];
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - c * b).norm())
            .fold(0.0, f64::max)
    }

    /// Coefficients `c_m` of the polynomial `sum_m c_m w^m` through the
    /// tabulated values. The nodes are `w0 omega^k`, so this is a discrete
    /// Fourier transform: `c_m = (1/N) sum_k Psi(w_k) w_k^(-m)`.
    pub fn interpolation_coefficients(&self) -> Vec<Complex64> {
        (0..self.n)
            .map(|m| {
                self.points
                    .iter()
                    .zip(&self.values)
                    .map(|(w, v)| v * w.powi(-(m as i32)))
                    .sum::<Complex64>()
                    / self.n as f64
            })
            .collect()
    }

    /// `Psi(m)` for a matrix with `m^N = -1`.
    pub fn apply(&self, m: &CMat) -> Result<CMat> {
        let id = CMat::identity(m.nrows(), m.ncols());
        let res = max_diff(&power(m, self.n), &(-&id));
        if res > 1e-9 {
            return Err(Error::Numerical(format!(
                "argument of Psi does not satisfy M^N = -1 (residual {res:.3e})"
            )));
        }
        let mut out = CMat::zeros(m.nrows(), m.ncols());
        let mut p = id;
        for c in self.interpolation_coefficients() {
            out += &p * c;
            p = &p * m;
        }
        Ok(out)
    }
}
