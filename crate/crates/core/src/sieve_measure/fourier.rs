//! `phi(xi) = (1/2pi) int e^x chi(x) e^{i x xi} dx` and the identity
//! `int int (1+it)(1+it')/(2+it+it') phi(t) phi(t') dt dt' = 1`.
//!
//! `e^x chi(x)` is smooth with compact support in `[-1, 1]`, so the trapezoid
//! rule on a uniform grid converges faster than any power of the step. The
//! double integral is taken on a uniform grid in `(t, t')` with step below
//! `pi`, truncated to `[-Xi, Xi]^2` with `Xi` doubled until two successive
//! truncations agree.

use num_complex::Complex64;
use serde::Serialize;

use super::cutoff::CutoffFunction;
use crate::error::{Error, Result};
use crate::exec::{pairwise_sum, Exec};

/// Trapezoid panels on `[-1, 1]` used for `phi`.
pub const X_PANELS: usize = 4096;
/// Default grid step in the frequency variables.
pub const DEFAULT_STEP: f64 = 0.25;
/// Doubling stops once successive truncations differ by less than this.
pub const TAIL_TOL: f64 = 1e-7;
/// Largest truncation tried.
pub const MAX_XI: f64 = 1024.0;
const START_XI: f64 = 16.0;

/// `phi` at each frequency in `xi`.
pub fn fourier_phi(chi: &CutoffFunction, xi: &[f64]) -> Vec<Complex64> {
    fourier_phi_with(chi, xi, Exec::default())
}

pub fn fourier_phi_with(chi: &CutoffFunction, xi: &[f64], exec: Exec) -> Vec<Complex64> {
    let h = 2.0 / X_PANELS as f64;
    // Interior nodes only: the integrand vanishes at both endpoints.
    let nodes: Vec<(f64, f64)> = (1..X_PANELS)
        .map(|j| {
            let x = -1.0 + j as f64 * h;
            (x, x.exp() * chi.eval(x))
        })
        .collect();
    let factor = h / (2.0 * std::f64::consts::PI);
    exec.map_items(xi, |&s| {
        let re: Vec<f64> = nodes.iter().map(|&(x, g)| g * (x * s).cos()).collect();
        let im: Vec<f64> = nodes.iter().map(|&(x, g)| g * (x * s).sin()).collect();
        Complex64::new(pairwise_sum(&re), pairwise_sum(&im)) * factor
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiIdentityReport {
    /// Real part of the double integral.
    pub value: f64,
    /// Imaginary part, zero up to rounding.
    pub imag: f64,
    pub xi_max: f64,
    pub step: f64,
    /// `|value(Xi) - value(Xi/2)|` at the final truncation.
    pub tail_bound: f64,
}

impl PhiIdentityReport {
    pub fn error(&self) -> f64 {
        (self.value - 1.0).abs()
    }
}

/// Evaluates the double integral with default grid settings.
pub fn verify_phi_identity(chi: &CutoffFunction) -> Result<PhiIdentityReport> {
    verify_phi_identity_with(chi, DEFAULT_STEP, TAIL_TOL, Exec::default())
}

pub fn verify_phi_identity_with(
    chi: &CutoffFunction,
    step: f64,
    tail_tol: f64,
    exec: Exec,
) -> Result<PhiIdentityReport> {
    if !(step > 0.0 && step < std::f64::consts::PI) {
        return Err(Error::Numeric(format!(
            "frequency step {step} must lie in (0, pi)"
        )));
    }
    let mut xi_max = START_XI;
    let mut prev = truncated_integral(chi, step, xi_max, exec);
    loop {
        let next_xi = 2.0 * xi_max;
        if next_xi > MAX_XI {
            return Err(Error::Numeric(format!(
                "phi identity did not settle to {tail_tol} by Xi = {xi_max}"
            )));
        }
        let cur = truncated_integral(chi, step, next_xi, exec);
        let diff = (cur - prev).norm();
        xi_max = next_xi;
        if diff < tail_tol {
            return Ok(PhiIdentityReport {
                value: cur.re,
                imag: cur.im,
                xi_max,
                step,
                tail_bound: diff,
            });
        }
        prev = cur;
    }
}

fn truncated_integral(chi: &CutoffFunction, step: f64, xi_max: f64, exec: Exec) -> Complex64 {
    let half = (xi_max / step).round() as i64;
    let grid: Vec<f64> = (-half..=half).map(|j| j as f64 * step).collect();
    let phi = fourier_phi_with(chi, &grid, exec);
    let one = Complex64::new(1.0, 0.0);
    let rows: Vec<(usize, &f64)> = grid.iter().enumerate().collect();
    let row_sums = exec.map_items(&rows, |&(a, &t)| {
        let at = one + Complex64::i() * t;
        let (mut re, mut im) = (
            Vec::with_capacity(grid.len()),
            Vec::with_capacity(grid.len()),
        );
        for (b, &u) in grid.iter().enumerate() {
            let bu = one + Complex64::i() * u;
            let kernel = at * bu / (at + bu);
            let v = kernel * phi[a] * phi[b];
            re.push(v.re);
            im.push(v.im);
        }
        (pairwise_sum(&re), pairwise_sum(&im))
    });
    let re: Vec<f64> = row_sums.iter().map(|r| r.0).collect();
    let im: Vec<f64> = row_sums.iter().map(|r| r.1).collect();
    Complex64::new(pairwise_sum(&re), pairwise_sum(&im)) * (step * step)
}
