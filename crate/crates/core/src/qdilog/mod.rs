//! Non-compact quantum dilogarithm
//!
//! `psi(z) = exp( (1/4) \int e^{-ixz} / (sinh(pi x) sinh(hbar x)) dx / x )`
//!
//! along the line `Im x = delta > 0`, so that the pole at the origin lies
//! below the contour. The integral converges for `|Im z| < pi + hbar`.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::num::NonZeroUsize;
use std::str::FromStr;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const PANEL_ORDER: usize = 20;
const MAX_DEPTH: u32 = 40;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QDilogParams {
    pub hbar: f64,
    /// Height of the contour above the real axis.
    pub delta: f64,
    /// Largest truncation half-width allowed.
    pub t_max: f64,
    /// Target relative tolerance on psi.
    pub tol: f64,
    pub max_nodes: usize,
}

impl QDilogParams {
    pub fn new(hbar: f64) -> Self {
        QDilogParams {
            hbar,
            delta: 0.5 * f64::min(1.0, PI / hbar),
            t_max: 200.0,
            tol: 1e-12,
            max_nodes: 400_000,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::Domain(format!(
                "hbar must be positive, got {}",
                self.hbar
            )));
        }
        let cap = f64::min(1.0, PI / self.hbar);
        if !(self.delta > 0.0 && self.delta < cap) {
            return Err(Error::Domain(format!(
                "contour offset must lie in (0, {cap}), got {}",
                self.delta
            )));
        }
        if !(self.tol >= 1e-12 && self.tol < 1.0) {
            return Err(Error::Domain(format!(
                "tol must lie in [1e-12, 1), got {}",
                self.tol
            )));
        }
        if !(self.t_max > 1.0 && self.t_max.is_finite()) {
            return Err(Error::Domain(format!(
                "t_max must exceed 1, got {}",
                self.t_max
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Evaluation {
    pub value: Complex64,
    /// Truncation half-width actually used.
    pub truncation: f64,
    pub nodes: usize,
}

fn integrand(x: Complex64, z: Complex64, hbar: f64) -> Complex64 {
    // sinh written through decaying exponentials so large |Re x| cannot overflow
    let s = if x.re >= 0.0 { 1.0 } else { -1.0 };
    let num = (-Complex64::i() * x * z - (PI + hbar) * s * x).exp() * 4.0;
    let d1 = 1.0 - (-2.0 * PI * s * x).exp();
    let d2 = 1.0 - (-2.0 * hbar * s * x).exp();
    num / (d1 * d2 * x)
}

/// Half-width beyond which both tails of the integral are below `bound`.
fn truncation(z: Complex64, p: &QDilogParams, bound: f64) -> f64 {
    let kappa = PI + p.hbar - z.im.abs();
    let pre = 8.0 * (p.delta * z.re).exp();
    let mut t: f64 = 2.0;
    for _ in 0..50 {
        let next = f64::max(2.0, (pre / (kappa * t * bound)).ln() / kappa);
        if (next - t).abs() < 1e-6 {
            break;
        }
        t = next;
    }
    t
}

pub fn psi_eval(z: Complex64, p: &QDilogParams) -> Result<Complex64> {
    psi_eval_detailed(z, p).map(|e| e.value)
}

pub fn psi_eval_detailed(z: Complex64, p: &QDilogParams) -> Result<Evaluation> {
    eval_at(z, p, false)
}

/// Same as [`psi_eval`] with twice the truncation half-width, panels of half
/// the width and half the error budget; used for self-consistency checks.
pub fn psi_eval_refined(z: Complex64, p: &QDilogParams) -> Result<Complex64> {
    eval_at(z, p, true).map(|e| e.value)
}

fn eval_at(z: Complex64, p: &QDilogParams, refine: bool) -> Result<Evaluation> {
    p.validate()?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    let margin = 2.0 * p.delta * f64::max(1.0, z.re.abs()) / p.t_max;
    let strip = PI + p.hbar - margin;
    if z.im.abs() >= strip {
        return Err(Error::OutsideStrip(format!(
            "|Im z| = {} must be below {strip} for hbar = {}",
            z.im.abs(),
            p.hbar
        )));
    }
    let mut t = truncation(z, p, p.tol * 1e-2);
    if refine {
        t *= 2.0;
    }
    if t > p.t_max {
        return Err(Error::Numerical(format!(
            "tail needs half-width {t:.1} beyond t_max = {}",
            p.t_max
        )));
    }
    let (integral, nodes) = integrate(z, p, t, refine)?;
    Ok(Evaluation {
        value: (integral / 4.0).exp(),
        truncation: t,
        nodes,
    })
}

fn gl_panel(rule: &GaussLegendre, a: f64, b: f64, f: &impl Fn(f64) -> Complex64) -> Complex64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    rule.as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| f(mid + half * x) * w)
        .sum::<Complex64>()
        * half
}

/// Adaptive composite Gauss-Legendre over `[-t, t]` on the shifted line.
/// A panel is accepted when it agrees with the sum over its two halves.
fn integrate(z: Complex64, p: &QDilogParams, t: f64, refine: bool) -> Result<(Complex64, usize)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(PANEL_ORDER).expect("nonzero order"));
    let f = |s: f64| integrand(Complex64::new(s, p.delta), z, p.hbar);
    // psi = exp(I / 4): an absolute error e in I is a relative error e / 4 in psi
    let scale = if refine { 2.0 } else { 1.0 };
    let budget = 4.0 * p.tol * 0.5 / scale;
    let panels = (2.0 * scale * t).ceil() as usize;
    let width = 2.0 * t / panels as f64;
    let mut stack: Vec<(f64, f64, Complex64, u32)> = (0..panels)
        .map(|k| {
            let a = -t + k as f64 * width;
            let b = a + width;
            (a, b, gl_panel(&rule, a, b, &f), 0)
        })
        .collect();
    let mut nodes = panels * PANEL_ORDER;
    let mut total = Complex64::new(0.0, 0.0);
    while let Some((a, b, coarse, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let left = gl_panel(&rule, a, m, &f);
        let right = gl_panel(&rule, m, b, &f);
        nodes += 2 * PANEL_ORDER;
        if nodes > p.max_nodes {
            return Err(Error::Numerical(format!(
                "tolerance {} not reached within {} nodes",
                p.tol, p.max_nodes
            )));
        }
        let fine = left + right;
        if (fine - coarse).norm() <= budget * (b - a) / (2.0 * t) {
            total += fine;
        } else if depth >= MAX_DEPTH {
            return Err(Error::Numerical("panel subdivision limit reached".into()));
        } else {
            stack.push((a, m, left, depth + 1));
            stack.push((m, b, right, depth + 1));
        }
    }
    Ok((total, nodes))
}

/// `|psi(x - i hbar) - psi(x + i hbar) (1 + e^x)| / |psi(x - i hbar)|`.
pub fn functional_residual(x: f64, p: &QDilogParams) -> Result<f64> {
    let lo = psi_eval(Complex64::new(x, -p.hbar), p)?;
    let hi = psi_eval(Complex64::new(x, p.hbar), p)?;
    Ok((lo - hi * (1.0 + x.exp())).norm() / lo.norm())
}

/// Evenly spaced points `start, start + step, ..., stop`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|k| self.start + k as f64 * self.step).collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// `start:stop:step`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("grid {s:?}: {e}")))?;
        let [start, stop, step] = parts[..] else {
            return Err(Error::Parse(format!("grid {s:?} is not start:stop:step")));
        };
        if !(step > 0.0 && stop >= start && start.is_finite() && stop.is_finite()) {
            return Err(Error::Parse(format!("grid {s:?} is empty or unbounded")));
        }
        Ok(Grid { start, stop, step })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub x: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub residual: f64,
}

pub fn tabulate(grid: &Grid, p: &QDilogParams) -> Result<Vec<Row>> {
    grid.points()
        .into_iter()
        .map(|x| {
            let v = psi_eval(Complex64::new(x, 0.0), p)?;
            Ok(Row {
                x,
                re: v.re,
                im: v.im,
                abs: v.norm(),
                residual: functional_residual(x, p)?,
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}
