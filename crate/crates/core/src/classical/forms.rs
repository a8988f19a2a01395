//! Log-canonical two-forms, covectors and log-coordinate Jacobians.

use num_traits::{One, Zero};
use serde::Serialize;

use super::{action_s, penner_word, triangle_word, PennerPoint, TrianglePoint};
use crate::exact::QMatrix;
use crate::scalar::{LogDual, Q};
use crate::triangulation::{DecoratedTriangulation, MoveWord};
use crate::{Error, Result};

/// Coordinates whose logarithms span the basis.
///
/// `Triangles(f)` has `2f` entries, `ln t1` of triangle `t` at `2t` and
/// `ln t2` at `2t + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "count", rename_all = "lowercase")]
pub enum LogBasis {
    Edges(usize),
    Triangles(usize),
}

impl LogBasis {
    pub fn dim(&self) -> usize {
        match *self {
            Self::Edges(n) => n,
            Self::Triangles(f) => 2 * f,
        }
    }

    pub fn labels(&self) -> Vec<String> {
        match *self {
            Self::Edges(n) => (0..n).map(|e| format!("ln e{e}")).collect(),
            Self::Triangles(f) => (0..f)
                .flat_map(|t| [format!("ln t{t}_1"), format!("ln t{t}_2")])
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogBilinearForm {
    pub basis: LogBasis,
    pub matrix: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogCovector {
    pub basis: LogBasis,
    pub coeffs: Vec<i64>,
}

impl LogBilinearForm {
    fn zero(basis: LogBasis) -> Self {
        let n = basis.dim();
        Self {
            basis,
            matrix: vec![vec![0; n]; n],
        }
    }

    /// Adds `du ^ dv`.
    fn wedge(&mut self, u: usize, v: usize) {
        self.matrix[u][v] += 1;
        self.matrix[v][u] -= 1;
    }

    pub fn is_antisymmetric(&self) -> bool {
        let m = &self.matrix;
        (0..m.len()).all(|i| (0..m.len()).all(|j| m[i][j] == -m[j][i]))
    }

    pub fn to_qmatrix(&self) -> QMatrix {
        QMatrix::from_i64(&self.matrix)
    }
}

impl LogCovector {
    pub fn zero(basis: LogBasis) -> Self {
        Self {
            basis,
            coeffs: vec![0; basis.dim()],
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.basis != other.basis {
            return Err(Error::Domain("covectors over different bases".into()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            basis: self.basis,
            coeffs,
        })
    }

    pub fn scale(&self, c: i64) -> Self {
        Self {
            basis: self.basis,
            coeffs: self.coeffs.iter().map(|a| c * a).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&a| a == 0)
    }
}

/// Sum over triangles of `d0 ^ d1 + d1 ^ d2 + d2 ^ d0`, with `dk` the log
/// of the slot-`k` edge, accumulated over edge ids.
pub fn alpha_form(d: &DecoratedTriangulation) -> LogBilinearForm {
    let mut a = LogBilinearForm::zero(LogBasis::Edges(d.num_edges()));
    for &[e0, e1, e2] in d.slot_table() {
        a.wedge(e0, e1);
        a.wedge(e1, e2);
        a.wedge(e2, e0);
    }
    a
}

/// `sum_t d ln t1 ^ d ln t2`.
pub fn beta_form(d: &DecoratedTriangulation) -> LogBilinearForm {
    let mut b = LogBilinearForm::zero(LogBasis::Triangles(d.num_triangles()));
    for t in 0..d.num_triangles() {
        b.wedge(2 * t, 2 * t + 1);
    }
    b
}

/// Inverse of the form, as a rational matrix.
pub fn poisson_tensor(form: &LogBilinearForm) -> Result<QMatrix> {
    form.to_qmatrix()
        .inverse()
        .ok_or_else(|| Error::Numerical("form is degenerate".into()))
}

/// `J^T dst J == src`.
pub fn pullback_check(jacobian: &QMatrix, src: &LogBilinearForm, dst: &LogBilinearForm) -> bool {
    let (n_src, n_dst) = (src.basis.dim(), dst.basis.dim());
    if jacobian.nrows() != n_dst || jacobian.ncols() != n_src {
        return false;
    }
    let pulled = &(&jacobian.transpose() * &dst.to_qmatrix()) * jacobian;
    pulled == src.to_qmatrix()
}

fn rows_of(values: impl Iterator<Item = LogDual>, n: usize) -> QMatrix {
    let rows: Vec<Vec<Q>> = values
        .map(|v| {
            let mut r = v.log_gradient();
            r.resize(n, Q::zero());
            r
        })
        .collect();
    QMatrix::from_rows(&rows)
}

/// Exact log-coordinate Jacobian of a word on edge coordinates at `at`.
pub fn penner_log_jacobian(
    d: &DecoratedTriangulation,
    w: &MoveWord,
    at: &PennerPoint,
) -> Result<(DecoratedTriangulation, QMatrix)> {
    let n = at.0.len();
    let x = PennerPoint(
        at.0.iter()
            .enumerate()
            .map(|(i, v)| LogDual::variable(v.clone(), i, n))
            .collect(),
    );
    let (end, y) = penner_word(d, &x, w)?;
    Ok((end, rows_of(y.0.into_iter(), n)))
}

fn triangle_variables(at: &TrianglePoint) -> TrianglePoint<LogDual> {
    let n = 2 * at.0.len();
    TrianglePoint(
        at.0.iter()
            .enumerate()
            .map(|(t, [a, b])| {
                [
                    LogDual::variable(a.clone(), 2 * t, n),
                    LogDual::variable(b.clone(), 2 * t + 1, n),
                ]
            })
            .collect(),
    )
}

/// Exact log-coordinate Jacobian of a word on triangle coordinates at `at`.
pub fn triangle_log_jacobian(
    d: &DecoratedTriangulation,
    w: &MoveWord,
    at: &TrianglePoint,
) -> Result<(DecoratedTriangulation, QMatrix)> {
    let n = 2 * at.0.len();
    let (end, y) = triangle_word(d, &triangle_variables(at), w)?;
    Ok((end, rows_of(y.0.into_iter().flatten(), n)))
}

/// Exact log-coordinate Jacobian of the structure group action by fixed
/// puncture weights `f`.
pub fn action_s_log_jacobian(
    d: &DecoratedTriangulation,
    f: &[Q],
    at: &TrianglePoint,
) -> Result<QMatrix> {
    let n = 2 * at.0.len();
    let f: Vec<LogDual> = f.iter().map(|v| LogDual::constant(v.clone(), n)).collect();
    let y = action_s(d, &triangle_variables(at), &f)?;
    Ok(rows_of(y.0.into_iter().flatten(), n))
}

impl QMatrix {
    pub fn is_identity(&self) -> bool {
        self.nrows() == self.ncols()
            && (0..self.nrows()).all(|i| {
                (0..self.ncols()).all(|j| {
                    let v = &self[(i, j)];
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }
}
