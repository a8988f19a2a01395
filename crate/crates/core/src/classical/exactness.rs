use serde::Serialize;

use super::{h1_basis, momentum_matrix};
use crate::exact::QMatrix;
use crate::triangulation::DecoratedTriangulation;
use crate::Result;

/// Ranks of the log-linearized maps around the reduction
/// `R^E -> R^{2F} -> H^1`, computed exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    pub genus: u32,
    pub punctures: usize,
    pub num_edges: usize,
    /// `2F`, the dimension of the triangle-coordinate space.
    pub dim_s: usize,
    pub rank_l: usize,
    pub dim_ker_l: usize,
    pub rank_m: usize,
    pub expected_rank_m: usize,
    /// `M L = 0`.
    pub ml_zero: bool,
    /// `im L = ker M`.
    pub im_l_eq_ker_m: bool,
    pub rank_action: usize,
    /// The structure group action is tangent to the zero level of `M`.
    pub action_in_ker_m: bool,
    pub reduced_dim: usize,
    pub expected_reduced_dim: usize,
    pub passed: bool,
}

/// Log-linearization of edge coordinates to triangle coordinates.
pub fn log_projection(d: &DecoratedTriangulation) -> QMatrix {
    let mut l = vec![vec![0i64; d.num_edges()]; 2 * d.num_triangles()];
    for (t, &[e0, e1, e2]) in d.slot_table().iter().enumerate() {
        l[2 * t][e2] += 1;
        l[2 * t][e1] -= 1;
        l[2 * t + 1][e0] += 1;
        l[2 * t + 1][e1] -= 1;
    }
    QMatrix::from_i64(&l)
}

/// Log-linearization of the structure group action in the puncture weights.
pub fn log_action(d: &DecoratedTriangulation) -> QMatrix {
    let mut a = vec![vec![0i64; d.num_punctures()]; 2 * d.num_triangles()];
    for (t, &[c0, c1, c2]) in d.corner_table().iter().enumerate() {
        a[2 * t][c1] += 1;
        a[2 * t][c2] -= 1;
        a[2 * t + 1][c1] += 1;
        a[2 * t + 1][c0] -= 1;
    }
    QMatrix::from_i64(&a)
}

pub fn exactness_report(d: &DecoratedTriangulation) -> Result<ExactnessReport> {
    let (g, s) = (d.genus() as usize, d.num_punctures());
    let l = log_projection(d);
    let m = QMatrix::from_i64(&momentum_matrix(d, &h1_basis(d))?);
    let a = log_action(d);
    let dim_s = 2 * d.num_triangles();
    let rank_l = l.rank();
    let rank_m = m.rank();
    let rank_action = a.rank();
    let ml_zero = (&m * &l).is_zero();
    let dim_ker_m = dim_s - rank_m;
    let im_l_eq_ker_m = ml_zero && rank_l == dim_ker_m;
    let action_in_ker_m = (&m * &a).is_zero();
    let reduced_dim = dim_ker_m - rank_action;
    let expected_rank_m = 2 * g + s - 1;
    let expected_reduced_dim = 6 * g + 2 * s - 6;
    let dim_ker_l = d.num_edges() - rank_l;
    let passed = dim_ker_l == 1
        && im_l_eq_ker_m
        && rank_m == expected_rank_m
        && action_in_ker_m
        && rank_action == s - 1
        && reduced_dim == expected_reduced_dim;
    Ok(ExactnessReport {
        genus: g as u32,
        punctures: s,
        num_edges: d.num_edges(),
        dim_s,
        rank_l,
        dim_ker_l,
        rank_m,
        expected_rank_m,
        ml_zero,
        im_l_eq_ker_m,
        rank_action,
        action_in_ker_m,
        reduced_dim,
        expected_reduced_dim,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_and_sphere_reports() {
        let d = DecoratedTriangulation::new_surface(1, 1).unwrap();
        let r = exactness_report(&d).unwrap();
        assert_eq!((r.dim_s, r.rank_m, r.reduced_dim), (4, 2, 2));
        assert!(r.passed, "{r:?}");
        let d = DecoratedTriangulation::new_surface(0, 4).unwrap();
        let r = exactness_report(&d).unwrap();
        assert_eq!((r.dim_s, r.rank_m, r.reduced_dim), (8, 3, 2));
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn higher_surfaces() {
        for (g, s, dim) in [(1, 2, 4), (2, 1, 8), (0, 5, 4), (1, 3, 6)] {
            let d = DecoratedTriangulation::new_surface(g, s).unwrap();
            let r = exactness_report(&d).unwrap();
            assert!(r.passed, "{r:?}");
            assert_eq!(r.reduced_dim, dim);
        }
    }
}
