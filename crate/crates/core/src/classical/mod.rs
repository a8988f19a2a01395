//! Coordinate flows on the two coordinate spaces of a decorated triangulation.
//!
//! A [`PennerPoint`] assigns a positive number to every edge; a
//! [`TrianglePoint`] assigns a pair `(t1, t2)` to every triangle. The flows
//! are generic over [`Scalar`] so the same code runs on exact rationals, on
//! doubles and on [`LogDual`](crate::scalar::LogDual) numbers (for exact
//! Jacobians).

mod exactness;
mod forms;
mod homology;
mod sample;

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::{format_q, parse_q, Scalar, Q};
use crate::triangulation::{DecoratedTriangulation, EdgeId, Move, MoveWord, TriId};
use crate::{Error, Result};

pub use exactness::{exactness_report, log_action, log_projection, ExactnessReport};
pub use forms::{
    action_s_log_jacobian, alpha_form, beta_form, penner_log_jacobian, poisson_tensor,
    pullback_check, triangle_log_jacobian, LogBasis, LogBilinearForm, LogCovector,
};
pub use homology::{
    flow_equals_action_check, flow_equals_action_with, h1_basis, holonomy_covector,
    intersection_index, momentum_matrix, poisson_bracket, puncture_loop, xi_f_cycle, FlowReport,
    HomologyCycle, Segment, XiCycle, POISSON_SIGN,
};
pub use sample::Sampler;

/// Edge coordinates, indexed by edge id.
#[derive(Clone, Debug, PartialEq)]
pub struct PennerPoint<S = Q>(pub Vec<S>);

/// Triangle coordinates `(t1, t2)`, indexed by triangle id.
#[derive(Clone, Debug, PartialEq)]
pub struct TrianglePoint<S = Q>(pub Vec<[S; 2]>);

fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{what}: expected {want} values, got {got}"
        )))
    }
}

fn check_positive<'a>(values: impl IntoIterator<Item = &'a Q>) -> Result<()> {
    if values.into_iter().all(|v| v > &Q::zero()) {
        Ok(())
    } else {
        Err(Error::Domain(
            "coordinates must be strictly positive".into(),
        ))
    }
}

impl PennerPoint<Q> {
    pub fn new(d: &DecoratedTriangulation, values: Vec<Q>) -> Result<Self> {
        check_len("edge coordinates", values.len(), d.num_edges())?;
        check_positive(&values)?;
        Ok(Self(values))
    }

    pub fn ones(d: &DecoratedTriangulation) -> Self {
        Self(vec![<Q as Scalar>::one(); d.num_edges()])
    }
}

impl TrianglePoint<Q> {
    pub fn new(d: &DecoratedTriangulation, values: Vec<[Q; 2]>) -> Result<Self> {
        check_len("triangle coordinates", values.len(), d.num_triangles())?;
        check_positive(values.iter().flatten())?;
        Ok(Self(values))
    }
}

impl<S: Scalar> PennerPoint<S> {
    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> PennerPoint<T> {
        PennerPoint(self.0.iter().map(f).collect())
    }
}

impl<S: Scalar> TrianglePoint<S> {
    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> TrianglePoint<T> {
        TrianglePoint(self.0.iter().map(|[a, b]| [f(a), f(b)]).collect())
    }
}

/// Ptolemy relation along `e`: `e' = (p1 q1 + p2 q2) / e` where `(p1, q1)`
/// and `(p2, q2)` are the opposite sides of the quadrilateral around `e`.
/// Needs no decoration.
pub fn penner_flip<S: Scalar>(
    d: &DecoratedTriangulation,
    p: &PennerPoint<S>,
    e: EdgeId,
) -> Result<PennerPoint<S>> {
    check_len("edge coordinates", p.0.len(), d.num_edges())?;
    let ((p1, q1), (p2, q2)) = d.opposite_pairs(e)?;
    let v = &p.0;
    let mut out = p.clone();
    out.0[e] = (v[p1].clone() * v[q1].clone() + v[p2].clone() * v[q2].clone()) / v[e].clone();
    Ok(out)
}

/// Decoration action of puncture weights: every edge is scaled by the
/// weights of its two endpoints.
pub fn decoration_action_r<S: Scalar>(
    d: &DecoratedTriangulation,
    p: &PennerPoint<S>,
    f: &[S],
) -> Result<PennerPoint<S>> {
    check_len("edge coordinates", p.0.len(), d.num_edges())?;
    check_len("puncture weights", f.len(), d.num_punctures())?;
    let out = (0..d.num_edges())
        .map(|e| {
            let (u, v) = d.edge_endpoints(e);
            f[u].clone() * f[v].clone() * p.0[e].clone()
        })
        .collect();
    Ok(PennerPoint(out))
}

/// `(t1, t2) = (e2 / e1, e0 / e1)` for the slot edges `e0, e1, e2` of
/// every triangle.
pub fn triangle_from_penner<S: Scalar>(
    d: &DecoratedTriangulation,
    p: &PennerPoint<S>,
) -> Result<TrianglePoint<S>> {
    check_len("edge coordinates", p.0.len(), d.num_edges())?;
    let out = d
        .slot_table()
        .iter()
        .map(|s| {
            let [e0, e1, e2] = s.map(|e| p.0[e].clone());
            [e2 / e1.clone(), e0 / e1]
        })
        .collect();
    Ok(TrianglePoint(out))
}

/// Coordinates of triangle `t` after one corner rotation:
/// `(t1, t2) -> (t2 / t1, 1 / t1)`.
pub fn corner_change<S: Scalar>(k: &TrianglePoint<S>, t: TriId) -> Result<TrianglePoint<S>> {
    let [t1, t2] = k.0.get(t).ok_or(Error::UnknownTriangle(t))?.clone();
    let mut out = k.clone();
    out.0[t] = [t2 / t1.clone(), t1.recip()];
    Ok(out)
}

/// `x . y = (x1 y1, x1 y2 + x2)`.
pub fn bullet<S: Scalar>(x: &[S; 2], y: &[S; 2]) -> [S; 2] {
    [
        x[0].clone() * y[0].clone(),
        x[0].clone() * y[1].clone() + x[1].clone(),
    ]
}

/// `x * y = (y1 x2 / (x1 y2 + x2), y2 / (x1 y2 + x2))`.
pub fn star<S: Scalar>(x: &[S; 2], y: &[S; 2]) -> [S; 2] {
    let s = x[0].clone() * y[1].clone() + x[1].clone();
    [y[0].clone() * x[1].clone() / s.clone(), y[1].clone() / s]
}

/// Flip along `e` in normal position: `x -> x . y`, `y -> x * y`.
pub fn decorated_flip<S: Scalar>(
    d: &DecoratedTriangulation,
    k: &TrianglePoint<S>,
    e: EdgeId,
) -> Result<TrianglePoint<S>> {
    check_len("triangle coordinates", k.0.len(), d.num_triangles())?;
    let r = d.flip_roles(e)?;
    let (x, y) = (&k.0[r.x], &k.0[r.y]);
    let mut out = k.clone();
    out.0[r.x] = bullet(x, y);
    out.0[r.y] = star(x, y);
    Ok(out)
}

/// Structure group action of puncture weights:
/// `(t1, t2) -> (t1 f(1_t) / f(2_t), t2 f(1_t) / f(0_t))` with `k_t` the
/// puncture at corner `k` of `t`.
pub fn action_s<S: Scalar>(
    d: &DecoratedTriangulation,
    k: &TrianglePoint<S>,
    f: &[S],
) -> Result<TrianglePoint<S>> {
    check_len("triangle coordinates", k.0.len(), d.num_triangles())?;
    check_len("puncture weights", f.len(), d.num_punctures())?;
    let out = d
        .corner_table()
        .iter()
        .zip(&k.0)
        .map(|(c, [t1, t2])| {
            let [f0, f1, f2] = c.map(|v| f[v].clone());
            [t1.clone() * f1.clone() / f2, t2.clone() * f1 / f0]
        })
        .collect();
    Ok(TrianglePoint(out))
}

/// Applies one move to a triangulation and an edge-coordinate point.
pub fn penner_move<S: Scalar>(
    d: &DecoratedTriangulation,
    p: &PennerPoint<S>,
    m: &Move,
) -> Result<(DecoratedTriangulation, PennerPoint<S>)> {
    let p = match m {
        Move::Flip { edge } => penner_flip(d, p, *edge)?,
        Move::Rotate { .. } => p.clone(),
        Move::Relabel { map } => {
            map.check(d)?;
            let mut out = p.clone();
            for (e, v) in p.0.iter().enumerate() {
                out.0[map.edges[e]] = v.clone();
            }
            out
        }
    };
    Ok((d.apply(m)?, p))
}

/// Applies one move to a triangulation and a triangle-coordinate point.
pub fn triangle_move<S: Scalar>(
    d: &DecoratedTriangulation,
    k: &TrianglePoint<S>,
    m: &Move,
) -> Result<(DecoratedTriangulation, TrianglePoint<S>)> {
    let k = match m {
        Move::Flip { edge } => decorated_flip(d, k, *edge)?,
        Move::Rotate { tri } => corner_change(k, *tri)?,
        Move::Relabel { map } => {
            map.check(d)?;
            let mut out = k.clone();
            for (t, v) in k.0.iter().enumerate() {
                out.0[map.triangles[t]] = v.clone();
            }
            out
        }
    };
    Ok((d.apply(m)?, k))
}

fn run_word<P>(
    d: &DecoratedTriangulation,
    p: &P,
    w: &MoveWord,
    step: impl Fn(&DecoratedTriangulation, &P, &Move) -> Result<(DecoratedTriangulation, P)>,
) -> Result<(DecoratedTriangulation, P)>
where
    P: Clone,
{
    let mut cur = (d.clone(), p.clone());
    for (index, m) in w.iter().enumerate() {
        cur = step(&cur.0, &cur.1, m).map_err(|e| Error::WordStep {
            index,
            source: Box::new(e),
        })?;
    }
    Ok(cur)
}

pub fn penner_word<S: Scalar>(
    d: &DecoratedTriangulation,
    p: &PennerPoint<S>,
    w: &MoveWord,
) -> Result<(DecoratedTriangulation, PennerPoint<S>)> {
    run_word(d, p, w, penner_move)
}

pub fn triangle_word<S: Scalar>(
    d: &DecoratedTriangulation,
    k: &TrianglePoint<S>,
    w: &MoveWord,
) -> Result<(DecoratedTriangulation, TrianglePoint<S>)> {
    run_word(d, k, w, triangle_move)
}

impl Serialize for PennerPoint<Q> {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        let m: BTreeMap<usize, String> = self.0.iter().map(format_q).enumerate().collect();
        m.serialize(s)
    }
}

impl Serialize for TrianglePoint<Q> {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        let m: BTreeMap<usize, [String; 2]> = self
            .0
            .iter()
            .map(|p| [format_q(&p[0]), format_q(&p[1])])
            .enumerate()
            .collect();
        m.serialize(s)
    }
}

fn dense<T, E: serde::de::Error>(m: BTreeMap<usize, T>) -> std::result::Result<Vec<T>, E> {
    let n = m.len();
    if m.keys().copied().eq(0..n) {
        Ok(m.into_values().collect())
    } else {
        Err(E::custom("ids must be 0..n without gaps"))
    }
}

impl<'de> Deserialize<'de> for PennerPoint<Q> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = BTreeMap::<usize, String>::deserialize(d)?;
        dense(m)?
            .iter()
            .map(|s| parse_q(s))
            .collect::<Result<Vec<_>>>()
            .map(PennerPoint)
            .map_err(serde::de::Error::custom)
    }
}

impl<'de> Deserialize<'de> for TrianglePoint<Q> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = BTreeMap::<usize, [String; 2]>::deserialize(d)?;
        dense(m)?
            .iter()
            .map(|[a, b]| Ok([parse_q(a)?, parse_q(b)?]))
            .collect::<Result<Vec<_>>>()
            .map(TrianglePoint)
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};
    use crate::triangulation::double_flip_word;

    fn surface(g: u32, s: u32) -> DecoratedTriangulation {
        DecoratedTriangulation::new_surface(g, s).unwrap()
    }

    #[test]
    fn ptolemy_substitution() {
        let d = surface(0, 4);
        let e = 0;
        let ((p1, q1), (p2, q2)) = d.opposite_pairs(e).unwrap();
        let p = PennerPoint::ones(&d);
        assert_eq!(penner_flip(&d, &p, e).unwrap().0[e], qi(2));

        let mut v = vec![qi(1); 6];
        v[p1] = qi(1);
        v[q1] = qi(3);
        v[p2] = qi(2);
        v[q2] = qi(4);
        v[e] = qi(5);
        let p = PennerPoint::new(&d, v).unwrap();
        assert_eq!(penner_flip(&d, &p, e).unwrap().0[e], q(11, 5));
    }

    #[test]
    fn bullet_and_star_values() {
        let one = [qi(1), qi(1)];
        assert_eq!(bullet(&one, &one), [qi(1), qi(2)]);
        assert_eq!(star(&one, &one), [q(1, 2), q(1, 2)]);
        let x = [qi(2), qi(3)];
        let y = [qi(5), qi(7)];
        assert_eq!(bullet(&x, &y), [qi(10), qi(17)]);
        assert_eq!(star(&x, &y), [q(15, 17), q(7, 17)]);
    }

    #[test]
    fn corner_change_values() {
        let d = surface(1, 1);
        let k = TrianglePoint::new(&d, vec![[qi(2), qi(3)], [qi(1), qi(1)]]).unwrap();
        let r = corner_change(&k, 0).unwrap();
        assert_eq!(r.0[0], [q(3, 2), q(1, 2)]);
        assert_eq!(r.0[1], [qi(1), qi(1)]);
        let back = corner_change(&corner_change(&r, 0).unwrap(), 0).unwrap();
        assert_eq!(back, k);
        assert!(corner_change(&k, 5).is_err());
    }

    #[test]
    fn triangle_from_slot_values() {
        let d = DecoratedTriangulation::new_surface(1, 1).unwrap();
        let [e0, e1, e2] = d.slots(0);
        let mut v = vec![qi(1); 3];
        v[e0] = qi(2);
        v[e1] = qi(4);
        v[e2] = qi(6);
        let k = triangle_from_penner(&d, &PennerPoint::new(&d, v).unwrap()).unwrap();
        assert_eq!(k.0[0], [q(3, 2), q(1, 2)]);
        let ones = triangle_from_penner(&d, &PennerPoint::ones(&d)).unwrap();
        assert!(ones.0.iter().all(|p| *p == [qi(1), qi(1)]));
    }

    #[test]
    fn decoration_action_scales_by_endpoints() {
        let d = surface(0, 4);
        let e = (0..6)
            .find(|&e| {
                let (u, v) = d.edge_endpoints(e);
                (u.min(v), u.max(v)) == (0, 1)
            })
            .expect("an arc between punctures 0 and 1");
        let f = vec![qi(2), qi(3), qi(1), qi(1)];
        let out = decoration_action_r(&d, &PennerPoint::ones(&d), &f).unwrap();
        assert_eq!(out.0[e], qi(6));
        assert!(decoration_action_r(&d, &PennerPoint::ones(&d), &f[..3]).is_err());
    }

    #[test]
    fn action_s_is_projective() {
        let d = surface(0, 4);
        let k = triangle_from_penner(&d, &PennerPoint::ones(&d)).unwrap();
        let f = vec![qi(1), qi(2), qi(1), qi(1)];
        let g: Vec<Q> = f.iter().map(|x| x * qi(7)).collect();
        assert_eq!(action_s(&d, &k, &f).unwrap(), action_s(&d, &k, &g).unwrap());
        assert_eq!(action_s(&d, &k, &vec![qi(5); 4]).unwrap(), k);
    }

    #[test]
    fn double_flip_restores_edges() {
        let d = surface(1, 1);
        let p = PennerPoint::new(&d, vec![qi(2), q(3, 7), qi(5)]).unwrap();
        for e in 0..3 {
            let w = double_flip_word(&d, e).unwrap();
            let (end, out) = penner_word(&d, &p, &w).unwrap();
            assert_eq!(out, p);
            assert_eq!(end.without_flags(), d);
        }
    }

    #[test]
    fn point_json_round_trip() {
        let d = surface(1, 1);
        let p = PennerPoint::new(&d, vec![qi(2), q(3, 7), qi(5)]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"0":"2","1":"3/7","2":"5"}"#);
        assert_eq!(serde_json::from_str::<PennerPoint>(&s).unwrap(), p);
        let k = triangle_from_penner(&d, &p).unwrap();
        let s = serde_json::to_string(&k).unwrap();
        assert_eq!(serde_json::from_str::<TrianglePoint>(&s).unwrap(), k);
        assert!(serde_json::from_str::<PennerPoint>(r#"{"1":"2"}"#).is_err());
    }
}
