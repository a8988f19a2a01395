//! Closed paths in the dual graph, their holonomy covectors, Poisson
//! brackets and a combinatorial intersection number.
//!
//! A cycle is a cyclic list of segments; segment `(t, a, b)` crosses
//! triangle `t` from the midpoint of side `a` to the midpoint of side `b`.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{action_s, beta_form, poisson_tensor, LogBasis, LogCovector, TrianglePoint};
use crate::exact::QMatrix;
use crate::scalar::{qi, Q};
use crate::triangulation::{DecoratedTriangulation, PunctureId, Side, TriId};
use crate::{Error, Result};

/// Sign convention for [`intersection_index`]: with it, the bracket of the
/// holonomies of two basis cycles of the once-punctured torus has the sign
/// of their intersection number.
///
/// Note that with the Poisson tensor inverse to the canonical form the
/// bracket comes out as `2 * POISSON_SIGN * (a . b)`; see the tests.
pub const POISSON_SIGN: i64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub tri: TriId,
    pub entry: u8,
    pub exit: u8,
}

impl Segment {
    pub fn new(tri: TriId, entry: u8, exit: u8) -> Self {
        Self { tri, entry, exit }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyCycle {
    pub segments: Vec<Segment>,
}

impl HomologyCycle {
    /// Checks that the segments form a closed path on `d`.
    pub fn new(d: &DecoratedTriangulation, segments: Vec<Segment>) -> Result<Self> {
        let c = Self { segments };
        c.validate(d)?;
        Ok(c)
    }

    pub fn validate(&self, d: &DecoratedTriangulation) -> Result<()> {
        let n = self.segments.len();
        if n == 0 {
            return Err(Error::InvalidCycle("empty cycle".into()));
        }
        for (i, s) in self.segments.iter().enumerate() {
            d.check_triangle(s.tri)?;
            if s.entry > 2 || s.exit > 2 {
                return Err(Error::InvalidCycle(format!(
                    "segment {i}: slot out of range"
                )));
            }
            if s.entry == s.exit {
                return Err(Error::InvalidCycle(format!(
                    "segment {i} enters and leaves triangle {} through slot {}",
                    s.tri, s.entry
                )));
            }
            let nx = self.segments[(i + 1) % n];
            if d.glued(Side::new(s.tri, s.exit)) != Side::new(nx.tri, nx.entry) {
                return Err(Error::InvalidCycle(format!(
                    "segment {i} does not continue into segment {}",
                    (i + 1) % n
                )));
            }
        }
        Ok(())
    }

    pub fn reversed(&self) -> Self {
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|s| Segment::new(s.tri, s.exit, s.entry))
            .collect();
        Self { segments }
    }

    /// Both cycles run through `other`'s first crossing; returns the cycle
    /// that follows `self` and then `other` from that crossing.
    pub fn splice(&self, other: &Self) -> Option<Self> {
        let start = other.segments[0];
        let i = self
            .segments
            .iter()
            .position(|s| s.tri == start.tri && s.entry == start.entry)?;
        let mut segments = self.segments[i..].to_vec();
        segments.extend_from_slice(&self.segments[..i]);
        segments.extend_from_slice(&other.segments);
        Some(Self { segments })
    }
}

/// Small loop around puncture `v` in the direction of [`corner_cycle`].
///
/// [`corner_cycle`]: DecoratedTriangulation::corner_cycle
pub fn puncture_loop(d: &DecoratedTriangulation, v: PunctureId) -> Result<HomologyCycle> {
    let corners = d.corner_cycle(v);
    if corners.is_empty() {
        return Err(Error::Domain(format!("no puncture {v}")));
    }
    let segments = corners
        .into_iter()
        .map(|(t, k)| Segment::new(t, (k + 1) % 3, (k + 2) % 3))
        .collect();
    HomologyCycle::new(d, segments)
}

/// `ln e_k - ln e_1` in the triangle coordinates of `t`.
fn slot_potential(t: TriId, k: u8, c: &mut [i64], sign: i64) {
    match k {
        0 => c[2 * t + 1] += sign,
        2 => c[2 * t] += sign,
        _ => {}
    }
}

/// Integer covector whose pairing with `ln` of a triangle-coordinate point
/// gives the log holonomy along `cycle`.
pub fn holonomy_covector(d: &DecoratedTriangulation, cycle: &HomologyCycle) -> Result<LogCovector> {
    cycle.validate(d)?;
    let mut h = LogCovector::zero(LogBasis::Triangles(d.num_triangles()));
    for s in &cycle.segments {
        slot_potential(s.tri, s.entry, &mut h.coeffs, 1);
        slot_potential(s.tri, s.exit, &mut h.coeffs, -1);
    }
    Ok(h)
}

/// `u . pi . v` with `pi` the inverse of `form`.
pub fn poisson_bracket(
    u: &LogCovector,
    v: &LogCovector,
    form: &super::LogBilinearForm,
) -> Result<Q> {
    if u.basis != form.basis || v.basis != form.basis {
        return Err(Error::Domain("covector and form bases differ".into()));
    }
    let pi = poisson_tensor(form)?;
    let v: Vec<Q> = v.coeffs.iter().map(|&a| qi(a)).collect();
    let pv = pi.mul_vec(&v);
    Ok(u.coeffs.iter().zip(&pv).map(|(&a, b)| qi(a) * b).sum())
}

/// `+1` if the direction of side `s` (corner `k+1` to corner `k+2`) is the
/// reference direction of its edge, `-1` otherwise.
fn side_sign(d: &DecoratedTriangulation, s: Side) -> i64 {
    if d.sides_of(d.edge_at(s))[0] == s {
        1
    } else {
        -1
    }
}

/// Algebraic intersection number `a . b`.
///
/// `b` is pushed into the edges: the segment from side `p` to side `q`
/// around their common corner becomes the half of side `p` towards the
/// corner followed by the half of side `q` away from it. Summing these
/// halves gives an integral combination of edges, each of which `a`
/// crosses with a sign read off from the side it leaves through.
pub fn intersection_index(
    d: &DecoratedTriangulation,
    a: &HomologyCycle,
    b: &HomologyCycle,
) -> Result<i64> {
    a.validate(d)?;
    b.validate(d)?;
    // twice the edge coefficients of b
    let mut chain = vec![0i64; d.num_edges()];
    for s in &b.segments {
        let k = 3 - s.entry - s.exit;
        let (sa, sb) = (Side::new(s.tri, s.entry), Side::new(s.tri, s.exit));
        let along_a = if k == (s.entry + 2) % 3 { 1 } else { -1 };
        let along_b = if k == (s.exit + 1) % 3 { 1 } else { -1 };
        chain[d.edge_at(sa)] += along_a * side_sign(d, sa);
        chain[d.edge_at(sb)] += along_b * side_sign(d, sb);
    }
    // crossings of a with each edge, in the orientation where corners
    // 0, 1, 2 of every triangle run clockwise
    let mut cross = vec![0i64; d.num_edges()];
    for s in &a.segments {
        let side = Side::new(s.tri, s.exit);
        cross[d.edge_at(side)] -= side_sign(d, side);
    }
    let twice: i64 = chain.iter().zip(&cross).map(|(x, y)| x * y).sum();
    if twice % 2 != 0 {
        return Err(Error::InvalidCycle(
            "pushed cycle is not an integral chain".into(),
        ));
    }
    Ok(twice / 2)
}

/// One cycle per dual edge outside a breadth-first spanning tree of the
/// dual graph. These form a basis of the first homology.
pub fn h1_basis(d: &DecoratedTriangulation) -> Vec<HomologyCycle> {
    let f = d.num_triangles();
    // side of each triangle leading to its parent
    let mut up: Vec<Option<Side>> = vec![None; f];
    let mut depth = vec![usize::MAX; f];
    let mut tree_edge = vec![false; d.num_edges()];
    depth[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(t) = queue.pop_front() {
        for k in 0..3 {
            let s = Side::new(t, k);
            let o = d.glued(s);
            if depth[o.tri] == usize::MAX {
                depth[o.tri] = depth[t] + 1;
                up[o.tri] = Some(o);
                tree_edge[d.edge_at(s)] = true;
                queue.push_back(o.tri);
            }
        }
    }
    let parent = |t: TriId| up[t].map(|s| d.glued(s).tri);

    let mut basis = Vec::new();
    for c in (0..d.num_edges()).filter(|&c| !tree_edge[c]) {
        let [sa, sb] = d.sides_of(c);
        // exits along the path from sb.tri to sa.tri, then out through sa
        let (mut u, mut w) = (sb.tri, sa.tri);
        let mut ups = Vec::new();
        let mut downs = Vec::new();
        while u != w {
            if depth[u] >= depth[w] {
                ups.push(up[u].unwrap());
                u = parent(u).unwrap();
            } else {
                downs.push(d.glued(up[w].unwrap()));
                w = parent(w).unwrap();
            }
        }
        let exits: Vec<Side> = ups
            .into_iter()
            .chain(downs.into_iter().rev())
            .chain([sa])
            .collect();
        let mut entry = sb;
        let mut segments = Vec::new();
        for x in exits {
            debug_assert_eq!(x.tri, entry.tri);
            segments.push(Segment::new(x.tri, entry.slot, x.slot));
            entry = d.glued(x);
        }
        basis.push(HomologyCycle { segments });
    }
    basis
}

/// Rows are the holonomy covectors of `basis`.
pub fn momentum_matrix(
    d: &DecoratedTriangulation,
    basis: &[HomologyCycle],
) -> Result<Vec<Vec<i64>>> {
    basis
        .iter()
        .map(|c| holonomy_covector(d, c).map(|h| h.coeffs))
        .collect()
}

/// Formal combination `sum_v ln f(v) * gamma_v` of puncture loops.
#[derive(Clone, Debug)]
pub struct XiCycle {
    pub weights: Vec<Q>,
    pub loops: Vec<HomologyCycle>,
}

pub fn xi_f_cycle(d: &DecoratedTriangulation, f: &[Q]) -> Result<XiCycle> {
    if f.len() != d.num_punctures() {
        return Err(Error::Domain("one weight per puncture expected".into()));
    }
    if f.iter().any(|v| !v.is_positive()) {
        return Err(Error::Domain("puncture weights must be positive".into()));
    }
    let loops = (0..d.num_punctures())
        .map(|v| puncture_loop(d, v))
        .collect::<Result<_>>()?;
    Ok(XiCycle {
        weights: f.to_vec(),
        loops,
    })
}

/// Exponents of the prime factorisation of a positive rational.
fn factor(x: &Q) -> BTreeMap<u64, i64> {
    let mut out = BTreeMap::new();
    for (n, sign) in [(x.numer().clone(), 1), (x.denom().clone(), -1)] {
        let mut n: BigInt = n.abs();
        let mut p = 2u64;
        while n > BigInt::one() {
            let bp = BigInt::from(p);
            if &bp * &bp > n {
                // what remains is prime
                let r = n.to_u64().expect("prime factor fits in u64");
                *out.entry(r).or_insert(0) += sign;
                break;
            }
            while n.is_multiple_of(&bp) {
                n /= &bp;
                *out.entry(p).or_insert(0) += sign;
            }
            p += 1;
        }
    }
    out.retain(|_, e| *e != 0);
    out
}

/// Both sides of the flow/action comparison, as vectors in log
/// coordinates with coefficients in `ln p` for primes `p`.
#[derive(Clone, Debug, Serialize)]
pub struct FlowReport {
    pub primes: Vec<u64>,
    /// `pi * holonomy(xi_f)`, per prime.
    pub flow: Vec<Vec<String>>,
    /// `ln(action_s(k, f) / k)`, per prime.
    pub action: Vec<Vec<String>>,
    pub equal: bool,
}

/// Compares the Hamiltonian translation of `xi_f` with the structure group
/// action of `f` at `k`, using the Poisson tensor `pi`.
pub fn flow_equals_action_with(
    d: &DecoratedTriangulation,
    f: &[Q],
    k: &TrianglePoint,
    pi: &QMatrix,
) -> Result<FlowReport> {
    let xi = xi_f_cycle(d, f)?;
    let n = 2 * d.num_triangles();
    let mut flow: BTreeMap<u64, Vec<Q>> = BTreeMap::new();
    for (w, c) in xi.weights.iter().zip(&xi.loops) {
        let h = holonomy_covector(d, c)?;
        let h: Vec<Q> = h.coeffs.iter().map(|&a| qi(a)).collect();
        let v = pi.mul_vec(&h);
        for (p, e) in factor(w) {
            let acc = flow.entry(p).or_insert_with(|| vec![Q::zero(); n]);
            for (a, b) in acc.iter_mut().zip(&v) {
                *a += qi(e) * b;
            }
        }
    }
    let moved = action_s(d, k, f)?;
    let mut action: BTreeMap<u64, Vec<Q>> = BTreeMap::new();
    let ratios = moved
        .0
        .iter()
        .zip(&k.0)
        .flat_map(|(m, o)| [&m[0] / &o[0], &m[1] / &o[1]]);
    for (i, r) in ratios.enumerate() {
        for (p, e) in factor(&r) {
            action.entry(p).or_insert_with(|| vec![Q::zero(); n])[i] += qi(e);
        }
    }
    flow.retain(|_, v| v.iter().any(|x| !x.is_zero()));
    action.retain(|_, v| v.iter().any(|x| !x.is_zero()));
    let equal = flow == action;
    let mut primes: Vec<u64> = flow.keys().chain(action.keys()).copied().collect();
    primes.sort_unstable();
    primes.dedup();
    let show = |m: &BTreeMap<u64, Vec<Q>>| -> Vec<Vec<String>> {
        primes
            .iter()
            .map(|p| match m.get(p) {
                Some(v) => v.iter().map(crate::scalar::format_q).collect(),
                None => vec!["0".to_string(); n],
            })
            .collect()
    };
    Ok(FlowReport {
        flow: show(&flow),
        action: show(&action),
        primes,
        equal,
    })
}

/// [`flow_equals_action_with`] for the Poisson tensor inverse to the
/// canonical form.
pub fn flow_equals_action_check(
    d: &DecoratedTriangulation,
    f: &[Q],
    k: &TrianglePoint,
) -> Result<FlowReport> {
    let pi = poisson_tensor(&beta_form(d))?;
    flow_equals_action_with(d, f, k, &pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{triangle_from_penner, PennerPoint};
    use crate::scalar::q;

    fn surface(g: u32, s: u32) -> DecoratedTriangulation {
        DecoratedTriangulation::new_surface(g, s).unwrap()
    }

    #[test]
    fn factorisation() {
        let f = factor(&q(360, 77));
        assert_eq!(
            f,
            BTreeMap::from([(2, 3), (3, 2), (5, 1), (7, -1), (11, -1)])
        );
        assert!(factor(&q(5, 5)).is_empty());
        assert_eq!(factor(&q(997, 1)), BTreeMap::from([(997, 1)]));
    }

    #[test]
    fn basis_has_expected_rank() {
        for (g, s) in [(1, 1), (0, 4), (1, 2), (2, 1), (0, 3)] {
            let d = surface(g, s);
            let b = h1_basis(&d);
            assert_eq!(b.len(), (2 * g + s - 1) as usize);
            for c in &b {
                c.validate(&d).unwrap();
            }
            let m = QMatrix::from_i64(&momentum_matrix(&d, &b).unwrap());
            assert_eq!(m.rank(), (2 * g + s - 1) as usize);
        }
    }

    #[test]
    fn reversal_cancels() {
        // a cycle followed by its reverse bounds a thin strip
        for (g, s) in [(1, 1), (0, 4), (2, 1)] {
            let d = surface(g, s);
            for c in h1_basis(&d) {
                let h = holonomy_covector(&d, &c).unwrap();
                let r = holonomy_covector(&d, &c.reversed()).unwrap();
                assert!(h.add(&r).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn invalid_cycles_rejected() {
        let d = surface(1, 1);
        assert!(HomologyCycle::new(&d, vec![]).is_err());
        assert!(HomologyCycle::new(&d, vec![Segment::new(0, 1, 1)]).is_err());
        assert!(HomologyCycle::new(&d, vec![Segment::new(0, 0, 1)]).is_err());
    }

    #[test]
    fn puncture_loops_are_valid_and_sum_to_zero() {
        for (g, s) in [(1, 1), (0, 4), (1, 2)] {
            let d = surface(g, s);
            let mut total = LogCovector::zero(LogBasis::Triangles(d.num_triangles()));
            for v in 0..d.num_punctures() {
                let l = puncture_loop(&d, v).unwrap();
                total = total.add(&holonomy_covector(&d, &l).unwrap()).unwrap();
            }
            assert!(total.is_zero());
        }
    }

    #[test]
    fn flow_matches_action_and_detects_sign_error() {
        let d = surface(0, 4);
        let p = PennerPoint::new(&d, (1..=6).map(|i| q(2 * i + 1, i)).collect()).unwrap();
        let k = triangle_from_penner(&d, &p).unwrap();
        let f = vec![qi(2), qi(1), qi(1), qi(1)];
        let r = flow_equals_action_check(&d, &f, &k).unwrap();
        assert!(r.equal, "{r:?}");
        assert_eq!(r.primes, vec![2]);
        let pi = poisson_tensor(&beta_form(&d)).unwrap().neg();
        assert!(!flow_equals_action_with(&d, &f, &k, &pi).unwrap().equal);
        let r = flow_equals_action_check(&d, &vec![qi(3); 4], &k).unwrap();
        assert!(r.equal && r.primes.is_empty());
    }

    fn bracket_and_index(d: &DecoratedTriangulation) -> Vec<(Q, i64)> {
        let b = h1_basis(d);
        let beta = beta_form(d);
        let mut out = Vec::new();
        for x in &b {
            for y in &b {
                let hx = holonomy_covector(d, x).unwrap();
                let hy = holonomy_covector(d, y).unwrap();
                let p = poisson_bracket(&hx, &hy, &beta).unwrap();
                out.push((p, intersection_index(d, x, y).unwrap()));
            }
        }
        out
    }

    #[test]
    fn torus_basis_meets_once() {
        let d = surface(1, 1);
        let b = h1_basis(&d);
        assert_eq!(intersection_index(&d, &b[0], &b[1]).unwrap(), POISSON_SIGN);
        assert_eq!(intersection_index(&d, &b[1], &b[0]).unwrap(), -POISSON_SIGN);
        assert_eq!(intersection_index(&d, &b[0], &b[0]).unwrap(), 0);
        assert_eq!(
            intersection_index(&d, &b[0], &b[1].reversed()).unwrap(),
            -POISSON_SIGN
        );
    }

    #[test]
    fn bracket_is_twice_the_intersection_number() {
        for (g, s) in [(1, 1), (0, 4), (1, 2), (2, 1), (1, 3)] {
            let d = surface(g, s);
            for (p, i) in bracket_and_index(&d) {
                assert_eq!(p, qi(2 * POISSON_SIGN * i), "({g},{s})");
            }
        }
        // genus zero: every bracket vanishes
        assert!(bracket_and_index(&surface(0, 4))
            .iter()
            .all(|(p, i)| p.is_zero() && *i == 0));
    }

    #[test]
    fn bracket_is_antisymmetric_and_bilinear() {
        let d = surface(2, 1);
        let b = h1_basis(&d);
        let beta = beta_form(&d);
        let h: Vec<LogCovector> = b
            .iter()
            .map(|c| holonomy_covector(&d, c).unwrap())
            .collect();
        let br = |u: &LogCovector, v: &LogCovector| poisson_bracket(u, v, &beta).unwrap();
        for u in &h {
            assert!(br(u, u).is_zero());
            for v in &h {
                assert_eq!(br(u, v), -br(v, u));
                for w in &h {
                    let uv = u.scale(3).add(&v.scale(-2)).unwrap();
                    assert_eq!(br(&uv, w), qi(3) * br(u, w) - qi(2) * br(v, w));
                }
            }
        }
    }

    #[test]
    fn homologous_representatives_agree() {
        // on the once-punctured torus the puncture loop is null-homologous
        let d = surface(1, 1);
        let lp = puncture_loop(&d, 0).unwrap();
        assert!(holonomy_covector(&d, &lp).unwrap().is_zero());
        for c in h1_basis(&d) {
            let other = lp.splice(&c).unwrap();
            other.validate(&d).unwrap();
            assert_ne!(other, c);
            assert_eq!(
                holonomy_covector(&d, &other).unwrap(),
                holonomy_covector(&d, &c).unwrap()
            );
            let b = h1_basis(&d);
            for x in &b {
                assert_eq!(
                    intersection_index(&d, x, &other).unwrap(),
                    intersection_index(&d, x, &c).unwrap()
                );
            }
        }
    }

    #[test]
    fn splice_adds_covectors() {
        let d = surface(1, 2);
        let b = h1_basis(&d);
        for x in &b {
            for y in &b {
                if let Some(z) = x.splice(y) {
                    z.validate(&d).unwrap();
                    let sum = holonomy_covector(&d, x)
                        .unwrap()
                        .add(&holonomy_covector(&d, y).unwrap())
                        .unwrap();
                    assert_eq!(holonomy_covector(&d, &z).unwrap(), sum);
                }
            }
        }
    }
}
