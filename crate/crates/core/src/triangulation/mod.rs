//! Decorated ideal triangulations of a punctured oriented surface.
//!
//! A triangulation is stored as a list of triangles, each holding the edge
//! ids of its three sides in *slot* order. Slot `k` is the side opposite
//! corner `k`; corner `0` is the distinguished corner, so it sits between
//! slots `1` and `2`. Side `k` runs from corner `k+1` to corner `k+2`
//! (indices mod 3) and corners `0, 1, 2` follow the orientation of every
//! triangle consistently. Every edge is glued orientation-reversingly to its
//! other incidence, which makes the surface orientable by construction, so
//! the gluing is fully determined by the slot table.
//!
//! Puncture ids are attached to corners and carried along by every move, so
//! weights on punctures stay meaningful across a move word.

mod iso;
mod json;
mod loops;
mod word;

use std::collections::VecDeque;

use crate::{Error, Result};

pub use iso::{closing_word, find_isomorphisms, is_isomorphic, Isomorphism};
pub use json::TriangulationJson;
pub use loops::{double_flip_word, find_pentagon, pentagon_word, torus_twist_words};
pub use word::{apply_word, Move, MoveWord, Relabeling};

pub type TriId = usize;
pub type EdgeId = usize;
pub type PunctureId = usize;

/// One side of one triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Side {
    pub tri: TriId,
    pub slot: u8,
}

impl Side {
    pub fn new(tri: TriId, slot: u8) -> Self {
        Self { tri, slot }
    }
}

/// Roles of the six arcs and two triangles around a flip, as in the
/// standard picture: the diagonal `e` separates `x` (where `e` is slot 1)
/// from `y` (where `e` is slot 2); `a, b` are the other sides of `y` and
/// `c, d` those of `x`, so that `{a, c}` and `{b, d}` are opposite sides of
/// the quadrilateral.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlipRoles {
    pub e: EdgeId,
    pub x: TriId,
    pub y: TriId,
    pub a: EdgeId,
    pub b: EdgeId,
    pub c: EdgeId,
    pub d: EdgeId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedTriangulation {
    genus: u32,
    punctures: u32,
    slots: Vec<[EdgeId; 3]>,
    corners: Vec<[PunctureId; 3]>,
    reembedded: Vec<bool>,
    // derived from `slots`
    sides: Vec<[Side; 2]>,
}

fn next(k: u8) -> u8 {
    (k + 1) % 3
}

fn prev(k: u8) -> u8 {
    (k + 2) % 3
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut i = i;
        while self.0[i] != r {
            let n = self.0[i];
            self.0[i] = r;
            i = n;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

impl DecoratedTriangulation {
    /// Deterministic triangulation of the genus `g` surface with `s`
    /// punctures.
    ///
    /// For `g >= 1` the `4g`-gon with boundary word `a1 b1 a1^-1 b1^-1 ...`
    /// is fan-triangulated from its first vertex (one puncture); for `g = 0`
    /// two triangles are glued along their boundary (three punctures).
    /// Remaining punctures are inserted one at a time by splitting
    /// triangle 0 into three.
    pub fn new_surface(g: u32, s: u32) -> Result<Self> {
        if s < 1 || 2 * g as i64 - 2 + s as i64 <= 0 {
            return Err(Error::Constraint(format!(
                "need s >= 1 and 2g-2+s > 0, got g={g}, s={s}"
            )));
        }
        let (mut slots, mut corners, mut placed) = if g == 0 {
            if s < 3 {
                unreachable!("excluded by 2g-2+s > 0");
            }
            (vec![[0, 1, 2], [0, 2, 1]], vec![[0, 1, 2], [0, 2, 1]], 3u32)
        } else {
            let (sl, co) = polygon_fan(g);
            (sl, co, 1u32)
        };
        while placed < s {
            split_triangle(&mut slots, &mut corners, 0, placed as usize);
            placed += 1;
        }
        Self::from_parts(g, s, slots, Some(corners))
    }

    /// Builds and validates a triangulation from a slot table. When `corners`
    /// is `None`, puncture ids are assigned in order of first appearance.
    pub fn from_parts(
        genus: u32,
        punctures: u32,
        slots: Vec<[EdgeId; 3]>,
        corners: Option<Vec<[PunctureId; 3]>>,
    ) -> Result<Self> {
        let n_edges = slots.len() * 3 / 2;
        let mut d = Self {
            genus,
            punctures,
            reembedded: vec![false; n_edges],
            sides: Vec::new(),
            corners: corners.clone().unwrap_or_else(|| vec![[0; 3]; slots.len()]),
            slots,
        };
        d.rebuild_sides()?;
        if corners.is_none() {
            d.corners = d.corner_classes().0;
        }
        d.validate()?;
        Ok(d)
    }

    fn rebuild_sides(&mut self) -> Result<()> {
        let f = self.slots.len();
        if f == 0 || !(3 * f).is_multiple_of(2) {
            return Err(Error::InvalidTriangulation(format!(
                "{f} triangles cannot be glued in pairs"
            )));
        }
        let e = 3 * f / 2;
        let mut seen: Vec<Vec<Side>> = vec![Vec::new(); e];
        for (t, row) in self.slots.iter().enumerate() {
            for (k, &edge) in row.iter().enumerate() {
                if edge >= e {
                    return Err(Error::InvalidTriangulation(format!(
                        "edge id {edge} out of range 0..{e}"
                    )));
                }
                seen[edge].push(Side::new(t, k as u8));
            }
        }
        let mut sides = Vec::with_capacity(e);
        for (edge, s) in seen.into_iter().enumerate() {
            if s.len() != 2 {
                return Err(Error::InvalidTriangulation(format!(
                    "edge {edge} has {} incidences, expected 2",
                    s.len()
                )));
            }
            sides.push([s[0], s[1]]);
        }
        self.sides = sides;
        if self.reembedded.len() != e {
            self.reembedded.resize(e, false);
        }
        Ok(())
    }

    /// Corner classes under the gluing, numbered by first appearance, and
    /// their count.
    fn corner_classes(&self) -> (Vec<[PunctureId; 3]>, usize) {
        let f = self.slots.len();
        let mut uf = UnionFind::new(3 * f);
        for pair in &self.sides {
            let [p, q] = *pair;
            uf.union(
                3 * p.tri + next(p.slot) as usize,
                3 * q.tri + prev(q.slot) as usize,
            );
            uf.union(
                3 * p.tri + prev(p.slot) as usize,
                3 * q.tri + next(q.slot) as usize,
            );
        }
        let mut label = vec![usize::MAX; 3 * f];
        let mut out = vec![[0; 3]; f];
        let mut count = 0;
        for (t, row) in out.iter_mut().enumerate() {
            for (k, slot) in row.iter_mut().enumerate() {
                let r = uf.find(3 * t + k);
                if label[r] == usize::MAX {
                    label[r] = count;
                    count += 1;
                }
                *slot = label[r];
            }
        }
        (out, count)
    }

    /// Checks the gluing, connectivity, puncture labels and Euler
    /// characteristic.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidTriangulation(m));
        let f = self.slots.len();
        let e = self.sides.len();
        let n = 2 * self.genus as i64 - 2 + self.punctures as i64;
        if n <= 0 {
            return bad(format!("2g-2+s = {n} must be positive"));
        }
        if f as i64 != 2 * n || e as i64 != 3 * n {
            return bad(format!(
                "F={f}, E={e} but (g,s)=({},{}) needs F={}, E={}",
                self.genus,
                self.punctures,
                2 * n,
                3 * n
            ));
        }
        if self.corners.len() != f {
            return bad("corner table size mismatch".into());
        }
        // connectivity of the dual graph
        let mut seen = vec![false; f];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(t) = queue.pop_front() {
            for k in 0..3 {
                let u = self.glued(Side::new(t, k)).tri;
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return bad("surface is not connected".into());
        }
        let (classes, v) = self.corner_classes();
        if v as u32 != self.punctures {
            return bad(format!("{v} puncture classes, expected {}", self.punctures));
        }
        let chi = v as i64 - e as i64 + f as i64;
        if chi != 2 - 2 * self.genus as i64 {
            return bad(format!("Euler characteristic {chi} does not match genus"));
        }
        // stored labels must be a bijective renaming of the corner classes
        let mut map = vec![usize::MAX; v];
        let mut used = vec![false; v];
        for (cls, labels) in classes.iter().zip(&self.corners) {
            for (&c, &l) in cls.iter().zip(labels) {
                if l >= v {
                    return bad(format!("puncture label {l} out of range"));
                }
                if map[c] == usize::MAX {
                    if used[l] {
                        return bad("puncture labels merge distinct punctures".into());
                    }
                    map[c] = l;
                    used[l] = true;
                } else if map[c] != l {
                    return bad("puncture labels split one puncture".into());
                }
            }
        }
        Ok(())
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn num_punctures(&self) -> usize {
        self.punctures as usize
    }

    pub fn num_triangles(&self) -> usize {
        self.slots.len()
    }

    pub fn num_edges(&self) -> usize {
        self.sides.len()
    }

    /// Number of distinct corner classes recomputed from the gluing.
    pub fn count_puncture_classes(&self) -> usize {
        self.corner_classes().1
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.count_puncture_classes() as i64 - self.num_edges() as i64 + self.num_triangles() as i64
    }

    pub fn slots(&self, t: TriId) -> [EdgeId; 3] {
        self.slots[t]
    }

    pub fn slot_table(&self) -> &[[EdgeId; 3]] {
        &self.slots
    }

    pub fn corner_table(&self) -> &[[PunctureId; 3]] {
        &self.corners
    }

    pub fn edge_at(&self, side: Side) -> EdgeId {
        self.slots[side.tri][side.slot as usize]
    }

    /// Puncture at corner `k` of triangle `t`.
    pub fn corner(&self, t: TriId, k: u8) -> PunctureId {
        self.corners[t][k as usize]
    }

    pub fn sides_of(&self, e: EdgeId) -> [Side; 2] {
        self.sides[e]
    }

    pub fn is_reembedded(&self, e: EdgeId) -> bool {
        self.reembedded[e]
    }

    /// The side glued to `side`.
    pub fn glued(&self, side: Side) -> Side {
        let [p, q] = self.sides[self.edge_at(side)];
        if p == side {
            q
        } else {
            p
        }
    }

    /// The two punctures joined by edge `e`.
    pub fn edge_endpoints(&self, e: EdgeId) -> (PunctureId, PunctureId) {
        let s = self.sides[e][0];
        (
            self.corner(s.tri, next(s.slot)),
            self.corner(s.tri, prev(s.slot)),
        )
    }

    pub fn is_self_folded(&self, e: EdgeId) -> bool {
        let [p, q] = self.sides[e];
        p.tri == q.tri
    }

    pub fn check_triangle(&self, t: TriId) -> Result<()> {
        if t < self.slots.len() {
            Ok(())
        } else {
            Err(Error::UnknownTriangle(t))
        }
    }

    pub fn check_edge(&self, e: EdgeId) -> Result<()> {
        if e < self.sides.len() {
            Ok(())
        } else {
            Err(Error::UnknownEdge(e))
        }
    }

    /// Corners around puncture `v`, in the order a small loop around `v`
    /// visits them. At corner `(t, k)` the loop enters through slot `k+1`
    /// and leaves through slot `k+2`.
    pub fn corner_cycle(&self, v: PunctureId) -> Vec<(TriId, u8)> {
        let Some(start) = (0..self.num_triangles())
            .flat_map(|t| (0..3u8).map(move |k| (t, k)))
            .find(|&(t, k)| self.corner(t, k) == v)
        else {
            return Vec::new();
        };
        let mut out = vec![start];
        let mut cur = start;
        loop {
            let out_side = self.glued(Side::new(cur.0, prev(cur.1)));
            let nxt = (out_side.tri, prev(out_side.slot));
            if nxt == start {
                break;
            }
            out.push(nxt);
            cur = nxt;
        }
        out
    }

    /// Rotates the distinguished corner of `t` one step: the new corner 0
    /// is the old corner 1, and new slot `k` is old slot `k+1`.
    pub fn rotate_corner(&self, t: TriId) -> Result<Self> {
        self.check_triangle(t)?;
        let mut d = self.clone();
        d.slots[t].rotate_left(1);
        d.corners[t].rotate_left(1);
        d.rebuild_sides()?;
        Ok(d)
    }

    /// Identifies the flip roles around `e`, requiring normal position
    /// (`e` in slot 1 of one triangle and slot 2 of the other).
    pub fn flip_roles(&self, e: EdgeId) -> Result<FlipRoles> {
        self.check_edge(e)?;
        if self.is_self_folded(e) {
            return Err(Error::SelfFolded(e));
        }
        let [p, q] = self.sides[e];
        let (xs, ys) = match (p.slot, q.slot) {
            (1, 2) => (p, q),
            (2, 1) => (q, p),
            _ => return Err(Error::NotNormal(e)),
        };
        let (x, y) = (xs.tri, ys.tri);
        Ok(FlipRoles {
            e,
            x,
            y,
            a: self.slots[y][1],
            b: self.slots[y][0],
            c: self.slots[x][0],
            d: self.slots[x][2],
        })
    }

    /// Quadrilateral around `e` without any decoration requirement:
    /// returns `((p1, q1), (p2, q2))`, the two pairs of opposite sides.
    pub fn opposite_pairs(&self, e: EdgeId) -> Result<((EdgeId, EdgeId), (EdgeId, EdgeId))> {
        self.check_edge(e)?;
        if self.is_self_folded(e) {
            return Err(Error::SelfFolded(e));
        }
        let [p, q] = self.sides[e];
        let at = |s: Side, k: u8| self.slots[s.tri][k as usize];
        // following each triangle's orientation from `e`: (next, next-next)
        let (p1, p2) = (at(p, next(p.slot)), at(p, prev(p.slot)));
        let (q1, q2) = (at(q, next(q.slot)), at(q, prev(q.slot)));
        Ok(((p1, q1), (p2, q2)))
    }

    /// Decorated flip along `e`, which must be in normal position.
    ///
    /// Triangle ids and the edge id are reused: `x` becomes the triangle
    /// `(e, a, d)` with its distinguished corner kept, `y` becomes
    /// `(b, e, c)` with its distinguished corner at the old corner 1 of `x`.
    pub fn flip(&self, e: EdgeId) -> Result<Self> {
        let r = self.flip_roles(e)?;
        let mut d = self.clone();
        let cx = self.corners[r.x];
        let cy = self.corners[r.y];
        d.slots[r.x] = [e, r.a, r.d];
        d.slots[r.y] = [r.b, e, r.c];
        d.corners[r.x] = [cx[0], cx[1], cy[2]];
        d.corners[r.y] = [cx[1], cx[2], cy[2]];
        d.reembedded[e] = true;
        d.rebuild_sides()?;
        Ok(d)
    }

    /// Shortest word of corner rotations after which `e` is in normal
    /// position for [`flip`](Self::flip).
    pub fn normalize_for_flip(&self, e: EdgeId) -> Result<MoveWord> {
        self.check_edge(e)?;
        if self.is_self_folded(e) {
            return Err(Error::SelfFolded(e));
        }
        let [p, q] = self.sides[e];
        let rot = |s: u8, target: u8| (3 + s - target) % 3;
        // option A: p plays x (slot 1), q plays y (slot 2); option B: swapped
        let a = (rot(p.slot, 1), rot(q.slot, 2));
        let b = (rot(p.slot, 2), rot(q.slot, 1));
        let (rp, rq) = if a.0 + a.1 <= b.0 + b.1 { a } else { b };
        let mut word = Vec::new();
        word.extend(std::iter::repeat_n(
            Move::Rotate { tri: p.tri },
            rp as usize,
        ));
        word.extend(std::iter::repeat_n(
            Move::Rotate { tri: q.tri },
            rq as usize,
        ));
        Ok(MoveWord(word))
    }

    /// Rotations followed by the flip along `e`.
    pub fn normalized_flip_word(&self, e: EdgeId) -> Result<MoveWord> {
        let mut w = self.normalize_for_flip(e)?;
        w.0.push(Move::Flip { edge: e });
        Ok(w)
    }

    pub fn apply(&self, m: &Move) -> Result<Self> {
        match m {
            Move::Flip { edge } => self.flip(*edge),
            Move::Rotate { tri } => self.rotate_corner(*tri),
            Move::Relabel { map } => self.relabel(map),
        }
    }

    /// Renames triangles, edges and punctures.
    pub fn relabel(&self, r: &Relabeling) -> Result<Self> {
        r.check(self)?;
        let f = self.num_triangles();
        let mut slots = vec![[0; 3]; f];
        let mut corners = vec![[0; 3]; f];
        for t in 0..f {
            let u = r.triangles[t];
            for k in 0..3 {
                slots[u][k] = r.edges[self.slots[t][k]];
                corners[u][k] = r.punctures[self.corners[t][k]];
            }
        }
        let mut reembedded = vec![false; self.num_edges()];
        for (e, &flag) in self.reembedded.iter().enumerate() {
            reembedded[r.edges[e]] = flag;
        }
        let mut d = Self {
            genus: self.genus,
            punctures: self.punctures,
            slots,
            corners,
            reembedded,
            sides: Vec::new(),
        };
        d.rebuild_sides()?;
        Ok(d)
    }

    /// Same triangulation with all re-embedding flags cleared.
    pub fn without_flags(&self) -> Self {
        let mut d = self.clone();
        d.reembedded.iter_mut().for_each(|f| *f = false);
        d
    }
}

/// Fan triangulation of the `4g`-gon with word `a1 b1 a1^-1 b1^-1 ...`.
fn polygon_fan(g: u32) -> (Vec<[EdgeId; 3]>, Vec<[PunctureId; 3]>) {
    let m = 4 * g as usize;
    // polygon side i joins v_i -> v_{i+1}; sides 4j, 4j+2 are one edge, as
    // are 4j+1, 4j+3
    let side_edge = |i: usize| {
        let j = i / 4;
        2 * j + (i % 2)
    };
    let n_sides = 2 * g as usize;
    // diagonal v0 - v_i for 2 <= i <= m-2
    let diag = |i: usize| n_sides + (i - 2);
    let edge_v0_to = |i: usize| {
        if i == 1 {
            side_edge(0)
        } else if i == m - 1 {
            side_edge(m - 1)
        } else {
            diag(i)
        }
    };
    let mut slots = Vec::new();
    for i in 1..=m - 2 {
        // corners (v0, v_i, v_{i+1})
        slots.push([side_edge(i), edge_v0_to(i + 1), edge_v0_to(i)]);
    }
    let corners = vec![[0; 3]; slots.len()];
    (slots, corners)
}

/// Inserts puncture `q` inside triangle `t`, replacing it by three
/// triangles whose distinguished corners sit at `q`.
fn split_triangle(
    slots: &mut Vec<[EdgeId; 3]>,
    corners: &mut Vec<[PunctureId; 3]>,
    t: TriId,
    q: PunctureId,
) {
    let [e0, e1, e2] = slots[t];
    let [p0, p1, p2] = corners[t];
    let base = slots.len() * 3 / 2;
    let (f0, f1, f2) = (base, base + 1, base + 2);
    slots[t] = [e0, f2, f1];
    corners[t] = [q, p1, p2];
    slots.push([e1, f0, f2]);
    corners.push([q, p2, p0]);
    slots.push([e2, f1, f0]);
    corners.push([q, p0, p1]);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_small_surfaces() {
        for (g, s) in [
            (1, 1),
            (0, 3),
            (0, 4),
            (1, 2),
            (2, 1),
            (0, 5),
            (2, 2),
            (3, 1),
        ] {
            let d = DecoratedTriangulation::new_surface(g, s).unwrap();
            let n = (2 * g + s - 2) as usize;
            assert_eq!(d.num_triangles(), 2 * n);
            assert_eq!(d.num_edges(), 3 * n);
            assert_eq!(d.count_puncture_classes(), s as usize);
            assert_eq!(d.euler_characteristic(), 2 - 2 * g as i64);
        }
    }

    #[test]
    fn rejects_unstable_surfaces() {
        for (g, s) in [(0, 2), (0, 1), (1, 0), (0, 0)] {
            assert!(matches!(
                DecoratedTriangulation::new_surface(g, s),
                Err(Error::Constraint(_))
            ));
        }
    }

    #[test]
    fn rotate_has_order_three() {
        let d = DecoratedTriangulation::new_surface(1, 1).unwrap();
        let once = d.rotate_corner(0).unwrap();
        assert_ne!(once, d);
        assert_eq!(once.slots(0), [d.slots(0)[1], d.slots(0)[2], d.slots(0)[0]]);
        assert_eq!(once.slots(1), d.slots(1));
        let thrice = once.rotate_corner(0).unwrap().rotate_corner(0).unwrap();
        assert_eq!(thrice, d);
        assert_eq!(d.rotate_corner(7), Err(Error::UnknownTriangle(7)));
    }

    #[test]
    fn torus_edges_border_both_triangles() {
        let d = DecoratedTriangulation::new_surface(1, 1).unwrap();
        for e in 0..3 {
            let [p, q] = d.sides_of(e);
            assert_ne!(p.tri, q.tri);
            let w = d.normalize_for_flip(e).unwrap();
            let n = apply_word(&d, &w).unwrap();
            let f = n.flip(e).unwrap();
            f.validate().unwrap();
            assert!(f.is_reembedded(e));
        }
    }

    #[test]
    fn flip_requires_normal_position() {
        let d = DecoratedTriangulation::new_surface(0, 4).unwrap();
        let mut hit = false;
        for e in 0..d.num_edges() {
            let [p, q] = d.sides_of(e);
            let normal = matches!((p.slot, q.slot), (1, 2) | (2, 1));
            assert_eq!(d.flip(e).is_ok(), normal);
            if !normal {
                assert_eq!(d.flip(e), Err(Error::NotNormal(e)));
                hit = true;
            }
        }
        assert!(hit);
    }

    #[test]
    fn corner_cycle_covers_each_corner_once() {
        let d = DecoratedTriangulation::new_surface(1, 2).unwrap();
        let mut total = 0;
        for v in 0..d.num_punctures() {
            let cyc = d.corner_cycle(v);
            assert!(cyc.iter().all(|&(t, k)| d.corner(t, k) == v));
            total += cyc.len();
        }
        assert_eq!(total, 3 * d.num_triangles());
    }

    #[test]
    fn edge_endpoints_on_four_punctured_sphere() {
        let d = DecoratedTriangulation::new_surface(0, 4).unwrap();
        // every edge of the stellar subdivision joins distinct punctures
        for e in 0..d.num_edges() {
            let (u, v) = d.edge_endpoints(e);
            assert_ne!(u, v);
        }
    }
}
