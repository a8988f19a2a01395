//! Isomorphisms between triangulations.
//!
//! An isomorphism maps side `(t, k)` of the source to side
//! `(triangles[t], k + rotations[t])` of the target. Orientation is always
//! preserved; it is decoration preserving when every rotation is zero.
//! Because the dual graph is connected, an isomorphism is determined by the
//! image of triangle 0, so the search tries every anchor image in
//! increasing order and propagates along the gluing.

use std::collections::VecDeque;

use super::{DecoratedTriangulation, EdgeId, Move, MoveWord, PunctureId, Relabeling, Side, TriId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub triangles: Vec<TriId>,
    pub rotations: Vec<u8>,
    pub edges: Vec<EdgeId>,
    pub punctures: Vec<PunctureId>,
}

impl Isomorphism {
    pub fn is_decorated(&self) -> bool {
        self.rotations.iter().all(|&r| r == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_decorated()
            && self.triangles.iter().enumerate().all(|(i, &t)| i == t)
            && self.edges.iter().enumerate().all(|(i, &e)| i == e)
            && self.punctures.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn to_relabeling(&self) -> Option<Relabeling> {
        self.is_decorated().then(|| Relabeling {
            triangles: self.triangles.clone(),
            edges: self.edges.clone(),
            punctures: self.punctures.clone(),
        })
    }
}

fn try_anchor(
    src: &DecoratedTriangulation,
    dst: &DecoratedTriangulation,
    anchor: TriId,
    anchor_rot: u8,
    decorated: bool,
) -> Option<Isomorphism> {
    let f = src.num_triangles();
    let mut tri = vec![usize::MAX; f];
    let mut rot = vec![0u8; f];
    let mut used = vec![false; f];
    tri[0] = anchor;
    rot[0] = anchor_rot;
    used[anchor] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(t) = queue.pop_front() {
        for k in 0..3u8 {
            let s = src.glued(Side::new(t, k));
            let image = Side::new(tri[t], (k + rot[t]) % 3);
            let d = dst.glued(image);
            let r = (3 + d.slot - s.slot) % 3;
            if tri[s.tri] == usize::MAX {
                if used[d.tri] {
                    return None;
                }
                tri[s.tri] = d.tri;
                rot[s.tri] = r;
                used[d.tri] = true;
                queue.push_back(s.tri);
            } else if tri[s.tri] != d.tri || rot[s.tri] != r {
                return None;
            }
        }
    }
    if decorated && rot.iter().any(|&r| r != 0) {
        return None;
    }
    let mut edges = vec![usize::MAX; src.num_edges()];
    let mut punctures = vec![usize::MAX; src.num_punctures()];
    for t in 0..f {
        for k in 0..3u8 {
            let img = (k + rot[t]) % 3;
            let e = src.edge_at(Side::new(t, k));
            let de = dst.edge_at(Side::new(tri[t], img));
            if edges[e] == usize::MAX {
                edges[e] = de;
            } else if edges[e] != de {
                return None;
            }
            let p = src.corner(t, k);
            let dp = dst.corner(tri[t], img);
            if punctures[p] == usize::MAX {
                punctures[p] = dp;
            } else if punctures[p] != dp {
                return None;
            }
        }
    }
    Some(Isomorphism {
        triangles: tri,
        rotations: rot,
        edges,
        punctures,
    })
}

/// All orientation-preserving isomorphisms `src -> dst`, in deterministic
/// order. With `decorated`, only decoration-preserving ones.
pub fn find_isomorphisms(
    src: &DecoratedTriangulation,
    dst: &DecoratedTriangulation,
    decorated: bool,
) -> Vec<Isomorphism> {
    if src.genus() != dst.genus()
        || src.num_punctures() != dst.num_punctures()
        || src.num_triangles() != dst.num_triangles()
    {
        return Vec::new();
    }
    let rots: &[u8] = if decorated { &[0] } else { &[0, 1, 2] };
    let mut out = Vec::new();
    for anchor in 0..dst.num_triangles() {
        for &r in rots {
            if let Some(iso) = try_anchor(src, dst, anchor, r, decorated) {
                out.push(iso);
            }
        }
    }
    out
}

/// First decoration-preserving isomorphism, if any.
pub fn is_isomorphic(
    d1: &DecoratedTriangulation,
    d2: &DecoratedTriangulation,
) -> Option<Isomorphism> {
    if d1.canonical_code() != d2.canonical_code() {
        return None;
    }
    find_isomorphisms(d1, d2, true).into_iter().next()
}

impl DecoratedTriangulation {
    /// Canonical decorated code: the lexicographically smallest BFS encoding
    /// over all anchor triangles. Equal codes iff decorated-isomorphic.
    pub fn canonical_code(&self) -> Vec<usize> {
        let f = self.num_triangles();
        let mut best: Option<Vec<usize>> = None;
        for anchor in 0..f {
            let mut label = vec![usize::MAX; f];
            let mut order = vec![anchor];
            label[anchor] = 0;
            let mut i = 0;
            while i < order.len() {
                let t = order[i];
                for k in 0..3u8 {
                    let s = self.glued(Side::new(t, k));
                    if label[s.tri] == usize::MAX {
                        label[s.tri] = order.len();
                        order.push(s.tri);
                    }
                }
                i += 1;
            }
            let mut code = vec![self.genus() as usize, self.num_punctures(), f];
            for &t in &order {
                for k in 0..3u8 {
                    let s = self.glued(Side::new(t, k));
                    code.push(label[s.tri]);
                    code.push(s.slot as usize);
                }
            }
            if best.as_ref().is_none_or(|b| code < *b) {
                best = Some(code);
            }
        }
        best.unwrap_or_default()
    }
}

/// Rotations and a relabeling taking `current` back onto `start`, using the
/// first undecorated isomorphism accepted by `accept`.
pub fn closing_word(
    current: &DecoratedTriangulation,
    start: &DecoratedTriangulation,
    accept: impl Fn(&Isomorphism) -> bool,
) -> Option<MoveWord> {
    let iso = find_isomorphisms(current, start, false)
        .into_iter()
        .find(|i| accept(i))?;
    let mut word = Vec::new();
    for (t, &r) in iso.rotations.iter().enumerate() {
        for _ in 0..(3 - r) % 3 {
            word.push(Move::Rotate { tri: t });
        }
    }
    word.push(Move::Relabel {
        map: Relabeling {
            triangles: iso.triangles,
            edges: iso.edges,
            punctures: iso.punctures,
        },
    });
    Some(MoveWord(word))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::apply_word;

    #[test]
    fn self_isomorphism_is_identity_first() {
        for (g, s) in [(1, 1), (0, 4), (1, 2), (2, 1)] {
            let d = DecoratedTriangulation::new_surface(g, s).unwrap();
            let iso = is_isomorphic(&d, &d).unwrap();
            assert!(iso.is_identity());
        }
    }

    #[test]
    fn different_surfaces_are_not_isomorphic() {
        let a = DecoratedTriangulation::new_surface(1, 1).unwrap();
        let b = DecoratedTriangulation::new_surface(0, 4).unwrap();
        assert!(is_isomorphic(&a, &b).is_none());
        assert!(find_isomorphisms(&a, &b, false).is_empty());
    }

    #[test]
    fn torus_has_six_undecorated_automorphisms() {
        let d = DecoratedTriangulation::new_surface(1, 1).unwrap();
        assert_eq!(find_isomorphisms(&d, &d, false).len(), 6);
    }

    #[test]
    fn single_rotation_against_exhaustive_search() {
        // torus: rotating triangle 0 is absorbed by the automorphism that
        // swaps the triangles, rotating triangle 1 is not
        let d = DecoratedTriangulation::new_surface(1, 1).unwrap();
        let r0 = d.rotate_corner(0).unwrap();
        let iso = is_isomorphic(&d, &r0).unwrap();
        assert_eq!(iso.triangles, vec![1, 0]);
        assert_eq!(d.relabel(&iso.to_relabeling().unwrap()).unwrap(), r0);
        let r1 = d.rotate_corner(1).unwrap();
        assert!(is_isomorphic(&d, &r1).is_none());
        assert!(find_isomorphisms(&d, &r1, true).is_empty());
        assert_ne!(d.canonical_code(), r1.canonical_code());
        assert_eq!(find_isomorphisms(&d, &r1, false).len(), 6);

        let s = DecoratedTriangulation::new_surface(0, 4).unwrap();
        let mut absorbed = 0;
        for t in 0..s.num_triangles() {
            let r = s.rotate_corner(t).unwrap();
            let exhaustive = !find_isomorphisms(&s, &r, true).is_empty();
            assert_eq!(is_isomorphic(&s, &r).is_some(), exhaustive);
            assert_eq!(s.canonical_code() == r.canonical_code(), exhaustive);
            assert!(!find_isomorphisms(&s, &r, false).is_empty());
            absorbed += exhaustive as usize;
        }
        assert!(absorbed < s.num_triangles());
    }

    #[test]
    fn closing_word_restores_start() {
        let d = DecoratedTriangulation::new_surface(0, 4).unwrap();
        let moved = d.rotate_corner(1).unwrap().rotate_corner(3).unwrap();
        let w = closing_word(&moved, &d, |_| true).unwrap();
        assert_eq!(apply_word(&moved, &w).unwrap(), d);
    }
}
