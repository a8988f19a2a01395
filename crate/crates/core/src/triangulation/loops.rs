//! Closed move words: double flips, pentagons and mapping classes of the
//! once-punctured torus.
//!
//! A closed word ends with a relabeling back onto the starting
//! triangulation. When several isomorphisms exist (the torus has an
//! elliptic involution fixing every arc), the one chosen keeps each side of
//! every never-flipped arc on the same side.

use std::collections::BTreeSet;

use super::{
    apply_word, closing_word, DecoratedTriangulation, EdgeId, Isomorphism, Move, MoveWord, Side,
};
use crate::{Error, Result};

/// Location of the first incidence of every edge after a relabel-free word,
/// plus the set of flipped edges.
fn track_sides(
    start: &DecoratedTriangulation,
    word: &MoveWord,
) -> Result<(Vec<Side>, BTreeSet<EdgeId>)> {
    let mut loc: Vec<Side> = (0..start.num_edges())
        .map(|e| start.sides_of(e)[0])
        .collect();
    let mut flipped = BTreeSet::new();
    let mut cur = start.clone();
    for m in word.iter() {
        match m {
            Move::Rotate { tri } => {
                for s in loc.iter_mut().filter(|s| s.tri == *tri) {
                    s.slot = (s.slot + 2) % 3;
                }
            }
            Move::Flip { edge } => {
                let r = cur.flip_roles(*edge)?;
                flipped.insert(*edge);
                for s in loc.iter_mut() {
                    let moved = match (s.tri, s.slot) {
                        (t, 0) if t == r.x => Some(Side::new(r.y, 2)),
                        (t, 1) if t == r.y => Some(Side::new(r.x, 1)),
                        _ => None,
                    };
                    if let Some(m) = moved {
                        *s = m;
                    }
                }
            }
            Move::Relabel { .. } => {
                return Err(Error::Domain(
                    "side tracking expects a word without relabelings".into(),
                ))
            }
        }
        cur = cur.apply(m)?;
    }
    Ok((loc, flipped))
}

fn preserves_tracked_sides(
    iso: &Isomorphism,
    start: &DecoratedTriangulation,
    loc: &[Side],
    flipped: &BTreeSet<EdgeId>,
) -> bool {
    (0..start.num_edges())
        .filter(|e| !flipped.contains(e))
        .all(|e| {
            let s = loc[e];
            let image = Side::new(iso.triangles[s.tri], (s.slot + iso.rotations[s.tri]) % 3);
            iso.edges[e] == e && image == start.sides_of(e)[0]
        })
}

/// Completes `word` (which must bring `start` back to the same undecorated
/// triangulation) with rotations and the geometrically trivial relabeling.
fn close(start: &DecoratedTriangulation, word: MoveWord) -> Result<MoveWord> {
    let cur = apply_word(start, &word)?;
    let (loc, flipped) = track_sides(start, &word)?;
    let tail = closing_word(&cur, start, |iso| {
        preserves_tracked_sides(iso, start, &loc, &flipped)
    })
    .ok_or_else(|| Error::Domain("word does not close up".into()))?;
    Ok(word.concat(&tail))
}

/// Flip `e`, flip it back, and restore decorations and labels.
pub fn double_flip_word(d: &DecoratedTriangulation, e: EdgeId) -> Result<MoveWord> {
    let first = d.normalized_flip_word(e)?;
    let mid = apply_word(d, &first)?;
    let second = mid.normalized_flip_word(e)?;
    close(d, first.concat(&second))
}

/// Two edges `(e1, e2)` bounding a common triangle whose other neighbours
/// are two further distinct triangles, i.e. the diagonals of an embedded
/// pentagon.
pub fn find_pentagon(d: &DecoratedTriangulation) -> Option<(EdgeId, EdgeId)> {
    for t in 0..d.num_triangles() {
        for (k1, k2) in [(0u8, 1u8), (0, 2), (1, 2)] {
            let e1 = d.edge_at(Side::new(t, k1));
            let e2 = d.edge_at(Side::new(t, k2));
            let t1 = d.glued(Side::new(t, k1)).tri;
            let t3 = d.glued(Side::new(t, k2)).tri;
            if e1 != e2 && t1 != t && t3 != t && t1 != t3 {
                return Some((e1, e2));
            }
        }
    }
    None
}

/// Five alternating flips of the two pentagon diagonals, each preceded by
/// its normalizing rotations, closed by rotations and a relabeling.
pub fn pentagon_word(d: &DecoratedTriangulation, e1: EdgeId, e2: EdgeId) -> Result<MoveWord> {
    let mut word = MoveWord::default();
    let mut cur = d.clone();
    for e in [e1, e2, e1, e2, e1] {
        let step = cur.normalized_flip_word(e)?;
        cur = apply_word(&cur, &step)?;
        word = word.concat(&step);
    }
    close(d, word)
}

/// Two mapping classes of the once-punctured torus realised as closed
/// words: flipping edge 1 resp. edge 2 and relabeling so that
/// `(0, 1, 2) -> (0, 2, 1)` resp. `(0, 1, 2) -> (2, 1, 0)`. They act on the
/// homology of the arcs as the two Dehn twists about the curves parallel to
/// arcs 0 and 1, whose product has order six.
pub fn torus_twist_words(d: &DecoratedTriangulation) -> Result<(MoveWord, MoveWord)> {
    if d.genus() != 1 || d.num_punctures() != 1 {
        return Err(Error::Domain(
            "twist words need the once-punctured torus".into(),
        ));
    }
    let make = |edge: EdgeId, edge_map: [EdgeId; 3]| -> Result<MoveWord> {
        let w = d.normalized_flip_word(edge)?;
        let cur = apply_word(d, &w)?;
        let tail = closing_word(&cur, d, |iso| iso.edges == edge_map)
            .ok_or_else(|| Error::Domain("no isomorphism with the twist edge map".into()))?;
        Ok(w.concat(&tail))
    };
    Ok((make(1, [0, 2, 1])?, make(2, [2, 1, 0])?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::is_isomorphic;

    #[test]
    fn double_flip_closes_on_every_edge() {
        for (g, s) in [(1, 1), (0, 4), (1, 2), (2, 1)] {
            let d = DecoratedTriangulation::new_surface(g, s).unwrap();
            for e in 0..d.num_edges() {
                let w = double_flip_word(&d, e).unwrap();
                let end = apply_word(&d, &w).unwrap();
                assert_eq!(end.without_flags(), d);
                assert!(is_isomorphic(&end, &d).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn pentagon_closes() {
        for (g, s) in [(0, 4), (1, 2), (2, 1), (0, 5)] {
            let d = DecoratedTriangulation::new_surface(g, s).unwrap();
            let (e1, e2) = find_pentagon(&d).unwrap();
            let w = pentagon_word(&d, e1, e2).unwrap();
            assert_eq!(w.number_of_flips(), 5);
            assert_eq!(apply_word(&d, &w).unwrap().without_flags(), d);
        }
        let torus = DecoratedTriangulation::new_surface(1, 1).unwrap();
        assert!(find_pentagon(&torus).is_none());
    }

    #[test]
    fn torus_twists_exist() {
        let d = DecoratedTriangulation::new_surface(1, 1).unwrap();
        let (m1, m2) = torus_twist_words(&d).unwrap();
        for w in [&m1, &m2] {
            assert_eq!(w.number_of_flips(), 1);
            assert_eq!(apply_word(&d, w).unwrap().without_flags(), d);
        }
    }
}
