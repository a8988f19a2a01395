use serde::{Deserialize, Serialize};

use super::{DecoratedTriangulation, EdgeId, PunctureId, TriId};
use crate::{Error, Result};

/// Renaming of triangles, edges and punctures (`old -> new`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relabeling {
    pub triangles: Vec<TriId>,
    pub edges: Vec<EdgeId>,
    #[serde(default)]
    pub punctures: Vec<PunctureId>,
}

fn is_permutation(v: &[usize], n: usize) -> bool {
    if v.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    v.iter()
        .all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}

impl Relabeling {
    pub fn identity(d: &DecoratedTriangulation) -> Self {
        Self {
            triangles: (0..d.num_triangles()).collect(),
            edges: (0..d.num_edges()).collect(),
            punctures: (0..d.num_punctures()).collect(),
        }
    }

    pub fn check(&self, d: &DecoratedTriangulation) -> Result<()> {
        if !is_permutation(&self.triangles, d.num_triangles())
            || !is_permutation(&self.edges, d.num_edges())
            || !is_permutation(&self.punctures, d.num_punctures())
        {
            return Err(Error::Domain(
                "relabeling is not a bijection of triangles, edges and punctures".into(),
            ));
        }
        Ok(())
    }

    /// Fills an empty puncture map with the identity.
    pub fn completed(mut self, d: &DecoratedTriangulation) -> Self {
        if self.punctures.is_empty() {
            self.punctures = (0..d.num_punctures()).collect();
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Move {
    Flip {
        edge: EdgeId,
    },
    #[serde(rename = "rot")]
    Rotate {
        tri: TriId,
    },
    Relabel {
        map: Relabeling,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MoveWord(pub Vec<Move>);

impl MoveWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Move> {
        self.0.iter()
    }

    pub fn concat(&self, other: &MoveWord) -> MoveWord {
        MoveWord(self.0.iter().chain(other.0.iter()).cloned().collect())
    }

    pub fn repeat(&self, n: usize) -> MoveWord {
        MoveWord(
            std::iter::repeat_n(self.0.iter().cloned(), n)
                .flatten()
                .collect(),
        )
    }

    pub fn number_of_flips(&self) -> usize {
        self.0
            .iter()
            .filter(|m| matches!(m, Move::Flip { .. }))
            .count()
    }
}

impl FromIterator<Move> for MoveWord {
    fn from_iter<I: IntoIterator<Item = Move>>(iter: I) -> Self {
        MoveWord(iter.into_iter().collect())
    }
}

/// Applies the moves in order; the first failing move is reported with its
/// index.
pub fn apply_word(d: &DecoratedTriangulation, w: &MoveWord) -> Result<DecoratedTriangulation> {
    let mut cur = d.clone();
    for (index, m) in w.iter().enumerate() {
        cur = cur.apply(m).map_err(|e| Error::WordStep {
            index,
            source: Box::new(e),
        })?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_json_shape() {
        let w = MoveWord(vec![
            Move::Flip { edge: 2 },
            Move::Rotate { tri: 1 },
            Move::Relabel {
                map: Relabeling {
                    triangles: vec![1, 0],
                    edges: vec![0, 2, 1],
                    punctures: vec![0],
                },
            },
        ]);
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(
            s,
            r#"[{"op":"flip","edge":2},{"op":"rot","tri":1},{"op":"relabel","map":{"triangles":[1,0],"edges":[0,2,1],"punctures":[0]}}]"#
        );
        let back: MoveWord = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn failing_step_reports_index() {
        let d = DecoratedTriangulation::new_surface(1, 1).unwrap();
        let w = MoveWord(vec![Move::Rotate { tri: 0 }, Move::Rotate { tri: 5 }]);
        match apply_word(&d, &w) {
            Err(Error::WordStep { index, source }) => {
                assert_eq!(index, 1);
                assert_eq!(*source, Error::UnknownTriangle(5));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn relabeling_must_be_bijective() {
        let d = DecoratedTriangulation::new_surface(1, 1).unwrap();
        let r = Relabeling {
            triangles: vec![0, 0],
            edges: vec![0, 1, 2],
            punctures: vec![0],
        };
        assert!(d.relabel(&r).is_err());
    }
}
