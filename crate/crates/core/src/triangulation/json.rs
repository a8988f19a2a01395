use serde::{Deserialize, Serialize};

use super::{DecoratedTriangulation, EdgeId, Side, TriId};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleJson {
    pub id: TriId,
    pub slots: [EdgeId; 3],
}

/// Wire form: `{genus, punctures, triangles:[{id, slots}], gluing:[[[t,slot],[t,slot]], ...]}`.
///
/// Puncture ids are not part of the wire form; they are reassigned in
/// order of first appearance when reading.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationJson {
    pub genus: u32,
    pub punctures: u32,
    pub triangles: Vec<TriangleJson>,
    pub gluing: Vec<[[usize; 2]; 2]>,
}

impl From<&DecoratedTriangulation> for TriangulationJson {
    fn from(d: &DecoratedTriangulation) -> Self {
        let triangles = (0..d.num_triangles())
            .map(|id| TriangleJson {
                id,
                slots: d.slots(id),
            })
            .collect();
        let gluing = (0..d.num_edges())
            .map(|e| {
                let [p, q] = d.sides_of(e);
                [[p.tri, p.slot as usize], [q.tri, q.slot as usize]]
            })
            .collect();
        Self {
            genus: d.genus(),
            punctures: d.num_punctures() as u32,
            triangles,
            gluing,
        }
    }
}

impl TryFrom<&TriangulationJson> for DecoratedTriangulation {
    type Error = Error;

    fn try_from(j: &TriangulationJson) -> Result<Self> {
        let f = j.triangles.len();
        let mut slots = vec![None; f];
        for t in &j.triangles {
            if t.id >= f || slots[t.id].is_some() {
                return Err(Error::InvalidTriangulation(format!(
                    "triangle ids must be 0..{f} without repeats (got {})",
                    t.id
                )));
            }
            slots[t.id] = Some(t.slots);
        }
        let slots: Vec<[EdgeId; 3]> = slots.into_iter().map(Option::unwrap).collect();
        let d = DecoratedTriangulation::from_parts(j.genus, j.punctures, slots, None)?;
        // the gluing list must be exactly the involution implied by the slots
        let mut seen = vec![false; 3 * f];
        for pair in &j.gluing {
            let [p, q] = pair.map(|[t, k]| (t, k));
            for (t, k) in [p, q] {
                if t >= f || k > 2 || std::mem::replace(&mut seen[3 * t + k], true) {
                    return Err(Error::InvalidTriangulation(format!(
                        "gluing entry [{t},{k}] is out of range or repeated"
                    )));
                }
            }
            let ps = Side::new(p.0, p.1 as u8);
            if d.glued(ps) != Side::new(q.0, q.1 as u8) {
                return Err(Error::InvalidTriangulation(format!(
                    "gluing pairs [{},{}] with [{},{}] but the slots disagree",
                    p.0, p.1, q.0, q.1
                )));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidTriangulation(
                "gluing is not fixed-point free on all sides".into(),
            ));
        }
        Ok(d)
    }
}

impl DecoratedTriangulation {
    pub fn to_json(&self) -> TriangulationJson {
        self.into()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: TriangulationJson =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        (&j).try_into()
    }
}
