use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    /// Trivalent vertex carrying `c_abc` (and its derivatives).
    CVertex,
    /// Anchor vertex carrying `ρ^i_a` (and its derivatives).
    RhoVertex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotKind {
    Solid,
    DottedIn,
    DottedOut,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Plus,
    Minus,
    Dotted,
}

/// An internal vertex. The order of its solid slots is its cyclic order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vertex {
    pub kind: VertexKind,
    pub slots: Vec<SlotKind>,
}

/// A half-edge: slot `slot` of vertex `vertex`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct End {
    pub vertex: usize,
    pub slot: usize,
}

/// Solid edges are unoriented; for dotted edges `a` is the tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub a: End,
    pub b: End,
    pub kind: EdgeKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Leaf {
    pub at: End,
    pub kind: EdgeKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignedGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub leaves: Vec<Leaf>,
}

impl SignedGraph {
    /// Builds and validates a graph.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>, leaves: Vec<Leaf>) -> Result<Self> {
        let g = Self {
            vertices,
            edges,
            leaves,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGraph(msg));
        if self.vertices.is_empty() {
            return bad("graph has no internal vertex".into());
        }
        for (i, v) in self.vertices.iter().enumerate() {
            let count = |k| v.slots.iter().filter(|&&s| s == k).count();
            let (solid, dout) = (count(SlotKind::Solid), count(SlotKind::DottedOut));
            match v.kind {
                VertexKind::CVertex if solid != 3 || dout != 0 => {
                    return bad(format!(
                        "c-vertex {i} needs 3 solid and no outgoing dotted half-edges"
                    ))
                }
                VertexKind::RhoVertex if solid != 1 || dout != 1 => {
                    return bad(format!(
                        "rho-vertex {i} needs 1 solid and 1 outgoing dotted half-edge"
                    ))
                }
                _ => {}
            }
        }
        let mut used: Vec<Vec<bool>> = self
            .vertices
            .iter()
            .map(|v| vec![false; v.slots.len()])
            .collect();
        let mut occupy = |e: End| -> Result<SlotKind> {
            let kind = self
                .vertices
                .get(e.vertex)
                .and_then(|v| v.slots.get(e.slot))
                .copied()
                .ok_or_else(|| Error::InvalidGraph(format!("no slot {e:?}")))?;
            if std::mem::replace(&mut used[e.vertex][e.slot], true) {
                return Err(Error::InvalidGraph(format!("slot {e:?} used twice")));
            }
            Ok(kind)
        };
        for e in &self.edges {
            if e.a.vertex == e.b.vertex {
                return bad(format!("tadpole at vertex {}", e.a.vertex));
            }
            let (ka, kb) = (occupy(e.a)?, occupy(e.b)?);
            let ok = match e.kind {
                EdgeKind::Plus | EdgeKind::Minus => {
                    ka == SlotKind::Solid && kb == SlotKind::Solid
                }
                EdgeKind::Dotted => ka == SlotKind::DottedOut && kb == SlotKind::DottedIn,
            };
            if !ok {
                return bad(format!("edge {:?}-{:?} joins incompatible slots", e.a, e.b));
            }
        }
        for l in &self.leaves {
            let k = occupy(l.at)?;
            let ok = match l.kind {
                EdgeKind::Plus | EdgeKind::Minus => k == SlotKind::Solid,
                EdgeKind::Dotted => k != SlotKind::Solid,
            };
            if !ok {
                return bad(format!("leaf at {:?} has the wrong kind", l.at));
            }
        }
        if let Some((v, s)) = used
            .iter()
            .enumerate()
            .find_map(|(v, u)| u.iter().position(|x| !x).map(|s| (v, s)))
        {
            return bad(format!("slot {s} of vertex {v} is unattached"));
        }
        Ok(())
    }

    pub fn half_edge_count(&self) -> usize {
        self.vertices.iter().map(|v| v.slots.len()).sum()
    }

    pub fn has_dotted_content(&self) -> bool {
        self.vertices
            .iter()
            .any(|v| v.kind == VertexKind::RhoVertex || v.slots.iter().any(|&s| s != SlotKind::Solid))
            || self.edges.iter().any(|e| e.kind == EdgeKind::Dotted)
            || self.leaves.iter().any(|l| l.kind == EdgeKind::Dotted)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: Self = serde_json::from_str(text)?;
        g.validate()?;
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }
}

fn c_vertex(extra_dotted_in: usize) -> Vertex {
    let mut slots = vec![SlotKind::Solid; 3];
    slots.extend(std::iter::repeat(SlotKind::DottedIn).take(extra_dotted_in));
    Vertex {
        kind: VertexKind::CVertex,
        slots,
    }
}

fn end(vertex: usize, slot: usize) -> End {
    End { vertex, slot }
}

fn eye_with(upper: EdgeKind, lower: EdgeKind) -> SignedGraph {
    // x = 0 (left), y = 1 (right); slots listed anticlockwise from the leaf
    // x: [leaf 1, lower edge, upper edge], y: [leaf 2, upper edge, lower edge]
    SignedGraph::new(
        vec![c_vertex(0), c_vertex(0)],
        vec![
            Edge {
                a: end(0, 2),
                b: end(1, 1),
                kind: upper,
            },
            Edge {
                a: end(0, 1),
                b: end(1, 2),
                kind: lower,
            },
        ],
        vec![
            Leaf {
                at: end(0, 0),
                kind: EdgeKind::Plus,
            },
            Leaf {
                at: end(1, 0),
                kind: EdgeKind::Minus,
            },
        ],
    )
    .expect("eye diagram is valid")
}

/// The eye diagram `D`: leaf 1 is `+`, leaf 2 is `−`, upper edge `+`, lower edge `−`.
pub fn eye_diagram() -> SignedGraph {
    eye_with(EdgeKind::Plus, EdgeKind::Minus)
}

/// The eye diagram with both internal edges signed `+`.
pub fn unsigned_eye_diagram() -> SignedGraph {
    eye_with(EdgeKind::Plus, EdgeKind::Plus)
}

/// Two c-vertices joined by three `+` edges.
pub fn theta_graph() -> SignedGraph {
    let edges = (0..3)
        .map(|k| Edge {
            a: end(0, k),
            b: end(1, 2 - k),
            kind: EdgeKind::Plus,
        })
        .collect();
    SignedGraph::new(vec![c_vertex(0), c_vertex(0)], edges, vec![]).expect("theta is valid")
}

/// A c-vertex with leaves `+`, `−`, whose third leg runs through an edge of
/// sign `sign` into a ρ-vertex whose dotted output differentiates the c-vertex.
pub fn rho_loop_graph(sign: EdgeKind) -> Result<SignedGraph> {
    if sign == EdgeKind::Dotted {
        return Err(Error::InvalidGraph("loop edge must be solid".into()));
    }
    SignedGraph::new(
        vec![
            c_vertex(1),
            Vertex {
                kind: VertexKind::RhoVertex,
                slots: vec![SlotKind::Solid, SlotKind::DottedOut],
            },
        ],
        vec![
            Edge {
                a: end(0, 2),
                b: end(1, 0),
                kind: sign,
            },
            Edge {
                a: end(1, 1),
                b: end(0, 3),
                kind: EdgeKind::Dotted,
            },
        ],
        vec![
            Leaf {
                at: end(0, 0),
                kind: EdgeKind::Plus,
            },
            Leaf {
                at: end(0, 1),
                kind: EdgeKind::Minus,
            },
        ],
    )
}

/// The three weighted graphs whose sum is `D′`.
pub fn ggric_diagrams() -> Vec<(Rational64, SignedGraph)> {
    vec![
        (Rational64::from_integer(1), eye_diagram()),
        (
            Rational64::new(1, 2),
            rho_loop_graph(EdgeKind::Plus).expect("valid"),
        ),
        (
            Rational64::new(-1, 2),
            rho_loop_graph(EdgeKind::Minus).expect("valid"),
        ),
    ]
}

/// Names accepted by [`preset_graph`].
pub const PRESET_GRAPHS: [&str; 5] = ["eye", "eye_unsigned", "theta", "rho_loop_plus", "rho_loop_minus"];

pub fn preset_graph(name: &str) -> Result<SignedGraph> {
    match name {
        "eye" => Ok(eye_diagram()),
        "eye_unsigned" => Ok(unsigned_eye_diagram()),
        "theta" => Ok(theta_graph()),
        "rho_loop_plus" => rho_loop_graph(EdgeKind::Plus),
        "rho_loop_minus" => rho_loop_graph(EdgeKind::Minus),
        _ => Err(Error::UnknownPreset(name.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        let d = eye_diagram();
        assert_eq!(d.vertices.len(), 2);
        assert_eq!(d.leaves.len(), 2);
        let gg = ggric_diagrams();
        let coefs: Vec<_> = gg.iter().map(|(c, _)| *c).collect();
        assert_eq!(
            coefs,
            vec![Rational64::from_integer(1), Rational64::new(1, 2), Rational64::new(-1, 2)]
        );
        assert_eq!(gg[0].1, d);
        for name in PRESET_GRAPHS {
            preset_graph(name).unwrap();
        }
    }

    #[test]
    fn tadpole_rejected() {
        let r = SignedGraph::new(
            vec![c_vertex(0)],
            vec![Edge {
                a: end(0, 0),
                b: end(0, 1),
                kind: EdgeKind::Plus,
            }],
            vec![Leaf {
                at: end(0, 2),
                kind: EdgeKind::Plus,
            }],
        );
        assert!(matches!(r, Err(Error::InvalidGraph(m)) if m.contains("tadpole")));
    }

    #[test]
    fn malformed_graphs_rejected() {
        // rho vertex without its dotted output attached
        let r = SignedGraph::new(
            vec![
                c_vertex(0),
                Vertex {
                    kind: VertexKind::RhoVertex,
                    slots: vec![SlotKind::Solid, SlotKind::DottedOut],
                },
            ],
            vec![Edge {
                a: end(0, 0),
                b: end(1, 0),
                kind: EdgeKind::Plus,
            }],
            vec![
                Leaf {
                    at: end(0, 1),
                    kind: EdgeKind::Plus,
                },
                Leaf {
                    at: end(0, 2),
                    kind: EdgeKind::Minus,
                },
            ],
        );
        assert!(r.is_err());
        // dotted edge pointing the wrong way
        let mut g = rho_loop_graph(EdgeKind::Plus).unwrap();
        let e = &mut g.edges[1];
        std::mem::swap(&mut e.a, &mut e.b);
        assert!(g.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = rho_loop_graph(EdgeKind::Minus).unwrap();
        assert_eq!(SignedGraph::from_json(&g.to_json()).unwrap(), g);
    }
}
