//! Exhaustive automorphism counting.
//!
//! An automorphism is a permutation of half-edges induced by a kind-preserving
//! bijection of vertices together with, at every vertex, a bijection of slots
//! of equal slot kind, such that edges go to edges of the same kind (dotted
//! edges keep their direction) and leaves go to leaves of the same kind.
//! Cyclic orders are not required to be preserved.

use std::collections::HashMap;

use super::graph::{EdgeKind, End, SignedGraph, SlotKind};
use crate::error::{Error, Result};

/// Largest graph (in half-edges) accepted by [`automorphism_count`].
pub const MAX_HALF_EDGES: usize = 12;

pub fn automorphism_count(graph: &SignedGraph, fix_leaves: bool) -> Result<u64> {
    graph.validate()?;
    let half_edges = graph.half_edge_count();
    if half_edges > MAX_HALF_EDGES {
        return Err(Error::GraphTooLarge {
            half_edges,
            limit: MAX_HALF_EDGES,
        });
    }
    // what sits on the other side of each half-edge
    let mut partner: HashMap<End, Attachment> = HashMap::new();
    for e in &graph.edges {
        partner.insert(e.a, Attachment::Edge(e.b, e.kind, true));
        partner.insert(e.b, Attachment::Edge(e.a, e.kind, false));
    }
    for (i, l) in graph.leaves.iter().enumerate() {
        partner.insert(l.at, Attachment::Leaf(i, l.kind));
    }
    let search = Search {
        graph,
        partner,
        fix_leaves,
    };
    let mut vmap = vec![usize::MAX; graph.vertices.len()];
    let mut taken = vec![false; graph.vertices.len()];
    let mut slot_maps = vec![Vec::new(); graph.vertices.len()];
    Ok(search.vertices(0, &mut vmap, &mut taken, &mut slot_maps))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Attachment {
    /// Other end, kind, whether this end is the edge's `a` end.
    Edge(End, EdgeKind, bool),
    Leaf(usize, EdgeKind),
}

struct Search<'a> {
    graph: &'a SignedGraph,
    partner: HashMap<End, Attachment>,
    fix_leaves: bool,
}

impl Search<'_> {
    fn vertices(
        &self,
        v: usize,
        vmap: &mut Vec<usize>,
        taken: &mut Vec<bool>,
        slot_maps: &mut Vec<Vec<usize>>,
    ) -> u64 {
        let vs = &self.graph.vertices;
        if v == vs.len() {
            return self.slots(0, vmap, slot_maps);
        }
        let mut total = 0;
        for w in 0..vs.len() {
            if taken[w] || vs[w].kind != vs[v].kind || !same_profile(&vs[v].slots, &vs[w].slots) {
                continue;
            }
            taken[w] = true;
            vmap[v] = w;
            total += self.vertices(v + 1, vmap, taken, slot_maps);
            taken[w] = false;
        }
        total
    }

    fn slots(&self, v: usize, vmap: &[usize], slot_maps: &mut Vec<Vec<usize>>) -> u64 {
        let vs = &self.graph.vertices;
        if v == vs.len() {
            return u64::from(self.is_automorphism(vmap, slot_maps));
        }
        let src = &vs[v].slots;
        let dst = &vs[vmap[v]].slots;
        let mut total = 0;
        for perm in permutations(src.len()) {
            if perm.iter().enumerate().all(|(i, &j)| src[i] == dst[j]) {
                slot_maps[v] = perm;
                total += self.slots(v + 1, vmap, slot_maps);
            }
        }
        total
    }

    fn is_automorphism(&self, vmap: &[usize], slot_maps: &[Vec<usize>]) -> bool {
        let image = |e: End| End {
            vertex: vmap[e.vertex],
            slot: slot_maps[e.vertex][e.slot],
        };
        for (&h, &att) in &self.partner {
            let target = self.partner[&image(h)];
            let ok = match (att, target) {
                (Attachment::Edge(o, k, is_a), Attachment::Edge(o2, k2, is_a2)) => {
                    k == k2 && image(o) == o2 && (k != EdgeKind::Dotted || is_a == is_a2)
                }
                (Attachment::Leaf(i, k), Attachment::Leaf(j, k2)) => {
                    k == k2 && (!self.fix_leaves || i == j)
                }
                _ => false,
            };
            if !ok {
                return false;
            }
        }
        true
    }
}

fn same_profile(a: &[SlotKind], b: &[SlotKind]) -> bool {
    let count = |s: &[SlotKind], k| s.iter().filter(|&&x| x == k).count();
    a.len() == b.len()
        && [SlotKind::Solid, SlotKind::DottedIn, SlotKind::DottedOut]
            .iter()
            .all(|&k| count(a, k) == count(b, k))
}

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}
