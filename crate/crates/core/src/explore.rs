//! Breadth-first exploration of the reachable part of a process.
//!
//! Everything that walks a diagram (DOT export, transition listings,
//! diagram comparison in tests) goes through [`reachable`], so node and
//! edge accounting agree everywhere.

use std::collections::{HashMap, VecDeque};

use crate::lts::{Depth, LtsError, Proc};
use crate::rel::{Cardinality, Value};

/// The explored part of a diagram. States are listed in discovery order
/// and edges refer to states by their position in `states`.
#[derive(Debug, Clone)]
pub struct Diagram<S, L> {
    pub states: Vec<S>,
    /// Distance of each state from the root, in transitions.
    pub depths: Vec<usize>,
    pub edges: Vec<(usize, L, usize)>,
}

impl<S, L> Diagram<S, L> {
    pub fn node_count(&self) -> usize {
        self.states.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// Explores breadth-first from `p` up to `max_depth` transitions. States at
/// the depth limit are reported but not expanded.
///
/// `Depth::Unbounded` is refused unless the transition relation is tagged
/// finite, since on merely finite-branching systems it may never return.
pub fn reachable<S: Value, L: Value>(
    p: &Proc<S, L>,
    max_depth: Depth,
) -> Result<Diagram<S, L>, LtsError> {
    let limit = match max_depth {
        Depth::Finite(n) => Some(n),
        Depth::Unbounded => {
            if p.lts().cardinality() != Cardinality::Finite {
                return Err(LtsError::UnboundedRefused);
            }
            None
        }
    };
    Ok(breadth_first(p, limit))
}

fn breadth_first<S: Value, L: Value>(p: &Proc<S, L>, limit: Option<usize>) -> Diagram<S, L> {
    let mut ids: HashMap<S, usize> = HashMap::new();
    let mut states: Vec<S> = Vec::new();
    let mut depths: Vec<usize> = Vec::new();
    let mut edges: Vec<(usize, L, usize)> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();

    ids.insert(p.state().clone(), 0);
    states.push(p.state().clone());
    depths.push(0);
    queue.push_back(0);

    while let Some(id) = queue.pop_front() {
        let depth = depths[id];
        if let Some(n) = limit {
            if depth >= n {
                continue;
            }
        }
        let src = states[id].clone();
        for (label, dst) in p.lts().trans().image(&src) {
            let dst_id = match ids.get(&dst) {
                Some(&existing) => existing,
                None => {
                    let new_id = states.len();
                    ids.insert(dst.clone(), new_id);
                    states.push(dst);
                    depths.push(depth + 1);
                    queue.push_back(new_id);
                    new_id
                }
            };
            edges.push((id, label, dst_id));
        }
    }

    Diagram {
        states,
        depths,
        edges,
    }
}

/// Name-independent form of a diagram: edges over discovery-order ids with
/// printed labels, sorted. Two explorations produce equal canonical forms
/// exactly when breadth-first discovery labels them isomorphically.
pub fn canonical_edges<S: Value, L: Value>(
    diagram: &Diagram<S, L>,
    label_text: impl Fn(&L) -> String,
) -> Vec<(usize, String, usize)> {
    let mut out: Vec<(usize, String, usize)> = diagram
        .edges
        .iter()
        .map(|(s, l, t)| (*s, label_text(l), *t))
        .collect();
    out.sort();
    out
}
