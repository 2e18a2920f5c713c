use std::collections::{BTreeMap, HashSet};

use super::ProductNode;
use crate::nfa::{Label, Nfa};
use crate::oracle;
use crate::term::Term;

/// Product edges revealed by closing nodes, in discovery order.
#[derive(Debug, Clone, Default)]
pub struct DiscoveredGraph {
    edges: Vec<(ProductNode, Label, ProductNode)>,
    index: HashSet<(ProductNode, Label, ProductNode)>,
}

impl DiscoveredGraph {
    pub(crate) fn insert(&mut self, from: ProductNode, label: Label, to: ProductNode) {
        let edge = (from, label, to);
        if self.index.insert(edge.clone()) {
            self.edges.push(edge);
        }
    }

    pub fn edges(&self) -> &[(ProductNode, Label, ProductNode)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, from: &ProductNode, label: &Label, to: &ProductNode) -> bool {
        self.index.contains(&(from.clone(), label.clone(), to.clone()))
    }

    /// Shortest cost to each answer term within this graph.
    pub fn goal_costs(&self, nfa: &Nfa, start: &Term) -> BTreeMap<Term, u32> {
        let edges = self
            .edges
            .iter()
            .map(|(s, _, t)| ((s.term.clone(), s.state), (t.term.clone(), t.state)));
        oracle::product_goal_costs(edges, start, nfa)
    }

    pub fn k_shortest_goal_costs(&self, nfa: &Nfa, start: &Term) -> Vec<u32> {
        oracle::sorted_costs(&self.goal_costs(nfa, start))
    }
}
