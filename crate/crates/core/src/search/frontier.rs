use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::heuristic::Distance;

pub type NodeId = usize;

/// The open list: LIFO for DFS, FIFO for BFS, and for A* a min-heap on
/// (f, insertion sequence). Priority updates push a fresh entry; entries whose
/// sequence no longer matches the node's current one are stale and skipped.
#[derive(Debug)]
pub enum Frontier {
    Stack(Vec<NodeId>),
    Queue(VecDeque<NodeId>),
    Priority(BinaryHeap<Reverse<(Distance, u64, NodeId)>>),
}

impl Frontier {
    pub fn pop(&mut self, current_seq: impl Fn(NodeId) -> Option<u64>) -> Option<NodeId> {
        match self {
            Frontier::Stack(stack) => stack.pop(),
            Frontier::Queue(queue) => queue.pop_front(),
            Frontier::Priority(heap) => {
                while let Some(Reverse((_, seq, id))) = heap.pop() {
                    if current_seq(id) == Some(seq) {
                        return Some(id);
                    }
                }
                None
            }
        }
    }

    /// Smallest live f value in a priority frontier.
    pub fn top_f(&mut self, current_seq: impl Fn(NodeId) -> Option<u64>) -> Option<Distance> {
        let Frontier::Priority(heap) = self else {
            return None;
        };
        while let Some(Reverse((f, seq, id))) = heap.peek().copied() {
            if current_seq(id) == Some(seq) {
                return Some(f);
            }
            heap.pop();
        }
        None
    }

    pub fn push_priority(&mut self, id: NodeId, f: Distance, seq: u64) {
        if let Frontier::Priority(heap) = self {
            heap.push(Reverse((f, seq, id)));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn priority_ties_are_fifo_and_stale_entries_skipped() {
        let mut f = Frontier::Priority(BinaryHeap::new());
        let seqs = std::cell::RefCell::new(vec![0u64, 1, 2]);
        f.push_priority(0, Distance::Finite(2), 0);
        f.push_priority(1, Distance::Finite(1), 1);
        f.push_priority(2, Distance::Finite(1), 2);
        // node 0 improved to f=1 with a later sequence number
        seqs.borrow_mut()[0] = 3;
        f.push_priority(0, Distance::Finite(1), 3);
        let cur = |id: NodeId| Some(seqs.borrow()[id]);
        assert_eq!(f.top_f(cur), Some(Distance::Finite(1)));
        assert_eq!(f.pop(cur), Some(1));
        assert_eq!(f.pop(cur), Some(2));
        assert_eq!(f.pop(cur), Some(0));
        assert_eq!(f.pop(cur), None);
        assert_eq!(f.top_f(cur), None);
    }
}
