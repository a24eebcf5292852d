//! Incremental binary search tree over keys in `(0, 1)`.
//!
//! Node `theta` owns the interval `[L, R]` of keys that would reach it. A key
//! `u` landing there splits it at relative position `(u - L) / (R - L)` and
//! contributes the toll `(R - L) * C((u - L) / (R - L))`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formulas::cost_c_unchecked;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootSide {
    IsRoot,
    Left,
    Right,
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub key: f64,
    pub interval_left: f64,
    pub interval_right: f64,
    pub depth: u32,
    pub root_side: RootSide,
    children: [Option<u32>; 2],
}

impl TreeNode {
    pub fn left_child(&self) -> Option<usize> {
        self.children[0].map(|i| i as usize)
    }

    pub fn right_child(&self) -> Option<usize> {
        self.children[1].map(|i| i as usize)
    }
}

/// An unoccupied child position.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FringeSlot {
    pub left_endpoint: f64,
    pub length: f64,
    pub depth: u32,
    pub root_side: RootSide,
}

#[derive(Clone, Debug, Default)]
pub struct SearchTree {
    nodes: Vec<TreeNode>,
    internal_path_length: u64,
    toll_sum_total: f64,
    toll_sum_left: f64,
    toll_sum_right: f64,
    left_count: u64,
    left_ipl: u64,
    right_ipl: u64,
}

impl SearchTree {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        SearchTree {
            nodes: Vec::with_capacity(n),
            ..Default::default()
        }
    }

    pub fn from_keys(keys: &[f64]) -> Result<Self> {
        let mut tree = Self::with_capacity(keys.len());
        for &u in keys {
            tree.insert_key(u)?;
        }
        Ok(tree)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root_key(&self) -> Option<f64> {
        self.nodes.first().map(|n| n.key)
    }

    /// `K_n`, the sum of node depths.
    pub fn internal_path_length(&self) -> u64 {
        self.internal_path_length
    }

    pub fn toll_sum_total(&self) -> f64 {
        self.toll_sum_total
    }

    pub fn toll_sum_left(&self) -> f64 {
        self.toll_sum_left
    }

    pub fn toll_sum_right(&self) -> f64 {
        self.toll_sum_right
    }

    /// `I_n`, keys in the root's left subtree.
    pub fn left_count(&self) -> u64 {
        self.left_count
    }

    pub fn right_count(&self) -> u64 {
        (self.nodes.len() as u64).saturating_sub(1 + self.left_count)
    }

    /// `K_{n,0}`: internal path length of the left subtree measured from its own root.
    pub fn left_ipl(&self) -> u64 {
        self.left_ipl
    }

    /// `K_{n,1}`
    pub fn right_ipl(&self) -> u64 {
        self.right_ipl
    }

    /// Inserts `u` and returns its depth.
    pub fn insert_key(&mut self, u: f64) -> Result<u32> {
        if !(u > 0.0 && u < 1.0) {
            return Err(crate::error::domain("u", u, "0 < u < 1"));
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut depth = 0u32;
        let mut side = RootSide::IsRoot;
        let mut parent: Option<(usize, usize)> = None;
        let mut cursor = if self.nodes.is_empty() { None } else { Some(0usize) };
        while let Some(i) = cursor {
            let node = &self.nodes[i];
            let dir = if u < node.key {
                hi = node.key;
                0
            } else if u > node.key {
                lo = node.key;
                1
            } else {
                return Err(Error::KeyCollision(u));
            };
            if depth == 0 {
                side = if dir == 0 { RootSide::Left } else { RootSide::Right };
            }
            parent = Some((i, dir));
            cursor = node.children[dir].map(|c| c as usize);
            depth += 1;
        }

        let idx = self.nodes.len();
        if let Some((p, dir)) = parent {
            self.nodes[p].children[dir] = Some(idx as u32);
        }
        self.nodes.push(TreeNode {
            key: u,
            interval_left: lo,
            interval_right: hi,
            depth,
            root_side: side,
            children: [None, None],
        });

        let length = hi - lo;
        let toll = length * cost_c_unchecked((u - lo) / length);
        self.toll_sum_total += toll;
        self.internal_path_length += depth as u64;
        match side {
            RootSide::IsRoot => {}
            RootSide::Left => {
                self.toll_sum_left += toll;
                self.left_count += 1;
                self.left_ipl += depth as u64 - 1;
            }
            RootSide::Right => {
                self.toll_sum_right += toll;
                self.right_ipl += depth as u64 - 1;
            }
        }
        Ok(depth)
    }

    /// The `n + 1` unoccupied slots, left to right.
    pub fn fringe(&self) -> Vec<FringeSlot> {
        let mut out = Vec::with_capacity(self.nodes.len() + 1);
        if self.nodes.is_empty() {
            out.push(FringeSlot {
                left_endpoint: 0.0,
                length: 1.0,
                depth: 0,
                root_side: RootSide::IsRoot,
            });
            return out;
        }
        // In-order walk; each missing child is emitted when its side is reached.
        let mut stack: Vec<(usize, bool)> = vec![(0, false)];
        while let Some((i, expanded)) = stack.pop() {
            let node = &self.nodes[i];
            let child_side = if node.depth == 0 { None } else { Some(node.root_side) };
            let slot = |lo: f64, hi: f64, dir: usize| FringeSlot {
                left_endpoint: lo,
                length: hi - lo,
                depth: node.depth + 1,
                root_side: child_side.unwrap_or(if dir == 0 { RootSide::Left } else { RootSide::Right }),
            };
            if !expanded {
                stack.push((i, true));
                match node.children[0] {
                    Some(c) => stack.push((c as usize, false)),
                    None => out.push(slot(node.interval_left, node.key, 0)),
                }
            } else {
                match node.children[1] {
                    Some(c) => stack.push((c as usize, false)),
                    None => out.push(slot(node.key, node.interval_right, 1)),
                }
            }
        }
        out
    }

    /// Sum of fringe depths, computed by walking the fringe.
    pub fn external_path_length(&self) -> u64 {
        self.fringe().iter().map(|s| s.depth as u64).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::cost_c;
    use crate::oracle::quicksort_comparisons;
    use proptest::prelude::*;

    #[test]
    fn hand_trace() {
        let mut t = SearchTree::new();
        let mut ks = vec![];
        for (u, d) in [(0.5, 0), (0.25, 1), (0.75, 1)] {
            assert_eq!(t.insert_key(u).unwrap(), d);
            ks.push(t.internal_path_length());
        }
        assert_eq!(ks, vec![0, 1, 2]);
        let left = &t.nodes()[t.nodes()[0].left_child().unwrap()];
        assert_eq!((left.interval_left, left.interval_right), (0.0, 0.5));
        assert_eq!(left.root_side, RootSide::Left);
        assert_eq!(t.left_count(), 1);
        assert_eq!(t.right_count(), 1);
    }

    #[test]
    fn first_toll_is_root_cost() {
        let mut t = SearchTree::new();
        t.insert_key(0.3).unwrap();
        assert_eq!(t.toll_sum_total(), cost_c(0.3).unwrap());
        assert_eq!(t.toll_sum_left(), 0.0);
    }

    #[test]
    fn collision_and_domain() {
        let mut t = SearchTree::new();
        t.insert_key(0.4).unwrap();
        assert!(matches!(t.insert_key(0.4), Err(Error::KeyCollision(_))));
        assert!(t.insert_key(0.0).is_err());
        assert!(t.insert_key(1.0).is_err());
    }

    #[test]
    fn fringe_examples() {
        let f = SearchTree::new().fringe();
        assert_eq!(f.len(), 1);
        assert_eq!((f[0].length, f[0].depth), (1.0, 0));

        let t = SearchTree::from_keys(&[0.5, 0.25, 0.75]).unwrap();
        let f = t.fringe();
        assert_eq!(f.len(), 4);
        assert!(f.iter().all(|s| s.length == 0.25 && s.depth == 2));
        assert_eq!(t.external_path_length(), 8);
        assert_eq!(t.external_path_length(), t.internal_path_length() + 6);
        let sides: Vec<_> = f.iter().map(|s| s.root_side).collect();
        assert_eq!(sides, [RootSide::Left, RootSide::Left, RootSide::Right, RootSide::Right]);
    }

    #[test]
    fn single_node_fringe_sides() {
        let t = SearchTree::from_keys(&[0.3]).unwrap();
        let f = t.fringe();
        assert_eq!(f[0].root_side, RootSide::Left);
        assert_eq!(f[1].root_side, RootSide::Right);
        assert_eq!(f[0].length, 0.3);
    }

    proptest! {
        #[test]
        fn tree_invariants(keys in proptest::collection::hash_set(1u32..u32::MAX, 0..200)) {
            let keys: Vec<f64> = keys.into_iter().map(|k| k as f64 / u32::MAX as f64).collect();
            let t = SearchTree::from_keys(&keys).unwrap();
            let n = keys.len() as u64;
            let depth_sum: u64 = t.nodes().iter().map(|x| x.depth as u64).sum();
            prop_assert_eq!(depth_sum, t.internal_path_length());
            prop_assert_eq!(t.internal_path_length(), quicksort_comparisons(&keys).unwrap());

            let f = t.fringe();
            prop_assert_eq!(f.len() as u64, n + 1);
            prop_assert_eq!(t.external_path_length(), t.internal_path_length() + 2 * n);
            let total: f64 = f.iter().map(|s| s.length).sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
            prop_assert_eq!(f[0].left_endpoint, 0.0);
            for w in f.windows(2) {
                prop_assert!(w[0].length > 0.0);
                prop_assert!((w[0].left_endpoint + w[0].length - w[1].left_endpoint).abs() <= 1e-15);
            }
            for node in t.nodes() {
                prop_assert!(node.interval_left <= node.key && node.key <= node.interval_right);
                if let Some(c) = node.left_child() {
                    let c = &t.nodes()[c];
                    prop_assert_eq!((c.interval_left, c.interval_right), (node.interval_left, node.key));
                    prop_assert_eq!(c.depth, node.depth + 1);
                }
            }
            if n >= 1 {
                prop_assert_eq!(t.left_count() + t.right_count(), n - 1);
                prop_assert_eq!(t.internal_path_length(), t.left_ipl() + t.right_ipl() + n - 1);
            }
        }
    }
}
