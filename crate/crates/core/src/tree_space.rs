//! Truncated countably-branching tree `T_{b,d}`.
//!
//! A node is a strictly increasing list of positive integers; the root is the
//! empty list and the children of `J` are `J ∪ {max J + k}` for `k = 1..=b`.
//! The metric is the shortest-path metric of the tree, which only depends on
//! the longest common prefix of two nodes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vertex of the tree: a finite strictly increasing set of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TreeNode(Vec<u32>);

impl TreeNode {
    pub fn root() -> Self {
        TreeNode(Vec::new())
    }

    /// Builds a node from its elements, rejecting zero and non-increasing input.
    pub fn new(elements: Vec<u32>) -> Result<Self> {
        if elements.first() == Some(&0) {
            return Err(Error::Domain("tree elements must be positive".into()));
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(format!(
                "tree elements must be strictly increasing: {elements:?}"
            )));
        }
        Ok(TreeNode(elements))
    }

    pub fn elements(&self) -> &[u32] {
        &self.0
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_element(&self) -> u32 {
        self.0.last().copied().unwrap_or(0)
    }

    /// Drops the largest element; `None` for the root.
    pub fn parent(&self) -> Option<TreeNode> {
        if self.0.is_empty() {
            None
        } else {
            Some(TreeNode(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// The child `J ∪ {max J + offset}`.
    pub fn child(&self, offset: u32) -> TreeNode {
        debug_assert!(offset >= 1);
        let mut elements = self.0.clone();
        elements.push(self.max_element() + offset);
        TreeNode(elements)
    }

    /// Successive differences `m_i − m_{i−1}` (with `m_0 = 0`).
    ///
    /// The `i`-th offset is the fraternal index of the `i`-th step from the root.
    pub fn offsets(&self) -> impl Iterator<Item = u32> + '_ {
        let mut prev = 0;
        self.0.iter().map(move |&m| {
            let off = m - prev;
            prev = m;
            off
        })
    }

    /// Fraternal index of this node among its siblings, `None` for the root.
    pub fn fraternal_index(&self) -> Option<u32> {
        self.offsets().last()
    }

    pub fn is_prefix_of(&self, other: &TreeNode) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Longest common prefix, the closest common ancestor.
    pub fn lcp(&self, other: &TreeNode) -> TreeNode {
        let len = lcp_len(&self.0, &other.0);
        TreeNode(self.0[..len].to_vec())
    }

    /// Shortest-path distance `|J| + |K| − 2·|lcp(J, K)|`.
    pub fn distance(&self, other: &TreeNode) -> usize {
        let common = lcp_len(&self.0, &other.0);
        self.0.len() + other.0.len() - 2 * common
    }

    /// Elements after the prefix `prefix`; `None` if `prefix` is not a prefix.
    pub fn tail_after(&self, prefix: &TreeNode) -> Option<&[u32]> {
        if prefix.is_prefix_of(self) {
            Some(&self.0[prefix.0.len()..])
        } else {
            None
        }
    }
}

fn lcp_len(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

impl fmt::Display for TreeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

impl std::str::FromStr for TreeNode {
    type Err = Error;

    /// Accepts `{1,2,5}`, `1,2,5`, `[1, 2, 5]` or an empty set.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .trim_start_matches(['{', '['])
            .trim_end_matches(['}', ']'])
            .trim();
        if inner.is_empty() || inner == "∅" {
            return Ok(TreeNode::root());
        }
        let elements = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(format!("bad tree element {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        TreeNode::new(elements)
    }
}

/// The truncation `T_{b,d}`: every node of level `< d` has exactly `b`
/// children with offsets `1..=b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSpace {
    branching: u32,
    depth: usize,
    nodes: Vec<TreeNode>,
}

impl TreeSpace {
    /// Enumerates `T_{b,d}`, refusing instances with more than `max_nodes` vertices.
    pub fn new(branching: u32, depth: usize, max_nodes: usize) -> Result<Self> {
        if branching == 0 {
            return Err(Error::Domain("tree branching must be positive".into()));
        }
        let count = Self::node_count(branching, depth)
            .filter(|&c| c <= max_nodes)
            .ok_or_else(|| {
                Error::Capacity(format!(
                    "T_{{{branching},{depth}}} has more than {max_nodes} nodes"
                ))
            })?;
        let mut nodes = Vec::with_capacity(count);
        let mut stack = vec![TreeNode::root()];
        // Depth-first with children pushed in reverse yields lexicographic order.
        while let Some(node) = stack.pop() {
            if node.level() < depth {
                for k in (1..=branching).rev() {
                    stack.push(node.child(k));
                }
            }
            nodes.push(node);
        }
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        Ok(TreeSpace { branching, depth, nodes })
    }

    /// `Σ_{k=0..d} b^k`, or `None` on overflow.
    pub fn node_count(branching: u32, depth: usize) -> Option<usize> {
        let b = branching as usize;
        let mut total: usize = 0;
        let mut layer: usize = 1;
        for _ in 0..=depth {
            total = total.checked_add(layer)?;
            layer = layer.checked_mul(b)?;
        }
        Some(total)
    }

    pub fn branching(&self) -> u32 {
        self.branching
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// All nodes in lexicographic order of their element lists.
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Position of `node` in [`nodes`](Self::nodes).
    pub fn index_of(&self, node: &TreeNode) -> Option<usize> {
        self.nodes.binary_search(node).ok()
    }

    pub fn contains(&self, node: &TreeNode) -> bool {
        Self::in_truncation(self.branching, self.depth, node)
    }

    /// Membership test without enumerating the tree.
    pub fn in_truncation(branching: u32, depth: usize, node: &TreeNode) -> bool {
        node.level() <= depth && node.offsets().all(|o| (1..=branching).contains(&o))
    }

    /// Children in fraternal order; empty at the maximal level.
    pub fn children(&self, node: &TreeNode) -> Vec<TreeNode> {
        if node.level() >= self.depth {
            return Vec::new();
        }
        (1..=self.branching).map(|k| node.child(k)).collect()
    }
}
