//! Heap-shaped Merkle trees over token sequences.
//!
//! Every token hangs below its own *hash leaf*, labelled `H(0x00 ‖ token)`.
//! Internal nodes are labelled `H(0x01 ‖ left ‖ right)`. The shape depends on
//! the token count alone: all levels are full except possibly the deepest,
//! which is filled from the left. A one-token tree is just its hash leaf.
//!
//! Nodes are addressed by [`NodeId`], an index into the tree's arena. Node
//! `0` is the root and children always come after their parent. Each node
//! also carries its `(level, position)` coordinates, where level 0 is the
//! root and the children of `(j, i)` are `(j + 1, 2i)` and `(j + 1, 2i + 1)`.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::hash::{Digest, TreeHash};
use crate::tokenizer::{Token, TokenSequence};

pub const LEAF_PREFIX: u8 = 0x00;
pub const NODE_PREFIX: u8 = 0x01;

pub type NodeId = usize;

pub const ROOT: NodeId = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// A hash leaf; its only child is the token at this index.
    Leaf {
        token: usize,
    },
    Internal {
        left: NodeId,
        right: NodeId,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub kind: NodeKind,
    /// Token indices covered by this subtree.
    pub span: Range<usize>,
    pub level: u32,
    pub position: u64,
    pub parent: Option<NodeId>,
}

/// How `l >= 2` tokens are divided between the left and right subtree.
pub fn split_point(l: usize) -> (usize, usize) {
    assert!(l >= 2, "split_point needs at least two tokens");
    let floor = 1usize << (usize::BITS - 1 - l.leading_zeros());
    if floor == l {
        return (l / 2, l / 2);
    }
    let ceil = floor << 1;
    if ceil - l < l - floor {
        // Left subtree is full.
        (floor, l - floor)
    } else {
        // Right subtree is complete. Ties land here; both rules agree on them.
        (l - floor / 2, floor / 2)
    }
}

// A node still to be placed: span, (parent, is right child), level, position.
type Pending = (Range<usize>, Option<(NodeId, bool)>, u32, u64);

/// The shape of a heap-shaped tree with `n` hash leaves, without labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeShape {
    nodes: Vec<TreeNode>,
    leaves: Vec<NodeId>,
}

impl TreeShape {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoTokens);
        }
        let mut shape = TreeShape {
            nodes: Vec::with_capacity(2 * n - 1),
            leaves: vec![0; n],
        };
        let mut stack: Vec<Pending> = vec![(0..n, None, 0, 0)];
        while let Some((span, parent, level, position)) = stack.pop() {
            let id = shape.nodes.len();
            let len = span.end - span.start;
            let kind = if len == 1 {
                shape.leaves[span.start] = id;
                NodeKind::Leaf { token: span.start }
            } else {
                // Patched below once the children exist.
                NodeKind::Internal { left: 0, right: 0 }
            };
            shape.nodes.push(TreeNode {
                kind,
                span: span.clone(),
                level,
                position,
                parent: parent.map(|(p, _)| p),
            });
            if let Some((p, is_left)) = parent {
                if let NodeKind::Internal { left, right } = &mut shape.nodes[p].kind {
                    if is_left {
                        *left = id;
                    } else {
                        *right = id;
                    }
                }
            }
            if len > 1 {
                let (l, _) = split_point(len);
                let mid = span.start + l;
                // Right first so the left child is popped (and numbered) first.
                stack.push((
                    mid..span.end,
                    Some((id, false)),
                    level + 1,
                    2 * position + 1,
                ));
                stack.push((span.start..mid, Some((id, true)), level + 1, 2 * position));
            }
        }
        Ok(shape)
    }

    /// Number of tokens (hash leaves).
    pub fn n(&self) -> usize {
        self.leaves.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    /// The hash leaf of token `token`.
    pub fn leaf(&self, token: usize) -> NodeId {
        self.leaves[token]
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id].parent
    }

    pub fn children(&self, id: NodeId) -> Option<(NodeId, NodeId)> {
        match self.nodes[id].kind {
            NodeKind::Internal { left, right } => Some((left, right)),
            NodeKind::Leaf { .. } => None,
        }
    }

    pub fn sibling(&self, id: NodeId) -> Option<NodeId> {
        let p = self.parent(id)?;
        let (l, r) = self.children(p)?;
        Some(if l == id { r } else { l })
    }

    /// Find a node by `(level, position)` coordinates.
    pub fn find(&self, level: u32, position: u64) -> Option<NodeId> {
        self.nodes
            .iter()
            .position(|n| n.level == level && n.position == position)
    }

    /// Depth of every hash leaf, in token order.
    pub fn leaf_depths(&self) -> Vec<u32> {
        self.leaves.iter().map(|&id| self.nodes[id].level).collect()
    }

    /// Node ids in inorder (left subtree, node, right subtree).
    pub fn inorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = Vec::new();
        let mut cur = Some(ROOT);
        loop {
            while let Some(id) = cur {
                stack.push(id);
                cur = self.children(id).map(|(l, _)| l);
            }
            let Some(id) = stack.pop() else { break };
            out.push(id);
            cur = self.children(id).map(|(_, r)| r);
        }
        out
    }
}

pub fn leaf_hash(hash: &dyn TreeHash, token: &Token) -> Digest {
    hash.hash_parts(&[&[LEAF_PREFIX], token.as_bytes()])
}

pub fn node_hash(hash: &dyn TreeHash, left: &Digest, right: &Digest) -> Digest {
    hash.hash_parts(&[&[NODE_PREFIX], left.as_bytes(), right.as_bytes()])
}

/// A tree shape together with (possibly partial) node labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MerkleTree {
    shape: TreeShape,
    labels: Vec<Option<Digest>>,
}

impl MerkleTree {
    /// Pair a shape with labels, one slot per node.
    pub fn from_parts(shape: TreeShape, labels: Vec<Option<Digest>>) -> Result<Self> {
        if labels.len() != shape.node_count() {
            return Err(Error::Domain(format!(
                "expected {} labels, got {}",
                shape.node_count(),
                labels.len()
            )));
        }
        Ok(MerkleTree { shape, labels })
    }

    pub fn shape(&self) -> &TreeShape {
        &self.shape
    }

    pub fn n(&self) -> usize {
        self.shape.n()
    }

    pub fn label(&self, id: NodeId) -> Option<&Digest> {
        self.labels[id].as_ref()
    }

    pub fn set_label(&mut self, id: NodeId, digest: Digest) {
        self.labels[id] = Some(digest);
    }

    pub fn is_fully_labeled(&self) -> bool {
        self.labels.iter().all(Option::is_some)
    }

    pub fn root_digest(&self) -> Result<&Digest> {
        self.label(ROOT).ok_or(Error::Unlabeled(ROOT))
    }
}

/// Build the labelled tree for `tokens`. Performs exactly `2n - 1` hash
/// evaluations.
pub fn build_tree(tokens: &TokenSequence, hash: &dyn TreeHash) -> MerkleTree {
    let shape = TreeShape::new(tokens.len()).expect("token sequences are non-empty");
    let mut labels: Vec<Option<Digest>> = vec![None; shape.node_count()];
    // Children follow their parent in the arena, so a reverse sweep sees
    // both children before the parent.
    for id in (0..shape.node_count()).rev() {
        let label = match shape.nodes[id].kind {
            NodeKind::Leaf { token } => leaf_hash(hash, &tokens.tokens()[token]),
            NodeKind::Internal { left, right } => node_hash(
                hash,
                labels[left].as_ref().expect("child labelled"),
                labels[right].as_ref().expect("child labelled"),
            ),
        };
        labels[id] = Some(label);
    }
    MerkleTree { shape, labels }
}

/// An unlabelled tree with the shape used for `n` tokens.
pub fn build_skeleton(n: usize) -> Result<MerkleTree> {
    let shape = TreeShape::new(n)?;
    let labels = vec![None; shape.node_count()];
    Ok(MerkleTree { shape, labels })
}
