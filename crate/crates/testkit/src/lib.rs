//! Test-only helpers for `qsig`.
//!
//! Nothing here is meant for production. The unmasked builder in particular
//! exists only to show why leaf and node labels must be domain-separated.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use qsig::hash::TreeHash;
use qsig::merkle::{NodeId, NodeKind, TreeShape, ROOT};
use qsig::{Digest, IndexSet, MerkleTree, Token, TokenSequence};

pub use qsig::hash::CountingHash as CountingHashBackend;

/// The eight-word sentence used throughout the examples.
pub const SAMPLE: &str = "The quick brown fox jumps over the dog";

pub fn sample_sentence() -> TokenSequence {
    qsig::tokenizer::tokenize(SAMPLE).expect("non-empty")
}

/// Same tree shape as `qsig::merkle::build_tree`, but leaves are `H(token)`
/// and internal nodes `H(left ‖ right)`, with no prefix bytes.
pub fn unmasked_build_tree(s: &TokenSequence, hash: &dyn TreeHash) -> MerkleTree {
    let shape = TreeShape::new(s.len()).expect("token sequences are non-empty");
    let mut labels: Vec<Option<Digest>> = vec![None; shape.node_count()];
    for id in (0..shape.node_count()).rev() {
        let label = match shape.node(id).kind {
            NodeKind::Leaf { token } => hash.hash_parts(&[s.tokens()[token].as_bytes()]),
            NodeKind::Internal { left, right } => {
                let l = labels[left]
                    .as_ref()
                    .expect("children come later in the arena");
                let r = labels[right]
                    .as_ref()
                    .expect("children come later in the arena");
                hash.hash_parts(&[l.as_bytes(), r.as_bytes()])
            }
        };
        labels[id] = Some(label);
    }
    MerkleTree::from_parts(shape, labels).expect("one label per node")
}

/// The classic second-preimage message for [`SAMPLE`]: the last two tokens
/// are replaced by one token holding the concatenation of their unmasked
/// leaf hashes.
pub fn attack_message(hash: &dyn TreeHash) -> TokenSequence {
    let original = sample_sentence();
    let n = original.len();
    let mut tokens: Vec<Token> = original.tokens()[..n - 2].to_vec();
    let a = hash.hash_parts(&[original.tokens()[n - 2].as_bytes()]);
    let b = hash.hash_parts(&[original.tokens()[n - 1].as_bytes()]);
    let mut glued = a.as_bytes().to_vec();
    glued.extend_from_slice(b.as_bytes());
    tokens.push(Token::new(glued).expect("digest bytes are non-empty"));
    TokenSequence::new(tokens).expect("non-empty")
}

/// Required nodes computed from first principles: a non-root node whose
/// subtree holds no quoted token while its sibling's subtree holds one.
/// Returned in inorder.
pub fn reference_required(shape: &TreeShape, indices: &IndexSet) -> Vec<NodeId> {
    let covers = |id: NodeId| {
        let span = &shape.node(id).span;
        indices.iter().any(|i| span.contains(&i))
    };
    shape
        .inorder()
        .into_iter()
        .filter(|&id| id != ROOT)
        .filter(|&id| !covers(id) && covers(shape.sibling(id).expect("non-root")))
        .collect()
}

/// Hash-leaf depths of the level-order heap with `2n - 1` nodes, where node
/// `k` has children `2k + 1` and `2k + 2`. Leaves are listed left to right.
pub fn heap_leaf_depths(n: usize) -> Vec<u32> {
    assert!(n >= 1);
    let total = 2 * n - 1;
    let mut out = Vec::with_capacity(n);
    // Iterative inorder walk over the implicit heap.
    let mut stack = Vec::new();
    let mut k = Some(0usize);
    while k.is_some() || !stack.is_empty() {
        while let Some(node) = k {
            stack.push(node);
            k = (2 * node + 1 < total).then_some(2 * node + 1);
        }
        let node = stack.pop().unwrap();
        if 2 * node + 1 >= total {
            out.push(usize::BITS - 1 - (node + 1).leading_zeros());
        }
        k = (2 * node + 2 < total).then_some(2 * node + 2);
    }
    out
}

/// `n` short random tokens, deterministic in `seed`. Tokens never contain
/// whitespace, so they survive a round trip through the text tokenizer.
pub fn random_message(seed: u64, n: usize) -> TokenSequence {
    assert!(n >= 1);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let tokens = (0..n)
        .map(|_| {
            let len = rng.gen_range(1..=8);
            let word: String = (0..len)
                .map(|_| rng.gen_range(b'a'..=b'z') as char)
                .collect();
            Token::new(word).unwrap()
        })
        .collect();
    TokenSequence::new(tokens).unwrap()
}

/// A `t`-element index set over `0..n`, deterministic in `seed`.
pub fn random_index_set(seed: u64, n: usize, t: usize, contiguous: bool) -> IndexSet {
    assert!(1 <= t && t <= n, "need 1 <= t <= n");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    if contiguous {
        let start = rng.gen_range(0..=n - t);
        return IndexSet::from_range(start..start + t).unwrap();
    }
    let picked: BTreeSet<usize> = sample(&mut rng, n, t).into_iter().collect();
    IndexSet::from_indices(picked).unwrap()
}

/// Every non-empty subset of `0..n` as a bitmask, for exhaustive sweeps.
pub fn all_subsets(n: usize) -> impl Iterator<Item = IndexSet> {
    assert!(n < usize::BITS as usize);
    (1usize..1 << n)
        .map(move |mask| IndexSet::from_indices((0..n).filter(|i| mask >> i & 1 == 1)).unwrap())
}
