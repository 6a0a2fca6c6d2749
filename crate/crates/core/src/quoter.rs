//! Signing, quoting and sub-quoting.
//!
//! A quote signature carries the root signature, the original token count,
//! the quoted indices and the labels of the *required* nodes: the roots of the
//! maximal subtrees that contain no quoted token but whose sibling does. The
//! required nodes are found with a flag walk. Every hash node starts as
//! [`Flag::Delete`]; each quoted token (in increasing index order) walks from
//! its hash leaf towards the root:
//!
//! * a `Delete` node marks its sibling `Required` and the walk continues
//!   upward, stopping after a child of the root;
//! * a `Required` node was already covered by an earlier walk, so it and its
//!   sibling become `Implicit` and the walk stops.
//!
//! The labels of the `Required` nodes, read in inorder, form the path.
//!
//! The root signature covers the root digest together with `n` and the
//! hash and tokenizer ids (see [`root_statement`]).
//!
//! A full-message signature is a [`QuoteSignature`] whose indices cover the
//! whole message and whose path is empty, so signatures and quote signatures
//! are interchangeable.

use crate::error::{Error, Result};
use crate::hash::{default_hash, hash_by_id, Digest, TreeHash};
use crate::index_set::IndexSet;
use crate::merkle::{build_tree, MerkleTree, NodeId, TreeShape, ROOT};
use crate::sigscheme::{sign_bytes, RootSignature, SecretKey};
use crate::tokenizer::{TokenSequence, WHITESPACE_V1};
use crate::verifier::reconstruct_tree;
use crate::ENVELOPE_VERSION;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuoteSignature {
    pub version: u32,
    pub hash_id: String,
    pub tokenizer_id: String,
    /// Token count of the original message.
    pub n: usize,
    pub indices: IndexSet,
    /// Labels of the required nodes, in inorder.
    pub path: Vec<Digest>,
    pub root_sig: RootSignature,
}

impl QuoteSignature {
    pub fn scheme_id(&self) -> &str {
        &self.root_sig.scheme_id
    }

    /// True if this signature covers the whole original message.
    pub fn is_full(&self) -> bool {
        self.indices.is_contiguous() && self.indices.ranges()[0] == (0..self.n)
    }

    /// The signed statement for this signature, given the root it implies.
    pub fn statement(&self, root: &Digest) -> Vec<u8> {
        root_statement(
            self.version,
            &self.hash_id,
            &self.tokenizer_id,
            self.n,
            root,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flag {
    Delete,
    Required,
    Implicit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagAssignment {
    flags: Vec<Flag>,
    implicit_hits: usize,
}

impl FlagAssignment {
    pub fn flag(&self, id: NodeId) -> Flag {
        self.flags[id]
    }

    pub fn flags(&self) -> &[Flag] {
        &self.flags
    }

    pub fn required_count(&self) -> usize {
        self.flags.iter().filter(|&&f| f == Flag::Required).count()
    }

    /// Required nodes in inorder.
    pub fn required_inorder(&self, shape: &TreeShape) -> Vec<NodeId> {
        shape
            .inorder()
            .into_iter()
            .filter(|&id| self.flags[id] == Flag::Required)
            .collect()
    }

    /// How many walks stopped on an already-`Implicit` node. Always zero when
    /// tokens are processed in increasing order; counted so tests can check.
    pub fn implicit_hits(&self) -> usize {
        self.implicit_hits
    }
}

/// Run the flag walk for `indices` over `shape`.
pub fn mark_flags(shape: &TreeShape, indices: &IndexSet) -> Result<FlagAssignment> {
    let n = shape.n();
    if indices.end() > n {
        return Err(Error::IndexOutOfRange {
            index: indices.end() - 1,
            len: n,
        });
    }
    let mut flags = vec![Flag::Delete; shape.node_count()];
    let mut implicit_hits = 0;
    for token in indices.iter() {
        let mut node = shape.leaf(token);
        while node != ROOT {
            let sibling = shape.sibling(node).expect("non-root nodes have a sibling");
            match flags[node] {
                Flag::Delete => {
                    flags[sibling] = Flag::Required;
                    node = shape.parent(node).expect("non-root nodes have a parent");
                }
                Flag::Required => {
                    flags[node] = Flag::Implicit;
                    flags[sibling] = Flag::Implicit;
                    break;
                }
                Flag::Implicit => {
                    // Already covered; treat like the end of the walk.
                    implicit_hits += 1;
                    break;
                }
            }
        }
    }
    Ok(FlagAssignment {
        flags,
        implicit_hits,
    })
}

/// Labels of the required nodes, in inorder.
pub fn collect_required(tree: &MerkleTree, flags: &FlagAssignment) -> Result<Vec<Digest>> {
    flags
        .required_inorder(tree.shape())
        .into_iter()
        .map(|id| tree.label(id).cloned().ok_or(Error::Unlabeled(id)))
        .collect()
}

/// Sign a full message with the default hash and tokenizer ids.
pub fn sign(message: &TokenSequence, secret: &SecretKey) -> Result<QuoteSignature> {
    sign_with(default_hash(), message, secret, WHITESPACE_V1)
}

pub fn sign_with(
    hash: &dyn TreeHash,
    message: &TokenSequence,
    secret: &SecretKey,
    tokenizer_id: &str,
) -> Result<QuoteSignature> {
    let tree = build_tree(message, hash);
    let statement = root_statement(
        ENVELOPE_VERSION,
        hash.id(),
        tokenizer_id,
        message.len(),
        tree.root_digest()?,
    );
    let root_sig = sign_bytes(&statement, secret)?;
    Ok(QuoteSignature {
        version: ENVELOPE_VERSION,
        hash_id: hash.id().to_string(),
        tokenizer_id: tokenizer_id.to_string(),
        n: message.len(),
        indices: IndexSet::full(message.len())?,
        path: Vec::new(),
        root_sig,
    })
}

const STATEMENT_TAG: &[u8] = b"qsig-root\0";

/// The bytes covered by the root signature.
///
/// Signing the bare root would leave `n` unauthenticated: a right subtree's
/// label looks the same whether it covers one token or several, so a quote
/// could claim a different original length and still verify, and its gap
/// report would lie. Binding `n` and the identifiers closes that.
pub fn root_statement(
    version: u32,
    hash_id: &str,
    tokenizer_id: &str,
    n: usize,
    root: &Digest,
) -> Vec<u8> {
    let mut out = Vec::with_capacity(
        STATEMENT_TAG.len() + 20 + hash_id.len() + tokenizer_id.len() + root.len(),
    );
    out.extend_from_slice(STATEMENT_TAG);
    out.extend_from_slice(&version.to_be_bytes());
    for id in [hash_id, tokenizer_id] {
        out.extend_from_slice(&(id.len() as u16).to_be_bytes());
        out.extend_from_slice(id.as_bytes());
    }
    out.extend_from_slice(&(n as u64).to_be_bytes());
    out.extend_from_slice(root.as_bytes());
    out
}

/// Quote `indices` from a message, given the message's full signature.
pub fn quote(
    message: &TokenSequence,
    indices: &IndexSet,
    message_sig: &QuoteSignature,
) -> Result<QuoteSignature> {
    quote_with(
        hash_by_id(&message_sig.hash_id)?,
        message,
        indices,
        message_sig,
    )
}

pub fn quote_with(
    hash: &dyn TreeHash,
    message: &TokenSequence,
    indices: &IndexSet,
    message_sig: &QuoteSignature,
) -> Result<QuoteSignature> {
    check_hash(hash, message_sig)?;
    if message.len() != message_sig.n {
        return Err(Error::LengthMismatch {
            expected: message_sig.n,
            actual: message.len(),
        });
    }
    if !message_sig.is_full() || !message_sig.path.is_empty() {
        return Err(Error::NotFullSignature);
    }
    let tree = build_tree(message, hash);
    let flags = mark_flags(tree.shape(), indices)?;
    Ok(QuoteSignature {
        indices: indices.clone(),
        path: collect_required(&tree, &flags)?,
        ..message_sig.clone()
    })
}

/// Quote from a quote. `sub` holds positions within `quote_tokens`.
///
/// The parent is checked structurally (it must reconstruct a root), not
/// against a public key; verify it first if its origin matters.
pub fn subquote(
    quote_tokens: &TokenSequence,
    parent: &QuoteSignature,
    sub: &IndexSet,
) -> Result<QuoteSignature> {
    subquote_with(hash_by_id(&parent.hash_id)?, quote_tokens, parent, sub)
}

pub fn subquote_with(
    hash: &dyn TreeHash,
    quote_tokens: &TokenSequence,
    parent: &QuoteSignature,
    sub: &IndexSet,
) -> Result<QuoteSignature> {
    check_hash(hash, parent)?;
    if sub.end() > quote_tokens.len() {
        return Err(Error::IndexOutOfRange {
            index: sub.end() - 1,
            len: quote_tokens.len(),
        });
    }
    let tree = reconstruct_tree(hash, quote_tokens, parent)?;
    let absolute = parent.indices.compose(sub)?;
    let flags = mark_flags(tree.shape(), &absolute)?;
    Ok(QuoteSignature {
        indices: absolute,
        path: collect_required(&tree, &flags)?,
        ..parent.clone()
    })
}

fn check_hash(hash: &dyn TreeHash, sig: &QuoteSignature) -> Result<()> {
    if hash.id() != sig.hash_id {
        return Err(Error::HashMismatch {
            sig: sig.hash_id.clone(),
            backend: hash.id().to_string(),
        });
    }
    Ok(())
}
