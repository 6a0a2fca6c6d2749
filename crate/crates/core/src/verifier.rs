//! Verifying quotes.
//!
//! The verifier never trusts structure carried in the signature beyond
//! `(n, indices, path)`: it rebuilds the tree shape from `n`, replays the
//! flag walk for `indices`, places the path hashes on the required nodes in
//! inorder, hashes the quoted tokens into their leaves and recomputes the
//! root, which is then checked against the root signature.

use serde::Serialize;

use crate::error::MalformedReason;
use crate::hash::{hash_by_id, CountingHash, Digest, TreeHash};
use crate::index_set::IndexSet;
use crate::merkle::{build_skeleton, leaf_hash, node_hash, MerkleTree, NodeKind, ROOT};
use crate::quoter::{mark_flags, QuoteSignature};
use crate::sigscheme::{verify_bytes, PublicKey};
use crate::tokenizer::TokenSequence;

/// Largest original token count the verifier will rebuild a tree for.
pub const MAX_TOKENS: usize = 1 << 22;

/// A run of `missing` original tokens starting at `position`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GapDescriptor {
    pub position: usize,
    pub missing: usize,
}

/// The runs of `0..n` not covered by `indices`.
pub fn gaps(n: usize, indices: &IndexSet) -> Vec<GapDescriptor> {
    let mut out = Vec::new();
    let mut pos = 0;
    for r in indices.ranges() {
        let start = r.start.min(n);
        if start > pos {
            out.push(GapDescriptor {
                position: pos,
                missing: start - pos,
            });
        }
        pos = pos.max(r.end.min(n));
    }
    if pos < n {
        out.push(GapDescriptor {
            position: pos,
            missing: n - pos,
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// The recomputed root does not carry a valid signature under this key:
    /// either the quote or path was altered, or the key is wrong.
    SignatureInvalid,
    Malformed(MalformedReason),
}

impl Failure {
    pub fn code(&self) -> &'static str {
        match self {
            Failure::SignatureInvalid => "signature-invalid",
            Failure::Malformed(m) => m.code(),
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::SignatureInvalid => {
                "signature invalid: root mismatch or wrong public key".to_string()
            }
            Failure::Malformed(m) => format!("malformed signature: {m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub valid: bool,
    pub failure: Option<Failure>,
    pub n: usize,
    pub indices: IndexSet,
    pub contiguous: bool,
    pub gaps: Vec<GapDescriptor>,
    pub signer_scheme: String,
    pub hash_id: String,
    pub tokenizer_id: String,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    valid: bool,
    reason: Option<&'static str>,
    detail: Option<String>,
    n: usize,
    indices: Vec<[usize; 2]>,
    contiguous: bool,
    gaps: &'a [GapDescriptor],
    signer_scheme: &'a str,
    hash_id: &'a str,
    tokenizer_id: &'a str,
}

impl VerificationReport {
    /// JSON document, one line, fixed field order.
    pub fn to_json(&self) -> String {
        let doc = ReportDoc {
            valid: self.valid,
            reason: self.failure.as_ref().map(Failure::code),
            detail: self.failure.as_ref().map(Failure::message),
            n: self.n,
            indices: self
                .indices
                .ranges()
                .iter()
                .map(|r| [r.start, r.end])
                .collect(),
            contiguous: self.contiguous,
            gaps: &self.gaps,
            signer_scheme: &self.signer_scheme,
            hash_id: &self.hash_id,
            tokenizer_id: &self.tokenizer_id,
        };
        serde_json::to_string(&doc).expect("report serializes")
    }
}

/// Rebuild the tree as far as the quote and path allow. The root and every
/// ancestor of a quoted token end up labelled.
pub fn reconstruct_tree(
    hash: &dyn TreeHash,
    quote_tokens: &TokenSequence,
    sig: &QuoteSignature,
) -> Result<MerkleTree, MalformedReason> {
    let n = sig.n;
    if n == 0 {
        return Err(MalformedReason::ZeroLength);
    }
    if n > MAX_TOKENS {
        return Err(MalformedReason::TooManyTokens { n, max: MAX_TOKENS });
    }
    if sig.indices.end() > n {
        return Err(MalformedReason::IndexOutOfRange {
            index: sig.indices.end() - 1,
            n,
        });
    }
    if quote_tokens.len() != sig.indices.len() {
        return Err(MalformedReason::TokenCountMismatch {
            expected: sig.indices.len(),
            actual: quote_tokens.len(),
        });
    }
    if let Some(d) = sig.path.iter().find(|d| d.len() != hash.output_len()) {
        return Err(MalformedReason::DigestLength {
            expected: hash.output_len(),
            actual: d.len(),
        });
    }

    let mut tree = build_skeleton(n).expect("n >= 1");
    let flags = mark_flags(tree.shape(), &sig.indices).expect("indices within n");
    let required = flags.required_inorder(tree.shape());
    if required.len() > sig.path.len() {
        return Err(MalformedReason::PathExhausted {
            provided: sig.path.len(),
        });
    }
    if required.len() < sig.path.len() {
        return Err(MalformedReason::PathSurplus {
            surplus: sig.path.len() - required.len(),
        });
    }
    for (&id, digest) in required.iter().zip(&sig.path) {
        tree.set_label(id, digest.clone());
    }
    for (token, index) in quote_tokens.iter().zip(sig.indices.iter()) {
        let leaf = tree.shape().leaf(index);
        tree.set_label(leaf, leaf_hash(hash, token));
    }
    fill(hash, &mut tree, ROOT)?;
    Ok(tree)
}

fn fill(hash: &dyn TreeHash, tree: &mut MerkleTree, id: usize) -> Result<(), MalformedReason> {
    if tree.label(id).is_some() {
        return Ok(());
    }
    let (left, right) = match tree.shape().node(id).kind {
        NodeKind::Internal { left, right } => (left, right),
        NodeKind::Leaf { .. } => return Err(MalformedReason::Unreachable(id)),
    };
    fill(hash, tree, left)?;
    fill(hash, tree, right)?;
    let label = node_hash(
        hash,
        tree.label(left).expect("filled"),
        tree.label(right).expect("filled"),
    );
    tree.set_label(id, label);
    Ok(())
}

/// The root digest implied by a quote and its signature.
pub fn reconstruct_root(
    quote_tokens: &TokenSequence,
    sig: &QuoteSignature,
) -> Result<Digest, MalformedReason> {
    let hash = resolve_hash(sig)?;
    reconstruct_root_with(hash, quote_tokens, sig)
}

pub fn reconstruct_root_with(
    hash: &dyn TreeHash,
    quote_tokens: &TokenSequence,
    sig: &QuoteSignature,
) -> Result<Digest, MalformedReason> {
    let tree = reconstruct_tree(hash, quote_tokens, sig)?;
    Ok(tree.root_digest().expect("root filled").clone())
}

/// Number of hash evaluations needed to reconstruct the root.
pub fn count_verify_hashes(
    quote_tokens: &TokenSequence,
    sig: &QuoteSignature,
) -> Result<u64, MalformedReason> {
    let counting = CountingHash::new(resolve_hash(sig)?);
    reconstruct_root_with(&counting, quote_tokens, sig)?;
    Ok(counting.count())
}

fn resolve_hash(sig: &QuoteSignature) -> Result<&'static dyn TreeHash, MalformedReason> {
    hash_by_id(&sig.hash_id).map_err(|_| MalformedReason::UnknownHash(sig.hash_id.clone()))
}

/// Verify a quote against its signature and the signer's public key.
pub fn verify(
    quote_tokens: &TokenSequence,
    sig: &QuoteSignature,
    public: &PublicKey,
) -> VerificationReport {
    let outcome = resolve_hash(sig).and_then(|h| verify_inner(h, quote_tokens, sig, public));
    report(sig, outcome)
}

pub fn verify_with(
    hash: &dyn TreeHash,
    quote_tokens: &TokenSequence,
    sig: &QuoteSignature,
    public: &PublicKey,
) -> VerificationReport {
    let outcome = if hash.id() == sig.hash_id {
        verify_inner(hash, quote_tokens, sig, public)
    } else {
        Err(MalformedReason::UnknownHash(sig.hash_id.clone()))
    };
    report(sig, outcome)
}

fn verify_inner(
    hash: &dyn TreeHash,
    quote_tokens: &TokenSequence,
    sig: &QuoteSignature,
    public: &PublicKey,
) -> Result<bool, MalformedReason> {
    if public.scheme_id != sig.root_sig.scheme_id {
        return Err(MalformedReason::SchemeMismatch {
            key: public.scheme_id.clone(),
            sig: sig.root_sig.scheme_id.clone(),
        });
    }
    let root = reconstruct_root_with(hash, quote_tokens, sig)?;
    Ok(verify_bytes(&sig.statement(&root), &sig.root_sig, public))
}

fn report(sig: &QuoteSignature, outcome: Result<bool, MalformedReason>) -> VerificationReport {
    let failure = match outcome {
        Ok(true) => None,
        Ok(false) => Some(Failure::SignatureInvalid),
        Err(m) => Some(Failure::Malformed(m)),
    };
    VerificationReport {
        valid: failure.is_none(),
        failure,
        n: sig.n,
        indices: sig.indices.clone(),
        contiguous: sig.indices.is_contiguous(),
        gaps: gaps(sig.n, &sig.indices),
        signer_scheme: sig.root_sig.scheme_id.clone(),
        hash_id: sig.hash_id.clone(),
        tokenizer_id: sig.tokenizer_id.clone(),
    }
}
