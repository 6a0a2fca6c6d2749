//! Pluggable hash backends for tree labels.
//!
//! A [`TreeHash`] only knows how to hash a concatenation of byte slices. The
//! leaf/internal-node masking lives in [`crate::merkle`].

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use sha2::Digest as _;

use crate::error::{Error, Result};

/// Identifier of the default hash backend.
pub const DEFAULT_HASH_ID: &str = "sha-256";

/// A node label. Its length is fixed by the hash backend that produced it.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digest(Vec<u8>);

impl Digest {
    pub fn new(bytes: Vec<u8>) -> Self {
        Digest(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl AsRef<[u8]> for Digest {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

pub trait TreeHash: Send + Sync {
    /// Identifier recorded in signature envelopes.
    fn id(&self) -> &str;

    fn output_len(&self) -> usize;

    /// Hash the concatenation of `parts`. One call is one hash evaluation.
    fn hash_parts(&self, parts: &[&[u8]]) -> Digest;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Sha256Hash;

impl TreeHash for Sha256Hash {
    fn id(&self) -> &str {
        DEFAULT_HASH_ID
    }

    fn output_len(&self) -> usize {
        32
    }

    fn hash_parts(&self, parts: &[&[u8]]) -> Digest {
        let mut h = sha2::Sha256::new();
        for p in parts {
            h.update(p);
        }
        Digest(h.finalize().to_vec())
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Sha512Hash;

impl TreeHash for Sha512Hash {
    fn id(&self) -> &str {
        "sha-512"
    }

    fn output_len(&self) -> usize {
        64
    }

    fn hash_parts(&self, parts: &[&[u8]]) -> Digest {
        let mut h = sha2::Sha512::new();
        for p in parts {
            h.update(p);
        }
        Digest(h.finalize().to_vec())
    }
}

static SHA256: Sha256Hash = Sha256Hash;
static SHA512: Sha512Hash = Sha512Hash;

/// Look up a registered hash backend by identifier.
pub fn hash_by_id(id: &str) -> Result<&'static dyn TreeHash> {
    match id {
        "sha-256" => Ok(&SHA256),
        "sha-512" => Ok(&SHA512),
        other => Err(Error::UnknownHash(other.to_string())),
    }
}

pub fn default_hash() -> &'static dyn TreeHash {
    &SHA256
}

/// Wraps another backend and counts hash evaluations.
///
/// The counter is per instance. It reports the wrapped backend's id, so it can
/// stand in wherever the inner backend is expected.
pub struct CountingHash<H> {
    inner: H,
    count: AtomicU64,
}

impl<H: TreeHash> CountingHash<H> {
    pub fn new(inner: H) -> Self {
        CountingHash {
            inner,
            count: AtomicU64::new(0),
        }
    }

    pub fn count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.count.store(0, Ordering::Relaxed);
    }

    /// Returns the count and resets it to zero.
    pub fn take(&self) -> u64 {
        self.count.swap(0, Ordering::Relaxed)
    }
}

impl<H: TreeHash> TreeHash for CountingHash<H> {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn output_len(&self) -> usize {
        self.inner.output_len()
    }

    fn hash_parts(&self, parts: &[&[u8]]) -> Digest {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.inner.hash_parts(parts)
    }
}

impl<H: TreeHash + ?Sized> TreeHash for &H {
    fn id(&self) -> &str {
        (**self).id()
    }

    fn output_len(&self) -> usize {
        (**self).output_len()
    }

    fn hash_parts(&self, parts: &[&[u8]]) -> Digest {
        (**self).hash_parts(parts)
    }
}
