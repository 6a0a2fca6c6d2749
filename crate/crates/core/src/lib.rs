//! Quotable signatures over heap-shaped Merkle trees.
//!
//! A Signer tokenizes a message, builds a heap-shaped Merkle tree over the
//! tokens, and signs the root digest once with a classical signature scheme.
//! Anyone holding the message and its signature can then derive a signature
//! for any subsequence of the tokens (a *quote*) without the secret key: the
//! quote signature carries the original root signature, the original token
//! count, the quoted indices, and the sibling hashes needed to recompute the
//! root. Verifiers recompute the root from the quote and check the root
//! signature, and learn where tokens were removed along the way.
//!
//! ```
//! use qsig::{quoter, sigscheme, tokenizer, verifier, IndexSet};
//! use rand::SeedableRng;
//!
//! let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
//! let key = sigscheme::keygen("ed25519", &mut rng).unwrap();
//!
//! let message = tokenizer::tokenize("The quick brown fox jumps over the dog").unwrap();
//! let signature = quoter::sign(&message, &key.secret).unwrap();
//!
//! let picked = IndexSet::from_indices([4]).unwrap();
//! let quote = quoter::quote(&message, &picked, &signature).unwrap();
//! assert_eq!(quote.path.len(), 3);
//!
//! let report = verifier::verify(&message.select(&picked).unwrap(), &quote, &key.public);
//! assert!(report.valid);
//! ```
//!
//! Verification authenticates the token sequence only. Whitespace between
//! tokens is not covered by the signature.

pub mod bounds;
pub mod cli;
pub mod codec;
pub mod error;
pub mod hash;
pub mod index_set;
pub mod merkle;
pub mod quoter;
pub mod sigscheme;
pub mod tokenizer;
pub mod verifier;

pub use error::{DecodeError, Error, MalformedReason, Result};
pub use hash::{Digest, TreeHash};
pub use index_set::IndexSet;
pub use merkle::{MerkleTree, TreeShape};
pub use quoter::QuoteSignature;
pub use sigscheme::{KeyPair, PublicKey, RootSignature, SecretKey};
pub use tokenizer::{Token, TokenSequence};
pub use verifier::{GapDescriptor, VerificationReport};

/// Version of the quote signature envelope produced by this crate.
pub const ENVELOPE_VERSION: u32 = 1;
