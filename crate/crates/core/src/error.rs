use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no tokens: the message is empty after tokenization")]
    NoTokens,
    #[error("tokens must be non-empty")]
    EmptyToken,
    #[error("unknown hash function `{0}`")]
    UnknownHash(String),
    #[error("unknown signature scheme `{0}`")]
    UnknownScheme(String),
    #[error("unknown tokenizer `{0}`")]
    UnknownTokenizer(String),
    #[error("invalid key: {0}")]
    InvalidKey(String),
    #[error("key is for scheme `{key}` but `{expected}` was requested")]
    SchemeMismatch { key: String, expected: String },
    #[error("index set is empty")]
    EmptyIndexSet,
    #[error("index {index} is out of range for {len} tokens")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("message has {actual} tokens but the signature covers {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("signature does not cover the full message; use subquote instead")]
    NotFullSignature,
    #[error("signature uses hash `{sig}` but hash backend is `{backend}`")]
    HashMismatch { sig: String, backend: String },
    #[error("malformed signature: {0}")]
    Malformed(#[from] MalformedReason),
    #[error("cannot decode envelope: {0}")]
    Decode(#[from] DecodeError),
    #[error("node {0} has no label")]
    Unlabeled(usize),
    #[error("{0}")]
    Domain(String),
    #[error("exhaustive search over n = {n} exceeds the limit of {limit}; use sampling instead")]
    LimitExceeded { n: usize, limit: usize },
    #[error("observed path size {observed} exceeds bound {bound} (n = {n}, t = {t})")]
    BoundViolated {
        n: usize,
        t: usize,
        bound: u64,
        observed: u64,
    },
    #[error("bound for n = {n}, t = {t} overcounts by {slack}, more than t")]
    SlackExceeded { n: usize, t: usize, slack: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Why a quote signature could not be checked at all, as opposed to failing
/// the root signature check.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MalformedReason {
    #[error("quote has {actual} tokens but the signature lists {expected} indices")]
    TokenCountMismatch { expected: usize, actual: usize },
    #[error("original length n must be at least 1")]
    ZeroLength,
    #[error("n = {n} exceeds the supported maximum of {max} tokens")]
    TooManyTokens { n: usize, max: usize },
    #[error("index {index} is out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("path ran out after {provided} hashes, more are required")]
    PathExhausted { provided: usize },
    #[error("path has {surplus} unused hashes")]
    PathSurplus { surplus: usize },
    #[error("digest has {actual} bytes, expected {expected}")]
    DigestLength { expected: usize, actual: usize },
    #[error("node {0} cannot be labeled from the quote and path")]
    Unreachable(usize),
    #[error("unknown hash function `{0}`")]
    UnknownHash(String),
    #[error("public key scheme `{key}` does not match signature scheme `{sig}`")]
    SchemeMismatch { key: String, sig: String },
}

impl MalformedReason {
    pub fn code(&self) -> &'static str {
        match self {
            MalformedReason::TokenCountMismatch { .. } => "token-count-mismatch",
            MalformedReason::ZeroLength => "zero-length",
            MalformedReason::TooManyTokens { .. } => "too-many-tokens",
            MalformedReason::IndexOutOfRange { .. } => "index-out-of-range",
            MalformedReason::PathExhausted { .. } => "path-exhausted",
            MalformedReason::PathSurplus { .. } => "path-surplus",
            MalformedReason::DigestLength { .. } => "digest-length",
            MalformedReason::Unreachable(_) => "unreachable-node",
            MalformedReason::UnknownHash(_) => "unknown-hash",
            MalformedReason::SchemeMismatch { .. } => "scheme-mismatch",
        }
    }
}

/// Envelope decoding failures. Each variant has a stable reason code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unsupported envelope version {0}")]
    UnsupportedVersion(u64),
    #[error("unknown hash function `{0}`")]
    UnknownHash(String),
    #[error("unknown signature scheme `{0}`")]
    UnknownScheme(String),
    #[error("unknown tokenizer `{0}`")]
    UnknownTokenizer(String),
    #[error("index set is empty")]
    EmptyIndices,
    #[error("range [{start}, {end}) is empty or reversed")]
    EmptyRange { start: usize, end: usize },
    #[error("ranges are not sorted")]
    UnsortedRanges,
    #[error("ranges overlap")]
    OverlappingRanges,
    #[error("ranges touch and must be merged")]
    AdjacentRanges,
    #[error("index {index} is out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("n must be at least 1")]
    ZeroLength,
    #[error("n = {n} exceeds the supported maximum of {max} tokens")]
    TooManyTokens { n: usize, max: usize },
    #[error("digest has {actual} bytes, expected {expected}")]
    DigestLength { expected: usize, actual: usize },
    #[error("invalid base64url in `{field}`")]
    Base64 { field: &'static str },
    #[error("path has {len} hashes, more than the maximum {max} for n = {n}")]
    PathTooLong { len: usize, max: usize, n: usize },
    #[error("key file has no scheme header line")]
    KeyHeader,
}

impl DecodeError {
    pub fn code(&self) -> &'static str {
        match self {
            DecodeError::Syntax(_) => "syntax",
            DecodeError::UnsupportedVersion(_) => "unsupported-version",
            DecodeError::UnknownHash(_) => "unknown-hash",
            DecodeError::UnknownScheme(_) => "unknown-scheme",
            DecodeError::UnknownTokenizer(_) => "unknown-tokenizer",
            DecodeError::EmptyIndices => "empty-indices",
            DecodeError::EmptyRange { .. } => "empty-range",
            DecodeError::UnsortedRanges => "unsorted-ranges",
            DecodeError::OverlappingRanges => "overlapping-ranges",
            DecodeError::AdjacentRanges => "adjacent-ranges",
            DecodeError::IndexOutOfRange { .. } => "index-out-of-range",
            DecodeError::ZeroLength => "zero-length",
            DecodeError::TooManyTokens { .. } => "too-many-tokens",
            DecodeError::DigestLength { .. } => "digest-length",
            DecodeError::Base64 { .. } => "bad-base64",
            DecodeError::PathTooLong { .. } => "path-too-long",
            DecodeError::KeyHeader => "key-header",
        }
    }
}
