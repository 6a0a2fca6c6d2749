//! Turning text into the token sequence that gets signed, and rendering
//! quotes back into text with gap markers.
//!
//! Signer, Quoter and Verifier must derive identical tokens from identical
//! text, so every tokenizer is a named, versioned strategy whose identifier
//! travels in the signature envelope. Only the token sequence is
//! authenticated: the whitespace between tokens is not.

use std::fmt;

use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::verifier::GapDescriptor;

/// Identifier of the whitespace tokenizer.
pub const WHITESPACE_V1: &str = "ws-v1";

/// Default marker inserted where tokens were left out of a quote.
pub const DEFAULT_MARKER: &str = "[…]";

/// One token: a non-empty byte string.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token(Vec<u8>);

impl Token {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Result<Self> {
        let bytes = bytes.into();
        if bytes.is_empty() {
            return Err(Error::EmptyToken);
        }
        Ok(Token(bytes))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", String::from_utf8_lossy(&self.0))
    }
}

/// An ordered, non-empty list of tokens.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TokenSequence(Vec<Token>);

impl TokenSequence {
    pub fn new(tokens: Vec<Token>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::NoTokens);
        }
        Ok(TokenSequence(tokens))
    }

    /// Convenience constructor from anything byte-like.
    pub fn from_parts<I, B>(parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = B>,
        B: Into<Vec<u8>>,
    {
        let tokens = parts
            .into_iter()
            .map(Token::new)
            .collect::<Result<Vec<_>>>()?;
        TokenSequence::new(tokens)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Token> {
        self.0.iter()
    }

    /// The tokens at `indices`, in order.
    pub fn select(&self, indices: &IndexSet) -> Result<TokenSequence> {
        let mut out = Vec::with_capacity(indices.len());
        for i in indices.iter() {
            let tok = self.0.get(i).ok_or(Error::IndexOutOfRange {
                index: i,
                len: self.0.len(),
            })?;
            out.push(tok.clone());
        }
        TokenSequence::new(out)
    }
}

impl fmt::Debug for TokenSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl<'a> IntoIterator for &'a TokenSequence {
    type Item = &'a Token;
    type IntoIter = std::slice::Iter<'a, Token>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

pub trait Tokenizer: Send + Sync {
    fn id(&self) -> &'static str;

    fn tokenize(&self, text: &str) -> Result<TokenSequence>;
}

/// Splits on runs of Unicode whitespace. Tokens keep their exact bytes.
#[derive(Debug, Default, Clone, Copy)]
pub struct WhitespaceTokenizer;

impl Tokenizer for WhitespaceTokenizer {
    fn id(&self) -> &'static str {
        WHITESPACE_V1
    }

    fn tokenize(&self, text: &str) -> Result<TokenSequence> {
        TokenSequence::from_parts(text.split_whitespace())
    }
}

static WHITESPACE: WhitespaceTokenizer = WhitespaceTokenizer;

pub fn tokenizer_by_id(id: &str) -> Result<&'static dyn Tokenizer> {
    match id {
        WHITESPACE_V1 => Ok(&WHITESPACE),
        other => Err(Error::UnknownTokenizer(other.to_string())),
    }
}

/// Tokenize with the default whitespace tokenizer.
pub fn tokenize(text: &str) -> Result<TokenSequence> {
    WHITESPACE.tokenize(text)
}

/// Join quoted tokens with single spaces, putting `marker` wherever a run of
/// original tokens is missing. `gaps` must be sorted and use positions in the
/// original message.
pub fn render_quote(tokens: &[Token], gaps: &[GapDescriptor], marker: &str) -> Vec<u8> {
    let total = tokens.len() + gaps.iter().map(|g| g.missing).sum::<usize>();
    let mut pieces: Vec<&[u8]> = Vec::with_capacity(tokens.len() + gaps.len());
    let mut gaps = gaps.iter().peekable();
    let mut tokens = tokens.iter();
    let mut pos = 0;
    while pos < total {
        match gaps.peek() {
            Some(g) if g.position == pos => {
                pieces.push(marker.as_bytes());
                pos += g.missing;
                gaps.next();
            }
            _ => {
                let Some(tok) = tokens.next() else { break };
                pieces.push(tok.as_bytes());
                pos += 1;
            }
        }
    }
    pieces.join(&b' ')
}

/// Tokenize a rendered quote and drop the gap markers.
///
/// A real token that is byte-equal to the marker is indistinguishable from a
/// marker; pick a different marker for such texts.
pub fn strip_markers(tokenizer: &dyn Tokenizer, text: &str, marker: &str) -> Result<TokenSequence> {
    let tokens = tokenizer.tokenize(text).map(|s| s.0).or_else(|e| match e {
        Error::NoTokens => Ok(Vec::new()),
        e => Err(e),
    })?;
    TokenSequence::new(
        tokens
            .into_iter()
            .filter(|t| t.as_bytes() != marker.as_bytes())
            .collect(),
    )
}
