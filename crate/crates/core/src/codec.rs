//! The `.qsig` envelope: canonical JSON for quote signatures.
//!
//! One line, fields in sorted order, no optional whitespace, terminated by a
//! newline. Digests and the root signature are unpadded base64url. Equal
//! signatures encode to equal bytes.
//!
//! ```text
//! {"hash_id":"sha-256","indices":[[4,5]],"n":8,"path":["…","…","…"],"root_sig":"…","scheme_id":"ed25519","tokenizer_id":"ws-v1","version":1}
//! ```
//!
//! Decoding rejects anything it does not fully understand: unknown
//! versions or identifiers, non-canonical index ranges, wrong digest
//! lengths, bad base64, unknown or duplicate fields.

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine as _;
use serde::{Deserialize, Serialize};

use crate::error::DecodeError;
use crate::hash::{hash_by_id, Digest};
use crate::index_set::IndexSet;
use crate::quoter::QuoteSignature;
use crate::sigscheme::{scheme_by_id, RootSignature};
use crate::tokenizer::tokenizer_by_id;
use crate::verifier::MAX_TOKENS;
use crate::ENVELOPE_VERSION;

pub const FILE_EXTENSION: &str = "qsig";
pub const MEDIA_TYPE: &str = "application/x-quotable-signature+json-like";

// Field order here is the wire order; keep it sorted.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    hash_id: String,
    indices: Vec<[usize; 2]>,
    n: usize,
    path: Vec<String>,
    root_sig: String,
    scheme_id: String,
    tokenizer_id: String,
    version: u64,
}

pub fn encode(sig: &QuoteSignature) -> Vec<u8> {
    let env = Envelope {
        hash_id: sig.hash_id.clone(),
        indices: sig
            .indices
            .ranges()
            .iter()
            .map(|r| [r.start, r.end])
            .collect(),
        n: sig.n,
        path: sig.path.iter().map(|d| URL_SAFE_NO_PAD.encode(d)).collect(),
        root_sig: URL_SAFE_NO_PAD.encode(&sig.root_sig.bytes),
        scheme_id: sig.root_sig.scheme_id.clone(),
        tokenizer_id: sig.tokenizer_id.clone(),
        version: u64::from(sig.version),
    };
    let mut out = serde_json::to_vec(&env).expect("envelope serializes");
    out.push(b'\n');
    out
}

pub fn decode(bytes: &[u8]) -> Result<QuoteSignature, DecodeError> {
    let env: Envelope = match serde_json::from_slice(bytes) {
        Ok(env) => env,
        Err(e) => {
            // Another version may use another layout; say so rather than
            // reporting whatever field it trips over.
            let version = serde_json::from_slice::<serde_json::Value>(bytes)
                .ok()
                .and_then(|v| v.get("version").and_then(serde_json::Value::as_u64));
            return Err(match version {
                Some(v) if v != u64::from(ENVELOPE_VERSION) => DecodeError::UnsupportedVersion(v),
                _ => DecodeError::Syntax(e.to_string()),
            });
        }
    };
    if env.version != u64::from(ENVELOPE_VERSION) {
        return Err(DecodeError::UnsupportedVersion(env.version));
    }

    let hash =
        hash_by_id(&env.hash_id).map_err(|_| DecodeError::UnknownHash(env.hash_id.clone()))?;
    scheme_by_id(&env.scheme_id).map_err(|_| DecodeError::UnknownScheme(env.scheme_id.clone()))?;
    tokenizer_by_id(&env.tokenizer_id)
        .map_err(|_| DecodeError::UnknownTokenizer(env.tokenizer_id.clone()))?;

    if env.n == 0 {
        return Err(DecodeError::ZeroLength);
    }
    if env.n > MAX_TOKENS {
        return Err(DecodeError::TooManyTokens {
            n: env.n,
            max: MAX_TOKENS,
        });
    }
    let indices = IndexSet::from_canonical(env.indices.iter().map(|&[s, e]| s..e).collect())?;
    if indices.end() > env.n {
        return Err(DecodeError::IndexOutOfRange {
            index: indices.end() - 1,
            n: env.n,
        });
    }
    let max_path = env.n.div_ceil(2);
    if env.path.len() > max_path {
        return Err(DecodeError::PathTooLong {
            len: env.path.len(),
            max: max_path,
            n: env.n,
        });
    }
    let path = env
        .path
        .iter()
        .map(|s| {
            let bytes = URL_SAFE_NO_PAD
                .decode(s)
                .map_err(|_| DecodeError::Base64 { field: "path" })?;
            if bytes.len() != hash.output_len() {
                return Err(DecodeError::DigestLength {
                    expected: hash.output_len(),
                    actual: bytes.len(),
                });
            }
            Ok(Digest::new(bytes))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let root_sig = URL_SAFE_NO_PAD
        .decode(&env.root_sig)
        .map_err(|_| DecodeError::Base64 { field: "root_sig" })?;

    Ok(QuoteSignature {
        version: ENVELOPE_VERSION,
        hash_id: env.hash_id,
        tokenizer_id: env.tokenizer_id,
        n: env.n,
        indices,
        path,
        root_sig: RootSignature {
            scheme_id: env.scheme_id,
            bytes: root_sig,
        },
    })
}

/// Human-readable dump of an envelope's fields.
pub fn describe(sig: &QuoteSignature) -> String {
    let mut out = String::new();
    out.push_str(&format!("version:      {}\n", sig.version));
    out.push_str(&format!("hash:         {}\n", sig.hash_id));
    out.push_str(&format!("scheme:       {}\n", sig.root_sig.scheme_id));
    out.push_str(&format!("tokenizer:    {}\n", sig.tokenizer_id));
    out.push_str(&format!("n:            {}\n", sig.n));
    out.push_str(&format!(
        "indices:      {} ({} tokens{})\n",
        sig.indices.display_ranges(","),
        sig.indices.len(),
        if sig.indices.is_contiguous() {
            ", contiguous"
        } else {
            ""
        }
    ));
    out.push_str(&format!("path:         {} hashes\n", sig.path.len()));
    for d in &sig.path {
        out.push_str(&format!("  {}\n", d.to_hex()));
    }
    out.push_str(&format!(
        "root_sig:     {}\n",
        URL_SAFE_NO_PAD.encode(&sig.root_sig.bytes)
    ));
    out
}
