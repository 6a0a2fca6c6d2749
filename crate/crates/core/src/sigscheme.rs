//! Classical signature schemes used to sign the Merkle root.
//!
//! Schemes are looked up by string id. Key files are a `scheme_id\n` header line followed by the raw key
//! bytes.

use ed25519_dalek::Signer as _;
use rand::RngCore;

use crate::error::{DecodeError, Error, Result};
use crate::hash::Digest;

pub const ED25519: &str = "ed25519";

pub trait SignatureScheme: Send + Sync {
    fn id(&self) -> &'static str;

    fn generate_secret(&self, rng: &mut dyn RngCore) -> Vec<u8>;

    fn public_from_secret(&self, secret: &[u8]) -> Result<Vec<u8>>;

    fn sign(&self, secret: &[u8], message: &[u8]) -> Result<Vec<u8>>;

    /// Malformed keys or signatures simply fail to verify.
    fn verify(&self, public: &[u8], message: &[u8], signature: &[u8]) -> bool;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Ed25519;

impl Ed25519 {
    fn signing_key(secret: &[u8]) -> Result<ed25519_dalek::SigningKey> {
        let seed: &[u8; 32] = secret.try_into().map_err(|_| {
            Error::InvalidKey(format!(
                "ed25519 secret must be 32 bytes, got {}",
                secret.len()
            ))
        })?;
        Ok(ed25519_dalek::SigningKey::from_bytes(seed))
    }
}

impl SignatureScheme for Ed25519 {
    fn id(&self) -> &'static str {
        ED25519
    }

    fn generate_secret(&self, rng: &mut dyn RngCore) -> Vec<u8> {
        let mut seed = [0u8; 32];
        rng.fill_bytes(&mut seed);
        seed.to_vec()
    }

    fn public_from_secret(&self, secret: &[u8]) -> Result<Vec<u8>> {
        Ok(Self::signing_key(secret)?
            .verifying_key()
            .to_bytes()
            .to_vec())
    }

    fn sign(&self, secret: &[u8], message: &[u8]) -> Result<Vec<u8>> {
        Ok(Self::signing_key(secret)?.sign(message).to_bytes().to_vec())
    }

    fn verify(&self, public: &[u8], message: &[u8], signature: &[u8]) -> bool {
        let Ok(pk) = <&[u8; 32]>::try_from(public) else {
            return false;
        };
        let Ok(vk) = ed25519_dalek::VerifyingKey::from_bytes(pk) else {
            return false;
        };
        let Ok(sig) = ed25519_dalek::Signature::from_slice(signature) else {
            return false;
        };
        vk.verify_strict(message, &sig).is_ok()
    }
}

static ED25519_SCHEME: Ed25519 = Ed25519;

pub fn scheme_by_id(id: &str) -> Result<&'static dyn SignatureScheme> {
    match id {
        ED25519 => Ok(&ED25519_SCHEME),
        other => Err(Error::UnknownScheme(other.to_string())),
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct SecretKey {
    pub scheme_id: String,
    pub bytes: Vec<u8>,
}

impl std::fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SecretKey")
            .field("scheme_id", &self.scheme_id)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    pub scheme_id: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPair {
    pub secret: SecretKey,
    pub public: PublicKey,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSignature {
    pub scheme_id: String,
    pub bytes: Vec<u8>,
}

pub fn keygen(scheme_id: &str, rng: &mut dyn RngCore) -> Result<KeyPair> {
    let scheme = scheme_by_id(scheme_id)?;
    let secret = SecretKey {
        scheme_id: scheme.id().to_string(),
        bytes: scheme.generate_secret(rng),
    };
    KeyPair::from_secret(secret)
}

impl KeyPair {
    pub fn from_secret(secret: SecretKey) -> Result<Self> {
        let scheme = scheme_by_id(&secret.scheme_id)?;
        let public = PublicKey {
            scheme_id: secret.scheme_id.clone(),
            bytes: scheme.public_from_secret(&secret.bytes)?,
        };
        Ok(KeyPair { secret, public })
    }
}

pub fn sign_bytes(message: &[u8], secret: &SecretKey) -> Result<RootSignature> {
    let scheme = scheme_by_id(&secret.scheme_id)?;
    Ok(RootSignature {
        scheme_id: secret.scheme_id.clone(),
        bytes: scheme.sign(&secret.bytes, message)?,
    })
}

pub fn verify_bytes(message: &[u8], sig: &RootSignature, public: &PublicKey) -> bool {
    if sig.scheme_id != public.scheme_id {
        return false;
    }
    match scheme_by_id(&sig.scheme_id) {
        Ok(scheme) => scheme.verify(&public.bytes, message, &sig.bytes),
        Err(_) => false,
    }
}

/// Sign the raw bytes of `digest`.
pub fn sign_digest(digest: &Digest, secret: &SecretKey) -> Result<RootSignature> {
    sign_bytes(digest.as_bytes(), secret)
}

pub fn verify_digest(digest: &Digest, sig: &RootSignature, public: &PublicKey) -> bool {
    verify_bytes(digest.as_bytes(), sig, public)
}

fn encode_key_file(scheme_id: &str, bytes: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(scheme_id.len() + 1 + bytes.len());
    out.extend_from_slice(scheme_id.as_bytes());
    out.push(b'\n');
    out.extend_from_slice(bytes);
    out
}

fn decode_key_file(data: &[u8]) -> Result<(String, Vec<u8>)> {
    let nl = data
        .iter()
        .position(|&b| b == b'\n')
        .ok_or(DecodeError::KeyHeader)?;
    let scheme_id = std::str::from_utf8(&data[..nl]).map_err(|_| DecodeError::KeyHeader)?;
    let scheme = scheme_by_id(scheme_id)?;
    Ok((scheme.id().to_string(), data[nl + 1..].to_vec()))
}

impl SecretKey {
    pub fn to_file_bytes(&self) -> Vec<u8> {
        encode_key_file(&self.scheme_id, &self.bytes)
    }

    pub fn from_file_bytes(data: &[u8]) -> Result<Self> {
        let (scheme_id, bytes) = decode_key_file(data)?;
        let key = SecretKey { scheme_id, bytes };
        // Reject keys the scheme cannot use.
        scheme_by_id(&key.scheme_id)?.public_from_secret(&key.bytes)?;
        Ok(key)
    }
}

impl PublicKey {
    pub fn to_file_bytes(&self) -> Vec<u8> {
        encode_key_file(&self.scheme_id, &self.bytes)
    }

    pub fn from_file_bytes(data: &[u8]) -> Result<Self> {
        let (scheme_id, bytes) = decode_key_file(data)?;
        Ok(PublicKey { scheme_id, bytes })
    }
}
