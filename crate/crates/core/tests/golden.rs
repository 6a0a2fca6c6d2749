//! Byte-exact envelope for quoting "jumps" from the eight-word sentence with
//! a key derived from seed 7. The fixture was checked with an independent
//! Python script (hashlib plus an Ed25519 verifier).

use qsig::{codec, quoter, sigscheme, tokenizer, verifier, IndexSet};
use rand::SeedableRng;

const FIXTURE: &[u8] = include_bytes!("fixtures/sentence_jumps.qsig");
const PUBLIC_HEX: &str = "10a1860ee01fa0dad17543b41fa56f4e098708100019f5f7cec1fc59b2cc0fec";

fn key() -> sigscheme::KeyPair {
    sigscheme::keygen(
        sigscheme::ED25519,
        &mut rand_chacha::ChaCha20Rng::seed_from_u64(7),
    )
    .unwrap()
}

#[test]
fn encoder_reproduces_fixture() {
    let kp = key();
    let hex: String = kp.public.bytes.iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(hex, PUBLIC_HEX);
    let message = tokenizer::tokenize("The quick brown fox jumps over the dog").unwrap();
    let full = quoter::sign(&message, &kp.secret).unwrap();
    let sig = quoter::quote(&message, &IndexSet::from_indices([4]).unwrap(), &full).unwrap();
    assert_eq!(
        String::from_utf8(codec::encode(&sig)).unwrap(),
        String::from_utf8(FIXTURE.to_vec()).unwrap()
    );
}

#[test]
fn fixture_decodes_and_verifies() {
    let sig = codec::decode(FIXTURE).unwrap();
    assert_eq!(sig.n, 8);
    assert_eq!(sig.path.len(), 3);
    assert_eq!(codec::encode(&sig), FIXTURE);
    let quote =
        tokenizer::strip_markers(&tokenizer::WhitespaceTokenizer, "[…] jumps […]", "[…]").unwrap();
    let report = verifier::verify(&quote, &sig, &key().public);
    assert!(report.valid);
    assert_eq!(
        report.to_json(),
        r#"{"valid":true,"reason":null,"detail":null,"n":8,"indices":[[4,5]],"contiguous":true,"gaps":[{"position":0,"missing":4},{"position":5,"missing":3}],"signer_scheme":"ed25519","hash_id":"sha-256","tokenizer_id":"ws-v1"}"#
    );
}
