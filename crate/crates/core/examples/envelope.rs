//! Write and read back a `.qsig` envelope.
//!
//! Uses a fixed seed so the output is reproducible.

use qsig::{codec, quoter, sigscheme, tokenizer, IndexSet};
use rand::SeedableRng;

fn main() -> qsig::Result<()> {
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
    let key = sigscheme::keygen(sigscheme::ED25519, &mut rng)?;
    let message = tokenizer::tokenize("The quick brown fox jumps over the dog")?;
    let full = quoter::sign(&message, &key.secret)?;
    let sig = quoter::quote(&message, &IndexSet::from_indices([4])?, &full)?;

    let bytes = codec::encode(&sig);
    print!("{}", String::from_utf8_lossy(&bytes));
    eprintln!("public key: {}", hex(&key.public.bytes));
    eprint!("{}", codec::describe(&codec::decode(&bytes)?));
    Ok(())
}

fn hex(b: &[u8]) -> String {
    b.iter().map(|x| format!("{x:02x}")).collect()
}
