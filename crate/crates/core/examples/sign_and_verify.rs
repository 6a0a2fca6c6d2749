//! Sign a message, quote part of it, and verify the quote.

use qsig::{quoter, sigscheme, tokenizer, verifier, IndexSet};

fn main() -> qsig::Result<()> {
    let key = sigscheme::keygen(sigscheme::ED25519, &mut rand::rngs::OsRng)?;

    let text = "Alice said that the meeting is moved to Thursday at noon";
    let message = tokenizer::tokenize(text)?;
    let full = quoter::sign(&message, &key.secret)?;
    println!("signed {} tokens", full.n);

    let picked = IndexSet::from_range(5..8)?;
    let quote_sig = quoter::quote(&message, &picked, &full)?;
    let quoted = message.select(&picked)?;

    let report = verifier::verify(&quoted, &quote_sig, &key.public);
    let rendered =
        tokenizer::render_quote(quoted.tokens(), &report.gaps, tokenizer::DEFAULT_MARKER);
    println!("quote:  {}", String::from_utf8_lossy(&rendered));
    println!("path:   {} hashes", quote_sig.path.len());
    println!("report: {}", report.to_json());

    // Changing a word breaks the signature.
    let forged = tokenizer::tokenize("moved to Friday")?;
    let bad = verifier::verify(&forged, &quote_sig, &key.public);
    println!(
        "forged: valid = {}, reason = {:?}",
        bad.valid,
        bad.failure.map(|f| f.code())
    );
    Ok(())
}
