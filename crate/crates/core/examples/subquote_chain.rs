//! Quote a quote, then quote that, without the secret key.

use qsig::{quoter, sigscheme, tokenizer, verifier, IndexSet};

fn main() -> qsig::Result<()> {
    let key = sigscheme::keygen(sigscheme::ED25519, &mut rand::rngs::OsRng)?;
    let message = tokenizer::tokenize(
        "we choose to go to the moon in this decade and do the other things \
         not because they are easy but because they are hard",
    )?;
    let mut sig = quoter::sign(&message, &key.secret)?;
    let mut tokens = message.clone();

    // Each step picks positions relative to the current quote.
    let steps = [
        IndexSet::from_ranges([0..12, 14..19])?,
        IndexSet::from_range(0..6)?,
        IndexSet::from_indices([2, 5])?,
    ];
    for sub in steps {
        sig = quoter::subquote(&tokens, &sig, &sub)?;
        tokens = tokens.select(&sub)?;
        let report = verifier::verify(&tokens, &sig, &key.public);
        let text =
            tokenizer::render_quote(tokens.tokens(), &report.gaps, tokenizer::DEFAULT_MARKER);
        println!(
            "{:<5} {:>2} hashes  {}",
            if report.valid { "ok" } else { "FAIL" },
            sig.path.len(),
            String::from_utf8_lossy(&text)
        );
    }
    Ok(())
}
