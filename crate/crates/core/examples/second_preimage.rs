//! Why leaves and internal nodes are hashed with different prefixes.
//!
//! Without prefixes, the hash of an internal node is just the hash of the
//! concatenated child labels, so a single token spelling out those labels
//! produces the same root. With the 0x00/0x01 prefixes it does not.

use qsig::hash::{Sha256Hash, TreeHash};
use qsig::merkle::{build_tree, TreeShape};
use qsig::tokenizer::tokenize;
use qsig::{Token, TokenSequence};

fn unmasked_root(tokens: &TokenSequence) -> Vec<u8> {
    fn go(h: &Sha256Hash, toks: &[Token]) -> Vec<u8> {
        if toks.len() == 1 {
            return h.hash_parts(&[toks[0].as_bytes()]).as_bytes().to_vec();
        }
        let (a, _) = qsig::merkle::split_point(toks.len());
        let (l, r) = (go(h, &toks[..a]), go(h, &toks[a..]));
        h.hash_parts(&[&l, &r]).as_bytes().to_vec()
    }
    go(&Sha256Hash, tokens.tokens())
}

fn main() -> qsig::Result<()> {
    let h = Sha256Hash;
    let original = tokenize("The quick brown fox jumps over the dog")?;

    let mut glued = h.hash_parts(&[b"the"]).as_bytes().to_vec();
    glued.extend_from_slice(h.hash_parts(&[b"dog"]).as_bytes());
    let mut tokens = original.tokens()[..6].to_vec();
    tokens.push(Token::new(glued)?);
    let attack = TokenSequence::new(tokens)?;

    println!(
        "original: {} tokens, attack: {} tokens",
        original.len(),
        attack.len()
    );
    println!(
        "attack tree depths: {:?}",
        TreeShape::new(attack.len())?.leaf_depths()
    );

    let same = unmasked_root(&original) == unmasked_root(&attack);
    println!("without prefixes the roots are equal: {same}");

    let a = build_tree(&original, &h);
    let b = build_tree(&attack, &h);
    println!(
        "with prefixes the roots are equal: {}",
        a.root_digest()? == b.root_digest()?
    );
    Ok(())
}
