//! Which node labels end up in a quote signature, on the eight-word example.
//!
//! Prints the tree level by level, then the required nodes for two quotes.

use qsig::hash::Sha256Hash;
use qsig::merkle::{build_tree, NodeKind};
use qsig::quoter::mark_flags;
use qsig::tokenizer::tokenize;
use qsig::IndexSet;

fn main() -> qsig::Result<()> {
    let message = tokenize("The quick brown fox jumps over the dog")?;
    let tree = build_tree(&message, &Sha256Hash);
    let shape = tree.shape();

    for id in 0..shape.node_count() {
        let node = shape.node(id);
        let what = match node.kind {
            NodeKind::Leaf { token } => {
                format!(
                    "leaf {:?}",
                    String::from_utf8_lossy(message.tokens()[token].as_bytes())
                )
            }
            NodeKind::Internal { .. } => format!("covers {:?}", node.span),
        };
        println!(
            "u({},{})  {}…  {}",
            node.level,
            node.position,
            &tree.label(id).unwrap().to_hex()[..12],
            what
        );
    }

    for picked in [IndexSet::from_indices([4])?, IndexSet::from_range(0..2)?] {
        let flags = mark_flags(shape, &picked)?;
        let required: Vec<String> = flags
            .required_inorder(shape)
            .into_iter()
            .map(|id| format!("u({},{})", shape.node(id).level, shape.node(id).position))
            .collect();
        println!(
            "quote {}: {}",
            picked.display_ranges(","),
            required.join(" ")
        );
    }
    Ok(())
}
