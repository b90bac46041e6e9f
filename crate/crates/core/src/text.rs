//! Tokenization shared by orientation tagging and the language metrics.

/// Lowercases `text` and splits it on every non-alphanumeric character.
///
/// `@handle` and `#tag` lose their sigil and keep their alphanumeric runs, so
/// punctuation between tokens never changes the token sequence.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for piece in text.split(|c: char| !c.is_alphanumeric()) {
        if !piece.is_empty() {
            out.push(piece.to_lowercase());
        }
    }
    out
}
