//! Word tokenization shared by the gender classifier and the news scorer.

/// Splits `text` into word tokens on every non-alphanumeric character.
///
/// Tokens are returned as slices of the input in their original case.
pub fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
}

/// Lower-cases a token, avoiding an allocation for ASCII lower-case input.
pub(crate) fn lower(token: &str) -> std::borrow::Cow<'_, str> {
    if token.chars().all(|c| !c.is_uppercase()) {
        std::borrow::Cow::Borrowed(token)
    } else {
        std::borrow::Cow::Owned(token.to_lowercase())
    }
}
