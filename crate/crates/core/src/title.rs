//! Page title normalization.

/// Normalizes a MediaWiki page title.
///
/// Underscores become spaces, whitespace runs collapse to a single space,
/// leading and trailing whitespace is dropped and the first character is
/// upper-cased (the `first-letter` case rule used by Wikipedia).
pub fn normalize_title(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    for c in raw.chars() {
        let c = if c == '_' { ' ' } else { c };
        if c.is_whitespace() {
            pending_space = !out.is_empty();
            continue;
        }
        if pending_space {
            out.push(' ');
            pending_space = false;
        }
        if out.is_empty() {
            out.extend(c.to_uppercase());
        } else {
            out.push(c);
        }
    }
    out
}
