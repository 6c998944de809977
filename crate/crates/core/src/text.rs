//! String helpers that work in Unicode scalar offsets.
//!
//! Every offset in corpora and sidecars counts `char`s, not bytes, so slicing
//! goes through these helpers.

use std::ops::Range;

use unicode_normalization::{is_nfc, UnicodeNormalization};

/// Number of Unicode scalar values in `s`.
pub fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Byte offset of the `char_idx`-th scalar value, or `None` if out of range.
/// `char_idx == char_len(s)` maps to `s.len()`.
pub fn byte_offset(s: &str, char_idx: usize) -> Option<usize> {
    if char_idx == 0 {
        return Some(0);
    }
    let mut seen = 0;
    for (byte, _) in s.char_indices() {
        if seen == char_idx {
            return Some(byte);
        }
        seen += 1;
    }
    (seen == char_idx).then_some(s.len())
}

/// Substring over a character range.
pub fn char_slice(s: &str, range: Range<usize>) -> Option<&str> {
    if range.start > range.end {
        return None;
    }
    let start = byte_offset(s, range.start)?;
    let len = byte_offset(&s[start..], range.end - range.start)?;
    Some(&s[start..start + len])
}

/// Returns `s` with the characters in `range` replaced by `replacement`.
pub fn replace_chars(s: &str, range: Range<usize>, replacement: &str) -> Option<String> {
    if range.start > range.end {
        return None;
    }
    let start = byte_offset(s, range.start)?;
    let end = start + byte_offset(&s[start..], range.end - range.start)?;
    let mut out = String::with_capacity(s.len() - (end - start) + replacement.len());
    out.push_str(&s[..start]);
    out.push_str(replacement);
    out.push_str(&s[end..]);
    Some(out)
}

/// Character offset corresponding to a byte offset, or `None` if the byte
/// offset does not fall on a character boundary.
pub fn char_offset_of_byte(s: &str, byte: usize) -> Option<usize> {
    if !s.is_char_boundary(byte) {
        return None;
    }
    Some(s[..byte].chars().count())
}

pub fn nfc(s: &str) -> String {
    if is_nfc(s) {
        s.to_owned()
    } else {
        s.nfc().collect()
    }
}

pub fn is_normalized(s: &str) -> bool {
    is_nfc(s)
}

/// Copies the initial capitalization of `model` onto `word`.
pub fn match_initial_case(model: &str, word: &str) -> String {
    let starts_upper = model.chars().next().is_some_and(char::is_uppercase);
    if !starts_upper {
        return word.to_owned();
    }
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}
