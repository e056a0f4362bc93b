//! SMT-LIB string operations, totalized the way the SMT-LIB strings theory
//! does it. Positions count characters, not bytes.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Index arguments beyond `usize` are out of range for every string.
fn to_index(i: &BigInt) -> Option<usize> {
    if i.is_negative() {
        None
    } else {
        i.to_usize()
    }
}

fn find<T: PartialEq>(hay: &[T], needle: &[T], from: usize) -> Option<usize> {
    if needle.is_empty() {
        return (from <= hay.len()).then_some(from);
    }
    if needle.len() > hay.len() {
        return None;
    }
    (from..=hay.len() - needle.len()).find(|&i| &hay[i..i + needle.len()] == needle)
}

fn chars(s: &str) -> Vec<char> {
    s.chars().collect()
}

pub fn len(s: &str) -> BigInt {
    if s.is_ascii() {
        BigInt::from(s.len())
    } else {
        BigInt::from(s.chars().count())
    }
}

pub fn concat(parts: &[&str]) -> Arc<str> {
    Arc::from(parts.concat())
}

/// `str.at`: the one-character string at `i`, or `""` out of range.
pub fn at(s: &str, i: &BigInt) -> Arc<str> {
    substr(s, i, &BigInt::from(1))
}

/// `str.substr s i n`: up to `n` characters from `i`; `""` when `i` is outside
/// `[0, len)` or `n <= 0`.
pub fn substr(s: &str, i: &BigInt, n: &BigInt) -> Arc<str> {
    let (Some(i), false) = (to_index(i), n.is_negative() || n.is_zero()) else {
        return Arc::from("");
    };
    let n = n.to_usize().unwrap_or(usize::MAX);
    if s.is_ascii() {
        if i >= s.len() {
            return Arc::from("");
        }
        let end = i.saturating_add(n).min(s.len());
        Arc::from(&s[i..end])
    } else {
        let cs = chars(s);
        if i >= cs.len() {
            return Arc::from("");
        }
        let end = i.saturating_add(n).min(cs.len());
        Arc::from(cs[i..end].iter().collect::<String>())
    }
}

pub fn prefix_of(prefix: &str, s: &str) -> bool {
    s.starts_with(prefix)
}

pub fn suffix_of(suffix: &str, s: &str) -> bool {
    s.ends_with(suffix)
}

pub fn contains(s: &str, t: &str) -> bool {
    s.contains(t)
}

/// `str.indexof s t i`: first occurrence of `t` in `s` at or after `i`, or
/// -1. An empty `t` is found at `i` itself when `0 <= i <= len(s)`.
pub fn index_of(s: &str, t: &str, i: &BigInt) -> BigInt {
    let Some(i) = to_index(i) else {
        return BigInt::from(-1);
    };
    let found = if s.is_ascii() && t.is_ascii() {
        find(s.as_bytes(), t.as_bytes(), i)
    } else {
        let cs = chars(s);
        if i > cs.len() {
            None
        } else {
            find(&cs, &chars(t), i)
        }
    };
    found.map_or_else(|| BigInt::from(-1), BigInt::from)
}

/// `str.replace s t u`: replaces the first occurrence of `t`. An empty `t`
/// occurs at position 0, so `u` is prepended.
pub fn replace(s: &str, t: &str, u: &str) -> Arc<str> {
    match s.find(t) {
        Some(pos) => {
            let mut out = String::with_capacity(s.len() + u.len());
            out.push_str(&s[..pos]);
            out.push_str(u);
            out.push_str(&s[pos + t.len()..]);
            Arc::from(out)
        }
        None => Arc::from(s),
    }
}

/// `str.to.int`: the decimal value of a non-empty digit string, else -1.
pub fn to_int(s: &str) -> BigInt {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return BigInt::from(-1);
    }
    s.parse().expect("digit string parses")
}

/// `int.to.str`: decimal digits of a non-negative integer, else `""`.
pub fn from_int(n: &BigInt) -> Arc<str> {
    if n.is_negative() {
        Arc::from("")
    } else {
        Arc::from(n.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn totalized_edges() {
        assert_eq!(&*at("abc", &b(3)), "");
        assert_eq!(&*at("abc", &b(-1)), "");
        assert_eq!(&*substr("abc", &b(1), &b(10)), "bc");
        assert_eq!(&*substr("abc", &b(1), &b(0)), "");
        assert_eq!(&*substr("abc", &b(3), &b(1)), "");
        assert_eq!(index_of("abc", "z", &b(0)), b(-1));
        assert_eq!(index_of("abc", "", &b(3)), b(3));
        assert_eq!(index_of("abc", "", &b(4)), b(-1));
        assert_eq!(index_of("abc", "a", &b(-1)), b(-1));
        assert_eq!(to_int("12a"), b(-1));
        assert_eq!(to_int(""), b(-1));
        assert_eq!(to_int("007"), b(7));
        assert_eq!(&*from_int(&b(-3)), "");
        assert_eq!(&*replace("aXbX", "X", "-"), "a-bX");
        assert_eq!(&*replace("ab", "", "-"), "-ab");
    }

    #[test]
    fn non_ascii_counts_characters() {
        assert_eq!(len("héllo"), b(5));
        assert_eq!(&*at("héllo", &b(1)), "é");
        assert_eq!(index_of("héllo", "l", &b(0)), b(2));
    }
}
