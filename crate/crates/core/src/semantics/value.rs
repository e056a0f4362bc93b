use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::ir::Sort;

/// A fixed-width bitvector. The payload is always masked to `width` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    width: u32,
    bits: u64,
}

impl BitVec {
    /// Builds a canonical bitvector; bits above `width` are dropped.
    ///
    /// Panics if `width` is outside `1..=64`; sorts are validated before values exist.
    pub fn new(width: u32, bits: u64) -> Self {
        assert!((1..=64).contains(&width), "bitvector width {width} out of range");
        BitVec { width, bits: bits & Self::mask(width) }
    }

    pub fn mask(width: u32) -> u64 {
        if width >= 64 {
            u64::MAX
        } else {
            (1u64 << width) - 1
        }
    }

    pub fn width(self) -> u32 {
        self.width
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    /// Two's-complement reading of the payload.
    pub fn signed(self) -> i64 {
        let shift = 64 - self.width;
        ((self.bits << shift) as i64) >> shift
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(BigInt),
    Bool(bool),
    Str(Arc<str>),
    BitVec(BitVec),
}

impl Value {
    pub fn int(n: i64) -> Value {
        Value::Int(BigInt::from(n))
    }

    pub fn str(s: &str) -> Value {
        Value::Str(Arc::from(s))
    }

    pub fn bv(width: u32, bits: u64) -> Value {
        Value::BitVec(BitVec::new(width, bits))
    }

    pub fn sort(&self) -> Sort {
        match self {
            Value::Int(_) => Sort::Int,
            Value::Bool(_) => Sort::Bool,
            Value::Str(_) => Sort::String,
            Value::BitVec(b) => Sort::BitVec(b.width),
        }
    }

    /// The value every sort is seeded with before any counterexample exists.
    pub fn default_for(sort: Sort) -> Value {
        match sort {
            Sort::Int => Value::int(0),
            Sort::Bool => Value::Bool(false),
            Sort::String => Value::str(""),
            Sort::BitVec(w) => Value::bv(w, 0),
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_bv(&self) -> Option<BitVec> {
        match self {
            Value::BitVec(b) => Some(*b),
            _ => None,
        }
    }

    /// SMT-LIB rendering, where negative integers are written `(- n)`.
    pub fn to_smtlib(&self) -> String {
        match self {
            Value::Int(n) if n.is_negative() => format!("(- {})", n.abs()),
            other => other.to_string(),
        }
    }
}

/// Escapes a string for SMT-LIB 2.6 literals: `"` doubles, non-printable
/// characters become `\u{..}`.
pub fn quote_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\"\""),
            ' '..='~' => out.push(c),
            _ => out.push_str(&format!("\\u{{{:x}}}", c as u32)),
        }
    }
    out.push('"');
    out
}

/// SyGuS literal syntax. Negative integers print as a single `-n` token, which
/// the frontend reads back as a literal.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Str(s) => f.write_str(&quote_string(s)),
            Value::BitVec(b) => {
                if b.width % 4 == 0 {
                    let digits = (b.width / 4) as usize;
                    write!(f, "#x{:0digits$x}", b.bits)
                } else {
                    let digits = b.width as usize;
                    write!(f, "#b{:0digits$b}", b.bits)
                }
            }
        }
    }
}
