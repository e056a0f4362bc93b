use std::fmt;

/// Largest bitvector width the evaluator supports (values are stored in a `u64`).
pub const MAX_BV_WIDTH: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Int,
    Bool,
    String,
    BitVec(u32),
}

impl Sort {
    pub fn bv(width: u32) -> Option<Sort> {
        (1..=MAX_BV_WIDTH).contains(&width).then_some(Sort::BitVec(width))
    }

    pub fn is_bv(self) -> bool {
        matches!(self, Sort::BitVec(_))
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Int => f.write_str("Int"),
            Sort::Bool => f.write_str("Bool"),
            Sort::String => f.write_str("String"),
            Sort::BitVec(w) => write!(f, "(BitVec {w})"),
        }
    }
}
