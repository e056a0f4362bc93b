//! Theory operator signatures.
//!
//! One static table covers the core Boolean operators, linear integer
//! arithmetic, bitvectors and strings. Extending a theory means adding rows
//! here and a case to the evaluator; [`crate::ir::Term`] never changes.

use std::fmt;

use super::Sort;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theory {
    Core,
    Ints,
    BitVecs,
    Strings,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Not,
    And,
    Or,
    Implies,
    Xor,
    Eq,
    Distinct,
    Ite,
    Add,
    Sub,
    Mul,
    Lt,
    Le,
    Gt,
    Ge,
    BvNot,
    BvNeg,
    BvAnd,
    BvOr,
    BvXor,
    BvAdd,
    BvSub,
    BvMul,
    BvShl,
    BvLshr,
    BvAshr,
    BvUlt,
    BvUle,
    BvUgt,
    BvUge,
    BvSlt,
    BvSle,
    BvSgt,
    BvSge,
    StrConcat,
    StrLen,
    StrAt,
    StrSubstr,
    StrPrefixOf,
    StrSuffixOf,
    StrContains,
    StrIndexOf,
    StrReplace,
    StrToInt,
    IntToStr,
}

/// Sort pattern used in signatures. `Bv` binds one width per application and
/// `Any` binds one sort per application.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pat {
    Int,
    Bool,
    Str,
    Bv,
    Any,
}

#[derive(Clone, Copy, Debug)]
enum Args {
    Fixed(&'static [Pat]),
    /// At least `min` arguments, all matching the pattern.
    Variadic(usize, Pat),
}

struct OpInfo {
    op: Op,
    names: &'static [&'static str],
    theory: Theory,
    args: Args,
    ret: Pat,
}

use Args::{Fixed, Variadic};
use Pat::{Any, Bool, Bv, Int, Str};

const TABLE: &[OpInfo] = &[
    OpInfo { op: Op::Not, names: &["not"], theory: Theory::Core, args: Fixed(&[Bool]), ret: Bool },
    OpInfo { op: Op::And, names: &["and"], theory: Theory::Core, args: Variadic(1, Bool), ret: Bool },
    OpInfo { op: Op::Or, names: &["or"], theory: Theory::Core, args: Variadic(1, Bool), ret: Bool },
    OpInfo { op: Op::Implies, names: &["=>"], theory: Theory::Core, args: Fixed(&[Bool, Bool]), ret: Bool },
    OpInfo { op: Op::Xor, names: &["xor"], theory: Theory::Core, args: Fixed(&[Bool, Bool]), ret: Bool },
    OpInfo { op: Op::Eq, names: &["="], theory: Theory::Core, args: Variadic(2, Any), ret: Bool },
    OpInfo { op: Op::Distinct, names: &["distinct"], theory: Theory::Core, args: Variadic(2, Any), ret: Bool },
    OpInfo { op: Op::Ite, names: &["ite"], theory: Theory::Core, args: Fixed(&[Bool, Any, Any]), ret: Any },
    OpInfo { op: Op::Add, names: &["+"], theory: Theory::Ints, args: Variadic(2, Int), ret: Int },
    OpInfo { op: Op::Sub, names: &["-"], theory: Theory::Ints, args: Variadic(1, Int), ret: Int },
    OpInfo { op: Op::Mul, names: &["*"], theory: Theory::Ints, args: Variadic(2, Int), ret: Int },
    OpInfo { op: Op::Lt, names: &["<"], theory: Theory::Ints, args: Fixed(&[Int, Int]), ret: Bool },
    OpInfo { op: Op::Le, names: &["<="], theory: Theory::Ints, args: Fixed(&[Int, Int]), ret: Bool },
    OpInfo { op: Op::Gt, names: &[">"], theory: Theory::Ints, args: Fixed(&[Int, Int]), ret: Bool },
    OpInfo { op: Op::Ge, names: &[">="], theory: Theory::Ints, args: Fixed(&[Int, Int]), ret: Bool },
    OpInfo { op: Op::BvNot, names: &["bvnot"], theory: Theory::BitVecs, args: Fixed(&[Bv]), ret: Bv },
    OpInfo { op: Op::BvNeg, names: &["bvneg"], theory: Theory::BitVecs, args: Fixed(&[Bv]), ret: Bv },
    OpInfo { op: Op::BvAnd, names: &["bvand"], theory: Theory::BitVecs, args: Fixed(&[Bv, Bv]), ret: Bv },
    OpInfo { op: Op::BvOr, names: &["bvor"], theory: Theory::BitVecs, args: Fixed(&[Bv, Bv]), ret: Bv },
    OpInfo { op: Op::BvXor, names: &["bvxor"], theory: Theory::BitVecs, args: Fixed(&[Bv, Bv]), ret: Bv },
    OpInfo { op: Op::BvAdd, names: &["bvadd"], theory: Theory::BitVecs, args: Fixed(&[Bv, Bv]), ret: Bv },
    OpInfo { op: Op::BvSub, names: &["bvsub"], theory: Theory::BitVecs, args: Fixed(&[Bv, Bv]), ret: Bv },
    OpInfo { op: Op::BvMul, names: &["bvmul"], theory: Theory::BitVecs, args: Fixed(&[Bv, Bv]), ret: Bv },
    OpInfo { op: Op::BvShl, names: &["bvshl"], theory: Theory::BitVecs, args: Fixed(&[Bv, Bv]), ret: Bv },
    OpInfo { op: Op::BvLshr, names: &["bvlshr"], theory: Theory::BitVecs, args: Fixed(&[Bv, Bv]), ret: Bv },
    OpInfo { op: Op::BvAshr, names: &["bvashr"], theory: Theory::BitVecs, args: Fixed(&[Bv, Bv]), ret: Bv },
    OpInfo { op: Op::BvUlt, names: &["bvult"], theory: Theory::BitVecs, args: Fixed(&[Bv, Bv]), ret: Bool },
    OpInfo { op: Op::BvUle, names: &["bvule"], theory: Theory::BitVecs, args: Fixed(&[Bv, Bv]), ret: Bool },
    OpInfo { op: Op::BvUgt, names: &["bvugt"], theory: Theory::BitVecs, args: Fixed(&[Bv, Bv]), ret: Bool },
    OpInfo { op: Op::BvUge, names: &["bvuge"], theory: Theory::BitVecs, args: Fixed(&[Bv, Bv]), ret: Bool },
    OpInfo { op: Op::BvSlt, names: &["bvslt"], theory: Theory::BitVecs, args: Fixed(&[Bv, Bv]), ret: Bool },
    OpInfo { op: Op::BvSle, names: &["bvsle"], theory: Theory::BitVecs, args: Fixed(&[Bv, Bv]), ret: Bool },
    OpInfo { op: Op::BvSgt, names: &["bvsgt"], theory: Theory::BitVecs, args: Fixed(&[Bv, Bv]), ret: Bool },
    OpInfo { op: Op::BvSge, names: &["bvsge"], theory: Theory::BitVecs, args: Fixed(&[Bv, Bv]), ret: Bool },
    OpInfo { op: Op::StrConcat, names: &["str.++"], theory: Theory::Strings, args: Variadic(2, Str), ret: Str },
    OpInfo { op: Op::StrLen, names: &["str.len"], theory: Theory::Strings, args: Fixed(&[Str]), ret: Int },
    OpInfo { op: Op::StrAt, names: &["str.at"], theory: Theory::Strings, args: Fixed(&[Str, Int]), ret: Str },
    OpInfo { op: Op::StrSubstr, names: &["str.substr"], theory: Theory::Strings, args: Fixed(&[Str, Int, Int]), ret: Str },
    OpInfo { op: Op::StrPrefixOf, names: &["str.prefixof"], theory: Theory::Strings, args: Fixed(&[Str, Str]), ret: Bool },
    OpInfo { op: Op::StrSuffixOf, names: &["str.suffixof"], theory: Theory::Strings, args: Fixed(&[Str, Str]), ret: Bool },
    OpInfo { op: Op::StrContains, names: &["str.contains"], theory: Theory::Strings, args: Fixed(&[Str, Str]), ret: Bool },
    OpInfo { op: Op::StrIndexOf, names: &["str.indexof"], theory: Theory::Strings, args: Fixed(&[Str, Str, Int]), ret: Int },
    OpInfo { op: Op::StrReplace, names: &["str.replace"], theory: Theory::Strings, args: Fixed(&[Str, Str, Str]), ret: Str },
    OpInfo { op: Op::StrToInt, names: &["str.to.int", "str.to_int"], theory: Theory::Strings, args: Fixed(&[Str]), ret: Int },
    OpInfo { op: Op::IntToStr, names: &["int.to.str", "str.from_int"], theory: Theory::Strings, args: Fixed(&[Int]), ret: Str },
];

fn info(op: Op) -> &'static OpInfo {
    TABLE.iter().find(|i| i.op == op).expect("every op has a table row")
}

impl Op {
    /// Looks up an operator by its concrete-syntax name.
    pub fn from_name(name: &str) -> Option<Op> {
        TABLE.iter().find(|i| i.names.contains(&name)).map(|i| i.op)
    }

    pub fn name(self) -> &'static str {
        info(self).names[0]
    }

    pub fn theory(self) -> Theory {
        info(self).theory
    }

    pub fn all() -> impl Iterator<Item = Op> {
        TABLE.iter().map(|i| i.op)
    }

    /// Result sort of applying `self` to arguments of the given sorts, or a
    /// description of the mismatch.
    pub fn result_sort(self, args: &[Sort]) -> Result<Sort, String> {
        let info = info(self);
        let pats: Vec<Pat> = match info.args {
            Fixed(p) => {
                if p.len() != args.len() {
                    return Err(format!("`{}` expects {} arguments, got {}", self, p.len(), args.len()));
                }
                p.to_vec()
            }
            Variadic(min, p) => {
                if args.len() < min {
                    return Err(format!("`{}` expects at least {} arguments, got {}", self, min, args.len()));
                }
                vec![p; args.len()]
            }
        };
        let mut width = None;
        let mut any = None;
        for (i, (pat, &sort)) in pats.iter().zip(args).enumerate() {
            let ok = match (pat, sort) {
                (Int, Sort::Int) | (Bool, Sort::Bool) | (Str, Sort::String) => true,
                (Bv, Sort::BitVec(w)) => *width.get_or_insert(w) == w,
                (Any, s) => *any.get_or_insert(s) == s,
                _ => false,
            };
            if !ok {
                return Err(format!("argument {} of `{}` has unexpected sort {}", i + 1, self, sort));
            }
        }
        Ok(match info.ret {
            Int => Sort::Int,
            Bool => Sort::Bool,
            Str => Sort::String,
            Bv => Sort::BitVec(width.expect("bitvector result needs a bitvector argument")),
            Any => any.expect("polymorphic result needs a polymorphic argument"),
        })
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for op in Op::all() {
            assert_eq!(Op::from_name(op.name()), Some(op));
        }
        assert_eq!(Op::from_name("str.to_int"), Some(Op::StrToInt));
        assert_eq!(Op::from_name("div"), None);
    }

    #[test]
    fn signatures() {
        assert_eq!(Op::Sub.result_sort(&[Sort::Int]), Ok(Sort::Int));
        assert_eq!(Op::Ite.result_sort(&[Sort::Bool, Sort::String, Sort::String]), Ok(Sort::String));
        assert!(Op::Ite.result_sort(&[Sort::Bool, Sort::Int, Sort::String]).is_err());
        assert_eq!(
            Op::BvAdd.result_sort(&[Sort::BitVec(64), Sort::BitVec(64)]),
            Ok(Sort::BitVec(64))
        );
        assert!(Op::BvAdd.result_sort(&[Sort::BitVec(64), Sort::BitVec(32)]).is_err());
        assert!(Op::Add.result_sort(&[Sort::Int]).is_err());
        assert!(Op::StrAt.result_sort(&[Sort::String, Sort::String]).is_err());
    }
}
