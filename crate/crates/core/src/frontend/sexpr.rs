//! SMT-LIB surface syntax: tokens and s-expressions with source positions.

use std::fmt;

use num_bigint::BigInt;

use super::FrontendError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Symbol(String),
    /// Decimal numeral; a leading `-` is accepted as a negative literal.
    Int(BigInt),
    Str(String),
    /// Hex digits of `#x...`; the bit width is four times the digit count.
    Hex(String),
    /// Binary digits of `#b...`.
    Bin(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SExpr {
    Atom(Atom, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn symbol(&self) -> Option<&str> {
        match self {
            SExpr::Atom(Atom::Symbol(s), _) => Some(s),
            _ => None,
        }
    }

    pub fn list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            _ => None,
        }
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(a, _) => match a {
                Atom::Symbol(s) => f.write_str(s),
                Atom::Int(n) => write!(f, "{n}"),
                Atom::Str(s) => f.write_str(&crate::semantics::quote_string(s)),
                Atom::Hex(h) => write!(f, "#x{h}"),
                Atom::Bin(b) => write!(f, "#b{b}"),
            },
            SExpr::List(items, _) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

fn is_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c)
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.chars().peekable(), line: 1, col: 1 }
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, pos: Pos, msg: impl Into<String>) -> FrontendError {
        FrontendError::Lex { line: pos.line, col: pos.col, msg: msg.into() }
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn string(&mut self, start: Pos) -> Result<String, FrontendError> {
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err(start, "unterminated string literal")),
                Some('"') => {
                    if self.chars.peek() == Some(&'"') {
                        self.bump();
                        out.push('"');
                    } else {
                        return Ok(out);
                    }
                }
                Some('\\') if self.chars.peek() == Some(&'u') => {
                    self.bump();
                    out.push(self.unicode_escape(start)?);
                }
                Some(c) => out.push(c),
            }
        }
    }

    /// `\u{h..}` or `\uhhhh`, the leading `\u` already consumed.
    fn unicode_escape(&mut self, start: Pos) -> Result<char, FrontendError> {
        let mut digits = String::new();
        if self.chars.peek() == Some(&'{') {
            self.bump();
            while let Some(c) = self.bump() {
                if c == '}' {
                    break;
                }
                digits.push(c);
            }
        } else {
            for _ in 0..4 {
                digits.extend(self.bump());
            }
        }
        u32::from_str_radix(&digits, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| self.err(start, format!("bad unicode escape `\\u{digits}`")))
    }

    fn word(&mut self) -> String {
        let mut out = String::new();
        while let Some(&c) = self.chars.peek() {
            if is_symbol_char(c) || c == '#' {
                out.push(c);
                self.bump();
            } else {
                break;
            }
        }
        out
    }

    fn atom(&mut self) -> Result<SExpr, FrontendError> {
        let pos = self.pos();
        let c = *self.chars.peek().expect("atom called at end of input");
        if c == '"' {
            self.bump();
            return Ok(SExpr::Atom(Atom::Str(self.string(pos)?), pos));
        }
        if c == '|' {
            self.bump();
            let mut s = String::new();
            loop {
                match self.bump() {
                    None => return Err(self.err(pos, "unterminated quoted symbol")),
                    Some('|') => break,
                    Some(c) => s.push(c),
                }
            }
            return Ok(SExpr::Atom(Atom::Symbol(s), pos));
        }
        let w = self.word();
        if w.is_empty() {
            self.bump();
            return Err(self.err(pos, format!("unexpected character `{c}`")));
        }
        let atom = if let Some(h) = w.strip_prefix("#x") {
            if h.is_empty() || !h.chars().all(|c| c.is_ascii_hexdigit()) {
                return Err(self.err(pos, format!("bad hex literal `{w}`")));
            }
            Atom::Hex(h.to_string())
        } else if let Some(b) = w.strip_prefix("#b") {
            if b.is_empty() || !b.chars().all(|c| c == '0' || c == '1') {
                return Err(self.err(pos, format!("bad binary literal `{w}`")));
            }
            Atom::Bin(b.to_string())
        } else if w.starts_with('#') {
            return Err(self.err(pos, format!("bad literal `{w}`")));
        } else if is_numeral(&w) {
            Atom::Int(w.parse().expect("numeral parses"))
        } else if w.as_bytes()[0].is_ascii_digit() {
            return Err(self.err(pos, format!("bad numeral `{w}`")));
        } else {
            Atom::Symbol(w)
        };
        Ok(SExpr::Atom(atom, pos))
    }
}

fn is_numeral(w: &str) -> bool {
    let digits = w.strip_prefix('-').unwrap_or(w);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

/// Reads every top-level s-expression in `text`.
pub fn parse_sexprs(text: &str) -> Result<Vec<SExpr>, FrontendError> {
    let mut lx = Lexer::new(text);
    let mut stack: Vec<(Vec<SExpr>, Pos)> = Vec::new();
    let mut top = Vec::new();
    loop {
        lx.skip_trivia();
        let pos = lx.pos();
        let item = match lx.chars.peek() {
            None => break,
            Some('(') => {
                lx.bump();
                stack.push((Vec::new(), pos));
                continue;
            }
            Some(')') => {
                lx.bump();
                let (items, open) = stack.pop().ok_or_else(|| lx.err(pos, "unbalanced `)`"))?;
                SExpr::List(items, open)
            }
            Some(_) => lx.atom()?,
        };
        match stack.last_mut() {
            Some((items, _)) => items.push(item),
            None => top.push(item),
        }
    }
    if let Some((_, open)) = stack.last() {
        return Err(FrontendError::Parse { line: open.line, col: open.col, msg: "unclosed `(`".into() });
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_and_positions() {
        let xs = parse_sexprs("(f #x00F0 -12 \"a b\" x!)\n; comment\n(g)").unwrap();
        assert_eq!(xs.len(), 2);
        let items = xs[0].list().unwrap();
        assert_eq!(items[1], SExpr::Atom(Atom::Hex("00F0".into()), Pos { line: 1, col: 4 }));
        assert!(matches!(&items[2], SExpr::Atom(Atom::Int(n), _) if *n == BigInt::from(-12)));
        assert!(matches!(&items[3], SExpr::Atom(Atom::Str(s), _) if s == "a b"));
        assert_eq!(items[4].symbol(), Some("x!"));
        assert_eq!(xs[1].pos(), Pos { line: 3, col: 1 });
    }

    #[test]
    fn minus_alone_is_a_symbol() {
        let xs = parse_sexprs("(- x 1)").unwrap();
        assert_eq!(xs[0].list().unwrap()[0].symbol(), Some("-"));
    }

    #[test]
    fn string_escapes() {
        let xs = parse_sexprs(r#""a""b" "\u{41}""#).unwrap();
        assert!(matches!(&xs[0], SExpr::Atom(Atom::Str(s), _) if s == "a\"b"));
        assert!(matches!(&xs[1], SExpr::Atom(Atom::Str(s), _) if s == "A"));
    }

    #[test]
    fn lex_errors_carry_line_and_column() {
        match parse_sexprs("(a\n  #xZZ)") {
            Err(FrontendError::Lex { line: 2, col: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_sexprs("\"abc"), Err(FrontendError::Lex { .. })));
        assert!(matches!(parse_sexprs("(a"), Err(FrontendError::Parse { .. })));
        assert!(matches!(parse_sexprs("a)"), Err(FrontendError::Lex { .. })));
    }
}
