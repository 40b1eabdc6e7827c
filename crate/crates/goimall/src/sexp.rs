//! Minimal s-expression reader shared by the formula and proof parsers.

use crate::mall_syntax::SyntaxError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    pub fn offset(&self) -> usize {
        match self {
            Sexp::Atom(_, o) | Sexp::List(_, o) => *o,
        }
    }
}

fn is_delim(c: char) -> bool {
    c.is_whitespace() || c == '(' || c == ')'
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c == ';' {
                // comment to end of line
                while let Some(c) = self.src[self.pos..].chars().next() {
                    self.pos += c.len_utf8();
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp, SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        match self.src[self.pos..].chars().next() {
            None => Err(SyntaxError::new(start, "unexpected end of input")),
            Some(')') => Err(SyntaxError::new(start, "unexpected ')'")),
            Some('(') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.src[self.pos..].chars().next() {
                        None => return Err(SyntaxError::new(self.pos, "unexpected end of input")),
                        Some(')') => {
                            self.pos += 1;
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(_) => {
                while let Some(c) = self.src[self.pos..].chars().next() {
                    if is_delim(c) || c == ';' {
                        break;
                    }
                    self.pos += c.len_utf8();
                }
                Ok(Sexp::Atom(self.src[start..self.pos].to_string(), start))
            }
        }
    }
}

/// Reads exactly one s-expression; trailing non-whitespace is an error.
pub fn read_one(src: &str) -> Result<Sexp, SyntaxError> {
    let mut r = Reader { src, pos: 0 };
    let s = r.read()?;
    r.skip_ws();
    if r.pos < src.len() {
        return Err(SyntaxError::new(r.pos, "trailing input"));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_lists_keep_offsets() {
        let s = read_one("(a (b c))").unwrap();
        let Sexp::List(items, 0) = s else { panic!() };
        assert_eq!(items[1].offset(), 3);
    }

    #[test]
    fn unbalanced_reports_end() {
        let e = read_one("(a b").unwrap_err();
        assert_eq!(e.offset, 4);
    }

    #[test]
    fn comments_are_skipped() {
        let s = read_one("; hello\n(x)").unwrap();
        assert!(matches!(s, Sexp::List(_, 8)));
    }
}
