use super::ast::Span;
use super::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(String),
    Decimal(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Eq,
    Pipe,
    Slash,
    Dot,
    Caret,
    /// `-(`
    TransOpen,
    /// `)->`
    TransClose,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(s) | Tok::Decimal(s) => format!("number `{s}`"),
            Tok::Eof => "end of file".into(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Eq => "=",
            Tok::Pipe => "|",
            Tok::Slash => "/",
            Tok::Dot => ".",
            Tok::Caret => "^",
            Tok::TransOpen => "-(",
            Tok::TransClose => ")->",
            _ => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn mark(&self) -> Span {
        Span {
            start: self.pos,
            end: self.pos,
            line: self.line,
            col: self.col,
        }
    }

    fn finish(&self, start: Span) -> Span {
        Span {
            end: self.pos,
            ..start
        }
    }
}

/// Splits `src` into tokens. Lexical errors are collected and the offending
/// character skipped, so one pass reports every bad character.
pub fn lex(src: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut cur = Cursor {
        src,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    while let Some(c) = cur.peek() {
        let start = cur.mark();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let begin = cur.pos;
            while cur.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                cur.bump();
            }
            Tok::Ident(src[begin..cur.pos].to_string())
        } else if c.is_ascii_digit() {
            let begin = cur.pos;
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
            }
            if cur.peek() == Some('.') && cur.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
                while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                    cur.bump();
                }
                Tok::Decimal(src[begin..cur.pos].to_string())
            } else {
                Tok::Int(src[begin..cur.pos].to_string())
            }
        } else if c == '-' {
            cur.bump();
            match cur.peek() {
                Some('(') => {
                    cur.bump();
                    Tok::TransOpen
                }
                Some(d) if d.is_ascii_digit() => {
                    errors.push(Diagnostic::error(
                        cur.finish(start),
                        "negative weights are not allowed",
                    ));
                    continue;
                }
                _ => {
                    errors.push(Diagnostic::error(cur.finish(start), "unexpected `-`"));
                    continue;
                }
            }
        } else if c == ')' && cur.peek_at(1) == Some('-') && cur.peek_at(2) == Some('>') {
            cur.bump();
            cur.bump();
            cur.bump();
            Tok::TransClose
        } else {
            cur.bump();
            match c {
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                ':' => Tok::Colon,
                '=' => Tok::Eq,
                '|' => Tok::Pipe,
                '/' => Tok::Slash,
                '.' => Tok::Dot,
                '^' => Tok::Caret,
                other => {
                    errors.push(Diagnostic::error(
                        cur.finish(start),
                        format!("unexpected character `{other}`"),
                    ));
                    continue;
                }
            }
        };
        tokens.push(Token {
            tok,
            span: cur.finish(start),
        });
    }
    tokens.push(Token {
        tok: Tok::Eof,
        span: cur.mark(),
    });
    (tokens, errors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        let (toks, errs) = lex(src);
        assert!(errs.is_empty(), "{errs:?}");
        toks.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn transition_tokens() {
        assert_eq!(
            kinds("1 -(t|eps)-> 2 : 0.5;"),
            vec![
                Tok::Int("1".into()),
                Tok::TransOpen,
                Tok::Ident("t".into()),
                Tok::Pipe,
                Tok::Ident("eps".into()),
                Tok::TransClose,
                Tok::Int("2".into()),
                Tok::Colon,
                Tok::Decimal("0.5".into()),
                Tok::Semi,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn dot_is_series_unless_decimal() {
        assert_eq!(
            kinds("P.F # comment\n"),
            vec![
                Tok::Ident("P".into()),
                Tok::Dot,
                Tok::Ident("F".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions_and_errors() {
        let (toks, errs) = lex("a\n  -3 @");
        assert_eq!((toks[0].span.line, toks[0].span.col), (1, 1));
        assert_eq!(errs.len(), 2);
        assert_eq!((errs[0].span.line, errs[0].span.col), (2, 3));
        assert!(errs[0].message.contains("negative"));
        assert_eq!((errs[1].span.line, errs[1].span.col), (2, 6));
    }
}
