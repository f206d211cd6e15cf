use super::{DslError, ErrorKind, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Bare word: letters, digits and underscores.
    Word(String),
    /// Double-quoted string.
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Colon,
    Comma,
    Dot,
    Eq,
    NotEq,
    Bang,
    Slash,
    Plus,
    /// `->`
    Arrow,
    /// `-[`
    OpenLabel,
    /// `]->`
    CloseLabel,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eq => "`=`".into(),
            Tok::NotEq => "`!=`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::OpenLabel => "`-[`".into(),
            Tok::CloseLabel => "`]->`".into(),
        }
    }
}

pub(crate) fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn here(&self) -> Span {
        Span {
            start: self.pos,
            end: self.pos,
            line: self.line,
            column: self.column,
        }
    }
}

/// Tokenize; lexical errors are collected and the offending character skipped.
pub(crate) fn lex(src: &str) -> (Vec<(Tok, Span)>, Vec<DslError>) {
    let mut cur = Cursor {
        src,
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut toks = Vec::new();
    let mut errors = Vec::new();
    while let Some(c) = cur.peek() {
        let start = cur.here();
        let finish = |cur: &Cursor, mut s: Span| {
            s.end = cur.pos;
            s
        };
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' || (c == '/' && cur.peek2() == Some('/')) {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            continue;
        }
        if is_word_char(c) {
            let mut w = String::new();
            while let Some(c) = cur.peek().filter(|c| is_word_char(*c)) {
                w.push(c);
                cur.bump();
            }
            toks.push((Tok::Word(w), finish(&cur, start)));
            continue;
        }
        if c == '"' {
            cur.bump();
            let mut s = String::new();
            let mut closed = false;
            while let Some(c) = cur.bump() {
                match c {
                    '"' => {
                        closed = true;
                        break;
                    }
                    '\\' => match cur.bump() {
                        Some(e @ ('"' | '\\')) => s.push(e),
                        Some('n') => s.push('\n'),
                        Some(other) => {
                            errors.push(DslError::new(
                                ErrorKind::Lexical,
                                finish(&cur, start),
                                format!("unknown escape \\{other}"),
                            ));
                        }
                        None => break,
                    },
                    '\n' => break,
                    c => s.push(c),
                }
            }
            if closed {
                toks.push((Tok::Str(s), finish(&cur, start)));
            } else {
                errors.push(DslError::new(
                    ErrorKind::Lexical,
                    finish(&cur, start),
                    "unterminated string",
                ));
            }
            continue;
        }
        let tok = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ';' => Some(Tok::Semi),
            ':' => Some(Tok::Colon),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            '=' => Some(Tok::Eq),
            '/' => Some(Tok::Slash),
            '+' => Some(Tok::Plus),
            _ => None,
        };
        if let Some(tok) = tok {
            cur.bump();
            toks.push((tok, finish(&cur, start)));
            continue;
        }
        match (c, cur.peek2()) {
            ('!', Some('=')) => {
                cur.bump();
                cur.bump();
                toks.push((Tok::NotEq, finish(&cur, start)));
            }
            ('!', _) => {
                cur.bump();
                toks.push((Tok::Bang, finish(&cur, start)));
            }
            ('-', Some('>')) => {
                cur.bump();
                cur.bump();
                toks.push((Tok::Arrow, finish(&cur, start)));
            }
            ('-', Some('[')) => {
                cur.bump();
                cur.bump();
                toks.push((Tok::OpenLabel, finish(&cur, start)));
            }
            (']', _) => {
                cur.bump();
                if cur.src[cur.pos..].starts_with("->") {
                    cur.bump();
                    cur.bump();
                    toks.push((Tok::CloseLabel, finish(&cur, start)));
                } else {
                    toks.push((Tok::RBracket, finish(&cur, start)));
                }
            }
            _ => {
                cur.bump();
                errors.push(DslError::new(
                    ErrorKind::Lexical,
                    finish(&cur, start),
                    format!("unexpected character {c:?}"),
                ));
            }
        }
    }
    (toks, errors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        lex(src).0.into_iter().map(|(t, _)| t).collect()
    }

    #[test]
    fn arrows_and_words() {
        assert_eq!(
            kinds("t: a -[in x.y / eps]-> b; # c"),
            vec![
                Tok::Word("t".into()),
                Tok::Colon,
                Tok::Word("a".into()),
                Tok::OpenLabel,
                Tok::Word("in".into()),
                Tok::Word("x".into()),
                Tok::Dot,
                Tok::Word("y".into()),
                Tok::Slash,
                Tok::Word("eps".into()),
                Tok::CloseLabel,
                Tok::Word("b".into()),
                Tok::Semi,
            ]
        );
    }

    #[test]
    fn strings_and_spans() {
        let (toks, errs) = lex("x\n  \"(0,1)\" != ");
        assert!(errs.is_empty());
        assert_eq!(toks[1].0, Tok::Str("(0,1)".into()));
        assert_eq!((toks[1].1.line, toks[1].1.column), (2, 3));
        assert_eq!(toks[2].0, Tok::NotEq);
    }

    #[test]
    fn bad_characters_are_reported() {
        let (toks, errs) = lex("a $ b \"open");
        assert_eq!(toks.len(), 2);
        assert_eq!(errs.len(), 2);
        assert_eq!(errs[0].span.column, 3);
    }
}
