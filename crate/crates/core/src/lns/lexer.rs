use std::fmt;

use serde::Serialize;

use super::LnsError;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Keyword {
    Var,
    Try,
    Catch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TokenKind {
    Ident(String),
    Number(f64),
    String(String),
    Punct(char),
    Keyword(Keyword),
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Number(n) => write!(f, "number `{n}`"),
            TokenKind::String(s) => write!(f, "string \"{s}\""),
            TokenKind::Punct(c) => write!(f, "`{c}`"),
            TokenKind::Keyword(Keyword::Var) => f.write_str("`var`"),
            TokenKind::Keyword(Keyword::Try) => f.write_str("`try`"),
            TokenKind::Keyword(Keyword::Catch) => f.write_str("`catch`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub pos: Pos,
}

const PUNCT: &[char] = &['(', ')', '[', ']', '{', '}', ',', ';', '='];

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    col: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map_or(self.src.len(), |&(i, _)| i)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }
}

/// Splits LNS source into tokens, skipping whitespace and `//` comments.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LnsError> {
    let mut cur = Cursor { chars: source.char_indices().peekable(), src: source, line: 1, col: 1 };
    let mut out = Vec::new();
    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' && cur.peek2() == Some('/') {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            continue;
        }
        let pos = cur.pos();
        let start = cur.offset();
        let kind = if PUNCT.contains(&c) {
            cur.bump();
            TokenKind::Punct(c)
        } else if c == '"' {
            cur.bump();
            let body_start = cur.offset();
            loop {
                match cur.peek() {
                    None | Some('\n') => return Err(LnsError::UnterminatedString { pos }),
                    Some('"') => break,
                    Some(_) => {
                        cur.bump();
                    }
                }
            }
            let body = source[body_start..cur.offset()].to_string();
            cur.bump();
            TokenKind::String(body)
        } else if c.is_ascii_digit() || ((c == '-' || c == '+' || c == '.') && starts_number(&cur)) {
            lex_number(&mut cur, pos)?
        } else if c.is_alphabetic() || c == '_' || c == '$' {
            while cur.peek().is_some_and(|c| c.is_alphanumeric() || c == '_' || c == '$') {
                cur.bump();
            }
            let word = &source[start..cur.offset()];
            match word {
                "var" => TokenKind::Keyword(Keyword::Var),
                "try" => TokenKind::Keyword(Keyword::Try),
                "catch" => TokenKind::Keyword(Keyword::Catch),
                _ => TokenKind::Ident(word.to_string()),
            }
        } else {
            return Err(LnsError::IllegalChar { ch: c, pos });
        };
        out.push(Token { kind, lexeme: source[start..cur.offset()].to_string(), pos });
    }
    Ok(out)
}

fn starts_number(cur: &Cursor<'_>) -> bool {
    let mut it = cur.chars.clone();
    let first = it.next().map(|(_, c)| c);
    let second = it.next().map(|(_, c)| c);
    match (first, second) {
        (Some('.'), Some(d)) => d.is_ascii_digit(),
        (Some('-' | '+'), Some(d)) if d.is_ascii_digit() => true,
        (Some('-' | '+'), Some('.')) => it.next().is_some_and(|(_, d)| d.is_ascii_digit()),
        _ => false,
    }
}

fn lex_number(cur: &mut Cursor<'_>, pos: Pos) -> Result<TokenKind, LnsError> {
    let start = cur.offset();
    if matches!(cur.peek(), Some('-' | '+')) {
        cur.bump();
    }
    let digits = |cur: &mut Cursor<'_>| {
        while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            cur.bump();
        }
    };
    digits(cur);
    if cur.peek() == Some('.') {
        cur.bump();
        digits(cur);
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let mut it = cur.chars.clone();
        it.next();
        let next = it.next().map(|(_, c)| c);
        let after = it.next().map(|(_, c)| c);
        let exp_ok = match next {
            Some(d) if d.is_ascii_digit() => true,
            Some('-' | '+') => after.is_some_and(|d| d.is_ascii_digit()),
            _ => false,
        };
        if exp_ok {
            cur.bump();
            if matches!(cur.peek(), Some('-' | '+')) {
                cur.bump();
            }
            digits(cur);
        }
    }
    let text = &cur.src[start..cur.offset()];
    text.parse::<f64>().map(TokenKind::Number).map_err(|_| LnsError::BadNumber { text: text.to_string(), pos })
}
