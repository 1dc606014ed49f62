//! Recursive-descent parser for LNS scripts.
//!
//! ```text
//! program   := statement*
//! statement := varDecl | tryCatch | call ";"
//! varDecl   := "var" binding ("," binding)* ";"
//! binding   := Ident "=" arg
//! tryCatch  := "try" "{" call ";" "}" "catch" "(" Ident ")" "{" "}"
//! call      := Ident "(" (arg ("," arg)*)? ")"
//! arg       := Number | String | array | Ident | Ident "[" Number "]"
//! array     := "[" (arg ("," arg)*)? "]"
//! ```

use serde::Serialize;

use super::lexer::{Keyword, Pos, Token, TokenKind};
use super::LnsError;
use crate::render::color::looks_like_color;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Expr {
    Number(f64),
    Text(String),
    /// String literal shaped like `#RGB` / `#RRGGBB`.
    Color(String),
    Array(Vec<Expr>),
    VarRef(String),
    IndexedRef(String, usize),
}

impl Expr {
    /// String literal, classified as colour text when it looks like one.
    pub fn string(s: impl Into<String>) -> Self {
        let s = s.into();
        if looks_like_color(&s) {
            Expr::Color(s)
        } else {
            Expr::Text(s)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Call {
    pub name: String,
    pub args: Vec<Expr>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Binding {
    pub name: String,
    pub value: Expr,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Statement {
    Call(Call),
    VarDecl(Vec<Binding>),
    TryCatch { call: Call, catch_var: String },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Script {
    pub statements: Vec<Statement>,
}

impl Script {
    pub fn calls(&self) -> impl Iterator<Item = &Call> {
        self.statements.iter().filter_map(|s| match s {
            Statement::Call(c) => Some(c),
            _ => None,
        })
    }
}

struct Parser<'a> {
    tokens: &'a [Token],
    at: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.at)
    }

    fn end_pos(&self) -> Pos {
        self.tokens
            .last()
            .map_or(Pos { line: 1, col: 1 }, |t| Pos { line: t.pos.line, col: t.pos.col + t.lexeme.chars().count() })
    }

    fn error(&self, expected: &str) -> LnsError {
        match self.peek() {
            Some(t) => LnsError::Syntax { expected: expected.to_string(), found: t.kind.to_string(), pos: t.pos },
            None => {
                LnsError::Syntax { expected: expected.to_string(), found: "end of input".into(), pos: self.end_pos() }
            }
        }
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.at);
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn is_punct(&self, c: char) -> bool {
        matches!(self.peek(), Some(Token { kind: TokenKind::Punct(p), .. }) if *p == c)
    }

    fn punct(&mut self, c: char) -> Result<(), LnsError> {
        if self.is_punct(c) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.error(&format!("`{c}`")))
        }
    }

    fn keyword(&mut self, k: Keyword, label: &str) -> Result<(), LnsError> {
        match self.peek() {
            Some(Token { kind: TokenKind::Keyword(got), .. }) if *got == k => {
                self.at += 1;
                Ok(())
            }
            _ => Err(self.error(label)),
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), LnsError> {
        match self.peek() {
            Some(Token { kind: TokenKind::Ident(name), pos, .. }) => {
                self.at += 1;
                Ok((name.clone(), *pos))
            }
            _ => Err(self.error("identifier")),
        }
    }

    fn statement(&mut self) -> Result<Statement, LnsError> {
        match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Keyword(Keyword::Var)) => self.var_decl(),
            Some(TokenKind::Keyword(Keyword::Try)) => self.try_catch(),
            Some(TokenKind::Ident(_)) => {
                let call = self.call()?;
                self.punct(';')?;
                Ok(Statement::Call(call))
            }
            _ => Err(self.error("statement")),
        }
    }

    fn var_decl(&mut self) -> Result<Statement, LnsError> {
        self.keyword(Keyword::Var, "`var`")?;
        let mut bindings = vec![self.binding()?];
        while self.is_punct(',') {
            self.at += 1;
            bindings.push(self.binding()?);
        }
        self.punct(';')?;
        Ok(Statement::VarDecl(bindings))
    }

    fn binding(&mut self) -> Result<Binding, LnsError> {
        let (name, pos) = self.ident()?;
        self.punct('=')?;
        let value = self.arg()?;
        Ok(Binding { name, value, pos })
    }

    fn try_catch(&mut self) -> Result<Statement, LnsError> {
        self.keyword(Keyword::Try, "`try`")?;
        self.punct('{')?;
        let call = self.call()?;
        self.punct(';')?;
        self.punct('}')?;
        self.keyword(Keyword::Catch, "`catch`")?;
        self.punct('(')?;
        let (catch_var, _) = self.ident()?;
        self.punct(')')?;
        self.punct('{')?;
        self.punct('}')?;
        Ok(Statement::TryCatch { call, catch_var })
    }

    fn call(&mut self) -> Result<Call, LnsError> {
        let (name, pos) = self.ident()?;
        self.punct('(')?;
        let args = self.list(')')?;
        Ok(Call { name, args, pos })
    }

    /// Comma-separated args up to and including `close`.
    fn list(&mut self, close: char) -> Result<Vec<Expr>, LnsError> {
        let mut items = Vec::new();
        if self.is_punct(close) {
            self.at += 1;
            return Ok(items);
        }
        loop {
            items.push(self.arg()?);
            if self.is_punct(',') {
                self.at += 1;
            } else {
                self.punct(close)?;
                return Ok(items);
            }
        }
    }

    fn arg(&mut self) -> Result<Expr, LnsError> {
        let Some(tok) = self.peek() else {
            return Err(self.error("argument"));
        };
        match &tok.kind {
            TokenKind::Number(n) => {
                self.at += 1;
                Ok(Expr::Number(*n))
            }
            TokenKind::String(s) => {
                self.at += 1;
                Ok(Expr::string(s.clone()))
            }
            TokenKind::Punct('[') => {
                self.at += 1;
                Ok(Expr::Array(self.list(']')?))
            }
            TokenKind::Ident(name) => {
                self.at += 1;
                if !self.is_punct('[') {
                    return Ok(Expr::VarRef(name.clone()));
                }
                self.at += 1;
                let index = match self.next() {
                    Some(Token { kind: TokenKind::Number(n), .. }) if *n >= 0.0 && n.fract() == 0.0 => *n as usize,
                    _ => {
                        self.at -= 1;
                        return Err(self.error("non-negative integer index"));
                    }
                };
                self.punct(']')?;
                Ok(Expr::IndexedRef(name.clone(), index))
            }
            _ => Err(self.error("argument")),
        }
    }
}

/// Parses a token stream into a [`Script`].
pub fn parse(tokens: &[Token]) -> Result<Script, LnsError> {
    let mut p = Parser { tokens, at: 0 };
    let mut statements = Vec::new();
    while p.peek().is_some() {
        statements.push(p.statement()?);
    }
    Ok(Script { statements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lns::tokenize;

    fn parse_src(src: &str) -> Result<Script, LnsError> {
        parse(&tokenize(src)?)
    }

    #[test]
    fn nested_path_array() {
        let s = parse_src("addPath(c, 4, d, s, [[1,2,4,8],[4,4,4,4],[8,4,2,1]]);").unwrap();
        let Statement::Call(call) = &s.statements[0] else { panic!() };
        assert_eq!(call.name, "addPath");
        assert_eq!(call.args.len(), 5);
        let Expr::Array(rows) = &call.args[4] else { panic!() };
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| matches!(r, Expr::Array(v) if v.len() == 4)));
    }

    #[test]
    fn malformed_call_points_at_semicolon() {
        let err = parse_src("addPoint(;").unwrap_err();
        assert_eq!(
            err,
            LnsError::Syntax { expected: "argument".into(), found: "`;`".into(), pos: Pos { line: 1, col: 10 } }
        );
    }

    #[test]
    fn try_catch_and_var() {
        let s = parse_src("try { setView(0); } catch (ex) { }\nvar a = 1, b = [\"#000\", \"x\"], c = b[1];").unwrap();
        assert!(
            matches!(&s.statements[0], Statement::TryCatch { call, catch_var } if call.name == "setView" && catch_var == "ex")
        );
        let Statement::VarDecl(b) = &s.statements[1] else { panic!() };
        assert_eq!(b.len(), 3);
        assert_eq!(b[1].value, Expr::Array(vec![Expr::Color("#000".into()), Expr::Text("x".into())]));
        assert_eq!(b[2].value, Expr::IndexedRef("b".into(), 1));
    }

    #[test]
    fn rejects_bad_index_and_missing_semicolon() {
        assert!(matches!(parse_src("f(a[-1]);"), Err(LnsError::Syntax { .. })));
        assert!(matches!(parse_src("f(a[1.5]);"), Err(LnsError::Syntax { .. })));
        let err = parse_src("f(1)").unwrap_err();
        assert!(matches!(err, LnsError::Syntax { ref found, .. } if found == "end of input"));
        assert!(matches!(parse_src("try { f(); g(); } catch (e) { }"), Err(LnsError::Syntax { .. })));
    }

    #[test]
    fn empty_program() {
        assert_eq!(parse_src("").unwrap(), Script::default());
    }
}
