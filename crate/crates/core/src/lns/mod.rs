//! The LNS scene-description language: a declarative subset of JavaScript made
//! of builtin calls, `var` bindings and single-call `try { } catch (e) { }` guards.

mod eval;
mod lexer;
mod parser;
mod printer;

use thiserror::Error;

pub use eval::{evaluate, Builtin, BuiltinError, BuiltinFn, BuiltinRegistry, SceneBuilder, Value};
pub use lexer::{tokenize, Keyword, Pos, Token, TokenKind};
pub use parser::{parse, Binding, Call, Expr, Script, Statement};
pub use printer::{print, scene_to_script, WriteError};

use crate::scene::{Scene, SceneError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LnsError {
    #[error("{pos}: unterminated string")]
    UnterminatedString { pos: Pos },
    #[error("{pos}: illegal character `{ch}`")]
    IllegalChar { ch: char, pos: Pos },
    #[error("{pos}: malformed number `{text}`")]
    BadNumber { text: String, pos: Pos },
    #[error("{pos}: syntax error: expected {expected}, found {found}")]
    Syntax { expected: String, found: String, pos: Pos },
    #[error("{pos}: unknown builtin `{name}`")]
    UnknownBuiltin { name: String, pos: Pos },
    #[error("{pos}: `{builtin}` takes {expected} argument(s), got {found}")]
    Arity { builtin: String, expected: String, found: usize, pos: Pos },
    #[error("{pos}: `{builtin}` argument {index}: expected {expected}, got {found}")]
    Type { builtin: String, index: usize, expected: &'static str, found: String, pos: Pos },
    #[error("{pos}: unbound variable `{name}`")]
    UnboundVariable { name: String, pos: Pos },
    #[error("{pos}: index {index} out of range for `{name}` (length {len})")]
    IndexOutOfRange { name: String, index: usize, len: usize, pos: Pos },
    #[error("{pos}: `{builtin}`: {source}")]
    Scene { builtin: String, source: SceneError, pos: Pos },
    #[error("{pos}: `{builtin}`: {message}")]
    Conflict { builtin: String, message: String, pos: Pos },
    #[error("script declares no simplex")]
    NoSimplex,
}

impl LnsError {
    /// Source position of the error, when it has one.
    pub fn pos(&self) -> Option<Pos> {
        match self {
            LnsError::UnterminatedString { pos }
            | LnsError::IllegalChar { pos, .. }
            | LnsError::BadNumber { pos, .. }
            | LnsError::Syntax { pos, .. }
            | LnsError::UnknownBuiltin { pos, .. }
            | LnsError::Arity { pos, .. }
            | LnsError::Type { pos, .. }
            | LnsError::UnboundVariable { pos, .. }
            | LnsError::IndexOutOfRange { pos, .. }
            | LnsError::Scene { pos, .. }
            | LnsError::Conflict { pos, .. } => Some(*pos),
            LnsError::NoSimplex => None,
        }
    }
}

/// Tokenizes, parses and evaluates `source` with the standard registry.
pub fn load(source: &str) -> Result<Scene, LnsError> {
    load_with(source, &BuiltinRegistry::standard())
}

pub fn load_with(source: &str, registry: &BuiltinRegistry) -> Result<Scene, LnsError> {
    evaluate(&parse(&tokenize(source)?)?, registry)
}
