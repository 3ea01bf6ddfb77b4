//! Token-level Halstead, cyclomatic and line statistics for C, C++ and Java
//! sources, feeding the MI formulas.
//!
//! Counting convention:
//! - operators are operator tokens, keywords, and the `(` of a call (counted
//!   as the single operator `()`);
//! - operands are identifiers and literals (`true`, `null`, ... included);
//! - `;`, `,` and the remaining brackets are not counted;
//! - preprocessor directive lines count as source lines but contribute no
//!   tokens.

mod lexer;
mod profile;

pub use lexer::{tokenize, Token, TokenClass, TokenStream};
pub use profile::LanguageProfile;

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

use crate::mi::{mi_score, MiError, MiInputs, MiScore, MiVariant};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SrcError {
    #[error("line {line}: unterminated block comment")]
    UnterminatedComment { line: usize },
    #[error("line {line}: unterminated string or character literal")]
    UnterminatedString { line: usize },
    #[error(transparent)]
    Mi(#[from] MiError),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HalsteadCounts {
    pub eta1: usize,
    pub eta2: usize,
    pub n1: usize,
    pub n2: usize,
    pub volume: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LocStats {
    pub loc_total: usize,
    pub loc_source: usize,
    pub loc_comment: usize,
    pub loc_blank: usize,
}

impl LocStats {
    pub fn comment_fraction(&self) -> f64 {
        self.loc_comment as f64 / self.loc_total.max(1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FileMetrics {
    pub eta1: usize,
    pub eta2: usize,
    pub n1: usize,
    pub n2: usize,
    pub volume: f64,
    pub cyclomatic: usize,
    pub loc_total: usize,
    pub loc_source: usize,
    pub loc_comment: usize,
    pub loc_blank: usize,
    pub comment_fraction: f64,
}

/// Halstead volume `(N1 + N2) log2(eta1 + eta2)`, zero below a vocabulary of 2.
pub fn halstead_volume(eta1: usize, eta2: usize, n1: usize, n2: usize) -> f64 {
    let vocab = eta1 + eta2;
    if vocab < 2 {
        0.0
    } else {
        (n1 + n2) as f64 * (vocab as f64).log2()
    }
}

pub fn halstead(tokens: &TokenStream, _profile: &LanguageProfile) -> HalsteadCounts {
    let mut operators: HashSet<&str> = HashSet::new();
    let mut operands: HashSet<&str> = HashSet::new();
    let (mut n1, mut n2) = (0, 0);
    let mut prev: Option<&Token> = None;
    for tok in &tokens.tokens {
        match tok.class {
            TokenClass::Operator | TokenClass::Keyword => {
                operators.insert(&tok.lexeme);
                n1 += 1;
            }
            TokenClass::Identifier | TokenClass::Literal => {
                operands.insert(&tok.lexeme);
                n2 += 1;
            }
            TokenClass::Punctuation => {
                if tok.lexeme == "(" && prev.is_some_and(|p| p.class == TokenClass::Identifier) {
                    operators.insert("()");
                    n1 += 1;
                }
            }
        }
        prev = Some(tok);
    }
    let (eta1, eta2) = (operators.len(), operands.len());
    HalsteadCounts {
        eta1,
        eta2,
        n1,
        n2,
        volume: halstead_volume(eta1, eta2, n1, n2),
    }
}

/// `1 + decisions + short-circuit operators + ternaries`.
pub fn cyclomatic(tokens: &TokenStream, profile: &LanguageProfile) -> usize {
    1 + tokens
        .tokens
        .iter()
        .filter(|t| match t.class {
            TokenClass::Keyword => profile.decision_keywords.contains(&t.lexeme.as_str()),
            TokenClass::Operator => {
                profile.short_circuit.contains(&t.lexeme.as_str()) || t.lexeme == profile.ternary
            }
            _ => false,
        })
        .count()
}

/// Physical-line accounting. A line holding both code and a comment counts
/// as source and as comment; lines inside a block comment count as comment.
pub fn loc_stats(source: &str, profile: &LanguageProfile) -> LocStats {
    let scan = lexer::scan(source, profile);
    let mut stats = LocStats {
        loc_total: scan.lines.len(),
        ..Default::default()
    };
    for f in &scan.lines {
        if f.code {
            stats.loc_source += 1;
        }
        if f.comment {
            stats.loc_comment += 1;
        }
        if !f.code && !f.comment {
            stats.loc_blank += 1;
        }
    }
    stats
}

pub fn file_metrics(source: &str, profile: &LanguageProfile) -> Result<FileMetrics, SrcError> {
    let tokens = tokenize(source, profile)?;
    let h = halstead(&tokens, profile);
    let loc = loc_stats(source, profile);
    Ok(FileMetrics {
        eta1: h.eta1,
        eta2: h.eta2,
        n1: h.n1,
        n2: h.n2,
        volume: h.volume,
        cyclomatic: cyclomatic(&tokens, profile),
        loc_total: loc.loc_total,
        loc_source: loc.loc_source,
        loc_comment: loc.loc_comment,
        loc_blank: loc.loc_blank,
        comment_fraction: loc.comment_fraction(),
    })
}

/// MI of one file with `L = loc_source` and `C = comment_fraction`.
///
/// A file whose vocabulary is below 2 has Halstead volume 0; it enters the
/// formula as `V = 1` so tiny files score instead of failing. Files without
/// source lines fail with the MI domain error on `L`.
pub fn file_mi(
    source: &str,
    profile: &LanguageProfile,
    variant: MiVariant,
) -> Result<(FileMetrics, MiScore), SrcError> {
    let m = file_metrics(source, profile)?;
    let inputs = MiInputs::new(m.volume.max(1.0), m.cyclomatic as f64, m.loc_source as f64)
        .with_comments(m.comment_fraction);
    let score = mi_score(&inputs, variant)?;
    Ok((m, score))
}
