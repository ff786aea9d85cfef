//! Text form of secret patterns.
//!
//! One pattern per line, triplets separated by whitespace, each written as
//! `BITS@CHANNEL:INTERVAL`. The first triplet uses `-` for its interval.
//! Lines starting with `#` are comments.
//!
//! ```
//! use beaconveil::codec::{parse_pattern, render_pattern};
//! use beaconveil::PatternId;
//!
//! let p = parse_pattern("010@1:- 101@6:1 010@6:2 101@11:2", PatternId(0)).unwrap();
//! assert_eq!(render_pattern(&p), "010@1:- 101@6:1 010@6:2 101@11:2");
//! ```

use thiserror::Error;

use crate::band::ChannelId;
use crate::pattern::{check_structure, PatternId, SecretPattern, Triplet, TxPattern, ValidationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: ValidationError,
    },
}

impl CodecError {
    pub fn validation(&self) -> Option<&ValidationError> {
        match self {
            CodecError::Invalid { source, .. } => Some(source),
            CodecError::Syntax { .. } => None,
        }
    }
}

/// Parses a single pattern line. Structural rules are enforced; band and
/// interval-bound checks are left to [`crate::validate_pattern`].
pub fn parse_pattern(text: &str, id: PatternId) -> Result<SecretPattern, CodecError> {
    parse_line(text, 1, id)
}

/// Parses a pattern file. Ids are assigned 0, 1, 2, ... in file order.
pub fn parse_pattern_file(text: &str) -> Result<Vec<SecretPattern>, CodecError> {
    let mut patterns = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let id = PatternId(patterns.len() as u32);
        patterns.push(parse_line(line, lineno + 1, id)?);
    }
    Ok(patterns)
}

pub fn render_pattern(p: &SecretPattern) -> String {
    p.to_string()
}

pub fn render_pattern_file(patterns: &[SecretPattern]) -> String {
    let mut out = String::new();
    for p in patterns {
        out.push_str(&render_pattern(p));
        out.push('\n');
    }
    out
}

fn parse_line(text: &str, line: usize, id: PatternId) -> Result<SecretPattern, CodecError> {
    if let Some(col) = text.find(|c: char| !(c.is_ascii_graphic() || c == ' ' || c == '\t')) {
        return Err(syntax(line, col + 1, "non-printable or non-ASCII character"));
    }
    let mut triplets = Vec::new();
    for (col, token) in tokens(text) {
        triplets.push(parse_triplet(token, line, col)?);
    }
    let p = SecretPattern::new(id, triplets);
    check_structure(&p).map_err(|source| CodecError::Invalid { line, source })?;
    Ok(p)
}

/// Whitespace-separated tokens with their 1-based starting column.
fn tokens(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = text;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let skip = rest.len() - rest.trim_start().len();
        rest = &rest[skip..];
        offset += skip;
        if rest.is_empty() {
            return None;
        }
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        let tok = &rest[..end];
        let col = offset + 1;
        rest = &rest[end..];
        offset += end;
        Some((col, tok))
    })
}

fn parse_triplet(token: &str, line: usize, col: usize) -> Result<Triplet, CodecError> {
    let at = token
        .find('@')
        .ok_or_else(|| syntax(line, col, format!("expected BITS@CHANNEL:INTERVAL, got {token:?}")))?;
    let colon = token[at..]
        .find(':')
        .map(|i| i + at)
        .ok_or_else(|| syntax(line, col + at, "missing ':' after channel"))?;
    let (bits, chan, interval) = (&token[..at], &token[at + 1..colon], &token[colon + 1..]);

    if bits.is_empty() {
        return Err(syntax(line, col, "empty txpower bits"));
    }
    if let Some(i) = bits.find(|c| c != '0' && c != '1') {
        return Err(syntax(line, col + i, "txpower bits must be 0 or 1"));
    }
    let tx_pattern: TxPattern = bits.parse().map_err(|e: ValidationError| syntax(line, col, e.to_string()))?;

    let chan_col = col + at + 1;
    let channel = chan
        .parse::<u16>()
        .ok()
        .and_then(ChannelId::new)
        .ok_or_else(|| syntax(line, chan_col, format!("channel must be a positive integer, got {chan:?}")))?;

    let int_col = col + colon + 1;
    let interval_tu = match interval {
        "-" => None,
        s => match s.parse::<u32>() {
            Ok(v) if v >= 1 => Some(v),
            _ => return Err(syntax(line, int_col, format!("interval must be a positive integer or '-', got {s:?}"))),
        },
    };
    Ok(Triplet { tx_pattern, channel, interval_tu })
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> CodecError {
    CodecError::Syntax { line, column, message: message.into() }
}
