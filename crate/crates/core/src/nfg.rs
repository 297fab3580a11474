//! Gambit `.nfg` files, payoff version.
//!
//! ```text
//! NFG 1 R "title" { "Player 1" "Player 2" } { 2 2 }
//! ""
//! 1 0 0 1 0 1 1 0
//! ```
//!
//! After the `NFG 1 R` header come a quoted title, a braced list of quoted
//! player names and a braced list of action counts. The counts list may
//! instead hold one braced list of quoted action names per player. An
//! optional quoted comment may follow. The rest of the file is the payoff
//! list: for each pure profile, one number per player in player order, with
//! profiles ordered so that the FIRST player's action varies fastest. This is
//! the reverse of the in-memory layout, and the parser remaps it.
//!
//! Payoffs may be integers, decimals (with optional exponent) or rationals
//! `p/q`. Tokens are separated by any whitespace. Outcome-version files,
//! where a `{` follows the counts, are rejected.

use std::fmt::Write as _;

use thiserror::Error;

use crate::error::GameError;
use crate::game::NormalFormGame;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NfgError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("payoff count mismatch: expected {expected} payoffs, found {found}")]
    Arity { expected: usize, found: usize },

    #[error("invalid payoff {token:?} at line {line}, column {column}")]
    Value { line: usize, column: usize, token: String },

    #[error("unsupported .nfg variant at line {line}, column {column}: outcome-version files are not supported")]
    UnsupportedVariant { line: usize, column: usize },

    #[error(transparent)]
    Game(#[from] GameError),
}

/// A payoff-version `.nfg` file as written, before layout remapping.
#[derive(Debug, Clone, PartialEq)]
pub struct NfgDocument {
    pub title: String,
    pub player_names: Vec<String>,
    pub action_counts: Vec<usize>,
    /// `N * prod |A_i|` payoffs in file order.
    pub payoffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Quoted(String),
    Word(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn next_token(&mut self) -> Result<Option<Token>, NfgError> {
        while self.chars.peek().is_some_and(|c| c.is_whitespace()) {
            self.bump();
        }
        let (line, column) = (self.line, self.column);
        let Some(c) = self.bump() else {
            return Ok(None);
        };
        let tok = match c {
            '{' => Tok::Open,
            '}' => Tok::Close,
            '"' => {
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => {
                            return Err(NfgError::Syntax {
                                line,
                                column,
                                message: "unterminated string".into(),
                            })
                        }
                        Some('\\') => match self.bump() {
                            Some(escaped) => s.push(escaped),
                            None => {
                                return Err(NfgError::Syntax {
                                    line,
                                    column,
                                    message: "unterminated string".into(),
                                })
                            }
                        },
                        Some('"') => break,
                        Some(other) => s.push(other),
                    }
                }
                Tok::Quoted(s)
            }
            _ => {
                let mut s = String::from(c);
                while let Some(&next) = self.chars.peek() {
                    if next.is_whitespace() || matches!(next, '{' | '}' | '"') {
                        break;
                    }
                    s.push(next);
                    self.bump();
                }
                Tok::Word(s)
            }
        };
        Ok(Some(Token { tok, line, column }))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<Option<Token>>,
    last: (usize, usize),
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lexer: Lexer::new(text),
            peeked: None,
            last: (1, 1),
        }
    }

    fn peek(&mut self) -> Result<Option<&Token>, NfgError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next_token()?);
        }
        Ok(self.peeked.as_ref().and_then(Option::as_ref))
    }

    fn next(&mut self) -> Result<Option<Token>, NfgError> {
        let token = match self.peeked.take() {
            Some(t) => t,
            None => self.lexer.next_token()?,
        };
        if let Some(t) = &token {
            self.last = (t.line, t.column);
        }
        Ok(token)
    }

    fn syntax<T>(&self, at: Option<&Token>, message: impl Into<String>) -> Result<T, NfgError> {
        let (line, column) = at.map_or((self.lexer.line, self.lexer.column), |t| (t.line, t.column));
        Err(NfgError::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<Token, NfgError> {
        match self.next()? {
            Some(t) if &t.tok == want => Ok(t),
            other => self.syntax(other.as_ref(), format!("expected {what}")),
        }
    }

    fn expect_quoted(&mut self, what: &str) -> Result<String, NfgError> {
        match self.next()? {
            Some(Token { tok: Tok::Quoted(s), .. }) => Ok(s),
            other => self.syntax(other.as_ref(), format!("expected quoted {what}")),
        }
    }

    fn header(&mut self) -> Result<(), NfgError> {
        for want in ["NFG", "1", "R"] {
            match self.next()? {
                Some(Token { tok: Tok::Word(w), .. }) if w == want => {}
                other => return self.syntax(other.as_ref(), format!("expected `{want}` in `NFG 1 R` header")),
            }
        }
        Ok(())
    }

    fn player_names(&mut self) -> Result<Vec<String>, NfgError> {
        self.expect(&Tok::Open, "`{` opening the player list")?;
        let mut names = Vec::new();
        loop {
            match self.next()? {
                Some(Token { tok: Tok::Quoted(s), .. }) => names.push(s),
                Some(Token { tok: Tok::Close, .. }) => break,
                other => return self.syntax(other.as_ref(), "expected quoted player name or `}`"),
            }
        }
        if names.is_empty() {
            return self.syntax(None, "player list is empty");
        }
        Ok(names)
    }

    fn action_counts(&mut self) -> Result<Vec<usize>, NfgError> {
        self.expect(&Tok::Open, "`{` opening the action counts")?;
        let mut counts = Vec::new();
        loop {
            match self.next()? {
                Some(Token { tok: Tok::Close, .. }) => break,
                Some(Token { tok: Tok::Word(w), line, column }) => match w.parse::<usize>() {
                    Ok(m) if m > 0 => counts.push(m),
                    _ => {
                        return Err(NfgError::Syntax {
                            line,
                            column,
                            message: format!("action count {w:?} is not a positive integer"),
                        })
                    }
                },
                Some(Token { tok: Tok::Open, .. }) => {
                    let mut m = 0;
                    loop {
                        match self.next()? {
                            Some(Token { tok: Tok::Quoted(_), .. }) => m += 1,
                            Some(Token { tok: Tok::Close, .. }) => break,
                            other => return self.syntax(other.as_ref(), "expected quoted action name or `}`"),
                        }
                    }
                    if m == 0 {
                        return self.syntax(None, "a player has no actions");
                    }
                    counts.push(m);
                }
                other => return self.syntax(other.as_ref(), "expected action count or `}`"),
            }
        }
        Ok(counts)
    }
}

fn parse_number(token: &str) -> Option<f64> {
    let value = match token.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.parse().ok()?;
            let den: f64 = den.parse().ok()?;
            if den == 0.0 {
                return None;
            }
            num / den
        }
        None => token.parse().ok()?,
    };
    value.is_finite().then_some(value)
}

/// Reads an `.nfg` file into its document form.
pub fn parse_document(text: &str) -> Result<NfgDocument, NfgError> {
    let mut p = Parser::new(text);
    p.header()?;
    let title = p.expect_quoted("title")?;
    let player_names = p.player_names()?;
    let action_counts = p.action_counts()?;
    if action_counts.len() != player_names.len() {
        return p.syntax(
            None,
            format!("{} players but {} action counts", player_names.len(), action_counts.len()),
        );
    }

    if matches!(p.peek()?, Some(Token { tok: Tok::Quoted(_), .. })) {
        p.next()?;
    }
    if let Some(Token { tok: Tok::Open, line, column }) = p.peek()? {
        return Err(NfgError::UnsupportedVariant { line: *line, column: *column });
    }

    let expected = action_counts
        .iter()
        .try_fold(action_counts.len(), |acc, &m| acc.checked_mul(m))
        .ok_or(GameError::Capacity { entries: u128::MAX, limit: crate::game::MAX_PAYOFF_ENTRIES })?;
    if expected as u128 > crate::game::MAX_PAYOFF_ENTRIES {
        return Err(GameError::Capacity {
            entries: expected as u128,
            limit: crate::game::MAX_PAYOFF_ENTRIES,
        }
        .into());
    }
    let mut payoffs = Vec::with_capacity(expected);
    while let Some(token) = p.next()? {
        let value = match &token.tok {
            Tok::Word(w) => parse_number(w),
            _ => None,
        };
        match value {
            Some(v) => payoffs.push(v),
            None => {
                let text = match token.tok {
                    Tok::Word(w) => w,
                    Tok::Quoted(s) => format!("\"{s}\""),
                    Tok::Open => "{".into(),
                    Tok::Close => "}".into(),
                };
                return Err(NfgError::Value {
                    line: token.line,
                    column: token.column,
                    token: text,
                });
            }
        }
    }
    if payoffs.len() != expected {
        return Err(NfgError::Arity {
            expected,
            found: payoffs.len(),
        });
    }
    Ok(NfgDocument {
        title,
        player_names,
        action_counts,
        payoffs,
    })
}

/// Steps a mixed-radix counter whose axis 0 is the fastest digit.
fn advance_first_fastest(digits: &mut [usize], dims: &[usize]) {
    for (d, &m) in digits.iter_mut().zip(dims) {
        *d += 1;
        if *d < m {
            return;
        }
        *d = 0;
    }
}

impl NfgDocument {
    pub fn to_game(&self) -> Result<NormalFormGame, NfgError> {
        let n = self.action_counts.len();
        let size: usize = self.action_counts.iter().product();
        if self.payoffs.len() != n * size {
            return Err(NfgError::Arity {
                expected: n * size,
                found: self.payoffs.len(),
            });
        }
        let strides = crate::tensor::strides(&self.action_counts);
        let mut tensors = vec![vec![0.0; size]; n];
        let mut digits = vec![0; n];
        for chunk in self.payoffs.chunks_exact(n) {
            let offset: usize = digits.iter().zip(&strides).map(|(a, s)| a * s).sum();
            for (t, &v) in tensors.iter_mut().zip(chunk) {
                t[offset] = v;
            }
            advance_first_fastest(&mut digits, &self.action_counts);
        }
        Ok(NormalFormGame::new(self.title.clone(), self.action_counts.clone(), tensors)?)
    }

    pub fn from_game(game: &NormalFormGame) -> Self {
        let dims = game.action_counts();
        let n = dims.len();
        let mut payoffs = Vec::with_capacity(n * game.size());
        let mut digits = vec![0; n];
        for _ in 0..game.size() {
            let offset = game.offset_unchecked(&digits);
            payoffs.extend(game.payoff_tensors().iter().map(|t| t[offset]));
            advance_first_fastest(&mut digits, dims);
        }
        Self {
            title: game.name().to_string(),
            player_names: (1..=n).map(|i| format!("Player {i}")).collect(),
            action_counts: dims.to_vec(),
            payoffs,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.payoffs.len() * 20 + 128);
        out.push_str("NFG 1 R ");
        write_quoted(&mut out, &self.title);
        out.push_str(" {");
        for name in &self.player_names {
            out.push(' ');
            write_quoted(&mut out, name);
        }
        out.push_str(" } {");
        for m in &self.action_counts {
            let _ = write!(out, " {m}");
        }
        out.push_str(" }\n\n");
        for (k, v) in self.payoffs.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            // `Display` for f64 is the shortest string that parses back to
            // the same bits.
            let _ = write!(out, "{v}");
        }
        out.push('\n');
        out
    }
}

fn write_quoted(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
}

pub fn parse_nfg(text: &str) -> Result<NormalFormGame, NfgError> {
    parse_document(text)?.to_game()
}

pub fn serialize_nfg(game: &NormalFormGame) -> String {
    NfgDocument::from_game(game).to_text()
}
