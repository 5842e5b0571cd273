//! Error types shared by the whole engine.

use thiserror::Error;

use crate::connection::ConnectionKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Byte range of a sub-expression inside its source string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }
}

/// What went wrong while tokenizing or parsing an expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Unexpected token or end of input; carries the expected-token set.
    Syntax {
        expected: Vec<&'static str>,
        found: String,
    },
    UnknownIdentifier {
        name: String,
    },
    MalformedNumber,
    UnexpectedCharacter {
        ch: char,
    },
    /// Exponent of `^` contains a variable.
    NonConstantExponent,
    /// Exponent of `^` folded to a non-finite or undefined value.
    InvalidExponent {
        detail: String,
    },
    EmptyInput,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub source_text: String,
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    /// Render the offending line with a caret under the error offset.
    fn caret_line(&self) -> String {
        let mut line_start = 0usize;
        for (i, b) in self.source_text.bytes().enumerate() {
            if i >= self.offset {
                break;
            }
            if b == b'\n' {
                line_start = i + 1;
            }
        }
        let line_end = self.source_text[line_start..]
            .find('\n')
            .map(|i| line_start + i)
            .unwrap_or(self.source_text.len());
        let line = &self.source_text[line_start..line_end];
        let col = self.offset.saturating_sub(line_start);
        format!("  | {}\n  | {}^", line, " ".repeat(col))
    }
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax { expected, found } => {
                write!(
                    f,
                    "syntax error at offset {}: expected {}, found {}",
                    self.offset,
                    expected.join(" or "),
                    found
                )?;
            }
            ParseErrorKind::UnknownIdentifier { name } => {
                write!(f, "unknown identifier `{}` at offset {}", name, self.offset)?;
            }
            ParseErrorKind::MalformedNumber => {
                write!(f, "malformed numeric literal at offset {}", self.offset)?;
            }
            ParseErrorKind::UnexpectedCharacter { ch } => {
                write!(f, "unexpected character `{}` at offset {}", ch, self.offset)?;
            }
            ParseErrorKind::NonConstantExponent => {
                write!(
                    f,
                    "exponent at offset {} must be a constant expression",
                    self.offset
                )?;
            }
            ParseErrorKind::InvalidExponent { detail } => {
                write!(f, "invalid exponent at offset {}: {}", self.offset, detail)?;
            }
            ParseErrorKind::EmptyInput => {
                write!(f, "empty expression")?;
            }
        }
        write!(f, "\n{}", self.caret_line())
    }
}

impl std::error::Error for ParseError {}

/// Coarse classification used by callers that map errors to exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Bad user input: malformed expressions, invalid scenes, requests at
    /// points where the quantity is undefined.
    Input,
    /// The engine's own numeric contract was violated; indicates a bug or a
    /// scene outside the supported regime.
    NumericContract,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("{0}")]
    Parse(#[from] ParseError),

    #[error("variable `{name}` is not valid in {context} (offset {offset})")]
    WrongVariable {
        name: &'static str,
        context: &'static str,
        offset: usize,
    },

    #[error("domain error: {func}({arg}) undefined at source offsets {}..{} evaluated at ({}, {}, {})",
            span.start, span.end, point[0], point[1], point[2])]
    Domain {
        func: &'static str,
        arg: f64,
        span: Span,
        point: [f64; 3],
    },

    #[error("metric parameter must be positive and finite, got {value}")]
    MetricParam { value: f64 },

    #[error("curve is not regular at t = {t}: |dγ/dt| = {speed:e}")]
    NonRegularCurve { t: f64, speed: f64 },

    #[error("point ({}, {}, {}) is not on the surface: u = {u_value:e}", point[0], point[1], point[2])]
    OffSurface { point: [f64; 3], u_value: f64 },

    #[error("characteristic point at ({}, {}, {}): |horizontal gradient| = {l:e}", point[0], point[1], point[2])]
    CharacteristicPoint { point: [f64; 3], l: f64 },

    #[error("surface defining function has vanishing gradient at ({}, {}, {})", point[0], point[1], point[2])]
    DegenerateSurface { point: [f64; 3] },

    #[error("curve leaves the surface tangent plane at t = {t}: normal component {deviation:e}")]
    TangencyViolation { t: f64, deviation: f64 },

    #[error("negative radicand {value:e} beyond clamp tolerance (scale {scale:e}); this indicates an implementation bug")]
    NegativeRadicand { value: f64, scale: f64 },

    #[error("degenerate denominator in divergent-branch limit at t = {t}")]
    DegenerateDenominator { t: f64 },

    #[error("{what} is not available for the {} connection", kind.name())]
    UnsupportedConnection {
        kind: ConnectionKind,
        what: &'static str,
    },

    #[error("invalid scene: {0}")]
    Scene(String),

    #[error("integration budget exhausted: {cells} cells, error estimate {error:e}")]
    IntegrationBudget { cells: usize, error: f64 },

    #[error("interior integral does not converge as the excision radius shrinks ({details}); \
             the integrand appears non-summable near the characteristic set")]
    NonIntegrableSingularity { details: String },

    #[error("cannot determine boundary orientation: residuals {as_authored:e} (as authored) and {flipped:e} (flipped) are both above 0.1")]
    OrientationAmbiguous { as_authored: f64, flipped: f64 },
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::NegativeRadicand { .. }
            | Error::IntegrationBudget { .. }
            | Error::NonIntegrableSingularity { .. } => ErrorCategory::NumericContract,
            _ => ErrorCategory::Input,
        }
    }
}
