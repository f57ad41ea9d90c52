//! Token types, surface strings and the added-token vocabulary.

use std::fmt;
use std::sync::OnceLock;

use super::quantize::{
    OrientationIndex, PositionIndex, SketchAxis, SketchLevel, ORIENTATION_COUNT, POSITION_COUNT,
    SKETCH_LEVELS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Boundary {
    AnglesOpen,
    AnglesClose,
    PositionOpen,
    PositionClose,
    SketchXOpen,
    SketchXClose,
    SketchYOpen,
    SketchYClose,
}

impl Boundary {
    pub const ALL: [Boundary; 8] = [
        Boundary::AnglesOpen,
        Boundary::AnglesClose,
        Boundary::PositionOpen,
        Boundary::PositionClose,
        Boundary::SketchXOpen,
        Boundary::SketchXClose,
        Boundary::SketchYOpen,
        Boundary::SketchYClose,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::AnglesOpen => "<angles>",
            Boundary::AnglesClose => "</angles>",
            Boundary::PositionOpen => "<spatial_position>",
            Boundary::PositionClose => "</spatial_position>",
            Boundary::SketchXOpen => "<sketch_position_x>",
            Boundary::SketchXClose => "</sketch_position_x>",
            Boundary::SketchYOpen => "<sketch_position_y>",
            Boundary::SketchYClose => "</sketch_position_y>",
        }
    }

    fn index(self) -> usize {
        Self::ALL.iter().position(|b| *b == self).unwrap()
    }
}

/// Keywords of the structural stream. Numbers also travel as structural tokens.
pub const STRUCTURAL_KEYWORDS: [&str; 22] = [
    "model",
    "end_model",
    "sketch",
    "bbox",
    "end_sketch",
    "loop",
    "end_loop",
    "line",
    "arc",
    "circle",
    "extrude",
    "scale",
    "e1",
    "e2",
    "end_extrude",
    "new_body",
    "join",
    "cut",
    "intersect",
    "one_side",
    "symmetric",
    "two_sides",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    Structural(String),
    Orientation(OrientationIndex),
    Position(PositionIndex),
    SketchX(SketchLevel),
    SketchY(SketchLevel),
    Boundary(Boundary),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed spatial token {0:?}")]
pub struct BadToken(pub String);

fn parse_index(digits: &str) -> Option<usize> {
    // Canonical decimal only: no sign, no leading zeros.
    if digits.is_empty() || (digits.len() > 1 && digits.starts_with('0')) {
        return None;
    }
    if !digits.bytes().all(|b| b.is_ascii_digit()) || digits.len() > 6 {
        return None;
    }
    digits.parse().ok()
}

impl Token {
    pub fn structural(s: impl Into<String>) -> Self {
        Token::Structural(s.into())
    }

    /// Parses one surface string. Anything in angle brackets must be a known spatial
    /// or boundary token; everything else is structural.
    pub fn parse(s: &str) -> Result<Token, BadToken> {
        if let Some(b) = Boundary::ALL.iter().find(|b| b.as_str() == s) {
            return Ok(Token::Boundary(*b));
        }
        let Some(inner) = s.strip_prefix('<').and_then(|r| r.strip_suffix('>')) else {
            return Ok(Token::Structural(s.to_string()));
        };
        let bad = || BadToken(s.to_string());
        if let Some(d) = inner.strip_prefix('A') {
            let n = parse_index(d).ok_or_else(bad)?;
            return OrientationIndex::new(n)
                .map(Token::Orientation)
                .map_err(|_| bad());
        }
        if let Some(d) = inner.strip_prefix('P') {
            let k = parse_index(d).ok_or_else(bad)?;
            return PositionIndex::new(k)
                .map(Token::Position)
                .map_err(|_| bad());
        }
        if let Some(d) = inner.strip_prefix('S') {
            if let Some(d) = d.strip_suffix('X') {
                let l = parse_index(d).ok_or_else(bad)?;
                return SketchLevel::new(SketchAxis::X, l)
                    .map(Token::SketchX)
                    .map_err(|_| bad());
            }
            if let Some(d) = d.strip_suffix('Y') {
                let l = parse_index(d).ok_or_else(bad)?;
                return SketchLevel::new(SketchAxis::Y, l)
                    .map(Token::SketchY)
                    .map_err(|_| bad());
            }
        }
        Err(bad())
    }

    pub fn family(&self) -> Option<Family> {
        match self {
            Token::Structural(_) => None,
            Token::Orientation(_) => Some(Family::Orientation),
            Token::Position(_) => Some(Family::Position),
            Token::SketchX(_) => Some(Family::SketchX),
            Token::SketchY(_) => Some(Family::SketchY),
            Token::Boundary(_) => Some(Family::Boundary),
        }
    }

    /// Index within the token's family (`None` for structural tokens).
    pub fn family_index(&self) -> Option<usize> {
        match self {
            Token::Structural(_) => None,
            Token::Orientation(n) => Some(n.get()),
            Token::Position(k) => Some(k.get()),
            Token::SketchX(l) | Token::SketchY(l) => Some(l.level()),
            Token::Boundary(b) => Some(b.index()),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Structural(s) => f.write_str(s),
            Token::Orientation(n) => write!(f, "<A{}>", n.get()),
            Token::Position(k) => write!(f, "<P{}>", k.get()),
            Token::SketchX(l) => write!(f, "<S{}X>", l.level()),
            Token::SketchY(l) => write!(f, "<S{}Y>", l.level()),
            Token::Boundary(b) => f.write_str(b.as_str()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Orientation,
    Position,
    SketchX,
    SketchY,
    Boundary,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Orientation,
        Family::Position,
        Family::SketchX,
        Family::SketchY,
        Family::Boundary,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Orientation => "orientation",
            Family::Position => "position",
            Family::SketchX => "sketch_x",
            Family::SketchY => "sketch_y",
            Family::Boundary => "boundary",
        }
    }

    pub fn size(self) -> usize {
        match self {
            Family::Orientation => ORIENTATION_COUNT,
            Family::Position => POSITION_COUNT,
            Family::SketchX | Family::SketchY => SKETCH_LEVELS,
            Family::Boundary => Boundary::ALL.len(),
        }
    }

    /// First id of the family's contiguous range.
    pub fn offset(self) -> usize {
        Family::ALL
            .iter()
            .take_while(|f| **f != self)
            .map(|f| f.size())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabEntry {
    pub id: usize,
    pub surface: String,
    pub family: Family,
    pub index: usize,
}

/// The added spatial and boundary tokens, ids contiguous per family.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    pub entries: Vec<VocabEntry>,
}

pub const VOCABULARY_SIZE: usize =
    ORIENTATION_COUNT + POSITION_COUNT + 2 * SKETCH_LEVELS + Boundary::ALL.len();

fn token_at(family: Family, index: usize) -> Token {
    match family {
        Family::Orientation => Token::Orientation(OrientationIndex::new(index).unwrap()),
        Family::Position => Token::Position(PositionIndex::new(index).unwrap()),
        Family::SketchX => Token::SketchX(SketchLevel::new(SketchAxis::X, index).unwrap()),
        Family::SketchY => Token::SketchY(SketchLevel::new(SketchAxis::Y, index).unwrap()),
        Family::Boundary => Token::Boundary(Boundary::ALL[index]),
    }
}

impl Vocabulary {
    fn build() -> Self {
        let mut entries = Vec::with_capacity(VOCABULARY_SIZE);
        for family in Family::ALL {
            for index in 0..family.size() {
                entries.push(VocabEntry {
                    id: entries.len(),
                    surface: token_at(family, index).to_string(),
                    family,
                    index,
                });
            }
        }
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Id of a spatial or boundary token; `None` for structural tokens.
    pub fn id_of(&self, token: &Token) -> Option<usize> {
        Some(token.family()?.offset() + token.family_index()?)
    }

    pub fn token(&self, id: usize) -> Option<Token> {
        let e = self.entries.get(id)?;
        Some(token_at(e.family, e.index))
    }

    /// Tab-separated export: a header line, then `id surface family index` per token.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("id\tsurface\tfamily\tindex\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                e.id,
                e.surface,
                e.family.as_str(),
                e.index
            ));
        }
        out
    }
}

/// The shared vocabulary table, built on first use.
pub fn vocabulary() -> &'static Vocabulary {
    static VOCAB: OnceLock<Vocabulary> = OnceLock::new();
    VOCAB.get_or_init(Vocabulary::build)
}
