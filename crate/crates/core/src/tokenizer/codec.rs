//! Whole-model encoding to token streams and strict decoding back.
//!
//! Stream grammar (see `docs/token-grammar.md`):
//!
//! ```text
//! model   = "model" step { step } "end_model"
//! step    = "sketch" "bbox" num num num num loop { loop } "end_sketch" extrude
//! loop    = "loop" curve { curve } "end_loop"
//! curve   = "line" pt pt | "arc" pt pt pt | "circle" pt pt
//! pt      = <sketch_position_x> SX </sketch_position_x> <sketch_position_y> SY </sketch_position_y>
//! extrude = "extrude" <angles> A </angles> <spatial_position> P </spatial_position>
//!           "scale" num "e1" num "e2" num boolean extent "end_extrude"
//! ```

use std::fmt;
use std::str::FromStr;

use super::quantize::{
    dequantize_orientation, dequantize_position, dequantize_sketch, profile_bounds,
    quantize_orientation, quantize_position, quantize_sketch, ProfileNormalization, QuantizeError,
    SketchAxis,
};
use super::vocab::{Boundary, Token};
use crate::sequence::{
    format_canonical, validate_model, BoolOp, CadModel, CurveCommand, CurveKind, ExtentType,
    ExtrudeCommand, Loop, Point2, SketchProfile, Step,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TokenizeError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("step {step}: {source}")]
    Quantize {
        step: usize,
        #[source]
        source: QuantizeError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("grammar violation at token {position}: expected {expected}, found {found:?}")]
    GrammarViolation {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("sequence ended early: expected {expected}")]
    IncompleteSequence { expected: String },
}

/// A flat token stream. Its text form is the surface strings separated by single spaces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TokenizedSequence {
    pub tokens: Vec<Token>,
}

impl TokenizedSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Splits on whitespace. Malformed bracketed tokens are grammar violations.
    pub fn parse(text: &str) -> Result<Self, DecodeError> {
        let tokens = text
            .split_whitespace()
            .enumerate()
            .map(|(i, s)| {
                Token::parse(s).map_err(|_| DecodeError::GrammarViolation {
                    position: i,
                    expected: "a known token".into(),
                    found: s.to_string(),
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { tokens })
    }
}

impl fmt::Display for TokenizedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl FromStr for TokenizedSequence {
    type Err = DecodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

struct Encoder {
    tokens: Vec<Token>,
}

impl Encoder {
    fn kw(&mut self, s: &str) {
        self.tokens.push(Token::structural(s));
    }

    fn num(&mut self, v: f64) {
        self.tokens.push(Token::Structural(format_canonical(v)));
    }

    fn wrapped(&mut self, open: Boundary, t: Token, close: Boundary) {
        self.tokens.push(Token::Boundary(open));
        self.tokens.push(t);
        self.tokens.push(Token::Boundary(close));
    }
}

/// Encodes a valid model whose sketch origins lie in the unit cube.
///
/// Numbers are first rounded to canonical precision so the profile bounding box in
/// the stream decodes to exactly the box used for quantization.
pub fn encode_model(m: &CadModel) -> Result<TokenizedSequence, TokenizeError> {
    if m.steps.is_empty() {
        return Err(TokenizeError::InvalidModel("model has no steps".into()));
    }
    if let Some(v) = validate_model(m).violations.first() {
        return Err(TokenizeError::InvalidModel(v.to_string()));
    }
    let m = m.canonicalized();
    let mut enc = Encoder { tokens: Vec::new() };
    enc.kw("model");
    for (i, step) in m.steps.iter().enumerate() {
        let qerr = |source| TokenizeError::Quantize { step: i, source };
        let (lo, hi) = profile_bounds(&step.profile).unwrap_or_default();
        let norm = ProfileNormalization::from_bounds(lo, hi);
        enc.kw("sketch");
        enc.kw("bbox");
        for v in [lo.x, lo.y, hi.x, hi.y] {
            enc.num(v);
        }
        for l in &step.profile.loops {
            enc.kw("loop");
            for c in &l.curves {
                enc.kw(c.kind().as_str());
                for p in c.points() {
                    let u = norm.normalize(p);
                    let x = quantize_sketch(u.x, SketchAxis::X).map_err(qerr)?;
                    let y = quantize_sketch(u.y, SketchAxis::Y).map_err(qerr)?;
                    enc.wrapped(
                        Boundary::SketchXOpen,
                        Token::SketchX(x),
                        Boundary::SketchXClose,
                    );
                    enc.wrapped(
                        Boundary::SketchYOpen,
                        Token::SketchY(y),
                        Boundary::SketchYClose,
                    );
                }
            }
            enc.kw("end_loop");
        }
        enc.kw("end_sketch");

        let e = &step.extrude;
        let a = quantize_orientation(e.theta, e.phi, e.gamma).map_err(qerr)?;
        let p = quantize_position(e.origin).map_err(|err| match err {
            QuantizeError::OutOfCube { .. } => TokenizeError::InvalidModel(format!(
                "step {i}: sketch origin outside the unit cube (normalize the model first)"
            )),
            other => qerr(other),
        })?;
        enc.kw("extrude");
        enc.wrapped(
            Boundary::AnglesOpen,
            Token::Orientation(a),
            Boundary::AnglesClose,
        );
        enc.wrapped(
            Boundary::PositionOpen,
            Token::Position(p),
            Boundary::PositionClose,
        );
        enc.kw("scale");
        enc.num(e.scale);
        enc.kw("e1");
        enc.num(e.e1);
        enc.kw("e2");
        enc.num(e.e2);
        enc.kw(e.bool_op.as_str());
        enc.kw(e.extent_type.as_str());
        enc.kw("end_extrude");
    }
    enc.kw("end_model");
    Ok(TokenizedSequence { tokens: enc.tokens })
}

struct Decoder<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Decoder<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self, expected: &str) -> Result<&'a Token, DecodeError> {
        let t = self
            .tokens
            .get(self.pos)
            .ok_or_else(|| DecodeError::IncompleteSequence {
                expected: expected.to_string(),
            })?;
        self.pos += 1;
        Ok(t)
    }

    fn violation(&self, expected: &str) -> DecodeError {
        let position = self.pos.saturating_sub(1);
        DecodeError::GrammarViolation {
            position,
            expected: expected.to_string(),
            found: self.tokens[position].to_string(),
        }
    }

    fn peek_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Token::Structural(s)) if s == kw)
    }

    fn kw(&mut self, kw: &str) -> Result<(), DecodeError> {
        match self.next(kw)? {
            Token::Structural(s) if s == kw => Ok(()),
            _ => Err(self.violation(&format!("{kw:?}"))),
        }
    }

    /// Any structural keyword, returned for the caller to interpret.
    fn word(&mut self, expected: &str) -> Result<&'a str, DecodeError> {
        match self.next(expected)? {
            Token::Structural(s) => Ok(s),
            _ => Err(self.violation(expected)),
        }
    }

    fn num(&mut self) -> Result<f64, DecodeError> {
        let s = self.word("a number")?;
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.violation("a finite number")),
        }
    }

    fn boundary(&mut self, b: Boundary) -> Result<(), DecodeError> {
        match self.next(b.as_str())? {
            Token::Boundary(x) if *x == b => Ok(()),
            _ => Err(self.violation(b.as_str())),
        }
    }

    fn enclosed(
        &mut self,
        open: Boundary,
        close: Boundary,
        what: &str,
    ) -> Result<&'a Token, DecodeError> {
        self.boundary(open)?;
        let t = self.next(what)?;
        if t.family() != Some(family_of(open)) {
            return Err(self.violation(what));
        }
        self.boundary(close)?;
        Ok(t)
    }

    fn point(&mut self, norm: &ProfileNormalization) -> Result<Point2, DecodeError> {
        let x = match self.enclosed(Boundary::SketchXOpen, Boundary::SketchXClose, "<S..X>")? {
            Token::SketchX(l) => dequantize_sketch(*l),
            _ => unreachable!(),
        };
        let y = match self.enclosed(Boundary::SketchYOpen, Boundary::SketchYClose, "<S..Y>")? {
            Token::SketchY(l) => dequantize_sketch(*l),
            _ => unreachable!(),
        };
        Ok(denormalize(norm, Point2::new(x, y)))
    }

    fn curve(&mut self, norm: &ProfileNormalization) -> Result<CurveCommand, DecodeError> {
        let kind = match self.word("a curve type")? {
            "line" => CurveKind::Line,
            "arc" => CurveKind::Arc,
            "circle" => CurveKind::Circle,
            _ => return Err(self.violation("\"line\", \"arc\" or \"circle\"")),
        };
        Ok(match kind {
            CurveKind::Line => CurveCommand::Line {
                start: self.point(norm)?,
                end: self.point(norm)?,
            },
            CurveKind::Arc => CurveCommand::Arc {
                start: self.point(norm)?,
                mid: self.point(norm)?,
                end: self.point(norm)?,
            },
            CurveKind::Circle => CurveCommand::Circle {
                start: self.point(norm)?,
                center: self.point(norm)?,
            },
        })
    }

    fn profile(&mut self) -> Result<SketchProfile, DecodeError> {
        self.kw("sketch")?;
        self.kw("bbox")?;
        let lo = Point2::new(self.num()?, self.num()?);
        let hi = Point2::new(self.num()?, self.num()?);
        if hi.x < lo.x || hi.y < lo.y {
            return Err(self.violation("bbox max at or above min"));
        }
        let norm = ProfileNormalization::from_bounds(lo, hi);
        let mut loops = Vec::new();
        loop {
            self.kw("loop")?;
            let mut curves = vec![self.curve(&norm)?];
            while !self.peek_kw("end_loop") {
                if self.peek().is_none() {
                    return Err(DecodeError::IncompleteSequence {
                        expected: "\"end_loop\"".into(),
                    });
                }
                curves.push(self.curve(&norm)?);
            }
            self.kw("end_loop")?;
            loops.push(Loop::new(curves));
            if self.peek_kw("end_sketch") {
                self.kw("end_sketch")?;
                return Ok(SketchProfile::new(loops));
            }
        }
    }

    fn extrude(&mut self) -> Result<ExtrudeCommand, DecodeError> {
        self.kw("extrude")?;
        let (theta, phi, gamma) =
            match self.enclosed(Boundary::AnglesOpen, Boundary::AnglesClose, "<A..>")? {
                Token::Orientation(n) => dequantize_orientation(*n),
                _ => unreachable!(),
            };
        let origin =
            match self.enclosed(Boundary::PositionOpen, Boundary::PositionClose, "<P..>")? {
                Token::Position(k) => dequantize_position(*k),
                _ => unreachable!(),
            };
        self.kw("scale")?;
        let scale = self.num()?;
        self.kw("e1")?;
        let e1 = self.num()?;
        self.kw("e2")?;
        let e2 = self.num()?;
        let w = self.word("a boolean operation")?;
        let bool_op =
            BoolOp::from_str_opt(w).ok_or_else(|| self.violation("a boolean operation"))?;
        let w = self.word("an extent type")?;
        let extent_type =
            ExtentType::from_str_opt(w).ok_or_else(|| self.violation("an extent type"))?;
        self.kw("end_extrude")?;
        Ok(ExtrudeCommand {
            theta,
            phi,
            gamma,
            origin,
            scale,
            e1,
            e2,
            bool_op,
            extent_type,
        })
    }

    fn model(&mut self) -> Result<CadModel, DecodeError> {
        self.kw("model")?;
        let mut steps = Vec::new();
        loop {
            let profile = self.profile()?;
            let extrude = self.extrude()?;
            steps.push(Step { profile, extrude });
            if self.peek_kw("end_model") {
                break;
            }
            if self.peek().is_none() {
                return Err(DecodeError::IncompleteSequence {
                    expected: "\"sketch\" or \"end_model\"".into(),
                });
            }
        }
        self.kw("end_model")?;
        if self.pos < self.tokens.len() {
            self.pos += 1;
            return Err(self.violation("end of stream"));
        }
        Ok(CadModel::new(steps))
    }
}

fn family_of(open: Boundary) -> super::vocab::Family {
    use super::vocab::Family;
    match open {
        Boundary::AnglesOpen | Boundary::AnglesClose => Family::Orientation,
        Boundary::PositionOpen | Boundary::PositionClose => Family::Position,
        Boundary::SketchXOpen | Boundary::SketchXClose => Family::SketchX,
        Boundary::SketchYOpen | Boundary::SketchYClose => Family::SketchY,
    }
}

/// Inverse of profile normalization; a degenerate axis decodes to its minimum.
fn denormalize(norm: &ProfileNormalization, u: Point2) -> Point2 {
    let [dx, dy] = norm.degenerate();
    let p = norm.denormalize(u);
    Point2::new(
        if dx { norm.bbox_min.x } else { p.x },
        if dy { norm.bbox_min.y } else { p.y },
    )
}

/// Decodes a stream into the quantized model: every tokenized parameter becomes the
/// center of its bin, structural numbers are taken as written.
pub fn decode_model(t: &TokenizedSequence) -> Result<CadModel, DecodeError> {
    Decoder {
        tokens: &t.tokens,
        pos: 0,
    }
    .model()
}

/// Parses stream text and decodes it.
pub fn decode_str(text: &str) -> Result<CadModel, DecodeError> {
    decode_model(&TokenizedSequence::parse(text)?)
}
