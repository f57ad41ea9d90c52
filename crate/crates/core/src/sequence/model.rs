use std::fmt;

/// A point in sketch-local coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn map(self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(f(self.x), f(self.y))
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    Line,
    Arc,
    Circle,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::Line => "line",
            CurveKind::Arc => "arc",
            CurveKind::Circle => "circle",
        }
    }
}

/// One sketch curve. A circle is stored as a point on the circle plus its center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveCommand {
    Line {
        start: Point2,
        end: Point2,
    },
    Arc {
        start: Point2,
        mid: Point2,
        end: Point2,
    },
    Circle {
        start: Point2,
        center: Point2,
    },
}

impl CurveCommand {
    pub fn kind(&self) -> CurveKind {
        match self {
            CurveCommand::Line { .. } => CurveKind::Line,
            CurveCommand::Arc { .. } => CurveKind::Arc,
            CurveCommand::Circle { .. } => CurveKind::Circle,
        }
    }

    pub fn start(&self) -> Point2 {
        match *self {
            CurveCommand::Line { start, .. }
            | CurveCommand::Arc { start, .. }
            | CurveCommand::Circle { start, .. } => start,
        }
    }

    /// End point along the curve; a circle ends where it starts.
    pub fn end(&self) -> Point2 {
        match *self {
            CurveCommand::Line { end, .. } | CurveCommand::Arc { end, .. } => end,
            CurveCommand::Circle { start, .. } => start,
        }
    }

    /// Parameter points in serialization order.
    pub fn points(&self) -> Vec<Point2> {
        match *self {
            CurveCommand::Line { start, end } => vec![start, end],
            CurveCommand::Arc { start, mid, end } => vec![start, mid, end],
            CurveCommand::Circle { start, center } => vec![start, center],
        }
    }

    /// Rebuilds a curve of the same kind from mapped parameter points.
    pub fn map_points(&self, f: impl Fn(Point2) -> Point2) -> Self {
        match *self {
            CurveCommand::Line { start, end } => CurveCommand::Line {
                start: f(start),
                end: f(end),
            },
            CurveCommand::Arc { start, mid, end } => CurveCommand::Arc {
                start: f(start),
                mid: f(mid),
                end: f(end),
            },
            CurveCommand::Circle { start, center } => CurveCommand::Circle {
                start: f(start),
                center: f(center),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Loop {
    pub curves: Vec<CurveCommand>,
}

impl Loop {
    pub fn new(curves: Vec<CurveCommand>) -> Self {
        Self { curves }
    }

    /// Closed polyline loop through `corners` made of line segments.
    pub fn polygon(corners: &[Point2]) -> Self {
        let n = corners.len();
        let curves = (0..n)
            .map(|i| CurveCommand::Line {
                start: corners[i],
                end: corners[(i + 1) % n],
            })
            .collect();
        Self { curves }
    }

    pub fn circle(center: Point2, radius: f64) -> Self {
        Self {
            curves: vec![CurveCommand::Circle {
                start: Point2::new(center.x + radius, center.y),
                center,
            }],
        }
    }
}

/// First loop is the outer boundary, the rest are holes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SketchProfile {
    pub loops: Vec<Loop>,
}

impl SketchProfile {
    pub fn new(loops: Vec<Loop>) -> Self {
        Self { loops }
    }

    pub fn points(&self) -> impl Iterator<Item = Point2> + '_ {
        self.loops
            .iter()
            .flat_map(|l| l.curves.iter())
            .flat_map(|c| c.points())
    }

    pub fn map_points(&self, f: impl Fn(Point2) -> Point2 + Copy) -> Self {
        Self {
            loops: self
                .loops
                .iter()
                .map(|l| Loop::new(l.curves.iter().map(|c| c.map_points(f)).collect()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BoolOp {
    #[default]
    NewBody,
    Join,
    Cut,
    Intersect,
}

impl BoolOp {
    pub const ALL: [BoolOp; 4] = [
        BoolOp::NewBody,
        BoolOp::Join,
        BoolOp::Cut,
        BoolOp::Intersect,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoolOp::NewBody => "new_body",
            BoolOp::Join => "join",
            BoolOp::Cut => "cut",
            BoolOp::Intersect => "intersect",
        }
    }

    pub fn from_str_opt(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.as_str() == s)
    }
}

/// Recorded for fidelity with source data; geometry uses `e1`/`e2` directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ExtentType {
    #[default]
    OneSide,
    Symmetric,
    TwoSides,
}

impl ExtentType {
    pub const ALL: [ExtentType; 3] = [
        ExtentType::OneSide,
        ExtentType::Symmetric,
        ExtentType::TwoSides,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExtentType::OneSide => "one_side",
            ExtentType::Symmetric => "symmetric",
            ExtentType::TwoSides => "two_sides",
        }
    }

    pub fn from_str_opt(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.as_str() == s)
    }
}

/// Places a profile in space and sweeps it along the plane normal.
///
/// A profile point `(x, y)` lands at `origin + Rᵀ·(scale·x, scale·y, z)` where `R` is
/// the plane frame built from `(theta, phi, gamma)` and `z ∈ [-e2, e1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtrudeCommand {
    pub theta: f64,
    pub phi: f64,
    pub gamma: f64,
    pub origin: [f64; 3],
    pub scale: f64,
    pub e1: f64,
    pub e2: f64,
    pub bool_op: BoolOp,
    pub extent_type: ExtentType,
}

impl Default for ExtrudeCommand {
    fn default() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
            gamma: 0.0,
            origin: [0.0; 3],
            scale: 1.0,
            e1: 1.0,
            e2: 0.0,
            bool_op: BoolOp::NewBody,
            extent_type: ExtentType::OneSide,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub profile: SketchProfile,
    pub extrude: ExtrudeCommand,
}

/// An ordered sketch-extrude sequence.
///
/// Construction does not check invariants; use [`crate::sequence::parse_model`] or
/// [`crate::sequence::validate_model`] for that.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CadModel {
    pub steps: Vec<Step>,
}

impl CadModel {
    pub fn new(steps: Vec<Step>) -> Self {
        Self { steps }
    }

    pub fn curve_count(&self) -> usize {
        self.steps
            .iter()
            .flat_map(|s| s.profile.loops.iter())
            .map(|l| l.curves.len())
            .sum()
    }

    /// Rounds every number to the canonical precision used by the JSON format.
    pub fn canonicalized(&self) -> Self {
        let r = canonical_f64;
        Self {
            steps: self
                .steps
                .iter()
                .map(|s| Step {
                    profile: s.profile.map_points(|p| p.map(r)),
                    extrude: ExtrudeCommand {
                        theta: r(s.extrude.theta),
                        phi: r(s.extrude.phi),
                        gamma: r(s.extrude.gamma),
                        origin: s.extrude.origin.map(r),
                        scale: r(s.extrude.scale),
                        e1: r(s.extrude.e1),
                        e2: r(s.extrude.e2),
                        ..s.extrude
                    },
                })
                .collect(),
        }
    }
}

/// Significant decimal digits kept by the canonical number format.
pub const CANONICAL_DIGITS: usize = 6;

/// Rounds to [`CANONICAL_DIGITS`] significant digits. Negative zero becomes zero.
pub fn canonical_f64(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return if v == 0.0 { 0.0 } else { v };
    }
    let s = format!("{:.*e}", CANONICAL_DIGITS - 1, v);
    let r: f64 = s.parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Formats a number in canonical form (shortest text that reproduces the rounded value).
pub fn format_canonical(v: f64) -> String {
    let r = canonical_f64(v);
    let s = format!("{r}");
    // `{}` never uses exponents; keep tiny/huge values compact.
    if s.len() > 16 {
        format!("{r:e}")
    } else {
        s
    }
}

/// Index path of a location inside a model, used by diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Location {
    pub step: Option<usize>,
    pub loop_index: Option<usize>,
    pub curve: Option<usize>,
}

impl Location {
    pub fn model() -> Self {
        Self::default()
    }

    pub fn step(step: usize) -> Self {
        Self {
            step: Some(step),
            ..Self::default()
        }
    }

    pub fn loop_at(step: usize, loop_index: usize) -> Self {
        Self {
            step: Some(step),
            loop_index: Some(loop_index),
            curve: None,
        }
    }

    pub fn curve_at(step: usize, loop_index: usize, curve: usize) -> Self {
        Self {
            step: Some(step),
            loop_index: Some(loop_index),
            curve: Some(curve),
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(s) = self.step {
            parts.push(format!("step {s}"));
        }
        if let Some(l) = self.loop_index {
            parts.push(format!("loop {l}"));
        }
        if let Some(c) = self.curve {
            parts.push(format!("curve {c}"));
        }
        if parts.is_empty() {
            f.write_str("model")
        } else {
            f.write_str(&parts.join(", "))
        }
    }
}
