//! Command and parameter accuracy under index alignment.

use crate::sequence::{CadModel, CurveKind};
use crate::tokenizer::{
    bin_of, profile_bounds, quantize_sketch, signed_angle_bin, theta_bin, ProfileNormalization,
    SketchAxis, POSITION_GRID,
};

/// Default tolerance, in quantization levels, for a parameter to count as correct.
pub const DEFAULT_ETA: u32 = 3;
/// Levels used for extrusion distances.
pub const EXTENT_LEVELS: usize = POSITION_GRID;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CommandType {
    Line,
    Arc,
    Circle,
    Extrude,
}

impl From<CurveKind> for CommandType {
    fn from(k: CurveKind) -> Self {
        match k {
            CurveKind::Line => CommandType::Line,
            CurveKind::Arc => CommandType::Arc,
            CurveKind::Circle => CommandType::Circle,
        }
    }
}

/// One flattened command with its quantized parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedCommand {
    pub kind: CommandType,
    pub levels: Vec<i64>,
}

/// Curves in order followed by one extrude marker per step.
pub fn command_types(m: &CadModel) -> Vec<CommandType> {
    let mut out = Vec::new();
    for s in &m.steps {
        for l in &s.profile.loops {
            out.extend(l.curves.iter().map(|c| CommandType::from(c.kind())));
        }
        out.push(CommandType::Extrude);
    }
    out
}

/// Flattens a model and quantizes every counted parameter: sketch points at 128 levels
/// in their profile's own box, angles at 9, origin at 36 per axis, e1/e2 at 36 over
/// `[0,1]`. Scale, boolean and extent type are not counted.
pub fn quantized_commands(m: &CadModel) -> Vec<QuantizedCommand> {
    let mut out = Vec::new();
    for s in &m.steps {
        let (lo, hi) = profile_bounds(&s.profile).unwrap_or_default();
        let norm = ProfileNormalization::from_bounds(lo, hi);
        for l in &s.profile.loops {
            for c in &l.curves {
                let mut levels = Vec::new();
                for p in c.points() {
                    let u = norm.normalize(p);
                    for (v, axis) in [(u.x, SketchAxis::X), (u.y, SketchAxis::Y)] {
                        let level = quantize_sketch(v, axis).map_or(-1, |l| l.level() as i64);
                        levels.push(level);
                    }
                }
                out.push(QuantizedCommand {
                    kind: c.kind().into(),
                    levels,
                });
            }
        }
        let e = &s.extrude;
        let cell = |v: f64, n: usize| bin_of(v.clamp(0.0, 1.0), n) as i64;
        let mut levels = vec![
            theta_bin(e.theta) as i64,
            signed_angle_bin(e.phi) as i64,
            signed_angle_bin(e.gamma) as i64,
        ];
        levels.extend(e.origin.iter().map(|&v| cell(v, POSITION_GRID)));
        levels.push(cell(e.e1, EXTENT_LEVELS));
        levels.push(cell(e.e2, EXTENT_LEVELS));
        out.push(QuantizedCommand {
            kind: CommandType::Extrude,
            levels,
        });
    }
    out
}

/// `100·matches/max(len)` over index-aligned command types; `None` (parse failure)
/// scores 0.
pub fn acc_cmd(pred: Option<&CadModel>, gt: &CadModel) -> f64 {
    let Some(pred) = pred else {
        return 0.0;
    };
    let (a, b) = (command_types(pred), command_types(gt));
    let denom = a.len().max(b.len());
    if denom == 0 {
        return 100.0;
    }
    let matches = a.iter().zip(&b).filter(|(x, y)| x == y).count();
    100.0 * matches as f64 / denom as f64
}

/// Share of parameters within `eta` levels, over positions whose command types match.
pub fn acc_param(pred: Option<&CadModel>, gt: &CadModel, eta: u32) -> f64 {
    let Some(pred) = pred else {
        return 0.0;
    };
    let (a, b) = (quantized_commands(pred), quantized_commands(gt));
    let mut total = 0usize;
    let mut correct = 0usize;
    for (x, y) in a.iter().zip(&b).filter(|(x, y)| x.kind == y.kind) {
        for (p, q) in x.levels.iter().zip(&y.levels) {
            total += 1;
            if (p - q).unsigned_abs() <= eta as u64 {
                correct += 1;
            }
        }
    }
    if total == 0 {
        return 100.0;
    }
    100.0 * correct as f64 / total as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{CurveCommand, Loop, Point2, SketchProfile};
    use crate::synth::unit_cube;

    fn triangle_model() -> CadModel {
        let mut m = unit_cube();
        m.steps[0].profile = SketchProfile::new(vec![Loop::polygon(&[
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.5, 1.0),
        ])]);
        m
    }

    #[test]
    fn identity_scores_full() {
        let m = triangle_model();
        assert_eq!(acc_cmd(Some(&m), &m), 100.0);
        assert_eq!(acc_param(Some(&m), &m, DEFAULT_ETA), 100.0);
        assert_eq!(acc_cmd(None, &m), 0.0);
        assert_eq!(acc_param(None, &m, DEFAULT_ETA), 0.0);
    }

    #[test]
    fn parameter_count() {
        // 3 lines with 4 coordinates each plus 8 extrude parameters.
        let q = quantized_commands(&triangle_model());
        assert_eq!(q.iter().map(|c| c.levels.len()).sum::<usize>(), 20);
    }

    fn shift_apex(levels: f64) -> CadModel {
        // The apex x = 0.5 sits in level 64; shift it by whole levels (bbox unchanged).
        let mut m = triangle_model();
        let apex = Point2::new(0.5 + levels / 128.0, 1.0);
        if let CurveCommand::Line { end, .. } = &mut m.steps[0].profile.loops[0].curves[1] {
            *end = apex;
        }
        m
    }

    #[test]
    fn five_level_shift_costs_one_parameter() {
        let gt = triangle_model();
        assert_eq!(acc_param(Some(&shift_apex(5.0)), &gt, 3), 95.0);
    }

    #[test]
    fn three_level_shift_is_tolerated() {
        let gt = triangle_model();
        assert_eq!(acc_param(Some(&shift_apex(3.0)), &gt, 3), 100.0);
        assert_eq!(acc_param(Some(&shift_apex(4.0)), &gt, 3), 95.0);
    }

    #[test]
    fn flipped_type_costs_one_command() {
        let gt = triangle_model();
        let mut pred = gt.clone();
        pred.steps[0].profile.loops[0].curves[0] = CurveCommand::Arc {
            start: Point2::new(0.0, 0.0),
            mid: Point2::new(0.5, 0.1),
            end: Point2::new(1.0, 0.0),
        };
        assert_eq!(acc_cmd(Some(&pred), &gt), 75.0);
        // The flipped position is skipped; remaining parameters all match.
        assert_eq!(acc_param(Some(&pred), &gt, 3), 100.0);
    }
}
