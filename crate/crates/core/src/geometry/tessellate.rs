//! Chord approximation of sketch profiles and planar polygon utilities.

use std::f64::consts::TAU;

use crate::sequence::{CurveCommand, Point2, SketchProfile};

pub const DEFAULT_SEGMENTS_PER_TURN: usize = 64;
pub const MIN_ARC_SEGMENTS: usize = 8;
const COINCIDENT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum TessellationError {
    #[error("loop {loop_index} intersects itself")]
    SelfIntersectingLoop { loop_index: usize },
    #[error("hole loop {loop_index} is not inside the outer loop")]
    HoleOutsideOuter { loop_index: usize },
    #[error("loop {loop_index} encloses no area")]
    DegenerateLoop { loop_index: usize },
}

/// Polygonal approximation of a profile: outer loop counter-clockwise, holes clockwise.
/// Polygons are implicitly closed (last vertex connects to the first).
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarRegion {
    pub loops: Vec<Vec<[f64; 2]>>,
}

impl PlanarRegion {
    pub fn outer(&self) -> &[[f64; 2]] {
        &self.loops[0]
    }

    pub fn holes(&self) -> &[Vec<[f64; 2]>] {
        &self.loops[1..]
    }

    pub fn outer_area(&self) -> f64 {
        signed_area(self.outer())
    }

    /// Outer area minus hole areas.
    pub fn area(&self) -> f64 {
        self.loops.iter().map(|l| signed_area(l)).sum()
    }

    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in self.loops.iter().flatten() {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// Even-odd containment over all loops.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.loops
            .iter()
            .fold(false, |inside, l| inside ^ crossings_odd(l, p))
    }

    /// Vertices of all loops in order, matching the indices returned by [`Self::triangulate`].
    pub fn vertices(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        self.loops.iter().flatten().copied()
    }

    /// Ear-clipping triangulation of the region; triangles are counter-clockwise.
    pub fn triangulate(&self) -> Option<Vec<[usize; 3]>> {
        let flat: Vec<f64> = self.vertices().flatten().collect();
        let mut holes = Vec::new();
        let mut start = 0;
        for l in &self.loops[..self.loops.len() - 1] {
            start += l.len();
            holes.push(start);
        }
        let idx = earcutr::earcut(&flat, &holes, 2).ok()?;
        let verts: Vec<[f64; 2]> = self.vertices().collect();
        let tris = idx
            .chunks_exact(3)
            .map(|t| {
                let (a, b, c) = (t[0], t[1], t[2]);
                if orient(verts[a], verts[b], verts[c]) < 0.0 {
                    [a, c, b]
                } else {
                    [a, b, c]
                }
            })
            .collect();
        Some(tris)
    }
}

pub fn signed_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut twice = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        twice += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * twice
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Ray-crossing parity of `p` against one closed polygon.
pub fn crossings_odd(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

/// Closed-segment intersection test (touching counts).
pub fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

fn self_intersects(poly: &[[f64; 2]]) -> bool {
    let n = poly.len();
    let seg = |i: usize| (poly[i], poly[(i + 1) % n]);
    for i in 0..n {
        let (a, b) = seg(i);
        // Adjacent edge folding back onto this one.
        let (_, c) = seg((i + 1) % n);
        if orient(a, b, c) == 0.0 {
            let back = (c[0] - b[0]) * (a[0] - b[0]) + (c[1] - b[1]) * (a[1] - b[1]);
            if back > 0.0 {
                return true;
            }
        }
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = seg(j);
            if segments_intersect(a, b, c, d) {
                return true;
            }
        }
    }
    false
}

/// Center and radius of the circle through three points, if they are not collinear.
pub fn circumcircle(a: Point2, b: Point2, c: Point2) -> Option<(Point2, f64)> {
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if d == 0.0 {
        return None;
    }
    let a2 = a.x * a.x + a.y * a.y;
    let b2 = b.x * b.x + b.y * b.y;
    let c2 = c.x * c.x + c.y * c.y;
    let ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    let uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    let center = Point2::new(ux, uy);
    Some((center, center.distance(a)))
}

/// Number of chords used for an arc sweeping `sweep` radians.
pub fn arc_segments(sweep: f64, segments_per_turn: usize) -> usize {
    let n = (segments_per_turn as f64 * sweep / TAU).ceil() as usize;
    n.max(MIN_ARC_SEGMENTS)
}

/// Points of a curve from its start up to, but excluding, its end point.
pub fn curve_polyline(c: &CurveCommand, segments_per_turn: usize) -> Vec<[f64; 2]> {
    match *c {
        CurveCommand::Line { start, .. } => vec![[start.x, start.y]],
        CurveCommand::Circle { start, center } => {
            let r = start.distance(center);
            let a0 = (start.y - center.y).atan2(start.x - center.x);
            let n = segments_per_turn.max(MIN_ARC_SEGMENTS);
            let mut pts = vec![[start.x, start.y]];
            for k in 1..n {
                let a = a0 + TAU * k as f64 / n as f64;
                pts.push([center.x + r * a.cos(), center.y + r * a.sin()]);
            }
            pts
        }
        CurveCommand::Arc { start, mid, end } => {
            let Some((center, r)) = circumcircle(start, mid, end) else {
                return vec![[start.x, start.y], [mid.x, mid.y]];
            };
            let ang = |p: Point2| (p.y - center.y).atan2(p.x - center.x);
            let (a0, am, a1) = (ang(start), ang(mid), ang(end));
            let ccw = (a1 - a0).rem_euclid(TAU);
            let ccw = if ccw == 0.0 { TAU } else { ccw };
            let (dir, sweep) = if (am - a0).rem_euclid(TAU) < ccw {
                (1.0, ccw)
            } else {
                (-1.0, TAU - ccw)
            };
            let n = arc_segments(sweep, segments_per_turn);
            let mut pts = vec![[start.x, start.y]];
            for k in 1..n {
                let a = a0 + dir * sweep * k as f64 / n as f64;
                pts.push([center.x + r * a.cos(), center.y + r * a.sin()]);
            }
            pts
        }
    }
}

/// Approximates each loop by chords and orients the result (outer CCW, holes CW).
pub fn tessellate_profile(
    profile: &SketchProfile,
    segments_per_turn: usize,
) -> Result<PlanarRegion, TessellationError> {
    let mut loops = Vec::with_capacity(profile.loops.len());
    for (li, l) in profile.loops.iter().enumerate() {
        let mut poly: Vec<[f64; 2]> = Vec::new();
        for c in &l.curves {
            for p in curve_polyline(c, segments_per_turn) {
                let dup = poly.last().is_some_and(|q| {
                    (q[0] - p[0]).abs() <= COINCIDENT && (q[1] - p[1]).abs() <= COINCIDENT
                });
                if !dup {
                    poly.push(p);
                }
            }
        }
        while poly.len() > 1 {
            let (f, l) = (poly[0], poly[poly.len() - 1]);
            if (f[0] - l[0]).abs() <= COINCIDENT && (f[1] - l[1]).abs() <= COINCIDENT {
                poly.pop();
            } else {
                break;
            }
        }
        let area = signed_area(&poly);
        if poly.len() < 3 || area.abs() <= crate::sequence::MIN_PROFILE_AREA {
            return Err(TessellationError::DegenerateLoop { loop_index: li });
        }
        if self_intersects(&poly) {
            return Err(TessellationError::SelfIntersectingLoop { loop_index: li });
        }
        let want_ccw = li == 0;
        if (area > 0.0) != want_ccw {
            poly.reverse();
        }
        loops.push(poly);
    }
    if loops.is_empty() {
        return Err(TessellationError::DegenerateLoop { loop_index: 0 });
    }
    let outer = &loops[0];
    for (hi, hole) in loops.iter().enumerate().skip(1) {
        let inside = hole.iter().all(|&p| crossings_odd(outer, p));
        let crosses = (0..hole.len()).any(|i| {
            let (a, b) = (hole[i], hole[(i + 1) % hole.len()]);
            (0..outer.len())
                .any(|j| segments_intersect(a, b, outer[j], outer[(j + 1) % outer.len()]))
        });
        if !inside || crosses {
            return Err(TessellationError::HoleOutsideOuter { loop_index: hi });
        }
    }
    Ok(PlanarRegion { loops })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::Loop;
    use std::f64::consts::PI;

    fn square() -> SketchProfile {
        SketchProfile::new(vec![Loop::polygon(&[
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ])])
    }

    #[test]
    fn unit_square_polygon() {
        let r = tessellate_profile(&square(), 64).unwrap();
        assert_eq!(r.outer().len(), 4);
        assert!((r.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn circle_area_matches_regular_polygon() {
        let p = SketchProfile::new(vec![Loop::circle(Point2::new(0.5, 0.5), 0.5)]);
        let r = tessellate_profile(&p, 64).unwrap();
        assert_eq!(r.outer().len(), 64);
        // Oracle: area of a regular n-gon inscribed in radius r.
        let n = 64.0;
        let expected = 0.5 * n * 0.25 * (2.0 * PI / n).sin();
        assert!((r.area() - expected).abs() < 1e-12);
        assert!((r.area() - PI / 4.0).abs() / (PI / 4.0) < 0.005);
    }

    #[test]
    fn half_circle_arc_segments() {
        let arc = CurveCommand::Arc {
            start: Point2::new(0.0, 0.5),
            mid: Point2::new(0.5, 1.0),
            end: Point2::new(1.0, 0.5),
        };
        let pts = curve_polyline(&arc, 64);
        assert!(pts.len() >= 32, "{}", pts.len());
        // Clockwise sweep passes through the top of the circle.
        assert!(pts.iter().all(|p| p[1] >= 0.5 - 1e-12));
    }

    #[test]
    fn short_arcs_get_minimum_segments() {
        let arc = CurveCommand::Arc {
            start: Point2::new(1.0, 0.0),
            mid: Point2::new((0.05f64).cos(), (0.05f64).sin()),
            end: Point2::new((0.1f64).cos(), (0.1f64).sin()),
        };
        assert_eq!(curve_polyline(&arc, 64).len(), MIN_ARC_SEGMENTS);
    }

    #[test]
    fn orientation_is_normalized() {
        let mut p = square();
        p.loops[0] = Loop::polygon(&[
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
        ]);
        p.loops.push(Loop::polygon(&[
            Point2::new(0.25, 0.25),
            Point2::new(0.75, 0.25),
            Point2::new(0.75, 0.75),
            Point2::new(0.25, 0.75),
        ]));
        let r = tessellate_profile(&p, 64).unwrap();
        assert!(signed_area(&r.loops[0]) > 0.0);
        assert!(signed_area(&r.loops[1]) < 0.0);
        assert!((r.area() - 0.75).abs() < 1e-15);
        assert!(r.contains([0.1, 0.1]));
        assert!(!r.contains([0.5, 0.5]));
        let tris = r.triangulate().unwrap();
        let verts: Vec<_> = r.vertices().collect();
        let total: f64 = tris
            .iter()
            .map(|t| 0.5 * orient(verts[t[0]], verts[t[1]], verts[t[2]]))
            .sum();
        assert!((total - 0.75).abs() < 1e-12);
    }

    #[test]
    fn bow_tie_self_intersects() {
        let p = SketchProfile::new(vec![Loop::polygon(&[
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 2.0),
            Point2::new(2.0, 0.0),
            Point2::new(0.0, 1.0),
        ])]);
        assert_eq!(
            tessellate_profile(&p, 64),
            Err(TessellationError::SelfIntersectingLoop { loop_index: 0 })
        );
    }
}
