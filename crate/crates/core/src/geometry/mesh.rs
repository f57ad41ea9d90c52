//! Boundary meshing of CSG results by per-step prism meshing and triangle
//! classification.
//!
//! Every prism triangle is tested at its centroid, offset by `±SURVIVAL_OFFSET` along
//! its normal. It survives iff exactly one of the two probes lies inside the final
//! solid, and it is flipped so its normal points out of the solid. Triangles whose
//! sub-triangles classify differently are split (midpoint subdivision) until they
//! agree or reach the minimum edge length, so partially covered faces are trimmed
//! to within that length.

use std::collections::HashMap;

use nalgebra::Vector3;

use super::csg::{Solid, StepSolid};
use super::GeometryError;
use crate::sequence::CadModel;

pub const SURVIVAL_OFFSET: f64 = 1e-4;
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;
/// Subdivision stops once the longest edge is below `extent / SUBDIVISION_RESOLUTION`.
pub const SUBDIVISION_RESOLUTION: f64 = 512.0;
const MAX_DEPTH: u32 = 12;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

type Tri = [Vector3<f64>; 3];

impl Mesh {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle(&self, i: usize) -> [Vector3<f64>; 3] {
        self.triangles[i].map(|v| Vector3::from(self.vertices[v]))
    }

    pub fn triangle_area(&self, i: usize) -> f64 {
        let [a, b, c] = self.triangle(i);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|i| self.triangle_area(i))
            .sum()
    }

    /// Enclosed volume by the divergence theorem (assumes outward orientation).
    pub fn volume(&self) -> f64 {
        (0..self.triangles.len())
            .map(|i| {
                let [a, b, c] = self.triangle(i);
                a.dot(&b.cross(&c))
            })
            .sum::<f64>()
            / 6.0
    }

    pub fn bounds(&self) -> Option<([f64; 3], [f64; 3])> {
        if self.vertices.is_empty() {
            return None;
        }
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        Some((lo, hi))
    }

    /// Builds an indexed mesh, merging vertices with bit-identical coordinates.
    pub fn from_triangles(tris: impl IntoIterator<Item = [[f64; 3]; 3]>) -> Self {
        let mut index: HashMap<[u64; 3], usize> = HashMap::new();
        let mut mesh = Mesh::default();
        for t in tris {
            let ids = t.map(|p| {
                // +0.0 folds negative zero into positive zero.
                let p = p.map(|c| c + 0.0);
                *index.entry(p.map(f64::to_bits)).or_insert_with(|| {
                    mesh.vertices.push(p);
                    mesh.vertices.len() - 1
                })
            });
            if ids[0] != ids[1] && ids[1] != ids[2] && ids[0] != ids[2] {
                mesh.triangles.push(ids);
            }
        }
        mesh
    }
}

/// Closed triangle surface of one extrusion prism, normals pointing outwards.
pub fn prism_triangles(step: &StepSolid) -> Result<Vec<Tri>, GeometryError> {
    let region = &step.region;
    let verts: Vec<[f64; 2]> = region.vertices().collect();
    let cap = region
        .triangulate()
        .ok_or_else(|| GeometryError::InvalidModel("profile triangulation failed".into()))?;
    let top: Vec<Vector3<f64>> = verts.iter().map(|&p| step.to_world(p, step.e1)).collect();
    let bottom: Vec<Vector3<f64>> = verts.iter().map(|&p| step.to_world(p, -step.e2)).collect();

    let mut tris = Vec::with_capacity(2 * cap.len() + 2 * verts.len());
    for &[a, b, c] in &cap {
        tris.push([top[a], top[b], top[c]]);
        tris.push([bottom[a], bottom[c], bottom[b]]);
    }
    let mut base = 0;
    for l in &region.loops {
        let n = l.len();
        for i in 0..n {
            let (a, b) = (base + i, base + (i + 1) % n);
            tris.push([bottom[a], bottom[b], top[b]]);
            tris.push([bottom[a], top[b], top[a]]);
        }
        base += n;
    }
    Ok(tris)
}

fn normal(t: &Tri) -> Vector3<f64> {
    (t[1] - t[0]).cross(&(t[2] - t[0]))
}

/// `None` when the triangle is dropped, `Some(flip)` when it survives.
fn classify(solid: &Solid, t: &Tri) -> Option<bool> {
    let n = normal(t);
    let len = n.norm();
    if len == 0.0 {
        return None;
    }
    let n = n / len;
    let c = (t[0] + t[1] + t[2]) / 3.0;
    let front = solid.contains(c + n * SURVIVAL_OFFSET);
    let back = solid.contains(c - n * SURVIVAL_OFFSET);
    match (front, back) {
        (false, true) => Some(false),
        (true, false) => Some(true),
        _ => None,
    }
}

fn split(t: &Tri) -> [Tri; 4] {
    let [a, b, c] = *t;
    let ab = (a + b) / 2.0;
    let bc = (b + c) / 2.0;
    let ca = (c + a) / 2.0;
    [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
}

fn longest_edge(t: &Tri) -> f64 {
    (t[1] - t[0])
        .norm()
        .max((t[2] - t[1]).norm())
        .max((t[0] - t[2]).norm())
}

fn emit(solid: &Solid, t: Tri, state: Option<bool>, min_edge: f64, depth: u32, out: &mut Vec<Tri>) {
    if depth < MAX_DEPTH && longest_edge(&t) > min_edge {
        let children = split(&t);
        let states = children.each_ref().map(|c| classify(solid, c));
        if states.iter().any(|s| *s != state) {
            for (c, s) in children.into_iter().zip(states) {
                emit(solid, c, s, min_edge, depth + 1, out);
            }
            return;
        }
    }
    match state {
        Some(false) => out.push(t),
        Some(true) => out.push([t[0], t[2], t[1]]),
        None => {}
    }
}

fn world_extent(steps: &[Vec<Tri>]) -> f64 {
    let mut lo = Vector3::repeat(f64::INFINITY);
    let mut hi = Vector3::repeat(f64::NEG_INFINITY);
    for p in steps.iter().flatten().flatten() {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (hi - lo).max()
}

/// Approximate boundary mesh of the model's CSG result.
pub fn build_mesh(m: &CadModel) -> Result<Mesh, GeometryError> {
    let solid = Solid::from_model(m)?;
    build_mesh_for(&solid)
}

pub fn build_mesh_for(solid: &Solid) -> Result<Mesh, GeometryError> {
    let prisms = solid
        .steps
        .iter()
        .map(prism_triangles)
        .collect::<Result<Vec<_>, _>>()?;
    let min_edge = world_extent(&prisms) / SUBDIVISION_RESOLUTION;

    let mut kept = Vec::new();
    for t in prisms.into_iter().flatten() {
        if normal(&t).norm() * 0.5 <= MIN_TRIANGLE_AREA {
            continue;
        }
        let state = classify(solid, &t);
        emit(solid, t, state, min_edge, 0, &mut kept);
    }

    // Coincident faces from repeated steps would double the surface.
    let mut seen = std::collections::HashSet::new();
    kept.retain(|t| {
        let mut key = t.map(|p| [p.x, p.y, p.z].map(|c| (c + 0.0).to_bits()));
        key.sort_unstable();
        seen.insert(key)
    });

    let mesh = Mesh::from_triangles(
        kept.into_iter()
            .filter(|t| normal(t).norm() * 0.5 > MIN_TRIANGLE_AREA)
            .map(|t| t.map(|p| [p.x, p.y, p.z])),
    );
    if mesh.is_empty() {
        return Err(GeometryError::EmptySolid);
    }
    Ok(mesh)
}
