use std::fmt::Write as _;

use nalgebra::Vector3;

use super::mesh::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Stl,
}

impl std::str::FromStr for MeshFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(MeshFormat::Obj),
            "stl" => Ok(MeshFormat::Stl),
            other => Err(format!(
                "unknown mesh format `{other}` (expected obj or stl)"
            )),
        }
    }
}

const STL_HEADER: &[u8] = b"cadseq binary STL";

pub fn export_mesh(mesh: &Mesh, format: MeshFormat) -> Vec<u8> {
    match format {
        MeshFormat::Obj => to_obj(mesh).into_bytes(),
        MeshFormat::Stl => to_stl(mesh),
    }
}

/// ASCII Wavefront OBJ with 1-based face indices.
pub fn to_obj(mesh: &Mesh) -> String {
    let mut out = String::new();
    out.push_str("# cadseq mesh\n");
    for v in &mesh.vertices {
        let [x, y, z] = v.map(|c| c + 0.0);
        writeln!(out, "v {x:.9} {y:.9} {z:.9}").unwrap();
    }
    for t in &mesh.triangles {
        writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).unwrap();
    }
    out
}

/// Binary little-endian STL: 80-byte header, u32 count, 50-byte records.
pub fn to_stl(mesh: &Mesh) -> Vec<u8> {
    let mut out = Vec::with_capacity(84 + 50 * mesh.triangles.len());
    let mut header = [0u8; 80];
    header[..STL_HEADER.len()].copy_from_slice(STL_HEADER);
    out.extend_from_slice(&header);
    out.extend_from_slice(&(mesh.triangles.len() as u32).to_le_bytes());
    for i in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.triangle(i);
        let n = (b - a).cross(&(c - a));
        let n = if n.norm() > 0.0 {
            n.normalize()
        } else {
            Vector3::zeros()
        };
        for v in [n, a, b, c] {
            for k in 0..3 {
                out.extend_from_slice(&(v[k] as f32).to_le_bytes());
            }
        }
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    out
}
