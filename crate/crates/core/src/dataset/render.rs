//! Fixed-view software renderer.
//!
//! Vertices are snapped to a fixed-point pixel grid and triangles are filled with
//! integer edge functions (top-left tie rule) and an integer depth buffer, so output
//! bytes do not depend on the platform's floating-point rasterization.

use nalgebra::Vector3;
use serde::Deserialize;

use crate::geometry::{build_mesh, normalize_model, GeometryError, Mesh};
use crate::sequence::CadModel;

const SUBPIXEL_BITS: u32 = 8;
const SUBPIXEL: i64 = 1 << SUBPIXEL_BITS;
const DEPTH_SCALE: f64 = (1u64 << 24) as f64;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderConfig {
    pub image_size: u32,
    /// Direction from the scene center towards the camera.
    pub camera_direction: [f64; 3],
    /// Direction towards the light.
    pub light_direction: [f64; 3],
    /// Half width of the orthographic view around the unit-cube center.
    pub view_half_extent: f64,
    pub background: u8,
    pub shade_dark: u8,
    pub shade_light: u8,
    pub shade_levels: u32,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            image_size: 336,
            camera_direction: [1.0, 1.0, 1.0],
            light_direction: [2.0, 3.0, 4.0],
            view_half_extent: 0.9,
            background: 255,
            shade_dark: 40,
            shade_light: 230,
            shade_levels: 32,
        }
    }
}

fn unit(v: [f64; 3], what: &str) -> Result<Vector3<f64>, String> {
    let v = Vector3::from(v);
    let n = v.norm();
    if !n.is_finite() || n < 1e-12 {
        return Err(format!("{what} must be a non-zero finite vector"));
    }
    Ok(v / n)
}

impl RenderConfig {
    pub fn check(&self) -> Result<(), String> {
        if self.image_size == 0 || self.image_size > 8192 {
            return Err("image_size must be in 1..=8192".into());
        }
        unit(self.camera_direction, "camera_direction")?;
        unit(self.light_direction, "light_direction")?;
        if !(self.view_half_extent.is_finite() && self.view_half_extent > 0.0) {
            return Err("view_half_extent must be positive".into());
        }
        if self.shade_levels < 2 {
            return Err("shade_levels must be at least 2".into());
        }
        Ok(())
    }

    fn shade(&self, intensity: f64) -> u8 {
        let top = (self.shade_levels - 1) as i64;
        let level = ((intensity.clamp(0.0, 1.0) * top as f64) + 0.5).floor() as i64;
        let (dark, light) = (self.shade_dark as i64, self.shade_light as i64);
        (dark + (light - dark) * level / top) as u8
    }
}

/// 8-bit grayscale image, row-major, top row first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
    /// Set when the mesh had nothing to draw and the image is background only.
    pub empty_mesh: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RenderError {
    #[error("invalid render settings: {0}")]
    Config(String),
    #[error("cannot reconstruct model: {0}")]
    Geometry(#[from] GeometryError),
    #[error("PNG encoding failed: {0}")]
    Encode(String),
}

impl RenderedImage {
    pub fn pixel(&self, x: u32, y: u32) -> u8 {
        self.pixels[(y * self.width + x) as usize]
    }

    pub fn to_png(&self) -> Result<Vec<u8>, RenderError> {
        let mut buf = Vec::new();
        let mut enc = png::Encoder::new(&mut buf, self.width, self.height);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        let err = |e: png::EncodingError| RenderError::Encode(e.to_string());
        let mut w = enc.write_header().map_err(err)?;
        w.write_image_data(&self.pixels).map_err(err)?;
        w.finish().map_err(err)?;
        Ok(buf)
    }
}

struct Camera {
    dir: Vector3<f64>,
    right: Vector3<f64>,
    up: Vector3<f64>,
    center: Vector3<f64>,
    half: f64,
    size: f64,
}

impl Camera {
    fn new(cfg: &RenderConfig) -> Result<Self, String> {
        let dir = unit(cfg.camera_direction, "camera_direction")?;
        let mut right = Vector3::z().cross(&dir);
        if right.norm() < 1e-9 {
            right = Vector3::y().cross(&dir);
        }
        let right = right.normalize();
        Ok(Self {
            dir,
            up: dir.cross(&right),
            right,
            center: Vector3::repeat(0.5),
            half: cfg.view_half_extent,
            size: cfg.image_size as f64,
        })
    }

    /// Fixed-point screen position and integer depth (larger is nearer).
    fn project(&self, p: &Vector3<f64>) -> [i64; 3] {
        let d = p - self.center;
        let x = (d.dot(&self.right) / self.half + 1.0) * self.size / 2.0;
        let y = (1.0 - d.dot(&self.up) / self.half) * self.size / 2.0;
        let z = d.dot(&self.dir);
        [
            (x * SUBPIXEL as f64).round() as i64,
            (y * SUBPIXEL as f64).round() as i64,
            (z * DEPTH_SCALE).round() as i64,
        ]
    }
}

fn edge(a: [i64; 3], b: [i64; 3], px: i64, py: i64) -> i64 {
    (b[0] - a[0]) * (py - a[1]) - (b[1] - a[1]) * (px - a[0])
}

/// Whether pixels exactly on edge `a→b` belong to this triangle. Antisymmetric, so a
/// shared edge is drawn by exactly one of its two triangles.
fn owns_edge(a: [i64; 3], b: [i64; 3]) -> bool {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    dy < 0 || (dy == 0 && dx > 0)
}

/// Renders a mesh positioned in the unit cube.
pub fn render_fixed_view(mesh: &Mesh, cfg: &RenderConfig) -> Result<RenderedImage, RenderError> {
    cfg.check().map_err(RenderError::Config)?;
    let cam = Camera::new(cfg).map_err(RenderError::Config)?;
    let light = unit(cfg.light_direction, "light_direction").map_err(RenderError::Config)?;
    let size = cfg.image_size as i64;
    let mut pixels = vec![cfg.background; (size * size) as usize];
    let mut depth = vec![i64::MIN; (size * size) as usize];
    let mut drawn = false;

    for i in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.triangle(i);
        let n = (b - a).cross(&(c - a));
        let len = n.norm();
        if len == 0.0 || n.dot(&cam.dir) <= 0.0 {
            continue;
        }
        let shade = cfg.shade(n.dot(&light) / len);
        let mut v = [cam.project(&a), cam.project(&b), cam.project(&c)];
        let mut area = edge(v[0], v[1], v[2][0], v[2][1]);
        if area == 0 {
            continue;
        }
        if area < 0 {
            v.swap(1, 2);
            area = -area;
        }
        let min_x = v.iter().map(|p| p[0]).min().unwrap();
        let max_x = v.iter().map(|p| p[0]).max().unwrap();
        let min_y = v.iter().map(|p| p[1]).min().unwrap();
        let max_y = v.iter().map(|p| p[1]).max().unwrap();
        let x0 = (min_x.div_euclid(SUBPIXEL) - 1).max(0);
        let x1 = (max_x.div_euclid(SUBPIXEL) + 1).min(size - 1);
        let y0 = (min_y.div_euclid(SUBPIXEL) - 1).max(0);
        let y1 = (max_y.div_euclid(SUBPIXEL) + 1).min(size - 1);
        let owned = [
            owns_edge(v[1], v[2]),
            owns_edge(v[2], v[0]),
            owns_edge(v[0], v[1]),
        ];
        for py in y0..=y1 {
            let sy = py * SUBPIXEL + SUBPIXEL / 2;
            for px in x0..=x1 {
                let sx = px * SUBPIXEL + SUBPIXEL / 2;
                let w = [
                    edge(v[1], v[2], sx, sy),
                    edge(v[2], v[0], sx, sy),
                    edge(v[0], v[1], sx, sy),
                ];
                let inside = w
                    .iter()
                    .zip(owned)
                    .all(|(&e, own)| e > 0 || (e == 0 && own));
                if !inside {
                    continue;
                }
                let z = (w[0] as i128 * v[0][2] as i128
                    + w[1] as i128 * v[1][2] as i128
                    + w[2] as i128 * v[2][2] as i128)
                    / area as i128;
                let idx = (py * size + px) as usize;
                if z as i64 > depth[idx] {
                    depth[idx] = z as i64;
                    pixels[idx] = shade;
                    drawn = true;
                }
            }
        }
    }
    Ok(RenderedImage {
        width: cfg.image_size,
        height: cfg.image_size,
        pixels,
        empty_mesh: !drawn,
    })
}

/// Normalizes a model into the unit cube, meshes it and renders the fixed view.
pub fn render_model(m: &CadModel, cfg: &RenderConfig) -> Result<RenderedImage, RenderError> {
    let mesh = build_mesh(&normalize_model(m)?)?;
    render_fixed_view(&mesh, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::unit_cube;
    use std::collections::BTreeSet;

    fn foreground(img: &RenderedImage, bg: u8) -> BTreeSet<u8> {
        img.pixels.iter().copied().filter(|&p| p != bg).collect()
    }

    #[test]
    fn empty_mesh_is_background() {
        let cfg = RenderConfig::default();
        let img = render_fixed_view(&Mesh::default(), &cfg).unwrap();
        assert!(img.empty_mesh);
        assert!(img.pixels.iter().all(|&p| p == cfg.background));
        assert_eq!(img.pixels.len(), 336 * 336);
    }

    #[test]
    fn cube_shows_three_shades() {
        let cfg = RenderConfig::default();
        let img = render_model(&unit_cube(), &cfg).unwrap();
        assert!(!img.empty_mesh);
        assert_eq!(foreground(&img, cfg.background).len(), 3);
        // The cube center projects to the image center.
        assert_ne!(img.pixel(168, 168), cfg.background);
        assert_eq!(img.pixel(0, 0), cfg.background);
    }

    #[test]
    fn deterministic_png() {
        let cfg = RenderConfig::default();
        let a = render_model(&unit_cube(), &cfg).unwrap().to_png().unwrap();
        let b = render_model(&unit_cube(), &cfg).unwrap().to_png().unwrap();
        assert_eq!(a, b);
        assert_eq!(&a[..8], b"\x89PNG\r\n\x1a\n");
    }

    #[test]
    fn no_cracks_on_shared_edges() {
        // The top face is two triangles; its pixels must all be one shade with no
        // background seams. Sample a horizontal line through the upper face.
        let cfg = RenderConfig::default();
        let img = render_model(&unit_cube(), &cfg).unwrap();
        let row: Vec<u8> = (0..336).map(|x| img.pixel(x, 100)).collect();
        let first = row.iter().position(|&p| p != cfg.background).unwrap();
        let last = row.iter().rposition(|&p| p != cfg.background).unwrap();
        assert!(row[first..=last].iter().all(|&p| p != cfg.background));
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = RenderConfig {
            camera_direction: [0.0; 3],
            ..RenderConfig::default()
        };
        assert!(matches!(
            render_fixed_view(&Mesh::default(), &cfg),
            Err(RenderError::Config(_))
        ));
    }
}
