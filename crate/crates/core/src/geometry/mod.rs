//! Geometry kernel: plane frames, profile tessellation, CSG membership, boundary
//! meshing, surface sampling, normalization and mesh export.

mod csg;
mod export;
mod frame;
mod mesh;
mod normalize;
mod sample;
pub mod tessellate;

pub use csg::{solid_contains, Solid, StepSolid};
pub use export::{export_mesh, to_obj, to_stl, MeshFormat};
pub use frame::{plane_frame, plane_normal, Frame, NonFiniteAngles};
pub use mesh::{build_mesh, build_mesh_for, prism_triangles, Mesh, SURVIVAL_OFFSET};
pub use normalize::{
    anchor_sketch_origins, model_bounds, normalize_model, prepare_for_tokenization,
};
pub use sample::{sample_mesh, sample_surface, PointCloud, DEFAULT_SAMPLE_COUNT};
pub use tessellate::{tessellate_profile, PlanarRegion, TessellationError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("CSG result has no surface")]
    EmptySolid,
    #[error("model has zero size")]
    DegenerateBounds,
}
