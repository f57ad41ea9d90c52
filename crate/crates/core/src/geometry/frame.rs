use nalgebra::{Matrix3, Vector3};

/// Below this, `ẑ × n` is treated as zero and the reference axis falls back to `x̂`.
const POLE_EPS: f64 = 1e-12;

/// Sketch-plane coordinate frame. Rows of `rotation` are the local axes in world
/// coordinates, so `rotation` maps world vectors to local ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub rotation: Matrix3<f64>,
    pub origin: Vector3<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("plane angles must be finite")]
pub struct NonFiniteAngles;

/// Unit plane normal for spherical angles `(theta, phi)`.
pub fn plane_normal(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    )
}

/// World→local rotation of a sketch plane.
///
/// The local z axis is the plane normal. The local x axis starts from
/// `normalize(ẑ × n)` (or `x̂` at the poles) and is twisted by `gamma` about the normal;
/// local y completes a right-handed frame.
pub fn plane_frame(theta: f64, phi: f64, gamma: f64) -> Result<Matrix3<f64>, NonFiniteAngles> {
    if !(theta.is_finite() && phi.is_finite() && gamma.is_finite()) {
        return Err(NonFiniteAngles);
    }
    let n = plane_normal(theta, phi);
    let zn = Vector3::z().cross(&n);
    let u0 = if zn.norm() < POLE_EPS {
        Vector3::x()
    } else {
        zn.normalize()
    };
    let x = (u0 * gamma.cos() + n.cross(&u0) * gamma.sin()).normalize();
    let y = n.cross(&x);
    Ok(Matrix3::from_rows(&[
        x.transpose(),
        y.transpose(),
        n.transpose(),
    ]))
}

impl Frame {
    pub fn new(
        theta: f64,
        phi: f64,
        gamma: f64,
        origin: [f64; 3],
    ) -> Result<Self, NonFiniteAngles> {
        Ok(Self {
            rotation: plane_frame(theta, phi, gamma)?,
            origin: Vector3::from(origin),
        })
    }

    pub fn to_local(&self, world: Vector3<f64>) -> Vector3<f64> {
        self.rotation * (world - self.origin)
    }

    pub fn to_world(&self, local: Vector3<f64>) -> Vector3<f64> {
        self.origin + self.rotation.transpose() * local
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn assert_rotation(r: &Matrix3<f64>) {
        let err = (r.transpose() * r - Matrix3::identity()).abs().max();
        assert!(err < 1e-9, "orthonormality error {err}");
        assert!((r.determinant() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_angles_give_identity() {
        let r = plane_frame(0.0, 0.0, 0.0).unwrap();
        assert!((r - Matrix3::identity()).abs().max() < 1e-15);
    }

    #[test]
    fn quarter_theta_points_normal_along_x() {
        let r = plane_frame(FRAC_PI_2, 0.0, 0.0).unwrap();
        let n = r.row(2).transpose();
        assert!((n - Vector3::x()).norm() < 1e-15);
        assert_rotation(&r);
    }

    #[test]
    fn south_pole_uses_fallback_axis() {
        let r = plane_frame(PI, 0.3, 0.0).unwrap();
        assert_rotation(&r);
        assert!((r.row(0).transpose() - Vector3::x()).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(plane_frame(f64::NAN, 0.0, 0.0), Err(NonFiniteAngles));
    }

    #[test]
    fn local_world_round_trip() {
        let f = Frame::new(0.7, -1.2, 2.5, [0.1, 0.2, 0.3]).unwrap();
        let p = Vector3::new(0.4, -0.5, 0.9);
        assert!((f.to_world(f.to_local(p)) - p).norm() < 1e-14);
    }

    proptest! {
        #[test]
        fn always_a_proper_rotation(t in 0.0..=PI, p in -PI..=PI, g in -PI..=PI) {
            let r = plane_frame(t, p, g).unwrap();
            assert_rotation(&r);
            let n = plane_normal(t, p);
            prop_assert!((r.row(2).transpose() - n).norm() < 1e-12);
        }
    }
}
