use glam::{DVec2, DVec3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::RenderError;
use crate::field::FieldScene;

/// Pinhole camera; depth is measured along the view axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraSpec {
    pub position: DVec3,
    pub look_at: DVec3,
    /// Vertical field of view, degrees.
    pub fov_deg: f64,
    pub width: u32,
    pub height: u32,
    pub near: f64,
    pub far: f64,
}

/// Orthonormal camera basis.
#[derive(Debug, Clone, Copy)]
pub(crate) struct View {
    pub origin: DVec3,
    pub right: DVec3,
    pub up: DVec3,
    pub forward: DVec3,
    /// Focal length in pixels.
    pub focal: f64,
    pub cx: f64,
    pub cy: f64,
}

impl CameraSpec {
    pub fn validate(&self) -> Result<(), RenderError> {
        if !(self.fov_deg > 10.0 && self.fov_deg < 120.0) {
            return Err(RenderError::InvalidCamera(format!("fov {} deg not in (10, 120)", self.fov_deg)));
        }
        if self.width == 0 || self.height == 0 {
            return Err(RenderError::InvalidCamera("empty image".into()));
        }
        if !(self.near > 0.0 && self.far > self.near && self.far <= 65.0) {
            return Err(RenderError::InvalidCamera(format!(
                "need 0 < near < far <= 65 m, got {} and {}",
                self.near, self.far
            )));
        }
        if (self.look_at - self.position).length() < 1e-9 {
            return Err(RenderError::InvalidCamera("position equals look-at".into()));
        }
        Ok(())
    }

    pub(crate) fn view(&self) -> View {
        let forward = (self.look_at - self.position).normalize();
        let world_up = if forward.cross(DVec3::Z).length() < 1e-6 { DVec3::Y } else { DVec3::Z };
        let right = forward.cross(world_up).normalize();
        let up = right.cross(forward);
        View {
            origin: self.position,
            right,
            up,
            forward,
            focal: self.height as f64 * 0.5 / (self.fov_deg.to_radians() * 0.5).tan(),
            cx: self.width as f64 * 0.5,
            cy: self.height as f64 * 0.5,
        }
    }

    /// Pixel coordinates and view depth of a world point in front of the camera.
    pub fn project(&self, p: DVec3) -> Option<(DVec2, f64)> {
        let v = self.view();
        let c = v.to_camera(p);
        (c.z > 0.0).then(|| (v.to_screen(c), c.z))
    }

    /// World-space direction through the centre of pixel `(x, y)`.
    pub fn ray(&self, x: u32, y: u32) -> DVec3 {
        let v = self.view();
        let sx = (x as f64 + 0.5 - v.cx) / v.focal;
        let sy = (v.cy - (y as f64 + 0.5)) / v.focal;
        (v.forward + v.right * sx + v.up * sy).normalize()
    }
}

impl View {
    pub fn to_camera(&self, p: DVec3) -> DVec3 {
        let d = p - self.origin;
        DVec3::new(d.dot(self.right), d.dot(self.up), d.dot(self.forward))
    }

    pub fn to_screen(&self, c: DVec3) -> DVec2 {
        DVec2::new(self.cx + self.focal * c.x / c.z, self.cy - self.focal * c.y / c.z)
    }
}

/// Ranges a camera is drawn from. Angles in degrees, heights in metres
/// above the ground at the look-at point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraConfig {
    pub height: (f64, f64),
    /// Downward pitch below the horizon.
    pub pitch: (f64, f64),
    pub fov: (f64, f64),
    pub width: u32,
    pub image_height: u32,
    pub near: f64,
    pub far: f64,
    /// Largest horizontal offset of the look-at point from the field centre, m.
    pub target_jitter: f64,
}

impl Default for CameraConfig {
    fn default() -> Self {
        Self {
            height: (0.8, 2.0),
            pitch: (30.0, 90.0),
            fov: (50.0, 70.0),
            width: 512,
            image_height: 512,
            near: 0.05,
            far: 20.0,
            target_jitter: 0.2,
        }
    }
}

impl CameraConfig {
    pub fn validate(&self) -> Result<(), RenderError> {
        let bad = |m: String| Err(RenderError::InvalidCamera(m));
        if !(self.height.0 > 0.0 && self.height.0 <= self.height.1) {
            return bad(format!("camera.height range {:?}", self.height));
        }
        if !(self.pitch.0 > 0.0 && self.pitch.0 <= self.pitch.1 && self.pitch.1 <= 90.0) {
            return bad(format!("camera.pitch range {:?} must lie in (0, 90]", self.pitch));
        }
        if !(self.fov.0 > 10.0 && self.fov.0 <= self.fov.1 && self.fov.1 < 120.0) {
            return bad(format!("camera.fov range {:?} must lie in (10, 120)", self.fov));
        }
        if self.width == 0 || self.image_height == 0 {
            return bad("camera image size must be positive".into());
        }
        if !(self.near > 0.0 && self.far > self.near && self.far <= 65.0) {
            return bad(format!("camera near/far {} / {}", self.near, self.far));
        }
        Ok(())
    }
}

/// Draws a camera looking at a point near the field centre from a random
/// azimuth, with height and pitch from the configured ranges.
pub fn sample_camera<R: Rng + ?Sized>(cfg: &CameraConfig, scene: &FieldScene, rng: &mut R) -> CameraSpec {
    let u = |rng: &mut R, (lo, hi): (f64, f64)| if hi > lo { rng.random_range(lo..=hi) } else { lo };
    let h = u(rng, cfg.height);
    let pitch = u(rng, cfg.pitch).to_radians();
    let fov = u(rng, cfg.fov);
    let yaw = rng.random_range(0.0..std::f64::consts::TAU);
    let j = cfg.target_jitter;
    let t = if j > 0.0 {
        DVec2::new(rng.random_range(-j..=j), rng.random_range(-j..=j))
    } else {
        DVec2::ZERO
    };
    let ground = scene.soil.height_at(t);
    let look_at = t.extend(ground);
    let back = h / pitch.tan().max(1e-9);
    let dir = DVec2::new(yaw.cos(), yaw.sin());
    let position = (t - dir * back).extend(ground + h);
    CameraSpec {
        position,
        look_at,
        fov_deg: fov,
        width: cfg.width,
        height: cfg.image_height,
        near: cfg.near,
        far: cfg.far,
    }
}
