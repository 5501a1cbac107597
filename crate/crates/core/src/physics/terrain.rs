//! Procedural wave terrain for golf.

use std::f64::consts::TAU;
use std::io::{self, Write};

use crate::frame::HeadingFrame;
use crate::math::{Vec2, Vec3};

/// Height field `h(u, v) = A · sin(2πu/λ + φu) · cos(2πv/λ + φv)` in a frame
/// placed at `origin` and rotated by `yaw`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveTerrain {
    pub amplitude: f64,
    pub wavelength: f64,
    pub phase_u: f64,
    pub phase_v: f64,
    pub origin: Vec2,
    pub yaw: f64,
}

/// Observation patch resolution (rows and columns).
pub const PATCH: usize = 32;

impl WaveTerrain {
    pub fn new(amplitude: f64, wavelength: f64, phase_u: f64, phase_v: f64) -> Self {
        WaveTerrain {
            amplitude,
            wavelength,
            phase_u,
            phase_v,
            origin: Vec2::zeros(),
            yaw: 0.0,
        }
    }

    fn local(&self, x: f64, y: f64) -> (f64, f64) {
        let (s, c) = self.yaw.sin_cos();
        let (dx, dy) = (x - self.origin.x, y - self.origin.y);
        (c * dx + s * dy, -s * dx + c * dy)
    }

    pub fn height(&self, x: f64, y: f64) -> f64 {
        let (u, v) = self.local(x, y);
        let k = TAU / self.wavelength;
        self.amplitude * (k * u + self.phase_u).sin() * (k * v + self.phase_v).cos()
    }

    /// World-frame gradient (∂h/∂x, ∂h/∂y).
    pub fn gradient(&self, x: f64, y: f64) -> Vec2 {
        let (u, v) = self.local(x, y);
        let k = TAU / self.wavelength;
        let (su, cu) = (k * u + self.phase_u).sin_cos();
        let (sv, cv) = (k * v + self.phase_v).sin_cos();
        let du = self.amplitude * k * cu * cv;
        let dv = -self.amplitude * k * su * sv;
        let (s, c) = self.yaw.sin_cos();
        Vec2::new(c * du - s * dv, s * du + c * dv)
    }

    pub fn normal(&self, x: f64, y: f64) -> Vec3 {
        let g = self.gradient(x, y);
        Vec3::new(-g.x, -g.y, 1.0).normalize()
    }

    /// Samples a `PATCH`×`PATCH` grid centred on `center`, axis-aligned with
    /// `frame`'s heading, with `spacing` meters between samples. Row-major,
    /// rows along the frame's forward axis.
    pub fn sample_patch(&self, frame: &HeadingFrame, center: &Vec2, spacing: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), PATCH * PATCH);
        let (s, c) = frame.yaw.sin_cos();
        let half = (PATCH as f64 - 1.0) / 2.0;
        for r in 0..PATCH {
            for col in 0..PATCH {
                let fwd = (r as f64 - half) * spacing;
                let left = (col as f64 - half) * spacing;
                let x = center.x + c * fwd - s * left;
                let y = center.y + s * fwd + c * left;
                out[r * PATCH + col] = self.height(x, y);
            }
        }
    }

    /// Writes an `nx`×`ny` world-aligned grid of heights starting at `min`
    /// as little-endian f32, row-major (rows along y).
    pub fn export_grid<W: Write>(
        &self,
        w: &mut W,
        min: Vec2,
        spacing: f64,
        nx: usize,
        ny: usize,
    ) -> io::Result<()> {
        for row in 0..ny {
            for col in 0..nx {
                let h = self.height(min.x + col as f64 * spacing, min.y + row as f64 * spacing);
                w.write_all(&(h as f32).to_le_bytes())?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitude_bounds_heights() {
        let t = WaveTerrain::new(0.5, 8.0, 0.3, 1.1);
        let mut max: f64 = 0.0;
        for i in 0..200 {
            for j in 0..200 {
                let h = t.height(i as f64 * 0.1, j as f64 * 0.1);
                assert!(h.abs() <= 0.5 + 1e-12);
                max = max.max(h.abs());
            }
        }
        assert!(max > 0.49);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut t = WaveTerrain::new(0.5, 8.0, 0.3, 1.1);
        t.yaw = 0.7;
        t.origin = Vec2::new(2.0, -1.0);
        let h = 1e-6;
        for &(x, y) in &[(0.3, 0.4), (5.0, -3.0), (-7.5, 2.2)] {
            let g = t.gradient(x, y);
            let gx = (t.height(x + h, y) - t.height(x - h, y)) / (2.0 * h);
            let gy = (t.height(x, y + h) - t.height(x, y - h)) / (2.0 * h);
            assert!((g.x - gx).abs() < 1e-6 && (g.y - gy).abs() < 1e-6);
        }
    }

    #[test]
    fn export_is_row_major_f32() {
        let t = WaveTerrain::new(0.5, 8.0, 0.0, 0.0);
        let mut buf = Vec::new();
        t.export_grid(&mut buf, Vec2::new(0.0, 0.0), 0.5, 4, 3).unwrap();
        assert_eq!(buf.len(), 4 * 3 * 4);
        let v = f32::from_le_bytes(buf[4 * 5..4 * 6].try_into().unwrap());
        assert_eq!(v, t.height(0.5, 0.5) as f32);
    }
}
