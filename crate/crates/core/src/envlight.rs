//! Equirectangular environment maps and their SH light coefficients.
//!
//! Pixel `(row, col)` of a `width × height` map looks along
//! `θ = π(row + 0.5)/height`, `φ = 2π(col + 0.5)/width` (z-up, row 0 at the
//! north pole). Each pixel carries the exact solid angle of its cell,
//! `(2π/width)(cos θ_top − cos θ_bottom)`, so the weights of any map sum to 4π.

use std::f64::consts::PI;

use rayon::prelude::*;
use thiserror::Error;

use crate::reduce::{pairwise_sum, CoeffBlock};
use crate::sh::{self, Direction, ShError, MAX_DEGREE, NUM_COEFFS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("equirectangular map must have width = 2 x height, got {width}x{height}")]
    BadDimensions { width: usize, height: usize },
    #[error("radiance buffer has {got} texels, expected {expected}")]
    BufferSize { got: usize, expected: usize },
    #[error("non-finite radiance at pixel ({col}, {row})")]
    NonFinite { col: usize, row: usize },
    #[error("negative radiance {value} at pixel ({col}, {row})")]
    Negative { col: usize, row: usize, value: f64 },
    #[error("environment map needs 3 channels, got {0}")]
    Channels(usize),
    #[error(transparent)]
    Sh(#[from] ShError),
}

/// Radiance per pixel, row-major, top row first.
///
/// Maps built in memory may hold signed values (band-limited
/// reconstructions ring below zero); [`EnvironmentMap::from_radiance_checked`]
/// additionally enforces non-negative HDR input.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentMap {
    width: usize,
    height: usize,
    radiance: Vec<[f64; 3]>,
}

impl EnvironmentMap {
    pub fn new(width: usize, height: usize, radiance: Vec<[f64; 3]>) -> Result<Self, EnvError> {
        if height == 0 || width != 2 * height {
            return Err(EnvError::BadDimensions { width, height });
        }
        if radiance.len() != width * height {
            return Err(EnvError::BufferSize { got: radiance.len(), expected: width * height });
        }
        if let Some(i) = radiance.iter().position(|p| p.iter().any(|v| !v.is_finite())) {
            return Err(EnvError::NonFinite { col: i % width, row: i / width });
        }
        Ok(EnvironmentMap { width, height, radiance })
    }

    /// Like [`EnvironmentMap::new`] but also rejects negative radiance.
    pub fn from_radiance_checked(
        width: usize,
        height: usize,
        radiance: Vec<[f64; 3]>,
    ) -> Result<Self, EnvError> {
        let env = Self::new(width, height, radiance)?;
        for (i, p) in env.radiance.iter().enumerate() {
            if let Some(v) = p.iter().find(|v| **v < 0.0) {
                return Err(EnvError::Negative { col: i % width, row: i / width, value: *v });
            }
        }
        Ok(env)
    }

    /// Builds a map by evaluating `f` at every pixel-center direction.
    pub fn from_fn(width: usize, f: impl Fn(Direction) -> [f64; 3] + Sync) -> Result<Self, EnvError> {
        if width == 0 || !width.is_multiple_of(2) {
            return Err(EnvError::BadDimensions { width, height: width / 2 });
        }
        let height = width / 2;
        let radiance = (0..width * height)
            .into_par_iter()
            .map(|i| f(pixel_direction(i % width, i / width, width, height)))
            .collect();
        Self::new(width, height, radiance)
    }

    pub fn width(&self) -> usize {
        self.width
    }
    pub fn height(&self) -> usize {
        self.height
    }
    pub fn radiance(&self) -> &[[f64; 3]] {
        &self.radiance
    }
    pub fn pixel(&self, col: usize, row: usize) -> [f64; 3] {
        self.radiance[row * self.width + col]
    }
}

/// Direction through the center of pixel `(col, row)`.
pub fn pixel_direction(col: usize, row: usize, width: usize, height: usize) -> Direction {
    let theta = PI * (row as f64 + 0.5) / height as f64;
    let phi = 2.0 * PI * (col as f64 + 0.5) / width as f64;
    Direction::from_spherical(theta, phi)
}

/// Solid angle of any pixel in `row`.
pub fn pixel_solid_angle(row: usize, width: usize, height: usize) -> f64 {
    let theta = PI * (row as f64 + 0.5) / height as f64;
    let half = 0.5 * PI / height as f64;
    2.0 * PI / width as f64 * 2.0 * theta.sin() * half.sin()
}

/// SH light: three colour channels of 81 coefficients each, indexed by `k = l(l+1)+m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SHLight {
    pub coeffs: [[f64; NUM_COEFFS]; 3],
}

impl Default for SHLight {
    fn default() -> Self {
        Self::zero()
    }
}

impl SHLight {
    pub fn zero() -> Self {
        SHLight { coeffs: [[0.0; NUM_COEFFS]; 3] }
    }

    /// Only the constant band, per channel.
    pub fn dc(rgb: [f64; 3]) -> Self {
        let mut l = Self::zero();
        for c in 0..3 {
            l.coeffs[c][0] = rgb[c];
        }
        l
    }

    pub fn get(&self, channel: usize, k: usize) -> f64 {
        self.coeffs[channel][k]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().flatten().all(|v| v.is_finite())
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().flatten().for_each(|v| *v *= s);
        out
    }

    pub fn add(&self, other: &SHLight) -> Self {
        let mut out = self.clone();
        for c in 0..3 {
            for k in 0..NUM_COEFFS {
                out.coeffs[c][k] += other.coeffs[c][k];
            }
        }
        out
    }

    /// Coefficients above degree `l_max` set to zero.
    pub fn truncated(&self, l_max: usize) -> Self {
        let mut out = self.clone();
        let n = sh::num_coeffs(l_max.min(MAX_DEGREE));
        for c in 0..3 {
            out.coeffs[c][n..].iter_mut().for_each(|v| *v = 0.0);
        }
        out
    }

    /// Sum of squared coefficients over channels, per degree.
    pub fn band_energy(&self) -> [f64; MAX_DEGREE + 1] {
        let mut e = [0.0; MAX_DEGREE + 1];
        for c in 0..3 {
            for (k, v) in self.coeffs[c].iter().enumerate() {
                e[sh::degree_of(k)] += v * v;
            }
        }
        e
    }
}

/// Projects `env` onto real SH up to degree `l_max`.
///
/// Rows are integrated in parallel and combined by a fixed pairwise tree,
/// so the result is bit-identical for any thread count.
pub fn project_envmap(env: &EnvironmentMap, l_max: usize) -> Result<SHLight, EnvError> {
    if l_max > MAX_DEGREE {
        return Err(ShError::DegreeTooLarge(l_max).into());
    }
    let (w, h) = (env.width, env.height);
    if h == 0 || w != 2 * h || env.radiance.len() != w * h {
        return Err(EnvError::BadDimensions { width: w, height: h });
    }
    let n = sh::num_coeffs(l_max);
    let rows: Vec<CoeffBlock> = (0..h)
        .into_par_iter()
        .map(|row| {
            let d_omega = pixel_solid_angle(row, w, h);
            let mut acc = vec![0.0; 3 * n];
            let mut basis = [0.0; NUM_COEFFS];
            for col in 0..w {
                let rad = env.radiance[row * w + col];
                let dir = pixel_direction(col, row, w, h);
                sh::sh_eval_all_into(dir, l_max, &mut basis).expect("degree checked");
                for c in 0..3 {
                    let r = rad[c] * d_omega;
                    if r == 0.0 {
                        continue;
                    }
                    let dst = &mut acc[c * n..(c + 1) * n];
                    for (a, y) in dst.iter_mut().zip(&basis[..n]) {
                        *a += r * y;
                    }
                }
            }
            CoeffBlock(acc)
        })
        .collect();
    let total = pairwise_sum(&rows);
    let mut light = SHLight::zero();
    for c in 0..3 {
        light.coeffs[c][..n].copy_from_slice(&total.0[c * n..(c + 1) * n]);
    }
    Ok(light)
}

/// Band-limited reconstruction of `light` on a `width × width/2` map.
///
/// Values are not clamped and can be negative.
pub fn render_envmap(light: &SHLight, width: usize) -> Result<EnvironmentMap, EnvError> {
    EnvironmentMap::from_fn(width, |dir| {
        let mut basis = [0.0; NUM_COEFFS];
        sh::sh_eval_all_into(dir, MAX_DEGREE, &mut basis).expect("max degree");
        let mut out = [0.0; 3];
        for c in 0..3 {
            out[c] = light.coeffs[c].iter().zip(&basis).map(|(g, y)| g * y).sum();
        }
        out
    })
}

/// Squared deviation of each coefficient from its channel mean; zero iff
/// all channels are identical.
pub fn monochrome_residual(light: &SHLight) -> f64 {
    let mut total = 0.0;
    for k in 0..NUM_COEFFS {
        let mean = (light.coeffs[0][k] + light.coeffs[1][k] + light.coeffs[2][k]) / 3.0;
        for c in 0..3 {
            let d = light.coeffs[c][k] - mean;
            total += d * d;
        }
    }
    total
}

/// Gradient of [`monochrome_residual`] with respect to every coefficient.
pub fn monochrome_residual_grad(light: &SHLight) -> SHLight {
    let mut g = SHLight::zero();
    for k in 0..NUM_COEFFS {
        let mean = (light.coeffs[0][k] + light.coeffs[1][k] + light.coeffs[2][k]) / 3.0;
        for c in 0..3 {
            // Deviations sum to zero, so the mean's own derivative drops out.
            g.coeffs[c][k] = 2.0 * (light.coeffs[c][k] - mean);
        }
    }
    g
}
