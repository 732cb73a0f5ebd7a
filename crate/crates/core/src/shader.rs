//! Per-texel skin shading in UV space.
//!
//! Every texel is the sum of three SH dot products:
//!
//! ```text
//! diffuse  = d · a · Σ_{l≤2} A_l γ_lm Y_lm(n)
//! sss      = d · Σ_{1≤l≤2} S_l(t) γ_lm Y_lm(n),      S_l(t) = exp(-l²/t⁴)
//! specular = f · Σ_{l≤8} R_l γ_lm Y_lm(r),           f = s + (1-s)(1 - n·v)^5
//! ```
//!
//! with `r` the mirror of the view vector about `n`. Normals are object-space
//! unit vectors; there is no tangent frame.

use rayon::prelude::*;
use thiserror::Error;

use crate::envlight::SHLight;
use crate::sh::{self, Direction, ShError, MAX_DEGREE, NUM_COEFFS};

/// Unit-length tolerance for normals and view vectors coming from textures.
pub const UNIT_TOLERANCE: f64 = 1e-4;
/// Default width of the Gaussian roughness lobe.
pub const DEFAULT_ROUGHNESS: f64 = 0.25;
/// Number of SH coefficients in the diffuse and subsurface sums (l ≤ 2).
pub const LOW_ORDER_COEFFS: usize = 9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShadeError {
    #[error("{what} at texel {index} is not unit length (|v| = {norm})")]
    NotUnit { what: &'static str, index: usize, norm: f64 },
    #[error("camera view mode requires a per-texel position map")]
    MissingPositions,
    #[error("camera coincides with the surface position at texel {0}")]
    DegenerateView(usize),
    #[error("resolution mismatch: {what} has {got} texels, expected {expected}")]
    Resolution { what: String, got: usize, expected: usize },
    #[error("invalid texture maps: {0}")]
    InvalidMaps(String),
    #[error(transparent)]
    Sh(#[from] ShError),
}

/// Kernel settings shared by every texel.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadingConfig {
    roughness: f64,
    lambert: [f64; 3],
    rough: [f64; MAX_DEGREE + 1],
}

impl ShadingConfig {
    pub fn new(roughness: f64) -> Result<Self, ShadeError> {
        let r = sh::roughness_coeffs(roughness, MAX_DEGREE)?;
        let a = sh::lambert_coeffs(2)?;
        let mut rough = [0.0; MAX_DEGREE + 1];
        rough.copy_from_slice(r.values());
        Ok(ShadingConfig { roughness, lambert: [a.get(0), a.get(1), a.get(2)], rough })
    }

    pub fn roughness(&self) -> f64 {
        self.roughness
    }
    pub fn lambert(&self, l: usize) -> f64 {
        self.lambert[l]
    }
    pub fn rough(&self, l: usize) -> f64 {
        self.rough[l]
    }
}

impl Default for ShadingConfig {
    fn default() -> Self {
        Self::new(DEFAULT_ROUGHNESS).expect("default roughness is valid")
    }
}

/// Intrinsic parameters of a single texel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Texel {
    pub diffuse: [f64; 3],
    pub specular: f64,
    pub ambient_occlusion: f64,
    pub translucency: f64,
    pub normal: [f64; 3],
}

/// The co-registered intrinsic maps. All buffers are row-major, top row first.
#[derive(Debug, Clone, PartialEq)]
pub struct TextureMapSet {
    pub width: usize,
    pub height: usize,
    pub diffuse: Vec<[f64; 3]>,
    pub specular: Vec<f64>,
    pub ambient_occlusion: Vec<f64>,
    pub translucency: Vec<f64>,
    pub normals: Vec<[f64; 3]>,
    pub mask: Vec<bool>,
}

impl TextureMapSet {
    /// Every texel valid and equal to `texel`.
    pub fn uniform(width: usize, height: usize, texel: Texel) -> Self {
        let n = width * height;
        TextureMapSet {
            width,
            height,
            diffuse: vec![texel.diffuse; n],
            specular: vec![texel.specular; n],
            ambient_occlusion: vec![texel.ambient_occlusion; n],
            translucency: vec![texel.translucency; n],
            normals: vec![texel.normal; n],
            mask: vec![true; n],
        }
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn texel(&self, i: usize) -> Texel {
        Texel {
            diffuse: self.diffuse[i],
            specular: self.specular[i],
            ambient_occlusion: self.ambient_occlusion[i],
            translucency: self.translucency[i],
            normal: self.normals[i],
        }
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    pub fn check_sizes(&self) -> Result<(), ShadeError> {
        let n = self.len();
        let sizes = [
            ("diffuse", self.diffuse.len()),
            ("specular", self.specular.len()),
            ("ambient occlusion", self.ambient_occlusion.len()),
            ("translucency", self.translucency.len()),
            ("normals", self.normals.len()),
            ("mask", self.mask.len()),
        ];
        for (what, got) in sizes {
            if got != n {
                return Err(ShadeError::Resolution { what: what.into(), got, expected: n });
            }
        }
        Ok(())
    }

    /// Checks sizes, value ranges and normal length on every valid texel.
    pub fn validate(&self) -> Result<(), ShadeError> {
        self.check_sizes()?;
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        for i in (0..self.len()).filter(|i| self.mask[*i]) {
            let t = self.texel(i);
            if !t.diffuse.iter().all(|v| in_unit(*v)) {
                return Err(ShadeError::InvalidMaps(format!("diffuse out of [0,1] at texel {i}")));
            }
            for (name, v) in [
                ("specular", t.specular),
                ("ambient occlusion", t.ambient_occlusion),
                ("translucency", t.translucency),
            ] {
                if !in_unit(v) {
                    return Err(ShadeError::InvalidMaps(format!(
                        "{name} = {v} out of [0,1] at texel {i}"
                    )));
                }
            }
            check_unit("normal", i, t.normal)?;
        }
        Ok(())
    }
}

/// How the view vector is obtained per texel.
#[derive(Debug, Clone, PartialEq)]
pub enum ViewModel {
    Constant(Direction),
    Camera { position: [f64; 3], positions: Option<Vec<[f64; 3]>> },
}

impl Default for ViewModel {
    fn default() -> Self {
        ViewModel::Constant(Direction::UP)
    }
}

impl ViewModel {
    pub(crate) fn check(&self, texels: usize) -> Result<(), ShadeError> {
        match self {
            ViewModel::Constant(_) => Ok(()),
            ViewModel::Camera { positions: None, .. } => Err(ShadeError::MissingPositions),
            ViewModel::Camera { positions: Some(p), .. } if p.len() != texels => {
                Err(ShadeError::Resolution { what: "position map".into(), got: p.len(), expected: texels })
            }
            ViewModel::Camera { .. } => Ok(()),
        }
    }

    /// View vector at texel `i`.
    pub fn view_at(&self, i: usize) -> Result<[f64; 3], ShadeError> {
        match self {
            ViewModel::Constant(d) => Ok(d.as_array()),
            ViewModel::Camera { positions: None, .. } => Err(ShadeError::MissingPositions),
            ViewModel::Camera { position, positions: Some(p) } => {
                let q = p[i];
                Direction::normalized([position[0] - q[0], position[1] - q[1], position[2] - q[2]])
                    .map(|d| d.as_array())
                    .ok_or(ShadeError::DegenerateView(i))
            }
        }
    }
}

/// Shaded RGB radiance per texel; invalid texels are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadedTexture {
    pub width: usize,
    pub height: usize,
    pub rgb: Vec<[f64; 3]>,
    pub mask: Vec<bool>,
}

impl ShadedTexture {
    pub fn len(&self) -> usize {
        self.width * self.height
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn check_unit(what: &'static str, index: usize, v: [f64; 3]) -> Result<(), ShadeError> {
    let norm = dot(v, v).sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOLERANCE {
        return Err(ShadeError::NotUnit { what, index, norm });
    }
    Ok(())
}

/// Mirror of `v` about `n`: `2(n·v)n − v`.
pub fn reflect(v: Direction, n: Direction) -> Direction {
    let (v, n) = (v.as_array(), n.as_array());
    let k = 2.0 * dot(n, v);
    let r = [k * n[0] - v[0], k * n[1] - v[1], k * n[2] - v[2]];
    // |r| = |v| for unit n; renormalize to absorb rounding.
    Direction::normalized(r).unwrap_or_else(|| Direction::from_unit_unchecked(r))
}

/// Schlick's approximation `s + (1 − s)(1 − cos θ)^5`, with `cos θ` clamped to [0, 1].
pub fn fresnel_schlick(s: f64, cos_theta: f64) -> f64 {
    let k = fresnel_complement(cos_theta);
    s + (1.0 - s) * k
}

/// `(1 − cos θ)^5` with `cos θ` clamped to [0, 1].
pub fn fresnel_complement(cos_theta: f64) -> f64 {
    (1.0 - cos_theta.clamp(0.0, 1.0)).powi(5)
}

/// SH basis values a texel needs: `Y(n)` for l ≤ 2 and `Y(r)` for l ≤ 8.
/// These depend only on geometry, not on light or reflectance.
#[derive(Debug, Clone, PartialEq)]
pub struct TexelBasis {
    pub normal: [f64; LOW_ORDER_COEFFS],
    pub reflected: [f64; NUM_COEFFS],
    /// `(1 − cos θ)^5`, the part of the Fresnel term not scaled by `s`.
    pub fresnel_k: f64,
}

impl TexelBasis {
    /// `n` and `v` must be unit within [`UNIT_TOLERANCE`]; they are
    /// renormalized before use.
    pub fn new(n: [f64; 3], v: [f64; 3]) -> Result<Self, ShadeError> {
        Self::new_at(0, n, v)
    }

    pub(crate) fn new_at(index: usize, n: [f64; 3], v: [f64; 3]) -> Result<Self, ShadeError> {
        check_unit("normal", index, n)?;
        check_unit("view vector", index, v)?;
        let n = Direction::normalized(n).expect("checked");
        let v = Direction::normalized(v).expect("checked");
        let r = reflect(v, n);
        let mut normal = [0.0; LOW_ORDER_COEFFS];
        let mut reflected = [0.0; NUM_COEFFS];
        sh::sh_eval_all_into(n, 2, &mut normal)?;
        sh::sh_eval_all_into(r, MAX_DEGREE, &mut reflected)?;
        let cos_theta = dot(n.as_array(), v.as_array());
        Ok(TexelBasis { normal, reflected, fresnel_k: fresnel_complement(cos_theta) })
    }

    /// Contracts the basis with the light and the fixed kernels.
    pub fn terms(&self, light: &SHLight, cfg: &ShadingConfig) -> TexelTerms {
        let mut t = TexelTerms { fresnel_k: self.fresnel_k, ..TexelTerms::default() };
        for c in 0..3 {
            let g = &light.coeffs[c];
            let y = &self.normal;
            let band0 = g[0] * y[0];
            let band1 = g[1] * y[1] + g[2] * y[2] + g[3] * y[3];
            let band2 = g[4] * y[4] + g[5] * y[5] + g[6] * y[6] + g[7] * y[7] + g[8] * y[8];
            t.diffuse[c] = cfg.lambert[0] * band0 + cfg.lambert[1] * band1 + cfg.lambert[2] * band2;
            t.sss[0][c] = band1;
            t.sss[1][c] = band2;
            let mut spec = 0.0;
            for l in 0..=MAX_DEGREE {
                let lo = l * l;
                let hi = (l + 1) * (l + 1);
                let band: f64 = g[lo..hi].iter().zip(&self.reflected[lo..hi]).map(|(a, b)| a * b).sum();
                spec += cfg.rough[l] * band;
            }
            t.specular[c] = spec;
        }
        t
    }
}

/// Light-dependent SH sums of a texel with the reflectance prefactors removed.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TexelTerms {
    /// `Σ_{l≤2} A_l γ Y(n)` per channel.
    pub diffuse: [f64; 3],
    /// Band-1 and band-2 sums `Σ_m γ Y(n)` per channel.
    pub sss: [[f64; 3]; 2],
    /// `Σ_{l≤8} R_l γ Y(r)` per channel.
    pub specular: [f64; 3],
    pub fresnel_k: f64,
}

impl TexelTerms {
    pub fn shade(&self, d: [f64; 3], s: f64, a: f64, t: f64) -> [f64; 3] {
        let s1 = sh::sss_kernel(1, t);
        let s2 = sh::sss_kernel(2, t);
        let f = s + (1.0 - s) * self.fresnel_k;
        let mut out = [0.0; 3];
        for c in 0..3 {
            let diffuse = d[c] * a * self.diffuse[c];
            let sss = d[c] * (s1 * self.sss[0][c] + s2 * self.sss[1][c]);
            out[c] = diffuse + sss + f * self.specular[c];
        }
        out
    }
}

/// Shades one texel. `view` points from the surface toward the viewer.
pub fn shade_texel(
    texel: &Texel,
    view: [f64; 3],
    light: &SHLight,
    cfg: &ShadingConfig,
) -> Result<[f64; 3], ShadeError> {
    let basis = TexelBasis::new(texel.normal, view)?;
    Ok(basis.terms(light, cfg).shade(
        texel.diffuse,
        texel.specular,
        texel.ambient_occlusion,
        texel.translucency,
    ))
}

/// Shades every valid texel in parallel. Each texel is independent, so the
/// result does not depend on the worker count.
pub fn shade_texture(
    maps: &TextureMapSet,
    view: &ViewModel,
    light: &SHLight,
    cfg: &ShadingConfig,
) -> Result<ShadedTexture, ShadeError> {
    maps.check_sizes()?;
    view.check(maps.len())?;
    let rgb = (0..maps.len())
        .into_par_iter()
        .map(|i| {
            if !maps.mask[i] {
                return Ok([0.0; 3]);
            }
            let basis = TexelBasis::new_at(i, maps.normals[i], view.view_at(i)?)?;
            Ok(basis.terms(light, cfg).shade(
                maps.diffuse[i],
                maps.specular[i],
                maps.ambient_occlusion[i],
                maps.translucency[i],
            ))
        })
        .collect::<Result<Vec<_>, ShadeError>>()?;
    Ok(ShadedTexture { width: maps.width, height: maps.height, rgb, mask: maps.mask.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sh::sh_eval;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
        loop {
            let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            if let Some(d) = Direction::normalized(v).filter(|_| dot(v, v) > 1e-3) {
                return d.as_array();
            }
        }
    }

    fn random_light(rng: &mut ChaCha8Rng) -> SHLight {
        let mut l = SHLight::zero();
        l.coeffs.iter_mut().flatten().for_each(|v| *v = rng.random_range(-1.0..1.0));
        l
    }

    fn random_maps(rng: &mut ChaCha8Rng, w: usize, h: usize) -> TextureMapSet {
        let n = w * h;
        TextureMapSet {
            width: w,
            height: h,
            diffuse: (0..n).map(|_| std::array::from_fn(|_| rng.random_range(0.0..1.0))).collect(),
            specular: (0..n).map(|_| rng.random_range(0.0..1.0)).collect(),
            ambient_occlusion: (0..n).map(|_| rng.random_range(0.0..1.0)).collect(),
            translucency: (0..n).map(|_| rng.random_range(0.0..1.0)).collect(),
            normals: (0..n)
                .map(|_| {
                    let mut v = unit(rng);
                    v[2] = v[2].abs();
                    v
                })
                .collect(),
            mask: vec![true; n],
        }
    }

    fn dc_texel() -> Texel {
        Texel {
            diffuse: [1.0; 3],
            specular: 0.0,
            ambient_occlusion: 1.0,
            translucency: 0.0,
            normal: [0.0, 0.0, 1.0],
        }
    }

    #[test]
    fn reflect_cases() {
        let z = Direction::UP;
        assert_eq!(reflect(z, z).as_array(), [0.0, 0.0, 1.0]);
        let x = Direction::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(reflect(x, z).as_array(), [-1.0, 0.0, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let v = Direction::normalized(unit(&mut rng)).unwrap();
            let n = Direction::normalized(unit(&mut rng)).unwrap();
            let r = reflect(v, n);
            let len = dot(r.as_array(), r.as_array()).sqrt();
            assert!((len - 1.0).abs() < 1e-6);
            assert!((dot(r.as_array(), n.as_array()) - dot(v.as_array(), n.as_array())).abs() < 1e-6);
        }
    }

    #[test]
    fn fresnel_cases() {
        assert_eq!(fresnel_schlick(0.5, 1.0), 0.5);
        assert_eq!(fresnel_schlick(0.5, 0.0), 1.0);
        assert!((fresnel_schlick(0.04, 0.5) - 0.07).abs() < 1e-15);
        assert_eq!(fresnel_schlick(0.2, -0.3), 1.0);
        for i in 0..=20 {
            for j in 0..=20 {
                let (s, c) = (i as f64 / 20.0, j as f64 / 20.0);
                let f = fresnel_schlick(s, c);
                assert!(f >= s.min(1.0) - 1e-15 && f <= 1.0 + 1e-15);
            }
        }
    }

    #[test]
    fn dc_texel_value() {
        let light = SHLight::dc([1.0; 3]);
        let cfg = ShadingConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let mut t = dc_texel();
            t.normal = unit(&mut rng);
            let out = shade_texel(&t, [0.0, 0.0, 1.0], &light, &cfg).unwrap();
            // The Fresnel term with s = 0 still reflects at grazing angles,
            // so compare the frontal-normal case exactly and the others through terms.
            let basis = TexelBasis::new(t.normal, [0.0, 0.0, 1.0]).unwrap();
            let terms = basis.terms(&light, &cfg);
            assert_eq!(terms.sss, [[0.0; 3]; 2]);
            for c in 0..3 {
                assert!((terms.diffuse[c] - PI.sqrt() / 2.0).abs() < 1e-12);
                assert!((out[c] - terms.diffuse[c] - terms.fresnel_k * terms.specular[c]).abs() < 1e-12);
            }
        }
        let out = shade_texel(&dc_texel(), [0.0, 0.0, 1.0], &light, &cfg).unwrap();
        for v in out {
            assert!((v - 0.886_226_925_452_758).abs() < 1e-12);
            assert!((v - 0.8862269).abs() < 1e-7);
        }
    }

    #[test]
    fn dc_irradiance_matches_quadrature() {
        // Independent route: integrate L·max(n·ω, 0) over the sphere.
        let (w, h) = (512usize, 256usize);
        let radiance = 1.0 / (2.0 * PI.sqrt()); // γ_00 = 1
        let mut e = 0.0;
        for row in 0..h {
            let dw = crate::envlight::pixel_solid_angle(row, w, h);
            for col in 0..w {
                let d = crate::envlight::pixel_direction(col, row, w, h);
                e += radiance * d.z().max(0.0) * dw;
            }
        }
        assert!((e - PI.sqrt() / 2.0).abs() < 1e-4);
    }

    #[test]
    fn zero_light_is_black() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let maps = random_maps(&mut rng, 4, 4);
        let out = shade_texture(&maps, &ViewModel::default(), &SHLight::zero(), &ShadingConfig::default())
            .unwrap();
        assert!(out.rgb.iter().all(|p| *p == [0.0; 3]));
    }

    #[test]
    fn specular_only_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cfg = ShadingConfig::default();
        for _ in 0..20 {
            let light = random_light(&mut rng);
            let mut n = unit(&mut rng);
            n[2] = n[2].abs();
            let v = unit(&mut rng);
            let texel = Texel {
                diffuse: [0.0; 3],
                specular: 1.0,
                ambient_occlusion: rng.random_range(0.0..1.0),
                translucency: rng.random_range(0.0..1.0),
                normal: n,
            };
            let out = shade_texel(&texel, v, &light, &cfg).unwrap();
            // Scalar-loop oracle through the trig-based basis evaluation.
            let k = 2.0 * dot(n, v);
            let r = Direction::normalized([k * n[0] - v[0], k * n[1] - v[1], k * n[2] - v[2]]).unwrap();
            for c in 0..3 {
                let mut acc = 0.0;
                for l in 0..=8i64 {
                    for m in -l..=l {
                        let kk = (l * (l + 1) + m) as usize;
                        acc += (-(0.25 * l as f64).powi(2)).exp()
                            * light.coeffs[c][kk]
                            * sh_eval(l, m, r).unwrap();
                    }
                }
                assert!((out[c] - acc).abs() < 1e-12, "{} vs {}", out[c], acc);
            }
        }
    }

    #[test]
    fn full_texel_matches_scalar_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = ShadingConfig::default();
        for _ in 0..20 {
            let light = random_light(&mut rng);
            let n = unit(&mut rng);
            let v = unit(&mut rng);
            let d: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
            let (s, a, t) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0), rng.random_range(0.3..1.0));
            let texel = Texel { diffuse: d, specular: s, ambient_occlusion: a, translucency: t, normal: n };
            let out = shade_texel(&texel, v, &light, &cfg).unwrap();
            let nd = Direction::normalized(n).unwrap();
            let lam = [PI, 2.0 * PI / 3.0, PI / 4.0];
            let cos = dot(n, v).clamp(0.0, 1.0);
            let f = s + (1.0 - s) * (1.0 - cos).powi(5);
            let k = 2.0 * dot(n, v);
            let r = Direction::normalized([k * n[0] - v[0], k * n[1] - v[1], k * n[2] - v[2]]).unwrap();
            for c in 0..3 {
                let (mut bd, mut bs, mut bsp) = (0.0, 0.0, 0.0);
                for l in 0..=8i64 {
                    for m in -l..=l {
                        let g = light.coeffs[c][(l * (l + 1) + m) as usize];
                        if l <= 2 {
                            let y = sh_eval(l, m, nd).unwrap();
                            bd += lam[l as usize] * g * y;
                            if l >= 1 {
                                bs += (-((l * l) as f64) / t.powi(4)).exp() * g * y;
                            }
                        }
                        bsp += (-(0.25 * l as f64).powi(2)).exp() * g * sh_eval(l, m, r).unwrap();
                    }
                }
                let expect = d[c] * a * bd + d[c] * bs + f * bsp;
                assert!((out[c] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn texture_matches_texels() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let maps = random_maps(&mut rng, 64, 64);
        let light = random_light(&mut rng);
        let cfg = ShadingConfig::default();
        let view = ViewModel::default();
        let out = shade_texture(&maps, &view, &light, &cfg).unwrap();
        for i in 0..maps.len() {
            let t = shade_texel(&maps.texel(i), [0.0, 0.0, 1.0], &light, &cfg).unwrap();
            for c in 0..3 {
                assert!((out.rgb[i][c] - t[c]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn one_by_one_dc() {
        let maps = TextureMapSet::uniform(1, 1, dc_texel());
        let out = shade_texture(&maps, &ViewModel::default(), &SHLight::dc([1.0; 3]), &ShadingConfig::default())
            .unwrap();
        assert!((out.rgb[0][0] - 0.8862269).abs() < 1e-7);
    }

    #[test]
    fn invalid_texels_are_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut maps = random_maps(&mut rng, 3, 2);
        maps.mask = vec![false; 6];
        maps.normals[0] = [0.0; 3]; // ignored when masked
        let out = shade_texture(&maps, &ViewModel::default(), &random_light(&mut rng), &ShadingConfig::default())
            .unwrap();
        assert!(out.rgb.iter().all(|p| *p == [0.0; 3]));
        assert_eq!(out.mask, vec![false; 6]);
    }

    #[test]
    fn errors() {
        let cfg = ShadingConfig::default();
        let light = SHLight::dc([1.0; 3]);
        let mut t = dc_texel();
        t.normal = [0.0, 0.0, 1.1];
        assert!(matches!(shade_texel(&t, [0.0, 0.0, 1.0], &light, &cfg), Err(ShadeError::NotUnit { .. })));
        assert!(shade_texel(&dc_texel(), [0.0, 0.5, 0.5], &light, &cfg).is_err());
        let maps = TextureMapSet::uniform(2, 2, dc_texel());
        let cam = ViewModel::Camera { position: [0.0, 0.0, 5.0], positions: None };
        assert_eq!(shade_texture(&maps, &cam, &light, &cfg), Err(ShadeError::MissingPositions));
        let cam = ViewModel::Camera { position: [0.0, 0.0, 5.0], positions: Some(vec![[0.0; 3]; 3]) };
        assert!(matches!(shade_texture(&maps, &cam, &light, &cfg), Err(ShadeError::Resolution { .. })));
        assert!(ShadingConfig::new(0.0).is_err());
    }

    #[test]
    fn camera_mode_uses_per_texel_view() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let maps = random_maps(&mut rng, 4, 4);
        let light = random_light(&mut rng);
        let cfg = ShadingConfig::default();
        let positions: Vec<[f64; 3]> =
            (0..16).map(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0))).collect();
        let cam = [0.3, -0.2, 4.0];
        let view = ViewModel::Camera { position: cam, positions: Some(positions.clone()) };
        let out = shade_texture(&maps, &view, &light, &cfg).unwrap();
        for i in 0..16 {
            let p = positions[i];
            let v = Direction::normalized([cam[0] - p[0], cam[1] - p[1], cam[2] - p[2]]).unwrap();
            let t = shade_texel(&maps.texel(i), v.as_array(), &light, &cfg).unwrap();
            assert_eq!(out.rgb[i], t);
        }
    }

    #[test]
    fn linearity_in_light() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let maps = random_maps(&mut rng, 16, 16);
        let (l1, l2) = (random_light(&mut rng), random_light(&mut rng));
        let cfg = ShadingConfig::default();
        let view = ViewModel::default();
        let s1 = shade_texture(&maps, &view, &l1, &cfg).unwrap();
        let s2 = shade_texture(&maps, &view, &l2, &cfg).unwrap();
        let s12 = shade_texture(&maps, &view, &l1.add(&l2), &cfg).unwrap();
        let sk = shade_texture(&maps, &view, &l1.scaled(2.5), &cfg).unwrap();
        for i in 0..maps.len() {
            for c in 0..3 {
                assert!((s12.rgb[i][c] - s1.rgb[i][c] - s2.rgb[i][c]).abs() < 1e-10);
                assert!((sk.rgb[i][c] - 2.5 * s1.rgb[i][c]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn dc_light_ignores_normals_without_specular() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut a = random_maps(&mut rng, 8, 8);
        a.specular = vec![0.0; 64];
        let mut b = a.clone();
        b.normals = random_maps(&mut rng, 8, 8).normals;
        let light = SHLight::dc([0.7, 1.1, 0.4]);
        let cfg = ShadingConfig::default();
        for i in 0..64 {
            let ta = TexelBasis::new(a.normals[i], [0.0, 0.0, 1.0]).unwrap().terms(&light, &cfg);
            let tb = TexelBasis::new(b.normals[i], [0.0, 0.0, 1.0]).unwrap().terms(&light, &cfg);
            assert_eq!(ta.sss, [[0.0; 3]; 2]);
            for c in 0..3 {
                assert!((ta.diffuse[c] - tb.diffuse[c]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn diffuse_ao_product_confound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let light = random_light(&mut rng);
        let cfg = ShadingConfig::default();
        for _ in 0..200 {
            let d: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..0.5));
            let a = rng.random_range(0.0..0.5);
            let t = Texel { diffuse: d, specular: 0.0, ambient_occlusion: a, translucency: 0.0, normal: unit(&mut rng) };
            let v = [0.0, 0.0, 1.0];
            let base = shade_texel(&t, v, &light, &cfg).unwrap();
            for c in [0.5, 2.0] {
                let t2 = Texel { diffuse: d.map(|x| x * c), ambient_occlusion: a / c, ..t };
                let out = shade_texel(&t2, v, &light, &cfg).unwrap();
                for ch in 0..3 {
                    assert!((out[ch] - base[ch]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sss_grows_with_translucency() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let cfg = ShadingConfig::default();
        for _ in 0..100 {
            let light = random_light(&mut rng);
            let n = unit(&mut rng);
            let terms = TexelBasis::new(n, [0.0, 0.0, 1.0]).unwrap().terms(&light, &cfg);
            let sss = |t: f64, c: usize| sh::sss_kernel(1, t) * terms.sss[0][c] + sh::sss_kernel(2, t) * terms.sss[1][c];
            for c in (0..3).filter(|c| terms.sss[0][*c] >= 0.0 && terms.sss[1][*c] >= 0.0) {
                let mut prev = sss(0.0, c);
                for i in 1..=50 {
                    let cur = sss(i as f64 / 50.0, c);
                    assert!(cur >= prev);
                    prev = cur;
                }
            }
        }
    }

    #[test]
    fn validation() {
        let mut maps = TextureMapSet::uniform(2, 2, dc_texel());
        assert!(maps.validate().is_ok());
        maps.specular[1] = 1.5;
        assert!(maps.validate().is_err());
        maps.mask[1] = false;
        assert!(maps.validate().is_ok());
        maps.normals[0] = [0.0, 0.0, 0.9];
        assert!(maps.validate().is_err());
        maps.translucency.pop();
        assert!(matches!(maps.check_sizes(), Err(ShadeError::Resolution { .. })));
    }
}
