//! Analytic derivatives of the texel shading model and a finite-difference
//! harness that checks them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::envlight::SHLight;
use crate::reduce::{pairwise_sum, CoeffBlock};
use crate::sh::{self, Direction, NUM_COEFFS};
use crate::shader::{
    ShadeError, ShadingConfig, Texel, TexelBasis, TexelTerms, TextureMapSet, ViewModel,
    LOW_ORDER_COEFFS,
};

/// Texels per partial sum when reducing light gradients across a texture.
/// Fixed so that the reduction tree never depends on the thread count.
pub(crate) const REDUCE_CHUNK: usize = 256;

/// Partial derivatives of one shaded texel. Outer index is the output channel.
#[derive(Debug, Clone, PartialEq)]
pub struct TexelGradient {
    /// `[out][in]`; off-diagonal entries are zero.
    pub diffuse: [[f64; 3]; 3],
    pub ambient_occlusion: [f64; 3],
    pub specular: [f64; 3],
    pub translucency: [f64; 3],
    /// `∂m_c/∂γ_{k,c}`; channels never mix, so only the matching channel is stored.
    pub light: [[f64; NUM_COEFFS]; 3],
}

/// Reflectance-only derivatives given the texel's SH sums.
pub(crate) struct ParamGrad {
    pub diffuse: [f64; 3],
    pub ambient_occlusion: [f64; 3],
    pub specular: [f64; 3],
    pub translucency: [f64; 3],
}

pub(crate) fn param_grad(terms: &TexelTerms, d: [f64; 3], a: f64, t: f64) -> ParamGrad {
    let (s1, s2) = (sh::sss_kernel(1, t), sh::sss_kernel(2, t));
    let (ds1, ds2) = (sh::sss_kernel_dt(1, t), sh::sss_kernel_dt(2, t));
    let mut g = ParamGrad {
        diffuse: [0.0; 3],
        ambient_occlusion: [0.0; 3],
        specular: [0.0; 3],
        translucency: [0.0; 3],
    };
    for c in 0..3 {
        g.diffuse[c] = a * terms.diffuse[c] + s1 * terms.sss[0][c] + s2 * terms.sss[1][c];
        g.ambient_occlusion[c] = d[c] * terms.diffuse[c];
        g.specular[c] = (1.0 - terms.fresnel_k) * terms.specular[c];
        g.translucency[c] = d[c] * (ds1 * terms.sss[0][c] + ds2 * terms.sss[1][c]);
    }
    g
}

/// Per-coefficient weights `w` with `m_c = Σ_k w_c[k] γ_{k,c}`.
pub(crate) fn light_weights(
    basis: &TexelBasis,
    cfg: &ShadingConfig,
    d: [f64; 3],
    s: f64,
    a: f64,
    t: f64,
) -> [[f64; NUM_COEFFS]; 3] {
    let f = s + (1.0 - s) * basis.fresnel_k;
    let sss = [0.0, sh::sss_kernel(1, t), sh::sss_kernel(2, t)];
    let mut spec = [0.0; NUM_COEFFS];
    for (k, w) in spec.iter_mut().enumerate() {
        *w = f * cfg.rough(sh::degree_of(k)) * basis.reflected[k];
    }
    let mut out = [spec; 3];
    for c in 0..3 {
        for k in 0..LOW_ORDER_COEFFS {
            let l = sh::degree_of(k);
            out[c][k] += d[c] * (a * cfg.lambert(l) + sss[l]) * basis.normal[k];
        }
    }
    out
}

/// Forward value and every partial derivative of one texel.
pub fn grad_texel(
    texel: &Texel,
    view: [f64; 3],
    light: &SHLight,
    cfg: &ShadingConfig,
) -> Result<([f64; 3], TexelGradient), ShadeError> {
    let basis = TexelBasis::new(texel.normal, view)?;
    let terms = basis.terms(light, cfg);
    let (d, s, a, t) = (texel.diffuse, texel.specular, texel.ambient_occlusion, texel.translucency);
    let value = terms.shade(d, s, a, t);
    let p = param_grad(&terms, d, a, t);
    let mut diffuse = [[0.0; 3]; 3];
    for c in 0..3 {
        diffuse[c][c] = p.diffuse[c];
    }
    Ok((
        value,
        TexelGradient {
            diffuse,
            ambient_occlusion: p.ambient_occlusion,
            specular: p.specular,
            translucency: p.translucency,
            light: light_weights(&basis, cfg, d, s, a, t),
        },
    ))
}

/// Gradients of a scalar loss with respect to every map and the light.
#[derive(Debug, Clone, PartialEq)]
pub struct MapGradients {
    pub diffuse: Vec<[f64; 3]>,
    pub specular: Vec<f64>,
    pub ambient_occlusion: Vec<f64>,
    pub translucency: Vec<f64>,
    pub light: SHLight,
}

/// Back-propagates `upstream` (∂loss/∂m̂ per texel and channel) to the maps
/// and the light. Invalid texels contribute nothing.
pub fn grad_texture(
    maps: &TextureMapSet,
    view: &ViewModel,
    light: &SHLight,
    cfg: &ShadingConfig,
    upstream: &[[f64; 3]],
) -> Result<MapGradients, ShadeError> {
    maps.check_sizes()?;
    view.check(maps.len())?;
    if upstream.len() != maps.len() {
        return Err(ShadeError::Resolution {
            what: "upstream gradient".into(),
            got: upstream.len(),
            expected: maps.len(),
        });
    }
    let n = maps.len();
    let per_texel: Vec<([f64; 3], f64, f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            if !maps.mask[i] {
                return Ok(([0.0; 3], 0.0, 0.0, 0.0));
            }
            let basis = TexelBasis::new_at(i, maps.normals[i], view.view_at(i)?)?;
            let terms = basis.terms(light, cfg);
            let t = maps.texel(i);
            let p = param_grad(&terms, t.diffuse, t.ambient_occlusion, t.translucency);
            let u = upstream[i];
            let dd = [u[0] * p.diffuse[0], u[1] * p.diffuse[1], u[2] * p.diffuse[2]];
            let dot = |g: [f64; 3]| u[0] * g[0] + u[1] * g[1] + u[2] * g[2];
            Ok((dd, dot(p.specular), dot(p.ambient_occlusion), dot(p.translucency)))
        })
        .collect::<Result<_, ShadeError>>()?;

    let chunks: Vec<CoeffBlock> = (0..n.div_ceil(REDUCE_CHUNK))
        .into_par_iter()
        .map(|ci| {
            let mut acc = vec![0.0; 3 * NUM_COEFFS];
            for i in ci * REDUCE_CHUNK..((ci + 1) * REDUCE_CHUNK).min(n) {
                if !maps.mask[i] {
                    continue;
                }
                let basis = TexelBasis::new_at(i, maps.normals[i], view.view_at(i)?)?;
                let t = maps.texel(i);
                let w = light_weights(&basis, cfg, t.diffuse, t.specular, t.ambient_occlusion, t.translucency);
                for c in 0..3 {
                    let u = upstream[i][c];
                    for k in 0..NUM_COEFFS {
                        acc[c * NUM_COEFFS + k] += u * w[c][k];
                    }
                }
            }
            Ok(CoeffBlock(acc))
        })
        .collect::<Result<_, ShadeError>>()?;
    let total = pairwise_sum(&chunks);
    let mut light_grad = SHLight::zero();
    if !total.0.is_empty() {
        for c in 0..3 {
            light_grad.coeffs[c].copy_from_slice(&total.0[c * NUM_COEFFS..(c + 1) * NUM_COEFFS]);
        }
    }

    Ok(MapGradients {
        diffuse: per_texel.iter().map(|p| p.0).collect(),
        specular: per_texel.iter().map(|p| p.1).collect(),
        ambient_occlusion: per_texel.iter().map(|p| p.2).collect(),
        translucency: per_texel.iter().map(|p| p.3).collect(),
        light: light_grad,
    })
}

/// Settings for [`fd_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    pub seed: u64,
    pub samples: usize,
    pub h: f64,
    pub tolerance: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig { seed: 0, samples: 100, h: 1e-4, tolerance: 1e-5 }
    }
}

/// Smallest translucency sampled; below this the kernel is flat zero.
pub const MIN_SAMPLED_TRANSLUCENCY: f64 = 0.05;

/// Denominator floor for the relative error, so partials that are
/// numerically zero are compared in absolute terms.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-2;

/// `|analytic − numeric| / max(|analytic|, |numeric|, RELATIVE_ERROR_FLOOR)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(RELATIVE_ERROR_FLOOR)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamFamily {
    Diffuse,
    AmbientOcclusion,
    Specular,
    Translucency,
    Light,
}

impl ParamFamily {
    pub const ALL: [ParamFamily; 5] = [
        ParamFamily::Diffuse,
        ParamFamily::AmbientOcclusion,
        ParamFamily::Specular,
        ParamFamily::Translucency,
        ParamFamily::Light,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ParamFamily::Diffuse => "diffuse",
            ParamFamily::AmbientOcclusion => "ambient_occlusion",
            ParamFamily::Specular => "specular",
            ParamFamily::Translucency => "translucency",
            ParamFamily::Light => "light",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyReport {
    pub family: ParamFamily,
    pub checked: usize,
    pub max_relative_error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdReport {
    pub config: FdConfig,
    pub families: Vec<FamilyReport>,
}

impl FdReport {
    pub fn passed(&self) -> bool {
        self.families.iter().all(|f| f.passed)
    }

    pub fn family(&self, family: ParamFamily) -> Option<&FamilyReport> {
        self.families.iter().find(|f| f.family == family)
    }
}

impl std::fmt::Display for FdReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "gradient check: seed={} samples={} h={:e} tol={:e}",
            self.config.seed, self.config.samples, self.config.h, self.config.tolerance
        )?;
        for fam in &self.families {
            writeln!(
                f,
                "{:<18} checked={:<6} max_rel_err={:.3e} {}",
                fam.family.name(),
                fam.checked,
                fam.max_relative_error,
                if fam.passed { "PASS" } else { "FAIL" }
            )?;
        }
        write!(f, "overall: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if n2 > 1e-3 && n2 <= 1.0 {
            return Direction::normalized(v).expect("nonzero").as_array();
        }
    }
}

/// Compares every analytic partial of [`grad_texel`] with central
/// differences at random parameter points. Mismatches are reported, never
/// raised.
pub fn fd_check(config: FdConfig, cfg: &ShadingConfig) -> FdReport {
    let mut report = FdReport { config, families: Vec::new() };
    if config.samples == 0 {
        return report;
    }
    let mut worst = [0.0f64; 5];
    let mut counts = [0usize; 5];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let h = config.h;
    let mut record = |fam: ParamFamily, analytic: f64, numeric: f64| {
        let i = fam as usize;
        counts[i] += 1;
        let e = relative_error(analytic, numeric);
        // NaN must fail the family.
        if !(e <= worst[i]) {
            worst[i] = if e.is_nan() { f64::INFINITY } else { e };
        }
    };

    for _ in 0..config.samples {
        let d: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
        let s = rng.random_range(0.0..1.0);
        let a = rng.random_range(0.0..1.0);
        let t = rng.random_range(MIN_SAMPLED_TRANSLUCENCY..1.0);
        let n = random_unit(&mut rng);
        let mut v = random_unit(&mut rng);
        if v[0] * n[0] + v[1] * n[1] + v[2] * n[2] < 0.0 {
            v = v.map(|x| -x);
        }
        let mut light = SHLight::zero();
        for c in 0..3 {
            for k in 0..NUM_COEFFS {
                light.coeffs[c][k] = rng.random_range(-1.0..1.0);
            }
        }
        let texel = Texel { diffuse: d, specular: s, ambient_occlusion: a, translucency: t, normal: n };
        let (_, g) = grad_texel(&texel, v, &light, cfg).expect("sampled inputs are unit");
        let basis = TexelBasis::new(n, v).expect("unit");
        let terms = basis.terms(&light, cfg);

        let central = |f: &dyn Fn(f64) -> [f64; 3]| -> [f64; 3] {
            let (p, m) = (f(h), f(-h));
            std::array::from_fn(|c| (p[c] - m[c]) / (2.0 * h))
        };

        for j in 0..3 {
            let fd = central(&|e| {
                let mut dd = d;
                dd[j] += e;
                terms.shade(dd, s, a, t)
            });
            for c in 0..3 {
                record(ParamFamily::Diffuse, g.diffuse[c][j], fd[c]);
            }
        }
        let fd = central(&|e| terms.shade(d, s, a + e, t));
        (0..3).for_each(|c| record(ParamFamily::AmbientOcclusion, g.ambient_occlusion[c], fd[c]));
        let fd = central(&|e| terms.shade(d, s + e, a, t));
        (0..3).for_each(|c| record(ParamFamily::Specular, g.specular[c], fd[c]));
        let fd = central(&|e| terms.shade(d, s, a, t + e));
        (0..3).for_each(|c| record(ParamFamily::Translucency, g.translucency[c], fd[c]));

        for j in 0..3 {
            for k in 0..NUM_COEFFS {
                let fd = central(&|e| {
                    let mut l = light.clone();
                    l.coeffs[j][k] += e;
                    basis.terms(&l, cfg).shade(d, s, a, t)
                });
                for c in 0..3 {
                    let analytic = if c == j { g.light[c][k] } else { 0.0 };
                    record(ParamFamily::Light, analytic, fd[c]);
                }
            }
        }
    }

    report.families = ParamFamily::ALL
        .iter()
        .map(|&family| {
            let i = family as usize;
            FamilyReport {
                family,
                checked: counts[i],
                max_relative_error: worst[i],
                passed: worst[i] <= config.tolerance,
            }
        })
        .collect();
    report
}
