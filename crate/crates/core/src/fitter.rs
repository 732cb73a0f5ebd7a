//! Inverse rendering: recover intrinsic maps (and optionally light) from
//! shaded observations by minimizing an ℓ1 shading loss with Adam.
//!
//! Scalar maps are optimized through logistic logits so every iterate stays
//! inside [0, 1]. Normals and the validity mask come from the initial map
//! set and are never optimized.
//!
//! Objective:
//!
//! ```text
//! λ_shading · mean_obs L1(shade(maps, light_obs), target_obs) + λ_light · Σ_obs mono(light_obs)
//! ```
//!
//! With the light held fixed, every texel's SH sums are computed once and
//! reused by every iteration.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::adam::{Adam, AdamConfig};
use crate::envlight::{monochrome_residual, monochrome_residual_grad, SHLight};
use crate::gradients::{light_weights, param_grad, REDUCE_CHUNK};
use crate::reduce::{pairwise_sum, pairwise_sum_f64, CoeffBlock};
use crate::sh::NUM_COEFFS;
use crate::shader::{
    ShadeError, ShadedTexture, ShadingConfig, Texel, TexelBasis, TexelTerms, TextureMapSet,
    ViewModel,
};

/// Logistic logits are taken of values clamped to `[LOGIT_EPS, 1 − LOGIT_EPS]`.
pub const LOGIT_EPS: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Shade(#[from] ShadeError),
    #[error("objective diverged at iteration {iteration}: {diagnostic}")]
    Diverged { iteration: usize, diagnostic: String, state: Box<FitState> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMode {
    #[default]
    Gray,
    /// Diffuse inverted from the first observation under its DC light.
    FromTarget,
    Random,
}

impl std::str::FromStr for InitMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gray" => Ok(InitMode::Gray),
            "from-target" | "from-target-heuristic" | "heuristic" => Ok(InitMode::FromTarget),
            "random" => Ok(InitMode::Random),
            other => Err(format!("unknown init mode '{other}' (gray, from-target, random)")),
        }
    }
}

/// Which scalar maps the optimizer may change. Frozen maps keep their
/// initial values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapSelection {
    pub diffuse: bool,
    pub specular: bool,
    pub ambient_occlusion: bool,
    pub translucency: bool,
}

impl Default for MapSelection {
    fn default() -> Self {
        MapSelection { diffuse: true, specular: true, ambient_occlusion: true, translucency: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub iterations: usize,
    pub lambda_shading: f64,
    pub lambda_light: f64,
    pub fit_light: bool,
    pub seed: u64,
    pub init: InitMode,
    pub trainable: MapSelection,
    pub shading: ShadingConfig,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            learning_rate: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            iterations: 5000,
            lambda_shading: 0.5,
            lambda_light: 0.0,
            fit_light: false,
            seed: 0,
            init: InitMode::Gray,
            trainable: MapSelection::default(),
            shading: ShadingConfig::default(),
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<(), FitError> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(FitError::Config(format!("learning rate must be > 0, got {}", self.learning_rate)));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(FitError::Config("Adam betas must lie in [0, 1)".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(FitError::Config("Adam epsilon must be > 0".into()));
        }
        if !(self.lambda_shading >= 0.0) || !(self.lambda_light >= 0.0) {
            return Err(FitError::Config("loss weights must be >= 0".into()));
        }
        Ok(())
    }

    fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
        }
    }
}

/// A target texture with the light and view it was captured under.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub target: ShadedTexture,
    pub light: SHLight,
    pub view: ViewModel,
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Mean absolute difference over valid texels and all three channels.
pub fn shading_loss(pred: &ShadedTexture, target: &ShadedTexture) -> Result<f64, FitError> {
    if pred.width != target.width || pred.height != target.height {
        return Err(FitError::Contract(format!(
            "resolution mismatch: {}x{} vs {}x{}",
            pred.width, pred.height, target.width, target.height
        )));
    }
    if pred.rgb.len() != pred.len() || target.rgb.len() != target.len() {
        return Err(FitError::Contract("pixel buffer does not match resolution".into()));
    }
    if pred.mask != target.mask {
        return Err(FitError::Contract("validity masks differ".into()));
    }
    let per_texel: Vec<f64> = pred
        .rgb
        .iter()
        .zip(&target.rgb)
        .zip(&pred.mask)
        .filter(|(_, m)| **m)
        .map(|((p, t), _)| (p[0] - t[0]).abs() + (p[1] - t[1]).abs() + (p[2] - t[2]).abs())
        .collect();
    if per_texel.is_empty() {
        return Ok(0.0);
    }
    Ok(pairwise_sum_f64(&per_texel) / (3 * per_texel.len()) as f64)
}

/// Diffuse albedo that reproduces `target` under a DC-only light with unit
/// ambient occlusion and no other terms: `target · 2 / (√π · γ_00)`.
pub fn heuristic_diffuse(target: [f64; 3], dc: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|c| {
        if dc[c] > 0.0 {
            target[c] * 2.0 / (PI.sqrt() * dc[c])
        } else {
            0.5
        }
    })
}

/// Gray defaults: d = 0.5, a = 1, s = 0.04, t = 0.3, n = +z.
pub const GRAY_TEXEL: Texel = Texel {
    diffuse: [0.5; 3],
    specular: 0.04,
    ambient_occlusion: 1.0,
    translucency: 0.3,
    normal: [0.0, 0.0, 1.0],
};

/// Initial maps. All texels are valid and normals point along +z; callers
/// replace normals and mask with the known geometry.
pub fn init_maps(
    mode: InitMode,
    width: usize,
    height: usize,
    seed: u64,
    observations: &[Observation],
) -> Result<TextureMapSet, FitError> {
    let mut maps = TextureMapSet::uniform(width, height, GRAY_TEXEL);
    match mode {
        InitMode::Gray => {}
        InitMode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in 0..maps.len() {
                maps.diffuse[i] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
                maps.specular[i] = rng.random_range(0.0..1.0);
                maps.ambient_occlusion[i] = rng.random_range(0.0..1.0);
                maps.translucency[i] = rng.random_range(0.0..1.0);
            }
        }
        InitMode::FromTarget => {
            let obs = observations
                .first()
                .ok_or_else(|| FitError::Config("from-target init needs an observation".into()))?;
            if obs.target.rgb.len() != maps.len() {
                return Err(FitError::Contract("target resolution differs from the maps".into()));
            }
            let dc = [obs.light.coeffs[0][0], obs.light.coeffs[1][0], obs.light.coeffs[2][0]];
            for (d, t) in maps.diffuse.iter_mut().zip(&obs.target.rgb) {
                *d = heuristic_diffuse(*t, dc).map(|v| v.clamp(0.01, 0.99));
            }
        }
    }
    Ok(maps)
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(LOGIT_EPS, 1.0 - LOGIT_EPS);
    (p / (1.0 - p)).ln()
}

/// Offsets of each optimized block inside the flat parameter vector.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Layout {
    texels: usize,
    observations: usize,
    diffuse: Option<usize>,
    specular: Option<usize>,
    ambient_occlusion: Option<usize>,
    translucency: Option<usize>,
    light: Option<usize>,
    len: usize,
}

impl Layout {
    fn new(texels: usize, observations: usize, sel: MapSelection, fit_light: bool) -> Self {
        let mut len = 0;
        let mut take = |on: bool, size: usize| {
            on.then(|| {
                let off = len;
                len += size;
                off
            })
        };
        let diffuse = take(sel.diffuse, 3 * texels);
        let specular = take(sel.specular, texels);
        let ambient_occlusion = take(sel.ambient_occlusion, texels);
        let translucency = take(sel.translucency, texels);
        let light = take(fit_light, observations * 3 * NUM_COEFFS);
        Layout { texels, observations, diffuse, specular, ambient_occlusion, translucency, light, len }
    }
}

/// Optimizer state: logits, light coefficients, Adam moments and history.
#[derive(Debug, Clone, PartialEq)]
pub struct FitState {
    pub params: Vec<f64>,
    pub adam: Adam,
    pub iteration: usize,
    pub loss_history: Vec<f64>,
    pub shading_history: Vec<f64>,
}

/// Objective value and gradient with respect to the flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objective: f64,
    /// Mean ℓ1 shading loss over observations, before weighting.
    pub shading: f64,
    pub gradient: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub maps: TextureMapSet,
    /// Fitted per-observation lights when light fitting is enabled.
    pub lights: Option<Vec<SHLight>>,
    pub loss_history: Vec<f64>,
    pub shading_history: Vec<f64>,
    pub warnings: Vec<String>,
}

impl FitResult {
    pub fn final_loss(&self) -> f64 {
        *self.loss_history.last().expect("history is never empty")
    }
    pub fn final_shading_loss(&self) -> f64 {
        *self.shading_history.last().expect("history is never empty")
    }
}

#[derive(Default)]
struct TexelOut {
    abs_sum: f64,
    diffuse: [f64; 3],
    specular: f64,
    ambient_occlusion: f64,
    translucency: f64,
}

/// Stepwise optimizer. [`fit`] drives it to completion.
pub struct Fitter {
    config: FitConfig,
    base: TextureMapSet,
    observations: Vec<Observation>,
    layout: Layout,
    /// Per observation, per texel; kept only when the light is optimized.
    bases: Vec<Vec<Option<TexelBasis>>>,
    /// Per observation, per texel SH sums for the current light.
    terms: Vec<Vec<TexelTerms>>,
    valid: usize,
    state: FitState,
}

impl Fitter {
    pub fn new(
        observations: Vec<Observation>,
        config: FitConfig,
        init: TextureMapSet,
    ) -> Result<Self, FitError> {
        config.validate()?;
        if observations.is_empty() {
            return Err(FitError::Contract("at least one observation is required".into()));
        }
        init.check_sizes()?;
        let n = init.len();
        for (o, obs) in observations.iter().enumerate() {
            let t = &obs.target;
            if t.width != init.width || t.height != init.height || t.rgb.len() != n {
                return Err(FitError::Contract(format!(
                    "observation {o} is {}x{}, maps are {}x{}",
                    t.width, t.height, init.width, init.height
                )));
            }
            if t.mask != init.mask {
                return Err(FitError::Contract(format!("observation {o} mask differs from the maps")));
            }
            if !obs.light.is_finite() {
                return Err(FitError::Contract(format!("observation {o} light is not finite")));
            }
            obs.view.check(n)?;
        }
        let layout = Layout::new(n, observations.len(), config.trainable, config.fit_light);
        let bases: Vec<Vec<Option<TexelBasis>>> = observations
            .iter()
            .map(|obs| {
                (0..n)
                    .into_par_iter()
                    .map(|i| {
                        if !init.mask[i] {
                            return Ok(None);
                        }
                        Ok(Some(TexelBasis::new_at(i, init.normals[i], obs.view.view_at(i)?)?))
                    })
                    .collect::<Result<Vec<_>, ShadeError>>()
            })
            .collect::<Result<_, _>>()?;

        let mut params = vec![0.0; layout.len];
        for i in 0..n {
            if let Some(off) = layout.diffuse {
                for c in 0..3 {
                    params[off + 3 * i + c] = logit(init.diffuse[i][c]);
                }
            }
            if let Some(off) = layout.specular {
                params[off + i] = logit(init.specular[i]);
            }
            if let Some(off) = layout.ambient_occlusion {
                params[off + i] = logit(init.ambient_occlusion[i]);
            }
            if let Some(off) = layout.translucency {
                params[off + i] = logit(init.translucency[i]);
            }
        }
        if let Some(off) = layout.light {
            for (o, obs) in observations.iter().enumerate() {
                for c in 0..3 {
                    let at = off + (o * 3 + c) * NUM_COEFFS;
                    params[at..at + NUM_COEFFS].copy_from_slice(&obs.light.coeffs[c]);
                }
            }
        }

        let adam = Adam::new(config.adam(), layout.len);
        let valid = init.valid_count();
        let mut fitter = Fitter {
            config,
            base: init,
            observations,
            layout,
            bases,
            terms: Vec::new(),
            valid,
            state: FitState {
                params,
                adam,
                iteration: 0,
                loss_history: Vec::new(),
                shading_history: Vec::new(),
            },
        };
        let lights = fitter.lights_from(&fitter.state.params);
        fitter.terms = fitter.compute_terms(&lights);
        if !fitter.config.fit_light {
            // Terms are all the fixed-light loop needs.
            fitter.bases.clear();
        }
        Ok(fitter)
    }

    pub fn state(&self) -> &FitState {
        &self.state
    }

    pub fn params(&self) -> &[f64] {
        &self.state.params
    }

    pub fn set_params(&mut self, params: Vec<f64>) {
        assert_eq!(params.len(), self.layout.len);
        self.state.params = params;
        if self.config.fit_light {
            let lights = self.lights_from(&self.state.params);
            self.terms = self.compute_terms(&lights);
        }
    }

    fn lights_from(&self, params: &[f64]) -> Vec<SHLight> {
        match self.layout.light {
            None => self.observations.iter().map(|o| o.light.clone()).collect(),
            Some(off) => (0..self.layout.observations)
                .map(|o| {
                    let mut l = SHLight::zero();
                    for c in 0..3 {
                        let at = off + (o * 3 + c) * NUM_COEFFS;
                        l.coeffs[c].copy_from_slice(&params[at..at + NUM_COEFFS]);
                    }
                    l
                })
                .collect(),
        }
    }

    fn compute_terms(&self, lights: &[SHLight]) -> Vec<Vec<TexelTerms>> {
        let cfg = &self.config.shading;
        if self.bases.is_empty() {
            return self.terms.clone();
        }
        self.bases
            .iter()
            .zip(lights)
            .map(|(bases, light)| {
                bases
                    .par_iter()
                    .map(|b| b.as_ref().map(|b| b.terms(light, cfg)).unwrap_or_default())
                    .collect()
            })
            .collect()
    }

    fn texel_values(&self, params: &[f64], i: usize) -> ([f64; 3], f64, f64, f64) {
        let l = &self.layout;
        let b = &self.base;
        let d = match l.diffuse {
            Some(off) => std::array::from_fn(|c| logistic(params[off + 3 * i + c])),
            None => b.diffuse[i],
        };
        let s = l.specular.map_or(b.specular[i], |off| logistic(params[off + i]));
        let a = l.ambient_occlusion.map_or(b.ambient_occlusion[i], |off| logistic(params[off + i]));
        let t = l.translucency.map_or(b.translucency[i], |off| logistic(params[off + i]));
        (d, s, a, t)
    }

    /// Current maps, with optimized values mapped back through the logistic.
    pub fn maps(&self) -> TextureMapSet {
        let mut out = self.base.clone();
        for i in (0..out.len()).filter(|i| out.mask[*i]) {
            let (d, s, a, t) = self.texel_values(&self.state.params, i);
            out.diffuse[i] = d;
            out.specular[i] = s;
            out.ambient_occlusion[i] = a;
            out.translucency[i] = t;
        }
        out
    }

    pub fn lights(&self) -> Vec<SHLight> {
        self.lights_from(&self.state.params)
    }

    /// Objective and gradient at the current parameters.
    pub fn evaluate(&self) -> Evaluation {
        let params = &self.state.params;
        let n_obs = self.observations.len();
        let lights = self.lights_from(params);
        let denom = (3 * self.valid.max(1) * n_obs) as f64;
        // ∂objective/∂m̂ = weight · sign(m̂ − target)
        let weight = self.config.lambda_shading / denom;
        let layout = self.layout;

        let outs: Vec<TexelOut> = (0..layout.texels)
            .into_par_iter()
            .map(|i| {
                let mut out = TexelOut::default();
                if !self.base.mask[i] {
                    return out;
                }
                let (d, s, a, t) = self.texel_values(params, i);
                let mut gd = [0.0; 3];
                let (mut gs, mut ga, mut gt) = (0.0, 0.0, 0.0);
                for (o, obs) in self.observations.iter().enumerate() {
                    let terms = &self.terms[o][i];
                    let m = terms.shade(d, s, a, t);
                    let target = obs.target.rgb[i];
                    let p = param_grad(terms, d, a, t);
                    for c in 0..3 {
                        let diff = m[c] - target[c];
                        out.abs_sum += diff.abs();
                        let u = weight * sign(diff);
                        gd[c] += u * p.diffuse[c];
                        gs += u * p.specular[c];
                        ga += u * p.ambient_occlusion[c];
                        gt += u * p.translucency[c];
                    }
                }
                // Chain rule through the logistic: dp/dlogit = p(1 − p).
                out.diffuse = std::array::from_fn(|c| gd[c] * d[c] * (1.0 - d[c]));
                out.specular = gs * s * (1.0 - s);
                out.ambient_occlusion = ga * a * (1.0 - a);
                out.translucency = gt * t * (1.0 - t);
                out
            })
            .collect();

        let abs: Vec<f64> = outs.iter().map(|o| o.abs_sum).collect();
        let shading = pairwise_sum_f64(&abs) / denom;
        let mut objective = self.config.lambda_shading * shading;
        objective += self.config.lambda_light * lights.iter().map(monochrome_residual).sum::<f64>();

        let mut gradient = vec![0.0; layout.len];
        for (i, o) in outs.iter().enumerate() {
            if let Some(off) = layout.diffuse {
                gradient[off + 3 * i..off + 3 * i + 3].copy_from_slice(&o.diffuse);
            }
            if let Some(off) = layout.specular {
                gradient[off + i] = o.specular;
            }
            if let Some(off) = layout.ambient_occlusion {
                gradient[off + i] = o.ambient_occlusion;
            }
            if let Some(off) = layout.translucency {
                gradient[off + i] = o.translucency;
            }
        }

        if let Some(off) = layout.light {
            for (o, obs) in self.observations.iter().enumerate() {
                let g = self.light_gradient(o, obs, params, weight);
                let mono = monochrome_residual_grad(&lights[o]);
                for c in 0..3 {
                    let at = off + (o * 3 + c) * NUM_COEFFS;
                    for k in 0..NUM_COEFFS {
                        gradient[at + k] = g[c * NUM_COEFFS + k] + self.config.lambda_light * mono.coeffs[c][k];
                    }
                }
            }
        }

        Evaluation { objective, shading, gradient }
    }

    fn light_gradient(&self, o: usize, obs: &Observation, params: &[f64], weight: f64) -> Vec<f64> {
        let n = self.layout.texels;
        let cfg = &self.config.shading;
        let chunks: Vec<CoeffBlock> = (0..n.div_ceil(REDUCE_CHUNK))
            .into_par_iter()
            .map(|ci| {
                let mut acc = vec![0.0; 3 * NUM_COEFFS];
                for i in ci * REDUCE_CHUNK..((ci + 1) * REDUCE_CHUNK).min(n) {
                    let Some(basis) = &self.bases[o][i] else { continue };
                    let (d, s, a, t) = self.texel_values(params, i);
                    let m = self.terms[o][i].shade(d, s, a, t);
                    let w = light_weights(basis, cfg, d, s, a, t);
                    for c in 0..3 {
                        let u = weight * sign(m[c] - obs.target.rgb[i][c]);
                        if u == 0.0 {
                            continue;
                        }
                        for k in 0..NUM_COEFFS {
                            acc[c * NUM_COEFFS + k] += u * w[c][k];
                        }
                    }
                }
                CoeffBlock(acc)
            })
            .collect();
        let total = pairwise_sum(&chunks).0;
        if total.is_empty() {
            vec![0.0; 3 * NUM_COEFFS]
        } else {
            total
        }
    }

    fn diverged(&self, what: &str) -> FitError {
        let last = self.state.loss_history.iter().rev().find(|v| v.is_finite());
        let bad = self.state.params.iter().filter(|p| !p.is_finite()).count();
        FitError::Diverged {
            iteration: self.state.iteration,
            diagnostic: format!(
                "{what}; last finite objective {:?}, {bad} of {} parameters non-finite",
                last,
                self.state.params.len()
            ),
            state: Box::new(self.state.clone()),
        }
    }

    /// Records the current objective, then applies one Adam update.
    pub fn step(&mut self) -> Result<f64, FitError> {
        let eval = self.evaluate();
        self.state.loss_history.push(eval.objective);
        self.state.shading_history.push(eval.shading);
        if !eval.objective.is_finite() {
            return Err(self.diverged("objective is not finite"));
        }
        if eval.gradient.iter().any(|g| !g.is_finite()) {
            return Err(self.diverged("gradient is not finite"));
        }
        let mut params = std::mem::take(&mut self.state.params);
        self.state.adam.step(&mut params, &eval.gradient);
        self.state.iteration += 1;
        self.set_params(params);
        debug_assert!(self.maps().validate().is_ok());
        Ok(eval.objective)
    }

    /// Records the objective at the current parameters without updating them.
    pub fn record(&mut self) -> Result<f64, FitError> {
        let eval = self.evaluate();
        self.state.loss_history.push(eval.objective);
        self.state.shading_history.push(eval.shading);
        if !eval.objective.is_finite() {
            return Err(self.diverged("objective is not finite"));
        }
        Ok(eval.objective)
    }

    pub fn into_result(self) -> FitResult {
        let maps = self.maps();
        let lights = self.config.fit_light.then(|| self.lights());
        let mut warnings = Vec::new();
        let h = &self.state.loss_history;
        if let (Some(first), Some(last)) = (h.first(), h.last()) {
            if last > first {
                let msg = format!("final objective {last:e} exceeds initial objective {first:e}");
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }
        FitResult {
            maps,
            lights,
            loss_history: self.state.loss_history,
            shading_history: self.state.shading_history,
            warnings,
        }
    }
}

/// Runs `config.iterations` Adam steps. The loss history holds the objective
/// before every step plus the final one, so it has `iterations + 1` entries.
///
/// Without `init`, maps come from [`init_maps`] with normals along +z and
/// the first target's mask.
pub fn fit(
    observations: Vec<Observation>,
    config: FitConfig,
    init: Option<TextureMapSet>,
) -> Result<FitResult, FitError> {
    let first = observations
        .first()
        .ok_or_else(|| FitError::Contract("at least one observation is required".into()))?;
    let init = match init {
        Some(m) => m,
        None => {
            let (w, h) = (first.target.width, first.target.height);
            let mut m = init_maps(config.init, w, h, config.seed, &observations)?;
            m.mask = first.target.mask.clone();
            m
        }
    };
    if config.iterations == 0 {
        let unchanged = init.clone();
        let mut fitter = Fitter::new(observations, config, init)?;
        fitter.record()?;
        let mut res = fitter.into_result();
        res.maps = unchanged;
        return Ok(res);
    }
    let iterations = config.iterations;
    let mut fitter = Fitter::new(observations, config, init)?;
    for _ in 0..iterations {
        fitter.step()?;
    }
    fitter.record()?;
    Ok(fitter.into_result())
}
