//! `skinshade` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/format error, 3 numeric
//! failure (gradient check mismatch, divergence).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::envlight::{project_envmap, render_envmap, EnvironmentMap};
use crate::fitter::{self, FitConfig, FitError, InitMode, MapSelection, Observation};
use crate::gradients::{fd_check, FdConfig};
use crate::sh::{self, Direction, MAX_DEGREE};
use crate::shader::{shade_texture, ShadedTexture, ShadingConfig, TextureMapSet, ViewModel, DEFAULT_ROUGHNESS};
use crate::texio::{self, Image, ImageFormat, TexioError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "skinshade", version, about = "Spherical-harmonics skin shading, gradients and intrinsic map fitting")]
pub struct Cli {
    /// Seed for every random choice (sampling, random init).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; outputs do not depend on this.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Project an equirectangular environment map (PFM/PNG, width = 2·height) onto SH.
    Project(ProjectArgs),
    /// Render SH coefficients back to an equirectangular PFM.
    RenderEnv(RenderEnvArgs),
    /// Shade a set of texture maps under an SH light and write the result as PFM.
    Shade(ShadeArgs),
    /// Compare analytic gradients with central differences at random points.
    Gradcheck(GradcheckArgs),
    /// Recover texture maps from shaded targets with Adam.
    Fit(FitArgs),
    /// Evaluate one real SH basis function.
    Basis(BasisArgs),
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    /// Input environment map.
    #[arg(long)]
    pub env: PathBuf,
    /// Highest SH degree kept (0–8).
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u8).range(0..=MAX_DEGREE as i64))]
    pub order: u8,
    /// Output coefficient CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RenderEnvArgs {
    /// Input coefficient CSV.
    #[arg(long)]
    pub coeffs: PathBuf,
    /// Output width in pixels; must be even (height = width / 2).
    #[arg(long, default_value_t = 512)]
    pub width: usize,
    /// Output PFM.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ShadeArgs {
    /// Diffuse albedo, 3 channels in [0, 1].
    #[arg(long)]
    pub diffuse: PathBuf,
    /// Specular intensity, 1 channel in [0, 1].
    #[arg(long)]
    pub specular: PathBuf,
    /// Ambient occlusion, 1 channel in [0, 1].
    #[arg(long)]
    pub ao: PathBuf,
    /// Translucency, 1 channel in [0, 1].
    #[arg(long)]
    pub transl: PathBuf,
    /// Normal map packed as (n + 1) / 2.
    #[arg(long)]
    pub normal: PathBuf,
    /// Optional validity mask, 1 channel, 0 = invalid.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    /// SH light coefficient CSV.
    #[arg(long)]
    pub light: PathBuf,
    /// Constant view direction toward the viewer; normalized.
    #[arg(long, default_value = "0,0,1", value_parser = parse_vec3)]
    pub view: [f64; 3],
    /// Width of the Gaussian specular lobe.
    #[arg(long, default_value_t = DEFAULT_ROUGHNESS)]
    pub roughness: f64,
    /// Output PFM.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    /// Random parameter points to check.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Central-difference step.
    #[arg(long, default_value_t = 1e-4)]
    pub h: f64,
    /// Relative tolerance per parameter family.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    /// Width of the Gaussian specular lobe.
    #[arg(long, default_value_t = DEFAULT_ROUGHNESS)]
    pub roughness: f64,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Shaded target texture; repeat once per observation, paired with --light in order.
    #[arg(long, required = true)]
    pub target: Vec<PathBuf>,
    /// SH light CSV of the matching --target.
    #[arg(long, required = true)]
    pub light: Vec<PathBuf>,
    /// Known normal map; +z everywhere when omitted.
    #[arg(long)]
    pub normal: Option<PathBuf>,
    /// Optional validity mask, 1 channel, 0 = invalid.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    /// Constant view direction toward the viewer; normalized.
    #[arg(long, default_value = "0,0,1", value_parser = parse_vec3)]
    pub view: [f64; 3],
    /// Adam steps.
    #[arg(long, default_value_t = 5000)]
    pub iters: usize,
    /// Adam learning rate.
    #[arg(long, default_value_t = 1e-4)]
    pub lr: f64,
    /// Initial maps: gray, from-target or random.
    #[arg(long, default_value = "gray")]
    pub init: InitMode,
    /// Uniform initial specular intensity, overriding --init.
    #[arg(long)]
    pub init_specular: Option<f64>,
    /// Uniform initial translucency, overriding --init.
    #[arg(long)]
    pub init_translucency: Option<f64>,
    /// Maps held at their initial values (diffuse, specular, ao, translucency).
    #[arg(long, value_delimiter = ',')]
    pub freeze: Vec<MapName>,
    /// Also optimize each observation's light.
    #[arg(long)]
    pub fit_light: bool,
    /// Weight of the shading loss.
    #[arg(long, default_value_t = 0.5)]
    pub lambda_shading: f64,
    /// Weight of the monochrome light prior (only with --fit-light).
    #[arg(long, default_value_t = 0.0)]
    pub lambda_light: f64,
    /// Width of the Gaussian specular lobe.
    #[arg(long, default_value_t = DEFAULT_ROUGHNESS)]
    pub roughness: f64,
    /// Directory for the recovered maps and loss.csv.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MapName {
    Diffuse,
    Specular,
    Ao,
    Translucency,
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    /// Degree, 0–8.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=MAX_DEGREE as i64))]
    pub l: u8,
    /// Order, −l..=l.
    #[arg(long, allow_negative_numbers = true)]
    pub m: i64,
    /// Direction; normalized.
    #[arg(long, value_parser = parse_vec3, allow_negative_numbers = true)]
    pub dir: [f64; 3],
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got '{s}'"));
    }
    let mut v = [0.0f64; 3];
    for (o, p) in v.iter_mut().zip(&parts) {
        *o = p.parse().map_err(|_| format!("bad number '{p}'"))?;
    }
    if v.iter().any(|c| !c.is_finite()) {
        return Err(format!("non-finite component in '{s}'"));
    }
    Ok(v)
}

/// Error carrying the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }
    fn data(message: impl std::fmt::Display) -> Self {
        CliError { code: EXIT_DATA, message: message.to_string() }
    }
    fn numeric(message: impl Into<String>) -> Self {
        CliError { code: EXIT_NUMERIC, message: message.into() }
    }
}

impl From<TexioError> for CliError {
    fn from(e: TexioError) -> Self {
        CliError::data(e)
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::Config(m) => CliError::usage(m),
            FitError::Diverged { .. } => CliError::numeric(e.to_string()),
            other => CliError::data(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::data(e)
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();

    // Output is buffered so the command can run inside a dedicated pool.
    let mut buf = Vec::new();
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n as usize).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, &mut buf)),
            Err(e) => Err(CliError::usage(format!("cannot start {n} threads: {e}"))),
        },
        None => dispatch(&cli, &mut buf),
    };
    let _ = out.write_all(&buf);
    let _ = out.flush();
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Project(a) => project(a, out),
        Command::RenderEnv(a) => render_env(a, out),
        Command::Shade(a) => shade(a, out),
        Command::Gradcheck(a) => gradcheck(a, cli.seed, out),
        Command::Fit(a) => fit(a, cli.seed, out),
        Command::Basis(a) => basis(a, out),
    }
}

fn shading_config(roughness: f64) -> Result<ShadingConfig, CliError> {
    ShadingConfig::new(roughness).map_err(|e| CliError::usage(e.to_string()))
}

fn view_model(v: [f64; 3]) -> Result<ViewModel, CliError> {
    Direction::normalized(v)
        .map(ViewModel::Constant)
        .ok_or_else(|| CliError::usage("--view must be a nonzero vector"))
}

fn read_env(path: &Path) -> Result<EnvironmentMap, CliError> {
    let (img, _) = texio::read_image(path)?;
    let rgb = img.to_rgb().map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    EnvironmentMap::from_radiance_checked(img.width, img.height, rgb)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

fn write_pfm(image: &Image, path: &Path) -> Result<(), CliError> {
    Ok(texio::write_image(image, path, ImageFormat::Pfm)?)
}

fn project(a: &ProjectArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let env = read_env(&a.env)?;
    let light = project_envmap(&env, a.order as usize).map_err(CliError::data)?;
    texio::write_coeffs(&light, &a.out)?;
    writeln!(out, "projected {}x{} map to degree {}", env.width(), env.height(), a.order)?;
    for (l, e) in light.band_energy().iter().enumerate().take(a.order as usize + 1) {
        writeln!(out, "band {l}: energy {e:.6e}")?;
    }
    Ok(EXIT_OK)
}

fn render_env(a: &RenderEnvArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.width == 0 || !a.width.is_multiple_of(2) {
        return Err(CliError::usage("--width must be a positive even number"));
    }
    let light = texio::read_coeffs(&a.coeffs)?;
    let env = render_envmap(&light, a.width).map_err(CliError::data)?;
    write_pfm(&Image::from_rgb(env.width(), env.height(), env.radiance())?, &a.out)?;
    writeln!(out, "rendered {}x{} environment map", env.width(), env.height())?;
    Ok(EXIT_OK)
}

struct Loaded {
    name: &'static str,
    width: usize,
    height: usize,
}

fn load_image(path: &Path, name: &'static str) -> Result<(Loaded, Image), CliError> {
    let (img, _) = texio::read_image(path)?;
    Ok((Loaded { name, width: img.width, height: img.height }, img))
}

fn same_size(a: &Loaded, b: &Loaded) -> Result<(), CliError> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(CliError::data(format!(
            "resolution mismatch: {} is {}x{} but {} is {}x{}",
            a.name, a.width, a.height, b.name, b.width, b.height
        )));
    }
    Ok(())
}

fn channels(img: Image, path: &Path, want: usize) -> Result<Vec<f64>, CliError> {
    let wrap = |e: TexioError| CliError::data(format!("{}: {e}", path.display()));
    if want == 1 {
        img.to_scalar().map_err(wrap)
    } else {
        Ok(img.to_rgb().map_err(wrap)?.into_iter().flatten().collect())
    }
}

/// Normals and mask from an optional normal map and an optional mask file.
fn geometry(
    normal: Option<&Path>,
    mask: Option<&Path>,
    reference: &Loaded,
) -> Result<(Vec<[f64; 3]>, Vec<bool>), CliError> {
    let n = reference.width * reference.height;
    let (normals, mut valid) = match normal {
        Some(p) => {
            let (info, img) = load_image(p, "normal")?;
            same_size(reference, &info)?;
            texio::decode_normals(&img).map_err(|e| CliError::data(format!("{}: {e}", p.display())))?
        }
        None => (vec![[0.0, 0.0, 1.0]; n], vec![true; n]),
    };
    if let Some(p) = mask {
        let (w, h, m) = texio::read_mask(p)?;
        same_size(reference, &Loaded { name: "mask", width: w, height: h })?;
        for (v, m) in valid.iter_mut().zip(m) {
            *v &= m;
        }
    }
    Ok((normals, valid))
}

fn mean_radiance(tex: &ShadedTexture) -> [f64; 3] {
    let valid: Vec<[f64; 3]> = tex.rgb.iter().zip(&tex.mask).filter(|(_, m)| **m).map(|(p, _)| *p).collect();
    if valid.is_empty() {
        return [0.0; 3];
    }
    std::array::from_fn(|c| {
        let v: Vec<f64> = valid.iter().map(|p| p[c]).collect();
        crate::reduce::pairwise_sum_f64(&v) / valid.len() as f64
    })
}

fn shade(a: &ShadeArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = shading_config(a.roughness)?;
    let view = view_model(a.view)?;
    let (di, dimg) = load_image(&a.diffuse, "diffuse")?;
    let (si, simg) = load_image(&a.specular, "specular")?;
    let (ai, aimg) = load_image(&a.ao, "ao")?;
    let (ti, timg) = load_image(&a.transl, "transl")?;
    for other in [&si, &ai, &ti] {
        same_size(&di, other)?;
    }
    let (normals, mask) = geometry(Some(&a.normal), a.mask.as_deref(), &di)?;
    let diffuse = channels(dimg, &a.diffuse, 3)?;
    let maps = TextureMapSet {
        width: di.width,
        height: di.height,
        diffuse: diffuse.chunks_exact(3).map(|p| [p[0], p[1], p[2]]).collect(),
        specular: channels(simg, &a.specular, 1)?,
        ambient_occlusion: channels(aimg, &a.ao, 1)?,
        translucency: channels(timg, &a.transl, 1)?,
        normals,
        mask,
    };
    let light = texio::read_coeffs(&a.light)?;
    let shaded = shade_texture(&maps, &view, &light, &cfg).map_err(CliError::data)?;
    write_pfm(&Image::from_rgb(shaded.width, shaded.height, &shaded.rgb)?, &a.out)?;
    let m = mean_radiance(&shaded);
    writeln!(out, "mean radiance: {:.7} {:.7} {:.7}", m[0], m[1], m[2])?;
    Ok(EXIT_OK)
}

fn gradcheck(a: &GradcheckArgs, seed: u64, out: &mut dyn Write) -> Result<i32, CliError> {
    if !(a.h > 0.0) || !(a.tol > 0.0) {
        return Err(CliError::usage("--h and --tol must be positive"));
    }
    let cfg = shading_config(a.roughness)?;
    let report = fd_check(FdConfig { seed, samples: a.samples, h: a.h, tolerance: a.tol }, &cfg);
    writeln!(out, "{report}")?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_NUMERIC })
}

fn fit(a: &FitArgs, seed: u64, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.target.len() != a.light.len() {
        return Err(CliError::usage(format!(
            "{} --target but {} --light; they are paired in order",
            a.target.len(),
            a.light.len()
        )));
    }
    for (flag, v) in [("--init-specular", a.init_specular), ("--init-translucency", a.init_translucency)] {
        if let Some(v) = v {
            if !(0.0..=1.0).contains(&v) {
                return Err(CliError::usage(format!("{flag} must lie in [0, 1]")));
            }
        }
    }
    let cfg = shading_config(a.roughness)?;
    let view = view_model(a.view)?;

    let mut observations = Vec::with_capacity(a.target.len());
    let mut reference: Option<Loaded> = None;
    for (i, (tp, lp)) in a.target.iter().zip(&a.light).enumerate() {
        let (info, img) = load_image(tp, "target")?;
        if let Some(r) = &reference {
            same_size(r, &Loaded { name: "a later target", ..info })?;
        }
        let rgb = channels(img, tp, 3)?;
        let light = texio::read_coeffs(lp)?;
        observations.push(Observation {
            target: ShadedTexture {
                width: info.width,
                height: info.height,
                rgb: rgb.chunks_exact(3).map(|p| [p[0], p[1], p[2]]).collect(),
                mask: Vec::new(),
            },
            light,
            view: view.clone(),
        });
        log::info!("observation {i}: {} with {}", tp.display(), lp.display());
        reference.get_or_insert(info);
    }
    let reference = reference.expect("at least one target");
    let (normals, mask) = geometry(a.normal.as_deref(), a.mask.as_deref(), &reference)?;
    for obs in &mut observations {
        obs.target.mask = mask.clone();
    }

    let mut init = fitter::init_maps(a.init, reference.width, reference.height, seed, &observations)?;
    init.normals = normals;
    init.mask = mask;
    if let Some(s) = a.init_specular {
        init.specular.fill(s);
    }
    if let Some(t) = a.init_translucency {
        init.translucency.fill(t);
    }

    let config = FitConfig {
        learning_rate: a.lr,
        iterations: a.iters,
        lambda_shading: a.lambda_shading,
        lambda_light: a.lambda_light,
        fit_light: a.fit_light,
        seed,
        init: a.init,
        trainable: MapSelection {
            diffuse: !a.freeze.contains(&MapName::Diffuse),
            specular: !a.freeze.contains(&MapName::Specular),
            ambient_occlusion: !a.freeze.contains(&MapName::Ao),
            translucency: !a.freeze.contains(&MapName::Translucency),
        },
        shading: cfg,
        ..FitConfig::default()
    };
    let result = fitter::fit(observations, config, Some(init))?;

    fs::create_dir_all(&a.out_dir)?;
    let m = &result.maps;
    let (w, h) = (m.width, m.height);
    write_pfm(&Image::from_rgb(w, h, &m.diffuse)?, &a.out_dir.join("diffuse.pfm"))?;
    write_pfm(&Image::from_scalar(w, h, &m.specular)?, &a.out_dir.join("specular.pfm"))?;
    write_pfm(&Image::from_scalar(w, h, &m.ambient_occlusion)?, &a.out_dir.join("ao.pfm"))?;
    write_pfm(&Image::from_scalar(w, h, &m.translucency)?, &a.out_dir.join("translucency.pfm"))?;
    let mut csv = String::from("iteration,objective,shading\n");
    for (i, (o, s)) in result.loss_history.iter().zip(&result.shading_history).enumerate() {
        csv.push_str(&format!("{i},{o:e},{s:e}\n"));
    }
    fs::write(a.out_dir.join("loss.csv"), csv)?;
    if let Some(lights) = &result.lights {
        for (i, l) in lights.iter().enumerate() {
            texio::write_coeffs(l, &a.out_dir.join(format!("light_{i}.csv")))?;
        }
    }
    for w in &result.warnings {
        writeln!(out, "warning: {w}")?;
    }
    writeln!(out, "initial loss: {:.6}", result.loss_history[0])?;
    writeln!(out, "final loss: {:.6}", result.final_loss())?;
    writeln!(out, "final shading error: {:.6}", result.final_shading_loss())?;
    Ok(EXIT_OK)
}

fn basis(a: &BasisArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let l = a.l as usize;
    if a.m.unsigned_abs() as usize > l {
        return Err(CliError::usage(format!("--m must lie in -{l}..={l}")));
    }
    let dir = Direction::normalized(a.dir).ok_or_else(|| CliError::usage("--dir must be a nonzero vector"))?;
    let v = sh::sh_eval(l as i64, a.m, dir).map_err(|e| CliError::usage(e.to_string()))?;
    writeln!(out, "{v:.6}")?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let code = run(std::iter::once("skinshade").chain(args.iter().copied()), &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn basis_dc() {
        let (code, out) = run_capture(&["basis", "--l", "0", "--m", "0", "--dir", "0,0,1"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "0.282095");
    }

    #[test]
    fn basis_negative_order_and_direction() {
        let (code, out) = run_capture(&["basis", "--l", "1", "--m", "-1", "--dir", "0,-1,0"]);
        assert_eq!(code, 0);
        // Y_1^{-1} = -sqrt(3/4π)·y
        assert_eq!(out.trim(), "0.488603");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_capture(&["basis", "--l", "9", "--m", "0", "--dir", "0,0,1"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["basis", "--l", "1", "--m", "2", "--dir", "0,0,1"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["basis", "--l", "1", "--m", "0", "--dir", "0,0,0"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["project", "--env", "x.pfm", "--order", "9", "--out", "c.csv"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["nonsense"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&[]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["--help"]).0, EXIT_OK);
        assert_eq!(run_capture(&["fit", "--help"]).0, EXIT_OK);
    }

    #[test]
    fn missing_file_is_data_error() {
        let (code, _) = run_capture(&["project", "--env", "/nonexistent/env.pfm", "--out", "/tmp/x.csv"]);
        assert_eq!(code, EXIT_DATA);
    }

    #[test]
    fn gradcheck_exit_codes() {
        assert_eq!(run_capture(&["gradcheck", "--samples", "5"]).0, EXIT_OK);
        assert_eq!(run_capture(&["gradcheck", "--samples", "20", "--h", "0.1"]).0, EXIT_NUMERIC);
        assert_eq!(run_capture(&["gradcheck", "--h", "0"]).0, EXIT_USAGE);
    }

    #[test]
    fn vec3_parsing() {
        assert_eq!(parse_vec3("1, 2,3").unwrap(), [1.0, 2.0, 3.0]);
        assert!(parse_vec3("1,2").is_err());
        assert!(parse_vec3("1,2,x").is_err());
        assert!(parse_vec3("1,2,inf").is_err());
    }
}
