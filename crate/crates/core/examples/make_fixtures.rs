//! Regenerates the files under `fixtures/`.
//!
//! ```text
//! cargo run --example make_fixtures -- crates/core/fixtures
//! ```

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skinshade::envlight::SHLight;
use skinshade::shader::{shade_texture, ShadingConfig, TextureMapSet, ViewModel};
use skinshade::texio::{encode_normals, write_coeffs, write_image, Image, ImageFormat};

fn pfm(img: Image, path: &Path) {
    write_image(&img, path, ImageFormat::Pfm).expect("write fixture");
}

fn write_maps(maps: &TextureMapSet, dir: &Path, prefix: &str) {
    let (w, h) = (maps.width, maps.height);
    pfm(Image::from_rgb(w, h, &maps.diffuse).unwrap(), &dir.join(format!("{prefix}diffuse.pfm")));
    pfm(Image::from_scalar(w, h, &maps.specular).unwrap(), &dir.join(format!("{prefix}specular.pfm")));
    pfm(Image::from_scalar(w, h, &maps.ambient_occlusion).unwrap(), &dir.join(format!("{prefix}ao.pfm")));
    pfm(Image::from_scalar(w, h, &maps.translucency).unwrap(), &dir.join(format!("{prefix}transl.pfm")));
    pfm(encode_normals(w, h, &maps.normals).unwrap(), &dir.join("normal.pfm"));
}

fn dc_1x1(root: &Path) {
    let dir = root.join("dc_1x1");
    fs::create_dir_all(&dir).unwrap();
    let maps = TextureMapSet {
        width: 1,
        height: 1,
        diffuse: vec![[1.0; 3]],
        specular: vec![0.0],
        ambient_occlusion: vec![1.0],
        translucency: vec![0.0],
        normals: vec![[0.0, 0.0, 1.0]],
        mask: vec![true],
    };
    write_maps(&maps, &dir, "");
    write_coeffs(&SHLight::dc([1.0; 3]), &dir.join("light.csv")).unwrap();
    write_coeffs(&SHLight::zero(), &dir.join("zero_light.csv")).unwrap();
}

fn fit_roundtrip(root: &Path) {
    let dir = root.join("fit_roundtrip");
    fs::create_dir_all(&dir).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (w, h) = (8, 8);
    let n = w * h;
    // Gentle bumps around +z.
    let normals = (0..n)
        .map(|i| {
            let (x, y) = ((i % w) as f64 / w as f64, (i / w) as f64 / h as f64);
            let v = [0.3 * (2.0 * PI * x).sin(), 0.3 * (2.0 * PI * y).cos(), 1.0];
            let l = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            v.map(|c| c / l)
        })
        .collect();
    let maps = TextureMapSet {
        width: w,
        height: h,
        diffuse: (0..n).map(|_| std::array::from_fn(|_| rng.random_range(0.4..0.6))).collect(),
        specular: (0..n).map(|_| rng.random_range(0.02..0.06)).collect(),
        ambient_occlusion: (0..n).map(|_| rng.random_range(0.8..0.95)).collect(),
        translucency: (0..n).map(|_| rng.random_range(0.25..0.35)).collect(),
        normals,
        mask: vec![true; n],
    };
    let mut light = SHLight::zero();
    for c in 0..3 {
        light.coeffs[c][0] = 2.0 + 0.1 * c as f64;
        for k in 1..9 {
            light.coeffs[c][k] = rng.random_range(-0.4..0.4);
        }
    }
    let target = shade_texture(&maps, &ViewModel::default(), &light, &ShadingConfig::default()).unwrap();
    pfm(Image::from_rgb(w, h, &target.rgb).unwrap(), &dir.join("target.pfm"));
    write_coeffs(&light, &dir.join("light.csv")).unwrap();
    write_maps(&maps, &dir, "truth_");
}

fn main() {
    let root = std::env::args().nth(1).unwrap_or_else(|| "crates/core/fixtures".into());
    let root = Path::new(&root);
    dc_1x1(root);
    fit_roundtrip(root);
    println!("fixtures written to {}", root.display());
}
