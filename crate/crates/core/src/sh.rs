//! Real spherical harmonics and the per-band kernels used by the shading model.
//!
//! Convention (frozen, used by every file format in this crate):
//!
//! * z-up polar axis, `cos θ = z`, `φ = atan2(y, x)`;
//! * orthonormal on the unit sphere;
//! * Condon–Shortley phase folded into the associated Legendre functions;
//! * `Y_l^{m>0} = √2 K P_l^m(cos θ) cos(mφ)`, `Y_l^{m<0} = √2 K P_l^|m|(cos θ) sin(|m|φ)`;
//! * flat index `k = l(l + 1) + m`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use thiserror::Error;

/// Highest SH degree handled anywhere in the crate.
pub const MAX_DEGREE: usize = 8;
/// Number of coefficients up to and including [`MAX_DEGREE`].
pub const NUM_COEFFS: usize = (MAX_DEGREE + 1) * (MAX_DEGREE + 1);

const UNIT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShError {
    #[error("SH index out of range: l = {l}, m = {m} (need 0 <= l <= {MAX_DEGREE}, |m| <= l)")]
    BandOutOfRange { l: i64, m: i64 },
    #[error("SH degree {0} exceeds the supported maximum of {MAX_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("direction ({0}, {1}, {2}) is not unit length")]
    NotUnit(f64, f64, f64),
    #[error("translucency must be >= 0, got {0}")]
    NegativeTranslucency(f64),
    #[error("roughness must be > 0, got {0}")]
    NonPositiveRoughness(f64),
}

/// A unit vector on the sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction([f64; 3]);

impl Direction {
    pub const UP: Direction = Direction([0.0, 0.0, 1.0]);

    /// Accepts a vector that is already unit length within `1e-6`.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, ShError> {
        let len2 = x * x + y * y + z * z;
        if !len2.is_finite() || (len2.sqrt() - 1.0).abs() > UNIT_TOLERANCE {
            return Err(ShError::NotUnit(x, y, z));
        }
        Ok(Direction([x, y, z]))
    }

    /// Normalizes `v`; `None` for zero-length or non-finite input.
    pub fn normalized(v: [f64; 3]) -> Option<Self> {
        let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !len.is_finite() || len == 0.0 {
            return None;
        }
        Some(Direction([v[0] / len, v[1] / len, v[2] / len]))
    }

    /// Direction for polar angle `theta` (from +z) and azimuth `phi` (from +x).
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Direction([st * cp, st * sp, ct])
    }

    pub(crate) fn from_unit_unchecked(v: [f64; 3]) -> Self {
        Direction(v)
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }
    pub fn y(&self) -> f64 {
        self.0[1]
    }
    pub fn z(&self) -> f64 {
        self.0[2]
    }
    pub fn as_array(&self) -> [f64; 3] {
        self.0
    }
}

impl std::ops::Neg for Direction {
    type Output = Direction;
    fn neg(self) -> Direction {
        Direction([-self.0[0], -self.0[1], -self.0[2]])
    }
}

/// Degree/order pair `(l, m)` with `|m| <= l <= MAX_DEGREE`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BandIndex {
    l: usize,
    m: i64,
}

impl BandIndex {
    pub fn new(l: i64, m: i64) -> Result<Self, ShError> {
        if l < 0 || l as usize > MAX_DEGREE || m.abs() > l {
            return Err(ShError::BandOutOfRange { l, m });
        }
        Ok(BandIndex { l: l as usize, m })
    }

    pub fn from_flat(k: usize) -> Result<Self, ShError> {
        if k >= NUM_COEFFS {
            return Err(ShError::BandOutOfRange { l: degree_of(k) as i64, m: 0 });
        }
        let l = degree_of(k);
        Ok(BandIndex { l, m: k as i64 - (l * (l + 1)) as i64 })
    }

    pub fn l(&self) -> usize {
        self.l
    }
    pub fn m(&self) -> i64 {
        self.m
    }
    pub fn flat(&self) -> usize {
        flat_index(self.l, self.m)
    }
}

/// Degree `l` of flat index `k`.
pub fn degree_of(k: usize) -> usize {
    (k as f64).sqrt() as usize
}

/// Flat index `l(l+1)+m`.
pub fn flat_index(l: usize, m: i64) -> usize {
    ((l * (l + 1)) as i64 + m) as usize
}

pub fn num_coeffs(l_max: usize) -> usize {
    (l_max + 1) * (l_max + 1)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// `K_l^m` for `m >= 0`, including the `√2` for `m > 0`.
fn normalization(l: usize, m: usize) -> f64 {
    let k = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - m) / factorial(l + m)).sqrt();
    if m == 0 {
        k
    } else {
        std::f64::consts::SQRT_2 * k
    }
}

fn normalization_table() -> &'static [f64; NUM_COEFFS] {
    static TABLE: OnceLock<[f64; NUM_COEFFS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; NUM_COEFFS];
        for l in 0..=MAX_DEGREE {
            for m in 0..=l {
                t[flat_index(l, m as i64)] = normalization(l, m);
            }
        }
        t
    })
}

/// Associated Legendre `P_l^m(x)` with Condon–Shortley phase, `m >= 0`.
fn assoc_legendre(l: usize, m: usize, x: f64) -> f64 {
    let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut pmm = 1.0;
    let mut fact = 1.0;
    for _ in 0..m {
        pmm *= -fact * somx2;
        fact += 2.0;
    }
    if l == m {
        return pmm;
    }
    let mut pmmp1 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pmmp1;
    }
    let mut pll = 0.0;
    for ll in (m + 2)..=l {
        pll = ((2 * ll - 1) as f64 * x * pmmp1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pll
}

/// Evaluates a single real SH basis function through spherical angles.
pub fn sh_eval(l: i64, m: i64, dir: Direction) -> Result<f64, ShError> {
    let band = BandIndex::new(l, m)?;
    let (l, m) = (band.l, band.m);
    let z = dir.z().clamp(-1.0, 1.0);
    let phi = dir.y().atan2(dir.x());
    let am = m.unsigned_abs() as usize;
    let p = assoc_legendre(l, am, z);
    let k = normalization(l, am);
    Ok(match m.signum() {
        0 => k * p,
        1 => k * p * (am as f64 * phi).cos(),
        _ => k * p * (am as f64 * phi).sin(),
    })
}

/// Fills `out[..(l_max+1)^2]` with every basis value up to `l_max`.
///
/// The azimuthal factor is accumulated as `(x + iy)^m`, so the Legendre
/// recurrence runs on the polynomial part only.
pub fn sh_eval_all_into(dir: Direction, l_max: usize, out: &mut [f64]) -> Result<(), ShError> {
    if l_max > MAX_DEGREE {
        return Err(ShError::DegreeTooLarge(l_max));
    }
    let n = num_coeffs(l_max);
    assert!(out.len() >= n, "output buffer too small");
    let [x, y, z] = dir.as_array();
    let norm = normalization_table();

    // Re/Im of (x + iy)^m, and the polynomial part of P_m^m.
    let mut re = 1.0;
    let mut im = 0.0;
    let mut pmm = 1.0;
    for m in 0..=l_max {
        if m > 0 {
            let (r, i) = (re * x - im * y, re * y + im * x);
            re = r;
            im = i;
            pmm *= -((2 * m - 1) as f64);
        }
        let mut p_prev = 0.0;
        let mut p_cur = pmm;
        for l in m..=l_max {
            if l == m + 1 {
                p_prev = p_cur;
                p_cur = z * (2 * m + 1) as f64 * pmm;
            } else if l > m + 1 {
                let next = ((2 * l - 1) as f64 * z * p_cur - (l + m - 1) as f64 * p_prev)
                    / (l - m) as f64;
                p_prev = p_cur;
                p_cur = next;
            }
            let base = l * (l + 1);
            if m == 0 {
                out[base] = norm[base] * p_cur;
            } else {
                let k = norm[base + m];
                out[base + m] = k * p_cur * re;
                out[base - m] = k * p_cur * im;
            }
        }
    }
    Ok(())
}

/// Every basis value up to `l_max`, indexed by `k = l(l+1)+m`.
pub fn sh_eval_all(dir: Direction, l_max: usize) -> Result<Vec<f64>, ShError> {
    if l_max > MAX_DEGREE {
        return Err(ShError::DegreeTooLarge(l_max));
    }
    let mut out = vec![0.0; num_coeffs(l_max)];
    sh_eval_all_into(dir, l_max, &mut out)?;
    Ok(out)
}

/// Per-band multipliers indexed by degree `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCoeffs {
    values: Vec<f64>,
}

impl KernelCoeffs {
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn get(&self, l: usize) -> f64 {
        self.values[l]
    }
    pub fn l_max(&self) -> usize {
        self.values.len() - 1
    }
}

fn check_degree(l_max: usize) -> Result<(), ShError> {
    if l_max > MAX_DEGREE {
        Err(ShError::DegreeTooLarge(l_max))
    } else {
        Ok(())
    }
}

/// Clamped-cosine convolution coefficient for a single band, with the
/// `√(4π/(2l+1))` factor folded in so that irradiance is a plain dot product.
pub fn lambert_coeff(l: usize) -> f64 {
    match l {
        0 => PI,
        1 => 2.0 * PI / 3.0,
        l if l % 2 == 1 => 0.0,
        l => {
            let half = l / 2;
            let sign = if half % 2 == 1 { 1.0 } else { -1.0 };
            let ratio = factorial(l) / (2f64.powi(l as i32) * factorial(half).powi(2));
            2.0 * PI * sign / ((l + 2) as f64 * (l as f64 - 1.0)) * ratio
        }
    }
}

pub fn lambert_coeffs(l_max: usize) -> Result<KernelCoeffs, ShError> {
    check_degree(l_max)?;
    Ok(KernelCoeffs { values: (0..=l_max).map(lambert_coeff).collect() })
}

/// `exp(-l²/t⁴)`; extended by continuity to 0 at `t = 0` for `l >= 1`.
///
/// Accepts any real `t` (the expression is even in `t`), which lets
/// finite-difference stencils straddle zero.
pub(crate) fn sss_kernel(l: usize, t: f64) -> f64 {
    if l == 0 {
        return 1.0;
    }
    let t4 = t * t * t * t;
    if t4 == 0.0 {
        return 0.0;
    }
    (-((l * l) as f64) / t4).exp()
}

/// `∂/∂t exp(-l²/t⁴) = exp(-l²/t⁴) · 4l²/t⁵`, zero wherever the kernel underflows.
pub(crate) fn sss_kernel_dt(l: usize, t: f64) -> f64 {
    let s = sss_kernel(l, t);
    if l == 0 || s == 0.0 {
        return 0.0;
    }
    s * 4.0 * (l * l) as f64 / t.powi(5)
}

pub fn sss_coeffs(t: f64, l_max: usize) -> Result<KernelCoeffs, ShError> {
    check_degree(l_max)?;
    if !(t >= 0.0) {
        return Err(ShError::NegativeTranslucency(t));
    }
    Ok(KernelCoeffs { values: (0..=l_max).map(|l| sss_kernel(l, t)).collect() })
}

/// Derivative of [`sss_coeffs`] with respect to `t`; 0 at `t = 0`.
pub fn sss_coeffs_dt(t: f64, l_max: usize) -> Result<KernelCoeffs, ShError> {
    check_degree(l_max)?;
    if !(t >= 0.0) {
        return Err(ShError::NegativeTranslucency(t));
    }
    Ok(KernelCoeffs { values: (0..=l_max).map(|l| sss_kernel_dt(l, t)).collect() })
}

/// Gaussian-in-`l` roughness lobe `exp(-(σl)²)`.
pub fn roughness_coeffs(sigma: f64, l_max: usize) -> Result<KernelCoeffs, ShError> {
    check_degree(l_max)?;
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(ShError::NonPositiveRoughness(sigma));
    }
    Ok(KernelCoeffs {
        values: (0..=l_max).map(|l| (-(sigma * l as f64).powi(2)).exp()).collect(),
    })
}
