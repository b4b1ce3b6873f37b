//! Reconstruction from data on part of the boundary.
//!
//! Half-disk data reduces to full-disk conductivity data of the even
//! extension. Data on the arc `I = [π/2-α, π/2+α]` is pulled back to the half
//! disk through the conformal map `ψ = σ∘θ`, inverted there, and pushed forward
//! again with `ψ⁻¹`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num::complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{EitError, Result};
use crate::forward::{Block, BoundaryMode, DtnKind, DtnMatrixSet};
use crate::inverse::{reconstruct, ReconstructOptions, Reconstruction};
use crate::quadrature::{half_disk_nodes, QuadratureSpec};

const ENDPOINT_RADIUS: f64 = 1e-9;
const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcSpec {
    alpha: f64,
}

impl ArcSpec {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < FRAC_PI_2) {
            return Err(EitError::Domain(format!("alpha = {alpha} must lie in (0, pi/2)")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Angular interval `[π/2-α, π/2+α]`.
    pub fn interval(&self) -> (f64, f64) {
        (FRAC_PI_2 - self.alpha, FRAC_PI_2 + self.alpha)
    }
}

/// `ψ = σ∘θ` from the closed upper half disk onto the closed unit disk,
/// taking the upper half circle onto the arc `I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalMap {
    arc: ArcSpec,
    w: Complex64,
}

fn i() -> Complex64 {
    Complex64::i()
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl ConformalMap {
    pub fn new(arc: ArcSpec) -> Self {
        let a = arc.alpha;
        let w = Complex64::new(0.0, -a.cos() / (1.0 + a.sin()));
        Self { arc, w }
    }

    pub fn from_alpha(alpha: f64) -> Result<Self> {
        Ok(Self::new(ArcSpec::new(alpha)?))
    }

    pub fn arc(&self) -> ArcSpec {
        self.arc
    }

    pub fn mobius_parameter(&self) -> Complex64 {
        self.w
    }

    /// Images `ψ(1)` and `ψ(-1)` of the diameter endpoints.
    pub fn endpoint_images(&self) -> [Complex64; 2] {
        let (lo, hi) = self.arc.interval();
        [Complex64::from_polar(1.0, lo), Complex64::from_polar(1.0, hi)]
    }

    /// `θ(z) = ((1+z)² - i(1-z)²) / ((1+z)² + i(1-z)²)`.
    pub fn theta(z: Complex64) -> Complex64 {
        let a = (one() + z) * (one() + z);
        let b = (one() - z) * (one() - z);
        (a - i() * b) / (a + i() * b)
    }

    /// Inverse of `θ` on the closed unit disk.
    pub fn theta_inverse(y: Complex64) -> Complex64 {
        let t = i() * (one() + y) / (one() - y);
        let s = sqrt_cut_negative_imaginary(t);
        (s - one()) / (s + one())
    }

    fn sigma(&self, z: Complex64) -> Complex64 {
        (z - self.w) / (one() - self.w.conj() * z)
    }

    fn sigma_inverse(&self, y: Complex64) -> Complex64 {
        (y + self.w) / (one() + self.w.conj() * y)
    }

    fn check_half_disk(z: Complex64) -> Result<()> {
        if z.norm() > 1.0 + DOMAIN_SLACK || z.im < -DOMAIN_SLACK {
            return Err(EitError::Domain(format!("{z} is outside the closed upper half disk")));
        }
        Ok(())
    }

    pub fn psi(&self, z: Complex64) -> Result<Complex64> {
        Self::check_half_disk(z)?;
        Ok(self.sigma(Self::theta(z)))
    }

    /// `ψ'(z)`; vanishes or blows up only at `z = ±1`.
    pub fn psi_derivative(&self, z: Complex64) -> Result<Complex64> {
        Self::check_half_disk(z)?;
        let s = (one() + z) / (one() - z);
        let t = s * s;
        let dt = 4.0 * (one() + z) / ((one() - z) * (one() - z) * (one() - z));
        let dtheta = 2.0 * i() / ((t + i()) * (t + i())) * dt;
        let th = (t - i()) / (t + i());
        let den = one() - self.w.conj() * th;
        let dsigma = (1.0 - self.w.norm_sqr()) / (den * den);
        Ok(dsigma * dtheta)
    }

    pub fn is_endpoint_image(&self, z: Complex64) -> bool {
        self.endpoint_images().iter().any(|e| (z - e).norm() < ENDPOINT_RADIUS)
    }

    pub fn psi_inverse(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() > 1.0 + DOMAIN_SLACK {
            return Err(EitError::Domain(format!("{z} is outside the closed unit disk")));
        }
        if self.is_endpoint_image(z) {
            return Err(EitError::SingularPoint(format!("{z}")));
        }
        Ok(Self::theta_inverse(self.sigma_inverse(z)))
    }
}

/// Square root with the branch cut on the negative imaginary axis:
/// arguments taken in `(-π/2, 3π/2]` and halved.
fn sqrt_cut_negative_imaginary(t: Complex64) -> Complex64 {
    let mut arg = t.arg();
    if arg <= -FRAC_PI_2 {
        arg += 2.0 * PI;
    }
    Complex64::from_polar(t.norm().sqrt(), arg / 2.0)
}

/// Pairings `data[n-1][k-1] = ⟨Λ' f_n, g_k⟩` for sine modes `n, k = 1..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfDiskData {
    #[serde(rename = "N")]
    pub n: usize,
    pub data: Vec<Vec<f64>>,
}

impl HalfDiskData {
    pub fn new(data: Vec<Vec<f64>>) -> Result<Self> {
        let n = data.len();
        if data.iter().any(|row| row.len() != n) {
            return Err(EitError::Shape("half-disk data must be square".into()));
        }
        if data.iter().flatten().any(|v| !v.is_finite()) {
            return Err(EitError::Parse("half-disk data has non-finite entries".into()));
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![vec![0.0; n]; n],
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: HalfDiskData = serde_json::from_str(text)?;
        let checked = Self::new(raw.data)?;
        if checked.n != raw.n {
            return Err(EitError::Shape(format!("N = {} but data is {0}x{0}", checked.n)));
        }
        Ok(checked)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Arc data file: pairings plus the arc half-width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcData {
    pub alpha: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub data: Vec<Vec<f64>>,
}

impl ArcData {
    pub fn from_json(text: &str) -> Result<(ConformalMap, HalfDiskData)> {
        let raw: ArcData = serde_json::from_str(text)?;
        let map = ConformalMap::from_alpha(raw.alpha)?;
        let data = HalfDiskData::new(raw.data)?;
        if data.n != raw.n {
            return Err(EitError::Shape(format!("N = {} but data is {0}x{0}", data.n)));
        }
        Ok((map, data))
    }

    pub fn to_json(map: &ConformalMap, data: &HalfDiskData) -> Result<String> {
        let j = ArcData {
            alpha: map.arc().alpha(),
            n: data.n,
            data: data.data.clone(),
        };
        Ok(serde_json::to_string_pretty(&j)?)
    }
}

fn sine_density(n: u32, k: u32, r: f64, phi: f64) -> f64 {
    let (_, ur, ut) = BoundaryMode::sin(n).harmonic(r, phi);
    let (_, vr, vt) = BoundaryMode::sin(k).harmonic(r, phi);
    ur * vr + ut * vt
}

/// `∫_{half disk} γ ∇(r^n sin nφ)·∇(r^k sin kφ)`, with `γ` given in polar coordinates.
pub fn half_disk_forward_oracle(
    field: impl Fn(f64, f64) -> f64,
    n: u32,
    k: u32,
    quad: QuadratureSpec,
) -> Result<f64> {
    if n == 0 || k == 0 {
        return Err(EitError::Range("sine modes start at frequency 1".into()));
    }
    Ok(half_disk_nodes(quad)
        .iter()
        .map(|&(r, phi, w)| w * field(r, phi) * sine_density(n, k, r, phi))
        .sum())
}

/// All pairings up to `N` from cached field values; entries run in parallel.
pub fn half_disk_data(
    field: impl Fn(f64, f64) -> f64 + Sync,
    n: usize,
    quad: QuadratureSpec,
) -> HalfDiskData {
    let nodes = half_disk_nodes(quad);
    let weighted: Vec<f64> = nodes.par_iter().map(|&(r, phi, w)| w * field(r, phi)).collect();
    let entries: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (a, b) = ((idx / n + 1) as u32, (idx % n + 1) as u32);
            nodes
                .iter()
                .zip(&weighted)
                .map(|(&(r, phi, _), &wv)| wv * sine_density(a, b, r, phi))
                .sum()
        })
        .collect();
    HalfDiskData {
        n,
        data: entries.chunks(n.max(1)).map(<[f64]>::to_vec).collect(),
    }
}

/// Cosine-only reconstruction on the half disk, valid for `φ ∈ [0, π]`.
pub fn half_disk_invert(data: &HalfDiskData, n: usize, options: ReconstructOptions) -> Result<Reconstruction> {
    if n == 0 || n > data.n {
        return Err(EitError::Range(format!("N = {n} must lie in 1..={}", data.n)));
    }
    let mut set = DtnMatrixSet::zeros(DtnKind::Conductivity, n);
    for a in 1..=n {
        for b in 1..=n {
            let v = 2.0 * data.data[a - 1][b - 1];
            set.set_entry(Block::Cc, a, b, v)?;
            set.set_entry(Block::Ss, a, b, v)?;
        }
    }
    let full = reconstruct(&set, n, options)?;
    Ok(Reconstruction::new(
        DtnKind::Conductivity,
        n,
        full.p_table().clone(),
        BTreeMap::new(),
    ))
}

/// Arc pairing of two sine modes, computed on the half disk as `∫ γ(ψ(x)) ∇u_n·∇u_k`.
pub fn arc_forward_oracle(
    field: impl Fn(Complex64) -> f64,
    n: u32,
    k: u32,
    map: &ConformalMap,
    quad: QuadratureSpec,
) -> Result<f64> {
    let pulled = |r: f64, phi: f64| match map.psi(Complex64::from_polar(r, phi)) {
        Ok(z) => field(z),
        Err(_) => 0.0,
    };
    half_disk_forward_oracle(pulled, n, k, quad)
}

/// All arc pairings up to `N`.
pub fn arc_data(
    field: impl Fn(Complex64) -> f64 + Sync,
    map: &ConformalMap,
    n: usize,
    quad: QuadratureSpec,
) -> HalfDiskData {
    half_disk_data(
        |r, phi| match map.psi(Complex64::from_polar(r, phi)) {
            Ok(z) => field(z),
            Err(_) => 0.0,
        },
        n,
        quad,
    )
}

/// Evaluator `z ↦ h(ψ⁻¹(z))` for the half-disk reconstruction `h`.
#[derive(Debug, Clone)]
pub struct ArcReconstruction {
    map: ConformalMap,
    half: Reconstruction,
}

impl ArcReconstruction {
    pub fn map(&self) -> &ConformalMap {
        &self.map
    }

    pub fn half_disk(&self) -> &Reconstruction {
        &self.half
    }

    /// Zero at endpoint images of the arc.
    pub fn eval(&self, z: Complex64) -> Result<f64> {
        if z.norm() > 1.0 + DOMAIN_SLACK {
            return Err(EitError::Domain(format!("{z} is outside the closed unit disk")));
        }
        if self.map.is_endpoint_image(z) {
            return Ok(0.0);
        }
        let x = self.map.psi_inverse(z)?;
        Ok(self.half.value(x.norm().min(1.0), x.arg().clamp(0.0, PI)))
    }

    pub fn eval_polar(&self, r: f64, phi: f64) -> Result<f64> {
        self.eval(Complex64::from_polar(r, phi))
    }
}

pub fn arc_invert(
    data: &HalfDiskData,
    map: &ConformalMap,
    n: usize,
    options: ReconstructOptions,
) -> Result<ArcReconstruction> {
    Ok(ArcReconstruction {
        map: *map,
        half: half_disk_invert(data, n, options)?,
    })
}
