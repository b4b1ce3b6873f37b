//! Coefficient fields on the unit disk as angular Fourier series with polynomial
//! radial profiles.
//!
//! Storage convention: `f(r, φ) = a_0(r) + Σ_{k>=1} a_k(r) cos(kφ) + b_k(r) sin(kφ)`,
//! so `a_0` is the true constant Fourier mode. The reconstruction side works with a
//! halved `k = 0` profile and converts back before handing out a field.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{EitError, Result};

/// Sparse polynomial `Σ value_p r^p`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u32, f64)>", into = "Vec<(u32, f64)>")]
pub struct RadialProfile {
    terms: BTreeMap<u32, f64>,
}

impl TryFrom<Vec<(u32, f64)>> for RadialProfile {
    type Error = EitError;

    fn try_from(pairs: Vec<(u32, f64)>) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (p, v) in pairs {
            if !v.is_finite() {
                return Err(EitError::Parse(format!("coefficient of r^{p} is not finite")));
            }
            if terms.insert(p, v).is_some() {
                return Err(EitError::Parse(format!("power {p} listed twice")));
            }
        }
        Ok(Self { terms })
    }
}

impl From<RadialProfile> for Vec<(u32, f64)> {
    fn from(p: RadialProfile) -> Self {
        p.terms.into_iter().collect()
    }
}

impl RadialProfile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(value: f64) -> Self {
        Self::monomial(0, value)
    }

    pub fn monomial(power: u32, value: f64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(power, value);
        Self { terms }
    }

    pub fn from_terms(pairs: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        Self::try_from(pairs.into_iter().collect::<Vec<_>>())
    }

    /// Adds `value r^power`, merging with an existing term.
    pub fn add_term(&mut self, power: u32, value: f64) {
        *self.terms.entry(power).or_insert(0.0) += value;
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.terms.iter().map(|(&p, &v)| (p, v))
    }

    pub fn coefficient(&self, power: u32) -> f64 {
        self.terms.get(&power).copied().unwrap_or(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.terms.iter().map(|(&p, &v)| v * r.powi(p as i32)).sum()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|(&p, &v)| (p, alpha * v)).collect(),
        }
    }

    fn axpy(&mut self, alpha: f64, other: &RadialProfile) {
        for (p, v) in other.terms() {
            self.add_term(p, alpha * v);
        }
    }
}

/// `∫_0^1 r^m profile(r) dr`.
pub fn moment(profile: &RadialProfile, m: u32) -> f64 {
    profile
        .terms()
        .map(|(p, v)| v / (m as f64 + p as f64 + 1.0))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    /// Perturbation of a conductivity around 1.
    Conductivity,
    /// Schrödinger potential around 0.
    Potential,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Conductivity => "conductivity",
            FieldKind::Potential => "potential",
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldJson", into = "FieldJson")]
pub struct FourierRadialField {
    kind: FieldKind,
    cos: BTreeMap<u32, RadialProfile>,
    sin: BTreeMap<u32, RadialProfile>,
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    kind: FieldKind,
    #[serde(default)]
    cos: BTreeMap<u32, RadialProfile>,
    #[serde(default)]
    sin: BTreeMap<u32, RadialProfile>,
}

impl TryFrom<FieldJson> for FourierRadialField {
    type Error = EitError;

    fn try_from(j: FieldJson) -> Result<Self> {
        if j.sin.contains_key(&0) {
            return Err(EitError::Parse("sin profile at k = 0 is not allowed".into()));
        }
        Ok(Self {
            kind: j.kind,
            cos: j.cos,
            sin: j.sin,
        })
    }
}

impl From<FourierRadialField> for FieldJson {
    fn from(f: FourierRadialField) -> Self {
        FieldJson {
            kind: f.kind,
            cos: f.cos,
            sin: f.sin,
        }
    }
}

impl FourierRadialField {
    pub fn new(kind: FieldKind) -> Self {
        Self {
            kind,
            cos: BTreeMap::new(),
            sin: BTreeMap::new(),
        }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: FieldKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_cos(mut self, k: u32, profile: RadialProfile) -> Self {
        self.cos.insert(k, profile);
        self
    }

    /// Panics if `k == 0`; use [`FourierRadialField::set_sin`] for a fallible path.
    pub fn with_sin(mut self, k: u32, profile: RadialProfile) -> Self {
        self.set_sin(k, profile).expect("sin profile needs k >= 1");
        self
    }

    pub fn set_cos(&mut self, k: u32, profile: RadialProfile) {
        self.cos.insert(k, profile);
    }

    pub fn set_sin(&mut self, k: u32, profile: RadialProfile) -> Result<()> {
        if k == 0 {
            return Err(EitError::Domain("sin profile at k = 0".into()));
        }
        self.sin.insert(k, profile);
        Ok(())
    }

    pub fn cos_profile(&self, k: u32) -> Option<&RadialProfile> {
        self.cos.get(&k)
    }

    pub fn sin_profile(&self, k: u32) -> Option<&RadialProfile> {
        self.sin.get(&k)
    }

    pub fn cos_profiles(&self) -> impl Iterator<Item = (u32, &RadialProfile)> {
        self.cos.iter().map(|(&k, p)| (k, p))
    }

    pub fn sin_profiles(&self) -> impl Iterator<Item = (u32, &RadialProfile)> {
        self.sin.iter().map(|(&k, p)| (k, p))
    }

    pub fn max_angular_order(&self) -> u32 {
        self.cos
            .keys()
            .chain(self.sin.keys())
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// `∫_0^1 r^m a_k(r) dr`, zero for a missing profile.
    pub fn cos_moment(&self, k: u32, m: u32) -> f64 {
        self.cos.get(&k).map_or(0.0, |p| moment(p, m))
    }

    pub fn sin_moment(&self, k: u32, m: u32) -> f64 {
        self.sin.get(&k).map_or(0.0, |p| moment(p, m))
    }

    /// Field value without the domain check on `r`.
    pub fn value(&self, r: f64, phi: f64) -> f64 {
        let mut v = 0.0;
        for (&k, p) in &self.cos {
            let c = if k == 0 { 1.0 } else { (k as f64 * phi).cos() };
            v += p.eval(r) * c;
        }
        for (&k, p) in &self.sin {
            v += p.eval(r) * (k as f64 * phi).sin();
        }
        v
    }

    pub fn eval(&self, r: f64, phi: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&r) {
            return Err(EitError::Domain(format!("r = {r} outside [0, 1]")));
        }
        Ok(self.value(r, phi))
    }

    /// `alpha * self + beta * other`; the kind of `self` is kept.
    pub fn combine(&self, alpha: f64, other: &FourierRadialField, beta: f64) -> Self {
        let mut out = Self::new(self.kind);
        for (src, scale) in [(self, alpha), (other, beta)] {
            for (&k, p) in &src.cos {
                out.cos.entry(k).or_default().axpy(scale, p);
            }
            for (&k, p) in &src.sin {
                out.sin.entry(k).or_default().axpy(scale, p);
            }
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `‖f‖²_{L²(Ω)} = π [2∫a_0² r dr + Σ_{k>=1} (∫a_k² r dr + ∫b_k² r dr)]`.
pub fn l2_norm_squared(field: &FourierRadialField) -> f64 {
    let weighted_square = |p: &RadialProfile| -> f64 {
        let mut s = 0.0;
        for (pa, va) in p.terms() {
            for (pb, vb) in p.terms() {
                s += va * vb / (pa as f64 + pb as f64 + 2.0);
            }
        }
        s
    };
    let mut total = 0.0;
    for (k, p) in field.cos_profiles() {
        total += if k == 0 { 2.0 } else { 1.0 } * weighted_square(p);
    }
    for (_, p) in field.sin_profiles() {
        total += weighted_square(p);
    }
    PI * total
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

/// Polar tensor grid: `r_i = (i+1)/nr`, `φ_j = 2πj/nphi`, r-outer order.
pub fn polar_grid(nr: usize, nphi: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(nr * nphi);
    for i in 0..nr {
        let r = (i + 1) as f64 / nr as f64;
        for j in 0..nphi {
            out.push((r, 2.0 * PI * j as f64 / nphi as f64));
        }
    }
    out
}

pub fn sample_grid(field: &FourierRadialField, nr: usize, nphi: usize) -> Vec<GridPoint> {
    sample_with(nr, nphi, |r, phi| field.value(r, phi))
}

pub fn sample_with(nr: usize, nphi: usize, f: impl Fn(f64, f64) -> f64) -> Vec<GridPoint> {
    polar_grid(nr, nphi)
        .into_iter()
        .map(|(r, phi)| GridPoint {
            x: r * phi.cos(),
            y: r * phi.sin(),
            value: f(r, phi),
        })
        .collect()
}

/// CSV with header `x,y,value`, 17 significant digits per number.
pub fn write_grid_csv<W: Write>(mut out: W, points: &[GridPoint]) -> std::io::Result<()> {
    writeln!(out, "x,y,value")?;
    for p in points {
        writeln!(out, "{:.16e},{:.16e},{:.16e}", p.x, p.y, p.value)?;
    }
    Ok(())
}
