//! The forward map and the inversion in exact rational arithmetic.
//!
//! Float field coefficients convert to rationals without rounding, so a field
//! in the reconstructible span comes back with identical coefficients.

use std::collections::BTreeMap;

use num::{BigRational, Zero};

use crate::error::{EitError, Result};
use crate::field::{FieldKind, FourierRadialField};
use crate::forward::{conductivity_blocks, schroedinger_blocks, Block, Blocks, DtnKind, Parity};
use crate::inverse::{conductivity_moments_from, schroedinger_moments_from, solve_moment_problem_exact};
use crate::muntz::{build_weighted_family, from_f64, int};

pub type ExactProfile = BTreeMap<u32, BigRational>;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactField {
    pub kind: FieldKind,
    pub cos: BTreeMap<u32, ExactProfile>,
    pub sin: BTreeMap<u32, ExactProfile>,
}

fn exact_profile(terms: impl Iterator<Item = (u32, f64)>) -> Result<ExactProfile> {
    let mut out = ExactProfile::new();
    for (power, v) in terms {
        let v = from_f64(v)?;
        if !v.is_zero() {
            out.insert(power, v);
        }
    }
    Ok(out)
}

fn exact_moment(profile: Option<&ExactProfile>, m: u32) -> BigRational {
    profile.map_or_else(BigRational::zero, |p| {
        p.iter()
            .fold(BigRational::zero(), |acc, (&power, c)| acc + c / int(m as i64 + power as i64 + 1))
    })
}

impl ExactField {
    pub fn from_field(field: &FourierRadialField) -> Result<Self> {
        let mut cos = BTreeMap::new();
        let mut sin = BTreeMap::new();
        for (k, p) in field.cos_profiles() {
            let e = exact_profile(p.terms())?;
            if !e.is_empty() {
                cos.insert(k, e);
            }
        }
        for (k, p) in field.sin_profiles() {
            let e = exact_profile(p.terms())?;
            if !e.is_empty() {
                sin.insert(k, e);
            }
        }
        Ok(Self {
            kind: field.kind(),
            cos,
            sin,
        })
    }

    pub fn cos_moment(&self, k: u32, m: u32) -> BigRational {
        exact_moment(self.cos.get(&k), m)
    }

    pub fn sin_moment(&self, k: u32, m: u32) -> BigRational {
        exact_moment(self.sin.get(&k), m)
    }
}

/// Matrix blocks divided by `π`, exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDtnSet {
    pub kind: DtnKind,
    pub n: usize,
    pub over_pi: Blocks<BigRational>,
}

impl ExactDtnSet {
    pub fn entry(&self, block: Block, i: usize, j: usize) -> BigRational {
        let (r0, c0) = self.kind.origin(block);
        if i < r0 || j < c0 || i > self.n || j > self.n {
            return BigRational::zero();
        }
        self.over_pi.get(block)[i - r0][j - c0].clone()
    }
}

pub fn exact_forward(field: &ExactField, n: usize) -> Result<ExactDtnSet> {
    let kind = DtnKind::for_field(field.kind);
    let cos = |k, m| field.cos_moment(k, m);
    let sin = |k, m| field.sin_moment(k, m);
    let over_pi = match kind {
        DtnKind::Conductivity => {
            if n == 0 {
                return Err(EitError::Range("conductivity data needs N >= 1".into()));
            }
            conductivity_blocks(n, cos, sin)
        }
        DtnKind::Schroedinger => schroedinger_blocks(n, cos, sin),
    };
    Ok(ExactDtnSet { kind, n, over_pi })
}

/// Exact `p_{n,k}` (cos) and `q_{n,k}` (sin) over the reconstructible triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactReconstruction {
    pub kind: DtnKind,
    pub n: usize,
    pub p: BTreeMap<u32, Vec<BigRational>>,
    pub q: BTreeMap<u32, Vec<BigRational>>,
}

pub fn exact_reconstruct(set: &ExactDtnSet) -> ExactReconstruction {
    let n = set.n;
    let kmax = match set.kind {
        DtnKind::Conductivity => n - 1,
        DtnKind::Schroedinger => n,
    };
    let entry = |b, i, j| set.entry(b, i, j);
    let mut p = BTreeMap::new();
    let mut q = BTreeMap::new();
    for k in 0..=kmax {
        for parity in [Parity::Cos, Parity::Sin] {
            if parity == Parity::Sin && k == 0 {
                continue;
            }
            let d = match set.kind {
                DtnKind::Conductivity => conductivity_moments_from(n, k, parity, entry),
                DtnKind::Schroedinger => schroedinger_moments_from(n, k, parity, entry),
            };
            let sol = solve_moment_problem_exact(k as u32, &d);
            match parity {
                Parity::Cos => p.insert(k as u32, sol),
                Parity::Sin => q.insert(k as u32, sol),
            };
        }
    }
    ExactReconstruction {
        kind: set.kind,
        n,
        p,
        q,
    }
}

impl ExactReconstruction {
    /// Exact monomial form, with the `k = 0` profile halved.
    pub fn to_exact_field(&self) -> ExactField {
        let convert = |k: u32, coeffs: &[BigRational], halve: bool| -> ExactProfile {
            let mut out = ExactProfile::new();
            if coeffs.is_empty() {
                return out;
            }
            let fam = build_weighted_family(k, coeffs.len() - 1);
            for l in 0..coeffs.len() {
                let mut c = (l..coeffs.len())
                    .fold(BigRational::zero(), |acc, n| acc + &coeffs[n] * &fam.row(n)[l]);
                if halve {
                    c /= int(2);
                }
                if !c.is_zero() {
                    out.insert(2 * l as u32 + k, c);
                }
            }
            out
        };
        let kind = match self.kind {
            DtnKind::Conductivity => FieldKind::Conductivity,
            DtnKind::Schroedinger => FieldKind::Potential,
        };
        let collect = |table: &BTreeMap<u32, Vec<BigRational>>, cos: bool| {
            table
                .iter()
                .map(|(&k, c)| (k, convert(k, c, cos && k == 0)))
                .filter(|(_, prof)| !prof.is_empty())
                .collect()
        };
        ExactField {
            kind,
            cos: collect(&self.p, true),
            sin: collect(&self.q, false),
        }
    }
}
