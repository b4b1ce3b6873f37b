//! Validation of DtN data and reconstruction of the field from it.
//!
//! Each angular order `k` of the field is recovered from one moment problem
//! `d_l = ∫ a_k(r) r^{2l+k+1} dr`, solved through the explicit inverse of the
//! Müntz moment matrix. Under the stored convention the `k = 0` problem
//! recovers `2·a_0`; the evaluator and the monomial export halve it again.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num::{BigRational, FromPrimitive, Num, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{EitError, Result};
use crate::field::{FieldKind, FourierRadialField, RadialProfile};
use crate::forward::{Block, DtnKind, DtnMatrixSet, Parity};
use crate::muntz::{build_weighted_family, from_f64, rat, to_f64, weighted_inverse_entry, WeightedFamily};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub tolerance: f64,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn max_deviation(&self) -> f64 {
        self.checks.iter().map(|c| c.max_deviation).fold(0.0, f64::max)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tolerance {:.3e}", self.tolerance)?;
        for c in &self.checks {
            writeln!(
                f,
                "  {:<28} {}  max deviation {:.3e}",
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.max_deviation
            )?;
        }
        Ok(())
    }
}

struct Checker<'a> {
    set: &'a DtnMatrixSet,
    tol: f64,
    checks: Vec<Check>,
}

impl Checker<'_> {
    /// Entry with zero extension outside the block.
    fn at(&self, block: Block, i: usize, j: usize) -> f64 {
        self.set.entry(block, i, j).unwrap_or(0.0)
    }

    fn push(&mut self, name: &str, deviation: f64) {
        self.checks.push(Check {
            name: name.to_string(),
            passed: deviation <= self.tol,
            max_deviation: deviation,
        });
    }

    fn pairwise(&self, lo: usize, f: impl Fn(usize, usize) -> f64) -> f64 {
        let n = self.set.n;
        let mut max = 0.0f64;
        for i in lo..=n {
            for j in lo..=n {
                max = max.max(f(i, j).abs());
            }
        }
        max
    }

    /// Largest spread along the anti-diagonals `i + j = s` of `h` over `0..=N`.
    fn hankel(&self, skip_origin: bool, h: impl Fn(usize, usize) -> f64) -> f64 {
        let n = self.set.n;
        let mut max = 0.0f64;
        for s in 0..=2 * n {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for i in s.saturating_sub(n)..=s.min(n) {
                let j = s - i;
                if skip_origin && i == 0 && j == 0 {
                    continue;
                }
                let v = h(i, j);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if lo.is_finite() {
                max = max.max(hi - lo);
            }
        }
        max
    }
}

/// Structural checks of a matrix set; a check fails when its deviation exceeds `tol`.
pub fn validate(set: &DtnMatrixSet, tol: f64) -> Result<ValidationReport> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(EitError::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let mut c = Checker {
        set,
        tol,
        checks: Vec::new(),
    };
    let lo = match set.kind {
        DtnKind::Conductivity => 1,
        DtnKind::Schroedinger => 0,
    };
    let d = c.pairwise(lo, |i, j| c.at(Block::Cc, i, j) - c.at(Block::Cc, j, i));
    c.push("cc_symmetric", d);
    let d = c.pairwise(1, |i, j| c.at(Block::Ss, i, j) - c.at(Block::Ss, j, i));
    c.push("ss_symmetric", d);
    let d = c.pairwise(lo, |i, j| {
        if j == 0 {
            0.0
        } else {
            c.at(Block::Cs, i, j) - c.at(Block::Sc, j, i)
        }
    });
    c.push("cs_transpose_sc", d);
    match set.kind {
        DtnKind::Conductivity => {
            let d = c.pairwise(1, |i, j| {
                if i == j {
                    c.at(Block::Cs, i, i)
                } else {
                    c.at(Block::Cs, i, j) + c.at(Block::Cs, j, i)
                }
            });
            c.push("cs_antisymmetric", d);
            let d = c.pairwise(1, |i, j| c.at(Block::Cc, i, j) - c.at(Block::Ss, i, j));
            c.push("cc_equals_ss", d);
        }
        DtnKind::Schroedinger => {
            let diff = |i, j| c.at(Block::Sc, i, j) - c.at(Block::Cs, i, j);
            let d = c.pairwise(1, |i, j| diff(i, j) + diff(j, i));
            c.push("sc_minus_cs_antisymmetric", d);
            let d = c.hankel(true, |i, j| c.at(Block::Ss, i, j) - c.at(Block::Cc, i, j));
            c.push("ss_minus_cc_hankel", d);
            let d = c.hankel(false, |i, j| c.at(Block::Sc, i, j) + c.at(Block::Cs, i, j));
            c.push("sc_plus_cs_hankel", d);
        }
    }
    Ok(ValidationReport {
        tolerance: tol,
        checks: c.checks,
    })
}

/// Orthogonal projection onto the symmetric / transposed structure of the kind.
pub fn symmetrize(set: &DtnMatrixSet) -> DtnMatrixSet {
    let mut out = set.clone();
    let n = set.n;
    let at = |b, i, j| set.entry(b, i, j).unwrap_or(0.0);
    let lo = match set.kind {
        DtnKind::Conductivity => 1,
        DtnKind::Schroedinger => 0,
    };
    for i in lo..=n {
        for j in lo..=n {
            let (cc, ss, cs);
            match set.kind {
                DtnKind::Conductivity => {
                    let s = (at(Block::Cc, i, j) + at(Block::Cc, j, i) + at(Block::Ss, i, j) + at(Block::Ss, j, i)) / 4.0;
                    let a = (at(Block::Cs, i, j) + at(Block::Sc, j, i) - at(Block::Cs, j, i) - at(Block::Sc, i, j)) / 4.0;
                    cc = s;
                    ss = s;
                    cs = a;
                }
                DtnKind::Schroedinger => {
                    cc = (at(Block::Cc, i, j) + at(Block::Cc, j, i)) / 2.0;
                    ss = (at(Block::Ss, i, j) + at(Block::Ss, j, i)) / 2.0;
                    cs = (at(Block::Cs, i, j) + at(Block::Sc, j, i)) / 2.0;
                }
            }
            let _ = out.set_entry(Block::Cc, i, j, cc);
            let _ = out.set_entry(Block::Ss, i, j, ss);
            let _ = out.set_entry(Block::Cs, i, j, cs);
            let _ = out.set_entry(Block::Sc, j, i, cs);
        }
    }
    out
}

/// Moments `values[l] = d_{l + origin_shift}` of one angular mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentData {
    pub k: u32,
    pub parity: Parity,
    pub values: Vec<f64>,
    pub origin_shift: usize,
}

fn check_parity(k: u32, parity: Parity) -> Result<()> {
    if parity == Parity::Sin && k == 0 {
        return Err(EitError::Range("sin moments need k >= 1".into()));
    }
    Ok(())
}

fn expect_kind(set: DtnKind, expected: DtnKind) -> Result<()> {
    if set != expected {
        return Err(EitError::KindMismatch {
            expected: expected.name(),
            found: set.name(),
        });
    }
    Ok(())
}

/// Conductivity moments from entries already divided by `π`; `i = 1..=N-k`.
pub fn conductivity_moments_from<T>(
    n: usize,
    k: usize,
    parity: Parity,
    entry: impl Fn(Block, usize, usize) -> T,
) -> Vec<T>
where
    T: Num + Clone + FromPrimitive,
{
    let block = match parity {
        Parity::Cos => Block::Cc,
        Parity::Sin => Block::Cs,
    };
    (1..=n - k)
        .map(|i| entry(block, i, i + k) / T::from_usize(i * (i + k)).expect("small integer"))
        .collect()
}

/// Schrödinger moments from entries already divided by `π`; `i = 0..=N-k`.
pub fn schroedinger_moments_from<T>(
    n: usize,
    k: usize,
    parity: Parity,
    entry: impl Fn(Block, usize, usize) -> T,
) -> Vec<T>
where
    T: Num + Clone + FromPrimitive,
{
    (0..=n - k)
        .map(|i| match (parity, i, k) {
            (Parity::Cos, 0, 0) => entry(Block::Cc, 0, 0),
            (Parity::Cos, 0, _) => entry(Block::Cc, k, 0),
            (Parity::Cos, _, _) => entry(Block::Cc, i, i + k) + entry(Block::Ss, i, i + k),
            (Parity::Sin, 0, _) => {
                (entry(Block::Cs, 0, k) + entry(Block::Sc, k, 0)) / T::from_u8(2).expect("two")
            }
            (Parity::Sin, _, _) => entry(Block::Cs, i, i + k) - entry(Block::Sc, i, i + k),
        })
        .collect()
}

fn float_entry(set: &DtnMatrixSet) -> impl Fn(Block, usize, usize) -> f64 + '_ {
    move |b, i, j| set.entry(b, i, j).unwrap_or(0.0) / PI
}

pub fn extract_conductivity_moments(set: &DtnMatrixSet, k: u32, parity: Parity) -> Result<MomentData> {
    expect_kind(set.kind, DtnKind::Conductivity)?;
    check_parity(k, parity)?;
    if k as usize + 1 > set.n {
        return Err(EitError::Range(format!("k = {k} needs k <= N - 1 = {}", set.n as i64 - 1)));
    }
    Ok(MomentData {
        k,
        parity,
        values: conductivity_moments_from(set.n, k as usize, parity, float_entry(set)),
        origin_shift: 1,
    })
}

pub fn extract_schroedinger_moments(set: &DtnMatrixSet, k: u32, parity: Parity) -> Result<MomentData> {
    expect_kind(set.kind, DtnKind::Schroedinger)?;
    check_parity(k, parity)?;
    if k as usize > set.n {
        return Err(EitError::Range(format!("k = {k} exceeds N = {}", set.n)));
    }
    Ok(MomentData {
        k,
        parity,
        values: schroedinger_moments_from(set.n, k as usize, parity, float_entry(set)),
        origin_shift: 0,
    })
}

/// Coefficients `p_n` together with the row sums `Σ_l |R_{n,l}|`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSolution {
    pub p: Vec<f64>,
    pub condition: Vec<f64>,
}

/// `Σ_l |R_{n,l}|` for `n = 0..len`.
pub fn condition_estimates(k: u32, len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| {
            (0..=n)
                .map(|l| to_f64(&BigRational::from_integer(weighted_inverse_entry(k, n, l).abs())))
                .sum()
        })
        .collect()
}

/// Neumaier-compensated sum of the terms in descending order of magnitude.
fn compensated_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

pub fn solve_moment_problem(d: &MomentData) -> MomentSolution {
    let p = (0..d.values.len())
        .map(|n| {
            let terms = (0..=n)
                .map(|l| to_f64(&BigRational::from_integer(weighted_inverse_entry(d.k, n, l))) * d.values[l])
                .collect();
            compensated_sum(terms)
        })
        .collect();
    MomentSolution {
        p,
        condition: condition_estimates(d.k, d.values.len()),
    }
}

/// Exact `R·d` over rationals.
pub fn solve_moment_problem_exact(k: u32, d: &[BigRational]) -> Vec<BigRational> {
    (0..d.len())
        .map(|n| {
            (0..=n).fold(BigRational::zero(), |acc, l| {
                acc + BigRational::from_integer(weighted_inverse_entry(k, n, l)) * &d[l]
            })
        })
        .collect()
}

/// The float moments taken as exact rationals, solved exactly and rounded once.
pub fn solve_moment_problem_rational(d: &MomentData) -> Result<MomentSolution> {
    let exact = d.values.iter().map(|&v| from_f64(v)).collect::<Result<Vec<_>>>()?;
    Ok(MomentSolution {
        p: solve_moment_problem_exact(d.k, &exact).iter().map(to_f64).collect(),
        condition: condition_estimates(d.k, d.values.len()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructOptions {
    pub tol: f64,
    pub reg_cap: Option<usize>,
    pub rational: bool,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            reg_cap: None,
            rational: false,
        }
    }
}

/// A moment of `a_k` or `b_k` with exponent `k + 1` read off a Hankel anti-diagonal beyond `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtraMoment {
    pub k: u32,
    pub parity: Parity,
    pub exponent: u32,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    kind: DtnKind,
    n: usize,
    p: BTreeMap<u32, Vec<f64>>,
    q: BTreeMap<u32, Vec<f64>>,
    condition: Vec<Vec<f64>>,
    extra_moments: Vec<ExtraMoment>,
    families: BTreeMap<u32, WeightedFamily>,
}

#[derive(Serialize, Deserialize)]
struct ReconstructionJson {
    kind: DtnKind,
    #[serde(rename = "N")]
    n: usize,
    p: BTreeMap<u32, Vec<f64>>,
    q: BTreeMap<u32, Vec<f64>>,
    condition: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    extra_moments: Vec<ExtraMoment>,
}

fn families_for(p: &BTreeMap<u32, Vec<f64>>, q: &BTreeMap<u32, Vec<f64>>) -> BTreeMap<u32, WeightedFamily> {
    let mut len: BTreeMap<u32, usize> = BTreeMap::new();
    for (k, v) in p.iter().chain(q) {
        let e = len.entry(*k).or_default();
        *e = (*e).max(v.len());
    }
    len.into_iter()
        .filter(|(_, l)| *l > 0)
        .map(|(k, l)| (k, build_weighted_family(k, l - 1)))
        .collect()
}

impl Reconstruction {
    pub fn new(kind: DtnKind, n: usize, p: BTreeMap<u32, Vec<f64>>, q: BTreeMap<u32, Vec<f64>>) -> Self {
        let condition = (0..=p.keys().chain(q.keys()).max().copied().unwrap_or(0))
            .map(|k| {
                let len = p.get(&k).map_or(0, Vec::len).max(q.get(&k).map_or(0, Vec::len));
                condition_estimates(k, len)
            })
            .collect();
        let families = families_for(&p, &q);
        Self {
            kind,
            n,
            p,
            q,
            condition,
            extra_moments: Vec::new(),
            families,
        }
    }

    pub fn kind(&self) -> DtnKind {
        self.kind
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    /// `p_{n,k}`, or 0 outside the stored triangle.
    pub fn p(&self, n: usize, k: u32) -> f64 {
        self.p.get(&k).and_then(|v| v.get(n)).copied().unwrap_or(0.0)
    }

    pub fn q(&self, n: usize, k: u32) -> f64 {
        self.q.get(&k).and_then(|v| v.get(n)).copied().unwrap_or(0.0)
    }

    pub fn p_table(&self) -> &BTreeMap<u32, Vec<f64>> {
        &self.p
    }

    pub fn q_table(&self) -> &BTreeMap<u32, Vec<f64>> {
        &self.q
    }

    /// `condition()[k][n] = Σ_l |R_{n,l}|`.
    pub fn condition(&self) -> &[Vec<f64>] {
        &self.condition
    }

    pub fn extra_moments(&self) -> &[ExtraMoment] {
        &self.extra_moments
    }

    fn radial(&self, k: u32, coeffs: &[f64], r: f64) -> f64 {
        let fam = &self.families[&k];
        coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * fam.eval_unchecked(n, r))
            .sum()
    }

    /// Field value at polar coordinates; `r` must lie in `[0, 1]`.
    pub fn eval(&self, r: f64, phi: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&r) {
            return Err(EitError::Domain(format!("r = {r} outside [0, 1]")));
        }
        Ok(self.value(r, phi))
    }

    pub(crate) fn value(&self, r: f64, phi: f64) -> f64 {
        let mut total = 0.0;
        for (&k, coeffs) in &self.p {
            let scale = if k == 0 { 0.5 } else { (k as f64 * phi).cos() };
            total += scale * self.radial(k, coeffs, r);
        }
        for (&k, coeffs) in &self.q {
            total += (k as f64 * phi).sin() * self.radial(k, coeffs, r);
        }
        total
    }

    /// Monomial form; each coefficient is summed exactly and rounded once.
    pub fn to_field(&self) -> Result<FourierRadialField> {
        let kind = match self.kind {
            DtnKind::Conductivity => FieldKind::Conductivity,
            DtnKind::Schroedinger => FieldKind::Potential,
        };
        let mut field = FourierRadialField::new(kind);
        for (&k, coeffs) in &self.p {
            let profile = self.monomial_profile(k, coeffs, k == 0)?;
            if !profile.is_empty() {
                field.set_cos(k, profile);
            }
        }
        for (&k, coeffs) in &self.q {
            let profile = self.monomial_profile(k, coeffs, false)?;
            if !profile.is_empty() {
                field.set_sin(k, profile)?;
            }
        }
        Ok(field)
    }

    fn monomial_profile(&self, k: u32, coeffs: &[f64], halve: bool) -> Result<RadialProfile> {
        let exact = coeffs.iter().map(|&c| from_f64(c)).collect::<Result<Vec<_>>>()?;
        let mut profile = RadialProfile::new();
        if exact.is_empty() {
            return Ok(profile);
        }
        let fam = &self.families[&k];
        for l in 0..exact.len() {
            let mut c = (l..exact.len()).fold(BigRational::zero(), |acc, n| acc + &exact[n] * &fam.row(n)[l]);
            if halve {
                c /= rat(2, 1);
            }
            if !c.is_zero() {
                profile.add_term(2 * l as u32 + k, to_f64(&c));
            }
        }
        Ok(profile)
    }

    pub fn to_json(&self) -> Result<String> {
        let j = ReconstructionJson {
            kind: self.kind,
            n: self.n,
            p: self.p.clone(),
            q: self.q.clone(),
            condition: self.condition.clone(),
            extra_moments: self.extra_moments.clone(),
        };
        Ok(serde_json::to_string_pretty(&j)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: ReconstructionJson = serde_json::from_str(text)?;
        if j.q.contains_key(&0) {
            return Err(EitError::Parse("q has no k = 0 entry".into()));
        }
        if j.p.values().chain(j.q.values()).flatten().any(|v| !v.is_finite()) {
            return Err(EitError::Parse("non-finite reconstruction coefficient".into()));
        }
        let mut rec = Self::new(j.kind, j.n, j.p, j.q);
        rec.extra_moments = j.extra_moments;
        Ok(rec)
    }
}

/// Normalized `L²` norm `‖γ‖² / π` of the reconstructed field:
/// `¼ Σ p_{n,0}²/(2n+1) + ½ Σ_{k≥1} (p_{n,k}² + q_{n,k}²)/(2n+k+1)`.
pub fn admissibility(rec: &Reconstruction) -> f64 {
    let mut total = 0.0;
    for (table, is_cos) in [(&rec.p, true), (&rec.q, false)] {
        for (&k, coeffs) in table {
            let weight = if is_cos && k == 0 { 0.25 } else { 0.5 };
            for (n, c) in coeffs.iter().enumerate() {
                total += weight * c * c / (2 * n + k as usize + 1) as f64;
            }
        }
    }
    total
}

/// Runs validation, symmetrization, moment extraction and the moment solves.
pub fn reconstruct(set: &DtnMatrixSet, n: usize, options: ReconstructOptions) -> Result<Reconstruction> {
    if n > set.n {
        return Err(EitError::Range(format!("N = {n} exceeds data truncation {}", set.n)));
    }
    if set.kind == DtnKind::Conductivity && n == 0 {
        return Err(EitError::Range("conductivity reconstruction needs N >= 1".into()));
    }
    let set = set.truncated(n)?;
    let report = validate(&set, options.tol)?;
    if !report.passed() {
        return Err(EitError::InconsistentData(Box::new(report)));
    }
    let set = symmetrize(&set);
    let kmax = match set.kind {
        DtnKind::Conductivity => n as u32 - 1,
        DtnKind::Schroedinger => n as u32,
    };
    let mut jobs = Vec::new();
    for k in 0..=kmax {
        jobs.push((k, Parity::Cos));
        if k > 0 {
            jobs.push((k, Parity::Sin));
        }
    }
    let solved = jobs
        .par_iter()
        .map(|&(k, parity)| -> Result<(u32, Parity, Vec<f64>)> {
            let d = match set.kind {
                DtnKind::Conductivity => extract_conductivity_moments(&set, k, parity)?,
                DtnKind::Schroedinger => extract_schroedinger_moments(&set, k, parity)?,
            };
            let mut sol = if options.rational {
                solve_moment_problem_rational(&d)?
            } else {
                solve_moment_problem(&d)
            };
            if let Some(cap) = options.reg_cap {
                sol.p.truncate(cap + 1);
            }
            Ok((k, parity, sol.p))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut p = BTreeMap::new();
    let mut q = BTreeMap::new();
    for (k, parity, coeffs) in solved {
        match parity {
            Parity::Cos => p.insert(k, coeffs),
            Parity::Sin => q.insert(k, coeffs),
        };
    }
    let mut rec = Reconstruction::new(set.kind, n, p, q);
    if set.kind == DtnKind::Schroedinger {
        rec.extra_moments = hankel_moments(&set);
    }
    Ok(rec)
}

/// Moments `∫ a_s r^{s+1} dr` and `∫ b_s r^{s+1} dr` for `N < s <= 2N`, averaged over each anti-diagonal.
fn hankel_moments(set: &DtnMatrixSet) -> Vec<ExtraMoment> {
    let n = set.n;
    let at = |b, i, j| set.entry(b, i, j).unwrap_or(0.0);
    let mut out = Vec::new();
    for s in n + 1..=2 * n {
        let pairs: Vec<(usize, usize)> = (s - n..=n).map(|i| (i, s - i)).collect();
        let len = pairs.len() as f64;
        let cos: f64 = pairs.iter().map(|&(i, j)| at(Block::Cc, i, j) - at(Block::Ss, i, j)).sum::<f64>() / len;
        let sin: f64 = pairs.iter().map(|&(i, j)| at(Block::Sc, i, j) + at(Block::Cs, i, j)).sum::<f64>() / len;
        for (parity, v) in [(Parity::Cos, cos), (Parity::Sin, sin)] {
            out.push(ExtraMoment {
                k: s as u32,
                parity,
                exponent: s as u32 + 1,
                value: v / PI,
            });
        }
    }
    out
}
