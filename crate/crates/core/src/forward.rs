//! Linearized Dirichlet-to-Neumann matrices in the trigonometric basis.
//!
//! Entries are assembled from radial moments of the field. The same assembly
//! code runs over `f64` and over exact rationals; in both cases it produces the
//! entries divided by `π`, and the float path multiplies `π` back in at the end.
//! [`energy_oracle`] integrates the defining energy forms directly on a polar
//! grid and shares nothing with the moment formulas.

use std::f64::consts::PI;
use std::fmt;

use num::{FromPrimitive, Num};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{EitError, Result};
use crate::field::{FieldKind, FourierRadialField};
use crate::quadrature::{disk_nodes, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DtnKind {
    Conductivity,
    Schroedinger,
}

impl DtnKind {
    pub fn for_field(kind: FieldKind) -> Self {
        match kind {
            FieldKind::Conductivity => DtnKind::Conductivity,
            FieldKind::Potential => DtnKind::Schroedinger,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DtnKind::Conductivity => "conductivity",
            DtnKind::Schroedinger => "schroedinger",
        }
    }

    /// Math index of the first row and column of each block.
    pub fn origin(self, block: Block) -> (usize, usize) {
        match (self, block) {
            (DtnKind::Conductivity, _) => (1, 1),
            (DtnKind::Schroedinger, Block::Cc) => (0, 0),
            (DtnKind::Schroedinger, Block::Ss) => (1, 1),
            (DtnKind::Schroedinger, Block::Sc) => (1, 0),
            (DtnKind::Schroedinger, Block::Cs) => (0, 1),
        }
    }

    /// `(rows, cols)` of a block at truncation `n`.
    pub fn dims(self, block: Block, n: usize) -> (usize, usize) {
        let (r0, c0) = self.origin(block);
        (n + 1 - r0, n + 1 - c0)
    }
}

impl fmt::Display for DtnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Cc,
    Ss,
    Sc,
    Cs,
}

impl Block {
    pub const ALL: [Block; 4] = [Block::Cc, Block::Ss, Block::Sc, Block::Cs];

    pub fn name(self) -> &'static str {
        match self {
            Block::Cc => "cc",
            Block::Ss => "ss",
            Block::Sc => "sc",
            Block::Cs => "cs",
        }
    }

    /// Parities of the (first, second) boundary function of the pairing.
    pub fn parities(self) -> (Parity, Parity) {
        match self {
            Block::Cc => (Parity::Cos, Parity::Cos),
            Block::Ss => (Parity::Sin, Parity::Sin),
            Block::Sc => (Parity::Sin, Parity::Cos),
            Block::Cs => (Parity::Cos, Parity::Sin),
        }
    }
}

pub type Matrix<T> = Vec<Vec<T>>;

/// The four blocks; row `r` of a block is math index `r + origin`.
#[derive(Debug, Clone, PartialEq)]
pub struct Blocks<T> {
    pub cc: Matrix<T>,
    pub ss: Matrix<T>,
    pub sc: Matrix<T>,
    pub cs: Matrix<T>,
}

impl<T> Blocks<T> {
    pub fn get(&self, block: Block) -> &Matrix<T> {
        match block {
            Block::Cc => &self.cc,
            Block::Ss => &self.ss,
            Block::Sc => &self.sc,
            Block::Cs => &self.cs,
        }
    }

    pub fn get_mut(&mut self, block: Block) -> &mut Matrix<T> {
        match block {
            Block::Cc => &mut self.cc,
            Block::Ss => &mut self.ss,
            Block::Sc => &mut self.sc,
            Block::Cs => &mut self.cs,
        }
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Blocks<U> {
        let m = |mat: &Matrix<T>| -> Matrix<U> {
            mat.iter().map(|row| row.iter().map(&f).collect()).collect()
        };
        Blocks {
            cc: m(&self.cc),
            ss: m(&self.ss),
            sc: m(&self.sc),
            cs: m(&self.cs),
        }
    }
}

fn sign(v: i64) -> i64 {
    v.signum()
}

fn small<T: FromPrimitive>(v: i64) -> T {
    T::from_i64(v).expect("small integer is representable")
}

fn build<T>(kind: DtnKind, block: Block, n: usize, entry: impl Fn(usize, usize) -> T) -> Matrix<T> {
    let (r0, c0) = kind.origin(block);
    (r0..=n)
        .map(|i| (c0..=n).map(|j| entry(i, j)).collect())
        .collect()
}

/// Conductivity blocks divided by `π`:
/// `cc = ss = ij ζ_{ij} M(a_{|i-j|}, i+j-1)`, `cs_{ij} = sc_{ji} = ij sign(j-i) M(b_{|i-j|}, i+j-1)`.
pub fn conductivity_blocks<T>(
    n: usize,
    cos_moment: impl Fn(u32, u32) -> T,
    sin_moment: impl Fn(u32, u32) -> T,
) -> Blocks<T>
where
    T: Num + Clone + FromPrimitive,
{
    let kind = DtnKind::Conductivity;
    let cc_entry = |i: usize, j: usize| -> T {
        let zeta = if i == j { 2 } else { 1 };
        let k = i.abs_diff(j) as u32;
        small::<T>((i * j * zeta) as i64) * cos_moment(k, (i + j - 1) as u32)
    };
    let cs_entry = |i: usize, j: usize| -> T {
        let s = sign(j as i64 - i as i64);
        if s == 0 {
            return T::zero();
        }
        let k = i.abs_diff(j) as u32;
        small::<T>(s * (i * j) as i64) * sin_moment(k, (i + j - 1) as u32)
    };
    let cc = build(kind, Block::Cc, n, cc_entry);
    let cs = build(kind, Block::Cs, n, cs_entry);
    let sc = build(kind, Block::Sc, n, |i, j| cs_entry(j, i));
    Blocks {
        ss: cc.clone(),
        cc,
        sc,
        cs,
    }
}

/// Schrödinger blocks divided by `π`, exponent `i+j+1` throughout.
pub fn schroedinger_blocks<T>(
    n: usize,
    cos_moment: impl Fn(u32, u32) -> T,
    sin_moment: impl Fn(u32, u32) -> T,
) -> Blocks<T>
where
    T: Num + Clone + FromPrimitive,
{
    let kind = DtnKind::Schroedinger;
    let half = || T::one() / small::<T>(2);
    let b = |k: u32, m: u32| if k == 0 { T::zero() } else { sin_moment(k, m) };
    let cc = build(kind, Block::Cc, n, |i, j| {
        let m = (i + j + 1) as u32;
        let eta = match (i, j) {
            (0, 0) => 3,
            _ if i == j => 2,
            _ => 1,
        };
        half() * cos_moment((i + j) as u32, m)
            + small::<T>(eta) * half() * cos_moment(i.abs_diff(j) as u32, m)
    });
    let ss = build(kind, Block::Ss, n, |i, j| {
        let m = (i + j + 1) as u32;
        let xi = if i == j { 2 } else { 1 };
        small::<T>(xi) * half() * cos_moment(i.abs_diff(j) as u32, m)
            - half() * cos_moment((i + j) as u32, m)
    });
    let mixed = |i: usize, j: usize, orientation: i64| -> T {
        let m = (i + j + 1) as u32;
        let s = orientation * sign(i as i64 - j as i64);
        half() * b((i + j) as u32, m) + small::<T>(s) * half() * b(i.abs_diff(j) as u32, m)
    };
    let sc = build(kind, Block::Sc, n, |i, j| mixed(i, j, 1));
    let cs = build(kind, Block::Cs, n, |i, j| mixed(i, j, -1));
    Blocks { cc, ss, sc, cs }
}

/// A linearized DtN map in the trigonometric basis, truncated at frequency `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DtnMatrixSet {
    pub kind: DtnKind,
    pub n: usize,
    pub blocks: Blocks<f64>,
}

impl DtnMatrixSet {
    pub fn zeros(kind: DtnKind, n: usize) -> Self {
        let z = |block: Block| {
            let (r, c) = kind.dims(block, n);
            vec![vec![0.0; c]; r]
        };
        Self {
            kind,
            n,
            blocks: Blocks {
                cc: z(Block::Cc),
                ss: z(Block::Ss),
                sc: z(Block::Sc),
                cs: z(Block::Cs),
            },
        }
    }

    pub fn from_blocks(kind: DtnKind, n: usize, blocks: Blocks<f64>) -> Result<Self> {
        for block in Block::ALL {
            let (rows, cols) = kind.dims(block, n);
            let m = blocks.get(block);
            if m.len() != rows || m.iter().any(|row| row.len() != cols) {
                return Err(EitError::Shape(format!(
                    "{kind} block {} must be {rows}x{cols} for N = {n}",
                    block.name()
                )));
            }
            if m.iter().flatten().any(|v| !v.is_finite()) {
                return Err(EitError::Parse(format!("block {} has non-finite entries", block.name())));
            }
        }
        Ok(Self { kind, n, blocks })
    }

    pub fn block(&self, block: Block) -> &Matrix<f64> {
        self.blocks.get(block)
    }

    /// Entry at math indices `(i, j)`; `None` outside the block.
    pub fn entry(&self, block: Block, i: usize, j: usize) -> Option<f64> {
        let (r0, c0) = self.kind.origin(block);
        if i < r0 || j < c0 || i > self.n || j > self.n {
            return None;
        }
        Some(self.blocks.get(block)[i - r0][j - c0])
    }

    pub fn set_entry(&mut self, block: Block, i: usize, j: usize, value: f64) -> Result<()> {
        let (r0, c0) = self.kind.origin(block);
        if i < r0 || j < c0 || i > self.n || j > self.n {
            return Err(EitError::Range(format!("({i}, {j}) outside block {}", block.name())));
        }
        self.blocks.get_mut(block)[i - r0][j - c0] = value;
        Ok(())
    }

    /// Leading sub-blocks up to frequency `n`.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n > self.n {
            return Err(EitError::Range(format!("truncation {n} exceeds N = {}", self.n)));
        }
        let mut out = Self::zeros(self.kind, n);
        for block in Block::ALL {
            let (rows, cols) = self.kind.dims(block, n);
            let src = self.blocks.get(block);
            let dst = out.blocks.get_mut(block);
            for r in 0..rows {
                dst[r].copy_from_slice(&src[r][..cols]);
            }
        }
        Ok(out)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: DtnJson = serde_json::from_str(text)?;
        if let Some(origin) = &j.origin {
            for (block, given) in [
                (Block::Cc, origin.cc),
                (Block::Ss, origin.ss),
                (Block::Sc, origin.sc),
                (Block::Cs, origin.cs),
            ] {
                if given != j.kind.origin(block) {
                    return Err(EitError::Shape(format!(
                        "block {} origin {:?} does not match {} convention {:?}",
                        block.name(),
                        given,
                        j.kind,
                        j.kind.origin(block)
                    )));
                }
            }
        }
        Self::from_blocks(
            j.kind,
            j.n,
            Blocks {
                cc: j.cc,
                ss: j.ss,
                sc: j.sc,
                cs: j.cs,
            },
        )
    }

    pub fn to_json(&self) -> Result<String> {
        let origin = |b| self.kind.origin(b);
        let j = DtnJson {
            kind: self.kind,
            n: self.n,
            cc: self.blocks.cc.clone(),
            ss: self.blocks.ss.clone(),
            sc: self.blocks.sc.clone(),
            cs: self.blocks.cs.clone(),
            origin: Some(OriginJson {
                cc: origin(Block::Cc),
                ss: origin(Block::Ss),
                sc: origin(Block::Sc),
                cs: origin(Block::Cs),
            }),
        };
        Ok(serde_json::to_string_pretty(&j)?)
    }

    pub fn max_abs_difference(&self, other: &DtnMatrixSet) -> Result<f64> {
        if self.kind != other.kind || self.n != other.n {
            return Err(EitError::Shape("matrix sets differ in kind or N".into()));
        }
        let mut max = 0.0f64;
        for block in Block::ALL {
            for (ra, rb) in self.block(block).iter().zip(other.block(block)) {
                for (a, b) in ra.iter().zip(rb) {
                    max = max.max((a - b).abs());
                }
            }
        }
        Ok(max)
    }
}

#[derive(Serialize, Deserialize)]
struct OriginJson {
    cc: (usize, usize),
    ss: (usize, usize),
    sc: (usize, usize),
    cs: (usize, usize),
}

#[derive(Serialize, Deserialize)]
struct DtnJson {
    kind: DtnKind,
    #[serde(rename = "N")]
    n: usize,
    cc: Matrix<f64>,
    ss: Matrix<f64>,
    sc: Matrix<f64>,
    cs: Matrix<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    origin: Option<OriginJson>,
}

fn expect_kind(field: &FourierRadialField, expected: FieldKind) -> Result<()> {
    if field.kind() != expected {
        return Err(EitError::KindMismatch {
            expected: expected.name(),
            found: field.kind().name(),
        });
    }
    Ok(())
}

pub fn conductivity_dtn(field: &FourierRadialField, n: usize) -> Result<DtnMatrixSet> {
    expect_kind(field, FieldKind::Conductivity)?;
    if n == 0 {
        return Err(EitError::Range("conductivity data needs N >= 1".into()));
    }
    let blocks = conductivity_blocks(n, |k, m| field.cos_moment(k, m), |k, m| field.sin_moment(k, m));
    Ok(DtnMatrixSet {
        kind: DtnKind::Conductivity,
        n,
        blocks: blocks.map(|v| v * PI),
    })
}

pub fn schroedinger_dtn(field: &FourierRadialField, n: usize) -> Result<DtnMatrixSet> {
    expect_kind(field, FieldKind::Potential)?;
    let blocks = schroedinger_blocks(n, |k, m| field.cos_moment(k, m), |k, m| field.sin_moment(k, m));
    Ok(DtnMatrixSet {
        kind: DtnKind::Schroedinger,
        n,
        blocks: blocks.map(|v| v * PI),
    })
}

/// Dispatches on the field kind.
pub fn forward(field: &FourierRadialField, n: usize) -> Result<DtnMatrixSet> {
    match field.kind() {
        FieldKind::Conductivity => conductivity_dtn(field, n),
        FieldKind::Potential => schroedinger_dtn(field, n),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Cos,
    Sin,
}

/// Boundary function `cos(nφ)` (n >= 0) or `sin(nφ)` (n >= 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryMode {
    parity: Parity,
    frequency: u32,
}

impl BoundaryMode {
    pub fn new(parity: Parity, frequency: u32) -> Result<Self> {
        if parity == Parity::Sin && frequency == 0 {
            return Err(EitError::Domain("sin mode needs frequency >= 1".into()));
        }
        Ok(Self { parity, frequency })
    }

    pub fn cos(frequency: u32) -> Self {
        Self {
            parity: Parity::Cos,
            frequency,
        }
    }

    pub fn sin(frequency: u32) -> Self {
        Self::new(Parity::Sin, frequency).expect("sin mode needs frequency >= 1")
    }

    pub fn parity(self) -> Parity {
        self.parity
    }

    pub fn frequency(self) -> u32 {
        self.frequency
    }

    /// Harmonic extension `r^n trig(nφ)` with `(u, ∂_r u, r^{-1} ∂_φ u)`.
    pub fn harmonic(self, r: f64, phi: f64) -> (f64, f64, f64) {
        let n = self.frequency as i32;
        if n == 0 {
            return (1.0, 0.0, 0.0);
        }
        let nf = n as f64;
        let (s, c) = (nf * phi).sin_cos();
        let rn1 = r.powi(n - 1);
        let rn = rn1 * r;
        match self.parity {
            Parity::Cos => (rn * c, nf * rn1 * c, -nf * rn1 * s),
            Parity::Sin => (rn * s, nf * rn1 * s, nf * rn1 * c),
        }
    }
}

/// Energy pairing of two boundary modes for a field, by direct quadrature.
pub fn energy_oracle(
    field: &FourierRadialField,
    f: BoundaryMode,
    g: BoundaryMode,
    quad: QuadratureSpec,
) -> f64 {
    let kind = field.kind();
    disk_nodes(quad)
        .iter()
        .map(|&(r, phi, w)| w * field.value(r, phi) * pairing_density(kind, f, g, r, phi))
        .sum()
}

fn pairing_density(kind: FieldKind, f: BoundaryMode, g: BoundaryMode, r: f64, phi: f64) -> f64 {
    let (u, ur, ut) = f.harmonic(r, phi);
    let (v, vr, vt) = g.harmonic(r, phi);
    match kind {
        FieldKind::Conductivity => ur * vr + ut * vt,
        FieldKind::Potential => u * v,
    }
}

/// Full matrix set by quadrature. Field values and mode gradients are cached on
/// the grid; entries are computed in parallel, each with a fixed summation order.
pub fn oracle_dtn(field: &FourierRadialField, n: usize, quad: QuadratureSpec) -> Result<DtnMatrixSet> {
    let kind = DtnKind::for_field(field.kind());
    if kind == DtnKind::Conductivity && n == 0 {
        return Err(EitError::Range("conductivity data needs N >= 1".into()));
    }
    let nodes = disk_nodes(quad);
    let weighted: Vec<f64> = nodes.par_iter().map(|&(r, phi, w)| w * field.value(r, phi)).collect();
    let tabulate = |mode: BoundaryMode| -> Vec<(f64, f64, f64)> {
        nodes.iter().map(|&(r, phi, _)| mode.harmonic(r, phi)).collect()
    };
    let cos_modes: Vec<_> = (0..=n as u32).into_par_iter().map(|f| tabulate(BoundaryMode::cos(f))).collect();
    let sin_modes: Vec<_> = (0..=n as u32)
        .into_par_iter()
        .map(|f| if f == 0 { Vec::new() } else { tabulate(BoundaryMode::sin(f)) })
        .collect();
    let table = |p: Parity| match p {
        Parity::Cos => &cos_modes,
        Parity::Sin => &sin_modes,
    };
    let mut out = DtnMatrixSet::zeros(kind, n);
    for block in Block::ALL {
        let (pf, pg) = block.parities();
        let (r0, c0) = kind.origin(block);
        let (rows, cols) = kind.dims(block, n);
        let entries: Vec<f64> = (0..rows * cols)
            .into_par_iter()
            .map(|idx| {
                let u = &table(pf)[idx / cols + r0];
                let v = &table(pg)[idx % cols + c0];
                let mut acc = 0.0;
                for ((a, b), wv) in u.iter().zip(v).zip(&weighted) {
                    acc += wv
                        * match kind {
                            DtnKind::Conductivity => a.1 * b.1 + a.2 * b.2,
                            DtnKind::Schroedinger => a.0 * b.0,
                        };
                }
                acc
            })
            .collect();
        let dst = out.blocks.get_mut(block);
        for (idx, v) in entries.into_iter().enumerate() {
            dst[idx / cols][idx % cols] = v;
        }
    }
    Ok(out)
}
