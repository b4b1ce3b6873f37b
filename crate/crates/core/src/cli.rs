//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num::complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::error::{EitError, Result};
use crate::exact::{exact_forward, exact_reconstruct, ExactField};
use crate::field::{polar_grid, sample_grid, write_grid_csv, FourierRadialField, GridPoint};
use crate::forward::{forward, oracle_dtn, DtnMatrixSet};
use crate::inverse::{admissibility, reconstruct, validate, ReconstructOptions, Reconstruction};
use crate::muntz::{build_weighted_family, lm_norm_squared, to_f64};
use crate::partial::{arc_invert, half_disk_invert, ArcData, ConformalMap, HalfDiskData};
use crate::quadrature::QuadratureSpec;

#[derive(Debug, Parser)]
#[command(name = "disk-eit", version, about = "Linearized impedance tomography on the unit disk")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Field JSON to DtN matrix-set JSON.
    Forward(Common),
    /// Matrix-set JSON to reconstruction JSON and monomial field JSON.
    Invert(Common),
    /// Forward then invert a field and report the coefficient error.
    Roundtrip(Common),
    /// Structural checks of a matrix set.
    Validate(Common),
    /// Sample a field or reconstruction JSON on a polar grid (CSV).
    Eval(Common),
    /// Half-disk data JSON to a reconstructed grid on the upper half disk.
    HalfInvert(Common),
    /// Arc data JSON to a reconstructed grid on the unit disk.
    ArcInvert(Common),
    /// Müntz–Legendre coefficient table of angular order `k`.
    Muntz(Common),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Monomial field output of `invert`; defaults to `<output>.field.json`.
    #[arg(long)]
    pub field_output: Option<PathBuf>,
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = QuadratureSpec::DISK.radial)]
    pub quad_r: usize,
    #[arg(long)]
    pub quad_phi: Option<usize>,
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub reg_cap: Option<usize>,
    #[arg(long)]
    pub rational: bool,
    #[arg(long)]
    pub map_debug: bool,
    /// Angular order for `muntz`.
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    #[arg(long, default_value_t = 20)]
    pub grid_r: usize,
    #[arg(long, default_value_t = 64)]
    pub grid_phi: usize,
}

/// Exit code for an error: 2 parse, 3 kind or shape, 4 inconsistent data, 1 otherwise.
pub fn exit_code(e: &EitError) -> i32 {
    match e {
        EitError::Parse(_) | EitError::Io(_) => 2,
        EitError::KindMismatch { .. } | EitError::Shape(_) | EitError::Range(_) => 3,
        EitError::InconsistentData(_) => 4,
        _ => 1,
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn read_input(c: &Common) -> Result<String> {
    let path = c
        .input
        .as_ref()
        .ok_or_else(|| EitError::Parse("--input is required".into()))?;
    Ok(fs::read_to_string(path)?)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_grid(path: Option<&Path>, points: &[GridPoint]) -> Result<()> {
    let mut buf = Vec::new();
    write_grid_csv(&mut buf, points)?;
    match path {
        Some(p) => fs::write(p, buf)?,
        None => io::stdout().write_all(&buf)?,
    }
    Ok(())
}

fn to_json_line<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn check_config(c: &Common) -> Result<()> {
    if let (Some(i), Some(o)) = (&c.input, &c.output) {
        if i == o {
            return Err(EitError::Domain("input and output paths must differ".into()));
        }
    }
    if c.nmax == Some(0) {
        return Err(EitError::Range("--nmax must be at least 1".into()));
    }
    if c.tol.is_nan() || c.tol <= 0.0 {
        return Err(EitError::Domain("--tol must be positive".into()));
    }
    Ok(())
}

fn require_nmax(c: &Common) -> Result<usize> {
    c.nmax.ok_or_else(|| EitError::Range("--nmax is required".into()))
}

fn options(c: &Common) -> ReconstructOptions {
    ReconstructOptions {
        tol: c.tol,
        reg_cap: c.reg_cap,
        rational: c.rational,
    }
}

fn quad(c: &Common, default: QuadratureSpec) -> QuadratureSpec {
    QuadratureSpec::new(c.quad_r, c.quad_phi.unwrap_or(default.angular))
}

fn execute(cmd: &Command) -> Result<i32> {
    match cmd {
        Command::Forward(c) => cmd_forward(c),
        Command::Invert(c) => cmd_invert(c),
        Command::Roundtrip(c) => cmd_roundtrip(c),
        Command::Validate(c) => cmd_validate(c),
        Command::Eval(c) => cmd_eval(c),
        Command::HalfInvert(c) => cmd_half_invert(c),
        Command::ArcInvert(c) => cmd_arc_invert(c),
        Command::Muntz(c) => cmd_muntz(c),
    }
}

fn cmd_forward(c: &Common) -> Result<i32> {
    check_config(c)?;
    let field = FourierRadialField::from_json(&read_input(c)?)?;
    let n = require_nmax(c)?;
    let set = forward(&field, n)?;
    write_output(c.output.as_deref(), &(set.to_json()? + "\n"))?;
    if c.oracle {
        let oracle = oracle_dtn(&field, n, quad(c, QuadratureSpec::DISK))?;
        let (rel, abs) = compare(&set, &oracle);
        eprintln!("oracle max relative deviation {rel:.3e}, max absolute deviation {abs:.3e}");
    }
    Ok(0)
}

/// Largest relative deviation (absolute below 1e-12 in magnitude) and largest absolute one.
fn compare(a: &DtnMatrixSet, b: &DtnMatrixSet) -> (f64, f64) {
    let mut rel = 0.0f64;
    let mut abs = 0.0f64;
    for block in crate::forward::Block::ALL {
        for (ra, rb) in a.block(block).iter().zip(b.block(block)) {
            for (x, y) in ra.iter().zip(rb) {
                let d = (x - y).abs();
                abs = abs.max(d);
                if x.abs() > 1e-12 {
                    rel = rel.max(d / x.abs());
                }
            }
        }
    }
    (rel, abs)
}

fn field_output_path(c: &Common) -> Option<PathBuf> {
    c.field_output
        .clone()
        .or_else(|| c.output.as_ref().map(|o| o.with_extension("field.json")))
}

fn cmd_invert(c: &Common) -> Result<i32> {
    check_config(c)?;
    let set = DtnMatrixSet::from_json(&read_input(c)?)?;
    let n = c.nmax.unwrap_or(set.n);
    let rec = reconstruct(&set, n, options(c))?;
    for (k, row) in rec.condition().iter().enumerate() {
        let worst = row.iter().copied().fold(0.0, f64::max);
        eprintln!("k = {k}: max condition estimate {worst:.3e}");
    }
    write_output(c.output.as_deref(), &(rec.to_json()? + "\n"))?;
    let field_json = rec.to_field()?.to_json()? + "\n";
    match field_output_path(c) {
        Some(p) => fs::write(p, field_json)?,
        None => io::stdout().write_all(field_json.as_bytes())?,
    }
    Ok(0)
}

#[derive(Serialize)]
struct RoundtripReport {
    #[serde(rename = "N")]
    n: usize,
    max_abs_error: f64,
    /// Input terms not present in the reconstruction: `(parity, k, power, value)`.
    nullspace_residual: Vec<(String, u32, u32, f64)>,
    admissibility: f64,
}

fn coefficient_error(
    input: &FourierRadialField,
    output: &FourierRadialField,
    n: usize,
    is_conductivity: bool,
) -> (f64, Vec<(String, u32, u32, f64)>) {
    let mut max = 0.0f64;
    let mut residual = Vec::new();
    let in_span = |k: u32, power: u32| {
        let l = (power.saturating_sub(k) / 2) as usize;
        let top = if is_conductivity { n.checked_sub(1 + k as usize) } else { n.checked_sub(k as usize) };
        power >= k && (power - k).is_multiple_of(2) && top.is_some_and(|t| l <= t)
    };
    let sides = [
        ("cos", input.cos_profiles().collect::<Vec<_>>(), output.cos_profiles().collect::<Vec<_>>()),
        ("sin", input.sin_profiles().collect(), output.sin_profiles().collect()),
    ];
    for (name, ins, outs) in sides {
        let get = |list: &[(u32, &crate::field::RadialProfile)], k: u32, p: u32| {
            list.iter().find(|(kk, _)| *kk == k).map_or(0.0, |(_, prof)| prof.coefficient(p))
        };
        let mut keys: Vec<(u32, u32)> = Vec::new();
        for (k, prof) in ins.iter().chain(outs.iter()) {
            for (p, _) in prof.terms() {
                keys.push((*k, p));
            }
        }
        keys.sort_unstable();
        keys.dedup();
        for (k, p) in keys {
            let (a, b) = (get(&ins, k, p), get(&outs, k, p));
            if in_span(k, p) {
                max = max.max((a - b).abs());
            } else if a != 0.0 {
                residual.push((name.to_string(), k, p, a));
            }
        }
    }
    (max, residual)
}

fn cmd_roundtrip(c: &Common) -> Result<i32> {
    check_config(c)?;
    let field = FourierRadialField::from_json(&read_input(c)?)?;
    let n = require_nmax(c)?;
    let is_conductivity = field.kind() == crate::field::FieldKind::Conductivity;
    let back = if c.rational {
        let exact = ExactField::from_field(&field)?;
        let rec = exact_reconstruct(&exact_forward(&exact, n)?).to_exact_field();
        let mut out = FourierRadialField::new(field.kind());
        for (k, prof) in &rec.cos {
            out.set_cos(*k, rounded(prof));
        }
        for (k, prof) in &rec.sin {
            out.set_sin(*k, rounded(prof))?;
        }
        out
    } else {
        reconstruct(&forward(&field, n)?, n, options(c))?.to_field()?
    };
    let (max, residual) = coefficient_error(&field, &back, n, is_conductivity);
    let rec_for_norm = reconstruct(&forward(&back, n)?, n, options(c))?;
    let report = RoundtripReport {
        n,
        max_abs_error: max,
        nullspace_residual: residual,
        admissibility: admissibility(&rec_for_norm),
    };
    write_output(c.output.as_deref(), &to_json_line(&report)?)?;
    Ok(if max <= c.tol && report.nullspace_residual.is_empty() { 0 } else { 1 })
}

fn rounded(prof: &crate::exact::ExactProfile) -> crate::field::RadialProfile {
    let mut out = crate::field::RadialProfile::new();
    for (p, v) in prof {
        out.add_term(*p, to_f64(v));
    }
    out
}

fn cmd_validate(c: &Common) -> Result<i32> {
    check_config(c)?;
    let set = DtnMatrixSet::from_json(&read_input(c)?)?;
    let report = validate(&set, c.tol)?;
    write_output(c.output.as_deref(), &to_json_line(&report)?)?;
    if report.passed() {
        Ok(0)
    } else {
        eprint!("{report}");
        Ok(4)
    }
}

fn cmd_eval(c: &Common) -> Result<i32> {
    check_config(c)?;
    let text = read_input(c)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let points = if value.get("p").is_some() {
        let rec = Reconstruction::from_json(&text)?;
        sample_reconstruction(&rec, c.grid_r, c.grid_phi)
    } else {
        sample_grid(&FourierRadialField::from_json(&text)?, c.grid_r, c.grid_phi)
    };
    write_grid(c.output.as_deref(), &points)?;
    Ok(0)
}

fn sample_reconstruction(rec: &Reconstruction, nr: usize, nphi: usize) -> Vec<GridPoint> {
    polar_grid(nr, nphi)
        .into_iter()
        .map(|(r, phi)| GridPoint {
            x: r * phi.cos(),
            y: r * phi.sin(),
            value: rec.eval(r, phi).unwrap_or(f64::NAN),
        })
        .collect()
}

/// Radii `(i+1)/nr` and angles `πj/(nphi-1)` covering the closed upper half disk.
fn half_disk_grid(nr: usize, nphi: usize) -> Vec<(f64, f64)> {
    let steps = nphi.max(2) - 1;
    let mut out = Vec::with_capacity(nr * (steps + 1));
    for i in 0..nr {
        let r = (i + 1) as f64 / nr as f64;
        for j in 0..=steps {
            out.push((r, std::f64::consts::PI * j as f64 / steps as f64));
        }
    }
    out
}

fn cmd_half_invert(c: &Common) -> Result<i32> {
    check_config(c)?;
    let data = HalfDiskData::from_json(&read_input(c)?)?;
    let n = c.nmax.unwrap_or(data.n);
    let rec = half_disk_invert(&data, n, options(c))?;
    let points: Vec<GridPoint> = half_disk_grid(c.grid_r, c.grid_phi)
        .into_iter()
        .map(|(r, phi)| GridPoint {
            x: r * phi.cos(),
            y: r * phi.sin(),
            value: rec.eval(r, phi).unwrap_or(f64::NAN),
        })
        .collect();
    write_grid(c.output.as_deref(), &points)?;
    Ok(0)
}

fn cmd_arc_invert(c: &Common) -> Result<i32> {
    check_config(c)?;
    let (file_map, data) = ArcData::from_json(&read_input(c)?)?;
    let map = match c.alpha {
        Some(a) => ConformalMap::from_alpha(a)?,
        None => file_map,
    };
    if c.map_debug {
        map_debug(&map)?;
    }
    let n = c.nmax.unwrap_or(data.n);
    let rec = arc_invert(&data, &map, n, options(c))?;
    let points: Vec<GridPoint> = polar_grid(c.grid_r, c.grid_phi)
        .into_iter()
        .map(|(r, phi)| GridPoint {
            x: r * phi.cos(),
            y: r * phi.sin(),
            value: rec.eval_polar(r, phi).unwrap_or(f64::NAN),
        })
        .collect();
    write_grid(c.output.as_deref(), &points)?;
    Ok(0)
}

/// `ψ` on the half-disk boundary: the upper half circle from `z = 1`, then the diameter.
fn map_debug(map: &ConformalMap) -> Result<()> {
    let mut err = io::stderr().lock();
    writeln!(err, "z_re,z_im,psi_re,psi_im")?;
    let m = 16;
    let circle = (0..=m).map(|j| Complex64::from_polar(1.0, std::f64::consts::PI * j as f64 / m as f64));
    let diameter = (1..m).map(|j| Complex64::new(-1.0 + 2.0 * j as f64 / m as f64, 0.0));
    for z in circle.chain(diameter) {
        let w = map.psi(z)?;
        writeln!(err, "{:.16e},{:.16e},{:.16e},{:.16e}", z.re, z.im, w.re, w.im)?;
    }
    Ok(())
}

fn cmd_muntz(c: &Common) -> Result<i32> {
    check_config(c)?;
    let nmax = c.nmax.unwrap_or(4);
    let fam = build_weighted_family(c.k, nmax);
    let rows: Vec<Vec<serde_json::Value>> = fam
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(|q| if c.rational { json!(q.to_string()) } else { json!(to_f64(q)) })
                .collect()
        })
        .collect();
    let norms: Vec<f64> = (0..=nmax).map(|n| to_f64(&lm_norm_squared(c.k, n))).collect();
    let report = json!({
        "k": c.k,
        "nmax": nmax,
        "exponents": (0..=nmax).map(|l| 2 * l as u32 + c.k).collect::<Vec<_>>(),
        "coefficients": rows,
        "norm_squared": norms,
        "condition": crate::inverse::condition_estimates(c.k, nmax + 1),
    });
    write_output(c.output.as_deref(), &to_json_line(&report)?)?;
    Ok(0)
}
