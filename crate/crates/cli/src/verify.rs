//! Verification suites for the Weyl algebra, the Gaussian idempotent and
//! the bridge to the characteristic function.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::{env, fs};

use chrono::{DateTime, SecondsFormat, Utc};
use moyal_core::state::make_fock;
use moyal_core::weyl::{
    bridge_check, build_n, build_vonneumann_a, check_a_idempotent, check_n_idempotent, check_primitivity,
    check_weyl_relation, density_from_idempotent, mean_quadrature_commutator, n_coefficient, n_integral_xp,
    vacuum_projector, weyl_quantize, weyl_s, weyl_s_reversed, weyl_u, weyl_v,
};
use moyal_core::{build_fock_rep, CMatrix, FockRep, GridSpec1D, QuadratureBox};
use num_complex::Complex64;
use serde::Serialize;

use crate::args::{Suite, VerifyArgs};
use crate::error::{CliError, CliResult};

pub const DEFAULT_TOLERANCES: &str = include_str!("../tolerances.json");
pub const REPORT_VERSION: u32 = 1;

/// `(alpha, beta)` values for the algebraic checks.
const LATTICE: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];
/// Sample points for the symmetrized product and the rank-one operators.
const PROBES: [(f64, f64); 6] = [(1.0, 1.0), (0.5, 0.5), (1.0, 0.0), (-1.0, 0.5), (0.5, -1.0), (-0.5, -0.5)];
/// Grid for the bridge sweep: fine enough that `alpha/2` lands on it for
/// every lattice point, wide enough for Fock level 4 shifted by 2.
const BRIDGE_GRID: &str = "512:-16:16";
const BRIDGE_AXIS: [f64; 9] = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0];
const BRIDGE_LEVELS: usize = 5;
const COMMUTATOR_GRID: &str = "256:-10:10";

/// Named tolerances; the embedded defaults merged with user overrides.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Tolerances {
    pub fn defaults() -> Self {
        Tolerances(serde_json::from_str(DEFAULT_TOLERANCES).expect("embedded tolerances parse"))
    }

    fn set(&mut self, name: &str, value: f64) -> CliResult<()> {
        if !self.0.contains_key(name) {
            return Err(CliError::Validation(format!("unknown tolerance `{name}`")));
        }
        if !(value > 0.0) || !value.is_finite() {
            return Err(CliError::Validation(format!(
                "tolerance `{name}` must be positive, got {value}"
            )));
        }
        self.0.insert(name.to_string(), value);
        Ok(())
    }

    pub fn load(file: Option<&Path>, overrides: &[String]) -> CliResult<Self> {
        let mut t = Self::defaults();
        if let Some(path) = file {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::parse(path, 0, format!("cannot read tolerances: {e}")))?;
            let map: BTreeMap<String, f64> = serde_json::from_str(&text)
                .map_err(|e| CliError::parse(path, e.line(), format!("bad tolerances file: {e}")))?;
            for (k, v) in map {
                t.set(&k, v)?;
            }
        }
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("--tol expects NAME=VALUE, got `{o}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::Validation(format!("--tol {k}: not a number `{v}`")))?;
            t.set(k.trim(), v)?;
        }
        Ok(t)
    }

    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub paper_eq: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Both closed forms of the `N^2 = c N` scalar next to the measured one,
/// as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarComparison {
    pub alpha: f64,
    pub beta: f64,
    pub measured: [f64; 2],
    pub standard: [f64; 2],
    pub printed: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub suite: String,
    pub dim: usize,
    #[serde(rename = "box")]
    pub box_half_width: f64,
    pub step: f64,
    pub block: usize,
    pub bridge_grid: &'static str,
    pub commutator_grid: &'static str,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub version: u32,
    pub timestamp: String,
    pub config: VerifyConfig,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub n_scalars: Vec<ScalarComparison>,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

struct Collector<'a> {
    tol: &'a Tolerances,
    checks: Vec<Check>,
}

impl Collector<'_> {
    fn push(&mut self, name: impl Into<String>, key: &str, formula: &str, residual: f64) {
        let tolerance = self.tol.get(key);
        self.checks.push(Check {
            name: name.into(),
            paper_eq: formula.to_string(),
            residual,
            tolerance,
            pass: residual.is_finite() && residual < tolerance,
        });
    }
}

fn leading_norm(m: &CMatrix, b: usize) -> f64 {
    m.view((0, 0), (b, b)).norm()
}

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

fn weyl_suite(rep: &FockRep, out: &mut Collector, scalars: &mut Vec<ScalarComparison>) -> CliResult<()> {
    let b = rep.block();
    out.push("fock_ccr", "fock_ccr", "[x, p] = i", rep.ccr_residual());

    // U and V at every sum of two lattice values
    let args: Vec<f64> = (-4..=4).map(|k| 0.5 * k as f64).collect();
    let mut us = Vec::with_capacity(args.len());
    let mut vs = Vec::with_capacity(args.len());
    for &a in &args {
        us.push(weyl_u(rep, a)?);
        vs.push(weyl_v(rep, a)?);
    }
    let at = |a: f64| args.iter().position(|x| *x == a).expect("argument on the half-integer lattice");

    let (mut unitary, mut overlap, mut u_law, mut v_law) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &a1 in &LATTICE {
        let (u1, v1) = (&us[at(a1)], &vs[at(a1)]);
        unitary = unitary.max(u1.unitarity_residual(b)).max(v1.unitarity_residual(b));
        overlap = overlap.max((u1.values()[(0, 0)] - (-a1 * a1 / 4.0).exp()).norm());
        for &a2 in &LATTICE {
            let u = u1.values() * us[at(a2)].values() - us[at(a1 + a2)].values();
            let v = v1.values() * vs[at(a2)].values() - vs[at(a1 + a2)].values();
            u_law = u_law.max(leading_norm(&u, b));
            v_law = v_law.max(leading_norm(&v, b));
        }
    }
    let mut relation = 0.0f64;
    for &al in &LATTICE {
        for &be in &LATTICE {
            relation = relation.max(check_weyl_relation(rep, al, be)?);
        }
    }

    let (mut s_forms, mut s_adjoint, mut n_idem, mut n_rank) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &(al, be) in &PROBES {
        let s = weyl_s(rep, al, be)?;
        s_forms = s_forms.max(leading_norm(&(s.values() - weyl_s_reversed(rep, al, be)?.values()), b));
        s_adjoint = s_adjoint.max(leading_norm(&(s.values().adjoint() - weyl_s(rep, -al, -be)?.values()), b));
        let n = check_n_idempotent(rep, al, be)?;
        n_idem = n_idem.max(n.residual);
        scalars.push(ScalarComparison {
            alpha: al,
            beta: be,
            measured: pair(n.scalar_measured),
            standard: pair(n.scalar_standard),
            printed: pair(n.scalar_printed),
        });
        let sv = build_n(rep, al, be)?.singular_values();
        n_rank = n_rank.max(sv.get(1).copied().unwrap_or(0.0) / sv[0]);
    }
    out.push("unitarity", "unitarity", "U(a)^dag U(a) = V(b)^dag V(b) = 1", unitary);
    out.push("weyl_relation", "weyl_relation", "U(a) V(b) = e^{iab} V(b) U(a)", relation);
    out.push("u_group_law", "u_group_law", "U(a1) U(a2) = U(a1 + a2)", u_law);
    out.push("v_group_law", "v_group_law", "V(b1) V(b2) = V(b1 + b2)", v_law);
    out.push("vacuum_overlap", "vacuum_overlap", "<0|U(a)|0> = e^{-a^2/4}", overlap);
    out.push(
        "s_forms",
        "s_forms",
        "S(a,b) = e^{-iab/2} U(a) V(b) = e^{iab/2} V(b) U(a)",
        s_forms,
    );
    out.push("s_adjoint", "s_adjoint", "S(a,b)^dag = S(-a,-b)", s_adjoint);
    out.push("n_idempotent", "n_idempotent", "N^2 = <0|U(a) V(b)|0> N, N = V(b) |0><0| U(a)", n_idem);
    out.push("n_rank_one", "n_rank_one", "rank N(a,b) = 1", n_rank);
    Ok(())
}

fn relative_frobenius(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm()
}

fn idempotent_suite(rep: &FockRep, bx: &QuadratureBox, out: &mut Collector) -> CliResult<()> {
    let a = build_vonneumann_a(rep, bx)?;
    let idem = check_a_idempotent(&a);
    let prim = check_primitivity(rep, &a, 1.0, 1.0)?;
    out.push("A_idempotent", "A_idempotent", "A^2 = 2 pi A", idem);
    out.push(
        "A_primitive",
        "A_primitive",
        "A S(a,b) A = 2 pi e^{-a^2/4 - b^2/4} A at (a,b) = (1,1)",
        prim,
    );
    let omega = vacuum_projector(rep);
    let projector = (a.values() / Complex64::new(2.0 * PI, 0.0) - omega.values())
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    out.push("A_vacuum_projector", "A_vacuum_projector", "A = 2 pi |0><0|", projector);
    out.push("A_trace", "A_trace", "tr A = 2 pi", (a.trace() / (2.0 * PI) - 1.0).norm());
    let sv = a.singular_values();
    out.push("A_rank_one", "A_rank_one", "s_2(A) / s_1(A) = 0", sv[1] / sv[0]);

    let fine = build_vonneumann_a(rep, &bx.refined())?;
    let ratio = (check_a_idempotent(&fine) / idem).max(check_primitivity(rep, &fine, 1.0, 1.0)? / prim);
    out.push(
        "A_refinement",
        "A_refinement",
        "A^2 = 2 pi A and primitivity residuals shrink when the spacing halves",
        ratio,
    );

    let coeff = bx.sample(|al, be| Complex64::new(n_coefficient(al, be, 1.0, 1.0).unwrap(), 0.0));
    let q = weyl_quantize(rep, bx, &coeff)?;
    let scale = a.values().dotc(q.values()) / a.values().norm_squared();
    out.push(
        "weyl_quantize_n",
        "weyl_quantize_n",
        "int int n(a,b) S(a,b) da db = c A with a = b = 1",
        relative_frobenius(&(a.values() * scale), q.values()),
    );

    let g = GridSpec1D::default_grid();
    let constant = 2.0 * PI;
    let mut n_int = 0.0f64;
    for &al in &LATTICE {
        for &be in &LATTICE {
            let i = n_integral_xp(&g, al, be, 1.0, 1.0)?;
            let n = n_coefficient(2f64.sqrt() * al, 2f64.sqrt() * be, 1.0, 1.0)?;
            n_int = n_int.max((i / n - constant).norm() / constant);
        }
    }
    out.push(
        "n_integral",
        "n_integral",
        "int int <x|N(a,b)|p> dx dp = (2 pi / (ab)^2) n(sqrt2 a, sqrt2 b)",
        n_int,
    );

    let states = [make_fock(&g, 0)?, make_fock(&g, 1)?];
    let c = CMatrix::from_diagonal_element(2, 2, Complex64::new(0.5, 0.0));
    let eig = density_from_idempotent(&states, &c, 0.0, 0.0)?.eigenvalues();
    let mixture = eig
        .iter()
        .enumerate()
        .map(|(k, l)| (l - if k < 2 { 0.5 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    out.push(
        "density_mixture",
        "density_mixture",
        "<x'|N|x> = sum C_nn' psi_n(x') psi*_n'(x), C = diag(1/2, 1/2)",
        mixture,
    );

    let grid: GridSpec1D = COMMUTATOR_GRID.parse()?;
    let mc = mean_quadrature_commutator(&grid)?;
    out.push("mean_commutator", "mean_commutator", "[X, P] = 0", mc.commutator);
    out.push("mean_left", "mean_left", "[x., p.] rho = i rho", mc.left);
    out.push("mean_right", "mean_right", "[.x, .p] rho = -i rho", mc.right);
    Ok(())
}

fn bridge_suite(out: &mut Collector) -> CliResult<()> {
    let g: GridSpec1D = BRIDGE_GRID.parse()?;
    for level in 0..BRIDGE_LEVELS {
        let psi = make_fock(&g, level)?;
        for &al in &BRIDGE_AXIS {
            for &be in &BRIDGE_AXIS {
                let r = bridge_check(&psi, al, be)?;
                out.push(
                    format!("bridge_fock{level}_alpha{al:+.1}_beta{be:+.1}"),
                    "bridge",
                    "int <x|N(a,b)|x> dx = e^{iab/2} M(a,b)",
                    r.abs_diff,
                );
            }
        }
    }
    Ok(())
}

/// Report time: the flag, else `SOURCE_DATE_EPOCH`, else the clock.
pub fn timestamp(flag: Option<&str>) -> CliResult<String> {
    if let Some(t) = flag {
        return Ok(t.to_string());
    }
    let when = match env::var("SOURCE_DATE_EPOCH") {
        Ok(s) => {
            let secs: i64 = s
                .trim()
                .parse()
                .map_err(|_| CliError::Validation(format!("SOURCE_DATE_EPOCH is not an integer: `{s}`")))?;
            DateTime::<Utc>::from_timestamp(secs, 0)
                .ok_or_else(|| CliError::Validation(format!("SOURCE_DATE_EPOCH out of range: {secs}")))?
        }
        Err(_) => Utc::now(),
    };
    Ok(when.to_rfc3339_opts(SecondsFormat::Secs, true))
}

/// Runs `suite` and returns the report; the caller decides the exit code.
pub fn run_suite(
    suite: Suite,
    dim: usize,
    box_half_width: f64,
    step: f64,
    tol: &Tolerances,
    stamp: String,
) -> CliResult<Report> {
    let rep = build_fock_rep(dim)?;
    let needs_box = matches!(suite, Suite::Idempotent | Suite::All);
    let bx = if needs_box {
        Some(QuadratureBox::from_spacing(box_half_width, step)?)
    } else {
        None
    };
    let mut out = Collector {
        tol,
        checks: Vec::new(),
    };
    let mut scalars = Vec::new();
    if matches!(suite, Suite::Weyl | Suite::All) {
        weyl_suite(&rep, &mut out, &mut scalars)?;
    }
    if let Some(bx) = &bx {
        idempotent_suite(&rep, bx, &mut out)?;
    }
    if matches!(suite, Suite::Bridge | Suite::All) {
        bridge_suite(&mut out)?;
    }
    Ok(Report {
        version: REPORT_VERSION,
        timestamp: stamp,
        config: VerifyConfig {
            suite: format!("{suite:?}").to_lowercase(),
            dim,
            box_half_width,
            step,
            block: rep.block(),
            bridge_grid: BRIDGE_GRID,
            commutator_grid: COMMUTATOR_GRID,
            tolerances: tol.clone(),
        },
        checks: out.checks,
        n_scalars: scalars,
    })
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult<()> {
    let tol = Tolerances::load(args.tolerances.as_deref(), &args.tol)?;
    let stamp = timestamp(args.timestamp.as_deref())?;
    let report = run_suite(args.suite, args.dim, args.box_half_width, args.step, &tol, stamp)?;
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    fs::write(&args.out, text).map_err(|e| CliError::write(&args.out, e))?;

    let failed: Vec<&Check> = report.failures().collect();
    println!(
        "{} of {} checks passed; report written to {}",
        report.checks.len() - failed.len(),
        report.checks.len(),
        args.out.display()
    );
    if failed.is_empty() {
        return Ok(());
    }
    for c in &failed {
        eprintln!("FAIL {}: residual {:.3e} >= tolerance {:.1e}", c.name, c.residual, c.tolerance);
    }
    Err(CliError::VerifyFailed(format!(
        "{} of {} checks failed",
        failed.len(),
        report.checks.len()
    )))
}
