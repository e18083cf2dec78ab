use std::fs;
use std::path::{Path, PathBuf};

use moyal_core::dynamics::{evolve_density, evolve_moyal, schrodinger_oracle};
use moyal_core::transforms::{
    characteristic_from_wavefunction, characteristic_from_wigner, density_from_wavefunction, rho_from_wigner,
    wigner_from_density, wigner_from_wavefunction,
};
use moyal_core::{
    compare_evolutions, make_cat, make_fock, make_gaussian, DensityMatrix, EvolutionConfig, GridSpec1D, Method,
    PhaseGridSpec, PotentialSpec, WignerFunction,
};
use serde::Serialize;

use crate::args::{EvolveArgs, Output, PotentialArgs, PotentialKind, StateKind, Target, TransformArgs};
use crate::error::{CliError, CliResult};
use crate::io::{self, StateFile};

fn parse_grid(spec: &str) -> CliResult<GridSpec1D> {
    spec.parse::<GridSpec1D>().map_err(CliError::from)
}

pub fn cmd_state(kind: &StateKind) -> CliResult<()> {
    let (psi, out) = match kind {
        StateKind::Gaussian { x0, p0, a, output } => (make_gaussian(&parse_grid(&output.grid)?, *x0, *p0, *a)?, output),
        StateKind::Fock { n, output } => {
            let n = usize::try_from(*n)
                .map_err(|_| CliError::Validation(format!("invalid parameter `n`: must be a non-negative integer, got {n}")))?;
            (make_fock(&parse_grid(&output.grid)?, n)?, output)
        }
        StateKind::Cat { sep, a, output } => (make_cat(&parse_grid(&output.grid)?, *sep, *a)?, output),
    };
    let Output { out, .. } = out;
    io::write_wavefunction(out, &psi)
}

fn to_wigner(state: &StateFile) -> CliResult<WignerFunction> {
    let pg = PhaseGridSpec::for_position(state.grid());
    Ok(match state {
        StateFile::Wavefunction(psi) => wigner_from_wavefunction(psi, &pg)?,
        StateFile::Density(rho) => wigner_from_density(rho, &pg)?,
        StateFile::Wigner(f) => f.clone(),
    })
}

fn to_density(state: &StateFile) -> CliResult<DensityMatrix> {
    Ok(match state {
        StateFile::Wavefunction(psi) => density_from_wavefunction(psi),
        StateFile::Density(rho) => rho.clone(),
        StateFile::Wigner(f) => rho_from_wigner(f)?,
    })
}

pub fn cmd_transform(args: &TransformArgs) -> CliResult<()> {
    let state = io::read_state(&args.input)?;
    match args.which {
        Target::Wigner => io::write_wigner(&args.out, &to_wigner(&state)?),
        Target::Characteristic => {
            let m = match &state {
                StateFile::Wavefunction(psi) => {
                    let g = psi.grid();
                    characteristic_from_wavefunction(psi, &g.tau_dual(), &g.theta_dual())?
                }
                other => characteristic_from_wigner(&to_wigner(other)?)?,
            };
            io::write_characteristic(&args.out, &m)
        }
        Target::Density => io::write_density(&args.out, &to_density(&state)?),
        Target::Marginal => io::write_marginal(&args.out, &to_wigner(&state)?),
    }
}

fn read_table(path: &Path) -> CliResult<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::parse(path, 0, format!("cannot read table: {e}")))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse::<f64>()
                .map_err(|_| CliError::parse(path, i + 1, format!("not a number: `{}`", l.trim())))
        })
        .collect()
}

pub fn potential_from_args(p: &PotentialArgs, grid: &GridSpec1D) -> CliResult<PotentialSpec> {
    let v = match p.potential {
        PotentialKind::Free => PotentialSpec::Free,
        PotentialKind::Linear => PotentialSpec::Linear { slope: p.slope },
        PotentialKind::Harmonic => PotentialSpec::Harmonic { omega: p.omega },
        PotentialKind::Quartic => PotentialSpec::Quartic { lambda: p.lambda },
        PotentialKind::DoubleWell => PotentialSpec::DoubleWell {
            depth: p.depth,
            well: p.well,
        },
        PotentialKind::Tabulated => {
            let path = p
                .table
                .as_deref()
                .ok_or_else(|| CliError::Validation("--table is required for a tabulated potential".into()))?;
            PotentialSpec::Tabulated {
                values: read_table(path)?,
            }
        }
    };
    v.validate_for(grid)?;
    Ok(v)
}

#[derive(Serialize)]
struct PairRecord {
    linf: f64,
    l2: f64,
}

#[derive(Serialize)]
struct CompareConfig {
    grid: String,
    potential: String,
    dt: f64,
    steps: usize,
    mass: f64,
    t_final: f64,
}

#[derive(Serialize)]
struct CompareReport {
    version: u32,
    config: CompareConfig,
    pairs: std::collections::BTreeMap<&'static str, PairRecord>,
}

fn default_report_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".compare.json");
    out.with_file_name(name)
}

pub fn cmd_evolve(args: &EvolveArgs) -> CliResult<()> {
    let state = io::read_state(&args.input)?;
    let grid = state.grid();
    let v = potential_from_args(&args.potential, &grid)?;
    let mut cfg = match (args.steps, args.time) {
        (_, Some(t)) => {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(CliError::Validation(format!(
                    "invalid parameter `time`: must be non-negative, got {t}"
                )));
            }
            EvolutionConfig::new(args.dt, 0, args.method).validate()?;
            if t == 0.0 {
                EvolutionConfig::new(args.dt, 0, args.method)
            } else {
                EvolutionConfig::for_duration(t, args.dt, args.method)
            }
        }
        (Some(n), None) => EvolutionConfig::new(args.dt, n, args.method),
        (None, None) => return Err(CliError::Validation("one of --steps or --time is required".into())),
    };
    cfg.mass = args.mass;
    cfg.validate()?;
    cfg.check_stable(&grid, &v)?;

    if args.compare {
        let StateFile::Wavefunction(psi) = &state else {
            return Err(CliError::Validation(format!(
                "--compare needs a wavefunction input, got a {} file",
                state.kind()
            )));
        };
        let rep = compare_evolutions(psi, &v, &cfg)?;
        let chosen = match args.method {
            Method::Moyal => &rep.moyal,
            Method::DensityLiouville => &rep.density,
            Method::SchrodingerOracle => &rep.oracle,
        };
        io::write_wigner(&args.out, chosen)?;
        let report = CompareReport {
            version: 1,
            config: CompareConfig {
                grid: grid.to_string(),
                potential: format!("{v:?}"),
                dt: cfg.dt,
                steps: cfg.n_steps,
                mass: cfg.mass,
                t_final: cfg.total_time(),
            },
            pairs: rep
                .pairs()
                .into_iter()
                .map(|(name, d)| (name, PairRecord { linf: d.linf, l2: d.l2 }))
                .collect(),
        };
        let path = args.report.clone().unwrap_or_else(|| default_report_path(&args.out));
        let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        fs::write(&path, text).map_err(|e| CliError::write(&path, e))?;
        for (name, d) in rep.pairs() {
            println!("{name:<18} L_inf {:.3e}  L2 {:.3e}", d.linf, d.l2);
        }
        return Ok(());
    }

    let result = match args.method {
        Method::Moyal => StateFile::Wigner(evolve_moyal(&to_wigner(&state)?, &v, &cfg)?),
        Method::DensityLiouville => StateFile::Density(evolve_density(&to_density(&state)?, &v, &cfg)?),
        Method::SchrodingerOracle => match &state {
            StateFile::Wavefunction(psi) => StateFile::Wavefunction(schrodinger_oracle(psi, &v, &cfg)?),
            other => {
                return Err(CliError::Validation(format!(
                    "schrodinger_oracle needs a wavefunction input, got a {} file",
                    other.kind()
                )))
            }
        },
    };
    io::write_state(&args.out, &result)
}
