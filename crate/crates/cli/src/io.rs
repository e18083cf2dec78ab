//! Versioned CSV formats.
//!
//! Every file starts with a sentinel line `# moyal-phase <kind> v1` and
//! carries one sample per line, comma separated, with no column header.
//! Floats are written with 17 significant digits, so a write/read cycle
//! reproduces every value exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use moyal_core::transforms::{position_marginal, momentum_marginal};
use moyal_core::{CharacteristicFunction, DensityMatrix, GridSpec1D, PhaseGridSpec, Wavefunction, WignerFunction};
use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{CliError, CliResult};

pub const WAVEFUNCTION_HEADER: &str = "# moyal-phase wavefunction v1";
pub const WIGNER_HEADER: &str = "# moyal-phase wigner v1";
pub const CHARACTERISTIC_HEADER: &str = "# moyal-phase characteristic v1";
pub const DENSITY_HEADER: &str = "# moyal-phase density v1";
pub const MARGINAL_HEADER: &str = "# moyal-phase marginal v1";

const PREFIX: &str = "# moyal-phase ";

/// Relative tolerance for recognizing a column as a uniform grid.
const GRID_TOL: f64 = 1e-9;

/// Any object the commands can read back.
#[derive(Debug, Clone)]
pub enum StateFile {
    Wavefunction(Wavefunction),
    Density(DensityMatrix),
    Wigner(WignerFunction),
}

impl StateFile {
    pub fn kind(&self) -> &'static str {
        match self {
            StateFile::Wavefunction(_) => "wavefunction",
            StateFile::Density(_) => "density",
            StateFile::Wigner(_) => "wigner",
        }
    }

    pub fn grid(&self) -> GridSpec1D {
        match self {
            StateFile::Wavefunction(p) => *p.grid(),
            StateFile::Density(r) => *r.grid(),
            StateFile::Wigner(f) => f.phase_grid().x_grid,
        }
    }
}

fn num(out: &mut String, v: f64) {
    write!(out, "{v:.16e}").unwrap();
}

fn row(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        num(out, *v);
    }
    out.push('\n');
}

fn save(path: &Path, text: String) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::write(path, e))
}

pub fn format_wavefunction(psi: &Wavefunction) -> String {
    let g = psi.grid();
    let mut out = String::with_capacity(64 * g.n_points());
    out.push_str(WAVEFUNCTION_HEADER);
    out.push('\n');
    for (i, v) in psi.values().iter().enumerate() {
        row(&mut out, &[g.point(i as isize), v.re, v.im]);
    }
    out
}

pub fn format_wigner(f: &WignerFunction) -> String {
    let pg = f.phase_grid();
    let vals = f.values();
    let mut out = String::with_capacity(72 * vals.len());
    out.push_str(WIGNER_HEADER);
    out.push('\n');
    for ((j, k), v) in vals.indexed_iter() {
        row(&mut out, &[pg.x_grid.point(j as isize), pg.p_grid.point(k as isize), *v]);
    }
    out
}

pub fn format_characteristic(m: &CharacteristicFunction) -> String {
    let (tg, hg) = (m.tau_grid(), m.theta_grid());
    let vals = m.values();
    let mut out = String::with_capacity(96 * vals.len());
    out.push_str(CHARACTERISTIC_HEADER);
    out.push('\n');
    for ((t, h), v) in vals.indexed_iter() {
        row(&mut out, &[tg.point(t as isize), hg.point(h as isize), v.re, v.im]);
    }
    out
}

pub fn format_density(rho: &DensityMatrix) -> String {
    let g = rho.grid();
    let vals = rho.values();
    let mut out = String::with_capacity(96 * vals.len());
    out.push_str(DENSITY_HEADER);
    out.push('\n');
    for ((i, j), v) in vals.indexed_iter() {
        row(&mut out, &[g.point(i as isize), g.point(j as isize), v.re, v.im]);
    }
    out
}

/// Position and momentum marginals of `f`, one index per line:
/// `x, prob_x, p, prob_p`.
pub fn format_marginal(f: &WignerFunction) -> String {
    let pg = f.phase_grid();
    let (px, pp) = (position_marginal(f), momentum_marginal(f));
    let mut out = String::with_capacity(96 * px.len());
    out.push_str(MARGINAL_HEADER);
    out.push('\n');
    for (k, (a, b)) in px.iter().zip(&pp).enumerate() {
        row(&mut out, &[pg.x_grid.point(k as isize), *a, pg.p_grid.point(k as isize), *b]);
    }
    out
}

pub fn write_wavefunction(path: &Path, psi: &Wavefunction) -> CliResult<()> {
    save(path, format_wavefunction(psi))
}

pub fn write_wigner(path: &Path, f: &WignerFunction) -> CliResult<()> {
    save(path, format_wigner(f))
}

pub fn write_characteristic(path: &Path, m: &CharacteristicFunction) -> CliResult<()> {
    save(path, format_characteristic(m))
}

pub fn write_density(path: &Path, rho: &DensityMatrix) -> CliResult<()> {
    save(path, format_density(rho))
}

pub fn write_marginal(path: &Path, f: &WignerFunction) -> CliResult<()> {
    save(path, format_marginal(f))
}

pub fn write_state(path: &Path, state: &StateFile) -> CliResult<()> {
    match state {
        StateFile::Wavefunction(p) => write_wavefunction(path, p),
        StateFile::Density(r) => write_density(path, r),
        StateFile::Wigner(f) => write_wigner(path, f),
    }
}

/// Data rows with their 1-based line numbers.
struct Table {
    rows: Vec<Vec<f64>>,
    lines: Vec<usize>,
}

fn parse_table(path: &Path, lines: std::str::Lines<'_>, width: usize) -> CliResult<Table> {
    let mut table = Table {
        rows: Vec::new(),
        lines: Vec::new(),
    };
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width {
            return Err(CliError::parse(
                path,
                lineno,
                format!("expected {width} fields, found {}", fields.len()),
            ));
        }
        let mut values = Vec::with_capacity(width);
        for f in fields {
            let v: f64 = f
                .trim()
                .parse()
                .map_err(|_| CliError::parse(path, lineno, format!("not a number: `{}`", f.trim())))?;
            if !v.is_finite() {
                return Err(CliError::parse(path, lineno, format!("non-finite value `{}`", f.trim())));
            }
            values.push(v);
        }
        table.rows.push(values);
        table.lines.push(lineno);
    }
    if table.rows.is_empty() {
        return Err(CliError::parse(path, 2, "no data rows"));
    }
    Ok(table)
}

/// Rounds `v` to ten significant digits when that moves it by no more
/// than rounding noise, so `x_max` recovered as `x_0 + n dx` lands on
/// the value the grid was built from.
fn snap(v: f64) -> f64 {
    let s: f64 = format!("{v:.9e}").parse().unwrap_or(v);
    if (s - v).abs() <= 1e-12 * v.abs().max(1.0) {
        s
    } else {
        v
    }
}

/// Rebuilds the half-open grid whose points are `xs`.
fn infer_grid(path: &Path, xs: &[f64], lines: &[usize], axis: &str) -> CliResult<GridSpec1D> {
    let n = xs.len();
    if n < 2 {
        return Err(CliError::parse(path, lines[0], format!("{axis} axis has fewer than two points")));
    }
    let dx = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    let g = GridSpec1D::new(n, xs[0], snap(xs[0] + n as f64 * dx))
        .map_err(|e| CliError::parse(path, lines[0], format!("{axis} axis: {e}")))?;
    check_axis(path, &g, xs, lines, axis)?;
    Ok(g)
}

fn check_axis(path: &Path, g: &GridSpec1D, xs: &[f64], lines: &[usize], axis: &str) -> CliResult<()> {
    let tol = GRID_TOL * g.length();
    for (i, (x, l)) in xs.iter().zip(lines).enumerate() {
        if (x - g.point(i as isize)).abs() > tol {
            return Err(CliError::parse(
                path,
                *l,
                format!("{axis} = {x} breaks the uniform grid (expected {})", g.point(i as isize)),
            ));
        }
    }
    Ok(())
}

fn read_wavefunction(path: &Path, lines: std::str::Lines<'_>) -> CliResult<Wavefunction> {
    let t = parse_table(path, lines, 3)?;
    let xs: Vec<f64> = t.rows.iter().map(|r| r[0]).collect();
    let g = infer_grid(path, &xs, &t.lines, "x")?;
    let values = t.rows.iter().map(|r| Complex64::new(r[1], r[2])).collect();
    Wavefunction::new(g, values, 0.0).map_err(|e| CliError::parse(path, t.lines[0], e.to_string()))
}

fn square_side(path: &Path, t: &Table) -> CliResult<usize> {
    let len = t.rows.len();
    let n = (len as f64).sqrt().round() as usize;
    if n * n != len {
        return Err(CliError::parse(
            path,
            t.lines[len - 1],
            format!("{len} rows do not form a square table"),
        ));
    }
    Ok(n)
}

fn read_density(path: &Path, lines: std::str::Lines<'_>) -> CliResult<DensityMatrix> {
    let t = parse_table(path, lines, 4)?;
    let n = square_side(path, &t)?;
    let xs: Vec<f64> = (0..n).map(|i| t.rows[i * n][0]).collect();
    let row_lines: Vec<usize> = (0..n).map(|i| t.lines[i * n]).collect();
    let g = infer_grid(path, &xs, &row_lines, "x")?;
    for i in 0..n {
        let xi: Vec<f64> = (0..n).map(|j| t.rows[i * n + j][0]).collect();
        let xpj: Vec<f64> = (0..n).map(|j| t.rows[i * n + j][1]).collect();
        let block = &t.lines[i * n..(i + 1) * n];
        check_axis(path, &g, &xpj, block, "xprime")?;
        if let Some(j) = xi.iter().position(|x| *x != xi[0]) {
            return Err(CliError::parse(path, block[j], "x changes inside a row block"));
        }
    }
    let values = Array2::from_shape_fn((n, n), |(i, j)| {
        let r = &t.rows[i * n + j];
        Complex64::new(r[2], r[3])
    });
    DensityMatrix::new(g, values, 0.0).map_err(|e| CliError::parse(path, t.lines[0], e.to_string()))
}

fn read_wigner(path: &Path, lines: std::str::Lines<'_>) -> CliResult<WignerFunction> {
    let t = parse_table(path, lines, 3)?;
    let x0 = t.rows[0][0];
    let np = t.rows.iter().take_while(|r| r[0] == x0).count();
    if t.rows.len() % np != 0 {
        return Err(CliError::parse(
            path,
            t.lines[t.rows.len() - 1],
            format!("{} rows are not a multiple of the {np} momenta per position", t.rows.len()),
        ));
    }
    let nx = t.rows.len() / np;
    let xs: Vec<f64> = (0..nx).map(|j| t.rows[j * np][0]).collect();
    let x_lines: Vec<usize> = (0..nx).map(|j| t.lines[j * np]).collect();
    let xg = infer_grid(path, &xs, &x_lines, "X")?;
    let pg = PhaseGridSpec::for_position(xg);
    if pg.p_grid.n_points() != np {
        return Err(CliError::parse(
            path,
            t.lines[0],
            format!("{np} momenta per position, the dual grid needs {}", pg.p_grid.n_points()),
        ));
    }
    for j in 0..nx {
        let ps: Vec<f64> = (0..np).map(|k| t.rows[j * np + k][1]).collect();
        check_axis(path, &pg.p_grid, &ps, &t.lines[j * np..(j + 1) * np], "P")?;
        if let Some(k) = (0..np).find(|k| t.rows[j * np + k][0] != xs[j]) {
            return Err(CliError::parse(path, t.lines[j * np + k], "X changes inside a row block"));
        }
    }
    let values = Array2::from_shape_fn((nx, np), |(j, k)| t.rows[j * np + k][2]);
    WignerFunction::new(pg, values, 0.0).map_err(|e| CliError::parse(path, t.lines[0], e.to_string()))
}

/// Reads a wavefunction, density or Wigner file, dispatching on the
/// header line.
pub fn read_state(path: &Path) -> CliResult<StateFile> {
    let bytes = fs::read(path).map_err(|e| CliError::parse(path, 0, format!("cannot read input: {e}")))?;
    let text = String::from_utf8(bytes).map_err(|_| CliError::parse(path, 1, "input is not UTF-8 text"))?;
    let mut lines = text.lines();
    let header = match lines.next() {
        Some(h) => h.trim(),
        None => return Err(CliError::parse(path, 1, "empty file, expected a `# moyal-phase` header")),
    };
    match header {
        WAVEFUNCTION_HEADER => read_wavefunction(path, lines).map(StateFile::Wavefunction),
        DENSITY_HEADER => read_density(path, lines).map(StateFile::Density),
        WIGNER_HEADER => read_wigner(path, lines).map(StateFile::Wigner),
        CHARACTERISTIC_HEADER | MARGINAL_HEADER => Err(CliError::parse(
            path,
            1,
            format!("`{header}` files are outputs only and cannot be read back"),
        )),
        h if h.starts_with(PREFIX) => Err(CliError::parse(path, 1, format!("unsupported format or version `{h}`"))),
        h => Err(CliError::parse(path, 1, format!("missing `# moyal-phase` header, found `{h}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use moyal_core::transforms::{density_from_wavefunction, wigner_from_wavefunction};
    use moyal_core::{make_cat, make_gaussian};

    fn roundtrip(text: &str) -> CliResult<StateFile> {
        let dir = std::env::temp_dir().join(format!("moyal-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join(format!("{:x}.csv", text.len() ^ text.as_ptr() as usize));
        fs::write(&p, text).unwrap();
        let r = read_state(&p);
        fs::remove_file(&p).ok();
        r
    }

    #[test]
    fn seventeen_digits() {
        let mut s = String::new();
        num(&mut s, 0.1);
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn snap_recovers_round_bounds() {
        let g = GridSpec1D::new(256, -10.0, 10.0).unwrap();
        let last = g.point(255);
        let dx = (last - g.x_min()) / 255.0;
        assert_eq!(snap(g.x_min() + 256.0 * dx), 10.0);
        assert_eq!(snap(std::f64::consts::PI), std::f64::consts::PI);
    }

    #[test]
    fn wavefunction_round_trip_is_exact() {
        let g = GridSpec1D::new(64, -8.0, 8.0).unwrap();
        let psi = make_gaussian(&g, 0.3, 1.1, 1.2).unwrap();
        let text = format_wavefunction(&psi);
        assert_eq!(text.lines().count(), 65);
        match roundtrip(&text).unwrap() {
            StateFile::Wavefunction(back) => {
                assert!(back.grid().same_as(&g));
                assert_eq!(back.values(), psi.values());
                assert_eq!(format_wavefunction(&back), text);
            }
            other => panic!("read back a {}", other.kind()),
        }
    }

    #[test]
    fn density_and_wigner_round_trips() {
        let g = GridSpec1D::new(64, -8.0, 8.0).unwrap();
        let psi = make_cat(&g, 2.0, 1.2).unwrap();
        let rho = density_from_wavefunction(&psi);
        let text = format_density(&rho);
        match roundtrip(&text).unwrap() {
            StateFile::Density(back) => assert_eq!(back.values(), rho.values()),
            other => panic!("read back a {}", other.kind()),
        }
        let f = wigner_from_wavefunction(&psi, &PhaseGridSpec::for_position(g)).unwrap();
        let text = format_wigner(&f);
        match roundtrip(&text).unwrap() {
            StateFile::Wigner(back) => assert_eq!(back.values(), f.values()),
            other => panic!("read back a {}", other.kind()),
        }
    }

    #[test]
    fn malformed_inputs_name_the_line() {
        let err = roundtrip("").unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("line 1"));

        let err = roundtrip("# moyal-phase wavefunction v2\n").unwrap_err();
        assert!(err.to_string().contains("v2"));

        let text = format!("{WAVEFUNCTION_HEADER}\n0,1,0\n1,1\n");
        let err = roundtrip(&text).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");

        let text = format!("{WAVEFUNCTION_HEADER}\n0,1,0\n1,abc,0\n");
        assert!(roundtrip(&text).unwrap_err().to_string().contains("abc"));

        let mut text = String::from(WAVEFUNCTION_HEADER);
        text.push('\n');
        for x in [0.0, 1.0, 2.0, 3.0, 4.0, 5.5, 6.0, 7.0] {
            text.push_str(&format!("{x},0,0\n"));
        }
        let err = roundtrip(&text).unwrap_err();
        assert!(err.to_string().contains("line 7"), "{err}");
    }
}
