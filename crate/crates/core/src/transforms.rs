//! Interconversions among the wavefunction, the density matrix, the
//! Wigner function and Moyal's characteristic function.
//!
//! Conventions (with `hbar = 1`):
//!
//! ```text
//! M(tau, theta) = int psi*(x - tau/2) exp(i theta x) psi(x + tau/2) dx
//! F(X, P)       = (2 pi)^-2 int int M(tau, theta) exp(-i (tau P + theta X)) dtau dtheta
//!               = (2 pi)^-1 int psi*(X - tau/2) exp(-i P tau) psi(X + tau/2) dtau
//! M(tau, theta) = int int F(X, P) exp(i (tau P + theta X)) dX dP
//! ```
//!
//! so that `P` is the mean momentum and `<P> = <p>`. The separation `tau`
//! runs over even multiples of `dx`, which keeps `X +- tau/2` on the
//! position lattice, and samples outside the box are treated as zero.
//!
//! On an `n`-point position grid of length `L` the discrete objects are
//! sampled on:
//!
//! | quantity | grid                                   | spacing     |
//! |----------|----------------------------------------|-------------|
//! | `X`      | the position grid                      | `dx`        |
//! | `P`      | [`GridSpec1D::momentum_dual`]          | `pi / L`    |
//! | `tau`    | [`GridSpec1D::tau_dual`]               | `2 dx`      |
//! | `theta`  | [`GridSpec1D::theta_dual`]             | `2 pi / L`  |
//!
//! Each pair of routes between these objects is an exact discrete Fourier
//! pair, so compositions agree to rounding.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{transposed, Plan};
use crate::grid::{signed_index, GridSpec1D, PhaseGridSpec};
use crate::state::Wavefunction;

/// Largest imaginary residue tolerated when a transform should be real.
pub const REALNESS_TOL: f64 = 1e-10;
/// Hermiticity tolerance for characteristic functions.
pub const CHARACTERISTIC_HERMITICITY_TOL: f64 = 1e-9;
/// Hermiticity tolerance for density matrices.
pub const DENSITY_HERMITICITY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Moyal's characteristic function on the `(tau, theta)` dual lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicFunction {
    x_grid: GridSpec1D,
    tau_grid: GridSpec1D,
    theta_grid: GridSpec1D,
    values: Array2<Complex64>,
    time: f64,
}

impl CharacteristicFunction {
    /// Wraps samples indexed `[tau, theta]`. Fails unless
    /// `M(-tau, -theta) = conj M(tau, theta)` on every index pair that has a
    /// mirror image on the lattice.
    pub fn new(x_grid: GridSpec1D, values: Array2<Complex64>, time: f64) -> Result<Self> {
        let n = x_grid.n_points();
        if values.dim() != (n, n) {
            return Err(Error::GridMismatch(format!(
                "characteristic samples are {:?}, expected ({n}, {n})",
                values.dim()
            )));
        }
        let cf = Self {
            x_grid,
            tau_grid: x_grid.tau_dual(),
            theta_grid: x_grid.theta_dual(),
            values,
            time,
        };
        let r = cf.hermiticity_residual();
        if r > CHARACTERISTIC_HERMITICITY_TOL {
            return Err(Error::NonHermitianInput {
                residual: r,
                tolerance: CHARACTERISTIC_HERMITICITY_TOL,
            });
        }
        Ok(cf)
    }

    pub fn x_grid(&self) -> &GridSpec1D {
        &self.x_grid
    }

    pub fn tau_grid(&self) -> &GridSpec1D {
        &self.tau_grid
    }

    pub fn theta_grid(&self) -> &GridSpec1D {
        &self.theta_grid
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// `max |M(-tau,-theta) - conj M(tau,theta)|` over mirrored pairs,
    /// relative to the largest sample.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.values.nrows();
        let scale = peak(&self.values);
        if scale == 0.0 {
            return 0.0;
        }
        let worst = (1..n)
            .into_par_iter()
            .map(|m| {
                (1..n)
                    .map(|l| (self.values[[n - m, n - l]] - self.values[[m, l]].conj()).norm())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        worst / scale
    }

    /// Value at `tau = 0, theta = 0`.
    pub fn at_origin(&self) -> Complex64 {
        let c = self.values.nrows() / 2;
        self.values[[c, c]]
    }
}

/// Wigner function on a phase grid; rows are `X`, columns `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerFunction {
    phase_grid: PhaseGridSpec,
    values: Array2<f64>,
    time: f64,
}

impl WignerFunction {
    pub fn new(phase_grid: PhaseGridSpec, values: Array2<f64>, time: f64) -> Result<Self> {
        let shape = (phase_grid.x_grid.n_points(), phase_grid.p_grid.n_points());
        if values.dim() != shape {
            return Err(Error::GridMismatch(format!(
                "wigner samples are {:?}, expected {shape:?}",
                values.dim()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values", "non-finite Wigner sample"));
        }
        Ok(Self {
            phase_grid,
            values,
            time,
        })
    }

    pub fn zeros(phase_grid: PhaseGridSpec) -> Self {
        let shape = (phase_grid.x_grid.n_points(), phase_grid.p_grid.n_points());
        Self {
            phase_grid,
            values: Array2::zeros(shape),
            time: 0.0,
        }
    }

    pub fn phase_grid(&self) -> &PhaseGridSpec {
        &self.phase_grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// `sum F dX dP`
    pub fn integral(&self) -> f64 {
        self.values.sum() * self.phase_grid.cell()
    }

    /// Value at the sample nearest to `(x, p)`.
    pub fn nearest(&self, x: f64, p: f64) -> f64 {
        let idx = |g: &GridSpec1D, v: f64| {
            (((v - g.x_min()) / g.dx()).round().max(0.0) as usize).min(g.n_points() - 1)
        };
        self.values[[idx(&self.phase_grid.x_grid, x), idx(&self.phase_grid.p_grid, p)]]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `sqrt(sum F^2 dX dP)`
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.phase_grid.cell()).sqrt()
    }
}

/// Density matrix `rho(x_i, x_j)` on a position grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    grid: GridSpec1D,
    values: Array2<Complex64>,
    time: f64,
}

impl DensityMatrix {
    /// Fails with [`Error::NonHermitianInput`] unless the samples are
    /// Hermitian within [`DENSITY_HERMITICITY_TOL`] of the largest entry.
    pub fn new(grid: GridSpec1D, values: Array2<Complex64>, time: f64) -> Result<Self> {
        let n = grid.n_points();
        if values.dim() != (n, n) {
            return Err(Error::GridMismatch(format!(
                "density samples are {:?}, expected ({n}, {n})",
                values.dim()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid("values", "non-finite density sample"));
        }
        let rho = Self { grid, values, time };
        let r = rho.hermiticity_residual();
        if r > DENSITY_HERMITICITY_TOL {
            return Err(Error::NonHermitianInput {
                residual: r,
                tolerance: DENSITY_HERMITICITY_TOL,
            });
        }
        Ok(rho)
    }

    /// Wraps samples without the Hermiticity check.
    pub(crate) fn from_raw(grid: GridSpec1D, values: Array2<Complex64>, time: f64) -> Self {
        Self { grid, values, time }
    }

    pub fn grid(&self) -> &GridSpec1D {
        &self.grid
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<Complex64> {
        self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// `sum_i rho(x_i, x_i) dx`
    pub fn trace(&self) -> Complex64 {
        self.values.diag().sum() * self.grid.dx()
    }

    /// `max |rho - rho^dagger|` relative to the largest entry.
    pub fn hermiticity_residual(&self) -> f64 {
        let scale = peak(&self.values);
        if scale == 0.0 {
            return 0.0;
        }
        let n = self.values.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.values[[i, j]] - self.values[[j, i]].conj()).norm());
            }
        }
        worst / scale
    }

    /// Eigenvalues of the operator `rho dx`, in decreasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.values.nrows();
        let dx = self.grid.dx();
        let m = DMatrix::from_fn(n, n, |i, j| {
            // symmetrize so rounding noise cannot break the Hermitian solver
            0.5 * (self.values[[i, j]] + self.values[[j, i]].conj()) * dx
        });
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().cloned().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    /// Rebuilds the diagonal as a probability density `rho(x_i, x_i)`.
    pub fn diagonal(&self) -> Vec<f64> {
        self.values.diag().iter().map(|v| v.re).collect()
    }
}

/// Density matrix re-indexed by midpoint `X = (x + x')/2` and separation
/// `tau = x' - x`.
///
/// Row `s` is `X = x_min + s dx/2` for `s in 0..2n-1`, column `c` is
/// `tau = (c - (n-1)) dx`. Only entries with `s` and `c - (n-1)` of equal
/// parity and both endpoints inside the box carry data; the rest are zero
/// and reported as `None` by [`get`](Self::get).
#[derive(Debug, Clone, PartialEq)]
pub struct MidpointDensity {
    grid: GridSpec1D,
    values: Array2<Complex64>,
}

impl MidpointDensity {
    pub fn grid(&self) -> &GridSpec1D {
        &self.grid
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn x_at(&self, s: usize) -> f64 {
        self.grid.x_min() + s as f64 * 0.5 * self.grid.dx()
    }

    pub fn tau_at(&self, c: usize) -> f64 {
        (c as f64 - (self.grid.n_points() as f64 - 1.0)) * self.grid.dx()
    }

    /// Cartesian indices `(i, i')` behind midpoint cell `(s, c)`.
    pub fn cartesian_index(&self, s: usize, c: usize) -> Option<(usize, usize)> {
        let n = self.grid.n_points() as isize;
        let d = c as isize - (n - 1);
        let s = s as isize;
        if (s - d).rem_euclid(2) != 0 {
            return None;
        }
        let i = (s - d) / 2;
        let ip = (s + d) / 2;
        if i < 0 || ip < 0 || i >= n || ip >= n {
            None
        } else {
            Some((i as usize, ip as usize))
        }
    }

    pub fn get(&self, s: usize, c: usize) -> Option<Complex64> {
        self.cartesian_index(s, c).map(|_| self.values[[s, c]])
    }
}

/// `M(tau, theta)` on the full dual lattice of the wavefunction's grid.
pub fn characteristic_from_wavefunction(
    psi: &Wavefunction,
    tau_grid: &GridSpec1D,
    theta_grid: &GridSpec1D,
) -> Result<CharacteristicFunction> {
    let g = *psi.grid();
    if !tau_grid.same_as(&g.tau_dual()) || !theta_grid.same_as(&g.theta_dual()) {
        return Err(Error::GridMismatch(format!(
            "characteristic grids must be tau {} and theta {} for position grid {g}",
            g.tau_dual(),
            g.theta_dual()
        )));
    }
    psi.check_support()?;
    let n = g.n_points();
    let plan = Plan::new(n);
    // rows tau, columns x
    let mut m = shifted_products(psi, false);
    plan.centered_rows(&mut m, 1);
    let theta_phase = theta_phases(&g, 1.0);
    let dx = g.dx();
    m.axis_iter_mut(Axis(0)).into_par_iter().for_each(|mut row| {
        for (v, ph) in row.iter_mut().zip(&theta_phase) {
            *v *= ph * dx;
        }
    });
    CharacteristicFunction::new(g, m, psi.time())
}

/// `M(tau, theta)` at a single point. `tau` must be an even multiple of
/// the grid spacing; `theta` is arbitrary.
pub fn characteristic_at(psi: &Wavefunction, tau: f64, theta: f64) -> Result<Complex64> {
    let g = psi.grid();
    let half = tau / (2.0 * g.dx());
    let h = half.round();
    if (half - h).abs() > 1e-9 {
        return Err(Error::invalid(
            "tau",
            format!("{tau} is not an even multiple of dx = {}", g.dx()),
        ));
    }
    psi.check_support()?;
    let h = h as isize;
    let sum: Complex64 = (0..g.n_points() as isize)
        .map(|j| psi.at(j - h).conj() * psi.at(j + h) * Complex64::from_polar(1.0, theta * g.point(j)))
        .sum();
    Ok(sum * g.dx())
}

/// Inverse Fourier transform of `M` onto the phase grid of its position
/// grid.
pub fn wigner_from_characteristic(m: &CharacteristicFunction) -> Result<WignerFunction> {
    let r = m.hermiticity_residual();
    if r > CHARACTERISTIC_HERMITICITY_TOL {
        return Err(Error::NonHermitianInput {
            residual: r,
            tolerance: CHARACTERISTIC_HERMITICITY_TOL,
        });
    }
    let g = m.x_grid;
    let n = g.n_points();
    let plan = Plan::new(n);
    let theta_phase = theta_phases(&g, -1.0);
    let mut w = m.values.clone();
    w.axis_iter_mut(Axis(0)).into_par_iter().for_each(|mut row| {
        for (v, ph) in row.iter_mut().zip(&theta_phase) {
            *v *= ph;
        }
    });
    // theta -> X along rows, then tau -> P
    plan.centered_rows(&mut w, -1);
    let mut w = transposed(&w);
    plan.centered_rows(&mut w, -1);
    // dtau dtheta / (2 pi)^2 = 1 / (pi n)
    let scale = 1.0 / (PI * n as f64);
    w.mapv_inplace(|v| v * scale);
    let values = real_part(w)?;
    WignerFunction::new(PhaseGridSpec::for_position(g), values, m.time)
}

/// Fourier transform of `F` onto the `(tau, theta)` lattice.
pub fn characteristic_from_wigner(f: &WignerFunction) -> Result<CharacteristicFunction> {
    f.phase_grid.require_dual()?;
    let g = f.phase_grid.x_grid;
    let n = g.n_points();
    let plan = Plan::new(n);
    let mut m = f.values.mapv(|v| Complex64::new(v, 0.0));
    // P -> tau along rows, then X -> theta
    plan.centered_rows(&mut m, 1);
    let mut m = transposed(&m);
    plan.centered_rows(&mut m, 1);
    let theta_phase = theta_phases(&g, 1.0);
    // dX dP = pi / n
    let scale = PI / n as f64;
    m.axis_iter_mut(Axis(0)).into_par_iter().for_each(|mut row| {
        for (v, ph) in row.iter_mut().zip(&theta_phase) {
            *v *= ph * scale;
        }
    });
    CharacteristicFunction::new(g, m, f.time)
}

/// Direct Wigner transform: one spectral sum over `tau` per `X` row.
pub fn wigner_from_wavefunction(psi: &Wavefunction, phase_grid: &PhaseGridSpec) -> Result<WignerFunction> {
    require_phase_grid(psi.grid(), phase_grid)?;
    psi.check_support()?;
    let g = *psi.grid();
    let plan = Plan::new(g.n_points());
    // rows X, columns tau
    let mut w = shifted_products(psi, true);
    plan.centered_rows(&mut w, -1);
    let scale = g.dx() / PI;
    w.mapv_inplace(|v| v * scale);
    WignerFunction::new(*phase_grid, real_part(w)?, psi.time())
}

/// Pure-state density matrix `rho(x, x') = psi(x) psi*(x')`.
pub fn density_from_wavefunction(psi: &Wavefunction) -> DensityMatrix {
    let v = psi.values();
    let n = v.len();
    let values = Array2::from_shape_fn((n, n), |(i, j)| v[i] * v[j].conj());
    DensityMatrix::from_raw(*psi.grid(), values, psi.time())
}

/// Re-indexes `rho(x, x')` by `(X, tau)`. Exact: every midpoint cell is
/// the image of one cartesian cell.
pub fn midpoint_coords(rho: &DensityMatrix) -> MidpointDensity {
    let n = rho.grid.n_points();
    let mut values = Array2::from_elem((2 * n - 1, 2 * n - 1), ZERO);
    for i in 0..n {
        for ip in 0..n {
            let s = i + ip;
            let c = ip + n - 1 - i;
            values[[s, c]] = rho.values[[i, ip]];
        }
    }
    MidpointDensity {
        grid: rho.grid,
        values,
    }
}

/// Inverse of [`midpoint_coords`].
pub fn cartesian_from_midpoint(mid: &MidpointDensity) -> DensityMatrix {
    let n = mid.grid.n_points();
    let values = Array2::from_shape_fn((n, n), |(i, ip)| mid.values[[i + ip, ip + n - 1 - i]]);
    DensityMatrix::from_raw(mid.grid, values, 0.0)
}

/// `F(X, P) = (2 pi)^-1 int rho(X - tau/2, X + tau/2) exp(i P tau) dtau`,
/// which equals [`wigner_from_wavefunction`] for `rho = psi psi*`.
pub fn wigner_from_density(rho: &DensityMatrix, phase_grid: &PhaseGridSpec) -> Result<WignerFunction> {
    require_phase_grid(&rho.grid, phase_grid)?;
    let r = rho.hermiticity_residual();
    if r > DENSITY_HERMITICITY_TOL {
        return Err(Error::NonHermitianInput {
            residual: r,
            tolerance: DENSITY_HERMITICITY_TOL,
        });
    }
    let g = rho.grid;
    let n = g.n_points();
    let half = (n / 2) as isize;
    let plan = Plan::new(n);
    let mut w = Array2::from_elem((n, n), ZERO);
    w.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(j, mut row)| {
            let j = j as isize;
            for (m, v) in row.iter_mut().enumerate() {
                let s = m as isize - half;
                let (a, b) = (j - s, j + s);
                *v = if a < 0 || b < 0 || a >= n as isize || b >= n as isize {
                    ZERO
                } else {
                    rho.values[[a as usize, b as usize]]
                };
            }
        });
    plan.centered_rows(&mut w, 1);
    let scale = g.dx() / PI;
    w.mapv_inplace(|v| v * scale);
    WignerFunction::new(*phase_grid, real_part(w)?, rho.time)
}

/// `rho(X - tau/2, X + tau/2) = int F(X, P) exp(-i P tau) dP`, inverse of
/// [`wigner_from_density`].
///
/// Entries with `x + x'` on the position lattice come straight from the
/// inverse transform. The remaining entries sit at half-step midpoints
/// and use `F` shifted by `dx/2` along `X` through its trigonometric
/// interpolant.
pub fn rho_from_wigner(f: &WignerFunction) -> Result<DensityMatrix> {
    f.phase_grid.require_dual()?;
    let g = f.phase_grid.x_grid;
    let n = g.n_points();
    let dp = f.phase_grid.p_grid.dx();
    let plan = Plan::new(n);
    let half = (n / 2) as isize;

    // integer midpoints
    let mut even = f.values.mapv(|v| Complex64::new(v, 0.0));
    plan.centered_rows(&mut even, -1);

    // half-step midpoints: shift along X, then account for odd tau
    let mut odd = half_step_shift(&f.values, &plan);
    odd.axis_iter_mut(Axis(0)).into_par_iter().for_each(|mut row| {
        for (k, v) in row.iter_mut().enumerate() {
            *v *= Complex64::from_polar(1.0, -PI * (k as f64 - half as f64) / n as f64);
        }
    });
    plan.centered_rows(&mut odd, -1);

    let mut values = Array2::from_elem((n, n), ZERO);
    for i in 0..n as isize {
        for ip in 0..n as isize {
            let s = i + ip;
            let d = ip - i;
            let v = if s % 2 == 0 {
                let j = s / 2;
                let m = d / 2 + half;
                if m < 0 || m >= n as isize {
                    continue;
                }
                even[[j as usize, m as usize]]
            } else {
                // X = x_j + dx/2, tau = (2q + 1) dx
                let j = (s - 1) / 2;
                let q = (d - 1).div_euclid(2);
                let m = q + half;
                if m < 0 || m >= n as isize {
                    continue;
                }
                odd[[j as usize, m as usize]]
            };
            values[[i as usize, ip as usize]] = v * dp;
        }
    }
    Ok(DensityMatrix::from_raw(g, values, f.time))
}

/// `int F dP` as a function of `X`.
pub fn position_marginal(f: &WignerFunction) -> Vec<f64> {
    let dp = f.phase_grid.p_grid.dx();
    f.values.rows().into_iter().map(|r| r.sum() * dp).collect()
}

/// `int F dX` as a function of `P`.
pub fn momentum_marginal(f: &WignerFunction) -> Vec<f64> {
    let dx = f.phase_grid.x_grid.dx();
    f.values.columns().into_iter().map(|c| c.sum() * dx).collect()
}

/// Products `psi*(x_j - s dx) psi(x_j + s dx)` for `s = m - n/2`. With
/// `x_rows` the matrix is indexed `[j, m]`, otherwise `[m, j]`.
fn shifted_products(psi: &Wavefunction, x_rows: bool) -> Array2<Complex64> {
    let n = psi.grid().n_points();
    let half = (n / 2) as isize;
    let mut out = Array2::from_elem((n, n), ZERO);
    out.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(r, mut row)| {
            let r = r as isize;
            for (c, v) in row.iter_mut().enumerate() {
                let c = c as isize;
                let (j, s) = if x_rows { (r, c - half) } else { (c, r - half) };
                *v = psi.at(j - s).conj() * psi.at(j + s);
            }
        });
    out
}

/// `exp(sign * i * theta_l * x_c)` where `x_c` is the grid's middle sample.
fn theta_phases(g: &GridSpec1D, sign: f64) -> Vec<Complex64> {
    let xc = g.center();
    g.theta_dual()
        .points()
        .into_iter()
        .map(|t| Complex64::from_polar(1.0, sign * t * xc))
        .collect()
}

/// `F(X + dx/2, P)` by spectral interpolation along `X`; the Nyquist mode
/// is dropped so the result stays real.
fn half_step_shift(values: &Array2<f64>, plan: &Plan) -> Array2<Complex64> {
    let n = plan.len;
    let mut t = transposed(&values.mapv(|v| Complex64::new(v, 0.0)));
    plan.forward_rows(&mut t);
    let phase: Vec<Complex64> = (0..n)
        .map(|q| {
            if q == n / 2 {
                ZERO
            } else {
                Complex64::from_polar(1.0 / n as f64, PI * signed_index(q, n) as f64 / n as f64)
            }
        })
        .collect();
    t.axis_iter_mut(Axis(0)).into_par_iter().for_each(|mut row| {
        for (v, ph) in row.iter_mut().zip(&phase) {
            *v *= ph;
        }
    });
    plan.inverse_rows(&mut t);
    transposed(&t)
}

fn require_phase_grid(x: &GridSpec1D, phase_grid: &PhaseGridSpec) -> Result<()> {
    if !phase_grid.x_grid.same_as(x) {
        return Err(Error::GridMismatch(format!(
            "phase grid positions {} differ from state grid {x}",
            phase_grid.x_grid
        )));
    }
    phase_grid.require_dual()
}

fn peak(m: &Array2<Complex64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Real part after checking the imaginary residue.
fn real_part(m: Array2<Complex64>) -> Result<Array2<f64>> {
    let scale = m.iter().map(|v| v.re.abs()).fold(1.0, f64::max);
    let residue = m.iter().map(|v| v.im.abs()).fold(0.0, f64::max) / scale;
    if residue > REALNESS_TOL {
        return Err(Error::NonHermitianInput {
            residual: residue,
            tolerance: REALNESS_TOL,
        });
    }
    Ok(m.mapv(|v| v.re))
}
