//! Time evolution in three independent representations.
//!
//! * [`evolve_moyal`] integrates the phase-space equation
//!   `dF/dt + (P/m) dF/dX = int K(X, P - P') F(X, P') dP'` directly on the
//!   Wigner grid.
//! * [`evolve_density`] integrates the Liouville equation
//!   `i drho/dt + (1/2m)(d_x^2 - d_x'^2) rho = [V(x) - V(x')] rho`.
//! * [`schrodinger_oracle`] is a split-step spectral solver for `psi`.
//!
//! The collision kernel is `K = (i / 2 pi) J` with
//! `J(X, q) = int [V(X - y/2) - V(X + y/2)] exp(-i q y) dy`. In the mixed
//! `(X, tau)` representation, reached by a Fourier transform over `P`, the
//! collision step is diagonal: the samples behind `F` pick up the phase
//! `exp(i [V(X - tau/2) - V(X + tau/2)] dt)`.
//!
//! The Moyal and density engines use the Strang ordering
//! kinetic/2, potential, kinetic/2. The oracle uses the other Strang
//! ordering, potential/2, kinetic, potential/2, so its splitting error is
//! independent of theirs.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, Axis, Zip};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{transposed, Plan};
use crate::grid::{signed_index, GridSpec1D, PhaseGridSpec};
use crate::potential::PotentialSpec;
use crate::state::Wavefunction;
use crate::transforms::{
    density_from_wavefunction, wigner_from_density, wigner_from_wavefunction, DensityMatrix, WignerFunction,
    DENSITY_HERMITICITY_TOL,
};

/// Relative growth of the L2 norm over one step that counts as unstable.
pub const GROWTH_TOL: f64 = 1e-6;
/// Largest imaginary residue tolerated in `F` after a Moyal step.
pub const MOYAL_REALNESS_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Moyal,
    DensityLiouville,
    SchrodingerOracle,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "moyal" => Ok(Method::Moyal),
            "density_liouville" | "density" => Ok(Method::DensityLiouville),
            "schrodinger_oracle" | "schrodinger" | "oracle" => Ok(Method::SchrodingerOracle),
            other => Err(Error::invalid(
                "method",
                format!("unknown method `{other}` (moyal, density_liouville, schrodinger_oracle)"),
            )),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Moyal => "moyal",
            Method::DensityLiouville => "density_liouville",
            Method::SchrodingerOracle => "schrodinger_oracle",
        })
    }
}

/// Step size, step count and mass for one evolution. `n_steps = 0` is the
/// identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub mass: f64,
    pub method: Method,
}

impl EvolutionConfig {
    pub fn new(dt: f64, n_steps: usize, method: Method) -> Self {
        Self {
            dt,
            n_steps,
            mass: 1.0,
            method,
        }
    }

    /// Splits `total` into steps no longer than `dt_max`.
    pub fn for_duration(total: f64, dt_max: f64, method: Method) -> Self {
        let n = (total / dt_max).round().max(1.0) as usize;
        Self::new(total / n as f64, n, method)
    }

    pub fn total_time(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::invalid("mass", format!("must be positive, got {}", self.mass)));
        }
        Ok(())
    }

    /// Fails with [`Error::UnstableStep`] at step 0 when `dt` exceeds
    /// [`stability_bound`].
    pub fn check_stable(&self, grid: &GridSpec1D, v: &PotentialSpec) -> Result<()> {
        self.validate()?;
        let bound = stability_bound(grid, v);
        if self.dt > bound {
            return Err(Error::UnstableStep {
                step: 0,
                reason: format!("dt = {} exceeds the stability bound {bound:.3e} for this grid and potential", self.dt),
            });
        }
        Ok(())
    }
}

/// Largest step for which the potential phase `(V_max - V_min) dt` stays
/// below `pi` over the box. The kinetic factors are exact and impose no
/// bound.
pub fn stability_bound(grid: &GridSpec1D, v: &PotentialSpec) -> f64 {
    let spread = v.spread(grid);
    if spread > 0.0 {
        PI / spread
    } else {
        f64::INFINITY
    }
}

/// `K(X, q) = (i / 2 pi) J(X, q)` sampled at `q = r dP`,
/// `r in [-n/2, n/2)`. Rows are `X`, column `c` is `r = c - n/2`. Real
/// and odd in `q` for real potentials.
#[derive(Debug, Clone, PartialEq)]
pub struct MoyalKernel {
    potential: PotentialSpec,
    phase_grid: PhaseGridSpec,
    values: Array2<Complex64>,
}

impl MoyalKernel {
    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn phase_grid(&self) -> &PhaseGridSpec {
        &self.phase_grid
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    /// `max |K(X, -q) + conj K(X, q)|` over mirrored columns.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.values.ncols();
        let mut worst = 0.0f64;
        for row in self.values.rows() {
            for c in 1..n {
                worst = worst.max((row[n - c] + row[c].conj()).norm());
            }
        }
        worst
    }

    /// Collision rate `dP sum_k' K(X, P_k - P_k') F(X, P_k')`, evaluated as
    /// a direct circular convolution over `P`.
    pub fn apply(&self, f: &WignerFunction) -> Result<Array2<f64>> {
        if !f.phase_grid().x_grid.same_as(&self.phase_grid.x_grid) || !f.phase_grid().p_grid.same_as(&self.phase_grid.p_grid) {
            return Err(Error::GridMismatch("kernel and Wigner function live on different grids".into()));
        }
        let n = self.values.ncols();
        let half = n / 2;
        let dp = self.phase_grid.p_grid.dx();
        let fv = f.values();
        let mut out = Array2::zeros((fv.nrows(), n));
        out.axis_iter_mut(Axis(0))
            .into_par_iter()
            .enumerate()
            .for_each(|(j, mut row)| {
                let k_row = self.values.row(j);
                let f_row = fv.row(j);
                for k in 0..n {
                    let mut acc = 0.0;
                    for kp in 0..n {
                        let c = (k + n - kp + half) % n;
                        acc += k_row[c].re * f_row[kp];
                    }
                    row[k] = acc * dp;
                }
            });
        Ok(out)
    }
}

/// Tabulates the collision kernel on the momentum grid of `phase_grid`.
pub fn build_moyal_kernel(v: &PotentialSpec, phase_grid: &PhaseGridSpec) -> Result<MoyalKernel> {
    let g = phase_grid.x_grid;
    v.validate_for(&g)?;
    phase_grid.require_dual()?;
    let n = g.n_points();
    let plan = Plan::new(n);
    let diff = potential_difference(v, &g);
    if diff.iter().any(|d| !d.is_finite()) {
        return Err(Error::invalid("potential", "non-finite potential sample on the doubled support"));
    }
    // J(X, r dP) = sum_m' 2 dx D(X, m') exp(-2 pi i r m' / n)
    let mut values = diff.mapv(|d| Complex64::new(2.0 * g.dx() * d, 0.0));
    plan.centered_rows(&mut values, -1);
    let pref = Complex64::new(0.0, 1.0 / (2.0 * PI));
    values.mapv_inplace(|j| pref * j);
    Ok(MoyalKernel {
        potential: v.clone(),
        phase_grid: *phase_grid,
        values,
    })
}

/// `D(X_j, m') = V(x_{j-m'}) - V(x_{j+m'})` for `m' = m - n/2`, with the
/// unpaired column `m' = -n/2` set to zero.
fn potential_difference(v: &PotentialSpec, g: &GridSpec1D) -> Array2<f64> {
    let n = g.n_points();
    let half = (n / 2) as isize;
    Array2::from_shape_fn((n, n), |(j, m)| {
        if m == 0 {
            return 0.0;
        }
        let s = m as isize - half;
        let j = j as isize;
        v.at_index(g, j - s) - v.at_index(g, j + s)
    })
}

/// Strang integrator for the phase-space equation.
pub struct MoyalPropagator {
    phase_grid: PhaseGridSpec,
    plan: Plan,
    /// `[P_k, q]`: streaming phase for a half step.
    stream: Array2<Complex64>,
    /// `[X_j, m]`: collision phase for a full step.
    collide: Array2<Complex64>,
}

impl MoyalPropagator {
    pub fn new(v: &PotentialSpec, phase_grid: &PhaseGridSpec, cfg: &EvolutionConfig) -> Result<Self> {
        let g = phase_grid.x_grid;
        v.validate_for(&g)?;
        phase_grid.require_dual()?;
        cfg.check_stable(&g, v)?;
        let n = g.n_points();
        let kappa = g.fft_wavenumbers();
        let ps = phase_grid.p_grid.points();
        let h = 0.5 * cfg.dt / cfg.mass;
        let stream = Array2::from_shape_fn((n, n), |(k, q)| {
            let arg = -kappa[q] * ps[k] * h;
            if q == n / 2 {
                // Nyquist mode: keep the real part so F stays real
                Complex64::new(arg.cos(), 0.0)
            } else {
                Complex64::from_polar(1.0, arg)
            }
        });
        let collide = potential_difference(v, &g).mapv(|d| Complex64::from_polar(1.0, d * cfg.dt));
        Ok(Self {
            phase_grid: *phase_grid,
            plan: Plan::new(n),
            stream,
            collide,
        })
    }

    /// Free streaming `F(X, P) <- F(X - P dt / 2m, P)` on the transposed
    /// buffer `[P, X]`.
    fn stream_half(&self, ft: &mut Array2<Complex64>) {
        let n = self.plan.len as f64;
        self.plan.forward_rows(ft);
        Zip::from(&mut *ft).and(&self.stream).par_for_each(|v, ph| *v *= ph / n);
        self.plan.inverse_rows(ft);
    }

    /// Collision step on the buffer `[X, P]`.
    fn collide(&self, f: &mut Array2<Complex64>) {
        let n = self.plan.len as f64;
        self.plan.centered_rows(f, 1);
        Zip::from(&mut *f).and(&self.collide).par_for_each(|v, ph| *v *= ph / n);
        self.plan.centered_rows(f, -1);
    }

    /// One Strang step on a `[X, P]` buffer.
    pub(crate) fn step(&self, f: &mut Array2<Complex64>) {
        let mut ft = transposed(f);
        self.stream_half(&mut ft);
        *f = transposed(&ft);
        self.collide(f);
        let mut ft = transposed(f);
        self.stream_half(&mut ft);
        *f = transposed(&ft);
    }

    pub fn run(&self, f0: &WignerFunction, cfg: &EvolutionConfig) -> Result<WignerFunction> {
        if !f0.phase_grid().x_grid.same_as(&self.phase_grid.x_grid) || !f0.phase_grid().p_grid.same_as(&self.phase_grid.p_grid) {
            return Err(Error::GridMismatch("initial Wigner function is on a different grid".into()));
        }
        let mut f = f0.values().mapv(|v| Complex64::new(v, 0.0));
        let mut norm = l2(&f);
        for step in 0..cfg.n_steps {
            self.step(&mut f);
            norm = check_growth(norm, l2(&f), step)?;
            let scale = f.iter().map(|v| v.re.abs()).fold(1.0, f64::max);
            let residue = f.iter().map(|v| v.im.abs()).fold(0.0, f64::max) / scale;
            if residue > MOYAL_REALNESS_TOL {
                return Err(Error::UnstableStep {
                    step,
                    reason: format!("imaginary residue {residue:.3e} in F"),
                });
            }
            f.mapv_inplace(|v| Complex64::new(v.re, 0.0));
        }
        WignerFunction::new(self.phase_grid, f.mapv(|v| v.re), f0.time() + cfg.total_time())
    }
}

/// Evolves a Wigner function with the phase-space equation.
pub fn evolve_moyal(f0: &WignerFunction, v: &PotentialSpec, cfg: &EvolutionConfig) -> Result<WignerFunction> {
    MoyalPropagator::new(v, f0.phase_grid(), cfg)?.run(f0, cfg)
}

/// Strang integrator for the density-matrix Liouville equation.
pub struct DensityPropagator {
    grid: GridSpec1D,
    plan: Plan,
    /// `exp(-i k^2 dt / 4m)`
    kin: Vec<Complex64>,
    /// `[i, i']`: `exp(-i [V_i - V_i'] dt)`
    pot: Array2<Complex64>,
}

impl DensityPropagator {
    pub fn new(v: &PotentialSpec, grid: &GridSpec1D, cfg: &EvolutionConfig) -> Result<Self> {
        v.validate_for(grid)?;
        cfg.check_stable(grid, v)?;
        let n = grid.n_points();
        let kin = grid
            .fft_wavenumbers()
            .into_iter()
            .map(|k| Complex64::from_polar(1.0, -k * k * cfg.dt / (4.0 * cfg.mass)))
            .collect();
        let vs = v.sample(grid);
        let pot = Array2::from_shape_fn((n, n), |(i, j)| Complex64::from_polar(1.0, -(vs[i] - vs[j]) * cfg.dt));
        Ok(Self {
            grid: *grid,
            plan: Plan::new(n),
            kin,
            pot,
        })
    }

    /// Applies `phase` (or its conjugate) along each row.
    fn along_rows(&self, m: &mut Array2<Complex64>, conj: bool) {
        let n = self.plan.len as f64;
        self.plan.forward_rows(m);
        m.axis_iter_mut(Axis(0)).into_par_iter().for_each(|mut row| {
            for (v, ph) in row.iter_mut().zip(&self.kin) {
                *v *= if conj { ph.conj() } else { *ph } / n;
            }
        });
        self.plan.inverse_rows(m);
    }

    fn kinetic_half(&self, rho: &mut Array2<Complex64>) {
        // x' index (columns) evolves with the conjugate phase
        self.along_rows(rho, true);
        let mut t = transposed(rho);
        self.along_rows(&mut t, false);
        *rho = transposed(&t);
    }

    pub(crate) fn step(&self, rho: &mut Array2<Complex64>) {
        self.kinetic_half(rho);
        Zip::from(&mut *rho).and(&self.pot).par_for_each(|v, ph| *v *= ph);
        self.kinetic_half(rho);
    }

    pub fn run(&self, rho0: &DensityMatrix, cfg: &EvolutionConfig) -> Result<DensityMatrix> {
        if !rho0.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch("initial density matrix is on a different grid".into()));
        }
        let r = rho0.hermiticity_residual();
        if r > DENSITY_HERMITICITY_TOL {
            return Err(Error::NonHermitianInput {
                residual: r,
                tolerance: DENSITY_HERMITICITY_TOL,
            });
        }
        let mut rho = rho0.values().clone();
        let mut norm = l2(&rho);
        for step in 0..cfg.n_steps {
            self.step(&mut rho);
            norm = check_growth(norm, l2(&rho), step)?;
        }
        Ok(DensityMatrix::from_raw(self.grid, rho, rho0.time() + cfg.total_time()))
    }
}

/// Evolves a density matrix with the Liouville equation.
pub fn evolve_density(rho0: &DensityMatrix, v: &PotentialSpec, cfg: &EvolutionConfig) -> Result<DensityMatrix> {
    DensityPropagator::new(v, rho0.grid(), cfg)?.run(rho0, cfg)
}

/// Split-step spectral solver for `i dpsi/dt = (p^2/2m + V) psi`.
pub fn schrodinger_oracle(psi0: &Wavefunction, v: &PotentialSpec, cfg: &EvolutionConfig) -> Result<Wavefunction> {
    let g = *psi0.grid();
    v.validate_for(&g)?;
    cfg.check_stable(&g, v)?;
    let n = g.n_points();
    let plan = Plan::new(n);
    let half_pot: Vec<Complex64> = v
        .sample(&g)
        .into_iter()
        .map(|vi| Complex64::from_polar(1.0, -0.5 * vi * cfg.dt))
        .collect();
    let kin: Vec<Complex64> = g
        .fft_wavenumbers()
        .into_iter()
        .map(|k| Complex64::from_polar(1.0 / n as f64, -k * k * cfg.dt / (2.0 * cfg.mass)))
        .collect();
    let mut psi = psi0.values().to_vec();
    let mut norm = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for step in 0..cfg.n_steps {
        psi.iter_mut().zip(&half_pot).for_each(|(a, b)| *a *= b);
        plan.forward(&mut psi);
        psi.iter_mut().zip(&kin).for_each(|(a, b)| *a *= b);
        plan.inverse(&mut psi);
        psi.iter_mut().zip(&half_pot).for_each(|(a, b)| *a *= b);
        let next = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        norm = check_growth(norm, next, step)?;
    }
    Ok(Wavefunction::new(g, psi, psi0.time() + cfg.total_time())?)
}

/// Maximum and L2 difference between two Wigner functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discrepancy {
    pub linf: f64,
    pub l2: f64,
}

impl Discrepancy {
    pub fn between(a: &WignerFunction, b: &WignerFunction) -> Self {
        let cell = a.phase_grid().cell();
        let mut linf = 0.0f64;
        let mut sq = 0.0;
        for (u, v) in a.values().iter().zip(b.values()) {
            let d = (u - v).abs();
            linf = linf.max(d);
            sq += d * d;
        }
        Self {
            linf,
            l2: (sq * cell).sqrt(),
        }
    }
}

/// Final Wigner functions of the three engines and their pairwise
/// differences.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub moyal: WignerFunction,
    pub density: WignerFunction,
    pub oracle: WignerFunction,
    pub moyal_vs_density: Discrepancy,
    pub moyal_vs_oracle: Discrepancy,
    pub density_vs_oracle: Discrepancy,
}

impl ComparisonReport {
    pub fn pairs(&self) -> [(&'static str, Discrepancy); 3] {
        [
            ("moyal_vs_density", self.moyal_vs_density),
            ("moyal_vs_oracle", self.moyal_vs_oracle),
            ("density_vs_oracle", self.density_vs_oracle),
        ]
    }

    pub fn max_linf(&self) -> f64 {
        self.pairs().iter().map(|(_, d)| d.linf).fold(0.0, f64::max)
    }
}

/// Runs all three engines from the same pure state. The `method` field
/// of `cfg` is ignored.
pub fn compare_evolutions(psi0: &Wavefunction, v: &PotentialSpec, cfg: &EvolutionConfig) -> Result<ComparisonReport> {
    let g = *psi0.grid();
    let pg = PhaseGridSpec::for_position(g);
    cfg.check_stable(&g, v)?;
    let f0 = wigner_from_wavefunction(psi0, &pg)?;
    let rho0 = density_from_wavefunction(psi0);

    let (moyal, (density, oracle)) = rayon::join(
        || evolve_moyal(&f0, v, cfg),
        || {
            rayon::join(
                || evolve_density(&rho0, v, cfg).and_then(|r| wigner_from_density(&r, &pg)),
                || schrodinger_oracle(psi0, v, cfg).and_then(|p| wigner_from_wavefunction(&p, &pg)),
            )
        },
    );
    let (moyal, density, oracle) = (moyal?, density?, oracle?);
    Ok(ComparisonReport {
        moyal_vs_density: Discrepancy::between(&moyal, &density),
        moyal_vs_oracle: Discrepancy::between(&moyal, &oracle),
        density_vs_oracle: Discrepancy::between(&density, &oracle),
        moyal,
        density,
        oracle,
    })
}

fn l2(m: &Array2<Complex64>) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn check_growth(before: f64, after: f64, step: usize) -> Result<f64> {
    if !after.is_finite() || (before > 0.0 && after > before * (1.0 + GROWTH_TOL)) {
        return Err(Error::UnstableStep {
            step,
            reason: format!("norm grew from {before:.6e} to {after:.6e}"),
        });
    }
    Ok(after)
}

/// Spectral derivative `dF/dP` along each row, used as an independent
/// check of the kernel.
pub fn momentum_derivative(f: &WignerFunction) -> Array2<f64> {
    let pg = f.phase_grid();
    let n = pg.p_grid.n_points();
    let plan = Plan::new(n);
    let dk = 2.0 * PI / pg.p_grid.length();
    let mut m = f.values().mapv(|v| Complex64::new(v, 0.0));
    plan.forward_rows(&mut m);
    m.axis_iter_mut(Axis(0)).into_par_iter().for_each(|mut row| {
        for (q, v) in row.iter_mut().enumerate() {
            *v *= if q == n / 2 {
                ZERO
            } else {
                Complex64::new(0.0, signed_index(q, n) as f64 * dk / n as f64)
            };
        }
    });
    plan.inverse_rows(&mut m);
    m.mapv(|v| v.re)
}
