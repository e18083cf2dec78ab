//! Pure states sampled on a position grid, and the factories that build
//! them.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Plan;
use crate::grid::GridSpec1D;

/// Largest amplitude allowed on the first and last grid samples.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Highest Fock level the factory builds.
pub const MAX_FOCK_LEVEL: usize = 20;

/// A wavefunction `psi(x, t)` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    grid: GridSpec1D,
    values: Vec<Complex64>,
    time: f64,
}

impl Wavefunction {
    pub fn new(grid: GridSpec1D, values: Vec<Complex64>, time: f64) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a {}-point grid",
                values.len(),
                grid.n_points()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid("values", "non-finite sample"));
        }
        Ok(Self { grid, values, time })
    }

    pub fn zeros(grid: GridSpec1D) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.n_points()],
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &GridSpec1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// Sample `i` with zero extension outside the box.
    pub(crate) fn at(&self, i: isize) -> Complex64 {
        if i < 0 || i as usize >= self.values.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[i as usize]
        }
    }

    /// `sum |psi|^2 dx`
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// `<self|other>` by Riemann sum.
    pub fn inner(&self, other: &Wavefunction) -> Complex64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.dx()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= 0.0 {
            return Err(Error::invalid("psi", "cannot normalize the zero state"));
        }
        let s = 1.0 / n.sqrt();
        self.values.iter_mut().for_each(|v| *v *= s);
        Ok(self)
    }

    pub fn probability_density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn mean_x(&self) -> f64 {
        let xs = self.grid.points();
        self.values
            .iter()
            .zip(&xs)
            .map(|(v, x)| v.norm_sqr() * x)
            .sum::<f64>()
            * self.grid.dx()
    }

    pub fn variance_x(&self) -> f64 {
        let xs = self.grid.points();
        let mean = self.mean_x() / self.norm_sqr();
        self.values
            .iter()
            .zip(&xs)
            .map(|(v, x)| v.norm_sqr() * (x - mean).powi(2))
            .sum::<f64>()
            * self.grid.dx()
            / self.norm_sqr()
    }

    /// Momentum amplitude `phi(p) = (2 pi)^(-1/2) int psi(x) exp(-i p x) dx`.
    pub fn momentum_amplitude(&self, p: f64) -> Complex64 {
        let xs = self.grid.points();
        self.values
            .iter()
            .zip(&xs)
            .map(|(v, x)| v * Complex64::from_polar(1.0, -p * x))
            .sum::<Complex64>()
            * (self.grid.dx() / (2.0 * PI).sqrt())
    }

    /// Largest amplitude on the two edge samples.
    pub fn boundary_amplitude(&self) -> f64 {
        let n = self.values.len();
        self.values[0].norm().max(self.values[n - 1].norm())
    }

    /// Fails with [`Error::SupportOverflow`] unless the state vanishes at
    /// the box edges.
    pub fn check_support(&self) -> Result<()> {
        let b = self.boundary_amplitude();
        if b > BOUNDARY_TOL {
            return Err(Error::SupportOverflow(format!(
                "boundary amplitude {b:.3e} exceeds {BOUNDARY_TOL:.0e}"
            )));
        }
        Ok(())
    }

    /// Fraction of the spectral weight (amplitude) in the upper quarter of
    /// the wavenumber band.
    pub fn spectral_tail(&self) -> f64 {
        let n = self.values.len();
        let plan = Plan::new(n);
        let mut buf = self.values.clone();
        plan.forward(&mut buf);
        let total: f64 = buf.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let tail: f64 = buf
            .iter()
            .enumerate()
            .filter(|(q, _)| {
                let k = crate::grid::signed_index(*q, n).unsigned_abs();
                k >= 3 * n / 8
            })
            .map(|(_, v)| v.norm_sqr())
            .sum();
        (tail / total).sqrt()
    }

    /// Samples translated by a whole number of cells, zero-filled.
    pub fn shifted_by_cells(&self, cells: isize) -> Wavefunction {
        let values = (0..self.values.len() as isize)
            .map(|i| self.at(i - cells))
            .collect();
        Wavefunction {
            grid: self.grid,
            values,
            time: self.time,
        }
    }
}

fn check_resolved(psi: Wavefunction, what: &str) -> Result<Wavefunction> {
    let b = psi.boundary_amplitude();
    if b > BOUNDARY_TOL {
        return Err(Error::GridTooSmall(format!(
            "{what}: boundary amplitude {b:.2e} exceeds {BOUNDARY_TOL:.0e}"
        )));
    }
    let tail = psi.spectral_tail();
    if tail > BOUNDARY_TOL {
        return Err(Error::GridTooSmall(format!(
            "{what}: grid spacing does not resolve the state (spectral tail {tail:.2e})"
        )));
    }
    Ok(psi)
}

fn check_inside(grid: &GridSpec1D, lo: f64, hi: f64, what: &str) -> Result<()> {
    if lo < grid.x_min() || hi > grid.x_max() {
        return Err(Error::GridTooSmall(format!(
            "{what} needs [{lo}, {hi}] inside the box [{}, {}]",
            grid.x_min(),
            grid.x_max()
        )));
    }
    Ok(())
}

fn gaussian_samples(grid: &GridSpec1D, x0: f64, p0: f64, a: f64) -> Vec<Complex64> {
    let amp = (a * a / PI).powf(0.25);
    grid.points()
        .into_iter()
        .map(|x| {
            let d = x - x0;
            Complex64::from_polar(amp * (-0.5 * a * a * d * d).exp(), p0 * x)
        })
        .collect()
}

/// Gaussian packet `psi ~ exp(-a^2 (x - x0)^2 / 2) exp(i p0 x)`, normalized.
pub fn make_gaussian(grid: &GridSpec1D, center_x: f64, center_p: f64, width_a: f64) -> Result<Wavefunction> {
    if !(width_a > 0.0) || !width_a.is_finite() {
        return Err(Error::invalid("width_a", format!("must be positive, got {width_a}")));
    }
    if !center_x.is_finite() || !center_p.is_finite() {
        return Err(Error::invalid("center", "must be finite"));
    }
    let r = 5.0 / width_a;
    check_inside(grid, center_x - r, center_x + r, "gaussian")?;
    let psi = Wavefunction::new(*grid, gaussian_samples(grid, center_x, center_p, width_a), 0.0)?;
    check_resolved(psi.normalized()?, "gaussian")
}

/// Hermite function of order `n`: the `n`-th oscillator eigenstate for
/// unit mass and frequency.
pub fn make_fock(grid: &GridSpec1D, n: usize) -> Result<Wavefunction> {
    if n > MAX_FOCK_LEVEL {
        return Err(Error::invalid("n", format!("Fock level {n} exceeds {MAX_FOCK_LEVEL}")));
    }
    let values = grid
        .points()
        .into_iter()
        .map(|x| Complex64::new(hermite_function(n, x), 0.0))
        .collect();
    let psi = Wavefunction::new(*grid, values, 0.0)?.normalized()?;
    check_resolved(psi, "fock state").map_err(|e| match e {
        Error::GridTooSmall(msg) => Error::invalid("n", msg),
        other => other,
    })
}

/// Symmetric superposition of two Gaussians centred at `±separation/2`.
pub fn make_cat(grid: &GridSpec1D, separation: f64, width_a: f64) -> Result<Wavefunction> {
    if !(separation >= 0.0) || !separation.is_finite() {
        return Err(Error::invalid("separation", format!("must be non-negative, got {separation}")));
    }
    if !(width_a > 0.0) || !width_a.is_finite() {
        return Err(Error::invalid("width_a", format!("must be positive, got {width_a}")));
    }
    let r = 5.0 / width_a;
    let h = separation / 2.0;
    check_inside(grid, -h - r, h + r, "cat state")?;
    let left = gaussian_samples(grid, -h, 0.0, width_a);
    let right = gaussian_samples(grid, h, 0.0, width_a);
    let values = left.into_iter().zip(right).map(|(l, r)| l + r).collect();
    let psi = Wavefunction::new(*grid, values, 0.0)?.normalized()?;
    check_resolved(psi, "cat state")
}

/// Normalized Hermite function `psi_n(x)` by the stable three-term
/// recurrence.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec1D {
        GridSpec1D::default_grid()
    }

    #[test]
    fn ground_state_peak() {
        let psi = make_gaussian(&grid(), 0.0, 0.0, 1.0).unwrap();
        // |psi(0)|^2 = 1/sqrt(pi) for the normalized (1/pi)^(1/4) exp(-x^2/2)
        let peak = psi.values()[128].norm_sqr();
        assert!((peak - 1.0 / PI.sqrt()).abs() < 1e-12);
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_translation_by_whole_cells() {
        let g = grid();
        let cells = 32;
        let x0 = cells as f64 * g.dx();
        let a = make_gaussian(&g, x0, 0.0, 1.0).unwrap();
        let b = make_gaussian(&g, 0.0, 0.0, 1.0).unwrap().shifted_by_cells(cells);
        let diff: f64 = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(u, v)| (u - v).norm_sqr())
            .sum::<f64>()
            * g.dx();
        assert!(diff.sqrt() < 1e-10);
    }

    #[test]
    fn gaussian_rejects_bad_width_and_small_box() {
        let g = grid();
        assert!(matches!(make_gaussian(&g, 0.0, 0.0, -1.0), Err(Error::InvalidParameter { .. })));
        assert!(matches!(make_gaussian(&g, 0.0, 0.0, 0.0), Err(Error::InvalidParameter { .. })));
        assert!(matches!(make_gaussian(&g, 7.0, 0.0, 1.0), Err(Error::GridTooSmall(_))));
        assert!(matches!(make_gaussian(&g, 0.0, 0.0, 0.2), Err(Error::GridTooSmall(_))));
    }

    #[test]
    fn gaussian_momentum_must_be_resolved() {
        let g = GridSpec1D::new(64, -10.0, 10.0).unwrap();
        assert!(matches!(make_gaussian(&g, 0.0, 9.0, 1.0), Err(Error::GridTooSmall(_))));
    }

    #[test]
    fn fock_zero_is_the_ground_state() {
        let g = grid();
        let f = make_fock(&g, 0).unwrap();
        let gs = make_gaussian(&g, 0.0, 0.0, 1.0).unwrap();
        for (u, v) in f.values().iter().zip(gs.values()) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn fock_parity_and_orthonormality() {
        let g = grid();
        let states: Vec<_> = (0..=10).map(|n| make_fock(&g, n).unwrap()).collect();
        assert!(states[1].values()[128].norm() < 1e-15);
        for (m, a) in states.iter().enumerate() {
            for (n, b) in states.iter().enumerate() {
                let expect = if m == n { 1.0 } else { 0.0 };
                assert!((a.inner(b) - expect).norm() < 1e-9, "<{m}|{n}>");
            }
        }
        assert!(states[2].inner(&states[3]).norm() < 1e-10);
    }

    #[test]
    fn fock_level_limits() {
        let g = grid();
        // the 1e-10 edge bound admits levels up to 16 on the default box
        assert!(make_fock(&g, 16).is_ok());
        assert!(matches!(make_fock(&g, 17), Err(Error::InvalidParameter { name: "n", .. })));
        let wide = GridSpec1D::new(512, -14.0, 14.0).unwrap();
        assert!(make_fock(&wide, 20).is_ok());
        assert!(matches!(make_fock(&wide, 21), Err(Error::InvalidParameter { name: "n", .. })));
        let coarse = GridSpec1D::new(16, -4.0, 4.0).unwrap();
        assert!(matches!(make_fock(&coarse, 8), Err(Error::InvalidParameter { name: "n", .. })));
    }

    #[test]
    fn cat_state_contract() {
        let g = grid();
        let cat = make_cat(&g, 6.0, 1.0).unwrap();
        assert!((cat.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(cat.mean_x().abs() < 1e-10);
        let degenerate = make_cat(&g, 0.0, 1.0).unwrap();
        let gs = make_gaussian(&g, 0.0, 0.0, 1.0).unwrap();
        let diff: f64 = degenerate
            .values()
            .iter()
            .zip(gs.values())
            .map(|(u, v)| (u - v).norm_sqr())
            .sum::<f64>()
            * g.dx();
        assert!(diff.sqrt() < 1e-10);
        assert!(make_cat(&g, -1.0, 1.0).is_err());
        assert!(matches!(make_cat(&g, 12.0, 1.0), Err(Error::GridTooSmall(_))));
    }

    #[test]
    fn momentum_amplitude_of_ground_state() {
        let psi = make_gaussian(&grid(), 0.0, 0.0, 1.0).unwrap();
        for p in [-2.0, 0.0, 0.7, 3.0] {
            let exact = PI.powf(-0.25) * (-0.5f64 * p * p).exp();
            assert!((psi.momentum_amplitude(p).re - exact).abs() < 1e-12);
        }
    }
}
