//! Uniform sampling grids and their spectral duals.
//!
//! All grids are half-open: `n_points` samples at `x_min + i * dx` with
//! `dx = (x_max - x_min) / n_points`. Spectral operations treat them as
//! periodic with period `x_max - x_min`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Smallest grid accepted by the spectral transforms.
pub const MIN_POINTS: usize = 8;

/// A uniform one-dimensional grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec1D {
    n_points: usize,
    x_min: f64,
    x_max: f64,
}

impl GridSpec1D {
    pub fn new(n_points: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n_points < MIN_POINTS || !n_points.is_power_of_two() {
            return Err(Error::invalid(
                "n_points",
                format!("{n_points} is not a power of two >= {MIN_POINTS}"),
            ));
        }
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::invalid("x_min/x_max", "bounds must be finite"));
        }
        if x_max <= x_min {
            return Err(Error::invalid(
                "x_max",
                format!("x_max ({x_max}) must exceed x_min ({x_min})"),
            ));
        }
        Ok(Self {
            n_points,
            x_min,
            x_max,
        })
    }

    /// The default simulation grid: 256 points on [-10, 10).
    pub fn default_grid() -> Self {
        Self::new(256, -10.0, 10.0).expect("default grid is valid")
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n_points as f64
    }

    /// Coordinate of sample `i`. Indices outside `0..n` extrapolate linearly.
    pub fn point(&self, i: isize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    /// Coordinate of the middle sample `n/2`.
    pub fn center(&self) -> f64 {
        self.point((self.n_points / 2) as isize)
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points as isize).map(|i| self.point(i)).collect()
    }

    /// Nearest sample index for `x`, if it lies on the grid.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let r = (x - self.x_min) / self.dx();
        let i = r.round();
        if (r - i).abs() < 1e-9 && i >= 0.0 && (i as usize) < self.n_points {
            Some(i as usize)
        } else {
            None
        }
    }

    /// Angular FFT wavenumbers in standard FFT order.
    pub fn fft_wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let dk = 2.0 * PI / self.length();
        (0..n).map(|q| signed_index(q, n) as f64 * dk).collect()
    }

    /// Grid of separations `tau` sampled at even multiples of `dx`,
    /// covering `[-L, L)`. This is the lattice on which the products
    /// `psi*(x - tau/2) psi(x + tau/2)` need no interpolation.
    pub fn tau_dual(&self) -> GridSpec1D {
        let l = self.length();
        Self::new(self.n_points, -l, l).expect("dual of a valid grid")
    }

    /// Grid of position-frequencies `theta`, spacing `2 pi / L`,
    /// covering `[-pi/dx, pi/dx)`.
    pub fn theta_dual(&self) -> GridSpec1D {
        let kmax = PI / self.dx();
        Self::new(self.n_points, -kmax, kmax).expect("dual of a valid grid")
    }

    /// Mean-momentum grid for phase-space functions, the spectral dual of
    /// [`tau_dual`](Self::tau_dual): spacing `pi / L`, covering
    /// `[-pi/(2 dx), pi/(2 dx))`.
    pub fn momentum_dual(&self) -> GridSpec1D {
        let pmax = PI / (2.0 * self.dx());
        Self::new(self.n_points, -pmax, pmax).expect("dual of a valid grid")
    }

    pub fn same_as(&self, other: &GridSpec1D) -> bool {
        let tol = 1e-12 * self.length().max(1.0);
        self.n_points == other.n_points
            && (self.x_min - other.x_min).abs() <= tol
            && (self.x_max - other.x_max).abs() <= tol
    }
}

impl fmt::Display for GridSpec1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.n_points, self.x_min, self.x_max)
    }
}

impl std::str::FromStr for GridSpec1D {
    type Err = Error;

    /// Parses the canonical `N:min:max` spelling.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::invalid("grid", format!("expected N:min:max, got `{s}`")));
        }
        let n = parts[0]
            .trim()
            .parse::<usize>()
            .map_err(|e| Error::invalid("grid", format!("bad point count `{}`: {e}", parts[0])))?;
        let lo = parts[1]
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::invalid("grid", format!("bad minimum `{}`: {e}", parts[1])))?;
        let hi = parts[2]
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::invalid("grid", format!("bad maximum `{}`: {e}", parts[2])))?;
        GridSpec1D::new(n, lo, hi)
    }
}

/// Phase-space grid: positions (mean coordinate `X`) and mean momenta `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGridSpec {
    pub x_grid: GridSpec1D,
    pub p_grid: GridSpec1D,
}

impl PhaseGridSpec {
    /// The phase grid produced by the transforms for wavefunctions on `x_grid`.
    pub fn for_position(x_grid: GridSpec1D) -> Self {
        Self {
            x_grid,
            p_grid: x_grid.momentum_dual(),
        }
    }

    /// Cell area `dX * dP`.
    pub fn cell(&self) -> f64 {
        self.x_grid.dx() * self.p_grid.dx()
    }

    pub fn is_dual(&self) -> bool {
        self.p_grid.same_as(&self.x_grid.momentum_dual())
    }

    pub(crate) fn require_dual(&self) -> Result<()> {
        if self.is_dual() {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "momentum grid {} is not the spectral dual {} of position grid {}",
                self.p_grid,
                self.x_grid.momentum_dual(),
                self.x_grid
            )))
        }
    }
}

/// Signed frequency index for FFT slot `q` of an `n`-point transform,
/// in `[-n/2, n/2)`.
pub(crate) fn signed_index(q: usize, n: usize) -> isize {
    if q < n / 2 {
        q as isize
    } else {
        q as isize - n as isize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec1D::new(4, -1.0, 1.0).is_err());
        assert!(GridSpec1D::new(100, -1.0, 1.0).is_err());
        assert!(GridSpec1D::new(64, 1.0, 1.0).is_err());
        assert!(GridSpec1D::new(64, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn default_grid_has_origin_sample() {
        let g = GridSpec1D::default_grid();
        assert_eq!(g.dx(), 20.0 / 256.0);
        assert_eq!(g.point(128), 0.0);
        assert_eq!(g.index_of(0.0), Some(128));
        assert_eq!(g.center(), 0.0);
    }

    #[test]
    fn dual_grid_spacings() {
        let g = GridSpec1D::default_grid();
        let n = g.n_points() as f64;
        assert!((g.tau_dual().dx() - 2.0 * g.dx()).abs() < 1e-15);
        assert!((g.theta_dual().dx() * g.dx() - 2.0 * PI / n).abs() < 1e-15);
        // mean momentum is dual to the tau lattice
        assert!((g.momentum_dual().dx() * g.tau_dual().dx() - 2.0 * PI / n).abs() < 1e-15);
        assert_eq!(g.momentum_dual().point(128), 0.0);
    }

    #[test]
    fn parses_canonical_spelling() {
        let g: GridSpec1D = "256:-10:10".parse().unwrap();
        assert_eq!(g, GridSpec1D::default_grid());
        assert!("256:-10".parse::<GridSpec1D>().is_err());
        assert!("abc:-10:10".parse::<GridSpec1D>().is_err());
        assert_eq!(g.to_string(), "256:-10:10");
    }

    #[test]
    fn signed_indices() {
        let s: Vec<isize> = (0..8).map(|q| signed_index(q, 8)).collect();
        assert_eq!(s, vec![0, 1, 2, 3, -4, -3, -2, -1]);
    }
}
