//! External potentials `V(x)` for the Hamiltonian `p^2/2m + V`.

use crate::error::{Error, Result};
use crate::grid::GridSpec1D;

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Free,
    /// `V = slope * x`
    Linear { slope: f64 },
    /// `V = omega^2 x^2 / 2`
    Harmonic { omega: f64 },
    /// `V = lambda x^4`
    Quartic { lambda: f64 },
    /// `V = depth * (x^2 - well^2)^2`, minima at `±well`.
    DoubleWell { depth: f64, well: f64 },
    /// Samples on the simulation grid; continued by the boundary value
    /// outside it.
    Tabulated { values: Vec<f64> },
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &'static str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("non-finite value {v}")))
            }
        };
        match self {
            PotentialSpec::Free => Ok(()),
            PotentialSpec::Linear { slope } => finite("slope", *slope),
            PotentialSpec::Harmonic { omega } => finite("omega", *omega),
            PotentialSpec::Quartic { lambda } => finite("lambda", *lambda),
            PotentialSpec::DoubleWell { depth, well } => {
                finite("depth", *depth)?;
                finite("well", *well)
            }
            PotentialSpec::Tabulated { values } => {
                if values.is_empty() {
                    return Err(Error::invalid("values", "empty potential table"));
                }
                values.iter().try_for_each(|v| finite("values", *v))
            }
        }
    }

    /// Checks the potential against the grid it will be sampled on.
    pub fn validate_for(&self, grid: &GridSpec1D) -> Result<()> {
        self.validate()?;
        if let PotentialSpec::Tabulated { values } = self {
            if values.len() != grid.n_points() {
                return Err(Error::GridMismatch(format!(
                    "tabulated potential has {} samples, grid has {}",
                    values.len(),
                    grid.n_points()
                )));
            }
        }
        Ok(())
    }

    pub fn is_free(&self) -> bool {
        matches!(self, PotentialSpec::Free)
    }

    /// `V` at grid index `i`; indices outside the grid are evaluated
    /// analytically, or by constant continuation for tables.
    pub fn at_index(&self, grid: &GridSpec1D, i: isize) -> f64 {
        match self {
            PotentialSpec::Tabulated { values } => {
                let last = values.len() as isize - 1;
                values[i.clamp(0, last) as usize]
            }
            _ => self.eval(grid.point(i)).expect("analytic potential"),
        }
    }

    /// Closed-form value at `x`; `None` for tables, which are only defined
    /// on grid indices (see [`at_index`](Self::at_index)).
    pub fn eval(&self, x: f64) -> Option<f64> {
        let v = match self {
            PotentialSpec::Free => 0.0,
            PotentialSpec::Linear { slope } => slope * x,
            PotentialSpec::Harmonic { omega } => 0.5 * omega * omega * x * x,
            PotentialSpec::Quartic { lambda } => lambda * x.powi(4),
            PotentialSpec::DoubleWell { depth, well } => {
                let d = x * x - well * well;
                depth * d * d
            }
            PotentialSpec::Tabulated { .. } => return None,
        };
        Some(v)
    }

    pub fn sample(&self, grid: &GridSpec1D) -> Vec<f64> {
        (0..grid.n_points() as isize)
            .map(|i| self.at_index(grid, i))
            .collect()
    }

    /// Spread `max V - min V` over the grid.
    pub fn spread(&self, grid: &GridSpec1D) -> f64 {
        let v = self.sample(grid);
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }
}
