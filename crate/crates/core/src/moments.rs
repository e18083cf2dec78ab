//! Statistical reductions of a Wigner function.

use crate::transforms::WignerFunction;

/// Riemann-sum moments of `F`. Means and variances are normalized by
/// `norm`; they are reported as zero when `norm` vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    pub norm: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
}

pub fn moments_from_wigner(f: &WignerFunction) -> Moments {
    let pg = f.phase_grid();
    let xs = pg.x_grid.points();
    let ps = pg.p_grid.points();
    let v = f.values();
    let cell = pg.cell();

    let norm = v.sum() * cell;
    if norm == 0.0 {
        return Moments::default();
    }
    let wx: Vec<f64> = v.rows().into_iter().map(|r| r.sum()).collect();
    let wp: Vec<f64> = v.columns().into_iter().map(|c| c.sum()).collect();
    let mean = |w: &[f64], q: &[f64]| w.iter().zip(q).map(|(a, b)| a * b).sum::<f64>() * cell / norm;
    let mean_x = mean(&wx, &xs);
    let mean_p = mean(&wp, &ps);
    let var = |w: &[f64], q: &[f64], m: f64| {
        w.iter().zip(q).map(|(a, b)| a * (b - m).powi(2)).sum::<f64>() * cell / norm
    };
    Moments {
        norm,
        mean_x,
        mean_p,
        var_x: var(&wx, &xs, mean_x),
        var_p: var(&wp, &ps, mean_p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridSpec1D, PhaseGridSpec};
    use crate::state::make_gaussian;
    use crate::transforms::wigner_from_wavefunction;

    fn wigner(x0: f64, p0: f64) -> WignerFunction {
        let g = GridSpec1D::default_grid();
        let psi = make_gaussian(&g, x0, p0, 1.0).unwrap();
        wigner_from_wavefunction(&psi, &PhaseGridSpec::for_position(g)).unwrap()
    }

    #[test]
    fn ground_state_moments() {
        let m = moments_from_wigner(&wigner(0.0, 0.0));
        assert!((m.norm - 1.0).abs() < 1e-6);
        assert!((m.var_x - 0.5).abs() < 1e-6);
        assert!((m.var_p - 0.5).abs() < 1e-6);
    }

    #[test]
    fn displaced_means() {
        let m = moments_from_wigner(&wigner(2.0, 3.0));
        assert!((m.mean_x - 2.0).abs() < 1e-6);
        assert!((m.mean_p - 3.0).abs() < 1e-6);
    }

    #[test]
    fn zero_function() {
        let f = WignerFunction::zeros(PhaseGridSpec::for_position(GridSpec1D::default_grid()));
        assert_eq!(moments_from_wigner(&f), Moments::default());
    }
}
