//! The Weyl algebra in a truncated Fock space, von Neumann's Gaussian
//! idempotent, and the identities tying the vacuum idempotent to the
//! characteristic function.
//!
//! `U(alpha) = exp(i alpha p)` and `V(beta) = exp(i beta x)` are
//! exponentiated in a padded work space of dimension `2D + 32` and then
//! compressed to the leading `D x D` block. Products that must behave
//! like products of exact exponentials (`S`, and every quadrature node of
//! `A`) are formed in the work space before compressing. Checks that
//! multiply compressed operators are restricted to the leading
//! `D/2 x D/2` block, where truncation errors are negligible.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{transposed, Plan};
use crate::grid::GridSpec1D;
use crate::state::Wavefunction;
use crate::transforms::{characteristic_at, DensityMatrix};

pub type CMatrix = DMatrix<Complex64>;

/// Largest supported Fock dimension.
pub const MAX_DIM: usize = 512;
/// Extra levels added to the work space beyond `2D`.
pub const WORK_PADDING: usize = 32;
/// Tolerated `max |E^dagger E - I|` for a work-space exponential.
pub const UNITARITY_TOL: f64 = 1e-9;
/// Edge magnitude, relative to the peak, allowed for quantized
/// coefficients.
pub const EDGE_DECAY_TOL: f64 = 1e-3;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Ladder, position and momentum matrices in the Fock basis `|0>..|D-1>`.
#[derive(Debug, Clone)]
pub struct FockRep {
    dim: usize,
    work_dim: usize,
    block: usize,
    a_op: CMatrix,
    adag_op: CMatrix,
    x_op: CMatrix,
    p_op: CMatrix,
    x_work: CMatrix,
    p_work: CMatrix,
}

fn ladder(d: usize) -> (CMatrix, CMatrix, CMatrix, CMatrix) {
    let a = CMatrix::from_fn(d, d, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let adag = a.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = (&a + &adag) * Complex64::new(s, 0.0);
    // (a - a^dagger) / (i sqrt 2)
    let p = (&a - &adag) * Complex64::new(0.0, -s);
    (a, adag, x, p)
}

/// Builds the representation for `2 <= dim <= 512`.
pub fn build_fock_rep(dim: usize) -> Result<FockRep> {
    if !(2..=MAX_DIM).contains(&dim) {
        return Err(Error::invalid("dim", format!("Fock dimension {dim} outside 2..={MAX_DIM}")));
    }
    let (a_op, adag_op, x_op, p_op) = ladder(dim);
    let work_dim = 2 * dim + WORK_PADDING;
    let (_, _, x_work, p_work) = ladder(work_dim);
    Ok(FockRep {
        dim,
        work_dim,
        block: (dim / 2).max(1),
        a_op,
        adag_op,
        x_op,
        p_op,
        x_work,
        p_work,
    })
}

impl FockRep {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn work_dim(&self) -> usize {
        self.work_dim
    }

    /// Size of the leading block used by checks on compressed products.
    pub fn block(&self) -> usize {
        self.block
    }

    /// Overrides the check block, clamped to `1..=dim`.
    pub fn with_block(mut self, block: usize) -> Self {
        self.block = block.clamp(1, self.dim);
        self
    }

    pub fn a_op(&self) -> &CMatrix {
        &self.a_op
    }

    pub fn adag_op(&self) -> &CMatrix {
        &self.adag_op
    }

    pub fn x_op(&self) -> &CMatrix {
        &self.x_op
    }

    pub fn p_op(&self) -> &CMatrix {
        &self.p_op
    }

    /// Largest `|alpha|` or `|beta|` accepted for this dimension: the
    /// classical turning point `sqrt(2D + 1)` of the top retained level.
    pub fn calibrated_range(&self) -> f64 {
        (2.0 * self.dim as f64 + 1.0).sqrt()
    }

    fn check_range(&self, value: f64) -> Result<()> {
        let limit = self.calibrated_range();
        if !value.is_finite() || value.abs() > limit {
            return Err(Error::TruncationRange {
                value,
                limit,
                dim: self.dim,
            });
        }
        Ok(())
    }

    /// `||[x, p] - i I||_F` on the leading `(D-1)` block.
    pub fn ccr_residual(&self) -> f64 {
        let c = &self.x_op * &self.p_op - &self.p_op * &self.x_op;
        let b = self.dim - 1;
        let d = c.view((0, 0), (b, b)) - CMatrix::identity(b, b) * I;
        d.norm()
    }

    /// `exp(i t p)` in the work space.
    fn u_work(&self, t: f64) -> Result<CMatrix> {
        expi(&self.p_work, t)
    }

    /// `exp(i t x)` in the work space.
    fn v_work(&self, t: f64) -> Result<CMatrix> {
        expi(&self.x_work, t)
    }

    fn compress(&self, m: &CMatrix) -> CMatrix {
        m.view((0, 0), (self.dim, self.dim)).into_owned()
    }

    fn op(&self, values: CMatrix, label: String) -> FockOperator {
        FockOperator {
            dim: self.dim,
            values,
            label,
        }
    }

    /// `e^{-i alpha beta / 2} U(alpha) V(beta)` in the work space,
    /// compressed.
    fn s_uv(&self, alpha: f64, beta: f64) -> Result<CMatrix> {
        let uv = self.u_work(alpha)? * self.v_work(beta)?;
        Ok(self.compress(&uv) * Complex64::from_polar(1.0, -0.5 * alpha * beta))
    }

    /// `e^{+i alpha beta / 2} V(beta) U(alpha)` in the work space,
    /// compressed.
    fn s_vu(&self, alpha: f64, beta: f64) -> Result<CMatrix> {
        let vu = self.v_work(beta)? * self.u_work(alpha)?;
        Ok(self.compress(&vu) * Complex64::from_polar(1.0, 0.5 * alpha * beta))
    }
}

/// `exp(i t h)` for Hermitian `h`, with a unitarity check.
fn expi(h: &CMatrix, t: f64) -> Result<CMatrix> {
    if t == 0.0 {
        return Ok(CMatrix::identity(h.nrows(), h.ncols()));
    }
    let e = (h * Complex64::new(0.0, t)).exp();
    let drift = max_abs(&(e.adjoint() * &e - CMatrix::identity(h.nrows(), h.ncols())));
    if drift > UNITARITY_TOL {
        return Err(Error::UnitarityDrift(drift));
    }
    Ok(e)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn leading(m: &CMatrix, b: usize) -> CMatrix {
    m.view((0, 0), (b, b)).into_owned()
}

/// A `D x D` operator in the Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    dim: usize,
    values: CMatrix,
    label: String,
}

impl FockOperator {
    pub fn new(rep: &FockRep, values: CMatrix, label: impl Into<String>) -> Result<Self> {
        if values.nrows() != rep.dim || values.ncols() != rep.dim {
            return Err(Error::GridMismatch(format!(
                "operator is {}x{}, representation has dimension {}",
                values.nrows(),
                values.ncols(),
                rep.dim
            )));
        }
        Ok(rep.op(values, label.into()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &CMatrix {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn trace(&self) -> Complex64 {
        self.values.trace()
    }

    /// `||O^dagger O - I||_F` on the leading `b x b` block.
    pub fn unitarity_residual(&self, b: usize) -> f64 {
        let g = self.values.adjoint() * &self.values;
        (leading(&g, b) - CMatrix::identity(b, b)).norm()
    }

    /// `||O - O^dagger||_F`
    pub fn hermiticity_residual(&self) -> f64 {
        (&self.values - self.values.adjoint()).norm()
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.values.clone().svd(false, false).singular_values.iter().cloned().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }
}

/// `U(alpha) = exp(i alpha p)`.
pub fn weyl_u(rep: &FockRep, alpha: f64) -> Result<FockOperator> {
    rep.check_range(alpha)?;
    let u = rep.u_work(alpha)?;
    Ok(rep.op(rep.compress(&u), format!("U({alpha})")))
}

/// `V(beta) = exp(i beta x)`.
pub fn weyl_v(rep: &FockRep, beta: f64) -> Result<FockOperator> {
    rep.check_range(beta)?;
    let v = rep.v_work(beta)?;
    Ok(rep.op(rep.compress(&v), format!("V({beta})")))
}

/// `S(alpha, beta) = e^{-i alpha beta/2} U(alpha) V(beta)`.
pub fn weyl_s(rep: &FockRep, alpha: f64, beta: f64) -> Result<FockOperator> {
    rep.check_range(alpha)?;
    rep.check_range(beta)?;
    Ok(rep.op(rep.s_uv(alpha, beta)?, format!("S({alpha},{beta})")))
}

/// `S(alpha, beta)` from the second defining form
/// `e^{+i alpha beta/2} V(beta) U(alpha)`.
pub fn weyl_s_reversed(rep: &FockRep, alpha: f64, beta: f64) -> Result<FockOperator> {
    rep.check_range(alpha)?;
    rep.check_range(beta)?;
    Ok(rep.op(rep.s_vu(alpha, beta)?, format!("S'({alpha},{beta})")))
}

/// `||U V - e^{i alpha beta} V U||_F` on the leading block, with `U`, `V`
/// the compressed operators.
pub fn check_weyl_relation(rep: &FockRep, alpha: f64, beta: f64) -> Result<f64> {
    let u = weyl_u(rep, alpha)?.values;
    let v = weyl_v(rep, beta)?.values;
    let d = &u * &v - (&v * &u) * Complex64::from_polar(1.0, alpha * beta);
    Ok(leading(&d, rep.block).norm())
}

/// `|0><0|`
pub fn vacuum_projector(rep: &FockRep) -> FockOperator {
    let mut m = CMatrix::zeros(rep.dim, rep.dim);
    m[(0, 0)] = Complex64::new(1.0, 0.0);
    rep.op(m, "Omega".into())
}

/// `N(alpha, beta) = V(beta) |0><0| U(alpha)`, formed as the outer
/// product of the first column of `V` with the first row of `U`.
pub fn build_n(rep: &FockRep, alpha: f64, beta: f64) -> Result<FockOperator> {
    let u = weyl_u(rep, alpha)?.values;
    let v = weyl_v(rep, beta)?.values;
    let m = v.column(0) * u.row(0);
    Ok(rep.op(m, format!("N({alpha},{beta})")))
}

/// Outcome of the `N^2 = c N` check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NIdempotency {
    /// `<0|U(alpha) V(beta)|0>` from the matrices.
    pub scalar_measured: Complex64,
    /// `e^{i alpha beta/2} e^{-(alpha^2 + beta^2)/4}` for `[x, p] = i`.
    pub scalar_standard: Complex64,
    /// `e^{i alpha beta/2} e^{-|gamma|^2/2}` with `gamma = (alpha + i beta)/2`.
    pub scalar_printed: Complex64,
    /// `||N^2 - c N||_F` with the measured scalar.
    pub residual: f64,
}

pub fn check_n_idempotent(rep: &FockRep, alpha: f64, beta: f64) -> Result<NIdempotency> {
    let u = weyl_u(rep, alpha)?.values;
    let v = weyl_v(rep, beta)?.values;
    let n = v.column(0) * u.row(0);
    let c = (u.row(0) * v.column(0))[(0, 0)];
    let residual = (&n * &n - &n * c).norm();
    let phase = Complex64::from_polar(1.0, 0.5 * alpha * beta);
    let r2 = alpha * alpha + beta * beta;
    Ok(NIdempotency {
        scalar_measured: c,
        scalar_standard: phase * (-r2 / 4.0).exp(),
        scalar_printed: phase * (-r2 / 8.0).exp(),
        residual,
    })
}

/// Tensor-product trapezoid grid over `[-alpha_range, alpha_range] x
/// [-beta_range, beta_range]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureBox {
    pub alpha_range: f64,
    pub beta_range: f64,
    pub n_alpha: usize,
    pub n_beta: usize,
}

impl QuadratureBox {
    pub const MIN_NODES: usize = 16;

    pub fn new(alpha_range: f64, beta_range: f64, n_alpha: usize, n_beta: usize) -> Result<Self> {
        let b = Self {
            alpha_range,
            beta_range,
            n_alpha,
            n_beta,
        };
        b.validate()?;
        Ok(b)
    }

    /// Square box of half-width `half_width` with node spacing as close to
    /// `spacing` as the half-width allows.
    pub fn from_spacing(half_width: f64, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::invalid("spacing", format!("must be positive, got {spacing}")));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::invalid("half_width", format!("must be positive, got {half_width}")));
        }
        let n = (2.0 * half_width / spacing).round() as usize + 1;
        Self::new(half_width, half_width, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_range > 0.0) || !(self.beta_range > 0.0) || !self.alpha_range.is_finite() || !self.beta_range.is_finite() {
            return Err(Error::invalid("range", "quadrature half-widths must be positive and finite"));
        }
        if self.n_alpha < Self::MIN_NODES || self.n_beta < Self::MIN_NODES {
            return Err(Error::invalid(
                "nodes",
                format!("need at least {} nodes per axis", Self::MIN_NODES),
            ));
        }
        Ok(())
    }

    pub fn alpha_spacing(&self) -> f64 {
        2.0 * self.alpha_range / (self.n_alpha - 1) as f64
    }

    pub fn beta_spacing(&self) -> f64 {
        2.0 * self.beta_range / (self.n_beta - 1) as f64
    }

    pub fn alpha_nodes(&self) -> Vec<f64> {
        nodes(self.alpha_range, self.n_alpha)
    }

    pub fn beta_nodes(&self) -> Vec<f64> {
        nodes(self.beta_range, self.n_beta)
    }

    /// Same box with the node spacing halved.
    pub fn refined(&self) -> Self {
        Self {
            n_alpha: 2 * self.n_alpha - 1,
            n_beta: 2 * self.n_beta - 1,
            ..*self
        }
    }

    /// Samples `f(alpha, beta)` on the nodes; rows are `alpha`.
    pub fn sample(&self, f: impl Fn(f64, f64) -> Complex64) -> CMatrix {
        let a = self.alpha_nodes();
        let b = self.beta_nodes();
        CMatrix::from_fn(self.n_alpha, self.n_beta, |i, j| f(a[i], b[j]))
    }
}

fn nodes(half: f64, n: usize) -> Vec<f64> {
    let h = 2.0 * half / (n - 1) as f64;
    (0..n).map(|i| -half + i as f64 * h).collect()
}

fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

/// `A = int int a(alpha, beta) S(alpha, beta) dalpha dbeta` by trapezoid
/// quadrature. `coeff` holds `a` at the box nodes (rows `alpha`).
pub fn weyl_quantize(rep: &FockRep, bx: &QuadratureBox, coeff: &CMatrix) -> Result<FockOperator> {
    bx.validate()?;
    if coeff.nrows() != bx.n_alpha || coeff.ncols() != bx.n_beta {
        return Err(Error::GridMismatch(format!(
            "coefficient grid is {}x{}, box has {}x{} nodes",
            coeff.nrows(),
            coeff.ncols(),
            bx.n_alpha,
            bx.n_beta
        )));
    }
    if coeff.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::invalid("coeff", "non-finite coefficient"));
    }
    rep.check_range(bx.alpha_range)?;
    rep.check_range(bx.beta_range)?;
    let peak = max_abs(coeff);
    if peak > 0.0 {
        let (na, nb) = (bx.n_alpha, bx.n_beta);
        let edge = (0..na)
            .flat_map(|i| [coeff[(i, 0)], coeff[(i, nb - 1)]])
            .chain((0..nb).flat_map(|j| [coeff[(0, j)], coeff[(na - 1, j)]]))
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if edge > EDGE_DECAY_TOL * peak {
            return Err(Error::invalid(
                "coeff",
                format!("coefficient reaches {:.2e} of its peak on the box edge", edge / peak),
            ));
        }
    }

    let d = rep.dim;
    let alphas = bx.alpha_nodes();
    let betas = bx.beta_nodes();
    let wa = trapezoid_weights(bx.n_alpha, bx.alpha_spacing());
    let wb = trapezoid_weights(bx.n_beta, bx.beta_spacing());

    // nodes by the group law U(a + h) = U(a) U(h)
    let u_rows = group_orbit(rep.u_work(alphas[0])?, rep.u_work(bx.alpha_spacing())?, bx.n_alpha, |m| {
        m.rows(0, d).into_owned()
    });
    let v_cols = group_orbit(rep.v_work(betas[0])?, rep.v_work(bx.beta_spacing())?, bx.n_beta, |m| {
        m.columns(0, d).into_owned()
    });

    let terms: Vec<CMatrix> = (0..bx.n_alpha)
        .into_par_iter()
        .map(|i| {
            let mut inner = CMatrix::zeros(rep.work_dim, d);
            for (j, v) in v_cols.iter().enumerate() {
                let c = coeff[(i, j)];
                if c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let w = c * (wa[i] * wb[j]) * Complex64::from_polar(1.0, -0.5 * alphas[i] * betas[j]);
                inner.zip_apply(v, |acc, x| *acc += w * x);
            }
            &u_rows[i] * inner
        })
        .collect();
    let mut a = CMatrix::zeros(d, d);
    for t in &terms {
        a += t;
    }
    Ok(rep.op(a, "quantized".into()))
}

fn group_orbit(start: CMatrix, step: CMatrix, n: usize, keep: impl Fn(&CMatrix) -> CMatrix) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(n);
    let mut cur = start;
    for i in 0..n {
        out.push(keep(&cur));
        if i + 1 < n {
            cur = &cur * &step;
        }
    }
    out
}

/// Smallest box half-width accepted by [`build_vonneumann_a`].
pub const MIN_BOX_HALF_WIDTH: f64 = 6.0;
/// Largest node spacing accepted by [`build_vonneumann_a`].
pub const MAX_NODE_SPACING: f64 = 0.25;

/// `A = int int e^{-(alpha^2 + beta^2)/4} S(alpha, beta) dalpha dbeta`.
pub fn build_vonneumann_a(rep: &FockRep, bx: &QuadratureBox) -> Result<FockOperator> {
    bx.validate()?;
    if bx.alpha_range < MIN_BOX_HALF_WIDTH || bx.beta_range < MIN_BOX_HALF_WIDTH {
        return Err(Error::invalid(
            "box",
            format!("half-widths must be at least {MIN_BOX_HALF_WIDTH}"),
        ));
    }
    if bx.alpha_spacing() > MAX_NODE_SPACING + 1e-12 || bx.beta_spacing() > MAX_NODE_SPACING + 1e-12 {
        return Err(Error::invalid(
            "box",
            format!("node spacing must not exceed {MAX_NODE_SPACING}"),
        ));
    }
    let coeff = bx.sample(|a, b| Complex64::new(gaussian_weight(a, b), 0.0));
    let mut a = weyl_quantize(rep, bx, &coeff)?;
    a.label = "A".into();
    Ok(a)
}

/// `e^{-(alpha^2 + beta^2)/4}`
pub fn gaussian_weight(alpha: f64, beta: f64) -> f64 {
    (-(alpha * alpha + beta * beta) / 4.0).exp()
}

/// `||A^2 - 2 pi A||_F / ||A||_F`, zero for the zero operator.
pub fn check_a_idempotent(a: &FockOperator) -> f64 {
    let m = &a.values;
    let norm = m.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (m * m - m * Complex64::new(2.0 * PI, 0.0)).norm() / norm
}

/// `||A S(alpha, beta) A - 2 pi e^{-(alpha^2+beta^2)/4} A||_F / ||A||_F`.
pub fn check_primitivity(rep: &FockRep, a: &FockOperator, alpha: f64, beta: f64) -> Result<f64> {
    let s = weyl_s(rep, alpha, beta)?.values;
    let m = &a.values;
    let norm = m.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let c = 2.0 * PI * gaussian_weight(alpha, beta);
    Ok((m * s * m - m * Complex64::new(c, 0.0)).norm() / norm)
}

/// Gaussian coefficient `n(alpha, beta) = a b e^{-beta^2/4a^2 - alpha^2/4b^2}`
/// of the vacuum idempotent.
pub fn n_coefficient(alpha: f64, beta: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid("a/b", format!("widths must be positive, got a={a}, b={b}")));
    }
    Ok(a * b * (-beta * beta / (4.0 * a * a) - alpha * alpha / (4.0 * b * b)).exp())
}

/// Unnormalized `<x|N(alpha, beta)|p> = e^{-a^2 x^2/2} e^{-b^2 p^2/2}
/// e^{i(alpha p + beta x)}` on `grid x grid` (rows `x`, columns `p`).
pub fn n_matrix_element_xp(grid: &GridSpec1D, alpha: f64, beta: f64, a: f64, b: f64) -> Result<CMatrix> {
    n_coefficient(alpha, beta, a, b)?;
    let xs = grid.points();
    Ok(CMatrix::from_fn(xs.len(), xs.len(), |i, j| {
        let (x, p) = (xs[i], xs[j]);
        Complex64::from_polar((-0.5 * a * a * x * x - 0.5 * b * b * p * p).exp(), alpha * p + beta * x)
    }))
}

/// `int int <x|N|p> dx dp` by Riemann sum on `grid x grid`.
pub fn n_integral_xp(grid: &GridSpec1D, alpha: f64, beta: f64, a: f64, b: f64) -> Result<Complex64> {
    let m = n_matrix_element_xp(grid, alpha, beta, a, b)?;
    Ok(m.sum() * grid.dx() * grid.dx())
}

/// Two-point function `<x'|N(alpha, beta)|x> =
/// sum C_{n n'} e^{i beta x'} psi_n(x') psi*_{n'}(x - alpha)`, stored with
/// row `x'` and column `x`. Hermitian only at `alpha = beta = 0`.
pub fn density_from_idempotent(states: &[Wavefunction], c: &CMatrix, alpha: f64, beta: f64) -> Result<DensityMatrix> {
    let k = states.len();
    if k == 0 {
        return Err(Error::invalid("states", "need at least one state"));
    }
    if c.nrows() != k || c.ncols() != k {
        return Err(Error::invalid("C", format!("coefficient matrix must be {k}x{k}")));
    }
    let g = *states[0].grid();
    if states.iter().any(|s| !s.grid().same_as(&g)) {
        return Err(Error::GridMismatch("states live on different grids".into()));
    }
    for (m, sm) in states.iter().enumerate() {
        for (n, sn) in states.iter().enumerate() {
            let expect = if m == n { 1.0 } else { 0.0 };
            if (sm.inner(sn) - expect).norm() > 1e-9 {
                return Err(Error::invalid("states", format!("states {m} and {n} are not orthonormal")));
            }
        }
    }
    check_coefficients(c)?;
    let shift = grid_shift(&g, alpha)?;
    let n = g.n_points();
    let xs = g.points();
    let mut values = Array2::from_elem((n, n), Complex64::new(0.0, 0.0));
    for (a_idx, sa) in states.iter().enumerate() {
        for (b_idx, sb) in states.iter().enumerate() {
            let w = c[(a_idx, b_idx)];
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..n {
                let left = w * Complex64::from_polar(1.0, beta * xs[i]) * sa.values()[i];
                for j in 0..n {
                    values[[i, j]] += left * sb.at(j as isize - shift).conj();
                }
            }
        }
    }
    Ok(DensityMatrix::from_raw(g, values, 0.0))
}

fn check_coefficients(c: &CMatrix) -> Result<()> {
    let tol = 1e-10;
    let herm = (c - c.adjoint()).norm();
    if herm > tol {
        return Err(Error::invalid("C", format!("not Hermitian (residual {herm:.2e})")));
    }
    let tr = c.trace();
    if (tr - 1.0).norm() > tol {
        return Err(Error::invalid("C", format!("trace is {tr}, expected 1")));
    }
    let min = c.clone().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(Error::invalid("C", format!("negative eigenvalue {min:.2e}")));
    }
    Ok(())
}

fn grid_shift(g: &GridSpec1D, alpha: f64) -> Result<isize> {
    let r = alpha / g.dx();
    let s = r.round();
    if (r - s).abs() > 1e-9 {
        return Err(Error::invalid(
            "alpha",
            format!("{alpha} is not a multiple of the grid spacing {}", g.dx()),
        ));
    }
    Ok(s as isize)
}

/// `int psi*(x - alpha) e^{i beta x} psi(x) dx` by quadrature; `alpha`
/// must be a multiple of the grid spacing.
pub fn trace_n_position(psi: &Wavefunction, alpha: f64, beta: f64) -> Result<Complex64> {
    let g = psi.grid();
    let s = grid_shift(g, alpha)?;
    psi.check_support()?;
    let sum: Complex64 = (0..g.n_points() as isize)
        .map(|j| psi.at(j - s).conj() * Complex64::from_polar(1.0, beta * g.point(j)) * psi.at(j))
        .sum();
    Ok(sum * g.dx())
}

/// Both sides of `tr N(alpha, beta) = e^{i alpha beta/2} M(alpha, beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_diff: f64,
}

pub fn bridge_check(psi: &Wavefunction, alpha: f64, beta: f64) -> Result<BridgeCheck> {
    let lhs = trace_n_position(psi, alpha, beta)?;
    let rhs = Complex64::from_polar(1.0, 0.5 * alpha * beta) * characteristic_at(psi, alpha, beta)?;
    Ok(BridgeCheck {
        lhs,
        rhs,
        abs_diff: (lhs - rhs).norm(),
    })
}

/// Residuals of the mean-operator algebra on density matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCommutator {
    /// `max ||(X P - P X) rho|| / ||rho||`
    pub commutator: f64,
    /// `max ||[x., p.] rho - i rho|| / ||rho||` (left action)
    pub left: f64,
    /// `max ||[.x, .p] rho + i rho|| / ||rho||` (right action)
    pub right: f64,
    pub n_tests: usize,
}

/// Realizes `X = (x. + .x)/2` and `P = (p. + .p)/2` as superoperators on
/// density matrices sampled on `grid`, with `p` the spectral derivative
/// `-i d/dx`, and measures their commutator over a basis of Hermitian
/// test matrices built from Fock and coherent states.
pub fn mean_quadrature_commutator(grid: &GridSpec1D) -> Result<MeanCommutator> {
    use crate::state::{make_fock, make_gaussian};
    let mut states = Vec::new();
    for n in 0..4 {
        states.push(make_fock(grid, n)?);
    }
    for (x0, p0) in [(1.0, 0.5), (-0.5, -1.0)] {
        states.push(make_gaussian(grid, x0, p0, 1.0)?);
    }
    let n = grid.n_points();
    let outer = |a: &Wavefunction, b: &Wavefunction, w: Complex64| {
        Array2::from_shape_fn((n, n), |(i, j)| w * a.values()[i] * b.values()[j].conj())
    };
    let one = Complex64::new(1.0, 0.0);
    let mut tests = Vec::new();
    for i in 0..states.len() {
        for j in i..states.len() {
            let (a, b) = (&states[i], &states[j]);
            if i == j {
                tests.push(outer(a, a, one));
            } else {
                tests.push(outer(a, b, one) + outer(b, a, one));
                tests.push(outer(a, b, I) - outer(b, a, I));
            }
        }
    }

    let ops = Superops::new(grid);
    let results: Vec<(f64, f64, f64)> = tests
        .par_iter()
        .map(|r| {
            let norm = fro(r);
            let comm = ops.big_x(&ops.big_p(r)) - ops.big_p(&ops.big_x(r));
            let left = ops.lx(&ops.lp(r)) - ops.lp(&ops.lx(r)) - r * I;
            let right = ops.rx(&ops.rp(r)) - ops.rp(&ops.rx(r)) + r * I;
            (fro(&comm) / norm, fro(&left) / norm, fro(&right) / norm)
        })
        .collect();
    let fold = |f: fn(&(f64, f64, f64)) -> f64| results.iter().map(f).fold(0.0, f64::max);
    Ok(MeanCommutator {
        commutator: fold(|r| r.0),
        left: fold(|r| r.1),
        right: fold(|r| r.2),
        n_tests: results.len(),
    })
}

fn fro(m: &Array2<Complex64>) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Left and right multiplication by `x` and `p` on a sampled `rho(x, x')`.
struct Superops {
    x: Vec<f64>,
    /// `i k / n` per FFT slot, Nyquist dropped
    ik: Vec<Complex64>,
    plan: Plan,
}

impl Superops {
    fn new(grid: &GridSpec1D) -> Self {
        let n = grid.n_points();
        let ik = grid
            .fft_wavenumbers()
            .into_iter()
            .enumerate()
            .map(|(q, k)| if q == n / 2 { Complex64::new(0.0, 0.0) } else { I * k / n as f64 })
            .collect();
        Self {
            x: grid.points(),
            ik,
            plan: Plan::new(n),
        }
    }

    /// `d/dx'` (along rows).
    fn d_rows(&self, r: &Array2<Complex64>) -> Array2<Complex64> {
        let mut m = r.clone();
        self.plan.forward_rows(&mut m);
        for mut row in m.rows_mut() {
            row.iter_mut().zip(&self.ik).for_each(|(v, k)| *v *= k);
        }
        self.plan.inverse_rows(&mut m);
        m
    }

    fn lx(&self, r: &Array2<Complex64>) -> Array2<Complex64> {
        Array2::from_shape_fn(r.dim(), |(i, j)| r[[i, j]] * self.x[i])
    }

    fn rx(&self, r: &Array2<Complex64>) -> Array2<Complex64> {
        Array2::from_shape_fn(r.dim(), |(i, j)| r[[i, j]] * self.x[j])
    }

    /// `p rho = -i d/dx rho`
    fn lp(&self, r: &Array2<Complex64>) -> Array2<Complex64> {
        transposed(&self.d_rows(&transposed(r))) * Complex64::new(0.0, -1.0)
    }

    /// `rho p = +i d/dx' rho`
    fn rp(&self, r: &Array2<Complex64>) -> Array2<Complex64> {
        self.d_rows(r) * I
    }

    fn big_x(&self, r: &Array2<Complex64>) -> Array2<Complex64> {
        (self.lx(r) + self.rx(r)) * 0.5
    }

    fn big_p(&self, r: &Array2<Complex64>) -> Array2<Complex64> {
        (self.lp(r) + self.rp(r)) * 0.5
    }
}
