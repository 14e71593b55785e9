//! Cone and half-space quadrature: turns an `A(y, t)` field into the square
//! functions — cone aperture `gamma`, zero aperture, the polynomially
//! weighted all-aperture variant, and the single-kernel version.
//!
//! The measure `dy dt / t^{n+1}` is discretized per lattice node as
//! `h^n * delta_log / t^n` (exact for the log-uniform ladder, preserving the
//! dt/t scale invariance); the zero-aperture function uses `delta_log` alone.
//! Cone membership is a strict `|x - y| < gamma t` on cell centers, so a
//! larger aperture sums over a superset of nodes in the same traversal
//! order and pointwise monotonicity holds exactly in floating point.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::kernels::{a_beta_field, a_field_for_kernels, AField, Kernel, KernelDictionary, TLadder};
use crate::weights::unit_ball_volume;

/// Quadrature layout for the cone integrals. `t_min`/`t_max` default to
/// `2h` and `L/2`; the ladder ratio is fixed at 2^{1/4}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeQuadratureSpec {
    pub stride: usize,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
}

impl Default for ConeQuadratureSpec {
    fn default() -> Self {
        ConeQuadratureSpec {
            stride: 1,
            t_min: None,
            t_max: None,
        }
    }
}

impl ConeQuadratureSpec {
    pub fn ladder_for(&self, grid: &Grid) -> Result<TLadder> {
        let t_min = self.t_min.unwrap_or(2.0 * grid.cell_size());
        let t_max = self.t_max.unwrap_or(grid.halfwidth / 2.0);
        TLadder::new(t_min, t_max)
    }
}

/// Parameters of the all-aperture square function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GStarParams {
    pub lambda: f64,
}

impl GStarParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "g* needs lambda > 1, got {lambda}"
            )));
        }
        Ok(GStarParams { lambda })
    }

    /// The theorem-level admissibility threshold `lambda > max(q2, 3)`.
    pub fn admissible_for(&self, q2: f64) -> bool {
        self.lambda > q2.max(3.0)
    }
}

#[derive(Debug, Clone, Copy)]
enum Aperture {
    /// strict cone `|x - y| < gamma t`, weight `h^n delta / t^n`
    Cone(f64),
    /// y = x only, weight `delta`
    Zero,
    /// all y, weight `(t/(t+|x-y|))^{lambda n} h^n delta / t^n`
    GStar(f64),
    /// all y, weight `h^n delta / t^n` (saturated cone)
    Full,
}

/// Squared field values `S(x)^2` for every grid cell, in a deterministic
/// per-cell traversal (parallel over output cells only).
fn square_sums(af: &AField, aperture: Aperture) -> Result<Vec<f64>> {
    let grid = &af.grid;
    let yn = af.y_count();
    if let Aperture::Zero = aperture {
        if af.stride != 1 {
            return Err(Error::InvalidParameter(
                "zero-aperture square function needs a stride-1 lattice".into(),
            ));
        }
    }
    if let Aperture::Cone(gamma) = aperture {
        if !(gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "aperture must be positive, got {gamma}"
            )));
        }
        let diam = 2.0 * grid.halfwidth * (grid.dim as f64).sqrt();
        if gamma * af.ladder.t_min() >= diam {
            return Err(Error::SaturatedAperture(gamma * af.ladder.t_min()));
        }
    }

    let y_vol = af.y_volume();
    let delta = af.ladder.delta_log;
    let lambda_n = match aperture {
        Aperture::GStar(lambda) => lambda * grid.dim as f64,
        _ => 0.0,
    };

    // Zero aperture: diagonal read-off.
    if let Aperture::Zero = aperture {
        let kt = af.ladder.t_values.len();
        let out: Vec<f64> = (0..grid.cell_count())
            .into_par_iter()
            .map(|x| {
                let mut acc = 0.0;
                for ti in 0..kt {
                    let a = af.value(ti, x);
                    acc += a * a * delta;
                }
                acc
            })
            .collect();
        return Ok(out);
    }

    // Distance tables for the polynomial weight: one entry per distinct
    // |index difference| pair, shared across output cells.
    let m = grid.points_per_axis;
    let h = grid.cell_size();
    let gstar_tables: Vec<Vec<f64>> = if lambda_n > 0.0 {
        af.ladder
            .t_values
            .iter()
            .map(|&t| match grid.dim {
                1 => (0..m)
                    .map(|d| {
                        let dist = d as f64 * h;
                        (t / (t + dist)).powf(lambda_n)
                    })
                    .collect(),
                _ => {
                    let mut tab = vec![0.0; m * m];
                    for dy in 0..m {
                        for dx in 0..m {
                            let dist = ((dx * dx + dy * dy) as f64).sqrt() * h;
                            tab[dy * m + dx] = (t / (t + dist)).powf(lambda_n);
                        }
                    }
                    tab
                }
            })
            .collect()
    } else {
        Vec::new()
    };

    let out: Vec<f64> = (0..grid.cell_count())
        .into_par_iter()
        .map(|x_idx| {
            let x = grid.center(x_idx);
            let mut acc = 0.0;
            for (ti, &t) in af.ladder.t_values.iter().enumerate() {
                let mu = y_vol * delta / t.powi(grid.dim as i32);
                let row = &af.values[ti * yn..(ti + 1) * yn];
                let mut inner = 0.0;
                match aperture {
                    Aperture::Cone(gamma) => {
                        let reach = gamma * t;
                        match grid.dim {
                            1 => {
                                for (yi, &cell) in af.y_cells.iter().enumerate() {
                                    let d = (x[0] - grid.axis_center(cell as usize)).abs();
                                    if d < reach {
                                        inner += row[yi] * row[yi];
                                    }
                                }
                            }
                            _ => {
                                let r2 = reach * reach;
                                for (yi, &cell) in af.y_cells.iter().enumerate() {
                                    let y = grid.center(cell as usize);
                                    let dx = x[0] - y[0];
                                    let dy = x[1] - y[1];
                                    if dx * dx + dy * dy < r2 {
                                        inner += row[yi] * row[yi];
                                    }
                                }
                            }
                        }
                    }
                    Aperture::Full => {
                        for v in row {
                            inner += v * v;
                        }
                    }
                    Aperture::GStar(_) => {
                        let tab = &gstar_tables[ti];
                        match grid.dim {
                            1 => {
                                for (yi, &cell) in af.y_cells.iter().enumerate() {
                                    let d = (x_idx as i64 - cell as i64).unsigned_abs() as usize;
                                    inner += tab[d] * row[yi] * row[yi];
                                }
                            }
                            _ => {
                                let (xi, xj) = (x_idx % m, x_idx / m);
                                for (yi, &cell) in af.y_cells.iter().enumerate() {
                                    let c = cell as usize;
                                    let di = (xi as i64 - (c % m) as i64).unsigned_abs() as usize;
                                    let dj = (xj as i64 - (c / m) as i64).unsigned_abs() as usize;
                                    inner += tab[dj * m + di] * row[yi] * row[yi];
                                }
                            }
                        }
                    }
                    Aperture::Zero => unreachable!(),
                }
                acc += inner * mu;
            }
            acc
        })
        .collect();
    Ok(out)
}

fn sqrt_field(grid: Grid, sums: Vec<f64>, provenance: String) -> GridFunction {
    GridFunction {
        grid,
        values: sums.into_iter().map(f64::sqrt).collect(),
        provenance,
    }
}

/// Cone square function of aperture `gamma` from a precomputed A-field.
pub fn s_beta_from_afield(af: &AField, gamma: f64) -> Result<GridFunction> {
    let sums = square_sums(af, Aperture::Cone(gamma))?;
    Ok(sqrt_field(af.grid, sums, format!("s_beta[gamma={gamma}]")))
}

/// Zero-aperture (diagonal) square function.
pub fn g_beta_from_afield(af: &AField) -> Result<GridFunction> {
    let sums = square_sums(af, Aperture::Zero)?;
    Ok(sqrt_field(af.grid, sums, "g_beta".into()))
}

/// All-aperture square function with polynomial weight exponent `lambda n`.
pub fn g_star_from_afield(af: &AField, params: GStarParams) -> Result<GridFunction> {
    let sums = square_sums(af, Aperture::GStar(params.lambda))?;
    Ok(sqrt_field(
        af.grid,
        sums,
        format!("g_star[lambda={}]", params.lambda),
    ))
}

/// Saturated-aperture square function: the cone sum over every lattice node.
/// Upper envelope of every finite aperture; used for decomposition tails.
pub fn s_full_from_afield(af: &AField) -> Result<GridFunction> {
    let sums = square_sums(af, Aperture::Full)?;
    Ok(sqrt_field(af.grid, sums, "s_full".into()))
}

/// `[S_{2^0}, ..., S_{2^{j_max}}]`, nondecreasing pointwise in j.
pub fn aperture_ladder_from_afield(af: &AField, j_max: usize) -> Result<Vec<GridFunction>> {
    let diam = 2.0 * af.grid.halfwidth * (af.grid.dim as f64).sqrt();
    if 2.0f64.powi(j_max as i32) * af.ladder.t_min() >= diam {
        return Err(Error::SaturatedAperture(
            2.0f64.powi(j_max as i32) * af.ladder.t_min(),
        ));
    }
    (0..=j_max)
        .map(|j| s_beta_from_afield(af, 2.0f64.powi(j as i32)))
        .collect()
}

// convenience one-shot wrappers ---------------------------------------------

pub fn s_beta(
    f: &GridFunction,
    dict: &KernelDictionary,
    gamma: f64,
    quad: &ConeQuadratureSpec,
) -> Result<GridFunction> {
    let ladder = quad.ladder_for(&f.grid)?;
    let af = a_beta_field(f, dict, &ladder, quad.stride)?;
    s_beta_from_afield(&af, gamma)
}

pub fn g_beta(
    f: &GridFunction,
    dict: &KernelDictionary,
    quad: &ConeQuadratureSpec,
) -> Result<GridFunction> {
    let ladder = quad.ladder_for(&f.grid)?;
    let af = a_beta_field(f, dict, &ladder, quad.stride)?;
    g_beta_from_afield(&af)
}

pub fn g_star(
    f: &GridFunction,
    dict: &KernelDictionary,
    params: GStarParams,
    quad: &ConeQuadratureSpec,
) -> Result<GridFunction> {
    let ladder = quad.ladder_for(&f.grid)?;
    let af = a_beta_field(f, dict, &ladder, quad.stride)?;
    g_star_from_afield(&af, params)
}

/// Single-kernel square function: the cone sum over a singleton dictionary.
pub fn s_psi(
    f: &GridFunction,
    kernel: &Kernel,
    gamma: f64,
    quad: &ConeQuadratureSpec,
) -> Result<GridFunction> {
    let ladder = quad.ladder_for(&f.grid)?;
    let af = a_field_for_kernels(f, std::slice::from_ref(kernel), &ladder, quad.stride)?;
    s_beta_from_afield(&af, gamma)
}

// decomposition and decay bounds --------------------------------------------

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct DecompositionCheck {
    pub lambda: f64,
    pub j_max: usize,
    pub tail_coeff: f64,
    /// max over x of (lhs - rhs)/max(rhs, tiny); <= 0 means the bound holds
    pub max_violation: f64,
    pub ok: bool,
}

/// Verifies `G*(x)^2 <= S(x)^2 + sum_j 2^{-(j-1) lambda n} S_{2^j}(x)^2 +
/// tail` on the computed lattice, with the tail of the truncated j-sum
/// bounded analytically by the saturated-aperture field:
/// `tail = 2^{-j_max lambda n} / (1 - 2^{-lambda n}) * S_full(x)^2`.
pub fn gstar_decomposition_check(
    af: &AField,
    params: GStarParams,
    j_max: usize,
    rel_tol: f64,
) -> Result<DecompositionCheck> {
    let n = af.grid.dim as f64;
    let lambda_n = params.lambda * n;
    let lhs = square_sums(af, Aperture::GStar(params.lambda))?;
    let mut rhs = square_sums(af, Aperture::Cone(1.0))?;
    for j in 1..=j_max {
        let coeff = 2.0f64.powf(-((j - 1) as f64) * lambda_n);
        let sj = square_sums(af, Aperture::Cone(2.0f64.powi(j as i32)))?;
        for (r, s) in rhs.iter_mut().zip(sj) {
            *r += coeff * s;
        }
    }
    let tail_coeff = 2.0f64.powf(-(j_max as f64) * lambda_n) / (1.0 - 2.0f64.powf(-lambda_n));
    let full = square_sums(af, Aperture::Full)?;
    for (r, s) in rhs.iter_mut().zip(full) {
        *r += tail_coeff * s;
    }
    let mut max_violation = f64::NEG_INFINITY;
    let mut ok = true;
    for (l, r) in lhs.iter().zip(&rhs) {
        let v = (l - r) / r.max(1e-300);
        max_violation = max_violation.max(v);
        if *l > r * (1.0 + rel_tol) {
            ok = false;
        }
    }
    Ok(DecompositionCheck {
        lambda: params.lambda,
        j_max,
        tail_coeff,
        max_violation,
        ok,
    })
}

/// Far-field decay constant `c(n) * 4^n` with `c(n) = sqrt(v_n / 2n)`:
/// outside twice the support radius, `S(f)(x) <= (1 + eps) c(n) 4^n
/// |x|^{-n} ||f||_1`. In n = 1 the constant is exactly 4.
pub fn far_field_constant(dim: usize) -> f64 {
    (unit_ball_volume(dim) / (2.0 * dim as f64)).sqrt() * 4.0f64.powi(dim as i32)
}

/// Analytic bound on the squared mass the all-aperture sum ignores outside
/// the sampled box, from `A <= (1+eps) t^{-n} min(||f||_1, v_n t^n ||f||_inf)`
/// and the closed-form exterior integral of the polynomial weight. Returns
/// the worst bound over grid points and that bound relative to the squared
/// peak of the computed field.
pub fn gstar_exterior_tail_bound(
    f: &GridFunction,
    gstar: &GridFunction,
    ladder: &TLadder,
    lambda: f64,
) -> (f64, f64) {
    let grid = &f.grid;
    let n = grid.dim as f64;
    let vol = grid.cell_volume();
    let l1: f64 = f.values.iter().map(|v| v.abs() * vol).sum();
    let linf = f.max_abs();
    // outside the box, A(y, t) = 0 unless the dilated support reaches the
    // support of f: t >= L - support_radius
    let reach = grid.halfwidth - f.support_radius(0.0);
    let mut worst_bound = 0.0f64;
    for idx in 0..grid.cell_count() {
        let x = grid.center(idx);
        let edge = (0..grid.dim)
            .map(|a| grid.halfwidth - x[a].abs())
            .fold(f64::INFINITY, f64::min);
        let mut tail2 = 0.0;
        for &t in &ladder.t_values {
            if t < reach {
                continue;
            }
            let a_bound = (1.0 + 1e-8) * (l1.min(unit_ball_volume(grid.dim) * t.powf(n) * linf))
                / t.powf(n);
            let exterior = match grid.dim {
                1 => 2.0 * t.powf(lambda) * (t + edge).powf(1.0 - lambda) / (lambda - 1.0),
                _ => {
                    let e2 = 2.0 * lambda;
                    2.0 * std::f64::consts::PI * t.powf(e2) * (t + edge).powf(2.0 - e2)
                        / (e2 - 2.0)
                }
            };
            tail2 += a_bound * a_bound * exterior * ladder.delta_log / t.powf(n);
        }
        worst_bound = worst_bound.max(tail2);
    }
    let peak2 = gstar.values.iter().fold(0.0f64, |m, v| m.max(v * v));
    let rel = if peak2 > 0.0 { worst_bound / peak2 } else { 0.0 };
    (worst_bound, rel)
}
