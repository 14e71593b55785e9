//! Weight functions, weighted ball measures, Muckenhoupt characteristic and
//! reverse Hölder estimation, doubling and measure-comparison checks.
//!
//! The "for every ball" quantifier of the defining inequalities becomes a
//! finite deterministic [`BallFamily`] (origin always included, since
//! origin-centered balls are extremal for the power weights used as oracles).
//! Every estimated constant is therefore a lower bound of the true one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{dist, norm, Grid, GridFunction, Point, RegionSpec};

/// Volume of the unit ball in `R^n` for the supported dimensions.
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        _ => std::f64::consts::PI,
    }
}

/// Nonnegative weight on the grid domain. Power exponents must satisfy
/// `a > -n` (local integrability); cell centers never hit the origin, so
/// negative exponents stay finite on every cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Weight {
    Constant { c: f64 },
    Power { a: f64 },
    Product { left: Box<Weight>, right: Box<Weight> },
    Sampled { field: GridFunction },
}

impl Weight {
    pub fn constant(c: f64) -> Weight {
        Weight::Constant { c }
    }

    pub fn power(a: f64) -> Weight {
        Weight::Power { a }
    }

    pub fn validate_for_dim(&self, dim: usize) -> Result<()> {
        match self {
            Weight::Constant { c } => {
                if !(*c > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "constant weight must be positive, got {c}"
                    )));
                }
            }
            Weight::Power { a } => {
                if !(*a > -(dim as f64)) {
                    return Err(Error::InvalidParameter(format!(
                        "power weight exponent must exceed -n = {}, got {a}",
                        -(dim as f64)
                    )));
                }
            }
            Weight::Product { left, right } => {
                left.validate_for_dim(dim)?;
                right.validate_for_dim(dim)?;
            }
            Weight::Sampled { field } => {
                if field.grid.dim != dim {
                    return Err(Error::InvalidParameter(
                        "sampled weight dimension mismatch".into(),
                    ));
                }
                if field.values.iter().any(|v| *v < 0.0) {
                    return Err(Error::InvalidParameter(
                        "sampled weight has negative values".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, p: Point) -> f64 {
        match self {
            Weight::Constant { c } => *c,
            Weight::Power { a } => norm(p).powf(*a),
            Weight::Product { left, right } => left.eval(p) * right.eval(p),
            Weight::Sampled { field } => {
                let g = &field.grid;
                let h = g.cell_size();
                let clamp = |x: f64| {
                    (((x + g.halfwidth) / h).floor() as i64)
                        .clamp(0, g.points_per_axis as i64 - 1) as usize
                };
                let idx = match g.dim {
                    1 => clamp(p[0]),
                    _ => clamp(p[1]) * g.points_per_axis + clamp(p[0]),
                };
                field.values[idx]
            }
        }
    }

    /// Closed-form measure of the origin-centered ball `B(0, r)`, where one
    /// exists (constant weights, and power weights which integrate to
    /// `2 r^{a+1}/(a+1)` in n = 1 and `2 pi r^{a+2}/(a+2)` in n = 2).
    pub fn closed_form_origin_ball(&self, r: f64, dim: usize) -> Option<f64> {
        match self {
            Weight::Constant { c } => Some(c * unit_ball_volume(dim) * r.powi(dim as i32)),
            Weight::Power { a } => match dim {
                1 => Some(2.0 * r.powf(a + 1.0) / (a + 1.0)),
                _ => Some(2.0 * std::f64::consts::PI * r.powf(a + 2.0) / (a + 2.0)),
            },
            _ => None,
        }
    }

    /// Weighted ball measure `w(B(center, r))`: closed form for
    /// origin-centered balls when available, otherwise a cell sum.
    pub fn ball_measure(&self, grid: &Grid, center: Point, radius: f64) -> Result<f64> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        if norm(center) == 0.0 {
            if let Some(v) = self.closed_form_origin_ball(radius, grid.dim) {
                return Ok(v);
            }
        }
        if matches!(self, Weight::Sampled { .. }) && !grid.contains_ball(center, radius) {
            return Err(Error::Region(
                "ball exceeds the domain of a sampled weight".into(),
            ));
        }
        let vol = grid.cell_volume();
        let mut acc = 0.0;
        for idx in 0..grid.cell_count() {
            let z = grid.center(idx);
            if dist(z, center) <= radius {
                acc += self.eval(z) * vol;
            }
        }
        Ok(acc)
    }
}

/// Finite surrogate for the "every ball" quantifier: coarse centers plus the
/// origin, radii on a geometric ladder. Deterministic enumeration order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ball {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallFamily {
    pub balls: Vec<Ball>,
}

impl BallFamily {
    /// Radii `L, L/2, ...` down to `min_radius`; centers on a fixed coarse
    /// sub-grid plus the origin; only balls inside `[-L, L]^dim` are kept.
    /// Anchoring `min_radius` at a physical length (not at the cell size)
    /// makes the family identical across grid refinements.
    pub fn standard(dim: usize, halfwidth: f64, min_radius: f64) -> Result<BallFamily> {
        if !(min_radius > 0.0 && min_radius <= halfwidth) {
            return Err(Error::InvalidParameter(format!(
                "min_radius must lie in (0, halfwidth], got {min_radius}"
            )));
        }
        let l = halfwidth;
        let mut centers: Vec<Point> = vec![[0.0, 0.0]];
        let offsets = [l / 8.0, l / 4.0, l / 2.0];
        for o in offsets {
            centers.push([o, 0.0]);
            centers.push([-o, 0.0]);
            if dim == 2 {
                centers.push([0.0, o]);
                centers.push([0.0, -o]);
                centers.push([o, o]);
                centers.push([-o, -o]);
            }
        }
        let mut balls = Vec::new();
        let mut r = l;
        while r >= min_radius * (1.0 - 1e-12) {
            for c in &centers {
                let fits = (0..dim).all(|a| c[a].abs() + r <= l + 1e-12);
                if fits {
                    balls.push(Ball { center: *c, radius: r });
                }
            }
            r /= 2.0;
        }
        if balls.is_empty() {
            return Err(Error::InvalidParameter("empty ball family".into()));
        }
        Ok(BallFamily { balls })
    }

    /// Origin-centered balls only (the extremal sub-family for power weights).
    pub fn origin_only(halfwidth: f64, min_radius: f64) -> Result<BallFamily> {
        let mut balls = Vec::new();
        let mut r = halfwidth;
        while r >= min_radius * (1.0 - 1e-12) {
            balls.push(Ball {
                center: [0.0, 0.0],
                radius: r,
            });
            r /= 2.0;
        }
        if balls.is_empty() {
            return Err(Error::InvalidParameter("empty ball family".into()));
        }
        Ok(BallFamily { balls })
    }
}

/// Discrete average of `g(w)` over the cells of a ball. Averages divide by
/// the cell count, so constant weights give exact ratios.
fn ball_avg(grid: &Grid, w: &Weight, ball: &Ball, g: impl Fn(f64) -> f64) -> (f64, usize) {
    let mut acc = 0.0;
    let mut count = 0usize;
    for idx in 0..grid.cell_count() {
        let z = grid.center(idx);
        if dist(z, ball.center) <= ball.radius {
            acc += g(w.eval(z));
            count += 1;
        }
    }
    (if count > 0 { acc / count as f64 } else { 0.0 }, count)
}

/// Lower-bound estimate of the A_p characteristic over a ball family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApEstimate {
    pub p: f64,
    pub value: f64,
    pub worst_ball: usize,
}

/// A_p product on one ball: `(avg w)(avg w^{-1/(p-1)})^{p-1}` for p > 1,
/// `(avg w)/(min w)` for p = 1.
fn ap_product(grid: &Grid, w: &Weight, ball: &Ball, p: f64) -> f64 {
    if p > 1.0 {
        let e = -1.0 / (p - 1.0);
        let (avg_w, n1) = ball_avg(grid, w, ball, |v| v);
        let (avg_inv, _) = ball_avg(grid, w, ball, |v| v.powf(e));
        if n1 == 0 {
            return 0.0;
        }
        avg_w * avg_inv.powf(p - 1.0)
    } else {
        let (avg_w, n1) = ball_avg(grid, w, ball, |v| v);
        if n1 == 0 {
            return 0.0;
        }
        let mut min_w = f64::INFINITY;
        for idx in 0..grid.cell_count() {
            let z = grid.center(idx);
            if dist(z, ball.center) <= ball.radius {
                min_w = min_w.min(w.eval(z));
            }
        }
        if min_w <= 0.0 {
            f64::INFINITY
        } else {
            avg_w / min_w
        }
    }
}

pub fn ap_characteristic(
    grid: &Grid,
    w: &Weight,
    p: f64,
    family: &BallFamily,
) -> Result<ApEstimate> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("A_p needs p >= 1, got {p}")));
    }
    w.validate_for_dim(grid.dim)?;
    let mut best = 0.0;
    let mut worst = 0;
    for (i, ball) in family.balls.iter().enumerate() {
        let v = ap_product(grid, w, ball, p);
        if v > best {
            best = v;
            worst = i;
        }
    }
    Ok(ApEstimate {
        p,
        value: best,
        worst_ball: worst,
    })
}

/// Reverse Hölder constant estimate: max over the family of
/// `(avg w^r)^{1/r} / (avg w)`.
pub fn rh_constant(grid: &Grid, w: &Weight, r: f64, family: &BallFamily) -> Result<f64> {
    if !(r > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "reverse Hölder needs r > 1, got {r}"
        )));
    }
    let mut best = 0.0f64;
    for ball in &family.balls {
        let (avg_w, count) = ball_avg(grid, w, ball, |v| v);
        if count == 0 || avg_w == 0.0 {
            continue;
        }
        let (avg_wr, _) = ball_avg(grid, w, ball, |v| v.powf(r));
        best = best.max(avg_wr.powf(1.0 / r) / avg_w);
    }
    Ok(best)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoublingReport {
    pub lambda: f64,
    pub p: f64,
    /// max over tested balls of `w(lambda B) / (lambda^{np} w(B))`
    pub max_ratio: f64,
    pub tested: usize,
    pub skipped: usize,
    pub pass: bool,
}

/// Checks `w(lambda B) <= C lambda^{np} w(B)` with C = measured A_p
/// characteristic times slack 1.5. Balls whose dilate leaves the domain are
/// skipped and counted.
pub fn doubling_check(
    grid: &Grid,
    w: &Weight,
    family: &BallFamily,
    lambda: f64,
    p: f64,
    ap_value: f64,
) -> Result<DoublingReport> {
    if !(lambda > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "doubling needs lambda > 1, got {lambda}"
        )));
    }
    let np = grid.dim as f64 * p;
    let mut max_ratio = 0.0f64;
    let mut tested = 0;
    let mut skipped = 0;
    for ball in &family.balls {
        let big = lambda * ball.radius;
        let fits = (0..grid.dim).all(|a| ball.center[a].abs() + big <= grid.halfwidth + 1e-12);
        if !fits {
            skipped += 1;
            continue;
        }
        let m_small = w.ball_measure(grid, ball.center, ball.radius)?;
        let m_big = w.ball_measure(grid, ball.center, big)?;
        if m_small > 0.0 {
            max_ratio = max_ratio.max(m_big / (lambda.powf(np) * m_small));
            tested += 1;
        }
    }
    Ok(DoublingReport {
        lambda,
        p,
        max_ratio,
        tested,
        skipped,
        pass: max_ratio <= ap_value * 1.5,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairQuotients {
    /// `(w(E)/w(B)) / (|E|/|B|)^p` — should stay bounded away from 0
    pub q_low: f64,
    /// `(w(E)/w(B)) / (|E|/|B|)^{(r-1)/r}` — should stay bounded above
    pub q_high: f64,
    pub lebesgue_fraction: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureComparisonReport {
    pub p: f64,
    pub r: f64,
    pub pairs: Vec<PairQuotients>,
    pub min_q_low: f64,
    pub max_q_high: f64,
}

/// For subsets `E` of balls `B`, records both quotients of the sandwich
/// `C1 (|E|/|B|)^p <= w(E)/w(B) <= C2 (|E|/|B|)^{(r-1)/r}`. The constants
/// are not asserted (they are not explicit); the envelopes are reported.
pub fn measure_comparison_check(
    grid: &Grid,
    w: &Weight,
    p: f64,
    r: f64,
    pairs: &[(RegionSpec, Ball)],
) -> Result<MeasureComparisonReport> {
    let vol = grid.cell_volume();
    let mut out = Vec::with_capacity(pairs.len());
    for (region, ball) in pairs {
        region.validate()?;
        if !region.subset_of_ball(ball.center, ball.radius) {
            return Err(Error::Region(
                "measure comparison pair: E is not a subset of B".into(),
            ));
        }
        let mut w_e = 0.0;
        let mut w_b = 0.0;
        let mut leb_e = 0.0;
        let mut leb_b = 0.0;
        for idx in 0..grid.cell_count() {
            let z = grid.center(idx);
            if dist(z, ball.center) <= ball.radius {
                let wv = w.eval(z) * vol;
                w_b += wv;
                leb_b += vol;
                if region.contains(z) {
                    w_e += wv;
                    leb_e += vol;
                }
            }
        }
        if w_b == 0.0 || leb_b == 0.0 {
            continue;
        }
        let frac_w = w_e / w_b;
        let frac_leb = leb_e / leb_b;
        out.push(PairQuotients {
            q_low: frac_w / frac_leb.powf(p),
            q_high: frac_w / frac_leb.powf((r - 1.0) / r),
            lebesgue_fraction: frac_leb,
        });
    }
    let min_q_low = out.iter().map(|p| p.q_low).fold(f64::INFINITY, f64::min);
    let max_q_high = out.iter().map(|p| p.q_high).fold(0.0, f64::max);
    Ok(MeasureComparisonReport {
        p,
        r,
        pairs: out,
        min_q_low,
        max_q_high,
    })
}

/// Analytic membership oracle for power weights: `|x|^a` lies in `A_p(R^n)`
/// iff `-n < a < n(p-1)` for p > 1, and `-n < a <= 0` for p = 1.
pub fn power_in_ap(a: f64, p: f64, dim: usize) -> bool {
    let n = dim as f64;
    if p > 1.0 {
        a > -n && a < n * (p - 1.0)
    } else {
        a > -n && a <= 0.0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MembershipCheck {
    pub in_class: bool,
    pub method: String,
    /// A_p estimates at successive 4x grid refinements (empirical method).
    pub levels: Vec<f64>,
}

/// Declared-membership verification. Constant and power weights use the
/// analytic rule; other kinds fall back to the refinement criterion: the
/// estimate must move less than 5% per 4x grid refinement to count as a
/// member, and a >= 2x growth per level counts as divergence.
pub fn membership_check(
    grid: &Grid,
    w: &Weight,
    p: f64,
    family: &BallFamily,
) -> Result<MembershipCheck> {
    match w {
        Weight::Constant { .. } => Ok(MembershipCheck {
            in_class: true,
            method: "analytic:constant".into(),
            levels: vec![],
        }),
        Weight::Power { a } => Ok(MembershipCheck {
            in_class: power_in_ap(*a, p, grid.dim),
            method: "analytic:power".into(),
            levels: vec![],
        }),
        _ => {
            let mut levels = Vec::new();
            let mut g = *grid;
            for _ in 0..3 {
                levels.push(ap_characteristic(&g, w, p, family)?.value);
                g = g.refined(4)?;
            }
            let growth = levels[2] / levels[0].max(1e-300);
            let stable = (levels[1] - levels[0]).abs() <= 0.05 * levels[0]
                && (levels[2] - levels[1]).abs() <= 0.05 * levels[1];
            Ok(MembershipCheck {
                in_class: stable && growth < 2.0,
                method: "empirical:refinement".into(),
                levels,
            })
        }
    }
}

/// Bundle of the estimated constants for one weight.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightReport {
    pub ap: ApEstimate,
    pub rh: f64,
    pub rh_order: f64,
    pub doubling: DoublingReport,
}

pub fn weight_report(
    grid: &Grid,
    w: &Weight,
    p: f64,
    rh_order: f64,
    lambda: f64,
    family: &BallFamily,
) -> Result<WeightReport> {
    let ap = ap_characteristic(grid, w, p, family)?;
    let rh = rh_constant(grid, w, rh_order, family)?;
    let doubling = doubling_check(grid, w, family, lambda, p, ap.value)?;
    Ok(WeightReport {
        ap,
        rh,
        rh_order,
        doubling,
    })
}
