//! Dyadic annuli bookkeeping and the weighted Herz / weak Herz / weak
//! Lebesgue norms, with explicit truncation-tail accounting.
//!
//! Annulus membership is decided per cell center, so every covered cell
//! belongs to exactly one block and the alpha = 0 norms repartition the same
//! cell sums as the plain weighted Lebesgue norm (machine-precision
//! collapse). The finite window `[k_min, k_max]` leaves an inner residual
//! ball and an outer remainder; both are measured exactly and reported
//! rather than silently included.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{norm, pow_abs, Grid, GridFunction};
use crate::weights::{membership_check, BallFamily, MembershipCheck, Weight};

/// Dyadic ball radius `2^k`.
#[inline]
fn ball_radius(k: i32) -> f64 {
    2.0f64.powi(k)
}

/// Smallest k with `r <= 2^k` (the annulus index of `C_k = (2^{k-1}, 2^k]`).
fn annulus_index(r: f64) -> i32 {
    debug_assert!(r > 0.0);
    let mut k = r.log2().ceil() as i32;
    while r <= ball_radius(k - 1) {
        k -= 1;
    }
    while r > ball_radius(k) {
        k += 1;
    }
    k
}

/// Partition of the grid into dyadic blocks. In the homogeneous layout the
/// blocks are the annuli `C_k`, `k_min <= k <= k_max`; the non-homogeneous
/// layout merges everything inside the unit ball into block 0.
#[derive(Debug, Clone)]
pub struct Annuli {
    pub grid: Grid,
    pub k_min: i32,
    pub k_max: i32,
    pub homogeneous: bool,
    /// cells per block, in block order
    blocks: Vec<Vec<u32>>,
    /// annulus index k of each block
    block_k: Vec<i32>,
    /// cells inside the residual ball `B_{k_min - 1}` (homogeneous only)
    pub inner_cells: Vec<u32>,
    /// cells outside `B_{k_max}`
    pub outer_cells: Vec<u32>,
}

impl Annuli {
    pub fn new(grid: &Grid, k_min: i32, k_max: i32, homogeneous: bool) -> Result<Annuli> {
        let h = grid.cell_size();
        if k_min > k_max {
            return Err(Error::InvalidParameter(format!(
                "annuli window needs k_min <= k_max, got [{k_min}, {k_max}]"
            )));
        }
        if ball_radius(k_max) > grid.halfwidth * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "2^k_max = {} exceeds the halfwidth {}",
                ball_radius(k_max),
                grid.halfwidth
            )));
        }
        if homogeneous && ball_radius(k_min) < 2.0 * h * (1.0 - 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "2^k_min = {} under-resolves the grid (needs >= 2h = {})",
                ball_radius(k_min),
                2.0 * h
            )));
        }
        if !homogeneous && k_min != 0 {
            return Err(Error::InvalidParameter(
                "non-homogeneous window starts at k = 0".into(),
            ));
        }
        let n_blocks = (k_max - k_min + 1) as usize;
        let mut blocks = vec![Vec::new(); n_blocks];
        let block_k: Vec<i32> = (k_min..=k_max).collect();
        let mut inner_cells = Vec::new();
        let mut outer_cells = Vec::new();
        for idx in 0..grid.cell_count() {
            let r = norm(grid.center(idx));
            let k = annulus_index(r);
            if k > k_max {
                outer_cells.push(idx as u32);
            } else if k < k_min {
                if homogeneous {
                    inner_cells.push(idx as u32);
                } else {
                    blocks[0].push(idx as u32); // swallowed by B_0
                }
            } else {
                blocks[(k - k_min) as usize].push(idx as u32);
            }
        }
        Ok(Annuli {
            grid: *grid,
            k_min,
            k_max,
            homogeneous,
            blocks,
            block_k,
            inner_cells,
            outer_cells,
        })
    }

    /// Default window: `k_min = ceil(log2(4h))` (annuli thinner than that
    /// under-resolve), `k_max = floor(log2(L))`.
    pub fn default_window(grid: &Grid, homogeneous: bool) -> Result<Annuli> {
        let k_max = grid.halfwidth.log2().floor() as i32;
        let k_min = if homogeneous {
            (4.0 * grid.cell_size()).log2().ceil() as i32
        } else {
            0
        };
        Annuli::new(grid, k_min.min(k_max), k_max, homogeneous)
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_cells(&self, j: usize) -> &[u32] {
        &self.blocks[j]
    }

    pub fn block_annulus_index(&self, j: usize) -> i32 {
        self.block_k[j]
    }
}

/// Parameter tuple of the weighted Herz spaces: exponent `alpha`, outer
/// exponent `p`, inner Lebesgue exponent `q`, the two weights with their
/// declared Muckenhoupt classes `q1`, `q2`, and the homogeneous flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HerzParams {
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    pub q1: f64,
    pub q2: f64,
    pub w1: Weight,
    pub w2: Weight,
    pub homogeneous: bool,
}

impl HerzParams {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.p > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "herz p must be > 0, got {}",
                self.p
            )));
        }
        if !(self.q > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "herz q must be > 1, got {}",
                self.q
            )));
        }
        if !(self.q1 >= 1.0 && self.q2 >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "declared classes need q1, q2 >= 1, got {}, {}",
                self.q1, self.q2
            )));
        }
        self.w1.validate_for_dim(dim)?;
        self.w2.validate_for_dim(dim)?;
        Ok(())
    }

    /// Checks the declared memberships `w1 in A_{q1}`, `w2 in A_{q2}`
    /// against the weights oracle; errors when a declaration fails.
    pub fn validate_memberships(
        &self,
        grid: &Grid,
        family: &BallFamily,
    ) -> Result<(MembershipCheck, MembershipCheck)> {
        let c1 = membership_check(grid, &self.w1, self.q1, family)?;
        if !c1.in_class {
            return Err(Error::InvalidParameter(format!(
                "declared membership w1 in A_{} fails the oracle ({})",
                self.q1, c1.method
            )));
        }
        let c2 = membership_check(grid, &self.w2, self.q2, family)?;
        if !c2.in_class {
            return Err(Error::InvalidParameter(format!(
                "declared membership w2 in A_{} fails the oracle ({})",
                self.q2, c2.method
            )));
        }
        Ok((c1, c2))
    }
}

/// Mass the finite window leaves out, measured exactly over the cells the
/// window misses.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailReport {
    /// `L^q_{w2}` norm of `f` restricted to the residual inner ball
    pub inner_lq_mass: f64,
    /// `L^q_{w2}` norm of `f` outside `B_{k_max}`
    pub outer_lq_mass: f64,
    /// relative increase of the norm if the window were extended to cover
    /// every occupied cell (0 when the support sits inside the window)
    pub window_extension_relative: f64,
}

fn block_lq_mass_q(f: &GridFunction, cells: &[u32], q: f64, w2: &Weight) -> f64 {
    let vol = f.grid.cell_volume();
    let mut acc = 0.0;
    for &c in cells {
        let v = f.values[c as usize];
        if v != 0.0 {
            acc += pow_abs(v, q) * w2.eval(f.grid.center(c as usize)) * vol;
        }
    }
    acc
}

fn w1_ball(hp: &HerzParams, grid: &Grid, k: i32) -> Result<f64> {
    hp.w1.ball_measure(grid, [0.0, 0.0], ball_radius(k))
}

/// Weighted Herz norm over the annuli window, plus the tail report.
///
/// Homogeneous: `( sum_k [w1(B_k)]^{alpha p / n} ||f chi_k||_{L^q_{w2}}^p )^{1/p}`;
/// the non-homogeneous variant starts the sum at the merged unit ball.
pub fn herz_norm(f: &GridFunction, hp: &HerzParams, annuli: &Annuli) -> Result<(f64, TailReport)> {
    hp.validate(f.grid.dim)?;
    if annuli.homogeneous != hp.homogeneous {
        return Err(Error::InvalidParameter(
            "annuli layout does not match the homogeneous flag".into(),
        ));
    }
    let n = f.grid.dim as f64;
    let exponent = hp.alpha * hp.p / n;
    let mut total = 0.0;
    for j in 0..annuli.n_blocks() {
        let mass_q = block_lq_mass_q(f, annuli.block_cells(j), hp.q, &hp.w2);
        if mass_q == 0.0 {
            continue;
        }
        let w1k = w1_ball(hp, &f.grid, annuli.block_annulus_index(j))?;
        total += w1k.powf(exponent) * mass_q.powf(hp.p / hp.q);
    }
    let norm = total.powf(1.0 / hp.p);

    // exact extension over the cells the window misses, grouped by their
    // true annulus index
    let mut extra = 0.0;
    let mut inner_q = 0.0;
    let mut outer_q = 0.0;
    for (cells, acc_q) in [
        (&annuli.inner_cells, &mut inner_q),
        (&annuli.outer_cells, &mut outer_q),
    ] {
        if cells.is_empty() {
            continue;
        }
        let mut by_k: std::collections::BTreeMap<i32, f64> = std::collections::BTreeMap::new();
        let vol = f.grid.cell_volume();
        for &c in cells.iter() {
            let v = f.values[c as usize];
            if v == 0.0 {
                continue;
            }
            let z = f.grid.center(c as usize);
            let mass = pow_abs(v, hp.q) * hp.w2.eval(z) * vol;
            *acc_q += mass;
            *by_k.entry(annulus_index(crate::grid::norm(z))).or_insert(0.0) += mass;
        }
        for (k, mass_q) in by_k {
            let w1k = w1_ball(hp, &f.grid, k)?;
            extra += w1k.powf(exponent) * mass_q.powf(hp.p / hp.q);
        }
    }
    let extended = (total + extra).powf(1.0 / hp.p);
    let tail = TailReport {
        inner_lq_mass: inner_q.powf(1.0 / hp.q),
        outer_lq_mass: outer_q.powf(1.0 / hp.q),
        window_extension_relative: if norm > 0.0 {
            (extended - norm) / norm
        } else if extra > 0.0 {
            f64::INFINITY
        } else {
            0.0
        },
    };
    Ok((norm, tail))
}

// ---------------------------------------------------------------------------
// weak norms
// ---------------------------------------------------------------------------

/// Candidate levels for the weak-norm supremum: a geometric grid over the
/// positive range of `|f|` (ratio 1.05) plus, when there are at most 10^4 of
/// them, the exact distinct cell values. Grid functions are simple
/// functions, so with the jump set present the supremum is exact and the
/// reported discretization gap is zero.
#[derive(Debug, Clone)]
pub struct LevelGrid {
    pub geometric: Vec<f64>,
    pub jumps: Option<Vec<f64>>,
    /// relative slack of the level search: 0 with jumps, ratio - 1 without
    pub gap_bound: f64,
}

impl LevelGrid {
    pub fn for_function(f: &GridFunction) -> LevelGrid {
        let mut positives: Vec<f64> = f
            .values
            .iter()
            .map(|v| v.abs())
            .filter(|v| *v > 0.0)
            .collect();
        positives.sort_by(|a, b| a.partial_cmp(b).unwrap());
        positives.dedup();
        if positives.is_empty() {
            return LevelGrid {
                geometric: vec![],
                jumps: Some(vec![]),
                gap_bound: 0.0,
            };
        }
        let lo = positives[0];
        let hi = *positives.last().unwrap();
        let ratio: f64 = 1.05;
        let steps = ((hi / lo).ln() / ratio.ln()).ceil().max(1.0) as usize;
        let geometric = (0..=steps)
            .map(|i| lo * ratio.powi(i as i32))
            .collect::<Vec<_>>();
        if positives.len() <= 10_000 {
            LevelGrid {
                geometric,
                jumps: Some(positives),
                gap_bound: 0.0,
            }
        } else {
            LevelGrid {
                geometric,
                jumps: None,
                gap_bound: ratio - 1.0,
            }
        }
    }
}

/// Per-block level-set mass lookup: values sorted descending with cumulative
/// w-measure, so `w({|f| > lambda})` is one binary search.
struct BlockDistribution {
    /// |f| sorted descending over the block's occupied cells
    values: Vec<f64>,
    /// cumulative w-mass aligned with `values`
    cum_mass: Vec<f64>,
}

impl BlockDistribution {
    fn build(f: &GridFunction, cells: &[u32], w: &Weight) -> BlockDistribution {
        let vol = f.grid.cell_volume();
        let mut pairs: Vec<(f64, f64)> = cells
            .iter()
            .filter_map(|&c| {
                let v = f.values[c as usize].abs();
                if v > 0.0 {
                    Some((v, w.eval(f.grid.center(c as usize)) * vol))
                } else {
                    None
                }
            })
            .collect();
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        let mut cum = 0.0;
        let mut values = Vec::with_capacity(pairs.len());
        let mut cum_mass = Vec::with_capacity(pairs.len());
        for (v, m) in pairs {
            cum += m;
            values.push(v);
            cum_mass.push(cum);
        }
        BlockDistribution { values, cum_mass }
    }

    /// w-mass of `{|f| > lambda}` (strict) or `{|f| >= lambda}`.
    fn mass_above(&self, lambda: f64, strict: bool) -> f64 {
        let count = self
            .values
            .partition_point(|v| if strict { *v > lambda } else { *v >= lambda });
        if count == 0 {
            0.0
        } else {
            self.cum_mass[count - 1]
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeakNorm {
    pub value: f64,
    /// level at which the supremum was attained
    pub arg_level: f64,
    /// relative slack of the level search (0 when jump levels were exact)
    pub gap_bound: f64,
}

fn weak_norm_over_blocks(
    dists: &[(f64, BlockDistribution)], // (w1(B_k)^{alpha p/n}, distribution)
    p: f64,
    q: f64,
    levels: &LevelGrid,
) -> WeakNorm {
    let score = |lambda: f64, strict: bool| -> f64 {
        let mut total = 0.0;
        for (w1_factor, dist) in dists {
            let mass = dist.mass_above(lambda, strict);
            if mass > 0.0 {
                total += w1_factor * mass.powf(p / q);
            }
        }
        lambda * total.powf(1.0 / p)
    };
    let mut best = 0.0;
    let mut arg = 0.0;
    for &l in &levels.geometric {
        let s = score(l, true);
        if s > best {
            best = s;
            arg = l;
        }
    }
    if let Some(jumps) = &levels.jumps {
        // sup over lambda < v of lambda * w({|f| > lambda}) is attained in
        // the limit lambda -> v with the level set {|f| >= v}
        for &v in jumps {
            let s = score(v, false);
            if s > best {
                best = s;
                arg = v;
            }
        }
    }
    WeakNorm {
        value: best,
        arg_level: arg,
        gap_bound: levels.gap_bound,
    }
}

fn levels_are_empty(levels: &LevelGrid) -> bool {
    levels.geometric.is_empty() && levels.jumps.as_ref().map_or(true, |j| j.is_empty())
}

/// Weighted weak Herz norm:
/// `sup_l l ( sum_k [w1(B_k)]^{alpha p/n} [w2(E_k(l, f))]^{p/q} )^{1/p}`,
/// maximized over the level grid (exact at jumps for simple functions).
pub fn weak_herz_norm(
    f: &GridFunction,
    hp: &HerzParams,
    annuli: &Annuli,
    levels: &LevelGrid,
) -> Result<WeakNorm> {
    hp.validate(f.grid.dim)?;
    if levels_are_empty(levels) {
        if f.values.iter().all(|v| *v == 0.0) {
            return Ok(WeakNorm {
                value: 0.0,
                arg_level: 0.0,
                gap_bound: 0.0,
            });
        }
        return Err(Error::InvalidParameter("empty level grid".into()));
    }
    let n = f.grid.dim as f64;
    let exponent = hp.alpha * hp.p / n;
    let mut dists = Vec::with_capacity(annuli.n_blocks());
    for j in 0..annuli.n_blocks() {
        let w1k = w1_ball(hp, &f.grid, annuli.block_annulus_index(j))?.powf(exponent);
        dists.push((
            w1k,
            BlockDistribution::build(f, annuli.block_cells(j), &hp.w2),
        ));
    }
    Ok(weak_norm_over_blocks(&dists, hp.p, hp.q, levels))
}

/// Weak weighted Lebesgue norm `sup_l l * w({|f| > l})^{1/q}` — the single
/// whole-domain region case.
pub fn weak_lq_norm(f: &GridFunction, q: f64, w: &Weight, levels: &LevelGrid) -> Result<WeakNorm> {
    if !(q > 0.0) {
        return Err(Error::InvalidParameter(format!("q must be > 0, got {q}")));
    }
    if levels_are_empty(levels) {
        if f.values.iter().all(|v| *v == 0.0) {
            return Ok(WeakNorm {
                value: 0.0,
                arg_level: 0.0,
                gap_bound: 0.0,
            });
        }
        return Err(Error::InvalidParameter("empty level grid".into()));
    }
    let all: Vec<u32> = (0..f.grid.cell_count() as u32).collect();
    let dist = BlockDistribution::build(f, &all, w);
    Ok(weak_norm_over_blocks(&[(1.0, dist)], q, q, levels))
}
