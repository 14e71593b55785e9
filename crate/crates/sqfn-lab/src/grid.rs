//! Uniform discretization of `[-L, L]^n` (n = 1 or 2), cell-based quadrature,
//! weighted `L^q` norms, and level-set measures.
//!
//! Cells are indexed row-major; cell centers sit at `-L + (i + 1/2) h` per
//! axis with `h = 2L/m`. The cell count per axis `m` must be even so that no
//! cell center lands on the origin, which keeps singular power weights
//! `|x|^a` (a > -n) evaluable everywhere without special cases.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::Weight;

/// A point in the grid domain. For `dim == 1` the second coordinate is 0.
pub type Point = [f64; 2];

pub fn norm(p: Point) -> f64 {
    (p[0] * p[0] + p[1] * p[1]).sqrt()
}

pub fn dist(a: Point, b: Point) -> f64 {
    norm([a[0] - b[0], a[1] - b[1]])
}

/// Uniform cell grid over `[-L, L]^dim` with `m` cells per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub halfwidth: f64,
    pub points_per_axis: usize,
}

impl Grid {
    /// Build a grid; `m` must be even and at least 8, `dim` 1 or 2.
    pub fn new(dim: usize, halfwidth: f64, points_per_axis: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}")));
        }
        if !(halfwidth.is_finite() && halfwidth > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "halfwidth must be positive, got {halfwidth}"
            )));
        }
        if points_per_axis < 8 {
            return Err(Error::InvalidGrid(format!(
                "points_per_axis must be >= 8, got {points_per_axis}"
            )));
        }
        if points_per_axis % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points_per_axis must be even (odd m puts a node at the origin), got {points_per_axis}"
            )));
        }
        Ok(Grid {
            dim,
            halfwidth,
            points_per_axis,
        })
    }

    /// Cell size along each axis.
    pub fn cell_size(&self) -> f64 {
        2.0 * self.halfwidth / self.points_per_axis as f64
    }

    /// Total number of cells, `m^dim`.
    pub fn cell_count(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    /// Quadrature weight of one cell, `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.cell_size().powi(self.dim as i32)
    }

    /// Coordinate of the cell center along one axis.
    #[inline]
    pub fn axis_center(&self, i: usize) -> f64 {
        -self.halfwidth + (i as f64 + 0.5) * self.cell_size()
    }

    /// Center of the cell with flat index `idx` (row-major).
    #[inline]
    pub fn center(&self, idx: usize) -> Point {
        match self.dim {
            1 => [self.axis_center(idx), 0.0],
            _ => {
                let m = self.points_per_axis;
                [self.axis_center(idx % m), self.axis_center(idx / m)]
            }
        }
    }

    /// Grid with the same domain and `factor` times as many cells per axis.
    pub fn refined(&self, factor: usize) -> Result<Grid> {
        Grid::new(self.dim, self.halfwidth, self.points_per_axis * factor)
    }

    /// True when the ball `B(center, radius)` lies inside `[-L, L]^dim`.
    pub fn contains_ball(&self, center: Point, radius: f64) -> bool {
        (0..self.dim).all(|a| center[a] - radius >= -self.halfwidth && center[a] + radius <= self.halfwidth)
    }
}

/// Analytic field specification: the provenance-carrying way to build a
/// [`GridFunction`]. All variants are closed-form, so resampling the same
/// spec on a refined grid yields the same underlying function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FieldSpec {
    Zero,
    Constant {
        value: f64,
    },
    /// Indicator of the annulus `inner < |x| <= outer`.
    AnnulusIndicator {
        inner: f64,
        outer: f64,
    },
    /// Compactly supported bump `amp * (1 - (|x-c|/radius)^2)^k`.
    Bump {
        center: [f64; 2],
        radius: f64,
        k: u32,
        amp: f64,
    },
    Gaussian {
        center: [f64; 2],
        sigma: f64,
        amp: f64,
    },
    /// Seeded piecewise-constant values on dyadic blocks (2^level per axis),
    /// masked to the annulus `inner_cut < |x| <= outer_cut`. Block values
    /// depend only on (seed, block index), not on the grid resolution.
    DyadicNoise {
        seed: u64,
        level: u32,
        amp: f64,
        inner_cut: f64,
        outer_cut: f64,
    },
    Sum(Vec<FieldSpec>),
    Scaled {
        factor: f64,
        inner: Box<FieldSpec>,
    },
}

/// SplitMix64 step; used to hash dyadic block indices into values.
pub(crate) fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl FieldSpec {
    pub fn eval(&self, p: Point, grid: &Grid) -> f64 {
        match self {
            FieldSpec::Zero => 0.0,
            FieldSpec::Constant { value } => *value,
            FieldSpec::AnnulusIndicator { inner, outer } => {
                let r = norm(p);
                if r > *inner && r <= *outer {
                    1.0
                } else {
                    0.0
                }
            }
            FieldSpec::Bump {
                center,
                radius,
                k,
                amp,
            } => {
                let u = dist(p, *center) / radius;
                if u >= 1.0 {
                    0.0
                } else {
                    amp * (1.0 - u * u).powi(*k as i32)
                }
            }
            FieldSpec::Gaussian { center, sigma, amp } => {
                let u = dist(p, *center) / sigma;
                amp * (-u * u).exp()
            }
            FieldSpec::DyadicNoise {
                seed,
                level,
                amp,
                inner_cut,
                outer_cut,
            } => {
                let r = norm(p);
                if r <= *inner_cut || r > *outer_cut {
                    return 0.0;
                }
                let blocks = 1u64 << level;
                let width = 2.0 * grid.halfwidth / blocks as f64;
                let mut key = *seed;
                for a in 0..grid.dim {
                    let b = (((p[a] + grid.halfwidth) / width).floor() as i64)
                        .clamp(0, blocks as i64 - 1) as u64;
                    key = splitmix64(key ^ (b.wrapping_add(0x1234_5678 * (a as u64 + 1))));
                }
                // uniform in [-1, 1]
                let u = (key >> 11) as f64 / (1u64 << 53) as f64;
                amp * (2.0 * u - 1.0)
            }
            FieldSpec::Sum(parts) => parts.iter().map(|s| s.eval(p, grid)).sum(),
            FieldSpec::Scaled { factor, inner } => factor * inner.eval(p, grid),
        }
    }
}

/// A sampled scalar field: the object every operator acts on.
/// Values are finite by construction and immutable after sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<f64>,
    /// Where the values came from: a serialized [`FieldSpec`], a file path,
    /// or an operator description.
    pub provenance: String,
}

impl GridFunction {
    /// Sample an analytic field spec at every cell center.
    pub fn sample(spec: &FieldSpec, grid: &Grid) -> Result<GridFunction> {
        let provenance =
            serde_json::to_string(spec).unwrap_or_else(|_| "unserializable field".into());
        let mut values = Vec::with_capacity(grid.cell_count());
        for idx in 0..grid.cell_count() {
            let p = grid.center(idx);
            let v = spec.eval(p, grid);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    what: provenance,
                    index: idx,
                    coords: p[..grid.dim].to_vec(),
                    value: v,
                });
            }
            values.push(v);
        }
        Ok(GridFunction {
            grid: *grid,
            values,
            provenance,
        })
    }

    /// Wrap raw values (e.g. operator output). Rejects non-finite entries.
    pub fn from_values(grid: Grid, values: Vec<f64>, provenance: impl Into<String>) -> Result<Self> {
        let provenance = provenance.into();
        if values.len() != grid.cell_count() {
            return Err(Error::InvalidGrid(format!(
                "value vector length {} does not match cell count {}",
                values.len(),
                grid.cell_count()
            )));
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: provenance,
                index: idx,
                coords: grid.center(idx)[..grid.dim].to_vec(),
                value: values[idx],
            });
        }
        Ok(GridFunction {
            grid,
            values,
            provenance,
        })
    }

    pub fn scaled(&self, c: f64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
            provenance: format!("scaled({c}) of {}", self.provenance),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Smallest `R` with `|f| <= threshold` outside `B(0, R)`, over cells.
    pub fn support_radius(&self, threshold: f64) -> f64 {
        let mut r = 0.0f64;
        for (idx, v) in self.values.iter().enumerate() {
            if v.abs() > threshold {
                r = r.max(norm(self.grid.center(idx)));
            }
        }
        r
    }
}

/// Weighted `L^q` norm `(sum |f_i|^q w(z_i) h^n)^{1/q}`, midpoint quadrature.
pub fn lq_norm_weighted(f: &GridFunction, q: f64, w: &Weight) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::InvalidParameter(format!("q must be > 0, got {q}")));
    }
    let vol = f.grid.cell_volume();
    let mut acc = 0.0;
    for (idx, v) in f.values.iter().enumerate() {
        if *v == 0.0 {
            continue;
        }
        let z = f.grid.center(idx);
        acc += pow_abs(*v, q) * w.eval(z) * vol;
    }
    Ok(acc.powf(1.0 / q))
}

/// `|v|^q` with exact fast paths for q = 1 and q = 2.
#[inline]
pub fn pow_abs(v: f64, q: f64) -> f64 {
    if q == 2.0 {
        v * v
    } else if q == 1.0 {
        v.abs()
    } else {
        v.abs().powf(q)
    }
}

/// A measurable region of the domain used by level-set bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RegionSpec {
    Ball { center: [f64; 2], radius: f64 },
    Annulus { inner: f64, outer: f64 },
    WholeDomain,
}

impl RegionSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            RegionSpec::Ball { radius, .. } if !(*radius > 0.0) => Err(Error::Region(format!(
                "ball radius must be positive, got {radius}"
            ))),
            RegionSpec::Annulus { inner, outer } if !(*inner < *outer) || *inner < 0.0 => {
                Err(Error::Region(format!(
                    "annulus needs 0 <= inner < outer, got ({inner}, {outer})"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match self {
            RegionSpec::Ball { center, radius } => dist(p, *center) <= *radius,
            RegionSpec::Annulus { inner, outer } => {
                let r = norm(p);
                r > *inner && r <= *outer
            }
            RegionSpec::WholeDomain => true,
        }
    }

    /// True when the region is contained in the ball `B(center, radius)`
    /// (used to validate E ⊂ B pairs).
    pub fn subset_of_ball(&self, center: Point, radius: f64) -> bool {
        match self {
            RegionSpec::Ball {
                center: c,
                radius: r,
            } => dist(*c, center) + r <= radius + 1e-12,
            // annuli are origin-centered: the farthest point sits at
            // distance |center| + outer
            RegionSpec::Annulus { outer, .. } => norm(center) + *outer <= radius + 1e-12,
            RegionSpec::WholeDomain => false,
        }
    }
}

/// w-measure of `{x in region : |f(x)| > level}` by cell sums.
/// Nonincreasing in `level`, additive over disjoint regions.
pub fn distribution_set_measure(
    f: &GridFunction,
    level: f64,
    region: &RegionSpec,
    w: &Weight,
) -> Result<f64> {
    if !(level > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "level must be > 0, got {level}"
        )));
    }
    region.validate()?;
    let vol = f.grid.cell_volume();
    let mut acc = 0.0;
    for (idx, v) in f.values.iter().enumerate() {
        if v.abs() > level {
            let z = f.grid.center(idx);
            if region.contains(z) {
                acc += w.eval(z) * vol;
            }
        }
    }
    Ok(acc)
}

/// CSV export: a `dim,halfwidth,m` header, one metadata row, then one value
/// per line in row-major order. Values print in shortest round-trip form.
pub fn write_csv(f: &GridFunction, path: &std::path::Path) -> Result<()> {
    let mut out = String::with_capacity(f.values.len() * 20 + 64);
    out.push_str("dim,halfwidth,m\n");
    out.push_str(&format!(
        "{},{},{}\n",
        f.grid.dim, f.grid.halfwidth, f.grid.points_per_axis
    ));
    for v in &f.values {
        out.push_str(&format!("{v}\n"));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn read_csv(path: &std::path::Path) -> Result<GridFunction> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut lines = text.lines();
    let bad = |message: &str| Error::Malformed {
        path: path.display().to_string(),
        message: message.into(),
    };
    let header = lines.next().ok_or_else(|| bad("empty file"))?;
    if header.trim() != "dim,halfwidth,m" {
        return Err(bad("expected header `dim,halfwidth,m`"));
    }
    let meta = lines.next().ok_or_else(|| bad("missing metadata row"))?;
    let parts: Vec<&str> = meta.trim().split(',').collect();
    if parts.len() != 3 {
        return Err(bad("metadata row must have 3 fields"));
    }
    let dim: usize = parts[0].parse().map_err(|_| bad("bad dim"))?;
    let halfwidth: f64 = parts[1].parse().map_err(|_| bad("bad halfwidth"))?;
    let m: usize = parts[2].parse().map_err(|_| bad("bad m"))?;
    let grid = Grid::new(dim, halfwidth, m)?;
    let mut values = Vec::with_capacity(grid.cell_count());
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        values.push(line.parse::<f64>().map_err(|_| bad("bad value line"))?);
    }
    GridFunction::from_values(grid, values, format!("file:{}", path.display()))
}
