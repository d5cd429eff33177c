//! Reconstruction-error accounting.
//!
//! Three error views compare an actual rain region with a modeled contour:
//! integrated squared error between curves on the angular grid, the area of
//! the symmetric difference as a percentage of the actual area, and the
//! direction-specific error `p_theta` measured along rays. Report helpers
//! pick quartiles and the best/median/worst exemplars.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon};
use crate::starhull::{cast_ray, AngularGrid, RadialFunction};

/// A star-shaped contour sampled on the angular grid: the modeled outline
/// of a region, radii measured from its reference point.
#[derive(Clone, Debug)]
pub struct StarContour {
    ref_point: Point,
    grid: AngularGrid,
    radii: Vec<f64>,
}

impl StarContour {
    pub fn new(ref_point: Point, grid: AngularGrid, radii: Vec<f64>) -> Result<Self> {
        if radii.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} radii on a grid of {}",
                radii.len(),
                grid.len()
            )));
        }
        if radii.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidArgument("non-finite radius".into()));
        }
        Ok(StarContour { ref_point, grid, radii })
    }

    pub fn from_radial(rf: &RadialFunction) -> StarContour {
        StarContour {
            ref_point: rf.ref_point,
            grid: rf.grid,
            radii: rf.values.clone(),
        }
    }

    pub fn ref_point(&self) -> Point {
        self.ref_point
    }

    pub fn grid(&self) -> &AngularGrid {
        &self.grid
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Radius at an arbitrary angle by periodic linear interpolation.
    pub fn radius_at(&self, theta: f64) -> f64 {
        let m = self.grid.len();
        let u = theta.rem_euclid(std::f64::consts::TAU) / self.grid.step();
        let t0 = (u as usize).min(m - 1);
        let frac = u - t0 as f64;
        let t1 = (t0 + 1) % m;
        (1.0 - frac) * self.radii[t0] + frac * self.radii[t1]
    }

    pub fn contains(&self, p: Point) -> bool {
        let d = p - self.ref_point;
        let r = d.norm();
        r <= self.radius_at(d.y.atan2(d.x))
    }

    /// Sampled outline points, for plotting and bounding boxes.
    pub fn outline(&self) -> Vec<Point> {
        self.grid
            .thetas()
            .zip(&self.radii)
            .map(|(th, &r)| {
                Point::new(
                    self.ref_point.x + r.max(0.0) * th.cos(),
                    self.ref_point.y + r.max(0.0) * th.sin(),
                )
            })
            .collect()
    }
}

/// Integrated squared error between two curves on the grid, with quadrature
/// weight `2 pi / m`.
pub fn ise(curve: &[f64], approximation: &[f64], grid: &AngularGrid) -> Result<f64> {
    if curve.len() != grid.len() || approximation.len() != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "curves of {} and {} values on a grid of {}",
            curve.len(),
            approximation.len(),
            grid.len()
        )));
    }
    Ok(curve
        .iter()
        .zip(approximation)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        * grid.step())
}

/// Area of the symmetric difference between the actual region and the
/// modeled contour, as a percentage of the actual area.
///
/// Both shapes are rasterized on a shared grid of `raster_cell_km` cells
/// anchored at their joint bounding box, and exclusive cells are counted.
/// Anchoring at the joint box makes the estimate translation invariant.
pub fn symmetric_difference_error(
    actual: &Polygon,
    approx: &StarContour,
    raster_cell_km: f64,
) -> Result<f64> {
    if !(raster_cell_km.is_finite() && raster_cell_km > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "raster cell must be positive, got {raster_cell_km}"
        )));
    }
    let (mut lo, mut hi) = actual.bbox();
    for p in approx.outline() {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    let cols = (((hi.x - lo.x) / raster_cell_km).ceil() as u64).max(1);
    let rows = (((hi.y - lo.y) / raster_cell_km).ceil() as u64).max(1);
    if cols.saturating_mul(rows) > 1_000_000_000 {
        return Err(Error::InvalidArgument(format!(
            "raster of {cols} x {rows} cells is too fine for this extent"
        )));
    }

    let (exclusive, in_actual) = (0..rows)
        .into_par_iter()
        .map(|r| {
            let y = lo.y + (r as f64 + 0.5) * raster_cell_km;
            let mut excl = 0u64;
            let mut act = 0u64;
            for c in 0..cols {
                let p = Point::new(lo.x + (c as f64 + 0.5) * raster_cell_km, y);
                let a = actual.contains(p);
                let b = approx.contains(p);
                if a {
                    act += 1;
                }
                if a != b {
                    excl += 1;
                }
            }
            (excl, act)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));

    if in_actual == 0 {
        return Err(Error::InvalidArgument(format!(
            "raster cell {raster_cell_km} km is too coarse to resolve the region"
        )));
    }
    Ok(100.0 * exclusive as f64 / in_actual as f64)
}

/// Direction-specific error at grid angle `t`: the ray from the contour's
/// reference point is intersected with both shapes, and the symmetric
/// difference of the two interval unions is measured against the actual
/// one, `p_theta = l(delta symdiff eta) / l(delta) * 100`.
///
/// Returns `None` where the ray misses the actual region entirely.
pub fn directional_error_p_theta(
    actual: &Polygon,
    approx: &StarContour,
    t: usize,
) -> Option<f64> {
    let theta = approx.grid().theta(t);
    let mut crossings = cast_ray(actual, approx.ref_point(), theta).crossings;
    crossings.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut cuts = Vec::with_capacity(crossings.len() + 1);
    if crossings.len() % 2 == 1 {
        cuts.push(0.0);
    }
    cuts.extend(crossings);

    let mut l_delta = 0.0;
    let mut l_inter = 0.0;
    let r = approx.radii()[t].max(0.0);
    for pair in cuts.chunks_exact(2) {
        let (a, b) = (pair[0], pair[1]);
        l_delta += b - a;
        l_inter += (b.min(r) - a).max(0.0);
    }
    if l_delta <= 0.0 {
        return None;
    }
    let l_sym = l_delta + r - 2.0 * l_inter;
    Some(100.0 * l_sym / l_delta)
}

/// `p_theta` over the whole grid; entries are `None` where undefined.
pub fn directional_error_profile(actual: &Polygon, approx: &StarContour) -> Vec<Option<f64>> {
    (0..approx.grid().len())
        .map(|t| directional_error_p_theta(actual, approx, t))
        .collect()
}

/// Quartiles `(Q1, median, Q3)` with the lower-middle convention:
/// `Q(p) = sorted[max(ceil(p n), 1) - 1]`.
pub fn quartiles(values: &[f64]) -> Result<(f64, f64, f64)> {
    let sorted = checked_sorted(values)?;
    Ok((pick(&sorted, 0.25), pick(&sorted, 0.5), pick(&sorted, 0.75)))
}

/// Minimum, quartiles, and maximum in one row.
pub fn five_number_summary(values: &[f64]) -> Result<[f64; 5]> {
    let sorted = checked_sorted(values)?;
    Ok([
        sorted[0],
        pick(&sorted, 0.25),
        pick(&sorted, 0.5),
        pick(&sorted, 0.75),
        sorted[sorted.len() - 1],
    ])
}

fn checked_sorted(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("no values to summarize".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("NaN in summary input".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(sorted)
}

fn pick(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let k = ((p * n as f64).ceil() as usize).max(1);
    sorted[k - 1]
}

/// Indices of the contours with the smallest, median, and largest error.
/// The median is the lower middle; every pick takes the first occurrence
/// of its value.
pub fn best_median_worst(errors: &[f64]) -> Result<(usize, usize, usize)> {
    if errors.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 errors, got {}",
            errors.len()
        )));
    }
    let sorted = checked_sorted(errors)?;
    let median = pick(&sorted, 0.5);
    let first = |target: f64| errors.iter().position(|&e| e == target).unwrap();
    Ok((first(sorted[0]), first(median), first(sorted[sorted.len() - 1])))
}

/// Per-angle `(Q1, median, Q3)` values across contours; `None` at angles
/// where no contour had a defined value.
pub type QuartileCurve = Vec<Option<(f64, f64, f64)>>;

/// Collected per-contour errors for report emission.
#[derive(Clone, Debug, Default)]
pub struct ErrorReport {
    pub contour_ids: Vec<String>,
    pub ise_nonparametric: Vec<f64>,
    pub ise_parametric: Vec<f64>,
    /// Symmetric-difference percentages keyed by Fourier order.
    pub symdiff_percent: BTreeMap<usize, Vec<f64>>,
    /// `p_theta` quartile curves keyed by Fourier order.
    pub p_theta_quartiles: BTreeMap<usize, QuartileCurve>,
}

impl ErrorReport {
    /// Checks that every recorded error is non-negative.
    pub fn validate(&self) -> Result<()> {
        let bad = |v: &f64| !v.is_finite() || *v < 0.0;
        if self.ise_nonparametric.iter().any(bad)
            || self.ise_parametric.iter().any(bad)
            || self.symdiff_percent.values().flatten().any(bad)
        {
            return Err(Error::Estimation("negative or non-finite error entry".into()));
        }
        Ok(())
    }
}

/// Pointwise quartile curves across contours; `None` where fewer than one
/// contour has a defined value.
pub fn p_theta_quartile_curves(profiles: &[Vec<Option<f64>>]) -> Result<QuartileCurve> {
    let m = profiles.first().map_or(0, Vec::len);
    if profiles.iter().any(|p| p.len() != m) {
        return Err(Error::InvalidArgument("profiles on different grids".into()));
    }
    (0..m)
        .map(|t| {
            let column: Vec<f64> = profiles.iter().filter_map(|p| p[t]).collect();
            if column.is_empty() {
                Ok(None)
            } else {
                quartiles(&column).map(Some)
            }
        })
        .collect()
}
