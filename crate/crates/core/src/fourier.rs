//! Truncated Fourier models for transformed radial curves.
//!
//! On the uniform periodic grid the least-squares fit of
//! `A_0 + sum_i (A_i cos i theta + B_i sin i theta)` has an orthogonal
//! design, so the coefficients are discrete Fourier projections and nested
//! fits share coefficients. The polar form groups each harmonic into an
//! amplitude and a phase; the second harmonic's coefficient pair across a
//! corpus carries the axiality of the regions, summarized here by the mode
//! of its bivariate distribution.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::normalize::NormalizingMap;
use crate::starhull::AngularGrid;

/// A fitted truncated Fourier series.
#[derive(Clone, Debug)]
pub struct FourierModel {
    /// `A_0..A_d`.
    pub cos_coef: Vec<f64>,
    /// `B_1..B_d`.
    pub sin_coef: Vec<f64>,
    /// Residual sum of squares over the grid.
    pub rss: f64,
    n_samples: usize,
}

impl FourierModel {
    pub fn order(&self) -> usize {
        self.sin_coef.len()
    }

    /// Value of the series at an arbitrary angle.
    pub fn evaluate(&self, theta: f64) -> f64 {
        let mut v = self.cos_coef[0];
        for i in 1..=self.order() {
            let it = i as f64 * theta;
            v += self.cos_coef[i] * it.cos() + self.sin_coef[i - 1] * it.sin();
        }
        v
    }

    /// Residual variance `RSS / (m - (2d + 1))`, or `None` when the fit
    /// interpolates (no residual degrees of freedom).
    pub fn residual_variance(&self) -> Option<f64> {
        let dof = self.n_samples as isize - (2 * self.order() + 1) as isize;
        (dof > 0).then(|| self.rss / dof as f64)
    }
}

/// Amplitude-phase form: `C_0 + sum_i C_i cos(i (theta - phi_i))`.
///
/// `C_0 = A_0` keeps its sign; `C_i >= 0` for harmonics.
#[derive(Clone, Debug)]
pub struct PolarForm {
    /// `C_0..C_d`.
    pub amplitude: Vec<f64>,
    /// `phi_1..phi_d`, with `i phi_i = atan2(B_i, A_i)`.
    pub phase: Vec<f64>,
}

impl PolarForm {
    pub fn order(&self) -> usize {
        self.phase.len()
    }

    pub fn evaluate(&self, theta: f64) -> f64 {
        let mut v = self.amplitude[0];
        for i in 1..=self.order() {
            v += self.amplitude[i] * (i as f64 * (theta - self.phase[i - 1])).cos();
        }
        v
    }
}

/// Least-squares fit of order `d` over the uniform grid.
///
/// Requires `2d + 1 <= m`; the coefficients are then the discrete Fourier
/// projections `A_i = (2/m) sum_t y_t cos(i theta_t)` (with `1/m` for A_0).
pub fn fit_fourier(curve: &[f64], grid: &AngularGrid, d: usize) -> Result<FourierModel> {
    let m = grid.len();
    if curve.len() != m {
        return Err(Error::InvalidArgument(format!(
            "curve has {} values on a grid of {m}",
            curve.len()
        )));
    }
    if 2 * d + 1 > m {
        return Err(Error::InvalidArgument(format!(
            "order {d} needs 2d+1 <= {m} grid points"
        )));
    }
    if curve.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("curve contains non-finite values".into()));
    }

    let mut cos_coef = vec![0.0; d + 1];
    let mut sin_coef = vec![0.0; d];
    cos_coef[0] = curve.iter().sum::<f64>() / m as f64;
    for i in 1..=d {
        let mut ca = 0.0;
        let mut sa = 0.0;
        for (t, &y) in curve.iter().enumerate() {
            let it = i as f64 * grid.theta(t);
            ca += y * it.cos();
            sa += y * it.sin();
        }
        cos_coef[i] = 2.0 * ca / m as f64;
        sin_coef[i - 1] = 2.0 * sa / m as f64;
    }

    let mut model = FourierModel {
        cos_coef,
        sin_coef,
        rss: 0.0,
        n_samples: m,
    };
    model.rss = (0..m)
        .map(|t| (curve[t] - model.evaluate(grid.theta(t))).powi(2))
        .sum();
    Ok(model)
}

/// Order choice by the unbiased-risk criterion
/// `RSS(d)/m + 2 sigma^2 (2d+1)/m`, with the noise variance estimated from
/// the residuals of the `d_max` fit. Ties go to the smaller order.
pub fn select_order(curve: &[f64], grid: &AngularGrid, d_max: usize) -> Result<usize> {
    let full = fit_fourier(curve, grid, d_max)?;
    let sigma2 = full.residual_variance().unwrap_or(0.0);
    let m = grid.len() as f64;

    let mut best = (0usize, f64::INFINITY);
    for d in 0..=d_max {
        // Nested fits share coefficients, so truncation gives the order-d fit.
        let truncated = FourierModel {
            cos_coef: full.cos_coef[..=d].to_vec(),
            sin_coef: full.sin_coef[..d].to_vec(),
            rss: 0.0,
            n_samples: grid.len(),
        };
        let rss: f64 = (0..grid.len())
            .map(|t| (curve[t] - truncated.evaluate(grid.theta(t))).powi(2))
            .sum();
        let risk = rss / m + 2.0 * sigma2 * (2.0 * d as f64 + 1.0) / m;
        if risk < best.1 {
            best = (d, risk);
        }
    }
    Ok(best.0)
}

/// Converts to amplitude-phase form.
pub fn to_polar(model: &FourierModel) -> PolarForm {
    let d = model.order();
    let mut amplitude = Vec::with_capacity(d + 1);
    let mut phase = Vec::with_capacity(d);
    amplitude.push(model.cos_coef[0]);
    for i in 1..=d {
        let a = model.cos_coef[i];
        let b = model.sin_coef[i - 1];
        amplitude.push(a.hypot(b));
        phase.push(b.atan2(a) / i as f64);
    }
    PolarForm { amplitude, phase }
}

/// Re-transformed amplitude `g(C_i)` for each harmonic `i = 0..=d`, grouped
/// by harmonic across models. Models of lower order simply contribute to
/// fewer harmonics.
pub fn retransformed_amplitudes(
    models: &[FourierModel],
    map: &NormalizingMap,
) -> Vec<Vec<f64>> {
    let d_max = models.iter().map(FourierModel::order).max().unwrap_or(0);
    (0..=d_max)
        .map(|i| {
            models
                .iter()
                .filter(|m| m.order() >= i)
                .map(|m| {
                    let c = if i == 0 {
                        m.cos_coef[0]
                    } else {
                        m.cos_coef[i].hypot(m.sin_coef[i - 1])
                    };
                    map.invert(c)
                })
                .collect()
        })
        .collect()
}

/// Mode of the bivariate distribution of second-harmonic coefficient pairs.
///
/// Gaussian-kernel density with per-axis Scott bandwidth
/// `h_j = sd_j * n^(-1/6)`, evaluated on a 200 x 200 grid over the data's
/// bounding box expanded by one bandwidth per side, then refined by 50
/// fixed-point mean-shift iterations from the best grid cell.
pub fn modal_axiality(pairs: &[(f64, f64)]) -> Result<(f64, f64)> {
    if pairs.len() < 10 {
        return Err(Error::InvalidArgument(format!(
            "mode estimation needs at least 10 pairs, got {}",
            pairs.len()
        )));
    }
    if pairs.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
        return Err(Error::InvalidArgument("non-finite coefficient pair".into()));
    }
    if pairs.iter().all(|&p| p == pairs[0]) {
        return Ok(pairs[0]);
    }

    let n = pairs.len() as f64;
    let sd = |pick: fn(&(f64, f64)) -> f64| -> f64 {
        let mean = pairs.iter().map(&pick).sum::<f64>() / n;
        (pairs.iter().map(|p| (pick(p) - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    let mut hx = sd(|p| p.0) * n.powf(-1.0 / 6.0);
    let mut hy = sd(|p| p.1) * n.powf(-1.0 / 6.0);
    // A flat axis contributes zero distance either way; borrow the other
    // bandwidth to keep the kernel well-defined.
    if hx == 0.0 {
        hx = hy;
    }
    if hy == 0.0 {
        hy = hx;
    }

    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pairs {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    x_lo -= hx;
    x_hi += hx;
    y_lo -= hy;
    y_hi += hy;

    const CELLS: usize = 200;
    let density = |x: f64, y: f64| -> f64 {
        pairs
            .iter()
            .map(|&(px, py)| {
                let dx = (x - px) / hx;
                let dy = (y - py) / hy;
                (-0.5 * (dx * dx + dy * dy)).exp()
            })
            .sum()
    };
    let best_per_row: Vec<(f64, usize)> = (0..CELLS)
        .into_par_iter()
        .map(|r| {
            let y = y_lo + (y_hi - y_lo) * r as f64 / (CELLS - 1) as f64;
            let mut best = (f64::NEG_INFINITY, 0);
            for c in 0..CELLS {
                let x = x_lo + (x_hi - x_lo) * c as f64 / (CELLS - 1) as f64;
                let v = density(x, y);
                if v > best.0 {
                    best = (v, c);
                }
            }
            best
        })
        .collect();
    let (mut best_val, mut start) = (f64::NEG_INFINITY, (0.0, 0.0));
    for (r, &(v, c)) in best_per_row.iter().enumerate() {
        if v > best_val {
            best_val = v;
            start = (
                x_lo + (x_hi - x_lo) * c as f64 / (CELLS - 1) as f64,
                y_lo + (y_hi - y_lo) * r as f64 / (CELLS - 1) as f64,
            );
        }
    }

    let (mut x, mut y) = start;
    for _ in 0..50 {
        let mut wsum = 0.0;
        let mut xsum = 0.0;
        let mut ysum = 0.0;
        for &(px, py) in pairs {
            let dx = (x - px) / hx;
            let dy = (y - py) / hy;
            let w = (-0.5 * (dx * dx + dy * dy)).exp();
            wsum += w;
            xsum += w * px;
            ysum += w * py;
        }
        if wsum == 0.0 {
            break;
        }
        x = xsum / wsum;
        y = ysum / wsum;
    }
    Ok((x, y))
}

/// Direction in which the second harmonic `a cos 2theta + b sin 2theta`
/// peaks, in `(-pi/2, pi/2]`; `None` for the circular case `a = b = 0`.
pub fn axiality_angle(a: f64, b: f64) -> Option<f64> {
    if a == 0.0 && b == 0.0 {
        return None;
    }
    Some(0.5 * b.atan2(a))
}

/// Re-transformed modal axiality contour `g(a cos 2theta + b sin 2theta)`
/// sampled on the grid, along with its diameter direction.
pub fn axiality_contour(
    a: f64,
    b: f64,
    grid: &AngularGrid,
    map: &NormalizingMap,
) -> (Vec<f64>, Option<f64>) {
    let samples = grid
        .thetas()
        .map(|th| map.invert(a * (2.0 * th).cos() + b * (2.0 * th).sin()))
        .collect();
    (samples, axiality_angle(a, b))
}
