//! Weighted functional principal component analysis of radial curves.
//!
//! Curves X_1..X_n on the angular grid, with probability weights p_i and
//! censor flags, yield
//!
//! ```text
//! mean(theta)        = sum_i p_i X_i(theta)
//! K(theta, theta')   = sum_i p_i (X_i - mean)(theta) (X_i - mean)(theta')
//! ```
//!
//! The eigenpairs of the integral operator with kernel K are approximated on
//! the grid: with quadrature weight `w = 2 pi / m`, eigenvectors of `w K`
//! scaled by `1/sqrt(w)` are the discretized eigenfunctions, orthonormal in
//! the quadrature inner product `<f, g> = w sum_t f_t g_t`. Curves expand as
//! `X = mean + sum_j xi_j phi_j` with scores `xi_j = <X - mean, phi_j>`.
//!
//! Two routes to the same spectrum are provided: [`eigen_decompose`] works
//! on the m x m covariance directly, while [`EigenSystem::fit`] solves the
//! n x n Gram problem of the weighted centred curves, which is much cheaper
//! when there are fewer curves than grid points and is what the
//! cross-validation loop uses.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::starhull::AngularGrid;

/// Curves on a common angular grid with weights and censor flags, aligned
/// by index.
#[derive(Clone, Debug)]
pub struct FunctionalSample {
    grid: AngularGrid,
    curves: Vec<Vec<f64>>,
    weights: Vec<f64>,
    censored: Vec<bool>,
}

impl FunctionalSample {
    /// Builds a sample; `weights = None` means uniform. Weights must be
    /// non-negative and sum to 1 within 1e-6 (they are renormalized to sum
    /// to 1 exactly).
    pub fn new(
        grid: AngularGrid,
        curves: Vec<Vec<f64>>,
        weights: Option<Vec<f64>>,
        censored: Vec<bool>,
    ) -> Result<Self> {
        let n = curves.len();
        if n == 0 {
            return Err(Error::InvalidArgument("no curves in sample".into()));
        }
        for (i, c) in curves.iter().enumerate() {
            if c.len() != grid.len() {
                return Err(Error::InvalidArgument(format!(
                    "curve {i} has {} values on a grid of {}",
                    c.len(),
                    grid.len()
                )));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "curve {i} contains non-finite values"
                )));
            }
        }
        if censored.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{n} curves but {} censor flags",
                censored.len()
            )));
        }
        // Explicit uniform weights must behave exactly like the default, so
        // both run through the same renormalization.
        let mut w = weights.unwrap_or_else(|| vec![1.0 / n as f64; n]);
        if w.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{n} curves but {} weights",
                w.len()
            )));
        }
        if w.iter().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(Error::InvalidArgument(
                "weights must be finite and non-negative".into(),
            ));
        }
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidArgument(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        w.iter_mut().for_each(|x| *x /= total);
        let weights = w;
        Ok(FunctionalSample {
            grid,
            curves,
            weights,
            censored,
        })
    }

    pub fn n(&self) -> usize {
        self.curves.len()
    }

    pub fn grid(&self) -> AngularGrid {
        self.grid
    }

    pub fn curve(&self, i: usize) -> &[f64] {
        &self.curves[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn censored(&self) -> &[bool] {
        &self.censored
    }

    /// The sample with curve `i` removed and the remaining weights rescaled
    /// to sum to one; falls back to uniform weights when curve `i` held all
    /// the mass.
    fn without(&self, i: usize) -> FunctionalSample {
        let keep = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, &x)| x)
                .collect()
        };
        let curves: Vec<Vec<f64>> = self
            .curves
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, c)| c.clone())
            .collect();
        let mut weights = keep(&self.weights);
        let total: f64 = weights.iter().sum();
        if total > f64::EPSILON {
            weights.iter_mut().for_each(|x| *x /= total);
        } else {
            weights = vec![1.0 / curves.len() as f64; curves.len()];
        }
        let censored: Vec<bool> = self
            .censored
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, &c)| c)
            .collect();
        FunctionalSample {
            grid: self.grid,
            curves,
            weights,
            censored,
        }
    }
}

/// Weighted pointwise mean curve.
pub fn mean_function(sample: &FunctionalSample) -> Vec<f64> {
    let m = sample.grid.len();
    let mut mean = vec![0.0; m];
    for (c, &p) in sample.curves.iter().zip(&sample.weights) {
        for (out, &x) in mean.iter_mut().zip(c) {
            *out += p * x;
        }
    }
    mean
}

/// Weighted covariance kernel on the grid, an m x m symmetric matrix.
pub fn covariance_function(sample: &FunctionalSample, mean: &[f64]) -> Result<DMatrix<f64>> {
    let m = sample.grid.len();
    if mean.len() != m {
        return Err(Error::InvalidArgument(format!(
            "mean has {} values on a grid of {m}",
            mean.len()
        )));
    }
    let scaled = weighted_centered(sample, mean);
    Ok(scaled.transpose() * &scaled)
}

/// Rows `sqrt(p_i) (X_i - mean)`, the shared factor of both eigen routes.
fn weighted_centered(sample: &FunctionalSample, mean: &[f64]) -> DMatrix<f64> {
    let n = sample.n();
    let m = sample.grid.len();
    DMatrix::from_fn(n, m, |i, t| {
        sample.weights[i].sqrt() * (sample.curves[i][t] - mean[t])
    })
}

/// The discretized eigendecomposition of a covariance kernel.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    grid: AngularGrid,
    pub mean: Vec<f64>,
    /// Non-increasing, clamped at zero.
    pub eigenvalues: Vec<f64>,
    eigenfunctions: Vec<Vec<f64>>,
}

impl EigenSystem {
    /// Number of eigenpairs carried.
    pub fn num_components(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn grid(&self) -> AngularGrid {
        self.grid
    }

    /// The `j`-th (0-based) eigenfunction, orthonormal under the quadrature
    /// inner product.
    pub fn eigenfunction(&self, j: usize) -> &[f64] {
        &self.eigenfunctions[j]
    }

    /// Solves the n x n Gram eigenproblem of the weighted centred curves.
    ///
    /// Shares its nonzero spectrum with [`eigen_decompose`] of the full
    /// covariance; eigenpairs with relatively negligible eigenvalues
    /// (below 1e-12 of the largest) are dropped.
    pub fn fit(sample: &FunctionalSample) -> Result<EigenSystem> {
        let mean = mean_function(sample);
        let scaled = weighted_centered(sample, &mean);
        let w = sample.grid.step();
        let gram = &scaled * scaled.transpose() * w;
        let eig = nalgebra::SymmetricEigen::new(gram);

        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
        let lambda_max = eig.eigenvalues[order[0]].max(0.0);

        let mut eigenvalues = Vec::new();
        let mut eigenfunctions = Vec::new();
        for &k in &order {
            let lambda = eig.eigenvalues[k];
            if lambda <= 0.0 || lambda <= lambda_max * 1e-12 {
                break;
            }
            let u = eig.eigenvectors.column(k);
            let raw = scaled.transpose() * u;
            let norm = (w * raw.norm_squared()).sqrt();
            let phi: Vec<f64> = raw.iter().map(|&x| x / norm).collect();
            eigenvalues.push(lambda);
            eigenfunctions.push(fix_sign(phi));
        }
        Ok(EigenSystem {
            grid: sample.grid,
            mean,
            eigenvalues,
            eigenfunctions,
        })
    }
}

/// Full eigendecomposition of an m x m covariance matrix on the grid.
///
/// The input must be symmetric to within 1e-10; eigenvalues are sorted
/// non-increasing with negatives clamped to zero, and every eigenpair is
/// kept, so the eigenvalue sum matches the quadrature trace.
pub fn eigen_decompose(
    cov: &DMatrix<f64>,
    mean: Vec<f64>,
    grid: AngularGrid,
) -> Result<EigenSystem> {
    let m = grid.len();
    if cov.nrows() != m || cov.ncols() != m {
        return Err(Error::InvalidArgument(format!(
            "covariance is {}x{} on a grid of {m}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    if mean.len() != m {
        return Err(Error::InvalidArgument(format!(
            "mean has {} values on a grid of {m}",
            mean.len()
        )));
    }
    if cov.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("covariance is not finite".into()));
    }
    let asym = (0..m)
        .flat_map(|r| (r + 1..m).map(move |c| (r, c)))
        .map(|(r, c)| (cov[(r, c)] - cov[(c, r)]).abs())
        .fold(0.0f64, f64::max);
    if asym > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "covariance is asymmetric by {asym:e}"
        )));
    }

    let w = grid.step();
    let eig = nalgebra::SymmetricEigen::new(cov * w);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());

    let scale = 1.0 / w.sqrt();
    let mut eigenvalues = Vec::with_capacity(m);
    let mut eigenfunctions = Vec::with_capacity(m);
    for &k in &order {
        eigenvalues.push(eig.eigenvalues[k].max(0.0));
        let phi: Vec<f64> = eig.eigenvectors.column(k).iter().map(|&x| x * scale).collect();
        eigenfunctions.push(fix_sign(phi));
    }
    Ok(EigenSystem {
        grid,
        mean,
        eigenvalues,
        eigenfunctions,
    })
}

/// Flips an eigenfunction so its first entry of magnitude above 1e-12 is
/// positive; eigenvectors are only defined up to sign and this pins one.
fn fix_sign(mut phi: Vec<f64>) -> Vec<f64> {
    if let Some(&lead) = phi.iter().find(|x| x.abs() > 1e-12) {
        if lead < 0.0 {
            phi.iter_mut().for_each(|x| *x = -*x);
        }
    }
    phi
}

/// Scores `xi_j = <curve - mean, phi_j>` for the first `num` components.
pub fn principal_scores(curve: &[f64], es: &EigenSystem, num: usize) -> Result<Vec<f64>> {
    if curve.len() != es.grid.len() {
        return Err(Error::InvalidArgument(format!(
            "curve has {} values on a grid of {}",
            curve.len(),
            es.grid.len()
        )));
    }
    if num > es.num_components() {
        return Err(Error::InvalidArgument(format!(
            "requested {num} scores from {} components",
            es.num_components()
        )));
    }
    let w = es.grid.step();
    Ok((0..num)
        .map(|j| {
            w * curve
                .iter()
                .zip(&es.mean)
                .zip(&es.eigenfunctions[j])
                .map(|((&x, &mu), &phi)| (x - mu) * phi)
                .sum::<f64>()
        })
        .collect())
}

/// Truncated Karhunen-Loeve reconstruction with the first `num` components.
pub fn reconstruct(curve: &[f64], es: &EigenSystem, num: usize) -> Result<Vec<f64>> {
    let scores = principal_scores(curve, es, num)?;
    let mut out = es.mean.clone();
    for (j, &xi) in scores.iter().enumerate() {
        for (o, &phi) in out.iter_mut().zip(&es.eigenfunctions[j]) {
            *o += xi * phi;
        }
    }
    Ok(out)
}

/// The mode of variation `mean + alpha sqrt(lambda_k) phi_k` for the
/// 1-based component `k`.
pub fn mode_of_variation(es: &EigenSystem, k: usize, alpha: f64) -> Result<Vec<f64>> {
    if k == 0 || k > es.num_components() {
        return Err(Error::InvalidArgument(format!(
            "component {k} out of 1..={}",
            es.num_components()
        )));
    }
    let sd = es.eigenvalues[k - 1].sqrt();
    Ok(es
        .mean
        .iter()
        .zip(&es.eigenfunctions[k - 1])
        .map(|(&mu, &phi)| mu + alpha * sd * phi)
        .collect())
}

/// Fraction of total variance carried by the first `num` eigenvalues, or
/// `None` when there is no variance at all.
pub fn variance_explained(eigenvalues: &[f64], num: usize) -> Option<f64> {
    let total: f64 = eigenvalues.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let head: f64 = eigenvalues.iter().take(num).sum();
    Some(head / total)
}

/// Chooses how many components to keep by leave-one-curve-out
/// cross-validation over `1..=j_max`.
///
/// Each complete curve is held out in turn and the eigensystem refitted
/// without it (weights rescaled to sum to one). The held-out curve's scores
/// are estimated by least squares against the eigenfunctions restricted to
/// the even-indexed grid points, and the reconstruction error is accumulated
/// on the odd-indexed points only. Estimating scores on one half of the grid
/// and scoring on the other is what lets the error curve turn back up: extra
/// components must generalize across the grid to help. Censored curves stay
/// in every training set but are never held out. Ties go to the smallest
/// candidate.
pub fn select_num_components(sample: &FunctionalSample, j_max: usize) -> Result<usize> {
    if sample.n() < 3 {
        return Err(Error::InvalidArgument(format!(
            "cross-validation needs at least 3 curves, got {}",
            sample.n()
        )));
    }
    if j_max == 0 {
        return Err(Error::InvalidArgument("j_max must be at least 1".into()));
    }
    let held_out: Vec<usize> = (0..sample.n()).filter(|&i| !sample.censored[i]).collect();
    if held_out.is_empty() {
        return Err(Error::Estimation(
            "every curve is censored; nothing can be held out".into(),
        ));
    }

    let fold_errors: Vec<Vec<f64>> = held_out
        .par_iter()
        .map(|&i| fold_error(sample, i, j_max))
        .collect::<Result<_>>()?;

    let mut best = (1, f64::INFINITY);
    for j in 1..=j_max {
        let score: f64 = fold_errors.iter().map(|e| e[j - 1]).sum();
        if score < best.1 {
            best = (j, score);
        }
    }
    Ok(best.0)
}

/// Reconstruction error of held-out curve `i` for each candidate 1..=j_max.
fn fold_error(sample: &FunctionalSample, i: usize, j_max: usize) -> Result<Vec<f64>> {
    let es = EigenSystem::fit(&sample.without(i))?;
    let m = sample.grid.len();
    let avail = es.num_components().min(j_max);
    let centered: Vec<f64> = sample.curves[i]
        .iter()
        .zip(&es.mean)
        .map(|(&x, &mu)| x - mu)
        .collect();

    let even: Vec<usize> = (0..m).step_by(2).collect();
    let odd: Vec<usize> = (1..m).step_by(2).collect();
    let design = DMatrix::from_fn(even.len(), avail, |r, j| es.eigenfunctions[j][even[r]]);
    let rhs_full = design.transpose() * DVector::from_fn(even.len(), |r, _| centered[even[r]]);
    let normal_full = design.transpose() * &design;

    // Integrated squared error on the held-out half of the grid; every odd
    // point stands in for two grid points' worth of arc.
    let quad = 2.0 * sample.grid.step();
    let mut errors = Vec::with_capacity(j_max);
    let mut previous = None;
    for j in 1..=j_max {
        let take = j.min(avail);
        if take == 0 {
            errors.push(quad * odd.iter().map(|&t| centered[t] * centered[t]).sum::<f64>());
            continue;
        }
        if j > avail {
            errors.push(*errors.last().expect("j_max >= 1"));
            continue;
        }
        let normal = normal_full.view((0, 0), (take, take)).into_owned();
        let rhs = rhs_full.rows(0, take).into_owned();
        let solution = match normal.cholesky() {
            Some(ch) => ch.solve(&rhs),
            // Numerically rank-deficient on the even half; an extra
            // component cannot be identified, so it cannot help.
            None => match previous {
                Some(p) => {
                    errors.push(p);
                    continue;
                }
                None => DVector::zeros(take),
            },
        };
        let err = quad
            * odd
                .iter()
                .map(|&t| {
                    let fitted: f64 = (0..take)
                        .map(|j| solution[j] * es.eigenfunctions[j][t])
                        .sum();
                    (centered[t] - fitted).powi(2)
                })
                .sum::<f64>();
        errors.push(err);
        previous = Some(err);
    }
    Ok(errors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn grid(m: usize) -> AngularGrid {
        AngularGrid::new(m).unwrap()
    }

    fn uniform_sample(g: AngularGrid, curves: Vec<Vec<f64>>) -> FunctionalSample {
        let n = curves.len();
        FunctionalSample::new(g, curves, None, vec![false; n]).unwrap()
    }

    /// Curves `a_i cos(theta)`: a rank-one family whose single eigenvalue is
    /// `Var(a) * pi` and whose eigenfunction is `cos(theta)/sqrt(pi)`.
    fn rank_one_sample(g: AngularGrid, amplitudes: &[f64]) -> FunctionalSample {
        let curves = amplitudes
            .iter()
            .map(|&a| g.thetas().map(|th| a * th.cos()).collect())
            .collect();
        uniform_sample(g, curves)
    }

    #[test]
    fn mean_and_covariance_match_hand_computation() {
        let g = grid(4);
        let sample = FunctionalSample::new(
            g,
            vec![vec![1.0, 0.0, 2.0, 4.0], vec![3.0, 2.0, 0.0, 0.0]],
            Some(vec![0.25, 0.75]),
            vec![false; 2],
        )
        .unwrap();
        let mean = mean_function(&sample);
        assert_eq!(mean, vec![2.5, 1.5, 0.5, 1.0]);
        let cov = covariance_function(&sample, &mean).unwrap();
        // K(0,0) = 0.25 * 1.5^2 + 0.75 * 0.5^2
        assert_relative_eq!(cov[(0, 0)], 0.75, epsilon = 1e-14);
        // K(0,3) = 0.25 * (-1.5)(3) + 0.75 * (0.5)(-1)
        assert_relative_eq!(cov[(0, 3)], -1.5, epsilon = 1e-14);
        assert_relative_eq!(cov[(3, 0)], -1.5, epsilon = 1e-14);
    }

    #[test]
    fn rank_one_family_has_the_analytic_eigenpair() {
        let g = grid(16);
        let amplitudes = [-1.0, 0.5, 2.0, 1.5];
        let sample = rank_one_sample(g, &amplitudes);
        let mean_a = amplitudes.iter().sum::<f64>() / 4.0;
        let var_a = amplitudes.iter().map(|a| (a - mean_a).powi(2)).sum::<f64>() / 4.0;

        let cov = covariance_function(&sample, &mean_function(&sample)).unwrap();
        let es = eigen_decompose(&cov, mean_function(&sample), g).unwrap();
        assert_relative_eq!(es.eigenvalues[0], var_a * PI, max_relative = 1e-10);
        assert!(es.eigenvalues[1] < 1e-10);

        let phi = es.eigenfunction(0);
        for (t, th) in g.thetas().enumerate() {
            assert_relative_eq!(phi[t], th.cos() / PI.sqrt(), epsilon = 1e-10);
        }
    }

    #[test]
    fn both_eigen_routes_agree() {
        let g = grid(12);
        let curves: Vec<Vec<f64>> = (0..5)
            .map(|i| {
                let a = 0.7 * i as f64 - 1.0;
                let b = (i as f64 * 1.3).sin();
                g.thetas()
                    .map(|th| 1.0 + a * th.cos() + b * (2.0 * th).sin())
                    .collect()
            })
            .collect();
        let sample = uniform_sample(g, curves);
        let direct = eigen_decompose(
            &covariance_function(&sample, &mean_function(&sample)).unwrap(),
            mean_function(&sample),
            g,
        )
        .unwrap();
        let dual = EigenSystem::fit(&sample).unwrap();

        assert!(dual.num_components() <= 4); // rank of 5 centred curves
        let w = g.step();
        for j in 0..dual.num_components() {
            assert_relative_eq!(
                dual.eigenvalues[j],
                direct.eigenvalues[j],
                max_relative = 1e-9,
                epsilon = 1e-12
            );
            let inner: f64 = dual
                .eigenfunction(j)
                .iter()
                .zip(direct.eigenfunction(j))
                .map(|(&a, &b)| a * b)
                .sum::<f64>()
                * w;
            assert!(inner.abs() > 1.0 - 1e-8, "component {j}: {inner}");
        }
    }

    #[test]
    fn eigenfunctions_are_orthonormal_in_quadrature() {
        let g = grid(32);
        let curves: Vec<Vec<f64>> = (0..8)
            .map(|i| {
                g.thetas()
                    .map(|th| {
                        (i as f64).sin() * th.cos()
                            + (i as f64 * 0.37).cos() * (3.0 * th).cos()
                            + 0.2 * (i as f64) * (2.0 * th).sin()
                    })
                    .collect()
            })
            .collect();
        let sample = uniform_sample(g, curves);
        let es = EigenSystem::fit(&sample).unwrap();
        let w = g.step();
        for a in 0..es.num_components() {
            for b in 0..es.num_components() {
                let inner: f64 = es
                    .eigenfunction(a)
                    .iter()
                    .zip(es.eigenfunction(b))
                    .map(|(&x, &y)| x * y)
                    .sum::<f64>()
                    * w;
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((inner - expect).abs() < 1e-8, "<{a},{b}> = {inner}");
            }
        }
    }

    #[test]
    fn eigenvalue_sum_equals_quadrature_trace() {
        let g = grid(20);
        let curves: Vec<Vec<f64>> = (0..6)
            .map(|i| g.thetas().map(|th| (th * (1.0 + i as f64)).sin()).collect())
            .collect();
        let sample = uniform_sample(g, curves);
        let cov = covariance_function(&sample, &mean_function(&sample)).unwrap();
        let es = eigen_decompose(&cov, mean_function(&sample), g).unwrap();
        let trace: f64 = (0..g.len()).map(|t| cov[(t, t)]).sum::<f64>() * g.step();
        let total: f64 = es.eigenvalues.iter().sum();
        assert_relative_eq!(total, trace, max_relative = 1e-12);
    }

    #[test]
    fn full_rank_decomposition_reconstructs_the_covariance() {
        let g = grid(10);
        let curves: Vec<Vec<f64>> = (0..4)
            .map(|i| g.thetas().map(|th| ((i + 1) as f64 * th).cos()).collect())
            .collect();
        let sample = uniform_sample(g, curves);
        let cov = covariance_function(&sample, &mean_function(&sample)).unwrap();
        let es = eigen_decompose(&cov, mean_function(&sample), g).unwrap();
        let w = g.step();
        for r in 0..g.len() {
            for c in 0..g.len() {
                let sum: f64 = (0..es.num_components())
                    .map(|j| es.eigenvalues[j] * es.eigenfunction(j)[r] * es.eigenfunction(j)[c])
                    .sum::<f64>()
                    * w;
                assert!((sum - cov[(r, c)] * w).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn asymmetric_covariance_is_rejected() {
        let g = grid(4);
        let mut cov = DMatrix::zeros(4, 4);
        cov[(0, 1)] = 1.0;
        assert!(matches!(
            eigen_decompose(&cov, vec![0.0; 4], g),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn in_sample_curve_reconstructs_exactly_at_full_rank() {
        let g = grid(24);
        let curves: Vec<Vec<f64>> = (0..5)
            .map(|i| {
                g.thetas()
                    .map(|th| (th + i as f64).sin() + 0.3 * (2.0 * th - i as f64).cos())
                    .collect()
            })
            .collect();
        let sample = uniform_sample(g, curves.clone());
        let es = EigenSystem::fit(&sample).unwrap();
        let full = es.num_components();
        for c in &curves {
            let rec = reconstruct(c, &es, full).unwrap();
            for (a, b) in rec.iter().zip(c) {
                assert!((a - b).abs() < 1e-8, "{a} vs {b}");
            }
        }
        // Zero components reproduce the mean.
        let rec0 = reconstruct(&curves[0], &es, 0).unwrap();
        assert_eq!(rec0, es.mean);
    }

    #[test]
    fn scores_of_the_mean_are_zero() {
        let g = grid(16);
        let sample = rank_one_sample(g, &[1.0, 2.0, 3.0, 6.0]);
        let es = EigenSystem::fit(&sample).unwrap();
        let scores = principal_scores(&es.mean.clone(), &es, es.num_components()).unwrap();
        for &s in &scores {
            assert!(s.abs() < 1e-12);
        }
    }

    #[test]
    fn modes_of_variation_bracket_the_mean() {
        let g = grid(16);
        let sample = rank_one_sample(g, &[1.0, 2.0, 3.0, 6.0]);
        let es = EigenSystem::fit(&sample).unwrap();
        let hi = mode_of_variation(&es, 1, 1.0).unwrap();
        let lo = mode_of_variation(&es, 1, -1.0).unwrap();
        let sd = es.eigenvalues[0].sqrt();
        for t in 0..g.len() {
            assert_relative_eq!(hi[t] - es.mean[t], sd * es.eigenfunction(0)[t]);
            assert_relative_eq!(es.mean[t] - lo[t], sd * es.eigenfunction(0)[t]);
        }
        assert!(mode_of_variation(&es, 0, 1.0).is_err());
        assert!(mode_of_variation(&es, es.num_components() + 1, 1.0).is_err());
    }

    #[test]
    fn variance_explained_is_a_monotone_fraction() {
        let ev = [4.0, 3.0, 2.0, 1.0];
        assert_relative_eq!(variance_explained(&ev, 1).unwrap(), 0.4);
        assert_relative_eq!(variance_explained(&ev, 2).unwrap(), 0.7);
        assert_relative_eq!(variance_explained(&ev, 4).unwrap(), 1.0);
        assert_relative_eq!(variance_explained(&ev, 9).unwrap(), 1.0);
        assert_eq!(variance_explained(&[0.0, 0.0], 1), None);
    }

    #[test]
    fn cross_validation_recovers_the_exact_rank() {
        let g = grid(40);
        // Rank 2: cos(theta) and sin(2 theta) with varying loadings.
        let curves: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                let a = (i as f64 * 0.917).sin() * 2.0;
                let b = (i as f64 * 1.331).cos() * 1.2;
                g.thetas()
                    .map(|th| 5.0 + a * th.cos() + b * (2.0 * th).sin())
                    .collect()
            })
            .collect();
        let sample = uniform_sample(g, curves);
        assert_eq!(select_num_components(&sample, 6).unwrap(), 2);
    }

    #[test]
    fn censored_curves_train_but_are_never_held_out() {
        let g = grid(30);
        let mut curves: Vec<Vec<f64>> = (0..7)
            .map(|i| {
                let a = 1.0 + i as f64;
                g.thetas().map(|th| a * th.cos()).collect()
            })
            .collect();
        // A censored curve consistent with the same one-component family.
        curves.push(g.thetas().map(|th| -2.5 * th.cos()).collect());
        let mut censored = vec![false; 7];
        censored.push(true);
        let sample = FunctionalSample::new(g, curves, None, censored).unwrap();
        assert_eq!(select_num_components(&sample, 5).unwrap(), 1);
    }

    #[test]
    fn sample_construction_validates_shapes_and_weights() {
        let g = grid(8);
        let curve = vec![0.0; 8];
        assert!(FunctionalSample::new(g, vec![], None, vec![]).is_err());
        assert!(FunctionalSample::new(g, vec![vec![0.0; 7]], None, vec![false]).is_err());
        assert!(FunctionalSample::new(g, vec![curve.clone()], None, vec![]).is_err());
        assert!(
            FunctionalSample::new(g, vec![curve.clone()], Some(vec![0.5]), vec![false]).is_err()
        );
        assert!(
            FunctionalSample::new(g, vec![curve.clone()], Some(vec![-1.0]), vec![false]).is_err()
        );
        assert!(FunctionalSample::new(g, vec![curve], Some(vec![1.0]), vec![false]).is_ok());
    }
}
