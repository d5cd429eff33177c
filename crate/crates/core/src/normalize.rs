//! Empirical-quantile Gaussian transform for pooled radial distances.
//!
//! Radial distances are skewed right, like most size measurements. Pooling
//! every sampled distance from every curve into one empirical distribution
//! F_n and mapping values through `z = Phi^{-1}(F_n(v))` gives curves whose
//! pointwise distribution is close to standard normal, which is where the
//! principal component machinery behaves best. The inverse map carries model
//! output back to kilometres.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::starhull::RadialFunction;

/// The pooled empirical quantile transform and its inverse.
///
/// Forward: mid-rank empirical CDF with linear interpolation between pooled
/// values and half-rank tails, then the standard normal quantile. Inverse:
/// the generalized inverse `F_n^{-1}(u) = inf{x : F_n(x) >= u}`, which lands
/// exactly on a pooled value.
#[derive(Clone, Debug)]
pub struct NormalizingMap {
    sorted: Vec<f64>,
}

impl NormalizingMap {
    /// Pools every sampled value of every curve.
    pub fn fit<'a, I>(curves: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a RadialFunction>,
    {
        let values: Vec<f64> = curves
            .into_iter()
            .flat_map(|rf| rf.values.iter().copied())
            .collect();
        Self::from_pool(values)
    }

    /// Builds the map from an explicit pool of values.
    pub fn from_pool(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Estimation("empty pool for normalizing map".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Estimation(
                "non-finite value in normalizing map pool".into(),
            ));
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(NormalizingMap { sorted: values })
    }

    /// Number of pooled values.
    pub fn pool_len(&self) -> usize {
        self.sorted.len()
    }

    /// Pooled values in ascending order.
    pub fn pool(&self) -> &[f64] {
        &self.sorted
    }

    /// Forward transform of one value.
    pub fn apply(&self, v: f64) -> f64 {
        let n = self.sorted.len() as f64;
        let below = self.sorted.partition_point(|&x| x < v);
        let not_above = self.sorted.partition_point(|&x| x <= v);

        let p = if not_above > below {
            // v is a pooled value: mid-rank of its tie run.
            mid_rank_p(below, not_above, n)
        } else if below == 0 {
            0.5 / n
        } else if below == self.sorted.len() {
            (n - 0.5) / n
        } else {
            // Interpolate between the bracketing pooled values.
            let lo = self.sorted[below - 1];
            let hi = self.sorted[below];
            let p_lo = self.rank_p(below - 1);
            let p_hi = self.rank_p(below);
            p_lo + (p_hi - p_lo) * (v - lo) / (hi - lo)
        };
        standard_normal().inverse_cdf(p)
    }

    /// Mid-rank probability of the pooled value at `idx`.
    fn rank_p(&self, idx: usize) -> f64 {
        let v = self.sorted[idx];
        let below = self.sorted.partition_point(|&x| x < v);
        let not_above = self.sorted.partition_point(|&x| x <= v);
        mid_rank_p(below, not_above, self.sorted.len() as f64)
    }

    /// Inverse transform; always returns a pooled value.
    pub fn invert(&self, z: f64) -> f64 {
        let n = self.sorted.len();
        let p = standard_normal().cdf(z);
        let k = (p * n as f64).ceil() as usize;
        self.sorted[k.clamp(1, n) - 1]
    }

    /// Forward transform of a whole curve.
    pub fn transform(&self, rf: &RadialFunction) -> Vec<f64> {
        rf.values.iter().map(|&v| self.apply(v)).collect()
    }
}

fn mid_rank_p(below: usize, not_above: usize, n: f64) -> f64 {
    // Ranks below+1 ..= not_above share the value; use their average rank.
    let mid = 0.5 * (below as f64 + not_above as f64 + 1.0);
    (mid - 0.5) / n
}

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Pointwise sample skewness across curves at each grid angle.
///
/// Entries are `None` when fewer than three curves are given or the values
/// at that angle have zero variance.
pub fn skewness_profile(curves: &[Vec<f64>]) -> Result<Vec<Option<f64>>> {
    let Some(first) = curves.first() else {
        return Err(Error::InvalidArgument(
            "skewness profile of an empty curve set".into(),
        ));
    };
    let m = first.len();
    if curves.iter().any(|c| c.len() != m) {
        return Err(Error::InvalidArgument(
            "curves have mismatched grid lengths".into(),
        ));
    }
    let n = curves.len() as f64;
    let mut profile = Vec::with_capacity(m);
    for t in 0..m {
        if curves.len() < 3 {
            profile.push(None);
            continue;
        }
        let mean = curves.iter().map(|c| c[t]).sum::<f64>() / n;
        let m2 = curves.iter().map(|c| (c[t] - mean).powi(2)).sum::<f64>() / n;
        let m3 = curves.iter().map(|c| (c[t] - mean).powi(3)).sum::<f64>() / n;
        if m2 <= 0.0 {
            profile.push(None);
        } else {
            profile.push(Some(m3 / m2.powf(1.5)));
        }
    }
    Ok(profile)
}
