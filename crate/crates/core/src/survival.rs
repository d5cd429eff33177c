//! Product-limit weights for right-censored region sizes.
//!
//! A region clipped by the swath edge only gives a lower bound on its area,
//! so averaging curves uniformly would over-represent small regions exactly
//! where large ones were cut off. The Kaplan-Meier estimator of the size
//! distribution assigns each completely observed region the probability mass
//! its survival-curve drop represents; censored regions get zero mass but
//! still inform the at-risk counts. Those masses are the weights used by the
//! functional principal component analysis.

use crate::error::{Error, Result};

/// One region's size observation.
#[derive(Clone, Debug)]
pub struct SizeObservation {
    pub contour_id: String,
    pub area_km2: f64,
    pub censored: bool,
}

/// Kaplan-Meier mass for each observation, aligned with the input order.
///
/// Censored observations get exactly zero. When the survival curve does not
/// reach zero (the largest observation is censored), the leftover mass is
/// redistributed proportionally across the complete observations, so the
/// weights always sum to one.
pub fn kaplan_meier_weights(observations: &[SizeObservation]) -> Result<Vec<f64>> {
    if observations.is_empty() {
        return Err(Error::Estimation("no size observations".into()));
    }
    if observations
        .iter()
        .any(|o| !o.area_km2.is_finite() || o.area_km2 <= 0.0)
    {
        return Err(Error::Estimation(
            "region areas must be positive and finite".into(),
        ));
    }
    if observations.iter().all(|o| o.censored) {
        return Err(Error::Estimation(
            "every observation is censored; the size distribution is unidentifiable".into(),
        ));
    }
    // Without censoring every drop of the survival curve is exactly 1/n;
    // the running product below would only smear that with rounding.
    if observations.iter().all(|o| !o.censored) {
        return Ok(vec![1.0 / observations.len() as f64; observations.len()]);
    }

    // Ascending by area; complete observations precede censored ones at
    // ties, the usual deaths-before-censorings convention.
    let mut order: Vec<usize> = (0..observations.len()).collect();
    order.sort_by(|&a, &b| {
        let oa = &observations[a];
        let ob = &observations[b];
        (oa.area_km2, oa.censored)
            .partial_cmp(&(ob.area_km2, ob.censored))
            .unwrap()
    });

    let mut weights = vec![0.0; observations.len()];
    let mut survival = 1.0;
    let mut at_risk = observations.len() as f64;
    let mut k = 0;
    while k < order.len() {
        // One tie group: every observation with this area.
        let area = observations[order[k]].area_km2;
        let mut group_end = k;
        while group_end < order.len() && observations[order[group_end]].area_km2 == area {
            group_end += 1;
        }
        let mut deaths = 0.0;
        for &idx in &order[k..group_end] {
            if !observations[idx].censored {
                weights[idx] = survival / at_risk;
                deaths += 1.0;
            }
        }
        survival *= 1.0 - deaths / at_risk;
        at_risk -= (group_end - k) as f64;
        k = group_end;
    }

    // Residual survival mass exists iff the largest observations are
    // censored; spread it over the complete cases in proportion to the mass
    // they already carry.
    if survival > 0.0 {
        let scale = 1.0 / (1.0 - survival);
        for w in &mut weights {
            *w *= scale;
        }
    }
    Ok(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn obs(spec: &[(f64, bool)]) -> Vec<SizeObservation> {
        spec.iter()
            .enumerate()
            .map(|(k, &(area_km2, censored))| SizeObservation {
                contour_id: format!("c{k}"),
                area_km2,
                censored,
            })
            .collect()
    }

    #[test]
    fn uncensored_sample_gets_uniform_weights() {
        let weights = kaplan_meier_weights(&obs(&[
            (3.0, false),
            (1.0, false),
            (7.0, false),
            (2.0, false),
        ]))
        .unwrap();
        for &w in &weights {
            assert_relative_eq!(w, 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn worked_example_with_interior_censoring() {
        // Areas 2, 3+, 5: the death at 2 takes 1/3, the death at 5 takes the
        // remaining survival 2/3 in full.
        let weights = kaplan_meier_weights(&obs(&[
            (2.0, false),
            (3.0, true),
            (5.0, false),
        ]))
        .unwrap();
        assert_relative_eq!(weights[0], 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(weights[1], 0.0);
        assert_relative_eq!(weights[2], 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn residual_mass_from_a_censored_maximum_is_redistributed() {
        // Areas 2, 5+: the death holds 1/2, the censored max strands the
        // other 1/2, which flows back to the only complete case.
        let weights = kaplan_meier_weights(&obs(&[(2.0, false), (5.0, true)])).unwrap();
        assert_eq!(weights, vec![1.0, 0.0]);
    }

    #[test]
    fn proportional_redistribution_preserves_ratios() {
        // Deaths at 1 and 2 hold 1/4 and 1/4; censored 3+ and 4+ strand 1/2.
        let weights = kaplan_meier_weights(&obs(&[
            (1.0, false),
            (2.0, false),
            (3.0, true),
            (4.0, true),
        ]))
        .unwrap();
        assert_relative_eq!(weights[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(weights[1], 0.5, epsilon = 1e-15);
        assert_eq!(weights[2], 0.0);
        assert_eq!(weights[3], 0.0);
        assert_relative_eq!(weights.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn tied_death_and_censoring_count_the_death_first() {
        // At area 2 a death and a censoring tie: both are at risk for the
        // death, so it takes S/R = 1/3 rather than 1/2.
        let weights = kaplan_meier_weights(&obs(&[
            (2.0, false),
            (2.0, true),
            (5.0, false),
        ]))
        .unwrap();
        assert_relative_eq!(weights[0], 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(weights[1], 0.0);
        assert_relative_eq!(weights[2], 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn tied_deaths_share_the_drop_equally() {
        let weights = kaplan_meier_weights(&obs(&[
            (2.0, false),
            (2.0, false),
            (5.0, false),
        ]))
        .unwrap();
        assert_relative_eq!(weights[0], 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(weights[1], 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(weights[2], 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn weights_sum_to_one_under_heavy_censoring() {
        let weights = kaplan_meier_weights(&obs(&[
            (1.0, true),
            (2.0, false),
            (3.0, true),
            (4.0, true),
            (5.0, false),
            (6.0, true),
        ]))
        .unwrap();
        assert_relative_eq!(weights.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        for (k, &w) in weights.iter().enumerate() {
            let censored = [true, false, true, true, false, true][k];
            assert_eq!(w == 0.0, censored, "weight {k} = {w}");
        }
    }

    #[test]
    fn all_censored_is_an_error() {
        assert!(kaplan_meier_weights(&obs(&[(1.0, true), (2.0, true)])).is_err());
        assert!(kaplan_meier_weights(&[]).is_err());
    }
}
