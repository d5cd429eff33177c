//! Randomized invariants over the geometric and statistical primitives.

use std::collections::BTreeSet;

use proptest::prelude::*;

use rainshape::fourier::fit_fourier;
use rainshape::geometry::{
    bounding_region, convex_contains, convex_hull, lattice_polygon, project, Point,
    EARTH_RADIUS_KM,
};
use rainshape::normalize::NormalizingMap;
use rainshape::starhull::{multi_intersection_measure, AngularGrid};
use rainshape::survival::{kaplan_meier_weights, SizeObservation};

fn planar_points() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-50.0..50.0f64, -50.0..50.0f64), 3..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hull_contains_every_input_point(points in planar_points()) {
        let pts: Vec<Point> = points.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let Ok(hull) = convex_hull(&pts) else {
            // Degenerate inputs (collinear or coincident) are allowed to fail.
            return Ok(());
        };
        for p in &pts {
            prop_assert!(convex_contains(&hull, *p, 1e-7));
        }
    }

    #[test]
    fn convex_boundaries_are_star_shaped_from_the_centroid(points in planar_points()) {
        let pts: Vec<Point> = points.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let Ok(hull) = convex_hull(&pts) else { return Ok(()) };
        let grid = AngularGrid::new(64).unwrap();
        let measure = multi_intersection_measure(&hull, hull.centroid(), &grid);
        prop_assert!(measure / std::f64::consts::TAU < 0.005, "measure {measure}");
    }

    #[test]
    fn rss_is_monotone_in_the_order(values in prop::collection::vec(-10.0..10.0f64, 64)) {
        let grid = AngularGrid::new(64).unwrap();
        let mut last = f64::INFINITY;
        for d in 0..=10 {
            let rss = fit_fourier(&values, &grid, d).unwrap().rss;
            prop_assert!(rss <= last + 1e-9);
            last = rss;
        }
    }

    #[test]
    fn pooled_values_round_trip_through_the_transform(
        pool in prop::collection::vec(0.1..1000.0f64, 1..200)
    ) {
        let map = NormalizingMap::from_pool(pool.clone()).unwrap();
        for &v in &pool {
            let z = map.apply(v);
            prop_assert!(z.is_finite());
            prop_assert_eq!(map.invert(z), v);
        }
    }

    #[test]
    fn kaplan_meier_mass_is_a_probability(
        spec in prop::collection::vec((1u32..60, any::<bool>()), 1..50)
    ) {
        let observations: Vec<SizeObservation> = spec
            .iter()
            .enumerate()
            .map(|(k, &(area, censored))| SizeObservation {
                contour_id: format!("c{k}"),
                area_km2: area as f64,
                censored,
            })
            .collect();
        prop_assume!(observations.iter().any(|o| !o.censored));
        let weights = kaplan_meier_weights(&observations).unwrap();
        let total: f64 = weights.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9, "weights sum to {total}");
        for (w, o) in weights.iter().zip(&observations) {
            prop_assert!(*w >= 0.0);
            prop_assert_eq!(*w == 0.0, o.censored);
        }
    }

    #[test]
    fn uncensored_kaplan_meier_is_uniform(
        areas in prop::collection::vec(1.0..5000.0f64, 1..40)
    ) {
        let observations: Vec<SizeObservation> = areas
            .iter()
            .enumerate()
            .map(|(k, &area_km2)| SizeObservation {
                contour_id: format!("c{k}"),
                area_km2,
                censored: false,
            })
            .collect();
        let weights = kaplan_meier_weights(&observations).unwrap();
        let uniform = 1.0 / areas.len() as f64;
        for w in weights {
            prop_assert_eq!(w, uniform);
        }
    }

    #[test]
    fn traced_boundaries_enclose_their_cells(steps in prop::collection::vec(0u8..4, 1..60)) {
        let mut cells = BTreeSet::new();
        let (mut i, mut j) = (0i32, 0i32);
        cells.insert((i, j));
        for s in steps {
            match s {
                0 => i += 1,
                1 => i -= 1,
                2 => j += 1,
                _ => j -= 1,
            }
            cells.insert((i, j));
        }
        let cell = 2.0;
        let poly = lattice_polygon(&cells, cell).unwrap();
        // The outer loop covers at least the cells themselves (holes only add).
        prop_assert!(poly.area() + 1e-9 >= cells.len() as f64 * cell * cell);
        for &(ci, cj) in &cells {
            let center = Point::new((cj as f64 + 0.5) * cell, (ci as f64 + 0.5) * cell);
            prop_assert!(poly.contains(center), "cell ({ci}, {cj}) escaped");
        }
    }

    #[test]
    fn projected_distances_match_great_circle_lengths(
        lat in -60.0..60.0f64,
        lon in -170.0..170.0f64,
        dlat in -1.0..1.0f64,
        dlon in -1.0..1.0f64,
    ) {
        let a = (lat, lon);
        let b = (lat + dlat, lon + dlon);
        let bounds = bounding_region(&[a, b]).unwrap();
        let pa = project(a.0, a.1, &bounds, EARTH_RADIUS_KM);
        let pb = project(b.0, b.1, &bounds, EARTH_RADIUS_KM);
        let planar = pa.dist(pb);

        let (phi1, phi2) = (a.0.to_radians(), b.0.to_radians());
        let dphi = (b.0 - a.0).to_radians();
        let dlam = (b.1 - a.1).to_radians();
        let h = (dphi / 2.0).sin().powi(2)
            + phi1.cos() * phi2.cos() * (dlam / 2.0).sin().powi(2);
        let great_circle = 2.0 * EARTH_RADIUS_KM * h.sqrt().asin();

        prop_assume!(great_circle > 0.1);
        prop_assert!(
            (planar - great_circle).abs() / great_circle < 0.01,
            "planar {planar} vs great-circle {great_circle}"
        );
    }
}
