//! Star-hull reduction of a boundary polygon to a radial function.
//!
//! Fix a reference point inside the region (the centroid of the region's
//! convex hull) and, for each angle on a uniform grid, record the distance
//! to the farthest boundary intersection along that ray. The resulting curve
//! r(theta) describes the star hull of the region: the union of all ray
//! segments from the reference point to the boundary. For star-shaped
//! regions the hull is exact; elsewhere it overestimates, and the measures
//! in this module quantify by how much.

use crate::error::{Error, Result};
use crate::geometry::{self, Point, Polygon};
use crate::regions::Region;

/// Uniform angular grid `theta_t = 2 pi t / m` for `t = 0..m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AngularGrid {
    m: usize,
}

impl AngularGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m < 4 {
            return Err(Error::InvalidArgument(format!(
                "angular grid needs at least 4 points, got {m}"
            )));
        }
        Ok(AngularGrid { m })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn theta(&self, t: usize) -> f64 {
        2.0 * std::f64::consts::PI * t as f64 / self.m as f64
    }

    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.m).map(|t| self.theta(t))
    }

    /// Angular spacing `2 pi / m`, which doubles as the quadrature weight
    /// for integrals over the circle.
    pub fn step(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.m as f64
    }
}

impl Default for AngularGrid {
    fn default() -> Self {
        AngularGrid { m: 1000 }
    }
}

/// A sampled radial function about a reference point.
#[derive(Clone, Debug)]
pub struct RadialFunction {
    pub grid: AngularGrid,
    /// Distance to the farthest boundary intersection at each grid angle,
    /// in kilometres; always finite and positive.
    pub values: Vec<f64>,
    pub ref_point: Point,
    /// Carried over from the region the curve was measured on.
    pub censored: bool,
}

impl RadialFunction {
    /// Samples the radial function of `boundary` about `ref_point`.
    ///
    /// Fails if some ray never meets the boundary, which happens when the
    /// reference point falls outside every star-shaped core of the region.
    pub fn compute(
        boundary: &Polygon,
        ref_point: Point,
        grid: AngularGrid,
        censored: bool,
    ) -> Result<Self> {
        let values = (0..grid.len())
            .map(|t| {
                let hits = cast_ray(boundary, ref_point, grid.theta(t));
                hits.farthest.ok_or_else(|| {
                    Error::Geometry(format!(
                        "ray at grid angle {t} misses the region boundary"
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(RadialFunction {
            grid,
            values,
            ref_point,
            censored,
        })
    }

    /// Radial function of a region about the centroid of its convex hull.
    pub fn for_region(region: &Region, grid: AngularGrid) -> Result<Self> {
        let hull = geometry::convex_hull(region.boundary.vertices())?;
        Self::compute(&region.boundary, hull.centroid(), grid, region.censored)
    }
}

/// Area enclosed by the sampled star hull, `1/2 sum r_t^2 dtheta`.
pub fn starhull_area(rf: &RadialFunction) -> f64 {
    0.5 * rf.grid.step() * rf.values.iter().map(|r| r * r).sum::<f64>()
}

/// Percentage area discrepancy of the star hull against the region itself:
/// `(A_star - A_region) / A_region * 100`.
pub fn starhull_overall_error(boundary: &Polygon, rf: &RadialFunction) -> f64 {
    let region_area = boundary.area();
    100.0 * (starhull_area(rf) - region_area) / region_area
}

/// Total angle measure (radians) of grid directions whose ray crosses the
/// boundary more than once, i.e. where the region is not star-shaped as
/// seen from `ref_point`.
pub fn multi_intersection_measure(
    boundary: &Polygon,
    ref_point: Point,
    grid: &AngularGrid,
) -> f64 {
    let mut count = 0usize;
    for theta in grid.thetas() {
        let mut crossings = cast_ray(boundary, ref_point, theta).crossings;
        crossings.sort_by(|a, b| a.partial_cmp(b).unwrap());
        crossings.dedup_by(|a, b| *a - *b <= 1e-9 * (1.0 + *a));
        if crossings.len() > 1 {
            count += 1;
        }
    }
    count as f64 * grid.step()
}

/// Fraction of the ray segment `[0, r(theta_t)]` lying outside the region.
/// Zero everywhere exactly when the star hull reproduces the region along
/// the sampled rays.
pub fn directional_error(boundary: &Polygon, rf: &RadialFunction, t: usize) -> f64 {
    let r = rf.values[t];
    let mut crossings = cast_ray(boundary, rf.ref_point, rf.grid.theta(t)).crossings;
    crossings.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut inside = boundary.contains(rf.ref_point);
    let mut inside_len = 0.0;
    let mut at = 0.0;
    for s in crossings {
        let s = s.min(r);
        if inside {
            inside_len += s - at;
        }
        at = s;
        inside = !inside;
        if at >= r {
            break;
        }
    }
    if inside {
        inside_len += r - at;
    }
    (1.0 - inside_len / r).clamp(0.0, 1.0)
}

pub(crate) struct RayHits {
    /// Sorted-insertion-order parameters `s > 0` where the boundary crosses
    /// the ray; parity toggles of the inside test.
    pub(crate) crossings: Vec<f64>,
    /// Largest parameter at which the boundary touches the ray, if any.
    pub(crate) farthest: Option<f64>,
}

/// Casts the ray `origin + s (cos theta, sin theta)`, `s > 0`, against every
/// polygon edge.
///
/// Crossing detection classifies each vertex by the side of the ray line it
/// falls on (points exactly on the line count as the positive side), which
/// makes the parity count consistent through vertices. The farthest-touch
/// tracking additionally picks up tangential vertex touches and, for edges
/// collinear with the ray, their far endpoint.
pub(crate) fn cast_ray(boundary: &Polygon, origin: Point, theta: f64) -> RayHits {
    let dir = Point::new(theta.cos(), theta.sin());
    let cross2 = |p: Point, q: Point| p.x * q.y - p.y * q.x;

    let mut crossings = Vec::new();
    let mut farthest: Option<f64> = None;
    let mut push_touch = |s: f64| {
        if s > 0.0 && farthest.is_none_or(|f| s > f) {
            farthest = Some(s);
        }
    };

    for (a, b) in boundary.edges() {
        let sa = cross2(dir, a - origin);
        let sb = cross2(dir, b - origin);
        let edge = b - a;
        let denom = cross2(dir, edge);
        if denom == 0.0 {
            if sa == 0.0 && sb == 0.0 {
                push_touch((a.x - origin.x) * dir.x + (a.y - origin.y) * dir.y);
                push_touch((b.x - origin.x) * dir.x + (b.y - origin.y) * dir.y);
            }
            continue;
        }
        let s = cross2(a - origin, edge) / denom;
        let u = -sa / denom;
        if (-1e-12..=1.0 + 1e-12).contains(&u) {
            push_touch(s);
        }
        if (sa >= 0.0) != (sb >= 0.0) && s > 0.0 {
            crossings.push(s);
        }
    }
    RayHits { crossings, farthest }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn circle(radius: f64, center: Point, n: usize) -> Polygon {
        let verts = (0..n)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                Point::new(center.x + radius * a.cos(), center.y + radius * a.sin())
            })
            .collect();
        Polygon::new(verts).unwrap()
    }

    fn square(half: f64) -> Polygon {
        Polygon::new(vec![
            Point::new(-half, -half),
            Point::new(half, -half),
            Point::new(half, half),
            Point::new(-half, half),
        ])
        .unwrap()
    }

    #[test]
    fn radial_function_of_a_circle_is_constant() {
        let poly = circle(2.0, Point::new(0.3, -0.2), 512);
        let grid = AngularGrid::new(360).unwrap();
        let rf =
            RadialFunction::compute(&poly, Point::new(0.3, -0.2), grid, false).unwrap();
        for &r in &rf.values {
            assert_relative_eq!(r, 2.0, epsilon = 1e-4);
        }
        assert!(starhull_overall_error(&poly, &rf).abs() < 0.05);
        assert_eq!(multi_intersection_measure(&poly, rf.ref_point, &grid), 0.0);
    }

    #[test]
    fn radial_function_of_a_square_matches_closed_form() {
        let poly = square(1.0);
        let grid = AngularGrid::new(8).unwrap();
        let rf = RadialFunction::compute(&poly, Point::new(0.0, 0.0), grid, false).unwrap();
        assert_relative_eq!(rf.values[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(rf.values[1], std::f64::consts::SQRT_2, epsilon = 1e-12);
        assert_relative_eq!(rf.values[2], 1.0, epsilon = 1e-12);
        assert_relative_eq!(rf.values[6], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ray_through_a_vertex_reports_the_vertex_distance() {
        let diamond = Polygon::new(vec![
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(-1.0, 0.0),
            Point::new(0.0, -1.0),
        ])
        .unwrap();
        let grid = AngularGrid::new(4).unwrap();
        let rf =
            RadialFunction::compute(&diamond, Point::new(0.0, 0.0), grid, false).unwrap();
        for &r in &rf.values {
            assert_relative_eq!(r, 1.0, epsilon = 1e-12);
        }
        for t in 0..4 {
            // Inexact trig directions leave last-ulp dust on vertex hits.
            assert!(directional_error(&diamond, &rf, t) < 1e-12);
        }
    }

    #[test]
    fn star_shaped_region_has_zero_directional_error() {
        let poly = square(3.0);
        let grid = AngularGrid::default();
        let rf = RadialFunction::compute(&poly, Point::new(0.4, -1.1), grid, false).unwrap();
        for t in 0..grid.len() {
            assert_eq!(directional_error(&poly, &rf, t), 0.0);
        }
    }

    /// A U shape whose mouth opens upward; seen from inside the mouth, rays
    /// pointing down cross the bottom bar while the two prongs flank them.
    fn u_shape() -> Polygon {
        Polygon::new(vec![
            Point::new(-3.0, 0.0),
            Point::new(3.0, 0.0),
            Point::new(3.0, 4.0),
            Point::new(2.0, 4.0),
            Point::new(2.0, 1.0),
            Point::new(-2.0, 1.0),
            Point::new(-2.0, 4.0),
            Point::new(-3.0, 4.0),
        ])
        .unwrap()
    }

    #[test]
    fn non_star_region_shows_multi_intersections_and_directional_error() {
        let poly = u_shape();
        // Inside the bottom bar: rays toward the prong tips leave the region
        // through the mouth and re-enter a prong.
        let ref_point = Point::new(0.0, 0.5);
        assert!(poly.contains(ref_point));
        let grid = AngularGrid::new(720).unwrap();
        let measure = multi_intersection_measure(&poly, ref_point, &grid);
        assert!(measure > 0.1, "measure {measure}");

        let rf = RadialFunction::compute(&poly, ref_point, grid, false).unwrap();
        let worst = (0..grid.len())
            .map(|t| directional_error(&poly, &rf, t))
            .fold(0.0f64, f64::max);
        assert!(worst > 0.5, "worst {worst}");
        // Straight down is still a clean single crossing.
        let down = grid.len() * 3 / 4;
        assert_eq!(directional_error(&poly, &rf, down), 0.0);
        assert!(starhull_overall_error(&poly, &rf) > 0.0);
    }

    #[test]
    fn reference_point_with_rays_that_miss_is_an_error() {
        let poly = square(1.0);
        let grid = AngularGrid::default();
        let err = RadialFunction::compute(&poly, Point::new(10.0, 10.0), grid, false);
        assert!(matches!(err, Err(Error::Geometry(_))));
    }

    #[test]
    fn starhull_area_matches_quadrature_of_a_disc() {
        let poly = circle(5.0, Point::new(0.0, 0.0), 2048);
        let grid = AngularGrid::default();
        let rf = RadialFunction::compute(&poly, Point::new(0.0, 0.0), grid, false).unwrap();
        assert_relative_eq!(
            starhull_area(&rf),
            std::f64::consts::PI * 25.0,
            max_relative = 1e-4
        );
    }
}
