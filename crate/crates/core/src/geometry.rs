//! Planar geometry for region boundaries.
//!
//! Regions live on a satellite swath grid indexed by `(grid_i, grid_j)`.
//! Everything downstream works in a local planar chart: kilometres east and
//! north of the centre of the region's geographic bounding box. The
//! projection treats latitude lines as straight and scales longitude by the
//! cosine of the point's own latitude, which is accurate to well under a cell
//! width at the region scales this pipeline accepts.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::ingest::{GridIdx, Snapshot};

/// Mean Earth radius used by the default projection, in kilometres.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

const DEG_TO_RAD: f64 = std::f64::consts::PI / 180.0;

/// A point in the local planar chart, in kilometres.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

/// Cross product of `a - o` and `b - o`.
pub fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Geographic bounding box of a set of contour points, in degrees.
#[derive(Clone, Copy, Debug)]
pub struct BoundingRegion {
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
}

impl BoundingRegion {
    /// Centre of the box: `((lat_min + lat_max)/2, (lon_min + lon_max)/2)`.
    pub fn center(&self) -> (f64, f64) {
        (
            0.5 * (self.lat_min + self.lat_max),
            0.5 * (self.lon_min + self.lon_max),
        )
    }
}

/// Computes the bounding box of `(lat, lon)` pairs.
pub fn bounding_region(points: &[(f64, f64)]) -> Result<BoundingRegion> {
    if points.is_empty() {
        return Err(Error::InvalidArgument(
            "bounding region of an empty point set".into(),
        ));
    }
    if points.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
        return Err(Error::InvalidArgument(
            "bounding region of non-finite coordinates".into(),
        ));
    }
    let mut b = BoundingRegion {
        lat_min: f64::INFINITY,
        lat_max: f64::NEG_INFINITY,
        lon_min: f64::INFINITY,
        lon_max: f64::NEG_INFINITY,
    };
    for &(lat, lon) in points {
        b.lat_min = b.lat_min.min(lat);
        b.lat_max = b.lat_max.max(lat);
        b.lon_min = b.lon_min.min(lon);
        b.lon_max = b.lon_max.max(lon);
    }
    Ok(b)
}

/// Projects a geographic point onto the planar chart anchored at the centre
/// of `bounds`.
///
/// East: `x = R cos(lat) (lon - lon_mid)`, north: `y = R (lat - lat_mid)`,
/// with angles in radians and the cosine taken at the point's own latitude.
pub fn project(lat: f64, lon: f64, bounds: &BoundingRegion, earth_radius_km: f64) -> Point {
    let (lat_mid, lon_mid) = bounds.center();
    Point {
        x: earth_radius_km * (lat * DEG_TO_RAD).cos() * (lon - lon_mid) * DEG_TO_RAD,
        y: earth_radius_km * (lat - lat_mid) * DEG_TO_RAD,
    }
}

/// A simple closed polygon with counter-clockwise vertex order.
#[derive(Clone, Debug)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    /// Builds a polygon, reversing the vertex order if it arrives clockwise.
    ///
    /// Requires at least three vertices and a nonzero enclosed area.
    /// Self-intersection is not checked.
    pub fn new(mut vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Geometry(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices
            .iter()
            .any(|p| !p.x.is_finite() || !p.y.is_finite())
        {
            return Err(Error::Geometry("polygon vertex is not finite".into()));
        }
        let area = signed_area(&vertices);
        if area == 0.0 {
            return Err(Error::Geometry("polygon encloses zero area".into()));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        Ok(Polygon { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Enclosed area by the shoelace formula; positive by construction.
    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// Area-weighted centroid.
    pub fn centroid(&self) -> Point {
        let mut cx = 0.0;
        let mut cy = 0.0;
        let mut a = 0.0;
        for (p, q) in self.edges() {
            let w = p.x * q.y - q.x * p.y;
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
            a += w;
        }
        Point::new(cx / (3.0 * a), cy / (3.0 * a))
    }

    /// Directed edges `(v_k, v_{k+1})`, wrapping around at the end.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n]))
    }

    /// Even-odd point-in-polygon test. Points on the boundary may land on
    /// either side.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Axis-aligned bounding box as `(lower_left, upper_right)`.
    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
        }
        (lo, hi)
    }
}

fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut twice = 0.0;
    for k in 0..n {
        let p = vertices[k];
        let q = vertices[(k + 1) % n];
        twice += p.x * q.y - q.x * p.y;
    }
    0.5 * twice
}

/// Convex hull by monotone chain, counter-clockwise, with collinear interior
/// vertices dropped.
pub fn convex_hull(points: &[Point]) -> Result<Polygon> {
    if points
        .iter()
        .any(|p| !p.x.is_finite() || !p.y.is_finite())
    {
        return Err(Error::Geometry("hull input point is not finite".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::Geometry(
            "convex hull needs at least 3 distinct points".into(),
        ));
    }

    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() < 3 {
        return Err(Error::Geometry("convex hull input is collinear".into()));
    }
    Polygon::new(hull)
}

/// Tests whether `p` lies in the convex polygon `hull`, allowing it to sit
/// up to `tol` kilometres outside any edge.
pub fn convex_contains(hull: &Polygon, p: Point, tol: f64) -> bool {
    hull.edges().all(|(a, b)| {
        let len = a.dist(b);
        cross(a, b, p) >= -tol * len
    })
}

/// Traces the outer boundary of an 8-connected cell set on the integer
/// lattice.
///
/// Cell `(i, j)` occupies the unit square with lower corner `(i, j)`; the
/// returned loop visits lattice corners counter-clockwise (in `(i, j)`
/// coordinates) with collinear runs compressed. A corner pinched between two
/// diagonal cells appears twice. Boundaries of interior holes are dropped.
pub fn trace_boundary(cells: &BTreeSet<GridIdx>) -> Result<Vec<GridIdx>> {
    if cells.is_empty() {
        return Err(Error::Geometry("boundary of an empty cell set".into()));
    }

    // Directed boundary edges keep region cells on their left, so outer
    // loops come out counter-clockwise and hole loops clockwise.
    let mut outgoing: BTreeMap<GridIdx, Vec<GridIdx>> = BTreeMap::new();
    let mut push = |from: GridIdx, to: GridIdx| outgoing.entry(from).or_default().push(to);
    for &(i, j) in cells {
        if !cells.contains(&(i, j - 1)) {
            push((i, j), (i + 1, j));
        }
        if !cells.contains(&(i + 1, j)) {
            push((i + 1, j), (i + 1, j + 1));
        }
        if !cells.contains(&(i, j + 1)) {
            push((i + 1, j + 1), (i, j + 1));
        }
        if !cells.contains(&(i - 1, j)) {
            push((i, j + 1), (i, j));
        }
    }
    for targets in outgoing.values_mut() {
        targets.sort();
    }

    let mut best: Option<(f64, Vec<GridIdx>)> = None;
    while let Some((&start, _)) = outgoing.iter().next() {
        let first = remove_edge(&mut outgoing, start, None);
        let mut path = Vec::new();
        let mut edge = (start, first);
        loop {
            let (from, to) = edge;
            path.push(from);
            let dir = (to.0 - from.0, to.1 - from.1);
            if to == start {
                // Closing the loop is just another candidate turn; a pinched
                // start corner may need to pass through and come back later.
                let back_rank = turn_rank(dir, (first.0 - to.0, first.1 - to.1));
                let better = outgoing.get(&to).into_iter().flatten().any(|&cand| {
                    turn_rank(dir, (cand.0 - to.0, cand.1 - to.1)) < back_rank
                });
                if !better {
                    break;
                }
            }
            let next = remove_edge(&mut outgoing, to, Some(dir));
            edge = (to, next);
        }
        let loop_area = lattice_signed_area(&path);
        if loop_area > 0.0 && best.as_ref().is_none_or(|(a, _)| loop_area > *a) {
            best = Some((loop_area, path));
        }
    }

    let (_, path) = best.ok_or_else(|| Error::Geometry("no outer boundary loop found".into()))?;
    Ok(compress_collinear(path))
}

/// Takes the most clockwise available edge out of `corner`; `incoming` is
/// the direction we arrived with, `None` when starting a fresh loop.
fn remove_edge(
    outgoing: &mut BTreeMap<GridIdx, Vec<GridIdx>>,
    corner: GridIdx,
    incoming: Option<(i32, i32)>,
) -> GridIdx {
    let targets = outgoing.get_mut(&corner).expect("boundary edge pairing");
    let pick = match incoming {
        None => 0,
        Some(dir) => {
            let mut best = 0;
            for k in 1..targets.len() {
                let rank = |t: GridIdx| turn_rank(dir, (t.0 - corner.0, t.1 - corner.1));
                if rank(targets[k]) < rank(targets[best]) {
                    best = k;
                }
            }
            best
        }
    };
    let to = targets.remove(pick);
    if targets.is_empty() {
        outgoing.remove(&corner);
    }
    to
}

/// Ranks a turn: right turns first, then straight, then left. Keeping the
/// tightest right turn splits touching hole loops apart and keeps a region
/// pinched at a corner in one outer loop.
fn turn_rank(incoming: (i32, i32), outgoing: (i32, i32)) -> u8 {
    let right = (incoming.1, -incoming.0);
    if outgoing == right {
        0
    } else if outgoing == incoming {
        1
    } else {
        2
    }
}

fn lattice_signed_area(path: &[GridIdx]) -> f64 {
    let n = path.len();
    let mut twice: i64 = 0;
    for k in 0..n {
        let p = path[k];
        let q = path[(k + 1) % n];
        twice += p.0 as i64 * q.1 as i64 - q.0 as i64 * p.1 as i64;
    }
    0.5 * twice as f64
}

fn compress_collinear(path: Vec<GridIdx>) -> Vec<GridIdx> {
    let n = path.len();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let prev = path[(k + n - 1) % n];
        let here = path[k];
        let next = path[(k + 1) % n];
        let din = (here.0 - prev.0, here.1 - prev.1);
        let dout = (next.0 - here.0, next.1 - here.1);
        if din != dout {
            out.push(here);
        }
    }
    out
}

/// Builds the outer boundary polygon of a cell set directly in planar
/// coordinates, with `x = j * cell_size` and `y = i * cell_size`.
///
/// For rectangular cell blocks the enclosed area equals the cell count times
/// the cell area exactly.
pub fn lattice_polygon(cells: &BTreeSet<GridIdx>, cell_size_km: f64) -> Result<Polygon> {
    let corners = trace_boundary(cells)?;
    let vertices = corners
        .iter()
        .map(|&(p, q)| Point::new(q as f64 * cell_size_km, p as f64 * cell_size_km))
        .collect();
    Polygon::new(nudge_duplicates(vertices))
}

/// Builds the outer boundary polygon of a region's cells in the planar chart
/// of the region's own geographic bounding box.
///
/// Each lattice corner is placed at the midpoint of an observed diagonal
/// pair of swath cells when one exists; otherwise it is reconstructed from a
/// single observed cell using locally estimated grid axes.
pub fn boundary_polygon(
    cells: &BTreeSet<GridIdx>,
    snapshot: &Snapshot,
    earth_radius_km: f64,
) -> Result<Polygon> {
    Ok(framed_boundary_polygon(cells, snapshot, earth_radius_km)?.0)
}

/// Like [`boundary_polygon`], but also returns the chart the polygon's km
/// coordinates live in, so callers can [`project`] related points (cell
/// centers, other contours) into the same frame.
pub fn framed_boundary_polygon(
    cells: &BTreeSet<GridIdx>,
    snapshot: &Snapshot,
    earth_radius_km: f64,
) -> Result<(Polygon, BoundingRegion)> {
    let corners = trace_boundary(cells)?;
    let geo: Vec<(f64, f64)> = corners
        .iter()
        .map(|&c| corner_position(c, snapshot))
        .collect::<Result<_>>()?;
    let bounds = bounding_region(&geo)?;
    let vertices: Vec<Point> = geo
        .iter()
        .map(|&(lat, lon)| project(lat, lon, &bounds, earth_radius_km))
        .collect();
    Ok((Polygon::new(nudge_duplicates(vertices))?, bounds))
}

/// Geographic position of the lattice corner `(p, q)`, shared by cells
/// `(p-1, q-1)`, `(p-1, q)`, `(p, q-1)` and `(p, q)`.
fn corner_position(corner: GridIdx, snapshot: &Snapshot) -> Result<(f64, f64)> {
    let (p, q) = corner;
    for (a, b) in [((p - 1, q - 1), (p, q)), ((p - 1, q), (p, q - 1))] {
        if let (Some(ca), Some(cb)) = (snapshot.center(a), snapshot.center(b)) {
            return Ok((0.5 * (ca.0 + cb.0), 0.5 * (ca.1 + cb.1)));
        }
    }
    // Swath edge: no observed diagonal pair. Fall back to one observed cell
    // plus half a step along each locally estimated grid axis.
    for cell in [(p - 1, q - 1), (p - 1, q), (p, q - 1), (p, q)] {
        let Some(center) = snapshot.center(cell) else {
            continue;
        };
        let (a, b) = cell;
        let axis_i = grid_axis(snapshot, cell, (1, 0)).unwrap_or_else(|| {
            (snapshot.cell_size_km / EARTH_RADIUS_KM / DEG_TO_RAD, 0.0)
        });
        let axis_j = grid_axis(snapshot, cell, (0, 1)).unwrap_or_else(|| {
            let scale = (center.0 * DEG_TO_RAD).cos().max(1e-6);
            (0.0, snapshot.cell_size_km / EARTH_RADIUS_KM / DEG_TO_RAD / scale)
        });
        let si = if p == a { -0.5 } else { 0.5 };
        let sj = if q == b { -0.5 } else { 0.5 };
        return Ok((
            center.0 + si * axis_i.0 + sj * axis_j.0,
            center.1 + si * axis_i.1 + sj * axis_j.1,
        ));
    }
    Err(Error::Geometry(format!(
        "lattice corner ({p}, {q}) touches no observed cell"
    )))
}

/// One grid step along `step` at `cell`, estimated from observed neighbour
/// centres: a central difference when both neighbours exist, one-sided when
/// only one does, `None` when neither does.
fn grid_axis(snapshot: &Snapshot, cell: GridIdx, step: GridIdx) -> Option<(f64, f64)> {
    let fwd = snapshot.center((cell.0 + step.0, cell.1 + step.1));
    let bwd = snapshot.center((cell.0 - step.0, cell.1 - step.1));
    let here = snapshot.center(cell)?;
    match (fwd, bwd) {
        (Some(f), Some(b)) => Some((0.5 * (f.0 - b.0), 0.5 * (f.1 - b.1))),
        (Some(f), None) => Some((f.0 - here.0, f.1 - here.1)),
        (None, Some(b)) => Some((here.0 - b.0, here.1 - b.1)),
        (None, None) => None,
    }
}

/// Separates coincident vertices by a nanometre-scale nudge along their
/// interior angle bisectors, so pinched corners yield a simple polygon.
fn nudge_duplicates(mut vertices: Vec<Point>) -> Vec<Point> {
    const NUDGE_KM: f64 = 1e-9;
    let n = vertices.len();
    let mut groups: BTreeMap<(u64, u64), Vec<usize>> = BTreeMap::new();
    for (k, v) in vertices.iter().enumerate() {
        groups
            .entry((v.x.to_bits(), v.y.to_bits()))
            .or_default()
            .push(k);
    }
    for indices in groups.values().filter(|g| g.len() > 1) {
        for &k in indices {
            let v = vertices[k];
            let prev = vertices[(k + n - 1) % n];
            let next = vertices[(k + 1) % n];
            let into_prev = prev - v;
            let into_next = next - v;
            let (np, nn) = (into_prev.norm(), into_next.norm());
            if np == 0.0 || nn == 0.0 {
                continue;
            }
            let bisector = into_prev * (1.0 / np) + into_next * (1.0 / nn);
            let len = bisector.norm();
            if len > 0.0 {
                vertices[k] = v + bisector * (NUDGE_KM / len);
            }
        }
    }
    vertices
}
