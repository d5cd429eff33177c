//! Extraction of contiguous rainfall regions from a snapshot.
//!
//! A region is a maximal 8-connected set of cells with rain rate above the
//! threshold. A region is censored when any of its cells sits at the swath
//! edge, where the pass simply stopped observing; such regions may extend
//! beyond what was seen, so their measured size is a lower bound.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::geometry::{self, Polygon};
use crate::ingest::{GridIdx, Snapshot};

/// A connected set of rainy cells from one pass, before any geometry is
/// attached.
#[derive(Clone, Debug)]
pub struct CellCluster {
    pub pass_id: String,
    pub cells: BTreeSet<GridIdx>,
}

/// A rainfall region with its traced boundary.
#[derive(Clone, Debug)]
pub struct Region {
    pub pass_id: String,
    pub cells: BTreeSet<GridIdx>,
    pub boundary: Polygon,
    pub area_km2: f64,
    pub censored: bool,
}

const NEIGHBORS_8: [(i32, i32); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

/// Finds all 8-connected clusters of cells with `rain_rate > threshold`,
/// ordered by their smallest grid index.
pub fn extract_regions(snapshot: &Snapshot, rain_threshold: f64) -> Vec<CellCluster> {
    let rainy: Vec<GridIdx> = snapshot
        .cells
        .iter()
        .filter(|(_, v)| v.rain_rate > rain_threshold)
        .map(|(&idx, _)| idx)
        .collect();
    let index_of: BTreeMap<GridIdx, usize> =
        rainy.iter().enumerate().map(|(k, &c)| (c, k)).collect();

    // First pass: union each rainy cell with its already-visited neighbours.
    let mut uf = UnionFind::new(rainy.len());
    for (k, &(i, j)) in rainy.iter().enumerate() {
        for (di, dj) in [(-1, -1), (-1, 0), (-1, 1), (0, -1)] {
            if let Some(&other) = index_of.get(&(i + di, j + dj)) {
                uf.union(k, other);
            }
        }
    }

    // Second pass: gather components, keyed by their smallest member.
    let mut components: BTreeMap<GridIdx, BTreeSet<GridIdx>> = BTreeMap::new();
    for (k, &cell) in rainy.iter().enumerate() {
        let root = rainy[uf.find(k)];
        components.entry(root).or_default().insert(cell);
    }
    components
        .into_values()
        .map(|cells| CellCluster {
            pass_id: snapshot.pass_id.clone(),
            cells,
        })
        .collect()
}

/// A cluster is censored when any member cell has an 8-neighbour position
/// the pass did not observe at all.
pub fn flag_censoring(cluster: &CellCluster, snapshot: &Snapshot) -> bool {
    cluster.cells.iter().any(|&(i, j)| {
        NEIGHBORS_8
            .iter()
            .any(|&(di, dj)| !snapshot.observed((i + di, j + dj)))
    })
}

impl Region {
    /// Attaches boundary geometry and the censoring flag to a cluster.
    pub fn from_cluster(
        cluster: CellCluster,
        snapshot: &Snapshot,
        earth_radius_km: f64,
    ) -> Result<Region> {
        let censored = flag_censoring(&cluster, snapshot);
        let boundary = geometry::boundary_polygon(&cluster.cells, snapshot, earth_radius_km)?;
        let area_km2 = boundary.area();
        Ok(Region {
            pass_id: cluster.pass_id,
            cells: cluster.cells,
            boundary,
            area_km2,
            censored,
        })
    }
}

/// Keeps regions with `min_km2 <= area <= max_km2` (both ends inclusive),
/// preserving order.
pub fn filter_by_area(regions: Vec<Region>, min_km2: f64, max_km2: f64) -> Result<Vec<Region>> {
    if !(min_km2 >= 0.0 && max_km2 >= min_km2) {
        return Err(Error::InvalidArgument(format!(
            "area filter [{min_km2}, {max_km2}] is not a valid range"
        )));
    }
    Ok(regions
        .into_iter()
        .filter(|r| r.area_km2 >= min_km2 && r.area_km2 <= max_km2)
        .collect())
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}
