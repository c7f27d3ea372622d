//! Region adjacency graph over the watershed atoms.
//!
//! Clusters carry hierarchy links, a planar adjacency list sorted by
//! neighbour id, their area and a diagonal Gaussian colour model. Boundaries
//! carry an approximate Euclidean length and an average contrast. The whole
//! graph is founded in one raster scan plus one pass over the clusters.

use crate::color::{LabImage, Plane};
use crate::distance::{self, ContrastInit, DistanceConfig, LengthNorm};
use crate::error::{Error, Result};
use crate::labels::LabelMap;

/// Sentinel for absent hierarchy links.
pub const NOT_CONNECTED: u32 = u32::MAX;

/// Length credited to a crack that is part of a diagonal step.
pub const DIAGONAL_CRACK: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Lower bound on boundary lengths after diagonal shortening.
pub const MIN_BOUNDARY_LENGTH: f64 = 0.1;

/// Per-channel Gaussian colour model (ML estimates, diagonal covariance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorStats {
    pub mean: [f64; 3],
    pub sigma: [f64; 3],
}

impl ColorStats {
    pub fn single(color: [f64; 3]) -> Self {
        ColorStats {
            mean: color,
            sigma: [0.0; 3],
        }
    }

    /// Joins two models in constant time.
    pub fn merge(&self, area: u64, other: &ColorStats, other_area: u64) -> ColorStats {
        let (n1, n2) = (area as f64, other_area as f64);
        let n = n1 + n2;
        let mut mean = [0.0; 3];
        let mut sigma = [0.0; 3];
        for c in 0..3 {
            let delta = self.mean[c] - other.mean[c];
            mean[c] = (n1 * self.mean[c] + n2 * other.mean[c]) / n;
            let m2 =
                self.sigma[c] * self.sigma[c] * n1 + other.sigma[c] * other.sigma[c] * n2 + delta * delta * n1 * n2 / n;
            sigma[c] = (m2 / n).sqrt();
        }
        ColorStats { mean, sigma }
    }
}

/// Running sums for one cluster, shifted by the first sample so that
/// constant regions come out with exactly zero spread.
#[derive(Debug, Clone, Copy, Default)]
struct StatsAccumulator {
    count: u64,
    shift: [f64; 3],
    sum: [f64; 3],
    sum_sq: [f64; 3],
}

impl StatsAccumulator {
    #[inline]
    fn push(&mut self, v: [f64; 3]) {
        if self.count == 0 {
            self.shift = v;
        }
        self.count += 1;
        for c in 0..3 {
            let d = v[c] - self.shift[c];
            self.sum[c] += d;
            self.sum_sq[c] += d * d;
        }
    }

    fn finish(&self) -> ColorStats {
        let n = self.count as f64;
        let mut mean = [0.0; 3];
        let mut sigma = [0.0; 3];
        for c in 0..3 {
            let m = self.sum[c] / n;
            mean[c] = self.shift[c] + m;
            sigma[c] = (self.sum_sq[c] / n - m * m).max(0.0).sqrt();
        }
        ColorStats { mean, sigma }
    }
}

/// Adjacency entry: neighbour, shared boundary and cached distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub neighbor: u32,
    pub boundary: u32,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub parent: u32,
    pub left: u32,
    pub right: u32,
    /// Sorted strictly ascending by neighbour id.
    pub adjacency: Vec<Link>,
    /// Position of the nearest neighbour in `adjacency`.
    pub nn_index: Option<usize>,
    pub area: u64,
    pub stats: ColorStats,
    pub alive: bool,
}

impl Cluster {
    pub fn is_leaf(&self) -> bool {
        self.left == NOT_CONNECTED
    }

    pub fn nearest(&self) -> Option<&Link> {
        self.nn_index.map(|i| &self.adjacency[i])
    }

    /// Rescans the adjacency for the minimum distance, smallest id on ties.
    pub fn refresh_nn(&mut self) {
        let mut best: Option<usize> = None;
        for (i, link) in self.adjacency.iter().enumerate() {
            // strict comparison keeps the earliest, i.e. smallest, id
            if best.is_none_or(|b| link.distance < self.adjacency[b].distance) {
                best = Some(i);
            }
        }
        self.nn_index = best;
    }

    pub fn link_to(&self, neighbor: u32) -> Option<&Link> {
        self.adjacency
            .binary_search_by_key(&neighbor, |l| l.neighbor)
            .ok()
            .map(|i| &self.adjacency[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundary {
    pub parent: u32,
    pub length: f64,
    pub contrast: f64,
}

#[derive(Debug, Clone)]
pub struct RegionGraph {
    pub clusters: Vec<Cluster>,
    pub boundaries: Vec<Boundary>,
    pub atom_count: usize,
    /// Leaf label map the graph was founded on.
    pub atoms: LabelMap,
    /// Atom pair `[lower, higher]` for every boundary created at founding.
    pub atomic_pairs: Vec<[u32; 2]>,
}

impl RegionGraph {
    pub fn width(&self) -> usize {
        self.atoms.width()
    }

    pub fn height(&self) -> usize {
        self.atoms.height()
    }

    pub fn live_clusters(&self) -> impl Iterator<Item = (u32, &Cluster)> {
        self.clusters
            .iter()
            .enumerate()
            .filter(|(_, c)| c.alive)
            .map(|(i, c)| (i as u32, c))
    }

    /// Mean adjacency list length over live clusters.
    pub fn mean_degree(&self) -> f64 {
        let (sum, count) = self
            .live_clusters()
            .fold((0usize, 0usize), |(s, n), (_, c)| (s + c.adjacency.len(), n + 1));
        if count == 0 {
            0.0
        } else {
            sum as f64 / count as f64
        }
    }

    pub fn distance(&self, p: u32, q: u32, boundary: u32, cfg: &DistanceConfig) -> f64 {
        distance::cluster_distance(
            &self.clusters[p as usize],
            &self.clusters[q as usize],
            &self.boundaries[boundary as usize],
            cfg,
        )
    }
}

/// Diagonal test for the crack between `i` and `j`.
///
/// `k` and `l` are the labels one step further along the crack (below `i`
/// and `j` for a vertical crack, right of them for a horizontal one); `None`
/// when that row or column lies outside the image. The crack belongs to a
/// diagonal step when `i` reappears at `l` or `j` at `k`.
pub fn diagonal_shorten_check(i: u32, j: u32, k: Option<u32>, l: Option<u32>) -> bool {
    match (k, l) {
        (Some(k), Some(l)) => i == l || j == k,
        _ => false,
    }
}

/// Builds the region graph in a single scan over labels and colours.
///
/// `gradient` is required when the configuration initialises contrasts from
/// the gradient magnitude and ignored otherwise.
pub fn found_graph(
    labels: &LabelMap,
    lab: &LabImage,
    gradient: Option<&Plane>,
    cfg: &DistanceConfig,
) -> Result<RegionGraph> {
    let (w, h) = (labels.width(), labels.height());
    if lab.width() != w || lab.height() != h {
        return Err(Error::DimensionMismatch {
            left_width: w,
            left_height: h,
            right_width: lab.width(),
            right_height: lab.height(),
        });
    }
    cfg.validate()?;
    let gradient = match (cfg.contrast_init, gradient) {
        (ContrastInit::GradientMean, None) => return Err(Error::MissingGradient),
        (ContrastInit::GradientMean, Some(g)) => {
            if g.width() != w || g.height() != h {
                return Err(Error::DimensionMismatch {
                    left_width: w,
                    left_height: h,
                    right_width: g.width(),
                    right_height: g.height(),
                });
            }
            Some(g)
        }
        (ContrastInit::Appearance, _) => None,
    };
    labels.validate()?;

    let n = labels.region_count();
    let shorten = cfg.length_norm == LengthNorm::L2Approx;
    let ids = labels.labels();
    let mut acc = vec![StatsAccumulator::default(); n];
    // during the scan each list holds only lower neighbour ids
    let mut adjacency: Vec<Vec<Link>> = vec![Vec::new(); n];
    let mut lengths: Vec<f64> = Vec::new();
    let mut grad_sums: Vec<f64> = Vec::new();
    let mut grad_counts: Vec<u32> = Vec::new();
    let mut atomic_pairs: Vec<[u32; 2]> = Vec::new();

    let at = |x: usize, y: usize| -> Option<u32> { (x < w && y < h).then(|| ids[y * w + x]) };

    for y in 0..h {
        for x in 0..w {
            let p = y * w + x;
            let a = ids[p];
            acc[a as usize].push(lab.pixel(p));

            // right neighbour (vertical crack), then bottom (horizontal crack)
            for (q, k, l) in [
                ((x + 1 < w).then(|| p + 1), at(x, y + 1), at(x + 1, y + 1)),
                ((y + 1 < h).then(|| p + w), at(x + 1, y), at(x + 1, y + 1)),
            ] {
                let Some(q) = q else { continue };
                let b = ids[q];
                if a == b {
                    continue;
                }
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                let list = &mut adjacency[hi as usize];
                let boundary = match list.binary_search_by_key(&lo, |link| link.neighbor) {
                    Ok(pos) => list[pos].boundary as usize,
                    Err(pos) => {
                        let id = lengths.len();
                        lengths.push(0.0);
                        grad_sums.push(0.0);
                        grad_counts.push(0);
                        atomic_pairs.push([lo, hi]);
                        list.insert(
                            pos,
                            Link {
                                neighbor: lo,
                                boundary: id as u32,
                                distance: 0.0,
                            },
                        );
                        id
                    }
                };
                lengths[boundary] += if shorten && diagonal_shorten_check(a, b, k, l) {
                    DIAGONAL_CRACK
                } else {
                    1.0
                };
                if let Some(g) = gradient {
                    grad_sums[boundary] += g.data()[p] + g.data()[q];
                    grad_counts[boundary] += 2;
                }
            }
        }
    }

    let stats: Vec<ColorStats> = acc.iter().map(StatsAccumulator::finish).collect();
    let areas: Vec<u64> = acc.iter().map(|a| a.count).collect();

    let mut boundaries: Vec<Boundary> = Vec::with_capacity(lengths.len().max(1) * 2);
    for (i, &length) in lengths.iter().enumerate() {
        let [lo, hi] = atomic_pairs[i];
        let gradient_mean = if grad_counts[i] > 0 {
            grad_sums[i] / f64::from(grad_counts[i])
        } else {
            0.0
        };
        boundaries.push(Boundary {
            parent: NOT_CONNECTED,
            length: length.max(MIN_BOUNDARY_LENGTH),
            contrast: distance::init_contrast(&stats[lo as usize], &stats[hi as usize], gradient_mean, cfg),
        });
    }

    let mut clusters: Vec<Cluster> = Vec::with_capacity(2 * n - 1);
    for c in 0..n {
        clusters.push(Cluster {
            parent: NOT_CONNECTED,
            left: NOT_CONNECTED,
            right: NOT_CONNECTED,
            adjacency: std::mem::take(&mut adjacency[c]),
            nn_index: None,
            area: areas[c],
            stats: stats[c],
            alive: true,
        });
    }

    // fill distances and append backlinks; lists stay sorted because the
    // appended ids are processed in increasing order and exceed every
    // id already present
    let scanned: Vec<usize> = clusters.iter().map(|c| c.adjacency.len()).collect();
    for c in 0..n {
        for e in 0..scanned[c] {
            let link = clusters[c].adjacency[e];
            let d = distance::cluster_distance(
                &clusters[c],
                &clusters[link.neighbor as usize],
                &boundaries[link.boundary as usize],
                cfg,
            );
            clusters[c].adjacency[e].distance = d;
            clusters[link.neighbor as usize].adjacency.push(Link {
                neighbor: c as u32,
                boundary: link.boundary,
                distance: d,
            });
        }
    }
    for cluster in &mut clusters {
        cluster.refresh_nn();
    }

    Ok(RegionGraph {
        clusters,
        boundaries,
        atom_count: n,
        atoms: labels.clone(),
        atomic_pairs,
    })
}
