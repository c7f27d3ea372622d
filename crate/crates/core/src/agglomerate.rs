//! Greedy agglomeration over the region graph.
//!
//! Only reciprocal nearest neighbour pairs are kept in the priority queue:
//! the globally closest pair is always one of them, so popping the queue
//! reproduces exhaustive global-minimum merging while keeping the queue at
//! most half the number of live clusters.

use std::cmp::Ordering;

use crate::distance::{self, DistanceConfig};
use crate::error::{Error, Result};
use crate::graph::{Boundary, Cluster, Link, RegionGraph, NOT_CONNECTED};
use crate::queue::{AddressableHeap, Handle};

/// One merge of the hierarchy, in chronological order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeEvent {
    pub time: u32,
    /// Smaller of the two merged cluster ids.
    pub left: u32,
    pub right: u32,
    /// Always `atom_count + time`.
    pub parent: u32,
    pub distance: f64,
    /// Boundary between `left` and `right` that vanished with the merge.
    pub boundary: u32,
}

/// Complete binary merge tree over the watershed atoms.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    pub graph: RegionGraph,
    pub events: Vec<MergeEvent>,
    pub root: u32,
}

impl Hierarchy {
    pub fn atom_count(&self) -> usize {
        self.graph.atom_count
    }

    pub fn cluster(&self, id: u32) -> &Cluster {
        &self.graph.clusters[id as usize]
    }

    /// Event that created an internal cluster.
    pub fn creating_event(&self, id: u32) -> Option<usize> {
        (id as usize >= self.atom_count()).then(|| id as usize - self.atom_count())
    }
}

/// Queue key: distance first, then the pair ids.
#[derive(Debug, Clone, Copy)]
pub struct Candidate {
    pub distance: f64,
    pub low: u32,
    pub high: u32,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.low.cmp(&other.low))
            .then(self.high.cmp(&other.high))
    }
}

/// Stepwise agglomeration state. [`agglomerate`] drives it to completion;
/// stepping manually exposes the queue between merges.
pub struct Agglomerator {
    graph: RegionGraph,
    cfg: DistanceConfig,
    queue: AddressableHeap<Candidate>,
    entry: Vec<Option<Handle>>,
    events: Vec<MergeEvent>,
    live: usize,
}

impl Agglomerator {
    pub fn new(graph: RegionGraph, cfg: &DistanceConfig) -> Result<Self> {
        cfg.validate()?;
        let n = graph.clusters.len();
        let live = graph.clusters.iter().filter(|c| c.alive).count();
        let mut agg = Agglomerator {
            graph,
            cfg: cfg.clone(),
            queue: AddressableHeap::with_capacity(n / 2 + 1),
            entry: vec![None; n],
            events: Vec::with_capacity(n.saturating_sub(1)),
            live,
        };
        agg.entry.reserve(n);
        for c in 0..n as u32 {
            if agg.graph.clusters[c as usize].alive {
                agg.sync(c);
            }
        }
        Ok(agg)
    }

    pub fn graph(&self) -> &RegionGraph {
        &self.graph
    }

    pub fn events(&self) -> &[MergeEvent] {
        &self.events
    }

    pub fn live_count(&self) -> usize {
        self.live
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    /// Current queue entries as `(low, high)` pairs, sorted.
    pub fn queued_pairs(&self) -> Vec<(u32, u32)> {
        let mut pairs: Vec<_> = self.queue.iter().map(|(_, c)| (c.low, c.high)).collect();
        pairs.sort_unstable();
        pairs
    }

    fn reciprocal_partner(&self, a: u32) -> Option<u32> {
        let b = self.graph.clusters[a as usize].nearest()?.neighbor;
        let back = self.graph.clusters[b as usize].nearest()?.neighbor;
        (back == a).then_some(b)
    }

    fn drop_entry(&mut self, a: u32) {
        if let Some(h) = self.entry[a as usize] {
            let c = self.queue.remove(h).expect("entry handles are live");
            self.entry[c.low as usize] = None;
            self.entry[c.high as usize] = None;
        }
    }

    /// Makes the queue agree with the reciprocity of `a`'s nearest neighbour.
    fn sync(&mut self, a: u32) {
        let want = self.reciprocal_partner(a);
        if let (Some(b), Some(h)) = (want, self.entry[a as usize]) {
            let cur = self.queue.get(h).copied().expect("entry handles are live");
            let d = self.graph.clusters[a as usize].nearest().map(|l| l.distance);
            if (cur.low == a.min(b) && cur.high == a.max(b)) && Some(cur.distance) == d {
                return;
            }
        }
        self.drop_entry(a);
        if let Some(b) = want {
            self.drop_entry(b);
            let distance = self.graph.clusters[a as usize].nearest().unwrap().distance;
            let h = self.queue.push(Candidate {
                distance,
                low: a.min(b),
                high: a.max(b),
            });
            self.entry[a as usize] = Some(h);
            self.entry[b as usize] = Some(h);
        }
    }

    /// Merges the closest pair. `None` once the queue is exhausted.
    pub fn step(&mut self) -> Option<MergeEvent> {
        let (_, cand) = self.queue.pop()?;
        let (p, q) = (cand.low, cand.high);
        self.entry[p as usize] = None;
        self.entry[q as usize] = None;

        let r = self.graph.clusters.len() as u32;
        let time = self.events.len() as u32;
        let (adjacency, consumed) = self.merge_adjacency(p, q, r);

        let (cp, cq) = (&self.graph.clusters[p as usize], &self.graph.clusters[q as usize]);
        let merged = Cluster {
            parent: NOT_CONNECTED,
            left: p,
            right: q,
            adjacency,
            nn_index: None,
            area: cp.area + cq.area,
            stats: cp.stats.merge(cp.area, &cq.stats, cq.area),
            alive: true,
        };
        self.graph.clusters.push(merged);
        self.entry.push(None);
        for child in [p, q] {
            let c = &mut self.graph.clusters[child as usize];
            c.parent = r;
            c.alive = false;
            c.nn_index = None;
            c.adjacency = Vec::new();
        }

        // distances to the parent, mirrored into each neighbour's list; the
        // parent id exceeds every existing id, so pushing keeps lists sorted
        let links = std::mem::take(&mut self.graph.clusters[r as usize].adjacency);
        let mut filled = Vec::with_capacity(links.len());
        for link in links {
            let n = link.neighbor;
            let d = distance::cluster_distance(
                &self.graph.clusters[r as usize],
                &self.graph.clusters[n as usize],
                &self.graph.boundaries[link.boundary as usize],
                &self.cfg,
            );
            let neighbour = &mut self.graph.clusters[n as usize];
            let old_nn = neighbour.nearest().map(|l| (l.neighbor, l.distance));
            for child in [p, q] {
                if let Ok(i) = neighbour.adjacency.binary_search_by_key(&child, |l| l.neighbor) {
                    neighbour.adjacency.remove(i);
                }
            }
            neighbour.adjacency.push(Link {
                neighbor: r,
                boundary: link.boundary,
                distance: d,
            });
            // a full rescan is only needed when the old nearest neighbour
            // vanished; otherwise the parent either beats it or not (on a tie
            // the old one keeps precedence through its smaller id)
            match old_nn {
                Some((m, md)) if m != p && m != q => {
                    neighbour.nn_index = Some(if d < md {
                        neighbour.adjacency.len() - 1
                    } else {
                        neighbour
                            .adjacency
                            .binary_search_by_key(&m, |l| l.neighbor)
                            .expect("surviving nearest neighbour stays listed")
                    });
                }
                _ => neighbour.refresh_nn(),
            }
            filled.push(Link { distance: d, ..link });
        }
        let parent = &mut self.graph.clusters[r as usize];
        parent.adjacency = filled;
        parent.refresh_nn();

        self.sync(r);
        for i in 0..self.graph.clusters[r as usize].adjacency.len() {
            let n = self.graph.clusters[r as usize].adjacency[i].neighbor;
            self.sync(n);
        }

        self.live -= 1;
        let event = MergeEvent {
            time,
            left: p,
            right: q,
            parent: r,
            distance: cand.distance,
            boundary: consumed,
        };
        self.events.push(event);
        Some(event)
    }

    /// Linear merge of the children's sorted lists, dropping their mutual
    /// link. A neighbour of both children gets one concatenated boundary.
    fn merge_adjacency(&mut self, p: u32, q: u32, r: u32) -> (Vec<Link>, u32) {
        let a = &self.graph.clusters[p as usize].adjacency;
        let b = &self.graph.clusters[q as usize].adjacency;
        let consumed = a
            .iter()
            .find(|l| l.neighbor == q)
            .map(|l| l.boundary)
            .expect("merged clusters are adjacent");
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut shared = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if x.neighbor == y.neighbor => {
                    i += 1;
                    j += 1;
                    shared.push((out.len(), x.boundary, y.boundary));
                    *x
                }
                (Some(x), Some(y)) if x.neighbor < y.neighbor => {
                    i += 1;
                    *x
                }
                (Some(x), None) => {
                    i += 1;
                    *x
                }
                (_, Some(y)) => {
                    j += 1;
                    *y
                }
                (None, None) => unreachable!(),
            };
            if next.neighbor != p && next.neighbor != q {
                out.push(next);
            }
        }
        for (pos, ba, bb) in shared {
            let id = self.concat_boundaries(ba, bb);
            out[pos].boundary = id;
        }
        debug_assert!(out.windows(2).all(|w| w[0].neighbor < w[1].neighbor));
        debug_assert!(out.iter().all(|l| l.neighbor != r));
        (out, consumed)
    }

    fn concat_boundaries(&mut self, a: u32, b: u32) -> u32 {
        let (length, contrast) =
            distance::concat_boundaries(&self.graph.boundaries[a as usize], &self.graph.boundaries[b as usize]);
        let id = self.graph.boundaries.len() as u32;
        self.graph.boundaries.push(Boundary {
            parent: NOT_CONNECTED,
            length,
            contrast,
        });
        self.graph.boundaries[a as usize].parent = id;
        self.graph.boundaries[b as usize].parent = id;
        id
    }

    /// Runs the remaining merges.
    pub fn run(&mut self) {
        while self.step().is_some() {}
    }

    pub fn finish(mut self) -> Result<Hierarchy> {
        self.run();
        if self.live > 1 {
            return Err(Error::Disconnected { components: self.live });
        }
        let root = self
            .graph
            .live_clusters()
            .next()
            .map(|(id, _)| id)
            .expect("one cluster stays alive");
        Ok(Hierarchy {
            graph: self.graph,
            events: self.events,
            root,
        })
    }
}

/// Merges the graph down to a single cluster.
pub fn agglomerate(graph: RegionGraph, cfg: &DistanceConfig) -> Result<Hierarchy> {
    Agglomerator::new(graph, cfg)?.finish()
}
