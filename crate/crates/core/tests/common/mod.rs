//! Reference implementations shared by the integration tests. Each oracle
//! is deliberately naive: no queues, no bookkeeping, just exhaustive scans.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};

use radig::distance::{self, Ablation, DistanceConfig};
use radig::graph::{Boundary, Cluster, ColorStats, RegionGraph, NOT_CONNECTED};
use radig::hierarchy::UcmLevels;
use radig::{found_graph, gradient_magnitude, srgb_to_lab, synth, watershed, Hierarchy, LabelMap, RgbImage};

/// Founding graph of an image under `cfg`.
pub fn graph_of(img: &RgbImage, cfg: &DistanceConfig) -> RegionGraph {
    let lab = srgb_to_lab(img).unwrap();
    let g = gradient_magnitude(&lab).unwrap();
    let atoms = watershed(&g);
    found_graph(&atoms, &lab, Some(&g), cfg).unwrap()
}

/// The small random corpus: alternating 16x16 / 24x24, a mix of pure noise
/// and noisy colour cells.
pub fn small_corpus(count: usize) -> Vec<RgbImage> {
    (0..count)
        .map(|i| {
            let side = if i % 2 == 0 { 16 } else { 24 };
            let seed = 1000 + i as u64;
            if i % 3 == 0 {
                synth::noise_image(side, side, seed)
            } else {
                synth::blob_image(side, side, 3 + i % 9, 12, seed)
            }
        })
        .collect()
}

/// Cycles through the default configuration and every ablation.
pub fn config_for(i: usize) -> DistanceConfig {
    match i % (Ablation::ALL.len() + 1) {
        0 => DistanceConfig::default(),
        k => DistanceConfig::default().with_ablation(Ablation::ALL[k - 1]),
    }
}

/// Exhaustive greedy merging: at every step scan all live adjacent pairs for
/// the minimum `(D, low id, high id)`. Returns `(left, right, parent, D)`.
pub fn global_min_oracle(graph: &RegionGraph, cfg: &DistanceConfig) -> Vec<(u32, u32, u32, f64)> {
    let mut clusters: Vec<Cluster> = graph.clusters.clone();
    let mut boundaries: Vec<Boundary> = graph.boundaries.clone();
    let mut nbrs: Vec<BTreeMap<u32, u32>> = clusters
        .iter()
        .map(|c| c.adjacency.iter().map(|l| (l.neighbor, l.boundary)).collect())
        .collect();
    let mut alive: Vec<bool> = clusters.iter().map(|c| c.alive).collect();
    let mut events = Vec::new();
    loop {
        let mut best: Option<(f64, u32, u32)> = None;
        for p in 0..clusters.len() {
            if !alive[p] {
                continue;
            }
            for (&q, &b) in &nbrs[p] {
                if (p as u32) < q {
                    let d =
                        distance::cluster_distance(&clusters[p], &clusters[q as usize], &boundaries[b as usize], cfg);
                    let better = match best {
                        None => true,
                        Some((bd, bp, bq)) => d.total_cmp(&bd).then((p as u32, q).cmp(&(bp, bq))).is_lt(),
                    };
                    if better {
                        best = Some((d, p as u32, q));
                    }
                }
            }
        }
        let Some((d, p, q)) = best else { break };
        let r = clusters.len() as u32;
        let (cp, cq) = (&clusters[p as usize], &clusters[q as usize]);
        let mut merged = cp.clone();
        merged.area = cp.area + cq.area;
        merged.stats = cp.stats.merge(cp.area, &cq.stats, cq.area);
        merged.adjacency.clear();
        let np = std::mem::take(&mut nbrs[p as usize]);
        let nq = std::mem::take(&mut nbrs[q as usize]);
        let mut nr: BTreeMap<u32, u32> = BTreeMap::new();
        for (&n, &b) in &np {
            if n == q {
                continue;
            }
            let id = match nq.get(&n) {
                Some(&b2) => {
                    let (length, contrast) =
                        distance::concat_boundaries(&boundaries[b as usize], &boundaries[b2 as usize]);
                    boundaries.push(Boundary {
                        parent: NOT_CONNECTED,
                        length,
                        contrast,
                    });
                    (boundaries.len() - 1) as u32
                }
                None => b,
            };
            nr.insert(n, id);
        }
        for (&n, &b) in &nq {
            if n != p {
                nr.entry(n).or_insert(b);
            }
        }
        for (&n, &b) in &nr {
            let list = &mut nbrs[n as usize];
            list.remove(&p);
            list.remove(&q);
            list.insert(r, b);
        }
        clusters.push(merged);
        nbrs.push(nr);
        alive[p as usize] = false;
        alive[q as usize] = false;
        alive.push(true);
        events.push((p, q, r, d));
    }
    events
}

/// Recomputes every live cluster's nearest neighbour from scratch and
/// returns the reciprocal pairs. Panics if any cached distance or
/// nearest-neighbour bookmark disagrees with the recomputation.
pub fn brute_rnn_pairs(graph: &RegionGraph, cfg: &DistanceConfig) -> Vec<(u32, u32)> {
    let mut nn: HashMap<u32, u32> = HashMap::new();
    for (id, c) in graph.live_clusters() {
        let mut best: Option<(f64, u32)> = None;
        for link in &c.adjacency {
            let other = &graph.clusters[link.neighbor as usize];
            let d = distance::cluster_distance(c, other, &graph.boundaries[link.boundary as usize], cfg);
            assert_eq!(d, link.distance, "stale distance {id}->{}", link.neighbor);
            let back = other.link_to(id).expect("symmetric adjacency");
            assert_eq!((back.boundary, back.distance), (link.boundary, link.distance));
            if best.is_none_or(|(bd, bn)| (d, link.neighbor) < (bd, bn)) {
                best = Some((d, link.neighbor));
            }
        }
        if let Some((_, n)) = best {
            assert_eq!(c.nearest().map(|l| l.neighbor), Some(n), "nn bookmark of {id}");
            nn.insert(id, n);
        } else {
            assert!(c.nn_index.is_none());
        }
    }
    let mut pairs: Vec<(u32, u32)> = nn
        .iter()
        .filter(|(&a, &b)| a < b && nn.get(&b) == Some(&a))
        .map(|(&a, &b)| (a, b))
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Two-pass maximum-likelihood Gaussian fit.
pub fn ml_fit(pixels: &[[f64; 3]]) -> ColorStats {
    let n = pixels.len() as f64;
    let mut mean = [0.0; 3];
    let mut sigma = [0.0; 3];
    for c in 0..3 {
        mean[c] = pixels.iter().map(|p| p[c]).sum::<f64>() / n;
        sigma[c] = (pixels.iter().map(|p| (p[c] - mean[c]).powi(2)).sum::<f64>() / n).sqrt();
    }
    ColorStats { mean, sigma }
}

pub fn rel_close(a: f64, b: f64, rel: f64, scale: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(scale)
}

/// Level of the lowest common ancestor via explicit ancestor sets.
pub fn lca_by_ancestors(h: &Hierarchy, levels: &UcmLevels, a: u32, b: u32) -> f64 {
    let mut ancestors = HashSet::new();
    let mut x = a;
    loop {
        ancestors.insert(x);
        let p = h.graph.clusters[x as usize].parent;
        if p == NOT_CONNECTED {
            break;
        }
        x = p;
    }
    let mut y = b;
    while !ancestors.contains(&y) {
        y = h.graph.clusters[y as usize].parent;
        assert_ne!(y, NOT_CONNECTED, "disjoint trees");
    }
    let atoms = h.atom_count() as u32;
    if y < atoms {
        0.0
    } else {
        levels.level[(y - atoms) as usize]
    }
}

/// Count of 4-adjacent pixel pairs per unordered label pair.
pub fn crack_counts(labels: &LabelMap) -> HashMap<(u32, u32), usize> {
    let mut out = HashMap::new();
    for y in 0..labels.height() {
        for x in 0..labels.width() {
            let a = labels.get(x, y);
            let mut pairs = Vec::new();
            if x + 1 < labels.width() {
                pairs.push(labels.get(x + 1, y));
            }
            if y + 1 < labels.height() {
                pairs.push(labels.get(x, y + 1));
            }
            for b in pairs {
                if a != b {
                    *out.entry((a.min(b), a.max(b))).or_insert(0) += 1;
                }
            }
        }
    }
    out
}

/// Objects-and-parts credits by explicit overlap table over all region
/// pairs.
pub fn fop_bruteforce(pred: &LabelMap, gt: &LabelMap, gamma_object: f64, gamma_part: f64) -> (f64, f64) {
    let ns = pred.region_count();
    let ng = gt.region_count();
    let mut table = vec![vec![0usize; ng]; ns];
    for (&s, &g) in pred.labels().iter().zip(gt.labels()) {
        table[s as usize][g as usize] += 1;
    }
    let size_s: Vec<usize> = table.iter().map(|r| r.iter().sum()).collect();
    let size_g: Vec<usize> = (0..ng).map(|g| table.iter().map(|r| r[g]).sum()).collect();
    let mut cs = vec![0.0f64; ns];
    let mut cg = vec![0.0f64; ng];
    for s in 0..ns {
        for g in 0..ng {
            let n = table[s][g];
            if n == 0 {
                continue;
            }
            let a = n as f64 / size_s[s] as f64;
            let b = n as f64 / size_g[g] as f64;
            let (mut credit_s, mut credit_g) = (0.0, 0.0);
            if a >= gamma_object && b >= gamma_object {
                credit_s = 1.0;
                credit_g = 1.0;
            } else if a >= gamma_object && b >= gamma_part && b < gamma_object {
                credit_s = b;
            } else if b >= gamma_object && a >= gamma_part && a < gamma_object {
                credit_g = a;
            }
            cs[s] = f64::max(cs[s], credit_s);
            cg[g] = f64::max(cg[g], credit_g);
        }
    }
    (cs.iter().sum(), cg.iter().sum())
}

/// Greedy one-to-one matching over every pair, without spatial indexing.
/// Returns the number of matched pairs.
pub fn match_bruteforce(a: &[(u32, u32)], b: &[(u32, u32)], radius: f64) -> usize {
    let mut pairs = Vec::new();
    for (i, p) in a.iter().enumerate() {
        for (j, q) in b.iter().enumerate() {
            let d2 = (f64::from(p.0) - f64::from(q.0)).powi(2) + (f64::from(p.1) - f64::from(q.1)).powi(2);
            if d2 <= radius * radius {
                let key = |v: (u32, u32)| (v.1, v.0);
                let (lo, hi) = if key(*p) <= key(*q) {
                    (key(*p), key(*q))
                } else {
                    (key(*q), key(*p))
                };
                pairs.push((d2 as u64, lo, hi, i, j));
            }
        }
    }
    pairs.sort_by_key(|&(d, lo, hi, _, _)| (d, lo, hi));
    let mut ua = vec![false; a.len()];
    let mut ub = vec![false; b.len()];
    let mut matched = 0;
    for (_, _, _, i, j) in pairs {
        if !ua[i] && !ub[j] {
            ua[i] = true;
            ub[j] = true;
            matched += 1;
        }
    }
    matched
}
