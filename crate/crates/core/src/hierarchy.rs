//! Ultrametric levels, threshold cuts and contour maps of a merge tree.
//!
//! Merge distances are turned into non-decreasing levels in `(0, 1]`; a cut
//! at `t` applies every merge whose level is at most `t`. The crack map holds
//! the level at which the two pixels flanking each crack first share a
//! region, so thresholding it and flood-filling reproduces every cut.

use std::collections::{HashMap, VecDeque};

use crate::agglomerate::{Hierarchy, MergeEvent};
use crate::error::{Error, Result};
use crate::graph::NOT_CONNECTED;
use crate::labels::LabelMap;

/// Lowest level after rescaling, so that `t = 0` applies no merge and the
/// first merge still renders as a visible 8-bit contour.
pub const MIN_LEVEL: f64 = 1.0 / 256.0;

#[derive(Debug, Clone, PartialEq)]
pub struct UcmLevels {
    /// Running maximum of the merge distances, before rescaling.
    pub raw: Vec<f64>,
    /// Rescaled levels, non-decreasing, in `[MIN_LEVEL, 1]`.
    pub level: Vec<f64>,
}

impl UcmLevels {
    pub fn len(&self) -> usize {
        self.level.len()
    }

    pub fn is_empty(&self) -> bool {
        self.level.is_empty()
    }

    /// Distinct levels in increasing order.
    pub fn distinct(&self) -> Vec<f64> {
        let mut out = self.level.clone();
        out.dedup();
        out
    }
}

/// Running maximum along the tree (and over time), then an affine map of
/// `[min, max]` onto `[MIN_LEVEL, 1]`. A single merge, or all-equal
/// distances, map to 1.
pub fn monotonize(events: &[MergeEvent]) -> UcmLevels {
    let Some(first) = events.first() else {
        return UcmLevels {
            raw: Vec::new(),
            level: Vec::new(),
        };
    };
    let atoms = first.parent - first.time;
    let mut raw: Vec<f64> = Vec::with_capacity(events.len());
    for e in events {
        let mut v = e.distance;
        for child in [e.left, e.right] {
            if child >= atoms {
                v = v.max(raw[(child - atoms) as usize]);
            }
        }
        if let Some(&prev) = raw.last() {
            v = v.max(prev);
        }
        raw.push(v);
    }
    let (lo, hi) = (raw[0], raw[raw.len() - 1]);
    let level = if hi > lo {
        raw.iter()
            .map(|&v| MIN_LEVEL + (1.0 - MIN_LEVEL) * (v - lo) / (hi - lo))
            .collect()
    } else {
        vec![1.0; raw.len()]
    };
    UcmLevels { raw, level }
}

fn check_levels(h: &Hierarchy, levels: &UcmLevels) {
    assert_eq!(
        h.events.len(),
        levels.len(),
        "levels were computed for a different hierarchy"
    );
}

/// Segmentation with every merge of level `<= t` applied, labels compacted
/// in raster order.
pub fn cut(h: &Hierarchy, levels: &UcmLevels, t: f64) -> LabelMap {
    check_levels(h, levels);
    let atoms = h.atom_count();
    let clusters = &h.graph.clusters;
    // parents carry larger ids, so a descending pass sees them first
    let mut rep = vec![0u32; clusters.len()];
    for id in (0..clusters.len()).rev() {
        let parent = clusters[id].parent;
        rep[id] = if parent != NOT_CONNECTED && levels.level[parent as usize - atoms] <= t {
            rep[parent as usize]
        } else {
            id as u32
        };
    }
    let atom_map = &h.graph.atoms;
    let raw: Vec<u32> = atom_map.labels().iter().map(|&a| rep[a as usize]).collect();
    LabelMap::compacted(atom_map.width(), atom_map.height(), &raw)
        .expect("cut of a valid hierarchy is a valid partition")
}

/// Per-crack levels: vertical cracks sit between `(x, y)` and `(x + 1, y)`,
/// horizontal cracks between `(x, y)` and `(x, y + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrackMap {
    width: usize,
    height: usize,
    vertical: Vec<f64>,
    horizontal: Vec<f64>,
}

impl CrackMap {
    pub fn zeros(width: usize, height: usize) -> Self {
        CrackMap {
            width,
            height,
            vertical: vec![0.0; width.saturating_sub(1) * height],
            horizontal: vec![0.0; width * height.saturating_sub(1)],
        }
    }

    /// Contours of a flat partition: every crack between distinct labels
    /// carries `level`.
    pub fn from_labels(labels: &LabelMap, level: f64) -> Self {
        let (w, h) = (labels.width(), labels.height());
        let mut map = CrackMap::zeros(w, h);
        for y in 0..h {
            for x in 0..w {
                let a = labels.get(x, y);
                if x + 1 < w && labels.get(x + 1, y) != a {
                    map.vertical[y * (w - 1) + x] = level;
                }
                if y + 1 < h && labels.get(x, y + 1) != a {
                    map.horizontal[y * w + x] = level;
                }
            }
        }
        map
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn vertical(&self, x: usize, y: usize) -> f64 {
        self.vertical[y * (self.width - 1) + x]
    }

    pub fn horizontal(&self, x: usize, y: usize) -> f64 {
        self.horizontal[y * self.width + x]
    }

    /// Flood fill across cracks of level `<= t`, labels in raster order.
    pub fn regions(&self, t: f64) -> LabelMap {
        const UNSEEN: u32 = u32::MAX;
        let (w, h) = (self.width, self.height);
        let mut labels = vec![UNSEEN; w * h];
        let mut queue = VecDeque::new();
        let mut next = 0u32;
        for start in 0..w * h {
            if labels[start] != UNSEEN {
                continue;
            }
            labels[start] = next;
            queue.push_back(start);
            while let Some(p) = queue.pop_front() {
                let (x, y) = (p % w, p / w);
                let open = [
                    (y > 0 && self.horizontal(x, y - 1) <= t).then(|| p - w),
                    (x > 0 && self.vertical(x - 1, y) <= t).then(|| p - 1),
                    (x + 1 < w && self.vertical(x, y) <= t).then(|| p + 1),
                    (y + 1 < h && self.horizontal(x, y) <= t).then(|| p + w),
                ];
                for q in open.into_iter().flatten() {
                    if labels[q] == UNSEEN {
                        labels[q] = next;
                        queue.push_back(q);
                    }
                }
            }
            next += 1;
        }
        LabelMap::new(w, h, labels).expect("flood fill yields dense labels")
    }

    /// Cracks with level `> t`, in doubled coordinates (pixel `(x, y)` sits
    /// at `(2x + 1, 2y + 1)`), vertical cracks first, each in raster order.
    pub fn boundary_points(&self, t: f64) -> Vec<(u32, u32)> {
        let (w, h) = (self.width, self.height);
        let mut out = Vec::new();
        for y in 0..h {
            for x in 0..w.saturating_sub(1) {
                if self.vertical(x, y) > t {
                    out.push((2 * x as u32 + 2, 2 * y as u32 + 1));
                }
            }
        }
        for y in 0..h.saturating_sub(1) {
            for x in 0..w {
                if self.horizontal(x, y) > t {
                    out.push((2 * x as u32 + 1, 2 * y as u32 + 2));
                }
            }
        }
        out
    }

    /// Raster at `(2w + 1) x (2h + 1)`: pixel cells are 0, cracks carry their
    /// level, and each junction the maximum of its incident cracks.
    pub fn render(&self) -> UcmImage {
        let (w, h) = (self.width, self.height);
        let (rw, rh) = (2 * w + 1, 2 * h + 1);
        let mut data = vec![0.0; rw * rh];
        for y in 0..h {
            for x in 0..w.saturating_sub(1) {
                data[(2 * y + 1) * rw + 2 * x + 2] = self.vertical(x, y);
            }
        }
        for y in 0..h.saturating_sub(1) {
            for x in 0..w {
                data[(2 * y + 2) * rw + 2 * x + 1] = self.horizontal(x, y);
            }
        }
        for jy in (0..rh).step_by(2) {
            for jx in (0..rw).step_by(2) {
                let mut m: f64 = 0.0;
                if jy > 0 {
                    m = m.max(data[(jy - 1) * rw + jx]);
                }
                if jy + 1 < rh {
                    m = m.max(data[(jy + 1) * rw + jx]);
                }
                if jx > 0 {
                    m = m.max(data[jy * rw + jx - 1]);
                }
                if jx + 1 < rw {
                    m = m.max(data[jy * rw + jx + 1]);
                }
                data[jy * rw + jx] = m;
            }
        }
        UcmImage {
            width: rw,
            height: rh,
            data,
        }
    }

    /// Reads the cracks back out of a rendered raster.
    pub fn from_render(img: &UcmImage) -> Result<Self> {
        if img.width.is_multiple_of(2) || img.height.is_multiple_of(2) || img.width < 3 || img.height < 3 {
            return Err(Error::InvalidLabels(format!(
                "contour raster must have odd sides of at least 3, got {}x{}",
                img.width, img.height
            )));
        }
        let (w, h) = ((img.width - 1) / 2, (img.height - 1) / 2);
        let mut map = CrackMap::zeros(w, h);
        let rw = img.width;
        for y in 0..h {
            for x in 0..w.saturating_sub(1) {
                map.vertical[y * (w - 1) + x] = img.data[(2 * y + 1) * rw + 2 * x + 2];
            }
        }
        for y in 0..h.saturating_sub(1) {
            for x in 0..w {
                map.horizontal[y * w + x] = img.data[(2 * y + 2) * rw + 2 * x + 1];
            }
        }
        Ok(map)
    }
}

/// Doubled-resolution contour raster with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UcmImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl UcmImage {
    pub fn to_u8(&self) -> Vec<u8> {
        self.data
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect()
    }

    pub fn to_u16(&self) -> Vec<u16> {
        self.data
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 65535.0).round() as u16)
            .collect()
    }
}

/// Contour map of a hierarchy: each crack between two atoms carries the
/// level of the merge that joined them, cracks inside an atom carry 0.
pub fn ucm(h: &Hierarchy, levels: &UcmLevels) -> CrackMap {
    check_levels(h, levels);
    let graph = &h.graph;
    let boundaries = &graph.boundaries;
    let mut consumed = vec![u32::MAX; boundaries.len()];
    for (t, e) in h.events.iter().enumerate() {
        consumed[e.boundary as usize] = t as u32;
    }
    // each atomic boundary concatenates upwards until its top is consumed
    let atomic_level: Vec<f64> = (0..graph.atomic_pairs.len())
        .map(|b| {
            let mut top = b;
            while boundaries[top].parent != NOT_CONNECTED {
                top = boundaries[top].parent as usize;
            }
            match consumed[top] {
                u32::MAX => 0.0,
                t => levels.level[t as usize],
            }
        })
        .collect();
    let pair_level: HashMap<[u32; 2], f64> = graph.atomic_pairs.iter().copied().zip(atomic_level).collect();
    let level_between = |a: u32, b: u32| -> f64 {
        if a == b {
            0.0
        } else {
            pair_level[&[a.min(b), a.max(b)]]
        }
    };

    let atoms = &graph.atoms;
    let (w, hgt) = (atoms.width(), atoms.height());
    let mut map = CrackMap::zeros(w, hgt);
    for y in 0..hgt {
        for x in 0..w {
            let a = atoms.get(x, y);
            if x + 1 < w {
                map.vertical[y * (w - 1) + x] = level_between(a, atoms.get(x + 1, y));
            }
            if y + 1 < hgt {
                map.horizontal[y * w + x] = level_between(a, atoms.get(x, y + 1));
            }
        }
    }
    map
}

/// Level of the lowest common ancestor of two clusters; 0 for equal ids.
pub fn lca_level(h: &Hierarchy, levels: &UcmLevels, a: u32, b: u32) -> f64 {
    let atoms = h.atom_count() as u32;
    let clusters = &h.graph.clusters;
    let (mut a, mut b) = (a, b);
    // the parent id always exceeds its children, so lift the smaller side
    while a != b {
        if a < b {
            a = clusters[a as usize].parent;
        } else {
            b = clusters[b as usize].parent;
        }
        if a == NOT_CONNECTED || b == NOT_CONNECTED {
            return f64::INFINITY;
        }
    }
    if a < atoms {
        0.0
    } else {
        levels.level[(a - atoms) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn event(time: u32, left: u32, right: u32, parent: u32, distance: f64) -> MergeEvent {
        MergeEvent {
            time,
            left,
            right,
            parent,
            distance,
            boundary: 0,
        }
    }

    #[test]
    fn increasing_distances_keep_their_order() {
        let events = [event(0, 0, 1, 3, -2.0), event(1, 2, 3, 4, 6.0)];
        let lv = monotonize(&events);
        assert_eq!(lv.raw, vec![-2.0, 6.0]);
        assert_eq!(lv.level, vec![MIN_LEVEL, 1.0]);
    }

    #[test]
    fn running_max_along_the_tree() {
        // four atoms: event 1 merges the parent of event 0
        let events = [event(0, 0, 1, 4, 5.0), event(1, 2, 4, 5, 3.0), event(2, 3, 5, 6, 8.0)];
        assert_eq!(monotonize(&events).raw, vec![5.0, 5.0, 8.0]);
    }

    #[test]
    fn single_merge_is_level_one() {
        assert_eq!(monotonize(&[event(0, 0, 1, 2, -7.5)]).level, vec![1.0]);
        assert!(monotonize(&[]).is_empty());
    }

    #[test]
    fn crack_map_from_labels_and_back() {
        let labels = LabelMap::new(3, 2, vec![0, 0, 1, 2, 2, 1]).unwrap();
        let map = CrackMap::from_labels(&labels, 1.0);
        assert_eq!(map.vertical(1, 0), 1.0);
        assert_eq!(map.vertical(0, 0), 0.0);
        assert_eq!(map.horizontal(0, 0), 1.0);
        assert_eq!(map.horizontal(2, 0), 0.0);
        assert!(map.regions(0.5).same_partition(&labels));
        assert_eq!(map.regions(1.0).region_count(), 1);
        let img = map.render();
        assert_eq!((img.width, img.height), (7, 5));
        // junction between the four pixels (0..1, 0..1)
        assert_eq!(img.data[2 * 7 + 2], 1.0);
        assert_eq!(CrackMap::from_render(&img).unwrap(), map);
    }

    #[test]
    fn boundary_points_use_doubled_coordinates() {
        let labels = LabelMap::new(2, 2, vec![0, 1, 0, 1]).unwrap();
        let map = CrackMap::from_labels(&labels, 0.5);
        assert_eq!(map.boundary_points(0.0), vec![(2, 1), (2, 3)]);
        assert!(map.boundary_points(0.5).is_empty());
    }
}
