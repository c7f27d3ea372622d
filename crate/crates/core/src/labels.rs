//! Dense per-pixel region labels.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Per-pixel region ids in `0..region_count`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    region_count: usize,
}

impl LabelMap {
    /// Wraps raw labels. Only checks the buffer length and that labels are
    /// dense; use [`LabelMap::validate`] for the connectivity invariant.
    pub fn new(width: usize, height: usize, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::BufferSize {
                expected: width * height,
                actual: labels.len(),
            });
        }
        if labels.is_empty() {
            return Err(Error::InvalidLabels("empty label map".into()));
        }
        let region_count = labels.iter().copied().max().map_or(0, |m| m as usize + 1);
        let mut seen = vec![false; region_count];
        for &l in &labels {
            seen[l as usize] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidLabels(format!("label {missing} never occurs")));
        }
        Ok(LabelMap {
            width,
            height,
            labels,
            region_count,
        })
    }

    /// Builds a label map from arbitrary ids, renumbering them densely in
    /// raster order of first occurrence.
    pub fn compacted(width: usize, height: usize, raw: &[u32]) -> Result<Self> {
        let mut remap = std::collections::HashMap::new();
        let labels = raw
            .iter()
            .map(|&r| {
                let next = remap.len() as u32;
                *remap.entry(r).or_insert(next)
            })
            .collect();
        LabelMap::new(width, height, labels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn region_count(&self) -> usize {
        self.region_count
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Pixel count per region.
    pub fn areas(&self) -> Vec<u64> {
        let mut areas = vec![0u64; self.region_count];
        for &l in &self.labels {
            areas[l as usize] += 1;
        }
        areas
    }

    /// Checks that every region is a single 4-connected component.
    pub fn validate(&self) -> Result<()> {
        let components = connected_components(self.width, self.height, &self.labels);
        if components.region_count != self.region_count {
            return Err(Error::InvalidLabels(format!(
                "{} labels but {} 4-connected components",
                self.region_count, components.region_count
            )));
        }
        Ok(())
    }

    /// True when both maps induce the same partition of the pixels.
    pub fn same_partition(&self, other: &LabelMap) -> bool {
        if self.width != other.width || self.height != other.height || self.region_count != other.region_count {
            return false;
        }
        let mut forward = vec![u32::MAX; self.region_count];
        for (&a, &b) in self.labels.iter().zip(&other.labels) {
            let slot = &mut forward[a as usize];
            if *slot == u32::MAX {
                *slot = b;
            } else if *slot != b {
                return false;
            }
        }
        // equal region counts plus a well-defined forward map imply a bijection
        true
    }
}

/// Splits the pixels into 4-connected components of equal value, numbered in
/// raster order of each component's first pixel.
pub fn connected_components(width: usize, height: usize, values: &[u32]) -> LabelMap {
    const UNSET: u32 = u32::MAX;
    let mut out = vec![UNSET; values.len()];
    let mut queue = VecDeque::new();
    let mut next = 0u32;
    for start in 0..values.len() {
        if out[start] != UNSET {
            continue;
        }
        let v = values[start];
        out[start] = next;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            let (x, y) = (p % width, p / width);
            let mut visit = |q: usize| {
                if out[q] == UNSET && values[q] == v {
                    out[q] = next;
                    queue.push_back(q);
                }
            };
            if y > 0 {
                visit(p - width);
            }
            if x > 0 {
                visit(p - 1);
            }
            if x + 1 < width {
                visit(p + 1);
            }
            if y + 1 < height {
                visit(p + width);
            }
        }
        next += 1;
    }
    LabelMap {
        width,
        height,
        labels: out,
        region_count: next as usize,
    }
}
