//! Hill-climbing watershed on a gradient magnitude.
//!
//! Every pixel gets an arrow to the neighbour it drains into; labels are
//! propagated from the regional minima back along the arrows. 4-connectivity
//! throughout, and every tie goes to the neighbour earliest in raster order
//! (up, left, right, down).

use std::collections::VecDeque;

use crate::color::Plane;
use crate::labels::LabelMap;

const NONE: u32 = u32::MAX;

#[inline]
fn neighbours(p: usize, width: usize, height: usize) -> impl Iterator<Item = usize> {
    let (x, y) = (p % width, p / width);
    [
        (y > 0).then(|| p - width),
        (x > 0).then(|| p - 1),
        (x + 1 < width).then(|| p + 1),
        (y + 1 < height).then(|| p + width),
    ]
    .into_iter()
    .flatten()
}

/// Steepest strictly-lower neighbour, first in raster order among equals.
#[inline]
fn steepest_lower(g: &[f64], p: usize, width: usize, height: usize) -> Option<usize> {
    let mut best: Option<usize> = None;
    for q in neighbours(p, width, height) {
        if g[q] < g[p] && best.is_none_or(|b| g[q] < g[b]) {
            best = Some(q);
        }
    }
    best
}

/// Oversegments the image into catchment basins of `g`.
///
/// Each regional minimum plateau becomes one region, numbered in raster
/// order of the plateau's first pixel. Pixels on descending plateaus drain
/// towards the plateau's lower border by breadth-first (geodesic) distance.
/// Runs in time linear in the pixel count.
pub fn watershed(g: &Plane) -> LabelMap {
    let (w, h) = (g.width(), g.height());
    let values = g.data();
    let n = values.len();

    // downstream[p] is the pixel p drains into; NONE marks minimum plateaus
    let mut downstream = vec![NONE; n];
    let mut label = vec![NONE; n];
    let mut plateau_id = vec![NONE; n];
    let mut members = Vec::new();
    let mut queue = VecDeque::new();
    let mut seeds = 0u32;

    for start in 0..n {
        if plateau_id[start] != NONE {
            continue;
        }
        // isolated pixel with a lower neighbour: the common case, no plateau work
        let v = values[start];
        let flat = neighbours(start, w, h).any(|q| values[q] == v);
        if !flat {
            plateau_id[start] = start as u32;
            match steepest_lower(values, start, w, h) {
                Some(q) => downstream[start] = q as u32,
                None => {
                    label[start] = seeds;
                    seeds += 1;
                }
            }
            continue;
        }

        // collect the plateau
        members.clear();
        plateau_id[start] = start as u32;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            members.push(p);
            for q in neighbours(p, w, h) {
                if plateau_id[q] == NONE && values[q] == v {
                    plateau_id[q] = start as u32;
                    queue.push_back(q);
                }
            }
        }
        members.sort_unstable();

        // exits are plateau pixels with a strictly lower neighbour
        for &p in &members {
            if let Some(q) = steepest_lower(values, p, w, h) {
                downstream[p] = q as u32;
                queue.push_back(p);
            }
        }

        if queue.is_empty() {
            for &p in &members {
                label[p] = seeds;
            }
            seeds += 1;
            continue;
        }

        // geodesic propagation inwards from the exits
        while let Some(p) = queue.pop_front() {
            for q in neighbours(p, w, h) {
                if values[q] == v && downstream[q] == NONE {
                    downstream[q] = p as u32;
                    queue.push_back(q);
                }
            }
        }
    }

    // resolve labels by following arrows down to a labelled pixel
    let mut path = Vec::new();
    for start in 0..n {
        let mut p = start;
        while label[p] == NONE {
            path.push(p);
            p = downstream[p] as usize;
        }
        let l = label[p];
        for q in path.drain(..) {
            label[q] = l;
        }
    }

    LabelMap::new(w, h, label).expect("every seed labels at least its own plateau")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_one_region() {
        let labels = watershed(&Plane::filled(6, 5, 2.5));
        assert_eq!(labels.region_count(), 1);
    }

    #[test]
    fn single_valley_column() {
        let g = Plane::from_fn(9, 9, |x, _| (x as f64 - 4.0).abs());
        let labels = watershed(&g);
        assert_eq!(labels.region_count(), 1);
    }

    #[test]
    fn isolated_minima_are_numbered_in_raster_order() {
        // distance to the nearer of two pits
        let g = Plane::from_fn(5, 5, |x, y| {
            let d = |px: usize, py: usize| x.abs_diff(px) + y.abs_diff(py);
            d(3, 1).min(d(1, 3)) as f64
        });
        let labels = watershed(&g);
        assert_eq!(labels.region_count(), 2);
        assert_eq!(labels.get(3, 1), 0);
        assert_eq!(labels.get(1, 3), 1);
        labels.validate().unwrap();
    }

    #[test]
    fn descending_plateau_drains_by_distance() {
        // a flat shelf at height 1 between two pits; the shelf splits at its middle
        let row = [0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0];
        let g = Plane::from_fn(8, 5, |x, _| row[x]);
        let labels = watershed(&g);
        assert_eq!(labels.region_count(), 2);
        for y in 0..5 {
            for x in 0..4 {
                assert_eq!(labels.get(x, y), 0);
                assert_eq!(labels.get(x + 4, y), 1);
            }
        }
    }
}
