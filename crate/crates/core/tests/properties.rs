//! Structural invariants of the pipeline over random small images and
//! random configurations.

mod common;

use common::*;
use proptest::prelude::*;

use radig::distance::{self, concat_boundaries, w1_gaussian};
use radig::graph::{Boundary, ColorStats, NOT_CONNECTED};
use radig::hierarchy::{cut, MIN_LEVEL};
use radig::{segment_image, srgb_to_lab, synth, RgbImage, Segmentation};

fn image(side_w: usize, side_h: usize, cells: usize, seed: u64, noise_only: bool) -> RgbImage {
    if noise_only {
        synth::noise_image(side_w, side_h, seed)
    } else {
        synth::blob_image(side_w, side_h, cells, 16, seed)
    }
}

fn arb_case() -> impl Strategy<Value = (RgbImage, usize)> {
    (
        6usize..22,
        6usize..22,
        1usize..10,
        any::<u64>(),
        any::<bool>(),
        0usize..7,
    )
        .prop_map(|(w, h, cells, seed, noise, cfg)| (image(w, h, cells, seed, noise), cfg))
}

fn segment(img: &RgbImage, cfg: usize) -> Segmentation {
    segment_image(img, &config_for(cfg)).unwrap()
}

fn arb_stats() -> impl Strategy<Value = ColorStats> {
    (
        prop::array::uniform3(-100.0f64..100.0),
        prop::array::uniform3(0.0f64..40.0),
    )
        .prop_map(|(mean, sigma)| ColorStats { mean, sigma })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn merge_count_and_area_conservation((img, cfg) in arb_case()) {
        let seg = segment(&img, cfg);
        let h = &seg.hierarchy;
        let n = h.atom_count();
        prop_assert_eq!(h.events.len() + 1, n);
        prop_assert_eq!(h.graph.clusters.len(), 2 * n - 1);
        prop_assert_eq!(h.cluster(h.root).area as usize, img.width() * img.height());
        for (t, e) in h.events.iter().enumerate() {
            prop_assert_eq!(e.time as usize, t);
            prop_assert_eq!(e.parent as usize, n + t);
            let (l, r, p) = (h.cluster(e.left), h.cluster(e.right), h.cluster(e.parent));
            prop_assert_eq!(p.area, l.area + r.area);
            prop_assert_eq!((p.left, p.right), (e.left, e.right));
            prop_assert_eq!(l.parent, e.parent);
            prop_assert_eq!(r.parent, e.parent);
        }
    }

    #[test]
    fn every_cluster_but_the_root_has_one_parent((img, cfg) in arb_case()) {
        let seg = segment(&img, cfg);
        let h = &seg.hierarchy;
        let mut child_count = vec![0usize; h.graph.clusters.len()];
        for e in &h.events {
            child_count[e.left as usize] += 1;
            child_count[e.right as usize] += 1;
            prop_assert!(e.left < e.parent && e.right < e.parent);
        }
        for (id, c) in h.graph.clusters.iter().enumerate() {
            if id as u32 == h.root {
                prop_assert_eq!(c.parent, NOT_CONNECTED);
                prop_assert_eq!(child_count[id], 0);
            } else {
                prop_assert_eq!(child_count[id], 1, "cluster {}", id);
            }
            prop_assert_eq!(c.alive, id as u32 == h.root);
        }
    }

    #[test]
    fn levels_are_monotone_and_normalised((img, cfg) in arb_case()) {
        let seg = segment(&img, cfg);
        let h = &seg.hierarchy;
        let n = h.atom_count();
        for (t, e) in h.events.iter().enumerate() {
            let level = seg.levels.level[t];
            prop_assert!((MIN_LEVEL..=1.0).contains(&level));
            for child in [e.left, e.right] {
                if child as usize >= n {
                    prop_assert!(seg.levels.level[child as usize - n] <= level);
                }
            }
        }
        prop_assert!(seg.levels.level.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn cuts_are_nested((img, cfg) in arb_case(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let seg = segment(&img, cfg);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let fine = cut(&seg.hierarchy, &seg.levels, lo);
        let coarse = cut(&seg.hierarchy, &seg.levels, hi);
        prop_assert!(fine.region_count() >= coarse.region_count());
        let mut owner = vec![u32::MAX; fine.region_count()];
        for (&f, &c) in fine.labels().iter().zip(coarse.labels()) {
            let slot = &mut owner[f as usize];
            prop_assert!(*slot == u32::MAX || *slot == c, "fine region {} straddles coarse regions", f);
            *slot = c;
        }
    }

    #[test]
    fn extreme_cuts((img, cfg) in arb_case()) {
        let seg = segment(&img, cfg);
        prop_assert!(cut(&seg.hierarchy, &seg.levels, 0.0).same_partition(&seg.hierarchy.graph.atoms));
        prop_assert_eq!(cut(&seg.hierarchy, &seg.levels, 1.0).region_count(), 1);
    }

    #[test]
    fn cluster_statistics_match_direct_fits((img, cfg) in arb_case()) {
        let seg = segment(&img, cfg);
        let h = &seg.hierarchy;
        let lab = srgb_to_lab(&img).unwrap();
        let mut pixels: Vec<Vec<[f64; 3]>> = vec![Vec::new(); h.graph.clusters.len()];
        for (i, &atom) in h.graph.atoms.labels().iter().enumerate() {
            let mut c = atom;
            while c != NOT_CONNECTED {
                pixels[c as usize].push(lab.pixel(i));
                c = h.cluster(c).parent;
            }
        }
        for (id, px) in pixels.iter().enumerate() {
            let fit = ml_fit(px);
            let got = &h.graph.clusters[id].stats;
            prop_assert_eq!(px.len() as u64, h.graph.clusters[id].area);
            for c in 0..3 {
                prop_assert!(rel_close(got.mean[c], fit.mean[c], 1e-7, 1.0), "cluster {} mean", id);
                prop_assert!(rel_close(got.sigma[c], fit.sigma[c], 1e-7, 1.0), "cluster {} sigma", id);
            }
        }
    }

    #[test]
    fn founding_distances_are_symmetric((img, cfg) in arb_case()) {
        let cfg = config_for(cfg);
        let graph = graph_of(&img, &cfg);
        for (id, c) in graph.live_clusters() {
            for link in &c.adjacency {
                let other = &graph.clusters[link.neighbor as usize];
                let b = &graph.boundaries[link.boundary as usize];
                let back = distance::cluster_distance(other, c, b, &cfg);
                prop_assert_eq!(link.distance, back);
                prop_assert_eq!(other.link_to(id).map(|l| l.boundary), Some(link.boundary));
            }
        }
    }

    #[test]
    fn wasserstein_is_a_metric(p in arb_stats(), q in arb_stats(), r in arb_stats()) {
        prop_assert_eq!(w1_gaussian(&p, &p), 0.0);
        prop_assert!(w1_gaussian(&p, &q) >= 0.0);
        prop_assert_eq!(w1_gaussian(&p, &q), w1_gaussian(&q, &p));
        let slack = w1_gaussian(&p, &q) + w1_gaussian(&q, &r) - w1_gaussian(&p, &r);
        prop_assert!(slack >= -1e-9);
    }

    #[test]
    fn boundary_concatenation_is_associative(
        parts in prop::array::uniform3((0.1f64..50.0, 0.0f64..100.0)),
    ) {
        let [a, b, c] = parts.map(|(length, contrast)| Boundary { parent: NOT_CONNECTED, length, contrast });
        let join = |x: &Boundary, y: &Boundary| {
            let (length, contrast) = concat_boundaries(x, y);
            Boundary { parent: NOT_CONNECTED, length, contrast }
        };
        let left = join(&join(&a, &b), &c);
        let right = join(&a, &join(&b, &c));
        prop_assert!(rel_close(left.length, right.length, 1e-12, 1.0));
        prop_assert!(rel_close(left.contrast, right.contrast, 1e-12, 1.0));
        let swapped = join(&b, &a);
        prop_assert_eq!(join(&a, &b).length, swapped.length);
        prop_assert!(rel_close(join(&a, &b).contrast, swapped.contrast, 1e-15, 1.0));
    }

    #[test]
    fn crack_map_and_cut_agree_at_every_level((img, cfg) in arb_case()) {
        let seg = segment(&img, cfg);
        let map = seg.ucm();
        for t in seg.levels.distinct() {
            prop_assert!(cut(&seg.hierarchy, &seg.levels, t).same_partition(&map.regions(t)));
        }
    }
}
