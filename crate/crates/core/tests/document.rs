//! Tree documents: exact round trips, a hand-checked three-atom tree and
//! deterministic contour rendering.

use radig::hierarchy::monotonize;
use radig::{
    agglomerate, found_graph, gradient_magnitude, segment_image, synth, DistanceConfig, LabImage, LabelMap, Plane,
    TreeDocument,
};

/// Three vertical stripes; the two right stripes are nearly the same colour.
fn three_stripes() -> (LabelMap, LabImage) {
    let (w, h) = (9, 6);
    let labels = LabelMap::new(w, h, (0..w * h).map(|i| (i % w / 3) as u32).collect()).unwrap();
    let lightness = [20.0, 60.0, 62.0];
    let l = Plane::from_fn(w, h, |x, _| lightness[x / 3]);
    let lab = LabImage::new(l, Plane::filled(w, h, 5.0), Plane::filled(w, h, -5.0)).unwrap();
    (labels, lab)
}

#[test]
fn three_atom_document() {
    let (atoms, lab) = three_stripes();
    let cfg = DistanceConfig::default();
    let g = gradient_magnitude(&lab).unwrap();
    let h = agglomerate(found_graph(&atoms, &lab, Some(&g), &cfg).unwrap(), &cfg).unwrap();
    let levels = monotonize(&h.events);
    let doc = TreeDocument::new(&h, &levels);

    assert_eq!((doc.width, doc.height, doc.atom_count, doc.root), (9, 6, 3, 4));
    let merges: Vec<(u32, u32, u32)> = doc.events.iter().map(|e| (e.left, e.right, e.parent)).collect();
    assert_eq!(merges, [(1, 2, 3), (0, 3, 4)]);
    assert_eq!(doc.events.last().unwrap().level, 1.0);
    assert!(doc.events[0].level <= doc.events[1].level);

    let parents: Vec<Option<u32>> = doc.clusters.iter().map(|c| c.parent).collect();
    assert_eq!(parents, [Some(4), Some(3), Some(3), Some(4), None]);
    let areas: Vec<u64> = doc.clusters.iter().map(|c| c.area).collect();
    assert_eq!(areas, [18, 18, 18, 36, 54]);
    assert_eq!(doc.clusters[3].children, Some([1, 2]));
    assert!(doc.clusters[..3]
        .iter()
        .all(|c| c.children.is_none() && c.sigma == [0.0; 3]));
    // the merged stripes: mean 61, standard deviation 1 in lightness
    assert!((doc.clusters[3].mean[0] - 61.0).abs() < 1e-12);
    assert!((doc.clusters[3].sigma[0] - 1.0).abs() < 1e-12);
    let root_mean = (20.0 + 60.0 + 62.0) / 3.0;
    assert!((doc.clusters[4].mean[0] - root_mean).abs() < 1e-12);
}

#[test]
fn round_trip_is_byte_identical() {
    for seed in 0..6 {
        let img = if seed % 2 == 0 {
            synth::noise_image(20, 14, seed)
        } else {
            synth::blob_image(30, 22, 5, 12, seed)
        };
        let seg = segment_image(&img, &DistanceConfig::default()).unwrap();
        let text = TreeDocument::new(&seg.hierarchy, &seg.levels).to_json();
        let parsed = TreeDocument::parse(&text).unwrap();
        assert_eq!(parsed.to_json(), text, "seed {seed}");
        assert_eq!(parsed, TreeDocument::new(&seg.hierarchy, &seg.levels));
    }
}

#[test]
fn malformed_documents_are_rejected_with_a_position() {
    let seg = segment_image(&synth::noise_image(8, 8, 1), &DistanceConfig::default()).unwrap();
    let text = TreeDocument::new(&seg.hierarchy, &seg.levels).to_json();

    let truncated = &text[..text.len() / 2];
    let err = TreeDocument::parse(truncated).unwrap_err();
    assert!(matches!(err, radig::Error::Document { line, .. } if line > 1), "{err}");

    let extra = text.replacen("\"width\"", "\"colour\": 1,\n  \"width\"", 1);
    let err = TreeDocument::parse(&extra).unwrap_err().to_string();
    assert!(err.contains("colour") && err.contains("line 2"), "{err}");

    let missing = text.replacen("\"root\"", "\"rot\"", 1);
    assert!(TreeDocument::parse(&missing).is_err());
}

#[test]
fn rendering_is_deterministic() {
    let img = synth::blob_image(33, 21, 6, 15, 4);
    let cfg = DistanceConfig::default();
    let a = segment_image(&img, &cfg).unwrap().ucm().render();
    let b = segment_image(&img, &cfg).unwrap().ucm().render();
    assert_eq!((a.width, a.height), (2 * 33 + 1, 2 * 21 + 1));
    assert_eq!(a.to_u16(), b.to_u16());
    assert_eq!(a.data, b.data);
}
