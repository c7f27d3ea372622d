//! Builds the founding region adjacency graph over watershed atoms and
//! inspects atoms, boundaries and initial distances.

use radig::distance::distance_terms;
use radig::{found_graph, gradient_magnitude, srgb_to_lab, synth, watershed, DistanceConfig};

fn main() -> radig::Result<()> {
    let img = synth::blob_image(64, 48, 5, 6, 11);
    let lab = srgb_to_lab(&img)?;
    let g = gradient_magnitude(&lab)?;
    let atoms = watershed(&g);
    let cfg = DistanceConfig::default();
    let graph = found_graph(&atoms, &lab, Some(&g), &cfg)?;

    println!(
        "{} atoms, {} boundaries, mean degree {:.2}",
        graph.atom_count,
        graph.boundaries.len(),
        graph.mean_degree()
    );
    for (id, c) in graph.live_clusters().take(5) {
        let nn = c.nearest().expect("connected atom");
        let other = &graph.clusters[nn.neighbor as usize];
        let terms = distance_terms(c, other, &graph.boundaries[nn.boundary as usize], &cfg);
        println!(
            "atom {id:>3}: area {:>4}, L* {:>6.2}, {} neighbours, nearest {} at D = {:.3} \
             (surface {:.3e}, contrast {:.3}, linkage {:.3})",
            c.area,
            c.stats.mean[0],
            c.adjacency.len(),
            nn.neighbor,
            nn.distance,
            terms.surface,
            terms.contrast,
            terms.linkage
        );
    }
    Ok(())
}
