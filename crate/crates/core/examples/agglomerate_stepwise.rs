//! Drives the reciprocal-nearest-neighbour agglomeration one merge at a
//! time and watches the candidate queue.

use radig::{found_graph, gradient_magnitude, srgb_to_lab, synth, watershed, Agglomerator, DistanceConfig};

fn main() -> radig::Result<()> {
    let img = synth::blob_image(48, 48, 4, 6, 5);
    let lab = srgb_to_lab(&img)?;
    let g = gradient_magnitude(&lab)?;
    let cfg = DistanceConfig::default();
    let graph = found_graph(&watershed(&g), &lab, Some(&g), &cfg)?;

    let mut agg = Agglomerator::new(graph, &cfg)?;
    println!(
        "{} clusters, {} reciprocal pairs queued",
        agg.live_count(),
        agg.queue_len()
    );
    while let Some(e) = agg.step() {
        if e.time % 25 == 0 || agg.live_count() <= 4 {
            println!(
                "t={:>4}: {:>4} + {:>4} -> {:>4} at D = {:>8.3}; {} live, {} queued",
                e.time,
                e.left,
                e.right,
                e.parent,
                e.distance,
                agg.live_count(),
                agg.queue_len()
            );
        }
    }
    let h = agg.finish()?;
    let root = h.cluster(h.root);
    println!(
        "root {} covers {} px, mean Lab {:.2?}",
        h.root, root.area, root.stats.mean
    );
    Ok(())
}
