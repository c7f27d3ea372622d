//! Runs every distance ablation on the same image and compares the
//! resulting hierarchies.

use radig::hierarchy::cut;
use radig::{segment_image, synth, Ablation, DistanceConfig};

fn main() -> radig::Result<()> {
    let img = synth::blob_image(96, 64, 8, 10, 17);
    let full = DistanceConfig::default();
    let configs = std::iter::once(("full", full.clone()))
        .chain(Ablation::ALL.iter().map(|&a| (a.name(), full.clone().with_ablation(a))));
    println!(
        "{:<22} {:>8} {:>12} {:>12}",
        "configuration", "merges", "levels", "regions@0.5"
    );
    for (name, cfg) in configs {
        let seg = segment_image(&img, &cfg)?;
        println!(
            "{name:<22} {:>8} {:>12} {:>12}",
            seg.hierarchy.events.len(),
            seg.levels.distinct().len(),
            cut(&seg.hierarchy, &seg.levels, 0.5).region_count()
        );
    }
    Ok(())
}
