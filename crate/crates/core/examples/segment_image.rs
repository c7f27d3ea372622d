//! Segments an image (or a synthetic one) and prints the merge schedule
//! summary plus a few flat cuts.
//!
//! ```text
//! cargo run --release --example segment_image -- [photo.png]
//! ```

use radig::hierarchy::cut;
use radig::{io, segment_image, synth, DistanceConfig, StageTimings};

fn main() -> radig::Result<()> {
    let img = match std::env::args().nth(1) {
        Some(path) => io::read_rgb(path.as_ref())?,
        None => synth::blob_image(160, 120, 12, 10, 7),
    };
    let seg = segment_image(&img, &DistanceConfig::default())?;
    let h = &seg.hierarchy;
    println!(
        "{}x{}: {} atoms, {} merges, root {}",
        img.width(),
        img.height(),
        h.atom_count(),
        h.events.len(),
        h.root
    );
    for (name, d) in StageTimings::NAMES.iter().zip(seg.timings.stages()) {
        println!("  {name:<16} {:>8.2} ms", d.as_secs_f64() * 1e3);
    }
    for t in [0.25, 0.5, 0.75, 0.9] {
        println!("  cut at {t:.2}: {} regions", cut(h, &seg.levels, t).region_count());
    }
    Ok(())
}
