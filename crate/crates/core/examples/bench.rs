//! Median per-stage timings on noise images of growing size.
//!
//! ```text
//! cargo run --release --example bench
//! ```

use radig::cli::bench_image;
use radig::{synth, DistanceConfig, StageTimings};

fn main() -> radig::Result<()> {
    let cfg = DistanceConfig::default();
    for (w, h) in [(135, 90), (270, 180), (481, 321), (540, 360)] {
        let img = synth::noise_image(w, h, 1);
        let (stages, total) = bench_image(&img, &cfg, 5)?;
        let per_px = total.as_secs_f64() * 1e9 / (w * h) as f64;
        println!("{w}x{h}: {:.1} ms total, {per_px:.0} ns/px", total.as_secs_f64() * 1e3);
        for (name, d) in StageTimings::NAMES.iter().zip(stages) {
            println!("  {name:<16} {:>8.2} ms", d.as_secs_f64() * 1e3);
        }
    }
    Ok(())
}
