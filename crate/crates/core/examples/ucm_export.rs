//! Writes the ultrametric contour map, a flat cut and the JSON tree
//! document for one image into a directory.
//!
//! ```text
//! cargo run --release --example ucm_export -- out_dir [photo.png]
//! ```

use std::path::PathBuf;

use radig::hierarchy::cut;
use radig::io::{self, BitDepth};
use radig::{segment_image, synth, DistanceConfig, TreeDocument};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "ucm_out".into()));
    let img = match args.next() {
        Some(path) => io::read_rgb(path.as_ref())?,
        None => synth::blob_image(120, 80, 9, 10, 21),
    };
    std::fs::create_dir_all(&out)?;

    let seg = segment_image(&img, &DistanceConfig::default())?;
    let map = seg.ucm();
    io::write_ucm(&out.join("ucm.png"), &map.render(), BitDepth::Sixteen)?;
    io::write_labels(&out.join("cut_0.5.png"), &cut(&seg.hierarchy, &seg.levels, 0.5))?;
    let doc = TreeDocument::new(&seg.hierarchy, &seg.levels);
    io::write_text(&out.join("tree.json"), &doc.to_json())?;

    println!(
        "wrote {} ({} distinct levels, {} boundary points at 0.5)",
        out.display(),
        seg.levels.distinct().len(),
        map.boundary_points(0.5).len()
    );
    Ok(())
}
