//! Scores a hierarchy against a synthetic ground truth with the
//! objects-and-parts and boundary measures.

use radig::eval::{self, FopParams, GroundTruth, HierarchyCut};
use radig::{segment_image, synth, DistanceConfig, LabelMap};

fn main() -> radig::Result<()> {
    let (w, h) = (96, 72);
    let clean = synth::blob_image(w, h, 7, 0, 9);
    let noisy = synth::blob_image(w, h, 7, 14, 9);

    // the noiseless mosaic's colours define the true regions
    let colours: Vec<u32> = clean
        .data()
        .chunks(3)
        .map(|p| u32::from(p[0]) << 16 | u32::from(p[1]) << 8 | u32::from(p[2]))
        .collect();
    let truth: LabelMap = eval::labels_to_instances(w, h, &colours);
    let gt = GroundTruth::new(vec![truth])?;

    let seg = segment_image(&noisy, &DistanceConfig::default())?;
    let thresholds = eval::threshold_grid(21);
    let pred = HierarchyCut {
        hierarchy: &seg.hierarchy,
        levels: &seg.levels,
    };
    let fop = eval::fop_curve(&pred, &gt, &thresholds, &FopParams::default())?;
    let fb = eval::fb_curve(&seg.ucm(), &gt, &thresholds, eval::DEFAULT_FB_TOLERANCE)?;

    println!("{:>6} {:>8} {:>8}", "t", "F_op", "F_b");
    for (a, b) in fop.iter().zip(&fb) {
        println!("{:>6.2} {:>8.3} {:>8.3}", a.threshold, a.f, b.f);
    }
    for (name, curve) in [("F_op", fop), ("F_b", fb)] {
        let s = eval::ods_ois(&[curve])?;
        println!(
            "{name}: ODS {:.3} at t = {:.2}, OIS {:.3}",
            s.ods.f, s.ods.threshold, s.ois
        );
    }
    Ok(())
}
