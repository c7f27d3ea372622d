//! Colour gradient and watershed oversegmentation of a noisy mosaic.

use radig::{gradient_magnitude, srgb_to_lab, synth, watershed};

fn main() -> radig::Result<()> {
    let img = synth::blob_image(96, 64, 6, 8, 3);
    let lab = srgb_to_lab(&img)?;
    let g = gradient_magnitude(&lab)?;
    let atoms = watershed(&g);

    let areas = atoms.areas();
    let largest = areas.iter().max().copied().unwrap_or(0);
    println!("gradient range [0, {:.2}]", g.max());
    println!(
        "{} atoms, mean area {:.1} px, largest {largest} px",
        atoms.region_count(),
        (img.width() * img.height()) as f64 / atoms.region_count() as f64
    );
    // a coarse text rendering of atom labels, one character per 4x4 block
    for y in (0..atoms.height()).step_by(4) {
        let row: String = (0..atoms.width())
            .step_by(4)
            .map(|x| char::from(b'a' + (atoms.get(x, y) % 26) as u8))
            .collect();
        println!("{row}");
    }
    Ok(())
}
