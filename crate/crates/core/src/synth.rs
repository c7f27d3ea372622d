//! Seeded synthetic test images.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::color::RgbImage;

/// Uniform per-channel noise; the worst case for the watershed, which then
/// produces close to the maximum number of atoms.
pub fn noise_image(width: usize, height: usize, seed: u64) -> RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..width * height * 3).map(|_| rng.gen()).collect();
    RgbImage::new(width, height, data).expect("generated buffer matches its size")
}

/// Voronoi cells of random colours with additive noise of amplitude
/// `noise`: a piecewise-smooth image with a known coarse structure.
pub fn blob_image(width: usize, height: usize, cells: usize, noise: u8, seed: u64) -> RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sites: Vec<(f64, f64, [u8; 3])> = (0..cells.max(1))
        .map(|_| {
            (
                rng.gen_range(0.0..width as f64),
                rng.gen_range(0.0..height as f64),
                rng.gen(),
            )
        })
        .collect();
    RgbImage::from_fn(width, height, |x, y| {
        let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
        let nearest = sites
            .iter()
            .min_by(|a, b| {
                let da = (a.0 - px).powi(2) + (a.1 - py).powi(2);
                let db = (b.0 - px).powi(2) + (b.1 - py).powi(2);
                da.total_cmp(&db)
            })
            .expect("at least one site");
        let mut c = nearest.2;
        if noise > 0 {
            for v in &mut c {
                let jitter = rng.gen_range(-i16::from(noise)..=i16::from(noise));
                *v = (i16::from(*v) + jitter).clamp(0, 255) as u8;
            }
        }
        c
    })
    .expect("generated image has a valid size")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_reproducible() {
        assert_eq!(noise_image(8, 6, 3), noise_image(8, 6, 3));
        assert_ne!(noise_image(8, 6, 3), noise_image(8, 6, 4));
        assert_eq!(blob_image(10, 10, 3, 5, 1), blob_image(10, 10, 3, 5, 1));
    }
}
