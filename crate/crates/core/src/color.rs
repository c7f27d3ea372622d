//! Colour conversion and the Lab gradient magnitude that seeds the watershed.
//!
//! The input is converted from 8-bit sRGB to CIE-Lab (D65). Each Lab plane is
//! then differentiated with the 5-tap Farid–Simoncelli filter pair and the
//! magnitude combines a luminance part and a chromaticity part:
//!
//! ```text
//! |∇| = sqrt(Lx² + Ly²) + sqrt(2·(ax² + ay² + bx² + by²))
//! ```

use crate::error::{Error, Result};

/// Smallest width or height accepted by the filters.
pub const MIN_SIDE: usize = 5;

/// Published 5-tap interpolation (prefilter) kernel.
pub const PREFILTER_5: [f64; 5] = [
    0.037_659_317_195_812_6,
    0.249_153_396_177_344,
    0.426_374_573_253_687,
    0.249_153_396_177_344,
    0.037_659_317_195_812_6,
];

/// Published 5-tap first derivative kernel, as printed.
///
/// Its first moment is 0.9918 rather than 1, so [`DERIVATIVE_5`] rescales it
/// to unit gain on linear signals.
pub const DERIVATIVE_5_PUBLISHED: [f64; 5] = [
    0.109_603_762_960_256,
    0.276_690_988_455_550,
    0.0,
    -0.276_690_988_455_550,
    -0.109_603_762_960_256,
];

/// Derivative kernel normalised to unit first moment.
pub const DERIVATIVE_5: [f64; 5] = normalise_derivative(DERIVATIVE_5_PUBLISHED);

const fn normalise_derivative(k: [f64; 5]) -> [f64; 5] {
    // convolution taps act on f(x + 2 - i), so the slope gain is sum k[i]·(2 - i)
    let gain = 2.0 * k[0] + k[1] - k[3] - 2.0 * k[4];
    [k[0] / gain, k[1] / gain, k[2] / gain, k[3] / gain, k[4] / gain]
}

/// 8-bit sRGB image, row-major interleaved RGB.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_side(width, height)?;
        let expected = 3 * width * height;
        if data.len() != expected {
            return Err(Error::BufferSize {
                expected,
                actual: data.len(),
            });
        }
        Ok(RgbImage { width, height, data })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Result<Self> {
        let mut data = Vec::with_capacity(3 * width * height);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        RgbImage::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

/// A single floating point channel in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::BufferSize {
                expected: width * height,
                actual: data.len(),
            });
        }
        Ok(Plane { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Plane {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Plane { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transposed(&self) -> Plane {
        Plane::from_fn(self.height, self.width, |x, y| self.get(y, x))
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }
}

/// CIE-Lab image as three planes of equal size.
#[derive(Debug, Clone, PartialEq)]
pub struct LabImage {
    pub l: Plane,
    pub a: Plane,
    pub b: Plane,
}

impl LabImage {
    pub fn new(l: Plane, a: Plane, b: Plane) -> Result<Self> {
        for other in [&a, &b] {
            if other.width != l.width || other.height != l.height {
                return Err(Error::DimensionMismatch {
                    left_width: l.width,
                    left_height: l.height,
                    right_width: other.width,
                    right_height: other.height,
                });
            }
        }
        Ok(LabImage { l, a, b })
    }

    pub fn width(&self) -> usize {
        self.l.width
    }

    pub fn height(&self) -> usize {
        self.l.height
    }

    #[inline]
    pub fn pixel(&self, index: usize) -> [f64; 3] {
        [self.l.data[index], self.a.data[index], self.b.data[index]]
    }
}

fn check_side(width: usize, height: usize) -> Result<()> {
    if width < MIN_SIDE || height < MIN_SIDE {
        return Err(Error::TooSmall { width, height });
    }
    Ok(())
}

fn srgb_decode(v: u8) -> f64 {
    let c = f64::from(v) / 255.0;
    if c <= 0.040_45 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

// D65 reference white, 2° observer
const WHITE: [f64; 3] = [0.950_47, 1.0, 1.088_83];

fn lab_f(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

/// Converts one sRGB triplet to CIE-Lab.
pub fn srgb_pixel_to_lab(rgb: [u8; 3]) -> [f64; 3] {
    let r = srgb_decode(rgb[0]);
    let g = srgb_decode(rgb[1]);
    let b = srgb_decode(rgb[2]);
    let x = 0.412_453 * r + 0.357_580 * g + 0.180_423 * b;
    let y = 0.212_671 * r + 0.715_160 * g + 0.072_169 * b;
    let z = 0.019_334 * r + 0.119_193 * g + 0.950_227 * b;
    let fx = lab_f(x / WHITE[0]);
    let fy = lab_f(y / WHITE[1]);
    let fz = lab_f(z / WHITE[2]);
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

pub fn srgb_to_lab(img: &RgbImage) -> Result<LabImage> {
    check_side(img.width, img.height)?;
    let n = img.width * img.height;
    let mut l = Vec::with_capacity(n);
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for px in img.data.chunks_exact(3) {
        let lab = srgb_pixel_to_lab([px[0], px[1], px[2]]);
        l.push(lab[0]);
        a.push(lab[1]);
        b.push(lab[2]);
    }
    let (w, h) = (img.width, img.height);
    LabImage::new(Plane::new(w, h, l)?, Plane::new(w, h, a)?, Plane::new(w, h, b)?)
}

/// 1-D convolution along rows (`horizontal`) or columns with edge replication.
fn convolve_axis(src: &Plane, kernel: &[f64; 5], horizontal: bool) -> Plane {
    let (w, h) = (src.width, src.height);
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, &k) in kernel.iter().enumerate() {
                // out(x) = Σ k[i]·f(x + 2 - i)
                let offset = 2 - i as isize;
                let v = if horizontal {
                    let sx = (x as isize + offset).clamp(0, w as isize - 1) as usize;
                    src.data[y * w + sx]
                } else {
                    let sy = (y as isize + offset).clamp(0, h as isize - 1) as usize;
                    src.data[sy * w + x]
                };
                acc += k * v;
            }
            out[y * w + x] = acc;
        }
    }
    Plane {
        width: w,
        height: h,
        data: out,
    }
}

/// Partial derivatives of a plane: derivative kernel along one axis,
/// prefilter along the other, replicated borders.
pub fn derivative_5tap(plane: &Plane) -> Result<(Plane, Plane)> {
    check_side(plane.width, plane.height)?;
    let dx = convolve_axis(&convolve_axis(plane, &PREFILTER_5, false), &DERIVATIVE_5, true);
    let dy = convolve_axis(&convolve_axis(plane, &PREFILTER_5, true), &DERIVATIVE_5, false);
    Ok((dx, dy))
}

pub fn gradient_magnitude(lab: &LabImage) -> Result<Plane> {
    let (lx, ly) = derivative_5tap(&lab.l)?;
    let (ax, ay) = derivative_5tap(&lab.a)?;
    let (bx, by) = derivative_5tap(&lab.b)?;
    let data = (0..lx.data.len())
        .map(|i| {
            let lum = (lx.data[i].powi(2) + ly.data[i].powi(2)).sqrt();
            let chroma = ax.data[i].powi(2) + ay.data[i].powi(2) + bx.data[i].powi(2) + by.data[i].powi(2);
            lum + (2.0 * chroma).sqrt()
        })
        .collect();
    Plane::new(lab.width(), lab.height(), data)
}
