//! Image, label map, contour map and ground-truth files.
//!
//! Label maps are single-channel PNGs (8 or 16 bit); colour-coded maps are
//! read with each distinct RGB triplet as one label. Contour maps are
//! grayscale PNGs at doubled resolution. Ground truth for an image `stem`
//! is looked up in this order:
//!
//! * `stem.json` — `{"width": W, "height": H, "annotators": [[...], ...]}`
//!   with one row-major label list per annotator;
//! * `stem/` — a directory holding one label PNG per annotator;
//! * `stem.png` — a single annotator.

use std::fs;
use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageBuffer, Luma};
use serde::{Deserialize, Serialize};

use crate::color::{Plane, RgbImage};
use crate::error::{Error, Result};
use crate::eval::GroundTruth;
use crate::hierarchy::{CrackMap, UcmImage};
use crate::labels::LabelMap;

pub fn read_rgb(path: &Path) -> Result<RgbImage> {
    let img = image::open(path).map_err(|e| Error::image(path, e))?.to_rgb8();
    RgbImage::new(img.width() as usize, img.height() as usize, img.into_raw())
}

fn open(path: &Path) -> Result<DynamicImage> {
    image::open(path).map_err(|e| Error::image(path, e))
}

/// Raw label values of a PNG, without renumbering.
fn raw_labels(img: DynamicImage) -> (usize, usize, Vec<u32>) {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let raw = match img {
        DynamicImage::ImageLuma8(b) => b.into_raw().into_iter().map(u32::from).collect(),
        DynamicImage::ImageLuma16(b) => b.into_raw().into_iter().map(u32::from).collect(),
        other => other
            .to_rgb8()
            .pixels()
            .map(|p| u32::from(p[0]) << 16 | u32::from(p[1]) << 8 | u32::from(p[2]))
            .collect(),
    };
    (w, h, raw)
}

/// Reads a label map, renumbering labels in raster order.
pub fn read_labels(path: &Path) -> Result<LabelMap> {
    let (w, h, raw) = raw_labels(open(path)?);
    LabelMap::compacted(w, h, &raw)
}

/// Reads a category map and splits categories into connected instances.
pub fn read_instances(path: &Path) -> Result<LabelMap> {
    let (w, h, raw) = raw_labels(open(path)?);
    Ok(crate::eval::labels_to_instances(w, h, &raw))
}

fn save_gray16(path: &Path, width: usize, height: usize, data: Vec<u16>) -> Result<()> {
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(width as u32, height as u32, data).expect("buffer matches its dimensions");
    buf.save(path).map_err(|e| Error::image(path, e))
}

fn save_gray8(path: &Path, width: usize, height: usize, data: Vec<u8>) -> Result<()> {
    let buf: ImageBuffer<Luma<u8>, Vec<u8>> =
        ImageBuffer::from_raw(width as u32, height as u32, data).expect("buffer matches its dimensions");
    buf.save(path).map_err(|e| Error::image(path, e))
}

/// Writes a 16-bit label PNG.
pub fn write_labels(path: &Path, labels: &LabelMap) -> Result<()> {
    let data = labels
        .labels()
        .iter()
        .map(|&l| u16::try_from(l).map_err(|_| Error::LabelOverflow { label: l }))
        .collect::<Result<Vec<u16>>>()?;
    save_gray16(path, labels.width(), labels.height(), data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

pub fn write_ucm(path: &Path, ucm: &UcmImage, depth: BitDepth) -> Result<()> {
    match depth {
        BitDepth::Eight => save_gray8(path, ucm.width, ucm.height, ucm.to_u8()),
        BitDepth::Sixteen => save_gray16(path, ucm.width, ucm.height, ucm.to_u16()),
    }
}

/// Reads a contour raster, scaling values to `[0, 1]`.
pub fn read_ucm(path: &Path) -> Result<UcmImage> {
    let img = open(path)?;
    let (width, height) = (img.width() as usize, img.height() as usize);
    let data = match img {
        DynamicImage::ImageLuma8(b) => b.into_raw().into_iter().map(|v| f64::from(v) / 255.0).collect(),
        other => other
            .to_luma16()
            .into_raw()
            .into_iter()
            .map(|v| f64::from(v) / 65535.0)
            .collect(),
    };
    Ok(UcmImage { width, height, data })
}

/// Writes a plane scaled by its maximum to 8 bits.
pub fn write_plane(path: &Path, plane: &Plane) -> Result<()> {
    let max = plane.max();
    let scale = if max > 0.0 { 255.0 / max } else { 0.0 };
    let data = plane.data().iter().map(|&v| (v * scale).round() as u8).collect();
    save_gray8(path, plane.width(), plane.height(), data)
}

/// Reads a prediction for an image of `width x height`: a contour raster at
/// doubled resolution, or a flat label map whose boundaries get level 1.
pub fn read_prediction(path: &Path, width: usize, height: usize) -> Result<CrackMap> {
    let img = open(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    if (w, h) == (2 * width + 1, 2 * height + 1) {
        CrackMap::from_render(&read_ucm(path)?)
    } else if (w, h) == (width, height) {
        let (w, h, raw) = raw_labels(img);
        Ok(CrackMap::from_labels(&LabelMap::compacted(w, h, &raw)?, 1.0))
    } else {
        Err(Error::DimensionMismatch {
            left_width: width,
            left_height: height,
            right_width: w,
            right_height: h,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruthFile {
    pub width: usize,
    pub height: usize,
    pub annotators: Vec<Vec<u32>>,
}

impl GroundTruthFile {
    pub fn into_ground_truth(self) -> Result<GroundTruth> {
        let maps = self
            .annotators
            .iter()
            .map(|raw| LabelMap::compacted(self.width, self.height, raw))
            .collect::<Result<Vec<_>>>()?;
        GroundTruth::new(maps)
    }
}

fn png_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("png")))
        .collect();
    files.sort();
    Ok(files)
}

/// Ground truth for `stem` in `dir`, `None` when no candidate file exists.
pub fn load_ground_truth(dir: &Path, stem: &str) -> Result<Option<GroundTruth>> {
    let json = dir.join(format!("{stem}.json"));
    if json.is_file() {
        let text = fs::read_to_string(&json).map_err(|e| Error::io(&json, e))?;
        let file: GroundTruthFile = serde_json::from_str(&text).map_err(|e| Error::Document {
            line: e.line(),
            column: e.column(),
            message: format!("{}: {e}", json.display()),
        })?;
        return file.into_ground_truth().map(Some);
    }
    let sub = dir.join(stem);
    if sub.is_dir() {
        let maps = png_files(&sub)?
            .iter()
            .map(|p| read_labels(p))
            .collect::<Result<Vec<_>>>()?;
        if maps.is_empty() {
            return Ok(None);
        }
        return GroundTruth::new(maps).map(Some);
    }
    let png = dir.join(format!("{stem}.png"));
    if png.is_file() {
        return GroundTruth::new(vec![read_labels(&png)?]).map(Some);
    }
    Ok(None)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_png_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.png");
        let labels = LabelMap::new(3, 2, vec![0, 1, 2, 2, 1, 0]).unwrap();
        write_labels(&path, &labels).unwrap();
        assert_eq!(read_labels(&path).unwrap(), labels);
    }

    #[test]
    fn wide_labels_overflow() {
        let dir = tempfile::tempdir().unwrap();
        let labels = LabelMap::new(70_000, 1, (0..70_000).collect()).unwrap();
        let err = write_labels(&dir.path().join("x.png"), &labels).unwrap_err();
        assert!(matches!(err, Error::LabelOverflow { label: 65_536 }));
    }

    #[test]
    fn ground_truth_lookup_order() {
        let dir = tempfile::tempdir().unwrap();
        assert!(load_ground_truth(dir.path(), "a").unwrap().is_none());
        let labels = LabelMap::new(2, 2, vec![0, 0, 1, 1]).unwrap();
        write_labels(&dir.path().join("a.png"), &labels).unwrap();
        assert_eq!(
            load_ground_truth(dir.path(), "a").unwrap().unwrap().annotators().len(),
            1
        );
        fs::write(
            dir.path().join("a.json"),
            r#"{"width": 2, "height": 2, "annotators": [[5, 5, 7, 7], [1, 2, 1, 2]]}"#,
        )
        .unwrap();
        let gt = load_ground_truth(dir.path(), "a").unwrap().unwrap();
        assert_eq!(gt.annotators().len(), 2);
        assert_eq!(gt.annotators()[0], labels);
    }
}
