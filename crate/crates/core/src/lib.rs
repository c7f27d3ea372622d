//! Realtime hierarchical image segmentation.
//!
//! An image is oversegmented by a hill-climbing watershed on its CIE-Lab
//! gradient; the resulting atoms are merged greedily under a distance that
//! combines boundary contrast, surface dissimilarity and spatial linkage.
//! The merge tree is exported as threshold segmentations and an ultrametric
//! contour map, and can be scored against ground truth.
//!
//! ```
//! use radig::{segment_image, synth, DistanceConfig};
//!
//! let img = synth::noise_image(32, 24, 7);
//! let seg = segment_image(&img, &DistanceConfig::default()).unwrap();
//! assert_eq!(seg.hierarchy.events.len() + 1, seg.hierarchy.atom_count());
//! ```

pub mod agglomerate;
pub mod cli;
pub mod color;
pub mod distance;
pub mod document;
pub mod error;
pub mod eval;
pub mod graph;
pub mod hierarchy;
pub mod io;
pub mod labels;
pub mod pipeline;
pub mod queue;
pub mod synth;
pub mod watershed;

pub use agglomerate::{agglomerate, Agglomerator, Hierarchy, MergeEvent};
pub use color::{gradient_magnitude, srgb_to_lab, LabImage, Plane, RgbImage};
pub use distance::{Ablation, DistanceConfig};
pub use document::TreeDocument;
pub use error::{Error, Result};
pub use graph::{found_graph, RegionGraph};
pub use hierarchy::{cut, monotonize, ucm, CrackMap, UcmLevels};
pub use labels::LabelMap;
pub use pipeline::{segment_image, Segmentation, StageTimings};
pub use watershed::watershed;
