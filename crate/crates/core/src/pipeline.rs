//! The full image-to-hierarchy pipeline with per-stage timing.

use std::time::{Duration, Instant};

use crate::agglomerate::{agglomerate, Hierarchy};
use crate::color::{gradient_magnitude, srgb_to_lab, Plane, RgbImage};
use crate::distance::DistanceConfig;
use crate::error::Result;
use crate::graph::found_graph;
use crate::hierarchy::{monotonize, ucm, CrackMap, UcmLevels};
use crate::watershed::watershed;

/// Wall time per pipeline stage.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub colorspace: Duration,
    /// Gradient magnitude plus the watershed transform.
    pub watershed: Duration,
    pub founding: Duration,
    pub clustering: Duration,
}

impl StageTimings {
    pub const NAMES: [&'static str; 4] = ["colorspace", "watershed", "founding tree", "agg. clustering"];

    pub fn stages(&self) -> [Duration; 4] {
        [self.colorspace, self.watershed, self.founding, self.clustering]
    }

    pub fn total(&self) -> Duration {
        self.stages().iter().sum()
    }
}

#[derive(Debug, Clone)]
pub struct Segmentation {
    pub gradient: Plane,
    pub hierarchy: Hierarchy,
    pub levels: UcmLevels,
    pub timings: StageTimings,
}

impl Segmentation {
    pub fn ucm(&self) -> CrackMap {
        ucm(&self.hierarchy, &self.levels)
    }
}

/// Colour conversion, gradient, watershed, graph founding and
/// agglomeration of one image.
pub fn segment_image(img: &RgbImage, cfg: &DistanceConfig) -> Result<Segmentation> {
    cfg.validate()?;
    let mut timings = StageTimings::default();

    let start = Instant::now();
    let lab = srgb_to_lab(img)?;
    timings.colorspace = start.elapsed();

    let start = Instant::now();
    let gradient = gradient_magnitude(&lab)?;
    let atoms = watershed(&gradient);
    timings.watershed = start.elapsed();

    let start = Instant::now();
    let graph = found_graph(&atoms, &lab, Some(&gradient), cfg)?;
    timings.founding = start.elapsed();

    let start = Instant::now();
    let hierarchy = agglomerate(graph, cfg)?;
    timings.clustering = start.elapsed();

    log::debug!(
        "{}x{}: {} atoms, {:?} total",
        img.width(),
        img.height(),
        hierarchy.atom_count(),
        timings.total()
    );
    let levels = monotonize(&hierarchy.events);
    Ok(Segmentation {
        gradient,
        hierarchy,
        levels,
        timings,
    })
}
