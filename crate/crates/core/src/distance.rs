//! The threefold cluster distance.
//!
//! `D(P,Q) = log ω(P,Q) + log δ̄(P,Q) + log η(P,Q)` where
//!
//! * `ω` is Ward's criterion with the mean gap replaced by the 1st Wasserstein
//!   distance between the clusters' colour Gaussians (surface dissimilarity),
//! * `δ̄` is the average contrast stored on the shared boundary,
//! * `η = (A_P·A_Q)^(1/4) / l_PQ` relates both areas to the boundary length
//!   (spatial linkage).
//!
//! Summing logarithms fuses the terms geometrically, so no term needs to be
//! normalised against the others. Every term can be switched off and the
//! appearance metric swapped for the ablation variants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Boundary, Cluster, ColorStats};

/// Log floor; keeps `D` finite for identical clusters.
pub const DEFAULT_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AppearanceMetric {
    /// L1 Wasserstein distance between diagonal Gaussians.
    Wasserstein,
    /// Euclidean distance between means only (classic Ward).
    MeanEuclid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContrastInit {
    /// Appearance distance between the two atoms.
    Appearance,
    /// Mean gradient magnitude over the pixels flanking the boundary.
    GradientMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LengthNorm {
    /// Crack count with diagonal steps shortened towards their L2 length.
    L2Approx,
    /// Plain crack count.
    L1,
}

/// Which terms enter the cluster distance and how they are computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistanceConfig {
    pub surface: bool,
    pub boundary: bool,
    pub linkage: bool,
    pub appearance: AppearanceMetric,
    pub contrast_init: ContrastInit,
    pub length_norm: LengthNorm,
    pub epsilon: f64,
    /// Multipliers for the surface, boundary and linkage logarithms.
    pub weights: [f64; 3],
}

impl Default for DistanceConfig {
    fn default() -> Self {
        DistanceConfig {
            surface: true,
            boundary: true,
            linkage: true,
            appearance: AppearanceMetric::Wasserstein,
            contrast_init: ContrastInit::Appearance,
            length_norm: LengthNorm::L2Approx,
            epsilon: DEFAULT_EPSILON,
            weights: [1.0; 3],
        }
    }
}

/// Named ablation variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ablation {
    GmBoundary,
    L1Boundary,
    WoWasserstein,
    DropSurface,
    DropBoundary,
    DropLinkage,
}

impl Ablation {
    pub const ALL: [Ablation; 6] = [
        Ablation::GmBoundary,
        Ablation::L1Boundary,
        Ablation::WoWasserstein,
        Ablation::DropSurface,
        Ablation::DropBoundary,
        Ablation::DropLinkage,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Ablation::GmBoundary => "gm-boundary",
            Ablation::L1Boundary => "l1-boundary",
            Ablation::WoWasserstein => "wo-wasserstein",
            Ablation::DropSurface => "drop-surface",
            Ablation::DropBoundary => "drop-boundary",
            Ablation::DropLinkage => "drop-linkage",
        }
    }
}

impl std::str::FromStr for Ablation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ablation::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Usage(format!("unknown ablation `{s}`")))
    }
}

impl DistanceConfig {
    pub fn with_ablation(mut self, ablation: Ablation) -> Self {
        match ablation {
            Ablation::GmBoundary => self.contrast_init = ContrastInit::GradientMean,
            Ablation::L1Boundary => self.length_norm = LengthNorm::L1,
            Ablation::WoWasserstein => self.appearance = AppearanceMetric::MeanEuclid,
            Ablation::DropSurface => self.surface = false,
            Ablation::DropBoundary => self.boundary = false,
            Ablation::DropLinkage => self.linkage = false,
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.surface || self.boundary || self.linkage) {
            return Err(Error::InvalidConfig("all distance terms are disabled".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidConfig("term weights must be finite".into()));
        }
        Ok(())
    }

    /// Fuses the three parts into `D`, skipping disabled terms.
    pub fn combine(&self, terms: &DistanceTerms) -> f64 {
        let floor = |v: f64| v.max(self.epsilon).ln();
        let mut d = 0.0;
        if self.surface {
            d += self.weights[0] * floor(terms.surface);
        }
        if self.boundary {
            d += self.weights[1] * floor(terms.contrast);
        }
        if self.linkage {
            d += self.weights[2] * floor(terms.linkage);
        }
        d
    }

    /// Appearance distance between two colour distributions under the
    /// configured metric.
    pub fn appearance_distance(&self, p: &ColorStats, q: &ColorStats) -> f64 {
        match self.appearance {
            AppearanceMetric::Wasserstein => w1_gaussian(p, q),
            AppearanceMetric::MeanEuclid => mean_euclid(p, q),
        }
    }
}

/// The three parts of the distance before fusion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceTerms {
    pub surface: f64,
    pub contrast: f64,
    pub linkage: f64,
}

/// 1st Wasserstein distance between diagonal Gaussians over Lab with the L1
/// ground metric: `‖μ_P − μ_Q‖₁ + |tr √Σ_P − tr √Σ_Q|`.
pub fn w1_gaussian(p: &ColorStats, q: &ColorStats) -> f64 {
    let mean_gap: f64 = p.mean.iter().zip(&q.mean).map(|(a, b)| (a - b).abs()).sum();
    let trace_p: f64 = p.sigma.iter().sum();
    let trace_q: f64 = q.sigma.iter().sum();
    mean_gap + (trace_p - trace_q).abs()
}

fn mean_euclid(p: &ColorStats, q: &ColorStats) -> f64 {
    p.mean
        .iter()
        .zip(&q.mean)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Ward's variance growth, `d² / (1/A_P + 1/A_Q)`, for an appearance gap `d`.
pub fn ward(gap: f64, area_p: u64, area_q: u64) -> f64 {
    gap * gap / (1.0 / area_p as f64 + 1.0 / area_q as f64)
}

/// Surface dissimilarity ω.
pub fn surface_dissimilarity(p: &Cluster, q: &Cluster, cfg: &DistanceConfig) -> f64 {
    ward(cfg.appearance_distance(&p.stats, &q.stats), p.area, q.area)
}

/// Spatial linkage `η = (A_P·A_Q)^(1/4) / l`.
pub fn spatial_linkage(area_p: u64, area_q: u64, length: f64) -> f64 {
    debug_assert!(length > 0.0, "boundary length must be positive");
    (area_p as f64 * area_q as f64).sqrt().sqrt() / length
}

/// Contrast of a new atomic boundary from the two atoms' statistics.
///
/// `gradient_mean` is the mean gradient magnitude over the flanking pixels
/// and is only consulted for [`ContrastInit::GradientMean`].
pub fn init_contrast(p: &ColorStats, q: &ColorStats, gradient_mean: f64, cfg: &DistanceConfig) -> f64 {
    match cfg.contrast_init {
        ContrastInit::Appearance => cfg.appearance_distance(p, q),
        ContrastInit::GradientMean => gradient_mean,
    }
}

/// Length and contrast of two boundaries joined into one: lengths add and
/// contrasts combine as the length-weighted harmonic mean. A zero contrast
/// on either side dominates.
pub fn concat_boundaries(a: &Boundary, b: &Boundary) -> (f64, f64) {
    let length = a.length + b.length;
    let contrast = if a.contrast <= 0.0 || b.contrast <= 0.0 {
        0.0
    } else {
        length / (a.length / a.contrast + b.length / b.contrast)
    };
    (length, contrast)
}

pub fn distance_terms(p: &Cluster, q: &Cluster, b: &Boundary, cfg: &DistanceConfig) -> DistanceTerms {
    DistanceTerms {
        surface: surface_dissimilarity(p, q, cfg),
        contrast: b.contrast,
        linkage: spatial_linkage(p.area, q.area, b.length),
    }
}

/// `D(P,Q)` for two adjacent clusters and their shared boundary.
pub fn cluster_distance(p: &Cluster, q: &Cluster, b: &Boundary, cfg: &DistanceConfig) -> f64 {
    cfg.combine(&distance_terms(p, q, b, cfg))
}
