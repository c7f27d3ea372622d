//! Command-line front end: `segment`, `ucm`, `eval`, `bench` and
//! `instances`.
//!
//! Settings come from flags and an optional TOML file passed with
//! `--config`; a flag always overrides the file. Batch commands spread
//! images over a worker pool sized by `--threads` or `RADIG_THREADS`, each
//! image running its whole pipeline on one worker.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Deserialize;

use crate::color::RgbImage;
use crate::distance::{Ablation, DistanceConfig};
use crate::document::TreeDocument;
use crate::error::{Error, Result};
use crate::eval::{
    fb_curve, fop_curve, ods_ois, threshold_grid, write_curve_csv, write_summary_csv, FopParams, PRPoint,
    DEFAULT_FB_TOLERANCE,
};
use crate::hierarchy::cut;
use crate::io::{self, BitDepth};
use crate::pipeline::{segment_image, StageTimings};
use crate::synth;

#[derive(Debug, Parser)]
#[command(name = "radig", version, about = "Realtime hierarchical image segmentation")]
pub struct Cli {
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads for batch runs (0 = one per core).
    #[arg(long, global = true, env = "RADIG_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment images: tree document, contour map and label maps.
    Segment(SegmentArgs),
    /// Write only the contour map of each image.
    Ucm(UcmArgs),
    /// Score predictions against ground truth.
    Eval(EvalArgs),
    /// Time the pipeline stages.
    Bench(BenchArgs),
    /// Split a category map into connected instances.
    Instances(InstancesArgs),
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    /// Ablation variants to apply (comma separated).
    #[arg(long, value_delimiter = ',', value_parser = parse_ablation)]
    pub ablate: Vec<Ablation>,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(short, long, default_value = ".")]
    pub output: PathBuf,
    /// Levels in [0, 1] at which to write label maps.
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Option<Vec<f64>>,
    #[command(flatten)]
    pub distance: DistanceArgs,
    /// Also write the gradient magnitude and watershed atoms.
    #[arg(long)]
    pub debug_dumps: bool,
}

#[derive(Debug, Args)]
pub struct UcmArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(short, long, default_value = ".")]
    pub output: PathBuf,
    /// PNG bit depth of the contour map.
    #[arg(long, default_value = "16", value_parser = parse_depth)]
    pub depth: BitDepth,
    #[command(flatten)]
    pub distance: DistanceArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Directory of `<stem>_ucm.png` contour maps, or of flat label maps.
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    /// Where to write curves and the summary (defaults to the prediction directory).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub gamma_object: Option<f64>,
    #[arg(long)]
    pub gamma_part: Option<f64>,
    /// Boundary match tolerance as a fraction of the image diagonal.
    #[arg(long)]
    pub fb_tol: Option<f64>,
    /// Explicit thresholds (comma separated).
    #[arg(long, value_delimiter = ',', conflicts_with = "threshold_count")]
    pub thresholds: Option<Vec<f64>>,
    /// Number of evenly spaced thresholds on [0, 1].
    #[arg(long)]
    pub threshold_count: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub inputs: Vec<PathBuf>,
    /// Generated noise images, e.g. `481x321` (comma separated).
    #[arg(long, value_delimiter = ',', value_parser = parse_size)]
    pub noise: Vec<(usize, usize)>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub distance: DistanceArgs,
}

#[derive(Debug, Args)]
pub struct InstancesArgs {
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
}

fn parse_ablation(s: &str) -> std::result::Result<Ablation, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_depth(s: &str) -> std::result::Result<BitDepth, String> {
    match s {
        "8" => Ok(BitDepth::Eight),
        "16" => Ok(BitDepth::Sixteen),
        _ => Err(format!("bit depth must be 8 or 16, got `{s}`")),
    }
}

fn parse_size(s: &str) -> std::result::Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got `{s}`"))?;
    let num = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{s}`: {e}"));
    Ok((num(w)?, num(h)?))
}

/// Contents of the `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub distance: Option<DistanceConfig>,
    pub ablate: Vec<String>,
    pub thresholds: Option<Vec<f64>>,
    pub threshold_count: Option<usize>,
    pub threads: Option<usize>,
    pub reps: Option<usize>,
    pub gamma_object: Option<f64>,
    pub gamma_part: Option<f64>,
    pub fb_tol: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| {
            let (line, column) = e.span().map(|s| line_column(&text, s.start)).unwrap_or((0, 0));
            Error::Document {
                line,
                column,
                message: format!("{}: {}", path.display(), e.message()),
            }
        })
    }

    fn distance(&self, flags: &DistanceArgs) -> Result<DistanceConfig> {
        let mut cfg = self.distance.clone().unwrap_or_default();
        let from_file = self
            .ablate
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<Ablation>>>()?;
        // flags replace the file's ablation list rather than adding to it
        let ablations = if flags.ablate.is_empty() {
            from_file
        } else {
            flags.ablate.clone()
        };
        for a in ablations {
            cfg = cfg.with_ablation(a);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

fn check_thresholds(ts: &[f64]) -> Result<()> {
    if let Some(t) = ts.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::Usage(format!("threshold {t} is outside [0, 1]")));
    }
    Ok(())
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "image".into(), |s| s.to_string_lossy().into_owned())
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Runs `f` on every item in a pool of `threads` workers, keeping the
/// input order of the results.
fn batch<T: Sync, R: Send>(threads: usize, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Result<Vec<R>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

pub fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let threads = cli.threads.or(file.threads).unwrap_or(0);
    match cli.command {
        Command::Segment(args) => segment(args, &file, threads),
        Command::Ucm(args) => ucm(args, &file, threads),
        Command::Eval(args) => eval(args, &file, threads),
        Command::Bench(args) => bench(args, &file),
        Command::Instances(args) => {
            let labels = io::read_instances(&args.input)?;
            io::write_labels(&args.output, &labels)
        }
    }
}

fn segment(args: SegmentArgs, file: &FileConfig, threads: usize) -> Result<()> {
    let cfg = file.distance(&args.distance)?;
    let thresholds = args
        .thresholds
        .clone()
        .or_else(|| file.thresholds.clone())
        .unwrap_or_default();
    check_thresholds(&thresholds)?;
    create_dir(&args.output)?;
    let results = batch(threads, &args.inputs, |input| -> Result<()> {
        let img = io::read_rgb(input)?;
        let seg = segment_image(&img, &cfg)?;
        let name = stem(input);
        let out = |suffix: &str| args.output.join(format!("{name}{suffix}"));
        let doc = TreeDocument::new(&seg.hierarchy, &seg.levels);
        io::write_text(&out(".tree.json"), &doc.to_json())?;
        io::write_ucm(&out("_ucm.png"), &seg.ucm().render(), BitDepth::Sixteen)?;
        for &t in &thresholds {
            io::write_labels(&out(&format!("_t{t:.3}.png")), &cut(&seg.hierarchy, &seg.levels, t))?;
        }
        if args.debug_dumps {
            io::write_plane(&out("_gradient.png"), &seg.gradient)?;
            io::write_labels(&out("_watershed.png"), &seg.hierarchy.graph.atoms)?;
        }
        log::info!(
            "{}: {} atoms in {:.1} ms",
            input.display(),
            seg.hierarchy.atom_count(),
            seg.timings.total().as_secs_f64() * 1e3
        );
        Ok(())
    })?;
    results.into_iter().collect()
}

fn ucm(args: UcmArgs, file: &FileConfig, threads: usize) -> Result<()> {
    let cfg = file.distance(&args.distance)?;
    create_dir(&args.output)?;
    let results = batch(threads, &args.inputs, |input| -> Result<()> {
        let seg = segment_image(&io::read_rgb(input)?, &cfg)?;
        let path = args.output.join(format!("{}_ucm.png", stem(input)));
        io::write_ucm(&path, &seg.ucm().render(), args.depth)
    })?;
    results.into_iter().collect()
}

/// Prediction files keyed by image stem: contour maps when present,
/// otherwise every PNG as a flat label map.
fn predictions(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut pngs: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("png")))
        .collect();
    pngs.sort();
    let ucms: Vec<(String, PathBuf)> = pngs
        .iter()
        .filter_map(|p| stem(p).strip_suffix("_ucm").map(|s| (s.to_string(), p.clone())))
        .collect();
    if !ucms.is_empty() {
        return Ok(ucms);
    }
    Ok(pngs.into_iter().map(|p| (stem(&p), p)).collect())
}

struct ImageScores {
    name: String,
    fop: Vec<PRPoint>,
    fb: Vec<PRPoint>,
}

fn eval(args: EvalArgs, file: &FileConfig, threads: usize) -> Result<()> {
    let params = FopParams {
        gamma_object: args
            .gamma_object
            .or(file.gamma_object)
            .unwrap_or(FopParams::default().gamma_object),
        gamma_part: args
            .gamma_part
            .or(file.gamma_part)
            .unwrap_or(FopParams::default().gamma_part),
    };
    params.validate()?;
    let tol = args.fb_tol.or(file.fb_tol).unwrap_or(DEFAULT_FB_TOLERANCE);
    let thresholds = match (&args.thresholds, args.threshold_count) {
        (Some(ts), _) => ts.clone(),
        (None, Some(n)) => threshold_grid(n),
        (None, None) => file
            .thresholds
            .clone()
            .unwrap_or_else(|| threshold_grid(file.threshold_count.unwrap_or(64))),
    };
    if thresholds.is_empty() {
        return Err(Error::Usage("no thresholds to evaluate".into()));
    }
    check_thresholds(&thresholds)?;

    let preds = predictions(&args.pred)?;
    if preds.is_empty() {
        return Err(Error::Usage(format!("no predictions found in {}", args.pred.display())));
    }
    let scored = batch(threads, &preds, |(name, path)| -> Result<Option<ImageScores>> {
        let Some(gt) = io::load_ground_truth(&args.gt, name)? else {
            log::warn!("{name}: no ground truth, skipped");
            return Ok(None);
        };
        let crack = io::read_prediction(path, gt.width(), gt.height())?;
        Ok(Some(ImageScores {
            name: name.clone(),
            fop: fop_curve(&crack, &gt, &thresholds, &params)?,
            fb: fb_curve(&crack, &gt, &thresholds, tol)?,
        }))
    })?;
    let scored: Vec<ImageScores> = scored
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    if scored.is_empty() {
        return Err(Error::Usage("no prediction had matching ground truth".into()));
    }

    let out = args.output.clone().unwrap_or_else(|| args.pred.clone());
    create_dir(&out)?;
    let csv = |path: PathBuf, curve: &[PRPoint]| -> Result<()> {
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, curve).map_err(|e| Error::io(&path, e))?;
        fs::write(&path, buf).map_err(|e| Error::io(&path, e))
    };
    for s in &scored {
        csv(out.join(format!("{}_fop.csv", s.name)), &s.fop)?;
        csv(out.join(format!("{}_fb.csv", s.name)), &s.fb)?;
    }
    let fop = ods_ois(&scored.iter().map(|s| s.fop.clone()).collect::<Vec<_>>())?;
    let fb = ods_ois(&scored.iter().map(|s| s.fb.clone()).collect::<Vec<_>>())?;
    let rows = [("fop", fop), ("fb", fb)];
    let summary = out.join("summary.csv");
    let mut buf = Vec::new();
    write_summary_csv(&mut buf, &rows).map_err(|e| Error::io(&summary, e))?;
    fs::write(&summary, buf).map_err(|e| Error::io(&summary, e))?;

    let mut text = format!("images: {}\n", scored.len());
    for (name, s) in rows {
        text.push_str(&format!(
            "{name}: ODS F = {:.4} (P = {:.4}, R = {:.4}, t = {:.4}), OIS F = {:.4}\n",
            s.ods.f, s.ods.precision, s.ods.recall, s.ods.threshold, s.ois
        ));
    }
    io::write_text(&out.join("summary.txt"), &text)?;
    print!("{text}");
    Ok(())
}

/// Median of a non-empty sample (mean of the middle pair for even sizes).
pub fn median(mut v: Vec<Duration>) -> Duration {
    v.sort_unstable();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2
    }
}

/// Median stage times of `reps` runs, plus the median total.
pub fn bench_image(img: &RgbImage, cfg: &DistanceConfig, reps: usize) -> Result<([Duration; 4], Duration)> {
    let runs: Vec<StageTimings> = (0..reps)
        .map(|_| segment_image(img, cfg).map(|s| s.timings))
        .collect::<Result<_>>()?;
    let stages = std::array::from_fn(|i| median(runs.iter().map(|r| r.stages()[i]).collect()));
    let total = median(runs.iter().map(StageTimings::total).collect());
    Ok((stages, total))
}

fn bench(args: BenchArgs, file: &FileConfig) -> Result<()> {
    let cfg = file.distance(&args.distance)?;
    let reps = args.reps.or(file.reps).unwrap_or(5);
    if reps == 0 {
        return Err(Error::Usage("--reps must be at least 1".into()));
    }
    let mut images: Vec<(String, RgbImage)> = Vec::new();
    for p in &args.inputs {
        images.push((p.display().to_string(), io::read_rgb(p)?));
    }
    for &(w, h) in &args.noise {
        images.push((format!("noise-{w}x{h}"), synth::noise_image(w, h, args.seed)));
    }
    if images.is_empty() {
        return Err(Error::Usage(
            "nothing to benchmark: give inputs or --noise sizes".into(),
        ));
    }

    let mut csv = String::from("input,width,height,stage,median_ms\n");
    for (name, img) in &images {
        let (stages, total) = bench_image(img, &cfg, reps)?;
        println!("{name} ({}x{}, {reps} reps, median)", img.width(), img.height());
        let rows = StageTimings::NAMES.iter().zip(stages).chain([(&"total", total)]);
        for (stage, d) in rows {
            let ms = d.as_secs_f64() * 1e3;
            println!("  {stage:<16} {ms:>10.3} ms");
            csv.push_str(&format!("{name},{},{},{stage},{ms:.6}\n", img.width(), img.height()));
        }
    }
    if let Some(path) = &args.csv {
        io::write_text(path, &csv)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sizes_and_ablations() {
        assert_eq!(parse_size("481x321"), Ok((481, 321)));
        assert!(parse_size("481").is_err());
        assert_eq!(parse_ablation("wo-wasserstein"), Ok(Ablation::WoWasserstein));
        assert!(parse_ablation("nope").is_err());
    }

    #[test]
    fn median_of_one_is_itself() {
        let d = Duration::from_millis(7);
        assert_eq!(median(vec![d]), d);
        assert_eq!(median(vec![d, 3 * d]), 2 * d);
    }

    #[test]
    fn flags_override_file() {
        let file: FileConfig = toml::from_str("ablate = [\"drop-linkage\"]\n[distance]\nepsilon = 1e-6\n").unwrap();
        let none = DistanceArgs { ablate: vec![] };
        let cfg = file.distance(&none).unwrap();
        assert!(!cfg.linkage);
        assert_eq!(cfg.epsilon, 1e-6);
        let flags = DistanceArgs {
            ablate: vec![Ablation::DropSurface],
        };
        let cfg = file.distance(&flags).unwrap();
        assert!(cfg.linkage && !cfg.surface);
    }

    #[test]
    fn config_errors_carry_positions() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        fs::write(&path, "reps = 3\nbogus = 1\n").unwrap();
        match FileConfig::load(&path) {
            Err(Error::Document { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
