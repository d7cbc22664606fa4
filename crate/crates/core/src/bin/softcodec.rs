use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use softcodec::analysis::{
    civ_histogram, civ_histogram_csv, cif_curve_csv, delta_histogram_csv, image_report, location_delta_histogram,
    mean_report, reports_csv,
};
use softcodec::bench::{per_class_matrix, shared_comparison, ClassSplit};
use softcodec::codebook::{Codebook, Weighting};
use softcodec::codec::{decode, encode, natural_bits, pack_frames, unpack_frames, CompressedFrame, FRAME_MAGIC};
use softcodec::datasets::{data_dir, fashion_splits, load_corpus, mnist_binary_splits};
use softcodec::image::{binarize, Corpus, Image, MultiComponentImage};
use softcodec::netpbm::{load_pnm, save_pnm};
use softcodec::train::{train, InterfaceChoice, TrainConfig};
use softcodec::{Error, Result};

#[derive(Parser)]
#[command(name = "softcodec", version, about = "Lossless image coding with trained shape codebooks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a codebook on a corpus.
    Train(TrainArgs),
    /// Compress a PGM/PPM image (or one image of an IDX file).
    Encode(EncodeArgs),
    /// Decompress a frame back to PGM/PPM.
    Decode(DecodeArgs),
    /// Compressibility reports, CIF curve, CIV and location histograms.
    Analyze(AnalyzeArgs),
    /// Compare codebooks and coders over labelled corpora.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Reduce to two levels (pixels >= --threshold become 1). Only 2 or the
    /// input's own depth are accepted.
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long, default_value_t = 128)]
    threshold: u32,
    /// Component of multi-component inputs used for training or analysis.
    #[arg(long, default_value_t = 0)]
    component: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightArg {
    Count,
    CountSize,
}

#[derive(Args)]
struct TrainArgs {
    /// IDX file, PGM/PPM file, or directory of PGM/PPM files.
    corpus: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    /// Layer interface: `auto` or a bit position.
    #[arg(long, default_value = "auto")]
    interface: String,
    #[arg(long, default_value_t = 4)]
    nmax: u8,
    /// Drop multi-pixel shapes seen fewer times than this when the table is full.
    #[arg(long, default_value_t = 2)]
    prune: u64,
    /// Shape table capacity during mining.
    #[arg(long, default_value_t = 4096)]
    capacity: usize,
    #[arg(long, value_enum, default_value_t = WeightArg::CountSize)]
    weight: WeightArg,
    /// Codeword re-estimation rounds from encoder placements.
    #[arg(long, default_value_t = 2)]
    refine: usize,
    /// Keep every refined shape instead of searching a usage floor.
    #[arg(long)]
    no_floor_search: bool,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct EncodeArgs {
    image: PathBuf,
    /// One codebook per component, in component order.
    #[arg(long, required = true)]
    codebook: Vec<PathBuf>,
    /// Image index when the input is an IDX file.
    #[arg(long, default_value_t = 0)]
    index: usize,
    #[command(flatten)]
    input: InputArgs,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct DecodeArgs {
    frame: PathBuf,
    #[arg(long, required = true)]
    codebook: Vec<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Images or corpora; each input is reported as its own class.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
    /// Codebook for location-cost estimates and the location histogram.
    #[arg(long)]
    codebook: Option<PathBuf>,
    /// Per-image compressibility report.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// CIF curve samples.
    #[arg(long)]
    cif: Option<PathBuf>,
    /// Per-class CIV histogram.
    #[arg(long)]
    civ_hist: Option<PathBuf>,
    #[arg(long, default_value_t = 0.25)]
    bin_width: f64,
    /// Histogram of distances between placements (needs --codebook).
    #[arg(long)]
    deltas: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DatasetArg {
    Fashion,
    Mnist,
}

#[derive(Args)]
struct BenchArgs {
    /// Training corpora, one per class.
    #[arg(long = "train")]
    train: Vec<PathBuf>,
    /// Test corpora, paired with --train in order.
    #[arg(long = "test")]
    test: Vec<PathBuf>,
    /// Use a bundled dataset instead of --train/--test.
    #[arg(long, value_enum, conflicts_with_all = ["train", "test"])]
    dataset: Option<DatasetArg>,
    #[arg(long)]
    data_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    n_train: usize,
    #[arg(long, default_value_t = 200)]
    n_test: usize,
    #[command(flatten)]
    input: InputArgs,
    /// One codebook per class; report the cross matrix.
    #[arg(long, conflicts_with = "shared")]
    per_class: bool,
    /// One codebook for all classes; compare against the baselines.
    #[arg(long)]
    shared: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("SOFTCODEC_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("softcodec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

impl InputArgs {
    fn apply(&self, img: Image) -> Result<Image> {
        match self.depth {
            None => Ok(img),
            Some(d) if d == img.depth_levels() => Ok(img),
            Some(2) => binarize(&img, self.threshold),
            Some(d) => Err(Error::Usage(format!(
                "--depth {d} does not match the input depth {}; only 2 (binarize) is a conversion",
                img.depth_levels()
            ))),
        }
    }

    fn corpus(&self, path: &Path) -> Result<Corpus> {
        let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let label = name.split('.').next().unwrap_or_default().to_string();
        Ok(load_corpus(path, self.component)?.map_images(|img| self.apply(img.clone()))?.with_label(label))
    }
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let corpus = a.input.corpus(&a.corpus)?;
    if corpus.is_empty() {
        return Err(Error::Usage(format!("{} holds no images", a.corpus.display())));
    }
    let interface = match a.interface.as_str() {
        "auto" => InterfaceChoice::Auto,
        s => InterfaceChoice::Fixed(
            s.parse().map_err(|_| Error::Usage(format!("--interface expects auto or an integer, got {s}")))?,
        ),
    };
    let cfg = TrainConfig {
        interface,
        n_max: a.nmax,
        prune_below: a.prune,
        keep_top: a.capacity,
        weighting: match a.weight {
            WeightArg::Count => Weighting::Count,
            WeightArg::CountSize => Weighting::CountTimesSize,
        },
        refine_passes: a.refine,
        floor_search: !a.no_floor_search,
        ..TrainConfig::default()
    };
    let report = train(&corpus, &cfg)?;
    let cb = &report.codebook;
    cb.save(&a.output)?;
    println!("images:          {}", corpus.len());
    println!("shapes:          {}", cb.shapes().len());
    println!("detail alphabet: {}", cb.detail_code().len());
    println!("interface:       {}", cb.interface());
    println!("golomb m:        {}", cb.golomb_m());
    println!("training time:   {:.2}s", report.elapsed.as_secs_f64());
    Ok(())
}

fn load_codebooks(paths: &[PathBuf]) -> Result<Vec<Codebook>> {
    paths.iter().map(Codebook::load).collect()
}

fn is_pnm(path: &Path) -> bool {
    fs::read(path).map(|b| b.starts_with(b"P5") || b.starts_with(b"P6")).unwrap_or(false)
}

fn cmd_encode(a: EncodeArgs) -> Result<()> {
    let cbs = load_codebooks(&a.codebook)?;
    let img = if is_pnm(&a.image) {
        let pnm = load_pnm(&a.image)?;
        let labels = pnm.labels().to_vec();
        let comps = pnm.into_components().into_iter().map(|c| a.input.apply(c)).collect::<Result<Vec<_>>>()?;
        MultiComponentImage::new(comps, labels)?
    } else {
        let corpus = load_corpus(&a.image, 0)?;
        let img = corpus
            .images()
            .get(a.index)
            .cloned()
            .ok_or_else(|| Error::Usage(format!("{} has no image {}", a.image.display(), a.index)))?;
        MultiComponentImage::gray(a.input.apply(img)?)
    };
    if img.components().len() != cbs.len() {
        return Err(Error::Usage(format!("{} components but {} codebooks", img.components().len(), cbs.len())));
    }
    let frames = img.components().iter().zip(&cbs).map(|(c, cb)| encode(c, cb)).collect::<Result<Vec<_>>>()?;
    let bytes = if frames.len() == 1 { frames[0].to_bytes() } else { pack_frames(&frames)? };
    fs::write(&a.output, &bytes)?;
    let natural: u64 = img.components().iter().map(natural_bits).sum();
    println!("bytes: {}", bytes.len());
    println!("ratio: {:.4}", natural as f64 / (bytes.len() as f64 * 8.0));
    Ok(())
}

fn cmd_decode(a: DecodeArgs) -> Result<()> {
    let cbs = load_codebooks(&a.codebook)?;
    let data = fs::read(&a.frame)?;
    let frames: Vec<CompressedFrame> =
        if data.starts_with(FRAME_MAGIC) { vec![CompressedFrame::from_bytes(&data)?] } else { unpack_frames(&data)? };
    if frames.len() != cbs.len() {
        return Err(Error::Usage(format!("{} frames but {} codebooks", frames.len(), cbs.len())));
    }
    let comps = frames.iter().zip(&cbs).map(|(f, cb)| decode(f, cb)).collect::<Result<Vec<_>>>()?;
    let labels = match comps.len() {
        1 => vec!["Y".to_string()],
        3 => ["R", "G", "B"].map(String::from).to_vec(),
        n => return Err(Error::Usage(format!("cannot write {n} components as PGM/PPM"))),
    };
    save_pnm(&a.output, &MultiComponentImage::new(comps, labels)?)?;
    Ok(())
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<()> {
    let cb = a.codebook.as_deref().map(Codebook::load).transpose()?;
    let mut classes = Vec::new();
    let mut images = Vec::new();
    for path in &a.inputs {
        let corpus = a.input.corpus(path)?;
        let label = corpus.class_label().unwrap_or_default().to_string();
        let reports = corpus.images().iter().map(|img| image_report(img, cb.as_ref())).collect::<Result<Vec<_>>>()?;
        images.extend(corpus.images().iter().cloned());
        classes.push((label, reports));
    }
    println!("{:>16} {:>7} {:>8} {:>8} {:>8}", "class", "images", "p0", "H(X)", "CIV");
    for (label, reports) in &classes {
        if let Some(m) = mean_report(reports) {
            println!("{label:>16} {:>7} {:>8.4} {:>8.4} {:>8.4}", reports.len(), m.p0, m.entropy_x, m.civ);
        }
    }
    if let Some(p) = &a.csv {
        fs::write(p, reports_csv(&classes))?;
    }
    if let Some(p) = &a.cif {
        fs::write(p, cif_curve_csv())?;
    }
    if let Some(p) = &a.civ_hist {
        if !a.bin_width.is_finite() || a.bin_width <= 0.0 {
            return Err(Error::Usage("--bin-width must be positive".into()));
        }
        let civs: Vec<(String, Vec<f64>)> =
            classes.iter().map(|(l, r)| (l.clone(), r.iter().map(|r| r.civ).collect())).collect();
        fs::write(p, civ_histogram_csv(&civ_histogram(&civs, a.bin_width)))?;
    }
    if let Some(p) = &a.deltas {
        let cb = cb.as_ref().ok_or_else(|| Error::Usage("--deltas needs --codebook".into()))?;
        fs::write(p, delta_histogram_csv(&location_delta_histogram(&images, cb)?))?;
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let classes: Vec<ClassSplit> = match a.dataset {
        Some(DatasetArg::Fashion) => fashion_splits(&a.data_dir.clone().unwrap_or_else(data_dir), a.n_train, a.n_test)?,
        Some(DatasetArg::Mnist) => {
            mnist_binary_splits(&a.data_dir.clone().unwrap_or_else(data_dir), a.n_train, a.n_test)?
        }
        None => {
            if a.train.is_empty() || a.train.len() != a.test.len() {
                return Err(Error::Usage("give --dataset, or matching --train/--test corpora per class".into()));
            }
            a.train
                .iter()
                .zip(&a.test)
                .map(|(tr, te)| {
                    let train = a.input.corpus(tr)?.take(a.n_train);
                    let test = a.input.corpus(te)?.take(a.n_test);
                    let label = train.class_label().unwrap_or_default().to_string();
                    Ok(ClassSplit { label, train, test })
                })
                .collect::<Result<_>>()?
        }
    };
    let cfg = TrainConfig::default();
    if a.per_class {
        let m = per_class_matrix(&classes, &cfg)?;
        print!("{}", m.render());
        println!("diagonal >= column mean in {}/{} columns", m.diagonal_wins(), m.labels.len());
    } else if a.shared {
        print!("{}", shared_comparison(&classes, &cfg)?.render());
    } else {
        return Err(Error::Usage("choose --per-class or --shared".into()));
    }
    Ok(())
}
