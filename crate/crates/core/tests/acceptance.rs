//! Acceptance run over the bundled datasets. Prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.

mod common;

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use softcodec::baselines::train_pixel_code;
use softcodec::bench::{compare_methods, cross_matrix, spearman, total_bits, train_per_class, ClassSplit};
use softcodec::codebook::Codebook;
use softcodec::datasets::{data_dir, fashion_splits, mnist_binary_splits};
use softcodec::netpbm::save_pnm;
use softcodec::train::{train, InterfaceChoice, TrainConfig};
use softcodec::{Corpus, MultiComponentImage};

const FUZZ_IMAGES: usize = 1000;
const THEORY_INSTANCES: usize = 10_000;
const MNIST_TEST_PER_CLASS: usize = 500;
const FASHION_TRAIN: usize = 1000;
const FASHION_TEST: usize = 200;
const MIN_SPEARMAN: f64 = 0.7;
const REFERENCE_DIAGONAL: [f64; 10] = [1.72, 2.52, 1.58, 2.10, 1.58, 2.29, 1.55, 2.35, 1.68, 1.79];
const DIAGONAL_TOLERANCE: f64 = 0.20;
const MIN_DIAGONAL_WINS: usize = 8;
const MIN_HUFFMAN_WINS: usize = 7;
const MIN_GOLOMB_WINS: usize = 9;
const CROSS_SAMPLE: [usize; 3] = [0, 4, 8];
const LOSSLESS_BUDGET: Duration = Duration::from_secs(5 * 60);
const THEORY_BUDGET: Duration = Duration::from_secs(10);
const TABLES_BUDGET: Duration = Duration::from_secs(30 * 60);

struct Outcome {
    id: u8,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn report(results: &mut Vec<Outcome>, id: u8, name: &'static str, start: Instant, result: Result<String, String>) {
    let elapsed = start.elapsed();
    let (pass, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    println!("criterion {id} {name}: {} ({detail}) [{elapsed:.1?}]", if pass { "PASS" } else { "FAIL" });
    results.push(Outcome { id, name, pass, detail, elapsed });
}

fn check(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() -> ExitCode {
    let dir = data_dir();
    let mut results = Vec::new();
    let cfg = TrainConfig::default();

    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let theory = common::theory_suite(&mut rng, THEORY_INSTANCES)
        .map(|()| format!("{THEORY_INSTANCES} instances per statement at tolerance {:e}", common::THEORY_TOLERANCE))
        .and_then(|d| check(t.elapsed() <= THEORY_BUDGET, d));
    report(&mut results, 2, "theory suite", t, theory);

    let t = Instant::now();
    let coders = common::coder_oracles(&mut ChaCha8Rng::seed_from_u64(3));
    report(&mut results, 3, "coder oracles", t, coders);

    let tables_start = Instant::now();
    let t = Instant::now();
    let mnist = mnist_binary_splits(&dir, usize::MAX, MNIST_TEST_PER_CLASS);
    let mnist_cb = mnist.as_ref().ok().map(|s| shared_codebook(s, &cfg));
    let binary_trend = match (&mnist, &mnist_cb) {
        (Ok(splits), Some(Ok(cb))) => criterion_binary_trend(splits, cb),
        (Err(e), _) | (_, Some(Err(e))) => Err(e.to_string()),
        _ => unreachable!(),
    };
    report(&mut results, 4, "binary CIV/ratio trend", t, binary_trend);

    let t = Instant::now();
    let fashion = fashion_splits(&dir, FASHION_TRAIN, FASHION_TEST);
    let per_class = fashion.as_ref().map_err(|e| e.to_string()).and_then(|s| train_per_class(s, &cfg).map_err(|e| e.to_string()));
    let cross_class = match (&fashion, &per_class) {
        (Ok(splits), Ok(cbs)) => criterion_cross_class(splits, cbs),
        (_, Err(e)) => Err(e.clone()),
        (Err(e), _) => Err(e.to_string()),
    };
    report(&mut results, 5, "per-class codebook matrix", t, cross_class);

    let t = Instant::now();
    let shared = match &fashion {
        Ok(splits) => criterion_shared(splits, &cfg),
        Err(e) => Err(e.to_string()),
    };
    let within = tables_start.elapsed() <= TABLES_BUDGET;
    report(
        &mut results,
        6,
        "shared codebook vs baselines",
        t,
        shared.and_then(|d| check(within, format!("{d}; criteria 4-6 took {:.0?}", tables_start.elapsed()))),
    );

    let t = Instant::now();
    let units = match (&fashion, &per_class) {
        (Ok(splits), Ok(cbs)) => criterion_units_only(splits, cbs, &cfg),
        _ => Err("Fashion-MNIST codebooks unavailable".into()),
    };
    report(&mut results, 7, "full codebook vs single pixels", t, units);

    let t = Instant::now();
    let lossless = criterion_lossless(
        fashion.as_ref().ok().zip(per_class.as_ref().ok()),
        mnist.as_ref().ok().zip(mnist_cb.as_ref().and_then(|r| r.as_ref().ok())),
    )
    .and_then(|d| check(t.elapsed() <= LOSSLESS_BUDGET, d));
    report(&mut results, 1, "lossless round trip", t, lossless);

    let t = Instant::now();
    report(&mut results, 8, "CLI determinism", t, criterion_cli_determinism(&dir));

    results.sort_by_key(|r| r.id);
    println!("\nsummary");
    for r in &results {
        println!("  [{}] {} {}: {} ({:.1?})", if r.pass { "PASS" } else { "FAIL" }, r.id, r.name, r.detail, r.elapsed);
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn shared_codebook(splits: &[ClassSplit], cfg: &TrainConfig) -> softcodec::Result<Codebook> {
    let all = Corpus::concat(splits.iter().map(|c| &c.train))?;
    Ok(train(&all, cfg)?.codebook)
}

fn criterion_binary_trend(splits: &[ClassSplit], cb: &Codebook) -> Result<String, String> {
    let all = Corpus::concat(splits.iter().map(|c| &c.train)).map_err(|e| e.to_string())?;
    let pixel_code = train_pixel_code(&all).map_err(|e| e.to_string())?;
    let cmp = compare_methods(splits, cb, &pixel_code).map_err(|e| e.to_string())?;
    let rho = spearman(&cmp.civ, &cmp.soft);
    let top = (0..cmp.civ.len()).max_by(|&a, &b| cmp.civ[a].total_cmp(&cmp.civ[b])).unwrap();
    let ratios: Vec<String> = cmp.soft.iter().map(|r| format!("{r:.2}")).collect();
    check(
        rho >= MIN_SPEARMAN && cmp.labels[top] == "1",
        format!(
            "Spearman {rho:.3} (need >= {MIN_SPEARMAN}), max CIV {:.3} in class {} (need class 1), ratios [{}]",
            cmp.civ[top],
            cmp.labels[top],
            ratios.join(", ")
        ),
    )
}

fn criterion_cross_class(splits: &[ClassSplit], cbs: &[Codebook]) -> Result<String, String> {
    let m = cross_matrix(splits, cbs).map_err(|e| e.to_string())?;
    println!("{}", m.render());
    let wins = m.diagonal_wins();
    let diag = m.diagonal();
    let outside: Vec<String> = diag
        .iter()
        .zip(REFERENCE_DIAGONAL)
        .enumerate()
        .filter(|(_, (&d, t))| (d - t).abs() > DIAGONAL_TOLERANCE * t)
        .map(|(i, (d, t))| format!("class {i}: {d:.3} vs {t}"))
        .collect();
    let shown: Vec<String> = diag.iter().map(|d| format!("{d:.2}")).collect();
    check(
        wins >= MIN_DIAGONAL_WINS && outside.is_empty(),
        format!(
            "diagonal >= column mean in {wins}/10 (need {MIN_DIAGONAL_WINS}), diagonal [{}], outside ±20%: {}",
            shown.join(", "),
            if outside.is_empty() { "none".to_string() } else { outside.join("; ") }
        ),
    )
}

fn criterion_shared(splits: &[ClassSplit], cfg: &TrainConfig) -> Result<String, String> {
    let cb = shared_codebook(splits, cfg).map_err(|e| e.to_string())?;
    let all = Corpus::concat(splits.iter().map(|c| &c.train)).map_err(|e| e.to_string())?;
    let pixel_code = train_pixel_code(&all).map_err(|e| e.to_string())?;
    let cmp = compare_methods(splits, &cb, &pixel_code).map_err(|e| e.to_string())?;
    println!("{}", cmp.render());
    let wins = |other: &[f64]| cmp.soft.iter().zip(other).filter(|(s, o)| s > o).count();
    let (huffman, golomb) = (wins(&cmp.huffman), wins(&cmp.predictive_golomb));
    check(
        huffman >= MIN_HUFFMAN_WINS && golomb >= MIN_GOLOMB_WINS,
        format!(
            "beats Huffman in {huffman}/10 (need {MIN_HUFFMAN_WINS}), predictive Golomb in {golomb}/10 (need {MIN_GOLOMB_WINS})"
        ),
    )
}

fn criterion_units_only(splits: &[ClassSplit], cbs: &[Codebook], cfg: &TrainConfig) -> Result<String, String> {
    let mut failures = Vec::new();
    let mut saved = 0i64;
    for (split, full) in splits.iter().zip(cbs) {
        let units_cfg = TrainConfig { n_max: 1, interface: InterfaceChoice::Fixed(full.interface()), ..*cfg };
        let units = train(&split.train, &units_cfg).map_err(|e| e.to_string())?.codebook;
        let a = total_bits(&split.test, full).map_err(|e| e.to_string())?;
        let b = total_bits(&split.test, &units).map_err(|e| e.to_string())?;
        saved += b as i64 - a as i64;
        if a > b {
            failures.push(format!("class {}: {a} > {b} bits", split.label));
        }
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!("all 10 classes, {saved} bits saved in total")
        } else {
            failures.join("; ")
        },
    )
}

fn criterion_lossless(
    fashion: Option<(&Vec<ClassSplit>, &Vec<Codebook>)>,
    mnist: Option<(&Vec<ClassSplit>, &Codebook)>,
) -> Result<String, String> {
    let fuzzed = common::fuzz_round_trips(&mut ChaCha8Rng::seed_from_u64(1), FUZZ_IMAGES)?;
    let (splits, cbs) = fashion.ok_or("Fashion-MNIST codebooks unavailable")?;
    let (digits, digit_cb) = mnist.ok_or("MNIST codebook unavailable")?;
    let mut dataset_images = 0;
    for (split, cb) in splits.iter().zip(cbs) {
        for img in split.train.images().iter().chain(split.test.images()) {
            common::round_trip(img, cb).map_err(|e| format!("Fashion class {}: {e}", split.label))?;
            dataset_images += 1;
        }
    }
    for split in digits {
        for img in split.train.images().iter().chain(split.test.images()) {
            common::round_trip(img, digit_cb).map_err(|e| format!("MNIST digit {}: {e}", split.label))?;
            dataset_images += 1;
        }
    }
    let mut cross = 0;
    for &i in &CROSS_SAMPLE {
        for &j in &CROSS_SAMPLE {
            for img in splits[i].test.images() {
                common::round_trip(img, &cbs[j]).map_err(|e| format!("class {i} with codebook {j}: {e}"))?;
            }
            cross += 1;
        }
    }
    Ok(format!("{fuzzed} fuzzed images, {dataset_images} dataset images, {cross} cross-codebook pairs"))
}

fn run_cli(args: &[&std::ffi::OsStr]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_softcodec")).args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{:?} failed: {}", args, String::from_utf8_lossy(&out.stderr).trim()))
    }
}

fn criterion_cli_determinism(dir: &Path) -> Result<String, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = dir.join("fashion/train-3.idx3-ubyte.gz");
    let sample = fashion_splits(dir, 0, 1).map_err(|e| e.to_string())?.swap_remove(3).test.images()[0].clone();
    let pgm = tmp.path().join("sample.pgm");
    save_pnm(&pgm, &MultiComponentImage::gray(sample)).map_err(|e| e.to_string())?;

    let mut codebooks = Vec::new();
    let mut frames = Vec::new();
    for run in 0..2 {
        let cb = tmp.path().join(format!("run{run}.scb"));
        let frame = tmp.path().join(format!("run{run}.scmp"));
        run_cli(&["train".as_ref(), corpus.as_os_str(), "-o".as_ref(), cb.as_os_str()])?;
        run_cli(&["encode".as_ref(), pgm.as_os_str(), "--codebook".as_ref(), cb.as_os_str(), "-o".as_ref(), frame.as_os_str()])?;
        codebooks.push(std::fs::read(&cb).map_err(|e| e.to_string())?);
        frames.push(std::fs::read(&frame).map_err(|e| e.to_string())?);
    }
    let decoded = tmp.path().join("decoded.pgm");
    let frame0 = tmp.path().join("run0.scmp");
    let cb0 = tmp.path().join("run0.scb");
    run_cli(&["decode".as_ref(), frame0.as_os_str(), "--codebook".as_ref(), cb0.as_os_str(), "-o".as_ref(), decoded.as_os_str()])?;
    let same_pgm = std::fs::read(&decoded).map_err(|e| e.to_string())? == std::fs::read(&pgm).map_err(|e| e.to_string())?;
    check(
        codebooks[0] == codebooks[1] && frames[0] == frames[1] && same_pgm,
        format!(
            "codebooks identical: {} ({} bytes), frames identical: {} ({} bytes), decoded PGM identical: {same_pgm}",
            codebooks[0] == codebooks[1],
            codebooks[0].len(),
            frames[0] == frames[1],
            frames[0].len()
        ),
    )
}
