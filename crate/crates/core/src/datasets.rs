//! Loaders for the bundled desk-scale MNIST and Fashion-MNIST subsets.
//!
//! `data/fashion/{train,test}-{c}.idx3-ubyte.gz` hold 1000 training and 200
//! test images of each Fashion-MNIST class; `data/mnist/digit-{d}.idx3-ubyte.gz`
//! holds every MNIST image of digit `d`. `scripts/fetch_datasets.py` builds
//! them. Subsets are always the leading images, so no sampling seed is needed.

use std::path::{Path, PathBuf};

use crate::bench::ClassSplit;
use crate::error::{Error, Result};
use crate::idx::load_idx;
use crate::image::{binarize, Corpus, Image};
use crate::netpbm::load_pnm;

pub const CLASSES: usize = 10;

/// Binarization threshold used for the binary MNIST experiments.
pub const MNIST_THRESHOLD: u32 = 128;

/// The workspace `data/` directory, overridable with `SOFTCODEC_DATA`.
pub fn data_dir() -> PathBuf {
    std::env::var_os("SOFTCODEC_DATA")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

/// Fashion-MNIST classes with the first `n_train` / `n_test` images each.
pub fn fashion_splits(dir: &Path, n_train: usize, n_test: usize) -> Result<Vec<ClassSplit>> {
    (0..CLASSES)
        .map(|c| {
            let train = load_idx(dir.join(format!("fashion/train-{c}.idx3-ubyte.gz")))?.take(n_train);
            let test = load_idx(dir.join(format!("fashion/test-{c}.idx3-ubyte.gz")))?.take(n_test);
            Ok(ClassSplit { label: c.to_string(), train, test })
        })
        .collect()
}

/// Binarized MNIST digits: the first `n_test` images of each digit are the
/// test set and the next `n_train` are for training.
pub fn mnist_binary_splits(dir: &Path, n_train: usize, n_test: usize) -> Result<Vec<ClassSplit>> {
    (0..CLASSES)
        .map(|d| {
            let all = load_idx(dir.join(format!("mnist/digit-{d}.idx3-ubyte.gz")))?
                .map_images(|img| binarize(img, MNIST_THRESHOLD))?;
            Ok(ClassSplit {
                label: d.to_string(),
                test: all.take(n_test),
                train: all.slice(n_test, n_test.saturating_add(n_train)),
            })
        })
        .collect()
}

/// Load a corpus from an IDX file, a single PGM/PPM file, or a directory of
/// PGM/PPM files (sorted by name). For multi-component files only
/// `component` is kept.
pub fn load_corpus(path: &Path, component: usize) -> Result<Corpus> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        files.retain(|p| is_pnm(p));
        files.sort();
        if files.is_empty() {
            return Err(Error::usage(format!("no .pgm/.ppm files in {}", path.display())));
        }
        let images = files.iter().map(|f| pick_component(f, component)).collect::<Result<Vec<_>>>()?;
        return Corpus::new(images, None);
    }
    if is_pnm(path) {
        return Corpus::new(vec![pick_component(path, component)?], None);
    }
    load_idx(path)
}

fn is_pnm(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
        Some("pgm" | "ppm" | "pnm")
    )
}

fn pick_component(path: &Path, component: usize) -> Result<Image> {
    let img = load_pnm(path)?;
    let n = img.components().len();
    img.into_components()
        .into_iter()
        .nth(component)
        .ok_or_else(|| Error::usage(format!("{} has {n} components, asked for {component}", path.display())))
}
