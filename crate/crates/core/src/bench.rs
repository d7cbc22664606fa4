//! Benchmark harness: per-class cross matrices and shared-codebook method
//! comparisons over labelled corpora.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::baselines::{huffman_baseline, predictive_golomb_baseline, train_pixel_code};
use crate::codebook::Codebook;
use crate::codec::{encode, measure_ratio, natural_bits};
use crate::error::{Error, Result};
use crate::huffman::HuffmanCode;
use crate::image::Corpus;
use crate::info::analyze_image;
use crate::train::{train, TrainConfig};

/// Training and test images of one class.
#[derive(Debug, Clone)]
pub struct ClassSplit {
    pub label: String,
    pub train: Corpus,
    pub test: Corpus,
}

/// Mean compression ratio of `test` under `cb`.
pub fn mean_ratio(test: &Corpus, cb: &Codebook) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::usage("empty test corpus"));
    }
    let ratios = test
        .images()
        .par_iter()
        .map(|img| encode(img, cb).map(|f| measure_ratio(img, &f)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ratios.iter().sum::<f64>() / ratios.len() as f64)
}

/// Total frame bits of `test` under `cb`.
pub fn total_bits(test: &Corpus, cb: &Codebook) -> Result<u64> {
    let bits = test
        .images()
        .par_iter()
        .map(|img| encode(img, cb).map(|f| f.total_bits()))
        .collect::<Result<Vec<_>>>()?;
    Ok(bits.iter().sum())
}

/// Mean compressible indicator value; constant images count as 0.
pub fn mean_civ(corpus: &Corpus) -> f64 {
    if corpus.is_empty() {
        return 0.0;
    }
    corpus.images().iter().map(|img| analyze_image(img, None).civ).sum::<f64>() / corpus.len() as f64
}

fn check_splits(classes: &[ClassSplit]) -> Result<()> {
    if classes.is_empty() {
        return Err(Error::usage("no classes to benchmark"));
    }
    for c in classes {
        if c.train.is_empty() || c.test.is_empty() {
            return Err(Error::usage(format!("class {} has an empty train or test corpus", c.label)));
        }
    }
    Ok(())
}

/// Mean ratios with one codebook per class: `ratios[i][j]` is test class `j`
/// under the codebook of training class `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossMatrix {
    pub labels: Vec<String>,
    pub ratios: Vec<Vec<f64>>,
    pub civ: Vec<f64>,
    pub interfaces: Vec<u8>,
}

impl CrossMatrix {
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.labels.len()).map(|i| self.ratios[i][i]).collect()
    }

    pub fn column_mean(&self, j: usize) -> f64 {
        self.ratios.iter().map(|row| row[j]).sum::<f64>() / self.ratios.len() as f64
    }

    /// Columns whose diagonal entry is at least the column mean.
    pub fn diagonal_wins(&self) -> usize {
        (0..self.labels.len()).filter(|&j| self.ratios[j][j] >= self.column_mean(j)).count()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{:>10}", "codebook");
        for l in &self.labels {
            let _ = write!(s, " {l:>7}");
        }
        s.push('\n');
        for (i, row) in self.ratios.iter().enumerate() {
            let _ = write!(s, "{:>10}", self.labels[i]);
            for v in row {
                let _ = write!(s, " {v:>7.3}");
            }
            let _ = writeln!(s, "   l={}", self.interfaces[i]);
        }
        let _ = write!(s, "{:>10}", "CIV");
        for v in &self.civ {
            let _ = write!(s, " {v:>7.3}");
        }
        s.push('\n');
        s
    }
}

/// Train one codebook per class and encode every test class with each.
pub fn per_class_matrix(classes: &[ClassSplit], cfg: &TrainConfig) -> Result<CrossMatrix> {
    check_splits(classes)?;
    cross_matrix(classes, &train_per_class(classes, cfg)?)
}

pub fn train_per_class(classes: &[ClassSplit], cfg: &TrainConfig) -> Result<Vec<Codebook>> {
    check_splits(classes)?;
    classes.iter().map(|c| train(&c.train, cfg).map(|r| r.codebook)).collect()
}

/// Encode every test class with every codebook; `codebooks[i]` belongs to
/// `classes[i]`.
pub fn cross_matrix(classes: &[ClassSplit], codebooks: &[Codebook]) -> Result<CrossMatrix> {
    check_splits(classes)?;
    if codebooks.len() != classes.len() {
        return Err(Error::usage("one codebook per class is required"));
    }
    let ratios = codebooks
        .iter()
        .map(|cb| classes.iter().map(|c| mean_ratio(&c.test, cb)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(CrossMatrix {
        labels: classes.iter().map(|c| c.label.clone()).collect(),
        ratios,
        civ: classes.iter().map(|c| mean_civ(&c.test)).collect(),
        interfaces: codebooks.iter().map(Codebook::interface).collect(),
    })
}

/// Mean ratio per test class for soft compression with one shared codebook
/// and for the two baselines.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodComparison {
    pub labels: Vec<String>,
    pub soft: Vec<f64>,
    pub huffman: Vec<f64>,
    pub predictive_golomb: Vec<f64>,
    pub civ: Vec<f64>,
    pub interface: u8,
    pub codebook_bytes: usize,
}

impl MethodComparison {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{:>18}", "method");
        for l in &self.labels {
            let _ = write!(s, " {l:>7}");
        }
        s.push('\n');
        for (name, row) in [
            ("soft compression", &self.soft),
            ("Huffman", &self.huffman),
            ("predictive Golomb", &self.predictive_golomb),
            ("CIV", &self.civ),
        ] {
            let _ = write!(s, "{name:>18}");
            for v in row.iter() {
                let _ = write!(s, " {v:>7.3}");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "shared codebook: l={}, {} bytes", self.interface, self.codebook_bytes);
        s
    }
}

/// Train a single codebook (and a single pixel Huffman code) on the union
/// of the training sets, then compare methods on each test class.
pub fn shared_comparison(classes: &[ClassSplit], cfg: &TrainConfig) -> Result<MethodComparison> {
    check_splits(classes)?;
    let all = Corpus::concat(classes.iter().map(|c| &c.train))?;
    let cb = train(&all, cfg)?.codebook;
    compare_methods(classes, &cb, &train_pixel_code(&all)?)
}

/// The comparison for an already trained shared codebook and pixel code.
pub fn compare_methods(classes: &[ClassSplit], cb: &Codebook, pixel_code: &HuffmanCode) -> Result<MethodComparison> {
    check_splits(classes)?;
    let mut cmp = MethodComparison {
        labels: classes.iter().map(|c| c.label.clone()).collect(),
        soft: Vec::new(),
        huffman: Vec::new(),
        predictive_golomb: Vec::new(),
        civ: Vec::new(),
        interface: cb.interface(),
        codebook_bytes: cb.to_bytes().len(),
    };
    for c in classes {
        cmp.soft.push(mean_ratio(&c.test, cb)?);
        let (huff, golomb) = c
            .test
            .images()
            .par_iter()
            .map(|img| {
                let nb = natural_bits(img) as f64;
                let h = nb / huffman_baseline(img, pixel_code)? as f64;
                let g = nb / predictive_golomb_baseline(img) as f64;
                Ok((h, g))
            })
            .collect::<Result<Vec<(f64, f64)>>>()?
            .into_iter()
            .fold((0.0, 0.0), |acc, (h, g)| (acc.0 + h, acc.1 + g));
        let n = c.test.len() as f64;
        cmp.huffman.push(huff / n);
        cmp.predictive_golomb.push(golomb / n);
        cmp.civ.push(mean_civ(&c.test));
    }
    Ok(cmp)
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "samples must pair up");
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}
