//! Entropy bookkeeping and the compressible indicator function.
//!
//! `X` is the intensity of a pixel drawn uniformly from an image, `p` the
//! probability of intensity zero and `Y` the intensity conditioned on being
//! nonzero. The compressible indicator function `C(p) = H(p) / (1 - p)` is the
//! number of bits per nonzero pixel saved by not coding zeros; soft coding
//! beats per-pixel entropy coding exactly when a shape location costs fewer
//! bits than that. All logarithms are base 2.

use crate::error::{Error, Result};
use crate::image::Image;

const SUM_TOLERANCE: f64 = 1e-9;

/// Probability mass over intensities `0..D`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityDistribution {
    probs: Vec<f64>,
}

impl IntensityDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::domain("empty distribution"));
        }
        if probs.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::domain("probabilities must be finite and nonnegative"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::domain(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(IntensityDistribution { probs })
    }

    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::domain("no observations"));
        }
        let probs = counts.iter().map(|&c| c as f64 / total as f64).collect();
        IntensityDistribution::new(probs)
    }

    /// `n_k / (M N)` for every intensity `k`.
    pub fn from_image(img: &Image) -> Self {
        IntensityDistribution::from_counts(&img.histogram()).expect("images are never empty")
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn p0(&self) -> f64 {
        self.probs[0]
    }

    /// The distribution of `Y`: intensity zero removed and the rest renormalized.
    pub fn renormalized_tail(&self) -> Result<Vec<f64>> {
        let rest = 1.0 - self.p0();
        if rest <= 0.0 {
            return Err(Error::domain("p0 = 1 leaves no nonzero intensities"));
        }
        Ok(self.probs[1..].iter().map(|&p| p / rest).collect())
    }
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy of an arbitrary probability vector, `0 log 0 = 0`.
pub fn entropy_of(probs: &[f64]) -> f64 {
    let h: f64 = -probs.iter().map(|&p| plogp(p)).sum::<f64>();
    h.max(0.0)
}

pub fn entropy(dist: &IntensityDistribution) -> f64 {
    entropy_of(dist.probs())
}

pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("binary entropy needs p in [0, 1], got {p}")));
    }
    Ok((-plogp(p) - plogp(1.0 - p)).max(0.0))
}

/// `H(Y) = (H(X) - H(p)) / (1 - p)`.
pub fn conditional_residual_entropy(dist: &IntensityDistribution) -> Result<f64> {
    let p = dist.p0();
    if p >= 1.0 {
        return Err(Error::domain("H(Y) is undefined when p0 = 1"));
    }
    Ok(((entropy(dist) - binary_entropy(p)?) / (1.0 - p)).max(0.0))
}

/// Compressible indicator function `C(p) = H(p) / (1 - p)` on `[0, 1)`.
pub fn civ(p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::domain(format!("C(p) needs p in [0, 1), got {p}")));
    }
    Ok(binary_entropy(p)? / (1.0 - p))
}

/// Derivative `C'(p) = -log p / (1 - p)^2`.
pub fn civ_derivative(p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::domain(format!("C'(p) needs p in [0, 1), got {p}")));
    }
    Ok(-p.log2() / ((1.0 - p) * (1.0 - p)))
}

/// Predicted size advantage of order-one soft coding over per-pixel entropy
/// coding, `R' = 1 + (1 - p)(C(p) - L_W) / H(X)`.
pub fn predicted_relative_ratio(dist: &IntensityDistribution, location_cost: f64) -> Result<f64> {
    let hx = entropy(dist);
    if hx <= 0.0 {
        return Err(Error::domain("relative ratio needs H(X) > 0"));
    }
    let p = dist.p0();
    Ok(1.0 + (1.0 - p) * (civ(p)? - location_cost) / hx)
}

/// Lower bound on bits for per-pixel entropy coding, `M N H(X)`.
pub fn min_bits_entropy_coding(dist: &IntensityDistribution, pixels: usize) -> f64 {
    pixels as f64 * entropy(dist)
}

/// Lower bound on bits for soft coding with single-pixel shapes,
/// `M N (1 - p)(H(Y) + L_W)`.
pub fn min_bits_soft_order_one(dist: &IntensityDistribution, pixels: usize, location_cost: f64) -> Result<f64> {
    let p = dist.p0();
    if p >= 1.0 {
        return Ok(0.0);
    }
    Ok(pixels as f64 * (1.0 - p) * (conditional_residual_entropy(dist)? + location_cost))
}

/// Upper bound on the order-n soft-coding cost when shapes of size `k` are
/// charged `k H(Y) + L_W` bits (the independence bound on their entropy).
/// `shape_counts[k - 1]` is the number of shapes of size `k`.
pub fn soft_bits_order_n_bound(shape_counts: &[u64], entropy_y: f64, location_cost: f64) -> f64 {
    shape_counts
        .iter()
        .enumerate()
        .map(|(i, &n)| n as f64 * ((i + 1) as f64 * entropy_y + location_cost))
        .sum()
}

/// Order-one cost for the same nonzero pixels, `(sum_k k N_k)(H(Y) + L_W)`.
pub fn soft_bits_order_one(shape_counts: &[u64], entropy_y: f64, location_cost: f64) -> f64 {
    let covered: u64 = shape_counts.iter().enumerate().map(|(i, &n)| (i as u64 + 1) * n).sum();
    covered as f64 * (entropy_y + location_cost)
}

/// Summary of how compressible an image is by location/shape coding.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressibilityReport {
    pub p0: f64,
    pub entropy_x: f64,
    pub entropy_p: f64,
    /// `C(p0)`; reported as 0 for constant-zero images, see `degenerate`.
    pub civ: f64,
    /// `H(Y)`, absent when every pixel is zero.
    pub entropy_y: Option<f64>,
    /// Set when `p0 = 1`; `civ` then holds 0 rather than the divergent limit.
    pub degenerate: bool,
    pub location_cost: Option<f64>,
    pub predicted_relative_ratio: Option<f64>,
}

pub fn analyze_image(img: &Image, location_cost: Option<f64>) -> CompressibilityReport {
    analyze_distribution(&IntensityDistribution::from_image(img), location_cost)
}

pub fn analyze_distribution(dist: &IntensityDistribution, location_cost: Option<f64>) -> CompressibilityReport {
    let p0 = dist.p0();
    let entropy_x = entropy(dist);
    let entropy_p = binary_entropy(p0.clamp(0.0, 1.0)).unwrap_or(0.0);
    let degenerate = p0 >= 1.0;
    let (civ_value, entropy_y) = if degenerate {
        (0.0, None)
    } else {
        (civ(p0).unwrap_or(0.0), conditional_residual_entropy(dist).ok())
    };
    let predicted = location_cost.and_then(|lw| predicted_relative_ratio(dist, lw).ok());
    CompressibilityReport {
        p0,
        entropy_x,
        entropy_p,
        civ: civ_value,
        entropy_y,
        degenerate,
        location_cost,
        predicted_relative_ratio: predicted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(p: &[f64]) -> IntensityDistribution {
        IntensityDistribution::new(p.to_vec()).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&dist(&[0.5, 0.5])), 1.0);
        assert_eq!(entropy(&dist(&[1.0, 0.0])), 0.0);
        assert!((entropy(&dist(&[0.5, 0.25, 0.25])) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // 2 - 0.75 log2 3
        assert!((binary_entropy(0.25).unwrap() - 0.811_278_124_459_132_8).abs() < 1e-12);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
    }

    #[test]
    fn residual_entropy_examples() {
        assert!((conditional_residual_entropy(&dist(&[0.5, 0.25, 0.25])).unwrap() - 1.0).abs() < 1e-12);
        assert!(conditional_residual_entropy(&dist(&[0.5, 0.5])).unwrap().abs() < 1e-12);
        assert!(conditional_residual_entropy(&dist(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn civ_examples() {
        assert_eq!(civ(0.5).unwrap(), 2.0);
        assert_eq!(civ(0.0).unwrap(), 0.0);
        // H(0.75) / 0.25 with H(0.75) = 0.8112781244591328
        assert!((civ(0.75).unwrap() - 3.245_112_497_836_531).abs() < 1e-12);
        assert!(civ(1.0).is_err());
    }

    #[test]
    fn relative_ratio_examples() {
        let d = dist(&[0.5, 0.25, 0.25]);
        assert!((predicted_relative_ratio(&d, 2.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((predicted_relative_ratio(&d, 1.0).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert!((predicted_relative_ratio(&d, 3.0).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!(predicted_relative_ratio(&dist(&[1.0]), 1.0).is_err());
    }

    #[test]
    fn analyze_constant_and_checkerboard() {
        let zero = Image::zeros(4, 4, 256).unwrap();
        let r = analyze_image(&zero, Some(3.0));
        assert_eq!(r.p0, 1.0);
        assert_eq!(r.entropy_x, 0.0);
        assert_eq!(r.civ, 0.0);
        assert!(r.degenerate);
        assert!(r.entropy_y.is_none());
        assert!(r.predicted_relative_ratio.is_none());

        let board = Image::from_rows(2, &[[0u16, 1], [1, 0]]).unwrap();
        let r = analyze_image(&board, None);
        assert_eq!(r.p0, 0.5);
        assert_eq!(r.civ, 2.0);
        assert!(!r.degenerate);
    }

    #[test]
    fn distribution_validation() {
        assert!(IntensityDistribution::new(vec![0.5, 0.4]).is_err());
        assert!(IntensityDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(IntensityDistribution::from_counts(&[0, 0]).is_err());
    }
}
