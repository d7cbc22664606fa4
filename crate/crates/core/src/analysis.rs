//! CSV emitters for compressibility analysis: the CIF curve, per-class CIV
//! histograms, per-image reports and location-distance histograms.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::codebook::Codebook;
use crate::codec::encode_with_stats;
use crate::error::Result;
use crate::image::Image;
use crate::info::{analyze_image, civ, CompressibilityReport};

pub const CIF_CURVE_HEADER: &str = "p,civ";
pub const CIV_HISTOGRAM_HEADER: &str = "class,civ_bin,count";
pub const REPORT_HEADER: &str =
    "class,image,p0,entropy_x,entropy_p,civ,entropy_y,degenerate,location_cost,predicted_relative_ratio";
pub const DELTA_HISTOGRAM_HEADER: &str = "delta,count";

/// `C(p)` sampled at `p = 0, 0.001, ..., 0.999`.
pub fn cif_curve() -> Vec<(f64, f64)> {
    (0..1000)
        .map(|k| {
            let p = f64::from(k) / 1000.0;
            (p, civ(p).expect("p < 1"))
        })
        .collect()
}

pub fn cif_curve_csv() -> String {
    let mut s = format!("{CIF_CURVE_HEADER}\n");
    for (p, c) in cif_curve() {
        let _ = writeln!(s, "{p:.3},{c:.9}");
    }
    s
}

/// Counts of CIV values per class in bins of width `bin_width`, keyed by the
/// bin's lower edge.
pub fn civ_histogram(classes: &[(String, Vec<f64>)], bin_width: f64) -> Vec<(String, f64, u64)> {
    assert!(bin_width > 0.0, "bin width must be positive");
    let mut rows = Vec::new();
    for (label, values) in classes {
        let mut bins: BTreeMap<i64, u64> = BTreeMap::new();
        for &v in values {
            *bins.entry((v / bin_width).floor() as i64).or_insert(0) += 1;
        }
        rows.extend(bins.into_iter().map(|(b, n)| (label.clone(), b as f64 * bin_width, n)));
    }
    rows
}

pub fn civ_histogram_csv(rows: &[(String, f64, u64)]) -> String {
    let mut s = format!("{CIV_HISTOGRAM_HEADER}\n");
    for (label, bin, n) in rows {
        let _ = writeln!(s, "{label},{bin:.4},{n}");
    }
    s
}

/// Report for one image. With a codebook, the location cost is the mean
/// Golomb bits per placement of a trial encode.
pub fn image_report(img: &Image, cb: Option<&Codebook>) -> Result<CompressibilityReport> {
    let location_cost = match cb {
        Some(cb) => encode_with_stats(img, cb)?.1.mean_location_bits(),
        None => None,
    };
    Ok(analyze_image(img, location_cost))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.6}"))
}

fn report_row(s: &mut String, class: &str, image: &str, r: &CompressibilityReport) {
    let _ = writeln!(
        s,
        "{class},{image},{:.6},{:.6},{:.6},{:.6},{},{},{},{}",
        r.p0,
        r.entropy_x,
        r.entropy_p,
        r.civ,
        opt(r.entropy_y),
        u8::from(r.degenerate),
        opt(r.location_cost),
        opt(r.predicted_relative_ratio)
    );
}

/// Component-wise mean of reports; optional fields are averaged over the
/// reports that have them.
pub fn mean_report(reports: &[CompressibilityReport]) -> Option<CompressibilityReport> {
    if reports.is_empty() {
        return None;
    }
    let n = reports.len() as f64;
    let mean = |f: &dyn Fn(&CompressibilityReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    let mean_opt = |f: &dyn Fn(&CompressibilityReport) -> Option<f64>| {
        let vals: Vec<f64> = reports.iter().filter_map(f).collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    };
    Some(CompressibilityReport {
        p0: mean(&|r| r.p0),
        entropy_x: mean(&|r| r.entropy_x),
        entropy_p: mean(&|r| r.entropy_p),
        civ: mean(&|r| r.civ),
        entropy_y: mean_opt(&|r| r.entropy_y),
        degenerate: reports.iter().all(|r| r.degenerate),
        location_cost: mean_opt(&|r| r.location_cost),
        predicted_relative_ratio: mean_opt(&|r| r.predicted_relative_ratio),
    })
}

/// Per-image rows followed by one `mean` row per class.
pub fn reports_csv(classes: &[(String, Vec<CompressibilityReport>)]) -> String {
    let mut s = format!("{REPORT_HEADER}\n");
    for (label, reports) in classes {
        for (i, r) in reports.iter().enumerate() {
            report_row(&mut s, label, &i.to_string(), r);
        }
    }
    for (label, reports) in classes {
        if let Some(m) = mean_report(reports) {
            report_row(&mut s, label, "mean", &m);
        }
    }
    s
}

/// Histogram of distances between consecutive placements over trial
/// encodes of `images`. The first placement of each image is an absolute
/// position and is left out.
pub fn location_delta_histogram<'a, I>(images: I, cb: &Codebook) -> Result<Vec<(u64, u64)>>
where
    I: IntoIterator<Item = &'a Image>,
{
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    for img in images {
        let (_, stats) = encode_with_stats(img, cb)?;
        for &d in stats.deltas.iter().skip(1) {
            *hist.entry(d).or_insert(0) += 1;
        }
    }
    Ok(hist.into_iter().collect())
}

pub fn delta_histogram_csv(hist: &[(u64, u64)]) -> String {
    let mut s = format!("{DELTA_HISTOGRAM_HEADER}\n");
    for (d, n) in hist {
        let _ = writeln!(s, "{d},{n}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cif_curve_samples() {
        let curve = cif_curve();
        assert_eq!(curve.len(), 1000);
        assert_eq!(curve[0], (0.0, 0.0));
        assert_eq!(curve[500].1, 2.0);
        assert!(curve.windows(2).all(|w| w[0].1 <= w[1].1));
        let csv = cif_curve_csv();
        assert!(csv.starts_with("p,civ\n0.000,0.000000000\n"));
        assert_eq!(csv.lines().count(), 1001);
    }

    #[test]
    fn histogram_bins() {
        let rows = civ_histogram(&[("1".into(), vec![4.9, 5.1, 5.2, 6.0])], 0.5);
        assert_eq!(rows, vec![("1".into(), 4.5, 1), ("1".into(), 5.0, 2), ("1".into(), 6.0, 1)]);
        assert!(civ_histogram_csv(&rows).starts_with("class,civ_bin,count\n1,4.5000,1\n"));
    }

    #[test]
    fn checkerboard_row() {
        let img = Image::new(2, 2, 2, vec![0, 1, 1, 0]).unwrap();
        let r = image_report(&img, None).unwrap();
        assert_eq!((r.p0, r.civ), (0.5, 2.0));
        let csv = reports_csv(&[("x".into(), vec![r])]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("x,0,0.500000,1.000000,1.000000,2.000000,0.000000,0,,"));
        assert!(lines[2].starts_with("x,mean,"));
    }
}
