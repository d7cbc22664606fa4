//! Pixel containers shared by every stage of the codec.

use crate::error::{Error, Result};

/// Largest supported number of intensity levels (16-bit samples).
pub const MAX_DEPTH_LEVELS: u32 = 1 << 16;

/// A single-component image with intensities in `[0, depth_levels - 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Image {
    height: usize,
    width: usize,
    depth_levels: u32,
    pixels: Vec<u16>,
}

impl Image {
    pub fn new(height: usize, width: usize, depth_levels: u32, pixels: Vec<u16>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::usage(format!("image dimensions must be positive, got {height}x{width}")));
        }
        if !(2..=MAX_DEPTH_LEVELS).contains(&depth_levels) {
            return Err(Error::usage(format!(
                "depth levels must be in [2, {MAX_DEPTH_LEVELS}], got {depth_levels}"
            )));
        }
        if pixels.len() != height * width {
            return Err(Error::usage(format!(
                "expected {} pixels for a {height}x{width} image, got {}",
                height * width,
                pixels.len()
            )));
        }
        if let Some(&v) = pixels.iter().find(|&&v| u32::from(v) >= depth_levels) {
            return Err(Error::usage(format!("pixel value {v} outside [0, {}]", depth_levels - 1)));
        }
        Ok(Image { height, width, depth_levels, pixels })
    }

    /// Build an image from nested rows; handy in tests and examples.
    pub fn from_rows<R: AsRef<[u16]>>(depth_levels: u32, rows: &[R]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != width) {
            return Err(Error::usage("ragged rows"));
        }
        let pixels = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Image::new(height, width, depth_levels, pixels)
    }

    pub fn zeros(height: usize, width: usize, depth_levels: u32) -> Result<Self> {
        Image::new(height, width, depth_levels, vec![0; height * width])
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn depth_levels(&self) -> u32 {
        self.depth_levels
    }

    pub fn pixels(&self) -> &[u16] {
        &self.pixels
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> u16 {
        self.pixels[row * self.width + col]
    }

    /// Bits per pixel of the natural binary code, `ceil(log2 D)`.
    pub fn natural_bits_per_pixel(&self) -> u32 {
        ceil_log2(self.depth_levels)
    }

    /// Occurrence count of every intensity level.
    pub fn histogram(&self) -> Vec<u64> {
        let mut hist = vec![0u64; self.depth_levels as usize];
        for &v in &self.pixels {
            hist[v as usize] += 1;
        }
        hist
    }
}

/// Mapped prediction residuals (or one of their layers), row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidualPlane {
    height: usize,
    width: usize,
    values: Vec<u32>,
}

impl ResidualPlane {
    pub fn new(height: usize, width: usize, values: Vec<u32>) -> Result<Self> {
        if values.len() != height * width {
            return Err(Error::usage(format!(
                "expected {} values for a {height}x{width} plane, got {}",
                height * width,
                values.len()
            )));
        }
        Ok(ResidualPlane { height, width, values })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        ResidualPlane { height, width, values: vec![0; height * width] }
    }

    pub fn from_rows<R: AsRef<[u32]>>(rows: &[R]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != width) {
            return Err(Error::usage("ragged rows"));
        }
        let values = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        ResidualPlane::new(height, width, values)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.values[row * self.width + col]
    }

    pub fn max_value(&self) -> u32 {
        self.values.iter().copied().max().unwrap_or(0)
    }

    pub fn count_nonzero(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0).count()
    }
}

/// Several equally sized components of one picture, e.g. the planes of an RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiComponentImage {
    components: Vec<Image>,
    labels: Vec<String>,
}

impl MultiComponentImage {
    pub fn new(components: Vec<Image>, labels: Vec<String>) -> Result<Self> {
        let first = components.first().ok_or_else(|| Error::usage("at least one component is required"))?;
        if components
            .iter()
            .any(|c| c.height() != first.height() || c.width() != first.width())
        {
            return Err(Error::usage("all components must share dimensions"));
        }
        if labels.len() != components.len() {
            return Err(Error::usage("one label per component is required"));
        }
        Ok(MultiComponentImage { components, labels })
    }

    /// Single component labelled "Y".
    pub fn gray(image: Image) -> Self {
        MultiComponentImage { components: vec![image], labels: vec!["Y".to_string()] }
    }

    pub fn components(&self) -> &[Image] {
        &self.components
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn into_components(self) -> Vec<Image> {
        self.components
    }

    pub fn height(&self) -> usize {
        self.components[0].height()
    }

    pub fn width(&self) -> usize {
        self.components[0].width()
    }
}

/// A training or test set: images sharing one depth, optionally tagged with a class.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    images: Vec<Image>,
    class_label: Option<String>,
}

impl Corpus {
    pub fn new(images: Vec<Image>, class_label: Option<String>) -> Result<Self> {
        if let Some(first) = images.first() {
            if images.iter().any(|i| i.depth_levels() != first.depth_levels()) {
                return Err(Error::usage("all corpus images must share depth levels"));
            }
        }
        Ok(Corpus { images, class_label })
    }

    pub fn images(&self) -> &[Image] {
        &self.images
    }

    pub fn class_label(&self) -> Option<&str> {
        self.class_label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.class_label = Some(label.into());
        self
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Depth shared by the images, `None` for an empty corpus.
    pub fn depth_levels(&self) -> Option<u32> {
        self.images.first().map(Image::depth_levels)
    }

    /// The first `n` images (all of them when `n` exceeds the length).
    pub fn take(&self, n: usize) -> Corpus {
        Corpus { images: self.images.iter().take(n).cloned().collect(), class_label: self.class_label.clone() }
    }

    /// `n` images spread evenly over the corpus, in order.
    pub fn sample_evenly(&self, n: usize) -> Corpus {
        let len = self.images.len();
        if n >= len {
            return self.clone();
        }
        let images = (0..n).map(|i| self.images[i * len / n].clone()).collect();
        Corpus { images, class_label: self.class_label.clone() }
    }

    /// Images `[start, end)`, clamped to the corpus length.
    pub fn slice(&self, start: usize, end: usize) -> Corpus {
        let end = end.min(self.images.len());
        let start = start.min(end);
        Corpus { images: self.images[start..end].to_vec(), class_label: self.class_label.clone() }
    }

    pub fn map_images<F>(&self, f: F) -> Result<Corpus>
    where
        F: FnMut(&Image) -> Result<Image>,
    {
        let images = self.images.iter().map(f).collect::<Result<Vec<_>>>()?;
        Corpus::new(images, self.class_label.clone())
    }

    /// Concatenate several corpora; the label is dropped.
    pub fn concat<'a, I: IntoIterator<Item = &'a Corpus>>(parts: I) -> Result<Corpus> {
        let images = parts.into_iter().flat_map(|c| c.images.iter().cloned()).collect();
        Corpus::new(images, None)
    }
}

/// Threshold an image into a two-level image: `1` where the pixel is `>= threshold`.
pub fn binarize(img: &Image, threshold: u32) -> Result<Image> {
    if threshold >= img.depth_levels() {
        return Err(Error::domain(format!(
            "threshold {threshold} outside [0, {}]",
            img.depth_levels() - 1
        )));
    }
    let pixels = img.pixels().iter().map(|&v| u16::from(u32::from(v) >= threshold)).collect();
    Image::new(img.height(), img.width(), 2, pixels)
}

/// `ceil(log2 n)` for `n >= 1`.
pub fn ceil_log2(n: u32) -> u32 {
    if n <= 1 {
        0
    } else {
        32 - (n - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_sampling() {
        let imgs = (0..10).map(|v| Image::new(1, 1, 16, vec![v]).unwrap()).collect();
        let c = Corpus::new(imgs, None).unwrap();
        let picked: Vec<u16> = c.sample_evenly(4).images().iter().map(|i| i.pixels()[0]).collect();
        assert_eq!(picked, vec![0, 2, 5, 7]);
        assert_eq!(c.sample_evenly(20).len(), 10);
    }

    #[test]
    fn binarize_examples() {
        let img = Image::from_rows(256, &[[0u16, 128, 255]]).unwrap();
        let b = binarize(&img, 128).unwrap();
        assert_eq!(b.pixels(), &[0, 1, 1]);
        assert_eq!(b.depth_levels(), 2);

        assert_eq!(binarize(&img, 0).unwrap().pixels(), &[1, 1, 1]);

        let img = Image::from_rows(256, &[[0u16, 254, 255]]).unwrap();
        assert_eq!(binarize(&img, 255).unwrap().pixels(), &[0, 0, 1]);

        assert!(matches!(binarize(&img, 256), Err(Error::Domain(_))));
    }

    #[test]
    fn image_rejects_out_of_range() {
        assert!(Image::new(1, 2, 4, vec![0, 4]).is_err());
        assert!(Image::new(1, 2, 4, vec![0]).is_err());
        assert!(Image::new(0, 2, 4, vec![]).is_err());
        assert!(Image::new(1, 1, 1, vec![0]).is_err());
        assert!(Image::new(1, 1, MAX_DEPTH_LEVELS + 1, vec![0]).is_err());
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(256), 8);
        assert_eq!(ceil_log2(257), 9);
        assert_eq!(ceil_log2(1 << 16), 16);
    }

    #[test]
    fn corpus_requires_shared_depth() {
        let a = Image::zeros(1, 1, 2).unwrap();
        let b = Image::zeros(1, 1, 256).unwrap();
        assert!(Corpus::new(vec![a, b], None).is_err());
    }

    #[test]
    fn multi_component_requires_same_dims() {
        let a = Image::zeros(1, 2, 256).unwrap();
        let b = Image::zeros(2, 1, 256).unwrap();
        assert!(MultiComponentImage::new(vec![a, b], vec!["R".into(), "G".into()]).is_err());
        assert!(MultiComponentImage::new(vec![], vec![]).is_err());
    }
}
