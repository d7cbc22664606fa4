//! Reversible preprocessing: median edge prediction, signed-to-unsigned
//! residual mapping and the quotient/remainder layer split.

use crate::error::{Error, Result};
use crate::image::{Image, ResidualPlane};

/// Median edge predictor over the left, upper and upper-left neighbours.
/// Neighbours outside the image read as zero.
#[inline]
pub fn med_predict(left: i32, up: i32, up_left: i32) -> i32 {
    let (lo, hi) = if left < up { (left, up) } else { (up, left) };
    if up_left >= hi {
        lo
    } else if up_left <= lo {
        hi
    } else {
        left + up - up_left
    }
}

/// Fold a signed prediction error onto the nonnegative integers:
/// `e >= 0 -> 2e`, `e < 0 -> -2e - 1`.
#[inline]
pub fn map_error(e: i32) -> u32 {
    if e >= 0 {
        (2 * e) as u32
    } else {
        (-2 * e - 1) as u32
    }
}

#[inline]
pub fn unmap_error(v: u32) -> i32 {
    if v.is_multiple_of(2) {
        (v / 2) as i32
    } else {
        -(v.div_ceil(2) as i32)
    }
}

#[inline]
fn neighbours(px: &[i32], width: usize, row: usize, col: usize) -> (i32, i32, i32) {
    let left = if col > 0 { px[row * width + col - 1] } else { 0 };
    let up = if row > 0 { px[(row - 1) * width + col] } else { 0 };
    let up_left = if row > 0 && col > 0 { px[(row - 1) * width + col - 1] } else { 0 };
    (left, up, up_left)
}

#[inline]
fn prediction(px: &[i32], width: usize, row: usize, col: usize, max: i32) -> i32 {
    let (l, u, ul) = neighbours(px, width, row, col);
    // the gradient branch only fires strictly between min and max, so this
    // clamp never changes a value; it pins the residual range regardless
    med_predict(l, u, ul).clamp(0, max)
}

/// Mapped prediction residuals, values in `[0, 2D - 2]`.
pub fn predict(img: &Image) -> ResidualPlane {
    let (h, w) = (img.height(), img.width());
    let max = img.depth_levels() as i32 - 1;
    let px: Vec<i32> = img.pixels().iter().map(|&v| i32::from(v)).collect();
    let mut out = Vec::with_capacity(h * w);
    for row in 0..h {
        for col in 0..w {
            let p = prediction(&px, w, row, col, max);
            out.push(map_error(px[row * w + col] - p));
        }
    }
    ResidualPlane::new(h, w, out).expect("dimensions match")
}

/// Invert [`predict`]. A residual that reconstructs a pixel outside
/// `[0, D - 1]` means the plane is damaged.
pub fn unpredict(plane: &ResidualPlane, depth_levels: u32) -> Result<Image> {
    let (h, w) = (plane.height(), plane.width());
    let max = depth_levels as i32 - 1;
    let limit = 2 * depth_levels - 2;
    let mut px = vec![0i32; h * w];
    for row in 0..h {
        for col in 0..w {
            let v = plane.values()[row * w + col];
            if v > limit {
                return Err(Error::corrupt(format!("residual {v} at ({row}, {col}) exceeds {limit}")));
            }
            let value = prediction(&px, w, row, col, max) + unmap_error(v);
            if !(0..=max).contains(&value) {
                return Err(Error::corrupt(format!("reconstructed pixel {value} at ({row}, {col}) out of range")));
            }
            px[row * w + col] = value;
        }
    }
    Image::new(h, w, depth_levels, px.into_iter().map(|v| v as u16).collect())
}

/// Quotient (shape) and remainder (detail) planes of a residual plane under `2^l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerPair {
    pub shape_layer: ResidualPlane,
    pub detail_layer: ResidualPlane,
    pub interface: u8,
}

pub fn split_layers(plane: &ResidualPlane, interface: u8) -> Result<LayerPair> {
    if interface >= 32 {
        return Err(Error::domain(format!("layer interface {interface} too large")));
    }
    let mask = (1u32 << interface) - 1;
    let (h, w) = (plane.height(), plane.width());
    let shape = plane.values().iter().map(|&v| v >> interface).collect();
    let detail = plane.values().iter().map(|&v| v & mask).collect();
    Ok(LayerPair {
        shape_layer: ResidualPlane::new(h, w, shape)?,
        detail_layer: ResidualPlane::new(h, w, detail)?,
        interface,
    })
}

pub fn merge_layers(pair: &LayerPair) -> Result<ResidualPlane> {
    let (s, d) = (&pair.shape_layer, &pair.detail_layer);
    if s.height() != d.height() || s.width() != d.width() {
        return Err(Error::usage("layer dimensions differ"));
    }
    if pair.interface >= 32 {
        return Err(Error::domain(format!("layer interface {} too large", pair.interface)));
    }
    let l = pair.interface;
    let values = s
        .values()
        .iter()
        .zip(d.values())
        .map(|(&a, &b)| {
            if b >> l != 0 {
                return Err(Error::corrupt(format!("detail value {b} needs more than {l} bits")));
            }
            a.checked_shl(u32::from(l))
                .filter(|v| v >> l == a)
                .map(|v| v | b)
                .ok_or_else(|| Error::corrupt("merged residual overflows"))
        })
        .collect::<Result<Vec<_>>>()?;
    ResidualPlane::new(s.height(), s.width(), values)
}

/// Largest value the shape layer can hold for depth `D` and interface `l`.
/// Two-level images bypass prediction, so their shape layer is the pixel plane.
pub fn max_shape_value(depth_levels: u32, interface: u8) -> u32 {
    if depth_levels == 2 {
        1
    } else {
        (2 * depth_levels - 2) >> interface
    }
}

/// Layers of an image as seen by the codec, plus whether a two-level image
/// was inverted so that zero is its majority value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub layers: LayerPair,
    pub inverted: bool,
}

/// Gray images are predicted, mapped and split at `interface`. Two-level
/// images skip prediction: the (possibly inverted) pixel plane is the shape
/// layer and the interface must be 0.
pub fn decompose(img: &Image, interface: u8) -> Result<Decomposition> {
    let (h, w) = (img.height(), img.width());
    if img.depth_levels() == 2 {
        if interface != 0 {
            return Err(Error::usage("two-level images use layer interface 0"));
        }
        let ones = img.pixels().iter().filter(|&&v| v != 0).count();
        let inverted = 2 * ones > img.len();
        let values = img.pixels().iter().map(|&v| u32::from((v != 0) != inverted)).collect();
        let layers = LayerPair {
            shape_layer: ResidualPlane::new(h, w, values)?,
            detail_layer: ResidualPlane::zeros(h, w),
            interface: 0,
        };
        return Ok(Decomposition { layers, inverted });
    }
    check_interface(img.depth_levels(), interface)?;
    let layers = split_layers(&predict(img), interface)?;
    Ok(Decomposition { layers, inverted: false })
}

/// Inverse of [`decompose`].
pub fn recompose(layers: &LayerPair, inverted: bool, depth_levels: u32) -> Result<Image> {
    let (h, w) = (layers.shape_layer.height(), layers.shape_layer.width());
    if depth_levels == 2 {
        let pixels = layers
            .shape_layer
            .values()
            .iter()
            .map(|&v| match v {
                0 | 1 => Ok(u16::from((v == 1) != inverted)),
                _ => Err(Error::corrupt(format!("two-level shape layer holds {v}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        return Image::new(h, w, 2, pixels);
    }
    if inverted {
        return Err(Error::corrupt("inversion flag set on a gray frame"));
    }
    unpredict(&merge_layers(layers)?, depth_levels)
}

/// Interfaces accepted for a depth: `[0, ceil(log2 D)]`, and large enough
/// that shape-layer values fit in 16 bits.
pub fn check_interface(depth_levels: u32, interface: u8) -> Result<()> {
    let max = if depth_levels == 2 { 0 } else { crate::image::ceil_log2(depth_levels) };
    if u32::from(interface) > max {
        return Err(Error::usage(format!("layer interface {interface} outside [0, {max}] for depth {depth_levels}")));
    }
    if max_shape_value(depth_levels, interface) > u32::from(u16::MAX) {
        return Err(Error::usage(format!("depth {depth_levels} needs a layer interface of at least 1")));
    }
    Ok(())
}
