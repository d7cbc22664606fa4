//! Walk one small image through prediction, residual mapping and the
//! shape/detail split, then put it back together.

use softcodec::transform::{decompose, predict, recompose};
use softcodec::Image;

fn print_plane(name: &str, rows: usize, cols: usize, get: impl Fn(usize, usize) -> u32) {
    println!("{name}:");
    for r in 0..rows {
        let line: Vec<String> = (0..cols).map(|c| format!("{:4}", get(r, c))).collect();
        println!("  {}", line.join(""));
    }
}

fn main() -> softcodec::Result<()> {
    let img = Image::from_rows(
        256,
        &[
            [0u16, 0, 0, 0, 0, 0],
            [0, 12, 40, 41, 13, 0],
            [0, 40, 200, 201, 42, 0],
            [0, 41, 201, 203, 40, 0],
            [0, 13, 42, 40, 12, 0],
        ],
    )?;
    print_plane("pixels", img.height(), img.width(), |r, c| u32::from(img.get(r, c)));

    let residuals = predict(&img);
    print_plane("mapped residuals", residuals.height(), residuals.width(), |r, c| residuals.get(r, c));

    for l in [0u8, 3, 6] {
        let d = decompose(&img, l)?;
        let shape = &d.layers.shape_layer;
        println!(
            "\ninterface {l}: {} nonzero shape cells, max shape value {}",
            shape.count_nonzero(),
            shape.max_value()
        );
        print_plane("shape layer", shape.height(), shape.width(), |r, c| shape.get(r, c));
        assert_eq!(recompose(&d.layers, d.inverted, img.depth_levels())?, img);
    }
    println!("\nevery split recomposes to the original image");
    Ok(())
}
