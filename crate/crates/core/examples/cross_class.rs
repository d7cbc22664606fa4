//! One codebook per Fashion-MNIST class, each tested on every class. Rows
//! are codebooks, columns are test classes.

use softcodec::bench::per_class_matrix;
use softcodec::datasets::{data_dir, fashion_splits};
use softcodec::train::TrainConfig;

fn main() -> softcodec::Result<()> {
    let splits = fashion_splits(&data_dir(), 1000, 200)?;
    let m = per_class_matrix(&splits, &TrainConfig::default())?;
    print!("{}", m.render());
    println!("own codebook is at least the column mean in {}/10 columns", m.diagonal_wins());
    Ok(())
}
