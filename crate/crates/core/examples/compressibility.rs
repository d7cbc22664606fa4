//! Compressibility indicator values: the curve itself, then the mean value
//! of each Fashion-MNIST class next to the per-image report of one image.

use softcodec::analysis::{cif_curve, image_report};
use softcodec::bench::mean_civ;
use softcodec::datasets::{data_dir, fashion_splits};
use softcodec::info::civ;

fn main() -> softcodec::Result<()> {
    println!("p      C(p)");
    for (p, c) in cif_curve().into_iter().step_by(100) {
        println!("{p:.1}  {c:8.4}");
    }
    println!("0.99  {:8.4}", civ(0.99)?);

    let splits = fashion_splits(&data_dir(), 0, 200)?;
    println!("\nclass  mean CIV");
    for s in &splits {
        println!("{:>5}  {:.3}", s.label, mean_civ(&s.test));
    }

    let r = image_report(&splits[8].test.images()[0], None)?;
    println!(
        "\nfirst bag image: p0={:.3} H(X)={:.3} H(P)={:.3} H(Y)={:.3} CIV={:.3}",
        r.p0,
        r.entropy_x,
        r.entropy_p,
        r.entropy_y.unwrap_or(0.0),
        r.civ
    );
    Ok(())
}
