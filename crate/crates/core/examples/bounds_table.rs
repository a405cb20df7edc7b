// Lower and upper memory bounds next to the actual counter state.
//
// $ cargo run --example bounds_table
use window_sketch::bounds::{
    count_lower_bound, count_upper_theory, succinct_bound, sum_lower_bound,
};
use window_sketch::{CountParams, CountSketch, Rational};

fn main() -> window_sketch::Result<()> {
    println!(
        "{:>6} {:>6} {:>7} {:>7} {:>7} {:>6}",
        "W", "eps", "lower", "actual", "upper", "ratio"
    );
    for w in [64u64, 1024, 1 << 16] {
        for d in [4i128, 16, 64] {
            let eps = Rational::new(1, d);
            let lower = count_lower_bound(w, eps)?;
            let actual = CountSketch::new(CountParams::derive(w, eps)?).packed_bits();
            println!(
                "{w:>6} {:>6} {lower:>7} {actual:>7} {:>7.1} {:>6.2}",
                eps.to_string(),
                count_upper_theory(w, eps),
                actual as f64 / lower as f64
            );
        }
    }

    println!();
    for (w, d) in [(10u64, 400i128), (16, 64), (256, 4096)] {
        let eps = Rational::new(1, d);
        println!(
            "sum W = {w}, eps = 1/{d}: lower {:.2} bits, per-element layout {:.2} bits",
            sum_lower_bound(w, 1000, eps)?,
            succinct_bound(w, eps)?
        );
    }
    Ok(())
}
