// Sliding-window sum of values in [0, R] with the block layout; state size
// does not depend on R.
//
// $ cargo run --example sum_large_eps
use window_sketch::numeric::format_decimal;
use window_sketch::streams::gen_uniform;
use window_sketch::{ExactWindow, Rational, SumParams, SumSketch};

fn main() -> window_sketch::Result<()> {
    let (window, epsilon) = (4096, Rational::new(1, 32));
    for range in [1, 255, 65_535, 1_000_000] {
        let params = SumParams::derive(window, range, epsilon)?;
        let mut sketch = SumSketch::new(params);
        let mut exact = ExactWindow::new(window);
        for x in gen_uniform(range, 3 * window as usize, range) {
            sketch.add(x)?;
            exact.push(x);
        }
        let err = sketch.query() - Rational::from_integer(exact.exact() as i128);
        println!(
            "R = {range:>9}: rho = {}, k = {}, {} bits, err {} (bound {})",
            params.rho(),
            params.blocks(),
            sketch.packed_bits(),
            format_decimal(err, 3),
            format_decimal(params.error_bound(), 3),
        );
    }
    Ok(())
}
