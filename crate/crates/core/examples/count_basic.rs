// Count ones over the last W bits with W·ε additive error.
//
// $ cargo run --example count_basic
use window_sketch::numeric::format_decimal;
use window_sketch::streams::gen_bernoulli;
use window_sketch::{CountParams, CountSketch, ExactWindow, Rational};

fn main() -> window_sketch::Result<()> {
    let params = CountParams::derive(1000, Rational::new(1, 50))?;
    println!(
        "W = {}, eps = {}: k = {} blocks of {} bits, error <= {}",
        params.window(),
        params.epsilon(),
        params.blocks(),
        params.block_size(),
        params.error_bound()
    );

    let mut sketch = CountSketch::new(params);
    let mut exact = ExactWindow::new(params.window());
    // density ramps from 10% to 90% and back
    for (phase, p) in [0.1, 0.5, 0.9, 0.5, 0.1].into_iter().enumerate() {
        for bit in gen_bernoulli(p, 700, phase as u64) {
            sketch.add(bit)?;
            exact.push(bit);
        }
        println!(
            "p = {p:.1}  estimate {:>8}  exact {:>4}",
            format_decimal(sketch.query(), 1),
            exact.exact()
        );
    }
    println!("state: {} bits", sketch.packed_bits());
    Ok(())
}
