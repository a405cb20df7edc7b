// Runs the counter over every word of the block language for a small window
// and reports the worst error. These are the inputs the lower bound is
// built from, so they sit right at the edge of what the sketch can tell apart.
//
// $ cargo run --example adversarial_streams
use window_sketch::harness::evaluate;
use window_sketch::streams::{
    gen_block_language, language_block_count, language_block_size, pad_zeros,
};
use window_sketch::{CountParams, CountSketch, Rational};

fn main() -> window_sketch::Result<()> {
    let (w, eps) = (256u64, Rational::new(1, 32));
    let params = CountParams::derive(w, eps)?;
    let z = language_block_count(w, eps);
    println!(
        "W = {w}, eps = {eps}: {z} runs of {} bits, sketch has {} blocks",
        language_block_size(w, eps),
        params.blocks()
    );

    let mut worst = Rational::from_integer(0);
    let mut violations = 0;
    for mask in 0..1u64 << z {
        let pattern: Vec<bool> = (0..z).map(|i| mask >> i & 1 == 1).collect();
        let word = pad_zeros(gen_block_language(w, eps, &pattern)?, w);
        let report = evaluate(&mut CountSketch::new(params), word, 1)?;
        worst = worst.max(report.max_abs_error);
        violations += report.violations;
    }
    println!(
        "{} words: worst |err| = {worst}, bound = {}, violations = {violations}",
        1u64 << z,
        params.error_bound()
    );
    Ok(())
}
