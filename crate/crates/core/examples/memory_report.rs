// Memory report and error summary as JSON, the same shape the CLI prints.
//
// $ cargo run --example memory_report
use window_sketch::harness::{evaluate, report_json};
use window_sketch::streams::gen_uniform;
use window_sketch::{Rational, SumParams, SumSketch, WindowSketch};

fn main() -> window_sketch::Result<()> {
    for eps in [Rational::new(1, 8), Rational::new(1, 256)] {
        let mut sketch = SumSketch::new(SumParams::derive(64, 1500, eps)?);
        let errors = evaluate(&mut sketch, gen_uniform(1500, 1000, 42), 10)?;
        let report = report_json(&errors, &sketch.memory_report());
        println!(
            "eps = {eps}\n{}",
            serde_json::to_string_pretty(&report).unwrap()
        );
    }
    Ok(())
}
