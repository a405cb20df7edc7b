// Per-element layout for ε < 1/(2W): each position keeps a small counter of
// threshold units, and the carry keeps the rounding error from piling up.
//
// $ cargo run --example sum_small_eps
use window_sketch::{Rational, SumParams, SumSketch, Variant};

fn main() -> window_sketch::Result<()> {
    let params = SumParams::derive(4, 100, Rational::new(1, 64))?;
    let Variant::SmallEps {
        cell_max,
        cell_width,
    } = params.variant()
    else {
        unreachable!("ε < 1/(2W) selects the per-element layout");
    };
    println!(
        "rho = {}, k = {}, cells in [0, {cell_max}] ({cell_width} bits each)",
        params.rho(),
        params.blocks()
    );

    let mut sketch = SumSketch::new(params);
    println!("start        query {}", sketch.query());
    for x in [37, 100, 0, 64, 99, 1] {
        sketch.add(x)?;
        let cells: Vec<u64> = sketch.cell_values().collect();
        println!(
            "add {x:>3}  cells {cells:?}  carry {:<6} query {}",
            sketch.remainder_value(),
            sketch.query()
        );
    }

    // below 1/(2RW) an exact window is cheaper; derive refuses
    match SumParams::derive(4, 100, Rational::new(1, 1000)) {
        Err(e) => println!("eps = 1/1000: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
