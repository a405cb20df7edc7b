// Packs sketch state into exactly `packed_bits` bits and restores it.
//
// $ cargo run --example serialization
use window_sketch::streams::{gen_bernoulli, gen_uniform};
use window_sketch::{CountParams, CountSketch, Packed, Rational, SumParams, SumSketch};

fn main() -> window_sketch::Result<()> {
    let params = CountParams::derive(1024, Rational::new(1, 64))?;
    let mut counter = CountSketch::new(params);
    for bit in gen_bernoulli(0.3, 5000, 1) {
        counter.add(bit)?;
    }
    let packed = counter.to_packed();
    println!(
        "counter: {} bits in {} bytes",
        packed.bit_len(),
        packed.bytes().len()
    );

    // ship the bytes somewhere, rebuild with the same params
    let restored = CountSketch::from_packed(
        params,
        &Packed::from_bytes(packed.bytes().to_vec(), packed.bit_len())?,
    )?;
    assert_eq!(restored.query(), counter.query());

    let params = SumParams::derive(16, 1000, Rational::new(1, 100))?;
    let mut summer = SumSketch::new(params);
    for x in gen_uniform(1000, 100, 2) {
        summer.add(x)?;
    }
    let packed = summer.to_packed();
    println!(
        "summer:  {} bits ({} state + {} for the exact denominator)",
        packed.bit_len(),
        summer.packed_bits(),
        params.denominator_overhead_bits()
    );
    let restored = SumSketch::from_packed(params, &packed)?;
    assert_eq!(restored, summer);
    println!("query {} survives the round trip", restored.query());
    Ok(())
}
