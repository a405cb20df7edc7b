//! Additive-error sliding-window sketches.
//!
//! The crate maintains approximate answers to two sliding-window problems
//! over the last `W` stream elements:
//!
//! * **Basic counting** ([`CountSketch`]): the number of ones in a bit stream,
//!   within an additive error of `W·ε`, using about `1/(2ε) + 2·log2 W` bits.
//! * **Basic summing** ([`SumSketch`]): the sum of integers in `[0, R]`,
//!   within `R·W·ε`. Large `ε` uses a block algorithm whose state does not
//!   depend on `R`; small `ε` (below roughly `1/(2W)`) switches to a succinct
//!   per-element layout.
//!
//! Both sketches take constant time per update and per query. Remainders are
//! kept as exact scaled integers, so queries are exact rationals and can be
//! compared against the [`ExactWindow`] oracle without floating-point slack.
//!
//! ```
//! use window_sketch::{CountParams, CountSketch, Rational};
//!
//! let params = CountParams::derive(64, Rational::new(1, 8)).unwrap();
//! let mut sketch = CountSketch::new(params);
//! for bit in [1, 0, 1, 1] {
//!     sketch.add(bit).unwrap();
//! }
//! let error = sketch.query() - Rational::from_integer(3);
//! let bound = sketch.params().error_bound();
//! assert!(-bound <= error && error <= bound);
//! ```

pub mod bounds;
pub mod cli;
pub mod count;
mod error;
pub mod harness;
pub mod numeric;
pub mod oracle;
mod packing;
pub mod steps;
pub mod streams;
pub mod sum;

pub use bounds::MemoryReport;
pub use count::{CountParams, CountSketch};
pub use error::{Error, Result};
pub use harness::{ErrorReport, WindowSketch};
pub use numeric::{Rational, Scale, ScaledValue};
pub use oracle::ExactWindow;
pub use packing::Packed;
pub use sum::{SumParams, SumSketch, Variant};
