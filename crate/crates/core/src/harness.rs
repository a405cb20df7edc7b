//! Runs a sketch next to the exact oracle and summarizes the error.

use num_traits::{Signed, Zero};
use serde_json::{Map, Value};

use crate::bounds::{self, MemoryReport};
use crate::count::CountSketch;
use crate::error::{Error, Result};
use crate::numeric::{format_decimal, Rational};
use crate::oracle::ExactWindow;
use crate::sum::SumSketch;

/// Common surface of the sliding-window sketches.
pub trait WindowSketch {
    fn window(&self) -> u64;
    /// Largest admissible element (1 for bit streams).
    fn range(&self) -> u64;
    fn insert(&mut self, x: u64) -> Result<()>;
    fn estimate(&self) -> Rational;
    /// Guaranteed additive error.
    fn error_bound(&self) -> Rational;
    fn packed_bits(&self) -> u64;
    fn memory_report(&self) -> MemoryReport;

    /// Estimate clamped to `[0, W·R]`, which only moves it closer to the truth.
    fn estimate_clamped(&self) -> Rational {
        let max = Rational::from_integer(self.window() as i128 * self.range() as i128);
        self.estimate().max(Rational::zero()).min(max)
    }
}

impl WindowSketch for CountSketch {
    fn window(&self) -> u64 {
        self.params().window()
    }

    fn range(&self) -> u64 {
        1
    }

    fn insert(&mut self, x: u64) -> Result<()> {
        self.add(x)
    }

    fn estimate(&self) -> Rational {
        self.query()
    }

    fn error_bound(&self) -> Rational {
        self.params().error_bound()
    }

    fn packed_bits(&self) -> u64 {
        CountSketch::packed_bits(self)
    }

    fn memory_report(&self) -> MemoryReport {
        let p = self.params();
        let lower = match bounds::count_lower_bound(p.window(), p.epsilon()) {
            Ok(bits) => bits,
            Err(_) => bounds::block_language_bound(p.window(), p.epsilon()),
        };
        MemoryReport::new(
            CountSketch::packed_bits(self),
            0,
            bounds::count_upper_theory(p.window(), p.epsilon()),
            lower as f64,
        )
    }
}

impl WindowSketch for SumSketch {
    fn window(&self) -> u64 {
        self.params().window()
    }

    fn range(&self) -> u64 {
        self.params().range()
    }

    fn insert(&mut self, x: u64) -> Result<()> {
        self.add(x)
    }

    fn estimate(&self) -> Rational {
        self.query()
    }

    fn error_bound(&self) -> Rational {
        self.params().error_bound()
    }

    fn packed_bits(&self) -> u64 {
        SumSketch::packed_bits(self)
    }

    fn memory_report(&self) -> MemoryReport {
        let p = self.params();
        let upper = if p.is_large_eps() {
            bounds::additive_state_bits(p.window(), p.epsilon())
        } else {
            bounds::succinct_bound(p.window(), p.epsilon())
                .unwrap_or_else(|_| bounds::additive_state_bits(p.window(), p.epsilon()))
        };
        let lower = bounds::sum_lower_bound(p.window(), p.range(), p.epsilon()).unwrap_or(0.0);
        MemoryReport::new(
            SumSketch::packed_bits(self),
            p.denominator_overhead_bits(),
            upper,
            lower,
        )
    }
}

/// Error statistics of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorReport {
    pub steps: u64,
    pub queries: u64,
    pub max_abs_error: Rational,
    /// Mean of `|estimate - exact|` over the queries.
    pub mean_error: Rational,
    pub bound: Rational,
    /// Queries whose absolute error exceeded `bound`.
    pub violations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    /// Compare against the oracle after every `query_every` elements.
    pub query_every: u64,
    /// Clamp estimates to `[0, W·R]` before comparing.
    pub clamp: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            query_every: 1,
            clamp: false,
        }
    }
}

/// Feeds `stream` to `sketch` and to an exact window, comparing every
/// `query_every` steps in exact arithmetic.
pub fn evaluate<S, I>(sketch: &mut S, stream: I, query_every: u64) -> Result<ErrorReport>
where
    S: WindowSketch + ?Sized,
    I: IntoIterator<Item = u64>,
{
    evaluate_with(
        sketch,
        stream,
        EvalOptions {
            query_every,
            clamp: false,
        },
    )
}

pub fn evaluate_with<S, I>(sketch: &mut S, stream: I, options: EvalOptions) -> Result<ErrorReport>
where
    S: WindowSketch + ?Sized,
    I: IntoIterator<Item = u64>,
{
    if options.query_every == 0 {
        return Err(Error::Precondition("query_every must be at least 1"));
    }
    let bound = sketch.error_bound();
    let mut oracle = ExactWindow::new(sketch.window());
    let mut steps = 0u64;
    let mut queries = 0u64;
    let mut violations = 0u64;
    let mut max_abs_error = Rational::zero();
    let mut error_sum = Rational::zero();

    for x in stream {
        if x > sketch.range() {
            return Err(Error::OutOfRange {
                value: x,
                max: sketch.range(),
            });
        }
        sketch.insert(x)?;
        oracle.push(x);
        steps += 1;
        if !steps.is_multiple_of(options.query_every) {
            continue;
        }
        let estimate = if options.clamp {
            sketch.estimate_clamped()
        } else {
            sketch.estimate()
        };
        let error = (estimate - Rational::from_integer(oracle.exact() as i128)).abs();
        queries += 1;
        if error > bound {
            violations += 1;
        }
        if error > max_abs_error {
            max_abs_error = error;
        }
        error_sum += error;
    }

    let mean_error = if queries == 0 {
        Rational::zero()
    } else {
        error_sum / queries as i128
    };
    Ok(ErrorReport {
        steps,
        queries,
        max_abs_error,
        mean_error,
        bound,
        violations,
    })
}

/// Memory accounting for a sketch.
pub fn memory_report<S: WindowSketch + ?Sized>(sketch: &S) -> MemoryReport {
    sketch.memory_report()
}

const DIGITS: usize = 15;

fn put_rational(map: &mut Map<String, Value>, key: &str, q: Rational) {
    map.insert(key.into(), Value::String(format_decimal(q, DIGITS)));
    map.insert(format!("{key}_num"), int_value(*q.numer()));
    map.insert(format!("{key}_den"), int_value(*q.denom()));
}

fn int_value(v: i128) -> Value {
    match i64::try_from(v) {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(v.to_string()),
    }
}

fn float_value(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

impl ErrorReport {
    pub fn write_json(&self, map: &mut Map<String, Value>) {
        map.insert("steps".into(), Value::from(self.steps));
        map.insert("queries".into(), Value::from(self.queries));
        put_rational(map, "max_abs_error", self.max_abs_error);
        put_rational(map, "mean_error", self.mean_error);
        put_rational(map, "bound", self.bound);
        map.insert("violations".into(), Value::from(self.violations));
    }
}

impl MemoryReport {
    pub fn write_json(&self, map: &mut Map<String, Value>) {
        map.insert(
            "actual_state_bits".into(),
            Value::from(self.actual_state_bits),
        );
        map.insert(
            "denominator_overhead_bits".into(),
            Value::from(self.denominator_overhead_bits),
        );
        map.insert(
            "theoretical_upper_bits".into(),
            float_value(self.theoretical_upper_bits),
        );
        map.insert(
            "lower_bound_bits".into(),
            float_value(self.lower_bound_bits),
        );
        map.insert("ratio".into(), self.ratio.map_or(Value::Null, float_value));
    }
}

/// Flat JSON object combining both reports.
pub fn report_json(errors: &ErrorReport, memory: &MemoryReport) -> Value {
    let mut map = Map::new();
    errors.write_json(&mut map);
    memory.write_json(&mut map);
    Value::Object(map)
}

/// `key: value` lines, same keys as the JSON report.
pub fn report_text(report: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(map) = report {
        for (key, value) in map {
            let rendered = match value {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{key}: {rendered}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::CountParams;
    use crate::sum::SumParams;

    fn eps(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn count_w4_all_ones() {
        let mut sk = CountSketch::new(CountParams::derive(4, eps(1, 4)).unwrap());
        let report = evaluate(&mut sk, [1, 1, 1, 1], 1).unwrap();
        assert_eq!(report.steps, 4);
        assert_eq!(report.queries, 4);
        assert_eq!(report.max_abs_error, Rational::from_integer(1));
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn zero_stream_error_is_the_initial_bias() {
        let mut sk = CountSketch::new(CountParams::derive(64, eps(1, 8)).unwrap());
        let report = evaluate(&mut sk, vec![0; 300], 1).unwrap();
        // W/(2k) = 64/8
        assert_eq!(report.max_abs_error, Rational::from_integer(8));
        assert_eq!(report.violations, 0);

        let params = SumParams::derive(64, 255, eps(1, 4)).unwrap();
        let mut sk = SumSketch::new(params);
        let report = evaluate(&mut sk, vec![0; 300], 1).unwrap();
        let bias = Rational::new(64 * 255, 2 * params.blocks() as i128);
        assert_eq!(report.max_abs_error, bias);
        assert_eq!(report.mean_error, bias);
    }

    #[test]
    fn small_eps_single_element() {
        let mut sk = SumSketch::new(SumParams::derive(2, 4, eps(1, 8)).unwrap());
        let report = evaluate(&mut sk, [3], 1).unwrap();
        assert_eq!(report.max_abs_error, eps(2, 3));
        assert_eq!(report.bound, Rational::from_integer(1));
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn query_every_and_errors() {
        let mut sk = CountSketch::new(CountParams::derive(8, eps(1, 4)).unwrap());
        let report = evaluate(&mut sk, vec![1; 10], 3).unwrap();
        assert_eq!((report.steps, report.queries), (10, 3));
        assert!(evaluate(&mut sk, [1], 0).is_err());
        assert_eq!(
            evaluate(&mut sk, [2], 1),
            Err(Error::OutOfRange { value: 2, max: 1 })
        );
    }

    #[test]
    fn clamping_never_increases_error() {
        let params = CountParams::derive(16, eps(1, 4)).unwrap();
        let stream: Vec<u64> = (0..100).map(|i| (i % 7 == 0) as u64).collect();
        let raw = evaluate(&mut CountSketch::new(params), stream.clone(), 1).unwrap();
        let clamped = evaluate_with(
            &mut CountSketch::new(params),
            stream,
            EvalOptions {
                query_every: 1,
                clamp: true,
            },
        )
        .unwrap();
        assert!(clamped.max_abs_error <= raw.max_abs_error);
        assert!(clamped.mean_error <= raw.mean_error);
    }

    #[test]
    fn json_is_flat_with_exact_fields() {
        let mut sk = SumSketch::new(SumParams::derive(2, 4, eps(1, 8)).unwrap());
        let errors = evaluate(&mut sk, [3], 1).unwrap();
        let json = report_json(&errors, &sk.memory_report());
        assert_eq!(json["max_abs_error"], "0.666666666666667");
        assert_eq!(json["max_abs_error_num"], 2);
        assert_eq!(json["max_abs_error_den"], 3);
        assert_eq!(json["violations"], 0);
        assert_eq!(json["actual_state_bits"], 12);
        assert!(json
            .as_object()
            .unwrap()
            .values()
            .all(|v| !v.is_object() && !v.is_array()));
        assert!(report_text(&json).contains("violations: 0\n"));
    }

    #[test]
    fn memory_report_count() {
        let sk = CountSketch::new(CountParams::derive(1024, eps(1, 64)).unwrap());
        let m = memory_report(&sk);
        assert_eq!(m.actual_state_bits, 54);
        assert_eq!(m.lower_bound_bits, 31.0);
        assert!((m.theoretical_upper_bits - 58.0).abs() < 1e-9);
        // ε = 1/2 falls back to the block-language bound
        let sk = CountSketch::new(CountParams::derive(64, eps(1, 2)).unwrap());
        assert_eq!(memory_report(&sk).lower_bound_bits, 0.0);
        assert_eq!(memory_report(&sk).ratio, None);
    }
}
