//! Workload generation and the line-oriented stream text format.
//!
//! Besides seeded random streams this module builds words of the two
//! adversarial languages used by the memory lower bounds:
//!
//! * the block language: `z = floor(W / floor(2Wε+1))` runs of
//!   `floor(2Wε+1)` identical bits, each run all ones or all zeros;
//! * the summing language: `W` letters drawn from the multiples
//!   `{0, x, 2x, …}` of `x = floor(2RWε + 1)`, up to
//!   `floor(1/(2Wε + 1/R))` multiples.
//!
//! Two words of either language that differ in their last differing block
//! (letter) have window totals more than twice the error bound apart once
//! the difference is the oldest thing in the window, which is what makes
//! them good stress inputs.
//!
//! Random streams use Marsaglia's xorshift128 ([`rand_xorshift::XorShiftRng`])
//! seeded through `SeedableRng::seed_from_u64`. A Bernoulli(p) bit is 1 when
//! the top 53 bits of the next `u64` are below `p·2^53`; a uniform value in
//! `[0, R]` is `(next_u64 · (R+1)) >> 64`.

use std::io::BufRead;
use std::path::PathBuf;

use num_traits::ToPrimitive;
use rand_core::{RngCore, SeedableRng};
use rand_xorshift::XorShiftRng;

use crate::error::{Error, Result};
use crate::numeric::Rational;

/// Length of one run of the block language, `floor(2Wε + 1)`.
pub fn language_block_size(window: u64, epsilon: Rational) -> u64 {
    (epsilon * 2 * window as i128 + 1).floor().to_integer() as u64
}

/// Number of runs `z` in a block-language word.
pub fn language_block_count(window: u64, epsilon: Rational) -> u64 {
    window / language_block_size(window, epsilon).max(1)
}

/// Expands `pattern` (one entry per run) into a block-language word.
pub fn gen_block_language(window: u64, epsilon: Rational, pattern: &[bool]) -> Result<Vec<u64>> {
    let expected = language_block_count(window, epsilon);
    if pattern.len() as u64 != expected {
        return Err(Error::PatternLength {
            expected,
            got: pattern.len() as u64,
        });
    }
    let run = language_block_size(window, epsilon) as usize;
    Ok(pattern
        .iter()
        .flat_map(|&bit| std::iter::repeat_n(bit as u64, run))
        .collect())
}

/// The summing language's alphabet: letters are `n · step` for `n < size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SumAlphabet {
    pub step: u64,
    pub size: u64,
}

impl SumAlphabet {
    pub fn new(window: u64, range: u64, epsilon: Rational) -> Self {
        let (w, r) = (window as i128, range as i128);
        let step = (epsilon * 2 * r * w + 1).floor().to_integer() as u64;
        let multiples = (epsilon * 2 * w + Rational::new(1, r))
            .recip()
            .floor()
            .to_integer() as u64;
        Self {
            step,
            size: multiples + 1,
        }
    }

    pub fn letter(&self, index: u64) -> Result<u64> {
        if index >= self.size {
            return Err(Error::LetterOutOfRange {
                index,
                size: self.size,
            });
        }
        Ok(index * self.step)
    }

    pub fn letters(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.size).map(|n| n * self.step)
    }
}

/// Maps `W` letter indices to their values in the summing language.
pub fn gen_sum_language(
    window: u64,
    range: u64,
    epsilon: Rational,
    letters: &[u64],
) -> Result<Vec<u64>> {
    if letters.len() as u64 != window {
        return Err(Error::PatternLength {
            expected: window,
            got: letters.len() as u64,
        });
    }
    let alphabet = SumAlphabet::new(window, range, epsilon);
    letters
        .iter()
        .map(|&n| {
            let value = alphabet.letter(n)?;
            if value > range {
                return Err(Error::OutOfRange { value, max: range });
            }
            Ok(value)
        })
        .collect()
}

fn rng(seed: u64) -> XorShiftRng {
    XorShiftRng::seed_from_u64(seed)
}

/// `n` Bernoulli(p) bits.
pub fn gen_bernoulli(p: f64, n: usize, seed: u64) -> Vec<u64> {
    let p = p.clamp(0.0, 1.0);
    let threshold = (p * (1u64 << 53) as f64) as u64;
    let mut rng = rng(seed);
    (0..n)
        .map(|_| ((rng.next_u64() >> 11) < threshold) as u64)
        .collect()
}

/// `n` integers uniform in `[0, range]`.
pub fn gen_uniform(range: u64, n: usize, seed: u64) -> Vec<u64> {
    let mut rng = rng(seed);
    let span = range as u128 + 1;
    (0..n)
        .map(|_| ((rng.next_u64() as u128 * span) >> 64) as u64)
        .collect()
}

/// Random index sequences for the adversarial languages.
pub struct LanguageSampler {
    rng: XorShiftRng,
}

impl LanguageSampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: rng(seed) }
    }

    /// A uniformly random run pattern of length `z`.
    pub fn pattern(&mut self, z: u64) -> Vec<bool> {
        (0..z).map(|_| self.rng.next_u64() >> 63 == 1).collect()
    }

    /// `len` letter indices uniform in `[0, size)`.
    pub fn letters(&mut self, size: u64, len: u64) -> Vec<u64> {
        (0..len)
            .map(|_| ((self.rng.next_u64() as u128 * size as u128) >> 64) as u64)
            .collect()
    }
}

/// Declarative description of a workload.
#[derive(Debug, Clone, PartialEq)]
pub enum StreamKind {
    Bernoulli {
        p: f64,
        seed: u64,
    },
    Uniform {
        seed: u64,
    },
    Constant(u64),
    /// Block-language word; `pattern` has one entry per run.
    Blocks {
        epsilon: Rational,
        pattern: Vec<bool>,
    },
    /// Summing-language word over letter indices.
    SumLanguage {
        epsilon: Rational,
        letters: Vec<u64>,
    },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamSpec {
    pub kind: StreamKind,
    /// Number of values for the random and constant kinds.
    pub length: usize,
    /// Values lie in `[0, range]`; 1 for bit streams.
    pub range: u64,
}

impl StreamSpec {
    /// Materializes the stream; `window` parameterizes the language kinds.
    pub fn generate(&self, window: u64) -> Result<Vec<u64>> {
        let values = match &self.kind {
            StreamKind::Bernoulli { p, seed } => gen_bernoulli(*p, self.length, *seed),
            StreamKind::Uniform { seed } => gen_uniform(self.range, self.length, *seed),
            StreamKind::Constant(v) => vec![*v; self.length],
            StreamKind::Blocks { epsilon, pattern } => {
                let bits = gen_block_language(window, *epsilon, pattern)?;
                bits.into_iter().map(|b| b * self.range).collect()
            }
            StreamKind::SumLanguage { epsilon, letters } => {
                gen_sum_language(window, self.range, *epsilon, letters)?
            }
            StreamKind::File(path) => {
                let file = std::fs::File::open(path).map_err(|e| Error::Parse {
                    line: 0,
                    message: format!("{}: {e}", path.display()),
                })?;
                parse_stream_reader(std::io::BufReader::new(file))?
            }
        };
        if let Some(&value) = values.iter().find(|&&v| v > self.range) {
            return Err(Error::OutOfRange {
                value,
                max: self.range,
            });
        }
        Ok(values)
    }
}

/// Parses one non-negative decimal integer per line; blank lines are skipped.
pub fn parse_stream(text: &str) -> Result<Vec<u64>> {
    parse_stream_reader(text.as_bytes())
}

pub fn parse_stream_reader<R: BufRead>(reader: R) -> Result<Vec<u64>> {
    let mut values = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value = trimmed.parse::<u64>().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("expected a non-negative integer, found {trimmed:?}"),
        })?;
        values.push(value);
    }
    Ok(values)
}

/// Renders values in the stream text format.
pub fn format_stream(values: &[u64]) -> String {
    let mut out = String::with_capacity(values.len() * 2);
    for v in values {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

/// Appends `count` zeros, e.g. to push a language word through the window.
pub fn pad_zeros(mut values: Vec<u64>, count: u64) -> Vec<u64> {
    values.extend(std::iter::repeat_n(0, count as usize));
    values
}

/// Parses `"1,0,1"` or `"101"` into a run pattern.
pub fn parse_pattern(text: &str) -> Result<Vec<bool>> {
    text.chars()
        .filter(|c| !matches!(c, ',' | ' '))
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Parse {
                line: 0,
                message: format!("pattern accepts only 0 and 1, found {other:?}"),
            }),
        })
        .collect()
}

/// Fraction of ones, handy for eyeballing generated streams.
pub fn density(values: &[u64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<u64>().to_f64().unwrap_or(0.0) / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn block_language_examples() {
        assert_eq!(
            gen_block_language(8, eps(1, 8), &[true, false]).unwrap(),
            vec![1, 1, 1, 0, 0, 0]
        );
        assert_eq!(
            gen_block_language(4, eps(1, 4), &[true]).unwrap(),
            vec![1, 1, 1]
        );
        assert_eq!(
            gen_block_language(8, eps(1, 8), &[false, false]).unwrap(),
            vec![0; 6]
        );
        assert_eq!(
            gen_block_language(8, eps(1, 8), &[true]),
            Err(Error::PatternLength {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn sum_alphabet_example() {
        let a = SumAlphabet::new(2, 100, eps(1, 40));
        assert_eq!(a.step, 11);
        assert_eq!(a.size, 10);
        assert_eq!(
            a.letters().collect::<Vec<_>>(),
            (0..10).map(|n| n * 11).collect::<Vec<_>>()
        );
        assert_eq!(
            a.letter(10),
            Err(Error::LetterOutOfRange {
                index: 10,
                size: 10
            })
        );
        assert_eq!(
            gen_sum_language(2, 100, eps(1, 40), &[0, 0]).unwrap(),
            vec![0, 0]
        );
        assert_eq!(
            gen_sum_language(2, 100, eps(1, 40), &[9, 3]).unwrap(),
            vec![99, 33]
        );
        assert!(gen_sum_language(2, 100, eps(1, 40), &[10, 0]).is_err());
        assert!(gen_sum_language(2, 100, eps(1, 40), &[1]).is_err());
    }

    #[test]
    fn largest_letter_never_exceeds_range() {
        for w in 1..40u64 {
            for r in [1u64, 2, 3, 7, 100, 1000] {
                for d in [2i128, 3, 8, 50, 400, 5000] {
                    let a = SumAlphabet::new(w, r, eps(1, d));
                    assert!(a.letter(a.size - 1).unwrap() <= r, "W={w} R={r} eps=1/{d}");
                }
            }
        }
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_stream("1\n0\n1\n").unwrap(), vec![1, 0, 1]);
        assert_eq!(parse_stream("3\n\n7\n").unwrap(), vec![3, 7]);
        assert_eq!(
            parse_stream("x\n").unwrap_err(),
            Error::Parse {
                line: 1,
                message: "expected a non-negative integer, found \"x\"".into()
            }
        );
        assert!(matches!(
            parse_stream("1\n-2\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn generators_are_deterministic_and_extreme_p_works() {
        assert!(gen_bernoulli(0.0, 100, 7).iter().all(|&b| b == 0));
        assert!(gen_bernoulli(1.0, 100, 7).iter().all(|&b| b == 1));
        assert_eq!(gen_bernoulli(0.3, 500, 42), gen_bernoulli(0.3, 500, 42));
        assert_ne!(gen_bernoulli(0.5, 500, 1), gen_bernoulli(0.5, 500, 2));
        let u = gen_uniform(255, 2000, 9);
        assert_eq!(u, gen_uniform(255, 2000, 9));
        assert!(u.iter().all(|&v| v <= 255));
        assert!(u.contains(&0) && u.contains(&255));
        let d = density(&gen_bernoulli(0.25, 20_000, 3));
        assert!((d - 0.25).abs() < 0.02, "{d}");
    }

    #[test]
    fn stream_generation_checks_range() {
        let spec = StreamSpec {
            kind: StreamKind::Constant(5),
            length: 3,
            range: 4,
        };
        assert_eq!(
            spec.generate(8),
            Err(Error::OutOfRange { value: 5, max: 4 })
        );
        let spec = StreamSpec {
            kind: StreamKind::Blocks {
                epsilon: eps(1, 8),
                pattern: vec![false, true],
            },
            length: 0,
            range: 9,
        };
        assert_eq!(spec.generate(8).unwrap(), vec![0, 0, 0, 9, 9, 9]);
    }

    #[test]
    fn format_round_trips() {
        let values = vec![0, 5, 1_000_000, 3];
        assert_eq!(parse_stream(&format_stream(&values)).unwrap(), values);
        assert_eq!(parse_pattern("1,0,1").unwrap(), vec![true, false, true]);
        assert_eq!(parse_pattern("10").unwrap(), vec![true, false]);
        assert!(parse_pattern("12").is_err());
    }
}
