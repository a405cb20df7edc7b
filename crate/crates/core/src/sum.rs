//! Additive-error basic summing over integers in `[0, R]`.
//!
//! Every element is divided by `R` and rounded to `rho` fractional bits, then
//! fed to a counting-style remainder. Two layouts exist:
//!
//! * [`Variant::LargeEps`]: `k <= W` blocks of `s = W/k` elements, one mark bit
//!   per block, exactly like the counting sketch but with a fixed-point
//!   remainder. State size does not depend on `R`.
//! * [`Variant::SmallEps`]: when `ε` is too small for `k <= W`, every element
//!   closes its own "block" and its cell stores how many multiples of `W/k`
//!   the remainder crossed, a value in `[0, ceil(k/W)]`.
//!
//! Rounding costs at most `2^(-1-rho)·R·W` and block granularity
//! `R·W/(2k)`; choosing `k = ceil(1/(2ε - 2^-rho))` keeps the total within
//! `R·W·ε`.
//!
//! The remainder is held as an integer over `D = k·2^rho`, see
//! [`crate::numeric`].

use bitvec::prelude::{BitVec, Lsb0};
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::numeric::{
    self, ceil_log2, check_epsilon, round_frac, to_scaled, width_for, Rational, Scale, ScaledValue,
};
use crate::packing::{Packed, Reader, Writer};
use crate::steps::tick;

/// Which algorithm a [`SumParams`] drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Block layout; `block_size · blocks == window`.
    LargeEps { block_size: u64 },
    /// Per-element layout; cells hold values in `[0, cell_max]`.
    SmallEps { cell_max: u64, cell_width: u32 },
}

/// Validated summing configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SumParams {
    window: u64,
    range: u64,
    epsilon: Rational,
    scale: Scale,
    variant: Variant,
}

/// Query numerators are bounded by roughly `R · 4 · W · 2^rho · k`; keep that
/// comfortably inside `i128`.
const MAX_QUERY_MAGNITUDE: u128 = 1 << 120;

impl SumParams {
    /// Chooses the block layout when its block count fits in the window and
    /// the per-element layout otherwise.
    pub fn derive(window: u64, range: u64, epsilon: Rational) -> Result<Self> {
        check_common(window, range, epsilon)?;
        let exact_threshold = Rational::new(1, 2 * range as i128 * window as i128);
        if epsilon < exact_threshold {
            return Err(Error::ExactSummingRequired);
        }
        match Self::large_eps(window, range, epsilon) {
            Err(Error::EpsilonTooSmall { .. }) => Self::small_eps(window, range, epsilon),
            other => other,
        }
    }

    /// Block layout with `rho = ceil(log2(log2(W)/ε))` and `k` the smallest
    /// divisor of `W` that is at least `ceil(1/(2ε - 2^-rho))`.
    pub fn large_eps(window: u64, range: u64, epsilon: Rational) -> Result<Self> {
        check_common(window, range, epsilon)?;
        let rho = large_eps_rho(window, epsilon)?;
        let min_blocks = min_blocks(epsilon, rho)?;
        if min_blocks > window {
            return Err(Error::EpsilonTooSmall {
                required: min_blocks,
                window,
            });
        }
        let blocks = numeric::smallest_divisor_at_least(window, min_blocks)
            .expect("window is its own divisor");
        let params = Self {
            window,
            range,
            epsilon,
            scale: Scale::new(rho, blocks)?,
            variant: Variant::LargeEps {
                block_size: window / blocks,
            },
        };
        params.check_magnitudes()?;
        Ok(params)
    }

    /// Per-element layout with `rho = ceil(log2(W/ε))` and
    /// `k = ceil(1/(2ε - 2^-rho)) >= W`.
    ///
    /// Unlike [`SumParams::derive`], this does not refuse `ε < 1/(2RW)`.
    pub fn small_eps(window: u64, range: u64, epsilon: Rational) -> Result<Self> {
        check_common(window, range, epsilon)?;
        let rho = ceil_log2(Rational::from_integer(window as i128) / epsilon);
        let rho = u32::try_from(rho).map_err(|_| Error::Overflow)?;
        let blocks = min_blocks(epsilon, rho)?;
        if blocks < window {
            return Err(Error::Precondition(
                "per-element layout needs at least as many blocks as the window",
            ));
        }
        let cell_max = blocks.div_ceil(window);
        let params = Self {
            window,
            range,
            epsilon,
            scale: Scale::new(rho, blocks)?,
            variant: Variant::SmallEps {
                cell_max,
                cell_width: width_for(cell_max + 1),
            },
        };
        params.check_magnitudes()?;
        Ok(params)
    }

    fn check_magnitudes(&self) -> Result<()> {
        let threshold = self.threshold() as u128;
        let bound = (self.range as u128 + 1)
            .checked_mul(4 * threshold)
            .and_then(|v| v.checked_mul(self.blocks() as u128 + 2));
        match bound {
            Some(v) if v < MAX_QUERY_MAGNITUDE && threshold < 1 << 61 => Ok(()),
            _ => Err(Error::Overflow),
        }
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn range(&self) -> u64 {
        self.range
    }

    pub fn epsilon(&self) -> Rational {
        self.epsilon
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn is_large_eps(&self) -> bool {
        matches!(self.variant, Variant::LargeEps { .. })
    }

    /// Fractional bits used to round `x / R`.
    pub fn rho(&self) -> u32 {
        self.scale.rho()
    }

    /// Number of blocks `k`.
    pub fn blocks(&self) -> u64 {
        self.scale.blocks()
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    /// Block size for the block layout, 1 for the per-element layout.
    pub fn block_size(&self) -> u64 {
        match self.variant {
            Variant::LargeEps { block_size } => block_size,
            Variant::SmallEps { .. } => 1,
        }
    }

    /// `W/k` in raw units, i.e. `W · 2^rho`.
    pub fn threshold(&self) -> u64 {
        self.window << self.scale.rho()
    }

    /// Guaranteed additive error `R·W·ε`.
    pub fn error_bound(&self) -> Rational {
        self.epsilon * (self.range as i128 * self.window as i128)
    }

    /// Number of cells in the summary array.
    pub fn cells(&self) -> u64 {
        match self.variant {
            Variant::LargeEps { .. } => self.blocks(),
            Variant::SmallEps { .. } => self.window,
        }
    }

    /// Raw remainders are multiples of this value.
    fn remainder_granule(&self) -> u64 {
        numeric::gcd(self.blocks(), self.threshold())
    }

    /// Extra bits the exact denominator needs on top of `rho` fractional bits.
    pub fn denominator_overhead_bits(&self) -> u64 {
        width_for(self.blocks() / self.remainder_granule()) as u64
    }

    fn widths(&self) -> FieldWidths {
        let k = self.blocks();
        let rho = self.rho();
        match self.variant {
            Variant::LargeEps { block_size } => FieldWidths {
                cell: 1,
                remainder: width_for(2 * block_size) + rho,
                offset: width_for(block_size),
                index: width_for(k),
                total: width_for(k + 1),
            },
            Variant::SmallEps { cell_width, .. } => FieldWidths {
                cell: cell_width,
                remainder: rho,
                offset: 0,
                index: width_for(self.window),
                total: width_for(k + 1),
            },
        }
    }
}

fn check_common(window: u64, range: u64, epsilon: Rational) -> Result<()> {
    if !(2..=1 << 40).contains(&window) {
        return Err(Error::InvalidWindow(window));
    }
    if range == 0 {
        return Err(Error::InvalidRange(range));
    }
    check_epsilon(epsilon, Rational::new(1, 2))
}

fn large_eps_rho(window: u64, epsilon: Rational) -> Result<u32> {
    let rho = if window.is_power_of_two() {
        let log_w = window.trailing_zeros() as i128;
        ceil_log2(Rational::from_integer(log_w) / epsilon)
    } else {
        let eps = epsilon.to_f64().ok_or(Error::Overflow)?;
        ((window as f64).log2() / eps).log2().ceil() as i32
    };
    u32::try_from(rho).map_err(|_| Error::Overflow)
}

/// `ceil(1 / (2ε - 2^-rho))`.
fn min_blocks(epsilon: Rational, rho: u32) -> Result<u64> {
    if rho > 100 {
        return Err(Error::Overflow);
    }
    let slack = epsilon * 2 - Rational::new(1, 1i128 << rho);
    if slack <= Rational::from_integer(0) {
        return Err(Error::Precondition("2ε - 2^-rho must be positive"));
    }
    u64::try_from(numeric::ceil_rational(Rational::one() / slack)).map_err(|_| Error::Overflow)
}

struct FieldWidths {
    cell: u32,
    remainder: u32,
    offset: u32,
    index: u32,
    total: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Cells {
    Marks(BitVec<u64, Lsb0>),
    Counts(Vec<u64>),
}

impl Cells {
    fn get(&self, slot: usize) -> u64 {
        match self {
            Cells::Marks(bits) => bits[slot] as u64,
            Cells::Counts(counts) => counts[slot],
        }
    }

    fn set(&mut self, slot: usize, value: u64) {
        match self {
            Cells::Marks(bits) => bits.set(slot, value == 1),
            Cells::Counts(counts) => counts[slot] = value,
        }
    }
}

/// Sliding-window sum with `R·W·ε` additive error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumSketch {
    params: SumParams,
    remainder: ScaledValue,
    cells: Cells,
    index: usize,
    /// Sum of all cells.
    total: u64,
    /// Position inside the current block; always 0 for the per-element layout.
    offset: u64,
}

impl SumSketch {
    pub fn new(params: SumParams) -> Self {
        let cells = match params.variant {
            Variant::LargeEps { .. } => {
                Cells::Marks(BitVec::repeat(false, params.blocks() as usize))
            }
            Variant::SmallEps { .. } => Cells::Counts(vec![0; params.window as usize]),
        };
        Self {
            params,
            remainder: ScaledValue::ZERO,
            cells,
            index: 0,
            total: 0,
            offset: 0,
        }
    }

    pub fn params(&self) -> &SumParams {
        &self.params
    }

    pub fn add(&mut self, x: u64) -> Result<()> {
        let p = &self.params;
        let rounded = round_frac(x, p.range, p.rho())?;
        let scaled = to_scaled(rounded, p.scale)?.raw();
        let threshold = p.threshold();
        let y = self.remainder.raw();
        tick(3);
        match p.variant {
            Variant::LargeEps { block_size } => {
                tick(1);
                if self.offset == block_size - 1 {
                    let slot = self.index;
                    self.total -= self.cells.get(slot);
                    let commit = y + scaled >= threshold;
                    self.cells.set(slot, commit as u64);
                    self.remainder = ScaledValue::from_raw(if commit {
                        y + scaled - threshold
                    } else {
                        y + scaled
                    });
                    self.total += commit as u64;
                    self.offset = 0;
                    self.index = (slot + 1) % p.blocks() as usize;
                    tick(7);
                } else {
                    self.remainder = ScaledValue::from_raw(y + scaled);
                    self.offset += 1;
                    tick(2);
                }
            }
            Variant::SmallEps { .. } => {
                let slot = self.index;
                self.total -= self.cells.get(slot);
                let carried = y + scaled;
                let units = carried / threshold;
                self.cells.set(slot, units);
                self.remainder = ScaledValue::from_raw(carried - units * threshold);
                self.total += units;
                self.index = (slot + 1) % p.window as usize;
                tick(7);
            }
        }
        Ok(())
    }

    /// Estimate of the sum of the last `W` elements (raw, not clamped).
    pub fn query(&self) -> Rational {
        tick(1);
        let p = &self.params;
        let threshold = p.threshold() as i128;
        let denominator = p.scale.denominator() as i128;
        let expired = self.offset as i128 * self.cells.get(self.index) as i128 * denominator;
        let twice = 2 * self.total as i128 * threshold + 2 * self.remainder.raw() as i128
            - threshold
            - 2 * expired;
        Rational::new(p.range as i128 * twice, 2 * denominator)
    }

    pub fn remainder(&self) -> ScaledValue {
        self.remainder
    }

    /// The remainder in window-fraction units.
    pub fn remainder_value(&self) -> Rational {
        self.remainder.to_rational(self.params.scale)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn cell(&self, slot: usize) -> u64 {
        self.cells.get(slot)
    }

    pub fn cell_values(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.params.cells() as usize).map(|i| self.cells.get(i))
    }

    /// Bits of state at invariant-derived widths (excludes the denominator
    /// overhead, see [`SumParams::denominator_overhead_bits`]).
    pub fn packed_bits(&self) -> u64 {
        let w = self.params.widths();
        self.params.cells() * w.cell as u64 + (w.remainder + w.offset + w.index + w.total) as u64
    }

    /// Serializes `(cells, remainder, offset, index, total)`. The remainder
    /// field carries the denominator overhead bits.
    pub fn to_packed(&self) -> Packed {
        let p = &self.params;
        let w = p.widths();
        let mut out = Writer::default();
        for slot in 0..p.cells() as usize {
            out.push(self.cells.get(slot), w.cell);
        }
        out.push(
            self.remainder.raw() / p.remainder_granule(),
            w.remainder + p.denominator_overhead_bits() as u32,
        );
        out.push(self.offset, w.offset);
        out.push(self.index as u64, w.index);
        out.push(self.total, w.total);
        out.finish()
    }

    pub fn from_packed(params: SumParams, packed: &Packed) -> Result<Self> {
        let w = params.widths();
        let mut r = Reader::new(packed);
        let mut sketch = SumSketch::new(params);
        let cell_max = match params.variant {
            Variant::LargeEps { .. } => 1,
            Variant::SmallEps { cell_max, .. } => cell_max,
        };
        let mut total = 0;
        for slot in 0..params.cells() as usize {
            let value = r.read(w.cell)?;
            if value > cell_max {
                return Err(Error::Decode("cell exceeds its maximum"));
            }
            sketch.cells.set(slot, value);
            total += value;
        }
        let remainder = r.read(w.remainder + params.denominator_overhead_bits() as u32)?
            * params.remainder_granule();
        let offset = r.read(w.offset)?;
        let index = r.read(w.index)?;
        let stored_total = r.read(w.total)?;
        r.finish()?;

        let remainder_limit = match params.variant {
            Variant::LargeEps { .. } => 2 * params.threshold(),
            Variant::SmallEps { .. } => params.threshold(),
        };
        if remainder >= remainder_limit || offset >= params.block_size() || index >= params.cells()
        {
            return Err(Error::Decode("field outside its invariant range"));
        }
        if stored_total != total {
            return Err(Error::Decode("cell total does not match cells"));
        }
        sketch.remainder = ScaledValue::from_raw(remainder);
        sketch.offset = offset;
        sketch.index = index as usize;
        sketch.total = total;
        Ok(sketch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn derive_large_eps_example() {
        let p = SumParams::derive(256, 1500, eps(1, 16)).unwrap();
        assert_eq!(p.variant(), Variant::LargeEps { block_size: 16 });
        assert_eq!(p.rho(), 7);
        assert_eq!(p.blocks(), 16);
        assert_eq!(min_blocks(eps(1, 16), 7).unwrap(), 9);
    }

    #[test]
    fn derive_small_eps_example() {
        let p = SumParams::derive(2, 4, eps(1, 8)).unwrap();
        assert!(!p.is_large_eps());
        assert_eq!(p.rho(), 4);
        assert_eq!(p.blocks(), 6);
        assert_eq!(p.scale().denominator(), 96);
        assert_eq!(
            p.variant(),
            Variant::SmallEps {
                cell_max: 3,
                cell_width: 2
            }
        );
    }

    #[test]
    fn derive_rejects_exact_regime_and_bad_windows() {
        assert_eq!(
            SumParams::derive(10, 10, eps(1, 300)),
            Err(Error::ExactSummingRequired)
        );
        // exactly 1/(2RW) is still allowed
        assert!(SumParams::derive(10, 10, eps(1, 200)).is_ok());
        assert_eq!(
            SumParams::derive(1, 10, eps(1, 4)),
            Err(Error::InvalidWindow(1))
        );
        assert_eq!(
            SumParams::derive(8, 0, eps(1, 4)),
            Err(Error::InvalidRange(0))
        );
        assert!(SumParams::derive(8, 3, eps(2, 3)).is_err());
    }

    #[test]
    fn explicit_variants() {
        assert!(matches!(
            SumParams::large_eps(4, 10, eps(1, 16)),
            Err(Error::EpsilonTooSmall { .. })
        ));
        assert!(SumParams::small_eps(64, 10, eps(1, 4)).is_err());
        // small_eps ignores the exact-summing guard
        let p = SumParams::small_eps(4, 4, eps(1, 64)).unwrap();
        assert!(p.blocks() >= 4);
    }

    #[test]
    fn rho_for_non_power_of_two_window() {
        // log2(100)/0.25 ≈ 26.6 -> 5
        let p = SumParams::large_eps(100, 7, eps(1, 4)).unwrap();
        assert_eq!(p.rho(), 5);
        // k0 = ceil(1/(1/2 - 1/32)) = 3 -> smallest divisor of 100 at least 3 is 4
        assert_eq!(p.blocks(), 4);
    }

    #[test]
    fn small_eps_hand_trace() {
        let p = SumParams::derive(2, 4, eps(1, 8)).unwrap();
        let mut sk = SumSketch::new(p);
        assert_eq!(sk.query(), eps(-2, 3));
        sk.add(3).unwrap();
        assert_eq!(sk.cell(0), 2);
        assert_eq!(sk.remainder().raw(), 8);
        assert_eq!(sk.total(), 2);
        assert_eq!(sk.query(), eps(7, 3));
    }

    #[test]
    fn large_eps_full_scale_input_is_one_unit() {
        let p = SumParams::derive(256, 1500, eps(1, 16)).unwrap();
        assert_eq!(round_frac(1500, 1500, 7).unwrap(), 128);
        let mut sk = SumSketch::new(p);
        for step in 1..=5u64 {
            sk.add(1500).unwrap();
            assert_eq!(sk.remainder_value(), Rational::from_integer(step as i128));
        }
    }

    #[test]
    fn large_eps_zero_stream_is_a_fixed_point() {
        let p = SumParams::derive(64, 255, eps(1, 4)).unwrap();
        let mut sk = SumSketch::new(p);
        for _ in 0..500 {
            sk.add(0).unwrap();
            assert_eq!(sk.remainder().raw(), 0);
            assert_eq!(sk.total(), 0);
        }
        assert!(sk.cell_values().all(|c| c == 0));
    }

    #[test]
    fn rejects_out_of_range_input() {
        let p = SumParams::derive(64, 255, eps(1, 4)).unwrap();
        let mut sk = SumSketch::new(p);
        assert_eq!(
            sk.add(256),
            Err(Error::OutOfRange {
                value: 256,
                max: 255
            })
        );
    }

    #[test]
    fn packed_bits_examples() {
        let small = SumSketch::new(SumParams::derive(2, 4, eps(1, 8)).unwrap());
        // 2·2 + 4 + 1 + 3
        assert_eq!(small.packed_bits(), 12);
        let large = SumSketch::new(SumParams::derive(256, 1500, eps(1, 16)).unwrap());
        // 16 + (5 + 7) + 4 + 4 + 5
        assert_eq!(large.packed_bits(), 41);
        assert_eq!(large.params().denominator_overhead_bits(), 0);
        // k = 6, gcd(6, 2·16) = 2, 6/2 = 3 values -> 2 bits
        assert_eq!(small.params().denominator_overhead_bits(), 2);
    }

    #[test]
    fn binary_large_eps_matches_counting_widths_plus_rho() {
        let p = SumParams::large_eps(64, 1, eps(1, 8)).unwrap();
        let s = p.block_size();
        let k = p.blocks();
        let counting =
            k + (width_for(2 * s) + width_for(s) + width_for(k) + width_for(k + 1)) as u64;
        assert_eq!(SumSketch::new(p).packed_bits(), counting + p.rho() as u64);
    }

    #[test]
    fn packed_round_trip() {
        for params in [
            SumParams::derive(12, 9, eps(1, 5)).unwrap(),
            SumParams::derive(6, 9, eps(1, 30)).unwrap(),
        ] {
            let mut sk = SumSketch::new(params);
            for (i, x) in (0..60u64).map(|i| (i * 7 + 3) % 10).enumerate() {
                sk.add(x).unwrap();
                let packed = sk.to_packed();
                assert_eq!(
                    packed.bit_len() as u64,
                    sk.packed_bits() + params.denominator_overhead_bits(),
                    "step {i}"
                );
                assert_eq!(SumSketch::from_packed(params, &packed).unwrap(), sk);
            }
        }
    }
}
