//! Additive-error basic counting over a bit stream.
//!
//! The window of `W` bits is cut into `k` blocks of `s = W/k` bits. A block
//! is summarized by one bit: it is marked when the running count of
//! not-yet-committed ones `y` reaches `s` at the block's end, in which case
//! `s` is moved from `y` into the mark. Whatever does not fit is carried to
//! the next block, so rounding errors never accumulate. A query adds the
//! marked blocks, the carried count, removes the part of the oldest block
//! that already slid out, and subtracts half a block of bias. The answer is
//! within `W·ε` of the true count, given `k >= 1/(2ε)`.

use bitvec::prelude::{BitVec, Lsb0};

use crate::error::{Error, Result};
use crate::numeric::{self, check_epsilon, width_for, Rational};
use crate::packing::{Packed, Reader, Writer};
use crate::steps::tick;

/// Validated counting configuration. `blocks · block_size == window`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CountParams {
    window: u64,
    epsilon: Rational,
    blocks: u64,
    block_size: u64,
}

impl CountParams {
    /// Picks the smallest `k >= ceil(1/(2ε))` that divides `window`.
    ///
    /// Fails with [`Error::EpsilonTooSmall`] when even one block per element
    /// is not enough; exact storage (or the summing sketch with `R = 1`) is
    /// the alternative there.
    pub fn derive(window: u64, epsilon: Rational) -> Result<Self> {
        if window == 0 {
            return Err(Error::InvalidWindow(window));
        }
        check_epsilon(epsilon, Rational::new(1, 2))?;
        let min_blocks = numeric::ceil_rational(epsilon.recip() / 2) as u64;
        if min_blocks > window {
            return Err(Error::EpsilonTooSmall {
                required: min_blocks,
                window,
            });
        }
        if window > 1 << 48 {
            return Err(Error::Overflow);
        }
        let blocks = numeric::smallest_divisor_at_least(window, min_blocks)
            .expect("window is its own divisor");
        Ok(Self {
            window,
            epsilon,
            blocks,
            block_size: window / blocks,
        })
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn epsilon(&self) -> Rational {
        self.epsilon
    }

    /// Number of blocks `k`.
    pub fn blocks(&self) -> u64 {
        self.blocks
    }

    /// Block size `s = W / k`.
    pub fn block_size(&self) -> u64 {
        self.block_size
    }

    /// Guaranteed additive error `W·ε`.
    pub fn error_bound(&self) -> Rational {
        self.epsilon * self.window as i128
    }

    fn widths(&self) -> FieldWidths {
        let (k, s) = (self.blocks, self.block_size);
        FieldWidths {
            blocks: k,
            remainder: width_for(2 * s),
            offset: width_for(s),
            index: width_for(k),
            marked: width_for(k + 1),
        }
    }
}

struct FieldWidths {
    blocks: u64,
    remainder: u32,
    offset: u32,
    index: u32,
    marked: u32,
}

impl FieldWidths {
    fn total(&self) -> u64 {
        self.blocks + (self.remainder + self.offset + self.index + self.marked) as u64
    }
}

/// Sliding-window bit counter with `W·ε` additive error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountSketch {
    params: CountParams,
    /// Ones seen but not yet committed to a block mark.
    remainder: u64,
    marks: BitVec<u64, Lsb0>,
    /// Slot of the oldest block, also the slot written at the next boundary.
    oldest: usize,
    /// Population count of `marks`.
    marked: u64,
    /// Position inside the current block.
    offset: u64,
}

impl CountSketch {
    pub fn new(params: CountParams) -> Self {
        Self {
            params,
            remainder: 0,
            marks: BitVec::repeat(false, params.blocks as usize),
            oldest: 0,
            marked: 0,
            offset: 0,
        }
    }

    pub fn params(&self) -> &CountParams {
        &self.params
    }

    pub fn add(&mut self, bit: u64) -> Result<()> {
        if bit > 1 {
            return Err(Error::OutOfRange { value: bit, max: 1 });
        }
        let s = self.params.block_size;
        tick(1);
        if self.offset == s - 1 {
            let slot = self.oldest;
            self.marked -= self.marks[slot] as u64;
            let commit = self.remainder + bit >= s;
            self.marks.set(slot, commit);
            if commit {
                self.remainder = self.remainder + bit - s;
            } else {
                self.remainder += bit;
            }
            self.marked += commit as u64;
            self.offset = 0;
            self.oldest = (slot + 1) % self.params.blocks as usize;
            tick(7);
        } else {
            self.remainder += bit;
            self.offset += 1;
            tick(2);
        }
        Ok(())
    }

    /// Estimate of the number of ones among the last `W` bits.
    ///
    /// This is the raw estimator and may fall slightly outside `[0, W]`.
    pub fn query(&self) -> Rational {
        tick(1);
        let s = self.params.block_size as i128;
        let oldest_mark = self.marks[self.oldest] as i128;
        let twice = 2
            * (s * self.marked as i128 + self.remainder as i128
                - self.offset as i128 * oldest_mark)
            - s;
        Rational::new(twice, 2)
    }

    pub fn remainder(&self) -> u64 {
        self.remainder
    }

    pub fn marked(&self) -> u64 {
        self.marked
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn oldest(&self) -> usize {
        self.oldest
    }

    pub fn mark(&self, slot: usize) -> bool {
        self.marks[slot]
    }

    pub fn marks(&self) -> impl Iterator<Item = bool> + '_ {
        self.marks.iter().by_vals()
    }

    /// Bits of state at invariant-derived widths: marks, remainder, offset,
    /// oldest index and mark count.
    pub fn packed_bits(&self) -> u64 {
        self.params.widths().total()
    }

    /// Serializes the state as `(marks, remainder, offset, oldest, marked)`.
    pub fn to_packed(&self) -> Packed {
        let widths = self.params.widths();
        let mut w = Writer::default();
        for mark in self.marks.iter().by_vals() {
            w.push_bit(mark);
        }
        w.push(self.remainder, widths.remainder);
        w.push(self.offset, widths.offset);
        w.push(self.oldest as u64, widths.index);
        w.push(self.marked, widths.marked);
        w.finish()
    }

    pub fn from_packed(params: CountParams, packed: &Packed) -> Result<Self> {
        let widths = params.widths();
        let mut r = Reader::new(packed);
        let mut marks = BitVec::with_capacity(params.blocks as usize);
        for _ in 0..params.blocks {
            marks.push(r.read_bit()?);
        }
        let remainder = r.read(widths.remainder)?;
        let offset = r.read(widths.offset)?;
        let oldest = r.read(widths.index)?;
        let marked = r.read(widths.marked)?;
        r.finish()?;

        let s = params.block_size;
        if remainder >= 2 * s || offset >= s || oldest >= params.blocks {
            return Err(Error::Decode("field outside its invariant range"));
        }
        if marked != marks.count_ones() as u64 {
            return Err(Error::Decode("mark count does not match marks"));
        }
        Ok(Self {
            params,
            remainder,
            marks,
            oldest: oldest as usize,
            marked,
            offset,
        })
    }
}
