//! Little-endian bit packing for sketch state.
//!
//! Fields are appended least-significant bit first, each at a fixed width,
//! and bits fill bytes starting from bit 0.

use bitvec::field::BitField;
use bitvec::prelude::{BitSlice, BitVec, Lsb0};

use crate::error::{Error, Result};

/// Packed sketch state: `bits` meaningful bits stored in `bytes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packed {
    bytes: Vec<u8>,
    bits: usize,
}

impl Packed {
    pub fn from_bytes(bytes: Vec<u8>, bits: usize) -> Result<Self> {
        if bits > bytes.len() * 8 {
            return Err(Error::Decode("bit length exceeds buffer"));
        }
        Ok(Self { bytes, bits })
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn bit_len(&self) -> usize {
        self.bits
    }
}

#[derive(Default)]
pub(crate) struct Writer {
    bits: BitVec<u8, Lsb0>,
}

impl Writer {
    pub(crate) fn push(&mut self, value: u64, width: u32) {
        debug_assert!(
            width == 64 || value >> width == 0,
            "{value} overflows {width} bits"
        );
        if width == 0 {
            return;
        }
        let start = self.bits.len();
        self.bits.resize(start + width as usize, false);
        self.bits[start..].store_le(value);
    }

    pub(crate) fn push_bit(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub(crate) fn finish(self) -> Packed {
        let bits = self.bits.len();
        Packed {
            bytes: self.bits.into_vec(),
            bits,
        }
    }
}

pub(crate) struct Reader<'a> {
    bits: &'a BitSlice<u8, Lsb0>,
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(packed: &'a Packed) -> Self {
        Self {
            bits: &BitSlice::from_slice(&packed.bytes)[..packed.bits],
            pos: 0,
        }
    }

    pub(crate) fn read(&mut self, width: u32) -> Result<u64> {
        if width == 0 {
            return Ok(0);
        }
        let end = self.pos + width as usize;
        if end > self.bits.len() {
            return Err(Error::Decode("truncated state"));
        }
        let value = self.bits[self.pos..end].load_le::<u64>();
        self.pos = end;
        Ok(value)
    }

    pub(crate) fn read_bit(&mut self) -> Result<bool> {
        Ok(self.read(1)? == 1)
    }

    pub(crate) fn finish(self) -> Result<()> {
        if self.pos != self.bits.len() {
            return Err(Error::Decode("trailing bits"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields_round_trip_in_order() {
        let mut w = Writer::default();
        w.push(0b101, 3);
        w.push_bit(true);
        w.push(0, 0);
        w.push(0x1234, 13);
        let packed = w.finish();
        assert_eq!(packed.bit_len(), 17);
        assert_eq!(packed.bytes()[0] & 0x0f, 0b1101);

        let mut r = Reader::new(&packed);
        assert_eq!(r.read(3).unwrap(), 0b101);
        assert!(r.read_bit().unwrap());
        assert_eq!(r.read(0).unwrap(), 0);
        assert_eq!(r.read(13).unwrap(), 0x1234);
        r.finish().unwrap();
    }

    #[test]
    fn truncated_input_is_rejected() {
        let packed = Packed::from_bytes(vec![0xff], 4).unwrap();
        let mut r = Reader::new(&packed);
        assert!(r.read(5).is_err());
        assert!(Packed::from_bytes(vec![0], 9).is_err());
    }
}
