//! Bit strings on the wire: Elias-gamma integers and fixed-width fields.

use crate::error::{Error, Result};

/// Elias-gamma code of `k >= 1`: `floor(log2 k)` zeros, then `k` in binary,
/// most significant bit first.
pub fn encode_integer(k: u64) -> Result<Vec<bool>> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "Elias-gamma encodes integers >= 1".into(),
        ));
    }
    let width = 64 - k.leading_zeros() as usize;
    let mut out = vec![false; width - 1];
    out.extend((0..width).rev().map(|i| (k >> i) & 1 == 1));
    Ok(out)
}

/// Decodes one Elias-gamma integer from the front of `bits`, returning the
/// value and the number of bits consumed.
pub fn decode_integer(bits: &[bool]) -> Result<(u64, usize)> {
    let mut reader = BitReader::new(bits);
    let k = reader.gamma()?;
    Ok((k, reader.position()))
}

/// `2 floor(log2 k) + 1`.
pub fn gamma_len(k: u64) -> usize {
    assert!(k >= 1, "gamma code needs k >= 1");
    2 * (63 - k.leading_zeros() as usize) + 1
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitWriter {
    bits: Vec<bool>,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bit(&mut self, b: bool) -> &mut Self {
        self.bits.push(b);
        self
    }

    /// `width` low bits of `value`, least significant first.
    pub fn uint(&mut self, value: u64, width: usize) -> &mut Self {
        debug_assert!(width == 64 || value >> width == 0, "value wider than field");
        self.bits.extend((0..width).map(|i| (value >> i) & 1 == 1));
        self
    }

    pub fn gamma(&mut self, k: u64) -> Result<&mut Self> {
        self.bits.extend(encode_integer(k)?);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn finish(self) -> Vec<bool> {
        self.bits
    }
}

pub struct BitReader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a [bool]) -> Self {
        BitReader { bits, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn bit(&mut self) -> Result<bool> {
        let b = *self.bits.get(self.pos).ok_or_else(|| {
            Error::Protocol(format!("message ended after {} bits", self.bits.len()))
        })?;
        self.pos += 1;
        Ok(b)
    }

    pub fn uint(&mut self, width: usize) -> Result<u64> {
        if width > 64 {
            return Err(Error::Protocol(format!("field of {width} bits is too wide")));
        }
        let mut v = 0u64;
        for i in 0..width {
            v |= u64::from(self.bit()?) << i;
        }
        Ok(v)
    }

    pub fn gamma(&mut self) -> Result<u64> {
        let mut zeros = 0;
        while !self.bit()? {
            zeros += 1;
            if zeros > 63 {
                return Err(Error::Protocol("Elias-gamma prefix exceeds 63 zeros".into()));
            }
        }
        let mut k = 1u64;
        for _ in 0..zeros {
            k = (k << 1) | u64::from(self.bit()?);
        }
        Ok(k)
    }

    /// Fails unless every bit has been consumed.
    pub fn finish(self) -> Result<()> {
        if self.pos == self.bits.len() {
            Ok(())
        } else {
            Err(Error::Protocol(format!(
                "{} trailing bits in message",
                self.bits.len() - self.pos
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(bits: &[bool]) -> String {
        bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(s(&encode_integer(1).unwrap()), "1");
        assert_eq!(s(&encode_integer(5).unwrap()), "00101");
        assert_eq!(s(&encode_integer(8).unwrap()), "0001000");
        assert!(encode_integer(0).is_err());
    }

    #[test]
    fn gamma_roundtrip() {
        for k in 1..=(1u64 << 16) {
            let code = encode_integer(k).unwrap();
            assert_eq!(code.len(), gamma_len(k));
            assert_eq!(decode_integer(&code).unwrap(), (k, code.len()));
        }
        let big = encode_integer(u64::MAX).unwrap();
        assert_eq!(decode_integer(&big).unwrap().0, u64::MAX);
    }

    #[test]
    fn malformed_streams() {
        assert!(decode_integer(&[false, false]).is_err());
        assert!(decode_integer(&[false, true]).is_err());
        assert!(decode_integer(&[false; 70]).is_err());
        let mut r = BitReader::new(&[true, true]);
        r.bit().unwrap();
        assert!(r.finish().is_err());
    }

    #[test]
    fn fields_are_lsb_first() {
        let mut w = BitWriter::new();
        w.uint(0b110, 3).bit(true).gamma(2).unwrap();
        let bits = w.finish();
        assert_eq!(s(&bits), "0111010");
        let mut r = BitReader::new(&bits);
        assert_eq!(r.uint(3).unwrap(), 0b110);
        assert!(r.bit().unwrap());
        assert_eq!(r.gamma().unwrap(), 2);
        r.finish().unwrap();
    }
}
