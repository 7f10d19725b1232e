//! Binary arithmetic coder over 32-bit `low`/`high` registers with
//! pending-bit underflow handling. Output is MSB-first; the final byte is
//! zero-padded, and the decoder reads zeros past the end of its input.

const HALF: u32 = 1 << 31;
const QUARTER: u32 = 1 << 30;
const THREE_QUARTERS: u32 = HALF + QUARTER;

/// Largest model total the registers can subdivide: after renormalisation
/// `high - low` always exceeds a quarter of the code space.
pub const CODER_TOTAL_LIMIT: u32 = QUARTER;

/// Upper bound on the bits `finish` adds beyond the ideal code length.
pub const FLUSH_SLACK_BITS: u64 = 33;

#[derive(Clone, Debug, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    bits: u64,
}

impl BitWriter {
    #[inline]
    pub fn push(&mut self, bit: bool) {
        if self.bits.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> (self.bits % 8);
        }
        self.bits += 1;
    }

    pub fn bit_len(&self) -> u64 {
        self.bits
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

#[derive(Clone, Debug)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        BitReader { bytes, pos: 0 }
    }

    #[inline]
    pub fn next_bit(&mut self) -> bool {
        let byte = self.bytes.get((self.pos / 8) as usize).copied().unwrap_or(0);
        let bit = byte & (0x80 >> (self.pos % 8)) != 0;
        self.pos += 1;
        bit
    }

    /// Bits consumed so far, including zeros read past the end.
    pub fn position(&self) -> u64 {
        self.pos
    }

    /// Bits consumed past the end of the input.
    pub fn overrun(&self) -> u64 {
        self.pos.saturating_sub(self.bytes.len() as u64 * 8)
    }
}

#[inline]
fn check_interval(cum_low: u32, count: u32, total: u32) {
    debug_assert!(count > 0, "zero-width interval");
    debug_assert!(cum_low as u64 + count as u64 <= total as u64, "interval beyond total");
    debug_assert!(total <= CODER_TOTAL_LIMIT, "model total {total} exceeds coder precision");
}

#[inline]
fn subdivide(low: u32, high: u32, cum_low: u32, count: u32, total: u32) -> (u32, u32) {
    let range = (high - low) as u64 + 1;
    let total = total as u64;
    let new_high = low as u64 + range * (cum_low + count) as u64 / total - 1;
    let new_low = low as u64 + range * cum_low as u64 / total;
    (new_low as u32, new_high as u32)
}

#[derive(Clone, Debug)]
pub struct Encoder {
    low: u32,
    high: u32,
    pending: u64,
    out: BitWriter,
}

impl Default for Encoder {
    fn default() -> Self {
        Self::new()
    }
}

impl Encoder {
    pub fn new() -> Self {
        Encoder {
            low: 0,
            high: u32::MAX,
            pending: 0,
            out: BitWriter::default(),
        }
    }

    #[inline]
    fn emit(&mut self, bit: bool) {
        self.out.push(bit);
        for _ in 0..self.pending {
            self.out.push(!bit);
        }
        self.pending = 0;
    }

    /// Narrows the interval to `[cum_low, cum_low + count)` out of `total`.
    pub fn encode(&mut self, cum_low: u32, count: u32, total: u32) {
        check_interval(cum_low, count, total);
        (self.low, self.high) = subdivide(self.low, self.high, cum_low, count, total);
        loop {
            if self.high < HALF {
                self.emit(false);
            } else if self.low >= HALF {
                self.emit(true);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < THREE_QUARTERS {
                self.pending += 1;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
        }
    }

    /// Bits emitted so far, counting pending ones.
    pub fn bits_so_far(&self) -> u64 {
        self.out.bit_len() + self.pending
    }

    /// Emits the disambiguating tail and returns `(bytes, bit_len)`.
    pub fn finish(mut self) -> (Vec<u8>, u64) {
        if self.pending == 0 && self.low == 0 && self.high == u32::MAX {
            // Full interval: any continuation, including the zero padding, decodes.
            let bits = self.out.bit_len();
            return (self.out.into_bytes(), bits);
        }
        self.pending += 1;
        if self.low < QUARTER {
            self.emit(false);
        } else {
            self.emit(true);
        }
        let bits = self.out.bit_len();
        (self.out.into_bytes(), bits)
    }
}

#[derive(Clone, Debug)]
pub struct Decoder<'a> {
    low: u32,
    high: u32,
    value: u32,
    input: BitReader<'a>,
}

impl<'a> Decoder<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        let mut input = BitReader::new(bytes);
        let mut value = 0u32;
        for _ in 0..32 {
            value = (value << 1) | input.next_bit() as u32;
        }
        Decoder {
            low: 0,
            high: u32::MAX,
            value,
            input,
        }
    }

    /// Scaled position of the code value within `total`; the caller picks
    /// the interval containing it and passes that interval to `consume`.
    pub fn target(&self, total: u32) -> u32 {
        let range = (self.high - self.low) as u64 + 1;
        let offset = (self.value - self.low) as u64 + 1;
        ((offset * total as u64 - 1) / range) as u32
    }

    pub fn consume(&mut self, cum_low: u32, count: u32, total: u32) {
        check_interval(cum_low, count, total);
        (self.low, self.high) = subdivide(self.low, self.high, cum_low, count, total);
        loop {
            if self.high < HALF {
            } else if self.low >= HALF {
                self.low -= HALF;
                self.high -= HALF;
                self.value -= HALF;
            } else if self.low >= QUARTER && self.high < THREE_QUARTERS {
                self.low -= QUARTER;
                self.high -= QUARTER;
                self.value -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
            self.value = (self.value << 1) | self.input.next_bit() as u32;
        }
    }

    /// Bits read past the end of the input. A valid stream never needs more
    /// than 32 of them.
    pub fn overrun(&self) -> u64 {
        self.input.overrun()
    }
}
