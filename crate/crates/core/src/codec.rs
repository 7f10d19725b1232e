//! Container format, encoder, and decoder.
//!
//! Layout (all integers big-endian):
//!
//! | bytes     | field                                              |
//! |-----------|----------------------------------------------------|
//! | 0..4      | magic `CDMP`                                       |
//! | 4         | version, `0x01`                                    |
//! | 5         | flags: bit 0 set for context-dependent matching    |
//! | 6         | `r` (2..=255)                                      |
//! | 7         | requested level count (0..=63)                     |
//! | 8..16     | `n`, the input length                              |
//! | 16..18    | alphabet size (1..=256)                            |
//! | 18..      | alphabet symbols in index order                    |
//! | rest      | arithmetic-coded payload, MSB-first, zero-padded   |
//!
//! The payload codes the depth-first token stream without the forced `s`
//! tokens. The decoder walks the same depth-first order: by the time a block
//! is reached, the block before it on the same level is complete, so its
//! context is known, and a context seen for the first time implies a forced
//! `s` without reading any bits.

use std::collections::HashMap;

use crate::alphabet::Alphabet;
use crate::coder::{ClassModel, ClassToken, Decoder, Encoder, Interval, Level0Model};
use crate::error::{Error, Result};
use crate::partition::{rary_expansion, Mode, Params, MAX_LEVELS};
use crate::transform::{build_multilevel, MultilevelRepresentation, Token};

pub const MAGIC: [u8; 4] = *b"CDMP";
pub const VERSION: u8 = 1;
const FLAG_CONTEXT: u8 = 0x01;
const FIXED_HEADER_LEN: usize = 18;

/// Inputs longer than this are refused by both directions.
pub const MAX_INPUT_LEN: u64 = 1 << 32;

/// Zero bits a valid payload may need past its last byte.
const MAX_OVERRUN_BITS: u64 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Header {
    pub params: Params,
    pub n: u64,
    pub alphabet: Alphabet,
}

impl Header {
    pub fn len(&self) -> usize {
        FIXED_HEADER_LEN + self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(match self.params.mode() {
            Mode::Cdmpm => FLAG_CONTEXT,
            Mode::Mpm => 0,
        });
        out.push(self.params.r() as u8);
        out.push(self.params.levels() as u8);
        out.extend_from_slice(&self.n.to_be_bytes());
        out.extend_from_slice(&(self.alphabet.len() as u16).to_be_bytes());
        out.extend_from_slice(self.alphabet.symbols());
    }
}

/// Decodes the header at the start of `bytes`.
pub fn parse_header(bytes: &[u8]) -> Result<Header> {
    let corrupt = |msg: &str| Error::Corrupt(msg.to_string());
    if bytes.len() < FIXED_HEADER_LEN {
        return Err(corrupt("truncated header"));
    }
    if bytes[0..4] != MAGIC {
        return Err(corrupt("bad magic"));
    }
    if bytes[4] != VERSION {
        return Err(Error::Corrupt(format!("unsupported version {}", bytes[4])));
    }
    let mode = match bytes[5] {
        0 => Mode::Mpm,
        FLAG_CONTEXT => Mode::Cdmpm,
        f => return Err(Error::Corrupt(format!("unknown flags {f:#04x}"))),
    };
    let r = bytes[6] as u32;
    if r < 2 {
        return Err(Error::Corrupt(format!("branching factor {r} below 2")));
    }
    let levels = bytes[7] as u32;
    if levels > MAX_LEVELS {
        return Err(Error::Corrupt(format!("level count {levels} above {MAX_LEVELS}")));
    }
    let params = Params::new(r, levels, mode).map_err(|e| Error::Corrupt(e.to_string()))?;
    let n = u64::from_be_bytes(bytes[8..16].try_into().unwrap());
    let size = u16::from_be_bytes([bytes[16], bytes[17]]) as usize;
    if size == 0 || size > 256 {
        return Err(Error::Corrupt(format!("alphabet size {size} outside 1..=256")));
    }
    let symbols = bytes
        .get(FIXED_HEADER_LEN..FIXED_HEADER_LEN + size)
        .ok_or_else(|| corrupt("truncated alphabet"))?;
    let alphabet =
        Alphabet::new(symbols.to_vec()).map_err(|e| Error::Corrupt(e.to_string()))?;
    Ok(Header { params, n, alphabet })
}

/// One coded token, as seen by either side of the codec.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodedStep {
    pub level: u32,
    /// Class label, or the context symbol on level 0.
    pub label: u32,
    pub token: Token,
    pub interval: Interval,
    /// Model total after the update.
    pub total_after: u32,
}

#[derive(Clone, Debug)]
pub struct Encoded {
    pub bytes: Vec<u8>,
    pub header_len: usize,
    /// Payload bits before zero padding.
    pub payload_bits: u64,
    /// Sum of `-log2 p` over coded tokens.
    pub ideal_bits: f64,
    pub coded_tokens: usize,
}

pub fn compress(data: &[u8], params: Params) -> Result<Vec<u8>> {
    Ok(compress_detailed(data, params)?.bytes)
}

/// Compresses with the alphabet inferred from `data`.
pub fn compress_detailed(data: &[u8], params: Params) -> Result<Encoded> {
    check_len(data.len() as u64)?;
    let rep = build_multilevel(data, params, &Alphabet::infer(data))?;
    encode_representation(&rep, |_| {})
}

fn check_len(n: u64) -> Result<()> {
    if n > MAX_INPUT_LEN {
        return Err(Error::InvalidParams(format!(
            "input of {n} symbols exceeds the {MAX_INPUT_LEN}-symbol limit"
        )));
    }
    Ok(())
}

/// Codes a representation, reporting every coded token to `observe`.
pub fn encode_representation(
    rep: &MultilevelRepresentation,
    mut observe: impl FnMut(&CodedStep),
) -> Result<Encoded> {
    let header = Header {
        params: *rep.params(),
        n: rep.data().len() as u64,
        alphabet: rep.alphabet().clone(),
    };
    let mut bytes = Vec::with_capacity(header.len() + rep.data().len() / 2);
    header.write(&mut bytes);
    let header_len = bytes.len();

    let alphabet = rep.alphabet();
    let mut classes: Vec<Vec<ClassModel>> = vec![Vec::new(); rep.top_level() as usize + 1];
    let mut level0 = Level0Model::new(alphabet.len());
    let mut encoder = Encoder::new();
    let mut ideal_bits = 0.0;
    let mut coded_tokens = 0;

    for entry in rep.flatten().entries {
        let models = &mut classes[entry.level as usize];
        let (interval, total_after) = match entry.token {
            Token::S { forced: true } => {
                debug_assert_eq!(models.len() + 1, entry.label as usize);
                models.push(ClassModel::new());
                continue;
            }
            Token::S { forced: false } => {
                code_class(&mut models[entry.label as usize - 1], ClassToken::S, &mut encoder)?
            }
            Token::Repeat(m) => code_class(
                &mut models[entry.label as usize - 1],
                ClassToken::Repeat(m),
                &mut encoder,
            )?,
            Token::Symbol(b) => {
                let context = position(alphabet, entry.label as u8)?;
                let symbol = position(alphabet, b)?;
                let iv = level0.interval(context, symbol);
                encoder.encode(iv.cum_low, iv.count, iv.total);
                level0.update(context, symbol);
                (iv, level0.total(context))
            }
        };
        ideal_bits += interval.cost();
        coded_tokens += 1;
        observe(&CodedStep {
            level: entry.level,
            label: entry.label,
            token: entry.token,
            interval,
            total_after,
        });
    }

    let (payload, payload_bits) = encoder.finish();
    bytes.extend_from_slice(&payload);
    Ok(Encoded {
        bytes,
        header_len,
        payload_bits,
        ideal_bits,
        coded_tokens,
    })
}

fn code_class(model: &mut ClassModel, token: ClassToken, encoder: &mut Encoder) -> Result<(Interval, u32)> {
    let iv = model.interval(token)?;
    encoder.encode(iv.cum_low, iv.count, iv.total);
    model.update(token)?;
    Ok((iv, model.total()))
}

fn position(alphabet: &Alphabet, byte: u8) -> Result<usize> {
    alphabet
        .position(byte)
        .ok_or_else(|| Error::Invariant(format!("byte {byte:#04x} missing from the alphabet")))
}

pub fn decompress(bytes: &[u8]) -> Result<Vec<u8>> {
    decompress_traced(bytes, |_| {})
}

/// Decompresses, reporting every decoded token to `observe`.
pub fn decompress_traced(bytes: &[u8], observe: impl FnMut(&CodedStep)) -> Result<Vec<u8>> {
    let header = parse_header(bytes)?;
    check_len(header.n).map_err(|e| Error::Corrupt(e.to_string()))?;
    let payload = &bytes[header.len()..];
    let n = header.n as usize;
    if n == 0 {
        if !payload.is_empty() {
            return Err(Error::Corrupt("payload present for empty input".into()));
        }
        return Ok(Vec::new());
    }

    let params = header.params;
    let lengths = rary_expansion(n, params.r(), params.levels());
    let top = lengths.top_level();
    let mut state = DecodeState {
        r: params.r() as usize,
        mode: params.mode(),
        a1: header.alphabet.first(),
        alphabet: &header.alphabet,
        decoder: Decoder::new(payload),
        out: vec![0; n],
        levels: (0..=top).map(|_| LevelState::default()).collect(),
        level0: Level0Model::new(header.alphabet.len()),
        observe,
    };
    for (level, len) in lengths.descending() {
        let block_len = lengths.block_len(level);
        let base = lengths.offset(level);
        for k in 0..len / block_len {
            state.block(level, block_len, base + k * block_len)?;
        }
    }
    Ok(state.out)
}

#[derive(Default)]
struct LevelState {
    /// Offset of the last completed block on this level.
    previous: Option<usize>,
    contexts: HashMap<Vec<u8>, u32>,
    /// Indexed by `label - 1`: the model and the offsets of distinct blocks.
    classes: Vec<(ClassModel, Vec<usize>)>,
}

struct DecodeState<'a, F> {
    r: usize,
    mode: Mode,
    a1: u8,
    alphabet: &'a Alphabet,
    decoder: Decoder<'a>,
    out: Vec<u8>,
    levels: Vec<LevelState>,
    level0: Level0Model,
    observe: F,
}

impl<F: FnMut(&CodedStep)> DecodeState<'_, F> {
    fn check_overrun(&self) -> Result<()> {
        if self.decoder.overrun() > MAX_OVERRUN_BITS {
            return Err(Error::Desync("payload exhausted".into()));
        }
        Ok(())
    }

    fn block(&mut self, level: u32, block_len: usize, off: usize) -> Result<()> {
        if level == 0 {
            return self.symbol(off);
        }
        let state = &mut self.levels[level as usize];
        let context = match (self.mode, state.previous) {
            (Mode::Cdmpm, Some(prev)) => &self.out[prev..prev + block_len],
            _ => &[][..],
        };
        // The empty key stands for the fixed context a_1^(r^i).
        let fixed_equal = !context.is_empty() && context.iter().all(|&b| b == self.a1);
        let key = if fixed_equal { &[][..] } else { context };
        let (label, fresh) = match state.contexts.get(key) {
            Some(&label) => (label, false),
            None => {
                let label = state.classes.len() as u32 + 1;
                state.contexts.insert(key.to_vec(), label);
                state.classes.push((ClassModel::new(), Vec::new()));
                (label, true)
            }
        };

        let token = if fresh {
            Token::S { forced: true }
        } else {
            let model = &mut state.classes[label as usize - 1].0;
            let target = self.decoder.target(model.total());
            let (token, iv) = model.lookup(target)?;
            self.decoder.consume(iv.cum_low, iv.count, iv.total);
            model.update(token)?;
            let token = match token {
                ClassToken::S => Token::S { forced: false },
                ClassToken::Repeat(m) => Token::Repeat(m),
            };
            (self.observe)(&CodedStep {
                level,
                label,
                token,
                interval: iv,
                total_after: model.total(),
            });
            self.check_overrun()?;
            token
        };

        match token {
            Token::Repeat(m) => {
                let src = self.levels[level as usize].classes[label as usize - 1].1[m as usize - 1];
                self.out.copy_within(src..src + block_len, off);
            }
            _ => {
                let child_len = block_len / self.r;
                for c in 0..self.r {
                    self.block(level - 1, child_len, off + c * child_len)?;
                }
                self.levels[level as usize].classes[label as usize - 1].1.push(off);
            }
        }
        self.levels[level as usize].previous = Some(off);
        Ok(())
    }

    fn symbol(&mut self, off: usize) -> Result<()> {
        let state = &mut self.levels[0];
        let context_symbol = match (self.mode, state.previous) {
            (Mode::Cdmpm, Some(prev)) => self.out[prev],
            _ => self.a1,
        };
        let context = self
            .alphabet
            .position(context_symbol)
            .expect("decoded symbols come from the alphabet");
        let target = self.decoder.target(self.level0.total(context));
        let (symbol, iv) = self.level0.lookup(context, target)?;
        self.decoder.consume(iv.cum_low, iv.count, iv.total);
        self.level0.update(context, symbol);
        let byte = self.alphabet.symbol(symbol);
        self.out[off] = byte;
        state.previous = Some(off);
        (self.observe)(&CodedStep {
            level: 0,
            label: context_symbol as u32,
            token: Token::Symbol(byte),
            interval: iv,
            total_after: self.level0.total(context),
        });
        self.check_overrun()
    }
}
