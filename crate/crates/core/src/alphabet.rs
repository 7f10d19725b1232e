//! Byte alphabets.
//!
//! The alphabet order defines symbol indices: `a_1` is `symbols()[0]`, and
//! the level-0 models enumerate symbols in this order. Inferred alphabets
//! are sorted by byte value so they can be reproduced from a header.

use crate::error::{Error, Result};

const ABSENT: u16 = u16::MAX;

#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<u8>,
    index: [u16; 256],
}

impl Alphabet {
    /// Builds an alphabet from symbols in index order.
    pub fn new(symbols: Vec<u8>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidParams("alphabet must not be empty".into()));
        }
        let mut index = [ABSENT; 256];
        for (k, &b) in symbols.iter().enumerate() {
            if index[b as usize] != ABSENT {
                return Err(Error::InvalidParams(format!(
                    "alphabet lists byte {b:#04x} twice"
                )));
            }
            index[b as usize] = k as u16;
        }
        Ok(Alphabet { symbols, index })
    }

    /// Distinct bytes of `data` in ascending order; `{0x00}` for empty input.
    pub fn infer(data: &[u8]) -> Self {
        let mut seen = [false; 256];
        for &b in data {
            seen[b as usize] = true;
        }
        let mut symbols: Vec<u8> = (0..=255u8).filter(|&b| seen[b as usize]).collect();
        if symbols.is_empty() {
            symbols.push(0);
        }
        Alphabet::new(symbols).expect("inferred symbols are distinct and non-empty")
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// `a_1`, the symbol used to build fixed initial contexts.
    pub fn first(&self) -> u8 {
        self.symbols[0]
    }

    /// Zero-based position of `byte` in index order.
    #[inline]
    pub fn position(&self, byte: u8) -> Option<usize> {
        match self.index[byte as usize] {
            ABSENT => None,
            k => Some(k as usize),
        }
    }

    #[inline]
    pub fn symbol(&self, position: usize) -> u8 {
        self.symbols[position]
    }

    pub fn contains(&self, byte: u8) -> bool {
        self.index[byte as usize] != ABSENT
    }

    /// Fails on the first byte of `data` outside the alphabet.
    pub fn check(&self, data: &[u8]) -> Result<()> {
        match data.iter().position(|&b| !self.contains(b)) {
            Some(offset) => Err(Error::SymbolNotInAlphabet {
                byte: data[offset],
                offset,
            }),
            None => Ok(()),
        }
    }
}

impl std::fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Alphabet")
            .field("symbols", &self.symbols)
            .finish()
    }
}
