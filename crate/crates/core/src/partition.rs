//! Transform parameters and the r-ary split of the input into per-level
//! substrings.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest level count a container can record.
pub const MAX_LEVELS: u32 = 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Blocks are matched only against blocks that share their context
    /// (the content of the preceding block on the same level).
    Cdmpm,
    /// Context-free matching: every block on a level shares one class.
    Mpm,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Cdmpm => "cdmpm",
            Mode::Mpm => "mpm",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cdmpm" => Ok(Mode::Cdmpm),
            "mpm" => Ok(Mode::Mpm),
            other => Err(Error::InvalidParams(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    r: u32,
    levels: u32,
    mode: Mode,
}

impl Params {
    /// `r` is the branching factor (2..=255), `levels` the requested level
    /// count (0..=63). The effective count is clamped per input.
    pub fn new(r: u32, levels: u32, mode: Mode) -> Result<Self> {
        if !(2..=255).contains(&r) {
            return Err(Error::InvalidParams(format!("r must be in 2..=255, got {r}")));
        }
        if levels > MAX_LEVELS {
            return Err(Error::InvalidParams(format!(
                "level count must be at most {MAX_LEVELS}, got {levels}"
            )));
        }
        Ok(Params { r, levels, mode })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// `min(levels, floor(log_r n))`, and 0 for `n == 0`.
    pub fn effective_levels(&self, n: usize) -> u32 {
        self.levels.min(floor_log(n, self.r as usize))
    }
}

/// `floor(log_base n)`, with 0 for `n <= 1`.
pub fn floor_log(n: usize, base: usize) -> u32 {
    debug_assert!(base >= 2);
    let mut k = 0;
    let mut p = base;
    while p <= n {
        k += 1;
        match p.checked_mul(base) {
            Some(next) => p = next,
            None => break,
        }
    }
    k
}

/// Per-level substring lengths `n_i`, indexed by level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelLengths {
    r: usize,
    lengths: Vec<usize>,
}

impl LevelLengths {
    /// The effective level count; the top level is `top_level()`.
    pub fn top_level(&self) -> u32 {
        (self.lengths.len() - 1) as u32
    }

    /// `n_i` for `level <= top_level()`.
    pub fn get(&self, level: u32) -> usize {
        self.lengths[level as usize]
    }

    /// Block length `r^i` on `level`.
    pub fn block_len(&self, level: u32) -> usize {
        self.r.pow(level)
    }

    /// Number of blocks `n_i / r^i` the substring of `level` contributes.
    pub fn tail_blocks(&self, level: u32) -> usize {
        self.get(level) / self.block_len(level)
    }

    pub fn total(&self) -> usize {
        self.lengths.iter().sum()
    }

    /// Lengths from the top level down to level 0.
    pub fn descending(&self) -> impl Iterator<Item = (u32, usize)> + '_ {
        self.lengths
            .iter()
            .enumerate()
            .rev()
            .map(|(i, &len)| (i as u32, len))
    }

    /// Start offset in the input of the substring belonging to `level`.
    pub fn offset(&self, level: u32) -> usize {
        self.lengths[level as usize + 1..].iter().sum()
    }
}

/// Splits `n` by its base-`r` digits: every digit at a position `>= I_eff`
/// goes to the top level, digit `h_i` below it contributes `h_i * r^i`.
pub fn rary_expansion(n: usize, r: u32, levels: u32) -> LevelLengths {
    assert!(r >= 2, "branching factor must be at least 2");
    let r = r as usize;
    let top = levels.min(floor_log(n, r));
    let mut lengths = vec![0usize; top as usize + 1];
    let mut rest = n;
    let mut scale = 1usize;
    for len in lengths.iter_mut().take(top as usize) {
        let digit = rest % r;
        rest /= r;
        *len = digit * scale;
        scale *= r;
    }
    lengths[top as usize] = rest * scale;
    LevelLengths { r, lengths }
}

/// Slices `data` into the per-level substrings, top level first.
pub fn top_partition<'a>(data: &'a [u8], lengths: &LevelLengths) -> Result<Vec<&'a [u8]>> {
    if lengths.total() != data.len() {
        return Err(Error::Invariant(format!(
            "level lengths sum to {} but input has {} symbols",
            lengths.total(),
            data.len()
        )));
    }
    let mut parts = Vec::with_capacity(lengths.top_level() as usize + 1);
    let mut rest = data;
    for (_, len) in lengths.descending() {
        let (head, tail) = rest.split_at(len);
        parts.push(head);
        rest = tail;
    }
    Ok(parts)
}
