//! The context-dependent multilevel pattern matching transform.
//!
//! The input is cut into blocks of `r^i` symbols on each level `i`. On every
//! level above 0 a block is labelled with its context class (the content of
//! the preceding block on that level, or a fixed block of `a_1` for the
//! first one) and then with a token: `s` when its content is new within the
//! class, or `m` when it repeats the `m`-th distinct content of the class.
//! Only blocks labelled `s` are split into `r` children on the next level
//! down. Level 0 keeps the raw symbols.
//!
//! Blocks are never copied: each one is an offset into the input, and every
//! block of a level has the same length.

mod grammar;
mod trace;

use std::collections::HashMap;

pub use grammar::{Grammar, GrammarSymbol, Nonterminal};
pub use trace::render_trace;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::partition::{rary_expansion, LevelLengths, Mode, Params};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Token {
    /// First appearance of a content within its class. `forced` marks the
    /// first block of the class, which the decoder can infer.
    S { forced: bool },
    /// Repeat of the `m`-th distinct content of the class (1-based).
    Repeat(u32),
    /// Level-0 symbol.
    Symbol(u8),
}

impl Token {
    pub fn is_s(&self) -> bool {
        matches!(self, Token::S { .. })
    }

    pub fn is_forced(&self) -> bool {
        matches!(self, Token::S { forced: true })
    }
}

/// One distinct context on a level above 0, with the distinct block
/// contents that appeared under it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextClass {
    pub label: u32,
    /// Offset of the block whose content is the context; `None` for the
    /// fixed initial context.
    pub context: Option<usize>,
    /// Offsets of the first occurrence of each distinct content, in order of
    /// appearance. `Repeat(m)` refers to `distinct[m - 1]`.
    pub distinct: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSequence {
    pub level: u32,
    pub block_len: usize,
    /// Start offset of every block `X̃_j` in the input.
    pub offsets: Vec<usize>,
    /// Class label of every block. On level 0 this is the context symbol
    /// itself.
    pub labels: Vec<u32>,
    pub tokens: Vec<Token>,
    /// For `s` blocks, the index of the first of their `r` children on the
    /// level below.
    pub first_child: Vec<Option<usize>>,
    /// Index of the first block cut from this level's own substring.
    pub tail_start: usize,
    /// Classes indexed by `label - 1`; empty on level 0.
    pub classes: Vec<ContextClass>,
}

impl LevelSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn s_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_s()).count()
    }

    /// Number of distinct context labels on this level.
    pub fn class_count(&self) -> usize {
        if self.level == 0 {
            let mut seen = [false; 256];
            for &l in &self.labels {
                seen[l as usize] = true;
            }
            seen.iter().filter(|&&s| s).count()
        } else {
            self.classes.len()
        }
    }
}

#[derive(Clone, Debug)]
pub struct MultilevelRepresentation {
    params: Params,
    alphabet: Alphabet,
    lengths: LevelLengths,
    data: Vec<u8>,
    /// Indexed by level.
    levels: Vec<LevelSequence>,
}

impl MultilevelRepresentation {
    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn lengths(&self) -> &LevelLengths {
        &self.lengths
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn top_level(&self) -> u32 {
        self.lengths.top_level()
    }

    pub fn level(&self, level: u32) -> &LevelSequence {
        &self.levels[level as usize]
    }

    /// Levels from the top down to 0.
    pub fn levels(&self) -> impl Iterator<Item = &LevelSequence> {
        self.levels.iter().rev()
    }

    pub fn block(&self, level: u32, index: usize) -> &[u8] {
        let seq = &self.levels[level as usize];
        let off = seq.offsets[index];
        &self.data[off..off + seq.block_len]
    }

    /// Root blocks: the whole top level, then the tail blocks of every lower
    /// level in descending order.
    pub fn roots(&self) -> Vec<(u32, usize)> {
        self.levels()
            .flat_map(|seq| (seq.tail_start..seq.len()).map(move |j| (seq.level, j)))
            .collect()
    }

    /// Depth-first token stream: each `s` above level 0 is followed by the
    /// entries of its children, roots follow one another in `roots()` order.
    pub fn flatten(&self) -> FlatStream {
        let mut entries = Vec::with_capacity(self.levels.iter().map(|l| l.len()).sum());
        let mut next = vec![0usize; self.levels.len()];
        for (level, j) in self.roots() {
            self.visit(level, j, &mut next, &mut entries);
        }
        debug_assert!(self
            .levels
            .iter()
            .zip(&next)
            .all(|(seq, &seen)| seq.len() == seen));
        FlatStream { entries }
    }

    fn visit(&self, level: u32, j: usize, next: &mut [usize], out: &mut Vec<FlatEntry>) {
        // Depth-first order must meet each level's blocks in sequence order.
        debug_assert_eq!(next[level as usize], j);
        next[level as usize] += 1;
        let seq = &self.levels[level as usize];
        let token = seq.tokens[j];
        out.push(FlatEntry {
            level,
            label: seq.labels[j],
            token,
            block: j,
        });
        if let Some(first) = seq.first_child[j] {
            for c in 0..self.params.r() as usize {
                self.visit(level - 1, first + c, next, out);
            }
        }
    }

    /// Rebuilds the input from tokens, class labels, and child links alone,
    /// resolving repeats against the contents rebuilt so far.
    pub fn expand(&self) -> Result<Vec<u8>> {
        let mut distinct: Vec<HashMap<u32, Vec<Vec<u8>>>> = vec![HashMap::new(); self.levels.len()];
        let mut out = Vec::with_capacity(self.data.len());
        for (level, j) in self.roots() {
            let block = self.expand_block(level, j, &mut distinct)?;
            out.extend_from_slice(&block);
        }
        Ok(out)
    }

    fn expand_block(
        &self,
        level: u32,
        j: usize,
        distinct: &mut [HashMap<u32, Vec<Vec<u8>>>],
    ) -> Result<Vec<u8>> {
        let seq = &self.levels[level as usize];
        let label = seq.labels[j];
        match seq.tokens[j] {
            Token::Symbol(b) => Ok(vec![b]),
            Token::Repeat(m) => distinct[level as usize]
                .get(&label)
                .and_then(|list| list.get(m as usize - 1))
                .cloned()
                .ok_or_else(|| {
                    Error::Invariant(format!(
                        "repeat {m} on level {level} class {label} has no earlier block"
                    ))
                }),
            Token::S { .. } => {
                let first = seq.first_child[j].ok_or_else(|| {
                    Error::Invariant(format!("s block {j} on level {level} has no children"))
                })?;
                let mut content = Vec::with_capacity(seq.block_len);
                for c in 0..self.params.r() as usize {
                    content.extend(self.expand_block(level - 1, first + c, distinct)?);
                }
                distinct[level as usize]
                    .entry(label)
                    .or_default()
                    .push(content.clone());
                Ok(content)
            }
        }
    }

    pub fn grammar(&self) -> Grammar {
        Grammar::from_representation(self)
    }
}

/// One token of the depth-first stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlatEntry {
    pub level: u32,
    /// Class label; the context symbol on level 0.
    pub label: u32,
    pub token: Token,
    /// Block index within its level.
    pub block: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlatStream {
    pub entries: Vec<FlatEntry>,
}

impl FlatStream {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries that reach the coder: everything except forced `s`.
    pub fn coded(&self) -> impl Iterator<Item = &FlatEntry> {
        self.entries.iter().filter(|e| !e.token.is_forced())
    }

    /// Entry count per level, indexed by level.
    pub fn level_tallies(&self) -> Vec<usize> {
        let top = self.entries.iter().map(|e| e.level).max().unwrap_or(0);
        let mut tallies = vec![0; top as usize + 1];
        for e in &self.entries {
            tallies[e.level as usize] += 1;
        }
        tallies
    }
}

/// Runs the transform on `data`. Every byte must belong to `alphabet`.
pub fn build_multilevel(
    data: &[u8],
    params: Params,
    alphabet: &Alphabet,
) -> Result<MultilevelRepresentation> {
    alphabet.check(data)?;
    let r = params.r() as usize;
    let lengths = rary_expansion(data.len(), params.r(), params.levels());
    let top = lengths.top_level();
    let a1 = alphabet.first();

    let mut levels: Vec<LevelSequence> = Vec::with_capacity(top as usize + 1);
    // Offsets of the children of the previous level's `s` blocks.
    let mut children: Vec<usize> = Vec::new();

    for level in (0..=top).rev() {
        let block_len = lengths.block_len(level);
        let mut offsets = std::mem::take(&mut children);
        let tail_start = offsets.len();
        let base = lengths.offset(level);
        offsets.extend((0..lengths.tail_blocks(level)).map(|k| base + k * block_len));

        let seq = if level == 0 {
            level_zero(data, &offsets, tail_start, params.mode(), a1)
        } else {
            let fixed = vec![a1; block_len];
            let seq = label_level(data, &fixed, level, block_len, offsets, tail_start, params.mode(), r);
            let child_len = block_len / r;
            for (j, first) in seq.first_child.iter().enumerate() {
                if first.is_some() {
                    let off = seq.offsets[j];
                    children.extend((0..r).map(|c| off + c * child_len));
                }
            }
            seq
        };
        levels.push(seq);
    }
    levels.reverse();

    Ok(MultilevelRepresentation {
        params,
        alphabet: alphabet.clone(),
        lengths,
        data: data.to_vec(),
        levels,
    })
}

#[allow(clippy::too_many_arguments)]
fn label_level(
    data: &[u8],
    fixed: &[u8],
    level: u32,
    block_len: usize,
    offsets: Vec<usize>,
    tail_start: usize,
    mode: Mode,
    r: usize,
) -> LevelSequence {
    let block = |j: usize| &data[offsets[j]..offsets[j] + block_len];
    let count = offsets.len();
    let mut labels = Vec::with_capacity(count);
    let mut tokens = Vec::with_capacity(count);
    let mut first_child = Vec::with_capacity(count);
    let mut classes: Vec<ContextClass> = Vec::new();
    let mut context_table: HashMap<&[u8], u32> = HashMap::new();
    let mut content_table: HashMap<(u32, &[u8]), u32> = HashMap::new();
    let mut next_child = 0usize;

    for j in 0..count {
        let (context, context_off) = if j == 0 || mode == Mode::Mpm {
            (fixed, None)
        } else {
            (block(j - 1), Some(offsets[j - 1]))
        };
        let label = *context_table.entry(context).or_insert_with(|| {
            classes.push(ContextClass {
                label: classes.len() as u32 + 1,
                context: context_off,
                distinct: Vec::new(),
            });
            classes.len() as u32
        });
        let class = &mut classes[label as usize - 1];
        let content = block(j);
        let token = match content_table.get(&(label, content)) {
            Some(&m) => {
                first_child.push(None);
                Token::Repeat(m)
            }
            None => {
                let forced = class.distinct.is_empty();
                class.distinct.push(offsets[j]);
                content_table.insert((label, content), class.distinct.len() as u32);
                first_child.push(Some(next_child));
                next_child += r;
                Token::S { forced }
            }
        };
        labels.push(label);
        tokens.push(token);
    }

    LevelSequence {
        level,
        block_len,
        offsets,
        labels,
        tokens,
        first_child,
        tail_start,
        classes,
    }
}

fn level_zero(data: &[u8], offsets: &[usize], tail_start: usize, mode: Mode, a1: u8) -> LevelSequence {
    let mut labels = Vec::with_capacity(offsets.len());
    let mut tokens = Vec::with_capacity(offsets.len());
    let mut previous = a1;
    for &off in offsets {
        let symbol = data[off];
        labels.push(match mode {
            Mode::Cdmpm => previous as u32,
            Mode::Mpm => a1 as u32,
        });
        tokens.push(Token::Symbol(symbol));
        previous = symbol;
    }
    LevelSequence {
        level: 0,
        block_len: 1,
        offsets: offsets.to_vec(),
        labels,
        first_child: vec![None; tokens.len()],
        tokens,
        tail_start,
        classes: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: Token = Token::S { forced: false };
    const SF: Token = Token::S { forced: true };

    fn rep(data: &[u8], r: u32, levels: u32, mode: Mode) -> MultilevelRepresentation {
        let params = Params::new(r, levels, mode).unwrap();
        build_multilevel(data, params, &Alphabet::infer(data)).unwrap()
    }

    fn blocks(rep: &MultilevelRepresentation, level: u32) -> Vec<&[u8]> {
        (0..rep.level(level).len()).map(|j| rep.block(level, j)).collect()
    }

    #[test]
    fn ababab_levels() {
        let rep = rep(b"ababab", 2, 1, Mode::Cdmpm);
        assert_eq!(rep.top_level(), 1);
        let l1 = rep.level(1);
        assert_eq!(blocks(&rep, 1), [b"ab", b"ab", b"ab"]);
        assert_eq!(l1.labels, [1, 2, 2]);
        assert_eq!(l1.tokens, [SF, SF, Token::Repeat(1)]);
        assert_eq!(l1.classes[0].context, None);
        assert_eq!(l1.classes[1].context, Some(0));

        let l0 = rep.level(0);
        assert_eq!(blocks(&rep, 0), [b"a", b"b", b"a", b"b"]);
        assert_eq!(l0.labels, [b'a' as u32, b'a' as u32, b'b' as u32, b'a' as u32]);
        let symbols: Vec<Token> = b"abab".iter().map(|&b| Token::Symbol(b)).collect();
        assert_eq!(l0.tokens, symbols);
    }

    #[test]
    fn abab_contexts_split_identical_blocks() {
        let rep = rep(b"abab", 2, 1, Mode::Cdmpm);
        assert_eq!(rep.level(1).tokens, [SF, SF]);
    }

    #[test]
    fn abab_mpm_repeats() {
        let rep = rep(b"abab", 2, 1, Mode::Mpm);
        assert_eq!(rep.level(1).tokens, [SF, Token::Repeat(1)]);
        assert_eq!(rep.level(1).labels, [1, 1]);
        assert_eq!(blocks(&rep, 0), [b"a", b"b"]);
    }

    #[test]
    fn aa_single_block() {
        let rep = rep(b"aa", 2, 1, Mode::Cdmpm);
        assert_eq!(rep.level(1).tokens, [SF]);
        assert_eq!(rep.level(0).tokens, [Token::Symbol(b'a'), Token::Symbol(b'a')]);
        assert_eq!(rep.level(0).labels, [b'a' as u32, b'a' as u32]);
    }

    #[test]
    fn ababab_flat_stream() {
        let rep = rep(b"ababab", 2, 1, Mode::Cdmpm);
        let flat = rep.flatten();
        let got: Vec<(u32, u32, Token)> = flat.entries.iter().map(|e| (e.level, e.label, e.token)).collect();
        let (a, b) = (b'a' as u32, b'b' as u32);
        assert_eq!(
            got,
            [
                (1, 1, SF),
                (0, a, Token::Symbol(b'a')),
                (0, a, Token::Symbol(b'b')),
                (1, 2, SF),
                (0, b, Token::Symbol(b'a')),
                (0, a, Token::Symbol(b'b')),
                (1, 2, Token::Repeat(1)),
            ]
        );
        let coded: Vec<Token> = flat.coded().map(|e| e.token).collect();
        assert_eq!(
            coded,
            [
                Token::Symbol(b'a'),
                Token::Symbol(b'b'),
                Token::Symbol(b'a'),
                Token::Symbol(b'b'),
                Token::Repeat(1)
            ]
        );
        assert_eq!(flat.level_tallies(), [4, 3]);
    }

    #[test]
    fn aa_coded_stream() {
        let rep = rep(b"aa", 2, 1, Mode::Cdmpm);
        let coded: Vec<Token> = rep.flatten().coded().map(|e| e.token).collect();
        assert_eq!(coded, [Token::Symbol(b'a'), Token::Symbol(b'a')]);
    }

    #[test]
    fn tails_follow_higher_levels() {
        // 11 = 1011b: 8 symbols on level 2, 2 on level 1, 1 on level 0.
        let rep = rep(b"abcdabcdxyz", 2, 2, Mode::Cdmpm);
        assert_eq!(rep.roots(), [(2, 0), (2, 1), (1, 4), (0, 8)]);
        assert_eq!(rep.level(1).tail_start, 4);
        assert_eq!(blocks(&rep, 1), [b"ab", b"cd", b"ab", b"cd", b"xy"]);
        assert_eq!(rep.level(1).labels, [1, 2, 3, 2, 3]);
        assert_eq!(rep.level(1).tokens, [SF, SF, SF, Token::Repeat(1), S]);
        let flat = rep.flatten();
        let last = flat.entries.last().unwrap();
        assert_eq!((last.level, last.token), (0, Token::Symbol(b'z')));
        assert_eq!(rep.expand().unwrap(), b"abcdabcdxyz");
    }

    #[test]
    fn repeat_across_distinct_blocks() {
        // Level 1 under MPM: ab cd ab ab -> s* s 1 1.
        let rep = rep(b"abcdabab", 2, 1, Mode::Mpm);
        assert_eq!(
            rep.level(1).tokens,
            [SF, S, Token::Repeat(1), Token::Repeat(1)]
        );
        assert_eq!(rep.expand().unwrap(), b"abcdabab");
    }

    #[test]
    fn single_class_per_level_in_mpm() {
        let data: Vec<u8> = (0..500u32).map(|i| (i * 7 % 13) as u8).collect();
        let rep = rep(&data, 2, 8, Mode::Mpm);
        for seq in rep.levels().filter(|s| s.level > 0 && !s.is_empty()) {
            assert_eq!(seq.tokens.iter().filter(|t| t.is_forced()).count(), 1);
        }
    }

    #[test]
    fn all_distinct_neighbours_give_singleton_classes() {
        // Consecutive level-1 blocks always differ, and so do their
        // predecessors, so every class holds one block.
        let data: Vec<u8> = (0..64u8).collect();
        let rep = rep(&data, 2, 1, Mode::Cdmpm);
        let l1 = rep.level(1);
        assert!(l1.tokens.iter().all(|t| t.is_forced()));
        assert_eq!(l1.classes.len(), l1.len());
    }

    #[test]
    fn empty_and_single_symbol() {
        let rep0 = rep(b"", 2, 4, Mode::Cdmpm);
        assert_eq!(rep0.top_level(), 0);
        assert!(rep0.flatten().is_empty());
        assert_eq!(rep0.expand().unwrap(), b"");

        let rep1 = rep(b"q", 2, 4, Mode::Cdmpm);
        assert_eq!(rep1.top_level(), 0);
        assert_eq!(rep1.level(0).tokens, [Token::Symbol(b'q')]);
        assert_eq!(rep1.expand().unwrap(), b"q");
    }

    #[test]
    fn rejects_foreign_symbol() {
        let params = Params::new(2, 1, Mode::Cdmpm).unwrap();
        let err = build_multilevel(b"abc", params, &Alphabet::infer(b"ab")).unwrap_err();
        assert!(matches!(err, Error::SymbolNotInAlphabet { byte: b'c', offset: 2 }));
    }

    #[test]
    fn count_identity() {
        let data: Vec<u8> = (0..1000u32).map(|i| ((i * i) % 5) as u8).collect();
        for mode in [Mode::Cdmpm, Mode::Mpm] {
            let rep = rep(&data, 3, 5, mode);
            for level in 0..rep.top_level() {
                let above = rep.level(level + 1).s_count();
                let expected = 3 * above + rep.lengths().tail_blocks(level);
                assert_eq!(rep.level(level).len(), expected);
            }
        }
    }
}
