//! Empirical entropy of the grammar and the bounds it is measured against.
//!
//! All logarithms are base 2. Level entropies are unnormalised (total bits);
//! the order-1 entropy of the input is per symbol.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write};

use crate::alphabet::Alphabet;
use crate::codec::{encode_representation, Encoded};
use crate::coder::FLUSH_SLACK_BITS;
use crate::error::Result;
use crate::partition::{Mode, Params};
use crate::transform::{build_multilevel, LevelSequence, MultilevelRepresentation, Token};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelStats {
    pub level: u32,
    /// Number of `s` tokens, forced ones included.
    pub s_count: usize,
    /// Tokens that reach the coder: all but the forced `s` above level 0.
    pub coded: usize,
    pub blocks: usize,
    pub classes: usize,
}

pub fn level_stats(seq: &LevelSequence) -> LevelStats {
    let classes = seq.class_count();
    let coded = if seq.level == 0 {
        seq.len()
    } else {
        seq.len() - seq.classes.len()
    };
    LevelStats {
        level: seq.level,
        s_count: seq.s_count(),
        coded,
        blocks: seq.len(),
        classes,
    }
}

/// Non-`s` token counts of one class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassTally {
    pub label: u32,
    /// Repeat index (or symbol byte on level 0) to occurrences.
    pub counts: BTreeMap<u32, u64>,
    pub total: u64,
}

/// Groups the non-`s` tokens of a level by class.
pub fn level_tallies(seq: &LevelSequence) -> Vec<ClassTally> {
    let mut by_class: BTreeMap<u32, ClassTally> = BTreeMap::new();
    for (token, &label) in seq.tokens.iter().zip(&seq.labels) {
        let beta = match *token {
            Token::S { .. } => continue,
            Token::Repeat(m) => m,
            Token::Symbol(b) => b as u32,
        };
        let tally = by_class.entry(label).or_insert_with(|| ClassTally {
            label,
            counts: BTreeMap::new(),
            total: 0,
        });
        *tally.counts.entry(beta).or_insert(0) += 1;
        tally.total += 1;
    }
    by_class.into_values().collect()
}

/// `sum over classes and tokens of n(b) log(l''/n(b))`.
pub fn tally_entropy(tallies: &[ClassTally]) -> f64 {
    tallies
        .iter()
        .map(|t| {
            let total = t.total as f64;
            t.counts
                .values()
                .map(|&c| c as f64 * (total / c as f64).log2())
                .sum::<f64>()
        })
        .sum()
}

/// Unnormalised conditional entropy of the level's non-`s` tokens given
/// their classes.
pub fn level_entropy(seq: &LevelSequence) -> f64 {
    tally_entropy(&level_tallies(seq))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelEntropy {
    pub level: u32,
    pub bits: f64,
    pub tallies: Vec<ClassTally>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyReport {
    /// Top level first.
    pub levels: Vec<LevelEntropy>,
    /// Sum over all levels.
    pub total_bits: f64,
}

pub fn grammar_entropy(rep: &MultilevelRepresentation) -> EntropyReport {
    let levels: Vec<LevelEntropy> = rep
        .levels()
        .map(|seq| {
            let tallies = level_tallies(seq);
            LevelEntropy {
                level: seq.level,
                bits: tally_entropy(&tallies),
                tallies,
            }
        })
        .collect();
    let total_bits = levels.iter().map(|l| l.bits).sum();
    EntropyReport { levels, total_bits }
}

/// Total order-1 empirical entropy in bits, with `x_0 := a_1` as the first
/// context.
pub fn order1_entropy_bits(data: &[u8], alphabet: &Alphabet) -> f64 {
    let mut counts: HashMap<(u8, u8), u64> = HashMap::new();
    let mut context_totals = [0u64; 256];
    let mut previous = alphabet.first();
    for &b in data {
        *counts.entry((previous, b)).or_insert(0) += 1;
        context_totals[previous as usize] += 1;
        previous = b;
    }
    counts
        .iter()
        .map(|(&(c, _), &k)| k as f64 * (context_totals[c as usize] as f64 / k as f64).log2())
        .sum()
}

/// Order-1 empirical entropy per symbol; 0 for inputs shorter than 2.
pub fn order1_entropy(data: &[u8], alphabet: &Alphabet) -> f64 {
    if data.len() <= 1 {
        return 0.0;
    }
    order1_entropy_bits(data, alphabet) / data.len() as f64
}

/// `20 r log|A| (r log k + r log|A| + |A|^2 + 2r + 1)`; `None` when the
/// alphabet has one symbol and the bound degenerates.
pub fn theorem_constant(r: u32, k: u32, alphabet_size: usize) -> Option<f64> {
    assert!(k >= 1, "refinement state count must be positive");
    if alphabet_size < 2 {
        return None;
    }
    let r = r as f64;
    let a = alphabet_size as f64;
    let log_a = a.log2();
    Some(20.0 * r * log_a * (r * (k as f64).log2() + r * log_a + a * a + 2.0 * r + 1.0))
}

/// `H_G + 2 sum_{i>=0} l_i + |A|^2`.
pub fn lemma_bound(h_g: f64, coded: &[usize], alphabet_size: usize) -> f64 {
    let sum: usize = coded.iter().sum();
    h_g + 2.0 * sum as f64 + (alphabet_size * alphabet_size) as f64
}

/// The bound as printed: `H_G + 2 sum_{i>=1} l_i - l_0 + |A|^2`, with
/// `coded` indexed by level. Reported only.
pub fn lemma_bound_printed(h_g: f64, coded: &[usize], alphabet_size: usize) -> f64 {
    let l0 = coded.first().copied().unwrap_or(0) as f64;
    let upper: usize = coded.iter().skip(1).sum();
    h_g + 2.0 * upper as f64 - l0 + (alphabet_size * alphabet_size) as f64
}

/// `20 r^2 log|A| n / log n`, the growth bound on `sum l_i`.
pub fn sum_coded_bound(r: u32, alphabet_size: usize, n: usize) -> Option<f64> {
    if n < 2 || alphabet_size < 2 {
        return None;
    }
    let r = r as f64;
    let n = n as f64;
    Some(20.0 * r * r * (alphabet_size as f64).log2() * n / n.log2())
}

#[derive(Clone, Debug, PartialEq)]
pub struct RedundancyReport {
    pub n: usize,
    pub r: u32,
    pub levels_requested: u32,
    pub i_eff: u32,
    pub mode: Mode,
    pub k: u32,
    pub alphabet_size: usize,
    pub payload_bits: u64,
    pub ideal_bits: f64,
    pub h_g_bits: f64,
    pub h1_bits_per_symbol: f64,
    pub lemma_rhs_bits: f64,
    pub lemma_printed_rhs_bits: f64,
    pub theorem_c: Option<f64>,
    /// Top level first.
    pub levels: Vec<LevelStats>,
    pub level_entropy_bits: Vec<f64>,
}

impl RedundancyReport {
    pub fn bits_per_symbol(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.payload_bits as f64 / self.n as f64
        }
    }

    /// Payload bits per symbol above the order-1 entropy.
    pub fn redundancy(&self) -> f64 {
        self.bits_per_symbol() - self.h1_bits_per_symbol
    }

    pub fn lemma_pass(&self) -> bool {
        self.payload_bits as f64 <= self.lemma_rhs_bits + FLUSH_SLACK_BITS as f64
    }

    /// `C / log n`, undefined for `n < 2` or a one-symbol alphabet.
    pub fn theorem_bound(&self) -> Option<f64> {
        match self.theorem_c {
            Some(c) if self.n >= 2 => Some(c / (self.n as f64).log2()),
            _ => None,
        }
    }

    pub fn theorem_pass(&self) -> Option<bool> {
        self.theorem_bound().map(|b| self.redundancy() <= b)
    }

    pub fn sum_coded(&self) -> usize {
        self.levels.iter().map(|l| l.coded).sum()
    }

    pub fn sum_coded_bound(&self) -> Option<f64> {
        sum_coded_bound(self.r, self.alphabet_size, self.n)
    }

    pub fn sum_coded_pass(&self) -> Option<bool> {
        self.sum_coded_bound().map(|b| self.sum_coded() as f64 <= b)
    }

    pub fn level(&self, level: u32) -> Option<&LevelStats> {
        self.levels.iter().find(|l| l.level == level)
    }
}

fn opt<T: fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| v.to_string())
}

fn opt_f(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6}"))
}

impl fmt::Display for RedundancyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        writeln!(s, "n: {}", self.n)?;
        writeln!(s, "r: {}", self.r)?;
        writeln!(s, "levels_requested: {}", self.levels_requested)?;
        writeln!(s, "i_eff: {}", self.i_eff)?;
        writeln!(s, "mode: {}", self.mode)?;
        writeln!(s, "alphabet_size: {}", self.alphabet_size)?;
        writeln!(s, "k: {}", self.k)?;
        writeln!(s, "entropy_order: 1")?;
        writeln!(s, "payload_bits: {}", self.payload_bits)?;
        writeln!(s, "ideal_bits: {:.6}", self.ideal_bits)?;
        writeln!(s, "bits_per_symbol: {:.6}", self.bits_per_symbol())?;
        writeln!(s, "h_g_bits: {:.6}", self.h_g_bits)?;
        writeln!(s, "h1_bits_per_symbol: {:.6}", self.h1_bits_per_symbol)?;
        writeln!(s, "lemma_rhs_bits: {:.6}", self.lemma_rhs_bits)?;
        writeln!(s, "lemma_printed_rhs_bits: {:.6}", self.lemma_printed_rhs_bits)?;
        writeln!(s, "lemma_pass: {}", self.lemma_pass())?;
        writeln!(s, "theorem_c: {}", opt_f(self.theorem_c))?;
        writeln!(s, "theorem_bound: {}", opt_f(self.theorem_bound()))?;
        writeln!(s, "redundancy: {:.6}", self.redundancy())?;
        writeln!(s, "theorem_pass: {}", opt(self.theorem_pass()))?;
        writeln!(s, "sum_l: {}", self.sum_coded())?;
        writeln!(s, "sum_l_bound: {}", opt_f(self.sum_coded_bound()))?;
        writeln!(s, "sum_l_pass: {}", opt(self.sum_coded_pass()))?;
        for (stats, bits) in self.levels.iter().zip(&self.level_entropy_bits) {
            let i = stats.level;
            writeln!(s, "l_{i}: {}", stats.coded)?;
            writeln!(s, "f_s_{i}: {}", stats.s_count)?;
            writeln!(s, "blocks_{i}: {}", stats.blocks)?;
            writeln!(s, "classes_{i}: {}", stats.classes)?;
            writeln!(s, "h_{i}_bits: {bits:.6}")?;
        }
        f.write_str(&s)
    }
}

/// Builds the report from an existing representation and its encoding.
pub fn assemble_report(rep: &MultilevelRepresentation, encoded: &Encoded, k: u32) -> RedundancyReport {
    let entropy = grammar_entropy(rep);
    let levels: Vec<LevelStats> = rep.levels().map(level_stats).collect();
    let mut coded_by_level = vec![0; levels.len()];
    for s in &levels {
        coded_by_level[s.level as usize] = s.coded;
    }
    let a = rep.alphabet().len();
    let params = rep.params();
    RedundancyReport {
        n: rep.data().len(),
        r: params.r(),
        levels_requested: params.levels(),
        i_eff: rep.top_level(),
        mode: params.mode(),
        k,
        alphabet_size: a,
        payload_bits: encoded.payload_bits,
        ideal_bits: encoded.ideal_bits,
        h_g_bits: entropy.total_bits,
        h1_bits_per_symbol: order1_entropy(rep.data(), rep.alphabet()),
        lemma_rhs_bits: lemma_bound(entropy.total_bits, &coded_by_level, a),
        lemma_printed_rhs_bits: lemma_bound_printed(entropy.total_bits, &coded_by_level, a),
        theorem_c: theorem_constant(params.r(), k, a),
        levels,
        level_entropy_bits: entropy.levels.iter().map(|l| l.bits).collect(),
    }
}

/// Compresses `data` and measures it against the entropy bounds.
pub fn redundancy_report(data: &[u8], params: Params, k: u32) -> Result<RedundancyReport> {
    let rep = build_multilevel(data, params, &Alphabet::infer(data))?;
    let encoded = encode_representation(&rep, |_| {})?;
    Ok(assemble_report(&rep, &encoded, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(data: &[u8], r: u32, levels: u32, mode: Mode) -> MultilevelRepresentation {
        build_multilevel(data, Params::new(r, levels, mode).unwrap(), &Alphabet::infer(data)).unwrap()
    }

    fn log3() -> f64 {
        3f64.log2()
    }

    #[test]
    fn ababab_level_entropies() {
        let rep = rep(b"ababab", 2, 1, Mode::Cdmpm);
        assert_eq!(level_entropy(rep.level(1)), 0.0);
        assert!((level_entropy(rep.level(0)) - (3.0 * log3() - 2.0)).abs() < 1e-12);
        let e = grammar_entropy(&rep);
        assert!((e.total_bits - (3.0 * log3() - 2.0)).abs() < 1e-12);
        assert_eq!(e.levels[0].level, 1);
        assert_eq!(e.levels[0].tallies.len(), 1);
        assert_eq!(e.levels[0].tallies[0].label, 2);
    }

    #[test]
    fn constant_input_has_zero_grammar_entropy() {
        let data = vec![b'a'; 1000];
        for mode in [Mode::Cdmpm, Mode::Mpm] {
            assert_eq!(grammar_entropy(&rep(&data, 2, 1, mode)).total_bits, 0.0);
            assert_eq!(grammar_entropy(&rep(&data, 2, 9, mode)).total_bits, 0.0);
        }
        assert_eq!(grammar_entropy(&rep(b"", 2, 3, Mode::Cdmpm)).total_bits, 0.0);
    }

    #[test]
    fn ababab_stats() {
        let rep = rep(b"ababab", 2, 1, Mode::Cdmpm);
        let l1 = level_stats(rep.level(1));
        assert_eq!((l1.s_count, l1.coded, l1.blocks, l1.classes), (2, 1, 3, 2));
        let l0 = level_stats(rep.level(0));
        assert_eq!((l0.s_count, l0.coded, l0.blocks, l0.classes), (0, 4, 4, 2));
    }

    #[test]
    fn order1_values() {
        let a = Alphabet::infer(b"ab");
        let bits = order1_entropy_bits(b"ababab", &a);
        assert!((bits - (8.0 - 3.0 * log3())).abs() < 1e-12);
        assert!((order1_entropy(b"ababab", &a) - 0.540_852_7).abs() < 1e-6);
        assert_eq!(order1_entropy(&[b'a'; 50], &Alphabet::infer(b"a")), 0.0);
        assert_eq!(order1_entropy(b"b", &a), 0.0);
    }

    #[test]
    fn theorem_constants() {
        assert_eq!(theorem_constant(2, 1, 2), Some(440.0));
        assert_eq!(theorem_constant(2, 2, 2), Some(520.0));
        assert_eq!(theorem_constant(2, 1, 256), Some(20_978_240.0));
        assert_eq!(theorem_constant(2, 1, 1), None);
    }

    #[test]
    fn lemma_bounds() {
        let h = 3.0 * log3() - 2.0;
        // Indexed by level: l_0 = 4, l_1 = 1.
        assert!((lemma_bound(h, &[4, 1], 2) - (h + 14.0)).abs() < 1e-12);
        assert!((lemma_bound_printed(h, &[4, 1], 2) - (h + 2.0)).abs() < 1e-12);
        assert_eq!(lemma_bound(0.0, &[0], 1), 1.0);
    }

    #[test]
    fn ababab_report() {
        let report = redundancy_report(b"ababab", Params::new(2, 1, Mode::Cdmpm).unwrap(), 1).unwrap();
        assert_eq!(report.i_eff, 1);
        assert_eq!(report.level(1).unwrap().coded, 1);
        assert_eq!(report.level(0).unwrap().coded, 4);
        assert_eq!(report.level(1).unwrap().s_count, 2);
        assert!((report.ideal_bits - (4.0 + log3())).abs() < 1e-12);
        assert!((report.lemma_rhs_bits - (3.0 * log3() - 2.0 + 14.0)).abs() < 1e-12);
        assert!(report.lemma_pass());
        let bound = report.theorem_bound().unwrap();
        assert!((bound - 440.0 / 6f64.log2()).abs() < 1e-9);
        assert_eq!(report.theorem_pass(), Some(true));
    }

    #[test]
    fn empty_report() {
        let report = redundancy_report(b"", Params::new(2, 4, Mode::Cdmpm).unwrap(), 1).unwrap();
        assert_eq!(report.payload_bits, 0);
        assert_eq!(report.lemma_rhs_bits, 1.0);
        assert!(report.lemma_pass());
        assert_eq!(report.theorem_pass(), None);
        assert_eq!(report.sum_coded_pass(), None);
        let text = report.to_string();
        assert!(text.contains("theorem_pass: n/a\n"));
        assert!(text.contains("l_0: 0\n"));
    }
}
