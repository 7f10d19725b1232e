#![allow(dead_code)]

//! Straightforward list-based reimplementation of the transform, used as an
//! oracle. It copies every block, finds classes and repeats by linear
//! search, and builds the coding order by literal string rewriting: the k-th
//! `s` of level i is replaced by `ŝ` followed by the k-th group of r tokens
//! of level i-1, and each level's tail tokens are appended after the
//! rewrite.

use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NaiveToken {
    S { forced: bool },
    Repeat(u32),
    Symbol(u8),
}

#[derive(Clone, Debug)]
pub struct NaiveLevel {
    pub level: u32,
    pub blocks: Vec<Vec<u8>>,
    /// Class labels (context symbol on level 0).
    pub labels: Vec<u32>,
    pub tokens: Vec<NaiveToken>,
    pub tail_len: usize,
}

#[derive(Clone, Debug)]
pub struct Naive {
    /// Top level first.
    pub levels: Vec<NaiveLevel>,
    /// `(level, label, token)` in coding order, forced `s` still present.
    pub stream: Vec<(u32, u32, NaiveToken)>,
}

fn digits(mut n: usize, r: usize) -> Vec<usize> {
    let mut d = Vec::new();
    while n > 0 {
        d.push(n % r);
        n /= r;
    }
    d
}

pub fn naive_transform(x: &[u8], r: usize, levels: u32, context_dependent: bool) -> Naive {
    let mut sorted: Vec<u8> = x.to_vec();
    sorted.sort_unstable();
    let a1 = sorted.first().copied().unwrap_or(0);

    let d = digits(x.len(), r);
    let top = if d.is_empty() { 0 } else { (d.len() as u32 - 1).min(levels) };
    // n_i for i < top from single digits; the top takes the rest.
    let mut n_i = vec![0usize; top as usize + 1];
    for (i, len) in n_i.iter_mut().enumerate().take(top as usize) {
        *len = d.get(i).copied().unwrap_or(0) * r.pow(i as u32);
    }
    n_i[top as usize] = x.len() - n_i.iter().sum::<usize>();
    let mut starts = vec![0usize; top as usize + 1];
    let mut pos = 0;
    for i in (0..=top as usize).rev() {
        starts[i] = pos;
        pos += n_i[i];
    }
    let substring = |i: usize| &x[starts[i]..starts[i] + n_i[i]];

    let mut out_levels = Vec::new();
    let mut carried: Vec<Vec<u8>> = Vec::new();
    for i in (0..=top).rev() {
        let len = r.pow(i);
        let mut blocks = std::mem::take(&mut carried);
        let tail: Vec<Vec<u8>> = substring(i as usize).chunks(len).map(|c| c.to_vec()).collect();
        let tail_len = tail.len();
        blocks.extend(tail);

        if i == 0 {
            let mut labels = Vec::new();
            for j in 0..blocks.len() {
                let ctx = if j == 0 || !context_dependent { a1 } else { blocks[j - 1][0] };
                labels.push(ctx as u32);
            }
            let tokens = blocks.iter().map(|b| NaiveToken::Symbol(b[0])).collect();
            out_levels.push(NaiveLevel { level: 0, blocks, labels, tokens, tail_len });
            break;
        }

        let fixed = vec![a1; len];
        let mut contexts: Vec<Vec<u8>> = Vec::new();
        let mut class_members: Vec<Vec<Vec<u8>>> = Vec::new();
        let mut labels = Vec::new();
        let mut tokens = Vec::new();
        for j in 0..blocks.len() {
            let ctx = if j == 0 || !context_dependent { fixed.clone() } else { blocks[j - 1].clone() };
            let label = match contexts.iter().position(|c| *c == ctx) {
                Some(p) => p,
                None => {
                    contexts.push(ctx);
                    class_members.push(Vec::new());
                    contexts.len() - 1
                }
            };
            let members = &mut class_members[label];
            let token = match members.iter().position(|b| *b == blocks[j]) {
                Some(p) => NaiveToken::Repeat(p as u32 + 1),
                None => {
                    let forced = members.is_empty();
                    members.push(blocks[j].clone());
                    for c in blocks[j].chunks(len / r) {
                        carried.push(c.to_vec());
                    }
                    NaiveToken::S { forced }
                }
            };
            labels.push(label as u32 + 1);
            tokens.push(token);
        }
        out_levels.push(NaiveLevel { level: i, blocks, labels, tokens, tail_len });
    }

    // Coding order by rewriting, starting from the whole top level.
    #[derive(Clone)]
    enum Item {
        Plain(u32, u32, NaiveToken),
        Hat(u32, u32, bool),
    }
    let top_level = &out_levels[0];
    let mut l: Vec<Item> = top_level
        .tokens
        .iter()
        .zip(&top_level.labels)
        .map(|(t, &lab)| Item::Plain(top_level.level, lab, t.clone()))
        .collect();
    for w in 0..out_levels.len() - 1 {
        let upper = out_levels[w].level;
        let below = &out_levels[w + 1];
        let mut k = 0;
        let mut next = Vec::new();
        for item in l {
            match item {
                Item::Plain(lv, lab, NaiveToken::S { forced }) if lv == upper => {
                    next.push(Item::Hat(lv, lab, forced));
                    for c in k * r..(k + 1) * r {
                        next.push(Item::Plain(below.level, below.labels[c], below.tokens[c].clone()));
                    }
                    k += 1;
                }
                other => next.push(other),
            }
        }
        let first_tail = below.tokens.len() - below.tail_len;
        assert_eq!(k * r, first_tail);
        for c in first_tail..below.tokens.len() {
            next.push(Item::Plain(below.level, below.labels[c], below.tokens[c].clone()));
        }
        l = next;
    }
    let stream = l
        .into_iter()
        .map(|item| match item {
            Item::Plain(lv, lab, t) => (lv, lab, t),
            Item::Hat(lv, lab, forced) => (lv, lab, NaiveToken::S { forced }),
        })
        .collect();
    Naive { levels: out_levels, stream }
}

/// Ideal code length of the coding order under unbounded adaptive counts.
pub fn naive_ideal_bits(naive: &Naive, alphabet: &[u8]) -> f64 {
    let mut classes: HashMap<(u32, u32), (f64, Vec<f64>)> = HashMap::new();
    let mut symbols: HashMap<(u32, u8), f64> = HashMap::new();
    let mut bits = 0.0;
    for (level, label, token) in &naive.stream {
        match token {
            NaiveToken::S { forced: true } => {
                classes.insert((*level, *label), (1.0, vec![1.0]));
            }
            NaiveToken::S { forced: false } => {
                let (s, reps) = classes.get_mut(&(*level, *label)).unwrap();
                let total = *s + reps.iter().sum::<f64>();
                bits += (total / *s).log2();
                *s += 1.0;
                reps.push(1.0);
            }
            NaiveToken::Repeat(m) => {
                let (s, reps) = classes.get_mut(&(*level, *label)).unwrap();
                let total = *s + reps.iter().sum::<f64>();
                bits += (total / reps[*m as usize - 1]).log2();
                reps[*m as usize - 1] += 1.0;
            }
            NaiveToken::Symbol(b) => {
                let ctx = *label as u8;
                let total: f64 = alphabet.iter().map(|&a| *symbols.get(&(ctx as u32, a)).unwrap_or(&1.0)).sum();
                let count = symbols.entry((ctx as u32, *b)).or_insert(1.0);
                bits += (total / *count).log2();
                *count += 1.0;
            }
        }
    }
    bits
}

/// Brute-force conditional entropy: for every token, count its class and
/// its (class, value) pair by scanning the whole list.
pub fn brute_force_entropy(pairs: &[(u32, u32)]) -> f64 {
    let mut bits = 0.0;
    for &(class, value) in pairs {
        let in_class = pairs.iter().filter(|p| p.0 == class).count() as f64;
        let same = pairs.iter().filter(|p| **p == (class, value)).count() as f64;
        bits += (in_class / same).log2();
    }
    bits
}
