//! Adaptive frequency models.
//!
//! A [`ClassModel`] codes the tokens of one context class on a level above
//! 0 over the growing alphabet `[s, 1, .., d]`, where `d` counts the distinct
//! blocks the class has seen. It is created when the class's first (forced,
//! uncoded) `s` appears, with `C(s) = C(1) = 1`. A [`Level0Model`] keeps one
//! table of symbol counts per context symbol, every count starting at 1.
//!
//! Both rescale by halving (rounding up) before an update would push the
//! total past [`MAX_TOTAL`].

use crate::error::{Error, Result};

pub const MAX_TOTAL: u32 = 1 << 16;

/// Token of a class model: `s` or a repeat index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassToken {
    S,
    Repeat(u32),
}

/// A coding interval `[cum_low, cum_low + count)` out of `total`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval {
    pub cum_low: u32,
    pub count: u32,
    pub total: u32,
}

impl Interval {
    /// Ideal code length in bits.
    pub fn cost(&self) -> f64 {
        (self.total as f64 / self.count as f64).log2()
    }
}

#[inline]
fn halve(counts: &mut [u32]) -> u32 {
    counts.iter_mut().map(|c| {
        *c = c.div_ceil(2);
        *c
    }).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassModel {
    count_s: u32,
    /// `repeat_counts[m - 1]` is `C(m)`; its length is `d`.
    repeat_counts: Vec<u32>,
    total: u32,
}

impl Default for ClassModel {
    fn default() -> Self {
        Self::new()
    }
}

impl ClassModel {
    pub fn new() -> Self {
        ClassModel {
            count_s: 1,
            repeat_counts: vec![1],
            total: 2,
        }
    }

    /// Distinct blocks seen by the class, the forced first one included.
    pub fn distinct(&self) -> u32 {
        self.repeat_counts.len() as u32
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn count(&self, token: ClassToken) -> Option<u32> {
        match token {
            ClassToken::S => Some(self.count_s),
            ClassToken::Repeat(m) if m >= 1 => self.repeat_counts.get(m as usize - 1).copied(),
            ClassToken::Repeat(_) => None,
        }
    }

    /// All intervals in coding order `[s, 1, .., d]`.
    pub fn intervals(&self) -> Vec<(ClassToken, Interval)> {
        let mut cum = 0;
        std::iter::once((ClassToken::S, self.count_s))
            .chain(
                self.repeat_counts
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| (ClassToken::Repeat(k as u32 + 1), c)),
            )
            .map(|(token, count)| {
                let iv = Interval {
                    cum_low: cum,
                    count,
                    total: self.total,
                };
                cum += count;
                (token, iv)
            })
            .collect()
    }

    pub fn interval(&self, token: ClassToken) -> Result<Interval> {
        let (cum_low, count) = match token {
            ClassToken::S => (0, self.count_s),
            ClassToken::Repeat(m) => {
                let count = self.count(token).ok_or_else(|| self.out_of_range(m))?;
                let before: u32 = self.repeat_counts[..m as usize - 1].iter().sum();
                (self.count_s + before, count)
            }
        };
        Ok(Interval {
            cum_low,
            count,
            total: self.total,
        })
    }

    /// The token whose interval contains `target`.
    pub fn lookup(&self, target: u32) -> Result<(ClassToken, Interval)> {
        if target < self.count_s {
            return Ok((
                ClassToken::S,
                Interval {
                    cum_low: 0,
                    count: self.count_s,
                    total: self.total,
                },
            ));
        }
        let mut cum = self.count_s;
        for (k, &count) in self.repeat_counts.iter().enumerate() {
            if target < cum + count {
                let iv = Interval {
                    cum_low: cum,
                    count,
                    total: self.total,
                };
                return Ok((ClassToken::Repeat(k as u32 + 1), iv));
            }
            cum += count;
        }
        Err(Error::Desync(format!(
            "target {target} beyond class total {}",
            self.total
        )))
    }

    fn out_of_range(&self, m: u32) -> Error {
        Error::Desync(format!(
            "repeat {m} outside the class alphabet of {} blocks",
            self.distinct()
        ))
    }

    fn rescale_for(&mut self, increment: u32) {
        if self.total + increment > MAX_TOTAL {
            self.count_s = self.count_s.div_ceil(2);
            self.total = self.count_s + halve(&mut self.repeat_counts);
        }
    }

    /// Counts a coded token: `s` also opens the next repeat index.
    pub fn update(&mut self, token: ClassToken) -> Result<()> {
        match token {
            ClassToken::S => {
                self.rescale_for(2);
                self.count_s += 1;
                self.repeat_counts.push(1);
                self.total += 2;
            }
            ClassToken::Repeat(m) => {
                if m == 0 || m > self.distinct() {
                    return Err(self.out_of_range(m));
                }
                self.rescale_for(1);
                self.repeat_counts[m as usize - 1] += 1;
                self.total += 1;
            }
        }
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn from_counts(count_s: u32, repeat_counts: Vec<u32>) -> Self {
        let total = count_s + repeat_counts.iter().sum::<u32>();
        ClassModel {
            count_s,
            repeat_counts,
            total,
        }
    }

    #[cfg(test)]
    pub(crate) fn counts(&self) -> (u32, &[u32]) {
        (self.count_s, &self.repeat_counts)
    }
}

/// Symbol counts for every context symbol, in alphabet index order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level0Model {
    size: usize,
    /// One row per context, allocated on first use.
    rows: Vec<Option<(Vec<u32>, u32)>>,
}

impl Level0Model {
    pub fn new(alphabet_size: usize) -> Self {
        assert!((1..=256).contains(&alphabet_size));
        Level0Model {
            size: alphabet_size,
            rows: vec![None; alphabet_size],
        }
    }

    fn row(&self, context: usize) -> (&[u32], u32) {
        match &self.rows[context] {
            Some((counts, total)) => (counts, *total),
            None => (&[], self.size as u32),
        }
    }

    fn count_at(&self, context: usize, symbol: usize) -> u32 {
        let (counts, _) = self.row(context);
        counts.get(symbol).copied().unwrap_or(1)
    }

    pub fn alphabet_size(&self) -> usize {
        self.size
    }

    pub fn total(&self, context: usize) -> u32 {
        self.row(context).1
    }

    /// Interval of `symbol` (alphabet position) under `context` (position).
    pub fn interval(&self, context: usize, symbol: usize) -> Interval {
        debug_assert!(context < self.size && symbol < self.size);
        let (counts, total) = self.row(context);
        let (cum_low, count) = if counts.is_empty() {
            (symbol as u32, 1)
        } else {
            (counts[..symbol].iter().sum(), counts[symbol])
        };
        Interval {
            cum_low,
            count,
            total,
        }
    }

    pub fn lookup(&self, context: usize, target: u32) -> Result<(usize, Interval)> {
        let total = self.total(context);
        let mut cum = 0;
        for symbol in 0..self.size {
            let count = self.count_at(context, symbol);
            if target < cum + count {
                return Ok((symbol, Interval { cum_low: cum, count, total }));
            }
            cum += count;
        }
        Err(Error::Desync(format!("target {target} beyond symbol total {total}")))
    }

    pub fn update(&mut self, context: usize, symbol: usize) {
        let size = self.size;
        let (counts, total) = self.rows[context].get_or_insert_with(|| (vec![1; size], size as u32));
        if *total + 1 > MAX_TOTAL {
            *total = halve(counts);
        }
        counts[symbol] += 1;
        *total += 1;
    }

    pub fn probability(&self, context: usize, symbol: usize) -> f64 {
        self.count_at(context, symbol) as f64 / self.total(context) as f64
    }
}
