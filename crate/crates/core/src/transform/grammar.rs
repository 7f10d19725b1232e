use std::collections::HashMap;
use std::fmt;

use super::trace::write_byte;
use super::{MultilevelRepresentation, Token};
use crate::error::{Error, Result};

/// `N(level, class, m)`: the `m`-th distinct content of a class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Nonterminal {
    pub level: u32,
    pub class: u32,
    pub index: u32,
}

impl fmt::Display for Nonterminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N({},{},{})", self.level, self.class, self.index)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GrammarSymbol {
    Terminal(u8),
    Nonterminal(Nonterminal),
}

impl fmt::Display for GrammarSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrammarSymbol::Terminal(b) => write_byte(f, *b),
            GrammarSymbol::Nonterminal(n) => n.fmt(f),
        }
    }
}

/// The representation read as a grammar: one production per distinct block
/// content of each class, and a start production over the roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    pub start: Vec<GrammarSymbol>,
    /// Productions in order of creation, top level first.
    pub rules: Vec<(Nonterminal, Vec<GrammarSymbol>)>,
}

impl Grammar {
    pub(super) fn from_representation(rep: &MultilevelRepresentation) -> Self {
        // Grammar symbol of every block, per level.
        let mut symbols: Vec<Vec<GrammarSymbol>> = Vec::with_capacity(rep.levels.len());
        for seq in &rep.levels {
            let mut seen: HashMap<u32, u32> = HashMap::new();
            let row = seq
                .tokens
                .iter()
                .zip(&seq.labels)
                .map(|(token, &class)| match *token {
                    Token::Symbol(b) => GrammarSymbol::Terminal(b),
                    Token::S { .. } => {
                        let m = seen.entry(class).or_insert(0);
                        *m += 1;
                        GrammarSymbol::Nonterminal(Nonterminal {
                            level: seq.level,
                            class,
                            index: *m,
                        })
                    }
                    Token::Repeat(m) => GrammarSymbol::Nonterminal(Nonterminal {
                        level: seq.level,
                        class,
                        index: m,
                    }),
                })
                .collect();
            symbols.push(row);
        }

        let r = rep.params.r() as usize;
        let mut rules = Vec::new();
        for seq in rep.levels() {
            for (j, first) in seq.first_child.iter().enumerate() {
                if let (Some(first), GrammarSymbol::Nonterminal(head)) =
                    (first, symbols[seq.level as usize][j])
                {
                    let below = &symbols[seq.level as usize - 1];
                    rules.push((head, below[*first..*first + r].to_vec()));
                }
            }
        }
        let start = rep
            .roots()
            .into_iter()
            .map(|(level, j)| symbols[level as usize][j])
            .collect();
        Grammar { start, rules }
    }

    /// Derives the start symbol.
    pub fn expand(&self) -> Result<Vec<u8>> {
        let table: HashMap<Nonterminal, &[GrammarSymbol]> =
            self.rules.iter().map(|(n, rhs)| (*n, rhs.as_slice())).collect();
        let mut out = Vec::new();
        for sym in &self.start {
            derive(*sym, &table, &mut out)?;
        }
        Ok(out)
    }
}

fn derive(
    sym: GrammarSymbol,
    table: &HashMap<Nonterminal, &[GrammarSymbol]>,
    out: &mut Vec<u8>,
) -> Result<()> {
    match sym {
        GrammarSymbol::Terminal(b) => out.push(b),
        GrammarSymbol::Nonterminal(n) => {
            let rhs = table
                .get(&n)
                .ok_or_else(|| Error::Invariant(format!("no production for {n}")))?;
            for s in rhs.iter() {
                derive(*s, table, out)?;
            }
        }
    }
    Ok(())
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("start ->")?;
        if self.start.is_empty() {
            f.write_str(" ε")?;
        }
        for s in &self.start {
            write!(f, " {s}")?;
        }
        writeln!(f)?;
        for (head, rhs) in &self.rules {
            write!(f, "{head} ->")?;
            for s in rhs {
                write!(f, " {s}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
