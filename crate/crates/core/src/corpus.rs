//! Deterministic test corpora and the self-test that runs over them.
//!
//! Inputs come from a 64-bit LCG (`state = state * 6364136223846793005 +
//! 1442695040888963407`, output = top 32 bits), so every build generates the
//! same bytes for the same seed.

use std::fmt;
use std::thread;

use crate::alphabet::Alphabet;
use crate::analysis::{assemble_report, RedundancyReport};
use crate::codec::{decompress, encode_representation};
use crate::error::Result;
use crate::partition::{floor_log, Mode, Params, MAX_LEVELS};
use crate::transform::build_multilevel;

const LCG_MUL: u64 = 6364136223846793005;
const LCG_INC: u64 = 1442695040888963407;

#[derive(Clone, Debug)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        let mut lcg = Lcg { state: seed };
        lcg.next_u32();
        lcg
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self.state.wrapping_mul(LCG_MUL).wrapping_add(LCG_INC);
        (self.state >> 32) as u32
    }

    /// Uniform in `0..bound` (multiply-shift, negligible bias for small bounds).
    pub fn below(&mut self, bound: u32) -> u32 {
        ((self.next_u32() as u64 * bound as u64) >> 32) as u32
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.next_u32() as f64 / (1u64 << 32) as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    /// Independent uniform symbols over `size` bytes starting at `a`.
    Uniform { size: u32 },
    /// Order-1 chain: with probability `bias_percent`% the successor of the
    /// previous symbol, otherwise uniform.
    Markov { size: u32, bias_percent: u32 },
    /// `abab...`
    Periodic,
    /// `aaaa...`
    Constant,
}

impl Source {
    pub const STANDARD: [Source; 6] = [
        Source::Uniform { size: 2 },
        Source::Uniform { size: 16 },
        Source::Uniform { size: 256 },
        Source::Markov { size: 4, bias_percent: 90 },
        Source::Periodic,
        Source::Constant,
    ];

    pub fn generate(&self, n: usize, seed: u64) -> Vec<u8> {
        let mut rng = Lcg::new(seed);
        match *self {
            Source::Uniform { size } => (0..n).map(|_| symbol(rng.below(size), size)).collect(),
            Source::Markov { size, bias_percent } => {
                let mut prev = 0u32;
                (0..n)
                    .map(|_| {
                        prev = if rng.unit() * 100.0 < bias_percent as f64 {
                            (prev + 1) % size
                        } else {
                            rng.below(size)
                        };
                        symbol(prev, size)
                    })
                    .collect()
            }
            Source::Periodic => (0..n).map(|i| if i % 2 == 0 { b'a' } else { b'b' }).collect(),
            Source::Constant => vec![b'a'; n],
        }
    }
}

fn symbol(k: u32, size: u32) -> u8 {
    if size == 256 {
        k as u8
    } else {
        b'a'.wrapping_add(k as u8)
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Uniform { size } => write!(f, "uniform{size}"),
            Source::Markov { size, bias_percent } => write!(f, "markov{size}-{bias_percent}"),
            Source::Periodic => f.write_str("periodic"),
            Source::Constant => f.write_str("constant"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CorpusCase {
    pub source: Source,
    pub n: usize,
    pub params: Params,
    pub seed: u64,
}

impl CorpusCase {
    pub fn data(&self) -> Vec<u8> {
        self.source.generate(self.n, self.seed)
    }
}

impl fmt::Display for CorpusCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} n={} r={} I={} {}",
            self.source,
            self.n,
            self.params.r(),
            self.params.levels(),
            self.params.mode()
        )
    }
}

pub const LARGE_LEN: usize = 65_536;

/// Lengths exercised for one `(r, I)`: 0..=17, `r^I - 1..=r^I + 1`, and
/// [`LARGE_LEN`]. For the maximal `I` the power is the largest one not
/// above `LARGE_LEN`.
pub fn standard_lengths(r: u32, levels: u32) -> Vec<usize> {
    let power = if levels >= MAX_LEVELS {
        (r as usize).pow(floor_log(LARGE_LEN, r as usize))
    } else {
        (r as usize).pow(levels)
    };
    let mut lengths: Vec<usize> = (0..=17).collect();
    lengths.extend([power - 1, power, power + 1, LARGE_LEN]);
    lengths.sort_unstable();
    lengths.dedup();
    lengths
}

/// Every source, length, mode, `r in {2,3,4}` and `I in {1, 4, max}`.
pub fn standard_corpus() -> Vec<CorpusCase> {
    let mut cases = Vec::new();
    for r in [2u32, 3, 4] {
        for levels in [1, 4, MAX_LEVELS] {
            for n in standard_lengths(r, levels) {
                for (k, source) in Source::STANDARD.iter().enumerate() {
                    for mode in [Mode::Cdmpm, Mode::Mpm] {
                        cases.push(CorpusCase {
                            source: *source,
                            n,
                            params: Params::new(r, levels, mode).expect("valid corpus params"),
                            seed: (n as u64) << 8 | k as u64,
                        });
                    }
                }
            }
        }
    }
    cases
}

#[derive(Clone, Debug)]
pub struct CaseResult {
    pub case: CorpusCase,
    pub roundtrip: bool,
    pub report: RedundancyReport,
}

impl CaseResult {
    /// Theorem consequence, checked where it is defined and `n >= 1024`.
    pub fn theorem_ok(&self) -> bool {
        self.case.n < 1024 || self.report.theorem_pass().unwrap_or(true)
    }

    pub fn ok(&self) -> bool {
        self.roundtrip && self.report.lemma_pass() && self.theorem_ok()
    }
}

/// Compresses, decompresses, and measures one case.
pub fn run_case(case: &CorpusCase) -> Result<CaseResult> {
    let data = case.data();
    let rep = build_multilevel(&data, case.params, &Alphabet::infer(&data))?;
    let encoded = encode_representation(&rep, |_| {})?;
    let roundtrip = decompress(&encoded.bytes).map(|d| d == data).unwrap_or(false);
    Ok(CaseResult {
        case: case.clone(),
        roundtrip,
        report: assemble_report(&rep, &encoded, 1),
    })
}

/// Runs `cases` across the available cores, preserving order.
pub fn run_cases(cases: &[CorpusCase]) -> Vec<Result<CaseResult>> {
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(cases.len().max(1));
    let mut results: Vec<Option<Result<CaseResult>>> = (0..cases.len()).map(|_| None).collect();
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w..cases.len())
                        .step_by(workers)
                        .map(|k| (k, run_case(&cases[k])))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (k, res) in h.join().expect("corpus worker panicked") {
                results[k] = Some(res);
            }
        }
    });
    results.into_iter().map(|r| r.expect("every case ran")).collect()
}
