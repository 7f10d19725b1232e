//! Lossless compression with the context-dependent multilevel pattern
//! matching (CDMPM) grammar transform.
//!
//! The pipeline is [`transform::build_multilevel`] (input to multilevel
//! token sequences), [`transform::MultilevelRepresentation::flatten`]
//! (depth-first coding order), and [`codec`] (adaptive arithmetic coding
//! into a self-describing container). [`analysis`] measures the result
//! against the grammar's empirical entropy and the redundancy bounds.
//!
//! ```
//! use cdmpm_core::{compress, decompress, Mode, Params};
//!
//! let params = Params::new(2, 8, Mode::Cdmpm).unwrap();
//! let packed = compress(b"abracadabra abracadabra", params).unwrap();
//! assert_eq!(decompress(&packed).unwrap(), b"abracadabra abracadabra");
//! ```

pub mod alphabet;
pub mod analysis;
pub mod cli;
pub mod codec;
pub mod coder;
pub mod corpus;
pub mod error;
pub mod partition;
pub mod transform;

pub use alphabet::Alphabet;
pub use analysis::{grammar_entropy, order1_entropy, redundancy_report, theorem_constant, RedundancyReport};
pub use codec::{compress, decompress, parse_header};
pub use error::{Error, Result};
pub use partition::{rary_expansion, top_partition, LevelLengths, Mode, Params};
pub use transform::{build_multilevel, FlatStream, Grammar, MultilevelRepresentation, Token};
