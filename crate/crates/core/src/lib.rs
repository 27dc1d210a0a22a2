//! Block sequential decoding of polar codes.
//!
//! The crate decodes polar codes, polar subcodes with dynamic frozen
//! symbols, CRC-aided polar codes and short extended BCH codes. A code is
//! split by recursive Plotkin decomposition into short outer codes which are
//! list-decoded on demand, and a best-first search over the resulting code
//! tree is driven by a double-ended priority queue.
//!
//! Module map:
//!
//! - [`kernel`]: polarizing transform, min-sum LLR arithmetic, ellipsoidal weight
//! - [`codespec`]: code descriptions, encoding, check-matrix conversion, CRC, eBCH
//! - [`decomposition`]: Plotkin decomposition tree and outer-code classification
//! - [`outer`]: on-demand list decoders for outer codes
//! - [`depq`]: bounded interval heap
//! - [`pathstore`]: shared reference-counted LLR / partial-sum arrays
//! - [`bsda`]: the block sequential decoder, its symbol-wise variant and bias estimation
//! - [`baselines`]: SC, SCL and exhaustive ML decoders
//! - [`sim`]: AWGN/BPSK Monte-Carlo harness
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod baselines;
pub mod bsda;
pub mod codespec;
pub mod decomposition;
pub mod depq;
mod error;
pub mod kernel;
pub mod oracle;
pub mod outer;
pub mod pathstore;
pub mod sim;

pub use error::{Error, Result};
