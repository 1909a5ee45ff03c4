//! # mmes
//!
//! Multipartite entanglement of pure qubit states through the purities of
//! balanced bipartitions.
//!
//! - [`qstate`]: validated pure states, a catalog of named four-qubit states,
//!   single-qubit gates.
//! - [`ket`]: parse and print bra-ket expressions such as
//!   `(|0011>+|1100>+w*(|0101>+|1010>)+w*w*(|0110>+|1001>))/sqrt(6)`.
//! - [`reduction`]: partial traces and purities for any qubit subset.
//! - [`closed_form`]: explicit four-qubit purity formulas and the criterion
//!   polynomial `K = K₁ + K₂`.
//! - [`potential`]: the potential `π_ME` and the MMES verdict report.
//! - [`search`]: multi-start minimization of `π_ME`.
//! - [`cli`]: the `mmes` command-line front end.
//!
//! ```
//! use mmes::{potential, qstate};
//!
//! let hs = qstate::catalog_state("hs", "omega")?;
//! let report = potential::analyze(&hs, potential::DEFAULT_TOL)?;
//! assert!((report.pi_me - 1.0 / 3.0).abs() < 1e-12);
//! assert_eq!(report.verdict, potential::Verdict::Mmes);
//! # Ok::<(), mmes::Error>(())
//! ```

#![forbid(unsafe_code)]

pub mod cli;
pub mod closed_form;
pub mod error;
pub mod ket;
mod numfmt;
pub mod potential;
pub mod qstate;
pub mod reduction;
pub mod search;

pub use error::{Error, ParseError, ParseErrorKind, Result, Span};
pub use qstate::{NormalizePolicy, PureState};

/// The guide under `book/src`, compiled as doc-tests so its snippets stay
/// in sync with the API.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    pub mod states {}
    #[doc = include_str!("../../../book/src/ket-expressions.md")]
    pub mod ket_expressions {}
    #[doc = include_str!("../../../book/src/partial-trace.md")]
    pub mod partial_trace {}
    #[doc = include_str!("../../../book/src/closed-form.md")]
    pub mod closed_form {}
    #[doc = include_str!("../../../book/src/potential.md")]
    pub mod potential {}
    #[doc = include_str!("../../../book/src/minimization.md")]
    pub mod minimization {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
