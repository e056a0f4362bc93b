//! Syntax-guided synthesis toolkit.
//!
//! - [`ir`]: sorted terms, grammars and problems.
//! - [`frontend`]: SyGuS-IF reader and printer, invariant desugaring, default grammars.
//! - [`semantics`]: evaluation over integers, 64-bit bitvectors and strings.
//! - [`engine`]: enumerative CEGIS and enumeration+unification synthesis.
//! - [`oracle`]: grammar conformance and semantic verification.
//! - [`harness`]: batch runs, records and bucketed scoring.

pub mod engine;
pub mod frontend;
pub mod harness;
pub mod ir;
pub mod oracle;
pub mod semantics;
