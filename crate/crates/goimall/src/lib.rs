//! Indexed geometry of interaction for MALL.
//!
//! The pipeline: check a proof with an explicit cut stack
//! ([`mall_syntax`]), interpret it relationally with the cuts left
//! unexecuted ([`rel_model`]), translate families of points into indexed
//! proofs ([`indexed_logic`]), eliminate cuts while tracking which indices
//! survive ([`cut_rewrite`]), and run the execution formula as a token
//! machine over partial injections ([`goi_engine`]).
//!
//! ```
//! use goimall::mall_syntax::{check_proof, parse_proof};
//!
//! let p = parse_proof("(cut (with (ax bot) (ax bot) ()) (plus1 (ax 1) bot))").unwrap();
//! assert_eq!(check_proof(&p).unwrap().to_string(), "|- [ (1 & 1, bot + bot) ] bot, 1");
//! ```

pub mod corpus;
pub mod cut_rewrite;
pub mod goi_engine;
pub mod indexed_logic;
pub mod mall_syntax;
pub mod par;
pub mod rel_model;
mod sexp;
pub mod traced;
