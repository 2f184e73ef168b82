//! Certifying solver and verifier suite for Dyck-2 reachability and its
//! subcubic-equivalent relatives: pushdown reachability, PDA emptiness, and
//! 2NPDA recognition.
//!
//! The crate decides instances, extracts quadratic-size positive certificates
//! (walk schemes) and negative certificates (separators and pushdown
//! invariants), verifies certificates with independent deterministic and
//! randomized checkers, and implements the reduction cycle linking the four
//! problems.

pub mod certno;
pub mod certyes;
pub mod freivalds;
pub mod gen;
pub mod model;
pub mod oracle;
pub mod pushdown;
pub mod reductions;
pub mod solver;

/// Verdict of a certificate checker: checkers accept or reject with a typed
/// reason, they do not fail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<R> {
    Accept,
    Reject(R),
}

impl<R> Verdict<R> {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}
