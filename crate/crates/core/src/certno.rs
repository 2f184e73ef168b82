//! Negative certificates: extraction and verification of separators.
//!
//! A separator is an inductive invariant presented as six matrices. The
//! deterministic checker evaluates the five product equalities with exact
//! cubic integer multiplication; the randomized checker replaces each product
//! computation with Freivalds' probes and never rejects a bundle the
//! deterministic checker accepts.

use std::fmt;

use thiserror::Error;

use crate::freivalds::check_product;
use crate::model::{BracketLabel, Instance, NatMatrix, SeparatorBundle};
use crate::solver::{Rel, SRelation};
use crate::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("not a no-instance: a valid walk from source to target exists")]
    NotANoInstance,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompleteError {
    #[error("MS dimension does not match the instance")]
    DimensionMismatch,
    #[error("MS has an entry outside {{0, 1}}")]
    NotBoolean,
}

/// The names of the five product equalities, in checking order. The index of
/// a name is also its Freivalds keying index.
pub const PRODUCT_NAMES: [&str; 5] =
    ["Ao1*MS=Mo1S", "Ao2*MS=Mo2S", "MS*MS=MSS", "Mo1S*Ac1=Mo1Sc1", "Mo2S*Ac2=Mo2Sc2"];

/// First violated separator condition, with a witness position where one
/// exists. Positions are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SepReject {
    Shape(String),
    /// `I <= MS` or one of the `bool(...) <= MS` conditions.
    NotLeq { lhs: &'static str, i: u32, j: u32 },
    /// A product equality fails at an entry (deterministic mode).
    ProductMismatch { name: &'static str, i: u32, j: u32 },
    /// A product equality fails a Freivalds probe (randomized mode).
    ProductProbe { name: &'static str, row: u32 },
    /// `(MS)[s,t] != 0`.
    SourceTarget,
}

impl fmt::Display for SepReject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SepReject::Shape(what) => write!(f, "malformed bundle: {what}"),
            SepReject::NotLeq { lhs, i, j } => write!(f, "{lhs} !<= MS at ({i}, {j})"),
            SepReject::ProductMismatch { name, i, j } => {
                write!(f, "product {name} fails at ({i}, {j})")
            }
            SepReject::ProductProbe { name, row } => {
                write!(f, "product {name} fails a probe at row {row}")
            }
            SepReject::SourceTarget => write!(f, "(MS)[s,t] != 0"),
        }
    }
}

fn derived_from_ms(instance: &Instance, m_s: &NatMatrix) -> [NatMatrix; 5] {
    let a_o1 = NatMatrix::adjacency(instance, BracketLabel::Open1);
    let a_o2 = NatMatrix::adjacency(instance, BracketLabel::Open2);
    let a_c1 = NatMatrix::adjacency(instance, BracketLabel::Close1);
    let a_c2 = NatMatrix::adjacency(instance, BracketLabel::Close2);
    let m_o1s = a_o1.mul(m_s);
    let m_o2s = a_o2.mul(m_s);
    let m_ss = m_s.mul(m_s);
    let m_o1sc1 = m_o1s.mul(&a_c1);
    let m_o2sc2 = m_o2s.mul(&a_c2);
    [m_ss, m_o1s, m_o2s, m_o1sc1, m_o2sc2]
}

/// Extracts the separator of a no-instance: `MS` is the solver's S relation
/// and the five derived matrices satisfy the product equalities exactly.
pub fn extract_separator(
    instance: &Instance,
    closure: &SRelation,
) -> Result<SeparatorBundle, ExtractError> {
    if closure.s(instance.source(), instance.target()) {
        return Err(ExtractError::NotANoInstance);
    }
    let m_s = closure.to_matrix(Rel::S);
    let [m_ss, m_o1s, m_o2s, m_o1sc1, m_o2sc2] = derived_from_ms(instance, &m_s);
    let bundle = SeparatorBundle { m_s, m_ss, m_o1s, m_o2s, m_o1sc1, m_o2sc2 };
    debug_assert!(bundle.validate().is_ok());
    Ok(bundle)
}

/// Completes a bundle from its `MS` block alone by computing the five
/// derived matrices from the product equalities.
pub fn complete_from_ms(
    instance: &Instance,
    m_s: &NatMatrix,
) -> Result<SeparatorBundle, CompleteError> {
    if m_s.dim() != instance.n() as usize {
        return Err(CompleteError::DimensionMismatch);
    }
    if !m_s.is_boolean() {
        return Err(CompleteError::NotBoolean);
    }
    let [m_ss, m_o1s, m_o2s, m_o1sc1, m_o2sc2] = derived_from_ms(instance, m_s);
    Ok(SeparatorBundle { m_s: m_s.clone(), m_ss, m_o1s, m_o2s, m_o1sc1, m_o2sc2 })
}

fn check_shape(instance: &Instance, b: &SeparatorBundle) -> Result<(), SepReject> {
    let n = instance.n() as usize;
    if b.m_s.dim() != n {
        return Err(SepReject::Shape("dimension does not match the instance".into()));
    }
    b.validate().map_err(|e| SepReject::Shape(e.reason))
}

/// The five claimed products as (left factor, right factor, claimed result).
fn products<'a>(
    instance: &Instance,
    b: &'a SeparatorBundle,
) -> [(NatMatrix, &'a NatMatrix, &'a NatMatrix); 5] {
    let a_o1 = NatMatrix::adjacency(instance, BracketLabel::Open1);
    let a_o2 = NatMatrix::adjacency(instance, BracketLabel::Open2);
    let a_c1 = NatMatrix::adjacency(instance, BracketLabel::Close1);
    let a_c2 = NatMatrix::adjacency(instance, BracketLabel::Close2);
    [
        (a_o1, &b.m_s, &b.m_o1s),
        (a_o2, &b.m_s, &b.m_o2s),
        (b.m_s.clone(), &b.m_s, &b.m_ss),
        (b.m_o1s.clone(), &a_c1, &b.m_o1sc1),
        (b.m_o2s.clone(), &a_c2, &b.m_o2sc2),
    ]
}

fn check_non_product_conditions(
    instance: &Instance,
    b: &SeparatorBundle,
) -> Result<(), SepReject> {
    let n = instance.n() as usize;
    let identity = NatMatrix::identity(n);
    if let Some((i, j)) = identity.leq_violation(&b.m_s) {
        return Err(SepReject::NotLeq { lhs: "I", i: i as u32 + 1, j: j as u32 + 1 });
    }
    for (lhs, m) in [
        ("bool(MSS)", &b.m_ss),
        ("bool(Mo1Sc1)", &b.m_o1sc1),
        ("bool(Mo2Sc2)", &b.m_o2sc2),
    ] {
        if let Some((i, j)) = m.to_bool().leq_violation(&b.m_s) {
            return Err(SepReject::NotLeq { lhs, i: i as u32 + 1, j: j as u32 + 1 });
        }
    }
    let (s, t) = (instance.source() as usize - 1, instance.target() as usize - 1);
    if b.m_s.get(s, t) != 0 {
        return Err(SepReject::SourceTarget);
    }
    Ok(())
}

/// Deterministic separator checker: evaluates the ten conditions with exact
/// integer matrix products.
pub fn check_separator_det(instance: &Instance, b: &SeparatorBundle) -> Verdict<SepReject> {
    if let Err(r) = check_shape(instance, b) {
        return Verdict::Reject(r);
    }
    for (index, (left, right, claimed)) in products(instance, b).iter().enumerate() {
        let exact = left.mul(right);
        if let Some((i, j)) = exact.neq_witness(claimed) {
            return Verdict::Reject(SepReject::ProductMismatch {
                name: PRODUCT_NAMES[index],
                i: i as u32 + 1,
                j: j as u32 + 1,
            });
        }
    }
    if let Err(r) = check_non_product_conditions(instance, b) {
        return Verdict::Reject(r);
    }
    Verdict::Accept
}

/// Randomized separator checker: non-product conditions are checked exactly,
/// each product equality by `reps` Freivalds probes. Never rejects a bundle
/// the deterministic checker accepts; rejects a bundle with a wrong product
/// with probability at least `1 - (1/2)^reps` per wrong product.
pub fn check_separator_rand(
    instance: &Instance,
    b: &SeparatorBundle,
    seed: u64,
    reps: u32,
) -> Verdict<SepReject> {
    check_separator_rand_counted(instance, b, seed, reps).0
}

/// As `check_separator_rand`, also reporting the number of probe vectors
/// drawn (always `5 * reps`).
pub fn check_separator_rand_counted(
    instance: &Instance,
    b: &SeparatorBundle,
    seed: u64,
    reps: u32,
) -> (Verdict<SepReject>, u64) {
    if let Err(r) = check_shape(instance, b) {
        return (Verdict::Reject(r), 0);
    }
    let mut probes = 0u64;
    let mut failure: Option<SepReject> = None;
    for (index, (left, right, claimed)) in products(instance, b).iter().enumerate() {
        let fail = check_product(left, right, claimed, seed, index as u64, reps, &mut probes);
        if failure.is_none() {
            if let Some(row) = fail {
                failure =
                    Some(SepReject::ProductProbe { name: PRODUCT_NAMES[index], row: row as u32 + 1 });
            }
        }
    }
    if let Some(r) = failure {
        return (Verdict::Reject(r), probes);
    }
    if let Err(r) = check_non_product_conditions(instance, b) {
        return (Verdict::Reject(r), probes);
    }
    (Verdict::Accept, probes)
}
