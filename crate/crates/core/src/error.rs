use thiserror::Error;

use crate::bitset::BitSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("size guard tripped on {what}: {count} exceeds limit {limit}")]
    SizeGuard {
        what: &'static str,
        count: u128,
        limit: u64,
    },
    #[error("zmod requires n >= 1")]
    ZeroModulus,
    #[error("ring tables are malformed: {0}")]
    BadShape(String),
    #[error("ring axioms violated: {0:?}")]
    Axioms(Vec<crate::ring::AxiomViolation>),
    #[error("ring is not commutative")]
    NotCommutative,
    #[error("subset {0} is not an ideal: {1:?}")]
    NotIdeal(BitSet, crate::ring::IdealFailure),
    #[error("ideal {0} is not prime: {1:?}")]
    NotPrime(BitSet, crate::ring::PrimeFailure),
    #[error("ideal {0} is not maximal")]
    NotMaximal(BitSet),
    #[error("subset {0} is not a multiplicative submonoid")]
    NotSubmonoid(BitSet),
    #[error("map is not a ring homomorphism: {0:?}")]
    NotHom(crate::ring::HomFailure),
    #[error("ring is not local")]
    NotLocalRing,
    #[error("an empty family of ideals has no sum")]
    EmptyFamily,
    #[error("denominator {0} is not in the submonoid")]
    SNotMember(usize),
    #[error("{0} is not a subset of the carrier")]
    NotSubset(BitSet),
    #[error("{0} is not an open set")]
    NotOpen(BitSet),
    #[error("{inner} is not contained in {outer}")]
    NotNested { outer: BitSet, inner: BitSet },
    #[error("invalid topology: {0:?}")]
    BadTopology(crate::topology::TopologyFailure),
    #[error("map is not continuous: {0:?}")]
    NotContinuous(crate::topology::ContinuityFailure),
    #[error("presheaf data is malformed: {0}")]
    BadPresheaf(String),
    #[error("morphism shapes do not match: {0}")]
    Mismatch(String),
    #[error("open family is not directed: no member below {0} and {1}")]
    NoLowerBound(BitSet, BitSet),
    #[error("{0} is not a member of the directed family")]
    NotMember(BitSet),
    #[error("family of homomorphisms is not compatible: {0}")]
    IncompatibleFamily(String),
    #[error("induced map is not well defined: {0}")]
    WellDefinednessFailure(String),
    #[error("point {0} is not covered by any witness entry")]
    UncoveredPoint(usize),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
