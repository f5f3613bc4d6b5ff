//! Finite topological spaces given by an explicit family of open sets.
//!
//! Points are `usize` ids; a carrier need not be `0..n` (an induced
//! topology keeps the ids of the ambient space). Opens are kept sorted by
//! `(cardinality, bitmask)`.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// Families with at most this many opens get every subfamily union checked.
pub const EXHAUSTIVE_UNION_LIMIT: usize = 16;
const SAMPLED_UNIONS: usize = 512;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TopologyFailure {
    CarrierNotOpen,
    EmptyNotOpen,
    OpenNotSubset(BitSet),
    IntersectionMissing(BitSet, BitSet),
    UnionMissing(Vec<BitSet>),
}

/// How the arbitrary-union axiom was checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnionMode {
    /// Every subfamily of the opens.
    Exhaustive,
    /// All pairs plus this many seeded random subfamilies.
    Sampled(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopologyCheck {
    pub mode: UnionMode,
    pub result: std::result::Result<(), TopologyFailure>,
}

fn sort_opens(opens: impl IntoIterator<Item = BitSet>) -> Vec<BitSet> {
    let set: BTreeSet<(usize, BitSet)> = opens.into_iter().map(|o| (o.len(), o)).collect();
    set.into_iter().map(|(_, o)| o).collect()
}

/// Checks the five axioms of a topological space on `(carrier, opens)`.
pub fn check_topological_space(carrier: &BitSet, opens: &[BitSet]) -> TopologyCheck {
    let opens = sort_opens(opens.iter().cloned());
    let is_open = |s: &BitSet| opens.binary_search_by(|o| (o.len(), o).cmp(&(s.len(), s))).is_ok();
    let mode = if opens.len() <= EXHAUSTIVE_UNION_LIMIT {
        UnionMode::Exhaustive
    } else {
        UnionMode::Sampled(SAMPLED_UNIONS)
    };
    let result = (|| {
        if !is_open(carrier) {
            return Err(TopologyFailure::CarrierNotOpen);
        }
        if !is_open(&BitSet::new()) {
            return Err(TopologyFailure::EmptyNotOpen);
        }
        if let Some(o) = opens.iter().find(|o| !o.is_subset(carrier)) {
            return Err(TopologyFailure::OpenNotSubset(o.clone()));
        }
        for (i, a) in opens.iter().enumerate() {
            for b in &opens[i + 1..] {
                if !is_open(&a.intersection(b)) {
                    return Err(TopologyFailure::IntersectionMissing(a.clone(), b.clone()));
                }
            }
        }
        let check_family = |members: Vec<&BitSet>| {
            let union = members.iter().fold(BitSet::new(), |acc, o| acc.union(o));
            if is_open(&union) {
                Ok(())
            } else {
                Err(TopologyFailure::UnionMissing(members.into_iter().cloned().collect()))
            }
        };
        match mode {
            UnionMode::Exhaustive => {
                for mask in 0u32..1 << opens.len() {
                    check_family(opens.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, o)| o).collect())?;
                }
            }
            UnionMode::Sampled(samples) => {
                for (i, a) in opens.iter().enumerate() {
                    for b in &opens[i + 1..] {
                        check_family(vec![a, b])?;
                    }
                }
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                for _ in 0..samples {
                    check_family(opens.iter().filter(|_| rng.gen_bool(0.5)).collect())?;
                }
            }
        }
        Ok(())
    })();
    TopologyCheck { mode, result }
}

/// A validated finite topology.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Topology {
    carrier: BitSet,
    opens: Vec<BitSet>,
}

impl Topology {
    pub fn new(carrier: BitSet, opens: Vec<BitSet>) -> Result<Self> {
        check_topological_space(&carrier, &opens).result.map_err(Error::BadTopology)?;
        Ok(Self { carrier, opens: sort_opens(opens) })
    }

    pub fn discrete(carrier: BitSet) -> Self {
        let points = carrier.to_vec();
        let opens: Vec<BitSet> = (0u64..1 << points.len())
            .map(|m| points.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &p)| p).collect::<BitSet>())
            .collect();
        Self { carrier, opens: sort_opens(opens) }
    }

    pub fn indiscrete(carrier: BitSet) -> Self {
        Self { opens: sort_opens([BitSet::new(), carrier.clone()]), carrier }
    }

    pub fn carrier(&self) -> &BitSet {
        &self.carrier
    }

    /// Opens in `(cardinality, bitmask)` order.
    pub fn opens(&self) -> &[BitSet] {
        &self.opens
    }

    pub fn open_index(&self, u: &BitSet) -> Option<usize> {
        self.opens.binary_search_by(|o| (o.len(), o).cmp(&(u.len(), u))).ok()
    }

    pub fn is_open(&self, u: &BitSet) -> bool {
        self.open_index(u).is_some()
    }

    /// Indices of the opens contained in `u`.
    pub fn opens_within(&self, u: &BitSet) -> Vec<usize> {
        (0..self.opens.len()).filter(|&i| self.opens[i].is_subset(u)).collect()
    }

    /// Indices of the opens containing the point `x`.
    pub fn neighborhoods(&self, x: usize) -> Vec<usize> {
        (0..self.opens.len()).filter(|&i| self.opens[i].contains(x)).collect()
    }

    /// Copy with point `x` renamed to `rename[x]`.
    pub fn relabel(&self, rename: &BTreeMap<usize, usize>) -> Topology {
        let image = |s: &BitSet| s.iter().map(|x| rename[&x]).collect::<BitSet>();
        Topology {
            carrier: image(&self.carrier),
            opens: sort_opens(self.opens.iter().map(image)),
        }
    }
}

/// The least topology on `carrier` containing every basis element that lies
/// inside `carrier`; computed as a fixed point of pairwise `∩` and `∪`.
pub fn generated_topology(carrier: &BitSet, basis: &[BitSet]) -> Topology {
    let mut family: BTreeSet<BitSet> = BTreeSet::from([BitSet::new(), carrier.clone()]);
    family.extend(basis.iter().filter(|b| b.is_subset(carrier)).cloned());
    loop {
        let current: Vec<BitSet> = family.iter().cloned().collect();
        let before = family.len();
        for (i, a) in current.iter().enumerate() {
            for b in &current[i + 1..] {
                family.insert(a.intersection(b));
                family.insert(a.union(b));
            }
        }
        if family.len() == before {
            break;
        }
    }
    Topology {
        carrier: carrier.clone(),
        opens: sort_opens(family),
    }
}

/// A family of subsets indexed by position, meant to cover `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub target: BitSet,
    pub parts: Vec<BitSet>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CoverRequirements {
    pub open_parts: bool,
    pub open_target: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverFailure {
    TargetNotSubset,
    PartNotSubset(usize),
    NotCovered(usize),
    PartNotOpen(usize),
    TargetNotOpen,
}

pub fn check_cover(space: &Topology, cover: &Cover, req: CoverRequirements) -> std::result::Result<(), CoverFailure> {
    if !cover.target.is_subset(&space.carrier) {
        return Err(CoverFailure::TargetNotSubset);
    }
    if let Some(i) = cover.parts.iter().position(|p| !p.is_subset(&space.carrier)) {
        return Err(CoverFailure::PartNotSubset(i));
    }
    let union = cover.parts.iter().fold(BitSet::new(), |acc, p| acc.union(p));
    if let Some(x) = cover.target.difference(&union).iter().next() {
        return Err(CoverFailure::NotCovered(x));
    }
    if req.open_parts {
        if let Some(i) = cover.parts.iter().position(|p| !space.is_open(p)) {
            return Err(CoverFailure::PartNotOpen(i));
        }
    }
    if req.open_target && !space.is_open(&cover.target) {
        return Err(CoverFailure::TargetNotOpen);
    }
    Ok(())
}

/// Subspace topology on `u`: opens are `u ∩ V` for `V` open.
pub fn induced_topology(t: &Topology, u: &BitSet) -> Result<Topology> {
    if !u.is_subset(&t.carrier) {
        return Err(Error::NotSubset(u.clone()));
    }
    Ok(Topology {
        carrier: u.clone(),
        opens: sort_opens(t.opens.iter().map(|v| v.intersection(u))),
    })
}

/// A point map between two finite spaces; continuity is checked separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuousMap {
    pub source: Topology,
    pub dest: Topology,
    pub map: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContinuityFailure {
    NotTotal(usize),
    OutsideDest(usize),
    NonOpenPreimage(BitSet),
}

impl ContinuousMap {
    pub fn identity(t: &Topology) -> Self {
        Self {
            source: t.clone(),
            dest: t.clone(),
            map: t.carrier.iter().map(|x| (x, x)).collect(),
        }
    }

    /// Builds the map and checks that it is continuous.
    pub fn new(source: Topology, dest: Topology, map: BTreeMap<usize, usize>) -> Result<Self> {
        let m = Self { source, dest, map };
        check_continuous(&m).map_err(Error::NotContinuous)?;
        Ok(m)
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[&x]
    }

    pub fn preimage(&self, v: &BitSet) -> BitSet {
        self.source.carrier.iter().filter(|x| self.map.get(x).is_some_and(|y| v.contains(*y))).collect()
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &ContinuousMap) -> ContinuousMap {
        ContinuousMap {
            source: first.source.clone(),
            dest: self.dest.clone(),
            map: first.map.iter().map(|(&x, y)| (x, self.map[y])).collect(),
        }
    }

    pub fn is_bijective(&self) -> bool {
        let image: BitSet = self.source.carrier.iter().filter_map(|x| self.map.get(&x).copied()).collect();
        image == self.dest.carrier && self.source.carrier.len() == self.dest.carrier.len() && self.map.len() == self.source.carrier.len()
    }

    pub fn inverse(&self) -> Option<ContinuousMap> {
        self.is_bijective().then(|| ContinuousMap {
            source: self.dest.clone(),
            dest: self.source.clone(),
            map: self.map.iter().map(|(&x, &y)| (y, x)).collect(),
        })
    }
}

pub fn check_continuous(m: &ContinuousMap) -> std::result::Result<(), ContinuityFailure> {
    for x in m.source.carrier.iter() {
        match m.map.get(&x) {
            None => return Err(ContinuityFailure::NotTotal(x)),
            Some(&y) if !m.dest.carrier.contains(y) => return Err(ContinuityFailure::OutsideDest(x)),
            Some(_) => {}
        }
    }
    match m.dest.opens.iter().find(|v| !m.source.is_open(&m.preimage(v))) {
        Some(v) => Err(ContinuityFailure::NonOpenPreimage(v.clone())),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomeomorphismFailure {
    NotBijective,
    NotContinuous(ContinuityFailure),
    InverseNotContinuous(ContinuityFailure),
}

pub fn check_homeomorphism(m: &ContinuousMap) -> std::result::Result<(), HomeomorphismFailure> {
    check_continuous(m).map_err(HomeomorphismFailure::NotContinuous)?;
    let inv = m.inverse().ok_or(HomeomorphismFailure::NotBijective)?;
    check_continuous(&inv).map_err(HomeomorphismFailure::InverseNotContinuous)
}
