//! Direct limits of a presheaf of rings over a downward-directed family of
//! opens, and stalks as the special case of all neighborhoods of a point.
//!
//! Elements of the limit are classes `⌊U, s⌋` of pairs with `s ∈ F(U)`,
//! where `(U, s) ~ (V, t)` iff the two sections agree after restriction to
//! some member `W ⊆ U ∩ V`. Class representatives are the least pair by
//! (open bitmask, element index); the representative-independence of the
//! induced operations is checked when the limit is built.

use std::collections::BTreeMap;
use std::ops::Deref;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::guard::Guards;
use crate::ring::{check_ring_hom, validate_ring, Elem, FiniteRing, RawRing, RingHom};
use crate::sheaf::PresheafOfRings;

/// A set of opens in which every pair has a member below their intersection.
#[derive(Clone, Debug)]
pub struct DirectedOpenFamily<'a> {
    presheaf: &'a PresheafOfRings,
    /// Open indices, sorted by bitmask.
    members: Vec<usize>,
}

impl<'a> DirectedOpenFamily<'a> {
    /// Validates membership and directedness; duplicates collapse.
    pub fn new(presheaf: &'a PresheafOfRings, members: &[BitSet]) -> Result<Self> {
        let mut sorted: Vec<&BitSet> = members.iter().collect();
        sorted.sort();
        sorted.dedup();
        let members = sorted
            .into_iter()
            .map(|u| presheaf.index_of(u))
            .collect::<Result<Vec<_>>>()?;
        let fam = Self { presheaf, members };
        for &u in &fam.members {
            for &v in &fam.members {
                fam.lower_bound_of(u, v)?;
            }
        }
        Ok(fam)
    }

    fn from_indices(presheaf: &'a PresheafOfRings, mut members: Vec<usize>) -> Result<Self> {
        members.sort_by(|&a, &b| presheaf.open(a).cmp(presheaf.open(b)));
        let opens: Vec<BitSet> = members.iter().map(|&i| presheaf.open(i).clone()).collect();
        Self::new(presheaf, &opens)
    }

    pub fn presheaf(&self) -> &'a PresheafOfRings {
        self.presheaf
    }

    /// Member open indices in bitmask order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, u: usize) -> bool {
        self.members.contains(&u)
    }

    fn lower_bound_of(&self, u: usize, v: usize) -> Result<usize> {
        let p = self.presheaf;
        let meet = p.open(u).intersection(p.open(v));
        self.members
            .iter()
            .copied()
            .filter(|&w| p.open(w).is_subset(&meet))
            .max_by(|&a, &b| p.open(a).len().cmp(&p.open(b).len()).then_with(|| p.open(b).cmp(p.open(a))))
            .ok_or_else(|| Error::NoLowerBound(p.open(u).clone(), p.open(v).clone()))
    }

    /// The member `W ⊆ u ∩ v` of largest size, ties broken by least bitmask.
    pub fn get_lower_bound(&self, u: usize, v: usize) -> Result<usize> {
        for x in [u, v] {
            if !self.contains(x) {
                return Err(Error::NotMember(self.presheaf.open(x).clone()));
            }
        }
        self.lower_bound_of(u, v)
    }

    /// Whether `(U, s)` and `(V, t)` agree on some member below `U ∩ V`.
    pub fn dl_equiv(&self, x: (usize, Elem), y: (usize, Elem)) -> bool {
        let p = self.presheaf;
        let meet = p.open(x.0).intersection(p.open(y.0));
        self.members
            .iter()
            .filter(|&&w| p.open(w).is_subset(&meet))
            .any(|&w| p.restrict(x.0, w, x.1) == p.restrict(y.0, w, y.1))
    }

    /// All pairs `(U, s)` in representative order.
    pub fn pairs(&self) -> Vec<(usize, Elem)> {
        self.members
            .iter()
            .flat_map(|&u| self.presheaf.section_ring(u).elements().map(move |s| (u, s)))
            .collect()
    }
}

/// The ring `lim F = ∐ F(U) / ~` over a directed family.
#[derive(Clone, Debug)]
pub struct LimitRing<'a> {
    family: DirectedOpenFamily<'a>,
    ring: FiniteRing,
    class_of: BTreeMap<(usize, Elem), usize>,
    reps: Vec<(usize, Elem)>,
}

pub fn direct_limit<'a>(family: DirectedOpenFamily<'a>, guards: &Guards) -> Result<LimitRing<'a>> {
    let p = family.presheaf;
    let pairs = family.pairs();
    guards.sections("direct limit pairs", pairs.len() as u128)?;

    let mut class_of: BTreeMap<(usize, Elem), usize> = BTreeMap::new();
    let mut reps = Vec::new();
    for (i, &x) in pairs.iter().enumerate() {
        if class_of.contains_key(&x) {
            continue;
        }
        let c = reps.len();
        reps.push(x);
        class_of.insert(x, c);
        for &y in &pairs[i + 1..] {
            if !class_of.contains_key(&y) && family.dl_equiv(x, y) {
                class_of.insert(y, c);
            }
        }
    }

    let combine = |x: (usize, Elem), y: (usize, Elem), mul: bool| -> Result<usize> {
        let w = family.lower_bound_of(x.0, y.0)?;
        let (a, b) = (p.restrict(x.0, w, x.1), p.restrict(y.0, w, y.1));
        let fw = p.section_ring(w);
        Ok(class_of[&(w, if mul { fw.mul(a, b) } else { fw.add(a, b) })])
    };
    let k = reps.len();
    let mut add = vec![vec![0; k]; k];
    let mut mul = vec![vec![0; k]; k];
    for a in 0..k {
        for b in 0..k {
            add[a][b] = combine(reps[a], reps[b], false)?;
            mul[a][b] = combine(reps[a], reps[b], true)?;
        }
    }

    let zeros: Vec<usize> = family.members.iter().map(|&u| class_of[&(u, p.section_ring(u).zero())]).collect();
    let ones: Vec<usize> = family.members.iter().map(|&u| class_of[&(u, p.section_ring(u).one())]).collect();
    if zeros.windows(2).any(|w| w[0] != w[1]) || ones.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::WellDefinednessFailure("zero or one classes depend on the member".into()));
    }
    let (Some(&zero), Some(&one)) = (zeros.first(), ones.first()) else {
        return Err(Error::BadPresheaf("a direct limit needs at least one member".into()));
    };

    // representative independence
    for &x in &pairs {
        for &y in &pairs {
            let (cx, cy) = (class_of[&x], class_of[&y]);
            if combine(x, y, false)? != add[cx][cy] || combine(x, y, true)? != mul[cx][cy] {
                return Err(Error::WellDefinednessFailure(format!(
                    "operations on ({}, {}) and ({}, {}) depend on representatives",
                    p.open(x.0),
                    x.1,
                    p.open(y.0),
                    y.1
                )));
            }
        }
    }

    let ring = validate_ring(&RawRing { size: k, add, mul, zero, one }, false)
        .map_err(|e| Error::WellDefinednessFailure(format!("limit is not a ring: {e}")))?;
    Ok(LimitRing { family, ring, class_of, reps })
}

impl<'a> LimitRing<'a> {
    pub fn ring(&self) -> &FiniteRing {
        &self.ring
    }

    pub fn family(&self) -> &DirectedOpenFamily<'a> {
        &self.family
    }

    pub fn class_count(&self) -> usize {
        self.reps.len()
    }

    /// Canonical representative `(open index, section)` of a class.
    pub fn representative(&self, class: usize) -> (usize, Elem) {
        self.reps[class]
    }

    /// Class index of any pair, if `u` is a member.
    pub fn class_of(&self, u: usize, s: Elem) -> Option<usize> {
        self.class_of.get(&(u, s)).copied()
    }

    /// `⌊U, x⌋`.
    pub fn canonical_fun(&self, u: usize, x: Elem) -> Result<usize> {
        self.class_of(u, x)
            .ok_or_else(|| Error::NotMember(self.family.presheaf.open(u).clone()))
    }

    /// The canonical map `F(U) → lim F`, checked to be a ring homomorphism.
    pub fn canonical_hom(&self, u: usize) -> Result<RingHom> {
        let fu = self.family.presheaf.section_ring(u);
        let table = fu.elements().map(|x| self.canonical_fun(u, x)).collect::<Result<Vec<_>>>()?;
        RingHom::new(table, fu, &self.ring)
    }
}

/// A target ring with a compatible family of maps `ψ_U : F(U) → A`.
#[derive(Clone, Debug)]
pub struct UniversalityWitness {
    pub target: FiniteRing,
    /// Keyed by open index; one entry per family member.
    pub homs: BTreeMap<usize, RingHom>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalMap {
    pub hom: RingHom,
    /// Every class lies in the image of some canonical map, so any two maps
    /// agreeing on those images coincide.
    pub unique: bool,
}

/// Builds the induced map `lim F → A` and verifies it.
pub fn universal_map(lr: &LimitRing<'_>, w: &UniversalityWitness) -> Result<UniversalMap> {
    let fam = &lr.family;
    let p = fam.presheaf;
    for &u in &fam.members {
        let psi = w
            .homs
            .get(&u)
            .ok_or_else(|| Error::IncompatibleFamily(format!("no map given for {}", p.open(u))))?;
        check_ring_hom(psi.table(), p.section_ring(u), &w.target)
            .map_err(|e| Error::IncompatibleFamily(format!("map on {} is not a ring hom: {e:?}", p.open(u))))?;
    }
    for &u in &fam.members {
        for &v in fam.members.iter().filter(|&&v| p.open(v).is_subset(p.open(u))) {
            if let Some(x) = p
                .section_ring(u)
                .elements()
                .find(|&x| w.homs[&v].apply(p.restrict(u, v, x)) != w.homs[&u].apply(x))
            {
                return Err(Error::IncompatibleFamily(format!(
                    "ψ_V ∘ ρ(U,V) ≠ ψ_U at U={} V={} x={x}",
                    p.open(u),
                    p.open(v)
                )));
            }
        }
    }

    let table: Vec<Elem> = lr.reps.iter().map(|&(u, s)| w.homs[&u].apply(s)).collect();
    for (&(u, s), &c) in &lr.class_of {
        if table[c] != w.homs[&u].apply(s) {
            return Err(Error::WellDefinednessFailure(format!(
                "u ∘ canonical_fun ≠ ψ at U={} s={s}",
                p.open(u)
            )));
        }
    }
    let hom = RingHom::new(table, &lr.ring, &w.target)?;
    let mut covered = vec![false; lr.class_count()];
    for &c in lr.class_of.values() {
        covered[c] = true;
    }
    Ok(UniversalMap {
        hom,
        unique: covered.into_iter().all(|b| b),
    })
}

/// The stalk `F_x`: the direct limit over all open neighborhoods of `x`.
#[derive(Clone, Debug)]
pub struct Stalk<'a> {
    pub point: usize,
    pub limit: LimitRing<'a>,
}

impl<'a> Deref for Stalk<'a> {
    type Target = LimitRing<'a>;

    fn deref(&self) -> &LimitRing<'a> {
        &self.limit
    }
}

pub fn stalk_at<'a>(p: &'a PresheafOfRings, x: usize, guards: &Guards) -> Result<Stalk<'a>> {
    if !p.topology().carrier().contains(x) {
        return Err(Error::NotSubset(BitSet::singleton(x)));
    }
    let family = DirectedOpenFamily::from_indices(p, p.topology().neighborhoods(x))?;
    Ok(Stalk { point: x, limit: direct_limit(family, guards)? })
}
