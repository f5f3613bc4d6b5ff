//! The prime spectrum of a finite commutative ring with its Zariski
//! topology, and the structure sheaf of locally-fractional sections.
//!
//! Points are indices into the prime ideals in enumeration order. A section
//! over `U` assigns to each point `𝔭 ∈ U` a class of the local ring `R_𝔭`;
//! it is regular when every point has an open neighborhood inside `U` on
//! which the section is a single fraction `r / f`.

use std::collections::{BTreeMap, HashMap};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::guard::Guards;
use crate::localization::{local_ring_at, LocalizedRing};
use crate::ring::{
    enumerate_ideals, enumerate_prime_ideals, validate_ring, Elem, FiniteRing, Ideal, PrimeIdeal, RawRing, RingHom,
};
use crate::sheaf::PresheafOfRings;
use crate::topology::{generated_topology, Topology};

#[derive(Clone, Debug)]
pub struct SpectrumSpace {
    ring: FiniteRing,
    points: Vec<PrimeIdeal>,
    topology: Topology,
    stalks: Vec<LocalizedRing>,
}

/// Indices of the points containing `a`.
fn vanishing(points: &[PrimeIdeal], a: &Ideal) -> BitSet {
    points
        .iter()
        .enumerate()
        .filter(|(_, p)| a.members().is_subset(p.members()))
        .map(|(i, _)| i)
        .collect()
}

/// `V(a)`: the points of `Spec r` containing `a`.
pub fn closed_subsets(r: &FiniteRing, a: &Ideal, guards: &Guards) -> Result<BitSet> {
    Ok(vanishing(&enumerate_prime_ideals(r, guards)?, a))
}

/// `Spec r` with the topology generated by the complements of all `V(a)`.
pub fn zariski_topology(r: &FiniteRing, guards: &Guards) -> Result<SpectrumSpace> {
    if !r.is_commutative() {
        return Err(Error::NotCommutative);
    }
    let points = enumerate_prime_ideals(r, guards)?;
    let carrier: BitSet = (0..points.len()).collect();
    let basis: Vec<BitSet> = enumerate_ideals(r, guards)?
        .iter()
        .map(|a| carrier.difference(&vanishing(&points, a)))
        .collect();
    let topology = generated_topology(&carrier, &basis);
    let stalks = points.iter().map(|p| local_ring_at(r, p, guards)).collect::<Result<_>>()?;
    Ok(SpectrumSpace {
        ring: r.clone(),
        points,
        topology,
        stalks,
    })
}

impl SpectrumSpace {
    pub fn ring(&self) -> &FiniteRing {
        &self.ring
    }

    pub fn points(&self) -> &[PrimeIdeal] {
        &self.points
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    /// `R_𝔭` for the point with index `p`.
    pub fn stalk(&self, p: usize) -> &LocalizedRing {
        &self.stalks[p]
    }

    pub fn stalks(&self) -> &[LocalizedRing] {
        &self.stalks
    }

    pub fn closed_subsets(&self, a: &Ideal) -> BitSet {
        vanishing(&self.points, a)
    }

    /// Index of the point whose prime is exactly `members`.
    pub fn point_of(&self, members: &BitSet) -> Option<usize> {
        self.points.iter().position(|p| p.members() == members)
    }
}

/// Section values: point index ↦ class index in that point's local ring.
pub type SectionValues = BTreeMap<usize, usize>;

/// Some `(r, f)`, least in `(r, f)` order, with `f ∉ 𝔮` and
/// `values[𝔮] = r / f` for every `𝔮 ∈ v`. Over the empty set this is `(0, 1)`.
pub fn is_locally_frac(sp: &SpectrumSpace, values: &SectionValues, v: &BitSet) -> Option<(Elem, Elem)> {
    let r = &sp.ring;
    if v.is_empty() {
        return Some((r.zero(), r.one()));
    }
    r.elements()
        .flat_map(|a| r.elements().map(move |f| (a, f)))
        .find(|&(a, f)| {
            v.iter().all(|q| {
                !sp.points[q].contains(f) && sp.stalks[q].frac(a, f).ok() == values.get(&q).copied()
            })
        })
}

/// Witness that a section is a single fraction near a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub open: BitSet,
    pub numerator: Elem,
    pub denominator: Elem,
}

/// For each point of `u`, the first open in topology order that contains it,
/// lies in `u`, and carries a fraction witness.
pub fn is_regular(sp: &SpectrumSpace, values: &SectionValues, u: &BitSet) -> Option<BTreeMap<usize, Certificate>> {
    let within = sp.topology.opens_within(u);
    u.iter()
        .map(|p| {
            within
                .iter()
                .map(|&i| &sp.topology.opens()[i])
                .filter(|v| v.contains(p))
                .find_map(|v| {
                    is_locally_frac(sp, values, v).map(|(numerator, denominator)| Certificate {
                        open: v.clone(),
                        numerator,
                        denominator,
                    })
                })
                .map(|c| (p, c))
        })
        .collect()
}

/// A regular section. Equality compares domain and values only.
#[derive(Clone, Debug)]
pub struct Section {
    pub domain: BitSet,
    /// Class indices in point order of `domain`.
    pub values: Vec<usize>,
    pub certificate: BTreeMap<usize, Certificate>,
}

impl PartialEq for Section {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.values == other.values
    }
}

impl Eq for Section {}

impl Section {
    pub fn value_map(&self) -> SectionValues {
        self.domain.iter().zip(self.values.iter().copied()).collect()
    }

    pub fn value_at(&self, p: usize) -> Option<usize> {
        self.domain.iter().position(|q| q == p).map(|i| self.values[i])
    }
}

/// `O(U)`: the enumerated sections with their pointwise ring structure.
/// Over the empty open this is the single sentinel section.
#[derive(Clone, Debug)]
pub struct SectionRing {
    pub open: BitSet,
    pub sections: Vec<Section>,
    pub ring: FiniteRing,
}

impl SectionRing {
    pub fn index_of(&self, values: &[usize]) -> Option<usize> {
        self.sections.iter().position(|s| s.values == values)
    }
}

pub fn sheaf_spec_sections(sp: &SpectrumSpace, u: &BitSet, guards: &Guards) -> Result<SectionRing> {
    if !sp.topology.is_open(u) {
        return Err(Error::NotOpen(u.clone()));
    }
    let pts = u.to_vec();
    let sizes: Vec<usize> = pts.iter().map(|&p| sp.stalks[p].class_count()).collect();
    let total = sizes.iter().fold(1u128, |acc, &s| acc.saturating_mul(s as u128));
    guards.sections("sections over an open", total)?;

    let mut sections = Vec::new();
    let mut tuple = vec![0usize; pts.len()];
    'outer: loop {
        let values: SectionValues = pts.iter().copied().zip(tuple.iter().copied()).collect();
        if let Some(certificate) = is_regular(sp, &values, u) {
            sections.push(Section {
                domain: u.clone(),
                values: tuple.clone(),
                certificate,
            });
        }
        // advance, last point least significant
        for i in (0..tuple.len()).rev() {
            tuple[i] += 1;
            if tuple[i] < sizes[i] {
                continue 'outer;
            }
            tuple[i] = 0;
        }
        break;
    }

    let index: HashMap<&[usize], usize> = sections.iter().enumerate().map(|(i, s)| (s.values.as_slice(), i)).collect();
    let pointwise = |op: &dyn Fn(&FiniteRing, usize, usize) -> usize, a: &Section, b: &Section| -> Result<usize> {
        let v: Vec<usize> = pts
            .iter()
            .enumerate()
            .map(|(i, &p)| op(sp.stalks[p].ring(), a.values[i], b.values[i]))
            .collect();
        index
            .get(v.as_slice())
            .copied()
            .ok_or_else(|| Error::Internal(format!("regular sections over {u} are not closed under operations")))
    };
    let n = sections.len();
    let mut add = vec![vec![0; n]; n];
    let mut mul = vec![vec![0; n]; n];
    for (i, a) in sections.iter().enumerate() {
        for (j, b) in sections.iter().enumerate() {
            add[i][j] = pointwise(&|r, x, y| r.add(x, y), a, b)?;
            mul[i][j] = pointwise(&|r, x, y| r.mul(x, y), a, b)?;
        }
    }
    let find = |v: Vec<usize>| {
        index
            .get(v.as_slice())
            .copied()
            .ok_or_else(|| Error::Internal(format!("constant section missing over {u}")))
    };
    let zero = find(pts.iter().map(|&p| sp.stalks[p].ring().zero()).collect())?;
    let one = find(pts.iter().map(|&p| sp.stalks[p].ring().one()).collect())?;
    let ring = validate_ring(&RawRing { size: n, add, mul, zero, one }, true)?;
    Ok(SectionRing {
        open: u.clone(),
        sections,
        ring,
    })
}

/// Restriction of sections from `O(U)` to `O(V)`, checked to be a ring hom.
pub fn sheaf_spec_restrict(from: &SectionRing, to: &SectionRing) -> Result<RingHom> {
    if !to.open.is_subset(&from.open) {
        return Err(Error::NotNested {
            outer: from.open.clone(),
            inner: to.open.clone(),
        });
    }
    let keep: Vec<usize> = from
        .open
        .iter()
        .enumerate()
        .filter(|&(_, p)| to.open.contains(p))
        .map(|(i, _)| i)
        .collect();
    let table = from
        .sections
        .iter()
        .map(|s| {
            let v: Vec<usize> = keep.iter().map(|&i| s.values[i]).collect();
            to.index_of(&v)
                .ok_or_else(|| Error::Internal(format!("restriction of a section to {} is not regular", to.open)))
        })
        .collect::<Result<Vec<_>>>()?;
    RingHom::new(table, &from.ring, &to.ring)
}

/// `O_Spec` assembled as a presheaf of rings over the Zariski topology.
#[derive(Clone, Debug)]
pub struct StructureSheaf {
    pub space: SpectrumSpace,
    /// Indexed like the topology's opens.
    pub sections: Vec<SectionRing>,
    pub presheaf: PresheafOfRings,
}

pub fn structure_sheaf(r: &FiniteRing, guards: &Guards) -> Result<StructureSheaf> {
    let space = zariski_topology(r, guards)?;
    structure_sheaf_on(space, guards)
}

pub fn structure_sheaf_on(space: SpectrumSpace, guards: &Guards) -> Result<StructureSheaf> {
    let opens = space.topology.opens().to_vec();
    let sections = opens
        .iter()
        .map(|u| sheaf_spec_sections(&space, u, guards))
        .collect::<Result<Vec<_>>>()?;
    let mut restrictions = BTreeMap::new();
    for (ui, u) in opens.iter().enumerate() {
        for (vi, v) in opens.iter().enumerate() {
            if v.is_subset(u) {
                restrictions.insert((u.clone(), v.clone()), sheaf_spec_restrict(&sections[ui], &sections[vi])?);
            }
        }
    }
    let rings = sections.iter().map(|s| s.ring.clone()).collect();
    let presheaf = PresheafOfRings::new(space.topology.clone(), rings, restrictions, 0)?;
    Ok(StructureSheaf {
        space,
        sections,
        presheaf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{product_ring, ring_iso_search, zmod};
    use crate::sheaf::{check_presheaf_axioms, check_sheaf_axioms};

    fn spec(n: usize) -> SpectrumSpace {
        zariski_topology(&zmod(n).unwrap(), &Guards::default()).unwrap()
    }

    fn set(xs: &[usize]) -> BitSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn closed_subsets_examples() {
        let r = zmod(6).unwrap();
        let g = Guards::default();
        assert!(closed_subsets(&r, &Ideal::whole(&r), &g).unwrap().is_empty());
        assert_eq!(closed_subsets(&r, &Ideal::zero(&r), &g).unwrap(), set(&[0, 1]));
        let sp = spec(6);
        let two = Ideal::new(&r, set(&[0, 2, 4])).unwrap();
        let v = closed_subsets(&r, &two, &g).unwrap();
        assert_eq!(v, BitSet::singleton(sp.point_of(&set(&[0, 2, 4])).unwrap()));
    }

    #[test]
    fn zariski_examples() {
        assert_eq!(spec(6).topology().opens().len(), 4);
        assert_eq!(spec(4).topology().opens(), &[BitSet::new(), set(&[0])]);
        let empty = spec(1);
        assert_eq!(empty.point_count(), 0);
        assert_eq!(empty.topology().opens(), &[BitSet::new()]);
        assert!(zariski_topology(&zmod(1).unwrap(), &Guards::default()).is_ok());
    }

    #[test]
    fn zariski_opens_are_unions_of_basis() {
        let g = Guards::default();
        let rings = [
            zmod(12).unwrap(),
            zmod(30).unwrap(),
            product_ring(&zmod(2).unwrap(), &zmod(4).unwrap(), &g).unwrap(),
        ];
        for r in &rings {
            let sp = zariski_topology(r, &g).unwrap();
            let carrier: BitSet = (0..sp.point_count()).collect();
            let basis: Vec<BitSet> = enumerate_ideals(r, &g)
                .unwrap()
                .iter()
                .map(|a| carrier.difference(&sp.closed_subsets(a)))
                .collect();
            let mut unions: Vec<BitSet> = (0u64..1 << basis.len())
                .map(|m| {
                    (0..basis.len())
                        .filter(|i| m >> i & 1 == 1)
                        .fold(BitSet::new(), |acc, i| acc.union(&basis[i]))
                })
                .collect();
            unions.push(carrier.clone());
            unions.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            unions.dedup();
            assert_eq!(sp.topology().opens(), unions.as_slice());
        }
    }

    #[test]
    fn locally_frac_examples() {
        let sp = spec(6);
        assert_eq!(is_locally_frac(&sp, &SectionValues::new(), &BitSet::new()), Some((0, 1)));
        let all = set(&[0, 1]);
        let zeros: SectionValues = (0..2).map(|p| (p, sp.stalk(p).ring().zero())).collect();
        assert_eq!(is_locally_frac(&sp, &zeros, &all), Some((0, 1)));

        let p2 = sp.point_of(&set(&[0, 2, 4])).unwrap();
        let p3 = sp.point_of(&set(&[0, 3])).unwrap();
        let mixed = SectionValues::from([(p2, sp.stalk(p2).ring().one()), (p3, sp.stalk(p3).ring().zero())]);
        assert_eq!(is_locally_frac(&sp, &mixed, &all), Some((3, 1)));
    }

    #[test]
    fn regularity_examples() {
        let sp = spec(6);
        assert_eq!(is_regular(&sp, &SectionValues::new(), &BitSet::new()), Some(BTreeMap::new()));
        let all = set(&[0, 1]);
        let zeros: SectionValues = (0..2).map(|p| (p, sp.stalk(p).ring().zero())).collect();
        let cert = is_regular(&sp, &zeros, &all).unwrap();
        // the singleton neighborhoods come first in topology order
        for (p, c) in &cert {
            assert!(c.open.contains(*p));
            assert_eq!((c.numerator, c.denominator), (0, 1));
        }
        for a in 0..sp.stalk(0).class_count() {
            for b in 0..sp.stalk(1).class_count() {
                let vals = SectionValues::from([(0, a), (1, b)]);
                assert!(is_regular(&sp, &vals, &all).is_some());
            }
        }
    }

    #[test]
    fn section_ring_examples() {
        let g = Guards::default();
        let sp = spec(6);
        let empty = sheaf_spec_sections(&sp, &BitSet::new(), &g).unwrap();
        assert_eq!(empty.ring.size(), 1);
        let global = sheaf_spec_sections(&sp, &set(&[0, 1]), &g).unwrap();
        assert_eq!(global.ring.size(), 6);
        assert!(ring_iso_search(&global.ring, &zmod(6).unwrap()).is_some());

        let sp4 = spec(4);
        let g4 = sheaf_spec_sections(&sp4, &set(&[0]), &g).unwrap();
        assert!(ring_iso_search(&g4.ring, &zmod(4).unwrap()).is_some());

        let tight = Guards { max_sections: 5, ..Guards::default() };
        assert!(matches!(
            sheaf_spec_sections(&sp, &set(&[0, 1]), &tight),
            Err(Error::SizeGuard { count: 6, .. })
        ));
    }

    #[test]
    fn restriction_examples() {
        let g = Guards::default();
        let sp = spec(6);
        let global = sheaf_spec_sections(&sp, &set(&[0, 1]), &g).unwrap();
        let p2 = sp.point_of(&set(&[0, 2, 4])).unwrap();
        let local = sheaf_spec_sections(&sp, &BitSet::singleton(p2), &g).unwrap();
        let h = sheaf_spec_restrict(&global, &local).unwrap();
        assert_eq!(local.ring.size(), 2);
        for t in 0..2 {
            assert_eq!(h.table().iter().filter(|&&x| x == t).count(), 3);
        }
        assert_eq!(sheaf_spec_restrict(&global, &global).unwrap(), RingHom::identity(&global.ring));
        let empty = sheaf_spec_sections(&sp, &BitSet::new(), &g).unwrap();
        assert!(sheaf_spec_restrict(&global, &empty).unwrap().table().iter().all(|&x| x == 0));
        assert!(matches!(sheaf_spec_restrict(&local, &global), Err(Error::NotNested { .. })));
    }

    #[test]
    fn structure_sheaves_pass_the_suites() {
        let g = Guards::default();
        for (n, opens) in [(6, 4), (4, 2), (1, 1), (12, 4)] {
            let o = structure_sheaf(&zmod(n).unwrap(), &g).unwrap();
            assert_eq!(o.presheaf.open_count(), opens);
            let pre = check_presheaf_axioms(&o.presheaf);
            assert!(pre.passed(), "zmod({n}): {:?}", pre.failures().collect::<Vec<_>>());
            let sh = check_sheaf_axioms(&o.presheaf, &g);
            assert!(sh.passed(), "zmod({n}): {:?}", sh.failures().collect::<Vec<_>>());
        }
        let z2 = zmod(2).unwrap();
        let o = structure_sheaf(&product_ring(&z2, &z2, &g).unwrap(), &g).unwrap();
        assert!(check_presheaf_axioms(&o.presheaf).passed());
        assert!(check_sheaf_axioms(&o.presheaf, &g).passed());
    }
}
