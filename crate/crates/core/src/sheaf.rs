//! Presheaves and sheaves of rings over finite topologies.
//!
//! A presheaf stores one [`FiniteRing`] per open set (indexed like
//! [`Topology::opens`]) and one restriction table per nested pair `V ⊆ U`.
//! Nothing beyond shape is checked at construction; the axiom checkers
//! produce [`Report`]s.

use std::collections::{BTreeMap, HashMap};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::guard::Guards;
use crate::report::Report;
use crate::ring::{check_ring_hom, validate_ring, Elem, FiniteRing, RingHom};
use crate::topology::{check_continuous, induced_topology, ContinuousMap, Topology};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresheafOfRings {
    topology: Topology,
    section_rings: Vec<FiniteRing>,
    restrictions: BTreeMap<(usize, usize), RingHom>,
    base_elem: Elem,
}

impl PresheafOfRings {
    /// Assembles a presheaf. `section_rings[i]` is the ring over
    /// `topology.opens()[i]`; `restrictions` must hold a table for every
    /// nested pair `(U, V)` with `V ⊆ U`, and nothing else.
    pub fn new(
        topology: Topology,
        section_rings: Vec<FiniteRing>,
        restrictions: BTreeMap<(BitSet, BitSet), RingHom>,
        base_elem: Elem,
    ) -> Result<Self> {
        let opens = topology.opens();
        if section_rings.len() != opens.len() {
            return Err(Error::BadPresheaf(format!(
                "{} section rings for {} opens",
                section_rings.len(),
                opens.len()
            )));
        }
        let mut by_index = BTreeMap::new();
        for ((u, v), h) in restrictions {
            let (Some(ui), Some(vi)) = (topology.open_index(&u), topology.open_index(&v)) else {
                return Err(Error::BadPresheaf(format!("restriction {u} -> {v} between non-open sets")));
            };
            if !v.is_subset(&u) {
                return Err(Error::NotNested { outer: u, inner: v });
            }
            if h.source_size() != section_rings[ui].size() || h.target_size() != section_rings[vi].size() {
                return Err(Error::BadPresheaf(format!("restriction {u} -> {v} has the wrong shape")));
            }
            by_index.insert((ui, vi), h);
        }
        for (ui, u) in opens.iter().enumerate() {
            for (vi, v) in opens.iter().enumerate() {
                if v.is_subset(u) && !by_index.contains_key(&(ui, vi)) {
                    return Err(Error::BadPresheaf(format!("missing restriction {u} -> {v}")));
                }
            }
        }
        Ok(Self {
            topology,
            section_rings,
            restrictions: by_index,
            base_elem,
        })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn open(&self, u: usize) -> &BitSet {
        &self.topology.opens()[u]
    }

    pub fn open_count(&self) -> usize {
        self.section_rings.len()
    }

    /// Index of an open set, or `NotOpen`.
    pub fn index_of(&self, u: &BitSet) -> Result<usize> {
        self.topology.open_index(u).ok_or_else(|| Error::NotOpen(u.clone()))
    }

    pub fn section_ring(&self, u: usize) -> &FiniteRing {
        &self.section_rings[u]
    }

    pub fn base_elem(&self) -> Elem {
        self.base_elem
    }

    /// `ρ(U, V)`; only defined for `V ⊆ U`.
    pub fn restriction(&self, u: usize, v: usize) -> Result<&RingHom> {
        self.restrictions.get(&(u, v)).ok_or_else(|| Error::NotNested {
            outer: self.open(u).clone(),
            inner: self.open(v).clone(),
        })
    }

    /// `ρ(U, V)(s)`. Panics if `V ⊄ U`.
    pub fn restrict(&self, u: usize, v: usize, s: Elem) -> Elem {
        self.restrictions[&(u, v)].apply(s)
    }

    /// Restriction tables keyed by open sets, as accepted by [`PresheafOfRings::new`].
    pub fn restriction_tables(&self) -> BTreeMap<(BitSet, BitSet), RingHom> {
        self.restrictions
            .iter()
            .map(|(&(u, v), h)| ((self.open(u).clone(), self.open(v).clone()), h.clone()))
            .collect()
    }

    pub fn section_rings(&self) -> &[FiniteRing] {
        &self.section_rings
    }

    /// Copy whose section ring over open `i` is renamed by `perms[i]`,
    /// together with the renaming isomorphism from `self` to the copy.
    pub fn relabeled(&self, perms: &[Vec<Elem>]) -> (PresheafOfRings, PresheafMorphism) {
        assert_eq!(perms.len(), self.open_count());
        let rings: Vec<FiniteRing> = self.section_rings.iter().zip(perms).map(|(r, p)| r.relabel(p)).collect();
        let mut inv: Vec<Vec<Elem>> = perms.iter().map(|p| vec![0; p.len()]).collect();
        for (i, p) in perms.iter().enumerate() {
            for (x, &y) in p.iter().enumerate() {
                inv[i][y] = x;
            }
        }
        let restrictions = self
            .restrictions
            .iter()
            .map(|(&(u, v), h)| {
                let table = (0..rings[u].size()).map(|y| perms[v][h.apply(inv[u][y])]).collect();
                (
                    (self.open(u).clone(), self.open(v).clone()),
                    RingHom::unchecked(table, rings[v].size()),
                )
            })
            .collect();
        let base = perms[self.topology.open_index(&BitSet::new()).expect("empty set is open")][self.base_elem];
        let copy = PresheafOfRings::new(self.topology.clone(), rings, restrictions, base).expect("same shape");
        let iso = PresheafMorphism {
            per_open: perms
                .iter()
                .zip(&copy.section_rings)
                .map(|(p, r)| RingHom::unchecked(p.clone(), r.size()))
                .collect(),
        };
        (copy, iso)
    }
}

/// The presheaf `U ↦ ring` (for nonempty `U`) with identity restrictions,
/// and the zero ring over the empty set.
pub fn constant_presheaf(topology: &Topology, ring: &FiniteRing) -> PresheafOfRings {
    let zero_ring = FiniteRing::zero_ring();
    let opens = topology.opens();
    let rings: Vec<FiniteRing> = opens
        .iter()
        .map(|u| if u.is_empty() { zero_ring.clone() } else { ring.clone() })
        .collect();
    let mut restrictions = BTreeMap::new();
    for (ui, u) in opens.iter().enumerate() {
        for (vi, v) in opens.iter().enumerate() {
            if v.is_subset(u) {
                let h = if v.is_empty() {
                    RingHom::unchecked(vec![0; rings[ui].size()], 1)
                } else {
                    RingHom::identity(&rings[vi])
                };
                restrictions.insert((u.clone(), v.clone()), h);
            }
        }
    }
    PresheafOfRings::new(topology.clone(), rings, restrictions, 0).expect("constant presheaf is well shaped")
}

fn nested_pairs(t: &Topology) -> Vec<(usize, usize)> {
    let opens = t.opens();
    let mut pairs = Vec::new();
    for u in 0..opens.len() {
        for v in 0..opens.len() {
            if opens[v].is_subset(&opens[u]) {
                pairs.push((u, v));
            }
        }
    }
    pairs
}

/// Checks the presheaf axioms exhaustively over opens and sections.
pub fn check_presheaf_axioms(p: &PresheafOfRings) -> Report {
    let mut report = Report::new();
    let t = &p.topology;

    let empty = t.open_index(&BitSet::new()).expect("topologies contain the empty set");
    let f_empty = &p.section_rings[empty];
    if f_empty.size() == 1 && p.base_elem == 0 {
        report.pass("ring_of_empty", "presheaf_of_rings.ring_of_empty", None);
    } else {
        report.fail(
            "ring_of_empty",
            "presheaf_of_rings.ring_of_empty",
            format!("F(∅) has {} elements, base element {}", f_empty.size(), p.base_elem),
        );
    }

    let bad_ring = p
        .section_rings
        .iter()
        .enumerate()
        .find_map(|(u, r)| validate_ring(&r.to_raw(), false).err().map(|e| (u, e)));
    match bad_ring {
        None => report.pass("section_rings_are_rings", "is_ring_from_is_homomorphism", None),
        Some((u, e)) => report.fail(
            "section_rings_are_rings",
            "is_ring_from_is_homomorphism",
            format!("U={}: {e}", p.open(u)),
        ),
    }

    let pairs = nested_pairs(t);
    let bad_hom = pairs.iter().find_map(|&(u, v)| {
        check_ring_hom(p.restrictions[&(u, v)].table(), &p.section_rings[u], &p.section_rings[v])
            .err()
            .map(|e| (u, v, e))
    });
    match bad_hom {
        None => report.pass("is_ring_morphism", "presheaf_of_rings.is_ring_morphism", None),
        Some((u, v, e)) => report.fail(
            "is_ring_morphism",
            "presheaf_of_rings.is_ring_morphism",
            format!("U={} V={}: {e:?}", p.open(u), p.open(v)),
        ),
    }

    let bad_identity = (0..p.open_count()).find_map(|u| {
        p.section_rings[u]
            .elements()
            .find(|&x| p.restrict(u, u, x) != x)
            .map(|x| (u, x))
    });
    match bad_identity {
        None => report.pass("identity_map", "presheaf_of_rings.identity_map", None),
        Some((u, x)) => report.fail(
            "identity_map",
            "presheaf_of_rings.identity_map",
            format!("U={} x={x}", p.open(u)),
        ),
    }

    let mut bad_assoc = None;
    'outer: for &(u, v) in &pairs {
        for &(v2, w) in &pairs {
            if v2 != v {
                continue;
            }
            for x in p.section_rings[u].elements() {
                if p.restrict(u, w, x) != p.restrict(v, w, p.restrict(u, v, x)) {
                    bad_assoc = Some((u, v, w, x));
                    break 'outer;
                }
            }
        }
    }
    match bad_assoc {
        None => report.pass("assoc_comp", "presheaf_of_rings.assoc_comp", None),
        Some((u, v, w, x)) => report.fail(
            "assoc_comp",
            "presheaf_of_rings.assoc_comp",
            format!("U={} V={} W={} x={x}", p.open(u), p.open(v), p.open(w)),
        ),
    }
    report
}

/// Open covers of open `u` drawn from the topology, as lists of open
/// indices, and whether the list was truncated at `max`.
///
/// Parts are nonempty opens inside `u`; the empty set is covered only by the
/// empty family. Covers are listed by number of parts, then
/// lexicographically. All one- and two-part covers are always included;
/// larger ones stop once `max` covers have been collected.
pub fn enumerate_covers(t: &Topology, u: usize, max: u64) -> (Vec<Vec<usize>>, bool) {
    let target = &t.opens()[u];
    if target.is_empty() {
        return (vec![vec![]], false);
    }
    let candidates: Vec<usize> = t.opens_within(target).into_iter().filter(|&i| !t.opens()[i].is_empty()).collect();
    let covers_target = |parts: &[usize]| {
        let union = parts.iter().fold(BitSet::new(), |acc, &i| acc.union(&t.opens()[i]));
        &union == target
    };
    let mut covers = Vec::new();
    for k in 1..=candidates.len() {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            if k > 2 && covers.len() as u64 >= max {
                return (covers, true);
            }
            let parts: Vec<usize> = combo.iter().map(|&i| candidates[i]).collect();
            if covers_target(&parts) {
                covers.push(parts);
            }
            // next combination in lexicographic order
            let Some(i) = (0..k).rev().find(|&i| combo[i] != i + candidates.len() - k) else {
                break;
            };
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    (covers, false)
}

/// Result of checking locality and glueing for one cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlueOutcome {
    /// Number of compatible families `(s_i)` over the cover.
    pub compatible_families: usize,
    /// How many of them have at least one glued section.
    pub glued: usize,
    /// Every glued family has exactly one preimage.
    pub unique: bool,
    /// A nonzero section whose restrictions to every part are zero.
    pub locality_failure: Option<Elem>,
    /// First compatible family with no glued section.
    pub missing: Option<Vec<Elem>>,
}

/// Checks locality and glueing of `p` for the cover `parts` of open `u`.
pub fn glue_cover(p: &PresheafOfRings, u: usize, parts: &[usize], guards: &Guards) -> Result<GlueOutcome> {
    let t = &p.topology;
    let fu = &p.section_rings[u];
    let locality_failure = fu.elements().find(|&s| {
        s != fu.zero() && parts.iter().all(|&v| p.restrict(u, v, s) == p.section_rings[v].zero())
    });

    let mut preimages: HashMap<Vec<Elem>, usize> = HashMap::new();
    for s in fu.elements() {
        let key: Vec<Elem> = parts.iter().map(|&v| p.restrict(u, v, s)).collect();
        *preimages.entry(key).or_default() += 1;
    }

    // overlap[i][j] = index of V_i ∩ V_j
    let overlap: Vec<Vec<usize>> = parts
        .iter()
        .map(|&a| {
            parts
                .iter()
                .map(|&b| t.open_index(&p.open(a).intersection(p.open(b))).expect("opens are closed under ∩"))
                .collect()
        })
        .collect();

    let mut out = GlueOutcome {
        compatible_families: 0,
        glued: 0,
        unique: true,
        locality_failure,
        missing: None,
    };
    let mut family = Vec::with_capacity(parts.len());
    let mut visited: u128 = 0;
    #[allow(clippy::too_many_arguments)]
    fn extend(
        p: &PresheafOfRings,
        parts: &[usize],
        overlap: &[Vec<usize>],
        preimages: &HashMap<Vec<Elem>, usize>,
        family: &mut Vec<Elem>,
        out: &mut GlueOutcome,
        visited: &mut u128,
        guards: &Guards,
    ) -> Result<()> {
        let i = family.len();
        if i == parts.len() {
            out.compatible_families += 1;
            match preimages.get(family.as_slice()) {
                Some(&n) => {
                    out.glued += 1;
                    out.unique &= n == 1;
                }
                None => {
                    if out.missing.is_none() {
                        out.missing = Some(family.clone());
                    }
                }
            }
            return Ok(());
        }
        for s in p.section_rings[parts[i]].elements() {
            *visited += 1;
            guards.sections("compatible family search", *visited)?;
            let compatible = (0..i).all(|j| {
                let w = overlap[i][j];
                p.restrict(parts[i], w, s) == p.restrict(parts[j], w, family[j])
            });
            if compatible {
                family.push(s);
                extend(p, parts, overlap, preimages, family, out, visited, guards)?;
                family.pop();
            }
        }
        Ok(())
    }
    extend(p, parts, &overlap, &preimages, &mut family, &mut out, &mut visited, guards)?;
    Ok(out)
}

fn describe_cover(p: &PresheafOfRings, parts: &[usize]) -> String {
    let parts: Vec<String> = parts.iter().map(|&i| p.open(i).to_string()).collect();
    format!("[{}]", parts.join(" "))
}

/// Checks locality and glueing for every open and every enumerated cover.
pub fn check_sheaf_axioms(p: &PresheafOfRings, guards: &Guards) -> Report {
    let mut report = Report::new();
    let mut locality: Option<String> = None;
    let mut glueing: Option<String> = None;
    let mut uniqueness: Option<String> = None;
    let mut truncated = Vec::new();
    let mut checked = 0usize;
    for u in 0..p.open_count() {
        let (covers, cut) = enumerate_covers(&p.topology, u, guards.max_covers);
        if cut {
            truncated.push(p.open(u).to_string());
        }
        for parts in covers {
            let outcome = match glue_cover(p, u, &parts, guards) {
                Ok(o) => o,
                Err(e) => {
                    report.skip("glueing", "sheaf_of_rings.glueing", format!("U={} cover={}: {e}", p.open(u), describe_cover(p, &parts)));
                    return report;
                }
            };
            checked += 1;
            if let (None, Some(s)) = (&locality, outcome.locality_failure) {
                locality = Some(format!("U={} cover={} s={s}", p.open(u), describe_cover(p, &parts)));
            }
            if let (None, Some(fam)) = (&glueing, &outcome.missing) {
                glueing = Some(format!("U={} cover={} family={fam:?}", p.open(u), describe_cover(p, &parts)));
            }
            if uniqueness.is_none() && !outcome.unique {
                uniqueness = Some(format!("U={} cover={}", p.open(u), describe_cover(p, &parts)));
            }
        }
    }
    let summary = Some(format!("{checked} covers"));
    match locality {
        None => report.pass("locality", "sheaf_of_rings.locality", summary.clone()),
        Some(w) => report.fail("locality", "sheaf_of_rings.locality", w),
    }
    match glueing {
        None => report.pass("glueing", "sheaf_of_rings.glueing", summary.clone()),
        Some(w) => report.fail("glueing", "sheaf_of_rings.glueing", w),
    }
    match uniqueness {
        None => report.pass("glueing_unique", "sheaf_of_rings.glueing", summary),
        Some(w) => report.fail("glueing_unique", "sheaf_of_rings.glueing", w),
    }
    if !truncated.is_empty() {
        report.skip(
            "covers_truncated",
            "sheaf_of_rings.glueing",
            format!("cover enumeration capped at {} for U in {}", guards.max_covers, truncated.join(" ")),
        );
    }
    report
}

/// A family of ring maps `φ_U : F(U) → G(U)`, one per open.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresheafMorphism {
    pub per_open: Vec<RingHom>,
}

/// Morphisms of sheaves are morphisms of the underlying presheaves.
pub type SheafMorphism = PresheafMorphism;

pub fn identity_morphism(p: &PresheafOfRings) -> PresheafMorphism {
    PresheafMorphism {
        per_open: p.section_rings.iter().map(RingHom::identity).collect(),
    }
}

/// Hom property per open, and commuting squares per nested pair.
pub fn check_presheaf_morphism(src: &PresheafOfRings, dst: &PresheafOfRings, m: &PresheafMorphism) -> Report {
    let mut report = Report::new();
    if src.topology != dst.topology || m.per_open.len() != src.open_count() {
        report.fail(
            "same_topology",
            "morphism_presheaves_of_rings",
            "source, target and family are not indexed by the same opens",
        );
        return report;
    }
    let bad_hom = (0..src.open_count()).find_map(|u| {
        check_ring_hom(m.per_open[u].table(), &src.section_rings[u], &dst.section_rings[u])
            .err()
            .map(|e| (u, e))
    });
    match bad_hom {
        None => report.pass("fam_morphisms_are_homs", "morphism_presheaves_of_rings.fam_morphisms_are_homomorphisms", None),
        Some((u, e)) => {
            report.fail(
                "fam_morphisms_are_homs",
                "morphism_presheaves_of_rings.fam_morphisms_are_homomorphisms",
                format!("U={}: {e:?}", src.open(u)),
            );
            return report;
        }
    }
    let bad_square = nested_pairs(&src.topology).into_iter().find_map(|(u, v)| {
        src.section_rings[u]
            .elements()
            .find(|&x| dst.restrict(u, v, m.per_open[u].apply(x)) != m.per_open[v].apply(src.restrict(u, v, x)))
            .map(|x| (u, v, x))
    });
    match bad_square {
        None => report.pass("comm_diagrams", "morphism_presheaves_of_rings.comm_diagrams", None),
        Some((u, v, x)) => report.fail(
            "comm_diagrams",
            "morphism_presheaves_of_rings.comm_diagrams",
            format!("U={} V={} x={x}", src.open(u), src.open(v)),
        ),
    }
    report
}

/// `(g ∘ f)_U = g_U ∘ f_U`.
pub fn compose_morphisms(g: &PresheafMorphism, f: &PresheafMorphism) -> Result<PresheafMorphism> {
    if g.per_open.len() != f.per_open.len() {
        return Err(Error::Mismatch(format!(
            "{} opens vs {} opens",
            g.per_open.len(),
            f.per_open.len()
        )));
    }
    let per_open = g
        .per_open
        .iter()
        .zip(&f.per_open)
        .enumerate()
        .map(|(u, (gu, fu))| gu.after(fu).ok_or_else(|| Error::Mismatch(format!("ring sizes differ at open #{u}"))))
        .collect::<Result<_>>()?;
    Ok(PresheafMorphism { per_open })
}

/// Returns the inverse morphism when every component is bijective and the
/// inverse family is again a morphism `dst → src`.
pub fn check_iso_presheaves(src: &PresheafOfRings, dst: &PresheafOfRings, m: &PresheafMorphism) -> Option<PresheafMorphism> {
    if !check_presheaf_morphism(src, dst, m).passed() {
        return None;
    }
    let inverse = PresheafMorphism {
        per_open: m.per_open.iter().map(RingHom::inverse).collect::<Option<_>>()?,
    };
    check_presheaf_morphism(dst, src, &inverse).passed().then_some(inverse)
}

/// Restriction of `p` to the open subspace `u`: `V ↦ F(u ∩ V)`.
pub fn induced_sheaf(p: &PresheafOfRings, u: &BitSet) -> Result<PresheafOfRings> {
    if !p.topology.is_open(u) {
        return Err(Error::NotOpen(u.clone()));
    }
    let t = induced_topology(&p.topology, u)?;
    let index: Vec<usize> = t.opens().iter().map(|w| p.topology.open_index(w).expect("open in an open subspace")).collect();
    let rings = index.iter().map(|&i| p.section_rings[i].clone()).collect();
    let mut restrictions = BTreeMap::new();
    for (a, &ia) in index.iter().enumerate() {
        for (b, &ib) in index.iter().enumerate() {
            if t.opens()[b].is_subset(&t.opens()[a]) {
                restrictions.insert((t.opens()[a].clone(), t.opens()[b].clone()), p.restrictions[&(ia, ib)].clone());
            }
        }
    }
    PresheafOfRings::new(t, rings, restrictions, p.base_elem)
}

/// Direct image `f_* F : V ↦ F(f⁻¹ V)` on the target space of `f`.
pub fn direct_image(p: &PresheafOfRings, f: &ContinuousMap) -> Result<PresheafOfRings> {
    if f.source != p.topology {
        return Err(Error::Mismatch("map source is not the presheaf's space".into()));
    }
    check_continuous(f).map_err(Error::NotContinuous)?;
    let dest = &f.dest;
    let index: Vec<usize> = dest
        .opens()
        .iter()
        .map(|v| p.topology.open_index(&f.preimage(v)).expect("continuity"))
        .collect();
    let rings = index.iter().map(|&i| p.section_rings[i].clone()).collect();
    let mut restrictions = BTreeMap::new();
    for (a, &ia) in index.iter().enumerate() {
        for (b, &ib) in index.iter().enumerate() {
            if dest.opens()[b].is_subset(&dest.opens()[a]) {
                restrictions.insert((dest.opens()[a].clone(), dest.opens()[b].clone()), p.restrictions[&(ia, ib)].clone());
            }
        }
    }
    PresheafOfRings::new(dest.clone(), rings, restrictions, p.base_elem)
}

/// `f_* φ`: the morphism `f_* F → f_* G` induced by `φ : F → G`.
pub fn direct_image_morphism(
    p: &PresheafOfRings,
    f: &ContinuousMap,
    phi: &PresheafMorphism,
) -> Result<PresheafMorphism> {
    if phi.per_open.len() != p.open_count() {
        return Err(Error::Mismatch("morphism is not indexed by the presheaf's opens".into()));
    }
    let per_open = f
        .dest
        .opens()
        .iter()
        .map(|v| p.index_of(&f.preimage(v)).map(|i| phi.per_open[i].clone()))
        .collect::<Result<_>>()?;
    Ok(PresheafMorphism { per_open })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::zmod;

    fn set(xs: &[usize]) -> BitSet {
        xs.iter().copied().collect()
    }

    fn reduction(src: &PresheafOfRings, dst: &PresheafOfRings, modulus: usize) -> PresheafMorphism {
        PresheafMorphism {
            per_open: (0..src.open_count())
                .map(|u| {
                    let (a, b) = (src.section_ring(u), dst.section_ring(u));
                    RingHom::unchecked(a.elements().map(|x| x % modulus % b.size()).collect(), b.size())
                })
                .collect(),
        }
    }

    #[test]
    fn constant_presheaf_axioms() {
        let t = Topology::discrete(set(&[0, 1]));
        let p = constant_presheaf(&t, &zmod(2).unwrap());
        assert!(check_presheaf_axioms(&p).passed());
        let s = check_sheaf_axioms(&p, &Guards::default());
        let g = s.find("glueing").unwrap();
        assert_eq!(g.status, crate::report::Status::Fail);
        // the family (0 on {0}, 1 on {1}) has no global section
        let whole = t.open_index(&set(&[0, 1])).unwrap();
        let parts = vec![t.open_index(&set(&[0])).unwrap(), t.open_index(&set(&[1])).unwrap()];
        let out = glue_cover(&p, whole, &parts, &Guards::default()).unwrap();
        assert_eq!(out.compatible_families, 4);
        assert_eq!(out.glued, 2);
        assert_eq!(out.missing, Some(vec![0, 1]));
    }

    #[test]
    fn zero_ring_presheaf_is_a_sheaf() {
        let t = Topology::discrete(set(&[0, 1, 2]));
        let p = constant_presheaf(&t, &FiniteRing::zero_ring());
        assert!(check_presheaf_axioms(&p).passed());
        assert!(check_sheaf_axioms(&p, &Guards::default()).passed());
    }

    #[test]
    fn patched_identity_fails() {
        let t = Topology::indiscrete(set(&[0]));
        let p = constant_presheaf(&t, &zmod(5).unwrap());
        let mut tables = p.restriction_tables();
        let whole = set(&[0]);
        tables.insert((whole.clone(), whole.clone()), RingHom::unchecked(vec![0, 2, 4, 1, 3], 5));
        let q = PresheafOfRings::new(t, p.section_rings().to_vec(), tables, 0).unwrap();
        let r = check_presheaf_axioms(&q);
        let c = r.find("identity_map").unwrap();
        assert_eq!(c.status, crate::report::Status::Fail);
        assert_eq!(c.witness.as_deref(), Some("U={0} x=1"));
    }

    #[test]
    fn non_nested_lookup_is_an_error() {
        let t = Topology::discrete(set(&[0, 1]));
        let p = constant_presheaf(&t, &zmod(2).unwrap());
        let (a, b) = (t.open_index(&set(&[0])).unwrap(), t.open_index(&set(&[1])).unwrap());
        assert!(matches!(p.restriction(a, b), Err(Error::NotNested { .. })));
    }

    #[test]
    fn cover_enumeration() {
        let t = Topology::discrete(set(&[0, 1]));
        let whole = t.open_index(&set(&[0, 1])).unwrap();
        let (covers, cut) = enumerate_covers(&t, whole, 100);
        assert!(!cut);
        // {X}, {{0},{1}}, {{0},X}, {{1},X}, {{0},{1},X}
        assert_eq!(covers.len(), 5);
        let (covers, cut) = enumerate_covers(&t, whole, 1);
        assert!(cut);
        assert_eq!(covers.len(), 4);
        let empty = t.open_index(&BitSet::new()).unwrap();
        assert_eq!(enumerate_covers(&t, empty, 0).0, vec![Vec::<usize>::new()]);
    }

    #[test]
    fn morphism_examples() {
        let t = Topology::discrete(set(&[0, 1]));
        let p4 = constant_presheaf(&t, &zmod(4).unwrap());
        let p2 = constant_presheaf(&t, &zmod(2).unwrap());
        assert!(check_presheaf_morphism(&p4, &p4, &identity_morphism(&p4)).passed());
        let red = reduction(&p4, &p2, 2);
        assert!(check_presheaf_morphism(&p4, &p2, &red).passed());

        let mut bad = red.clone();
        let u = t.open_index(&set(&[0])).unwrap();
        // 1 + 1 = 2 ↦ 1, but 1 + 1 = 0 in zmod(2)
        bad.per_open[u] = RingHom::unchecked(vec![0, 1, 1, 0], 2);
        let r = check_presheaf_morphism(&p4, &p2, &bad);
        assert!(!r.passed());
    }

    #[test]
    fn perturbed_square_fails() {
        // two-point Sierpinski space; φ on the small open is an automorphism
        // that does not commute with restriction.
        let sier = Topology::new(set(&[0, 1]), vec![BitSet::new(), set(&[0]), set(&[0, 1])]).unwrap();
        let p = constant_presheaf(&sier, &crate::ring::product_ring(&zmod(2).unwrap(), &zmod(2).unwrap(), &Guards::default()).unwrap());
        let mut m = identity_morphism(&p);
        let small = sier.open_index(&set(&[0])).unwrap();
        // swap the two factors of F2 x F2: (a, b) at index 2a + b
        m.per_open[small] = RingHom::unchecked(vec![0, 2, 1, 3], 4);
        let r = check_presheaf_morphism(&p, &p, &m);
        let c = r.find("comm_diagrams").unwrap();
        assert_eq!(c.status, crate::report::Status::Fail);
        assert!(c.witness.as_ref().unwrap().starts_with("U={0,1} V={0}"));
    }

    #[test]
    fn composition() {
        let t = Topology::discrete(set(&[0, 1]));
        let p8 = constant_presheaf(&t, &zmod(8).unwrap());
        let p4 = constant_presheaf(&t, &zmod(4).unwrap());
        let p2 = constant_presheaf(&t, &zmod(2).unwrap());
        let f = reduction(&p8, &p4, 4);
        let g = reduction(&p4, &p2, 2);
        let gf = compose_morphisms(&g, &f).unwrap();
        assert_eq!(gf, reduction(&p8, &p2, 2));
        assert!(check_presheaf_morphism(&p8, &p2, &gf).passed());
        assert_eq!(compose_morphisms(&identity_morphism(&p4), &f).unwrap(), f);
        assert_eq!(compose_morphisms(&f, &identity_morphism(&p8)).unwrap(), f);
        assert!(compose_morphisms(&f, &g).is_err());
        // associativity on a compatible triple
        let h = identity_morphism(&p2);
        assert_eq!(
            compose_morphisms(&h, &gf).unwrap(),
            compose_morphisms(&compose_morphisms(&h, &g).unwrap(), &f).unwrap()
        );
    }

    #[test]
    fn isomorphisms() {
        let t = Topology::discrete(set(&[0, 1]));
        let p = constant_presheaf(&t, &zmod(5).unwrap());
        let id = identity_morphism(&p);
        assert_eq!(check_iso_presheaves(&p, &p, &id), Some(id));
        let p2 = constant_presheaf(&t, &zmod(2).unwrap());
        let p4 = constant_presheaf(&t, &zmod(4).unwrap());
        assert_eq!(check_iso_presheaves(&p4, &p2, &reduction(&p4, &p2, 2)), None);
        let perms: Vec<Vec<usize>> = p
            .section_rings()
            .iter()
            .map(|r| (0..r.size()).map(|x| (x * 2) % r.size()).collect())
            .collect();
        let (copy, iso) = p.relabeled(&perms);
        assert!(check_presheaf_axioms(&copy).passed());
        let inv = check_iso_presheaves(&p, &copy, &iso).unwrap();
        assert_eq!(compose_morphisms(&inv, &iso).unwrap(), identity_morphism(&p));
    }

    #[test]
    fn induced_and_direct_image() {
        let t = Topology::discrete(set(&[0, 1]));
        let p = constant_presheaf(&t, &FiniteRing::zero_ring());
        let whole = induced_sheaf(&p, &set(&[0, 1])).unwrap();
        assert!(check_iso_presheaves(&p, &whole, &identity_morphism(&p)).is_some());
        let none = induced_sheaf(&p, &BitSet::new()).unwrap();
        assert_eq!(none.open_count(), 1);
        let sier = Topology::new(set(&[0, 1]), vec![BitSet::new(), set(&[0]), set(&[0, 1])]).unwrap();
        let q = constant_presheaf(&sier, &zmod(3).unwrap());
        assert!(matches!(induced_sheaf(&q, &set(&[1])), Err(Error::NotOpen(_))));

        let id = ContinuousMap::identity(&t);
        assert_eq!(direct_image(&p, &id).unwrap(), p);
        let point = Topology::discrete(set(&[0]));
        let collapse = ContinuousMap { source: t.clone(), dest: point.clone(), map: [(0, 0), (1, 0)].into() };
        let q = constant_presheaf(&t, &zmod(3).unwrap());
        let img = direct_image(&q, &collapse).unwrap();
        let global = q.section_ring(q.index_of(&set(&[0, 1])).unwrap());
        assert_eq!(img.section_ring(img.index_of(&set(&[0])).unwrap()), global);
        assert!(check_presheaf_axioms(&img).passed());
    }
}
