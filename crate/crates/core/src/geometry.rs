//! Ringed spaces, locally ringed spaces and their morphisms, the
//! identification of structure-sheaf stalks with local rings, affine
//! schemes and schemes.
//!
//! A morphism `(f, φ) : X → Y` carries `φ : O_Y → f_* O_X`, indexed by the
//! opens of `Y`.

use std::collections::BTreeMap;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::guard::Guards;
use crate::limits::stalk_at;
use crate::report::{Report, Status};
use crate::ring::{check_ring_hom, is_local_hom, is_local_ring, maximal_ideals, ring_iso_search, FiniteRing, RingHom};
use crate::sheaf::{
    check_iso_presheaves, check_presheaf_axioms, check_presheaf_morphism, check_sheaf_axioms, direct_image,
    identity_morphism, induced_sheaf, PresheafMorphism, PresheafOfRings,
};
use crate::spectrum::{structure_sheaf, StructureSheaf};
use crate::topology::{check_continuous, check_homeomorphism, ContinuousMap, Topology};

const LOCAL_STALKS: &str = "locally_ringed_space.stalks_are_local";
const STALK_ISO: &str = "stalk_at_prime_is_iso_to_local_ring_at_prime";
const LOCAL_MORPHISMS: &str = "morphism_locally_ringed_spaces.are_local_morphisms";
const INDUCED: &str = "ind_mor_btw_stalks.induced_morphism";
const HOMEOMORPHISM: &str = "iso_locally_ringed_spaces.is_homeomorphism";
const ISO_SHEAVES: &str = "iso_locally_ringed_spaces.is_iso_of_sheaves";
const AFFINE: &str = "affine_scheme";
const SCHEME: &str = "scheme.are_affine_schemes";

fn record_error(report: &mut Report, name: &str, anchor: &str, e: &Error) {
    if matches!(e, Error::SizeGuard { .. }) {
        report.skip(name, anchor, e.to_string());
    } else {
        report.fail(name, anchor, e.to_string());
    }
}

/// A space with a sheaf of rings; both sheaf suites pass on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingedSpace {
    sheaf: PresheafOfRings,
}

impl RingedSpace {
    pub fn new(sheaf: PresheafOfRings, guards: &Guards) -> Result<Self> {
        let mut report = check_presheaf_axioms(&sheaf);
        report.extend(check_sheaf_axioms(&sheaf, guards));
        if let Some(c) = report.failures().next() {
            return Err(Error::BadPresheaf(format!(
                "{}: {}",
                c.name,
                c.witness.as_deref().unwrap_or("")
            )));
        }
        Ok(Self { sheaf })
    }

    /// `(Spec R, O_Spec)` from an assembled structure sheaf.
    pub fn spec(o: &StructureSheaf, guards: &Guards) -> Result<Self> {
        Self::new(o.presheaf.clone(), guards)
    }

    pub fn sheaf(&self) -> &PresheafOfRings {
        &self.sheaf
    }

    pub fn topology(&self) -> &Topology {
        self.sheaf.topology()
    }
}

/// Checks that the stalk at every point is a local ring.
pub fn check_locally_ringed_space(rs: &RingedSpace, guards: &Guards) -> Report {
    let mut report = Report::new();
    let carrier = rs.topology().carrier();
    if carrier.is_empty() {
        report.pass("stalks_are_local", LOCAL_STALKS, Some("no points".into()));
        return report;
    }
    for x in carrier.iter() {
        let verdict = stalk_at(&rs.sheaf, x, guards).and_then(|s| {
            let m = is_local_ring(s.ring(), guards)?;
            Ok(match m {
                Some(m) => Ok(format!("x={x} m={}", m.members())),
                None => Err(format!(
                    "x={x}: stalk has {} maximal ideals",
                    maximal_ideals(s.ring(), guards)?.len()
                )),
            })
        });
        match verdict {
            Ok(Ok(w)) => report.pass("stalks_are_local", LOCAL_STALKS, Some(w)),
            Ok(Err(w)) => report.fail("stalks_are_local", LOCAL_STALKS, w),
            Err(e) => record_error(&mut report, "stalks_are_local", LOCAL_STALKS, &e),
        }
    }
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsoPath {
    /// The evaluation map `⌊U, s⌋ ↦ s(𝔭)` verified as an isomorphism.
    Evaluation,
    /// Evaluation failed verification; an isomorphism was found by search.
    Search,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StalkIso {
    /// From the stalk at the point to `R_𝔭`.
    pub hom: RingHom,
    pub path: IsoPath,
}

/// The evaluation map `⌊U, s⌋ ↦ s(𝔭)` as a table, checked for independence
/// of representatives and for sending `⌊v, 0⌋`, `⌊v, 1⌋` to `0`, `1`.
fn evaluation_table(o: &StructureSheaf, p: usize, v: usize, guards: &Guards) -> Result<(Vec<usize>, FiniteRing)> {
    let stalk = stalk_at(&o.presheaf, p, guards)?;
    let value = |u: usize, s: usize| {
        o.sections[u].sections[s]
            .value_at(p)
            .ok_or_else(|| Error::Internal(format!("section over {} has no value at {p}", o.sections[u].open)))
    };
    let table = (0..stalk.class_count())
        .map(|c| {
            let (u, s) = stalk.representative(c);
            value(u, s)
        })
        .collect::<Result<Vec<_>>>()?;
    for &u in stalk.family().members() {
        for s in o.presheaf.section_ring(u).elements() {
            if table[stalk.canonical_fun(u, s)?] != value(u, s)? {
                return Err(Error::WellDefinednessFailure(format!(
                    "evaluation at {p} depends on the representative ({}, {s})",
                    o.sections[u].open
                )));
            }
        }
    }
    let local = o.space.stalk(p).ring();
    let fv = o.presheaf.section_ring(v);
    if table[stalk.canonical_fun(v, fv.zero())?] != local.zero() || table[stalk.canonical_fun(v, fv.one())?] != local.one() {
        return Err(Error::WellDefinednessFailure(format!("evaluation at {p} does not fix zero and one")));
    }
    Ok((table, stalk.ring().clone()))
}

/// The isomorphism from the stalk of `O_Spec` at point `p` onto `R_𝔭`,
/// anchored at the open `v ∋ p`.
pub fn stalk_to_localization(o: &StructureSheaf, p: usize, v: &BitSet, guards: &Guards) -> Result<StalkIso> {
    let vi = o.presheaf.index_of(v)?;
    if !v.contains(p) {
        return Err(Error::NotSubset(BitSet::singleton(p)));
    }
    let local = o.space.stalk(p).ring();
    let (table, stalk_ring) = evaluation_table(o, p, vi, guards)?;
    if let Ok(hom) = RingHom::new(table, &stalk_ring, local) {
        if hom.is_bijective() {
            return Ok(StalkIso { hom, path: IsoPath::Evaluation });
        }
    }
    ring_iso_search(&stalk_ring, local)
        .map(|hom| StalkIso { hom, path: IsoPath::Search })
        .ok_or_else(|| Error::Mismatch(format!("stalk at {p} is not isomorphic to the local ring")))
}

/// Whether `a` is local, given an isomorphism `h : a → b` onto a local ring.
pub fn iso_transport_local(a: &FiniteRing, b: &FiniteRing, h: &RingHom, guards: &Guards) -> Result<bool> {
    check_ring_hom(h.table(), a, b).map_err(Error::NotHom)?;
    if !h.is_bijective() {
        return Err(Error::Mismatch("map is not bijective".into()));
    }
    Ok(is_local_ring(a, guards)?.is_some())
}

/// Builds `(Spec r, O_Spec)`, checks that its stalks are local, and checks
/// each stalk against `R_𝔭`.
pub fn spec_locally_ringed(r: &FiniteRing, guards: &Guards) -> Report {
    let mut report = Report::new();
    let o = match structure_sheaf(r, guards) {
        Ok(o) => o,
        Err(e) => {
            record_error(&mut report, "structure_sheaf", "sheaf_spec_is_sheaf", &e);
            return report;
        }
    };
    let rs = match RingedSpace::spec(&o, guards) {
        Ok(rs) => rs,
        Err(e) => {
            record_error(&mut report, "structure_sheaf", "sheaf_spec_is_sheaf", &e);
            return report;
        }
    };
    report.extend(check_locally_ringed_space(&rs, guards));
    let carrier = rs.topology().carrier().clone();
    for p in carrier.iter() {
        match stalk_to_localization(&o, p, &carrier, guards) {
            Ok(iso) => report.pass(
                "stalk_iso_local_ring",
                STALK_ISO,
                Some(format!("x={p} {} elements via {:?}", iso.hom.source_size(), iso.path)),
            ),
            Err(e) => record_error(&mut report, "stalk_iso_local_ring", STALK_ISO, &e),
        }
    }
    report
}

/// `(f, φ) : source → dest` with `φ : O_dest → f_* O_source`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingedSpaceMorphism {
    pub source: RingedSpace,
    pub dest: RingedSpace,
    pub f: ContinuousMap,
    pub phi: PresheafMorphism,
    direct: PresheafOfRings,
}

impl RingedSpaceMorphism {
    /// Validates continuity of `f` and that `φ` is a presheaf morphism.
    pub fn new(source: RingedSpace, dest: RingedSpace, f: ContinuousMap, phi: PresheafMorphism) -> Result<Self> {
        let m = Self::unchecked(source, dest, f, phi)?;
        let report = check_presheaf_morphism(&m.dest.sheaf, &m.direct, &m.phi);
        if let Some(c) = report.failures().next() {
            return Err(Error::BadPresheaf(format!(
                "{}: {}",
                c.name,
                c.witness.as_deref().unwrap_or("")
            )));
        }
        Ok(m)
    }

    /// Checks only that `f` is a continuous map between the two spaces;
    /// `φ` is taken as given.
    pub fn unchecked(source: RingedSpace, dest: RingedSpace, f: ContinuousMap, phi: PresheafMorphism) -> Result<Self> {
        if &f.source != source.topology() || &f.dest != dest.topology() {
            return Err(Error::Mismatch("map does not run between the two spaces".into()));
        }
        check_continuous(&f).map_err(Error::NotContinuous)?;
        if phi.per_open.len() != dest.sheaf.open_count() {
            return Err(Error::Mismatch("φ is not indexed by the target's opens".into()));
        }
        let direct = direct_image(&source.sheaf, &f)?;
        Ok(Self { source, dest, f, phi, direct })
    }

    pub fn identity(rs: &RingedSpace) -> Self {
        Self {
            source: rs.clone(),
            dest: rs.clone(),
            f: ContinuousMap::identity(rs.topology()),
            phi: identity_morphism(&rs.sheaf),
            direct: rs.sheaf.clone(),
        }
    }

    /// `f_* O_source`.
    pub fn direct_image(&self) -> &PresheafOfRings {
        &self.direct
    }

    /// `self ∘ first`: `(g ∘ f, φ_f(g⁻¹ W) ∘ φ_g(W))`.
    pub fn after(&self, first: &RingedSpaceMorphism) -> Result<RingedSpaceMorphism> {
        if first.dest != self.source {
            return Err(Error::Mismatch("morphisms are not composable".into()));
        }
        let per_open = self
            .dest
            .topology()
            .opens()
            .iter()
            .enumerate()
            .map(|(w, ow)| {
                let v = self.source.sheaf.index_of(&self.f.preimage(ow))?;
                first.phi.per_open[v]
                    .after(&self.phi.per_open[w])
                    .ok_or_else(|| Error::Mismatch(format!("ring sizes differ over {ow}")))
            })
            .collect::<Result<_>>()?;
        RingedSpaceMorphism::new(
            first.source.clone(),
            self.dest.clone(),
            self.f.after(&first.f),
            PresheafMorphism { per_open },
        )
    }
}

/// The open subspace `(U, O|_U)` with its inclusion into `rs`. When `U` is
/// the whole space this is the identification of the induced space with
/// the original one.
pub fn inclusion_morphism(rs: &RingedSpace, u: &BitSet, guards: &Guards) -> Result<RingedSpaceMorphism> {
    let sub = RingedSpace::new(induced_sheaf(&rs.sheaf, u)?, guards)?;
    let f = ContinuousMap::new(
        sub.topology().clone(),
        rs.topology().clone(),
        u.iter().map(|x| (x, x)).collect::<BTreeMap<_, _>>(),
    )?;
    let per_open = rs
        .topology()
        .opens()
        .iter()
        .enumerate()
        .map(|(v, ov)| {
            let w = rs.sheaf.index_of(&ov.intersection(u))?;
            rs.sheaf.restriction(v, w).cloned()
        })
        .collect::<Result<_>>()?;
    RingedSpaceMorphism::new(sub, rs.clone(), f, PresheafMorphism { per_open })
}

/// The table of `⌊V, t⌋ ↦ ⌊f⁻¹ V, φ_V(t)⌋`, checked for independence of
/// representatives, together with the two stalk rings.
fn induced_stalk_table(m: &RingedSpaceMorphism, x: usize, guards: &Guards) -> Result<(Vec<usize>, FiniteRing, FiniteRing)> {
    let y = m.f.apply(x);
    let sy = stalk_at(&m.dest.sheaf, y, guards)?;
    let sx = stalk_at(&m.source.sheaf, x, guards)?;
    let image = |v: usize, t: usize| -> Result<usize> {
        let w = m.source.sheaf.index_of(&m.f.preimage(m.dest.sheaf.open(v)))?;
        sx.canonical_fun(w, m.phi.per_open[v].apply(t))
    };
    let table = (0..sy.class_count())
        .map(|c| {
            let (v, t) = sy.representative(c);
            image(v, t)
        })
        .collect::<Result<Vec<_>>>()?;
    for &v in sy.family().members() {
        for t in m.dest.sheaf.section_ring(v).elements() {
            if table[sy.canonical_fun(v, t)?] != image(v, t)? {
                return Err(Error::WellDefinednessFailure(format!(
                    "x={x}: image of ({}, {t}) depends on the representative",
                    m.dest.sheaf.open(v)
                )));
            }
        }
    }
    Ok((table, sy.ring().clone(), sx.ring().clone()))
}

/// The ring map from the stalk of the target at `f(x)` to the stalk of the
/// source at `x`.
pub fn induced_stalk_morphism(m: &RingedSpaceMorphism, x: usize, guards: &Guards) -> Result<RingHom> {
    if !m.source.topology().carrier().contains(x) {
        return Err(Error::NotSubset(BitSet::singleton(x)));
    }
    let (table, from, to) = induced_stalk_table(m, x, guards)?;
    RingHom::new(table, &from, &to)
}

/// Per point: the induced stalk map is a ring hom and is local.
pub fn check_morphism_locally_ringed(m: &RingedSpaceMorphism, guards: &Guards) -> Report {
    let mut report = Report::new();
    let carrier = m.source.topology().carrier();
    if carrier.is_empty() {
        report.pass("are_local_morphisms", LOCAL_MORPHISMS, Some("no points".into()));
        return report;
    }
    for x in carrier.iter() {
        let (table, from, to) = match induced_stalk_table(m, x, guards) {
            Ok(t) => t,
            Err(e) => {
                record_error(&mut report, "induced_stalk_hom", INDUCED, &e);
                continue;
            }
        };
        match check_ring_hom(&table, &from, &to) {
            Ok(()) => report.pass("induced_stalk_hom", INDUCED, Some(format!("x={x}"))),
            Err(e) => report.fail("induced_stalk_hom", INDUCED, format!("x={x}: {e:?}")),
        }
        let h = RingHom::unchecked(table, to.size());
        match is_local_hom(&h, &from, &to, guards) {
            Ok(true) => report.pass("are_local_morphisms", LOCAL_MORPHISMS, Some(format!("x={x}"))),
            Ok(false) => {
                let units = |r: &FiniteRing, a: usize| r.is_unit(a);
                let bad = from.elements().find(|&a| !units(&from, a) && units(&to, h.apply(a)));
                let w = match bad {
                    Some(a) => format!("x={x}: non-unit {a} maps to unit {}", h.apply(a)),
                    None => format!("x={x}: preimage of the maximal ideal is not maximal"),
                };
                report.fail("are_local_morphisms", LOCAL_MORPHISMS, w);
            }
            Err(e) => record_error(&mut report, "are_local_morphisms", LOCAL_MORPHISMS, &e),
        }
    }
    report
}

/// Local morphism, homeomorphism, and invertible `φ`.
pub fn check_iso_locally_ringed(m: &RingedSpaceMorphism, guards: &Guards) -> Report {
    let mut report = check_morphism_locally_ringed(m, guards);
    report.record("is_homeomorphism", HOMEOMORPHISM, check_homeomorphism(&m.f));
    match check_iso_presheaves(&m.dest.sheaf, &m.direct, &m.phi) {
        Some(_) => report.pass("is_iso_of_sheaves", ISO_SHEAVES, None),
        None => {
            let w = m
                .phi
                .per_open
                .iter()
                .enumerate()
                .find(|(_, h)| !h.is_bijective())
                .map(|(v, _)| format!("φ over {} is not bijective", m.dest.sheaf.open(v)))
                .unwrap_or_else(|| "inverse family is not a morphism".into());
            report.fail("is_iso_of_sheaves", ISO_SHEAVES, w);
        }
    }
    report
}

/// `rs` is locally ringed and `m : rs → Spec r` is an isomorphism of
/// locally ringed spaces.
pub fn check_affine_scheme(rs: &RingedSpace, r: &FiniteRing, m: &RingedSpaceMorphism, guards: &Guards) -> Report {
    let mut report = check_locally_ringed_space(rs, guards);
    if &m.source == rs {
        report.pass("witness_source", AFFINE, None);
    } else {
        report.fail("witness_source", AFFINE, "witness morphism does not start at the given space");
    }
    match structure_sheaf(r, guards) {
        Ok(o) if o.presheaf == m.dest.sheaf => report.pass("witness_targets_spec", AFFINE, None),
        Ok(_) => report.fail("witness_targets_spec", AFFINE, "witness morphism does not end at Spec of the ring"),
        Err(e) => record_error(&mut report, "witness_targets_spec", AFFINE, &e),
    }
    report.extend(check_iso_locally_ringed(m, guards));
    report
}

/// `(Spec r, O_Spec)` with the identity as its affine witness.
pub fn spec_affine_witness(r: &FiniteRing, guards: &Guards) -> Result<(RingedSpace, RingedSpaceMorphism)> {
    let rs = RingedSpace::spec(&structure_sheaf(r, guards)?, guards)?;
    let m = RingedSpaceMorphism::identity(&rs);
    Ok((rs, m))
}

/// An affine open neighborhood of `point`: `(U, O|_U) ≅ Spec ring`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeEntry {
    pub point: usize,
    pub open: BitSet,
    pub ring: FiniteRing,
    /// From the induced space on `open` to `Spec ring`.
    pub morphism: RingedSpaceMorphism,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SchemeWitness {
    pub entries: Vec<SchemeEntry>,
}

/// One entry per point, each using the whole space and the affine witness
/// precomposed with the inclusion of the induced space.
pub fn affine_to_scheme(rs: &RingedSpace, r: &FiniteRing, m: &RingedSpaceMorphism, guards: &Guards) -> Result<SchemeWitness> {
    let report = check_affine_scheme(rs, r, m, guards);
    if let Some(c) = report.checks.iter().find(|c| c.status != Status::Pass) {
        return Err(Error::Mismatch(format!(
            "not an affine scheme: {} {}",
            c.name,
            c.witness.as_deref().unwrap_or("")
        )));
    }
    let carrier = rs.topology().carrier().clone();
    let iota = inclusion_morphism(rs, &carrier, guards)?;
    let morphism = m.after(&iota)?;
    Ok(SchemeWitness {
        entries: carrier
            .iter()
            .map(|x| SchemeEntry {
                point: x,
                open: carrier.clone(),
                ring: r.clone(),
                morphism: morphism.clone(),
            })
            .collect(),
    })
}

/// Every point has an entry whose open contains it, and every entry is an
/// affine scheme under the induced sheaf.
pub fn check_scheme(rs: &RingedSpace, w: &SchemeWitness, guards: &Guards) -> Result<Report> {
    let carrier = rs.topology().carrier();
    if let Some(x) = carrier
        .iter()
        .find(|&x| !w.entries.iter().any(|e| e.point == x && e.open.contains(x)))
    {
        return Err(Error::UncoveredPoint(x));
    }
    let mut report = check_locally_ringed_space(rs, guards);
    report.pass("covers_all_points", SCHEME, Some(format!("{} points, {} entries", carrier.len(), w.entries.len())));
    for e in &w.entries {
        let sub = match induced_sheaf(&rs.sheaf, &e.open).and_then(|s| RingedSpace::new(s, guards)) {
            Ok(s) => s,
            Err(err) => {
                record_error(&mut report, "affine_neighborhood", SCHEME, &err);
                continue;
            }
        };
        for mut c in check_affine_scheme(&sub, &e.ring, &e.morphism, guards).checks {
            let tag = format!("x={} U={}", e.point, e.open);
            c.witness = Some(match c.witness {
                Some(w) => format!("{tag}: {w}"),
                None => tag,
            });
            report.checks.push(c);
        }
    }
    Ok(report)
}
