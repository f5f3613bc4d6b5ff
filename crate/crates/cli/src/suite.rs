//! Verification suites and the JSON report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use finsch_core::geometry::{affine_to_scheme, check_affine_scheme, check_scheme, spec_affine_witness, spec_locally_ringed};
use finsch_core::localization::local_ring_at;
use finsch_core::ring::{
    enumerate_ideals, enumerate_prime_ideals, is_local_ring, is_prime_ideal, max_ideal_is_prime, maximal_ideals,
    ring_iso_search,
};
use finsch_core::sheaf::{check_presheaf_axioms, check_sheaf_axioms};
use finsch_core::spectrum::{structure_sheaf, zariski_topology};
use finsch_core::topology::{check_topological_space, UnionMode};
use finsch_core::{Error, FiniteRing, Guards, Report, Status};
use serde::Serialize;

use crate::ring_spec::RingSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Suite {
    Ring,
    Topology,
    Sheaf,
    Lrs,
    Scheme,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Ring => "ring",
            Suite::Topology => "topology",
            Suite::Sheaf => "sheaf",
            Suite::Lrs => "lrs",
            Suite::Scheme => "scheme",
            Suite::All => "all",
        }
    }

    const ORDER: [Suite; 5] = [Suite::Ring, Suite::Topology, Suite::Sheaf, Suite::Lrs, Suite::Scheme];

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Report,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub input: RingSpec,
    pub suites: Vec<SuiteReport>,
    pub timings_ms: BTreeMap<String, u64>,
    pub guards: Guards,
}

impl VerificationReport {
    /// No check failed; skipped checks are allowed.
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.checks.passed())
    }

    pub fn suite(&self, name: &str) -> Option<&Report> {
        self.suites.iter().find(|s| s.suite == name).map(|s| &s.checks)
    }

    /// Drops timings so that the JSON is identical across runs.
    pub fn without_timings(mut self) -> Self {
        self.timings_ms.clear();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let count = |st: Status| s.checks.checks.iter().filter(|c| c.status == st).count();
            let _ = writeln!(
                out,
                "{:<9} {} pass, {} fail, {} skipped",
                s.suite,
                count(Status::Pass),
                count(Status::Fail),
                count(Status::Skipped)
            );
            for c in s.checks.checks.iter().filter(|c| c.status == Status::Fail) {
                let _ = writeln!(out, "  FAIL {}: {}", c.name, c.witness.as_deref().unwrap_or(""));
            }
        }
        let _ = writeln!(out, "overall: {}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}

fn record_error(report: &mut Report, name: &str, anchor: &str, e: &Error) {
    if matches!(e, Error::SizeGuard { .. }) {
        report.skip(name, anchor, format!("guard: {e}"));
    } else {
        report.fail(name, anchor, e.to_string());
    }
}

fn set_list(sets: impl IntoIterator<Item = String>) -> String {
    sets.into_iter().collect::<Vec<_>>().join(" ")
}

/// Builds the ring and checks what every later suite relies on. Returns the
/// ring only when it is a valid commutative ring.
fn ring_suite(spec: &RingSpec, guards: &Guards) -> (Report, Option<FiniteRing>) {
    let mut report = Report::new();
    let r = match spec.build(guards) {
        Ok(r) => r,
        Err(e) => {
            record_error(&mut report, "validate_ring", "ring", &e);
            return (report, None);
        }
    };
    report.pass("validate_ring", "ring", Some(format!("{} elements", r.size())));
    if !r.is_commutative() {
        let pair = r
            .elements()
            .flat_map(|a| r.elements().map(move |b| (a, b)))
            .find(|&(a, b)| r.mul(a, b) != r.mul(b, a))
            .expect("non-commutative ring has a witness");
        report.fail("commutative", "cring", format!("{}·{} ≠ {}·{}", pair.0, pair.1, pair.1, pair.0));
        return (report, None);
    }
    report.pass("commutative", "cring", None);

    match enumerate_ideals(&r, guards) {
        Ok(ideals) => report.pass("enumerate_ideals", "ideal", Some(format!("{} ideals", ideals.len()))),
        Err(e) => record_error(&mut report, "enumerate_ideals", "ideal", &e),
    }
    let primes = match enumerate_prime_ideals(&r, guards) {
        Ok(p) => p,
        Err(e) => {
            record_error(&mut report, "prime_ideals", "pr_ideal", &e);
            return (report, Some(r));
        }
    };
    match primes.iter().find(|p| is_prime_ideal(&r, p.ideal()).is_err()) {
        None => report.pass(
            "prime_ideals",
            "pr_ideal",
            Some(format!("{} primes: {}", primes.len(), set_list(primes.iter().map(|p| p.members().to_string())))),
        ),
        Some(p) => report.fail("prime_ideals", "pr_ideal", format!("{} is not prime", p.members())),
    }
    match maximal_ideals(&r, guards) {
        Ok(ms) => match ms.iter().find(|m| !max_ideal_is_prime(&r, m)) {
            None => report.pass("max_ideal_is_prime", "max_ideal_is_prime", Some(format!("{} maximal ideals", ms.len()))),
            Some(m) => report.fail("max_ideal_is_prime", "max_ideal_is_prime", m.members().to_string()),
        },
        Err(e) => record_error(&mut report, "max_ideal_is_prime", "max_ideal_is_prime", &e),
    }
    for p in &primes {
        let verdict = local_ring_at(&r, p, guards).and_then(|l| {
            if let Err((x, y)) = l.check_well_defined() {
                return Ok(Err(format!("p={}: operations depend on representatives {x:?} {y:?}", p.members())));
            }
            Ok(match is_local_ring(l.ring(), guards)? {
                Some(m) => Ok(format!("p={}: {} classes, m={}", p.members(), l.class_count(), m.members())),
                None => Err(format!("p={}: localization is not local", p.members())),
            })
        });
        match verdict {
            Ok(Ok(w)) => report.pass("local_ring_at", "local_ring_at_is_local", Some(w)),
            Ok(Err(w)) => report.fail("local_ring_at", "local_ring_at_is_local", w),
            Err(e) => record_error(&mut report, "local_ring_at", "local_ring_at_is_local", &e),
        }
    }
    (report, Some(r))
}

fn topology_suite(r: &FiniteRing, guards: &Guards) -> Report {
    let mut report = Report::new();
    match zariski_topology(r, guards) {
        Ok(sp) => {
            let t = sp.topology();
            let check = check_topological_space(t.carrier(), t.opens());
            let mode = match check.mode {
                UnionMode::Exhaustive => "exhaustive".to_string(),
                UnionMode::Sampled(n) => format!("sampled {n}"),
            };
            match check.result {
                Ok(()) => report.pass(
                    "zariski_is_topological_space",
                    "zariski_is_topological_space",
                    Some(format!("{} points, {} opens, unions {mode}", sp.point_count(), t.opens().len())),
                ),
                Err(f) => report.fail("zariski_is_topological_space", "zariski_is_topological_space", format!("{f:?}")),
            }
        }
        Err(e) => record_error(&mut report, "zariski_is_topological_space", "zariski_is_topological_space", &e),
    }
    report
}

fn sheaf_suite(r: &FiniteRing, guards: &Guards) -> Report {
    let mut report = Report::new();
    let o = match structure_sheaf(r, guards) {
        Ok(o) => o,
        Err(e) => {
            record_error(&mut report, "structure_sheaf", "sheaf_spec_is_sheaf", &e);
            return report;
        }
    };
    report.extend(check_presheaf_axioms(&o.presheaf));
    report.extend(check_sheaf_axioms(&o.presheaf, guards));
    let spec = o
        .presheaf
        .index_of(o.space.topology().carrier())
        .expect("the whole space is open");
    let global = o.presheaf.section_ring(spec);
    match ring_iso_search(global, r) {
        Some(_) => report.pass("global_sections_iso", "sheaf_spec", Some(format!("{} global sections", global.size()))),
        None => report.fail(
            "global_sections_iso",
            "sheaf_spec",
            format!("{} global sections, ring has {} elements", global.size(), r.size()),
        ),
    }
    report
}

fn scheme_suite(r: &FiniteRing, guards: &Guards) -> Report {
    let mut report = Report::new();
    let (rs, m) = match spec_affine_witness(r, guards) {
        Ok(x) => x,
        Err(e) => {
            record_error(&mut report, "spec_is_affine_scheme", "spec_is_affine_scheme", &e);
            return report;
        }
    };
    let affine = check_affine_scheme(&rs, r, &m, guards);
    let affine_ok = affine.checks.iter().all(|c| c.status == Status::Pass);
    report.extend(affine);
    if !affine_ok {
        report.skip("affine_scheme_is_scheme", "affine_scheme_is_scheme", "identity witness did not verify");
        return report;
    }
    let scheme = affine_to_scheme(&rs, r, &m, guards).and_then(|w| Ok((w.entries.len(), check_scheme(&rs, &w, guards)?)));
    match scheme {
        Ok((entries, rep)) => {
            let ok = rep.checks.iter().all(|c| c.status == Status::Pass);
            report.extend(rep);
            if ok {
                report.pass("affine_scheme_is_scheme", "affine_scheme_is_scheme", Some(format!("{entries} witness entries")));
            } else {
                report.fail("affine_scheme_is_scheme", "affine_scheme_is_scheme", "scheme witness did not verify");
            }
            if rs.topology().carrier().is_empty() {
                report.pass("empty_scheme_is_scheme", "empty_scheme_is_scheme", Some("0 witness entries".into()));
            }
        }
        Err(e) => record_error(&mut report, "affine_scheme_is_scheme", "affine_scheme_is_scheme", &e),
    }
    report
}

/// Runs the selected suite (or all of them) in dependency order. A suite
/// with a failing check makes every later selected suite skip.
pub fn run_suite(spec: &RingSpec, suite: Suite, guards: &Guards) -> VerificationReport {
    let mut suites = Vec::new();
    let mut timings_ms = BTreeMap::new();

    let start = Instant::now();
    let (ring_report, ring) = ring_suite(spec, guards);
    let ring_ms = start.elapsed().as_millis() as u64;
    let mut blocked = (!ring_report.passed() || ring.is_none()).then(|| "ring".to_string());
    if suite.includes(Suite::Ring) || ring.is_none() {
        suites.push(SuiteReport { suite: "ring".into(), checks: ring_report });
        timings_ms.insert("ring".into(), ring_ms);
    }

    for s in Suite::ORDER.into_iter().skip(1).filter(|&s| suite.includes(s)) {
        let start = Instant::now();
        let checks = match (&blocked, &ring) {
            (None, Some(r)) => match s {
                Suite::Topology => topology_suite(r, guards),
                Suite::Sheaf => sheaf_suite(r, guards),
                Suite::Lrs => spec_locally_ringed(r, guards),
                Suite::Scheme => scheme_suite(r, guards),
                Suite::Ring | Suite::All => unreachable!(),
            },
            (reason, _) => {
                let mut rep = Report::new();
                rep.skip(
                    "prerequisites",
                    s.name(),
                    format!("{} suite failed", reason.as_deref().unwrap_or("ring")),
                );
                rep
            }
        };
        if blocked.is_none() && !checks.passed() {
            blocked = Some(s.name().to_string());
        }
        timings_ms.insert(s.name().to_string(), start.elapsed().as_millis() as u64);
        suites.push(SuiteReport { suite: s.name().to_string(), checks });
    }

    VerificationReport {
        input: spec.clone(),
        suites,
        timings_ms,
        guards: *guards,
    }
}
