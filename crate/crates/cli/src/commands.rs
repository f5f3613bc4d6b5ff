//! JSON output for the inspection subcommands.

use finsch_core::geometry::stalk_to_localization;
use finsch_core::limits::stalk_at;
use finsch_core::spectrum::{sheaf_spec_sections, structure_sheaf, zariski_topology, SpectrumSpace};
use finsch_core::{BitSet, Error, FiniteRing, Guards, Result};
use serde_json::{json, Value};

fn fractions(sp: &SpectrumSpace, domain: &BitSet, values: &[usize]) -> Vec<Value> {
    domain
        .iter()
        .zip(values)
        .map(|(p, &c)| {
            let f = sp.stalk(p).canonical(c);
            json!({"point": p, "numerator": f.numerator, "denominator": f.denominator})
        })
        .collect()
}

/// Prime ideals in enumeration order; point `i` of the spectrum is entry `i`.
pub fn spec_summary(r: &FiniteRing, guards: &Guards) -> Result<Value> {
    let sp = zariski_topology(r, guards)?;
    let primes: Vec<Vec<usize>> = sp.points().iter().map(|p| p.members().to_vec()).collect();
    Ok(json!({"size": r.size(), "primes": primes}))
}

pub fn topology_summary(r: &FiniteRing, guards: &Guards) -> Result<Value> {
    let sp = zariski_topology(r, guards)?;
    let points: Vec<Vec<usize>> = sp.points().iter().map(|p| p.members().to_vec()).collect();
    let opens: Vec<Vec<usize>> = sp.topology().opens().iter().map(BitSet::to_vec).collect();
    Ok(json!({"points": points, "opens": opens}))
}

pub fn sections_summary(r: &FiniteRing, open: &BitSet, guards: &Guards) -> Result<Value> {
    let sp = zariski_topology(r, guards)?;
    let o = sheaf_spec_sections(&sp, open, guards)?;
    let sections: Vec<Value> = o.sections.iter().map(|s| json!(fractions(&sp, &s.domain, &s.values))).collect();
    Ok(json!({
        "open": open.to_vec(),
        "count": o.sections.len(),
        "sections": sections,
    }))
}

pub fn stalk_summary(r: &FiniteRing, point: usize, guards: &Guards) -> Result<Value> {
    let o = structure_sheaf(r, guards)?;
    let carrier = o.space.topology().carrier().clone();
    if !carrier.contains(point) {
        return Err(Error::NotSubset(BitSet::singleton(point)));
    }
    let stalk = stalk_at(&o.presheaf, point, guards)?;
    let iso = stalk_to_localization(&o, point, &carrier, guards)?;
    let classes: Vec<Value> = (0..stalk.class_count())
        .map(|c| {
            let (u, s) = stalk.representative(c);
            let sec = &o.sections[u].sections[s];
            json!({
                "open": o.presheaf.open(u).to_vec(),
                "section": fractions(&o.space, &sec.domain, &sec.values),
            })
        })
        .collect();
    Ok(json!({
        "point": point,
        "prime": o.space.points()[point].members().to_vec(),
        "size": stalk.class_count(),
        "local_ring_size": o.space.stalk(point).class_count(),
        "iso_path": format!("{:?}", iso.path).to_lowercase(),
        "classes": classes,
    }))
}

/// Parses `"0,2"` into a point set; the empty string is the empty set.
pub fn parse_point_list(text: &str) -> std::result::Result<BitSet, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|e| format!("bad point index `{s}`: {e}")))
        .collect()
}
