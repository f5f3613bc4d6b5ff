//! Rings of fractions `S⁻¹R` of a finite commutative ring.
//!
//! Pairs `(r, s)` with `s ∈ S` are partitioned into classes under
//! `(r, s) ~ (r', s')  ⇔  ∃ t ∈ S. t·(s'·r − s·r') = 0`, and the class-level
//! addition and multiplication tables are materialized once.

use crate::error::{Error, Result};
use crate::guard::Guards;
use crate::ring::{complement_submonoid, validate_ring, Elem, FiniteRing, PrimeIdeal, RawRing, Submonoid};

/// Canonical representative `numerator / denominator` of a class: the
/// least pair ordered by denominator, then numerator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FracClass {
    pub numerator: Elem,
    pub denominator: Elem,
}

/// Whether `x.0 / x.1` and `y.0 / y.1` name the same fraction.
pub fn frac_equiv(r: &FiniteRing, s: &Submonoid, x: (Elem, Elem), y: (Elem, Elem)) -> bool {
    let diff = r.sub(r.mul(y.1, x.0), r.mul(x.1, y.0));
    s.members().iter().any(|t| r.mul(t, diff) == r.zero())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizedRing {
    base: FiniteRing,
    submonoid: Submonoid,
    ring: FiniteRing,
    /// Indexed by `r * base.size() + s`; `None` when `s ∉ S`.
    class_of_pair: Vec<Option<usize>>,
    canonical: Vec<FracClass>,
}

/// Builds `S⁻¹R`. The result is validated as a commutative ring.
pub fn localize(r: &FiniteRing, s: &Submonoid, guards: &Guards) -> Result<LocalizedRing> {
    if !r.is_commutative() {
        return Err(Error::NotCommutative);
    }
    let n = r.size();
    let denominators: Vec<Elem> = s.members().iter().collect();
    guards.sections("localization pairs", (n * denominators.len()) as u128)?;

    let mut class_of_pair = vec![None; n * n];
    let mut canonical = Vec::new();
    for &den in &denominators {
        for num in r.elements() {
            if class_of_pair[num * n + den].is_some() {
                continue;
            }
            let c = canonical.len();
            canonical.push(FracClass { numerator: num, denominator: den });
            for &d in &denominators {
                for x in r.elements() {
                    if class_of_pair[x * n + d].is_none() && frac_equiv(r, s, (num, den), (x, d)) {
                        class_of_pair[x * n + d] = Some(c);
                    }
                }
            }
        }
    }

    let class = |num: Elem, den: Elem| class_of_pair[num * n + den].expect("S is closed under multiplication");
    let k = canonical.len();
    let table = |op: &dyn Fn(FracClass, FracClass) -> usize| -> Vec<Vec<usize>> {
        (0..k).map(|a| (0..k).map(|b| op(canonical[a], canonical[b])).collect()).collect()
    };
    let raw = RawRing {
        size: k,
        add: table(&|a, b| {
            class(
                r.add(r.mul(a.numerator, b.denominator), r.mul(b.numerator, a.denominator)),
                r.mul(a.denominator, b.denominator),
            )
        }),
        mul: table(&|a, b| class(r.mul(a.numerator, b.numerator), r.mul(a.denominator, b.denominator))),
        zero: class(r.zero(), r.one()),
        one: class(r.one(), r.one()),
    };
    let ring = validate_ring(&raw, true).map_err(|e| Error::Internal(format!("localization is not a ring: {e}")))?;
    Ok(LocalizedRing {
        base: r.clone(),
        submonoid: s.clone(),
        ring,
        class_of_pair,
        canonical,
    })
}

/// The local ring `R_𝔭 = (R ∖ 𝔭)⁻¹R`.
pub fn local_ring_at(r: &FiniteRing, p: &PrimeIdeal, guards: &Guards) -> Result<LocalizedRing> {
    localize(r, &complement_submonoid(r, p), guards)
}

impl LocalizedRing {
    pub fn ring(&self) -> &FiniteRing {
        &self.ring
    }

    pub fn base(&self) -> &FiniteRing {
        &self.base
    }

    pub fn submonoid(&self) -> &Submonoid {
        &self.submonoid
    }

    pub fn canonical(&self, class: usize) -> FracClass {
        self.canonical[class]
    }

    pub fn class_count(&self) -> usize {
        self.canonical.len()
    }

    /// Class index of `r / s`.
    pub fn frac(&self, r: Elem, s: Elem) -> Result<usize> {
        if r >= self.base.size() {
            return Err(Error::Internal(format!("numerator {r} outside the carrier")));
        }
        if !self.submonoid.contains(s) {
            return Err(Error::SNotMember(s));
        }
        Ok(self.class_of_pair[r * self.base.size() + s].expect("every pair over S is classified"))
    }

    /// Recomputes both tables from every representative pair and compares
    /// with the materialized class tables. Returns the first pair of pairs
    /// that disagrees.
    pub fn check_well_defined(&self) -> std::result::Result<(), ((Elem, Elem), (Elem, Elem))> {
        let r = &self.base;
        let pairs: Vec<(Elem, Elem)> = self
            .submonoid
            .members()
            .iter()
            .flat_map(|s| r.elements().map(move |x| (x, s)))
            .collect();
        let class = |(x, s): (Elem, Elem)| self.class_of_pair[x * r.size() + s].unwrap();
        for &a in &pairs {
            for &b in &pairs {
                let sum = (r.add(r.mul(a.0, b.1), r.mul(b.0, a.1)), r.mul(a.1, b.1));
                let prod = (r.mul(a.0, b.0), r.mul(a.1, b.1));
                if class(sum) != self.ring.add(class(a), class(b)) || class(prod) != self.ring.mul(class(a), class(b)) {
                    return Err((a, b));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::BitSet;
    use crate::ring::{enumerate_prime_ideals, is_local_ring, product_ring, ring_iso_search, zmod};
    use proptest::prelude::*;

    fn monoid(r: &FiniteRing, xs: &[usize]) -> Submonoid {
        Submonoid::new(r, xs.iter().copied().collect()).unwrap()
    }

    fn prime_containing(r: &FiniteRing, x: Elem) -> PrimeIdeal {
        enumerate_prime_ideals(r, &Guards::default())
            .unwrap()
            .into_iter()
            .find(|p| p.contains(x))
            .unwrap()
    }

    #[test]
    fn equivalence_examples() {
        let r = zmod(6).unwrap();
        let s = monoid(&r, &[1, 3, 5]);
        assert!(frac_equiv(&r, &s, (4, 5), (4, 5)));
        assert!(frac_equiv(&r, &s, (2, 1), (4, 5)));
        assert!(!frac_equiv(&r, &s, (1, 1), (0, 1)));
    }

    #[test]
    fn localize_examples() {
        let g = Guards::default();
        let r6 = zmod(6).unwrap();
        let l = localize(&r6, &monoid(&r6, &[1, 3, 5]), &g).unwrap();
        assert_eq!(l.class_count(), 2);
        assert!(ring_iso_search(l.ring(), &zmod(2).unwrap()).is_some());

        let r4 = zmod(4).unwrap();
        let l = localize(&r4, &monoid(&r4, &[1, 3]), &g).unwrap();
        assert_eq!(l.class_count(), 4);
        assert!(ring_iso_search(l.ring(), &r4).is_some());

        let r5 = zmod(5).unwrap();
        let l = localize(&r5, &monoid(&r5, &[1]), &g).unwrap();
        assert!(ring_iso_search(l.ring(), &r5).is_some());
    }

    #[test]
    fn localizing_at_zero_kills_everything() {
        let r = zmod(6).unwrap();
        let l = localize(&r, &monoid(&r, &[0, 1]), &Guards::default()).unwrap();
        assert_eq!(l.class_count(), 1);
    }

    #[test]
    fn local_ring_examples() {
        let g = Guards::default();
        let r6 = zmod(6).unwrap();
        let l = local_ring_at(&r6, &prime_containing(&r6, 2), &g).unwrap();
        assert_eq!(l.class_count(), 2);
        let m = is_local_ring(l.ring(), &g).unwrap().unwrap();
        assert_eq!(m.members(), &BitSet::singleton(l.frac(0, 1).unwrap()));

        let r4 = zmod(4).unwrap();
        let l = local_ring_at(&r4, &prime_containing(&r4, 2), &g).unwrap();
        assert_eq!(l.class_count(), 4);
        assert_eq!(is_local_ring(l.ring(), &g).unwrap().unwrap().members().len(), 2);

        let r5 = zmod(5).unwrap();
        let l = local_ring_at(&r5, &prime_containing(&r5, 0), &g).unwrap();
        assert_eq!(l.class_count(), 5);
        assert_eq!(is_local_ring(l.ring(), &g).unwrap().unwrap().members(), &BitSet::singleton(l.ring().zero()));
    }

    #[test]
    fn frac_examples() {
        let r = zmod(6).unwrap();
        let l = local_ring_at(&r, &prime_containing(&r, 2), &Guards::default()).unwrap();
        assert_eq!(l.frac(0, 1).unwrap(), l.ring().zero());
        assert_eq!(l.frac(1, 1).unwrap(), l.ring().one());
        assert_eq!(l.frac(3, 3).unwrap(), l.ring().one());
        assert_eq!(l.frac(1, 2), Err(Error::SNotMember(2)));
    }

    #[test]
    fn canonical_representatives_are_least() {
        let r = zmod(9).unwrap();
        let l = local_ring_at(&r, &prime_containing(&r, 3), &Guards::default()).unwrap();
        for c in 0..l.class_count() {
            let rep = l.canonical(c);
            for s in l.submonoid().members().iter() {
                for x in r.elements() {
                    if l.frac(x, s).unwrap() == c {
                        assert!((rep.denominator, rep.numerator) <= (s, x));
                    }
                }
            }
        }
    }

    fn test_rings() -> Vec<FiniteRing> {
        let g = Guards::default();
        let z2 = zmod(2).unwrap();
        let mut rings: Vec<FiniteRing> = (2..=12).map(|n| zmod(n).unwrap()).collect();
        rings.push(product_ring(&z2, &z2, &g).unwrap());
        rings.push(product_ring(&z2, &zmod(3).unwrap(), &g).unwrap());
        rings
    }

    /// Every multiplicative submonoid of a small ring, by subset scan.
    fn all_submonoids(r: &FiniteRing) -> Vec<Submonoid> {
        (0u64..1 << r.size())
            .filter_map(|m| Submonoid::new(r, BitSet::from_mask(m)).ok())
            .collect()
    }

    #[test]
    fn equivalence_relation_and_well_definedness() {
        let g = Guards::default();
        for r in test_rings().into_iter().filter(|r| r.size() <= 8) {
            for s in all_submonoids(&r) {
                let pairs: Vec<(Elem, Elem)> = s.members().iter().flat_map(|d| r.elements().map(move |x| (x, d))).collect();
                for &a in &pairs {
                    assert!(frac_equiv(&r, &s, a, a));
                    for &b in &pairs {
                        assert_eq!(frac_equiv(&r, &s, a, b), frac_equiv(&r, &s, b, a));
                        if !frac_equiv(&r, &s, a, b) {
                            continue;
                        }
                        for &c in &pairs {
                            if frac_equiv(&r, &s, b, c) {
                                assert!(frac_equiv(&r, &s, a, c));
                            }
                        }
                    }
                }
                let l = localize(&r, &s, &g).unwrap();
                assert_eq!(l.check_well_defined(), Ok(()));
            }
        }
    }

    #[test]
    fn every_local_ring_at_a_prime_is_local() {
        let g = Guards::default();
        for r in test_rings() {
            for p in enumerate_prime_ideals(&r, &g).unwrap() {
                let l = local_ring_at(&r, &p, &g).unwrap();
                assert!(is_local_ring(l.ring(), &g).unwrap().is_some());
            }
        }
    }

    proptest! {
        #[test]
        fn scaling_numerator_and_denominator(n in 2usize..=12, a in 0usize..12, b in 0usize..12, c in 0usize..12) {
            let r = zmod(n).unwrap();
            let g = Guards::default();
            for p in enumerate_prime_ideals(&r, &g).unwrap() {
                let l = local_ring_at(&r, &p, &g).unwrap();
                let (a, b, c) = (a % n, b % n, c % n);
                let s = l.submonoid();
                if s.contains(b) && s.contains(c) {
                    prop_assert_eq!(l.frac(r.mul(a, c), r.mul(b, c)).unwrap(), l.frac(a, b).unwrap());
                }
            }
        }
    }
}
