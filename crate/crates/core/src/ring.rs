//! Finite rings given by explicit addition and multiplication tables.
//!
//! Elements are dense indices `0..size`. Every operation goes through the
//! tables; `zmod` and `product_ring` are only constructors. Subsets of the
//! carrier (ideals, submonoids) are [`BitSet`]s validated against a ring.

use std::collections::BTreeSet;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::guard::Guards;

pub type Elem = usize;

/// Unvalidated ring tables, as read from a ring description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawRing {
    pub size: usize,
    pub add: Vec<Vec<usize>>,
    pub mul: Vec<Vec<usize>>,
    pub zero: usize,
    pub one: usize,
}

/// A ring whose axioms have been checked exhaustively.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteRing {
    size: usize,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    zero: Elem,
    one: Elem,
    commutative: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    NotClosed,
    AddNotAssociative,
    AddNotCommutative,
    NoAdditiveIdentity,
    NoAdditiveInverse,
    NotAssociative,
    NoUnit,
    NotDistributive,
    NotCommutative,
}

/// One violated axiom together with the first witness found for it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub witness: Vec<Elem>,
}

/// Checks every axiom instance of `raw` and returns the validated ring.
///
/// All violated axioms are collected (one witness each). When
/// `require_commutative` is false the ring may be noncommutative, and the
/// resulting [`FiniteRing::is_commutative`] flag reports which case holds.
pub fn validate_ring(raw: &RawRing, require_commutative: bool) -> Result<FiniteRing> {
    let n = raw.size;
    if n == 0 {
        return Err(Error::BadShape("size must be at least 1".into()));
    }
    for (name, table) in [("add", &raw.add), ("mul", &raw.mul)] {
        if table.len() != n {
            return Err(Error::BadShape(format!("{name} has {} rows, expected {n}", table.len())));
        }
        if let Some((i, row)) = table.iter().enumerate().find(|(_, row)| row.len() != n) {
            return Err(Error::BadShape(format!("{name} row {i} has {} entries, expected {n}", row.len())));
        }
    }

    let mut closure = Vec::new();
    for table in [&raw.add, &raw.mul] {
        for i in 0..n {
            for j in 0..n {
                if table[i][j] >= n {
                    closure.push(AxiomViolation { axiom: Axiom::NotClosed, witness: vec![i, j] });
                }
            }
        }
    }
    for c in [raw.zero, raw.one] {
        if c >= n {
            closure.push(AxiomViolation { axiom: Axiom::NotClosed, witness: vec![c] });
        }
    }
    if !closure.is_empty() {
        closure.truncate(1);
        return Err(Error::Axioms(closure));
    }

    let add = |a: usize, b: usize| raw.add[a][b];
    let mul = |a: usize, b: usize| raw.mul[a][b];
    let (zero, one) = (raw.zero, raw.one);

    let mut found: Vec<AxiomViolation> = Vec::new();
    let mut note = |axiom: Axiom, witness: Vec<Elem>| {
        if !found.iter().any(|v| v.axiom == axiom) {
            found.push(AxiomViolation { axiom, witness });
        }
    };

    for a in 0..n {
        if add(a, zero) != a || add(zero, a) != a {
            note(Axiom::NoAdditiveIdentity, vec![a]);
        }
        if mul(a, one) != a || mul(one, a) != a {
            note(Axiom::NoUnit, vec![a]);
        }
        if !(0..n).any(|b| add(a, b) == zero && add(b, a) == zero) {
            note(Axiom::NoAdditiveInverse, vec![a]);
        }
        for b in 0..n {
            if add(a, b) != add(b, a) {
                note(Axiom::AddNotCommutative, vec![a, b]);
            }
            if mul(a, b) != mul(b, a) {
                note(Axiom::NotCommutative, vec![a, b]);
            }
            for c in 0..n {
                if add(add(a, b), c) != add(a, add(b, c)) {
                    note(Axiom::AddNotAssociative, vec![a, b, c]);
                }
                if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                    note(Axiom::NotAssociative, vec![a, b, c]);
                }
                if mul(a, add(b, c)) != add(mul(a, b), mul(a, c)) || mul(add(b, c), a) != add(mul(b, a), mul(c, a)) {
                    note(Axiom::NotDistributive, vec![a, b, c]);
                }
            }
        }
    }

    let commutative = !found.iter().any(|v| v.axiom == Axiom::NotCommutative);
    if !require_commutative {
        found.retain(|v| v.axiom != Axiom::NotCommutative);
    }
    if !found.is_empty() {
        found.sort_by_key(|v| v.axiom);
        return Err(Error::Axioms(found));
    }

    let neg = (0..n)
        .map(|a| (0..n).find(|&b| add(a, b) == zero).expect("inverse checked above"))
        .collect();
    Ok(FiniteRing {
        size: n,
        add: raw.add.iter().flatten().copied().collect(),
        mul: raw.mul.iter().flatten().copied().collect(),
        neg,
        zero,
        one,
        commutative,
    })
}

/// The integers modulo `n`.
pub fn zmod(n: usize) -> Result<FiniteRing> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    let table = |op: fn(usize, usize) -> usize| -> Vec<Vec<usize>> {
        (0..n).map(|a| (0..n).map(|b| op(a, b) % n).collect()).collect()
    };
    let raw = RawRing {
        size: n,
        add: table(|a, b| a + b),
        mul: table(|a, b| a * b),
        zero: 0,
        one: 1 % n,
    };
    validate_ring(&raw, true)
}

/// Componentwise product; the pair `(i, j)` has index `i * b.size() + j`.
pub fn product_ring(a: &FiniteRing, b: &FiniteRing, guards: &Guards) -> Result<FiniteRing> {
    let n = a.size * b.size;
    guards.sections("product ring size", n as u128)?;
    let split = |x: usize| (x / b.size, x % b.size);
    let join = |i: usize, j: usize| i * b.size + j;
    let table = |f: &dyn Fn(usize, usize) -> usize| -> Vec<Vec<usize>> {
        (0..n).map(|x| (0..n).map(|y| f(x, y)).collect()).collect()
    };
    let raw = RawRing {
        size: n,
        add: table(&|x, y| {
            let ((xi, xj), (yi, yj)) = (split(x), split(y));
            join(a.add(xi, yi), b.add(xj, yj))
        }),
        mul: table(&|x, y| {
            let ((xi, xj), (yi, yj)) = (split(x), split(y));
            join(a.mul(xi, yi), b.mul(xj, yj))
        }),
        zero: join(a.zero, b.zero),
        one: join(a.one, b.one),
    };
    validate_ring(&raw, false)
}

impl FiniteRing {
    /// The one-element ring.
    pub fn zero_ring() -> Self {
        zmod(1).expect("zmod(1) is a ring")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn zero(&self) -> Elem {
        self.zero
    }

    pub fn one(&self) -> Elem {
        self.one
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.size
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[a * self.size + b]
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a * self.size + b]
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn is_unit(&self, a: Elem) -> bool {
        self.elements().any(|b| self.mul(a, b) == self.one && self.mul(b, a) == self.one)
    }

    pub fn full_set(&self) -> BitSet {
        BitSet::full(self.size)
    }

    pub fn to_raw(&self) -> RawRing {
        let rows = |t: &[Elem]| t.chunks(self.size).map(|r| r.to_vec()).collect();
        RawRing {
            size: self.size,
            add: rows(&self.add),
            mul: rows(&self.mul),
            zero: self.zero,
            one: self.one,
        }
    }

    /// Copy of this ring with element `x` renamed to `perm[x]`.
    ///
    /// Panics if `perm` is not a permutation of the carrier.
    pub fn relabel(&self, perm: &[Elem]) -> FiniteRing {
        assert_eq!(perm.len(), self.size);
        let mut inv = vec![usize::MAX; self.size];
        for (x, &y) in perm.iter().enumerate() {
            inv[y] = x;
        }
        assert!(inv.iter().all(|&x| x != usize::MAX), "not a permutation");
        let n = self.size;
        let raw = RawRing {
            size: n,
            add: (0..n).map(|a| (0..n).map(|b| perm[self.add(inv[a], inv[b])]).collect()).collect(),
            mul: (0..n).map(|a| (0..n).map(|b| perm[self.mul(inv[a], inv[b])]).collect()).collect(),
            zero: perm[self.zero],
            one: perm[self.one],
        };
        validate_ring(&raw, false).expect("relabeling preserves the axioms")
    }

    /// Subgroup of `(R, +)` generated by `gens`.
    pub fn additive_closure(&self, gens: &BitSet) -> BitSet {
        let gens: Vec<Elem> = gens.iter().collect();
        let mut set = BitSet::singleton(self.zero);
        let mut stack = vec![self.zero];
        while let Some(x) = stack.pop() {
            for &g in &gens {
                let y = self.add(x, g);
                if set.insert(y) {
                    stack.push(y);
                }
            }
        }
        set
    }

    /// Two-sided ideal generated by `gens`: additive closure of `{a·g·b}`.
    pub fn ideal_generated(&self, gens: &BitSet) -> BitSet {
        let mut products = BitSet::new();
        for g in gens.iter() {
            for a in self.elements() {
                let ag = self.mul(a, g);
                if self.commutative {
                    products.insert(ag);
                } else {
                    for b in self.elements() {
                        products.insert(self.mul(ag, b));
                    }
                }
            }
        }
        self.additive_closure(&products)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdealFailure {
    OutOfRange(Elem),
    MissingZero,
    NotClosedUnderAdd(Elem, Elem),
    NotClosedUnderNeg(Elem),
    /// `(ring element, member)` whose product leaves the subset.
    NotAbsorbing(Elem, Elem),
}

/// Checks that `s` is an additive subgroup absorbing multiplication on both sides.
pub fn is_ideal(r: &FiniteRing, s: &BitSet) -> Result<(), IdealFailure> {
    if s.bound() > r.size {
        return Err(IdealFailure::OutOfRange(s.bound() - 1));
    }
    if !s.contains(r.zero) {
        return Err(IdealFailure::MissingZero);
    }
    for a in s.iter() {
        for b in s.iter() {
            if !s.contains(r.add(a, b)) {
                return Err(IdealFailure::NotClosedUnderAdd(a, b));
            }
        }
    }
    if let Some(a) = s.iter().find(|&a| !s.contains(r.neg(a))) {
        return Err(IdealFailure::NotClosedUnderNeg(a));
    }
    for a in s.iter() {
        for x in r.elements() {
            if !s.contains(r.mul(x, a)) || !s.contains(r.mul(a, x)) {
                return Err(IdealFailure::NotAbsorbing(x, a));
            }
        }
    }
    Ok(())
}

/// A validated two-sided ideal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ideal(BitSet);

impl Ideal {
    pub fn new(r: &FiniteRing, members: BitSet) -> Result<Self> {
        match is_ideal(r, &members) {
            Ok(()) => Ok(Self(members)),
            Err(e) => Err(Error::NotIdeal(members, e)),
        }
    }

    pub fn zero(r: &FiniteRing) -> Self {
        Self(BitSet::singleton(r.zero))
    }

    pub fn whole(r: &FiniteRing) -> Self {
        Self(r.full_set())
    }

    pub fn members(&self) -> &BitSet {
        &self.0
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.0.contains(x)
    }

    pub fn is_proper(&self, r: &FiniteRing) -> bool {
        self.0.len() < r.size
    }
}

/// The additive subgroup generated by all products `x·y`, `x ∈ a`, `y ∈ b`.
pub fn ideal_gen_by_prod(r: &FiniteRing, a: &Ideal, b: &Ideal) -> Ideal {
    let products: BitSet = a
        .members()
        .iter()
        .flat_map(|x| b.members().iter().map(move |y| r.mul(x, y)))
        .collect();
    Ideal(r.additive_closure(&products))
}

/// All finite sums of members of the family.
pub fn sum_of_ideals(r: &FiniteRing, family: &[Ideal]) -> Result<Ideal> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let union = family.iter().fold(BitSet::new(), |acc, i| acc.union(i.members()));
    Ok(Ideal(r.additive_closure(&union)))
}

/// Every ideal of `r`, in ascending bitmask order.
///
/// Ideals are found by closure: starting from `{0}`, each ideal is extended
/// by one element at a time and re-closed. The guard bounds the number of
/// closures computed.
pub fn enumerate_ideals(r: &FiniteRing, guards: &Guards) -> Result<Vec<Ideal>> {
    let zero = BitSet::singleton(r.zero);
    let mut found: BTreeSet<BitSet> = BTreeSet::from([zero.clone()]);
    let mut stack = vec![zero];
    let mut work: u128 = 0;
    while let Some(i) = stack.pop() {
        for x in r.elements().filter(|&x| !i.contains(x)) {
            work += 1;
            guards.subsets("ideal enumeration", work)?;
            let mut gens = i.clone();
            gens.insert(x);
            let j = r.ideal_generated(&gens);
            if found.insert(j.clone()) {
                stack.push(j);
            }
        }
    }
    Ok(found.into_iter().map(Ideal).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeFailure {
    NotProper,
    /// `x·y ∈ I` although neither `x` nor `y` is.
    NotAbsorbent(Elem, Elem),
}

pub fn is_prime_ideal(r: &FiniteRing, i: &Ideal) -> Result<(), PrimeFailure> {
    if !i.is_proper(r) {
        return Err(PrimeFailure::NotProper);
    }
    for x in r.elements().filter(|&x| !i.contains(x)) {
        for y in r.elements().filter(|&y| !i.contains(y)) {
            if i.contains(r.mul(x, y)) {
                return Err(PrimeFailure::NotAbsorbent(x, y));
            }
        }
    }
    Ok(())
}

/// A validated prime ideal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimeIdeal(Ideal);

impl PrimeIdeal {
    pub fn new(r: &FiniteRing, i: Ideal) -> Result<Self> {
        match is_prime_ideal(r, &i) {
            Ok(()) => Ok(Self(i)),
            Err(e) => Err(Error::NotPrime(i.0, e)),
        }
    }

    pub fn ideal(&self) -> &Ideal {
        &self.0
    }

    pub fn members(&self) -> &BitSet {
        self.0.members()
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.0.contains(x)
    }
}

/// True iff `i` is proper and no enumerated proper ideal strictly contains it.
pub fn is_maximal_ideal(r: &FiniteRing, i: &Ideal, guards: &Guards) -> Result<bool> {
    if !i.is_proper(r) {
        return Ok(false);
    }
    let ideals = enumerate_ideals(r, guards)?;
    Ok(!ideals
        .iter()
        .any(|j| j.is_proper(r) && j != i && i.members().is_subset(j.members())))
}

/// A validated maximal ideal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MaximalIdeal(Ideal);

impl MaximalIdeal {
    pub fn new(r: &FiniteRing, i: Ideal, guards: &Guards) -> Result<Self> {
        if is_maximal_ideal(r, &i, guards)? {
            Ok(Self(i))
        } else {
            Err(Error::NotMaximal(i.0))
        }
    }

    pub fn ideal(&self) -> &Ideal {
        &self.0
    }

    pub fn members(&self) -> &BitSet {
        self.0.members()
    }
}

pub fn enumerate_prime_ideals(r: &FiniteRing, guards: &Guards) -> Result<Vec<PrimeIdeal>> {
    Ok(enumerate_ideals(r, guards)?
        .into_iter()
        .filter(|i| is_prime_ideal(r, i).is_ok())
        .map(PrimeIdeal)
        .collect())
}

pub fn maximal_ideals(r: &FiniteRing, guards: &Guards) -> Result<Vec<MaximalIdeal>> {
    let ideals = enumerate_ideals(r, guards)?;
    let proper: Vec<&Ideal> = ideals.iter().filter(|i| i.is_proper(r)).collect();
    Ok(proper
        .iter()
        .filter(|i| !proper.iter().any(|j| j != *i && i.members().is_subset(j.members())))
        .map(|i| MaximalIdeal((*i).clone()))
        .collect())
}

/// A multiplicative submonoid: contains one and is closed under `·`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Submonoid(BitSet);

impl Submonoid {
    pub fn new(r: &FiniteRing, members: BitSet) -> Result<Self> {
        let closed = members
            .iter()
            .all(|a| members.iter().all(|b| members.contains(r.mul(a, b))));
        if members.bound() <= r.size && members.contains(r.one) && closed {
            Ok(Self(members))
        } else {
            Err(Error::NotSubmonoid(members))
        }
    }

    pub fn members(&self) -> &BitSet {
        &self.0
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.0.contains(x)
    }
}

/// `{x ∈ R | x ∉ p}`, which is a submonoid because `p` is prime.
pub fn complement_submonoid(r: &FiniteRing, p: &PrimeIdeal) -> Submonoid {
    Submonoid::new(r, r.full_set().difference(p.members()))
        .expect("the complement of a prime ideal is multiplicatively closed and contains one")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomFailure {
    WrongLength { expected: usize, got: usize },
    OutOfRange(Elem),
    Zero,
    One,
    Add(Elem, Elem),
    Mul(Elem, Elem),
}

/// Checks that `map` preserves `+`, `·`, zero and one.
pub fn check_ring_hom(map: &[Elem], src: &FiniteRing, dst: &FiniteRing) -> Result<(), HomFailure> {
    if map.len() != src.size {
        return Err(HomFailure::WrongLength { expected: src.size, got: map.len() });
    }
    if let Some(x) = (0..src.size).find(|&x| map[x] >= dst.size) {
        return Err(HomFailure::OutOfRange(x));
    }
    if map[src.zero] != dst.zero {
        return Err(HomFailure::Zero);
    }
    if map[src.one] != dst.one {
        return Err(HomFailure::One);
    }
    for a in src.elements() {
        for b in src.elements() {
            if map[src.add(a, b)] != dst.add(map[a], map[b]) {
                return Err(HomFailure::Add(a, b));
            }
            if map[src.mul(a, b)] != dst.mul(map[a], map[b]) {
                return Err(HomFailure::Mul(a, b));
            }
        }
    }
    Ok(())
}

/// A ring homomorphism stored as its value table.
///
/// [`RingHom::new`] verifies the homomorphism property; [`RingHom::unchecked`]
/// does not.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingHom {
    map: Vec<Elem>,
    target_size: usize,
}

impl RingHom {
    pub fn new(map: Vec<Elem>, src: &FiniteRing, dst: &FiniteRing) -> Result<Self> {
        check_ring_hom(&map, src, dst).map_err(Error::NotHom)?;
        Ok(Self { map, target_size: dst.size })
    }

    pub fn identity(r: &FiniteRing) -> Self {
        Self { map: r.elements().collect(), target_size: r.size }
    }

    pub fn apply(&self, x: Elem) -> Elem {
        self.map[x]
    }

    pub fn table(&self) -> &[Elem] {
        &self.map
    }

    pub fn source_size(&self) -> usize {
        self.map.len()
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    /// `self ∘ first`. Returns `None` when the middle rings differ in size.
    pub fn after(&self, first: &RingHom) -> Option<RingHom> {
        (first.target_size == self.source_size()).then(|| RingHom {
            map: first.map.iter().map(|&x| self.map[x]).collect(),
            target_size: self.target_size,
        })
    }

    pub fn is_bijective(&self) -> bool {
        self.map.len() == self.target_size && self.map.iter().copied().collect::<BitSet>().len() == self.target_size
    }

    pub fn inverse(&self) -> Option<RingHom> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.target_size];
        for (x, &y) in self.map.iter().enumerate() {
            inv[y] = x;
        }
        Some(RingHom { map: inv, target_size: self.map.len() })
    }

    pub fn preimage(&self, set: &BitSet) -> BitSet {
        (0..self.map.len()).filter(|&x| set.contains(self.map[x])).collect()
    }

    /// Wraps a value table without checking it. Used for data (presheaf
    /// restrictions, morphism families) that a checker validates afterwards.
    pub fn unchecked(map: Vec<Elem>, target_size: usize) -> Self {
        Self { map, target_size }
    }
}

fn additive_orders(r: &FiniteRing) -> Vec<usize> {
    r.elements()
        .map(|x| {
            let (mut acc, mut k) = (x, 1);
            while acc != r.zero {
                acc = r.add(acc, x);
                k += 1;
            }
            k
        })
        .collect()
}

struct IsoSearch<'a> {
    a: &'a FiniteRing,
    b: &'a FiniteRing,
    map: Vec<Option<Elem>>,
    used: Vec<bool>,
    trail: Vec<Elem>,
}

impl IsoSearch<'_> {
    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let x = self.trail.pop().unwrap();
            let y = self.map[x].take().unwrap();
            self.used[y] = false;
        }
    }

    fn set(&mut self, x: Elem, y: Elem, queue: &mut Vec<Elem>) -> bool {
        match self.map[x] {
            Some(z) => z == y,
            None if self.used[y] => false,
            None => {
                self.map[x] = Some(y);
                self.used[y] = true;
                self.trail.push(x);
                queue.push(x);
                true
            }
        }
    }

    /// Assigns `x ↦ y` and propagates every sum and product it forces.
    fn assign(&mut self, x: Elem, y: Elem) -> bool {
        let mut queue = Vec::new();
        if !self.set(x, y, &mut queue) {
            return false;
        }
        while let Some(u) = queue.pop() {
            let hu = self.map[u].unwrap();
            let assigned: Vec<Elem> = self.trail.clone();
            for v in assigned {
                let hv = self.map[v].unwrap();
                let forced = [
                    (self.a.add(u, v), self.b.add(hu, hv)),
                    (self.a.mul(u, v), self.b.mul(hu, hv)),
                    (self.a.mul(v, u), self.b.mul(hv, hu)),
                ];
                for (s, t) in forced {
                    if !self.set(s, t, &mut queue) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn solve(&mut self, orders_a: &[usize], orders_b: &[usize]) -> bool {
        let Some(x) = self.map.iter().position(Option::is_none) else {
            return true;
        };
        for y in 0..self.b.size {
            if self.used[y] || orders_a[x] != orders_b[y] {
                continue;
            }
            let mark = self.trail.len();
            if self.assign(x, y) && self.solve(orders_a, orders_b) {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }
}

/// Searches for a ring isomorphism `a → b`.
///
/// Zero and one are pinned first; remaining elements are tried in ascending
/// index order, with every sum and product an assignment forces propagated
/// before branching.
pub fn ring_iso_search(a: &FiniteRing, b: &FiniteRing) -> Option<RingHom> {
    if a.size != b.size || a.commutative != b.commutative {
        return None;
    }
    let mut s = IsoSearch {
        a,
        b,
        map: vec![None; a.size],
        used: vec![false; b.size],
        trail: Vec::new(),
    };
    if !s.assign(a.zero, b.zero) || !s.assign(a.one, b.one) {
        return None;
    }
    if !s.solve(&additive_orders(a), &additive_orders(b)) {
        return None;
    }
    let map: Vec<Elem> = s.map.into_iter().map(Option::unwrap).collect();
    RingHom::new(map, a, b).ok()
}

/// Returns the unique maximal ideal when `r` is local, `None` otherwise.
pub fn is_local_ring(r: &FiniteRing, guards: &Guards) -> Result<Option<MaximalIdeal>> {
    let mut maxes = maximal_ideals(r, guards)?;
    Ok(if maxes.len() == 1 { maxes.pop() } else { None })
}

/// True iff the preimage of the maximal ideal of `b` is the maximal ideal of `a`.
pub fn is_local_hom(h: &RingHom, a: &FiniteRing, b: &FiniteRing, guards: &Guards) -> Result<bool> {
    let ma = is_local_ring(a, guards)?.ok_or(Error::NotLocalRing)?;
    let mb = is_local_ring(b, guards)?.ok_or(Error::NotLocalRing)?;
    Ok(&h.preimage(mb.members()) == ma.members())
}

/// Every maximal ideal is prime; returns the prime check for `m`.
pub fn max_ideal_is_prime(r: &FiniteRing, m: &MaximalIdeal) -> bool {
    is_prime_ideal(r, m.ideal()).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[usize]) -> BitSet {
        xs.iter().copied().collect()
    }

    fn ideal(r: &FiniteRing, xs: &[usize]) -> Ideal {
        Ideal::new(r, set(xs)).unwrap()
    }

    /// Independent oracle: scan every subset of the carrier.
    fn brute_force_ideals(r: &FiniteRing) -> Vec<BitSet> {
        (0u64..1 << r.size())
            .map(BitSet::from_mask)
            .filter(|s| is_ideal(r, s).is_ok())
            .collect()
    }

    #[test]
    fn zmod_constructor() {
        let z1 = zmod(1).unwrap();
        assert_eq!(z1.zero(), z1.one());
        assert_eq!(zmod(6).unwrap().mul(2, 3), 0);
        assert_eq!(zmod(4).unwrap().mul(2, 2), 0);
        assert_eq!(zmod(0), Err(Error::ZeroModulus));
    }

    #[test]
    fn validate_accepts_zero_ring_tables() {
        let raw = RawRing { size: 1, add: vec![vec![0]], mul: vec![vec![0]], zero: 0, one: 0 };
        let r = validate_ring(&raw, true).unwrap();
        assert_eq!(r.size(), 1);
    }

    #[test]
    fn validate_rejects_patched_multiplication() {
        let mut raw = zmod(4).unwrap().to_raw();
        raw.mul[2][2] = 1;
        let Err(Error::Axioms(v)) = validate_ring(&raw, true) else {
            panic!("patched table accepted");
        };
        let d = v.iter().find(|v| v.axiom == Axiom::NotDistributive).expect("distributivity violated");
        let (a, b, c) = (d.witness[0], d.witness[1], d.witness[2]);
        let m = &raw.mul;
        let add = |x: usize, y: usize| (x + y) % 4;
        assert!(m[a][add(b, c)] != add(m[a][b], m[a][c]) || m[add(b, c)][a] != add(m[b][a], m[c][a]));
    }

    #[test]
    fn validate_shape_and_closure() {
        let raw = RawRing { size: 2, add: vec![vec![0, 1]], mul: vec![vec![0, 0], vec![0, 1]], zero: 0, one: 1 };
        assert!(matches!(validate_ring(&raw, true), Err(Error::BadShape(_))));
        let raw = RawRing {
            size: 2,
            add: vec![vec![0, 1], vec![1, 2]],
            mul: vec![vec![0, 0], vec![0, 1]],
            zero: 0,
            one: 1,
        };
        let Err(Error::Axioms(v)) = validate_ring(&raw, true) else { panic!() };
        assert_eq!(v[0].axiom, Axiom::NotClosed);
        assert_eq!(v[0].witness, vec![1, 1]);
    }

    #[test]
    fn validate_commutativity_flag() {
        // Upper triangular 2x2 matrices over zmod(2) are noncommutative.
        let mats: Vec<[usize; 3]> = (0..8).map(|m| [m & 1, (m >> 1) & 1, (m >> 2) & 1]).collect();
        let idx = |m: [usize; 3]| m[0] | m[1] << 1 | m[2] << 2;
        let add: Vec<Vec<usize>> = (0..8)
            .map(|a| (0..8).map(|b| idx([0, 1, 2].map(|k| (mats[a][k] + mats[b][k]) % 2))).collect())
            .collect();
        // [[x, y], [0, z]]
        let mul: Vec<Vec<usize>> = (0..8)
            .map(|a| {
                (0..8)
                    .map(|b| {
                        let ([x, y, z], [u, v, w]) = (mats[a], mats[b]);
                        idx([(x * u) % 2, (x * v + y * w) % 2, (z * w) % 2])
                    })
                    .collect()
            })
            .collect();
        let raw = RawRing { size: 8, add, mul, zero: 0, one: idx([1, 0, 1]) };
        let r = validate_ring(&raw, false).unwrap();
        assert!(!r.is_commutative());
        let Err(Error::Axioms(v)) = validate_ring(&raw, true) else { panic!() };
        assert_eq!(v[0].axiom, Axiom::NotCommutative);
        // Two-sided ideal enumeration still matches brute force.
        let found: Vec<BitSet> = enumerate_ideals(&r, &Guards::default())
            .unwrap()
            .into_iter()
            .map(|i| i.members().clone())
            .collect();
        assert_eq!(found, brute_force_ideals(&r));
    }

    #[test]
    fn product_constructor() {
        let g = Guards::default();
        let z2 = zmod(2).unwrap();
        let z3 = zmod(3).unwrap();
        let p = product_ring(&z2, &z3, &g).unwrap();
        assert!(ring_iso_search(&zmod(6).unwrap(), &p).is_some());
        let r = zmod(5).unwrap();
        let q = product_ring(&FiniteRing::zero_ring(), &r, &g).unwrap();
        assert_eq!(q, r);
        let klein = product_ring(&z2, &z2, &g).unwrap();
        assert_eq!(klein.size(), 4);
        assert!(ring_iso_search(&zmod(4).unwrap(), &klein).is_none());
        let tight = Guards { max_sections: 5, ..g };
        assert!(matches!(product_ring(&z2, &z3, &tight), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn ideal_examples() {
        let r = zmod(6).unwrap();
        assert!(is_ideal(&r, &set(&[0])).is_ok());
        assert!(is_ideal(&r, &r.full_set()).is_ok());
        assert_eq!(is_ideal(&r, &set(&[0, 1])), Err(IdealFailure::NotClosedUnderAdd(1, 1)));
        assert_eq!(is_ideal(&r, &set(&[1])), Err(IdealFailure::MissingZero));
    }

    #[test]
    fn products_of_ideals() {
        let r = zmod(6).unwrap();
        let p = ideal_gen_by_prod(&r, &ideal(&r, &[0, 2, 4]), &ideal(&r, &[0, 3]));
        assert_eq!(p.members(), &set(&[0]));
        let i = ideal(&r, &[0, 3]);
        assert_eq!(ideal_gen_by_prod(&r, &Ideal::whole(&r), &i), i);
        let r4 = zmod(4).unwrap();
        let two = ideal(&r4, &[0, 2]);
        assert_eq!(ideal_gen_by_prod(&r4, &two, &two).members(), &set(&[0]));
    }

    #[test]
    fn sums_of_ideals() {
        let r = zmod(6).unwrap();
        let s = sum_of_ideals(&r, &[ideal(&r, &[0, 3]), ideal(&r, &[0, 2, 4])]).unwrap();
        assert_eq!(s, Ideal::whole(&r));
        assert_eq!(sum_of_ideals(&r, &[Ideal::zero(&r)]).unwrap(), Ideal::zero(&r));
        assert_eq!(sum_of_ideals(&r, &[]), Err(Error::EmptyFamily));
    }

    #[test]
    fn prime_examples() {
        let r = zmod(6).unwrap();
        assert!(is_prime_ideal(&r, &ideal(&r, &[0, 3])).is_ok());
        assert_eq!(is_prime_ideal(&r, &Ideal::zero(&r)), Err(PrimeFailure::NotAbsorbent(2, 3)));
        assert_eq!(is_prime_ideal(&r, &Ideal::whole(&r)), Err(PrimeFailure::NotProper));
    }

    #[test]
    fn maximal_examples() {
        let g = Guards::default();
        let r = zmod(6).unwrap();
        let found: Vec<BitSet> = enumerate_ideals(&r, &g).unwrap().into_iter().map(|i| i.0).collect();
        assert_eq!(found, vec![set(&[0]), set(&[0, 3]), set(&[0, 2, 4]), r.full_set()]);
        assert!(is_maximal_ideal(&r, &ideal(&r, &[0, 2, 4]), &g).unwrap());
        let r4 = zmod(4).unwrap();
        assert!(!is_maximal_ideal(&r4, &Ideal::zero(&r4), &g).unwrap());
        assert!(!is_maximal_ideal(&r4, &Ideal::whole(&r4), &g).unwrap());
    }

    #[test]
    fn prime_enumeration() {
        let g = Guards::default();
        let primes = |n| -> Vec<BitSet> {
            enumerate_prime_ideals(&zmod(n).unwrap(), &g)
                .unwrap()
                .into_iter()
                .map(|p| p.members().clone())
                .collect()
        };
        assert_eq!(primes(6), vec![set(&[0, 3]), set(&[0, 2, 4])]);
        assert_eq!(primes(4), vec![set(&[0, 2])]);
        assert!(primes(1).is_empty());
    }

    #[test]
    fn enumeration_guard() {
        let tight = Guards { max_subsets: 3, ..Guards::default() };
        assert!(matches!(
            enumerate_ideals(&zmod(6).unwrap(), &tight),
            Err(Error::SizeGuard { .. })
        ));
    }

    #[test]
    fn complements() {
        let g = Guards::default();
        for (n, expect) in [(6, vec![1, 3, 5]), (4, vec![1, 3])] {
            let r = zmod(n).unwrap();
            let primes = enumerate_prime_ideals(&r, &g).unwrap();
            let p = primes.iter().find(|p| p.contains(2)).unwrap();
            assert_eq!(complement_submonoid(&r, p).members(), &set(&expect));
        }
    }

    #[test]
    fn hom_examples() {
        let r6 = zmod(6).unwrap();
        let r3 = zmod(3).unwrap();
        assert!(check_ring_hom(&(0..6).collect::<Vec<_>>(), &r6, &r6).is_ok());
        assert!(check_ring_hom(&(0..6).map(|x| x % 3).collect::<Vec<_>>(), &r6, &r3).is_ok());
        let r4 = zmod(4).unwrap();
        assert_eq!(
            check_ring_hom(&(0..4).map(|x| (x + 1) % 4).collect::<Vec<_>>(), &r4, &r4),
            Err(HomFailure::Zero)
        );
        // x ↦ x² fixes 0 and 1 but is not additive.
        assert!(matches!(
            check_ring_hom(&(0..4).map(|x| x * x % 4).collect::<Vec<_>>(), &r4, &r4),
            Err(HomFailure::Add(..))
        ));
    }

    #[test]
    fn iso_search_identity() {
        let r = zmod(8).unwrap();
        assert_eq!(ring_iso_search(&r, &r), Some(RingHom::identity(&r)));
    }

    #[test]
    fn local_rings() {
        let g = Guards::default();
        let m = is_local_ring(&zmod(4).unwrap(), &g).unwrap().unwrap();
        assert_eq!(m.members(), &set(&[0, 2]));
        assert!(is_local_ring(&zmod(6).unwrap(), &g).unwrap().is_none());
        let m = is_local_ring(&zmod(7).unwrap(), &g).unwrap().unwrap();
        assert_eq!(m.members(), &set(&[0]));
        assert!(is_local_ring(&FiniteRing::zero_ring(), &g).unwrap().is_none());
    }

    #[test]
    fn local_homs() {
        let g = Guards::default();
        let r4 = zmod(4).unwrap();
        let r2 = zmod(2).unwrap();
        assert!(is_local_hom(&RingHom::identity(&r4), &r4, &r4, &g).unwrap());
        let red = RingHom::new((0..4).map(|x| x % 2).collect(), &r4, &r2).unwrap();
        assert!(is_local_hom(&red, &r4, &r2, &g).unwrap());
        let r3 = zmod(3).unwrap();
        assert!(is_local_hom(&RingHom::identity(&r3), &r3, &r3, &g).unwrap());
        let r6 = zmod(6).unwrap();
        let red = RingHom::new((0..6).map(|x| x % 2).collect(), &r6, &r2).unwrap();
        assert_eq!(is_local_hom(&red, &r6, &r2, &g), Err(Error::NotLocalRing));
    }

    #[test]
    fn maximal_ideals_are_prime() {
        let g = Guards::default();
        for (n, m) in [(6, vec![0, 2, 4]), (4, vec![0, 2]), (5, vec![0])] {
            let r = zmod(n).unwrap();
            let m = MaximalIdeal::new(&r, ideal(&r, &m), &g).unwrap();
            assert!(max_ideal_is_prime(&r, &m));
        }
    }

    #[test]
    fn relabel_round_trip() {
        let r = zmod(9).unwrap();
        let perm: Vec<usize> = (0..9).map(|x| (x * 4 + 3) % 9).collect();
        let s = r.relabel(&perm);
        let h = RingHom::new(perm, &r, &s).unwrap();
        assert!(h.is_bijective());
        assert!(ring_iso_search(&s, &r).is_some());
    }

    #[test]
    fn ideal_enumeration_matches_brute_force() {
        let g = Guards::default();
        let z2 = zmod(2).unwrap();
        let mut rings: Vec<FiniteRing> = (1..=12).map(|n| zmod(n).unwrap()).collect();
        rings.push(product_ring(&z2, &z2, &g).unwrap());
        rings.push(product_ring(&z2, &zmod(4).unwrap(), &g).unwrap());
        for r in rings {
            let found: Vec<BitSet> = enumerate_ideals(&r, &g).unwrap().into_iter().map(|i| i.0).collect();
            assert_eq!(found, brute_force_ideals(&r), "ring of size {}", r.size());
        }
    }
}
