//! Eventually periodic subsets of ℕ.
//!
//! An [`IndexSet`] is a finite union of residue classes modulo `L`, with a
//! finite set of points added and a finite set of points removed. The class
//! is closed under union, intersection, difference and complement, and under
//! images and preimages of affine maps (see `op_algebra::line`). Every set has
//! exactly one canonical representation, so structural equality is set
//! equality.

mod pairing;

pub use pairing::PairingScheme;

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest modulus an [`IndexSet`] may carry.
pub const MAX_MODULUS: u64 = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IndexError {
    #[error("position {index} is out of range for a set with {len} elements")]
    OutOfRange { index: u64, len: u64 },
    #[error("{0} is not a member of the set")]
    NotMember(u64),
    #[error("row {row} is out of range for a row-major pairing with {rows} rows")]
    RowOutOfRange { row: u64, rows: u64 },
    #[error("row-major pairing needs at least one row")]
    NoRows,
    #[error("modulus must be between 1 and {MAX_MODULUS}, got {0}")]
    BadModulus(u64),
    #[error("residue {residue} is not below the modulus {modulus}")]
    BadResidue { residue: u64, modulus: u64 },
}

/// How many elements a set has. Infinite sets also report their natural
/// density `residues / modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cardinality {
    Finite(u64),
    Infinite { residues: u64, modulus: u64 },
}

impl Cardinality {
    pub fn is_finite(&self) -> bool {
        matches!(self, Cardinality::Finite(_))
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Finite(n) => write!(f, "{n}"),
            Cardinality::Infinite { residues, modulus } => {
                write!(f, "countably infinite (density {residues}/{modulus})")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersection,
    Difference,
    ComplementOfFirst,
}

/// `({aL + r : a ≥ 0, r ∈ residues} ∪ added) \ removed`, in canonical form.
///
/// Canonical form: `modulus` is the minimal period of the progression part,
/// `added` is disjoint from the progression part and `removed` is contained
/// in it. Field order doubles as the canonical sort key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "IndexSetRepr", into = "IndexSetRepr")]
pub struct IndexSet {
    modulus: u64,
    residues: Vec<u64>,
    added: Vec<u64>,
    removed: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct IndexSetRepr {
    #[serde(rename = "mod")]
    modulus: u64,
    res: Vec<u64>,
    plus: Vec<u64>,
    minus: Vec<u64>,
}

impl TryFrom<IndexSetRepr> for IndexSet {
    type Error = IndexError;

    fn try_from(r: IndexSetRepr) -> Result<Self, Self::Error> {
        IndexSet::try_new(r.modulus, r.res, r.plus, r.minus)
    }
}

impl From<IndexSet> for IndexSetRepr {
    fn from(s: IndexSet) -> Self {
        IndexSetRepr {
            modulus: s.modulus,
            res: s.residues,
            plus: s.added,
            minus: s.removed,
        }
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn minimal_period(pattern: &[bool]) -> usize {
    let mut len = pattern.len();
    for p in prime_factors(len as u64) {
        let p = p as usize;
        while len.is_multiple_of(p) {
            let cand = len / p;
            if (0..len).all(|x| pattern[x] == pattern[x % cand]) {
                len = cand;
            } else {
                break;
            }
        }
    }
    len
}

fn check_modulus(modulus: u64) -> Result<(), IndexError> {
    if modulus == 0 || modulus > MAX_MODULUS {
        Err(IndexError::BadModulus(modulus))
    } else {
        Ok(())
    }
}

impl IndexSet {
    /// Builds the canonical set whose progression part is `residues (mod
    /// modulus)`, then applies `overrides` point by point (later entries win).
    ///
    /// Panics if `modulus` is zero or exceeds [`MAX_MODULUS`].
    pub fn from_parts(
        modulus: u64,
        residues: impl IntoIterator<Item = u64>,
        overrides: impl IntoIterator<Item = (u64, bool)>,
    ) -> IndexSet {
        check_modulus(modulus).expect("index set modulus out of supported range");
        let mut pattern = vec![false; modulus as usize];
        for r in residues {
            pattern[(r % modulus) as usize] = true;
        }
        let period = minimal_period(&pattern);
        pattern.truncate(period);
        let modulus = period as u64;
        let points: BTreeMap<u64, bool> = overrides.into_iter().collect();
        let mut added = Vec::new();
        let mut removed = Vec::new();
        for (x, member) in points {
            let in_prog = pattern[(x % modulus) as usize];
            match (member, in_prog) {
                (true, false) => added.push(x),
                (false, true) => removed.push(x),
                _ => {}
            }
        }
        let residues = (0..modulus).filter(|&r| pattern[r as usize]).collect();
        IndexSet {
            modulus,
            residues,
            added,
            removed,
        }
    }

    /// Validating constructor for external input; `removed` wins over `added`.
    pub fn try_new(
        modulus: u64,
        residues: Vec<u64>,
        added: Vec<u64>,
        removed: Vec<u64>,
    ) -> Result<IndexSet, IndexError> {
        check_modulus(modulus)?;
        if let Some(&residue) = residues.iter().find(|&&r| r >= modulus) {
            return Err(IndexError::BadResidue { residue, modulus });
        }
        let overrides = added
            .into_iter()
            .map(|x| (x, true))
            .chain(removed.into_iter().map(|x| (x, false)));
        Ok(IndexSet::from_parts(modulus, residues, overrides))
    }

    pub fn empty() -> IndexSet {
        IndexSet::from_parts(1, [], [])
    }

    pub fn naturals() -> IndexSet {
        IndexSet::from_parts(1, [0], [])
    }

    pub fn finite(points: impl IntoIterator<Item = u64>) -> IndexSet {
        IndexSet::from_parts(1, [], points.into_iter().map(|x| (x, true)))
    }

    /// `{i : i ≡ residue (mod modulus)}`.
    pub fn residue_class(residue: u64, modulus: u64) -> IndexSet {
        IndexSet::from_parts(modulus, [residue % modulus], [])
    }

    pub fn progression(modulus: u64, residues: impl IntoIterator<Item = u64>) -> IndexSet {
        IndexSet::from_parts(modulus, residues, [])
    }

    /// `{i : i ≥ n}`.
    pub fn at_least(n: u64) -> IndexSet {
        IndexSet::from_parts(1, [0], (0..n).map(|x| (x, false)))
    }

    /// `{i : i < n}`.
    pub fn below(n: u64) -> IndexSet {
        IndexSet::finite(0..n)
    }

    pub fn evens() -> IndexSet {
        IndexSet::residue_class(0, 2)
    }

    pub fn odds() -> IndexSet {
        IndexSet::residue_class(1, 2)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn added(&self) -> &[u64] {
        &self.added
    }

    pub fn removed(&self) -> &[u64] {
        &self.removed
    }

    /// True iff `i` lies in the residue part, ignoring exceptions.
    pub fn in_progression(&self, i: u64) -> bool {
        self.residues.binary_search(&(i % self.modulus)).is_ok()
    }

    pub fn contains(&self, i: u64) -> bool {
        if self.in_progression(i) {
            self.removed.binary_search(&i).is_err()
        } else {
            self.added.binary_search(&i).is_ok()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty() && self.added.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn is_naturals(&self) -> bool {
        self.modulus == 1 && !self.residues.is_empty() && self.removed.is_empty()
    }

    pub fn cardinality(&self) -> Cardinality {
        if self.residues.is_empty() {
            Cardinality::Finite(self.added.len() as u64)
        } else {
            let g = (self.residues.len() as u64).gcd(&self.modulus);
            Cardinality::Infinite {
                residues: self.residues.len() as u64 / g,
                modulus: self.modulus / g,
            }
        }
    }

    /// Smallest integer beyond every exceptional point; from here on the set
    /// is purely periodic.
    pub fn tail_start(&self) -> u64 {
        let a = self.added.last().map_or(0, |x| x + 1);
        let r = self.removed.last().map_or(0, |x| x + 1);
        a.max(r)
    }

    /// The residue part with all exceptions dropped.
    pub fn progression_part(&self) -> IndexSet {
        IndexSet {
            modulus: self.modulus,
            residues: self.residues.clone(),
            added: Vec::new(),
            removed: Vec::new(),
        }
    }

    pub fn first(&self) -> Option<u64> {
        self.iter().next()
    }

    /// `#{x ∈ S : x < n}`.
    pub fn count_below(&self, n: u64) -> u64 {
        let q = n / self.modulus;
        let rem = n % self.modulus;
        let prog = q * self.residues.len() as u64
            + self.residues.partition_point(|&r| r < rem) as u64;
        prog + self.added.partition_point(|&x| x < n) as u64
            - self.removed.partition_point(|&x| x < n) as u64
    }

    /// Position of `i` in the increasing enumeration of the set.
    pub fn rank_of(&self, i: u64) -> Result<u64, IndexError> {
        if !self.contains(i) {
            return Err(IndexError::NotMember(i));
        }
        Ok(self.count_below(i))
    }

    /// The `k`-th element (from zero) in increasing order.
    pub fn element_at(&self, k: u64) -> Result<u64, IndexError> {
        if self.residues.is_empty() {
            return self
                .added
                .get(k as usize)
                .copied()
                .ok_or(IndexError::OutOfRange {
                    index: k,
                    len: self.added.len() as u64,
                });
        }
        let per = self.residues.len() as u64;
        let need = k + 1 + self.removed.len() as u64;
        let mut hi = self.modulus * (need / per + 1);
        let mut lo = 0;
        // smallest x with count_below(x + 1) > k
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.count_below(mid + 1) > k {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(lo)
    }

    /// Increasing enumeration; infinite for infinite sets.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            set: self,
            block: 0,
            slot: 0,
            next_added: 0,
            pending: None,
        }
    }

    pub fn elements_below(&self, n: u64) -> Vec<u64> {
        self.iter().take_while(|&x| x < n).collect()
    }

    fn zip_with(&self, other: &IndexSet, op: impl Fn(bool, bool) -> bool) -> IndexSet {
        let modulus = self.modulus.lcm(&other.modulus);
        let residues = (0..modulus).filter(|&x| op(self.in_progression(x), other.in_progression(x)));
        let candidates = self
            .added
            .iter()
            .chain(&self.removed)
            .chain(&other.added)
            .chain(&other.removed);
        let overrides = candidates.map(|&x| (x, op(self.contains(x), other.contains(x))));
        IndexSet::from_parts(modulus, residues, overrides.collect::<Vec<_>>())
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> IndexSet {
        IndexSet {
            modulus: self.modulus,
            residues: (0..self.modulus)
                .filter(|r| self.residues.binary_search(r).is_err())
                .collect(),
            added: self.removed.clone(),
            removed: self.added.clone(),
        }
    }

    pub fn combine(&self, other: &IndexSet, op: SetOp) -> IndexSet {
        match op {
            SetOp::Union => self.union(other),
            SetOp::Intersection => self.intersection(other),
            SetOp::Difference => self.difference(other),
            SetOp::ComplementOfFirst => self.complement(),
        }
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.intersection(other).is_empty()
    }
}

/// Increasing iterator over an [`IndexSet`].
pub struct Iter<'a> {
    set: &'a IndexSet,
    block: u64,
    slot: usize,
    next_added: usize,
    pending: Option<u64>,
}

impl Iter<'_> {
    fn next_progression(&mut self) -> Option<u64> {
        let set = self.set;
        if set.residues.is_empty() {
            return None;
        }
        loop {
            let x = self.block * set.modulus + set.residues[self.slot];
            self.slot += 1;
            if self.slot == set.residues.len() {
                self.slot = 0;
                self.block += 1;
            }
            if set.removed.binary_search(&x).is_err() {
                return Some(x);
            }
        }
    }
}

impl Iterator for Iter<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.pending.is_none() {
            self.pending = self.next_progression();
        }
        let added = self.set.added.get(self.next_added).copied();
        match (self.pending, added) {
            (Some(p), Some(a)) if a < p => {
                self.next_added += 1;
                Some(a)
            }
            (Some(p), _) => {
                self.pending = None;
                Some(p)
            }
            (None, Some(a)) => {
                self.next_added += 1;
                Some(a)
            }
            (None, None) => None,
        }
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        let mut parts = Vec::new();
        if !self.residues.is_empty() {
            if self.modulus == 1 {
                parts.push("ℕ".to_string());
            } else {
                let rs: Vec<String> = self.residues.iter().map(|r| r.to_string()).collect();
                parts.push(format!("{{{}}} mod {}", rs.join(","), self.modulus));
            }
        }
        if !self.added.is_empty() {
            let xs: Vec<String> = self.added.iter().map(|r| r.to_string()).collect();
            parts.push(format!("{{{}}}", xs.join(",")));
        }
        write!(f, "{}", parts.join(" ∪ "))?;
        if !self.removed.is_empty() {
            let xs: Vec<String> = self.removed.iter().map(|r| r.to_string()).collect();
            write!(f, " \\ {{{}}}", xs.join(","))?;
        }
        Ok(())
    }
}
