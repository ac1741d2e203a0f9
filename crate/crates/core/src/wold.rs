//! Wold decomposition of isometries given by basis maps.
//!
//! For `V e_i = c·e_{f(i)}` the unitary part is spanned by the indices whose
//! backward orbit `i, f⁻¹(i), f⁻²(i), …` never leaves the range of `f`, and
//! the wandering space by the indices outside the range.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::index_arith::{Cardinality, IndexSet};
use crate::op_algebra::{Classification, ColumnAccess, Operator, PartialInjection, PrefixOperator};

/// Default prefix bound for pointwise certificates.
pub const DEFAULT_BOUND: u64 = 4096;

const MAX_CHAIN_STEPS: usize = 64;
const CHAIN_MODULUS_LIMIT: u64 = 1 << 14;
const ORBIT_SAMPLE: u64 = 2048;
const ORBIT_STEP_CAP: usize = 4096;
const MAX_FIT_PERIOD: u64 = 128;
const MAX_PURITY_POWER: u32 = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WoldError {
    #[error("operator is not a scalar multiple of an isometry (column {witness} fails)")]
    NotIsometry { witness: u64 },
    #[error("operator is zero")]
    Zero,
    #[error("column {column} has {entries} entries; only basis maps e_i ↦ c·e_f(i) are supported")]
    NotBasisMap { column: u64, entries: usize },
    #[error("columns {first} and {second} have different norms")]
    UnequalNorms { first: u64, second: u64 },
    #[error("columns {first} and {second} share row {row}")]
    SharedRow { first: u64, second: u64, row: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Certificate {
    Exact,
    /// Verified for every index below the bound.
    Prefix(u64),
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Exact => write!(f, "exact"),
            Certificate::Prefix(n) => write!(f, "prefix({n})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Multiplicity {
    Finite(u64),
    Infinite,
    /// Lower bound from a prefix certificate.
    AtLeast(u64),
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(n) => write!(f, "{n}"),
            Multiplicity::Infinite => write!(f, "countably infinite"),
            Multiplicity::AtLeast(n) => write!(f, "at least {n}"),
        }
    }
}

/// `ℕ = unitary ⊔ shift`, with `wandering ⊆ shift`. Under a prefix
/// certificate every set is the truncation to indices below the bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WoldResult {
    pub unitary: IndexSet,
    pub shift: IndexSet,
    pub wandering: IndexSet,
    pub multiplicity: Multiplicity,
    pub certificate: Certificate,
}

fn multiplicity_of(wandering: &IndexSet) -> Multiplicity {
    match wandering.cardinality() {
        Cardinality::Finite(n) => Multiplicity::Finite(n),
        Cardinality::Infinite { .. } => Multiplicity::Infinite,
    }
}

/// The basis map of a monomial operator, after checking it is a nonzero
/// multiple of an isometry.
fn basis_map(op: &Operator) -> Result<PartialInjection, WoldError> {
    match op.classify() {
        Classification::Zero => return Err(WoldError::Zero),
        Classification::Other { witness } => return Err(WoldError::NotIsometry { witness }),
        _ => {}
    }
    match op.support_map() {
        Some(f) if f.is_total() => Ok(f),
        _ => {
            let column = (0..)
                .find(|&i| op.apply(i).len() != 1)
                .expect("a non-monomial isometry has a column with several entries");
            Err(WoldError::NotBasisMap {
                column,
                entries: op.apply(column).len(),
            })
        }
    }
}

/// Decomposes a monomial isometry multiple. The result is exact when the
/// range chain stabilises or a periodic guess for the unitary part can be
/// verified symbolically; otherwise it is certified below `bound`.
pub fn wold_decompose(op: &Operator, bound: u64) -> Result<WoldResult, WoldError> {
    let f = basis_map(op)?;
    let wandering = f.image().complement();
    let unitary = fitted_unitary_part(&f).or_else(|| range_chain_limit(&f));
    match unitary {
        Some(unitary) => Ok(WoldResult {
            shift: unitary.complement(),
            unitary,
            multiplicity: multiplicity_of(&wandering),
            wandering,
            certificate: Certificate::Exact,
        }),
        None => {
            let inv = f.inverse();
            Ok(pointwise(|j| inv.eval(j), bound))
        }
    }
}

/// Pointwise decomposition of a constructed operator below `bound`.
pub fn wold_decompose_prefix(op: &PrefixOperator, bound: u64) -> Result<WoldResult, WoldError> {
    if op.shift_terms().is_empty() {
        return wold_decompose(op.exact_part(), bound);
    }
    check_bounded_isometry(op, bound)?;
    Ok(pointwise(|j| op.backward_index(j), bound))
}

/// Checks that columns below `bound` are single entries of equal modulus in
/// distinct rows.
pub fn check_bounded_isometry(op: &impl ColumnAccess, bound: u64) -> Result<BigRational, WoldError> {
    let mut norm: Option<BigRational> = None;
    let mut rows: HashMap<u64, u64> = HashMap::new();
    for i in 0..bound {
        let col = op.column(i);
        if col.len() != 1 {
            if col.is_empty() {
                return Err(WoldError::NotIsometry { witness: i });
            }
            return Err(WoldError::NotBasisMap {
                column: i,
                entries: col.len(),
            });
        }
        let (row, c) = &col[0];
        match &norm {
            None => norm = Some(c.norm_sqr()),
            Some(n) if *n != c.norm_sqr() => {
                return Err(WoldError::UnequalNorms { first: 0, second: i })
            }
            _ => {}
        }
        if let Some(first) = rows.insert(*row, i) {
            return Err(WoldError::SharedRow {
                first,
                second: i,
                row: *row,
            });
        }
    }
    Ok(norm.unwrap_or_else(BigRational::one))
}

/// Stabilisation of `ℕ ⊇ f(ℕ) ⊇ f²(ℕ) ⊇ …`, if it happens quickly.
fn range_chain_limit(f: &PartialInjection) -> Option<IndexSet> {
    let max_slope = f.pieces().iter().map(|p| p.line().a()).max().unwrap_or(1);
    let mut cur = IndexSet::naturals();
    for _ in 0..MAX_CHAIN_STEPS {
        if cur.modulus().saturating_mul(max_slope) > CHAIN_MODULUS_LIMIT {
            return None;
        }
        let next = f.image_of(&cur);
        if next == cur {
            return Some(cur);
        }
        cur = next;
    }
    None
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Orbit {
    /// Backward orbit leaves the range: shift part.
    Exits,
    /// Backward orbit is periodic or was not seen to exit.
    Stays,
}

/// Orbit verdicts for `0..n`, sharing work between indices on one orbit.
/// An orbit not seen to exit within `cap` steps counts as staying.
fn orbit_verdicts(back: impl Fn(u64) -> Option<u64>, n: u64, cap: usize) -> Vec<Orbit> {
    let mut memo: HashMap<u64, Orbit> = HashMap::new();
    (0..n)
        .map(|i| {
            let mut path = vec![i];
            let mut cur = i;
            let verdict = loop {
                if let Some(&v) = memo.get(&cur) {
                    break v;
                }
                match back(cur) {
                    None => break Orbit::Exits,
                    Some(j) if j == i => break Orbit::Stays,
                    Some(_) if path.len() >= cap => break Orbit::Stays,
                    Some(j) => {
                        path.push(j);
                        cur = j;
                    }
                }
            };
            for p in path {
                memo.insert(p, verdict);
            }
            verdict
        })
        .collect()
}

/// Guesses the unitary part from backward orbits of small indices and
/// verifies the guess: it must be invariant and `f` must be a pure shift on
/// its complement.
fn fitted_unitary_part(f: &PartialInjection) -> Option<IndexSet> {
    let inv = f.inverse();
    // a short sample settles most maps; the long one catches late periodicity
    for sample in [ORBIT_SAMPLE / 8, ORBIT_SAMPLE] {
        let stays: Vec<bool> = orbit_verdicts(|j| inv.eval(j), sample, ORBIT_STEP_CAP)
            .into_iter()
            .map(|v| v == Orbit::Stays)
            .collect();
        for candidate in periodic_fits(&stays) {
            if f.image_of(&candidate) != candidate {
                continue;
            }
            if is_pure_shift(&f.restrict(&candidate.complement())) {
                return Some(candidate);
            }
        }
    }
    None
}

/// Eventually periodic sets agreeing with `bits`, smallest period first.
fn periodic_fits(bits: &[bool]) -> impl Iterator<Item = IndexSet> + '_ {
    let n = bits.len() as u64;
    (1..=MAX_FIT_PERIOD.min(n / 4)).filter_map(move |period| {
        // earliest tail start from which the pattern repeats with `period`
        let mut start = n - period;
        while start > 0 && bits[(start - 1) as usize] == bits[(start - 1 + period) as usize] {
            start -= 1;
        }
        if start > n / 2 {
            return None;
        }
        let residues: Vec<u64> = (start..start + period)
            .filter(|&x| bits[x as usize])
            .map(|x| x % period)
            .collect();
        let overrides: Vec<(u64, bool)> = (0..start).map(|x| (x, bits[x as usize])).collect();
        Some(IndexSet::from_parts(period, residues, overrides))
    })
}

/// True when `g^p(i) > i` on the domain for some `p = 2^k ≤ MAX_PURITY_POWER`;
/// then every backward orbit strictly decreases and `g` has no unitary part.
/// Squaring suffices: if `g^p` increases, so does every `g^(mp)`.
fn is_pure_shift(g: &PartialInjection) -> bool {
    if g.is_empty() {
        return true;
    }
    let mut power = g.clone();
    let mut p = 1;
    loop {
        let increasing = power
            .pieces()
            .iter()
            .all(|piece| piece.domain().is_disjoint(&piece.line().non_increasing_set()));
        if increasing {
            return true;
        }
        if p >= MAX_PURITY_POWER {
            return false;
        }
        power = power.compose(&power);
        p *= 2;
    }
}

fn pointwise(back: impl Fn(u64) -> Option<u64>, bound: u64) -> WoldResult {
    let wandering: Vec<u64> = (0..bound).filter(|&j| back(j).is_none()).collect();
    let unitary: Vec<u64> = orbit_verdicts(&back, bound, ORBIT_STEP_CAP * 16)
        .into_iter()
        .zip(0..)
        .filter(|(v, _)| *v == Orbit::Stays)
        .map(|(_, i)| i)
        .collect();
    let unitary = IndexSet::finite(unitary);
    let count = wandering.len() as u64;
    WoldResult {
        shift: IndexSet::below(bound).difference(&unitary),
        unitary,
        wandering: IndexSet::finite(wandering),
        multiplicity: Multiplicity::AtLeast(count),
        certificate: Certificate::Prefix(bound),
    }
}

/// `dim(H ⊖ AH)` for a nonzero isometry multiple, computed as the trace of
/// the range complement projection `I − AA*/‖A‖²`.
pub fn multiplicity(op: &Operator) -> Result<Multiplicity, WoldError> {
    let norm_sqr = match op.classify() {
        Classification::Zero => return Err(WoldError::Zero),
        Classification::Other { witness } => return Err(WoldError::NotIsometry { witness }),
        c => c.norm_sqr().expect("isometry multiples have a norm"),
    };
    let scale = crate::op_algebra::Coefficient::from_real(BigRational::one() / norm_sqr);
    let projection = Operator::identity().sub(&op.mul(&op.adjoint()).scale(&scale));
    Ok(match projection.finite_trace() {
        None => Multiplicity::Infinite,
        Some(t) => {
            let n: BigInt = t.as_integer().expect("trace of a projection is an integer");
            debug_assert!(!n.is_zero() || projection.is_zero());
            Multiplicity::Finite(n.to_u64().expect("nonnegative trace"))
        }
    })
}
