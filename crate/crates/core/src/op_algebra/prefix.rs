//! Operators known only pointwise.
//!
//! A shift whose wandering set is infinite needs a bijection `ℕ × ℕ → ℕ`
//! (Cantor pairing) to lay out its rows, and the resulting index map is not
//! piecewise affine. Such operators can be evaluated column by column and
//! certified up to a finite bound, but not manipulated symbolically.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::coefficient::Coefficient;
use super::operator::{ColumnAccess, Operator};
use crate::index_arith::{IndexSet, PairingScheme};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairingShiftError {
    #[error("wandering set is not contained in the carrier")]
    NotContained,
    #[error("wandering set must be infinite for a Cantor-paired shift")]
    FiniteWandering,
    #[error("carrier minus wandering set must be infinite")]
    FiniteRest,
}

/// A shift on the coordinate subspace `carrier` whose wandering subspace is
/// spanned by the (infinite) `wandering` set.
///
/// Row `r` starts at the `r`-th element of `wandering`; its `k`-th successor
/// (`k ≥ 1`) is the element of `carrier \ wandering` at position
/// `cantor(r, k - 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairingShift {
    carrier: IndexSet,
    wandering: IndexSet,
    rest: IndexSet,
}

impl PairingShift {
    pub fn new(carrier: IndexSet, wandering: IndexSet) -> Result<Self, PairingShiftError> {
        if !wandering.is_subset(&carrier) {
            return Err(PairingShiftError::NotContained);
        }
        if wandering.is_finite() {
            return Err(PairingShiftError::FiniteWandering);
        }
        let rest = carrier.difference(&wandering);
        if rest.is_finite() {
            return Err(PairingShiftError::FiniteRest);
        }
        Ok(PairingShift {
            carrier,
            wandering,
            rest,
        })
    }

    pub fn carrier(&self) -> &IndexSet {
        &self.carrier
    }

    pub fn wandering(&self) -> &IndexSet {
        &self.wandering
    }

    fn at(&self, r: u64, k: u64) -> u64 {
        let pos = PairingScheme::Cantor.pair(r, k).expect("cantor pairing is total");
        self.rest.element_at(pos).expect("rest is infinite")
    }

    pub fn forward(&self, i: u64) -> Option<u64> {
        if let Ok(r) = self.wandering.rank_of(i) {
            return Some(self.at(r, 0));
        }
        let t = self.rest.rank_of(i).ok()?;
        let (r, k) = PairingScheme::Cantor.unpair(t).expect("cantor unpair is total");
        Some(self.at(r, k + 1))
    }

    pub fn backward(&self, j: u64) -> Option<u64> {
        let t = self.rest.rank_of(j).ok()?;
        let (r, k) = PairingScheme::Cantor.unpair(t).expect("cantor unpair is total");
        if k == 0 {
            Some(self.wandering.element_at(r).expect("wandering set is infinite"))
        } else {
            Some(self.at(r, k - 1))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrefixTerm {
    pub coeff: Coefficient,
    pub shift: PairingShift,
    /// Whether this term is the adjoint of the shift.
    pub adjoint: bool,
}

/// `exact + Σ c·(shift or shift*)`: an operator with an exact affine part
/// and pointwise-defined shift parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrefixOperator {
    exact: Operator,
    shifts: Vec<PrefixTerm>,
}

impl PrefixOperator {
    pub fn new(exact: Operator, shifts: Vec<PrefixTerm>) -> Self {
        PrefixOperator { exact, shifts }
    }

    pub fn exact_part(&self) -> &Operator {
        &self.exact
    }

    pub fn shift_terms(&self) -> &[PrefixTerm] {
        &self.shifts
    }

    pub fn adjoint(&self) -> Self {
        PrefixOperator {
            exact: self.exact.adjoint(),
            shifts: self
                .shifts
                .iter()
                .map(|t| PrefixTerm {
                    coeff: t.coeff.conj(),
                    shift: t.shift.clone(),
                    adjoint: !t.adjoint,
                })
                .collect(),
        }
    }

    /// Coordinates of `A·e_i`.
    pub fn apply(&self, i: u64) -> Vec<(u64, Coefficient)> {
        self.collect(i, false)
    }

    /// Coordinates of `A*·e_i`.
    pub fn apply_adjoint(&self, i: u64) -> Vec<(u64, Coefficient)> {
        self.collect(i, true)
    }

    fn collect(&self, i: u64, adjoint: bool) -> Vec<(u64, Coefficient)> {
        let mut out: BTreeMap<u64, Coefficient> = BTreeMap::new();
        let exact = if adjoint {
            self.exact.adjoint_column(i)
        } else {
            self.exact.apply(i)
        };
        for (j, c) in exact {
            *out.entry(j).or_insert_with(Coefficient::zero) += &c;
        }
        for t in &self.shifts {
            let backwards = t.adjoint != adjoint;
            let target = if backwards {
                t.shift.backward(i)
            } else {
                t.shift.forward(i)
            };
            if let Some(j) = target {
                let c = if adjoint { t.coeff.conj() } else { t.coeff.clone() };
                *out.entry(j).or_insert_with(Coefficient::zero) += &c;
            }
        }
        out.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Single-entry column structure `i ↦ f(i)` when every column below
    /// `bound` has at most one entry; used for pointwise Wold analysis.
    pub fn forward_index(&self, i: u64) -> Option<u64> {
        self.apply(i).first().map(|(j, _)| *j)
    }

    pub fn backward_index(&self, j: u64) -> Option<u64> {
        self.apply_adjoint(j).first().map(|(i, _)| *i)
    }
}

impl ColumnAccess for PrefixOperator {
    fn column(&self, i: u64) -> Vec<(u64, Coefficient)> {
        self.apply(i)
    }

    fn adjoint_column(&self, i: u64) -> Vec<(u64, Coefficient)> {
        self.apply_adjoint(i)
    }
}

impl fmt::Display for PrefixOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.exact)?;
        for t in &self.shifts {
            let star = if t.adjoint { "*" } else { "" };
            write!(
                f,
                " + {}·pairing-shift{}(carrier {}, wandering {})",
                t.coeff, star, t.shift.carrier, t.shift.wandering
            )?;
        }
        Ok(())
    }
}
