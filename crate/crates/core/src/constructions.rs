//! Isometries and shifts with prescribed geometry.
//!
//! A shift with wandering set `M` on a carrier `C` lays the basis of `C` out
//! in rows: the elements of `M` head the rows and the rest of `C` is dealt
//! into the rows by a pairing `rows × ℕ → ℕ`, increasing enumeration
//! throughout. The shift moves every basis vector one step along its row.
//! With finitely many rows the pairing is row-major and the map is
//! piecewise affine; infinitely many rows need the Cantor pairing and give a
//! [`PrefixOperator`].

use std::collections::BTreeMap;

use thiserror::Error;

use crate::index_arith::IndexSet;
use crate::op_algebra::{
    AffinePiece, Coefficient, ColumnAccess, Line, Operator, PairingShift, PartialInjection,
    PrefixOperator, PrefixTerm,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("the basis map must be defined on all of ℕ; {0} is missing from its domain")]
    NotTotal(u64),
    #[error("the wandering set must be nonempty")]
    EmptyWandering,
    #[error("the complement of the wandering set must be infinite")]
    FiniteComplement,
    #[error("the range of a shift must be infinite")]
    FiniteRange,
    #[error("a shift cannot have all of ℕ as its range")]
    FullRange,
    #[error("the unitary part is not contained in the range; {0} is missing")]
    UnitaryOutsideRange(u64),
    #[error("the range minus the unitary part must be infinite")]
    FiniteShiftRange,
    #[error("the range must be a proper subset of ℕ so the shift part has a wandering vector")]
    NoWanderingVector,
    #[error("the unitary map must permute its carrier: {0}")]
    NotBijective(String),
    #[error("phase at {index} must have modulus one, got {phase}")]
    BadPhase { index: u64, phase: Box<Coefficient> },
    #[error("phase index {0} lies outside the unitary carrier")]
    PhaseOutsideCarrier(u64),
    #[error("a Cuntz family needs at least two generators, got {0}")]
    TooFewGenerators(u64),
}

/// Output of a construction: exact when the map is piecewise affine,
/// pointwise otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constructed {
    Exact(Operator),
    Prefix(PrefixOperator),
}

impl Constructed {
    pub fn exact(&self) -> Option<&Operator> {
        match self {
            Constructed::Exact(op) => Some(op),
            Constructed::Prefix(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Constructed::Exact(_))
    }

    pub fn adjoint(&self) -> Constructed {
        match self {
            Constructed::Exact(op) => Constructed::Exact(op.adjoint()),
            Constructed::Prefix(op) => Constructed::Prefix(op.adjoint()),
        }
    }

    pub fn into_prefix(self) -> PrefixOperator {
        match self {
            Constructed::Exact(op) => PrefixOperator::new(op, Vec::new()),
            Constructed::Prefix(op) => op,
        }
    }
}

impl ColumnAccess for Constructed {
    fn column(&self, i: u64) -> Vec<(u64, Coefficient)> {
        match self {
            Constructed::Exact(op) => op.column(i),
            Constructed::Prefix(op) => op.column(i),
        }
    }

    fn adjoint_column(&self, i: u64) -> Vec<(u64, Coefficient)> {
        match self {
            Constructed::Exact(op) => op.adjoint_column(i),
            Constructed::Prefix(op) => op.adjoint_column(i),
        }
    }
}

/// The isometry `e_i ↦ e_{f(i)}` of a total injective basis map.
pub fn build_basis_isometry(map: &PartialInjection) -> Result<Operator, ConstructionError> {
    if let Some(missing) = map.domain().complement().first() {
        return Err(ConstructionError::NotTotal(missing));
    }
    Ok(Operator::from_map(map.clone()))
}

/// The row-major shift on `carrier` with finite wandering set `wandering`.
/// `carrier \ wandering` must be infinite and `wandering ⊆ carrier`.
fn finite_shift_map(carrier: &IndexSet, wandering: &IndexSet) -> PartialInjection {
    let rest = carrier.difference(wandering);
    let heads = wandering.elements_below(u64::MAX);
    let m = heads.len() as u64;
    let at = |t: u64| rest.element_at(t).expect("rest is infinite");
    let point = |i: u64, j: u64| {
        AffinePiece::new(IndexSet::finite([i]), Line::translation(j as i64 - i as i64))
    };

    let mut pieces: Vec<AffinePiece> = heads
        .iter()
        .enumerate()
        .map(|(r, &i)| point(i, at(r as u64)))
        .collect();
    let tail = rest.tail_start();
    for c in rest.elements_below(tail) {
        let t = rest.rank_of(c).expect("member");
        pieces.push(point(c, at(t + m)));
    }
    let modulus = rest.modulus();
    for &r in rest.residues() {
        // first member of the class at or beyond the tail
        let c0 = if r >= tail % modulus {
            tail - tail % modulus + r
        } else {
            tail - tail % modulus + modulus + r
        };
        let t = rest.rank_of(c0).expect("tail members belong to the set");
        let delta = at(t + m) - c0;
        let domain = IndexSet::residue_class(r, modulus).intersection(&IndexSet::at_least(tail));
        pieces.push(AffinePiece::new(domain, Line::translation(delta as i64)));
    }
    PartialInjection::validate(pieces).expect("row-major shift is a valid injection")
}

/// A shift on the coordinate subspace `carrier` whose wandering set is
/// `wandering`; zero off the carrier.
pub fn shift_on(carrier: &IndexSet, wandering: &IndexSet) -> Result<Constructed, ConstructionError> {
    if wandering.is_empty() {
        return Err(ConstructionError::EmptyWandering);
    }
    debug_assert!(wandering.is_subset(carrier));
    if carrier.difference(wandering).is_finite() {
        return Err(ConstructionError::FiniteComplement);
    }
    if wandering.is_finite() {
        return Ok(Constructed::Exact(Operator::from_map(finite_shift_map(
            carrier, wandering,
        ))));
    }
    let shift = PairingShift::new(carrier.clone(), wandering.clone())
        .expect("shape checked above");
    Ok(Constructed::Prefix(PrefixOperator::new(
        Operator::zero(),
        vec![PrefixTerm {
            coeff: Coefficient::one(),
            shift,
            adjoint: false,
        }],
    )))
}

/// A shift on ℕ whose wandering space is spanned by `wandering`.
pub fn make_shift_with_wandering(wandering: &IndexSet) -> Result<Constructed, ConstructionError> {
    shift_on(&IndexSet::naturals(), wandering)
}

/// A shift on ℕ whose range is spanned by `range`.
pub fn make_shift_with_range(range: &IndexSet) -> Result<Constructed, ConstructionError> {
    if range.is_finite() {
        return Err(ConstructionError::FiniteRange);
    }
    if range.is_naturals() {
        return Err(ConstructionError::FullRange);
    }
    make_shift_with_wandering(&range.complement())
}

/// A unitary on a coordinate subspace: a bijection of `carrier` with
/// unimodular phases at finitely many points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitarySpec {
    carrier: IndexSet,
    map: PartialInjection,
    phases: BTreeMap<u64, Coefficient>,
}

impl UnitarySpec {
    pub fn new(
        map: PartialInjection,
        phases: BTreeMap<u64, Coefficient>,
    ) -> Result<Self, ConstructionError> {
        let carrier = map.domain();
        let image = map.image();
        if image != carrier {
            let witness = image
                .difference(&carrier)
                .union(&carrier.difference(&image))
                .first()
                .expect("sets differ");
            return Err(ConstructionError::NotBijective(format!(
                "domain and image differ at {witness}"
            )));
        }
        for (&index, phase) in &phases {
            if !carrier.contains(index) {
                return Err(ConstructionError::PhaseOutsideCarrier(index));
            }
            if phase.norm_sqr() != num_rational::BigRational::from_integer(1.into()) {
                return Err(ConstructionError::BadPhase {
                    index,
                    phase: Box::new(phase.clone()),
                });
            }
        }
        Ok(UnitarySpec {
            carrier,
            map,
            phases,
        })
    }

    pub fn identity_on(carrier: IndexSet) -> Self {
        UnitarySpec {
            map: PartialInjection::identity_on(carrier.clone()),
            carrier,
            phases: BTreeMap::new(),
        }
    }

    pub fn carrier(&self) -> &IndexSet {
        &self.carrier
    }

    pub fn map(&self) -> &PartialInjection {
        &self.map
    }

    pub fn phases(&self) -> &BTreeMap<u64, Coefficient> {
        &self.phases
    }

    /// `e_i ↦ phase(i)·e_{f(i)}` on the carrier, zero elsewhere.
    pub fn to_operator(&self) -> Operator {
        let twisted = IndexSet::finite(self.phases.keys().copied());
        let mut terms = vec![(Coefficient::one(), self.map.restrict(&twisted.complement()))];
        for (&i, c) in &self.phases {
            terms.push((c.clone(), self.map.restrict(&IndexSet::finite([i]))));
        }
        Operator::from_terms(terms)
    }
}

/// An isometry with unitary part `unitary` and range `range`: the unitary on
/// its carrier, plus a shift on the remaining indices whose range is
/// `range \ carrier`.
pub fn make_isometry_with_parts(
    unitary: &UnitarySpec,
    range: &IndexSet,
) -> Result<Constructed, ConstructionError> {
    let ku = unitary.carrier();
    if let Some(missing) = ku.difference(range).first() {
        return Err(ConstructionError::UnitaryOutsideRange(missing));
    }
    if range.difference(ku).is_finite() {
        return Err(ConstructionError::FiniteShiftRange);
    }
    if range.is_naturals() {
        return Err(ConstructionError::NoWanderingVector);
    }
    let shift = shift_on(&ku.complement(), &range.complement())?;
    let u = unitary.to_operator();
    Ok(match shift {
        Constructed::Exact(op) => Constructed::Exact(u.add(&op)),
        Constructed::Prefix(op) => {
            let exact = u.add(op.exact_part());
            Constructed::Prefix(PrefixOperator::new(exact, op.shift_terms().to_vec()))
        }
    })
}

/// Generators `S_r: e_i ↦ e_{n·i + r}`, `r = 0..n`.
pub fn make_cuntz(n: u64) -> Result<Vec<Operator>, ConstructionError> {
    if n < 2 {
        return Err(ConstructionError::TooFewGenerators(n));
    }
    Ok((0..n)
        .map(|r| Operator::from_map(PartialInjection::affine(n, r)))
        .collect())
}
