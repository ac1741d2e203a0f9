use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;

use super::coefficient::Coefficient;
use super::injection::{AffinePiece, PartialInjection};
use super::line::Line;
use super::normal_form::{normalize, GraphPiece};
use crate::index_arith::{Cardinality, IndexSet};

/// Pointwise access to the columns `A·e_i` and `A*·e_i` of an operator.
pub trait ColumnAccess {
    /// Nonzero coordinates of `A·e_i`, sorted by row.
    fn column(&self, i: u64) -> Vec<(u64, Coefficient)>;
    /// Nonzero coordinates of `A*·e_i`, sorted by row.
    fn adjoint_column(&self, i: u64) -> Vec<(u64, Coefficient)>;
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    coeff: Coefficient,
    map: PartialInjection,
}

impl Term {
    pub fn coeff(&self) -> &Coefficient {
        &self.coeff
    }

    pub fn map(&self) -> &PartialInjection {
        &self.map
    }
}

/// A finite sum `Σ c·V_f` of weighted partial injections in normal form.
///
/// Normal form: no zero coefficients, no repeated maps, terms sorted, and
/// equal operators have identical term lists. The zero operator has no terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Operator {
    terms: Vec<Term>,
}

/// Outcome of deciding whether an operator equals `λ·I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScalarTest {
    Scalar(Coefficient),
    /// `A·e_witness ≠ λ·e_witness` for the candidate `λ` read off the
    /// dominant diagonal block (zero when there is none).
    NotScalar { witness: u64 },
}

impl ScalarTest {
    pub fn scalar(&self) -> Option<&Coefficient> {
        match self {
            ScalarTest::Scalar(c) => Some(c),
            ScalarTest::NotScalar { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    Zero,
    /// `A = λ·I`, λ ≠ 0.
    Scalar(Coefficient),
    /// `A*A = AA* = μ·I`.
    UnitaryMultiple { norm_sqr: BigRational },
    /// `A*A = μ·I` but `AA*` is not scalar.
    IsometryMultiple { norm_sqr: BigRational },
    Other { witness: u64 },
}

impl Classification {
    /// `|λ|²` for every class that is a nonzero multiple of an isometry.
    pub fn norm_sqr(&self) -> Option<BigRational> {
        match self {
            Classification::Scalar(c) => Some(c.norm_sqr()),
            Classification::UnitaryMultiple { norm_sqr }
            | Classification::IsometryMultiple { norm_sqr } => Some(norm_sqr.clone()),
            _ => None,
        }
    }

    pub fn is_unitary_multiple(&self) -> bool {
        matches!(
            self,
            Classification::Scalar(_) | Classification::UnitaryMultiple { .. }
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            Classification::Zero => "zero",
            Classification::Scalar(_) => "scalar",
            Classification::UnitaryMultiple { .. } => "unitary-multiple",
            Classification::IsometryMultiple { .. } => "isometry-multiple",
            Classification::Other { .. } => "other",
        }
    }
}

fn density_key(s: &IndexSet) -> (bool, BigRational) {
    match s.cardinality() {
        Cardinality::Finite(n) => (false, BigRational::from_integer(n.into())),
        Cardinality::Infinite { residues, modulus } => (
            true,
            BigRational::new(residues.into(), modulus.into()),
        ),
    }
}

impl Operator {
    pub fn zero() -> Self {
        Operator::default()
    }

    pub fn identity() -> Self {
        Operator::from_map(PartialInjection::identity())
    }

    pub fn scalar(c: Coefficient) -> Self {
        Operator::from_terms([(c, PartialInjection::identity())])
    }

    /// The partial isometry `e_i ↦ e_{f(i)}`.
    pub fn from_map(map: PartialInjection) -> Self {
        Operator::from_terms([(Coefficient::one(), map)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Coefficient, PartialInjection)>) -> Self {
        let graph = terms.into_iter().flat_map(|(c, map)| {
            map.pieces()
                .iter()
                .map(|p| GraphPiece {
                    weight: c.clone(),
                    line: p.line(),
                    domain: p.domain().clone(),
                })
                .collect::<Vec<_>>()
        });
        let mut terms: Vec<Term> = normalize(graph)
            .into_iter()
            .map(|g| Term {
                coeff: g.weight,
                map: PartialInjection::from_valid_pieces([AffinePiece::new(g.domain, g.line)]),
            })
            .collect();
        terms.sort_by(|x, y| x.map.cmp(&y.map).then_with(|| x.coeff.cmp(&y.coeff)));
        debug_assert!(terms.windows(2).all(|w| w[0].map != w[1].map));
        Operator { terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Re-derives the normal form; a no-op on any constructed operator.
    pub fn renormalize(&self) -> Self {
        Operator::from_terms(self.terms.iter().map(|t| (t.coeff.clone(), t.map.clone())))
    }

    pub fn linear_combine<'a>(parts: impl IntoIterator<Item = (Coefficient, &'a Operator)>) -> Self {
        Operator::from_terms(parts.into_iter().flat_map(|(c, op)| {
            op.terms
                .iter()
                .map(|t| (&c * &t.coeff, t.map.clone()))
                .collect::<Vec<_>>()
        }))
    }

    pub fn add(&self, other: &Operator) -> Self {
        Operator::linear_combine([(Coefficient::one(), self), (Coefficient::one(), other)])
    }

    pub fn sub(&self, other: &Operator) -> Self {
        Operator::linear_combine([(Coefficient::one(), self), (Coefficient::from_int(-1), other)])
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        Operator::linear_combine([(c.clone(), self)])
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Operator) -> Self {
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for s in &self.terms {
            for o in &other.terms {
                raw.push((&s.coeff * &o.coeff, s.map.compose(&o.map)));
            }
        }
        Operator::from_terms(raw)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Operator::identity(), |acc, _| acc.mul(self))
    }

    pub fn adjoint(&self) -> Self {
        Operator::from_terms(
            self.terms
                .iter()
                .map(|t| (t.coeff.conj(), t.map.inverse())),
        )
    }

    /// Coordinates of `A·e_i`.
    pub fn apply(&self, i: u64) -> Vec<(u64, Coefficient)> {
        let mut out: BTreeMap<u64, Coefficient> = BTreeMap::new();
        for t in &self.terms {
            if let Some(j) = t.map.eval(i) {
                *out.entry(j).or_insert_with(Coefficient::zero) += &t.coeff;
            }
        }
        out.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Decides `A = λ·I` from the normal form.
    pub fn scalar_test(&self) -> ScalarTest {
        if self.terms.is_empty() {
            return ScalarTest::Scalar(Coefficient::zero());
        }
        if let [t] = self.terms.as_slice() {
            if t.map == PartialInjection::identity() {
                return ScalarTest::Scalar(t.coeff.clone());
            }
        }
        // candidate λ: coefficient of the densest identity block
        let lambda = self
            .terms
            .iter()
            .flat_map(|t| {
                t.map
                    .pieces()
                    .iter()
                    .filter(|p| p.line().is_identity())
                    .map(move |p| (t, p.domain()))
            })
            .max_by(|(_, x), (_, y)| {
                density_key(x)
                    .cmp(&density_key(y))
                    .then_with(|| y.first().cmp(&x.first()))
            })
            .map(|(t, _)| t.coeff.clone())
            .unwrap_or_else(Coefficient::zero);

        let mut good_diagonal = IndexSet::empty();
        let mut bad = IndexSet::empty();
        for t in &self.terms {
            for p in t.map.pieces() {
                let fixed = p.domain().intersection(&p.line().fixed_points());
                bad = bad.union(&p.domain().difference(&fixed));
                if t.coeff == lambda {
                    good_diagonal = good_diagonal.union(&fixed);
                } else {
                    bad = bad.union(&fixed);
                }
            }
        }
        if !lambda.is_zero() {
            bad = bad.union(&good_diagonal.complement());
        }
        let witness = bad
            .first()
            .expect("a non-scalar normal form has a bad column");
        ScalarTest::NotScalar { witness }
    }

    pub fn classify(&self) -> Classification {
        if self.is_zero() {
            return Classification::Zero;
        }
        if let ScalarTest::Scalar(c) = self.scalar_test() {
            return Classification::Scalar(c);
        }
        let gram = self.adjoint().mul(self);
        let norm_sqr = match gram.scalar_test() {
            ScalarTest::Scalar(mu) if mu.is_positive_real() => mu.re().clone(),
            ScalarTest::Scalar(_) => unreachable!("A*A = μI with A ≠ 0 forces μ > 0"),
            ScalarTest::NotScalar { witness } => return Classification::Other { witness },
        };
        match self.mul(&self.adjoint()).scalar_test() {
            ScalarTest::Scalar(nu) if !nu.is_zero() => Classification::UnitaryMultiple { norm_sqr },
            _ => Classification::IsometryMultiple { norm_sqr },
        }
    }

    /// The union of all term maps, when columns carry at most one entry each
    /// (so the operator is `e_i ↦ c_i·e_{f(i)}`).
    pub fn support_map(&self) -> Option<PartialInjection> {
        let pieces: Vec<AffinePiece> = self
            .terms
            .iter()
            .flat_map(|t| t.map.pieces().iter().cloned())
            .collect();
        PartialInjection::validate(pieces).ok()
    }

    /// Trace, when the diagonal has finite support: `Σ_i ⟨A e_i, e_i⟩`.
    /// `None` if some nonzero diagonal block is infinite.
    pub fn finite_trace(&self) -> Option<Coefficient> {
        let mut total = Coefficient::zero();
        for t in &self.terms {
            for p in t.map.pieces() {
                let fixed = p.domain().intersection(&p.line().fixed_points());
                match fixed.cardinality() {
                    Cardinality::Finite(n) => {
                        total += &t.coeff.scale(&BigRational::from_integer(n.into()))
                    }
                    Cardinality::Infinite { .. } => return None,
                }
            }
        }
        Some(total)
    }

    /// Lines used by the normal form, with the union of their domains.
    pub(crate) fn line_domains(&self) -> Vec<(Line, IndexSet)> {
        self.terms
            .iter()
            .flat_map(|t| {
                t.map
                    .pieces()
                    .iter()
                    .map(|p| (p.line(), p.domain().clone()))
                    .collect::<Vec<_>>()
            })
            .collect()
    }
}

/// An initial segment `0..n` of columns on which the given operators are
/// decided: two linear combinations of them agree everywhere iff they agree
/// on these columns. Beyond every exceptional point and every crossing of
/// two lines, columns repeat with the common period of all domains.
pub fn decisive_columns<'a>(ops: impl IntoIterator<Item = &'a Operator>) -> u64 {
    let pieces: Vec<(Line, IndexSet)> = ops.into_iter().flat_map(|o| o.line_domains()).collect();
    let mut period: u64 = 1;
    let mut threshold: u64 = 0;
    for (n, (line, dom)) in pieces.iter().enumerate() {
        period = num_integer::lcm(period, dom.modulus());
        threshold = threshold.max(dom.tail_start());
        for (other, _) in &pieces[n + 1..] {
            if let Some(x) = line.intersection(other) {
                threshold = threshold.max(x + 1);
            }
        }
    }
    threshold + period
}

impl ColumnAccess for Operator {
    fn column(&self, i: u64) -> Vec<(u64, Coefficient)> {
        self.apply(i)
    }

    fn adjoint_column(&self, i: u64) -> Vec<(u64, Coefficient)> {
        let mut out: BTreeMap<u64, Coefficient> = BTreeMap::new();
        for t in &self.terms {
            if let Some(j) = t.map.inverse().eval(i) {
                *out.entry(j).or_insert_with(Coefficient::zero) += &t.coeff.conj();
            }
        }
        out.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| format!("{}·{}", t.coeff, t.map))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift() -> Operator {
        Operator::from_map(PartialInjection::affine(1, 1))
    }

    fn cuntz(n: u64, r: u64) -> Operator {
        Operator::from_map(PartialInjection::affine(n, r))
    }

    fn c(n: i64) -> Coefficient {
        Coefficient::from_int(n)
    }

    #[test]
    fn linear_combine_examples() {
        let s = shift();
        let s2 = s.mul(&s);
        let sum = s.add(&s2);
        assert_eq!(sum.terms().len(), 2);
        assert_eq!(sum.apply(0), vec![(1, c(1)), (2, c(1))]);
        let s0 = cuntz(2, 0);
        assert!(s0.sub(&s0).is_zero());
        let a = Operator::linear_combine([(c(2), &s0), (c(1), &cuntz(2, 1))]);
        assert_eq!(a.terms().len(), 2);
        assert_eq!(a.terms()[0].map(), &PartialInjection::affine(2, 0));
        assert_eq!(a.terms()[0].coeff(), &c(2));
        assert_eq!(a.apply(3), vec![(6, c(2)), (7, c(1))]);
    }

    #[test]
    fn products() {
        let (s0, s1) = (cuntz(2, 0), cuntz(2, 1));
        assert_eq!(s1.mul(&s0), Operator::from_map(PartialInjection::affine(4, 1)));
        assert_eq!(
            s0.mul(&s0.adjoint()),
            Operator::from_map(PartialInjection::identity_on(IndexSet::evens()))
        );
        assert!(s0.mul(&Operator::zero()).is_zero());
    }

    #[test]
    fn adjoints() {
        let a = cuntz(2, 0).scale(&Coefficient::gaussian(2, 1));
        let adj = a.adjoint();
        assert_eq!(adj.terms().len(), 1);
        assert_eq!(adj.terms()[0].coeff(), &Coefficient::gaussian(2, -1));
        assert_eq!(adj.terms()[0].map().domain(), IndexSet::evens());
        assert_eq!(adj.adjoint(), a);
        assert!(Operator::zero().adjoint().is_zero());
        assert!(cuntz(2, 0).adjoint().apply(1).is_empty());
    }

    #[test]
    fn scalar_test_examples() {
        let (s0, s1) = (cuntz(2, 0), cuntz(2, 1));
        let cuntz_sum = s0.mul(&s0.adjoint()).add(&s1.mul(&s1.adjoint()));
        assert_eq!(cuntz_sum.scalar_test(), ScalarTest::Scalar(c(1)));
        assert_eq!(
            s0.mul(&s0.adjoint()).scalar_test(),
            ScalarTest::NotScalar { witness: 1 }
        );
        let s = shift();
        let b = s.add(&s.mul(&s));
        let gram = b.adjoint().mul(&b);
        assert_eq!(gram.scalar_test(), ScalarTest::NotScalar { witness: 0 });
        let expect = Operator::scalar(c(2)).add(&s).add(&s.adjoint());
        assert_eq!(gram, expect);
        assert_eq!(gram.apply(0), vec![(0, c(2)), (1, c(1))]);
        assert_eq!(
            s.mul(&s.adjoint()).scalar_test(),
            ScalarTest::NotScalar { witness: 0 }
        );
        assert_eq!(Operator::zero().scalar_test(), ScalarTest::Scalar(c(0)));
    }

    #[test]
    fn classify_examples() {
        let a = Operator::linear_combine([(c(2), &cuntz(2, 0)), (c(1), &cuntz(2, 1))]);
        assert_eq!(
            a.classify(),
            Classification::IsometryMultiple { norm_sqr: BigRational::from_integer(5.into()) }
        );
        let swap = PartialInjection::validate(vec![
            AffinePiece::new(IndexSet::evens(), Line::new(1, 1, 1)),
            AffinePiece::new(IndexSet::odds(), Line::new(1, -1, 1)),
        ])
        .unwrap();
        assert!(Operator::from_map(swap).classify().is_unitary_multiple());
        let s = shift().classify();
        assert_eq!(s.label(), "isometry-multiple");
        let b = shift().add(&shift().mul(&shift()));
        assert_eq!(b.classify(), Classification::Other { witness: 0 });
    }

    #[test]
    fn trace_of_projection() {
        let s3 = Operator::from_map(PartialInjection::affine(1, 3));
        let p = Operator::identity().sub(&s3.mul(&s3.adjoint()));
        assert_eq!(p.finite_trace(), Some(c(3)));
        let s0 = cuntz(2, 0);
        let q = Operator::identity().sub(&s0.mul(&s0.adjoint()));
        assert_eq!(q.finite_trace(), None);
    }
}
