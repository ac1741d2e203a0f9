//! Spaces of operators all of whose members are scalar multiples of
//! isometries.
//!
//! A linear space `S` has this property exactly when `B*A` is a scalar for
//! all `A, B ∈ S`; the scalar `⟨A, B⟩` defined by `B*A = ⟨A, B⟩·I` is then an
//! inner product on `S` whose norm is the operator norm. Since `(A, B) ↦ B*A`
//! is sesquilinear, checking generator pairs suffices for a finite span.

pub mod linalg;

use std::fmt;

use thiserror::Error;

use crate::op_algebra::{decisive_columns, Classification, Coefficient, Operator, ScalarTest};
use crate::wold::{self, Certificate, Multiplicity};
use linalg::Matrix;

/// Recorded in every report: why generator pairs are enough.
pub const SESQUILINEAR_REDUCTION: &str = "B*A is sesquilinear in (A, B), so scalar values on \
     generator pairs extend to the whole span";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MiError {
    #[error("⟨{}, {}⟩ is not a scalar: column {witness} fails", pair.0, pair.1)]
    NotMiPair { pair: (usize, usize), witness: u64 },
    #[error("operator is zero")]
    Zero,
    #[error("operator is not a scalar multiple of an isometry (column {witness} fails)")]
    NotIsometryMultiple { witness: u64 },
    #[error("the first factor is not in the span of the generators")]
    NotInSpan,
}

/// `⟨A, B⟩`, i.e. the `λ` with `B*A = λ·I`; otherwise the witness column.
pub fn inner_product(a: &Operator, b: &Operator) -> Result<Coefficient, u64> {
    match b.adjoint().mul(a).scalar_test() {
        ScalarTest::Scalar(l) => Ok(l),
        ScalarTest::NotScalar { witness } => Err(witness),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    MiSpace,
    /// `⟨A_j, A_k⟩` is not a scalar; `A_k*A_j` misbehaves at `witness`.
    Violation { pair: (usize, usize), witness: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramReport {
    pub generators: Vec<Operator>,
    /// `gram[j][k] = ⟨A_j, A_k⟩`; `None` where the pair is not scalar.
    pub gram: Vec<Vec<Option<Coefficient>>>,
    pub verdict: Verdict,
    /// Rank of the Gram matrix; only for MI-spaces.
    pub dimension: Option<usize>,
    pub hermitian: bool,
    pub psd: bool,
    pub certificate: Certificate,
    pub reduction: &'static str,
}

impl GramReport {
    pub fn is_mi_space(&self) -> bool {
        self.verdict == Verdict::MiSpace
    }

    /// The full Gram matrix of an MI-space.
    pub fn matrix(&self) -> Option<Matrix> {
        self.gram
            .iter()
            .map(|row| row.iter().cloned().collect::<Option<Vec<_>>>())
            .collect()
    }
}

/// Computes `⟨A_j, A_k⟩` for `k ≤ j` in order (the rest follow by
/// conjugation) and reports the first non-scalar pair.
pub fn check_mi_space(generators: &[Operator]) -> GramReport {
    let n = generators.len();
    let mut gram = vec![vec![None; n]; n];
    let mut verdict = Verdict::MiSpace;
    for j in 0..n {
        for k in 0..=j {
            match inner_product(&generators[j], &generators[k]) {
                Ok(l) => {
                    gram[k][j] = Some(l.conj());
                    gram[j][k] = Some(l);
                }
                Err(witness) => {
                    if verdict == Verdict::MiSpace {
                        verdict = Verdict::Violation {
                            pair: (j, k),
                            witness,
                        };
                    }
                }
            }
        }
    }
    let mut report = GramReport {
        generators: generators.to_vec(),
        gram,
        verdict,
        dimension: None,
        hermitian: false,
        psd: false,
        certificate: Certificate::Exact,
        reduction: SESQUILINEAR_REDUCTION,
    };
    if let Some(m) = report.matrix() {
        report.dimension = Some(linalg::rank(&m));
        report.hermitian = linalg::is_hermitian(&m);
        report.psd = linalg::is_psd(&m);
    }
    report
}

/// Unnormalised Gram–Schmidt over the generators of an MI-space; zero
/// vectors are dropped.
pub fn orthogonalize(report: &GramReport) -> Result<Vec<Operator>, MiError> {
    if let Verdict::Violation { pair, witness } = report.verdict {
        return Err(MiError::NotMiPair { pair, witness });
    }
    let mut basis: Vec<(Operator, Coefficient)> = Vec::new();
    for a in &report.generators {
        let mut v = a.clone();
        for (u, uu) in &basis {
            let c = inner_product(a, u).expect("MI-space pairs are scalar");
            let proj = &c * &uu.inv().expect("basis vectors are nonzero");
            v = v.sub(&u.scale(&proj));
        }
        if !v.is_zero() {
            let vv = inner_product(&v, &v).expect("MI-space members are scalar");
            basis.push((v, vv));
        }
    }
    Ok(basis.into_iter().map(|(v, _)| v).collect())
}

/// Coefficients `c` with `Σ c_j·A_j = T`, or `None` when `T` is not in the
/// span. Both sides are compared on the columns that decide equality of
/// such combinations.
pub fn span_membership(target: &Operator, generators: &[Operator]) -> Option<Vec<Coefficient>> {
    let n = generators.len();
    let cols = decisive_columns(generators.iter().chain([target]));
    let mut rows = Vec::new();
    for i in 0..cols {
        let gen_cols: Vec<Vec<(u64, Coefficient)>> = generators.iter().map(|g| g.apply(i)).collect();
        let t_col = target.apply(i);
        let mut keys: Vec<u64> = gen_cols
            .iter()
            .flatten()
            .chain(&t_col)
            .map(|(r, _)| *r)
            .collect();
        keys.sort_unstable();
        keys.dedup();
        for r in keys {
            let lookup = |col: &[(u64, Coefficient)]| {
                col.iter()
                    .find(|(x, _)| *x == r)
                    .map_or_else(Coefficient::zero, |(_, c)| c.clone())
            };
            let mut row: Vec<Coefficient> = gen_cols.iter().map(|c| lookup(c)).collect();
            row.push(lookup(&t_col));
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return Some(vec![Coefficient::zero(); n]);
    }
    linalg::solve(rows, n)
}

pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    a.mul(b).sub(&b.mul(a))
}

fn pair_inner(x: &Operator, y: &Operator, pair: (usize, usize)) -> Result<Coefficient, MiError> {
    inner_product(x, y).map_err(|witness| MiError::NotMiPair { pair, witness })
}

/// The four inner products of `(A, B)`, or the first failing pair.
fn mi_pair(a: &Operator, b: &Operator) -> Result<[Coefficient; 3], MiError> {
    let aa = pair_inner(a, a, (0, 0))?;
    let ab = pair_inner(a, b, (0, 1))?;
    pair_inner(b, a, (1, 0))?;
    let bb = pair_inner(b, b, (1, 1))?;
    Ok([aa, ab, bb])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutatorIdentity {
    pub commutator: Operator,
    /// `[A,B]*[A,B]`.
    pub lhs: Operator,
    /// `2(‖A‖²‖B‖² − |⟨A,B⟩|²)`.
    pub rhs_scalar: Coefficient,
    pub holds: bool,
    /// Whether `[A,B]` is itself a scalar multiple of an isometry.
    pub commutator_in_mi: bool,
}

pub fn commutator_identity_check(a: &Operator, b: &Operator) -> Result<CommutatorIdentity, MiError> {
    let [aa, ab, bb] = mi_pair(a, b)?;
    let c = commutator(a, b);
    let lhs = c.adjoint().mul(&c);
    let rhs_scalar = Coefficient::from_int(2) * (&aa * &bb - &ab * &ab.conj());
    let verdict = lhs.scalar_test();
    Ok(CommutatorIdentity {
        holds: verdict == ScalarTest::Scalar(rhs_scalar.clone()),
        commutator_in_mi: verdict.scalar().is_some(),
        commutator: c,
        lhs,
        rhs_scalar,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommutationReport {
    pub commute: bool,
    pub dependent: bool,
    pub consistent: bool,
}

pub fn commutation_check(a: &Operator, b: &Operator) -> Result<CommutationReport, MiError> {
    let [aa, ab, bb] = mi_pair(a, b)?;
    let commute = commutator(a, b).is_zero();
    let dependent = &aa * &bb == &ab * &ab.conj();
    Ok(CommutationReport {
        commute,
        dependent,
        consistent: commute == dependent,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdjointReport {
    /// `AA*` is a nonzero scalar, i.e. `A*` is also an isometry multiple.
    pub adjoint_in_mi: bool,
    /// `A` classified as a multiple of a unitary.
    pub forced_unitary: bool,
    /// Column where `AA*` fails to be scalar.
    pub witness: Option<u64>,
}

impl AdjointReport {
    /// An adjoint in MI must force a unitary multiple.
    pub fn consistent(&self) -> bool {
        !self.adjoint_in_mi || self.forced_unitary
    }
}

fn require_isometry_multiple(a: &Operator) -> Result<Classification, MiError> {
    match a.classify() {
        Classification::Zero => Err(MiError::Zero),
        Classification::Other { witness } => Err(MiError::NotIsometryMultiple { witness }),
        c => Ok(c),
    }
}

pub fn adjoint_membership_check(a: &Operator) -> Result<AdjointReport, MiError> {
    let class = require_isometry_multiple(a)?;
    let (adjoint_in_mi, witness) = match a.mul(&a.adjoint()).scalar_test() {
        ScalarTest::Scalar(l) => (!l.is_zero(), None),
        ScalarTest::NotScalar { witness } => (false, Some(witness)),
    };
    Ok(AdjointReport {
        adjoint_in_mi,
        forced_unitary: class.is_unitary_multiple(),
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductReport {
    /// Coefficients of `AB` over the generators, when it is in the span.
    pub product: Option<Vec<Coefficient>>,
    pub b_scalar: Option<Coefficient>,
    pub b_in_span: bool,
    pub a_is_zero: bool,
    /// The span is exactly `ℂI`.
    pub span_is_scalars: bool,
    /// Whether `A^k` is in the span, for `k = 2, 3, 4`.
    pub powers: Vec<(u32, bool)>,
    /// `AB ∈ S` with `A ≠ 0` forces `B ∈ ℂI`.
    pub part_a: bool,
    /// For `S ≠ ℂI`, `A ≠ 0` and `B ∈ S`: `AB ∈ S` iff `B = 0`.
    pub part_b: bool,
    /// For `S ≠ ℂI`: a power `A^k ∈ S` with `k > 1` forces `A = 0`.
    pub part_c: bool,
}

impl ProductReport {
    pub fn product_in_span(&self) -> bool {
        self.product.is_some()
    }

    pub fn consistent(&self) -> bool {
        self.part_a && self.part_b && self.part_c
    }
}

pub fn product_membership_check(
    generators: &[Operator],
    a: &Operator,
    b: &Operator,
) -> Result<ProductReport, MiError> {
    let report = check_mi_space(generators);
    if let Verdict::Violation { pair, witness } = report.verdict {
        return Err(MiError::NotMiPair { pair, witness });
    }
    if span_membership(a, generators).is_none() {
        return Err(MiError::NotInSpan);
    }
    let in_span = |t: &Operator| span_membership(t, generators);
    let product = in_span(&a.mul(b));
    let b_scalar = b.scalar_test().scalar().cloned();
    let b_in_span = in_span(b).is_some();
    let a_is_zero = a.is_zero();
    let span_is_scalars =
        report.dimension == Some(1) && in_span(&Operator::identity()).is_some();
    let powers: Vec<(u32, bool)> = (2..=4).map(|k| (k, in_span(&a.pow(k)).is_some())).collect();
    let exempt = span_is_scalars || a_is_zero;
    Ok(ProductReport {
        part_a: a_is_zero || product.is_none() || b_scalar.is_some(),
        part_b: exempt || !b_in_span || product.is_some() == b.is_zero(),
        part_c: exempt || powers.iter().all(|(_, inside)| !inside),
        product,
        b_scalar,
        b_in_span,
        a_is_zero,
        span_is_scalars,
        powers,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FindingCode {
    MiOk,
    MiViolation,
    Dim,
    AuditP24,
    AuditC25a,
    AuditC25b,
    CiHolds,
    CiFail,
}

impl FindingCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            FindingCode::MiOk => "MI-OK",
            FindingCode::MiViolation => "MI-VIOLATION",
            FindingCode::Dim => "DIM",
            FindingCode::AuditP24 => "AUDIT-P24",
            FindingCode::AuditC25a => "AUDIT-C25A",
            FindingCode::AuditC25b => "AUDIT-C25B",
            FindingCode::CiHolds => "CI-HOLDS",
            FindingCode::CiFail => "CI-FAIL",
        }
    }

    /// Codes whose failure points at a bug rather than at the input.
    pub fn is_audit(&self) -> bool {
        matches!(
            self,
            FindingCode::AuditP24 | FindingCode::AuditC25a | FindingCode::AuditC25b
        )
    }
}

impl fmt::Display for FindingCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub code: FindingCode,
    pub holds: bool,
    pub detail: String,
}

impl Finding {
    fn new(code: FindingCode, holds: bool, detail: impl Into<String>) -> Self {
        Finding {
            code,
            holds,
            detail: detail.into(),
        }
    }

    /// A failed structural check: a bug, not a property of the input.
    pub fn is_inconsistency(&self) -> bool {
        !self.holds && (self.code.is_audit() || self.code == FindingCode::Dim)
    }
}

/// Structural facts every MI-space must satisfy, checked on the orthogonal
/// basis: with dimension ≥ 2 there is no member with finite multiplicity,
/// no unitary multiple, and the identity is not in the span.
pub fn structural_audit(report: &GramReport) -> Vec<Finding> {
    let Verdict::MiSpace = report.verdict else {
        let Verdict::Violation { pair, witness } = report.verdict else {
            unreachable!()
        };
        return vec![Finding::new(
            FindingCode::MiViolation,
            false,
            format!("⟨A{}, A{}⟩ is not a scalar; column {witness} fails", pair.0, pair.1),
        )];
    };
    let dim = report.dimension.expect("MI-space reports carry a dimension");
    let mut out = vec![Finding::new(FindingCode::MiOk, true, report.reduction)];
    out.push(Finding::new(
        FindingCode::Dim,
        report.hermitian && report.psd,
        format!(
            "dimension {dim}; Gram matrix {} and {}",
            if report.hermitian { "Hermitian" } else { "NOT Hermitian" },
            if report.psd { "positive semidefinite" } else { "NOT positive semidefinite" }
        ),
    ));
    let basis = orthogonalize(report).expect("MI-space");

    let mut finite = Vec::new();
    let mut unitary = Vec::new();
    for (n, v) in basis.iter().enumerate() {
        match wold::multiplicity(v) {
            Ok(Multiplicity::Finite(m)) => finite.push(format!("basis vector {n} has multiplicity {m}")),
            Ok(_) => {}
            Err(e) => finite.push(format!("basis vector {n}: {e}")),
        }
        if v.classify().is_unitary_multiple() {
            unitary.push(n);
        }
    }
    let p24_detail = if finite.is_empty() {
        "every basis vector has infinite multiplicity".to_string()
    } else {
        finite.join("; ")
    };
    out.push(Finding::new(FindingCode::AuditP24, finite.is_empty() || dim <= 1, p24_detail));
    out.push(Finding::new(
        FindingCode::AuditC25a,
        unitary.is_empty() || dim <= 1,
        if unitary.is_empty() {
            "no unitary multiple in the basis".to_string()
        } else {
            format!("unitary multiples at basis positions {unitary:?}")
        },
    ));
    let has_identity = span_membership(&Operator::identity(), &report.generators).is_some();
    out.push(Finding::new(
        FindingCode::AuditC25b,
        !has_identity || dim == 1,
        if has_identity {
            format!("identity in span, dimension {dim}")
        } else {
            "identity not in span".to_string()
        },
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::make_cuntz;
    use crate::op_algebra::PartialInjection;

    fn c(n: i64) -> Coefficient {
        Coefficient::from_int(n)
    }

    fn shift() -> Operator {
        Operator::from_map(PartialInjection::affine(1, 1))
    }

    #[test]
    fn inner_products() {
        let s = make_cuntz(2).unwrap();
        assert_eq!(inner_product(&s[0], &s[1]), Ok(c(0)));
        let a = s[0].scale(&c(2)).add(&s[1]);
        assert_eq!(inner_product(&a, &s[0]), Ok(c(2)));
        assert_eq!(inner_product(&a, &a), Ok(c(5)));
    }

    #[test]
    fn gram_reports() {
        let s = make_cuntz(2).unwrap();
        let r = check_mi_space(&s);
        assert!(r.is_mi_space());
        assert_eq!(r.dimension, Some(2));
        assert_eq!(r.matrix().unwrap(), vec![vec![c(1), c(0)], vec![c(0), c(1)]]);
        let three = vec![s[0].clone(), s[1].clone(), s[0].add(&s[1])];
        let r3 = check_mi_space(&three);
        assert_eq!(r3.dimension, Some(2));
        assert_eq!(r3.matrix().unwrap()[2], vec![c(1), c(1), c(2)]);
        let bad = check_mi_space(&[shift(), shift().mul(&shift())]);
        assert_eq!(bad.verdict, Verdict::Violation { pair: (1, 0), witness: 0 });
    }

    #[test]
    fn orthogonalization() {
        let s = make_cuntz(2).unwrap();
        let r = check_mi_space(&[s[0].clone(), s[0].add(&s[1])]);
        assert_eq!(orthogonalize(&r).unwrap(), s);
        let dep = check_mi_space(&[s[0].clone(), s[0].scale(&c(2))]);
        assert_eq!(orthogonalize(&dep).unwrap(), vec![s[0].clone()]);
    }

    #[test]
    fn span_examples() {
        let s = make_cuntz(2).unwrap();
        assert_eq!(span_membership(&s[0].scale(&c(3)), &s), Some(vec![c(3), c(0)]));
        assert_eq!(span_membership(&s[0].mul(&s[1]), &s), None);
        assert_eq!(span_membership(&Operator::zero(), &s), Some(vec![c(0), c(0)]));
    }

    #[test]
    fn commutator_identity_examples() {
        let s = make_cuntz(2).unwrap();
        let r = commutator_identity_check(&s[0], &s[1]).unwrap();
        assert!(r.holds);
        assert_eq!(r.lhs, Operator::scalar(c(2)));
        let a = s[0].scale(&c(2)).add(&s[1]);
        let r2 = commutator_identity_check(&a, &s[0]).unwrap();
        assert_eq!(r2.rhs_scalar, c(2));
        assert!(r2.holds);
        let r3 = commutator_identity_check(&s[0], &s[0]).unwrap();
        assert!(r3.lhs.is_zero() && r3.holds);
        assert!(matches!(
            commutator_identity_check(&shift(), &shift().mul(&shift())),
            Err(MiError::NotMiPair { pair: (0, 1), .. })
        ));
    }

    #[test]
    fn commutation_examples() {
        let s = make_cuntz(2).unwrap();
        let r = commutation_check(&s[0], &s[0].scale(&c(3))).unwrap();
        assert!(r.commute && r.dependent && r.consistent);
        let r = commutation_check(&s[0], &s[1]).unwrap();
        assert!(!r.commute && !r.dependent && r.consistent);
        assert!(commutator(&shift(), &shift().mul(&shift())).is_zero());
    }

    #[test]
    fn adjoint_membership() {
        let r = adjoint_membership_check(&shift()).unwrap();
        assert_eq!(r.witness, Some(0));
        assert!(!r.adjoint_in_mi);
        let s = make_cuntz(2).unwrap();
        assert_eq!(adjoint_membership_check(&s[0]).unwrap().witness, Some(1));
        assert_eq!(adjoint_membership_check(&Operator::zero()), Err(MiError::Zero));
    }

    #[test]
    fn product_membership() {
        let s = make_cuntz(2).unwrap();
        let r = product_membership_check(&s, &s[0], &Operator::scalar(c(3))).unwrap();
        assert!(r.product_in_span() && r.consistent());
        let r = product_membership_check(&s, &s[0], &s[1]).unwrap();
        assert!(!r.product_in_span() && r.consistent());
        let r = product_membership_check(&[shift()], &shift(), &shift()).unwrap();
        assert_eq!(r.powers[0], (2, false));
        assert!(r.consistent());
        assert_eq!(
            product_membership_check(&s, &shift(), &shift()),
            Err(MiError::NotInSpan)
        );
    }

    #[test]
    fn audits() {
        let f = structural_audit(&check_mi_space(&[shift()]));
        assert!(f.iter().all(|x| x.holds));
        let p24 = f.iter().find(|x| x.code == FindingCode::AuditP24).unwrap();
        assert!(p24.detail.contains("multiplicity 1"));
        let f = structural_audit(&check_mi_space(&[Operator::identity()]));
        assert!(f.iter().all(|x| x.holds));
        let f = structural_audit(&check_mi_space(&make_cuntz(2).unwrap()));
        assert!(f.iter().all(|x| x.holds));
        let f = structural_audit(&check_mi_space(&[shift(), shift().mul(&shift())]));
        assert_eq!(f[0].code, FindingCode::MiViolation);
    }
}
