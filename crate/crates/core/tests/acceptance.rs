//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit status
//! if any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use isocalc::constructions::{make_shift_with_range, make_shift_with_wandering, Constructed};
use isocalc::index_arith::IndexSet;
use isocalc::mi_space::{
    adjoint_membership_check, check_mi_space, commutation_check, commutator,
    commutator_identity_check, inner_product, orthogonalize, product_membership_check,
    span_membership, structural_audit, Verdict,
};
use isocalc::numeric_oracle::{cross_validate, norm_estimate};
use isocalc::op_algebra::{Coefficient, Operator, ScalarTest};
use isocalc::wold::{multiplicity, wold_decompose, wold_decompose_prefix, Certificate, Multiplicity};
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;

const BOUND: u64 = 4096;

type Check = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn one() -> Coefficient {
    Coefficient::one()
}

fn criterion_1() -> Check {
    for n in [2u64, 3, 5] {
        let (s, naive) = cuntz(n);
        let mut sum = Operator::zero();
        let mut naive_sum = naive[0].mul(&naive[0].adjoint());
        for (i, si) in s.iter().enumerate() {
            sum = sum.add(&si.mul(&si.adjoint()));
            if i > 0 {
                naive_sum = naive_sum.add(&naive[i].mul(&naive[i].adjoint()));
            }
            for (j, sj) in s.iter().enumerate() {
                let want = if i == j { one() } else { Coefficient::zero() };
                let got = sj.adjoint().mul(si).scalar_test();
                ensure(got == ScalarTest::Scalar(want.clone()), || {
                    format!("n={n}: S{j}*S{i} gave {got:?}")
                })?;
                let oracle = naive[j].adjoint().mul(&naive[i]);
                ensure(naive_is_scalar(&oracle, &want, 256), || {
                    format!("n={n}: pointwise oracle disagrees on S{j}*S{i}")
                })?;
            }
        }
        ensure(sum.scalar_test() == ScalarTest::Scalar(one()), || {
            format!("n={n}: sum of range projections is not I")
        })?;
        ensure(naive_is_scalar(&naive_sum, &one(), 256), || {
            format!("n={n}: pointwise oracle disagrees on the range projection sum")
        })?;
    }
    Ok("n ∈ {2,3,5}: S_j*S_i = δ_ij·I and Σ S_iS_i* = I exactly".into())
}

fn criterion_2() -> Check {
    let corpus = mi_pair_corpus();
    for (k, p) in corpus.iter().enumerate() {
        let r = commutator_identity_check(&p.a, &p.b).map_err(|e| format!("pair {k}: {e}"))?;
        ensure(r.holds, || {
            format!("pair {k} (n={}): lhs {} vs rhs {}", p.n, r.lhs, r.rhs_scalar)
        })?;
        ensure(r.commutator_in_mi, || format!("pair {k}: [A,B] not in MI"))?;
        let c = p.naive_a.mul(&p.naive_b).sub(&p.naive_b.mul(&p.naive_a));
        ensure(first_mismatch(&r.commutator, &c, 64).is_none(), || {
            format!("pair {k}: commutator disagrees with the pointwise oracle")
        })?;
        ensure(naive_is_scalar(&c.adjoint().mul(&c), &r.rhs_scalar, 64), || {
            format!("pair {k}: pointwise oracle contradicts the identity")
        })?;
    }
    Ok(format!("{} pairs: [A,B]*[A,B] = 2(‖A‖²‖B‖² − |⟨A,B⟩|²)·I exactly", corpus.len()))
}

fn criterion_3() -> Check {
    let mut pairs = 0;
    let mut worst: f64 = 0.0;
    for n in [2u64, 3, 4, 5] {
        let (s, _) = cuntz(n);
        for i in 0..s.len() {
            for j in 0..s.len() {
                if i == j {
                    continue;
                }
                pairs += 1;
                let c = commutator(&s[i], &s[j]);
                let lhs = c.adjoint().mul(&c);
                ensure(lhs == Operator::scalar(Coefficient::from_int(2)), || {
                    format!("n={n}: [S{i},S{j}]*[S{i},S{j}] = {lhs}")
                })?;
                let err = (norm_estimate(&c, 64) - 2f64.sqrt()).abs();
                worst = worst.max(err);
                ensure(err < 1e-9, || format!("n={n}: norm error {err:e}"))?;
            }
        }
    }
    Ok(format!("{pairs} orthonormal pairs: lhs = 2I, |‖[A,B]‖₆₄ − √2| ≤ {worst:e}"))
}

fn finite_wandering_sets() -> Vec<IndexSet> {
    let mut sets = Vec::new();
    for a in 0..32u64 {
        sets.push(IndexSet::finite([a]));
        for b in a + 1..32 {
            sets.push(IndexSet::finite([a, b]));
            for c in b + 1..32 {
                sets.push(IndexSet::finite([a, b, c]));
            }
        }
    }
    let mut rng = rng(0x5eed_0004);
    let pool: Vec<u64> = (0..32).collect();
    for _ in 0..1000 {
        let size = rng.gen_range(4..=8);
        let picked: Vec<u64> = pool.choose_multiple(&mut rng, size).copied().collect();
        sets.push(IndexSet::finite(picked));
    }
    sets
}

fn residue_wandering_sets() -> Vec<IndexSet> {
    let mut sets: Vec<IndexSet> = Vec::new();
    for modulus in 2..=6u64 {
        for mask in 1..(1u64 << modulus) - 1 {
            let residues = (0..modulus).filter(|r| mask >> r & 1 == 1);
            let s = IndexSet::progression(modulus, residues);
            if !sets.contains(&s) {
                sets.push(s);
            }
        }
    }
    sets
}

/// `A^p M` are pairwise disjoint for `p ≤ 5` and together cover `0..32`.
fn check_rows(op: &Operator, m: &IndexSet) -> Result<(), String> {
    let mut seen = std::collections::BTreeMap::new();
    let mut layer: Vec<u64> = m.elements_below(u64::MAX);
    for p in 0..64u32 {
        for &i in &layer {
            if let Some(q) = seen.insert(i, p) {
                return Err(format!("index {i} lies in A^{q}M and A^{p}M for M = {m}"));
            }
        }
        layer = layer
            .iter()
            .map(|&i| op.apply(i)[0].0)
            .collect();
    }
    ensure((0..32).all(|i| seen.contains_key(&i)), || {
        format!("rows of M = {m} do not exhaust 0..32")
    })
}

fn criterion_4() -> Check {
    let finite = finite_wandering_sets();
    for m in &finite {
        let a = match make_shift_with_wandering(m).map_err(|e| format!("M = {m}: {e}"))? {
            Constructed::Exact(op) => op,
            Constructed::Prefix(_) => return Err(format!("M = {m}: expected an exact shift")),
        };
        ensure(a.adjoint().mul(&a).scalar_test() == ScalarTest::Scalar(one()), || {
            format!("M = {m}: not an isometry")
        })?;
        let w = wold_decompose(&a, BOUND).map_err(|e| format!("M = {m}: {e}"))?;
        ensure(w.certificate == Certificate::Exact, || format!("M = {m}: certificate {}", w.certificate))?;
        ensure(w.unitary.is_empty(), || format!("M = {m}: unitary part {}", w.unitary))?;
        ensure(w.wandering == *m, || format!("M = {m}: wandering {}", w.wandering))?;
        check_rows(&a, m)?;

        let k = m.complement();
        let r = make_shift_with_range(&k).map_err(|e| format!("K = {k}: {e}"))?;
        let f = r
            .exact()
            .and_then(Operator::support_map)
            .ok_or_else(|| format!("K = {k}: expected an exact basis map"))?;
        ensure(f.image() == k, || format!("K = {k}: range {}", f.image()))?;
    }

    let residue = residue_wandering_sets();
    for m in &residue {
        let a = match make_shift_with_wandering(m).map_err(|e| format!("M = {m}: {e}"))? {
            Constructed::Prefix(op) => op,
            Constructed::Exact(_) => return Err(format!("M = {m}: expected a prefix shift")),
        };
        let w = wold_decompose_prefix(&a, BOUND).map_err(|e| format!("M = {m}: {e}"))?;
        ensure(w.certificate == Certificate::Prefix(BOUND), || format!("M = {m}: certificate"))?;
        ensure(w.unitary.is_empty(), || format!("M = {m}: unitary part {}", w.unitary))?;
        let expect = m.intersection(&IndexSet::below(BOUND));
        ensure(w.wandering == expect, || format!("M = {m}: wandering {}", w.wandering))?;

        let r = make_shift_with_range(m).map_err(|e| format!("K = {m}: {e}"))?.into_prefix();
        let bad = (0..BOUND).find(|&j| r.backward_index(j).is_some() != m.contains(j));
        ensure(bad.is_none(), || format!("K = {m}: range differs at {bad:?}"))?;
    }
    Ok(format!(
        "{} finite M exact, {} residue-class M to {BOUND}; ranges equal K",
        finite.len(),
        residue.len()
    ))
}

fn criterion_5() -> Check {
    let s = shift();
    let s2 = s.mul(&s);
    let report = check_mi_space(&[s.clone(), s2.clone()]);
    let Verdict::Violation { pair, witness } = report.verdict else {
        return Err("{s, s²} was accepted as an MI-space".into());
    };
    let b = s.add(&s2);
    let t = b.adjoint().mul(&b).scalar_test();
    ensure(t == ScalarTest::NotScalar { witness: 0 }, || format!("(s+s²)*(s+s²): {t:?}"))?;
    let nb = naive_shift().add(&naive_shift().mul(&naive_shift()));
    let col0 = nb.adjoint().mul(&nb).column(0);
    let expect: std::collections::BTreeMap<u64, Coefficient> =
        [(0, Coefficient::from_int(2)), (1, one())].into_iter().collect();
    ensure(col0 == expect, || format!("pointwise oracle column 0: {col0:?}"))?;
    Ok(format!(
        "MI-VIOLATION at pair {pair:?} witness {witness}; (s+s²)*(s+s²) fails at column 0"
    ))
}

fn criterion_6() -> Check {
    let mut cases = vec![("s".to_string(), shift())];
    for n in [2u64, 3, 5] {
        for (r, g) in cuntz(n).0.into_iter().enumerate() {
            cases.push((format!("S{r} (n={n})"), g));
        }
    }
    for (name, a) in &cases {
        let r = adjoint_membership_check(a).map_err(|e| format!("{name}: {e}"))?;
        ensure(!r.adjoint_in_mi && r.witness.is_some(), || format!("{name}: {r:?}"))?;
        let w = r.witness.unwrap();
        let col = a.mul(&a.adjoint()).apply(w);
        ensure(col.len() != 1 || col[0].0 != w || col[0].1 != one(), || {
            format!("{name}: witness {w} is not a failing column")
        })?;
    }
    let u = adjoint_membership_check(&parity_swap()).map_err(|e| e.to_string())?;
    ensure(u.adjoint_in_mi && u.forced_unitary && u.consistent(), || format!("swap: {u:?}"))?;
    Ok(format!("{} non-unitary isometries rejected with witnesses; swap forced unitary", cases.len()))
}

fn criterion_7() -> Check {
    let (s, _) = cuntz(2);
    let r = product_membership_check(&s, &s[0], &s[1]).map_err(|e| e.to_string())?;
    ensure(!r.product_in_span() && r.consistent(), || format!("S0·S1: {r:?}"))?;
    for lambda in [Coefficient::from_int(3), Coefficient::gaussian(2, 1), Coefficient::zero()] {
        let b = Operator::scalar(lambda.clone());
        let r = product_membership_check(&s, &s[0], &b).map_err(|e| e.to_string())?;
        ensure(r.product_in_span() && r.consistent(), || format!("B = {lambda}·I: {r:?}"))?;
        let expect = vec![lambda.clone(), Coefficient::zero()];
        ensure(r.product == Some(expect), || format!("B = {lambda}·I: coefficients"))?;
    }
    let sh = shift();
    ensure(span_membership(&sh.mul(&sh), std::slice::from_ref(&sh)).is_none(), || "s² ∈ span(s)".into())?;
    let r = product_membership_check(std::slice::from_ref(&sh), &sh, &sh).map_err(|e| e.to_string())?;
    ensure(r.powers.iter().all(|(_, inside)| !inside) && r.consistent(), || format!("{r:?}"))?;
    Ok("AB ∉ span for B = S1, AB ∈ span for B ∈ ℂI, s² ∉ span(s)".into())
}

fn audit_corpus() -> Vec<Vec<Operator>> {
    let mut out: Vec<Vec<Operator>> = mi_pair_corpus()
        .into_iter()
        .map(|p| vec![p.a, p.b])
        .collect();
    for n in 2..=5 {
        out.push(cuntz(n).0);
    }
    let (s2, _) = cuntz(2);
    out.push(vec![s2[0].clone(), s2[0].add(&s2[1])]);
    out.push(vec![s2[0].clone(), s2[0].scale(&Coefficient::from_int(2))]);
    out.push(vec![shift()]);
    out.push(vec![Operator::identity()]);
    out.push(vec![parity_swap()]);
    for m in [IndexSet::finite([0, 1]), IndexSet::finite([3, 7, 8])] {
        if let Ok(Constructed::Exact(op)) = make_shift_with_wandering(&m) {
            out.push(vec![op]);
        }
    }
    out
}

fn criterion_8() -> Check {
    let corpus = audit_corpus();
    let mut wide = 0;
    for (k, gens) in corpus.iter().enumerate() {
        let report = check_mi_space(gens);
        ensure(report.is_mi_space(), || format!("corpus entry {k} is not an MI-space"))?;
        let findings = structural_audit(&report);
        if let Some(f) = findings.iter().find(|f| f.is_inconsistency()) {
            return Err(format!("entry {k}: {} {}", f.code, f.detail));
        }
        if report.dimension.unwrap_or(0) >= 2 {
            wide += 1;
            for v in orthogonalize(&report).map_err(|e| e.to_string())? {
                let m = multiplicity(&v).map_err(|e| format!("entry {k}: {e}"))?;
                ensure(m == Multiplicity::Infinite, || {
                    format!("entry {k}: basis vector {v} has multiplicity {m}")
                })?;
            }
        }
    }
    Ok(format!("{} spaces audited ({wide} of dimension ≥ 2), no inconsistency", corpus.len()))
}

fn criterion_9() -> Check {
    let mut rng = rng(0x5eed_0009);
    let mut compared = 0;
    for k in 0..200 {
        let (a, na) = random_product_operand(&mut rng);
        let (b, nb) = random_product_operand(&mut rng);
        ensure(first_mismatch(&a, &na, 64).is_none(), || format!("product {k}: A vs oracle"))?;
        ensure(first_mismatch(&a.mul(&b), &na.mul(&nb), 64).is_none(), || {
            format!("product {k}: AB vs oracle")
        })?;
        let r = cross_validate(&a, &b, 128);
        ensure(r.max_difference == 0.0, || format!("product {k}: difference {}", r.max_difference))?;
        compared += r.columns_compared;
    }

    let mut members: Vec<Operator> = Vec::new();
    for p in mi_pair_corpus() {
        members.push(commutator(&p.a, &p.b));
        members.push(p.a);
        members.push(p.b);
    }
    for n in 2..=5 {
        members.extend(cuntz(n).0);
    }
    members.push(shift());
    let mut worst: f64 = 0.0;
    for (k, a) in members.iter().enumerate() {
        let exact = inner_product(a, a).map_err(|w| format!("member {k}: not MI at {w}"))?;
        let exact = exact.re().to_f64().expect("finite");
        let est = norm_estimate(a, 512);
        let err = (est * est - exact).abs() / exact.max(1.0);
        worst = worst.max(err);
        ensure(err < 1e-9, || format!("member {k}: ‖A‖² ≈ {} vs ⟨A,A⟩ = {exact}", est * est))?;
    }
    Ok(format!(
        "200 products exact on {compared} safe columns; {} norms within {worst:e}",
        members.len()
    ))
}

fn criterion_10() -> Check {
    let corpus = mi_pair_corpus();
    let mut commuting = 0;
    for (k, p) in corpus.iter().enumerate() {
        let r = commutation_check(&p.a, &p.b).map_err(|e| format!("pair {k}: {e}"))?;
        ensure(r.consistent, || format!("pair {k}: {r:?}"))?;
        if r.commute {
            commuting += 1;
        }
    }
    Ok(format!("{} pairs consistent ({commuting} commuting)", corpus.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "Cuntz relations", criterion_1),
        (2, "commutator identity", criterion_2),
        (3, "orthonormal commutators", criterion_3),
        (4, "shift construction round trip", criterion_4),
        (5, "shift plus square counterexample", criterion_5),
        (6, "adjoint membership forces unitary", criterion_6),
        (7, "products leave the span", criterion_7),
        (8, "structural audit", criterion_8),
        (9, "numeric oracle equivalence", criterion_9),
        (10, "commute iff dependent", criterion_10),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, name, check) in criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {n:>2} ({name}): {detail} [{secs:.2}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {n:>2} ({name}): {detail} [{secs:.2}s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
