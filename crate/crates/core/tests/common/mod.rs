//! Shared corpus and an independent pointwise oracle.
//!
//! `Naive` operators are sums of coefficient × word in elementary basis maps,
//! evaluated column by column by following the letters. Nothing here uses
//! the library's normal forms, so agreement with `Operator::apply` checks
//! products, adjoints and canonicalisation independently.

#![allow(dead_code)]

use std::collections::BTreeMap;

use isocalc::constructions::make_cuntz;
use isocalc::index_arith::IndexSet;
use isocalc::op_algebra::{AffinePiece, Coefficient, Line, Operator, PartialInjection};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `i ↦ n·i + r` and friends; `Adj` letters run the map backwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    Affine { n: u64, r: u64 },
    AffineAdj { n: u64, r: u64 },
    /// Exchange `2k ↔ 2k+1`.
    Swap,
}

impl Letter {
    fn eval(self, i: u64) -> Option<u64> {
        match self {
            Letter::Affine { n, r } => Some(n * i + r),
            Letter::AffineAdj { n, r } => (i >= r && (i - r).is_multiple_of(n)).then(|| (i - r) / n),
            Letter::Swap => Some(i ^ 1),
        }
    }

    fn adjoint(self) -> Letter {
        match self {
            Letter::Affine { n, r } => Letter::AffineAdj { n, r },
            Letter::AffineAdj { n, r } => Letter::Affine { n, r },
            Letter::Swap => Letter::Swap,
        }
    }
}

/// `Σ c·w` where the word `w` applies its letters right to left.
#[derive(Debug, Clone, Default)]
pub struct Naive {
    pub terms: Vec<(Coefficient, Vec<Letter>)>,
}

impl Naive {
    pub fn letter(l: Letter) -> Naive {
        Naive {
            terms: vec![(Coefficient::one(), vec![l])],
        }
    }

    pub fn identity() -> Naive {
        Naive {
            terms: vec![(Coefficient::one(), vec![])],
        }
    }

    pub fn column(&self, i: u64) -> BTreeMap<u64, Coefficient> {
        let mut out: BTreeMap<u64, Coefficient> = BTreeMap::new();
        for (c, word) in &self.terms {
            let mut cur = Some(i);
            for l in word.iter().rev() {
                cur = cur.and_then(|x| l.eval(x));
            }
            if let Some(j) = cur {
                let e = out.entry(j).or_insert_with(Coefficient::zero);
                *e = &*e + c;
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    pub fn add(&self, other: &Naive) -> Naive {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Naive { terms }
    }

    pub fn scale(&self, k: &Coefficient) -> Naive {
        Naive {
            terms: self.terms.iter().map(|(c, w)| (c * k, w.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Naive) -> Naive {
        self.add(&other.scale(&Coefficient::from_int(-1)))
    }

    pub fn mul(&self, other: &Naive) -> Naive {
        let mut terms = Vec::new();
        for (c1, w1) in &self.terms {
            for (c2, w2) in &other.terms {
                let mut w = w1.clone();
                w.extend(w2.iter().copied());
                terms.push((c1 * c2, w));
            }
        }
        Naive { terms }
    }

    pub fn adjoint(&self) -> Naive {
        Naive {
            terms: self
                .terms
                .iter()
                .map(|(c, w)| (c.conj(), w.iter().rev().map(|l| l.adjoint()).collect()))
                .collect(),
        }
    }
}

/// Column `i` of a library operator as a map.
pub fn op_column(op: &Operator, i: u64) -> BTreeMap<u64, Coefficient> {
    op.apply(i).into_iter().collect()
}

/// First column below `n` where the two disagree.
pub fn first_mismatch(op: &Operator, naive: &Naive, n: u64) -> Option<u64> {
    (0..n).find(|&i| op_column(op, i) != naive.column(i))
}

/// Checks `op = λ·I` pointwise on `0..n` with the naive oracle.
pub fn naive_is_scalar(naive: &Naive, lambda: &Coefficient, n: u64) -> bool {
    (0..n).all(|i| {
        let col = naive.column(i);
        if lambda.is_zero() {
            col.is_empty()
        } else {
            col.len() == 1 && col.get(&i) == Some(lambda)
        }
    })
}

pub fn shift() -> Operator {
    Operator::from_map(PartialInjection::affine(1, 1))
}

pub fn naive_shift() -> Naive {
    Naive::letter(Letter::Affine { n: 1, r: 1 })
}

pub fn parity_swap() -> Operator {
    Operator::from_map(
        PartialInjection::validate(vec![
            AffinePiece::new(IndexSet::evens(), Line::translation(1)),
            AffinePiece::new(IndexSet::odds(), Line::translation(-1)),
        ])
        .expect("parity swap is a bijection"),
    )
}

pub fn cuntz(n: u64) -> (Vec<Operator>, Vec<Naive>) {
    let ops = make_cuntz(n).expect("n ≥ 2");
    let naive = (0..n)
        .map(|r| Naive::letter(Letter::Affine { n, r }))
        .collect();
    (ops, naive)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p/q + (r/s)i` with `|p|, |r| ≤ 9` and `1 ≤ q, s ≤ 9`.
pub fn random_coefficient(rng: &mut impl Rng) -> Coefficient {
    Coefficient::from_ratios(
        rng.gen_range(-9..=9),
        rng.gen_range(1..=9),
        rng.gen_range(-9..=9),
        rng.gen_range(1..=9),
    )
}

/// Coefficients whose parts are exact in binary floating point.
pub fn random_dyadic(rng: &mut impl Rng) -> Coefficient {
    Coefficient::from_ratios(
        rng.gen_range(-9..=9),
        1 << rng.gen_range(0..=3),
        rng.gen_range(-9..=9),
        1 << rng.gen_range(0..=3),
    )
}

/// A combination of at most three generators of one Cuntz family.
pub fn random_combination(
    rng: &mut ChaCha8Rng,
    ops: &[Operator],
    naive: &[Naive],
    coeff: fn(&mut ChaCha8Rng) -> Coefficient,
) -> (Operator, Naive) {
    let count = rng.gen_range(1..=3usize.min(ops.len()));
    let mut op = Operator::zero();
    let mut nv = Naive::default();
    for _ in 0..count {
        let r = rng.gen_range(0..ops.len());
        let c = coeff(rng);
        op = op.add(&ops[r].scale(&c));
        nv = nv.add(&naive[r].scale(&c));
    }
    (op, nv)
}

/// One pair `(A, B)` in the span of a Cuntz family.
pub struct MiPair {
    pub n: u64,
    pub a: Operator,
    pub b: Operator,
    pub naive_a: Naive,
    pub naive_b: Naive,
}

/// The deterministic corpus of 200 pairs: `n ∈ {2, 3, 4}`, at most three
/// terms, numerators and denominators at most nine.
pub fn mi_pair_corpus() -> Vec<MiPair> {
    let mut rng = rng(0x5eed_0001);
    (0..200)
        .map(|_| {
            let n = rng.gen_range(2..=4);
            let (ops, naive) = cuntz(n);
            let (a, naive_a) = random_combination(&mut rng, &ops, &naive, random_coefficient);
            let (b, naive_b) = random_combination(&mut rng, &ops, &naive, random_coefficient);
            MiPair {
                n,
                a,
                b,
                naive_a,
                naive_b,
            }
        })
        .collect()
}

/// A random word operator of the exact class (products and adjoints of
/// Cuntz generators and the shift) with dyadic coefficients.
pub fn random_product_operand(rng: &mut impl Rng) -> (Operator, Naive) {
    let letters = [
        (Letter::Affine { n: 2, r: 0 }, PartialInjection::affine(2, 0)),
        (Letter::Affine { n: 2, r: 1 }, PartialInjection::affine(2, 1)),
        (Letter::Affine { n: 3, r: 2 }, PartialInjection::affine(3, 2)),
        (Letter::Affine { n: 1, r: 1 }, PartialInjection::affine(1, 1)),
    ];
    let terms = rng.gen_range(1..=3);
    let mut op = Operator::zero();
    let mut nv = Naive::default();
    for _ in 0..terms {
        let len = rng.gen_range(0..=2);
        let mut word_op = Operator::identity();
        let mut word_nv = Naive::identity();
        for _ in 0..len {
            let (l, f) = letters[rng.gen_range(0..letters.len())].clone();
            let (mut lo, mut ln) = (Operator::from_map(f), Naive::letter(l));
            if rng.gen_bool(0.5) {
                lo = lo.adjoint();
                ln = ln.adjoint();
            }
            word_op = word_op.mul(&lo);
            word_nv = word_nv.mul(&ln);
        }
        let c = random_dyadic(rng);
        op = op.add(&word_op.scale(&c));
        nv = nv.add(&word_nv.scale(&c));
    }
    (op, nv)
}
