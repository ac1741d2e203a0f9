//! Affine maps `i ↦ (a·i + b) / d` with positive slope.
//!
//! Slopes are rational so that inverses stay in the class: the inverse of
//! `i ↦ 2i` is `j ↦ j/2`, defined on the evens.

use std::fmt;

use num_integer::Integer;

use crate::index_arith::IndexSet;

/// `i ↦ (a·i + b) / d`, normalised so that `gcd(a, |b|, d) = 1`.
///
/// Ordering is `(a, b, d)` and is used to break ties between lines meeting
/// at the same point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line {
    a: u64,
    b: i64,
    d: u64,
}

impl Line {
    /// Panics if `a` or `d` is zero.
    pub fn new(a: u64, b: i64, d: u64) -> Line {
        assert!(a > 0 && d > 0, "affine slope must be positive");
        let g = a.gcd(&d).gcd(&b.unsigned_abs());
        Line {
            a: a / g,
            b: b / g as i64,
            d: d / g,
        }
    }

    pub fn identity() -> Line {
        Line::new(1, 0, 1)
    }

    pub fn translation(b: i64) -> Line {
        Line::new(1, b, 1)
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn is_identity(&self) -> bool {
        *self == Line::identity()
    }

    /// Value at `i` if it is a natural number.
    pub fn eval(&self, i: u64) -> Option<u64> {
        let num = self.a as i128 * i as i128 + self.b as i128;
        let d = self.d as i128;
        if num < 0 || num % d != 0 {
            return None;
        }
        u64::try_from(num / d).ok()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Line) -> Line {
        let a = self.a as i128 * inner.a as i128;
        let b = self.a as i128 * inner.b as i128 + self.b as i128 * inner.d as i128;
        let d = self.d as i128 * inner.d as i128;
        let g = a.gcd(&d).gcd(&b.abs());
        Line::new(
            (a / g) as u64,
            i64::try_from(b / g).expect("affine offset overflow"),
            (d / g) as u64,
        )
    }

    pub fn inverse(&self) -> Line {
        Line::new(self.d, -self.b, self.a)
    }

    /// The unique natural `x` with `self(x) = other(x)`, if any.
    pub fn intersection(&self, other: &Line) -> Option<u64> {
        let coef = self.a as i128 * other.d as i128 - other.a as i128 * self.d as i128;
        if coef == 0 {
            return None;
        }
        let rhs = other.b as i128 * self.d as i128 - self.b as i128 * other.d as i128;
        if rhs % coef != 0 {
            return None;
        }
        let x = u64::try_from(rhs / coef).ok()?;
        self.eval(x).and(other.eval(x)).map(|_| x)
    }

    /// Points fixed by the line.
    pub fn fixed_points(&self) -> IndexSet {
        if self.is_identity() {
            return IndexSet::naturals();
        }
        match self.intersection(&Line::identity()) {
            Some(x) => IndexSet::finite([x]),
            None => IndexSet::empty(),
        }
    }

    /// `{i : (a·i + b)/d ≤ i}` as a real inequality.
    pub fn non_increasing_set(&self) -> IndexSet {
        let (a, b, d) = (self.a as i128, self.b as i128, self.d as i128);
        match a.cmp(&d) {
            std::cmp::Ordering::Equal => {
                if b <= 0 {
                    IndexSet::naturals()
                } else {
                    IndexSet::empty()
                }
            }
            std::cmp::Ordering::Greater => {
                if b > 0 {
                    IndexSet::empty()
                } else {
                    IndexSet::below(((-b) / (a - d)) as u64 + 1)
                }
            }
            std::cmp::Ordering::Less => {
                if b <= 0 {
                    IndexSet::naturals()
                } else {
                    IndexSet::at_least(Integer::div_ceil(&b, &(d - a)) as u64)
                }
            }
        }
    }

    /// Exact image of `domain`. Every point of `domain` must map to a
    /// natural number.
    pub fn image(&self, domain: &IndexSet) -> IndexSet {
        let (a, b, d) = (self.a as i128, self.b as i128, self.d as i128);
        let l = domain.modulus() as i128;
        let mut residues = Vec::new();
        let mut overrides = Vec::new();
        let mut modulus = 1;
        if !domain.residues().is_empty() {
            assert!((a * l) % d == 0, "line is not integral on its domain");
            let step = a * l / d;
            modulus = step as u64;
            for &r in domain.residues() {
                let num = a * r as i128 + b;
                assert!(num % d == 0, "line is not integral on its domain");
                let v0 = num / d;
                let c = v0.rem_euclid(step);
                residues.push(c as u64);
                let mut v = c;
                while v < v0 {
                    overrides.push((v as u64, false));
                    v += step;
                }
            }
            for &x in domain.removed() {
                if let Some(v) = self.eval(x) {
                    overrides.push((v, false));
                }
            }
        }
        for &x in domain.added() {
            let v = self.eval(x).expect("line is not integral on its domain");
            overrides.push((v, true));
        }
        IndexSet::from_parts(modulus, residues, overrides)
    }

    /// `{i ∈ domain : self(i) ∈ target}`.
    pub fn preimage(&self, domain: &IndexSet, target: &IndexSet) -> IndexSet {
        let (a, b, d) = (self.a as i128, self.b as i128, self.d as i128);
        let lt = target.modulus() as i128;
        let m = (domain.modulus() as i128).lcm(&(lt * d));
        let mut residues = Vec::new();
        if !domain.residues().is_empty() && !target.residues().is_empty() {
            for s in 0..m {
                if !domain.in_progression(s as u64) {
                    continue;
                }
                let num = a * s + b;
                if num % d != 0 {
                    continue;
                }
                let v = (num / d).rem_euclid(lt) as u64;
                if target.in_progression(v) {
                    residues.push(s as u64);
                }
            }
        }
        let mut candidates: Vec<u64> = domain
            .added()
            .iter()
            .chain(domain.removed())
            .copied()
            .collect();
        for &t in target.added().iter().chain(target.removed()) {
            let num = d * t as i128 - b;
            if num >= 0 && num % a == 0 {
                candidates.push((num / a) as u64);
            }
        }
        let mut i = 0u64;
        while a * (i as i128) + b < 0 {
            candidates.push(i);
            i += 1;
        }
        let overrides: Vec<(u64, bool)> = candidates
            .into_iter()
            .map(|i| {
                let hit = domain.contains(i) && self.eval(i).is_some_and(|v| target.contains(v));
                (i, hit)
            })
            .collect();
        IndexSet::from_parts(m as u64, residues, overrides)
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lin = if self.a == 1 { "i".to_string() } else { format!("{}i", self.a) };
        let body = match self.b.cmp(&0) {
            std::cmp::Ordering::Equal => lin,
            std::cmp::Ordering::Greater => format!("{lin}+{}", self.b),
            std::cmp::Ordering::Less => format!("{lin}-{}", -self.b),
        };
        if self.d == 1 {
            write!(f, "i↦{body}")
        } else if self.b == 0 {
            write!(f, "i↦{body}/{}", self.d)
        } else {
            write!(f, "i↦({body})/{}", self.d)
        }
    }
}
