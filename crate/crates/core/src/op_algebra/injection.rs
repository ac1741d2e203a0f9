use std::fmt;

use thiserror::Error;

use super::coefficient::Coefficient;
use super::line::Line;
use super::normal_form::{normalize, GraphPiece};
use crate::index_arith::IndexSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InjectionError {
    #[error("piece {piece}: slope numerator and divisor must be positive")]
    BadSlope { piece: usize },
    #[error("piece {piece} does not send index {index} to a natural number")]
    NotIntegral { piece: usize, index: u64 },
    #[error("pieces {first} and {second} both contain domain index {witness}")]
    DomainOverlap {
        first: usize,
        second: usize,
        witness: u64,
    },
    #[error("pieces {first} and {second} both reach output index {witness}")]
    ImageOverlap {
        first: usize,
        second: usize,
        witness: u64,
    },
}

/// One affine branch `i ↦ (a·i + b)/d` on a domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffinePiece {
    domain: IndexSet,
    line: Line,
}

impl AffinePiece {
    /// Unchecked; use [`PartialInjection::validate`] for external input.
    pub fn new(domain: IndexSet, line: Line) -> AffinePiece {
        AffinePiece { domain, line }
    }

    pub fn domain(&self) -> &IndexSet {
        &self.domain
    }

    pub fn line(&self) -> Line {
        self.line
    }

    pub fn image(&self) -> IndexSet {
        self.line.image(&self.domain)
    }

    /// Checks that every domain point lands on a natural number.
    fn check(&self, piece: usize) -> Result<(), InjectionError> {
        let (a, b, d) = (
            self.line.a() as i128,
            self.line.b() as i128,
            self.line.d() as i128,
        );
        let l = self.domain.modulus();
        let bad = |index| InjectionError::NotIntegral { piece, index };
        for &r in self.domain.residues() {
            if (a * l as i128) % d != 0 {
                return Err(bad(r));
            }
            // first member of the class; the removed list is finite
            let first = (0..)
                .map(|q| q * l + r)
                .find(|x| self.domain.contains(*x))
                .expect("residue class has members");
            if (a * first as i128 + b) % d != 0 {
                return Err(bad(first));
            }
        }
        for &x in self.domain.added() {
            if self.line.eval(x).is_none() {
                return Err(bad(x));
            }
        }
        if let Some(m) = self.domain.first() {
            if self.line.eval(m).is_none() {
                return Err(bad(m));
            }
        }
        Ok(())
    }
}

/// An injective partial map ℕ ⇀ ℕ made of finitely many affine pieces with
/// disjoint domains and disjoint images, kept in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialInjection {
    pieces: Vec<AffinePiece>,
}

impl PartialInjection {
    /// Canonicalises pieces already known to be valid and disjoint.
    pub(crate) fn from_valid_pieces(pieces: impl IntoIterator<Item = AffinePiece>) -> Self {
        let graph = pieces.into_iter().map(|p| GraphPiece {
            weight: Coefficient::one(),
            line: p.line,
            domain: p.domain,
        });
        let mut pieces: Vec<AffinePiece> = normalize(graph)
            .into_iter()
            .map(|g| {
                debug_assert_eq!(g.weight, Coefficient::one());
                AffinePiece::new(g.domain, g.line)
            })
            .collect();
        pieces.sort();
        PartialInjection { pieces }
    }

    /// Checks integrality, disjoint domains and disjoint images, and returns
    /// the canonical map. Violations name the clashing pieces (input order)
    /// and the smallest witness index.
    pub fn validate(pieces: Vec<AffinePiece>) -> Result<Self, InjectionError> {
        let pieces: Vec<(usize, AffinePiece)> = pieces
            .into_iter()
            .enumerate()
            .filter(|(_, p)| !p.domain.is_empty())
            .collect();
        for (n, p) in &pieces {
            p.check(*n)?;
        }
        let images: Vec<IndexSet> = pieces.iter().map(|(_, p)| p.image()).collect();
        for x in 0..pieces.len() {
            for y in x + 1..pieces.len() {
                let (first, second) = (pieces[x].0, pieces[y].0);
                if let Some(witness) = pieces[x].1.domain.intersection(&pieces[y].1.domain).first() {
                    return Err(InjectionError::DomainOverlap {
                        first,
                        second,
                        witness,
                    });
                }
                if let Some(witness) = images[x].intersection(&images[y]).first() {
                    return Err(InjectionError::ImageOverlap {
                        first,
                        second,
                        witness,
                    });
                }
            }
        }
        Ok(Self::from_valid_pieces(pieces.into_iter().map(|(_, p)| p)))
    }

    pub fn empty() -> Self {
        PartialInjection { pieces: Vec::new() }
    }

    pub fn identity() -> Self {
        Self::identity_on(IndexSet::naturals())
    }

    pub fn identity_on(set: IndexSet) -> Self {
        Self::from_valid_pieces([AffinePiece::new(set, Line::identity())])
    }

    /// `i ↦ a·i + b` on ℕ. Panics if `a = 0`.
    pub fn affine(a: u64, b: u64) -> Self {
        Self::from_valid_pieces([AffinePiece::new(
            IndexSet::naturals(),
            Line::new(a, b as i64, 1),
        )])
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn eval(&self, i: u64) -> Option<u64> {
        self.pieces
            .iter()
            .find(|p| p.domain.contains(i))
            .and_then(|p| p.line.eval(i))
    }

    pub fn domain(&self) -> IndexSet {
        self.pieces
            .iter()
            .fold(IndexSet::empty(), |acc, p| acc.union(&p.domain))
    }

    pub fn image(&self) -> IndexSet {
        self.pieces
            .iter()
            .fold(IndexSet::empty(), |acc, p| acc.union(&p.image()))
    }

    /// Image of `set ∩ domain`.
    pub fn image_of(&self, set: &IndexSet) -> IndexSet {
        self.pieces.iter().fold(IndexSet::empty(), |acc, p| {
            acc.union(&p.line.image(&p.domain.intersection(set)))
        })
    }

    pub fn is_total(&self) -> bool {
        self.domain().is_naturals()
    }

    pub fn is_identity_on_domain(&self) -> bool {
        self.pieces.iter().all(|p| p.line.is_identity())
    }

    /// `self ∘ inner`, defined on `{i ∈ dom inner : inner(i) ∈ dom self}`.
    pub fn compose(&self, inner: &PartialInjection) -> PartialInjection {
        let mut out = Vec::new();
        for q in &inner.pieces {
            for p in &self.pieces {
                let domain = q.line.preimage(&q.domain, &p.domain);
                if !domain.is_empty() {
                    out.push(AffinePiece::new(domain, p.line.compose(&q.line)));
                }
            }
        }
        Self::from_valid_pieces(out)
    }

    pub fn inverse(&self) -> PartialInjection {
        Self::from_valid_pieces(
            self.pieces
                .iter()
                .map(|p| AffinePiece::new(p.image(), p.line.inverse())),
        )
    }

    pub fn restrict(&self, set: &IndexSet) -> PartialInjection {
        Self::from_valid_pieces(
            self.pieces
                .iter()
                .map(|p| AffinePiece::new(p.domain.intersection(set), p.line)),
        )
    }
}

impl fmt::Display for PartialInjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self
            .pieces
            .iter()
            .map(|p| format!("{} on {}", p.line, p.domain))
            .collect();
        write!(f, "[{}]", parts.join("; "))
    }
}
