//! Canonical presentation of weighted graphs of piecewise-affine maps.
//!
//! An operator in the affine class is a finite sum `Σ c·V_f`, i.e. a finite
//! set of weighted graph points `(i, j, w)` described by `(weight, line,
//! domain)` triples. Different sums can describe the same matrix, so we pick
//! one presentation per matrix:
//!
//! * A line is *generic* at `i` when, along the residue class of `i`, the
//!   matrix has infinitely many nonzero entries on that line. This notion
//!   does not depend on the presentation.
//! * Every nonzero entry `(i, j)` is attached to the smallest line generic
//!   at `i` that passes through `(i, j)`, or to the translation `i ↦ i + (j-i)`
//!   when no generic line passes through it.
//! * Entries are grouped by `(line, weight)`; each group's domain is an
//!   [`IndexSet`], which is canonical.
//!
//! Injections use the same routine with all weights equal to one.

use std::collections::{BTreeMap, BTreeSet};

use super::coefficient::Coefficient;
use super::line::Line;
use crate::index_arith::IndexSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct GraphPiece {
    pub weight: Coefficient,
    pub line: Line,
    pub domain: IndexSet,
}

/// Splits the pieces sharing one line into disjoint sets of constant total
/// weight. Zero-weight sets are dropped.
fn weight_partition(pieces: &[(Coefficient, IndexSet)]) -> Vec<(Coefficient, IndexSet)> {
    let mut cur: Vec<(Coefficient, IndexSet)> = Vec::new();
    for (c, dom) in pieces {
        let mut next: BTreeMap<Coefficient, IndexSet> = BTreeMap::new();
        let mut rest = dom.clone();
        let push = |w: Coefficient, s: IndexSet, next: &mut BTreeMap<Coefficient, IndexSet>| {
            if s.is_empty() {
                return;
            }
            let merged = match next.remove(&w) {
                Some(prev) => prev.union(&s),
                None => s,
            };
            next.insert(w, merged);
        };
        for (w, s) in cur.drain(..) {
            let inside = s.intersection(dom);
            let outside = s.difference(dom);
            rest = rest.difference(&inside);
            push(w.clone(), outside, &mut next);
            push(&w + c, inside, &mut next);
        }
        push(c.clone(), rest, &mut next);
        cur = next.into_iter().filter(|(w, _)| !w.is_zero()).collect();
    }
    cur
}

pub(crate) fn normalize(pieces: impl IntoIterator<Item = GraphPiece>) -> Vec<GraphPiece> {
    let mut by_line: BTreeMap<Line, Vec<(Coefficient, IndexSet)>> = BTreeMap::new();
    for p in pieces {
        if p.weight.is_zero() || p.domain.is_empty() {
            continue;
        }
        by_line.entry(p.line).or_default().push((p.weight, p.domain));
    }
    let parts: BTreeMap<Line, Vec<(Coefficient, IndexSet)>> = by_line
        .into_iter()
        .map(|(line, list)| (line, weight_partition(&list)))
        .filter(|(_, list)| !list.is_empty())
        .collect();

    let generic: BTreeMap<Line, IndexSet> = parts
        .iter()
        .map(|(line, list)| {
            let support = list
                .iter()
                .fold(IndexSet::empty(), |acc, (_, s)| acc.union(s));
            (*line, support.progression_part())
        })
        .collect();

    let lines: Vec<Line> = parts.keys().copied().collect();
    let mut special = BTreeSet::new();
    for (n, l1) in lines.iter().enumerate() {
        for l2 in &lines[n + 1..] {
            if let Some(x) = l1.intersection(l2) {
                special.insert(x);
            }
        }
    }
    let special_set = IndexSet::finite(special.iter().copied());

    let mut groups: BTreeMap<(Line, Coefficient), (Vec<IndexSet>, Vec<u64>)> = BTreeMap::new();
    let add_point = |line: Line, w: Coefficient, i: u64, groups: &mut BTreeMap<_, (Vec<IndexSet>, Vec<u64>)>| {
        groups.entry((line, w)).or_default().1.push(i);
    };

    for (line, list) in &parts {
        let gen = &generic[line];
        for (w, s) in list {
            let bulk = s.intersection(gen).difference(&special_set);
            if !bulk.is_empty() {
                groups.entry((*line, w.clone())).or_default().0.push(bulk);
            }
            let stray = s.difference(gen).difference(&special_set);
            debug_assert!(stray.is_finite());
            for &i in stray.added() {
                let j = line.eval(i).expect("graph piece off its domain");
                add_point(Line::translation(j as i64 - i as i64), w.clone(), i, &mut groups);
            }
        }
    }

    for &i in &special {
        let mut column: BTreeMap<u64, Coefficient> = BTreeMap::new();
        for (line, list) in &parts {
            for (w, s) in list {
                if s.contains(i) {
                    let j = line.eval(i).expect("graph piece off its domain");
                    *column.entry(j).or_insert_with(Coefficient::zero) += w;
                }
            }
        }
        for (j, w) in column {
            if w.is_zero() {
                continue;
            }
            let owner = lines
                .iter()
                .filter(|l| generic[l].contains(i) && l.eval(i) == Some(j))
                .min()
                .copied()
                .unwrap_or_else(|| Line::translation(j as i64 - i as i64));
            add_point(owner, w, i, &mut groups);
        }
    }

    groups
        .into_iter()
        .map(|((line, weight), (sets, points))| {
            let domain = sets
                .iter()
                .fold(IndexSet::finite(points), |acc, s| acc.union(s));
            GraphPiece {
                weight,
                line,
                domain,
            }
        })
        .collect()
}
