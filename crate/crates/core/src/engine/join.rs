//! Hash join and MINUS shared by flat solutions and condensed rows.

use std::collections::HashMap;

use crate::dictionary::TermId;
use crate::store::VersionBitmap;

/// Bindings indexed by variable id.
pub(crate) type Solution = Vec<Option<TermId>>;

pub(crate) trait Row: Sized {
    fn solution(&self) -> &Solution;

    /// Rows only combine with rows of the same partition.
    fn partition(&self) -> u64;

    /// Join result of two compatible rows, if non-empty.
    fn merge(&self, other: &Self) -> Option<Self>;

    /// Applies MINUS elimination by a compatible row; true if nothing is left.
    fn subtract(&mut self, other: &Self) -> bool;
}

impl Row for Solution {
    fn solution(&self) -> &Solution {
        self
    }

    fn partition(&self) -> u64 {
        0
    }

    fn merge(&self, other: &Self) -> Option<Self> {
        compatible(self, other).then(|| merge_solutions(self, other))
    }

    fn subtract(&mut self, _: &Self) -> bool {
        true
    }
}

/// A solution valid in every version set in `versions` of one graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct CondensedRow {
    pub solution: Solution,
    pub graph: TermId,
    pub versions: VersionBitmap,
}

impl Row for CondensedRow {
    fn solution(&self) -> &Solution {
        &self.solution
    }

    fn partition(&self) -> u64 {
        self.graph.0
    }

    fn merge(&self, other: &Self) -> Option<Self> {
        if self.graph != other.graph || !compatible(&self.solution, &other.solution) {
            return None;
        }
        let versions = self.versions.and(&other.versions);
        (!versions.is_empty()).then(|| CondensedRow {
            solution: merge_solutions(&self.solution, &other.solution),
            graph: self.graph,
            versions,
        })
    }

    fn subtract(&mut self, other: &Self) -> bool {
        self.versions = self.versions.and_not(&other.versions);
        self.versions.is_empty()
    }
}

pub(crate) fn compatible(a: &Solution, b: &Solution) -> bool {
    a.iter().zip(b).all(|(x, y)| match (x, y) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    })
}

fn shares_binding(a: &Solution, b: &Solution) -> bool {
    a.iter().zip(b).any(|(x, y)| x.is_some() && y.is_some())
}

fn merge_solutions(a: &Solution, b: &Solution) -> Solution {
    a.iter().zip(b).map(|(x, y)| x.or(*y)).collect()
}

/// Variables bound in at least one row on each side.
fn shared_vars<R: Row>(left: &[R], right: &[R]) -> Vec<usize> {
    let width = left
        .first()
        .or(right.first())
        .map_or(0, |r| r.solution().len());
    let bound = |rows: &[R]| {
        let mut seen = vec![false; width];
        for r in rows {
            for (i, v) in r.solution().iter().enumerate() {
                seen[i] |= v.is_some();
            }
        }
        seen
    };
    let (l, r) = (bound(left), bound(right));
    (0..width).filter(|&i| l[i] && r[i]).collect()
}

fn key(sol: &Solution, vars: &[usize]) -> Option<Vec<TermId>> {
    vars.iter().map(|&v| sol[v]).collect()
}

/// Right-side rows bucketed by (partition, shared values); rows with an
/// unbound shared variable go to `loose` and are checked against every probe.
struct Index {
    buckets: HashMap<(u64, Vec<TermId>), Vec<usize>>,
    loose: Vec<usize>,
}

impl Index {
    fn build<R: Row>(rows: &[R], shared: &[usize]) -> Self {
        let mut buckets: HashMap<_, Vec<usize>> = HashMap::new();
        let mut loose = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            match key(r.solution(), shared) {
                Some(k) => buckets.entry((r.partition(), k)).or_default().push(i),
                None => loose.push(i),
            }
        }
        Self { buckets, loose }
    }

    /// Candidate right indices for `row`; all rows when its key is partial.
    fn candidates<'a, R: Row>(&'a self, row: &R, shared: &[usize], all: usize) -> Box<dyn Iterator<Item = usize> + 'a> {
        match key(row.solution(), shared) {
            Some(k) => {
                let hits = self
                    .buckets
                    .get(&(row.partition(), k))
                    .map_or(&[][..], Vec::as_slice);
                Box::new(hits.iter().chain(&self.loose).copied())
            }
            None => Box::new(0..all),
        }
    }
}

pub(crate) fn join<R: Row>(left: Vec<R>, right: Vec<R>) -> Vec<R> {
    if left.is_empty() || right.is_empty() {
        return Vec::new();
    }
    let shared = shared_vars(&left, &right);
    let index = Index::build(&right, &shared);
    let mut out = Vec::new();
    for l in &left {
        for i in index.candidates(l, &shared, right.len()) {
            if let Some(m) = l.merge(&right[i]) {
                out.push(m);
            }
        }
    }
    out
}

pub(crate) fn minus<R: Row>(left: Vec<R>, right: Vec<R>) -> Vec<R> {
    let shared = shared_vars(&left, &right);
    if shared.is_empty() {
        return left;
    }
    let index = Index::build(&right, &shared);
    let mut out = Vec::with_capacity(left.len());
    'rows: for mut l in left {
        let candidates: Vec<usize> = index.candidates(&l, &shared, right.len()).collect();
        for i in candidates {
            let r = &right[i];
            if r.partition() == l.partition()
                && compatible(l.solution(), r.solution())
                && shares_binding(l.solution(), r.solution())
                && l.subtract(r)
            {
                continue 'rows;
            }
        }
        out.push(l);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(vals: &[Option<u64>]) -> Solution {
        vals.iter().map(|v| v.map(TermId)).collect()
    }

    fn bits(text: &str) -> VersionBitmap {
        VersionBitmap::parse(text).unwrap()
    }

    #[test]
    fn unit_and_empty() {
        let rows = vec![s(&[Some(1), None]), s(&[Some(2), None])];
        assert_eq!(join(rows.clone(), vec![s(&[None, None])]), rows);
        assert!(join(rows.clone(), Vec::new()).is_empty());
    }

    #[test]
    fn partial_bindings_use_nested_path() {
        let left = vec![s(&[Some(1), None]), s(&[None, Some(5)])];
        let right = vec![s(&[Some(1), Some(5)]), s(&[Some(2), Some(6)])];
        let out = join(left, right);
        assert_eq!(out, vec![s(&[Some(1), Some(5)]), s(&[Some(1), Some(5)])]);
    }

    #[test]
    fn minus_rules() {
        let left = vec![s(&[Some(1), None]), s(&[Some(2), None])];
        assert!(minus(left.clone(), left.clone()).is_empty());
        // disjoint variables never eliminate
        assert_eq!(minus(left.clone(), vec![s(&[None, Some(9)])]), left);
        assert_eq!(minus(left, vec![s(&[Some(2), Some(9)])]), vec![s(&[Some(1), None])]);
    }

    #[test]
    fn condensed_rows_and_bitmaps() {
        let row = |v: u64, g: u64, b: &str| CondensedRow {
            solution: s(&[Some(v)]),
            graph: TermId(g),
            versions: bits(b),
        };
        let out = join(vec![row(1, 0, "11")], vec![row(1, 0, "01"), row(1, 7, "11")]);
        assert_eq!(out, vec![row(1, 0, "01")]);
        assert!(join(vec![row(1, 0, "10")], vec![row(1, 0, "01")]).is_empty());
        let out = minus(vec![row(1, 0, "111"), row(2, 0, "11")], vec![row(1, 0, "010"), row(1, 3, "111")]);
        assert_eq!(out, vec![row(1, 0, "101"), row(2, 0, "11")]);
        let gone = minus(vec![row(1, 0, "11")], vec![row(1, 0, "10"), row(1, 0, "01")]);
        assert!(gone.is_empty());
    }
}
