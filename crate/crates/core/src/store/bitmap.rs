use std::fmt;

use crate::vocab::VersionOrdinal;

/// Presence bitstring over version ordinals. Version `m` lives at bit `m - 1`.
///
/// Trailing zero words are never stored, so two bitmaps with the same set
/// bits are equal regardless of how they were built.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct VersionBitmap {
    words: Vec<u64>,
}

impl VersionBitmap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(version: VersionOrdinal) -> Self {
        let mut b = Self::new();
        b.insert(version);
        b
    }

    pub fn insert(&mut self, version: VersionOrdinal) {
        let (w, bit) = split(version);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= bit;
    }

    pub fn remove(&mut self, version: VersionOrdinal) {
        let (w, bit) = split(version);
        if let Some(word) = self.words.get_mut(w) {
            *word &= !bit;
            self.trim();
        }
    }

    pub fn contains(&self, version: VersionOrdinal) -> bool {
        let (w, bit) = split(version);
        self.words.get(w).is_some_and(|word| word & bit != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Highest set version, if any.
    pub fn last(&self) -> Option<VersionOrdinal> {
        let top = *self.words.last()?;
        let bit = 63 - top.leading_zeros() as usize;
        Some(VersionOrdinal::from_bit_index((self.words.len() - 1) * 64 + bit))
    }

    pub fn and(&self, other: &Self) -> Self {
        let mut words: Vec<u64> = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        trim_words(&mut words);
        Self { words }
    }

    pub fn and_not(&self, other: &Self) -> Self {
        let mut words = self.words.clone();
        for (a, b) in words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
        trim_words(&mut words);
        Self { words }
    }

    pub fn union_with(&mut self, other: &Self) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = VersionOrdinal> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(VersionOrdinal::from_bit_index(wi * 64 + bit))
            })
        })
    }

    /// Adds 1 to `counts[m - 1]` for every set version `m`.
    pub fn accumulate_into(&self, counts: &mut [u64]) {
        for v in self.iter() {
            counts[v.bit_index()] += 1;
        }
    }

    /// `0`/`1` text of exactly `len` characters, version 1 leftmost.
    pub fn render(&self, len: usize) -> String {
        (0..len)
            .map(|i| if self.contains(VersionOrdinal::from_bit_index(i)) { '1' } else { '0' })
            .collect()
    }

    pub fn parse(text: &str) -> Option<Self> {
        let mut b = Self::new();
        for (i, c) in text.chars().enumerate() {
            match c {
                '1' => b.insert(VersionOrdinal::from_bit_index(i)),
                '0' => {}
                _ => return None,
            }
        }
        Some(b)
    }

    fn trim(&mut self) {
        trim_words(&mut self.words);
    }
}

fn split(version: VersionOrdinal) -> (usize, u64) {
    let i = version.bit_index();
    (i / 64, 1u64 << (i % 64))
}

fn trim_words(words: &mut Vec<u64>) {
    while words.last() == Some(&0) {
        words.pop();
    }
}

impl FromIterator<VersionOrdinal> for VersionBitmap {
    fn from_iter<I: IntoIterator<Item = VersionOrdinal>>(iter: I) -> Self {
        let mut b = Self::new();
        for v in iter {
            b.insert(v);
        }
        b
    }
}

impl fmt::Display for VersionBitmap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let len = self.last().map_or(0, |v| v.get() as usize);
        f.write_str(&self.render(len))
    }
}
