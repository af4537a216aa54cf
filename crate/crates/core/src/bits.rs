//! Dense bit containers backing coin sets and pair relations.

use smallvec::SmallVec;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

/// A fixed-universe bit set over `0..n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub(crate) struct BitSet {
    words: SmallVec<[u64; 4]>,
}

impl BitSet {
    pub(crate) fn new(n: usize) -> Self {
        BitSet {
            words: SmallVec::from_elem(0, words_for(n)),
        }
    }

    pub(crate) fn from_indices(n: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::new(n);
        for i in idx {
            s.insert(i);
        }
        s
    }

    #[inline]
    pub(crate) fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub(crate) fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    #[cfg(test)]
    pub(crate) fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn union_with(&mut self, other: &[u64]) {
        for (a, b) in self.words.iter_mut().zip(other) {
            *a |= *b;
        }
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        iter_bits(&self.words)
    }
}

pub(crate) fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            }
        })
    })
}

/// Square boolean matrix, row-major, one bit per entry.
///
/// Row `f`, column `c` set means the ordered pair `(f, c)` is present.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) struct BitMatrix {
    n: usize,
    wpr: usize,
    words: SmallVec<[u64; 16]>,
}

impl BitMatrix {
    pub(crate) fn empty(n: usize) -> Self {
        let wpr = words_for(n);
        BitMatrix {
            n,
            wpr,
            words: SmallVec::from_elem(0, n * wpr),
        }
    }

    /// All entries set; the diagonal only when `diagonal` is true.
    pub(crate) fn full(n: usize, diagonal: bool) -> Self {
        let mut m = Self::empty(n);
        for r in 0..n {
            let row = m.row_mut(r);
            for c in 0..n {
                row[c / 64] |= 1 << (c % 64);
            }
            if !diagonal {
                row[r / 64] &= !(1 << (r % 64));
            }
        }
        m
    }

    #[inline]
    pub(crate) fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub(crate) fn row(&self, r: usize) -> &[u64] {
        &self.words[r * self.wpr..(r + 1) * self.wpr]
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.words[r * self.wpr..(r + 1) * self.wpr]
    }

    #[inline]
    pub(crate) fn get(&self, r: usize, c: usize) -> bool {
        self.words[r * self.wpr + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, r: usize, c: usize) {
        self.words[r * self.wpr + c / 64] |= 1 << (c % 64);
    }

    #[inline]
    pub(crate) fn clear(&mut self, r: usize, c: usize) {
        self.words[r * self.wpr + c / 64] &= !(1 << (c % 64));
    }

    #[inline]
    pub(crate) fn row_is_empty(&self, r: usize) -> bool {
        self.row(r).iter().all(|&w| w == 0)
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub(crate) fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Rows with at least one entry.
    pub(crate) fn row_support(&self) -> BitSet {
        BitSet::from_indices(self.n, (0..self.n).filter(|&r| !self.row_is_empty(r)))
    }

    /// Union of all rows.
    pub(crate) fn column_support(&self) -> BitSet {
        let mut s = BitSet::new(self.n);
        for r in 0..self.n {
            s.union_with(self.row(r));
        }
        s
    }

    pub(crate) fn iter_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |r| iter_bits(self.row(r)).map(move |c| (r, c)))
    }

    /// Number of unordered off-diagonal pairs present in both directions.
    pub(crate) fn double_count(&self) -> usize {
        let mut d = 0;
        for r in 0..self.n {
            for c in iter_bits(self.row(r)) {
                if c > r && self.get(c, r) {
                    d += 1;
                }
            }
        }
        d
    }

    pub(crate) fn without_diagonal(&self) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m.clear(i, i);
        }
        m
    }

    pub(crate) fn diagonal_count(&self) -> usize {
        (0..self.n).filter(|&i| self.get(i, i)).count()
    }

    pub(crate) fn is_subset_of(&self, other: &BitMatrix) -> bool {
        self.n == other.n && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }
}
