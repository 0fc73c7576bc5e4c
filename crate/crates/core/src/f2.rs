//! Dense matrices over GF(2) with 64-bit word rows.

use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    words: usize,
    bits: Vec<u64>,
}

fn words_for(cols: usize) -> usize {
    cols.div_ceil(64)
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = words_for(cols);
        F2Matrix {
            rows,
            cols,
            words,
            bits: vec![0; rows * words],
        }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = F2Matrix::zeros(k, k);
        for i in 0..k {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = F2Matrix::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (c, &b) in row.iter().enumerate() {
                m.set(r, c, b);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        self.bits[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = &mut self.bits[r * self.words + c / 64];
        if value {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn col_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let w = self.words;
        let (a, b) = if dst < src {
            let (lo, hi) = self.bits.split_at_mut(src * w);
            (&mut lo[dst * w..(dst + 1) * w], &hi[..w])
        } else {
            let (lo, hi) = self.bits.split_at_mut(dst * w);
            (&mut hi[..w], &lo[src * w..(src + 1) * w])
        };
        for (x, y) in a.iter_mut().zip(b) {
            *x ^= *y;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.words {
            self.bits.swap(a * self.words + i, b * self.words + i);
        }
    }

    /// Reduced row echelon form; pivot columns ascending.
    pub fn echelon(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| m.get(i, c)) else {
                continue;
            };
            m.swap_rows(r, p);
            for i in 0..self.rows {
                if i != r && m.get(i, c) {
                    m.xor_rows(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// `self * x` over GF(2).
    pub fn mul_vec(&self, x: &[bool]) -> Vec<bool> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| (0..self.cols).filter(|&c| x[c] && self.get(r, c)).count() % 2 == 1)
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = F2Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Some `x` with `self * x = rhs`, or `None` if `rhs` is outside the column space.
    pub fn solve(&self, rhs: &[bool]) -> Option<Vec<bool>> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = F2Matrix::zeros(self.rows, self.cols + 1);
        for (r, &b) in rhs.iter().enumerate() {
            for c in 0..self.cols {
                if self.get(r, c) {
                    aug.set(r, c, true);
                }
            }
            aug.set(r, self.cols, b);
        }
        let e = aug.echelon();
        if e.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![false; self.cols];
        for (row, &p) in e.pivots.iter().enumerate() {
            x[p] = e.reduced.get(row, self.cols);
        }
        Some(x)
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Result of one elimination pass; rank and kernel both come from here.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: F2Matrix,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.reduced.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.reduced.cols).filter(|&c| !is_pivot[c]).collect()
    }

    /// Kernel vector attached to free column `f`: `x_f = 1`, other free
    /// columns 0, pivot entries read off the reduced rows.
    pub fn kernel_vector(&self, f: usize) -> Vec<bool> {
        let mut x = vec![false; self.reduced.cols];
        x[f] = true;
        for (row, &p) in self.pivots.iter().enumerate() {
            x[p] = self.reduced.get(row, f);
        }
        x
    }

    /// Kernel basis, one vector per free column, lowest column first.
    pub fn kernel_basis(&self) -> Vec<Vec<bool>> {
        self.free_columns()
            .into_iter()
            .map(|f| self.kernel_vector(f))
            .collect()
    }
}

/// Row space grown one row at a time, indexed by each row's lowest set bit.
pub struct RowBasis {
    cols: usize,
    lead: Vec<Option<Vec<u64>>>,
    rank: usize,
}

impl RowBasis {
    pub fn new(cols: usize) -> Self {
        RowBasis {
            cols,
            lead: vec![None; cols],
            rank: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Adds `row` if it is independent of the rows so far; returns whether it was.
    pub fn insert(&mut self, row: &[u64]) -> bool {
        assert_eq!(row.len(), words_for(self.cols));
        let mut x = row.to_vec();
        loop {
            let Some(p) = lowest_bit(&x) else {
                return false;
            };
            match &self.lead[p] {
                Some(b) => {
                    for (xi, bi) in x.iter_mut().zip(b) {
                        *xi ^= *bi;
                    }
                }
                None => {
                    self.lead[p] = Some(x);
                    self.rank += 1;
                    return true;
                }
            }
        }
    }
}

fn lowest_bit(x: &[u64]) -> Option<usize> {
    x.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}
