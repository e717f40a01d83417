//! Small dense linear algebra over Z2 with rows packed into `u64`.

/// Square or rectangular matrix over Z2, at most 64 columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Z2Matrix {
    rows: Vec<u64>,
    cols: usize,
}

impl Z2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(cols <= 64, "Z2Matrix supports at most 64 columns");
        Z2Matrix {
            rows: vec![0; rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        if value {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    /// Row vector times matrix: `x · M`, with `x` a bitmask over rows.
    pub fn left_mul(&self, x: u64) -> u64 {
        let mut out = 0;
        for (i, row) in self.rows.iter().enumerate() {
            if x >> i & 1 == 1 {
                out ^= row;
            }
        }
        out
    }

    /// Bilinear form `xᵀ M y`.
    pub fn form(&self, x: u64, y: u64) -> u8 {
        (self.left_mul(x) & y).count_ones() as u8 & 1
    }

    pub fn transpose(&self) -> Z2Matrix {
        let mut t = Z2Matrix::zeros(self.cols, self.rows.len());
        for i in 0..self.rows.len() {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows.len() == self.cols && *self == self.transpose()
    }

    /// Inverse by Gauss-Jordan; `None` if singular.
    pub fn inverse(&self) -> Option<Z2Matrix> {
        let n = self.rows.len();
        if n != self.cols {
            return None;
        }
        let mut a = self.rows.clone();
        let mut inv = Z2Matrix::identity(n).rows;
        for col in 0..n {
            let pivot = (col..n).find(|&r| a[r] >> col & 1 == 1)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            for r in 0..n {
                if r != col && a[r] >> col & 1 == 1 {
                    a[r] ^= a[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Some(Z2Matrix { rows: inv, cols: n })
    }
}

/// Incremental row-echelon basis that remembers how each reduced vector was
/// assembled from the inserted ones.
#[derive(Clone, Debug, Default)]
pub struct Z2Span {
    /// (pivot bit, reduced vector, combination of inserted indices)
    rows: Vec<(u32, u64, u64)>,
    inserted: usize,
}

impl Z2Span {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current rows, returning the remainder and the
    /// combination (over inserted indices) that was subtracted.
    pub fn reduce(&self, mut v: u64) -> (u64, u64) {
        let mut combo = 0;
        for &(pivot, row, c) in &self.rows {
            if v >> pivot & 1 == 1 {
                v ^= row;
                combo ^= c;
            }
        }
        (v, combo)
    }

    /// Inserts `v`; returns `true` if it increased the rank. Every call consumes
    /// one index, whether independent or not.
    pub fn insert(&mut self, v: u64) -> bool {
        let idx = self.inserted;
        self.inserted += 1;
        assert!(idx < 64, "Z2Span tracks at most 64 insertions");
        let (rem, combo) = self.reduce(v);
        if rem == 0 {
            return false;
        }
        let pivot = rem.trailing_zeros();
        let c = combo ^ (1 << idx);
        for row in &mut self.rows {
            if row.1 >> pivot & 1 == 1 {
                row.1 ^= rem;
                row.2 ^= c;
            }
        }
        self.rows.push((pivot, rem, c));
        true
    }

    /// Expresses `v` as a combination of inserted vectors, if it lies in the span.
    pub fn express(&self, v: u64) -> Option<u64> {
        let (rem, combo) = self.reduce(v);
        (rem == 0).then_some(combo)
    }
}

pub fn parity(x: u64) -> u8 {
    (x.count_ones() & 1) as u8
}
