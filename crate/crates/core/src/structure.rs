//! Zero/nonzero patterns of the state and output matrices.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoolMatrix {
    rows: usize,
    cols: usize,
    data: Vec<bool>,
}

impl BoolMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BoolMatrix { rows, cols, data: vec![false; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds from 0/1 rows. All rows must have `cols` entries.
    pub fn from_rows(rows: &[Vec<u8>], cols: usize) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidStructure(format!("row {i} has {} entries, expected {cols}", row.len())));
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => m.set(i, j, true),
                    _ => return Err(Error::InvalidStructure(format!("entry ({i},{j}) is {v}, expected 0 or 1"))),
                }
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|&b| b as u8).collect()).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }
}

/// The sensor→backbone link behind one output row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OutputSource {
    pub sensor: usize,
    pub backbone: usize,
}

/// Structural pair `(Ã, C̃)`: `Ã[i][j] = 1` allows state `j` to feed state
/// `i`; `C̃[r][j] = 1` makes output row `r` sense state `j`. Each output row
/// may only sense its own source sensor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StructuralPair {
    a: BoolMatrix,
    c: BoolMatrix,
    output_index: Vec<Option<OutputSource>>,
}

impl StructuralPair {
    pub fn new(a: BoolMatrix, c: BoolMatrix, output_index: Vec<Option<OutputSource>>) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::InvalidStructure(format!("state pattern is {}x{}", a.rows(), a.cols())));
        }
        if c.cols() != a.cols() {
            return Err(Error::InvalidStructure(format!(
                "output pattern has {} columns, state pattern has {}",
                c.cols(),
                a.cols()
            )));
        }
        if output_index.len() != c.rows() {
            return Err(Error::InvalidStructure(format!(
                "{} output rows but {} output sources",
                c.rows(),
                output_index.len()
            )));
        }
        for r in 0..c.rows() {
            for j in 0..c.cols() {
                if c.get(r, j) && output_index[r].map(|s| s.sensor) != Some(j) {
                    return Err(Error::InvalidStructure(format!("output row {r} senses state {j}, not its source sensor")));
                }
            }
        }
        Ok(StructuralPair { a, c, output_index })
    }

    /// Builds a pair whose output rows carry no backbone provenance; the
    /// source sensor of each row is the column of its nonzero entry.
    pub fn from_patterns(a: BoolMatrix, c: BoolMatrix) -> Result<Self> {
        let mut index = Vec::with_capacity(c.rows());
        for r in 0..c.rows() {
            let ones: Vec<usize> = (0..c.cols()).filter(|&j| c.get(r, j)).collect();
            match ones.as_slice() {
                [] => index.push(None),
                [j] => index.push(Some(OutputSource { sensor: *j, backbone: 0 })),
                _ => return Err(Error::InvalidStructure(format!("output row {r} has more than one nonzero entry"))),
            }
        }
        Self::new(a, c, index)
    }

    pub fn n_states(&self) -> usize {
        self.a.rows()
    }

    pub fn n_outputs(&self) -> usize {
        self.c.rows()
    }

    pub fn a(&self) -> &BoolMatrix {
        &self.a
    }

    pub fn c(&self) -> &BoolMatrix {
        &self.c
    }

    pub fn output_index(&self) -> &[Option<OutputSource>] {
        &self.output_index
    }

    pub fn output_used(&self, r: usize) -> bool {
        self.c.row(r).iter().any(|&b| b)
    }

    /// Removes the given states (rows and columns of `Ã`, columns of `C̃`).
    /// Output rows of removed sensors become all-zero; row count is kept.
    pub fn delete_states(&self, removed: &[usize]) -> StructuralPair {
        let n = self.n_states();
        let mut keep = vec![true; n];
        for &u in removed {
            keep[u] = false;
        }
        let mut new_index = vec![usize::MAX; n];
        let kept: Vec<usize> = (0..n).filter(|&j| keep[j]).collect();
        for (pos, &j) in kept.iter().enumerate() {
            new_index[j] = pos;
        }
        let mut a = BoolMatrix::zeros(kept.len(), kept.len());
        for (ni, &i) in kept.iter().enumerate() {
            for (nj, &j) in kept.iter().enumerate() {
                a.set(ni, nj, self.a.get(i, j));
            }
        }
        let mut c = BoolMatrix::zeros(self.n_outputs(), kept.len());
        let mut index = Vec::with_capacity(self.n_outputs());
        for r in 0..self.n_outputs() {
            match self.output_index[r] {
                Some(src) if keep[src.sensor] => {
                    let nj = new_index[src.sensor];
                    c.set(r, nj, self.c.get(r, src.sensor));
                    index.push(Some(OutputSource { sensor: nj, backbone: src.backbone }));
                }
                _ => index.push(None),
            }
        }
        StructuralPair { a, c, output_index: index }
    }

    /// Zeroes the given output rows.
    pub fn delete_outputs(&self, rows: &[usize]) -> StructuralPair {
        let mut out = self.clone();
        for &r in rows {
            for j in 0..out.c.cols() {
                out.c.set(r, j, false);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_output_row_on_foreign_column() {
        let a = BoolMatrix::identity(2);
        let c = BoolMatrix::from_rows(&[vec![0, 1]], 2).unwrap();
        let err = StructuralPair::new(a, c, vec![Some(OutputSource { sensor: 0, backbone: 0 })]);
        assert!(err.is_err());
    }

    #[test]
    fn deletion_zeroes_rows_of_removed_sensors() {
        let a = BoolMatrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 0], vec![0, 1, 1]], 3).unwrap();
        let c = BoolMatrix::from_rows(&[vec![1, 0, 0], vec![0, 0, 1]], 3).unwrap();
        let s = StructuralPair::from_patterns(a, c).unwrap();
        let d = s.delete_states(&[0]);
        assert_eq!(d.n_states(), 2);
        assert_eq!(d.n_outputs(), 2);
        assert!(!d.output_used(0));
        assert!(d.output_used(1));
        assert_eq!(d.a().to_rows(), vec![vec![1, 0], vec![1, 1]]);
        assert_eq!(d.c().to_rows(), vec![vec![0, 0], vec![0, 1]]);
    }

    #[test]
    fn from_rows_validates_entries() {
        assert!(BoolMatrix::from_rows(&[vec![2]], 1).is_err());
        assert!(BoolMatrix::from_rows(&[vec![1, 0]], 1).is_err());
    }
}
