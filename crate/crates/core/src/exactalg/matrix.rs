use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<BigInt>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        IntMatrix { rows: rows.len(), cols, data: rows.iter().flatten().cloned().collect() }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let rows: Vec<Vec<BigInt>> =
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::from_rows(&rows)
    }

    /// Builds the matrix whose columns are the given vectors; `height` is used when there are none.
    pub fn from_columns(columns: &[Vec<BigInt>], height: usize) -> Self {
        let mut m = Self::zeros(columns.first().map_or(height, |c| c.len()), columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), m.rows, "ragged columns");
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
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

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &x[j]).sum())
            .collect()
    }

    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<BigInt>> = (0..self.rows).map(|i| self.row(i)).collect();
        hermite_rows(rows).len()
    }
}

/// Row Hermite normal form: unimodular row operations bring the rows to echelon form
/// with positive pivots and reduced entries above each pivot. Zero rows are dropped.
pub fn hermite_rows(rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let width = rows.first().map_or(0, |r| r.len());
    let mut aug: Vec<(Vec<BigInt>, Vec<BigInt>)> = rows.into_iter().map(|r| (r, Vec::new())).collect();
    let rank = echelonize(&mut aug, width);
    aug.truncate(rank);
    aug.into_iter().map(|(r, _)| r).collect()
}

// Brings the left blocks to Hermite form, carrying the right blocks along.
// Returns the rank; rows [rank..] have zero left blocks afterwards.
fn echelonize(aug: &mut [(Vec<BigInt>, Vec<BigInt>)], width: usize) -> usize {
    let mut pivots = Vec::new();
    let mut cur = 0;
    for col in 0..width {
        if cur == aug.len() {
            break;
        }
        loop {
            let best = (cur..aug.len())
                .filter(|&i| !aug[i].0[col].is_zero())
                .min_by(|&a, &b| aug[a].0[col].abs().cmp(&aug[b].0[col].abs()));
            let Some(best) = best else { break };
            aug.swap(cur, best);
            let mut done = true;
            for i in cur + 1..aug.len() {
                if aug[i].0[col].is_zero() {
                    continue;
                }
                let q = aug[i].0[col].div_floor(&aug[cur].0[col]);
                let (head, tail) = aug.split_at_mut(i);
                sub_mul(&mut tail[0], &head[cur], &q);
                if !tail[0].0[col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if aug[cur].0[col].is_zero() {
            continue;
        }
        if aug[cur].0[col].is_negative() {
            negate(&mut aug[cur]);
        }
        pivots.push(col);
        cur += 1;
    }
    for (k, &col) in pivots.iter().enumerate() {
        for i in 0..k {
            let q = aug[i].0[col].div_floor(&aug[k].0[col]);
            if !q.is_zero() {
                let (head, tail) = aug.split_at_mut(k);
                sub_mul(&mut head[i], &tail[0], &q);
            }
        }
    }
    cur
}

fn sub_mul(dst: &mut (Vec<BigInt>, Vec<BigInt>), src: &(Vec<BigInt>, Vec<BigInt>), q: &BigInt) {
    for (d, s) in dst.0.iter_mut().zip(&src.0) {
        *d -= q * s;
    }
    for (d, s) in dst.1.iter_mut().zip(&src.1) {
        *d -= q * s;
    }
}

fn negate(row: &mut (Vec<BigInt>, Vec<BigInt>)) {
    for x in row.0.iter_mut().chain(row.1.iter_mut()) {
        *x = -&*x;
    }
}

// [M^T | I] reduced; row i reads ((M u_i)^T | u_i^T) with U = (u_i) unimodular.
fn transposed_reduction(m: &IntMatrix) -> (Vec<(Vec<BigInt>, Vec<BigInt>)>, usize) {
    let n = m.cols();
    let mut aug: Vec<(Vec<BigInt>, Vec<BigInt>)> = (0..n)
        .map(|j| {
            let mut e = vec![BigInt::zero(); n];
            e[j] = BigInt::from(1);
            (m.column(j), e)
        })
        .collect();
    let rank = echelonize(&mut aug, m.rows());
    (aug, rank)
}

/// Lattice basis of `{x in Z^cols : Mx = 0}`, returned in row Hermite form.
pub fn int_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let (aug, rank) = transposed_reduction(m);
    let basis: Vec<Vec<BigInt>> = aug.into_iter().skip(rank).map(|(_, u)| u).collect();
    hermite_rows(basis)
}

/// Some integer solution of `Mx = b`, if one exists.
pub fn int_solve(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), m.rows(), "dimension mismatch");
    let (aug, rank) = transposed_reduction(m);
    let mut rest = b.to_vec();
    let mut x = vec![BigInt::zero(); m.cols()];
    for (row, u) in aug.iter().take(rank) {
        let p = row.iter().position(|v| !v.is_zero()).expect("pivot row");
        let (y, r) = rest[p].div_rem(&row[p]);
        if !r.is_zero() {
            return None;
        }
        for (t, v) in rest.iter_mut().zip(row) {
            *t -= &y * v;
        }
        for (t, v) in x.iter_mut().zip(u) {
            *t += &y * v;
        }
    }
    if rest.iter().all(|v| v.is_zero()) {
        Some(x)
    } else {
        None
    }
}
