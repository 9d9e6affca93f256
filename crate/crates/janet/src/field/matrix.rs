//! Sparse matrices over the parameterized scalar field, with deterministic
//! reduced row-echelon form and left kernels.
//!
//! Pivot choice: leftmost column first; among candidate rows the one whose
//! pivot imposes the weakest genericity assumption (smallest squarefree
//! condition degree, then canonical polynomial order), then the sparsest row,
//! then lowest row index. The reduced form itself is canonical for the row
//! space, so pivot order only affects emitted conditions and running time.

use num_bigint::BigInt;
use num_traits::Signed;

use super::poly::Poly;
use super::scalar::{merge_conditions, GenericityCondition, ParamScalar};
use crate::error::JanetError;

/// Sorted sparse row: (column, nonzero scalar), ascending columns.
pub type SparseRow = Vec<(u32, ParamScalar)>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScalarMatrix {
    nvars: usize,
    ncols: usize,
    rows: Vec<SparseRow>,
}

/// r ← r − f·p (sparse merged walk); p must be sorted, r sorted on return.
fn axpy(r: &SparseRow, f: &ParamScalar, p: &SparseRow) -> SparseRow {
    let mut out = SparseRow::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < r.len() || j < p.len() {
        match (r.get(i), p.get(j)) {
            (Some((c1, v1)), Some((c2, v2))) => {
                if c1 < c2 {
                    out.push((*c1, v1.clone()));
                    i += 1;
                } else if c2 < c1 {
                    out.push((*c2, v2.mul(f).neg()));
                    j += 1;
                } else {
                    let v = v1.sub(&v2.mul(f));
                    if !v.is_zero() {
                        out.push((*c1, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
            (Some((c1, v1)), None) => {
                out.push((*c1, v1.clone()));
                i += 1;
            }
            (None, Some((c2, v2))) => {
                out.push((*c2, v2.mul(f).neg()));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Result of a reduced row-echelon computation.
#[derive(Clone, Debug)]
pub struct Rref {
    /// Canonical reduced matrix: one row per pivot, sorted by pivot column,
    /// pivot entries equal to one.
    pub matrix: ScalarMatrix,
    pub rank: usize,
    pub pivot_cols: Vec<u32>,
    pub conditions: Vec<GenericityCondition>,
}

impl ScalarMatrix {
    pub fn new(nvars: usize, ncols: usize) -> Self {
        ScalarMatrix { nvars, ncols, rows: Vec::new() }
    }

    pub fn from_rows(nvars: usize, ncols: usize, rows: Vec<SparseRow>) -> Self {
        for r in &rows {
            debug_assert!(r.windows(2).all(|w| w[0].0 < w[1].0));
            debug_assert!(r.iter().all(|(c, v)| (*c as usize) < ncols && !v.is_zero()));
        }
        ScalarMatrix { nvars, ncols, rows }
    }

    pub fn push_row(&mut self, row: SparseRow) {
        debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
        self.rows.push(row);
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &SparseRow {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: u32) -> ParamScalar {
        match self.rows[i].binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) => self.rows[i][k].1.clone(),
            Err(_) => ParamScalar::zero(self.nvars),
        }
    }

    pub fn stack(&self, other: &ScalarMatrix) -> ScalarMatrix {
        assert_eq!(self.ncols, other.ncols);
        assert_eq!(self.nvars, other.nvars);
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        ScalarMatrix { nvars: self.nvars, ncols: self.ncols, rows }
    }

    /// Keep the columns where `keep` is true, renumbering them in order.
    pub fn restrict_columns(&self, keep: &[bool]) -> ScalarMatrix {
        assert_eq!(keep.len(), self.ncols);
        let mut map = vec![u32::MAX; self.ncols];
        let mut next = 0u32;
        for (c, &k) in keep.iter().enumerate() {
            if k {
                map[c] = next;
                next += 1;
            }
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .filter(|(c, _)| keep[*c as usize])
                    .map(|(c, v)| (map[*c as usize], v.clone()))
                    .collect::<SparseRow>()
            })
            .filter(|r| !r.is_empty())
            .collect();
        ScalarMatrix { nvars: self.nvars, ncols: next as usize, rows }
    }

    pub fn specialize(
        &self,
        binding: &[Option<(BigInt, BigInt)>],
    ) -> Result<ScalarMatrix, JanetError> {
        let mut rows = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            let mut out = SparseRow::new();
            for (c, v) in r {
                let s = v.specialize(binding)?;
                if !s.is_zero() {
                    out.push((*c, s));
                }
            }
            rows.push(out);
        }
        Ok(ScalarMatrix { nvars: self.nvars, ncols: self.ncols, rows })
    }

    /// Deterministic reduced row-echelon form over K, accumulating the
    /// genericity conditions assumed by parameterized pivots.
    pub fn rref_generic(&self) -> Rref {
        let mut work: Vec<SparseRow> = self.rows.iter().filter(|r| !r.is_empty()).cloned().collect();
        let (pivots, mut conditions) = forward_eliminate(&mut work, self.ncols as u32);
        back_substitute(&mut work, &pivots, &mut conditions);
        let matrix = ScalarMatrix {
            nvars: self.nvars,
            ncols: self.ncols,
            rows: pivots.iter().map(|&(_, w)| work[w].clone()).collect(),
        };
        Rref {
            rank: pivots.len(),
            pivot_cols: pivots.iter().map(|&(c, _)| c).collect(),
            conditions,
            matrix,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref_generic().rank
    }

    /// Canonical basis of the left kernel {c : c·M = 0} as rows of a matrix
    /// with `nrows(self)` columns.
    pub fn kernel_left(&self) -> (ScalarMatrix, Vec<GenericityCondition>) {
        let m = self.ncols as u32;
        let mut work: Vec<SparseRow> = Vec::with_capacity(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            let mut row = r.clone();
            row.push((m + i as u32, ParamScalar::one(self.nvars)));
            work.push(row);
        }
        let (pivots, mut conditions) = forward_eliminate(&mut work, m);
        let mut used = vec![false; work.len()];
        for &(_, w) in &pivots {
            used[w] = true;
        }
        // Rows whose matrix part vanished carry kernel combinations in their
        // augmented tail.
        let mut kernel_rows: Vec<SparseRow> = Vec::new();
        for (w, row) in work.iter().enumerate() {
            if used[w] {
                continue;
            }
            debug_assert!(row.first().map_or(true, |(c, _)| *c >= m));
            let shifted: SparseRow = row.iter().map(|(c, v)| (c - m, v.clone())).collect();
            if !shifted.is_empty() {
                kernel_rows.push(shifted);
            }
        }
        let ker = ScalarMatrix { nvars: self.nvars, ncols: self.rows.len(), rows: kernel_rows };
        let reduced = ker.rref_generic();
        merge_conditions(&mut conditions, &reduced.conditions);
        (reduced.matrix, conditions)
    }

    pub fn transpose(&self) -> ScalarMatrix {
        let mut rows: Vec<SparseRow> = vec![Vec::new(); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for (c, v) in r {
                rows[*c as usize].push((i as u32, v.clone()));
            }
        }
        ScalarMatrix { nvars: self.nvars, ncols: self.rows.len(), rows }
    }

    /// Canonical basis of the right kernel {v : M·v = 0}, one solution per
    /// row of the result (each row has `ncols(self)` columns).
    pub fn kernel_right(&self) -> (ScalarMatrix, Vec<GenericityCondition>) {
        self.transpose().kernel_left()
    }

    /// Row · matrix product for a sparse covector over the rows of `self`.
    pub fn covector_apply(&self, cov: &SparseRow) -> SparseRow {
        let mut acc: std::collections::BTreeMap<u32, ParamScalar> = std::collections::BTreeMap::new();
        for (ri, f) in cov {
            for (c, v) in &self.rows[*ri as usize] {
                let add = v.mul(f);
                if add.is_zero() {
                    continue;
                }
                match acc.entry(*c) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(add);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let s = e.get().add(&add);
                        if s.is_zero() {
                            e.remove();
                        } else {
                            *e.get_mut() = s;
                        }
                    }
                }
            }
        }
        acc.into_iter().collect()
    }
}

/// Forward elimination restricted to pivot columns < bound (rows whose
/// leading column is ≥ bound are left untouched). Returns pivots as
/// (col, work index) in increasing column order.
fn forward_eliminate(
    work: &mut Vec<SparseRow>,
    bound: u32,
) -> (Vec<(u32, usize)>, Vec<GenericityCondition>) {
    let mut pivots: Vec<(u32, usize)> = Vec::new();
    let mut conditions: Vec<GenericityCondition> = Vec::new();
    let mut active: Vec<usize> = (0..work.len()).collect();
    loop {
        active.retain(|&i| !work[i].is_empty());
        let col = active
            .iter()
            .filter_map(|&i| work[i].first().map(|(c, _)| *c))
            .filter(|&c| c < bound)
            .min();
        let col = match col {
            Some(c) => c,
            None => break,
        };
        // Candidates: active rows leading at `col`.
        let mut best: Option<(u32, Poly, usize, usize)> = None; // (deg, cond, nnz, idx)
        for &i in &active {
            if work[i].first().map(|(c, _)| *c) != Some(col) {
                continue;
            }
            let num = work[i][0].1.num();
            let (deg, key) = if num.is_constant() {
                (0u32, Poly::zero(num.nvars()))
            } else {
                let sf = num.squarefree_part();
                (sf.total_degree(), sf)
            };
            let cand = (deg, key, work[i].len(), i);
            let better = match &best {
                None => true,
                Some(b) => {
                    (cand.0, &cand.1, cand.2, cand.3) < (b.0, &b.1, b.2, b.3)
                }
            };
            if better {
                best = Some(cand);
            }
        }
        let (_, cond_poly, _, pivot_idx) = best.expect("candidate row must exist");
        if !cond_poly.is_zero() {
            if let Some(c) = GenericityCondition::from_pivot(work[pivot_idx][0].1.num()) {
                if !conditions.contains(&c) {
                    conditions.push(c);
                }
            }
        }
        let pivot_val = work[pivot_idx][0].1.clone();
        let elim: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&i| i != pivot_idx && work[i].first().map(|(c, _)| *c) == Some(col))
            .collect();
        for i in elim {
            let f = work[i][0].1.div(&pivot_val);
            let prow = std::mem::take(&mut work[pivot_idx]);
            work[i] = axpy(&work[i], &f, &prow);
            work[pivot_idx] = prow;
        }
        active.retain(|&i| i != pivot_idx);
        pivots.push((col, pivot_idx));
    }
    (pivots, conditions)
}

/// Normalize pivot rows to monic and clear pivot columns above.
fn back_substitute(
    work: &mut [SparseRow],
    pivots: &[(u32, usize)],
    _conditions: &mut Vec<GenericityCondition>,
) {
    for k in (0..pivots.len()).rev() {
        let (col, w) = pivots[k];
        let inv = work[w][0].1.inv();
        if !inv.is_one() {
            for (_, v) in work[w].iter_mut() {
                *v = v.mul(&inv);
            }
        }
        // Eliminate this column from the earlier pivot rows.
        for &(_, wj) in &pivots[..k] {
            if let Ok(pos) = work[wj].binary_search_by_key(&col, |(c, _)| *c) {
                let f = work[wj][pos].1.clone();
                let prow = std::mem::take(&mut work[w]);
                work[wj] = axpy(&work[wj], &f, &prow);
                work[w] = prow;
            }
        }
    }
}

/// Scale a scalar row to a primitive integer-polynomial vector: clear all
/// denominators, divide by the common content, make the first nonzero entry's
/// leading coefficient positive. Canonical representative for generator rows.
pub fn normalize_row_content(row: &SparseRow, nvars: usize) -> SparseRow {
    if row.is_empty() {
        return Vec::new();
    }
    // lcm of denominators
    let mut lcm = Poly::one(nvars);
    for (_, v) in row {
        let g = Poly::gcd(&lcm, v.den());
        lcm = lcm.div_exact(&g).mul(v.den());
    }
    let mut nums: Vec<(u32, Poly)> = row
        .iter()
        .map(|(c, v)| (*c, v.num().mul(&lcm.div_exact(v.den()))))
        .collect();
    // common polynomial content
    let mut g = Poly::zero(nvars);
    for (_, p) in &nums {
        g = Poly::gcd(&g, p);
        if g.is_one() {
            break;
        }
    }
    if !g.is_one() && !g.is_zero() {
        for (_, p) in nums.iter_mut() {
            *p = p.div_exact(&g);
        }
    }
    if nums[0].1.leading_coeff().is_negative() {
        for (_, p) in nums.iter_mut() {
            *p = p.neg();
        }
    }
    nums.into_iter()
        .map(|(c, p)| (c, ParamScalar::from_poly(p)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(nvars: usize, n: i64) -> ParamScalar {
        ParamScalar::from_int(nvars, n)
    }

    fn var(nvars: usize, i: usize) -> ParamScalar {
        ParamScalar::from_poly(Poly::var(nvars, i))
    }

    /// Textbook dense elimination over the same scalars, used as an
    /// independent rank oracle for the sparse implementation.
    fn dense_rank_oracle(m: &ScalarMatrix) -> usize {
        let mut a: Vec<Vec<ParamScalar>> =
            vec![vec![ParamScalar::zero(m.nvars()); m.ncols()]; m.nrows()];
        for (i, r) in m.rows().iter().enumerate() {
            for (c, v) in r {
                a[i][*c as usize] = v.clone();
            }
        }
        let mut rank = 0usize;
        let mut row = 0usize;
        for col in 0..m.ncols() {
            let mut piv = None;
            for r in row..a.len() {
                if !a[r][col].is_zero() {
                    piv = Some(r);
                    break;
                }
            }
            let piv = match piv {
                Some(p) => p,
                None => continue,
            };
            a.swap(row, piv);
            for r in (row + 1)..a.len() {
                if !a[r][col].is_zero() {
                    let f = a[r][col].div(&a[row][col]);
                    for c in col..m.ncols() {
                        let t = a[row][c].mul(&f);
                        a[r][c] = a[r][c].sub(&t);
                    }
                }
            }
            row += 1;
            rank += 1;
            if row == a.len() {
                break;
            }
        }
        rank
    }

    /// Columns ordered (x22, x12, x11, x2, x1, x): the two-equation system
    /// with a trailing parameter multiple, the running branching example.
    fn branching_matrix(nvars: usize) -> ScalarMatrix {
        let a = var(nvars, 0);
        let a2 = a.mul(&a);
        ScalarMatrix::from_rows(
            nvars,
            6,
            vec![
                vec![(0, sc(nvars, 1))],
                vec![(1, sc(nvars, 1)), (4, a.clone())],
                vec![(4, a2)],
            ],
        )
    }

    #[test]
    fn generic_rank_with_condition() {
        let m = branching_matrix(1);
        let r = m.rref_generic();
        assert_eq!(r.rank, 3);
        assert_eq!(r.conditions.len(), 1);
        assert_eq!(r.conditions[0].display(&["a"]), "a");
        // Reduced rows are monic with the parameter eliminated.
        assert_eq!(r.matrix.entry(1, 4), ParamScalar::zero(1));
        assert_eq!(r.matrix.entry(2, 4), ParamScalar::one(1));
    }

    #[test]
    fn specialized_rank_drops_on_branch() {
        let m = branching_matrix(1);
        let z = m
            .specialize(&[Some((BigInt::from(0), BigInt::from(1)))])
            .unwrap();
        assert_eq!(z.rank(), 2);
        // Away from the branch the generic rank persists.
        let g = m
            .specialize(&[Some((BigInt::from(3), BigInt::from(1)))])
            .unwrap();
        assert_eq!(g.rank(), 3);
    }

    #[test]
    fn rref_is_idempotent_and_canonical() {
        let m = ScalarMatrix::from_rows(
            0,
            4,
            vec![
                vec![(0, sc(0, 2)), (1, sc(0, 4)), (3, sc(0, 2))],
                vec![(0, sc(0, 1)), (1, sc(0, 2)), (2, sc(0, 1))],
                vec![(2, sc(0, 3)), (3, sc(0, -3))],
            ],
        );
        let r1 = m.rref_generic();
        let r2 = r1.matrix.rref_generic();
        assert_eq!(r1.matrix, r2.matrix);
        assert_eq!(r1.rank, 2);
    }

    #[test]
    fn kernel_left_annihilates() {
        let m = ScalarMatrix::from_rows(
            0,
            3,
            vec![
                vec![(0, sc(0, 1)), (1, sc(0, 2))],
                vec![(1, sc(0, 1)), (2, sc(0, 1))],
                vec![(0, sc(0, 1)), (1, sc(0, 3)), (2, sc(0, 1))],
                vec![(0, sc(0, 2)), (1, sc(0, 5)), (2, sc(0, 1))],
            ],
        );
        let (ker, _) = m.kernel_left();
        assert_eq!(ker.nrows(), 2);
        for k in 0..ker.nrows() {
            let prod = m.covector_apply(ker.row(k));
            assert!(prod.is_empty(), "kernel row {} fails to annihilate", k);
        }
    }

    #[test]
    fn sparse_rank_matches_dense_oracle() {
        let mats = vec![
            branching_matrix(1),
            ScalarMatrix::from_rows(
                0,
                5,
                vec![
                    vec![(0, sc(0, 1)), (2, sc(0, -1)), (4, sc(0, 7))],
                    vec![(1, sc(0, 3)), (2, sc(0, 1))],
                    vec![(0, sc(0, 2)), (1, sc(0, 6)), (4, sc(0, 14))],
                    vec![(3, sc(0, 1))],
                    vec![(0, sc(0, 1)), (1, sc(0, 3)), (2, sc(0, -1)), (3, sc(0, 1)), (4, sc(0, 7))],
                ],
            ),
        ];
        for m in mats {
            assert_eq!(m.rank(), dense_rank_oracle(&m));
        }
    }

    #[test]
    fn row_content_normalization() {
        let half = ParamScalar::from_rat(0, 1, 2);
        let row: SparseRow = vec![(0, half.clone().neg()), (2, sc(0, -2))];
        let n = normalize_row_content(&row, 0);
        assert_eq!(n, vec![(0, sc(0, 1)), (2, sc(0, 4))]);
    }
}
