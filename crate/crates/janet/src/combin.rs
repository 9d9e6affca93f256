//! Multi-index enumeration and the canonical jet-column order.
//!
//! Columns of a jet space are pairs (unknown, multi-index). They are sorted
//! by total degree descending, then class descending, then a reverse scan of
//! the exponents (larger last-exponent first), then by unknown index. With
//! this order row reduction solves each equation for its highest-class
//! derivative, columns of degree ≤ q' form a suffix (so projection keeps
//! rows supported on a tail segment), and columns of top degree form a
//! prefix (so the symbol is a leading block).

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::field::poly::Monomial;

pub fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Number of multi-indices in n variables of degree exactly d.
pub fn count_of_degree(n: usize, d: u32) -> usize {
    if n == 0 {
        return if d == 0 { 1 } else { 0 };
    }
    binom(d as usize + n - 1, n - 1)
}

/// Number of multi-indices in n variables of degree at most q.
pub fn count_up_to(n: usize, q: u32) -> usize {
    binom(q as usize + n, n)
}

/// 1-based class: smallest i with μ_i ≠ 0; zero for the empty index.
pub fn class_of(mu: &[u32]) -> usize {
    mu.iter().position(|&e| e > 0).map(|i| i + 1).unwrap_or(0)
}

/// Canonical order on jet monomials (see module docs). `Less` sorts first.
pub fn cmp_jet_monomials(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    db.cmp(&da)
        .then_with(|| class_of(b).cmp(&class_of(a)))
        .then_with(|| {
            for i in (0..a.len()).rev() {
                if a[i] != b[i] {
                    return b[i].cmp(&a[i]);
                }
            }
            Ordering::Equal
        })
}

/// All multi-indices of degree exactly d, ascending lexicographically.
pub fn indices_of_degree(n: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::with_capacity(count_of_degree(n, d));
    let mut cur = vec![0u32; n];
    fill(&mut out, &mut cur, 0, d);
    out
}

fn fill(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, pos: usize, rem: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = rem;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    for e in 0..=rem {
        cur[pos] = e;
        fill(out, cur, pos + 1, rem - e);
    }
    cur[pos] = 0;
}

/// All multi-indices of degree ≤ q, by ascending degree then lex.
pub fn indices_up_to(n: usize, q: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::with_capacity(count_up_to(n, q));
    for d in 0..=q {
        out.extend(indices_of_degree(n, d));
    }
    out
}

pub fn index_add(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Column coordinate system for a jet space of order q on m unknowns.
#[derive(Clone, Debug)]
pub struct JetColumns {
    pub n: usize,
    pub m: usize,
    pub q: u32,
    cols: Vec<(usize, Monomial)>,
    index: HashMap<(usize, Monomial), usize>,
    /// First column of each degree block, descending: `degree_start[d]` is
    /// the first column of degree q−d; a final sentinel holds `len`.
    degree_start: Vec<usize>,
}

impl JetColumns {
    pub fn new(n: usize, m: usize, q: u32) -> Self {
        let mut mus: Vec<Vec<u32>> = indices_up_to(n, q);
        mus.sort_by(|a, b| cmp_jet_monomials(a, b));
        let mut cols = Vec::with_capacity(mus.len() * m);
        for mu in &mus {
            for k in 0..m {
                cols.push((k, Monomial(mu.clone())));
            }
        }
        let mut index = HashMap::with_capacity(cols.len());
        for (i, c) in cols.iter().enumerate() {
            index.insert(c.clone(), i);
        }
        let mut degree_start = Vec::with_capacity(q as usize + 2);
        let mut next = 0usize;
        for d in (0..=q).rev() {
            degree_start.push(next);
            next += count_of_degree(n, d) * m;
        }
        degree_start.push(cols.len());
        JetColumns { n, m, q, cols, index, degree_start }
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn col(&self, i: usize) -> &(usize, Monomial) {
        &self.cols[i]
    }

    pub fn cols(&self) -> &[(usize, Monomial)] {
        &self.cols
    }

    pub fn col_index(&self, k: usize, mu: &[u32]) -> usize {
        self.index[&(k, Monomial(mu.to_vec()))]
    }

    pub fn degree_of_col(&self, i: usize) -> u32 {
        self.cols[i].1.degree()
    }

    /// First column index of the suffix holding all degrees ≤ d.
    pub fn suffix_start(&self, d: u32) -> usize {
        if d >= self.q {
            return 0;
        }
        self.degree_start[(self.q - d) as usize]
    }

    /// Column range [start, end) of degree exactly d.
    pub fn degree_block(&self, d: u32) -> (usize, usize) {
        assert!(d <= self.q);
        let i = (self.q - d) as usize;
        (self.degree_start[i], self.degree_start[i + 1])
    }
}
