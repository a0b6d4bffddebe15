//! Smith normal form over the integers.
//!
//! Sparse elimination on unit pivots first (Markowitz-style choice of the
//! shortest row), then a dense Euclidean reduction of whatever is left.
//! Arithmetic is checked `i64`; on overflow the whole computation restarts in
//! `BigInt`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Sparse integer matrix stored as sorted `(row, col, value)` triplets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<(usize, usize, i64)>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    /// Duplicate coordinates are summed; zero results are dropped.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, i64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut entries: Vec<(usize, usize, i64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        entries.retain(|e| e.2 != 0);
        IntegerMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let triplets = rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, &v)| (r, c, v)))
            .collect();
        Self::from_triplets(rows.len(), cols, triplets)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0; self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            out[r][c] = v;
        }
        out
    }

    pub fn entries(&self) -> &[(usize, usize, i64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.cols,
            self.rows,
            self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect(),
        )
    }

    /// `self * other`, exact in i128 and then narrowed.
    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows);
        let mut by_row: Vec<Vec<(usize, i64)>> = vec![Vec::new(); other.rows];
        for &(r, c, v) in &other.entries {
            by_row[r].push((c, v));
        }
        let mut acc: std::collections::BTreeMap<(usize, usize), i128> = Default::default();
        for &(r, k, v) in &self.entries {
            for &(c, w) in &by_row[k] {
                *acc.entry((r, c)).or_default() += v as i128 * w as i128;
            }
        }
        let triplets = acc
            .into_iter()
            .filter(|&(_, v)| v != 0)
            .map(|((r, c), v)| (r, c, i64::try_from(v).expect("product entry fits in i64")))
            .collect();
        Self::from_triplets(self.rows, other.cols, triplets)
    }

    /// Appends the columns of `other` to the right of `self`.
    pub fn hcat(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.rows, other.rows);
        let mut triplets = self.entries.clone();
        triplets.extend(other.entries.iter().map(|&(r, c, v)| (r, c + self.cols, v)));
        Self::from_triplets(self.rows, self.cols + other.cols, triplets)
    }
}

/// A generator of one cyclic summand of the cokernel `Z^rows / colspan(M)`,
/// written in the original row coordinates. `order == 0` means infinite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CokernelGenerator {
    pub order: BigInt,
    /// Row of the transform `P` that reads off this coordinate.
    pub row: usize,
    pub vector: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    /// `d_1 | d_2 | ...`, padded with zeros to `min(rows, cols)`.
    pub diagonal: Vec<BigInt>,
    pub rank: usize,
    /// Unimodular `P` with `P * M * Q = D` (rows of `P`), when requested.
    pub row_transform: Option<Vec<Vec<BigInt>>>,
    /// Cokernel summands in diagonal order (units omitted), when requested.
    pub cokernel: Option<Vec<CokernelGenerator>>,
}

impl SnfResult {
    /// Diagonal entries greater than one.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal.iter().filter(|d| **d > BigInt::one()).cloned().collect()
    }
}

pub fn smith_normal_form(m: &IntegerMatrix) -> SnfResult {
    run(m, false, true)
}

/// Also returns the row transform and cokernel generators.
pub fn smith_normal_form_with_transforms(m: &IntegerMatrix) -> SnfResult {
    run(m, true, true)
}

/// Plain dense Euclidean reduction with no sparse phase; used as a cross-check.
pub fn smith_normal_form_dense(m: &IntegerMatrix) -> SnfResult {
    run(m, false, false)
}

fn run(m: &IntegerMatrix, track: bool, sparse: bool) -> SnfResult {
    match Engine::<i64>::new(m, track).solve(sparse) {
        Ok(r) => r,
        Err(Overflow) => Engine::<BigInt>::new(m, track)
            .solve(sparse)
            .expect("BigInt arithmetic cannot overflow"),
    }
}

#[derive(Debug)]
struct Overflow;

trait Entry:
    Integer + Signed + Clone + CheckedAdd + CheckedSub + CheckedMul + From<i64> + Debug + Into<BigInt>
{
}
impl<T> Entry for T where
    T: Integer + Signed + Clone + CheckedAdd + CheckedSub + CheckedMul + From<i64> + Debug + Into<BigInt>
{
}

/// `a - f * b`
fn axpy<T: Entry>(a: &T, f: &T, b: &T) -> Result<T, Overflow> {
    let fb = f.checked_mul(b).ok_or(Overflow)?;
    a.checked_sub(&fb).ok_or(Overflow)
}

/// Dense `P` and `P^-1`, updated alongside every row operation.
struct Tracker<T> {
    p: Vec<Vec<T>>,
    pinv: Vec<Vec<T>>, // stored transposed: pinv[c] is column c
}

impl<T: Entry> Tracker<T> {
    fn new(n: usize) -> Self {
        let eye = |_| -> Vec<Vec<T>> {
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
                .collect()
        };
        Tracker {
            p: eye(()),
            pinv: eye(()),
        }
    }

    /// row `dst` -= f * row `src`
    fn sub_row(&mut self, dst: usize, src: usize, f: &T) -> Result<(), Overflow> {
        for k in 0..self.p.len() {
            if !self.p[src][k].is_zero() {
                self.p[dst][k] = axpy(&self.p[dst][k], f, &self.p[src][k])?;
            }
        }
        // P^-1 <- P^-1 * E^-1 : column src += f * column dst
        let neg = -f.clone();
        for k in 0..self.pinv.len() {
            if !self.pinv[dst][k].is_zero() {
                self.pinv[src][k] = axpy(&self.pinv[src][k], &neg, &self.pinv[dst][k])?;
            }
        }
        Ok(())
    }

    fn negate_row(&mut self, r: usize) {
        for v in self.p[r].iter_mut() {
            *v = -v.clone();
        }
        for v in self.pinv[r].iter_mut() {
            *v = -v.clone();
        }
    }
}

struct Engine<T> {
    nrows: usize,
    ncols: usize,
    rows: Vec<Option<Vec<(u32, T)>>>,
    col_rows: Vec<Vec<u32>>,
    tracker: Option<Tracker<T>>,
}

impl<T: Entry> Engine<T> {
    fn new(m: &IntegerMatrix, track: bool) -> Self {
        let mut rows: Vec<Vec<(u32, T)>> = vec![Vec::new(); m.rows];
        let mut col_rows = vec![Vec::new(); m.cols];
        for &(r, c, v) in m.entries() {
            rows[r].push((c as u32, T::from(v)));
            col_rows[c].push(r as u32);
        }
        Engine {
            nrows: m.rows,
            ncols: m.cols,
            rows: rows.into_iter().map(Some).collect(),
            col_rows,
            tracker: track.then(|| Tracker::new(m.rows)),
        }
    }

    fn entry(row: &[(u32, T)], c: u32) -> Option<&T> {
        row.binary_search_by_key(&c, |e| e.0).ok().map(|i| &row[i].1)
    }

    /// row `dst` -= f * row `src` on the sparse rows.
    fn sparse_sub(&mut self, dst: usize, src: usize, f: &T) -> Result<(), Overflow> {
        let a = self.rows[dst].take().expect("active row");
        let b = self.rows[src].as_ref().expect("active row");
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let ca = a.get(i).map_or(u32::MAX, |e| e.0);
            let cb = b.get(j).map_or(u32::MAX, |e| e.0);
            if ca < cb {
                out.push(a[i].clone());
                i += 1;
            } else if cb < ca {
                let v = axpy(&T::zero(), f, &b[j].1)?;
                self.col_rows[cb as usize].push(dst as u32);
                out.push((cb, v));
                j += 1;
            } else {
                let v = axpy(&a[i].1, f, &b[j].1)?;
                if !v.is_zero() {
                    out.push((ca, v));
                }
                i += 1;
                j += 1;
            }
        }
        self.rows[dst] = Some(out);
        if let Some(t) = self.tracker.as_mut() {
            t.sub_row(dst, src, f)?;
        }
        Ok(())
    }

    fn unit_phase(&mut self) -> Result<usize, Overflow> {
        let mut units = 0;
        loop {
            // Shortest active row holding a unit; within it, the sparsest column.
            let mut best: Option<(usize, usize, u32)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                let Some(row) = row else { continue };
                if row.is_empty() || best.is_some_and(|(len, _, _)| row.len() >= len) {
                    continue;
                }
                let pick = row
                    .iter()
                    .filter(|e| e.1.abs().is_one())
                    .min_by_key(|e| self.col_rows[e.0 as usize].len())
                    .map(|e| e.0);
                if let Some(c) = pick {
                    best = Some((row.len(), r, c));
                    if row.len() == 1 {
                        break;
                    }
                }
            }
            let Some((_, r, c)) = best else { return Ok(units) };
            let u = Self::entry(self.rows[r].as_ref().unwrap(), c).unwrap().clone();
            let mut others = std::mem::take(&mut self.col_rows[c as usize]);
            others.sort_unstable();
            others.dedup();
            for &r2 in &others {
                let r2 = r2 as usize;
                if r2 == r {
                    continue;
                }
                let Some(row2) = self.rows[r2].as_ref() else { continue };
                let Some(v) = Self::entry(row2, c) else { continue };
                let f = v.clone() * u.clone(); // u = u^-1
                self.sparse_sub(r2, r, &f)?;
            }
            self.rows[r] = None;
            units += 1;
        }
    }

    fn solve(mut self, sparse: bool) -> Result<SnfResult, Overflow> {
        let units = if sparse { self.unit_phase()? } else { 0 };

        // Residual dense block over the remaining rows and their columns.
        let labels: Vec<usize> = (0..self.nrows).filter(|&r| self.rows[r].is_some()).collect();
        let mut cols: Vec<u32> = labels
            .iter()
            .flat_map(|&r| self.rows[r].as_ref().unwrap().iter().map(|e| e.0))
            .collect();
        cols.sort_unstable();
        cols.dedup();
        let mut a: Vec<Vec<T>> = labels
            .iter()
            .map(|&r| {
                let mut dense = vec![T::zero(); cols.len()];
                for (c, v) in self.rows[r].as_ref().unwrap() {
                    dense[cols.binary_search(c).unwrap()] = v.clone();
                }
                dense
            })
            .collect();
        let mut labels = labels;
        let dense_diag = dense_snf(&mut a, &mut labels, cols.len(), self.tracker.as_mut())?;

        let mut diagonal: Vec<BigInt> = vec![BigInt::one(); units];
        diagonal.extend(dense_diag.iter().map(|d| d.clone().into()));
        let rank = diagonal.len();
        diagonal.resize(self.nrows.min(self.ncols), BigInt::zero());

        let (row_transform, cokernel) = match self.tracker {
            None => (None, None),
            Some(t) => {
                let to_big = |v: &Vec<T>| v.iter().map(|x| x.clone().into()).collect::<Vec<BigInt>>();
                let mut gens = Vec::new();
                for (k, d) in dense_diag.iter().enumerate() {
                    if !d.is_one() {
                        gens.push(CokernelGenerator {
                            order: d.clone().into(),
                            row: labels[k],
                            vector: to_big(&t.pinv[labels[k]]),
                        });
                    }
                }
                for &l in &labels[dense_diag.len()..] {
                    gens.push(CokernelGenerator {
                        order: BigInt::zero(),
                        row: l,
                        vector: to_big(&t.pinv[l]),
                    });
                }
                (Some(t.p.iter().map(to_big).collect()), Some(gens))
            }
        };
        Ok(SnfResult {
            diagonal,
            rank,
            row_transform,
            cokernel,
        })
    }
}

/// In-place dense reduction. `labels[i]` is the tracker row held by `a[i]`;
/// rows are swapped together with their labels. Returns the nonzero diagonal.
fn dense_snf<T: Entry>(
    a: &mut [Vec<T>],
    labels: &mut [usize],
    ncols: usize,
    mut tracker: Option<&mut Tracker<T>>,
) -> Result<Vec<T>, Overflow> {
    let nrows = a.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..nrows {
            for j in t..ncols {
                if !a[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        move_pivot(a, labels, t, pi, pj);
        loop {
            let mut clean = true;
            for i in t + 1..nrows {
                if a[i][t].is_zero() {
                    continue;
                }
                let f = a[i][t].div_floor(&a[t][t]);
                let (head, tail) = a.split_at_mut(i);
                for j in t..ncols {
                    if !head[t][j].is_zero() {
                        tail[0][j] = axpy(&tail[0][j], &f, &head[t][j])?;
                    }
                }
                if let Some(tr) = tracker.as_deref_mut() {
                    tr.sub_row(labels[i], labels[t], &f)?;
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..ncols {
                if a[t][j].is_zero() {
                    continue;
                }
                let f = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    if !row[t].is_zero() {
                        row[j] = axpy(&row[j], &f, &row[t])?;
                    }
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                // a remainder is now smaller than the pivot
                let mut best = (t, t);
                for i in t + 1..nrows {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..ncols {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                move_pivot(a, labels, t, best.0, best.1);
                continue;
            }
            let bad = (t + 1..nrows).find(|&i| {
                (t + 1..ncols).any(|j| !a[i][j].is_zero() && !a[i][j].is_multiple_of(&a[t][t]))
            });
            match bad {
                Some(i) => {
                    // row t += row i
                    let minus_one = -T::one();
                    let (head, tail) = a.split_at_mut(i);
                    for j in t..ncols {
                        if !tail[0][j].is_zero() {
                            head[t][j] = axpy(&head[t][j], &minus_one, &tail[0][j])?;
                        }
                    }
                    if let Some(tr) = tracker.as_deref_mut() {
                        tr.sub_row(labels[t], labels[i], &minus_one)?;
                    }
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for v in a[t].iter_mut() {
                *v = -v.clone();
            }
            if let Some(tr) = tracker.as_deref_mut() {
                tr.negate_row(labels[t]);
            }
        }
        diag.push(a[t][t].clone());
        t += 1;
    }
    Ok(diag)
}

fn move_pivot<T: Entry>(a: &mut [Vec<T>], labels: &mut [usize], t: usize, i: usize, j: usize) {
    if i != t {
        a.swap(i, t);
        labels.swap(i, t);
    }
    if j != t {
        for row in a.iter_mut() {
            row.swap(j, t);
        }
    }
}
