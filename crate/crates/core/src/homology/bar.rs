use super::snf::IntegerMatrix;
use crate::error::{Error, Result};
use crate::group::GroupTable;

/// Low-degree piece of the normalized bar complex with trivial coefficients.
///
/// Basis of `C_k` is the k-tuples of non-identity elements; faces hitting the
/// identity are degenerate and dropped.
#[derive(Clone, Debug)]
pub struct BarComplex {
    /// Non-identity elements in group order; position = basis coordinate.
    pub nonid: Vec<usize>,
    pos: Vec<Option<usize>>,
    /// `C_2 -> C_1`
    pub d2: IntegerMatrix,
    /// `C_3 -> C_2`
    pub d3: IntegerMatrix,
}

impl BarComplex {
    pub fn dim1(&self) -> usize {
        self.nonid.len()
    }

    pub fn dim2(&self) -> usize {
        self.nonid.len() * self.nonid.len()
    }

    /// Coordinate of `[g|h]` in `C_2`, or `None` if degenerate.
    pub fn pair_index(&self, g: usize, h: usize) -> Option<usize> {
        Some(self.pos[g]? * self.nonid.len() + self.pos[h]?)
    }

    /// Inverse of [`Self::pair_index`].
    pub fn pair(&self, index: usize) -> (usize, usize) {
        let m = self.nonid.len();
        (self.nonid[index / m], self.nonid[index % m])
    }
}

pub fn bar_boundary_matrices(g: &GroupTable, budget: usize) -> Result<BarComplex> {
    let nonid: Vec<usize> = (0..g.order()).filter(|&x| x != g.identity()).collect();
    let m = nonid.len();
    let dim3 = m.checked_pow(3).unwrap_or(usize::MAX);
    if dim3 > budget {
        return Err(Error::budget("building bar complex", budget, dim3 as u64));
    }
    let mut pos = vec![None; g.order()];
    for (i, &x) in nonid.iter().enumerate() {
        pos[x] = Some(i);
    }
    let p = |x: usize| pos[x];

    let mut t2 = Vec::with_capacity(3 * m * m);
    for (a, &x) in nonid.iter().enumerate() {
        for (b, &y) in nonid.iter().enumerate() {
            let col = a * m + b;
            t2.push((b, col, 1));
            if let Some(xy) = p(g.mul(x, y)) {
                t2.push((xy, col, -1));
            }
            t2.push((a, col, 1));
        }
    }
    let d2 = IntegerMatrix::from_triplets(m, m * m, t2);

    let pair = |u: usize, v: usize| -> Option<usize> { Some(p(u)? * m + p(v)?) };
    let mut t3 = Vec::with_capacity(4 * dim3);
    for (a, &x) in nonid.iter().enumerate() {
        for (b, &y) in nonid.iter().enumerate() {
            let xy = g.mul(x, y);
            for (c, &z) in nonid.iter().enumerate() {
                let col = (a * m + b) * m + c;
                let yz = g.mul(y, z);
                t3.push((b * m + c, col, 1));
                if let Some(r) = pair(xy, z) {
                    t3.push((r, col, -1));
                }
                if let Some(r) = pair(x, yz) {
                    t3.push((r, col, 1));
                }
                t3.push((a * m + b, col, -1));
            }
        }
    }
    let d3 = IntegerMatrix::from_triplets(m * m, dim3, t3);
    Ok(BarComplex { nonid, pos, d2, d3 })
}
