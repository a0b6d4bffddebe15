//! Counting invariants, Malle exponents and the tuple-count generating function.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frobenius::q_powering;
use crate::group::{
    abelianization, conjugacy_classes, conjugacy_partition, cosets, is_normal, normal_subgroups,
    GroupTable, Subset,
};
use crate::homology::h2_gc;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    DiscriminantRegular,
    DiscriminantDegree(usize),
    Rdisc,
    Custom,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::DiscriminantRegular => write!(f, "discriminant-regular"),
            Provenance::DiscriminantDegree(d) => write!(f, "discriminant-degree-{d}"),
            Provenance::Rdisc => write!(f, "rdisc"),
            Provenance::Custom => write!(f, "custom"),
        }
    }
}

/// A positive class function on `G - id`, invariant under prime-to-order powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountingInvariant {
    pub provenance: Provenance,
    /// Value per group element; `0` at the identity.
    values: Vec<u64>,
}

impl CountingInvariant {
    /// Validates exhaustively.
    pub fn new(g: &GroupTable, values: Vec<u64>, provenance: Provenance) -> Result<Self> {
        if values.len() != g.order() {
            return Err(Error::ValidationFailure("one value per group element required".into()));
        }
        for x in 0..g.order() {
            if x == g.identity() {
                continue;
            }
            if values[x] == 0 {
                return Err(Error::ValidationFailure(format!("value at {} is not positive", g.label(x))));
            }
            for y in 0..g.order() {
                let z = g.conj(x, y);
                if values[z] != values[x] {
                    return Err(Error::ValidationFailure(format!(
                        "not constant on the class of {} (differs at {})",
                        g.label(x),
                        g.label(z)
                    )));
                }
            }
            let ord = g.element_order(x);
            for j in 1..ord {
                if j.gcd(&ord) == 1 && values[g.pow(x, j as u64)] != values[x] {
                    return Err(Error::ValidationFailure(format!(
                        "value at {} differs from its power {}",
                        g.label(x),
                        j
                    )));
                }
            }
        }
        let mut values = values;
        values[g.identity()] = 0;
        Ok(CountingInvariant { provenance, values })
    }

    /// One value per conjugacy class, in `conjugacy_classes` order; the
    /// identity class is ignored.
    pub fn from_class_values(g: &GroupTable, class_values: &[u64]) -> Result<Self> {
        let classes = conjugacy_classes(g);
        if class_values.len() != classes.len() {
            return Err(Error::ValidationFailure(format!(
                "{} class values given for {} classes",
                class_values.len(),
                classes.len()
            )));
        }
        let values = (0..g.order())
            .map(|x| class_values[classes.class_of(x).expect("every element has a class")])
            .collect();
        Self::new(g, values, Provenance::Custom)
    }

    pub fn value(&self, x: usize) -> u64 {
        self.values[x]
    }
}

/// `inv(g) = d - r(g)` with `r(g)` the number of orbits of `<g>` on `{1..d}`.
pub fn discriminant_invariant(g: &GroupTable) -> Result<CountingInvariant> {
    let perms = g
        .perm_images()
        .ok_or_else(|| Error::input("degree-d discriminant needs a permutation group"))?;
    let d = g.degree().expect("permutation group has a degree");
    let values = perms.iter().map(|p| (d - p.orbit_count()) as u64).collect();
    CountingInvariant::new(g, values, Provenance::DiscriminantDegree(d))
}

/// `|G| - r(g)` with `r(g)` the number of orbits of `<g>` on `G` by translation.
pub fn regular_discriminant_invariant(g: &GroupTable) -> Result<CountingInvariant> {
    let n = g.order();
    let values = (0..n).map(|x| (n - n / g.element_order(x)) as u64).collect();
    CountingInvariant::new(g, values, Provenance::DiscriminantRegular)
}

pub fn rdisc_invariant(g: &GroupTable) -> CountingInvariant {
    let mut values = vec![1; g.order()];
    values[g.identity()] = 0;
    CountingInvariant {
        provenance: Provenance::Rdisc,
        values,
    }
}

/// `a(c, inv)` and the subset `c_inv` where it is attained.
pub fn a_constant(c: &Subset, inv: &CountingInvariant) -> Result<(u64, Subset)> {
    let a = c.iter().map(|x| inv.value(x)).min().ok_or(Error::EmptySubset)?;
    if a == 0 {
        return Err(Error::input("c contains the identity"));
    }
    let members = c.iter().filter(|&x| inv.value(x) == a).collect();
    Ok((a, Subset { members }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Orbit {
    /// Indices into `OrbitDecomposition::classes`.
    pub classes: Vec<usize>,
    pub inv: u64,
}

impl Orbit {
    pub fn size(&self) -> usize {
        self.classes.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitDecomposition {
    /// The `N`-conjugacy classes of `c`.
    pub classes: Vec<Vec<usize>>,
    pub orbits: Vec<Orbit>,
    pub normal_subgroup: Vec<usize>,
    pub h: usize,
    pub q: u64,
}

impl OrbitDecomposition {
    /// An abstract decomposition from `(|O_i|, inv(O_i))` pairs.
    pub fn from_sizes(sizes: &[(usize, u64)]) -> Self {
        let mut next = 0;
        let orbits = sizes
            .iter()
            .map(|&(s, inv)| {
                let o = Orbit {
                    classes: (next..next + s).collect(),
                    inv,
                };
                next += s;
                o
            })
            .collect();
        OrbitDecomposition {
            classes: Vec::new(),
            orbits,
            normal_subgroup: Vec::new(),
            h: 0,
            q: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn min_inv(&self) -> Option<u64> {
        self.orbits.iter().map(|o| o.inv).min()
    }
}

fn witness_not_normal(g: &GroupTable, n: &Subset) -> Error {
    for x in n.iter() {
        for y in 0..g.order() {
            if !n.contains(g.conj(x, y)) {
                return Error::NotNormal {
                    element: g.label(x).to_string(),
                    conjugator: g.label(y).to_string(),
                };
            }
        }
    }
    Error::NotNormal {
        element: "?".into(),
        conjugator: "?".into(),
    }
}

/// Order of `hN` in `G/N`.
fn coset_order(g: &GroupTable, n: &Subset, h: usize) -> usize {
    let mut x = h;
    let mut k = 1;
    while !n.contains(x) {
        x = g.mul(x, h);
        k += 1;
    }
    k
}

/// Orbits of `c/N` under the relation `x ~ h x^(q^-1) h^-1`.
pub fn rho_orbits(
    g: &GroupTable,
    n: &Subset,
    c: &Subset,
    h: usize,
    q: u64,
    inv: &CountingInvariant,
) -> Result<OrbitDecomposition> {
    if !is_normal(g, n) {
        return Err(witness_not_normal(g, n));
    }
    let index = g.order() / n.len();
    if coset_order(g, n, h) != index {
        return Err(Error::NotGenerator(format!(
            "{} does not generate G/N",
            g.label(h)
        )));
    }
    if let Some(x) = c.iter().find(|&x| !n.contains(x)) {
        return Err(Error::input(format!("{} lies in c but not in N", g.label(x))));
    }
    let all: Vec<usize> = (0..g.order()).collect();
    conjugacy_partition(g, c, &all)?;
    let pm = q_powering(g, c, q)?;
    let part = conjugacy_partition(g, c, &n.members)?;
    let lifts: Vec<usize> = n.iter().map(|m| g.mul(h, m)).collect();
    let mut map = Vec::with_capacity(part.len());
    for block in &part.blocks {
        let mut image = None;
        for &x in block {
            let xb = pm.back_element(x).expect("closed under powering");
            for &hh in &lifts {
                let y = g.mul(g.mul(hh, xb), g.inv(hh));
                let k = part.class_of(y).expect("c is closed under G-conjugation");
                match image {
                    None => image = Some(k),
                    Some(prev) if prev != k => {
                        return Err(Error::NotWellDefined(format!(
                            "class of {} maps to two classes",
                            g.label(x)
                        )))
                    }
                    _ => {}
                }
            }
        }
        map.push(image.expect("nonempty block"));
    }
    let mut seen = vec![false; map.len()];
    let mut orbits = Vec::new();
    for start in 0..map.len() {
        if seen[start] {
            continue;
        }
        let mut classes = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            classes.push(x);
            x = map[x];
        }
        let value = inv.value(part.blocks[classes[0]][0]);
        if classes.iter().any(|&k| inv.value(part.blocks[k][0]) != value) {
            return Err(Error::ValidationFailure("invariant not constant on a rho orbit".into()));
        }
        classes.sort_unstable();
        orbits.push(Orbit { classes, inv: value });
    }
    Ok(OrbitDecomposition {
        classes: part.blocks.clone(),
        orbits,
        normal_subgroup: n.members.clone(),
        h,
        q,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BmEntry {
    pub h: usize,
    pub orbits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BmResult {
    pub b: usize,
    /// Least coset representative attaining the maximum.
    pub witness: usize,
    /// One entry per generator of `G/N`, by least coset representative.
    pub table: Vec<BmEntry>,
}

/// Least representatives of the cosets generating `G/N`.
fn generating_cosets(g: &GroupTable, n: &Subset) -> Vec<usize> {
    let index = g.order() / n.len();
    let (_, reps) = cosets(g, n);
    let mut gens: Vec<usize> = reps.into_iter().filter(|&h| coset_order(g, n, h) == index).collect();
    gens.sort_unstable();
    gens
}

/// `b_M = max |rho(N, c, h)|` over generators `h` of `G/N`.
pub fn b_m_constant(g: &GroupTable, n: &Subset, c: &Subset, q: u64, inv: &CountingInvariant) -> Result<BmResult> {
    if !is_normal(g, n) {
        return Err(witness_not_normal(g, n));
    }
    let gens = generating_cosets(g, n);
    if gens.is_empty() {
        return Err(Error::NotGenerator("G/N is not cyclic".into()));
    }
    let mut table = Vec::new();
    for &h in &gens {
        table.push(BmEntry {
            h,
            orbits: rho_orbits(g, n, c, h, q, inv)?.len(),
        });
    }
    let best = table.iter().map(|e| e.orbits).max().expect("nonempty");
    let witness = table.iter().find(|e| e.orbits == best).expect("attained").h;
    Ok(BmResult {
        b: best,
        witness,
        table,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BtCandidate {
    pub normal_subgroup: Vec<usize>,
    /// `q^|G/N|`, the field size of `K'`.
    pub field_size: u64,
    pub b_m: usize,
    pub h: usize,
    pub table: Vec<BmEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BtResult {
    pub b: usize,
    pub witness: BtCandidate,
    pub candidates: Vec<BtCandidate>,
}

/// `b_T = max b_M(K', N, c_inv cap N)` over normal `N` with cyclic quotient
/// and `a(c cap N) = a(c)`, with `K'` of size `q^|G/N|`.
pub fn b_t_constant(
    g: &GroupTable,
    c: &Subset,
    q: u64,
    inv: &CountingInvariant,
    max_classes: usize,
) -> Result<BtResult> {
    let (a, c_inv) = a_constant(c, inv)?;
    let mut candidates = Vec::new();
    for n in normal_subgroups(g, max_classes)? {
        if generating_cosets(g, &n).is_empty() {
            continue;
        }
        let cap = Subset {
            members: c.iter().filter(|&x| n.contains(x)).collect(),
        };
        if cap.is_empty() || a_constant(&cap, inv)?.0 != a {
            continue;
        }
        let c_inv_n = Subset {
            members: c_inv.iter().filter(|&x| n.contains(x)).collect(),
        };
        let field_size = checked_pow(q, g.order() / n.len())?;
        let bm = b_m_constant(g, &n, &c_inv_n, field_size, inv)?;
        candidates.push(BtCandidate {
            normal_subgroup: n.members.clone(),
            field_size,
            b_m: bm.b,
            h: bm.witness,
            table: bm.table,
        });
    }
    let best = candidates
        .iter()
        .map(|x| x.b_m)
        .max()
        .ok_or_else(|| Error::input("no normal subgroup with cyclic quotient meets c"))?;
    let witness = candidates.iter().find(|x| x.b_m == best).cloned().expect("attained");
    Ok(BtResult {
        b: witness.b_m,
        witness,
        candidates,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MalleExponents {
    pub a: u64,
    pub c_inv: Vec<usize>,
    /// `b_M(K, G, c_inv)`.
    pub b_m: usize,
    pub b_m_witness: usize,
    pub b_t: usize,
    pub b_t_witness: BtCandidate,
    /// Every `(N, K')` entering `b_T`, each with its per-generator table.
    pub candidates: Vec<BtCandidate>,
}

pub fn malle_exponents(
    g: &GroupTable,
    c: &Subset,
    inv: &CountingInvariant,
    q: u64,
    max_classes: usize,
) -> Result<MalleExponents> {
    let (a, c_inv) = a_constant(c, inv)?;
    let bm = b_m_constant(g, &Subset::whole(g), &c_inv, q, inv)?;
    let bt = b_t_constant(g, c, q, inv, max_classes)?;
    Ok(MalleExponents {
        a,
        c_inv: c_inv.members,
        b_m: bm.b,
        b_m_witness: bm.witness,
        b_t: bt.b,
        b_t_witness: bt.witness,
        candidates: bt.candidates,
    })
}

fn checked_pow(q: u64, e: usize) -> Result<u64> {
    (0..e)
        .try_fold(1u64, |acc, _| acc.checked_mul(q))
        .ok_or_else(|| Error::input("q^|G/N| overflows"))
}

/// Exact `a_delta` for `delta = 0..=delta_max`, computed by a multiplicity
/// DP and by inverting the denominator polynomial; errors if they differ.
pub fn tuple_count_coefficients(dec: &OrbitDecomposition, q: u64, delta_max: usize) -> Result<Vec<BigInt>> {
    const COEFFICIENT_BUDGET: usize = 1 << 20;
    if delta_max > COEFFICIENT_BUDGET {
        return Err(Error::budget("expanding the tuple-count series", COEFFICIENT_BUDGET, delta_max as u64));
    }
    let dp = coefficients_by_multiplicity(dec, q, delta_max)?;
    let series = coefficients_by_inversion(dec, q, delta_max)?;
    if dp != series {
        let at = dp.iter().zip(&series).position(|(a, b)| a != b).unwrap_or(0);
        return Err(Error::InternalMismatch(format!(
            "tuple-count coefficient {at} differs between DP and series inversion"
        )));
    }
    Ok(dp)
}

fn orbit_weights(dec: &OrbitDecomposition) -> Result<Vec<(usize, usize)>> {
    dec.orbits
        .iter()
        .map(|o| {
            if o.inv == 0 || o.classes.is_empty() {
                return Err(Error::input("orbits need positive size and invariant"));
            }
            Ok((o.size() * o.inv as usize, o.size()))
        })
        .collect()
}

/// Sum over multiplicities `m` with `sum m_i |O_i| inv_i = delta` of
/// `q^(sum m_i |O_i|)`, one orbit at a time.
fn coefficients_by_multiplicity(dec: &OrbitDecomposition, q: u64, delta_max: usize) -> Result<Vec<BigInt>> {
    let mut dp = vec![BigInt::zero(); delta_max + 1];
    dp[0] = BigInt::one();
    for (step, size) in orbit_weights(dec)? {
        let factor = BigInt::from(q).pow(size as u32);
        let mut next = vec![BigInt::zero(); delta_max + 1];
        for (delta, slot) in next.iter_mut().enumerate() {
            let mut weight = BigInt::one();
            let mut m = 0;
            while m * step <= delta {
                if !dp[delta - m * step].is_zero() {
                    *slot += &dp[delta - m * step] * &weight;
                }
                weight *= &factor;
                m += 1;
            }
        }
        dp = next;
    }
    Ok(dp)
}

/// Power-series inverse of `prod (1 - q^|O_i| x^(|O_i| inv_i))`.
fn coefficients_by_inversion(dec: &OrbitDecomposition, q: u64, delta_max: usize) -> Result<Vec<BigInt>> {
    let mut p = vec![BigInt::zero(); delta_max + 1];
    p[0] = BigInt::one();
    for (step, size) in orbit_weights(dec)? {
        let factor = BigInt::from(q).pow(size as u32);
        for k in (step..=delta_max).rev() {
            let term = &p[k - step] * &factor;
            p[k] -= term;
        }
    }
    let mut a = vec![BigInt::zero(); delta_max + 1];
    a[0] = BigInt::one();
    for d in 1..=delta_max {
        let mut s = BigInt::zero();
        for k in 1..=d {
            if !p[k].is_zero() {
                s -= &p[k] * &a[d - k];
            }
        }
        a[d] = s;
    }
    Ok(a)
}

/// `sum_{delta <= n} a_delta / (q^(n/a) n^(b-1))` for each `n`; `None` at
/// `n = 0` when `b > 1`.
pub fn normalized_partial_sums(coeffs: &[BigInt], q: u64, a: u64, b: usize) -> Vec<Option<f64>> {
    let mut partial = BigInt::zero();
    coeffs
        .iter()
        .enumerate()
        .map(|(n, x)| {
            partial += x;
            if n == 0 && b > 1 {
                return None;
            }
            let mut log = ln_big(&partial) - (n as f64 / a as f64) * (q as f64).ln();
            if b > 1 {
                log -= (b - 1) as f64 * (n as f64).ln();
            }
            Some(log.exp())
        })
        .collect()
}

fn ln_big(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Number of orbits at the minimal invariant.
pub fn pole_order(dec: &OrbitDecomposition) -> usize {
    match dec.min_inv() {
        Some(a) => dec.orbits.iter().filter(|o| o.inv == a).count(),
        None => 0,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MallePrediction {
    pub a: u64,
    pub b: usize,
    pub normal_subgroup: Vec<usize>,
    pub field_size: u64,
    pub h: usize,
    pub regime: String,
    pub rendered: String,
}

/// Exponents `(a(c cap N), b_M(F_(q^|G/N|), N, (c cap N)_inv))`; `N = G` by default.
pub fn malle_prediction(
    g: &GroupTable,
    c: &Subset,
    inv: &CountingInvariant,
    q: u64,
    n: Option<&Subset>,
) -> Result<MallePrediction> {
    let whole = Subset::whole(g);
    let n = n.unwrap_or(&whole);
    if !is_normal(g, n) {
        return Err(witness_not_normal(g, n));
    }
    if generating_cosets(g, n).is_empty() {
        return Err(Error::NotGenerator("G/N is not cyclic".into()));
    }
    let cap = Subset {
        members: c.iter().filter(|&x| n.contains(x)).collect(),
    };
    let (a, cap_inv) = a_constant(&cap, inv)?;
    let field_size = checked_pow(q, g.order() / n.len())?;
    let bm = b_m_constant(g, n, &cap_inv, field_size, inv)?;
    Ok(MallePrediction {
        a,
        b: bm.b,
        normal_subgroup: n.members.clone(),
        field_size,
        h: bm.witness,
        regime: "upper/lower bounds with distinct constants".into(),
        rendered: format!("Θ(X^{{1/{a}}} (log X)^{{{}}})", bm.b as i64 - 1),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PicardPrediction {
    /// Predicted empty for `n` large; `order_in_abelianization` does not divide `n`.
    Empty { order_in_abelianization: u64, caveat: String },
    /// `(Z/order)^exponent` for the whole space and `Z/order` per component.
    Cyclic { order: u64, exponent: u64, per_component_exponent: u64 },
}

/// Largest divisor of `2n - 2` coprime to `2|G|`, or emptiness from `G^ab`.
pub fn stable_picard_prediction(g: &GroupTable, c: &Subset, n: u64, budget: usize) -> Result<PicardPrediction> {
    if n < 2 {
        return Err(Error::input("n must be at least 2"));
    }
    let all: Vec<usize> = (0..g.order()).collect();
    let classes = conjugacy_partition(g, c, &all)?;
    if classes.len() != 1 {
        return Err(Error::NotSingleClass(format!("c splits into {} classes", classes.len())));
    }
    let ab = abelianization(g);
    let ord = ab.image_order(c.members[0]);
    if !n.is_multiple_of(ord) {
        return Ok(PicardPrediction::Empty {
            order_in_abelianization: ord,
            caveat: "for n sufficiently large".into(),
        });
    }
    let h2 = h2_gc(g, c, budget)?;
    let exponent = h2
        .order()
        .and_then(|o| u64::try_from(o).ok())
        .ok_or_else(|| Error::input("H_2(G,c) is infinite or too large"))?;
    let mut order = 2 * n - 2;
    let bad = 2 * g.order() as u64;
    loop {
        let d = order.gcd(&bad);
        if d == 1 {
            break;
        }
        order /= d;
    }
    Ok(PicardPrediction::Cyclic {
        order,
        exponent,
        per_component_exponent: 1,
    })
}
