//! Generating matrices over product groups: codewords, weights, supports,
//! the contraction primitive, and exact distinct-codeword counting.
//!
//! A matrix G with m coordinate rows and n columns over a `GroupSpec` defines
//! the code `{ Gx : x in Z^n }`. Contraction on a coordinate j returns a
//! matrix spanning exactly the codewords that vanish at j; iterating it gives
//! an exact count of distinct codewords.

use crate::error::{Error, Result};
use crate::group::{residue_order, row_gcd_reduce, GroupElement, GroupSpec};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

/// Dense m x n matrix of group elements with per-coordinate weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingMatrix {
    spec: GroupSpec,
    m: usize,
    n: usize,
    /// Row-major, `m * n * u` residues; cell (i, j) occupies
    /// `[(i*n + j)*u .. (i*n + j + 1)*u]`.
    entries: Vec<u64>,
    weights: Vec<f64>,
}

/// One codeword: m group elements, stored flat.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Codeword {
    flat: Vec<u64>,
    components: usize,
}

impl Codeword {
    pub fn len(&self) -> usize {
        if self.components == 0 { 0 } else { self.flat.len() / self.components }
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub fn coord(&self, j: usize) -> &[u64] {
        &self.flat[j * self.components..(j + 1) * self.components]
    }

    pub fn is_zero_at(&self, j: usize) -> bool {
        self.coord(j).iter().all(|&r| r == 0)
    }

    pub fn is_zero(&self) -> bool {
        self.flat.iter().all(|&r| r == 0)
    }

    pub fn flat(&self) -> &[u64] {
        &self.flat
    }
}

/// Exact span size, support size, and density of a code.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeStats {
    pub distinct_count: BigUint,
    pub support_size: usize,
    /// log2(distinct_count) / support_size; zero for trivial codes.
    pub density: f64,
}

impl GeneratingMatrix {
    /// Build from rows of elements, unit weights.
    pub fn new(spec: GroupSpec, rows: Vec<Vec<GroupElement>>) -> Result<Self> {
        let m = rows.len();
        let weights = vec![1.0; m];
        Self::with_weights(spec, rows, weights)
    }

    /// Build from rows of elements and per-coordinate weights.
    pub fn with_weights(
        spec: GroupSpec,
        rows: Vec<Vec<GroupElement>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::InvalidArgument("matrix needs at least one row".into()));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::InvalidArgument("matrix needs at least one column".into()));
        }
        if weights.len() != m {
            return Err(Error::ShapeMismatch { expected: m, got: weights.len() });
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidArgument("weights must be finite and >= 0".into()));
        }
        let u = spec.components();
        let mut entries = Vec::with_capacity(m * n * u);
        for row in &rows {
            if row.len() != n {
                return Err(Error::ShapeMismatch { expected: n, got: row.len() });
            }
            for e in row {
                if e.residues().len() != u {
                    return Err(Error::ShapeMismatch { expected: u, got: e.residues().len() });
                }
                entries.extend_from_slice(e.residues());
            }
        }
        Ok(GeneratingMatrix { spec, m, n, entries, weights })
    }

    /// Build directly from flat residues (row-major, m*n*u), unit weights.
    pub fn from_flat(spec: GroupSpec, m: usize, n: usize, entries: Vec<u64>) -> Result<Self> {
        let u = spec.components();
        if entries.len() != m * n * u {
            return Err(Error::ShapeMismatch { expected: m * n * u, got: entries.len() });
        }
        for (k, &r) in entries.iter().enumerate() {
            let q = spec.moduli()[k % u];
            if r >= q {
                return Err(Error::InvalidArgument(format!("residue {r} not reduced mod {q}")));
            }
        }
        Ok(GeneratingMatrix { spec, m, n, entries, weights: vec![1.0; m] })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn set_weight(&mut self, j: usize, w: f64) {
        self.weights[j] = w;
    }

    /// Residues of cell (i, j).
    pub fn entry(&self, i: usize, j: usize) -> &[u64] {
        let u = self.spec.components();
        let base = (i * self.n + j) * u;
        &self.entries[base..base + u]
    }

    pub fn entry_element(&self, i: usize, j: usize) -> GroupElement {
        self.spec.element(self.entry(i, j).to_vec()).expect("stored entries are reduced")
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        let u = self.spec.components();
        let base = i * self.n * u;
        self.entries[base..base + self.n * u].iter().all(|&r| r == 0)
    }

    /// Restriction to a subset of coordinates, keeping weights.
    pub fn restrict_rows(&self, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("restriction needs at least one row".into()));
        }
        let u = self.spec.components();
        let mut entries = Vec::with_capacity(rows.len() * self.n * u);
        let mut weights = Vec::with_capacity(rows.len());
        for &i in rows {
            if i >= self.m {
                return Err(Error::IndexOutOfRange { index: i, bound: self.m });
            }
            let base = i * self.n * u;
            entries.extend_from_slice(&self.entries[base..base + self.n * u]);
            weights.push(self.weights[i]);
        }
        Ok(GeneratingMatrix { spec: self.spec.clone(), m: rows.len(), n: self.n, entries, weights })
    }

    /// dst <- dst + factor * src, componentwise mod q, over the whole column.
    fn column_add_multiple(&mut self, dst: usize, src: usize, factor: i64) {
        let u = self.spec.components();
        let moduli = self.spec.moduli().to_vec();
        for i in 0..self.m {
            let sbase = (i * self.n + src) * u;
            let dbase = (i * self.n + dst) * u;
            for p in 0..u {
                let q = moduli[p] as i128;
                let s = self.entries[sbase + p] as i128;
                let d = self.entries[dbase + p] as i128;
                self.entries[dbase + p] = ((d + factor as i128 * s).rem_euclid(q)) as u64;
            }
        }
    }

    fn column_swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let u = self.spec.components();
        for i in 0..self.m {
            let abase = (i * self.n + a) * u;
            let bbase = (i * self.n + b) * u;
            for p in 0..u {
                self.entries.swap(abase + p, bbase + p);
            }
        }
    }

    fn column_scale(&mut self, col: usize, factor: u64) {
        let u = self.spec.components();
        let moduli = self.spec.moduli().to_vec();
        for i in 0..self.m {
            let base = (i * self.n + col) * u;
            for p in 0..u {
                let q = moduli[p] as u128;
                let v = self.entries[base + p] as u128;
                self.entries[base + p] = ((v * factor as u128) % q) as u64;
            }
        }
    }

    /// Smallest (row, component) pair with a not-all-zero row slice, scanning
    /// rows in order and components in ascending index.
    fn first_nonzero_row_component(&self, start_row: usize) -> Option<(usize, usize)> {
        let u = self.spec.components();
        for i in start_row..self.m {
            for p in 0..u {
                for j in 0..self.n {
                    if self.entry(i, j)[p] != 0 {
                        return Some((i, p));
                    }
                }
            }
        }
        None
    }

    /// Order of column `j` as an element of A^m: the lcm of entry orders.
    pub fn column_order(&self, j: usize) -> u64 {
        let u = self.spec.components();
        let mut ord: u64 = 1;
        for i in 0..self.m {
            for (p, &r) in self.entry(i, j).iter().enumerate().take(u) {
                ord = num_integer::lcm(ord, residue_order(r, self.spec.moduli()[p]));
            }
        }
        ord
    }
}

/// Gx for an integer message x of length n.
pub fn encode(g: &GeneratingMatrix, x: &[i64]) -> Result<Codeword> {
    if x.len() != g.n {
        return Err(Error::ShapeMismatch { expected: g.n, got: x.len() });
    }
    let u = g.spec.components();
    let moduli = g.spec.moduli();
    let mut flat = vec![0u64; g.m * u];
    for i in 0..g.m {
        for (j, &coeff) in x.iter().enumerate() {
            if coeff == 0 {
                continue;
            }
            let cell = g.entry(i, j);
            for p in 0..u {
                let q = moduli[p] as i128;
                let acc = flat[i * u + p] as i128;
                flat[i * u + p] = ((acc + coeff as i128 * cell[p] as i128).rem_euclid(q)) as u64;
            }
        }
    }
    Ok(Codeword { flat, components: u })
}

/// Sum of weights of the coordinates where the codeword is nonzero.
pub fn weighted_weight(g: &GeneratingMatrix, c: &Codeword) -> f64 {
    let mut total = 0.0;
    for j in 0..g.m {
        if !c.is_zero_at(j) {
            total += g.weights[j];
        }
    }
    total
}

/// Contract on coordinate j: returns a matrix of the same shape spanning
/// exactly `{ c in Span(G) : c_j = 0 }`, with row j all zero.
///
/// Per tuple component of row j (ascending, skipping all-zero components):
/// Euclidean column operations gather the gcd into a pivot column, every other
/// entry of the row component cancels, the pivot swaps to the leftmost
/// position, and the pivot column scales by the order of its entry.
pub fn contract(g: &GeneratingMatrix, j: usize) -> Result<GeneratingMatrix> {
    if j >= g.m {
        return Err(Error::IndexOutOfRange { index: j, bound: g.m });
    }
    let mut work = g.clone();
    let u = work.spec.components();
    for p in 0..u {
        let mut row: Vec<i64> = (0..work.n).map(|c| work.entry(j, c)[p] as i64).collect();
        if row.iter().all(|&v| v == 0) {
            continue;
        }
        let mut ops = Vec::new();
        let pivot = row_gcd_reduce(&mut row, |op| ops.push(op))?;
        for op in ops {
            work.column_add_multiple(op.dst, op.src, op.factor);
        }
        work.column_swap(0, pivot);
        let v = work.entry(j, 0)[p];
        let eta = residue_order(v, work.spec.moduli()[p]);
        work.column_scale(0, eta);
    }
    debug_assert!(work.row_is_zero(j));
    Ok(work)
}

/// Exact |Span(G)| by iterated contraction: repeatedly isolate a pivot in the
/// first nonzero row component, multiply the running count by the pivot
/// entry's order, and zero the component by scaling the pivot column.
pub fn count_distinct_codewords(g: &GeneratingMatrix) -> BigUint {
    let mut work = g.clone();
    let mut count = BigUint::one();
    let mut row_cursor = 0;
    while let Some((j, p)) = work.first_nonzero_row_component(row_cursor) {
        row_cursor = j;
        let mut row: Vec<i64> = (0..work.n).map(|c| work.entry(j, c)[p] as i64).collect();
        let mut ops = Vec::new();
        let pivot = row_gcd_reduce(&mut row, |op| ops.push(op)).expect("component is nonzero");
        for op in ops {
            work.column_add_multiple(op.dst, op.src, op.factor);
        }
        let v = work.entry(j, pivot)[p];
        let c = residue_order(v, work.spec.moduli()[p]);
        count *= BigUint::from(c);
        work.column_scale(pivot, c);
    }
    count
}

/// Span size, support size and density in one pass.
pub fn code_stats(g: &GeneratingMatrix) -> CodeStats {
    let distinct_count = count_distinct_codewords(g);
    let support_size = support(g).len();
    let bits = log2_biguint(&distinct_count);
    let density = if support_size == 0 { 0.0 } else { bits / support_size as f64 };
    CodeStats { distinct_count, support_size, density }
}

/// log2 of a positive big integer, as f64.
pub fn log2_biguint(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 53 {
        return (v.to_u64().unwrap_or(1) as f64).log2();
    }
    let shift = bits - 53;
    let top = (v >> shift).to_u64().expect("53 bits fit");
    (top as f64).log2() + shift as f64
}

/// Coordinates that are nonzero in some codeword: exactly the not-all-zero
/// rows, since unit coefficient vectors are allowed.
pub fn support(g: &GeneratingMatrix) -> Vec<usize> {
    (0..g.m).filter(|&i| !g.row_is_zero(i)).collect()
}

/// Streaming enumeration of one coefficient vector per distinct combination,
/// `x_i` ranging over `[0, order(column i))`. Refuses if the message count
/// exceeds `cap`.
pub fn enumerate_codewords(
    g: &GeneratingMatrix,
    cap: u64,
) -> Result<CodewordEnumerator<'_>> {
    let orders: Vec<u64> = (0..g.n).map(|j| g.column_order(j)).collect();
    let mut total = BigUint::one();
    for &o in &orders {
        total *= BigUint::from(o);
    }
    if total > BigUint::from(cap) {
        return Err(Error::EnumerationCapExceeded { needed: total, cap });
    }
    let u = g.spec.components();
    Ok(CodewordEnumerator {
        g,
        orders,
        message: vec![0; g.n],
        current: Codeword { flat: vec![0; g.m * u], components: u },
        done: false,
    })
}

/// Iterator over (message, codeword) pairs; the codeword is maintained
/// incrementally by adding one column per step.
pub struct CodewordEnumerator<'a> {
    g: &'a GeneratingMatrix,
    orders: Vec<u64>,
    message: Vec<u64>,
    current: Codeword,
    done: bool,
}

impl<'a> CodewordEnumerator<'a> {
    fn add_column(&mut self, j: usize) {
        let u = self.g.spec.components();
        let moduli = self.g.spec.moduli();
        for i in 0..self.g.m {
            let cell = self.g.entry(i, j);
            for p in 0..u {
                let q = moduli[p];
                let s = self.current.flat[i * u + p] + cell[p];
                self.current.flat[i * u + p] = if s >= q { s - q } else { s };
            }
        }
    }
}

impl<'a> Iterator for CodewordEnumerator<'a> {
    type Item = (Vec<u64>, Codeword);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let out = (self.message.clone(), self.current.clone());
        // odometer step; adding a column `order` times returns it to zero,
        // so the codeword tracks the message exactly.
        let mut j = 0;
        loop {
            if j == self.orders.len() {
                self.done = true;
                break;
            }
            self.message[j] += 1;
            self.add_column(j);
            if self.message[j] < self.orders[j] {
                break;
            }
            self.message[j] = 0;
            j += 1;
        }
        Some(out)
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use rand::Rng;
    use std::collections::HashSet;

    /// All distinct codewords, as flat residue vectors.
    pub fn span_set(g: &GeneratingMatrix) -> HashSet<Vec<u64>> {
        enumerate_codewords(g, 2_000_000)
            .expect("test code too large to enumerate")
            .map(|(_, c)| c.flat().to_vec())
            .collect()
    }

    pub fn random_matrix<R: Rng>(
        rng: &mut R,
        spec: &GroupSpec,
        m: usize,
        n: usize,
    ) -> GeneratingMatrix {
        let u = spec.components();
        let mut entries = Vec::with_capacity(m * n * u);
        for _ in 0..m * n {
            for &q in spec.moduli() {
                entries.push(rng.gen_range(0..q));
            }
        }
        GeneratingMatrix::from_flat(spec.clone(), m, n, entries).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::collections::HashSet;

    fn identity(spec: &GroupSpec, n: usize) -> GeneratingMatrix {
        let u = spec.components();
        let mut entries = vec![0u64; n * n * u];
        for i in 0..n {
            for p in 0..u {
                entries[(i * n + i) * u + p] = 1;
            }
        }
        GeneratingMatrix::from_flat(spec.clone(), n, n, entries).unwrap()
    }

    #[test]
    fn encode_identity_and_zero() {
        let spec = GroupSpec::cyclic(2).unwrap();
        let g = identity(&spec, 2);
        let c = encode(&g, &[1, 0]).unwrap();
        assert_eq!(c.flat(), &[1, 0]);
        assert!(encode(&g, &[0, 0]).unwrap().is_zero());
    }

    #[test]
    fn encode_paper_z6_squared_columns() {
        // columns (3,0)^T and (0,2)^T over Z6^2, x = (1,1) -> (3,2)
        let spec = GroupSpec::cyclic(6).unwrap();
        let g = GeneratingMatrix::from_flat(spec, 2, 2, vec![3, 0, 0, 2]).unwrap();
        let c = encode(&g, &[1, 1]).unwrap();
        assert_eq!(c.flat(), &[3, 2]);
    }

    #[test]
    fn weighted_weight_examples() {
        let spec = GroupSpec::cyclic(2).unwrap();
        let mut g = identity(&spec, 3);
        let c = encode(&g, &[1, 0, 1]).unwrap();
        assert_eq!(weighted_weight(&g, &c), 2.0);
        g.set_weight(0, 2.5);
        assert_eq!(weighted_weight(&g, &c), 3.5);
        assert_eq!(weighted_weight(&g, &encode(&g, &[0, 0, 0]).unwrap()), 0.0);
    }

    #[test]
    fn contract_identity_z2() {
        let spec = GroupSpec::cyclic(2).unwrap();
        let g = identity(&spec, 2);
        let g2 = contract(&g, 0).unwrap();
        let span = span_set(&g2);
        let expected: HashSet<Vec<u64>> = [vec![0, 0], vec![0, 1]].into_iter().collect();
        assert_eq!(span, expected);
    }

    #[test]
    fn contract_single_column_z6() {
        // column (4) over Z6, m = 1: pivot 4 has order 3, span collapses to {0}
        let spec = GroupSpec::cyclic(6).unwrap();
        let g = GeneratingMatrix::from_flat(spec, 1, 1, vec![4]).unwrap();
        let g2 = contract(&g, 0).unwrap();
        assert!(g2.row_is_zero(0));
        assert_eq!(count_distinct_codewords(&g2), BigUint::from(1u32));
    }

    #[test]
    fn contract_matches_enumeration_oracle() {
        // Span(contract(G, j)) == { c in Span(G) : c_j = 0 } for random Z6 codes.
        let spec = GroupSpec::cyclic(6).unwrap();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..40 {
            let g = random_matrix(&mut rng, &spec, 3, 2);
            let full = span_set(&g);
            for j in 0..3 {
                let contracted = span_set(&contract(&g, j).unwrap());
                let expected: HashSet<Vec<u64>> =
                    full.iter().filter(|c| c[j] == 0).cloned().collect();
                assert_eq!(contracted, expected, "mismatch at row {j}");
            }
        }
    }

    #[test]
    fn contract_halves_span_on_support_rows() {
        let mut rng = StdRng::seed_from_u64(12);
        for &q in &[2u64, 4, 6, 8] {
            let spec = GroupSpec::cyclic(q).unwrap();
            for _ in 0..30 {
                let g = random_matrix(&mut rng, &spec, 4, 3);
                let before = count_distinct_codewords(&g);
                for j in support(&g) {
                    let after = count_distinct_codewords(&contract(&g, j).unwrap());
                    assert!(
                        &after * 2u32 <= before.clone(),
                        "contraction on a support row must at least halve the span"
                    );
                }
            }
        }
    }

    #[test]
    fn count_examples() {
        let spec = GroupSpec::cyclic(5).unwrap();
        let zero = GeneratingMatrix::from_flat(spec.clone(), 2, 2, vec![0; 4]).unwrap();
        assert_eq!(count_distinct_codewords(&zero), BigUint::from(1u32));
        let g = identity(&spec, 3);
        assert_eq!(count_distinct_codewords(&g), BigUint::from(125u32));
        // columns (3,0)^T, (0,2)^T over Z6^2 span 6 codewords, same as (3,2)^T
        let spec6 = GroupSpec::cyclic(6).unwrap();
        let two_col = GeneratingMatrix::from_flat(spec6.clone(), 2, 2, vec![3, 0, 0, 2]).unwrap();
        assert_eq!(count_distinct_codewords(&two_col), BigUint::from(6u32));
        let one_col = GeneratingMatrix::from_flat(spec6, 2, 1, vec![3, 2]).unwrap();
        assert_eq!(span_set(&two_col), span_set(&one_col));
    }

    #[test]
    fn count_matches_enumeration_on_random_instances() {
        let mut rng = StdRng::seed_from_u64(13);
        let specs = [
            GroupSpec::cyclic(4).unwrap(),
            GroupSpec::cyclic(6).unwrap(),
            GroupSpec::new(vec![2, 3]).unwrap(),
            GroupSpec::new(vec![4, 6]).unwrap(),
        ];
        for _ in 0..50 {
            let spec = &specs[rng.gen_range(0..specs.len())];
            let m = rng.gen_range(1..5);
            let n = rng.gen_range(1..4);
            let g = random_matrix(&mut rng, spec, m, n);
            let by_enum = span_set(&g).len();
            assert_eq!(count_distinct_codewords(&g), BigUint::from(by_enum));
        }
    }

    #[test]
    fn support_examples() {
        let spec = GroupSpec::cyclic(3).unwrap();
        let zero = GeneratingMatrix::from_flat(spec.clone(), 2, 1, vec![0, 0]).unwrap();
        assert!(support(&zero).is_empty());
        assert_eq!(support(&identity(&spec, 3)), vec![0, 1, 2]);
        let g = GeneratingMatrix::from_flat(spec, 3, 1, vec![1, 0, 2]).unwrap();
        assert_eq!(support(&g), vec![0, 2]);
    }

    #[test]
    fn enumeration_cap_and_dedupe() {
        let spec = GroupSpec::cyclic(3).unwrap();
        let g = identity(&spec, 1);
        let words: Vec<_> = enumerate_codewords(&g, 10).unwrap().collect();
        assert_eq!(words.len(), 3);
        assert!(enumerate_codewords(&identity(&spec, 8), 100).is_err());
        // (3,0)^T, (0,2)^T over Z6^2: 6 distinct codewords among messages.
        let spec6 = GroupSpec::cyclic(6).unwrap();
        let g = GeneratingMatrix::from_flat(spec6, 2, 2, vec![3, 0, 0, 2]).unwrap();
        let set: HashSet<Vec<u64>> =
            enumerate_codewords(&g, 100).unwrap().map(|(_, c)| c.flat().to_vec()).collect();
        assert_eq!(set.len(), 6);
    }

    #[test]
    fn gcd_column_ops_preserve_span_exhaustively() {
        // Column-op mirrored gcd reduction never changes the span: q <= 12,
        // n <= 3, m <= 3 sampled grid, span compared by enumeration.
        let mut rng = StdRng::seed_from_u64(14);
        for &q in &[2u64, 3, 4, 6, 9, 12] {
            let spec = GroupSpec::cyclic(q).unwrap();
            for _ in 0..25 {
                let m = rng.gen_range(1..4);
                let n = rng.gen_range(1..4);
                let g = random_matrix(&mut rng, &spec, m, n);
                let before = span_set(&g);
                // mirror a gcd reduction of row 0 onto the matrix
                let mut work = g.clone();
                let mut row: Vec<i64> = (0..n).map(|c| work.entry(0, c)[0] as i64).collect();
                if row.iter().all(|&v| v == 0) {
                    continue;
                }
                let mut ops = Vec::new();
                row_gcd_reduce(&mut row, |op| ops.push(op)).unwrap();
                for op in ops {
                    work.column_add_multiple(op.dst, op.src, op.factor);
                }
                assert_eq!(span_set(&work), before);
            }
        }
    }

    #[test]
    fn weight_additive_over_vertical_decomposition() {
        let spec = GroupSpec::cyclic(6).unwrap();
        let mut rng = StdRng::seed_from_u64(15);
        for _ in 0..20 {
            let g = random_matrix(&mut rng, &spec, 6, 2);
            let top = g.restrict_rows(&[0, 1, 2]).unwrap();
            let bottom = g.restrict_rows(&[3, 4, 5]).unwrap();
            for (x, c) in enumerate_codewords(&g, 100).unwrap() {
                let xi: Vec<i64> = x.iter().map(|&v| v as i64).collect();
                let ct = encode(&top, &xi).unwrap();
                let cb = encode(&bottom, &xi).unwrap();
                let w = weighted_weight(&g, &c);
                assert!((w - weighted_weight(&top, &ct) - weighted_weight(&bottom, &cb)).abs() < 1e-12);
            }
        }
    }
}
