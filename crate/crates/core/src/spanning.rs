//! Maximum spanning subsets and the decomposition that isolates dense rows.
//!
//! A maximum spanning subset is a row subset whose restricted span has as many
//! distinct codewords as the full code. Storing enough disjoint such subsets
//! is guaranteed to cover the support of every dense subcode, so removing
//! their union leaves a code whose light codewords obey the counting bound.

use crate::code::{count_distinct_codewords, log2_biguint, GeneratingMatrix};
use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::One;

/// A row subset preserving the full span count of the matrix it was built on.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningSubset {
    pub indices: Vec<usize>,
    pub span_count: BigUint,
}

/// Result of removing the union of disjoint maximum spanning subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Union of the disjoint spanning subsets, ascending.
    pub kept: Vec<usize>,
    /// Complement of `kept`, ascending.
    pub remainder: Vec<usize>,
    /// The individual subsets, in construction order.
    pub subsets: Vec<SpanningSubset>,
}

impl Decomposition {
    /// Materialize the remainder as a matrix, or `None` when every row is kept.
    pub fn remainder_matrix(&self, g: &GeneratingMatrix) -> Option<GeneratingMatrix> {
        if self.remainder.is_empty() {
            None
        } else {
            Some(g.restrict_rows(&self.remainder).expect("indices in range"))
        }
    }
}

/// Greedy pass over `alive` rows in order; a row joins iff it strictly
/// increases the restricted span count. Stops scanning once the subset
/// reaches `target` (the span count of the alive rows).
fn greedy_subset(
    g: &GeneratingMatrix,
    alive: &[usize],
    target: &BigUint,
) -> (Vec<usize>, BigUint) {
    let mut chosen: Vec<usize> = Vec::new();
    let mut count = BigUint::one();
    for &i in alive {
        if count == *target {
            break;
        }
        if g.row_is_zero(i) {
            continue;
        }
        chosen.push(i);
        let candidate = g.restrict_rows(&chosen).expect("rows in range");
        let c = count_distinct_codewords(&candidate);
        if c > count {
            count = c;
        } else {
            chosen.pop();
        }
    }
    (chosen, count)
}

/// One greedy pass over all rows in index order. The returned subset spans as
/// many distinct codewords as the whole matrix; its size is at most
/// ceil(log2 |Span(G)|) because every kept row at least doubles the count.
pub fn build_max_spanning_subset(g: &GeneratingMatrix) -> SpanningSubset {
    let all: Vec<usize> = (0..g.rows()).collect();
    let target = count_distinct_codewords(g);
    let (indices, span_count) = greedy_subset(g, &all, &target);
    debug_assert_eq!(span_count, target);
    SpanningSubset { indices, span_count }
}

/// Up to `t` pairwise-disjoint maximum spanning subsets; subset i is maximum
/// spanning for the matrix with subsets 1..i-1 removed. Returns fewer when the
/// remaining rows span only the zero codeword.
pub fn construct_spanning_subsets(g: &GeneratingMatrix, t: usize) -> Result<Vec<SpanningSubset>> {
    if t < 1 {
        return Err(Error::InvalidArgument("subset count must be >= 1".into()));
    }
    let mut alive: Vec<usize> = (0..g.rows()).collect();
    let mut out = Vec::new();
    for _ in 0..t {
        alive.retain(|&i| !g.row_is_zero(i));
        if alive.is_empty() {
            break;
        }
        let rest = g.restrict_rows(&alive).expect("rows in range");
        let target = count_distinct_codewords(&rest);
        if target == BigUint::one() {
            break;
        }
        let (indices, span_count) = greedy_subset(g, &alive, &target);
        alive.retain(|i| !indices.contains(i));
        out.push(SpanningSubset { indices, span_count });
    }
    Ok(out)
}

/// Number of disjoint subsets to store for decomposition parameter `d`:
/// ceil(2 d log2(q) (log2(n) + log2(q))), the conservative base-2 reading.
pub fn subset_count_for(g: &GeneratingMatrix, d: u64) -> usize {
    let lq = g.spec().log2_order().max(1.0);
    let n_log = log2_biguint(&count_distinct_codewords(g));
    let n_eff = (n_log / lq).max(2.0);
    let ln = n_eff.log2().max(1.0);
    (2.0 * d as f64 * lq * (ln + lq)).ceil() as usize
}

/// Remove the union of `subset_count_for(g, d)` disjoint maximum spanning
/// subsets. After removal, for any integer alpha >= 1 the remainder has at
/// most binom(ceil(n log2 q), alpha) * q^(alpha+1) distinct codewords of
/// weight <= alpha * d.
pub fn code_decomposition(g: &GeneratingMatrix, d: u64) -> Result<Decomposition> {
    if d < 1 {
        return Err(Error::InvalidArgument("decomposition parameter d must be >= 1".into()));
    }
    code_decomposition_with_subsets(g, subset_count_for(g, d))
}

/// Decomposition with an explicit number of spanning subsets.
pub fn code_decomposition_with_subsets(g: &GeneratingMatrix, t: usize) -> Result<Decomposition> {
    let subsets = construct_spanning_subsets(g, t)?;
    let mut kept: Vec<usize> = subsets.iter().flat_map(|s| s.indices.iter().copied()).collect();
    kept.sort_unstable();
    let mut in_kept = vec![false; g.rows()];
    for &i in &kept {
        in_kept[i] = true;
    }
    let remainder: Vec<usize> = (0..g.rows()).filter(|&i| !in_kept[i]).collect();
    Ok(Decomposition { kept, remainder, subsets })
}
