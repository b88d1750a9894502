//! Reductions to code sparsification: Cayley graphs over F_2^n and
//! cyclically closed Cayley graphs over Z_q^n, hedge-graphs, and {0,1}-valued
//! cardinality-based splitting functions.

use crate::code::GeneratingMatrix;
use crate::csp::{Constraint, CspInstance, Predicate};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::lattice::least_prime_at_least;
use crate::sparsify::{sparsify, SparsifyConfig};
use std::sync::Arc;

/// A Cayley graph over Z_q^n given by weighted generators. For q > 2 the
/// generator set is interpreted as S' with Cyc(S') implied, and the
/// `cyclically_closed` flag must be set.
#[derive(Debug, Clone, PartialEq)]
pub struct CayleySpec {
    pub modulus: u64,
    pub dimension: usize,
    /// (generator vector, weight > 0)
    pub generators: Vec<(Vec<u64>, f64)>,
    pub cyclically_closed: bool,
}

impl CayleySpec {
    pub fn new(
        modulus: u64,
        dimension: usize,
        generators: Vec<(Vec<u64>, f64)>,
        cyclically_closed: bool,
    ) -> Result<Self> {
        if modulus < 2 || dimension == 0 {
            return Err(Error::InvalidArgument("modulus >= 2 and dimension >= 1 required".into()));
        }
        for (g, w) in &generators {
            if g.len() != dimension {
                return Err(Error::ShapeMismatch { expected: dimension, got: g.len() });
            }
            if g.iter().any(|&v| v >= modulus) {
                return Err(Error::InvalidArgument("generator entry not reduced".into()));
            }
            if g.iter().all(|&v| v == 0) {
                return Err(Error::InvalidArgument("zero generator not allowed".into()));
            }
            if !(w > &0.0 && w.is_finite()) {
                return Err(Error::InvalidArgument("generator weights must be positive".into()));
            }
        }
        Ok(CayleySpec { modulus, dimension, generators, cyclically_closed })
    }
}

/// One weighted row per generator over Z_q.
pub fn cayley_to_code(spec: &CayleySpec) -> Result<GeneratingMatrix> {
    if spec.modulus > 2 && !spec.cyclically_closed {
        return Err(Error::Unsupported(
            "Cayley reduction over Z_q with q > 2 requires a cyclically closed generator set"
                .into(),
        ));
    }
    if spec.generators.is_empty() {
        return Err(Error::InvalidArgument("need at least one generator".into()));
    }
    let group = GroupSpec::cyclic(spec.modulus)?;
    let m = spec.generators.len();
    let n = spec.dimension;
    let mut flat = Vec::with_capacity(m * n);
    let mut weights = Vec::with_capacity(m);
    for (g, w) in &spec.generators {
        flat.extend_from_slice(g);
        weights.push(*w);
    }
    let mut matrix = GeneratingMatrix::from_flat(group, m, n, flat)?;
    for (j, &w) in weights.iter().enumerate() {
        matrix.set_weight(j, w);
    }
    Ok(matrix)
}

/// Laplacian eigenvalue for the character indexed by `r`:
/// q * (weighted count of generators s with <r, s> != 0 mod q).
pub fn cayley_eigenvalue(spec: &CayleySpec, r: &[u64]) -> Result<f64> {
    if r.len() != spec.dimension {
        return Err(Error::ShapeMismatch { expected: spec.dimension, got: r.len() });
    }
    let q = spec.modulus as u128;
    let mut total = 0.0;
    for (s, w) in &spec.generators {
        let dot: u128 =
            s.iter().zip(r).map(|(&a, &b)| (a as u128 * b as u128) % q).sum::<u128>() % q;
        if dot != 0 {
            total += w;
        }
    }
    Ok(spec.modulus as f64 * total)
}

/// Code-sparsify the generator matrix and keep the surviving generators with
/// their sparsifier weights. The output group is the input group, so the
/// eigenvectors (characters) are untouched.
pub fn sparsify_cayley(
    spec: &CayleySpec,
    epsilon: f64,
    seed: u64,
    cfg: &SparsifyConfig,
) -> Result<CayleySpec> {
    let code = cayley_to_code(spec)?;
    let result = sparsify(&code, epsilon, seed, cfg)?;
    let generators = result
        .entries
        .iter()
        .map(|&(j, w)| (spec.generators[j].0.clone(), w))
        .collect();
    CayleySpec::new(spec.modulus, spec.dimension, generators, spec.cyclically_closed)
}

/// A hedge: a set of edges given by its connected components of size >= 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Hedge {
    pub weight: f64,
    pub components: Vec<Vec<usize>>,
}

/// Vertices plus weighted hedges; a hedge is cut when any of its components
/// has vertices on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct HedgeGraph {
    pub n: usize,
    pub hedges: Vec<Hedge>,
}

impl HedgeGraph {
    pub fn new(n: usize, hedges: Vec<Hedge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one vertex".into()));
        }
        for (i, h) in hedges.iter().enumerate() {
            if h.components.is_empty() {
                return Err(Error::InvalidArgument(format!("hedge {i} has no components")));
            }
            if !(h.weight >= 0.0) {
                return Err(Error::InvalidArgument(format!("hedge {i} has negative weight")));
            }
            let mut seen = std::collections::HashSet::new();
            for comp in &h.components {
                if comp.len() < 2 {
                    return Err(Error::InvalidArgument(format!(
                        "hedge {i} has a component of size {}; size-1 components are never cut \
                         and must be dropped by the caller",
                        comp.len()
                    )));
                }
                for &v in comp {
                    if v >= n {
                        return Err(Error::IndexOutOfRange { index: v, bound: n });
                    }
                    if !seen.insert(v) {
                        return Err(Error::InvalidArgument(format!(
                            "hedge {i}: components must be disjoint"
                        )));
                    }
                }
            }
        }
        Ok(HedgeGraph { n, hedges })
    }

    pub fn max_components(&self) -> usize {
        self.hedges.iter().map(|h| h.components.len()).max().unwrap_or(0)
    }

    /// Direct cut evaluation: sum of weights of hedges with a split component.
    pub fn cut_value(&self, side: &[u8]) -> f64 {
        let mut total = 0.0;
        for h in &self.hedges {
            let cut = h.components.iter().any(|comp| {
                let first = side[comp[0]];
                comp.iter().any(|&v| side[v] != first)
            });
            if cut {
                total += h.weight;
            }
        }
        total
    }
}

/// Encode hedge cuts as a code over (Z_p)^R with p the least prime >= n:
/// one row per hedge; component i of the entry at column v is v's coefficient
/// in the split indicator of component C_i, namely 1 for v in C_i with an
/// extra -|C_i| at the largest-label vertex. The lift of a cut is its 0/1
/// indicator vector; row j is nonzero exactly when hedge j is cut.
pub fn hedge_to_code(h: &HedgeGraph) -> Result<(GeneratingMatrix, u64)> {
    if h.hedges.is_empty() {
        return Err(Error::InvalidArgument("need at least one hedge".into()));
    }
    let r_max = h.max_components();
    let p = least_prime_at_least(h.n as u64);
    let spec = GroupSpec::new(vec![p; r_max])?;
    let m = h.hedges.len();
    let n = h.n;
    let u = r_max;
    let mut flat = vec![0u64; m * n * u];
    for (j, hedge) in h.hedges.iter().enumerate() {
        for (i, comp) in hedge.components.iter().enumerate() {
            let anchor = *comp.iter().max().expect("components are nonempty");
            for &v in comp {
                let coeff: i64 = if v == anchor { 1 - comp.len() as i64 } else { 1 };
                flat[(j * n + v) * u + i] = coeff.rem_euclid(p as i64) as u64;
            }
        }
    }
    let mut g = GeneratingMatrix::from_flat(spec, m, n, flat)?;
    for (j, hedge) in h.hedges.iter().enumerate() {
        g.set_weight(j, hedge.weight);
    }
    Ok((g, p))
}

/// Message for a vertex side-assignment: its 0/1 indicator.
pub fn hedge_lift(side: &[u8]) -> Vec<i64> {
    side.iter().map(|&b| b as i64).collect()
}

/// Sparsify the hedge encoding and map surviving rows back to reweighted
/// hedges.
pub fn sparsify_hedge(
    h: &HedgeGraph,
    epsilon: f64,
    seed: u64,
    cfg: &SparsifyConfig,
) -> Result<HedgeGraph> {
    let (code, _) = hedge_to_code(h)?;
    let result = sparsify(&code, epsilon, seed, cfg)?;
    let hedges = result
        .entries
        .iter()
        .map(|&(j, w)| Hedge { weight: w, components: h.hedges[j].components.clone() })
        .collect();
    HedgeGraph::new(h.n, hedges)
}

/// A {0,1}-valued cardinality-based splitting function: the hyperedge cost
/// depends only on |S intersect e|.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingSpec {
    pub arity: usize,
    /// f(k) for k = 0..=arity.
    pub levels: Vec<bool>,
}

impl SplittingSpec {
    pub fn new(arity: usize, levels: Vec<bool>) -> Result<Self> {
        if levels.len() != arity + 1 {
            return Err(Error::ShapeMismatch { expected: arity + 1, got: levels.len() });
        }
        Ok(SplittingSpec { arity, levels })
    }
}

/// A general hypergraph with one shared splitting function is exactly a
/// symmetric CSP: one constraint per hyperedge.
pub fn splitting_to_csp(
    n: usize,
    hyperedges: &[(Vec<usize>, f64)],
    f: &SplittingSpec,
) -> Result<CspInstance> {
    let zeros: Vec<usize> = (0..=f.arity).filter(|&k| !f.levels[k]).collect();
    let pred = Arc::new(Predicate::from_symmetric_zero_levels(f.arity, &zeros)?);
    let mut constraints = Vec::with_capacity(hyperedges.len());
    for (e, w) in hyperedges {
        if e.len() != f.arity {
            return Err(Error::InvalidArgument(format!(
                "hyperedge arity {} does not match splitting arity {}",
                e.len(),
                f.arity
            )));
        }
        constraints.push(Constraint { vars: e.clone(), weight: *w, predicate: pred.clone() });
    }
    CspInstance::new(n, constraints)
}

/// Sparsify a shared-splitting-function hypergraph through the symmetric CSP
/// driver; aperiodic level functions surface the projection witness.
pub fn sparsify_splitting(
    n: usize,
    hyperedges: &[(Vec<usize>, f64)],
    f: &SplittingSpec,
    epsilon: f64,
    seed: u64,
    cfg: &SparsifyConfig,
) -> Result<CspInstance> {
    let inst = splitting_to_csp(n, hyperedges, f)?;
    crate::csp::sparsify_symmetric_csp(&inst, epsilon, seed, cfg)
}
