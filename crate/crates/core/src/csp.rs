//! Boolean predicate analysis and CSP-to-code reductions.
//!
//! Predicates are truth tables over {0,1}^r (assignment x1..xr indexes the
//! table with x1 as the most significant bit). Symmetric predicates reduce to
//! level functions; periodic level functions compile to a single modular
//! equation, aperiodic ones yield a validated projection to AND_2. General
//! predicates with no single satisfying assignment compile through degree
//! (r-1) polynomials over Z_2 and an OR-combination over (Z_2)^s.

use crate::code::GeneratingMatrix;
use crate::error::{Error, Result};
use crate::group::{add, negate, GroupElement, GroupSpec};
use crate::sparsify::{sparsify, SparsifyConfig};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A Boolean predicate of fixed arity, stored as a truth table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    arity: usize,
    table: Vec<bool>,
}

impl Predicate {
    pub fn new(arity: usize, table: Vec<bool>) -> Result<Self> {
        if arity == 0 || arity > 24 {
            return Err(Error::InvalidArgument("arity must be in 1..=24".into()));
        }
        if table.len() != 1 << arity {
            return Err(Error::ShapeMismatch { expected: 1 << arity, got: table.len() });
        }
        Ok(Predicate { arity, table })
    }

    /// Predicate from a level set: P(x) = 0 exactly when popcount(x) is in `zeros`.
    pub fn from_symmetric_zero_levels(arity: usize, zeros: &[usize]) -> Result<Self> {
        if zeros.iter().any(|&z| z > arity) {
            return Err(Error::InvalidArgument("zero level exceeds arity".into()));
        }
        let table = (0..1usize << arity)
            .map(|k| !zeros.contains(&(k.count_ones() as usize)))
            .collect();
        Predicate::new(arity, table)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn index_of(bits: &[u8]) -> usize {
        bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b as usize))
    }

    pub fn assignment_of(index: usize, arity: usize) -> Vec<u8> {
        (0..arity).rev().map(|i| ((index >> i) & 1) as u8).collect()
    }

    pub fn eval(&self, bits: &[u8]) -> bool {
        self.table[Self::index_of(bits)]
    }

    pub fn satisfying_count(&self) -> usize {
        self.table.iter().filter(|&&b| b).count()
    }

    /// Satisfying assignments in ascending index order (lexicographic with x1
    /// as the most significant bit).
    pub fn satisfying_assignments(&self) -> Vec<Vec<u8>> {
        (0..self.table.len())
            .filter(|&k| self.table[k])
            .map(|k| Self::assignment_of(k, self.arity))
            .collect()
    }
}

/// A weighted constraint over n Boolean variables.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub vars: Vec<usize>,
    pub weight: f64,
    pub predicate: Arc<Predicate>,
}

/// A CSP instance: n variables and a weighted constraint list.
#[derive(Debug, Clone)]
pub struct CspInstance {
    pub n: usize,
    pub constraints: Vec<Constraint>,
}

impl CspInstance {
    pub fn new(n: usize, constraints: Vec<Constraint>) -> Result<Self> {
        for (j, c) in constraints.iter().enumerate() {
            if c.vars.len() != c.predicate.arity() {
                return Err(Error::InvalidArgument(format!(
                    "constraint {j}: {} vars for arity {}",
                    c.vars.len(),
                    c.predicate.arity()
                )));
            }
            if c.vars.iter().any(|&v| v >= n) {
                return Err(Error::IndexOutOfRange { index: j, bound: n });
            }
            if !(c.weight >= 0.0) {
                return Err(Error::InvalidArgument(format!("constraint {j}: negative weight")));
            }
        }
        Ok(CspInstance { n, constraints })
    }
}

/// Total weight of satisfied constraints under an assignment.
pub fn evaluate_csp(inst: &CspInstance, assignment: &[u8]) -> Result<f64> {
    if assignment.len() != inst.n {
        return Err(Error::ShapeMismatch { expected: inst.n, got: assignment.len() });
    }
    let mut total = 0.0;
    let mut local = Vec::new();
    for c in &inst.constraints {
        local.clear();
        local.extend(c.vars.iter().map(|&v| assignment[v]));
        if c.predicate.eval(&local) {
            total += c.weight;
        }
    }
    Ok(total)
}

/// Level function of a symmetric predicate: P0(k) for k = 0..=r, or `None`
/// when the table is not permutation invariant.
pub fn symmetric_levels(p: &Predicate) -> Option<Vec<bool>> {
    let r = p.arity();
    let mut levels: Vec<Option<bool>> = vec![None; r + 1];
    for k in 0..p.table().len() {
        let pop = k.count_ones() as usize;
        match levels[pop] {
            None => levels[pop] = Some(p.table()[k]),
            Some(v) => {
                if v != p.table()[k] {
                    return None;
                }
            }
        }
    }
    Some(levels.into_iter().map(|v| v.expect("every level is hit")).collect())
}

/// Zeros of the level function as an arithmetic progression: returns
/// (c, ell) with c the smallest zero level and ell the common difference
/// (r+1 when only one level is zero), such that P(x) = 1[sum(x) != c mod ell]
/// holds exactly; `None` when the zeros are not such a progression.
pub fn periodicity(levels: &[bool], r: usize) -> Option<(usize, usize)> {
    let zeros: Vec<usize> = (0..=r).filter(|&k| !levels[k]).collect();
    debug_assert!(!zeros.is_empty(), "caller handles predicates with no zero level");
    if zeros.is_empty() {
        return None;
    }
    let ell = if zeros.len() == 1 { r + 1 } else { zeros[1] - zeros[0] };
    if ell == 0 {
        return None;
    }
    for w in zeros.windows(2) {
        if w[1] - w[0] != ell {
            return None;
        }
    }
    // exactness: the progression accounts for every zero level and no one level
    for (k, &lv) in levels.iter().enumerate() {
        let on_progression = k % ell == zeros[0] % ell;
        if on_progression == lv {
            return None;
        }
    }
    Some((zeros[0], ell))
}

/// Where a variable is sent by a projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionRole {
    Zero,
    One,
    Var(usize),
    NegVar(usize),
}

/// A projection of predicate variables onto {0, 1, Y_k, not Y_k} whose
/// restriction equals AND of the projected variables.
#[derive(Debug, Clone, PartialEq)]
pub struct AndWitness {
    pub roles: Vec<ProjectionRole>,
    /// Number of projected variables (the AND arity).
    pub and_arity: usize,
    /// For symmetric constructions: the violating level triple (u, v, w).
    pub triple: Option<(usize, usize, usize)>,
}

impl AndWitness {
    /// Check the restriction equals AND over all assignments of the projected
    /// variables.
    pub fn verify(&self, p: &Predicate) -> bool {
        if p.arity() != self.roles.len() {
            return false;
        }
        let c = self.and_arity;
        let mut bits = vec![0u8; p.arity()];
        for y in 0..1usize << c {
            for (i, role) in self.roles.iter().enumerate() {
                bits[i] = match *role {
                    ProjectionRole::Zero => 0,
                    ProjectionRole::One => 1,
                    ProjectionRole::Var(k) => ((y >> k) & 1) as u8,
                    ProjectionRole::NegVar(k) => (1 - ((y >> k) & 1)) as u8,
                };
            }
            let want = y == (1 << c) - 1;
            if p.eval(&bits) != want {
                return false;
            }
        }
        true
    }
}

/// AND_2 witness for a non-periodic symmetric predicate, built from a
/// violating triple of levels: zeros u < v with a one at 2v-u (or 2u-v).
pub fn and_projection_symmetric(levels: &[bool], r: usize) -> Option<AndWitness> {
    let zeros: Vec<usize> = (0..=r).filter(|&k| !levels[k]).collect();
    // smallest-gap pairs first, mirroring the minimal-period argument
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (i, &u) in zeros.iter().enumerate() {
        for &v in &zeros[i + 1..] {
            pairs.push((u, v));
        }
    }
    pairs.sort_by_key(|&(u, v)| (v - u, u));
    for (u, v) in pairs {
        {
            // violation above: one at level 2v - u
            if 2 * v - u <= r && levels[2 * v - u] {
                let k = v - u;
                let mut roles = Vec::with_capacity(r);
                roles.extend(std::iter::repeat(ProjectionRole::One).take(u));
                roles.extend(std::iter::repeat(ProjectionRole::Var(0)).take(k));
                roles.extend(std::iter::repeat(ProjectionRole::Var(1)).take(k));
                roles.extend(std::iter::repeat(ProjectionRole::Zero).take(r - u - 2 * k));
                let w = AndWitness { roles, and_arity: 2, triple: Some((u, v, 2 * v - u)) };
                debug_assert!(symmetric_witness_ok(&w, levels));
                return Some(w);
            }
            // violation below: one at level 2u - v
            if 2 * u >= v && levels[2 * u - v] {
                let k = v - u;
                let w0 = 2 * u - v;
                let mut roles = Vec::with_capacity(r);
                roles.extend(std::iter::repeat(ProjectionRole::One).take(w0));
                roles.extend(std::iter::repeat(ProjectionRole::NegVar(0)).take(k));
                roles.extend(std::iter::repeat(ProjectionRole::NegVar(1)).take(k));
                roles.extend(std::iter::repeat(ProjectionRole::Zero).take(r - w0 - 2 * k));
                let w = AndWitness { roles, and_arity: 2, triple: Some((u, v, w0)) };
                debug_assert!(symmetric_witness_ok(&w, levels));
                return Some(w);
            }
        }
    }
    None
}

fn symmetric_witness_ok(w: &AndWitness, levels: &[bool]) -> bool {
    for y in 0..4usize {
        let mut level = 0usize;
        for role in &w.roles {
            level += match *role {
                ProjectionRole::Zero => 0,
                ProjectionRole::One => 1,
                ProjectionRole::Var(k) => (y >> k) & 1,
                ProjectionRole::NegVar(k) => 1 - ((y >> k) & 1),
            };
        }
        if levels[level] != (y == 3) {
            return false;
        }
    }
    true
}

/// Exhaustive search for a projection of `p` onto AND_c, scanning variable
/// maps in lexicographic order over the roles
/// [0, 1, Y_1, not Y_1, ..., Y_c, not Y_c]. Guarded to r <= 12.
pub fn and_projection_general(p: &Predicate, c: usize) -> Result<Option<AndWitness>> {
    let r = p.arity();
    if r > 12 {
        return Err(Error::InvalidArgument(format!(
            "projection search over {} maps refused; arity {r} > 12",
            (2 * c + 2).pow(r as u32)
        )));
    }
    if c == 0 || c > r {
        return Err(Error::InvalidArgument("AND arity must be in 1..=r".into()));
    }
    let symbols = 2 * c + 2;
    let role_of = |s: usize| -> ProjectionRole {
        match s {
            0 => ProjectionRole::Zero,
            1 => ProjectionRole::One,
            s => {
                let k = (s - 2) / 2;
                if s % 2 == 0 {
                    ProjectionRole::Var(k)
                } else {
                    ProjectionRole::NegVar(k)
                }
            }
        }
    };
    let mut counters = vec![0usize; r];
    loop {
        let roles: Vec<ProjectionRole> = counters.iter().map(|&s| role_of(s)).collect();
        // every projected variable must appear for the restriction to be AND_c
        let mut appears = vec![false; c];
        for role in &roles {
            if let ProjectionRole::Var(k) | ProjectionRole::NegVar(k) = *role {
                appears[k] = true;
            }
        }
        if appears.iter().all(|&a| a) {
            let w = AndWitness { roles, and_arity: c, triple: None };
            if w.verify(p) {
                return Ok(Some(w));
            }
        }
        // odometer over maps
        let mut i = 0;
        loop {
            if i == r {
                return Ok(None);
            }
            counters[i] += 1;
            if counters[i] < symbols {
                break;
            }
            counters[i] = 0;
            i += 1;
        }
    }
}

/// Projection-to-AND_c decision for symmetric predicates via their level
/// function: complete for any arity, since a projection of a symmetric
/// predicate is determined by role counts. Enumerates the base level `a`
/// and per-variable deltas `b_k`, using the minimal-variable realization.
pub fn symmetric_and_projection(levels: &[bool], r: usize, c: usize) -> Option<AndWitness> {
    let ri = r as i64;
    let mut deltas = vec![-ri; c];
    loop {
        'levels: for a in 0..=ri {
            // feasibility of the minimal realization
            let neg_sum: i64 = deltas.iter().map(|&b| (-b).max(0)).sum();
            let pos_sum: i64 = deltas.iter().map(|&b| b.max(0)).sum();
            let ones = a - neg_sum;
            if ones < 0 || a + pos_sum > ri {
                continue;
            }
            for y in 0..1usize << c {
                let mut level = a;
                for (k, &b) in deltas.iter().enumerate() {
                    if (y >> k) & 1 == 1 {
                        level += b;
                    }
                }
                debug_assert!((0..=ri).contains(&level));
                let want = y == (1 << c) - 1;
                if levels[level as usize] != want {
                    continue 'levels;
                }
            }
            // build explicit roles from the minimal realization
            let mut roles = Vec::with_capacity(r);
            roles.extend(std::iter::repeat(ProjectionRole::One).take(ones as usize));
            for (k, &b) in deltas.iter().enumerate() {
                if b > 0 {
                    roles.extend(std::iter::repeat(ProjectionRole::Var(k)).take(b as usize));
                } else if b < 0 {
                    roles.extend(std::iter::repeat(ProjectionRole::NegVar(k)).take((-b) as usize));
                }
            }
            roles.extend(std::iter::repeat(ProjectionRole::Zero).take(r - roles.len()));
            return Some(AndWitness { roles, and_arity: c, triple: None });
        }
        let mut k = 0;
        loop {
            if k == c {
                return None;
            }
            deltas[k] += 1;
            if deltas[k] <= ri {
                break;
            }
            deltas[k] = -ri;
            k += 1;
        }
    }
}

/// Affine form of a predicate over an Abelian group:
/// P(x) = 1 iff sum a_i x_i != b.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineRepresentation {
    pub spec: GroupSpec,
    pub coefficients: Vec<GroupElement>,
    pub constant: GroupElement,
    pub predicate: Predicate,
}

impl AffineRepresentation {
    /// Validates exhaustively over {0,1}^r that the affine form matches the
    /// predicate.
    pub fn for_predicate(
        spec: GroupSpec,
        coefficients: Vec<GroupElement>,
        constant: GroupElement,
        predicate: &Predicate,
    ) -> Result<Self> {
        let r = predicate.arity();
        if coefficients.len() != r {
            return Err(Error::ShapeMismatch { expected: r, got: coefficients.len() });
        }
        let rep = AffineRepresentation {
            spec,
            coefficients,
            constant,
            predicate: predicate.clone(),
        };
        for k in 0..1usize << r {
            let bits = Predicate::assignment_of(k, r);
            let sum = rep.sum(&bits)?;
            if (sum != rep.constant) != predicate.table()[k] {
                return Err(Error::InvalidArgument(format!(
                    "affine form disagrees with predicate at assignment index {k}"
                )));
            }
        }
        Ok(rep)
    }

    fn sum(&self, bits: &[u8]) -> Result<GroupElement> {
        let mut acc = self.spec.zero();
        for (i, &b) in bits.iter().enumerate() {
            if b == 1 {
                acc = add(&self.spec, &acc, &self.coefficients[i])?;
            }
        }
        Ok(acc)
    }
}

/// A polynomial over a group with 0/1-valued variables; monomials hold sorted
/// variable index sets (multilinear by idempotence of 0/1 values).
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialRep {
    pub spec: GroupSpec,
    pub monomials: Vec<(Vec<usize>, GroupElement)>,
    pub degree: usize,
}

impl PolynomialRep {
    pub fn eval(&self, bits: &[u8]) -> Result<GroupElement> {
        let mut acc = self.spec.zero();
        for (vars, coeff) in &self.monomials {
            if vars.iter().all(|&v| bits[v] == 1) {
                acc = add(&self.spec, &acc, coeff)?;
            }
        }
        Ok(acc)
    }
}

/// Degree <= r-1 polynomial over Z_2 that is nonzero exactly on the two given
/// assignments; validated exhaustively over {0,1}^r.
pub fn two_assignment_polynomial(a: &[u8], b: &[u8]) -> Result<PolynomialRep> {
    let r = a.len();
    if b.len() != r {
        return Err(Error::ShapeMismatch { expected: r, got: b.len() });
    }
    if r == 0 || r > 16 {
        return Err(Error::InvalidArgument("arity must be in 1..=16".into()));
    }
    if a == b {
        return Err(Error::InvalidArgument("assignments must differ".into()));
    }
    // block structure: positions where (a_i, b_i) is (1,1), (0,0), (1,0), (0,1)
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    let t3_empty = !a.iter().zip(&b).any(|(&x, &y)| x == 1 && y == 0);
    if t3_empty {
        std::mem::swap(&mut a, &mut b);
    }
    let mut t1 = Vec::new();
    let mut t2 = Vec::new();
    let mut t3 = Vec::new();
    let mut t4 = Vec::new();
    for i in 0..r {
        match (a[i], b[i]) {
            (1, 1) => t1.push(i),
            (0, 0) => t2.push(i),
            (1, 0) => t3.push(i),
            _ => t4.push(i),
        }
    }
    let s = t3[0];
    // expand the product over GF(2); a monomial is a sorted variable set
    let mut poly: std::collections::BTreeSet<Vec<usize>> = std::collections::BTreeSet::new();
    poly.insert(Vec::new());
    let multiply = |poly: &mut std::collections::BTreeSet<Vec<usize>>,
                        factor: &[Vec<usize>]| {
        let mut next: std::collections::BTreeSet<Vec<usize>> = Default::default();
        for m1 in poly.iter() {
            for m2 in factor {
                let mut m: Vec<usize> = m1.iter().chain(m2.iter()).copied().collect();
                m.sort_unstable();
                m.dedup();
                if !next.remove(&m) {
                    next.insert(m);
                }
            }
        }
        *poly = next;
    };
    for &i in &t1 {
        multiply(&mut poly, &[vec![i]]);
    }
    for &i in &t2 {
        multiply(&mut poly, &[vec![], vec![i]]);
    }
    for &i in &t3 {
        if i != s {
            multiply(&mut poly, &[vec![s], vec![i], vec![]]);
        }
    }
    for &i in &t4 {
        multiply(&mut poly, &[vec![s], vec![i]]);
    }
    let spec = GroupSpec::cyclic(2)?;
    let one = spec.element(vec![1])?;
    let degree = poly.iter().map(|m| m.len()).max().unwrap_or(0);
    let rep = PolynomialRep {
        spec,
        monomials: poly.into_iter().map(|m| (m, one.clone())).collect(),
        degree,
    };
    if rep.degree > r - 1 {
        return Err(Error::InvalidArgument("expansion exceeded degree r-1".into()));
    }
    // exhaustive validation: nonzero exactly on {a, b}
    for k in 0..1usize << r {
        let bits = Predicate::assignment_of(k, r);
        let nz = !rep.eval(&bits)?.is_zero();
        let expected = bits == a || bits == b;
        if nz != expected {
            return Err(Error::InvalidArgument(format!(
                "two-assignment polynomial wrong at index {k}"
            )));
        }
    }
    Ok(rep)
}

/// Combine affine predicates over Z_2 on a shared variable set into one
/// affine predicate over (Z_2)^s that is nonzero iff some component is.
pub fn or_of_affine(reps: &[AffineRepresentation]) -> Result<AffineRepresentation> {
    if reps.is_empty() {
        return Err(Error::InvalidArgument("need at least one representation".into()));
    }
    let r = reps[0].predicate.arity();
    for rep in reps {
        if rep.spec.moduli() != [2] {
            return Err(Error::InvalidArgument("component representations must be over Z_2".into()));
        }
        if rep.predicate.arity() != r {
            return Err(Error::ShapeMismatch { expected: r, got: rep.predicate.arity() });
        }
    }
    let s = reps.len();
    let spec = GroupSpec::new(vec![2; s])?;
    let coefficients: Vec<GroupElement> = (0..r)
        .map(|i| {
            spec.element(reps.iter().map(|rep| rep.coefficients[i].residues()[0]).collect())
        })
        .collect::<Result<_>>()?;
    let constant = spec.element(reps.iter().map(|rep| rep.constant.residues()[0]).collect())?;
    let or_table: Vec<bool> = (0..1usize << r)
        .map(|k| reps.iter().any(|rep| rep.predicate.table()[k]))
        .collect();
    let or_pred = Predicate::new(r, or_table)?;
    AffineRepresentation::for_predicate(spec, coefficients, constant, &or_pred)
}

/// Linearize polynomials over a shared group by making one column per
/// occurring monomial (sorted by degree then variable set). The lift of an
/// assignment evaluates each column's monomial.
pub fn polynomial_to_linear(
    polys: &[PolynomialRep],
    n: usize,
) -> Result<(GeneratingMatrix, Vec<Vec<usize>>)> {
    if polys.is_empty() {
        return Err(Error::InvalidArgument("need at least one polynomial".into()));
    }
    let spec = polys[0].spec.clone();
    let mut universe: Vec<Vec<usize>> = Vec::new();
    {
        let mut seen = std::collections::BTreeSet::new();
        for p in polys {
            if p.spec != spec {
                return Err(Error::InvalidArgument("polynomials must share a group".into()));
            }
            for (vars, _) in &p.monomials {
                if vars.iter().any(|&v| v >= n) {
                    return Err(Error::IndexOutOfRange {
                        index: *vars.iter().max().unwrap(),
                        bound: n,
                    });
                }
                seen.insert(vars.clone());
            }
        }
        universe.extend(seen);
        universe.sort_by(|a, b| (a.len(), a.clone()).cmp(&(b.len(), b.clone())));
    }
    let mut rows = Vec::with_capacity(polys.len());
    for p in polys {
        let lookup: BTreeMap<&[usize], &GroupElement> =
            p.monomials.iter().map(|(v, c)| (v.as_slice(), c)).collect();
        let row: Vec<GroupElement> = universe
            .iter()
            .map(|m| lookup.get(m.as_slice()).map(|&c| c.clone()).unwrap_or_else(|| spec.zero()))
            .collect();
        rows.push(row);
    }
    let g = GeneratingMatrix::new(spec, rows)?;
    Ok((g, universe))
}

/// Evaluate the monomial columns at an assignment: the lifted 0/1 message.
pub fn monomial_lift(assignment: &[u8], columns: &[Vec<usize>]) -> Vec<i64> {
    columns
        .iter()
        .map(|m| i64::from(m.iter().all(|&v| assignment[v] == 1)))
        .collect()
}

/// Encode a single-predicate affine CSP as a code: one row per constraint,
/// one column per variable plus a constant column carrying -b; the lift of an
/// assignment appends 1, and row j of G * lift(a) is nonzero iff constraint j
/// is satisfied.
pub fn encode_affine_csp(
    inst: &CspInstance,
    rep: &AffineRepresentation,
) -> Result<GeneratingMatrix> {
    let spec = &rep.spec;
    let r = rep.predicate.arity();
    let mut rows = Vec::with_capacity(inst.constraints.len());
    let mut weights = Vec::with_capacity(inst.constraints.len());
    for c in &inst.constraints {
        if c.predicate.table() != rep.predicate.table() {
            return Err(Error::MixedPredicates);
        }
        if c.vars.len() != r {
            return Err(Error::ShapeMismatch { expected: r, got: c.vars.len() });
        }
        let mut row = vec![spec.zero(); inst.n + 1];
        for (pos, &v) in c.vars.iter().enumerate() {
            // repeated variables accumulate into one column
            row[v] = add(spec, &row[v], &rep.coefficients[pos])?;
        }
        row[inst.n] = negate(spec, &rep.constant)?;
        rows.push(row);
        weights.push(c.weight);
    }
    let g = GeneratingMatrix::with_weights(spec.clone(), rows, weights)?;
    // spot-check the encoding on a few assignments
    let mut probe = vec![0u8; inst.n];
    for t in 0..inst.n.min(8) {
        probe[t] = 1;
        let lifted = lift_assignment(&probe);
        let cw = crate::code::encode(&g, &lifted)?;
        for (j, c) in inst.constraints.iter().enumerate() {
            let local: Vec<u8> = c.vars.iter().map(|&v| probe[v]).collect();
            debug_assert_eq!(!cw.is_zero_at(j), c.predicate.eval(&local));
        }
    }
    Ok(g)
}

/// The message corresponding to an assignment: the assignment bits plus a
/// trailing 1 for the constant column.
pub fn lift_assignment(assignment: &[u8]) -> Vec<i64> {
    let mut x: Vec<i64> = assignment.iter().map(|&b| b as i64).collect();
    x.push(1);
    x
}

fn map_rows_to_instance(
    inst: &CspInstance,
    kept_rows: &[(usize, f64)],
    row_to_constraint: &[usize],
) -> Result<CspInstance> {
    let constraints = kept_rows
        .iter()
        .map(|&(row, w)| {
            let c = &inst.constraints[row_to_constraint[row]];
            Constraint { vars: c.vars.clone(), weight: w, predicate: c.predicate.clone() }
        })
        .collect();
    CspInstance::new(inst.n, constraints)
}

/// Sparsify a symmetric periodic CSP through its modular affine form.
/// Aperiodic predicates produce a classification error carrying the AND_2
/// projection witness.
pub fn sparsify_symmetric_csp(
    inst: &CspInstance,
    epsilon: f64,
    seed: u64,
    cfg: &SparsifyConfig,
) -> Result<CspInstance> {
    if inst.constraints.is_empty() {
        return CspInstance::new(inst.n, Vec::new());
    }
    let pred = inst.constraints[0].predicate.clone();
    if inst.constraints.iter().any(|c| c.predicate.table() != pred.table()) {
        return Err(Error::MixedPredicates);
    }
    let r = pred.arity();
    let levels = symmetric_levels(&pred).ok_or(Error::NotSymmetric)?;
    let rep = if levels.iter().all(|&v| v) {
        // no zero level: the predicate is constantly satisfied, which is the
        // affine form with zero coefficients and a nonzero constant
        let spec = GroupSpec::cyclic(2)?;
        let coeffs = vec![spec.zero(); r];
        let constant = spec.element(vec![1])?;
        AffineRepresentation::for_predicate(spec, coeffs, constant, &pred)?
    } else if levels.iter().all(|&v| !v) {
        // never satisfied: the empty instance is an exact sparsifier
        return CspInstance::new(inst.n, Vec::new());
    } else {
        match periodicity(&levels, r) {
            Some((c, ell)) => {
                let spec = GroupSpec::cyclic(ell as u64)?;
                let one = spec.element(vec![1])?;
                let coeffs = vec![one; r];
                let constant = spec.element(vec![(c % ell) as u64])?;
                AffineRepresentation::for_predicate(spec, coeffs, constant, &pred)?
            }
            None => {
                let witness = and_projection_symmetric(&levels, r)
                    .expect("aperiodic level functions always yield a violating triple");
                debug_assert!(witness.verify(&pred));
                return Err(Error::Aperiodic { witness });
            }
        }
    };
    let g = encode_affine_csp(inst, &rep)?;
    let result = sparsify(&g, epsilon, seed, cfg)?;
    let identity_map: Vec<usize> = (0..inst.constraints.len()).collect();
    map_rows_to_instance(inst, &result.entries, &identity_map)
}

/// Sparsify any instance whose predicates each have zero or at least two
/// satisfying assignments. Constraints with no satisfying assignment drop;
/// each remaining constraint becomes an OR of two-assignment polynomials of
/// degree r-1 over Z_2, linearized over the monomial universe and sparsified
/// as a single code over (Z_2)^s.
pub fn nontrivial_sparsify(
    inst: &CspInstance,
    epsilon: f64,
    seed: u64,
    cfg: &SparsifyConfig,
) -> Result<CspInstance> {
    // classify constraints
    let mut live: Vec<usize> = Vec::new();
    for (j, c) in inst.constraints.iter().enumerate() {
        match c.predicate.satisfying_count() {
            0 => {}
            1 => return Err(Error::SingleSatisfyingAssignment { constraint: j }),
            _ => live.push(j),
        }
    }
    if live.is_empty() {
        return CspInstance::new(inst.n, Vec::new());
    }
    // per constraint: polynomials in global monomials, over GF(2)
    let mut per_constraint: Vec<Vec<BTreeMap<Vec<usize>, bool>>> = Vec::with_capacity(live.len());
    let mut s_max = 0usize;
    for &j in &live {
        let c = &inst.constraints[j];
        let sats = c.predicate.satisfying_assignments();
        let anchor = &sats[0];
        let mut polys = Vec::with_capacity(sats.len() - 1);
        for other in &sats[1..] {
            let local = two_assignment_polynomial(anchor, other)?;
            // substitute global variables; repeats union away, coefficients
            // cancel mod 2
            let mut global: BTreeMap<Vec<usize>, bool> = BTreeMap::new();
            for (vars, coeff) in &local.monomials {
                if coeff.is_zero() {
                    continue;
                }
                let mut g: Vec<usize> = vars.iter().map(|&i| c.vars[i]).collect();
                g.sort_unstable();
                g.dedup();
                let e = global.entry(g).or_insert(false);
                *e = !*e;
            }
            global.retain(|_, v| *v);
            polys.push(global);
        }
        s_max = s_max.max(polys.len());
        per_constraint.push(polys);
    }
    // column universe
    let mut universe: std::collections::BTreeSet<Vec<usize>> = Default::default();
    for polys in &per_constraint {
        for poly in polys {
            universe.extend(poly.keys().cloned());
        }
    }
    let mut columns: Vec<Vec<usize>> = universe.into_iter().collect();
    columns.sort_by(|a, b| (a.len(), a.clone()).cmp(&(b.len(), b.clone())));
    let col_index: BTreeMap<&[usize], usize> =
        columns.iter().enumerate().map(|(i, m)| (m.as_slice(), i)).collect();
    // generating matrix over (Z_2)^s_max
    let spec = GroupSpec::new(vec![2; s_max.max(1)])?;
    let u = spec.components();
    let m = live.len();
    let ncols = columns.len().max(1);
    let mut flat = vec![0u64; m * ncols * u];
    for (row, polys) in per_constraint.iter().enumerate() {
        for (k, poly) in polys.iter().enumerate() {
            for mono in poly.keys() {
                let col = col_index[mono.as_slice()];
                flat[(row * ncols + col) * u + k] = 1;
            }
        }
    }
    let mut g = GeneratingMatrix::from_flat(spec, m, ncols, flat)?;
    for (row, &j) in live.iter().enumerate() {
        g.set_weight(row, inst.constraints[j].weight);
    }
    let result = sparsify(&g, epsilon, seed, cfg)?;
    map_rows_to_instance(inst, &result.entries, &live)
}

/// Lift an assignment into the monomial universe used by
/// `nontrivial_sparsify` (exposed for verification).
pub fn nontrivial_lift(assignment: &[u8], columns: &[Vec<usize>]) -> Vec<i64> {
    monomial_lift(assignment, columns)
}

/// Classification certificate for arity-3 predicates.
#[derive(Debug, Clone, PartialEq)]
pub enum Arity3Certificate {
    /// Exactly one satisfying assignment (the AND_3 case up to negations).
    SingleSatisfying(Vec<u8>),
    /// A validated projection to AND_2.
    Projection(AndWitness),
    /// Satisfying-assignment count, with no AND_2 projection.
    SatisfyingCount(usize),
}

/// Largest c such that the predicate projects onto AND_c, for r = 3:
/// 3 iff exactly one satisfying assignment, 2 iff an AND_2 projection exists,
/// else 1.
pub fn classify_arity3(p: &Predicate) -> Result<(u8, Arity3Certificate)> {
    if p.arity() != 3 {
        return Err(Error::InvalidArgument("classification requires arity 3".into()));
    }
    let sats = p.satisfying_assignments();
    if sats.len() == 1 {
        return Ok((3, Arity3Certificate::SingleSatisfying(sats[0].clone())));
    }
    if let Some(w) = and_projection_general(p, 2)? {
        return Ok((2, Arity3Certificate::Projection(w)));
    }
    Ok((1, Arity3Certificate::SatisfyingCount(sats.len())))
}
