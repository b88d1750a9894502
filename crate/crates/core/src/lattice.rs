//! Integer lattices: Hermite normal form, membership systems derived from the
//! dual basis, closure testing of predicate zero sets, and synthesis of a
//! finite product-group affine form for closed zero sets.
//!
//! All arithmetic is arbitrary precision; determinants and Cramer
//! coefficients go through fraction-free (Bareiss) elimination.

use crate::csp::{AffineRepresentation, Predicate};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegerMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn new(values: Vec<Vec<i64>>) -> Result<Self> {
        let rows = values.len();
        if rows == 0 {
            return Err(Error::InvalidArgument("matrix needs at least one row".into()));
        }
        let cols = values[0].len();
        let mut data = Vec::with_capacity(rows * cols);
        for row in &values {
            if row.len() != cols {
                return Err(Error::ShapeMismatch { expected: cols, got: row.len() });
            }
            data.extend(row.iter().map(|&v| BigInt::from(v)));
        }
        Ok(IntegerMatrix { rows, cols, data })
    }

    fn zeroed(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    fn col_add_mul(&mut self, dst: usize, src: usize, k: &BigInt) {
        for r in 0..self.rows {
            let v = self.get(r, src) * k + self.get(r, dst);
            self.set(r, dst, v);
        }
    }

    fn col_swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    fn col_negate(&mut self, c: usize) {
        for r in 0..self.rows {
            let v = -self.get(r, c).clone();
            self.set(r, c, v);
        }
    }

    fn drop_cols_from(&mut self, from: usize) {
        let mut data = Vec::with_capacity(self.rows * from);
        for r in 0..self.rows {
            data.extend_from_slice(&self.data[r * self.cols..r * self.cols + from]);
        }
        self.cols = from;
        self.data = data;
    }

    fn col_is_zero(&self, c: usize) -> bool {
        (0..self.rows).all(|r| self.get(r, c).is_zero())
    }
}

/// A unimodular column operation applied during HNF reduction.
#[derive(Debug, Clone, PartialEq)]
pub enum HnfOp {
    AddMul { dst: usize, src: usize, factor: BigInt },
    Swap(usize, usize),
    Negate(usize),
}

/// Column-style Hermite normal form: staircase with positive pivots, entries
/// left of each pivot reduced into [0, pivot), trailing zero columns dropped.
/// For full-row-rank input the result is square lower triangular. The trace
/// of column operations is returned alongside.
pub fn hermite_normal_form(b: &IntegerMatrix) -> (IntegerMatrix, Vec<HnfOp>) {
    let mut h = b.clone();
    let mut ops = Vec::new();
    let mut pivot_col = 0usize;
    for row in 0..h.rows {
        if pivot_col >= h.cols {
            break;
        }
        // Euclidean reduction among columns pivot_col.. on this row
        loop {
            let mut best: Option<usize> = None;
            for c in pivot_col..h.cols {
                if !h.get(row, c).is_zero()
                    && best.map_or(true, |b0| h.get(row, c).abs() < h.get(row, b0).abs())
                {
                    best = Some(c);
                }
            }
            let Some(p) = best else { break };
            let mut again = false;
            for c in pivot_col..h.cols {
                if c == p || h.get(row, c).is_zero() {
                    continue;
                }
                let factor = -h.get(row, c).div_floor(h.get(row, p));
                h.col_add_mul(c, p, &factor);
                ops.push(HnfOp::AddMul { dst: c, src: p, factor });
                if !h.get(row, c).is_zero() {
                    again = true;
                }
            }
            if !again {
                h.col_swap(pivot_col, p);
                if p != pivot_col {
                    ops.push(HnfOp::Swap(pivot_col, p));
                }
                break;
            }
        }
        if h.get(row, pivot_col).is_zero() {
            continue; // row dependent on earlier pivots
        }
        if h.get(row, pivot_col).is_negative() {
            h.col_negate(pivot_col);
            ops.push(HnfOp::Negate(pivot_col));
        }
        // canonical reduction of the entries left of the pivot
        for c in 0..pivot_col {
            let factor = -h.get(row, c).div_floor(h.get(row, pivot_col));
            if !factor.is_zero() {
                h.col_add_mul(c, pivot_col, &factor);
                ops.push(HnfOp::AddMul { dst: c, src: pivot_col, factor });
            }
        }
        pivot_col += 1;
    }
    debug_assert!((pivot_col..h.cols).all(|c| h.col_is_zero(c)));
    h.drop_cols_from(pivot_col);
    (h, ops)
}

/// Rank = number of HNF pivots.
fn rank_of(m: &IntegerMatrix) -> usize {
    hermite_normal_form(m).0.cols
}

/// Fraction-free determinant.
fn det_bareiss(m: &IntegerMatrix) -> BigInt {
    let n = m.rows;
    debug_assert_eq!(n, m.cols);
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> =
        (0..n).map(|r| (0..n).map(|c| m.get(r, c).clone()).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    a[n - 1][n - 1].clone() * sign
}

fn minor(m: &IntegerMatrix, skip_row: usize, skip_col: usize) -> IntegerMatrix {
    let mut out = IntegerMatrix::zeroed(m.rows - 1, m.cols - 1);
    let mut rr = 0;
    for r in 0..m.rows {
        if r == skip_row {
            continue;
        }
        let mut cc = 0;
        for c in 0..m.cols {
            if c == skip_col {
                continue;
            }
            out.set(rr, cc, m.get(r, c).clone());
            cc += 1;
        }
        rr += 1;
    }
    out
}

/// adj(M) with adj(M) * M = det(M) * I.
fn adjugate(m: &IntegerMatrix) -> IntegerMatrix {
    let n = m.rows;
    let mut out = IntegerMatrix::zeroed(n, n);
    if n == 0 {
        return out;
    }
    if n == 1 {
        out.set(0, 0, BigInt::one());
        return out;
    }
    for i in 0..n {
        for j in 0..n {
            let d = det_bareiss(&minor(m, j, i));
            let v = if (i + j) % 2 == 0 { d } else { -d };
            out.set(i, j, v);
        }
    }
    out
}

/// Exact membership test for the column lattice of an integer matrix:
/// `rank` modular equations modulo the HNF determinant of the independent
/// rows, plus one integer linear equation per dependent row (Cramer form).
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipSystem {
    pub dim: usize,
    pub rank: usize,
    /// (coefficients over x_1..x_d, modulus); sum must vanish mod modulus.
    pub modular: Vec<(Vec<BigInt>, BigInt)>,
    /// coefficients over x_1..x_d; sum must be exactly zero.
    pub linear: Vec<Vec<BigInt>>,
}

impl MembershipSystem {
    pub fn accepts_i64(&self, x: &[i64]) -> bool {
        let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        self.accepts(&xb)
    }

    pub fn accepts(&self, x: &[BigInt]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        for (coeffs, modulus) in &self.modular {
            let mut acc = BigInt::zero();
            for (c, v) in coeffs.iter().zip(x) {
                acc += c * v;
            }
            if !(acc % modulus).is_zero() {
                return false;
            }
        }
        for coeffs in &self.linear {
            let mut acc = BigInt::zero();
            for (c, v) in coeffs.iter().zip(x) {
                acc += c * v;
            }
            if !acc.is_zero() {
                return false;
            }
        }
        true
    }
}

/// Derive the membership system of the column lattice of `b`.
///
/// Independent rows are selected greedily by index; their HNF block gives the
/// dual-based modular equations (adjugate rows modulo the determinant), and
/// each dependent row contributes one linear equation with Cramer-determinant
/// coefficients over the first full-rank column subset.
pub fn membership_system(b: &IntegerMatrix) -> Result<MembershipSystem> {
    let d = b.rows;
    // greedy independent rows
    let mut ind: Vec<usize> = Vec::new();
    for r in 0..d {
        let mut rows = ind.clone();
        rows.push(r);
        let sub = restrict_rows(b, &rows);
        if rank_of(&sub) == rows.len() {
            ind.push(r);
        }
    }
    let k = ind.len();
    let mut modular = Vec::new();
    let mut linear = Vec::new();
    if k > 0 {
        let bprime = restrict_rows(b, &ind);
        let (h, _) = hermite_normal_form(&bprime);
        debug_assert_eq!(h.cols, k);
        let mut det = BigInt::one();
        for i in 0..k {
            det *= h.get(i, i);
        }
        let adj = adjugate(&h);
        for i in 0..k {
            let mut coeffs = vec![BigInt::zero(); d];
            for (j, &row) in ind.iter().enumerate() {
                coeffs[row] = adj.get(i, j).mod_floor_big(&det);
            }
            if det == BigInt::one() {
                continue; // x = anything mod 1
            }
            modular.push((coeffs, det.clone()));
        }
        // first full-rank column subset of the independent block, column order
        let mut cols: Vec<usize> = Vec::new();
        for c in 0..bprime.cols {
            let mut trial = cols.clone();
            trial.push(c);
            let sub = restrict_cols(&bprime, &trial);
            if rank_of(&sub) == trial.len() {
                cols.push(c);
            }
            if cols.len() == k {
                break;
            }
        }
        debug_assert_eq!(cols.len(), k);
        // M has column i equal to independent row i restricted to `cols`
        let mut mmat = IntegerMatrix::zeroed(k, k);
        for (i, &row) in ind.iter().enumerate() {
            for (a, &c) in cols.iter().enumerate() {
                mmat.set(a, i, b.get(row, c).clone());
            }
        }
        let det_m = det_bareiss(&mmat);
        debug_assert!(!det_m.is_zero());
        for j in 0..d {
            if ind.contains(&j) {
                continue;
            }
            let mut coeffs = vec![BigInt::zero(); d];
            coeffs[j] = det_m.clone();
            for i in 0..k {
                let mut mi = mmat.clone();
                for (a, &c) in cols.iter().enumerate() {
                    mi.set(a, i, b.get(j, c).clone());
                }
                coeffs[ind[i]] = -det_bareiss(&mi);
            }
            linear.push(coeffs);
        }
    } else {
        // zero matrix: the lattice is the origin
        for j in 0..d {
            let mut coeffs = vec![BigInt::zero(); d];
            coeffs[j] = BigInt::one();
            linear.push(coeffs);
        }
    }
    let sys = MembershipSystem { dim: d, rank: k, modular, linear };
    // construction-time sanity: every generator column must be accepted
    for c in 0..b.cols {
        let col: Vec<BigInt> = (0..d).map(|r| b.get(r, c).clone()).collect();
        if !sys.accepts(&col) {
            return Err(Error::InvalidArgument(
                "membership system rejects one of its own generators".into(),
            ));
        }
    }
    Ok(sys)
}

trait ModFloor {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt;
}

impl ModFloor for BigInt {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt {
        let r = self % m;
        if r.is_negative() {
            r + m.abs()
        } else {
            r
        }
    }
}

fn restrict_rows(m: &IntegerMatrix, rows: &[usize]) -> IntegerMatrix {
    let mut out = IntegerMatrix::zeroed(rows.len(), m.cols);
    for (i, &r) in rows.iter().enumerate() {
        for c in 0..m.cols {
            out.set(i, c, m.get(r, c).clone());
        }
    }
    out
}

fn restrict_cols(m: &IntegerMatrix, cols: &[usize]) -> IntegerMatrix {
    let mut out = IntegerMatrix::zeroed(m.rows, cols.len());
    for r in 0..m.rows {
        for (i, &c) in cols.iter().enumerate() {
            out.set(r, i, m.get(r, c).clone());
        }
    }
    out
}

/// Test whether the zero set of `p` equals (lattice of its zero assignments)
/// intersected with {0,1}^r. Requires P(0^r) = 0. On failure the first
/// lattice point mapped to 1 is returned (ascending assignment index).
pub fn is_closed_zero_set(p: &Predicate) -> Result<(bool, Option<Vec<u8>>)> {
    let r = p.arity();
    let zero = vec![0u8; r];
    if p.eval(&zero) {
        return Err(Error::InvalidArgument(
            "closure test requires P(0^r) = 0; normalize by complementing variables first".into(),
        ));
    }
    let sys = zero_set_system(p)?;
    for k in 0..1usize << r {
        let bits = Predicate::assignment_of(k, r);
        let x: Vec<BigInt> = bits.iter().map(|&b| BigInt::from(b)).collect();
        if sys.accepts(&x) && p.eval(&bits) {
            return Ok((false, Some(bits)));
        }
    }
    Ok((true, None))
}

fn zero_set_system(p: &Predicate) -> Result<MembershipSystem> {
    let r = p.arity();
    let zeros: Vec<Vec<u8>> = (0..1usize << r)
        .filter(|&k| !p.table()[k])
        .map(|k| Predicate::assignment_of(k, r))
        .collect();
    let mut b = IntegerMatrix::zeroed(r, zeros.len().max(1));
    for (c, z) in zeros.iter().enumerate() {
        for (row, &bit) in z.iter().enumerate() {
            b.set(row, c, BigInt::from(bit));
        }
    }
    membership_system(&b)
}

/// Least prime >= n (>= 2), by trial division; fine at desk scale.
pub(crate) fn least_prime_at_least(n: u64) -> u64 {
    let mut p = n.max(2);
    loop {
        let mut is_prime = p >= 2;
        let mut f = 2u64;
        while f * f <= p {
            if p % f == 0 {
                is_prime = false;
                break;
            }
            f += 1;
        }
        if is_prime {
            return p;
        }
        p += 1;
    }
}

/// Compile the membership system of a set of difference vectors into a
/// product-group affine representation with the given shift; shared by the
/// closed-zeros path (shift 0) and the general affine-shift helper.
fn rep_from_system(
    p: &Predicate,
    sys: &MembershipSystem,
    shift: &[u8],
) -> Result<AffineRepresentation> {
    let r = p.arity();
    let mut moduli: Vec<u64> = Vec::new();
    let mut coeff_cols: Vec<Vec<u64>> = Vec::new(); // per component, length r
    for (coeffs, modulus) in &sys.modular {
        let m = modulus
            .to_u64()
            .ok_or_else(|| Error::InvalidArgument("lattice modulus exceeds u64".into()))?;
        if m <= 1 {
            continue;
        }
        let col: Vec<u64> = coeffs
            .iter()
            .map(|c| c.mod_floor_big(modulus).to_u64().expect("reduced residue fits"))
            .collect();
        if col.iter().all(|&v| v == 0) {
            continue;
        }
        moduli.push(m);
        coeff_cols.push(col);
    }
    if !sys.linear.is_empty() {
        let max_coeff = sys
            .linear
            .iter()
            .flat_map(|eq| eq.iter())
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::one)
            .max(BigInt::one());
        let m_used = max_coeff
            .to_u64()
            .ok_or_else(|| Error::InvalidArgument("linear coefficient exceeds u64".into()))?;
        let p_mod = least_prime_at_least(2 * (r as u64) * m_used);
        let pb = BigInt::from(p_mod);
        for eq in &sys.linear {
            let col: Vec<u64> = eq
                .iter()
                .map(|c| c.mod_floor_big(&pb).to_u64().expect("reduced residue fits"))
                .collect();
            if col.iter().all(|&v| v == 0) {
                continue;
            }
            moduli.push(p_mod);
            coeff_cols.push(col);
        }
    }
    if moduli.is_empty() {
        // the lattice covers the whole cube relative to the shift
        let spec = GroupSpec::cyclic(2)?;
        let coeffs = vec![spec.zero(); r];
        let zero = spec.zero();
        return AffineRepresentation::for_predicate(spec, coeffs, zero, p);
    }
    let spec = GroupSpec::new(moduli.clone())?;
    let coefficients: Vec<crate::group::GroupElement> = (0..r)
        .map(|v| spec.element(coeff_cols.iter().map(|col| col[v]).collect()))
        .collect::<Result<_>>()?;
    // constant = sum of coefficients over the shift positions
    let mut constant = spec.zero();
    for (v, &s) in shift.iter().enumerate() {
        if s == 1 {
            constant = crate::group::add(&spec, &constant, &coefficients[v])?;
        }
    }
    AffineRepresentation::for_predicate(spec, coefficients, constant, p)
}

/// Synthesize a finite product-group affine representation for a predicate
/// whose zero set is closed under integer combinations: modular equations
/// become Z_{M'} components and linear equations become Z_p components for
/// the least prime p >= 2 r M. Validated exhaustively by construction.
pub fn affine_rep_from_closed_zeros(p: &Predicate) -> Result<AffineRepresentation> {
    match is_closed_zero_set(p)? {
        (true, _) => {
            let sys = zero_set_system(p)?;
            let shift = vec![0u8; p.arity()];
            rep_from_system(p, &sys, &shift)
        }
        (false, Some(cex)) => Err(Error::ZeroSetNotClosed { counterexample: cex }),
        (false, None) => unreachable!("closure failure always carries a counterexample"),
    }
}

/// Affine representation through a shifted lattice: for predicates with
/// P(0^r) = 1, anchor at a zero assignment z0 and characterize the difference
/// lattice. Each candidate anchor is validated exhaustively; the first that
/// works is returned.
pub fn affine_rep_via_shift(p: &Predicate) -> Result<AffineRepresentation> {
    let r = p.arity();
    if !p.eval(&vec![0u8; r]) {
        return affine_rep_from_closed_zeros(p);
    }
    let zeros: Vec<Vec<u8>> = (0..1usize << r)
        .filter(|&k| !p.table()[k])
        .map(|k| Predicate::assignment_of(k, r))
        .collect();
    if zeros.is_empty() {
        // always satisfied: zero coefficients with a nonzero constant
        let spec = GroupSpec::cyclic(2)?;
        let coeffs = vec![spec.zero(); r];
        let constant = spec.element(vec![1])?;
        return AffineRepresentation::for_predicate(spec, coeffs, constant, p);
    }
    let mut last_err = None;
    for anchor in &zeros {
        let mut b = IntegerMatrix::zeroed(r, zeros.len());
        for (c, z) in zeros.iter().enumerate() {
            for row in 0..r {
                b.set(row, c, BigInt::from(z[row] as i64 - anchor[row] as i64));
            }
        }
        let sys = match membership_system(&b) {
            Ok(s) => s,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        match rep_from_system(p, &sys, anchor) {
            Ok(rep) => return Ok(rep),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| {
        Error::InvalidArgument("no anchor admits an affine representation".into())
    }))
}


#[cfg(test)]
mod tests {
    use super::testutil::PlantedLattice;
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn hnf_identity_and_diagonal() {
        let i2 = IntegerMatrix::new(vec![vec![1, 0], vec![0, 1]]).unwrap();
        let (h, _) = hermite_normal_form(&i2);
        assert_eq!(h, i2);
        let d = IntegerMatrix::new(vec![vec![2, 0], vec![0, 3]]).unwrap();
        let (h, _) = hermite_normal_form(&d);
        assert_eq!(h, d);
        assert_eq!(det_bareiss(&h), BigInt::from(6));
    }

    #[test]
    fn hnf_idempotent_on_random_matrices() {
        let mut rng = StdRng::seed_from_u64(51);
        for _ in 0..40 {
            use rand::Rng;
            let rows = rng.gen_range(1..4);
            let cols = rng.gen_range(1..5);
            let vals: Vec<Vec<i64>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.gen_range(-5..=5)).collect())
                .collect();
            let m = IntegerMatrix::new(vals).unwrap();
            let (h1, _) = hermite_normal_form(&m);
            if h1.cols == 0 {
                continue;
            }
            let (h2, _) = hermite_normal_form(&h1);
            assert_eq!(h1, h2);
        }
    }

    #[test]
    fn membership_diagonal_example() {
        // B = diag(2,3): equations 3x1 = 0 mod 6 and 2x2 = 0 mod 6
        let b = IntegerMatrix::new(vec![vec![2, 0], vec![0, 3]]).unwrap();
        let sys = membership_system(&b).unwrap();
        assert_eq!(sys.rank, 2);
        assert_eq!(sys.modular.len(), 2);
        assert_eq!(sys.modular[0].1, BigInt::from(6));
        let coeffs0: Vec<i64> = sys.modular[0].0.iter().map(|c| c.to_i64().unwrap()).collect();
        let coeffs1: Vec<i64> = sys.modular[1].0.iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(coeffs0, vec![3, 0]);
        assert_eq!(coeffs1, vec![0, 2]);
        assert!(sys.accepts_i64(&[2, 0]));
        assert!(sys.accepts_i64(&[4, 3]));
        assert!(!sys.accepts_i64(&[1, 0]));
        assert!(!sys.accepts_i64(&[2, 1]));
    }

    #[test]
    fn membership_rank_one_column() {
        // column (1,1): x1 free mod 1, dependent row gives x2 - x1 = 0
        let b = IntegerMatrix::new(vec![vec![1], vec![1]]).unwrap();
        let sys = membership_system(&b).unwrap();
        assert_eq!(sys.rank, 1);
        assert!(sys.modular.is_empty()); // modulus 1 dropped
        assert_eq!(sys.linear.len(), 1);
        let eq: Vec<i64> = sys.linear[0].iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(eq, vec![-1, 1]);
        assert!(sys.accepts_i64(&[5, 5]));
        assert!(!sys.accepts_i64(&[5, 4]));
    }

    #[test]
    fn membership_agrees_with_planted_oracle() {
        let mut rng = StdRng::seed_from_u64(52);
        for _ in 0..60 {
            use rand::Rng;
            let d = rng.gen_range(1..4);
            let extra = rng.gen_range(0..3);
            let lat = PlantedLattice::random(&mut rng, d, extra);
            let sys = membership_system(&lat.matrix).unwrap();
            let mut probe = vec![0i64; d];
            loop {
                assert_eq!(
                    sys.accepts_i64(&probe),
                    lat.contains(&probe),
                    "disagreement at {probe:?}"
                );
                let mut i = 0;
                loop {
                    if i == d {
                        break;
                    }
                    probe[i] += 1;
                    if probe[i] <= 5 {
                        break;
                    }
                    probe[i] = -5;
                    i += 1;
                }
                if i == d {
                    break;
                }
            }
        }
    }

    #[test]
    fn membership_agrees_with_bounded_coefficient_bruteforce() {
        let mut rng = StdRng::seed_from_u64(53);
        use rand::Rng;
        for _ in 0..10 {
            let d = 3;
            let cols = rng.gen_range(1..4);
            let vals: Vec<Vec<i64>> = (0..d)
                .map(|_| (0..cols).map(|_| rng.gen_range(-2..=2)).collect())
                .collect();
            let m = IntegerMatrix::new(vals.clone()).unwrap();
            let sys = membership_system(&m).unwrap();
            // all lattice points reachable with coefficients in [-20, 20]
            let mut reachable = std::collections::HashSet::new();
            let mut coeff = vec![-20i64; cols];
            loop {
                let pt: Vec<i64> = (0..d)
                    .map(|r| (0..cols).map(|c| vals[r][c] * coeff[c]).sum())
                    .collect();
                if pt.iter().all(|v| v.abs() <= 6) {
                    reachable.insert(pt);
                }
                let mut i = 0;
                loop {
                    if i == cols {
                        break;
                    }
                    coeff[i] += 1;
                    if coeff[i] <= 20 {
                        break;
                    }
                    coeff[i] = -20;
                    i += 1;
                }
                if i == cols {
                    break;
                }
            }
            for x0 in -6..=6i64 {
                for x1 in -6..=6i64 {
                    for x2 in -6..=6i64 {
                        let x = vec![x0, x1, x2];
                        if reachable.contains(&x) {
                            assert!(sys.accepts_i64(&x), "missing lattice point {x:?}");
                        }
                        if !sys.accepts_i64(&x) {
                            assert!(!reachable.contains(&x));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn closure_holds_for_parity_zeros() {
        // zeros = even-weight strings of length 4; lattice-closed
        let zeros: Vec<usize> = vec![0, 2, 4];
        let p = Predicate::from_symmetric_zero_levels(4, &zeros).unwrap();
        let (closed, cex) = is_closed_zero_set(&p).unwrap();
        assert!(closed, "counterexample {cex:?}");
        let rep = affine_rep_from_closed_zeros(&p).unwrap();
        // the canonical representation is a single Z_2 parity component
        assert_eq!(rep.spec.moduli(), &[2]);
        assert!(rep.coefficients.iter().all(|c| c.residues() == [1]));
    }

    #[test]
    fn closure_single_zero_point() {
        let r = 3;
        let p = Predicate::from_symmetric_zero_levels(r, &[0]).unwrap();
        let (closed, _) = is_closed_zero_set(&p).unwrap();
        assert!(closed);
        let rep = affine_rep_from_closed_zeros(&p).unwrap();
        assert_eq!(rep.predicate.table(), p.table());
    }

    #[test]
    fn closure_requires_zero_assignment_unsatisfied() {
        let p = Predicate::from_symmetric_zero_levels(3, &[1]).unwrap();
        assert!(is_closed_zero_set(&p).is_err());
    }

    #[test]
    fn shifted_rep_for_mod4_predicate() {
        // r=6, zeros at levels {1,5}: equivalent to sum(x)+3 != 0 mod 4
        let p = Predicate::from_symmetric_zero_levels(6, &[1, 5]).unwrap();
        let rep = affine_rep_via_shift(&p).unwrap();
        assert_eq!(rep.predicate.table(), p.table());
        // cross-check against the direct mod-4 form
        let spec = GroupSpec::cyclic(4).unwrap();
        let one = spec.element(vec![1]).unwrap();
        let direct = AffineRepresentation::for_predicate(
            spec.clone(),
            vec![one; 6],
            spec.element(vec![1]).unwrap(),
            &p,
        )
        .unwrap();
        assert_eq!(direct.predicate.table(), rep.predicate.table());
    }
}
