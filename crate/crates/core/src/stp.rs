//! Exact semi-tensor-product calculus: Kronecker and Khatri-Rao products,
//! logic matrices in column-index form, and the bijection between logic
//! values and basis indices.
//!
//! Everything here is exact integer arithmetic. The analysis built on top
//! depends only on zero/nonzero patterns and exact counts, so floating
//! point is banned from the kernel.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Dense matrix of arbitrary-precision integers, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseIntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl DenseIntMatrix {
    /// All-zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        DenseIntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    /// n-by-n identity.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 1..=n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Build from row vectors; convenient for literals in tests.
    ///
    /// Panics on an empty or ragged layout.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        assert!(
            !rows.is_empty() && !rows[0].is_empty(),
            "matrix must be nonempty"
        );
        let cols = rows[0].len();
        assert!(
            rows.iter().all(|r| r.len() == cols),
            "rows must have equal length"
        );
        DenseIntMatrix {
            rows: rows.len(),
            cols,
            entries: rows.iter().flatten().map(|&v| BigInt::from(v)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry at 1-based (i, j).
    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        assert!(
            (1..=self.rows).contains(&i) && (1..=self.cols).contains(&j),
            "entry ({i}, {j}) outside a {}x{} matrix",
            self.rows,
            self.cols
        );
        &self.entries[(i - 1) * self.cols + (j - 1)]
    }

    /// Overwrite the entry at 1-based (i, j).
    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        assert!(
            (1..=self.rows).contains(&i) && (1..=self.cols).contains(&j),
            "entry ({i}, {j}) outside a {}x{} matrix",
            self.rows,
            self.cols
        );
        self.entries[(i - 1) * self.cols + (j - 1)] = value;
    }

    /// Ordinary matrix product; inner dimensions must agree.
    pub fn mul(&self, other: &DenseIntMatrix) -> DenseIntMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = DenseIntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self.entries[i * self.cols + l];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.entries[l * other.cols + j];
                    if b.is_zero() {
                        continue;
                    }
                    out.entries[i * other.cols + j] += a * b;
                }
            }
        }
        out
    }
}

/// Kronecker product A ⊗ B.
pub fn kron(a: &DenseIntMatrix, b: &DenseIntMatrix) -> DenseIntMatrix {
    let mut out = DenseIntMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for ia in 0..a.rows {
        for ja in 0..a.cols {
            let va = &a.entries[ia * a.cols + ja];
            if va.is_zero() {
                continue;
            }
            for ib in 0..b.rows {
                for jb in 0..b.cols {
                    let vb = &b.entries[ib * b.cols + jb];
                    if vb.is_zero() {
                        continue;
                    }
                    let i = ia * b.rows + ib;
                    let j = ja * b.cols + jb;
                    out.entries[i * out.cols + j] = va * vb;
                }
            }
        }
    }
    out
}

/// Semi-tensor product: with α the least common multiple of cols(A) and
/// rows(B), the ordinary product (A ⊗ I_{α/cols(A)})(B ⊗ I_{α/rows(B)}).
/// Defined for every shape pair and equal to the ordinary product whenever
/// the inner dimensions already agree.
pub fn stp(a: &DenseIntMatrix, b: &DenseIntMatrix) -> DenseIntMatrix {
    let alpha = a.cols.lcm(&b.rows);
    let left = if alpha == a.cols {
        a.clone()
    } else {
        kron(a, &DenseIntMatrix::identity(alpha / a.cols))
    };
    let right = if alpha == b.rows {
        b.clone()
    } else {
        kron(b, &DenseIntMatrix::identity(alpha / b.rows))
    };
    left.mul(&right)
}

/// Khatri-Rao product: column j of the result is the semi-tensor product of
/// column j of `a` and column j of `b`. For single columns the STP reduces
/// to the Kronecker product, so the result has rows(a)·rows(b) rows.
pub fn khatri_rao(a: &DenseIntMatrix, b: &DenseIntMatrix) -> Result<DenseIntMatrix> {
    if a.cols != b.cols {
        return Err(Error::ColumnCountMismatch {
            left: a.cols,
            right: b.cols,
        });
    }
    let mut out = DenseIntMatrix::zeros(a.rows * b.rows, a.cols);
    for j in 0..a.cols {
        for ia in 0..a.rows {
            let va = &a.entries[ia * a.cols + j];
            if va.is_zero() {
                continue;
            }
            for ib in 0..b.rows {
                let vb = &b.entries[ib * b.cols + j];
                if vb.is_zero() {
                    continue;
                }
                out.entries[(ia * b.rows + ib) * out.cols + j] = va * vb;
            }
        }
    }
    Ok(out)
}

/// The basis column δ_n^i as a dense n-by-1 matrix.
pub fn basis_vector(n: usize, i: usize) -> DenseIntMatrix {
    assert!((1..=n).contains(&i), "basis index {i} outside [1..{n}]");
    let mut v = DenseIntMatrix::zeros(n, 1);
    v.set(i, 1, BigInt::one());
    v
}

/// Matrix whose every column is a canonical basis vector, stored as the list
/// of 1-based column indices: dim n with columns `[i_1, ..., i_s]` stands
/// for the n-by-s matrix δ_n[i_1, ..., i_s] whose j-th column is column i_j
/// of the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicMatrix {
    dim: usize,
    cols: Vec<usize>,
}

impl LogicMatrix {
    /// Validates every stored index against `dim`.
    pub fn new(dim: usize, cols: Vec<usize>) -> Result<Self> {
        assert!(dim >= 1, "logic matrix dimension must be positive");
        for &c in &cols {
            if c < 1 || c > dim {
                return Err(Error::IndexOutOfRange {
                    what: "logic matrix column",
                    index: c,
                    bound: dim,
                });
            }
        }
        Ok(LogicMatrix { dim, cols })
    }

    /// The identity δ_n[1, ..., n].
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1);
        LogicMatrix {
            dim: n,
            cols: (1..=n).collect(),
        }
    }

    /// Row dimension n.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored columns.
    pub fn col_count(&self) -> usize {
        self.cols.len()
    }

    /// Basis index of column j (1-based on both sides).
    pub fn col(&self, j: usize) -> usize {
        self.cols[j - 1]
    }

    /// All stored column indices in order.
    pub fn col_indices(&self) -> &[usize] {
        &self.cols
    }

    /// Expand to a dense 0/1 matrix.
    pub fn to_dense(&self) -> DenseIntMatrix {
        let mut m = DenseIntMatrix::zeros(self.dim, self.cols.len());
        for (j, &i) in self.cols.iter().enumerate() {
            m.set(i, j + 1, BigInt::one());
        }
        m
    }

    /// Khatri-Rao product without leaving column-index form: for dims n and
    /// p the result has dim n·p and column indices (i_a - 1)·p + i_b.
    pub fn khatri_rao(&self, other: &LogicMatrix) -> Result<LogicMatrix> {
        if self.cols.len() != other.cols.len() {
            return Err(Error::ColumnCountMismatch {
                left: self.cols.len(),
                right: other.cols.len(),
            });
        }
        let p = other.dim;
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(&ia, &ib)| (ia - 1) * p + ib)
            .collect();
        Ok(LogicMatrix {
            dim: self.dim * p,
            cols,
        })
    }
}

/// The bijection between the k-valued logic domain {0, ..., n-1} and basis
/// indices [1..n]: value a sits at index n - a, so the largest logic value
/// maps to index 1. Confined to this type and `structural_matrix`; the rest
/// of the crate speaks basis indices only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogicValueMap {
    n: usize,
}

impl LogicValueMap {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "logic domain must be nonempty");
        LogicValueMap { n }
    }

    pub fn domain_size(&self) -> usize {
        self.n
    }

    /// Basis index of a logic value.
    pub fn index_of(&self, value: u64) -> Result<usize> {
        if value >= self.n as u64 {
            return Err(Error::ValueOutOfDomain {
                value,
                domain: self.n,
            });
        }
        Ok(self.n - value as usize)
    }

    /// Logic value at a basis index.
    pub fn value_of(&self, index: usize) -> Result<u64> {
        if index < 1 || index > self.n {
            return Err(Error::IndexOutOfRange {
                what: "basis",
                index,
                bound: self.n,
            });
        }
        Ok((self.n - index) as u64)
    }
}

/// Structural matrix of a finite logic function: the unique logic matrix L
/// with `codomain` rows and one column per argument tuple such that applying
/// L by STP to the basis vectors of the arguments yields the basis vector of
/// the function value.
///
/// `table` maps argument tuples of plain logic values (not basis indices) to
/// the function value and must cover the whole product domain. Column order
/// follows the STP of the argument basis vectors: the composed column for
/// indices (i_1, ..., i_k) is their mixed-radix number, last index fastest.
pub fn structural_matrix(
    domains: &[usize],
    codomain: usize,
    table: &HashMap<Vec<u64>, u64>,
) -> Result<LogicMatrix> {
    assert!(!domains.is_empty(), "at least one argument domain required");
    let out_map = LogicValueMap::new(codomain);
    let maps: Vec<LogicValueMap> = domains.iter().map(|&d| LogicValueMap::new(d)).collect();
    let mut cols = Vec::new();
    let mut indices = vec![1usize; domains.len()];
    'columns: loop {
        let tuple: Vec<u64> = indices
            .iter()
            .zip(&maps)
            .map(|(&i, m)| m.value_of(i).expect("odometer stays in range"))
            .collect();
        let value = *table.get(&tuple).ok_or(Error::MissingTableEntry {
            tuple: tuple.clone(),
        })?;
        cols.push(out_map.index_of(value)?);
        let mut pos = domains.len();
        loop {
            if pos == 0 {
                break 'columns;
            }
            if indices[pos - 1] == domains[pos - 1] {
                indices[pos - 1] = 1;
                pos -= 1;
            } else {
                indices[pos - 1] += 1;
                break;
            }
        }
    }
    LogicMatrix::new(codomain, cols)
}

/// Tabulate `f` over the full product domain of plain logic values.
pub fn truth_table(domains: &[usize], f: impl Fn(&[u64]) -> u64) -> HashMap<Vec<u64>, u64> {
    assert!(!domains.is_empty());
    let mut table = HashMap::new();
    let mut tuple = vec![0u64; domains.len()];
    'rows: loop {
        table.insert(tuple.clone(), f(&tuple));
        let mut pos = domains.len();
        loop {
            if pos == 0 {
                break 'rows;
            }
            if tuple[pos - 1] + 1 == domains[pos - 1] as u64 {
                tuple[pos - 1] = 0;
                pos -= 1;
            } else {
                tuple[pos - 1] += 1;
                break;
            }
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[Vec<i64>]) -> DenseIntMatrix {
        DenseIntMatrix::from_rows(rows)
    }

    /// Strategy for a small dense matrix with a consistent shape.
    fn small_matrix() -> impl Strategy<Value = DenseIntMatrix> {
        (1usize..=3, 1usize..=3)
            .prop_flat_map(|(rows, cols)| {
                proptest::collection::vec(-4i64..=4, rows * cols)
                    .prop_map(move |flat| (rows, cols, flat))
            })
            .prop_map(|(rows, cols, flat)| {
                let grid: Vec<Vec<i64>> =
                    flat.chunks(cols).take(rows).map(<[i64]>::to_vec).collect();
                DenseIntMatrix::from_rows(&grid)
            })
    }

    #[test]
    fn kron_of_row_and_column() {
        let a = m(&[vec![1, 2]]);
        let b = m(&[vec![3], vec![4]]);
        assert_eq!(kron(&a, &b), m(&[vec![3, 6], vec![4, 8]]));
    }

    #[test]
    fn kron_with_identity_is_block_diagonal() {
        let a = m(&[vec![1, 2], vec![3, 4]]);
        assert_eq!(kron(&a, &DenseIntMatrix::identity(1)), a);
        let blown = kron(&a, &DenseIntMatrix::identity(2));
        assert_eq!(blown.rows(), 4);
        assert_eq!(*blown.entry(1, 1), BigInt::from(1));
        assert_eq!(*blown.entry(2, 2), BigInt::from(1));
        assert_eq!(*blown.entry(1, 2), BigInt::from(0));
        assert_eq!(*blown.entry(3, 1), BigInt::from(3));
        assert_eq!(*blown.entry(4, 4), BigInt::from(4));
    }

    #[test]
    fn stp_of_compatible_shapes_is_ordinary_product() {
        let a = m(&[vec![1, 2], vec![3, 4]]);
        let b = m(&[vec![5, 6], vec![7, 8]]);
        assert_eq!(stp(&a, &b), a.mul(&b));
    }

    #[test]
    fn stp_of_basis_vectors_composes_indices() {
        // δ_2^i ⋉ δ_2^j = δ_4^((i-1)*2 + j)
        for i in 1..=2 {
            for j in 1..=2 {
                let prod = stp(&basis_vector(2, i), &basis_vector(2, j));
                assert_eq!(prod, basis_vector(4, (i - 1) * 2 + j));
            }
        }
    }

    #[test]
    fn stp_with_identity_is_neutral() {
        let v = basis_vector(4, 3);
        assert_eq!(stp(&DenseIntMatrix::identity(2), &v), v);
        assert_eq!(stp(&DenseIntMatrix::identity(4), &v), v);
    }

    #[test]
    fn khatri_rao_composes_columns() {
        let a = LogicMatrix::new(2, vec![1, 2]).unwrap();
        let b = LogicMatrix::new(2, vec![1, 1]).unwrap();
        let ab = a.khatri_rao(&b).unwrap();
        assert_eq!(ab.dim(), 4);
        assert_eq!(ab.col_indices(), &[1, 3]);
    }

    #[test]
    fn khatri_rao_rejects_column_mismatch() {
        let a = m(&[vec![1, 2]]);
        let b = m(&[vec![1, 2, 3]]);
        match khatri_rao(&a, &b) {
            Err(crate::error::Error::ColumnCountMismatch { left: 2, right: 3 }) => {}
            other => panic!("expected column mismatch, got {other:?}"),
        }
    }

    #[test]
    fn logic_matrix_rejects_out_of_range_columns() {
        assert!(LogicMatrix::new(3, vec![1, 4]).is_err());
        assert!(LogicMatrix::new(3, vec![0]).is_err());
        assert!(LogicMatrix::new(3, vec![3, 2, 1]).is_ok());
    }

    #[test]
    fn value_map_is_an_involution_pair() {
        for n in 1..=5usize {
            let map = LogicValueMap::new(n);
            for value in 0..n as u64 {
                let index = map.index_of(value).unwrap();
                assert!((1..=n).contains(&index));
                assert_eq!(map.value_of(index).unwrap(), value);
            }
            assert!(map.index_of(n as u64).is_err());
            assert!(map.value_of(0).is_err());
            assert!(map.value_of(n + 1).is_err());
        }
    }

    #[test]
    fn structural_matrix_of_xor() {
        let table = truth_table(&[2, 2], |args| args[0] ^ args[1]);
        let l = structural_matrix(&[2, 2], 2, &table).unwrap();
        assert_eq!(l.col_indices(), &[2, 1, 1, 2]);
    }

    #[test]
    fn structural_matrix_of_negation_and_constants() {
        let neg = structural_matrix(&[2], 2, &truth_table(&[2], |a| 1 - a[0])).unwrap();
        assert_eq!(neg.col_indices(), &[2, 1]);
        let zero = structural_matrix(&[2, 2], 2, &truth_table(&[2, 2], |_| 0)).unwrap();
        assert_eq!(zero.col_indices(), &[2, 2, 2, 2]);
        let ident3 = structural_matrix(&[3], 3, &truth_table(&[3], |a| a[0])).unwrap();
        assert_eq!(ident3.col_indices(), &[1, 2, 3]);
    }

    #[test]
    fn structural_matrix_reports_missing_and_bad_entries() {
        let mut table = truth_table(&[2, 2], |args| args[0] & args[1]);
        table.remove(&vec![0, 1]);
        match structural_matrix(&[2, 2], 2, &table) {
            Err(crate::error::Error::MissingTableEntry { tuple }) => {
                assert_eq!(tuple, vec![0, 1]);
            }
            other => panic!("expected missing entry, got {other:?}"),
        }
        let bad = truth_table(&[2], |_| 7);
        match structural_matrix(&[2], 2, &bad) {
            Err(crate::error::Error::ValueOutOfDomain {
                value: 7,
                domain: 2,
            }) => {}
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    /// Evaluate a structural matrix on concrete arguments by folding STP
    /// over the argument basis vectors.
    fn evaluate(l: &LogicMatrix, domains: &[usize], args: &[u64]) -> u64 {
        let mut acc = l.to_dense();
        for (&d, &a) in domains.iter().zip(args) {
            let map = LogicValueMap::new(d);
            acc = stp(&acc, &basis_vector(d, map.index_of(a).unwrap()));
        }
        assert_eq!(acc.cols(), 1);
        let out = LogicValueMap::new(l.dim());
        let index = (1..=l.dim())
            .find(|&i| !acc.entry(i, 1).is_zero())
            .expect("result column is a basis vector");
        out.value_of(index).unwrap()
    }

    proptest! {
        #[test]
        fn stp_is_associative(
            a in small_matrix(),
            b in small_matrix(),
            c in small_matrix(),
        ) {
            prop_assert_eq!(stp(&stp(&a, &b), &c), stp(&a, &stp(&b, &c)));
        }

        #[test]
        fn logic_khatri_rao_agrees_with_dense_route(
            dim_a in 1usize..=4,
            dim_b in 1usize..=4,
            cols in proptest::collection::vec((1usize..=16, 1usize..=16), 1..=6),
        ) {
            let ca: Vec<usize> = cols.iter().map(|&(x, _)| (x - 1) % dim_a + 1).collect();
            let cb: Vec<usize> = cols.iter().map(|&(_, y)| (y - 1) % dim_b + 1).collect();
            let a = LogicMatrix::new(dim_a, ca).unwrap();
            let b = LogicMatrix::new(dim_b, cb).unwrap();
            let indexed = a.khatri_rao(&b).unwrap().to_dense();
            let dense = khatri_rao(&a.to_dense(), &b.to_dense()).unwrap();
            prop_assert_eq!(indexed, dense);
        }

        #[test]
        fn structural_matrix_reproduces_its_table(
            domains in proptest::collection::vec(2usize..=3, 1..=3),
            codomain in 2usize..=3,
            seed in any::<u64>(),
        ) {
            // cheap deterministic table from the seed
            let table = truth_table(&domains, |args| {
                let mut h = seed;
                for &a in args {
                    h = h.wrapping_mul(6364136223846793005).wrapping_add(a + 1442695040888963407);
                }
                h % codomain as u64
            });
            let l = structural_matrix(&domains, codomain, &table).unwrap();
            for (args, &want) in &table {
                prop_assert_eq!(evaluate(&l, &domains, args), want);
            }
        }
    }
}
