//! Characteristic 0/1 matrices and exact integer products.
//!
//! Rows are packed into machine words (`n <= 64`), so the Gram-type
//! products used by the pairwise checks are popcounts of row
//! intersections. Totals are returned as big integers; `IntMatrix` is the
//! slow arbitrary-precision variant kept for cross-checking the fast
//! paths entry by entry.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::family::{default_labels, full_mask, SetFamily};

/// An `m x n` matrix of 0/1 cells, one machine word per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    rows: Vec<u64>,
}

/// Diagnostic for the four reduced-matrix conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixReducedDiagnostic {
    pub missing_zero_row: bool,
    pub missing_ones_row: bool,
    /// First pair of equal rows, if any.
    pub duplicate_rows: Option<(usize, usize)>,
    /// Columns `k` with no two rows differing exactly at `k`.
    pub unseparated_columns: Vec<usize>,
}

impl MatrixReducedDiagnostic {
    pub fn is_reduced(&self) -> bool {
        !self.missing_zero_row
            && !self.missing_ones_row
            && self.duplicate_rows.is_none()
            && self.unseparated_columns.is_empty()
    }
}

impl BitMatrix {
    pub fn new(n: usize, rows: Vec<u64>) -> Result<Self> {
        if n == 0 || rows.is_empty() {
            return Err(Error::DimensionMismatch(
                "matrix dimensions must be positive".to_string(),
            ));
        }
        if n > 64 {
            return Err(Error::CapacityExceeded(n));
        }
        let mask = full_mask(n);
        for &row in &rows {
            if row & !mask != 0 {
                return Err(Error::RowOutOfRange { row, n });
            }
        }
        Ok(BitMatrix { n, rows })
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn cell(&self, h: usize, k: usize) -> u8 {
        (self.rows[h] >> k & 1) as u8
    }

    /// Cellwise complement `1 - F(h,k)`.
    pub fn complement(&self) -> BitMatrix {
        let mask = full_mask(self.n);
        BitMatrix {
            n: self.n,
            rows: self.rows.iter().map(|&r| !r & mask).collect(),
        }
    }

    /// Transpose; requires `m <= 64` so columns fit in a word.
    pub fn transpose(&self) -> Result<BitMatrix> {
        let m = self.m();
        if m > 64 {
            return Err(Error::CapacityExceeded(m));
        }
        let rows = (0..self.n)
            .map(|k| {
                self.rows
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (h, &r)| acc | ((r >> k & 1) << h))
            })
            .collect();
        BitMatrix::new(m, rows)
    }

    /// Column sums `sum[F e_k]`, the per-element membership counts.
    pub fn column_sums(&self) -> Vec<u64> {
        (0..self.n)
            .map(|k| self.rows.iter().filter(|&&r| r >> k & 1 == 1).count() as u64)
            .collect()
    }

    /// Sum of all cells.
    pub fn total(&self) -> u64 {
        self.rows.iter().map(|r| r.count_ones() as u64).sum()
    }

    /// Reduced-matrix test: a zero row and an all-ones row exist, rows are
    /// pairwise distinct, and every column has two rows differing only there.
    pub fn reduced_diagnostic(&self) -> MatrixReducedDiagnostic {
        let mask = full_mask(self.n);
        let mut duplicate_rows = None;
        'outer: for i in 0..self.rows.len() {
            for j in 0..i {
                if self.rows[i] == self.rows[j] {
                    duplicate_rows = Some((j, i));
                    break 'outer;
                }
            }
        }
        let mut separated = 0u64;
        for &a in &self.rows {
            for &b in &self.rows {
                let d = a ^ b;
                if d.count_ones() == 1 {
                    separated |= d;
                }
            }
        }
        MatrixReducedDiagnostic {
            missing_zero_row: !self.rows.contains(&0),
            missing_ones_row: !self.rows.contains(&mask),
            duplicate_rows,
            unseparated_columns: (0..self.n).filter(|&k| separated >> k & 1 == 0).collect(),
        }
    }

    pub fn is_reduced_matrix(&self) -> bool {
        self.reduced_diagnostic().is_reduced()
    }

    /// For every row pair some row realizes `F(h,k)+F(i,k)-F(h,k)F(i,k)`
    /// cellwise, i.e. the bitwise OR.
    pub fn is_union_closed_matrix(&self) -> bool {
        let set: std::collections::HashSet<u64> = self.rows.iter().copied().collect();
        self.rows
            .iter()
            .enumerate()
            .all(|(i, &a)| self.rows[i..].iter().all(|&b| set.contains(&(a | b))))
    }

    /// For every row pair some row realizes `F(h,k)F(i,k)` cellwise (AND).
    pub fn is_intersection_closed_matrix(&self) -> bool {
        let set: std::collections::HashSet<u64> = self.rows.iter().copied().collect();
        self.rows
            .iter()
            .enumerate()
            .all(|(i, &a)| self.rows[i..].iter().all(|&b| set.contains(&(a & b))))
    }

    /// Rebuild a family from the rows; fails on duplicate rows.
    pub fn to_family(&self) -> Result<SetFamily> {
        SetFamily::new(default_labels(self.n), self.rows.clone())
    }

    /// Parse the `.bm` format: one line of `0`/`1` characters per row; an
    /// optional first line `# m n` declares the dimensions.
    pub fn parse_bm(text: &str) -> Result<Self> {
        let mut declared: Option<(usize, usize)> = None;
        let mut rows: Vec<u64> = Vec::new();
        let mut width: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if rows.is_empty() && declared.is_none() {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    if parts.len() == 2 {
                        let m = parts[0].parse().map_err(|_| Error::Parse {
                            line: line_no,
                            msg: "bad row count in header".to_string(),
                        })?;
                        let n = parts[1].parse().map_err(|_| Error::Parse {
                            line: line_no,
                            msg: "bad column count in header".to_string(),
                        })?;
                        declared = Some((m, n));
                    }
                }
                continue;
            }
            let w = line.len();
            if w > 64 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("row has {w} columns, capacity is 64"),
                });
            }
            match width {
                None => width = Some(w),
                Some(prev) if prev != w => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("row width {w} differs from {prev}"),
                    });
                }
                _ => {}
            }
            let mut row = 0u64;
            for (k, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => row |= 1 << k,
                    other => {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("unexpected character {other:?}"),
                        });
                    }
                }
            }
            rows.push(row);
        }
        let n = width.ok_or(Error::Parse {
            line: 1,
            msg: "no rows".to_string(),
        })?;
        if let Some((dm, dn)) = declared {
            if dm != rows.len() || dn != n {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("header declares {dm}x{dn} but body is {}x{n}", rows.len()),
                });
            }
        }
        BitMatrix::new(n, rows)
    }

    pub fn to_bm_string(&self) -> String {
        let mut out = format!("# {} {}\n", self.m(), self.n);
        for &row in &self.rows {
            for k in 0..self.n {
                out.push(if row >> k & 1 == 1 { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

/// Characteristic matrix of a family: cell `(h,k)` is 1 iff element `k`
/// belongs to member `h`.
pub fn characteristic_matrix(family: &SetFamily) -> BitMatrix {
    BitMatrix {
        n: family.n(),
        rows: family.rows().to_vec(),
    }
}

/// Exact sum of all entries of `A*B` (or `A*B^T`), without materializing
/// the product: each product entry is a popcount of a row intersection.
pub fn product_sum(a: &BitMatrix, b: &BitMatrix, transpose_b: bool) -> Result<BigInt> {
    let b_rows = effective_rows(a, b, transpose_b)?;
    let mut acc: u128 = 0;
    for &ra in &a.rows {
        for &rb in &b_rows {
            acc += (ra & rb).count_ones() as u128;
        }
    }
    Ok(BigInt::from(acc))
}

/// Full product matrix (testing aid; the sum-only functional is the hot path).
pub fn product_matrix(a: &BitMatrix, b: &BitMatrix, transpose_b: bool) -> Result<IntMatrix> {
    let b_rows = effective_rows(a, b, transpose_b)?;
    let rows = a
        .rows
        .iter()
        .map(|&ra| {
            b_rows
                .iter()
                .map(|&rb| BigInt::from((ra & rb).count_ones()))
                .collect()
        })
        .collect();
    Ok(IntMatrix { rows })
}

fn effective_rows(a: &BitMatrix, b: &BitMatrix, transpose_b: bool) -> Result<Vec<u64>> {
    if transpose_b {
        if a.n != b.n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times transposed {}x{}",
                a.m(),
                a.n,
                b.m(),
                b.n
            )));
        }
        Ok(b.rows.clone())
    } else {
        if a.n != b.m() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                a.m(),
                a.n,
                b.m(),
                b.n
            )));
        }
        // b.m() == a.n <= 64, so the transpose always fits
        Ok(b.transpose()?.rows)
    }
}

/// Dense matrix of exact integers, used to cross-check the packed paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    pub fn from_bits(bits: &BitMatrix) -> IntMatrix {
        IntMatrix {
            rows: bits
                .rows
                .iter()
                .map(|&r| (0..bits.n).map(|k| BigInt::from(r >> k & 1)).collect())
                .collect(),
        }
    }

    /// The signed matrix `F - complement(F)`, with entries in `{-1, 1}`.
    pub fn signed_difference(bits: &BitMatrix) -> IntMatrix {
        IntMatrix {
            rows: bits
                .rows
                .iter()
                .map(|&r| {
                    (0..bits.n)
                        .map(|k| BigInt::from(2 * (r >> k & 1) as i64 - 1))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    pub fn entry(&self, h: usize, k: usize) -> &BigInt {
        &self.rows[h][k]
    }

    /// `self * other^T` by schoolbook multiplication.
    pub fn mul_transpose(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times transposed {}x{}",
                self.m(),
                self.n(),
                other.m(),
                other.n()
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|ra| {
                other
                    .rows
                    .iter()
                    .map(|rb| ra.iter().zip(rb).map(|(x, y)| x * y).sum())
                    .collect()
            })
            .collect();
        Ok(IntMatrix { rows })
    }

    pub fn total(&self) -> BigInt {
        self.rows.iter().flatten().sum()
    }

    pub fn column_sums(&self) -> Vec<BigInt> {
        (0..self.n())
            .map(|k| self.rows.iter().map(|r| &r[k]).sum())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn five_member_family() -> SetFamily {
        SetFamily::from_masks(3, vec![0b000, 0b001, 0b010, 0b011, 0b111]).unwrap()
    }

    #[test]
    fn characteristic_matrix_examples() {
        let f = SetFamily::from_masks(1, vec![0b0, 0b1]).unwrap();
        let m = characteristic_matrix(&f);
        assert_eq!(m.rows(), &[0, 1]);

        let m = characteristic_matrix(&five_member_family());
        let cells: Vec<Vec<u8>> = (0..m.m())
            .map(|h| (0..m.n()).map(|k| m.cell(h, k)).collect())
            .collect();
        assert_eq!(
            cells,
            vec![
                vec![0, 0, 0],
                vec![1, 0, 0],
                vec![0, 1, 0],
                vec![1, 1, 0],
                vec![1, 1, 1],
            ]
        );

        // matrix -> family -> matrix round trip
        let back = characteristic_matrix(&m.to_family().unwrap());
        assert_eq!(back, m);
    }

    #[test]
    fn complement_examples() {
        let m = BitMatrix::new(2, vec![0b10]).unwrap();
        assert_eq!(m.complement().rows(), &[0b01]);
        let f = characteristic_matrix(&five_member_family());
        assert_eq!(f.complement().complement(), f);
        assert_eq!(
            f.complement(),
            characteristic_matrix(&five_member_family().complement_family())
        );
    }

    #[test]
    fn product_sum_examples() {
        let f = characteristic_matrix(&five_member_family());
        let fc = f.complement();
        assert_eq!(product_sum(&f, &f, true).unwrap(), BigInt::from(19));
        assert_eq!(product_sum(&f, &fc, true).unwrap(), BigInt::from(16));
        assert_eq!(product_sum(&fc, &f, true).unwrap(), BigInt::from(16));
        assert_eq!(product_sum(&fc, &fc, true).unwrap(), BigInt::from(24));

        let zero = BitMatrix::new(3, vec![0, 0]).unwrap();
        assert_eq!(product_sum(&zero, &zero, true).unwrap(), BigInt::from(0));

        let bad = BitMatrix::new(2, vec![0b11]).unwrap();
        assert!(matches!(
            product_sum(&f, &bad, true),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn product_entries_are_pair_statistics() {
        let fam = five_member_family();
        let f = characteristic_matrix(&fam);
        let fc = f.complement();
        let mask = fam.full_row();
        let inter = product_matrix(&f, &f, true).unwrap();
        let diff = product_matrix(&f, &fc, true).unwrap();
        let rdiff = product_matrix(&fc, &f, true).unwrap();
        let codiff = product_matrix(&fc, &fc, true).unwrap();
        for (h, &a) in fam.rows().iter().enumerate() {
            for (k, &b) in fam.rows().iter().enumerate() {
                assert_eq!(inter.entry(h, k), &BigInt::from((a & b).count_ones()));
                assert_eq!(
                    diff.entry(h, k),
                    &BigInt::from((a & !b & mask).count_ones())
                );
                assert_eq!(
                    rdiff.entry(h, k),
                    &BigInt::from((b & !a & mask).count_ones())
                );
                assert_eq!(
                    codiff.entry(h, k),
                    &BigInt::from((!a & !b & mask).count_ones())
                );
            }
        }
    }

    #[test]
    fn untransposed_product() {
        // A (2x3) * B (3x2): rows of A are (1,1,0),(0,1,1); B columns are
        // (1,1,0),(0,1,1); product entries 2,1,1,2 total 6
        let a = BitMatrix::new(3, vec![0b011, 0b110]).unwrap();
        let b = BitMatrix::new(2, vec![0b01, 0b11, 0b10]).unwrap();
        let total = product_sum(&a, &b, false).unwrap();
        assert_eq!(total, BigInt::from(6));
        let dense = IntMatrix::from_bits(&a)
            .mul_transpose(&IntMatrix::from_bits(&b.transpose().unwrap()))
            .unwrap();
        assert_eq!(dense.total(), total);
    }

    #[test]
    fn column_sums_examples() {
        let f = characteristic_matrix(&five_member_family());
        assert_eq!(f.column_sums(), vec![3, 3, 1]);
        let ones = BitMatrix::new(2, vec![0b11, 0b11]).unwrap();
        assert_eq!(ones.column_sums(), vec![2, 2]);
        assert_eq!(
            f.column_sums(),
            five_member_family().element_stats().count_in
        );
    }

    #[test]
    fn reduced_matrix_examples() {
        let f = characteristic_matrix(&five_member_family());
        assert!(f.is_reduced_matrix());

        let no_ones = BitMatrix::new(2, vec![0b00, 0b01, 0b10]).unwrap();
        let diag = no_ones.reduced_diagnostic();
        assert!(diag.missing_ones_row && !diag.missing_zero_row);

        let tiny = BitMatrix::new(1, vec![0b0, 0b1]).unwrap();
        assert!(tiny.is_reduced_matrix());

        let dup = BitMatrix::new(1, vec![0b0, 0b1, 0b1]).unwrap();
        assert_eq!(dup.reduced_diagnostic().duplicate_rows, Some((1, 2)));
    }

    #[test]
    fn closure_predicates_mirror_families() {
        use crate::family::full_mask;
        for n in 1..=3usize {
            let full = full_mask(n);
            for bits in 1u64..1 << (full + 1) {
                let rows: Vec<u64> = (0..=full).filter(|&r| bits >> r & 1 == 1).collect();
                let fam = SetFamily::from_masks(n, rows).unwrap();
                let mat = characteristic_matrix(&fam);
                assert_eq!(fam.is_union_closed(), mat.is_union_closed_matrix());
                assert_eq!(
                    fam.is_intersection_closed(),
                    mat.is_intersection_closed_matrix()
                );
                assert_eq!(fam.is_reduced(), mat.is_reduced_matrix());
            }
        }
    }

    #[test]
    fn gram_total_is_squared_column_sums() {
        let f = characteristic_matrix(&five_member_family());
        let c = IntMatrix::signed_difference(&f);
        let gram_total = c.mul_transpose(&c).unwrap().total();
        let by_columns: BigInt = c.column_sums().iter().map(|s| s * s).sum();
        assert_eq!(gram_total, by_columns);
        // delta vector is (1, 1, -3), so the total is 1 + 1 + 9
        assert_eq!(gram_total, BigInt::from(11));
    }

    #[test]
    fn intersection_plus_difference_counts_members() {
        let f = characteristic_matrix(&five_member_family());
        let fc = f.complement();
        let lhs = product_sum(&f, &f, true).unwrap() + product_sum(&f, &fc, true).unwrap();
        let m = BigInt::from(f.m());
        let cols: BigInt = f.column_sums().iter().map(|&s| BigInt::from(s)).sum();
        assert_eq!(lhs, m * cols);
    }

    #[test]
    fn bm_round_trip_and_errors() {
        let f = characteristic_matrix(&five_member_family());
        let text = f.to_bm_string();
        assert!(text.starts_with("# 5 3\n"));
        assert_eq!(BitMatrix::parse_bm(&text).unwrap(), f);
        assert_eq!(BitMatrix::parse_bm("000\n100\n").unwrap().m(), 2);

        assert!(matches!(
            BitMatrix::parse_bm("01\n011\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            BitMatrix::parse_bm("01x\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            BitMatrix::parse_bm("# 3 2\n01\n"),
            Err(Error::Parse { .. })
        ));
    }
}
