use super::{AlgebraError, MultiDegree, Polynomial, VarContext};

/// Matrix of multihomogeneous polynomials representing a map
/// `⊕ O(col_degrees[j]) → ⊕ O(row_degrees[i])`. Entry `(i, j)` is either zero
/// or homogeneous of degree `row_degrees[i] - col_degrees[j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    ctx: VarContext,
    row_degrees: Vec<MultiDegree>,
    col_degrees: Vec<MultiDegree>,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    /// Builds the matrix, rejecting entries of the wrong multidegree.
    pub fn new(
        ctx: VarContext,
        row_degrees: Vec<MultiDegree>,
        col_degrees: Vec<MultiDegree>,
        entries: Vec<Vec<Polynomial>>,
    ) -> Result<Self, AlgebraError> {
        let m = Self::new_unchecked(ctx, row_degrees, col_degrees, entries)?;
        m.check_homogeneous()?;
        Ok(m)
    }

    /// Builds the matrix checking only the shape; grading violations are left
    /// for [`PolyMatrix::check_homogeneous`] to report.
    pub fn new_unchecked(
        ctx: VarContext,
        row_degrees: Vec<MultiDegree>,
        col_degrees: Vec<MultiDegree>,
        entries: Vec<Vec<Polynomial>>,
    ) -> Result<Self, AlgebraError> {
        if entries.len() != row_degrees.len() {
            return Err(AlgebraError::DimensionMismatch(format!(
                "{} rows given, {} expected",
                entries.len(),
                row_degrees.len()
            )));
        }
        let ncols = col_degrees.len();
        let mut flat = Vec::with_capacity(row_degrees.len() * ncols);
        for (i, row) in entries.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(AlgebraError::DimensionMismatch(format!(
                    "row {i} has {} entries, {ncols} expected",
                    row.len()
                )));
            }
            for p in row {
                if p.nvars() != ctx.num_vars() {
                    return Err(AlgebraError::DimensionMismatch(format!(
                        "entry in row {i} uses {} variables, context has {}",
                        p.nvars(),
                        ctx.num_vars()
                    )));
                }
                flat.push(p);
            }
        }
        Ok(Self {
            ctx,
            row_degrees,
            col_degrees,
            entries: flat,
        })
    }

    pub fn identity(ctx: VarContext, degrees: Vec<MultiDegree>) -> Self {
        let n = degrees.len();
        let nv = ctx.num_vars();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            Polynomial::one(nv)
                        } else {
                            Polynomial::zero(nv)
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(ctx, degrees.clone(), degrees, entries).expect("identity is graded")
    }

    pub fn ctx(&self) -> &VarContext {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.row_degrees.len()
    }

    pub fn cols(&self) -> usize {
        self.col_degrees.len()
    }

    pub fn row_degrees(&self) -> &[MultiDegree] {
        &self.row_degrees
    }

    pub fn col_degrees(&self) -> &[MultiDegree] {
        &self.col_degrees
    }

    pub fn get(&self, row: usize, col: usize) -> &Polynomial {
        &self.entries[row * self.cols() + col]
    }

    /// Required degree of entry `(row, col)`.
    pub fn entry_degree(&self, row: usize, col: usize) -> MultiDegree {
        &self.row_degrees[row] - &self.col_degrees[col]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Polynomial::is_zero)
    }

    /// First entry violating its required multidegree, if any.
    pub fn check_homogeneous(&self) -> Result<(), AlgebraError> {
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                let p = self.get(i, j);
                if p.is_zero() {
                    continue;
                }
                let expected = self.entry_degree(i, j);
                match p.multidegree(&self.ctx) {
                    Ok(d) if d == expected => {}
                    Ok(d) => {
                        return Err(AlgebraError::EntryDegree {
                            row: i,
                            col: j,
                            expected,
                            detail: format!("found degree {d}"),
                        })
                    }
                    Err(e) => {
                        return Err(AlgebraError::EntryDegree {
                            row: i,
                            col: j,
                            expected,
                            detail: e.to_string(),
                        })
                    }
                }
            }
        }
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let (r, c) = (self.rows(), self.cols());
        let entries = (0..c)
            .map(|j| (0..r).map(|i| self.get(i, j).clone()).collect())
            .collect();
        Self {
            ctx: self.ctx.clone(),
            row_degrees: self.col_degrees.iter().map(|d| -d).collect(),
            col_degrees: self.row_degrees.iter().map(|d| -d).collect(),
            entries: Self::flatten(entries),
        }
    }

    fn flatten(rows: Vec<Vec<Polynomial>>) -> Vec<Polynomial> {
        rows.into_iter().flatten().collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Polynomial>> {
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }

    /// Entrywise sum of two matrices with identical grading.
    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.row_degrees != other.row_degrees || self.col_degrees != other.col_degrees {
            return Err(AlgebraError::DimensionMismatch(
                "sum of matrices with different gradings".into(),
            ));
        }
        Ok(Self {
            ctx: self.ctx.clone(),
            row_degrees: self.row_degrees.clone(),
            col_degrees: self.col_degrees.clone(),
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    /// Exact product `self · rhs`; the grading of the inner index must agree.
    pub fn mat_mul(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        if self.cols() != rhs.rows() {
            return Err(AlgebraError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        if self.col_degrees != rhs.row_degrees {
            return Err(AlgebraError::DimensionMismatch(
                "inner gradings differ".into(),
            ));
        }
        let nv = self.ctx.num_vars();
        let mut entries = Vec::with_capacity(self.rows() * rhs.cols());
        for i in 0..self.rows() {
            for j in 0..rhs.cols() {
                let mut acc = Polynomial::zero(nv);
                for k in 0..self.cols() {
                    let a = self.get(i, k);
                    let b = rhs.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                entries.push(acc);
            }
        }
        Ok(Self {
            ctx: self.ctx.clone(),
            row_degrees: self.row_degrees.clone(),
            col_degrees: rhs.col_degrees.clone(),
            entries,
        })
    }

    /// Rank over the field of rational functions, by Bareiss fraction-free
    /// elimination. Every intermediate entry is a minor of the input, so the
    /// division by the previous pivot is exact.
    pub fn rank_generic(&self) -> usize {
        let (nrows, ncols) = (self.rows(), self.cols());
        let mut m = self.to_rows();
        let nv = self.ctx.num_vars();
        let mut prev = Polynomial::one(nv);
        let mut rank = 0;
        for col in 0..ncols {
            if rank == nrows {
                break;
            }
            let Some(p) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            let pivot = m[rank][col].clone();
            for i in rank + 1..nrows {
                let lead = m[i][col].clone();
                for j in col + 1..ncols {
                    let cross = pivot.mul(&m[i][j]).sub(&lead.mul(&m[rank][j]));
                    m[i][j] = cross
                        .exact_div(&prev)
                        .expect("Bareiss step divides exactly by the previous pivot");
                }
                m[i][col] = Polynomial::zero(nv);
            }
            prev = pivot;
            rank += 1;
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;

    fn p(text: &str, ctx: &VarContext) -> Polynomial {
        parse_poly(text, ctx).unwrap()
    }

    fn md(v: &[i64]) -> MultiDegree {
        MultiDegree::new(v.to_vec())
    }

    /// α and β of the explicit P²×P¹ monad after twisting by O(-1,0).
    fn alpha_beta() -> (PolyMatrix, PolyMatrix) {
        let ctx = VarContext::product(2, 1).unwrap();
        let m1 = vec![md(&[0, 0]), md(&[0, 0]), md(&[-1, 1]), md(&[-1, 1])];
        let alpha = PolyMatrix::new(
            ctx.clone(),
            m1.clone(),
            vec![md(&[-1, 0])],
            ["x0", "x1", "y0", "y1"]
                .iter()
                .map(|t| vec![p(t, &ctx)])
                .collect(),
        )
        .unwrap();
        let beta = PolyMatrix::new(
            ctx.clone(),
            vec![md(&[0, 1])],
            m1,
            vec![["y0", "y1", "-x0", "-x1"].iter().map(|t| p(t, &ctx)).collect()],
        )
        .unwrap();
        (alpha, beta)
    }

    #[test]
    fn complex_condition_holds() {
        let (alpha, beta) = alpha_beta();
        let prod = beta.mat_mul(&alpha).unwrap();
        assert_eq!((prod.rows(), prod.cols()), (1, 1));
        assert!(prod.is_zero());
        assert_eq!(alpha.rank_generic(), 1);
        assert_eq!(beta.rank_generic(), 1);
    }

    #[test]
    fn identity_product_is_neutral() {
        let (alpha, _) = alpha_beta();
        let id = PolyMatrix::identity(alpha.ctx().clone(), alpha.row_degrees().to_vec());
        assert_eq!(id.mat_mul(&alpha).unwrap(), alpha);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let (alpha, _) = alpha_beta();
        assert!(matches!(
            alpha.mat_mul(&alpha),
            Err(AlgebraError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn wrong_entry_degree_rejected() {
        let ctx = VarContext::product(2, 1).unwrap();
        let err = PolyMatrix::new(
            ctx.clone(),
            vec![md(&[1, 0])],
            vec![md(&[0, 0])],
            vec![vec![p("y0", &ctx)]],
        )
        .unwrap_err();
        assert!(matches!(err, AlgebraError::EntryDegree { row: 0, col: 0, .. }));
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let ctx = VarContext::projective(3).unwrap();
        let m = PolyMatrix::new(
            ctx.clone(),
            vec![md(&[0]); 3],
            vec![md(&[-1]); 2],
            vec![vec![Polynomial::zero(4); 2]; 3],
        )
        .unwrap();
        assert_eq!(m.rank_generic(), 0);
    }

    #[test]
    fn skew_matrix_generic_rank() {
        // 3x3 skew-symmetric linear matrix has rank 2 generically.
        let ctx = VarContext::projective(2).unwrap();
        let rows = [["0", "x0", "x1"], ["-x0", "0", "x2"], ["-x1", "-x2", "0"]];
        let m = PolyMatrix::new(
            ctx.clone(),
            vec![md(&[1]); 3],
            vec![md(&[0]); 3],
            rows.iter()
                .map(|r| r.iter().map(|t| p(t, &ctx)).collect())
                .collect(),
        )
        .unwrap();
        assert_eq!(m.rank_generic(), 2);
    }
}
