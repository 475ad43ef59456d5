//! Dense matrices over `F` with p-adic entries.

use crate::error::{Error, Result};
use crate::padic::{Ctx, PadicScalar};

pub type Vector = Vec<PadicScalar>;

/// Row-major matrix.
#[derive(Clone, Debug)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<PadicScalar>,
}

impl PartialEq for Mat {
    fn eq(&self, o: &Mat) -> bool {
        self.rows == o.rows && self.cols == o.cols && self.data.iter().zip(&o.data).all(|(a, b)| a == b)
    }
}

impl Mat {
    pub fn zeros(ctx: Ctx, rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![ctx.zero(); rows * cols] }
    }

    pub fn identity(ctx: Ctx, n: usize) -> Mat {
        let mut m = Mat::zeros(ctx, n, n);
        for i in 0..n {
            m[(i, i)] = ctx.one();
        }
        m
    }

    pub fn diag(ctx: Ctx, d: &[PadicScalar]) -> Mat {
        let mut m = Mat::zeros(ctx, d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = *x;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<PadicScalar>>) -> Result<Mat> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_cols(ctx: Ctx, n: usize, cols: &[Vector]) -> Mat {
        let mut m = Mat::zeros(ctx, n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n, "column length");
            for i in 0..n {
                m[(i, j)] = c[i];
            }
        }
        m
    }

    pub fn ctx(&self) -> Ctx {
        self.data[0].ctx()
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }
    pub fn row(&self, i: usize) -> Vector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }
    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }
    pub fn to_rows(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }
    pub fn entries(&self) -> &[PadicScalar] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(&PadicScalar) -> PadicScalar) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn conj(&self) -> Mat {
        self.map(|x| x.conj())
    }

    pub fn scale(&self, s: PadicScalar) -> Mat {
        self.map(|x| *x * s)
    }

    pub fn transpose(&self) -> Mat {
        let mut m = Mat::zeros(self.ctx(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat {
        self.transpose().conj()
    }

    pub fn mul(&self, o: &Mat) -> Result<Mat> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!("{}x{} * {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let ctx = self.ctx();
        let mut m = Mat::zeros(ctx, self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = ctx.zero();
                for k in 0..self.cols {
                    let a = self[(i, k)];
                    let b = o[(k, j)];
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&(a * b))?;
                    }
                }
                m[(i, j)] = acc;
            }
        }
        Ok(m)
    }

    pub fn mul_vec(&self, v: &[PadicScalar]) -> Result<Vector> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch("matrix-vector".into()));
        }
        let ctx = self.ctx();
        (0..self.rows)
            .map(|i| {
                let mut acc = ctx.zero();
                for k in 0..self.cols {
                    let a = self[(i, k)];
                    if !a.is_zero() && !v[k].is_zero() {
                        acc = acc.add(&(a * v[k]))?;
                    }
                }
                Ok(acc)
            })
            .collect()
    }

    pub fn add(&self, o: &Mat) -> Result<Mat> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::DimensionMismatch("matrix sum".into()));
        }
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(Mat { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, o: &Mat) -> Result<Mat> {
        self.add(&o.map(|x| -*x))
    }

    pub fn pow(&self, k: usize) -> Result<Mat> {
        let mut r = Mat::identity(self.ctx(), self.rows);
        for _ in 0..k {
            r = r.mul(self)?;
        }
        Ok(r)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// All entries in `O_F`.
    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integral())
    }

    /// Minimum entry valuation (`i32::MAX` for the zero matrix).
    pub fn min_valuation(&self) -> i32 {
        self.data.iter().map(|x| x.v()).min().unwrap_or(i32::MAX)
    }

    /// Row-reduce `[self | rhs]` with minimal-valuation pivots; returns `(det, solution)`.
    fn eliminate(&self, rhs: Option<&Mat>) -> Result<(PadicScalar, Option<Mat>)> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("square matrix required".into()));
        }
        let n = self.rows;
        let ctx = self.ctx();
        let mut a = self.clone();
        let mut b = rhs.cloned();
        let mut det = ctx.one();
        for c in 0..n {
            let piv = (c..n).filter(|&r| !a[(r, c)].is_zero()).min_by_key(|&r| a[(r, c)].v());
            let Some(piv) = piv else {
                return Ok((ctx.zero(), None));
            };
            if piv != c {
                a.swap_rows(piv, c);
                if let Some(b) = b.as_mut() {
                    b.swap_rows(piv, c);
                }
                det = -det;
            }
            let pv = a[(c, c)];
            det = det * pv;
            let pinv = pv.inv()?;
            for r in 0..n {
                if r == c || a[(r, c)].is_zero() {
                    continue;
                }
                if rhs.is_none() && r < c {
                    continue;
                }
                let f = a[(r, c)] * pinv;
                for k in c..n {
                    let t = f * a[(c, k)];
                    a[(r, k)] = a[(r, k)].sub(&t)?;
                }
                a[(r, c)] = ctx.zero();
                if let Some(b) = b.as_mut() {
                    for k in 0..b.cols {
                        let t = f * b[(c, k)];
                        b[(r, k)] = b[(r, k)].sub(&t)?;
                    }
                }
            }
        }
        if let Some(b) = b.as_mut() {
            for r in 0..n {
                let pinv = a[(r, r)].inv()?;
                for k in 0..b.cols {
                    b[(r, k)] = b[(r, k)] * pinv;
                }
            }
        }
        Ok((det, b))
    }

    pub fn det(&self) -> Result<PadicScalar> {
        Ok(self.eliminate(None)?.0)
    }

    pub fn inverse(&self) -> Result<Mat> {
        let id = Mat::identity(self.ctx(), self.rows);
        match self.eliminate(Some(&id))? {
            (_, Some(x)) => Ok(x),
            _ => Err(Error::RankDeficient),
        }
    }

    /// Solve `self x = rhs` for invertible `self`.
    pub fn solve(&self, rhs: &[PadicScalar]) -> Result<Vector> {
        let b = Mat::from_cols(self.ctx(), rhs.len(), &[rhs.to_vec()]);
        match self.eliminate(Some(&b))? {
            (_, Some(x)) => Ok(x.col(0)),
            _ => Err(Error::RankDeficient),
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(a * self.cols + k, b * self.cols + k);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.rows {
            self.data.swap(k * self.cols + a, k * self.cols + b);
        }
    }

    /// Characteristic polynomial `det(T - self)` as coefficients `c_0..c_n` (monic, `c_n = 1`),
    /// by the division-free Berkowitz recursion.
    pub fn char_poly(&self) -> Result<Vector> {
        let n = self.rows;
        let ctx = self.ctx();
        // vector holds coefficients of det(T - A_r) from highest degree down
        let mut poly = vec![ctx.one()];
        for r in 0..n {
            // leading principal r x r block is A_r; new row/col index r
            let a_rr = self[(r, r)];
            let rvec: Vector = (0..r).map(|j| self[(r, j)]).collect();
            let cvec: Vector = (0..r).map(|i| self[(i, r)]).collect();
            // Toeplitz column: [1, -a_rr, -R C, -R A C, ..., -R A^{r-1} C]
            let mut t = vec![ctx.one(), -a_rr];
            let mut v = cvec.clone();
            for _ in 0..r {
                let mut s = ctx.zero();
                for j in 0..r {
                    s = s.add(&(rvec[j] * v[j]))?;
                }
                t.push(-s);
                let mut nv = vec![ctx.zero(); r];
                for i in 0..r {
                    let mut acc = ctx.zero();
                    for j in 0..r {
                        acc = acc.add(&(self[(i, j)] * v[j]))?;
                    }
                    nv[i] = acc;
                }
                v = nv;
            }
            // new poly = T * poly (convolution with Toeplitz lower-triangular)
            let mut np = vec![ctx.zero(); r + 2];
            for i in 0..r + 2 {
                let mut acc = ctx.zero();
                for j in 0..=i.min(r) {
                    if i - j < t.len() {
                        acc = acc.add(&(t[i - j] * poly[j]))?;
                    }
                }
                np[i] = acc;
            }
            poly = np;
        }
        poly.reverse();
        Ok(poly)
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = PadicScalar;
    fn index(&self, (i, j): (usize, usize)) -> &PadicScalar {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut PadicScalar {
        &mut self.data[i * self.cols + j]
    }
}

pub fn vec_add(a: &[PadicScalar], b: &[PadicScalar]) -> Result<Vector> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

pub fn vec_sub(a: &[PadicScalar], b: &[PadicScalar]) -> Result<Vector> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

pub fn vec_scale(a: &[PadicScalar], s: PadicScalar) -> Vector {
    a.iter().map(|x| *x * s).collect()
}

pub fn vec_conj(a: &[PadicScalar]) -> Vector {
    a.iter().map(|x| x.conj()).collect()
}

/// `sum a_i b_i`.
pub fn dot(a: &[PadicScalar], b: &[PadicScalar]) -> Result<PadicScalar> {
    let mut acc = a[0].ctx().zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = acc.add(&(*x * *y))?;
        }
    }
    Ok(acc)
}

/// Minimum valuation of the entries.
pub fn vec_min_valuation(a: &[PadicScalar]) -> i32 {
    a.iter().map(|x| x.v()).min().unwrap_or(i32::MAX)
}
