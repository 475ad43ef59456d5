//! Regular semisimple data on the symmetric side `(γ, u1, u2)` and the unitary side `(g, u)`,
//! their matching invariants, transfer factors and seeded samplers of matching pairs.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattices::{standard_space_and_lattice, HermitianLattice, HermitianSpace};
use crate::linalg::{dot, Mat, Vector};
use crate::padic::{Ctx, PadicScalar};

/// `(γ, u1, u2)` with `γ conj(γ) = 1`, `u1 ∈ V0`, `u2 ∈ V0^*` (a row vector).
#[derive(Clone, Debug)]
pub struct SymTriple {
    pub space: Arc<HermitianSpace>,
    pub gamma: Mat,
    pub u1: Vector,
    pub u2: Vector,
}

/// `(g, u)` with `g` unitary for the space.
#[derive(Clone, Debug)]
pub struct UnitaryPair {
    pub space: Arc<HermitianSpace>,
    pub g: Mat,
    pub u: Vector,
}

/// Characteristic polynomial (`c_0..c_n`, monic) and the moments `a_0..a_{n-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantRecord {
    pub char_poly: Vector,
    pub moments: Vector,
}

/// Krylov matrix with columns `x, A x, …, A^{n-1} x`.
pub fn krylov(a: &Mat, x: &[PadicScalar]) -> Result<Mat> {
    let n = a.rows();
    let mut cols = vec![x.to_vec()];
    for i in 1..n {
        cols.push(a.mul_vec(&cols[i - 1])?);
    }
    Ok(Mat::from_cols(a.ctx(), n, &cols))
}

fn in_base_field(v: &[PadicScalar]) -> bool {
    v.iter().all(|x| x.in_base_field())
}

impl SymTriple {
    pub fn new(space: Arc<HermitianSpace>, gamma: Mat, u1: Vector, u2: Vector) -> Result<SymTriple> {
        let n = space.dim();
        if gamma.rows() != n || !gamma.is_square() || u1.len() != n || u2.len() != n {
            return Err(Error::DimensionMismatch("triple dimensions".into()));
        }
        if !in_base_field(&u1) || !in_base_field(&u2) {
            return Err(Error::NotInBaseField);
        }
        if gamma.mul(&gamma.conj())? != Mat::identity(space.ctx(), n) {
            return Err(Error::Invalid("gamma conj(gamma) != 1".into()));
        }
        Ok(SymTriple { space, gamma, u1, u2 })
    }

    pub fn ctx(&self) -> Ctx {
        self.space.ctx()
    }
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `u2(γ^k u1)` for any integer `k`, negative powers through `γ^{-1} = conj(γ)`.
    pub fn moment(&self, k: i64) -> Result<PadicScalar> {
        let base = if k >= 0 { self.gamma.clone() } else { self.gamma.conj() };
        let mut v = self.u1.clone();
        for _ in 0..k.unsigned_abs() {
            v = base.mul_vec(&v)?;
        }
        dot(&self.u2, &v)
    }

    /// `M_ij = u2(γ^{i+j} u1)`.
    pub fn moment_matrix(&self) -> Result<Mat> {
        let n = self.dim();
        let ms: Vec<PadicScalar> = (0..2 * n as i64).map(|k| self.moment(k)).collect::<Result<_>>()?;
        let rows = (0..n).map(|i| (0..n).map(|j| ms[i + j]).collect()).collect();
        Mat::from_rows(rows)
    }

    pub fn is_rs(&self) -> Result<bool> {
        Ok(!self.moment_matrix()?.det()?.is_zero())
    }

    pub fn invariants(&self) -> Result<InvariantRecord> {
        let n = self.dim() as i64;
        Ok(InvariantRecord {
            char_poly: self.gamma.char_poly()?,
            moments: (0..n).map(|k| self.moment(k)).collect::<Result<_>>()?,
        })
    }

    /// `h·(γ, u1, u2) = (h γ h^{-1}, h u1, u2 h^{-1})` for `h ∈ GL(V0)`.
    pub fn act(&self, h: &Mat) -> Result<SymTriple> {
        if !h.entries().iter().all(|x| x.in_base_field()) {
            return Err(Error::NotInBaseField);
        }
        let hi = h.inverse()?;
        let u2 = hi.transpose().mul_vec(&self.u2)?;
        Ok(SymTriple { space: self.space.clone(), gamma: h.mul(&self.gamma)?.mul(&hi)?, u1: h.mul_vec(&self.u1)?, u2 })
    }

    /// `η(det(u1, γ u1, …, γ^{n-1} u1))` in the basis of `L`.
    pub fn transfer_factor(&self, l: &HermitianLattice) -> Result<i32> {
        let d = krylov(&self.gamma, &self.u1)?.det()?;
        if d.is_zero() {
            return Err(Error::DegenerateGram);
        }
        Ok(sign_of(d.v() - l.det_valuation()))
    }

    /// Hermitian Gram `A_ij = a_{i-j}` of the cyclic basis `g^i u` of the matching unitary pair.
    pub fn cyclic_gram(&self) -> Result<Mat> {
        cyclic_gram_from(self.dim(), |k| self.moment(k))
    }

    /// Whether the matching unitary orbit lives in a split space.
    pub fn matching_space_split(&self) -> Result<bool> {
        let a = self.cyclic_gram()?;
        let d = a.det()?;
        if d.is_zero() {
            return Err(Error::DegenerateGram);
        }
        Ok(d.eta()? == 1)
    }

    /// The unitary pair `(g, u)` on the cyclic model: `g` is the companion matrix of the
    /// characteristic polynomial, `u = e_0`, Gram `A_ij = a_{i-j}`.
    pub fn matching_pair(&self) -> Result<UnitaryPair> {
        let space = HermitianSpace::new(self.cyclic_gram()?)?;
        let g = companion(&self.gamma.char_poly()?);
        let mut u = vec![self.ctx().zero(); self.dim()];
        u[0] = self.ctx().one();
        UnitaryPair::new(space, g, u)
    }
}

fn cyclic_gram_from(n: usize, moment: impl Fn(i64) -> Result<PadicScalar>) -> Result<Mat> {
    let ms: Vec<PadicScalar> = (-(n as i64) + 1..n as i64).map(&moment).collect::<Result<_>>()?;
    let at = |k: i64| ms[(k + n as i64 - 1) as usize];
    let rows = (0..n).map(|i| (0..n).map(|j| at(i as i64 - j as i64)).collect()).collect();
    Mat::from_rows(rows)
}

/// Companion matrix of a monic polynomial `c_0..c_n`: `e_i ↦ e_{i+1}`, `e_{n-1} ↦ -Σ c_k e_k`.
pub fn companion(cp: &[PadicScalar]) -> Mat {
    let n = cp.len() - 1;
    let ctx = cp[0].ctx();
    let mut m = Mat::zeros(ctx, n, n);
    for i in 0..n {
        if i + 1 < n {
            m[(i + 1, i)] = ctx.one();
        }
        m[(i, n - 1)] = -cp[i];
    }
    m
}

pub(crate) fn sign_of(v: i32) -> i32 {
    if v.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

impl UnitaryPair {
    pub fn new(space: Arc<HermitianSpace>, g: Mat, u: Vector) -> Result<UnitaryPair> {
        let n = space.dim();
        if g.rows() != n || !g.is_square() || u.len() != n {
            return Err(Error::DimensionMismatch("pair dimensions".into()));
        }
        if !space.is_unitary(&g)? {
            return Err(Error::Invalid("g is not unitary".into()));
        }
        Ok(UnitaryPair { space, g, u })
    }

    pub fn ctx(&self) -> Ctx {
        self.space.ctx()
    }
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `(g^k u, u)`.
    pub fn moment(&self, k: i64) -> Result<PadicScalar> {
        let base = if k >= 0 { self.g.clone() } else { self.g.inverse()? };
        let mut v = self.u.clone();
        for _ in 0..k.unsigned_abs() {
            v = base.mul_vec(&v)?;
        }
        self.space.form(&v, &self.u)
    }

    pub fn moment_matrix(&self) -> Result<Mat> {
        let n = self.dim();
        let ms: Vec<PadicScalar> = (0..2 * n as i64).map(|k| self.moment(k)).collect::<Result<_>>()?;
        Mat::from_rows((0..n).map(|i| (0..n).map(|j| ms[i + j]).collect()).collect())
    }

    pub fn is_rs(&self) -> Result<bool> {
        Ok(!self.moment_matrix()?.det()?.is_zero())
    }

    pub fn invariants(&self) -> Result<InvariantRecord> {
        Ok(InvariantRecord {
            char_poly: self.g.char_poly()?,
            moments: (0..self.dim() as i64).map(|k| self.moment(k)).collect::<Result<_>>()?,
        })
    }

    /// `h·(g, u) = (h g h^{-1}, h u)` for unitary `h`.
    pub fn act(&self, h: &Mat) -> Result<UnitaryPair> {
        let hi = h.inverse()?;
        UnitaryPair::new(self.space.clone(), h.mul(&self.g)?.mul(&hi)?, h.mul_vec(&self.u)?)
    }
}

pub fn matches(a: &SymTriple, b: &UnitaryPair) -> Result<bool> {
    Ok(a.invariants()? == b.invariants()?)
}

/// `η(det(e, γ' e, …, γ'^{n-1} e))` in the basis of `L` (group-version transfer factor).
pub fn transfer_factor_gp(gamma: &Mat, e: &[PadicScalar], l: &HermitianLattice) -> Result<i32> {
    let d = krylov(gamma, e)?.det()?;
    if d.is_zero() {
        return Err(Error::DegenerateGram);
    }
    Ok(sign_of(d.v() - l.det_valuation()))
}

/// Random `B ∈ M_n(O_F)` with small entries; unimodular when `unimodular` is set.
pub fn random_integral_matrix<R: Rng>(ctx: Ctx, n: usize, rng: &mut R, unimodular: bool) -> Mat {
    loop {
        let rows: Vec<Vector> =
            (0..n).map(|_| (0..n).map(|_| ctx.random_scalar(rng, 0..=1, 0.15, false)).collect()).collect();
        let m = Mat::from_rows(rows).expect("square");
        let Ok(d) = m.det() else { continue };
        if d.is_zero() || (unimodular && d.v() != 0) || d.v() > 2 {
            continue;
        }
        return m;
    }
}

/// Random invertible `h ∈ GL_n(F0)` with small entries and `v(det h)` in `0..=2`.
pub fn random_rational_matrix<R: Rng>(ctx: Ctx, n: usize, rng: &mut R) -> Mat {
    loop {
        let rows: Vec<Vector> =
            (0..n).map(|_| (0..n).map(|_| ctx.random_scalar(rng, -1..=1, 0.2, true)).collect()).collect();
        let m = Mat::from_rows(rows).expect("square");
        let Ok(d) = m.det() else { continue };
        if d.is_zero() || !(0..=2).contains(&d.v()) {
            continue;
        }
        return m;
    }
}

/// `γ = B conj(B)^{-1}`.
pub fn gamma_from(b: &Mat) -> Result<Mat> {
    b.mul(&b.conj().inverse()?)
}

/// Random unitary matrix for `space` via the Cayley transform of a skew-hermitian element.
pub fn random_unitary<R: Rng>(space: &HermitianSpace, rng: &mut R) -> Result<Mat> {
    let ctx = space.ctx();
    let n = space.dim();
    let gi = space.gram().inverse()?;
    loop {
        let mut s = Mat::zeros(ctx, n, n);
        for i in 0..n {
            for j in i..n {
                let x = ctx.random_scalar(rng, 1..=2, 0.3, false);
                if i == j {
                    // skew-hermitian diagonal: purely "imaginary"
                    s[(i, i)] = x.sub(&x.conj())?;
                } else {
                    s[(i, j)] = x;
                    s[(j, i)] = -x.conj();
                }
            }
        }
        let a = s.mul(&gi)?.transpose();
        let id = Mat::identity(ctx, n);
        let Ok(inv) = id.add(&a)?.inverse() else {
            continue;
        };
        let h = id.sub(&a)?.mul(&inv)?;
        if space.is_unitary(&h)? {
            return Ok(h);
        }
    }
}

/// Knobs for the rejection sampler of rs triples.
#[derive(Clone, Debug)]
pub struct SampleOptions {
    pub u_vals: std::ops::RangeInclusive<i32>,
    /// Reject samples whose moment determinant has larger valuation (keeps boxes small).
    pub max_moment_valuation: i32,
    /// Probability that `γ` comes from a non-unimodular `B` (possibly non-integral).
    pub nonintegral_prob: f64,
    pub retries: usize,
}

impl Default for SampleOptions {
    fn default() -> SampleOptions {
        SampleOptions { u_vals: -1..=2, max_moment_valuation: 5, nonintegral_prob: 0.1, retries: 10_000 }
    }
}

/// A seeded rs triple on the standard space of type `t`, with its matching unitary pair.
#[derive(Clone, Debug)]
pub struct MatchingSample {
    pub triple: SymTriple,
    pub pair: UnitaryPair,
    pub lattice: HermitianLattice,
    /// The pair's space has the same splitness as `V` (otherwise it is the nearby space).
    pub in_v: bool,
}

pub fn random_triple<R: Rng>(space: &Arc<HermitianSpace>, opts: &SampleOptions, rng: &mut R) -> Result<SymTriple> {
    let ctx = space.ctx();
    let n = space.dim();
    for _ in 0..opts.retries {
        let unimodular = !rng.gen_bool(opts.nonintegral_prob);
        let b = random_integral_matrix(ctx, n, rng, unimodular);
        let gamma = gamma_from(&b)?;
        let u1: Vector = (0..n).map(|_| ctx.random_scalar(rng, opts.u_vals.clone(), 0.15, true)).collect();
        let u2: Vector = (0..n).map(|_| ctx.random_scalar(rng, opts.u_vals.clone(), 0.15, true)).collect();
        let x = SymTriple::new(space.clone(), gamma, u1, u2)?;
        let d = match x.moment_matrix().and_then(|m| m.det()) {
            Ok(d) => d,
            Err(Error::PrecisionExhausted) => continue,
            Err(e) => return Err(e),
        };
        if d.is_zero() || d.v() > opts.max_moment_valuation {
            continue;
        }
        return Ok(x);
    }
    Err(Error::RetryBudgetExceeded)
}

pub fn random_matching_pair(ctx: Ctx, n: usize, t: usize, seed: u64) -> Result<MatchingSample> {
    random_matching_pair_with(ctx, n, t, seed, &SampleOptions::default())
}

pub fn random_matching_pair_with(
    ctx: Ctx,
    n: usize,
    t: usize,
    seed: u64,
    opts: &SampleOptions,
) -> Result<MatchingSample> {
    let (space, lattice) = standard_space_and_lattice(ctx, n, t, t % 2 == 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let triple = random_triple(&space, opts, &mut rng)?;
    let pair = triple.matching_pair()?;
    let in_v = pair.space.is_split() == space.is_split();
    Ok(MatchingSample { triple, pair, lattice, in_v })
}
