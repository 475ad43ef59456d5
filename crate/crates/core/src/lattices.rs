//! Hermitian spaces and `O_F`-lattices in canonical Hermite normal form.
//!
//! A lattice is stored as the lower-triangular column basis whose diagonal entries are
//! exact powers `p^k` and whose entry `(i, j)`, `j < i`, is the canonical residue modulo
//! the pivot `p^(k_i)`. Equal lattices have identical keys.

use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{vec_add, vec_scale, Mat, Vector};
use crate::padic::{Ctx, PadicScalar};

pub const DEFAULT_BUDGET: usize = 1_000_000;

/// `F^n` with the form `(x, y) = x^T G conj(y)`.
#[derive(Clone, Debug)]
pub struct HermitianSpace {
    gram: Mat,
    eta: i32,
}

impl HermitianSpace {
    pub fn new(gram: Mat) -> Result<Arc<HermitianSpace>> {
        if !gram.is_square() {
            return Err(Error::DimensionMismatch("Gram matrix must be square".into()));
        }
        if gram != gram.adjoint() {
            return Err(Error::Invalid("Gram matrix is not conjugate-symmetric".into()));
        }
        let d = gram.det()?;
        if d.is_zero() {
            return Err(Error::DegenerateGram);
        }
        Ok(Arc::new(HermitianSpace { eta: d.eta()?, gram }))
    }

    pub fn ctx(&self) -> Ctx {
        self.gram.ctx()
    }
    pub fn dim(&self) -> usize {
        self.gram.rows()
    }
    pub fn gram(&self) -> &Mat {
        &self.gram
    }
    /// `eta(det G)`, the Weil constant of the space.
    pub fn eta(&self) -> i32 {
        self.eta
    }
    pub fn is_split(&self) -> bool {
        self.eta == 1
    }

    pub fn form(&self, x: &[PadicScalar], y: &[PadicScalar]) -> Result<PadicScalar> {
        let gy = self.gram.mul_vec(&crate::linalg::vec_conj(y))?;
        crate::linalg::dot(x, &gy)
    }

    /// Whether `g^* G g = G`.
    pub fn is_unitary(&self, g: &Mat) -> Result<bool> {
        Ok(g.transpose().mul(&self.gram)?.mul(&g.conj())? == self.gram)
    }

    /// The same space with the form multiplied by `c`.
    pub fn rescaled(&self, c: PadicScalar) -> Result<Arc<HermitianSpace>> {
        HermitianSpace::new(self.gram.scale(c))
    }
}

/// Canonical lower-triangular column Hermite form of the span of the columns of `gens`.
pub fn hnf(gens: &Mat) -> Result<(Mat, Vec<i32>)> {
    let n = gens.rows();
    let m = gens.cols();
    let ctx = gens.ctx();
    let mut a = gens.clone();
    let mut pivots = Vec::with_capacity(n);
    for r in 0..n {
        let best = (r..m).filter(|&c| !a[(r, c)].is_zero()).min_by_key(|&c| a[(r, c)].v());
        let Some(best) = best else {
            return Err(Error::RankDeficient);
        };
        a.swap_cols(r, best);
        let x = a[(r, r)];
        let k = x.v();
        let uinv = x.shift(-k).inv()?;
        for i in r + 1..n {
            a[(i, r)] = a[(i, r)] * uinv;
        }
        a[(r, r)] = ctx.pi_pow(k);
        for c in r + 1..m {
            let y = a[(r, c)];
            if y.is_zero() {
                continue;
            }
            let f = y.shift(-k);
            for i in r + 1..n {
                let t = f * a[(i, r)];
                if !t.is_zero() {
                    a[(i, c)] = a[(i, c)].sub(&t)?;
                }
            }
            a[(r, c)] = ctx.zero();
        }
        pivots.push(k);
    }
    let mut h = Mat::zeros(ctx, n, n);
    for i in 0..n {
        for j in 0..=i {
            h[(i, j)] = a[(i, j)];
        }
    }
    for i in 1..n {
        for j in 0..i {
            let (q, rem) = h[(i, j)].divrem_pk(pivots[i])?;
            if !q.is_zero() {
                for r in i + 1..n {
                    let t = q * h[(r, i)];
                    if !t.is_zero() {
                        h[(r, j)] = h[(r, j)].sub(&t)?;
                    }
                }
            }
            h[(i, j)] = rem;
        }
    }
    Ok((h, pivots))
}

/// Full-rank `O_F`-lattice in a hermitian space.
#[derive(Clone)]
pub struct HermitianLattice {
    space: Arc<HermitianSpace>,
    basis: Mat,
    pivots: Vec<i32>,
    key: Vec<(i32, u64, u64)>,
}

impl fmt::Debug for HermitianLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice[")?;
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim()).map(|j| self.basis[(i, j)].to_string()).collect();
            write!(f, "{}{}", if i > 0 { "; " } else { "" }, row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl PartialEq for HermitianLattice {
    fn eq(&self, o: &HermitianLattice) -> bool {
        self.key == o.key
    }
}
impl Eq for HermitianLattice {}
impl Hash for HermitianLattice {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.key.hash(h)
    }
}

impl HermitianLattice {
    /// Lattice spanned by the columns of `gens` (at least `n` columns, full rank).
    pub fn new(space: Arc<HermitianSpace>, gens: &Mat) -> Result<HermitianLattice> {
        if gens.rows() != space.dim() {
            return Err(Error::DimensionMismatch("generator length".into()));
        }
        let (basis, pivots) = hnf(gens)?;
        let key = basis.entries().iter().map(|x| x.key()).collect();
        Ok(HermitianLattice { space, basis, pivots, key })
    }

    pub fn from_vectors(space: Arc<HermitianSpace>, vs: &[Vector]) -> Result<HermitianLattice> {
        let n = space.dim();
        let m = Mat::from_cols(space.ctx(), n, vs);
        HermitianLattice::new(space, &m)
    }

    /// `O_F^n` in the coordinates of the space.
    pub fn standard(space: Arc<HermitianSpace>) -> HermitianLattice {
        let id = Mat::identity(space.ctx(), space.dim());
        HermitianLattice::new(space, &id).expect("identity has full rank")
    }

    pub fn space(&self) -> &Arc<HermitianSpace> {
        &self.space
    }
    pub fn ctx(&self) -> Ctx {
        self.space.ctx()
    }
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
    pub fn basis(&self) -> &Mat {
        &self.basis
    }
    pub fn basis_vectors(&self) -> Vec<Vector> {
        self.basis.columns()
    }
    pub fn key(&self) -> &[(i32, u64, u64)] {
        &self.key
    }
    /// `v(det B)`.
    pub fn det_valuation(&self) -> i32 {
        self.pivots.iter().sum()
    }

    /// Same lattice regarded in another space with the same dimension (e.g. a rescaled form).
    pub fn in_space(&self, space: Arc<HermitianSpace>) -> HermitianLattice {
        HermitianLattice { space, ..self.clone() }
    }

    pub fn dual(&self) -> Result<HermitianLattice> {
        let m = self.space.gram.mul(&self.basis.conj())?;
        let d = m.transpose().inverse()?;
        HermitianLattice::new(self.space.clone(), &d)
    }

    /// `[L2 : L1]`-style index `v(det B_self) - v(det B_other)`.
    pub fn relative_index(&self, other: &HermitianLattice) -> i32 {
        self.det_valuation() - other.det_valuation()
    }

    /// Coordinates of `x` in the HNF basis.
    pub fn coordinates(&self, x: &[PadicScalar]) -> Result<Vector> {
        let n = self.dim();
        let ctx = self.ctx();
        let mut c = vec![ctx.zero(); n];
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                let t = self.basis[(i, j)] * c[j];
                if !t.is_zero() {
                    s = s.sub(&t)?;
                }
            }
            c[i] = s.shift(-self.pivots[i]);
        }
        Ok(c)
    }

    /// Canonical representative of `x + L`: coordinates reduced to their polar parts.
    pub fn reduce(&self, x: &[PadicScalar]) -> Result<Vector> {
        let frac = self.coset_key_coords(x)?;
        self.basis.mul_vec(&frac)
    }

    fn coset_key_coords(&self, x: &[PadicScalar]) -> Result<Vector> {
        self.coordinates(x)?.iter().map(|c| Ok(c.divrem_pk(0)?.1)).collect()
    }

    /// Hashable key of the coset `x + L`.
    pub fn coset_key(&self, x: &[PadicScalar]) -> Result<Vec<(i32, u64, u64)>> {
        Ok(self.coset_key_coords(x)?.iter().map(|c| c.key()).collect())
    }

    /// Canonical representatives of `self / sub` for `sub ⊆ self`.
    pub fn coset_reps(&self, sub: &HermitianLattice, budget: usize) -> Result<Vec<Vector>> {
        if !self.contains_lattice(sub)? {
            return Err(Error::Invalid("sublattice is not contained".into()));
        }
        let ctx = self.ctx();
        let mut gens = Vec::new();
        for b in self.basis_vectors() {
            gens.push(sub.reduce(&vec_scale(&b, ctx.sqrt_delta()))?);
            gens.push(sub.reduce(&b)?);
        }
        let zero = vec![ctx.zero(); self.dim()];
        let mut seen = HashSet::new();
        seen.insert(sub.coset_key(&zero)?);
        let mut out = vec![zero];
        let mut i = 0;
        while i < out.len() {
            let x = out[i].clone();
            i += 1;
            for g in &gens {
                let y = sub.reduce(&vec_add(&x, g)?)?;
                if seen.insert(sub.coset_key(&y)?) {
                    if out.len() >= budget {
                        return Err(Error::EnumerationBudgetExceeded(budget));
                    }
                    out.push(y);
                }
            }
        }
        Ok(out)
    }

    pub fn contains(&self, x: &[PadicScalar]) -> Result<bool> {
        let n = self.dim();
        let ctx = self.ctx();
        let mut c = vec![ctx.zero(); n];
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                let t = self.basis[(i, j)] * c[j];
                if !t.is_zero() {
                    s = s.sub(&t)?;
                }
            }
            c[i] = s.shift(-self.pivots[i]);
            if !c[i].is_integral() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn contains_lattice(&self, o: &HermitianLattice) -> Result<bool> {
        for v in o.basis_vectors() {
            if !self.contains(&v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, o: &HermitianLattice) -> Result<HermitianLattice> {
        let mut cols = self.basis_vectors();
        cols.extend(o.basis_vectors());
        HermitianLattice::from_vectors(self.space.clone(), &cols)
    }

    pub fn add_vectors(&self, vs: &[Vector]) -> Result<HermitianLattice> {
        let mut cols = self.basis_vectors();
        cols.extend(vs.iter().cloned());
        HermitianLattice::from_vectors(self.space.clone(), &cols)
    }

    pub fn intersect(&self, o: &HermitianLattice) -> Result<HermitianLattice> {
        self.dual()?.sum(&o.dual()?)?.dual()
    }

    /// `p^k L`.
    pub fn scale(&self, k: i32) -> HermitianLattice {
        let mut l = self.clone();
        l.basis = self.basis.map(|x| x.shift(k));
        l.pivots = self.pivots.iter().map(|p| p + k).collect();
        l.key = l.basis.entries().iter().map(|x| x.key()).collect();
        l
    }

    /// `g L` for an invertible matrix `g`.
    pub fn apply(&self, g: &Mat) -> Result<HermitianLattice> {
        HermitianLattice::new(self.space.clone(), &g.mul(&self.basis)?)
    }

    pub fn is_stable_under(&self, g: &Mat) -> Result<bool> {
        Ok(self.apply(g)? == *self)
    }

    pub fn conj(&self) -> Result<HermitianLattice> {
        HermitianLattice::new(self.space.clone(), &self.basis.conj())
    }

    /// Stable under entrywise conjugation in the designated basis.
    pub fn tau_stable(&self) -> Result<bool> {
        Ok(self.conj()? == *self)
    }

    /// `L ⊆ L^∨`.
    pub fn is_integral(&self) -> Result<bool> {
        Ok(self.gram_in_basis()?.is_integral())
    }

    /// Gram matrix `B^T G conj(B)` of the lattice basis.
    pub fn gram_in_basis(&self) -> Result<Mat> {
        self.basis.transpose().mul(&self.space.gram)?.mul(&self.basis.conj())
    }

    /// `min v((x, y))` over `x, y ∈ L`.
    pub fn norm_valuation(&self) -> Result<i32> {
        Ok(self.gram_in_basis()?.min_valuation())
    }

    /// `t` with `L ⊆ L^∨ ⊆ p^{-1} L` and `t = dim L^∨/L`, if `L` is a vertex lattice.
    pub fn vertex_type(&self) -> Result<Option<usize>> {
        let gm = self.gram_in_basis()?;
        if !gm.is_integral() {
            return Ok(None);
        }
        if !gm.scale(self.ctx().pi_pow(-1)).inverse()?.is_integral() {
            return Ok(None);
        }
        let d = self.dual()?;
        Ok(Some(self.relative_index(&d) as usize))
    }
}

/// Points of `P^{n-1}` over `F_{q^2}` (or `F_q` when `base`), first nonzero coordinate 1.
pub fn projective_points(ctx: Ctx, n: usize, base: bool) -> Vec<Vector> {
    let res = ctx.residues(base);
    let mut out = Vec::new();
    for lead in 0..n {
        let free = n - lead - 1;
        let total = res.len().pow(free as u32);
        for mut idx in 0..total {
            let mut v = vec![ctx.zero(); n];
            v[lead] = ctx.one();
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = res[idx % res.len()];
                idx /= res.len();
            }
            out.push(v);
        }
    }
    out
}

/// How the enumeration walks the lattice poset.
#[derive(Clone, Copy, Debug)]
pub struct EnumConfig {
    /// Only conjugation-stable lattices (steps by `F_q`-rational lines); requires `A` stable.
    pub rational: bool,
    pub budget: usize,
}

impl Default for EnumConfig {
    fn default() -> EnumConfig {
        EnumConfig { rational: false, budget: DEFAULT_BUDGET }
    }
}

/// Every lattice `A ⊆ Λ ⊆ B` satisfying `pred`, each once.
pub fn enumerate_between(
    a: &HermitianLattice,
    b: &HermitianLattice,
    pred: impl FnMut(&HermitianLattice) -> Result<bool>,
    budget: usize,
) -> Result<Vec<HermitianLattice>> {
    let mut pred = pred;
    let all = enumerate_pruned(a, b, EnumConfig { rational: false, budget }, |_| Ok(true))?;
    let mut out = Vec::new();
    for l in all {
        if pred(&l)? {
            out.push(l);
        }
    }
    Ok(out)
}

/// Layered walk upward from `A` by index-one steps inside `B`, visiting only lattices
/// accepted by `keep`. `keep` must be downward closed on the walked poset for the result
/// to be all accepted lattices in the interval.
pub fn enumerate_pruned(
    a: &HermitianLattice,
    b: &HermitianLattice,
    cfg: EnumConfig,
    mut keep: impl FnMut(&HermitianLattice) -> Result<bool>,
) -> Result<Vec<HermitianLattice>> {
    if !b.contains_lattice(a)? {
        return Err(Error::Invalid("lower bound is not contained in the upper bound".into()));
    }
    let ctx = a.ctx();
    let n = a.dim();
    let points = projective_points(ctx, n, cfg.rational);
    let mut seen: HashSet<HermitianLattice> = HashSet::new();
    let mut out = Vec::new();
    if !keep(a)? {
        return Ok(out);
    }
    seen.insert(a.clone());
    let mut layer = vec![a.clone()];
    let mut spent = 0usize;
    while !layer.is_empty() {
        let mut next = Vec::new();
        for l in &layer {
            if *l == *b {
                continue;
            }
            let h = l.basis();
            for c in &points {
                spent += 1;
                if spent > cfg.budget {
                    return Err(Error::EnumerationBudgetExceeded(cfg.budget));
                }
                let x = vec_scale(&h.mul_vec(c)?, ctx.pi_pow(-1));
                if !b.contains(&x)? {
                    continue;
                }
                let nl = l.add_vectors(&[x])?;
                if seen.contains(&nl) {
                    continue;
                }
                seen.insert(nl.clone());
                if keep(&nl)? {
                    next.push(nl);
                }
            }
        }
        out.append(&mut layer);
        layer = next;
    }
    Ok(out)
}

/// Hermitian space with Gram `diag(p,…,p, 1,…,1)` (`t` copies of `p`) and `L = O_F^n`.
pub fn standard_space_and_lattice(
    ctx: Ctx,
    n: usize,
    t: usize,
    split: bool,
) -> Result<(Arc<HermitianSpace>, HermitianLattice)> {
    if t > n || (t % 2 == 0) != split {
        return Err(Error::ParityMismatch(format!("type {t} in dimension {n} with split = {split}")));
    }
    let d: Vec<PadicScalar> = (0..n).map(|i| if i < t { ctx.int(ctx.p() as i64) } else { ctx.one() }).collect();
    let space = HermitianSpace::new(Mat::diag(ctx, &d))?;
    let l = HermitianLattice::standard(space.clone());
    Ok((space, l))
}
