//! Closed-form intersection numbers: rank-one cycle lengths, étale maximal orders, and the
//! Drinfeld plane (Bruhat–Tits tree of the split rank-2 space, multiplicities, pairings).

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::lattices::{enumerate_pruned, standard_space_and_lattice, EnumConfig, HermitianLattice, HermitianSpace};
use crate::linalg::{vec_scale, Mat, Vector};
use crate::orbits::SymTriple;
use crate::padic::{Ctx, PadicScalar};

/// Length of the rank-one cycle: `max{0, (v - t0 + 1)/2}` for `v ≡ t0 + 1 (mod 2)`.
pub fn z_length_rank1(t0: u32, v: i32) -> Result<i64> {
    if t0 > 1 {
        return Err(Error::Invalid(format!("rank-one type must be 0 or 1, got {t0}")));
    }
    if (v - t0 as i32 - 1).rem_euclid(2) != 0 {
        return Err(Error::ParityMismatch(format!("v = {v} with t0 = {t0}")));
    }
    Ok(((v - t0 as i32 + 1) / 2).max(0) as i64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MaxOrderBlock {
    /// Residue degree over `F0` (odd).
    pub f: u32,
    pub split: bool,
    /// `v((u_i, u_i))`.
    pub v: i32,
}

impl MaxOrderBlock {
    fn a(&self) -> i32 {
        if self.split {
            0
        } else {
            1
        }
    }
}

/// Block data of an rs pair `(g, u)` with `O_F[g]` an étale maximal order, for a vertex
/// lattice of type `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxOrderDecomposition {
    pub t: usize,
    pub blocks: Vec<MaxOrderBlock>,
}

impl MaxOrderDecomposition {
    pub fn new(t: usize, blocks: Vec<MaxOrderBlock>) -> Result<MaxOrderDecomposition> {
        if blocks.iter().any(|b| b.f % 2 == 0) {
            return Err(Error::Invalid("residue degrees must be odd".into()));
        }
        let d = MaxOrderDecomposition { t, blocks };
        if d.t > d.n() {
            return Err(Error::Invalid("type exceeds the dimension".into()));
        }
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(|b| b.f as usize).sum()
    }

    /// Blocks `i0` for which the fixed-point component with distinguished block `i0` exists:
    /// `t_i = f_i` exactly for non-split `i ≠ i0` and for `i0` itself when split.
    pub fn admissible(&self) -> Vec<usize> {
        (0..self.blocks.len())
            .filter(|&i0| {
                let total: usize = self
                    .blocks
                    .iter()
                    .enumerate()
                    .filter(|(i, b)| if *i == i0 { b.split } else { !b.split })
                    .map(|(_, b)| b.f as usize)
                    .sum();
                total == self.t
            })
            .collect()
    }

    /// Data after replacing the form by `-ϖ(·,·)` and `L` by `L^∨`.
    pub fn dual_rescale(&self) -> MaxOrderDecomposition {
        MaxOrderDecomposition {
            t: self.n() - self.t,
            blocks: self.blocks.iter().map(|b| MaxOrderBlock { f: b.f, split: !b.split, v: b.v + 1 }).collect(),
        }
    }
}

/// `Σ max{0, (v_i + a_i)/2}` over the admissible blocks `i`; a component only meets `Z(u)`
/// when every other `u_j` is integral (`v_j >= 0`).
pub fn int_z_maxorder(dec: &MaxOrderDecomposition) -> Result<i64> {
    let mut total = 0i64;
    for i in dec.admissible() {
        if dec.blocks.iter().enumerate().any(|(j, b)| j != i && b.v < 0) {
            continue;
        }
        let b = dec.blocks[i];
        if (b.v + b.a()).rem_euclid(2) != 0 {
            return Err(Error::ParityMismatch(format!("block {i}: v = {} with split = {}", b.v, b.split)));
        }
        total += ((b.v + b.a()) / 2).max(0) as i64;
    }
    Ok(total)
}

/// Number of fixed points on the reduced locus in the regime `Σ_{non-split} f_i = t - 1`.
pub fn fixed_point_count_maxorder(dec: &MaxOrderDecomposition, t: usize) -> Result<usize> {
    let ns: usize = dec.blocks.iter().filter(|b| !b.split).map(|b| b.f as usize).sum();
    if ns + 1 != t {
        return Err(Error::RegimeMismatch(format!("non-split degree {ns} with type {t}")));
    }
    Ok(dec.blocks.iter().filter(|b| b.split && b.f == 1).count())
}

/// A block-diagonal rs triple `(diag(ξ_i), b, c)` on the standard type-`t` space together with
/// the block data of its matching pair in the nearby space.
#[derive(Clone, Debug)]
pub struct MaxOrderSample {
    pub triple: SymTriple,
    pub lattice: HermitianLattice,
    pub dec: MaxOrderDecomposition,
    /// `v(b_i c_i)`.
    pub w_vals: Vec<i32>,
}

/// `ξ_i` norm-one with distinct residues, `v(b_i c_i) = w_i` with `Σ w_i ≡ t + 1`, optionally
/// conjugated by `h ∈ GL_n(O_{F0})`.
pub fn random_maxorder_sample<R: rand::Rng + ?Sized>(
    ctx: Ctx,
    n: usize,
    t: usize,
    w_range: std::ops::RangeInclusive<i32>,
    conjugate: bool,
    rng: &mut R,
) -> Result<MaxOrderSample> {
    let (space, lattice) = standard_space_and_lattice(ctx, n, t, t % 2 == 0)?;
    if n > ctx.q() as usize + 1 {
        return Err(Error::RegimeMismatch("not enough norm-one residues".into()));
    }
    let mut xis: Vec<PadicScalar> = Vec::new();
    while xis.len() < n {
        let x = ctx.norm_one_sample(rng);
        if xis.iter().all(|y| x.sub(y).map(|d| !d.is_zero() && d.is_unit()).unwrap_or(false)) {
            xis.push(x);
        }
    }
    let mut w_vals: Vec<i32> = (0..n).map(|_| rng.gen_range(w_range.clone())).collect();
    let total: i32 = w_vals.iter().sum();
    if (total - t as i32 - 1).rem_euclid(2) != 0 {
        let i = rng.gen_range(0..n);
        w_vals[i] += if w_vals[i] < *w_range.end() { 1 } else { -1 };
    }
    let mut b = Vec::with_capacity(n);
    let mut c = Vec::with_capacity(n);
    for &w in &w_vals {
        let vb = rng.gen_range(-1..=2.min(w.max(-1)));
        b.push(ctx.random_scalar(rng, vb..=vb, 0.0, true));
        c.push(ctx.random_scalar(rng, (w - vb)..=(w - vb), 0.0, true));
    }
    let mut triple = SymTriple::new(space, Mat::diag(ctx, &xis), b, c)?;
    if conjugate {
        loop {
            let rows = (0..n).map(|_| (0..n).map(|_| ctx.random_scalar(rng, 0..=1, 0.3, true)).collect()).collect();
            let h = Mat::from_rows(rows)?;
            if h.det()?.is_unit() {
                triple = triple.act(&h)?;
                break;
            }
        }
    }
    let blocks = w_vals.iter().map(|&v| MaxOrderBlock { f: 1, split: v.rem_euclid(2) == 0, v }).collect();
    Ok(MaxOrderSample { triple, lattice, dec: MaxOrderDecomposition::new(t, blocks)?, w_vals })
}

/// Vertex of the Bruhat–Tits tree of the split rank-2 space: a vertex lattice of type 0 or 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BTVertex {
    pub lattice: HermitianLattice,
    pub vtype: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycleKind {
    Z,
    Y,
}

/// Partially expanded breadth-first search from one source vertex.
#[derive(Debug, Default)]
struct Bfs {
    dist: HashMap<BTVertex, usize>,
    queue: VecDeque<BTVertex>,
}

#[derive(Debug, Default)]
struct TreeMemo {
    searches: HashMap<BTVertex, Bfs>,
    central: HashMap<Vec<(i32, u64, u64)>, BTVertex>,
}

/// The split hermitian plane with Gram `I` and its tree. Distances and central lattices are
/// memoized; clones share the memo.
#[derive(Clone, Debug)]
pub struct DrinfeldPlane {
    pub space: Arc<HermitianSpace>,
    pub budget: usize,
    memo: Arc<Mutex<TreeMemo>>,
}

impl DrinfeldPlane {
    pub fn new(ctx: Ctx) -> Result<DrinfeldPlane> {
        Ok(DrinfeldPlane { space: HermitianSpace::new(Mat::identity(ctx, 2))?, budget: 100_000, memo: Arc::default() })
    }

    pub fn ctx(&self) -> Ctx {
        self.space.ctx()
    }

    pub fn q(&self) -> i64 {
        self.ctx().q()
    }

    pub fn vertex(&self, l: HermitianLattice) -> Result<BTVertex> {
        match l.vertex_type()? {
            Some(t) if t == 0 || t == 2 => Ok(BTVertex { lattice: l, vtype: t }),
            _ => Err(Error::Invalid("not a vertex lattice of the plane".into())),
        }
    }

    pub fn standard_vertex(&self) -> BTVertex {
        BTVertex { lattice: HermitianLattice::standard(self.space.clone()), vtype: 0 }
    }

    /// Type-0 `L` ↦ type-2 `Λ` with `Λ ⊆ L ⊆ Λ^∨`; type-2 `Λ` ↦ type-0 `L` with the same.
    pub fn neighbors(&self, v: &BTVertex) -> Result<Vec<BTVertex>> {
        let l = &v.lattice;
        let (lo, hi, want) = if v.vtype == 0 { (l.scale(1), l.clone(), 2) } else { (l.clone(), l.scale(-1), 0) };
        let cfg = EnumConfig { rational: false, budget: self.budget };
        let mids = enumerate_pruned(&lo, &hi, cfg, |m| Ok(lo.relative_index(m) <= 1))?;
        let mut out = Vec::new();
        for m in mids {
            if lo.relative_index(&m) == 1 && m.vertex_type()? == Some(want) {
                out.push(BTVertex { lattice: m, vtype: want });
            }
        }
        Ok(out)
    }

    /// Vertices at distance at most `r` from `center`, with distances, in BFS order.
    pub fn ball(&self, center: &BTVertex, r: usize) -> Result<Vec<(BTVertex, usize)>> {
        let mut seen: HashSet<BTVertex> = HashSet::new();
        let mut out = vec![(center.clone(), 0)];
        seen.insert(center.clone());
        let mut i = 0;
        while i < out.len() {
            let (v, d) = out[i].clone();
            i += 1;
            if d == r {
                continue;
            }
            for w in self.neighbors(&v)? {
                if seen.insert(w.clone()) {
                    if seen.len() > self.budget {
                        return Err(Error::EnumerationBudgetExceeded(self.budget));
                    }
                    out.push((w, d + 1));
                }
            }
        }
        Ok(out)
    }

    /// Graph distance by breadth-first search from `a`; the search from each source is resumed
    /// rather than restarted on later queries.
    pub fn tree_distance(&self, a: &BTVertex, b: &BTVertex) -> Result<usize> {
        let mut memo = self.memo.lock().expect("tree memo poisoned");
        let bfs = memo.searches.entry(a.clone()).or_insert_with(|| {
            let mut s = Bfs::default();
            s.dist.insert(a.clone(), 0);
            s.queue.push_back(a.clone());
            s
        });
        loop {
            if let Some(&d) = bfs.dist.get(b) {
                return Ok(d);
            }
            let Some(v) = bfs.queue.pop_front() else {
                return Err(Error::SearchExhausted("tree search ended without reaching the target".into()));
            };
            let d = bfs.dist[&v];
            for w in self.neighbors(&v)? {
                if !bfs.dist.contains_key(&w) {
                    if bfs.dist.len() >= self.budget {
                        return Err(Error::EnumerationBudgetExceeded(self.budget));
                    }
                    bfs.dist.insert(w.clone(), d + 1);
                    bfs.queue.push_back(w);
                }
            }
        }
    }

    /// `v((u, u))`; isotropic vectors are rejected.
    pub fn norm_valuation(&self, u: &[PadicScalar]) -> Result<i32> {
        let n = self.space.form(u, u)?;
        if n.is_zero() {
            return Err(Error::Invalid("isotropic vector".into()));
        }
        Ok(n.v())
    }

    /// A random vector with `v((u, u)) = m`: sample until the parity matches, then rescale.
    pub fn vector_with_norm_valuation<R: rand::Rng + ?Sized>(&self, m: i32, rng: &mut R) -> Result<Vector> {
        let c = self.ctx();
        for _ in 0..10_000 {
            let u = vec![c.random_scalar(rng, 0..=1, 0.0, false), c.random_unit(rng, 3, false)];
            let Ok(m0) = self.norm_valuation(&u) else {
                continue;
            };
            if (m - m0).rem_euclid(2) == 0 {
                return Ok(vec_scale(&u, c.pi_pow((m - m0) / 2)));
            }
        }
        Err(Error::SearchExhausted(format!("no vector with norm valuation {m}")))
    }

    /// `u1 = ϖ^{-⌊(m+1)/2⌋} u`.
    pub fn normalized(&self, u: &[PadicScalar]) -> Result<Vector> {
        let m = self.norm_valuation(u)?;
        Ok(vec_scale(u, self.ctx().pi_pow(-(m + 1).div_euclid(2))))
    }

    /// `u1 ∈ L^∨ ∖ ϖL^∨` spanning a non-isotropic line of `L^∨/ϖL^∨`.
    fn is_central(&self, v: &BTVertex, u1: &[PadicScalar]) -> Result<bool> {
        let d = v.lattice.dual()?;
        // the reduced form on L^∨/ϖL^∨ is (·,·) for type 0 and ϖ(·,·) for type 2
        let anisotropic = self.norm_valuation(u1)? == -(v.vtype as i32 / 2);
        Ok(anisotropic && d.contains(u1)? && !d.scale(1).contains(u1)?)
    }

    fn vec_key(u: &[PadicScalar]) -> Vec<(i32, u64, u64)> {
        u.iter().map(|x| x.key()).collect()
    }

    /// The unique vertex lattice `L_u` with `u1` central in `L_u^∨`.
    pub fn central_lattice(&self, u: &[PadicScalar]) -> Result<BTVertex> {
        let m = self.norm_valuation(u)?;
        let u1 = self.normalized(u)?;
        if let Some(v) = self.memo.lock().expect("tree memo poisoned").central.get(&Self::vec_key(&u1)) {
            return Ok(v.clone());
        }
        // w ⊥ u1 with (w, w) = (u1, u1) for the identity Gram
        let w = vec![u1[1].conj(), -u1[0].conj()];
        let span = HermitianLattice::from_vectors(self.space.clone(), &[u1.clone(), w])?;
        let cand = if m.rem_euclid(2) == 0 { span } else { span.scale(1) };
        let v = self.vertex(cand).map_err(|_| Error::SearchExhausted("constructed lattice is not a vertex".into()))?;
        if !self.is_central(&v, &u1)? {
            return Err(Error::SearchExhausted("constructed lattice is not central".into()));
        }
        for (w, d) in self.ball(&v, 2)? {
            if d > 0 && self.is_central(&w, &u1)? {
                return Err(Error::NonUnique("a second central lattice nearby".into()));
            }
        }
        self.memo.lock().expect("tree memo poisoned").central.insert(Self::vec_key(&u1), v.clone());
        Ok(v)
    }

    /// `max{r ≥ 0 : ϖ^{-r} u ∈ L^∨}` for `u ∈ L`, and `0` otherwise. Testing against `L` itself
    /// undercounts by one on type-2 vertices of the wrong parity; `L^∨` matches the distance
    /// formula and the intersection pairings.
    pub fn z_multiplicity_membership(&self, u: &[PadicScalar], l: &BTVertex) -> Result<i64> {
        if !l.lattice.contains(u)? {
            return Ok(0);
        }
        let d = l.lattice.dual()?;
        let mut r = 0;
        while d.contains(&vec_scale(u, self.ctx().pi_pow(-(r + 1))))? {
            r += 1;
        }
        Ok(r as i64)
    }

    fn distance_formula(m: i32, d: i32, extra: i32) -> i64 {
        if (m - d).rem_euclid(2) == 0 {
            ((m + extra - d) / 2) as i64
        } else {
            ((m + 1 - d) / 2) as i64
        }
    }

    /// `m(u, L)` by membership, checked against the distance formula.
    pub fn z_multiplicity(&self, u: &[PadicScalar], l: &BTVertex) -> Result<i64> {
        let by_def = self.z_multiplicity_membership(u, l)?;
        let m = self.norm_valuation(u)?;
        if !l.lattice.contains(u)? || m < 0 {
            return Ok(by_def);
        }
        let d = self.tree_distance(&self.central_lattice(u)?, l)? as i32;
        let by_formula = Self::distance_formula(m, d, 0);
        if by_formula != by_def {
            return Err(Error::Invalid(format!(
                "multiplicity mismatch: membership {by_def}, distance formula {by_formula}"
            )));
        }
        Ok(by_def)
    }

    /// `m^∨(u, L)` for `u ∈ L`, zero otherwise.
    pub fn y_multiplicity(&self, u: &[PadicScalar], l: &BTVertex) -> Result<i64> {
        if !l.lattice.contains(u)? {
            return Ok(0);
        }
        let m = self.norm_valuation(u)?;
        let d = self.tree_distance(&self.central_lattice(u)?, l)? as i32;
        Ok(Self::distance_formula(m, d, 2))
    }

    /// `(C(u), P_L)` expanded through the intersection matrix of the lines:
    /// `(P_L, P_L) = -(q + 1)`, adjacent lines meet once, and the horizontal part meets `P_{L_u}`.
    pub fn pairing_from_multiplicities(&self, kind: CycleKind, u: &[PadicScalar], l: &BTVertex) -> Result<i64> {
        let mult = |v: &BTVertex| match kind {
            CycleKind::Z => self.z_multiplicity(u, v),
            CycleKind::Y => self.y_multiplicity(u, v),
        };
        let mut total = -(self.q() + 1) * mult(l)?;
        for nb in self.neighbors(l)? {
            total += mult(&nb)?;
        }
        if self.central_lattice(u)? == *l {
            total += 1;
        }
        Ok(total)
    }

    /// `(Z(u), P_L)` and `(Y(u), P_L)` from the table.
    pub fn pairing_with_line(&self, kind: CycleKind, u: &[PadicScalar], l: &BTVertex) -> Result<i64> {
        let q = self.q();
        let in_l = l.lattice.contains(u)? as i64;
        Ok(match (kind, l.vtype) {
            (CycleKind::Z, 0) => in_l,
            (CycleKind::Y, 0) => -q * in_l,
            (CycleKind::Z, _) => -q * in_l,
            (CycleKind::Y, _) => l.lattice.dual()?.contains(u)? as i64,
        })
    }
}

/// Integer combination of projective lines `P_L`.
#[derive(Clone, Debug, Default)]
pub struct LineSum {
    pub terms: Vec<(i64, BTVertex)>,
}

impl LineSum {
    pub fn line(v: BTVertex) -> LineSum {
        LineSum { terms: vec![(1, v)] }
    }

    pub fn plus(mut self, c: i64, v: BTVertex) -> LineSum {
        self.terms.push((c, v));
        self
    }
}

/// `u ↦ (Z(u), C)` or `(Y(u), C)` as an integer combination of lattice indicators.
pub fn f_l_function(c: &LineSum, kind: CycleKind, q: i64) -> Result<Vec<(i64, HermitianLattice)>> {
    let mut out = Vec::new();
    for (coef, v) in &c.terms {
        match (kind, v.vtype) {
            (CycleKind::Z, 0) => out.push((*coef, v.lattice.clone())),
            (CycleKind::Y, 0) => out.push((-q * coef, v.lattice.clone())),
            (CycleKind::Z, _) => out.push((-q * coef, v.lattice.clone())),
            (CycleKind::Y, _) => out.push((*coef, v.lattice.dual()?)),
        }
    }
    Ok(out)
}

/// `(V, L) ↦ (V with form -ϖ(·,·), L^∨)`; the image is a vertex lattice of type `n - t`.
pub fn dual_rescale(
    space: &Arc<HermitianSpace>,
    l: &HermitianLattice,
) -> Result<(Arc<HermitianSpace>, HermitianLattice)> {
    let ctx = space.ctx();
    let s = space.rescaled(-ctx.pi_pow(1))?;
    let image = l.dual()?.in_space(s.clone());
    Ok((s, image))
}

/// Graphviz rendering of a ball, labelled by type and distance.
pub fn ball_dot(ball: &[(BTVertex, usize)], plane: &DrinfeldPlane) -> Result<String> {
    let idx: HashMap<&BTVertex, usize> = ball.iter().enumerate().map(|(i, (v, _))| (v, i)).collect();
    let mut s = String::from("graph tree {\n");
    for (i, (v, d)) in ball.iter().enumerate() {
        s.push_str(&format!("  v{i} [label=\"t{} d{}\"];\n", v.vtype, d));
    }
    for (i, (v, _)) in ball.iter().enumerate() {
        for w in plane.neighbors(v)? {
            if let Some(&j) = idx.get(&w) {
                if i < j {
                    s.push_str(&format!("  v{i} -- v{j};\n"));
                }
            }
        }
    }
    s.push_str("}\n");
    Ok(s)
}
