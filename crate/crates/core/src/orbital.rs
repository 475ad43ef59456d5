//! Orbital integrals as signed Laurent polynomials in `X = q^{-s}`, computed by counting
//! stable lattices inside explicit bounding boxes.
//!
//! Symmetric side: a `GL(V0)`-orbit of a test function indexed by `(L, L^∨)` is the set of
//! conjugation-stable pairs `L1 ⊆ L2 ⊆ ϖ^{-1} L1` with `[L2 : L1] = t`. Unitary side: the
//! `U(V)`-orbit of a type-`t` vertex lattice is the set of all type-`t` vertex lattices.

use std::collections::BTreeMap;
use std::fmt;

use crate::cayley::{cayley_symmetric, cayley_unitary_twisted, find_twist, is_integral_element, BlockDecomposition};
use crate::error::{Error, Result};
use crate::lattices::{enumerate_pruned, EnumConfig, HermitianLattice, DEFAULT_BUDGET};
use crate::linalg::{dot, vec_scale, Mat};
use crate::orbits::{krylov, sign_of, SymTriple, UnitaryPair};
use crate::padic::{LogMultiple, PadicScalar};

/// `ω · Σ_a c_a (-1)^? X^a`: the map holds the raw counts `c_a`, already carrying the
/// `η(det h)` signs, and `omega` is the transfer factor.
#[derive(Clone, Debug)]
pub struct OrbLaurent {
    pub coeffs: BTreeMap<i32, i64>,
    pub omega: i32,
    pub q: i64,
}

impl OrbLaurent {
    pub fn zero(omega: i32, q: i64) -> OrbLaurent {
        OrbLaurent { coeffs: BTreeMap::new(), omega, q }
    }

    fn bump(&mut self, a: i32, by: i64) {
        let e = self.coeffs.entry(a).or_insert(0);
        *e += by;
        if *e == 0 {
            self.coeffs.remove(&a);
        }
    }

    pub fn value0(&self) -> i64 {
        self.omega as i64 * self.coeffs.values().sum::<i64>()
    }

    /// Coefficient of `log q` in the derivative at `s = 0`.
    pub fn derivative0(&self) -> LogMultiple {
        let s: i64 = self.coeffs.iter().map(|(a, c)| *a as i64 * c).sum();
        LogMultiple::from_int(-(self.omega as i64) * s)
    }

    /// `ω c_a` with zero entries dropped; the function of `s` this represents.
    pub fn signed(&self) -> BTreeMap<i32, i64> {
        self.coeffs.iter().map(|(a, c)| (*a, self.omega as i64 * c)).filter(|(_, c)| *c != 0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Multiply by `(-1)^k X^k`.
    pub fn shifted(&self, k: i32) -> OrbLaurent {
        let sign = sign_of(k) as i64;
        OrbLaurent {
            coeffs: self.coeffs.iter().map(|(a, c)| (a + k, sign * c)).collect(),
            omega: self.omega,
            q: self.q,
        }
    }
}

impl PartialEq for OrbLaurent {
    fn eq(&self, o: &OrbLaurent) -> bool {
        self.signed() == o.signed()
    }
}

impl fmt::Display for OrbLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.signed().iter().map(|(a, c)| format!("{c}·X^{a}")).collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Which member of the pair `(L1, L2)` a constraint refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    L1,
    L2,
}

/// `1_{S(L1, L2)} × 1_{∩ ϖ^k L_slot} × 1_{(Σ ϖ^k L_slot)^*}` on the orbit of `(L, L2)`,
/// `[L2 : L] = t`, `L ⊆ L2 ⊆ ϖ^{-1} L`.
#[derive(Clone, Debug)]
pub struct SymmetricTestFunction {
    pub base: HermitianLattice,
    pub t: usize,
    /// `u1 ∈ ϖ^k L_slot` for every entry.
    pub u1_in: Vec<(Slot, i32)>,
    /// `u2 (ϖ^k L_slot) ⊆ O` for every entry.
    pub u2_dual: Vec<(Slot, i32)>,
    /// Lattice whose basis trivializes the transfer factor.
    pub omega_lattice: HermitianLattice,
}

impl SymmetricTestFunction {
    fn vertex_type(l: &HermitianLattice) -> Result<usize> {
        l.vertex_type()?.ok_or_else(|| Error::Invalid("reference lattice is not a vertex lattice".into()))
    }

    /// `1_{S(L, L^∨)} × 1_{L_0} × 1_{(L_0^∨)^*}` with `ω_L`.
    pub fn std(l: &HermitianLattice) -> Result<SymmetricTestFunction> {
        Ok(SymmetricTestFunction {
            base: l.clone(),
            t: Self::vertex_type(l)?,
            u1_in: vec![(Slot::L1, 0)],
            u2_dual: vec![(Slot::L2, 0)],
            omega_lattice: l.clone(),
        })
    }

    /// `1_{S(L, L^∨)} × 1_{L_0^∨} × 1_{(L_0)^*}` with `ω_L`.
    pub fn std_dual(l: &HermitianLattice) -> Result<SymmetricTestFunction> {
        Ok(SymmetricTestFunction {
            base: l.clone(),
            t: Self::vertex_type(l)?,
            u1_in: vec![(Slot::L2, 0)],
            u2_dual: vec![(Slot::L1, 0)],
            omega_lattice: l.clone(),
        })
    }

    pub fn with_omega(mut self, l: &HermitianLattice) -> SymmetricTestFunction {
        self.omega_lattice = l.clone();
        self
    }
}

/// `1_{U(L)} × 1_{ϖ^a Λ ∩ ϖ^b Λ^∨}` on type-`t` vertex lattices `Λ`.
#[derive(Clone, Debug)]
pub struct UnitaryTestFunction {
    pub t: usize,
    pub u_in: Option<i32>,
    pub u_in_dual: Option<i32>,
}

impl UnitaryTestFunction {
    /// `1_{U(L)} × 1_L`.
    pub fn std(t: usize) -> UnitaryTestFunction {
        UnitaryTestFunction { t, u_in: Some(0), u_in_dual: None }
    }

    /// `1_{U(L)} × 1_{L^∨}`.
    pub fn std_dual(t: usize) -> UnitaryTestFunction {
        UnitaryTestFunction { t, u_in: None, u_in_dual: Some(0) }
    }
}

#[derive(Clone, Debug)]
pub enum TestFunctionDescriptor {
    Symmetric(SymmetricTestFunction),
    Unitary(UnitaryTestFunction),
}

fn u2_annihilates(u2: &[PadicScalar], l: &HermitianLattice, k: i32) -> Result<bool> {
    for b in l.basis_vectors() {
        if dot(u2, &b)?.v().saturating_add(k) < 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn u_in(l: &HermitianLattice, u: &[PadicScalar], k: i32) -> Result<bool> {
    l.contains(&vec_scale(u, u[0].ctx().pi_pow(-k)))
}

fn sum_all(ls: Vec<HermitianLattice>) -> Result<HermitianLattice> {
    let mut it = ls.into_iter();
    let mut acc = it.next().ok_or_else(|| Error::Invalid("empty constraint list".into()))?;
    for l in it {
        acc = acc.sum(&l)?;
    }
    Ok(acc)
}

fn intersect_all(ls: Vec<HermitianLattice>) -> Result<HermitianLattice> {
    let mut it = ls.into_iter();
    let mut acc = it.next().ok_or_else(|| Error::Invalid("empty constraint list".into()))?;
    for l in it {
        acc = acc.intersect(&l)?;
    }
    Ok(acc)
}

/// `L_{γ,u1} = Σ O γ^i u1` and `M_{γ,u2} = {x : u2 γ^i x ∈ O}`.
pub fn symmetric_box(x: &SymTriple) -> Result<(HermitianLattice, HermitianLattice)> {
    let k = krylov(&x.gamma, &x.u1)?;
    if k.det()?.is_zero() {
        return Err(Error::NotRegularSemisimple);
    }
    let a = HermitianLattice::new(x.space.clone(), &k)?;
    let n = x.dim();
    let mut rows = vec![x.u2.clone()];
    let gt = x.gamma.transpose();
    for i in 1..n {
        rows.push(gt.mul_vec(&rows[i - 1])?);
    }
    let r = Mat::from_rows(rows)?;
    if r.det()?.is_zero() {
        return Err(Error::NotRegularSemisimple);
    }
    let m = HermitianLattice::new(x.space.clone(), &r.inverse()?)?;
    Ok((a, m))
}

/// Whether a pair `(L1, L2)` satisfies the vector constraints of `f`.
pub fn symmetric_indicators(
    x: &SymTriple,
    f: &SymmetricTestFunction,
    l1: &HermitianLattice,
    l2: &HermitianLattice,
) -> Result<bool> {
    let pick = |s: Slot| if s == Slot::L1 { l1 } else { l2 };
    for &(s, k) in &f.u1_in {
        if !u_in(pick(s), &x.u1, k)? {
            return Ok(false);
        }
    }
    for &(s, k) in &f.u2_dual {
        if !u2_annihilates(&x.u2, pick(s), k)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Symmetric-side orbital integral.
pub fn orb_symmetric(x: &SymTriple, f: &SymmetricTestFunction, budget: usize) -> Result<OrbLaurent> {
    if f.u1_in.is_empty() || f.u2_dual.is_empty() {
        return Err(Error::Invalid("test function needs constraints on both vectors".into()));
    }
    let q = x.ctx().q();
    let omega = x.transfer_factor(&f.omega_lattice)?;
    let (a, m) = symmetric_box(x)?;
    let mut out = OrbLaurent::zero(omega, q);
    if !is_integral_element(&x.gamma)? {
        return Ok(out);
    }
    let lower1 =
        sum_all(f.u1_in.iter().map(|&(s, k)| if s == Slot::L1 { a.scale(-k) } else { a.scale(1 - k) }).collect())?;
    let upper1 = intersect_all(f.u2_dual.iter().map(|&(_, k)| m.scale(-k)).collect())?;
    let lower1 = lower1.sum(&lower1.conj()?)?;
    let upper1 = upper1.intersect(&upper1.conj()?)?;
    if !upper1.contains_lattice(&lower1)? {
        return Ok(out);
    }
    let upper2 = intersect_all(
        f.u2_dual.iter().map(|&(s, k)| if s == Slot::L2 { m.scale(-k) } else { m.scale(-1 - k) }).collect(),
    )?;
    let upper2 = upper2.intersect(&upper2.conj()?)?;
    let extra2: Vec<HermitianLattice> =
        f.u1_in.iter().filter(|(s, _)| *s == Slot::L2).map(|&(_, k)| a.scale(-k)).collect();
    let cfg = EnumConfig { rational: true, budget };
    let t = f.t as i32;
    for l1 in enumerate_pruned(&lower1, &upper1, cfg, |_| Ok(true))? {
        if !l1.is_stable_under(&x.gamma)? {
            continue;
        }
        let mut lo2 = l1.clone();
        for e in &extra2 {
            lo2 = lo2.sum(e)?;
        }
        let hi2 = l1.scale(-1).intersect(&upper2)?;
        if !hi2.contains_lattice(&lo2)? || l1.relative_index(&lo2) > t {
            continue;
        }
        let l2s = enumerate_pruned(&lo2, &hi2, cfg, |l| Ok(l1.relative_index(l) <= t))?;
        for l2 in l2s {
            if l1.relative_index(&l2) != t || !l2.is_stable_under(&x.gamma)? {
                continue;
            }
            if symmetric_indicators(x, f, &l1, &l2)? {
                let e = l1.relative_index(&f.base);
                out.bump(e, sign_of(e) as i64);
            }
        }
    }
    Ok(out)
}

/// `∂Orb` at `s = 0`.
pub fn dorb(x: &SymTriple, f: &SymmetricTestFunction, budget: usize) -> Result<LogMultiple> {
    Ok(orb_symmetric(x, f, budget)?.derivative0())
}

/// Lower and upper bounds for the lattices counted by `orb_unitary`.
pub fn unitary_box(y: &UnitaryPair, f: &UnitaryTestFunction) -> Result<(HermitianLattice, HermitianLattice)> {
    let k = krylov(&y.g, &y.u)?;
    if k.det()?.is_zero() {
        return Err(Error::NotRegularSemisimple);
    }
    let a = HermitianLattice::new(y.space.clone(), &k)?;
    let mut lows = Vec::new();
    let mut highs = Vec::new();
    if let Some(s) = f.u_in {
        lows.push(a.scale(-s));
    }
    if let Some(b) = f.u_in_dual {
        lows.push(a.scale(1 - b));
        highs.push(a.dual()?.scale(b));
    }
    let lower = sum_all(lows)?;
    highs.push(lower.dual()?);
    Ok((lower, intersect_all(highs)?))
}

pub fn unitary_indicators(y: &UnitaryPair, f: &UnitaryTestFunction, l: &HermitianLattice) -> Result<bool> {
    if let Some(s) = f.u_in {
        if !u_in(l, &y.u, s)? {
            return Ok(false);
        }
    }
    if let Some(b) = f.u_in_dual {
        if !u_in(&l.dual()?, &y.u, b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Unitary-side orbital integral: number of `g`-stable type-`t` vertex lattices meeting the
/// vector constraint.
pub fn orb_unitary(y: &UnitaryPair, f: &UnitaryTestFunction, budget: usize) -> Result<i64> {
    if f.u_in.is_none() && f.u_in_dual.is_none() {
        return Err(Error::Invalid("test function needs a vector constraint".into()));
    }
    let (lower, upper) = unitary_box(y, f)?;
    if !is_integral_element(&y.g)? || !upper.contains_lattice(&lower)? {
        return Ok(0);
    }
    let cfg = EnumConfig { rational: false, budget };
    let mut count = 0;
    for l in enumerate_pruned(&lower, &upper, cfg, |l| l.is_integral())? {
        if l.vertex_type()? == Some(f.t) && l.is_stable_under(&y.g)? && unitary_indicators(y, f, &l)? {
            count += 1;
        }
    }
    Ok(count)
}

/// Dispatch on the side of the descriptor: the unitary count is returned as a constant
/// polynomial with `ω = 1`.
pub fn orb(
    x: Option<&SymTriple>,
    y: Option<&UnitaryPair>,
    f: &TestFunctionDescriptor,
    budget: usize,
) -> Result<OrbLaurent> {
    match (f, x, y) {
        (TestFunctionDescriptor::Symmetric(f), Some(x), _) => orb_symmetric(x, f, budget),
        (TestFunctionDescriptor::Unitary(f), _, Some(y)) => {
            let c = orb_unitary(y, f, budget)?;
            let mut out = OrbLaurent::zero(1, y.ctx().q());
            if c != 0 {
                out.coeffs.insert(0, c);
            }
            Ok(out)
        }
        _ => Err(Error::Invalid("descriptor side does not match the element".into())),
    }
}

/// `L = L♭ ⊕ O ϖ^λ e` for the decomposition's `e`; returns `(L♭, λ)`.
pub fn split_lattice(l: &HermitianLattice, dec: &BlockDecomposition) -> Result<(HermitianLattice, i32)> {
    let n = dec.dim();
    let b = l.basis();
    for j in 0..n - 1 {
        if !b[(n - 1, j)].is_zero() {
            return Err(Error::Invalid("lattice does not split along e".into()));
        }
    }
    let rows = (0..n - 1).map(|i| (0..n - 1).map(|j| b[(i, j)]).collect()).collect();
    let flat = HermitianLattice::new(dec.flat.clone(), &Mat::from_rows(rows)?)?;
    Ok((flat, b[(n - 1, n - 1)].v()))
}

/// Reduced semi-Lie test function for the group integral attached to `(L, L^∨)` and `e`.
pub fn reduced_symmetric_test_function(
    l: &HermitianLattice,
    dec: &BlockDecomposition,
) -> Result<SymmetricTestFunction> {
    if l.vertex_type()?.is_none() {
        return Err(Error::Invalid("reference lattice is not a vertex lattice".into()));
    }
    let (flat, lam) = split_lattice(l, dec)?;
    let (flat_dual, lam_dual) = split_lattice(&l.dual()?, dec)?;
    let t = flat.relative_index(&flat_dual);
    if t < 0 {
        return Err(Error::Invalid("flat parts are not nested".into()));
    }
    let cons = vec![(Slot::L1, -lam), (Slot::L2, -lam_dual)];
    Ok(SymmetricTestFunction {
        base: flat.clone(),
        t: t as usize,
        u1_in: cons.clone(),
        u2_dual: cons,
        omega_lattice: flat,
    })
}

/// Group-version symmetric orbital integral of `γ' ∈ S(V0)` for the chain `(L, L^∨)`,
/// through the `ξ`-twisted Cayley reduction.
pub fn orb_group_symmetric(
    gp: &Mat,
    dec: &BlockDecomposition,
    l: &HermitianLattice,
    budget: usize,
) -> Result<OrbLaurent> {
    let f = reduced_symmetric_test_function(l, dec)?;
    let ctx = gp.ctx();
    if !is_integral_element(gp)? {
        let (flat, _) = split_lattice(l, dec)?;
        let mut e = vec![ctx.zero(); dec.dim()];
        e[dec.dim() - 1] = ctx.one();
        let d = krylov(gp, &e)?.det()?;
        if d.is_zero() {
            return Err(Error::NotRegularSemisimple);
        }
        return Ok(OrbLaurent::zero(sign_of(d.v() - flat.det_valuation()), ctx.q()));
    }
    let xi = find_twist(dec.blocks(gp).3)?;
    let img = cayley_symmetric(&gp.scale(xi), dec, None)?;
    if !is_integral_element(&img.raw.x)? {
        let triple = SymTriple::new(dec.flat.clone(), img.raw.x.clone(), img.raw.b1.clone(), img.raw.c1.clone());
        let omega = match triple {
            Ok(t) => t.transfer_factor(&f.omega_lattice)?,
            Err(_) => 1,
        };
        return Ok(OrbLaurent::zero(omega, ctx.q()));
    }
    let triple = img.triple(&dec.flat)?;
    orb_symmetric(&triple, &f, budget)
}

/// Group-version unitary orbital integral of `g' ∈ U(V)` for `L = L♭ ⊕ O ϖ^λ e`.
pub fn orb_group_unitary(gp: &Mat, dec: &BlockDecomposition, l: &HermitianLattice, budget: usize) -> Result<i64> {
    let (flat, lam) = split_lattice(l, dec)?;
    let t = flat.vertex_type()?.ok_or_else(|| Error::Invalid("flat part is not a vertex lattice".into()))?;
    if !is_integral_element(gp)? {
        return Ok(0);
    }
    let xi = find_twist(dec.blocks(gp).3)?;
    let img = cayley_unitary_twisted(gp, xi, dec)?;
    let pair = UnitaryPair::new(dec.flat.clone(), img.x, img.b1)?;
    let f = UnitaryTestFunction { t, u_in: Some(-lam), u_in_dual: Some(dec.ee.v() + lam) };
    orb_unitary(&pair, &f, budget)
}

/// `v(q(x))` for either side: `v(u2 u1)` or `v((u, u))`.
pub fn q_valuation_symmetric(x: &SymTriple) -> Result<i32> {
    Ok(dot(&x.u2, &x.u1)?.v())
}

pub fn q_valuation_unitary(y: &UnitaryPair) -> Result<i32> {
    Ok(y.space.form(&y.u, &y.u)?.v())
}

/// One row of a support profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportRow {
    pub q_valuation: i32,
    pub orb_unitary: i64,
    pub orb_symmetric: i64,
}

impl SupportRow {
    pub fn difference(&self) -> i64 {
        self.orb_unitary - self.orb_symmetric
    }
}

/// `Orb_U(f_L)` and `Orb_S(f'_L)` on matched pairs with `v(q(x))` in `window`; pairs outside
/// the window are skipped. A nearby-space pair contributes `Orb_U = 0`.
pub fn support_profile(
    samples: &[(SymTriple, Option<UnitaryPair>)],
    l: &HermitianLattice,
    window: std::ops::RangeInclusive<i32>,
    budget: usize,
) -> Result<Vec<SupportRow>> {
    let fs = SymmetricTestFunction::std(l)?;
    let fu = UnitaryTestFunction::std(fs.t);
    let mut out = Vec::new();
    for (x, y) in samples {
        let v = q_valuation_symmetric(x)?;
        if !window.contains(&v) {
            continue;
        }
        let s = orb_symmetric(x, &fs, budget)?.value0();
        let u = match y {
            Some(y) => orb_unitary(y, &fu, budget)?,
            None => 0,
        };
        out.push(SupportRow { q_valuation: v, orb_unitary: u, orb_symmetric: s });
    }
    Ok(out)
}

/// `v(L) = min v((x, y))` over `L`.
pub fn lattice_norm_valuation(l: &HermitianLattice) -> Result<i32> {
    l.norm_valuation()
}

pub const BUDGET: usize = DEFAULT_BUDGET;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattices::standard_space_and_lattice;
    use crate::orbits::{random_matching_pair, random_rational_matrix};
    use crate::padic::Ctx;
    use num_rational::Ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rank_one(p: u32, t0: usize, vb: i32, vc: i32) -> (SymTriple, HermitianLattice) {
        let c = Ctx::new(p).unwrap();
        let (s, l) = standard_space_and_lattice(c, 1, t0, t0 == 0).unwrap();
        let x = SymTriple::new(s, Mat::identity(c, 1), vec![c.pi_pow(vb)], vec![c.pi_pow(vc)]).unwrap();
        (x, l)
    }

    #[test]
    fn rank_one_values() {
        let (x, l) = rank_one(3, 0, 0, 0);
        let o = orb_symmetric(&x, &SymmetricTestFunction::std(&l).unwrap(), BUDGET).unwrap();
        assert_eq!(o.value0(), 1);
        let (x, l) = rank_one(3, 0, 1, 2);
        let o = orb_symmetric(&x, &SymmetricTestFunction::std(&l).unwrap(), BUDGET).unwrap();
        assert_eq!(o.value0(), 0);
        assert_eq!(o.derivative0(), LogMultiple::from_int(-2));
        let (x, l) = rank_one(3, 1, 1, 1);
        assert_eq!(dorb(&x, &SymmetricTestFunction::std(&l).unwrap(), BUDGET).unwrap(), LogMultiple::from_int(-1));
        let (x, l) = rank_one(3, 0, 0, -1);
        let o = orb_symmetric(&x, &SymmetricTestFunction::std(&l).unwrap(), BUDGET).unwrap();
        assert!(o.is_zero());
        assert_eq!(o.derivative0().coeff(), Ratio::from_integer(0));
    }

    #[test]
    fn rank_one_unitary() {
        let c = Ctx::new(3).unwrap();
        let (s, _) = standard_space_and_lattice(c, 1, 0, true).unwrap();
        let f = UnitaryTestFunction::std(0);
        let y = UnitaryPair::new(s.clone(), Mat::identity(c, 1), vec![c.one()]).unwrap();
        assert_eq!(orb_unitary(&y, &f, BUDGET).unwrap(), 1);
        let y = UnitaryPair::new(s, Mat::identity(c, 1), vec![c.pi_pow(-1)]).unwrap();
        assert_eq!(orb_unitary(&y, &f, BUDGET).unwrap(), 0);
    }

    #[test]
    fn transfer_on_small_samples() {
        let c = Ctx::new(3).unwrap();
        for (n, t) in [(1, 0), (1, 1), (2, 0), (2, 1), (2, 2)] {
            for seed in 0..6 {
                let s = random_matching_pair(c, n, t, seed).unwrap();
                let fs = SymmetricTestFunction::std(&s.lattice).unwrap();
                let os = orb_symmetric(&s.triple, &fs, BUDGET).unwrap().value0();
                if s.in_v {
                    let ou = orb_unitary(&s.pair, &UnitaryTestFunction::std(t), BUDGET).unwrap();
                    assert_eq!(os, ou, "n={n} t={t} seed={seed}");
                } else {
                    assert_eq!(os, 0, "n={n} t={t} seed={seed}");
                }
            }
        }
    }

    #[test]
    fn conjugation_shifts_coefficients() {
        let c = Ctx::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for seed in 0..4 {
            let s = random_matching_pair(c, 2, 1, seed).unwrap();
            let f = SymmetricTestFunction::std(&s.lattice).unwrap();
            let base = orb_symmetric(&s.triple, &f, BUDGET).unwrap();
            let h = random_rational_matrix(c, 2, &mut rng);
            let k = h.det().unwrap().v();
            let moved = orb_symmetric(&s.triple.act(&h).unwrap(), &f, BUDGET).unwrap();
            assert_eq!(moved.coeffs, base.shifted(k).coeffs);
            assert_eq!(moved.omega, sign_of(k) * base.omega);
        }
    }
}
