//! Brute-force oracles shared by the integration and acceptance tests. Nothing here uses the
//! pruned boxes or the Cayley reduction of the library.

#![allow(dead_code)]

pub mod drinfeld;
pub mod weil;

use std::collections::BTreeMap;

use padic_transfer_core::cayley::BlockDecomposition;
use padic_transfer_core::lattices::{enumerate_between, HermitianLattice};
use padic_transfer_core::linalg::{dot, vec_scale, Mat, Vector};
use padic_transfer_core::orbits::{krylov, transfer_factor_gp, SymTriple, UnitaryPair};
use padic_transfer_core::padic::PadicScalar;
use padic_transfer_core::Result;

pub const ORACLE_BUDGET: usize = 5_000_000;

fn sign(k: i32) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `ω`-signed coefficient map `{a : ω Σ (-1)^a}` in the same normalization as `OrbLaurent::signed`.
pub type Signed = BTreeMap<i32, i64>;

fn push(map: &mut Signed, a: i32, c: i64) {
    let e = map.entry(a).or_insert(0);
    *e += c;
    if *e == 0 {
        map.remove(&a);
    }
}

fn omega_of(x: &SymTriple, l: &HermitianLattice) -> Result<i64> {
    let d = krylov(&x.gamma, &x.u1)?.det()?;
    Ok(sign(d.v() - l.det_valuation()))
}

fn annihilates(u2: &[PadicScalar], l: &HermitianLattice) -> Result<bool> {
    for b in l.basis_vectors() {
        let v = dot(u2, &b)?;
        if !v.is_integral() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Which vector constraints a symmetric test function imposes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymKind {
    /// `u1 ∈ L1`, `u2 L2 ⊆ O`.
    Std,
    /// `u1 ∈ L2`, `u2 L1 ⊆ O`.
    Dual,
}

/// Every conjugation-stable, `γ`-stable pair `L1 ⊆ L2 ⊆ ϖ^{-1} L1` with `[L2 : L1] = t`
/// meeting the vector constraints, found by walking all `O_F`-lattices between `ϖ A` and `M`.
pub fn symmetric_oracle(
    x: &SymTriple,
    base: &HermitianLattice,
    t: i32,
    kind: SymKind,
    omega_lattice: &HermitianLattice,
) -> Result<Signed> {
    let omega = omega_of(x, omega_lattice)?;
    let n = x.dim();
    let a = HermitianLattice::new(x.space.clone(), &krylov(&x.gamma, &x.u1)?)?;
    let mut rows = vec![x.u2.clone()];
    for i in 1..n {
        rows.push(x.gamma.transpose().mul_vec(&rows[i - 1])?);
    }
    let m = HermitianLattice::new(x.space.clone(), &Mat::from_rows(rows)?.inverse()?)?;
    let mut out = Signed::new();
    let lo = a.scale(1);
    if !m.contains_lattice(&lo)? {
        return Ok(out);
    }
    let l1s = enumerate_between(&lo, &m, |l| Ok(l.tau_stable()? && l.is_stable_under(&x.gamma)?), ORACLE_BUDGET)?;
    for l1 in &l1s {
        let l2s = enumerate_between(
            l1,
            &l1.scale(-1),
            |l| Ok(l1.relative_index(l) == t && l.tau_stable()? && l.is_stable_under(&x.gamma)?),
            ORACLE_BUDGET,
        )?;
        for l2 in l2s {
            let ok = match kind {
                SymKind::Std => l1.contains(&x.u1)? && annihilates(&x.u2, &l2)?,
                SymKind::Dual => l2.contains(&x.u1)? && annihilates(&x.u2, l1)?,
            };
            if ok {
                let e = l1.relative_index(base);
                push(&mut out, e, omega * sign(e));
            }
        }
    }
    Ok(out)
}

/// Type-`t` vertex lattices `Λ` with `g Λ = Λ` and `u ∈ Λ` (or `u ∈ Λ^∨` for `dual`), from all
/// lattices between `ϖ A` and `A^∨`.
pub fn unitary_oracle(y: &UnitaryPair, t: usize, dual: bool) -> Result<i64> {
    let a = HermitianLattice::new(y.space.clone(), &krylov(&y.g, &y.u)?)?;
    let lo = if dual { a.scale(1) } else { a.clone() };
    let hi = a.dual()?;
    if !hi.contains_lattice(&lo)? {
        return Ok(0);
    }
    let all =
        enumerate_between(&lo, &hi, |l| Ok(l.vertex_type()? == Some(t) && l.is_stable_under(&y.g)?), ORACLE_BUDGET)?;
    let mut count = 0;
    for l in all {
        let ok = if dual { l.dual()?.contains(&y.u)? } else { l.contains(&y.u)? };
        if ok {
            count += 1;
        }
    }
    Ok(count)
}

fn last_coordinate(v: &[PadicScalar]) -> PadicScalar {
    v[v.len() - 1]
}

/// Flat bounds `(A♭, B♭)`: `Λ♭ ⊕ O μ e` stable forces `μA♭ ⊆ Λ♭ ⊆ μB♭`.
fn flat_bounds(gp: &Mat, dec: &BlockDecomposition) -> Result<Option<(HermitianLattice, HermitianLattice)>> {
    let n = dec.dim();
    let ctx = gp.ctx();
    let mut e = vec![ctx.zero(); n];
    e[n - 1] = ctx.one();
    let mut gens = Vec::new();
    let mut rows = Vec::new();
    let mut power = Mat::identity(ctx, n);
    for _ in 1..n {
        power = power.mul(gp)?;
        let col = power.mul_vec(&e)?;
        gens.push(col[..n - 1].to_vec());
        rows.push(power.row(n - 1)[..n - 1].to_vec());
    }
    let g = Mat::from_cols(ctx, n - 1, &gens);
    if g.det()?.is_zero() {
        return Ok(None);
    }
    let r = Mat::from_rows(rows)?;
    if r.det()?.is_zero() {
        return Ok(None);
    }
    let a = HermitianLattice::new(dec.flat.clone(), &g)?;
    let b = HermitianLattice::new(dec.flat.clone(), &r.inverse()?)?;
    Ok(Some((a, b)))
}

/// Regular semisimple for the group action: both flat bounds are lattices.
pub fn group_rs(gp: &Mat, dec: &BlockDecomposition) -> bool {
    matches!(flat_bounds(gp, dec), Ok(Some(_)))
}

fn extend(flat: &HermitianLattice, lam: i32, dec: &BlockDecomposition) -> Result<HermitianLattice> {
    let n = dec.dim();
    let ctx = flat.ctx();
    let mut cols: Vec<Vector> = flat
        .basis_vectors()
        .into_iter()
        .map(|mut v| {
            v.push(ctx.zero());
            v
        })
        .collect();
    let mut e = vec![ctx.zero(); n];
    e[n - 1] = ctx.pi_pow(lam);
    cols.push(e);
    HermitianLattice::from_vectors(dec.space.clone(), &cols)
}

/// Flat part and the valuation of the `e`-pivot of a lattice that splits along `e`.
pub fn split(l: &HermitianLattice, dec: &BlockDecomposition) -> Result<(HermitianLattice, i32)> {
    let n = dec.dim();
    let b = l.basis();
    let rows = (0..n - 1).map(|i| (0..n - 1).map(|j| b[(i, j)]).collect()).collect();
    Ok((HermitianLattice::new(dec.flat.clone(), &Mat::from_rows(rows)?)?, b[(n - 1, n - 1)].v()))
}

/// Group integral of `γ'` for the chain `(L, L^∨)`: rational pairs `(Λ1♭, Λ2♭)` in the relative
/// position of `(L♭, L^∨♭)` whose extensions by `e` are `γ'`-stable.
pub fn group_symmetric_oracle(gp: &Mat, dec: &BlockDecomposition, l: &HermitianLattice) -> Result<Signed> {
    let (f1, lam1) = split(l, dec)?;
    let (f2, lam2) = split(&l.dual()?, dec)?;
    let t = f1.relative_index(&f2);
    let n = dec.dim();
    let ctx = gp.ctx();
    let mut e = vec![ctx.zero(); n];
    e[n - 1] = ctx.one();
    let omega = transfer_factor_gp(gp, &e, l)? as i64;
    let mut out = Signed::new();
    let Some((a, b)) = flat_bounds(gp, dec)? else {
        return Ok(out);
    };
    let range = |lam: i32| (a.scale(lam), b.scale(lam));
    let (lo1, hi1) = range(lam1);
    let (lo2, hi2) = range(lam2);
    if !hi1.contains_lattice(&lo1)? || !hi2.contains_lattice(&lo2)? {
        return Ok(out);
    }
    let stable = |fl: &HermitianLattice, lam: i32| -> Result<bool> { extend(fl, lam, dec)?.is_stable_under(gp) };
    let l1s = enumerate_between(&lo1, &hi1, |x| Ok(x.tau_stable()? && stable(x, lam1)?), ORACLE_BUDGET)?;
    let l2s = enumerate_between(&lo2, &hi2, |x| Ok(x.tau_stable()? && stable(x, lam2)?), ORACLE_BUDGET)?;
    for x1 in &l1s {
        for x2 in &l2s {
            if x1.relative_index(x2) == t && x2.contains_lattice(x1)? && x1.scale(-1).contains_lattice(x2)? {
                let k = x1.relative_index(&f1);
                push(&mut out, k, omega * sign(k));
            }
        }
    }
    Ok(out)
}

/// Group integral of `g' ∈ U(V)` for `(L, e)`: type-`t♭` vertex lattices `Λ♭` with
/// `Λ♭ ⊕ O ϖ^λ e` stable.
pub fn group_unitary_oracle(gp: &Mat, dec: &BlockDecomposition, l: &HermitianLattice) -> Result<i64> {
    let (flat, lam) = split(l, dec)?;
    let Some(t) = flat.vertex_type()? else {
        return Ok(0);
    };
    let Some((a, b)) = flat_bounds(gp, dec)? else {
        return Ok(0);
    };
    let (lo, hi) = (a.scale(lam), b.scale(lam));
    if !hi.contains_lattice(&lo)? {
        return Ok(0);
    }
    let all = enumerate_between(
        &lo,
        &hi,
        |x| Ok(x.vertex_type()? == Some(t) && extend(x, lam, dec)?.is_stable_under(gp)?),
        ORACLE_BUDGET,
    )?;
    Ok(all.len() as i64)
}

/// `Orb((γ, b, c), f_std)` for `n = 1` from the closed sum
/// `(-1)^{v(b)} Σ_{k = t0 - v(c)}^{v(b)} (-1)^k X^k`.
pub fn rank_one_closed_form(vb: i32, vc: i32, t0: i32) -> Signed {
    let mut out = Signed::new();
    for k in (t0 - vc)..=vb {
        push(&mut out, k, sign(vb + k));
    }
    out
}

pub fn scaled(v: &[PadicScalar], k: i32) -> Vector {
    vec_scale(v, v[0].ctx().pi_pow(k))
}

pub fn last(v: &[PadicScalar]) -> PadicScalar {
    last_coordinate(v)
}

/// One maximal-order sample: `∂Orb(f_std)` against `-Int^Z`, and the dual chain against
/// `-(-1)^t Int^Z` of the dual rescaling. `None` on agreement.
pub fn maxorder_case(c: padic_transfer_core::padic::Ctx, n: usize, t: usize, seed: u64) -> Result<Option<String>> {
    use padic_transfer_core::geometry::{int_z_maxorder, random_maxorder_sample};
    use padic_transfer_core::orbital::{orb_symmetric, SymmetricTestFunction, BUDGET};
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let s = random_maxorder_sample(c, n, t, -2..=4, seed % 2 == 1, &mut rng)?;
    let o = orb_symmetric(&s.triple, &SymmetricTestFunction::std(&s.lattice)?, BUDGET)?;
    let od = orb_symmetric(&s.triple, &SymmetricTestFunction::std_dual(&s.lattice)?, BUDGET)?;
    let iz = int_z_maxorder(&s.dec)?;
    let iy = int_z_maxorder(&s.dec.dual_rescale())?;
    let sg = sign(t as i32);
    let (dz, dy) = (o.derivative0(), od.derivative0());
    if dz.coeff() == (-iz).into() && dy.coeff() == (-sg * iy).into() {
        Ok(None)
    } else {
        Ok(Some(format!(
            "n={n} t={t} seed={seed} w={:?}: ∂Orb {dz} vs Int^Z {iz}, dual ∂Orb {dy} vs Int^Y {iy}",
            s.w_vals
        )))
    }
}
