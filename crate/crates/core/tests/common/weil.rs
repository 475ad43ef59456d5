//! Direct Riemann-sum oracle for the Fourier transform, and random coset-character terms.

use std::sync::Arc;

use padic_transfer_core::lattices::{HermitianLattice, HermitianSpace};
use padic_transfer_core::linalg::Vector;
use padic_transfer_core::padic::Ctx;
use padic_transfer_core::weil::{psi_f, volume, CosetCharacterFunction, Cyclo, Term, WeilConfig};
use padic_transfer_core::Result;
use rand::Rng;

pub fn random_vector<R: Rng + ?Sized>(c: Ctx, n: usize, vals: std::ops::RangeInclusive<i32>, rng: &mut R) -> Vector {
    (0..n).map(|_| c.random_scalar(rng, vals.clone(), 0.3, false)).collect()
}

/// `c · ψ_F((x, b)) · 1_{a + L'}` with `L'` among `ϖL, L, L^∨`, `a` and `b` of valuation `≥ -1`,
/// and a small nonzero integer `c`.
pub fn random_term<R: Rng + ?Sized>(l: &HermitianLattice, rng: &mut R) -> Result<CosetCharacterFunction> {
    let c = l.ctx();
    let n = l.dim();
    let lat = match rng.gen_range(0..3) {
        0 => l.scale(1),
        1 => l.clone(),
        _ => l.dual()?,
    };
    let coeff = Cyclo::from_int(c.p(), [1, -1, 2, -3][rng.gen_range(0..4)]);
    Ok(CosetCharacterFunction::term(
        l.space().clone(),
        coeff,
        random_vector(c, n, -1..=1, rng),
        random_vector(c, n, -1..=1, rng),
        lat,
    ))
}

/// `∫ f(x) ψ_F((x, y)) dx` as `vol(R) Σ_{x ∈ S/R} f(x) ψ_F((x, y))`. Here `S` holds the support,
/// and `R` is small enough that the integrand is `R`-invariant.
pub fn riemann_fourier(
    f: &CosetCharacterFunction,
    y: &[padic_transfer_core::padic::PadicScalar],
    cfg: &WeilConfig,
) -> Result<Cyclo> {
    let space: &Arc<HermitianSpace> = &f.space;
    let p = space.ctx().p();
    let Some(first) = f.terms.first() else {
        return Ok(Cyclo::zero(p));
    };
    let mut s = first.lattice.clone();
    let mut m = first.lattice.clone();
    for Term { a, lattice, .. } in &f.terms {
        s = s.sum(lattice)?.add_vectors(&[a.clone()])?;
        m = m.intersect(lattice)?;
    }
    let mut chars: Vec<Vector> = f.terms.iter().map(|t| t.b.clone()).collect();
    chars.push(y.to_vec());
    let mut r = m;
    while !chars.iter().all(|b| r.dual().and_then(|d| d.contains(b)).unwrap_or(false)) {
        r = r.scale(1);
    }
    let mut acc = Cyclo::zero(p);
    for x in s.coset_reps(&r, 2_000_000)? {
        let fx = f.eval(&x, cfg)?;
        if !fx.is_zero() {
            acc = acc.add(&fx.mul(&psi_f(&space.form(&x, y)?, cfg)?));
        }
    }
    Ok(acc.mul(&volume(&r)?))
}

/// Evaluation points with coordinates of valuation in `[-2, 1]`.
pub fn sample_points<R: Rng + ?Sized>(l: &HermitianLattice, count: usize, rng: &mut R) -> Vec<Vector> {
    (0..count).map(|_| random_vector(l.ctx(), l.dim(), -2..=1, rng)).collect()
}
