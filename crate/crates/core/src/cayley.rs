//! Relative Cayley maps reducing rank-`n` group data on `V = V♭ ⊕ F e` to rank-`(n-1)`
//! semi-Lie data on `V♭`, with norm-one twists and integral twisting elements.
//!
//! Blocks of an endomorphism `m` of `V` are `a` (on `V♭`), `b = m e` projected to `V♭`,
//! the row `c` (the `e`-coordinate of `m` on `V♭`) and the scalar `d`. The vector `e` is
//! the last coordinate vector.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattices::HermitianSpace;
use crate::linalg::{dot, vec_scale, Mat, Vector};
use crate::orbits::{matches, SymTriple, UnitaryPair};
use crate::padic::{norm_one_from, PadicScalar};

#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub space: Arc<HermitianSpace>,
    pub flat: Arc<HermitianSpace>,
    /// `(e, e)`.
    pub ee: PadicScalar,
}

impl BlockDecomposition {
    pub fn new(space: Arc<HermitianSpace>) -> Result<BlockDecomposition> {
        let n = space.dim();
        if n < 2 {
            return Err(Error::DimensionMismatch("decomposition needs dimension at least 2".into()));
        }
        let g = space.gram();
        for i in 0..n - 1 {
            if !g[(i, n - 1)].is_zero() || !g[(n - 1, i)].is_zero() {
                return Err(Error::Invalid("last basis vector is not orthogonal to the rest".into()));
            }
        }
        let rows = (0..n - 1).map(|i| (0..n - 1).map(|j| g[(i, j)]).collect()).collect();
        let flat = HermitianSpace::new(Mat::from_rows(rows)?)?;
        Ok(BlockDecomposition { ee: g[(n - 1, n - 1)], space, flat })
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `(a, b, c, d)`.
    pub fn blocks(&self, m: &Mat) -> (Mat, Vector, Vector, PadicScalar) {
        let n = self.dim();
        let k = n - 1;
        let rows = (0..k).map(|i| (0..k).map(|j| m[(i, j)]).collect()).collect();
        let a = Mat::from_rows(rows).expect("square block");
        let b = (0..k).map(|i| m[(i, k)]).collect();
        let c = (0..k).map(|j| m[(k, j)]).collect();
        (a, b, c, m[(k, k)])
    }

    /// Reassemble a matrix from blocks.
    pub fn assemble(&self, a: &Mat, b: &[PadicScalar], c: &[PadicScalar], d: PadicScalar) -> Mat {
        let n = self.dim();
        let k = n - 1;
        let mut m = Mat::zeros(d.ctx(), n, n);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = a[(i, j)];
            }
            m[(i, k)] = b[i];
            m[(k, i)] = c[i];
        }
        m[(k, k)] = d;
        m
    }
}

/// `(a + b c / (1 - d), b / (1 - d), c / (1 - d))` for either side.
#[derive(Clone, Debug)]
pub struct CayleyImage {
    pub x: Mat,
    pub b1: Vector,
    pub c1: Vector,
    pub d: PadicScalar,
}

fn cayley_raw(m: &Mat, dec: &BlockDecomposition) -> Result<CayleyImage> {
    let (a, b, c, d) = dec.blocks(m);
    let ctx = d.ctx();
    let one_minus_d = ctx.one().sub(&d)?;
    if one_minus_d.is_zero() {
        return Err(Error::SingularCayley);
    }
    let s = one_minus_d.inv()?;
    let b1 = vec_scale(&b, s);
    let c1 = vec_scale(&c, s);
    let k = b.len();
    let mut x = a.clone();
    for i in 0..k {
        for j in 0..k {
            let t = b1[i] * c[j];
            if !t.is_zero() {
                x[(i, j)] = x[(i, j)].add(&t)?;
            }
        }
    }
    Ok(CayleyImage { x, b1, c1, d })
}

/// Unitary Cayley map `g' ↦ (g, u1)` with `g = t + u w / (1 - d)`, `u1 = u / (1 - d)`.
pub fn cayley_unitary(gp: &Mat, dec: &BlockDecomposition) -> Result<CayleyImage> {
    cayley_raw(gp, dec)
}

pub fn cayley_unitary_twisted(gp: &Mat, xi: PadicScalar, dec: &BlockDecomposition) -> Result<CayleyImage> {
    cayley_raw(&gp.scale(xi), dec)
}

/// Norm-one residue representatives `a / conj(a)`, one per class, starting with `1`.
pub fn norm_one_classes(ctx: crate::padic::Ctx) -> Vec<PadicScalar> {
    let mut out: Vec<PadicScalar> = Vec::new();
    for a in ctx.residues(false) {
        if a.is_zero() {
            continue;
        }
        let xi = norm_one_from(a).expect("unit");
        if !out.iter().any(|y| y.sub(&xi).map(|d| d.v() >= 1).unwrap_or(false)) {
            out.push(xi);
        }
    }
    out
}

/// First norm-one `ξ` (in class order) with `1 - ξ d` a unit.
pub fn find_twist(d: PadicScalar) -> Result<PadicScalar> {
    let ctx = d.ctx();
    for xi in norm_one_classes(ctx) {
        let s = ctx.one().sub(&(xi * d))?;
        if s.is_unit() {
            return Ok(xi);
        }
    }
    Err(Error::TwistSearchExhausted)
}

/// Whether the characteristic polynomial has coefficients in `O_F`.
pub fn is_integral_element(m: &Mat) -> Result<bool> {
    Ok(m.char_poly()?.iter().all(|c| c.is_integral()))
}

/// `B` with `γ = B conj(B)^{-1}`, of the form `a^{-1}(1 + ξ γ)` with `ξ = a / conj(a)`.
/// The integral variant requires `γ` integral and returns `B ∈ O_F[γ]^×`.
pub fn twisting_element(gamma: &Mat, integral: bool) -> Result<Mat> {
    let ctx = gamma.ctx();
    let n = gamma.rows();
    if integral && !is_integral_element(gamma)? {
        return Err(Error::NotIntegral);
    }
    let id = Mat::identity(ctx, n);
    for a in ctx.residues(false) {
        if a.is_zero() {
            continue;
        }
        let xi = norm_one_from(a)?;
        let b = id.add(&gamma.scale(xi))?.scale(a.inv()?);
        let d = b.det()?;
        if d.is_zero() || (integral && !d.is_unit()) {
            continue;
        }
        return Ok(b);
    }
    Err(Error::SearchExhausted("no residue twist gives an invertible 1 + xi gamma".into()))
}

/// Symmetric Cayley image with the twisting element applied: `(γ, b2, c2)` over `F0`.
#[derive(Clone, Debug)]
pub struct SymCayleyImage {
    pub raw: CayleyImage,
    pub twist: Mat,
    pub b2: Vector,
    pub c2: Vector,
}

pub fn cayley_symmetric(gp: &Mat, dec: &BlockDecomposition, twist: Option<&Mat>) -> Result<SymCayleyImage> {
    let raw = cayley_raw(gp, dec)?;
    let gamma = &raw.x;
    let b = match twist {
        Some(b) => b.clone(),
        None => twisting_element(gamma, is_integral_element(gamma)?)?,
    };
    if b.mul(&b.conj().inverse()?)? != *gamma {
        return Err(Error::BadTwist);
    }
    let b2 = b.inverse()?.mul_vec(&raw.b1)?;
    let c2 = b.conj().transpose().mul_vec(&raw.c1)?;
    if !b2.iter().chain(&c2).all(|x| x.in_base_field()) {
        return Err(Error::BadTwist);
    }
    Ok(SymCayleyImage { raw, twist: b, b2, c2 })
}

impl SymCayleyImage {
    /// `(γ, b2, c2)` as a triple on `V♭`.
    pub fn triple(&self, flat: &Arc<HermitianSpace>) -> Result<SymTriple> {
        SymTriple::new(flat.clone(), self.raw.x.clone(), self.b2.clone(), self.c2.clone())
    }
}

/// `c2 γ^{i+1} b2 - c1 γ^i b1` for `i = -1..=n`; all zero for a valid image.
pub fn symmetric_bridge_residuals(img: &SymCayleyImage) -> Result<Vec<PadicScalar>> {
    let g = &img.raw.x;
    let n = g.rows() as i64;
    let power_apply = |k: i64, v: &Vector| -> Result<Vector> {
        let base = if k >= 0 { g.clone() } else { g.conj() };
        let mut w = v.clone();
        for _ in 0..k.unsigned_abs() {
            w = base.mul_vec(&w)?;
        }
        Ok(w)
    };
    (-1..=n)
        .map(|i| {
            let lhs = dot(&img.c2, &power_apply(i + 1, &img.b2)?)?;
            let rhs = dot(&img.raw.c1, &power_apply(i, &img.raw.b1)?)?;
            lhs.sub(&rhs)
        })
        .collect()
}

/// `(g^i u1, u1) - (e, e) c1(g^{i-1} u1)` for `i = 1..=n`; all zero for a unitary `g'`.
pub fn unitary_bridge_residuals(img: &CayleyImage, dec: &BlockDecomposition) -> Result<Vec<PadicScalar>> {
    let g = &img.x;
    let n = g.rows();
    let mut pows = vec![img.b1.clone()];
    for i in 1..=n + 1 {
        pows.push(g.mul_vec(&pows[i - 1])?);
    }
    (1..=n + 1)
        .map(|i| {
            let lhs = dec.flat.form(&pows[i], &img.b1)?;
            let rhs = dec.ee * dot(&img.c1, &pows[i - 1])?;
            lhs.sub(&rhs)
        })
        .collect()
}

/// Whether `𝔠_U(g')` matches `(γ, b2, (e,e) c2)` where `(γ, b2, c2) = 𝔠_S'(γ')`.
pub fn matching_compatibility(
    gp_unitary: &Mat,
    dec_unitary: &BlockDecomposition,
    gp_sym: &Mat,
    dec_sym: &BlockDecomposition,
) -> Result<bool> {
    let u = cayley_unitary(gp_unitary, dec_unitary)?;
    let pair = UnitaryPair::new(dec_unitary.flat.clone(), u.x.clone(), u.b1.clone())?;
    let s = cayley_symmetric(gp_sym, dec_sym, None)?;
    let c2 = vec_scale(&s.c2, dec_unitary.ee);
    let triple = SymTriple::new(dec_sym.flat.clone(), s.raw.x.clone(), s.b2.clone(), c2)?;
    matches(&triple, &pair)
}

/// Hermitian form on `V = V♭ ⊕ F e` making `γ'` unitary with `(e, e) = ee`, built on the
/// Krylov basis of the symmetric Cayley image. `None` when the Krylov basis degenerates.
pub fn unitary_form_for(gp: &Mat, dec_sym: &BlockDecomposition, ee: PadicScalar) -> Result<Mat> {
    let img = cayley_raw(gp, dec_sym)?;
    let g = &img.x;
    let k = g.rows();
    let moment = |j: i64| -> Result<PadicScalar> {
        // a_j = ee · c1 γ^{j-1} b1
        let e = j - 1;
        let base = if e >= 0 { g.clone() } else { g.conj() };
        let mut w = img.b1.clone();
        for _ in 0..e.unsigned_abs() {
            w = base.mul_vec(&w)?;
        }
        Ok(ee * dot(&img.c1, &w)?)
    };
    let ms: Vec<PadicScalar> = (-(k as i64) + 1..k as i64).map(&moment).collect::<Result<_>>()?;
    let at = |j: i64| ms[(j + k as i64 - 1) as usize];
    let a = Mat::from_rows((0..k).map(|i| (0..k).map(|j| at(i as i64 - j as i64)).collect()).collect())?;
    let kr = crate::orbits::krylov(g, &img.b1)?;
    let kinv = kr.inverse()?;
    let hflat = kinv.transpose().mul(&a)?.mul(&kinv.conj())?;
    let n = k + 1;
    let mut h = Mat::zeros(ee.ctx(), n, n);
    for i in 0..k {
        for j in 0..k {
            h[(i, j)] = hflat[(i, j)];
        }
    }
    h[(k, k)] = ee;
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattices::standard_space_and_lattice;
    use crate::orbits::{gamma_from, random_integral_matrix, random_unitary};
    use crate::padic::Ctx;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> Ctx {
        Ctx::new(3).unwrap()
    }

    #[test]
    fn block_diagonal_inputs() {
        let c = ctx();
        let (s, _) = standard_space_and_lattice(c, 3, 1, false).unwrap();
        let dec = BlockDecomposition::new(s).unwrap();
        let g0 = Mat::from_rows(vec![vec![c.zero(), c.one()], vec![c.one(), c.zero()]]).unwrap();
        let gp = dec.assemble(&g0, &[c.zero(), c.zero()], &[c.zero(), c.zero()], c.int(-1));
        let img = cayley_unitary(&gp, &dec).unwrap();
        assert_eq!(img.x, g0);
        assert!(img.b1.iter().all(|x| x.is_zero()));
        let si = cayley_symmetric(&gp, &dec, None).unwrap();
        assert!(si.b2.iter().chain(&si.c2).all(|x| x.is_zero()));
    }

    #[test]
    fn twisting_element_examples() {
        let c = ctx();
        let id = Mat::identity(c, 2);
        let b = twisting_element(&id, true).unwrap();
        assert_eq!(b.mul(&b.conj().inverse().unwrap()).unwrap(), id);
        let xi = norm_one_from(c.elem(1, 1)).unwrap();
        let g = id.scale(xi);
        let b = twisting_element(&g, true).unwrap();
        assert_eq!(b.mul(&b.conj().inverse().unwrap()).unwrap(), g);
        assert!(b.det().unwrap().is_unit());
    }

    #[test]
    fn random_integral_twists() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 2..=3 {
            for _ in 0..20 {
                let g = gamma_from(&random_integral_matrix(c, n, &mut rng, true)).unwrap();
                let b = twisting_element(&g, true).unwrap();
                assert!(b.det().unwrap().is_unit());
                assert_eq!(b.mul(&b.conj().inverse().unwrap()).unwrap(), g);
                // B is a polynomial in γ, hence commutes with it
                assert_eq!(b.mul(&g).unwrap(), g.mul(&b).unwrap());
            }
        }
    }

    #[test]
    fn twist_classes_count() {
        assert_eq!(norm_one_classes(ctx()).len(), 4);
        assert_eq!(norm_one_classes(Ctx::new(5).unwrap()).len(), 6);
    }

    #[test]
    fn unitary_cayley_properties() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, t) in [(2, 0), (2, 1), (3, 1), (3, 2)] {
            let (s, _) = standard_space_and_lattice(c, n, t, t % 2 == 0).unwrap();
            let dec = BlockDecomposition::new(s.clone()).unwrap();
            for _ in 0..15 {
                let gp = random_unitary(&s, &mut rng).unwrap();
                let xi = find_twist(dec.blocks(&gp).3).unwrap();
                let img = cayley_unitary_twisted(&gp, xi, &dec).unwrap();
                assert!(dec.flat.is_unitary(&img.x).unwrap());
                assert!(unitary_bridge_residuals(&img, &dec).unwrap().iter().all(|r| r.is_zero()));
                // reconstruction: a = g - u1 c1 (1-d), u = u1 (1-d), w = c1 (1-d)
                let omd = c.one().sub(&img.d).unwrap();
                let mut a = img.x.clone();
                for i in 0..n - 1 {
                    for j in 0..n - 1 {
                        a[(i, j)] = a[(i, j)].sub(&(img.b1[i] * img.c1[j] * omd)).unwrap();
                    }
                }
                let back = dec.assemble(&a, &vec_scale(&img.b1, omd), &vec_scale(&img.c1, omd), img.d);
                assert_eq!(back, gp.scale(xi));
            }
        }
    }

    #[test]
    fn symmetric_cayley_properties() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (n, t) in [(2, 0), (3, 1)] {
            let (s, _) = standard_space_and_lattice(c, n, t, t % 2 == 0).unwrap();
            let dec = BlockDecomposition::new(s.clone()).unwrap();
            let mut done = 0;
            while done < 15 {
                let gp = gamma_from(&random_integral_matrix(c, n, &mut rng, true)).unwrap();
                let xi = find_twist(dec.blocks(&gp).3).unwrap();
                let gp = gp.scale(xi);
                let img = cayley_symmetric(&gp, &dec, None).unwrap();
                assert!(symmetric_bridge_residuals(&img).unwrap().iter().all(|r| r.is_zero()));
                // another twisting element gives an equivalent triple
                let alt = img.twist.scale(c.int(p_unit()));
                let img2 = cayley_symmetric(&gp, &dec, Some(&alt)).unwrap();
                let t1 = img.triple(&dec.flat).unwrap();
                let t2 = img2.triple(&dec.flat).unwrap();
                assert_eq!(t1.invariants().unwrap(), t2.invariants().unwrap());
                done += 1;
            }
        }
    }

    fn p_unit() -> i64 {
        2
    }

    #[test]
    fn constructed_group_pairs_are_compatible() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in [2usize, 3] {
            let (s, _) = standard_space_and_lattice(c, n, 0, true).unwrap();
            let dec = BlockDecomposition::new(s.clone()).unwrap();
            let mut done = 0;
            while done < 10 {
                let gp = gamma_from(&random_integral_matrix(c, n, &mut rng, true)).unwrap();
                let xi = find_twist(dec.blocks(&gp).3).unwrap();
                let gp = gp.scale(xi);
                let Ok(h) = unitary_form_for(&gp, &dec, c.one()) else {
                    continue;
                };
                let Ok(us) = HermitianSpace::new(h) else {
                    continue;
                };
                assert!(us.is_unitary(&gp).unwrap());
                let udec = BlockDecomposition::new(us).unwrap();
                assert!(matching_compatibility(&gp, &udec, &gp, &dec).unwrap());
                // scaling the whole form keeps compatibility
                let h2 = unitary_form_for(&gp, &dec, c.int(4)).unwrap();
                let udec2 = BlockDecomposition::new(HermitianSpace::new(h2).unwrap()).unwrap();
                assert!(matching_compatibility(&gp, &udec2, &gp, &dec).unwrap());
                // an unrelated symmetric element does not match
                let other = gamma_from(&random_integral_matrix(c, n, &mut rng, true)).unwrap();
                let xo = find_twist(dec.blocks(&other).3).unwrap();
                if let Ok(m) = matching_compatibility(&gp, &udec, &other.scale(xo), &dec) {
                    assert!(!m);
                }
                done += 1;
            }
        }
    }
}
