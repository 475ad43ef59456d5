//! Fourier transform and the Weil-representation generators on finite sums of
//! `c · ψ_F((x, b)) · 1_{a+L}(x)`, with exact cyclotomic coefficients.
//!
//! `ψ` is the unramified level-zero character of `Q_p`: `ψ(x) = ζ_{p^k}^n` where `n / p^k` is
//! the polar part of `x`. The measure on `V` is self-dual for `ψ_F((x, y)) = ψ(tr (x, y))`, so
//! `vol(L) = q^{-t}` with `t = [L^∨ : L]` counted in `O_F`-length.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{f_l_function, CycleKind, LineSum};
use crate::lattices::{HermitianLattice, HermitianSpace};
use crate::linalg::{vec_add, vec_scale, vec_sub, Vector};
use crate::orbits::{random_triple, SampleOptions};
use crate::padic::PadicScalar;

pub const DEFAULT_DEPTH: u32 = 8;
pub const DEFAULT_MAX_COSETS: usize = 100_000;

#[derive(Clone, Copy, Debug)]
pub struct WeilConfig {
    /// Largest `k` with `ζ_{p^k}` allowed in coefficients.
    pub max_depth: u32,
    /// Largest number of cosets a single term may be split into.
    pub max_cosets: usize,
}

impl Default for WeilConfig {
    fn default() -> WeilConfig {
        WeilConfig { max_depth: DEFAULT_DEPTH, max_cosets: DEFAULT_MAX_COSETS }
    }
}

/// Element of `Q(ζ_{p^k})` in the power basis `1, ζ, …, ζ^{φ(p^k)-1}`.
#[derive(Clone, Debug)]
pub struct Cyclo {
    p: u32,
    k: u32,
    c: Vec<BigRational>,
}

fn phi(p: u32, k: u32) -> usize {
    if k == 0 {
        1
    } else {
        (p as usize - 1) * (p as usize).pow(k - 1)
    }
}

impl Cyclo {
    pub fn rational(p: u32, r: BigRational) -> Cyclo {
        Cyclo { p, k: 0, c: vec![r] }
    }

    pub fn from_int(p: u32, n: i64) -> Cyclo {
        Cyclo::rational(p, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero(p: u32) -> Cyclo {
        Cyclo::from_int(p, 0)
    }

    pub fn one(p: u32) -> Cyclo {
        Cyclo::from_int(p, 1)
    }

    /// `q^e` for `q = p` (possibly negative `e`).
    pub fn q_pow(p: u32, e: i32) -> Cyclo {
        let b = BigRational::from_integer(BigInt::from(p));
        let r = if e >= 0 { num_traits::pow(b, e as usize) } else { num_traits::pow(b.recip(), (-e) as usize) };
        Cyclo::rational(p, r)
    }

    /// `ζ_{p^k}^n`.
    pub fn zeta_pow(p: u32, k: u32, n: u64, max_depth: u32) -> Result<Cyclo> {
        if k > max_depth {
            return Err(Error::CyclotomicDepthExceeded(k));
        }
        if k == 0 {
            return Ok(Cyclo::one(p));
        }
        let order = (p as u64).pow(k);
        let mut raw = vec![BigRational::zero(); order as usize];
        raw[(n % order) as usize] = BigRational::one();
        Ok(Cyclo { p, k, c: reduce(p, k, raw) })
    }

    pub fn depth(&self) -> u32 {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// The rational value, if `self` lies in `Q`.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.c.iter().skip(1).all(|x| x.is_zero()) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    fn lift(&self, k: u32) -> Cyclo {
        if k == self.k {
            return self.clone();
        }
        let mut c = vec![BigRational::zero(); phi(self.p, k)];
        let stride = (self.p as usize).pow(k - self.k);
        for (i, x) in self.c.iter().enumerate() {
            c[i * stride] = x.clone();
        }
        Cyclo { p: self.p, k, c }
    }

    fn common(&self, o: &Cyclo) -> (Cyclo, Cyclo) {
        let k = self.k.max(o.k);
        (self.lift(k), o.lift(k))
    }

    pub fn add(&self, o: &Cyclo) -> Cyclo {
        let (a, b) = self.common(o);
        let c = a.c.iter().zip(&b.c).map(|(x, y)| x + y).collect();
        Cyclo { p: a.p, k: a.k, c }
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo { p: self.p, k: self.k, c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn sub(&self, o: &Cyclo) -> Cyclo {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Cyclo) -> Cyclo {
        let (a, b) = self.common(o);
        let mut raw = vec![BigRational::zero(); a.c.len() + b.c.len()];
        for (i, x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                if !y.is_zero() {
                    raw[i + j] += x * y;
                }
            }
        }
        Cyclo { p: a.p, k: a.k, c: reduce(a.p, a.k, raw) }
    }

    pub fn scale(&self, r: &BigRational) -> Cyclo {
        Cyclo { p: self.p, k: self.k, c: self.c.iter().map(|x| x * r).collect() }
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Cyclo {
        if self.k == 0 {
            return self.clone();
        }
        let order = (self.p as usize).pow(self.k);
        let mut raw = vec![BigRational::zero(); order];
        for (i, x) in self.c.iter().enumerate() {
            raw[(order - i) % order] += x;
        }
        Cyclo { p: self.p, k: self.k, c: reduce(self.p, self.k, raw) }
    }

    /// Numerical value, for reports only.
    pub fn to_complex(&self) -> (f64, f64) {
        let order = (self.p as f64).powi(self.k as i32);
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, x) in self.c.iter().enumerate() {
            let v = ratio_to_f64(x);
            let th = std::f64::consts::TAU * i as f64 / order;
            re += v * th.cos();
            im += v * th.sin();
        }
        (re, im)
    }
}

fn ratio_to_f64(x: &BigRational) -> f64 {
    let n: f64 = x.numer().to_string().parse().unwrap_or(f64::NAN);
    let d: f64 = x.denom().to_string().parse().unwrap_or(f64::NAN);
    n / d
}

/// Reduce a polynomial in `ζ_{p^k}` modulo `Φ_{p^k}(x) = Σ_{i<p} x^{i p^{k-1}}`.
fn reduce(p: u32, k: u32, mut raw: Vec<BigRational>) -> Vec<BigRational> {
    let f = phi(p, k);
    if k == 0 {
        let s = raw.into_iter().fold(BigRational::zero(), |a, b| a + b);
        return vec![s];
    }
    let order = (p as usize).pow(k);
    // ζ^{p^k} = 1
    for d in (order..raw.len()).rev() {
        let x = std::mem::take(&mut raw[d]);
        raw[d % order] += x;
    }
    raw.resize(order.max(f), BigRational::zero());
    let step = (p as usize).pow(k - 1);
    for d in (f..raw.len()).rev() {
        let x = std::mem::take(&mut raw[d]);
        if x.is_zero() {
            continue;
        }
        // x^d = -Σ_{i<p-1} x^{d - f + i p^{k-1}}
        for i in 0..(p as usize - 1) {
            raw[d - f + i * step] -= &x;
        }
    }
    raw.truncate(f);
    raw
}

impl PartialEq for Cyclo {
    fn eq(&self, o: &Cyclo) -> bool {
        let (a, b) = self.common(o);
        a.c == b.c
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| if i == 0 { format!("{x}") } else { format!("({x})z{}^{i}", self.p.pow(self.k)) })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `ψ(z)` for `z ∈ F0`.
pub fn psi(z: &PadicScalar, cfg: &WeilConfig) -> Result<Cyclo> {
    let (n, k) = z.polar_part()?;
    Cyclo::zeta_pow(z.p(), k, n, cfg.max_depth)
}

/// `ψ_F(z) = ψ(tr z)`.
pub fn psi_f(z: &PadicScalar, cfg: &WeilConfig) -> Result<Cyclo> {
    psi(&z.trace()?, cfg)
}

/// `c · ψ_F((x, b)) · 1_{a+L}(x)`.
#[derive(Clone, Debug)]
pub struct Term {
    pub coeff: Cyclo,
    pub a: Vector,
    pub b: Vector,
    pub lattice: HermitianLattice,
}

#[derive(Clone, Debug)]
pub struct CosetCharacterFunction {
    pub space: Arc<HermitianSpace>,
    pub terms: Vec<Term>,
}

/// `vol(L) = q^{-t}`, `t = length(L^∨ / L)`.
pub fn volume(l: &HermitianLattice) -> Result<Cyclo> {
    let t = l.relative_index(&l.dual()?);
    Ok(Cyclo::q_pow(l.ctx().p(), -t))
}

/// `γ_V = η(det V)`.
pub fn weil_constant(space: &HermitianSpace) -> i64 {
    space.eta() as i64
}

/// Merged terms over one common lattice `M`: `(a mod M, b mod M^∨) ↦ c`.
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub lattice: Option<HermitianLattice>,
    pub terms: BTreeMap<(Vec<(i32, u64, u64)>, Vec<(i32, u64, u64)>), (Vector, Vector, Cyclo)>,
}

impl NormalForm {
    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|(_, _, c)| c.is_zero())
    }

    /// First nonzero merged term, for reports.
    pub fn first_nonzero(&self) -> Option<&(Vector, Vector, Cyclo)> {
        self.terms.values().find(|(_, _, c)| !c.is_zero())
    }
}

impl CosetCharacterFunction {
    pub fn zero(space: Arc<HermitianSpace>) -> CosetCharacterFunction {
        CosetCharacterFunction { space, terms: Vec::new() }
    }

    /// `1_L`.
    pub fn indicator(l: &HermitianLattice) -> CosetCharacterFunction {
        let n = l.dim();
        let zero = vec![l.ctx().zero(); n];
        CosetCharacterFunction::term(l.space().clone(), Cyclo::one(l.ctx().p()), zero.clone(), zero, l.clone())
    }

    pub fn term(
        space: Arc<HermitianSpace>,
        coeff: Cyclo,
        a: Vector,
        b: Vector,
        l: HermitianLattice,
    ) -> CosetCharacterFunction {
        CosetCharacterFunction { space, terms: vec![Term { coeff, a, b, lattice: l }] }
    }

    fn p(&self) -> u32 {
        self.space.ctx().p()
    }

    pub fn add(&self, o: &CosetCharacterFunction) -> CosetCharacterFunction {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        CosetCharacterFunction { space: self.space.clone(), terms }
    }

    pub fn scale(&self, c: &Cyclo) -> CosetCharacterFunction {
        let terms = self.terms.iter().map(|t| Term { coeff: t.coeff.mul(c), ..t.clone() }).collect();
        CosetCharacterFunction { space: self.space.clone(), terms }
    }

    pub fn sub(&self, o: &CosetCharacterFunction) -> CosetCharacterFunction {
        self.add(&o.scale(&Cyclo::from_int(self.p(), -1)))
    }

    /// `x ↦ f(-x)`.
    pub fn reflect(&self) -> CosetCharacterFunction {
        let neg = |v: &Vector| v.iter().map(|x| -*x).collect::<Vector>();
        let terms = self.terms.iter().map(|t| Term { a: neg(&t.a), b: neg(&t.b), ..t.clone() }).collect();
        CosetCharacterFunction { space: self.space.clone(), terms }
    }

    /// Pointwise value.
    pub fn eval(&self, x: &[PadicScalar], cfg: &WeilConfig) -> Result<Cyclo> {
        let mut acc = Cyclo::zero(self.p());
        for t in &self.terms {
            if t.lattice.contains(&vec_sub(x, &t.a)?)? {
                acc = acc.add(&t.coeff.mul(&psi_f(&self.space.form(x, &t.b)?, cfg)?));
            }
        }
        Ok(acc)
    }

    /// Intersection of all term lattices.
    pub fn common_lattice(&self) -> Result<Option<HermitianLattice>> {
        let mut m: Option<HermitianLattice> = None;
        for t in &self.terms {
            m = Some(match m {
                None => t.lattice.clone(),
                Some(m) => m.intersect(&t.lattice)?,
            });
        }
        Ok(m)
    }

    /// Refine every term to cosets of `m` and merge.
    pub fn normal_form_over(&self, m: &HermitianLattice, cfg: &WeilConfig) -> Result<NormalForm> {
        let md = m.dual()?;
        let mut terms: BTreeMap<_, (Vector, Vector, Cyclo)> = BTreeMap::new();
        for t in &self.terms {
            for r in t.lattice.coset_reps(m, cfg.max_cosets)? {
                let a = m.reduce(&vec_add(&t.a, &r)?)?;
                let b = md.reduce(&t.b)?;
                let shift = vec_sub(&t.b, &b)?;
                let c = t.coeff.mul(&psi_f(&self.space.form(&a, &shift)?, cfg)?);
                let key = (m.coset_key(&a)?, md.coset_key(&b)?);
                match terms.get_mut(&key) {
                    Some(e) => e.2 = e.2.add(&c),
                    None => {
                        terms.insert(key, (a, b, c));
                    }
                }
            }
        }
        Ok(NormalForm { lattice: Some(m.clone()), terms })
    }

    pub fn normal_form(&self, cfg: &WeilConfig) -> Result<NormalForm> {
        match self.common_lattice()? {
            None => Ok(NormalForm { lattice: None, terms: BTreeMap::new() }),
            Some(m) => self.normal_form_over(&m, cfg),
        }
    }

    /// Exact equality as functions on `V`.
    pub fn same_function(&self, o: &CosetCharacterFunction, cfg: &WeilConfig) -> Result<bool> {
        Ok(self.sub(o).normal_form(cfg)?.is_zero())
    }

    /// `∫ |f|^2`.
    pub fn norm_sq(&self, cfg: &WeilConfig) -> Result<Cyclo> {
        let nf = self.normal_form(cfg)?;
        let Some(m) = &nf.lattice else {
            return Ok(Cyclo::zero(self.p()));
        };
        let mut s = Cyclo::zero(self.p());
        for (_, _, c) in nf.terms.values() {
            s = s.add(&c.mul(&c.conj()));
        }
        Ok(s.mul(&volume(m)?))
    }
}

/// `F(f)(y) = ∫ f(x) ψ_F((x, y)) dx`, term by term.
pub fn fourier(f: &CosetCharacterFunction, cfg: &WeilConfig) -> Result<CosetCharacterFunction> {
    let mut terms = Vec::with_capacity(f.terms.len());
    for t in &f.terms {
        let c = t.coeff.mul(&volume(&t.lattice)?).mul(&psi_f(&f.space.form(&t.a, &t.b)?, cfg)?);
        terms.push(Term { coeff: c, a: t.b.iter().map(|x| -*x).collect(), b: t.a.clone(), lattice: t.lattice.dual()? });
    }
    Ok(CosetCharacterFunction { space: f.space.clone(), terms })
}

#[derive(Clone, Copy, Debug)]
pub enum WeilGenerator {
    /// `n(t')`: multiplication by `ψ(t' (x, x))`.
    N(PadicScalar),
    /// `w = γ_V F`.
    W,
}

/// `ψ(t'(x, x))` on `a + L` equals `ψ(-t'(a, a)) ψ_F((x, t' a))` once `t'(L, L) ⊆ O_F`.
fn multiply_quadratic(f: &CosetCharacterFunction, t: &PadicScalar, cfg: &WeilConfig) -> Result<CosetCharacterFunction> {
    if t.is_zero() {
        return Ok(f.clone());
    }
    if !t.in_base_field() {
        return Err(Error::NotInBaseField);
    }
    let mut terms = Vec::new();
    for term in &f.terms {
        let deficit = -(t.v() + term.lattice.norm_valuation()?);
        let (fine, reps) = if deficit > 0 {
            let j = (deficit + 1) / 2;
            let fine = term.lattice.scale(j);
            let reps = term.lattice.coset_reps(&fine, cfg.max_cosets).map_err(|e| match e {
                Error::EnumerationBudgetExceeded(_) => Error::NonClosedTerm,
                e => e,
            })?;
            (fine, reps)
        } else {
            (term.lattice.clone(), vec![vec![f.space.ctx().zero(); f.space.dim()]])
        };
        for r in reps {
            let a = vec_add(&term.a, &r)?;
            let ta = vec_scale(&a, *t);
            let aa = f.space.form(&a, &ta)?;
            // (a, t'a) lies in F0; halve the trace to stay exact
            let half = aa.trace()?.div(&f.space.ctx().int(2))?;
            let c = term.coeff.mul(&psi(&(-half), cfg)?);
            terms.push(Term { coeff: c, a, b: vec_add(&term.b, &ta)?, lattice: fine.clone() });
        }
    }
    Ok(CosetCharacterFunction { space: f.space.clone(), terms })
}

pub fn weil_generator(
    g: WeilGenerator,
    f: &CosetCharacterFunction,
    cfg: &WeilConfig,
) -> Result<CosetCharacterFunction> {
    match g {
        WeilGenerator::N(t) => multiply_quadratic(f, &t, cfg),
        WeilGenerator::W => {
            let gv = Cyclo::from_int(f.p(), weil_constant(&f.space));
            Ok(fourier(f, cfg)?.scale(&gv))
        }
    }
}

#[derive(Clone, Debug)]
pub struct DualRelationReport {
    pub vol: String,
    pub gamma_v: i64,
    pub fourier_ok: bool,
    pub omega_samples: usize,
    pub omega_failures: usize,
}

impl DualRelationReport {
    pub fn passed(&self) -> bool {
        self.fourier_ok && self.omega_failures == 0
    }
}

/// `w·1_L = γ_V vol(L) 1_{L^∨}` and `ω_{L^∨} = γ_V ω_L` on sampled rs triples.
pub fn dual_relation_check(
    l: &HermitianLattice,
    samples: usize,
    seed: u64,
    cfg: &WeilConfig,
) -> Result<DualRelationReport> {
    let space = l.space().clone();
    let p = space.ctx().p();
    let gv = weil_constant(&space);
    let vol = volume(l)?;
    let lhs = weil_generator(WeilGenerator::W, &CosetCharacterFunction::indicator(l), cfg)?;
    let rhs = CosetCharacterFunction::indicator(&l.dual()?).scale(&vol.mul(&Cyclo::from_int(p, gv)));
    let fourier_ok = lhs.same_function(&rhs, cfg)?;
    let ld = l.dual()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = SampleOptions::default();
    let mut failures = 0;
    for _ in 0..samples {
        let x = random_triple(&space, &opts, &mut rng)?;
        if x.transfer_factor(&ld)? as i64 != gv * x.transfer_factor(l)? as i64 {
            failures += 1;
        }
    }
    Ok(DualRelationReport {
        vol: vol.to_string(),
        gamma_v: gv,
        fourier_ok,
        omega_samples: samples,
        omega_failures: failures,
    })
}

/// Integer combination of lattice indicators as a coset-character function.
pub fn indicator_sum(space: &Arc<HermitianSpace>, parts: &[(i64, HermitianLattice)]) -> CosetCharacterFunction {
    let p = space.ctx().p();
    let mut f = CosetCharacterFunction::zero(space.clone());
    for (c, l) in parts {
        f = f.add(&CosetCharacterFunction::indicator(l).scale(&Cyclo::from_int(p, *c)));
    }
    f
}

#[derive(Clone, Debug)]
pub struct ModularityReport {
    pub t: usize,
    pub passed: bool,
    /// `(a, b, c)` of the first surviving term of the difference, if any.
    pub first_failure: Option<String>,
}

/// `w·f_L(C) = (-q)^{-t} f_{L^∨}(C)` for a line sum on the Drinfeld plane (`t = 1`).
pub fn local_modularity_check(space: &Arc<HermitianSpace>, c: &LineSum, cfg: &WeilConfig) -> Result<ModularityReport> {
    let p = space.ctx().p();
    let q = space.ctx().q();
    let t = 1usize;
    let fz = indicator_sum(space, &f_l_function(c, CycleKind::Z, q)?);
    let fy = indicator_sum(space, &f_l_function(c, CycleKind::Y, q)?);
    let lhs = weil_generator(WeilGenerator::W, &fz, cfg)?;
    let factor = Cyclo::rational(p, BigRational::new(BigInt::from(1), BigInt::from(-q).pow(t as u32)));
    let rhs = fy.scale(&factor);
    let nf = lhs.sub(&rhs).normal_form(cfg)?;
    let first_failure = nf.first_nonzero().map(|(a, b, c)| {
        let show = |v: &Vector| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        format!("a = [{}], b = [{}], c = {}", show(a), show(b), c)
    });
    Ok(ModularityReport { t, passed: first_failure.is_none(), first_failure })
}

/// `|c|` for rational `c`, used by reports.
pub fn abs_rational(c: &Cyclo) -> Option<BigRational> {
    c.to_rational().map(|r| r.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DrinfeldPlane;
    use crate::lattices::standard_space_and_lattice;
    use crate::padic::Ctx;

    fn cfg() -> WeilConfig {
        WeilConfig::default()
    }

    #[test]
    fn cyclotomic_arithmetic() {
        let z = Cyclo::zeta_pow(3, 2, 1, 8).unwrap();
        let mut acc = Cyclo::one(3);
        for _ in 0..9 {
            acc = acc.mul(&z);
        }
        assert_eq!(acc, Cyclo::one(3));
        // Σ ζ_p^i = 0
        let mut s = Cyclo::zero(3);
        for i in 0..3 {
            s = s.add(&Cyclo::zeta_pow(3, 1, i, 8).unwrap());
        }
        assert!(s.is_zero());
        assert_eq!(z.mul(&z.conj()), Cyclo::one(3));
        // ζ_{p^2}^p = ζ_p
        let mut zp = Cyclo::one(3);
        for _ in 0..3 {
            zp = zp.mul(&z);
        }
        assert_eq!(zp, Cyclo::zeta_pow(3, 1, 1, 8).unwrap());
        assert!(matches!(Cyclo::zeta_pow(3, 9, 1, 8), Err(Error::CyclotomicDepthExceeded(9))));
    }

    #[test]
    fn fourier_of_vertex_lattices() {
        let c = Ctx::new(3).unwrap();
        for (n, t) in [(1, 0), (2, 0), (2, 1), (2, 2), (3, 1)] {
            let (_, l) = standard_space_and_lattice(c, n, t, t % 2 == 0).unwrap();
            let f = fourier(&CosetCharacterFunction::indicator(&l), &cfg()).unwrap();
            let want = CosetCharacterFunction::indicator(&l.dual().unwrap()).scale(&Cyclo::q_pow(3, -(t as i32)));
            assert!(f.same_function(&want, &cfg()).unwrap(), "n = {n}, t = {t}");
        }
    }

    #[test]
    fn double_fourier_reflects() {
        let c = Ctx::new(3).unwrap();
        let (s, l) = standard_space_and_lattice(c, 2, 1, false).unwrap();
        let a = vec![c.pi_pow(-1), c.elem(1, 2)];
        let b = vec![c.elem(2, 1).shift(-1), c.zero()];
        let f = CosetCharacterFunction::term(s, Cyclo::from_int(3, 2), a, b, l);
        let ff = fourier(&fourier(&f, &cfg()).unwrap(), &cfg()).unwrap();
        assert!(ff.same_function(&f.reflect(), &cfg()).unwrap());
        let ww =
            weil_generator(WeilGenerator::W, &weil_generator(WeilGenerator::W, &f, &cfg()).unwrap(), &cfg()).unwrap();
        assert!(ww.same_function(&f.reflect(), &cfg()).unwrap());
        assert!(!ff.same_function(&f, &cfg()).unwrap());
    }

    #[test]
    fn unipotent_action() {
        let c = Ctx::new(3).unwrap();
        let (s, l) = standard_space_and_lattice(c, 2, 1, false).unwrap();
        let one = CosetCharacterFunction::indicator(&l);
        let g = weil_generator(WeilGenerator::N(c.one()), &one, &cfg()).unwrap();
        assert!(g.same_function(&one, &cfg()).unwrap());
        let t = c.pi_pow(-1);
        let g = weil_generator(WeilGenerator::N(t), &one, &cfg()).unwrap();
        assert!(!g.same_function(&one, &cfg()).unwrap());
        let x = vec![c.one(), c.elem(0, 1)];
        let want = psi(&(t * s.form(&x, &x).unwrap()), &cfg()).unwrap();
        assert_eq!(g.eval(&x, &cfg()).unwrap(), want);
        // n(t) n(-t) = 1
        let back = weil_generator(WeilGenerator::N(-t), &g, &cfg()).unwrap();
        assert!(back.same_function(&one, &cfg()).unwrap());
    }

    #[test]
    fn plancherel() {
        let c = Ctx::new(3).unwrap();
        let (s, l) = standard_space_and_lattice(c, 2, 1, false).unwrap();
        let f = indicator_sum(&s, &[(2, l.clone()), (-1, l.scale(1))]);
        let h = weil_generator(WeilGenerator::N(c.pi_pow(-1)), &f, &cfg()).unwrap();
        for g in [f, h] {
            let a = g.norm_sq(&cfg()).unwrap();
            let b = fourier(&g, &cfg()).unwrap().norm_sq(&cfg()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn dual_relations() {
        let c = Ctx::new(3).unwrap();
        for (n, t, gv) in [(2, 0, 1), (2, 1, -1), (2, 2, 1)] {
            let (_, l) = standard_space_and_lattice(c, n, t, t % 2 == 0).unwrap();
            let r = dual_relation_check(&l, 100, 7, &cfg()).unwrap();
            assert_eq!(r.gamma_v, gv);
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn modularity_on_lines() {
        let c = Ctx::new(3).unwrap();
        let plane = DrinfeldPlane::new(c).unwrap();
        let o = plane.standard_vertex();
        let nb = plane.neighbors(&o).unwrap();
        for sum in
            [LineSum::line(o.clone()), LineSum::line(nb[0].clone()), LineSum::line(o.clone()).plus(-1, nb[1].clone())]
        {
            let r = local_modularity_check(&plane.space, &sum, &cfg()).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }
}
