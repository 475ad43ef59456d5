//! Truncated arithmetic in `Q_p` and its unramified quadratic extension `Q_p(sqrt(delta))`.
//!
//! A nonzero scalar is `p^val * (a0 + a1 sqrt(delta))` with the unit part known modulo
//! `p^prec`. Products never lose relative precision; sums lose the digits that cancel.
//! A sum whose surviving relative precision falls below [`GUARD`] is an error, never a
//! silently wrong answer.

use std::fmt;
use std::ops::{Mul, Neg};

use num_rational::Ratio;
use rand::Rng;

use crate::error::{Error, Result};

pub const GUARD: u32 = 5;
pub const DEFAULT_PREC: u32 = 40;
const VAL_INF: i32 = i32::MAX;

/// Largest `N` with `p^N` representable in a `u64`.
pub fn capacity(p: u32) -> u32 {
    let mut n = 0;
    let mut acc: u64 = 1;
    while let Some(next) = acc.checked_mul(p as u64) {
        acc = next;
        n += 1;
    }
    n
}

fn is_odd_prime(p: u32) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Smallest positive quadratic nonresidue modulo `p`.
pub fn smallest_nonresidue(p: u32) -> u32 {
    (2..p)
        .find(|&a| pow_mod(a as u64, ((p - 1) / 2) as u64, p as u64) == p as u64 - 1)
        .expect("odd primes have nonresidues")
}

pub(crate) fn pow_u64(p: u32, k: u32) -> u64 {
    (p as u64).pow(k)
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

#[inline]
fn neg_mod(a: u64, m: u64) -> u64 {
    if a % m == 0 {
        0
    } else {
        m - a % m
    }
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "inverse of a non-unit residue");
    s0.rem_euclid(m as i128) as u64
}

fn vp_u64(mut x: u64, p: u32) -> u32 {
    if x == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while x % p as u64 == 0 {
        x /= p as u64;
        v += 1;
    }
    v
}

/// Prime, working precision and the fixed nonresidue `delta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ctx {
    p: u32,
    prec: u32,
    delta: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldTag {
    F0,
    F,
}

impl Ctx {
    /// Default precision: 40 digits, or the `u64` capacity for `p` if smaller.
    pub fn new(p: u32) -> Result<Ctx> {
        if !is_odd_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ctx::with_prec(p, DEFAULT_PREC.min(capacity(p)))
    }

    pub fn with_prec(p: u32, prec: u32) -> Result<Ctx> {
        if !is_odd_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        let cap = capacity(p);
        if prec > cap {
            return Err(Error::PrecisionTooLarge { p, requested: prec, capacity: cap });
        }
        if prec <= GUARD {
            return Err(Error::Invalid(format!("precision must exceed the guard {GUARD}")));
        }
        Ok(Ctx { p, prec, delta: smallest_nonresidue(p) })
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn q(&self) -> i64 {
        self.p as i64
    }
    pub fn prec(&self) -> u32 {
        self.prec
    }
    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn zero(&self) -> PadicScalar {
        PadicScalar {
            p: self.p,
            delta: self.delta,
            nprec: self.prec,
            prec: self.prec,
            val: VAL_INF,
            a0: 0,
            a1: 0,
            ext: false,
        }
    }

    pub fn one(&self) -> PadicScalar {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> PadicScalar {
        self.from_ints(n as i128, 0, false)
    }

    /// `a0 + a1 sqrt(delta)` for integers `a0, a1`.
    pub fn elem(&self, a0: i64, a1: i64) -> PadicScalar {
        self.from_ints(a0 as i128, a1 as i128, true)
    }

    pub fn sqrt_delta(&self) -> PadicScalar {
        self.elem(0, 1)
    }

    /// `p^k`.
    pub fn pi_pow(&self, k: i32) -> PadicScalar {
        let mut x = self.one();
        x.val = k;
        x
    }

    fn from_ints(&self, x0: i128, x1: i128, ext: bool) -> PadicScalar {
        let mut z = self.zero();
        z.ext = ext;
        if x0 == 0 && x1 == 0 {
            return z;
        }
        let p = self.p as i128;
        let (mut y0, mut y1, mut v) = (x0, x1, 0);
        while y0 % p == 0 && y1 % p == 0 {
            y0 /= p;
            y1 /= p;
            v += 1;
        }
        let m = pow_u64(self.p, self.prec) as i128;
        z.val = v;
        z.a0 = y0.rem_euclid(m) as u64;
        z.a1 = y1.rem_euclid(m) as u64;
        z
    }

    /// Scalar from explicit valuation and unit digits (as in the JSON literal).
    pub fn from_parts(&self, val: i32, a0: u64, a1: u64, prec: u32, tag: FieldTag) -> Result<PadicScalar> {
        if prec > self.prec || prec <= GUARD {
            return Err(Error::Invalid(format!("literal precision {prec} outside ({GUARD}, {}]", self.prec)));
        }
        if tag == FieldTag::F0 && a1 != 0 {
            return Err(Error::NotInBaseField);
        }
        let m = pow_u64(self.p, prec);
        let (a0, a1) = (a0 % m, a1 % m);
        if a0 % self.p as u64 == 0 && a1 % self.p as u64 == 0 {
            return Err(Error::Invalid("unit part is divisible by p".into()));
        }
        let mut z = self.zero();
        z.val = val;
        z.prec = prec;
        z.a0 = a0;
        z.a1 = a1;
        z.ext = tag == FieldTag::F;
        Ok(z)
    }

    /// Uniform unit of `O_F` (or `O_{F0}` when `base` is set) with digits below `p^digits`.
    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R, digits: u32, base: bool) -> PadicScalar {
        let m = pow_u64(self.p, digits.min(self.prec)) as i64;
        loop {
            let a0 = rng.gen_range(0..m);
            let a1 = if base { 0 } else { rng.gen_range(0..m) };
            if a0 % self.p as i64 != 0 || a1 % self.p as i64 != 0 {
                return if base { self.int(a0) } else { self.elem(a0, a1) };
            }
        }
    }

    /// Random element `p^v * unit` with `v` uniform in `vals`, or zero with probability `zero_prob`.
    pub fn random_scalar<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        vals: std::ops::RangeInclusive<i32>,
        zero_prob: f64,
        base: bool,
    ) -> PadicScalar {
        if rng.gen_bool(zero_prob) {
            return self.zero();
        }
        let v = rng.gen_range(vals);
        self.pi_pow(v) * self.random_unit(rng, 2, base)
    }

    /// `xi = a / conj(a)` for a random unit `a`; `xi conj(xi) = 1`.
    pub fn norm_one_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PadicScalar {
        let a = self.random_unit(rng, 2, false);
        norm_one_from(a).expect("units are invertible")
    }

    /// Representatives of the residue field `F_{q^2}` (or `F_q` when `base`), zero first.
    pub fn residues(&self, base: bool) -> Vec<PadicScalar> {
        let p = self.p as i64;
        let mut out = Vec::new();
        for a1 in 0..(if base { 1 } else { p }) {
            for a0 in 0..p {
                out.push(if base { self.int(a0) } else { self.elem(a0, a1) });
            }
        }
        out
    }
}

/// Hilbert 90: `a / conj(a)`.
pub fn norm_one_from(a: PadicScalar) -> Result<PadicScalar> {
    Ok(a * a.conj().inv()?)
}

/// Element of `Q_p` or `Q_p(sqrt(delta))` with tracked relative precision.
#[derive(Clone, Copy, Debug)]
pub struct PadicScalar {
    p: u32,
    delta: u32,
    nprec: u32,
    prec: u32,
    val: i32,
    a0: u64,
    a1: u64,
    ext: bool,
}

impl PadicScalar {
    pub fn ctx(&self) -> Ctx {
        Ctx { p: self.p, prec: self.nprec, delta: self.delta }
    }
    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn is_zero(&self) -> bool {
        self.val == VAL_INF
    }
    /// `None` for zero.
    pub fn valuation(&self) -> Option<i32> {
        if self.is_zero() {
            None
        } else {
            Some(self.val)
        }
    }
    /// Valuation with zero mapped to `i32::MAX`.
    pub fn v(&self) -> i32 {
        self.val
    }
    pub fn prec(&self) -> u32 {
        self.prec
    }
    pub fn unit_digits(&self) -> (u64, u64) {
        (self.a0, self.a1)
    }
    pub fn field(&self) -> FieldTag {
        if self.ext {
            FieldTag::F
        } else {
            FieldTag::F0
        }
    }
    /// True iff the `sqrt(delta)` digit vanishes.
    pub fn in_base_field(&self) -> bool {
        self.a1 == 0
    }
    pub fn is_integral(&self) -> bool {
        self.val >= 0
    }
    pub fn is_unit(&self) -> bool {
        self.val == 0
    }

    fn modulus(&self) -> u64 {
        pow_u64(self.p, self.prec)
    }

    fn check_ctx(&self, o: &PadicScalar) {
        assert!(self.p == o.p && self.nprec == o.nprec, "mixed p-adic contexts");
    }

    pub fn add(&self, o: &PadicScalar) -> Result<PadicScalar> {
        self.check_ctx(o);
        if self.is_zero() {
            let mut r = *o;
            r.ext |= self.ext;
            return Ok(r);
        }
        if o.is_zero() {
            let mut r = *self;
            r.ext |= o.ext;
            return Ok(r);
        }
        let e = self.val.min(o.val);
        let abs = (self.val as i64 + self.prec as i64).min(o.val as i64 + o.prec as i64);
        let r = (abs - e as i64) as u32;
        let m = pow_u64(self.p, r);
        let shifted = |x: &PadicScalar| -> (u64, u64) {
            let d = (x.val - e) as u32;
            if d >= r {
                (0, 0)
            } else {
                let s = pow_u64(self.p, d);
                (mul_mod(x.a0 % m, s, m), mul_mod(x.a1 % m, s, m))
            }
        };
        let (s0, s1) = shifted(self);
        let (t0, t1) = shifted(o);
        let x0 = add_mod(s0, t0, m);
        let x1 = add_mod(s1, t1, m);
        let mut z = self.ctx().zero();
        z.ext = self.ext || o.ext;
        if x0 == 0 && x1 == 0 {
            return Ok(z);
        }
        let k = vp_u64(x0, self.p).min(vp_u64(x1, self.p));
        let nprec = r - k;
        if nprec < GUARD {
            return Err(Error::PrecisionExhausted);
        }
        let s = pow_u64(self.p, k);
        z.val = e + k as i32;
        z.prec = nprec;
        z.a0 = x0 / s;
        z.a1 = x1 / s;
        Ok(z)
    }

    pub fn sub(&self, o: &PadicScalar) -> Result<PadicScalar> {
        self.add(&-*o)
    }

    pub fn inv(&self) -> Result<PadicScalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = self.modulus();
        let d = self.delta as u64 % m;
        let n = add_mod(mul_mod(self.a0, self.a0, m), neg_mod(mul_mod(d, mul_mod(self.a1, self.a1, m), m), m), m);
        let ni = inv_mod(n, m);
        let mut z = *self;
        z.val = -self.val;
        z.a0 = mul_mod(self.a0, ni, m);
        z.a1 = mul_mod(neg_mod(self.a1, m), ni, m);
        Ok(z)
    }

    pub fn div(&self, o: &PadicScalar) -> Result<PadicScalar> {
        Ok(*self * o.inv()?)
    }

    pub fn conj(&self) -> PadicScalar {
        let mut z = *self;
        if !self.is_zero() {
            z.a1 = neg_mod(self.a1, self.modulus());
        }
        z
    }

    pub fn norm(&self) -> PadicScalar {
        let mut z = *self * self.conj();
        z.ext = false;
        z
    }

    pub fn trace(&self) -> Result<PadicScalar> {
        let mut z = self.add(&self.conj())?;
        z.ext = false;
        Ok(z)
    }

    /// `(-1)^v`.
    pub fn eta(&self) -> Result<i32> {
        if self.is_zero() {
            return Err(Error::ZeroArgument);
        }
        Ok(if self.val.rem_euclid(2) == 0 { 1 } else { -1 })
    }

    /// Forget all but `prec` relative digits.
    pub fn truncate(&self, prec: u32) -> PadicScalar {
        let mut z = *self;
        if !self.is_zero() && prec < self.prec {
            z.prec = prec.max(1);
            let m = pow_u64(self.p, z.prec);
            z.a0 %= m;
            z.a1 %= m;
        }
        z
    }

    /// Multiply by `p^k`.
    pub fn shift(&self, k: i32) -> PadicScalar {
        let mut z = *self;
        if !self.is_zero() {
            z.val += k;
        }
        z
    }

    /// `(q, r)` with `self = q p^k + r`, `v(q) >= 0` when `self` is integral relative to `p^k`
    /// and `r` the canonical representative with digits in `[0, p^(k - v))`.
    pub fn divrem_pk(&self, k: i32) -> Result<(PadicScalar, PadicScalar)> {
        let ctx = self.ctx();
        if self.is_zero() {
            return Ok((ctx.zero(), ctx.zero()));
        }
        if self.val >= k {
            return Ok((self.shift(-k), ctx.zero()));
        }
        let width = (k - self.val) as u32;
        if width > self.prec {
            return Err(Error::PrecisionExhausted);
        }
        let m = pow_u64(self.p, width);
        let mut r = ctx.zero();
        r.val = self.val;
        r.a0 = self.a0 % m;
        r.a1 = self.a1 % m;
        r.ext = self.ext;
        let q = self.sub(&r).map(|d| d.shift(-k)).or_else(|e| {
            // exact agreement of the first `width` digits leaves a tail that may be short
            if e == Error::PrecisionExhausted && self.prec == width {
                Ok(ctx.zero())
            } else {
                Err(e)
            }
        })?;
        Ok((q, r))
    }

    /// Equality of known digits; the relation used throughout for exact comparison.
    pub fn approx_eq(&self, o: &PadicScalar) -> bool {
        match (self.is_zero(), o.is_zero()) {
            (true, true) => return true,
            (true, false) | (false, true) => return false,
            _ => {}
        }
        if self.val != o.val {
            return false;
        }
        let m = pow_u64(self.p, self.prec.min(o.prec));
        self.a0 % m == o.a0 % m && self.a1 % m == o.a1 % m
    }

    /// Canonical key `(val, a0, a1)` used for hashing exact representatives.
    pub fn key(&self) -> (i32, u64, u64) {
        (self.val, self.a0, self.a1)
    }

    /// Nearest integer for scalars in `Z_p` with a short expansion; used in tests and reports.
    pub fn to_i64(&self) -> Option<i64> {
        if self.is_zero() {
            return Some(0);
        }
        if self.a1 != 0 || self.val < 0 {
            return None;
        }
        let m = self.modulus();
        let u = if self.a0 > m / 2 { self.a0 as i128 - m as i128 } else { self.a0 as i128 };
        let x = u.checked_mul((self.p as i128).checked_pow(self.val as u32)?)?;
        i64::try_from(x).ok()
    }

    /// The pair `(n, k)` with `self ≡ n / p^k mod Z_p`, `0 <= n < p^k`, for base-field scalars.
    pub fn polar_part(&self) -> Result<(u64, u32)> {
        if self.a1 != 0 {
            return Err(Error::NotInBaseField);
        }
        if self.is_zero() || self.val >= 0 {
            return Ok((0, 0));
        }
        let k = (-self.val) as u32;
        if k > self.prec {
            return Err(Error::PrecisionExhausted);
        }
        Ok((self.a0 % pow_u64(self.p, k), k))
    }
}

impl PartialEq for PadicScalar {
    fn eq(&self, o: &PadicScalar) -> bool {
        self.approx_eq(o)
    }
}

impl Mul for PadicScalar {
    type Output = PadicScalar;
    fn mul(self, o: PadicScalar) -> PadicScalar {
        self.check_ctx(&o);
        let mut z = self.ctx().zero();
        z.ext = self.ext || o.ext;
        if self.is_zero() || o.is_zero() {
            return z;
        }
        let prec = self.prec.min(o.prec);
        let m = pow_u64(self.p, prec);
        let (a0, a1, b0, b1) = (self.a0 % m, self.a1 % m, o.a0 % m, o.a1 % m);
        let d = self.delta as u64 % m;
        z.val = self.val + o.val;
        z.prec = prec;
        z.a0 = add_mod(mul_mod(a0, b0, m), mul_mod(d, mul_mod(a1, b1, m), m), m);
        z.a1 = add_mod(mul_mod(a0, b1, m), mul_mod(a1, b0, m), m);
        z
    }
}

impl Neg for PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        let mut z = self;
        if !self.is_zero() {
            let m = self.modulus();
            z.a0 = neg_mod(self.a0, m);
            z.a1 = neg_mod(self.a1, m);
        }
        z
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.a1 == 0 {
            write!(f, "{}^{}*({})", self.p, self.val, self.a0)
        } else {
            write!(f, "{}^{}*({}+{}r)", self.p, self.val, self.a0, self.a1)
        }
    }
}

/// An exact real number `r log q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct LogMultiple(pub Ratio<i64>);

impl LogMultiple {
    pub fn zero() -> LogMultiple {
        LogMultiple(Ratio::from_integer(0))
    }
    pub fn from_int(n: i64) -> LogMultiple {
        LogMultiple(Ratio::from_integer(n))
    }
    pub fn new(num: i64, den: i64) -> LogMultiple {
        LogMultiple(Ratio::new(num, den))
    }
    pub fn coeff(&self) -> Ratio<i64> {
        self.0
    }
    pub fn scale(&self, r: Ratio<i64>) -> LogMultiple {
        LogMultiple(self.0 * r)
    }
}

impl std::ops::Add for LogMultiple {
    type Output = LogMultiple;
    fn add(self, o: LogMultiple) -> LogMultiple {
        LogMultiple(self.0 + o.0)
    }
}

impl std::ops::Sub for LogMultiple {
    type Output = LogMultiple;
    fn sub(self, o: LogMultiple) -> LogMultiple {
        LogMultiple(self.0 - o.0)
    }
}

impl Neg for LogMultiple {
    type Output = LogMultiple;
    fn neg(self) -> LogMultiple {
        LogMultiple(-self.0)
    }
}

impl fmt::Display for LogMultiple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}
