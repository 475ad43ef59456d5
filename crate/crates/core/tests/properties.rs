mod common;

use common::weil::{random_term, random_vector};
use padic_transfer_core::lattices::{standard_space_and_lattice, HermitianLattice};
use padic_transfer_core::linalg::Mat;
use padic_transfer_core::padic::Ctx;
use padic_transfer_core::weil::{fourier, Cyclo, WeilConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A full-rank lattice spanned by a random matrix with entries of valuation in `[-1, 2]`.
fn random_lattice(seed: u64, n: usize, t: usize) -> HermitianLattice {
    let c = Ctx::new(3).unwrap();
    let (s, _) = standard_space_and_lattice(c, n, t, t % 2 == 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let rows = (0..n).map(|_| random_vector(c, n, -1..=2, &mut rng)).collect();
        let m = Mat::from_rows(rows).unwrap();
        if !m.det().unwrap().is_zero() {
            return HermitianLattice::new(s, &m).unwrap();
        }
    }
}

fn random_cyclo(p: u32, rng: &mut ChaCha8Rng) -> Cyclo {
    let mut acc = Cyclo::zero(p);
    for _ in 0..3 {
        let k = rng.gen_range(0..=2);
        let z = Cyclo::zeta_pow(p, k, rng.gen_range(0..100), 4).unwrap();
        acc = acc.add(&z.mul(&Cyclo::from_int(p, rng.gen_range(-3..=3))));
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn double_dual_is_identity(seed in any::<u64>(), n in 1usize..=3, t in 0usize..=3) {
        let t = t.min(n);
        let l = random_lattice(seed, n, t);
        prop_assert_eq!(l.dual().unwrap().dual().unwrap(), l);
    }

    #[test]
    fn duality_reverses_inclusion(seed in any::<u64>(), t in 0usize..=2) {
        let a = random_lattice(seed, 2, t);
        let b = random_lattice(seed ^ 0x9e37_79b9, 2, t);
        let (lo, hi) = (a.intersect(&b).unwrap(), a.sum(&b).unwrap());
        prop_assert!(hi.contains_lattice(&lo).unwrap());
        prop_assert!(lo.dual().unwrap().contains_lattice(&hi.dual().unwrap()).unwrap());
        // [L^∨ : M^∨] = [M : L]
        prop_assert_eq!(hi.relative_index(&lo), lo.dual().unwrap().relative_index(&hi.dual().unwrap()));
    }

    #[test]
    fn relative_index_is_additive(seed in any::<u64>()) {
        let a = random_lattice(seed, 2, 1);
        let b = random_lattice(seed.wrapping_add(1), 2, 1);
        let c = random_lattice(seed.wrapping_add(2), 2, 1);
        prop_assert_eq!(a.relative_index(&c), a.relative_index(&b) + b.relative_index(&c));
        // O_F-length: [L : ϖL] = rank
        prop_assert_eq!(a.scale(1).relative_index(&a), 2);
    }

    #[test]
    fn cyclotomic_ring_laws(seed in any::<u64>(), p in prop::sample::select(vec![3u32, 5])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (random_cyclo(p, &mut rng), random_cyclo(p, &mut rng), random_cyclo(p, &mut rng));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
        prop_assert!(a.sub(&a).is_zero());
        // a·conj(a) is a nonnegative real
        let (re, im) = a.mul(&a.conj()).to_complex();
        prop_assert!(im.abs() < 1e-9 && re > -1e-9);
    }

    #[test]
    fn fourier_is_linear(seed in any::<u64>()) {
        let c = Ctx::new(3).unwrap();
        let (_, l) = standard_space_and_lattice(c, 2, 1, false).unwrap();
        let cfg = WeilConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_term(&l, &mut rng).unwrap();
        let g = random_term(&l, &mut rng).unwrap();
        let k = Cyclo::from_int(3, rng.gen_range(-4..=4));
        let lhs = fourier(&f.scale(&k).add(&g), &cfg).unwrap();
        let rhs = fourier(&f, &cfg).unwrap().scale(&k).add(&fourier(&g, &cfg).unwrap());
        prop_assert!(lhs.same_function(&rhs, &cfg).unwrap());
    }
}
