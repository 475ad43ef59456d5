//! Intersection-matrix oracle for the Drinfeld plane. A special cycle is its horizontal part,
//! which meets `P_{L_u}` once, plus `Σ_L m(u, L) P_L`. Lines pair as `(P_L, P_L) = -(q + 1)`, and
//! adjacent lines pair to `1`.

use padic_transfer_core::geometry::{BTVertex, CycleKind, DrinfeldPlane};
use padic_transfer_core::linalg::vec_scale;
use padic_transfer_core::padic::PadicScalar;
use padic_transfer_core::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `max{r ≥ 0 : ϖ^{-r} u ∈ L^∨}` when `u ∈ L`.
pub fn membership_multiplicity(plane: &DrinfeldPlane, u: &[PadicScalar], l: &BTVertex) -> Result<i64> {
    if !l.lattice.contains(u)? {
        return Ok(0);
    }
    let m = l.lattice.dual()?;
    let mut r = 0;
    while m.contains(&vec_scale(u, plane.ctx().pi_pow(-r)))? {
        r += 1;
    }
    Ok((r - 1).max(0) as i64)
}

fn multiplicity(plane: &DrinfeldPlane, kind: CycleKind, u: &[PadicScalar], l: &BTVertex) -> Result<i64> {
    match kind {
        CycleKind::Z => membership_multiplicity(plane, u, l),
        CycleKind::Y => plane.y_multiplicity(u, l),
    }
}

/// `(C(u), P_L)` expanded through the intersection matrix.
pub fn pairing_oracle(plane: &DrinfeldPlane, kind: CycleKind, u: &[PadicScalar], l: &BTVertex) -> Result<i64> {
    let q = plane.q();
    let mut total = -(q + 1) * multiplicity(plane, kind, u, l)?;
    for nb in plane.neighbors(l)? {
        total += multiplicity(plane, kind, u, &nb)?;
    }
    if plane.central_lattice(u)? == *l {
        total += 1;
    }
    Ok(total)
}

#[derive(Debug, Default)]
pub struct BatteryReport {
    pub checks: usize,
    pub failures: Vec<String>,
}

/// For each `m` and sampled `u` with `v((u, u)) = m`, check every vertex within distance `m + 2`
/// of `L_u`. Each vertex gets four checks:
/// - membership against the distance formula;
/// - the chain `m ≤ m^∨ ≤ m(ϖu)`;
/// - the difference identity;
/// - both pairings against the oracle.
pub fn drinfeld_battery(p: u32, ms: std::ops::RangeInclusive<i32>, per_m: usize, seed: u64) -> Result<BatteryReport> {
    let plane = DrinfeldPlane::new(padic_transfer_core::padic::Ctx::new(p)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = BatteryReport::default();
    for m in ms {
        for s in 0..per_m {
            let u = plane.vector_with_norm_valuation(m, &mut rng)?;
            let pu = vec_scale(&u, plane.ctx().pi_pow(1));
            let lu = plane.central_lattice(&u)?;
            let mut fail = |what: String| rep.failures.push(format!("m={m} sample={s}: {what}"));
            if lu.vtype as i32 != 2 * m.rem_euclid(2) {
                fail(format!("central lattice has type {}", lu.vtype));
            }
            if plane.central_lattice(&pu)? != lu {
                fail("central lattice moves under u ↦ ϖu".into());
            }
            for (l, d) in plane.ball(&lu, (m + 2) as usize)? {
                rep.checks += 1;
                if plane.tree_distance(&lu, &l)? != d {
                    fail(format!("distance {d} not reproduced"));
                }
                let zm = membership_multiplicity(&plane, &u, &l)?;
                match plane.z_multiplicity(&u, &l) {
                    Ok(z) if z == zm => {}
                    other => fail(format!("z multiplicity {other:?} vs membership {zm} at d={d}")),
                }
                let ym = plane.y_multiplicity(&u, &l)?;
                let zp = membership_multiplicity(&plane, &pu, &l)?;
                if !(zm <= ym && ym <= zp) {
                    fail(format!("chain {zm} ≤ {ym} ≤ {zp} fails at d={d}"));
                }
                if l.lattice.contains(&u)? && zp - zm != 1 {
                    fail(format!("difference {} at d={d}", zp - zm));
                }
                for kind in [CycleKind::Z, CycleKind::Y] {
                    let want = pairing_oracle(&plane, kind, &u, &l)?;
                    let got = plane.pairing_with_line(kind, &u, &l)?;
                    if got != want {
                        fail(format!("{kind:?} pairing {got} vs oracle {want} at d={d}, type {}", l.vtype));
                    }
                }
            }
        }
    }
    Ok(rep)
}
