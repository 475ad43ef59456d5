//! Seeded campaigns. Every case draws from its own sub-seed, so one failing row can be replayed
//! alone, and cases run on worker threads but report in case order.

use num_rational::Ratio;
use padic_transfer_core::cayley::{
    cayley_symmetric, cayley_unitary_twisted, is_integral_element, norm_one_classes, symmetric_bridge_residuals,
    unitary_bridge_residuals, BlockDecomposition,
};
use padic_transfer_core::geometry::{int_z_maxorder, random_maxorder_sample, z_length_rank1, CycleKind, DrinfeldPlane};
use padic_transfer_core::lattices::standard_space_and_lattice;
use padic_transfer_core::linalg::{vec_scale, Mat};
use padic_transfer_core::orbital::{
    orb_symmetric, orb_unitary, q_valuation_symmetric, reduced_symmetric_test_function, split_lattice,
    SymmetricTestFunction, UnitaryTestFunction,
};
use padic_transfer_core::orbits::{
    gamma_from, random_integral_matrix, random_matching_pair, random_unitary, SymTriple, UnitaryPair,
};
use padic_transfer_core::padic::{Ctx, PadicScalar};
use padic_transfer_core::Error;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encode::vector_json;
use crate::report::{CampaignConfig, Report, Row, Status};
use crate::{CliError, CliResult};

/// What one case checked. `residual` is exactly zero iff the identity held.
pub struct CaseOutcome {
    pub input: String,
    pub lhs: String,
    pub rhs: String,
    pub residual: Ratio<i64>,
    pub detail: String,
}

impl CaseOutcome {
    fn new(input: String, lhs: String, rhs: String, residual: Ratio<i64>) -> CaseOutcome {
        CaseOutcome { input, lhs, rhs, residual, detail: String::new() }
    }
}

/// Sub-seeds `0..count` drawn from the campaign seed.
pub fn sub_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.next_u64()).collect()
}

/// Run `count` cases concurrently and collect rows in case order.
pub fn run_cases<F>(cfg: &CampaignConfig, count: usize, case: F) -> Report
where
    F: Fn(usize, u64) -> CliResult<CaseOutcome> + Sync,
{
    let seeds = sub_seeds(cfg.seed, count);
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(count.max(1));
    let mut rows: Vec<Row> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let (seeds, case) = (&seeds, &case);
                scope.spawn(move || {
                    (w..count).step_by(workers).map(|i| to_row(i, seeds[i], case(i, seeds[i]))).collect::<Vec<Row>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("case worker panicked")).collect()
    });
    rows.sort_by_key(|r| r.case);
    Report::new(cfg.clone(), rows)
}

fn to_row(case: usize, sub_seed: u64, out: CliResult<CaseOutcome>) -> Row {
    match out {
        Ok(o) => Row {
            case,
            sub_seed,
            status: if o.residual == Ratio::from_integer(0) { Status::Pass } else { Status::Fail },
            input: o.input,
            lhs: o.lhs,
            rhs: o.rhs,
            residual: o.residual.to_string(),
            detail: o.detail,
        },
        Err(e) => Row {
            case,
            sub_seed,
            status: Status::Error,
            input: String::new(),
            lhs: String::new(),
            rhs: String::new(),
            residual: "n/a".into(),
            detail: e.to_string(),
        },
    }
}

fn int(n: i64) -> Ratio<i64> {
    Ratio::from_integer(n)
}

fn abs(r: Ratio<i64>) -> Ratio<i64> {
    if r < int(0) {
        -r
    } else {
        r
    }
}

#[derive(Clone, Debug)]
pub struct TransferParams {
    pub n: usize,
    pub t: usize,
    pub samples: usize,
    /// Check the group version through its Cayley reductions instead.
    pub group: bool,
    /// Resample until the orbit lives on the nearby space.
    pub nearby_only: bool,
}

/// `Orb_S = Orb_U` on matching orbits (for `L` and for `L^∨`) and `Orb_S = 0` on nearby orbits.
pub fn transfer_check(ctx: Ctx, cfg: &CampaignConfig, tp: &TransferParams) -> CliResult<Report> {
    if tp.group && tp.n < 2 {
        return Err(CliError::Input("the group version needs n >= 2".into()));
    }
    standard_space_and_lattice(ctx, tp.n, tp.t, tp.t % 2 == 0)?;
    Ok(run_cases(cfg, tp.samples, |_, seed| {
        if tp.group {
            group_case(ctx, cfg.budget, tp, seed)
        } else {
            transfer_case(ctx, cfg.budget, tp, seed)
        }
    }))
}

fn transfer_case(ctx: Ctx, budget: usize, tp: &TransferParams, seed: u64) -> CliResult<CaseOutcome> {
    let mut s = random_matching_pair(ctx, tp.n, tp.t, seed)?;
    if tp.nearby_only {
        let mut k = 1u64;
        while s.in_v {
            if k > 10_000 {
                return Err(Error::RetryBudgetExceeded.into());
            }
            s = random_matching_pair(ctx, tp.n, tp.t, seed.wrapping_add(k))?;
            k += 1;
        }
    }
    let ld = s.lattice.dual()?;
    let os = orb_symmetric(&s.triple, &SymmetricTestFunction::std(&s.lattice)?, budget)?.value0();
    let fd = SymmetricTestFunction::std_dual(&s.lattice)?.with_omega(&ld);
    let osd = orb_symmetric(&s.triple, &fd, budget)?.value0();
    let (ou, oud, rhs) = if s.in_v {
        let ou = orb_unitary(&s.pair, &UnitaryTestFunction::std(tp.t), budget)?;
        let oud = orb_unitary(&s.pair, &UnitaryTestFunction::std_dual(tp.t), budget)?;
        (ou, oud, format!("Orb_U: L {ou}, L^∨ {oud}"))
    } else {
        (0, 0, "nearby space: 0, 0".to_string())
    };
    let input = format!(
        "n={} t={} v(q)={} space={}",
        tp.n,
        tp.t,
        q_valuation_symmetric(&s.triple)?,
        if s.in_v { "V" } else { "nearby" }
    );
    let lhs = format!("Orb_S: L {os}, L^∨ {osd}");
    Ok(CaseOutcome::new(input, lhs, rhs, int((os - ou).abs() + (osd - oud).abs())))
}

/// Admissible twists for `d`: norm-one classes `ξ` with `1 - ξd` a unit.
fn admissible_twists(ctx: Ctx, d: PadicScalar) -> CliResult<Vec<PadicScalar>> {
    let mut out = Vec::new();
    for xi in norm_one_classes(ctx) {
        if ctx.one().sub(&(xi * d))?.is_unit() {
            out.push(xi);
        }
    }
    Ok(out)
}

fn nonzero_count(rs: &[PadicScalar]) -> i64 {
    rs.iter().filter(|r| !r.is_zero()).count() as i64
}

/// Group version: every admissible twist `ξ` reduces `γ'` (resp. `g'`) to an orbit with the same
/// orbital integral, and the bridge identities of each Cayley image vanish.
fn group_case(ctx: Ctx, budget: usize, tp: &TransferParams, seed: u64) -> CliResult<CaseOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (s, l) = standard_space_and_lattice(ctx, tp.n, tp.t, tp.t % 2 == 0)?;
    let dec = BlockDecomposition::new(s.clone())?;
    let (flat, lam) = split_lattice(&l, &dec)?;
    let fs = reduced_symmetric_test_function(&l, &dec)?;
    let tflat = flat.vertex_type()?.ok_or_else(|| CliError::Input("flat part is not a vertex lattice".into()))?;
    let fu = UnitaryTestFunction { t: tflat, u_in: Some(-lam), u_in_dual: Some(dec.ee.v() + lam) };
    let mut mismatches = 0i64;

    let mut sym = None;
    for _ in 0..500 {
        let unimodular = rng.gen_bool(0.8);
        let gp = gamma_from(&random_integral_matrix(ctx, tp.n, &mut rng, unimodular))?;
        if !is_integral_element(&gp)? {
            continue;
        }
        let mut values = Vec::new();
        for xi in admissible_twists(ctx, dec.blocks(&gp).3)? {
            let img = match cayley_symmetric(&gp.scale(xi), &dec, None) {
                Ok(img) => img,
                Err(Error::BadTwist | Error::NotIntegral) => continue,
                Err(e) => return Err(e.into()),
            };
            if !is_integral_element(&img.raw.x)? {
                continue;
            }
            mismatches += nonzero_count(&symmetric_bridge_residuals(&img)?);
            let triple = img.triple(&dec.flat)?;
            if !triple.is_rs()? {
                continue;
            }
            values.push(orb_symmetric(&triple, &fs, budget)?.signed());
        }
        if values.len() >= 2 {
            mismatches += values.iter().filter(|v| **v != values[0]).count() as i64;
            sym = Some((values.len(), values[0].clone()));
            break;
        }
    }

    let mut uni = None;
    for _ in 0..500 {
        let g = random_unitary(&s, &mut rng)?;
        if !is_integral_element(&g)? {
            continue;
        }
        let mut values = Vec::new();
        for xi in admissible_twists(ctx, dec.blocks(&g).3)? {
            let img = cayley_unitary_twisted(&g, xi, &dec)?;
            mismatches += nonzero_count(&unitary_bridge_residuals(&img, &dec)?);
            let pair = UnitaryPair::new(dec.flat.clone(), img.x, img.b1)?;
            if !pair.is_rs()? {
                continue;
            }
            values.push(orb_unitary(&pair, &fu, budget)?);
        }
        if values.len() >= 2 {
            mismatches += values.iter().filter(|v| **v != values[0]).count() as i64;
            uni = Some((values.len(), values[0]));
            break;
        }
    }

    let (Some((ns, vs)), Some((nu, vu))) = (sym, uni) else {
        return Err(Error::RetryBudgetExceeded.into());
    };
    Ok(CaseOutcome::new(
        format!("n={} t={} twists: {ns} symmetric, {nu} unitary", tp.n, tp.t),
        format!("Orb(γ') {vs:?}"),
        format!("Orb(g') {vu}"),
        int(mismatches),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Regime {
    Rank1,
    Maxorder,
    Drinfeld,
}

#[derive(Clone, Debug)]
pub struct AtcParams {
    pub regime: Regime,
    pub n: usize,
    /// `None` runs every type.
    pub t: Option<usize>,
    pub samples: usize,
    pub window: (i32, i32),
    pub max_m: i32,
}

pub fn atc_check(ctx: Ctx, cfg: &CampaignConfig, ap: &AtcParams) -> CliResult<Report> {
    match ap.regime {
        Regime::Rank1 => {
            let ts: Vec<i32> = match ap.t {
                Some(t) if t <= 1 => vec![t as i32],
                Some(t) => return Err(CliError::Input(format!("rank-one type must be 0 or 1, got {t}"))),
                None => vec![0, 1],
            };
            let mut grid = Vec::new();
            for &t0 in &ts {
                for v in ap.window.0..=ap.window.1 {
                    for vb in [-1, 0, 2] {
                        grid.push((t0, v, vb));
                    }
                }
            }
            Ok(run_cases(cfg, grid.len(), |i, _| rank1_case(ctx, cfg.budget, grid[i])))
        }
        Regime::Maxorder => {
            let ts: Vec<usize> = ap.t.map(|t| vec![t]).unwrap_or_else(|| (0..=ap.n).collect());
            let grid: Vec<usize> = ts.iter().flat_map(|&t| std::iter::repeat_n(t, ap.samples)).collect();
            Ok(run_cases(cfg, grid.len(), |i, seed| maxorder_case(ctx, cfg.budget, ap, grid[i], i, seed)))
        }
        Regime::Drinfeld => {
            let grid: Vec<i32> = (0..=ap.max_m).flat_map(|m| std::iter::repeat_n(m, ap.samples)).collect();
            Ok(run_cases(cfg, grid.len(), |i, seed| drinfeld_case(ctx, grid[i], seed)))
        }
    }
}

/// `Orb` against the indicator formula, and `∂Orb = -max{0, (v - t0 + 1)/2} log q` in the
/// opposite parity.
fn rank1_case(ctx: Ctx, budget: usize, (t0, v, vb): (i32, i32, i32)) -> CliResult<CaseOutcome> {
    let (s, l) = standard_space_and_lattice(ctx, 1, t0 as usize, t0 == 0)?;
    let x = SymTriple::new(s, Mat::identity(ctx, 1), vec![ctx.pi_pow(vb)], vec![ctx.pi_pow(v - vb)])?;
    let o = orb_symmetric(&x, &SymmetricTestFunction::std(&l)?, budget)?;
    let input = format!("t0={t0} v(cb)={v} v(b)={vb}");
    if (v - t0).rem_euclid(2) == 0 {
        let want = (v >= t0) as i64;
        let got = o.value0();
        Ok(CaseOutcome::new(input, format!("Orb {got}"), format!("indicator {want}"), int(got - want)))
    } else {
        let k = z_length_rank1(t0 as u32, v)?;
        let d = o.derivative0();
        let residual = abs(d.coeff() + int(k)) + int(o.value0().abs());
        Ok(CaseOutcome::new(input, format!("Orb {}, ∂Orb {d} log q", o.value0()), format!("-{k} log q"), residual))
    }
}

/// `∂Orb(f_std) = -Int^Z` and `∂Orb(f'_std) = -(-1)^t Int^Z` after dual rescaling.
fn maxorder_case(ctx: Ctx, budget: usize, ap: &AtcParams, t: usize, i: usize, seed: u64) -> CliResult<CaseOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = random_maxorder_sample(ctx, ap.n, t, ap.window.0..=ap.window.1, i % 2 == 1, &mut rng)?;
    let o = orb_symmetric(&s.triple, &SymmetricTestFunction::std(&s.lattice)?, budget)?;
    let od = orb_symmetric(&s.triple, &SymmetricTestFunction::std_dual(&s.lattice)?, budget)?;
    let iz = int_z_maxorder(&s.dec)?;
    let iy = int_z_maxorder(&s.dec.dual_rescale())?;
    let sg = if t % 2 == 0 { 1 } else { -1 };
    let (dz, dy) = (o.derivative0(), od.derivative0());
    let residual = abs(dz.coeff() + int(iz)) + abs(dy.coeff() + int(sg * iy));
    Ok(CaseOutcome::new(
        format!("n={} t={t} w={:?}", ap.n, s.w_vals),
        format!("∂Orb {dz}, ∂Orb' {dy}"),
        format!("-Int^Z {}, -(-1)^t Int^Y {}", -iz, -sg * iy),
        residual,
    ))
}

/// Over the ball of radius `m + 2` around `L_u`: the two multiplicity definitions agree, the
/// chain `m ≤ m^∨ ≤ m(ϖu)` and the difference identity hold, and the pairing table matches the
/// intersection-matrix expansion.
fn drinfeld_case(ctx: Ctx, m: i32, seed: u64) -> CliResult<CaseOutcome> {
    let plane = DrinfeldPlane::new(ctx)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = plane.vector_with_norm_valuation(m, &mut rng)?;
    let pu = vec_scale(&u, ctx.pi_pow(1));
    let lu = plane.central_lattice(&u)?;
    let ball = plane.ball(&lu, (m + 2) as usize)?;
    let mut failures = 0i64;
    let mut first = String::new();
    let mut note = |d: usize, what: &str| {
        failures += 1;
        if first.is_empty() {
            first = format!("{what} at distance {d}");
        }
    };
    for (l, d) in &ball {
        let z = match plane.z_multiplicity(&u, l) {
            Ok(z) => z,
            Err(_) => {
                note(*d, "multiplicity definitions disagree");
                continue;
            }
        };
        let y = plane.y_multiplicity(&u, l)?;
        let zp = plane.z_multiplicity(&pu, l)?;
        if !(z <= y && y <= zp) {
            note(*d, "inclusion chain");
        }
        if l.lattice.contains(&u)? && zp - z != 1 {
            note(*d, "difference identity");
        }
        for kind in [CycleKind::Z, CycleKind::Y] {
            if plane.pairing_with_line(kind, &u, l)? != plane.pairing_from_multiplicities(kind, &u, l)? {
                note(*d, "pairing table");
            }
        }
    }
    let mut out = CaseOutcome::new(
        format!("m={m} u={} L_u type {}", vector_json(&u), lu.vtype),
        format!("{} vertices", ball.len()),
        "all checks hold".into(),
        int(failures),
    );
    out.detail = first;
    Ok(out)
}
