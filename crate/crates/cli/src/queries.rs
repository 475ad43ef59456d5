//! One-shot JSON queries. Each takes a parsed JSON object and returns JSON (or DOT text),
//! together with whether every identity it checked held.

use std::collections::BTreeMap;
use std::sync::Arc;

use padic_transfer_core::cayley::{
    cayley_symmetric, cayley_unitary_twisted, find_twist, symmetric_bridge_residuals, unitary_bridge_residuals,
    BlockDecomposition,
};
use padic_transfer_core::geometry::{ball_dot, BTVertex, CycleKind, DrinfeldPlane, LineSum};
use padic_transfer_core::lattices::{HermitianLattice, HermitianSpace};
use padic_transfer_core::orbital::{orb_symmetric, orb_unitary, SymmetricTestFunction, UnitaryTestFunction};
use padic_transfer_core::orbits::{SymTriple, UnitaryPair};
use padic_transfer_core::padic::{Ctx, PadicScalar};
use padic_transfer_core::weil::{
    dual_relation_check, fourier, local_modularity_check, CosetCharacterFunction, WeilConfig,
};
use serde_json::{json, Value};

use crate::encode::{
    field, lattice_json, matrix_json, parse_matrix, parse_scalar, parse_vector, scalar_json, vector_json,
};
use crate::{CliError, CliResult};

pub enum QueryOutput {
    Json { value: Value, ok: bool },
    Text(String),
}

fn ok(value: Value) -> CliResult<QueryOutput> {
    Ok(QueryOutput::Json { value, ok: true })
}

fn str_field<'a>(v: &'a Value, key: &str) -> CliResult<&'a str> {
    field(v, key)?.as_str().ok_or_else(|| CliError::Input(format!("field {key:?} must be a string")))
}

fn usize_field(v: &Value, key: &str) -> CliResult<usize> {
    field(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| CliError::Input(format!("field {key:?} must be a non-negative integer")))
}

fn space(ctx: Ctx, v: &Value) -> CliResult<Arc<HermitianSpace>> {
    Ok(HermitianSpace::new(parse_matrix(ctx, field(v, "gram")?)?)?)
}

/// `"lattice"` as a basis (generators as columns); the standard lattice when absent.
fn lattice(ctx: Ctx, s: &Arc<HermitianSpace>, v: &Value) -> CliResult<HermitianLattice> {
    match v.get("lattice") {
        Some(b) => Ok(HermitianLattice::new(s.clone(), &parse_matrix(ctx, field(b, "basis").unwrap_or(b))?)?),
        None => Ok(HermitianLattice::standard(s.clone())),
    }
}

fn vertex_type(l: &HermitianLattice) -> CliResult<usize> {
    l.vertex_type()?.ok_or_else(|| CliError::Input("the lattice is not a vertex lattice".into()))
}

fn triple(ctx: Ctx, s: &Arc<HermitianSpace>, e: &Value) -> CliResult<SymTriple> {
    Ok(SymTriple::new(
        s.clone(),
        parse_matrix(ctx, field(e, "gamma")?)?,
        parse_vector(ctx, field(e, "u1")?)?,
        parse_vector(ctx, field(e, "u2")?)?,
    )?)
}

fn pair(ctx: Ctx, s: &Arc<HermitianSpace>, e: &Value) -> CliResult<UnitaryPair> {
    Ok(UnitaryPair::new(s.clone(), parse_matrix(ctx, field(e, "g")?)?, parse_vector(ctx, field(e, "u")?)?)?)
}

fn dual_testfn(v: &Value) -> CliResult<bool> {
    match v.get("testfn").and_then(Value::as_str).unwrap_or("std") {
        "std" => Ok(false),
        "std_dual" => Ok(true),
        other => Err(CliError::Input(format!("unknown test function {other:?}"))),
    }
}

/// `orb` and `dorb`: orbital integral of one element against `std` or `std_dual` of `L`.
pub fn orb_query(ctx: Ctx, budget: usize, v: &Value, derivative: bool) -> CliResult<QueryOutput> {
    let s = space(ctx, v)?;
    let l = lattice(ctx, &s, v)?;
    let dual = dual_testfn(v)?;
    let e = field(v, "element")?;
    match str_field(v, "side")? {
        "symmetric" => {
            let x = triple(ctx, &s, e)?;
            let mut f = if dual { SymmetricTestFunction::std_dual(&l)? } else { SymmetricTestFunction::std(&l)? };
            match v.get("omega").and_then(Value::as_str).unwrap_or("L") {
                "L" => {}
                "dual" => f = f.with_omega(&l.dual()?),
                other => return Err(CliError::Input(format!("omega must be \"L\" or \"dual\", got {other:?}"))),
            }
            let o = orb_symmetric(&x, &f, budget)?;
            let d = o.derivative0();
            if derivative {
                return ok(json!({ "dvalue0_logq": d.to_string() }));
            }
            let coeffs: BTreeMap<String, i64> = o.coeffs.iter().map(|(a, c)| (a.to_string(), *c)).collect();
            ok(json!({
                "coeffs": coeffs,
                "omega": o.omega,
                "value0": o.value0(),
                "dvalue0_logq": d.to_string(),
            }))
        }
        "unitary" => {
            if derivative {
                return Err(CliError::Input("the derivative is only defined on the symmetric side".into()));
            }
            let y = pair(ctx, &s, e)?;
            let t = vertex_type(&l)?;
            if l != HermitianLattice::standard(s.clone()) {
                return Err(CliError::Input("unitary test functions use the standard lattice".into()));
            }
            let f = if dual { UnitaryTestFunction::std_dual(t) } else { UnitaryTestFunction::std(t) };
            ok(json!({ "value0": orb_unitary(&y, &f, budget)? }))
        }
        other => Err(CliError::Input(format!("side must be \"symmetric\" or \"unitary\", got {other:?}"))),
    }
}

/// Invariants of a triple and its matching unitary pair.
pub fn match_query(ctx: Ctx, v: &Value) -> CliResult<QueryOutput> {
    let s = space(ctx, v)?;
    let x = triple(ctx, &s, field(v, "element")?)?;
    let rs = x.is_rs()?;
    let inv = x.invariants()?;
    let mut out = json!({
        "rs": rs,
        "invariants": { "char_poly": vector_json(&inv.char_poly), "moments": vector_json(&inv.moments) },
    });
    if rs {
        let y = x.matching_pair()?;
        out["matching_space"] = json!({ "split": y.space.is_split(), "gram": matrix_json(y.space.gram()) });
        out["pair"] = json!({ "g": matrix_json(&y.g), "u": vector_json(&y.u) });
        out["in_v"] = json!(y.space.is_split() == s.is_split());
    }
    ok(out)
}

/// Cayley image of a group element along the last basis vector, with its bridge residuals.
pub fn cayley_query(ctx: Ctx, v: &Value) -> CliResult<QueryOutput> {
    let s = space(ctx, v)?;
    let dec = BlockDecomposition::new(s)?;
    let m = parse_matrix(ctx, field(v, "element")?)?;
    let d = dec.blocks(&m).3;
    let xi: PadicScalar = match v.get("xi") {
        Some(x) => parse_scalar(ctx, x)?,
        None => find_twist(d)?,
    };
    let (value, residuals) = match str_field(v, "side")? {
        "symmetric" => {
            let img = cayley_symmetric(&m.scale(xi), &dec, None)?;
            let r = symmetric_bridge_residuals(&img)?;
            (json!({ "gamma": matrix_json(&img.raw.x), "b": vector_json(&img.b2), "c": vector_json(&img.c2) }), r)
        }
        "unitary" => {
            let img = cayley_unitary_twisted(&m, xi, &dec)?;
            let r = unitary_bridge_residuals(&img, &dec)?;
            (json!({ "g": matrix_json(&img.x), "u": vector_json(&img.b1) }), r)
        }
        other => return Err(CliError::Input(format!("side must be \"symmetric\" or \"unitary\", got {other:?}"))),
    };
    let good = residuals.iter().all(PadicScalar::is_zero);
    Ok(QueryOutput::Json {
        value: json!({ "xi": scalar_json(&xi), "image": value, "residuals": vector_json(&residuals) }),
        ok: good,
    })
}

fn vertex(ctx: Ctx, plane: &DrinfeldPlane, v: &Value) -> CliResult<BTVertex> {
    let b = field(v, "basis").unwrap_or(v);
    Ok(plane.vertex(HermitianLattice::new(plane.space.clone(), &parse_matrix(ctx, b)?)?)?)
}

fn cycle_kind(v: &Value) -> CliResult<CycleKind> {
    match v.get("kind").and_then(Value::as_str).unwrap_or("Z") {
        "Z" => Ok(CycleKind::Z),
        "Y" => Ok(CycleKind::Y),
        other => Err(CliError::Input(format!("kind must be \"Z\" or \"Y\", got {other:?}"))),
    }
}

fn vertex_json(v: &BTVertex) -> Value {
    json!({ "type": v.vtype, "basis": matrix_json(v.lattice.basis()) })
}

/// Queries on the tree of the split hermitian plane with Gram `I`.
pub fn tree_query(ctx: Ctx, budget: usize, v: &Value) -> CliResult<QueryOutput> {
    let mut plane = DrinfeldPlane::new(ctx)?;
    plane.budget = budget;
    match str_field(v, "query")? {
        "central-lattice" => {
            let u = parse_vector(ctx, field(v, "u")?)?;
            ok(
                json!({ "vertex": vertex_json(&plane.central_lattice(&u)?), "norm_valuation": plane.norm_valuation(&u)? }),
            )
        }
        "distance" => {
            let a = vertex(ctx, &plane, field(v, "a")?)?;
            let b = vertex(ctx, &plane, field(v, "b")?)?;
            ok(json!({ "distance": plane.tree_distance(&a, &b)? }))
        }
        "multiplicity" => {
            let u = parse_vector(ctx, field(v, "u")?)?;
            let l = vertex(ctx, &plane, field(v, "vertex")?)?;
            let m = match cycle_kind(v)? {
                CycleKind::Z => plane.z_multiplicity(&u, &l)?,
                CycleKind::Y => plane.y_multiplicity(&u, &l)?,
            };
            ok(json!({ "multiplicity": m }))
        }
        "pairing" => {
            let u = parse_vector(ctx, field(v, "u")?)?;
            let l = vertex(ctx, &plane, field(v, "vertex")?)?;
            let kind = cycle_kind(v)?;
            let table = plane.pairing_with_line(kind, &u, &l)?;
            let expanded = plane.pairing_from_multiplicities(kind, &u, &l)?;
            Ok(QueryOutput::Json {
                value: json!({ "pairing": table, "from_multiplicities": expanded }),
                ok: table == expanded,
            })
        }
        "dot" => {
            let center = match v.get("center") {
                Some(c) => vertex(ctx, &plane, c)?,
                None => plane.standard_vertex(),
            };
            let r = v.get("radius").and_then(Value::as_u64).unwrap_or(2) as usize;
            Ok(QueryOutput::Text(ball_dot(&plane.ball(&center, r)?, &plane)?))
        }
        other => Err(CliError::Input(format!("unknown tree query {other:?}"))),
    }
}

/// `{n, t, samples}`: `w·1_L = γ_V vol(L) 1_{L^∨}`, `ω_{L^∨} = γ_V ω_L` on samples, and
/// `F∘F` is the reflection on `1_L`. `{lines: [...]}`: local modularity of the line sum.
pub fn fourier_query(ctx: Ctx, seed: u64, v: &Value) -> CliResult<QueryOutput> {
    let cfg = WeilConfig::default();
    if let Some(lines) = v.get("lines") {
        let plane = DrinfeldPlane::new(ctx)?;
        let mut sum = LineSum::default();
        for line in lines.as_array().ok_or_else(|| CliError::Input("lines must be a list".into()))? {
            let c = line.get("coeff").and_then(Value::as_i64).unwrap_or(1);
            sum = sum.plus(c, vertex(ctx, &plane, field(line, "vertex")?)?);
        }
        let r = local_modularity_check(&plane.space, &sum, &cfg)?;
        return Ok(QueryOutput::Json {
            value: json!({ "local_modularity": { "passed": r.passed, "t": r.t, "first_failure": r.first_failure } }),
            ok: r.passed,
        });
    }
    let n = usize_field(v, "n")?;
    let t = usize_field(v, "t")?;
    let samples = v.get("samples").and_then(Value::as_u64).unwrap_or(20) as usize;
    let (_, l) = padic_transfer_core::lattices::standard_space_and_lattice(ctx, n, t, t % 2 == 0)?;
    let d = dual_relation_check(&l, samples, seed, &cfg)?;
    let one_l = CosetCharacterFunction::indicator(&l);
    let twice = fourier(&fourier(&one_l, &cfg)?, &cfg)?;
    let reflection = twice.same_function(&one_l.reflect(), &cfg)?;
    let passed = d.passed() && reflection;
    Ok(QueryOutput::Json {
        value: json!({
            "lattice": lattice_json(&l),
            "vol": d.vol,
            "gamma_v": d.gamma_v,
            "fourier_of_indicator": d.fourier_ok,
            "omega_samples": d.omega_samples,
            "omega_failures": d.omega_failures,
            "double_transform_is_reflection": reflection,
        }),
        ok: passed,
    })
}
