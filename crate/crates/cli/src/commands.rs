use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};
use superknap::apps::{
    alpha_expansion_instance, integer_basis_instance, mixed_hull_extended, random_objective,
    random_superincreasing, seeded_rng, MixedInstance, RandomParams,
};
use superknap::dpopt::optimize as dp_optimize;
use superknap::facets::{facet_certificate, hull_ge, hull_le};
use superknap::greedy::{greedy_solution, minimal_packing_of, uniqueness};
use superknap::identities::{
    big_phi_expansion, ge_sum_split, packing_sum_split, phi_product_split, phi_recurrence,
};
use superknap::instance::{validate, InstanceJson, ValidatedKnapsack};
use superknap::intersect::{
    build_two_sided, case_classify, describe, disjunctive_system, extended_formulation,
    fractional_family, h_phi_pairs, intersection_hull, lift_point, relaxation_hull, GapCase,
    IntersectError, TwoSidedInput, TwoSidedInstance,
};
use superknap::num::{dot, fmt_int_vec, fmt_rat, fmt_rat_vec, parse_int, parse_rat};
use superknap::oracle::{
    assert_integer_hull, brute_max, enumerate_instance, enumerate_two_sided, vertices,
    DEFAULT_GUARD,
};
use superknap::{HPolytope, KnapsackInstance, RowTag, Sense};

use crate::report::{fail, CliError, Inputs, Report};

fn strs(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn rat_strs(v: &[BigRational]) -> Vec<String> {
    v.iter().map(fmt_rat).collect()
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report serializes")
}

fn load_instance(inp: &mut Inputs, path: &Path) -> Result<KnapsackInstance, CliError> {
    KnapsackInstance::from_json(&inp.read(path)?).map_err(fail)
}

fn load_valid(inp: &mut Inputs, path: &Path) -> Result<ValidatedKnapsack, CliError> {
    validate(&load_instance(inp, path)?).map_err(fail)
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn check(inp: &mut Inputs, path: &Path) -> Result<Report, CliError> {
    let inst = load_instance(inp, path)?;
    match validate(&inst) {
        Ok(vk) => {
            let text = format!(
                "valid: {} knapsack, n = {}\nbounds = {}{}\nnontrivial = {}\n",
                vk.sense(),
                vk.n(),
                fmt_int_vec(vk.bounds()),
                if vk.tightened() {
                    format!(" (tightened from {})", fmt_int_vec(vk.original_bounds()))
                } else {
                    String::new()
                },
                vk.nontrivial()
            );
            let result = json!({
                "valid": true,
                "sense": vk.sense(),
                "n": vk.n(),
                "bounds": strs(vk.bounds()),
                "original_bounds": strs(vk.original_bounds()),
                "tightened": vk.tightened(),
                "nontrivial": vk.nontrivial(),
            });
            Ok(Report::ok(text, result))
        }
        Err(e) => Ok(Report {
            text: format!("invalid: {e}\n"),
            result: json!({ "valid": false, "code": e.code(), "message": e.to_string() }),
            outcome: e.code().to_string(),
            seed: None,
            exit: superknap::Classify::class(&e).exit_code(),
        }),
    }
}

pub fn greedy(inp: &mut Inputs, path: &Path) -> Result<Report, CliError> {
    let vk = load_valid(inp, path)?;
    match vk.sense() {
        Sense::Le => {
            let gp = greedy_solution(&vk).map_err(fail)?;
            let rep = uniqueness(&vk, &gp);
            let mut text = format!(
                "theta = {}\ng = {}\nsupport = {:?}\nunique = {}\n",
                fmt_int_vec(gp.theta()),
                rep.capacity_used,
                one_based(gp.support()),
                rep.unique
            );
            if let Some(alt) = &rep.alternate {
                text.push_str(&format!(
                    "alternate = {} (witness j = {})\n",
                    fmt_int_vec(&alt.point),
                    alt.witness + 1
                ));
            }
            let result = json!({
                "theta": strs(gp.theta()),
                "g": rep.capacity_used.to_string(),
                "support": one_based(gp.support()),
                "unique": rep.unique,
                "alternate": rep.alternate.as_ref().map(|a| json!({ "witness": a.witness + 1, "point": strs(&a.point) })),
            });
            Ok(Report::ok(text, result))
        }
        Sense::Ge => {
            let gamma = minimal_packing_of(&vk).map_err(fail)?;
            let weight = dot(vk.weights(), &gamma);
            let text = format!("gamma = {}\nweight = {weight}\n", fmt_int_vec(&gamma));
            Ok(Report::ok(
                text,
                json!({ "gamma": strs(&gamma), "weight": weight.to_string() }),
            ))
        }
    }
}

fn hull_of(vk: &ValidatedKnapsack) -> Result<HPolytope, CliError> {
    Ok(match vk.sense() {
        Sense::Le => hull_le(vk, &greedy_solution(vk).map_err(fail)?),
        Sense::Ge => hull_ge(vk.weights(), vk.bounds(), vk.capacity()).map_err(fail)?,
    })
}

pub fn facets(inp: &mut Inputs, path: &Path) -> Result<Report, CliError> {
    let vk = load_valid(inp, path)?;
    let hull = hull_of(&vk)?;
    Ok(Report::ok(hull.render(), to_value(&hull)))
}

pub struct OptimizeArgs {
    pub c: Option<String>,
    pub random: Option<usize>,
    pub seed: u64,
    pub verify: bool,
    pub trace: bool,
}

fn parse_objective(s: &str) -> Result<Vec<BigRational>, CliError> {
    s.split(',')
        .map(|p| {
            parse_rat(p)
                .ok_or_else(|| CliError::validation(format!("bad objective entry `{}`", p.trim())))
        })
        .collect()
}

pub fn optimize(inp: &mut Inputs, path: &Path, args: &OptimizeArgs) -> Result<Report, CliError> {
    let vk = load_valid(inp, path)?;
    if vk.sense() != Sense::Le {
        return Err(CliError::validation("optimize needs a <= knapsack"));
    }
    let gp = greedy_solution(&vk).map_err(fail)?;
    let objectives = match (&args.c, args.random) {
        (Some(c), None) => {
            inp.add(c.as_bytes());
            vec![parse_objective(c)?]
        }
        (None, Some(count)) => {
            let mut rng = seeded_rng(args.seed);
            (0..count)
                .map(|_| random_objective(&mut rng, vk.n()))
                .collect()
        }
        _ => return Err(CliError::validation("give exactly one of --c or --random")),
    };
    let cloud = if args.verify {
        Some(enumerate_instance(vk.instance(), DEFAULT_GUARD).map_err(fail)?)
    } else {
        None
    };
    let mut text = String::new();
    let mut items = Vec::new();
    let mut mismatches = 0;
    for c in &objectives {
        let r = dp_optimize(&vk, &gp, c).map_err(fail)?;
        text.push_str(&format!(
            "c = {}\nvalue = {}\nx = {}\nleaf = {}\n",
            fmt_rat_vec(c),
            fmt_rat(&r.value),
            fmt_int_vec(&r.solution),
            r.leaf
        ));
        let mut item = json!({ "c": rat_strs(c), "value": fmt_rat(&r.value), "solution": strs(&r.solution), "leaf": r.leaf });
        if args.trace {
            for node in &r.trace {
                text.push_str(&format!(
                    "  j = {}: f- = {}, f+ = {}\n",
                    node.j + 1,
                    fmt_rat(&node.f_minus),
                    fmt_rat(&node.f_plus)
                ));
            }
            item["trace"] = to_value(&r.trace);
        }
        if let Some(cloud) = &cloud {
            let (best, arg) = brute_max(cloud, c).map_err(fail)?;
            let agree = best == r.value && arg.contains(&r.solution);
            mismatches += usize::from(!agree);
            text.push_str(&format!(
                "brute = {} ({})\n",
                fmt_rat(&best),
                if agree { "match" } else { "MISMATCH" }
            ));
            item["brute"] = json!(fmt_rat(&best));
            item["match"] = json!(agree);
        }
        items.push(item);
    }
    let mut report = Report::ok(text, json!({ "theta": strs(gp.theta()), "results": items }));
    report.seed = args.random.map(|_| args.seed);
    if mismatches > 0 {
        report.outcome = format!("{mismatches} mismatches");
        report.exit = superknap::ErrorClass::Certificate.exit_code();
    }
    Ok(report)
}

pub struct IntersectArgs {
    pub le: PathBuf,
    pub ge: Option<PathBuf>,
    pub ge_hull: Option<PathBuf>,
    pub relax: bool,
    pub extend: bool,
}

fn load_pair(
    inp: &mut Inputs,
    first: &Path,
    second: Option<&Path>,
) -> Result<TwoSidedInput, CliError> {
    match second {
        None => TwoSidedInput::from_json(&inp.read(first)?).map_err(fail),
        Some(ge) => {
            let parse = |text: String| -> Result<InstanceJson, CliError> {
                serde_json::from_str(&text)
                    .map_err(|e| CliError::validation(format!("instance JSON: {e}")))
            };
            let le = parse(inp.read(first)?)?;
            let ge = parse(inp.read(ge)?)?;
            Ok(TwoSidedInput {
                le,
                ge,
                ge_hull: None,
            })
        }
    }
}

fn relaxation_report(input: &TwoSidedInput, reason: &str) -> Result<Report, CliError> {
    let relax = relaxation_hull(input).map_err(fail)?;
    let mut text = format!(
        "relaxation: true ({reason})\nexact: {}\nge hull from fixture: {}\n",
        relax.exact, relax.ge_from_fixture
    );
    text.push_str(&relax.hull.render());
    let mut result = json!({
        "relaxation": true,
        "reason": reason,
        "exact": relax.exact,
        "ge_hull_from_fixture": relax.ge_from_fixture,
        "hull": to_value(&relax.hull),
    });
    match vertices(&relax.hull) {
        Ok(vs) => {
            let frac: Vec<&Vec<BigRational>> = vs
                .vertices
                .iter()
                .filter(|v| v.iter().any(|r| !r.is_integer()))
                .collect();
            text.push_str(&format!(
                "vertices: {} ({} fractional)\n",
                vs.len(),
                frac.len()
            ));
            for v in &frac {
                text.push_str(&format!("fractional vertex {}\n", fmt_rat_vec(v)));
            }
            result["vertex_count"] = json!(vs.len());
            result["fractional_vertices"] =
                json!(frac.iter().map(|v| rat_strs(v)).collect::<Vec<_>>());
        }
        Err(e) => {
            text.push_str(&format!("vertices: not enumerated ({e})\n"));
            result["vertex_error"] = json!(e.to_string());
        }
    }
    let mut report = Report::ok(text, result);
    report.outcome = "relaxation".into();
    Ok(report)
}

pub fn intersect(inp: &mut Inputs, args: &IntersectArgs) -> Result<Report, CliError> {
    let mut input = load_pair(inp, &args.le, args.ge.as_deref())?;
    if let Some(p) = &args.ge_hull {
        let hull: HPolytope = serde_json::from_str(&inp.read(p)?)
            .map_err(|e| CliError::validation(format!("hull JSON: {e}")))?;
        input.ge_hull = Some(hull);
    }
    if args.relax {
        return relaxation_report(&input, "requested");
    }
    let ts = match build_two_sided(&input.le, &input.ge) {
        Ok(ts) => ts,
        Err(IntersectError::ZeroCoefficientRegime { .. }) => {
            return relaxation_report(&input, "zero weights")
        }
        Err(e) => return Err(fail(e)),
    };
    let hull = intersection_hull(&ts).map_err(fail)?;
    let mut text = format!("{}\n", describe(&ts));
    text.push_str(&hull.render());
    let mut result =
        json!({ "relaxation": false, "summary": to_value(&ts.summary()), "hull": to_value(&hull) });
    if args.extend {
        match case_classify(&ts) {
            GapCase::GapOne => {
                let ef = extended_formulation(&ts).map_err(fail)?;
                text.push_str("extended formulation:\n");
                text.push_str(&ef.system.render());
                result["extended"] = ef.to_json_value();
            }
            GapCase::GapAtLeastTwo => {
                let sys = disjunctive_system(&ts).map_err(fail)?;
                text.push_str("disjunctive formulation:\n");
                text.push_str(&sys.render());
                result["extended"] = sys.to_json_value();
            }
            GapCase::SinglePoint => {
                text.push_str("extended formulation: not needed, single point\n")
            }
        }
    }
    Ok(Report::ok(text, result))
}

#[derive(Serialize)]
struct Check {
    file: String,
    name: String,
    pass: bool,
    detail: String,
}

struct Checks {
    file: String,
    out: Vec<Check>,
}

impl Checks {
    fn push(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.out.push(Check {
            file: self.file.clone(),
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    fn identity(&mut self, name: &str, r: Result<usize, superknap::identities::IdentityFailure>) {
        match r {
            Ok(k) => self.push(name, true, format!("{k} equalities")),
            Err(e) => self.push(name, false, e.to_string()),
        }
    }
}

/// Deterministic rational test vectors for the identity checks.
fn probe(n: usize, shift: i64) -> Vec<BigRational> {
    (0..n as i64)
        .map(|i| BigRational::new((3 * i - shift).into(), (i + 2).into()))
        .collect()
}

fn verify_single(ch: &mut Checks, inst: &KnapsackInstance) -> Result<(), CliError> {
    let vk = validate(inst).map_err(fail)?;
    ch.push(
        "validate",
        true,
        format!("{} knapsack, n = {}", vk.sense(), vk.n()),
    );
    let hull = hull_of(&vk)?;
    let cloud = enumerate_instance(vk.instance(), DEFAULT_GUARD).map_err(fail)?;
    let rep = assert_integer_hull(&hull, &cloud);
    let detail = format!(
        "{} points, {} vertices, {} of {} rows facet-defining{}",
        rep.points_checked,
        rep.vertex_count,
        rep.rows.iter().filter(|r| r.facet).count(),
        rep.rows.len(),
        rep.error
            .as_ref()
            .map(|e| format!(", {e}"))
            .unwrap_or_default()
    );
    ch.push("integer_hull", rep.pass, detail);
    let n = vk.n();
    let u = vk.bounds().to_vec();
    match vk.sense() {
        Sense::Le => {
            let gp = greedy_solution(&vk).map_err(fail)?;
            for r in &hull.ineqs {
                if let RowTag::Packing(j) = r.tag {
                    match facet_certificate(&vk, &gp, j) {
                        Ok(cert) => ch.push(
                            format!("facet_certificate({})", j + 1),
                            true,
                            format!("affine rank {}", cert.affine_rank),
                        ),
                        Err(e) => ch.push(
                            format!("facet_certificate({})", j + 1),
                            false,
                            e.to_string(),
                        ),
                    }
                }
            }
            ch.identity("phi_recurrence", phi_recurrence(&u, &gp));
            ch.identity("phi_product_split", phi_product_split(&u, &gp));
            let eps = BigRational::new(1.into(), 3.into());
            ch.identity(
                "packing_sum_split",
                packing_sum_split(&u, &gp, &probe(n, 1), &probe(n, 4), &eps),
            );
            let mut rng = seeded_rng(0);
            let mut bad = 0;
            for _ in 0..25 {
                let c = random_objective(&mut rng, n);
                let r = dp_optimize(&vk, &gp, &c).map_err(fail)?;
                let (best, arg) = brute_max(&cloud, &c).map_err(fail)?;
                bad += usize::from(best != r.value || !arg.contains(&r.solution));
            }
            ch.push(
                "dp_vs_brute",
                bad == 0,
                format!("25 objectives, {bad} mismatches"),
            );
        }
        Sense::Ge => {
            let gamma = minimal_packing_of(&vk).map_err(fail)?;
            ch.identity("big_phi_expansion", big_phi_expansion(&u, &gamma));
            ch.identity(
                "ge_sum_split",
                ge_sum_split(
                    &u,
                    &gamma,
                    &probe(n, 2),
                    &BigRational::new(1.into(), 2.into()),
                ),
            );
        }
    }
    Ok(())
}

fn verify_two_sided(
    ch: &mut Checks,
    ts: &TwoSidedInstance,
    input: &TwoSidedInput,
) -> Result<(), CliError> {
    let hull = intersection_hull(ts).map_err(fail)?;
    let cloud = enumerate_two_sided(
        &input.le.u,
        &input.le.a,
        &input.le.b,
        &input.ge.a,
        &input.ge.b,
        DEFAULT_GUARD,
    )
    .map_err(fail)?;
    let outside = cloud.points.iter().filter(|p| !hull.contains(p)).count();
    ch.push(
        "points_in_hull",
        outside == 0,
        format!("{} points, {outside} cut off", cloud.len()),
    );
    let vs = vertices(&hull).map_err(fail)?;
    let stray = vs
        .vertices
        .iter()
        .filter(|v| {
            let xi: Option<Vec<BigInt>> = v
                .iter()
                .map(|r| r.is_integer().then(|| r.to_integer()))
                .collect();
            !xi.is_some_and(|x| ts.contains(&x))
        })
        .count();
    ch.push(
        "vertices_in_set",
        stray == 0,
        format!("{} vertices, {stray} outside the set", vs.len()),
    );
    ch.identity(
        "big_phi_expansion",
        big_phi_expansion(ts.free_bounds(), ts.free_gamma()),
    );
    if case_classify(ts) == GapCase::GapOne {
        let ef = extended_formulation(ts).map_err(fail)?;
        let mut lifted = 0;
        let mut failures = Vec::new();
        for eps in [(1, 4), (1, 2), (3, 4)] {
            let eps = BigRational::new(eps.0.into(), eps.1.into());
            for x in fractional_family(ts, &eps).map_err(fail)? {
                match lift_point(ts, &x) {
                    Ok(y) if ef.contains(&x, &y) => lifted += 1,
                    Ok(_) => failures.push(fmt_rat_vec(&x)),
                    Err(e) => failures.push(format!("{}: {e}", fmt_rat_vec(&x))),
                }
            }
        }
        ch.push(
            "lift",
            failures.is_empty() && lifted > 0,
            format!("{lifted} points lifted, {} failures", failures.len()),
        );
        let bad: Vec<usize> = h_phi_pairs(ts)
            .into_iter()
            .filter(|(_, h, p)| h != p)
            .map(|(j, _, _)| j + 1)
            .collect();
        ch.push(
            "h_equals_phi",
            bad.is_empty(),
            format!("mismatched rows {bad:?}"),
        );
    }
    Ok(())
}

pub fn verify(inp: &mut Inputs, paths: &[PathBuf]) -> Result<Report, CliError> {
    let mut all = Vec::new();
    for path in paths {
        let text = inp.read(path)?;
        let raw: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
        let mut ch = Checks {
            file: file_label(path),
            out: Vec::new(),
        };
        if raw.get("le").is_some() {
            let input = TwoSidedInput::from_json(&text).map_err(fail)?;
            match build_two_sided(&input.le, &input.ge) {
                Ok(ts) => {
                    ch.push("two_sided", true, format!("case {}", case_classify(&ts)));
                    verify_two_sided(&mut ch, &ts, &input)?;
                }
                Err(IntersectError::ZeroCoefficientRegime { .. }) => {
                    let relax = relaxation_hull(&input).map_err(fail)?;
                    ch.push(
                        "two_sided",
                        true,
                        format!("zero weights, relaxation only (exact = {})", relax.exact),
                    );
                }
                Err(e) => return Err(fail(e)),
            }
        } else {
            let inst = KnapsackInstance::from_json(&text).map_err(fail)?;
            verify_single(&mut ch, &inst)?;
        }
        all.extend(ch.out);
    }
    let failed = all.iter().filter(|c| !c.pass).count();
    let mut text = String::new();
    for c in &all {
        text.push_str(&format!(
            "{} {} {}: {}\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.file,
            c.name,
            c.detail
        ));
    }
    text.push_str(&format!("{} checks, {failed} failed\n", all.len()));
    let mut report = Report::ok(text, json!({ "checks": to_value(&all), "failed": failed }));
    if failed > 0 {
        report.outcome = format!("{failed} failed");
        report.exit = superknap::ErrorClass::Certificate.exit_code();
    }
    Ok(report)
}

pub enum GenMode {
    Alpha {
        alpha: String,
        ubound: String,
    },
    Basis {
        chain: String,
        bound: String,
        capacity: String,
    },
    Random {
        n: usize,
        seed: u64,
        params: RandomParams,
    },
}

fn int_arg(name: &str, s: &str) -> Result<BigInt, CliError> {
    parse_int(s).ok_or_else(|| CliError::validation(format!("{name}: `{s}` is not an integer")))
}

pub fn generate(inp: &mut Inputs, mode: &GenMode) -> Result<Report, CliError> {
    let (inst, seed) = match mode {
        GenMode::Alpha { alpha, ubound } => {
            inp.add(format!("alpha {alpha} {ubound}").as_bytes());
            (
                alpha_expansion_instance(&int_arg("alpha", alpha)?, &int_arg("ubound", ubound)?)
                    .map_err(fail)?,
                None,
            )
        }
        GenMode::Basis {
            chain,
            bound,
            capacity,
        } => {
            inp.add(format!("basis {chain} {bound} {capacity}").as_bytes());
            let chain: Vec<BigInt> = chain
                .split(',')
                .map(|s| int_arg("basis", s.trim()))
                .collect::<Result<_, _>>()?;
            let (a, u) = integer_basis_instance(&chain, &int_arg("bound", bound)?).map_err(fail)?;
            (
                KnapsackInstance::new(a, u, int_arg("capacity", capacity)?, Sense::Le)
                    .map_err(fail)?,
                None,
            )
        }
        GenMode::Random { n, seed, params } => {
            inp.add(
                format!(
                    "random {n} {} {} {}",
                    params.max_bound, params.max_first, params.max_slack
                )
                .as_bytes(),
            );
            (
                random_superincreasing(&mut seeded_rng(*seed), *n, *params).map_err(fail)?,
                Some(*seed),
            )
        }
    };
    let mut report = Report::ok(format!("{}\n", inst.to_json()), to_value(&inst));
    report.seed = seed;
    Ok(report)
}

pub fn mixed(inp: &mut Inputs, path: &Path) -> Result<Report, CliError> {
    let mi: MixedInstance = serde_json::from_str(&inp.read(path)?)
        .map_err(|e| CliError::validation(format!("mixed instance JSON: {e}")))?;
    let hull = mixed_hull_extended(&mi).map_err(fail)?;
    let mut text = format!(
        "theta(floor b) = {}\ntheta(floor(b - ub)) = {}\ngamma(ceil(b - ub)) = {}\n",
        fmt_int_vec(&hull.theta_b),
        fmt_int_vec(&hull.theta_low),
        fmt_int_vec(&hull.gamma_low)
    );
    text.push_str(&hull.system.render());
    Ok(Report::ok(text, hull.to_json_value()))
}
