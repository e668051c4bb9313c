use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use permres::cover::{self, RepairOutcome};
use permres::du;
use permres::fixtures::TableId;
use permres::greedy::{self, GreedyOptions, Parity, Strategy};
use permres::ip::{Assignment, VarKind};
use permres::pres::{self, PresOptions};
use permres::repro::{self, ReproLimits};
use permres::{build_function, build_group, Error, FunctionTable, Group};

use crate::{Command, ModelKind, ParityArg, StrategyArg, Target};

pub const SCHEMA_VERSION: u32 = 1;

pub struct Output {
    pub json: Value,
    /// False for failed verifications, mismatches and exhausted searches.
    pub ok: bool,
}

fn output(command: &str, ok: bool, mut body: Value) -> Output {
    let mut json = json!({ "schema_version": SCHEMA_VERSION, "command": command });
    if let (Some(dst), Some(src)) = (json.as_object_mut(), body.as_object_mut()) {
        dst.append(src);
    }
    Output { json, ok }
}

fn group(spec: &str) -> Result<Arc<Group>> {
    Ok(Arc::new(build_group(spec).with_context(|| format!("group `{spec}`"))?))
}

fn function(g: &Arc<Group>, spec: &str) -> Result<FunctionTable> {
    build_function(g.clone(), spec).with_context(|| format!("function `{spec}`"))
}

fn target(t: &Target) -> Result<FunctionTable> {
    function(&group(&t.group)?, &t.function)
}

fn zero(g: &Arc<Group>) -> FunctionTable {
    FunctionTable::constant(g.clone(), 0).expect("0 is an element")
}

fn write_json(path: &Path, doc: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(doc)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// Assignment problems a verifier reports as a failed check, not a usage error.
fn is_verification_error(err: &Error) -> bool {
    matches!(
        err,
        Error::MissingVariables(_)
            | Error::UnknownVariables(_)
            | Error::NonIntegral { .. }
            | Error::NotPermutationMatrix
    )
}

pub fn run(command: Command) -> Result<Output> {
    match command {
        Command::Pres { target: t, max_k, workers, no_symmetry, out } => {
            let f = target(&t)?;
            let opts = PresOptions { max_k, workers, symmetry: !no_symmetry };
            match pres::solve_pres_exact(&f, &opts) {
                Ok(res) => {
                    if let Some(path) = out {
                        let asg = pres::pres_assignment(&f, &res.witness_a);
                        let doc = json!({
                            "schema_version": SCHEMA_VERSION,
                            "model": "pres",
                            "group": t.group,
                            "fn": t.function,
                            "vars": asg.vars,
                        });
                        write_json(&path, &doc)?;
                    }
                    let sum = res.witness_g.add_pointwise(&f)?;
                    Ok(output(
                        "pres",
                        true,
                        json!({
                            "group": t.group,
                            "fn": t.function,
                            "pres": res.value,
                            "witness_S": res.witness_s,
                            "witness_subtable": res.witness_a.to_json()["cells"],
                            "witness_g": res.witness_g.images(),
                            "g_plus_f": sum.images(),
                            "stats": res.stats,
                        }),
                    ))
                }
                Err(Error::SearchExhausted { max_k, lower_bound }) => Ok(output(
                    "pres",
                    false,
                    json!({ "group": t.group, "fn": t.function, "pres": null, "max_k": max_k, "lower_bound": lower_bound }),
                )),
                Err(e) => Err(e.into()),
            }
        }
        Command::BruteforcePres { target: t } => {
            let f = target(&t)?;
            let value = pres::pres_bruteforce_oracle(&f)?;
            Ok(output("bruteforce-pres", true, json!({ "group": t.group, "fn": t.function, "pres": value })))
        }
        Command::Greedy { target: t, strategy, steps, choices } => {
            let f = target(&t)?;
            let strategy = match strategy {
                StrategyArg::Average => Strategy::Average,
                StrategyArg::Greedy => Strategy::Greedy,
            };
            let trace = greedy::algorithm1(&f, &GreedyOptions { steps, strategy, choices })?;
            let mut body = trace.to_json();
            body["strategy"] = json!(strategy);
            body["range_is_group"] = json!(trace.final_a.covers_all_rows());
            Ok(output("greedy", true, body))
        }
        Command::Bound { group: spec, function: fn_spec, two_to_one } => {
            let g = group(&spec)?;
            let q = g.order();
            if let Some(parity) = two_to_one {
                let parity = match parity {
                    ParityArg::Even => Parity::Even,
                    ParityArg::Odd => Parity::Odd,
                };
                let b = greedy::two_to_one_bound(q, parity)?;
                let seq = greedy::recurrence_nk(q, parity)?;
                let mut body = serde_json::to_value(&b)?;
                body["n_k"] = json!(seq);
                return Ok(output("bound", true, body));
            }
            let Some(fn_spec) = fn_spec else { bail!("`bound` needs --fn or --two-to-one") };
            let f = function(&g, &fn_spec)?;
            let (lower, upper) = greedy::generic_bounds(&f);
            Ok(output("bound", true, json!({ "q": q, "image_size": f.image_size(), "lower": lower, "upper": upper })))
        }
        Command::Cover { target: t, set, repair, iters, seed, restarts } => {
            let f = target(&t)?;
            let report = cover::is_cover(&f, &set)?;
            let mut body = serde_json::to_value(&report)?;
            let mut ok = true;
            if repair {
                let n = iters.unwrap_or_else(|| cover::default_iterations(f.order()));
                body["repair"] = match run_repair(&f, &set, n, seed, restarts) {
                    Ok(out) => {
                        ok = out.subtable.is_some();
                        repair_json(&out)
                    }
                    Err(Error::NotACover(rows)) => {
                        ok = false;
                        json!({ "success": false, "error": "not a cover", "uncovered_rows": rows })
                    }
                    Err(e) => return Err(e.into()),
                };
            }
            Ok(output("cover", ok, body))
        }
        Command::ExpectBound { q, v, k_max } => {
            let b = match k_max {
                Some(k) => cover::expected_cover_values(q, v, Some(k))?,
                None => {
                    let mut k = 16;
                    loop {
                        let b = cover::expected_cover_values(q, v, Some(k))?;
                        if b.min_k.is_some() || k >= q {
                            break b;
                        }
                        k *= 2;
                    }
                }
            };
            let last = k_max.or(b.min_k).unwrap_or(b.values.len()).min(b.values.len());
            let rows: Vec<Value> = b.values[..last]
                .iter()
                .enumerate()
                .map(|(i, x)| json!({ "k": i + 1, "value": x.to_string(), "decimal": cover::rational_to_f64(x) }))
                .collect();
            Ok(output("expect-bound", true, json!({ "q": q, "v": v, "min_k": b.min_k, "values": rows })))
        }
        Command::Du { target: t, g } => {
            let f = target(&t)?;
            let mut body = json!({
                "group": t.group,
                "fn": t.function,
                "differential_uniformity": f.differential_uniformity(),
                "is_permutation": f.is_permutation(),
            });
            let mut ok = true;
            if let Some(g_spec) = g {
                let g = function(f.group(), &g_spec)?;
                let rep = du::du_product_bound_check(&f, &g)?;
                ok = rep.holds;
                body["product_bound"] = serde_json::to_value(&rep)?;
            }
            Ok(output("du", ok, body))
        }
        Command::DuMin { group: spec, budget, out } => {
            let g = group(&spec)?;
            let res = du::min_du_permutation_search(&g, budget)?;
            if let Some(path) = out {
                let asg = du::encode_du_assignment(&zero(&g), &res.witness_perm, false)?;
                let doc = json!({ "schema_version": SCHEMA_VERSION, "model": "du", "group": spec, "vars": asg.vars });
                write_json(&path, &doc)?;
            }
            let mut body = res.to_json();
            body["group"] = json!(spec);
            Ok(output("du-min", res.complete, body))
        }
        Command::ExportLp { model, group: spec, function: fn_spec, with_y, out } => {
            let g = group(&spec)?;
            let f = match &fn_spec {
                Some(s) => function(&g, s)?,
                None if model == ModelKind::Du => zero(&g),
                None => bail!("the pres model needs --fn"),
            };
            let ip = match model {
                ModelKind::Pres => pres::build_pres_ip(&f),
                ModelKind::Du => du::build_du_ip(&f, with_y)?,
            };
            ip.write_lp(&out).with_context(|| format!("writing {}", out.display()))?;
            Ok(output(
                "export-lp",
                true,
                json!({
                    "path": out.display().to_string(),
                    "model": ip.name(),
                    "variables": ip.variables().len(),
                    "binary": ip.count_kind(VarKind::Binary),
                    "integer": ip.count_kind(VarKind::Integer),
                    "constraints": ip.constraints().len(),
                }),
            ))
        }
        Command::Verify { model, assignment, group: group_spec, function: fn_spec } => {
            let text =
                std::fs::read_to_string(&assignment).with_context(|| format!("reading {}", assignment.display()))?;
            let doc: Value =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", assignment.display()))?;
            let from_doc = |key: &str| doc.get(key).and_then(Value::as_str).map(str::to_string);
            let Some(group_spec) = group_spec.or_else(|| from_doc("group")) else {
                bail!("no group: pass --group or include \"group\" in the assignment file")
            };
            let g = group(&group_spec)?;
            let fn_spec = fn_spec.or_else(|| from_doc("fn"));
            let f = match (&fn_spec, model) {
                (Some(s), _) => function(&g, s)?,
                (None, ModelKind::Du) => zero(&g),
                (None, ModelKind::Pres) => bail!("no function: pass --fn or include \"fn\" in the assignment file"),
            };
            let asg = match Assignment::from_json_value(&doc) {
                Ok(a) => a,
                Err(e) if is_verification_error(&e) => return Ok(failed_verify(model, &e)),
                Err(e) => return Err(e.into()),
            };
            let result = match model {
                ModelKind::Pres => pres::verify_pres_solution(&f, &asg).map(|r| {
                    let passed = r.feasible;
                    (passed, serde_json::to_value(&r).expect("serializable"))
                }),
                ModelKind::Du => du::verify_du_solution(&f, &asg).map(|r| {
                    let passed = r.passed;
                    (passed, serde_json::to_value(&r).expect("serializable"))
                }),
            };
            match result {
                Ok((passed, mut body)) => {
                    body["model"] = json!(model_name(model));
                    body["passed"] = json!(passed);
                    Ok(output("verify", passed, body))
                }
                Err(e) if is_verification_error(&e) => Ok(failed_verify(model, &e)),
                Err(e) => Err(e.into()),
            }
        }
        Command::Repro { table, max_p, max_q, time_budget, workers } => {
            let table: TableId = table.parse()?;
            let limits = ReproLimits { max_p, max_q, time_budget: time_budget.map(Duration::from_secs_f64), workers };
            let report = repro::repro_appendix(table, &limits)?;
            Ok(output("repro", report.all_match(), serde_json::to_value(&report)?))
        }
    }
}

fn model_name(model: ModelKind) -> &'static str {
    match model {
        ModelKind::Pres => "pres",
        ModelKind::Du => "du",
    }
}

fn failed_verify(model: ModelKind, err: &Error) -> Output {
    output("verify", false, json!({ "model": model_name(model), "passed": false, "error": err.to_string() }))
}

fn run_repair(
    f: &FunctionTable,
    s: &[usize],
    n: usize,
    seed: Option<u64>,
    restarts: u64,
) -> permres::Result<RepairOutcome> {
    match seed {
        None if restarts == 0 => cover::algorithm2(f, s, n),
        None => cover::algorithm2_restarts(f, s, n, &(0..restarts).collect::<Vec<_>>()),
        Some(seed) => {
            let mut last = None;
            for sd in seed..=seed.saturating_add(restarts) {
                let out = cover::algorithm2_seeded(f, s, n, sd)?;
                if out.subtable.is_some() {
                    return Ok(out);
                }
                last = Some(out);
            }
            Ok(last.expect("at least one run"))
        }
    }
}

fn repair_json(out: &RepairOutcome) -> Value {
    json!({
        "success": out.subtable.is_some(),
        "subtable": out.subtable.as_ref().map(|a| a.to_json()["cells"].clone()),
        "value_set": out.subtable.as_ref().map(|a| a.value_set()),
        "leftover": out.leftover,
        "iterations": out.iterations,
        "first_fit_complete": out.first_fit_complete,
        "seed": out.seed,
    })
}
