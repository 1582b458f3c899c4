use crate::report::{num, Output, Table};
use crate::{Cli, Command, GridArgs, K3Choice};
use ltlab::constants::{
    best_known_bounds, classical_k, classical_l, duality_k_from_l, gamma_from_p, ConstantValue, GammaDim,
};
use ltlab::ground_state::{gamma_crossing, one_particle_k, one_particle_l, shoot_ground_state, ShootOptions};
use ltlab::rumin::{k_tilde, optimize_trial, rumin_functional_with, RuminOptions, TrialPair};
use ltlab::spectral::{
    lt_ratio_report, monotonicity_experiment, spectrum, two_bump_experiment, weyl_convergence, GridOptions,
};
use ltlab::sphere::{a_supremum, ggm_conjectured_constant, sphere_table, sphere_table_csv};
use ltlab::stability::{
    baxter_integral_check, conjectured_k3, default_k3, proof_chain_optimizers, stability_bound, ChainInputs,
    MatterSystem,
};
use ltlab::verify::{verify_all, VerifyOptions};
use ltlab::{LtError, Result};
use serde_json::{json, Value};

/// Fills unset grid flags with the subcommand's defaults so the recorded
/// configuration is the one actually used.
pub fn resolve_defaults(cli: &mut Cli) {
    let fill = |g: &mut GridArgs, x: f64, h: f64| {
        g.half_width.get_or_insert(x);
        g.step.get_or_insert(h);
        g.kinetic.get_or_insert(1.0);
        g.ell_max.get_or_insert(400);
    };
    match &mut cli.command {
        Command::Spectrum { potential, grid, .. } => {
            let (x, h) = if potential.is_radial() { (15.0, 5e-3) } else { (20.0, 1e-3) };
            fill(grid, x, h)
        }
        Command::Weyl { grid, .. } => fill(grid, 8.0, 1e-3),
        Command::TwoBump { grid, .. } => fill(grid, 40.0, 2e-3),
        _ => {}
    }
}

fn grid_options(g: &GridArgs, cli: &Cli) -> GridOptions {
    let d = GridOptions::default();
    GridOptions {
        half_width: g.half_width.unwrap_or(d.half_width),
        step: g.step.unwrap_or(d.step),
        kinetic: g.kinetic.unwrap_or(d.kinetic),
        richardson: !g.no_richardson,
        ell_max: g.ell_max.unwrap_or(d.ell_max),
        exec: cli.exec(),
    }
}

fn constant_json(name: &str, c: &ConstantValue) -> Value {
    json!({
        "name": name,
        "value": c.value(),
        "tag": c.tag(),
        "kind": c.kind(),
        "direction": c.direction(),
        "provenance": c.provenance(),
    })
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data")
}

pub fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Constants { gamma, dim } => constants(*gamma, *dim),
        Command::GroundState { dim, p, rtol } => ground_state(*dim, *p, *rtol),
        Command::Rumin { reference_trial: _, trial, dim, rel_tol, optimize } => {
            let tp = match trial {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| LtError::Input(format!("cannot read {}: {e}", path.display())))?;
                    TrialPair::from_json(&text)?
                }
                None => TrialPair::reference(),
            };
            rumin(cli, &tp, *dim, *rel_tol, *optimize)
        }
        Command::Spectrum { potential, gamma, grid } => {
            let opts = grid_options(grid, cli);
            let s = spectrum(potential, &opts)?;
            let mut t = Table::new(Some("negative spectrum"), &["index", "channel", "multiplicity", "eigenvalue", "error_estimate"]);
            for i in 0..s.eigenvalues.len() {
                t.row(vec![
                    i.to_string(),
                    s.channel[i].to_string(),
                    s.multiplicity[i].to_string(),
                    num(s.eigenvalues[i]),
                    num(s.error_estimate[i]),
                ]);
            }
            let rows = if gamma.is_empty() { Vec::new() } else { lt_ratio_report(potential, gamma, &opts)? };
            let mut lt = Table::new(Some("Lieb-Thirring ratios"), &["gamma", "riesz_mean", "norm", "ratio", "classical", "one_particle", "best_upper", "within_best"]);
            for r in &rows {
                lt.row(vec![
                    num(r.gamma),
                    num(r.riesz_mean),
                    num(r.potential_norm),
                    num(r.ratio),
                    num(r.classical),
                    num(r.one_particle),
                    r.best_upper.map_or("-".into(), num),
                    r.within_best.map_or("-".into(), |b| b.to_string()),
                ]);
            }
            let mut tables = vec![t];
            if !rows.is_empty() {
                tables.push(lt);
            }
            Ok(Output {
                json: json!({ "potential": potential.to_string(), "spectrum": to_value(&s), "lt_ratios": to_value(&rows) }),
                csv: Some(s.to_csv()),
                tables,
                checks_failed: rows.iter().any(|r| r.within_best == Some(false)),
                ..Default::default()
            })
        }
        Command::Weyl { potential, gamma, couplings, grid } => {
            let rows = weyl_convergence(potential, *gamma, couplings, &grid_options(grid, cli))?;
            let mut t = Table::new(Some("strong-coupling ratios"), &["coupling", "riesz_mean", "count", "ratio"]);
            for r in &rows {
                t.row(vec![num(r.coupling), num(r.riesz_mean), r.count.to_string(), num(r.ratio)]);
            }
            Ok(Output { json: json!({ "potential": potential.to_string(), "rows": to_value(&rows) }), tables: vec![t], ..Default::default() })
        }
        Command::Monotonicity { dim, gamma, hbar_min, hbar_max, points } => {
            if !(*points >= 2 && *hbar_min > 0.0 && hbar_max > hbar_min) {
                return Err(LtError::Domain("need points >= 2 and 0 < hbar-min < hbar-max".into()));
            }
            let grid: Vec<f64> =
                (0..*points).map(|i| hbar_min + (hbar_max - hbar_min) * i as f64 / (*points - 1) as f64).collect();
            let table = monotonicity_experiment(*dim, *gamma, &grid, cli.exec())?;
            let mut t = Table::new(None, &["hbar", "value", "increase"]);
            for r in &table.rows {
                t.row(vec![num(r.hbar), num(r.value), r.increase.to_string()]);
            }
            Ok(Output {
                json: to_value(&table),
                tables: vec![t],
                notes: vec![
                    format!("increases: {}", table.increases),
                    format!("semiclassical limit: {}", table.semiclassical_limit),
                ],
                ..Default::default()
            })
        }
        Command::TwoBump { gamma, separations, grid } => {
            let table = two_bump_experiment(*gamma, separations, &grid_options(grid, cli))?;
            let mut t = Table::new(None, &["R", "E1", "E2", "ratio", "overlap", "predicted", "excess", "normalized_slope", "ratio_error", "stable"]);
            for r in &table.rows {
                t.row(vec![
                    num(r.separation),
                    num(r.e1),
                    num(r.e2),
                    num(r.ratio),
                    num(r.overlap),
                    num(r.predicted),
                    num(r.excess),
                    num(r.normalized_slope),
                    num(r.ratio_error),
                    r.stable.to_string(),
                ]);
            }
            Ok(Output {
                json: to_value(&table),
                tables: vec![t],
                notes: vec![format!("one-particle constant: {}", table.one_particle), format!("p = {}", table.p)],
                ..Default::default()
            })
        }
        Command::Sphere { dim, l_max } => {
            let rows = sphere_table(*dim, *l_max)?;
            let (at, sup) = a_supremum(*dim)?;
            let conj = ggm_conjectured_constant(*dim)?;
            let mut t = Table::new(None, &["d", "L", "nu_L", "N_leq", "a_L", "running_sup"]);
            for r in &rows {
                t.row(vec![r.d.to_string(), r.level.to_string(), r.nu.to_string(), r.n_leq.to_string(), num(r.a_l), num(r.running_sup)]);
            }
            Ok(Output {
                json: json!({
                    "rows": to_value(&rows),
                    "supremum": { "L": at, "a": sup },
                    "conjectured_constant": constant_json("L_0 candidate", &conj),
                }),
                csv: Some(sphere_table_csv(&rows)),
                tables: vec![t],
                notes: vec![format!("sup_L a_L = {sup} at L = {at}"), format!("candidate L_0,{dim} = {} [{}]", conj.value(), conj.tag())],
                ..Default::default()
            })
        }
        Command::Stability { electrons, nuclei, charge, k3, chain } => {
            let k3v = match k3 {
                K3Choice::Improved => default_k3(),
                K3Choice::Conjectured => conjectured_k3(),
            };
            let sys = MatterSystem::new(*electrons, *nuclei, *charge, k3v.clone())?;
            let bound = stability_bound(&sys);
            let baxter = baxter_integral_check()?;
            let mut t = Table::new(None, &["quantity", "value", "tag"]);
            t.row(vec!["K3".into(), num(k3v.value()), k3v.tag().into()]);
            t.row(vec!["energy lower bound".into(), num(bound), k3v.tag().into()]);
            t.row(vec!["nuclear integral".into(), num(baxter.value), "derived".into()]);
            let mut out = json!({
                "k3": constant_json("K3", &k3v),
                "bound": bound,
                "baxter": to_value(&baxter),
            });
            let mut failed = false;
            if *chain {
                let c = proof_chain_optimizers(&sys, &ChainInputs { exec: cli.exec(), ..ChainInputs::default() })?;
                for (name, closed, grid) in [("T*", c.t_star, c.t_grid), ("mu*", c.mu_star, c.mu_grid), ("optimized bound", c.value_closed, c.value_grid)] {
                    t.row(vec![format!("{name} closed / grid"), format!("{} / {}", num(closed), num(grid)), "derived".into()]);
                }
                t.row(vec!["intermediate bound".into(), num(c.intermediate_bound), k3v.tag().into()]);
                t.row(vec!["mean inequality slack".into(), num(c.mean_slack), "derived".into()]);
                failed = !c.passes;
                out["chain"] = to_value(&c);
            }
            Ok(Output { json: out, tables: vec![t], checks_failed: failed, ..Default::default() })
        }
        Command::GammaC { dim } => {
            let g = gamma_crossing(*dim)?;
            let mut t = Table::new(None, &["d", "gamma_c"]);
            t.row(vec![dim.to_string(), num(g)]);
            Ok(Output { json: json!({ "dim": dim, "gamma_c": g, "tag": "derived" }), tables: vec![t], ..Default::default() })
        }
        Command::VerifyAll { only } => verify(cli, only),
    }
}

fn constants(gamma: f64, dim: u32) -> Result<Output> {
    let gd = GammaDim::new(gamma, dim)?;
    let mut list: Vec<(String, ConstantValue)> = vec![("L^cl".into(), classical_l(gd)), ("L^(1)".into(), one_particle_l(gd)?)];
    for (i, b) in best_known_bounds(gd).into_iter().enumerate() {
        list.push((format!("literature[{i}]"), b));
    }
    list.push(("K^cl".into(), classical_k(dim)?));
    let mut duals = Vec::new();
    // the L-K duality links the gamma = 1 constants only
    if gamma == 1.0 {
        for (name, c) in &list {
            if name.starts_with('L') || name.starts_with("literature") {
                let k = duality_k_from_l(c.value(), dim)?;
                let flipped = match c.direction() {
                    ltlab::constants::BoundDirection::UpperBound => ltlab::constants::BoundDirection::LowerBound,
                    ltlab::constants::BoundDirection::LowerBound => ltlab::constants::BoundDirection::UpperBound,
                    ltlab::constants::BoundDirection::Exact => ltlab::constants::BoundDirection::Exact,
                };
                let kc = ConstantValue::new(k, c.kind(), flipped, format!("dual of {name}: {}", c.provenance()))?;
                duals.push((format!("K dual of {name}"), kc));
            }
        }
    }
    list.extend(duals);
    let mut t = Table::new(None, &["name", "value", "tag", "direction", "provenance"]);
    for (name, c) in &list {
        t.row(vec![name.clone(), num(c.value()), c.tag().into(), format!("{:?}", c.direction()), c.provenance().into()]);
    }
    let json = json!({
        "gamma": gamma,
        "dim": dim,
        "constants": list.iter().map(|(n, c)| constant_json(n, c)).collect::<Vec<_>>(),
    });
    Ok(Output { json, tables: vec![t], ..Default::default() })
}

fn ground_state(dim: u32, p: f64, rtol: f64) -> Result<Output> {
    let prof = shoot_ground_state(dim, p, &ShootOptions { rtol, ..ShootOptions::default() })?;
    let k = one_particle_k(p, dim)?;
    let gamma = gamma_from_p(p, dim);
    let mut t = Table::new(None, &["quantity", "value"]);
    let mut rows = vec![
        ("Q(0)", prof.q0),
        ("mass", prof.mass),
        ("kinetic", prof.kinetic),
        ("norm 2p", prof.norm2p),
        ("pohozaev residual 1", prof.pohozaev_residuals.0),
        ("pohozaev residual 2", prof.pohozaev_residuals.1),
        ("r_max", prof.r_max()),
        ("K^(1)", k.value()),
    ];
    let mut json = json!({
        "summary": {
            "dim": dim, "p": p, "q0": prof.q0, "mass": prof.mass, "kinetic": prof.kinetic,
            "norm2p": prof.norm2p, "pohozaev_residuals": [prof.pohozaev_residuals.0, prof.pohozaev_residuals.1],
            "shots": prof.shots, "r_max": prof.r_max(),
        },
        "k_one_particle": constant_json("K^(1)", &k),
        "profile": { "r": prof.r_grid, "Q": prof.q_values },
    });
    if gamma > 0.0 {
        if let Ok(l) = GammaDim::new(gamma, dim).and_then(one_particle_l) {
            rows.push(("L^(1) at dual gamma", l.value()));
            json["gamma"] = json!(gamma);
            json["l_one_particle"] = constant_json("L^(1)", &l);
        }
    }
    for (n, v) in rows {
        t.row(vec![n.into(), num(v)]);
    }
    t.row(vec!["shots".into(), prof.shots.to_string()]);
    Ok(Output { json, csv: Some(prof.to_csv()), tables: vec![t], ..Default::default() })
}

fn rumin(cli: &Cli, tp: &TrialPair, dim: u32, rel_tol: f64, budget: usize) -> Result<Output> {
    let opts = RuminOptions { rel_tol, exec: cli.exec() };
    let (best, v) = if budget > 0 {
        optimize_trial(tp, dim, budget)?
    } else {
        (tp.clone(), rumin_functional_with(tp, dim, &opts)?)
    };
    let chain = k_tilde(dim, v.value)?;
    let mut t = Table::new(None, &["quantity", "value"]);
    for (n, x) in [
        ("functional", v.value),
        ("abs_error", v.abs_error),
        ("K tilde", chain.k_tilde),
        ("K tilde / K^cl", chain.excess_k),
        ("L factor", chain.excess_l_dual),
    ] {
        t.row(vec![n.into(), num(x)]);
    }
    t.row(vec!["evaluations".into(), v.evaluations.to_string()]);
    let json = json!({
        "dim": dim,
        "value": to_value(&v),
        "chain": to_value(&chain),
        "trial": to_value(&best.to_spec()),
        "tag": "derived",
    });
    Ok(Output { json, tables: vec![t], ..Default::default() })
}

fn verify(cli: &Cli, only: &[u32]) -> Result<Output> {
    let opts = VerifyOptions { tolerances: cli.tolerances.iter().cloned().collect(), only: only.to_vec(), exec: cli.exec() };
    let results = verify_all(&opts)?;
    let mut t = Table::new(None, &["criterion", "check", "source", "comparison", "expected", "got", "tolerance", "pass"]);
    let mut notes = Vec::new();
    for c in &results {
        for k in &c.checks {
            t.row(vec![
                c.id.to_string(),
                k.name.clone(),
                k.source.into(),
                format!("{:?}", k.comparison).to_lowercase(),
                num(k.expected),
                num(k.got),
                num(k.tolerance),
                k.pass.to_string(),
            ]);
        }
        let secs: f64 = c.timings.iter().map(|x| x.seconds).sum();
        notes.push(format!("criterion {}: {} {} ({secs:.2} s)", c.id, if c.pass { "PASS" } else { "FAIL" }, c.title));
        if let Some(e) = &c.error {
            notes.push(format!("    error: {e}"));
        }
        for x in c.timings.iter().filter(|x| x.seconds > x.limit) {
            notes.push(format!("    {} took {:.2} s, limit {} s", x.label, x.seconds, x.limit));
        }
    }
    let failures = results.iter().filter(|c| !c.pass).count();
    notes.push(format!("{failures} failing criteria"));
    Ok(Output {
        json: json!({ "criteria": to_value(&results), "failures": failures }),
        tables: vec![t],
        notes,
        checks_failed: failures > 0,
        ..Default::default()
    })
}
