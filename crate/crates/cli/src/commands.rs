use std::fs;
use std::path::{Path, PathBuf};

use causalflow::measures::rate_window;
use causalflow::presets::{self, conditioning_contrast};
use causalflow::{
    bivariate_closed_forms, bivariate_marginal_forms, bivariate_rates, build_window_model,
    delayed_directed_information, directed_information, estimate_window_covariance,
    geweke_index, geweke_index_empirical, infer_graph, instantaneous_information_exchange,
    measure_rate, mutual_information_block, rate_term, simulate, transfer_entropy,
    trivariate_case_rates, ARProcessSpec, CausalGraph, Conditioner, ConditioningMode,
    ConditioningPolicy, DataSource, GaussianJointModel, GewekeConditioning, GewekeKind, Horizon,
    InferenceOptions, MeasureKind, MeasureReport, Method, RateOptions, SimulationConfig,
    TermKind, TimeSeriesPanel, TrivariateCase, TrivariateRoles,
};
use clap::ValueEnum;
use serde_json::{json, Value};

use crate::args::*;
use crate::error::{CliError, Result};
use crate::io::{read_panel, read_spec, write_panel, write_panel_file, write_text, SpecFile};
use crate::render::{envelope, graph_dot, graph_json, pretty, report_json, Unit};
use crate::SCHEMA;

enum Input {
    Spec(ARProcessSpec),
    Panel(TimeSeriesPanel),
}

impl Input {
    fn load(args: &InputArgs) -> Result<(Self, Value)> {
        match (&args.spec, &args.data) {
            (Some(p), None) => Ok((Input::Spec(read_spec(p)?), json!({ "spec": p }))),
            (None, Some(p)) => Ok((Input::Panel(read_panel(p)?), json!({ "data": p }))),
            _ => Err(CliError::Usage("exactly one of --spec or --data is required".into())),
        }
    }

    fn source(&self) -> DataSource<'_> {
        match self {
            Input::Spec(s) => DataSource::Spec(s),
            Input::Panel(p) => DataSource::Panel(p),
        }
    }

    fn window_model(&self, horizon: usize) -> Result<GaussianJointModel> {
        Ok(match self {
            Input::Spec(s) => build_window_model(s, horizon)?,
            Input::Panel(p) => estimate_window_covariance(std::slice::from_ref(p), horizon)?,
        })
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn rate_options(a: &RateArgs) -> RateOptions {
    RateOptions { initial_horizon: a.initial_horizon, tol: a.tol, max_horizon: a.max_horizon }
}

fn rate_config(o: &RateOptions) -> Value {
    json!({ "initial_horizon": o.initial_horizon, "tol": o.tol, "max_horizon": o.max_horizon })
}

fn mode(m: ModeArg) -> ConditioningMode {
    match m {
        ModeArg::Full => ConditioningMode::Full,
        ModeArg::Causal => ConditioningMode::Causal,
        ModeArg::Delayed => ConditioningMode::Delayed,
    }
}

fn mode_name(m: ModeArg) -> &'static str {
    match m {
        ModeArg::Full => "full",
        ModeArg::Causal => "causal",
        ModeArg::Delayed => "delayed",
    }
}

fn parse_horizon(s: &str) -> Result<Option<usize>> {
    if s.eq_ignore_ascii_case("rate") {
        return Ok(None);
    }
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(Some(n)),
        _ => Err(CliError::Usage(format!("--horizon must be a positive integer or 'rate', got {s:?}"))),
    }
}

fn term_kind(k: KindArg) -> Option<TermKind> {
    match k {
        KindArg::Mi => Some(TermKind::MutualInformation),
        KindArg::Di | KindArg::DiCausalCond => Some(TermKind::DirectedInformation),
        KindArg::DelayedDi | KindArg::Te => Some(TermKind::DelayedDirectedInformation),
        KindArg::Iie => Some(TermKind::InstantaneousExchange),
        KindArg::GewekeFwd | KindArg::GewekeInst => None,
    }
}

fn measure_kind(k: KindArg, conditioned: bool) -> MeasureKind {
    match k {
        KindArg::Mi => MeasureKind::MutualInformation,
        KindArg::Di if !conditioned => MeasureKind::DirectedInformation,
        KindArg::Di | KindArg::DiCausalCond => MeasureKind::DirectedInformationCausalCond,
        KindArg::DelayedDi => MeasureKind::DelayedDirectedInformation,
        KindArg::Te => MeasureKind::TransferEntropy,
        KindArg::Iie => MeasureKind::InstantaneousExchange,
        KindArg::GewekeFwd => MeasureKind::GewekeForward,
        KindArg::GewekeInst => MeasureKind::GewekeInstantaneous,
    }
}

pub fn measure(a: &MeasureArgs) -> Result<()> {
    let (input, input_cfg) = Input::load(&a.input)?;
    let horizon = parse_horizon(&a.horizon)?;
    let opts = rate_options(&a.rate);
    let cond: Vec<Conditioner> = a.side.iter().map(|c| Conditioner::new(c, mode(a.cond))).collect();
    if a.kind == KindArg::DiCausalCond && cond.is_empty() {
        return Err(CliError::Usage("di-causal-cond needs at least one --side channel".into()));
    }
    if a.kind == KindArg::Te && !cond.is_empty() {
        return Err(CliError::Usage("transfer entropy takes no side channels".into()));
    }

    let report = match (term_kind(a.kind), horizon) {
        (None, Some(_)) => {
            return Err(CliError::Usage("Geweke indices are rates; use --horizon rate".into()))
        }
        (None, None) => {
            let kind = if a.kind == KindArg::GewekeFwd { GewekeKind::Forward } else { GewekeKind::Instantaneous };
            let gmode = if a.cond == ModeArg::Full { GewekeConditioning::Full } else { GewekeConditioning::Causal };
            match &input {
                Input::Spec(s) => geweke_index(s, kind, &a.source, &a.target, &a.side, gmode, &opts)?,
                Input::Panel(p) => geweke_index_empirical(p, kind, &a.source, &a.target, &a.side, gmode, a.lag)?,
            }
        }
        (Some(term), Some(n)) => {
            let m = input.window_model(n)?;
            let (x, y) = (a.source.as_str(), a.target.as_str());
            match a.kind {
                KindArg::Mi => mutual_information_block(&m, x, y, n, &cond)?,
                KindArg::Di | KindArg::DiCausalCond => directed_information(&m, x, y, n, &cond)?,
                KindArg::DelayedDi => delayed_directed_information(&m, x, y, n, &cond)?,
                KindArg::Iie => instantaneous_information_exchange(&m, x, y, n, &cond)?,
                KindArg::Te => transfer_entropy(&m, x, y, a.k.unwrap_or(n), a.l.unwrap_or(n), n)?,
                KindArg::GewekeFwd | KindArg::GewekeInst => unreachable!("handled above: {term:?}"),
            }
        }
        (Some(term), None) => {
            let mut r = match &input {
                Input::Spec(s) => measure_rate(s, term, &a.source, &a.target, &cond, &opts)?,
                Input::Panel(_) => {
                    let w = rate_window(a.window, &cond);
                    let m = input.window_model(w)?;
                    let v = rate_term(&m, term, &a.source, &a.target, &cond)?;
                    MeasureReport {
                        measure_kind: MeasureKind::MutualInformation,
                        value_nats: v.max(0.0),
                        horizon: Horizon::Rate,
                        horizon_reached: Some(w),
                        source: a.source.clone(),
                        target: a.target.clone(),
                        conditioning: cond.clone(),
                        method: Method::Empirical,
                    }
                }
            };
            r.measure_kind = measure_kind(a.kind, !cond.is_empty());
            r
        }
    };

    let config = json!({
        "command": "measure",
        "input": input_cfg,
        "kind": a.kind.to_possible_value().map(|v| v.get_name().to_string()),
        "source": a.source,
        "target": a.target,
        "horizon": a.horizon,
        "side": a.side,
        "cond": mode_name(a.cond),
        "k": a.k,
        "l": a.l,
        "window": a.window,
        "lag": a.lag,
        "rate": rate_config(&opts),
    });
    emit(a.out.as_deref(), &pretty(&report_json(&report, config, Unit::from_flag(a.bits))))
}

pub fn rates(a: &RatesArgs) -> Result<()> {
    let (input, input_cfg) = Input::load(&a.input)?;
    let opts = rate_options(&a.rate);
    let channels = input.source().channels().to_vec();
    let conditioners = |x: &str, y: &str| -> Vec<Conditioner> {
        if a.pairwise {
            return Vec::new();
        }
        channels
            .iter()
            .filter(|c| *c != x && *c != y)
            .map(|c| Conditioner::new(c, mode(a.cond)))
            .collect()
    };
    let mut cached: Option<(usize, GaussianJointModel)> = None;
    let mut rate = |term: TermKind, x: &str, y: &str| -> Result<f64> {
        let cond = conditioners(x, y);
        match &input {
            Input::Spec(s) => Ok(measure_rate(s, term, x, y, &cond, &opts)?.value_nats),
            Input::Panel(_) => {
                let w = rate_window(a.window, &cond);
                if cached.as_ref().map(|(h, _)| *h) != Some(w) {
                    cached = Some((w, input.window_model(w)?));
                }
                let m = &cached.as_ref().expect("model cached").1;
                Ok(rate_term(m, term, x, y, &cond)?.max(0.0))
            }
        }
    };

    let mut directed = Vec::new();
    let mut instantaneous = Vec::new();
    for x in &channels {
        for y in &channels {
            if x == y {
                continue;
            }
            let di = rate(TermKind::DirectedInformation, x, y)?;
            let te = rate(TermKind::DelayedDirectedInformation, x, y)?;
            directed.push(json!({ "source": x, "target": y, "di_nats": di, "te_nats": te }));
            if x < y {
                let iie = rate(TermKind::InstantaneousExchange, x, y)?;
                instantaneous.push(json!({ "a": x, "b": y, "iie_nats": iie }));
            }
        }
    }

    let unit = Unit::from_flag(a.bits);
    let config = json!({
        "command": "rates",
        "input": input_cfg,
        "cond": if a.pairwise { "none" } else { mode_name(a.cond) },
        "window": a.window,
        "method": match input { Input::Spec(_) => "analytic", Input::Panel(_) => "empirical" },
        "rate": rate_config(&opts),
    });
    let body = json!({ "directed": directed, "instantaneous": instantaneous });
    let doc = envelope("rates", config, "rates", body, unit);
    let text = match a.format {
        TableFormat::Json => pretty(&doc),
        TableFormat::Table => rates_table(&doc, unit),
    };
    emit(a.out.as_deref(), &text)
}

fn rates_table(doc: &Value, unit: Unit) -> String {
    let u = unit.name();
    let num = |v: &Value, key: &str| v[format!("{key}_{u}")].as_f64().unwrap_or(f64::NAN);
    let mut s = format!("# {} rates ({u}), cond = {}\n", SCHEMA, doc["config"]["cond"].as_str().unwrap_or(""));
    s.push_str(&format!("{:<12} {:<12} {:>14} {:>14}\n", "source", "target", "DI", "TE"));
    for r in doc["rates"]["directed"].as_array().into_iter().flatten() {
        s.push_str(&format!(
            "{:<12} {:<12} {:>14.8} {:>14.8}\n",
            r["source"].as_str().unwrap_or(""),
            r["target"].as_str().unwrap_or(""),
            num(r, "di"),
            num(r, "te")
        ));
    }
    s.push_str(&format!("\n{:<12} {:<12} {:>14}\n", "a", "b", "IIE"));
    for r in doc["rates"]["instantaneous"].as_array().into_iter().flatten() {
        s.push_str(&format!(
            "{:<12} {:<12} {:>14.8}\n",
            r["a"].as_str().unwrap_or(""),
            r["b"].as_str().unwrap_or(""),
            num(r, "iie")
        ));
    }
    s
}

fn inference_config(o: &InferenceOptions) -> Value {
    json!({
        "edge_threshold": o.edge_threshold,
        "surrogate_count": o.surrogate_count,
        "alpha": o.alpha,
        "lag": o.lag,
        "seed": o.seed,
        "rate": rate_config(&o.rate),
    })
}

fn dot_with_config(graph: &CausalGraph, name: &str, config: &Value, unit: Unit) -> String {
    format!("// {SCHEMA} {config}\n{}", graph_dot(graph, name, unit))
}

pub fn infer(a: &InferArgs) -> Result<()> {
    let (input, input_cfg) = Input::load(&a.input)?;
    let opts = InferenceOptions {
        edge_threshold: a.threshold,
        surrogate_count: a.surrogates,
        alpha: a.alpha,
        lag: a.lag,
        seed: a.seed,
        rate: rate_options(&a.rate),
    };
    let policy = match a.policy {
        PolicyArg::Pairwise => ConditioningPolicy::Pairwise,
        PolicyArg::Conditioned => ConditioningPolicy::CausallyConditioned,
    };
    let graph = infer_graph(input.source(), policy, &opts)?;
    let config = json!({
        "command": "infer",
        "input": input_cfg,
        "policy": policy,
        "inference": inference_config(&opts),
    });
    let unit = Unit::from_flag(a.bits);
    let text = match a.format {
        GraphFormat::Json => pretty(&graph_json(&graph, config, unit)),
        GraphFormat::Dot => dot_with_config(&graph, "causal", &config, unit),
    };
    emit(a.out.as_deref(), &text)
}

pub fn simulate_cmd(a: &SimulateArgs) -> Result<()> {
    let spec = read_spec(&a.spec)?;
    let mut cfg = SimulationConfig::new(a.length, 1, a.seed);
    if let Some(b) = a.burn_in {
        cfg.burn_in = b;
        cfg.stationary_init = false;
    }
    let panel = simulate(&spec, &cfg)?;
    match &a.out {
        Some(p) => {
            write_panel_file(&panel, p)?;
            let config = json!({
                "schema": SCHEMA,
                "kind": "simulation",
                "config": {
                    "command": "simulate",
                    "spec": a.spec,
                    "length": cfg.path_length,
                    "seed": cfg.seed,
                    "burn_in": cfg.burn_in,
                    "stationary_init": cfg.stationary_init,
                },
            });
            write_text(&sidecar(p), &pretty(&config))
        }
        None => {
            let stdout = std::io::stdout();
            write_panel(&panel, stdout.lock())
                .map_err(|source| CliError::Csv { path: PathBuf::from("<stdout>"), source })
        }
    }
}

/// `run.csv` -> `run.csv.meta.json`
pub fn sidecar(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn reproduce(a: &ReproduceArgs) -> Result<()> {
    fs::create_dir_all(&a.out).map_err(|source| CliError::Io { path: a.out.clone(), source })?;
    let unit = Unit::from_flag(a.bits);
    match a.preset {
        Preset::Fig2 => reproduce_fig2(a, unit),
        Preset::Bivariate => reproduce_bivariate(a, unit),
        Preset::Trivariate => reproduce_trivariate(a, unit),
    }
}

fn edge_list(pairs: &[(String, String)]) -> Value {
    json!(pairs.iter().map(|(a, b)| format!("{a}->{b}")).collect::<Vec<_>>())
}

fn reproduce_fig2(a: &ReproduceArgs, unit: Unit) -> Result<()> {
    let spec = presets::chain_case_a(0.0)?;
    let opts = InferenceOptions { seed: a.seed, ..Default::default() };
    let panel;
    let source = match a.source {
        ReproduceSource::Analytic => DataSource::Spec(&spec),
        ReproduceSource::Simulated => {
            panel = simulate(&spec, &SimulationConfig::new(a.length, 1, a.seed))?;
            DataSource::Panel(&panel)
        }
    };
    let result = conditioning_contrast(&spec, source, &opts)?;
    let config = json!({
        "command": "reproduce",
        "preset": "fig2",
        "source": format!("{:?}", a.source).to_lowercase(),
        "length": (a.source == ReproduceSource::Simulated).then_some(a.length),
        "spec": SpecFile::from_spec(&spec),
        "inference": inference_config(&opts),
    });
    for (name, g) in [("truth", &result.truth), ("pairwise", &result.pairwise), ("conditioned", &result.conditioned)] {
        write_text(&a.out.join(format!("{name}.dot")), &dot_with_config(g, name, &config, unit))?;
        write_text(&a.out.join(format!("{name}.json")), &pretty(&graph_json(g, config.clone(), unit)))?;
    }
    let spurious = result.spurious_pairwise_edges();
    let summary = json!({
        "schema": SCHEMA,
        "kind": "fig2_summary",
        "config": config,
        "truth": edge_list(&result.truth.dynamic_pairs()),
        "pairwise": edge_list(&result.pairwise.dynamic_pairs()),
        "conditioned": edge_list(&result.conditioned.dynamic_pairs()),
        "spurious_pairwise_edges": edge_list(&spurious),
        "conditioned_matches_truth": result.conditioned.same_edges(&result.truth),
        "pairwise_matches_truth": result.pairwise.same_edges(&result.truth),
    });
    write_text(&a.out.join("summary.json"), &pretty(&summary))?;
    println!(
        "truth {}\npairwise {}\nconditioned {}\nspurious pairwise edges {}",
        summary["truth"], summary["pairwise"], summary["conditioned"], summary["spurious_pairwise_edges"]
    );
    Ok(())
}

fn reproduce_bivariate(a: &ReproduceArgs, unit: Unit) -> Result<()> {
    let spec = presets::example_bivariate();
    let mut finite = Vec::new();
    for n in 1..=8 {
        let exact = bivariate_closed_forms(&spec, n)?;
        let marginal = bivariate_marginal_forms(&spec, n)?;
        let m = build_window_model(&spec, n)?;
        let numeric_mi = mutual_information_block(&m, "x", "y", n, &[])?.value_nats;
        let numeric_di = directed_information(&m, "x", "y", n, &[])?.value_nats;
        let numeric_di_back = directed_information(&m, "y", "x", n, &[])?.value_nats;
        let numeric_iie = instantaneous_information_exchange(&m, "x", "y", n, &[])?.value_nats;
        finite.push(json!({
            "n": n,
            "closed_form": { "mi_nats": exact.mi, "di_xy_nats": exact.di_xy, "di_yx_nats": exact.di_yx, "iie_nats": exact.iie },
            "marginal_variance_form": { "mi_nats": marginal.mi, "di_xy_nats": marginal.di_xy, "di_yx_nats": marginal.di_yx, "iie_nats": marginal.iie },
            "numeric": { "mi_nats": numeric_mi, "di_xy_nats": numeric_di, "di_yx_nats": numeric_di_back, "iie_nats": numeric_iie },
        }));
    }
    let opts = RateOptions::default();
    let r = bivariate_rates(&spec)?;
    let numeric = |k, x: &str, y: &str| measure_rate(&spec, k, x, y, &[], &opts).map(|m| m.value_nats);
    let rates = json!({
        "closed_form": { "di_xy_nats": r.di_xy, "di_yx_nats": r.di_yx, "te_xy_nats": r.te_xy, "te_yx_nats": r.te_yx, "iie_nats": r.iie },
        "numeric": {
            "di_xy_nats": numeric(TermKind::DirectedInformation, "x", "y")?,
            "di_yx_nats": numeric(TermKind::DirectedInformation, "y", "x")?,
            "te_xy_nats": numeric(TermKind::DelayedDirectedInformation, "x", "y")?,
            "te_yx_nats": numeric(TermKind::DelayedDirectedInformation, "y", "x")?,
            "iie_nats": numeric(TermKind::InstantaneousExchange, "x", "y")?,
        },
    });
    let config = json!({
        "command": "reproduce",
        "preset": "bivariate",
        "spec": SpecFile::from_spec(&spec),
        "rate": rate_config(&opts),
    });
    let doc = envelope("bivariate", config, "results", json!({ "finite": finite, "rates": rates }), unit);
    write_text(&a.out.join("bivariate.json"), &pretty(&doc))?;
    println!("wrote {}", a.out.join("bivariate.json").display());
    Ok(())
}

fn reproduce_trivariate(a: &ReproduceArgs, unit: Unit) -> Result<()> {
    let roles = TrivariateRoles::default();
    let opts = RateOptions::default();
    let dz = [Conditioner::new("z", ConditioningMode::Delayed)];
    let row = |spec: &ARProcessSpec, case, c_yx: f64, gamma: f64| -> Result<Value> {
        let closed = trivariate_case_rates(spec, case, &roles)?;
        let numeric = measure_rate(spec, TermKind::DirectedInformation, "y", "x", &dz, &opts)?.value_nats;
        Ok(json!({
            "c_yx": c_yx,
            "gamma_vw": gamma,
            "numeric_nats": numeric,
            "closed_form_nats": closed.exact,
            "marginal_form_nats": closed.marginal,
            "marginal_minus_numeric_nats": closed.marginal - numeric,
        }))
    };
    let mut case_a = Vec::new();
    for g in [0.0, 0.2, 0.4, 0.6] {
        case_a.push(row(&presets::chain_case_a(g)?, TrivariateCase::A, 0.0, g)?);
    }
    let mut case_b = Vec::new();
    for (c, g) in [(0.2, 0.0), (0.2, 0.4), (0.4, 0.0), (0.4, 0.4)] {
        case_b.push(row(&presets::chain_case_b(c, g)?, TrivariateCase::B, c, g)?);
    }
    let config = json!({
        "command": "reproduce",
        "preset": "trivariate",
        "measure": "causally conditioned DI rate y -> x given delayed z",
        "rate": rate_config(&opts),
    });
    let doc = envelope("trivariate", config, "results", json!({ "case_a": case_a, "case_b": case_b }), unit);
    write_text(&a.out.join("trivariate.json"), &pretty(&doc))?;
    println!("wrote {}", a.out.join("trivariate.json").display());
    Ok(())
}
