use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tlincomb::fitting::{self, Diagnostics, FitReport, Method};
use tlincomb::lincomb::{abs_moment_k2, LinComb, SeriesDiag};
use tlincomb::mceval::{self, BhattaEstimate, RTrace, ScalingTrace, SweepConfig, SweepRow};
use tlincomb::selftest;
use tlincomb::specfun::Accuracy;
use tlincomb::tdist::ScaledT;

use crate::config::{Format, Meta, OutputSpec, RunConfig, SweepKind, SweepSpec, TermSpec};
use crate::output::{self, CliResult, Failure, EXIT_SELFTEST};
use crate::{EvalArgs, FitArgs, OutArgs, SelftestArgs, StatsArgs, SweepArgs};

fn lincomb(terms: &[TermSpec]) -> CliResult<LinComb> {
    let pairs: Vec<(f64, f64)> = terms.iter().map(|t| (t.sigma, t.nu)).collect();
    LinComb::from_pairs(&pairs).map_err(|e| Failure::invalid(e.to_string()))
}

fn output_spec(o: &OutArgs) -> OutputSpec {
    OutputSpec {
        path: o.out.clone(),
        format: o.format,
    }
}

fn check_r(method: Method, r: Option<f64>) -> CliResult {
    match r {
        None => Ok(()),
        Some(_) if method != Method::CfBisect => Err(Failure::invalid(format!("--r is only valid with CF_BISECT (got {method})"))),
        Some(r) if !(r > 0.0) || !r.is_finite() => Err(Failure::invalid(format!("r must be positive (got {r})"))),
        Some(_) => Ok(()),
    }
}

#[derive(Serialize)]
struct CfPoint {
    r: f64,
    cf: f64,
}

#[derive(Serialize)]
struct StatsOutput {
    config: RunConfig,
    meta: Meta,
    #[serde(rename = "K")]
    k: usize,
    second_moment: f64,
    fourth_moment: Option<f64>,
    abs_moment: Option<f64>,
    abs_moment_note: Option<&'static str>,
    series: Option<SeriesDiag>,
    cf: Vec<CfPoint>,
}

#[derive(Serialize)]
struct StatRow<'a> {
    quantity: &'a str,
    r: Option<f64>,
    value: Option<f64>,
}

pub fn stats(a: StatsArgs) -> CliResult {
    let cfg = RunConfig {
        terms: a.terms.0.clone(),
        method: None,
        r: None,
        n_samples: 0,
        bins: 0,
        seed: 0,
        output: output_spec(&a.out),
    };
    let zc = lincomb(&cfg.terms)?;
    let m2 = zc.second_moment();
    let t = zc.terms();
    let (abs_moment, series, note) = match t.len() {
        1 => (Some(t[0].dist().abs_moment(1.0).map_err(|e| Failure::from_core(&e))?), None, None),
        2 => {
            let (v, d) = abs_moment_k2(&t[0], &t[1], &Accuracy::default()).map_err(|e| Failure::from_core(&e))?;
            (Some(v), Some(d), None)
        }
        _ => (None, None, Some("via iterative fit only")),
    };
    let grid = a.grid.map(|g| g.0).unwrap_or_else(|| vec![1.0 / m2.sqrt()]);
    if grid.iter().any(|r| !r.is_finite()) {
        return Err(Failure::invalid("r grid must be finite"));
    }
    let cf = grid.iter().map(|&r| CfPoint { r, cf: zc.cf_z(r) }).collect();
    let report = StatsOutput {
        meta: Meta::of(&cfg),
        k: zc.len(),
        second_moment: m2,
        fourth_moment: zc.fourth_moment().ok(),
        abs_moment,
        abs_moment_note: note,
        series,
        cf,
        config: cfg,
    };
    let bytes = match a.out.format {
        Format::Json => output::json(&report)?,
        Format::Csv => {
            let mut rows = vec![
                StatRow {
                    quantity: "second_moment",
                    r: None,
                    value: Some(report.second_moment),
                },
                StatRow {
                    quantity: "fourth_moment",
                    r: None,
                    value: report.fourth_moment,
                },
                StatRow {
                    quantity: "abs_moment",
                    r: None,
                    value: report.abs_moment,
                },
            ];
            rows.extend(report.cf.iter().map(|p| StatRow {
                quantity: "cf",
                r: Some(p.r),
                value: Some(p.cf),
            }));
            output::csv(&rows)?
        }
    };
    output::emit(a.out.out.as_deref(), &bytes)
}

/// What `tlincomb fit` writes and `tlincomb eval --fit` reads back.
#[derive(Debug, Serialize, Deserialize)]
pub struct FitOutput {
    pub config: RunConfig,
    pub meta: Meta,
    pub sigma_z: f64,
    pub nu_z: f64,
    pub method: Method,
    pub r_used: Option<f64>,
    pub iterations: usize,
    pub diagnostics: Diagnostics,
}

impl FitOutput {
    fn new(config: RunConfig, rep: FitReport) -> Self {
        FitOutput {
            meta: Meta::of(&config),
            config,
            sigma_z: rep.sigma(),
            nu_z: rep.nu(),
            method: rep.method,
            r_used: rep.r_used,
            iterations: rep.iterations,
            diagnostics: rep.diagnostics,
        }
    }
}

#[derive(Serialize)]
struct FitRow {
    sigma_z: f64,
    nu_z: f64,
    method: Method,
    r_used: Option<f64>,
    iterations: usize,
    effectively_gaussian: bool,
}

pub fn fit(a: FitArgs) -> CliResult {
    check_r(a.method, a.r)?;
    let cfg = RunConfig {
        terms: a.terms.0.clone(),
        method: Some(a.method),
        r: a.r,
        n_samples: 0,
        bins: 0,
        seed: 0,
        output: output_spec(&a.out),
    };
    let zc = lincomb(&cfg.terms)?;
    let rep = fitting::fit(&zc, a.method, a.r).map_err(|e| Failure::from_core(&e))?;
    let out = FitOutput::new(cfg, rep);
    let bytes = match a.out.format {
        Format::Json => output::json(&out)?,
        Format::Csv => output::csv(&[FitRow {
            sigma_z: out.sigma_z,
            nu_z: out.nu_z,
            method: out.method,
            r_used: out.r_used,
            iterations: out.iterations,
            effectively_gaussian: out.diagnostics.effectively_gaussian,
        }])?,
    };
    output::emit(a.out.out.as_deref(), &bytes)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EvalOutput {
    pub config: RunConfig,
    pub meta: Meta,
    pub sigma_z: f64,
    pub nu_z: f64,
    pub method: Method,
    pub r_used: Option<f64>,
    pub d_b: f64,
    pub ks: f64,
    pub bhattacharyya: BhattaEstimate,
}

#[derive(Serialize)]
struct EvalRow {
    sigma_z: f64,
    nu_z: f64,
    method: Method,
    r_used: Option<f64>,
    d_b: f64,
    ks: f64,
    n: usize,
    bins: usize,
    seed: u64,
}

fn read_fit(path: &Path) -> CliResult<FitOutput> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(Some(path), e))?;
    serde_json::from_str(&text).map_err(|e| Failure::invalid(format!("{}: not a fit report: {e}", path.display())))
}

pub fn eval(a: EvalArgs) -> CliResult {
    if a.mc.n < 2 {
        return Err(Failure::invalid(format!("n = {} must be at least 2", a.mc.n)));
    }
    let (terms, method, r, r_used, fitted) = match &a.fit {
        Some(path) => {
            let f = read_fit(path)?;
            let fitted = ScaledT::new(f.sigma_z, f.nu_z).map_err(|e| Failure::invalid(e.to_string()))?;
            (f.config.terms, f.method, f.config.r, f.r_used, fitted)
        }
        None => {
            let terms = a.terms.clone().expect("clap requires --terms without --fit").0;
            let method = a.method.unwrap_or(Method::CfClosed);
            check_r(method, a.r)?;
            let rep = fitting::fit(&lincomb(&terms)?, method, a.r).map_err(|e| Failure::from_core(&e))?;
            (terms, method, a.r, rep.r_used, rep.fitted)
        }
    };
    let zc = lincomb(&terms)?;
    let ev = mceval::evaluate(&zc, &fitted, a.mc.n, a.mc.bins, a.mc.seed).map_err(|e| Failure::from_core(&e))?;
    let cfg = RunConfig {
        terms,
        method: Some(method),
        r,
        n_samples: a.mc.n,
        bins: a.mc.bins,
        seed: a.mc.seed,
        output: output_spec(&a.out),
    };
    let out = EvalOutput {
        meta: Meta::of(&cfg),
        config: cfg,
        sigma_z: fitted.sigma(),
        nu_z: fitted.nu(),
        method,
        r_used,
        d_b: ev.bhattacharyya.d_b,
        ks: ev.ks,
        bhattacharyya: ev.bhattacharyya,
    };
    let bytes = match a.out.format {
        Format::Json => output::json(&out)?,
        Format::Csv => output::csv(&[EvalRow {
            sigma_z: out.sigma_z,
            nu_z: out.nu_z,
            method,
            r_used,
            d_b: out.d_b,
            ks: out.ks,
            n: out.meta.n,
            bins: out.meta.bins,
            seed: out.meta.seed,
        }])?,
    };
    output::emit(a.out.out.as_deref(), &bytes)
}

#[derive(Serialize)]
struct SweepOutput<'a> {
    config: &'a RunConfig,
    sweep: &'a SweepSpec,
    meta: &'a Meta,
    rows: &'a [SweepRow],
    #[serde(skip_serializing_if = "Option::is_none")]
    scaling: Option<&'a [ScalingTrace]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    traces: Option<&'a [RTrace]>,
}

#[derive(Serialize)]
struct Sidecar<'a, T> {
    config: &'a RunConfig,
    sweep: &'a SweepSpec,
    meta: &'a Meta,
    #[serde(flatten)]
    body: T,
}

pub fn sweep(a: SweepArgs) -> CliResult {
    let counts = |g: &crate::Grid, what| g.as_counts(what).map_err(Failure::invalid);
    let spec = SweepSpec {
        kind: a.sweep,
        grid: a.grid.0.clone(),
        k_set: match a.sweep {
            SweepKind::K => counts(&a.grid, "K")?,
            _ => counts(&a.k_set, "K")?,
        },
        nu_set: match a.sweep {
            SweepKind::Nu => a.grid.0.clone(),
            _ => a.nu_set.0.clone(),
        },
        methods: match a.sweep {
            SweepKind::Nu => a.methods.clone(),
            _ => vec![Method::CfBisect],
        },
    };
    let cfg = RunConfig {
        terms: Vec::new(),
        method: None,
        r: None,
        n_samples: a.mc.n,
        bins: a.mc.bins,
        seed: a.mc.seed,
        output: OutputSpec {
            path: a.out.clone(),
            format: a.format,
        },
    };
    let sc = SweepConfig {
        n: a.mc.n,
        bins: a.mc.bins,
        seed: a.mc.seed,
    };
    let meta = Meta::of(&cfg);
    let core = |e: tlincomb::Error| Failure::invalid(e.to_string());

    let (rows, scaling, traces) = match a.sweep {
        SweepKind::Nu => (mceval::sweep_nu(&spec.nu_set, &spec.k_set, &spec.methods, &sc).map_err(core)?, None, None),
        SweepKind::K => {
            let s = mceval::sweep_k(&spec.k_set, &spec.nu_set, &sc).map_err(core)?;
            (s.rows, Some(s.scaling), None)
        }
        SweepKind::R => {
            let s = mceval::sweep_r(&spec.grid, &spec.nu_set, &spec.k_set, &sc).map_err(core)?;
            (s.rows, None, Some(s.traces))
        }
    };

    let bytes = match a.format {
        Format::Csv => output::csv(&rows)?,
        Format::Json => output::json(&SweepOutput {
            config: &cfg,
            sweep: &spec,
            meta: &meta,
            rows: &rows,
            scaling: scaling.as_deref(),
            traces: traces.as_deref(),
        })?,
    };
    output::emit(a.out.as_deref(), &bytes)?;

    if let Some(path) = &a.out {
        let side = |suffix: &str, bytes: Vec<u8>| {
            let p = output::sidecar(path, suffix);
            fs::write(&p, bytes).map_err(|e| Failure::io(Some(&p), e))
        };
        if let Some(s) = &scaling {
            side("scaling", output::json(&Sidecar { config: &cfg, sweep: &spec, meta: &meta, body: ScalingBody { scaling: s } })?)?;
        }
        if let Some(t) = &traces {
            side("traces", output::json(&Sidecar { config: &cfg, sweep: &spec, meta: &meta, body: TraceBody { traces: t } })?)?;
        }
    }

    let lines = match a.sweep {
        SweepKind::Nu => summarize_nu(&rows),
        SweepKind::K => summarize_k(&rows, scaling.as_deref().unwrap_or_default()),
        SweepKind::R => summarize_r(traces.as_deref().unwrap_or_default()),
    };
    // keep stdout clean when it carries the table
    for l in lines {
        if a.out.is_some() {
            println!("{l}");
        } else {
            eprintln!("{l}");
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ScalingBody<'a> {
    scaling: &'a [ScalingTrace],
}

#[derive(Serialize)]
struct TraceBody<'a> {
    traces: &'a [RTrace],
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
}

fn summarize_nu(rows: &[SweepRow]) -> Vec<String> {
    let mut cells: BTreeMap<(u64, usize), Vec<&SweepRow>> = BTreeMap::new();
    for r in rows {
        cells.entry((r.nu.to_bits(), r.k)).or_default().push(r);
    }
    let mut keys: Vec<_> = cells.keys().copied().collect();
    keys.sort_by(|a, b| f64::from_bits(a.0).total_cmp(&f64::from_bits(b.0)).then(a.1.cmp(&b.1)));
    keys.iter()
        .map(|key| {
            let cell = &cells[key];
            let best = cell
                .iter()
                .filter_map(|r| r.d_b.map(|d| (r, d)))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            let head = format!("nu={} K={}", f64::from_bits(key.0), key.1);
            match best {
                Some((r, d)) => format!("{head}: best {} (d_B {d:.3e})", r.method),
                None => format!("{head}: no d_B"),
            }
        })
        .collect()
}

fn summarize_k(rows: &[SweepRow], scaling: &[ScalingTrace]) -> Vec<String> {
    let mut lines = Vec::new();
    for s in scaling {
        let trace: Vec<&SweepRow> = rows.iter().filter(|r| r.nu == s.nu).collect();
        let increasing = |get: fn(&SweepRow) -> Option<f64>| {
            let v: Vec<f64> = trace.iter().filter_map(|r| get(r)).collect();
            v.len() == trace.len() && v.windows(2).all(|w| w[1] > w[0])
        };
        let law = |f: &Option<mceval::ScalingFit>| match f {
            Some(f) => format!("{:.4} K^{:.4} + {:.4} (rmse {:.2e})", f.gamma1, f.gamma2, f.gamma3, f.rmse),
            None => "no fit".into(),
        };
        lines.push(format!(
            "nu={}: sigma_z ~ {} [increasing: {}]; nu_z ~ {} [increasing: {}]",
            s.nu,
            law(&s.sigma_z),
            increasing(|r| r.sigma_z),
            law(&s.nu_z),
            increasing(|r| r.nu_z),
        ));
    }
    lines
}

fn summarize_r(traces: &[RTrace]) -> Vec<String> {
    traces
        .iter()
        .map(|t| {
            format!(
                "nu={} K={}: argmin r {}, d_B in [{}, {}], interior minimum {}, d_B at r=E[Z^2]^-1/2 {}",
                t.nu,
                t.k,
                fmt_opt(t.argmin_r),
                fmt_opt(t.min_d_b),
                fmt_opt(t.max_d_b),
                t.interior_minimum,
                fmt_opt(t.canonical.d_b),
            )
        })
        .collect()
}

pub fn selftest(a: SelftestArgs) -> CliResult {
    let rep = selftest::run();
    if a.json {
        output::emit(None, &output::json(&rep)?)?;
    } else {
        for c in &rep.checks {
            println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
    }
    if rep.passed() {
        Ok(())
    } else {
        let names: Vec<&str> = rep.failures().map(|c| c.name.as_str()).collect();
        Err(Failure {
            code: EXIT_SELFTEST,
            msg: format!("{} check(s) failed: {}", names.len(), names.join("; ")),
        })
    }
}
