//! One function per subcommand. Each returns a JSON value; formatting and
//! the manifest are handled by the caller.

use std::collections::BTreeMap;
use std::path::Path;

use onesided_core::bounds::{self, BoundReport, Hypothesis, TheoremId};
use onesided_core::config::{parse_config, Config, ConfigFile};
use onesided_core::precision;
use onesided_core::quadrature::TrigPolynomial;
use onesided_core::search::continuous::polynomial_minimum;
use onesided_core::search::scan::exact_period_scan;
use onesided_core::search::{
    certify_cs_equals_ct, continuous_minimum_time, continuous_minimum_torus, cosine_torus, kronecker_witness,
    verify_theorem, CertifyOptions, Restrict, ScanOptions, Subject, TimeOptions, TorusFunction, TorusOptions, Verdict,
    VerifyOptions,
};
use onesided_core::spectrum::{eval_power_sum, extremal_example, validate_config, CosineConfig, SpectrumConfig};
use onesided_core::structure::{
    choose_projection, detect_cosine_degeneracy, detect_degeneracy, group_decompose, projected_polynomial,
};
use onesided_core::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::{Cli, Command, Failure, Outcome, RestrictArg};

const DEFAULT_SCAN_BUDGET: u64 = 1_000_000;
const DEFAULT_EFFORT: u64 = 10_000_000;
const DEFAULT_WITNESS_DELTA: f64 = 0.01;

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn load(cli: &Cli) -> Result<Config, Failure> {
    let path = cli.config.as_ref().ok_or_else(|| Failure { code: 2, message: "--config is required".into() })?;
    load_path(path)
}

fn load_path(path: &Path) -> Result<Config, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure { code: 2, message: format!("cannot read {}: {e}", path.display()) })?;
    Ok(parse_config(&text)?)
}

fn spectrum_of(cfg: &Config) -> Result<SpectrumConfig, Failure> {
    match cfg {
        Config::Spectrum(s) => Ok(s.clone()),
        Config::Cosine(c) => Ok(c.to_spectrum()?),
    }
}

fn restrict_for(arg: RestrictArg, cfg: &SpectrumConfig) -> Result<Restrict, Failure> {
    Ok(match arg {
        RestrictArg::All => Restrict::All,
        RestrictArg::Odd => Restrict::Odd,
        RestrictArg::Torsion => Restrict::Residue { modulus: group_decompose(cfg)?.torsion_order, residue: 0 },
    })
}

fn outcome(result: Value, code: u8) -> Outcome {
    Outcome { result, budgets: BTreeMap::new(), args: BTreeMap::new(), code }
}

pub fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Eval { from, to } => eval(cli, *from, *to),
        Command::Bounds => Ok(outcome(Value::Array(bound_set(&load(cli)?)?.iter().map(to_value).collect()), 0)),
        Command::Verify { theorem } => verify(cli, *theorem),
        Command::Degeneracy => degeneracy(cli),
        Command::Decompose => decompose(cli),
        Command::Continuous { resolution, horizon } => continuous(cli, *resolution, *horizon),
        Command::Witness { t0 } => witness(cli, t0),
        Command::Certify => certify(cli),
        Command::Extremal { n, .. } => extremal(*n),
        Command::Corpus { dir } => corpus(cli, dir),
    }
}

fn eval(cli: &Cli, from: i64, to: i64) -> Result<Outcome, Failure> {
    let cfg = load(cli)?;
    let mut rows = Vec::new();
    for k in from..=to {
        let value = match &cfg {
            Config::Spectrum(s) => eval_power_sum(s, k)?,
            Config::Cosine(c) => {
                if k.abs() >= precision::MAX_PHASE_INDEX {
                    return Err(Error::IndexOutOfRange(k).into());
                }
                c.value_at(k)
            }
        };
        rows.push(json!({"k": k, "value": value}));
    }
    let mut o = outcome(Value::Array(rows), 0);
    o.args.insert("from".into(), json!(from));
    o.args.insert("to".into(), json!(to));
    Ok(o)
}

fn projection_failure(id: TheoremId, e: &Error) -> BoundReport {
    BoundReport {
        theorem_id: id,
        value: f64::NAN,
        strict: id.is_strict(),
        hypotheses_met: vec![Hypothesis { name: "projection_to_distinct_nonzero_frequencies".into(), met: false }],
        note: Some(e.to_string()),
    }
}

fn lemma_reports(cfg: &SpectrumConfig) -> Result<Vec<BoundReport>, Failure> {
    let poly = group_decompose(cfg)
        .and_then(|g| choose_projection(&g))
        .and_then(|p| TrigPolynomial::new(projected_polynomial(cfg, &p)));
    Ok(match poly {
        Ok(poly) => vec![bounds::bound_lemma1(&poly)?, bounds::bound_lemma2(&poly)],
        Err(e) => vec![projection_failure(TheoremId::Lemma1, &e), projection_failure(TheoremId::Lemma2, &e)],
    })
}

/// Every bound for a configuration; inapplicable ones carry false hypotheses.
pub fn bound_set(cfg: &Config) -> Result<Vec<BoundReport>, Failure> {
    match cfg {
        Config::Spectrum(s) => {
            let verdict = detect_degeneracy(s);
            let mut out = vec![
                bounds::bound_thm1(s),
                bounds::bound_cor1(s),
                bounds::bound_thm2(s),
                bounds::bound_thm4(s, verdict.token()),
            ];
            if s.n() >= 2 {
                out.push(bounds::bound_cor3_for(s)?);
            }
            out.extend(lemma_reports(s)?);
            Ok(out)
        }
        Config::Cosine(c) => {
            let (_, verdict) = detect_cosine_degeneracy(c)?;
            Ok(vec![bounds::bound_cor4(c), bounds::bound_cor5(c, verdict.token())?])
        }
    }
}

fn applicable_theorems(cfg: &Config) -> Vec<TheoremId> {
    match cfg {
        Config::Spectrum(s) => {
            let mut ids = vec![TheoremId::Thm1, TheoremId::Cor1, TheoremId::Thm2, TheoremId::Thm4];
            if s.n() >= 2 {
                ids.push(TheoremId::Cor3);
            }
            ids.extend([TheoremId::Lemma1, TheoremId::Lemma2]);
            ids
        }
        Config::Cosine(_) => vec![TheoremId::Cor4, TheoremId::Cor5],
    }
}

fn verify_options(cli: &Cli, cfg: &Config) -> Result<VerifyOptions, Failure> {
    let restrict = match cli.restrict {
        RestrictArg::All => Restrict::All,
        other => restrict_for(other, &spectrum_of(cfg)?)?,
    };
    let budget = cli.budget.unwrap_or(DEFAULT_SCAN_BUDGET);
    Ok(VerifyOptions { scan: ScanOptions { restrict, ..ScanOptions::with_budget(budget) } })
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Inconclusive => 3,
        Verdict::HypothesisFail => 4,
    }
}

fn verify(cli: &Cli, id: TheoremId) -> Result<Outcome, Failure> {
    let cfg = load(cli)?;
    let opts = verify_options(cli, &cfg)?;
    let subject = match &cfg {
        Config::Spectrum(s) => Subject::Spectrum(s),
        Config::Cosine(c) => Subject::Cosine(c),
    };
    let record = verify_theorem(subject, id, &opts)?;
    let mut o = outcome(to_value(&record), verdict_code(record.verdict));
    o.budgets.insert("scan".into(), json!(opts.scan.budget));
    o.args.insert("theorem".into(), json!(id));
    o.args.insert("restrict".into(), to_value(&opts.scan.restrict));
    Ok(o)
}

fn degeneracy(cli: &Cli) -> Result<Outcome, Failure> {
    let result = match load(cli)? {
        Config::Spectrum(s) => json!({"verdict": detect_degeneracy(&s), "validation": validate_config(&s)}),
        Config::Cosine(c) => {
            let (spectrum, verdict) = detect_cosine_degeneracy(&c)?;
            json!({"verdict": verdict, "validation": validate_config(&spectrum)})
        }
    };
    Ok(outcome(result, 0))
}

fn decompose(cli: &Cli) -> Result<Outcome, Failure> {
    let cfg = spectrum_of(&load(cli)?)?;
    let g = group_decompose(&cfg)?;
    let mut result = json!({"decomposition": g, "pairing_holds": g.pairing_holds()});
    match choose_projection(&g) {
        Ok(p) => {
            let poly = projected_polynomial(&cfg, &p);
            result["projection"] = to_value(&p);
            result["polynomial"] = Value::Array(poly.iter().map(|(b, q)| json!({"b": [b.re, b.im], "q": q})).collect());
        }
        Err(e) => result["projection_error"] = json!(e.to_string()),
    }
    Ok(outcome(result, 0))
}

fn torus_options(cli: &Cli) -> TorusOptions {
    TorusOptions { seed: cli.seed, ..TorusOptions::default() }
}

fn torus_of_cosine(c: &CosineConfig, opts: &TorusOptions) -> Result<Value, Failure> {
    let (zb, f) = cosine_torus(c)?;
    Ok(json!({"lambda": zb.lambda, "minimum": continuous_minimum_torus(&f, opts)?}))
}

fn continuous(cli: &Cli, resolution: Option<f64>, horizon: Option<f64>) -> Result<Outcome, Failure> {
    let cfg = load(cli)?;
    let mut time = TimeOptions { resolution, ..TimeOptions::default() };
    if let Some(h) = horizon {
        time.horizon = h;
    }
    let torus = torus_options(cli);
    let result = match &cfg {
        Config::Cosine(c) => {
            let line = continuous_minimum_time(c, &time)?;
            let torus = if c.all_exact() && c.rational_period().is_none() { Some(torus_of_cosine(c, &torus)?) } else { None };
            json!({"line": line, "torus": torus})
        }
        Config::Spectrum(s) => {
            let g = group_decompose(s)?;
            let f = TorusFunction::from_decomposition(&g, s.coefficients())?;
            let m = continuous_minimum_torus(&f, &torus)?;
            let poly = choose_projection(&g).and_then(|p| TrigPolynomial::new(projected_polynomial(s, &p)));
            let projected = match poly {
                Ok(poly) => to_value(&polynomial_minimum(&poly, &time)?),
                Err(e) => json!({"error": e.to_string()}),
            };
            json!({"torus": m, "torsion_order": g.torsion_order, "projected": projected})
        }
    };
    let mut o = outcome(result, 0);
    o.args.insert("horizon".into(), json!(time.horizon));
    o.args.insert("resolution".into(), json!(time.resolution));
    Ok(o)
}

fn witness(cli: &Cli, t0: &str) -> Result<Outcome, Failure> {
    let cfg = load(cli)?;
    let basis = match &cfg {
        Config::Spectrum(s) => s.basis().clone(),
        Config::Cosine(c) => c.basis().clone(),
    };
    let target = precision::parse_rational(t0)?;
    let delta = cli.delta.unwrap_or(DEFAULT_WITNESS_DELTA);
    let effort = cli.budget.unwrap_or(DEFAULT_EFFORT);
    let torsion = match cli.restrict {
        RestrictArg::Torsion => group_decompose(&spectrum_of(&cfg)?)?.torsion_order,
        RestrictArg::All => 1,
        RestrictArg::Odd => return Err(Failure { code: 2, message: "witness supports --restrict all or torsion".into() }),
    };
    let report = kronecker_witness(&basis, &target, delta, effort, torsion)?;
    let mut o = outcome(to_value(&report), 0);
    o.budgets.insert("effort".into(), json!(effort));
    o.args.insert("t0".into(), json!(t0));
    o.args.insert("delta".into(), json!(delta));
    Ok(o)
}

fn certify(cli: &Cli) -> Result<Outcome, Failure> {
    let Config::Cosine(c) = load(cli)? else {
        return Err(Failure { code: 2, message: "certify needs a cosine configuration".into() });
    };
    let opts = CertifyOptions {
        epsilon: cli.epsilon.unwrap_or(1e-3),
        effort: cli.budget.unwrap_or(DEFAULT_EFFORT),
        delta0: cli.delta.unwrap_or(0.1),
        torus: torus_options(cli),
        ..CertifyOptions::default()
    };
    let report = certify_cs_equals_ct(&c, &opts)?;
    let code = if report.certified { 0 } else { 3 };
    let mut o = outcome(to_value(&report), code);
    o.budgets.insert("effort".into(), json!(opts.effort));
    o.args.insert("epsilon".into(), json!(opts.epsilon));
    o.args.insert("delta0".into(), json!(opts.delta0));
    Ok(o)
}

fn extremal(n: usize) -> Result<Outcome, Failure> {
    let cfg = extremal_example(n)?;
    let period = exact_period_scan(&cfg)?;
    let result = json!({
        "config": ConfigFile::from_spectrum(&cfg),
        "period_scan": period,
        "bound_thm1": bounds::bound_thm1(&cfg),
        "bound_cor1": bounds::bound_cor1(&cfg),
    });
    let mut o = outcome(result, 0);
    o.args.insert("n".into(), json!(n));
    Ok(o)
}

#[derive(Serialize)]
struct CorpusRow {
    file: String,
    theorem_id: Option<TheoremId>,
    bound: Option<f64>,
    min_found: Option<f64>,
    k_best: Option<i64>,
    budget: Option<u64>,
    verdict: Option<Verdict>,
    margin: Option<f64>,
    method: Option<String>,
    error: Option<String>,
}

fn corpus(cli: &Cli, dir: &Path) -> Result<Outcome, Failure> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| Failure { code: 2, message: format!("cannot read {}: {e}", dir.display()) })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut rows = Vec::new();
    let mut code = 0;
    for path in &files {
        let file = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
        let empty = |error: String| CorpusRow {
            file: file.clone(),
            theorem_id: None,
            bound: None,
            min_found: None,
            k_best: None,
            budget: None,
            verdict: None,
            margin: None,
            method: None,
            error: Some(error),
        };
        let cfg = match load_path(path) {
            Ok(cfg) => cfg,
            Err(f) => {
                rows.push(empty(f.message));
                continue;
            }
        };
        let opts = match verify_options(cli, &cfg) {
            Ok(o) => o,
            Err(f) => {
                rows.push(empty(f.message));
                continue;
            }
        };
        for id in applicable_theorems(&cfg) {
            let subject = match &cfg {
                Config::Spectrum(s) => Subject::Spectrum(s),
                Config::Cosine(c) => Subject::Cosine(c),
            };
            match verify_theorem(subject, id, &opts) {
                Ok(r) => {
                    if r.verdict == Verdict::Fail {
                        code = 1;
                    }
                    rows.push(CorpusRow {
                        file: file.clone(),
                        theorem_id: Some(id),
                        bound: Some(r.bound),
                        min_found: r.min_found,
                        k_best: r.k_best,
                        budget: Some(r.budget),
                        verdict: Some(r.verdict),
                        margin: r.margin,
                        method: Some(r.method),
                        error: None,
                    });
                }
                Err(e) => rows.push(CorpusRow { theorem_id: Some(id), ..empty(e.to_string()) }),
            }
        }
    }
    let mut o = outcome(Value::Array(rows.iter().map(to_value).collect()), code);
    o.budgets.insert("scan".into(), json!(cli.budget.unwrap_or(DEFAULT_SCAN_BUDGET)));
    o.args.insert("dir".into(), json!(dir.display().to_string()));
    Ok(o)
}
