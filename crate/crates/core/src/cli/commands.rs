use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::output::{fmt_num, json_text, Sink};
use super::*;
use crate::blochcore::MeasurementBasis;
use crate::blochcore::{born_probabilities, OperatorState, PureState};
use crate::collapse::{collapse, collapse_batch, exact_outcome_measures, outcome_counts, RngStream};
use crate::entangle::{
    chsh, compose_entangled, decompose, is_product_correlation, load_counts_csv, marginal_deviations,
    no_signaling_check_counts, optimal_singlet_settings, product_residual, singlet, table_from_state, Direction,
    Setting,
};
use crate::interference::{
    classify, default_layout, interference_terms, load_dataset_csv, normalization_residual, render_screen,
    synthetic_dataset, Exemplar, ExemplarPosition, GridSpec,
};
use crate::perception::warping;
use crate::wordgas::{
    connective_ratio, count_microstates, fit_gas, fit_power_ladder, ingest, plot_rows, zipf_report, EnergyLadder,
    FitOptions, GasModel, PowerLadderOptions, RankedSpectrum, Statistics, TokenizerConfig, SAMPLE_CORPUS,
};
use crate::{Tolerances, C64};

struct Ctx<'a> {
    output: Option<&'a Path>,
    format: Option<Format>,
    tol: Tolerances,
}

impl Ctx<'_> {
    fn format(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(Error::InvalidInput(format!(
                "format {f:?} is not available for this subcommand"
            )))
        }
    }
}

pub(super) fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let tol = match &cli.tolerances {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
        None => Tolerances::DEFAULT,
    };
    let ctx = Ctx {
        output: cli.output.as_deref(),
        format: cli.format,
        tol,
    };
    let mut sink = Sink::new(stdout, ctx.output)?;
    let out = sink.writer();
    match &cli.command {
        Command::Measure(a) => measure(&ctx, a, out),
        Command::BornCheck(a) => born_check(&ctx, a, out),
        Command::Percept(a) => percept(&ctx, a, out),
        Command::Entangle(a) => entangle(&ctx, a, out),
        Command::Chsh(a) => chsh_cmd(&ctx, a, out),
        Command::Nosignal(a) => nosignal(&ctx, a, out),
        Command::WordgasFit(a) => wordgas_fit(&ctx, a, out),
        Command::Zipf(a) => zipf(&ctx, a, out),
        Command::Microstates(a) => microstates(&ctx, a, out),
        Command::Connectives(a) => connectives(&ctx, a, out),
        Command::Interference(a) => interference(&ctx, a, out),
        Command::RenderScreen(a) => render(&ctx, a, out),
    }?;
    sink.finish()
}

// ---- input helpers ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    dim: usize,
    #[serde(default)]
    amplitudes: Option<Vec<C64>>,
    #[serde(default)]
    matrix: Option<Vec<Vec<C64>>>,
}

enum AnyState {
    Pure(PureState),
    Operator(OperatorState),
}

impl AnyState {
    fn operator(&self) -> OperatorState {
        match self {
            AnyState::Pure(p) => p.projector(),
            AnyState::Operator(o) => o.clone(),
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let file = File::open(path)?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

fn state_from_raw(raw: RawState, tol: &Tolerances) -> Result<AnyState> {
    match (raw.amplitudes, raw.matrix) {
        (Some(a), None) => {
            if a.len() != raw.dim {
                return Err(Error::DimensionMismatch {
                    expected: raw.dim,
                    found: a.len(),
                });
            }
            Ok(AnyState::Pure(PureState::with_tolerances(a, tol)?))
        }
        (None, Some(m)) => {
            let n = raw.dim;
            if m.len() != n || m.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidInput(format!("matrix must be {n}x{n}")));
            }
            let matrix = DMatrix::from_fn(n, n, |i, j| m[i][j]);
            Ok(AnyState::Operator(OperatorState::with_tolerances(matrix, tol)?))
        }
        _ => Err(Error::InvalidInput(
            "state needs exactly one of \"amplitudes\" or \"matrix\"".into(),
        )),
    }
}

fn load_state(path: &Path, tol: &Tolerances) -> Result<AnyState> {
    state_from_raw(read_json(path)?, tol)
}

fn load_pure(path: &Path, tol: &Tolerances) -> Result<PureState> {
    match load_state(path, tol)? {
        AnyState::Pure(p) => Ok(p),
        AnyState::Operator(_) => Err(Error::InvalidInput(format!(
            "{}: a pure state with \"amplitudes\" is required",
            path.display()
        ))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBasis {
    eigenstates: Vec<RawState>,
}

fn load_basis(path: Option<&PathBuf>, dim: usize, tol: &Tolerances) -> Result<MeasurementBasis> {
    let Some(path) = path else {
        return MeasurementBasis::computational(dim);
    };
    let raw: RawBasis = read_json(path)?;
    let states = raw
        .eigenstates
        .into_iter()
        .map(|r| match state_from_raw(r, tol)? {
            AnyState::Pure(p) => Ok(p),
            AnyState::Operator(_) => Err(Error::InvalidInput("basis eigenstates must be pure".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    let basis = MeasurementBasis::new(states)?;
    if basis.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: basis.dim(),
        });
    }
    Ok(basis)
}

fn parse_floats(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("{what}: cannot parse {s:?} as a number")))
        })
        .collect()
}

fn parse_complex(text: &str, what: &str) -> Result<C64> {
    match parse_floats(text, what)?.as_slice() {
        [re] => Ok(C64::new(*re, 0.0)),
        [re, im] => Ok(C64::new(*re, *im)),
        _ => Err(Error::InvalidInput(format!("{what}: expected \"re,im\""))),
    }
}

fn parse_direction(text: &str, what: &str) -> Result<Direction> {
    match parse_floats(text, what)?.as_slice() {
        [x, y, z] => Ok([*x, *y, *z]),
        _ => Err(Error::InvalidInput(format!("{what}: expected \"x,y,z\""))),
    }
}

fn settings(s: &Settings) -> Result<[Direction; 4]> {
    let defaults = optimal_singlet_settings();
    let pick = |v: &Option<String>, name: &str, d: Direction| match v {
        Some(t) => parse_direction(t, name),
        None => Ok(d),
    };
    Ok([
        pick(&s.a, "--a", defaults[0])?,
        pick(&s.a_prime, "--a-prime", defaults[1])?,
        pick(&s.b, "--b", defaults[2])?,
        pick(&s.b_prime, "--b-prime", defaults[3])?,
    ])
}

fn two_qubit(path: Option<&PathBuf>, tol: &Tolerances) -> Result<OperatorState> {
    let rho = match path {
        Some(p) => load_state(p, tol)?.operator(),
        None => singlet().projector(),
    };
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    Ok(rho)
}

fn read_corpus(c: &CorpusArgs) -> Result<(String, TokenizerConfig)> {
    let text = match &c.input {
        Some(p) => std::fs::read_to_string(p)?,
        None => SAMPLE_CORPUS.to_string(),
    };
    let config = TokenizerConfig {
        keep_inner_apostrophes: c.keep_apostrophes,
        ..TokenizerConfig::default()
    };
    Ok((text, config))
}

fn read_dataset(d: &DatasetArgs) -> Result<Vec<Exemplar>> {
    match &d.input {
        Some(p) => load_dataset_csv(BufReader::new(File::open(p)?)),
        None => Ok(synthetic_dataset()),
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    out.write_all(json_text(value)?.as_bytes())?;
    Ok(())
}

fn join_nums(xs: &[f64]) -> String {
    xs.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(",")
}

// ---- subcommands ----

fn measure(ctx: &Ctx, a: &MeasureArgs, out: &mut dyn Write) -> Result<()> {
    let seed = a.seed.ok_or_else(|| Error::InvalidInput("--seed is required".into()))?;
    let state = load_pure(&a.state, &ctx.tol)?;
    let basis = load_basis(a.basis.as_ref(), state.dim(), &ctx.tol)?;
    match ctx.format(Format::Csv, &[Format::Csv, Format::Json])? {
        Format::Csv => {
            let n = basis.dim();
            let header: Vec<String> = (0..n).map(|i| format!("lambda_{i}")).collect();
            writeln!(out, "run,outcome,{}", header.join(","))?;
            for r in collapse_batch(&state, &basis, seed, a.runs)? {
                writeln!(out, "{},{},{}", r.run, r.outcome, join_nums(r.lambda.coordinates()))?;
            }
        }
        _ => {
            let traces = (0..a.runs)
                .map(|r| collapse(&state, &basis, &RngStream::new(seed, r)))
                .collect::<Result<Vec<_>>>()?;
            write_json(out, &traces)?;
        }
    }
    Ok(())
}

fn born_check(ctx: &Ctx, a: &BornCheckArgs, out: &mut dyn Write) -> Result<()> {
    let seed = a.seed.ok_or_else(|| Error::InvalidInput("--seed is required".into()))?;
    ctx.format(Format::Json, &[Format::Json])?;
    let state = match (&a.state, a.dim) {
        (Some(p), _) => load_pure(p, &ctx.tol)?,
        (None, Some(n)) => PureState::equal_superposition(n)?,
        (None, None) => return Err(Error::InvalidInput("give --state or --dim".into())),
    };
    if let Some(n) = a.dim {
        if n != state.dim() {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: state.dim(),
            });
        }
    }
    if a.runs == 0 {
        return Err(Error::InvalidInput("--runs must be positive".into()));
    }
    let basis = load_basis(a.basis.as_ref(), state.dim(), &ctx.tol)?;
    let born = born_probabilities(&state, &basis)?;
    let geometric = exact_outcome_measures(&state, &basis)?;
    let counts = outcome_counts(&state, &basis, seed, a.runs)?;
    let empirical: Vec<f64> = counts.iter().map(|c| *c as f64 / a.runs as f64).collect();
    let max_abs_dev = born
        .iter()
        .zip(&empirical)
        .map(|(b, e)| (b - e).abs())
        .fold(0.0, f64::max);
    write_json(
        out,
        &json!({
            "born": born,
            "geometric": geometric,
            "empirical": empirical,
            "counts": counts,
            "runs": a.runs,
            "seed": seed,
            "maxAbsDev": max_abs_dev,
        }),
    )
}

#[derive(Deserialize)]
struct PerceptRow {
    theta_a: f64,
    theta_b: f64,
    #[serde(default)]
    phi_a: f64,
    #[serde(default)]
    phi_b: f64,
}

fn percept(ctx: &Ctx, a: &PerceptArgs, out: &mut dyn Write) -> Result<()> {
    let rows: Vec<PerceptRow> = match &a.input {
        Some(p) => csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(BufReader::new(File::open(p)?))
            .deserialize()
            .collect::<std::result::Result<_, _>>()?,
        None => match (a.theta_a, a.theta_b) {
            (Some(theta_a), Some(theta_b)) => vec![PerceptRow {
                theta_a,
                theta_b,
                phi_a: a.phi_a,
                phi_b: a.phi_b,
            }],
            _ => return Err(Error::InvalidInput("give --theta-a and --theta-b, or --input".into())),
        },
    };
    let basis = MeasurementBasis::computational(2)?;
    let reports = rows
        .iter()
        .map(|r| {
            warping(
                &PureState::qubit(r.theta_a, r.phi_a),
                &PureState::qubit(r.theta_b, r.phi_b),
                &basis,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    match ctx.format(Format::Csv, &[Format::Csv, Format::Json])? {
        Format::Csv => {
            writeln!(out, "theta_a,theta_b,d_stim,d_percept,kind")?;
            for (r, w) in rows.iter().zip(&reports) {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    fmt_num(r.theta_a),
                    fmt_num(r.theta_b),
                    fmt_num(w.d_stimuli),
                    fmt_num(w.d_percepts),
                    w.kind.as_str()
                )?;
            }
            Ok(())
        }
        _ => {
            let items: Vec<Value> = rows
                .iter()
                .zip(&reports)
                .map(|(r, w)| {
                    json!({
                        "thetaA": r.theta_a,
                        "thetaB": r.theta_b,
                        "dStim": w.d_stimuli,
                        "dPercept": w.d_percepts,
                        "kind": w.kind.as_str(),
                    })
                })
                .collect();
            write_json(out, &items)
        }
    }
}

fn entangle(ctx: &Ctx, a: &EntangleArgs, out: &mut dyn Write) -> Result<()> {
    ctx.format(Format::Json, &[Format::Json])?;
    let (rho, composed) = match (&a.state, &a.psi, &a.phi) {
        (Some(p), _, _) => (two_qubit(Some(p), &ctx.tol)?, None),
        (None, Some(psi), Some(phi)) => {
            let psi = load_pure(psi, &ctx.tol)?;
            let phi = load_pure(phi, &ctx.tol)?;
            let a1 = parse_complex(&a.a1, "--a1")?;
            let a2 = parse_complex(&a.a2, "--a2")?;
            let state = compose_entangled(&psi, &phi, a1, a2)?;
            (state.projector(), Some(state))
        }
        _ => (singlet().projector(), Some(singlet())),
    };
    let t = decompose(&rho)?;
    let mut report = json!({
        "decomposition": t,
        "weightedNormSq": t.weighted_norm_sq(),
        "purity": rho.purity(),
        "corrNorm": t.corr_norm(),
        "productResidual": product_residual(&t),
        "productCorrelation": is_product_correlation(&t, a.product_tol),
    });
    if let Some(s) = composed {
        report["state"] = serde_json::to_value(&s)?;
    }
    write_json(out, &report)
}

fn chsh_cmd(ctx: &Ctx, a: &ChshArgs, out: &mut dyn Write) -> Result<()> {
    ctx.format(Format::Json, &[Format::Json])?;
    let rho = two_qubit(a.state.as_ref(), &ctx.tol)?;
    let [sa, sap, sb, sbp] = settings(&a.settings)?;
    let report = chsh(&rho, &sa, &sap, &sb, &sbp)?;
    write_json(
        out,
        &json!({
            "E": report.e,
            "S": report.s,
            "classicalBound": 2.0,
            "tsirelsonBound": 2.0 * 2f64.sqrt(),
            "violatesClassical": report.s.abs() > 2.0,
        }),
    )
}

fn nosignal(ctx: &Ctx, a: &NosignalArgs, out: &mut dyn Write) -> Result<()> {
    ctx.format(Format::Json, &[Format::Json])?;
    if let Some(path) = &a.input {
        let counts = load_counts_csv(BufReader::new(File::open(path)?))?;
        let tables = counts.iter().map(|c| c.to_table()).collect::<Result<Vec<_>>>()?;
        let deviations = marginal_deviations(&tables)?;
        let report = match a.threshold {
            Some(th) => {
                let violations: Vec<_> = deviations.iter().filter(|d| d.deviation > th).cloned().collect();
                json!({
                    "tables": tables,
                    "deviations": deviations,
                    "threshold": th,
                    "violations": violations,
                    "passes": violations.is_empty(),
                })
            }
            None => {
                let violations = no_signaling_check_counts(&counts, a.sigmas)?;
                json!({
                    "tables": tables,
                    "deviations": deviations,
                    "sigmas": a.sigmas,
                    "violations": violations,
                    "passes": violations.is_empty(),
                })
            }
        };
        return write_json(out, &report);
    }
    let rho = two_qubit(a.state.as_ref(), &ctx.tol)?;
    let [sa, sap, sb, sbp] = settings(&a.settings)?;
    let pairs = [(&sa, &sb), (&sa, &sbp), (&sap, &sb), (&sap, &sbp)];
    let tables = Setting::ALL
        .iter()
        .zip(pairs)
        .map(|(s, (u, v))| table_from_state(&rho, *s, u, v))
        .collect::<Result<Vec<_>>>()?;
    let threshold = a.threshold.unwrap_or(1e-9);
    let deviations = marginal_deviations(&tables)?;
    let violations: Vec<_> = deviations.iter().filter(|d| d.deviation > threshold).cloned().collect();
    write_json(
        out,
        &json!({
            "tables": tables,
            "deviations": deviations,
            "threshold": threshold,
            "violations": violations,
            "passes": violations.is_empty(),
        }),
    )
}

fn write_spectrum(path: &Path, spectrum: &RankedSpectrum, ladder: &EnergyLadder) -> Result<()> {
    let mut w = std::io::BufWriter::new(File::create(path)?);
    writeln!(w, "rank,token,count,energy")?;
    for (i, (token, count)) in spectrum.entries().iter().enumerate() {
        writeln!(w, "{},{},{},{}", i + 1, token, count, fmt_num(ladder.energy(i)))?;
    }
    w.flush()?;
    Ok(())
}

fn wordgas_fit(ctx: &Ctx, a: &WordgasArgs, out: &mut dyn Write) -> Result<()> {
    ctx.format(Format::Json, &[Format::Json])?;
    let (text, config) = read_corpus(&a.corpus)?;
    let spectrum = ingest(&text, &config)?;
    let opts = FitOptions::default();
    let mut report = serde_json::Map::new();
    report.insert("tokens".into(), json!(spectrum.total()));
    report.insert("levels".into(), json!(spectrum.levels()));

    let ladder = if let Some(grid) = &a.p_grid {
        let grid = parse_floats(grid, "--p-grid")?;
        let popts = PowerLadderOptions {
            delta_e: a.delta_e,
            e0: a.e0,
            fit: opts,
        };
        let (ladder, fit) = fit_power_ladder(&spectrum, &grid, &popts)?;
        report.insert("pGrid".into(), json!(grid));
        report.insert("bestP".into(), json!(ladder.exponent()));
        report.insert("BE".into(), serde_json::to_value(fit)?);
        ladder
    } else {
        let ladder = match a.ladder {
            LadderChoice::Linear => EnergyLadder::Linear,
            LadderChoice::Power => EnergyLadder::power(a.p, a.delta_e, a.e0)?,
        };
        if matches!(a.model, ModelChoice::Be | ModelChoice::Both) {
            let fit = fit_gas(&spectrum, &ladder, GasModel::BoseEinstein, &opts)?;
            report.insert("BE".into(), serde_json::to_value(fit)?);
        }
        if matches!(a.model, ModelChoice::Mb | ModelChoice::Both) {
            let fit = fit_gas(&spectrum, &ladder, GasModel::MaxwellBoltzmann, &opts)?;
            report.insert("MB".into(), serde_json::to_value(fit)?);
        }
        ladder
    };
    report.insert("ladder".into(), serde_json::to_value(ladder)?);
    if let (Some(be), Some(mb)) = (report.get("BE"), report.get("MB")) {
        let e_be = be["fitError"].as_f64().unwrap_or(f64::NAN);
        let e_mb = mb["fitError"].as_f64().unwrap_or(f64::NAN);
        report.insert(
            "better".into(),
            json!(if e_be < e_mb {
                "BE"
            } else if e_mb < e_be {
                "MB"
            } else {
                "tie"
            }),
        );
    }
    if let Some(path) = &a.spectrum_out {
        write_spectrum(path, &spectrum, &ladder)?;
    }
    if let Some(path) = &a.plot_out {
        let occ = spectrum.occupations();
        let be = fit_gas(&spectrum, &ladder, GasModel::BoseEinstein, &opts)?;
        let mb = fit_gas(&spectrum, &ladder, GasModel::MaxwellBoltzmann, &opts)?;
        let mut w = std::io::BufWriter::new(File::create(path)?);
        writeln!(w, "log_energy,log_count_data,log_count_be,log_count_mb")?;
        for r in plot_rows(&occ, &ladder, &be, &mb) {
            writeln!(
                w,
                "{}",
                join_nums(&[r.log_energy, r.log_count_data, r.log_count_be, r.log_count_mb])
            )?;
        }
        w.flush()?;
    }
    write_json(out, &Value::Object(report))
}

fn zipf(ctx: &Ctx, a: &ZipfArgs, out: &mut dyn Write) -> Result<()> {
    ctx.format(Format::Json, &[Format::Json])?;
    let (text, config) = read_corpus(&a.corpus)?;
    let spectrum = ingest(&text, &config)?;
    let report = zipf_report(&spectrum)?;
    write_json(
        out,
        &json!({
            "tokens": spectrum.total(),
            "levels": spectrum.levels(),
            "exponent": report.exponent,
            "r2": report.r2,
        }),
    )
}

fn microstates(ctx: &Ctx, a: &MicrostatesArgs, out: &mut dyn Write) -> Result<()> {
    ctx.format(Format::Json, &[Format::Json])?;
    let chosen: Vec<Statistics> = match a.stats {
        StatsChoice::Mb => vec![Statistics::MaxwellBoltzmann],
        StatsChoice::Be => vec![Statistics::BoseEinstein],
        StatsChoice::Fd => vec![Statistics::FermiDirac],
        StatsChoice::All => Statistics::ALL.to_vec(),
    };
    // u128 counts are written as exact JSON integers
    let mut fields = Vec::new();
    for s in chosen {
        let value = match count_microstates(a.n, a.k, s) {
            Ok(c) => c.to_string(),
            Err(Error::ExclusionViolated { .. }) if a.stats == StatsChoice::All => "null".to_string(),
            Err(e) => return Err(e),
        };
        fields.push(format!("  \"{}\": {}", s.label(), value));
    }
    writeln!(out, "{{\n{}\n}}", fields.join(",\n"))?;
    Ok(())
}

fn connectives(ctx: &Ctx, a: &ConnectivesArgs, out: &mut dyn Write) -> Result<()> {
    let (text, config) = read_corpus(&a.corpus)?;
    let pairs = a
        .pair
        .iter()
        .map(|p| match p.split_once(',') {
            Some((x, y)) if !x.trim().is_empty() && !y.trim().is_empty() => {
                Ok((x.trim().to_string(), y.trim().to_string()))
            }
            _ => Err(Error::InvalidInput(format!("--pair {p:?}: expected \"x,y\""))),
        })
        .collect::<Result<Vec<_>>>()?;
    let counts = connective_ratio(&text, &pairs, &config);
    match ctx.format(Format::Json, &[Format::Json, Format::Csv])? {
        Format::Csv => {
            writeln!(out, "word_x,word_y,and_count,or_count,ratio")?;
            for c in &counts {
                let ratio = match c.ratio {
                    crate::wordgas::Ratio::Finite(r) => fmt_num(r),
                    crate::wordgas::Ratio::Infinite => "infinite".into(),
                    crate::wordgas::Ratio::Undefined => "undefined".into(),
                };
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    c.word_x, c.word_y, c.and_count, c.or_count, ratio
                )?;
            }
            Ok(())
        }
        _ => write_json(out, &counts),
    }
}

fn interference(ctx: &Ctx, a: &InterferenceArgs, out: &mut dyn Write) -> Result<()> {
    let data = read_dataset(&a.dataset)?;
    let records = interference_terms(&data)?;
    let residual = normalization_residual(&data);
    match ctx.format(Format::Csv, &[Format::Csv, Format::Json])? {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["label", "p1", "p2", "p12", "I", "cos_theta", "extension"])?;
            for r in &records {
                let ext = serde_json::to_value(classify(r))?;
                w.write_record([
                    r.exemplar.clone(),
                    fmt_num(r.p1),
                    fmt_num(r.p2),
                    fmt_num(r.p12),
                    fmt_num(r.interference),
                    r.cos_theta.map(fmt_num).unwrap_or_default(),
                    ext.as_str().unwrap_or_default().to_string(),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
        _ => {
            let items: Vec<Value> = records
                .iter()
                .map(|r| {
                    let mut v = serde_json::to_value(r)?;
                    v["extension"] = serde_json::to_value(classify(r))?;
                    Ok(v)
                })
                .collect::<Result<_>>()?;
            write_json(
                out,
                &json!({
                    "synthetic": a.dataset.synthetic,
                    "records": items,
                    "normalizationResidual": residual,
                }),
            )
        }
    }
}

#[derive(Deserialize)]
struct LayoutRow {
    label: String,
    x: f64,
    y: f64,
    width: f64,
}

fn render(ctx: &Ctx, a: &RenderScreenArgs, out: &mut dyn Write) -> Result<()> {
    let data = read_dataset(&a.dataset)?;
    if a.width == 0 || a.height == 0 {
        return Err(Error::InvalidInput("--width and --height must be positive".into()));
    }
    let (default_positions, default_spec) = default_layout(data.len(), a.width, a.height);
    let positions: Vec<ExemplarPosition> = match &a.layout {
        Some(p) => {
            let rows: Vec<LayoutRow> = csv::ReaderBuilder::new()
                .trim(csv::Trim::All)
                .from_reader(BufReader::new(File::open(p)?))
                .deserialize()
                .collect::<std::result::Result<_, _>>()?;
            let by_label: BTreeMap<&str, &LayoutRow> = rows.iter().map(|r| (r.label.as_str(), r)).collect();
            data.iter()
                .map(|x| {
                    by_label
                        .get(x.label.as_str())
                        .map(|r| ExemplarPosition {
                            x: r.x,
                            y: r.y,
                            width: r.width,
                        })
                        .ok_or_else(|| Error::InvalidInput(format!("layout has no row for {:?}", x.label)))
                })
                .collect::<Result<_>>()?
        }
        None => default_positions,
    };
    let spec = match &a.bounds {
        Some(b) => match parse_floats(b, "--bounds")?.as_slice() {
            [x_min, x_max, y_min, y_max] if x_min < x_max && y_min < y_max => GridSpec {
                width: a.width,
                height: a.height,
                x_min: *x_min,
                x_max: *x_max,
                y_min: *y_min,
                y_max: *y_max,
            },
            _ => {
                return Err(Error::InvalidInput(
                    "--bounds: expected increasing \"x_min,x_max,y_min,y_max\"".into(),
                ))
            }
        },
        None if a.layout.is_none() => default_spec,
        None => bounds_around(&positions, a.width, a.height),
    };
    let raster = render_screen(&data, &positions, &spec)?;
    match ctx.format(Format::Csv, &[Format::Csv, Format::Pgm, Format::Json])? {
        Format::Csv => raster.write_csv(&mut *out, fmt_num),
        Format::Pgm => raster.write_pgm(&mut *out),
        Format::Json => write_json(out, &raster),
    }
}

/// Bounds enclosing every bump with a margin of three widths.
fn bounds_around(positions: &[ExemplarPosition], width: usize, height: usize) -> GridSpec {
    let fold =
        |f: fn(f64, f64) -> f64, init: f64, g: &dyn Fn(&ExemplarPosition) -> f64| positions.iter().map(g).fold(init, f);
    GridSpec {
        width,
        height,
        x_min: fold(f64::min, f64::INFINITY, &|p| p.x - 3.0 * p.width),
        x_max: fold(f64::max, f64::NEG_INFINITY, &|p| p.x + 3.0 * p.width),
        y_min: fold(f64::min, f64::INFINITY, &|p| p.y - 3.0 * p.width),
        y_max: fold(f64::max, f64::NEG_INFINITY, &|p| p.y + 3.0 * p.width),
    }
}
