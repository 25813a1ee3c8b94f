use std::fs;
use std::path::Path;

use betagraph_core::{
    ball_statistics, convergence_sweep, eigenvalues, expected_density_numeric, histogram,
    spectral_measure_at_root, ContinuousLaw, EnsembleKind, EnsembleParams, Error, RngStream,
    TridiagonalMatrix,
};
use clap::Parser;
use serde::{Deserialize, Serialize};

use crate::emit::{self, real, Csv, Destination};
use crate::manifest::{RunManifest, TOOL_VERSION};
use crate::{
    BallStatsArgs, Cli, Command, ConvergeArgs, CrosscheckArgs, Ensemble, EnsembleArgs,
    HistogramArgs, Law, LawArgs, LawGridArgs, MatrixCommand, MatrixSource, MomentsArgs, Output,
    ReplayArgs, RootMeasureArgs, SampleArgs,
};

pub(crate) enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(format!("I/O: {e}"))
    }
}

type Outcome = Result<(), Failure>;

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

/// The JSON document written by `sample`.
#[derive(Debug, Serialize, Deserialize)]
struct MatrixDoc {
    manifest: RunManifest,
    ensemble: String,
    beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    n: usize,
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

pub(crate) fn execute(command: Command) -> Outcome {
    match command {
        Command::Sample(a) => sample(a),
        Command::Eigen(a) => eigen(a),
        Command::Rootmeasure(a) => root_measure(a),
        Command::Density(a) => density(a),
        Command::Crosscheck(a) => crosscheck(a),
        Command::Converge(a) => converge(a),
        Command::Ballstats(a) => ball_stats(a),
        Command::Moments(a) => moments(a),
        Command::Histogram(a) => histogram_cmd(a),
        Command::Replay(a) => replay(a),
    }
}

fn destination(o: &Output) -> Destination {
    Destination {
        out: o.out.clone(),
        manifest: o.manifest.clone(),
    }
}

fn ensemble_params(
    kind: Ensemble,
    beta: f64,
    gamma: Option<f64>,
) -> Result<EnsembleParams, Failure> {
    match (kind, gamma) {
        (Ensemble::Hermite, None) => Ok(EnsembleParams::hermite(beta)?),
        (Ensemble::Hermite, Some(_)) => usage("--gamma applies only to the laguerre ensemble"),
        (Ensemble::Laguerre, Some(g)) => Ok(EnsembleParams::laguerre(beta, g)?),
        (Ensemble::Laguerre, None) => usage("the laguerre ensemble needs --gamma"),
    }
}

fn record_ensemble(m: &mut RunManifest, e: &EnsembleArgs) {
    m.param("ensemble", e.ensemble.name())
        .param("beta", e.beta)
        .param_opt("gamma", e.gamma);
}

fn sample(a: SampleArgs) -> Outcome {
    let e = &a.ensemble;
    let params = ensemble_params(e.ensemble, e.beta, e.gamma)?;
    let t = params.sample(a.n, &mut RngStream::new(a.seed, 0))?;
    let mut manifest = RunManifest::new("sample", &a.output.timestamp);
    record_ensemble(&mut manifest, e);
    manifest.param("n", a.n);
    manifest.seed = Some(a.seed);
    let dest = destination(&a.output);
    if let Some(path) = &a.output.manifest {
        fs::write(path, emit::manifest_json(&manifest))?;
    }
    dest.emit_json(&MatrixDoc {
        manifest,
        ensemble: e.ensemble.name().into(),
        beta: e.beta,
        gamma: e.gamma,
        n: a.n,
        diag: t.diag().to_vec(),
        offdiag: t.offdiag().to_vec(),
    })?;
    Ok(())
}

fn read_matrix(path: &Path) -> Result<TridiagonalMatrix, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let doc: MatrixDoc = serde_json::from_str(&text).map_err(|e| {
        Failure::Runtime(format!("{} is not a matrix document: {e}", path.display()))
    })?;
    Ok(TridiagonalMatrix::new(doc.diag, doc.offdiag)?)
}

/// Load or sample the matrix and record how it was obtained.
fn load_matrix(s: &MatrixSource, m: &mut RunManifest) -> Result<TridiagonalMatrix, Failure> {
    if let Some(path) = &s.input {
        m.param("input", path.display());
        return read_matrix(path);
    }
    let (Some(kind), Some(beta), Some(n), Some(seed)) = (s.ensemble, s.beta, s.n, s.seed) else {
        return usage("give either --input or --ensemble, --beta, --n and --seed");
    };
    let params = ensemble_params(kind, beta, s.gamma)?;
    m.param("ensemble", kind.name())
        .param("beta", beta)
        .param_opt("gamma", s.gamma)
        .param("n", n);
    m.seed = Some(seed);
    Ok(params.sample(n, &mut RngStream::new(seed, 0))?)
}

fn eigen(a: MatrixCommand) -> Outcome {
    let mut manifest = RunManifest::new("eigen", &a.output.timestamp);
    let t = load_matrix(&a.source, &mut manifest)?;
    let csv = emit::eigenvalues_csv(&eigenvalues(&t));
    destination(&a.output).emit_csv(&manifest, csv)?;
    Ok(())
}

fn root_measure(a: RootMeasureArgs) -> Outcome {
    let mut manifest = RunManifest::new("rootmeasure", &a.output.timestamp);
    let t = load_matrix(&a.source, &mut manifest)?;
    manifest.param("root", a.root);
    let mu = spectral_measure_at_root(&t, a.root)?;
    destination(&a.output).emit_csv(&manifest, emit::point_measure_csv(&mu))?;
    Ok(())
}

fn build_law(l: &LawArgs) -> Result<ContinuousLaw, Failure> {
    let needs_gamma = matches!(l.law, Law::MarchenkoPastur | Law::LaguerreConditional);
    let needs_u = matches!(l.law, Law::HermiteConditional | Law::LaguerreConditional);
    if needs_gamma != l.gamma.is_some() {
        return usage(format!(
            "--gamma is {} for --law {}",
            if needs_gamma {
                "required"
            } else {
                "not accepted"
            },
            l.law.name()
        ));
    }
    if needs_u != l.u.is_some() {
        return usage(format!(
            "--u is {} for --law {}",
            if needs_u { "required" } else { "not accepted" },
            l.law.name()
        ));
    }
    let (beta, gamma, u) = (l.beta, l.gamma.unwrap_or(1.0), l.u.unwrap_or(0.0));
    Ok(match l.law {
        Law::Semicircle => ContinuousLaw::semicircle(beta),
        Law::MarchenkoPastur => ContinuousLaw::marchenko_pastur(beta, gamma),
        Law::HermiteConditional => ContinuousLaw::hermite_conditional(u, beta),
        Law::LaguerreConditional => ContinuousLaw::laguerre_conditional(u, beta, gamma),
    }?)
}

fn record_law(m: &mut RunManifest, l: &LawArgs) {
    m.param("law", l.law.name())
        .param("beta", l.beta)
        .param_opt("gamma", l.gamma)
        .param_opt("u", l.u);
}

/// Density at `x`, with a divergent endpoint reported as infinity.
fn density_or_inf(law: &ContinuousLaw, x: f64) -> Result<f64, Failure> {
    match law.density(x) {
        Ok(d) => Ok(d),
        Err(Error::SingularEndpoint(_)) => Ok(f64::INFINITY),
        Err(e) => Err(e.into()),
    }
}

fn density(a: LawGridArgs) -> Outcome {
    let law = build_law(&a.law)?;
    let mut manifest = RunManifest::new("density", &a.output.timestamp);
    record_law(&mut manifest, &a.law);
    manifest.param("grid", a.grid);
    let mut csv = Csv::new(&["x", "density"]);
    for x in a.grid.points() {
        csv.row(&[real(x), real(density_or_inf(&law, x)?)]);
    }
    destination(&a.output).emit_csv(&manifest, csv)?;
    Ok(())
}

fn crosscheck(a: CrosscheckArgs) -> Outcome {
    let e = &a.ensemble;
    let params = ensemble_params(e.ensemble, e.beta, e.gamma)?;
    let law = params.limit_law();
    let mut manifest = RunManifest::new("crosscheck", &a.output.timestamp);
    record_ensemble(&mut manifest, e);
    manifest
        .param_opt("grid", a.grid)
        .param("tol", a.tol)
        .param_opt("max-error", a.max_error);
    let points = match a.grid {
        Some(g) => g.points(),
        None => {
            let (lo, hi) = law.support();
            (1..=100)
                .map(|i| lo + (hi - lo) * i as f64 / 101.0)
                .collect()
        }
    };
    let mut csv = Csv::new(&["x", "closed_form", "quadrature", "abs_error"]);
    let mut worst = 0.0f64;
    for x in points {
        let closed = density_or_inf(&law, x)?;
        let numeric = expected_density_numeric(&params, x, a.tol)?;
        let err = (closed - numeric).abs();
        if closed.is_finite() {
            worst = worst.max(err);
        }
        csv.row(&[real(x), real(closed), real(numeric), real(err)]);
    }
    destination(&a.output).emit_csv(&manifest, csv)?;
    match a.max_error {
        Some(limit) if worst > limit => Err(Failure::Runtime(format!(
            "largest absolute error {worst:e} exceeds {limit:e}"
        ))),
        _ => Ok(()),
    }
}

fn converge(a: ConvergeArgs) -> Outcome {
    let e = &a.ensemble;
    let params = ensemble_params(e.ensemble, e.beta, e.gamma)?;
    let report = convergence_sweep(&params, &a.sizes, a.trials, &RngStream::new(a.seed, 0))?;
    let mut manifest = RunManifest::new("converge", &a.output.timestamp);
    record_ensemble(&mut manifest, e);
    let sizes: Vec<String> = a.sizes.iter().map(usize::to_string).collect();
    manifest
        .param("sizes", sizes.join(","))
        .param("trials", a.trials);
    manifest.seed = Some(a.seed);
    destination(&a.output).emit_csv(&manifest, emit::convergence_csv(&report))?;
    Ok(())
}

fn optional(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

fn ball_stats(a: BallStatsArgs) -> Outcome {
    let e = &a.ensemble;
    let params = ensemble_params(e.ensemble, e.beta, e.gamma)?;
    let stats = ball_statistics(&params, a.n, a.radius, a.draws, &RngStream::new(a.seed, 0))?;
    let mut manifest = RunManifest::new("ballstats", &a.output.timestamp);
    record_ensemble(&mut manifest, e);
    manifest
        .param("n", a.n)
        .param("radius", a.radius)
        .param("draws", a.draws);
    if a.summary {
        manifest.param("summary", true);
    }
    manifest.seed = Some(a.seed);

    let csv = if a.summary {
        let mut csv = Csv::new(&[
            "draws",
            "statistic_ks",
            "edge_gap_q99",
            "loop_deviation_q99",
        ]);
        csv.row(&[
            a.draws.to_string(),
            real(stats.root_ks()?),
            optional(stats.root_edge_gap_quantile(0.99)),
            optional(stats.loop_deviation_quantile(0.99)),
        ]);
        csv
    } else {
        let mut csv = Csv::new(&[
            "draw",
            "root",
            "u",
            "root_loop",
            "left_edge",
            "right_edge",
            "statistic",
        ]);
        for (i, d) in stats.draws.iter().enumerate() {
            let b = &d.ball;
            let left = b.root_pos.checked_sub(1).map(|j| b.edges[j]);
            let right = b.edges.get(b.root_pos).copied();
            let statistic = match params.kind() {
                EnsembleKind::Hermite => d.root_edge().map(|w| w * w / params.beta()),
                EnsembleKind::Laguerre => Some(d.root_loop()),
            };
            csv.row(&[
                i.to_string(),
                d.root.to_string(),
                real(d.root as f64 / a.n as f64),
                real(d.root_loop()),
                optional(left),
                optional(right),
                optional(statistic),
            ]);
        }
        csv
    };
    destination(&a.output).emit_csv(&manifest, csv)?;
    Ok(())
}

fn moments(a: MomentsArgs) -> Outcome {
    let law = build_law(&a.law)?;
    let mut manifest = RunManifest::new("moments", &a.output.timestamp);
    record_law(&mut manifest, &a.law);
    manifest.param("max-k", a.max_k).param("tol", a.tol);
    let mut csv = Csv::new(&["k", "moment"]);
    for k in 0..=a.max_k {
        csv.row(&[k.to_string(), real(law.moment(k, a.tol)?)]);
    }
    destination(&a.output).emit_csv(&manifest, csv)?;
    Ok(())
}

fn histogram_cmd(a: HistogramArgs) -> Outcome {
    let mut manifest = RunManifest::new("histogram", &a.output.timestamp);
    let t = load_matrix(&a.source, &mut manifest)?;
    manifest.param("grid", a.grid);
    let h = histogram(&eigenvalues(&t), &a.grid.points())?;
    destination(&a.output).emit_csv(&manifest, emit::histogram_csv(&h))?;
    Ok(())
}

fn replay(a: ReplayArgs) -> Outcome {
    let text = fs::read_to_string(&a.path)
        .map_err(|e| Failure::Runtime(format!("cannot read {}: {e}", a.path.display())))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Runtime(format!("{} is not JSON: {e}", a.path.display())))?;
    if let Some(embedded) = value.get_mut("manifest") {
        value = embedded.take();
    }
    let manifest: RunManifest = serde_json::from_value(value)
        .map_err(|e| Failure::Runtime(format!("{} holds no manifest: {e}", a.path.display())))?;
    if manifest.command == "replay" {
        return usage("a manifest cannot record a replay");
    }
    if manifest.tool_version != TOOL_VERSION {
        eprintln!(
            "warning: manifest written by version {}, replaying with {TOOL_VERSION}",
            manifest.tool_version
        );
    }
    let mut argv = vec!["betagraph".to_owned()];
    argv.extend(manifest.to_args());
    if let Some(out) = &a.out {
        argv.push("--out".into());
        argv.push(out.display().to_string());
    }
    if let Some(m) = &a.manifest {
        argv.push("--manifest".into());
        argv.push(m.display().to_string());
    }
    let cli = Cli::try_parse_from(&argv)
        .map_err(|e| Failure::Usage(format!("manifest does not form a valid command: {e}")))?;
    execute(cli.command)
}
