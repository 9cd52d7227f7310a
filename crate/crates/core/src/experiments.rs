//! Reproducible, file-emitting experiments wiring the modules together.
//!
//! Every output file opens with a header block echoing the full
//! configuration and the artifact version; identical configurations produce
//! byte-identical files. CSV floats use the shortest round-trip decimal.

use crate::dynamics::{
    classical_trajectory, coherent_report, evolve_against_reconstruction, Propagator,
    TrajectoryMethod,
};
use crate::matrix::C64;
use crate::metric::{
    biorthonormality_gram, compressed_antihermiticity_residual, divergence_exponent,
    quasi_hermiticity_residual, spectrum_via_compression, GramMethod,
};
use crate::operators::{build_hamiltonians, build_rho_eta};
use crate::params::SystemParams;
use crate::{IolError, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Experiment selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Biorth,
    Quasiherm,
    Coherent,
    Evolve,
    Classical,
    Divergence,
    All,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Biorth => "biorth",
            Command::Quasiherm => "quasiherm",
            Command::Coherent => "coherent",
            Command::Evolve => "evolve",
            Command::Classical => "classical",
            Command::Divergence => "divergence",
            Command::All => "all",
        }
    }
}

/// Output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Full experiment configuration; the canonical JSON encoding of this
/// struct is the header every output file carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub dim: usize,
    pub n_max: usize,
    pub alpha_mod: f64,
    pub omega: f64,
    pub mass: f64,
    pub hbar: f64,
    pub t_max: f64,
    pub dt: f64,
    pub nodes: usize,
    pub output_path: Option<String>,
    pub format: Format,
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        Self {
            command,
            dim: 256,
            n_max: 6,
            alpha_mod: 1.0,
            omega: 1.0,
            mass: 1.0,
            hbar: 1.0,
            t_max: 1.0,
            dt: 0.01,
            nodes: 200,
            output_path: None,
            format: Format::Csv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        SystemParams::new(self.mass, self.omega, self.hbar, self.dim)?;
        if self.alpha_mod < 0.0 {
            return Err(IolError::Config("alpha-mod must be >= 0".into()));
        }
        if self.t_max < 0.0 || self.dt <= 0.0 {
            return Err(IolError::Config("t-max must be >= 0 and dt > 0".into()));
        }
        if self.omega * self.t_max > crate::dynamics::MAX_OMEGA_T {
            return Err(IolError::Config(format!(
                "ω·t_max = {:.3} exceeds the growth budget {}",
                self.omega * self.t_max,
                crate::dynamics::MAX_OMEGA_T
            )));
        }
        if self.nodes < 8 {
            return Err(IolError::Config("nodes must be >= 8".into()));
        }
        if self.n_max > 20 {
            return Err(IolError::Config("n-max must be <= 20".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<SystemParams> {
        SystemParams::new(self.mass, self.omega, self.hbar, self.dim)
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Parses the config back out of a CSV header line (the round-trip
    /// property of every emitted file).
    pub fn from_csv_header(line: &str) -> Result<Self> {
        let payload = line
            .strip_prefix("# config: ")
            .ok_or_else(|| IolError::Config("missing config header".into()))?;
        serde_json::from_str(payload).map_err(|e| IolError::Config(format!("bad header: {e}")))
    }
}

/// One field value in an output record.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            // serde_json prints the shortest decimal that round-trips
            Value::Float(v) => serde_json::to_string(v).expect("finite float"),
            Value::Text(s) => s.clone(),
        }
    }

    fn render_json(&self) -> String {
        match self {
            Value::Text(s) => serde_json::to_string(s).expect("string"),
            other => other.render(),
        }
    }
}

/// Ordered record: field names paired with values, in column order.
pub type Record = Vec<(&'static str, Value)>;

/// A named tolerance gate with its measured value.
#[derive(Debug, Clone)]
pub struct Gate {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Gate {
    fn check(name: &str, value: f64, threshold: f64) -> Self {
        Gate { name: name.into(), value, threshold, passed: value.is_finite() && value <= threshold }
    }
}

/// Everything a run produces: records for the file, gates for the exit
/// status, and the path written.
pub struct RunOutcome {
    pub records: Vec<Record>,
    pub gates: Vec<Gate>,
    pub path: PathBuf,
}

fn float(v: f64) -> Value {
    Value::Float(v)
}

fn spectrum_records(cfg: &RunConfig) -> Result<(Vec<Record>, Vec<Gate>)> {
    let params = cfg.params()?;
    let n_top = cfg.n_max.min(5);
    let ev = spectrum_via_compression(n_top, cfg.nodes, &params)?;
    let mut records = Vec::new();
    let mut worst = 0.0f64;
    for (n, e) in ev.iter().enumerate() {
        let target = C64::new(0.0, params.energy_scale() * (n as f64 + 0.5));
        let resid = (e - target).norm();
        worst = worst.max(resid);
        records.push(vec![
            ("n", Value::Int(n as i64)),
            ("e_re", float(e.re)),
            ("e_im", float(e.im)),
            ("residual", float(resid)),
        ]);
    }
    let gates = vec![Gate::check("spectrum_residual", worst, 1e-8)];
    Ok((records, gates))
}

fn biorth_records(cfg: &RunConfig) -> Result<(Vec<Record>, Vec<Gate>)> {
    let params = cfg.params()?;
    let fock = biorthonormality_gram(cfg.n_max, GramMethod::Fock, cfg.nodes, &params)?;
    let contour = biorthonormality_gram(cfg.n_max, GramMethod::Contour, cfg.nodes, &params)?;
    let k = cfg.n_max + 1;
    let mut records = Vec::new();
    let mut agreement = 0.0f64;
    for (method, rep) in [("fock", &fock), ("contour", &contour)] {
        for m in 0..k {
            for n in 0..k {
                let g = rep.gram[m * k + n];
                let target = if m == n { 1.0 } else { 0.0 };
                records.push(vec![
                    ("method", Value::Text(method.into())),
                    ("m", Value::Int(m as i64)),
                    ("n", Value::Int(n as i64)),
                    ("g_re", float(g.re)),
                    ("g_im", float(g.im)),
                    ("dev", float((g - C64::new(target, 0.0)).norm())),
                ]);
            }
        }
    }
    for i in 0..k * k {
        agreement = agreement.max((fock.gram[i] - contour.gram[i]).norm());
    }
    let gates = vec![
        Gate::check("gram_fock", fock.max_deviation(), 1e-10),
        Gate::check("gram_contour", contour.max_deviation(), 1e-8),
        Gate::check("gram_route_agreement", agreement, 1e-6),
    ];
    Ok((records, gates))
}

fn quasiherm_records(cfg: &RunConfig) -> Result<(Vec<Record>, Vec<Gate>)> {
    let params = cfg.params()?;
    let block = 16.min(cfg.dim / 2);
    let compressed = compressed_antihermiticity_residual(block, cfg.nodes, &params)?;
    let mut records = vec![vec![
        ("name", Value::Text("compressed_antihermiticity".into())),
        ("block_lo", Value::Int(0)),
        ("block_hi", Value::Int(block as i64)),
        ("value", float(compressed)),
        ("condition_estimate", float(1.0)),
    ]];
    // The literal matrix realization is emitted for the record: its residual
    // is dominated by the truncation artifacts of the exponentiated metric
    // and grows with dim. It carries no gate.
    if cfg.dim <= 256 {
        let (hos, _) = build_hamiltonians(&params)?;
        let ihos = crate::matrix::OperatorMatrix::new(
            hos.scale(C64::new(0.0, 1.0)).into_matrix(),
            crate::matrix::Symmetry::General,
        )?;
        match build_rho_eta(&params) {
            Ok((_, eta)) => {
                let rep = quasi_hermiticity_residual(&ihos, &eta, block)?;
                records.push(vec![
                    ("name", Value::Text("matrix_route".into())),
                    ("block_lo", Value::Int(0)),
                    ("block_hi", Value::Int(block as i64)),
                    ("value", float(rep.value)),
                    ("condition_estimate", float(rep.condition_estimate)),
                ]);
            }
            Err(IolError::Overflow { norm }) => {
                records.push(vec![
                    ("name", Value::Text("matrix_route_overflow".into())),
                    ("block_lo", Value::Int(0)),
                    ("block_hi", Value::Int(block as i64)),
                    ("value", float(f64::MAX)),
                    ("condition_estimate", float(norm)),
                ]);
            }
            Err(e) => return Err(e),
        }
    }
    let gates = vec![Gate::check("quasi_hermiticity_compressed", compressed, 1e-6)];
    Ok((records, gates))
}

fn coherent_records(cfg: &RunConfig) -> Result<(Vec<Record>, Vec<Gate>)> {
    let params = cfg.params()?;
    let steps = (cfg.t_max / cfg.dt).round() as usize;
    let mut records = Vec::new();
    let mut worst_x = 0.0f64;
    let mut worst_p = 0.0f64;
    let mut worst_prod = 0.0f64;
    for k in 0..=steps {
        let t = k as f64 * cfg.dt;
        let r = coherent_report(cfg.alpha_mod, t, cfg.nodes, &params)?;
        let growth = (params.omega() * t).exp();
        let x_target = SQRT_2 * params.length_scale() * cfg.alpha_mod * growth;
        let p_target = SQRT_2 * params.momentum_scale() * cfg.alpha_mod * growth;
        if cfg.alpha_mod > 0.0 {
            worst_x = worst_x.max((r.x_mean_re - x_target).abs() / x_target);
            worst_p = worst_p.max((r.p_mean_re - p_target).abs() / p_target);
        }
        worst_prod = worst_prod.max((r.product - 0.5 * params.hbar()).abs());
        records.push(vec![
            ("t", float(t)),
            ("x_mean", float(r.x_mean_re)),
            ("p_mean", float(r.p_mean_re)),
            ("x2_mean", float(r.x2_mean_re)),
            ("p2_mean", float(r.p2_mean_re)),
            ("dx", float(r.dx)),
            ("dp", float(r.dp)),
            ("product", float(r.product)),
            ("eta_norm", float(r.eta_norm)),
        ]);
    }
    let mut gates = vec![Gate::check(
        "uncertainty_product",
        worst_prod,
        1e-8 * params.hbar(),
    )];
    if cfg.alpha_mod > 0.0 {
        gates.push(Gate::check("x_mean_growth", worst_x, 1e-5));
        gates.push(Gate::check("p_mean_growth", worst_p, 1e-5));
    }
    Ok((records, gates))
}

fn evolve_records(cfg: &RunConfig) -> Result<(Vec<Record>, Vec<Gate>)> {
    let params = cfg.params()?;
    let prop = Propagator::new(&params)?;
    let steps = (cfg.t_max / cfg.dt).round() as usize;
    let mut records = Vec::new();
    let mut worst_overlap = 0.0f64;
    let mut worst_eig = 0.0f64;
    for k in 0..=steps {
        let t = k as f64 * cfg.dt;
        let rep = evolve_against_reconstruction(cfg.alpha_mod, t, &params, &prop)?;
        worst_overlap = worst_overlap.max(rep.overlap_deviation);
        worst_eig = worst_eig.max(rep.evolved_eigen_residual);
        records.push(vec![
            ("t", float(t)),
            ("overlap_dev", float(rep.overlap_deviation)),
            ("eig_residual", float(rep.evolved_eigen_residual)),
            ("alpha_re", float(rep.alpha_t.re)),
            ("alpha_im", float(rep.alpha_t.im)),
            ("block", Value::Int(rep.block as i64)),
        ]);
    }
    let gates = vec![
        Gate::check("evolution_overlap", worst_overlap, 1e-5),
        Gate::check("evolved_eigen_residual", worst_eig, 1e-6),
    ];
    Ok((records, gates))
}

fn classical_records(cfg: &RunConfig) -> Result<(Vec<Record>, Vec<Gate>)> {
    let params = cfg.params()?;
    let steps = (cfg.t_max / cfg.dt).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|k| k as f64 * cfg.dt).collect();
    let x0 = SQRT_2 * params.length_scale() * cfg.alpha_mod;
    let p0 = SQRT_2 * params.momentum_scale() * cfg.alpha_mod;
    let closed = classical_trajectory(x0, p0, &grid, &params, TrajectoryMethod::ClosedForm)?;
    let mut records = Vec::new();
    for (k, &t) in closed.times.iter().enumerate() {
        records.push(vec![
            ("t", float(t)),
            ("x_c", float(closed.x_c[k])),
            ("p_c", float(closed.p_c[k])),
            ("method", Value::Text("closed_form".into())),
        ]);
    }
    let mut worst = 0.0f64;
    if grid.len() > 1 {
        let rk4 = classical_trajectory(x0, p0, &grid, &params, TrajectoryMethod::Rk4)?;
        for (k, &t) in rk4.times.iter().enumerate() {
            worst = worst
                .max((rk4.x_c[k] - closed.x_c[k]).abs())
                .max((rk4.p_c[k] - closed.p_c[k]).abs());
            records.push(vec![
                ("t", float(t)),
                ("x_c", float(rk4.x_c[k])),
                ("p_c", float(rk4.p_c[k])),
                ("method", Value::Text("rk4".into())),
            ]);
        }
    }
    let gates = vec![Gate::check("rk4_vs_closed_form", worst, 1e-8)];
    Ok((records, gates))
}

fn divergence_records(cfg: &RunConfig) -> Result<(Vec<Record>, Vec<Gate>)> {
    let params = cfg.params()?;
    let cutoffs = [10.0, 20.0, 40.0, 80.0];
    let mut records = Vec::new();
    let mut worst = 0.0f64;
    for n in 0..=3usize {
        let e = divergence_exponent(n, &cutoffs, &params)?;
        let expected = 2.0 * n as f64 + 1.0;
        if n >= 1 {
            worst = worst.max((e - expected).abs());
        }
        records.push(vec![
            ("n", Value::Int(n as i64)),
            ("exponent", float(e)),
            ("expected", float(expected)),
        ]);
    }
    let gates = vec![Gate::check("divergence_exponent", worst, 0.1)];
    Ok((records, gates))
}

/// The `all` command: the full gate table at the pinned acceptance
/// dimensions, independent of `--dim`.
fn all_records(cfg: &RunConfig) -> Result<(Vec<Record>, Vec<Gate>)> {
    let mut gates = Vec::new();

    let sub = |c: RunConfig| -> Result<Vec<Gate>> {
        let (_, g) = dispatch(&c)?;
        Ok(g)
    };

    let mut spectrum_cfg = cfg.clone();
    spectrum_cfg.command = Command::Spectrum;
    spectrum_cfg.dim = 64;
    gates.extend(sub(spectrum_cfg)?);

    let mut biorth_cfg = cfg.clone();
    biorth_cfg.command = Command::Biorth;
    biorth_cfg.dim = 128;
    gates.extend(sub(biorth_cfg)?);

    let mut qh_cfg = cfg.clone();
    qh_cfg.command = Command::Quasiherm;
    qh_cfg.dim = 128;
    gates.extend(sub(qh_cfg)?);

    let mut coh_cfg = cfg.clone();
    coh_cfg.command = Command::Coherent;
    coh_cfg.dim = 512;
    coh_cfg.t_max = 1.0;
    coh_cfg.dt = 0.25;
    gates.extend(sub(coh_cfg)?);

    let mut ev_cfg = cfg.clone();
    ev_cfg.command = Command::Evolve;
    ev_cfg.dim = 512;
    ev_cfg.t_max = 1.0;
    ev_cfg.dt = 0.25;
    gates.extend(sub(ev_cfg)?);

    let mut cl_cfg = cfg.clone();
    cl_cfg.command = Command::Classical;
    cl_cfg.t_max = 3.0 / cfg.omega;
    cl_cfg.dt = 1e-3 / cfg.omega;
    gates.extend(sub(cl_cfg)?);

    let mut dv_cfg = cfg.clone();
    dv_cfg.command = Command::Divergence;
    gates.extend(sub(dv_cfg)?);

    // eigen-residual of the similarity family on the central rows at 256
    {
        let params = SystemParams::new(cfg.mass, cfg.omega, cfg.hbar, 256)?;
        let (_, hr) = build_hamiltonians(&params)?;
        let mut worst = 0.0f64;
        for n in 0..=5usize {
            let v = crate::dilation::eigenfamily_column(n, 256)?;
            let hv = hr.apply(&v);
            let lam = C64::new(0.0, params.energy_scale() * (n as f64 + 0.5));
            let mut num = 0.0;
            let mut den = 0.0;
            for m in 0..128 {
                num += (hv[m] - lam * v[m]).norm_sqr();
                den += v[m].norm_sqr();
            }
            worst = worst.max((num / den).sqrt());
        }
        gates.push(Gate::check("eigen_residual_central", worst, 1e-6));
    }

    // ladder algebra on the central block at 128
    {
        let params = SystemParams::new(cfg.mass, cfg.omega, cfg.hbar, 128)?;
        let (am, abar) = crate::operators::build_inverted_ladder(&params)?;
        let comm = crate::matrix::OperatorMatrix::new_unchecked(
            am.mul(&abar).as_matrix() - abar.mul(&am).as_matrix(),
            crate::matrix::Symmetry::General,
        );
        let worst_comm = comm.block_max_diff(&crate::matrix::identity(128), 64);
        let rep = crate::operators::verify_similarity(&params)?;
        gates.push(Gate::check("ladder_commutator", worst_comm, 1e-8));
        gates.push(Gate::check("ladder_hamiltonian_form", rep.ladder_form, 1e-8));
    }

    let records = gates
        .iter()
        .map(|g| {
            vec![
                ("gate", Value::Text(g.name.clone())),
                ("value", float(g.value)),
                ("threshold", float(g.threshold)),
                (
                    "status",
                    Value::Text(if g.passed { "pass".into() } else { "fail".into() }),
                ),
            ]
        })
        .collect();
    Ok((records, gates))
}

fn dispatch(cfg: &RunConfig) -> Result<(Vec<Record>, Vec<Gate>)> {
    cfg.validate()?;
    match cfg.command {
        Command::Spectrum => spectrum_records(cfg),
        Command::Biorth => biorth_records(cfg),
        Command::Quasiherm => quasiherm_records(cfg),
        Command::Coherent => coherent_records(cfg),
        Command::Evolve => evolve_records(cfg),
        Command::Classical => classical_records(cfg),
        Command::Divergence => divergence_records(cfg),
        Command::All => all_records(cfg),
    }
}

/// Resolves the output path: explicit path, else
/// `$IOL_SEED_DIR/<command>.<ext>`, else `./<command>.<ext>`.
pub fn resolve_output_path(cfg: &RunConfig) -> PathBuf {
    if let Some(p) = &cfg.output_path {
        return PathBuf::from(p);
    }
    let ext = match cfg.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let name = format!("{}.{}", cfg.command.name(), ext);
    match std::env::var_os("IOL_SEED_DIR") {
        Some(dir) => Path::new(&dir).join(name),
        None => PathBuf::from(name),
    }
}

/// Runs the configured experiment and writes its artifact file.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let (records, gates) = dispatch(cfg)?;
    let path = resolve_output_path(cfg);
    emit(&records, cfg, &path)?;
    Ok(RunOutcome { records, gates, path })
}

/// Writes records in the configured format, atomically (temp file plus
/// rename). Refuses an empty record list.
pub fn emit(records: &[Record], cfg: &RunConfig, path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(IolError::Config("refusing to emit an empty record list".into()));
    }
    let mut body = String::new();
    match cfg.format {
        Format::Csv => {
            body.push_str(&format!("# config: {}\n", cfg.canonical_json()));
            body.push_str(&format!("# artifact: iol {}\n", env!("CARGO_PKG_VERSION")));
            let headers: Vec<&str> = records[0].iter().map(|(k, _)| *k).collect();
            body.push_str(&headers.join(","));
            body.push('\n');
            for rec in records {
                let row: Vec<String> = rec.iter().map(|(_, v)| v.render()).collect();
                body.push_str(&row.join(","));
                body.push('\n');
            }
        }
        Format::Json => {
            body.push_str("{\n");
            body.push_str(&format!("  \"config\": {},\n", cfg.canonical_json()));
            body.push_str(&format!(
                "  \"artifact\": \"iol {}\",\n",
                env!("CARGO_PKG_VERSION")
            ));
            body.push_str("  \"records\": [\n");
            for (i, rec) in records.iter().enumerate() {
                let fields: Vec<String> = rec
                    .iter()
                    .map(|(k, v)| format!("\"{}\": {}", k, v.render_json()))
                    .collect();
                body.push_str(&format!("    {{{}}}", fields.join(", ")));
                body.push_str(if i + 1 < records.len() { ",\n" } else { "\n" });
            }
            body.push_str("  ]\n}\n");
        }
    }
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(body.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}
