//! Command-line grammar and dispatch to the kernel.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use algebroidlab_core::algebroid::{validate_algebroid, validate_representation, LieAlgebroidPatch, Representation};
use algebroidlab_core::ce::{cohomology, CeComplex, JetWindow, Mode};
use algebroidlab_core::cover::{build_double_complex, localization_check, nerve, ss_pages, Localization};
use algebroidlab_core::exact::{format_rational, parse_rational, Rational, RationalMatrix, WeightAssignment};
use algebroidlab_core::pullback::{
    euler_homotopy_verify, pullback_structured, rescaling_family, transversal_iso_check, transversality_check,
    StructuredMap,
};
use algebroidlab_core::transport::{
    gauss_manin, monodromy_check, parallel_transport, subexhaust, verify_subexhaustion, ClassMap, FloatMatrix,
    TransportError,
};
use clap::{Parser, ValueEnum};

use crate::model::{parse_model, AlgebroidEntry, Model, ModelError};
use crate::report::{Format, Report, Status, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Check,
    Cohomology,
    Pullback,
    Transversal,
    Ss,
    Localize,
    Transport,
    Monodromy,
    Subexhaust,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeKind {
    Weight,
    Jet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapKind {
    Identity,
    Projection,
    Slice,
    Point,
    Rescaling,
}

#[derive(Clone, Debug, Parser)]
#[command(name = "algebroidlab", version, about = "Exact computations with Lie algebroids on polynomial patches")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Model file (TOML).
    pub file: PathBuf,
    /// Object to work on; all objects of the relevant kind when omitted.
    #[arg(long)]
    pub name: Option<String>,
    /// Cohomological degree.
    #[arg(long)]
    pub deg: Option<usize>,
    #[arg(long, value_enum, default_value_t = ModeKind::Weight)]
    pub mode: ModeKind,
    /// Jet window `start:end:span`.
    #[arg(long, value_parser = parse_window)]
    pub window: Option<JetWindow>,
    /// Weight range `lo:hi`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub weights: Option<(i64, i64)>,
    /// Integrator tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Last spectral sequence page.
    #[arg(long, default_value_t = 4)]
    pub rmax: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Jet order for axiom validation (the patch order by default).
    #[arg(long)]
    pub order: Option<u32>,
    #[arg(long, value_enum)]
    pub map: Option<MapKind>,
    /// Comma-separated rationals: the image of a point inclusion, or the
    /// source point of a transversality check.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub point: Vec<String>,
    /// Rescaling parameter.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Fibre coordinates of a projection (new names) or a rescaling.
    #[arg(long, value_delimiter = ',')]
    pub fibre: Vec<String>,
    /// Normal coordinates of a slice.
    #[arg(long, value_delimiter = ',')]
    pub slice: Vec<String>,
    /// Chart to localize at.
    #[arg(long)]
    pub at: Option<String>,
    /// Number of subexhaustion steps.
    #[arg(long, default_value_t = 8)]
    pub steps: usize,
}

fn parse_window(s: &str) -> Result<JetWindow, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, c] = parts[..] else {
        return Err("expected start:end:span".into());
    };
    let num = |x: &str| x.trim().parse::<u32>().map_err(|e| format!("`{x}`: {e}"));
    let (start, end, span) = (num(a)?, num(b)?, num(c)?);
    if start > end || span == 0 {
        return Err("need start <= end and a positive span".into());
    }
    Ok(JetWindow::new(start, end, span as usize))
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(':').ok_or("expected lo:hi")?;
    let num = |x: &str| x.trim().parse::<i64>().map_err(|e| format!("`{x}`: {e}"));
    let (lo, hi) = (num(a)?, num(b)?);
    if lo > hi {
        return Err("need lo <= hi".into());
    }
    Ok((lo, hi))
}

impl Cli {
    /// Canonical echo of the invocation, used as the report header.
    pub fn echo(&self) -> String {
        let mut s = format!("{} {}", self.command.to_possible_value().expect("named").get_name(), self.file.display());
        if let Some(n) = &self.name {
            let _ = write!(s, " --name {n}");
        }
        if let Some(d) = self.deg {
            let _ = write!(s, " --deg {d}");
        }
        match self.command {
            Command::Cohomology => {
                let _ = write!(s, " --mode {}", self.mode.to_possible_value().expect("named").get_name());
            }
            Command::Transport | Command::Monodromy => {
                let _ = write!(s, " --tol {:e}", self.tol);
            }
            Command::Ss => {
                let _ = write!(s, " --rmax {}", self.rmax);
            }
            Command::Subexhaust => {
                let _ = write!(s, " --steps {}", self.steps);
            }
            _ => {}
        }
        if let Some(w) = &self.window {
            let _ = write!(s, " --window {}:{}:{}", w.start, w.end, w.span);
        }
        if let Some((lo, hi)) = self.weights {
            let _ = write!(s, " --weights {lo}:{hi}");
        }
        if let Some(o) = self.order {
            let _ = write!(s, " --order {o}");
        }
        if let Some(m) = self.map {
            let _ = write!(s, " --map {}", m.to_possible_value().expect("named").get_name());
        }
        for (flag, v) in [("point", &self.point), ("fibre", &self.fibre), ("slice", &self.slice)] {
            if !v.is_empty() {
                let _ = write!(s, " --{flag} {}", v.join(","));
            }
        }
        if let Some(t) = &self.t {
            let _ = write!(s, " --t {t}");
        }
        if let Some(a) = &self.at {
            let _ = write!(s, " --at {a}");
        }
        s
    }
}

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Model(ModelError),
    Usage(String),
    /// The kernel rejected the model data.
    Rejected(String),
    Internal(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(e) => write!(f, "cannot read model: {e}"),
            CliError::Model(e) => write!(f, "model error at {e}"),
            CliError::Usage(e) => write!(f, "usage: {e}"),
            CliError::Rejected(e) => write!(f, "rejected: {e}"),
            CliError::Internal(e) => write!(f, "internal error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Internal(_) => 1,
            CliError::Model(_) | CliError::Usage(_) | CliError::Rejected(_) => 2,
        }
    }
}

fn rejected(e: impl std::fmt::Display) -> CliError {
    CliError::Rejected(e.to_string())
}

/// Records a rejection of one object as a failed verdict; other errors
/// abort the command.
fn settle(report: &mut Report, subject: &str, check: &str, outcome: Result<(), CliError>) -> Result<(), CliError> {
    match outcome {
        Err(CliError::Rejected(e)) => {
            report.verdict(subject, check, Status::Fail, e);
            Ok(())
        }
        other => other,
    }
}

fn transport_error(e: TransportError) -> CliError {
    match e {
        TransportError::Integration { .. } => CliError::Internal(e.to_string()),
        e => rejected(e),
    }
}

/// Parses the arguments, runs the command and prints the report; returns
/// the exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.emit(cli.format));
            report.exit_code()
        }
        Err(e) => {
            eprintln!("algebroidlab: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let source =
        std::fs::read_to_string(&cli.file).map_err(|e| CliError::Io(format!("{}: {e}", cli.file.display())))?;
    let model = parse_model(&source).map_err(CliError::Model)?;
    run_on(cli, &model)
}

pub fn run_on(cli: &Cli, model: &Model) -> Result<Report, CliError> {
    if let Some(n) = &cli.name {
        if !model.contains(n) {
            return Err(CliError::Usage(format!("the model has no object named `{n}`")));
        }
    }
    let mut report = Report::new(cli.echo());
    match cli.command {
        Command::Check => check(cli, model, &mut report),
        Command::Cohomology => cohomology_cmd(cli, model, &mut report)?,
        Command::Pullback => pullback_cmd(cli, model, &mut report)?,
        Command::Transversal => transversal_cmd(cli, model, &mut report)?,
        Command::Ss => ss_cmd(cli, model, &mut report)?,
        Command::Localize => localize_cmd(cli, model, &mut report)?,
        Command::Transport => transport_cmd(cli, model, &mut report)?,
        Command::Monodromy => monodromy_cmd(cli, model, &mut report)?,
        Command::Subexhaust => subexhaust_cmd(cli, model, &mut report)?,
    }
    Ok(report)
}

fn selected(cli: &Cli, name: &str) -> bool {
    cli.name.as_deref().is_none_or(|n| n == name)
}

fn matrix_text(m: &RationalMatrix) -> String {
    let rows: Vec<String> = m.format_entries().into_iter().map(|r| format!("[{}]", r.join(", "))).collect();
    format!("[{}]", rows.join(", "))
}

fn float_text(x: f64) -> String {
    let x = if x.abs() < 5e-13 { 0.0 } else { x };
    format!("{x:.12}")
}

fn class_map_text(c: &ClassMap) -> (String, String, String) {
    match c {
        ClassMap::Exact(m) => ("exact".into(), matrix_text(m), "0".into()),
        ClassMap::Approximate { entries, residual } => {
            let rows: Vec<String> = (0..entries.nrows())
                .map(|i| {
                    let row: Vec<String> = (0..entries.ncols()).map(|j| float_text(entries[(i, j)])).collect();
                    format!("[{}]", row.join(", "))
                })
                .collect();
            ("approximate".into(), format!("[{}]", rows.join(", ")), format!("{residual:.3e}"))
        }
    }
}

fn point_text(p: &[Rational]) -> String {
    format!("({})", p.iter().map(format_rational).collect::<Vec<_>>().join(", "))
}

fn rationals(values: &[String]) -> Result<Vec<Rational>, CliError> {
    values
        .iter()
        .map(|v| parse_rational(v.trim()).ok_or_else(|| CliError::Usage(format!("`{v}` is not a rational number"))))
        .collect()
}

fn coordinates(a: &LieAlgebroidPatch, names: &[String]) -> Result<Vec<usize>, CliError> {
    names
        .iter()
        .map(|n| {
            a.patch.vars.iter().position(|v| v == n).ok_or_else(|| CliError::Usage(format!("`{n}` is not a coordinate")))
        })
        .collect()
}

/// Representations, and algebroids (with the trivial line) that the
/// selection names or, with no selection, every one of them.
fn rep_subjects<'m>(cli: &Cli, model: &'m Model) -> Vec<(String, Representation, &'m AlgebroidEntry)> {
    let mut out = Vec::new();
    for r in &model.representations {
        if selected(cli, &r.name) {
            out.push((r.name.clone(), r.representation.clone(), model.algebroid(&r.algebroid).expect("resolved")));
        }
    }
    for a in &model.algebroids {
        if selected(cli, &a.name) {
            out.push((a.name.clone(), Representation::trivial(a.algebroid.clone(), 1), a));
        }
    }
    out
}

fn check(cli: &Cli, model: &Model, report: &mut Report) {
    for e in model.algebroids.iter().filter(|e| selected(cli, &e.name)) {
        let a = &e.algebroid;
        let v = validate_algebroid(a, cli.order.unwrap_or(a.order()));
        for c in &v.checks {
            report.verdict(&e.name, &c.axiom.to_string(), Status::of(c.passed), format!("to order {}", v.certified_order));
            if let Some(w) = &c.witness {
                report.witnesses.push(format!(
                    "{}: {} fails at {:?}, coefficient {} of {}: {}",
                    e.name,
                    c.axiom,
                    w.indices,
                    format_rational(&w.coefficient),
                    w.monomial.format_with(&a.patch.vars),
                    w.description
                ));
            }
        }
    }
    for e in model.representations.iter().filter(|e| selected(cli, &e.name)) {
        let rep = &e.representation;
        match validate_representation(rep, cli.order.unwrap_or(rep.algebroid.order())) {
            Err(err) => report.verdict(&e.name, "representation", Status::Fail, err.to_string()),
            Ok(v) => {
                for c in v.checks.iter().filter(|c| c.axiom.to_string() == "flatness") {
                    report.verdict(&e.name, "flatness", Status::of(c.passed), format!("to order {}", v.certified_order));
                    if let Some(w) = &c.witness {
                        report.witnesses.push(format!(
                            "{}: curvature entry {:?}, coefficient {} of {}: {}",
                            e.name,
                            w.indices,
                            format_rational(&w.coefficient),
                            w.monomial.format_with(&rep.algebroid.patch.vars),
                            w.description
                        ));
                    }
                }
            }
        }
    }
    for e in model.covers.iter().filter(|e| selected(cli, &e.name)) {
        match nerve(&e.cover) {
            Ok(nv) => report.verdict(
                &e.name,
                "nerve",
                Status::Pass,
                format!("{} simplices up to dimension {}", nv.simplices.iter().map(Vec::len).sum::<usize>(), nv.dim()),
            ),
            Err(err) => report.verdict(&e.name, "nerve", Status::Fail, err.to_string()),
        }
    }
    for e in model.families.iter().filter(|e| selected(cli, &e.name)) {
        let cover = &model.cover(&e.cover).expect("resolved").cover;
        let outcome = nerve(cover).and_then(|nv| e.family.check(cover, &nv));
        match outcome {
            Ok(()) => report.verdict(&e.name, "transitions", Status::Pass, "isomorphisms satisfying the cocycle condition"),
            Err(err) => report.verdict(&e.name, "transitions", Status::Fail, err.to_string()),
        }
    }
    for e in model.paths.iter().filter(|e| selected(cli, &e.name)) {
        match e.path.check() {
            Ok(()) => report.verdict(&e.name, "compatibility", Status::Pass, "structure evolves along the generators"),
            Err(err) => report.verdict(&e.name, "compatibility", Status::Fail, err.to_string()),
        }
    }
    for e in model.exhaustions.iter().filter(|e| selected(cli, &e.name)) {
        match e.problem.check() {
            Ok(()) => report.verdict(&e.name, "oracles", Status::Pass, ""),
            Err(err) => report.verdict(&e.name, "oracles", Status::Fail, err.to_string()),
        }
    }
}

fn cohomology_cmd(cli: &Cli, model: &Model, report: &mut Report) -> Result<(), CliError> {
    let window = cli.window.unwrap_or_default();
    let mode = match cli.mode {
        ModeKind::Weight => Mode::Weight { weights: cli.weights.unwrap_or((0, 0)), window },
        ModeKind::Jet => Mode::Jet(window),
    };
    for (name, rep, _) in rep_subjects(cli, model) {
        let outcome = (|| -> Result<(), CliError> {
            let h = cohomology(&CeComplex::new(&rep), &mode).map_err(rejected)?;
            let mut betti = Table::new(format!("betti {name}"), &["degree", "weight", "betti", "stable", "trace"]);
            let mut reps = Table::new(format!("representatives {name}"), &["degree", "weight", "cochain"]);
            let vars = &rep.algebroid.patch.vars;
            for e in h.entries.iter().filter(|e| cli.deg.is_none_or(|d| d == e.degree)) {
                let weight = e.weight.map_or("-".to_string(), |w| w.to_string());
                let trace: Vec<String> = e.trace.iter().map(|(o, b)| format!("{o}:{b}")).collect();
                betti.push(vec![
                    e.degree.to_string(),
                    weight.clone(),
                    e.betti.to_string(),
                    e.stabilized.to_string(),
                    trace.join(" "),
                ]);
                for c in &e.representatives {
                    reps.push(vec![
                        e.degree.to_string(),
                        weight.clone(),
                        c.format_with(vars, &rep.algebroid.frame, &rep.frame),
                    ]);
                }
            }
            let vector: Vec<String> = h.betti_vector().iter().map(usize::to_string).collect();
            let status = if h.conclusive() { Status::Pass } else { Status::Info };
            let detail = if h.conclusive() { "stabilized" } else { "not stabilized in the window" };
            report.verdict(&name, "cohomology", status, format!("betti ({}), {detail}", vector.join(", ")));
            report.tables.push(betti);
            report.tables.push(reps);
            Ok(())
        })();
        settle(report, &name, "cohomology", outcome)?;
    }
    Ok(())
}

fn structured_map(cli: &Cli, a: &LieAlgebroidPatch) -> Result<StructuredMap, CliError> {
    Ok(match cli.map.unwrap_or(MapKind::Identity) {
        MapKind::Identity => StructuredMap::Identity,
        MapKind::Projection => {
            if cli.fibre.is_empty() {
                return Err(CliError::Usage("a projection needs --fibre names".into()));
            }
            StructuredMap::Projection { fibre_vars: cli.fibre.clone(), fibre_weights: None }
        }
        MapKind::Slice => StructuredMap::SliceInclusion { normal: coordinates(a, &cli.slice)? },
        MapKind::Point => StructuredMap::PointInclusion { point: rationals(&cli.point)? },
        MapKind::Rescaling => {
            let t = rationals(&[cli.t.clone().ok_or_else(|| CliError::Usage("a rescaling needs --t".into()))?])?;
            StructuredMap::Rescaling { fibre: coordinates(a, &cli.fibre)?, t: t[0].clone() }
        }
    })
}

fn pullback_cmd(cli: &Cli, model: &Model, report: &mut Report) -> Result<(), CliError> {
    let mut subjects: Vec<(String, &LieAlgebroidPatch, Option<&Representation>)> = Vec::new();
    for r in model.representations.iter().filter(|r| selected(cli, &r.name)) {
        subjects.push((r.name.clone(), &r.representation.algebroid, Some(&r.representation)));
    }
    for a in model.algebroids.iter().filter(|a| selected(cli, &a.name)) {
        subjects.push((a.name.clone(), &a.algebroid, None));
    }
    for (name, a, rep) in subjects {
        let outcome = (|| -> Result<(), CliError> {
            if cli.map == Some(MapKind::Rescaling) && cli.t.is_none() {
                let r = rescaling_family(a, &coordinates(a, &cli.fibre)?, &[]);
                for (check, v) in [("zero section", &r.zero_section), ("rescalings", &r.rescaling), ("family", &r.family)] {
                    report.verdict(&name, &format!("transverse {check}"), Status::Info, v.holds.to_string());
                    if let Some(w) = &v.witness {
                        report.witnesses.push(format!("{name}: {check}: {w}"));
                    }
                }
                report.verdict(&name, "equivalence", Status::of(r.agree), format!("{} points checked", r.points_checked));
                return Ok(());
            }
            let phi = structured_map(cli, a)?;
            let m = phi.source_dim(a.n_vars());
            let x = match (&phi, cli.point.is_empty()) {
                (StructuredMap::PointInclusion { .. }, _) | (_, true) => vec![Rational::from_integer(0.into()); m],
                (_, false) => rationals(&cli.point)?,
            };
            let cert = transversality_check(&phi, a, &x).map_err(rejected)?;
            report.verdict(
                &name,
                &format!("{} transverse at {}", phi.kind(), point_text(&x)),
                Status::of(cert.transverse),
                format!("rank {} of {}", cert.rank, cert.target_dim),
            );
            if !cert.transverse {
                return Ok(());
            }
            let (pa, prep) = pullback_structured(&phi, a, rep).map_err(rejected)?;
            let v = validate_algebroid(&pa, pa.order());
            report.verdict(&name, "pullback axioms", Status::of(v.all_passed()), format!("to order {}", v.certified_order));
            let mut t = Table::new(format!("pullback {name}"), &["item", "value"]);
            t.push(vec!["coordinates".into(), pa.patch.vars.join(" ")]);
            t.push(vec!["frame".into(), pa.frame.join(" ")]);
            if let Some(pr) = &prep {
                let ok = validate_representation(pr, pa.order()).map(|v| v.all_passed()).unwrap_or(false);
                report.verdict(&name, "pullback representation", Status::of(ok), "");
                t.push(vec!["fibre frame".into(), pr.frame.join(" ")]);
            }
            report.tables.push(t);
            Ok(())
        })();
        settle(report, &name, "pullback", outcome)?;
    }
    Ok(())
}

fn transversal_cmd(cli: &Cli, model: &Model, report: &mut Report) -> Result<(), CliError> {
    let range = cli.weights.unwrap_or((-1, 2));
    let window = cli.window.unwrap_or(JetWindow::new(1, 4, 3));
    for (name, mut rep, entry) in rep_subjects(cli, model) {
        if rep.algebroid.n_vars() == 0 {
            rep.algebroid.patch.weights = Some(WeightAssignment::new(Vec::new()));
        }
        let outcome = (|| -> Result<(), CliError> {
            let a = &rep.algebroid;
            let normal = if cli.slice.is_empty() {
            match &a.patch.weights {
                Some(w) => (0..a.n_vars()).filter(|&i| w.weights()[i] > 0).collect(),
                None => Vec::new(),
            }
        } else {
            coordinates(a, &cli.slice)?
        };
        let slice = StructuredMap::SliceInclusion { normal };
            let r = transversal_iso_check(&rep, &slice, range, window).map_err(rejected)?;
            let status = if r.conclusive { Status::of(r.isomorphism()) } else { Status::Info };
            let detail = format!(
                "betti match {}, restriction onto {}{}",
                r.betti_match,
                r.surjective,
                if r.conclusive { "" } else { ", not stabilized in the window" }
            );
            report.verdict(&name, "transversal isomorphism", status, detail);
            let mut t = Table::new(format!("transversal {name}"), &["degree", "ambient", "transversal", "restriction rank"]);
            for q in 0..r.ambient.len().max(r.transversal.len()) {
                let cell = |v: &[usize]| v.get(q).map_or("-".to_string(), usize::to_string);
                t.push(vec![q.to_string(), cell(&r.ambient), cell(&r.transversal), cell(&r.restriction_rank)]);
            }
            report.tables.push(t);
            if let Some(eps) = &entry.euler {
                let e = euler_homotopy_verify(&rep, eps, range, window).map_err(rejected)?;
                report.verdict(
                    &name,
                    "euler homotopy",
                    Status::of(e.agreement),
                    format!("{} cochains checked, weight-zero betti {:?}", e.cochains_checked, e.weight_zero_betti),
                );
                if !e.nonzero_weight.is_empty() {
                    let mut t = Table::new(format!("nonzero weight {name}"), &["degree", "weight", "betti"]);
                    for (q, w, b) in &e.nonzero_weight {
                        t.push(vec![q.to_string(), w.to_string(), b.to_string()]);
                    }
                    report.tables.push(t);
                }
            }
            Ok(())
        })();
        settle(report, &name, "transversal", outcome)?;
    }
    Ok(())
}

fn ss_cmd(cli: &Cli, model: &Model, report: &mut Report) -> Result<(), CliError> {
    for f in model.families.iter().filter(|f| selected(cli, &f.name)) {
        let outcome = (|| -> Result<(), CliError> {
            let cover = &model.cover(&f.cover).expect("resolved").cover;
            let dc = build_double_complex(&f.family, cover).map_err(rejected)?;
            let ss = ss_pages(&dc, cli.rmax).map_err(rejected)?;
            for page in &ss.pages {
                let mut t = Table::new(format!("E{} {}", page.r, f.name), &["p", "q", "dim"]);
                for (&(p, q), d) in &page.dims {
                    t.push(vec![p.to_string(), q.to_string(), d.to_string()]);
                }
                report.tables.push(t);
            }
            let mut t = Table::new(format!("Einf {}", f.name), &["p", "q", "dim"]);
            for (&(p, q), d) in &ss.e_infinity {
                t.push(vec![p.to_string(), q.to_string(), d.to_string()]);
            }
            report.tables.push(t);
            let mut t = Table::new(format!("total {}", f.name), &["degree", "betti", "Einf"]);
            for (n, (b, e)) in ss.total_betti.iter().zip(ss.e_infinity_total()).enumerate() {
                t.push(vec![n.to_string(), b.to_string(), e.to_string()]);
            }
            report.tables.push(t);
            report.verdict(&f.name, "convergence", Status::of(ss.converges), format!("degenerates at E{}", ss.degenerates_at));
            Ok(())
        })();
        settle(report, &f.name, "spectral sequence", outcome)?;
    }
    Ok(())
}

fn localize_cmd(cli: &Cli, model: &Model, report: &mut Report) -> Result<(), CliError> {
    let n = cli.deg.unwrap_or(1);
    for f in model.families.iter().filter(|f| selected(cli, &f.name)) {
        let outcome = (|| -> Result<(), CliError> {
            let cover = &model.cover(&f.cover).expect("resolved").cover;
            let x = match &cli.at {
                None => 0,
                Some(c) => cover
                    .charts
                    .iter()
                    .position(|x| x == c)
                    .ok_or_else(|| CliError::Usage(format!("cover `{}` has no chart `{c}`", f.cover)))?,
            };
            let subject = format!("{} at {}", f.name, cover.charts[x]);
            match localization_check(&f.family, cover, x, n).map_err(rejected)? {
                Localization::HypothesesUnmet { reasons } => {
                    report.verdict(&subject, &format!("localization in degree {n}"), Status::Unmet, "hypotheses unmet");
                    report.witnesses.extend(reasons.into_iter().map(|r| format!("{subject}: {r}")));
                }
                Localization::Checked { branch, total, fibre, rank, injective } => {
                    report.verdict(
                        &subject,
                        &format!("localization in degree {n}"),
                        Status::of(injective),
                        format!("{} via {branch}", if injective { "injective" } else { "not injective" }),
                    );
                    let mut t = Table::new(format!("localization {subject}"), &["degree", "total", "fibre", "rank"]);
                    t.push(vec![n.to_string(), total.to_string(), fibre.to_string(), rank.to_string()]);
                    report.tables.push(t);
                }
            }
            Ok(())
        })();
        settle(report, &f.name, "localization", outcome)?;
    }
    Ok(())
}

fn transport_cmd(cli: &Cli, model: &Model, report: &mut Report) -> Result<(), CliError> {
    for e in model.paths.iter().filter(|e| selected(cli, &e.name)) {
        let outcome = (|| -> Result<(), CliError> {
            let pf = &e.path;
            let res = parallel_transport(pf, cli.tol).map_err(transport_error)?;
            report.verdict(
                &e.name,
                "isomorphism defect",
                Status::of(res.defect < cli.tol),
                format!("{:.3e} after {} steps", res.defect, res.steps),
            );
            report.verdict(
                &e.name,
                "rationalized",
                Status::Info,
                if res.exact.is_some() { "exact" } else { "numerical" }.to_string(),
            );
            let back = parallel_transport(&pf.reversed(), cli.tol).map_err(transport_error)?;
            let gap = |a: &_, b: &_| roundtrip_gap(a, b);
            let worst = gap(&back.frame, &res.frame).max(gap(&back.fibre, &res.fibre));
            report.verdict(&e.name, "reverse transport", Status::of(worst <= 2.0 * cli.tol), format!("{worst:.3e}"));
            let mut t = Table::new(format!("Phi1 {}", e.name), &["space", "row", "entries"]);
            match &res.exact {
                Some(x) => {
                    for (space, m) in [("frame", &x.frame), ("fibre", &x.fibre)] {
                        for (i, row) in m.format_entries().into_iter().enumerate() {
                            t.push(vec![space.into(), i.to_string(), row.join(" ")]);
                        }
                    }
                }
                None => {
                    for (space, m) in [("frame", &res.frame), ("fibre", &res.fibre)] {
                        for i in 0..m.nrows() {
                            let row: Vec<String> = (0..m.ncols()).map(|j| float_text(m[(i, j)])).collect();
                            t.push(vec![space.into(), i.to_string(), row.join(" ")]);
                        }
                    }
                }
            }
            report.tables.push(t);
            let mut t = Table::new(format!("mon {}", e.name), &["degree", "kind", "map", "residual"]);
            for q in (0..=pf.rank()).filter(|q| cli.deg.is_none_or(|d| d == *q)) {
                let (kind, map, residual) = class_map_text(&res.mon(pf, q).map_err(transport_error)?);
                t.push(vec![q.to_string(), kind, map, residual]);
            }
            report.tables.push(t);
            Ok(())
        })();
        settle(report, &e.name, "transport", outcome)?;
    }
    Ok(())
}

fn roundtrip_gap(back: &FloatMatrix, there: &FloatMatrix) -> f64 {
    let prod = back * there;
    let mut worst: f64 = 0.0;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let id = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - id).abs());
        }
    }
    worst
}

fn monodromy_cmd(cli: &Cli, model: &Model, report: &mut Report) -> Result<(), CliError> {
    let mut families: Vec<&str> = Vec::new();
    for e in &model.paths {
        let Some(closing) = &e.closing else { continue };
        if !(selected(cli, &e.name) || selected(cli, &closing.family)) {
            continue;
        }
        let fam = model.family(&closing.family).expect("resolved");
        let cover = &model.cover(&fam.cover).expect("resolved").cover;
        let r = match monodromy_check(&e.path, &fam.family, cover, &closing.cycle, cli.tol) {
            Ok(r) => r,
            Err(err) => {
                settle(report, &e.name, "monodromy", Err(transport_error(err)))?;
                continue;
            }
        };
        let cycle: Vec<&str> = closing.cycle.iter().map(|&i| cover.charts[i].as_str()).collect();
        let subject = format!("{} around {}", e.name, cycle.join("-"));
        report.verdict(&subject, "cech and transport monodromy", Status::of(r.agree), "");
        let mut t = Table::new(format!("monodromy {subject}"), &["degree", "cech", "transport", "kind", "agree"]);
        for d in &r.degrees {
            let (kind, map, _) = class_map_text(&d.transport);
            t.push(vec![d.degree.to_string(), matrix_text(&d.cech), map, kind, d.agree.to_string()]);
        }
        report.tables.push(t);
        if !families.contains(&closing.family.as_str()) {
            families.push(&closing.family);
        }
    }
    for f in &model.families {
        if selected(cli, &f.name) && !families.contains(&f.name.as_str()) {
            families.push(&f.name);
        }
    }
    families.sort_by_key(|n| model.families.iter().position(|f| f.name == *n));
    for name in families {
        let f = model.family(name).expect("resolved");
        let cover = &model.cover(&f.cover).expect("resolved").cover;
        let gm = match gauss_manin(&f.family, cover) {
            Ok(gm) => gm,
            Err(err) => {
                settle(report, name, "gauss-manin", Err(transport_error(err)))?;
                continue;
            }
        };
        report.verdict(name, "gauss-manin flatness", Status::of(gm.flat), "trivial holonomy around every 2-simplex");
        let mut t = Table::new(format!("cohomology bundle {name}"), &["chart", "betti"]);
        for (c, b) in cover.charts.iter().zip(&gm.betti) {
            t.push(vec![c.clone(), b.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")]);
        }
        report.tables.push(t);
        let mut t = Table::new(format!("holonomy {name}"), &["cycle", "contractible", "trivial", "maps"]);
        for h in &gm.holonomies {
            let cycle: Vec<&str> = h.cycle.iter().map(|&i| cover.charts[i].as_str()).collect();
            let maps: Vec<String> = h.maps.iter().map(matrix_text).collect();
            t.push(vec![cycle.join("-"), h.contractible.to_string(), h.trivial.to_string(), maps.join("; ")]);
        }
        report.tables.push(t);
    }
    Ok(())
}

fn subexhaust_cmd(cli: &Cli, model: &Model, report: &mut Report) -> Result<(), CliError> {
    for e in model.exhaustions.iter().filter(|e| selected(cli, &e.name)) {
        let outcome = (|| -> Result<(), CliError> {
            let s = subexhaust(&e.problem, cli.steps).map_err(transport_error)?;
            let mut t = Table::new(format!("alpha {}", e.name), &["chart", "alpha"]);
            for (c, a) in e.problem.charts.iter().zip(&s.alpha) {
                t.push(vec![c.clone(), a.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")]);
            }
            report.tables.push(t);
            let violations = verify_subexhaustion(&e.problem, &s).map_err(transport_error)?;
            report.verdict(
                &e.name,
                "interleaving",
                Status::of(violations.is_empty()),
                format!("{} steps re-verified against every oracle", cli.steps),
            );
            for v in violations {
                report.witnesses.push(format!(
                    "{}: {} into {} at n = {}: {}",
                    e.name, e.problem.charts[v.lower], e.problem.charts[v.upper], v.n, v.what
                ));
            }
            Ok(())
        })();
        settle(report, &e.name, "subexhaust", outcome)?;
    }
    Ok(())
}
