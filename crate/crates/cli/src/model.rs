//! TOML model files: named algebroids, representations, covers, local
//! system families, path families and exhaustion problems.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Range;

use algebroidlab_core::algebroid::{LieAlgebroidPatch, Patch, Representation};
use algebroidlab_core::cover::{CoverDatum, LocalSystemFamily, Transition};
use algebroidlab_core::exact::{parse_poly, parse_rational, Rational, RationalMatrix, TruncatedPoly, EXACT};
use algebroidlab_core::pullback::EulerSection;
use algebroidlab_core::transport::{ExhaustionProblem, IndexOracle, PathFamily};
use serde::Deserialize;
use toml::Spanned;

pub const VERSION: i64 = 1;

/// First problem found in a model file, located by line and column (from 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ModelError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    version: Spanned<i64>,
    #[serde(default)]
    algebroid: Vec<Spanned<RawAlgebroid>>,
    #[serde(default)]
    representation: Vec<Spanned<RawRepresentation>>,
    #[serde(default)]
    cover: Vec<Spanned<RawCover>>,
    #[serde(default)]
    family: Vec<Spanned<RawFamily>>,
    #[serde(default)]
    path_family: Vec<Spanned<RawPathFamily>>,
    #[serde(default)]
    exhaustion: Vec<Spanned<RawExhaustion>>,
}

type Text = Spanned<String>;
type Terms = BTreeMap<String, Text>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebroid {
    name: Text,
    #[serde(default)]
    vars: Vec<String>,
    weights: Option<Vec<u32>>,
    #[serde(default = "default_jet_order")]
    jet_order: u32,
    frame: Vec<String>,
    frame_weights: Option<Vec<i64>>,
    #[serde(default)]
    anchor: BTreeMap<String, Terms>,
    #[serde(default)]
    bracket: BTreeMap<String, Terms>,
    euler: Option<Terms>,
}

fn default_jet_order() -> u32 {
    4
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRepresentation {
    name: Text,
    algebroid: Text,
    #[serde(default = "default_kind")]
    kind: Text,
    rank: Option<usize>,
    frame: Option<Vec<String>>,
    #[serde(default)]
    action: BTreeMap<String, Vec<Vec<Text>>>,
    frame_weights: Option<Vec<i64>>,
}

fn default_kind() -> Text {
    Spanned::new(0..0, "explicit".into())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCover {
    name: Text,
    charts: Vec<String>,
    #[serde(default)]
    overlaps: Vec<Vec<Text>>,
    simply_connected: Option<bool>,
    max_dim: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    name: Text,
    cover: Text,
    fibre: Option<Text>,
    fibres: Option<Vec<Text>>,
    #[serde(default)]
    transitions: Vec<Spanned<RawTransition>>,
}

/// Maps coordinates on `source` to coordinates on `target`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransition {
    target: Text,
    source: Text,
    frame: Vec<Vec<Text>>,
    fibre: Vec<Vec<Text>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPathFamily {
    name: Text,
    fibre: Text,
    #[serde(default = "default_motion")]
    motion: Text,
    omega: Option<Vec<Vec<Text>>>,
    omega_fibre: Option<Vec<Vec<Text>>>,
    bracket: Option<BTreeMap<String, Terms>>,
    action: Option<BTreeMap<String, Vec<Vec<Text>>>>,
    #[serde(rename = "loop")]
    closing: Option<RawLoop>,
}

fn default_motion() -> Text {
    Spanned::new(0..0, "fixed".into())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLoop {
    family: Text,
    cycle: Vec<Text>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExhaustion {
    name: Text,
    charts: Vec<String>,
    #[serde(default)]
    oracles: Vec<Spanned<RawOracle>>,
}

/// `μ` from `from` into `into`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOracle {
    from: Text,
    into: Text,
    #[serde(default)]
    prefix: Vec<u64>,
    slope: u64,
    #[serde(default)]
    offset: i64,
}

#[derive(Clone, Debug)]
pub struct AlgebroidEntry {
    pub name: String,
    pub algebroid: LieAlgebroidPatch,
    pub euler: Option<EulerSection>,
}

#[derive(Clone, Debug)]
pub struct RepresentationEntry {
    pub name: String,
    pub algebroid: String,
    pub representation: Representation,
}

#[derive(Clone, Debug)]
pub struct CoverEntry {
    pub name: String,
    pub cover: CoverDatum,
}

#[derive(Clone, Debug)]
pub struct FamilyEntry {
    pub name: String,
    pub cover: String,
    pub family: LocalSystemFamily,
}

/// A loop of charts of a family along which a path family is compared.
#[derive(Clone, Debug)]
pub struct Closing {
    pub family: String,
    pub cycle: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct PathEntry {
    pub name: String,
    pub path: PathFamily,
    pub closing: Option<Closing>,
}

#[derive(Clone, Debug)]
pub struct ExhaustionEntry {
    pub name: String,
    pub problem: ExhaustionProblem,
}

/// Parsed model; entries keep their order in the file.
#[derive(Clone, Debug, Default)]
pub struct Model {
    pub algebroids: Vec<AlgebroidEntry>,
    pub representations: Vec<RepresentationEntry>,
    pub covers: Vec<CoverEntry>,
    pub families: Vec<FamilyEntry>,
    pub paths: Vec<PathEntry>,
    pub exhaustions: Vec<ExhaustionEntry>,
}

impl Model {
    pub fn algebroid(&self, name: &str) -> Option<&AlgebroidEntry> {
        self.algebroids.iter().find(|e| e.name == name)
    }

    pub fn representation(&self, name: &str) -> Option<&RepresentationEntry> {
        self.representations.iter().find(|e| e.name == name)
    }

    pub fn cover(&self, name: &str) -> Option<&CoverEntry> {
        self.covers.iter().find(|e| e.name == name)
    }

    pub fn family(&self, name: &str) -> Option<&FamilyEntry> {
        self.families.iter().find(|e| e.name == name)
    }

    pub fn path(&self, name: &str) -> Option<&PathEntry> {
        self.paths.iter().find(|e| e.name == name)
    }

    pub fn exhaustion(&self, name: &str) -> Option<&ExhaustionEntry> {
        self.exhaustions.iter().find(|e| e.name == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.algebroid(name).is_some()
            || self.representation(name).is_some()
            || self.cover(name).is_some()
            || self.family(name).is_some()
            || self.path(name).is_some()
            || self.exhaustion(name).is_some()
    }
}

struct Ctx<'a> {
    source: &'a str,
}

impl Ctx<'_> {
    fn err(&self, span: Range<usize>, message: impl Into<String>) -> ModelError {
        let at = span.start.min(self.source.len());
        let before = &self.source[..at];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
        ModelError { line, column, message: message.into() }
    }

    fn poly(&self, text: &Text, vars: &[String], order: u32) -> Result<TruncatedPoly, ModelError> {
        parse_poly(text.get_ref(), vars, order).map_err(|e| self.err(text.span(), format!("bad polynomial: {e}")))
    }

    fn rational(&self, text: &Text) -> Result<Rational, ModelError> {
        parse_rational(text.get_ref().trim())
            .ok_or_else(|| self.err(text.span(), format!("`{}` is not a rational number", text.get_ref())))
    }

    fn matrix(&self, rows: &[Vec<Text>], n: usize, at: Range<usize>, what: &str) -> Result<RationalMatrix, ModelError> {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(self.err(at, format!("{what} must be a {n} x {n} matrix")));
        }
        let rows = rows.iter().map(|r| r.iter().map(|x| self.rational(x)).collect()).collect::<Result<_, _>>()?;
        Ok(RationalMatrix::from_rows(rows))
    }

    fn poly_matrix(
        &self,
        rows: &[Vec<Text>],
        n: usize,
        vars: &[String],
        order: u32,
        at: Range<usize>,
        what: &str,
    ) -> Result<Vec<Vec<TruncatedPoly>>, ModelError> {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(self.err(at, format!("{what} must be a {n} x {n} matrix")));
        }
        rows.iter().map(|r| r.iter().map(|x| self.poly(x, vars, order)).collect()).collect()
    }
}

fn index_of(names: &[String], name: &str) -> Option<usize> {
    names.iter().position(|n| n == name)
}

fn unique(names: &[String]) -> Option<&String> {
    let mut seen = BTreeSet::new();
    names.iter().find(|n| !seen.insert(n.as_str()))
}

/// Parses and cross-checks a model file. Axioms are not validated here;
/// that is the `check` command's job.
pub fn parse_model(source: &str) -> Result<Model, ModelError> {
    let cx = Ctx { source };
    let raw: RawModel = toml::from_str(source).map_err(|e| {
        let span = e.span().unwrap_or(0..0);
        cx.err(span, e.message().to_string())
    })?;
    if *raw.version.get_ref() != VERSION {
        return Err(cx.err(
            raw.version.span(),
            format!("unsupported model version {} (expected {VERSION})", raw.version.get_ref()),
        ));
    }
    let mut model = Model::default();
    let mut names: BTreeSet<String> = BTreeSet::new();
    let mut claim = |name: &Text| -> Result<String, ModelError> {
        if !names.insert(name.get_ref().clone()) {
            return Err(cx.err(name.span(), format!("name `{}` is used twice", name.get_ref())));
        }
        Ok(name.get_ref().clone())
    };

    for a in &raw.algebroid {
        let name = claim(&a.get_ref().name)?;
        let (algebroid, euler) = build_algebroid(&cx, a)?;
        model.algebroids.push(AlgebroidEntry { name, algebroid, euler });
    }
    for r in &raw.representation {
        let name = claim(&r.get_ref().name)?;
        let (algebroid, representation) = build_representation(&cx, &model, r)?;
        model.representations.push(RepresentationEntry { name, algebroid, representation });
    }
    for c in &raw.cover {
        let name = claim(&c.get_ref().name)?;
        let cover = build_cover(&cx, c)?;
        model.covers.push(CoverEntry { name, cover });
    }
    for f in &raw.family {
        let name = claim(&f.get_ref().name)?;
        let (cover, family) = build_family(&cx, &model, f)?;
        model.families.push(FamilyEntry { name, cover, family });
    }
    for p in &raw.path_family {
        let name = claim(&p.get_ref().name)?;
        let (path, closing) = build_path(&cx, &model, p)?;
        model.paths.push(PathEntry { name, path, closing });
    }
    for e in &raw.exhaustion {
        let name = claim(&e.get_ref().name)?;
        let problem = build_exhaustion(&cx, e)?;
        model.exhaustions.push(ExhaustionEntry { name, problem });
    }
    Ok(model)
}

fn build_algebroid(
    cx: &Ctx,
    spanned: &Spanned<RawAlgebroid>,
) -> Result<(LieAlgebroidPatch, Option<EulerSection>), ModelError> {
    let raw = spanned.get_ref();
    let at = spanned.span();
    if let Some(dup) = unique(&raw.vars) {
        return Err(cx.err(at, format!("coordinate `{dup}` is declared twice")));
    }
    if let Some(dup) = unique(&raw.frame) {
        return Err(cx.err(at, format!("frame element `{dup}` is declared twice")));
    }
    let mut patch = Patch::new(raw.vars.clone(), raw.jet_order);
    if let Some(w) = &raw.weights {
        if w.len() != raw.vars.len() {
            return Err(cx.err(at, "need one weight per coordinate"));
        }
        patch = patch.with_weights(w.clone());
    }
    let order = raw.jet_order;
    let mut a = LieAlgebroidPatch::trivial(patch, raw.frame.clone());
    let vars = raw.vars.clone();
    let frame_index = |name: &str, at: Range<usize>| {
        index_of(&raw.frame, name).ok_or_else(|| cx.err(at, format!("`{name}` is not in the frame")))
    };
    for (gen, terms) in &raw.anchor {
        let i = frame_index(gen, at.clone())?;
        for (var, p) in terms {
            let j = index_of(&vars, var).ok_or_else(|| cx.err(p.span(), format!("`{var}` is not a coordinate")))?;
            a.anchor[i][j] = cx.poly(p, &vars, order)?;
        }
    }
    let mut seen = BTreeSet::new();
    for (pair, terms) in &raw.bracket {
        let parts: Vec<&str> = pair.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(cx.err(at, format!("bracket key `{pair}` must name two frame elements as \"a,b\"")));
        }
        let (i, j) = (frame_index(parts[0], at.clone())?, frame_index(parts[1], at.clone())?);
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(cx.err(at, format!("bracket of `{}` and `{}` is given twice", parts[0], parts[1])));
        }
        for (gen, p) in terms {
            let k = frame_index(gen, p.span())?;
            let p = cx.poly(p, &vars, order)?;
            if i == j {
                a.bracket[i][i][k] = p;
            } else {
                a.set_bracket(i, j, k, p);
            }
        }
    }
    if let Some(w) = &raw.frame_weights {
        if w.len() != raw.frame.len() {
            return Err(cx.err(at, "need one weight per frame element"));
        }
        a.frame_weights = Some(w.clone());
    }
    let euler = match &raw.euler {
        None => None,
        Some(terms) => {
            let mut c = vec![a.patch.zero(); a.rank()];
            for (gen, p) in terms {
                c[frame_index(gen, p.span())?] = cx.poly(p, &vars, order)?;
            }
            Some(EulerSection::new(c))
        }
    };
    Ok((a, euler))
}

fn build_representation(
    cx: &Ctx,
    model: &Model,
    spanned: &Spanned<RawRepresentation>,
) -> Result<(String, Representation), ModelError> {
    let raw = spanned.get_ref();
    let at = spanned.span();
    let entry = model
        .algebroid(raw.algebroid.get_ref())
        .ok_or_else(|| cx.err(raw.algebroid.span(), format!("no algebroid named `{}`", raw.algebroid.get_ref())))?;
    let a = entry.algebroid.clone();
    let mut rep = match raw.kind.get_ref().as_str() {
        "trivial" => {
            if !raw.action.is_empty() {
                return Err(cx.err(at, "a trivial representation takes no action"));
            }
            let m = raw.frame.as_ref().map_or(raw.rank.unwrap_or(1), Vec::len);
            let mut rep = Representation::trivial(a, m);
            if let Some(f) = &raw.frame {
                rep.frame = f.clone();
            }
            rep
        }
        "adjoint" => {
            if !raw.action.is_empty() || raw.frame.is_some() || raw.rank.is_some() {
                return Err(cx.err(at, "the adjoint representation takes no frame, rank or action"));
            }
            Representation::adjoint(a)
        }
        "explicit" => {
            let frame = match (&raw.frame, raw.rank) {
                (Some(f), _) => f.clone(),
                (None, Some(m)) => (1..=m).map(|i| format!("f{i}")).collect(),
                (None, None) => return Err(cx.err(at, "an explicit representation needs a frame or a rank")),
            };
            let m = frame.len();
            let vars = a.patch.vars.clone();
            let order = a.order();
            let mut gamma = vec![vec![vec![a.patch.zero(); m]; m]; a.rank()];
            for (gen, rows) in &raw.action {
                let i = a.frame_index(gen).ok_or_else(|| cx.err(at.clone(), format!("`{gen}` is not in the frame")))?;
                gamma[i] = cx.poly_matrix(rows, m, &vars, order, at.clone(), &format!("action of `{gen}`"))?;
            }
            Representation::new(a, frame, gamma).map_err(|e| cx.err(at.clone(), e.to_string()))?
        }
        other => {
            return Err(cx.err(raw.kind.span(), format!("unknown kind `{other}` (trivial, adjoint or explicit)")));
        }
    };
    if let Some(dup) = unique(&rep.frame) {
        return Err(cx.err(at, format!("frame element `{dup}` is declared twice")));
    }
    if let Some(w) = &raw.frame_weights {
        if w.len() != rep.frame.len() {
            return Err(cx.err(at, "need one weight per frame element"));
        }
        rep.frame_weights = Some(w.clone());
    }
    Ok((raw.algebroid.get_ref().clone(), rep))
}

fn build_cover(cx: &Ctx, spanned: &Spanned<RawCover>) -> Result<CoverDatum, ModelError> {
    let raw = spanned.get_ref();
    if let Some(dup) = unique(&raw.charts) {
        return Err(cx.err(spanned.span(), format!("chart `{dup}` is declared twice")));
    }
    let mut simplices = Vec::new();
    for o in &raw.overlaps {
        let s = o
            .iter()
            .map(|c| {
                index_of(&raw.charts, c.get_ref()).ok_or_else(|| cx.err(c.span(), format!("no chart named `{}`", c.get_ref())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if s.len() < 2 {
            return Err(cx.err(spanned.span(), "an overlap names at least two charts"));
        }
        simplices.push(s);
    }
    let mut c = CoverDatum::new(raw.charts.clone(), simplices);
    if let Some(d) = raw.max_dim {
        c = c.with_max_dim(d);
    }
    if let Some(flag) = raw.simply_connected {
        c = c.with_simply_connected(flag);
    }
    Ok(c)
}

fn build_family(cx: &Ctx, model: &Model, spanned: &Spanned<RawFamily>) -> Result<(String, LocalSystemFamily), ModelError> {
    let raw = spanned.get_ref();
    let at = spanned.span();
    let cover = model
        .cover(raw.cover.get_ref())
        .ok_or_else(|| cx.err(raw.cover.span(), format!("no cover named `{}`", raw.cover.get_ref())))?;
    let n = cover.cover.n_charts();
    let rep = |name: &Text| {
        model
            .representation(name.get_ref())
            .map(|e| e.representation.clone())
            .ok_or_else(|| cx.err(name.span(), format!("no representation named `{}`", name.get_ref())))
    };
    let fibres = match (&raw.fibre, &raw.fibres) {
        (Some(f), None) => vec![rep(f)?; n],
        (None, Some(fs)) if fs.len() == n => fs.iter().map(rep).collect::<Result<_, _>>()?,
        (None, Some(_)) => return Err(cx.err(at, format!("need one fibre per chart ({n})"))),
        _ => return Err(cx.err(at, "give exactly one of `fibre` and `fibres`")),
    };
    let (r, m) = (fibres[0].algebroid.rank(), fibres[0].frame.len());
    if fibres.iter().any(|f| f.algebroid.rank() != r || f.frame.len() != m) {
        return Err(cx.err(at, "fibres must share their ranks"));
    }
    let mut family = LocalSystemFamily { fibres, transitions: BTreeMap::new() };
    let chart = |c: &Text| {
        index_of(&cover.cover.charts, c.get_ref())
            .ok_or_else(|| cx.err(c.span(), format!("no chart named `{}` in cover `{}`", c.get_ref(), raw.cover.get_ref())))
    };
    let mut seen = BTreeSet::new();
    for t in &raw.transitions {
        let tr = t.get_ref();
        let (i, j) = (chart(&tr.target)?, chart(&tr.source)?);
        if i == j || !seen.insert((i.min(j), i.max(j))) {
            return Err(cx.err(t.span(), "transitions must join distinct charts, once per pair"));
        }
        let frame = cx.matrix(&tr.frame, r, t.span(), "transition frame")?;
        let fibre = cx.matrix(&tr.fibre, m, t.span(), "transition fibre")?;
        let g = Transition { frame, fibre };
        if g.inverse().is_none() {
            return Err(cx.err(t.span(), "transition is not invertible"));
        }
        family = family.with_transition(i, j, g);
    }
    Ok((raw.cover.get_ref().clone(), family))
}

fn build_path(cx: &Ctx, model: &Model, spanned: &Spanned<RawPathFamily>) -> Result<(PathFamily, Option<Closing>), ModelError> {
    let raw = spanned.get_ref();
    let at = spanned.span();
    let rep = model
        .representation(raw.fibre.get_ref())
        .ok_or_else(|| cx.err(raw.fibre.span(), format!("no representation named `{}`", raw.fibre.get_ref())))?;
    let base = PathFamily::constant(&rep.representation).map_err(|e| cx.err(raw.fibre.span(), e.to_string()))?;
    let (r, m) = (base.rank(), base.fibre_rank());
    let t = vec!["t".to_string()];
    let zero = |n: usize| vec![vec![Spanned::new(0..0, "0".to_string()); n]; n];
    let omega = raw.omega.clone().unwrap_or_else(|| zero(r));
    let omega_fibre = raw.omega_fibre.clone().unwrap_or_else(|| zero(m));
    let path = match raw.motion.get_ref().as_str() {
        "conjugated" => {
            if raw.bracket.is_some() || raw.action.is_some() {
                return Err(cx.err(at, "a conjugated path family takes its structure from the fibre"));
            }
            let x = cx.matrix(&omega, r, at.clone(), "omega")?;
            let y = cx.matrix(&omega_fibre, m, at.clone(), "omega_fibre")?;
            PathFamily::conjugated(&rep.representation, &x, &y).map_err(|e| cx.err(at.clone(), e.to_string()))?
        }
        "fixed" => {
            let mut pf = base;
            pf.omega = cx.poly_matrix(&omega, r, &t, EXACT, at.clone(), "omega")?;
            pf.omega_fibre = cx.poly_matrix(&omega_fibre, m, &t, EXACT, at.clone(), "omega_fibre")?;
            let frame = pf.frame.clone();
            let frame_index = |name: &str| {
                index_of(&frame, name).ok_or_else(|| cx.err(at.clone(), format!("`{name}` is not in the frame")))
            };
            if let Some(bracket) = &raw.bracket {
                let zero = parse_poly("0", &t, EXACT).expect("zero parses");
                pf.bracket = vec![vec![vec![zero; r]; r]; r];
                for (pair, terms) in bracket {
                    let parts: Vec<&str> = pair.split(',').map(str::trim).collect();
                    if parts.len() != 2 {
                        return Err(cx.err(at, format!("bracket key `{pair}` must name two frame elements")));
                    }
                    let (i, j) = (frame_index(parts[0])?, frame_index(parts[1])?);
                    for (gen, p) in terms {
                        let k = frame_index(gen)?;
                        let p = cx.poly(p, &t, EXACT)?;
                        pf.bracket[j][i][k] = -&p;
                        pf.bracket[i][j][k] = p;
                    }
                }
            }
            if let Some(action) = &raw.action {
                for (gen, rows) in action {
                    let i = frame_index(gen)?;
                    pf.gamma[i] = cx.poly_matrix(rows, m, &t, EXACT, at.clone(), &format!("action of `{gen}`"))?;
                }
            }
            pf
        }
        other => {
            return Err(cx.err(raw.motion.span(), format!("unknown motion `{other}` (fixed or conjugated)")));
        }
    };
    let closing = match &raw.closing {
        None => None,
        Some(l) => {
            let fam = model
                .family(l.family.get_ref())
                .ok_or_else(|| cx.err(l.family.span(), format!("no family named `{}`", l.family.get_ref())))?;
            let charts = &model.cover(&fam.cover).expect("resolved on load").cover.charts;
            let cycle = l
                .cycle
                .iter()
                .map(|c| index_of(charts, c.get_ref()).ok_or_else(|| cx.err(c.span(), format!("no chart named `{}`", c.get_ref()))))
                .collect::<Result<Vec<_>, _>>()?;
            Some(Closing { family: l.family.get_ref().clone(), cycle })
        }
    };
    Ok((path, closing))
}

fn build_exhaustion(cx: &Ctx, spanned: &Spanned<RawExhaustion>) -> Result<ExhaustionProblem, ModelError> {
    let raw = spanned.get_ref();
    if let Some(dup) = unique(&raw.charts) {
        return Err(cx.err(spanned.span(), format!("chart `{dup}` is declared twice")));
    }
    let mut ep = ExhaustionProblem::new(raw.charts.clone());
    for o in &raw.oracles {
        let or = o.get_ref();
        let chart = |c: &Text| {
            index_of(&raw.charts, c.get_ref()).ok_or_else(|| cx.err(c.span(), format!("no chart named `{}`", c.get_ref())))
        };
        let (i, j) = (chart(&or.from)?, chart(&or.into)?);
        if i == j || ep.oracles.contains_key(&(j, i)) {
            return Err(cx.err(o.span(), "oracles join distinct charts, once per direction"));
        }
        let mu = IndexOracle { prefix: or.prefix.clone(), slope: or.slope, offset: or.offset };
        mu.check().map_err(|e| cx.err(o.span(), format!("oracle is not monotone: {e}")))?;
        ep = ep.with_oracle(j, i, mu);
    }
    Ok(ep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_abelian_file_parses() {
        let m = parse_model("version = 1\n[[algebroid]]\nname = \"ab\"\nframe = [\"e1\", \"e2\"]\n").unwrap();
        assert_eq!(m.algebroids[0].algebroid.rank(), 2);
    }

    #[test]
    fn dangling_reference_is_located() {
        let src = "version = 1\n\n[[representation]]\nname = \"r\"\nalgebroid = \"nowhere\"\nkind = \"trivial\"\n";
        let e = parse_model(src).unwrap_err();
        assert_eq!((e.line, e.column), (5, 13));
        assert!(e.message.contains("nowhere"));
    }

    #[test]
    fn unknown_keys_and_versions_are_rejected() {
        let e = parse_model("version = 1\ncolour = 3\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_model("version = 2\n").unwrap_err();
        assert!(e.message.contains("version"));
        assert!(parse_model("algebroid = []\n").is_err());
    }

    #[test]
    fn brackets_are_antisymmetric() {
        let src = r#"
version = 1
[[algebroid]]
name = "aff"
frame = ["a", "b"]
bracket = { "b,a" = { a = "1" } }
"#;
        let m = parse_model(src).unwrap();
        let a = &m.algebroids[0].algebroid;
        assert_eq!(a.bracket[1][0][0].constant_term(), Rational::from_integer(1.into()));
        assert_eq!(a.bracket[0][1][0].constant_term(), Rational::from_integer((-1).into()));
    }

    #[test]
    fn bad_polynomial_points_at_the_string() {
        let src = "version = 1\n[[algebroid]]\nname = \"t\"\nvars = [\"x\"]\nframe = [\"dx\"]\nanchor = { dx = { x = \"1 +* y\" } }\n";
        let e = parse_model(src).unwrap_err();
        assert_eq!(e.line, 6);
        assert!(e.message.contains("polynomial"));
    }
}
