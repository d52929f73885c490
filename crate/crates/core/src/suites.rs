//! The verification suites behind `barlax verify`.
//!
//! Every suite expands its bounds into independent cells, evaluates them
//! (in parallel when allowed) and returns one [`Record`] per cell, sorted
//! by instance key so the report does not depend on scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bar::{
    hexagon_check, hexagon_witness, lax_check, lemma_swap_check, lemma_swap_witness, phi_all_paths_within, segal_check,
    shuffle_peak, ComponentWitness, Grid, MultiArrow, ObjectGrid, WitnessKind,
};
use crate::error::{Error, Result};
use crate::model::equations::colour_tuples;
use crate::model::{
    check_equation, equation_arity, equation_sides, term_equal, FinArrow, FinSetSplit, FreeTermModel, ModelSpec,
    NFoldModel, ObjWord, TermVerdict,
};
use crate::shuffle::{ColouredGenerator, ColouredShuffle};
use crate::simplicial::{contract, normalize, words_from, BasicArrow, BasicEquation, SimplicialWord};

/// Largest FinSet object a suite will build; bigger draws use a smaller
/// input instead.
pub const SIZE_CAP: usize = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Equations,
    Lemma43,
    Lemma44,
    Hexagon,
    Paths,
    Lax,
    Segal,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] =
        [Suite::Equations, Suite::Lemma43, Suite::Lemma44, Suite::Hexagon, Suite::Paths, Suite::Lax, Suite::Segal];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Equations => "equations",
            Suite::Lemma43 => "lemma43",
            Suite::Lemma44 => "lemma44",
            Suite::Hexagon => "hexagon",
            Suite::Paths => "paths",
            Suite::Lax => "lax",
            Suite::Segal => "segal",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain(&[Suite::All])
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}`")))
    }
}

/// Bounds and selection for one `verify` run.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    /// Arity; ignored in favour of the model's when a model is given.
    pub r: usize,
    pub model: Option<ModelSpec>,
    /// Fixes the FinSet split; otherwise each suite uses its default.
    pub split: Option<usize>,
    pub max_dim: usize,
    pub max_size: usize,
    pub max_len: usize,
    pub seed: u64,
    pub trials: usize,
    pub limit: usize,
    pub timing: bool,
    pub workers: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suite: Suite::All,
            r: 2,
            model: None,
            split: None,
            max_dim: 3,
            max_size: 2,
            max_len: 4,
            seed: 0,
            trials: 50,
            limit: 1000,
            timing: false,
            workers: None,
        }
    }
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        SuiteConfig { suite, ..Self::default() }
    }

    pub fn arity(&self) -> usize {
        self.model.as_ref().map_or(self.r, ModelSpec::arity)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("r", self.arity()),
            ("max-dim", self.max_dim),
            ("max-size", self.max_size),
            ("max-len", self.max_len),
            ("trials", self.trials),
            ("limit", self.limit),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("--{name} must be positive")));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("worker count must be positive".into()));
        }
        if let Some(s) = self.split {
            if s > self.arity() {
                return Err(Error::Config(format!("split {s} exceeds r = {}", self.arity())));
            }
        }
        if let Some(ModelSpec::FinSet { split, .. }) = &self.model {
            if self.split.is_some_and(|s| s != *split) {
                return Err(Error::Config("--split disagrees with the model's split".into()));
            }
        }
        if matches!(self.model, Some(ModelSpec::Free { .. })) && !matches!(self.suite, Suite::Equations) {
            return Err(Error::Config(format!("suite `{}` runs on finset models only", self.suite)));
        }
        Ok(())
    }

    fn bounds(&self, keys: &[&str]) -> Value {
        let mut out = serde_json::Map::new();
        for &k in keys {
            let v = match k {
                "r" => json!(self.arity()),
                "max_dim" => json!(self.max_dim),
                "max_size" => json!(self.max_size),
                "max_len" => json!(self.max_len),
                "seed" => json!(self.seed),
                "trials" => json!(self.trials),
                "limit" => json!(self.limit),
                _ => continue,
            };
            out.insert(k.to_string(), v);
        }
        Value::Object(out)
    }

    /// The FinSet models to sweep: the given one, the given split, or the
    /// suite's default (every split when `all_splits`, else `⌊r/2⌋`).
    fn finset_models(&self, all_splits: bool) -> Result<Vec<FinSetSplit>> {
        match &self.model {
            Some(ModelSpec::FinSet { r, split, corrupt: true }) => Ok(vec![FinSetSplit::corrupted(*r, *split)?]),
            Some(ModelSpec::FinSet { r, split, .. }) => Ok(vec![FinSetSplit::new(*r, *split)?]),
            Some(ModelSpec::Free { .. }) => Err(Error::Config("expected a finset model".into())),
            None => {
                let r = self.r;
                let splits: Vec<usize> = match self.split {
                    Some(s) => vec![s],
                    None if all_splits => (0..=r).collect(),
                    None => vec![r / 2],
                };
                splits.into_iter().map(|s| FinSetSplit::new(r, s)).collect()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One report line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub suite: String,
    pub instance: String,
    pub bounds: Value,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl Record {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

pub fn all_pass(records: &[Record]) -> bool {
    records.iter().all(Record::passed)
}

pub fn to_json_lines(records: &[Record]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

fn model_key(m: &FinSetSplit) -> String {
    format!("finset:r={},split={}{}", m.arity(), m.split(), if m.is_corrupt() { ",corrupt" } else { "" })
}

fn colours_key(cs: &[usize]) -> String {
    cs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// A cell to evaluate: its instance key and the check itself, returning
/// the verdict and an optional witness.
type Cell<'a> = (String, Box<dyn Fn() -> Result<(bool, Option<Value>)> + Send + Sync + 'a>);

fn evaluate(cfg: &SuiteConfig, suite: Suite, bounds: &Value, cells: Vec<Cell<'_>>) -> Result<Vec<Record>> {
    let mut out = cells
        .into_par_iter()
        .map(|(instance, check)| {
            let start = Instant::now();
            let (ok, witness) = check()?;
            Ok(Record {
                suite: suite.name().to_string(),
                instance,
                bounds: bounds.clone(),
                verdict: if ok { Verdict::Pass } else { Verdict::Fail },
                witness,
                elapsed_ms: cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.instance.cmp(&b.instance));
    Ok(out)
}

/// Runs the configured suite, inside a bounded pool when `workers` is set.
pub fn run(cfg: &SuiteConfig) -> Result<Vec<Record>> {
    cfg.validate()?;
    let go = || -> Result<Vec<Record>> {
        let suites: Vec<Suite> = match cfg.suite {
            Suite::All => Suite::EACH.to_vec(),
            s => vec![s],
        };
        let mut out = Vec::new();
        for s in suites {
            out.extend(run_one(cfg, s)?);
        }
        Ok(out)
    };
    match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(go),
        None => go(),
    }
}

fn run_one(cfg: &SuiteConfig, suite: Suite) -> Result<Vec<Record>> {
    match suite {
        Suite::Equations => equations(cfg),
        Suite::Lemma43 => lemma43(cfg),
        Suite::Lemma44 => lemma44(cfg),
        Suite::Hexagon => hexagon(cfg),
        Suite::Paths => paths(cfg),
        Suite::Lax => lax(cfg),
        Suite::Segal => segal(cfg),
        Suite::All => unreachable!("expanded by run"),
    }
}

/// Every tuple in `0..=max` of length `len`, first coordinate slowest.
fn size_tuples(len: usize, max: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = (max + 1).pow(len as u32);
    (0..total).map(move |mut code| {
        let mut t = vec![0; len];
        for slot in t.iter_mut().rev() {
            *slot = code % (max + 1);
            code /= max + 1;
        }
        t
    })
}

fn equations(cfg: &SuiteConfig) -> Result<Vec<Record>> {
    let bounds = cfg.bounds(&["r", "max_size"]);
    if let Some(ModelSpec::Free { r }) = cfg.model {
        return free_equations(cfg, r, &bounds);
    }
    let models = cfg.finset_models(true)?;
    let mut cells: Vec<Cell> = Vec::new();
    for m in &models {
        for eq in 1..=20 {
            let shape = equation_arity(eq)?;
            for cs in colour_tuples(m.arity(), shape.colours) {
                let key = format!("{} eq={eq:02} colours={}", model_key(m), colours_key(&cs));
                let max = cfg.max_size;
                cells.push((
                    key,
                    Box::new(move || {
                        for sizes in size_tuples(shape.objects, max) {
                            if !check_equation(m, eq, &cs, &sizes)? {
                                return Ok((false, Some(json!({ "equation": eq, "colours": cs, "sizes": sizes }))));
                            }
                        }
                        Ok((true, None))
                    }),
                ));
            }
        }
    }
    evaluate(cfg, Suite::Equations, &bounds, cells)
}

/// In the free model each side is a term over variables; equality is the
/// bounded search.
fn free_equations(cfg: &SuiteConfig, r: usize, bounds: &Value) -> Result<Vec<Record>> {
    let free = FreeTermModel::new(r);
    let free = &free;
    let mut cells: Vec<Cell> = Vec::new();
    for eq in 1..=20 {
        let shape = equation_arity(eq)?;
        for cs in colour_tuples(r, shape.colours) {
            let key = format!("free:r={r} eq={eq:02} colours={}", colours_key(&cs));
            cells.push((
                key,
                Box::new(move || {
                    let objs: Vec<ObjWord> = (0..shape.objects).map(|i| ObjWord::var(&format!("x{i}"))).collect();
                    let (lhs, rhs) = equation_sides(free, eq, &cs, &objs)?;
                    Ok(match term_equal(free, &lhs, &rhs, 1)? {
                        TermVerdict::Proven(_) => (true, None),
                        other => (false, Some(json!({ "verdict": format!("{other:?}") }))),
                    })
                }),
            ));
        }
    }
    evaluate(cfg, Suite::Equations, bounds, cells)
}

/// Deterministic input sizes in `lo..=hi`.
fn random_sizes(dims: &[usize], lo: usize, hi: usize, rng: &mut ChaCha8Rng) -> ObjectGrid<FinSetSplit> {
    Grid::from_fn(dims.to_vec(), |_| rng.gen_range(lo..=hi))
}

/// An input for `theta` whose objects stay under [`SIZE_CAP`]: random
/// sizes first, then all ones, then all zeros.
fn capped_input(m: &FinSetSplit, theta: &ColouredShuffle, max_size: usize, seed: u64) -> Result<ObjectGrid<FinSetSplit>> {
    for x in input_candidates(theta.src_dims(), max_size, seed) {
        if path_peak(m, theta, &x)? <= SIZE_CAP {
            return Ok(x);
        }
    }
    Err(Error::Config(format!("no input for {theta} stays under the size cap")))
}

fn input_candidates(dims: &[usize], max_size: usize, seed: u64) -> [ObjectGrid<FinSetSplit>; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    [random_sizes(dims, 0, max_size, &mut rng), Grid::from_fn(dims.to_vec(), |_| 1), Grid::from_fn(dims.to_vec(), |_| 0)]
}

fn under_cap(x: &ObjectGrid<FinSetSplit>) -> bool {
    x.cells().iter().all(|&n| n <= SIZE_CAP)
}

/// Largest object met by `W` along the canonical path of `theta`.
fn path_peak(m: &FinSetSplit, theta: &ColouredShuffle, x: &ObjectGrid<FinSetSplit>) -> Result<usize> {
    let mut at = theta.clone();
    let mut peak = shuffle_peak(m, &at, x)?;
    for p in theta.canonical_path().swaps {
        at = at.swap(p)?;
        peak = peak.max(shuffle_peak(m, &at, x)?);
    }
    Ok(peak)
}

fn stable_hash(s: &str) -> u64 {
    // FNV-1a; only needs to be stable across runs.
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// Which family of basic equation `outer ∘ inner` instantiates.
pub fn basic_family(rule: BasicEquation, outer: BasicArrow, inner: BasicArrow) -> &'static str {
    let idx = |a: BasicArrow| match a {
        BasicArrow::Face { idx, .. } | BasicArrow::Degeneracy { idx, .. } => idx,
        BasicArrow::Identity { .. } => 0,
    };
    match rule {
        BasicEquation::FaceFace if idx(inner) >= idx(outer) + 2 => "dd-apart",
        BasicEquation::FaceFace => "dd-adjacent",
        BasicEquation::DegenDegen => "ss",
        BasicEquation::FaceDegenBelow => "ds-below",
        BasicEquation::FaceDegenCancel if idx(inner) == idx(outer) => "ds-cancel-same",
        BasicEquation::FaceDegenCancel => "ds-cancel-next",
        BasicEquation::FaceDegenAbove => "ds-above",
    }
}

/// Both sides of every basic equation whose inner source is `≤ max_src`.
pub fn basic_equation_pairs(max_src: usize) -> Vec<(&'static str, SimplicialWord, SimplicialWord)> {
    let mut out = Vec::new();
    for n in 0..=max_src {
        for inner in BasicArrow::generators_from(n, None) {
            for outer in BasicArrow::generators_from(inner.tgt(), None) {
                if let Some((rule, rhs)) = contract(outer, inner) {
                    let lhs = SimplicialWord::new(n, vec![outer, inner]).expect("composable");
                    let rhs = SimplicialWord::new(n, rhs).expect("contractum is composable");
                    out.push((basic_family(rule, outer, inner), lhs, rhs));
                }
            }
        }
    }
    out
}

fn kind_of(g: BasicArrow) -> &'static str {
    if g.is_face() {
        "face"
    } else {
        "degeneracy"
    }
}

/// Idle colours get dimension 2 so the surrounding products are not all 1.
fn context_dims(r: usize) -> Vec<usize> {
    vec![2; r]
}

fn swap_cells<'a>(
    cfg: &'a SuiteConfig,
    models: &'a [FinSetSplit],
    pairs: Vec<(&'static str, SimplicialWord, SimplicialWord)>,
    max_g: usize,
    witness: bool,
) -> Vec<Cell<'a>> {
    let gs: Vec<BasicArrow> = (0..=max_g).flat_map(|m| BasicArrow::generators_from(m, None)).collect();
    let mut groups: BTreeMap<(String, &'static str, &'static str, usize, usize), Vec<(SimplicialWord, SimplicialWord, BasicArrow)>> =
        BTreeMap::new();
    for m in models {
        let r = m.arity();
        for k in 1..=r {
            for l in (1..=r).filter(|&l| l != k) {
                for (family, a, b) in &pairs {
                    for &g in &gs {
                        groups
                            .entry((model_key(m), family, kind_of(g), k, l))
                            .or_default()
                            .push((a.clone(), b.clone(), g));
                    }
                }
            }
        }
    }
    groups
        .into_iter()
        .map(|((mk, family, gk, k, l), members)| {
            let model = models.iter().find(|m| model_key(m) == mk).expect("model listed");
            let key = format!("{mk} family={family} g={gk} colours={k},{l}");
            let seed = cfg.seed ^ stable_hash(&key);
            let max_size = cfg.max_size;
            let cell: Cell = (
                key,
                Box::new(move || {
                    let ctx = context_dims(model.arity());
                    for (i, (a, b, g)) in members.iter().enumerate() {
                        let (t, _) = crate::bar::lemma_swap_shuffles(a, b, k, *g, l, &ctx)?;
                        let x = capped_input(model, &t, max_size, seed.wrapping_add(i as u64))?;
                        if !lemma_swap_check(model, a, b, k, *g, l, &ctx, &x)? {
                            return Ok((false, Some(json!({ "phi": a.to_string(), "phi2": b.to_string(), "g": g.to_string(), "sizes": x.cells() }))));
                        }
                    }
                    if !witness || k > l {
                        return Ok((true, None));
                    }
                    // The first member's symbolic witness, for inspection.
                    let (a, b, g) = &members[0];
                    let w = lemma_swap_witness(a, b, k, *g, l, &ctx)?;
                    let ok = w.iter().all(|c| matches!(c.kind, WitnessKind::Equation(_)));
                    Ok((ok, Some(json!({ "phi": a.to_string(), "phi2": b.to_string(), "g": g.to_string(), "components": witness_json(&w) }))))
                }),
            );
            cell
        })
        .collect()
}

fn witness_json(w: &[ComponentWitness]) -> Value {
    serde_json::to_value(w).expect("witnesses serialize")
}

fn lemma43(cfg: &SuiteConfig) -> Result<Vec<Record>> {
    let bounds = cfg.bounds(&["r", "max_dim", "max_size", "seed"]);
    let models = cfg.finset_models(true)?;
    let cells = swap_cells(cfg, &models, basic_equation_pairs(cfg.max_dim), cfg.max_dim, cfg.arity() == 2);
    evaluate(cfg, Suite::Lemma43, &bounds, cells)
}

/// Every word of length `≤ max_len` that is not already normal, paired
/// with its normal form.
pub fn normalization_pairs(max_dim: usize, max_len: usize) -> Vec<(&'static str, SimplicialWord, SimplicialWord)> {
    let mut out = Vec::new();
    for src in 0..=max_dim {
        for len in 2..=max_len {
            for w in words_from(src, len, max_dim) {
                let nf = normalize(&w);
                if nf != w {
                    out.push(("normal-form", w, nf));
                }
            }
        }
    }
    out
}

fn lemma44(cfg: &SuiteConfig) -> Result<Vec<Record>> {
    let bounds = cfg.bounds(&["r", "max_dim", "max_len", "max_size", "seed"]);
    let models = cfg.finset_models(false)?;
    let cells = swap_cells(cfg, &models, normalization_pairs(cfg.max_dim, cfg.max_len), cfg.max_dim, false);
    evaluate(cfg, Suite::Lemma44, &bounds, cells)
}

/// The hexagon case a generator falls into: `None` for outer faces, whose
/// χ entries are all identities.
fn hexagon_kind(a: BasicArrow) -> &'static str {
    match a {
        BasicArrow::Degeneracy { .. } => "s",
        a if a.is_inner_face() => "d",
        _ => "o",
    }
}

/// Where the single non-identity component of a nontrivial hexagon sits:
/// per colour, the row `j` of `s_j` or `j - 1` of `d_j`.
pub fn hexagon_component(f: BasicArrow, g: BasicArrow, h: BasicArrow) -> usize {
    let row = |a: BasicArrow| match a {
        BasicArrow::Degeneracy { idx, .. } => idx,
        BasicArrow::Face { idx, .. } => idx - 1,
        BasicArrow::Identity { .. } => 0,
    };
    (row(f) * g.tgt() + row(g)) * h.tgt() + row(h)
}

/// The equation the hexagon of a nontrivial case reduces to.
pub fn hexagon_case_equation(kinds: &str) -> Option<usize> {
    ["sss", "ssd", "sds", "sdd", "dss", "dsd", "dds", "ddd"]
        .iter()
        .position(|k| *k == kinds)
        .map(|i| 13 + i)
}

fn hexagon(cfg: &SuiteConfig) -> Result<Vec<Record>> {
    let bounds = cfg.bounds(&["r", "max_dim", "max_size", "seed"]);
    let r = cfg.arity();
    if r < 3 {
        return Err(Error::Config("the hexagon suite needs r >= 3".into()));
    }
    let models = cfg.finset_models(true)?;
    let gens: Vec<BasicArrow> = (0..=cfg.max_dim).flat_map(|n| BasicArrow::generators_from(n, None)).collect();
    let mut cells: Vec<Cell> = Vec::new();
    let ctx = context_dims(r);
    for m in &models {
        for cs in colour_tuples(r, 3) {
            for fk in ["o", "s", "d"] {
                for gk in ["o", "s", "d"] {
                    for hk in ["o", "s", "d"] {
                        let key = format!("{} colours={} kinds={fk}{gk}{hk}", model_key(m), colours_key(&cs));
                        let seed = cfg.seed ^ stable_hash(&key);
                        let (gens, ctx, cs) = (&gens, ctx.clone(), cs.clone());
                        let max_size = cfg.max_size;
                        cells.push((
                            key,
                            Box::new(move || {
                                let pick = |k: &str| gens.iter().copied().filter(|a| hexagon_kind(*a) == k).collect::<Vec<_>>();
                                let mut count = 0u64;
                                for f in pick(fk) {
                                    for g in pick(gk) {
                                        for h in pick(hk) {
                                            let theta = crate::bar::hexagon_shuffle(
                                                &ctx,
                                                ColouredGenerator::new(f, cs[0]),
                                                ColouredGenerator::new(g, cs[1]),
                                                ColouredGenerator::new(h, cs[2]),
                                            )?;
                                            let x = capped_input(m, &theta, max_size, seed.wrapping_add(count))?;
                                            count += 1;
                                            if !hexagon_check(m, &theta, &x)? {
                                                return Ok((false, Some(json!({ "shuffle": theta.to_string(), "sizes": x.cells() }))));
                                            }
                                        }
                                    }
                                }
                                Ok((true, Some(json!({ "triples": count }))))
                            }),
                        ));
                    }
                }
            }
        }
    }
    // Symbolic witnesses per nontrivial case, at colours 1 < 2 < 3.
    let inner: Vec<BasicArrow> = gens.iter().copied().filter(|a| hexagon_kind(*a) != "o").collect();
    for kinds in ["sss", "ssd", "sds", "sdd", "dss", "dsd", "dds", "ddd"] {
        let key = format!("witness kinds={kinds}");
        let inner = inner.clone();
        cells.push((
            key,
            Box::new(move || {
                let chars: Vec<String> = kinds.chars().map(String::from).collect();
                let pick = |k: &str| inner.iter().copied().filter(|a| hexagon_kind(*a) == k).collect::<Vec<_>>();
                let expected = hexagon_case_equation(kinds).expect("listed case");
                let mut count = 0u64;
                for f in pick(&chars[0]) {
                    for g in pick(&chars[1]) {
                        for h in pick(&chars[2]) {
                            let theta = crate::bar::hexagon_shuffle(
                                &[1, 1, 1],
                                ColouredGenerator::new(f, 1),
                                ColouredGenerator::new(g, 2),
                                ColouredGenerator::new(h, 3),
                            )?;
                            let got = hexagon_witness(&theta)?;
                            let want = vec![ComponentWitness {
                                index: hexagon_component(f, g, h),
                                kind: WitnessKind::Equation(vec![expected]),
                            }];
                            count += 1;
                            if got != want {
                                return Ok((false, Some(json!({ "shuffle": theta.to_string(), "components": witness_json(&got) }))));
                            }
                        }
                    }
                }
                Ok((true, Some(json!({ "equation": expected, "triples": count }))))
            }),
        ));
    }
    evaluate(cfg, Suite::Hexagon, &bounds, cells)
}

/// Number of normalizing paths of a colour sequence, capped at `cap`.
fn path_count(colours: &[usize], cap: usize) -> usize {
    fn go(s: &mut Vec<usize>, cap: usize, memo: &mut BTreeMap<Vec<usize>, usize>) -> usize {
        if let Some(&n) = memo.get(s.as_slice()) {
            return n;
        }
        let mut total = 0;
        let mut any = false;
        for i in 0..s.len().saturating_sub(1) {
            if s[i] < s[i + 1] {
                any = true;
                s.swap(i, i + 1);
                total = (total + go(s, cap, memo)).min(cap);
                s.swap(i, i + 1);
            }
        }
        let n = if any { total } else { 1 };
        memo.insert(s.clone(), n);
        n
    }
    go(&mut colours.to_vec(), cap, &mut BTreeMap::new())
}

/// All colour sequences of length `≤ max_len` over `1..=r`.
fn colour_sequences(r: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|s: &Vec<usize>| {
                (1..=r).map(move |c| {
                    let mut t = s.clone();
                    t.push(c);
                    t
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Words per colour for a colour sequence: of the right length, objects
/// `≤ max_dim`; an unused colour ranges over its source dimension.
fn colour_word_choices(seq: &[usize], r: usize, max_dim: usize) -> Vec<Vec<SimplicialWord>> {
    (1..=r)
        .map(|c| {
            let len = seq.iter().filter(|&&x| x == c).count();
            (0..=max_dim)
                .flat_map(|src| {
                    if len == 0 {
                        vec![SimplicialWord::identity(src)]
                    } else {
                        words_from(src, len, max_dim)
                    }
                })
                .collect()
        })
        .collect()
}

/// Builds the shuffle that reads the words' letters in the order `seq`.
fn interleave(seq: &[usize], words: &[&SimplicialWord]) -> Result<ColouredShuffle> {
    let mut next = vec![0usize; words.len()];
    let entries = seq
        .iter()
        .map(|&c| {
            let e = ColouredGenerator::new(words[c - 1].arrows()[next[c - 1]], c);
            next[c - 1] += 1;
            e
        })
        .collect();
    ColouredShuffle::new(words.len(), words.iter().map(|w| w.src()).collect(), entries)
}

fn for_each_choice<T>(choices: &[Vec<T>], mut f: impl FnMut(&[&T]) -> Result<bool>) -> Result<bool> {
    let mut idx = vec![0usize; choices.len()];
    if choices.iter().any(Vec::is_empty) {
        return Ok(true);
    }
    loop {
        let pick: Vec<&T> = idx.iter().zip(choices).map(|(&i, c)| &c[i]).collect();
        if !f(&pick)? {
            return Ok(false);
        }
        let mut pos = choices.len();
        loop {
            if pos == 0 {
                return Ok(true);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn paths(cfg: &SuiteConfig) -> Result<Vec<Record>> {
    let bounds = cfg.bounds(&["r", "max_dim", "max_len", "max_size", "seed"]);
    let models = cfg.finset_models(false)?;
    let mut cells: Vec<Cell> = Vec::new();
    for m in &models {
        let r = m.arity();
        for seq in colour_sequences(r, cfg.max_len) {
            if path_count(&seq, 2) < 2 {
                // a single normalizing path: nothing to compare
                continue;
            }
            let key = format!("{} colours={}", model_key(m), if seq.is_empty() { "-".into() } else { colours_key(&seq) });
            let seed = cfg.seed ^ stable_hash(&key);
            let (max_dim, max_size) = (cfg.max_dim, cfg.max_size);
            cells.push((
                key,
                Box::new(move || {
                    let choices = colour_word_choices(&seq, r, max_dim);
                    let mut count = 0u64;
                    let mut failure = None;
                    let ok = for_each_choice(&choices, |words| {
                        let theta = interleave(&seq, words)?;
                        let mut found = None;
                        for x in input_candidates(theta.src_dims(), max_size, seed.wrapping_add(count)) {
                            if let Some(d) = phi_all_paths_within(m, &theta, &x, under_cap)? {
                                found = Some((x, d));
                                break;
                            }
                        }
                        let Some((x, distinct)) = found else {
                            return Err(Error::Config(format!("no input for {theta} stays under the size cap")));
                        };
                        count += 1;
                        if distinct.len() != 1 {
                            failure = Some(json!({ "shuffle": theta.to_string(), "sizes": x.cells(), "distinct": distinct.len() }));
                            return Ok(false);
                        }
                        Ok(true)
                    })?;
                    Ok((ok, Some(failure.unwrap_or_else(|| json!({ "shuffles": count })))))
                }),
            ));
        }
    }
    evaluate(cfg, Suite::Paths, &bounds, cells)
}

/// A random arrow of `(Δ^op)^r` from `src`, objects `≤ max_dim`.
fn random_multi(src: &[usize], max_len: usize, max_dim: usize, rng: &mut ChaCha8Rng) -> MultiArrow {
    MultiArrow::new(
        src.iter()
            .map(|&n| {
                let len = rng.gen_range(0..=max_len);
                crate::simplicial::random_word_with(n, len, Some(max_dim), rng)
            })
            .collect(),
    )
}

/// Every shuffle whose φ a lax check computes, flagged when it is
/// evaluated at `W(f1)x` rather than at `x`.
fn lax_shuffles(f1: &MultiArrow, f2: &MultiArrow, f3: &MultiArrow) -> Result<Vec<(ColouredShuffle, bool)>> {
    let nf = |f: &MultiArrow| f.normalized().shuffle();
    let concat = |a: &MultiArrow, b: &MultiArrow| -> Result<ColouredShuffle> {
        let words = a
            .normalized()
            .components()
            .iter()
            .zip(b.normalized().components())
            .map(|(x, y)| crate::simplicial::compose(x, y))
            .collect::<Result<Vec<_>>>()?;
        Ok(MultiArrow::new(words).shuffle())
    };
    let (n1, n3) = (nf(f1), nf(f3));
    Ok(vec![
        (nf(&f3.after(f2)?).then_after(&n1)?, false),
        (n3.then_after(&nf(f2))?, true),
        (n3.then_after(&nf(&f2.after(f1)?))?, false),
        (nf(f2).then_after(&n1)?, false),
        (concat(f3, f2)?.then_after(&n1)?, false),
        (n3.then_after(&concat(f2, f1)?)?, false),
    ])
}

/// One seeded lax instance: a composable triple and an input whose
/// objects stay under the cap, with non-empty source and target grids,
/// redrawn from the same stream otherwise.
pub fn lax_instance(
    m: &FinSetSplit,
    max_dim: usize,
    max_len: usize,
    max_size: usize,
    seed: u64,
) -> Result<(MultiArrow, MultiArrow, MultiArrow, ObjectGrid<FinSetSplit>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = m.arity();
    for _ in 0..1000 {
        let src: Vec<usize> = (0..r).map(|_| rng.gen_range(0..=max_dim)).collect();
        let f1 = random_multi(&src, max_len, max_dim, &mut rng);
        let f2 = random_multi(&f1.tgt(), max_len, max_dim, &mut rng);
        let f3 = random_multi(&f2.tgt(), max_len, max_dim, &mut rng);
        let x = random_sizes(&src, 0, max_size, &mut rng);
        if x.is_empty() || f3.tgt().contains(&0) {
            // nothing but units, or an empty diagram
            continue;
        }
        let mut peak = 0;
        for (theta, later) in lax_shuffles(&f1, &f2, &f3)? {
            let input = if later { crate::bar::w_multi(m, &f1, &x)? } else { x.clone() };
            peak = peak.max(path_peak(m, &theta, &input)?);
        }
        if peak <= SIZE_CAP {
            return Ok((f1, f2, f3, x));
        }
    }
    Err(Error::Config("could not draw a lax instance under the size cap".into()))
}

fn lax(cfg: &SuiteConfig) -> Result<Vec<Record>> {
    let bounds = cfg.bounds(&["r", "max_dim", "max_len", "max_size", "seed", "trials"]);
    let models = cfg.finset_models(false)?;
    let mut cells: Vec<Cell> = Vec::new();
    for m in &models {
        for t in 0..cfg.trials {
            let key = format!("{} trial={t:04}", model_key(m));
            let seed = cfg.seed.wrapping_mul(1_000_003).wrapping_add(t as u64);
            let (max_dim, max_len, max_size) = (cfg.max_dim, cfg.max_len, cfg.max_size);
            cells.push((
                key,
                Box::new(move || {
                    let (f1, f2, f3, x) = lax_instance(m, max_dim, max_len, max_size, seed)?;
                    let report = lax_check(m, &f1, &f2, &f3, &x)?;
                    let witness = json!({
                        "f1": f1.to_string(), "f2": f2.to_string(), "f3": f3.to_string(),
                        "sizes": x.cells(), "report": report,
                    });
                    Ok((report.holds(), Some(witness)))
                }),
            ));
        }
    }
    evaluate(cfg, Suite::Lax, &bounds, cells)
}

/// A random arrow grid out of `x`.
fn random_arrow_grid(x: &ObjectGrid<FinSetSplit>, max_size: usize, rng: &mut ChaCha8Rng) -> Grid<FinArrow> {
    x.map(|&n| {
        let cod = if n == 0 { rng.gen_range(0..=max_size) } else { rng.gen_range(1..=max_size.max(1)) };
        FinArrow::new(cod, (0..n).map(|_| rng.gen_range(0..cod) as u32).collect()).expect("values below cod")
    })
}

fn segal(cfg: &SuiteConfig) -> Result<Vec<Record>> {
    let bounds = cfg.bounds(&["r", "max_dim", "max_size", "seed", "trials"]);
    let models = cfg.finset_models(false)?;
    let mut cells: Vec<Cell> = Vec::new();
    for m in &models {
        let r = m.arity();
        for c in 1..=r {
            for mm in 1..=cfg.max_dim {
                let key = format!("{} colour={c} m={mm}", model_key(m));
                let seed = cfg.seed ^ stable_hash(&key);
                let (max_dim, max_size, trials) = (cfg.max_dim, cfg.max_size, cfg.trials.min(5));
                cells.push((
                    key,
                    Box::new(move || {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        let others = vec![(0..=max_dim).collect::<Vec<_>>(); r - 1];
                        let mut count = 0u64;
                        let mut failure = None;
                        let ok = for_each_choice(&others, |rest| {
                            let mut dims: Vec<usize> = rest.iter().map(|&&d| d).collect();
                            dims.insert(c - 1, mm);
                            let x = random_sizes(&dims, 0, max_size, &mut rng);
                            let arrows: Vec<_> = (0..trials).map(|_| random_arrow_grid(&x, max_size, &mut rng)).collect();
                            count += 1;
                            if !segal_check(m, c, &x, &arrows)? {
                                failure = Some(json!({ "dims": dims, "sizes": x.cells() }));
                                return Ok(false);
                            }
                            Ok(true)
                        })?;
                        Ok((ok, Some(failure.unwrap_or_else(|| json!({ "grids": count })))))
                    }),
                ));
            }
        }
    }
    evaluate(cfg, Suite::Segal, &bounds, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(suite: Suite) -> SuiteConfig {
        SuiteConfig { r: 2, max_dim: 2, max_size: 1, max_len: 3, trials: 3, ..SuiteConfig::new(suite) }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.iter().chain(&[Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!(matches!("nope".parse::<Suite>(), Err(Error::Config(_))));
    }

    #[test]
    fn validation_rejects_bad_bounds() {
        assert!(SuiteConfig { max_dim: 0, ..cfg(Suite::Lax) }.validate().is_err());
        assert!(SuiteConfig { split: Some(3), ..cfg(Suite::Lax) }.validate().is_err());
        let free = SuiteConfig { model: Some("free:r=2".parse().unwrap()), ..cfg(Suite::Lax) };
        assert!(free.validate().is_err());
        assert!(SuiteConfig { suite: Suite::Equations, ..free }.validate().is_ok());
    }

    #[test]
    fn basic_pairs_cover_every_family() {
        let mut fams: Vec<&str> = basic_equation_pairs(3).iter().map(|p| p.0).collect();
        fams.sort_unstable();
        fams.dedup();
        assert_eq!(fams.len(), 7, "{fams:?}");
        for (_, a, b) in basic_equation_pairs(3) {
            assert!(crate::simplicial::equal(&a, &b).unwrap());
        }
    }

    #[test]
    fn path_counts() {
        assert_eq!(path_count(&[1, 2, 3], 10), 2);
        assert_eq!(path_count(&[1, 1, 2], 10), 1);
        assert_eq!(path_count(&[3, 2, 1], 10), 1);
        assert_eq!(path_count(&[1, 2, 1, 2], 10), 2);
    }

    #[test]
    fn interleave_reads_letters_in_order() {
        let a: SimplicialWord = "d2_1 . d3_1".parse().unwrap();
        let b: SimplicialWord = "s2_0".parse().unwrap();
        let t = interleave(&[1, 2, 1], &[&a, &b]).unwrap();
        assert_eq!(t.to_string(), "(d2_1 @1) (s2_0 @2) (d3_1 @1)");
    }

    #[test]
    fn small_runs_pass_and_are_deterministic() {
        for s in Suite::EACH {
            let mut c = cfg(s);
            if s == Suite::Hexagon {
                c.r = 3;
                c.max_dim = 1;
            }
            if s == Suite::Paths {
                c.max_len = 4;
                c.max_dim = 1;
            }
            let a = run(&c).unwrap();
            assert!(!a.is_empty(), "{s}");
            assert!(all_pass(&a), "{s}: {:?}", a.iter().find(|r| !r.passed()));
            assert_eq!(to_json_lines(&a), to_json_lines(&run(&c).unwrap()));
        }
    }

    #[test]
    fn corrupted_model_fails_with_witness() {
        let c = SuiteConfig {
            model: Some("finset:r=2,split=1,corrupt".parse().unwrap()),
            max_size: 2,
            ..cfg(Suite::Equations)
        };
        let recs = run(&c).unwrap();
        let failed: Vec<_> = recs.iter().filter(|r| !r.passed()).collect();
        assert!(failed.iter().any(|r| r.instance.contains("eq=02")));
        assert!(failed.iter().all(|r| r.witness.is_some()));
    }

    #[test]
    fn elapsed_only_with_timing() {
        let c = cfg(Suite::Segal);
        assert!(run(&c).unwrap().iter().all(|r| r.elapsed_ms.is_none()));
        let c = SuiteConfig { timing: true, ..c };
        assert!(run(&c).unwrap().iter().all(|r| r.elapsed_ms.is_some()));
    }
}
