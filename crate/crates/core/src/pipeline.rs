//! End-to-end runs and stage-by-stage reruns over an output directory.
//!
//! [`analyze`] computes everything in memory. [`run_analyze`] adds file
//! input, artifact rendering and a manifest. The `run_*` stage functions
//! read the artifacts of earlier stages from a directory and write the
//! same bytes `run_analyze` would, so any suffix of the pipeline can be
//! rerun on its own.
//!
//! Artifacts are rendered fully in memory and written by one writer at the
//! end of a stage. A failed run removes what it wrote.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::association::{associate_all, variabilities, SimilarityScope, TopicAssociation};
use crate::corpus::{
    bin_documents, build_binning, read_corpus, CorpusSchema, Document, Granularity, TimeBinning,
};
use crate::error::{Error, Result};
use crate::export::{
    associations_json, parse_associations, read_ngram_trends, read_similarity, read_topic_trends,
    render_heatmap, render_trend_svg, write_ngram_trends, write_similarity, write_topic_trends, MatrixFile,
    Series,
};
use crate::ngram::{build_ngram_table, NgramKey, NgramTable, TableOptions, UsageTrend};
use crate::salience::{
    normalize_salience, salience_matrix, topic_salience_trend, topic_usage_trend, Normalization,
    SalienceTrend, TopicUsageTrend,
};
use crate::topic_space::{
    parse_lexicon, similarity_table, Lexicon, SimilarityMatrix, TopicFramework, TopicSpace,
};

pub const NGRAM_TRENDS: &str = "ngram_trends.csv";
pub const SIMILARITY: &str = "similarity.csv";
pub const ASSOCIATIONS: &str = "associations.json";
pub const SALIENCE: &str = "salience.csv";
pub const SALIENCE_NORMALIZED: &str = "salience_normalized.csv";
pub const TOPIC_USAGE: &str = "topic_usage.csv";
pub const MATRICES_DIR: &str = "matrices";
pub const CHARTS_DIR: &str = "charts";
pub const MANIFEST: &str = "manifest.json";

const TOOL: &str = env!("CARGO_PKG_NAME");
const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisParams {
    pub n: usize,
    pub granularity: Granularity,
    pub min_total: u64,
    pub percentile: f64,
    pub similarity_scope: SimilarityScope,
    pub normalization: Normalization,
    pub include_titles: bool,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams {
            n: 2,
            granularity: Granularity::Month,
            min_total: 5,
            percentile: 75.0,
            similarity_scope: SimilarityScope::PerTopic,
            normalization: Normalization::ZScore,
            include_titles: true,
        }
    }
}

impl AnalysisParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if !(0.0..=100.0).contains(&self.percentile) {
            return Err(Error::Config(format!("percentile must lie in [0, 100], got {}", self.percentile)));
        }
        Ok(())
    }

    pub fn table_options(&self) -> TableOptions {
        TableOptions { n: self.n, min_total: self.min_total, include_titles: self.include_titles }
    }

    fn echo(&self) -> Value {
        json!({
            "n": self.n,
            "granularity": self.granularity.to_string(),
            "min_total": self.min_total,
            "percentile": self.percentile,
            "similarity_scope": self.similarity_scope.to_string(),
            "normalization": self.normalization.to_string(),
            "include_titles": self.include_titles,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus: PathBuf,
    pub framework: PathBuf,
    pub lexicon: Option<PathBuf>,
    pub out: PathBuf,
    pub params: AnalysisParams,
    /// Worker threads; `None` uses rayon's default. Not echoed in the
    /// manifest because it never changes results.
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(corpus: impl Into<PathBuf>, framework: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            corpus: corpus.into(),
            framework: framework.into(),
            lexicon: None,
            out: out.into(),
            params: AnalysisParams::default(),
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.threads == Some(0) {
            return Err(Error::Config("thread count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(f),
    }
}

/// Every intermediate and final result of one analysis.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub params: AnalysisParams,
    pub framework: TopicFramework,
    pub binning: TimeBinning,
    pub document_count: usize,
    pub table: NgramTable,
    pub trends: BTreeMap<NgramKey, UsageTrend>,
    /// One entry per retained n-gram, values in framework topic order.
    pub similarity: Vec<SimilarityMatrix>,
    pub variabilities: BTreeMap<NgramKey, f64>,
    pub associations: Vec<TopicAssociation>,
    pub usage: Vec<TopicUsageTrend>,
    pub salience: Vec<SalienceTrend>,
    pub normalized: Vec<SalienceTrend>,
    pub timings: Vec<(&'static str, Duration)>,
}

fn timed<T>(
    timings: &mut Vec<(&'static str, Duration)>,
    stage: &'static str,
    f: impl FnOnce() -> Result<T>,
) -> Result<T> {
    let start = Instant::now();
    let out = f().map_err(|e| e.in_stage(stage))?;
    timings.push((stage, start.elapsed()));
    Ok(out)
}

pub fn analyze(
    documents: Vec<Document>,
    framework: TopicFramework,
    lexicon: Option<&Lexicon>,
    params: AnalysisParams,
) -> Result<Analysis> {
    params.validate()?;
    let mut timings = Vec::new();
    let corpus = timed(&mut timings, "ingest", || {
        let binning = build_binning(&documents, params.granularity)?;
        bin_documents(documents, binning)
    })?;
    let (table, trends) = timed(&mut timings, "trends", || {
        let table = build_ngram_table(&corpus, params.table_options())?;
        let trends = table.trends();
        Ok((table, trends))
    })?;
    let (framework, similarity) = timed(&mut timings, "similarity", || {
        let space = TopicSpace::build(framework, lexicon)?;
        let similarity = similarity_table(&table, &space)?;
        Ok((space.framework().clone(), similarity))
    })?;
    let (variabilities, associations) = timed(&mut timings, "associate", || {
        let variabilities = variabilities(&trends)?;
        let associations = associate_all(
            &framework.topic_ids(),
            &similarity,
            &variabilities,
            params.percentile,
            params.similarity_scope,
        )?;
        Ok((variabilities, associations))
    })?;
    let (usage, salience, normalized) = timed(&mut timings, "salience", || {
        topic_trends(&associations, &trends, corpus.bin_count(), params.normalization)
    })?;
    Ok(Analysis {
        params,
        framework,
        binning: *corpus.binning(),
        document_count: corpus.len(),
        table,
        trends,
        similarity,
        variabilities,
        associations,
        usage,
        salience,
        normalized,
        timings,
    })
}

type TopicTrends = (Vec<TopicUsageTrend>, Vec<SalienceTrend>, Vec<SalienceTrend>);

fn topic_trends(
    associations: &[TopicAssociation],
    trends: &BTreeMap<NgramKey, UsageTrend>,
    bin_count: usize,
    normalization: Normalization,
) -> Result<TopicTrends> {
    let usage =
        associations.iter().map(|a| topic_usage_trend(a, trends, bin_count)).collect::<Result<Vec<_>>>()?;
    let salience = associations
        .iter()
        .map(|a| topic_salience_trend(a, trends, bin_count))
        .collect::<Result<Vec<_>>>()?;
    let normalized = normalize_salience(&salience, normalization);
    Ok((usage, salience, normalized))
}

impl Analysis {
    pub fn bin_labels(&self) -> Vec<String> {
        self.binning.labels()
    }

    pub fn empty_topics(&self) -> Vec<&str> {
        self.associations.iter().filter(|a| a.is_empty()).map(|a| a.topic_id.as_str()).collect()
    }

    /// All artifacts except the manifest, in write order.
    pub fn artifacts(&self) -> Result<Vec<Artifact>> {
        let labels = self.bin_labels();
        let mut out = vec![
            trends_artifact(&self.table, &labels)?,
            similarity_artifact(&self.similarity, &self.framework)?,
            associations_artifact(&self.associations),
        ];
        out.extend(salience_artifacts(
            &self.framework,
            &self.usage,
            &self.salience,
            &self.normalized,
            &labels,
        )?);
        Ok(out)
    }

    fn stats(&self) -> Value {
        let labels = self.bin_labels();
        json!({
            "documents": self.document_count,
            "bins": labels.len(),
            "first_bin": labels.first(),
            "last_bin": labels.last(),
            "ngram_instances": self.table.bin_totals().iter().sum::<u64>(),
            "ngram_vocabulary": self.table.len(),
            "topics": self.framework.len(),
            "associations": self.associations.iter().map(|a| a.members.len()).sum::<usize>(),
        })
    }
}

/// A rendered output file; `path` is relative to the output directory and
/// uses `/` separators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub path: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn new(path: impl Into<String>, bytes: impl Into<Vec<u8>>) -> Self {
        Artifact { path: path.into(), bytes: bytes.into() }
    }

    pub fn sha256(&self) -> String {
        sha256_hex(&self.bytes)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn trends_artifact(table: &NgramTable, labels: &[String]) -> Result<Artifact> {
    let mut buf = Vec::new();
    write_ngram_trends(&mut buf, table, labels)?;
    Ok(Artifact::new(NGRAM_TRENDS, buf))
}

fn similarity_artifact(similarity: &[SimilarityMatrix], framework: &TopicFramework) -> Result<Artifact> {
    let mut buf = Vec::new();
    write_similarity(&mut buf, similarity, &framework.topic_ids())?;
    Ok(Artifact::new(SIMILARITY, buf))
}

fn associations_artifact(associations: &[TopicAssociation]) -> Artifact {
    Artifact::new(ASSOCIATIONS, associations_json(associations))
}

fn salience_artifacts(
    framework: &TopicFramework,
    usage: &[TopicUsageTrend],
    salience: &[SalienceTrend],
    normalized: &[SalienceTrend],
    labels: &[String],
) -> Result<Vec<Artifact>> {
    let mut out = Vec::with_capacity(labels.len() + 3);
    for (name, trends) in [(SALIENCE, salience), (SALIENCE_NORMALIZED, normalized), (TOPIC_USAGE, usage)] {
        let mut buf = Vec::new();
        write_topic_trends(&mut buf, trends, labels)?;
        out.push(Artifact::new(name, buf));
    }
    for (t, label) in labels.iter().enumerate() {
        let matrix = salience_matrix(framework, salience, t)?;
        let file = MatrixFile::new(framework, &matrix, label);
        out.push(Artifact::new(format!("{MATRICES_DIR}/{label}.json"), file.to_json()));
    }
    Ok(out)
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read_file(path)?)
        .map_err(|_| Error::Config(format!("{}: not valid UTF-8", path.display())))
}

struct Inputs {
    documents: Vec<Document>,
    framework: TopicFramework,
    lexicon: Option<Lexicon>,
    hashes: Map<String, Value>,
}

fn input_entry(path: &Path, bytes: &[u8]) -> Value {
    json!({"path": path.display().to_string(), "sha256": sha256_hex(bytes)})
}

fn load_corpus_file(path: &Path) -> Result<(Vec<Document>, Value)> {
    let bytes = read_file(path)?;
    let docs = read_corpus(&bytes[..], &CorpusSchema::default())?;
    Ok((docs, input_entry(path, &bytes)))
}

fn load_framework_file(path: &Path) -> Result<(TopicFramework, Value)> {
    let text = read_text(path)?;
    Ok((TopicFramework::from_json(&text)?, input_entry(path, text.as_bytes())))
}

fn load_lexicon_file(path: Option<&Path>) -> Result<(Option<Lexicon>, Option<Value>)> {
    match path {
        None => Ok((None, None)),
        Some(p) => {
            let text = read_text(p)?;
            Ok((Some(parse_lexicon(&text)?), Some(input_entry(p, text.as_bytes()))))
        }
    }
}

fn load_inputs(config: &RunConfig) -> Result<Inputs> {
    let (documents, corpus_entry) = load_corpus_file(&config.corpus)?;
    let (framework, framework_entry) = load_framework_file(&config.framework)?;
    let (lexicon, lexicon_entry) = load_lexicon_file(config.lexicon.as_deref())?;
    let mut hashes = Map::new();
    hashes.insert("corpus".into(), corpus_entry);
    hashes.insert("framework".into(), framework_entry);
    hashes.insert("lexicon".into(), lexicon_entry.unwrap_or(Value::Null));
    Ok(Inputs { documents, framework, lexicon, hashes })
}

fn artifact_entries(artifacts: &[Artifact]) -> Vec<Value> {
    artifacts.iter().map(|a| json!({"path": a.path, "sha256": a.sha256(), "bytes": a.bytes.len()})).collect()
}

fn timings_json(timings: &[(&'static str, Duration)]) -> Value {
    let map: Map<String, Value> =
        timings.iter().map(|(stage, d)| (stage.to_string(), json!(d.as_secs_f64() * 1e3))).collect();
    Value::Object(map)
}

fn to_pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

/// Writes `artifacts` under `dir`. On failure every file written by this
/// call is removed again.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<()> {
    let mut written: Vec<PathBuf> = Vec::new();
    let result = (|| -> Result<()> {
        for a in artifacts {
            let path = dir.join(&a.path);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            fs::write(&path, &a.bytes).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        Ok(())
    })();
    if result.is_err() {
        for p in &written {
            let _ = fs::remove_file(p);
        }
    }
    result
}

fn remove_matrix_files(dir: &Path) {
    let matrices = dir.join(MATRICES_DIR);
    if let Ok(entries) = fs::read_dir(&matrices) {
        for e in entries.flatten() {
            let p = e.path();
            if p.extension().is_some_and(|x| x == "json") {
                let _ = fs::remove_file(p);
            }
        }
    }
    let _ = fs::remove_dir(&matrices);
}

/// Removes every artifact an `analyze` run can produce. Other files in
/// `dir` are left alone.
pub fn remove_run_outputs(dir: &Path) {
    for name in [NGRAM_TRENDS, SIMILARITY, ASSOCIATIONS, SALIENCE, SALIENCE_NORMALIZED, TOPIC_USAGE, MANIFEST]
    {
        let _ = fs::remove_file(dir.join(name));
    }
    remove_matrix_files(dir);
}

/// Summary of a finished run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out: PathBuf,
    pub artifacts: Vec<String>,
    pub empty_topics: Vec<String>,
}

/// Full analysis from input files to a populated output directory.
pub fn run_analyze(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let out = config.out.clone();
    let result = with_threads(config.threads, || analyze_into(config));
    if result.is_err() {
        remove_run_outputs(&out);
    }
    result
}

fn analyze_into(config: &RunConfig) -> Result<RunSummary> {
    let start = Instant::now();
    let inputs = load_inputs(config).map_err(|e| e.in_stage("ingest"))?;
    let load_time = start.elapsed();
    let mut analysis = analyze(inputs.documents, inputs.framework, inputs.lexicon.as_ref(), config.params)?;
    analysis.timings.insert(0, ("load", load_time));

    let export_start = Instant::now();
    let artifacts = analysis.artifacts().map_err(|e| e.in_stage("export"))?;
    fs::create_dir_all(&config.out).map_err(|e| Error::io(&config.out, e).in_stage("export"))?;
    remove_matrix_files(&config.out);
    write_artifacts(&config.out, &artifacts).map_err(|e| e.in_stage("export"))?;
    analysis.timings.push(("export", export_start.elapsed()));

    let mut config_echo = analysis.params.echo();
    let obj = config_echo.as_object_mut().expect("object");
    obj.insert("corpus".into(), json!(config.corpus.display().to_string()));
    obj.insert("framework".into(), json!(config.framework.display().to_string()));
    obj.insert("lexicon".into(), json!(config.lexicon.as_ref().map(|p| p.display().to_string())));
    obj.insert("out".into(), json!(config.out.display().to_string()));

    let empty_topics: Vec<String> = analysis.empty_topics().into_iter().map(String::from).collect();
    let manifest = json!({
        "tool": {"name": TOOL, "version": VERSION},
        "config": config_echo,
        "inputs": Value::Object(inputs.hashes),
        "stats": analysis.stats(),
        "empty_topics": empty_topics,
        "artifacts": artifact_entries(&artifacts),
        "timings_ms": timings_json(&analysis.timings),
    });
    write_artifacts(&config.out, &[Artifact::new(MANIFEST, to_pretty(&manifest))])
        .map_err(|e| e.in_stage("export"))?;

    Ok(RunSummary {
        out: config.out.clone(),
        artifacts: artifacts.into_iter().map(|a| a.path).collect(),
        empty_topics,
    })
}

/// Records a stage rerun in `dir/manifest.json`: its artifacts replace any
/// earlier entries with the same path (and, when `matrices` is set, every
/// earlier matrix entry), and its timing is added under `stage`.
fn update_manifest(
    dir: &Path,
    stage: &str,
    artifacts: &[Artifact],
    elapsed: Duration,
    matrices: bool,
) -> Result<()> {
    let path = dir.join(MANIFEST);
    let mut manifest = match fs::read_to_string(&path) {
        Ok(s) => serde_json::from_str::<Value>(&s).ok().filter(Value::is_object).unwrap_or_else(|| json!({})),
        Err(_) => json!({}),
    };
    let obj = manifest.as_object_mut().expect("object");
    obj.entry("tool").or_insert_with(|| json!({"name": TOOL, "version": VERSION}));

    let fresh: Vec<&str> = artifacts.iter().map(|a| a.path.as_str()).collect();
    let matrix_prefix = format!("{MATRICES_DIR}/");
    let mut entries: Vec<Value> = obj
        .get("artifacts")
        .and_then(Value::as_array)
        .cloned()
        .unwrap_or_default()
        .into_iter()
        .filter(|e| {
            let p = e["path"].as_str().unwrap_or("");
            !fresh.contains(&p) && !(matrices && p.starts_with(&matrix_prefix))
        })
        .collect();
    entries.extend(artifact_entries(artifacts));
    entries.sort_by(|a, b| a["path"].as_str().cmp(&b["path"].as_str()));
    obj.insert("artifacts".into(), Value::Array(entries));

    let timings = obj.entry("timings_ms").or_insert_with(|| json!({}));
    if let Some(t) = timings.as_object_mut() {
        t.insert(stage.to_string(), json!(elapsed.as_secs_f64() * 1e3));
    }
    write_artifacts(dir, &[Artifact::new(MANIFEST, to_pretty(&manifest))])
}

fn finish_stage(
    dir: &Path,
    stage: &'static str,
    artifacts: Vec<Artifact>,
    start: Instant,
    matrices: bool,
) -> Result<Vec<String>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e).in_stage(stage))?;
    if matrices {
        remove_matrix_files(dir);
    }
    write_artifacts(dir, &artifacts).map_err(|e| e.in_stage(stage))?;
    update_manifest(dir, stage, &artifacts, start.elapsed(), matrices).map_err(|e| e.in_stage(stage))?;
    Ok(artifacts.into_iter().map(|a| a.path).collect())
}

fn stage_table(corpus: &Path, params: &AnalysisParams) -> Result<(NgramTable, Vec<String>)> {
    params.validate()?;
    let (docs, _) = load_corpus_file(corpus)?;
    let binning = build_binning(&docs, params.granularity)?;
    let corpus = bin_documents(docs, binning)?;
    let table = build_ngram_table(&corpus, params.table_options())?;
    Ok((table, corpus.binning().labels()))
}

/// Writes `ngram_trends.csv` from a corpus.
pub fn run_trends(corpus: &Path, out: &Path, params: &AnalysisParams) -> Result<Vec<String>> {
    let start = Instant::now();
    let (table, labels) = stage_table(corpus, params).map_err(|e| e.in_stage("trends"))?;
    let artifact = trends_artifact(&table, &labels).map_err(|e| e.in_stage("trends"))?;
    finish_stage(out, "trends", vec![artifact], start, false)
}

/// Writes `similarity.csv`. Contexts are not stored in any artifact, so the
/// corpus is read again.
pub fn run_similarity(
    corpus: &Path,
    framework: &Path,
    lexicon: Option<&Path>,
    out: &Path,
    params: &AnalysisParams,
) -> Result<Vec<String>> {
    let start = Instant::now();
    let artifact = (|| -> Result<Artifact> {
        let (table, _) = stage_table(corpus, params)?;
        let (framework, _) = load_framework_file(framework)?;
        let (lexicon, _) = load_lexicon_file(lexicon)?;
        let space = TopicSpace::build(framework, lexicon.as_ref())?;
        let similarity = similarity_table(&table, &space)?;
        similarity_artifact(&similarity, space.framework())
    })()
    .map_err(|e| e.in_stage("similarity"))?;
    finish_stage(out, "similarity", vec![artifact], start, false)
}

fn read_dir_file(dir: &Path, name: &str) -> Result<String> {
    read_text(&dir.join(name))
}

/// Writes `associations.json` from `ngram_trends.csv` and `similarity.csv`.
pub fn run_associate(dir: &Path, framework: &Path, params: &AnalysisParams) -> Result<Vec<String>> {
    let start = Instant::now();
    let artifact = (|| -> Result<Artifact> {
        params.validate()?;
        let (framework, _) = load_framework_file(framework)?;
        let trends = read_ngram_trends(read_dir_file(dir, NGRAM_TRENDS)?.as_bytes())?;
        let ids = framework.topic_ids();
        let similarity = read_similarity(read_dir_file(dir, SIMILARITY)?.as_bytes(), &ids)?;
        let variabilities = variabilities(&trends.trends)?;
        let associations =
            associate_all(&ids, &similarity, &variabilities, params.percentile, params.similarity_scope)?;
        Ok(associations_artifact(&associations))
    })()
    .map_err(|e| e.in_stage("associate"))?;
    finish_stage(dir, "associate", vec![artifact], start, false)
}

/// Writes the salience tables and matrices from `associations.json` and
/// `ngram_trends.csv`.
pub fn run_salience(dir: &Path, framework: &Path, params: &AnalysisParams) -> Result<Vec<String>> {
    let start = Instant::now();
    let artifacts = (|| -> Result<Vec<Artifact>> {
        let (framework, _) = load_framework_file(framework)?;
        let trends = read_ngram_trends(read_dir_file(dir, NGRAM_TRENDS)?.as_bytes())?;
        let associations = parse_associations(&read_dir_file(dir, ASSOCIATIONS)?)?;
        let order: Vec<&str> = associations.iter().map(|a| a.topic_id.as_str()).collect();
        if order != framework.topic_ids() {
            return Err(Error::Config(format!(
                "{ASSOCIATIONS} topics do not match framework `{}`",
                framework.name
            )));
        }
        let (usage, salience, normalized) =
            topic_trends(&associations, &trends.trends, trends.labels.len(), params.normalization)?;
        salience_artifacts(&framework, &usage, &salience, &normalized, &trends.labels)
    })()
    .map_err(|e| e.in_stage("salience"))?;
    finish_stage(dir, "salience", artifacts, start, true)
}

/// What `run_render` draws.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RenderRequest {
    /// Topics for the salience and usage line charts.
    pub topics: Vec<String>,
    /// N-grams for a usage trend chart.
    pub ngrams: Vec<String>,
    /// Also draw one heat grid per matrix file.
    pub matrices: bool,
}

fn select_trends(trends: &[crate::salience::TopicTrend], ids: &[String], file: &str) -> Result<Vec<Series>> {
    ids.iter()
        .map(|id| {
            trends
                .iter()
                .find(|t| &t.topic_id == id)
                .map(|t| Series::new(id.clone(), t.values.clone()))
                .ok_or_else(|| Error::Config(format!("topic `{id}` not found in {file}")))
        })
        .collect()
}

/// Draws SVG charts from a populated output directory into `dir/charts`.
pub fn run_render(dir: &Path, request: &RenderRequest) -> Result<Vec<String>> {
    let start = Instant::now();
    let artifacts = (|| -> Result<Vec<Artifact>> {
        let mut out = Vec::new();
        if !request.topics.is_empty() {
            for (file, chart, title, y_label) in [
                (SALIENCE, "salience.svg", "Topic salience", "salience"),
                (
                    SALIENCE_NORMALIZED,
                    "salience_normalized.svg",
                    "Normalized topic salience",
                    "normalized salience",
                ),
                (TOPIC_USAGE, "topic_usage.svg", "Topic usage", "relative usage"),
            ] {
                let (labels, trends) = read_topic_trends(read_dir_file(dir, file)?.as_bytes())?;
                let series = select_trends(&trends, &request.topics, file)?;
                let svg = render_trend_svg(title, y_label, &series, &labels)?;
                out.push(Artifact::new(format!("{CHARTS_DIR}/{chart}"), svg));
            }
        }
        if !request.ngrams.is_empty() {
            let table = read_ngram_trends(read_dir_file(dir, NGRAM_TRENDS)?.as_bytes())?;
            let series = request
                .ngrams
                .iter()
                .map(|g| {
                    let key = NgramKey::parse(g);
                    table
                        .trends
                        .get(&key)
                        .map(|t| Series::new(key.to_string(), t.values().to_vec()))
                        .ok_or_else(|| Error::Config(format!("n-gram `{g}` not found in {NGRAM_TRENDS}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let svg = render_trend_svg("N-gram usage", "relative usage", &series, &table.labels)?;
            out.push(Artifact::new(format!("{CHARTS_DIR}/ngram_usage.svg"), svg));
        }
        if request.matrices {
            let mut files: Vec<PathBuf> = fs::read_dir(dir.join(MATRICES_DIR))
                .map_err(|e| Error::io(dir.join(MATRICES_DIR), e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            for p in files {
                let m = MatrixFile::from_json(&read_text(&p)?)?;
                if m.columns == ["value"] {
                    return Err(Error::Config(format!(
                        "{}: flat framework has no grid; use the topic line charts instead",
                        p.display()
                    )));
                }
                let svg =
                    render_heatmap(&format!("Topic salience {}", m.bin), &m.rows, &m.columns, &m.values)?;
                out.push(Artifact::new(format!("{CHARTS_DIR}/matrix_{}.svg", m.bin), svg));
            }
        }
        if out.is_empty() {
            return Err(Error::Config("nothing to render; pass topics, n-grams or matrices".into()));
        }
        Ok(out)
    })()
    .map_err(|e| e.in_stage("render"))?;
    finish_stage(dir, "render", artifacts, start, false)
}
