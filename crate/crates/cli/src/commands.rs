//! Subcommand implementations. Each writes its human-facing output to `out`
//! and returns a [`CliError`] carrying the exit code on failure.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use attrib_core::attribute::retrieval_attribute;
use attrib_core::datasets::{
    append_drop_log, compute_stats, read_canonical, reformat_hagrid, reformat_verifiability, write_canonical,
    CanonicalRecord, ReformatOutput,
};
use attrib_core::decompose::TEMPLATE_VERSION;
use attrib_core::eval::{
    emit_report, evaluate, join_predictions, read_predictions, write_predictions, Averaging, MetricsReport,
    PredictionRecord, ReportFormat,
};
use attrib_core::{par, AttributionList};
use chrono::Utc;
use serde::{Deserialize, Serialize};

use crate::components::Components;
use crate::config::{PipelineConfig, SystemKind};
use crate::error::{exit_code_for, CliError, EXIT_DATA, EXIT_REMOTE};
use crate::manifest::{sha256_file, sidecar, RecordFailure, RunManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Verifiability,
    Hagrid,
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::data(format!("cannot write output: {e}")))
}

/// Reads a canonical dataset, keeping only the first `limit` records.
pub fn load_dataset(path: &Path, limit: Option<usize>) -> Result<Vec<CanonicalRecord>, CliError> {
    let mut records = read_canonical(path)?;
    if let Some(n) = limit {
        records.truncate(n);
    }
    Ok(records)
}

/// Converts a raw corpus directory to canonical JSONL at `out_path`.
/// Rejected records are appended to `<out_path>.drops.jsonl`.
pub fn cmd_reformat(source: Source, raw_dir: &Path, out_path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let ReformatOutput { records, dropped, seen } = match source {
        Source::Verifiability => reformat_verifiability(raw_dir)?,
        Source::Hagrid => reformat_hagrid(raw_dir)?,
    };
    write_canonical(&records, out_path)?;
    let drop_log = sidecar(out_path, ".drops.jsonl");
    if !dropped.is_empty() {
        append_drop_log(&dropped, &drop_log)?;
    }
    if records.is_empty() {
        log::warn!("no records survived reformatting of {}", raw_dir.display());
    }
    emit(
        out,
        &format!(
            "{} raw answers: {} kept -> {}, {} dropped -> {}\n",
            seen,
            records.len(),
            out_path.display(),
            dropped.len(),
            drop_log.display()
        ),
    )
}

pub fn cmd_stats(dataset: &Path, format: ReportFormat, limit: Option<usize>, out: &mut dyn Write) -> Result<(), CliError> {
    let records = load_dataset(dataset, limit)?;
    let stats = compute_stats(&records);
    let text = match format {
        ReportFormat::Json => serde_json::to_string_pretty(&stats).expect("stats serialize") + "\n",
        ReportFormat::Table => format!(
            "size                          {}\n\
             avg source sentences          {:.2}\n\
             avg attributions / sentence   {:.2} (attributed), {:.2} (all)\n\
             avg sentences / answer        {:.2}\n\
             avg answers / question        {:.2}\n",
            stats.size,
            stats.avg_source_sentences,
            stats.avg_attributions_per_sentence,
            stats.avg_attributions_per_any_sentence,
            stats.avg_sentences_per_answer,
            stats.avg_answers_per_question
        ),
    };
    emit(out, &text)
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub config_path: PathBuf,
    pub dataset: PathBuf,
    pub out_path: PathBuf,
    /// Overrides the config's worker count.
    pub workers: Option<usize>,
    pub limit: Option<usize>,
}

fn attribute_record(components: &Components, record: &CanonicalRecord) -> attrib_core::Result<(Vec<AttributionList>, u64)> {
    let cfg = components.config();
    match cfg.system {
        SystemKind::Attribution => components
            .pipeline()
            .attribute(record.answer(), record.document())
            .map(|r| (r.sentences, r.scorer_calls)),
        SystemKind::Retrieval => {
            let ranker = components.ranker(cfg.retrieval.ranker);
            retrieval_attribute(record.answer(), record.document(), &ranker, cfg.retrieval.keep).map(|s| (s, 0))
        }
    }
}

/// Attributes every record and writes predictions plus a manifest. Records
/// that fail are logged and left out; the predictions for the rest are still
/// written, and the returned error reports how many failed.
pub fn cmd_run(opts: &RunOptions, out: &mut dyn Write) -> Result<RunManifest, CliError> {
    let config = PipelineConfig::load(&opts.config_path)?;
    let workers = opts.workers.unwrap_or(config.workers);
    if workers == 0 {
        return Err(CliError::usage("--workers must be at least 1"));
    }
    if same_file(&opts.dataset, &opts.out_path) {
        return Err(CliError::usage(format!(
            "--out {} would overwrite the input dataset",
            opts.out_path.display()
        )));
    }
    let records = load_dataset(&opts.dataset, opts.limit)?;
    let dataset_sha256 = sha256_file(&opts.dataset)?;
    let components = Components::build(&config)?;

    let started_at = Utc::now();
    let results = par::with_workers(workers, || par::map(&records, |r| attribute_record(&components, r)));

    let mut predictions = Vec::with_capacity(records.len());
    let mut failures = Vec::new();
    let mut worst = EXIT_DATA;
    let (mut scorer_calls, mut max_calls) = (0u64, 0u64);
    for (record, result) in records.iter().zip(results) {
        match result {
            Ok((lists, calls)) => {
                scorer_calls += calls;
                max_calls = max_calls.max(calls);
                predictions.push(PredictionRecord::new(record.question_id(), record.answer_id(), &lists));
            }
            Err(e) => {
                log::error!("{e}");
                if exit_code_for(&e) == EXIT_REMOTE {
                    worst = EXIT_REMOTE;
                }
                failures.push(RecordFailure {
                    question_id: record.question_id().to_string(),
                    answer_id: record.answer_id().to_string(),
                    message: e.to_string(),
                });
            }
        }
    }
    write_predictions(&predictions, &opts.out_path)?;
    let llm = components.llm_stats();

    let mut versions = BTreeMap::new();
    versions.insert("attrib-core".to_string(), attrib_core::VERSION.to_string());
    versions.insert("attrib-cli".to_string(), env!("CARGO_PKG_VERSION").to_string());
    versions.insert("decomposition-template".to_string(), TEMPLATE_VERSION.to_string());
    if let Some(model) = &config.decomposer.model {
        versions.insert("llm-model".to_string(), model.clone());
    }

    let manifest = RunManifest {
        system: config.describe(),
        config_path: opts.config_path.clone(),
        config_sha256: config.hash(),
        dataset_path: opts.dataset.clone(),
        dataset_sha256,
        predictions_path: opts.out_path.clone(),
        versions,
        started_at,
        finished_at: Utc::now(),
        workers,
        limit: opts.limit,
        records_total: records.len(),
        records_succeeded: predictions.len(),
        records_failed: failures.len(),
        failures,
        scorer_calls,
        max_scorer_calls_per_record: max_calls,
        llm_calls: llm.llm_calls,
        cache_hits: llm.cache_hits,
    };
    let manifest_path = manifest.write()?;
    emit(
        out,
        &format!(
            "{} of {} records attributed -> {} (manifest {})\n",
            manifest.records_succeeded,
            manifest.records_total,
            opts.out_path.display(),
            manifest_path.display()
        ),
    )?;
    if let Some(first) = manifest.failures.first() {
        return Err(CliError::new(
            worst,
            format!(
                "{} of {} records failed; first: {}",
                manifest.records_failed, manifest.records_total, first.message
            ),
        ));
    }
    Ok(manifest)
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub dataset: PathBuf,
    pub predictions: PathBuf,
    pub format: ReportFormat,
    pub averaging: Averaging,
    pub ks: Vec<usize>,
    pub limit: Option<usize>,
    /// Also write the JSON report here.
    pub report_path: Option<PathBuf>,
}

/// Scores a predictions file against gold. With a limit, predictions for
/// records beyond it are ignored.
pub fn cmd_eval(opts: &EvalOptions, out: &mut dyn Write) -> Result<MetricsReport, CliError> {
    let gold = load_dataset(&opts.dataset, opts.limit)?;
    let mut predictions = read_predictions(&opts.predictions)?;
    if predictions.is_empty() && !gold.is_empty() {
        return Err(CliError::data(format!(
            "{}: no predictions for a dataset of {} records",
            opts.predictions.display(),
            gold.len()
        )));
    }
    if opts.limit.is_some() {
        let keep: HashSet<(&str, &str)> = gold.iter().map(|r| (r.question_id(), r.answer_id())).collect();
        predictions.retain(|p| keep.contains(&p.key()));
    }
    let joined = join_predictions(&gold, &predictions)?;
    let items: Vec<(&CanonicalRecord, &[AttributionList])> = joined.iter().map(|(r, l)| (*r, l.as_slice())).collect();
    let report = evaluate(&items, &opts.ks, opts.averaging)?;
    if let Some(path) = &opts.report_path {
        std::fs::write(path, emit_report(&report, ReportFormat::Json))
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
    }
    emit(out, &emit_report(&report, opts.format))?;
    Ok(report)
}

pub fn cmd_run_eval(run: &RunOptions, eval: &EvalOptions, out: &mut dyn Write) -> Result<MetricsReport, CliError> {
    cmd_run(run, out)?;
    cmd_eval(eval, out)
}
