//! Command-line interface: `answer`, `train`, `select-templates`,
//! `evaluate`, and `load-check`, all driven by one TOML config.
//!
//! Precedence is conventional: command-line flags override config values.
//! Network access never happens unless `--live` is passed; without it every
//! snippet comes from the fixture corpus, keeping runs reproducible. Exit
//! codes: 0 success, 1 data error (unreadable or inconsistent inputs), 2
//! usage error (bad arguments, unknown subject or relation).

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::eval::{run_benchmark, sweep_templates, SnippetK};
use crate::kb::{EntityId, KnowledgeBase};
use crate::live::HttpSearchClient;
use crate::model::LogisticModel;
use crate::pipeline::{answer_query, train_models, ClassBalance, PipelineModels, PipelineOptions};
use crate::question::{KbcQuery, QuestionTemplate, TemplateSetFile};
use crate::rank::RankedAnswer;
use crate::snippet::{FixtureCorpus, SnippetSource};

/// Complete a knowledge base from web-style text snippets: ask keyword
/// questions about a subject, link the answers back to known entities, and
/// rank them with trained models.
#[derive(Debug, Parser)]
#[command(name = "kbqa", version, max_term_width = 100)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Pipeline TOML config; relative paths inside it resolve against its
    /// own directory
    #[arg(
        long,
        global = true,
        default_value = "config.toml",
        value_name = "FILE"
    )]
    pub config: PathBuf,
    /// Write models/, templates/, and reports/ under this directory instead
    /// of the configured output paths
    #[arg(long, global = true, value_name = "DIR")]
    pub out_root: Option<PathBuf>,
    /// Override the configured worker-thread count (outputs are identical
    /// for any count >= 1)
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    /// Fetch snippets from the configured live search endpoint instead of
    /// the fixture corpus
    #[arg(long, global = true)]
    pub live: bool,
    /// Print per-stage timings to stderr (informational only)
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank candidate answers for one ⟨subject, relation⟩ query
    Answer {
        /// Subject entity id, e.g. Marvin_Minsky
        subject: String,
        /// Relation name, e.g. wasBornIn
        relation: String,
        /// Emit the ranking as JSON instead of a table
        #[arg(long)]
        json: bool,
        /// Keep only the best N snippets per query ("all" disables
        /// filtering); overrides the config's filter_k
        #[arg(long, value_name = "N|all")]
        snippets: Option<SnippetK>,
    },
    /// Train the snippet filter and answer ranker for a relation and write
    /// both model files
    Train {
        /// Relation name, e.g. wasBornIn
        relation: String,
    },
    /// Search the relation's candidate question templates for the
    /// best-performing subset and write it alongside a comparison curve
    SelectTemplates {
        /// Relation name, e.g. wasBornIn
        relation: String,
    },
    /// Score the relation's held-out test queries and write benchmark
    /// reports
    Evaluate {
        /// Relation name, e.g. wasBornIn
        relation: String,
        /// Comma-separated snippet budgets, e.g. "10,20,30,all"; one report
        /// per value; overrides the config's filter_k
        #[arg(long, value_name = "K,...", value_delimiter = ',')]
        snippets: Vec<SnippetK>,
    },
    /// Parse the knowledge base, corpus, and config, then print summary
    /// statistics
    LoadCheck,
}

/// Machine-readable `answer --json` payload.
#[derive(Debug, Serialize, Deserialize)]
pub struct AnswerOutput {
    pub subject: String,
    pub relation: String,
    pub templates: Vec<String>,
    pub snippets_fetched: usize,
    pub snippets_used: usize,
    pub answers: Vec<RankedAnswer>,
}

/// Write one line, treating a closed pipe the way the default SIGPIPE
/// disposition would: die quietly with the conventional 128+13 status
/// rather than panicking mid-pipeline (`kbqa train … | head -1`).
fn write_line(dst: &mut dyn Write, args: std::fmt::Arguments<'_>) {
    let result = dst.write_fmt(args).and_then(|_| dst.write_all(b"\n"));
    if let Err(e) = result {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(141);
        }
        panic!("write output: {e}");
    }
}

macro_rules! outln {
    ($dst:expr) => { write_line($dst, format_args!("")) };
    ($dst:expr, $($arg:tt)*) => { write_line($dst, format_args!($($arg)*)) };
}

/// Parse argv, run, and translate the outcome into a process exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut stdout = std::io::stdout();
    let mut stderr = std::io::stderr();
    match execute(&cli, &mut stdout, &mut stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Run one parsed invocation, writing human output to `out` and diagnostics
/// to `eout`.
pub fn execute(
    cli: &Cli,
    out: &mut (dyn Write + Send),
    eout: &mut (dyn Write + Send),
) -> Result<()> {
    let mut config = PipelineConfig::load(&cli.global.config)?;
    if let Some(root) = &cli.global.out_root {
        config.reroot_outputs(root);
    }
    if let Some(workers) = cli.global.workers {
        if workers == 0 {
            return Err(Error::InvalidArgument(
                "--workers must be at least 1".into(),
            ));
        }
        config.workers = workers;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| {
            Error::Config(format!(
                "cannot build a {}-worker pool: {e}",
                config.workers
            ))
        })?;
    pool.install(|| dispatch(cli, &config, out, eout))
}

fn dispatch(
    cli: &Cli,
    config: &PipelineConfig,
    out: &mut (dyn Write + Send),
    eout: &mut (dyn Write + Send),
) -> Result<()> {
    match &cli.command {
        Command::Answer {
            subject,
            relation,
            json,
            snippets,
        } => cmd_answer(config, cli, subject, relation, *json, *snippets, out, eout),
        Command::Train { relation } => cmd_train(config, cli, relation, out, eout),
        Command::SelectTemplates { relation } => {
            cmd_select_templates(config, cli, relation, out, eout)
        }
        Command::Evaluate { relation, snippets } => {
            cmd_evaluate(config, cli, relation, snippets, out, eout)
        }
        Command::LoadCheck => cmd_load_check(config, out),
    }
}

fn load_kb(config: &PipelineConfig) -> Result<KnowledgeBase> {
    KnowledgeBase::load(
        &config.kb.facts,
        &config.kb.types,
        &config.kb.labels,
        &config.kb.schemas,
    )
}

fn snippet_source(config: &PipelineConfig, live: bool) -> Result<Box<dyn SnippetSource>> {
    if live {
        let settings = config.corpus.live.clone().ok_or_else(|| {
            Error::Config("--live given but the config has no [corpus.live] section".into())
        })?;
        Ok(Box::new(HttpSearchClient::new(settings)?))
    } else {
        Ok(Box::new(FixtureCorpus::load(&config.corpus.fixture)?))
    }
}

fn pipeline_options(config: &PipelineConfig) -> PipelineOptions {
    PipelineOptions {
        max_per_question: config.pipeline.max_per_question,
        distance_cap: config.pipeline.distance_cap,
        ap_mode: config.ap_mode,
    }
}

fn schema_templates(kb: &KnowledgeBase, relation: &str) -> Result<Vec<QuestionTemplate>> {
    let schema = kb
        .schema(relation)
        .ok_or_else(|| Error::UnknownRelation(relation.to_owned()))?;
    schema
        .templates
        .iter()
        .map(|k| QuestionTemplate::new(k))
        .collect()
}

fn load_ranker(config: &PipelineConfig, relation: &str) -> Result<LogisticModel> {
    LogisticModel::load(config.ranker_model_path(relation))
}

fn load_filter(config: &PipelineConfig, relation: &str) -> Result<LogisticModel> {
    LogisticModel::load(config.filter_model_path(relation))
}

/// Templates to answer/evaluate with: the selected set if one was written,
/// otherwise every candidate from the relation schema.
fn answer_templates(
    config: &PipelineConfig,
    kb: &KnowledgeBase,
    relation: &str,
) -> Result<Vec<QuestionTemplate>> {
    let selected = config.template_set_path(relation);
    if selected.is_file() {
        Ok(TemplateSetFile::load(selected)?
            .to_template_set()?
            .templates)
    } else {
        schema_templates(kb, relation)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_answer(
    config: &PipelineConfig,
    cli: &Cli,
    subject: &str,
    relation: &str,
    json: bool,
    snippets: Option<SnippetK>,
    out: &mut (dyn Write + Send),
    eout: &mut (dyn Write + Send),
) -> Result<()> {
    let kb = load_kb(config)?;
    let source = snippet_source(config, cli.global.live)?;
    let templates = answer_templates(config, &kb, relation)?;
    let k = snippets
        .or(config.pipeline.filter_k)
        .unwrap_or(SnippetK::All);
    let models = PipelineModels {
        filter: match k {
            SnippetK::All => None,
            SnippetK::Top(_) => Some(load_filter(config, relation)?),
        },
        ranker: load_ranker(config, relation)?,
    };
    let query = KbcQuery {
        subject: EntityId::new(subject),
        relation: relation.to_owned(),
    };
    let run = answer_query(
        &kb,
        source.as_ref(),
        &query,
        &templates,
        k.keep(),
        &models,
        &pipeline_options(config),
    )?;

    if cli.global.timings {
        let t = &run.timings;
        outln!(
            eout,
            "timings: fetch {:.1} ms, filter {:.1} ms, link {:.1} ms, rank {:.1} ms",
            t.fetch_ms,
            t.filter_ms,
            t.link_ms,
            t.rank_ms
        );
    }

    if json {
        let payload = AnswerOutput {
            subject: subject.to_owned(),
            relation: relation.to_owned(),
            templates: templates.iter().map(|t| t.keyword().to_owned()).collect(),
            snippets_fetched: run.snippets_fetched,
            snippets_used: run.snippets_used,
            answers: run.ranked,
        };
        let body =
            serde_json::to_string_pretty(&payload).expect("answer serialization cannot fail");
        outln!(out, "{body}");
    } else {
        outln!(out, "rank  probability  entity");
        for (index, answer) in run.ranked.iter().enumerate() {
            outln!(
                out,
                "{:<4}  {:<11.6}  {}",
                index + 1,
                answer.probability,
                answer.entity
            );
        }
        if run.ranked.is_empty() {
            outln!(eout, "no candidate answers were found");
        }
    }
    Ok(())
}

fn describe_balance(label: &str, balance: &ClassBalance, out: &mut (dyn Write + Send)) {
    outln!(
        out,
        "{label}: {} positive / {} negative -> {} / {} after resampling; final loss {:.6}",
        balance.positives_before,
        balance.negatives_before,
        balance.positives_after,
        balance.negatives_after,
        balance.final_loss
    );
}

fn cmd_train(
    config: &PipelineConfig,
    cli: &Cli,
    relation: &str,
    out: &mut (dyn Write + Send),
    eout: &mut (dyn Write + Send),
) -> Result<()> {
    let started = Instant::now();
    let kb = load_kb(config)?;
    let source = snippet_source(config, cli.global.live)?;
    let (train_queries, _) = kb.sample_queries(
        relation,
        config.sampling.train,
        config.sampling.test,
        config.sampling.seed,
    )?;
    let outcome = train_models(
        &kb,
        source.as_ref(),
        relation,
        &train_queries,
        &config.training.hyperparams(),
        config.training.filter_seed,
        config.training.ranker_seed,
        &pipeline_options(config),
    )?;

    std::fs::create_dir_all(&config.paths.models_dir)
        .map_err(|e| Error::io(&config.paths.models_dir, e))?;
    let filter_path = config.filter_model_path(relation);
    let ranker_path = config.ranker_model_path(relation);
    let filter = outcome
        .models
        .filter
        .as_ref()
        .expect("training always produces a filter model");
    filter.save(&filter_path)?;
    outcome.models.ranker.save(&ranker_path)?;

    let summary = &outcome.summary;
    outln!(
        out,
        "trained {} on {} queries ({} snippets, {} fetch failures)",
        summary.relation,
        summary.train_queries,
        summary.snippets_fetched,
        summary.fetch_failures
    );
    describe_balance("snippet filter", &summary.filter, out);
    describe_balance("answer ranker", &summary.ranker, out);
    outln!(out, "wrote {}", filter_path.display());
    outln!(out, "wrote {}", ranker_path.display());
    if cli.global.timings {
        outln!(
            eout,
            "timings: train {:.1} ms",
            started.elapsed().as_secs_f64() * 1e3
        );
    }
    Ok(())
}

fn cmd_select_templates(
    config: &PipelineConfig,
    cli: &Cli,
    relation: &str,
    out: &mut (dyn Write + Send),
    eout: &mut (dyn Write + Send),
) -> Result<()> {
    let started = Instant::now();
    let kb = load_kb(config)?;
    let source = snippet_source(config, cli.global.live)?;
    let candidates = schema_templates(&kb, relation)?;
    let k = config.pipeline.filter_k.unwrap_or(SnippetK::All);
    let models = PipelineModels {
        filter: match k {
            SnippetK::All => None,
            SnippetK::Top(_) => Some(load_filter(config, relation)?),
        },
        ranker: load_ranker(config, relation)?,
    };
    // Selection tunes on the training split; the test split stays unseen
    // until `evaluate`.
    let (train_queries, _) = kb.sample_queries(
        relation,
        config.sampling.train,
        config.sampling.test,
        config.sampling.seed,
    )?;
    let sweep = sweep_templates(
        &kb,
        source.as_ref(),
        relation,
        &candidates,
        k,
        &models,
        &train_queries,
        &pipeline_options(config),
    )?;

    std::fs::create_dir_all(&config.paths.templates_dir)
        .map_err(|e| Error::io(&config.paths.templates_dir, e))?;
    let set_path = config.template_set_path(relation);
    let csv_path = config.sweep_csv_path(relation);
    TemplateSetFile::new(relation, &sweep.selected).save(&set_path)?;
    std::fs::write(&csv_path, sweep.to_csv()).map_err(|e| Error::io(&csv_path, e))?;

    outln!(out, "size  algorithm  map       templates");
    for (points, algorithm) in [(&sweep.greedy, "greedy"), (&sweep.baseline, "topk")] {
        for point in points.iter() {
            outln!(
                out,
                "{:<4}  {:<9}  {:<8.4}  {}",
                point.set_size,
                algorithm,
                point.map,
                point.templates.join(";")
            );
        }
    }
    outln!(
        out,
        "selected: {} (map {:.4}, size {})",
        sweep.selected.keywords().join(";"),
        sweep.selected.performance,
        sweep.selected.templates.len()
    );
    outln!(out, "wrote {}", set_path.display());
    outln!(out, "wrote {}", csv_path.display());
    if cli.global.timings {
        outln!(
            eout,
            "timings: sweep {:.1} ms",
            started.elapsed().as_secs_f64() * 1e3
        );
    }
    Ok(())
}

fn cmd_evaluate(
    config: &PipelineConfig,
    cli: &Cli,
    relation: &str,
    snippets: &[SnippetK],
    out: &mut (dyn Write + Send),
    eout: &mut (dyn Write + Send),
) -> Result<()> {
    let started = Instant::now();
    let kb = load_kb(config)?;
    let source = snippet_source(config, cli.global.live)?;
    // Evaluation requires a selected template set: run `select-templates`
    // first. This keeps reported numbers tied to a recorded choice.
    let set_path = config.template_set_path(relation);
    if !set_path.is_file() {
        return Err(Error::Config(format!(
            "no template set at {}; run `select-templates {relation}` first",
            set_path.display()
        )));
    }
    let templates = TemplateSetFile::load(&set_path)?
        .to_template_set()?
        .templates;

    let ks: Vec<SnippetK> = if snippets.is_empty() {
        vec![config.pipeline.filter_k.unwrap_or(SnippetK::All)]
    } else {
        snippets.to_vec()
    };
    let needs_filter = ks.iter().any(|k| matches!(k, SnippetK::Top(_)));
    let models = PipelineModels {
        filter: if needs_filter {
            Some(load_filter(config, relation)?)
        } else {
            None
        },
        ranker: load_ranker(config, relation)?,
    };
    let (_, test_queries) = kb.sample_queries(
        relation,
        config.sampling.train,
        config.sampling.test,
        config.sampling.seed,
    )?;

    std::fs::create_dir_all(&config.paths.reports_dir)
        .map_err(|e| Error::io(&config.paths.reports_dir, e))?;
    for k in ks {
        let report = run_benchmark(
            &kb,
            source.as_ref(),
            relation,
            &templates,
            k,
            &models,
            &test_queries,
            &pipeline_options(config),
        )?;
        let json_path = config.report_path(relation, k, "json");
        let csv_path = config.report_path(relation, k, "csv");
        std::fs::write(&json_path, report.to_json()).map_err(|e| Error::io(&json_path, e))?;
        std::fs::write(&csv_path, report.to_csv()).map_err(|e| Error::io(&csv_path, e))?;
        let flagged = report.per_query.iter().filter(|q| q.flagged).count();
        outln!(
            out,
            "k={k}: map {:.4} over {} queries ({} flagged); wrote {} and {}",
            report.map,
            report.per_query.len(),
            flagged,
            json_path.display(),
            csv_path.display()
        );
    }
    if cli.global.timings {
        outln!(
            eout,
            "timings: evaluate {:.1} ms",
            started.elapsed().as_secs_f64() * 1e3
        );
    }
    Ok(())
}

fn cmd_load_check(config: &PipelineConfig, out: &mut (dyn Write + Send)) -> Result<()> {
    let kb = load_kb(config)?;
    let corpus = FixtureCorpus::load(&config.corpus.fixture)?;
    outln!(
        out,
        "kb: {} facts, {} typed entities, {} label keys, {} relations",
        kb.num_facts(),
        kb.num_entities(),
        kb.num_label_keys(),
        kb.num_schemas()
    );
    for schema in kb.schemas() {
        outln!(
            out,
            "  {}: {} -> {} ({} subjects, templates: {})",
            schema.relation,
            schema.subject_type,
            schema.object_type,
            kb.subjects_with_objects(&schema.relation).len(),
            schema.templates.join(", ")
        );
    }
    outln!(out, "corpus: {} questions", corpus.len());
    outln!(
        out,
        "config: workers {}, ap mode {}, max {} snippets per question",
        config.workers,
        config.ap_mode,
        config.pipeline.max_per_question
    );
    outln!(out, "ok");
    Ok(())
}
