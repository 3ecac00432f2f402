use std::collections::{BTreeSet, HashMap};
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use solsim::analysis::report::{findings_json, findings_tsv, pairs_tsv, parse_findings_tsv, to_json};
use solsim::analysis::{
    ablation_run, annotate_clone_types, detect_bugs, detect_clones, eval_metrics, sample_contracts, validate_contract,
    CloneOptions, Finding, GroundTruth, DEFAULT_EDIT_CUTOFF,
};
use solsim::artifact;
use solsim::bugdb::{exemplars, BugDb};
use solsim::corpus::{corpus_stats, ingest, load_corpus, Corpus, ParsedCorpus};
use solsim::embedding::{build_matrix, train_on_corpus, EmbeddingMatrix, EmbeddingModel};
use solsim::parser::{self, export_xml, ParseTree};
use solsim::simindex::{passes, threshold_scan};
use solsim::tokenizer::{normalize, streams_of, Level, Mode};

use crate::config::{pick, ProjectConfig};
use crate::{BugdbCommand, Cli, Command, Format, Output, SimCommand, UsageError};

struct Ctx {
    cfg: ProjectConfig,
    threshold: Option<f64>,
}

impl Ctx {
    fn threshold(&self, default: f64) -> anyhow::Result<f64> {
        match self.threshold {
            Some(t) if !(0.0..=1.0).contains(&t) => {
                Err(UsageError::Usage(format!("--threshold {t} is outside [0, 1]")).into())
            }
            Some(t) => Ok(t),
            None => Ok(default),
        }
    }

    fn corpus_path(&self, flag: Option<PathBuf>) -> anyhow::Result<PathBuf> {
        pick(flag, self.cfg.corpus_dir.clone(), "--corpus")
    }

    fn db_path(&self, flag: Option<PathBuf>) -> anyhow::Result<PathBuf> {
        pick(flag, self.cfg.bugdb_path.clone(), "--db")
    }

    fn model(&self, flag: Option<PathBuf>, level: Level) -> anyhow::Result<EmbeddingModel> {
        let path = pick(flag, self.cfg.model_for(level), &format!("--model for the {level} level"))?;
        Ok(EmbeddingModel::load(&path)?)
    }
}

/// A corpus is named by its directory or its manifest file.
fn open_corpus(path: &Path) -> anyhow::Result<Corpus> {
    let manifest = if path.is_dir() { path.join("manifest.jsonl") } else { path.to_path_buf() };
    Ok(load_corpus(&manifest)?)
}

fn read_source(path: &Path) -> anyhow::Result<(String, String)> {
    let text = artifact::read_to_string(path)?;
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "contract".into());
    Ok((id, text))
}

fn parse_file(path: &Path) -> anyhow::Result<(String, ParseTree)> {
    let (id, text) = read_source(path)?;
    let tree = parser::parse(&text).map_err(|e| solsim::Error::Parse { path: path.into(), source: e })?;
    Ok((id, tree))
}

fn mode_of(basic: bool) -> Mode {
    if basic {
        Mode::Basic
    } else {
        Mode::Structural
    }
}

/// Writes `text` to `out`, or to stdout when no path is given.
fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => artifact::write_locked(p, text.as_bytes())?,
        None => std::io::stdout().lock().write_all(text.as_bytes()).context("writing to stdout")?,
    }
    Ok(())
}

fn emit_findings(out: &Output, findings: &[Finding]) -> anyhow::Result<()> {
    let text = match out.format {
        Format::Tsv => findings_tsv(findings),
        Format::Json => findings_json(findings),
    };
    emit(out.out.as_deref(), &text)
}

fn trees_of<'a>(parsed: &'a ParsedCorpus<'_>) -> HashMap<&'a str, &'a ParseTree> {
    parsed.parsed().map(|(r, t)| (r.contract_id.as_str(), t)).collect()
}

fn parse_span(s: &str) -> anyhow::Result<(u32, u32)> {
    let bad = || UsageError::Usage(format!("--lines `{s}` is not `A-B` or a line number"));
    let (a, b) = s.split_once('-').unwrap_or((s, s));
    let a = a.trim().parse().map_err(|_| bad())?;
    let b = b.trim().parse().map_err(|_| bad())?;
    Ok((a, b))
}

/// Runs one command. Returns whether it should exit with the findings
/// status.
pub fn run(cli: Cli) -> anyhow::Result<bool> {
    let cfg = match &cli.config {
        Some(p) => ProjectConfig::load(p)?,
        None => ProjectConfig::default(),
    };
    let ctx = Ctx { cfg, threshold: cli.threshold };
    ctx.threshold(0.0)?;
    let findings = run_command(&ctx, cli.command)?;
    Ok(cli.fail_on_findings && findings > 0)
}

/// Returns the number of findings the command reported.
fn run_command(ctx: &Ctx, command: Command) -> anyhow::Result<usize> {
    let th = ctx.cfg.thresholds;
    match command {
        Command::Ingest { manifest, out } => {
            let out = pick(out, ctx.cfg.corpus_dir.clone(), "--out")?;
            let corpus = ingest(&manifest, &out)?;
            let stats = corpus_stats(&corpus.parse());
            eprintln!("ingested {} contracts into {}", corpus.len(), out.display());
            print!("{}", to_json(&stats));
        }
        Command::Parse { file, xml } => {
            let (id, tree) = parse_file(&file)?;
            let contracts: Vec<_> =
                parser::contracts_of(&tree).iter().map(|c| c.identifier().unwrap_or("?").to_string()).collect();
            println!(
                "{id}: {} contracts ({}), {} functions, {} statements",
                contracts.len(),
                contracts.join(", "),
                parser::functions_of(&tree).len(),
                parser::statements_of(&tree).len()
            );
            if let Some(out) = xml {
                artifact::write_locked(&out, export_xml(&tree).as_bytes())?;
            }
        }
        Command::Tokenize { file, level, basic, raw } => {
            let (id, tree) = parse_file(&file)?;
            let mut text = String::new();
            for s in streams_of(&tree, &id, level, mode_of(basic)) {
                let s = if raw { s } else { normalize(&s) };
                text.push_str(&s.listing_line());
                text.push('\n');
            }
            emit(None, &text)?;
        }
        Command::Train { corpus, level, seed, epochs, dim, basic, out } => {
            let out = pick(out, ctx.cfg.model_for(level), "--out")?;
            let mut config = ctx.cfg.train.clone();
            config.seed = seed.unwrap_or(config.seed);
            config.epochs = epochs.unwrap_or(config.epochs);
            config.dim = dim.unwrap_or(config.dim);
            let corpus = open_corpus(&ctx.corpus_path(corpus)?)?;
            let model = train_on_corpus(&corpus.parse(), level, mode_of(basic), &config)?;
            model.save(&out)?;
            eprintln!("model {} ({} tokens) written to {}", model.version(), model.vocab_size(), out.display());
        }
        Command::Embed { model, corpus, level, basic, out } => {
            let mode = mode_of(basic);
            let out = pick(out, ctx.cfg.matrix_for(level, mode), "--out")?;
            let model = ctx.model(model, level)?;
            let corpus = open_corpus(&ctx.corpus_path(corpus)?)?;
            let m = build_matrix(&model, &corpus.parse(), level, mode);
            m.save(&out)?;
            eprintln!("{} {level} rows written to {}", m.len(), out.display());
        }
        Command::Sim { command: SimCommand::Pair { queries, targets, out } } => {
            let delta = ctx.threshold(th.clone)?;
            let q = EmbeddingMatrix::load(&queries)?;
            let t = EmbeddingMatrix::load(&targets)?;
            if q.dim != t.dim {
                return Err(solsim::Error::Config(format!("matrices have dimensions {} and {}", q.dim, t.dim)).into());
            }
            if q.model_version != t.model_version {
                return Err(solsim::Error::Version(format!(
                    "matrices come from models {} and {}",
                    q.model_version, t.model_version
                ))
                .into());
            }
            let pairs = threshold_scan(&q, &t, delta, |_, _| false)?;
            emit(out.as_deref(), &pairs_tsv(&pairs))?;
            return Ok(pairs.len());
        }
        Command::Bugdb { db, command } => {
            let db_path = ctx.db_path(db)?;
            let mut db = BugDb::load_or_default(&db_path)?;
            match command {
                BugdbCommand::Add { contract, lines, category, split } => {
                    let (start, end) = parse_span(&lines)?;
                    let source = artifact::read_to_string(&contract)?;
                    let rec = db.add_bug(&source, start, end, category, split)?;
                    db.save(&db_path)?;
                    println!("{}", rec.bug_id);
                }
                BugdbCommand::Seed => {
                    for rec in exemplars::seed(&mut db)? {
                        println!("{}", rec.bug_id);
                    }
                    db.save(&db_path)?;
                }
                BugdbCommand::List => {
                    let mut text = String::from("bug_id\tcategory\tsplit\tstatement\n");
                    for r in &db.records {
                        let stmt = r.statement_source.replace(['\t', '\n'], " ");
                        text.push_str(&format!("{}\t{}\t{}\t{stmt}\n", r.bug_id, r.category, r.split));
                    }
                    emit(None, &text)?;
                }
                BugdbCommand::Build { model, split, basic, out } => {
                    let out = pick(out, None, "--out")?;
                    let model = ctx.model(model, Level::Statement)?;
                    let m = db.build_matrix(&model, split, mode_of(basic))?;
                    m.save(&out)?;
                    db.save(&db_path)?;
                    eprintln!("{} bug rows written to {}", m.len(), out.display());
                }
            }
        }
        Command::Clones { matrix, corpus, level, sample, seed, exclude_same_creator, out, stats } => {
            let delta = ctx.threshold(th.clone)?;
            let matrix = EmbeddingMatrix::load(&pick(matrix, ctx.cfg.matrix_for(level, Mode::Structural), "--matrix")?)?;
            let mut corpus = open_corpus(&ctx.corpus_path(corpus)?)?;
            let matrix = match sample {
                Some(n) => {
                    corpus = sample_contracts(&corpus, n, seed.unwrap_or(ctx.cfg.sample_seed));
                    let keep: BTreeSet<&str> = corpus.records.iter().map(|r| r.contract_id.as_str()).collect();
                    matrix.filter(|e| keep.contains(e.contract_id.as_str()))
                }
                None => matrix,
            };
            let parsed = corpus.parse();
            let (mut findings, clone_stats) =
                detect_clones(&matrix, &parsed, delta, CloneOptions { exclude_same_creator })?;
            annotate_clone_types(&mut findings, &trees_of(&parsed), None, matrix.level, DEFAULT_EDIT_CUTOFF)?;
            emit_findings(&out, &findings)?;
            match stats {
                Some(p) => artifact::write_locked(&p, to_json(&clone_stats).as_bytes())?,
                None => eprintln!(
                    "{} pairs, {} of {} lines cloned ({:.1}%)",
                    clone_stats.pairs,
                    clone_stats.cloned_lines,
                    clone_stats.total_lines,
                    clone_stats.clone_ratio * 100.0
                ),
            }
            return Ok(findings.len());
        }
        Command::Bugs { statements, bugs, corpus, db, out } => {
            let delta = ctx.threshold(th.bug)?;
            let bugs = EmbeddingMatrix::load(&bugs)?;
            let statements = pick(statements, ctx.cfg.matrix_for(Level::Statement, bugs.mode), "--statements")?;
            let statements = EmbeddingMatrix::load(&statements)?;
            let mut findings = detect_bugs(&statements, &bugs, delta)?;
            let corpus = corpus.or(ctx.cfg.corpus_dir.clone());
            let db = db.or(ctx.cfg.bugdb_path.clone());
            if let (Some(corpus), Some(db)) = (corpus, db) {
                let corpus = open_corpus(&corpus)?;
                let db = BugDb::load(&db)?;
                let parsed = corpus.parse();
                annotate_clone_types(&mut findings, &trees_of(&parsed), Some(&db), Level::Statement, DEFAULT_EDIT_CUTOFF)?;
            }
            emit_findings(&out, &findings)?;
            return Ok(findings.len());
        }
        Command::Validate { file, model, bugs, db, out } => {
            let delta = ctx.threshold(th.validate)?;
            let model = ctx.model(model, Level::Statement)?;
            let bugs = EmbeddingMatrix::load(&bugs)?;
            let (id, source) = read_source(&file)?;
            let mut v = validate_contract(&source, &id, &model, &bugs, delta)?;
            if let Some(db) = db.or(ctx.cfg.bugdb_path.clone()) {
                let db = BugDb::load(&db)?;
                let tree = parser::parse(&source).map_err(|e| solsim::Error::Parse { path: file.clone(), source: e })?;
                let trees = HashMap::from([(id.as_str(), &tree)]);
                annotate_clone_types(&mut v.findings, &trees, Some(&db), Level::Statement, DEFAULT_EDIT_CUTOFF)?;
            }
            eprintln!("{}: {} statements checked, {} flagged", id, v.statements.len(), v.findings.len());
            emit_findings(&out, &v.findings)?;
            return Ok(v.findings.len());
        }
        Command::Ablation { model, corpus, db, split, findings_dir, out } => {
            let delta = ctx.threshold(th.bug)?;
            let model = ctx.model(model, Level::Statement)?;
            let corpus = open_corpus(&ctx.corpus_path(corpus)?)?;
            let mut db = BugDb::load(&ctx.db_path(db)?)?;
            let parsed = corpus.parse();
            let mut matrices = |mode| -> anyhow::Result<_> {
                Ok((build_matrix(&model, &parsed, Level::Statement, mode), db.build_matrix(&model, split, mode)?))
            };
            let (ss, sb) = matrices(Mode::Structural)?;
            let (bs, bb) = matrices(Mode::Basic)?;
            let ab = ablation_run(&ss, &sb, &bs, &bb, delta)?;
            if let Some(dir) = findings_dir {
                artifact::write_locked(&dir.join("structural.tsv"), findings_tsv(&ab.structural).as_bytes())?;
                artifact::write_locked(&dir.join("basic.tsv"), findings_tsv(&ab.basic).as_bytes())?;
            }
            emit(out.as_deref(), &to_json(&ab.counts()))?;
            return Ok(ab.structural.len() + ab.basic.len());
        }
        Command::Metrics { findings, truth, out } => {
            let text = artifact::read_to_string(&findings)?;
            let mut list = parse_findings_tsv(&text).map_err(|m| solsim::Error::format(&findings, m))?;
            if ctx.threshold.is_some() {
                let delta = ctx.threshold(0.0)?;
                list.retain(|f| passes(f.score, delta));
            }
            let truth = GroundTruth::load(&truth)?;
            let report = eval_metrics(&list, &truth)?;
            emit(out.as_deref(), &to_json(&report))?;
        }
        Command::Report { findings, out } => {
            let text = artifact::read_to_string(&findings)?;
            let mut list = parse_findings_tsv(&text).map_err(|m| solsim::Error::format(&findings, m))?;
            if ctx.threshold.is_some() {
                let delta = ctx.threshold(0.0)?;
                list.retain(|f| passes(f.score, delta));
            }
            emit_findings(&out, &list)?;
            return Ok(list.len());
        }
    }
    Ok(0)
}
