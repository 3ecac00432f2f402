mod common;

use std::collections::{BTreeMap, HashMap};

use solsim::analysis::*;
use solsim::bugdb::{exemplars, BugDb, Category, Split};
use solsim::corpus::{ContractRecord, Corpus};
use solsim::embedding::*;
use solsim::parser::ParseTree;
use solsim::tokenizer::{Level, Mode};

const CREATOR_A: &str = "0x00000000000000000000000000000000000000aa";
const CREATOR_B: &str = "0x00000000000000000000000000000000000000bb";

fn small() -> TrainConfig {
    TrainConfig { dim: 32, buckets: 5_000, epochs: 5, ..TrainConfig::default() }
}

fn contract_clones(records: Vec<ContractRecord>, delta: f64, options: CloneOptions) -> (Vec<Finding>, CloneStats) {
    let corpus = Corpus::from_records(records).unwrap();
    let parsed = corpus.parse();
    let model = train_on_corpus(&parsed, Level::Contract, Mode::Structural, &small()).unwrap();
    let m = build_matrix(&model, &parsed, Level::Contract, Mode::Structural);
    detect_clones(&m, &parsed, delta, options).unwrap()
}

#[test]
fn two_identical_contracts_are_one_pair() {
    let recs = vec![
        ContractRecord::new("a", common::OVERFLOW).with_creator(CREATOR_A),
        ContractRecord::new("b", common::OVERFLOW).with_creator(CREATOR_B),
    ];
    let (f, stats) = contract_clones(recs.clone(), 1.0, CloneOptions::default());
    assert_eq!(f.len(), 1);
    assert_eq!((stats.pairs, stats.clone_ratio), (1, 1.0));

    let same: Vec<ContractRecord> = recs.into_iter().map(|r| r.with_creator(CREATOR_A)).collect();
    let (f, stats) = contract_clones(same.clone(), 1.0, CloneOptions { exclude_same_creator: true });
    assert!(f.is_empty());
    assert_eq!(stats.cloned_lines, 0);
    // Without exclusion the pair is back.
    assert_eq!(contract_clones(same, 1.0, CloneOptions::default()).0.len(), 1);
}

#[test]
fn exclusion_needs_creators() {
    let recs = vec![ContractRecord::new("a", common::OVERFLOW), ContractRecord::new("b", common::OVERFLOW)];
    let corpus = Corpus::from_records(recs).unwrap();
    let parsed = corpus.parse();
    let model = train_on_corpus(&parsed, Level::Contract, Mode::Structural, &small()).unwrap();
    let m = build_matrix(&model, &parsed, Level::Contract, Mode::Structural);
    let e = detect_clones(&m, &parsed, 1.0, CloneOptions { exclude_same_creator: true }).unwrap_err();
    assert_eq!(e.kind(), solsim::ErrorKind::Config);
}

#[test]
fn literal_variants_match_exactly() {
    let a = "contract A {\n    uint cap = 100;\n    string name = \"alpha\";\n    function f() { cap = 7; }\n}\n";
    let b = "contract A {\n    uint cap = 250;\n    string name = \"beta\";\n    function f() { cap = 12; }\n}\n";
    let (f, stats) = contract_clones(
        vec![ContractRecord::new("a", a), ContractRecord::new("b", b)],
        1.0,
        CloneOptions::default(),
    );
    assert_eq!(f.len(), 1);
    assert_eq!(f[0].score, 1.0);
    assert_eq!(stats.clone_ratio, 1.0);
}

#[test]
fn clone_types_are_annotated() {
    let recs = vec![ContractRecord::new("a", common::OVERFLOW), ContractRecord::new("b", common::OVERFLOW)];
    let corpus = Corpus::from_records(recs).unwrap();
    let parsed = corpus.parse();
    let model = train_on_corpus(&parsed, Level::Function, Mode::Structural, &small()).unwrap();
    let m = build_matrix(&model, &parsed, Level::Function, Mode::Structural);
    let (mut f, _) = detect_clones(&m, &parsed, 1.0, CloneOptions::default()).unwrap();
    let trees: HashMap<&str, &ParseTree> = parsed.parsed().map(|(r, t)| (r.contract_id.as_str(), t)).collect();
    annotate_clone_types(&mut f, &trees, None, Level::Function, DEFAULT_EDIT_CUTOFF).unwrap();
    assert_eq!(f.len(), 1);
    assert_eq!(f[0].clone_type, Some(CloneType::I));
}

/// A bug, the same statement with one identifier renamed, and an unrelated
/// statement, all in the same function context.
const BANK: &str = "contract Bank {
    mapping (address => uint) balances;
    uint fees;
    function withdraw(uint amount) {
        balances[msg.sender] -= amount;
    }
    function renamed(uint amount) {
        credits[msg.sender] -= amount;
    }
    function unrelated(uint amount) {
        owner.transfer(fees);
    }
}
";

#[test]
fn renamed_identifier_ranks_between_exact_and_unrelated() {
    let corpus = Corpus::from_records(vec![ContractRecord::new("bank", BANK)]).unwrap();
    let parsed = corpus.parse();
    let model = train_on_corpus(&parsed, Level::Statement, Mode::Basic, &small()).unwrap();
    let mut db = BugDb::default();
    db.add_bug(BANK, 5, 5, Category::OverflowUnderflow, Split::Detection).unwrap();
    let bugs = db.build_matrix(&model, Split::Detection, Mode::Basic).unwrap();
    let stmts = build_matrix(&model, &parsed, Level::Statement, Mode::Basic);
    let f = detect_bugs(&stmts, &bugs, 0.0).unwrap();
    let score: BTreeMap<u32, f64> = f.iter().map(|f| (f.query.line_start, f.score)).collect();
    assert_eq!(score[&5], 1.0);
    assert!(score[&8] < 1.0);
    assert!(score[&8] > score[&11], "renamed {} unrelated {}", score[&8], score[&11]);
}

#[test]
fn fix_comparison() {
    let mut db = BugDb::default();
    let bug = db.add_bug(exemplars::OVERFLOW, 8, 8, Category::OverflowUnderflow, Split::Detection).unwrap();
    let model = train(&[bug.stream(Mode::Structural).unwrap().words()], &small()).unwrap();
    let same = compare_fix(&model, &bug, exemplars::OVERFLOW, 8, 8, Mode::Structural).unwrap();
    assert_eq!(same, 1.0);
    let fixed = exemplars::OVERFLOW.replace("r += value", "r -= value");
    let changed = compare_fix(&model, &bug, &fixed, 8, 8, Mode::Structural).unwrap();
    assert!(changed < 1.0);
}

#[test]
fn confusion_counts_at_point_nine() {
    let r = EvalReport::from_counts(36, 8, 2804, 9);
    let pct = |x: f64| (x * 1000.0).round() / 10.0;
    assert_eq!((pct(r.precision), pct(r.recall), pct(r.f1), pct(r.fpr), pct(r.fnr)), (81.8, 80.0, 80.9, 0.3, 20.0));
    assert_eq!(r.total(), 2857);
    let json = report::to_json(&r);
    assert!(json.contains("\"fn\": 9"));
}

#[test]
fn all_negative_truth_gives_zero_metrics() {
    let truth = GroundTruth::parse("a\t1\t0\na\t2\t0\nb\t5-6\tclean\n").unwrap();
    let r = eval_metrics(&[], &truth).unwrap();
    assert_eq!((r.tn, r.precision, r.recall, r.f1, r.fpr), (3, 0.0, 0.0, 0.0, 0.0));
}

#[test]
fn finding_on_unlabeled_statement_is_rejected() {
    let truth = GroundTruth::parse("a\t1\t1\n").unwrap();
    let f = Finding {
        kind: FindingKind::Validation,
        query: ElementRef::new("a", 2, 2),
        matched: ElementRef::new("Overflow@8-8", 8, 8),
        score: 1.0,
        category: None,
        clone_type: None,
    };
    assert!(eval_metrics(&[f], &truth).is_err());
}

/// A model over the exemplars and a few generated hosts.
fn validation_setup() -> (EmbeddingModel, EmbeddingMatrix, BugDb, Vec<String>) {
    let hosts: Vec<String> = (0..4).map(|i| common::synth::clean_host(&format!("Host{i}"), 50 + i)).collect();
    let mut recs: Vec<ContractRecord> =
        hosts.iter().enumerate().map(|(i, h)| ContractRecord::new(format!("h{i}"), h.as_str())).collect();
    for (i, e) in exemplars::EXEMPLARS.iter().enumerate() {
        recs.push(ContractRecord::new(format!("ex{i}"), e.source));
    }
    let corpus = Corpus::from_records(recs).unwrap();
    let cfg = TrainConfig { epochs: 10, ..TrainConfig::default() };
    let model = train_on_corpus(&corpus.parse(), Level::Statement, Mode::Structural, &cfg).unwrap();
    let mut db = BugDb::default();
    exemplars::seed(&mut db).unwrap();
    let bugs = db.build_matrix(&model, Split::Detection, Mode::Structural).unwrap();
    (model, bugs, db, hosts)
}

#[test]
fn validation_of_clean_and_planted_contracts() {
    let (model, bugs, db, hosts) = validation_setup();
    let clean = validate_contract(&hosts[0], "h0", &model, &bugs, 0.95).unwrap();
    assert!(!clean.flagged(), "{:?}", clean.findings);
    assert!(!clean.statements.is_empty());

    // The Rubixi exemplar appended to a clean host keeps its own context.
    let offset = hosts[1].lines().count() as u32;
    let planted = format!("{}{}", hosts[1], exemplars::RUBIXI);
    let v = validate_contract(&planted, "p", &model, &bugs, 1.0).unwrap();
    assert_eq!(v.findings.len(), 1);
    assert_eq!(v.findings[0].query.line_start, offset + 5);
    assert_eq!(v.findings[0].category, Some(Category::OverpoweredOwner));

    let mut f = v.findings.clone();
    let tree = solsim::parser::parse(&planted).unwrap();
    let trees: HashMap<&str, &ParseTree> = [("p", &tree)].into_iter().collect();
    annotate_clone_types(&mut f, &trees, Some(&db), Level::Statement, DEFAULT_EDIT_CUTOFF).unwrap();
    assert_eq!(f[0].clone_type, Some(CloneType::I));
    let text = report::findings_tsv(&f);
    assert_eq!(report::parse_findings_tsv(&text).unwrap(), f);
}

#[test]
fn mismatched_artifacts_are_refused() {
    let (model, bugs, _, hosts) = validation_setup();
    let corpus = Corpus::from_records(vec![ContractRecord::new("h", hosts[0].as_str())]).unwrap();
    let parsed = corpus.parse();
    let basic = build_matrix(&model, &parsed, Level::Statement, Mode::Basic);
    assert_eq!(detect_bugs(&basic, &bugs, 0.9).unwrap_err().kind(), solsim::ErrorKind::Config);
    let other = train(&[vec!["x"]], &small()).unwrap();
    let stale = build_matrix(&other, &parsed, Level::Statement, Mode::Structural);
    assert_eq!(detect_bugs(&stale, &bugs, 0.9).unwrap_err().kind(), solsim::ErrorKind::Version);
    assert_eq!(validate_contract(&hosts[0], "h", &other, &bugs, 0.9).unwrap_err().kind(), solsim::ErrorKind::Version);
    assert_eq!(validate_contract(&hosts[0], "h", &model, &bugs, 1.5).unwrap_err().kind(), solsim::ErrorKind::Config);
}

#[test]
fn ablation_on_distinct_statements_reports_nothing() {
    let src = "contract Q {\n    uint a1;\n    function f(uint v) {\n        a1 = v * 3;\n        emit Done(a1);\n    }\n}\n";
    let corpus = Corpus::from_records(vec![ContractRecord::new("q", src)]).unwrap();
    let parsed = corpus.parse();
    let mut recs = vec![ContractRecord::new("q", src)];
    recs.extend(exemplars::EXEMPLARS.iter().enumerate().map(|(i, e)| ContractRecord::new(format!("e{i}"), e.source)));
    let all = Corpus::from_records(recs).unwrap();
    let model = train_on_corpus(&all.parse(), Level::Statement, Mode::Structural, &small()).unwrap();
    let mut db = BugDb::default();
    exemplars::seed(&mut db).unwrap();
    let sb = db.build_matrix(&model, Split::Detection, Mode::Structural).unwrap();
    let bb = db.build_matrix(&model, Split::Detection, Mode::Basic).unwrap();
    let ss = build_matrix(&model, &parsed, Level::Statement, Mode::Structural);
    let bs = build_matrix(&model, &parsed, Level::Statement, Mode::Basic);
    let a = ablation_run(&ss, &sb, &bs, &bb, 1.0).unwrap();
    assert_eq!(a.counts(), AblationCounts { structural: 0, basic: 0 });
    assert!(ablation_run(&bs, &sb, &ss, &bb, 1.0).is_err());
}

#[test]
fn erc20_skeleton_and_listing() {
    let token = "contract T {
    uint public totalSupply;
    mapping (address => uint) public balanceOf;
    mapping (address => mapping (address => uint)) public allowance;
    function transfer(address to, uint v) returns (bool) { return true; }
    function transferFrom(address f, address to, uint v) returns (bool) { return true; }
    function approve(address s, uint v) returns (bool) { return true; }
}
";
    assert!(erc20_check(&solsim::parser::parse(token).unwrap()));
    assert!(!erc20_check(&solsim::parser::parse(common::OVERFLOW).unwrap()));
}

#[test]
fn sampling_keeps_corpus_order() {
    let pc = common::synth::planted_corpus(1);
    let s = sample_contracts(&pc.corpus, 10, 9);
    assert_eq!(s.len(), 10);
    let pos: Vec<usize> =
        s.records.iter().map(|r| pc.corpus.records.iter().position(|x| x.contract_id == r.contract_id).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(sample_contracts(&pc.corpus, 10, 9), s);
    assert_eq!(sample_contracts(&pc.corpus, 500, 9).len(), 50);
}
