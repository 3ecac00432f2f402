//! Seeded generator of varied contracts with planted clones.
//!
//! Contracts are produced as templates in which every numeric literal is
//! a `#N#` hole and every string literal a `#S#` hole, so the same shape
//! can be rendered with different literal values.

use std::collections::HashSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use solsim::corpus::{ContractRecord, Corpus};

const PREFIXES: [&str; 7] = ["Token", "Vault", "Bank", "Lottery", "Auction", "Registry", "Escrow"];
const SUFFIXES: [&str; 5] = ["Alpha", "Beta", "Gamma", "Delta", "Omega"];
const WORDS: [&str; 64] = [
    "total", "pool", "reserve", "jackpot", "treasury", "round", "epoch", "price", "rate", "bonus", "reward", "fee",
    "stake", "share", "credit", "debt", "limit", "cap", "period", "deadline", "counter", "nonce", "weight", "score",
    "level", "budget", "quota", "margin", "supply", "ticket", "bid", "vote", "rebate", "tax", "yield", "premium",
    "bounty", "tier", "batch", "cycle", "window", "offset", "ratio", "factor", "seed", "entropy", "height", "depth",
    "volume", "surplus", "deficit", "payout", "wager", "pot", "lease", "rent", "loan", "interest", "penalty",
    "deposit", "escrow", "grant", "award", "prize",
];
const VERBS: [&str; 16] = [
    "deposit", "withdraw", "claim", "settle", "release", "refund", "stake", "vote", "bid", "mint", "burn", "lock",
    "open", "close", "draw", "update",
];
const ADDRESS_WORDS: [&str; 8] = ["owner", "admin", "manager", "operator", "wallet", "beneficiary", "oracle", "winner"];
const STRINGS: [&str; 6] = ["open", "closed", "paused", "ready", "done", "pending"];

struct Scope<'r> {
    rng: &'r mut ChaCha8Rng,
    /// This contract's share of [`WORDS`].
    words: Vec<&'static str>,
    /// Relative frequency of each statement kind in this contract.
    kinds: WeightedIndex<f64>,
    uints: Vec<String>,
    maps: Vec<String>,
    addrs: Vec<String>,
    strings: Vec<String>,
    locals: Vec<String>,
    used: HashSet<String>,
}

impl Scope<'_> {
    fn fresh(&mut self, words: &[&str], camel_with: Option<&[&str]>) -> String {
        loop {
            let mut name = words.choose(self.rng).unwrap().to_string();
            if let Some(more) = camel_with {
                let w = more.choose(self.rng).unwrap();
                name.push_str(&w[..1].to_uppercase());
                name.push_str(&w[1..]);
            }
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }

    fn pick(&mut self, from: &[String]) -> String {
        from.choose(self.rng).unwrap().clone()
    }

    fn uint_atom(&mut self) -> String {
        match self.rng.gen_range(0..7) {
            0 | 1 => {
                let v = self.uints.clone();
                self.pick(&v)
            }
            2 if !self.locals.is_empty() => {
                let l = self.locals.clone();
                self.pick(&l)
            }
            3 => "#N#".to_string(),
            4 => {
                let m = self.pick(&self.maps.clone());
                format!("{m}[msg.sender]")
            }
            5 => ["msg.value", "block.number", "now", "this.balance"].choose(self.rng).unwrap().to_string(),
            _ => {
                let v = self.uints.clone();
                self.pick(&v)
            }
        }
    }

    fn expr(&mut self, depth: u32) -> String {
        if depth == 0 || self.rng.gen_bool(0.45) {
            return self.uint_atom();
        }
        let op = ["+", "-", "*", "/", "%"].choose(self.rng).unwrap();
        let a = self.expr(depth - 1);
        let b = self.expr(depth - 1);
        if self.rng.gen_bool(0.3) {
            format!("({a} {op} {b})")
        } else {
            format!("{a} {op} {b}")
        }
    }

    fn cond(&mut self) -> String {
        let cmp = ["<", ">", "<=", ">=", "==", "!="].choose(self.rng).unwrap();
        let a = self.expr(1);
        let b = self.expr(1);
        if self.rng.gen_bool(0.2) {
            let who = self.pick(&self.addrs.clone());
            format!("msg.sender == {who} && {a} {cmp} {b}")
        } else {
            format!("{a} {cmp} {b}")
        }
    }

    fn addr(&mut self) -> String {
        if self.rng.gen_bool(0.5) {
            "msg.sender".to_string()
        } else {
            self.pick(&self.addrs.clone())
        }
    }

    fn statement(&mut self, depth: u32, out: &mut Vec<String>, indent: usize) {
        let pad = "    ".repeat(indent);
        let kind = loop {
            let k = self.kinds.sample(self.rng);
            if depth > 0 || k < 9 {
                break k;
            }
        };
        let line = match kind {
            0 => format!("{} = {};", self.pick(&self.uints.clone()), self.expr(2)),
            1 => {
                let op = ["+=", "-=", "*="].choose(self.rng).unwrap();
                format!("{} {op} {};", self.pick(&self.uints.clone()), self.expr(1))
            }
            2 => format!("require({});", self.cond()),
            3 => {
                let m = self.pick(&self.maps.clone());
                let a = self.addr();
                format!("{m}[{a}] = {m}[{a}] + {};", self.expr(1))
            }
            4 => format!("{}.transfer({});", self.addr(), self.expr(1)),
            5 => {
                let words = self.words.clone();
                let name = self.fresh(&words, Some(&["amount", "value", "delta", "part"]));
                let e = self.expr(2);
                self.locals.push(name.clone());
                format!("uint {name} = {e};")
            }
            6 if !self.strings.is_empty() => format!("{} = \"#S#\";", self.pick(&self.strings.clone())),
            7 => format!("{} = {};", self.pick(&self.addrs.clone()), self.addr()),
            8 | 6 => {
                let m = self.pick(&self.maps.clone());
                format!("delete {m}[{}];", self.addr())
            }
            9 => {
                out.push(format!("{pad}if ({}) {{", self.cond()));
                for _ in 0..self.rng.gen_range(1..=3) {
                    self.statement(depth - 1, out, indent + 1);
                }
                if self.rng.gen_bool(0.3) {
                    out.push(format!("{pad}}} else {{"));
                    self.statement(depth - 1, out, indent + 1);
                }
                "}".to_string()
            }
            _ => {
                let bound = self.expr(1);
                out.push(format!("{pad}for (uint i = 0; i < {bound}; i++) {{"));
                for _ in 0..self.rng.gen_range(1..=2) {
                    self.statement(depth - 1, out, indent + 1);
                }
                "}".to_string()
            }
        };
        out.push(format!("{pad}{line}"));
    }
}

/// A contract template with literal holes.
pub fn contract_template(rng: &mut ChaCha8Rng, name: &str) -> String {
    let mut words = WORDS.to_vec();
    words.shuffle(rng);
    words.truncate(12);
    let weights: Vec<f64> = (0..11).map(|_| rng.gen::<f64>().powi(2) + 0.02).collect();
    let mut scope = Scope {
        rng,
        words,
        kinds: WeightedIndex::new(weights).unwrap(),
        uints: Vec::new(),
        maps: Vec::new(),
        addrs: Vec::new(),
        strings: Vec::new(),
        locals: Vec::new(),
        used: HashSet::new(),
    };
    let mut lines = vec!["pragma solidity ^0.4.24;".to_string(), String::new(), format!("contract {name} {{")];
    for _ in 0..scope.rng.gen_range(2..=4) {
        let camel = scope.rng.gen_bool(0.5);
        let words = scope.words.clone();
        let v = scope.fresh(&words, if camel { Some(&words) } else { None });
        if scope.rng.gen_bool(0.5) {
            lines.push(format!("    uint public {v} = #N#;"));
        } else {
            lines.push(format!("    uint public {v};"));
        }
        scope.uints.push(v);
    }
    for _ in 0..scope.rng.gen_range(1..=2) {
        let v = scope.fresh(&["balances", "credits", "deposits", "stakes", "shares", "allowances", "claims"], None);
        lines.push(format!("    mapping (address => uint) public {v};"));
        scope.maps.push(v);
    }
    for _ in 0..scope.rng.gen_range(1..=2) {
        let v = scope.fresh(&ADDRESS_WORDS, None);
        lines.push(format!("    address public {v};"));
        scope.addrs.push(v);
    }
    if scope.rng.gen_bool(0.6) {
        let v = scope.fresh(&["status", "phase", "label", "note"], None);
        lines.push(format!("    string public {v};"));
        scope.strings.push(v);
    }
    for _ in 0..scope.rng.gen_range(3..=6) {
        let words = scope.words.clone();
        let fname = scope.fresh(&VERBS, Some(&words));
        let mut params = Vec::new();
        scope.locals.clear();
        for _ in 0..scope.rng.gen_range(0..=2) {
            let p = scope.fresh(&["amount", "value", "count", "quantity", "units", "size", "index"], None);
            params.push(format!("uint {p}"));
            scope.locals.push(p);
        }
        let payable = if scope.rng.gen_bool(0.3) { " payable" } else { "" };
        lines.push(String::new());
        lines.push(format!("    function {fname}({}) public{payable} {{", params.join(", ")));
        let mut body = Vec::new();
        for _ in 0..scope.rng.gen_range(2..=5) {
            scope.statement(2, &mut body, 2);
        }
        lines.extend(body);
        lines.push("    }".to_string());
        for p in &params {
            scope.used.remove(p.trim_start_matches("uint "));
        }
    }
    lines.push("}".to_string());
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

/// Fills the literal holes of `template` from `seed`.
pub fn fill_literals(template: &str, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(i) = rest.find('#') {
        out.push_str(&rest[..i]);
        let hole = &rest[i..i + 3];
        match hole {
            "#N#" => out.push_str(&rng.gen_range(1..100_000u32).to_string()),
            "#S#" => out.push_str(STRINGS.choose(&mut rng).unwrap()),
            _ => panic!("unknown hole {hole}"),
        }
        rest = &rest[i + 3..];
    }
    out.push_str(rest);
    out
}

/// Inserts `statement` as the first statement of the first function.
pub fn insert_statement(template: &str, statement: &str) -> String {
    let at = template.find("    function ").expect("template has a function");
    let eol = at + template[at..].find('\n').unwrap() + 1;
    format!("{}        {statement}\n{}", &template[..eol], &template[eol..])
}

/// Contract names in generation order; 35 distinct.
pub fn contract_names() -> Vec<String> {
    PREFIXES.iter().flat_map(|p| SUFFIXES.iter().map(move |s| format!("{p}{s}"))).collect()
}

pub struct PlantedCorpus {
    pub corpus: Corpus,
    /// (base id, copy id) pairs by kind.
    pub exact: Vec<(String, String)>,
    pub literal: Vec<(String, String)>,
    pub inserted: Vec<(String, String)>,
}

impl PlantedCorpus {
    pub fn planted(&self) -> impl Iterator<Item = &(String, String)> {
        self.exact.iter().chain(&self.literal).chain(&self.inserted)
    }

    pub fn is_planted(&self, a: &str, b: &str) -> bool {
        self.planted().any(|(x, y)| (x == a && y == b) || (x == b && y == a))
    }
}

fn id(i: usize) -> String {
    format!("c{i:02}")
}

/// 35 distinct contracts `c00..c34`, then exact copies of bases 0-4
/// (`c35..c39`), literal-only variants of bases 5-9 (`c40..c44`) and
/// statement-inserted variants of bases 10-14 (`c45..c49`).
pub fn planted_corpus(seed: u64) -> PlantedCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let templates: Vec<String> = contract_names().iter().map(|n| contract_template(&mut rng, n)).collect();
    let mut records: Vec<ContractRecord> =
        templates.iter().enumerate().map(|(i, t)| ContractRecord::new(id(i), fill_literals(t, i as u64))).collect();
    let (mut exact, mut literal, mut inserted) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..5 {
        records.push(ContractRecord::new(id(35 + k), fill_literals(&templates[k], k as u64)));
        exact.push((id(k), id(35 + k)));
    }
    for k in 0..5 {
        let b = 5 + k;
        let variant = fill_literals(&templates[b], 1000 + b as u64);
        assert_ne!(variant, records[b].source_text, "literal variant has no literals");
        records.push(ContractRecord::new(id(40 + k), variant));
        literal.push((id(b), id(40 + k)));
    }
    for k in 0..5 {
        let b = 10 + k;
        let t = insert_statement(&templates[b], "require(msg.sender != address(0));");
        records.push(ContractRecord::new(id(45 + k), fill_literals(&t, b as u64)));
        inserted.push((id(b), id(45 + k)));
    }
    PlantedCorpus { corpus: Corpus::from_records(records).unwrap(), exact, literal, inserted }
}

/// A generated contract named `name`, free of the exemplar statements.
pub fn clean_host(name: &str, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fill_literals(&contract_template(&mut rng, name), seed)
}
