//! Regenerates the bundled `data/mini` corpus: four imbalanced topics in
//! dir-per-class layout plus a 50-dimensional embedding file keyed by the
//! preprocessed (stemmed) vocabulary.
//!
//! cargo run -p aewelm --example make_mini_corpus -- data/mini

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use aewelm::Preprocessor;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIM: usize = 50;

const TOPICS: [(&str, usize, &[&str]); 4] = [
    (
        "sport",
        80,
        &[
            "football",
            "goal",
            "striker",
            "league",
            "match",
            "coach",
            "stadium",
            "referee",
            "tournament",
            "penalty",
            "season",
            "athlete",
            "trophy",
            "defender",
            "keeper",
            "championship",
            "sprint",
            "medal",
            "tennis",
            "cricket",
            "innings",
            "racing",
            "cyclist",
            "marathon",
        ],
    ),
    (
        "tech",
        60,
        &[
            "software",
            "processor",
            "compiler",
            "network",
            "server",
            "database",
            "algorithm",
            "startup",
            "smartphone",
            "browser",
            "encryption",
            "kernel",
            "developer",
            "cloud",
            "robot",
            "silicon",
            "chipset",
            "laptop",
            "bandwidth",
            "firmware",
            "programmer",
            "gadget",
            "interface",
            "malware",
        ],
    ),
    (
        "finance",
        40,
        &[
            "market",
            "stock",
            "investor",
            "dividend",
            "inflation",
            "bond",
            "equity",
            "banking",
            "currency",
            "portfolio",
            "earnings",
            "revenue",
            "merger",
            "lender",
            "mortgage",
            "treasury",
            "hedge",
            "valuation",
            "broker",
            "shareholder",
            "credit",
            "deficit",
            "tariff",
            "audit",
        ],
    ),
    (
        "health",
        20,
        &[
            "patient",
            "doctor",
            "hospital",
            "vaccine",
            "disease",
            "clinic",
            "surgery",
            "nurse",
            "therapy",
            "symptom",
            "diagnosis",
            "virus",
            "medicine",
            "infection",
            "cardiac",
            "diabetes",
            "nutrition",
            "pharmacy",
            "immune",
            "treatment",
            "cancer",
            "pediatric",
            "wellness",
            "epidemic",
        ],
    ),
];

const SHARED: &[&str] = &[
    "report",
    "people",
    "week",
    "official",
    "announce",
    "plan",
    "group",
    "public",
    "city",
    "year",
    "national",
    "statement",
    "million",
    "recent",
    "local",
    "expect",
    "change",
    "major",
    "company",
    "country",
    "government",
    "decision",
    "support",
    "issue",
    "growth",
    "future",
    "record",
    "early",
    "region",
    "result",
    "level",
    "review",
    "agency",
    "policy",
    "project",
    "figure",
    "series",
    "event",
];

/// Words that never get a vector, to exercise out-of-vocabulary handling.
const UNEMBEDDED: &[&str] = &["zyxt", "quorbl", "flimmer", "snarg", "brindle"];

const FILLER: &[&str] = &["the", "and", "of", "to", "in", "a", "with", "for", "on", "was"];

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn write_embeddings(out: &Path, prep: &Preprocessor, rng: &mut ChaCha8Rng) -> std::io::Result<()> {
    let centroids: Vec<Vec<f64>> = (0..TOPICS.len())
        .map(|_| (0..DIM).map(|_| gaussian(rng)).collect())
        .collect();
    let mut vectors: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut add = |word: &str, center: Option<&[f64]>, rng: &mut ChaCha8Rng| {
        for key in prep.process(word) {
            vectors.entry(key).or_insert_with(|| {
                (0..DIM)
                    .map(|j| center.map_or(0.0, |c| c[j]) + 0.6 * gaussian(rng))
                    .collect()
            });
        }
    };
    for (k, (_, _, words)) in TOPICS.iter().enumerate() {
        for w in *words {
            add(w, Some(&centroids[k]), rng);
        }
    }
    for w in SHARED {
        add(w, None, rng);
    }
    let mut text = format!("{} {DIM}\n", vectors.len());
    for (word, v) in &vectors {
        text.push_str(word);
        for x in v {
            text.push_str(&format!(" {x:.6}"));
        }
        text.push('\n');
    }
    fs::write(out.join("embeddings.txt"), text)
}

fn make_document(rng: &mut ChaCha8Rng, topic: usize) -> String {
    let len = rng.gen_range(30..60);
    let mut words = Vec::with_capacity(len);
    // one guaranteed topic word keeps every document embeddable
    words.push(*TOPICS[topic].2.choose(rng).unwrap());
    while words.len() < len {
        let r: f64 = rng.gen();
        let w = if r < 0.10 {
            *TOPICS[topic].2.choose(rng).unwrap()
        } else if r < 0.20 {
            // topic leakage
            let other = rng.gen_range(0..TOPICS.len());
            *TOPICS[other].2.choose(rng).unwrap()
        } else if r < 0.75 {
            *SHARED.choose(rng).unwrap()
        } else if r < 0.78 {
            *UNEMBEDDED.choose(rng).unwrap()
        } else {
            *FILLER.choose(rng).unwrap()
        };
        words.push(w);
    }
    words.shuffle(rng);
    let mut text = String::new();
    for (i, w) in words.iter().enumerate() {
        if i > 0 {
            text.push(if i % 12 == 0 { '\n' } else { ' ' });
        }
        text.push_str(w);
    }
    text.push('\n');
    text
}

fn main() -> std::io::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data/mini".into()));
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let prep = Preprocessor::default();
    for split in ["train", "test"] {
        let dir = out.join(split);
        if dir.exists() {
            fs::remove_dir_all(&dir)?;
        }
    }
    fs::create_dir_all(&out)?;
    write_embeddings(&out, &prep, &mut rng)?;
    for (k, (name, count, _)) in TOPICS.iter().enumerate() {
        let test = count / 5;
        for i in 0..*count {
            let split = if i < test { "test" } else { "train" };
            let dir = out.join(split).join(name);
            fs::create_dir_all(&dir)?;
            fs::write(dir.join(format!("{name}{i:03}.txt")), make_document(&mut rng, k))?;
        }
    }
    println!("wrote {}", out.display());
    Ok(())
}
