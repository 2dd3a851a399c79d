//! Acceptance criteria, one check per criterion. Prints a PASS/FAIL line for
//! each and exits non-zero if any fails.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use ontotopic::baselines::{classify_exact, classify_w2vw, window_starts, WindowConfig};
use ontotopic::classifier::{
    classify, classify_syntactic, enhance, find_knee, rank_concepts, ClassifierConfig,
    CombinerConfig, Document, Enhancement, EventSource, IdentificationEvent, SemanticConfig, SyntacticConfig,
};
use ontotopic::eval::{self, aggregate, fleiss_kappa, paper_pr_re, EvalReport, PaperScore, RatingMatrix, TopicRecord};
use ontotopic::textproc::TextProcessor;
use ontotopic::{lev_similarity, EmbeddingStore, Ontology, Relation, TopicId};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures/running_example")
        .join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn ids<S: AsRef<str>>(items: impl IntoIterator<Item = S>) -> BTreeSet<TopicId> {
    items.into_iter().map(|s| TopicId::new(s.as_ref())).collect()
}

fn running_document() -> Document {
    serde_json::from_str(read("document.jsonl").lines().next().unwrap()).unwrap()
}

fn ac1_running_example() -> Check {
    let start = Instant::now();
    let ont = Ontology::load_str(&read("ontology.csv")).map_err(|e| e.to_string())?;
    let doc = running_document();
    let got = classify_syntactic(&doc, &ont, &TextProcessor::default(), &SyntacticConfig::default());
    let elapsed = start.elapsed();
    let want = ids(read("syntactic_expected.txt").lines());
    ensure(want.len() == 13, || "reference list must hold 13 topics".into())?;
    ensure(got == want, || {
        format!(
            "missing {:?}, extra {:?}",
            want.difference(&got).collect::<Vec<_>>(),
            got.difference(&want).collect::<Vec<_>>()
        )
    })?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("13/13 topics in {:.1} ms", elapsed.as_secs_f64() * 1e3))
}

fn random_string(rng: &mut StdRng, alphabet: &[char], max: usize) -> String {
    let len = rng.gen_range(0..=max);
    (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

fn ac2_levenshtein() -> Check {
    let a = lev_similarity("databases", "database");
    let b = lev_similarity("knowledge based systems", "knowledge-based systems");
    ensure((a - 0.9412).abs() <= 1e-4 && a >= 0.94, || format!("databases/database = {a}"))?;
    ensure((b - 0.9565).abs() <= 1e-4, || format!("knowledge based = {b}"))?;
    ensure(a == oracle::lev_ratio("databases", "database"), || "oracle disagrees on databases".into())?;
    ensure(b == oracle::lev_ratio("knowledge based systems", "knowledge-based systems"), || {
        "oracle disagrees on knowledge based systems".into()
    })?;
    let mut rng = StdRng::seed_from_u64(2);
    let alphabet: Vec<char> = "abcde -é".chars().collect();
    let mut mismatches = 0;
    for _ in 0..10_000 {
        let x = random_string(&mut rng, &alphabet, 16);
        let y = if rng.gen_bool(0.3) {
            let mut y = x.clone();
            y.push_str(&random_string(&mut rng, &alphabet, 3));
            y
        } else {
            random_string(&mut rng, &alphabet, 16)
        };
        if (lev_similarity(&x, &y) - oracle::lev_ratio(&x, &y)).abs() > 1e-12 {
            mismatches += 1;
        }
    }
    ensure(mismatches == 0, || format!("{mismatches} mismatches in 10000 pairs"))?;
    Ok(format!("{a:.4}, {b:.4}; 10000 random pairs agree"))
}

fn event(topic: &str, gram: &str, direct: bool) -> IdentificationEvent {
    IdentificationEvent {
        topic: TopicId::new(topic),
        source_gram: gram.into(),
        occurrence: 0,
        via: if direct {
            EventSource::DirectMatch
        } else {
            EventSource::EmbeddingNeighbor { cosine: 0.8 }
        },
    }
}

fn ac3_ranking_law() -> Check {
    let worked: Vec<_> = ["twitter", "twitter", "twitter", "blogs", "blogs"]
        .iter()
        .map(|g| event("social media", g, false))
        .collect();
    let ranked = rank_concepts(&worked);
    ensure(ranked.len() == 1 && ranked[0].score == 10.0, || format!("worked case gave {ranked:?}"))?;
    ensure((ranked[0].frequency, ranked[0].diversity) == (5, 2), || "worked case counts".into())?;

    let mut rng = StdRng::seed_from_u64(3);
    let mut checked = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(0..80);
        let events: Vec<_> = (0..n)
            .map(|_| {
                let t = format!("t{}", rng.gen_range(0..8));
                let g = format!("g{}", rng.gen_range(0..6));
                event(&t, &g, rng.gen_bool(0.05))
            })
            .collect();
        for s in rank_concepts(&events) {
            let mine: Vec<_> = events.iter().filter(|e| e.topic == s.topic).collect();
            let grams: BTreeSet<_> = mine.iter().map(|e| &e.source_gram).collect();
            let expected = (mine.len() * grams.len()) as f64;
            if !s.promoted {
                ensure(s.score == expected && s.frequency == mine.len() && s.diversity == grams.len(), || {
                    format!("{} scored {} expected {expected}", s.topic, s.score)
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("worked case 10; {checked} non-promoted topics obey f x d"))
}

fn ac4_knee() -> Check {
    let mut rng = StdRng::seed_from_u64(4);
    for trial in 0..100 {
        let n = rng.gen_range(6..80);
        let k = rng.gen_range(1..n - 2);
        let step = 0.4 * 90.0 / (n - 1) as f64;
        let decrements: Vec<f64> = (0..n)
            .map(|i| if i == 0 { 0.0 } else { step * rng.gen_range(0.05..1.0) })
            .collect();
        let curve = oracle::plateau_drop(k, &decrements);
        let knee = find_knee(&curve) - 1;
        ensure(knee + 1 >= k && knee <= k + 1, || format!("trial {trial}: n {n} planted {k} found {knee}"))?;
    }
    ensure(find_knee(&[4.0; 9]) == 9, || "flat curve must keep all".into())?;
    ensure(find_knee(&[7.0]) == 1, || "single point must keep it".into())?;
    ensure(find_knee(&[5.0, 4.0, 3.0, 2.0, 1.0]) == 5, || "linear curve must keep all".into())?;
    ensure(find_knee(&[10.0, 10.0, 9.0, 1.0, 1.0, 1.0]) == 3, || "[10,10,9,1,1,1] must keep 3".into())?;
    Ok("100 planted knees within one rank; fallbacks keep all".into())
}

fn generic_store() -> EmbeddingStore {
    // "learning" sits at rank 1 of the vocabulary
    EmbeddingStore::load_str("4 2\nthe 0 1\nlearning 1 0\nneural_networks 0.95 0.2\ncats 0 1\n").unwrap()
}

fn ac5_generic_filter() -> Check {
    let ont = Ontology::load_str("learning,alternateLabelOf,learning\nneural networks,alternateLabelOf,neural networks\n").unwrap();
    let store = generic_store();
    let text = TextProcessor::default();
    let cfg = ClassifierConfig::default();
    ensure(store.frequency_rank("learning").unwrap() < cfg.combiner.generic_filter_n, || "fixture rank".into())?;

    let semantic_only = Document::new("Neural networks", "", &[]);
    let r = classify(&semantic_only, &ont, &store, &text, &cfg).map_err(|e| e.to_string())?;
    let learning = TopicId::new("learning");
    ensure(r.semantic.iter().any(|s| s.topic == learning), || "semantic module should find learning".into())?;
    ensure(!r.syntactic.contains(&learning), || "fixture 1 must not match learning syntactically".into())?;
    ensure(!r.union.contains(&learning), || "generic semantic-only topic leaked into union".into())?;

    let syntactic_too = Document::new("Learning with neural networks", "", &[]);
    let r = classify(&syntactic_too, &ont, &store, &text, &cfg).map_err(|e| e.to_string())?;
    ensure(r.syntactic.contains(&learning), || "fixture 2 must match learning syntactically".into())?;
    ensure(r.union.contains(&learning), || "syntactic topic was filtered".into())?;
    Ok("semantic-only generic topic dropped; syntactic one kept".into())
}

const VOCAB: [&str; 16] = [
    "data", "mining", "graph", "graphs", "theory", "social", "networks", "network", "privacy", "web", "semantic",
    "database", "databases", "learning", "machine", "knowledge-based",
];

fn random_ontology(rng: &mut StdRng) -> Ontology {
    let mut labels = BTreeSet::new();
    for _ in 0..rng.gen_range(2..14) {
        let n = rng.gen_range(1..=3);
        let words: Vec<&str> = (0..n).map(|_| *VOCAB.choose(rng).unwrap()).collect();
        labels.insert(words.join(" "));
    }
    let labels: Vec<String> = labels.into_iter().collect();
    let mut b = Ontology::builder();
    for (i, l) in labels.iter().enumerate() {
        b.add(l, Relation::AlternateLabelOf, l).unwrap();
        if i > 0 && rng.gen_bool(0.7) {
            let parent = &labels[rng.gen_range(0..i)];
            b.add(parent, Relation::SuperTopicOf, l).unwrap();
        }
    }
    b.build().unwrap()
}

fn random_text(rng: &mut StdRng, max: usize) -> String {
    let n = rng.gen_range(0..max);
    let mut words: Vec<String> = (0..n).map(|_| VOCAB.choose(rng).unwrap().to_string()).collect();
    for w in words.iter_mut() {
        if rng.gen_bool(0.1) {
            w.push('.');
        }
    }
    words.join(" ")
}

fn random_store(rng: &mut StdRng) -> EmbeddingStore {
    let mut tokens: Vec<String> = VOCAB.iter().map(|s| s.to_string()).collect();
    tokens.extend(["social_networks", "data_mining", "machine_learning", "semantic_web"].map(String::from));
    EmbeddingStore::from_entries(
        4,
        tokens.into_iter().map(|t| (t, (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>())),
    )
    .unwrap()
}

fn ac6_enrichment() -> Check {
    let ont = Ontology::load_str("artificial intelligence,superTopicOf,machine learning\n").unwrap();
    let got = enhance(&ids(["machine learning"]), &ont, Enhancement::Direct);
    ensure(got == ids(["artificial intelligence"]), || format!("got {got:?}"))?;

    let mut rng = StdRng::seed_from_u64(6);
    let text = TextProcessor::default();
    let mut runs = 0;
    for _ in 0..300 {
        let ont = random_ontology(&mut rng);
        let store = random_store(&mut rng);
        let doc = Document::new(&random_text(&mut rng, 8), &random_text(&mut rng, 30), &[]);
        if doc.is_blank() {
            continue;
        }
        for enhancement in [Enhancement::None, Enhancement::Direct, Enhancement::All] {
            let cfg = ClassifierConfig {
                combiner: CombinerConfig {
                    generic_filter_n: rng.gen_range(0..5),
                    enhancement,
                },
                semantic: SemanticConfig {
                    sim_threshold: 0.3,
                    ..Default::default()
                },
                ..Default::default()
            };
            let r = classify(&doc, &ont, &store, &text, &cfg).map_err(|e| e.to_string())?;
            ensure(r.enhancement.is_disjoint(&r.union), || format!("overlap for {doc:?}"))?;
            runs += 1;
        }
    }
    Ok(format!("ML -> AI; {runs} randomized runs disjoint"))
}

fn ac7_metrics() -> Check {
    let s = paper_pr_re("p", &ids(["a", "b", "c", "d"]), &ids(["c", "d", "e"]), None).map_err(|e| e.to_string())?;
    ensure(s.precision == 2.0 / 4.0 && s.recall == 2.0 / 3.0, || format!("got ({}, {})", s.precision, s.recall))?;

    let mut rng = StdRng::seed_from_u64(7);
    let scores: Vec<PaperScore> = (0..40)
        .map(|i| PaperScore {
            paper_id: i.to_string(),
            precision: rng.gen_range(0.0..=1.0),
            recall: rng.gen_range(0.0..=1.0),
            empty_prediction: false,
            empty_gold: false,
        })
        .collect();
    let p = scores.iter().map(|s| s.precision).sum::<f64>() / 40.0;
    let r = scores.iter().map(|s| s.recall).sum::<f64>() / 40.0;
    let report = aggregate(scores).map_err(|e| e.to_string())?;
    ensure(report.precision == p && report.recall == r, || "macro averages differ".into())?;
    ensure(report.f1 == 2.0 * p * r / (p + r), || "F1 is not the harmonic mean".into())?;
    let single = aggregate(vec![PaperScore {
        paper_id: "x".into(),
        precision: 0.8,
        recall: 0.6,
        empty_prediction: false,
        empty_gold: false,
    }])
    .unwrap();
    ensure((single.f1 - 0.685_714_285_714_285_7).abs() < 1e-15, || format!("F1 {}", single.f1))?;

    // CLI round trip with enrichment over the fixture ontology
    let ont = Ontology::load_str(&read("ontology.csv")).unwrap();
    let topics: Vec<String> = ont.topics().map(|t| t.id.to_string()).collect();
    let mut predictions = Vec::new();
    let mut gold = Vec::new();
    for i in 0..60 {
        let pick = |rng: &mut StdRng, lo: usize| -> Vec<String> {
            let n = rng.gen_range(lo..8);
            topics.choose_multiple(rng, n).cloned().collect()
        };
        predictions.push(TopicRecord {
            paper_id: format!("paper-{i}"),
            topics: pick(&mut rng, 0),
            ..Default::default()
        });
        gold.push(TopicRecord {
            paper_id: format!("paper-{i}"),
            topics: pick(&mut rng, 1),
            ..Default::default()
        });
    }
    gold.shuffle(&mut rng);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let write_jsonl = |name: &str, recs: &[TopicRecord]| -> String {
        let path = dir.path().join(name);
        let body: String = recs.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect();
        std::fs::write(&path, body).unwrap();
        path.to_string_lossy().into_owned()
    };
    let pred_path = write_jsonl("pred.jsonl", &predictions);
    let gold_path = write_jsonl("gold.jsonl", &gold);
    let ont_path = fixture("ontology.csv").to_string_lossy().into_owned();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = ontotopic_cli::run(
        ["ontotopic", "evaluate", "--ontology", &ont_path, "--predictions", &pred_path, "--gold", &gold_path],
        &mut out,
        &mut err,
    );
    ensure(code == 0, || format!("evaluate exited {code}: {}", String::from_utf8_lossy(&err)))?;
    let from_cli: EvalReport = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    let in_process = eval::evaluate(&predictions, &gold, Some(&ont), true).map_err(|e| e.to_string())?;
    let bits = |r: &EvalReport| -> Vec<u64> {
        let mut v = vec![r.precision.to_bits(), r.recall.to_bits(), r.f1.to_bits()];
        v.extend(r.per_paper.iter().flat_map(|p| [p.precision.to_bits(), p.recall.to_bits()]));
        v
    };
    ensure(bits(&from_cli) == bits(&in_process) && from_cli == in_process, || "CLI report differs".into())?;
    Ok(format!("(2/4, 2/3); identities exact; 60-paper CLI round trip bit-identical (F1 {:.4})", in_process.f1))
}

fn ac8_kappa() -> Check {
    let unanimous = RatingMatrix::from_votes(&[3, 0, 3, 0, 3], 3).map_err(|e| e.to_string())?;
    ensure(fleiss_kappa(&unanimous) == 1.0, || "unanimous matrix".into())?;
    let all_yes = RatingMatrix::from_votes(&[4, 4], 4).unwrap();
    ensure(fleiss_kappa(&all_yes) == 1.0, || "single-category unanimous matrix".into())?;
    // P = 2/3, Pe = 1/2
    let k1 = fleiss_kappa(&RatingMatrix::from_votes(&[3, 0, 2, 1], 3).unwrap());
    ensure((k1 - 1.0 / 3.0).abs() < 1e-9, || format!("[3,0,2,1]: {k1}"))?;
    // P = 23/30, Pe = 218/400
    let k2 = fleiss_kappa(&RatingMatrix::from_votes(&[4, 4, 0, 2, 3], 4).unwrap());
    let want = (23.0 / 30.0 - 218.0 / 400.0) / (1.0 - 218.0 / 400.0);
    ensure((k2 - want).abs() < 1e-9, || format!("[4,4,0,2,3]: {k2} vs {want}"))?;
    let disagree = fleiss_kappa(&RatingMatrix::new(vec![vec![true, false], vec![false, true]]).unwrap());
    ensure(disagree < 0.0, || "total disagreement should be negative".into())?;

    let mut rng = StdRng::seed_from_u64(8);
    for _ in 0..100 {
        let items = rng.gen_range(1..20);
        let raters = rng.gen_range(2..8);
        let rows: Vec<Vec<bool>> = (0..items).map(|_| (0..raters).map(|_| rng.gen_bool(0.4)).collect()).collect();
        let base = fleiss_kappa(&RatingMatrix::new(rows.clone()).unwrap());
        let mut order: Vec<usize> = (0..raters).collect();
        order.shuffle(&mut rng);
        let mut permuted: Vec<Vec<bool>> = rows.iter().map(|r| order.iter().map(|&j| r[j]).collect()).collect();
        permuted.shuffle(&mut rng);
        let k = fleiss_kappa(&RatingMatrix::new(permuted).unwrap());
        ensure((k - base).abs() < 1e-12, || format!("permutation changed kappa {base} -> {k}"))?;
    }
    Ok(format!("unanimous 1.0; hand cases {k1:.4}, {k2:.4}; 100 permutations invariant"))
}

fn ac9_subsumption() -> Check {
    let mut rng = StdRng::seed_from_u64(9);
    let text = TextProcessor::default();
    let mut nonempty = 0;
    for i in 0..500 {
        let ont = random_ontology(&mut rng);
        let doc = Document::new(&random_text(&mut rng, 10), &random_text(&mut rng, 40), &[]);
        let exact = classify_exact(&doc, &ont, &text, 3);
        let syn = classify_syntactic(&doc, &ont, &text, &SyntacticConfig::default());
        ensure(exact.is_subset(&syn), || format!("fixture {i}: {:?} not in syntactic", exact.difference(&syn).collect::<Vec<_>>()))?;
        nonempty += usize::from(!exact.is_empty());
    }
    Ok(format!("500 fixtures, {nonempty} with exact matches, 0 violations"))
}

fn ac10_determinism() -> Check {
    let doc = running_document();
    let sentences: Vec<&str> = doc.abstract_text.split(". ").collect();
    let mut rng = StdRng::seed_from_u64(10);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut batch = String::new();
    for i in 0..200 {
        let n = rng.gen_range(1..sentences.len());
        let mut picked: Vec<&str> = sentences.choose_multiple(&mut rng, n).copied().collect();
        picked.shuffle(&mut rng);
        let kws: Vec<&str> = doc.keywords.iter().map(String::as_str).filter(|_| rng.gen_bool(0.5)).collect();
        let rec = serde_json::json!({
            "paper_id": format!("doc-{i:03}"),
            "title": random_text(&mut rng, 6),
            "abstract": picked.join(". "),
            "keywords": kws,
        });
        batch.push_str(&rec.to_string());
        batch.push('\n');
    }
    let input = dir.path().join("batch.jsonl");
    std::fs::write(&input, batch).unwrap();
    let ont = fixture("ontology.csv").to_string_lossy().into_owned();
    let emb = fixture("embeddings.txt").to_string_lossy().into_owned();
    let mut outputs = Vec::new();
    for workers in ["1", "8"] {
        let out_path = dir.path().join(format!("out-{workers}.jsonl"));
        let mut sink = Vec::new();
        let mut err = Vec::new();
        let code = ontotopic_cli::run(
            [
                "ontotopic",
                "classify",
                "--ontology",
                &ont,
                "--embeddings",
                &emb,
                "--filter-top-n",
                "5",
                "--workers",
                workers,
                "-o",
                out_path.to_str().unwrap(),
                input.to_str().unwrap(),
            ],
            &mut sink,
            &mut err,
        );
        ensure(code == 0, || format!("workers {workers}: exit {code}: {}", String::from_utf8_lossy(&err)))?;
        outputs.push(std::fs::read(&out_path).unwrap());
    }
    ensure(outputs[0] == outputs[1], || "outputs differ between 1 and 8 workers".into())?;
    let lines = outputs[0].split(|&b| b == b'\n').filter(|l| !l.is_empty()).count();
    ensure(lines == 200, || format!("{lines} output lines"))?;
    Ok(format!("200 documents, {} bytes identical for 1 and 8 workers", outputs[0].len()))
}

fn ac11_windows() -> Check {
    let starts = window_starts(23, 10, 5);
    ensure(starts == [0, 5, 10, 15, 20], || format!("starts {starts:?}"))?;
    ensure(window_starts(7, 10, 5) == [0], || "short document should have one window".into())?;

    // every token shares one vector; "target" sits at cosine 0.9 from it
    let store = EmbeddingStore::from_entries(
        2,
        [("corpus", vec![1.0, 0.0]), ("target", vec![0.9, (1.0f64 - 0.81).sqrt()]), ("noise", vec![0.0, 1.0])],
    )
    .map_err(|e| e.to_string())?;
    let ont = Ontology::load_str("target,alternateLabelOf,target\nnoise,alternateLabelOf,noise\n").unwrap();
    let doc = Document::new("", &["corpus"; 15].join(" "), &[]);
    let ranked = classify_w2vw(&doc, &store, &ont, &TextProcessor::default(), &WindowConfig::default());
    ensure(!ranked.is_empty() && ranked[0].topic.as_str() == "target", || format!("ranking {ranked:?}"))?;
    ensure((ranked[0].score - 2.7).abs() < 1e-9, || format!("score {}", ranked[0].score))?;
    ensure(ranked[0].diversity == 3, || "expected hits in 3 windows".into())?;
    Ok(format!("windows {starts:?}; planted score {:.10}", ranked[0].score))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("AC1", "running-example syntactic topics", ac1_running_example),
        ("AC2", "Levenshtein constants and oracle", ac2_levenshtein),
        ("AC3", "ranking law", ac3_ranking_law),
        ("AC4", "knee detection", ac4_knee),
        ("AC5", "generic-term filter", ac5_generic_filter),
        ("AC6", "enrichment", ac6_enrichment),
        ("AC7", "precision/recall metrics", ac7_metrics),
        ("AC8", "Fleiss' kappa", ac8_kappa),
        ("AC9", "baseline subsumption", ac9_subsumption),
        ("AC10", "determinism across workers", ac10_determinism),
        ("AC11", "sliding-window baseline", ac11_windows),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        match std::panic::catch_unwind(check) {
            Ok(Ok(detail)) => println!("[PASS] {id} {name}: {detail}"),
            Ok(Err(why)) => {
                failed += 1;
                println!("[FAIL] {id} {name}: {why}");
            }
            Err(_) => {
                failed += 1;
                println!("[FAIL] {id} {name}: panicked");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
