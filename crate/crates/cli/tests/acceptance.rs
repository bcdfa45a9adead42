//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and exits
//! non-zero when any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chrono::{NaiveDate, TimeZone, Utc};
use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use newsgraph_cli::cli::{execute, Cli};
use newsgraph_core::annotate::{
    annotate_quantities, parse_ntriples, property_predicate, schema_predicate, to_ntriples, AliasTable, Annotation,
    AnnotationKind, QuantityRules, Term, Triple, OWL_SAME_AS, WD,
};
use newsgraph_core::cluster::{
    cluster_event_types, flat_clusters, ward_linkage, Clustering, ClusteringConfig, CutMode, Recognizer,
};
use newsgraph_core::corpus::{parse_number, phrase_tokens, split_sentences, Corpus};
use newsgraph_core::kb::{event_keywords, ClaimKind, EventCollection, KbEvent};
use newsgraph_core::mapping::{
    evaluate, evaluate_pairs, map_article, subject_score, GoldStandard, Mapper, MappingContext, MappingResult, Window,
};
use newsgraph_core::stats::{
    build_imt_stats, build_imt_vocab_stats, build_wet_stats, tfidf_imt, tfidf_imt_vocab, tfidf_wet, ImtStats,
};
use newsgraph_core::store::{
    query_terms, Comparator, Pattern, PropertyFilter, SearchEngine, SearchQuery, ServiceSnapshot, TripleStore,
    MAX_PAGE_SIZE,
};

use common::*;

// Pinned tolerances and budgets.
const WEIGHT_TOL: f64 = 1e-12;
const STATS_BUDGET: Duration = Duration::from_secs(1);
const WARD_TOL: f64 = 1e-9;
const PURITY_MIN: f64 = 0.9;
const FIXED_CUT: f64 = 0.23;
const QUANTITY_TOL: f64 = 0.10;
const MAX_SENTENCE: usize = 5;
const SCORE_TOL: f64 = 1e-9;
const PIPELINE_BUDGET: Duration = Duration::from_secs(10);
const SEED: u64 = 0x5eed_2015;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn day(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

// ---------------------------------------------------------------- statistics

fn random_corpus(rng: &mut ChaCha8Rng) -> (Corpus, EventCollection, Vec<MappingResult>) {
    let vocab: Vec<String> = (0..12).map(|i| format!("t{i}")).collect();
    let imts: Vec<String> = (0..rng.gen_range(1..=5)).map(|i| format!("m{i}")).collect();
    let n = rng.gen_range(1..=20);
    let articles: Vec<_> = (0..n)
        .map(|i| {
            let codes: Vec<&str> = imts.iter().filter(|_| rng.gen_bool(0.5)).map(String::as_str).collect();
            let codes = if codes.is_empty() { vec![imts[0].as_str()] } else { codes };
            let paragraphs: Vec<String> = (0..rng.gen_range(1..4))
                .map(|_| {
                    (0..rng.gen_range(1..10))
                        .map(|_| vocab[rng.gen_range(0..vocab.len())].as_str())
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect();
            let refs: Vec<&str> = paragraphs.iter().map(String::as_str).collect();
            article(&format!("a{i:02}"), day(2015, 1, 1), &codes, &vocab[rng.gen_range(0..vocab.len())], &refs)
        })
        .collect();
    let wets = [("Q1", "w one"), ("Q2", "w two"), ("Q3", "w three"), ("Q4", "w four")];
    let events: Vec<KbEvent> = (0..rng.gen_range(1..=6))
        .map(|i| {
            let mut chosen: Vec<(&str, &str)> = wets.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
            if chosen.is_empty() {
                chosen.push(wets[rng.gen_range(0..wets.len())]);
            }
            event(&format!("Q{}", 100 + i), "e", &chosen, day(2015, 1, 1), &[], vec![])
        })
        .collect();
    let mut mappings = Vec::new();
    for a in &articles {
        if rng.gen_bool(0.6) {
            mappings.push(MappingResult {
                article_id: a.id.clone(),
                qid: events[rng.gen_range(0..events.len())].qid.clone(),
                score: 1.0,
                window: Window::All,
            });
        }
    }
    (Corpus::new(articles).unwrap(), EventCollection::new(events), mappings)
}

/// Whitespace tokens of every block; the generator writes bare lowercase words.
fn oracle_tokens(a: &newsgraph_core::corpus::NewsArticle) -> Vec<String> {
    std::iter::once(a.headline.as_str())
        .chain(a.paragraphs.iter().map(String::as_str))
        .flat_map(str::split_whitespace)
        .map(str::to_string)
        .collect()
}

fn idf_weight(tf: u32, total: usize, df: u32) -> f64 {
    if tf == 0 {
        0.0
    } else {
        tf as f64 * (total as f64 / df as f64).ln()
    }
}

fn check_one_corpus(corpus: &Corpus, events: &EventCollection, mappings: &[MappingResult], elapsed: &mut Duration) -> Result<(), String> {
    let started = Instant::now();
    let imt = build_imt_stats(corpus).map_err(|e| e.to_string())?;
    let wet = build_wet_stats(corpus, events, mappings);
    let vocab_stats = build_imt_vocab_stats(corpus, events, mappings);
    *elapsed += started.elapsed();

    let articles = corpus.articles();
    let tokens: Vec<Vec<String>> = articles.iter().map(oracle_tokens).collect();
    let vocab: BTreeSet<&String> = tokens.iter().flatten().collect();
    let imts: BTreeSet<&String> = articles.iter().flat_map(|a| &a.iptc_codes).collect();

    // media-topic family
    ensure!(imt.n_imts == imts.len(), "N: {} vs {}", imt.n_imts, imts.len());
    ensure!(imt.df.len() == vocab.len(), "token count {} vs {}", imt.df.len(), vocab.len());
    let mut tf_imt: BTreeMap<(&str, &str), u32> = BTreeMap::new();
    for tok in &vocab {
        for code in &imts {
            let mut tf = 0;
            for (a, toks) in articles.iter().zip(&tokens) {
                if a.iptc_codes.contains(*code) {
                    for t in toks {
                        if t == *tok {
                            tf += 1;
                        }
                    }
                }
            }
            ensure!(imt.tf(tok, code) == tf, "tf({tok},{code}) {} vs {tf}", imt.tf(tok, code));
            tf_imt.insert((tok.as_str(), code.as_str()), tf);
        }
        let df = imts.iter().filter(|c| tf_imt[&(tok.as_str(), c.as_str())] > 0).count() as u32;
        ensure!(imt.df(tok) == df, "df({tok}) {} vs {df}", imt.df(tok));
        for a in articles {
            let tf = a.iptc_codes.iter().map(|c| tf_imt[&(tok.as_str(), c.as_str())]).max().unwrap_or(0);
            let want = idf_weight(tf, imts.len(), df);
            let got = tfidf_imt(tok, &a.iptc_codes, &imt);
            ensure!((got - want).abs() <= WEIGHT_TOL, "tfidf_imt({tok},{}) {got} vs {want}", a.id);
        }
    }

    // event-type families
    let mut docs: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for m in mappings {
        let ev = events.get(&m.qid).unwrap();
        let idx = articles.iter().position(|a| a.id == m.article_id).unwrap();
        for w in ev.wet_qids() {
            let list = docs.entry(w).or_default();
            if !list.contains(&idx) {
                list.push(idx);
            }
        }
    }
    let m_total = docs.len();
    ensure!(wet.m == m_total, "M {} vs {m_total}", wet.m);
    ensure!(vocab_stats.m == m_total, "M' {} vs {m_total}", vocab_stats.m);
    for tok in &vocab {
        let per: Vec<u32> = docs
            .values()
            .map(|ids| ids.iter().map(|&i| tokens[i].iter().filter(|t| t == tok).count() as u32).sum())
            .collect();
        let df = per.iter().filter(|&&c| c > 0).count() as u32;
        ensure!(wet.df(tok) == df, "wet df({tok}) {} vs {df}", wet.df(tok));
        for ((w, _), tf) in docs.iter().zip(&per) {
            ensure!(wet.tf(tok, w) == *tf, "wet tf({tok},{w}) {} vs {tf}", wet.tf(tok, w));
            let (got, want) = (tfidf_wet(tok, w, &wet), idf_weight(*tf, m_total, df));
            ensure!((got - want).abs() <= WEIGHT_TOL, "tfidf_wet({tok},{w}) {got} vs {want}");
        }
    }
    for code in &imts {
        let per: Vec<u32> = docs
            .values()
            .map(|ids| ids.iter().filter(|&&i| articles[i].iptc_codes.contains(*code)).count() as u32)
            .collect();
        let df = per.iter().filter(|&&c| c > 0).count() as u32;
        ensure!(vocab_stats.df(code) == df, "imt-vocab df({code}) {} vs {df}", vocab_stats.df(code));
        for ((w, _), tf) in docs.iter().zip(&per) {
            ensure!(vocab_stats.tf(w, code) == *tf, "imt-vocab tf({w},{code})");
            let (got, want) = (tfidf_imt_vocab(code, w, &vocab_stats), idf_weight(*tf, m_total, df));
            ensure!((got - want).abs() <= WEIGHT_TOL, "tfidf_imt_vocab({code},{w}) {got} vs {want}");
        }
    }
    Ok(())
}

fn tfidf_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut elapsed = Duration::ZERO;
    let trials = 200;
    for trial in 0..trials {
        let (corpus, events, mappings) = random_corpus(&mut rng);
        check_one_corpus(&corpus, &events, &mappings, &mut elapsed).map_err(|e| format!("corpus {trial}: {e}"))?;
    }
    ensure!(elapsed < STATS_BUDGET, "building stats took {elapsed:?} (budget {STATS_BUDGET:?})");
    Ok(format!("{trials} corpora exact, stats built in {elapsed:.2?} total"))
}

// ------------------------------------------------------------------- mapping

/// Independent gate oracles.
fn oracle_date(created: NaiveDate, ev: &KbEvent) -> bool {
    let by_point = ev.point_in_time.is_some_and(|p| p <= created && created <= p.succ_opt().unwrap());
    let by_span = matches!((ev.start_time, ev.end_time), (Some(s), Some(e)) if s <= created && created <= e);
    by_point || by_span
}

fn alnum_words(s: &str) -> Vec<String> {
    s.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn oracle_location(body: &str, ev: &KbEvent, aliases: &AliasTable) -> bool {
    let words = alnum_words(body);
    ev.countries.iter().chain(&ev.locations).flat_map(|p| aliases.variants(p)).any(|variant| {
        let needle = alnum_words(&variant);
        !needle.is_empty() && words.windows(needle.len()).any(|w| w == needle.as_slice())
    })
}

struct GateCase {
    article: newsgraph_core::corpus::NewsArticle,
    event: KbEvent,
    date_ok: bool,
    loc_ok: bool,
}

fn adversarial_cases() -> Vec<GateCase> {
    let pit = day(2015, 3, 24);
    let (start, end) = (day(2015, 3, 10), day(2015, 3, 20));
    // (created date, h, m, point event?, expected)
    let dates: [(NaiveDate, u32, u32, bool, bool); 10] = [
        (day(2015, 3, 23), 23, 59, true, false),
        (day(2015, 3, 24), 0, 0, true, true),
        (day(2015, 3, 24), 23, 59, true, true),
        (day(2015, 3, 25), 0, 0, true, true),
        (day(2015, 3, 25), 23, 59, true, true),
        (day(2015, 3, 26), 0, 0, true, false),
        (day(2015, 3, 9), 23, 59, false, false),
        (day(2015, 3, 10), 0, 0, false, true),
        (day(2015, 3, 20), 23, 59, false, true),
        (day(2015, 3, 21), 0, 0, false, false),
    ];
    // (event place, article sentence, expected)
    let places: [(&str, &str, bool); 5] = [
        ("Nice", "The crash response was nicely handled.", false),
        ("Iran", "Iranian officials described the crash.", false),
        ("New Zealand", "New Zealand's officials described the crash.", true),
        ("Oman", "A woman survived the crash.", false),
        ("United Kingdom", "The crash shocked Britain.", true),
    ];
    let mut cases = Vec::new();
    for (i, (d, h, m, point, date_ok)) in dates.iter().enumerate() {
        for (j, (place, sentence, loc_ok)) in places.iter().enumerate() {
            let mut a = article(
                &format!("g{i}{j}"),
                *d,
                &["imtA"],
                "Crash report",
                &[&format!("{sentence} Another crash was reported.")],
            );
            a.created = Utc.from_utc_datetime(&d.and_hms_opt(*h, *m, 0).unwrap());
            let mut ev = event(&format!("Q{}", 500 + i * 10 + j), "crash", &[("Q9", "crash")], pit, &[place], vec![]);
            if !point {
                ev.point_in_time = None;
                ev.start_time = Some(start);
                ev.end_time = Some(end);
            }
            cases.push(GateCase {
                article: a,
                event: ev,
                date_ok: *date_ok,
                loc_ok: *loc_ok,
            });
        }
    }
    cases
}

fn gate_aliases() -> AliasTable {
    AliasTable::from_json(r#"{"United Kingdom": ["Britain"]}"#).unwrap()
}

fn crash_stats() -> ImtStats {
    let mut stats = ImtStats {
        n_imts: 2,
        ..Default::default()
    };
    stats.tf.insert("crash".into(), [("imtA".to_string(), 5)].into_iter().collect());
    stats.df.insert("crash".into(), 1);
    stats
}

fn mapping_gates() -> Outcome {
    let cases = adversarial_cases();
    ensure!(cases.len() == 50, "expected 50 adversarial cases, built {}", cases.len());
    let aliases = gate_aliases();
    let stats = crash_stats();
    let keywords: HashMap<String, _> = cases.iter().map(|c| (c.event.qid.clone(), event_keywords(&c.event))).collect();
    let ctx = MappingContext {
        stats: &stats,
        keywords: &keywords,
        aliases: &aliases,
    };

    // one candidate per case: emitted exactly when both hand-labelled gates hold
    for c in &cases {
        let text = split_sentences(&c.article);
        let body = c.article.paragraphs.join(" ");
        ensure!(
            oracle_date(c.article.created_date(), &c.event) == c.date_ok,
            "{}: date oracle disagrees with label",
            c.article.id
        );
        ensure!(oracle_location(&body, &c.event, &aliases) == c.loc_ok, "{}: location oracle disagrees", c.article.id);
        let got = map_article(&c.article, &text, &[&c.event], &ctx, 0.04, Window::All);
        ensure!(
            got.is_some() == (c.date_ok && c.loc_ok),
            "{}: mapped={} but date_ok={} loc_ok={}",
            c.article.id,
            got.is_some(),
            c.date_ok,
            c.loc_ok
        );
    }

    // every case against every event through the date index
    let corpus = Corpus::new(cases.iter().map(|c| c.article.clone()).collect()).unwrap();
    let events = EventCollection::new(cases.iter().map(|c| c.event.clone()).collect());
    let mapper = Mapper::new(&events, &stats, &aliases);
    let mut emitted = 0;
    for w in Window::ALL_WINDOWS {
        for m in mapper.map_corpus(&corpus, 0.04, w) {
            let (a, _) = corpus.get(&m.article_id).unwrap();
            let ev = events.get(&m.qid).unwrap();
            ensure!(oracle_date(a.created_date(), ev), "{} -> {} fails the date gate", m.article_id, m.qid);
            ensure!(
                oracle_location(&a.paragraphs.join(" "), ev, &aliases),
                "{} -> {} fails the location gate",
                m.article_id,
                m.qid
            );
            emitted += 1;
        }
    }

    // monotonicity on random pairs
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let words = ["crash", "plane", "vote", "quake", "storm", "fire", "summit", "police"];
    let pairs = 1000;
    for i in 0..pairs {
        let sentences: Vec<String> = (0..rng.gen_range(1..9))
            .map(|_| {
                let s: Vec<&str> = (0..rng.gen_range(2..7)).map(|_| words[rng.gen_range(0..words.len())]).collect();
                format!("{} in France.", s.join(" "))
            })
            .collect();
        let codes = ["x1", "x2", "x3"];
        let target = article("p", day(2015, 3, 24), &[codes[rng.gen_range(0..3)]], "Report", &[&sentences.join(" ")]);
        let mut background: Vec<_> = (0..5)
            .map(|k| {
                let s: Vec<&str> = (0..6).map(|_| words[rng.gen_range(0..words.len())]).collect();
                article(&format!("b{k}"), day(2015, 3, 24), &[codes[rng.gen_range(0..3)]], "x", &[&s.join(" ")])
            })
            .collect();
        background.push(target.clone());
        let stats = build_imt_stats(&Corpus::new(background).unwrap()).unwrap();
        let label = format!("{} {}", words[rng.gen_range(0..words.len())], words[rng.gen_range(0..words.len())]);
        let ev = event("Q77", &label, &[("Q9", "event")], day(2015, 3, 24), &["France"], vec![]);
        let kw = event_keywords(&ev);
        let keywords: HashMap<String, _> = [(ev.qid.clone(), kw.clone())].into_iter().collect();
        let no_aliases = AliasTable::default();
        let ctx = MappingContext {
            stats: &stats,
            keywords: &keywords,
            aliases: &no_aliases,
        };
        let text = split_sentences(&target);
        let scores: Vec<f64> = Window::ALL_WINDOWS
            .iter()
            .map(|&w| subject_score(&target, &text, &kw, &stats, w))
            .collect();
        ensure!(scores[0] <= scores[1] && scores[1] <= scores[2], "pair {i}: window scores {scores:?} not nested");
        let t_hi = rng.gen_range(0.0..2.0);
        let t_lo = rng.gen_range(0.0..t_hi);
        for w in Window::ALL_WINDOWS {
            let hi = map_article(&target, &text, &[&ev], &ctx, t_hi, w).is_some();
            let lo = map_article(&target, &text, &[&ev], &ctx, t_lo, w).is_some();
            ensure!(!hi || lo, "pair {i}: mapped at {t_hi} but not at lower {t_lo}");
        }
        let mapped: Vec<bool> = Window::ALL_WINDOWS
            .iter()
            .map(|&w| map_article(&target, &text, &[&ev], &ctx, t_lo, w).is_some())
            .collect();
        ensure!((!mapped[0] || mapped[1]) && (!mapped[1] || mapped[2]), "pair {i}: window monotonicity {mapped:?}");
    }
    Ok(format!("50 adversarial cases exact, {emitted} indexed mappings all pass both gates, {pairs} random pairs monotone"))
}

// ---------------------------------------------------------------- evaluation

fn mr(article: &str, qid: &str, window: Window) -> MappingResult {
    MappingResult {
        article_id: article.into(),
        qid: qid.into(),
        score: 1.0,
        window,
    }
}

fn evaluation_harness() -> Outcome {
    let gold = |pairs: &[(&str, &str)]| GoldStandard::new(pairs.iter().map(|(a, q)| (a.to_string(), q.to_string())));
    // (gold, predictions, expected P, R, F1)
    let cases: Vec<(GoldStandard, Vec<MappingResult>, [f64; 3])> = vec![
        (
            gold(&[("a1", "Q1"), ("a2", "Q2")]),
            vec![mr("a1", "Q1", Window::All), mr("a2", "Q3", Window::All)],
            [0.5, 0.5, 0.5],
        ),
        (
            gold(&[("a1", "Q1"), ("a2", "Q2"), ("a3", "Q3"), ("a4", "Q4")]),
            vec![mr("a1", "Q1", Window::All), mr("a2", "Q2", Window::All), mr("a3", "Q3", Window::All)],
            [1.0, 0.75, 6.0 / 7.0],
        ),
        (
            gold(&[("a1", "Q1"), ("a2", "Q2")]),
            vec![
                mr("a1", "Q1", Window::All),
                mr("a2", "Q5", Window::All),
                mr("a3", "Q3", Window::All),
                mr("a4", "Q4", Window::All),
            ],
            [0.25, 0.5, 1.0 / 3.0],
        ),
        (gold(&[("a1", "Q1")]), vec![mr("a1", "Q2", Window::All)], [0.0, 0.0, 0.0]),
    ];
    for (i, (g, preds, want)) in cases.iter().enumerate() {
        let s = evaluate_pairs(preds.iter().map(|p| (p.article_id.as_str(), p.qid.as_str())), g).map_err(|e| e.to_string())?;
        let got = [s.precision, s.recall, s.f1];
        for k in 0..3 {
            ensure!((got[k] - want[k]).abs() <= WEIGHT_TOL, "case {i}: got {got:?}, want {want:?}");
        }
        ensure!(s.tp + s.fp == preds.len() && s.tp + s.fn_ == g.len(), "case {i}: inconsistent counts");
    }

    let g = gold(&[("a1", "Q1"), ("a2", "Q2")]);
    let preds = vec![
        mr("a1", "Q1", Window::First3),
        mr("a1", "Q1", Window::First5),
        mr("a2", "Q2", Window::First5),
        mr("a1", "Q1", Window::All),
        mr("a2", "Q3", Window::All),
    ];
    let report = evaluate(&preds, &g).map_err(|e| e.to_string())?;
    let windows: Vec<Window> = report.windows.keys().copied().collect();
    ensure!(windows == Window::ALL_WINDOWS, "report windows {windows:?}");
    let s3 = report.windows[&Window::First3];
    ensure!((s3.precision, s3.recall) == (1.0, 0.5), "window 3 scores {s3:?}");
    let table = report.to_table();
    let lines: Vec<&str> = table.lines().collect();
    ensure!(lines.len() == 4, "table has {} lines", lines.len());
    ensure!(lines[0] == "# sentences | Precision | Recall | F1-score", "header {:?}", lines[0]);
    for (line, w) in lines[1..].iter().zip(["3", "5", "all"]) {
        ensure!(line.split('|').next().unwrap().trim() == w, "row {line:?}");
        ensure!(line.split('|').count() == 4, "row {line:?}");
    }
    Ok("4 confusion sets exact; report rows 3/5/all".into())
}

// ---------------------------------------------------------------- ward

/// Recomputes every candidate distance from the original matrix at each step.
fn brute_ward(d: &[Vec<f64>], keys: &[String]) -> Vec<(Vec<usize>, Vec<usize>, f64)> {
    let mut clusters: Vec<Vec<usize>> = (0..d.len()).map(|i| vec![i]).collect();
    let key = |c: &Vec<usize>| c.iter().map(|&i| keys[i].as_str()).min().unwrap().to_string();
    let mean = |a: &[usize], b: &[usize]| {
        let s: f64 = a.iter().flat_map(|&i| b.iter().map(move |&j| (i, j))).map(|(i, j)| d[i][j]).sum();
        s / (a.len() * b.len()) as f64
    };
    let mut out = Vec::new();
    while clusters.len() > 1 {
        let mut best: Option<(f64, String, String, usize, usize)> = None;
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let (a, b) = (&clusters[i], &clusters[j]);
                let (na, nb) = (a.len() as f64, b.len() as f64);
                let dist = na * nb / (na + nb) * (2.0 * mean(a, b) - mean(a, a) - mean(b, b));
                let (ka, kb) = (key(a), key(b));
                let (lo, hi, li, hj) = if ka <= kb { (ka, kb, i, j) } else { (kb, ka, j, i) };
                let better = match &best {
                    None => true,
                    Some(bst) => {
                        let by_dist = (dist - bst.0).abs() > WARD_TOL * 1e-3;
                        if by_dist {
                            dist < bst.0
                        } else {
                            (lo.as_str(), hi.as_str()) < (bst.1.as_str(), bst.2.as_str())
                        }
                    }
                };
                if better {
                    best = Some((dist, lo, hi, li, hj));
                }
            }
        }
        let (dist, _, _, i, j) = best.unwrap();
        let (a, b) = (clusters[i].clone(), clusters[j].clone());
        let mut joined = a.clone();
        joined.extend(&b);
        joined.sort_unstable();
        let (lo, hi) = (i.min(j), i.max(j));
        clusters.remove(hi);
        clusters.remove(lo);
        clusters.push(joined);
        out.push((a, b, dist));
    }
    out
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; n]; n];
    // occasional exact ties exercise the key tie-break
    let levels = [0.2, 0.4, 0.6];
    for i in 0..n {
        for j in i + 1..n {
            let v = if rng.gen_bool(0.1) { levels[rng.gen_range(0..3)] } else { rng.gen_range(0.0..1.5) };
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

fn ward_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let trials = 100;
    let mut merges = 0;
    for t in 0..trials {
        let n = rng.gen_range(2..=20);
        let d = random_matrix(&mut rng, n);
        let keys: Vec<String> = (0..n).map(|i| format!("Q{i:03}")).collect();
        let dendro = ward_linkage(&d, &keys).map_err(|e| e.to_string())?;
        let members = dendro.members();
        let want = brute_ward(&d, &keys);
        ensure!(dendro.merges.len() == want.len(), "matrix {t}: merge count");
        for (step, (m, (a, b, dist))) in dendro.merges.iter().zip(&want).enumerate() {
            let (ga, gb) = (&members[m.a], &members[m.b]);
            ensure!(ga == a && gb == b, "matrix {t} step {step}: merged {ga:?}+{gb:?}, oracle {a:?}+{b:?}");
            ensure!(
                (m.distance - dist).abs() <= WARD_TOL,
                "matrix {t} step {step}: height {} vs {dist}",
                m.distance
            );
        }
        merges += want.len();
    }
    Ok(format!("{trials} matrices, {merges} merges identical within {WARD_TOL:e}"))
}

// ---------------------------------------------------------------- planted clusters

const FAMILIES: [[&str; 6]; 5] = [
    ["plane crash", "aviation accident", "mid-air collision", "airliner crash", "jet crash", "flight accident"],
    ["federal election", "municipal elections", "presidential election", "local election", "election", "municipal election"],
    ["summit", "summit meeting", "NATO summit", "G20 summit", "meeting", "2016 summit"],
    ["earthquake", "quake", "earthquake in New Zealand", "2015 Nepal earthquake", "Chile earthquake", "quake in Chile"],
    ["civil war", "war", "Syrian civil war", "war in Yemen", "civil war in Libya", "2011 war"],
];

/// 30 event types in five families; each family has its own vocabulary and topics.
fn planted(rng: &mut ChaCha8Rng) -> (Corpus, EventCollection, Vec<MappingResult>, BTreeMap<String, usize>) {
    let shared: Vec<String> = (0..20).map(|i| format!("common{i}")).collect();
    let mut articles = Vec::new();
    let mut events = Vec::new();
    let mut mappings = Vec::new();
    let mut family_of = BTreeMap::new();
    for (f, labels) in FAMILIES.iter().enumerate() {
        let pool: Vec<String> = (0..12).map(|i| format!("fam{f}word{i}")).collect();
        for (k, label) in labels.iter().enumerate() {
            let wet = format!("Q{}", 7000 + f * 10 + k);
            family_of.insert(wet.clone(), f);
            let qid = format!("Q{}", 8000 + f * 10 + k);
            events.push(event(&qid, label, &[(&wet, label)], day(2015, 1, 1), &[], vec![]));
            for n in 0..3 {
                let words: Vec<&str> = (0..30)
                    .map(|_| {
                        if rng.gen_bool(0.6) {
                            pool[rng.gen_range(0..pool.len())].as_str()
                        } else {
                            shared[rng.gen_range(0..shared.len())].as_str()
                        }
                    })
                    .collect();
                let id = format!("{wet}-{n}");
                let topic = format!("topic{f}");
                let noise = format!("noise{}", rng.gen_range(0..4));
                articles.push(article(&id, day(2015, 1, 1), &[&topic, &noise], "report", &[&words.join(" ")]));
                mappings.push(MappingResult {
                    article_id: id,
                    qid: qid.clone(),
                    score: 1.0,
                    window: Window::All,
                });
            }
        }
    }
    (Corpus::new(articles).unwrap(), EventCollection::new(events), mappings, family_of)
}

fn purity(clustering: &Clustering, family_of: &BTreeMap<String, usize>) -> f64 {
    let total: usize = clustering.schemas.iter().map(|s| s.wets.len()).sum();
    let majority: usize = clustering
        .schemas
        .iter()
        .map(|s| {
            let mut counts = [0usize; 5];
            for w in &s.wets {
                counts[family_of[w]] += 1;
            }
            counts.into_iter().max().unwrap()
        })
        .sum();
    majority as f64 / total as f64
}

fn planted_clusters() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    let (corpus, events, mappings, family_of) = planted(&mut rng);
    let table = fixture_embeddings();
    let wet_stats = build_wet_stats(&corpus, &events, &mappings);
    let vocab = build_imt_vocab_stats(&corpus, &events, &mappings);
    let recognizer = Recognizer::shipped();
    let elbow = cluster_event_types(&events, &table, recognizer, &wet_stats, &vocab, &ClusteringConfig::default())
        .map_err(|e| e.to_string())?;
    ensure!(elbow.excluded.is_empty(), "excluded WETs: {:?}", elbow.excluded);
    ensure!(elbow.dendrogram.leaves.len() == 30, "{} leaves", elbow.dendrogram.leaves.len());
    let p = purity(&elbow, &family_of);
    ensure!(elbow.knee_found, "elbow search found no knee");
    ensure!(p >= PURITY_MIN, "purity {p:.3} < {PURITY_MIN} with {} clusters", elbow.schemas.len());

    let fixed_config = ClusteringConfig {
        cut: CutMode::Fixed,
        threshold: FIXED_CUT,
        ..ClusteringConfig::default()
    };
    let fixed = cluster_event_types(&events, &table, recognizer, &wet_stats, &vocab, &fixed_config)
        .map_err(|e| e.to_string())?;
    ensure!(fixed.cut == CutMode::Fixed && fixed.threshold == FIXED_CUT, "fixed cut at {}", fixed.threshold);
    check_fixed_partition(&fixed)?;

    // the same path through the command line on the fixture corpus
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_fixture_pipeline(dir.path());
    let cli = Cli::try_parse_from([
        "newsgraph",
        "--config",
        fixtures_dir().join("pipeline.toml").to_str().unwrap(),
        "--workdir",
        dir.path().to_str().unwrap(),
        "cluster",
        "--cut",
        "fixed",
        "--fixed-threshold",
        "0.23",
    ])
    .map_err(|e| e.to_string())?;
    execute(cli).map_err(|e| format!("{e:#}"))?;
    let via_cli: Clustering = newsgraph_core::snapshot::read(&dir.path().join("clustering.json"), "clustering")
        .map_err(|e| e.to_string())?;
    ensure!(via_cli.cut == CutMode::Fixed && via_cli.threshold == FIXED_CUT, "cli cut at {}", via_cli.threshold);
    check_fixed_partition(&via_cli)?;
    Ok(format!(
        "elbow purity {p:.3} with {} clusters at {:.3}; fixed cut at exactly {FIXED_CUT} ({} clusters)",
        elbow.schemas.len(),
        elbow.threshold,
        fixed.schemas.len()
    ))
}

/// Groups must be the connected components of merges at or below the threshold.
fn check_fixed_partition(c: &Clustering) -> Result<(), String> {
    let d = &c.dendrogram;
    let applied = d.merges.iter().filter(|m| m.distance <= FIXED_CUT).count();
    let groups = flat_clusters(d, FIXED_CUT);
    ensure!(groups.len() == d.leaves.len() - applied, "{} groups for {applied} applied merges", groups.len());
    ensure!(c.schemas.len() == groups.len(), "schemas {} vs groups {}", c.schemas.len(), groups.len());
    let members = d.members();
    let group_of: BTreeMap<usize, usize> =
        groups.iter().enumerate().flat_map(|(g, ls)| ls.iter().map(move |&l| (l, g))).collect();
    for m in &d.merges {
        let joined = group_of[&members[m.a][0]] == group_of[&members[m.b][0]];
        ensure!(joined == (m.distance <= FIXED_CUT), "merge at {} applied={joined}", m.distance);
    }
    Ok(())
}

// ---------------------------------------------------------------- annotation

fn germanwings_annotations(shared: &SharedRun) -> Outcome {
    let nt = fs::read_to_string(shared.a.join("graph.nt")).map_err(|e| e.to_string())?;
    let triples = parse_ntriples(&nt).map_err(|e| e.to_string())?;
    let node = Term::iri(format!("{BASE}/event/{GERMANWINGS_ID}"));
    let objects = |pred: &str| -> Vec<Term> {
        triples
            .iter()
            .filter(|t| t.subject == node && t.predicate == Term::iri(pred))
            .map(|t| t.object.clone())
            .collect()
    };
    let same_as = objects(OWL_SAME_AS);
    ensure!(same_as == [Term::iri(format!("{WD}{GERMANWINGS_QID}"))], "sameAs {same_as:?}");
    let victims = objects(&property_predicate("P1120"));
    ensure!(victims == [Term::literal("150")], "P1120 {victims:?}");
    let schema = objects(&schema_predicate());
    let clustering: Clustering =
        newsgraph_core::snapshot::read(&shared.a.join("clustering.json"), "clustering").map_err(|e| e.to_string())?;
    let expected = clustering
        .schemas
        .iter()
        .find(|s| s.wets.iter().any(|w| w == AVIATION_ACCIDENT))
        .map(|s| s.schema_id.clone())
        .ok_or("aviation accident is in no schema")?;
    ensure!(schema == [Term::literal(expected.clone())], "schema tag {schema:?}, expected {expected}");

    let annotations: Vec<Annotation> =
        newsgraph_core::snapshot::read(&shared.a.join("annotations.json"), "annotations").map_err(|e| e.to_string())?;
    let snap: ServiceSnapshot =
        newsgraph_core::snapshot::read(&shared.a.join("service.json"), "service").map_err(|e| e.to_string())?;
    let gw = snap.articles.iter().find(|a| a.id == GERMANWINGS_ID).ok_or("no Germanwings article")?;
    let text = split_sentences(gw);
    let p1120 = annotations
        .iter()
        .find(|a| a.article_id == GERMANWINGS_ID && a.pid == "P1120")
        .ok_or("no P1120 annotation")?;
    ensure!(&text.text[p1120.span.clone()] == "150" && p1120.sentence < MAX_SENTENCE, "P1120 span {:?}", p1120);

    // reparse of the exported graph, and of adversarial literals
    ensure!(triples == snap.triples, "graph.nt does not reparse to the exported triples");
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let alphabet = ['a', 'Z', '0', ' ', '"', '\\', '\n', '\r', '\t', 'é', '中', '😀', '<', '>', '\u{7}', '#', '.'];
    let fuzzed: Vec<Triple> = (0..500)
        .map(|i| {
            let s: String = (0..rng.gen_range(0..24)).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect();
            let object = match i % 3 {
                0 => Term::literal(s),
                1 => Term::lang(s, "en-GB"),
                _ => Term::typed(s, "http://www.w3.org/2001/XMLSchema#string"),
            };
            Triple::new(Term::iri(format!("{BASE}/x/{i}")), "http://example.org/p", object)
        })
        .collect();
    let back = parse_ntriples(&to_ntriples(&fuzzed)).map_err(|e| e.to_string())?;
    ensure!(back == fuzzed, "fuzzed literals do not round-trip");

    let (checked, annotated) = fuzz_quantities()?;
    Ok(format!(
        "sameAs {GERMANWINGS_QID}, P1120 \"150\", schema {expected}; {} triples reparse; {checked} fuzzed articles ({annotated} quantity annotations) within rules",
        triples.len()
    ))
}

fn fuzz_quantities() -> Result<(usize, usize), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let table = fixture_embeddings();
    let rules = QuantityRules {
        tolerance: QUANTITY_TOL,
        max_sentences: MAX_SENTENCE,
    };
    let contexts = ["people were killed", "passengers on board", "magnitude quake struck", "officials said", "voters"];
    let mut annotated = 0;
    let n = 500;
    for i in 0..n {
        let deaths = rng.gen_range(2..2000) as f64;
        let magnitude = (rng.gen_range(40..90) as f64) / 10.0;
        let ev = event(
            "Q1",
            "disaster",
            &[("Q2", "disaster")],
            day(2015, 1, 1),
            &[],
            vec![quantity("P1120", "number of deaths", deaths), quantity("P2528", "magnitude", magnitude)],
        );
        let sentences: Vec<String> = (0..rng.gen_range(1..10))
            .map(|_| {
                let v = match rng.gen_range(0..4) {
                    0 => deaths * rng.gen_range(0.85..1.15),
                    1 => magnitude * rng.gen_range(0.85..1.15),
                    2 => rng.gen_range(0.0..3000.0),
                    _ => deaths,
                };
                let shown = if v < 10.0 { format!("{:.1}", v) } else { format!("{}", v.round()) };
                format!("Reports say {shown} {}.", contexts[rng.gen_range(0..contexts.len())])
            })
            .collect();
        let a = article(&format!("f{i}"), day(2015, 1, 1), &["c"], "Update", &[&sentences.join(" ")]);
        let text = split_sentences(&a);
        let out = annotate_quantities(&a, &text, &ev, &table, rules);
        let mut seen = BTreeSet::new();
        for ann in &out {
            ensure!(ann.kind == AnnotationKind::Quantity, "article {i}: non-quantity annotation");
            ensure!(ann.sentence < MAX_SENTENCE, "article {i}: sentence {}", ann.sentence);
            ensure!(text.text[ann.span.clone()] == ann.surface, "article {i}: span/surface mismatch");
            ensure!(seen.insert(ann.pid.clone()), "article {i}: two annotations for {}", ann.pid);
            let v = parse_number(&newsgraph_core::corpus::normalize(&ann.surface)).ok_or("surface is not a number")?;
            let ok = ev.claims.iter().filter(|c| c.pid == ann.pid).filter_map(|c| c.quantity()).any(|c| {
                (v - c).abs() <= QUANTITY_TOL * c.abs() * (1.0 + 1e-12)
            });
            ensure!(ok, "article {i}: {} = {v} outside tolerance", ann.pid);
        }
        // completeness: a property is annotated whenever an eligible number exists
        for claim in &ev.claims {
            let c = claim.quantity().unwrap();
            let eligible = text
                .window(Some(MAX_SENTENCE))
                .iter()
                .filter_map(|t| t.number())
                .any(|v| (v - c).abs() <= QUANTITY_TOL * c.abs() * (1.0 + 1e-12));
            ensure!(
                eligible == seen.contains(&claim.pid),
                "article {i}: {} eligible={eligible} annotated={}",
                claim.pid,
                seen.contains(&claim.pid)
            );
        }
        annotated += out.len();
    }
    Ok((n, annotated))
}

// ---------------------------------------------------------------- search

fn literal_number(t: &Term) -> Option<f64> {
    t.lexical()?.parse().ok()
}

/// Linear-scan evaluation of a query over the raw snapshot.
fn brute_search(snap: &ServiceSnapshot, corpus: &Corpus, q: &SearchQuery) -> Vec<(String, f64)> {
    let n = corpus.len() as f64;
    let terms = q.keywords.as_deref().map(query_terms).unwrap_or_default();
    let toks: BTreeMap<&str, Vec<String>> =
        corpus.iter().map(|(a, t)| (a.id.as_str(), t.tokens.iter().map(|x| x.normalized.clone()).collect())).collect();
    let df = |term: &str| toks.values().filter(|v| v.iter().any(|x| x == term)).count() as f64;

    let mut by_subject: HashMap<&Term, Vec<&Triple>> = HashMap::new();
    for t in &snap.triples {
        by_subject.entry(&t.subject).or_default().push(t);
    }
    let objects = |node: &Term, pred: &str| -> Vec<Term> {
        let pred = Term::iri(pred);
        by_subject
            .get(node)
            .into_iter()
            .flatten()
            .filter(|t| t.predicate == pred)
            .map(|t| t.object.clone())
            .collect()
    };
    let about = newsgraph_core::annotate::about_predicate();
    let node_of = |id: &str| -> Option<Term> {
        let news = Term::iri(newsgraph_core::annotate::article_iri(&snap.base, id));
        objects(&news, &about).into_iter().next()
    };
    let kinds: BTreeMap<&str, ClaimKind> =
        snap.events.iter().flat_map(|e| e.claims.iter().map(|c| (c.pid.as_str(), c.kind()))).collect();

    let mut out = Vec::new();
    for (a, _) in corpus.iter() {
        let words = &toks[a.id.as_str()];
        let mut score = 0.0;
        if !terms.is_empty() {
            if !terms.iter().all(|t| words.contains(t)) {
                continue;
            }
            for t in &terms {
                let tf = words.iter().filter(|w| *w == t).count() as f64;
                score += tf * (n / df(t)).ln();
            }
        }
        let d = a.created_date();
        if q.from.is_some_and(|f| d < f) || q.to.is_some_and(|t| d > t) {
            continue;
        }
        let node = node_of(&a.id);
        let qid = node
            .as_ref()
            .and_then(|n| objects(n, OWL_SAME_AS).first().and_then(|o| o.as_iri().map(|s| s.trim_start_matches(WD).to_string())));
        if let Some(loc) = &q.location {
            let phrase = phrase_tokens(loc);
            let in_words = words.windows(phrase.len()).any(|w| w == phrase.as_slice());
            let in_dateline = a.dateline.as_deref().is_some_and(|dl| {
                let dw = phrase_tokens(dl);
                dw.windows(phrase.len()).any(|w| w == phrase.as_slice())
            });
            let in_event = qid
                .as_deref()
                .and_then(|q| snap.events.iter().find(|e| e.qid == q))
                .is_some_and(|e| e.countries.iter().chain(&e.locations).any(|l| phrase_tokens(l) == phrase));
            if !(in_words || in_dateline || in_event) {
                continue;
            }
        }
        if let Some(s) = &q.schema {
            let tagged = node.as_ref().is_some_and(|n| objects(n, &schema_predicate()) == [Term::literal(s.clone())]);
            if !tagged {
                continue;
            }
        }
        let passes = q.filters.iter().all(|f| {
            let Some(n) = &node else { return false };
            objects(n, &property_predicate(&f.pid)).iter().any(|o| {
                if kinds.get(f.pid.as_str()) == Some(&ClaimKind::Quantity) {
                    let (Some(v), Ok(x)) = (literal_number(o), f.value.parse::<f64>()) else { return false };
                    match f.op {
                        Comparator::Eq => v == x,
                        Comparator::Gte => v >= x,
                        Comparator::Lte => v <= x,
                    }
                } else {
                    o.lexical().is_some_and(|l| l.to_lowercase() == f.value.to_lowercase())
                }
            })
        });
        if passes {
            out.push((a.id.clone(), score));
        }
    }
    out
}

fn random_query(rng: &mut ChaCha8Rng) -> SearchQuery {
    let mut q = SearchQuery::default();
    if rng.gen_bool(0.6) {
        let k = rng.gen_range(1..3);
        let words: Vec<&str> = (0..k).map(|_| WORDS[rng.gen_range(0..WORDS.len())]).collect();
        q.keywords = Some(if rng.gen_bool(0.05) { "zzyzx".into() } else { words.join(" ") });
    }
    if rng.gen_bool(0.3) {
        let from = day(2015, 3, 1) + chrono::Duration::days(rng.gen_range(0..20));
        q.from = Some(from);
        q.to = Some(from + chrono::Duration::days(rng.gen_range(0..10)));
    }
    if rng.gen_bool(0.3) {
        q.location = Some(COUNTRIES[rng.gen_range(0..COUNTRIES.len())].to_string());
    }
    if rng.gen_bool(0.3) {
        q.schema = Some(format!("S{}", rng.gen_range(1..=3)));
    }
    if rng.gen_bool(0.4) {
        let op = [Comparator::Gte, Comparator::Lte, Comparator::Eq][rng.gen_range(0..3)];
        q.filters.push(PropertyFilter {
            pid: "P1120".into(),
            op,
            value: rng.gen_range(1..400).to_string(),
        });
    }
    if rng.gen_bool(0.2) {
        q.filters.push(PropertyFilter {
            pid: "P17".into(),
            op: Comparator::Eq,
            value: COUNTRIES[rng.gen_range(0..COUNTRIES.len())].to_lowercase(),
        });
    }
    q.size = MAX_PAGE_SIZE;
    q
}

fn all_pages(engine: &SearchEngine, q: &SearchQuery, size: usize) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut page = 1;
    loop {
        let r = engine
            .search(&SearchQuery {
                page,
                size,
                ..q.clone()
            })
            .map_err(|e| e.to_string())?;
        if r.hits.is_empty() {
            ensure!(out.len() == r.total, "pages hold {} hits, total says {}", out.len(), r.total);
            return Ok(out);
        }
        out.extend(r.hits.into_iter().map(|h| h.article_id));
        page += 1;
    }
}

fn random_store_checks() -> Result<(usize, usize), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let mut queries = 0;
    let mut max_triples = 0;
    for trial in 0..12 {
        let n = rng.gen_range(5..=200);
        let snap = random_snapshot(&mut rng, n);
        ensure!(snap.triples.len() <= 10_000, "trial {trial}: {} triples", snap.triples.len());
        max_triples = max_triples.max(snap.triples.len());
        let engine = SearchEngine::from_snapshot(snap.clone()).map_err(|e| e.to_string())?;
        let corpus = Corpus::new(snap.articles.clone()).unwrap();

        // triple patterns against a linear scan
        let mut store = TripleStore::new();
        store.insert_all(&snap.triples).map_err(|e| e.to_string())?;
        store.freeze();
        for _ in 0..30 {
            let probe = &snap.triples[rng.gen_range(0..snap.triples.len())];
            let (s, p, o) = (
                rng.gen_bool(0.5).then_some(&probe.subject),
                rng.gen_bool(0.5).then_some(&probe.predicate),
                rng.gen_bool(0.5).then_some(&probe.object),
            );
            let mut want: Vec<Triple> = snap
                .triples
                .iter()
                .filter(|t| s.is_none_or(|x| &t.subject == x) && p.is_none_or(|x| &t.predicate == x) && o.is_none_or(|x| &t.object == x))
                .cloned()
                .collect();
            want.sort();
            want.dedup();
            // the store orders by interned id, so compare as sorted lists
            let mut got = store.matches(Pattern {
                subject: s,
                predicate: p,
                object: o,
            });
            got.sort();
            ensure!(got == want, "trial {trial}: pattern match differs from scan");
        }

        for _ in 0..40 {
            let q = random_query(&mut rng);
            let mut want = brute_search(&snap, &corpus, &q);
            let full = all_pages(&engine, &q, MAX_PAGE_SIZE)?;
            let first = engine.search(&q).map_err(|e| e.to_string())?;
            ensure!(first.total == want.len(), "trial {trial}: {q:?} total {} vs brute {}", first.total, want.len());
            let got: BTreeSet<&String> = full.iter().collect();
            let expected: BTreeSet<&String> = want.iter().map(|(id, _)| id).collect();
            ensure!(got == expected, "trial {trial}: {q:?} result sets differ");
            // order: score desc, newer first, then id
            let created: BTreeMap<&str, _> = snap.articles.iter().map(|a| (a.id.as_str(), a.created)).collect();
            want.sort_by(|x, y| {
                if (x.1 - y.1).abs() > SCORE_TOL {
                    y.1.total_cmp(&x.1)
                } else {
                    created[y.0.as_str()].cmp(&created[x.0.as_str()]).then_with(|| x.0.cmp(&y.0))
                }
            });
            let brute_order: Vec<&String> = want.iter().map(|(id, _)| id).collect();
            ensure!(full.iter().collect::<Vec<_>>() == brute_order, "trial {trial}: {q:?} order differs");
            let scores: BTreeMap<&str, f64> = want.iter().map(|(id, s)| (id.as_str(), *s)).collect();
            for h in &first.hits {
                ensure!((h.score - scores[h.article_id.as_str()]).abs() <= SCORE_TOL, "score of {}", h.article_id);
            }
            // pagination concatenation
            let size = rng.gen_range(1..12);
            let paged = all_pages(&engine, &q, size)?;
            ensure!(paged == full, "trial {trial}: pages of {size} differ from the full result");
            // adding a filter never enlarges the result
            let mut narrower = q.clone();
            if narrower.location.is_none() {
                narrower.location = Some(COUNTRIES[rng.gen_range(0..COUNTRIES.len())].into());
            } else if narrower.schema.is_none() {
                narrower.schema = Some("S1".into());
            } else {
                narrower.filters.push(PropertyFilter {
                    pid: "P1120".into(),
                    op: Comparator::Gte,
                    value: rng.gen_range(1..400).to_string(),
                });
            }
            let r2 = engine.search(&narrower).map_err(|e| e.to_string())?;
            ensure!(r2.total <= first.total, "trial {trial}: adding a filter enlarged the result");
            queries += 1;
        }
    }
    Ok((queries, max_triples))
}

fn search_correctness(shared: &SharedRun) -> Outcome {
    let (queries, max_triples) = random_store_checks()?;

    let snap: ServiceSnapshot =
        newsgraph_core::snapshot::read(&shared.a.join("service.json"), "service").map_err(|e| e.to_string())?;
    let engine = SearchEngine::from_snapshot(snap).map_err(|e| e.to_string())?;
    let schema = engine
        .article_schema(GERMANWINGS_ID)
        .ok_or("Germanwings article has no schema")?
        .to_string();
    let ids_for = |filter: &str| -> Result<Vec<String>, String> {
        let q = SearchQuery::from_params(&[("schema", schema.as_str()), ("filter", filter), ("size", "100")])
            .map_err(|e| e.to_string())?;
        Ok(engine.search(&q).map_err(|e| e.to_string())?.hits.into_iter().map(|h| h.article_id).collect())
    };
    let at_least_50 = ids_for("P1120:gte:50")?;
    let at_least_200 = ids_for("P1120:gte:200")?;
    ensure!(at_least_50.iter().any(|i| i == GERMANWINGS_ID), "victims >= 50 misses Germanwings");
    ensure!(!at_least_200.iter().any(|i| i == GERMANWINGS_ID), "victims >= 200 still has Germanwings");
    ensure!(!at_least_200.is_empty(), "victims >= 200 should keep the larger crash");

    let q = SearchQuery::from_params(&[("from", "2015-03-24"), ("to", "2015-03-24"), ("location", "France")])
        .map_err(|e| e.to_string())?;
    let fig6 = engine.search(&q).map_err(|e| e.to_string())?;
    let fig6_ids: BTreeSet<String> = fig6.hits.iter().map(|h| h.article_id.clone()).collect();
    ensure!(fig6_ids.contains(GERMANWINGS_ID), "date + France scenario misses Germanwings");
    for h in &fig6.hits {
        ensure!(h.created.date_naive() == day(2015, 3, 24), "{} is not from 24 March", h.article_id);
    }

    let started = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_fixture_pipeline(dir.path());
    let elapsed = started.elapsed();
    ensure!(elapsed < PIPELINE_BUDGET, "fixture pipeline took {elapsed:?}");

    Ok(format!(
        "{queries} random queries equal brute force (stores up to {max_triples} triples); victims>=50 {} hits incl. Germanwings, >=200 {} hits without it; date+France {} hits; pipeline {elapsed:.2?}",
        at_least_50.len(),
        at_least_200.len(),
        fig6_ids.len()
    ))
}

// ---------------------------------------------------------------- determinism

const DETERMINISTIC_FILES: [&str; 17] = [
    "articles.json",
    "events.json",
    "stats.json",
    "mappings.json",
    "wet-stats.json",
    "imt-vocab-stats.json",
    "clustering.json",
    "clusters.json",
    "dendrogram.txt",
    "annotations.json",
    "annotations.jsonl",
    "graph.nt",
    "graph.ttl",
    "service.json",
    "evaluation.json",
    "evaluation.txt",
    "ingest-events.report.txt",
];

fn strip_timing(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with("elapsed")).collect::<Vec<_>>().join("\n")
}

fn determinism(shared: &SharedRun) -> Outcome {
    for file in DETERMINISTIC_FILES {
        let a = fs::read(shared.a.join(file)).map_err(|e| format!("{file}: {e}"))?;
        let b = fs::read(shared.b.join(file)).map_err(|e| format!("{file}: {e}"))?;
        if file.ends_with(".report.txt") {
            let (a, b) = (String::from_utf8_lossy(&a), String::from_utf8_lossy(&b));
            ensure!(strip_timing(&a) == strip_timing(&b), "{file} differs between runs");
        } else {
            ensure!(a == b, "{file} differs between runs");
        }
    }
    Ok(format!("{} artifacts byte-identical across two runs", DETERMINISTIC_FILES.len()))
}

// ---------------------------------------------------------------- driver

struct SharedRun {
    a: std::path::PathBuf,
    b: std::path::PathBuf,
    _dirs: (tempfile::TempDir, tempfile::TempDir),
}

fn shared_run() -> SharedRun {
    let (da, db) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_fixture_pipeline(da.path());
    run_fixture_pipeline(db.path());
    SharedRun {
        a: da.path().to_path_buf(),
        b: db.path().to_path_buf(),
        _dirs: (da, db),
    }
}

fn run_check(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let started = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let ms = started.elapsed().as_millis();
    match result {
        Ok(detail) => {
            println!("[PASS] {name}: {detail} ({ms} ms)");
            true
        }
        Err(detail) => {
            println!("[FAIL] {name}: {detail} ({ms} ms)");
            false
        }
    }
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let shared = shared_run();
    let results = [
        run_check("tfidf oracle equivalence", tfidf_oracle),
        run_check("mapping gates and monotonicity", mapping_gates),
        run_check("evaluation harness", evaluation_harness),
        run_check("ward linkage vs brute force", ward_oracle),
        run_check("planted cluster recovery and fixed cut", planted_clusters),
        run_check("annotation invariants", || germanwings_annotations(&shared)),
        run_check("search correctness", || search_correctness(&shared)),
        run_check("determinism", || determinism(&shared)),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
