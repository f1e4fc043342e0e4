//! One PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::Instant;

use honeypot_core::classify::{classify_comment, classify_follower, spam_fraction, FollowerCategory, ProfileView};
use honeypot_core::content::{keyword_filter, select_hashtags, Detection, KeepDecision, BOTTOM_PICKS, TOP_PICKS};
use honeypot_core::experiment::{
    analyze, preset_paper_testbed, replicate_seed, run_replicates, AnalysisReport, ExperimentConfig, ReplicateData,
};
use honeypot_core::fixtures::{parse_labeled_comments, Fixtures, LABELED_COMMENTS};
use honeypot_core::par::Execution;
use honeypot_core::plans::Plan;
use honeypot_core::sim::{run, RunRecord, SponsorAudienceModel};
use honeypot_core::stats::{
    adf_test, anova3, audience_insights, interactions_per_week, round_to, studentized_range_quantile, tukey_hsd,
    Effect, FollowerDemographics, InsightsOutcome, Regression, Stationarity,
};
use honeypot_core::{seeded_rng, AgeBucket, EventKind, Gender};
use rand_distr::{Distribution, StandardNormal};

mod common;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

const REPLICATES: usize = 30;
const SEED: u64 = 1;
const QUORUM: f64 = 0.8;

/// Per-replicate facts of the calibrated testbed.
struct ReplicateFacts {
    plan_order: bool,
    cat_leads: bool,
    nonai_over_ai: bool,
    tukey_plan_topic: bool,
    ns_followers: usize,
    ns_comments: usize,
    follower_hits: usize,
    follower_total: usize,
    detail: String,
}

struct Calibrated {
    first: RunRecord,
    facts: Vec<ReplicateFacts>,
    seconds: f64,
}

fn mean_of(report: &AnalysisReport, group: &str) -> (f64, f64) {
    let r = report.trend.row(group).unwrap_or_else(|| panic!("missing group {group}"));
    (r.followers.mean, r.likes.mean)
}

fn facts(report: &AnalysisReport) -> ReplicateFacts {
    let f = |g| mean_of(report, g).0;
    let l = |g| mean_of(report, g).1;
    let plan_order = f("plan:Plan1") > f("plan:Plan2") && f("plan:Plan2") > f("plan:Plan0");
    let cat_leads = ["topic:food", "topic:car"].iter().all(|o| f("topic:cat") > f(o) && l("topic:cat") > l(o));
    let nonai_over_ai = l("strategy:NonAI") > l("strategy:AI");
    let sig = |factor| report.tukey_for("likes_per_post", factor).is_some_and(|t| t.any_significant());
    let [ns_followers, ns_comments, _] = report.trend.non_stationary_counts();
    ReplicateFacts {
        plan_order,
        cat_leads,
        nonai_over_ai,
        tukey_plan_topic: sig("plan") && sig("topic"),
        ns_followers,
        ns_comments,
        follower_hits: report.followers.correct,
        follower_total: report.followers.total(),
        detail: format!(
            "plans {:.1}/{:.1}/{:.1} cat {:.1}/{:.1} ns {ns_followers}/{ns_comments}",
            f("plan:Plan0"),
            f("plan:Plan1"),
            f("plan:Plan2"),
            f("topic:cat"),
            l("topic:cat")
        ),
    }
}

/// Thirty replicates of the testbed under the shipped calibrated profile.
fn calibrated() -> &'static Calibrated {
    static RUNS: OnceLock<Calibrated> = OnceLock::new();
    RUNS.get_or_init(|| {
        let t = Instant::now();
        let config = ExperimentConfig { seed: SEED, replicates: REPLICATES, ..preset_paper_testbed() };
        let spec = config.run_spec().expect("preset is valid");
        let mut facts = Execution::Parallel.map_indexed(REPLICATES, |i| {
            let r = run(&spec, replicate_seed(SEED, i)).expect("run");
            let data = ReplicateData::from_record(&r).expect("dataset");
            let report = analyze(&[data]).expect("analysis");
            (facts(&report), (i == 0).then_some(r))
        });
        let first = facts[0].1.take().expect("replicate 0 kept");
        let facts = facts.into_iter().map(|(f, _)| f).collect();
        Calibrated { first, facts, seconds: t.elapsed().as_secs_f64() }
    })
}

fn quorum(facts: &[ReplicateFacts], pred: impl Fn(&ReplicateFacts) -> bool) -> (usize, bool) {
    let n = facts.iter().filter(|f| pred(f)).count();
    (n, n as f64 >= QUORUM * facts.len() as f64)
}

fn metric_arithmetic() -> Outcome {
    let all = round_to(interactions_per_week(21_870, 21, 9.0).map_err(|e| e.to_string())?, 1);
    let followers = round_to(interactions_per_week(753, 21, 9.0).map_err(|e| e.to_string())?, 2);
    check(all == 115.7 && followers == 3.98, format!("{all} and {followers}"))
}

fn oracle_equivalence() -> Outcome {
    let reference = common::reference();
    let (mut adf, mut f_rel, mut q) = (0.0f64, 0.0f64, 0.0f64);
    let effects: Vec<Effect> = Effect::TERMS.iter().copied().chain([Effect::Residual]).collect();
    for c in &reference.cases {
        let r = adf_test(&c.adf.series, 1, Regression::ConstantOnly).map_err(|e| e.to_string())?;
        adf = adf.max((r.statistic - c.adf.statistic).abs());
        let table = anova3(&c.anova.observations).map_err(|e| e.to_string())?;
        for e in &c.anova.effects {
            let effect = effects.iter().find(|x| x.label() == e.effect).ok_or(format!("effect {}", e.effect))?;
            match (table.get(*effect).f, e.f) {
                (Some(a), Some(b)) => f_rel = f_rel.max(common::rel(a, b)),
                (None, None) => {}
                _ => f_rel = f64::INFINITY,
            }
        }
        let groups: Vec<(String, Vec<f64>)> =
            c.tukey.groups.iter().map(|g| (g.name.clone(), g.values.clone())).collect();
        let t = tukey_hsd(&groups, 0.05).map_err(|e| e.to_string())?;
        for p in &c.tukey.pairs {
            let got = t.pair(&p.group_a, &p.group_b).ok_or("missing pair")?;
            q = q.max((got.q_stat - p.q_stat).abs());
        }
    }
    let table = studentized_range_quantile(0.05, 3, 18.0).map_err(|e| e.to_string())?;
    check(
        adf < 1e-6 && f_rel < 1e-8 && q < 1e-6 && (table - 3.609).abs() < 0.01,
        format!(
            "{} datasets: max |ADF| {adf:.1e}, max rel F {f_rel:.1e}, max |q| {q:.1e}; q(0.05,3,18) = {table:.4}",
            reference.cases.len()
        ),
    )
}

fn adf_behavior() -> Outcome {
    let mut rng = seeded_rng(63);
    let (mut walks, mut noise) = (0, 0);
    for _ in 0..200 {
        let eps: Vec<f64> = (0..63).map(|_| StandardNormal.sample(&mut rng)).collect();
        let walk: Vec<f64> = eps.iter().scan(0.0, |s, e| {
            *s += e;
            Some(*s)
        }).collect();
        let classify = |x: &[f64]| adf_test(x, 1, Regression::ConstantOnly).map(|r| r.classification);
        walks += usize::from(classify(&walk).map_err(|e| e.to_string())? == Stationarity::NonStationary);
        noise += usize::from(classify(&eps).map_err(|e| e.to_string())? == Stationarity::Stationary);
    }
    check(walks >= 170 && noise >= 170, format!("random walks NonStationary {walks}/200, white noise Stationary {noise}/200"))
}

fn pipeline_invariants() -> Outcome {
    let fixtures = Fixtures::builtin();
    let mut rng = seeded_rng(4);
    let mut calls = 0;
    for topic in &fixtures.topics {
        let pool = &topic.hashtag_pool;
        let half = pool.len().div_ceil(2);
        let top: BTreeSet<&str> = pool[..half].iter().map(|h| h.tag.as_str()).collect();
        let bottom: BTreeSet<&str> = pool[half..].iter().map(|h| h.tag.as_str()).collect();
        let n = 10_000 / fixtures.topics.len() + usize::from(calls == 0) * (10_000 % fixtures.topics.len());
        for _ in 0..n {
            let tags = select_hashtags(pool, &mut rng).map_err(|e| e.to_string())?;
            let distinct: BTreeSet<&str> = tags.iter().map(String::as_str).collect();
            let ok = tags.len() == TOP_PICKS + BOTTOM_PICKS
                && distinct.len() == tags.len()
                && tags[..TOP_PICKS].iter().all(|t| top.contains(t.as_str()))
                && tags[TOP_PICKS..].iter().all(|t| bottom.contains(t.as_str()));
            if !ok {
                return Err(format!("bad selection for {}: {tags:?}", topic.name));
            }
            calls += 1;
        }
    }

    let keep = |d: &[(&str, f64)]| {
        keyword_filter(&d.iter().map(|(l, s)| Detection::new(*l, *s)).collect::<Vec<_>>()).map_err(|e| e.to_string())
    };
    let at_threshold = keep(&[("cat", 0.25), ("sofa", 0.05)])?;
    let below = keep(&[("cat", 0.24), ("sofa", 0.2)])?;
    let boundaries = at_threshold == KeepDecision::Keep(vec!["cat".into()]) && below == KeepDecision::Discard;

    let record = &calibrated().first;
    let plan1: BTreeSet<usize> =
        record.honeypots.iter().enumerate().filter(|(_, h)| h.plan.plan == Plan::Plan1).map(|(i, _)| i).collect();
    let mut violations = 0;
    let mut checked = 0u64;
    record.replay_with(|s, _| {
        checked += 1;
        for h in 0..s.followings.len() {
            let (ing, ers) = (s.followings[h].len(), s.followers[h].len());
            violations += usize::from(ing > 0 && ing >= ers);
        }
    });
    let fu = record
        .events
        .iter()
        .filter(|e| e.kind == EventKind::Unfollow && plan1.contains(&usize::from(e.honeypot.0)))
        .count();
    check(
        calls == 10_000 && boundaries && violations == 0 && fu > 0,
        format!(
            "{calls} selections 8/7, filter boundaries {}, balance held at {checked} events ({fu} Plan1 unfollows, {violations} violations)",
            if boundaries { "ok" } else { "wrong" }
        ),
    )
}

/// Testbed layout, per topic: UQ/P0, UQ/P1, UQ/P2, IA/P0, IA/P1, IA/P2, All/P2.
fn table1() -> Vec<(String, &'static str, &'static str, Plan)> {
    let layout = [
        ("UQ", Plan::Plan0),
        ("UQ", Plan::Plan1),
        ("UQ", Plan::Plan2),
        ("IA", Plan::Plan0),
        ("IA", Plan::Plan1),
        ("IA", Plan::Plan2),
        ("All", Plan::Plan2),
    ];
    ["food", "cat", "car"]
        .iter()
        .enumerate()
        .flat_map(|(t, topic)| {
            layout.iter().enumerate().map(move |(i, (mix, plan))| (format!("h{}", 7 * t + i + 1), *topic, *mix, *plan))
        })
        .collect()
}

fn mix_label(strategies: &[honeypot_core::content::GenerationStrategy]) -> &'static str {
    use honeypot_core::content::GenerationStrategy::*;
    let set: BTreeSet<_> = strategies.iter().copied().collect();
    match set.len() {
        4 => "All",
        2 if set.contains(&UnsplashModel) && set.contains(&QuotesModel) => "UQ",
        2 if set.contains(&InstaModel) && set.contains(&ArtModel) => "IA",
        _ => "?",
    }
}

fn testbed_fidelity() -> Outcome {
    let preset = preset_paper_testbed();
    let got: Vec<_> = preset
        .honeypots
        .iter()
        .map(|h| (h.id.clone(), h.topic.as_str(), mix_label(&h.strategies), h.plan.clone().config().plan))
        .collect();
    let grid = got.len() == 21
        && got.iter().zip(table1()).all(|(g, w)| g.0 == w.0 && g.1 == w.1 && g.2 == w.2 && g.3 == w.3);

    let record = &calibrated().first;
    let posts = record.honeypots.iter().all(|h| h.posts.len() == 126);
    let mut plan2 = 0;
    let mut sponsoring = true;
    for h in &record.honeypots {
        let windows: Vec<_> = h.posts.iter().filter_map(|p| p.sponsored_window).collect();
        if h.plan.plan == Plan::Plan2 {
            plan2 += 1;
            let bought_day0 = h.followers.values().filter(|f| f.purchased && f.since.day == 0).count();
            let cost: f64 = windows.iter().map(|w| w.total_cost()).sum();
            sponsoring &= bought_day0 == 100
                && h.purchased_follower_count() == 100
                && windows.len() == 2
                && windows.iter().all(|w| w.start.day == 56 && w.days() == 7 && w.daily_budget == 2.0)
                && cost == 28.0;
        } else {
            sponsoring &= windows.is_empty() && h.purchased_follower_count() == 0;
        }
    }
    check(
        grid && posts && plan2 == 9 && sponsoring,
        format!(
            "testbed grid {}, 126 posts each {posts}, {plan2} Plan2 honeypots with 100 bought followers and 2 x 7-day/2-unit windows {sponsoring}",
            if grid { "exact" } else { "differs" }
        ),
    )
}

fn calibrated_reproduction() -> Outcome {
    let c = calibrated();
    let f = &c.facts;
    let (a, oa) = quorum(f, |x| x.plan_order);
    let (b, ob) = quorum(f, |x| x.cat_leads);
    let (cc, oc) = quorum(f, |x| x.nonai_over_ai);
    let (d, od) = quorum(f, |x| x.tukey_plan_topic);
    let (e, oe) = quorum(f, |x| x.ns_followers >= 16 && x.ns_comments <= 8);
    let fast = c.seconds < 600.0;
    for (i, x) in f.iter().enumerate() {
        eprintln!("  replicate {i:02}: {}", x.detail);
    }
    check(
        oa && ob && oc && od && oe && fast,
        format!(
            "of {n}: plan order {a}, cat leads {b}, NonAI > AI {cc}, Tukey plan+topic {d}, trend counts {e}; {:.0}s",
            c.seconds,
            n = f.len()
        ),
    )
}

fn classifier_suite() -> Outcome {
    let fixtures = Fixtures::builtin();
    let labeled = parse_labeled_comments(LABELED_COMMENTS).map_err(|e| e.to_string())?;
    let p = &fixtures.spam_patterns;
    let correct = labeled.iter().filter(|c| classify_comment(&c.text, c.latency_seconds, p, 120).is_spam == c.is_spam()).count();
    let fraction = spam_fraction(labeled.iter().map(|c| (c.text.as_str(), c.latency_seconds)), p).map_err(|e| e.to_string())?;

    let (hits, total) = calibrated().facts.iter().fold((0, 0), |(h, t), x| (h + x.follower_hits, t + x.follower_total));
    let accuracy = hits as f64 / total.max(1) as f64;

    let real = ProfileView { follower_count: 500, following_count: 300, post_count: 50, has_real_picture: true, username_entropy: 0.4 };
    let page = ProfileView { follower_count: 5000, following_count: 300, post_count: 400, has_real_picture: true, username_entropy: 0.4 };
    let bot = ProfileView { follower_count: 10, following_count: 2000, post_count: 2, has_real_picture: false, username_entropy: 0.95 };
    let profiles = [
        classify_follower(&real, false),
        classify_follower(&page, true),
        classify_follower(&bot, false),
    ] == [FollowerCategory::RealPerson, FollowerCategory::PageInfluencer, FollowerCategory::Bot];
    check(
        correct == labeled.len() && format!("{:.2}", 100.0 * fraction) == "95.33" && accuracy >= 0.9 && profiles,
        format!(
            "comments {correct}/{} (spam {:.2}%), followers {:.1}% of {total}, hand-built profiles {}",
            labeled.len(),
            100.0 * fraction,
            100.0 * accuracy,
            if profiles { "ok" } else { "wrong" }
        ),
    )
}

fn h9_followers() -> Vec<FollowerDemographics> {
    let ages = [(AgeBucket::Age25To34, 33), (AgeBucket::Age18To24, 30), (AgeBucket::Age35To44, 25), (AgeBucket::Age45To54, 15)];
    let regions = [
        ("India", 12),
        ("Lombardy", 11),
        ("Lazio", 11),
        ("Campania", 11),
        ("Sicily", 11),
        ("Veneto", 10),
        ("Piedmont", 10),
        ("Tuscany", 10),
        ("Apulia", 9),
        ("Emilia-Romagna", 8),
    ];
    let age = ages.iter().flat_map(|&(a, n)| std::iter::repeat_n(a, n));
    let region = regions.iter().flat_map(|&(r, n)| std::iter::repeat_n(r, n));
    age.zip(region)
        .enumerate()
        .map(|(i, (age_bucket, region))| FollowerDemographics {
            gender: if i % 3 == 0 { Gender::M } else { Gender::F },
            age_bucket,
            region: region.into(),
            purchased: false,
        })
        .collect()
}

fn audience_insights_check() -> Outcome {
    let h9 = h9_followers();
    let mut below = h9[..99].to_vec();
    below.extend((0..100).map(|_| FollowerDemographics { purchased: true, ..h9[0].clone() }));
    let closed = audience_insights(&below) == InsightsOutcome::Unavailable { analytic_followers: 99 };
    let opens = matches!(audience_insights(&h9[..100]), InsightsOutcome::Available(_));
    let InsightsOutcome::Available(insights) = audience_insights(&h9) else {
        return Err("103 followers gated".into());
    };
    let age = insights.age.share(AgeBucket::Age25To34.label()).unwrap_or(f64::NAN);
    let (top_region, top) = insights.region.top().ok_or("no regions")?;

    let fixtures = Fixtures::builtin();
    let model = SponsorAudienceModel::from_table(&fixtures.sponsored_audience, 0.0).map_err(|e| e.to_string())?;
    let mut rng = seeded_rng(8);
    let mut worst_gender = 0.0f64;
    let mut worst_age = 0.0f64;
    for (name, audience) in &model.topics {
        let rows: Vec<_> = fixtures.sponsored_audience.posts.iter().filter(|p| &p.topic == name).collect();
        let n = rows.len() as f64;
        let draws: Vec<_> = (0..10_000).map(|_| audience.sample(&mut rng)).collect();
        let share = |pred: &dyn Fn(&honeypot_core::sim::AudienceSample) -> bool| {
            100.0 * draws.iter().filter(|d| pred(d)).count() as f64 / draws.len() as f64
        };
        let men = rows.iter().map(|r| r.men).sum::<f64>() / n;
        let women = rows.iter().map(|r| r.women).sum::<f64>() / n;
        worst_gender = worst_gender
            .max((share(&|d| d.gender == Gender::M) - men).abs())
            .max((share(&|d| d.gender == Gender::F) - women).abs());
        for (i, label) in fixtures.sponsored_audience.age_buckets.iter().enumerate() {
            let want = rows.iter().map(|r| r.age.get(i).copied().unwrap_or(0.0)).sum::<f64>() / n;
            worst_age = worst_age.max((share(&|d| d.age_bucket.label() == label) - want).abs());
        }
    }
    check(
        closed && opens && age == 32.0 && top_region == "India" && top == 11.7 && worst_gender <= 2.0 && worst_age <= 3.0,
        format!(
            "gate at 100 {}, 103-follower page: 25-34 {age}%, top region {top_region} {top}%; sponsored draws off by at most {worst_gender:.2} pts (gender) and {worst_age:.2} pts (age)",
            closed && opens
        ),
    )
}

fn determinism() -> Outcome {
    let config = ExperimentConfig { seed: 9, replicates: 3, horizon_days: 14, population_size: 4000, ..preset_paper_testbed() };
    let render = |records: Vec<RunRecord>| -> Vec<String> {
        records
            .iter()
            .flat_map(|r| std::iter::once(r.events_csv()).chain((0..r.honeypots.len()).map(|h| r.snapshot_csv(h))))
            .collect()
    };
    let runs: Vec<(String, Execution)> = vec![
        ("sequential".into(), Execution::Sequential),
        ("sequential again".into(), Execution::Sequential),
        ("1 thread".into(), Execution::Threads(1)),
        ("4 threads".into(), Execution::Threads(4)),
        ("global pool".into(), Execution::Parallel),
    ];
    let mut outputs = Vec::new();
    for (label, e) in &runs {
        let records = run_replicates(&config, *e).map_err(|e| e.to_string())?;
        outputs.push((label.clone(), render(records)));
    }
    let baseline = &outputs[0].1;
    let differing: Vec<&str> = outputs.iter().filter(|(_, o)| o != baseline).map(|(l, _)| l.as_str()).collect();
    let bytes: usize = baseline.iter().map(String::len).sum();
    check(
        differing.is_empty() && !baseline.is_empty(),
        format!("{} executions, {} CSVs, {bytes} bytes each; differing: {differing:?}", runs.len(), baseline.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("metric arithmetic", metric_arithmetic),
        ("statistics oracle equivalence", oracle_equivalence),
        ("ADF behavior", adf_behavior),
        ("pipeline invariants", pipeline_invariants),
        ("testbed fidelity", testbed_fidelity),
        ("calibrated reproduction", calibrated_reproduction),
        ("classifier suite", classifier_suite),
        ("audience insights", audience_insights_check),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {} {name}: {d} [{secs:.1}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {} {name}: {d} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
