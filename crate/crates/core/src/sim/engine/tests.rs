use std::collections::BTreeMap;
use std::sync::OnceLock;

use super::*;
use crate::experiment::preset_paper_testbed;

fn light_profile() -> crate::sim::BehaviorProfile {
    crate::sim::BehaviorProfile { discovery_rate: 0.02, ..crate::sim::BehaviorProfile::default() }
}

fn testbed(population: usize) -> RunSpec {
    let mut spec = preset_paper_testbed().run_spec().unwrap();
    spec.profile = light_profile();
    spec.population_size = population;
    spec
}

/// One full testbed run shared by the invariant tests.
fn full_run() -> &'static RunRecord {
    static RUN: OnceLock<RunRecord> = OnceLock::new();
    RUN.get_or_init(|| run(&testbed(3000), 11).unwrap())
}

#[test]
fn every_honeypot_posts_twice_a_day() {
    let r = full_run();
    assert_eq!(r.honeypots.len(), 21);
    for h in &r.honeypots {
        assert_eq!(h.posts.len(), 126, "{}", h.id);
        assert_eq!(h.daily_snapshots.len(), 63);
        let mut per_day = BTreeMap::new();
        for p in &h.posts {
            *per_day.entry(p.published_at.day).or_insert(0) += 1;
        }
        assert!(per_day.values().all(|&n| n == 2));
    }
}

#[test]
fn event_log_is_ordered_and_indexed() {
    let r = full_run();
    for (i, e) in r.events.iter().enumerate() {
        assert_eq!(e.seq, i as u64);
    }
    assert!(r.events.windows(2).all(|w| w[0].at <= w[1].at));
}

#[test]
fn replay_conserves_metrics() {
    let r = full_run();
    let state = r.replay();
    for (i, h) in r.honeypots.iter().enumerate() {
        for p in &h.posts {
            assert_eq!(state.likes.get(&p.id).copied().unwrap_or(0), p.likes);
            assert_eq!(state.comments.get(&p.id).copied().unwrap_or(0) as usize, p.comments.len());
        }
        assert_eq!(state.followers[i].len(), h.analytic_follower_count());
        assert_eq!(state.purchased[i].len(), h.purchased_follower_count());
        let last = h.daily_snapshots.last().unwrap();
        assert_eq!(last.followers_analytic as usize, h.analytic_follower_count());
        assert_eq!(last.cumulative_likes, h.posts.iter().map(|p| u64::from(p.likes)).sum::<u64>());
    }
}

#[test]
fn purchased_followers_never_act() {
    let r = full_run();
    let purchased: Vec<_> = r.agents.iter().filter(|a| a.passive).map(|a| a.id).collect();
    assert_eq!(purchased.len(), 900);
    for e in &r.events {
        if let Entity::Agent(a) = e.actor {
            assert!(!r.agents[a.0 as usize].passive, "{e:?}");
        }
    }
    for h in r.honeypots.iter().filter(|h| h.plan.plan == crate::plans::Plan::Plan2) {
        assert_eq!(h.purchased_follower_count(), 100);
        assert!(h.followers.values().filter(|f| f.purchased).all(|f| f.since.day == 0));
    }
}

#[test]
fn impressions_stay_inside_windows() {
    let r = full_run();
    let mut seen = 0;
    for e in r.events.iter().filter(|e| e.kind == EventKind::SponsoredImpression) {
        let Entity::Post(p) = e.target else { panic!("impression on {:?}", e.target) };
        let h = &r.honeypots[usize::from(e.honeypot.0)];
        let post = h.posts.iter().find(|x| x.id == p).unwrap();
        assert!(post.sponsored_window.is_some_and(|w| w.contains(e.at)), "{e:?}");
        seen += 1;
    }
    assert!(seen > 0);
}

#[test]
fn sponsorship_starts_in_week_nine() {
    let r = full_run();
    for h in &r.honeypots {
        let windows: Vec<_> = h.posts.iter().filter_map(|p| p.sponsored_window).collect();
        if h.plan.plan == crate::plans::Plan::Plan2 {
            assert_eq!(windows.len(), 2, "{}", h.id);
            for w in windows {
                assert_eq!((w.start.day, w.days(), w.daily_budget), (56, 7, 2.0));
                assert_eq!(w.total_cost(), 14.0);
            }
        } else {
            assert!(windows.is_empty());
        }
    }
}

#[test]
fn follow_and_unfollow_respects_balance() {
    let r = full_run();
    let mut fu_events = 0;
    r.replay_with(|s, e| {
        fu_events += usize::from(e.kind == EventKind::Unfollow);
        for h in 0..s.followings.len() {
            let (ing, ers) = (s.followings[h].len(), s.followers[h].len());
            assert!(ing == 0 || ing < ers, "seq {}: {ing} followings, {ers} followers", e.seq);
        }
    });
    let plan0_actions = r.events.iter().filter(|e| {
        matches!(e.actor, Entity::Honeypot(_)) && r.honeypots[usize::from(e.honeypot.0)].plan.plan == crate::plans::Plan::Plan0
    });
    assert_eq!(plan0_actions.count(), 0);
}

#[test]
fn runs_are_reproducible() {
    let spec = RunSpec { horizon_days: 7, ..testbed(1500) };
    let a = run(&spec, 3).unwrap();
    let b = run(&spec, 3).unwrap();
    assert_eq!(a.digest(), b.digest());
    assert_eq!(a.events_csv(), b.events_csv());
    let c = run(&spec, 4).unwrap();
    assert_ne!(a.digest(), c.digest());
}

#[test]
fn horizon_bounds_the_log() {
    let spec = RunSpec { horizon_days: 3, ..testbed(1000) };
    let r = run(&spec, 5).unwrap();
    assert!(r.events.iter().all(|e| e.at.day < 3));
    assert!(r.honeypots.iter().all(|h| h.posts.len() == 6 && h.daily_snapshots.len() == 3));
}
