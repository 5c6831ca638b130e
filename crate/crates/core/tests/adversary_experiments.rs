use ivote::actors::Variant;
use ivote::adversaries::{AdversaryConfig, AdversaryKind, QHandling};
use ivote::sim_harness::{run_scenario, run_scenario_with, Harness, RunOptions, Scenario};

fn fooling(t: u32, budget: u64, trials: u64) -> Scenario {
    let mut adv = AdversaryConfig::new(AdversaryKind::FoolingSearch);
    adv.truncation_bits = t;
    adv.search_budget = budget;
    Scenario {
        variant: Variant::Proposed,
        m: 3,
        trials,
        truncation_bits: Some(t),
        adversaries: vec![adv],
        seed: [21; 32],
        ..Scenario::default()
    }
}

/// Successes over total attempts estimates the per-attempt probability.
fn per_attempt_within(t: u32, budget: u64, trials: u64) {
    let h = Harness::new(&fooling(t, budget, trials), RunOptions::default()).unwrap();
    let (mut hits, mut attempts) = (0u64, 0u64);
    for i in 0..trials {
        let row = h.run_trial(i).unwrap().row;
        hits += u64::from(row.search_success.unwrap());
        attempts += row.search_attempts.unwrap();
    }
    let p = 2f64.powi(-(t as i32));
    let mean = attempts as f64 * p;
    let sigma = (attempts as f64 * p * (1.0 - p)).sqrt();
    assert!(
        (hits as f64 - mean).abs() <= 3.0 * sigma,
        "t={t}: {hits} hits in {attempts} attempts, expected {mean:.1} ± {:.1}",
        3.0 * sigma
    );
}

#[test]
fn fooling_matches_per_attempt_probability_at_8_bits() {
    per_attempt_within(8, 200, 400);
}

#[test]
fn fooling_matches_per_attempt_probability_at_16_bits() {
    per_attempt_within(16, 1_000, 300);
}

#[test]
fn successful_forgery_fools_the_voter() {
    let r = run_scenario(&fooling(8, 5_000, 40)).unwrap();
    for row in &r.trials {
        assert_eq!(row.search_success, Some(true));
        assert_ne!(row.submitted, Some(row.beta));
    }
    // slot β shows the voter's characters; the others collide only rarely
    assert!(r.rate("accept").unwrap().successes >= 36);
    assert!(r.counter_check.passed());
}

#[test]
fn forwarding_q_under_student_attack_is_always_caught() {
    let mut adv = AdversaryConfig::new(AdversaryKind::StudentSubstitution);
    adv.q_handling = QHandling::Forward;
    let s = Scenario {
        m: 3,
        trials: 300,
        adversaries: vec![adv],
        ..Scenario::default()
    };
    let r = run_scenario_with(&s, RunOptions::default()).unwrap();
    assert_eq!(r.rate("alarm").unwrap().rate, 1.0);
}

#[test]
fn sniffer_on_proposed_transcripts_is_a_coin_toss_at_m_2() {
    let s = Scenario {
        m: 2,
        trials: 4_000,
        adversaries: vec![AdversaryConfig::new(AdversaryKind::VerifappSniffer)],
        seed: [22; 32],
        ..Scenario::default()
    };
    let r = run_scenario_with(&s, RunOptions::default()).unwrap();
    for rate in r.rates.iter().filter(|r| r.name.starts_with("guess_")) {
        assert!(rate.proportion().within(0.5, 4.0), "{rate:?}");
    }
}

#[test]
fn transcripts_carry_nothing_derived_from_the_intent() {
    let s = Scenario {
        m: 4,
        trials: 20,
        adversaries: vec![AdversaryConfig::new(AdversaryKind::VerifappSniffer)],
        ..Scenario::default()
    };
    let h = Harness::new(&s, RunOptions::default()).unwrap();
    for i in 0..s.trials {
        let t = h.run_trial(i).unwrap();
        let json = t.transcript.unwrap().to_json();
        let keys: Vec<_> = json.as_object().unwrap().keys().cloned().collect();
        for k in &keys {
            assert!(!["beta", "intent", "chosen_q_right", "candidate"].contains(&k.as_str()));
        }
        assert!(json["shown_position"].is_null());
        assert!(!json["screen"].to_string().contains("<-"));
    }
}
