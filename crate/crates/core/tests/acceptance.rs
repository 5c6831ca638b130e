//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. A positional argument selects criteria whose name
//! contains it.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use ivote::actors::{
    CountingServer, Submission, Variant, Vfs, VoterApp, VoterClient, VoterIntent, VoterRegistry,
};
use ivote::adversaries::{AdversaryConfig, AdversaryKind};
use ivote::crypto_suite::{
    asym_decrypt, asym_encrypt, hash, keygen_election, sym_decrypt, sym_encrypt, HashDigest,
    Randomness, SymCiphertext,
};
use ivote::protocol_messages::{
    q_right_to_chars, truncate_display, CandidateList, VerificationParameter,
};
use ivote::sim_harness::{
    chi_square_homogeneity, chi_square_uniform, compare_counters, expected_counters,
    run_scenario_with, Harness, OpCounters, Proportion, RunOptions, Scenario,
};

type Criterion = fn() -> Result<String, String>;

fn seed(label: &str) -> [u8; 32] {
    hash(label.as_bytes()).0
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn correctness_sweep() -> Result<String, String> {
    let mut runs = 0u64;
    for m in 2..=10usize {
        let s = Scenario {
            variant: Variant::Proposed,
            m,
            seed: seed(&format!("correctness/{m}")),
            ..Scenario::default()
        };
        let h = Harness::new(&s, RunOptions::default()).map_err(err)?;
        let expected = expected_counters(Variant::Proposed, m as u64, 1, 1);
        for beta in 1..=m {
            for i in 0..50u64 {
                let index = (beta as u64 - 1) * 50 + i;
                let t = h.run_trial_at(index, Some(beta)).map_err(err)?;
                ensure(t.outcome.accepted() && t.row.alpha == Some(beta), || {
                    format!("m={m} beta={beta} trial={i}: {} alpha={:?}", t.row.verdict, t.row.alpha)
                })?;
                let check = compare_counters(&t.counters, &expected);
                ensure(check.passed(), || format!("m={m} counters: {:?}", check.diffs))?;
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} honest runs over m=2..10 and every beta, accept rate 1.0, alpha = beta"))
}

fn attack_scenario(variant: Variant, m: usize, trials: u64, t: Option<u32>, label: &str) -> Scenario {
    let mut adv = AdversaryConfig::new(AdversaryKind::StudentSubstitution);
    if let Some(t) = t {
        adv.truncation_bits = t;
    }
    Scenario {
        variant,
        m,
        trials,
        truncation_bits: t,
        adversaries: vec![adv],
        seed: seed(label),
        ..Scenario::default()
    }
}

fn student_detection() -> Result<String, String> {
    let quiet = RunOptions::default();
    let original = attack_scenario(Variant::Original, 3, 10_000, None, "student/original");
    let r = run_scenario_with(&original, quiet).map_err(err)?;
    let alarm = r.rate("alarm").expect("alarm rate");
    ensure(alarm.successes == alarm.trials, || {
        format!("original detection {} of {}", alarm.successes, alarm.trials)
    })?;
    ensure(r.counter_check.passed(), || format!("original counters {:?}", r.counter_check.diffs))?;

    let proposed = attack_scenario(Variant::Proposed, 2, 100_000, Some(8), "student/proposed");
    let r = run_scenario_with(&proposed, quiet).map_err(err)?;
    let alarm = r.rate("alarm").expect("alarm rate").proportion();
    let p = 1.0 - 2f64.powi(-8);
    ensure(alarm.within(p, 3.0), || {
        format!(
            "proposed t=8 detection {:.5} outside {p:.5} ± 3σ ({:.5})",
            alarm.rate(),
            3.0 * alarm.sigma_under(p)
        )
    })?;
    ensure(r.counter_check.passed(), || format!("proposed counters {:?}", r.counter_check.diffs))?;
    Ok(format!(
        "original 10^4: detection 1.0; proposed t=8 10^5: detection {:.5} (target {p:.5} ± {:.5})",
        alarm.rate(),
        3.0 * alarm.sigma_under(p)
    ))
}

fn sniffer_scenario(variant: Variant, label: &str) -> Scenario {
    Scenario {
        variant,
        m: 5,
        trials: 20_000,
        adversaries: vec![AdversaryConfig::new(AdversaryKind::VerifappSniffer)],
        seed: seed(label),
        ..Scenario::default()
    }
}

/// Every strategy's success rate within `1/m ± 4σ`.
fn privacy_holds(report: &ivote::sim_harness::ExperimentReport) -> (bool, f64, f64) {
    let p = 1.0 / report.scenario.m as f64;
    let guesses: Vec<_> = report.rates.iter().filter(|r| r.name.starts_with("guess_")).collect();
    let best = guesses.iter().map(|r| r.rate).fold(0.0, f64::max);
    let n = report.scenario.trials as f64;
    let delta = 4.0 * (p * (1.0 - p) / n).sqrt();
    let ok = guesses.iter().all(|r| r.proportion().within(p, 4.0));
    (ok, best, delta)
}

fn privacy_bound() -> Result<String, String> {
    let quiet = RunOptions::default();
    let proposed = run_scenario_with(&sniffer_scenario(Variant::Proposed, "privacy/proposed"), quiet)
        .map_err(err)?;
    let (ok, best, delta) = privacy_holds(&proposed);
    ensure(ok, || {
        let rates: Vec<_> = proposed
            .rates
            .iter()
            .filter(|r| r.name.starts_with("guess_"))
            .map(|r| format!("{}={:.4}", r.name, r.rate))
            .collect();
        format!("proposed sniffer rates outside 0.2 ± {delta:.4}: {rates:?}")
    })?;

    let original = run_scenario_with(&sniffer_scenario(Variant::Original, "privacy/original"), quiet)
        .map_err(err)?;
    let orig_best = original.rate("guess_best").expect("best rate");
    ensure(orig_best.successes == orig_best.trials, || {
        format!("original best sniffer rate {}", orig_best.rate)
    })?;

    let leaky_opts = RunOptions {
        leaky_transcript: true,
        ..quiet
    };
    let leaky = run_scenario_with(&sniffer_scenario(Variant::Proposed, "privacy/leaky"), leaky_opts)
        .map_err(err)?;
    let (leaky_ok, leaky_best, _) = privacy_holds(&leaky);
    ensure(!leaky_ok && leaky_best > 0.2 + delta, || {
        format!("leaky control not caught: best {leaky_best:.4}")
    })?;
    Ok(format!(
        "m=5 2·10^4: proposed best {best:.4} in 0.2 ± {delta:.4}; original {:.1}; leaky control {leaky_best:.4} rejected",
        orig_best.rate
    ))
}

fn fooling_scenario(t: u32, budget: u64, trials: u64, label: &str) -> Scenario {
    let mut adv = AdversaryConfig::new(AdversaryKind::FoolingSearch);
    adv.truncation_bits = t;
    adv.search_budget = budget;
    Scenario {
        variant: Variant::Proposed,
        m: 2,
        trials,
        truncation_bits: Some(t),
        adversaries: vec![adv],
        seed: seed(label),
        ..Scenario::default()
    }
}

fn fooling_bound() -> Result<String, String> {
    let quiet = RunOptions::default();
    let r = run_scenario_with(&fooling_scenario(8, 10_000, 200, "fooling/8"), quiet).map_err(err)?;
    let success = r.rate("search_success").expect("search rate").proportion();
    let p = 1.0 - (1.0 - 2f64.powi(-8)).powi(10_000);
    ensure(success.within(p, 3.0), || {
        format!("t=8 search success {:.4} vs {p:.6}", success.rate())
    })?;
    ensure(r.counter_check.passed(), || format!("t=8 counters {:?}", r.counter_check.diffs))?;

    let r = run_scenario_with(&fooling_scenario(32, 1_000, 1_000, "fooling/32"), quiet).map_err(err)?;
    let wide = r.rate("search_success").expect("search rate");
    ensure(wide.successes == 0, || format!("t=32: {} successes", wide.successes))?;
    ensure(r.counters.adversary.asym_enc == 1_000_000, || {
        format!("t=32 attempts {}", r.counters.adversary.asym_enc)
    })?;
    Ok(format!(
        "t=8 budget 10^4: {}/{} (expected rate {p:.6}); t=32 budget 10^3: 0/1000 over 10^6 attempts",
        success.successes, success.trials
    ))
}

fn cost_table() -> Result<String, String> {
    let mut rows = Vec::new();
    for variant in [Variant::Original, Variant::Proposed] {
        for m in [2usize, 3, 5, 10] {
            let s = Scenario {
                variant,
                m,
                seed: seed(&format!("cost/{variant}/{m}")),
                ..Scenario::default()
            };
            let h = Harness::new(&s, RunOptions::default()).map_err(err)?;
            let t = h.run_trial(0).map_err(err)?;
            let c = t.counters;
            let m64 = m as u64;
            let (sym_dec, vfs_sym) = match variant {
                Variant::Original => (0, 0),
                Variant::Proposed => (m64, 1),
            };
            let table = [
                ("voter_app.asym_enc", c.voter_app.asym_enc, 1),
                ("voter_app.sign", c.voter_app.sign, 1),
                ("verif_app.asym_enc", c.verif_app.asym_enc, m64),
                ("verif_app.sym_dec", c.verif_app.sym_dec, sym_dec),
                ("verif_app.sym_enc", c.verif_app.sym_enc, 0),
                ("vfs.sym_enc", c.vfs.sym_enc, vfs_sym),
                ("vfs.asym_enc", c.vfs.asym_enc, 0),
                ("vfs.sym_dec", c.vfs.sym_dec, 0),
            ];
            for (name, got, want) in table {
                ensure(got == want, || format!("{variant} m={m} {name}: {got} != {want}"))?;
            }
            let check = compare_counters(&c, &expected_counters(variant, m64, 1, 1));
            ensure(check.passed(), || format!("{variant} m={m}: {:?}", check.diffs))?;
            rows.push(format!("{variant}/m={m}"));
        }
    }
    let zero = compare_counters(&OpCounters::default(), &expected_counters(Variant::Proposed, 7, 0, 0));
    ensure(zero.passed(), || "empty run".into())?;
    Ok(format!("exact counters for {}", rows.join(" ")))
}

fn worked_example() -> Result<String, String> {
    let q = VerificationParameter(*b"aBxQwSOckfrzdYuaDNcvtTIDqKjEmAlQ");
    ensure(q.q_right().0 == *b"mAlQ", || format!("q_right bytes {:?}", q.q_right().0))?;
    let shown = q_right_to_chars(q.q_right());
    ensure(shown == "mAlQ", || format!("rendered {shown:?}"))?;
    ensure(truncate_display(&q.0) == "mAlQ", || "display truncation".into())?;
    Ok("\"aBxQwSOckfrzdYuaDNcvtTIDqKjEmAlQ\" -> \"mAlQ\" byte-exact".into())
}

fn revote() -> Result<String, String> {
    let kp = keygen_election(&seed("revote/election"));
    let cl = CandidateList::numbered(3).map_err(err)?;
    let (registry, keys) = VoterRegistry::derive(&seed("revote/registry"), 1);
    let registry = Arc::new(registry);
    let mut vfs = Vfs::new(Variant::Proposed, cl.clone(), Arc::clone(&registry), seed("revote/vfs"));
    let mut rng = ChaCha20Rng::from_seed(seed("revote/rng"));
    let key = keys[0].clone();
    for beta in [1, 2] {
        let intent = VoterIntent::new(&cl, key.voter_id, beta, Some("mAlQ".into())).map_err(err)?;
        let mut app = VoterApp::new(Variant::Proposed, kp.pk.clone(), key.clone(), cl.clone());
        match app.cast(&intent, &mut rng).map_err(err)? {
            Submission::Vote { vote, q } => {
                vfs.store(key.voter_id, vote, q).map_err(err)?;
            }
            Submission::Withheld => return Err("honest app withheld".into()),
        }
    }
    let tally = CountingServer::default()
        .tally(&vfs, &kp.sk, &registry, &seed("revote/mix"))
        .map_err(err)?;
    let c1 = cl.get(1).unwrap().id;
    let c2 = cl.get(2).unwrap().id;
    ensure(tally.counts[&c1] == 0 && tally.counts[&c2] == 1, || {
        format!("counts {:?}", tally.counts)
    })?;
    ensure(tally.ballots_superseded == 1, || {
        format!("superseded {}", tally.ballots_superseded)
    })?;
    ensure(tally.conserves(&vfs.stats()), || "conservation".into())?;
    Ok("c1 then c2: tally counts c2 only, superseded = 1".into())
}

fn crypto_contracts() -> Result<String, String> {
    let mut rng = ChaCha20Rng::from_seed(seed("crypto"));
    let kp = keygen_election(&seed("crypto/election"));

    // determinism and round trips
    for _ in 0..200 {
        let mut data = vec![0u8; rng.random_range(0..200)];
        rng.fill_bytes(&mut data);
        ensure(hash(&data) == hash(&data), || "hash determinism".into())?;
        let key = HashDigest(rng.random());
        let msg: [u8; 32] = rng.random();
        let ct = sym_encrypt(&key, &msg);
        ensure(ct == sym_encrypt(&key, &msg), || "sym determinism".into())?;
        ensure(ct.0.len() == msg.len(), || "sym length".into())?;
        ensure(sym_decrypt(&key, &ct) == msg, || "sym round trip".into())?;
    }
    for _ in 0..50 {
        let c = rng.random_range(0..10u64);
        let r = Randomness::random(&mut rng);
        let ct = asym_encrypt(&kp.pk, c, &r).map_err(err)?;
        ensure(ct == asym_encrypt(&kp.pk, c, &r).map_err(err)?, || "asym determinism".into())?;
        ensure(ct.0.len() == 64, || "asym length".into())?;
        ensure(asym_decrypt(&kp.sk, &ct).map_err(err)? == c, || "asym round trip".into())?;
    }

    // totality under wrong keys, and the 1/256 low-byte collision rate
    let q: [u8; 32] = rng.random();
    let e_sym = sym_encrypt(&HashDigest(rng.random()), &q);
    let mut low_byte = Proportion::default();
    for _ in 0..1_000_000 {
        let out = sym_decrypt(&HashDigest(rng.random()), &e_sym);
        ensure(out != q, || "wrong key recovered q".into())?;
        low_byte.record(out[31] == q[31]);
    }
    let p = 1.0 / 256.0;
    ensure(low_byte.within(p, 3.0), || format!("low-byte rate {}", low_byte.rate()))?;

    // first-byte indistinguishability of encryptions of two candidates
    let n = 100_000;
    let mut hist = [[[0u64; 256]; 2]; 2];
    for _ in 0..n {
        for (c, h) in hist.iter_mut().enumerate() {
            let ct = asym_encrypt(&kp.pk, c as u64, &Randomness::random(&mut rng)).map_err(err)?;
            h[0][ct.0[0] as usize] += 1;
            h[1][ct.0[32] as usize] += 1;
        }
    }
    let first = chi_square_homogeneity(&hist[0][0], &hist[1][0]);
    let second = chi_square_homogeneity(&hist[0][1], &hist[1][1]);
    let mut sym_hist = [0u64; 256];
    for _ in 0..n {
        let ct = sym_encrypt(&HashDigest(rng.random()), &q);
        sym_hist[ct.0[0] as usize] += 1;
    }
    let sym = chi_square_uniform(&sym_hist);
    let mut pvals = BTreeMap::new();
    pvals.insert("asym byte 0", first.p_value);
    pvals.insert("asym byte 32", second.p_value);
    pvals.insert("sym byte 0", sym.p_value);
    for (name, pv) in &pvals {
        ensure(*pv > 0.01, || format!("{name}: chi-square p = {pv:.4}"))?;
    }
    let _ = SymCiphertext::from_slice(&[0; 32]).map_err(err)?;
    Ok(format!(
        "properties hold; wrong-key low-byte rate {:.5} (1/256 = {p:.5}); chi-square p: {}",
        low_byte.rate(),
        pvals
            .iter()
            .map(|(k, v)| format!("{k} {v:.3}"))
            .collect::<Vec<_>>()
            .join(", ")
    ))
}

fn main() {
    let criteria: [(&str, Criterion); 8] = [
        ("1 correctness sweep", correctness_sweep),
        ("2 student attack detection", student_detection),
        ("3 privacy bound", privacy_bound),
        ("4 fooling bound", fooling_bound),
        ("5 cost table", cost_table),
        ("6 worked example", worked_example),
        ("7 re-vote semantics", revote),
        ("8 crypto contracts", crypto_contracts),
    ];
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));

    let mut failed = 0;
    for (name, run) in criteria {
        if filter.as_deref().is_some_and(|f| !name.contains(f)) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS [{name}] {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{name}] {detail} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
