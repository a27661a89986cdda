use proptest::prelude::*;

use agentmpc::actors::{
    agent_compute, AgentBehavior, AgentResult, AgentState, DecisionMaker, Party, TaskSpec,
    ThresholdRule,
};
use agentmpc::consensus::{
    run_task, tally_results, OutcomeStatus, ReputationLedger, ResultTally, Scenario,
};
use agentmpc::harness::{random_honest_scenario, ScenarioBounds};
use agentmpc::rng::SeedTree;
use agentmpc::{Ring, RingValue};

fn wide_sum(ring: &Ring, weights: &[RingValue], inputs: &[RingValue]) -> u64 {
    let m = ring.modulus() as u128;
    weights
        .iter()
        .zip(inputs)
        .fold(0u128, |acc, (w, x)| (acc + w.get() as u128 * x.get() as u128 % m) % m) as u64
}

fn scenario_strategy() -> impl Strategy<Value = Scenario> {
    any::<u64>().prop_map(|seed| {
        let mut rng = SeedTree::new(seed).stream("prop-scenario", &[]);
        random_honest_scenario(&mut rng, Ring::default(), ScenarioBounds::default(), seed % 97)
    })
}

/// Drives parties and decision makers by hand and returns the partials.
fn partials(s: &Scenario) -> Vec<RingValue> {
    let task = &s.task;
    let mut dms: Vec<_> = (0..task.dm_count_m).map(|i| DecisionMaker::new(i, task)).collect();
    if task.blind_result {
        let mut rng = SeedTree::new(1).stream("pads", &[]);
        let pads = task
            .ring
            .split_pad(task.ring.reduce(0), task.dm_count_m, agentmpc::crypto::Endpoint::opener(), &mut rng)
            .unwrap();
        for (dm, pad) in dms.iter_mut().zip(pads) {
            dm.set_pad(pad);
        }
    }
    for (i, &x) in s.inputs.iter().enumerate() {
        let mut party = Party::new(i, task);
        let msgs = party
            .submit(x, task, &mut SeedTree::new(task.seed).stream("frag", &[i as u64]))
            .unwrap();
        for m in &msgs {
            dms[m.dm_index].ingest(m, task).unwrap();
        }
    }
    dms.iter().map(|d| d.build_intermediate(task).unwrap().partial).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn partials_conserve_weighted_sum(mut s in scenario_strategy()) {
        s.task.blind_result = false;
        let ring = s.task.ring;
        let total = ring.sum(partials(&s));
        prop_assert_eq!(total.get(), wide_sum(&ring, &s.task.weights, &s.inputs));
    }

    #[test]
    fn blind_partials_shift_by_master_pad(s in scenario_strategy()) {
        prop_assume!(s.task.blind_result);
        let run = run_task(&s, &ReputationLedger::new(s.task.agent_count_p)).unwrap();
        let ring = s.task.ring;
        let masked = ring.sum(run.intermediates.iter().map(|ic| ic.partial));
        let truth = wide_sum(&ring, &s.task.weights, &s.inputs);
        // masked total = truth + master pad, and the opener removes exactly that pad
        prop_assert_eq!(run.outcome.accepted_value(), Some(masked));
        prop_assert_eq!(run.outcome.opened_value.map(RingValue::get), Some(truth));
    }

    #[test]
    fn honest_majority_accepts_truth(
        seed: u64,
        k in 1usize..=9,
        wrong_support in 0usize..=4,
        rule_pick in 0u8..3,
    ) {
        let ring = Ring::default();
        let mut rng = SeedTree::new(seed).stream("hm", &[]);
        let parties = 3;
        let inputs: Vec<_> = (0..parties).map(|_| ring.random(&mut rng)).collect();
        let mut task = TaskSpec::sum(parties, ring).with_topology(2, 2, k, k);
        task.seed = seed;
        task.threshold = match rule_pick {
            0 => ThresholdRule::PaperThird,
            1 => ThresholdRule::StrictMajority,
            _ => ThresholdRule::Fixed(k.div_ceil(2)),
        };
        let mut s = Scenario::all_honest(task, inputs);
        let wrong_support = wrong_support.min(k);
        let honest = k - wrong_support;
        let threshold = s.task.threshold_count();
        // colluders share one constant; the rest stay honest
        let wrong = ring.reduce(12345);
        for a in s.agents.iter_mut().take(wrong_support) {
            a.behavior = AgentBehavior::MaliciousConstant(wrong);
        }
        let run = run_task(&s, &ReputationLedger::new(k)).unwrap();
        if honest >= threshold && wrong_support < honest {
            prop_assert_eq!(run.outcome.result(), Some(s.expected_result()));
            let mut flagged = run.flagged.clone();
            flagged.sort();
            prop_assert_eq!(flagged, (0..wrong_support).collect::<Vec<_>>());
        }
    }

    #[test]
    fn tally_partitions_and_accepts_only_unique_mode(
        reports in proptest::collection::vec(proptest::option::of(0u64..4), 1..12),
        rule_pick in 0u8..2,
    ) {
        let ring = Ring::small();
        let results: Vec<AgentResult> = reports
            .iter()
            .enumerate()
            .map(|(i, r)| AgentResult { task_id: 0, agent_id: i, reported: r.map(|v| ring.reduce(v)) })
            .collect();
        let rule = if rule_pick == 0 { ThresholdRule::PaperThird } else { ThresholdRule::StrictMajority };
        let k = results.len();
        let tally = ResultTally::from_results(&results).unwrap();
        let covered: usize = tally.support.values().map(Vec::len).sum::<usize>() + tally.absent.len();
        prop_assert_eq!(covered, k);

        let outcome = tally_results(&results, rule, k).unwrap();
        let best = tally.support.values().map(Vec::len).max().unwrap_or(0);
        let modes = tally.support.values().filter(|ids| ids.len() == best).count();
        match outcome.status {
            OutcomeStatus::Accepted { value, support } => {
                prop_assert_eq!(support, best);
                prop_assert!(support >= rule.threshold(k));
                prop_assert_eq!(modes, 1);
                prop_assert_eq!(tally.support[&value].len(), best);
            }
            OutcomeStatus::RejectedAmbiguous => prop_assert!(best >= rule.threshold(k) && modes >= 2),
            OutcomeStatus::RejectedNoQuorum => prop_assert!(best < rule.threshold(k)),
        }
    }

    #[test]
    fn honest_agents_agree_on_any_intermediates(s in scenario_strategy()) {
        let run = run_task(&s, &ReputationLedger::new(s.task.agent_count_p)).unwrap();
        let a = agent_compute(&AgentState::honest(0), &run.intermediates, &s.task);
        let b = agent_compute(&AgentState::honest(1), &run.intermediates, &s.task);
        prop_assert_eq!(a.reported, b.reported);
    }
}

#[test]
fn third_rule_hazard_with_five_of_nine() {
    let ring = Ring::default();
    let inputs: Vec<_> = [10u64, 20, 30].iter().map(|&x| ring.reduce(x)).collect();
    let task = TaskSpec::sum(3, ring).with_topology(3, 3, 9, 9);
    let mut s = Scenario::all_honest(task, inputs);
    let wrong = ring.reduce(7);
    for id in [1, 3, 5, 7, 8] {
        s.agents[id].behavior = AgentBehavior::MaliciousConstant(wrong);
    }
    let run = run_task(&s, &ReputationLedger::new(9)).unwrap();
    assert_eq!(run.outcome.status, OutcomeStatus::Accepted { value: wrong, support: 5 });
    // the honest minority is the one punished
    assert_eq!(run.flagged.len(), 4);
}

#[test]
fn reputation_steers_selection_away_from_caught_agent() {
    let ring = Ring::default();
    let inputs = vec![ring.reduce(4), ring.reduce(6)];
    let mut task = TaskSpec::sum(2, ring).with_topology(2, 2, 6, 5);
    task.seed = 3;
    let mut s = Scenario::all_honest(task, inputs);
    s.agents[2].behavior = AgentBehavior::MaliciousPerturb(ring.reduce(1));

    let mut ledger = ReputationLedger::new(6);
    let mut caught_at = None;
    for t in 0..10 {
        s.task.task_id = t;
        let run = run_task(&s, &ledger).unwrap();
        assert_eq!(run.outcome.result(), Some(ring.reduce(10)));
        if run.flagged.contains(&2) {
            caught_at.get_or_insert(t);
        }
        if caught_at.is_some_and(|c| t > c) {
            assert!(!run.selected.contains(&2), "task {t}: caught agent reselected");
        }
        ledger = run.ledger;
    }
    assert!(caught_at.is_some());
}

#[test]
fn crashed_agents_lose_a_point_without_flag() {
    let ring = Ring::default();
    let task = TaskSpec::sum(1, ring).with_topology(1, 1, 5, 5);
    let mut s = Scenario::all_honest(task, vec![ring.reduce(9)]);
    s.agents[4].behavior = AgentBehavior::Crashed;
    let run = run_task(&s, &ReputationLedger::new(5)).unwrap();
    assert_eq!(run.outcome.status, OutcomeStatus::Accepted { value: ring.reduce(9), support: 4 });
    assert!(run.flagged.is_empty());
    assert_eq!(run.ledger.score(4), -1);
    assert!(run.transcript.render().contains("value=absent"));
}
