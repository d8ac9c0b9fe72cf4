use freeobs::bounds::{
    lb_active_theorem, optimal_passive_distribution, ActiveLowerBound, SubLogConstants,
};
use freeobs::harness::oracle::brute_force_expected_regret;
use freeobs::harness::{run_replicated, run_single, sweep_epsilon, Experiment, PolicySpec};
use freeobs::policy::{ActiveParams, CheckCadence, Ucb};
use freeobs::{run_episode, ArmSpec, FreeObsSchedule, ObserverMode, ProblemInstance, RngStream};
use proptest::prelude::*;

fn four_arm() -> ProblemInstance {
    ProblemInstance::new(
        [2.0, 1.8, 0.5, 0.2]
            .iter()
            .map(|&m| ArmSpec::gaussian(m))
            .collect(),
    )
    .unwrap()
}

fn ucb_experiment(policy: PolicySpec, schedule: FreeObsSchedule) -> Experiment {
    Experiment {
        name: "x".into(),
        instance: four_arm(),
        schedule,
        observer: ObserverMode::Passive(vec![0.25; 4]),
        policy,
        horizon: 2000,
        replications: 1,
        seed: 3,
        checkpoints: vec![10, 100, 1000, 2000],
    }
}

#[test]
fn without_free_observations_passive_and_baseline_agree() {
    let passive = ucb_experiment(PolicySpec::UcbPassive, FreeObsSchedule::None);
    let baseline = ucb_experiment(PolicySpec::UcbBaseline, FreeObsSchedule::None);
    for i in 0..20 {
        assert_eq!(
            run_single(&passive, i).unwrap(),
            run_single(&baseline, i).unwrap()
        );
    }
}

#[test]
fn shifting_all_point_masses_keeps_regret() {
    let inst = ProblemInstance::new(vec![
        ArmSpec::PointMass { value: 1.0 },
        ArmSpec::PointMass { value: 0.5 },
        ArmSpec::PointMass { value: 0.25 },
    ])
    .unwrap();
    for policy in [
        PolicySpec::UcbPassive,
        PolicySpec::FtlRobin,
        PolicySpec::Ucb1Double,
    ] {
        let observer = if policy.requests_free() {
            ObserverMode::Active
        } else {
            ObserverMode::Passive(vec![0.0, 0.5, 0.5])
        };
        let base = Experiment {
            name: "s".into(),
            instance: inst.clone(),
            schedule: FreeObsSchedule::Deterministic(0.25),
            observer,
            policy,
            horizon: 500,
            replications: 1,
            seed: 0,
            checkpoints: vec![500],
        };
        let shifted = Experiment {
            instance: inst.shifted(8.0).unwrap(),
            ..base.clone()
        };
        for i in 0..5 {
            assert_eq!(
                run_single(&base, i).unwrap(),
                run_single(&shifted, i).unwrap(),
                "{policy:?}"
            );
        }
    }
}

#[test]
fn single_replication_mean_is_the_trace() {
    let e = ucb_experiment(PolicySpec::UcbPassive, FreeObsSchedule::StaticRandom(0.1));
    let s = run_replicated(&e).unwrap();
    assert_eq!(s.mean, run_single(&e, 0).unwrap().regret);
    assert_eq!(s.q10, s.mean);
    assert_eq!(s.q90, s.mean);
}

#[test]
fn single_rate_sweep_equals_replicated_run() {
    let mut e = ucb_experiment(PolicySpec::UcbPassive, FreeObsSchedule::StaticRandom(0.3));
    e.replications = 30;
    let row = &sweep_epsilon(&e, &[0.3]).unwrap()[0];
    let s = run_replicated(&e).unwrap();
    assert_eq!(row.mean, s.final_mean());
    assert_eq!(row.q90, *s.q90.last().unwrap());
}

#[test]
fn full_information_does_not_hurt_on_average() {
    let mut e = ucb_experiment(PolicySpec::UcbPassive, FreeObsSchedule::StaticRandom(1.0));
    e.replications = 300;
    e.checkpoints = vec![2000];
    let rows = sweep_epsilon(&e, &[1.0, 0.5]).unwrap();
    assert!(
        rows[0].mean <= rows[1].mean,
        "{} vs {}",
        rows[0].mean,
        rows[1].mean
    );
}

#[test]
fn oracle_matches_monte_carlo_at_horizon_four() {
    let inst = ProblemInstance::new(vec![
        ArmSpec::Bernoulli { mean: 0.9 },
        ArmSpec::Bernoulli { mean: 0.1 },
    ])
    .unwrap();
    let e = Experiment {
        name: "ftl".into(),
        instance: inst,
        schedule: FreeObsSchedule::Deterministic(0.5),
        observer: ObserverMode::Active,
        policy: PolicySpec::FtlRobin,
        horizon: 4,
        replications: 1_000_000,
        seed: 9,
        checkpoints: vec![4],
    };
    let row = freeobs::cli::oracle_row(&e).unwrap();
    assert!(row.pass, "{row:?}");
    assert!(row.exact > 0.0 && row.exact < 0.8 * 3.0);
}

#[test]
fn oracle_handles_active_algorithm() {
    let inst = ProblemInstance::new(vec![
        ArmSpec::Bernoulli { mean: 0.7 },
        ArmSpec::Bernoulli { mean: 0.2 },
        ArmSpec::PointMass { value: 0.1 },
    ])
    .unwrap();
    let params = ActiveParams {
        cadence: CheckCadence::EveryRound,
        ..ActiveParams::default()
    };
    let e = Experiment {
        name: "active".into(),
        instance: inst,
        schedule: FreeObsSchedule::Deterministic(0.5),
        observer: ObserverMode::Active,
        policy: PolicySpec::EtcOcucb(params),
        horizon: 5,
        replications: 400_000,
        seed: 1,
        checkpoints: vec![5],
    };
    let row = freeobs::cli::oracle_row(&e).unwrap();
    assert!(row.pass, "{row:?}");
}

#[test]
fn oracle_of_deterministic_instance_is_the_realised_regret() {
    let inst = ProblemInstance::new(vec![
        ArmSpec::PointMass { value: 0.0 },
        ArmSpec::PointMass { value: 1.0 },
    ])
    .unwrap();
    let exact = brute_force_expected_regret(
        &inst,
        &FreeObsSchedule::None,
        &ObserverMode::Passive(vec![0.5, 0.5]),
        &|| Box::new(Ucb::passive(2)),
        7,
    )
    .unwrap();
    let mut rng = RngStream::new(0, 0);
    let mut p = Ucb::passive(2);
    let trace = run_episode(
        &inst,
        &FreeObsSchedule::None,
        &ObserverMode::Passive(vec![0.5, 0.5]),
        &mut p,
        7,
        &[7],
        &mut rng,
    )
    .unwrap();
    assert_eq!(exact, trace.final_regret());
}

#[test]
fn equal_gap_active_bound() {
    // With K-1 equal gaps the theorem reduces to a closed form in k, and
    // for a long horizon approaches (K-1)/D [ln(1/eps) - ln ln(e/eps)].
    let c = SubLogConstants::default();
    let d = 0.5;
    for k_arms in [4usize, 6] {
        let mut gaps = vec![d; k_arms];
        gaps[0] = 0.0;
        assert_eq!(
            optimal_passive_distribution(&gaps).unwrap()[1],
            1.0 / (k_arms - 1) as f64
        );
        for eps in [1e-3, 1e-4, 1e-5] {
            let v = lb_active_theorem(1e9, &gaps, eps, &c).unwrap();
            let asym = (k_arms - 1) as f64 / d
                * ((1.0 / eps).ln() - (std::f64::consts::E / eps).ln().ln());
            assert!(v.is_finite() && v >= 0.0);
            assert!(v <= asym * 1.05, "K={k_arms} eps={eps}: {v} vs {asym}");
            let lb = ActiveLowerBound::new(&gaps, eps, c).unwrap();
            for k in 2..k_arms {
                if let Some(t) = lb.t_k(k) {
                    assert!(t as f64 >= lb.t_k_floor(k).unwrap());
                }
            }
        }
    }
}

fn arb_instance() -> impl Strategy<Value = ProblemInstance> {
    prop::collection::vec((0u8..3, -2.0f64..2.0), 2..6).prop_map(|arms| {
        let specs = arms
            .into_iter()
            .map(|(kind, m)| match kind {
                0 => ArmSpec::gaussian(m),
                1 => ArmSpec::Bernoulli {
                    mean: (m + 2.0) / 4.0,
                },
                _ => ArmSpec::PointMass { value: m },
            })
            .collect();
        ProblemInstance::new(specs).unwrap()
    })
}

fn arb_policy() -> impl Strategy<Value = PolicySpec> {
    prop_oneof![
        Just(PolicySpec::UcbPassive),
        Just(PolicySpec::UcbBaseline),
        Just(PolicySpec::FtlRobin),
        Just(PolicySpec::Ucb1Double),
        Just(PolicySpec::EtcOcucb(ActiveParams::default())),
        Just(PolicySpec::EtcOcucb(ActiveParams {
            share_info: true,
            cadence: CheckCadence::PowersOfTwo,
            ..ActiveParams::default()
        })),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn traces_are_consistent(
        inst in arb_instance(),
        policy in arb_policy(),
        eps in 0.01f64..1.0,
        deterministic in any::<bool>(),
        horizon in 1u64..400,
        seed in any::<u64>(),
    ) {
        let k = inst.k();
        let observer = if policy.requests_free() {
            ObserverMode::Active
        } else {
            ObserverMode::Passive(vec![1.0 / k as f64; k])
        };
        let schedule = if deterministic {
            FreeObsSchedule::Deterministic(eps)
        } else {
            FreeObsSchedule::StaticRandom(eps)
        };
        let checkpoints: Vec<u64> = (1..=horizon).filter(|t| t % 7 == 0 || *t == horizon).collect();
        let e = Experiment {
            name: "p".into(),
            instance: inst.clone(),
            schedule,
            observer,
            policy,
            horizon,
            replications: 1,
            seed,
            checkpoints: checkpoints.clone(),
        };
        let tr = run_single(&e, 0).unwrap();
        prop_assert_eq!(&tr.checkpoints, &checkpoints);
        prop_assert!(tr.regret.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(tr.pulls.len(), k);
        prop_assert_eq!(tr.pulls.iter().sum::<u64>(), horizon);
        prop_assert_eq!(tr.final_regret(), inst.pseudo_regret(&tr.pulls));
        if deterministic {
            prop_assert_eq!(
                tr.free.iter().sum::<u64>(),
                freeobs::environment::deterministic_arrivals(eps, horizon)
            );
        }
        prop_assert!(tr.free.iter().sum::<u64>() <= horizon);
        prop_assert_eq!(&tr, &run_single(&e, 0).unwrap());
    }
}
