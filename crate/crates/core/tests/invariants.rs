use std::collections::BTreeSet;

use arena_core::agents::{builtin, Agent};
use arena_core::cards;
use arena_core::clock::FrozenClock;
use arena_core::engine::{run_match, EngineError};
use arena_core::rating::{update_pair, update_ranked, PairOutcome, Rating, RatingParams};
use arena_core::tournament::{pass_at_k, schedule_round_robin};
use arena_core::{GameConfig, GameId, GameState, ResourceLimits};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn any_game() -> impl Strategy<Value = GameId> {
    (0..GameId::ALL.len()).prop_map(|i| GameId::ALL[i])
}

fn outcome() -> impl Strategy<Value = PairOutcome> {
    prop_oneof![
        Just(PairOutcome::AWins),
        Just(PairOutcome::BWins),
        Just(PairOutcome::Draw)
    ]
}

fn rating() -> impl Strategy<Value = Rating> {
    (-100.0..150.0f64, 0.01..30.0f64).prop_map(|(mu, sigma)| Rating::new(mu, sigma))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_robin_shape(n in 2usize..=24, rounds in 1usize..=3, seed: u64) {
        let ids: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let s = schedule_round_robin(&ids, GameConfig::ConnectFour, rounds, seed).unwrap();
        prop_assert_eq!(s.matches.len(), n * (n - 1) * rounds);
        for id in &ids {
            let first = s.matches.iter().filter(|m| &m.agents[0] == id).count();
            let second = s.matches.iter().filter(|m| &m.agents[1] == id).count();
            prop_assert_eq!(first, second);
        }
        let unique: BTreeSet<&str> = s.matches.iter().map(|m| m.match_id.as_str()).collect();
        prop_assert_eq!(unique.len(), s.matches.len());
        for (i, m) in s.matches.iter().enumerate() {
            prop_assert_eq!(m.index, i);
            prop_assert_ne!(&m.agents[0], &m.agents[1]);
        }
        prop_assert_eq!(&s, &schedule_round_robin(&ids, GameConfig::ConnectFour, rounds, seed).unwrap());
    }

    #[test]
    fn pair_update_invariants(a in rating(), b in rating(), o in outcome()) {
        let p = RatingParams::default();
        let (pa, pb) = update_pair(a, b, o, &p).unwrap();
        for (post, prior) in [(pa, a), (pb, b)] {
            prop_assert!(post.mu.is_finite() && post.sigma > 0.0);
            prop_assert!(post.sigma <= (prior.sigma * prior.sigma + p.tau * p.tau).sqrt());
        }
        let (sb, sa) = update_pair(b, a, o.flipped(), &p).unwrap();
        prop_assert_eq!((sa, sb), (pa, pb));
    }

    #[test]
    fn ranked_update_is_finite_and_shrinks(
        priors in prop::collection::vec(rating(), 3..7),
        seed: u64,
    ) {
        let p = RatingParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ranks: Vec<usize> = priors.iter().map(|_| rng.gen_range(0..priors.len())).collect();
        let posts = update_ranked(&priors, &ranks, &p).unwrap();
        prop_assert_eq!(posts.len(), priors.len());
        for (post, prior) in posts.iter().zip(&priors) {
            prop_assert!(post.mu.is_finite() && post.sigma > 0.0);
            prop_assert!(post.sigma <= (prior.sigma * prior.sigma + p.tau * p.tau).sqrt() + 1e-9);
        }
    }

    #[test]
    fn pass_at_k_bounded_and_monotone(n in 1u64..300, c_frac in 0.0..=1.0f64, k_frac in 0.0..=1.0f64) {
        let c = (c_frac * n as f64) as u64;
        let k = 1 + ((k_frac * (n - 1) as f64) as u64);
        let v = pass_at_k(n, c, k).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
        if c < n {
            prop_assert!(pass_at_k(n, c + 1, k).unwrap() >= v - 1e-12);
        }
        if k < n {
            prop_assert!(pass_at_k(n, c, k + 1).unwrap() >= v - 1e-12);
        }
    }

    #[test]
    fn seven_card_rank_ignores_order(cards in prop::sample::subsequence((0u8..52).collect::<Vec<_>>(), 7), seed: u64) {
        let mut shuffled = cards.clone();
        rand::seq::SliceRandom::shuffle(&mut shuffled[..], &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(cards::evaluate(&cards).unwrap(), cards::evaluate(&shuffled).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Random playouts: every masked action applies, everything else is
    /// rejected without touching the state, and replaying the same actions
    /// from the same seed reproduces every observation.
    #[test]
    fn mask_and_apply_agree(game in any_game(), seed: u64, policy_seed: u64) {
        let d = game.default_config().descriptor().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(policy_seed);
        let mut s = GameState::new(&d, seed).unwrap();
        let mut actions = Vec::new();
        let mut views = Vec::new();
        while let Some(seat) = s.to_act() {
            let mask = s.legal_mask(seat);
            prop_assert_eq!(mask.len(), d.action_space);
            let legal: Vec<usize> = mask.legal_actions().collect();
            prop_assert!(!legal.is_empty());
            for other in 0..d.seats {
                if other != seat {
                    prop_assert!(s.legal_mask(other).is_all_false());
                }
            }
            let illegal = (0..d.action_space + 2).find(|a| !mask.is_legal(*a)).unwrap();
            let before = s.observe(seat).unwrap();
            prop_assert_eq!(s.apply(seat, illegal), Err(EngineError::RuleViolation { seat, action: illegal }));
            prop_assert_eq!(&s.observe(seat).unwrap(), &before);
            views.push(before);
            let a = legal[rng.gen_range(0..legal.len())];
            s.apply(seat, a).unwrap();
            actions.push((seat, a));
        }
        prop_assert!(s.step_index() <= d.step_cap);
        prop_assert_eq!(s.scores().len(), d.seats);
        prop_assert!((0..d.seats).all(|k| s.legal_mask(k).is_all_false()));

        let mut again = GameState::new(&d, seed).unwrap();
        for ((seat, a), view) in actions.iter().zip(&views) {
            prop_assert_eq!(&again.observe(*seat).unwrap(), view);
            again.apply(*seat, *a).unwrap();
        }
        prop_assert_eq!(again.scores(), s.scores());
    }

    /// A finished match record replays to the same final scores.
    #[test]
    fn records_replay(game in any_game(), seed: u64) {
        let d = game.default_config().descriptor().unwrap();
        let mut agents: Vec<Box<dyn Agent + Send>> = (0..d.seats)
            .map(|i| builtin("random", format!("r{i}"), game, seed ^ i as u64).unwrap())
            .collect();
        let mut seats: Vec<&mut dyn Agent> = agents.iter_mut().map(|a| &mut **a as &mut dyn Agent).collect();
        let record = run_match(&d, &mut seats, &ResourceLimits::default(), seed, "m", &FrozenClock).unwrap();
        let replayed = record.replay().unwrap();
        prop_assert!(replayed.is_terminal());
        prop_assert_eq!(replayed.scores(), &record.scores[..]);
        prop_assert_eq!(replayed.step_index(), record.steps.len() as u64);
    }
}
