use alloc::string::String;

use rand::Rng;

use super::{Agent, Decision, DecisionOutcome, DecisionRequest, MatchContext};
use crate::engine::{ActionMask, FailureKind};
use crate::seed::{self, ArenaRng};

/// Uniform over the legal actions. Reseeded at every match start from its
/// own seed, the match seed and its seat, so results do not depend on the
/// order in which matches run.
#[derive(Debug, Clone)]
pub struct RandomAgent {
    id: String,
    seed: u64,
    rng: ArenaRng,
}

impl RandomAgent {
    pub fn new(id: impl Into<String>, seed: u64) -> Self {
        RandomAgent {
            id: id.into(),
            seed,
            rng: seed::rng(seed),
        }
    }

    /// Draws one legal action; `None` on an all-false mask.
    pub fn pick(&mut self, mask: &ActionMask) -> Option<usize> {
        pick_uniform(mask, &mut self.rng)
    }
}

pub(crate) fn match_rng(own_seed: u64, ctx: &MatchContext<'_>) -> ArenaRng {
    seed::rng(seed::derive(
        seed::derive(own_seed, ctx.seed),
        ctx.seat as u64,
    ))
}

pub(crate) fn pick_uniform(mask: &ActionMask, rng: &mut ArenaRng) -> Option<usize> {
    let n = mask.count();
    if n == 0 {
        return None;
    }
    let k = rng.gen_range(0..n);
    mask.legal_actions().nth(k)
}

impl Agent for RandomAgent {
    fn id(&self) -> &str {
        &self.id
    }

    fn begin_match(&mut self, ctx: &MatchContext<'_>) -> Result<(), FailureKind> {
        self.rng = match_rng(self.seed, ctx);
        Ok(())
    }

    fn decide(&mut self, request: &DecisionRequest<'_>) -> DecisionOutcome {
        DecisionOutcome::unmetered(match self.pick(request.mask) {
            Some(a) => Decision::Action(a),
            None => Decision::NoAction,
        })
    }
}
