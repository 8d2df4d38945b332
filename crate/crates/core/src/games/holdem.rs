//! Fixed-limit Texas Hold'em for 2 to 9 seats.
//!
//! Blinds are half a small bet and one small bet. Bets and raises are one
//! small bet before the turn and one big bet (two small bets) after; at most
//! four raises per street. A match is a fixed number of hands with the
//! button moving one occupied seat left each hand; seats that run out of
//! chips sit out. Scores are net chips won.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::cards::{self, Card, HandRank};
use crate::engine::{Finish, Payload, Rules};
use crate::seed::ArenaRng;

pub const DEFAULT_HANDS: u32 = 50;
/// Decision budget per hand; the match step cap is this times the hand count.
pub const DECISIONS_PER_HAND: u64 = 20;
pub const RAISE_CAP: u32 = 4;

pub const FOLD: usize = 0;
pub const CALL: usize = 1;
pub const RAISE: usize = 2;
pub const ALL_IN: usize = 3;

pub const OBSERVATION_SCHEMA: &str = "{\"seat\": int, \"to_act\": int|null, \"hand\": int, \"hands\": int, \
\"button\": int, \"street\": \"preflop\"|\"flop\"|\"turn\"|\"river\", \"hole\": [card, card], \"board\": [card], \
\"stacks\": [int], \"bets\": [int], \"committed\": [int], \"pot\": int, \"current_bet\": int, \"to_call\": int, \
\"raises\": int, \"bet_size\": int, \"folded\": [bool], \"in_hand\": [bool]} \
Cards are integers 0..51 = 13 * suit + rank with rank 0 = 2, 1 = 3, ..., 8 = T, 9 = J, 10 = Q, 11 = K, 12 = A \
and suits 0 = clubs, 1 = diamonds, 2 = hearts, 3 = spades. hole holds only the viewer's own cards. bets are \
this street's wagers per seat, committed the whole hand's; pot is the sum of committed chips. in_hand is false \
for seats with no chips at the start of the hand.";

pub const ACTION_ENCODING: &str = "0 = fold, 1 = check or call, 2 = raise (bet one bet_size above current_bet), \
3 = all-in. Fold is legal only when facing a bet (to_call > 0). Check/call needs stack >= to_call. Raise needs \
fewer than 4 raises this street, stack >= to_call + bet_size, and an opponent who can still act. All-in is legal \
only when the stack cannot complete a full raise (or, when raising is closed, a full call).";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Street {
    Preflop,
    Flop,
    Turn,
    River,
}

impl Street {
    fn next(self) -> Option<Street> {
        match self {
            Street::Preflop => Some(Street::Flop),
            Street::Flop => Some(Street::Turn),
            Street::Turn => Some(Street::River),
            Street::River => None,
        }
    }

    const fn board_cards(self) -> usize {
        match self {
            Street::Preflop => 0,
            Street::Flop => 3,
            Street::Turn => 4,
            Street::River => 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct View {
    pub hand: u32,
    pub hands: u32,
    pub button: usize,
    pub street: Street,
    pub hole: Vec<Card>,
    pub board: Vec<Card>,
    pub stacks: Vec<u64>,
    pub bets: Vec<u64>,
    pub committed: Vec<u64>,
    pub pot: u64,
    pub current_bet: u64,
    pub to_call: u64,
    pub raises: u32,
    pub bet_size: u64,
    pub folded: Vec<bool>,
    pub in_hand: Vec<bool>,
}

/// One seat's stake in a pot at showdown.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Contender {
    pub committed: u64,
    pub folded: bool,
    /// `None` when the seat won without showdown or has no ranked hand.
    pub hand: Option<HandRank>,
}

/// Awards main and side pots. Returns chips paid to each seat.
///
/// Pots are layered by commitment level; each layer goes to the best hands
/// among unfolded seats that committed at least that much. Split pots give
/// odd chips one at a time starting with the first winner left of `button`.
pub fn settle_showdown(table: &[Contender], button: usize) -> Vec<u64> {
    let n = table.len();
    let mut paid = vec![0u64; n];
    let mut levels: Vec<u64> = table
        .iter()
        .map(|c| c.committed)
        .filter(|&c| c > 0)
        .collect();
    levels.sort_unstable();
    levels.dedup();
    let live_max = table
        .iter()
        .filter(|c| !c.folded)
        .map(|c| c.committed)
        .max()
        .unwrap_or(0);
    let mut prev = 0;
    for level in levels {
        let amount: u64 = table
            .iter()
            .map(|c| c.committed.min(level) - c.committed.min(prev))
            .sum();
        prev = level;
        let mut eligible: Vec<usize> = (0..n)
            .filter(|&i| !table[i].folded && table[i].committed >= level)
            .collect();
        if eligible.is_empty() {
            // Folded money above every live commitment.
            eligible = (0..n)
                .filter(|&i| !table[i].folded && table[i].committed == live_max)
                .collect();
        }
        let Some(best) = eligible.iter().map(|&i| table[i].hand).max() else {
            continue;
        };
        let mut winners: Vec<usize> = eligible
            .into_iter()
            .filter(|&i| table[i].hand == best)
            .collect();
        winners.sort_by_key(|&i| (i + n - button - 1) % n);
        let share = amount / winners.len() as u64;
        let odd = amount % winners.len() as u64;
        for (k, &w) in winners.iter().enumerate() {
            paid[w] += share + u64::from((k as u64) < odd);
        }
    }
    paid
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Holdem {
    seats: usize,
    starting_stack: u64,
    small_bet: u64,
    hands: u32,
    hand: u32,
    button: usize,
    over: bool,
    stacks: Vec<u64>,
    hand_start: Vec<u64>,
    in_hand: Vec<bool>,
    folded: Vec<bool>,
    needs_action: Vec<bool>,
    bets: Vec<u64>,
    committed: Vec<u64>,
    current_bet: u64,
    raises: u32,
    street: Street,
    deck: Vec<Card>,
    to_act: usize,
}

impl Holdem {
    pub fn new(
        seats: usize,
        starting_stack: u64,
        small_bet: u64,
        hands: u32,
        rng: &mut ArenaRng,
    ) -> Self {
        let mut h = Holdem {
            seats,
            starting_stack,
            small_bet,
            hands,
            hand: 0,
            button: 0,
            over: false,
            stacks: vec![starting_stack; seats],
            hand_start: vec![starting_stack; seats],
            in_hand: vec![false; seats],
            folded: vec![false; seats],
            needs_action: vec![false; seats],
            bets: vec![0; seats],
            committed: vec![0; seats],
            current_bet: 0,
            raises: 0,
            street: Street::Preflop,
            deck: Vec::new(),
            to_act: 0,
        };
        h.start_hand(rng);
        if !h.over && h.betting_done() {
            h.progress(h.to_act.wrapping_sub(1), rng);
        }
        h
    }

    pub fn stacks(&self) -> &[u64] {
        &self.stacks
    }

    pub fn pot(&self) -> u64 {
        self.committed.iter().sum()
    }

    /// Chips on the table: stacks plus everything committed this hand.
    pub fn total_chips(&self) -> u64 {
        self.stacks.iter().sum::<u64>() + self.pot()
    }

    pub fn hand_number(&self) -> u32 {
        self.hand
    }

    pub fn street(&self) -> Street {
        self.street
    }

    pub fn button(&self) -> usize {
        self.button
    }

    pub fn hole(&self, seat: usize) -> [Card; 2] {
        [self.deck[2 * seat], self.deck[2 * seat + 1]]
    }

    pub fn board(&self) -> &[Card] {
        let start = 2 * self.seats;
        &self.deck[start..start + self.street.board_cards()]
    }

    pub fn is_over(&self) -> bool {
        self.over
    }

    fn bet_size(&self) -> u64 {
        match self.street {
            Street::Preflop | Street::Flop => self.small_bet,
            Street::Turn | Street::River => 2 * self.small_bet,
        }
    }

    fn can_act(&self, i: usize) -> bool {
        self.in_hand[i] && !self.folded[i] && self.stacks[i] > 0
    }

    fn live(&self, i: usize) -> bool {
        self.in_hand[i] && !self.folded[i]
    }

    /// First seat at or after `from` (cyclically) satisfying `pred`.
    fn seat_from(&self, from: usize, pred: impl Fn(usize) -> bool) -> Option<usize> {
        (0..self.seats)
            .map(|k| (from + k) % self.seats)
            .find(|&i| pred(i))
    }

    fn pay(&mut self, seat: usize, amount: u64) {
        let amount = amount.min(self.stacks[seat]);
        self.stacks[seat] -= amount;
        self.bets[seat] += amount;
        self.committed[seat] += amount;
    }

    /// Legal actions for `seat` when it is on move.
    pub fn legal(&self, seat: usize) -> [bool; 4] {
        let stack = self.stacks[seat];
        let to_call = self.current_bet.saturating_sub(self.bets[seat]);
        let bet = self.bet_size();
        let others_can_act = (0..self.seats).any(|j| j != seat && self.can_act(j));
        let raise_open = self.raises < RAISE_CAP && others_can_act;
        [
            to_call > 0,
            stack >= to_call,
            raise_open && stack >= to_call + bet,
            stack > 0
                && if raise_open {
                    stack < to_call + bet
                } else {
                    stack <= to_call
                },
        ]
    }

    fn start_hand(&mut self, rng: &mut ArenaRng) {
        for i in 0..self.seats {
            self.in_hand[i] = self.stacks[i] > 0;
            self.folded[i] = false;
            self.bets[i] = 0;
            self.committed[i] = 0;
        }
        self.hand_start.clone_from(&self.stacks);
        let players = self.in_hand.iter().filter(|p| **p).count();
        if self.hand >= self.hands || players < 2 {
            self.over = true;
            return;
        }
        if self.hand > 0 {
            self.button = self
                .seat_from(self.button + 1, |i| self.in_hand[i])
                .expect("two players");
        } else if !self.in_hand[self.button] {
            self.button = self.seat_from(0, |i| self.in_hand[i]).expect("two players");
        }
        self.deck = (0..cards::DECK_SIZE as Card).collect();
        self.deck.shuffle(rng);
        self.street = Street::Preflop;
        self.raises = 0;
        let sb_seat = if players == 2 {
            self.button
        } else {
            self.seat_from(self.button + 1, |i| self.in_hand[i])
                .expect("players")
        };
        let bb_seat = self
            .seat_from(sb_seat + 1, |i| self.in_hand[i])
            .expect("players");
        self.pay(sb_seat, self.small_bet / 2);
        self.pay(bb_seat, self.small_bet);
        self.current_bet = self.bets.iter().copied().max().unwrap_or(0);
        for i in 0..self.seats {
            self.needs_action[i] = self.can_act(i);
        }
        let first = if players == 2 {
            self.button
        } else {
            bb_seat + 1
        };
        self.to_act = self
            .seat_from(first, |i| self.can_act(i))
            .unwrap_or(first % self.seats);
    }

    fn betting_done(&self) -> bool {
        let actors: Vec<usize> = (0..self.seats).filter(|&i| self.can_act(i)).collect();
        match actors.as_slice() {
            [] => true,
            [only] => !self.needs_action[*only] || self.bets[*only] >= self.current_bet,
            _ => actors.iter().all(|&i| !self.needs_action[i]),
        }
    }

    fn award_and_next(&mut self, rng: &mut ArenaRng) {
        let showdown = (0..self.seats).filter(|&i| self.live(i)).count() > 1;
        let board: Vec<Card> = self.deck[2 * self.seats..2 * self.seats + 5].to_vec();
        let table: Vec<Contender> = (0..self.seats)
            .map(|i| Contender {
                committed: self.committed[i],
                folded: !self.live(i),
                hand: (showdown && self.live(i)).then(|| {
                    let mut seven = board.clone();
                    seven.extend_from_slice(&self.hole(i));
                    cards::evaluate_unchecked(&seven)
                }),
            })
            .collect();
        let paid = settle_showdown(&table, self.button);
        for (i, p) in paid.into_iter().enumerate() {
            self.stacks[i] += p;
        }
        self.committed.iter_mut().for_each(|c| *c = 0);
        self.hand += 1;
        self.start_hand(rng);
    }

    /// Moves the hand forward until a seat must decide or the match ends.
    fn progress(&mut self, last: usize, rng: &mut ArenaRng) {
        let mut last = last;
        while !self.over {
            if (0..self.seats).filter(|&i| self.live(i)).count() == 1 {
                self.award_and_next(rng);
                last = self.to_act.wrapping_sub(1);
                if self.over || !self.betting_done() {
                    return;
                }
                continue;
            }
            if !self.betting_done() {
                self.to_act = self
                    .seat_from(last.wrapping_add(1) % self.seats, |i| {
                        self.can_act(i) && self.needs_action[i]
                    })
                    .expect("pending actor");
                return;
            }
            let actors = (0..self.seats).filter(|&i| self.can_act(i)).count();
            match self.street.next() {
                Some(next) if actors >= 2 => {
                    self.street = next;
                    self.bets.iter_mut().for_each(|b| *b = 0);
                    self.current_bet = 0;
                    self.raises = 0;
                    for i in 0..self.seats {
                        self.needs_action[i] = self.can_act(i);
                    }
                    last = self.button;
                }
                _ => {
                    self.street = Street::River;
                    self.award_and_next(rng);
                    last = self.to_act.wrapping_sub(1);
                    if self.over || !self.betting_done() {
                        return;
                    }
                }
            }
        }
    }

    fn view_for(&self, seat: usize) -> View {
        View {
            hand: self.hand,
            hands: self.hands,
            button: self.button,
            street: self.street,
            hole: if self.over || !self.in_hand[seat] {
                Vec::new()
            } else {
                self.hole(seat).to_vec()
            },
            board: if self.over {
                Vec::new()
            } else {
                self.board().to_vec()
            },
            stacks: self.stacks.clone(),
            bets: self.bets.clone(),
            committed: self.committed.clone(),
            pot: self.pot(),
            current_bet: self.current_bet,
            to_call: self.current_bet.saturating_sub(self.bets[seat]),
            raises: self.raises,
            bet_size: self.bet_size(),
            folded: self.folded.clone(),
            in_hand: self.in_hand.clone(),
        }
    }

    fn net(&self, stacks: &[u64]) -> Vec<f64> {
        stacks
            .iter()
            .map(|&s| s as f64 - self.starting_stack as f64)
            .collect()
    }
}

impl Rules for Holdem {
    fn to_act(&self) -> usize {
        self.to_act
    }

    fn view(&self, seat: usize) -> Payload {
        Payload::Holdem(self.view_for(seat))
    }

    fn fill_mask(&self, seat: usize, bits: &mut [bool]) {
        bits.copy_from_slice(&self.legal(seat));
    }

    fn play(&mut self, seat: usize, action: usize, rng: &mut ArenaRng) {
        let to_call = self.current_bet.saturating_sub(self.bets[seat]);
        match action {
            FOLD => self.folded[seat] = true,
            CALL => self.pay(seat, to_call),
            RAISE => {
                self.pay(seat, to_call + self.bet_size());
                self.raises += 1;
            }
            _ => self.pay(seat, self.stacks[seat]),
        }
        self.needs_action[seat] = false;
        if self.bets[seat] > self.current_bet {
            self.current_bet = self.bets[seat];
            for i in 0..self.seats {
                if i != seat {
                    self.needs_action[i] = self.can_act(i);
                }
            }
        }
        self.progress(seat, rng);
    }

    fn finish(&self) -> Option<Finish> {
        self.over.then(|| Finish {
            scores: self.net(&self.stacks),
            success: None,
        })
    }

    /// The unfinished hand is voided.
    fn cut_off(&self) -> Finish {
        Finish {
            scores: self.net(&self.hand_start),
            success: None,
        }
    }

    fn forfeit_scores(&self, _offender: usize) -> Option<Vec<f64>> {
        Some(self.net(&self.hand_start))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards::parse_card;
    use crate::games::make_holdem;
    use crate::{GameConfig, GameState};
    use rand::seq::IteratorRandom;

    fn table(seats: u32, stack: u64, hands: u32) -> crate::GameDescriptor {
        GameConfig::Holdem {
            seats,
            starting_stack: stack,
            small_bet: 2,
            hands,
        }
        .descriptor()
        .unwrap()
    }

    #[test]
    fn descriptor_checks() {
        assert_eq!(make_holdem(2, 200, 2).unwrap().action_space, 4);
        assert!(make_holdem(1, 200, 2).is_err());
        assert!(make_holdem(10, 200, 2).is_err());
        assert_eq!(make_holdem(2, 200, 2).unwrap().step_cap, 1000);
    }

    #[test]
    fn heads_up_blinds_and_first_actor() {
        let s = GameState::new(&table(2, 100, 3), 1).unwrap();
        assert_eq!(s.to_act(), Some(0));
        let Payload::Holdem(v) = s.observe(0).unwrap().payload else {
            panic!()
        };
        assert_eq!(v.button, 0);
        assert_eq!(v.bets, [1, 2]);
        assert_eq!(v.to_call, 1);
        assert_eq!(v.hole.len(), 2);
        assert!(v.board.is_empty());
        assert_eq!(s.legal_mask(0).bits(), &[true, true, true, false]);
    }

    #[test]
    fn observation_hides_other_hole_cards() {
        let s = GameState::new(&table(3, 100, 1), 4).unwrap();
        let Board::Holdem(h) = s.board() else {
            panic!()
        };
        for seat in 0..3 {
            let obs = s.observe(seat).unwrap();
            let Payload::Holdem(v) = &obs.payload else {
                panic!()
            };
            assert_eq!(v.hole, h.hole(seat));
            for other in (0..3).filter(|&o| o != seat) {
                for c in h.hole(other) {
                    assert!(!v.hole.contains(&c));
                }
            }
        }
    }

    #[test]
    fn cap_reached_leaves_fold_and_call() {
        let mut s = GameState::new(&table(2, 1000, 1), 2).unwrap();
        // Preflop: raise four times, alternating.
        for _ in 0..4 {
            let seat = s.to_act().unwrap();
            s.apply(seat, RAISE).unwrap();
        }
        let seat = s.to_act().unwrap();
        assert_eq!(s.legal_mask(seat).bits(), &[true, true, false, false]);
    }

    #[test]
    fn short_stack_gets_all_in() {
        // Stack 3 with blinds 1/2: seat 0 posts 1, holds 2, faces 1 to call.
        let s = GameState::new(&table(2, 3, 1), 0).unwrap();
        assert_eq!(s.legal_mask(0).bits(), &[true, true, false, true]);
        let s = s.applied(0, ALL_IN).unwrap();
        // Seat 1 has 1 chip behind, faces 1 more: all-in to call.
        assert_eq!(s.legal_mask(1).bits(), &[true, true, false, true]);
        let s = s.applied(1, CALL).unwrap();
        assert!(s.is_terminal());
        let total: f64 = s.scores().iter().sum();
        assert_eq!(total, 0.0);
    }

    #[test]
    fn check_down_splits_or_awards_and_conserves() {
        let mut s = GameState::new(&table(3, 50, 1), 9).unwrap();
        while !s.is_terminal() {
            let seat = s.to_act().unwrap();
            s.apply(seat, CALL).unwrap();
        }
        let sum: f64 = s.scores().iter().sum();
        assert_eq!(sum, 0.0);
    }

    fn contender(committed: u64, folded: bool, cards: &str) -> Contender {
        let cs: Vec<Card> = cards
            .split_whitespace()
            .map(|c| parse_card(c).unwrap())
            .collect();
        Contender {
            committed,
            folded,
            hand: (!folded).then(|| cards::evaluate(&cs).unwrap()),
        }
    }

    #[test]
    fn single_live_seat_takes_everything() {
        let t = [
            Contender {
                committed: 10,
                folded: true,
                hand: None,
            },
            Contender {
                committed: 4,
                folded: false,
                hand: None,
            },
            Contender {
                committed: 2,
                folded: true,
                hand: None,
            },
        ];
        assert_eq!(settle_showdown(&t, 0), [0, 16, 0]);
    }

    #[test]
    fn split_pot_odd_chip_left_of_button() {
        let board = "2c 7d 9h Jc Ks";
        let a = contender(5, false, &alloc::format!("{board} 3d 4d"));
        let b = contender(5, false, &alloc::format!("{board} 3h 4h"));
        let c = Contender {
            committed: 5,
            folded: true,
            hand: None,
        };
        // 15 chips, two winners: 7 + 8 with the extra to the first winner
        // left of the button.
        assert_eq!(settle_showdown(&[a, b, c], 0), [7, 8, 0]);
        assert_eq!(settle_showdown(&[a, b, c], 1), [8, 7, 0]);
    }

    #[test]
    fn short_stack_wins_main_pot_only() {
        // Seat 0 all-in for 20 with the best hand; seats 1 and 2 put in 50.
        let board = "2c 7d 9h Jc Ks";
        let t = [
            contender(20, false, &alloc::format!("{board} Kd Kh")),
            contender(50, false, &alloc::format!("{board} Jd Jh")),
            contender(50, false, &alloc::format!("{board} 3d 4h")),
        ];
        // Main pot 3 * 20 = 60 to seat 0, side pot 2 * 30 = 60 to seat 1.
        assert_eq!(settle_showdown(&t, 2), [60, 60, 0]);
    }

    #[test]
    fn random_hands_conserve_chips() {
        let mut rng = crate::seed::rng(21);
        for seed in 0..40 {
            let seats = 2 + (seed % 8) as u32;
            let d = table(seats, 30, 10);
            let mut s = GameState::new(&d, seed).unwrap();
            let total = 30 * u64::from(seats);
            while !s.is_terminal() {
                let seat = s.to_act().unwrap();
                let a = s.legal_mask(seat).legal_actions().choose(&mut rng).unwrap();
                s.apply(seat, a).unwrap();
                let Board::Holdem(h) = s.board() else {
                    panic!()
                };
                assert_eq!(h.total_chips(), total);
            }
            let sum: f64 = s.scores().iter().sum();
            assert_eq!(sum, 0.0);
        }
    }

    use crate::engine::Board;
}
