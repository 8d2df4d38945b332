//! Tower of Hanoi. Disks are numbered 1 (smallest) to n and start on peg 0;
//! the puzzle is solved when every disk is on peg 2.

use alloc::vec::Vec;

use serde::Serialize;

use crate::engine::{Finish, Payload, Rules};
use crate::seed::ArenaRng;

pub const MAX_DISKS: u32 = 12;

/// Action index to (from, to) peg pair.
pub const MOVES: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];

pub const OBSERVATION_SCHEMA: &str =
    "{\"seat\": 0, \"to_act\": 0|null, \"disks\": int, \"pegs\": [[int]; 3]} \
each peg lists its disks from bottom to top; disk 1 is the smallest. All disks start on peg 0.";

pub const ACTION_ENCODING: &str = "0 = peg0->peg1, 1 = peg0->peg2, 2 = peg1->peg0, 3 = peg1->peg2, \
4 = peg2->peg0, 5 = peg2->peg1. A bit is false when the source peg is empty or its top disk is larger \
than the destination's top disk. Solved when all disks are on peg 2.";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct View {
    pub disks: usize,
    pub pegs: [Vec<u8>; 3],
}

pub fn action_of(from: usize, to: usize) -> Option<usize> {
    MOVES.iter().position(|&m| m == (from, to))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hanoi {
    pegs: [Vec<u8>; 3],
    disks: usize,
}

impl Hanoi {
    pub fn new(disks: usize) -> Self {
        Hanoi {
            pegs: [(1..=disks as u8).rev().collect(), Vec::new(), Vec::new()],
            disks,
        }
    }

    /// Builds a position from peg contents listed bottom to top.
    pub fn from_pegs(pegs: [Vec<u8>; 3]) -> Self {
        let disks = pegs.iter().map(Vec::len).sum();
        Hanoi { pegs, disks }
    }

    pub fn pegs(&self) -> &[Vec<u8>; 3] {
        &self.pegs
    }

    pub fn can_move(&self, from: usize, to: usize) -> bool {
        match (self.pegs[from].last(), self.pegs[to].last()) {
            (None, _) => false,
            (Some(_), None) => true,
            (Some(a), Some(b)) => a < b,
        }
    }

    pub fn is_solved(&self) -> bool {
        self.pegs[2].len() == self.disks
    }

    /// True when every peg is ordered largest at the bottom.
    pub fn is_valid(&self) -> bool {
        self.pegs.iter().all(|p| p.windows(2).all(|w| w[0] > w[1]))
    }

    /// Peg holding each disk, indexed by disk number (slot 0 unused).
    pub fn positions(&self) -> Vec<usize> {
        let mut at = alloc::vec![0; self.disks + 1];
        for (p, peg) in self.pegs.iter().enumerate() {
            for &d in peg {
                at[usize::from(d)] = p;
            }
        }
        at
    }

    pub fn apply_move(&mut self, action: usize) {
        let (from, to) = MOVES[action];
        let d = self.pegs[from].pop().expect("legal move");
        self.pegs[to].push(d);
    }
}

/// The classic optimal solution from the initial position: 2^n − 1 moves.
pub fn hanoi_optimal(disks: usize) -> Vec<usize> {
    fn rec(k: usize, from: usize, to: usize, out: &mut Vec<usize>) {
        if k == 0 {
            return;
        }
        let via = 3 - from - to;
        rec(k - 1, from, via, out);
        out.push(action_of(from, to).expect("distinct pegs"));
        rec(k - 1, via, to, out);
    }
    let mut out = Vec::with_capacity((1usize << disks) - 1);
    rec(disks, 0, 2, &mut out);
    out
}

/// First move of the shortest path from any valid position to "all on
/// peg 2", or `None` when already solved.
pub fn next_optimal_move(state: &Hanoi) -> Option<usize> {
    fn rec(at: &[usize], k: usize, target: usize) -> Option<(usize, usize)> {
        if k == 0 {
            return None;
        }
        if at[k] == target {
            return rec(at, k - 1, target);
        }
        let other = 3 - at[k] - target;
        rec(at, k - 1, other).or(Some((at[k], target)))
    }
    let at = state.positions();
    rec(&at, state.disks, 2).map(|(f, t)| action_of(f, t).expect("distinct pegs"))
}

impl Rules for Hanoi {
    fn to_act(&self) -> usize {
        0
    }

    fn view(&self, _seat: usize) -> Payload {
        Payload::Hanoi(View {
            disks: self.disks,
            pegs: self.pegs.clone(),
        })
    }

    fn fill_mask(&self, _seat: usize, bits: &mut [bool]) {
        for (a, &(f, t)) in MOVES.iter().enumerate() {
            bits[a] = self.can_move(f, t);
        }
    }

    fn play(&mut self, _seat: usize, action: usize, _rng: &mut ArenaRng) {
        self.apply_move(action);
    }

    fn finish(&self) -> Option<Finish> {
        self.is_solved().then(|| self.cut_off())
    }

    /// Score = disks resting on the target peg.
    fn cut_off(&self) -> Finish {
        Finish {
            scores: alloc::vec![self.pegs[2].len() as f64],
            success: Some(self.is_solved()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::make_hanoi;
    use crate::GameState;
    use alloc::collections::{BTreeSet, VecDeque};
    use rand::Rng;

    #[test]
    fn initial_state_and_mask() {
        let d = make_hanoi(3).unwrap();
        let s = GameState::new(&d, 99).unwrap();
        let crate::engine::Payload::Hanoi(v) = s.observe(0).unwrap().payload else {
            panic!()
        };
        assert_eq!(v.pegs[0], [3, 2, 1]);
        assert!(v.pegs[1].is_empty() && v.pegs[2].is_empty());
        assert_eq!(s.legal_mask(0).legal_actions().collect::<Vec<_>>(), [0, 1]);
        let s = s.applied(0, 1).unwrap();
        let crate::engine::Payload::Hanoi(v) = s.observe(0).unwrap().payload else {
            panic!()
        };
        assert_eq!(v.pegs[2], [1]);
    }

    #[test]
    fn disk_range_is_checked() {
        assert!(make_hanoi(0).is_err());
        assert!(make_hanoi(13).is_err());
        assert!(make_hanoi(12).is_ok());
    }

    #[test]
    fn reachable_state_count_is_three_to_the_n() {
        for n in 1..=6usize {
            let start = Hanoi::new(n);
            let mut seen = BTreeSet::new();
            let mut queue = VecDeque::from([start.clone()]);
            seen.insert(start.pegs.clone());
            while let Some(h) = queue.pop_front() {
                for (a, &(f, t)) in MOVES.iter().enumerate() {
                    if h.can_move(f, t) {
                        let mut next = h.clone();
                        next.apply_move(a);
                        if seen.insert(next.pegs.clone()) {
                            queue.push_back(next);
                        }
                    }
                }
            }
            assert_eq!(seen.len(), 3usize.pow(n as u32));
        }
    }

    #[test]
    fn optimal_sequence_lengths() {
        assert_eq!(hanoi_optimal(1), [1]);
        for n in 1..=10 {
            let seq = hanoi_optimal(n);
            assert_eq!(seq.len(), (1 << n) - 1);
            let mut h = Hanoi::new(n);
            for a in seq {
                let (f, t) = MOVES[a];
                assert!(h.can_move(f, t));
                h.apply_move(a);
            }
            assert!(h.is_solved());
        }
    }

    /// Distance to the goal by BFS over the whole state graph.
    fn bfs_distance(start: &Hanoi) -> usize {
        let mut seen = BTreeSet::from([start.pegs.clone()]);
        let mut queue = VecDeque::from([(start.clone(), 0)]);
        while let Some((h, d)) = queue.pop_front() {
            if h.is_solved() {
                return d;
            }
            for (a, &(f, t)) in MOVES.iter().enumerate() {
                if h.can_move(f, t) {
                    let mut next = h.clone();
                    next.apply_move(a);
                    if seen.insert(next.pegs.clone()) {
                        queue.push_back((next, d + 1));
                    }
                }
            }
        }
        unreachable!()
    }

    #[test]
    fn next_optimal_move_from_random_positions() {
        let mut rng = crate::seed::rng(5);
        for _ in 0..200 {
            let n = rng.gen_range(1..=5);
            let mut pegs: [Vec<u8>; 3] = Default::default();
            for d in (1..=n as u8).rev() {
                pegs[rng.gen_range(0..3)].push(d);
            }
            let mut h = Hanoi::from_pegs(pegs);
            let mut steps = 0;
            let expected = bfs_distance(&h);
            while let Some(a) = next_optimal_move(&h) {
                let (f, t) = MOVES[a];
                assert!(h.can_move(f, t));
                h.apply_move(a);
                steps += 1;
            }
            assert!(h.is_solved());
            assert_eq!(steps, expected);
        }
    }

    #[test]
    fn random_walk_never_breaks_ordering() {
        use rand::seq::IteratorRandom;
        let d = make_hanoi(5).unwrap();
        let mut rng = crate::seed::rng(11);
        let mut h = Hanoi::new(5);
        for _ in 0..10_000 {
            let mut bits = [false; 6];
            h.fill_mask(0, &mut bits);
            let a = (0..6).filter(|&a| bits[a]).choose(&mut rng).unwrap();
            h.apply_move(a);
            assert!(h.is_valid());
        }
        assert_eq!(d.step_cap, 128);
    }
}
