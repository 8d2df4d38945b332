//! Playing cards and poker hand evaluation.
//!
//! A card is an integer 0..52 equal to `13 * suit + rank`, rank 0 = deuce
//! through 12 = ace.

use core::fmt;

use serde::Serialize;
use thiserror::Error;

pub type Card = u8;

pub const DECK_SIZE: usize = 52;

pub const fn rank(card: Card) -> u8 {
    card % 13
}

pub const fn suit(card: Card) -> u8 {
    card / 13
}

pub const fn card(rank: u8, suit: u8) -> Card {
    13 * suit + rank
}

/// Parses two-character cards such as `"As"`, `"Td"`, `"2c"`.
pub fn parse_card(s: &str) -> Option<Card> {
    let mut chars = s.chars();
    let r = chars.next()?;
    let su = chars.next()?;
    if chars.next().is_some() {
        return None;
    }
    let rank = "23456789TJQKA".find(r.to_ascii_uppercase())? as u8;
    let suit = "cdhs".find(su.to_ascii_lowercase())? as u8;
    Some(card(rank, suit))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HandClass {
    HighCard,
    Pair,
    TwoPair,
    Trips,
    Straight,
    Flush,
    FullHouse,
    Quads,
    StraightFlush,
}

impl HandClass {
    pub const ALL: [HandClass; 9] = [
        HandClass::HighCard,
        HandClass::Pair,
        HandClass::TwoPair,
        HandClass::Trips,
        HandClass::Straight,
        HandClass::Flush,
        HandClass::FullHouse,
        HandClass::Quads,
        HandClass::StraightFlush,
    ];
}

/// Strength of the best five-card hand. Ordered by class, then by the
/// tie-break ranks in significance order (unused slots are zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HandRank {
    pub class: HandClass,
    pub kickers: [u8; 5],
}

impl fmt::Display for HandRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {:?}", self.class, self.kickers)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CardError {
    #[error("expected 5 to 7 cards, got {0}")]
    Count(usize),
    #[error("card {0} is out of range")]
    OutOfRange(Card),
    #[error("card {0} appears more than once")]
    Duplicate(Card),
}

/// Highest card of a five-long run in `ranks` (bit per rank), counting the
/// ace as low for the wheel.
fn straight_high(ranks: u16) -> Option<u8> {
    (4..13u8)
        .rev()
        .find(|&hi| (ranks >> (hi - 4)) & 0x1f == 0x1f)
        .or_else(|| (ranks & 0x100f == 0x100f).then_some(3))
}

/// The `n` highest ranks set in `ranks`, excluding `skip`.
fn top_ranks(ranks: u16, n: usize, out: &mut [u8]) {
    let mut k = 0;
    for r in (0..13u8).rev() {
        if k == n {
            break;
        }
        if ranks & (1 << r) != 0 {
            out[k] = r;
            k += 1;
        }
    }
}

/// Best five-card hand among 5, 6 or 7 distinct cards.
pub fn evaluate(cards: &[Card]) -> Result<HandRank, CardError> {
    if !(5..=7).contains(&cards.len()) {
        return Err(CardError::Count(cards.len()));
    }
    let mut seen = 0u64;
    for &c in cards {
        if usize::from(c) >= DECK_SIZE {
            return Err(CardError::OutOfRange(c));
        }
        if seen & (1 << c) != 0 {
            return Err(CardError::Duplicate(c));
        }
        seen |= 1 << c;
    }
    Ok(evaluate_unchecked(cards))
}

/// [`evaluate`] without input validation.
pub fn evaluate_unchecked(cards: &[Card]) -> HandRank {
    let mut counts = [0u8; 13];
    let mut suits = [0u16; 4];
    let mut any = 0u16;
    for &c in cards {
        counts[usize::from(rank(c))] += 1;
        suits[usize::from(suit(c))] |= 1 << rank(c);
        any |= 1 << rank(c);
    }
    let mut kickers = [0u8; 5];
    let hand = |class, kickers| HandRank { class, kickers };

    if let Some(&flush) = suits.iter().find(|s| s.count_ones() >= 5) {
        if let Some(hi) = straight_high(flush) {
            kickers[0] = hi;
            return hand(HandClass::StraightFlush, kickers);
        }
    }
    // Ranks by multiplicity, each list high to low.
    let mut quads = None;
    let mut trips = [0u8; 2];
    let mut n_trips = 0;
    let mut pairs = [0u8; 3];
    let mut n_pairs = 0;
    for r in (0..13u8).rev() {
        match counts[usize::from(r)] {
            4 => quads = quads.or(Some(r)),
            3 => {
                trips[n_trips] = r;
                n_trips += 1;
            }
            2 => {
                pairs[n_pairs] = r;
                n_pairs += 1;
            }
            _ => {}
        }
    }
    if let Some(q) = quads {
        kickers[0] = q;
        top_ranks(any & !(1 << q), 1, &mut kickers[1..]);
        return hand(HandClass::Quads, kickers);
    }
    if n_trips >= 1 && (n_trips >= 2 || n_pairs >= 1) {
        kickers[0] = trips[0];
        kickers[1] = if n_trips >= 2 {
            trips[1].max(pairs[0])
        } else {
            pairs[0]
        };
        return hand(HandClass::FullHouse, kickers);
    }
    if let Some(&flush) = suits.iter().find(|s| s.count_ones() >= 5) {
        top_ranks(flush, 5, &mut kickers);
        return hand(HandClass::Flush, kickers);
    }
    if let Some(hi) = straight_high(any) {
        kickers[0] = hi;
        return hand(HandClass::Straight, kickers);
    }
    if n_trips == 1 {
        kickers[0] = trips[0];
        top_ranks(any & !(1 << trips[0]), 2, &mut kickers[1..]);
        return hand(HandClass::Trips, kickers);
    }
    if n_pairs >= 2 {
        kickers[0] = pairs[0];
        kickers[1] = pairs[1];
        top_ranks(
            any & !(1 << pairs[0]) & !(1 << pairs[1]),
            1,
            &mut kickers[2..],
        );
        return hand(HandClass::TwoPair, kickers);
    }
    if n_pairs == 1 {
        kickers[0] = pairs[0];
        top_ranks(any & !(1 << pairs[0]), 3, &mut kickers[1..]);
        return hand(HandClass::Pair, kickers);
    }
    top_ranks(any, 5, &mut kickers);
    hand(HandClass::HighCard, kickers)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cards(s: &str) -> alloc::vec::Vec<Card> {
        s.split_whitespace()
            .map(|c| parse_card(c).unwrap())
            .collect()
    }

    #[test]
    fn encoding() {
        assert_eq!(parse_card("2c"), Some(0));
        assert_eq!(parse_card("Ac"), Some(12));
        assert_eq!(parse_card("2d"), Some(13));
        assert_eq!(parse_card("As"), Some(51));
        assert_eq!(parse_card("1s"), None);
    }

    #[test]
    fn named_hands() {
        let r = evaluate(&cards("As Ks Qs Js Ts 2d 3c")).unwrap();
        assert_eq!(r.class, HandClass::StraightFlush);
        assert_eq!(r.kickers[0], 12);
        let r = evaluate(&cards("Ah 2d 3c 4s 5h 9d Jc")).unwrap();
        assert_eq!(r.class, HandClass::Straight);
        assert_eq!(r.kickers[0], 3);
        let r = evaluate(&cards("Ah Ad Ac Kd Ks Kc 2h")).unwrap();
        assert_eq!(r.class, HandClass::FullHouse);
        assert_eq!(&r.kickers[..2], &[12, 11]);
        let r = evaluate(&cards("7h 7d 5c 5s 3h 3d Kc")).unwrap();
        assert_eq!(r.class, HandClass::TwoPair);
        assert_eq!(&r.kickers[..3], &[5, 3, 11]);
    }

    #[test]
    fn ordering_across_and_within_classes() {
        let wheel = evaluate(&cards("Ah 2d 3c 4s 5h")).unwrap();
        let six = evaluate(&cards("2d 3c 4s 5h 6h")).unwrap();
        assert!(six > wheel);
        let flush = evaluate(&cards("2h 5h 7h 9h Jh")).unwrap();
        assert!(flush > six);
        let pair_ace_king = evaluate(&cards("Ah Ad Kc 4s 3h")).unwrap();
        let pair_ace_queen = evaluate(&cards("Ah Ad Qc 4s 3h")).unwrap();
        assert!(pair_ace_king > pair_ace_queen);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(evaluate(&[0, 1, 2, 3]), Err(CardError::Count(4)));
        assert_eq!(evaluate(&[0, 1, 2, 3, 3]), Err(CardError::Duplicate(3)));
        assert_eq!(evaluate(&[0, 1, 2, 3, 52]), Err(CardError::OutOfRange(52)));
    }
}
