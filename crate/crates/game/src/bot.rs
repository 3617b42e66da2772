use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::error::{GameError, GameResult};
use crate::state::{Action, GameState, Round};

/// A uniformly chosen legal action for the seat to act.
pub fn random_action<R: Rng + ?Sized>(state: &GameState, rng: &mut R) -> Option<(usize, Action)> {
    let seat = state.to_act?;
    let legal = state.legal_actions(seat).ok()?;
    let mut options = vec![Action::Fold];
    if legal.check {
        options.push(Action::Check);
    }
    if legal.call.is_some() {
        options.push(Action::Call);
        options.push(Action::Call);
    }
    if let Some((min, max)) = legal.raise {
        options.push(Action::Raise(rng.random_range(min..=max)));
        options.push(Action::Raise(if rng.random_bool(0.5) { min } else { max }));
    }
    Some((seat, *options.choose(rng).expect("fold is always available")))
}

/// Places a random subset of each unfolded seat's cards on random qubits.
pub fn random_placements<R: Rng + ?Sized>(state: &mut GameState, rng: &mut R) -> GameResult<()> {
    let nq = state.revealed;
    for seat in 0..state.num_players() {
        if state.players[seat].folded {
            continue;
        }
        let mut hand = state.players[seat].hand.clone();
        hand.shuffle(rng);
        let keep = rng.random_range(0..=hand.len());
        for card in hand.into_iter().take(keep) {
            let a = rng.random_range(0..nq);
            let targets = if card.arity() == 2 { vec![a, (a + rng.random_range(1..nq)) % nq] } else { vec![a] };
            state.place_gate(seat, card, &targets)?;
        }
    }
    Ok(())
}

/// Plays a whole hand with random legal decisions.
pub fn play_random_hand<R: Rng + ?Sized>(mut state: GameState, rng: &mut R) -> GameResult<GameState> {
    let limit = 1000;
    for _ in 0..limit {
        match state.round {
            Round::Complete => return Ok(state),
            Round::Showdown => {
                random_placements(&mut state, rng)?;
                state.showdown()?;
            }
            _ => {
                let (seat, action) = random_action(&state, rng)
                    .ok_or_else(|| GameError::IllegalAction("betting round with nobody to act".into()))?;
                state.act(seat, action)?;
            }
        }
    }
    Err(GameError::IllegalAction(format!("hand did not finish within {limit} steps")))
}
