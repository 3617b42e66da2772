use qpoker_core::qcore::sample::sample;
use qpoker_core::qcore::state::simulate;
use qpoker_core::{Circuit, StateVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::card::{CardKind, Placement};
use crate::community::reversal_hand;
use crate::config::{GameConfig, Scoring};
use crate::error::{GameError, GameResult};
use crate::log::GameEvent;
use crate::pots::{side_pots, split};

const PAIRED_PURITY: f64 = 1.0 - 1e-6;
const BENCHMARK_ATTEMPTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Round {
    Preflop,
    Flop,
    Turn,
    River,
    /// Betting is over; players place cards before scoring.
    Showdown,
    Complete,
}

impl Round {
    pub fn is_betting(self) -> bool {
        self < Round::Showdown
    }

    pub fn name(self) -> &'static str {
        match self {
            Round::Preflop => "preflop",
            Round::Flop => "flop",
            Round::Turn => "turn",
            Round::River => "river",
            Round::Showdown => "showdown",
            Round::Complete => "complete",
        }
    }
}

/// `Raise(a)` raises the current bet by `a` chips.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "amount")]
pub enum Action {
    Fold,
    Check,
    Call,
    Raise(u64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Player {
    pub stack: u64,
    pub hand: Vec<CardKind>,
    pub folded: bool,
    /// Chips put in during the current betting round.
    pub bet: u64,
    /// Chips put in during the whole hand.
    pub committed: u64,
    pub acted: bool,
    pub placements: Vec<Placement>,
}

impl Player {
    pub fn all_in(&self) -> bool {
        !self.folded && self.stack == 0
    }

    fn live(&self) -> bool {
        !self.folded && self.stack > 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Score {
    pub seat: usize,
    pub points: u32,
    /// The measured bit string, `q_{n−1}…q_0`.
    pub bits: String,
    pub expected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PotAward {
    pub amount: u64,
    pub eligible: Vec<usize>,
    pub winners: Vec<usize>,
    pub shares: Vec<(usize, u64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HandOutcome {
    pub scores: Vec<Score>,
    pub pots: Vec<PotAward>,
    pub payouts: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QubitPreview {
    pub qubit: usize,
    pub p_one: f64,
    pub paired: bool,
}

/// What the seat to act may do. Raise bounds are raise sizes above the current bet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LegalActions {
    pub check: bool,
    pub call: Option<u64>,
    pub raise: Option<(u64, u64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GameState {
    pub config: GameConfig,
    pub players: Vec<Player>,
    pub dealer: usize,
    pub round: Round,
    pub current_bet: u64,
    pub min_raise: u64,
    pub to_act: Option<usize>,
    pub community: Circuit,
    pub revealed: usize,
    pub benchmark: bool,
    pub outcome: Option<HandOutcome>,
    pub log: Vec<GameEvent>,
    #[serde(skip)]
    rng: ChaCha8Rng,
}

impl GameState {
    pub fn new_hand(config: &GameConfig, stacks: &[u64], dealer: usize) -> GameResult<Self> {
        Self::start(config, stacks, dealer, false)
    }

    /// A hand where every player holds the cards that undo the community circuit and
    /// scores count measured 0s.
    pub fn benchmark_hand(config: &GameConfig, stacks: &[u64], dealer: usize) -> GameResult<Self> {
        Self::start(config, stacks, dealer, true)
    }

    fn start(config: &GameConfig, stacks: &[u64], dealer: usize, benchmark: bool) -> GameResult<Self> {
        let n = stacks.len();
        if n < 2 {
            return Err(GameError::Config("at least two players are needed".into()));
        }
        if stacks.contains(&0) {
            return Err(GameError::Config("every seated player needs chips".into()));
        }
        if dealer >= n {
            return Err(GameError::NoSuchSeat(dealer));
        }
        if !benchmark {
            config.validate(n)?;
        } else {
            config.validate(0)?;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let nq = config.n_community_qubits;
        let mut players: Vec<Player> = stacks
            .iter()
            .map(|&stack| Player { stack, hand: vec![], folded: false, bet: 0, committed: 0, acted: false, placements: vec![] })
            .collect();

        let community;
        if benchmark {
            let mut found = None;
            for _ in 0..BENCHMARK_ATTEMPTS {
                let c = config.community.generate(nq, &mut rng)?;
                if let Some(hand) = reversal_hand(&c) {
                    found = Some((c, hand));
                    break;
                }
            }
            let (c, hand) = found.ok_or_else(|| GameError::Config("community circuit cannot be undone with cards".into()))?;
            for p in &mut players {
                p.hand = hand.iter().map(|pl| pl.card).collect();
            }
            community = c;
        } else {
            community = config.community.generate(nq, &mut rng)?;
            let mut deck = config.deck_cards();
            deck.shuffle(&mut rng);
            let mut cards = deck.into_iter();
            for k in 1..=n {
                let seat = (dealer + k) % n;
                players[seat].hand = cards.by_ref().take(config.hand_size).collect();
            }
        }

        let (sb, bb) = if n == 2 { (dealer, (dealer + 1) % n) } else { ((dealer + 1) % n, (dealer + 2) % n) };
        let mut state = GameState {
            config: config.clone(),
            players,
            dealer,
            round: Round::Preflop,
            current_bet: 0,
            min_raise: config.big_blind,
            to_act: None,
            community,
            revealed: 0,
            benchmark,
            outcome: None,
            log: vec![GameEvent::NewHand { config: config.clone(), stacks: stacks.to_vec(), dealer, benchmark }],
            rng,
        };
        state.post(sb, config.small_blind);
        state.post(bb, config.big_blind);
        state.current_bet = state.players.iter().map(|p| p.bet).max().unwrap_or(0);
        state.progress(bb);
        Ok(state)
    }

    fn post(&mut self, seat: usize, amount: u64) {
        let p = &mut self.players[seat];
        let pay = amount.min(p.stack);
        p.stack -= pay;
        p.bet += pay;
        p.committed += pay;
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.config.n_community_qubits
    }

    /// Chips not yet paid out.
    pub fn pot(&self) -> u64 {
        if self.outcome.is_some() {
            0
        } else {
            self.players.iter().map(|p| p.committed).sum()
        }
    }

    pub fn total_chips(&self) -> u64 {
        self.players.iter().map(|p| p.stack).sum::<u64>() + self.pot()
    }

    pub fn is_complete(&self) -> bool {
        self.round == Round::Complete
    }

    fn seat(&self, seat: usize) -> GameResult<&Player> {
        self.players.get(seat).ok_or(GameError::NoSuchSeat(seat))
    }

    fn unfolded(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.players.len()).filter(|&i| !self.players[i].folded)
    }

    pub fn legal_actions(&self, seat: usize) -> GameResult<LegalActions> {
        let p = self.seat(seat)?;
        if !self.round.is_betting() {
            return Err(GameError::WrongPhase(self.round.name().into()));
        }
        if p.folded {
            return Err(GameError::Folded(seat));
        }
        if self.to_act != Some(seat) {
            return Err(GameError::OutOfTurn(seat));
        }
        let owed = self.current_bet - p.bet;
        let opponents_live = (0..self.players.len()).any(|i| i != seat && self.players[i].live());
        let raise = (opponents_live && !p.acted && p.stack > owed).then(|| {
            let max = p.stack - owed;
            (self.min_raise.min(max), max)
        });
        Ok(LegalActions { check: owed == 0, call: (owed > 0).then(|| owed.min(p.stack)), raise })
    }

    pub fn act(&mut self, seat: usize, action: Action) -> GameResult<()> {
        let legal = self.legal_actions(seat)?;
        let p = &mut self.players[seat];
        match action {
            Action::Fold => p.folded = true,
            Action::Check => {
                if !legal.check {
                    return Err(GameError::IllegalAction(format!("cannot check facing a bet of {}", self.current_bet)));
                }
            }
            Action::Call => {
                let pay = legal.call.ok_or_else(|| GameError::IllegalAction("nothing to call".into()))?;
                p.stack -= pay;
                p.bet += pay;
                p.committed += pay;
            }
            Action::Raise(amount) => {
                let (min, max) = legal.raise.ok_or_else(|| GameError::IllegalAction("raising is not open".into()))?;
                if amount == 0 || amount > max {
                    return Err(GameError::IllegalAction(format!("raise of {amount} outside 1..={max}")));
                }
                if amount < min {
                    return Err(GameError::RaiseBelowMinimum { min, got: amount });
                }
                let pay = self.current_bet + amount - p.bet;
                p.stack -= pay;
                p.bet += pay;
                p.committed += pay;
                self.current_bet = p.bet;
                if amount >= self.min_raise {
                    self.min_raise = amount;
                    for q in &mut self.players {
                        q.acted = false;
                    }
                }
            }
        }
        self.players[seat].acted = true;
        self.log.push(GameEvent::Act { seat, action });
        self.progress(seat);
        Ok(())
    }

    fn betting_done(&self) -> bool {
        let live: Vec<&Player> = self.players.iter().filter(|p| p.live()).collect();
        match live.as_slice() {
            [] => true,
            [p] => p.bet >= self.current_bet,
            _ => live.iter().all(|p| p.acted && p.bet == self.current_bet),
        }
    }

    fn next_needing(&self, from: usize) -> Option<usize> {
        let n = self.players.len();
        (1..=n)
            .map(|k| (from + k) % n)
            .find(|&s| self.players[s].live() && (!self.players[s].acted || self.players[s].bet < self.current_bet))
    }

    fn progress(&mut self, from: usize) {
        if self.unfolded().count() == 1 {
            self.to_act = None;
            self.award(vec![]);
            return;
        }
        if !self.betting_done() {
            self.to_act = self.next_needing(from);
            return;
        }
        loop {
            for p in &mut self.players {
                p.bet = 0;
                p.acted = false;
            }
            self.current_bet = 0;
            self.min_raise = self.config.big_blind;
            let nq = self.num_qubits();
            (self.round, self.revealed) = match self.round {
                Round::Preflop => (Round::Flop, nq.min(3)),
                Round::Flop => (Round::Turn, nq.min(4)),
                Round::Turn => (Round::River, nq),
                _ => (Round::Showdown, nq),
            };
            if self.round == Round::Showdown {
                self.to_act = None;
                return;
            }
            if !self.betting_done() {
                self.to_act = self.next_needing(self.dealer);
                return;
            }
        }
    }

    pub fn place_gate(&mut self, seat: usize, card: CardKind, targets: &[usize]) -> GameResult<()> {
        let p = self.seat(seat)?;
        if self.round != Round::Showdown {
            return Err(GameError::WrongPhase(self.round.name().into()));
        }
        if p.folded {
            return Err(GameError::Folded(seat));
        }
        if targets.len() != card.arity() {
            return Err(GameError::BadTargets(format!("{card} takes {} qubit(s)", card.arity())));
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(GameError::BadTargets(format!("repeated qubit {}", targets[0])));
        }
        if let Some(&q) = targets.iter().find(|&&q| q >= self.revealed) {
            return Err(GameError::BadTargets(format!("qubit {q} is not revealed")));
        }
        let k = p.hand.iter().position(|&c| c == card).ok_or_else(|| GameError::CardNotInHand(card.to_string()))?;
        let p = &mut self.players[seat];
        p.hand.remove(k);
        p.placements.push(Placement::new(card, targets));
        self.log.push(GameEvent::Place { seat, card, targets: targets.to_vec() });
        Ok(())
    }

    /// The community circuit followed by the seat's placed cards.
    pub fn personal_circuit(&self, seat: usize) -> GameResult<Circuit> {
        let p = self.seat(seat)?;
        let mut c = self.community.clone();
        c.name = None;
        for pl in &p.placements {
            for g in pl.card.gates(&pl.targets) {
                c.push(g);
            }
        }
        Ok(c)
    }

    pub fn personal_state(&self, seat: usize) -> GameResult<StateVector> {
        Ok(simulate(&self.personal_circuit(seat)?)?)
    }

    /// Exact `P(1)` and pairing of every revealed qubit for one seat.
    pub fn preview(&self, seat: usize) -> GameResult<Vec<QubitPreview>> {
        if self.seat(seat)?.folded {
            return Err(GameError::Folded(seat));
        }
        let s = self.personal_state(seat)?;
        (0..self.revealed)
            .map(|q| Ok(QubitPreview { qubit: q, p_one: s.prob_one(q)?, paired: s.reduced_purity(q)? < PAIRED_PURITY }))
            .collect()
    }

    /// Scores every unfolded seat from one shot and pays out the pots.
    pub fn showdown(&mut self) -> GameResult<&HandOutcome> {
        if self.round != Round::Showdown {
            return Err(GameError::WrongPhase(self.round.name().into()));
        }
        let nq = self.num_qubits();
        let seats: Vec<usize> = self.unfolded().collect();
        let mut scores = Vec::with_capacity(seats.len());
        for seat in seats {
            let state = self.personal_state(seat)?;
            let counts = sample(&state, 1, &mut self.rng)?;
            let outcome = counts.as_slice().iter().position(|&c| c > 0).expect("one shot");
            let ones = outcome.count_ones();
            let mean_ones: f64 = state.probabilities().iter().enumerate().map(|(i, p)| p * i.count_ones() as f64).sum();
            let (points, expected) =
                if self.benchmark { (nq as u32 - ones, nq as f64 - mean_ones) } else { (ones, mean_ones) };
            scores.push(Score { seat, points, bits: qpoker_core::qcore::sample::bitstring(outcome, nq), expected });
        }
        self.log.push(GameEvent::Showdown);
        self.award(scores);
        Ok(self.outcome.as_ref().expect("just awarded"))
    }

    fn award(&mut self, scores: Vec<Score>) {
        let n = self.players.len();
        let key = |seat: usize| -> f64 {
            scores
                .iter()
                .find(|s| s.seat == seat)
                .map(|s| match self.config.scoring {
                    Scoring::Shot => s.points as f64,
                    Scoring::Expectation => s.expected,
                })
                .unwrap_or(0.0)
        };
        let committed: Vec<u64> = self.players.iter().map(|p| p.committed).collect();
        let folded: Vec<bool> = self.players.iter().map(|p| p.folded).collect();
        let mut payouts = vec![0u64; n];
        let pots = side_pots(&committed, &folded)
            .into_iter()
            .map(|pot| {
                let best = pot.eligible.iter().map(|&s| key(s)).fold(f64::NEG_INFINITY, f64::max);
                let winners: Vec<usize> = pot.eligible.iter().copied().filter(|&s| best - key(s) < 1e-9).collect();
                let shares = split(pot.amount, &winners, self.dealer, n);
                for &(s, a) in &shares {
                    payouts[s] += a;
                }
                PotAward { amount: pot.amount, eligible: pot.eligible, winners, shares }
            })
            .collect();
        for (p, a) in self.players.iter_mut().zip(&payouts) {
            p.stack += a;
        }
        self.outcome = Some(HandOutcome { scores, pots, payouts });
        self.round = Round::Complete;
        self.to_act = None;
    }

    /// SHA-256 of the serialized state and the position of its random stream.
    pub fn state_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(self).expect("state serializes"));
        h.update(self.rng.get_word_pos().to_le_bytes());
        hex::encode(h.finalize())
    }
}
