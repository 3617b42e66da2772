use serde::{Deserialize, Serialize};

/// One layer of the pot with the seats that can win it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pot {
    pub amount: u64,
    pub eligible: Vec<usize>,
}

/// Splits total contributions into a main pot and side pots.
///
/// A layer nobody unfolded can claim is folded into the layer below it.
pub fn side_pots(committed: &[u64], folded: &[bool]) -> Vec<Pot> {
    let mut levels: Vec<u64> = committed.iter().copied().filter(|&c| c > 0).collect();
    levels.sort_unstable();
    levels.dedup();
    let mut pots: Vec<Pot> = Vec::new();
    let mut prev = 0;
    for level in levels {
        let amount: u64 = committed.iter().map(|&c| c.min(level) - c.min(prev)).sum();
        let eligible: Vec<usize> = (0..committed.len()).filter(|&i| !folded[i] && committed[i] >= level).collect();
        prev = level;
        match (eligible.is_empty(), pots.last_mut()) {
            (true, Some(last)) => last.amount += amount,
            (true, None) => pots.push(Pot { amount, eligible: (0..committed.len()).filter(|&i| !folded[i]).collect() }),
            (false, Some(last)) if last.eligible == eligible => last.amount += amount,
            (false, _) => pots.push(Pot { amount, eligible }),
        }
    }
    pots
}

/// Splits `amount` evenly among `winners`; leftover chips go one each to the winners
/// closest clockwise after `dealer`.
pub fn split(amount: u64, winners: &[usize], dealer: usize, seats: usize) -> Vec<(usize, u64)> {
    let mut order: Vec<usize> = winners.to_vec();
    order.sort_by_key(|&s| (s + seats - dealer - 1) % seats);
    let share = amount / order.len() as u64;
    let odd = (amount % order.len() as u64) as usize;
    order.iter().enumerate().map(|(k, &s)| (s, share + u64::from(k < odd))).collect()
}
