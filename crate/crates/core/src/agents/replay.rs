use std::collections::VecDeque;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Transition<A> {
    pub state: Vec<f64>,
    pub action: A,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub terminal: bool,
}

/// Bounded FIFO of transitions; the oldest entry is evicted when full.
#[derive(Debug, Clone)]
pub struct ReplayBuffer<A> {
    capacity: usize,
    items: VecDeque<Transition<A>>,
}

impl<A> ReplayBuffer<A> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            capacity,
            items: VecDeque::with_capacity(capacity),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, t: Transition<A>) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(t);
    }

    pub fn get(&self, i: usize) -> Option<&Transition<A>> {
        self.items.get(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition<A>> {
        self.items.iter()
    }

    /// Distinct positions drawn uniformly without replacement.
    pub fn sample_indices<R: Rng + ?Sized>(&self, batch: usize, rng: &mut R) -> Result<Vec<usize>> {
        if batch > self.items.len() {
            return Err(Error::usage(format!(
                "cannot sample {batch} transitions from a buffer of {}",
                self.items.len()
            )));
        }
        Ok(rand::seq::index::sample(rng, self.items.len(), batch).into_vec())
    }

    pub fn sample<R: Rng + ?Sized>(&self, batch: usize, rng: &mut R) -> Result<Vec<&Transition<A>>> {
        Ok(self
            .sample_indices(batch, rng)?
            .into_iter()
            .map(|i| &self.items[i])
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn t(i: usize) -> Transition<usize> {
        Transition {
            state: vec![i as f64],
            action: i,
            reward: 0.0,
            next_state: vec![],
            terminal: false,
        }
    }

    #[test]
    fn evicts_oldest() {
        let mut b = ReplayBuffer::new(2000);
        for i in 0..2001 {
            b.push(t(i));
        }
        assert_eq!(b.len(), 2000);
        assert_eq!(b.get(0).unwrap().action, 1);
        assert_eq!(b.get(1999).unwrap().action, 2000);
    }

    #[test]
    fn exhaustive_sample_is_permutation() {
        let mut b = ReplayBuffer::new(200);
        for i in 0..128 {
            b.push(t(i));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let mut got: Vec<usize> = b.sample(128, &mut rng).unwrap().iter().map(|x| x.action).collect();
        got.sort_unstable();
        assert_eq!(got, (0..128).collect::<Vec<_>>());
        assert!(matches!(b.sample(129, &mut rng), Err(Error::Usage(_))));
    }
}
