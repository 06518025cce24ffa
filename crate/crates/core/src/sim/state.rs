/// Queue lengths kept in nonincreasing order, with level counts.
///
/// Rank `0` is a longest queue. Joining increments the first entry holding
/// the old value and leaving decrements the last one, so order is preserved
/// without re-sorting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct SortedQueues {
    lengths: Vec<u32>,
    /// `at_least[k]`: number of queues with length `≥ k`.
    at_least: Vec<u64>,
}

impl SortedQueues {
    pub fn new(n: usize) -> Self {
        Self {
            lengths: vec![0; n],
            at_least: vec![n as u64],
        }
    }

    pub fn busy(&self) -> usize {
        self.at_least(1) as usize
    }

    pub fn at_least(&self, k: usize) -> u64 {
        self.at_least.get(k).copied().unwrap_or(0)
    }

    /// Highest level with a nonzero count.
    pub fn max_level(&self) -> usize {
        self.at_least.len() - 1
    }

    pub fn length_at(&self, rank: usize) -> u32 {
        self.lengths[rank]
    }

    pub fn total(&self) -> u64 {
        self.at_least[1..].iter().sum()
    }

    /// One customer joins the queue at `rank`. Returns the level whose count
    /// went up.
    pub fn join(&mut self, rank: usize) -> usize {
        let v = self.lengths[rank];
        let first = self.lengths.partition_point(|x| *x > v);
        self.lengths[first] += 1;
        let level = v as usize + 1;
        if level == self.at_least.len() {
            self.at_least.push(0);
        }
        self.at_least[level] += 1;
        level
    }

    /// One customer leaves the queue at `rank`, if it is nonempty. Returns
    /// the level whose count went down.
    pub fn leave(&mut self, rank: usize) -> Option<usize> {
        let v = self.lengths[rank];
        if v == 0 {
            return None;
        }
        let last = self.lengths.partition_point(|x| *x >= v) - 1;
        self.lengths[last] -= 1;
        let level = v as usize;
        self.at_least[level] -= 1;
        while self.at_least.len() > 1 && *self.at_least.last().expect("nonempty") == 0 {
            self.at_least.pop();
        }
        Some(level)
    }

    #[cfg(test)]
    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }
}
