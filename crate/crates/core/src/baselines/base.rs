/// A UCB(α) learner whose clock only advances when it is played.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseUcb {
    pub alpha: f64,
    pub pulls: Vec<usize>,
    pub sums: Vec<f64>,
    pub plays: usize,
}

impl BaseUcb {
    pub fn new(alpha: f64, n_arms: usize) -> Self {
        Self {
            alpha,
            pulls: vec![0; n_arms],
            sums: vec![0.0; n_arms],
            plays: 0,
        }
    }

    /// Next arm: each arm once in order, then the largest index (lowest arm on ties).
    pub fn choose(&self) -> usize {
        if let Some(arm) = self.pulls.iter().position(|&t| t == 0) {
            return arm;
        }
        let log_round = ((self.plays + 1) as f64).ln();
        let index: Vec<f64> = (0..self.pulls.len())
            .map(|i| {
                let t = self.pulls[i] as f64;
                self.sums[i] / t + (self.alpha * log_round / t).sqrt()
            })
            .collect();
        crate::argmax_first(&index)
    }

    pub fn update(&mut self, arm: usize, reward: f64) {
        self.pulls[arm] += 1;
        self.sums[arm] += reward;
        self.plays += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::RewardTape;
    use crate::policies::run_ucb;

    #[test]
    fn alone_it_is_plain_ucb() {
        let tape = RewardTape::new(
            vec![vec![1.0, 0.0, 1.0, 1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0, 1.0, 1.0, 0.0]],
            0,
        );
        let expected = run_ucb(&tape, 0.7, 8, None).unwrap().choices;
        let mut base = BaseUcb::new(0.7, 2);
        let mut next = [0usize; 2];
        let mut got = Vec::new();
        for _ in 0..8 {
            let arm = base.choose();
            base.update(arm, tape.per_arm[arm][next[arm]]);
            next[arm] += 1;
            got.push(arm);
        }
        assert_eq!(got, expected);
    }
}
