use serde::Serialize;

use super::{step_probs, WalkParams};
use crate::error::{Error, Result};

/// Default cap on the number of DP steps. The cost is O(n²) cell updates.
pub const DEFAULT_DP_CAP: usize = 20_000;

/// Parity of the sites that carry mass, i.e. of start + n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn of(k: usize) -> Self {
        if k.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Exact law of X_n under P_start, on sites 0..=start+n.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    pub parity: Parity,
    pub probs: Vec<f64>,
    pub steps: usize,
    pub start: usize,
}

impl Distribution {
    pub fn prob(&self, y: usize) -> f64 {
        self.probs.get(y).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(y, p)| y as f64 * p)
            .sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Sites that can carry mass: y ≤ start + n with y ≡ start + n (mod 2).
    pub fn reachable(&self) -> impl Iterator<Item = usize> + '_ {
        let first = (self.start + self.steps) % 2;
        (first..self.probs.len()).step_by(2)
    }
}

/// Steps the forward equation one step at a time, so that a whole
/// trajectory of laws (or of means) costs a single O(n²) sweep.
#[derive(Debug, Clone)]
pub struct Evolver {
    start: usize,
    steps: usize,
    cap: usize,
    up: Vec<f64>,
    down: Vec<f64>,
    cur: Vec<f64>,
    next: Vec<f64>,
}

impl Evolver {
    pub fn new(params: &WalkParams, start: usize, cap: usize) -> Self {
        let len = start + cap + 2;
        let (up, down) = (0..len).map(|y| step_probs(params, y as u64)).unzip();
        let mut cur = vec![0.0; len];
        cur[start] = 1.0;
        Self {
            start,
            steps: 0,
            cap,
            up,
            down,
            cur,
            next: vec![0.0; len],
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Advance one step.
    pub fn step(&mut self) -> Result<()> {
        if self.steps >= self.cap {
            return Err(Error::Resource {
                what: "DP steps",
                requested: self.steps + 1,
                cap: self.cap,
            });
        }
        let hi = self.start + self.steps + 1;
        let first = hi % 2;
        let (cur, next) = (&self.cur, &mut self.next);
        // `next` holds the law two steps back, which has the same parity as
        // the new one, so the opposite parity class is already zero.
        for y in (first..=hi).step_by(2) {
            let from_below = if y > 0 {
                cur[y - 1] * self.up[y - 1]
            } else {
                0.0
            };
            next[y] = from_below + cur[y + 1] * self.down[y + 1];
        }
        std::mem::swap(&mut self.cur, &mut self.next);
        self.steps += 1;
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        let hi = self.start + self.steps;
        let first = hi % 2;
        (first..=hi)
            .step_by(2)
            .map(|y| y as f64 * self.cur[y])
            .sum()
    }

    pub fn prob(&self, y: usize) -> f64 {
        if y <= self.start + self.steps {
            self.cur[y]
        } else {
            0.0
        }
    }

    pub fn distribution(&self) -> Distribution {
        let hi = self.start + self.steps;
        Distribution {
            parity: Parity::of(hi),
            probs: self.cur[..=hi].to_vec(),
            steps: self.steps,
            start: self.start,
        }
    }
}

/// Exact law of X_n started at `start`, with the default step cap.
pub fn evolve(params: &WalkParams, start: usize, n: usize) -> Result<Distribution> {
    evolve_with_cap(params, start, n, DEFAULT_DP_CAP)
}

pub fn evolve_with_cap(
    params: &WalkParams,
    start: usize,
    n: usize,
    cap: usize,
) -> Result<Distribution> {
    if n > cap {
        return Err(Error::Resource {
            what: "DP steps",
            requested: n,
            cap,
        });
    }
    let mut ev = Evolver::new(params, start, n);
    for _ in 0..n {
        ev.step()?;
    }
    Ok(ev.distribution())
}

/// E_start X_n.
pub fn expected_position(params: &WalkParams, start: usize, n: usize) -> Result<f64> {
    Ok(evolve(params, start, n)?.mean())
}

/// E_start X_k for k = 0..=n in one sweep.
pub fn mean_trajectory(params: &WalkParams, start: usize, n: usize) -> Result<Vec<f64>> {
    let mut ev = Evolver::new(params, start, n);
    let mut out = Vec::with_capacity(n + 1);
    out.push(start as f64);
    for _ in 0..n {
        ev.step()?;
        out.push(ev.mean());
    }
    Ok(out)
}
