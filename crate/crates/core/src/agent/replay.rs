use ndarray::{Array1, Array2};
use rand::seq::index;
use rand::Rng;

/// One stored transition.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub obs: Vec<f64>,
    pub action: Vec<f64>,
    pub reward: f64,
    pub cost: f64,
    pub next_obs: Vec<f64>,
    /// True only for genuine terminal states; time-limit ends stay false.
    pub terminal: bool,
}

#[derive(Debug, Clone)]
pub struct Batch {
    pub obs: Array2<f64>,
    pub actions: Array2<f64>,
    pub rewards: Array1<f64>,
    pub costs: Array1<f64>,
    pub next_obs: Array2<f64>,
    /// 1.0 where the transition is terminal.
    pub terminal: Array1<f64>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }
}

/// Fixed-capacity FIFO buffer in struct-of-arrays layout.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    obs_dim: usize,
    act_dim: usize,
    obs: Vec<f64>,
    actions: Vec<f64>,
    rewards: Vec<f64>,
    costs: Vec<f64>,
    next_obs: Vec<f64>,
    terminal: Vec<f64>,
    len: usize,
    head: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, obs_dim: usize, act_dim: usize) -> Self {
        assert!(capacity > 0);
        Self {
            capacity,
            obs_dim,
            act_dim,
            obs: vec![0.0; capacity * obs_dim],
            actions: vec![0.0; capacity * act_dim],
            rewards: vec![0.0; capacity],
            costs: vec![0.0; capacity],
            next_obs: vec![0.0; capacity * obs_dim],
            terminal: vec![0.0; capacity],
            len: 0,
            head: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn push(&mut self, t: &Transition) {
        assert_eq!(t.obs.len(), self.obs_dim);
        assert_eq!(t.next_obs.len(), self.obs_dim);
        assert_eq!(t.action.len(), self.act_dim);
        let i = self.head;
        self.obs[i * self.obs_dim..(i + 1) * self.obs_dim].copy_from_slice(&t.obs);
        self.next_obs[i * self.obs_dim..(i + 1) * self.obs_dim].copy_from_slice(&t.next_obs);
        self.actions[i * self.act_dim..(i + 1) * self.act_dim].copy_from_slice(&t.action);
        self.rewards[i] = t.reward;
        self.costs[i] = t.cost;
        self.terminal[i] = if t.terminal { 1.0 } else { 0.0 };
        self.head = (self.head + 1) % self.capacity;
        self.len = (self.len + 1).min(self.capacity);
    }

    /// Transition at logical position `k` (0 is the oldest retained).
    pub fn get(&self, k: usize) -> Transition {
        assert!(k < self.len);
        let i = (self.head + self.capacity - self.len + k) % self.capacity;
        Transition {
            obs: self.obs[i * self.obs_dim..(i + 1) * self.obs_dim].to_vec(),
            action: self.actions[i * self.act_dim..(i + 1) * self.act_dim].to_vec(),
            reward: self.rewards[i],
            cost: self.costs[i],
            next_obs: self.next_obs[i * self.obs_dim..(i + 1) * self.obs_dim].to_vec(),
            terminal: self.terminal[i] > 0.5,
        }
    }

    /// Uniform batch, distinct indices within the batch.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, batch: usize) -> Batch {
        let n = batch.min(self.len);
        let idx = index::sample(rng, self.len, n).into_vec();
        self.gather(&idx)
    }

    fn gather(&self, idx: &[usize]) -> Batch {
        let n = idx.len();
        let slot = |k: usize| (self.head + self.capacity - self.len + k) % self.capacity;
        let rows = |src: &[f64], dim: usize| {
            Array2::from_shape_fn((n, dim), |(r, c)| src[slot(idx[r]) * dim + c])
        };
        Batch {
            obs: rows(&self.obs, self.obs_dim),
            actions: rows(&self.actions, self.act_dim),
            rewards: Array1::from_shape_fn(n, |r| self.rewards[slot(idx[r])]),
            costs: Array1::from_shape_fn(n, |r| self.costs[slot(idx[r])]),
            next_obs: rows(&self.next_obs, self.obs_dim),
            terminal: Array1::from_shape_fn(n, |r| self.terminal[slot(idx[r])]),
        }
    }
}
