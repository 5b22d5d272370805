//! Domain types for a RAN cluster: radio heads, virtual operators, the
//! allocation matrix and the proportional slicing rule.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("a game needs at least one RRH and one MVNO (got {rrhs} RRHs, {mvnos} MVNOs)")]
    Empty { rrhs: usize, mvnos: usize },
    #[error("RRH {id}: {reason}")]
    InvalidRrh { id: String, reason: &'static str },
    #[error("MVNO {id}: {reason}")]
    InvalidMvno { id: String, reason: &'static str },
    #[error("index out of range: {what} {index} >= {len}")]
    IndexOutOfRange { what: &'static str, index: usize, len: usize },
    #[error("allocation shape {got:?} does not match game shape {expected:?}")]
    ShapeMismatch { got: (usize, usize), expected: (usize, usize) },
    #[error("allocation row {row} is infeasible: sum {sum} vs demand {demand}, min entry {min}")]
    Infeasible { row: usize, sum: f64, demand: f64, min: f64 },
}

/// A remote radio head: the congestible resource of the game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rrh {
    pub id: String,
    /// Local planar coordinates in meters.
    pub position: (f64, f64),
    pub class_id: u32,
    /// Leasing price in price units.
    pub price: f64,
    /// Resource budget (resource elements per slot).
    pub capacity: f64,
    /// Number of users served without QoE degradation.
    pub qoe_users: f64,
}

impl Rrh {
    fn validate(&self) -> Result<(), ModelError> {
        let bad = |reason| Err(ModelError::InvalidRrh { id: self.id.clone(), reason });
        if !(self.capacity > 0.0) || !self.capacity.is_finite() {
            return bad("capacity must be positive and finite");
        }
        if !(self.price >= 0.0) || !self.price.is_finite() {
            return bad("price must be non-negative and finite");
        }
        if !(self.qoe_users > 0.0) || !self.qoe_users.is_finite() {
            return bad("qoe_users must be positive and finite");
        }
        Ok(())
    }
}

/// A mobile virtual network operator: one player of the game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mvno {
    pub id: String,
    pub user_count: f64,
    /// Weight of the monetary term against the congestion term.
    pub price_weight: f64,
}

impl Mvno {
    pub fn new(id: impl Into<String>, user_count: f64, price_weight: f64) -> Self {
        Mvno { id: id.into(), user_count, price_weight }
    }

    fn validate(&self) -> Result<(), ModelError> {
        let bad = |reason| Err(ModelError::InvalidMvno { id: self.id.clone(), reason });
        if !(self.user_count >= 0.0) || !self.user_count.is_finite() {
            return bad("user_count must be non-negative and finite");
        }
        if !(self.price_weight >= 0.0) || !self.price_weight.is_finite() {
            return bad("price_weight must be non-negative and finite");
        }
        Ok(())
    }
}

/// Immutable description of one cluster's congestion game.
///
/// Player index `m` follows `mvnos` order and resource index `r` follows
/// `rrhs` order; every solver iterates in this canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GameParts", into = "GameParts")]
pub struct GameInstance {
    rrhs: Vec<Rrh>,
    mvnos: Vec<Mvno>,
    inv_qoe: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GameParts {
    rrhs: Vec<Rrh>,
    mvnos: Vec<Mvno>,
}

impl TryFrom<GameParts> for GameInstance {
    type Error = ModelError;
    fn try_from(p: GameParts) -> Result<Self, ModelError> {
        GameInstance::new(p.rrhs, p.mvnos)
    }
}

impl From<GameInstance> for GameParts {
    fn from(g: GameInstance) -> Self {
        GameParts { rrhs: g.rrhs, mvnos: g.mvnos }
    }
}

impl GameInstance {
    pub fn new(rrhs: Vec<Rrh>, mvnos: Vec<Mvno>) -> Result<Self, ModelError> {
        if rrhs.is_empty() || mvnos.is_empty() {
            return Err(ModelError::Empty { rrhs: rrhs.len(), mvnos: mvnos.len() });
        }
        for r in &rrhs {
            r.validate()?;
        }
        for m in &mvnos {
            m.validate()?;
        }
        let inv_qoe = rrhs.iter().map(|r| 1.0 / r.qoe_users).collect();
        Ok(GameInstance { rrhs, mvnos, inv_qoe })
    }

    /// Convenience constructor for synthetic games: RRH `r` gets QoE capacity
    /// `qoe_users[r]` and price `prices[r]`; player `m` gets demand
    /// `demands[m]` and weight `weights[m]`.
    pub fn from_parameters(
        qoe_users: &[f64],
        prices: &[f64],
        demands: &[f64],
        weights: &[f64],
    ) -> Result<Self, ModelError> {
        if qoe_users.len() != prices.len() {
            return Err(ModelError::ShapeMismatch {
                got: (prices.len(), 0),
                expected: (qoe_users.len(), 0),
            });
        }
        if demands.len() != weights.len() {
            return Err(ModelError::ShapeMismatch {
                got: (weights.len(), 0),
                expected: (demands.len(), 0),
            });
        }
        let rrhs = qoe_users
            .iter()
            .zip(prices)
            .enumerate()
            .map(|(r, (&n, &p))| Rrh {
                id: format!("rrh-{r}"),
                position: (0.0, 0.0),
                class_id: 0,
                price: p,
                capacity: n,
                qoe_users: n,
            })
            .collect();
        let mvnos = demands
            .iter()
            .zip(weights)
            .enumerate()
            .map(|(m, (&n, &w))| Mvno::new(format!("mvno-{m}"), n, w))
            .collect();
        GameInstance::new(rrhs, mvnos)
    }

    pub fn rrhs(&self) -> &[Rrh] {
        &self.rrhs
    }

    pub fn mvnos(&self) -> &[Mvno] {
        &self.mvnos
    }

    pub fn num_players(&self) -> usize {
        self.mvnos.len()
    }

    pub fn num_rrhs(&self) -> usize {
        self.rrhs.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.mvnos.len(), self.rrhs.len())
    }

    pub fn demand(&self, m: usize) -> f64 {
        self.mvnos[m].user_count
    }

    pub fn qoe_users(&self, r: usize) -> f64 {
        self.rrhs[r].qoe_users
    }

    /// `1 / N_r` for every RRH.
    pub fn inv_qoe(&self) -> &[f64] {
        &self.inv_qoe
    }

    /// Weighted price `π_m · p_r` paid per user.
    #[inline]
    pub fn eta(&self, m: usize, r: usize) -> f64 {
        self.mvnos[m].price_weight * self.rrhs[r].price
    }

    pub fn prices(&self) -> Vec<f64> {
        self.rrhs.iter().map(|r| r.price).collect()
    }

    pub fn demands(&self) -> Vec<f64> {
        self.mvnos.iter().map(|m| m.user_count).collect()
    }

    pub fn total_demand(&self) -> f64 {
        self.mvnos.iter().map(|m| m.user_count).sum()
    }

    /// Same game with RRH prices replaced.
    pub fn with_prices(&self, prices: &[f64]) -> Result<Self, ModelError> {
        self.check_len("price", prices.len(), self.rrhs.len())?;
        let mut rrhs = self.rrhs.clone();
        for (r, &p) in rrhs.iter_mut().zip(prices) {
            r.price = p;
        }
        GameInstance::new(rrhs, self.mvnos.clone())
    }

    /// Same game with player demands replaced.
    pub fn with_demands(&self, demands: &[f64]) -> Result<Self, ModelError> {
        self.check_len("demand", demands.len(), self.mvnos.len())?;
        let mut mvnos = self.mvnos.clone();
        for (m, &n) in mvnos.iter_mut().zip(demands) {
            m.user_count = n;
        }
        GameInstance::new(self.rrhs.clone(), mvnos)
    }

    /// Same game with QoE user capacities replaced.
    pub fn with_qoe_users(&self, qoe_users: &[f64]) -> Result<Self, ModelError> {
        self.check_len("qoe_users", qoe_users.len(), self.rrhs.len())?;
        let mut rrhs = self.rrhs.clone();
        for (r, &n) in rrhs.iter_mut().zip(qoe_users) {
            r.qoe_users = n;
        }
        GameInstance::new(rrhs, self.mvnos.clone())
    }

    /// Same RRHs, players permuted so that new player `i` is old player `order[i]`.
    pub fn permute_players(&self, order: &[usize]) -> Result<Self, ModelError> {
        self.check_len("permutation", order.len(), self.mvnos.len())?;
        let mvnos = order.iter().map(|&i| self.mvnos[i].clone()).collect();
        GameInstance::new(self.rrhs.clone(), mvnos)
    }

    fn check_len(&self, what: &'static str, got: usize, want: usize) -> Result<(), ModelError> {
        if got != want {
            Err(ModelError::IndexOutOfRange { what, index: got, len: want })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_player(&self, m: usize) -> Result<(), ModelError> {
        if m >= self.mvnos.len() {
            return Err(ModelError::IndexOutOfRange { what: "player", index: m, len: self.mvnos.len() });
        }
        Ok(())
    }

    pub(crate) fn check_rrh(&self, r: usize) -> Result<(), ModelError> {
        if r >= self.rrhs.len() {
            return Err(ModelError::IndexOutOfRange { what: "rrh", index: r, len: self.rrhs.len() });
        }
        Ok(())
    }
}

/// The strategy profile ξ: row `m` holds how many of player `m`'s users are
/// routed through each RRH. Stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationPolicy {
    players: usize,
    rrhs: usize,
    data: Vec<f64>,
}

impl AllocationPolicy {
    pub fn zeros(players: usize, rrhs: usize) -> Self {
        AllocationPolicy { players, rrhs, data: vec![0.0; players * rrhs] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, ModelError> {
        let players = rows.len();
        let rrhs = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(players * rrhs);
        for row in rows {
            if row.len() != rrhs {
                return Err(ModelError::ShapeMismatch { got: (players, row.len()), expected: (players, rrhs) });
            }
            data.extend_from_slice(row);
        }
        Ok(AllocationPolicy { players, rrhs, data })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.players, self.rrhs)
    }

    #[inline]
    pub fn get(&self, m: usize, r: usize) -> f64 {
        self.data[m * self.rrhs + r]
    }

    #[inline]
    pub fn set(&mut self, m: usize, r: usize, value: f64) {
        self.data[m * self.rrhs + r] = value;
    }

    #[inline]
    pub fn row(&self, m: usize) -> &[f64] {
        &self.data[m * self.rrhs..(m + 1) * self.rrhs]
    }

    #[inline]
    pub fn row_mut(&mut self, m: usize) -> &mut [f64] {
        &mut self.data[m * self.rrhs..(m + 1) * self.rrhs]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.rrhs.max(1)).take(self.players)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Aggregate load `X_r = Σ_m ξ_{m,r}` on each RRH.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.rrhs];
        for row in self.rows() {
            for (s, x) in sums.iter_mut().zip(row) {
                *s += x;
            }
        }
        sums
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, other: &AllocationPolicy) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest entry-wise difference, each row scaled by `1 / max(1, n_m)`.
    pub fn max_scaled_diff(&self, other: &AllocationPolicy, game: &GameInstance) -> f64 {
        let mut worst: f64 = 0.0;
        for m in 0..self.players {
            let scale = 1.0 / game.demand(m).max(1.0);
            for (a, b) in self.row(m).iter().zip(other.row(m)) {
                worst = worst.max((a - b).abs() * scale);
            }
        }
        worst
    }

    /// Same rows in a different player order: new row `i` is old row `order[i]`.
    pub fn permute_rows(&self, order: &[usize]) -> AllocationPolicy {
        let mut out = AllocationPolicy::zeros(order.len(), self.rrhs);
        for (i, &src) in order.iter().enumerate() {
            out.row_mut(i).copy_from_slice(self.row(src));
        }
        out
    }

    /// Checks shape, non-negativity and row conservation at relative tolerance `tol`.
    pub fn check_feasible(&self, game: &GameInstance, tol: f64) -> Result<(), ModelError> {
        if self.shape() != game.shape() {
            return Err(ModelError::ShapeMismatch { got: self.shape(), expected: game.shape() });
        }
        for m in 0..self.players {
            let row = self.row(m);
            let sum: f64 = row.iter().sum();
            let min = row.iter().copied().fold(f64::INFINITY, f64::min);
            let demand = game.demand(m);
            if min < 0.0 || !sum.is_finite() || (sum - demand).abs() > tol * demand.max(1.0) {
                return Err(ModelError::Infeasible { row: m, sum, demand, min });
            }
        }
        Ok(())
    }
}

/// Every player spreads its users evenly over all RRHs.
pub fn feasible_uniform(game: &GameInstance) -> AllocationPolicy {
    let (players, rrhs) = game.shape();
    let mut policy = AllocationPolicy::zeros(players, rrhs);
    for m in 0..players {
        let share = game.demand(m) / rrhs as f64;
        policy.row_mut(m).fill(share);
    }
    policy
}

/// Resources of RRH `r` granted to player `m` under proportional slicing.
/// An RRH nobody uses grants nothing.
pub fn proportional_share(
    game: &GameInstance,
    policy: &AllocationPolicy,
    m: usize,
    r: usize,
) -> Result<f64, ModelError> {
    game.check_player(m)?;
    game.check_rrh(r)?;
    if policy.shape() != game.shape() {
        return Err(ModelError::ShapeMismatch { got: policy.shape(), expected: game.shape() });
    }
    let load: f64 = (0..game.num_players()).map(|l| policy.get(l, r)).sum();
    if load <= 0.0 {
        return Ok(0.0);
    }
    Ok(policy.get(m, r) / load * game.rrhs()[r].capacity)
}
