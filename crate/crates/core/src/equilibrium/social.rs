use super::simplex::project_onto_scaled_simplex;
use super::{EquilibriumError, SolveOptions, SolveReport};
use crate::costs::social_welfare;
use crate::model::{feasible_uniform, AllocationPolicy, GameInstance};

/// Gradient of total cost: `2 X_r / N_r + η_{m,r}`.
fn gradient(game: &GameInstance, policy: &AllocationPolicy, out: &mut [f64]) {
    let loads = policy.column_sums();
    let rrhs = game.num_rrhs();
    for m in 0..game.num_players() {
        for r in 0..rrhs {
            out[m * rrhs + r] = 2.0 * loads[r] * game.inv_qoe()[r] + game.eta(m, r);
        }
    }
}

fn project_rows(game: &GameInstance, trial: &[f64], out: &mut AllocationPolicy) {
    let rrhs = game.num_rrhs();
    for m in 0..game.num_players() {
        project_onto_scaled_simplex(&trial[m * rrhs..(m + 1) * rrhs], game.demand(m), out.row_mut(m));
    }
}

/// `P(point - step · grad)`, row by row.
fn projected_step(game: &GameInstance, point: &AllocationPolicy, grad: &[f64], step: f64, trial: &mut [f64], out: &mut AllocationPolicy) {
    for ((t, x), g) in trial.iter_mut().zip(point.as_slice()).zip(grad) {
        *t = x - step * g;
    }
    project_rows(game, trial, out);
}

/// Exact quadratic term `Σ_r (Σ_m d_{m,r})² / N_r` of the objective along
/// `d = a - b`, and `‖d‖²`.
fn curvature(game: &GameInstance, a: &AllocationPolicy, b: &AllocationPolicy) -> (f64, f64) {
    let rrhs = game.num_rrhs();
    let mut column = vec![0.0; rrhs];
    let mut norm_sq = 0.0;
    for (i, (x, y)) in a.as_slice().iter().zip(b.as_slice()).enumerate() {
        let d = x - y;
        column[i % rrhs] += d;
        norm_sq += d * d;
    }
    let quad = column.iter().zip(game.inv_qoe()).map(|(c, inv)| c * c * inv).sum();
    (quad, norm_sq)
}

/// Union-find over player and RRH nodes.
struct Forest {
    parent: Vec<usize>,
}

impl Forest {
    fn new(nodes: usize) -> Self {
        Forest { parent: (0..nodes).collect() }
    }

    fn find(&mut self, mut u: usize) -> usize {
        while self.parent[u] != u {
            self.parent[u] = self.parent[self.parent[u]];
            u = self.parent[u];
        }
        u
    }

    /// Joins the sets of `a` and `b`; false if they were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        self.parent[a] = b;
        true
    }
}

/// Why a forest solve failed: the support carries an edge or an RRH that
/// should be empty.
enum Blocked {
    Edge(usize, usize),
    Rrh(usize),
    Infeasible,
}

/// Exact minimizer on the support suggested by the loads of `x`, if that
/// support is right.
///
/// With `η_{m,r} = π_m p_r`, sorting players by weight (descending) and RRHs
/// by price (ascending) makes the transport cost Monge, so for fixed loads
/// the cheapest split is the northwest-corner plan and its staircase support
/// is a forest. Loads converge much faster than the split between players,
/// so the staircase built from the loads of `x` is usually already the
/// optimal support long before `x` itself is accurate.
///
/// When the optimum splits into blocks (cheap RRHs serving only the
/// heavily weighted players, say), near-ties in the staircase bridge the
/// blocks with an edge that should carry no flow; edges that come out
/// negative are cut, and RRHs that come out negative are emptied, until the
/// solve is consistent.
fn polish(game: &GameInstance, x: &AllocationPolicy) -> Option<AllocationPolicy> {
    let (players, rrhs) = game.shape();
    let loads = x.column_sums();
    let negligible = game.total_demand() * 1e-12;
    let mut rows: Vec<usize> = (0..players).filter(|&m| game.demand(m) > 0.0).collect();
    rows.sort_by(|&a, &b| game.mvnos()[b].price_weight.total_cmp(&game.mvnos()[a].price_weight).then(a.cmp(&b)));
    let mut columns: Vec<usize> = (0..rrhs).filter(|&r| loads[r] > negligible).collect();
    columns.sort_by(|&a, &b| game.rrhs()[a].price.total_cmp(&game.rrhs()[b].price).then(a.cmp(&b)));

    let mut edges = Vec::with_capacity(rows.len() + columns.len());
    let (mut i, mut j) = (0, 0);
    let (mut supply, mut demand) = (rows.first().map(|&m| game.demand(m))?, columns.first().map(|&r| loads[r])?);
    while i < rows.len() && j < columns.len() {
        edges.push((rows[i], columns[j]));
        if supply <= demand {
            demand -= supply;
            i += 1;
            supply = rows.get(i).map_or(0.0, |&m| game.demand(m));
        } else {
            supply -= demand;
            j += 1;
            demand = columns.get(j).map_or(0.0, |&r| loads[r]);
        }
    }
    for _ in 0..players + rrhs {
        match solve_on_forest(game, &edges) {
            Ok(candidate) => return Some(candidate),
            Err(Blocked::Edge(m, r)) => edges.retain(|&e| e != (m, r)),
            Err(Blocked::Rrh(r)) => edges.retain(|&(_, c)| c != r),
            Err(Blocked::Infeasible) => return None,
        }
    }
    None
}

/// Solves the optimality conditions on the forest `edges`.
fn solve_on_forest(game: &GameInstance, edges: &[(usize, usize)]) -> Result<AllocationPolicy, Blocked> {
    let (players, rrhs) = game.shape();
    let nodes = players + rrhs;
    let mut forest = Forest::new(nodes);
    let mut adjacent = vec![Vec::new(); nodes];
    for &(m, r) in edges {
        if forest.union(m, players + r) {
            adjacent[m].push(players + r);
            adjacent[players + r].push(m);
        }
    }

    // node u < players is player u with potential λ_u; otherwise RRH u - players with y
    let mut potential = vec![0.0; nodes];
    let mut parent = vec![usize::MAX; nodes];
    let mut seen = vec![false; nodes];
    let mut order = Vec::with_capacity(nodes);
    for root in 0..nodes {
        if seen[root] {
            continue;
        }
        let begin = order.len();
        seen[root] = true;
        order.push(root);
        let mut head = begin;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &v in &adjacent[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = u;
                    potential[v] = if v < players {
                        potential[u] + game.eta(v, u - players)
                    } else {
                        potential[u] - game.eta(u, v - players)
                    };
                    order.push(v);
                }
            }
        }
        // shift so the component's demand matches Σ N_r y_r / 2
        let (mut supply, mut weight, mut weighted) = (0.0, 0.0, 0.0);
        for &u in &order[begin..] {
            if u < players {
                supply += game.demand(u);
            } else {
                let w = 0.5 * game.qoe_users(u - players);
                weight += w;
                weighted += w * potential[u];
            }
        }
        if weight == 0.0 {
            if supply > 0.0 {
                return Err(Blocked::Infeasible);
            }
            continue;
        }
        let shift = (supply - weighted) / weight;
        order[begin..].iter().for_each(|&u| potential[u] += shift);
    }

    let scale = game.total_demand().max(1.0) * 1e-12;
    let mut remaining = vec![0.0; nodes];
    for u in 0..nodes {
        remaining[u] = if u < players {
            game.demand(u)
        } else {
            let load = 0.5 * game.qoe_users(u - players) * potential[u];
            if load < -scale {
                return Err(Blocked::Rrh(u - players));
            }
            load.max(0.0)
        };
    }
    let mut out = AllocationPolicy::zeros(players, rrhs);
    let mut worst: Option<(f64, usize, usize)> = None;
    for &v in order.iter().rev() {
        let u = parent[v];
        if u == usize::MAX {
            continue;
        }
        let flow = remaining[v];
        remaining[u] -= flow;
        let (m, r) = if v < players { (v, u - players) } else { (u, v - players) };
        if flow < -scale && worst.is_none_or(|(f, _, _)| flow < f) {
            worst = Some((flow, m, r));
        }
        out.set(m, r, flow.max(0.0));
    }
    if let Some((_, m, r)) = worst {
        return Err(Blocked::Edge(m, r));
    }
    // rows carry the exact demand; rounding in the peel lands on the largest entry
    for m in 0..players {
        let row = out.row_mut(m);
        let gap = game.demand(m) - row.iter().sum::<f64>();
        if gap.abs() > scale {
            return Err(Blocked::Infeasible);
        }
        if let Some(big) = row.iter_mut().max_by(|a, b| a.total_cmp(b)) {
            *big += gap;
        }
    }
    Ok(out)
}

const POLISH_EVERY: usize = 16;

/// Minimizes total cost `Σ_m c_m` over the product of scaled simplices.
///
/// Accelerated projected gradient with backtracking on the curvature
/// estimate, restarting momentum whenever a step points uphill. Every few
/// iterations the support of the iterate is used to attempt an exact solve
/// (see `polish`), kept only if it passes the stationarity test and does not
/// raise the cost. The residual is the projected-gradient norm
/// `L ‖x - P(x - ∇F/L)‖_∞` at the global curvature bound
/// `L = 2M max_r(1/N_r)`; the solver exits once it drops to `options.tol`.
/// `start` defaults to the uniform policy.
pub fn solve_social_optimum(
    game: &GameInstance,
    start: Option<&AllocationPolicy>,
    options: SolveOptions,
) -> Result<SolveReport, EquilibriumError> {
    let mut x = match start {
        Some(p) => {
            p.check_feasible(game, 1e-9)?;
            p.clone()
        }
        None => feasible_uniform(game),
    };
    let (players, rrhs) = game.shape();
    let max_inv = game.inv_qoe().iter().copied().fold(0.0, f64::max);
    let bound_l = 2.0 * players as f64 * max_inv;
    let mut lipschitz = 2.0 * max_inv;

    let mut y = x.clone();
    let mut x_next = x.clone();
    let mut scratch = x.clone();
    let mut grad = vec![0.0; players * rrhs];
    let mut trial = vec![0.0; players * rrhs];
    let mut momentum = 1.0_f64;

    let mut trajectory = Vec::new();
    SolveReport::record(options.trace, &mut trajectory, game, &x, 0);

    let mut stationarity = |x: &AllocationPolicy, grad: &mut [f64], trial: &mut [f64]| {
        gradient(game, x, grad);
        projected_step(game, x, grad, 1.0 / bound_l, trial, &mut scratch);
        x.max_abs_diff(&scratch) * bound_l
    };

    let mut residual = stationarity(&x, &mut grad, &mut trial);
    let mut iterations = 0;
    while residual > options.tol && iterations < options.max_iters {
        if iterations % POLISH_EVERY == 0 {
            if let Some(candidate) = polish(game, &x) {
                let candidate_residual = stationarity(&candidate, &mut grad, &mut trial);
                if candidate_residual <= options.tol && social_welfare(game, &candidate) <= social_welfare(game, &x) {
                    x = candidate;
                    residual = candidate_residual;
                    SolveReport::record(options.trace, &mut trajectory, game, &x, iterations);
                    break;
                }
            }
        }
        gradient(game, &y, &mut grad);
        loop {
            projected_step(game, &y, &grad, 1.0 / lipschitz, &mut trial, &mut x_next);
            let (quad, norm_sq) = curvature(game, &x_next, &y);
            if lipschitz >= bound_l || quad <= 0.5 * lipschitz * norm_sq * (1.0 + 1e-12) {
                break;
            }
            lipschitz = (lipschitz * 2.0).min(bound_l);
        }
        iterations += 1;

        let uphill = grad
            .iter()
            .zip(x_next.as_slice().iter().zip(x.as_slice()))
            .map(|(g, (a, b))| g * (a - b))
            .sum::<f64>()
            > 0.0;
        let (next_momentum, beta) = if uphill {
            (1.0, 0.0)
        } else {
            let t = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
            (t, (momentum - 1.0) / t)
        };
        momentum = next_momentum;
        // extrapolated point; may leave the strategy space
        for ((t, &xn), &xo) in y.as_mut_slice().iter_mut().zip(x_next.as_slice()).zip(x.as_slice()) {
            *t = xn + beta * (xn - xo);
        }
        std::mem::swap(&mut x, &mut x_next);

        SolveReport::record(options.trace, &mut trajectory, game, &x, iterations);
        residual = stationarity(&x, &mut grad, &mut trial);
    }

    Ok(SolveReport { converged: residual <= options.tol, final_policy: x, iterations, residual, trajectory })
}

