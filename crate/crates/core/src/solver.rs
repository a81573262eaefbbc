//! Exact finite-horizon solver over the reachable state space.
//!
//! Values are discounted goal-reaching probabilities: goal states are
//! absorbing with value 1 and every action multiplies by `gamma`.

use std::collections::HashMap;
use std::io::Write;

use thiserror::Error;

use crate::pstrips::{self, is_goal, legal_actions, successors, state_string, DomainDef, GroundAction, State};

#[derive(Debug, Error)]
pub enum Error {
    #[error("reachable state space exceeds the budget of {0} state-step pairs")]
    Budget(usize),
    #[error("optimal actions are not defined for goal states")]
    GoalState,
    #[error("state is not in the solved graph")]
    UnknownState,
    #[error("requested {0} steps but the table holds {1}")]
    Horizon(usize, usize),
    #[error(transparent)]
    Domain(#[from] pstrips::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    pub horizon: usize,
    pub gamma: f64,
    pub tie_epsilon: f64,
    /// Upper bound on `states × (horizon + 1)`.
    pub node_budget: usize,
}

impl SolverParams {
    pub const DEFAULT_BUDGET: usize = 5_000_000;

    pub fn new(horizon: usize) -> Self {
        SolverParams {
            horizon,
            gamma: 0.95,
            tie_epsilon: 1e-9,
            node_budget: Self::DEFAULT_BUDGET,
        }
    }
}

/// One legal action of a node with its outcome edges `(probability, node)`.
#[derive(Debug, Clone)]
pub struct ActionEdges {
    pub action: GroundAction,
    pub outcomes: Vec<(f64, usize)>,
}

/// Reachable states in breadth-first discovery order; node 0 is the root.
/// Goal states and nodes at the depth limit have no outgoing edges.
#[derive(Debug, Clone)]
pub struct StateGraph {
    pub states: Vec<State>,
    pub goal: Vec<bool>,
    pub depth: Vec<usize>,
    pub edges: Vec<Vec<ActionEdges>>,
    /// Whether node edges were expanded (false at the depth limit and at goals).
    pub expanded: Vec<bool>,
    index: HashMap<State, usize>,
}

impl StateGraph {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn node(&self, q: &State) -> Option<usize> {
        self.index.get(q).copied()
    }
}

/// Enumerates states reachable from `q0` within `horizon` actions (the full
/// closure when `None`). `steps` sizes the value table for budgeting.
pub fn reachable(
    q0: &State,
    dom: &DomainDef,
    horizon: Option<usize>,
    steps: usize,
    budget: usize,
) -> Result<StateGraph, Error> {
    let per_state = steps + 1;
    let mut g = StateGraph {
        states: Vec::new(),
        goal: Vec::new(),
        depth: Vec::new(),
        edges: Vec::new(),
        expanded: Vec::new(),
        index: HashMap::new(),
    };
    let add = |g: &mut StateGraph, q: State, depth: usize| -> Result<usize, Error> {
        if let Some(&i) = g.index.get(&q) {
            return Ok(i);
        }
        if (g.states.len() + 1).saturating_mul(per_state) > budget {
            return Err(Error::Budget(budget));
        }
        let i = g.states.len();
        g.goal.push(is_goal(&q));
        g.depth.push(depth);
        g.edges.push(Vec::new());
        g.expanded.push(false);
        g.index.insert(q.clone(), i);
        g.states.push(q);
        Ok(i)
    };
    add(&mut g, q0.clone(), 0)?;
    let mut next = 0;
    while next < g.states.len() {
        let i = next;
        next += 1;
        if g.goal[i] || horizon.is_some_and(|h| g.depth[i] >= h) {
            continue;
        }
        let q = g.states[i].clone();
        let d = g.depth[i];
        let mut out = Vec::new();
        for act in legal_actions(&q, dom) {
            let mut outcomes = Vec::new();
            for (p, _, _, s) in successors(&q, dom, &act)? {
                if p > 0.0 {
                    outcomes.push((p, add(&mut g, s, d + 1)?));
                }
            }
            out.push(ActionEdges {
                action: act,
                outcomes,
            });
        }
        g.edges[i] = out;
        g.expanded[i] = true;
    }
    Ok(g)
}

/// `values[k][i]` is the optimal value of node `i` with `k` steps left.
#[derive(Debug, Clone)]
pub struct ValueTable {
    pub values: Vec<Vec<f64>>,
    pub gamma: f64,
}

impl ValueTable {
    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    pub fn value(&self, node: usize, k: usize) -> f64 {
        self.values[k][node]
    }
}

fn backup(edges: &ActionEdges, prev: &[f64], gamma: f64) -> f64 {
    gamma * edges.outcomes.iter().map(|&(p, j)| p * prev[j]).sum::<f64>()
}

/// Finite-horizon value iteration for `params.horizon` steps.
pub fn value_iterate(g: &StateGraph, params: &SolverParams) -> ValueTable {
    let n = g.len();
    let mut values = Vec::with_capacity(params.horizon + 1);
    values.push(g.goal.iter().map(|&t| if t { 1.0 } else { 0.0 }).collect::<Vec<f64>>());
    for k in 1..=params.horizon {
        let prev = &values[k - 1];
        let cur: Vec<f64> = (0..n)
            .map(|i| {
                if g.goal[i] {
                    1.0
                } else {
                    g.edges[i]
                        .iter()
                        .map(|e| backup(e, prev, params.gamma))
                        .fold(0.0, f64::max)
                }
            })
            .collect();
        values.push(cur);
    }
    ValueTable {
        values,
        gamma: params.gamma,
    }
}

/// Every legal action of `q` whose backed-up value with `k` steps left is
/// within `tie_epsilon` of the best, in canonical action order.
pub fn optimal_actions_at(
    q: &State,
    g: &StateGraph,
    table: &ValueTable,
    k: usize,
    tie_epsilon: f64,
) -> Result<Vec<GroundAction>, Error> {
    let i = g.node(q).ok_or(Error::UnknownState)?;
    if g.goal[i] {
        return Err(Error::GoalState);
    }
    if k == 0 || k > table.horizon() {
        return Err(Error::Horizon(k, table.horizon()));
    }
    if !g.expanded[i] {
        return Err(Error::UnknownState);
    }
    let prev = &table.values[k - 1];
    let q_values: Vec<f64> = g.edges[i].iter().map(|e| backup(e, prev, table.gamma)).collect();
    let best = q_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(g.edges[i]
        .iter()
        .zip(&q_values)
        .filter(|(_, &v)| v >= best - tie_epsilon)
        .map(|(e, _)| e.action.clone())
        .collect())
}

/// [`optimal_actions_at`] with the full horizon of `params`.
pub fn optimal_actions(
    q: &State,
    g: &StateGraph,
    table: &ValueTable,
    params: &SolverParams,
) -> Result<Vec<GroundAction>, Error> {
    optimal_actions_at(q, g, table, params.horizon, params.tie_epsilon)
}

/// Solves `q0` to `params.horizon`: its graph and value table.
pub fn solve(q0: &State, dom: &DomainDef, params: &SolverParams) -> Result<(StateGraph, ValueTable), Error> {
    let g = reachable(q0, dom, Some(params.horizon), params.horizon, params.node_budget)?;
    let t = value_iterate(&g, params);
    Ok((g, t))
}

/// Writes one JSON line per expanded `(state, k)` with its value and
/// optimal actions.
pub fn dump_jsonl<W: Write>(
    out: &mut W,
    dom: &DomainDef,
    g: &StateGraph,
    table: &ValueTable,
    tie_epsilon: f64,
) -> Result<(), Error> {
    for (i, q) in g.states.iter().enumerate() {
        for k in 1..=table.horizon() {
            let acts = if g.goal[i] || !g.expanded[i] {
                Vec::new()
            } else {
                optimal_actions_at(q, g, table, k, tie_epsilon)?
                    .iter()
                    .map(|a| a.display(dom, q.objects()).to_string())
                    .collect()
            };
            let line = serde_json::json!({
                "state": state_string(dom, q),
                "k": k,
                "value": table.value(i, k),
                "optimal": acts,
            });
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::builtin_domain;
    use crate::pstrips::{parse_domain, parse_state};

    fn bw1() -> DomainDef {
        builtin_domain("bw1").unwrap()
    }

    fn acts(dom: &DomainDef, q: &State, v: &[GroundAction]) -> Vec<String> {
        v.iter().map(|a| a.display(dom, q.objects()).to_string()).collect()
    }

    const CHAIN: &str = "(domain chain (predicates (at 1) (next 2))
        (action step (params X) (aux Y) (pre (at Y) (next Y X))
          (case (guard) (outcome 1 (add (at X)) (del (at Y))))))";

    #[test]
    fn one_block_graph() {
        let d = bw1();
        let q = parse_state(&d, "(state (objects a) (facts (on-table a) (clear a) (arm-empty) (gholding a)))").unwrap();
        let g = reachable(&q, &d, Some(2), 2, 1000).unwrap();
        assert_eq!(g.len(), 2);
        let g0 = reachable(&q, &d, Some(0), 0, 1000).unwrap();
        assert_eq!(g0.len(), 1);
        assert!(g0.edges[0].is_empty());
    }

    #[test]
    fn chain_values() {
        let d = parse_domain(CHAIN).unwrap();
        let q = parse_state(&d, "(state (objects a b c) (facts (at a) (next a b) (next b c) (gat c)))").unwrap();
        let params = SolverParams::new(2);
        let (g, t) = solve(&q, &d, &params).unwrap();
        assert_eq!(g.len(), 3);
        assert!(g.edges[0].iter().all(|e| e.outcomes.len() == 1));
        assert!((t.value(0, 2) - 0.9025).abs() < 1e-12);
        assert_eq!(t.value(0, 1), 0.0);
        let b = g.node(&g.states[1]).unwrap();
        assert!((t.value(b, 1) - 0.95).abs() < 1e-12);
    }

    #[test]
    fn faststack_value() {
        let d = bw1();
        let q = parse_state(
            &d,
            "(state (objects a b) (facts (on-table a) (on-table b) (clear a) (clear b) (arm-empty) (gon b a)))",
        )
        .unwrap();
        let (_, t) = solve(&q, &d, &SolverParams::new(1)).unwrap();
        assert!((t.value(0, 1) - 0.76).abs() < 1e-12);
    }

    #[test]
    fn unstack_is_uniquely_optimal() {
        let d = bw1();
        let q = parse_state(
            &d,
            "(state (objects a b) (facts (on b a) (on-table a) (clear b) (arm-empty) (gclear a)))",
        )
        .unwrap();
        let p = SolverParams::new(4);
        let (g, t) = solve(&q, &d, &p).unwrap();
        assert_eq!(acts(&d, &q, &optimal_actions(&q, &g, &t, &p).unwrap()), ["unstack(b)"]);
    }

    #[test]
    fn symmetric_actions_tie() {
        let d = bw1();
        let q = parse_state(
            &d,
            "(state (objects a b c) (facts (on-table a) (clear a) (on-table b) (clear b) (on-table c) (clear c) (arm-empty) (gholding a) (gholding b)))",
        )
        .unwrap();
        // Unreachable goal (two held blocks): every action has value 0.
        let p = SolverParams::new(3);
        let (g, t) = solve(&q, &d, &p).unwrap();
        assert_eq!(optimal_actions(&q, &g, &t, &p).unwrap().len(), 3);
        let q2 = parse_state(
            &d,
            "(state (objects a b c) (facts (on c a) (on-table a) (clear c) (on-table b) (clear b) (arm-empty) (gon c b)))",
        )
        .unwrap();
        let (g2, t2) = solve(&q2, &d, &p).unwrap();
        assert_eq!(
            acts(&d, &q2, &optimal_actions(&q2, &g2, &t2, &p).unwrap()),
            ["unstack(c)"]
        );
    }

    #[test]
    fn single_action_state() {
        let d = bw1();
        let q = parse_state(&d, "(state (objects a) (facts (holding a) (gon-table a)))").unwrap();
        let p = SolverParams::new(2);
        let (g, t) = solve(&q, &d, &p).unwrap();
        assert_eq!(acts(&d, &q, &optimal_actions(&q, &g, &t, &p).unwrap()), ["put-down(a)"]);
    }

    #[test]
    fn goal_state_query_is_an_error() {
        let d = bw1();
        let q = parse_state(&d, "(state (objects a) (facts (on-table a) (gon-table a)))").unwrap();
        let p = SolverParams::new(2);
        let (g, t) = solve(&q, &d, &p).unwrap();
        assert!(matches!(optimal_actions(&q, &g, &t, &p), Err(Error::GoalState)));
    }

    #[test]
    fn budget_is_enforced() {
        let d = bw1();
        let q = parse_state(
            &d,
            "(state (objects a b c) (facts (on-table a) (clear a) (on-table b) (clear b) (on-table c) (clear c) (arm-empty) (gon a b)))",
        )
        .unwrap();
        let mut p = SolverParams::new(6);
        p.node_budget = 20;
        assert!(matches!(solve(&q, &d, &p), Err(Error::Budget(20))));
    }

    #[test]
    fn values_are_monotone_in_steps() {
        let d = bw1();
        let q = parse_state(
            &d,
            "(state (objects a b c) (facts (on a b) (on-table b) (clear a) (on-table c) (clear c) (arm-empty) (gon b c) (gon c a)))",
        )
        .unwrap();
        let p = SolverParams::new(8);
        let (g, t) = solve(&q, &d, &p).unwrap();
        for k in 1..=8 {
            for i in 0..g.len() {
                let (a, b) = (t.value(i, k - 1), t.value(i, k));
                assert!((0.0..=1.0).contains(&b));
                if g.expanded[i] || g.goal[i] {
                    assert!(b >= a - 1e-15);
                }
            }
        }
        let mut buf = Vec::new();
        dump_jsonl(&mut buf, &d, &g, &t, 1e-9).unwrap();
        assert!(!buf.is_empty());
    }
}
