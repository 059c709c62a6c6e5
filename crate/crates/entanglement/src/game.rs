//! Rules engine and exact solver for the entanglement pursuit game.
//!
//! One play: the robber picks a start; each round the cops either all stay or
//! fly exactly one cop (from the board or the reserve) onto the robber's
//! current vertex, then the robber must move to an unoccupied neighbor
//! (successor in directed graphs). No legal robber move means the cops win;
//! surviving forever means the robber wins.
//!
//! The solver computes the least fixed point of the cop attractor over the
//! reachable state space by backward induction with predecessor counters.
//! Cops are indistinguishable, so a state is (occupied set, robber vertex,
//! turn) with the reserve implied by the budget. Occupied sets live in a u64
//! bitmask, which caps solvable graphs at 64 vertices.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

/// Hard vertex limit of the packed state representation.
pub const MAX_SOLVE_VERTICES: usize = 64;

#[derive(Debug, Error, PartialEq)]
pub enum GameError {
    #[error("expected {expected:?} turn")]
    WrongTurn { expected: Turn },
    #[error("illegal action: {0}")]
    IllegalAction(String),
    #[error("solver handles at most {MAX_SOLVE_VERTICES} vertices, graph has {n}")]
    TooManyVertices { n: usize },
    #[error("state cap {cap} exceeded after exploring {explored} states")]
    StateCapExceeded { cap: usize, explored: usize },
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Turn {
    Cops,
    Robber,
}

/// Cop-side choice for one round. `Deploy` and `Relocate` both land on the
/// robber's current vertex; they differ in where the cop comes from.
#[derive(Debug, Copy, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CopAction {
    Stay,
    Deploy,
    Relocate(usize),
}

impl std::fmt::Display for CopAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CopAction::Stay => write!(f, "stay"),
            CopAction::Deploy => write!(f, "deploy"),
            CopAction::Relocate(u) => write!(f, "relocate({u})"),
        }
    }
}

/// Full game position. `occupied` is a vertex bitmask; `reserve` counts cops
/// not yet on the board; budget = |occupied| + reserve is constant in a play.
#[derive(Debug, Copy, Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    pub occupied: u64,
    pub reserve: u32,
    pub robber: usize,
    pub turn: Turn,
}

impl GameState {
    pub fn start(budget: u32, robber: usize) -> GameState {
        GameState { occupied: 0, reserve: budget, robber, turn: Turn::Cops }
    }

    pub fn is_occupied(&self, v: usize) -> bool {
        self.occupied >> v & 1 == 1
    }

    pub fn occupied_vertices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.occupied.count_ones() as usize);
        let mut bits = self.occupied;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            out.push(v);
            bits &= bits - 1;
        }
        out
    }

    pub fn deployed(&self) -> u32 {
        self.occupied.count_ones()
    }

    fn key(&self) -> u128 {
        (self.occupied as u128)
            | (self.robber as u128) << 64
            | (if self.turn == Turn::Robber { 1u128 } else { 0 }) << 72
    }
}

/// Legal cop choices: stay, deploy from reserve, or relocate any on-board
/// cop. Canonical order: Stay, Deploy, Relocate ascending by vertex.
pub fn cop_actions(_g: &Graph, s: &GameState) -> Result<Vec<CopAction>, GameError> {
    if s.turn != Turn::Cops {
        return Err(GameError::WrongTurn { expected: Turn::Cops });
    }
    let mut actions = vec![CopAction::Stay];
    if s.reserve > 0 {
        actions.push(CopAction::Deploy);
    }
    actions.extend(s.occupied_vertices().into_iter().map(CopAction::Relocate));
    Ok(actions)
}

pub fn apply_cop(g: &Graph, s: &GameState, action: CopAction) -> Result<GameState, GameError> {
    if s.turn != Turn::Cops {
        return Err(GameError::WrongTurn { expected: Turn::Cops });
    }
    debug_assert!(!s.is_occupied(s.robber), "robber on an occupied vertex at cop turn");
    let _ = g;
    let (occupied, reserve) = match action {
        CopAction::Stay => (s.occupied, s.reserve),
        CopAction::Deploy => {
            if s.reserve == 0 {
                return Err(GameError::IllegalAction("deploy with empty reserve".into()));
            }
            (s.occupied | 1 << s.robber, s.reserve - 1)
        }
        CopAction::Relocate(u) => {
            if !s.is_occupied(u) {
                return Err(GameError::IllegalAction(format!("relocate from unoccupied {u}")));
            }
            (s.occupied & !(1 << u) | 1 << s.robber, s.reserve)
        }
    };
    Ok(GameState { occupied, reserve, robber: s.robber, turn: Turn::Robber })
}

/// Unoccupied neighbors (successors when directed), ascending. Empty means
/// the robber is caught. A loop lets the robber move in place while his
/// vertex is unoccupied.
pub fn robber_moves(g: &Graph, s: &GameState) -> Result<Vec<usize>, GameError> {
    if s.turn != Turn::Robber {
        return Err(GameError::WrongTurn { expected: Turn::Robber });
    }
    Ok(g.neighbors(s.robber).iter().copied().filter(|&v| !s.is_occupied(v)).collect())
}

pub fn apply_robber(g: &Graph, s: &GameState, v: usize) -> Result<GameState, GameError> {
    let legal = robber_moves(g, s)?;
    if !legal.contains(&v) {
        return Err(GameError::IllegalAction(format!("robber move to {v} not legal")));
    }
    Ok(GameState { occupied: s.occupied, reserve: s.reserve, robber: v, turn: Turn::Cops })
}

#[derive(Debug, Copy, Clone)]
pub struct SolveLimits {
    pub state_cap: usize,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits { state_cap: 50_000_000 }
    }
}

/// Winner map over the reachable state space for one budget.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub n: usize,
    pub directed: bool,
    pub k: usize,
    pub caught_all: bool,
    /// Per start vertex r: do the cops win from CopTurn(empty board, r)?
    pub per_start: Vec<bool>,
    pub states_explored: usize,
    /// Filled by [`entanglement_number`]; `None` for a plain solve.
    pub ent: Option<usize>,
    index: HashMap<u128, u32>,
    cops_win: Vec<bool>,
    rank: Vec<u32>,
}

/// Serializable view of a [`SolveResult`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveSummary {
    pub n: usize,
    pub directed: bool,
    pub k: usize,
    pub caught_all: bool,
    pub per_start: Vec<bool>,
    pub states_explored: usize,
    pub ent: Option<usize>,
}

impl SolveResult {
    /// Cops-win verdict; `None` when the state was never reachable.
    pub fn cops_win(&self, s: &GameState) -> Option<bool> {
        self.index.get(&s.key()).map(|&i| self.cops_win[i as usize])
    }

    /// Attractor layer: plies-to-capture under optimal play from a CopsWin
    /// state. `None` for unreachable or robber-won states.
    pub fn capture_rank(&self, s: &GameState) -> Option<u32> {
        let &i = self.index.get(&s.key())?;
        if self.cops_win[i as usize] {
            Some(self.rank[i as usize])
        } else {
            None
        }
    }

    pub fn summary(&self) -> SolveSummary {
        SolveSummary {
            n: self.n,
            directed: self.directed,
            k: self.k,
            caught_all: self.caught_all,
            per_start: self.per_start.clone(),
            states_explored: self.states_explored,
            ent: self.ent,
        }
    }
}

// Packed state used inside the solver: bitmask, robber vertex, turn bit.
#[derive(Copy, Clone, PartialEq, Eq, Hash)]
struct Packed(u64, u8, u8);

impl Packed {
    fn to_state(self, budget: u32) -> GameState {
        GameState {
            occupied: self.0,
            reserve: budget - self.0.count_ones(),
            robber: self.1 as usize,
            turn: if self.2 == 0 { Turn::Cops } else { Turn::Robber },
        }
    }
}

fn successors(g: &Graph, budget: u32, s: Packed, out: &mut Vec<Packed>) {
    out.clear();
    let Packed(occ, r, turn) = s;
    let rbit = 1u64 << r;
    if turn == 0 {
        debug_assert!(occ & rbit == 0);
        out.push(Packed(occ, r, 1));
        if occ.count_ones() < budget {
            out.push(Packed(occ | rbit, r, 1));
        }
        let mut bits = occ;
        while bits != 0 {
            let u = bits.trailing_zeros();
            bits &= bits - 1;
            out.push(Packed(occ & !(1u64 << u) | rbit, r, 1));
        }
    } else {
        for &v in g.neighbors(r as usize) {
            if occ & (1u64 << v) == 0 {
                out.push(Packed(occ, v as u8, 0));
            }
        }
    }
}

/// Exact solve by backward induction over the reachable space. A RobberTurn
/// state is CopsWin iff every robber move leads to CopsWin (vacuously when
/// caught); a CopTurn state is CopsWin iff some action does; everything
/// outside the least fixed point is RobberWins.
pub fn solve(g: &Graph, k: usize, limits: &SolveLimits) -> Result<SolveResult, GameError> {
    let n = g.n();
    if n > MAX_SOLVE_VERTICES {
        return Err(GameError::TooManyVertices { n });
    }
    let budget = k as u32;

    // Forward exploration from every start.
    let mut index: HashMap<Packed, u32> = HashMap::new();
    let mut states: Vec<Packed> = Vec::new();
    let mut succ_total: Vec<u32> = Vec::new(); // robber states: outstanding successors
    let mut pred_count: Vec<u32> = Vec::new();
    for r in 0..n {
        let p = Packed(0, r as u8, 0);
        index.entry(p).or_insert_with(|| {
            states.push(p);
            succ_total.push(0);
            pred_count.push(0);
            (states.len() - 1) as u32
        });
    }
    let mut buf = Vec::new();
    let mut i = 0usize;
    while i < states.len() {
        let s = states[i];
        successors(g, budget, s, &mut buf);
        succ_total[i] = buf.len() as u32;
        for &t in &buf {
            let ti = *index.entry(t).or_insert_with(|| {
                states.push(t);
                succ_total.push(0);
                pred_count.push(0);
                (states.len() - 1) as u32
            });
            pred_count[ti as usize] += 1;
        }
        if states.len() > limits.state_cap {
            return Err(GameError::StateCapExceeded { cap: limits.state_cap, explored: states.len() });
        }
        i += 1;
    }
    let total = states.len();

    // Predecessor CSR (second successor pass).
    let mut pred_start: Vec<u32> = Vec::with_capacity(total + 1);
    let mut acc = 0u32;
    for i in 0..total {
        pred_start.push(acc);
        acc += pred_count[i];
    }
    pred_start.push(acc);
    let mut pred_fill = pred_start.clone();
    let mut preds: Vec<u32> = vec![0; acc as usize];
    for (si, &s) in states.iter().enumerate() {
        successors(g, budget, s, &mut buf);
        for &t in &buf {
            let ti = index[&t] as usize;
            preds[pred_fill[ti] as usize] = si as u32;
            pred_fill[ti] += 1;
        }
    }

    // Attractor to the caught states, layered by capture rank.
    let mut cops_win = vec![false; total];
    let mut rank = vec![u32::MAX; total];
    let mut remaining = succ_total.clone();
    let mut queue = std::collections::VecDeque::new();
    for (si, &s) in states.iter().enumerate() {
        if s.2 == 1 && succ_total[si] == 0 {
            cops_win[si] = true;
            rank[si] = 0;
            queue.push_back(si as u32);
        }
    }
    while let Some(ti) = queue.pop_front() {
        let next_rank = rank[ti as usize] + 1;
        for &si in &preds[pred_start[ti as usize] as usize..pred_start[ti as usize + 1] as usize] {
            let si = si as usize;
            if cops_win[si] {
                continue;
            }
            let is_robber_turn = states[si].2 == 1;
            let enters = if is_robber_turn {
                remaining[si] -= 1;
                remaining[si] == 0
            } else {
                true
            };
            if enters {
                cops_win[si] = true;
                rank[si] = next_rank;
                queue.push_back(si as u32);
            }
        }
    }

    let per_start: Vec<bool> = (0..n)
        .map(|r| cops_win[index[&Packed(0, r as u8, 0)] as usize])
        .collect();
    let caught_all = per_start.iter().all(|&w| w);
    let key_index: HashMap<u128, u32> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.to_state(budget).key(), i as u32))
        .collect();
    Ok(SolveResult {
        n,
        directed: g.directed(),
        k,
        caught_all,
        per_start,
        states_explored: total,
        ent: None,
        index: key_index,
        cops_win,
        rank,
    })
}

/// Smallest budget up to `k_max` catching from every start, with the solve
/// at that budget (or at `k_max` when none suffices; `ent` is then `None`).
/// Monotonicity is not assumed: budgets are tried in increasing order.
pub fn entanglement_number(
    g: &Graph,
    k_max: usize,
    limits: &SolveLimits,
) -> Result<SolveResult, GameError> {
    let mut last = None;
    for k in 0..=k_max {
        let mut res = solve(g, k, limits)?;
        if res.caught_all {
            res.ent = Some(k);
            return Ok(res);
        }
        last = Some(res);
    }
    Ok(last.expect("k_max >= 0 always solves at least once"))
}

/// Decision procedure for one side of a match. Controllers see the full
/// state (the game is perfect-information) and may keep memory between
/// plies; `memory_key` must serialize that memory so the harness can detect
/// exact repetitions.
pub trait CopController {
    fn act(&mut self, g: &Graph, s: &GameState) -> CopAction;
    fn memory_key(&self) -> String {
        String::new()
    }
    fn name(&self) -> &'static str;
}

pub trait RobberController {
    /// Start vertex; the harness may override it to scan all starts.
    fn choose_start(&mut self, g: &Graph) -> usize;
    fn choose_move(&mut self, g: &Graph, s: &GameState) -> usize;
    fn memory_key(&self) -> String {
        String::new()
    }
    fn name(&self) -> &'static str;
}

/// Cop side of [`optimal_controller`]: from a CopsWin state, strictly
/// decreases the capture rank; elsewhere plays best effort (an action whose
/// successor has minimal rank, or Stay).
pub struct OptimalCops<'a> {
    res: &'a SolveResult,
}

/// Robber side: stays inside RobberWins whenever possible, otherwise delays
/// by maximizing the successor capture rank.
pub struct OptimalRobber<'a> {
    res: &'a SolveResult,
}

pub fn optimal_cops(res: &SolveResult) -> OptimalCops<'_> {
    OptimalCops { res }
}

pub fn optimal_robber(res: &SolveResult) -> OptimalRobber<'_> {
    OptimalRobber { res }
}

impl CopController for OptimalCops<'_> {
    fn act(&mut self, g: &Graph, s: &GameState) -> CopAction {
        let actions = cop_actions(g, s).expect("cop turn");
        let mut best: Option<(u64, CopAction)> = None;
        for a in actions {
            let t = apply_cop(g, s, a).expect("legal action");
            // RobberWins successors sort after every capture rank.
            let score = match self.res.cops_win(&t) {
                Some(true) => self.res.capture_rank(&t).unwrap() as u64,
                Some(false) => u64::MAX,
                None => u64::MAX,
            };
            if best.as_ref().is_none_or(|&(bs, _)| score < bs) {
                best = Some((score, a));
            }
        }
        best.expect("Stay is always available").1
    }
    fn name(&self) -> &'static str {
        "optimal-cops"
    }
}

impl RobberController for OptimalRobber<'_> {
    fn choose_start(&mut self, g: &Graph) -> usize {
        let _ = g;
        // Prefer a start the solver certifies as a robber win; otherwise the
        // start with the slowest capture.
        if let Some(r) = self.res.per_start.iter().position(|&w| !w) {
            return r;
        }
        (0..self.res.n)
            .max_by_key(|&r| {
                self.res.capture_rank(&GameState::start(self.res.k as u32, r)).unwrap_or(0)
            })
            .unwrap_or(0)
    }

    fn choose_move(&mut self, g: &Graph, s: &GameState) -> usize {
        let moves = robber_moves(g, s).expect("robber turn");
        debug_assert!(!moves.is_empty(), "controller queried on a caught state");
        // Stay in the robber-win region when possible.
        for &v in &moves {
            let t = apply_robber(g, s, v).expect("legal move");
            if self.res.cops_win(&t) == Some(false) {
                return v;
            }
        }
        // Best effort: delay capture as long as possible.
        *moves
            .iter()
            .max_by_key(|&&v| {
                let t = apply_robber(g, s, v).expect("legal move");
                self.res.capture_rank(&t).map(|r| (r, usize::MAX - v)).unwrap_or((u32::MAX, 0))
            })
            .expect("nonempty moves")
    }

    fn name(&self) -> &'static str {
        "optimal-robber"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, path, Graph};

    fn limits() -> SolveLimits {
        SolveLimits::default()
    }

    #[test]
    fn cop_action_enumeration() {
        let g = complete(4);
        let s = GameState::start(2, 0);
        assert_eq!(cop_actions(&g, &s).unwrap(), vec![CopAction::Stay, CopAction::Deploy]);
        let s2 = GameState { occupied: 0b0110, reserve: 0, robber: 0, turn: Turn::Cops };
        assert_eq!(
            cop_actions(&g, &s2).unwrap(),
            vec![CopAction::Stay, CopAction::Relocate(1), CopAction::Relocate(2)]
        );
        let s3 = GameState { occupied: 0b0010, reserve: 1, robber: 2, turn: Turn::Cops };
        let t = apply_cop(&g, &s3, CopAction::Deploy).unwrap();
        assert_eq!(t.occupied, 0b0110);
        assert_eq!(t.reserve, 0);
        assert_eq!(t.turn, Turn::Robber);
        let wrong = GameState { turn: Turn::Robber, ..s3 };
        assert!(cop_actions(&g, &wrong).is_err());
    }

    #[test]
    fn robber_move_enumeration() {
        let p3 = path(3);
        let s = GameState { occupied: 0b010, reserve: 0, robber: 0, turn: Turn::Robber };
        assert_eq!(robber_moves(&p3, &s).unwrap(), Vec::<usize>::new());
        let k4 = complete(4);
        let s = GameState { occupied: 0b0010, reserve: 1, robber: 0, turn: Turn::Robber };
        assert_eq!(robber_moves(&k4, &s).unwrap(), vec![2, 3]);
        let isolated = Graph::simple(1, false, []).unwrap();
        let s = GameState { occupied: 0, reserve: 0, robber: 0, turn: Turn::Robber };
        assert_eq!(robber_moves(&isolated, &s).unwrap(), Vec::<usize>::new());
        assert!(apply_robber(&k4, &s, 1).is_err());
    }

    #[test]
    fn solve_k2_catches_with_one_cop() {
        let res = solve(&complete(2), 1, &limits()).unwrap();
        assert!(res.caught_all);
        assert_eq!(res.per_start, vec![true, true]);
    }

    #[test]
    fn solve_k4_two_cops_lose_three_win() {
        let res = solve(&complete(4), 2, &limits()).unwrap();
        assert!(!res.caught_all);
        assert!(res.per_start.iter().all(|&w| !w), "robber wins from every start");
        let res3 = solve(&complete(4), 3, &limits()).unwrap();
        assert!(res3.caught_all);
    }

    #[test]
    fn solve_single_vertex_zero_cops() {
        let g = Graph::simple(1, false, []).unwrap();
        assert!(solve(&g, 0, &limits()).unwrap().caught_all);
    }

    #[test]
    fn entanglement_small_values() {
        assert_eq!(entanglement_number(&complete(4), 4, &limits()).unwrap().ent, Some(3));
        assert_eq!(entanglement_number(&path(3), 3, &limits()).unwrap().ent, Some(2));
        let k1 = Graph::simple(1, false, []).unwrap();
        assert_eq!(entanglement_number(&k1, 2, &limits()).unwrap().ent, Some(0));
        // Exceeds budget is explicit, not an error.
        let res = entanglement_number(&complete(5), 2, &limits()).unwrap();
        assert_eq!(res.ent, None);
        assert!(!res.caught_all);
    }

    #[test]
    fn directed_cycle_needs_two_cops() {
        let g = Graph::simple(5, true, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        let r1 = solve(&g, 1, &limits()).unwrap();
        assert!(r1.per_start.iter().all(|&w| !w), "one cop never catches on a directed cycle");
        let r2 = solve(&g, 2, &limits()).unwrap();
        assert!(r2.caught_all, "a parked cop plus a chaser corners the robber");
    }

    #[test]
    fn loop_allows_moving_in_place() {
        let g = Graph::new(1, false, true, [(0, 0)]).unwrap();
        let r0 = solve(&g, 0, &limits()).unwrap();
        assert!(!r0.caught_all, "robber cycles on the loop forever");
        let r1 = solve(&g, 1, &limits()).unwrap();
        assert!(r1.caught_all, "deploying on the loop vertex blocks the in-place move");
    }

    #[test]
    fn state_cap_is_honored() {
        let err = solve(&complete(6), 3, &SolveLimits { state_cap: 10 }).unwrap_err();
        match err {
            GameError::StateCapExceeded { cap: 10, explored } => assert!(explored > 10),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn oversized_graph_rejected() {
        let g = Graph::simple(65, false, (1..65).map(|v| (0, v))).unwrap();
        assert!(matches!(solve(&g, 1, &limits()), Err(GameError::TooManyVertices { n: 65 })));
    }

    #[test]
    fn optimal_cops_decrease_rank_from_winning_starts() {
        let g = complete(3);
        let res = solve(&g, 2, &limits()).unwrap();
        assert!(res.caught_all);
        for r in 0..3 {
            let mut s = GameState::start(2, r);
            let mut cops = optimal_cops(&res);
            let mut robber = optimal_robber(&res);
            let mut last_rank = res.capture_rank(&s).unwrap();
            let mut caught = false;
            for _ in 0..20 {
                let a = cops.act(&g, &s);
                s = apply_cop(&g, &s, a).unwrap();
                let rank = res.capture_rank(&s).unwrap();
                assert!(rank < last_rank, "cop action must make progress");
                if robber_moves(&g, &s).unwrap().is_empty() {
                    caught = true;
                    break;
                }
                last_rank = rank;
                let v = robber.choose_move(&g, &s);
                s = apply_robber(&g, &s, v).unwrap();
                let rank = res.capture_rank(&s).unwrap();
                assert!(rank < last_rank);
                last_rank = rank;
            }
            assert!(caught, "K_3 with 2 cops is a capture");
        }
    }

    #[test]
    fn min_degree_bounds_entanglement() {
        for g in [complete(4), complete(5), cycle(6)] {
            let ent = entanglement_number(&g, g.n(), &limits()).unwrap().ent.unwrap();
            assert!(ent >= g.min_degree());
        }
    }

    #[test]
    fn summary_serializes_expected_fields() {
        let res = solve(&complete(2), 1, &limits()).unwrap();
        let json = serde_json::to_value(res.summary()).unwrap();
        assert_eq!(json["n"], 2);
        assert_eq!(json["k"], 1);
        assert_eq!(json["caught_all"], true);
        assert_eq!(json["ent"], serde_json::Value::Null);
        assert_eq!(json["per_start"], serde_json::json!([true, true]));
    }
}
