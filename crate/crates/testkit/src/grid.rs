//! Walks move words over a grid map directly, without any automaton.

use improv_core::automata::Word;
use improv_core::gridworld::{GridMap, Marker};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    /// False when a move leaves the grid or enters a blocked cell.
    pub legal: bool,
    pub path: Vec<usize>,
    pub cost: u64,
    /// 1-based index, in row-major order, of the first charging station entered.
    pub first_station: Option<usize>,
    pub visited_all_dropoffs: bool,
    pub ends_at_goal: bool,
}

impl Replay {
    /// Meets every hard requirement of the delivery task.
    pub fn is_valid_plan(&self) -> bool {
        self.legal && self.ends_at_goal && self.visited_all_dropoffs && self.first_station.is_some()
    }
}

fn marked(map: &GridMap, marker: Marker) -> Vec<usize> {
    (0..map.cells.len())
        .filter(|&i| map.cells[i].marker == Some(marker))
        .collect()
}

/// Symbols are N, E, S, W in that order.
pub fn replay(map: &GridMap, word: &[usize]) -> Replay {
    let start = marked(map, Marker::Start)[0];
    let goal = marked(map, Marker::End)[0];
    let stations = marked(map, Marker::Charge);
    let dropoffs = marked(map, Marker::Dropoff);
    let (w, h) = (map.width as i64, map.height as i64);
    let mut path = vec![start];
    let mut legal = true;
    let (mut r, mut c) = ((start / map.width) as i64, (start % map.width) as i64);
    for &a in word {
        let (dr, dc) = [(-1, 0), (0, 1), (1, 0), (0, -1)][a];
        let (nr, nc) = (r + dr, c + dc);
        if nr < 0 || nc < 0 || nr >= h || nc >= w {
            legal = false;
            break;
        }
        let idx = (nr * w + nc) as usize;
        if map.cells[idx].marker == Some(Marker::Blocked) {
            legal = false;
            break;
        }
        (r, c) = (nr, nc);
        path.push(idx);
    }
    let cost = path.iter().map(|&i| map.cells[i].cost).sum();
    let first_station = path
        .iter()
        .find_map(|i| stations.iter().position(|s| s == i))
        .map(|p| p + 1);
    let visited_all_dropoffs = dropoffs.iter().all(|d| path.contains(d));
    let ends_at_goal = legal && *path.last().unwrap() == goal;
    Replay {
        legal,
        path,
        cost,
        first_station,
        visited_all_dropoffs,
        ends_at_goal,
    }
}

/// Every valid plan with `m..=n` moves, found by depth-first search over
/// legal moves.
pub fn valid_plans(map: &GridMap, m: usize, n: usize) -> Vec<(Word, Replay)> {
    let mut out = Vec::new();
    let mut word = Vec::new();
    walk(map, m, n, &mut word, &mut out);
    out
}

fn walk(map: &GridMap, m: usize, n: usize, word: &mut Word, out: &mut Vec<(Word, Replay)>) {
    let r = replay(map, word);
    if !r.legal {
        return;
    }
    if word.len() >= m && r.is_valid_plan() {
        out.push((word.clone(), r));
    }
    if word.len() == n {
        return;
    }
    for a in 0..4 {
        word.push(a);
        walk(map, m, n, word, out);
        word.pop();
    }
}
