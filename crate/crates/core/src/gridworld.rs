//! Grid-map path planning compiled to automata over moves `N E S W`.
//!
//! A map has one start `S`, one end `E`, drop-off points `O`, charging
//! stations `C` and impassable cells `X`; every passable cell has a cost.
//! A plan is a word of moves. It is acceptable when it stays on passable
//! cells, ends at `E`, has visited every `O` and has entered some `C`. Its
//! label is the first station entered (stations numbered from 1 in
//! row-major order) and its cost is the sum of the costs of the cells it
//! occupies, including the start.
//!
//! Map text is a list of rows separated by newlines or `/`. When any row
//! contains inner whitespace, rows are whitespace-separated tokens of an
//! optional marker letter followed by optional cost digits (`S0 2 X C1`);
//! otherwise every character is one cell (`S1 / 1E`). A missing cost is 0.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::automata::{AutomataError, Dfa, StateOutputDfa, WeightedDfa};
use crate::exact_scheme::{CostSpec, DfaInstance, SchemeError};
use crate::lqci::LqciParams;

pub const MAX_DROPOFFS: usize = 16;
pub const MAX_STATIONS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GridError {
    #[error("row {row}: cannot read cell `{token}`")]
    Malformed { row: usize, token: String },
    #[error("expected {expected} `{marker}` marker(s), found {found}")]
    MarkerCount {
        marker: char,
        expected: &'static str,
        found: usize,
    },
    #[error("row {row} has {found} cells, expected {expected}")]
    NonRectangular {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("map is empty")]
    Empty,
    #[error("{0} drop-off points exceed the limit of {MAX_DROPOFFS}")]
    TooManyDropoffs(usize),
    #[error("{0} charging stations exceed the limit of {MAX_STATIONS}")]
    TooManyStations(usize),
    #[error(transparent)]
    Automata(#[from] AutomataError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Marker {
    Start,
    End,
    Dropoff,
    Charge,
    Blocked,
}

impl Marker {
    fn from_char(c: char) -> Option<Self> {
        Some(match c {
            'S' => Marker::Start,
            'E' => Marker::End,
            'O' => Marker::Dropoff,
            'C' => Marker::Charge,
            'X' => Marker::Blocked,
            _ => return None,
        })
    }

    fn letter(self) -> char {
        match self {
            Marker::Start => 'S',
            Marker::End => 'E',
            Marker::Dropoff => 'O',
            Marker::Charge => 'C',
            Marker::Blocked => 'X',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub cost: u64,
    pub marker: Option<Marker>,
}

impl Cell {
    pub fn passable(&self) -> bool {
        self.marker != Some(Marker::Blocked)
    }
}

/// Move alphabet, in symbol order.
pub const MOVES: [&str; 4] = ["N", "E", "S", "W"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    pub width: usize,
    pub height: usize,
    /// Row-major.
    pub cells: Vec<Cell>,
}

fn parse_token(token: &str, row: usize) -> Result<Cell, GridError> {
    let malformed = || GridError::Malformed {
        row,
        token: token.to_string(),
    };
    let mut chars = token.chars();
    let first = chars.clone().next().ok_or_else(malformed)?;
    let marker = Marker::from_char(first);
    if marker.is_some() {
        chars.next();
    }
    let digits = chars.as_str();
    let cost = if digits.is_empty() {
        if marker.is_none() {
            return Err(malformed());
        }
        0
    } else if digits.bytes().all(|b| b.is_ascii_digit()) {
        digits.parse().map_err(|_| malformed())?
    } else {
        return Err(malformed());
    };
    Ok(Cell { cost, marker })
}

/// Parses and validates a map.
pub fn parse_map(text: &str) -> Result<GridMap, GridError> {
    let rows: Vec<&str> = text
        .split(['\n', '/'])
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .collect();
    if rows.is_empty() {
        return Err(GridError::Empty);
    }
    let tokenized = rows.iter().any(|r| r.contains(char::is_whitespace));
    let mut grid: Vec<Vec<Cell>> = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let cells = if tokenized {
            row.split_whitespace()
                .map(|t| parse_token(t, r))
                .collect::<Result<Vec<_>, _>>()?
        } else {
            row.chars()
                .map(|c| parse_token(&c.to_string(), r))
                .collect::<Result<Vec<_>, _>>()?
        };
        grid.push(cells);
    }
    let width = grid[0].len();
    for (r, row) in grid.iter().enumerate() {
        if row.len() != width {
            return Err(GridError::NonRectangular {
                row: r,
                expected: width,
                found: row.len(),
            });
        }
    }
    let map = GridMap {
        width,
        height: grid.len(),
        cells: grid.into_iter().flatten().collect(),
    };
    map.validate()?;
    Ok(map)
}

impl GridMap {
    fn count(&self, marker: Marker) -> usize {
        self.cells
            .iter()
            .filter(|c| c.marker == Some(marker))
            .count()
    }

    pub fn validate(&self) -> Result<(), GridError> {
        for (marker, letter) in [(Marker::Start, 'S'), (Marker::End, 'E')] {
            let found = self.count(marker);
            if found != 1 {
                return Err(GridError::MarkerCount {
                    marker: letter,
                    expected: "exactly one",
                    found,
                });
            }
        }
        Ok(())
    }

    pub fn cell(&self, row: usize, col: usize) -> &Cell {
        &self.cells[row * self.width + col]
    }

    /// `(row, col)` of the first cell carrying `marker`.
    pub fn find(&self, marker: Marker) -> Option<(usize, usize)> {
        self.cells
            .iter()
            .position(|c| c.marker == Some(marker))
            .map(|i| (i / self.width, i % self.width))
    }

    /// Row-major indices of cells with `marker`.
    pub fn positions(&self, marker: Marker) -> Vec<usize> {
        (0..self.cells.len())
            .filter(|&i| self.cells[i].marker == Some(marker))
            .collect()
    }

    /// The cell reached from `index` by move `symbol` (in [`MOVES`] order),
    /// or `None` when it is off the grid or blocked.
    pub fn neighbour(&self, index: usize, symbol: usize) -> Option<usize> {
        let (r, c) = (index / self.width, index % self.width);
        let (r, c) = match symbol {
            0 => (r.checked_sub(1)?, c),
            1 => (r, c + 1),
            2 => (r + 1, c),
            3 => (r, c.checked_sub(1)?),
            _ => return None,
        };
        if r >= self.height || c >= self.width {
            return None;
        }
        let i = r * self.width + c;
        self.cells[i].passable().then_some(i)
    }

    pub fn max_cost(&self) -> u64 {
        self.cells
            .iter()
            .filter(|c| c.passable())
            .map(|c| c.cost)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for GridMap {
    /// Token form, one row per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.height {
            let row: Vec<String> = (0..self.width)
                .map(|c| {
                    let cell = self.cell(r, c);
                    match cell.marker {
                        Some(Marker::Blocked) => "X".to_string(),
                        Some(m) => format!("{}{}", m.letter(), cell.cost),
                        None => cell.cost.to_string(),
                    }
                })
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// The three automata for a map, plus the label outputs (station numbers).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridEncoding {
    pub hard: Dfa,
    pub label: StateOutputDfa,
    pub cost: WeightedDfa,
    pub labels: Vec<u64>,
}

fn alphabet() -> Vec<String> {
    MOVES.iter().map(|s| s.to_string()).collect()
}

/// Explores the states reachable from `initial` under `step`; `None` from
/// `step` sends a move to a shared dead state, appended last.
fn explore<S: Clone + Eq + std::hash::Hash>(
    initial: S,
    step: impl Fn(&S, usize) -> Option<S>,
) -> (Vec<S>, Vec<Vec<usize>>, bool) {
    let mut ids: HashMap<S, usize> = HashMap::from([(initial.clone(), 0)]);
    let mut states = vec![initial];
    let mut rows: Vec<Vec<Option<usize>>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(q) = queue.pop_front() {
        let mut row = Vec::with_capacity(MOVES.len());
        for a in 0..MOVES.len() {
            row.push(step(&states[q], a).map(|next| {
                *ids.entry(next.clone()).or_insert_with(|| {
                    states.push(next);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                })
            }));
        }
        if rows.len() <= q {
            rows.resize(q + 1, Vec::new());
        }
        rows[q] = row;
    }
    let dead = states.len();
    let has_dead = rows.iter().flatten().any(Option::is_none);
    let mut table: Vec<Vec<usize>> = rows
        .into_iter()
        .map(|row| row.into_iter().map(|t| t.unwrap_or(dead)).collect())
        .collect();
    if has_dead {
        table.push(vec![dead; MOVES.len()]);
    }
    (states, table, has_dead)
}

/// Compiles a map into hard, label and cost automata. Only reachable
/// states are built.
pub fn encode(map: &GridMap) -> Result<GridEncoding, GridError> {
    map.validate()?;
    let dropoffs = map.positions(Marker::Dropoff);
    let stations = map.positions(Marker::Charge);
    if dropoffs.len() > MAX_DROPOFFS {
        return Err(GridError::TooManyDropoffs(dropoffs.len()));
    }
    if stations.len() > MAX_STATIONS {
        return Err(GridError::TooManyStations(stations.len()));
    }
    let dropoff_bit: HashMap<usize, u32> = dropoffs
        .iter()
        .enumerate()
        .map(|(b, &i)| (i, 1u32 << b))
        .collect();
    let station_no: HashMap<usize, u64> = stations
        .iter()
        .enumerate()
        .map(|(n, &i)| (i, n as u64 + 1))
        .collect();
    let full: u32 = dropoff_bit.values().fold(0, |a, b| a | b);
    let start = map.positions(Marker::Start)[0];
    let end = map.positions(Marker::End)[0];
    let is_station = |i: usize| station_no.contains_key(&i);

    // Hard: (cell, visited drop-offs, charged).
    let enter = |mask: u32, charged: bool, i: usize| {
        (
            i,
            mask | dropoff_bit.get(&i).copied().unwrap_or(0),
            charged || is_station(i),
        )
    };
    let (states, rows, has_dead) = explore(enter(0, false, start), |&(i, mask, charged), a| {
        map.neighbour(i, a).map(|j| enter(mask, charged, j))
    });
    let mut accepting: Vec<bool> = states
        .iter()
        .map(|&(i, mask, charged)| i == end && mask == full && charged)
        .collect();
    if has_dead {
        accepting.push(false);
    }
    let hard = Dfa::new(alphabet(), 0, accepting, rows)?;

    // Label: (cell, first station or 0).
    let first = |f: u64, i: usize| {
        if f == 0 {
            station_no.get(&i).copied().unwrap_or(0)
        } else {
            f
        }
    };
    let (states, rows, has_dead) = explore((start, first(0, start)), |&(i, f), a| {
        map.neighbour(i, a).map(|j| (j, first(f, j)))
    });
    let mut outputs: Vec<u64> = states.iter().map(|&(_, f)| f).collect();
    if has_dead {
        outputs.push(0);
    }
    let label = StateOutputDfa::new(
        Dfa::new(alphabet(), 0, vec![true; outputs.len()], rows)?,
        outputs,
    )?;

    // Cost: the occupied cell.
    let (states, rows, has_dead) = explore(start, |&i, a| map.neighbour(i, a));
    let mut weights: Vec<u64> = states.iter().map(|&i| map.cells[i].cost).collect();
    if has_dead {
        weights.push(0);
    }
    let cost = WeightedDfa::new(
        Dfa::new(alphabet(), 0, vec![true; weights.len()], rows)?,
        weights,
    )?;

    Ok(GridEncoding {
        hard,
        label,
        cost,
        labels: (1..=stations.len() as u64).collect(),
    })
}

impl GridEncoding {
    /// Replaces the station label with a single constant label, giving the
    /// unlabelled version of the same planning problem.
    pub fn unlabelled(mut self) -> Self {
        let universal = Dfa::universal(alphabet()).expect("nonempty alphabet");
        self.label = StateOutputDfa::new(universal, vec![1]).expect("one output per state");
        self.labels = vec![1];
        self
    }

    pub fn into_instance(self, params: LqciParams) -> Result<DfaInstance, SchemeError> {
        let instance = DfaInstance {
            hard: self.hard,
            label: self.label,
            cost: CostSpec::Accumulated(self.cost),
            labels: self.labels,
            params,
        };
        instance.validate()?;
        Ok(instance)
    }
}

/// JSON bundle for a grid instance. With `labelled = false` every plan
/// gets the same label and `alpha`/`beta` have one entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridInstanceJson {
    pub grid: String,
    #[serde(default = "labelled_default")]
    pub labelled: bool,
    #[serde(flatten)]
    pub params: LqciParams,
}

fn labelled_default() -> bool {
    true
}

impl GridInstanceJson {
    pub fn to_instance(&self) -> Result<DfaInstance, GridInstanceError> {
        let map = parse_map(&self.grid)?;
        let mut encoding = encode(&map)?;
        if !self.labelled {
            encoding = encoding.unlabelled();
        }
        Ok(encoding.into_instance(self.params.clone())?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GridInstanceError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

/// A 4x4 map with one drop-off, two charging stations and a wall cell.
pub const SAMPLE_MAP: &str = "S0 1 1 C1 / 1 X O2 1 / C2 1 1 1 / 1 2 1 E0";
