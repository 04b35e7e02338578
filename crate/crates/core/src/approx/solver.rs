//! A small DPLL solver with projected model enumeration. It is meant for
//! desk-scale formulas (a few dozen projected bits at most).

use super::cnf::{Clause, Lit};

pub(crate) struct Dpll<'a> {
    clauses: &'a [Clause],
    /// 0 unassigned, 1 true, -1 false; indexed by variable.
    value: Vec<i8>,
    trail: Vec<u32>,
    /// Variables that occur in some clause, ascending.
    used: Vec<u32>,
}

impl<'a> Dpll<'a> {
    pub(crate) fn new(num_vars: u32, clauses: &'a [Clause]) -> Self {
        let mut occurs = vec![false; num_vars as usize + 1];
        for c in clauses {
            for &l in c {
                occurs[l.unsigned_abs() as usize] = true;
            }
        }
        let used = (1..=num_vars).filter(|&v| occurs[v as usize]).collect();
        Dpll {
            clauses,
            value: vec![0; num_vars as usize + 1],
            trail: Vec::new(),
            used,
        }
    }

    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[l.unsigned_abs() as usize];
        if l > 0 {
            v
        } else {
            -v
        }
    }

    fn assign(&mut self, l: Lit) {
        let var = l.unsigned_abs();
        self.value[var as usize] = if l > 0 { 1 } else { -1 };
        self.trail.push(var);
    }

    fn undo(&mut self, mark: usize) {
        for var in self.trail.drain(mark..) {
            self.value[var as usize] = 0;
        }
    }

    /// Unit propagation to a fixpoint; `false` on conflict.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for c in self.clauses {
                let mut open = None;
                let mut open_count = 0;
                let mut satisfied = false;
                for &l in c {
                    match self.lit_value(l) {
                        1 => {
                            satisfied = true;
                            break;
                        }
                        0 => {
                            open_count += 1;
                            open = Some(l);
                        }
                        _ => {}
                    }
                }
                if satisfied {
                    continue;
                }
                match (open_count, open) {
                    (0, _) => return false,
                    (1, Some(l)) => {
                        self.assign(l);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn satisfiable(&mut self) -> bool {
        let mark = self.trail.len();
        if !self.propagate() {
            self.undo(mark);
            return false;
        }
        let Some(&var) = self.used.iter().find(|&&v| self.value[v as usize] == 0) else {
            return true;
        };
        for l in [-(var as Lit), var as Lit] {
            let inner = self.trail.len();
            self.assign(l);
            if self.satisfiable() {
                return true;
            }
            self.undo(inner);
        }
        self.undo(mark);
        false
    }

    /// A satisfying assignment (unconstrained variables false), if any.
    pub(crate) fn solve(mut self) -> Option<Vec<bool>> {
        self.satisfiable()
            .then(|| self.value.iter().map(|&v| v == 1).collect())
    }

    /// Every assignment to `projection` that extends to a model, packed
    /// big-endian into a `u64` (first projection variable is the top bit),
    /// in ascending order.
    pub(crate) fn enumerate_projected(mut self, projection: &[u32]) -> Vec<u64> {
        assert!(projection.len() < 64);
        let mut out = Vec::new();
        self.enumerate(projection, &mut out);
        out
    }

    fn enumerate(&mut self, projection: &[u32], out: &mut Vec<u64>) {
        let mark = self.trail.len();
        if !self.propagate() {
            self.undo(mark);
            return;
        }
        match projection.iter().find(|&&v| self.value[v as usize] == 0) {
            Some(&var) => {
                for l in [-(var as Lit), var as Lit] {
                    let inner = self.trail.len();
                    self.assign(l);
                    self.enumerate(projection, out);
                    self.undo(inner);
                }
            }
            None => {
                let inner = self.trail.len();
                if self.satisfiable() {
                    out.push(projection.iter().fold(0u64, |acc, &v| {
                        acc << 1 | u64::from(self.value[v as usize] == 1)
                    }));
                }
                self.undo(inner);
            }
        }
        self.undo(mark);
    }
}
