//! Dense two-phase simplex over exact rationals with Bland's rule.

use improv_core::rational::Rational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub rel: Relation,
    pub rhs: Rational,
}

/// Minimise `objective . x` subject to the constraints and `x >= 0`.
#[derive(Debug, Clone, Default)]
pub struct Lp {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpResult {
    Infeasible,
    Unbounded,
    Optimal { value: Rational, x: Vec<Rational> },
}

impl Lp {
    pub fn new(num_vars: usize) -> Self {
        Lp {
            num_vars,
            constraints: Vec::new(),
            objective: vec![Rational::zero(); num_vars],
        }
    }

    pub fn add(&mut self, coeffs: Vec<(usize, Rational)>, rel: Relation, rhs: Rational) {
        self.constraints.push(Constraint { coeffs, rel, rhs });
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize, z: &mut [Rational]) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
        }
        if !z[c].is_zero() {
            let f = z[c].clone();
            for (v, pv) in z.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row for `cost` given the current basis.
    fn reduced(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut z: Vec<Rational> = cost.to_vec();
        z.push(Rational::zero());
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (v, a) in z.iter_mut().zip(row) {
                *v -= cb * a;
            }
        }
        z
    }

    /// Returns false when the problem is unbounded.
    fn optimise(&mut self, z: &mut [Rational], allowed: &[bool]) -> bool {
        loop {
            let Some(enter) = (0..self.cols).find(|&j| allowed[j] && z[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if a.is_positive() {
                    let ratio = self.rhs(i) / a;
                    let better = match &leave {
                        None => true,
                        Some((l, best)) => {
                            ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, enter, z);
        }
    }
}

pub fn solve(lp: &Lp) -> LpResult {
    let n = lp.num_vars;
    let m = lp.constraints.len();
    // Normalise to nonnegative right-hand sides.
    let rows: Vec<(Vec<Rational>, Relation, Rational)> = lp
        .constraints
        .iter()
        .map(|c| {
            let mut dense = vec![Rational::zero(); n];
            for (j, a) in &c.coeffs {
                dense[*j] += a;
            }
            if c.rhs.is_negative() {
                let flipped = match c.rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (
                    dense.into_iter().map(|a| -a).collect(),
                    flipped,
                    -c.rhs.clone(),
                )
            } else {
                (dense, c.rel, c.rhs.clone())
            }
        })
        .collect();
    let slacks = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let artificials = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let cols = n + slacks + artificials;
    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        cols,
    };
    let (mut s, mut a) = (n, n + slacks);
    for (dense, rel, rhs) in rows {
        let mut row = dense;
        row.resize(cols + 1, Rational::zero());
        row[cols] = rhs;
        match rel {
            Relation::Le => {
                row[s] = Rational::one();
                tab.basis.push(s);
                s += 1;
            }
            Relation::Ge => {
                row[s] = -Rational::one();
                s += 1;
                row[a] = Rational::one();
                tab.basis.push(a);
                a += 1;
            }
            Relation::Eq => {
                row[a] = Rational::one();
                tab.basis.push(a);
                a += 1;
            }
        }
        tab.rows.push(row);
    }
    let is_artificial = |j: usize| j >= n + slacks && j < cols;

    // Phase 1: minimise the sum of artificials.
    let phase1: Vec<Rational> = (0..cols)
        .map(|j| {
            if is_artificial(j) {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    let mut z = tab.reduced(&phase1);
    let everything = vec![true; cols];
    tab.optimise(&mut z, &everything);
    let infeasibility: Rational = (0..tab.rows.len())
        .filter(|&i| is_artificial(tab.basis[i]))
        .map(|i| tab.rhs(i).clone())
        .sum();
    if infeasibility.is_positive() {
        return LpResult::Infeasible;
    }
    // Drive zero-level artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < tab.rows.len() {
        if is_artificial(tab.basis[i]) {
            match (0..n + slacks).find(|&j| !tab.rows[i][j].is_zero()) {
                Some(j) => {
                    let mut dummy = vec![Rational::zero(); cols + 1];
                    tab.pivot(i, j, &mut dummy);
                }
                None => {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // Phase 2.
    let mut cost = lp.objective.clone();
    cost.resize(cols, Rational::zero());
    let mut z = tab.reduced(&cost);
    let allowed: Vec<bool> = (0..cols).map(|j| !is_artificial(j)).collect();
    if !tab.optimise(&mut z, &allowed) {
        return LpResult::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs(i).clone();
        }
    }
    let value = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
    LpResult::Optimal { value, x }
}

#[cfg(test)]
mod tests {
    use super::*;
    use improv_core::rational::ratio;

    #[test]
    fn small_problems() {
        // min -x - y s.t. x + 2y <= 4, 3x + y <= 6 -> x = 8/5, y = 6/5.
        let mut lp = Lp::new(2);
        lp.objective = vec![ratio(-1, 1), ratio(-1, 1)];
        lp.add(
            vec![(0, ratio(1, 1)), (1, ratio(2, 1))],
            Relation::Le,
            ratio(4, 1),
        );
        lp.add(
            vec![(0, ratio(3, 1)), (1, ratio(1, 1))],
            Relation::Le,
            ratio(6, 1),
        );
        match solve(&lp) {
            LpResult::Optimal { value, x } => {
                assert_eq!(x, vec![ratio(8, 5), ratio(6, 5)]);
                assert_eq!(value, ratio(-14, 5));
            }
            other => panic!("{other:?}"),
        }
        // x >= 2 and x <= 1.
        let mut lp = Lp::new(1);
        lp.add(vec![(0, ratio(1, 1))], Relation::Ge, ratio(2, 1));
        lp.add(vec![(0, ratio(1, 1))], Relation::Le, ratio(1, 1));
        assert_eq!(solve(&lp), LpResult::Infeasible);
        // min -x with x - y = 0 only.
        let mut lp = Lp::new(2);
        lp.objective = vec![ratio(-1, 1), ratio(0, 1)];
        lp.add(
            vec![(0, ratio(1, 1)), (1, ratio(-1, 1))],
            Relation::Eq,
            ratio(0, 1),
        );
        assert_eq!(solve(&lp), LpResult::Unbounded);
        // Redundant equalities.
        let mut lp = Lp::new(2);
        lp.objective = vec![ratio(1, 1), ratio(2, 1)];
        lp.add(
            vec![(0, ratio(1, 1)), (1, ratio(1, 1))],
            Relation::Eq,
            ratio(1, 1),
        );
        lp.add(
            vec![(0, ratio(2, 1)), (1, ratio(2, 1))],
            Relation::Eq,
            ratio(2, 1),
        );
        lp.add(vec![(1, ratio(1, 1))], Relation::Ge, ratio(1, 4));
        match solve(&lp) {
            LpResult::Optimal { value, .. } => assert_eq!(value, ratio(5, 4)),
            other => panic!("{other:?}"),
        }
    }
}
