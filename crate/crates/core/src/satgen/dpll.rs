//! DPLL with two watched literals and chronological backtracking. Variable
//! order and first polarity are randomized per call, which is what gives
//! the sampler its diversity.

use rand::seq::SliceRandom;
use rand::Rng;

use super::dimacs::Cnf;
use crate::error::{Error, Result};

type Lit = usize;

#[inline]
fn lit_of(l: i32) -> Lit {
    let v = l.unsigned_abs() as usize - 1;
    2 * v + usize::from(l < 0)
}

#[inline]
fn neg(l: Lit) -> Lit {
    l ^ 1
}

#[inline]
fn var(l: Lit) -> usize {
    l >> 1
}

const UNASSIGNED: u8 = 2;

struct Decision {
    trail_len: usize,
    lit: Lit,
    flipped: bool,
    next_pos: usize,
}

/// Reusable solver state for one formula.
pub struct Dpll {
    n: usize,
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    units: Vec<Lit>,
    trivially_unsat: bool,
    value: Vec<u8>,
    trail: Vec<Lit>,
    qhead: usize,
    order: Vec<usize>,
    polarity: Vec<bool>,
    max_conflicts: u64,
}

impl Dpll {
    pub fn new(cnf: &Cnf) -> Self {
        let n = cnf.variable_count;
        let mut clauses = Vec::new();
        let mut units = Vec::new();
        let mut trivially_unsat = false;
        for c in &cnf.clauses {
            let mut lits: Vec<Lit> = c.iter().map(|&l| lit_of(l)).collect();
            lits.sort_unstable();
            lits.dedup();
            if lits
                .windows(2)
                .any(|w| w[0] == neg(w[1]) && var(w[0]) == var(w[1]))
            {
                continue;
            }
            match lits.len() {
                0 => trivially_unsat = true,
                1 => units.push(lits[0]),
                _ => clauses.push(lits),
            }
        }
        let mut watches = vec![Vec::new(); 2 * n];
        for (i, c) in clauses.iter().enumerate() {
            watches[c[0]].push(i);
            watches[c[1]].push(i);
        }
        Self {
            n,
            clauses,
            watches,
            units,
            trivially_unsat,
            value: vec![UNASSIGNED; n],
            trail: Vec::with_capacity(n),
            qhead: 0,
            order: (0..n).collect(),
            polarity: vec![false; n],
            max_conflicts: 1_000_000,
        }
    }

    pub fn with_max_conflicts(mut self, cap: u64) -> Self {
        self.max_conflicts = cap;
        self
    }

    /// 1 = true, 0 = false, 2 = unassigned.
    #[inline]
    fn lit_value(&self, l: Lit) -> u8 {
        let v = self.value[var(l)];
        if v == UNASSIGNED {
            UNASSIGNED
        } else {
            v ^ (l as u8 & 1)
        }
    }

    #[inline]
    fn assign(&mut self, l: Lit) {
        self.value[var(l)] = 1 ^ (l as u8 & 1);
        self.trail.push(l);
    }

    fn undo_to(&mut self, len: usize) {
        for &l in &self.trail[len..] {
            self.value[var(l)] = UNASSIGNED;
        }
        self.trail.truncate(len);
        self.qhead = self.qhead.min(len);
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = neg(p);
            let mut ws = std::mem::take(&mut self.watches[false_lit]);
            let mut i = 0;
            let mut conflict = false;
            while i < ws.len() {
                let ci = ws[i];
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                let fv = {
                    let v = self.value[var(first)];
                    if v == UNASSIGNED {
                        UNASSIGNED
                    } else {
                        v ^ (first as u8 & 1)
                    }
                };
                if fv == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let l = clause[k];
                    let v = self.value[var(l)];
                    let lv = if v == UNASSIGNED {
                        UNASSIGNED
                    } else {
                        v ^ (l as u8 & 1)
                    };
                    if lv != 0 {
                        clause.swap(1, k);
                        let new_watch = clause[1];
                        self.watches[new_watch].push(ci);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if fv == 0 {
                    conflict = true;
                    break;
                }
                self.assign(first);
                i += 1;
            }
            // Restore the (possibly shrunk) watch list, keeping anything added meanwhile.
            let added = std::mem::replace(&mut self.watches[false_lit], ws);
            self.watches[false_lit].extend(added);
            if conflict {
                return false;
            }
        }
        true
    }

    /// Finds one satisfying assignment, randomizing branching order and
    /// polarity with `rng`. `Ok(None)` means unsatisfiable.
    pub fn solve<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Option<Vec<bool>>> {
        self.undo_to(0);
        if self.trivially_unsat {
            return Ok(None);
        }
        self.order.shuffle(rng);
        for p in self.polarity.iter_mut() {
            *p = rng.gen_bool(0.5);
        }
        for i in 0..self.units.len() {
            let l = self.units[i];
            match self.lit_value(l) {
                0 => return Ok(None),
                1 => {}
                _ => self.assign(l),
            }
        }
        if !self.propagate() {
            return Ok(None);
        }

        let mut stack: Vec<Decision> = Vec::new();
        let mut next_pos = 0;
        let mut conflicts = 0u64;
        loop {
            while next_pos < self.n && self.value[self.order[next_pos]] != UNASSIGNED {
                next_pos += 1;
            }
            if next_pos == self.n {
                let bits = self.value.iter().map(|&v| v == 1).collect();
                self.undo_to(0);
                return Ok(Some(bits));
            }
            let v = self.order[next_pos];
            let lit = 2 * v + usize::from(!self.polarity[v]);
            stack.push(Decision {
                trail_len: self.trail.len(),
                lit,
                flipped: false,
                next_pos,
            });
            self.assign(lit);
            while !self.propagate() {
                conflicts += 1;
                if conflicts > self.max_conflicts {
                    self.undo_to(0);
                    return Err(Error::Solver(format!(
                        "gave up after {} conflicts",
                        self.max_conflicts
                    )));
                }
                loop {
                    let Some(d) = stack.pop() else {
                        self.undo_to(0);
                        return Ok(None);
                    };
                    self.undo_to(d.trail_len);
                    if !d.flipped {
                        next_pos = d.next_pos;
                        stack.push(Decision {
                            flipped: true,
                            lit: neg(d.lit),
                            ..d
                        });
                        self.assign(neg(d.lit));
                        break;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    fn brute_force_sat(cnf: &Cnf) -> bool {
        (0..1u32 << cnf.variable_count).any(|m| {
            let bits: Vec<bool> = (0..cnf.variable_count).map(|i| m >> i & 1 == 1).collect();
            cnf.satisfied_by(&bits).unwrap()
        })
    }

    #[test]
    fn agrees_with_brute_force_on_random_3sat() {
        let mut rng = seed::rng(42);
        for round in 0..300 {
            let n = rng.gen_range(3..=10);
            let m = rng.gen_range(1..=5 * n);
            let clauses: Vec<Vec<i32>> = (0..m)
                .map(|_| {
                    (0..rng.gen_range(1..=3))
                        .map(|_| {
                            let v = rng.gen_range(1..=n as i32);
                            if rng.gen_bool(0.5) {
                                v
                            } else {
                                -v
                            }
                        })
                        .collect()
                })
                .collect();
            let cnf = Cnf::new(n, clauses).unwrap();
            let mut solver = Dpll::new(&cnf);
            let got = solver.solve(&mut seed::rng(round)).unwrap();
            assert_eq!(got.is_some(), brute_force_sat(&cnf), "round {round}");
            if let Some(bits) = got {
                assert!(cnf.satisfied_by(&bits).unwrap());
            }
        }
    }

    #[test]
    fn contradictory_units() {
        let cnf = Cnf::new(1, vec![vec![1], vec![-1]]).unwrap();
        assert_eq!(Dpll::new(&cnf).solve(&mut seed::rng(0)).unwrap(), None);
    }

    #[test]
    fn conflict_cap_reports_solver_error() {
        // Pigeonhole 4 into 3 needs backtracking.
        let p = |i: i32, h: i32| i * 3 + h + 1;
        let mut clauses = Vec::new();
        for i in 0..4 {
            clauses.push((0..3).map(|h| p(i, h)).collect());
        }
        for h in 0..3 {
            for i in 0..4 {
                for j in i + 1..4 {
                    clauses.push(vec![-p(i, h), -p(j, h)]);
                }
            }
        }
        let cnf = Cnf::new(12, clauses).unwrap();
        let mut solver = Dpll::new(&cnf).with_max_conflicts(1);
        assert!(matches!(
            solver.solve(&mut seed::rng(0)),
            Err(Error::Solver(_))
        ));
        let mut solver = Dpll::new(&cnf);
        assert_eq!(solver.solve(&mut seed::rng(0)).unwrap(), None);
    }
}
