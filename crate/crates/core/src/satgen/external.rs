use std::io::Write;
use std::process::{Command, Stdio};

use rand::seq::SliceRandom;
use rand::Rng;

use super::dimacs::{to_dimacs, Assignment, Cnf};
use crate::error::{Error, Result};
use crate::seed;

/// A solver process that reads DIMACS on stdin and prints a model as
/// signed literals (optionally prefixed `v`, with `c`/`s` lines ignored).
#[derive(Clone, Debug)]
pub struct ExternalSolver {
    pub program: String,
    pub args: Vec<String>,
}

impl ExternalSolver {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        Self {
            program: program.into(),
            args,
        }
    }

    /// Runs the solver once. Variables missing from its output default to false.
    pub fn solve(&self, cnf: &Cnf) -> Result<Assignment> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| Error::Solver(format!("cannot start {}: {e}", self.program)))?;
        let input = to_dimacs(cnf);
        {
            let mut stdin = child
                .stdin
                .take()
                .ok_or_else(|| Error::Solver("solver stdin unavailable".into()))?;
            // A solver may exit before consuming its input; its exit status decides.
            let _ = stdin.write_all(input.as_bytes());
        }
        let out = child
            .wait_with_output()
            .map_err(|e| Error::Solver(format!("waiting for {}: {e}", self.program)))?;
        if !out.status.success() {
            return Err(Error::Solver(format!(
                "{} exited with {}: {}",
                self.program,
                out.status,
                String::from_utf8_lossy(&out.stderr).trim()
            )));
        }
        let text = String::from_utf8_lossy(&out.stdout);
        let bits = parse_model(&text, cnf.variable_count)?;
        if !cnf.satisfied_by(&bits)? {
            return Err(Error::Solver(
                "solver returned an assignment that violates the formula".into(),
            ));
        }
        Ok(Assignment::new(bits))
    }

    /// Diverse samples from a deterministic solver: every call renames the
    /// variables and flips literal signs at random, then maps the model back.
    pub fn sample(&self, cnf: &Cnf, count: usize, master: u64) -> Result<Vec<Assignment>> {
        let n = cnf.variable_count;
        (0..count)
            .map(|k| {
                let mut rng = seed::rng(seed::split(master, k as u64));
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                let flip: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
                let clauses = cnf
                    .clauses
                    .iter()
                    .map(|c| {
                        c.iter()
                            .map(|&l| {
                                let v = l.unsigned_abs() as usize - 1;
                                let sign = if (l < 0) != flip[v] { -1 } else { 1 };
                                sign * (perm[v] as i32 + 1)
                            })
                            .collect()
                    })
                    .collect();
                let shuffled = Cnf::new(n, clauses)?;
                let solved = self.solve(&shuffled)?;
                Ok(Assignment::new(
                    (0..n).map(|v| solved.bits[perm[v]] != flip[v]).collect(),
                ))
            })
            .collect()
    }
}

fn parse_model(text: &str, n: usize) -> Result<Vec<bool>> {
    let mut bits = vec![false; n];
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('s') {
            continue;
        }
        let body = line.strip_prefix('v').unwrap_or(line);
        for tok in body.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| Error::Solver(format!("unexpected solver output token {tok:?}")))?;
            if lit == 0 {
                continue;
            }
            let v = lit.unsigned_abs() as usize;
            if v > n {
                return Err(Error::Solver(format!(
                    "solver mentioned unknown variable {v}"
                )));
            }
            bits[v - 1] = lit > 0;
        }
    }
    Ok(bits)
}
