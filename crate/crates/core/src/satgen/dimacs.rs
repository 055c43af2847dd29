use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A formula in conjunctive normal form. Literals are non-zero signed
/// variable numbers, 1-based as in DIMACS.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cnf {
    pub variable_count: usize,
    pub clauses: Vec<Vec<i32>>,
    /// Optional variable names from `c <index> <name>` comment lines.
    pub names: Vec<Option<String>>,
}

impl Cnf {
    pub fn new(variable_count: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        for (i, c) in clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::model(format!("clause {} is empty", i + 1)));
            }
            if let Some(&l) = c
                .iter()
                .find(|&&l| l == 0 || l.unsigned_abs() as usize > variable_count)
            {
                return Err(Error::model(format!(
                    "clause {} has literal {l} outside 1..={variable_count}",
                    i + 1
                )));
            }
        }
        Ok(Self {
            variable_count,
            clauses,
            names: vec![None; variable_count],
        })
    }

    pub fn with_names(mut self, names: Vec<Option<String>>) -> Result<Self> {
        if names.len() != self.variable_count {
            return Err(Error::structural(
                "name list length does not match variable count",
            ));
        }
        self.names = names;
        Ok(self)
    }

    /// Name of variable `v` (0-based), falling back to `x<v+1>`.
    pub fn name(&self, v: usize) -> String {
        self.names
            .get(v)
            .cloned()
            .flatten()
            .unwrap_or_else(|| format!("x{}", v + 1))
    }

    pub fn clause_satisfied(clause: &[i32], bits: &[bool]) -> bool {
        clause.iter().any(|&l| {
            let v = bits[l.unsigned_abs() as usize - 1];
            if l > 0 {
                v
            } else {
                !v
            }
        })
    }

    /// Number of clauses the assignment leaves unsatisfied.
    pub fn violations(&self, bits: &[bool]) -> Result<usize> {
        self.check_len(bits)?;
        Ok(self
            .clauses
            .iter()
            .filter(|c| !Self::clause_satisfied(c, bits))
            .count())
    }

    pub fn satisfied_by(&self, bits: &[bool]) -> Result<bool> {
        self.check_len(bits)?;
        Ok(self.clauses.iter().all(|c| Self::clause_satisfied(c, bits)))
    }

    fn check_len(&self, bits: &[bool]) -> Result<()> {
        if bits.len() != self.variable_count {
            return Err(Error::structural(format!(
                "assignment has {} values, formula has {} variables",
                bits.len(),
                self.variable_count
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    pub bits: Vec<bool>,
}

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// `0`/`1` string, one character per variable.
    pub fn to_bitstring(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses DIMACS CNF. Clauses may span lines; a `%` line ends the body.
pub fn parse_dimacs(text: &str) -> Result<Cnf> {
    let mut header: Option<(usize, usize)> = None;
    let mut names: Vec<(usize, usize, String)> = Vec::new();
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if let Some(rest) = line.strip_prefix('c') {
            if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                let mut parts = rest.split_whitespace();
                if let (Some(idx), Some(name)) = (parts.next(), parts.next()) {
                    if let Ok(v) = idx.trim_end_matches('$').parse::<usize>() {
                        names.push((lineno, v, name.to_string()));
                    }
                }
                continue;
            }
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(parse_err(lineno, "duplicate problem line"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(parse_err(
                    lineno,
                    format!("malformed problem line {line:?}"),
                ));
            }
            let vars = parts[2]
                .parse::<usize>()
                .map_err(|_| parse_err(lineno, format!("bad variable count {:?}", parts[2])))?;
            let count = parts[3]
                .parse::<usize>()
                .map_err(|_| parse_err(lineno, format!("bad clause count {:?}", parts[3])))?;
            header = Some((vars, count));
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(parse_err(lineno, "clause before problem line"));
        };
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad literal {tok:?}")))?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(parse_err(lineno, "empty clause"));
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() as usize > vars {
                    return Err(parse_err(
                        lineno,
                        format!("literal {lit} exceeds declared variable count {vars}"),
                    ));
                }
                current.push(lit as i32);
            }
        }
    }

    let Some((vars, count)) = header else {
        return Err(parse_err(last_line.max(1), "missing problem line"));
    };
    if !current.is_empty() {
        return Err(parse_err(last_line, "last clause is not terminated by 0"));
    }
    if clauses.len() != count {
        return Err(parse_err(
            last_line,
            format!(
                "problem line declares {count} clauses, found {}",
                clauses.len()
            ),
        ));
    }
    let mut name_table = vec![None; vars];
    for (lineno, v, name) in names {
        if v == 0 || v > vars {
            return Err(parse_err(lineno, format!("name for unknown variable {v}")));
        }
        name_table[v - 1] = Some(name);
    }
    Ok(Cnf {
        variable_count: vars,
        clauses,
        names: name_table,
    })
}

/// Serializes with one clause per line; names become `c <index> <name>` lines.
pub fn to_dimacs(cnf: &Cnf) -> String {
    let mut out = String::new();
    for (i, n) in cnf.names.iter().enumerate() {
        if let Some(n) = n {
            let _ = writeln!(out, "c {} {}", i + 1, n);
        }
    }
    let _ = writeln!(out, "p cnf {} {}", cnf.variable_count, cnf.clauses.len());
    for c in &cnf.clauses {
        for l in c {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let cnf = parse_dimacs("p cnf 2 1\n1 -2 0").unwrap();
        assert_eq!(cnf.variable_count, 2);
        assert_eq!(cnf.clauses, vec![vec![1, -2]]);
    }

    #[test]
    fn comments_and_names() {
        let cnf =
            parse_dimacs("c a comment\nc 1 Root\nc 2$ Leaf\np cnf 2 2\n1 0\n-2\n 1 0\n").unwrap();
        assert_eq!(cnf.clauses, vec![vec![1], vec![-2, 1]]);
        assert_eq!(cnf.name(0), "Root");
        assert_eq!(cnf.name(1), "Leaf");
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse_dimacs("p cnf 3 3\n1 0\n2 0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n3 0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_dimacs("1 0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_dimacs("p dnf 2 1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n1 2\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n1 x 0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn percent_terminates_body() {
        let cnf = parse_dimacs("p cnf 2 1\n1 2 0\n%\n0\n").unwrap();
        assert_eq!(cnf.clauses.len(), 1);
    }

    #[test]
    fn round_trip() {
        let text = "c 1 a\np cnf 3 2\n1 -3 0\n2 3 -1 0\n";
        let cnf = parse_dimacs(text).unwrap();
        assert_eq!(parse_dimacs(&to_dimacs(&cnf)).unwrap(), cnf);
    }

    #[test]
    fn violations_count() {
        let cnf = parse_dimacs("p cnf 2 2\n1 0\n-1 -2 0\n").unwrap();
        assert_eq!(cnf.violations(&[false, false]).unwrap(), 1);
        assert_eq!(cnf.violations(&[true, true]).unwrap(), 1);
        assert!(cnf.satisfied_by(&[true, false]).unwrap());
        assert!(cnf.violations(&[true]).is_err());
    }
}
