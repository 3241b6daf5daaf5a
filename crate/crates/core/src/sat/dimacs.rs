//! DIMACS CNF reading and writing for uniform-width instances.

use serde::{Deserialize, Serialize};

use super::{Clause, EnsembleParams, SatInstance};
use crate::error::{Error, Result};

/// JSON sidecar written next to each generated DIMACS file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub seed: u64,
    pub solutions: Option<u64>,
}

/// Parses a DIMACS CNF document. Every clause must have the same width, which
/// becomes the instance's `k`.
pub fn parse_dimacs(text: &str) -> Result<SatInstance> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "duplicate problem line".into(),
                });
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse {
                line: line_no,
                msg: format!("malformed problem line `{line}`"),
            };
            if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
                return Err(bad());
            }
            let n = fields[2].parse().map_err(|_| bad())?;
            let m = fields[3].parse().map_err(|_| bad())?;
            header = Some((n, m));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(Error::Parse {
                line: line_no,
                msg: "clause before problem line".into(),
            });
        };
        for tok in line.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad literal `{tok}`"),
            })?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() as usize > n {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("literal {lit} outside 1..={n}"),
                    });
                }
                current.push(lit);
            }
        }
    }

    let (n, m) = header.ok_or(Error::Parse {
        line: 0,
        msg: "missing problem line".into(),
    })?;
    if !current.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "last clause not terminated by 0".into(),
        });
    }
    if clauses.len() != m {
        return Err(Error::Parse {
            line: 0,
            msg: format!("header declares {m} clauses, found {}", clauses.len()),
        });
    }
    let k = clauses.first().map_or(1, Vec::len);
    if clauses.iter().any(|c| c.len() != k) {
        return Err(Error::UnsupportedInstance("clauses of differing width".into()));
    }
    if k == 0 {
        return Err(Error::UnsupportedInstance("empty clause".into()));
    }
    let params = EnsembleParams::new(n, k, m)?;
    let clauses = clauses
        .iter()
        .map(|lits| {
            let vars: Vec<usize> = lits.iter().map(|l| l.unsigned_abs() as usize - 1).collect();
            let neg: Vec<bool> = lits.iter().map(|&l| l < 0).collect();
            Clause::new(&vars, &neg, n)
        })
        .collect::<Result<Vec<_>>>()?;
    SatInstance::new(params, clauses)
}

/// Writes the instance in canonical form: literals in increasing variable
/// order, one clause per line.
pub fn emit_dimacs(instance: &SatInstance) -> String {
    let p = instance.params();
    let mut out = format!("p cnf {} {}\n", p.n, p.m);
    for c in instance.clauses() {
        for (v, neg) in c.literals() {
            let lit = v as i64 + 1;
            out.push_str(&format!("{} ", if neg { -lit } else { lit }));
        }
        out.push_str("0\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::{generate_instance, Assignment};
    use proptest::prelude::*;

    #[test]
    fn parses_small_example() {
        let inst = parse_dimacs("p cnf 3 2\n1 -2 0\n2 3 0\n").unwrap();
        assert_eq!(inst.params(), EnsembleParams::new(3, 2, 2).unwrap());
        assert_eq!(inst.count_solutions().unwrap(), 4);
        let s = Assignment::from_bools(&[false, false, true]);
        assert_eq!(inst.cost(&s).unwrap(), 0);
        assert_eq!(emit_dimacs(&inst), "p cnf 3 2\n1 -2 0\n2 3 0\n");
    }

    #[test]
    fn comments_and_wrapped_clauses() {
        let text = "c a comment\np cnf 4 2\n1 -2\n 3 0 -4 2 1 0\n";
        let inst = parse_dimacs(text).unwrap();
        assert_eq!(inst.params().k, 3);
        assert_eq!(emit_dimacs(&inst), "p cnf 4 2\n1 -2 3 0\n1 2 -4 0\n");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            parse_dimacs("p cnf 3 2\n1 -1 0\n2 3 0\n"),
            Err(Error::InvalidParameters(_))
        ));
        assert!(matches!(
            parse_dimacs("p cnf 3 2\n1 2 3 0\n2 3 0\n"),
            Err(Error::UnsupportedInstance(_))
        ));
        assert!(matches!(
            parse_dimacs("p cnf three 2\n"),
            Err(Error::Parse { .. })
        ));
        assert!(parse_dimacs("p cnf 3 2\n1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 3 1\n1 5 0\n").is_err());
        assert!(parse_dimacs("1 2 0\n").is_err());
    }

    proptest! {
        #[test]
        fn emit_parse_roundtrip(n in 3usize..30, k in 1usize..4, m in 1usize..60, seed: u64) {
            let params = EnsembleParams::new(n, k.min(n), m).unwrap();
            let inst = generate_instance(params, seed);
            let text = emit_dimacs(&inst);
            let back = parse_dimacs(&text).unwrap();
            prop_assert_eq!(&back, &inst);
            prop_assert_eq!(emit_dimacs(&back), text);
        }
    }
}
