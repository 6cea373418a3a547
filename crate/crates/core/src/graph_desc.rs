//! Parser for graph descriptions such as `complete:30` or `regular:12:3:7`.
//!
//! Accepted forms: `complete:n`, `bipartite:n`, `cycle:n`, `path:n`,
//! `regular:n:d:seed`, `sharpness:d`, `petersen`, `lps`, `file:path`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{
    complete_bipartite, complete_graph, cycle, lps_gadget, path, petersen, random_regular,
    sharpness_graph, Graph,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphDesc {
    Complete(usize),
    Bipartite(usize),
    Cycle(usize),
    Path(usize),
    Regular { n: usize, d: usize, seed: u64 },
    Sharpness(usize),
    Petersen,
    Lps,
    File(String),
}

fn number<T: FromStr>(field: &str, what: &str, desc: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} '{field}' in graph '{desc}'")))
}

impl FromStr for GraphDesc {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let arity = |k: usize| {
            if parts.len() == k {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "graph '{s}' needs {} field(s) after the name",
                    k - 1
                )))
            }
        };
        Ok(match parts[0] {
            "complete" => {
                arity(2)?;
                GraphDesc::Complete(number(parts[1], "n", s)?)
            }
            "bipartite" => {
                arity(2)?;
                GraphDesc::Bipartite(number(parts[1], "n", s)?)
            }
            "cycle" => {
                arity(2)?;
                GraphDesc::Cycle(number(parts[1], "n", s)?)
            }
            "path" => {
                arity(2)?;
                GraphDesc::Path(number(parts[1], "n", s)?)
            }
            "regular" => {
                arity(4)?;
                GraphDesc::Regular {
                    n: number(parts[1], "n", s)?,
                    d: number(parts[2], "d", s)?,
                    seed: number(parts[3], "seed", s)?,
                }
            }
            "sharpness" => {
                arity(2)?;
                GraphDesc::Sharpness(number(parts[1], "d", s)?)
            }
            "petersen" => {
                arity(1)?;
                GraphDesc::Petersen
            }
            "lps" => {
                arity(1)?;
                GraphDesc::Lps
            }
            // paths may contain ':'
            "file" if parts.len() >= 2 => GraphDesc::File(s["file:".len()..].to_string()),
            _ => return Err(Error::Parse(format!("unknown graph '{s}'"))),
        })
    }
}

impl fmt::Display for GraphDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphDesc::Complete(n) => write!(f, "complete:{n}"),
            GraphDesc::Bipartite(n) => write!(f, "bipartite:{n}"),
            GraphDesc::Cycle(n) => write!(f, "cycle:{n}"),
            GraphDesc::Path(n) => write!(f, "path:{n}"),
            GraphDesc::Regular { n, d, seed } => write!(f, "regular:{n}:{d}:{seed}"),
            GraphDesc::Sharpness(d) => write!(f, "sharpness:{d}"),
            GraphDesc::Petersen => write!(f, "petersen"),
            GraphDesc::Lps => write!(f, "lps"),
            GraphDesc::File(p) => write!(f, "file:{p}"),
        }
    }
}

impl GraphDesc {
    pub fn build(&self) -> Result<Graph> {
        match self {
            GraphDesc::Complete(n) => Ok(complete_graph(*n)),
            GraphDesc::Bipartite(n) => Ok(complete_bipartite(*n)),
            GraphDesc::Cycle(n) => cycle(*n),
            GraphDesc::Path(n) => Ok(path(*n)),
            GraphDesc::Regular { n, d, seed } => random_regular(*n, *d, *seed),
            GraphDesc::Sharpness(d) => Ok(sharpness_graph(*d)?.graph),
            GraphDesc::Petersen => Ok(petersen()),
            GraphDesc::Lps => Ok(lps_gadget().graph),
            GraphDesc::File(p) => Graph::from_text(&std::fs::read_to_string(p)?),
        }
    }
}

/// Parses and builds in one step.
pub fn parse_graph(s: &str) -> Result<Graph> {
    s.parse::<GraphDesc>()?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for s in ["complete:5", "bipartite:3", "cycle:7", "path:4", "regular:12:3:9", "sharpness:5", "petersen", "lps"] {
            let desc: GraphDesc = s.parse().unwrap();
            assert_eq!(desc.to_string(), s);
            assert!(desc.build().unwrap().n() > 0);
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!("complete".parse::<GraphDesc>().is_err());
        assert!("complete:x".parse::<GraphDesc>().is_err());
        assert!("regular:10:3".parse::<GraphDesc>().is_err());
        assert!("torus:4".parse::<GraphDesc>().is_err());
        assert!(parse_graph("file:/definitely/not/here").is_err());
    }

    #[test]
    fn sizes() {
        assert_eq!(parse_graph("complete:6").unwrap().m(), 15);
        assert_eq!(parse_graph("bipartite:3").unwrap().n(), 6);
        assert_eq!(parse_graph("lps").unwrap().m(), 10);
    }
}
