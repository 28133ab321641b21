//! Learned merge operations and their text format.

use std::fmt::Write as _;

use crate::format::{check_header, FormatError};

const OPS_MAGIC: &str = "graphbpe-ops";
const OPS_VERSION: &str = "v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeOperation {
    pub rank: usize,
    pub pattern: String,
    /// Number of adjacent fragment pairs with this pattern when learned.
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OpsList {
    pub ops: Vec<MergeOperation>,
}

impl OpsList {
    pub fn new(ops: Vec<MergeOperation>) -> Self {
        OpsList { ops }
    }

    /// Builds a list from bare patterns, with zero counts.
    pub fn from_patterns<S: AsRef<str>>(patterns: &[S]) -> Self {
        OpsList {
            ops: patterns
                .iter()
                .enumerate()
                .map(|(rank, p)| MergeOperation {
                    rank,
                    pattern: p.as_ref().to_string(),
                    count: 0,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn patterns(&self) -> impl Iterator<Item = &str> {
        self.ops.iter().map(|o| o.pattern.as_str())
    }

    /// The first `k` operations.
    pub fn truncated(&self, k: usize) -> OpsList {
        OpsList {
            ops: self.ops.iter().take(k).cloned().collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{OPS_MAGIC} {OPS_VERSION} K={}\n", self.ops.len());
        for op in &self.ops {
            writeln!(out, "{}\t{}\t{}", op.rank, op.pattern, op.count).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<OpsList, FormatError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(FormatError::MissingHeader)?;
        let k = parse_ops_header(header)?;
        let mut ops = Vec::with_capacity(k);
        for (i, line) in lines {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let malformed = |what: &str| FormatError::Malformed {
                line: line_no,
                message: what.to_string(),
            };
            if fields.len() != 3 {
                return Err(malformed("expected rank, pattern and count"));
            }
            let rank: usize = fields[0].parse().map_err(|_| malformed("bad rank"))?;
            if rank != ops.len() {
                return Err(malformed("ranks must be contiguous from 0"));
            }
            if fields[1].is_empty() {
                return Err(malformed("empty pattern"));
            }
            let count: usize = fields[2].parse().map_err(|_| malformed("bad count"))?;
            ops.push(MergeOperation {
                rank,
                pattern: fields[1].to_string(),
                count,
            });
        }
        if ops.len() != k {
            return Err(FormatError::Malformed {
                line: 1,
                message: format!("header declares {k} operations, found {}", ops.len()),
            });
        }
        Ok(OpsList { ops })
    }
}

fn parse_ops_header(header: &str) -> Result<usize, FormatError> {
    check_header(Some(header), OPS_MAGIC, OPS_VERSION)?;
    header
        .split_whitespace()
        .nth(2)
        .and_then(|p| p.strip_prefix("K="))
        .and_then(|k| k.parse().ok())
        .ok_or_else(|| FormatError::Malformed {
            line: 1,
            message: "missing K=<n> in header".to_string(),
        })
}
