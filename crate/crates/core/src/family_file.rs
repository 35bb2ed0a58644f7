//! Plain-text family files.
//!
//! ```text
//! # comment
//! n=4
//! {}
//! 1,2
//! 3,4
//! ```
//!
//! The header is `n=<N>`; each following line is one set, elements
//! comma-separated ascending, `{}` for the empty set; `#` starts a comment line.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::set::{GroundSet, SetFamily, SubsetWord};

pub fn format_family(family: &SetFamily) -> String {
    let mut out = format!("n={}\n", family.n());
    for member in family.iter() {
        if member.is_empty() {
            out.push_str("{}");
        } else {
            for (i, e) in member.elements().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{e}").unwrap();
            }
        }
        out.push('\n');
    }
    out
}

pub fn parse_family(text: &str) -> Result<SetFamily> {
    let mut ground: Option<GroundSet> = None;
    let mut members = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let Some(g) = ground else {
            let n = line
                .strip_prefix("n=")
                .and_then(|v| v.trim().parse::<u32>().ok())
                .ok_or_else(|| err(format!("expected header n=<N>, found {line:?}")))?;
            ground = Some(GroundSet::new(n).map_err(|e| err(e.to_string()))?);
            continue;
        };
        if line == "{}" {
            members.push(SubsetWord::EMPTY);
            continue;
        }
        let elements = line
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| err(format!("bad element {t:?}"))))
            .collect::<Result<Vec<u32>>>()?;
        let set = SubsetWord::from_elements(elements.iter().copied(), g).map_err(|e| err(e.to_string()))?;
        if set.len() as usize != elements.len() {
            return Err(err(format!("repeated element in {line:?}")));
        }
        members.push(set);
    }
    let ground = ground.ok_or(Error::Parse {
        line: 0,
        message: "missing header n=<N>".into(),
    })?;
    SetFamily::new(ground, members)
}

pub fn read_family(path: &Path) -> std::io::Result<Result<SetFamily>> {
    Ok(parse_family(&std::fs::read_to_string(path)?))
}

pub fn write_family(path: &Path, family: &SetFamily) -> std::io::Result<()> {
    std::fs::write(path, format_family(family))
}
