//! Line-oriented text document for drawings.
//!
//! ```text
//! pks-drawing 1
//! box <a> <b>
//! kind continuous | kind lattice <step>
//! seed <master> <stream>
//! params <digest as 16 hex digits>
//! segments <n>
//! <x-> <y-> <x+> <y+> V|H <intensity>        (n lines)
//! nodes <m>
//! <x> <y> <KIND> <N> <E> <S> <W>              (m lines, '-' for no segment)
//! diagnostics <k>
//! <free text>                                 (k lines)
//! end
//! ```
//!
//! Coordinates are tick integers in `[0, 2^48]`; reals are written in the
//! shortest decimal form that reads back to the same binary64; lattice
//! intensities are integer indices in units of the step.

use std::fmt::Write as _;

use super::{Charge, ChargeKind, Drawing, Node, NodeKind, Orientation, Point, Segment, TICKS};
use crate::error::{Error, Result};
use crate::rng::Seed;

const MAGIC: &str = "pks-drawing 1";

pub fn serialize(d: &Drawing) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "box {:?} {:?}", d.a, d.b);
    match d.charges {
        ChargeKind::Continuous => out.push_str("kind continuous\n"),
        ChargeKind::Lattice { step } => {
            let _ = writeln!(out, "kind lattice {step:?}");
        }
    }
    let _ = writeln!(out, "seed {} {}", d.seed.master, d.seed.stream);
    let _ = writeln!(out, "params {:016x}", d.params_digest);
    let _ = writeln!(out, "segments {}", d.segments.len());
    for s in &d.segments {
        let o = match s.orientation {
            Orientation::Vertical => 'V',
            Orientation::Horizontal => 'H',
        };
        let c = match s.charge {
            Charge::Real(v) => format!("{v:?}"),
            Charge::Lattice(k) => k.to_string(),
        };
        let _ = writeln!(out, "{} {} {} {} {o} {c}", s.from.x, s.from.y, s.to.x, s.to.y);
    }
    let _ = writeln!(out, "nodes {}", d.nodes.len());
    for n in &d.nodes {
        let adj: Vec<String> = n
            .adj
            .iter()
            .map(|a| a.map_or_else(|| "-".to_string(), |s| s.to_string()))
            .collect();
        let _ = writeln!(out, "{} {} {} {}", n.pos.x, n.pos.y, n.kind, adj.join(" "));
    }
    let _ = writeln!(out, "diagnostics {}", d.diagnostics.len());
    for note in &d.diagnostics {
        let _ = writeln!(out, "{}", note.replace('\n', " "));
    }
    out.push_str("end\n");
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.inner.next() {
            Some((i, l)) => {
                self.last = i + 1;
                Ok((i + 1, l))
            }
            None => Err(Error::Parse {
                line: self.last + 1,
                message: format!("unexpected end of document, expected {what}"),
            }),
        }
    }

    /// Line of the form `<keyword> <fields...>`.
    fn keyed(&mut self, keyword: &str) -> Result<(usize, Vec<&'a str>)> {
        let (line, text) = self.next(keyword)?;
        let mut parts = text.split_whitespace();
        if parts.next() != Some(keyword) {
            return Err(Error::Parse {
                line,
                message: format!("expected '{keyword}', found '{text}'"),
            });
        }
        Ok((line, parts.collect()))
    }
}

fn field<T: std::str::FromStr>(line: usize, text: Option<&&str>, what: &str) -> Result<T> {
    text.and_then(|t| t.parse().ok()).ok_or_else(|| Error::Parse {
        line,
        message: format!("bad or missing {what}"),
    })
}

fn arity(line: usize, fields: &[&str], n: usize) -> Result<()> {
    if fields.len() == n {
        Ok(())
    } else {
        Err(Error::Parse {
            line,
            message: format!("expected {n} fields, found {}", fields.len()),
        })
    }
}

/// Parses a document and checks the result with [`Drawing::verify`].
pub fn deserialize(text: &str) -> Result<Drawing> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let (line, magic) = lines.next("header")?;
    if magic.trim() != MAGIC {
        return Err(Error::Parse {
            line,
            message: format!("expected '{MAGIC}'"),
        });
    }
    let (line, f) = lines.keyed("box")?;
    arity(line, &f, 2)?;
    let a: f64 = field(line, f.first(), "box width")?;
    let b: f64 = field(line, f.get(1), "box height")?;
    let (line, f) = lines.keyed("kind")?;
    let charges = match f.as_slice() {
        ["continuous"] => ChargeKind::Continuous,
        ["lattice", step] => ChargeKind::Lattice {
            step: field(line, Some(step), "lattice step")?,
        },
        _ => {
            return Err(Error::Parse {
                line,
                message: "expected 'continuous' or 'lattice <step>'".into(),
            })
        }
    };
    let (line, f) = lines.keyed("seed")?;
    arity(line, &f, 2)?;
    let seed = Seed::new(
        field(line, f.first(), "master seed")?,
        field(line, f.get(1), "stream")?,
    );
    let (line, f) = lines.keyed("params")?;
    arity(line, &f, 1)?;
    let params_digest = u64::from_str_radix(f[0], 16).map_err(|_| Error::Parse {
        line,
        message: "bad params digest".into(),
    })?;

    let (line, f) = lines.keyed("segments")?;
    arity(line, &f, 1)?;
    let n: usize = field(line, f.first(), "segment count")?;
    let mut segments = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        let (line, text) = lines.next("segment record")?;
        let f: Vec<&str> = text.split_whitespace().collect();
        arity(line, &f, 6)?;
        let coord = |i: usize| -> Result<u64> {
            let v: u64 = field(line, f.get(i), "coordinate")?;
            if v > TICKS {
                return Err(Error::Parse {
                    line,
                    message: format!("coordinate {v} outside the box"),
                });
            }
            Ok(v)
        };
        let from = Point::new(coord(0)?, coord(1)?);
        let to = Point::new(coord(2)?, coord(3)?);
        let orientation = match f[4] {
            "V" => Orientation::Vertical,
            "H" => Orientation::Horizontal,
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("orientation '{other}' is neither V nor H"),
                })
            }
        };
        let charge = match charges {
            ChargeKind::Continuous => Charge::Real(field(line, f.get(5), "intensity")?),
            ChargeKind::Lattice { .. } => Charge::Lattice(field(line, f.get(5), "lattice intensity")?),
        };
        segments.push(Segment {
            from,
            to,
            orientation,
            charge,
        });
    }

    let (line, f) = lines.keyed("nodes")?;
    arity(line, &f, 1)?;
    let m: usize = field(line, f.first(), "node count")?;
    let mut nodes = Vec::with_capacity(m.min(1 << 20));
    for _ in 0..m {
        let (line, text) = lines.next("node record")?;
        let f: Vec<&str> = text.split_whitespace().collect();
        arity(line, &f, 7)?;
        let pos = Point::new(field(line, f.first(), "x")?, field(line, f.get(1), "y")?);
        let kind: NodeKind = field(line, f.get(2), "node kind")?;
        let mut adj = [None; 4];
        for (k, slot) in adj.iter_mut().enumerate() {
            let t = f[3 + k];
            if t != "-" {
                let s: usize = field(line, Some(&t), "segment index")?;
                if s >= segments.len() {
                    return Err(Error::Parse {
                        line,
                        message: format!("segment index {s} out of range"),
                    });
                }
                *slot = Some(s);
            }
        }
        nodes.push(Node { pos, kind, adj });
    }

    let (line, f) = lines.keyed("diagnostics")?;
    arity(line, &f, 1)?;
    let k: usize = field(line, f.first(), "diagnostic count")?;
    let mut diagnostics = Vec::with_capacity(k.min(1 << 16));
    for _ in 0..k {
        diagnostics.push(lines.next("diagnostic")?.1.to_string());
    }
    let (line, text) = lines.next("'end'")?;
    if text.trim() != "end" {
        return Err(Error::Parse {
            line,
            message: format!("expected 'end', found '{text}'"),
        });
    }

    let d = Drawing {
        a,
        b,
        charges,
        seed,
        params_digest,
        segments,
        nodes,
        diagnostics,
    };
    d.verify()?;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::super::tests::cross;
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let mut d = cross(0.1, 0.7, 0.1 + 0.2, -1.0 / 3.0);
        d.diagnostics.push("dropped a zero-length segment".into());
        d.params_digest = 0xdead_beef;
        let text = serialize(&d);
        assert_eq!(deserialize(&text).unwrap(), d);
        assert_eq!(serialize(&deserialize(&text).unwrap()), text);
    }

    #[test]
    fn truncation_is_located() {
        let text = serialize(&cross(0.5, 0.5, 1.0, 1.0));
        let cut: String = text.lines().take(8).map(|l| format!("{l}\n")).collect();
        match deserialize(&cut) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn kirchhoff_violation_fails_on_load() {
        let mut d = cross(0.5, 0.5, 1.0, 1.0);
        d.segments[1].charge = Charge::Real(2.0);
        assert!(matches!(
            deserialize(&serialize(&d)),
            Err(Error::MalformedDrawing(_))
        ));
    }
}
