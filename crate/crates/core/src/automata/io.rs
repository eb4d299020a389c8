// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::{json, Value};

use super::{Automaton, Digit, DigitAlphabet, State};
use crate::error::{Error, Result};
use crate::numberfield::{FieldElement, NumberField};
use crate::substitution::AbelianVector;

fn digit_json(d: &Digit) -> Value {
    let mut o = serde_json::Map::new();
    o.insert("name".into(), json!(d.name));
    if let Some(v) = &d.vector {
        o.insert("vector".into(), json!(v.0));
    }
    if let Some(s) = &d.scalar {
        o.insert("scalar".into(), serde_json::to_value(s).unwrap_or(Value::Null));
        o.insert("scalar_text".into(), json!(s.to_string()));
    }
    if let Some(t) = &d.tag {
        o.insert("tag".into(), json!(t));
    }
    if let Some(p) = &d.pair {
        o.insert("pair".into(), json!([digit_json(&p.0), digit_json(&p.1)]));
    }
    Value::Object(o)
}

fn digit_from_json(v: &Value, field: Option<&Arc<NumberField>>) -> Result<Digit> {
    let name = v
        .get("name")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse("digit without name".into()))?
        .to_string();
    let vector = match v.get("vector") {
        Some(Value::Array(a)) => Some(AbelianVector(
            a.iter()
                .map(|x| x.as_i64().ok_or_else(|| Error::Parse("bad vector entry".into())))
                .collect::<Result<_>>()?,
        )),
        _ => None,
    };
    let scalar = match (v.get("scalar"), field) {
        (Some(Value::Array(a)), Some(f)) => {
            let coords = a
                .iter()
                .map(|x| match x {
                    Value::Number(n) => n
                        .as_i64()
                        .map(num_bigint::BigInt::from)
                        .ok_or_else(|| Error::Parse("bad scalar entry".into())),
                    Value::String(s) => s
                        .parse::<num_bigint::BigInt>()
                        .map_err(|e| Error::Parse(e.to_string())),
                    _ => Err(Error::Parse("bad scalar entry".into())),
                })
                .collect::<Result<Vec<_>>>()?;
            Some(FieldElement::new(f, coords))
        }
        (Some(_), None) => {
            return Err(Error::Parse(
                "scalar digits need a number field to be imported".into(),
            ))
        }
        _ => None,
    };
    let tag = v.get("tag").and_then(Value::as_str).map(str::to_string);
    let pair = match v.get("pair") {
        Some(Value::Array(a)) if a.len() == 2 => Some(Arc::new((
            digit_from_json(&a[0], field)?,
            digit_from_json(&a[1], field)?,
        ))),
        _ => None,
    };
    Ok(Digit {
        name,
        vector,
        scalar,
        tag,
        pair,
    })
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl Automaton {
    /// JSON document `{schema, states, alphabet, transitions, initial, final}`.
    pub fn to_json(&self) -> Value {
        json!({
            "schema": "pisot-disc/automaton/1",
            "states": self.state_count(),
            "alphabet": self.alphabet.digits().iter().map(digit_json).collect::<Vec<_>>(),
            "transitions": self.transitions().map(|(p, d, q)| json!([p, d, q])).collect::<Vec<_>>(),
            "initial": self.initial,
            "final": self.finals(),
        })
    }

    /// Reads the format written by [`Automaton::to_json`]. Scalar digits are
    /// rebuilt in `field`.
    pub fn from_json(v: &Value, field: Option<&Arc<NumberField>>) -> Result<Automaton> {
        let n = v
            .get("states")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing state count".into()))? as usize;
        let alphabet = DigitAlphabet::new(
            v.get("alphabet")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("missing alphabet".into()))?
                .iter()
                .map(|d| digit_from_json(d, field))
                .collect::<Result<Vec<_>>>()?,
        );
        let states = |key: &str| -> Result<Vec<State>> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("missing {key}")))?
                .iter()
                .map(|x| x.as_u64().map(|x| x as State).ok_or_else(|| Error::Parse(format!("bad {key} entry"))))
                .collect()
        };
        let mut trans = Vec::new();
        for t in v
            .get("transitions")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing transitions".into()))?
        {
            let a = t
                .as_array()
                .filter(|a| a.len() == 3)
                .ok_or_else(|| Error::Parse("transition must be [from, digit, to]".into()))?;
            let num = |i: usize| a[i].as_u64().map(|x| x as u32).ok_or_else(|| Error::Parse("bad transition".into()));
            trans.push((num(0)?, num(1)?, num(2)?));
        }
        Automaton::new(alphabet, n, trans, states("initial")?, states("final")?)
    }

    /// Graphviz rendering; edge labels show the digit names.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{}\" {{", escape(name));
        let _ = writeln!(s, "  rankdir=LR;");
        let _ = writeln!(s, "  node [shape=circle];");
        for q in 0..self.state_count() as State {
            if self.is_final(q) {
                let _ = writeln!(s, "  {q} [shape=doublecircle];");
            } else {
                let _ = writeln!(s, "  {q};");
            }
        }
        for &i in &self.initial {
            let _ = writeln!(s, "  __start{i} [shape=point];");
            let _ = writeln!(s, "  __start{i} -> {i};");
        }
        for (p, d, q) in self.transitions() {
            let _ = writeln!(
                s,
                "  {p} -> {q} [label=\"{}\"];",
                escape(&self.alphabet.digit(d as usize).name)
            );
        }
        s.push_str("}\n");
        s
    }

    /// Reads the subset of DOT produced by [`Automaton::to_dot`]; edge labels
    /// are looked up by digit name in `alphabet`.
    pub fn from_dot(text: &str, alphabet: Arc<DigitAlphabet>) -> Result<Automaton> {
        let mut n = 0usize;
        let mut finals = Vec::new();
        let mut initial = Vec::new();
        let mut trans = Vec::new();
        let bump = |n: &mut usize, q: u32| *n = (*n).max(q as usize + 1);
        for line in text.lines() {
            let l = line.trim().trim_end_matches(';');
            if l.starts_with("digraph") || l.starts_with('}') || l.starts_with("rankdir") || l.starts_with("node") || l.is_empty() {
                continue;
            }
            if let Some((lhs, rhs)) = l.split_once("->") {
                let lhs = lhs.trim();
                let (target, label) = match rhs.split_once('[') {
                    Some((t, attrs)) => (t.trim(), Some(attrs)),
                    None => (rhs.trim(), None),
                };
                let q: u32 = target
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad target in {line:?}")))?;
                bump(&mut n, q);
                if lhs.starts_with("__start") {
                    initial.push(q);
                    continue;
                }
                let p: u32 = lhs.parse().map_err(|_| Error::Parse(format!("bad source in {line:?}")))?;
                bump(&mut n, p);
                let attrs = label.ok_or_else(|| Error::Parse(format!("edge without label: {line:?}")))?;
                let start = attrs
                    .find("label=\"")
                    .ok_or_else(|| Error::Parse(format!("edge without label: {line:?}")))?
                    + 7;
                let rest = &attrs[start..];
                let mut name = String::new();
                let mut chars = rest.chars();
                while let Some(c) = chars.next() {
                    match c {
                        '\\' => {
                            if let Some(e) = chars.next() {
                                name.push(e)
                            }
                        }
                        '"' => break,
                        _ => name.push(c),
                    }
                }
                let d = alphabet
                    .index_by_name(&name)
                    .ok_or_else(|| Error::Parse(format!("unknown digit {name:?}")))?;
                trans.push((p, d as u32, q));
            } else if !l.starts_with("__start") {
                let id = l.split(|c: char| c.is_whitespace() || c == '[').next().unwrap_or("");
                let q: u32 = id.parse().map_err(|_| Error::Parse(format!("bad node in {line:?}")))?;
                bump(&mut n, q);
                if l.contains("doublecircle") {
                    finals.push(q);
                }
            }
        }
        Automaton::new(alphabet, n, trans, initial, finals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let a = DigitAlphabet::from_names(&["0", "1", "x\"y"]);
        let m = Automaton::new(a.clone(), 3, [(0, 0, 1), (1, 2, 2), (2, 1, 0)], [0], [2]).unwrap();
        let j = Automaton::from_json(&m.to_json(), None).unwrap();
        assert!(j.same_structure(&m));
        let d = Automaton::from_dot(&m.to_dot("t"), a).unwrap();
        assert!(d.same_structure(&m));
    }
}
