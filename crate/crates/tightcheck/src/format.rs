//! JSON derivation files.
//!
//! ```json
//! {"system": "hd", "node": {"rule": "ax", "term": "x", "context": "x : [N]",
//!  "type": "N", "indices": [0, 0], "premises": []}}
//! ```
//!
//! Multiset-concluding nodes carry `multiset` instead of `type`; linear head
//! nodes have three indices. Reading does not check the derivation.

use serde::{Deserialize, Serialize};

use crate::derivation::{Conclusion, Derivation, Indices, Judgement, Rule};
use crate::error::Error;
use crate::term::{parse, System};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct File {
    system: System,
    node: Node,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Node {
    rule: String,
    term: String,
    context: String,
    #[serde(rename = "type", skip_serializing_if = "Option::is_none", default)]
    ty: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    multiset: Option<String>,
    indices: Vec<usize>,
    #[serde(default)]
    premises: Vec<Node>,
}

fn to_node(d: &Derivation) -> Node {
    let j = &d.judgement;
    let (ty, multiset) = match &j.conclusion {
        Conclusion::Type(t) => (Some(t.to_string()), None),
        Conclusion::Multi(m) => (None, Some(m.to_string())),
    };
    let i = j.indices;
    Node {
        rule: d.rule.name().to_string(),
        term: j.subject.to_string(),
        context: j.context.to_string(),
        ty,
        multiset,
        indices: if j.system == System::Lsc { vec![i.b, i.e, i.r] } else { vec![i.b, i.r] },
        premises: d.premises.iter().map(to_node).collect(),
    }
}

fn bad(msg: String) -> Error {
    Error::Format(msg)
}

fn from_node(sys: System, n: Node) -> Result<Derivation, Error> {
    let rule = Rule::from_name(&n.rule).ok_or_else(|| bad(format!("unknown rule `{}`", n.rule)))?;
    let subject = parse(&n.term).map_err(|e| bad(format!("term `{}`: {e}", n.term)))?;
    let context = n.context.parse()?;
    let conclusion = match (n.ty, n.multiset) {
        (Some(t), None) => Conclusion::Type(t.parse()?),
        (None, Some(m)) => Conclusion::Multi(m.parse()?),
        _ => return Err(bad(format!("node `{}` needs exactly one of `type` and `multiset`", n.term))),
    };
    let indices = match (sys, n.indices.as_slice()) {
        (System::Lsc, &[b, e, r]) => Indices::new(b, e, r),
        (System::Hd | System::Lo | System::Mx, &[b, r]) => Indices::new(b, 0, r),
        _ => return Err(bad(format!("wrong number of indices for system {sys}"))),
    };
    let premises = n.premises.into_iter().map(|p| from_node(sys, p)).collect::<Result<_, _>>()?;
    Ok(Derivation { rule, premises, judgement: Judgement { system: sys, context, subject, conclusion, indices } })
}

pub fn to_json(d: &Derivation) -> String {
    let f = File { system: d.system(), node: to_node(d) };
    let mut s = serde_json::to_string_pretty(&f).expect("derivations serialize");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<Derivation, Error> {
    let f: File = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    from_node(f.system, f.node)
}
