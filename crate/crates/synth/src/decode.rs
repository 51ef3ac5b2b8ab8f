//! Reading rules, molecules and production witnesses back out of solver models.

use std::collections::HashMap;

use glycan_core::{
    Molecule, MonomerAlphabet, NodeId, Rule, Situation, Speed, SugarId, Tree,
};
use glycan_smt::{Model, Term, Value, VarId};

use crate::encode::ProdVars;
use crate::template::{MolView, RuleView};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("model has no value for a template variable")]
    MissingValue,
    #[error("template {template}: {reason}")]
    BadRule { template: usize, reason: String },
    #[error("molecule template: {0}")]
    BadMolecule(String),
}

fn int(model: &Model, t: &Term) -> Result<i64, DecodeError> {
    model
        .term(t)
        .and_then(Value::as_int)
        .ok_or(DecodeError::MissingValue)
}

fn boolean(model: &Model, t: &Term) -> Result<bool, DecodeError> {
    model
        .term(t)
        .and_then(Value::as_bool)
        .ok_or(DecodeError::MissingValue)
}

fn sugar(alphabet: &MonomerAlphabet, code: i64) -> Option<SugarId> {
    (code >= 1 && code as usize <= alphabet.len()).then(|| SugarId(code as u16 - 1))
}

pub fn decode_rule(
    model: &Model,
    alphabet: &MonomerAlphabet,
    view: &RuleView,
) -> Result<Rule, DecodeError> {
    let bad = |reason: String| DecodeError::BadRule {
        template: view.index,
        reason,
    };
    let mut kappas = Vec::with_capacity(view.nodes.len());
    for n in &view.nodes {
        let code = int(model, &n.kappa)?;
        kappas.push(Situation::from_code(code).ok_or_else(|| bad(format!("situation {code}")))?);
    }
    let label = |r: usize| -> Result<SugarId, DecodeError> {
        let code = int(model, &view.nodes[r].nu)?;
        sugar(alphabet, code).ok_or_else(|| bad(format!("node {r} has sugar code {code}")))
    };
    if kappas[0] == Situation::Absent {
        return Err(bad("absent root".into()));
    }
    let mut tree = Tree::leaf(alphabet, label(0)?);
    let mut ids: Vec<Option<NodeId>> = vec![None; view.nodes.len()];
    ids[0] = Some(tree.root());
    let mut expand_root = None;
    let mut hard_ends = Vec::new();
    for r in 0..view.nodes.len() {
        let Some(id) = ids[r] else { continue };
        for (i, &c) in view.nodes[r].children.iter().enumerate() {
            let slot = i + 1;
            if boolean(model, &view.nodes[c].hard_end)? {
                hard_ends.push((id, slot));
            }
            if kappas[c] == Situation::Absent {
                continue;
            }
            let cid = tree
                .add_child(alphabet, id, slot, label(c)?)
                .map_err(|e| bad(e.to_string()))?;
            ids[c] = Some(cid);
            if kappas[c] == Situation::Expand && kappas[r] == Situation::MatchAns {
                if expand_root.is_some() {
                    return Err(bad("two expand roots".into()));
                }
                expand_root = Some(cid);
            }
        }
    }
    let expand_root = expand_root.ok_or_else(|| bad("no expand part".into()))?;
    let compartment = int(model, &view.compart)?;
    let speed = if boolean(model, &view.fast)? {
        Speed::Fast
    } else {
        Speed::Slow
    };
    let rule = Rule::new(tree, expand_root, hard_ends, compartment as u32, speed)
        .map_err(|e| bad(e.to_string()))?;
    for (r, k) in kappas.iter().enumerate() {
        if ids[r].is_none() && *k != Situation::Absent {
            return Err(bad(format!("node {r} is present under an absent parent")));
        }
    }
    Ok(rule)
}

pub fn decode_rules(
    model: &Model,
    alphabet: &MonomerAlphabet,
    views: &[RuleView],
) -> Result<Vec<Rule>, DecodeError> {
    views.iter().map(|v| decode_rule(model, alphabet, v)).collect()
}

/// Decodes the present part of a molecule template. Also returns, for each template
/// node, the molecule node it became.
pub fn decode_molecule(
    model: &Model,
    alphabet: &MonomerAlphabet,
    view: &MolView,
) -> Result<(Molecule, Vec<Option<NodeId>>), DecodeError> {
    let label = |u: usize| -> Result<Option<SugarId>, DecodeError> {
        let code = int(model, &view.nodes[u].label)?;
        match code {
            0 => Ok(None),
            c => sugar(alphabet, c)
                .map(Some)
                .ok_or_else(|| DecodeError::BadMolecule(format!("sugar code {c}"))),
        }
    };
    let root = label(0)?.ok_or_else(|| DecodeError::BadMolecule("absent root".into()))?;
    let mut tree = Tree::leaf(alphabet, root);
    let mut ids = vec![None; view.len()];
    ids[0] = Some(tree.root());
    for u in 0..view.len() {
        let Some(id) = ids[u] else { continue };
        for s in 1..=view.width {
            let Some(c) = view.child(u, s) else { continue };
            if let Some(l) = label(c)? {
                let cid = tree
                    .add_child(alphabet, id, s, l)
                    .map_err(|e| DecodeError::BadMolecule(e.to_string()))?;
                ids[c] = Some(cid);
            }
        }
    }
    for u in 0..view.len() {
        if ids[u].is_none() && label(u)?.is_some() {
            return Err(DecodeError::BadMolecule(format!(
                "node {u} is present under an absent parent"
            )));
        }
    }
    Ok((Molecule::new(tree), ids))
}

/// Values of the production variables of `from` (over a molecule template), carried over
/// to the production variables `to` of the decoded molecule's own view.
pub fn transfer_witness(
    model: &Model,
    from_view: &MolView,
    from: &ProdVars,
    to_view: &MolView,
    to: &ProdVars,
) -> HashMap<VarId, Term> {
    let mut map = HashMap::new();
    for v in 1..to_view.len() {
        let depth = to_view.nodes[v].depth;
        let path = to_view.path_from_ancestor(v, depth).expect("root is an ancestor");
        let Some(u) = from_view.descend(0, &path) else {
            continue;
        };
        for (dst, src) in [
            (&to.cut[v], &from.cut[u]),
            (&to.rmatch[v], &from.rmatch[u]),
            (&to.tau[v], &from.tau[u]),
            (&to.comp[v], &from.comp[u]),
        ] {
            if let (Some(var), Some(val)) = (dst.as_var(), model.term(src)) {
                map.insert(
                    var,
                    match val {
                        Value::Bool(b) => Term::bool(b),
                        Value::Int(i) => Term::int(i),
                    },
                );
            }
        }
    }
    map
}
