//! JSON-lines training-set files.
//!
//! One instance per line:
//! `{"state":{"objects":["a","b"],"facts":["on(b,a)","gon(a,b)"]},"optimal":["unstack(b)"]}`.
//! Goal requirements are written with their goal predicate names.

use std::collections::HashSet;
use std::io::{BufRead, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::policy::TrainingInstance;
use crate::pstrips::{
    atom_string, legal_actions, parse_atom_string, split_call, Atom, DomainDef, GroundAction, ObjectTable, State,
};

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
struct StateRecord {
    objects: Vec<String>,
    facts: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct InstanceRecord {
    state: StateRecord,
    optimal: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trajectory: Option<u32>,
}

fn state_record(dom: &DomainDef, q: &State) -> StateRecord {
    let objs = q.objects();
    let mut facts: Vec<String> = q.world().iter().map(|a| atom_string(dom, objs, a)).collect();
    facts.extend(q.goal().iter().map(|a| {
        let g = Atom {
            pred: dom.goal_twin(a.pred),
            args: a.args,
        };
        atom_string(dom, objs, &g)
    }));
    StateRecord {
        objects: objs.names().to_vec(),
        facts,
    }
}

/// One instance as a single JSON line (without the newline).
pub fn instance_line(dom: &DomainDef, f: &TrainingInstance) -> String {
    record_line(dom, f, None)
}

fn record_line(dom: &DomainDef, f: &TrainingInstance, trajectory: Option<u32>) -> String {
    let rec = InstanceRecord {
        state: state_record(dom, &f.state),
        optimal: f
            .optimal
            .iter()
            .map(|a| a.display(dom, f.state.objects()).to_string())
            .collect(),
        trajectory,
    };
    serde_json::to_string(&rec).expect("records serialize")
}

pub fn write_instances<W: Write>(mut w: W, dom: &DomainDef, f: &[TrainingInstance]) -> std::io::Result<()> {
    for inst in f {
        writeln!(w, "{}", instance_line(dom, inst))?;
    }
    Ok(())
}

/// Like [`write_instances`], tagging each line with the trajectory it came from.
pub fn write_tagged<W: Write>(
    mut w: W,
    dom: &DomainDef,
    f: &[TrainingInstance],
    trajectory: &[u32],
) -> std::io::Result<()> {
    assert_eq!(f.len(), trajectory.len(), "one trajectory id per instance");
    for (inst, &t) in f.iter().zip(trajectory) {
        writeln!(w, "{}", record_line(dom, inst, Some(t)))?;
    }
    Ok(())
}

/// Parses a ground action `name(obj)` that must be legal in `q`.
pub fn parse_action(dom: &DomainDef, q: &State, s: &str) -> Result<GroundAction, String> {
    let (name, args) = split_call(s).ok_or_else(|| format!("malformed action `{s}`"))?;
    let ty = dom.action_by_name(name).ok_or_else(|| format!("unknown action type `{name}`"))?;
    let ids = args
        .iter()
        .map(|a| q.objects().lookup(a).ok_or_else(|| format!("unknown object `{a}`")))
        .collect::<Result<Vec<_>, _>>()?;
    legal_actions(q, dom)
        .into_iter()
        .find(|g| g.action == ty && g.args[..] == ids[..])
        .ok_or_else(|| format!("`{s}` is not legal in its state"))
}

fn parse_line(dom: &DomainDef, text: &str) -> Result<(TrainingInstance, Option<u32>), String> {
    let rec: InstanceRecord = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let mut seen = HashSet::new();
    if let Some(dup) = rec.state.objects.iter().find(|n| !seen.insert(*n)) {
        return Err(format!("duplicate object `{dup}`"));
    }
    let objects = Arc::new(ObjectTable::new(rec.state.objects));
    let mut world = Vec::new();
    let mut goal = Vec::new();
    for fact in &rec.state.facts {
        let (atom, is_goal) = parse_atom_string(dom, &objects, fact).map_err(|e| e.to_string())?;
        if is_goal {
            goal.push(atom);
        } else {
            world.push(atom);
        }
    }
    let q = State::new(dom, objects, world, goal).map_err(|e| e.to_string())?;
    let optimal = rec
        .optimal
        .iter()
        .map(|s| parse_action(dom, &q, s))
        .collect::<Result<Vec<_>, _>>()?;
    if optimal.is_empty() {
        return Err("empty optimal action set".into());
    }
    Ok((TrainingInstance::new(q, optimal), rec.trajectory))
}

/// Reads every non-blank line as one instance.
pub fn read_instances<R: BufRead>(r: R, dom: &DomainDef) -> Result<Vec<TrainingInstance>, Error> {
    Ok(read_tagged(r, dom)?.0)
}

/// Instances with their optional trajectory tags.
pub fn read_tagged<R: BufRead>(r: R, dom: &DomainDef) -> Result<(Vec<TrainingInstance>, Vec<Option<u32>>), Error> {
    let mut out = Vec::new();
    let mut tags = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (inst, tag) = parse_line(dom, &line).map_err(|msg| Error::Format { line: i + 1, msg })?;
        out.push(inst);
        tags.push(tag);
    }
    Ok((out, tags))
}

/// Groups instance ids by trajectory tag, in order of first appearance.
/// Untagged instances form units of their own.
pub fn units(tags: &[Option<u32>]) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = Vec::new();
    let mut index = std::collections::HashMap::new();
    for (i, t) in tags.iter().enumerate() {
        match t {
            Some(t) => {
                let k = *index.entry(*t).or_insert_with(|| {
                    out.push(Vec::new());
                    out.len() - 1
                });
                out[k].push(i as u32);
            }
            None => out.push(vec![i as u32]),
        }
    }
    out
}
