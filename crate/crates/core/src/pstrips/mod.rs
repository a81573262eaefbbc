//! Probabilistic STRIPS: predicates, states, action schemas, grounding and
//! stochastic transitions.
//!
//! Objects inside a [`State`] are dense indices `0..n` with names kept in a
//! shared [`ObjectTable`]. Goal facts `gP(..)` are stored as the world atom
//! `P(..)` they require, in a separate shared list that actions never touch.

mod parse;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::Rng;
use smallvec::SmallVec;
use thiserror::Error;

use crate::sexpr::{Pos, SyntaxError};
use crate::taxonomy::ClassExpr;

pub use parse::{atom_string, parse_atom_string, parse_domain, parse_state, split_call, state_from_sexpr, state_string};

pub type Obj = u32;

/// Index into [`DomainDef::predicates`]. World predicates come first; the
/// goal twin of world predicate `i` is `i + n_world`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredId(pub u16);

/// Index into [`DomainDef::action_types`]; ids follow the lexicographic
/// order of action-type names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionTypeId(pub u16);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredRole {
    World,
    Goal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub arity: u8,
    pub role: PredRole,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("{pos}: unknown predicate `{name}`")]
    UnknownPredicate { pos: Pos, name: String },
    #[error("{pos}: `{name}` takes {expected} argument(s), found {found}")]
    ArityMismatch {
        pos: Pos,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("{pos}: unknown variable `{name}`")]
    UnknownVariable { pos: Pos, name: String },
    #[error("{pos}: unknown object `{name}`")]
    UnknownObject { pos: Pos, name: String },
    #[error("{pos}: outcome probabilities of `{action}` sum to {sum}, not 1")]
    ProbabilitySum { pos: Pos, action: String, sum: f64 },
    #[error("{pos}: {msg}")]
    Invalid { pos: Pos, msg: String },
    #[error("action {0} is not legal in this state")]
    IllegalAction(String),
    #[error("no outcome case of {0} applies in this state")]
    NoApplicableCase(String),
    #[error("outcome index ({case}, {outcome}) out of range for {action}")]
    BadOutcomeIndex {
        action: String,
        case: usize,
        outcome: usize,
    },
}

impl Error {
    pub(crate) fn invalid(pos: Pos, msg: impl Into<String>) -> Self {
        Error::Invalid {
            pos,
            msg: msg.into(),
        }
    }
}

/// Ground atom. Unused argument slots are zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: PredId,
    pub args: [Obj; 2],
}

impl Atom {
    pub fn new(pred: PredId, args: &[Obj]) -> Self {
        let mut a = [0; 2];
        a[..args.len()].copy_from_slice(args);
        Atom { pred, args: a }
    }
}

pub type VarId = u8;

/// Unused argument slot of a [`SchemaAtom`].
pub const NO_VAR: VarId = VarId::MAX;

/// Atom over schema variables; unused slots hold [`NO_VAR`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemaAtom {
    pub pred: PredId,
    pub args: [VarId; 2],
}

impl SchemaAtom {
    fn ground(&self, binding: &[Obj]) -> Atom {
        Atom {
            pred: self.pred,
            args: self.args.map(|v| if v == NO_VAR { 0 } else { binding[v as usize] }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Literal {
    pub atom: SchemaAtom,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub probability: f64,
    pub add: Vec<SchemaAtom>,
    pub delete: Vec<SchemaAtom>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub guard: Vec<Literal>,
    pub outcomes: Vec<Outcome>,
}

/// One schema variant of an action type. Variables `0..params.len()` are
/// the action arguments; the following `aux.len()` variables are bound by
/// matching positive precondition atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSchema {
    pub action: ActionTypeId,
    pub params: Vec<String>,
    pub aux: Vec<String>,
    pub precondition: Vec<Literal>,
    pub cases: Vec<Case>,
}

impl ActionSchema {
    pub fn var_count(&self) -> usize {
        self.params.len() + self.aux.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionType {
    pub name: String,
    pub arity: usize,
    /// Indices into [`DomainDef::schemas`], in declaration order.
    pub variants: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivedPredicate {
    pub name: String,
    pub definition: ClassExpr,
}

/// A PSTRIPS domain: predicates, action schemas and registered derived
/// class predicates.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainDef {
    pub name: String,
    pub predicates: Vec<PredicateDecl>,
    pub n_world: u16,
    pub action_types: Vec<ActionType>,
    pub schemas: Vec<ActionSchema>,
    pub derived: Vec<DerivedPredicate>,
}

impl DomainDef {
    pub fn pred(&self, p: PredId) -> &PredicateDecl {
        &self.predicates[p.0 as usize]
    }

    pub fn pred_by_name(&self, name: &str) -> Option<PredId> {
        self.predicates
            .iter()
            .position(|p| p.name == name)
            .map(|i| PredId(i as u16))
    }

    pub fn goal_twin(&self, p: PredId) -> PredId {
        debug_assert!(p.0 < self.n_world);
        PredId(p.0 + self.n_world)
    }

    /// World predicate a goal predicate stands for (identity on world ones).
    pub fn world_of(&self, p: PredId) -> PredId {
        if p.0 >= self.n_world {
            PredId(p.0 - self.n_world)
        } else {
            p
        }
    }

    pub fn world_predicates(&self) -> impl Iterator<Item = PredId> + '_ {
        (0..self.n_world).map(PredId)
    }

    pub fn action_type(&self, a: ActionTypeId) -> &ActionType {
        &self.action_types[a.0 as usize]
    }

    pub fn action_by_name(&self, name: &str) -> Option<ActionTypeId> {
        self.action_types
            .iter()
            .position(|t| t.name == name)
            .map(|i| ActionTypeId(i as u16))
    }

    pub fn derived_by_name(&self, name: &str) -> Option<usize> {
        self.derived.iter().position(|d| d.name == name)
    }

    /// Registers a named class expression as an extra primitive class.
    pub fn add_derived(&mut self, name: &str, definition: ClassExpr) -> Result<(), Error> {
        if self.pred_by_name(name).is_some() || self.derived_by_name(name).is_some() {
            return Err(Error::invalid(
                Pos::default(),
                format!("`{name}` is already defined"),
            ));
        }
        self.derived.push(DerivedPredicate {
            name: name.to_string(),
            definition,
        });
        Ok(())
    }
}

/// Object names of one problem instance; object `i` is `names[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObjectTable {
    names: Vec<String>,
}

impl ObjectTable {
    pub fn new(names: Vec<String>) -> Self {
        ObjectTable { names }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, o: Obj) -> &str {
        &self.names[o as usize]
    }

    pub fn lookup(&self, name: &str) -> Option<Obj> {
        self.names.iter().position(|n| n == name).map(|i| i as Obj)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// A finite first-order model: objects, true world facts and goal facts.
#[derive(Debug, Clone)]
pub struct State {
    objects: Arc<ObjectTable>,
    world: Vec<Atom>,
    goal: Arc<[Atom]>,
}

impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        self.world == other.world
            && (Arc::ptr_eq(&self.goal, &other.goal) || self.goal == other.goal)
            && (Arc::ptr_eq(&self.objects, &other.objects) || self.objects == other.objects)
    }
}

impl Eq for State {}

impl Hash for State {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.objects.len().hash(h);
        self.world.hash(h);
        self.goal.len().hash(h);
    }
}

impl State {
    /// Builds a state from world facts and goal requirements (given as the
    /// world atoms that must hold). Checks arities, roles and object ranges.
    pub fn new(
        dom: &DomainDef,
        objects: Arc<ObjectTable>,
        mut world: Vec<Atom>,
        mut goal: Vec<Atom>,
    ) -> Result<State, Error> {
        let n = objects.len() as Obj;
        for a in world.iter().chain(goal.iter()) {
            let decl = dom.predicates.get(a.pred.0 as usize).ok_or_else(|| {
                Error::invalid(Pos::default(), format!("undeclared predicate id {}", a.pred.0))
            })?;
            if decl.role != PredRole::World {
                return Err(Error::invalid(
                    Pos::default(),
                    format!("`{}` is not a world predicate", decl.name),
                ));
            }
            let ar = decl.arity as usize;
            if a.args[..ar].iter().any(|&o| o >= n) || a.args[ar..].iter().any(|&o| o != 0) {
                return Err(Error::invalid(
                    Pos::default(),
                    format!("atom over `{}` has an argument outside the object set", decl.name),
                ));
            }
        }
        world.sort_unstable();
        world.dedup();
        goal.sort_unstable();
        goal.dedup();
        Ok(State {
            objects,
            world,
            goal: goal.into(),
        })
    }

    pub fn objects(&self) -> &Arc<ObjectTable> {
        &self.objects
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn world(&self) -> &[Atom] {
        &self.world
    }

    /// Goal requirements, as world atoms.
    pub fn goal(&self) -> &[Atom] {
        &self.goal
    }

    pub fn goal_arc(&self) -> &Arc<[Atom]> {
        &self.goal
    }

    pub fn holds(&self, a: &Atom) -> bool {
        self.world.binary_search(a).is_ok()
    }

    pub fn goal_holds(&self, a: &Atom) -> bool {
        self.goal.binary_search(a).is_ok()
    }

    /// World facts of one predicate.
    pub fn world_facts(&self, p: PredId) -> &[Atom] {
        pred_slice(&self.world, p)
    }

    /// Goal facts of one world predicate (the `gP` facts).
    pub fn goal_facts(&self, p: PredId) -> &[Atom] {
        pred_slice(&self.goal, p)
    }

    /// All facts including goal facts, with goal atoms mapped to their
    /// goal-twin predicate ids.
    pub fn facts<'a>(&'a self, dom: &'a DomainDef) -> impl Iterator<Item = Atom> + 'a {
        self.world.iter().copied().chain(self.goal.iter().map(move |a| Atom {
            pred: dom.goal_twin(a.pred),
            args: a.args,
        }))
    }

    /// Same objects and goal, different world facts (kept sorted by caller).
    fn with_world(&self, world: Vec<Atom>) -> State {
        State {
            objects: Arc::clone(&self.objects),
            world,
            goal: Arc::clone(&self.goal),
        }
    }
}

fn pred_slice(facts: &[Atom], p: PredId) -> &[Atom] {
    let lo = facts.partition_point(|a| a.pred < p);
    let hi = facts.partition_point(|a| a.pred <= p);
    &facts[lo..hi]
}

/// True iff every goal fact's world twin holds.
pub fn is_goal(q: &State) -> bool {
    // Both lists are sorted; a merge walk avoids a search per goal atom.
    let mut w = q.world.iter().peekable();
    'outer: for g in q.goal.iter() {
        while let Some(a) = w.peek() {
            match a.cmp(&g) {
                Ordering::Less => {
                    w.next();
                }
                Ordering::Equal => {
                    w.next();
                    continue 'outer;
                }
                Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

/// An action type applied to objects, with the full variable binding that
/// made it legal. Equality and order only look at `(action, args)`.
#[derive(Debug, Clone)]
pub struct GroundAction {
    pub action: ActionTypeId,
    pub args: SmallVec<[Obj; 2]>,
    /// Index into [`DomainDef::schemas`] of the variant that matched.
    pub schema: usize,
    pub binding: SmallVec<[Obj; 4]>,
}

impl GroundAction {
    pub fn display<'a>(&'a self, dom: &'a DomainDef, objects: &'a ObjectTable) -> impl fmt::Display + 'a {
        DisplayAction {
            act: self,
            dom,
            objects,
        }
    }

    /// Single argument of an arity-1 action.
    pub fn object(&self) -> Obj {
        self.args[0]
    }
}

struct DisplayAction<'a> {
    act: &'a GroundAction,
    dom: &'a DomainDef,
    objects: &'a ObjectTable,
}

impl fmt::Display for DisplayAction<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.dom.action_type(self.act.action).name)?;
        for (i, &o) in self.act.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(self.objects.name(o))?;
        }
        f.write_str(")")
    }
}

impl PartialEq for GroundAction {
    fn eq(&self, other: &Self) -> bool {
        self.action == other.action && self.args == other.args
    }
}

impl Eq for GroundAction {}

impl Hash for GroundAction {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.action.hash(h);
        self.args.hash(h);
    }
}

impl PartialOrd for GroundAction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical action order: action-type name, then argument object numbers.
impl Ord for GroundAction {
    fn cmp(&self, other: &Self) -> Ordering {
        self.action
            .cmp(&other.action)
            .then_with(|| self.args.cmp(&other.args))
    }
}

pub fn action_less(a1: &GroundAction, a2: &GroundAction) -> bool {
    a1 < a2
}

fn literal_holds(q: &State, lit: &Literal, binding: &[Obj], dom: &DomainDef) -> bool {
    let atom = lit.atom.ground(binding);
    let p = atom.pred;
    let present = if p.0 >= dom.n_world {
        q.goal_holds(&Atom {
            pred: dom.world_of(p),
            args: atom.args,
        })
    } else {
        q.holds(&atom)
    };
    present == lit.positive
}

fn conj_holds(q: &State, lits: &[Literal], binding: &[Obj], dom: &DomainDef) -> bool {
    lits.iter().all(|l| literal_holds(q, l, binding, dom))
}

const UNBOUND: Obj = Obj::MAX;

/// Enumerates every full binding satisfying the schema's precondition, in
/// canonical order of (action args, aux vars).
fn schema_bindings(q: &State, dom: &DomainDef, schema: &ActionSchema, out: &mut Vec<SmallVec<[Obj; 4]>>) {
    let positives: SmallVec<[&SchemaAtom; 8]> = schema
        .precondition
        .iter()
        .filter(|l| l.positive)
        .map(|l| &l.atom)
        .collect();
    let mut binding: SmallVec<[Obj; 4]> = SmallVec::from_elem(UNBOUND, schema.var_count().max(1));
    match_positive(q, dom, schema, &positives, 0, &mut binding, out);
}

fn match_positive(
    q: &State,
    dom: &DomainDef,
    schema: &ActionSchema,
    positives: &[&SchemaAtom],
    i: usize,
    binding: &mut SmallVec<[Obj; 4]>,
    out: &mut Vec<SmallVec<[Obj; 4]>>,
) {
    if i == positives.len() {
        fill_unbound(q, dom, schema, 0, binding, out);
        return;
    }
    let sa = positives[i];
    let arity = dom.pred(sa.pred).arity as usize;
    let facts = if sa.pred.0 >= dom.n_world {
        q.goal_facts(dom.world_of(sa.pred))
    } else {
        q.world_facts(sa.pred)
    };
    for fact in facts {
        let saved = binding.clone();
        let mut ok = true;
        for k in 0..arity {
            let v = sa.args[k] as usize;
            if binding[v] == UNBOUND {
                binding[v] = fact.args[k];
            } else if binding[v] != fact.args[k] {
                ok = false;
                break;
            }
        }
        if ok {
            match_positive(q, dom, schema, positives, i + 1, binding, out);
        }
        *binding = saved;
    }
}

/// Action variables not mentioned by any positive atom range over all objects.
fn fill_unbound(
    q: &State,
    dom: &DomainDef,
    schema: &ActionSchema,
    v: usize,
    binding: &mut SmallVec<[Obj; 4]>,
    out: &mut Vec<SmallVec<[Obj; 4]>>,
) {
    if v == schema.params.len() {
        if conj_holds(q, &schema.precondition, binding, dom) {
            out.push(binding.clone());
        }
        return;
    }
    if binding[v] != UNBOUND {
        fill_unbound(q, dom, schema, v + 1, binding, out);
        return;
    }
    for o in 0..q.num_objects() as Obj {
        binding[v] = o;
        fill_unbound(q, dom, schema, v + 1, binding, out);
    }
    binding[v] = UNBOUND;
}

/// All legal ground actions of `q`, sorted by [`action_less`], one per
/// `(action type, args)`.
pub fn legal_actions(q: &State, dom: &DomainDef) -> Vec<GroundAction> {
    let mut result = Vec::new();
    let mut buf = Vec::new();
    for (t, ty) in dom.action_types.iter().enumerate() {
        let mut chosen: BTreeMap<SmallVec<[Obj; 2]>, GroundAction> = BTreeMap::new();
        for &si in &ty.variants {
            let schema = &dom.schemas[si];
            buf.clear();
            schema_bindings(q, dom, schema, &mut buf);
            for b in buf.drain(..) {
                let args: SmallVec<[Obj; 2]> = b[..ty.arity].iter().copied().collect();
                match chosen.get_mut(&args) {
                    None => {
                        chosen.insert(
                            args.clone(),
                            GroundAction {
                                action: ActionTypeId(t as u16),
                                args,
                                schema: si,
                                binding: b,
                            },
                        );
                    }
                    // Same variant: keep the canonically least aux binding.
                    Some(g) if g.schema == si && b < g.binding => g.binding = b,
                    Some(_) => {}
                }
            }
        }
        result.extend(chosen.into_values());
    }
    result
}

/// Whether `act`'s binding satisfies its schema's precondition in `q`.
pub fn is_legal(q: &State, dom: &DomainDef, act: &GroundAction) -> bool {
    let Some(schema) = dom.schemas.get(act.schema) else {
        return false;
    };
    schema.action == act.action
        && act.binding.len() >= schema.var_count()
        && act.binding.iter().all(|&o| (o as usize) < q.num_objects())
        && conj_holds(q, &schema.precondition, &act.binding, dom)
}

/// Index of the first case whose guard holds.
pub fn applicable_case(q: &State, dom: &DomainDef, act: &GroundAction) -> Option<usize> {
    let schema = &dom.schemas[act.schema];
    schema
        .cases
        .iter()
        .position(|c| conj_holds(q, &c.guard, &act.binding, dom))
}

fn apply_unchecked(q: &State, outcome: &Outcome, binding: &[Obj]) -> State {
    if outcome.add.is_empty() && outcome.delete.is_empty() {
        return q.clone();
    }
    let mut world = q.world.clone();
    for d in &outcome.delete {
        let a = d.ground(binding);
        if let Ok(i) = world.binary_search(&a) {
            world.remove(i);
        }
    }
    for ad in &outcome.add {
        let a = ad.ground(binding);
        if let Err(i) = world.binary_search(&a) {
            world.insert(i, a);
        }
    }
    q.with_world(world)
}

/// Deterministic successor for one chosen case and outcome.
pub fn apply_outcome(
    q: &State,
    dom: &DomainDef,
    act: &GroundAction,
    case_index: usize,
    outcome_index: usize,
) -> Result<State, Error> {
    if !is_legal(q, dom, act) {
        return Err(Error::IllegalAction(act.display(dom, &q.objects).to_string()));
    }
    let schema = &dom.schemas[act.schema];
    let outcome = schema
        .cases
        .get(case_index)
        .and_then(|c| c.outcomes.get(outcome_index))
        .ok_or_else(|| Error::BadOutcomeIndex {
            action: act.display(dom, &q.objects).to_string(),
            case: case_index,
            outcome: outcome_index,
        })?;
    Ok(apply_unchecked(q, outcome, &act.binding))
}

/// Next-state distribution of a legal action: `(probability, case, outcome,
/// successor)` in declaration order.
pub fn successors(
    q: &State,
    dom: &DomainDef,
    act: &GroundAction,
) -> Result<Vec<(f64, usize, usize, State)>, Error> {
    if !is_legal(q, dom, act) {
        return Err(Error::IllegalAction(act.display(dom, &q.objects).to_string()));
    }
    let schema = &dom.schemas[act.schema];
    let ci = applicable_case(q, dom, act)
        .ok_or_else(|| Error::NoApplicableCase(act.display(dom, &q.objects).to_string()))?;
    Ok(schema.cases[ci]
        .outcomes
        .iter()
        .enumerate()
        .map(|(oi, o)| (o.probability, ci, oi, apply_unchecked(q, o, &act.binding)))
        .collect())
}

/// Samples a successor, consuming exactly one uniform draw from `rng`.
pub fn sample_transition<R: Rng + ?Sized>(
    q: &State,
    dom: &DomainDef,
    act: &GroundAction,
    rng: &mut R,
) -> Result<State, Error> {
    if !is_legal(q, dom, act) {
        return Err(Error::IllegalAction(act.display(dom, &q.objects).to_string()));
    }
    let schema = &dom.schemas[act.schema];
    let ci = applicable_case(q, dom, act)
        .ok_or_else(|| Error::NoApplicableCase(act.display(dom, &q.objects).to_string()))?;
    let outcomes = &schema.cases[ci].outcomes;
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    // Rounding can leave `u` above the final partial sum.
    let mut pick = outcomes
        .iter()
        .rposition(|o| o.probability > 0.0)
        .unwrap_or(outcomes.len() - 1);
    for (i, o) in outcomes.iter().enumerate() {
        acc += o.probability;
        if u < acc {
            pick = i;
            break;
        }
    }
    Ok(apply_unchecked(q, &outcomes[pick], &act.binding))
}
