//! Built-in benchmark domains and their problem generators.

mod bwstates;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::pstrips::{parse_domain, Atom, DomainDef, ObjectTable, Obj, State};

pub use bwstates::{count_bw_states, lah, uniform_bw_state, BlockConfig};

/// Built-in domain names with their source files.
pub const BUILTIN: &[(&str, &str)] = &[
    ("bw1", include_str!("../../domains/bw1.dom")),
    ("bw2", include_str!("../../domains/bw2.dom")),
    ("pw1", include_str!("../../domains/pw1.dom")),
    ("pw2", include_str!("../../domains/pw2.dom")),
    ("lw1", include_str!("../../domains/lw1.dom")),
    ("lw2", include_str!("../../domains/lw2.dom")),
    ("bwdet", include_str!("../../domains/bwdet.dom")),
];

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown built-in domain `{0}`")]
    UnknownDomain(String),
    #[error("bad problem size `{0}`: {1}")]
    BadSize(String, &'static str),
    #[error("problem size does not fit domain `{0}`")]
    SizeMismatch(String),
    #[error(transparent)]
    Domain(#[from] crate::pstrips::Error),
}

/// Source text of a built-in domain file.
pub fn builtin_source(name: &str) -> Result<&'static str, Error> {
    BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| Error::UnknownDomain(name.to_string()))
}

pub fn builtin_domain(name: &str) -> Result<DomainDef, Error> {
    Ok(parse_domain(builtin_source(name)?)?)
}

/// Problem generator family of a domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Blocks { colors: bool },
    Logistics { rain: bool },
}

impl Family {
    pub fn of(name: &str) -> Result<Family, Error> {
        match name {
            "bw1" | "bwdet" => Ok(Family::Blocks { colors: false }),
            "bw2" | "pw1" | "pw2" => Ok(Family::Blocks { colors: true }),
            "lw1" => Ok(Family::Logistics { rain: false }),
            "lw2" => Ok(Family::Logistics { rain: true }),
            _ => Err(Error::UnknownDomain(name.to_string())),
        }
    }
}

/// One component of a size vector: a fixed count, or uniform in `1..bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Count {
    Fixed(usize),
    Below(usize),
}

impl Count {
    fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> usize {
        match self {
            Count::Fixed(n) => n,
            Count::Below(b) => rng.gen_range(1..b),
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Fixed(n) => write!(f, "{n}"),
            Count::Below(b) => write!(f, "<{b}"),
        }
    }
}

/// Problem size: `p` blocks, or `(cities, cars, trucks, packages)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProblemSize {
    Blocks(Count),
    Logistics([Count; 4]),
}

impl FromStr for ProblemSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let parse_count = |c: &str| -> Result<Count, Error> {
            let c = c.trim();
            let bad = || Error::BadSize(s.to_string(), "expected N or <N");
            match c.strip_prefix('<') {
                Some(b) => match b.parse::<usize>() {
                    Ok(b) if b >= 2 => Ok(Count::Below(b)),
                    _ => Err(bad()),
                },
                None => c.parse().map(Count::Fixed).map_err(|_| bad()),
            }
        };
        let parts: Vec<&str> = s.split(',').collect();
        match parts.len() {
            1 => {
                let c = parse_count(parts[0])?;
                if c == Count::Fixed(0) {
                    return Err(Error::BadSize(s.to_string(), "need at least one block"));
                }
                Ok(ProblemSize::Blocks(c))
            }
            4 => {
                let mut v = [Count::Fixed(0); 4];
                for (i, p) in parts.iter().enumerate() {
                    v[i] = parse_count(p)?;
                }
                if v[0] == Count::Fixed(0) {
                    return Err(Error::BadSize(s.to_string(), "need at least one city"));
                }
                Ok(ProblemSize::Logistics(v))
            }
            _ => Err(Error::BadSize(
                s.to_string(),
                "expected one count or four comma-separated counts",
            )),
        }
    }
}

impl fmt::Display for ProblemSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemSize::Blocks(c) => write!(f, "{c}"),
            ProblemSize::Logistics(v) => write!(f, "{},{},{},{}", v[0], v[1], v[2], v[3]),
        }
    }
}

/// A problem distribution: a domain, its generator family and a size.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub dom: Arc<DomainDef>,
    pub family: Family,
    pub size: ProblemSize,
}

impl GeneratorSpec {
    pub fn builtin(name: &str, size: ProblemSize) -> Result<Self, Error> {
        let dom = Arc::new(builtin_domain(name)?);
        Self::new(dom, name, size)
    }

    /// `family_name` picks the generator (a built-in domain name).
    pub fn new(dom: Arc<DomainDef>, family_name: &str, size: ProblemSize) -> Result<Self, Error> {
        let family = Family::of(family_name)?;
        match (&family, &size) {
            (Family::Blocks { .. }, ProblemSize::Blocks(_))
            | (Family::Logistics { .. }, ProblemSize::Logistics(_)) => {}
            _ => return Err(Error::SizeMismatch(family_name.to_string())),
        }
        Ok(GeneratorSpec { dom, family, size })
    }

    /// Draws one initial state with its goal.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> State {
        let built = match (&self.family, &self.size) {
            (Family::Blocks { colors }, ProblemSize::Blocks(p)) => {
                let n = p.draw(rng);
                sample_blocks(&self.dom, n, *colors, rng)
            }
            (Family::Logistics { rain }, ProblemSize::Logistics(v)) => {
                let sizes = [v[0].draw(rng), v[1].draw(rng), v[2].draw(rng), v[3].draw(rng)];
                sample_logistics(&self.dom, sizes, *rain, rng)
            }
            _ => unreachable!("checked in GeneratorSpec::new"),
        };
        built.expect("generator emits only declared predicates")
    }
}

fn pred(dom: &DomainDef, name: &str) -> crate::pstrips::PredId {
    dom.pred_by_name(name)
        .unwrap_or_else(|| panic!("generator needs predicate `{name}`"))
}

/// Facts describing a block configuration: `on`, `on-table`, `clear`.
fn config_facts(dom: &DomainDef, c: &BlockConfig, out: &mut Vec<Atom>) {
    let on = pred(dom, "on");
    let on_table = pred(dom, "on-table");
    let clear = pred(dom, "clear");
    let above = c.above();
    for (b, u) in c.below.iter().enumerate() {
        let b = b as Obj;
        match u {
            Some(u) => out.push(Atom::new(on, &[b, *u as Obj])),
            None => out.push(Atom::new(on_table, &[b])),
        }
        if above[b as usize].is_none() {
            out.push(Atom::new(clear, &[b]));
        }
    }
}

fn sample_blocks<R: Rng + ?Sized>(
    dom: &DomainDef,
    n: usize,
    colors: bool,
    rng: &mut R,
) -> Result<State, crate::pstrips::Error> {
    let names = (1..=n).map(|i| format!("b{i}")).collect();
    let init = uniform_bw_state(n, rng);
    let goal_cfg = uniform_bw_state(n, rng);
    let mut world = Vec::new();
    config_facts(dom, &init, &mut world);
    world.push(Atom::new(pred(dom, "arm-empty"), &[]));
    if colors {
        let black = pred(dom, "black");
        let gold = pred(dom, "gold");
        for b in 0..n as Obj {
            let p = if rng.gen_bool(0.5) { black } else { gold };
            world.push(Atom::new(p, &[b]));
        }
    }
    let on = pred(dom, "on");
    let on_table = pred(dom, "on-table");
    let goal = goal_cfg
        .below
        .iter()
        .enumerate()
        .map(|(b, u)| match u {
            Some(u) => Atom::new(on, &[b as Obj, *u as Obj]),
            None => Atom::new(on_table, &[b as Obj]),
        })
        .collect();
    State::new(dom, Arc::new(ObjectTable::new(names)), world, goal)
}

fn sample_logistics<R: Rng + ?Sized>(
    dom: &DomainDef,
    [cities, cars, trucks, packages]: [usize; 4],
    rain: bool,
    rng: &mut R,
) -> Result<State, crate::pstrips::Error> {
    let mut names = Vec::new();
    names.extend((1..=cities).map(|i| format!("city{i}")));
    names.extend((1..=cars).map(|i| format!("car{i}")));
    names.extend((1..=trucks).map(|i| format!("truck{i}")));
    names.extend((1..=packages).map(|i| format!("pkg{i}")));
    let city0 = 0 as Obj;
    let car0 = cities as Obj;
    let truck0 = car0 + cars as Obj;
    let pkg0 = truck0 + trucks as Obj;
    let vehicles = cars + trucks;

    let city = pred(dom, "city");
    let car = pred(dom, "car");
    let truck = pred(dom, "truck");
    let package = pred(dom, "package");
    let inp = pred(dom, "in");
    let selected = pred(dom, "selected");

    let mut world = Vec::new();
    for c in 0..cities as Obj {
        world.push(Atom::new(city, &[city0 + c]));
    }
    for v in 0..cars as Obj {
        world.push(Atom::new(car, &[car0 + v]));
    }
    for v in 0..trucks as Obj {
        world.push(Atom::new(truck, &[truck0 + v]));
    }
    for v in 0..vehicles as Obj {
        let c = rng.gen_range(0..cities) as Obj;
        world.push(Atom::new(inp, &[car0 + v, city0 + c]));
    }
    let mut goal = Vec::new();
    for p in 0..packages as Obj {
        world.push(Atom::new(package, &[pkg0 + p]));
        // Vehicles and cities are equally likely holders.
        let k = rng.gen_range(0..vehicles + cities) as Obj;
        let holder = if (k as usize) < vehicles {
            car0 + k
        } else {
            city0 + (k - vehicles as Obj)
        };
        world.push(Atom::new(inp, &[pkg0 + p, holder]));
        let g = rng.gen_range(0..cities) as Obj;
        goal.push(Atom::new(inp, &[pkg0 + p, city0 + g]));
    }
    if vehicles > 0 {
        let v = rng.gen_range(0..vehicles) as Obj;
        world.push(Atom::new(selected, &[car0 + v]));
    }
    if rain {
        let r = pred(dom, "rain");
        for c in 0..cities as Obj {
            if rng.gen_bool(0.5) {
                world.push(Atom::new(r, &[city0 + c]));
            }
        }
    }
    State::new(dom, Arc::new(ObjectTable::new(names)), world, goal)
}

/// Reads back the block configuration of a blocks-world state's world facts
/// (`None` if the arm holds a block or the facts are not a configuration).
pub fn blocks_config(dom: &DomainDef, q: &State) -> Option<BlockConfig> {
    let on = dom.pred_by_name("on")?;
    let on_table = dom.pred_by_name("on-table")?;
    let n = q.num_objects();
    let mut below: Vec<Option<Option<usize>>> = vec![None; n];
    for a in q.world_facts(on) {
        below[a.args[0] as usize] = Some(Some(a.args[1] as usize));
    }
    for a in q.world_facts(on_table) {
        below[a.args[0] as usize] = Some(None);
    }
    Some(BlockConfig {
        below: below.into_iter().collect::<Option<Vec<_>>>()?,
    })
}
