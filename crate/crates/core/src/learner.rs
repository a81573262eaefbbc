//! Rule induction: heuristics, beam search over conjunctions, rule
//! selection, set-covering list construction and bagging.
//!
//! Concept denotations over the training set are precomputed once as one
//! bitmask per (concept, instance). Heuristic values are kept as exact
//! integers: within one beam search the denominators `|F|` and `|F_a|` are
//! fixed, and `P(R, f)` is scaled by `lcm(1..=n)` so every term is integral.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::policy::{dl_suggest, suggest, DecisionList, Ensemble, Rule, TrainingInstance};
use crate::pstrips::{legal_actions, ActionTypeId, DomainDef};
use crate::seed;
use crate::taxonomy::{self, class_string, intersect, CandidateSpace, ClassExpr};

/// Largest training state the exact heuristic arithmetic supports.
pub const MAX_OBJECTS: usize = 40;

#[derive(Debug, Error)]
pub enum Error {
    #[error("the training set is empty")]
    EmptyTrainingSet,
    #[error("training state has {0} objects; at most {MAX_OBJECTS} are supported")]
    TooManyObjects(usize),
    #[error("invalid learner parameters: {0}")]
    BadParams(&'static str),
    #[error(transparent)]
    Concept(#[from] taxonomy::Error),
}

/// Concept depth `d`, conjunct cap `w` and beam width `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LearnerParams {
    pub d: usize,
    pub w: usize,
    pub b: usize,
}

impl LearnerParams {
    fn check(&self) -> Result<(), Error> {
        if self.d == 0 || self.w == 0 || self.b == 0 {
            return Err(Error::BadParams("d, w and b must be at least 1"));
        }
        Ok(())
    }
}

/// Ensemble size `z` and bootstrap sample size `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BagParams {
    pub z: usize,
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    /// `(N1, V)`
    H1,
    /// `(N2, V)`
    H2,
}

/// Heuristic components of a rule on an instance set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Heuristics {
    pub v: f64,
    pub n1: f64,
    pub n2: f64,
}

impl Heuristics {
    pub fn h1(&self) -> (f64, f64) {
        (self.n1, self.v)
    }

    pub fn h2(&self) -> (f64, f64) {
        (self.n2, self.v)
    }

    pub fn consistent(&self) -> bool {
        self.n2 == 1.0
    }
}

/// Heuristic values of `r` on `f` computed literally from [`suggest`].
pub fn heuristics(r: &Rule, f: &[TrainingInstance], dom: &DomainDef) -> Result<Heuristics, Error> {
    if f.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let mut covered = 0usize;
    let mut fa = 0usize;
    let mut p_sum = 0.0;
    let mut wrong = 0usize;
    for inst in f {
        let legal = legal_actions(&inst.state, dom);
        if !legal.iter().any(|a| a.action == r.action) {
            continue;
        }
        fa += 1;
        let s = suggest(r, &inst.state, dom);
        if s.is_empty() {
            if !inst.optimal.iter().any(|a| a.action == r.action) {
                p_sum += 1.0;
            }
            continue;
        }
        covered += 1;
        let good = s.iter().filter(|a| inst.optimal.contains(a)).count();
        p_sum += good as f64 / s.len() as f64;
        if good < s.len() {
            wrong += 1;
        }
    }
    Ok(Heuristics {
        v: covered as f64 / f.len() as f64,
        n1: if fa == 0 { 0.0 } else { p_sum / fa as f64 },
        n2: 1.0 / (1.0 + wrong as f64),
    })
}

pub fn heuristic_v(r: &Rule, f: &[TrainingInstance], dom: &DomainDef) -> Result<f64, Error> {
    Ok(heuristics(r, f, dom)?.v)
}

pub fn heuristic_n1(r: &Rule, f: &[TrainingInstance], dom: &DomainDef) -> f64 {
    heuristics(r, f, dom).map_or(0.0, |h| h.n1)
}

pub fn heuristic_n2(r: &Rule, f: &[TrainingInstance], dom: &DomainDef) -> f64 {
    heuristics(r, f, dom).map_or(1.0, |h| h.n2)
}

fn lcm_upto(n: usize) -> u128 {
    fn gcd(a: u128, b: u128) -> u128 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    (1..=n.max(1) as u128).fold(1, |acc, k| acc / gcd(acc, k) * k)
}

/// Exact counts behind the heuristics of one rule on one instance multiset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct Score {
    /// `Σ P(R, f)` over `F_a`, scaled by the learner's `lcm`.
    p_sum: u128,
    covered: u64,
    wrong: u64,
}

impl Score {
    /// Covers some instance and none incorrectly. Vacuous consistency is
    /// excluded: it would stop the search at concepts that cover nothing.
    fn consistent(&self) -> bool {
        self.wrong == 0 && self.covered > 0
    }

    fn key(&self, h: Heuristic) -> (u128, u64) {
        match h {
            Heuristic::H1 => (self.p_sum, self.covered),
            Heuristic::H2 => (u128::MAX - self.wrong as u128, self.covered),
        }
    }
}

/// A conjunction of pool concepts, as sorted pool indices.
type Conj = Vec<u32>;

/// The action-type restriction `F_a` of an instance multiset.
struct View {
    /// Instance ids, with multiplicity.
    idx: Vec<u32>,
    legal: Vec<u64>,
    optimal: Vec<u64>,
    /// `|F|`, with multiplicity.
    total: u64,
}

/// Result of one beam search.
#[derive(Debug, Clone)]
struct Found {
    conj: Conj,
    score: Score,
}

/// Rule chosen by one learn-rule step, with its exact statistics.
#[derive(Debug, Clone)]
pub struct LearnedRule {
    pub rule: Rule,
    pub heuristics: Heuristics,
    pub consistent: bool,
    /// Produced by the progress fallback rather than the rule search.
    pub fallback: bool,
}

#[derive(Debug, Clone)]
pub struct LearnOutcome {
    pub list: DecisionList,
    pub rules: Vec<LearnedRule>,
}

impl LearnOutcome {
    /// Whether every rule search returned a consistent rule.
    pub fn all_consistent(&self) -> bool {
        self.rules.iter().all(|r| r.consistent && !r.fallback)
    }
}

/// Precomputed training data for rule induction.
pub struct Learner<'a> {
    dom: &'a DomainDef,
    params: LearnerParams,
    /// Conjunct pool: deduplicated intersection-free concepts other than `a-thing`.
    pool: Vec<ClassExpr>,
    pool_depth: Vec<usize>,
    /// `cols[e][i]`: objects of instance `i` in pool concept `e`.
    cols: Vec<Vec<u64>>,
    /// Per action type, per instance: objects `o` with `a(o)` legal / optimal.
    legal: Vec<Vec<u64>>,
    optimal: Vec<Vec<u64>>,
    lcm: u128,
    n_instances: usize,
}

impl<'a> Learner<'a> {
    pub fn new(dom: &'a DomainDef, instances: &[TrainingInstance], params: LearnerParams) -> Result<Self, Error> {
        params.check()?;
        let max_n = instances.iter().map(|f| f.state.num_objects()).max().unwrap_or(0);
        if max_n > MAX_OBJECTS {
            return Err(Error::TooManyObjects(max_n));
        }
        let space = CandidateSpace::build(dom, params.d);
        let evals: Vec<Vec<u64>> = instances
            .par_iter()
            .map(|f| {
                space.eval_all(dom, &f.state).map(|sets| {
                    sets.iter()
                        .map(|s| s.words().first().copied().unwrap_or(0))
                        .collect()
                })
            })
            .collect::<Result<_, _>>()?;

        let mut pool = Vec::new();
        let mut pool_depth = Vec::new();
        let mut cols: Vec<Vec<u64>> = Vec::new();
        let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
        for (e, expr) in space.exprs.iter().enumerate() {
            if *expr == ClassExpr::AThing {
                continue;
            }
            let col: Vec<u64> = evals.iter().map(|row| row[e]).collect();
            if seen.contains_key(&col) {
                continue;
            }
            seen.insert(col.clone(), pool.len());
            pool.push(expr.clone());
            pool_depth.push(space.depths[e]);
            cols.push(col);
        }

        let n_types = dom.action_types.len();
        let mut legal = vec![vec![0u64; instances.len()]; n_types];
        let mut optimal = vec![vec![0u64; instances.len()]; n_types];
        for (i, f) in instances.iter().enumerate() {
            for a in legal_actions(&f.state, dom) {
                if a.args.len() == 1 {
                    legal[a.action.0 as usize][i] |= 1 << a.object();
                }
            }
            for a in &f.optimal {
                if a.args.len() == 1 {
                    optimal[a.action.0 as usize][i] |= 1 << a.object();
                }
            }
        }
        Ok(Learner {
            dom,
            params,
            pool,
            pool_depth,
            cols,
            legal,
            optimal,
            lcm: lcm_upto(max_n),
            n_instances: instances.len(),
        })
    }

    /// Number of distinct conjunct concepts after deduplication.
    pub fn pool_len(&self) -> usize {
        self.pool.len()
    }

    fn view(&self, f: &[u32], a: ActionTypeId) -> View {
        let legal = &self.legal[a.0 as usize];
        let optimal = &self.optimal[a.0 as usize];
        let idx: Vec<u32> = f.iter().copied().filter(|&i| legal[i as usize] != 0).collect();
        View {
            legal: idx.iter().map(|&i| legal[i as usize]).collect(),
            optimal: idx.iter().map(|&i| optimal[i as usize]).collect(),
            idx,
            total: f.len() as u64,
        }
    }

    /// Suggestion masks of a conjunction on a view.
    fn masks(&self, conj: &[u32], v: &View) -> Vec<u64> {
        let mut m = v.legal.clone();
        for &e in conj {
            let col = &self.cols[e as usize];
            for (x, &i) in m.iter_mut().zip(&v.idx) {
                *x &= col[i as usize];
            }
        }
        m
    }

    fn score_masks(&self, v: &View, masks: impl Iterator<Item = u64>) -> Score {
        let mut s = Score::default();
        for (m, &opt) in masks.zip(&v.optimal) {
            if m == 0 {
                if opt == 0 {
                    s.p_sum += self.lcm;
                }
                continue;
            }
            s.covered += 1;
            let n = m.count_ones();
            let good = (m & opt).count_ones();
            s.p_sum += self.lcm / n as u128 * good as u128;
            if good < n {
                s.wrong += 1;
            }
        }
        s
    }

    fn heuristics_of(&self, v: &View, s: &Score) -> Heuristics {
        let fa = v.idx.len();
        Heuristics {
            v: s.covered as f64 / v.total as f64,
            n1: if fa == 0 {
                0.0
            } else {
                (s.p_sum as f64 / self.lcm as f64) / fa as f64
            },
            n2: 1.0 / (1.0 + s.wrong as f64),
        }
    }

    fn concept(&self, conj: &[u32]) -> ClassExpr {
        intersect(conj.iter().map(|&e| self.pool[e as usize].clone()).collect())
    }

    /// Order among equal heuristic values: smaller largest depth, fewer
    /// conjuncts, then canonical string.
    fn tie_cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        let depth_of = |c: &[u32]| c.iter().map(|&e| self.pool_depth[e as usize]).max().unwrap_or(1);
        depth_of(a)
            .cmp(&depth_of(b))
            .then(a.len().cmp(&b.len()))
            .then_with(|| {
                class_string(&self.concept(a), self.dom).cmp(&class_string(&self.concept(b), self.dom))
            })
    }

    /// Beam search for the concept of a rule for action type `a`.
    fn beam_search(&self, v: &View, h: Heuristic) -> Found {
        let b = self.params.b;
        let w = self.params.w;
        let score_of = |conj: &[u32]| self.score_masks(v, self.masks(conj, v).into_iter());

        let start = Found {
            conj: Vec::new(),
            score: score_of(&[]),
        };
        let mut beam = vec![start.clone()];
        let mut best = start;
        let mut hv_prev: Option<Vec<(u128, u64)>> = None;
        let mut hv_cur = vec![best.score.key(h)];
        let mut i = 1;
        while !best.score.consistent() && (i == 1 || hv_prev.as_ref() != Some(&hv_cur)) {
            // Expansions of every beam member, each conjunction once.
            let mut seen: HashSet<Conj> = beam.iter().map(|f| f.conj.clone()).collect();
            let mut expand: Vec<(usize, u32, Conj)> = Vec::new();
            for (bi, m) in beam.iter().enumerate() {
                if m.conj.len() + 1 > w {
                    continue;
                }
                for e in 0..self.pool.len() as u32 {
                    if m.conj.contains(&e) {
                        continue;
                    }
                    let mut c = m.conj.clone();
                    let at = c.binary_search(&e).unwrap_err();
                    c.insert(at, e);
                    if seen.insert(c.clone()) {
                        expand.push((bi, e, c));
                    }
                }
            }
            let base: Vec<Vec<u64>> = beam.iter().map(|m| self.masks(&m.conj, v)).collect();
            let scored: Vec<Found> = expand
                .into_par_iter()
                .map(|(bi, e, conj)| {
                    let col = &self.cols[e as usize];
                    let masks = base[bi].iter().zip(&v.idx).map(|(&m, &i)| m & col[i as usize]);
                    Found {
                        score: self.score_masks(v, masks),
                        conj,
                    }
                })
                .collect();

            // Best representative per heuristic value, then the top b values.
            let mut groups: HashMap<(u128, u64), usize> = HashMap::new();
            let mut reps: Vec<Found> = Vec::new();
            for cand in beam.iter().cloned().chain(scored) {
                let k = cand.score.key(h);
                match groups.get(&k) {
                    None => {
                        groups.insert(k, reps.len());
                        reps.push(cand);
                    }
                    Some(&r) => {
                        if self.tie_cmp(&cand.conj, &reps[r].conj) == Ordering::Less {
                            reps[r] = cand;
                        }
                    }
                }
            }
            reps.sort_by(|x, y| y.score.key(h).cmp(&x.score.key(h)));
            reps.truncate(b);
            beam = reps;
            best = beam[0].clone();
            hv_prev = Some(std::mem::replace(
                &mut hv_cur,
                beam.iter().map(|f| f.score.key(h)).collect(),
            ));
            i += 1;
        }
        best
    }

    /// N1 then V comparison across action types (different `|F_a|`).
    fn h1_cmp(&self, a: (&Score, usize), b: (&Score, usize)) -> Ordering {
        let n1 = |s: &Score, fa: usize| if fa == 0 { (0, 1) } else { (s.p_sum, fa as u128) };
        let (pa, da) = n1(a.0, a.1);
        let (pb, db) = n1(b.0, b.1);
        (pa * db).cmp(&(pb * da)).then(a.0.covered.cmp(&b.0.covered))
    }

    /// One learn-rule step on the instance multiset `f`.
    pub fn learn_rule(&self, f: &[u32]) -> LearnedRule {
        struct Cand {
            action: ActionTypeId,
            found: Found,
            fa: usize,
            view_total: u64,
        }
        let mut cands: Vec<Cand> = Vec::new();
        for (t, ty) in self.dom.action_types.iter().enumerate() {
            if ty.arity != 1 {
                continue;
            }
            let a = ActionTypeId(t as u16);
            let v = self.view(f, a);
            if v.idx.is_empty() {
                continue;
            }
            let mut found = self.beam_search(&v, Heuristic::H1);
            if !found.score.consistent() {
                let alt = self.beam_search(&v, Heuristic::H2);
                if alt.score.consistent() {
                    found = alt;
                }
            }
            log::trace!(
                "  {} : {} covers {} wrong {} n1 {:.3}",
                class_string(&self.concept(&found.conj), self.dom),
                self.dom.action_type(a).name,
                found.score.covered,
                found.score.wrong,
                found.score.p_sum as f64 / self.lcm as f64 / v.idx.len() as f64
            );
            cands.push(Cand {
                action: a,
                found,
                fa: v.idx.len(),
                view_total: v.total,
            });
        }
        // Rules covering nothing cannot make progress; drop them unless no
        // candidate covers anything.
        if cands.iter().any(|c| c.found.score.covered > 0) {
            cands.retain(|c| c.found.score.covered > 0);
        }
        let pick_from: Vec<&Cand> = if cands.iter().any(|c| c.found.score.consistent()) {
            cands.iter().filter(|c| c.found.score.consistent()).collect()
        } else {
            cands.iter().collect()
        };
        let mut best: Option<&Cand> = None;
        for c in pick_from {
            let better = match best {
                None => true,
                Some(b) => match self.h1_cmp((&c.found.score, c.fa), (&b.found.score, b.fa)) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => {
                        (c.action, class_string(&self.concept(&c.found.conj), self.dom))
                            < (b.action, class_string(&self.concept(&b.found.conj), self.dom))
                    }
                },
            };
            if better {
                best = Some(c);
            }
        }
        let c = best.expect("every state has a legal unary action");
        let view = View {
            idx: vec![0; c.fa],
            legal: Vec::new(),
            optimal: Vec::new(),
            total: c.view_total,
        };
        LearnedRule {
            rule: Rule {
                concept: self.concept(&c.found.conj),
                action: c.action,
            },
            heuristics: self.heuristics_of(&view, &c.found.score),
            consistent: c.found.score.consistent(),
            fallback: false,
        }
    }

    /// Instances of `f` (by position) that `rule` covers.
    fn covered_by(&self, rule: &Rule, f: &[u32]) -> Vec<bool> {
        let conj = self.conj_of(&rule.concept);
        let legal = &self.legal[rule.action.0 as usize];
        f.iter()
            .map(|&i| {
                let mut m = legal[i as usize];
                for &e in &conj {
                    m &= self.cols[e as usize][i as usize];
                }
                m != 0
            })
            .collect()
    }

    /// Pool indices of a concept built by this learner.
    fn conj_of(&self, c: &ClassExpr) -> Vec<u32> {
        c.conjuncts()
            .iter()
            .map(|m| {
                self.pool
                    .iter()
                    .position(|p| p == m)
                    .expect("learned concepts are built from the pool") as u32
            })
            .collect()
    }

    /// `a-thing : a*` where `a*` correctly covers the most of `f`.
    fn fallback_rule(&self, f: &[u32]) -> LearnedRule {
        let mut best: Option<(u64, ActionTypeId, Score, usize)> = None;
        for (t, ty) in self.dom.action_types.iter().enumerate() {
            if ty.arity != 1 {
                continue;
            }
            let a = ActionTypeId(t as u16);
            let v = self.view(f, a);
            let correct = v
                .legal
                .iter()
                .zip(&v.optimal)
                .filter(|(&l, &o)| l & !o == 0)
                .count() as u64;
            if best.as_ref().is_none_or(|b| correct > b.0) {
                let s = self.score_masks(&v, v.legal.iter().copied());
                best = Some((correct, a, s, v.idx.len()));
            }
        }
        let (_, a, s, fa) = best.expect("domain has a unary action type");
        let view = View {
            idx: vec![0; fa],
            legal: Vec::new(),
            optimal: Vec::new(),
            total: f.len() as u64,
        };
        LearnedRule {
            rule: Rule {
                concept: ClassExpr::AThing,
                action: a,
            },
            heuristics: self.heuristics_of(&view, &s),
            consistent: s.consistent(),
            fallback: true,
        }
    }

    /// Set covering over the instance multiset `f0` (ids into the
    /// learner's instances, repeats allowed).
    pub fn learn_decision_list(&self, f0: &[u32]) -> LearnOutcome {
        let mut f: Vec<u32> = f0.to_vec();
        let mut rules = Vec::new();
        while !f.is_empty() {
            let mut lr = self.learn_rule(&f);
            let mut cov = self.covered_by(&lr.rule, &f);
            if !cov.iter().any(|&c| c) {
                lr = self.fallback_rule(&f);
                cov = self.covered_by(&lr.rule, &f);
            }
            log::debug!(
                "rule {}: {} covers {}/{} (consistent: {})",
                rules.len(),
                lr.rule.to_string(self.dom),
                cov.iter().filter(|&&c| c).count(),
                f.len(),
                lr.consistent
            );
            let mut k = 0;
            f.retain(|_| {
                k += 1;
                !cov[k - 1]
            });
            rules.push(lr);
        }
        LearnOutcome {
            list: DecisionList {
                rules: rules.iter().map(|r| r.rule.clone()).collect(),
            },
            rules,
        }
    }

    /// Decision list over every instance.
    pub fn learn_all(&self) -> LearnOutcome {
        let all: Vec<u32> = (0..self.n_instances as u32).collect();
        self.learn_decision_list(&all)
    }

    /// `z` members, each learned from `m` instances drawn with replacement.
    pub fn bag(&self, bag: BagParams, master_seed: u64) -> Result<Vec<LearnOutcome>, Error> {
        let units: Vec<Vec<u32>> = (0..self.n_instances as u32).map(|i| vec![i]).collect();
        self.bag_units(bag, master_seed, &units)
    }

    /// `z` members, each learned from the instances of `m` units drawn with
    /// replacement. A unit is a group of instance ids, such as one trajectory.
    pub fn bag_units(&self, bag: BagParams, master_seed: u64, units: &[Vec<u32>]) -> Result<Vec<LearnOutcome>, Error> {
        if bag.z == 0 || bag.m == 0 {
            return Err(Error::BadParams("ensemble and sample sizes must be at least 1"));
        }
        if self.n_instances == 0 || units.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        if units.iter().flatten().any(|&i| i as usize >= self.n_instances) {
            return Err(Error::BadParams("unit refers to a missing instance"));
        }
        let samples: Vec<Vec<u32>> = (0..bag.z)
            .map(|k| {
                bootstrap_sample(units.len(), bag.m, master_seed, k)
                    .into_iter()
                    .flat_map(|u| units[u as usize].iter().copied())
                    .collect()
            })
            .collect();
        Ok(self.learn_members(&samples))
    }

    /// One decision list per instance multiset, learned concurrently.
    pub fn learn_members(&self, samples: &[Vec<u32>]) -> Vec<LearnOutcome> {
        samples
            .par_iter()
            .map(|s| self.learn_decision_list(s))
            .collect()
    }
}

/// Bootstrap sample of member `k`: `m` ids below `n` drawn from the
/// member's own stream, so members do not depend on construction order.
pub fn bootstrap_sample(n: usize, m: usize, master_seed: u64, k: usize) -> Vec<u32> {
    let mut rng = seed::stream(master_seed, "bootstrap", k as u64);
    (0..m).map(|_| rng.gen_range(0..n) as u32).collect()
}

/// Learns one decision list from all of `f0`.
pub fn learn_decision_list(
    dom: &DomainDef,
    f0: &[TrainingInstance],
    params: LearnerParams,
) -> Result<LearnOutcome, Error> {
    Ok(Learner::new(dom, f0, params)?.learn_all())
}

/// One learn-rule step on all of `f`.
pub fn learn_rule(dom: &DomainDef, f: &[TrainingInstance], params: LearnerParams) -> Result<LearnedRule, Error> {
    if f.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let l = Learner::new(dom, f, params)?;
    let all: Vec<u32> = (0..f.len() as u32).collect();
    Ok(l.learn_rule(&all))
}

/// Bagged ensemble of decision lists.
pub fn bag_learn(
    dom: &DomainDef,
    f: &[TrainingInstance],
    params: LearnerParams,
    bag: BagParams,
    master_seed: u64,
) -> Result<Ensemble, Error> {
    if f.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let members = Learner::new(dom, f, params)?
        .bag(bag, master_seed)?
        .into_iter()
        .map(|o| o.list)
        .collect();
    Ok(Ensemble { members })
}

/// Whether `l` covers and correctly covers each instance, literally.
pub fn coverage(l: &DecisionList, f: &[TrainingInstance], dom: &DomainDef) -> Vec<(bool, bool)> {
    f.iter()
        .map(|inst| {
            let (s, _) = dl_suggest(l, &inst.state, dom);
            let covers = !s.is_empty();
            (covers, covers && s.iter().all(|a| inst.optimal.contains(a)))
        })
        .collect()
}

#[cfg(test)]
mod tests;
