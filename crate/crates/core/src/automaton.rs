//! Deterministic, complete ω-automata with multi-track colours.
//!
//! Every transition carries one colour per track. Acceptance is a positive
//! boolean combination of `Even(t)` atoms, where `Even(t)` holds when the
//! largest colour seen infinitely often on track `t` is even. A single track
//! with `Even(0)` is an ordinary parity automaton; products keep their
//! operands' tracks side by side and combine the conditions with `And`/`Or`,
//! so complementing stays a colour shift.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Positive boolean formula over `Even(track)` atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Acceptance {
    True,
    False,
    Even(usize),
    And(Vec<Acceptance>),
    Or(Vec<Acceptance>),
}

impl Acceptance {
    pub fn parity() -> Self {
        Acceptance::Even(0)
    }

    /// Evaluates the formula given, per track, the largest colour that
    /// occurs infinitely often.
    pub fn holds(&self, max_inf: &[u32]) -> bool {
        match self {
            Acceptance::True => true,
            Acceptance::False => false,
            Acceptance::Even(t) => max_inf[*t].is_multiple_of(2),
            Acceptance::And(v) => v.iter().all(|a| a.holds(max_inf)),
            Acceptance::Or(v) => v.iter().any(|a| a.holds(max_inf)),
        }
    }

    /// Renumbers tracks by adding `offset`.
    pub fn shift(&self, offset: usize) -> Self {
        match self {
            Acceptance::Even(t) => Acceptance::Even(t + offset),
            Acceptance::And(v) => Acceptance::And(v.iter().map(|a| a.shift(offset)).collect()),
            Acceptance::Or(v) => Acceptance::Or(v.iter().map(|a| a.shift(offset)).collect()),
            other => other.clone(),
        }
    }

    /// The De Morgan dual. Together with a `+1` colour shift on every track
    /// this is the negation.
    pub fn dual(&self) -> Self {
        match self {
            Acceptance::True => Acceptance::False,
            Acceptance::False => Acceptance::True,
            Acceptance::Even(t) => Acceptance::Even(*t),
            Acceptance::And(v) => Acceptance::Or(v.iter().map(Acceptance::dual).collect()),
            Acceptance::Or(v) => Acceptance::And(v.iter().map(Acceptance::dual).collect()),
        }
    }

    /// Disjunctive normal form: a list of clauses, each a sorted set of
    /// tracks that must all be even. Absorbed clauses are dropped.
    pub fn dnf(&self) -> Vec<Vec<usize>> {
        let mut clauses = match self {
            Acceptance::True => vec![vec![]],
            Acceptance::False => vec![],
            Acceptance::Even(t) => vec![vec![*t]],
            Acceptance::Or(v) => v.iter().flat_map(Acceptance::dnf).collect(),
            Acceptance::And(v) => {
                let mut acc: Vec<Vec<usize>> = vec![vec![]];
                for a in v {
                    let rhs = a.dnf();
                    let mut next = Vec::with_capacity(acc.len() * rhs.len());
                    for l in &acc {
                        for r in &rhs {
                            let mut c = l.clone();
                            c.extend_from_slice(r);
                            c.sort_unstable();
                            c.dedup();
                            next.push(c);
                        }
                    }
                    acc = absorb(next);
                }
                acc
            }
        };
        for c in &mut clauses {
            c.sort_unstable();
            c.dedup();
        }
        absorb(clauses)
    }
}

fn absorb(mut clauses: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    clauses.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    clauses.dedup();
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for c in clauses {
        if !kept.iter().any(|k| k.iter().all(|t| c.binary_search(t).is_ok())) {
            kept.push(c);
        }
    }
    kept
}

impl fmt::Display for Acceptance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, v: &[Acceptance], op: &str| {
            write!(f, "(")?;
            for (i, a) in v.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")
        };
        match self {
            Acceptance::True => write!(f, "true"),
            Acceptance::False => write!(f, "false"),
            Acceptance::Even(t) => write!(f, "Even({t})"),
            Acceptance::And(v) => join(f, v, "&"),
            Acceptance::Or(v) => join(f, v, "|"),
        }
    }
}

/// States of a good strongly connected component, the enabled-edge mask and
/// the edges realizing the clause.
type GoodComponent = (Vec<usize>, Vec<bool>, Vec<(usize, usize)>);

/// A deterministic complete automaton over the symbols `S`.
#[derive(Debug, Clone)]
pub struct Automaton<S> {
    symbols: Vec<S>,
    initial: usize,
    delta: Vec<Vec<usize>>,
    colors: Vec<Vec<Vec<u32>>>,
    tracks: usize,
    acceptance: Acceptance,
}

/// A lasso over generic symbols: `stem · cycle^ω`.
pub type RawLasso<S> = (Vec<S>, Vec<S>);

impl<S: Copy + Eq + Hash + fmt::Debug> Automaton<S> {
    /// Builds the automaton reachable from `start` under `step`, which maps a
    /// state key and a symbol to the successor key and its transition colours.
    pub fn explore<K, F>(
        symbols: Vec<S>,
        tracks: usize,
        acceptance: Acceptance,
        start: K,
        mut step: F,
    ) -> Self
    where
        K: Clone + Eq + Hash,
        F: FnMut(&K, S) -> (K, Vec<u32>),
    {
        let mut ids: HashMap<K, usize> = HashMap::new();
        let mut keys = vec![start.clone()];
        ids.insert(start, 0);
        let mut delta = Vec::new();
        let mut colors = Vec::new();
        let mut i = 0;
        while i < keys.len() {
            let key = keys[i].clone();
            let mut row = Vec::with_capacity(symbols.len());
            let mut crow = Vec::with_capacity(symbols.len());
            for &s in &symbols {
                let (next, c) = step(&key, s);
                debug_assert_eq!(c.len(), tracks);
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = keys.len();
                        ids.insert(next.clone(), id);
                        keys.push(next);
                        id
                    }
                };
                row.push(id);
                crow.push(c);
            }
            delta.push(row);
            colors.push(crow);
            i += 1;
        }
        Automaton {
            symbols,
            initial: 0,
            delta,
            colors,
            tracks,
            acceptance,
        }
    }

    pub fn symbols(&self) -> &[S] {
        &self.symbols
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn tracks(&self) -> usize {
        self.tracks
    }

    pub fn acceptance(&self) -> &Acceptance {
        &self.acceptance
    }

    pub fn symbol_index(&self, s: S) -> Option<usize> {
        self.symbols.iter().position(|&x| x == s)
    }

    pub fn next(&self, q: usize, sym: usize) -> usize {
        self.delta[q][sym]
    }

    pub fn colors(&self, q: usize, sym: usize) -> &[u32] {
        &self.colors[q][sym]
    }

    /// Successor on a symbol value; `None` if the symbol is not in the alphabet.
    pub fn step(&self, q: usize, s: S) -> Option<usize> {
        self.symbol_index(s).map(|i| self.delta[q][i])
    }

    /// Accepts exactly the words this automaton rejects.
    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        for row in &mut out.colors {
            for c in row {
                for x in c.iter_mut() {
                    *x += 1;
                }
            }
        }
        out.acceptance = self.acceptance.dual();
        out
    }

    fn product(&self, other: &Self, and: bool) -> Result<Self> {
        if self.symbols != other.symbols {
            return Err(Error::Alphabet(format!(
                "cannot combine automata over {:?} and {:?}",
                self.symbols, other.symbols
            )));
        }
        let parts = vec![self.acceptance.clone(), other.acceptance.shift(self.tracks)];
        let acceptance = if and {
            Acceptance::And(parts)
        } else {
            Acceptance::Or(parts)
        };
        let syms: Vec<usize> = (0..self.symbols.len()).collect();
        let idx: HashMap<S, usize> = self.symbols.iter().copied().zip(syms).collect();
        Ok(Self::explore(
            self.symbols.clone(),
            self.tracks + other.tracks,
            acceptance,
            (self.initial, other.initial),
            |&(p, q), s| {
                let i = idx[&s];
                let mut c = self.colors[p][i].clone();
                c.extend_from_slice(&other.colors[q][i]);
                ((self.delta[p][i], other.delta[q][i]), c)
            },
        ))
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.product(other, true)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.product(other, false)
    }

    /// Same automaton over a sub-alphabet: transitions on other symbols are
    /// dropped and unreachable states pruned.
    pub fn restrict(&self, symbols: &[S]) -> Result<Self> {
        let cols: Vec<usize> = symbols
            .iter()
            .map(|&s| {
                self.symbol_index(s)
                    .ok_or_else(|| Error::Alphabet(format!("{s:?} is not in the alphabet")))
            })
            .collect::<Result<_>>()?;
        let idx: HashMap<S, usize> = symbols.iter().copied().zip(cols).collect();
        Ok(Self::explore(
            symbols.to_vec(),
            self.tracks,
            self.acceptance.clone(),
            self.initial,
            |&q, s| {
                let i = idx[&s];
                (self.delta[q][i], self.colors[q][i].clone())
            },
        ))
    }

    /// Whether the run from `q` on `stem · cycle^ω` is accepting.
    pub fn accepts_from(&self, q: usize, stem: &[S], cycle: &[S]) -> Result<bool> {
        if cycle.is_empty() {
            return Err(Error::domain("lasso cycle must be non-empty"));
        }
        let index = |s: S| {
            self.symbol_index(s)
                .ok_or_else(|| Error::Alphabet(format!("{s:?} is not in the alphabet")))
        };
        let stem: Vec<usize> = stem.iter().map(|&s| index(s)).collect::<Result<_>>()?;
        let cycle: Vec<usize> = cycle.iter().map(|&s| index(s)).collect::<Result<_>>()?;
        let mut q = q;
        for &i in &stem {
            q = self.delta[q][i];
        }
        // State at the start of each traversal, until it repeats.
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut starts = Vec::new();
        while !seen.contains_key(&q) {
            seen.insert(q, starts.len());
            starts.push(q);
            for &i in &cycle {
                q = self.delta[q][i];
            }
        }
        let mut max = vec![0u32; self.tracks];
        let mut p = q;
        for _ in seen[&q]..starts.len() {
            for &i in &cycle {
                for (m, &c) in max.iter_mut().zip(&self.colors[p][i]) {
                    *m = (*m).max(c);
                }
                p = self.delta[p][i];
            }
        }
        Ok(self.acceptance.holds(&max))
    }

    pub fn accepts(&self, stem: &[S], cycle: &[S]) -> Result<bool> {
        self.accepts_from(self.initial, stem, cycle)
    }

    /// Strongly connected components of the graph restricted to `nodes` and
    /// the enabled edges (edge id = `q * |symbols| + sym`).
    fn sccs(&self, nodes: &[usize], enabled: &[bool]) -> Vec<Vec<usize>> {
        let k = self.symbols.len();
        let inside: HashSet<usize> = nodes.iter().copied().collect();
        let mut index: HashMap<usize, usize> = HashMap::new();
        let mut low: HashMap<usize, usize> = HashMap::new();
        let mut on_stack: HashSet<usize> = HashSet::new();
        let mut stack = Vec::new();
        let mut out = Vec::new();
        let mut counter = 0;
        for &root in nodes {
            if index.contains_key(&root) {
                continue;
            }
            // Iterative Tarjan: (node, next edge to explore).
            let mut work: Vec<(usize, usize)> = vec![(root, 0)];
            index.insert(root, counter);
            low.insert(root, counter);
            counter += 1;
            stack.push(root);
            on_stack.insert(root);
            while let Some(&mut (v, ref mut e)) = work.last_mut() {
                if *e < k {
                    let sym = *e;
                    *e += 1;
                    if !enabled[v * k + sym] {
                        continue;
                    }
                    let w = self.delta[v][sym];
                    if !inside.contains(&w) {
                        continue;
                    }
                    if let std::collections::hash_map::Entry::Vacant(slot) = index.entry(w) {
                        slot.insert(counter);
                        low.insert(w, counter);
                        counter += 1;
                        stack.push(w);
                        on_stack.insert(w);
                        work.push((w, 0));
                    } else if on_stack.contains(&w) {
                        let m = low[&v].min(index[&w]);
                        low.insert(v, m);
                    }
                } else {
                    work.pop();
                    if let Some(&(u, _)) = work.last() {
                        let m = low[&u].min(low[&v]);
                        low.insert(u, m);
                    }
                    if low[&v] == index[&v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack.remove(&w);
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        out.push(comp);
                    }
                }
            }
        }
        out
    }

    /// Finds every maximal sub-component in which some cycle satisfies the
    /// clause (all listed tracks even). Returns `(nodes, enabled edges,
    /// edges that must be visited)` per component.
    fn good_components(
        &self,
        nodes: &[usize],
        clause: &[usize],
        enabled: &mut Vec<bool>,
        out: &mut Vec<GoodComponent>,
    ) {
        let k = self.symbols.len();
        for comp in self.sccs(nodes, enabled) {
            let members: HashSet<usize> = comp.iter().copied().collect();
            let internal: Vec<(usize, usize)> = comp
                .iter()
                .flat_map(|&q| (0..k).map(move |s| (q, s)))
                .filter(|&(q, s)| enabled[q * k + s] && members.contains(&self.delta[q][s]))
                .collect();
            if internal.is_empty() {
                continue;
            }
            let mut bad = None;
            let mut required = Vec::new();
            for &t in clause {
                let (&(q, s), m) = internal
                    .iter()
                    .map(|e| (e, self.colors[e.0][e.1][t]))
                    .max_by_key(|&(_, c)| c)
                    .unwrap();
                if m % 2 == 1 {
                    bad = Some((t, m));
                    break;
                }
                required.push((q, s));
            }
            match bad {
                None => {
                    if required.is_empty() {
                        required.push(internal[0]);
                    }
                    let mut local = vec![false; enabled.len()];
                    for &(q, s) in &internal {
                        local[q * k + s] = true;
                    }
                    out.push((comp, local, required));
                }
                Some((t, m)) => {
                    for &(q, s) in &internal {
                        if self.colors[q][s][t] == m {
                            enabled[q * k + s] = false;
                        }
                    }
                    self.good_components(&comp, clause, enabled, out);
                }
            }
        }
    }

    fn all_good_components(&self) -> Vec<GoodComponent> {
        let nodes: Vec<usize> = (0..self.num_states()).collect();
        let mut out = Vec::new();
        for clause in self.acceptance.dnf() {
            let mut enabled = vec![true; self.num_states() * self.symbols.len()];
            self.good_components(&nodes, &clause, &mut enabled, &mut out);
        }
        out
    }

    /// Shortest path of symbol indexes from `from` to `to` over enabled edges
    /// (all edges when `enabled` is `None`).
    fn path(&self, from: usize, to: usize, enabled: Option<&[bool]>) -> Option<Vec<usize>> {
        let k = self.symbols.len();
        let mut prev: HashMap<usize, (usize, usize)> = HashMap::new();
        let mut queue = VecDeque::from([from]);
        let mut seen = HashSet::from([from]);
        while let Some(q) = queue.pop_front() {
            if q == to {
                let mut syms = Vec::new();
                let mut cur = to;
                while cur != from {
                    let (p, s) = prev[&cur];
                    syms.push(s);
                    cur = p;
                }
                syms.reverse();
                return Some(syms);
            }
            for s in 0..k {
                if enabled.is_some_and(|e| !e[q * k + s]) {
                    continue;
                }
                let w = self.delta[q][s];
                if seen.insert(w) {
                    prev.insert(w, (q, s));
                    queue.push_back(w);
                }
            }
        }
        None
    }

    fn reachable_from(&self, q: usize) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        seen[q] = true;
        let mut stack = vec![q];
        while let Some(p) = stack.pop() {
            for &w in &self.delta[p] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// An accepted lasso from state `q`, or `None` when the residual language
    /// is empty.
    pub fn find_accepted_from(&self, q: usize) -> Option<RawLasso<S>> {
        let reach = self.reachable_from(q);
        let mut best: Option<RawLasso<S>> = None;
        for (comp, local, required) in self.all_good_components() {
            if !reach[comp[0]] {
                continue;
            }
            let base = required[0].0;
            let stem = self.path(q, base, None).expect("reachable component");
            let mut cycle = Vec::new();
            let mut cur = base;
            for &(p, s) in &required {
                cycle.extend(self.path(cur, p, Some(&local)).expect("strongly connected"));
                cycle.push(s);
                cur = self.delta[p][s];
            }
            cycle.extend(self.path(cur, base, Some(&local)).expect("strongly connected"));
            let cand = (
                stem.into_iter().map(|i| self.symbols[i]).collect::<Vec<_>>(),
                cycle.into_iter().map(|i| self.symbols[i]).collect::<Vec<_>>(),
            );
            let better = match &best {
                None => true,
                Some((s, c)) => cand.0.len() + cand.1.len() < s.len() + c.len(),
            };
            if better {
                best = Some(cand);
            }
        }
        best
    }

    pub fn find_accepted(&self) -> Option<RawLasso<S>> {
        self.find_accepted_from(self.initial)
    }

    /// States whose residual language is non-empty.
    pub fn live_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut live = vec![false; n];
        let mut queue = VecDeque::new();
        for (comp, _, _) in self.all_good_components() {
            for q in comp {
                if !live[q] {
                    live[q] = true;
                    queue.push_back(q);
                }
            }
        }
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (q, row) in self.delta.iter().enumerate() {
            for &w in row {
                preds[w].push(q);
            }
        }
        while let Some(q) = queue.pop_front() {
            for &p in &preds[q] {
                if !live[p] {
                    live[p] = true;
                    queue.push_back(p);
                }
            }
        }
        live
    }
}
