use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{MatchingError, MatchingState, NONE};
use crate::graph::{ColouredGraph, Edge, Vertex};

/// Which family an exchange belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchingMove {
    /// Add an edge between two unmatched vertices, delete a repeated colour.
    InsideLeftover,
    /// Swap matching edges for edges into the leftover set along a chain.
    Chain,
    /// Split a matching edge whose ends both reach the leftover set.
    TwoRound,
}

/// Edge swaps that keep the matching size and add at least one colour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingExchange {
    pub removed: Vec<Edge>,
    pub added: Vec<Edge>,
    pub kind: MatchingMove,
    pub delta: i64,
    /// Distinct colours of the matching the plan was computed on.
    pub base_colours: usize,
    /// Longest trace-back chain used by the plan.
    pub chain_len: usize,
}

/// Colour levels grown from the unused colours through edges into the
/// leftover set. A matching edge's colour enters level `i` when one of its
/// ends has an edge of a level `i − 1` colour to an unmatched vertex.
#[derive(Debug, Clone)]
pub struct MatchingLadder {
    level: Vec<u32>,
    /// Per colour: (matched end, unmatched vertex, entry colour).
    witness: Vec<(u32, u32, u32)>,
    /// Colours in discovery order.
    order: Vec<u32>,
    /// Per matched vertex: lowest-level (level, unmatched vertex, colour) entry.
    best_entry: Vec<(u32, u32, u32)>,
    levels: usize,
}

impl MatchingLadder {
    pub fn level(&self, colour: usize) -> Option<usize> {
        let l = self.level[colour];
        (l != NONE).then_some(l as usize)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// `(matched end, unmatched vertex, entry colour)` that lifted `colour`.
    pub fn witness(&self, colour: usize) -> Option<(Vertex, Vertex, usize)> {
        let (x, z, c) = self.witness[colour];
        (x != NONE).then_some((x as usize, z as usize, c as usize))
    }

    pub fn size(&self, i: usize) -> usize {
        self.level.iter().filter(|&&l| l != NONE && (l as usize) <= i).count()
    }

    #[cfg(test)]
    pub(crate) fn forget_witness(&mut self, colour: usize) {
        self.witness[colour] = (NONE, NONE, NONE);
    }
}

pub fn build_matching_ladder(g: &ColouredGraph, st: &MatchingState) -> MatchingLadder {
    let k = g.num_colours();
    let unmatched = st.unmatched();
    // Entries bucketed by colour: (matched end, unmatched vertex).
    let mut offsets = vec![0usize; k + 1];
    for &z in &unmatched {
        for (x, c) in g.incident(z) {
            if st.is_matched(x) {
                offsets[c + 1] += 1;
            }
        }
    }
    for i in 0..k {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let mut entries = vec![(0u32, 0u32); offsets[k]];
    for &z in &unmatched {
        for (x, c) in g.incident(z) {
            if st.is_matched(x) {
                entries[cursor[c]] = (x as u32, z as u32);
                cursor[c] += 1;
            }
        }
    }
    drop(cursor);

    let mut level = vec![NONE; k];
    let mut witness = vec![(NONE, NONE, NONE); k];
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    for c in 0..k {
        if st.counts()[c] == 0 {
            level[c] = 0;
            queue.push_back(c);
        }
    }
    let mut levels = 0;
    while let Some(c) = queue.pop_front() {
        for &(x, z) in &entries[offsets[c]..offsets[c + 1]] {
            let y = st.mate(x as usize).unwrap();
            let target = g.edge_colour_index(x as usize, y).unwrap();
            if level[target] == NONE {
                level[target] = level[c] + 1;
                levels = levels.max(level[target] as usize);
                witness[target] = (x, z, c as u32);
                order.push(target as u32);
                queue.push_back(target);
            }
        }
    }

    let mut best_entry = vec![(NONE, NONE, NONE); g.n()];
    for c in 0..k {
        if level[c] == NONE {
            continue;
        }
        for &(x, z) in &entries[offsets[c]..offsets[c + 1]] {
            let cand = (level[c], z, c as u32);
            if cand < best_entry[x as usize] {
                best_entry[x as usize] = cand;
            }
        }
    }
    MatchingLadder {
        level,
        witness,
        order,
        best_entry,
        levels,
    }
}

/// Plan under construction: edits on top of an unchanged matching.
struct Draft<'a> {
    g: &'a ColouredGraph,
    st: &'a MatchingState,
    removed: Vec<Edge>,
    added: Vec<Edge>,
    touched: Vec<(usize, i32)>,
    longest: usize,
}

impl<'a> Draft<'a> {
    fn new(g: &'a ColouredGraph, st: &'a MatchingState) -> Self {
        Draft {
            g,
            st,
            removed: Vec::new(),
            added: Vec::new(),
            touched: Vec::new(),
            longest: 0,
        }
    }

    fn bump(&mut self, c: usize, d: i32) {
        match self.touched.iter_mut().find(|(t, _)| *t == c) {
            Some(e) => e.1 += d,
            None => self.touched.push((c, d)),
        }
    }

    fn delta(&self, c: usize) -> i32 {
        self.touched.iter().find(|(t, _)| *t == c).map_or(0, |e| e.1)
    }

    fn new_count(&self, c: usize) -> i64 {
        self.st.counts()[c] as i64 + self.delta(c) as i64
    }

    fn is_removed(&self, e: Edge) -> bool {
        self.removed.contains(&e)
    }

    fn busy(&self, v: Vertex) -> bool {
        self.added.iter().any(|e| e.touches(v))
    }

    fn remove(&mut self, a: Vertex, b: Vertex) {
        let e = Edge::new(a, b);
        self.removed.push(e);
        self.bump(self.g.edge_colour_index(a, b).unwrap(), -1);
    }

    fn add(&mut self, a: Vertex, b: Vertex) {
        self.added.push(Edge::new(a, b));
        self.bump(self.g.edge_colour_index(a, b).unwrap(), 1);
    }

    fn colour_change(&self) -> i64 {
        self.touched
            .iter()
            .map(|&(c, d)| {
                let old = self.st.counts()[c] as i64;
                ((old + d as i64) > 0) as i64 - (old > 0) as i64
            })
            .sum()
    }

    /// An unmatched, not yet used vertex joined to `p` by a colour below
    /// `below`, lowest level first. Colours already supplied by this plan
    /// from the unused pool are skipped.
    fn entry_from(&self, ladder: &MatchingLadder, p: Vertex, below: u32) -> Option<(Vertex, usize)> {
        let mut best: Option<(u32, Vertex, usize)> = None;
        for (w, c) in self.g.incident(p) {
            let l = ladder.level[c];
            if l >= below || self.st.is_matched(w) || self.busy(w) || (l == 0 && self.delta(c) > 0) {
                continue;
            }
            if best.is_none_or(|(bl, _, _)| l < bl) {
                best = Some((l, w, c));
                if l == 0 {
                    break;
                }
            }
        }
        best.map(|(_, w, c)| (w, c))
    }

    /// Replaces the carrier of `chi` by an edge into the leftover set, then
    /// the carrier of that edge's colour, and so on down to an unused colour.
    fn resupply(&mut self, ladder: &MatchingLadder, mut chi: usize, cap: usize) -> bool {
        let mut steps = 0;
        loop {
            let lv = ladder.level[chi];
            if lv == NONE {
                return false;
            }
            if lv == 0 {
                self.longest = self.longest.max(steps);
                return true;
            }
            steps += 1;
            if steps > cap {
                return false;
            }
            let (x, z, col) = ladder.witness[chi];
            if x == NONE {
                return false;
            }
            let x = x as usize;
            let y = self.st.mate(x).unwrap();
            if self.is_removed(Edge::new(x, y)) {
                return false;
            }
            let (z, col) = (z as usize, col as usize);
            let stale = self.busy(z) || (ladder.level[col] == 0 && self.delta(col) > 0);
            let (p, z, col) = if !stale {
                (x, z, col)
            } else {
                let a = self.entry_from(ladder, x, lv).map(|(w, c)| (x, w, c));
                let b = self.entry_from(ladder, y, lv).map(|(w, c)| (y, w, c));
                match (a, b) {
                    (Some(a), Some(b)) => {
                        if ladder.level[b.2] < ladder.level[a.2] {
                            b
                        } else {
                            a
                        }
                    }
                    (Some(a), None) => a,
                    (None, Some(b)) => b,
                    (None, None) => return false,
                }
            };
            self.remove(x, y);
            self.add(p, z);
            chi = col;
        }
    }

    /// Deletes one edge of a repeated colour when the plan grew the matching.
    fn rebalance(&mut self, dups: &[usize]) -> bool {
        if self.added.len() == self.removed.len() {
            return true;
        }
        debug_assert_eq!(self.added.len(), self.removed.len() + 1);
        let mut candidates: Vec<usize> = dups.to_vec();
        candidates.extend(self.touched.iter().map(|&(c, _)| c));
        for c in candidates {
            if self.new_count(c) < 2 {
                continue;
            }
            if let Some(e) = self.added.iter().copied().find(|e| self.g.edge_colour_index(e.u, e.v) == Some(c)) {
                // Keep the plan minimal: undo an addition of a repeated colour.
                let pos = self.added.iter().position(|&f| f == e).unwrap();
                self.added.remove(pos);
                self.bump(c, -1);
                return true;
            }
            let carrier = self
                .g
                .colour_class_by_index(c)
                .find(|e| self.st.mate(e.u) == Some(e.v) && !self.is_removed(*e));
            if let Some(e) = carrier {
                self.remove(e.u, e.v);
                return true;
            }
        }
        // Nothing repeats: dropping the last addition still keeps the gain of the others.
        match self.added.pop() {
            Some(e) => {
                self.bump(self.g.edge_colour_index(e.u, e.v).unwrap(), -1);
                true
            }
            None => false,
        }
    }

    fn finish(mut self, kind: MatchingMove, dups: &[usize]) -> Option<MatchingExchange> {
        if !self.rebalance(dups) {
            return None;
        }
        let delta = self.colour_change();
        (delta >= 1).then(|| MatchingExchange {
            removed: self.removed,
            added: self.added,
            kind,
            delta,
            base_colours: self.st.distinct_colours(),
            chain_len: self.longest,
        })
    }
}

fn repeated_colours(st: &MatchingState) -> Vec<usize> {
    (0..st.counts().len()).filter(|&c| st.counts()[c] >= 2).collect()
}

/// Moves that need no ladder: an unused-colour edge inside the leftover set,
/// or a single swap replacing a repeated-colour edge by an unused-colour edge.
fn direct_move(g: &ColouredGraph, st: &MatchingState, unmatched: &[Vertex], dups: &[usize]) -> Option<MatchingExchange> {
    let counts = st.counts();
    let h = st.half();
    if !dups.is_empty() {
        for &z in unmatched.iter().take_while(|&&z| z < h) {
            for (w, c) in g.incident(z) {
                if counts[c] == 0 && !st.is_matched(w) {
                    let mut d = Draft::new(g, st);
                    d.add(z, w);
                    if let Some(plan) = d.finish(MatchingMove::InsideLeftover, dups) {
                        return Some(plan);
                    }
                }
            }
        }
        for &z in unmatched {
            for (x, c) in g.incident(z) {
                if counts[c] != 0 {
                    continue;
                }
                let Some(y) = st.mate(x) else { continue };
                if counts[g.edge_colour_index(x, y).unwrap()] >= 2 {
                    let mut d = Draft::new(g, st);
                    d.remove(x, y);
                    d.add(x, z);
                    return d.finish(MatchingMove::Chain, dups);
                }
            }
        }
    }
    None
}

fn ladder_move(
    g: &ColouredGraph,
    st: &MatchingState,
    ladder: &MatchingLadder,
    unmatched: &[Vertex],
    dups: &[usize],
    cap: usize,
) -> Option<MatchingExchange> {
    let counts = st.counts();
    // Repeated colours reachable through the ladder.
    for &chi in &ladder.order {
        let chi = chi as usize;
        if counts[chi] >= 2 {
            let mut d = Draft::new(g, st);
            if d.resupply(ladder, chi, cap) {
                if let Some(plan) = d.finish(MatchingMove::Chain, dups) {
                    return Some(plan);
                }
            }
        }
    }
    // Leftover edges of a ladder colour: add, then trace the colour back.
    if !dups.is_empty() {
        for &z in unmatched.iter().take_while(|&&z| z < st.half()) {
            for (w, c) in g.incident(z) {
                let l = ladder.level[c];
                if st.is_matched(w) || l == 0 || l == NONE {
                    continue;
                }
                let mut d = Draft::new(g, st);
                d.add(z, w);
                if d.resupply(ladder, c, cap) {
                    if let Some(plan) = d.finish(MatchingMove::Chain, dups) {
                        return Some(plan);
                    }
                }
            }
        }
    }
    // Matching edges whose two ends both reach the leftover set.
    let alt = |v: Vertex, avoid: u32| {
        g.incident(v)
            .filter(|&(w, c)| !st.is_matched(w) && ladder.level[c] != NONE && c as u32 != avoid)
            .min_by_key(|&(w, c)| (ladder.level[c], w))
            .map(|(w, c)| (ladder.level[c], w as u32, c as u32))
    };
    for x in 0..st.half() {
        let Some(y) = st.mate(x) else { continue };
        let (bx, by) = (ladder.best_entry[x], ladder.best_entry[y]);
        if bx.0 == NONE || by.0 == NONE {
            continue;
        }
        let pairs = if bx.2 != by.2 {
            vec![(bx, by)]
        } else {
            [alt(y, bx.2).map(|e| (bx, e)), alt(x, by.2).map(|e| (e, by))].into_iter().flatten().collect()
        };
        for (ex, ey) in pairs {
            let mut d = Draft::new(g, st);
            d.remove(x, y);
            d.add(x, ex.1 as usize);
            d.add(y, ey.1 as usize);
            if d.resupply(ladder, ex.2 as usize, cap) && d.resupply(ladder, ey.2 as usize, cap) {
                if let Some(plan) = d.finish(MatchingMove::TwoRound, dups) {
                    return Some(plan);
                }
            }
        }
    }
    None
}

/// First improving exchange: direct moves, then chains through the ladder,
/// then two-round splits of a matching edge. Chains longer than `cap` are
/// abandoned.
pub fn find_matching_exchange(g: &ColouredGraph, st: &MatchingState, cap: usize) -> Option<MatchingExchange> {
    let unmatched = st.unmatched();
    let dups = repeated_colours(st);
    if let Some(plan) = direct_move(g, st, &unmatched, &dups) {
        return Some(plan);
    }
    let ladder = build_matching_ladder(g, st);
    ladder_move(g, st, &ladder, &unmatched, &dups, cap)
}

pub(crate) fn apply_in_place(g: &ColouredGraph, st: &mut MatchingState, plan: &MatchingExchange) -> Result<(), MatchingError> {
    if st.distinct_colours() != plan.base_colours {
        return Err(MatchingError::PlanStale);
    }
    if plan.removed.iter().any(|e| st.mate(e.u) != Some(e.v)) {
        return Err(MatchingError::PlanStale);
    }
    let (size, before) = (st.size(), st.distinct_colours());
    for e in &plan.removed {
        st.remove(g, e.u, e.v);
    }
    for e in &plan.added {
        if st.is_matched(e.u) || st.is_matched(e.v) || !g.has_edge(e.u, e.v) {
            return Err(MatchingError::InvariantBroken(format!("cannot add {}-{}", e.u, e.v)));
        }
        st.add(g, e.u, e.v);
    }
    if st.size() != size {
        return Err(MatchingError::InvariantBroken(format!("size moved from {size} to {}", st.size())));
    }
    if st.distinct_colours() as i64 != before as i64 + plan.delta {
        return Err(MatchingError::InvariantBroken("colour gain differs from the plan".into()));
    }
    Ok(())
}

/// Applies `plan` to a copy of `st`.
pub fn apply_matching_exchange(
    g: &ColouredGraph,
    st: &MatchingState,
    plan: &MatchingExchange,
) -> Result<MatchingState, MatchingError> {
    let mut next = st.clone();
    apply_in_place(g, &mut next, plan)?;
    Ok(next)
}
