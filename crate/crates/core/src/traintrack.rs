//! Trivalent train-track neighborhoods, maximal trees and their left/right data.
//!
//! Local model. A switch is drawn vertically with its tie pointing up (the
//! canonical orientation). The big port faces west, `small_first` is the lower
//! east port and `small_second` the upper east port, so the cusp of the switch
//! sits between the two small ports. A rectangle is [0,1]×[0,1] with `end0` at
//! x=0 and `end1` at x=1, glued by orientation-preserving maps. Gluing `end0` to
//! a big port or `end1` to a small port needs a half turn, which flips ties.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrackError {
    #[error("genus must be at least 2, got {0}")]
    BadGenus(usize),
    #[error("duplicate switch id {0}")]
    DuplicateSwitch(u32),
    #[error("duplicate rectangle id {0}")]
    DuplicateRectangle(u32),
    #[error("rectangle {rect} references unknown switch {switch}")]
    UnknownSwitch { rect: u32, switch: u32 },
    #[error("port {port} of switch {switch} is used by more than one rectangle end")]
    PortCollision { switch: u32, port: Port },
    #[error("port {port} of switch {switch} is not used")]
    PortUnused { switch: u32, port: Port },
    #[error("complementary cell {cell} has {cusps} cusps instead of 3")]
    CellShape { cell: usize, cusps: usize },
    #[error("surface is disconnected")]
    Disconnected,
    #[error("declared genus {declared} but Euler characteristic gives {computed}")]
    GenusMismatch { declared: usize, computed: String },
    #[error("fixture search exhausted for genus {0}")]
    SearchExhausted(usize),
    #[error("unknown rectangle id {0} in tree")]
    UnknownRectangle(u32),
    #[error("tree edge set contains a cycle through rectangle {0}")]
    TreeCycle(u32),
    #[error("tree edge set does not span all switches")]
    TreeNotSpanning,
    #[error("tree edge set is not connected to its root")]
    TreeDisconnected,
    #[error("root bit must be 0 or 1")]
    BadRootBit,
}

impl TrackError {
    pub fn code(&self) -> &'static str {
        match self {
            TrackError::BadGenus(_) => "bad_genus",
            TrackError::DuplicateSwitch(_) => "duplicate_switch",
            TrackError::DuplicateRectangle(_) => "duplicate_rectangle",
            TrackError::UnknownSwitch { .. } => "unknown_switch",
            TrackError::PortCollision { .. } => "port_collision",
            TrackError::PortUnused { .. } => "port_unused",
            TrackError::CellShape { .. } => "cell_shape",
            TrackError::Disconnected => "disconnected",
            TrackError::GenusMismatch { .. } => "genus_mismatch",
            TrackError::SearchExhausted(_) => "search_exhausted",
            TrackError::UnknownRectangle(_) => "unknown_rectangle",
            TrackError::TreeCycle(_) => "tree_cycle",
            TrackError::TreeNotSpanning => "tree_not_spanning",
            TrackError::TreeDisconnected => "tree_disconnected",
            TrackError::BadRootBit => "bad_root_bit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Port {
    Big,
    SmallFirst,
    SmallSecond,
}

impl Port {
    pub const ALL: [Port; 3] = [Port::Big, Port::SmallFirst, Port::SmallSecond];

    pub fn index(self) -> usize {
        match self {
            Port::Big => 0,
            Port::SmallFirst => 1,
            Port::SmallSecond => 2,
        }
    }

    pub fn from_index(k: usize) -> Port {
        Port::ALL[k % 3]
    }

    /// Counterclockwise successor around the switch.
    pub fn next(self) -> Port {
        Port::from_index(self.index() + 1)
    }

    pub fn is_big(self) -> bool {
        self == Port::Big
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Port::Big => "big",
            Port::SmallFirst => "small_first",
            Port::SmallSecond => "small_second",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SwitchRec {
    pub id: u32,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EndRec {
    pub switch: u32,
    pub port: Port,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RectRec {
    pub id: u32,
    pub end0: EndRec,
    pub end1: EndRec,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TreeSpec {
    pub edges: Vec<u32>,
    pub root: u32,
    pub root_bit: u8,
}

/// The train-track file format.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TrainTrack {
    pub genus: usize,
    pub switches: Vec<SwitchRec>,
    pub rectangles: Vec<RectRec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<TreeSpec>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ValidationReport {
    pub genus: usize,
    pub switches: usize,
    pub rectangles: usize,
    pub plaques: usize,
    pub euler_characteristic: i64,
}

/// A validated track with dense indices. Switch `s` owns ports `3s..3s+3`.
#[derive(Debug, Clone)]
pub struct Track {
    pub raw: TrainTrack,
    pub genus: usize,
    pub switch_ids: Vec<u32>,
    pub rect_ids: Vec<u32>,
    /// Per rectangle, (switch, port) of end0 and end1.
    pub ends: Vec<[(usize, Port); 2]>,
    /// Per port id, (rectangle, end).
    pub port_rect: Vec<(usize, usize)>,
    /// Cusp switches of each plaque, counterclockwise.
    pub plaques: Vec<[usize; 3]>,
    pub switch_plaque: Vec<usize>,
}

pub fn port_id(s: usize, p: Port) -> usize {
    3 * s + p.index()
}

pub fn port_switch(q: usize) -> usize {
    q / 3
}

pub fn port_kind(q: usize) -> Port {
    Port::from_index(q % 3)
}

fn next_port(q: usize) -> usize {
    3 * (q / 3) + (q % 3 + 1) % 3
}

/// Cycles of the face permutation q ↦ partner(next(q)). Each cycle keeps the
/// face on its right and so meets the cusps in clockwise order.
fn face_cycles(partner: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; partner.len()];
    let mut out = Vec::new();
    for start in 0..partner.len() {
        if seen[start] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut q = start;
        while !seen[q] {
            seen[q] = true;
            cyc.push(q);
            q = partner[next_port(q)];
        }
        out.push(cyc);
    }
    out
}

fn connected(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    let mut comps = n;
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            comps -= 1;
        }
    }
    comps <= 1
}

impl Track {
    pub fn new(raw: TrainTrack) -> Result<Self, TrackError> {
        if raw.genus < 2 {
            return Err(TrackError::BadGenus(raw.genus));
        }
        let mut sw_index = HashMap::new();
        for (n, s) in raw.switches.iter().enumerate() {
            if sw_index.insert(s.id, n).is_some() {
                return Err(TrackError::DuplicateSwitch(s.id));
            }
        }
        let nsw = raw.switches.len();
        let mut rect_seen = BTreeSet::new();
        let mut port_rect: Vec<Option<(usize, usize)>> = vec![None; 3 * nsw];
        let mut ends = Vec::with_capacity(raw.rectangles.len());
        for (r, rec) in raw.rectangles.iter().enumerate() {
            if !rect_seen.insert(rec.id) {
                return Err(TrackError::DuplicateRectangle(rec.id));
            }
            let mut pair = [(0, Port::Big); 2];
            for (e, end) in [rec.end0, rec.end1].iter().enumerate() {
                let s = *sw_index
                    .get(&end.switch)
                    .ok_or(TrackError::UnknownSwitch { rect: rec.id, switch: end.switch })?;
                let q = port_id(s, end.port);
                if port_rect[q].is_some() {
                    return Err(TrackError::PortCollision { switch: end.switch, port: end.port });
                }
                port_rect[q] = Some((r, e));
                pair[e] = (s, end.port);
            }
            ends.push(pair);
        }
        let mut pr = Vec::with_capacity(port_rect.len());
        for (q, slot) in port_rect.iter().enumerate() {
            match slot {
                Some(x) => pr.push(*x),
                None => {
                    return Err(TrackError::PortUnused {
                        switch: raw.switches[port_switch(q)].id,
                        port: port_kind(q),
                    })
                }
            }
        }
        let partner: Vec<usize> = (0..3 * nsw)
            .map(|q| {
                let (r, e) = pr[q];
                let (s, p) = ends[r][1 - e];
                port_id(s, p)
            })
            .collect();

        let mut plaques = Vec::new();
        let mut switch_plaque = vec![usize::MAX; nsw];
        for (cell, cyc) in face_cycles(&partner).iter().enumerate() {
            let cusps: Vec<usize> = cyc
                .iter()
                .filter(|&&q| port_kind(q) == Port::SmallFirst)
                .map(|&q| port_switch(q))
                .collect();
            if cusps.len() != 3 {
                return Err(TrackError::CellShape { cell, cusps: cusps.len() });
            }
            for &s in &cusps {
                switch_plaque[s] = plaques.len();
            }
            plaques.push([cusps[0], cusps[2], cusps[1]]);
        }

        if !connected(nsw, ends.iter().map(|e| (e[0].0, e[1].0))) {
            return Err(TrackError::Disconnected);
        }
        let chi = nsw as i64 - ends.len() as i64 + plaques.len() as i64;
        if chi % 2 != 0 || 2 - chi != 2 * raw.genus as i64 {
            let computed = if chi % 2 == 0 {
                ((2 - chi) / 2).to_string()
            } else {
                format!("non-integer (χ={chi})")
            };
            return Err(TrackError::GenusMismatch { declared: raw.genus, computed });
        }

        Ok(Track {
            genus: raw.genus,
            switch_ids: raw.switches.iter().map(|s| s.id).collect(),
            rect_ids: raw.rectangles.iter().map(|r| r.id).collect(),
            ends,
            port_rect: pr,
            plaques,
            switch_plaque,
            raw,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, TrackFileError> {
        let raw: TrainTrack = serde_json::from_str(text).map_err(|e| TrackFileError::Parse {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?;
        Track::new(raw).map_err(TrackFileError::Invalid)
    }

    pub fn nsw(&self) -> usize {
        self.switch_ids.len()
    }

    pub fn nrect(&self) -> usize {
        self.rect_ids.len()
    }

    pub fn partner(&self, q: usize) -> usize {
        let (r, e) = self.port_rect[q];
        let (s, p) = self.ends[r][1 - e];
        port_id(s, p)
    }

    pub fn rect_at(&self, q: usize) -> (usize, usize) {
        self.port_rect[q]
    }

    pub fn switch_index(&self, id: u32) -> Option<usize> {
        self.switch_ids.iter().position(|&x| x == id)
    }

    pub fn rect_index(&self, id: u32) -> Option<usize> {
        self.rect_ids.iter().position(|&x| x == id)
    }

    /// Position of switch t in its plaque's counterclockwise list.
    fn plaque_slot(&self, t: usize) -> (usize, usize) {
        let p = self.switch_plaque[t];
        let k = self.plaques[p].iter().position(|&x| x == t).unwrap();
        (p, k)
    }

    /// t₊: the next cusp of t's plaque in clockwise order.
    pub fn t_plus(&self, t: usize) -> usize {
        let (p, k) = self.plaque_slot(t);
        self.plaques[p][(k + 2) % 3]
    }

    /// t₋: the cusp after t₊ in clockwise order.
    pub fn t_minus(&self, t: usize) -> usize {
        let (p, k) = self.plaque_slot(t);
        self.plaques[p][(k + 1) % 3]
    }

    pub fn report(&self) -> ValidationReport {
        ValidationReport {
            genus: self.genus,
            switches: self.nsw(),
            rectangles: self.nrect(),
            plaques: self.plaques.len(),
            euler_characteristic: self.nsw() as i64 - self.nrect() as i64
                + self.plaques.len() as i64,
        }
    }
}

#[derive(Debug, Error)]
pub enum TrackFileError {
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error(transparent)]
    Invalid(#[from] TrackError),
}

pub fn validate(track: &TrainTrack) -> Result<ValidationReport, TrackError> {
    Track::new(track.clone()).map(|t| t.report())
}

struct Search {
    partner: Vec<usize>,
    nodes: usize,
    budget: usize,
}

const UNPAIRED: usize = usize::MAX;

impl Search {
    /// Open chains as (start, tip, cusp count), or None if some closed face
    /// does not have exactly three cusps or an open chain has more than three.
    fn chains(&self) -> Option<Vec<(usize, usize, usize)>> {
        let n = self.partner.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if self.partner[s] != UNPAIRED {
                continue;
            }
            let mut q = s;
            let mut sf = 0;
            loop {
                seen[q] = true;
                if port_kind(q) == Port::SmallFirst {
                    sf += 1;
                }
                let nq = next_port(q);
                if self.partner[nq] == UNPAIRED {
                    break;
                }
                q = self.partner[nq];
            }
            if sf > 3 {
                return None;
            }
            out.push((s, q, sf));
        }
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut q = s;
            let mut sf = 0;
            while !seen[q] {
                seen[q] = true;
                if port_kind(q) == Port::SmallFirst {
                    sf += 1;
                }
                q = self.partner[next_port(q)];
            }
            if sf != 3 {
                return None;
            }
        }
        Some(out)
    }

    fn run<R: Rng>(&mut self, rng: &mut R) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        let chains = self.chains()?;
        if chains.is_empty() {
            let nsw = self.partner.len() / 3;
            let edges = (0..self.partner.len()).map(|q| (port_switch(q), port_switch(self.partner[q])));
            return Some(connected(nsw, edges));
        }
        let best = chains.iter().map(|c| c.2).max().unwrap();
        let pool: Vec<_> = chains.iter().filter(|c| c.2 == best).collect();
        let &(start, tip, sf) = pool[rng.gen_range(0..pool.len())];
        let u = next_port(tip);
        let mut cands: Vec<usize> = (0..self.partner.len())
            .filter(|&q| self.partner[q] == UNPAIRED && port_switch(q) != port_switch(u))
            .collect();
        cands.shuffle(rng);
        if sf == 3 {
            if let Some(i) = cands.iter().position(|&q| q == start) {
                cands.swap(0, i);
            }
        }
        for q in cands {
            self.partner[u] = q;
            self.partner[q] = u;
            let ok = self.chains().is_some();
            if ok {
                match self.run(rng) {
                    Some(true) => return Some(true),
                    None => {
                        self.partner[u] = UNPAIRED;
                        self.partner[q] = UNPAIRED;
                        return None;
                    }
                    Some(false) => {}
                }
            }
            self.partner[u] = UNPAIRED;
            self.partner[q] = UNPAIRED;
        }
        Some(false)
    }
}

/// Seeded randomized backtracking over port pairings; the result is certified
/// by `Track::new`.
pub fn generate_fixture(g: usize, seed: u64) -> Result<TrainTrack, TrackError> {
    if g < 2 {
        return Err(TrackError::BadGenus(g));
    }
    let nsw = 12 * g - 12;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let mut search = Search { partner: vec![UNPAIRED; 3 * nsw], nodes: 0, budget: 20_000 };
        if search.run(&mut rng) != Some(true) {
            continue;
        }
        let mut rectangles = Vec::new();
        for q in 0..3 * nsw {
            let p = search.partner[q];
            if q < p {
                let id = rectangles.len() as u32;
                rectangles.push(RectRec {
                    id,
                    end0: EndRec { switch: port_switch(q) as u32, port: port_kind(q) },
                    end1: EndRec { switch: port_switch(p) as u32, port: port_kind(p) },
                });
            }
        }
        let raw = TrainTrack {
            genus: g,
            switches: (0..nsw as u32).map(|id| SwitchRec { id }).collect(),
            rectangles,
            tree: None,
        };
        Track::new(raw.clone())?;
        return Ok(raw);
    }
    Err(TrackError::SearchExhausted(g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// 1 when the gluing of this rectangle end is a half turn.
pub fn end_flip(end: usize, port: Port) -> u8 {
    match (end, port.is_big()) {
        (0, true) | (1, false) => 1,
        _ => 0,
    }
}

/// Whether tie orientation flips across rectangle r.
pub fn transport_flip(track: &Track, r: usize) -> u8 {
    let [(_, p0), (_, p1)] = track.ends[r];
    end_flip(0, p0) ^ end_flip(1, p1)
}

/// A tree of stumpy switches and rectangles with a tie orientation o(s)
/// (0 canonical, 1 reversed) on each of its switches.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedTree {
    pub edges: Vec<bool>,
    pub members: Vec<bool>,
    pub root: usize,
    pub root_bit: u8,
    pub o: Vec<u8>,
}

#[derive(Debug, Clone)]
pub enum TreeChoice {
    Seeded(u64),
    /// Rectangle indices, root switch index, root bit.
    Explicit { edges: Vec<usize>, root: usize, root_bit: u8 },
}

impl OrientedTree {
    /// Tree spanned by `edges` containing `root`; `spanning` demands every switch.
    pub fn from_edges(
        track: &Track,
        edges: &[usize],
        root: usize,
        root_bit: u8,
        spanning: bool,
    ) -> Result<Self, TrackError> {
        if root_bit > 1 {
            return Err(TrackError::BadRootBit);
        }
        let nsw = track.nsw();
        let mut in_tree = vec![false; track.nrect()];
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nsw];
        for &r in edges {
            if r >= track.nrect() {
                return Err(TrackError::UnknownRectangle(r as u32));
            }
            let [(a, _), (b, _)] = track.ends[r];
            if in_tree[r] || a == b {
                return Err(TrackError::TreeCycle(track.rect_ids[r]));
            }
            in_tree[r] = true;
            adj[a].push(r);
            adj[b].push(r);
        }
        let mut o = vec![0u8; nsw];
        let mut members = vec![false; nsw];
        members[root] = true;
        o[root] = root_bit;
        let mut queue = VecDeque::from([root]);
        let mut used = 0;
        while let Some(s) = queue.pop_front() {
            for &r in &adj[s] {
                let [(a, _), (b, _)] = track.ends[r];
                let other = if a == s { b } else { a };
                if members[other] {
                    continue;
                }
                members[other] = true;
                o[other] = o[s] ^ transport_flip(track, r);
                used += 1;
                queue.push_back(other);
            }
        }
        if used != edges.len() {
            let outside = edges.iter().any(|&r| {
                let [(a, _), (b, _)] = track.ends[r];
                !(members[a] && members[b])
            });
            return Err(if outside {
                TrackError::TreeDisconnected
            } else {
                TrackError::TreeCycle(track.rect_ids[edges[0]])
            });
        }
        if spanning && members.iter().any(|&m| !m) {
            return Err(TrackError::TreeNotSpanning);
        }
        Ok(OrientedTree { edges: in_tree, members, root, root_bit, o })
    }

    /// The single stumpy switch `s` with orientation `bit`.
    pub fn stumpy(track: &Track, s: usize, bit: u8) -> Result<Self, TrackError> {
        OrientedTree::from_edges(track, &[], s, bit, false)
    }

    pub fn edge_list(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&r| self.edges[r]).collect()
    }

    pub fn is_maximal(&self) -> bool {
        self.members.iter().all(|&m| m)
    }

    pub fn reversed(&self) -> Self {
        let mut t = self.clone();
        t.root_bit ^= 1;
        for (b, &m) in t.o.iter_mut().zip(&self.members) {
            if m {
                *b ^= 1;
            }
        }
        t
    }

    pub fn to_spec(&self, track: &Track) -> TreeSpec {
        TreeSpec {
            edges: self.edge_list().iter().map(|&r| track.rect_ids[r]).collect(),
            root: track.switch_ids[self.root],
            root_bit: self.root_bit,
        }
    }

    pub fn from_spec(track: &Track, spec: &TreeSpec) -> Result<Self, TrackError> {
        let edges = spec
            .edges
            .iter()
            .map(|&id| track.rect_index(id).ok_or(TrackError::UnknownRectangle(id)))
            .collect::<Result<Vec<_>, _>>()?;
        let root = track
            .switch_index(spec.root)
            .ok_or(TrackError::UnknownSwitch { rect: u32::MAX, switch: spec.root })?;
        OrientedTree::from_edges(track, &edges, root, spec.root_bit, true)
    }
}

pub fn maximal_tree(track: &Track, choice: &TreeChoice) -> Result<OrientedTree, TrackError> {
    match choice {
        TreeChoice::Explicit { edges, root, root_bit } => {
            OrientedTree::from_edges(track, edges, *root, *root_bit, true)
        }
        TreeChoice::Seeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let nsw = track.nsw();
            let root = rng.gen_range(0..nsw);
            let root_bit = rng.gen_range(0..2u8);
            let mut order: Vec<usize> = (0..track.nrect()).collect();
            order.shuffle(&mut rng);
            let mut parent: Vec<usize> = (0..nsw).collect();
            fn find(p: &mut [usize], mut x: usize) -> usize {
                while p[x] != x {
                    p[x] = p[p[x]];
                    x = p[x];
                }
                x
            }
            let mut edges = Vec::new();
            for r in order {
                let [(a, _), (b, _)] = track.ends[r];
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                    edges.push(r);
                }
            }
            edges.sort();
            OrientedTree::from_edges(track, &edges, root, root_bit, true)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RectClass {
    Tree,
    Orientable,
    ULeft,
    URight,
    /// Not both ends on the tree (only for non-maximal trees).
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Exit {
    pub rect: usize,
    pub end: usize,
    pub switch: usize,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub rect_class: Vec<RectClass>,
    pub orientable: Vec<usize>,
    pub u_left: Vec<usize>,
    pub u_right: Vec<usize>,
    pub s_left: Vec<usize>,
    pub s_right: Vec<usize>,
    pub e_left: Vec<Exit>,
    pub e_right: Vec<Exit>,
    /// Side class of each tree switch.
    pub switch_side: Vec<Option<Side>>,
}

/// Side of the tree on which the exit through `port` leaves, given o(s).
pub fn exit_side(port: Port, o: u8) -> Side {
    match (port.is_big(), o) {
        (true, 0) | (false, 1) => Side::Left,
        _ => Side::Right,
    }
}

/// Side class of a vertical boundary component: right iff o is canonical.
pub fn switch_side(o: u8) -> Side {
    if o == 0 {
        Side::Right
    } else {
        Side::Left
    }
}

pub fn classify(track: &Track, tree: &OrientedTree) -> Classification {
    let mut c = Classification {
        rect_class: vec![RectClass::Outside; track.nrect()],
        orientable: vec![],
        u_left: vec![],
        u_right: vec![],
        s_left: vec![],
        s_right: vec![],
        e_left: vec![],
        e_right: vec![],
        switch_side: vec![None; track.nsw()],
    };
    for s in 0..track.nsw() {
        if tree.members[s] {
            let side = switch_side(tree.o[s]);
            c.switch_side[s] = Some(side);
            match side {
                Side::Left => c.s_left.push(s),
                Side::Right => c.s_right.push(s),
            }
        }
    }
    for r in 0..track.nrect() {
        let [(s0, p0), (s1, p1)] = track.ends[r];
        if tree.edges[r] {
            c.rect_class[r] = RectClass::Tree;
            continue;
        }
        for (e, (s, p)) in [(s0, p0), (s1, p1)].into_iter().enumerate() {
            if tree.members[s] {
                let exit = Exit { rect: r, end: e, switch: s, side: exit_side(p, tree.o[s]) };
                match exit.side {
                    Side::Left => c.e_left.push(exit),
                    Side::Right => c.e_right.push(exit),
                }
            }
        }
        if !(tree.members[s0] && tree.members[s1]) {
            continue;
        }
        if tree.o[s1] == tree.o[s0] ^ transport_flip(track, r) {
            c.rect_class[r] = RectClass::Orientable;
            c.orientable.push(r);
        } else {
            let a = exit_side(p0, tree.o[s0]);
            debug_assert_eq!(a, exit_side(p1, tree.o[s1]));
            match a {
                Side::Left => {
                    c.rect_class[r] = RectClass::ULeft;
                    c.u_left.push(r);
                }
                Side::Right => {
                    c.rect_class[r] = RectClass::URight;
                    c.u_right.push(r);
                }
            }
        }
    }
    c
}

impl Classification {
    pub fn unorientable(&self) -> Vec<usize> {
        let mut u: Vec<usize> = self.u_left.iter().chain(&self.u_right).copied().collect();
        u.sort();
        u
    }

    /// Non-tree rectangles with both ends on the tree, in index order.
    pub fn free_rects(&self) -> Vec<usize> {
        (0..self.rect_class.len())
            .filter(|&r| {
                matches!(
                    self.rect_class[r],
                    RectClass::Orientable | RectClass::ULeft | RectClass::URight
                )
            })
            .collect()
    }

    pub fn side_of(&self, s: usize) -> Side {
        self.switch_side[s].expect("switch not on tree")
    }

    /// The same data with left and right exchanged.
    pub fn swapped(&self) -> Self {
        let flip = |c: RectClass| match c {
            RectClass::ULeft => RectClass::URight,
            RectClass::URight => RectClass::ULeft,
            x => x,
        };
        let fe = |v: &[Exit]| v.iter().map(|e| Exit { side: e.side.flip(), ..*e }).collect();
        Classification {
            rect_class: self.rect_class.iter().map(|&c| flip(c)).collect(),
            orientable: self.orientable.clone(),
            u_left: self.u_right.clone(),
            u_right: self.u_left.clone(),
            s_left: self.s_right.clone(),
            s_right: self.s_left.clone(),
            e_left: fe(&self.e_right),
            e_right: fe(&self.e_left),
            switch_side: self.switch_side.iter().map(|s| s.map(Side::flip)).collect(),
        }
    }
}

/// Chosen lifts on the orientation cover. A lift is (item, bit); for a switch
/// the bit is its tie orientation, for a rectangle the tie orientation in the
/// rectangle's own frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverLifts {
    /// Bit of R° per rectangle (None for rectangles leaving a non-maximal tree).
    pub rect_lift: Vec<Option<u8>>,
    /// Bit of t° (= o(t)) per switch of the tree.
    pub t_o: Vec<Option<u8>>,
    /// Bit of t^cw per switch: the canonical orientation.
    pub t_cw: Vec<u8>,
}

impl CoverLifts {
    pub fn in_m(&self, s: usize, bit: u8) -> bool {
        self.t_o[s] == Some(bit)
    }
}

/// Bit of the switch lift carrying rectangle lift (r, b) at `end`.
pub fn lift_at_end(track: &Track, r: usize, b: u8, end: usize) -> (usize, u8) {
    let (s, p) = track.ends[r][end];
    (s, b ^ end_flip(end, p))
}

/// Forward and backward ends of the core curve of lift (r, b): the curve
/// crosses each tie from its right to its left.
pub fn core_ends(b: u8) -> (usize, usize) {
    if b == 0 {
        (0, 1)
    } else {
        (1, 0)
    }
}

pub fn orientation_cover(track: &Track, tree: &OrientedTree, class: &Classification) -> CoverLifts {
    let mut rect_lift = vec![None; track.nrect()];
    for r in 0..track.nrect() {
        let (s0, p0) = track.ends[r][0];
        rect_lift[r] = match class.rect_class[r] {
            RectClass::Tree | RectClass::Orientable => Some(tree.o[s0] ^ end_flip(0, p0)),
            RectClass::ULeft | RectClass::URight => Some(0),
            RectClass::Outside => None,
        };
    }
    CoverLifts {
        rect_lift,
        t_o: (0..track.nsw()).map(|s| tree.members[s].then_some(tree.o[s])).collect(),
        t_cw: vec![0; track.nsw()],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Step {
    Leaf,
    Switch { switch: usize, side: Side, plaque: usize },
    Rectangle { rect: usize, end: usize, switch: usize, side: Side },
}

/// Counterclockwise loop around the tree, with leaf steps between the
/// switch and rectangle steps.
pub fn boundary_walk(track: &Track, tree: &OrientedTree) -> Vec<Step> {
    let mut out = Vec::new();
    let q0 = port_id(tree.root, Port::Big);
    let mut q = q0;
    loop {
        let (r, e) = track.rect_at(q);
        let s = port_switch(q);
        let arrive = if tree.edges[r] {
            track.partner(q)
        } else {
            out.push(Step::Leaf);
            out.push(Step::Rectangle {
                rect: r,
                end: e,
                switch: s,
                side: exit_side(port_kind(q), tree.o[s]),
            });
            q
        };
        if port_kind(arrive) == Port::SmallFirst {
            let t = port_switch(arrive);
            out.push(Step::Leaf);
            out.push(Step::Switch {
                switch: t,
                side: switch_side(tree.o[t]),
                plaque: track.switch_plaque[t],
            });
        }
        q = next_port(arrive);
        if q == q0 {
            break;
        }
    }
    out
}

/// Track, maximal tree and all derived data.
#[derive(Debug, Clone)]
pub struct Frame {
    pub track: Track,
    pub tree: OrientedTree,
    pub class: Classification,
    pub cover: CoverLifts,
}

impl Frame {
    pub fn new(track: Track, tree: OrientedTree) -> Self {
        let class = classify(&track, &tree);
        let cover = orientation_cover(&track, &tree, &class);
        Frame { track, tree, class, cover }
    }

    pub fn seeded(track: Track, seed: u64) -> Result<Self, TrackError> {
        let tree = maximal_tree(&track, &TreeChoice::Seeded(seed))?;
        Ok(Frame::new(track, tree))
    }

    /// Uses the tree stored in the track file if present, else a seeded one.
    pub fn from_track(track: Track, seed: u64) -> Result<Self, TrackError> {
        match track.raw.tree.clone() {
            Some(spec) => {
                let tree = OrientedTree::from_spec(&track, &spec)?;
                Ok(Frame::new(track, tree))
            }
            None => Frame::seeded(track, seed),
        }
    }
}
