//! Graphs, colour lists, the plain-text instance format and generators.
//!
//! Vertices are `0..n` internally and `1..=n` in every file format.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Colour, Error, Result};

/// Simple undirected graph. Edges keep their input order for serialization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        let mut seen = HashSet::with_capacity(edges.len());
        for &(u, v) in &edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w + 1, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u + 1));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::DuplicateEdge(u + 1, v + 1));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Graph { n, edges, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbours in increasing vertex order.
    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &u in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    queue.push_back(u);
                }
            }
        }
        count == self.n
    }

    pub fn is_tree(&self) -> bool {
        self.n >= 1 && self.edges.len() == self.n - 1 && self.is_connected()
    }
}

/// Per-vertex ordered colour lists. Position `p` (1-based) of a list is the
/// `p`-th entry in this order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColourLists(Vec<Vec<Colour>>);

impl ColourLists {
    pub fn new(n: usize, lists: Vec<Vec<Colour>>) -> Result<Self> {
        if lists.len() != n {
            return Err(Error::Invalid(format!(
                "{} lists for {n} vertices",
                lists.len()
            )));
        }
        for (v, list) in lists.iter().enumerate() {
            let mut seen = HashSet::with_capacity(list.len());
            for &c in list {
                if c == 0 || c as usize > n {
                    return Err(Error::ColourOutOfRange {
                        vertex: v + 1,
                        colour: u64::from(c),
                        n,
                    });
                }
                if !seen.insert(c) {
                    return Err(Error::RepeatedColour { vertex: v + 1, colour: c });
                }
            }
        }
        Ok(ColourLists(lists))
    }

    pub fn get(&self, v: usize) -> &[Colour] {
        &self.0[v]
    }

    /// The colour at 1-based position `p`, if it exists.
    pub fn at(&self, v: usize, p: u64) -> Option<Colour> {
        if p == 0 {
            return None;
        }
        self.0[v].get((p - 1) as usize).copied()
    }

    /// 1-based position of `c` in `L(v)`, or 0 when absent.
    pub fn position(&self, v: usize, c: Colour) -> u64 {
        self.0[v]
            .iter()
            .position(|&x| x == c)
            .map_or(0, |i| i as u64 + 1)
    }

    pub fn len_of(&self, v: usize) -> usize {
        self.0[v].len()
    }

    pub fn total_len(&self) -> usize {
        self.0.iter().map(Vec::len).sum()
    }
}

/// A graph together with its colour lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: Graph,
    pub lists: ColourLists,
}

impl Instance {
    pub fn new(graph: Graph, lists: Vec<Vec<Colour>>) -> Result<Self> {
        let lists = ColourLists::new(graph.n(), lists)?;
        Ok(Instance { graph, lists })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn is_tree(&self) -> bool {
        self.graph.is_tree()
    }

    pub fn require_tree(&self) -> Result<()> {
        if self.is_tree() {
            Ok(())
        } else {
            Err(Error::NotATree(format!(
                "{} vertices, {} edges, connected={}",
                self.n(),
                self.graph.edges().len(),
                self.graph.is_connected()
            )))
        }
    }

    /// Keeps only the first `d(v)+1` colours of every list.
    pub fn truncated_to_degree(&self) -> Instance {
        let lists = (0..self.n())
            .map(|v| {
                let keep = self.graph.degree(v) + 1;
                self.lists.get(v).iter().copied().take(keep).collect()
            })
            .collect();
        Instance {
            graph: self.graph.clone(),
            lists: ColourLists(lists),
        }
    }
}

struct Tokens<'a> {
    iter: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let iter = text
            .lines()
            .enumerate()
            .flat_map(|(i, line)| line.split_whitespace().map(move |t| (i + 1, t)));
        Tokens {
            iter: Box::new(iter),
            last_line: 0,
        }
    }

    fn next_u64(&mut self, what: &str) -> Result<u64> {
        match self.iter.next() {
            Some((line, tok)) => {
                self.last_line = line;
                tok.parse::<u64>().map_err(|_| Error::Syntax {
                    line,
                    msg: format!("expected {what}, found {tok:?}"),
                })
            }
            None => Err(Error::Syntax {
                line: self.last_line + 1,
                msg: format!("unexpected end of input, expected {what}"),
            }),
        }
    }

    fn next_usize(&mut self, what: &str) -> Result<usize> {
        self.next_u64(what).map(|x| x as usize)
    }

    /// A 1-based index in `1..=n`, returned 0-based.
    fn next_index(&mut self, n: usize, what: &str) -> Result<usize> {
        let x = self.next_usize(what)?;
        if x == 0 || x > n {
            return Err(Error::Syntax {
                line: self.last_line,
                msg: format!("{what} {x} out of range 1..={n}"),
            });
        }
        Ok(x - 1)
    }

    fn finish(mut self) -> Result<()> {
        match self.iter.next() {
            Some((line, tok)) => Err(Error::Syntax {
                line,
                msg: format!("trailing token {tok:?}"),
            }),
            None => Ok(()),
        }
    }
}

/// Parses the text instance format: `n m`, `m` edge lines, then `n` list
/// lines `k c1 … ck`. An edge count of `n-1` declares a tree.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut tok = Tokens::new(text);
    let n = tok.next_usize("vertex count")?;
    let m = tok.next_usize("edge count")?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let u = tok.next_usize("edge endpoint")?;
        let v = tok.next_usize("edge endpoint")?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        for w in [u, v] {
            if w == 0 || w > n {
                return Err(Error::VertexOutOfRange { vertex: w, n });
            }
        }
        edges.push((u - 1, v - 1));
    }
    let mut lists = Vec::with_capacity(n);
    for v in 0..n {
        let k = tok.next_usize("list length")?;
        let mut list = Vec::with_capacity(k);
        for _ in 0..k {
            let c = tok.next_u64("colour")?;
            if c == 0 || c > n as u64 {
                return Err(Error::ColourOutOfRange { vertex: v + 1, colour: c, n });
            }
            list.push(c as Colour);
        }
        lists.push(list);
    }
    tok.finish()?;
    let graph = Graph::new(n, edges)?;
    let inst = Instance::new(graph, lists)?;
    if n >= 1 && m == n - 1 {
        inst.require_tree()?;
    }
    Ok(inst)
}

pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", inst.n(), inst.graph.edges().len());
    for &(u, v) in inst.graph.edges() {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    for v in 0..inst.n() {
        let list = inst.lists.get(v);
        out.push_str(&list.len().to_string());
        for c in list {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
    }
    out
}

/// Parameters for the random tree generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSpec {
    pub n: usize,
    pub min_list: usize,
    pub max_list: usize,
    /// Colours are drawn from `1..=palette` (clamped to `n`).
    pub palette: usize,
}

impl RandomSpec {
    pub fn new(n: usize, max_list: usize) -> Self {
        RandomSpec {
            n,
            min_list: 0,
            max_list,
            palette: n,
        }
    }
}

/// Random tree: vertex `i` gets a uniform parent among `1..i`; every list
/// has a uniform size in `0..=max_list` over colours `1..=n`.
pub fn random_instance(n: usize, max_list: usize, seed: u64) -> Instance {
    random_instance_with(RandomSpec::new(n, max_list), seed)
}

pub fn random_instance_with(spec: RandomSpec, seed: u64) -> Instance {
    assert!(spec.n >= 1, "random instance needs n >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = (1..spec.n).map(|i| (rng.gen_range(0..i), i)).collect();
    let lists = random_lists(&mut rng, spec.n, spec.min_list, spec.max_list, spec.palette);
    Instance::new(Graph::new(spec.n, edges).expect("generated tree"), lists)
        .expect("generated lists")
}

fn random_lists(
    rng: &mut ChaCha8Rng,
    n: usize,
    min_list: usize,
    max_list: usize,
    palette: usize,
) -> Vec<Vec<Colour>> {
    let palette = palette.clamp(1, n.max(1));
    (0..n)
        .map(|_| {
            let hi = max_list.min(palette);
            let lo = min_list.min(hi);
            let size = rng.gen_range(lo..=hi);
            sample(rng, palette, size)
                .into_iter()
                .map(|c| c as Colour + 1)
                .collect()
        })
        .collect()
}

/// Tree-partition: a tree over bags whose bags partition the vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreePartition {
    pub bags: Vec<Vec<usize>>,
    /// Edges of the shape tree over bag indices.
    pub shape: Vec<(usize, usize)>,
}

impl TreePartition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Every vertex in its own bag, shaped like the (tree) graph itself.
    pub fn trivial(graph: &Graph) -> TreePartition {
        TreePartition {
            bags: (0..graph.n()).map(|v| vec![v]).collect(),
            shape: graph.edges().to_vec(),
        }
    }

    /// One bag holding every vertex.
    pub fn single_bag(n: usize) -> TreePartition {
        TreePartition {
            bags: vec![(0..n).collect()],
            shape: Vec::new(),
        }
    }

    /// Bag index of every vertex. Assumes the partition is valid.
    pub fn bag_of(&self, n: usize) -> Vec<usize> {
        let mut owner = vec![usize::MAX; n];
        for (b, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                owner[v] = b;
            }
        }
        owner
    }

    /// Checks partition, bag nonemptiness, shape-tree validity and edge
    /// locality. Returns the width.
    pub fn validate(&self, graph: &Graph) -> Result<usize> {
        let b = self.bags.len();
        if b == 0 {
            return if graph.n() == 0 {
                Ok(0)
            } else {
                Err(Error::Partition("no bags".into()))
            };
        }
        let mut owner = vec![usize::MAX; graph.n()];
        for (i, bag) in self.bags.iter().enumerate() {
            if bag.is_empty() {
                return Err(Error::Partition(format!("bag {} is empty", i + 1)));
            }
            for &v in bag {
                if v >= graph.n() {
                    return Err(Error::Partition(format!(
                        "bag {} holds vertex {} outside 1..={}",
                        i + 1,
                        v + 1,
                        graph.n()
                    )));
                }
                if owner[v] != usize::MAX {
                    return Err(Error::Partition(format!(
                        "vertex {} is in bags {} and {}",
                        v + 1,
                        owner[v] + 1,
                        i + 1
                    )));
                }
                owner[v] = i;
            }
        }
        if let Some(v) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::Partition(format!("vertex {} is in no bag", v + 1)));
        }
        let shape = Graph::new(b, self.shape.clone())
            .map_err(|e| Error::Partition(format!("shape: {e}")))?;
        if !shape.is_tree() {
            return Err(Error::Partition("shape is not a tree".into()));
        }
        for &(u, v) in graph.edges() {
            let (bu, bv) = (owner[u], owner[v]);
            if bu != bv && !shape.has_edge(bu, bv) {
                return Err(Error::Partition(format!(
                    "edge {} {} spans non-adjacent bags {} and {}",
                    u + 1,
                    v + 1,
                    bu + 1,
                    bv + 1
                )));
            }
        }
        Ok(self.width())
    }
}

pub fn parse_partition(text: &str) -> Result<TreePartition> {
    let mut tok = Tokens::new(text);
    let b = tok.next_usize("bag count")?;
    let mut bags = Vec::with_capacity(b);
    for _ in 0..b {
        let s = tok.next_usize("bag size")?;
        let mut bag = Vec::with_capacity(s);
        for _ in 0..s {
            let v = tok.next_usize("bag vertex")?;
            if v == 0 {
                return Err(Error::Syntax {
                    line: tok.last_line,
                    msg: "vertex 0 in bag".into(),
                });
            }
            bag.push(v - 1);
        }
        bags.push(bag);
    }
    let mut shape = Vec::new();
    for _ in 1..b {
        let x = tok.next_index(b, "bag index")?;
        let y = tok.next_index(b, "bag index")?;
        shape.push((x, y));
    }
    tok.finish()?;
    Ok(TreePartition { bags, shape })
}

pub fn serialize_partition(tp: &TreePartition) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", tp.bags.len());
    for bag in &tp.bags {
        out.push_str(&bag.len().to_string());
        for v in bag {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    for &(x, y) in &tp.shape {
        let _ = writeln!(out, "{} {}", x + 1, y + 1);
    }
    out
}

/// Random graph with a tree-partition of width exactly `k` (when `bags ≥ 1`).
/// Bag 1 has size `k`; the others have uniform sizes in `1..=k`. Each
/// intra-bag pair and each pair across adjacent bags is an edge with
/// probability `edge_prob`; shape edges always get at least one graph edge.
pub fn random_partitioned_instance(
    bags: usize,
    k: usize,
    max_list: usize,
    palette: usize,
    edge_prob: f64,
    seed: u64,
) -> (Instance, TreePartition) {
    let spec = PartitionSpec {
        bags,
        k,
        min_list: 1,
        max_list,
        palette,
        edge_prob,
    };
    random_partitioned_instance_with(spec, seed)
}

/// Shape of a random width-`k` instance; the first bag is full.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionSpec {
    pub bags: usize,
    pub k: usize,
    pub min_list: usize,
    pub max_list: usize,
    pub palette: usize,
    pub edge_prob: f64,
}

pub fn random_partitioned_instance_with(spec: PartitionSpec, seed: u64) -> (Instance, TreePartition) {
    let PartitionSpec {
        bags,
        k,
        min_list,
        max_list,
        palette,
        edge_prob,
    } = spec;
    assert!(bags >= 1 && k >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sizes = vec![k];
    sizes.extend((1..bags).map(|_| rng.gen_range(1..=k)));
    let mut bag_sets = Vec::with_capacity(bags);
    let mut next = 0;
    for &s in &sizes {
        bag_sets.push((next..next + s).collect::<Vec<_>>());
        next += s;
    }
    let n = next;
    let shape: Vec<(usize, usize)> = (1..bags).map(|i| (rng.gen_range(0..i), i)).collect();
    let mut edges = Vec::new();
    for bag in &bag_sets {
        for (i, &u) in bag.iter().enumerate() {
            for &v in &bag[i + 1..] {
                if rng.gen_bool(edge_prob) {
                    edges.push((u, v));
                }
            }
        }
    }
    for &(a, b) in &shape {
        let mut any = false;
        for &u in &bag_sets[a] {
            for &v in &bag_sets[b] {
                if rng.gen_bool(edge_prob) {
                    edges.push((u, v));
                    any = true;
                }
            }
        }
        if !any {
            let u = bag_sets[a][rng.gen_range(0..bag_sets[a].len())];
            let v = bag_sets[b][rng.gen_range(0..bag_sets[b].len())];
            edges.push((u, v));
        }
    }
    let lists = random_lists(&mut rng, n, min_list, max_list, palette);
    let inst = Instance::new(Graph::new(n, edges).expect("generated graph"), lists)
        .expect("generated lists");
    (inst, TreePartition { bags: bag_sets, shape })
}

/// Multicoloured Clique: find one vertex per class, pairwise adjacent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulticolouredCliqueInstance {
    pub graph: Graph,
    pub classes: Vec<Vec<usize>>,
}

impl MulticolouredCliqueInstance {
    pub fn new(graph: Graph, classes: Vec<Vec<usize>>) -> Result<Self> {
        if classes.len() < 2 {
            return Err(Error::Clique(format!("k = {} < 2", classes.len())));
        }
        let mut owner = vec![usize::MAX; graph.n()];
        for (i, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err(Error::Clique(format!("class {} is empty", i + 1)));
            }
            for &v in class {
                if v >= graph.n() || owner[v] != usize::MAX {
                    return Err(Error::Clique(format!(
                        "vertex {} repeated or out of range",
                        v + 1
                    )));
                }
                owner[v] = i;
            }
        }
        if owner.contains(&usize::MAX) {
            return Err(Error::Clique("classes do not cover the vertex set".into()));
        }
        Ok(MulticolouredCliqueInstance { graph, classes })
    }

    pub fn k(&self) -> usize {
        self.classes.len()
    }

    fn class_of(&self) -> Vec<usize> {
        let mut owner = vec![0; self.graph.n()];
        for (i, class) in self.classes.iter().enumerate() {
            for &v in class {
                owner[v] = i;
            }
        }
        owner
    }

    /// Exhaustive search over one vertex per class.
    pub fn find_clique(&self) -> Option<Vec<usize>> {
        let mut choice = Vec::with_capacity(self.k());
        self.extend_clique(&mut choice).then_some(choice)
    }

    fn extend_clique(&self, choice: &mut Vec<usize>) -> bool {
        let i = choice.len();
        if i == self.k() {
            return true;
        }
        for &v in &self.classes[i] {
            if choice.iter().all(|&u| self.graph.has_edge(u, v)) {
                choice.push(v);
                if self.extend_clique(choice) {
                    return true;
                }
                choice.pop();
            }
        }
        false
    }

    /// Random instance: `k` classes of size `class_size`, each possible edge
    /// present with probability `edge_prob`.
    pub fn random(k: usize, class_size: usize, edge_prob: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = k * class_size;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(edge_prob) {
                    edges.push((u, v));
                }
            }
        }
        let classes = (0..k)
            .map(|i| (i * class_size..(i + 1) * class_size).collect())
            .collect();
        MulticolouredCliqueInstance::new(Graph::new(n, edges).expect("graph"), classes)
            .expect("classes")
    }
}

/// Text format: `n m k`, `m` edge lines, then `k` class lines `s v1 … vs`.
pub fn parse_clique_instance(text: &str) -> Result<MulticolouredCliqueInstance> {
    let mut tok = Tokens::new(text);
    let n = tok.next_usize("vertex count")?;
    let m = tok.next_usize("edge count")?;
    let k = tok.next_usize("class count")?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let u = tok.next_index(n, "edge endpoint")?;
        let v = tok.next_index(n, "edge endpoint")?;
        edges.push((u, v));
    }
    let mut classes = Vec::with_capacity(k);
    for _ in 0..k {
        let s = tok.next_usize("class size")?;
        let mut class = Vec::with_capacity(s);
        for _ in 0..s {
            class.push(tok.next_index(n, "class vertex")?);
        }
        classes.push(class);
    }
    tok.finish()?;
    MulticolouredCliqueInstance::new(Graph::new(n, edges)?, classes)
}

pub fn serialize_clique_instance(mc: &MulticolouredCliqueInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", mc.graph.n(), mc.graph.edges().len(), mc.k());
    for &(u, v) in mc.graph.edges() {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    for class in &mc.classes {
        out.push_str(&class.len().to_string());
        for v in class {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    out
}

/// Builds the list-colouring instance `H` whose colourings correspond to
/// multicoloured cliques of `mc`, plus its star-shaped tree-partition.
///
/// `H` has class vertices `1..=k` with `L(v_i) = V_i`, then one vertex per
/// non-edge `uv` of `G` with list `{u, v}` adjacent to the class vertices of
/// `u` and `v`. Colours must lie in `1..=|V(H)|`, so when `G` has more
/// vertices than `H` would, leaves with list `{1, 2}` hang off `v_1`; such a
/// leaf can always be coloured and changes nothing.
pub fn reduce_multicoloured_clique(
    mc: &MulticolouredCliqueInstance,
) -> Result<(Instance, TreePartition)> {
    let k = mc.k();
    if k < 2 {
        return Err(Error::Clique(format!("k = {k} < 2")));
    }
    let class_of = mc.class_of();
    let n_g = mc.graph.n();
    let mut lists: Vec<Vec<Colour>> = mc
        .classes
        .iter()
        .map(|class| class.iter().map(|&v| v as Colour + 1).collect())
        .collect();
    let mut edges = Vec::new();
    for u in 0..n_g {
        for v in u + 1..n_g {
            if mc.graph.has_edge(u, v) {
                continue;
            }
            let x = lists.len();
            lists.push(vec![u as Colour + 1, v as Colour + 1]);
            let (cu, cv) = (class_of[u], class_of[v]);
            edges.push((x, cu));
            if cv != cu {
                edges.push((x, cv));
            }
        }
    }
    while lists.len() < n_g {
        let x = lists.len();
        lists.push(vec![1, 2]);
        edges.push((x, 0));
    }
    let n_h = lists.len();
    let graph = Graph::new(n_h, edges)?;
    let inst = Instance::new(graph, lists)?;
    let mut bags = vec![(0..k).collect::<Vec<_>>()];
    let mut shape = Vec::new();
    for x in k..n_h {
        shape.push((0, bags.len()));
        bags.push(vec![x]);
    }
    Ok((inst, TreePartition { bags, shape }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_p2() {
        let inst = parse_instance("2 1\n1 2\n1 1\n1 1\n").unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(inst.lists.get(0), &[1]);
        assert_eq!(inst.lists.get(1), &[1]);
        assert!(inst.is_tree());
    }

    #[test]
    fn parses_single_vertex_empty_list() {
        let inst = parse_instance("1 0\n0\n").unwrap();
        assert_eq!(inst.n(), 1);
        assert!(inst.lists.get(0).is_empty());
        assert!(inst.is_tree());
    }

    #[test]
    fn rejects_self_loop() {
        let err = parse_instance("2 1\n1 1\n1 1\n1 1\n").unwrap_err();
        assert_eq!(err, Error::SelfLoop(1));
        assert!(err.to_string().contains("self-loop"));
    }

    #[test]
    fn reports_syntax_line() {
        let err = parse_instance("2 1\n1 x\n1 1\n1 1\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn rejects_duplicate_edge_and_bad_colour() {
        assert!(matches!(
            parse_instance("3 2\n1 2\n2 1\n0\n0\n0\n"),
            Err(Error::DuplicateEdge(..))
        ));
        assert!(matches!(
            parse_instance("2 1\n1 2\n1 3\n1 1\n"),
            Err(Error::ColourOutOfRange { .. })
        ));
        assert!(matches!(
            parse_instance("2 1\n1 2\n2 1 1\n1 1\n"),
            Err(Error::RepeatedColour { .. })
        ));
    }

    #[test]
    fn declared_tree_must_be_connected() {
        // 4 vertices, 3 edges, but a triangle plus an isolated vertex.
        let err = parse_instance("4 3\n1 2\n2 3\n1 3\n0\n0\n0\n0\n").unwrap_err();
        assert!(matches!(err, Error::NotATree(_)));
    }

    #[test]
    fn roundtrips() {
        let p2 = parse_instance("2 1\n1 2\n1 1\n1 1\n").unwrap();
        assert_eq!(parse_instance(&serialize_instance(&p2)).unwrap(), p2);
        let one = parse_instance("1 0\n0\n").unwrap();
        assert_eq!(parse_instance(&serialize_instance(&one)).unwrap(), one);
        let big = random_instance(1000, 5, 3);
        assert_eq!(parse_instance(&serialize_instance(&big)).unwrap(), big);
    }

    #[test]
    fn random_instances_are_trees_and_deterministic() {
        let one = random_instance(1, 0, 7);
        assert_eq!(one.n(), 1);
        assert!(one.lists.get(0).is_empty());
        assert_eq!(random_instance(50, 3, 1), random_instance(50, 3, 1));
        for seed in 1..=100 {
            let inst = random_instance(50, 3, seed);
            assert!(inst.is_tree());
            assert!((0..50).all(|v| inst.lists.len_of(v) <= 3));
        }
    }

    #[test]
    fn partition_roundtrip_and_validation() {
        let inst = random_instance(30, 2, 5);
        let tp = TreePartition::trivial(&inst.graph);
        assert_eq!(tp.validate(&inst.graph).unwrap(), 1);
        let text = serialize_partition(&tp);
        assert_eq!(parse_partition(&text).unwrap(), tp);

        // path 1-2-3 with bags {1},{2},{3} shaped as 1-3-2: edge 1 2 spans
        // bags 1 and 2 which are not adjacent.
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let bad = TreePartition {
            bags: vec![vec![0], vec![1], vec![2]],
            shape: vec![(0, 2), (2, 1)],
        };
        let err = bad.validate(&g).unwrap_err().to_string();
        assert!(err.contains("edge 1 2"), "{err}");
    }

    #[test]
    fn random_partitioned_instances_validate() {
        for k in 1..=3 {
            for seed in 0..20 {
                let (inst, tp) = random_partitioned_instance(12, k, 3, 4, 0.4, seed);
                assert_eq!(tp.validate(&inst.graph).unwrap(), k);
            }
        }
    }

    #[test]
    fn reduction_examples() {
        // complete G on two singleton classes: complement is empty
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let mc = MulticolouredCliqueInstance::new(g, vec![vec![0], vec![1]]).unwrap();
        let (h, tp) = reduce_multicoloured_clique(&mc).unwrap();
        assert_eq!(h.n(), 2);
        assert!(h.graph.edges().is_empty());
        assert_eq!(h.lists.get(0), &[1]);
        assert_eq!(h.lists.get(1), &[2]);
        assert_eq!(tp.validate(&h.graph).unwrap(), 2);

        let g = Graph::new(2, vec![]).unwrap();
        let mc = MulticolouredCliqueInstance::new(g, vec![vec![0], vec![1]]).unwrap();
        let (h, tp) = reduce_multicoloured_clique(&mc).unwrap();
        assert_eq!(h.n(), 3);
        assert_eq!(h.lists.get(2), &[1, 2]);
        assert!(h.graph.has_edge(2, 0) && h.graph.has_edge(2, 1));
        assert_eq!(tp.validate(&h.graph).unwrap(), 2);
    }

    #[test]
    fn reduction_rejects_single_class() {
        let g = Graph::new(2, vec![]).unwrap();
        assert!(MulticolouredCliqueInstance::new(g, vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn reduction_pads_colour_universe() {
        // dense G: few complement edges, so H needs padding leaves
        let mc = MulticolouredCliqueInstance::random(3, 3, 0.95, 11);
        let (h, tp) = reduce_multicoloured_clique(&mc).unwrap();
        assert!(h.n() >= mc.graph.n());
        assert_eq!(tp.validate(&h.graph).unwrap(), 3);
    }

    #[test]
    fn clique_format_roundtrip() {
        let mc = MulticolouredCliqueInstance::random(3, 2, 0.5, 4);
        let text = serialize_clique_instance(&mc);
        assert_eq!(parse_clique_instance(&text).unwrap(), mc);
    }
}
