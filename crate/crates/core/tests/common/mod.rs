//! Independent oracles for integration tests. Nothing here calls the solvers
//! or the library's cost matrix.

#![allow(dead_code)]

use jra::instance::{generate_random_instance, InstanceGenerator, ProblemInstance};
use jra::model::MipModel;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn node_point(inst: &ProblemInstance, v: usize) -> (f64, f64) {
    let n = inst.items.len();
    let p = if v < n { inst.items[v] } else { inst.placeholders[v - n] };
    (p.x, p.y)
}

pub fn dist(inst: &ProblemInstance, u: usize, v: usize) -> f64 {
    let (a, b) = (node_point(inst, u), node_point(inst, v));
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn fits(inst: &ProblemInstance, item: usize, p: usize) -> bool {
    match (&inst.item_types, &inst.placeholder_types) {
        (Some(it), Some(pt)) => it[item] == pt[p - inst.items.len()],
        _ => true,
    }
}

/// Tour length straight from coordinates, closing edge included.
pub fn tour_length(inst: &ProblemInstance, nodes: &[usize]) -> f64 {
    let k = nodes.len();
    (0..k).map(|i| dist(inst, nodes[i], nodes[(i + 1) % k])).sum()
}

/// Minimum over every section-respecting item order and every injective,
/// type-respecting placement on the non-start placeholders.
pub fn brute_force(inst: &ProblemInstance) -> f64 {
    brute_force_tour(inst).0
}

pub fn brute_force_tour(inst: &ProblemInstance) -> (f64, Vec<usize>) {
    let (best, _) = search(inst, false);
    best
}

/// Every valid tour as a node sequence `[start, i, p, ..., stop]`.
pub fn all_tours(inst: &ProblemInstance) -> Vec<Vec<usize>> {
    search(inst, true).1
}

fn search(inst: &ProblemInstance, collect: bool) -> ((f64, Vec<usize>), Vec<Vec<usize>>) {
    let n = inst.items.len();
    let start = n + inst.placeholders.len() - 1;
    let stop = n - 1;
    let blocks: Vec<Vec<usize>> =
        if inst.sections.is_empty() { vec![(0..n - 1).collect()] } else { inst.sections.clone() };

    struct Search<'a> {
        inst: &'a ProblemInstance,
        blocks: Vec<Vec<usize>>,
        start: usize,
        stop: usize,
        used_item: Vec<bool>,
        used_ph: Vec<bool>,
        path: Vec<usize>,
        best: (f64, Vec<usize>),
        all: Option<Vec<Vec<usize>>>,
    }
    impl Search<'_> {
        fn go(&mut self, block: usize, left: usize, cost: f64) {
            if block == self.blocks.len() {
                let last = *self.path.last().unwrap();
                let total = cost + dist(self.inst, last, self.stop) + dist(self.inst, self.stop, self.start);
                let mut nodes = self.path.clone();
                nodes.push(self.stop);
                if let Some(all) = &mut self.all {
                    all.push(nodes.clone());
                }
                if total < self.best.0 {
                    self.best = (total, nodes);
                }
                return;
            }
            if left == 0 {
                let next = self.blocks.get(block + 1).map_or(0, Vec::len);
                self.go(block + 1, next, cost);
                return;
            }
            let cur = *self.path.last().unwrap();
            let n = self.inst.items.len();
            for k in 0..self.blocks[block].len() {
                let i = self.blocks[block][k];
                if self.used_item[i] {
                    continue;
                }
                self.used_item[i] = true;
                for p in n..self.start {
                    if self.used_ph[p - n] || !fits(self.inst, i, p) {
                        continue;
                    }
                    self.used_ph[p - n] = true;
                    self.path.push(i);
                    self.path.push(p);
                    let step = dist(self.inst, cur, i) + dist(self.inst, i, p);
                    self.go(block, left - 1, cost + step);
                    self.path.truncate(self.path.len() - 2);
                    self.used_ph[p - n] = false;
                }
                self.used_item[i] = false;
            }
        }
    }

    let first = blocks.first().map_or(0, Vec::len);
    let mut s = Search {
        inst,
        blocks,
        start,
        stop,
        used_item: vec![false; n],
        used_ph: vec![false; inst.placeholders.len()],
        path: vec![start],
        best: (f64::INFINITY, Vec::new()),
        all: collect.then(Vec::new),
    };
    if n == 1 {
        s.best = (2.0 * dist(inst, stop, start), vec![start, stop]);
        return (s.best, vec![vec![start, stop]]);
    }
    s.go(0, first, 0.0);
    (s.best, s.all.unwrap_or_default())
}

/// A uniformly drawn section-respecting order with a random injective,
/// type-respecting placement.
pub fn random_tour(inst: &ProblemInstance, rng: &mut impl Rng) -> Vec<usize> {
    let n = inst.items.len();
    let start = n + inst.placeholders.len() - 1;
    let blocks: Vec<Vec<usize>> =
        if inst.sections.is_empty() { vec![(0..n - 1).collect()] } else { inst.sections.clone() };
    let mut nodes = vec![start];
    let mut free: Vec<usize> = (n..start).collect();
    for mut block in blocks {
        block.shuffle(rng);
        for i in block {
            let options: Vec<usize> = free.iter().copied().filter(|&p| fits(inst, i, p)).collect();
            let p = *options.choose(rng).expect("instance admits a placement");
            free.retain(|&q| q != p);
            nodes.push(i);
            nodes.push(p);
        }
    }
    nodes.push(n - 1);
    nodes
}

/// `y_ij = 1` exactly when some placeholder sits between `i` and `j`, with
/// every value exactly 0 or 1.
pub fn y_matches_products(model: &MipModel, values: &[f64]) -> bool {
    let n = model.n_items();
    let nn = model.n_nodes();
    let one = |v: Option<usize>| v.is_some_and(|id| values[id] == 1.0);
    for i in 0..n {
        for j in 0..n {
            let Some(y) = model.y_var(i, j) else { continue };
            if values[y] != 0.0 && values[y] != 1.0 {
                return false;
            }
            let chained = (n..nn).any(|p| one(model.x_var(i, p)) && one(model.x_var(p, j)));
            if (values[y] == 1.0) != chained {
                return false;
            }
        }
    }
    true
}

/// Random partition of `total` items into 1..=`max_parts` nonempty sections.
pub fn random_sizes(rng: &mut impl Rng, total: usize, max_parts: usize) -> Vec<usize> {
    if total == 0 {
        return Vec::new();
    }
    let parts = rng.gen_range(1..=max_parts.min(total));
    let mut cuts: Vec<usize> = (1..total).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
    cuts.sort_unstable();
    let mut sizes = Vec::new();
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(total)) {
        sizes.push(c - prev);
        prev = c;
    }
    sizes
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn general(n: usize, n_p: usize, seed: u64) -> ProblemInstance {
    generate_random_instance(n, &[], n_p, seed).unwrap()
}

pub fn sectioned(n: usize, n_p: usize, seed: u64) -> ProblemInstance {
    let sizes = random_sizes(&mut rng(seed ^ 0xabcd), n - 1, 3);
    generate_random_instance(n, &sizes, n_p, seed).unwrap()
}

pub fn two_type(n: usize, n_p: usize, sizes: Vec<usize>, seed: u64) -> ProblemInstance {
    InstanceGenerator::new(n, sizes, n_p, seed).types(2).generate().unwrap()
}

/// Edges `u -> v` of the cyclic node sequence.
pub fn cycle_edges(nodes: &[usize]) -> Vec<(usize, usize)> {
    let k = nodes.len();
    (0..k).map(|i| (nodes[i], nodes[(i + 1) % k])).collect()
}
