//! Solver-neutral MIP formulations of the routing-assignment problem.
//!
//! Routing variables `x` exist only for item/placeholder pairs in both
//! directions. `a` couples items and placeholders, `c` selects placeholders
//! when there are more placeholders than items, and time-frame models add the
//! item graph `y`, positions `t` and chain variables `z` (`z[i][p][j] = 1`
//! when item `j` follows item `i` through placeholder `p`).
//!
//! Subtour elimination on `x` is never emitted statically. General models set
//! [`MipModel::lazy_subtour_enabled`] and rely on the solver's cut loop; in
//! time-frame models the MTZ ordering on `y` already rules subtours out.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::instance::{CostMatrix, ProblemInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    EdgeX { from: usize, to: usize },
    AssignA { item: usize, placeholder: usize },
    ItemEdgeY { from: usize, to: usize },
    SeqT { item: usize },
    SelectC { placeholder: usize },
    ChainZ { from: usize, placeholder: usize, to: usize },
}

impl VarKind {
    /// Column name used in MPS output.
    pub fn name(&self) -> String {
        match *self {
            VarKind::EdgeX { from, to } => format!("x_{from}_{to}"),
            VarKind::AssignA { item, placeholder } => format!("a_{item}_{placeholder}"),
            VarKind::ItemEdgeY { from, to } => format!("y_{from}_{to}"),
            VarKind::SeqT { item } => format!("t_{item}"),
            VarKind::SelectC { placeholder } => format!("c_{placeholder}"),
            VarKind::ChainZ { from, placeholder, to } => format!("z_{from}_{placeholder}_{to}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Integrality {
    Binary,
    Integer,
    Continuous,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarRef {
    pub id: usize,
    pub kind: VarKind,
    pub lo: f64,
    pub hi: f64,
    pub integrality: Integrality,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// Constraint family a row belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintTag {
    G1,
    G2,
    G3,
    G5,
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
    ADeg,
    ASel,
    BType,
    Link,
}

impl fmt::Display for ConstraintTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConstraintTag::G1 => "G1",
            ConstraintTag::G2 => "G2",
            ConstraintTag::G3 => "G3",
            ConstraintTag::G5 => "G5",
            ConstraintTag::C1 => "C1",
            ConstraintTag::C2 => "C2",
            ConstraintTag::C3 => "C3",
            ConstraintTag::C4 => "C4",
            ConstraintTag::C5 => "C5",
            ConstraintTag::C6 => "C6",
            ConstraintTag::C7 => "C7",
            ConstraintTag::C8 => "C8",
            ConstraintTag::ADeg => "A-deg",
            ConstraintTag::ASel => "A-sel",
            ConstraintTag::BType => "B-type",
            ConstraintTag::Link => "LINK",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinConstraint {
    pub name: String,
    pub tag: ConstraintTag,
    /// `(variable id, coefficient)`, ids unique within a row.
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LinConstraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v]).sum()
    }

    pub fn is_satisfied(&self, values: &[f64], tol: f64) -> bool {
        let lhs = self.activity(values);
        match self.sense {
            Sense::Le => lhs <= self.rhs + tol,
            Sense::Ge => lhs >= self.rhs - tol,
            Sense::Eq => (lhs - self.rhs).abs() <= tol,
        }
    }
}

/// How the item graph is tied to the routing variables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum C8Linearization {
    /// Chain variables `z[i][p][j]` with `sum_p z = y[i][j]`,
    /// `sum_j z = x[i][p]` and `sum_i z = x[p][j]`.
    #[default]
    Product,
    /// Only `x[i][p] + x[p][j] - 1 <= y[i][j]`.
    OneSided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelOptions {
    pub time_frame: bool,
    pub multi_type: bool,
    /// Emit `y[i][j] + y[j][i] <= 1` (time-frame models with at least 3 items).
    pub symmetry_breaking: bool,
    pub c8: C8Linearization,
    /// Fix positions to their section block and drop item-graph edges the
    /// section order forbids.
    pub tighten_sections: bool,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            time_frame: false,
            multi_type: false,
            symmetry_breaking: true,
            c8: C8Linearization::Product,
            tighten_sections: true,
        }
    }
}

impl ModelOptions {
    /// Variant implied by the instance: time frames when it has sections,
    /// multi-type when it carries types.
    pub fn for_instance(instance: &ProblemInstance) -> Self {
        Self {
            time_frame: instance.has_sections(),
            multi_type: instance.has_types(),
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Variant {
    pub time_frame: bool,
    pub extra_placeholders: bool,
    pub multi_type: bool,
    pub fixed_pair: bool,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.time_frame {
            parts.push("time-frame");
        }
        if self.extra_placeholders {
            parts.push("extra-placeholders");
        }
        if self.multi_type {
            parts.push("multi-type");
        }
        if parts.is_empty() {
            parts.push("general");
        }
        f.write_str(&parts.join("+"))
    }
}

#[derive(Clone, Debug)]
pub struct MipModel {
    pub name: String,
    pub variables: Vec<VarRef>,
    pub constraints: Vec<LinConstraint>,
    pub objective: Vec<(usize, f64)>,
    pub variant: Variant,
    pub lazy_subtour_enabled: bool,
    pub big_m: f64,
    n_items: usize,
    n_placeholders: usize,
    x_idx: Vec<Option<usize>>,
    a_idx: Vec<Option<usize>>,
    y_idx: Vec<Option<usize>>,
    t_idx: Vec<Option<usize>>,
    c_idx: Vec<Option<usize>>,
    z_idx: Vec<Option<usize>>,
}

impl MipModel {
    #[inline]
    pub fn n_items(&self) -> usize {
        self.n_items
    }

    #[inline]
    pub fn n_placeholders(&self) -> usize {
        self.n_placeholders
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.n_items + self.n_placeholders
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    /// Routing variable for the directed edge `from -> to` (global indices).
    pub fn x_var(&self, from: usize, to: usize) -> Option<usize> {
        let n = self.n_nodes();
        if from >= n || to >= n {
            return None;
        }
        self.x_idx[from * n + to]
    }

    pub fn a_var(&self, item: usize, placeholder: usize) -> Option<usize> {
        if item >= self.n_items || placeholder < self.n_items || placeholder >= self.n_nodes() {
            return None;
        }
        self.a_idx[item * self.n_placeholders + placeholder - self.n_items]
    }

    pub fn y_var(&self, from: usize, to: usize) -> Option<usize> {
        if from >= self.n_items || to >= self.n_items || self.y_idx.is_empty() {
            return None;
        }
        self.y_idx[from * self.n_items + to]
    }

    pub fn t_var(&self, item: usize) -> Option<usize> {
        self.t_idx.get(item).copied().flatten()
    }

    pub fn c_var(&self, placeholder: usize) -> Option<usize> {
        if placeholder < self.n_items {
            return None;
        }
        self.c_idx.get(placeholder - self.n_items).copied().flatten()
    }

    pub fn z_var(&self, from: usize, placeholder: usize, to: usize) -> Option<usize> {
        let (n, n_p) = (self.n_items, self.n_placeholders);
        if self.z_idx.is_empty() || from >= n || to >= n || placeholder < n || placeholder >= n + n_p
        {
            return None;
        }
        self.z_idx[(from * n_p + placeholder - n) * n + to]
    }

    /// All routing variables as `(from, to, id)`.
    pub fn edge_vars(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.variables.iter().filter_map(|v| match v.kind {
            VarKind::EdgeX { from, to } => Some((from, to, v.id)),
            _ => None,
        })
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, c)| c * values[v]).sum()
    }

    /// Indices of rows violated by `values` (bounds are checked separately by
    /// [`MipModel::bound_violations`]).
    pub fn violated_rows(&self, values: &[f64], tol: f64) -> Vec<usize> {
        self.constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_satisfied(values, tol))
            .map(|(k, _)| k)
            .collect()
    }

    pub fn bound_violations(&self, values: &[f64], tol: f64) -> Vec<usize> {
        self.variables
            .iter()
            .filter(|v| values[v.id] < v.lo - tol || values[v.id] > v.hi + tol)
            .map(|v| v.id)
            .collect()
    }

    pub fn is_feasible(&self, values: &[f64], tol: f64) -> bool {
        values.len() == self.variables.len()
            && self.bound_violations(values, tol).is_empty()
            && self.violated_rows(values, tol).is_empty()
    }

    pub fn constraint_counts(&self) -> BTreeMap<ConstraintTag, usize> {
        let mut out = BTreeMap::new();
        for c in &self.constraints {
            *out.entry(c.tag).or_insert(0) += 1;
        }
        out
    }

    pub fn count_vars(&self, pred: impl Fn(&VarKind) -> bool) -> usize {
        self.variables.iter().filter(|v| pred(&v.kind)).count()
    }
}

struct Builder {
    variables: Vec<VarRef>,
    constraints: Vec<LinConstraint>,
}

impl Builder {
    fn var(&mut self, kind: VarKind, lo: f64, hi: f64, integrality: Integrality) -> usize {
        let id = self.variables.len();
        self.variables.push(VarRef { id, kind, lo, hi, integrality });
        id
    }

    fn binary(&mut self, kind: VarKind) -> usize {
        self.var(kind, 0.0, 1.0, Integrality::Binary)
    }

    fn row(
        &mut self,
        tag: ConstraintTag,
        name: String,
        terms: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) {
        debug_assert!({
            let mut ids: Vec<usize> = terms.iter().map(|t| t.0).collect();
            ids.sort_unstable();
            ids.windows(2).all(|w| w[0] != w[1])
        });
        self.constraints.push(LinConstraint { name, tag, terms, sense, rhs });
    }
}

/// Build the MIP for `instance` under `options`.
pub fn build_model(
    instance: &ProblemInstance,
    cost: &CostMatrix,
    options: &ModelOptions,
) -> Result<MipModel> {
    instance.validate().into_result()?;
    if options.time_frame && !instance.has_sections() {
        return Err(Error::ModelOptions("time_frame requires non-empty sections".into()));
    }
    if options.multi_type && !instance.has_types() {
        return Err(Error::ModelOptions(
            "multi_type requires item_types and placeholder_types".into(),
        ));
    }
    if cost.dim() != instance.n_nodes() {
        return Err(Error::ModelOptions(format!(
            "cost matrix is {0}x{0}, instance has {1} nodes",
            cost.dim(),
            instance.n_nodes()
        )));
    }

    let n = instance.n_items();
    let n_p = instance.n_placeholders();
    let nn = n + n_p;
    let stop = n - 1;
    let start = nn - 1;
    let surplus = n_p > n;
    let typed = options.multi_type;
    let tf = options.time_frame;
    let ph = || n..nn;

    let mut b = Builder { variables: Vec::new(), constraints: Vec::new() };

    let mut x_idx = vec![None; nn * nn];
    for i in 0..n {
        for p in ph() {
            x_idx[i * nn + p] = Some(b.binary(VarKind::EdgeX { from: i, to: p }));
            x_idx[p * nn + i] = Some(b.binary(VarKind::EdgeX { from: p, to: i }));
        }
    }
    let x = |i: usize, j: usize| x_idx[i * nn + j].expect("edge variable");

    let mut a_idx = vec![None; n * n_p];
    for i in 0..n {
        for p in ph() {
            let id = b.binary(VarKind::AssignA { item: i, placeholder: p });
            if typed && !instance.compatible(i, p) {
                b.variables[id].hi = 0.0;
            }
            a_idx[i * n_p + p - n] = Some(id);
        }
    }
    let a = |i: usize, p: usize| a_idx[i * n_p + p - n].expect("assignment variable");

    // Section-implied reductions, only meaningful with time frames.
    let section_of = instance.section_index();
    let h = instance.sections.len();
    let allowed_y = |u: usize, v: usize| -> bool {
        if !options.tighten_sections {
            return true;
        }
        let (su, sv) = (section_of[u], section_of[v]);
        if u == stop {
            sv == 0
        } else {
            su == sv || sv == su + 1
        }
    };

    let mut y_idx = Vec::new();
    let mut t_idx = Vec::new();
    if tf {
        y_idx = vec![None; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let id = b.binary(VarKind::ItemEdgeY { from: i, to: j });
                    if !allowed_y(i, j) {
                        b.variables[id].hi = 0.0;
                    }
                    y_idx[i * n + j] = Some(id);
                }
            }
        }
        let mut block = vec![(1.0, n as f64); n];
        if options.tighten_sections {
            let mut offset = 0usize;
            for section in &instance.sections {
                for &i in section {
                    block[i] = ((offset + 1) as f64, (offset + section.len()) as f64);
                }
                offset += section.len();
            }
            block[stop] = (n as f64, n as f64);
        }
        t_idx = vec![None; n];
        for i in 0..n {
            let (lo, hi) = block[i];
            t_idx[i] = Some(b.var(VarKind::SeqT { item: i }, lo, hi, Integrality::Continuous));
        }
    }

    let mut c_idx = Vec::new();
    if surplus {
        c_idx = ph().map(|p| Some(b.binary(VarKind::SelectC { placeholder: p }))).collect();
    }
    let c = |p: usize| c_idx[p - n].expect("selection variable");

    // A tour over a single item visits its placeholder twice.
    let visits = if n == 1 { 1.0 } else { 2.0 };

    // g4 as bound fixings.
    b.variables[a(stop, start)].lo = 1.0;
    b.variables[x(stop, start)].lo = 1.0;
    if n > 1 {
        b.variables[x(start, stop)].hi = 0.0;
    }

    // g1: degree.
    for i in 0..n {
        b.row(ConstraintTag::G1, format!("G1_OUT_{i}"), ph().map(|p| (x(i, p), 1.0)).collect(), Sense::Eq, 1.0);
        b.row(ConstraintTag::G1, format!("G1_IN_{i}"), ph().map(|p| (x(p, i), 1.0)).collect(), Sense::Eq, 1.0);
    }
    for p in ph() {
        let mut out: Vec<(usize, f64)> = (0..n).map(|i| (x(p, i), 1.0)).collect();
        let mut inc: Vec<(usize, f64)> = (0..n).map(|i| (x(i, p), 1.0)).collect();
        if surplus {
            out.push((c(p), -1.0));
            inc.push((c(p), -1.0));
            b.row(ConstraintTag::ADeg, format!("A_DEG_OUT_{p}"), out, Sense::Eq, 0.0);
            b.row(ConstraintTag::ADeg, format!("A_DEG_IN_{p}"), inc, Sense::Eq, 0.0);
        } else {
            b.row(ConstraintTag::G1, format!("G1_OUT_{p}"), out, Sense::Eq, 1.0);
            b.row(ConstraintTag::G1, format!("G1_IN_{p}"), inc, Sense::Eq, 1.0);
        }
    }

    if typed {
        // One-to-one placement within types; the outgoing edge of an item
        // leads to the placeholder it is placed on.
        for i in 0..n {
            let terms = ph().filter(|&p| instance.compatible(i, p)).map(|p| (a(i, p), 1.0)).collect();
            b.row(ConstraintTag::BType, format!("B_ITEM_{i}"), terms, Sense::Eq, 1.0);
        }
        for p in ph() {
            let mut terms: Vec<(usize, f64)> =
                (0..n).filter(|&i| instance.compatible(i, p)).map(|i| (a(i, p), 1.0)).collect();
            if surplus {
                terms.push((c(p), -1.0));
                b.row(ConstraintTag::BType, format!("B_PH_{p}"), terms, Sense::Eq, 0.0);
            } else {
                b.row(ConstraintTag::BType, format!("B_PH_{p}"), terms, Sense::Eq, 1.0);
            }
        }
        if surplus {
            let mut types: BTreeMap<u32, usize> = BTreeMap::new();
            for i in 0..n {
                *types.entry(instance.node_type(i).unwrap_or(0)).or_default() += 1;
            }
            for (&ty, &count) in &types {
                let terms = ph()
                    .filter(|&p| instance.node_type(p) == Some(ty))
                    .map(|p| (c(p), 1.0))
                    .collect();
                b.row(ConstraintTag::BType, format!("B_SEL_{ty}"), terms, Sense::Eq, count as f64);
            }
        }
        for i in 0..n {
            for p in ph() {
                b.row(ConstraintTag::G3, format!("G3_OUT_{i}_{p}"), vec![(x(i, p), 1.0), (a(i, p), -1.0)], Sense::Le, 0.0);
            }
        }
    } else {
        // g2: each item and used placeholder is adjacent to two partners.
        for i in 0..n {
            b.row(ConstraintTag::G2, format!("G2_ITEM_{i}"), ph().map(|p| (a(i, p), 1.0)).collect(), Sense::Eq, visits);
        }
        for p in ph() {
            let mut terms: Vec<(usize, f64)> = (0..n).map(|i| (a(i, p), 1.0)).collect();
            if surplus {
                terms.push((c(p), -visits));
                b.row(ConstraintTag::G2, format!("G2_PH_{p}"), terms, Sense::Eq, 0.0);
            } else {
                b.row(ConstraintTag::G2, format!("G2_PH_{p}"), terms, Sense::Eq, visits);
            }
        }
        for i in 0..n {
            for p in ph() {
                b.row(ConstraintTag::G3, format!("G3_OUT_{i}_{p}"), vec![(x(i, p), 1.0), (a(i, p), -1.0)], Sense::Le, 0.0);
                b.row(ConstraintTag::G3, format!("G3_IN_{i}_{p}"), vec![(x(p, i), 1.0), (a(i, p), -1.0)], Sense::Le, 0.0);
            }
        }
    }

    if surplus {
        b.row(ConstraintTag::ASel, "A_SEL".into(), ph().map(|p| (c(p), 1.0)).collect(), Sense::Eq, n as f64);
        for i in 0..n {
            for p in ph() {
                b.row(ConstraintTag::Link, format!("A_LINK_{i}_{p}"), vec![(a(i, p), 1.0), (c(p), -1.0)], Sense::Le, 0.0);
            }
        }
    }

    let big_m = n as f64;
    let mut z_idx = Vec::new();
    if tf {
        let y = |i: usize, j: usize| y_idx[i * n + j].expect("item edge variable");
        let t = |i: usize| t_idx[i].expect("sequence variable");

        // C1: sections are handled in order.
        for m in 0..h.saturating_sub(1) {
            for &i in &instance.sections[m] {
                for &k in &instance.sections[m + 1] {
                    b.row(ConstraintTag::C1, format!("C1_{i}_{k}"), vec![(t(k), 1.0), (t(i), -1.0)], Sense::Ge, 1.0);
                }
            }
        }
        // C2: the stop comes no earlier than the last section.
        for &i in &instance.sections[h - 1] {
            b.row(ConstraintTag::C2, format!("C2_{i}"), vec![(t(stop), 1.0), (t(i), -1.0)], Sense::Ge, 0.0);
        }
        // C3: MTZ on the item graph, the stop closes the cycle.
        for u in 0..n {
            if u == stop {
                continue;
            }
            for v in 0..n {
                if v != u {
                    b.row(
                        ConstraintTag::C3,
                        format!("C3_MTZ_{u}_{v}"),
                        vec![(t(u), 1.0), (t(v), -1.0), (y(u, v), big_m)],
                        Sense::Le,
                        big_m - 1.0,
                    );
                }
            }
        }
        // C4
        let all_y = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)));
        b.row(ConstraintTag::C4, "C4".into(), all_y.map(|(i, j)| (y(i, j), 1.0)).collect(), Sense::Eq, n as f64);
        // C5/C6
        for i in 0..n {
            let succ = (0..n).filter(|&j| j != i).map(|j| (y(i, j), 1.0)).collect();
            b.row(ConstraintTag::C5, format!("C5_{i}"), succ, Sense::Eq, 1.0);
        }
        for i in 0..n {
            let pred = (0..n).filter(|&j| j != i).map(|j| (y(j, i), 1.0)).collect();
            b.row(ConstraintTag::C6, format!("C6_{i}"), pred, Sense::Eq, 1.0);
        }
        // C7
        if options.symmetry_breaking && n >= 3 {
            for i in 0..n {
                for j in i + 1..n {
                    b.row(ConstraintTag::C7, format!("C7_{i}_{j}"), vec![(y(i, j), 1.0), (y(j, i), 1.0)], Sense::Le, 1.0);
                }
            }
        }
        // C8
        match options.c8 {
            C8Linearization::OneSided => {
                for i in 0..n {
                    for j in 0..n {
                        if i == j {
                            continue;
                        }
                        for p in ph() {
                            b.row(
                                ConstraintTag::C8,
                                format!("C8_{i}_{j}_{p}"),
                                vec![(x(i, p), 1.0), (x(p, j), 1.0), (y(i, j), -1.0)],
                                Sense::Le,
                                1.0,
                            );
                        }
                    }
                }
            }
            C8Linearization::Product => {
                z_idx = vec![None; n * n_p * n];
                let zpos = |i: usize, p: usize, j: usize| (i * n_p + p - n) * n + j;
                for i in 0..n {
                    for p in ph() {
                        if typed && !instance.compatible(i, p) {
                            continue;
                        }
                        for j in 0..n {
                            if j != i && allowed_y(i, j) {
                                let id = b.var(
                                    VarKind::ChainZ { from: i, placeholder: p, to: j },
                                    0.0,
                                    1.0,
                                    Integrality::Continuous,
                                );
                                z_idx[zpos(i, p, j)] = Some(id);
                            }
                        }
                    }
                }
                let z = |i: usize, p: usize, j: usize| z_idx[zpos(i, p, j)];
                for i in 0..n {
                    for j in 0..n {
                        if i == j {
                            continue;
                        }
                        let mut terms: Vec<(usize, f64)> =
                            ph().filter_map(|p| z(i, p, j)).map(|v| (v, 1.0)).collect();
                        terms.push((y(i, j), -1.0));
                        b.row(ConstraintTag::C8, format!("C8_Y_{i}_{j}"), terms, Sense::Eq, 0.0);
                    }
                }
                for i in 0..n {
                    for p in ph() {
                        let mut terms: Vec<(usize, f64)> =
                            (0..n).filter_map(|j| z(i, p, j)).map(|v| (v, 1.0)).collect();
                        terms.push((x(i, p), -1.0));
                        b.row(ConstraintTag::C8, format!("C8_OUT_{i}_{p}"), terms, Sense::Eq, 0.0);
                    }
                }
                for p in ph() {
                    for j in 0..n {
                        let mut terms: Vec<(usize, f64)> =
                            (0..n).filter_map(|i| z(i, p, j)).map(|v| (v, 1.0)).collect();
                        terms.push((x(p, j), -1.0));
                        b.row(ConstraintTag::C8, format!("C8_IN_{p}_{j}"), terms, Sense::Eq, 0.0);
                    }
                }
            }
        }
    }

    let objective = b
        .variables
        .iter()
        .filter_map(|v| match v.kind {
            VarKind::EdgeX { from, to } => Some((v.id, cost.get(from, to))),
            _ => None,
        })
        .collect();

    Ok(MipModel {
        name: instance.name.clone(),
        variables: b.variables,
        constraints: b.constraints,
        objective,
        variant: Variant {
            time_frame: tf,
            extra_placeholders: surplus,
            multi_type: typed,
            fixed_pair: true,
        },
        lazy_subtour_enabled: !tf,
        big_m,
        n_items: n,
        n_placeholders: n_p,
        x_idx,
        a_idx,
        y_idx,
        t_idx,
        c_idx,
        z_idx,
    })
}
