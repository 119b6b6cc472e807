//! Problem instances for joint routing-assignment.
//!
//! Nodes are indexed globally: items occupy `0..n` and placeholders
//! `n..n + n_p`. The last item is the stop (goal) and the last placeholder is
//! the start; both are positional and never stored as flags. Sections list
//! the non-stop items in the order they must be handled, the stop item is
//! implicitly handled after the last section.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A position in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<[f64; 2]> for Point2D {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point2D> for [f64; 2] {
    fn from(p: Point2D) -> Self {
        [p.x, p.y]
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub name: String,
    pub items: Vec<Point2D>,
    pub placeholders: Vec<Point2D>,
    #[serde(default)]
    pub sections: Vec<Vec<usize>>,
    #[serde(default)]
    pub item_types: Option<Vec<u32>>,
    #[serde(default)]
    pub placeholder_types: Option<Vec<u32>>,
    #[serde(default)]
    pub metric: Metric,
}

impl ProblemInstance {
    pub fn new(
        name: impl Into<String>,
        items: Vec<Point2D>,
        placeholders: Vec<Point2D>,
        sections: Vec<Vec<usize>>,
    ) -> Self {
        Self {
            name: name.into(),
            items,
            placeholders,
            sections,
            item_types: None,
            placeholder_types: None,
            metric: Metric::Euclidean,
        }
    }

    pub fn with_types(mut self, item_types: Vec<u32>, placeholder_types: Vec<u32>) -> Self {
        self.item_types = Some(item_types);
        self.placeholder_types = Some(placeholder_types);
        self
    }

    #[inline]
    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    #[inline]
    pub fn n_placeholders(&self) -> usize {
        self.placeholders.len()
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.items.len() + self.placeholders.len()
    }

    /// Global index of the stop item.
    #[inline]
    pub fn stop_item(&self) -> usize {
        self.items.len() - 1
    }

    /// Global index of the start placeholder.
    #[inline]
    pub fn start_placeholder(&self) -> usize {
        self.n_nodes() - 1
    }

    #[inline]
    pub fn is_item(&self, node: usize) -> bool {
        node < self.items.len()
    }

    #[inline]
    pub fn is_placeholder(&self, node: usize) -> bool {
        node >= self.items.len() && node < self.n_nodes()
    }

    /// Global indices of all placeholders.
    pub fn placeholder_nodes(&self) -> std::ops::Range<usize> {
        self.items.len()..self.n_nodes()
    }

    pub fn point(&self, node: usize) -> Point2D {
        if node < self.items.len() {
            self.items[node]
        } else {
            self.placeholders[node - self.items.len()]
        }
    }

    pub fn has_sections(&self) -> bool {
        !self.sections.is_empty()
    }

    pub fn has_types(&self) -> bool {
        self.item_types.is_some() && self.placeholder_types.is_some()
    }

    /// Section index per item; the stop item maps to `sections.len()`.
    /// Instances without sections put every non-stop item in section 0.
    pub fn section_index(&self) -> Vec<usize> {
        let n = self.n_items();
        let mut out = vec![0; n];
        for (m, section) in self.sections.iter().enumerate() {
            for &i in section {
                if i < n {
                    out[i] = m;
                }
            }
        }
        out[n - 1] = self.sections.len().max(1);
        out
    }

    /// Sections as used by the enumeration-based solvers. Instances without
    /// time frames behave as a single section holding every non-stop item.
    pub fn effective_sections(&self) -> Vec<Vec<usize>> {
        if self.has_sections() {
            self.sections.clone()
        } else if self.n_items() > 1 {
            vec![(0..self.n_items() - 1).collect()]
        } else {
            Vec::new()
        }
    }

    /// Type of a node (item or placeholder, global index).
    pub fn node_type(&self, node: usize) -> Option<u32> {
        if self.is_item(node) {
            self.item_types.as_ref().map(|t| t[node])
        } else {
            let n = self.n_items();
            self.placeholder_types.as_ref().map(|t| t[node - n])
        }
    }

    /// Whether `item` may be placed on `placeholder` (global indices).
    pub fn compatible(&self, item: usize, placeholder: usize) -> bool {
        match (self.node_type(item), self.node_type(placeholder)) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_instance(self)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json_string()?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NoItems,
    TooFewPlaceholders { items: usize, placeholders: usize },
    NonFiniteCoordinate { node: usize },
    SectionItemOutOfRange { section: usize, item: usize },
    SectionContainsStop { section: usize },
    EmptySection { section: usize },
    OverlappingSections { item: usize },
    SectionsIncomplete { missing: Vec<usize> },
    TypeListLength { list: &'static str, expected: usize, found: usize },
    TypesPartial,
    TypeShortfall { ty: u32, items: usize, placeholders: usize },
    StopStartTypeMismatch { stop: u32, start: u32 },
    // Tour checks.
    UnknownNode { node: usize },
    NotAlternating { position: usize },
    ItemVisits { item: usize, count: usize },
    PlaceholderRepeated { placeholder: usize },
    SelectedCount { expected: usize, found: usize },
    FixedPair,
    SectionOrder { item: usize },
    TypeMismatch { item: usize, placeholder: usize },
    LengthMismatch { total: f64, sum: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoItems => write!(f, "instance has no items"),
            Violation::TooFewPlaceholders { items, placeholders } => {
                write!(f, "n_p < n ({placeholders} placeholders for {items} items)")
            }
            Violation::NonFiniteCoordinate { node } => {
                write!(f, "non-finite coordinate at node {node}")
            }
            Violation::SectionItemOutOfRange { section, item } => {
                write!(f, "section {section} references unknown item {item}")
            }
            Violation::SectionContainsStop { section } => {
                write!(f, "section {section} contains the stop item")
            }
            Violation::EmptySection { section } => write!(f, "section {section} is empty"),
            Violation::OverlappingSections { item } => {
                write!(f, "overlapping sections: item {item} appears more than once")
            }
            Violation::SectionsIncomplete { missing } => {
                write!(f, "sections do not cover items {missing:?}")
            }
            Violation::TypeListLength { list, expected, found } => {
                write!(f, "{list} has length {found}, expected {expected}")
            }
            Violation::TypesPartial => {
                write!(f, "item_types and placeholder_types must be given together")
            }
            Violation::TypeShortfall { ty, items, placeholders } => write!(
                f,
                "type {ty} has {items} items but only {placeholders} placeholders"
            ),
            Violation::StopStartTypeMismatch { stop, start } => write!(
                f,
                "stop item type {stop} differs from start placeholder type {start}"
            ),
            Violation::UnknownNode { node } => write!(f, "tour references unknown node {node}"),
            Violation::NotAlternating { position } => {
                write!(f, "tour does not alternate placeholders and items at position {position}")
            }
            Violation::ItemVisits { item, count } => {
                write!(f, "item {item} visited {count} times")
            }
            Violation::PlaceholderRepeated { placeholder } => {
                write!(f, "placeholder {placeholder} visited more than once")
            }
            Violation::SelectedCount { expected, found } => {
                write!(f, "{found} placeholders selected, expected {expected}")
            }
            Violation::FixedPair => write!(f, "fixed pair violated"),
            Violation::SectionOrder { item } => write!(f, "section order violated at item {item}"),
            Violation::TypeMismatch { item, placeholder } => {
                write!(f, "item {item} placed on incompatible placeholder {placeholder}")
            }
            Violation::LengthMismatch { total, sum } => {
                write!(f, "tour total {total} differs from edge sum {sum}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_instance(instance: &ProblemInstance) -> ValidationReport {
    let mut violations = Vec::new();
    let n = instance.n_items();
    let n_p = instance.n_placeholders();

    if n == 0 {
        violations.push(Violation::NoItems);
    }
    if n_p < n {
        violations.push(Violation::TooFewPlaceholders { items: n, placeholders: n_p });
    }
    for node in 0..instance.n_nodes() {
        if !instance.point(node).is_finite() {
            violations.push(Violation::NonFiniteCoordinate { node });
        }
    }

    if !instance.sections.is_empty() && n > 0 {
        let mut seen = vec![false; n];
        for (s, section) in instance.sections.iter().enumerate() {
            if section.is_empty() {
                violations.push(Violation::EmptySection { section: s });
            }
            for &i in section {
                if i >= n {
                    violations.push(Violation::SectionItemOutOfRange { section: s, item: i });
                } else if i == n - 1 {
                    violations.push(Violation::SectionContainsStop { section: s });
                } else if seen[i] {
                    violations.push(Violation::OverlappingSections { item: i });
                } else {
                    seen[i] = true;
                }
            }
        }
        let missing: Vec<usize> = (0..n - 1).filter(|&i| !seen[i]).collect();
        if !missing.is_empty() {
            violations.push(Violation::SectionsIncomplete { missing });
        }
    }

    match (&instance.item_types, &instance.placeholder_types) {
        (None, None) => {}
        (Some(it), Some(pt)) => {
            let mut lengths_ok = true;
            if it.len() != n {
                lengths_ok = false;
                violations.push(Violation::TypeListLength {
                    list: "item_types",
                    expected: n,
                    found: it.len(),
                });
            }
            if pt.len() != n_p {
                lengths_ok = false;
                violations.push(Violation::TypeListLength {
                    list: "placeholder_types",
                    expected: n_p,
                    found: pt.len(),
                });
            }
            if lengths_ok && n > 0 {
                let mut counts: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
                for &t in it {
                    counts.entry(t).or_default().0 += 1;
                }
                for &t in pt {
                    counts.entry(t).or_default().1 += 1;
                }
                for (&ty, &(items, placeholders)) in &counts {
                    if placeholders < items {
                        violations.push(Violation::TypeShortfall { ty, items, placeholders });
                    }
                }
                if n_p > 0 && it[n - 1] != pt[n_p - 1] {
                    violations.push(Violation::StopStartTypeMismatch {
                        stop: it[n - 1],
                        start: pt[n_p - 1],
                    });
                }
            }
        }
        _ => violations.push(Violation::TypesPartial),
    }

    ValidationReport { violations }
}

/// Symmetric pairwise cost matrix over the concatenated node list
/// `items ++ placeholders`.
#[derive(Clone, Debug, PartialEq)]
pub struct CostMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

pub fn build_cost_matrix(instance: &ProblemInstance) -> Result<CostMatrix> {
    let bad: Vec<Violation> = (0..instance.n_nodes())
        .filter(|&node| !instance.point(node).is_finite())
        .map(|node| Violation::NonFiniteCoordinate { node })
        .collect();
    if !bad.is_empty() {
        return Err(Error::InvalidInstance(ValidationReport { violations: bad }));
    }
    let points: Vec<Point2D> = (0..instance.n_nodes()).map(|k| instance.point(k)).collect();
    Ok(CostMatrix::from_fn(points.len(), |i, j| {
        if i == j {
            0.0
        } else {
            points[i].distance(&points[j])
        }
    }))
}

/// Axis-aligned sampling area for generated coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Area {
    pub min: Point2D,
    pub max: Point2D,
}

impl Default for Area {
    fn default() -> Self {
        Self { min: Point2D::new(0.0, 0.0), max: Point2D::new(1.0, 1.0) }
    }
}

/// Seeded random instance generator.
#[derive(Clone, Debug)]
pub struct InstanceGenerator {
    pub n_items: usize,
    pub section_sizes: Vec<usize>,
    pub n_placeholders: usize,
    pub seed: u64,
    pub area: Area,
    /// Number of distinct types to draw, `None` for untyped instances.
    pub type_count: Option<u32>,
}

impl InstanceGenerator {
    pub fn new(n_items: usize, section_sizes: Vec<usize>, n_placeholders: usize, seed: u64) -> Self {
        Self {
            n_items,
            section_sizes,
            n_placeholders,
            seed,
            area: Area::default(),
            type_count: None,
        }
    }

    pub fn area(mut self, area: Area) -> Self {
        self.area = area;
        self
    }

    pub fn types(mut self, type_count: u32) -> Self {
        self.type_count = Some(type_count);
        self
    }

    pub fn generate(&self) -> Result<ProblemInstance> {
        let n = self.n_items;
        let n_p = self.n_placeholders;
        if n == 0 {
            return Err(Error::InvalidArgument("at least one item is required".into()));
        }
        if n_p < n {
            return Err(Error::InvalidArgument(format!("n_p < n ({n_p} < {n})")));
        }
        if !self.section_sizes.is_empty() {
            let total: usize = self.section_sizes.iter().sum();
            if total != n - 1 {
                return Err(Error::InvalidArgument(format!(
                    "section sizes sum to {total}, expected n - 1 = {}",
                    n - 1
                )));
            }
            if self.section_sizes.contains(&0) {
                return Err(Error::InvalidArgument("section sizes must be positive".into()));
            }
        }
        if matches!(self.type_count, Some(0)) {
            return Err(Error::InvalidArgument("type count must be positive".into()));
        }
        let Area { min, max } = self.area;
        if !(min.is_finite() && max.is_finite()) || min.x > max.x || min.y > max.y {
            return Err(Error::InvalidArgument("degenerate sampling area".into()));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let draw = |rng: &mut ChaCha8Rng| {
            Point2D::new(
                min.x + (max.x - min.x) * rng.gen::<f64>(),
                min.y + (max.y - min.y) * rng.gen::<f64>(),
            )
        };
        let items: Vec<Point2D> = (0..n).map(|_| draw(&mut rng)).collect();
        let placeholders: Vec<Point2D> = (0..n_p).map(|_| draw(&mut rng)).collect();

        let mut sections = Vec::with_capacity(self.section_sizes.len());
        let mut next = 0;
        for &size in &self.section_sizes {
            sections.push((next..next + size).collect());
            next += size;
        }

        let mut instance = ProblemInstance::new(
            format!("random_n{n}_np{n_p}_s{}", self.seed),
            items,
            placeholders,
            sections,
        );

        if let Some(k) = self.type_count {
            let item_types: Vec<u32> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            // Every non-stop item gets a placeholder of its type, surplus
            // placeholders draw freely, the start matches the stop.
            let mut ph_types: Vec<u32> = item_types[..n - 1].to_vec();
            ph_types.extend((0..n_p - n).map(|_| rng.gen_range(0..k)));
            ph_types.shuffle(&mut rng);
            ph_types.push(item_types[n - 1]);
            instance = instance.with_types(item_types, ph_types);
        }
        Ok(instance)
    }
}

/// Random instance with coordinates uniform in the unit square.
pub fn generate_random_instance(
    n: usize,
    section_sizes: &[usize],
    n_p: usize,
    seed: u64,
) -> Result<ProblemInstance> {
    InstanceGenerator::new(n, section_sizes.to_vec(), n_p, seed).generate()
}

fn factorial(k: usize) -> BigUint {
    (1..=k as u64).fold(BigUint::from(1u32), |acc, v| acc * v)
}

/// Falling factorial `P(n, k) = n! / (n - k)!`; zero when `k > n`.
pub fn permutations(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    ((n - k + 1) as u64..=n as u64).fold(BigUint::from(1u32), |acc, v| acc * v)
}

/// Number of section-respecting item orders: the product of `n_s!`.
pub fn count_instants(section_sizes: &[usize]) -> BigUint {
    section_sizes
        .iter()
        .fold(BigUint::from(1u32), |acc, &s| acc * factorial(s))
}

/// Number of pick-and-place combinations when each stop's items are ordered
/// freely and placed on placeholders not used by earlier stops.
pub fn count_pick_place_combinations(section_sizes: &[usize], n_placeholders: usize) -> BigUint {
    let mut remaining = n_placeholders;
    let mut total = BigUint::from(1u32);
    for &s in section_sizes {
        total *= factorial(s) * permutations(remaining, s);
        remaining = remaining.saturating_sub(s);
    }
    total
}
