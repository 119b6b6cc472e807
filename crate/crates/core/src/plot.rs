//! SVG rendering of a tour.

use std::fmt::Write as _;

use crate::instance::ProblemInstance;
use crate::solution::Solution;

const SIZE: f64 = 640.0;
const MARGIN: f64 = 40.0;
const SECTION_COLORS: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8",
];
const STOP_COLOR: &str = "#d62728";
const PLACEHOLDER_COLOR: &str = "#444444";

/// Color of item markers by section; the stop item has its own color.
pub fn section_color(section: usize) -> &'static str {
    SECTION_COLORS[section % SECTION_COLORS.len()]
}

/// Items are filled circles colored by section, placeholders hollow squares,
/// the tour one line per edge in visit order. The start placeholder and the
/// stop item are drawn larger.
pub fn plot_route(solution: &Solution, instance: &ProblemInstance) -> String {
    let nn = instance.n_nodes();
    let points: Vec<_> = (0..nn).map(|v| instance.point(v)).collect();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in &points {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let sx = |x: f64| MARGIN + (x - x0) * scale;
    let sy = |y: f64| SIZE - MARGIN - (y - y0) * scale;

    let stop = instance.stop_item();
    let start = instance.start_placeholder();
    let section_of = instance.section_index();

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, "<title>{} {} {:.4} m</title>", escape(&instance.name), solution.solver, solution.objective);
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);

    let _ = writeln!(out, r#"<g class="tour" stroke="{PLACEHOLDER_COLOR}" stroke-width="1.5">"#);
    for (u, v) in solution.tour.edges() {
        let (a, b) = (points[u], points[v]);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            sx(a.x),
            sy(a.y),
            sx(b.x),
            sy(b.y)
        );
    }
    let _ = writeln!(out, "</g>");

    for p in instance.placeholder_nodes() {
        let pt = points[p];
        let half = if p == start { 9.0 } else { 6.0 };
        let width = if p == start { 3.0 } else { 1.5 };
        let class = if p == start { "placeholder start" } else { "placeholder" };
        let _ = writeln!(
            out,
            r#"<rect class="{class}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="{PLACEHOLDER_COLOR}" stroke-width="{width}"/>"#,
            sx(pt.x) - half,
            sy(pt.y) - half,
            2.0 * half,
            2.0 * half
        );
    }
    for i in 0..instance.n_items() {
        let pt = points[i];
        let (class, color, r) = if i == stop {
            ("item stop", STOP_COLOR, 8.0)
        } else {
            ("item", section_color(section_of[i]), 5.0)
        };
        let _ = writeln!(
            out,
            r#"<circle class="{class}" cx="{:.2}" cy="{:.2}" r="{r}" fill="{color}"/>"#,
            sx(pt.x),
            sy(pt.y)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::solve_greedy;
    use crate::instance::{build_cost_matrix, generate_random_instance};
    use std::collections::BTreeSet;

    fn render(n: usize, sizes: &[usize], n_p: usize) -> String {
        let inst = generate_random_instance(n, sizes, n_p, 3).unwrap();
        let cost = build_cost_matrix(&inst).unwrap();
        plot_route(&solve_greedy(&inst, &cost).unwrap(), &inst)
    }

    #[test]
    fn single_item_counts() {
        let svg = render(1, &[], 1);
        assert_eq!(svg.matches("<circle").count() + svg.matches(r#"<rect class="placeholder"#).count(), 2);
        assert_eq!(svg.matches("<line").count(), 2);
    }

    #[test]
    fn deterministic_and_colored_by_section() {
        let svg = render(17, &[2, 5, 5, 4], 19);
        assert_eq!(svg, render(17, &[2, 5, 5, 4], 19));
        let colors: BTreeSet<&str> = svg
            .lines()
            .filter(|l| l.starts_with("<circle"))
            .map(|l| l.split("fill=\"").nth(1).unwrap().split('"').next().unwrap())
            .collect();
        assert_eq!(colors.len(), 5);
    }
}
