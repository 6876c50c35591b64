//! From a square regular 0,1 matrix to a simple regular graph with a
//! biclique partition certificate and a chromatic lower bound.
//!
//! Vertex `(i, j)` of the pair graph `H` has index `i*n + j`; copy `b` of it
//! in the output graph has index `b*n^2 + i*n + j`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    canonical_json, chromatic_number_with_budget, k_colorable_with_budget,
    partition_from_t_covering, verify_covering, Biclique, BicliqueCovering, Coloring, Graph,
    DEFAULT_GRAPH_BUDGET,
};
use crate::matrix::{BoolMatrix, Rectangle};
use crate::rank::{binary_rank, boolean_rank, verify_rectangles, CoverKind, RectangleSet, DEFAULT_NODE_BUDGET};
use crate::scalar::ceil_cbrt;

#[derive(Clone, Copy, Debug)]
pub struct Budgets {
    /// Node budget for the rectangle solvers.
    pub rank: u64,
    /// Node budget for coloring searches.
    pub graph: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            rank: DEFAULT_NODE_BUDGET,
            graph: DEFAULT_GRAPH_BUDGET,
        }
    }
}

/// The pair graph `H` with its covering and the layers of `H_0`.
#[derive(Clone, Debug)]
pub struct HGraphBundle {
    pub n: usize,
    pub h: Graph,
    /// Vertices without loops, ascending.
    pub v0: Vec<usize>,
    /// Vertices with loops, ascending.
    pub v1: Vec<usize>,
    pub covering: BicliqueCovering,
    /// Edges of `H[V0]` covered once, on vertices indexed by position in `v0`.
    pub h0_1: Graph,
    /// Edges of `H[V0]` covered twice, same indexing.
    pub h0_2: Graph,
}

/// `(i1, j1) ~ (i2, j2)` iff `M[i1][j2] = 1` or `M[i2][j1] = 1`.
pub fn build_h(m: &BoolMatrix) -> Result<Graph> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut h = Graph::empty(n * n);
    for u in 0..n * n {
        let (i1, j1) = (u / n, u % n);
        for v in u..n * n {
            let (i2, j2) = (v / n, v % n);
            if m.get(i1, j2) || m.get(i2, j1) {
                h.insert(u, v);
            }
        }
    }
    Ok(h)
}

/// `C_t = (A_t × [n], [n] × B_t)` for each rectangle `A_t × B_t`.
pub fn build_covering(m: &BoolMatrix, p: &RectangleSet) -> Result<BicliqueCovering> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if p.kind != CoverKind::Partition || !verify_rectangles(m, p)? {
        return Err(Error::Verification("rectangles do not partition the ones".into()));
    }
    let n = m.rows();
    Ok(BicliqueCovering::new(
        2,
        p.rects
            .iter()
            .map(|r| {
                Biclique::new(
                    r.rows.iter().flat_map(|&i| (0..n).map(move |j| i * n + j)),
                    r.cols.iter().flat_map(|&j| (0..n).map(move |i| i * n + j)),
                )
            })
            .collect(),
    ))
}

pub fn build_bundle(m: &BoolMatrix, p: &RectangleSet) -> Result<HGraphBundle> {
    let h = build_h(m)?;
    let covering = build_covering(m, p)?;
    let n = m.rows();
    let (v1, v0): (Vec<usize>, Vec<usize>) = (0..n * n).partition(|&v| h.has_edge(v, v));
    let (h0_1, h0_2) = split_layers(n, &h, &v0, &covering)?;
    Ok(HGraphBundle {
        n,
        h,
        v0,
        v1,
        covering,
        h0_1,
        h0_2,
    })
}

fn split_layers(n: usize, h: &Graph, v0: &[usize], c: &BicliqueCovering) -> Result<(Graph, Graph)> {
    let counts = coverage_matrix(n * n, &c.bicliques);
    let mut layers = [Graph::empty(v0.len()), Graph::empty(v0.len())];
    for (a, &u) in v0.iter().enumerate() {
        for (b, &v) in v0.iter().enumerate().skip(a + 1) {
            if !h.has_edge(u, v) {
                continue;
            }
            match counts[u * n * n + v] {
                1 => layers[0].insert(a, b),
                2 => layers[1].insert(a, b),
                k => {
                    return Err(Error::Consistency(format!(
                        "edge ({u},{v}) of H is covered {k} times"
                    )))
                }
            }
        }
    }
    let [one, two] = layers;
    Ok((one, two))
}

/// Symmetric coverage counts over `size` vertices.
fn coverage_matrix(size: usize, bicliques: &[Biclique]) -> Vec<u32> {
    let mut counts = vec![0u32; size * size];
    for bc in bicliques {
        for &x in &bc.a {
            for &y in &bc.b {
                counts[x * size + y] += 1;
                if x != y {
                    counts[y * size + x] += 1;
                }
            }
        }
    }
    counts
}

/// Zero cover of `M` read off a proper coloring of `H_0`: each color class
/// `K` gives the rectangle of its rows times its columns.
pub fn zero_cover_from_coloring(bundle: &HGraphBundle, coloring: &Coloring) -> Result<RectangleSet> {
    let n = bundle.n;
    let mut rects = vec![];
    for color in 0..coloring.count {
        let class: Vec<usize> = bundle
            .v0
            .iter()
            .enumerate()
            .filter(|&(a, _)| coloring.colors[a] == color)
            .map(|(_, &v)| v)
            .collect();
        if class.is_empty() {
            continue;
        }
        rects.push(Rectangle::new(
            class.iter().map(|v| v / n).collect(),
            class.iter().map(|v| v % n).collect(),
        )?);
    }
    Ok(RectangleSet::new(CoverKind::Cover, rects))
}

/// `H_0 = H[V0]` with both layers together.
pub fn h0(bundle: &HGraphBundle) -> Graph {
    bundle.h.induced(&bundle.v0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformOutput {
    #[serde(rename = "case")]
    pub case_tag: u8,
    pub graph: Graph,
    pub bp_certificate: BicliqueCovering,
    pub chi_threshold: u64,
    pub k: usize,
    pub m: usize,
    pub degree: usize,
    pub vertex_map: Vec<[usize; 3]>,
}

impl TransformOutput {
    pub fn to_json(&self) -> String {
        canonical_json(self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn regular_params(m: &BoolMatrix) -> Result<(usize, usize)> {
    let n = m.rows();
    let d = m
        .is_regular()?
        .ok_or_else(|| Error::param("matrix is not regular"))?;
    if d == 0 || d == n {
        return Err(Error::param(format!(
            "degree {d} must satisfy 0 < d < n = {n}"
        )));
    }
    Ok((n, d))
}

/// Runs the whole construction. `m_supplied` replaces the Boolean rank of the
/// complement when given.
pub fn transform(m: &BoolMatrix, m_supplied: Option<usize>, budgets: Budgets) -> Result<TransformOutput> {
    let (n, d) = regular_params(m)?;
    let part = binary_rank(m, budgets.rank);
    if !part.optimal {
        return Err(Error::Budget {
            stage: "binary rank".into(),
        });
    }
    let k = part.value;
    let mm = match m_supplied {
        Some(0) => return Err(Error::param("m must be positive")),
        Some(v) => v,
        None => {
            let r = boolean_rank(&m.complement(), budgets.rank);
            if !r.optimal {
                return Err(Error::Budget {
                    stage: "Boolean rank of the complement".into(),
                });
            }
            r.value
        }
    };
    let threshold = ceil_cbrt(mm as u64);
    let bundle = build_bundle(m, &part.certificate)?;
    let chi2 = chromatic_number_with_budget(&bundle.h0_2, budgets.graph).map_err(|e| stage(e, "coloring H0 layer 2"))?;
    let (case_tag, graph, cert, degree) = if (chi2.count as u64).pow(3) >= mm as u64 {
        let (g, c) = case_one(&bundle)?;
        (1u8, g, c, d * d)
    } else {
        let (g, c) = case_two(&bundle, &chi2, mm, budgets)?;
        (2u8, g, c, 2 * n * d)
    };
    let nn = n * n;
    let vertex_map = (0..graph.n())
        .map(|v| [(v % nn) / n, v % n, v / nn])
        .collect();
    Ok(TransformOutput {
        case_tag,
        graph,
        bp_certificate: cert,
        chi_threshold: threshold,
        k,
        m: mm,
        degree,
        vertex_map,
    })
}

fn stage(e: Error, name: &str) -> Error {
    match e {
        Error::Budget { .. } => Error::Budget { stage: name.into() },
        other => other,
    }
}

fn shift(set: impl IntoIterator<Item = usize>, offset: usize) -> Vec<usize> {
    set.into_iter().map(|v| v + offset).collect()
}

/// Two copies of the twice-covered part of `F` joined by the equal-part
/// bicliques across copies.
fn case_one(bundle: &HGraphBundle) -> Result<(Graph, BicliqueCovering)> {
    let nn = bundle.n * bundle.n;
    let mut equal: Vec<Vec<usize>> = vec![];
    let mut rest: Vec<Biclique> = vec![];
    for bc in &bundle.covering.bicliques {
        let a: BTreeSet<usize> = bc.a.iter().copied().collect();
        let b: BTreeSet<usize> = bc.b.iter().copied().collect();
        let both: Vec<usize> = a.intersection(&b).copied().collect();
        let b_only: Vec<usize> = b.difference(&a).copied().collect();
        let a_only: Vec<usize> = a.difference(&b).copied().collect();
        if !both.is_empty() {
            equal.push(both.clone());
        }
        for part in [Biclique::new(both, b_only), Biclique::new(a_only, b)] {
            if !part.is_empty() {
                rest.push(part);
            }
        }
    }
    let mut f = bundle.h.clone();
    for a in &equal {
        for &x in a {
            for &y in a {
                f.remove_edge(x, y);
            }
        }
    }
    // no edge is covered both by an equal-part biclique and by the rest
    let on_equal = coverage_matrix(nn, &equal.iter().map(|a| Biclique::new(a.clone(), a.clone())).collect::<Vec<_>>());
    let on_rest = coverage_matrix(nn, &rest);
    if on_equal.iter().zip(&on_rest).any(|(&x, &y)| x > 0 && y > 0) {
        return Err(Error::Consistency("split bicliques overlap".into()));
    }
    let rest_cov = BicliqueCovering::new(2, rest);
    let (f2, p2) = partition_from_t_covering(&f, &rest_cov)?;
    let mut g = Graph::empty(2 * nn);
    let mut cert = vec![];
    for copy in 0..2 {
        let off = copy * nn;
        for (u, v) in f2.edges() {
            g.insert(u + off, v + off);
        }
        for bc in &p2.bicliques {
            cert.push(Biclique::new(shift(bc.a.iter().copied(), off), shift(bc.b.iter().copied(), off)));
        }
    }
    for a in &equal {
        for &x in a {
            for &y in a {
                g.insert(x, y + nn);
            }
        }
        cert.push(Biclique::new(a.iter().copied(), shift(a.iter().copied(), nn)));
    }
    Ok((g, BicliqueCovering::new(1, cert)))
}

/// Three copies joined cyclically, with the edges inside the chosen
/// independent set `S` moved back into each copy.
fn case_two(
    bundle: &HGraphBundle,
    chi2: &Coloring,
    mm: usize,
    budgets: Budgets,
) -> Result<(Graph, BicliqueCovering)> {
    let nn = bundle.n * bundle.n;
    let mut best: Option<(usize, Vec<usize>)> = None;
    for color in 0..chi2.count {
        let class: Vec<usize> = (0..bundle.v0.len())
            .filter(|&a| chi2.colors[a] == color)
            .collect();
        let chi1 = chromatic_number_with_budget(&bundle.h0_1.induced(&class), budgets.graph)
            .map_err(|e| stage(e, "coloring H0 layer 1 on a color class"))?
            .count;
        if best.as_ref().is_none_or(|(c, _)| chi1 > *c) {
            best = Some((chi1, class));
        }
    }
    let (chi1, class) = best.ok_or_else(|| Error::Consistency("H0 has no vertices".into()))?;
    if (chi1 as u64).pow(3) < mm as u64 {
        return Err(Error::Consistency(format!(
            "no color class reaches chromatic number {} (best {chi1})",
            ceil_cbrt(mm as u64)
        )));
    }
    let s: BTreeSet<usize> = class.iter().map(|&a| bundle.v0[a]).collect();

    let mut g_prime = Graph::empty(3 * nn);
    let mut cyclic = vec![];
    let mut cert = vec![];
    for bc in &bundle.covering.bicliques {
        for b in 0..3 {
            let (from, to) = (b * nn, (b + 1) % 3 * nn);
            for &x in &bc.a {
                for &y in &bc.b {
                    g_prime.insert(x + from, y + to);
                }
            }
            cyclic.push(Biclique::new(shift(bc.a.iter().copied(), from), shift(bc.b.iter().copied(), to)));
            let a_out: Vec<usize> = bc.a.iter().copied().filter(|v| !s.contains(v)).collect();
            let a_in: Vec<usize> = bc.a.iter().copied().filter(|v| s.contains(v)).collect();
            let b_out: Vec<usize> = bc.b.iter().copied().filter(|v| !s.contains(v)).collect();
            for part in [
                Biclique::new(shift(a_out, from), shift(bc.b.iter().copied(), to)),
                Biclique::new(shift(a_in, from), shift(b_out, to)),
            ] {
                if !part.is_empty() {
                    cert.push(part);
                }
            }
        }
    }
    if !verify_covering(&g_prime, &BicliqueCovering::new(1, cyclic))? {
        return Err(Error::Consistency("cyclic bicliques do not partition G'".into()));
    }
    let mut g = g_prime;
    for &x in &s {
        for &y in &s {
            for b in 0..3 {
                for c in 0..3 {
                    g.remove_edge(x + b * nn, y + c * nn);
                }
            }
        }
    }
    let sv: Vec<usize> = s.iter().copied().collect();
    for b in 0..3 {
        let off = b * nn;
        for (i, &x) in sv.iter().enumerate() {
            for &y in &sv[i + 1..] {
                if bundle.h.has_edge(x, y) {
                    g.insert(x + off, y + off);
                }
            }
        }
        for bc in &bundle.covering.bicliques {
            let part = Biclique::new(
                shift(bc.a.iter().copied().filter(|v| s.contains(v)), off),
                shift(bc.b.iter().copied().filter(|v| s.contains(v)), off),
            );
            if !part.is_empty() {
                cert.push(part);
            }
        }
    }
    Ok((g, BicliqueCovering::new(1, cert)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            writeln!(f, "{tag} {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Re-checks every claim of a transform output against the input matrix.
pub fn verify_output(m: &BoolMatrix, out: &TransformOutput, budgets: Budgets) -> Report {
    let mut checks = vec![];
    let mut push = |name, ok: bool, detail: String| {
        checks.push(Check {
            name,
            status: if ok { Status::Pass } else { Status::Fail },
            detail,
        })
    };
    let g = &out.graph;
    let params = regular_params(m);
    push("input", params.is_ok(), match &params {
        Ok((n, d)) => format!("{n}x{n}, {d}-regular"),
        Err(e) => e.to_string(),
    });
    let (n, d) = *params.as_ref().unwrap_or(&(0, 0));
    push("simple", g.is_simple(), format!("{} loops", g.loops().len()));
    let expected_degree = match out.case_tag {
        1 => Some(d * d),
        2 => Some(2 * n * d),
        _ => None,
    };
    let actual = g.regular_degree();
    push(
        "regular",
        expected_degree.is_some() && actual == expected_degree && out.degree == actual.unwrap_or(usize::MAX),
        format!("case {}, degree {:?}, expected {:?}", out.case_tag, actual, expected_degree),
    );
    let copies = if out.case_tag == 1 { 2 } else { 3 };
    let nn = n * n;
    let map_ok = g.n() == copies * nn
        && out.vertex_map.len() == g.n()
        && out
            .vertex_map
            .iter()
            .enumerate()
            .all(|(v, &[i, j, b])| i < n && j < n && b < copies && v == b * nn + i * n + j);
    push("vertex_map", map_ok, format!("{} vertices", g.n()));
    let cert_ok = out.bp_certificate.t == 1
        && matches!(verify_covering(g, &out.bp_certificate), Ok(true));
    push("certificate", cert_ok, format!("{} bicliques", out.bp_certificate.len()));
    let bound = if out.case_tag == 1 { 33 * out.k * out.k } else { 9 * out.k };
    push(
        "certificate_size",
        out.bp_certificate.len() <= bound,
        format!("{} <= {bound}", out.bp_certificate.len()),
    );
    push(
        "chi_threshold",
        out.chi_threshold == ceil_cbrt(out.m as u64),
        format!("ceil(m^(1/3)) for m = {}", out.m),
    );
    let mut verdict = |name, solved: bool, value: usize, claimed: usize| {
        checks.push(Check {
            name,
            status: if !solved {
                Status::Skipped
            } else if value == claimed {
                Status::Pass
            } else {
                Status::Fail
            },
            detail: if solved {
                format!("solver {value}, claimed {claimed}")
            } else {
                "solver budget exhausted".into()
            },
        })
    };
    if params.is_ok() {
        let k = binary_rank(m, budgets.rank);
        verdict("k", k.optimal, k.value, out.k);
        let mb = boolean_rank(&m.complement(), budgets.rank);
        verdict("m", mb.optimal, mb.value, out.m);
    }
    let target = out.chi_threshold.saturating_sub(1) as usize;
    let (ok, detail) = match k_colorable_with_budget(g, target, budgets.graph) {
        Ok(None) => (true, format!("no proper {target}-coloring")),
        Ok(Some(_)) => (false, format!("found a proper {target}-coloring")),
        Err(e) => (false, e.to_string()),
    };
    checks.push(Check {
        name: "not_colorable",
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
    });
    Report { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{coverage_count, is_proper_coloring};

    fn complement_i2() -> BoolMatrix {
        BoolMatrix::identity(2).unwrap().complement()
    }

    #[test]
    fn build_h_examples() {
        let one = BoolMatrix::ones(1, 1).unwrap();
        let h = build_h(&one).unwrap();
        assert_eq!(h.edges(), vec![(0, 0)]);
        let i2 = BoolMatrix::identity(2).unwrap();
        let h = build_h(&i2).unwrap();
        assert_eq!(h.loops(), vec![0, 3]);
        assert!(h.has_edge(0, 1));
        assert!(build_h(&BoolMatrix::zeros(2, 2).unwrap()).unwrap().edges().is_empty());
        assert!(build_h(&BoolMatrix::zeros(2, 3).unwrap()).is_err());
    }

    #[test]
    fn covering_examples() {
        let i2 = BoolMatrix::identity(2).unwrap();
        let p = binary_rank(&i2, 1000).certificate;
        let bundle = build_bundle(&i2, &p).unwrap();
        assert_eq!(bundle.covering.len(), 2);
        assert!(verify_covering(&bundle.h, &bundle.covering).unwrap());
        assert_eq!(coverage_count(&bundle.h, &bundle.covering.bicliques, (0, 0)).unwrap(), 1);
        for e in bundle.h.edges() {
            let c = coverage_count(&bundle.h, &bundle.covering.bicliques, e).unwrap();
            assert!(c == 1 || c == 2);
        }
        assert_eq!(
            bundle.h0_1.edge_count() + bundle.h0_2.edge_count(),
            h0(&bundle).edge_count()
        );
    }

    #[test]
    fn zero_cover_from_optimal_coloring() {
        let m = complement_i2();
        let p = binary_rank(&m, 1000).certificate;
        let bundle = build_bundle(&m, &p).unwrap();
        let h0 = h0(&bundle);
        let col = chromatic_number_with_budget(&h0, 1000).unwrap();
        assert!(is_proper_coloring(&h0, &col.colors));
        let cover = zero_cover_from_coloring(&bundle, &col).unwrap();
        assert!(verify_rectangles(&m.complement(), &cover).unwrap());
        assert!(col.count >= boolean_rank(&m.complement(), 1000).value);
    }

    #[test]
    fn transform_small_cases() {
        for m in [complement_i2(), BoolMatrix::identity(2).unwrap()] {
            let out = transform(&m, None, Budgets::default()).unwrap();
            assert_eq!(out.k, 2);
            assert_eq!(out.m, 2);
            assert_eq!(out.chi_threshold, 2);
            let report = verify_output(&m, &out, Budgets::default());
            assert!(report.passed(), "{report}");
            assert_eq!(TransformOutput::from_json(&out.to_json()).unwrap(), out);
        }
        assert!(transform(&BoolMatrix::ones(2, 2).unwrap(), None, Budgets::default()).is_err());
        let irregular = BoolMatrix::from_rows(&["10", "10"]).unwrap();
        assert!(transform(&irregular, None, Budgets::default()).is_err());
    }

    #[test]
    fn case_two_with_inflated_m() {
        // the honest m never reaches case 2 at this size, so force it
        let m = BoolMatrix::identity(5).unwrap();
        let out = transform(&m, Some(9), Budgets::default()).unwrap();
        assert_eq!(out.case_tag, 2);
        assert_eq!(out.degree, 10);
        assert_eq!(out.graph.n(), 75);
        let report = verify_output(&m, &out, Budgets::default());
        for c in &report.checks {
            let expected = if c.name == "m" { Status::Fail } else { Status::Pass };
            assert_eq!(c.status, expected, "{report}");
        }
    }

    #[test]
    fn perturbed_outputs_fail() {
        let m = complement_i2();
        let out = transform(&m, None, Budgets::default()).unwrap();
        let mut dropped = out.clone();
        dropped.bp_certificate.bicliques.pop();
        let r = verify_output(&m, &dropped, Budgets::default());
        assert_eq!(r.get("certificate").unwrap().status, Status::Fail);
        let mut raised = out.clone();
        raised.chi_threshold += 5;
        let r = verify_output(&m, &raised, Budgets::default());
        assert!(!r.passed());
    }
}
