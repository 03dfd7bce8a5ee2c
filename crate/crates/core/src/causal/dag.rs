//! Directed acyclic graphs, d-separation, and minimal-DAG enumeration.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{all_canonical_statements, CausalError, CiStatement};

/// A DAG over named nodes. Edges are `(parent, child)` index pairs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Dag {
    nodes: Vec<String>,
    edges: BTreeSet<(usize, usize)>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    pub fn new<'a>(
        nodes: impl IntoIterator<Item = impl Into<String>>,
        edges: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self, CausalError> {
        let nodes: Vec<String> = nodes.into_iter().map(Into::into).collect();
        let index = |name: &str| {
            nodes
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| CausalError::UnknownVariable(name.to_string()))
        };
        let mut idx_edges = BTreeSet::new();
        for (a, b) in edges {
            idx_edges.insert((index(a)?, index(b)?));
        }
        Self::from_indices(nodes, idx_edges)
    }

    pub fn from_indices(
        nodes: Vec<String>,
        edges: BTreeSet<(usize, usize)>,
    ) -> Result<Self, CausalError> {
        let n = nodes.len();
        {
            let mut seen = BTreeSet::new();
            for name in &nodes {
                if !seen.insert(name) {
                    return Err(CausalError::DuplicateVariable(name.clone()));
                }
            }
        }
        let mut parents = alloc::vec![Vec::new(); n];
        let mut children = alloc::vec![Vec::new(); n];
        for &(a, b) in &edges {
            if a >= n || b >= n || a == b {
                return Err(CausalError::BadParameters("edge out of range".to_string()));
            }
            parents[b].push(a);
            children[a].push(b);
        }
        let dag = Dag {
            nodes,
            edges,
            parents,
            children,
        };
        if dag.has_cycle() {
            return Err(CausalError::NotAcyclic);
        }
        Ok(dag)
    }

    fn has_cycle(&self) -> bool {
        // Kahn's algorithm.
        let n = self.nodes.len();
        let mut indeg: Vec<usize> = (0..n).map(|i| self.parents[i].len()).collect();
        let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop() {
            seen += 1;
            for &c in &self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push(c);
                }
            }
        }
        seen != n
    }

    pub fn node_names(&self) -> Vec<&str> {
        self.nodes.iter().map(String::as_str).collect()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges
            .iter()
            .map(|&(a, b)| (self.nodes[a].as_str(), self.nodes[b].as_str()))
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn parents(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn has_edge(&self, parent: &str, child: &str) -> bool {
        match (self.index_of(parent), self.index_of(child)) {
            (Some(a), Some(b)) => self.edges.contains(&(a, b)),
            _ => false,
        }
    }

    /// d-separation of `x` from the set `ys` given `zs`, by the standard
    /// ancestral-moralization route: restrict to the ancestral closure of all
    /// named nodes, moralize (marry parents, drop directions), delete the
    /// conditioning nodes, and test undirected reachability.
    pub fn d_separated(&self, x: &str, ys: &[&str], zs: &[&str]) -> Result<bool, CausalError> {
        let index = |name: &str| {
            self.index_of(name)
                .ok_or_else(|| CausalError::UnknownVariable(name.to_string()))
        };
        let x = index(x)?;
        let ys: Vec<usize> = ys.iter().map(|n| index(n)).collect::<Result<_, _>>()?;
        let zs: Vec<usize> = zs.iter().map(|n| index(n)).collect::<Result<_, _>>()?;
        Ok(self.d_separated_idx(&[x], &ys, &zs))
    }

    pub(super) fn d_separated_idx(&self, xs: &[usize], ys: &[usize], zs: &[usize]) -> bool {
        if xs.is_empty() || ys.is_empty() {
            return true;
        }
        let n = self.nodes.len();
        // Ancestral closure of xs ∪ ys ∪ zs.
        let mut relevant = alloc::vec![false; n];
        let mut stack: Vec<usize> = xs.iter().chain(ys).chain(zs).copied().collect();
        while let Some(v) = stack.pop() {
            if core::mem::replace(&mut relevant[v], true) {
                continue;
            }
            stack.extend_from_slice(&self.parents[v]);
        }
        // Moral adjacency within the closure.
        let mut adj: Vec<BTreeSet<usize>> = alloc::vec![BTreeSet::new(); n];
        for v in 0..n {
            if !relevant[v] {
                continue;
            }
            let ps: Vec<usize> = self.parents[v]
                .iter()
                .copied()
                .filter(|&p| relevant[p])
                .collect();
            for &p in &ps {
                adj[v].insert(p);
                adj[p].insert(v);
            }
            for i in 0..ps.len() {
                for j in (i + 1)..ps.len() {
                    adj[ps[i]].insert(ps[j]);
                    adj[ps[j]].insert(ps[i]);
                }
            }
        }
        // BFS from xs avoiding zs.
        let mut blocked = alloc::vec![false; n];
        for &z in zs {
            blocked[z] = true;
        }
        let mut target = alloc::vec![false; n];
        for &y in ys {
            if !blocked[y] {
                target[y] = true;
            }
        }
        let mut seen = alloc::vec![false; n];
        let mut queue: Vec<usize> = xs
            .iter()
            .copied()
            .filter(|&v| relevant[v] && !blocked[v])
            .collect();
        for &v in &queue {
            seen[v] = true;
        }
        while let Some(v) = queue.pop() {
            if target[v] {
                return false;
            }
            for &w in &adj[v] {
                if !seen[w] && !blocked[w] {
                    seen[w] = true;
                    queue.push(w);
                }
            }
        }
        true
    }

    /// Tests whether d-separation certifies `stmt` in this DAG.
    pub fn implies(&self, stmt: &CiStatement) -> Result<bool, CausalError> {
        let rhs: Vec<&str> = stmt.rhs.iter().map(String::as_str).collect();
        let given: Vec<&str> = stmt.given.iter().map(String::as_str).collect();
        self.d_separated(&stmt.lhs, &rhs, &given)
    }

    /// Every canonical statement over the node names that d-separation
    /// certifies — the independences the Causal Markov Condition extracts
    /// from this graph.
    pub fn markov_implied(&self) -> Vec<CiStatement> {
        let names = self.node_names();
        all_canonical_statements(&names)
            .into_iter()
            .filter(|s| self.implies(s).expect("statements range over the nodes"))
            .collect()
    }

    /// Deterministic DOT rendering with solid directed edges.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        out.push_str(&alloc::format!("digraph \"{name}\" {{\n"));
        for node in &self.nodes {
            out.push_str(&alloc::format!("  \"{node}\";\n"));
        }
        for (a, b) in self.edges() {
            out.push_str(&alloc::format!("  \"{a}\" -> \"{b}\";\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// All DAGs over `names`, enumerated by orienting each unordered node pair
/// three ways (absent, forward, backward) and keeping the acyclic results.
/// Guarded to at most 6 variables (29,281 DAGs at 5, ~3.8M at 6).
pub fn enumerate_dags(names: &[&str]) -> Result<Vec<Dag>, CausalError> {
    let n = names.len();
    if n > 6 {
        return Err(CausalError::TooManyVariables(n));
    }
    let nodes: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    let total = 3usize.pow(pairs.len() as u32);
    for code in 0..total {
        let mut c = code;
        let mut edges = BTreeSet::new();
        for &(i, j) in &pairs {
            match c % 3 {
                1 => {
                    edges.insert((i, j));
                }
                2 => {
                    edges.insert((j, i));
                }
                _ => {}
            }
            c /= 3;
        }
        if let Ok(dag) = Dag::from_indices(nodes.clone(), edges) {
            out.push(dag);
        }
    }
    Ok(out)
}

/// Brute-force minimal-DAG search.
///
/// Keeps every DAG whose d-separation-implied statements cover `required` and
/// stay inside `observed` (no implied independence may be false), then
/// returns the edge-minimal survivors: deleting any single edge only grows
/// the implied set, so a survivor is minimal exactly when no single-edge
/// deletion also survives, and that already rules out every proper subgraph.
///
/// Results are sorted by edge count, then lexicographically by edge list.
pub fn minimal_dags(
    observed: &[CiStatement],
    required: &[CiStatement],
    names: &[&str],
) -> Result<Vec<Dag>, CausalError> {
    let universe = all_canonical_statements(names);
    let position: BTreeMap<&CiStatement, usize> =
        universe.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let lookup = |s: &CiStatement| -> Result<usize, CausalError> {
        let canon = s.clone().canonical();
        position
            .get(&canon)
            .copied()
            .ok_or_else(|| CausalError::UnknownVariable(canon.to_string()))
    };
    let mut observed_mask = alloc::vec![false; universe.len()];
    for s in observed {
        observed_mask[lookup(s)?] = true;
    }
    let mut required_idx = Vec::new();
    for s in required {
        let i = lookup(s)?;
        if !observed_mask[i] {
            return Err(CausalError::RequiredNotObserved(s.to_string()));
        }
        required_idx.push(i);
    }

    let passes = |dag: &Dag| -> bool {
        for &i in &required_idx {
            if !dag.implies(&universe[i]).expect("universe statements") {
                return false;
            }
        }
        for (i, stmt) in universe.iter().enumerate() {
            if !observed_mask[i] && dag.implies(stmt).expect("universe statements") {
                return false;
            }
        }
        true
    };

    let all = enumerate_dags(names)?;
    let mut passing: BTreeSet<BTreeSet<(usize, usize)>> = BTreeSet::new();
    let mut candidates = Vec::new();
    for dag in all {
        if passes(&dag) {
            passing.insert(dag.edges.clone());
            candidates.push(dag);
        }
    }
    let mut minimal: Vec<Dag> = candidates
        .into_iter()
        .filter(|dag| {
            dag.edges.iter().all(|e| {
                let mut smaller = dag.edges.clone();
                smaller.remove(e);
                !passing.contains(&smaller)
            })
        })
        .collect();
    minimal.sort_by(|a, b| {
        a.edge_count()
            .cmp(&b.edge_count())
            .then_with(|| a.edges.cmp(&b.edges))
    });
    Ok(minimal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_cycles_and_unknown_nodes() {
        assert!(matches!(
            Dag::new(["A", "B"], [("A", "B"), ("B", "A")]),
            Err(CausalError::NotAcyclic)
        ));
        assert!(matches!(
            Dag::new(["A"], [("A", "Q")]),
            Err(CausalError::UnknownVariable(_))
        ));
    }

    #[test]
    fn collider_blocks_unconditioned_path() {
        let g = Dag::new(["A", "X", "L"], [("A", "X"), ("L", "X")]).unwrap();
        assert!(g.d_separated("A", &["L"], &[]).unwrap());
        assert!(!g.d_separated("A", &["L"], &["X"]).unwrap());
    }

    #[test]
    fn chain_and_fork_block_on_the_middle() {
        let chain = Dag::new(["A", "B", "C"], [("A", "B"), ("B", "C")]).unwrap();
        assert!(!chain.d_separated("A", &["C"], &[]).unwrap());
        assert!(chain.d_separated("A", &["C"], &["B"]).unwrap());
        let fork = Dag::new(["A", "B", "C"], [("B", "A"), ("B", "C")]).unwrap();
        assert!(!fork.d_separated("A", &["C"], &[]).unwrap());
        assert!(fork.d_separated("A", &["C"], &["B"]).unwrap());
    }

    #[test]
    fn collider_descendant_in_conditioning_set_opens_the_path() {
        let g = Dag::new(["A", "B", "C", "D"], [("A", "C"), ("B", "C"), ("C", "D")]).unwrap();
        assert!(g.d_separated("A", &["B"], &[]).unwrap());
        assert!(!g.d_separated("A", &["B"], &["D"]).unwrap());
    }

    #[test]
    fn bell_scenario_graphs() {
        // Left graph: A→X, Λ→X, Λ→Y, B→Y.
        let left = Dag::new(
            ["A", "B", "L", "X", "Y"],
            [("A", "X"), ("L", "X"), ("L", "Y"), ("B", "Y")],
        )
        .unwrap();
        assert!(left.d_separated("X", &["B"], &["A", "L"]).unwrap());
        assert!(left.d_separated("Y", &["A"], &["B", "L"]).unwrap());
        // Right graph adds A→Y, breaking the last independence.
        let right = Dag::new(
            ["A", "B", "L", "X", "Y"],
            [("A", "X"), ("L", "X"), ("L", "Y"), ("B", "Y"), ("A", "Y")],
        )
        .unwrap();
        assert!(!right.d_separated("Y", &["A"], &["B", "L"]).unwrap());
        assert!(right.d_separated("X", &["B"], &["A", "L"]).unwrap());
    }

    #[test]
    fn markov_implied_of_empty_graph_is_everything() {
        let g = Dag::new(["A", "B", "L"], core::iter::empty::<(&str, &str)>()).unwrap();
        let implied = g.markov_implied();
        assert_eq!(
            implied.len(),
            all_canonical_statements(&["A", "B", "L"]).len()
        );
    }

    #[test]
    fn collider_graph_implies_exactly_the_exogenous_independence() {
        // Fig-7-shaped: C→Z←L.
        let g = Dag::new(["C", "L", "Z"], [("C", "Z"), ("L", "Z")]).unwrap();
        let implied = g.markov_implied();
        let expected = alloc::vec![CiStatement::new("C", ["L"], Vec::<String>::new()).unwrap()];
        assert_eq!(implied, expected);
    }

    #[test]
    fn dag_count_over_five_labelled_nodes() {
        let all = enumerate_dags(&["A", "B", "C", "D", "E"]).unwrap();
        assert_eq!(all.len(), 29_281);
        assert!(enumerate_dags(&["1", "2", "3", "4", "5", "6", "7"]).is_err());
    }

    #[test]
    fn minimal_dag_for_the_collider_scenario() {
        // Observed = exactly C ⫫ L (the faithful set of C→Z←L); required the
        // same. The unique minimal DAG is the collider at Z.
        let observed = alloc::vec![CiStatement::new("C", ["L"], Vec::<String>::new()).unwrap()];
        let minimal = minimal_dags(&observed, &observed, &["C", "L", "Z"]).unwrap();
        assert_eq!(minimal.len(), 1);
        let g = &minimal[0];
        assert_eq!(g.edge_count(), 2);
        assert!(g.has_edge("C", "Z"));
        assert!(g.has_edge("L", "Z"));
    }

    #[test]
    fn minimal_dags_are_edge_minimal() {
        // Deleting any edge from a returned DAG breaks the two-sided filter.
        let observed = alloc::vec![
            CiStatement::new("C", ["L"], Vec::<String>::new()).unwrap(),
            CiStatement::new("C", ["L"], ["Z"]).unwrap(),
        ];
        let required = alloc::vec![observed[0].clone()];
        let names = ["C", "L", "Z"];
        let universe = all_canonical_statements(&names);
        let passes = |dag: &Dag| {
            required.iter().all(|s| dag.implies(s).unwrap())
                && universe
                    .iter()
                    .all(|s| !dag.implies(s).unwrap() || observed.contains(s))
        };
        for dag in minimal_dags(&observed, &required, &names).unwrap() {
            assert!(passes(&dag));
            let edges: Vec<(usize, usize)> = dag.edges.iter().copied().collect();
            for e in edges {
                let mut smaller = dag.edges.clone();
                smaller.remove(&e);
                let sub = Dag::from_indices(dag.nodes.clone(), smaller).unwrap();
                assert!(!passes(&sub), "removing {e:?} still passes");
            }
        }
    }

    #[test]
    fn required_must_be_observed() {
        let observed = alloc::vec![CiStatement::new("C", ["L"], Vec::<String>::new()).unwrap()];
        let required = alloc::vec![CiStatement::new("C", ["Z"], Vec::<String>::new()).unwrap()];
        assert!(matches!(
            minimal_dags(&observed, &required, &["C", "L", "Z"]),
            Err(CausalError::RequiredNotObserved(_))
        ));
    }

    #[test]
    fn dot_rendering() {
        let g = Dag::new(["C", "L", "Z"], [("C", "Z"), ("L", "Z")]).unwrap();
        let dot = g.to_dot("fig");
        assert!(dot.contains("\"C\" -> \"Z\""));
        assert!(dot.contains("\"L\" -> \"Z\""));
        assert_eq!(dot, g.to_dot("fig"));
    }
}
