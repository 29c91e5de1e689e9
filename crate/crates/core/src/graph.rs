//! Graph specifications, graph-state construction and local complementation.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{QssError, Result, MAX_QUBITS};
use crate::linalg::{Matrix, Pauli, PauliString, StateVector};
use crate::scalar::{c, Real};

/// Undirected simple graph with a distinguished dealer vertex; every other vertex is a player.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct GraphSpec {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    dealer: usize,
    players: Vec<usize>,
}

/// On-disk form: `{"n": 5, "edges": [[0,1], ...], "dealer": 0}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
    dealer: usize,
}

impl TryFrom<GraphFile> for GraphSpec {
    type Error = QssError;

    fn try_from(f: GraphFile) -> Result<Self> {
        GraphSpec::new(f.n, f.edges.iter().map(|e| (e[0], e[1])), f.dealer)
    }
}

impl From<GraphSpec> for GraphFile {
    fn from(g: GraphSpec) -> Self {
        GraphFile {
            n: g.n,
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
            dealer: g.dealer,
        }
    }
}

impl GraphSpec {
    /// Rejects self-loops, duplicate edges, out-of-range vertices and graphs above the qubit cap.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>, dealer: usize) -> Result<Self> {
        if n == 0 {
            return Err(QssError::arg("graph needs at least one vertex"));
        }
        if n > MAX_QUBITS {
            return Err(QssError::Capacity { requested: n });
        }
        if dealer >= n {
            return Err(QssError::arg(format!("dealer {dealer} out of range")));
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(QssError::arg(format!("edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(QssError::arg(format!("self-loop at {u}")));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(QssError::arg(format!("duplicate edge ({u},{v})")));
            }
        }
        Ok(Self {
            n,
            edges: set,
            dealer,
            players: (0..n).filter(|&v| v != dealer).collect(),
        })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, [], 0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dealer(&self) -> usize {
        self.dealer
    }

    pub fn players(&self) -> &[usize] {
        &self.players
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&w| w != v && self.has_edge(v, w)).collect()
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(QssError::arg(format!("vertex {v} out of range for {} vertices", self.n)));
        }
        Ok(())
    }

    fn toggled(&self, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut edges = self.edges.clone();
        for (u, v) in pairs {
            let e = (u.min(v), u.max(v));
            if !edges.remove(&e) {
                edges.insert(e);
            }
        }
        Self {
            edges,
            ..self.clone()
        }
    }

    /// Vertex `v` becomes `perm[v]`; the dealer moves with it.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        Self::new(
            self.n,
            self.edges.iter().map(|&(u, v)| (perm[u], perm[v])),
            perm[self.dealer],
        )
    }

    /// Vertex permutations that fix the dealer and preserve the edge set.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut perm: Vec<usize> = (0..self.n).collect();
        permutations(&mut perm, 0, &mut |p| {
            if p[self.dealer] == self.dealer
                && self.edges.iter().all(|&(u, v)| self.has_edge(p[u], p[v]))
            {
                out.push(p.to_vec());
            }
        });
        out
    }
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(QssError::arg("permutation length differs from vertex count"));
    }
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(QssError::arg(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(())
}

fn permutations(p: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// `(∏ CZ_uv) |+⟩^⊗n`, computed amplitude by amplitude.
pub fn build_graph_state<T: Real>(g: &GraphSpec) -> StateVector<T> {
    let n = g.n;
    let amp = T::one() / T::lit((1u64 << n) as f64).sqrt();
    let bit = |x: usize, q: usize| (x >> (n - 1 - q)) & 1;
    let amps = (0..1usize << n)
        .map(|x| {
            let parity = g.edges.iter().filter(|&&(u, v)| bit(x, u) & bit(x, v) == 1).count() % 2;
            if parity == 0 {
                c(amp, T::zero())
            } else {
                c(-amp, T::zero())
            }
        })
        .collect();
    StateVector::new(amps).expect("graph state is normalised")
}

/// `K_v = X_v ∏_{w∈N(v)} Z_w` for each vertex in order.
pub fn stabilizer_generators(g: &GraphSpec) -> Vec<PauliString> {
    (0..g.n)
        .map(|v| {
            let mut s = PauliString::on(g.n, &g.neighbors(v), Pauli::Z);
            s = &s * &PauliString::single(g.n, v, Pauli::X);
            s
        })
        .collect()
}

/// Single-qubit gates used by local complementation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalGate {
    /// `√(−iX) = (I − iX)/√2`
    SqrtMinusIX,
    /// `√(iZ) = (I + iZ)/√2`
    SqrtIZ,
}

impl LocalGate {
    pub fn matrix<T: Real>(self) -> Matrix<T> {
        let h = T::FRAC_1_SQRT_2();
        let z = T::zero();
        match self {
            LocalGate::SqrtMinusIX => Matrix::from_fn(2, |i, j| {
                if i == j {
                    c(h, z)
                } else {
                    c(z, -h)
                }
            }),
            LocalGate::SqrtIZ => {
                let mut m = Matrix::zeros(2);
                m[(0, 0)] = c(h, h);
                m[(1, 1)] = c(h, -h);
                m
            }
        }
    }
}

/// Result of complementing a graph at one vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalComplementationRecord {
    pub vertex: usize,
    pub new_graph: GraphSpec,
    /// `(qubit, gate)` pairs mapping the old graph state onto the new one.
    pub local_unitaries: Vec<(usize, LocalGate)>,
}

impl LocalComplementationRecord {
    pub fn apply<T: Real>(&self, psi: &StateVector<T>) -> Result<StateVector<T>> {
        let mut out = psi.clone();
        for &(q, gate) in &self.local_unitaries {
            out = out.apply_single(q, &gate.matrix())?;
        }
        Ok(out)
    }
}

/// Toggles every edge inside `N(v)`.
pub fn local_complement(g: &GraphSpec, v: usize) -> Result<LocalComplementationRecord> {
    g.check_vertex(v)?;
    let nb = g.neighbors(v);
    let mut pairs = Vec::new();
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            pairs.push((a, b));
        }
    }
    let mut local_unitaries = vec![(v, LocalGate::SqrtMinusIX)];
    local_unitaries.extend(nb.iter().map(|&w| (w, LocalGate::SqrtIZ)));
    Ok(LocalComplementationRecord {
        vertex: v,
        new_graph: g.toggled(pairs),
        local_unitaries,
    })
}

/// Shortest sequence of local complementations turning `from` into `to` (edge sets only),
/// searched breadth-first up to `max_len` steps.
pub fn find_lc_sequence(from: &GraphSpec, to: &GraphSpec, max_len: usize) -> Option<Vec<usize>> {
    if from.n != to.n {
        return None;
    }
    let mut seen = HashSet::from([from.edges.clone()]);
    let mut queue = VecDeque::from([(from.clone(), Vec::new())]);
    while let Some((g, path)) = queue.pop_front() {
        if g.edges == to.edges {
            return Some(path);
        }
        if path.len() == max_len {
            continue;
        }
        for v in 0..g.n {
            let next = local_complement(&g, v).expect("vertex in range").new_graph;
            if seen.insert(next.edges.clone()) {
                let mut p = path.clone();
                p.push(v);
                queue.push_back((next, p));
            }
        }
    }
    None
}

/// Dealer 0 joined to all four players, plus the square 1–3–2–4–1 among them.
pub const RESOURCE_EDGES: [(usize, usize); 8] =
    [(0, 1), (0, 2), (0, 3), (0, 4), (1, 3), (1, 4), (2, 3), (2, 4)];

pub fn canonical_graph() -> GraphSpec {
    GraphSpec::new(5, RESOURCE_EDGES, 0).expect("static graph is valid")
}

pub fn canonical_resource<T: Real>() -> (GraphSpec, StateVector<T>) {
    let g = canonical_graph();
    let psi = build_graph_state(&g);
    (g, psi)
}

/// The four-player square `1–3–2–4–1` on qubits 1..=4 (as a 4-vertex graph on 0..=3).
pub fn square_graph() -> GraphSpec {
    GraphSpec::new(4, [(0, 2), (2, 1), (1, 3), (3, 0)], 0).expect("static graph is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(GraphSpec::new(3, [(0, 0)], 0).is_err());
        assert!(GraphSpec::new(3, [(0, 1), (1, 0)], 0).is_err());
        assert!(GraphSpec::new(3, [(0, 3)], 0).is_err());
        assert!(GraphSpec::new(3, [], 3).is_err());
        assert!(GraphSpec::new(7, [], 0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = canonical_graph();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.starts_with(r#"{"n":5,"edges":[[0,1],"#));
        let back: GraphSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<GraphSpec>(r#"{"n":2,"edges":[[0,0]],"dealer":0}"#).is_err());
    }

    #[test]
    fn empty_graph_is_plus_product() {
        let psi = build_graph_state::<f64>(&GraphSpec::empty(2).unwrap());
        assert!(psi.equals_up_to_phase(&StateVector::plus(2).unwrap(), 1e-12));
        let gens = stabilizer_generators(&GraphSpec::empty(3).unwrap());
        assert_eq!(gens[0].to_string(), "+XII");
    }

    #[test]
    fn single_edge() {
        let g = GraphSpec::new(2, [(0, 1)], 0).unwrap();
        let psi = build_graph_state::<f64>(&g);
        // (|0+⟩ + |1−⟩)/√2
        let want = StateVector::normalized(crate::linalg::state::amps_from_f64(&[
            (1.0, 0.0),
            (1.0, 0.0),
            (1.0, 0.0),
            (-1.0, 0.0),
        ]))
        .unwrap();
        assert!(psi.equals_up_to_phase(&want, 1e-12));
        let gens: Vec<String> = stabilizer_generators(&g).iter().map(|s| s.to_string()).collect();
        assert_eq!(gens, ["+XZ", "+ZX"]);
    }

    #[test]
    fn lc_on_path_gives_triangle() {
        let path = GraphSpec::new(3, [(0, 1), (1, 2)], 1).unwrap();
        let rec = local_complement(&path, 1).unwrap();
        assert!(rec.new_graph.has_edge(0, 2));
        assert_eq!(rec.new_graph.edge_count(), 3);
        let lhs = rec.apply(&build_graph_state::<f64>(&path)).unwrap();
        assert!(lhs.equals_up_to_phase(&build_graph_state(&rec.new_graph), 1e-9));
    }

    #[test]
    fn lc_single_neighbour_is_trivial() {
        let g = GraphSpec::new(2, [(0, 1)], 0).unwrap();
        assert_eq!(local_complement(&g, 0).unwrap().new_graph, g);
        assert!(local_complement(&g, 2).is_err());
    }

    #[test]
    fn resource_automorphisms_contain_square_symmetries() {
        let autos = canonical_graph().automorphisms();
        assert_eq!(autos.len(), 8);
        assert!(autos.contains(&vec![0, 2, 1, 4, 3]));
    }

    #[test]
    fn sqrt_gates_square_to_paulis() {
        let x = LocalGate::SqrtMinusIX.matrix::<f64>();
        let want = Pauli::X.matrix::<f64>().scale(c(0.0, -1.0));
        assert!((&x * &x).max_abs_diff(&want) < 1e-12);
        let z = LocalGate::SqrtIZ.matrix::<f64>();
        let want = Pauli::Z.matrix::<f64>().scale(c(0.0, 1.0));
        assert!((&z * &z).max_abs_diff(&want) < 1e-12);
    }
}
