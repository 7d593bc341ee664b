use serde::{Deserialize, Serialize};

use super::{ClusterAssignment, ClusterParams, MstEdge};

/// Upper bound on lambda, used for zero-weight merges.
pub const LAMBDA_MAX: f64 = 1e300;

/// Density level `1 / weight`, capped at [`LAMBDA_MAX`].
pub fn lambda_of(weight: f64) -> f64 {
    if weight > 0.0 {
        (1.0 / weight).min(LAMBDA_MAX)
    } else {
        LAMBDA_MAX
    }
}

/// One row of the condensed tree. Cluster ids start at `n` (the root);
/// children below `n` are points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CondensedEntry {
    pub parent: usize,
    pub child: usize,
    pub lambda: f64,
    pub size: usize,
}

/// Single-linkage hierarchy with equal-weight merges collapsed into one node.
struct Dendrogram {
    /// For nodes `>= n`: merge weight and children. Nodes `< n` are points.
    weight: Vec<f64>,
    children: Vec<Vec<usize>>,
    size: Vec<usize>,
    n: usize,
}

impl Dendrogram {
    fn build(mst: &[MstEdge], n: usize) -> Self {
        let mut edges: Vec<&MstEdge> = mst.iter().collect();
        edges.sort_by(|a, b| a.weight.total_cmp(&b.weight).then(a.i.cmp(&b.i)).then(a.j.cmp(&b.j)));

        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut node_of: Vec<usize> = (0..n).collect();
        let mut d = Dendrogram { weight: vec![0.0; n], children: vec![Vec::new(); n], size: vec![1; n], n };

        let mut start = 0;
        while start < edges.len() {
            let w = edges[start].weight;
            let mut end = start;
            while end < edges.len() && edges[end].weight == w {
                end += 1;
            }
            // pending[root] collects the tree nodes merged into that root at this level
            let mut pending: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
            for e in &edges[start..end] {
                let (ra, rb) = (find(&mut parent, e.i), find(&mut parent, e.j));
                if ra == rb {
                    continue;
                }
                let a_nodes = pending.remove(&ra).unwrap_or_else(|| vec![node_of[ra]]);
                let b_nodes = pending.remove(&rb).unwrap_or_else(|| vec![node_of[rb]]);
                let (root, other) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent[other] = root;
                let mut merged = a_nodes;
                merged.extend(b_nodes);
                pending.insert(root, merged);
            }
            for (root, mut kids) in pending {
                kids.sort_unstable();
                let id = d.weight.len();
                d.size.push(kids.iter().map(|&k| d.size[k]).sum());
                d.weight.push(w);
                d.children.push(kids);
                node_of[root] = id;
            }
            start = end;
        }
        d
    }

    fn root(&self) -> usize {
        self.weight.len() - 1
    }

    fn leaves(&self, node: usize, out: &mut Vec<usize>) {
        let mut stack = vec![node];
        while let Some(x) = stack.pop() {
            if x < self.n {
                out.push(x);
            } else {
                stack.extend(self.children[x].iter().copied());
            }
        }
    }
}

struct Cluster {
    parent: Option<usize>,
    birth: f64,
    size: usize,
    children: Vec<usize>,
    stability: f64,
}

/// Condenses the MST hierarchy and selects clusters by excess of mass.
pub fn extract_clusters(mst: &[MstEdge], n: usize, params: &ClusterParams) -> ClusterAssignment {
    let mcs = params.min_cluster_size;
    if n < mcs || n < 2 || mst.len() + 1 != n {
        return ClusterAssignment::all_noise(n);
    }
    let dendro = Dendrogram::build(mst, n);

    let mut clusters = vec![Cluster { parent: None, birth: 0.0, size: n, children: Vec::new(), stability: 0.0 }];
    let mut fall_out_cluster = vec![0usize; n];
    let mut fall_out_lambda = vec![0.0f64; n];
    let mut tree = Vec::new();
    let mut stack = vec![(dendro.root(), 0usize)];
    let mut leaves = Vec::new();

    while let Some((node, cid)) = stack.pop() {
        if node < n {
            // a lone point reached as the continuation of a cluster
            let lambda = clusters[cid].birth;
            fall_out_cluster[node] = cid;
            fall_out_lambda[node] = lambda;
            tree.push(CondensedEntry { parent: n + cid, child: node, lambda, size: 1 });
            continue;
        }
        let lambda = lambda_of(dendro.weight[node]);
        let kids = &dendro.children[node];
        let big: Vec<usize> = kids.iter().copied().filter(|&k| dendro.size[k] >= mcs).collect();
        for &k in kids.iter().filter(|&&k| dendro.size[k] < mcs || big.is_empty()) {
            leaves.clear();
            dendro.leaves(k, &mut leaves);
            for &p in &leaves {
                fall_out_cluster[p] = cid;
                fall_out_lambda[p] = lambda;
                clusters[cid].stability += lambda - clusters[cid].birth;
                tree.push(CondensedEntry { parent: n + cid, child: p, lambda, size: 1 });
            }
        }
        match big.len() {
            0 => {}
            1 => stack.push((big[0], cid)),
            _ => {
                for &k in &big {
                    let child = clusters.len();
                    let size = dendro.size[k];
                    clusters.push(Cluster { parent: Some(cid), birth: lambda, size, children: Vec::new(), stability: 0.0 });
                    clusters[cid].children.push(child);
                    clusters[cid].stability += size as f64 * (lambda - clusters[cid].birth);
                    tree.push(CondensedEntry { parent: n + cid, child: n + child, lambda, size });
                    stack.push((k, child));
                }
            }
        }
    }

    let selected = select_eom(&clusters, params.allow_single_cluster);

    let mut owner: Vec<Option<usize>> = vec![None; clusters.len()];
    for (cid, c) in clusters.iter().enumerate() {
        // parents precede children, so one forward pass propagates ownership
        owner[cid] = if selected[cid] { Some(cid) } else { c.parent.and_then(|p| owner[p]) };
    }
    let mut raw_label: Vec<Option<usize>> = (0..n).map(|p| owner[fall_out_cluster[p]]).collect();

    let mut groups: Vec<(usize, usize, usize)> = Vec::new(); // (size, smallest member, cluster)
    for cid in (0..clusters.len()).filter(|&c| selected[c]) {
        let members: Vec<usize> = (0..n).filter(|&p| raw_label[p] == Some(cid)).collect();
        if let Some(&first) = members.first() {
            groups.push((members.len(), first, cid));
        }
    }
    groups.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut labels = vec![-1i64; n];
    let mut probabilities = vec![0.0f64; n];
    for (label, &(_, _, cid)) in groups.iter().enumerate() {
        let members: Vec<usize> = (0..n).filter(|&p| raw_label[p] == Some(cid)).collect();
        let max_lambda = members.iter().map(|&p| fall_out_lambda[p]).fold(0.0f64, f64::max);
        for p in members {
            labels[p] = label as i64;
            probabilities[p] = if max_lambda > 0.0 { fall_out_lambda[p].min(max_lambda) / max_lambda } else { 1.0 };
            raw_label[p] = None;
        }
    }
    ClusterAssignment { labels, probabilities, condensed_tree: tree }
}

fn select_eom(clusters: &[Cluster], allow_single_cluster: bool) -> Vec<bool> {
    let mut selected = vec![false; clusters.len()];
    let mut subtree = vec![0.0f64; clusters.len()];
    for cid in (0..clusters.len()).rev() {
        let c = &clusters[cid];
        let child_sum: f64 = c.children.iter().map(|&k| subtree[k]).sum();
        let eligible = cid != 0 || allow_single_cluster;
        if c.children.is_empty() {
            selected[cid] = eligible;
            subtree[cid] = c.stability;
        } else if eligible && c.stability >= child_sum {
            selected[cid] = true;
            subtree[cid] = c.stability;
            let mut stack = c.children.clone();
            while let Some(k) = stack.pop() {
                selected[k] = false;
                stack.extend(clusters[k].children.iter().copied());
            }
        } else {
            subtree[cid] = child_sum;
        }
    }
    debug_assert!(clusters.iter().all(|c| c.size > 0));
    selected
}
