//! Maximum-weight matching in general graphs (Galil/Edmonds blossom method,
//! primal-dual). Adapted from Joris van Rantwijk's reference implementation;
//! most comments follow his original. Weights are i128 so that rational edge
//! weights can be scaled to a common denominator without overflow. O(n^3).

use std::cmp::max;

pub const SENTINEL: usize = usize::MAX;

type W = i128;

struct Matching {
    nvertex: usize,
    nedge: usize,
    edges: Vec<(usize, usize, W)>,
    dualvar: Vec<W>,
    endpoint: Vec<usize>,
    label: Vec<usize>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossombase: Vec<usize>,
    blossomparent: Vec<usize>,
    bestedge: Vec<usize>,
    unusedblossoms: Vec<usize>,
    mate: Vec<usize>,
    queue: Vec<usize>,
    blossombestedges: Vec<Vec<usize>>,
    blossomchilds: Vec<Vec<usize>>,
    blossomendps: Vec<Vec<usize>>,
    neighbend: Vec<Vec<usize>>,
    allowedge: Vec<bool>,
    maxcardinality: bool,
}

/// Computes a maximum-weight matching of the given edge list on vertices
/// `0..n`. With `max_cardinality`, only maximum-cardinality matchings are
/// considered. Returns `mate` with `mate[v] == SENTINEL` for single vertices.
pub fn max_weight_matching(n: usize, edges: &[(usize, usize, W)], max_cardinality: bool) -> Vec<usize> {
    if edges.is_empty() {
        return vec![SENTINEL; n];
    }
    let mut m = Matching::new(n, edges.to_vec(), max_cardinality);
    let mut mate = m.solve();
    mate.resize(n, SENTINEL);
    mate
}

impl Matching {
    fn new(n: usize, edges: Vec<(usize, usize, W)>, maxcardinality: bool) -> Matching {
        // Vertices are numbered 0..nvertex; non-trivial blossoms get numbers
        // nvertex..2*nvertex. Edge endpoints are numbered so that endpoints
        // 2k and 2k+1 belong to edge k.
        let nedge = edges.len();
        let mut nvertex = n;
        for &(i, j, _) in &edges {
            assert!(i != j);
            nvertex = nvertex.max(i + 1).max(j + 1);
        }
        let maxweight = max(0, edges.iter().map(|e| e.2).max().unwrap());
        let endpoint: Vec<usize> = (0..2 * nedge)
            .map(|p| if p % 2 == 0 { edges[p / 2].0 } else { edges[p / 2].1 })
            .collect();
        let mut neighbend = vec![vec![]; nvertex];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }
        let mut dualvar = vec![maxweight; nvertex];
        dualvar.extend(vec![0; nvertex]);
        let mut blossombase: Vec<usize> = (0..nvertex).collect();
        blossombase.extend(vec![SENTINEL; nvertex]);
        Matching {
            nvertex,
            nedge,
            edges,
            dualvar,
            endpoint,
            label: vec![0; 2 * nvertex],
            labelend: vec![SENTINEL; 2 * nvertex],
            inblossom: (0..nvertex).collect(),
            blossombase,
            blossomparent: vec![SENTINEL; 2 * nvertex],
            bestedge: vec![SENTINEL; 2 * nvertex],
            unusedblossoms: (nvertex..2 * nvertex).collect(),
            mate: vec![SENTINEL; nvertex],
            queue: vec![],
            blossombestedges: vec![vec![]; 2 * nvertex],
            blossomchilds: vec![vec![]; 2 * nvertex],
            blossomendps: vec![vec![]; 2 * nvertex],
            neighbend,
            allowedge: vec![false; nedge],
            maxcardinality,
        }
    }

    // 2 * slack of edge k (not valid inside blossoms).
    fn slack(&self, k: usize) -> W {
        let (i, j, wt) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2 * wt
    }

    fn blossom_leaves(&self, b: usize) -> Vec<usize> {
        let mut leaves = vec![];
        if b < self.nvertex {
            leaves.push(b);
        } else {
            for &t in &self.blossomchilds[b] {
                if t < self.nvertex {
                    leaves.push(t);
                } else {
                    leaves.extend(self.blossom_leaves(t));
                }
            }
        }
        leaves
    }

    // Assign label t to the top-level blossom containing vertex w, reached
    // through the edge with remote endpoint p.
    fn assign_label(&mut self, w: usize, t: usize, p: usize) {
        let b = self.inblossom[w];
        assert!(self.label[w] == 0 && self.label[b] == 0);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = SENTINEL;
        self.bestedge[b] = SENTINEL;
        if t == 1 {
            // b became an S-blossom; add its vertices to the queue.
            let leaves = self.blossom_leaves(b);
            self.queue.extend(leaves);
        } else if t == 2 {
            // b became a T-blossom; assign label S to its mate.
            let base = self.blossombase[b];
            assert!(self.mate[base] != SENTINEL);
            let mbase = self.mate[base];
            let endpoint = self.endpoint[mbase];
            self.assign_label(endpoint, 1, mbase ^ 1);
        }
    }

    // Trace back from vertices v and w to discover either a new blossom or an
    // augmenting path. Returns the base vertex of the new blossom or SENTINEL.
    fn scan_blossom(&mut self, v: usize, w: usize) -> usize {
        let mut path = vec![];
        let mut base = SENTINEL;
        let mut v = v;
        let mut w = w;
        while v != SENTINEL || w != SENTINEL {
            // Look for a breadcrumb in v's blossom or put a new breadcrumb.
            let mut b = self.inblossom[v];
            if (self.label[b] & 4) != 0 {
                base = self.blossombase[b];
                break;
            }
            assert!(self.label[b] == 1);
            path.push(b);
            self.label[b] = 5;
            // Trace one step back.
            assert!(self.labelend[b] == self.mate[self.blossombase[b]]);
            if self.labelend[b] == SENTINEL {
                // The base of blossom b is single; stop tracing this path.
                v = SENTINEL;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                assert!(self.label[b] == 2);
                assert!(self.labelend[b] != SENTINEL);
                v = self.endpoint[self.labelend[b]];
            }
            // Alternate between both paths.
            if w != SENTINEL {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    // Construct a new blossom with the given base containing edge k, which
    // connects a pair of S-vertices.
    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];

        let b = self.unusedblossoms.pop().unwrap();
        self.blossombase[b] = base;
        self.blossomparent[b] = SENTINEL;
        self.blossomparent[bb] = b;
        self.blossomchilds[b] = vec![];
        self.blossomendps[b] = vec![];

        // Trace back from v to base.
        while bv != bb {
            self.blossomparent[bv] = b;
            self.blossomchilds[b].push(bv);
            self.blossomendps[b].push(self.labelend[bv]);
            assert!(
                self.label[bv] == 2
                    || (self.label[bv] == 1 && self.labelend[bv] == self.mate[self.blossombase[bv]])
            );
            assert!(self.labelend[bv] != SENTINEL);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        self.blossomchilds[b].push(bb);
        self.blossomchilds[b].reverse();
        self.blossomendps[b].reverse();
        self.blossomendps[b].push(2 * k);

        // Trace back from w to base.
        while bw != bb {
            self.blossomparent[bw] = b;
            self.blossomchilds[b].push(bw);
            self.blossomendps[b].push(self.labelend[bw] ^ 1);
            assert!(
                self.label[bw] == 2
                    || (self.label[bw] == 1 && self.labelend[bw] == self.mate[self.blossombase[bw]])
            );
            assert!(self.labelend[bw] != SENTINEL);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }

        assert!(self.label[bb] == 1);
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;

        for v in self.blossom_leaves(b) {
            if self.label[self.inblossom[v]] == 2 {
                // A former T-vertex becomes S; add it to the queue.
                self.queue.push(v);
            }
            self.inblossom[v] = b;
        }

        // Compute blossombestedges[b].
        let mut bestedgeto = vec![SENTINEL; 2 * self.nvertex];
        for &bv in &self.blossomchilds[b] {
            let mut nblists: Vec<Vec<usize>> = vec![];
            if self.blossombestedges[bv].is_empty() {
                for v in self.blossom_leaves(bv) {
                    nblists.push(self.neighbend[v].iter().map(|p| p / 2).collect());
                }
            } else {
                nblists.push(self.blossombestedges[bv].clone());
            }
            for nblist in nblists {
                for k in nblist {
                    let (mut i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let bj = self.inblossom[j];
                    let bestto = bestedgeto[bj];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestto == SENTINEL || self.slack(k) < self.slack(bestto))
                    {
                        bestedgeto[bj] = k;
                    }
                }
            }
            self.blossombestedges[bv] = vec![];
            self.bestedge[bv] = SENTINEL;
        }
        self.blossombestedges[b] = bestedgeto.into_iter().filter(|&k| k != SENTINEL).collect();
        self.bestedge[b] = SENTINEL;
        for &k in &self.blossombestedges[b] {
            let be = self.bestedge[b];
            if be == SENTINEL || self.slack(k) < self.slack(be) {
                self.bestedge[b] = k;
            }
        }
    }

    // Expand the given top-level blossom.
    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        for s in self.blossomchilds[b].clone() {
            self.blossomparent[s] = SENTINEL;
            if s < self.nvertex {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for v in self.blossom_leaves(s) {
                    self.inblossom[v] = s;
                }
            }
        }

        // A T-blossom expanded during a stage needs its sub-blossoms relabeled.
        if !endstage && self.label[b] == 2 {
            assert!(self.labelend[b] != SENTINEL);
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let mut j = self.blossomchilds[b].iter().position(|&r| r == entrychild).unwrap() as i32;
            let jstep: i32;
            let endptrick: usize;
            if (j & 1) != 0 {
                // Start index is odd; go forward and wrap.
                j -= self.blossomchilds[b].len() as i32;
                jstep = 1;
                endptrick = 0;
            } else {
                jstep = -1;
                endptrick = 1;
            }
            // Move along the blossom until we get to the base.
            let mut p = self.labelend[b];
            while j != 0 {
                // Relabel the T-sub-blossom.
                self.label[self.endpoint[p ^ 1]] = 0;
                self.label[self.endpoint
                    [pos_neg_index(&self.blossomendps[b], j - endptrick as i32) ^ endptrick ^ 1]] = 0;
                let ep = self.endpoint[p ^ 1];
                self.assign_label(ep, 2, p);
                // Step to the next S-sub-blossom and note its forward endpoint.
                self.allowedge[pos_neg_index(&self.blossomendps[b], j - endptrick as i32) / 2] = true;
                j += jstep;
                p = pos_neg_index(&self.blossomendps[b], j - endptrick as i32) ^ endptrick;
                // Step to the next T-sub-blossom.
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            // Relabel the base T-sub-blossom without stepping through to its
            // mate.
            let bv = pos_neg_index(&self.blossomchilds[b], j);
            self.label[self.endpoint[p ^ 1]] = 2;
            self.label[bv] = 2;
            self.labelend[self.endpoint[p ^ 1]] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = SENTINEL;
            // Continue along the blossom until we get back to entrychild.
            j += jstep;
            while pos_neg_index(&self.blossomchilds[b], j) != entrychild {
                let bv = pos_neg_index(&self.blossomchilds[b], j);
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let mut v = SENTINEL;
                for temp in self.blossom_leaves(bv) {
                    v = temp;
                    if self.label[v] != 0 {
                        break;
                    }
                }
                if self.label[v] != 0 {
                    assert!(self.label[v] == 2);
                    assert!(self.inblossom[v] == bv);
                    self.label[v] = 0;
                    self.label[self.endpoint[self.mate[self.blossombase[bv]]]] = 0;
                    let lblend = self.labelend[v];
                    self.assign_label(v, 2, lblend);
                }
                j += jstep;
            }
        }
        // Recycle the blossom number.
        self.label[b] = SENTINEL;
        self.labelend[b] = SENTINEL;
        self.blossombase[b] = SENTINEL;
        self.bestedge[b] = SENTINEL;
        self.blossomchilds[b] = vec![];
        self.blossomendps[b] = vec![];
        self.blossombestedges[b] = vec![];
        self.unusedblossoms.push(b);
    }

    // Swap matched/unmatched edges over an alternating path through blossom b
    // between vertex v and the base vertex.
    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t != SENTINEL && t >= self.nvertex {
            self.augment_blossom(t, v);
        }
        let i = self.blossomchilds[b].iter().position(|&r| r == t).unwrap();
        let mut j = i as i32;
        let jstep: i32;
        let endptrick: usize;
        if (i & 1) != 0 {
            j -= self.blossomchilds[b].len() as i32;
            jstep = 1;
            endptrick = 0;
        } else {
            jstep = -1;
            endptrick = 1;
        }
        while j != 0 {
            j += jstep;
            let mut t = pos_neg_index(&self.blossomchilds[b], j);
            let p = pos_neg_index(&self.blossomendps[b], j - endptrick as i32) ^ endptrick;
            if t != SENTINEL && t >= self.nvertex {
                let endp = self.endpoint[p];
                self.augment_blossom(t, endp);
            }
            j += jstep;
            t = pos_neg_index(&self.blossomchilds[b], j);
            if t != SENTINEL && t >= self.nvertex {
                let endp = self.endpoint[p ^ 1];
                self.augment_blossom(t, endp);
            }
            // Match the edge connecting those sub-blossoms.
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        // Rotate the sub-blossom list to put the new base at the front.
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        assert!(self.blossombase[b] == v);
    }

    // Swap matched/unmatched edges over an alternating path between two
    // single vertices; the augmenting path runs through edge k.
    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for &(mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)].iter() {
            loop {
                let bs = self.inblossom[s];
                assert!(self.label[bs] == 1);
                assert!(self.labelend[bs] == self.mate[self.blossombase[bs]]);
                if bs != SENTINEL && bs >= self.nvertex {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == SENTINEL {
                    // Reached a single vertex; stop.
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                assert!(self.label[bt] == 2);
                assert!(self.labelend[bt] != SENTINEL);
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                assert!(self.blossombase[bt] == t);
                if bt != SENTINEL && bt >= self.nvertex {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    // Verify (by dual feasibility and complementary slackness) that the
    // optimum was reached.
    fn verify_optimum(&self) {
        let vdualoffset = if self.maxcardinality {
            max(0, -self.dualvar[0..self.nvertex].iter().min().copied().unwrap())
        } else {
            0
        };
        for k in 0..self.nedge {
            let (i, j, wt) = self.edges[k];
            let mut s = self.dualvar[i] + self.dualvar[j] - 2 * wt;
            let mut iblossoms = vec![i];
            let mut jblossoms = vec![j];
            while self.blossomparent[*iblossoms.last().unwrap()] != SENTINEL {
                let ix = *iblossoms.last().unwrap();
                iblossoms.push(self.blossomparent[ix]);
            }
            while self.blossomparent[*jblossoms.last().unwrap()] != SENTINEL {
                let jx = *jblossoms.last().unwrap();
                jblossoms.push(self.blossomparent[jx]);
            }
            iblossoms.reverse();
            jblossoms.reverse();
            for (&bi, bj) in iblossoms.iter().zip(jblossoms) {
                if bi != bj {
                    break;
                }
                s += 2 * self.dualvar[bi];
            }
            assert!(s >= 0);
            if self.mate[i] / 2 == k || self.mate[j] / 2 == k {
                assert!(self.mate[i] / 2 == k && self.mate[j] / 2 == k);
                assert!(s == 0);
            }
        }
        for v in 0..self.nvertex {
            assert!(self.mate[v] != SENTINEL || self.dualvar[v] + vdualoffset == 0);
        }
        for b in self.nvertex..2 * self.nvertex {
            if self.blossombase[b] != SENTINEL && self.dualvar[b] > 0 {
                assert!(self.blossomendps[b].len() % 2 == 1);
                for (ix, &p) in self.blossomendps[b].iter().enumerate() {
                    if ix % 2 == 1 {
                        assert!(self.mate[self.endpoint[p]] == p ^ 1);
                        assert!(self.mate[self.endpoint[p ^ 1]] == p);
                    }
                }
            }
        }
    }

    fn solve(&mut self) -> Vec<usize> {
        let mut kslack = 0;
        for _ in 0..self.nvertex {
            // Each iteration is a "stage": find an augmenting path and use it
            // to improve the matching.
            self.label = vec![0; 2 * self.nvertex];
            self.bestedge = vec![SENTINEL; 2 * self.nvertex];
            for ll in self.nvertex..2 * self.nvertex {
                self.blossombestedges[ll] = vec![];
            }
            self.allowedge = vec![false; self.nedge];
            self.queue = vec![];

            // Label single blossoms/vertices with S and put them in the queue.
            for v in 0..self.nvertex {
                if self.mate[v] == SENTINEL && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, SENTINEL);
                }
            }

            let mut augmented = false;
            loop {
                // Each iteration is a "substage": try to find an augmenting
                // path; if none, pump slack out of the dual variables.
                while !self.queue.is_empty() && !augmented {
                    let v = self.queue.pop().unwrap();
                    assert!(self.label[self.inblossom[v]] == 1);
                    for p in self.neighbend[v].clone() {
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            // Internal to a blossom; ignore.
                            continue;
                        }
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == 0 {
                                // w is free; label w with T and its mate with S.
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[self.inblossom[w]] == 1 {
                                // w is an S-vertex in another blossom; either a
                                // new blossom or an augmenting path.
                                let base = self.scan_blossom(v, w);
                                if base != SENTINEL {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                // w sits inside a T-blossom but has not been
                                // reached from outside yet.
                                assert!(self.label[self.inblossom[w]] == 2);
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == SENTINEL || kslack < self.slack(self.bestedge[b]) {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.bestedge[w] == SENTINEL || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                }
                if augmented {
                    break;
                }

                // No augmenting path under these constraints; compute delta.
                // (Vertex duals, edge slacks and deltas are pre-doubled.)
                let mut deltatype = -1;
                let mut delta = 0;
                let mut deltaedge = 0;
                let mut deltablossom = 0;
                if !self.maxcardinality {
                    deltatype = 1;
                    delta = *self.dualvar[0..self.nvertex].iter().min().unwrap();
                }
                // delta2: minimum slack on any edge between an S-vertex and a
                // free vertex.
                for v in 0..self.nvertex {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != SENTINEL {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                // delta3: half the minimum slack on any edge between a pair of
                // S-blossoms.
                for b in 0..2 * self.nvertex {
                    if self.blossomparent[b] == SENTINEL
                        && self.label[b] == 1
                        && self.bestedge[b] != SENTINEL
                    {
                        let d = self.slack(self.bestedge[b]) / 2;
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                // delta4: minimum z of any T-blossom.
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != SENTINEL
                        && self.blossomparent[b] == SENTINEL
                        && self.label[b] == 2
                        && (deltatype == -1 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if deltatype == -1 {
                    // Max-cardinality optimum reached; final delta update so
                    // the optimum is verifiable.
                    assert!(self.maxcardinality);
                    deltatype = 1;
                    delta = max(0, *self.dualvar[..self.nvertex].iter().min().unwrap());
                }

                for v in 0..self.nvertex {
                    match self.label[self.inblossom[v]] {
                        0 => {}
                        1 => self.dualvar[v] -= delta,
                        2 => self.dualvar[v] += delta,
                        _ => panic!("unexpected label"),
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != SENTINEL && self.blossomparent[b] == SENTINEL {
                        match self.label[b] {
                            0 => {}
                            1 => self.dualvar[b] += delta,
                            2 => self.dualvar[b] -= delta,
                            _ => panic!("unexpected label"),
                        }
                    }
                }

                match deltatype {
                    1 => break, // optimum reached
                    2 => {
                        let (mut i, j, _) = self.edges[deltaedge];
                        self.allowedge[deltaedge] = true;
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        assert!(self.label[self.inblossom[i]] == 1);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        assert!(self.label[self.inblossom[i]] == 1);
                        self.queue.push(i);
                    }
                    4 => self.expand_blossom(deltablossom, false),
                    _ => panic!("unexpected deltatype"),
                }
            }

            if !augmented {
                break;
            }

            // End of a stage; expand all S-blossoms with zero dual.
            for b in self.nvertex..2 * self.nvertex {
                if self.blossomparent[b] == SENTINEL
                    && self.blossombase[b] != SENTINEL
                    && self.label[b] == 1
                    && self.dualvar[b] == 0
                {
                    self.expand_blossom(b, true);
                }
            }
        }

        self.verify_optimum();

        // Transform mate[] so that mate[v] is the vertex paired with v.
        for v in 0..self.nvertex {
            if self.mate[v] != SENTINEL {
                self.mate[v] = self.endpoint[self.mate[v]];
            }
        }
        for v in 0..self.nvertex {
            assert!(self.mate[v] == SENTINEL || self.mate[self.mate[v]] == v);
        }
        self.mate.clone()
    }
}

// Python-style index supporting negative offsets from the end.
fn pos_neg_index(v: &[usize], index: i32) -> usize {
    let i = if index >= 0 {
        index as usize
    } else {
        v.len() - (-index) as usize
    };
    v[i]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mwm(edges: Vec<(usize, usize, i128)>) -> Vec<usize> {
        let n = edges.iter().map(|&(i, j, _)| i.max(j) + 1).max().unwrap_or(0);
        max_weight_matching(n, &edges, false)
    }

    fn mwm_card(edges: Vec<(usize, usize, i128)>) -> Vec<usize> {
        let n = edges.iter().map(|&(i, j, _)| i.max(j) + 1).max().unwrap_or(0);
        max_weight_matching(n, &edges, true)
    }

    #[test]
    fn trivial() {
        assert_eq!(max_weight_matching(0, &[], false), Vec::<usize>::new());
        assert_eq!(mwm(vec![(0, 1, 1)]), vec![1, 0]);
        assert_eq!(mwm(vec![(1, 2, 10), (2, 3, 11)]), vec![SENTINEL, SENTINEL, 3, 2]);
        assert_eq!(
            mwm(vec![(1, 2, 5), (2, 3, 11), (3, 4, 5)]),
            vec![SENTINEL, SENTINEL, 3, 2, SENTINEL]
        );
        assert_eq!(mwm_card(vec![(1, 2, 5), (2, 3, 11), (3, 4, 5)]), vec![SENTINEL, 2, 1, 4, 3]);
    }

    #[test]
    fn negative_weights() {
        let edges = vec![(1, 2, 2), (1, 3, -2), (2, 3, 1), (2, 4, -1), (3, 4, -6)];
        assert_eq!(mwm(edges.clone()), vec![SENTINEL, 2, 1, SENTINEL, SENTINEL]);
        assert_eq!(mwm_card(edges), vec![SENTINEL, 3, 4, 1, 2]);
    }

    #[test]
    fn blossom_augmentation() {
        assert_eq!(mwm(vec![(1, 2, 8), (1, 3, 9), (2, 3, 10), (3, 4, 7)]), vec![SENTINEL, 2, 1, 4, 3]);
        assert_eq!(
            mwm(vec![(1, 2, 8), (1, 3, 9), (2, 3, 10), (3, 4, 7), (1, 6, 5), (4, 5, 6)]),
            vec![SENTINEL, 6, 3, 2, 5, 4, 1]
        );
        assert_eq!(
            mwm(vec![(1, 2, 9), (1, 3, 8), (2, 3, 10), (1, 4, 5), (4, 5, 4), (1, 6, 3)]),
            vec![SENTINEL, 6, 3, 2, 5, 4, 1]
        );
        assert_eq!(
            mwm(vec![(1, 2, 9), (1, 3, 9), (2, 3, 10), (2, 4, 8), (3, 5, 8), (4, 5, 10), (5, 6, 6)]),
            vec![SENTINEL, 3, 4, 1, 2, 6, 5]
        );
    }

    #[test]
    fn nested_blossom_expansion() {
        assert_eq!(
            mwm(vec![
                (1, 2, 45), (1, 5, 45), (2, 3, 50), (3, 4, 45), (4, 5, 50),
                (1, 6, 30), (3, 9, 35), (4, 8, 35), (5, 7, 26), (9, 10, 5)
            ]),
            vec![SENTINEL, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9]
        );
        assert_eq!(
            mwm(vec![
                (1, 2, 45), (1, 7, 45), (2, 3, 50), (3, 4, 45), (4, 5, 95), (4, 6, 94),
                (5, 6, 94), (6, 7, 50), (1, 8, 30), (3, 11, 35), (5, 9, 36), (7, 10, 26), (11, 12, 5)
            ]),
            vec![SENTINEL, 8, 3, 2, 6, 9, 4, 10, 1, 5, 7, 12, 11]
        );
        assert_eq!(
            mwm(vec![
                (1, 2, 40), (1, 3, 40), (2, 3, 60), (2, 4, 55), (3, 5, 55), (4, 5, 50),
                (1, 8, 15), (5, 7, 30), (7, 6, 10), (8, 10, 10), (4, 9, 30)
            ]),
            vec![SENTINEL, 2, 1, 5, 9, 3, 7, 6, 10, 4, 8]
        );
    }
}
