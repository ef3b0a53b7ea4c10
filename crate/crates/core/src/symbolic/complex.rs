//! Complexes of tagged copies and their canonical labelling.
//!
//! A complex is a set of constituents, each a family-member tag together
//! with an edge set over a small local vertex window. Two complexes are
//! isomorphic when a vertex bijection maps constituents onto constituents
//! with matching tags. Canonical codes come from colour refinement plus
//! individualisation, keeping the lexicographically least leaf encoding;
//! the number of leaves reaching that encoding is `|Aut|`.

use std::collections::HashSet;

use crate::error::{Error, Result};

pub const MAX_COMPLEX_VERTICES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constituent {
    pub member: usize,
    /// Sorted list of sorted edges.
    pub edges: Vec<Vec<u8>>,
}

impl Constituent {
    pub fn new(member: usize, mut edges: Vec<Vec<u8>>) -> Self {
        for e in &mut edges {
            e.sort_unstable();
        }
        edges.sort();
        edges.dedup();
        Self { member, edges }
    }

    pub fn vertices(&self) -> Vec<u8> {
        let mut v: Vec<u8> = self.edges.iter().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn relabel(&self, map: &[u8]) -> Self {
        Self::new(
            self.member,
            self.edges
                .iter()
                .map(|e| e.iter().map(|&x| map[x as usize]).collect())
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FComplex {
    r: usize,
    num_vertices: usize,
    constituents: Vec<Constituent>,
}

impl FComplex {
    /// Constituents are deduplicated and sorted; every vertex in
    /// `0..num_vertices` must be covered.
    pub fn new(r: usize, num_vertices: usize, mut constituents: Vec<Constituent>) -> Result<Self> {
        if constituents.is_empty() {
            return Err(Error::InvalidParameter("a complex needs at least one constituent".into()));
        }
        let mut covered = vec![false; num_vertices];
        for c in &constituents {
            for e in &c.edges {
                if e.len() != r {
                    return Err(Error::MixedUniformity);
                }
                for w in e.windows(2) {
                    if w[0] == w[1] {
                        return Err(Error::InvalidParameter("repeated vertex in a constituent edge".into()));
                    }
                }
                for &x in e {
                    if x as usize >= num_vertices {
                        return Err(Error::InvalidParameter(format!(
                            "vertex {x} outside window of {num_vertices}"
                        )));
                    }
                    covered[x as usize] = true;
                }
            }
        }
        if covered.iter().any(|c| !c) {
            return Err(Error::InvalidParameter("complex has an uncovered vertex".into()));
        }
        constituents.sort();
        constituents.dedup();
        Ok(Self {
            r,
            num_vertices,
            constituents,
        })
    }

    pub fn uniformity(&self) -> usize {
        self.r
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn constituents(&self) -> &[Constituent] {
        &self.constituents
    }

    pub fn len(&self) -> usize {
        self.constituents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constituents.is_empty()
    }

    /// Edges of the underlying graph, sorted and deduplicated.
    pub fn underlying_edges(&self) -> Vec<Vec<u8>> {
        union_edges(self.constituents.iter())
    }

    pub fn num_edges(&self) -> usize {
        self.underlying_edges().len()
    }

    /// Edge count of the union of the constituents selected by `mask`.
    pub fn edges_of_subset(&self, mask: u32) -> usize {
        union_edges(
            self.constituents
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, c)| c),
        )
        .len()
    }

    /// Constituents form one piece when linked by shared edges.
    pub fn is_irreducible(&self) -> bool {
        let n = self.constituents.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for (j, c) in self.constituents.iter().enumerate() {
                if !seen[j] && shares_edge(&self.constituents[i], c) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Applies the vertex bijection `map` (old label -> new label).
    pub fn relabel(&self, map: &[u8]) -> Self {
        assert_eq!(map.len(), self.num_vertices);
        let mut constituents: Vec<Constituent> = self.constituents.iter().map(|c| c.relabel(map)).collect();
        constituents.sort();
        Self {
            r: self.r,
            num_vertices: self.num_vertices,
            constituents,
        }
    }

    fn encode(&self, map: &[u8]) -> Vec<u8> {
        let mut parts: Vec<Vec<u8>> = self
            .constituents
            .iter()
            .map(|c| {
                let c = c.relabel(map);
                let mut out = vec![c.member as u8, c.edges.len() as u8];
                for e in &c.edges {
                    out.extend_from_slice(e);
                }
                out
            })
            .collect();
        parts.sort();
        let mut code = vec![self.num_vertices as u8, self.r as u8, self.constituents.len() as u8];
        for p in parts {
            code.extend(p);
        }
        code
    }
}

// A vertex colour and the sorted colours of its constituent neighbourhoods.
type ColorKey = (usize, Vec<(usize, Vec<usize>)>);

pub(crate) fn shares_edge(a: &Constituent, b: &Constituent) -> bool {
    a.edges.iter().any(|e| b.edges.binary_search(e).is_ok())
}

fn union_edges<'a>(cs: impl Iterator<Item = &'a Constituent>) -> Vec<Vec<u8>> {
    let mut all: Vec<Vec<u8>> = cs.flat_map(|c| c.edges.iter().cloned()).collect();
    all.sort();
    all.dedup();
    all
}

/// Bit-exact canonical encoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode(pub Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Canonical {
    pub code: CanonicalCode,
    pub aut_count: u64,
    /// Old label -> canonical label for one optimal leaf.
    pub labeling: Vec<u8>,
}

impl Canonical {
    pub fn complex(&self, b: &FComplex) -> FComplex {
        b.relabel(&self.labeling)
    }
}

struct Search<'a> {
    b: &'a FComplex,
    // incidences[v]: (member, other vertices of the edge)
    incidences: Vec<Vec<(usize, Vec<u8>)>>,
    best: Option<Vec<u8>>,
    best_map: Vec<u8>,
    count: u64,
}

impl<'a> Search<'a> {
    fn new(b: &'a FComplex) -> Self {
        let mut incidences = vec![Vec::new(); b.num_vertices];
        for c in &b.constituents {
            for e in &c.edges {
                for &x in e {
                    let others: Vec<u8> = e.iter().copied().filter(|&y| y != x).collect();
                    incidences[x as usize].push((c.member, others));
                }
            }
        }
        Self {
            b,
            incidences,
            best: None,
            best_map: Vec::new(),
            count: 0,
        }
    }

    // Refines `colors` (ranks) until stable.
    fn refine(&self, colors: &mut [usize]) {
        let n = colors.len();
        let mut classes = count_classes(colors);
        loop {
            let keys: Vec<ColorKey> = (0..n)
                .map(|v| {
                    let mut sig: Vec<(usize, Vec<usize>)> = self.incidences[v]
                        .iter()
                        .map(|(m, others)| {
                            let mut cs: Vec<usize> = others.iter().map(|&y| colors[y as usize]).collect();
                            cs.sort_unstable();
                            (*m, cs)
                        })
                        .collect();
                    sig.sort();
                    (colors[v], sig)
                })
                .collect();
            let mut sorted: Vec<&ColorKey> = keys.iter().collect();
            sorted.sort();
            sorted.dedup();
            for v in 0..n {
                colors[v] = sorted.binary_search(&&keys[v]).unwrap();
            }
            let now = sorted.len();
            if now == classes {
                break;
            }
            classes = now;
        }
    }

    fn descend(&mut self, colors: Vec<usize>) {
        let n = colors.len();
        if count_classes(&colors) == n {
            let map: Vec<u8> = colors.iter().map(|&c| c as u8).collect();
            let code = self.b.encode(&map);
            match &self.best {
                Some(best) if code > *best => {}
                Some(best) if code == *best => self.count += 1,
                _ => {
                    self.best = Some(code);
                    self.best_map = map;
                    self.count = 1;
                }
            }
            return;
        }
        // smallest colour whose cell is not a singleton
        let mut sizes = vec![0usize; n];
        for &c in &colors {
            sizes[c] += 1;
        }
        let target = (0..n).find(|&c| sizes[c] > 1).unwrap();
        let cell: Vec<usize> = (0..n).filter(|&v| colors[v] == target).collect();
        for &x in &cell {
            let mut next: Vec<usize> = colors
                .iter()
                .enumerate()
                .map(|(v, &c)| 2 * c + usize::from(c == target && v != x))
                .collect();
            rerank(&mut next);
            self.refine(&mut next);
            self.descend(next);
        }
    }
}

fn count_classes(colors: &[usize]) -> usize {
    colors.iter().collect::<HashSet<_>>().len()
}

fn rerank(colors: &mut [usize]) {
    let mut distinct: Vec<usize> = colors.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    for c in colors.iter_mut() {
        *c = distinct.binary_search(c).unwrap();
    }
}

fn check_size(b: &FComplex) -> Result<()> {
    if b.num_vertices > MAX_COMPLEX_VERTICES {
        return Err(Error::TooManyVertices {
            vertices: b.num_vertices,
        });
    }
    Ok(())
}

/// Canonical code, automorphism count and a canonical labelling.
pub fn canonicalize(b: &FComplex) -> Result<Canonical> {
    check_size(b)?;
    let mut search = Search::new(b);
    let mut colors = vec![0; b.num_vertices];
    search.refine(&mut colors);
    search.descend(colors);
    Ok(Canonical {
        code: CanonicalCode(search.best.unwrap()),
        aut_count: search.count,
        labeling: search.best_map,
    })
}

pub fn canonical_form(b: &FComplex) -> Result<CanonicalCode> {
    Ok(canonicalize(b)?.code)
}

pub fn automorphism_count(b: &FComplex) -> Result<u64> {
    Ok(canonicalize(b)?.aut_count)
}

/// Reference check by trying every vertex bijection. Only for tiny
/// complexes.
pub fn brute_force_isomorphic(a: &FComplex, b: &FComplex) -> bool {
    if a.num_vertices != b.num_vertices || a.r != b.r || a.constituents.len() != b.constituents.len() {
        return false;
    }
    let mut found = false;
    for_each_permutation(a.num_vertices, |perm| {
        if !found && a.relabel(perm).constituents == b.constituents {
            found = true;
        }
    });
    found
}

/// `|Aut|` by trying every vertex bijection.
pub fn brute_force_automorphisms(b: &FComplex) -> u64 {
    let mut count = 0;
    for_each_permutation(b.num_vertices, |perm| {
        if b.relabel(perm).constituents == b.constituents {
            count += 1;
        }
    });
    count
}

fn for_each_permutation(n: usize, mut f: impl FnMut(&[u8])) {
    let mut perm: Vec<u8> = (0..n as u8).collect();
    // Heap's algorithm
    let mut c = vec![0usize; n];
    f(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(member: usize, a: u8, b: u8, c: u8) -> Constituent {
        Constituent::new(member, vec![vec![a, b], vec![a, c], vec![b, c]])
    }

    fn cycle(member: usize, vs: [u8; 4]) -> Constituent {
        Constituent::new(
            member,
            (0..4).map(|i| vec![vs[i], vs[(i + 1) % 4]]).collect(),
        )
    }

    #[test]
    fn relabelling_invariance() {
        let a = FComplex::new(2, 4, vec![tri(0, 0, 1, 2), tri(0, 1, 2, 3)]).unwrap();
        let b = FComplex::new(2, 4, vec![tri(0, 3, 0, 2), tri(0, 0, 2, 1)]).unwrap();
        assert_eq!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
        let disjoint = FComplex::new(2, 6, vec![tri(0, 0, 1, 2), tri(0, 3, 4, 5)]).unwrap();
        assert_ne!(canonical_form(&a).unwrap(), canonical_form(&disjoint).unwrap());
        assert!(a.is_irreducible());
        assert!(!disjoint.is_irreducible());
    }

    #[test]
    fn member_tags_matter() {
        let mixed = FComplex::new(2, 4, vec![tri(0, 0, 1, 2), cycle(1, [0, 1, 3, 2])]).unwrap();
        let cycles = FComplex::new(2, 4, vec![cycle(1, [0, 1, 2, 3]), cycle(1, [0, 1, 3, 2])]).unwrap();
        assert_ne!(canonical_form(&mixed).unwrap(), canonical_form(&cycles).unwrap());
    }

    #[test]
    fn automorphism_examples() {
        let t = FComplex::new(2, 3, vec![tri(0, 0, 1, 2)]).unwrap();
        assert_eq!(automorphism_count(&t).unwrap(), 6);
        let c = FComplex::new(2, 4, vec![cycle(1, [0, 1, 2, 3])]).unwrap();
        assert_eq!(automorphism_count(&c).unwrap(), 8);
        let pair = FComplex::new(2, 4, vec![tri(0, 0, 1, 2), tri(0, 1, 2, 3)]).unwrap();
        assert_eq!(automorphism_count(&pair).unwrap(), 4);
        for b in [&t, &c, &pair] {
            assert_eq!(automorphism_count(b).unwrap(), brute_force_automorphisms(b));
        }
    }

    #[test]
    fn too_many_vertices() {
        let cs: Vec<Constituent> = (0..9).map(|i| Constituent::new(0, vec![vec![2 * i, 2 * i + 1]])).collect();
        let b = FComplex::new(2, 18, cs).unwrap();
        assert_eq!(canonical_form(&b), Err(Error::TooManyVertices { vertices: 18 }));
    }

    #[test]
    fn canonical_complex_has_the_code() {
        let a = FComplex::new(2, 5, vec![tri(0, 4, 1, 2), cycle(1, [1, 2, 3, 0])]).unwrap();
        let can = canonicalize(&a).unwrap();
        let rep = can.complex(&a);
        assert_eq!(canonical_form(&rep).unwrap(), can.code);
        assert!(brute_force_isomorphic(&a, &rep));
    }
}
