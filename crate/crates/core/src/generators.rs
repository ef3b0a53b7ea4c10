//! Instance families: copies of small forbidden hypergraphs inside the
//! complete `r`-graph on `[n]`, `r`-term arithmetic progressions, and
//! collinear triples; plus density statistics of the forbidden members.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::model::Hypergraph;
use crate::symbolic::complex::{canonical_form, Constituent, FComplex};

/// A small `r`-uniform hypergraph without isolated vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SmallRGraph {
    r: usize,
    num_vertices: usize,
    edges: Vec<Vec<usize>>,
}

impl SmallRGraph {
    pub fn new(r: usize, num_vertices: usize, mut edges: Vec<Vec<usize>>) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidMember("uniformity must be positive".into()));
        }
        if edges.is_empty() {
            return Err(Error::InvalidMember("member has no edges".into()));
        }
        if num_vertices > 16 {
            return Err(Error::InvalidMember(format!("{num_vertices} vertices; members are limited to 16")));
        }
        let mut covered = vec![false; num_vertices];
        for e in &mut edges {
            e.sort_unstable();
            if e.len() != r {
                return Err(Error::InvalidMember(format!("edge {e:?} does not have {r} vertices")));
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidMember(format!("edge {e:?} repeats a vertex")));
            }
            for &v in e.iter() {
                if v >= num_vertices {
                    return Err(Error::InvalidMember(format!("vertex {v} out of range")));
                }
                covered[v] = true;
            }
        }
        if let Some(v) = covered.iter().position(|c| !c) {
            return Err(Error::InvalidMember(format!("vertex {v} is isolated")));
        }
        edges.sort();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidMember("repeated edge".into()));
        }
        Ok(Self { r, num_vertices, edges })
    }

    pub fn triangle() -> Self {
        Self::complete(2, 3)
    }

    pub fn four_cycle() -> Self {
        Self::new(2, 4, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]]).unwrap()
    }

    /// Complete `r`-graph on `v` vertices.
    pub fn complete(r: usize, v: usize) -> Self {
        let mut edges = Vec::new();
        let mut cur = Vec::new();
        subsets_of_size(v, r, 0, &mut cur, &mut edges);
        Self::new(r, v, edges).unwrap()
    }

    pub fn uniformity(&self) -> usize {
        self.r
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    /// The member as a one-constituent complex tagged `member`.
    pub fn as_complex(&self, member: usize) -> FComplex {
        let edges = self
            .edges
            .iter()
            .map(|e| e.iter().map(|&v| v as u8).collect())
            .collect();
        FComplex::new(self.r, self.num_vertices, vec![Constituent::new(member, edges)]).unwrap()
    }

    /// Number of vertices covered by the edges selected by `mask`.
    fn covered(&self, mask: u64) -> usize {
        let mut seen = 0u64;
        for (i, e) in self.edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for &v in e {
                    seen |= 1 << v;
                }
            }
        }
        seen.count_ones() as usize
    }
}

fn subsets_of_size(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        subsets_of_size(n, k, i + 1, cur, out);
        cur.pop();
    }
}

/// Named built-in member: `k3`, `c4`, `k4`.
pub fn builtin_member(name: &str) -> Option<SmallRGraph> {
    match name.trim().to_ascii_lowercase().as_str() {
        "k3" => Some(SmallRGraph::triangle()),
        "c4" => Some(SmallRGraph::four_cycle()),
        "k4" => Some(SmallRGraph::complete(2, 4)),
        _ => None,
    }
}

/// What a family name refers to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    Subgraphs(Vec<SmallRGraph>),
    /// `r`-term arithmetic progressions in `[n]`.
    Progressions { r: usize },
}

impl FamilySpec {
    /// Parses `k3`, `k3,c4`, `ap:3`, ...
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if let Some(r) = spec.strip_prefix("ap:") {
            let r: usize = r
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad progression length in {spec:?}")))?;
            if r < 3 {
                return Err(Error::InvalidParameter("progressions need at least 3 terms".into()));
            }
            return Ok(Self::Progressions { r });
        }
        let members = spec
            .split(',')
            .map(|name| {
                builtin_member(name).ok_or_else(|| Error::InvalidParameter(format!("unknown family member {name:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::Subgraphs(members))
    }

    /// Builds the instance for ground-set parameter `n`.
    pub fn instance(&self, n: usize) -> Result<Hypergraph> {
        match self {
            Self::Subgraphs(f) => Ok(gen_subgraph_copies(f, n)?.hypergraph),
            Self::Progressions { r } => gen_aps(n, *r),
        }
    }
}

/// Parses a family file: per member an `r v e` header followed by `e` edge
/// lines. Blank lines and `#` comments are skipped.
pub fn parse_family(text: &str) -> Result<Vec<SmallRGraph>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let numbers = |line: usize, l: &str| -> Result<Vec<usize>> {
        l.split_whitespace()
            .map(|t| {
                t.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("expected an integer, got {t:?}"),
                })
            })
            .collect()
    };
    let mut out = Vec::new();
    while let Some((line, header)) = lines.next() {
        let h = numbers(line, header)?;
        if h.len() != 3 {
            return Err(Error::Parse {
                line,
                message: "member header must be `r v e`".into(),
            });
        }
        let (r, v, e) = (h[0], h[1], h[2]);
        let mut edges = Vec::with_capacity(e);
        for _ in 0..e {
            let (line, l) = lines.next().ok_or(Error::Parse {
                line,
                message: "missing edge lines".into(),
            })?;
            edges.push(numbers(line, l)?);
        }
        out.push(SmallRGraph::new(r, v, edges).map_err(|err| Error::Parse {
            line,
            message: err.to_string(),
        })?);
    }
    if out.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no family members".into(),
        });
    }
    Ok(out)
}

pub fn family_to_text(family: &[SmallRGraph]) -> String {
    let mut out = String::new();
    for f in family {
        out.push_str(&format!("{} {} {}\n", f.r, f.num_vertices, f.edges.len()));
        for e in &f.edges {
            let line: Vec<String> = e.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    out
}

/// `C(n, k)` in `u64`, saturating.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Colex rank of a sorted set: `Σ_i C(c_i, i+1)`.
pub fn colex_rank(set: &[usize]) -> usize {
    set.iter()
        .enumerate()
        .map(|(i, &c)| binomial(c as u64, i as u64 + 1) as usize)
        .sum()
}

/// Inverse of [`colex_rank`] for sets of size `r`.
pub fn colex_unrank(mut rank: usize, r: usize) -> Vec<usize> {
    let mut out = vec![0; r];
    for i in (0..r).rev() {
        let mut c = i;
        while binomial(c as u64 + 1, i as u64 + 1) as usize <= rank {
            c += 1;
        }
        rank -= binomial(c as u64, i as u64 + 1) as usize;
        out[i] = c;
    }
    out
}

/// One placed copy of a family member inside `K_n^{(r)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Copy {
    pub member: usize,
    /// Edges as sorted `r`-sets over `[n]`, sorted.
    pub edges: Vec<Vec<usize>>,
}

/// Copies of the members of a family, with tags kept so clusters can be
/// turned back into complexes.
#[derive(Debug, Clone)]
pub struct CopyInstance {
    pub n: usize,
    pub r: usize,
    pub family: Vec<SmallRGraph>,
    pub hypergraph: Hypergraph,
    /// `copies[i]` is edge `i` of `hypergraph`.
    pub copies: Vec<Copy>,
}

impl CopyInstance {
    /// The complex formed by the copies in `members`, on a compact local
    /// vertex window.
    pub fn complex_of(&self, members: &[usize]) -> Result<FComplex> {
        let mut verts: Vec<usize> = members
            .iter()
            .flat_map(|&i| self.copies[i].edges.iter().flatten().copied())
            .collect();
        verts.sort_unstable();
        verts.dedup();
        if verts.len() > 255 {
            return Err(Error::TooManyVertices { vertices: verts.len() });
        }
        let local = |v: usize| verts.binary_search(&v).unwrap() as u8;
        let constituents = members
            .iter()
            .map(|&i| {
                let c = &self.copies[i];
                Constituent::new(c.member, c.edges.iter().map(|e| e.iter().map(|&v| local(v)).collect()).collect())
            })
            .collect();
        FComplex::new(self.r, verts.len(), constituents)
    }
}

/// Checks shared uniformity and pairwise non-isomorphism of the members.
pub fn check_family(family: &[SmallRGraph]) -> Result<usize> {
    let r = family
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty family".into()))?
        .r;
    if family.iter().any(|f| f.r != r) {
        return Err(Error::MixedUniformity);
    }
    let codes = family
        .iter()
        .map(|f| canonical_form(&f.as_complex(0)))
        .collect::<Result<Vec<_>>>()?;
    for i in 0..codes.len() {
        for j in i + 1..codes.len() {
            if codes[i] == codes[j] {
                return Err(Error::IsomorphicDuplicates { first: i, second: j });
            }
        }
    }
    Ok(r)
}

/// All copies of all members inside the complete `r`-graph on `[n]`. The
/// vertex set of the instance is the set of `r`-subsets of `[n]` in colex
/// order; instance edges are the edge sets of the copies, sorted.
pub fn gen_subgraph_copies(family: &[SmallRGraph], n: usize) -> Result<CopyInstance> {
    let r = check_family(family)?;
    if r > n {
        return Err(Error::InvalidParameter(format!("uniformity {r} exceeds n = {n}")));
    }
    let slots = binomial(n as u64, r as u64);
    if slots > u32::MAX as u64 {
        return Err(Error::TooLarge {
            size: slots as usize,
            max: u32::MAX as usize,
        });
    }
    let mut found: Vec<(Vec<usize>, Copy)> = Vec::new();
    for (id, f) in family.iter().enumerate() {
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut image = vec![usize::MAX; f.num_vertices];
        let mut used = vec![false; n];
        place(f, 0, n, &mut image, &mut used, &mut |img| {
            let mut edges: Vec<Vec<usize>> = f
                .edges
                .iter()
                .map(|e| {
                    let mut t: Vec<usize> = e.iter().map(|&v| img[v]).collect();
                    t.sort_unstable();
                    t
                })
                .collect();
            edges.sort();
            let mut ranks: Vec<usize> = edges.iter().map(|e| colex_rank(e)).collect();
            ranks.sort_unstable();
            if seen.insert(ranks.clone()) {
                found.push((ranks, Copy { member: id, edges }));
            }
        });
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    let (edges, copies): (Vec<Vec<usize>>, Vec<Copy>) = found.into_iter().unzip();
    let hypergraph = Hypergraph::new(slots as usize, edges)?;
    Ok(CopyInstance {
        n,
        r,
        family: family.to_vec(),
        hypergraph,
        copies,
    })
}

fn place(
    f: &SmallRGraph,
    v: usize,
    n: usize,
    image: &mut Vec<usize>,
    used: &mut Vec<bool>,
    emit: &mut impl FnMut(&[usize]),
) {
    if v == f.num_vertices {
        emit(image);
        return;
    }
    for x in 0..n {
        if !used[x] {
            used[x] = true;
            image[v] = x;
            place(f, v + 1, n, image, used, emit);
            used[x] = false;
        }
    }
}

/// All `r`-term arithmetic progressions in `[n]` (stored 0-indexed).
pub fn gen_aps(n: usize, r: usize) -> Result<Hypergraph> {
    if r < 2 {
        return Err(Error::InvalidParameter("progressions need at least 2 terms".into()));
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for d in 1..n {
            let last = a + (r - 1) * d;
            if last >= n {
                break;
            }
            edges.push((0..r).map(|i| a + i * d).collect());
        }
    }
    edges.sort();
    Hypergraph::new(n, edges)
}

/// Distinct points with integer coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    points: Vec<(i64, i64)>,
}

impl PointSet {
    pub fn new(points: Vec<(i64, i64)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (i, p) in points.iter().enumerate() {
            if !seen.insert(*p) {
                return Err(Error::InvalidParameter(format!("point {i} {p:?} is repeated")));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(i64, i64)] {
        &self.points
    }
}

/// Every collinear triple, by the exact cross-product test.
pub fn gen_collinear(ps: &PointSet) -> Hypergraph {
    let p = &ps.points;
    let mut edges = Vec::new();
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            for k in j + 1..p.len() {
                let (ax, ay) = ((p[j].0 - p[i].0) as i128, (p[j].1 - p[i].1) as i128);
                let (bx, by) = ((p[k].0 - p[i].0) as i128, (p[k].1 - p[i].1) as i128);
                if ax * by == ay * bx {
                    edges.push(vec![i, j, k]);
                }
            }
        }
    }
    Hypergraph::new(p.len(), edges).unwrap()
}

/// An exact density that may be `+∞` (the minimum over an empty set).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Density {
    Finite(Ratio<i64>),
    Infinite,
}

impl Density {
    pub fn as_f64(self) -> f64 {
        match self {
            Density::Finite(q) => *q.numer() as f64 / *q.denom() as f64,
            Density::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<Ratio<i64>> {
        match self {
            Density::Finite(q) => Some(q),
            Density::Infinite => None,
        }
    }
}

impl PartialOrd for Density {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Density {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Density::Finite(a), Density::Finite(b)) => a.cmp(b),
            (Density::Finite(_), Density::Infinite) => Ordering::Less,
            (Density::Infinite, Density::Finite(_)) => Ordering::Greater,
            (Density::Infinite, Density::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::Finite(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Density::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemberStats {
    pub m_star: Density,
    /// `None` for members with fewer than two edges.
    pub m_r: Option<Ratio<i64>>,
    pub is_r_balanced: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyStats {
    pub members: Vec<MemberStats>,
    /// `min e_F / v_F`.
    pub d: Ratio<i64>,
    pub m_star: Density,
}

fn member_subsets(f: &SmallRGraph) -> Result<impl Iterator<Item = (usize, usize)> + '_> {
    let e = f.edges.len();
    if e > 24 {
        return Err(Error::TooLarge { size: e, max: 24 });
    }
    Ok((1u64..(1u64 << e)).map(move |mask| (mask.count_ones() as usize, f.covered(mask))))
}

/// `m_*(F) = min (e_F - e_H) / (v_F - v_H)` over `H ⊆ F` with
/// `v_H < v_F` and `e_H > 0`; `+∞` when no such `H` exists.
pub fn m_star(f: &SmallRGraph) -> Result<Density> {
    let (ef, vf) = (f.edges.len() as i64, f.num_vertices as i64);
    let mut best = Density::Infinite;
    for (eh, vh) in member_subsets(f)? {
        let (eh, vh) = (eh as i64, vh as i64);
        if vh < vf {
            best = best.min(Density::Finite(Ratio::new(ef - eh, vf - vh)));
        }
    }
    Ok(best)
}

/// `m_r(F) = max (e_H - 1) / (v_H - r)` over `H ⊆ F` with `e_H > 1`.
pub fn r_density(f: &SmallRGraph, member: usize) -> Result<Ratio<i64>> {
    if f.edges.len() < 2 {
        return Err(Error::UndefinedDensity { member });
    }
    let r = f.r as i64;
    let mut best: Option<Ratio<i64>> = None;
    for (eh, vh) in member_subsets(f)? {
        if eh > 1 {
            let q = Ratio::new(eh as i64 - 1, vh as i64 - r);
            best = Some(best.map_or(q, |b| b.max(q)));
        }
    }
    Ok(best.unwrap())
}

pub fn family_stats(family: &[SmallRGraph]) -> Result<FamilyStats> {
    check_family(family)?;
    let mut members = Vec::new();
    for (i, f) in family.iter().enumerate() {
        let m_star = m_star(f)?;
        let m_r = match r_density(f, i) {
            Ok(q) => Some(q),
            Err(Error::UndefinedDensity { .. }) => None,
            Err(e) => return Err(e),
        };
        let own = (f.edges.len() >= 2)
            .then(|| Ratio::new(f.edges.len() as i64 - 1, (f.num_vertices - f.r) as i64));
        members.push(MemberStats {
            m_star,
            m_r,
            is_r_balanced: m_r.is_some() && m_r == own,
        });
    }
    let d = family
        .iter()
        .map(|f| Ratio::new(f.edges.len() as i64, f.num_vertices as i64))
        .min()
        .unwrap();
    let m_star = members.iter().map(|m| m.m_star).min().unwrap();
    Ok(FamilyStats { members, d, m_star })
}
