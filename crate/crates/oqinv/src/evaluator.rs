//! Tensor-network evaluation of Morse diagrams.
//!
//! Every event of a diagram is assigned an exact matrix or fourth-order
//! tensor derived from the algebra data: the four orientation classes of
//! extrema get matrices built from the background matrices, the eight
//! orientation classes of crossings get rotations of the braiding tensor.
//! The invariant is the full contraction, performed slice by slice as a
//! transfer-matrix sweep.  An independent naive arc-coloring contraction is
//! provided for cross-validation.

use crate::diagram::{cap_turn, Event, MorseDiagram, Sign, Turn};
use crate::laurent::LaurentPoly;
use crate::oqa::{Matrix, MatrixOQA, Tensor4};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("braiding pair is not inverse in either index convention")]
    NoBraidingConvention,
    #[error("sideways crossing tensors differ between their two defining routes ({0})")]
    RouteMismatch(&'static str),
    #[error("diagram is not a one-strand open tangle")]
    NotOneOne,
    #[error("naive contraction exceeds the arc budget ({arcs} arcs, budget {budget})")]
    TooManyArcs { arcs: usize, budget: usize },
}

/// Crossing tensors are indexed `get(top_left, top_right, bot_left,
/// bot_right)`; extremum matrices are indexed `[left][right]` by strand
/// position.
#[derive(Clone)]
pub struct DiagramMatrices {
    pub n: usize,
    pub cap_cw: Matrix,
    pub cap_ccw: Matrix,
    pub cup_cw: Matrix,
    pub cup_ccw: Matrix,
    pub r_up: Tensor4,
    pub s_up: Tensor4,
    pub r_down: Tensor4,
    pub s_down: Tensor4,
    pub r_right: Tensor4,
    pub s_right: Tensor4,
    pub r_left: Tensor4,
    pub s_left: Tensor4,
    /// True when the fallback index convention for the braiding pair was
    /// needed to make the upward tensors mutually inverse.
    pub transposed_pair: bool,
}

/// Compose two crossing tensors as maps from bottom pair to top pair; the
/// result must be the identity for a vertical pair of opposite crossings.
fn pair_is_inverse(r: &Tensor4, s: &Tensor4) -> bool {
    let n = r.rank();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut acc = LaurentPoly::zero();
                    for x in 0..n {
                        for y in 0..n {
                            let u = r.get(a, b, x, y);
                            if u.is_zero() {
                                continue;
                            }
                            let v = s.get(x, y, c, d);
                            if !v.is_zero() {
                                acc += &(u * v);
                            }
                        }
                    }
                    let expected = a == c && b == d;
                    if expected != acc.is_one() || (!expected && !acc.is_zero()) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

impl DiagramMatrices {
    /// Build the event tensors.  Two index conventions can translate the
    /// braiding tensor into the upward crossing tensors; for symmetric data
    /// both are inverse-consistent vertically, so each candidate is
    /// validated all the way through the sideways cancellation before being
    /// accepted.
    pub fn new(oqa: &MatrixOQA) -> Result<Self, EvalError> {
        match Self::with_convention(oqa, false) {
            Ok(dm) => Ok(dm),
            Err(first) => Self::with_convention(oqa, true).map_err(|_| first),
        }
    }

    fn with_convention(oqa: &MatrixOQA, transposed_pair: bool) -> Result<Self, EvalError> {
        let n = oqa.rank;
        let pick = |m: &Matrix, transpose: bool| -> Matrix {
            if transpose {
                (0..n).map(|i| (0..n).map(|j| m[j][i].clone()).collect()).collect()
            } else {
                m.clone()
            }
        };
        let cap_cw = pick(&oqa.m_up, false);
        let cap_ccw = pick(&oqa.m_down_inv, true);
        let cup_ccw = pick(&oqa.m_up_inv, false);
        let cup_cw = pick(&oqa.m_down, true);

        let (r_up, s_up) = {
            let mut r = Tensor4::zero(n);
            let mut s = Tensor4::zero(n);
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            if transposed_pair {
                                r.set(a, b, c, d, oqa.rho.get(a, b, d, c).clone());
                                s.set(a, b, c, d, oqa.rho_inv.get(b, a, c, d).clone());
                            } else {
                                r.set(a, b, c, d, oqa.rho.get(b, a, c, d).clone());
                                s.set(a, b, c, d, oqa.rho_inv.get(a, b, d, c).clone());
                            }
                        }
                    }
                }
            }
            (r, s)
        };
        if !pair_is_inverse(&r_up, &s_up) || !pair_is_inverse(&s_up, &r_up) {
            return Err(EvalError::NoBraidingConvention);
        }

        // Rotated tensors.  Each quarter rotation is the unique solution of
        // the move that slides a crossing past an adjacent extremum, so the
        // rotated tensor can be computed by conjugating one strand with an
        // extremum matrix.  Each rotation has a cap route and a cup route
        // (or two rotation paths for the half turn); they must agree.
        let cap_cw_inv = crate::oqa::mat_inverse(&cap_cw).expect("background invertible");
        let cap_ccw_inv = crate::oqa::mat_inverse(&cap_ccw).expect("background invertible");
        let cup_cw_inv = crate::oqa::mat_inverse(&cup_cw).expect("background invertible");
        let cup_ccw_inv = crate::oqa::mat_inverse(&cup_ccw).expect("background invertible");

        // Clockwise quarter turn (the left strand end swings over the top):
        // X[a,b][c,d] = sum_{p,j} cap_cw^-1[a][p] V[b,j][p,c] cap_cw[j][d]
        //            = sum_{e,j} cup_ccw[a][j] V[b,e][j,c] cup_ccw^-1[e][d]
        let rot_cw = |v: &Tensor4| -> (Tensor4, Tensor4) {
            let mut one = Tensor4::zero(n);
            let mut two = Tensor4::zero(n);
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let mut acc1 = LaurentPoly::zero();
                            let mut acc2 = LaurentPoly::zero();
                            for p in 0..n {
                                for j in 0..n {
                                    let u = v.get(b, j, p, c);
                                    if !u.is_zero() {
                                        acc1 += &(&(&cap_cw_inv[a][p] * u) * &cap_cw[j][d]);
                                    }
                                    let w = v.get(b, p, j, c);
                                    if !w.is_zero() {
                                        acc2 += &(&(&cup_ccw[a][j] * w) * &cup_ccw_inv[p][d]);
                                    }
                                }
                            }
                            one.set(a, b, c, d, acc1);
                            two.set(a, b, c, d, acc2);
                        }
                    }
                }
            }
            (one, two)
        };
        // Counterclockwise quarter turn (the right strand end swings over):
        // X[a,b][c,d] = sum_{e,j} cap_ccw[c][j] V[j,a][d,e] cap_ccw^-1[e][b]
        //            = sum_{p,i} cup_cw^-1[c][p] V[p,a][d,i] cup_cw[i][b]
        let rot_ccw = |v: &Tensor4| -> (Tensor4, Tensor4) {
            let mut one = Tensor4::zero(n);
            let mut two = Tensor4::zero(n);
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let mut acc1 = LaurentPoly::zero();
                            let mut acc2 = LaurentPoly::zero();
                            for j in 0..n {
                                for e in 0..n {
                                    let u = v.get(j, a, d, e);
                                    if !u.is_zero() {
                                        acc1 += &(&(&cap_ccw[c][j] * u) * &cap_ccw_inv[e][b]);
                                        acc2 += &(&(&cup_cw_inv[c][j] * u) * &cup_cw[e][b]);
                                    }
                                }
                            }
                            one.set(a, b, c, d, acc1);
                            two.set(a, b, c, d, acc2);
                        }
                    }
                }
            }
            (one, two)
        };
        let both = |pair: (Tensor4, Tensor4), name: &'static str| -> Result<Tensor4, EvalError> {
            if pair.0 == pair.1 {
                Ok(pair.0)
            } else {
                Err(EvalError::RouteMismatch(name))
            }
        };
        let r_right = both(rot_cw(&r_up), "r_right")?;
        let s_right = both(rot_cw(&s_up), "s_right")?;
        let r_left = both(rot_ccw(&r_up), "r_left")?;
        let s_left = both(rot_ccw(&s_up), "s_left")?;
        let r_down = both((rot_cw(&r_right).0, rot_ccw(&r_left).0), "r_down")?;
        let s_down = both((rot_cw(&s_right).0, rot_ccw(&s_left).0), "s_down")?;

        // The sideways cancellation (opposite crossings stacked on a pair
        // of antiparallel strands) must also hold; it is the criterion that
        // distinguishes the two index conventions.
        if !pair_is_inverse(&r_right, &s_left)
            || !pair_is_inverse(&s_left, &r_right)
            || !pair_is_inverse(&r_left, &s_right)
            || !pair_is_inverse(&s_right, &r_left)
        {
            return Err(EvalError::NoBraidingConvention);
        }

        Ok(DiagramMatrices {
            n,
            cap_cw,
            cap_ccw,
            cup_cw,
            cup_ccw,
            r_up,
            s_up,
            r_down,
            s_down,
            r_right,
            s_right,
            r_left,
            s_left,
            transposed_pair,
        })
    }

    /// The tensor for a crossing token whose two incoming strands carry the
    /// given signs (left and right input column).
    pub fn crossing(&self, token: crate::diagram::OverDir, left: Sign, right: Sign) -> &Tensor4 {
        use crate::diagram::OverDir::*;
        match (left, right, token) {
            (Sign::Up, Sign::Up, SwNe) => &self.r_up,
            (Sign::Up, Sign::Up, SeNw) => &self.s_up,
            (Sign::Down, Sign::Down, SwNe) => &self.r_down,
            (Sign::Down, Sign::Down, SeNw) => &self.s_down,
            (Sign::Up, Sign::Down, SeNw) => &self.r_right,
            (Sign::Up, Sign::Down, SwNe) => &self.s_right,
            (Sign::Down, Sign::Up, SeNw) => &self.r_left,
            (Sign::Down, Sign::Up, SwNe) => &self.s_left,
        }
    }

    pub fn cup(&self, turn: Turn) -> &Matrix {
        match turn {
            Turn::Cw => &self.cup_cw,
            Turn::Ccw => &self.cup_ccw,
        }
    }

    pub fn cap(&self, turn: Turn) -> &Matrix {
        match turn {
            Turn::Cw => &self.cap_cw,
            Turn::Ccw => &self.cap_ccw,
        }
    }
}

// ---------------------------------------------------------------------------
// Transfer-matrix evaluation
// ---------------------------------------------------------------------------

/// The result of contracting a diagram's interior: a polynomial for each
/// coloring of the boundary strands.  Zero entries are omitted.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryTensor {
    pub in_signs: Vec<Sign>,
    pub out_signs: Vec<Sign>,
    pub entries: BTreeMap<(Vec<u8>, Vec<u8>), LaurentPoly>,
}

impl BoundaryTensor {
    /// The single value of a closed diagram.
    pub fn scalar(&self) -> LaurentPoly {
        assert!(self.in_signs.is_empty() && self.out_signs.is_empty());
        self.entries
            .get(&(vec![], vec![]))
            .cloned()
            .unwrap_or_else(LaurentPoly::zero)
    }
}

type Frontier = BTreeMap<Vec<u8>, LaurentPoly>;

/// Push a frontier of level colorings through one slice.
fn apply_slice(dm: &DiagramMatrices, d: &MorseDiagram, s: usize, frontier: &Frontier) -> Frontier {
    let n = dm.n as u8;
    let mut next: Frontier = BTreeMap::new();
    let places = d.layout(s);
    for (key, weight) in frontier {
        // Work items: (position in key, partial output coloring, weight).
        let mut work: Vec<(usize, Vec<u8>, LaurentPoly)> =
            vec![(0, Vec::with_capacity(key.len() + 2), weight.clone())];
        for p in &places {
            let mut grown: Vec<(usize, Vec<u8>, LaurentPoly)> = Vec::new();
            for (pos, out, w) in work.drain(..) {
                match p.event {
                    Event::Id => {
                        let mut o = out;
                        o.push(key[pos]);
                        grown.push((pos + 1, o, w));
                    }
                    Event::Cap => {
                        let (x, y) = (key[pos] as usize, key[pos + 1] as usize);
                        let turn = cap_turn(
                            d.levels()[s][p.in_start],
                            d.levels()[s][p.in_start + 1],
                        )
                        .expect("validated cap");
                        let e = &dm.cap(turn)[x][y];
                        if !e.is_zero() {
                            grown.push((pos + 2, out, &w * e));
                        }
                    }
                    Event::Cup(turn) => {
                        let m = dm.cup(turn);
                        for x in 0..n {
                            for y in 0..n {
                                let e = &m[x as usize][y as usize];
                                if e.is_zero() {
                                    continue;
                                }
                                let mut o = out.clone();
                                o.push(x);
                                o.push(y);
                                grown.push((pos, o, &w * e));
                            }
                        }
                    }
                    Event::Crossing(tok) => {
                        let (c, dd) = (key[pos] as usize, key[pos + 1] as usize);
                        let t = dm.crossing(
                            tok,
                            d.levels()[s][p.in_start],
                            d.levels()[s][p.in_start + 1],
                        );
                        for a in 0..n {
                            for b in 0..n {
                                let e = t.get(a as usize, b as usize, c, dd);
                                if e.is_zero() {
                                    continue;
                                }
                                let mut o = out.clone();
                                o.push(a);
                                o.push(b);
                                grown.push((pos + 2, o, &w * e));
                            }
                        }
                    }
                }
            }
            work = grown;
        }
        for (pos, out, w) in work {
            debug_assert_eq!(pos, key.len());
            let slot = next.entry(out).or_insert_with(LaurentPoly::zero);
            *slot += &w;
        }
    }
    next.retain(|_, v| !v.is_zero());
    next
}

/// Contract a diagram against the algebra's event tensors, one boundary
/// coloring at a time.
pub fn evaluate_with(dm: &DiagramMatrices, d: &MorseDiagram) -> BoundaryTensor {
    let n = dm.n as u8;
    let dom = d.domain().len();
    let mut entries = BTreeMap::new();
    let mut in_key = vec![0u8; dom];
    loop {
        let mut frontier: Frontier = BTreeMap::new();
        frontier.insert(in_key.clone(), LaurentPoly::one());
        for s in 0..d.slices().len() {
            frontier = apply_slice(dm, d, s, &frontier);
            if frontier.is_empty() {
                break;
            }
        }
        for (out_key, w) in frontier {
            entries.insert((in_key.clone(), out_key), w);
        }
        // Advance the domain coloring odometer.
        let mut i = dom;
        loop {
            if i == 0 {
                return BoundaryTensor {
                    in_signs: d.domain().to_vec(),
                    out_signs: d.codomain().to_vec(),
                    entries,
                };
            }
            i -= 1;
            in_key[i] += 1;
            if in_key[i] < n {
                break;
            }
            in_key[i] = 0;
        }
    }
}

/// Contract a diagram against the algebra data.
pub fn evaluate(oqa: &MatrixOQA, d: &MorseDiagram) -> Result<BoundaryTensor, EvalError> {
    let dm = DiagramMatrices::new(oqa)?;
    Ok(evaluate_with(&dm, d))
}

/// Close a one-in one-out tangle with a strand around its right side and
/// return the closed diagram.
pub fn close_right(d: &MorseDiagram) -> Result<MorseDiagram, EvalError> {
    if d.domain().len() != 1 || d.codomain().len() != 1 || d.domain() != d.codomain() {
        return Err(EvalError::NotOneOne);
    }
    let sign = d.domain()[0];
    let cup = match sign {
        Sign::Up => Event::Cup(Turn::Cw),
        Sign::Down => Event::Cup(Turn::Ccw),
    };
    let mut slices = vec![vec![cup]];
    for s in d.slices() {
        let mut sl = s.clone();
        sl.push(Event::Id);
        slices.push(sl);
    }
    slices.push(vec![Event::Cap]);
    Ok(MorseDiagram::new(vec![], slices).expect("closure of a valid tangle is valid"))
}

/// Invariant of the right-side closure of a one-strand tangle.
pub fn closure_value(oqa: &MatrixOQA, d: &MorseDiagram) -> Result<LaurentPoly, EvalError> {
    Ok(evaluate(oqa, &close_right(d)?)?.scalar())
}

// ---------------------------------------------------------------------------
// Naive arc-coloring contraction (independent cross-check)
// ---------------------------------------------------------------------------

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

enum NodeKind {
    CupNode(Turn),
    CapNode(Turn),
    CrossNode(crate::diagram::OverDir, Sign, Sign),
}

struct Node {
    kind: NodeKind,
    /// Arc ids: extrema list `(left, right)`; crossings list
    /// `(top_left, top_right, bot_left, bot_right)`.
    arcs: Vec<usize>,
}

/// Contract by enumerating colorings of the maximal straight arcs directly,
/// multiplying event weights as soon as their arcs are all colored.  Bails
/// out when the number of arcs exceeds `max_arcs`.
pub fn contract_naive(
    oqa: &MatrixOQA,
    d: &MorseDiagram,
    max_arcs: usize,
) -> Result<BoundaryTensor, EvalError> {
    let dm = DiagramMatrices::new(oqa)?;
    // Dart numbering: one per (level, pos).
    let mut offsets = vec![0usize];
    for l in d.levels() {
        offsets.push(offsets.last().unwrap() + l.len());
    }
    let total = *offsets.last().unwrap();
    let dart = |level: usize, pos: usize| offsets[level] + pos;
    let mut uf = UnionFind::new(total);
    let mut nodes: Vec<Node> = Vec::new();
    for s in 0..d.slices().len() {
        for p in d.layout(s) {
            match p.event {
                Event::Id => uf.union(dart(s, p.in_start), dart(s + 1, p.out_start)),
                Event::Cup(turn) => nodes.push(Node {
                    kind: NodeKind::CupNode(turn),
                    arcs: vec![dart(s + 1, p.out_start), dart(s + 1, p.out_start + 1)],
                }),
                Event::Cap => {
                    let turn = cap_turn(
                        d.levels()[s][p.in_start],
                        d.levels()[s][p.in_start + 1],
                    )
                    .expect("validated cap");
                    nodes.push(Node {
                        kind: NodeKind::CapNode(turn),
                        arcs: vec![dart(s, p.in_start), dart(s, p.in_start + 1)],
                    });
                }
                Event::Crossing(tok) => nodes.push(Node {
                    kind: NodeKind::CrossNode(
                        tok,
                        d.levels()[s][p.in_start],
                        d.levels()[s][p.in_start + 1],
                    ),
                    arcs: vec![
                        dart(s + 1, p.out_start),
                        dart(s + 1, p.out_start + 1),
                        dart(s, p.in_start),
                        dart(s, p.in_start + 1),
                    ],
                }),
            }
        }
    }
    // Compress darts to arc ids.
    let mut arc_of = vec![usize::MAX; total];
    let mut arc_count = 0usize;
    for x in 0..total {
        let r = uf.find(x);
        if arc_of[r] == usize::MAX {
            arc_of[r] = arc_count;
            arc_count += 1;
        }
        arc_of[x] = arc_of[r];
    }
    if arc_count > max_arcs {
        return Err(EvalError::TooManyArcs { arcs: arc_count, budget: max_arcs });
    }
    for node in &mut nodes {
        for a in &mut node.arcs {
            *a = arc_of[*a];
        }
    }
    let boundary_in: Vec<usize> = (0..d.domain().len()).map(|p| arc_of[dart(0, p)]).collect();
    let top = d.levels().len() - 1;
    let boundary_out: Vec<usize> =
        (0..d.codomain().len()).map(|p| arc_of[dart(top, p)]).collect();

    // For pruning, fire each node's weight as soon as its last arc (in the
    // enumeration order 0..arc_count) is colored.
    let mut fire_at: Vec<Vec<usize>> = vec![Vec::new(); arc_count];
    for (i, node) in nodes.iter().enumerate() {
        let last = *node.arcs.iter().max().unwrap();
        fire_at[last].push(i);
    }

    let n = dm.n;
    let weight_of = |node: &Node, colors: &[u8]| -> LaurentPoly {
        let c = |k: usize| colors[node.arcs[k]] as usize;
        match &node.kind {
            NodeKind::CupNode(t) => dm.cup(*t)[c(0)][c(1)].clone(),
            NodeKind::CapNode(t) => dm.cap(*t)[c(0)][c(1)].clone(),
            NodeKind::CrossNode(tok, l, r) => {
                dm.crossing(*tok, *l, *r).get(c(0), c(1), c(2), c(3)).clone()
            }
        }
    };

    fn recurse(
        arc: usize,
        arc_count: usize,
        n: usize,
        colors: &mut Vec<u8>,
        acc: &LaurentPoly,
        nodes: &[Node],
        fire_at: &[Vec<usize>],
        weight_of: &dyn Fn(&Node, &[u8]) -> LaurentPoly,
        sink: &mut dyn FnMut(&[u8], &LaurentPoly),
    ) {
        if arc == arc_count {
            sink(colors, acc);
            return;
        }
        for v in 0..n as u8 {
            colors[arc] = v;
            let mut w = acc.clone();
            let mut dead = false;
            for &ni in &fire_at[arc] {
                let f = weight_of(&nodes[ni], colors);
                if f.is_zero() {
                    dead = true;
                    break;
                }
                w = &w * &f;
            }
            if !dead {
                recurse(arc + 1, arc_count, n, colors, &w, nodes, fire_at, weight_of, sink);
            }
        }
    }

    let mut entries: BTreeMap<(Vec<u8>, Vec<u8>), LaurentPoly> = BTreeMap::new();
    let mut colors = vec![0u8; arc_count];
    let one = LaurentPoly::one();
    {
        let mut sink = |colors: &[u8], w: &LaurentPoly| {
            let key = (
                boundary_in.iter().map(|a| colors[*a]).collect::<Vec<u8>>(),
                boundary_out.iter().map(|a| colors[*a]).collect::<Vec<u8>>(),
            );
            let slot = entries.entry(key).or_insert_with(LaurentPoly::zero);
            *slot += w;
        };
        recurse(0, arc_count, n, &mut colors, &one, &nodes, &fire_at, &weight_of, &mut sink);
    }
    entries.retain(|_, v| !v.is_zero());
    Ok(BoundaryTensor {
        in_signs: d.domain().to_vec(),
        out_signs: d.codomain().to_vec(),
        entries,
    })
}
