//! Bead normal form for knots: slide crossing decorations along the strand.
//!
//! A one-component diagram (closed, or an open one-in one-out tangle) is
//! decorated by splitting every crossing into two beads, one per strand
//! pass.  Sliding all beads along the strand to a single segment conjugates
//! each bead by the turns it crosses; the bead-free remainder collapses to
//! a power of `G` (the product of the two background matrices), giving the
//! normal form `G^n * w` where `w` is the bead word with accumulated
//! `t`-powers (`t` = conjugation by `G`).  Evaluating the word against an
//! algebra reproduces the tensor-network invariant.

use crate::diagram::{components, Diag, Event, MorseDiagram, OverDir, PathItem, Sign, Turn};
use crate::evaluator::{DiagramMatrices, EvalError};
use crate::laurent::LaurentPoly;
use crate::oqa::{check_all, mat_inverse, mat_mul, mat_pow, MatrixOQA, Tensor4};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum BeadsError {
    #[error("diagram has {0} components, bead words are defined for one")]
    NotSingleComponent(usize),
    #[error("diagram must be closed or a one-in one-out tangle")]
    UnsupportedBoundary,
    #[error("crossing {0}: bead conjugation exponents differ by an odd half-turn count")]
    UnbalancedCrossing(usize),
    #[error("crossing {0} does not contribute exactly two beads")]
    BrokenPairing(usize),
    #[error("algebra fails an axiom check: {0}")]
    AxiomFailure(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// One bead: half of a crossing, attached to the strand pass it rides.
/// Unprimed beads sit on the over-strand, primed on the under-strand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signifier {
    /// Ordinal of the originating crossing (order of appearance in the
    /// diagram, 0-based).
    pub crossing: usize,
    pub primed: bool,
    /// True when the crossing is negative (its pair contracts through the
    /// inverse braiding tensor).
    pub negative: bool,
    /// Flow direction of this bead's strand pass.
    pub dir_up: bool,
    /// Residual conjugation power of `t = G(.)G^-1` after pair
    /// normalization.
    pub t_power: i64,
}

/// The normal form `G^curl_count * word`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeadWord {
    pub curl_count: i64,
    pub word: Vec<Signifier>,
}

/// An intermediate item of the decorated strand, in traversal order.
#[derive(Clone, Copy, Debug)]
pub enum DecItem {
    /// A cup or cap passage; `h` is +1 clockwise, -1 counterclockwise.
    Turn { h: i64 },
    /// A crossing pass; `adj` is the intrinsic half-turn conjugation the
    /// pass absorbs from rotating its crossing upright.
    Bead { crossing: usize, primed: bool, negative: bool, dir_up: bool, adj: i64 },
}

/// A one-component diagram with its strand fully traversed and decorated.
#[derive(Clone, Debug)]
pub struct DecoratedDiagram {
    pub diagram: MorseDiagram,
    pub items: Vec<DecItem>,
    /// Empty domain (closed) or the single boundary sign.
    pub boundary: Option<Sign>,
}

/// Traverse a one-component diagram and attach beads to crossing passes.
pub fn decorate(d: &MorseDiagram) -> Result<DecoratedDiagram, BeadsError> {
    let boundary = if d.is_closed() {
        None
    } else if d.domain().len() == 1 && d.codomain() == d.domain() {
        Some(d.domain()[0])
    } else {
        return Err(BeadsError::UnsupportedBoundary);
    };
    let comps = components(d);
    if comps.len() != 1 {
        return Err(BeadsError::NotSingleComponent(comps.len()));
    }

    // Site data per crossing: ordinal, sign, over diagonal, leg signs.
    struct Site {
        ordinal: usize,
        negative: bool,
        over: Diag,
        left_sign: Sign,
        right_sign: Sign,
    }
    let mut sites: BTreeMap<(usize, usize), Site> = BTreeMap::new();
    for s in 0..d.slices().len() {
        for p in d.layout(s) {
            if let Event::Crossing(dir) = p.event {
                let ls = d.levels()[s][p.in_start];
                let rs = d.levels()[s][p.in_start + 1];
                let positive =
                    if ls == rs { dir == OverDir::SwNe } else { dir == OverDir::SeNw };
                sites.insert(
                    (s, p.index),
                    Site {
                        ordinal: sites.len(),
                        negative: !positive,
                        over: match dir {
                            OverDir::SwNe => Diag::Slash,
                            OverDir::SeNw => Diag::Backslash,
                        },
                        left_sign: ls,
                        right_sign: rs,
                    },
                );
            }
        }
    }

    let mut items = Vec::new();
    for item in &comps[0].items {
        match *item {
            PathItem::Turn { turn, .. } => {
                items.push(DecItem::Turn { h: if turn == Turn::Cw { 1 } else { -1 } });
            }
            PathItem::Cross { slice, index, diag } => {
                let site = &sites[&(slice, index)];
                let primed = diag != site.over;
                // A pass along the slash diagonal occupies the bottom-left
                // leg, along the backslash the bottom-right; the leg's sign
                // is the pass's flow direction.
                let dir_up = match diag {
                    Diag::Slash => site.left_sign == Sign::Up,
                    Diag::Backslash => site.right_sign == Sign::Up,
                };
                // Rotating the crossing upright leaves conjugation residue
                // on its passes: a half turn on each pass of a downward
                // crossing, a quarter-turn pair (+1 or -1 by side) on the
                // downward pass of a sideways crossing.
                let adj = if site.left_sign == site.right_sign {
                    if site.left_sign == Sign::Down {
                        1
                    } else {
                        0
                    }
                } else if dir_up {
                    0
                } else if site.left_sign == Sign::Up {
                    1
                } else {
                    -1
                };
                items.push(DecItem::Bead {
                    crossing: site.ordinal,
                    primed,
                    negative: site.negative,
                    dir_up,
                    adj,
                });
            }
        }
    }
    Ok(DecoratedDiagram { diagram: d.clone(), items, boundary })
}

/// Slide every bead to the strand's end, collapse the turns to `G^n`, and
/// normalize conjugation powers pairwise per crossing.
pub fn slide_to_top(dec: &DecoratedDiagram) -> Result<BeadWord, BeadsError> {
    // Suffix half-turn sums: a bead slid over the turns after it picks up
    // their conjugations.
    let mut exponents = Vec::new();
    let mut word = Vec::new();
    let mut suffix = 0i64;
    let mut total_h = 0i64;
    for item in dec.items.iter().rev() {
        match *item {
            DecItem::Turn { h } => {
                suffix += h;
                total_h += h;
            }
            DecItem::Bead { crossing, primed, negative, dir_up, adj } => {
                word.push(Signifier { crossing, primed, negative, dir_up, t_power: 0 });
                exponents.push(suffix + adj);
            }
        }
    }
    word.reverse();
    exponents.reverse();

    // Pair normalization: remove the later bead's full conjugation from
    // both members of its pair (legal because conjugating both halves of a
    // crossing by a background power is an axiom symmetry); the remainder
    // must be an even half-turn count, i.e. a power of t.
    let mut pairs: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, s) in word.iter().enumerate() {
        pairs.entry(s.crossing).or_default().push(i);
    }
    for (crossing, ix) in &pairs {
        if ix.len() != 2 {
            return Err(BeadsError::BrokenPairing(*crossing));
        }
        let residue = exponents[ix[0]] - exponents[ix[1]];
        if residue % 2 != 0 {
            return Err(BeadsError::UnbalancedCrossing(*crossing));
        }
        word[ix[0]].t_power = residue / 2;
        word[ix[1]].t_power = 0;
    }

    // Bead-free remainder: the turns collapse to G^(half-turns/2), the
    // closure arc adds one curl, and each crossing flattens to a curl
    // counted by its sign times its over-pass direction.
    debug_assert!(total_h % 2 == 0, "odd turn total on a strand with equal endpoints");
    let closure = match dec.boundary {
        None => 0,
        Some(Sign::Up) => 1,
        Some(Sign::Down) => -1,
    };
    let n = total_h / 2 + closure - crossing_shift(&word);
    Ok(BeadWord { curl_count: n, word })
}

/// Sum over crossings of sign times over-pass direction: the curl residue
/// a flattened crossing leaves behind.
fn crossing_shift(word: &[Signifier]) -> i64 {
    word.iter()
        .filter(|s| !s.primed)
        .map(|s| {
            let sign = if s.negative { -1 } else { 1 };
            let dir = if s.dir_up { 1 } else { -1 };
            sign * dir
        })
        .sum()
}

/// Reverse the strand orientation of a normal form: the curl count
/// negates, the word reverses with flipped pass directions, and each
/// pair's residual `t`-power moves to the newly-first bead, negated.
pub fn reverse_word(bw: &BeadWord) -> BeadWord {
    let mut word: Vec<Signifier> = bw
        .word
        .iter()
        .rev()
        .map(|s| Signifier { dir_up: !s.dir_up, t_power: 0, ..*s })
        .collect();
    let mut first_power: BTreeMap<usize, i64> = BTreeMap::new();
    for s in &bw.word {
        first_power.entry(s.crossing).or_insert(s.t_power);
    }
    let mut seen: BTreeMap<usize, ()> = BTreeMap::new();
    for s in word.iter_mut() {
        if seen.insert(s.crossing, ()).is_none() {
            s.t_power = -first_power[&s.crossing];
        }
    }
    BeadWord { curl_count: -bw.curl_count, word }
}

/// Render the normal form as text, e.g. `G^-1 (t e1)(t E2')(e3)`.
pub fn render_word(bw: &BeadWord) -> String {
    let mut out = format!("G^{}", bw.curl_count);
    if bw.word.is_empty() {
        out.push_str(" 1");
        return out;
    }
    out.push(' ');
    for s in &bw.word {
        let sym = if s.negative { "E" } else { "e" };
        let prime = if s.primed { "'" } else { "" };
        let t = match s.t_power {
            0 => String::new(),
            1 => "t ".to_string(),
            p => format!("t^{p} "),
        };
        out.push_str(&format!("({t}{sym}{}{prime})", s.crossing + 1));
    }
    out
}

/// Evaluate `trace(G^n * Rep(word))` against an algebra.  Each crossing's
/// two beads contract through the upward braiding tensor (or its inverse),
/// with slots swapped on downward passes; residual `t`-powers conjugate
/// the bead's slots by powers of `G`.
pub fn evaluate_word(bw: &BeadWord, oqa: &MatrixOQA) -> Result<LaurentPoly, BeadsError> {
    let report = check_all(oqa);
    if !report.all_pass() {
        return Err(BeadsError::AxiomFailure(format!("{report:?}")));
    }
    let dm = DiagramMatrices::new(oqa)?;
    let n = oqa.rank;
    let g = mat_mul(&oqa.m_up, &oqa.m_down);
    let g_inv = mat_inverse(&g).expect("background product invertible");

    // Flattened crossings contribute curls; fold them back into the trace
    // weight so `curl_count` stays the geometric count.
    let n_eff = bw.curl_count + crossing_shift(&bw.word);
    let g_n = mat_pow(&g, n_eff, &g_inv);

    // Effective pair tensor per crossing: the braiding tensor with each
    // bead's slots conjugated by G^(t_power).
    let mut pair_order: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, s) in bw.word.iter().enumerate() {
        pair_order.entry(s.crossing).or_default().push(i);
    }
    let mut tensors: BTreeMap<usize, Tensor4> = BTreeMap::new();
    for (&crossing, ix) in &pair_order {
        if ix.len() != 2 {
            return Err(BeadsError::BrokenPairing(crossing));
        }
        let negative = bw.word[ix[0]].negative;
        let mut t = if negative { dm.s_up.clone() } else { dm.r_up.clone() };
        for &i in ix {
            let s = &bw.word[i];
            if s.t_power != 0 {
                let gp = mat_pow(&g, s.t_power, &g_inv);
                let gp_inv = mat_pow(&g, -s.t_power, &g_inv);
                let (in_slot, out_slot) = pass_slots(s);
                t = conj_slot(&t, out_slot, &gp, true, n);
                t = conj_slot(&t, in_slot, &gp_inv, false, n);
            }
        }
        tensors.insert(crossing, t);
    }

    // Sparse chain contraction: states are (start index, current index,
    // pending first-bead slot values per open crossing).
    type Pending = Vec<(usize, (usize, usize))>;
    let mut states: BTreeMap<(usize, usize, Pending), LaurentPoly> = BTreeMap::new();
    for s0 in 0..n {
        for c in 0..n {
            let w = g_n[s0][c].clone();
            if !w.is_zero() {
                *states.entry((s0, c, Vec::new())).or_insert_with(LaurentPoly::zero) += &w;
            }
        }
    }
    for (i, sig) in bw.word.iter().enumerate() {
        let first = pair_order[&sig.crossing][0] == i;
        let mut next: BTreeMap<(usize, usize, Pending), LaurentPoly> = BTreeMap::new();
        for ((s0, cur, pending), w) in &states {
            if first {
                for out in 0..n {
                    let mut p = pending.clone();
                    p.push((sig.crossing, (*cur, out)));
                    p.sort();
                    *next.entry((*s0, out, p)).or_insert_with(LaurentPoly::zero) += w;
                }
            } else {
                let pos = pending
                    .iter()
                    .position(|(k, _)| *k == sig.crossing)
                    .expect("first bead recorded");
                let (_, first_io) = pending[pos];
                let t = &tensors[&sig.crossing];
                let first_sig = &bw.word[pair_order[&sig.crossing][0]];
                for out in 0..n {
                    let entry = pair_entry(t, first_sig, first_io, sig, (*cur, out));
                    if entry.is_zero() {
                        continue;
                    }
                    let mut p = pending.clone();
                    p.remove(pos);
                    *next.entry((*s0, out, p)).or_insert_with(LaurentPoly::zero) +=
                        &(w * &entry);
                }
            }
        }
        states = next;
    }
    let mut total = LaurentPoly::zero();
    for ((s0, cur, pending), w) in &states {
        debug_assert!(pending.is_empty());
        if s0 == cur {
            total += w;
        }
    }
    Ok(total)
}

/// Which tensor slots a bead's pass enters and leaves once its crossing is
/// rotated upright: slots are numbered 0..4 as (top-left, top-right,
/// bottom-left, bottom-right).  The over pass of a positive crossing runs
/// bottom-left to top-right, the under pass bottom-right to top-left; for
/// the inverse tensor the diagonals swap.  Rotating upright absorbs the
/// physical flow direction into the conjugation adjustments, so the slots
/// do not depend on it.
fn pass_slots(s: &Signifier) -> (usize, usize) {
    if s.primed == s.negative {
        (2, 1)
    } else {
        (3, 0)
    }
}

/// Look up the pair tensor entry for the two passes' (in, out) values.
fn pair_entry(
    t: &Tensor4,
    first: &Signifier,
    first_io: (usize, usize),
    second: &Signifier,
    second_io: (usize, usize),
) -> LaurentPoly {
    let mut slots = [0usize; 4];
    let (i1, o1) = pass_slots(first);
    let (i2, o2) = pass_slots(second);
    slots[i1] = first_io.0;
    slots[o1] = first_io.1;
    slots[i2] = second_io.0;
    slots[o2] = second_io.1;
    t.get(slots[0], slots[1], slots[2], slots[3]).clone()
}

/// Conjugate one slot of a tensor by a matrix: out slots multiply on the
/// matrix's rows, in slots on its columns.
fn conj_slot(t: &Tensor4, slot: usize, m: &crate::oqa::Matrix, is_out: bool, n: usize) -> Tensor4 {
    let mut out = Tensor4::zero(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut acc = LaurentPoly::zero();
                    for k in 0..n {
                        let mut idx = [a, b, c, d];
                        let fixed = idx[slot];
                        idx[slot] = k;
                        let v = t.get(idx[0], idx[1], idx[2], idx[3]);
                        if v.is_zero() {
                            continue;
                        }
                        let f = if is_out { &m[fixed][k] } else { &m[k][fixed] };
                        if !f.is_zero() {
                            acc += &(v * f);
                        }
                    }
                    out.set(a, b, c, d, acc);
                }
            }
        }
    }
    out
}

/// Decorate, slide, and evaluate in one step.
pub fn invariant(d: &MorseDiagram, oqa: &MatrixOQA) -> Result<LaurentPoly, BeadsError> {
    evaluate_word(&slide_to_top(&decorate(d)?)?, oqa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{braid_closure, parse_morse, random_knot};
    use crate::evaluator::{closure_value, evaluate};
    use crate::homfly::build_homfly;

    fn one_one_trefoil() -> MorseDiagram {
        parse_morse(
            "in: +\nslice: id u<\nslice: x/ id\nslice: x/ id\nslice: x/ id\nslice: id n\n",
        )
        .unwrap()
    }

    #[test]
    fn identity_tangle_is_empty_word() {
        let d = MorseDiagram::identity(vec![Sign::Up]);
        let bw = slide_to_top(&decorate(&d).unwrap()).unwrap();
        assert_eq!(bw.curl_count, 1); // the closure arc itself is one curl
        assert!(bw.word.is_empty());
        let oqa = build_homfly(2);
        assert_eq!(
            evaluate_word(&bw, &oqa).unwrap(),
            closure_value(&oqa, &d).unwrap()
        );
    }

    #[test]
    fn trefoil_normal_form_structure() {
        let bw = slide_to_top(&decorate(&one_one_trefoil()).unwrap()).unwrap();
        assert_eq!(bw.curl_count, -1);
        assert_eq!(bw.word.len(), 6);
        // Crossing visit order 1,2,3,1,2,3 with alternating primes and
        // t-powers 1,1,1,0,0,0.
        let pattern: Vec<(usize, bool, i64)> =
            bw.word.iter().map(|s| (s.crossing, s.primed, s.t_power)).collect();
        assert_eq!(
            pattern,
            vec![
                (0, false, 1),
                (1, true, 1),
                (2, false, 1),
                (0, true, 0),
                (1, false, 0),
                (2, true, 0)
            ]
        );
        assert_eq!(render_word(&bw), "G^-1 (t e1)(t e2')(t e3) (e1')(e2)(e3')".replace(") (", ")("));
    }

    #[test]
    fn trefoil_word_evaluates_to_invariant() {
        let d = one_one_trefoil();
        let bw = slide_to_top(&decorate(&d).unwrap()).unwrap();
        for n in [2, 3] {
            let oqa = build_homfly(n);
            assert_eq!(
                evaluate_word(&bw, &oqa).unwrap(),
                closure_value(&oqa, &d).unwrap()
            );
        }
    }

    #[test]
    fn closed_knots_match_evaluator() {
        let oqa = build_homfly(2);
        let trefoil = braid_closure(2, &[(0, OverDir::SwNe); 3]);
        let left = braid_closure(2, &[(0, OverDir::SeNw); 3]);
        for d in [&trefoil, &left] {
            let bw = slide_to_top(&decorate(d).unwrap()).unwrap();
            assert_eq!(
                evaluate_word(&bw, &oqa).unwrap(),
                evaluate(&oqa, d).unwrap().scalar(),
                "mismatch on\n{d:?}"
            );
        }
        assert_eq!(
            slide_to_top(&decorate(&trefoil).unwrap()).unwrap().curl_count,
            -1
        );
    }

    #[test]
    fn path_independence_on_random_knots() {
        let oqa = build_homfly(2);
        for seed in 0..15u64 {
            let d = random_knot(seed, 5);
            let bw = slide_to_top(&decorate(&d).unwrap()).unwrap();
            assert_eq!(
                evaluate_word(&bw, &oqa).unwrap(),
                evaluate(&oqa, &d).unwrap().scalar(),
                "mismatch on\n{d:?}"
            );
            let rev = reverse_word(&bw);
            assert_eq!(rev.curl_count, -bw.curl_count);
            assert_eq!(
                evaluate_word(&rev, &oqa).unwrap(),
                evaluate(&oqa, &d.reverse_orientation()).unwrap().scalar(),
                "reversal mismatch on\n{d:?}"
            );
        }
    }

    #[test]
    fn single_crossing_classes_match_evaluator() {
        let oqa = build_homfly(2);
        let fixtures = [
            ("mixed-+ x/", "in:\nslice: u<\nslice: u< id id\nslice: id x/ id\nslice: id n id\nslice: n\n"),
            ("mixed-+ x\\", "in:\nslice: u<\nslice: u< id id\nslice: id x\\ id\nslice: id n id\nslice: n\n"),
            ("up kink x/", "in: +\nslice: id u<\nslice: x/ id\nslice: id n\n"),
            ("up kink x\\", "in: +\nslice: id u<\nslice: x\\ id\nslice: id n\n"),
            ("up kink left x/", "in: +\nslice: u> id\nslice: id x/\nslice: n id\n"),
            ("up kink left x\\", "in: +\nslice: u> id\nslice: id x\\\nslice: n id\n"),
        ];
        for (name, text) in fixtures {
            let d = parse_morse(text).unwrap();
            for (tag, d) in [("fwd", d.clone()), ("rev", d.reverse_orientation())] {
                let bw = slide_to_top(&decorate(&d).unwrap()).unwrap();
                let expected = if d.is_closed() {
                    evaluate(&oqa, &d).unwrap().scalar()
                } else {
                    closure_value(&oqa, &d).unwrap()
                };
                assert_eq!(
                    evaluate_word(&bw, &oqa).unwrap(),
                    expected,
                    "{name} {tag}: {}",
                    render_word(&bw)
                );
            }
        }
    }

    #[test]
    fn reversal_negates_curls_and_matches_reversed_diagram() {
        let oqa = build_homfly(2);
        let trefoil = braid_closure(2, &[(0, OverDir::SwNe); 3]);
        let bw = slide_to_top(&decorate(&trefoil).unwrap()).unwrap();
        let rev = reverse_word(&bw);
        assert_eq!(rev.curl_count, -bw.curl_count);
        assert_eq!(reverse_word(&rev), bw);
        assert_eq!(
            evaluate_word(&rev, &oqa).unwrap(),
            evaluate(&oqa, &trefoil.reverse_orientation()).unwrap().scalar()
        );
    }
}
