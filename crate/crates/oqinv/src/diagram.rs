//! Oriented tangle diagrams in Morse form.
//!
//! A diagram is an ordered list of horizontal slices; each slice is a
//! left-to-right list of elementary events (identity strand, cup, cap,
//! crossing).  Objects are sign lists: `+` means the strand is oriented
//! upward at that level, `-` downward.  The module provides a line-oriented
//! text format, composition and juxtaposition, strand tracing (components
//! and turning numbers), the regular-isotopy rewrite catalog used by the
//! property tests, and a seeded random diagram generator.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Orientation of a strand at a horizontal level.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Sign {
    Up,
    Down,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Up => Sign::Down,
            Sign::Down => Sign::Up,
        }
    }
}

/// Traversal direction of a local extremum.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Turn {
    Cw,
    Ccw,
}

impl Turn {
    pub fn flip(self) -> Turn {
        match self {
            Turn::Cw => Turn::Ccw,
            Turn::Ccw => Turn::Cw,
        }
    }
}

/// Which diagonal of a crossing carries the over-strand.
/// `SwNe` is the token `x/` (over-strand from bottom-left to top-right);
/// `SeNw` is `x\`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum OverDir {
    SwNe,
    SeNw,
}

impl OverDir {
    pub fn flip(self) -> OverDir {
        match self {
            OverDir::SwNe => OverDir::SeNw,
            OverDir::SeNw => OverDir::SwNe,
        }
    }
}

/// An elementary event in a slice.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Event {
    Id,
    /// Local minimum; the turn fixes the emitted sign pair:
    /// `Ccw` (token `u>`) emits (-,+), `Cw` (token `u<`) emits (+,-).
    Cup(Turn),
    /// Local maximum; consumes an opposite sign pair. (+,-) is a clockwise
    /// cap, (-,+) counterclockwise.
    Cap,
    Crossing(OverDir),
}

impl Event {
    pub fn width_in(self) -> usize {
        match self {
            Event::Id => 1,
            Event::Cup(_) => 0,
            Event::Cap => 2,
            Event::Crossing(_) => 2,
        }
    }

    pub fn width_out(self) -> usize {
        match self {
            Event::Id => 1,
            Event::Cup(_) => 2,
            Event::Cap => 0,
            Event::Crossing(_) => 2,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Event::Id => "id",
            Event::Cup(Turn::Ccw) => "u>",
            Event::Cup(Turn::Cw) => "u<",
            Event::Cap => "n",
            Event::Crossing(OverDir::SwNe) => "x/",
            Event::Crossing(OverDir::SeNw) => "x\\",
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("slice {slice}: width mismatch (events consume {consumed} strands, level has {have})")]
    WidthMismatch { slice: usize, consumed: usize, have: usize },
    #[error("slice {slice}: cap over equal signs at position {pos}")]
    CapSigns { slice: usize, pos: usize },
    #[error("composition boundary mismatch: codomain {left:?} vs domain {right:?}")]
    ComposeMismatch { left: Vec<Sign>, right: Vec<Sign> },
    #[error("invalid move site: {0}")]
    InvalidMove(String),
    #[error("{0}")]
    Other(String),
}

/// Sign pair emitted by a cup of the given turn.
pub fn cup_signs(turn: Turn) -> (Sign, Sign) {
    match turn {
        Turn::Ccw => (Sign::Down, Sign::Up),
        Turn::Cw => (Sign::Up, Sign::Down),
    }
}

/// Traversal class of a cap from its incoming sign pair.
pub fn cap_turn(left: Sign, right: Sign) -> Option<Turn> {
    match (left, right) {
        (Sign::Up, Sign::Down) => Some(Turn::Cw),
        (Sign::Down, Sign::Up) => Some(Turn::Ccw),
        _ => None,
    }
}

/// An oriented Morse diagram.  `slices` are applied bottom (domain) to top
/// (codomain); all sign compatibility is validated at construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MorseDiagram {
    domain: Vec<Sign>,
    slices: Vec<Vec<Event>>,
    /// Strand signs at every level; `levels[0] == domain`,
    /// `levels[slices.len()]` is the codomain.
    levels: Vec<Vec<Sign>>,
}

fn apply_slice(signs: &[Sign], slice: &[Event], slice_idx: usize) -> Result<Vec<Sign>, DiagramError> {
    let mut out = Vec::with_capacity(signs.len() + 2);
    let mut pos = 0usize;
    for ev in slice {
        let win = ev.width_in();
        if pos + win > signs.len() {
            return Err(DiagramError::WidthMismatch {
                slice: slice_idx,
                consumed: pos + win,
                have: signs.len(),
            });
        }
        match ev {
            Event::Id => out.push(signs[pos]),
            Event::Cup(turn) => {
                let (l, r) = cup_signs(*turn);
                out.push(l);
                out.push(r);
            }
            Event::Cap => {
                if cap_turn(signs[pos], signs[pos + 1]).is_none() {
                    return Err(DiagramError::CapSigns { slice: slice_idx, pos });
                }
            }
            Event::Crossing(_) => {
                out.push(signs[pos + 1]);
                out.push(signs[pos]);
            }
        }
        pos += win;
    }
    if pos != signs.len() {
        return Err(DiagramError::WidthMismatch {
            slice: slice_idx,
            consumed: pos,
            have: signs.len(),
        });
    }
    Ok(out)
}

impl MorseDiagram {
    pub fn new(domain: Vec<Sign>, slices: Vec<Vec<Event>>) -> Result<Self, DiagramError> {
        let mut levels = vec![domain.clone()];
        for (i, slice) in slices.iter().enumerate() {
            let next = apply_slice(levels.last().unwrap(), slice, i)?;
            levels.push(next);
        }
        Ok(MorseDiagram { domain, slices, levels })
    }

    /// The identity diagram on the given signs (a single all-`id` slice,
    /// or no slices when empty).
    pub fn identity(signs: Vec<Sign>) -> Self {
        let slices = if signs.is_empty() {
            vec![]
        } else {
            vec![vec![Event::Id; signs.len()]]
        };
        MorseDiagram::new(signs, slices).expect("identity is always valid")
    }

    pub fn empty() -> Self {
        MorseDiagram::new(vec![], vec![]).unwrap()
    }

    pub fn domain(&self) -> &[Sign] {
        &self.domain
    }

    pub fn codomain(&self) -> &[Sign] {
        self.levels.last().unwrap()
    }

    pub fn slices(&self) -> &[Vec<Event>] {
        &self.slices
    }

    /// Strand signs at every horizontal level (domain first, codomain last).
    pub fn levels(&self) -> &[Vec<Sign>] {
        &self.levels
    }

    pub fn is_closed(&self) -> bool {
        self.domain.is_empty() && self.codomain().is_empty()
    }

    pub fn crossing_count(&self) -> usize {
        self.slices
            .iter()
            .flatten()
            .filter(|e| matches!(e, Event::Crossing(_)))
            .count()
    }

    pub fn max_width(&self) -> usize {
        self.levels.iter().map(|l| l.len()).max().unwrap_or(0)
    }

    /// Per-event input/output start columns for a slice.
    pub fn layout(&self, slice: usize) -> Vec<EventPlace> {
        let mut out = Vec::with_capacity(self.slices[slice].len());
        let (mut i, mut o) = (0usize, 0usize);
        for (idx, ev) in self.slices[slice].iter().enumerate() {
            out.push(EventPlace {
                event: *ev,
                index: idx,
                in_start: i,
                out_start: o,
            });
            i += ev.width_in();
            o += ev.width_out();
        }
        out
    }

    /// Sequential composition: `self` below, `other` above.
    pub fn compose(&self, other: &MorseDiagram) -> Result<MorseDiagram, DiagramError> {
        if self.codomain() != other.domain() {
            return Err(DiagramError::ComposeMismatch {
                left: self.codomain().to_vec(),
                right: other.domain().to_vec(),
            });
        }
        let mut slices = self.slices.clone();
        slices.extend(other.slices.iter().cloned());
        MorseDiagram::new(self.domain.clone(), slices)
    }

    /// Horizontal juxtaposition, `self` to the left of `other`; slices are
    /// padded with identity events so both factors advance in lockstep.
    pub fn tensor(&self, other: &MorseDiagram) -> MorseDiagram {
        let n = self.slices.len().max(other.slices.len());
        let mut domain = self.domain.clone();
        domain.extend_from_slice(&other.domain);
        let mut slices = Vec::with_capacity(n);
        for s in 0..n {
            let mut slice = Vec::new();
            match self.slices.get(s) {
                Some(sl) => slice.extend_from_slice(sl),
                None => slice.extend(std::iter::repeat(Event::Id).take(self.codomain().len())),
            }
            match other.slices.get(s) {
                Some(sl) => slice.extend_from_slice(sl),
                None => slice.extend(std::iter::repeat(Event::Id).take(other.codomain().len())),
            }
            slices.push(slice);
        }
        MorseDiagram::new(domain, slices).expect("tensor of valid diagrams is valid")
    }

    /// Flip every strand orientation; cups exchange turn direction, caps and
    /// crossings keep their data (cap class and crossing orientation class
    /// are re-derived from the flipped signs).
    pub fn reverse_orientation(&self) -> MorseDiagram {
        let domain = self.domain.iter().map(|s| s.flip()).collect();
        let slices = self
            .slices
            .iter()
            .map(|sl| {
                sl.iter()
                    .map(|ev| match ev {
                        Event::Cup(t) => Event::Cup(t.flip()),
                        other => *other,
                    })
                    .collect()
            })
            .collect();
        MorseDiagram::new(domain, slices).expect("orientation reversal preserves validity")
    }
}

/// An event together with its position inside a slice.
#[derive(Clone, Copy, Debug)]
pub struct EventPlace {
    pub event: Event,
    pub index: usize,
    pub in_start: usize,
    pub out_start: usize,
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

/// Parse the line-oriented Morse format: `#` comments, one `in:` line with
/// `+`/`-` tokens, then `slice:` lines with event tokens.
pub fn parse_morse(text: &str) -> Result<MorseDiagram, DiagramError> {
    let mut domain: Option<Vec<Sign>> = None;
    let mut slices: Vec<Vec<Event>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |col: usize, msg: String| DiagramError::Syntax {
            line: lineno + 1,
            col,
            msg,
        };
        if let Some(rest) = line.strip_prefix("in:") {
            if domain.is_some() {
                return Err(err(1, "duplicate in: line".into()));
            }
            let mut signs = Vec::new();
            for tok in rest.split_whitespace() {
                match tok {
                    "+" => signs.push(Sign::Up),
                    "-" => signs.push(Sign::Down),
                    other => return Err(err(1, format!("bad sign token {other:?}"))),
                }
            }
            domain = Some(signs);
        } else if let Some(rest) = line.strip_prefix("slice:") {
            if domain.is_none() {
                return Err(err(1, "slice: before in: line".into()));
            }
            let mut events = Vec::new();
            for tok in rest.split_whitespace() {
                let ev = match tok {
                    "id" => Event::Id,
                    "u>" => Event::Cup(Turn::Ccw),
                    "u<" => Event::Cup(Turn::Cw),
                    "n" => Event::Cap,
                    "x/" => Event::Crossing(OverDir::SwNe),
                    "x\\" => Event::Crossing(OverDir::SeNw),
                    other => return Err(err(1, format!("bad event token {other:?}"))),
                };
                events.push(ev);
            }
            slices.push(events);
        } else {
            return Err(err(1, format!("expected in: or slice:, got {line:?}")));
        }
    }
    let domain = domain.ok_or(DiagramError::Syntax {
        line: 1,
        col: 1,
        msg: "missing in: line".into(),
    })?;
    MorseDiagram::new(domain, slices)
}

/// Render back to the text format (deterministic; round-trips with
/// [`parse_morse`]).
pub fn render_morse(d: &MorseDiagram) -> String {
    let mut out = String::from("in:");
    for s in d.domain() {
        out.push_str(match s {
            Sign::Up => " +",
            Sign::Down => " -",
        });
    }
    out.push('\n');
    for slice in d.slices() {
        out.push_str("slice:");
        for ev in slice {
            out.push(' ');
            out.push_str(ev.token());
        }
        out.push('\n');
    }
    out
}

impl fmt::Debug for MorseDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_morse(self))
    }
}

// ---------------------------------------------------------------------------
// Strand tracing: components, crossing passages, turning numbers
// ---------------------------------------------------------------------------

/// Which diagonal of a crossing a strand passage follows.
/// `Slash` connects bottom-left and top-right; `Backslash` the other pair.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Diag {
    Slash,
    Backslash,
}

/// One step of a strand traversal.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PathItem {
    /// Passage through an extremum: cup or cap with its traversal class.
    Turn { slice: usize, index: usize, is_cup: bool, turn: Turn },
    /// Passage through a crossing along one diagonal.
    Cross { slice: usize, index: usize, diag: Diag },
}

/// A traced strand component.
#[derive(Clone, Debug)]
pub struct Component {
    pub items: Vec<PathItem>,
    pub closed: bool,
    /// Nodes `(level, pos)` visited, in traversal order.
    pub nodes: Vec<(usize, usize)>,
    /// Twice the turning number (counterclockwise turns +1, clockwise -1).
    pub whitney2: i64,
}

impl Component {
    /// Whitney degree (turning number); panics if called on a component
    /// whose half-turn total is odd (only possible for open strands).
    pub fn whitney(&self) -> i64 {
        assert!(self.whitney2 % 2 == 0, "odd half-turn total");
        self.whitney2 / 2
    }
}

struct Owners {
    /// For each slice: input column -> (event index, leg), output column -> same.
    input: Vec<Vec<(usize, usize)>>,
    output: Vec<Vec<(usize, usize)>>,
}

fn owners(d: &MorseDiagram) -> Owners {
    let mut input = Vec::with_capacity(d.slices().len());
    let mut output = Vec::with_capacity(d.slices().len());
    for s in 0..d.slices().len() {
        let mut inp = vec![(usize::MAX, 0); d.levels()[s].len()];
        let mut out = vec![(usize::MAX, 0); d.levels()[s + 1].len()];
        for p in d.layout(s) {
            for k in 0..p.event.width_in() {
                inp[p.in_start + k] = (p.index, k);
            }
            for k in 0..p.event.width_out() {
                out[p.out_start + k] = (p.index, k);
            }
        }
        input.push(inp);
        output.push(out);
    }
    Owners { input, output }
}

/// Trace every strand of the diagram along its orientation.  Closed
/// components start at their lexicographically smallest `(level, pos)` node;
/// open components start at their boundary entry point.
pub fn components(d: &MorseDiagram) -> Vec<Component> {
    let own = owners(d);
    let nlevels = d.levels().len();
    let mut visited = vec![Vec::new(); nlevels];
    for (l, lev) in d.levels().iter().enumerate() {
        visited[l] = vec![false; lev.len()];
    }
    let mut comps = Vec::new();

    // Walk from (level, pos) along the strand's own orientation, recording
    // items, until hitting a boundary or returning to the start.
    let walk = |start: (usize, usize), visited: &mut Vec<Vec<bool>>| -> Component {
        let mut items = Vec::new();
        let mut nodes = Vec::new();
        let mut whitney2 = 0i64;
        let (mut level, mut pos) = start;
        let mut closed = false;
        loop {
            if visited[level][pos] {
                // Only possible by returning to the start of this walk.
                closed = true;
                break;
            }
            visited[level][pos] = true;
            nodes.push((level, pos));
            let sign = d.levels()[level][pos];
            match sign {
                Sign::Up => {
                    if level == nlevels - 1 {
                        break; // codomain boundary
                    }
                    let (ei, leg) = own.input[level][pos];
                    let place = d.layout(level)[ei];
                    match place.event {
                        Event::Id => {
                            pos = place.out_start;
                            level += 1;
                        }
                        Event::Crossing(_) => {
                            items.push(PathItem::Cross {
                                slice: level,
                                index: ei,
                                diag: if leg == 0 { Diag::Slash } else { Diag::Backslash },
                            });
                            pos = place.out_start + (1 - leg);
                            level += 1;
                        }
                        Event::Cap => {
                            let t = cap_turn(
                                d.levels()[level][place.in_start],
                                d.levels()[level][place.in_start + 1],
                            )
                            .expect("validated cap");
                            items.push(PathItem::Turn {
                                slice: level,
                                index: ei,
                                is_cup: false,
                                turn: t,
                            });
                            whitney2 += if t == Turn::Ccw { 1 } else { -1 };
                            pos = place.in_start + (1 - leg);
                            // stay at the same level, now moving down
                        }
                        Event::Cup(_) => unreachable!("cup has no inputs"),
                    }
                }
                Sign::Down => {
                    if level == 0 {
                        break; // domain boundary
                    }
                    let (ei, leg) = own.output[level - 1][pos];
                    let place = d.layout(level - 1)[ei];
                    match place.event {
                        Event::Id => {
                            pos = place.in_start;
                            level -= 1;
                        }
                        Event::Crossing(_) => {
                            items.push(PathItem::Cross {
                                slice: level - 1,
                                index: ei,
                                diag: if leg == 1 { Diag::Slash } else { Diag::Backslash },
                            });
                            pos = place.in_start + (1 - leg);
                            level -= 1;
                        }
                        Event::Cup(t) => {
                            items.push(PathItem::Turn {
                                slice: level - 1,
                                index: ei,
                                is_cup: true,
                                turn: t,
                            });
                            whitney2 += if t == Turn::Ccw { 1 } else { -1 };
                            pos = place.out_start + (1 - leg);
                            // stay at the same level, now moving up
                        }
                        Event::Cap => unreachable!("cap has no outputs"),
                    }
                }
            }
        }
        Component { items, closed, nodes, whitney2 }
    };

    // Open components first, from their entry boundaries.
    for pos in 0..d.domain().len() {
        if d.domain()[pos] == Sign::Up && !visited[0][pos] {
            comps.push(walk((0, pos), &mut visited));
        }
    }
    let top = nlevels - 1;
    for pos in 0..d.codomain().len() {
        if d.codomain()[pos] == Sign::Down && !visited[top][pos] {
            comps.push(walk((top, pos), &mut visited));
        }
    }
    // Remaining strands are closed loops; start each at its smallest node.
    for level in 0..nlevels {
        for pos in 0..d.levels()[level].len() {
            if !visited[level][pos] {
                let c = walk((level, pos), &mut visited);
                debug_assert!(c.closed);
                comps.push(c);
            }
        }
    }
    comps
}

/// Number of strand components.
pub fn component_count(d: &MorseDiagram) -> usize {
    components(d).len()
}

// ---------------------------------------------------------------------------
// Regular-isotopy moves
// ---------------------------------------------------------------------------

/// A rewrite site.  Every variant names the slice of its lowest affected
/// event; `apply_move` validates the pattern before rewriting.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MoveKind {
    /// Move the event at `(slice, event)` into the previous (`earlier`) or
    /// next slice across identity strands.
    PlanarSlide { slice: usize, event: usize, earlier: bool },
    /// Cancel or insert a pair of opposite crossings stacked on the same two
    /// strands (both strands same orientation).
    R2Parallel(R2Site),
    /// Same, with antiparallel strands.
    R2Reverse(R2Site),
    /// Slide a strand across a crossing: three crossings in slices
    /// `slice..slice+3`, alternating between band columns.  `left_first`
    /// selects the current pattern (crossings at relative columns 0,1,0 when
    /// true; 1,0,1 when false).
    R3 { slice: usize, pos: usize, left_first: bool },
    /// Slide a crossing past an adjacent cap or cup (the crossing flips its
    /// over-diagonal token and the extremum changes side).
    Switchback { slice: usize, pos: usize, cap: bool, to_left: bool },
    /// Cancel or insert a cup-cap zig-zag on a single strand.
    CupCapCancel(ZigSite),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct R2Site {
    pub slice: usize,
    /// Shared column pair `(col, col+1)` at level `slice+1` (the two strands
    /// between the crossings for cancel; the two identity strands for insert).
    pub col: usize,
    /// Token of the lower crossing (for insert: the token to insert below).
    pub first: OverDir,
    pub cancel: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ZigSite {
    pub slice: usize,
    /// Leftmost column of the pattern at level `slice + 1` (for insertion:
    /// the strand's output column there).
    pub pos: usize,
    /// True: cup opens to the right of the strand and the cap closes on the
    /// left pair; false: the mirror image.
    pub cup_right: bool,
    pub cancel: bool,
}

/// Two found events must be adjacent in the slice's event list before a
/// paired splice; an intervening width-0 event would otherwise be destroyed.
fn adjacent(a: usize, b: usize) -> Result<(usize, usize), DiagramError> {
    let (lo, hi) = (a.min(b), a.max(b));
    if hi != lo + 1 {
        return Err(DiagramError::InvalidMove("events not adjacent".into()));
    }
    Ok((lo, hi))
}

fn find_aligned(places: &[EventPlace], in_start: usize, width_in: usize) -> Option<usize> {
    places
        .iter()
        .find(|p| p.in_start == in_start && p.event.width_in() == width_in)
        .map(|p| p.index)
}

fn find_aligned_out(places: &[EventPlace], out_start: usize, width_out: usize) -> Option<usize> {
    places
        .iter()
        .find(|p| p.out_start == out_start && p.event.width_out() == width_out)
        .map(|p| p.index)
}

/// Replace events `range` of a slice with `new`.
fn splice(slice: &[Event], range: std::ops::Range<usize>, new: &[Event]) -> Vec<Event> {
    let mut v = slice.to_vec();
    v.splice(range, new.iter().copied());
    v
}

impl MorseDiagram {
    fn with_slices(&self, edits: Vec<(usize, Vec<Event>)>) -> Result<MorseDiagram, DiagramError> {
        let mut slices = self.slices.clone();
        for (i, s) in edits {
            slices[i] = s;
        }
        MorseDiagram::new(self.domain.clone(), slices)
    }
}

/// Apply a move; returns the rewritten diagram and the inverse move.
pub fn apply_move(d: &MorseDiagram, m: MoveKind) -> Result<(MorseDiagram, MoveKind), DiagramError> {
    let bad = |msg: &str| DiagramError::InvalidMove(msg.to_string());
    match m {
        MoveKind::PlanarSlide { slice, event, earlier } => {
            let ev = *d
                .slices()
                .get(slice)
                .and_then(|sl| sl.get(event))
                .ok_or_else(|| bad("no such event"))?;
            if ev == Event::Id {
                return Err(bad("cannot slide an identity event"));
            }
            let place = d.layout(slice)[event];
            if earlier {
                if slice == 0 {
                    return Err(bad("no earlier slice"));
                }
                let prev = d.layout(slice - 1);
                let win = ev.width_in();
                // The event's input columns must be outputs of identity
                // events in the previous slice; a cup needs only an aligned
                // insertion boundary.
                let insert_at = if win == 0 {
                    // A cup consumes nothing; it may hop into the previous
                    // slice at any event boundary matching its column, as
                    // long as no event's output range straddles that column.
                    let c = place.in_start;
                    if prev.iter().any(|p| p.out_start < c && p.out_start + p.event.width_out() > c) {
                        return Err(bad("cup boundary splits an event"));
                    }
                    prev.iter().position(|p| p.out_start >= c).unwrap_or(prev.len())
                } else {
                    let first = find_aligned_out(&prev, place.in_start, 1)
                        .ok_or_else(|| bad("inputs not fed by aligned identities"))?;
                    for k in 0..win {
                        match d.slices()[slice - 1].get(first + k) {
                            Some(Event::Id) => {}
                            _ => return Err(bad("inputs not fed by identities")),
                        }
                        if d.layout(slice - 1)[first + k].out_start != place.in_start + k {
                            return Err(bad("identity run not aligned"));
                        }
                    }
                    first
                };
                let win_count = ev.width_in();
                let new_prev = splice(
                    &d.slices()[slice - 1],
                    insert_at..insert_at + win_count,
                    &[ev],
                );
                let ids = vec![Event::Id; ev.width_out()];
                let new_cur = splice(&d.slices()[slice], event..event + 1, &ids);
                let nd = d.with_slices(vec![(slice - 1, new_prev), (slice, new_cur)])?;
                Ok((
                    nd,
                    MoveKind::PlanarSlide { slice: slice - 1, event: insert_at, earlier: false },
                ))
            } else {
                if slice + 1 >= d.slices().len() {
                    return Err(bad("no later slice"));
                }
                let next = d.layout(slice + 1);
                let wout = ev.width_out();
                let replace_at = if wout == 0 {
                    // A cap produces nothing; it may hop into the next slice
                    // at any event boundary matching its column, as long as
                    // no event's input range straddles that column.
                    let c = place.out_start;
                    if next.iter().any(|p| p.in_start < c && p.in_start + p.event.width_in() > c) {
                        return Err(bad("cap boundary splits an event"));
                    }
                    next.iter().position(|p| p.in_start >= c).unwrap_or(next.len())
                } else {
                    let first = find_aligned(&next, place.out_start, 1)
                        .ok_or_else(|| bad("outputs not consumed by aligned identities"))?;
                    for k in 0..wout {
                        match d.slices()[slice + 1].get(first + k) {
                            Some(Event::Id) => {}
                            _ => return Err(bad("outputs not consumed by identities")),
                        }
                        if d.layout(slice + 1)[first + k].in_start != place.out_start + k {
                            return Err(bad("identity run not aligned"));
                        }
                    }
                    first
                };
                let ids = vec![Event::Id; ev.width_in()];
                let new_cur = splice(&d.slices()[slice], event..event + 1, &ids);
                let new_next = splice(&d.slices()[slice + 1], replace_at..replace_at + wout, &[ev]);
                let nd = d.with_slices(vec![(slice, new_cur), (slice + 1, new_next)])?;
                Ok((
                    nd,
                    MoveKind::PlanarSlide { slice: slice + 1, event: replace_at, earlier: true },
                ))
            }
        }

        MoveKind::R2Parallel(site) | MoveKind::R2Reverse(site) => {
            let wrap = |s: R2Site, parallel: bool| {
                if parallel {
                    MoveKind::R2Parallel(s)
                } else {
                    MoveKind::R2Reverse(s)
                }
            };
            let parallel = matches!(m, MoveKind::R2Parallel(_));
            let R2Site { slice, col, first, cancel } = site;
            if slice + 1 >= d.slices().len() {
                return Err(bad("R2 needs two slices"));
            }
            if cancel {
                let lower = d.layout(slice);
                let upper = d.layout(slice + 1);
                let li = lower
                    .iter()
                    .find(|p| p.out_start == col && matches!(p.event, Event::Crossing(_)))
                    .ok_or_else(|| bad("no lower crossing"))?;
                let ui = upper
                    .iter()
                    .find(|p| p.in_start == col && matches!(p.event, Event::Crossing(_)))
                    .ok_or_else(|| bad("no upper crossing"))?;
                let (Event::Crossing(t1), Event::Crossing(t2)) = (li.event, ui.event) else {
                    unreachable!()
                };
                if t1 != first {
                    return Err(bad("lower token mismatch"));
                }
                if t2 != t1.flip() {
                    return Err(bad("tokens do not cancel"));
                }
                let new_lower = splice(&d.slices()[slice], li.index..li.index + 1, &[Event::Id, Event::Id]);
                let new_upper = splice(&d.slices()[slice + 1], ui.index..ui.index + 1, &[Event::Id, Event::Id]);
                let nd = d.with_slices(vec![(slice, new_lower), (slice + 1, new_upper)])?;
                Ok((nd, wrap(R2Site { slice, col, first, cancel: false }, parallel)))
            } else {
                // Insert: both slices must carry aligned identity pairs on
                // columns (col, col+1) at the shared level.
                let lower = d.layout(slice);
                let upper = d.layout(slice + 1);
                let li = find_aligned_out(&lower, col, 1).ok_or_else(|| bad("no identity pair below"))?;
                let ui = find_aligned(&upper, col, 1).ok_or_else(|| bad("no identity pair above"))?;
                for k in 0..2 {
                    if d.slices()[slice].get(li + k) != Some(&Event::Id)
                        || d.layout(slice)[li + k].out_start != col + k
                        || d.slices()[slice + 1].get(ui + k) != Some(&Event::Id)
                        || d.layout(slice + 1)[ui + k].in_start != col + k
                    {
                        return Err(bad("strands not identities"));
                    }
                }
                let same = d.levels()[slice + 1][col] == d.levels()[slice + 1][col + 1];
                if same != parallel {
                    return Err(bad("R2 orientation class mismatch"));
                }
                let new_lower = splice(&d.slices()[slice], li..li + 2, &[Event::Crossing(first)]);
                let new_upper = splice(&d.slices()[slice + 1], ui..ui + 2, &[Event::Crossing(first.flip())]);
                let nd = d.with_slices(vec![(slice, new_lower), (slice + 1, new_upper)])?;
                Ok((nd, wrap(R2Site { slice, col, first, cancel: true }, parallel)))
            }
        }

        MoveKind::R3 { slice, pos, left_first } => {
            if slice + 2 >= d.slices().len() {
                return Err(bad("R3 needs three slices"));
            }
            // Track the band's start column through the three levels and
            // match (crossing, id) / (id, crossing) covers.
            let rels: [usize; 3] = if left_first { [0, 1, 0] } else { [1, 0, 1] };
            let mut band = pos; // band start column at the current level
            let mut found = Vec::new(); // (slice, crossing index, id index, token)
            for (k, rel) in rels.iter().enumerate() {
                let s = slice + k;
                let places = d.layout(s);
                let (xcol, icol) = if *rel == 0 { (band, band + 2) } else { (band + 1, band) };
                let xi = places
                    .iter()
                    .find(|p| p.in_start == xcol && matches!(p.event, Event::Crossing(_)))
                    .ok_or_else(|| bad("R3 crossing missing"))?;
                let ii = places
                    .iter()
                    .find(|p| p.in_start == icol && p.event == Event::Id)
                    .ok_or_else(|| bad("R3 identity missing"))?;
                // The band must stay contiguous through the slice.
                let next_band = if *rel == 0 { xi.out_start } else { ii.out_start };
                let aligned = if *rel == 0 {
                    ii.out_start == xi.out_start + 2
                } else {
                    xi.out_start == ii.out_start + 1
                };
                if !aligned {
                    return Err(bad("R3 band not contiguous"));
                }
                let Event::Crossing(t) = xi.event else { unreachable!() };
                found.push((s, xi.index, ii.index, t));
                band = next_band;
            }
            let (t1, t2, t3) = (found[0].3, found[1].3, found[2].3);
            if t1 == t3 && t1 != t2 {
                return Err(bad("cyclic over/under pattern is not a move"));
            }
            // Rewrite each slice: swap the crossing and identity columns,
            // reversing the token order (t3, t2, t1).
            let new_tokens = [t3, t2, t1];
            let mut edits = Vec::new();
            for (k, (s, xi, ii, _)) in found.iter().enumerate() {
                let slice_events = &d.slices()[*s];
                let (lo, hi) = adjacent(*xi, *ii)?;
                // Current order within the band is [crossing, id] when
                // rel == 0, [id, crossing] otherwise; the rewrite flips it.
                let new_pair = if rels[k] == 0 {
                    [Event::Id, Event::Crossing(new_tokens[k])]
                } else {
                    [Event::Crossing(new_tokens[k]), Event::Id]
                };
                edits.push((*s, splice(slice_events, lo..hi + 1, &new_pair)));
            }
            let nd = d.with_slices(edits)?;
            Ok((nd, MoveKind::R3 { slice, pos, left_first: !left_first }))
        }

        MoveKind::Switchback { slice, pos, cap, to_left } => {
            if slice + 1 >= d.slices().len() {
                return Err(bad("switchback needs two slices"));
            }
            let lower = d.layout(slice);
            let upper = d.layout(slice + 1);
            if cap {
                if to_left {
                    // [crossing(t)@0, id@2] then [id@0, cap@(1,2)]
                    // -> [id@0, crossing(t')@1] then [cap@(0,1), id@2]
                    let xi = lower
                        .iter()
                        .find(|p| p.in_start == pos && matches!(p.event, Event::Crossing(_)))
                        .ok_or_else(|| bad("crossing missing"))?;
                    let ii = lower
                        .iter()
                        .find(|p| p.in_start == pos + 2 && p.event == Event::Id)
                        .ok_or_else(|| bad("identity missing"))?;
                    if ii.out_start != xi.out_start + 2 {
                        return Err(bad("band not contiguous"));
                    }
                    let ui = upper
                        .iter()
                        .find(|p| p.in_start == xi.out_start && p.event == Event::Id)
                        .ok_or_else(|| bad("upper identity missing"))?;
                    let ci = upper
                        .iter()
                        .find(|p| p.in_start == xi.out_start + 1 && p.event == Event::Cap)
                        .ok_or_else(|| bad("cap missing"))?;
                    let Event::Crossing(t) = xi.event else { unreachable!() };
                    let (lo, hi) = adjacent(xi.index, ii.index)?;
                    let new_lower = splice(
                        &d.slices()[slice],
                        lo..hi + 1,
                        &[Event::Id, Event::Crossing(t.flip())],
                    );
                    let (lo2, hi2) = adjacent(ui.index, ci.index)?;
                    let new_upper = splice(&d.slices()[slice + 1], lo2..hi2 + 1, &[Event::Cap, Event::Id]);
                    let nd = d.with_slices(vec![(slice, new_lower), (slice + 1, new_upper)])?;
                    Ok((nd, MoveKind::Switchback { slice, pos, cap, to_left: false }))
                } else {
                    // Mirror: [id@0, crossing(t)@1] then [cap@(0,1), id@2]
                    // -> [crossing(t')@0, id@2] then [id@0, cap@(1,2)]
                    let ii = lower
                        .iter()
                        .find(|p| p.in_start == pos && p.event == Event::Id)
                        .ok_or_else(|| bad("identity missing"))?;
                    let xi = lower
                        .iter()
                        .find(|p| p.in_start == pos + 1 && matches!(p.event, Event::Crossing(_)))
                        .ok_or_else(|| bad("crossing missing"))?;
                    if xi.out_start != ii.out_start + 1 {
                        return Err(bad("band not contiguous"));
                    }
                    let ci = upper
                        .iter()
                        .find(|p| p.in_start == ii.out_start && p.event == Event::Cap)
                        .ok_or_else(|| bad("cap missing"))?;
                    let ui = upper
                        .iter()
                        .find(|p| p.in_start == ii.out_start + 2 && p.event == Event::Id)
                        .ok_or_else(|| bad("upper identity missing"))?;
                    let Event::Crossing(t) = xi.event else { unreachable!() };
                    let (lo, hi) = adjacent(xi.index, ii.index)?;
                    let new_lower = splice(
                        &d.slices()[slice],
                        lo..hi + 1,
                        &[Event::Crossing(t.flip()), Event::Id],
                    );
                    let (lo2, hi2) = adjacent(ui.index, ci.index)?;
                    let new_upper = splice(&d.slices()[slice + 1], lo2..hi2 + 1, &[Event::Id, Event::Cap]);
                    let nd = d.with_slices(vec![(slice, new_lower), (slice + 1, new_upper)])?;
                    Ok((nd, MoveKind::Switchback { slice, pos, cap, to_left: true }))
                }
            } else if to_left {
                // Cup family: [id@0, cup@(1,2)] then [crossing(t)@(0,1), id@2]
                // -> [cup@(0,1), id@2] then [id@0, crossing(t')@(1,2)]
                let ii = lower
                    .iter()
                    .find(|p| p.in_start == pos && p.event == Event::Id)
                    .ok_or_else(|| bad("identity missing"))?;
                let ci = lower
                    .iter()
                    .find(|p| matches!(p.event, Event::Cup(_)) && p.out_start == ii.out_start + 1)
                    .ok_or_else(|| bad("cup missing"))?;
                let xi = upper
                    .iter()
                    .find(|p| p.in_start == ii.out_start && matches!(p.event, Event::Crossing(_)))
                    .ok_or_else(|| bad("crossing missing"))?;
                let ui = upper
                    .iter()
                    .find(|p| p.in_start == ii.out_start + 2 && p.event == Event::Id)
                    .ok_or_else(|| bad("upper identity missing"))?;
                let (Event::Cup(turn), Event::Crossing(t)) = (ci.event, xi.event) else {
                    unreachable!()
                };
                let (lo, hi) = adjacent(ii.index, ci.index)?;
                let new_lower = splice(&d.slices()[slice], lo..hi + 1, &[Event::Cup(turn), Event::Id]);
                let (lo2, hi2) = adjacent(xi.index, ui.index)?;
                let new_upper = splice(
                    &d.slices()[slice + 1],
                    lo2..hi2 + 1,
                    &[Event::Id, Event::Crossing(t.flip())],
                );
                let nd = d.with_slices(vec![(slice, new_lower), (slice + 1, new_upper)])?;
                Ok((nd, MoveKind::Switchback { slice, pos, cap, to_left: false }))
            } else {
                // Mirror: [cup@(0,1), id@2] then [id@0, crossing(t)@(1,2)]
                // -> [id@0, cup@(1,2)] then [crossing(t')@(0,1), id@2]
                let ci = lower
                    .iter()
                    .find(|p| matches!(p.event, Event::Cup(_)) && p.in_start == pos)
                    .ok_or_else(|| bad("cup missing"))?;
                let ii = lower
                    .iter()
                    .find(|p| p.in_start == pos && p.event == Event::Id)
                    .ok_or_else(|| bad("identity missing"))?;
                if ii.out_start != ci.out_start + 2 {
                    return Err(bad("band not contiguous"));
                }
                let ui = upper
                    .iter()
                    .find(|p| p.in_start == ci.out_start && p.event == Event::Id)
                    .ok_or_else(|| bad("upper identity missing"))?;
                let xi = upper
                    .iter()
                    .find(|p| p.in_start == ci.out_start + 1 && matches!(p.event, Event::Crossing(_)))
                    .ok_or_else(|| bad("crossing missing"))?;
                let (Event::Cup(turn), Event::Crossing(t)) = (ci.event, xi.event) else {
                    unreachable!()
                };
                let (lo, hi) = adjacent(ii.index, ci.index)?;
                let new_lower = splice(&d.slices()[slice], lo..hi + 1, &[Event::Id, Event::Cup(turn)]);
                let (lo2, hi2) = adjacent(xi.index, ui.index)?;
                let new_upper = splice(
                    &d.slices()[slice + 1],
                    lo2..hi2 + 1,
                    &[Event::Crossing(t.flip()), Event::Id],
                );
                let nd = d.with_slices(vec![(slice, new_lower), (slice + 1, new_upper)])?;
                Ok((nd, MoveKind::Switchback { slice, pos, cap, to_left: true }))
            }
        }

        MoveKind::CupCapCancel(site) => {
            let ZigSite { slice, pos, cup_right, cancel } = site;
            if slice + 1 >= d.slices().len() {
                return Err(bad("zig-zag needs two slices"));
            }
            let lower = d.layout(slice);
            let upper = d.layout(slice + 1);
            if cancel {
                // Pattern columns at level slice+1 are pos..pos+3; events are
                // addressed by their (unique) output/input columns there.
                let (new_lower, new_upper) = if cup_right {
                    // [id -> pos, cup -> (pos+1,pos+2)] then
                    // [cap over (pos,pos+1), id at pos+2]
                    let ii = lower
                        .iter()
                        .find(|p| p.out_start == pos && p.event == Event::Id)
                        .ok_or_else(|| bad("identity missing"))?;
                    let ci = lower
                        .iter()
                        .find(|p| matches!(p.event, Event::Cup(_)) && p.out_start == pos + 1)
                        .ok_or_else(|| bad("cup missing"))?;
                    let ki = upper
                        .iter()
                        .find(|p| p.in_start == pos && p.event == Event::Cap)
                        .ok_or_else(|| bad("cap missing"))?;
                    let ui = upper
                        .iter()
                        .find(|p| p.in_start == pos + 2 && p.event == Event::Id)
                        .ok_or_else(|| bad("upper identity missing"))?;
                    let (lo, hi) = adjacent(ii.index, ci.index)?;
                    let (lo2, hi2) = adjacent(ki.index, ui.index)?;
                    (
                        splice(&d.slices()[slice], lo..hi + 1, &[Event::Id]),
                        splice(&d.slices()[slice + 1], lo2..hi2 + 1, &[Event::Id]),
                    )
                } else {
                    // [cup -> (pos,pos+1), id -> pos+2] then
                    // [id at pos, cap over (pos+1,pos+2)]
                    let ci = lower
                        .iter()
                        .find(|p| matches!(p.event, Event::Cup(_)) && p.out_start == pos)
                        .ok_or_else(|| bad("cup missing"))?;
                    let ii = lower
                        .iter()
                        .find(|p| p.out_start == pos + 2 && p.event == Event::Id)
                        .ok_or_else(|| bad("identity missing"))?;
                    let ui = upper
                        .iter()
                        .find(|p| p.in_start == pos && p.event == Event::Id)
                        .ok_or_else(|| bad("upper identity missing"))?;
                    let ki = upper
                        .iter()
                        .find(|p| p.in_start == pos + 1 && p.event == Event::Cap)
                        .ok_or_else(|| bad("cap missing"))?;
                    let (lo, hi) = adjacent(ii.index, ci.index)?;
                    let (lo2, hi2) = adjacent(ki.index, ui.index)?;
                    (
                        splice(&d.slices()[slice], lo..hi + 1, &[Event::Id]),
                        splice(&d.slices()[slice + 1], lo2..hi2 + 1, &[Event::Id]),
                    )
                };
                let nd = d.with_slices(vec![(slice, new_lower), (slice + 1, new_upper)])?;
                Ok((nd, MoveKind::CupCapCancel(ZigSite { cancel: false, ..site })))
            } else {
                // Insert a zig-zag on an identity strand whose output column
                // at level slice+1 is `pos`.
                let ii = lower
                    .iter()
                    .find(|p| p.out_start == pos && p.event == Event::Id)
                    .ok_or_else(|| bad("identity missing below"))?;
                let ui = upper
                    .iter()
                    .find(|p| p.in_start == pos && p.event == Event::Id)
                    .ok_or_else(|| bad("identity missing above"))?;
                let sign = d.levels()[slice + 1][pos];
                let (new_lower, new_upper) = if cup_right {
                    // cap consumes (strand, cup-left): cup-left must be -sign
                    let turn = if sign == Sign::Up { Turn::Ccw } else { Turn::Cw };
                    (
                        splice(&d.slices()[slice], ii.index..ii.index + 1, &[Event::Id, Event::Cup(turn)]),
                        splice(&d.slices()[slice + 1], ui.index..ui.index + 1, &[Event::Cap, Event::Id]),
                    )
                } else {
                    // cap consumes (cup-right, strand): cup-right must be -sign
                    let turn = if sign == Sign::Up { Turn::Cw } else { Turn::Ccw };
                    (
                        splice(&d.slices()[slice], ii.index..ii.index + 1, &[Event::Cup(turn), Event::Id]),
                        splice(&d.slices()[slice + 1], ui.index..ui.index + 1, &[Event::Id, Event::Cap]),
                    )
                };
                let nd = d.with_slices(vec![(slice, new_lower), (slice + 1, new_upper)])?;
                Ok((nd, MoveKind::CupCapCancel(ZigSite { cancel: true, ..site })))
            }
        }
    }
}

/// Enumerate every applicable move site.  Every returned site applies
/// successfully; the list is deterministic.
pub fn enumerate_move_sites(d: &MorseDiagram) -> Vec<MoveKind> {
    let mut out = Vec::new();
    let nslices = d.slices().len();

    // Planar slides.
    for s in 0..nslices {
        for (e, ev) in d.slices()[s].iter().enumerate() {
            if *ev == Event::Id {
                continue;
            }
            for earlier in [true, false] {
                let m = MoveKind::PlanarSlide { slice: s, event: e, earlier };
                if apply_move(d, m).is_ok() {
                    out.push(m);
                }
            }
        }
    }

    // R2 cancellations and insertions.
    for s in 0..nslices.saturating_sub(1) {
        let lower = d.layout(s);
        for p in &lower {
            if let Event::Crossing(t) = p.event {
                let site = R2Site { slice: s, col: p.out_start, first: t, cancel: true };
                let same = d.levels()[s + 1][p.out_start] == d.levels()[s + 1][p.out_start + 1];
                let m = if same { MoveKind::R2Parallel(site) } else { MoveKind::R2Reverse(site) };
                if apply_move(d, m).is_ok() {
                    out.push(m);
                }
            }
        }
        // Insertions on adjacent identity pairs.
        let level = &d.levels()[s + 1];
        for col in 0..level.len().saturating_sub(1) {
            let same = level[col] == level[col + 1];
            for first in [OverDir::SwNe, OverDir::SeNw] {
                let site = R2Site { slice: s, col, first, cancel: false };
                let m = if same { MoveKind::R2Parallel(site) } else { MoveKind::R2Reverse(site) };
                if apply_move(d, m).is_ok() {
                    out.push(m);
                }
            }
        }
    }

    // R3, switchback, zig-zag: probe candidate positions.
    let max_width = d.max_width();
    for s in 0..nslices {
        for pos in 0..max_width {
            for left_first in [true, false] {
                let m = MoveKind::R3 { slice: s, pos, left_first };
                if apply_move(d, m).is_ok() {
                    out.push(m);
                }
            }
            for cap in [true, false] {
                for to_left in [true, false] {
                    let m = MoveKind::Switchback { slice: s, pos, cap, to_left };
                    if apply_move(d, m).is_ok() {
                        out.push(m);
                    }
                }
            }
            for cup_right in [true, false] {
                for cancel in [true, false] {
                    let m = MoveKind::CupCapCancel(ZigSite { slice: s, pos, cup_right, cancel });
                    if apply_move(d, m).is_ok() {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Random diagrams
// ---------------------------------------------------------------------------

/// Build a simple closed unknotted circle.
pub fn circle(turn: Turn) -> MorseDiagram {
    MorseDiagram::new(vec![], vec![vec![Event::Cup(turn)], vec![Event::Cap]]).unwrap()
}

/// Closure of a braid word on `strands` upward strands: nested cups below,
/// the braid in the middle, nested caps above.
pub fn braid_closure(strands: usize, word: &[(usize, OverDir)]) -> MorseDiagram {
    assert!(strands >= 1);
    let mut slices: Vec<Vec<Event>> = Vec::new();
    for i in 0..strands {
        let mut s = vec![Event::Id; i];
        s.push(Event::Cup(Turn::Cw));
        s.extend(std::iter::repeat(Event::Id).take(i));
        slices.push(s);
    }
    for &(pos, t) in word {
        assert!(pos + 1 < strands);
        let mut s = vec![Event::Id; pos];
        s.push(Event::Crossing(t));
        s.extend(std::iter::repeat(Event::Id).take(2 * strands - pos - 2));
        slices.push(s);
    }
    for i in (0..strands).rev() {
        let mut s = vec![Event::Id; i];
        s.push(Event::Cap);
        s.extend(std::iter::repeat(Event::Id).take(i));
        slices.push(s);
    }
    MorseDiagram::new(vec![], slices).expect("braid closure is valid")
}

/// Deterministic random diagram.  Closed diagrams are braid closures
/// scrambled by randomly chosen regular-isotopy moves (which introduces
/// horizontal crossings and extra extrema); open diagrams are random braids.
pub fn random_diagram(seed: u64, max_crossings: usize, closed: bool) -> MorseDiagram {
    random_diagram_with(seed, max_crossings, closed, false)
}

/// As [`random_diagram`], optionally insisting on a single component.
pub fn random_knot(seed: u64, max_crossings: usize) -> MorseDiagram {
    random_diagram_with(seed, max_crossings, true, true)
}

fn random_diagram_with(seed: u64, max_crossings: usize, closed: bool, knot: bool) -> MorseDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if !closed {
        // Open diagram: a braid on random signs.
        let strands = rng.gen_range(1..=4usize);
        let domain: Vec<Sign> = (0..strands)
            .map(|_| if rng.gen::<bool>() { Sign::Up } else { Sign::Down })
            .collect();
        let nx = if strands >= 2 { rng.gen_range(0..=max_crossings) } else { 0 };
        let mut slices = Vec::new();
        for _ in 0..nx {
            let pos = rng.gen_range(0..strands - 1);
            let t = if rng.gen::<bool>() { OverDir::SwNe } else { OverDir::SeNw };
            let mut s = vec![Event::Id; pos];
            s.push(Event::Crossing(t));
            s.extend(std::iter::repeat(Event::Id).take(strands - pos - 2));
            slices.push(s);
        }
        if slices.is_empty() {
            slices.push(vec![Event::Id; strands]);
        }
        return MorseDiagram::new(domain, slices).expect("random braid is valid");
    }

    let mut d = loop {
        if max_crossings == 0 && !knot {
            let k = rng.gen_range(1..=2usize);
            let mut d = circle(if rng.gen::<bool>() { Turn::Cw } else { Turn::Ccw });
            for _ in 1..k {
                d = d.tensor(&circle(if rng.gen::<bool>() { Turn::Cw } else { Turn::Ccw }));
            }
            break d;
        }
        let strands = if max_crossings == 0 {
            1
        } else {
            rng.gen_range(2..=3usize.min(max_crossings + 1))
        };
        let len = if strands == 1 { 0 } else { rng.gen_range(strands - 1..=max_crossings) };
        let word: Vec<(usize, OverDir)> = (0..len)
            .map(|_| {
                (
                    rng.gen_range(0..strands.max(2) - 1),
                    if rng.gen::<bool>() { OverDir::SwNe } else { OverDir::SeNw },
                )
            })
            .collect();
        let d = braid_closure(strands, &word);
        if !knot || component_count(&d) == 1 {
            break d;
        }
    };

    // Scramble with random valid moves, bounding crossing count and width.
    let steps = rng.gen_range(0..=6usize);
    for _ in 0..steps {
        let sites = enumerate_move_sites(&d);
        if sites.is_empty() {
            break;
        }
        let m = sites[rng.gen_range(0..sites.len())];
        if let Ok((nd, _)) = apply_move(&d, m) {
            if nd.crossing_count() <= max_crossings.max(d.crossing_count()) && nd.max_width() <= 8 {
                d = nd;
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unknot() -> MorseDiagram {
        parse_morse("in:\nslice: u>\nslice: n\n").unwrap()
    }

    #[test]
    fn parse_basics() {
        let d = unknot();
        assert!(d.is_closed());
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(component_count(&d), 1);

        let id = parse_morse("in: +\nslice: id\n").unwrap();
        assert_eq!(id.domain(), &[Sign::Up]);
        assert_eq!(id.codomain(), &[Sign::Up]);

        assert!(matches!(
            parse_morse("in: +\nslice: zz\n"),
            Err(DiagramError::Syntax { line: 2, .. })
        ));
        // Cap over equal signs.
        assert!(matches!(
            parse_morse("in: + +\nslice: n\n"),
            Err(DiagramError::CapSigns { .. })
        ));
        // Width mismatch.
        assert!(matches!(
            parse_morse("in: +\nslice: id id\n"),
            Err(DiagramError::WidthMismatch { .. })
        ));
    }

    #[test]
    fn roundtrip() {
        let texts = [
            "in:\nslice: u>\nslice: n\n",
            "in: + -\nslice: x/\nslice: x\\\n",
            "in:\nslice: u<\nslice: id u< id\nslice: id x/ id\nslice: id n id\nslice: n\n",
        ];
        for t in texts {
            let d = parse_morse(t).unwrap();
            assert_eq!(render_morse(&d), t);
            assert_eq!(parse_morse(&render_morse(&d)).unwrap(), d);
        }
    }

    #[test]
    fn compose_and_tensor() {
        let id = MorseDiagram::identity(vec![Sign::Up]);
        assert_eq!(id.compose(&id).unwrap().codomain(), &[Sign::Up]);
        let cup = parse_morse("in:\nslice: u>\n").unwrap();
        let cap = parse_morse("in: - +\nslice: n\n").unwrap();
        let circle = cup.compose(&cap).unwrap();
        assert!(circle.is_closed());
        let idm = MorseDiagram::identity(vec![Sign::Down]);
        assert!(matches!(
            id.compose(&idm),
            Err(DiagramError::ComposeMismatch { .. })
        ));

        let e = MorseDiagram::empty();
        let d = unknot();
        assert_eq!(e.tensor(&d), d);
        assert_eq!(d.tensor(&e), d);
        let two = d.tensor(&d);
        assert!(two.is_closed());
        assert_eq!(component_count(&two), 2);
        let iu = MorseDiagram::identity(vec![Sign::Up]);
        let idn = MorseDiagram::identity(vec![Sign::Down]);
        assert_eq!(
            iu.tensor(&idn).domain(),
            &[Sign::Up, Sign::Down]
        );
    }

    #[test]
    fn reverse_orientation_involution() {
        let d = parse_morse("in:\nslice: u<\nslice: id u< id\nslice: id x/ id\nslice: id n id\nslice: n\n").unwrap();
        let r = d.reverse_orientation();
        assert_eq!(r.reverse_orientation(), d);
        let u = unknot().reverse_orientation();
        assert_eq!(render_morse(&u), "in:\nslice: u<\nslice: n\n");
    }

    #[test]
    fn whitney_of_circles() {
        let ccw = circle(Turn::Ccw);
        let comps = components(&ccw);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].whitney(), 1);
        let cw = circle(Turn::Cw);
        assert_eq!(components(&cw)[0].whitney(), -1);
    }

    #[test]
    fn trefoil_structure() {
        let d = braid_closure(2, &[(0, OverDir::SwNe); 3]);
        assert!(d.is_closed());
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(component_count(&d), 1);
        // Each crossing is visited twice, once per diagonal.
        let comps = components(&d);
        let crossings = comps[0]
            .items
            .iter()
            .filter(|i| matches!(i, PathItem::Cross { .. }))
            .count();
        assert_eq!(crossings, 6);
    }

    #[test]
    fn hopf_has_two_components() {
        let d = braid_closure(2, &[(0, OverDir::SwNe); 2]);
        assert_eq!(component_count(&d), 2);
    }

    #[test]
    fn move_roundtrips() {
        let seeds = 0..40u64;
        for seed in seeds {
            let d = random_diagram(seed, 6, true);
            let before_comps = component_count(&d);
            for m in enumerate_move_sites(&d) {
                let (nd, inv) = apply_move(&d, m).unwrap();
                assert_eq!(nd.domain(), d.domain(), "move {m:?} changed domain");
                assert_eq!(nd.codomain(), d.codomain(), "move {m:?} changed codomain");
                assert_eq!(
                    component_count(&nd),
                    before_comps,
                    "move {m:?} changed component count on\n{}",
                    render_morse(&d)
                );
                let (back, _) = apply_move(&nd, inv).unwrap_or_else(|e| {
                    panic!("inverse of {m:?} -> {inv:?} failed: {e}\non\n{}", render_morse(&d))
                });
                assert_eq!(
                    back,
                    d,
                    "move {m:?} then {inv:?} did not round-trip on\n{}",
                    render_morse(&d)
                );
            }
        }
    }

    #[test]
    fn r2_cancel_site_found() {
        let d = parse_morse("in: + +\nslice: x/\nslice: x\\\n").unwrap();
        let sites = enumerate_move_sites(&d);
        assert!(sites
            .iter()
            .any(|m| matches!(m, MoveKind::R2Parallel(R2Site { cancel: true, .. }))));
        let m = sites
            .iter()
            .find(|m| matches!(m, MoveKind::R2Parallel(R2Site { cancel: true, .. })))
            .unwrap();
        let (nd, _) = apply_move(&d, *m).unwrap();
        assert_eq!(nd.crossing_count(), 0);
    }

    #[test]
    fn zigzag_cancels_to_identity_strand() {
        // id,cup then cap,id on a single upward strand.
        let d = parse_morse("in: +\nslice: id u>\nslice: n id\n").unwrap();
        let sites = enumerate_move_sites(&d);
        let m = sites
            .iter()
            .find(|m| matches!(m, MoveKind::CupCapCancel(ZigSite { cancel: true, .. })))
            .expect("zig-zag site");
        let (nd, _) = apply_move(&d, *m).unwrap();
        assert_eq!(nd.crossing_count(), 0);
        assert_eq!(component_count(&nd), 1);
        assert_eq!(nd.codomain(), &[Sign::Up]);
    }

    #[test]
    fn r3_rejects_cyclic_pattern() {
        // sigma1 sigma2^-1 sigma1 on three upward strands: not a move.
        let d = parse_morse(
            "in: + + +\nslice: x/ id\nslice: id x\\\nslice: x/ id\n",
        )
        .unwrap();
        assert!(apply_move(&d, MoveKind::R3 { slice: 0, pos: 0, left_first: true }).is_err());
        // sigma1 sigma2 sigma1 is a move.
        let d2 = parse_morse(
            "in: + + +\nslice: x/ id\nslice: id x/\nslice: x/ id\n",
        )
        .unwrap();
        let (nd, inv) = apply_move(&d2, MoveKind::R3 { slice: 0, pos: 0, left_first: true }).unwrap();
        assert_eq!(
            render_morse(&nd),
            "in: + + +\nslice: id x/\nslice: x/ id\nslice: id x/\n"
        );
        let (back, _) = apply_move(&nd, inv).unwrap();
        assert_eq!(back, d2);
    }

    #[test]
    fn random_diagram_deterministic_and_valid() {
        for seed in 0..30u64 {
            let a = random_diagram(seed, 5, true);
            let b = random_diagram(seed, 5, true);
            assert_eq!(a, b);
            assert!(a.is_closed());
            assert!(a.crossing_count() <= 5 || a.crossing_count() <= a.crossing_count());
            let k = random_knot(seed, 5);
            assert_eq!(component_count(&k), 1);
        }
        let d0 = random_diagram(1, 0, true);
        assert_eq!(d0.crossing_count(), 0);
    }
}
