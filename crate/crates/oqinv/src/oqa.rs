//! Matrix input data: an invertible solution of the Yang-Baxter equation on
//! a rank-`n` space together with two commuting invertible matrices, plus
//! the axiom checks that qualify the data for invariant computation.
//!
//! All arithmetic is exact over integer Laurent polynomials in `q`.

use crate::laurent::LaurentPoly;
use serde_json::Value;
use std::fmt;
use std::path::Path;

pub type Matrix = Vec<Vec<LaurentPoly>>;

// ---------------------------------------------------------------------------
// Exact matrix helpers
// ---------------------------------------------------------------------------

pub fn mat_zero(rows: usize, cols: usize) -> Matrix {
    vec![vec![LaurentPoly::zero(); cols]; rows]
}

pub fn mat_identity(n: usize) -> Matrix {
    let mut m = mat_zero(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = LaurentPoly::one();
    }
    m
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, k) = (a.len(), b.len());
    let cols = if k == 0 { 0 } else { b[0].len() };
    let mut out = mat_zero(n, cols);
    for i in 0..n {
        for (m, a_im) in a[i].iter().enumerate() {
            if a_im.is_zero() {
                continue;
            }
            for j in 0..cols {
                if !b[m][j].is_zero() {
                    out[i][j] += &(a_im * &b[m][j]);
                }
            }
        }
    }
    out
}

/// First entry where `m` differs from the identity, if any.
pub fn identity_defect(m: &Matrix) -> Option<(usize, usize)> {
    for (i, row) in m.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let ok = if i == j { e.is_one() } else { e.is_zero() };
            if !ok {
                return Some((i, j));
            }
        }
    }
    None
}

/// Determinant by cofactor expansion (matrices here are small).
pub fn det(m: &Matrix) -> LaurentPoly {
    let n = m.len();
    if n == 0 {
        return LaurentPoly::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = LaurentPoly::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let sub: Matrix = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][j] * &det(&sub);
        if j % 2 == 0 {
            acc += &term;
        } else {
            acc += &(-&term);
        }
    }
    acc
}

/// Exact inverse over the Laurent ring: adjugate divided entrywise by the
/// determinant.  Returns `None` when the matrix is not invertible over the
/// ring (zero determinant or non-exact division).
pub fn mat_inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let d = det(m);
    if d.is_zero() {
        return None;
    }
    let mut inv = mat_zero(n, n);
    for i in 0..n {
        for j in 0..n {
            // Cofactor C_{j,i} for the (i,j) entry of the inverse.
            let sub: Matrix = (0..n)
                .filter(|r| *r != j)
                .map(|r| {
                    (0..n)
                        .filter(|c| *c != i)
                        .map(|c| m[r][c].clone())
                        .collect()
                })
                .collect();
            let mut cof = det(&sub);
            if (i + j) % 2 == 1 {
                cof = -cof;
            }
            inv[i][j] = cof.div_exact(&d)?;
        }
    }
    Some(inv)
}

pub fn mat_trace(m: &Matrix) -> LaurentPoly {
    let mut t = LaurentPoly::zero();
    for (i, row) in m.iter().enumerate() {
        t += &row[i];
    }
    t
}

pub fn mat_pow(m: &Matrix, k: i64, inv: &Matrix) -> Matrix {
    let base = if k >= 0 { m } else { inv };
    let mut acc = mat_identity(m.len());
    for _ in 0..k.abs() {
        acc = mat_mul(&acc, base);
    }
    acc
}

// ---------------------------------------------------------------------------
// Fourth-order tensors
// ---------------------------------------------------------------------------

/// A tensor with two output and two input indices, each of range `n`;
/// `get(a, c, b, d)` is the coefficient whose first factor maps basis index
/// `b` to `a` and whose second maps `d` to `c`.  As a matrix it acts from
/// the input pair `(b, d)` to the output pair `(a, c)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<LaurentPoly>,
}

impl Tensor4 {
    pub fn zero(n: usize) -> Self {
        Tensor4 { n, data: vec![LaurentPoly::zero(); n * n * n * n] }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    fn idx(&self, a: usize, c: usize, b: usize, d: usize) -> usize {
        ((a * self.n + c) * self.n + b) * self.n + d
    }

    pub fn get(&self, a: usize, c: usize, b: usize, d: usize) -> &LaurentPoly {
        &self.data[self.idx(a, c, b, d)]
    }

    pub fn set(&mut self, a: usize, c: usize, b: usize, d: usize, v: LaurentPoly) {
        let i = self.idx(a, c, b, d);
        self.data[i] = v;
    }

    /// View as an `n^2 x n^2` matrix, rows = output pairs `(a, c)` flattened
    /// as `a*n + c`, columns = input pairs likewise.
    pub fn to_matrix(&self) -> Matrix {
        let n = self.n;
        let mut m = mat_zero(n * n, n * n);
        for a in 0..n {
            for c in 0..n {
                for b in 0..n {
                    for d in 0..n {
                        m[a * n + c][b * n + d] = self.get(a, c, b, d).clone();
                    }
                }
            }
        }
        m
    }

    pub fn from_matrix(n: usize, m: &Matrix) -> Self {
        let mut t = Tensor4::zero(n);
        for a in 0..n {
            for c in 0..n {
                for b in 0..n {
                    for d in 0..n {
                        t.set(a, c, b, d, m[a * n + c][b * n + d].clone());
                    }
                }
            }
        }
        t
    }
}

impl fmt::Debug for Tensor4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n;
        for a in 0..n {
            for c in 0..n {
                for b in 0..n {
                    for d in 0..n {
                        let v = self.get(a, c, b, d);
                        if !v.is_zero() {
                            writeln!(f, "({a},{c})<-({b},{d}): {v}")?;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// The algebra data
// ---------------------------------------------------------------------------

#[derive(Debug, thiserror::Error)]
pub enum OqaError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(String),
    #[error("matrix {0} is not invertible over the Laurent ring")]
    NotInvertible(&'static str),
    #[error("axiom check failed: {0}")]
    CheckFailed(String),
}

/// Yang-Baxter data: the braiding tensor, its inverse, and the two
/// commuting background matrices with their precomputed inverses.
#[derive(Clone)]
pub struct MatrixOQA {
    pub rank: usize,
    pub rho: Tensor4,
    pub rho_inv: Tensor4,
    pub m_up: Matrix,
    pub m_down: Matrix,
    pub m_up_inv: Matrix,
    pub m_down_inv: Matrix,
}

impl MatrixOQA {
    pub fn new(
        rank: usize,
        rho: Tensor4,
        rho_inv: Tensor4,
        m_up: Matrix,
        m_down: Matrix,
    ) -> Result<Self, OqaError> {
        let m_up_inv = mat_inverse(&m_up).ok_or(OqaError::NotInvertible("m_up"))?;
        let m_down_inv = mat_inverse(&m_down).ok_or(OqaError::NotInvertible("m_down"))?;
        Ok(MatrixOQA { rank, rho, rho_inv, m_up, m_down, m_up_inv, m_down_inv })
    }

    /// Push the whole lower matrix into the upper one; the invariant is
    /// unchanged because only the product and its trace pairing enter the
    /// evaluation.
    pub fn standardize(&self) -> MatrixOQA {
        let g = mat_mul(&self.m_up, &self.m_down);
        MatrixOQA::new(
            self.rank,
            self.rho.clone(),
            self.rho_inv.clone(),
            g,
            mat_identity(self.rank),
        )
        .expect("product of invertible matrices is invertible")
    }
}

/// Build the standard-form data from a braiding pair and a single twist
/// matrix, and report the axiom checks.
pub fn standard_from_twist(
    rho: Tensor4,
    rho_inv: Tensor4,
    g: Matrix,
) -> Result<(MatrixOQA, CheckReport), OqaError> {
    let rank = rho.rank();
    let oqa = MatrixOQA::new(rank, rho, rho_inv, g, mat_identity(rank))?;
    let report = check_all(&oqa);
    Ok((oqa, report))
}

// ---------------------------------------------------------------------------
// Axiom checks
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct CheckItem {
    pub name: &'static str,
    pub pass: bool,
    /// First failing entry, lexicographically smallest index first.
    pub witness: Option<String>,
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub items: Vec<CheckItem>,
}

impl CheckReport {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    pub fn first_failure(&self) -> Option<&CheckItem> {
        self.items.iter().find(|i| !i.pass)
    }
}

fn item_from_defect(name: &'static str, defect: Option<String>) -> CheckItem {
    CheckItem { name, pass: defect.is_none(), witness: defect }
}

fn identity_witness(m: &Matrix, label: &str) -> Option<String> {
    identity_defect(m).map(|(i, j)| {
        format!("{label}[{i}][{j}] = {} (expected {})", m[i][j], usize::from(i == j))
    })
}

/// Both products of the braiding tensor with its claimed inverse must be the
/// identity on the two-fold space.
pub fn check_inverse_pair(oqa: &MatrixOQA) -> Vec<CheckItem> {
    let r = oqa.rho.to_matrix();
    let s = oqa.rho_inv.to_matrix();
    vec![
        item_from_defect("rho_times_rho_inv", identity_witness(&mat_mul(&r, &s), "rho*rho_inv")),
        item_from_defect("rho_inv_times_rho", identity_witness(&mat_mul(&s, &r), "rho_inv*rho")),
    ]
}

/// Embed the braiding tensor into legs `(i, j)` of the three-fold space.
fn embed3(t: &Tensor4, legs: (usize, usize)) -> Matrix {
    let n = t.rank();
    let n3 = n * n * n;
    let mut m = mat_zero(n3, n3);
    let unpack = |x: usize| (x / (n * n), (x / n) % n, x % n);
    for out in 0..n3 {
        let o = [unpack(out).0, unpack(out).1, unpack(out).2];
        for inp in 0..n3 {
            let i = [unpack(inp).0, unpack(inp).1, unpack(inp).2];
            let spectator = (0..3).find(|k| *k != legs.0 && *k != legs.1).unwrap();
            if o[spectator] != i[spectator] {
                continue;
            }
            let v = t.get(o[legs.0], o[legs.1], i[legs.0], i[legs.1]);
            if !v.is_zero() {
                m[out][inp] = v.clone();
            }
        }
    }
    m
}

/// The braid relation on the three-fold space:
/// `rho_12 rho_13 rho_23 = rho_23 rho_13 rho_12`.
pub fn check_yang_baxter(oqa: &MatrixOQA) -> CheckItem {
    let r12 = embed3(&oqa.rho, (0, 1));
    let r13 = embed3(&oqa.rho, (0, 2));
    let r23 = embed3(&oqa.rho, (1, 2));
    let lhs = mat_mul(&mat_mul(&r12, &r13), &r23);
    let rhs = mat_mul(&mat_mul(&r23, &r13), &r12);
    let n = oqa.rank;
    let mut witness = None;
    'outer: for out in 0..n * n * n {
        for inp in 0..n * n * n {
            if lhs[out][inp] != rhs[out][inp] {
                witness = Some(format!(
                    "triple index [{out}][{inp}]: lhs = {}, rhs = {}",
                    lhs[out][inp], rhs[out][inp]
                ));
                break 'outer;
            }
        }
    }
    item_from_defect("yang_baxter", witness)
}

/// Conjugating both legs of `t` by `m` must fix `t`.
fn symmetry_defect(t: &Tensor4, m: &Matrix, m_inv: &Matrix) -> Option<String> {
    let n = t.rank();
    for a in 0..n {
        for c in 0..n {
            for b in 0..n {
                for d in 0..n {
                    let mut conj = LaurentPoly::zero();
                    for a2 in 0..n {
                        if m[a][a2].is_zero() {
                            continue;
                        }
                        for c2 in 0..n {
                            if m[c][c2].is_zero() {
                                continue;
                            }
                            for b2 in 0..n {
                                for d2 in 0..n {
                                    let v = t.get(a2, c2, b2, d2);
                                    if v.is_zero() {
                                        continue;
                                    }
                                    let w = &(&(&m[a][a2] * v) * &m_inv[b2][b])
                                        * &(&m[c][c2] * &m_inv[d2][d]);
                                    conj += &w;
                                }
                            }
                        }
                    }
                    if &conj != t.get(a, c, b, d) {
                        return Some(format!(
                            "entry ({a},{c})<-({b},{d}): conjugated = {conj}, original = {}",
                            t.get(a, c, b, d)
                        ));
                    }
                }
            }
        }
    }
    None
}

/// Both background matrices must commute with the braiding tensor and its
/// inverse when applied to both legs at once.
pub fn check_symmetry(oqa: &MatrixOQA) -> Vec<CheckItem> {
    vec![
        item_from_defect(
            "symmetry_up_rho",
            symmetry_defect(&oqa.rho, &oqa.m_up, &oqa.m_up_inv),
        ),
        item_from_defect(
            "symmetry_up_rho_inv",
            symmetry_defect(&oqa.rho_inv, &oqa.m_up, &oqa.m_up_inv),
        ),
        item_from_defect(
            "symmetry_down_rho",
            symmetry_defect(&oqa.rho, &oqa.m_down, &oqa.m_down_inv),
        ),
        item_from_defect(
            "symmetry_down_rho_inv",
            symmetry_defect(&oqa.rho_inv, &oqa.m_down, &oqa.m_down_inv),
        ),
    ]
}

/// The cross-channel inverse law: conjugate the second leg of the braiding
/// tensor by the upper matrix, the first leg of its inverse by the lower
/// matrix, and contract in the channel that swaps one input with one output;
/// both contraction orders must give the identity pairing.
pub fn check_mixed_inverse(oqa: &MatrixOQA) -> CheckItem {
    let n = oqa.rank;
    // p[(a,c)][(b,d)] = sum_x U[c][x] rho[(a,x)(b,y)] U^-1[y][d]
    let conj_leg2 = |t: &Tensor4, m: &Matrix, m_inv: &Matrix| {
        let mut out = Tensor4::zero(n);
        for a in 0..n {
            for c in 0..n {
                for b in 0..n {
                    for d in 0..n {
                        let mut acc = LaurentPoly::zero();
                        for x in 0..n {
                            if m[c][x].is_zero() {
                                continue;
                            }
                            for y in 0..n {
                                let v = t.get(a, x, b, y);
                                if !v.is_zero() {
                                    acc += &(&(&m[c][x] * v) * &m_inv[y][d]);
                                }
                            }
                        }
                        out.set(a, c, b, d, acc);
                    }
                }
            }
        }
        out
    };
    let conj_leg1 = |t: &Tensor4, m: &Matrix, m_inv: &Matrix| {
        let mut out = Tensor4::zero(n);
        for a in 0..n {
            for c in 0..n {
                for b in 0..n {
                    for d in 0..n {
                        let mut acc = LaurentPoly::zero();
                        for x in 0..n {
                            if m[a][x].is_zero() {
                                continue;
                            }
                            for y in 0..n {
                                let v = t.get(x, c, y, d);
                                if !v.is_zero() {
                                    acc += &(&(&m[a][x] * v) * &m_inv[y][b]);
                                }
                            }
                        }
                        out.set(a, c, b, d, acc);
                    }
                }
            }
        }
        out
    };
    let p = conj_leg2(&oqa.rho, &oqa.m_up, &oqa.m_up_inv);
    let q = conj_leg1(&oqa.rho_inv, &oqa.m_down, &oqa.m_down_inv);
    // (P # Q)[(a,g)][(f,d)] = sum_{b,c} P[(a,c)][(b,d)] Q[(b,g)][(f,c)],
    // expected delta(a,f) delta(g,d); and the same with P and Q exchanged.
    let cross = |p: &Tensor4, q: &Tensor4| -> Option<String> {
        for a in 0..n {
            for g in 0..n {
                for f in 0..n {
                    for d in 0..n {
                        let mut acc = LaurentPoly::zero();
                        for b in 0..n {
                            for c in 0..n {
                                let x = p.get(a, c, b, d);
                                if x.is_zero() {
                                    continue;
                                }
                                let y = q.get(b, g, f, c);
                                if !y.is_zero() {
                                    acc += &(x * y);
                                }
                            }
                        }
                        let expected = a == f && g == d;
                        let ok = if expected { acc.is_one() } else { acc.is_zero() };
                        if !ok {
                            return Some(format!(
                                "entry ({a},{g})<-({f},{d}): got {acc}, expected {}",
                                u8::from(expected)
                            ));
                        }
                    }
                }
            }
        }
        None
    };
    let defect = cross(&p, &q).or_else(|| cross(&q, &p));
    item_from_defect("mixed_inverse", defect)
}

/// The background matrices must commute with each other.
pub fn check_background_commute(oqa: &MatrixOQA) -> CheckItem {
    let ud = mat_mul(&oqa.m_up, &oqa.m_down);
    let du = mat_mul(&oqa.m_down, &oqa.m_up);
    let mut witness = None;
    'outer: for i in 0..oqa.rank {
        for j in 0..oqa.rank {
            if ud[i][j] != du[i][j] {
                witness = Some(format!(
                    "[{i}][{j}]: up*down = {}, down*up = {}",
                    ud[i][j], du[i][j]
                ));
                break 'outer;
            }
        }
    }
    item_from_defect("background_commute", witness)
}

/// Run every axiom check.
pub fn check_all(oqa: &MatrixOQA) -> CheckReport {
    let mut items = check_inverse_pair(oqa);
    items.push(check_yang_baxter(oqa));
    items.extend(check_symmetry(oqa));
    items.push(check_mixed_inverse(oqa));
    items.push(check_background_commute(oqa));
    CheckReport { items }
}

// ---------------------------------------------------------------------------
// JSON loading
// ---------------------------------------------------------------------------

fn json_matrix(v: &Value, n: usize, field: &str) -> Result<Matrix, OqaError> {
    let rows = v
        .as_array()
        .ok_or_else(|| OqaError::Json(format!("{field}: expected array")))?;
    if rows.len() != n {
        return Err(OqaError::Json(format!("{field}: expected {n} rows, got {}", rows.len())));
    }
    let mut m = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let cols = row
            .as_array()
            .ok_or_else(|| OqaError::Json(format!("{field}[{i}]: expected array")))?;
        if cols.len() != n {
            return Err(OqaError::Json(format!(
                "{field}[{i}]: expected {n} entries, got {}",
                cols.len()
            )));
        }
        let mut out = Vec::with_capacity(n);
        for (j, e) in cols.iter().enumerate() {
            out.push(
                crate::laurent::poly_from_json(e)
                    .map_err(|e| OqaError::Json(format!("{field}[{i}][{j}]: {e}")))?,
            );
        }
        m.push(out);
    }
    Ok(m)
}

fn json_tensor4(v: &Value, n: usize, field: &str) -> Result<Tensor4, OqaError> {
    // Nested arrays indexed [out1][out2][in1][in2].
    let mut t = Tensor4::zero(n);
    let level = |v: &Value, what: &str| -> Result<Vec<Value>, OqaError> {
        v.as_array()
            .map(|a| a.to_vec())
            .ok_or_else(|| OqaError::Json(format!("{what}: expected array")))
    };
    let l1 = level(v, field)?;
    if l1.len() != n {
        return Err(OqaError::Json(format!("{field}: expected {n} entries")));
    }
    for (a, va) in l1.iter().enumerate() {
        let l2 = level(va, &format!("{field}[{a}]"))?;
        if l2.len() != n {
            return Err(OqaError::Json(format!("{field}[{a}]: expected {n} entries")));
        }
        for (c, vc) in l2.iter().enumerate() {
            let l3 = level(vc, &format!("{field}[{a}][{c}]"))?;
            if l3.len() != n {
                return Err(OqaError::Json(format!("{field}[{a}][{c}]: expected {n} entries")));
            }
            for (b, vb) in l3.iter().enumerate() {
                let l4 = level(vb, &format!("{field}[{a}][{c}][{b}]"))?;
                if l4.len() != n {
                    return Err(OqaError::Json(format!(
                        "{field}[{a}][{c}][{b}]: expected {n} entries"
                    )));
                }
                for (d, vd) in l4.iter().enumerate() {
                    let p = crate::laurent::poly_from_json(vd).map_err(|e| {
                        OqaError::Json(format!("{field}[{a}][{c}][{b}][{d}]: {e}"))
                    })?;
                    t.set(a, c, b, d, p);
                }
            }
        }
    }
    Ok(t)
}

/// Load algebra data from a JSON file with fields `rank`, `rho`, `rho_inv`
/// (nested `[n][n][n][n]` arrays indexed output-pair then input-pair),
/// `m_up`, `m_down`.  All axiom checks run; with `strict` any failure is an
/// error, otherwise the report is returned for the caller to surface.
pub fn load_algebra_file(path: &Path, strict: bool) -> Result<(MatrixOQA, CheckReport), OqaError> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| OqaError::Json(e.to_string()))?;
    let obj = v
        .as_object()
        .ok_or_else(|| OqaError::Json("top level: expected object".into()))?;
    let rank = obj
        .get("rank")
        .and_then(Value::as_u64)
        .ok_or_else(|| OqaError::Json("rank: expected positive integer".into()))? as usize;
    if rank == 0 {
        return Err(OqaError::Json("rank: must be at least 1".into()));
    }
    for key in obj.keys() {
        if !matches!(key.as_str(), "rank" | "rho" | "rho_inv" | "m_up" | "m_down") {
            return Err(OqaError::Json(format!("unknown field {key:?}")));
        }
    }
    let get = |k: &str| obj.get(k).ok_or_else(|| OqaError::Json(format!("missing field {k:?}")));
    let rho = json_tensor4(get("rho")?, rank, "rho")?;
    let rho_inv = json_tensor4(get("rho_inv")?, rank, "rho_inv")?;
    let m_up = json_matrix(get("m_up")?, rank, "m_up")?;
    let m_down = json_matrix(get("m_down")?, rank, "m_down")?;
    let oqa = MatrixOQA::new(rank, rho, rho_inv, m_up, m_down)?;
    let report = check_all(&oqa);
    if strict && !report.all_pass() {
        let item = report.first_failure().unwrap();
        return Err(OqaError::CheckFailed(format!(
            "{}: {}",
            item.name,
            item.witness.as_deref().unwrap_or("failed")
        )));
    }
    Ok((oqa, report))
}

/// Serialize algebra data to the JSON schema accepted by
/// [`load_algebra_file`].
pub fn algebra_to_json(oqa: &MatrixOQA) -> Value {
    let n = oqa.rank;
    let tensor = |t: &Tensor4| -> Value {
        Value::Array(
            (0..n)
                .map(|a| {
                    Value::Array(
                        (0..n)
                            .map(|c| {
                                Value::Array(
                                    (0..n)
                                        .map(|b| {
                                            Value::Array(
                                                (0..n)
                                                    .map(|d| {
                                                        crate::laurent::poly_to_json(
                                                            t.get(a, c, b, d),
                                                        )
                                                    })
                                                    .collect(),
                                            )
                                        })
                                        .collect(),
                                )
                            })
                            .collect(),
                    )
                })
                .collect(),
        )
    };
    let matrix = |m: &Matrix| -> Value {
        Value::Array(
            m.iter()
                .map(|row| {
                    Value::Array(row.iter().map(crate::laurent::poly_to_json).collect())
                })
                .collect(),
        )
    };
    serde_json::json!({
        "rank": n,
        "rho": tensor(&oqa.rho),
        "rho_inv": tensor(&oqa.rho_inv),
        "m_up": matrix(&oqa.m_up),
        "m_down": matrix(&oqa.m_down),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentPoly;

    fn p(c: i64, e: i64) -> LaurentPoly {
        LaurentPoly::monomial(c, e)
    }

    #[test]
    fn matrix_inverse_exact() {
        // diag(q, q^2) inverts to diag(q^-1, q^-2).
        let m = vec![
            vec![p(1, 1), LaurentPoly::zero()],
            vec![LaurentPoly::zero(), p(1, 2)],
        ];
        let inv = mat_inverse(&m).unwrap();
        assert_eq!(inv[0][0], p(1, -1));
        assert_eq!(inv[1][1], p(1, -2));
        assert!(identity_defect(&mat_mul(&m, &inv)).is_none());

        // Unimodular non-diagonal example.
        let m = vec![
            vec![p(1, 0), p(1, 1)],
            vec![LaurentPoly::zero(), p(1, 0)],
        ];
        let inv = mat_inverse(&m).unwrap();
        assert!(identity_defect(&mat_mul(&m, &inv)).is_none());
        assert!(identity_defect(&mat_mul(&inv, &m)).is_none());

        // det = q - q is zero.
        let sing = vec![
            vec![p(1, 0), p(1, 0)],
            vec![p(1, 1), p(1, 1)],
        ];
        assert!(mat_inverse(&sing).is_none());

        // Invertible over fractions but not over the ring: det = 1 + q.
        let frac = vec![
            vec![p(1, 0), LaurentPoly::zero()],
            vec![LaurentPoly::zero(), &p(1, 0) + &p(1, 1)],
        ];
        assert!(mat_inverse(&frac).is_none());
    }

    #[test]
    fn det_small_cases() {
        let m = vec![
            vec![p(1, 0), p(2, 0)],
            vec![p(3, 0), p(4, 0)],
        ];
        assert_eq!(det(&m), p(-2, 0));
        assert_eq!(det(&mat_identity(4)), LaurentPoly::one());
    }

    #[test]
    fn tensor_matrix_roundtrip() {
        let mut t = Tensor4::zero(2);
        t.set(0, 1, 1, 0, p(3, 2));
        t.set(1, 1, 1, 1, p(1, -1));
        let m = t.to_matrix();
        assert_eq!(m[0 * 2 + 1][1 * 2 + 0], p(3, 2));
        assert_eq!(Tensor4::from_matrix(2, &m), t);
    }

    #[test]
    fn identity_braiding_passes_checks() {
        // rho = identity, backgrounds = identity: every axiom holds.
        let n = 2;
        let id4 = Tensor4::from_matrix(n, &mat_identity(n * n));
        let oqa = MatrixOQA::new(n, id4.clone(), id4, mat_identity(n), mat_identity(n)).unwrap();
        let report = check_all(&oqa);
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn broken_inverse_is_reported() {
        let n = 2;
        let id4 = Tensor4::from_matrix(n, &mat_identity(n * n));
        let mut bad = id4.clone();
        bad.set(0, 0, 0, 0, p(1, 1));
        let oqa = MatrixOQA::new(n, bad, id4, mat_identity(n), mat_identity(n)).unwrap();
        let report = check_all(&oqa);
        assert!(!report.all_pass());
        let first = report.first_failure().unwrap();
        assert_eq!(first.name, "rho_times_rho_inv");
        assert!(first.witness.is_some());
    }

    #[test]
    fn json_roundtrip_via_tempfile() {
        use std::io::Write;
        let n = 2;
        let id4 = Tensor4::from_matrix(n, &mat_identity(n * n));
        let oqa = MatrixOQA::new(n, id4.clone(), id4, mat_identity(n), mat_identity(n)).unwrap();
        let json = algebra_to_json(&oqa);
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, "{json}").unwrap();
        let (loaded, report) = load_algebra_file(f.path(), true).unwrap();
        assert!(report.all_pass());
        assert_eq!(loaded.rho, oqa.rho);
        assert_eq!(loaded.m_up, oqa.m_up);
    }
}
