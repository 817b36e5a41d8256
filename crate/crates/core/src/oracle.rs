//! Brute-force state-vector semantics for small graph states.
//!
//! This is the independent check on the graphical rules in
//! [`crate::graph_state`]: states are built from the parity formula, measured by
//! explicit projection, and compared up to tensor products of single-qubit
//! Clifford operators by exhaustive search.
//!
//! Qubit ordering: `qubit_order` is sorted ascending by [`QubitId`], and bit `i`
//! of a basis index (least significant first) is the value of `qubit_order[i]`.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::graph_state::{GraphError, GraphState, PauliBasis, QubitId};

/// Largest register the oracle will build.
pub const MAX_QUBITS: usize = 10;
/// Largest register [`lc_equivalent`] will search.
pub const MAX_LC_QUBITS: usize = 5;
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{n} qubits exceeds the limit of {max}")]
    TooManyQubits { n: usize, max: usize },
    #[error("qubit {0} is not in the state")]
    UnknownQubit(QubitId),
    #[error("qubit {0} is already in the state")]
    DuplicateQubit(QubitId),
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("shape precondition violated: {0}")]
    Shape(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

type Mat2 = [[C64; 2]; 2];

const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

const IDENTITY: Mat2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
const PAULI_X: Mat2 = [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
const PAULI_Z: Mat2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]];
const HADAMARD: Mat2 = [
    [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
    [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)],
];
const PHASE_S: Mat2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]];

fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[C64::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Divides out the phase of the first non-zero entry so that matrices equal up
/// to global phase compare equal.
fn phase_normalised(m: &Mat2) -> Mat2 {
    let pivot = m.iter().flatten().find(|z| z.norm() > 1e-6).copied().unwrap();
    let phase = pivot / pivot.norm();
    let mut out = *m;
    for z in out.iter_mut().flatten() {
        *z /= phase;
    }
    out
}

fn same_up_to_phase(a: &Mat2, b: &Mat2) -> bool {
    let (a, b) = (phase_normalised(a), phase_normalised(b));
    a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).norm() < 1e-9)
}

/// The 24 single-qubit Cliffords modulo phase, generated from `H` and `S`.
/// Index 0 is the identity and indices 1..4 are `X`, `Y`, `Z`.
pub fn single_qubit_cliffords() -> &'static [Mat2] {
    static GROUP: OnceLock<Vec<Mat2>> = OnceLock::new();
    GROUP.get_or_init(|| {
        let pauli_y = matmul(&PAULI_Z, &PAULI_X);
        let mut group = vec![IDENTITY, PAULI_X, pauli_y, PAULI_Z];
        let mut frontier = vec![IDENTITY];
        while let Some(m) = frontier.pop() {
            for g in [HADAMARD, PHASE_S] {
                let next = matmul(&g, &m);
                if !group.iter().any(|k| same_up_to_phase(k, &next)) {
                    group.push(next);
                    frontier.push(next);
                }
            }
        }
        group
    })
}

fn insert_bit(index: usize, pos: usize, bit: usize) -> usize {
    let low = index & ((1 << pos) - 1);
    let high = index >> pos;
    (high << (pos + 1)) | (bit << pos) | low
}

fn remove_bit(index: usize, pos: usize) -> usize {
    let low = index & ((1 << pos) - 1);
    let high = index >> (pos + 1);
    (high << pos) | low
}

#[derive(Clone, Debug)]
pub struct StateVector {
    amplitudes: Vec<C64>,
    qubit_order: Vec<QubitId>,
}

#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    /// 0 for the +1 eigenvalue, 1 for the -1 eigenvalue.
    pub outcome_index: usize,
    pub probability: f64,
    /// `None` when the outcome has zero probability.
    pub post_state: Option<StateVector>,
}

impl StateVector {
    /// The zero-qubit state (the scalar 1).
    pub fn empty() -> Self {
        Self {
            amplitudes: vec![C64::new(1.0, 0.0)],
            qubit_order: Vec::new(),
        }
    }

    pub fn from_amplitudes(qubit_order: Vec<QubitId>, amplitudes: Vec<C64>) -> Result<Self, OracleError> {
        let n = qubit_order.len();
        if n > MAX_QUBITS {
            return Err(OracleError::TooManyQubits { n, max: MAX_QUBITS });
        }
        if amplitudes.len() != 1 << n {
            return Err(OracleError::DimensionMismatch {
                left: n,
                right: amplitudes.len().trailing_zeros() as usize,
            });
        }
        let mut sorted = qubit_order.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted != qubit_order {
            return Err(OracleError::Shape("qubit order must be strictly ascending".into()));
        }
        Ok(Self { amplitudes, qubit_order })
    }

    pub fn num_qubits(&self) -> usize {
        self.qubit_order.len()
    }

    pub fn qubit_order(&self) -> &[QubitId] {
        &self.qubit_order
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
    }

    fn position(&self, q: QubitId) -> Result<usize, OracleError> {
        self.qubit_order.binary_search(&q).map_err(|_| OracleError::UnknownQubit(q))
    }

    /// Inner product `<self|other>`; both registers must hold the same qubits.
    pub fn inner(&self, other: &StateVector) -> Result<C64, OracleError> {
        if self.qubit_order != other.qubit_order {
            return Err(OracleError::DimensionMismatch {
                left: self.num_qubits(),
                right: other.num_qubits(),
            });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// Tensors in a fresh qubit prepared in `|+>`.
    pub fn add_plus(&mut self, q: QubitId) -> Result<(), OracleError> {
        let pos = match self.qubit_order.binary_search(&q) {
            Ok(_) => return Err(OracleError::DuplicateQubit(q)),
            Err(p) => p,
        };
        let n = self.num_qubits() + 1;
        if n > MAX_QUBITS {
            return Err(OracleError::TooManyQubits { n, max: MAX_QUBITS });
        }
        let mut amps = vec![C64::default(); 1 << n];
        for (idx, &a) in self.amplitudes.iter().enumerate() {
            amps[insert_bit(idx, pos, 0)] = a * FRAC_1_SQRT_2;
            amps[insert_bit(idx, pos, 1)] = a * FRAC_1_SQRT_2;
        }
        self.qubit_order.insert(pos, q);
        self.amplitudes = amps;
        Ok(())
    }

    pub fn apply_cz(&mut self, a: QubitId, b: QubitId) -> Result<(), OracleError> {
        let (pa, pb) = (self.position(a)?, self.position(b)?);
        if pa == pb {
            return Err(OracleError::Shape(format!("CZ needs two distinct qubits, got {a} twice")));
        }
        let mask = (1 << pa) | (1 << pb);
        for (idx, amp) in self.amplitudes.iter_mut().enumerate() {
            if idx & mask == mask {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    fn apply_at(&mut self, pos: usize, m: &Mat2) {
        let bit = 1 << pos;
        for idx in 0..self.amplitudes.len() {
            if idx & bit == 0 {
                let (x0, x1) = (self.amplitudes[idx], self.amplitudes[idx | bit]);
                self.amplitudes[idx] = m[0][0] * x0 + m[0][1] * x1;
                self.amplitudes[idx | bit] = m[1][0] * x0 + m[1][1] * x1;
            }
        }
    }

    pub fn apply_single(&mut self, q: QubitId, m: &Mat2) -> Result<(), OracleError> {
        let pos = self.position(q)?;
        self.apply_at(pos, m);
        Ok(())
    }

    /// Contracts `qubits` against the bra `<bra|` (indexed with bit `j` for
    /// `qubits[j]`) and returns the Born probability with the renormalised
    /// remainder, or `None` for the remainder when the probability vanishes.
    pub fn project(&self, qubits: &[QubitId], bra: &[C64]) -> Result<(f64, Option<StateVector>), OracleError> {
        if bra.len() != 1 << qubits.len() {
            return Err(OracleError::DimensionMismatch {
                left: qubits.len(),
                right: bra.len().trailing_zeros() as usize,
            });
        }
        let positions = qubits.iter().map(|&q| self.position(q)).collect::<Result<Vec<_>, _>>()?;
        if positions.iter().collect::<BTreeSet<_>>().len() != positions.len() {
            return Err(OracleError::Shape("projection qubits must be distinct".into()));
        }
        let mut removal = positions.clone();
        removal.sort_unstable_by(|a, b| b.cmp(a));
        let rest: Vec<QubitId> = self.qubit_order.iter().copied().filter(|q| !qubits.contains(q)).collect();
        let mut out = vec![C64::default(); 1 << rest.len()];
        for (idx, &amp) in self.amplitudes.iter().enumerate() {
            let local = positions
                .iter()
                .enumerate()
                .fold(0usize, |acc, (j, &p)| acc | (((idx >> p) & 1) << j));
            let mut reduced = idx;
            for &p in &removal {
                reduced = remove_bit(reduced, p);
            }
            out[reduced] += bra[local].conj() * amp;
        }
        let probability: f64 = out.iter().map(C64::norm_sqr).sum();
        if probability < TOLERANCE {
            return Ok((probability, None));
        }
        let scale = probability.sqrt();
        for z in out.iter_mut() {
            *z /= scale;
        }
        Ok((probability, Some(StateVector { amplitudes: out, qubit_order: rest })))
    }
}

/// The two eigenvectors of a Pauli basis, `+1` first.
pub fn eigenbasis(basis: PauliBasis) -> [[C64; 2]; 2] {
    let r = FRAC_1_SQRT_2;
    match basis {
        PauliBasis::Z => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
        PauliBasis::Y => [[c(r, 0.0), c(0.0, r)], [c(r, 0.0), c(0.0, -r)]],
    }
}

/// Amplitude `2^{-n/2} (-1)^{#edges inside x}` for every basis string `x`.
pub fn build_graph_state(g: &GraphState) -> Result<StateVector, OracleError> {
    let order: Vec<QubitId> = g.vertices().collect();
    let n = order.len();
    if n > MAX_QUBITS {
        return Err(OracleError::TooManyQubits { n, max: MAX_QUBITS });
    }
    let masks: Vec<usize> = g
        .edges()
        .into_iter()
        .map(|(u, v)| {
            let pu = order.binary_search(&u).unwrap();
            let pv = order.binary_search(&v).unwrap();
            (1 << pu) | (1 << pv)
        })
        .collect();
    let scale = (0.5f64).powf(n as f64 / 2.0);
    let amplitudes = (0..1usize << n)
        .map(|x| {
            let parity = masks.iter().filter(|&&m| x & m == m).count() % 2;
            C64::new(if parity == 0 { scale } else { -scale }, 0.0)
        })
        .collect();
    Ok(StateVector { amplitudes, qubit_order: order })
}

pub fn measure_pauli(state: &StateVector, q: QubitId, basis: PauliBasis) -> Result<Vec<MeasurementOutcome>, OracleError> {
    eigenbasis(basis)
        .iter()
        .enumerate()
        .map(|(outcome_index, bra)| {
            let (probability, post_state) = state.project(&[q], bra)?;
            Ok(MeasurementOutcome { outcome_index, probability, post_state })
        })
        .collect()
}

fn partial_overlap(state: &[C64], target: &[C64], pos: usize) -> Mat2 {
    // m[j][i] = sum_y conj(target[y, j]) * state[y, i]
    let bit = 1 << pos;
    let mut m = [[C64::default(); 2]; 2];
    for idx in 0..state.len() {
        if idx & bit == 0 {
            let s = [state[idx], state[idx | bit]];
            let t = [target[idx].conj(), target[idx | bit].conj()];
            for j in 0..2 {
                for i in 0..2 {
                    m[j][i] += t[j] * s[i];
                }
            }
        }
    }
    m
}

/// Depth-first search over per-qubit Clifford choices; the last qubit is
/// resolved from a 2x2 partial overlap instead of a full application.
fn search(level: usize, state: &[C64], target: &[C64], allowed: &[Vec<usize>], chosen: &mut Vec<usize>) -> bool {
    let group = single_qubit_cliffords();
    let n = allowed.len();
    if n == 0 {
        return (target[0].conj() * state[0]).norm() >= 1.0 - TOLERANCE;
    }
    if level == n - 1 {
        let m = partial_overlap(state, target, level);
        for &k in &allowed[level] {
            let u = &group[k];
            let overlap = u[0][0] * m[0][0] + u[0][1] * m[0][1] + u[1][0] * m[1][0] + u[1][1] * m[1][1];
            if overlap.norm() >= 1.0 - TOLERANCE {
                chosen.push(k);
                return true;
            }
        }
        return false;
    }
    let bit = 1 << level;
    let mut next = state.to_vec();
    for &k in &allowed[level] {
        let u = &group[k];
        for idx in 0..state.len() {
            if idx & bit == 0 {
                let (x0, x1) = (state[idx], state[idx | bit]);
                next[idx] = u[0][0] * x0 + u[0][1] * x1;
                next[idx | bit] = u[1][0] * x0 + u[1][1] * x1;
            }
        }
        chosen.push(k);
        if search(level + 1, &next, target, allowed, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Finds per-qubit Clifford indices (into [`single_qubit_cliffords`]) mapping
/// `a` onto `b` up to global phase. Qubits outside `free` must take the identity.
fn find_local_clifford(a: &StateVector, b: &StateVector, free: &[QubitId]) -> Result<Option<Vec<usize>>, OracleError> {
    let (na, nb) = (a.num_qubits(), b.num_qubits());
    if na != nb {
        return Err(OracleError::DimensionMismatch { left: na, right: nb });
    }
    if na > MAX_LC_QUBITS {
        return Err(OracleError::TooManyQubits { n: na, max: MAX_LC_QUBITS });
    }
    let all: Vec<usize> = (0..single_qubit_cliffords().len()).collect();
    let allowed: Vec<Vec<usize>> = a
        .qubit_order
        .iter()
        .map(|q| if free.contains(q) { all.clone() } else { vec![0] })
        .collect();
    let mut chosen = Vec::with_capacity(na);
    Ok(search(0, &a.amplitudes, &b.amplitudes, &allowed, &mut chosen).then_some(chosen))
}

/// True iff some tensor product of single-qubit Cliffords maps `a` to `b` up to
/// global phase. Qubits are matched by position in `qubit_order`.
pub fn lc_equivalent(a: &StateVector, b: &StateVector) -> Result<bool, OracleError> {
    let free = a.qubit_order.clone();
    Ok(find_local_clifford(a, b, &free)?.is_some())
}

/// Like [`lc_equivalent`] but only the qubits in `free` may be corrected.
pub fn equivalent_with_corrections_on(a: &StateVector, b: &StateVector, free: &[QubitId]) -> Result<bool, OracleError> {
    Ok(find_local_clifford(a, b, free)?.is_some())
}

/// Checks that measuring `q` in `rule`'s basis leaves, for every outcome, a
/// state locally equivalent to the graph produced by the graphical rule.
pub fn verify_graphical_rule(g: &GraphState, q: QubitId, rule: PauliBasis) -> Result<bool, OracleError> {
    let n = g.vertex_count();
    if n > MAX_LC_QUBITS {
        return Err(OracleError::TooManyQubits { n, max: MAX_LC_QUBITS });
    }
    let state = build_graph_state(g)?;
    let mut after = g.clone();
    after.measure(q, rule)?;
    let expected = build_graph_state(&after)?;
    for outcome in measure_pauli(&state, q, rule)? {
        if let Some(post) = outcome.post_state {
            if !lc_equivalent(&post, &expected)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Single-qubit Pauli correction, as used after a Bell-basis teleportation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliCorrection {
    I,
    X,
    Z,
    XZ,
}

impl PauliCorrection {
    pub const ALL: [PauliCorrection; 4] = [Self::I, Self::X, Self::Z, Self::XZ];

    fn matrix(self) -> Mat2 {
        match self {
            Self::I => IDENTITY,
            Self::X => PAULI_X,
            Self::Z => PAULI_Z,
            Self::XZ => matmul(&PAULI_X, &PAULI_Z),
        }
    }
}

/// The four two-qubit measurement vectors on `(a, b)`:
/// `(|0>|+> ± |1>|->)/√2` then `(|0>|-> ± |1>|+>)/√2`.
/// Entry index is `bit_a + 2 * bit_b`.
pub fn teleport_basis() -> [[C64; 4]; 4] {
    let h = c(0.5, 0.0);
    let z = |sign: f64| h * sign;
    // |0>|+> = (|00> + |01>)/√2 in (a, b) order, i.e. indices 0 and 2.
    let plus_minus = |s: f64| [z(1.0), z(s), z(1.0), z(-s)];
    let minus_plus = |s: f64| [z(1.0), z(s), z(-1.0), z(s)];
    [plus_minus(1.0), plus_minus(-1.0), minus_plus(1.0), minus_plus(-1.0)]
}

fn check_transfer_shape(g: &GraphState, a: QubitId, b: QubitId, cq: QubitId) -> Result<(), OracleError> {
    for q in [a, b, cq] {
        if !g.contains(q) {
            return Err(OracleError::UnknownQubit(q));
        }
    }
    if a == b || a == cq || b == cq {
        return Err(OracleError::Shape("a, b and c must be distinct".into()));
    }
    let only = |q: QubitId, other: QubitId| g.neighbors(q).map(|n| n.len() == 1 && n.contains(&other));
    if !only(b, cq)? || !only(cq, b)? {
        return Err(OracleError::Shape(format!("{b} and {cq} must form an isolated pair")));
    }
    // The comparison runs on the state after `a` and `b` are gone.
    if g.vertex_count() > MAX_LC_QUBITS + 2 {
        return Err(OracleError::TooManyQubits { n: g.vertex_count(), max: MAX_LC_QUBITS + 2 });
    }
    Ok(())
}

/// The graph with `a`'s neighbourhood moved onto `c` and `a`, `b` removed.
pub fn transferred_graph(g: &GraphState, a: QubitId, b: QubitId, cq: QubitId) -> Result<GraphState, OracleError> {
    let mut out = g.clone();
    let nbrs: Vec<QubitId> = g.neighbors(a)?.iter().copied().collect();
    out.measure_z(a)?;
    out.measure_z(b)?;
    for v in nbrs {
        if v != cq {
            out.toggle_edge(cq, v)?;
        }
    }
    Ok(out)
}

/// For each of the four teleportation outcomes, the Pauli on `c` that turns the
/// post-measurement state into the transferred graph state, or `None` if no
/// Pauli does.
pub fn teleport_corrections(
    g: &GraphState,
    a: QubitId,
    b: QubitId,
    cq: QubitId,
) -> Result<[Option<PauliCorrection>; 4], OracleError> {
    check_transfer_shape(g, a, b, cq)?;
    let state = build_graph_state(g)?;
    let expected = build_graph_state(&transferred_graph(g, a, b, cq)?)?;
    let mut out = [None; 4];
    for (slot, bra) in out.iter_mut().zip(teleport_basis()) {
        let (_, post) = state.project(&[a, b], &bra)?;
        let Some(post) = post else { continue };
        for p in PauliCorrection::ALL {
            let mut corrected = post.clone();
            corrected.apply_single(cq, &p.matrix())?;
            if corrected.inner(&expected)?.norm() >= 1.0 - TOLERANCE {
                *slot = Some(p);
                break;
            }
        }
    }
    Ok(out)
}

/// Teleportation-based transfer of `a`'s connections onto `c` via the isolated
/// pair `b`–`c`: every outcome must match up to a Pauli on `c`.
pub fn verify_teleport_transfer(g: &GraphState, a: QubitId, b: QubitId, cq: QubitId) -> Result<bool, OracleError> {
    Ok(teleport_corrections(g, a, b, cq)?.iter().all(Option::is_some))
}

/// Runs `CZ(a,b)`, `Y(a)`, `Y(b)` on the state vector across all four outcome
/// branches and compares each against the graphical result of the same
/// sequence, up to local Cliffords.
pub fn verify_connection_transfer(g: &GraphState, a: QubitId, b: QubitId, cq: QubitId) -> Result<bool, OracleError> {
    check_transfer_shape(g, a, b, cq)?;
    let mut graphical = g.clone();
    graphical.toggle_edge(a, b)?;
    graphical.measure_y(a)?;
    graphical.measure_y(b)?;
    let expected = build_graph_state(&graphical)?;

    let mut state = build_graph_state(g)?;
    state.apply_cz(a, b)?;
    for first in measure_pauli(&state, a, PauliBasis::Y)? {
        let Some(mid) = first.post_state else { continue };
        for second in measure_pauli(&mid, b, PauliBasis::Y)? {
            let Some(end) = second.post_state else { continue };
            if !lc_equivalent(&end, &expected)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
