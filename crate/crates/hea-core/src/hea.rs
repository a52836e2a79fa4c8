//! The one-dimensional alternating-layered hardware-efficient ansatz: an
//! initial layer of 3-parameter single-qubit rotations followed by D brick
//! layers, each brick a fixed CNOT and a 3-parameter rotation on each of its
//! two qubits. Also the purely geometric light-cone of an observable through
//! the brick layout, and the brick-replacement sampling used by 2-design
//! estimators.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // float math in no_std graphs; std builds shadow it with inherent methods
use num_traits::Float;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{CMatrix, C_ZERO};
use crate::pauli::PauliString;
use crate::qstate::{apply_gate_in_place, QubitSet, StateVector};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Boundary {
    Open,
    Periodic,
}

/// Rotation angle convention: `Half` is exp(-i theta P / 2) (exact pi/2
/// parameter-shift rule), `Full` is exp(-i theta P) (shifts become pi/4).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AngleConvention {
    Half,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "gate"))]
pub enum GateKind {
    Cnot { control: usize, target: usize },
    Rotation { axis: Axis, qubit: usize },
}

/// One gate of the flattened circuit; rotations carry exactly one parameter
/// index and the indices enumerate 0..num_params in circuit order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GateSpec {
    pub kind: GateKind,
    pub param_index: Option<usize>,
}

/// A two-qubit brick: CNOT(control -> target) followed by a 3-parameter
/// rotation on each qubit. Parameters occupy
/// param_start..param_start + 6 (control rotations first).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Brick {
    pub layer: usize,
    pub control: usize,
    pub target: usize,
    pub param_start: usize,
}

impl Brick {
    pub fn low(&self) -> usize {
        self.control.min(self.target)
    }

    pub fn high(&self) -> usize {
        self.control.max(self.target)
    }

    pub fn covers(&self, q: usize) -> bool {
        q == self.control || q == self.target
    }
}

#[derive(Clone, Debug)]
pub struct HeaCircuit {
    num_qubits: usize,
    depth: usize,
    boundary: Boundary,
    convention: AngleConvention,
    gates: Vec<GateSpec>,
    bricks: Vec<Brick>,
    num_params: usize,
}

/// Brick pairs of one layer (1-based): odd layers pair (0,1),(2,3),...;
/// even layers pair (1,2),(3,4),... plus the wrap pair (n-1,0) when the
/// boundary is periodic and n is even.
pub fn layer_pairs(num_qubits: usize, layer: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let start = if layer % 2 == 1 { 0 } else { 1 };
    let mut pairs: Vec<(usize, usize)> = (start..num_qubits.saturating_sub(1))
        .step_by(2)
        .map(|a| (a, a + 1))
        .collect();
    if layer.is_multiple_of(2)
        && boundary == Boundary::Periodic
        && num_qubits.is_multiple_of(2)
        && num_qubits >= 2
    {
        pairs.push((num_qubits - 1, 0));
    }
    pairs
}

pub fn build_hea(
    num_qubits: usize,
    depth: usize,
    boundary: Boundary,
    convention: AngleConvention,
) -> Result<HeaCircuit> {
    if num_qubits == 0 {
        return Err(Error::EmptyRegister);
    }
    if num_qubits > crate::qstate::MAX_QUBITS {
        return Err(Error::BudgetExceeded("dense states limited to 24 qubits"));
    }
    let mut gates = Vec::new();
    let mut bricks = Vec::new();
    let mut param = 0usize;
    let push_rotations = |gates: &mut Vec<GateSpec>, param: &mut usize, qubit: usize| {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            gates.push(GateSpec {
                kind: GateKind::Rotation { axis, qubit },
                param_index: Some(*param),
            });
            *param += 1;
        }
    };
    for q in 0..num_qubits {
        push_rotations(&mut gates, &mut param, q);
    }
    for layer in 1..=depth {
        for (control, target) in layer_pairs(num_qubits, layer, boundary) {
            bricks.push(Brick { layer, control, target, param_start: param });
            gates.push(GateSpec { kind: GateKind::Cnot { control, target }, param_index: None });
            push_rotations(&mut gates, &mut param, control);
            push_rotations(&mut gates, &mut param, target);
        }
    }
    Ok(HeaCircuit {
        num_qubits,
        depth,
        boundary,
        convention,
        gates,
        bricks,
        num_params: param,
    })
}

pub(crate) fn rotation_matrix(axis: Axis, theta: f64, convention: AngleConvention) -> CMatrix {
    let a = match convention {
        AngleConvention::Half => theta / 2.0,
        AngleConvention::Full => theta,
    };
    let (c, s) = (a.cos(), a.sin());
    let entries = match axis {
        Axis::X => [
            Complex64::new(c, 0.0),
            Complex64::new(0.0, -s),
            Complex64::new(0.0, -s),
            Complex64::new(c, 0.0),
        ],
        Axis::Y => [
            Complex64::new(c, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(c, 0.0),
        ],
        Axis::Z => [
            Complex64::new(c, -s),
            C_ZERO,
            C_ZERO,
            Complex64::new(c, s),
        ],
    };
    CMatrix::from_row_major(2, 2, &entries)
}

#[cfg(test)]
fn cnot_in_place(amps: &mut [Complex64], control: usize, target: usize) {
    let cmask = 1usize << control;
    let tmask = 1usize << target;
    for idx in 0..amps.len() {
        if idx & cmask != 0 && idx & tmask == 0 {
            amps.swap(idx, idx | tmask);
        }
    }
}

impl HeaCircuit {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn convention(&self) -> AngleConvention {
        self.convention
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    /// Flattened gate list (the JSON layout dump serializes this).
    pub fn gates(&self) -> &[GateSpec] {
        &self.gates
    }

    pub fn bricks(&self) -> &[Brick] {
        &self.bricks
    }

    /// Axis and qubit of the rotation owning a parameter index.
    pub fn rotation_for_param(&self, param: usize) -> Result<(Axis, usize)> {
        self.gates
            .iter()
            .find(|g| g.param_index == Some(param))
            .and_then(|g| match g.kind {
                GateKind::Rotation { axis, qubit } => Some((axis, qubit)),
                GateKind::Cnot { .. } => None,
            })
            .ok_or(Error::InvalidArgument("parameter index out of range"))
    }

    /// Brick owning a parameter index, if it is not in the initial layer.
    pub fn brick_for_param(&self, param: usize) -> Option<&Brick> {
        self.bricks
            .iter()
            .find(|b| param >= b.param_start && param < b.param_start + 6)
    }

    /// U(theta)|psi>. Each rotation trio and each brick is folded into a
    /// single 2x2 / 4x4 gate before touching the amplitudes.
    pub fn apply(&self, theta: &[f64], state: &StateVector) -> Result<StateVector> {
        if theta.len() != self.num_params {
            return Err(Error::DimensionMismatch {
                expected: self.num_params,
                got: theta.len(),
            });
        }
        if state.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: state.num_qubits(),
            });
        }
        let mut out = state.clone();
        let amps = out.amps_mut();
        for q in 0..self.num_qubits {
            let w = self.rotation_trio(theta, 3 * q);
            apply_gate_in_place(amps, &w, &[q]);
        }
        for brick in &self.bricks {
            let fused = self.fused_brick(theta, brick);
            apply_gate_in_place(amps, &fused, &[brick.low(), brick.high()]);
        }
        Ok(out)
    }

    /// W = Rz Ry Rx for the three parameters starting at `param_start`.
    fn rotation_trio(&self, theta: &[f64], param_start: usize) -> CMatrix {
        let rx = rotation_matrix(Axis::X, theta[param_start], self.convention);
        let ry = rotation_matrix(Axis::Y, theta[param_start + 1], self.convention);
        let rz = rotation_matrix(Axis::Z, theta[param_start + 2], self.convention);
        rz.mul(&ry).mul(&rx)
    }

    /// (W_control (x) W_target) CNOT as one 4x4 gate in the (low, high)
    /// target basis.
    fn fused_brick(&self, theta: &[f64], brick: &Brick) -> CMatrix {
        let w_control = self.rotation_trio(theta, brick.param_start);
        let w_target = self.rotation_trio(theta, brick.param_start + 3);
        let (w_low, w_high) = if brick.control < brick.target {
            (w_control, w_target)
        } else {
            (w_target, w_control)
        };
        let control_is_low = brick.control < brick.target;
        let mut cnot = CMatrix::zeros(4, 4);
        for col in 0..4usize {
            let (c_bit, t_bit) = if control_is_low {
                (col & 1, col >> 1)
            } else {
                (col >> 1, col & 1)
            };
            let t_out = t_bit ^ c_bit;
            let row = if control_is_low { (t_out << 1) | c_bit } else { (c_bit << 1) | t_out };
            *cnot.at_mut(row, col) = crate::linalg::C_ONE;
        }
        w_high.kron(&w_low).mul(&cnot)
    }

    /// Reference gate-by-gate walk of the flattened list; the fused path must
    /// agree with it exactly up to rounding.
    #[cfg(test)]
    pub(crate) fn apply_gatewise(&self, theta: &[f64], state: &StateVector) -> Result<StateVector> {
        let mut out = state.clone();
        let amps = out.amps_mut();
        for gate in &self.gates {
            match gate.kind {
                GateKind::Cnot { control, target } => cnot_in_place(amps, control, target),
                GateKind::Rotation { axis, qubit } => {
                    let m = rotation_matrix(
                        axis,
                        theta[gate.param_index.expect("rotations carry a parameter")],
                        self.convention,
                    );
                    apply_gate_in_place(amps, &m, &[qubit]);
                }
            }
        }
        Ok(out)
    }

    /// Dense matrix of U(theta), built column-by-column (fixture/oracle use).
    pub fn unitary_matrix(&self, theta: &[f64]) -> Result<CMatrix> {
        if self.num_qubits > 10 {
            return Err(Error::BudgetExceeded("dense circuit unitaries limited to 10 qubits"));
        }
        let dim = 1usize << self.num_qubits;
        let mut u = CMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut amps = vec![C_ZERO; dim];
            amps[col] = Complex64::new(1.0, 0.0);
            let state = StateVector::from_amps_unchecked(self.num_qubits, amps);
            let out = self.apply(theta, &state)?;
            u.col_mut(col).copy_from_slice(out.amps());
        }
        Ok(u)
    }

    /// Set of qubits causally connected to the support of `string` through
    /// the brick layout: pure geometry, independent of the parameter values,
    /// and a superset of supp(U^dag P U) for every theta.
    pub fn lightcone(&self, string: &PauliString) -> Result<QubitSet> {
        if string.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: string.num_qubits(),
            });
        }
        if string.is_identity() {
            return Err(Error::InvalidArgument("identity string has no light-cone"));
        }
        let mut in_cone = vec![false; self.num_qubits];
        for &q in string.support().indices() {
            in_cone[q] = true;
        }
        // conjugation U^dag P U meets the last layer first
        for layer in (1..=self.depth).rev() {
            let snapshot = in_cone.clone();
            for (a, b) in layer_pairs(self.num_qubits, layer, self.boundary) {
                if snapshot[a] || snapshot[b] {
                    in_cone[a] = true;
                    in_cone[b] = true;
                }
            }
        }
        let idx: Vec<usize> =
            (0..self.num_qubits).filter(|&q| in_cone[q]).collect();
        QubitSet::new(idx)
    }
}

/// One draw of the randomness consumed by a 2-design-mode evaluation: each
/// brick is replaced by a Haar 4x4 unitary and the initial rotation layer
/// keeps uniformly random angles. When a gradient estimator differentiates a
/// brick parameter, that brick is split as (after) R(theta) (before) with
/// both halves Haar, so the neighborhoods of the generator are 2-designs.
#[derive(Clone, Debug)]
pub struct TwoDesignDraw {
    initial_angles: Vec<f64>,
    bricks: Vec<BrickDraw>,
}

#[derive(Clone, Debug)]
enum BrickDraw {
    Whole(CMatrix),
    Split { before: CMatrix, after: CMatrix },
}

impl TwoDesignDraw {
    /// Draw order is fixed (initial angles, then bricks in circuit order) so
    /// a draw is fully determined by the stream state.
    pub fn sample(
        circuit: &HeaCircuit,
        rng: &mut ChaCha8Rng,
        split_param: Option<usize>,
    ) -> Result<Self> {
        use rand::Rng;
        let tau = 2.0 * core::f64::consts::PI;
        let initial_angles: Vec<f64> =
            (0..3 * circuit.num_qubits()).map(|_| rng.random::<f64>() * tau).collect();
        let mut bricks = Vec::with_capacity(circuit.bricks().len());
        for brick in circuit.bricks() {
            let split_here = split_param
                .map(|p| p >= brick.param_start && p < brick.param_start + 6)
                .unwrap_or(false);
            if split_here {
                let before = crate::randmat::haar_unitary_with(4, rng)?;
                let after = crate::randmat::haar_unitary_with(4, rng)?;
                bricks.push(BrickDraw::Split { before, after });
            } else {
                bricks.push(BrickDraw::Whole(crate::randmat::haar_unitary_with(4, rng)?));
            }
        }
        Ok(TwoDesignDraw { initial_angles, bricks })
    }
}

/// Evaluate the circuit with bricks replaced per `draw`. `param_override`
/// supplies the angle of the differentiated parameter; it is required when
/// the draw split a brick and ignored parameters otherwise keep their drawn
/// angles.
pub fn apply_two_design(
    circuit: &HeaCircuit,
    draw: &TwoDesignDraw,
    state: &StateVector,
    param_override: Option<(usize, f64)>,
) -> Result<StateVector> {
    if state.num_qubits() != circuit.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: circuit.num_qubits(),
            got: state.num_qubits(),
        });
    }
    let mut out = state.clone();
    let amps = out.amps_mut();
    // initial layer
    for q in 0..circuit.num_qubits() {
        for (k, axis) in [Axis::X, Axis::Y, Axis::Z].into_iter().enumerate() {
            let pidx = 3 * q + k;
            let mut angle = draw.initial_angles[pidx];
            if let Some((p, v)) = param_override {
                if p == pidx {
                    angle = v;
                }
            }
            let m = rotation_matrix(axis, angle, circuit.convention());
            apply_gate_in_place(amps, &m, &[q]);
        }
    }
    // bricks
    for (brick, bdraw) in circuit.bricks().iter().zip(&draw.bricks) {
        let pair = [brick.low(), brick.high()];
        match bdraw {
            BrickDraw::Whole(u) => apply_gate_in_place(amps, u, &pair),
            BrickDraw::Split { before, after } => {
                let (p, v) = param_override
                    .ok_or(Error::InvalidArgument("split draw needs a parameter override"))?;
                let (axis, qubit) = circuit.rotation_for_param(p)?;
                apply_gate_in_place(amps, before, &pair);
                let m = rotation_matrix(axis, v, circuit.convention());
                apply_gate_in_place(amps, &m, &[qubit]);
                apply_gate_in_place(amps, after, &pair);
            }
        }
    }
    Ok(out)
}

/// Numeric support of a dense operator: the qubits on which it acts
/// non-trivially (up to `tol` on matrix entries).
pub fn numeric_operator_support(m: &CMatrix, num_qubits: usize, tol: f64) -> Result<QubitSet> {
    let dim = 1usize << num_qubits;
    if m.rows() != dim || m.cols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: m.rows() });
    }
    let mut support = Vec::new();
    for q in 0..num_qubits {
        let mask = 1usize << q;
        let mut trivial = true;
        'scan: for c in 0..dim {
            for r in 0..dim {
                let (rb, cb) = (r & mask != 0, c & mask != 0);
                if rb != cb {
                    // off-diagonal block must vanish
                    if m.at(r, c).norm() > tol {
                        trivial = false;
                        break 'scan;
                    }
                } else if !rb {
                    // diagonal blocks must agree
                    if (m.at(r, c) - m.at(r | mask, c | mask)).norm() > tol {
                        trivial = false;
                        break 'scan;
                    }
                }
            }
        }
        if !trivial {
            support.push(q);
        }
    }
    QubitSet::new(support)
}
