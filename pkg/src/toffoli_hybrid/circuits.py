"""Small circuits and an exact dense-state simulator.

Qubit 0 is the most significant bit of a basis index, so ``|q0 q1 q2>`` with
index ``4 q0 + 2 q1 + q2`` matches the usual textbook CCX matrix.

Text format, one gate per line::

    KIND q0 [q1 [q2]] [-> cbit | ?cbit]

``-> c`` stores a measurement result in classical bit ``c``; ``?c`` applies
the gate only when bit ``c`` is 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

MAX_QUBITS = 12

_S2 = 1 / np.sqrt(2)
_W = np.exp(1j * np.pi / 4)

_H = np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex)
_T = np.diag([1, _W])
_SINGLE = {
    "H": _H,
    "T": _T,
    "T_DAG": _T.conj(),
    "TX": _H @ _T @ _H,
    "TX_DAG": _H @ _T.conj() @ _H,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
    "S": np.diag([1, 1j]),
}
_ARITY = {**{k: 1 for k in _SINGLE}, "CNOT": 2, "CZ": 2, "CCX": 3, "CCZ": 3, "MEAS_X": 1, "MEAS_Z": 1}
GATE_KINDS = tuple(_ARITY)


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    cbit: int | None = None  # measurement result slot
    guard: int | None = None  # classical bit that must be 1

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(self.qubits) != _ARITY[self.kind]:
            raise CircuitError(f"{self.kind} acts on {_ARITY[self.kind]} qubits")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"repeated qubit in {self}")
        if self.is_measurement:
            if self.cbit is None or self.guard is not None:
                raise CircuitError("a measurement needs a result bit and no guard")
        elif self.cbit is not None:
            raise CircuitError("only measurements write classical bits")

    @property
    def is_measurement(self) -> bool:
        return self.kind.startswith("MEAS")

    def __str__(self) -> str:
        text = " ".join([self.kind, *map(str, self.qubits)])
        if self.cbit is not None:
            text += f" -> {self.cbit}"
        if self.guard is not None:
            text += f" ?{self.guard}"
        return text

    @classmethod
    def parse(cls, line: str) -> Gate:
        parts = line.split()
        kind, rest = parts[0], parts[1:]
        cbit = guard = None
        if "->" in rest:
            i = rest.index("->")
            cbit = int(rest[i + 1])
            rest = rest[:i] + rest[i + 2 :]
        if rest and rest[-1].startswith("?"):
            guard = int(rest[-1][1:])
            rest = rest[:-1]
        return cls(kind, tuple(int(q) for q in rest), cbit, guard)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...]
    n_cbits: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        written: set[int] = set()
        for g in self.gates:
            if any(not 0 <= q < self.n_qubits for q in g.qubits):
                raise CircuitError(f"qubit out of range in {g}")
            if g.guard is not None and g.guard not in written:
                raise CircuitError(f"guard bit {g.guard} read before it is written in {g}")
            if g.cbit is not None:
                if not 0 <= g.cbit < self.n_cbits:
                    raise CircuitError(f"classical bit out of range in {g}")
                written.add(g.cbit)

    def dumps(self) -> str:
        header = f"# qubits {self.n_qubits} cbits {self.n_cbits}\n"
        return header + "".join(f"{g}\n" for g in self.gates)

    @classmethod
    def parse(cls, text: str, n_qubits: int | None = None, n_cbits: int | None = None) -> Circuit:
        gates = []
        for line in text.splitlines():
            line = line.strip()
            if line.startswith("# qubits"):
                _, _, nq, _, nc = line.split()
                n_qubits = n_qubits if n_qubits is not None else int(nq)
                n_cbits = n_cbits if n_cbits is not None else int(nc)
                continue
            if not line or line.startswith("#"):
                continue
            gates.append(Gate.parse(line))
        if n_qubits is None:
            n_qubits = 1 + max((q for g in gates for q in g.qubits), default=0)
        if n_cbits is None:
            n_cbits = 1 + max((g.cbit for g in gates if g.cbit is not None), default=-1)
        return cls(n_qubits, tuple(gates), n_cbits)

    def kinds_on(self, qubit: int) -> set[str]:
        return {g.kind for g in self.gates if qubit in g.qubits}

    def count(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g in self.gates:
            out[g.kind] = out.get(g.kind, 0) + 1
        return out


@dataclass
class DenseState:
    """Amplitudes over ``2**n_qubits`` basis states (single owner, mutable)."""

    amplitudes: np.ndarray
    n_qubits: int = field(init=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        n = round(np.log2(amps.size))
        if 2**n != amps.size:
            raise CircuitError("amplitude count is not a power of two")
        if abs(np.vdot(amps, amps).real - 1) > 1e-12:
            raise CircuitError("state is not normalized")
        self.amplitudes = amps
        self.n_qubits = n

    @classmethod
    def basis(cls, bits) -> DenseState:
        bits = list(bits)
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int("".join(map(str, bits)) or "0", 2)] = 1
        return cls(amps)

    def tensor(self, other: DenseState) -> DenseState:
        return DenseState(np.kron(self.amplitudes, other.amplitudes))


def _apply(psi: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Apply a unitary gate to a state tensor of shape (2,)*n (or with a
    trailing batch axis)."""
    k = gate.kind
    q = gate.qubits
    if k in _SINGLE:
        psi = np.tensordot(_SINGLE[k], psi, axes=([1], [q[0]]))
        return np.moveaxis(psi, 0, q[0])
    psi = psi.copy()
    idx = [slice(None)] * psi.ndim
    for c in q[:-1]:
        idx[c] = 1
    if k in ("CNOT", "CCX"):
        t = q[-1]
        sub = tuple(idx)
        block = psi[sub]
        # target axis shifts left by the number of fixed control axes before it
        t_axis = t - sum(1 for c in q[:-1] if c < t)
        psi[sub] = np.flip(block, axis=t_axis)
    elif k in ("CZ", "CCZ"):
        idx[q[-1]] = 1
        psi[tuple(idx)] *= -1
    else:
        raise CircuitError(f"{k} is not unitary")
    return psi


def simulate_unitary(c: Circuit) -> np.ndarray:
    """Exact ``2^n x 2^n`` unitary; column ``j`` is the image of basis state ``j``."""
    if c.n_qubits > MAX_QUBITS:
        raise CircuitError(f"{c.n_qubits} qubits exceeds the limit of {MAX_QUBITS}")
    if any(g.is_measurement or g.guard is not None for g in c.gates):
        raise CircuitError("circuit contains measurements or classical control")
    n = c.n_qubits
    dim = 2**n
    # batch of all basis states along a trailing axis
    psi = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    for g in c.gates:
        psi = _apply(psi, g, n)
    return psi.reshape(dim, dim)


def _project(psi: np.ndarray, qubit: int, basis: str, outcome: int) -> np.ndarray:
    """Unnormalized projection of ``psi`` (shape (2,)*n) onto an outcome."""
    if basis == "Z":
        out = np.zeros_like(psi)
        idx = [slice(None)] * psi.ndim
        idx[qubit] = outcome
        out[tuple(idx)] = psi[tuple(idx)]
        return out
    vec = np.array([_S2, -_S2 if outcome else _S2], dtype=complex)
    proj = np.outer(vec, vec.conj())
    return np.moveaxis(np.tensordot(proj, psi, axes=([1], [qubit])), 0, qubit)


@dataclass
class Branch:
    bits: tuple[int, ...]
    probability: float
    state: DenseState


def _check_size(c: Circuit, state: DenseState) -> None:
    if c.n_qubits > MAX_QUBITS:
        raise CircuitError(f"{c.n_qubits} qubits exceeds the limit of {MAX_QUBITS}")
    if state.n_qubits != c.n_qubits:
        raise CircuitError("input state size does not match the circuit")


def enumerate_branches(c: Circuit, state: DenseState, cutoff: float = 1e-14) -> list[Branch]:
    """Every measurement record with its Born probability and post-feedback
    state (records with probability below ``cutoff`` are dropped)."""
    _check_size(c, state)
    n = c.n_qubits
    live = [(np.array(state.amplitudes).reshape((2,) * n), [0] * c.n_cbits)]
    for g in c.gates:
        nxt = []
        for psi, bits in live:
            if g.is_measurement:
                for outcome in (0, 1):
                    proj = _project(psi, g.qubits[0], g.kind[-1], outcome)
                    if np.vdot(proj, proj).real > cutoff:
                        nb = list(bits)
                        nb[g.cbit] = outcome
                        nxt.append((proj, nb))
            elif g.guard is None or bits[g.guard]:
                nxt.append((_apply(psi, g, n), bits))
            else:
                nxt.append((psi, bits))
        live = nxt
    out = []
    for psi, bits in live:
        p = float(np.vdot(psi, psi).real)
        out.append(Branch(tuple(bits), p, DenseState(psi.ravel() / np.sqrt(p))))
    return out


def simulate_with_measurements(c: Circuit, state: DenseState, seed: int) -> tuple[DenseState, tuple[int, ...]]:
    """One Born-rule sample of the circuit, reproducible per seed."""
    _check_size(c, state)
    rng = np.random.default_rng(seed)
    n = c.n_qubits
    psi = np.array(state.amplitudes).reshape((2,) * n)
    bits = [0] * c.n_cbits
    for g in c.gates:
        if g.is_measurement:
            p0 = _project(psi, g.qubits[0], g.kind[-1], 0)
            prob0 = float(np.vdot(p0, p0).real)
            outcome = int(rng.random() >= prob0)
            psi = p0 if outcome == 0 else _project(psi, g.qubits[0], g.kind[-1], 1)
            psi = psi / np.sqrt(np.vdot(psi, psi).real)
            bits[g.cbit] = outcome
        elif g.guard is None or bits[g.guard]:
            psi = _apply(psi, g, n)
    return DenseState(psi.ravel()), tuple(bits)


# reference gates and comparisons -------------------------------------------


def ccx_matrix() -> np.ndarray:
    m = np.eye(8, dtype=complex)
    m[[6, 7]] = m[[7, 6]]
    return m


def phase_normalized(m: np.ndarray) -> np.ndarray:
    """Divide by the phase of the first nonzero entry (column-major scan)."""
    flat = m.T.ravel()
    j = int(np.flatnonzero(np.abs(flat) > 1e-12)[0])
    return m * (abs(flat[j]) / flat[j])


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = 1e-10) -> float:
    """Max entry deviation after phase normalization (compare with ``atol``)."""
    return float(np.max(np.abs(phase_normalized(a) - phase_normalized(b))))


def register_deviation(state: DenseState, register: list[int], expected: np.ndarray) -> float:
    """How far ``state`` is from ``expected`` on ``register`` times anything on
    the other qubits.

    The state is reshaped as (register, rest); the best product
    ``expected (x) r`` has ``r = expected^dagger M``, and the max amplitude
    deviation from it is returned (invariant under global phase).
    """
    n = state.n_qubits
    rest = [q for q in range(n) if q not in register]
    psi = state.amplitudes.reshape((2,) * n).transpose(register + rest).reshape(2 ** len(register), -1)
    r = expected.conj() @ psi
    return float(np.max(np.abs(psi - np.outer(expected, r))))


# Toffoli circuits ---------------------------------------------------------------------------

_STANDARD = [
    ("H", (2,)),
    ("CNOT", (1, 2)),
    ("T_DAG", (2,)),
    ("CNOT", (0, 2)),
    ("T", (2,)),
    ("CNOT", (1, 2)),
    ("T_DAG", (2,)),
    ("CNOT", (0, 2)),
    ("T", (1,)),
    ("T", (2,)),
    ("H", (2,)),
    ("CNOT", (0, 1)),
    ("T", (0,)),
    ("T_DAG", (1,)),
    ("CNOT", (0, 1)),
]


def toffoli_decomposition_standard(controls: tuple[int, int] = (0, 1), target: int = 2) -> Circuit:
    """CCX as H, the 7-T / 6-CNOT CCZ core, H."""
    relabel = {0: controls[0], 1: controls[1], 2: target}
    return Circuit(3, tuple(Gate(k, tuple(relabel[q] for q in qs)) for k, qs in _STANDARD))


def commute_hadamards_through_target(c: Circuit, target: int = 2) -> Circuit:
    """Drop the H pair wrapping ``target``: T -> TX, T_DAG -> TX_DAG and CNOTs
    onto the target -> CZ.  Gates after the closing H must avoid the target."""
    gates = list(c.gates)
    hs = [i for i, g in enumerate(gates) if g.kind == "H"]
    if len(hs) != 2 or any(gates[i].qubits != (target,) for i in hs):
        raise CircuitError("expected exactly two Hadamards, both on the target")
    first, last = hs
    out = list(gates[:first])
    swap = {"T": "TX", "T_DAG": "TX_DAG"}
    for g in gates[first + 1 : last]:
        if target not in g.qubits:
            out.append(g)
        elif g.kind in swap:
            out.append(Gate(swap[g.kind], g.qubits))
        elif g.kind == "CNOT" and g.qubits[1] == target:
            out.append(Gate("CZ", g.qubits))
        else:
            raise CircuitError(f"cannot conjugate {g} by H on the target")
    for g in gates[last + 1 :]:
        if target in g.qubits:
            raise CircuitError(f"{g} touches the target after the closing H")
        out.append(g)
    return Circuit(c.n_qubits, tuple(out), c.n_cbits)


def toffoli_decomposition_hybrid() -> Circuit:
    """The standard decomposition with the target Hadamards commuted away: the
    controls see only T, T_DAG and CNOT/CZ endpoints, the target only TX,
    TX_DAG and CZ."""
    return commute_hadamards_through_target(toffoli_decomposition_standard())


def toffoli_state() -> DenseState:
    """CCX |+>|+>|0>."""
    plus = np.array([_S2, _S2], dtype=complex)
    psi = np.kron(np.kron(plus, plus), np.array([1, 0], dtype=complex))
    return DenseState(ccx_matrix() @ psi)


# Feedback table (bits: 0 = Z result on a, 1 = Z result on b, 2 = X result on c).
# After the couplings the ancilla holds |a+m0, b+m1, (a+m0)(b+m1) + c> and the
# record carries a phase (-1)^(m2 c).  The guarded CNOT/X pairs undo the bit
# flips in an order that needs only single-bit guards; Z plus CZ undoes the
# phase because c = t + a b on the corrected register.
GADGET_FEEDBACK = (
    ("CNOT", (1, 2), 0),
    ("X", (0,), 0),
    ("CNOT", (0, 2), 1),
    ("X", (1,), 1),
    ("Z", (2,), 2),
    ("CZ", (0, 1), 2),
)


def toffoli_gadget() -> Circuit:
    """Toffoli by teleportation through a Toffoli state.

    Qubits 0-2 hold the ancilla ``CCX|+>|+>|0>`` (prepare with
    :func:`toffoli_state`), qubits 3-5 the input ``|a>|b>|c>``.  The ancilla
    controls are copied onto the control inputs, the input target is copied
    onto the ancilla target, the control inputs are measured in Z and the
    target input in X, and the feedback in :data:`GADGET_FEEDBACK` leaves
    ``|a, b, ab + c>`` on qubits 0-2.
    """
    gates = [
        Gate("CNOT", (0, 3)),
        Gate("CNOT", (1, 4)),
        Gate("CNOT", (5, 2)),
        Gate("MEAS_Z", (3,), cbit=0),
        Gate("MEAS_Z", (4,), cbit=1),
        Gate("MEAS_X", (5,), cbit=2),
    ]
    gates += [Gate(kind, qs, guard=bit) for kind, qs, bit in GADGET_FEEDBACK]
    return Circuit(6, tuple(gates), n_cbits=3)


def gadget_input(a: int, b: int, c: int) -> DenseState:
    return toffoli_state().tensor(DenseState.basis([a, b, c]))


def check_identities(atol: float = 1e-10) -> dict[str, float]:
    """Max deviations for the decomposition and gadget identities."""
    ccx = ccx_matrix()
    out = {
        "fig2_vs_ccx": equal_up_to_phase(simulate_unitary(toffoli_decomposition_standard()), ccx),
        "fig2_swapped_controls_vs_ccx": equal_up_to_phase(
            simulate_unitary(toffoli_decomposition_standard(controls=(1, 0))), ccx
        ),
        "fig3_vs_ccx": equal_up_to_phase(simulate_unitary(toffoli_decomposition_hybrid()), ccx),
    }
    gadget = toffoli_gadget()
    worst = 0.0
    for a, b, c in product((0, 1), repeat=3):
        expected = DenseState.basis([a, b, (a & b) ^ c]).amplitudes
        for br in enumerate_branches(gadget, gadget_input(a, b, c)):
            worst = max(worst, register_deviation(br.state, [0, 1, 2], expected))
    out["gadget_branches"] = worst
    return out
