"""Exact stabilizer-tableau simulation used to certify graph rewrites.

A :class:`StabilizerTableau` holds ``n`` commuting, independent Pauli
generators over labelled qubits in the usual binary symplectic form (``x``,
``z`` bit matrices and one sign bit per row, ``Y`` stored as ``x=z=1``).
Qubits can be appended (``|+>`` preparation) and dropped after measurement,
so the tableau follows a network execution qubit by qubit.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from itertools import product
from typing import NamedTuple

import numpy as np

from graphdist import clifford
from graphdist import graph_core as gc
from graphdist.clifford import PAULI_BITS, Clifford1
from graphdist.graph_core import LocalCliffordFrame, SimpleGraph

MAX_QUBITS = 16
MAX_SUPPORT = 8


class OracleError(Exception):
    pass


class ImpossibleOutcome(OracleError):
    pass


class NotEquivalent(OracleError):
    pass


class SearchBudgetExceeded(OracleError):
    pass


class OracleBudgetExceeded(OracleError):
    pass


class MeasurementRecord(NamedTuple):
    qubit: object
    basis: str
    outcome: int
    deterministic: bool


def _g(x1, z1, x2, z2) -> np.ndarray:
    """Exponent of ``i`` picked up per qubit when multiplying two Paulis."""
    x1, z1, x2, z2 = (np.asarray(a, dtype=np.int64) for a in (x1, z1, x2, z2))
    return np.where(
        (x1 == 1) & (z1 == 1),
        z2 - x2,
        np.where(
            (x1 == 1) & (z1 == 0),
            z2 * (2 * x2 - 1),
            np.where((x1 == 0) & (z1 == 1), x2 * (1 - 2 * z2), 0),
        ),
    )


def _mul(x1, z1, r1, x2, z2, r2):
    """Product of two commuting signed Paulis; returns ``(x, z, r)``."""
    e = (2 * int(r1) + 2 * int(r2) + int(_g(x1, z1, x2, z2).sum())) % 4
    if e % 2:
        raise OracleError("multiplied anticommuting Paulis")
    return x1 ^ x2, z1 ^ z2, e // 2


@dataclass(frozen=True, eq=False)
class StabilizerTableau:
    labels: tuple
    x: np.ndarray
    z: np.ndarray
    r: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise OracleError("duplicate qubit labels")
        for name in ("x", "z"):
            arr = np.asarray(getattr(self, name), dtype=np.uint8).reshape(n, n)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "r", np.asarray(self.r, dtype=np.uint8).reshape(n))

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, q) -> int:
        try:
            return self.labels.index(q)
        except ValueError:
            raise OracleError(f"qubit {q!r} not in tableau") from None

    def copy(self) -> StabilizerTableau:
        return StabilizerTableau(self.labels, self.x.copy(), self.z.copy(), self.r.copy())

    def generators(self) -> list[str]:
        """Human-readable generators like ``+XZI``, qubits in label order."""
        out = []
        for i in range(self.n):
            s = "-" if self.r[i] else "+"
            s += "".join(
                clifford.BITS_PAULI[int(self.x[i, j]), int(self.z[i, j])] for j in range(self.n)
            )
            out.append(s)
        return out

    def __repr__(self) -> str:
        return f"StabilizerTableau(labels={self.labels!r}, generators={self.generators()!r})"

    def check(self) -> None:
        """Raise unless generators commute pairwise and are independent."""
        x = self.x.astype(np.int64)
        z = self.z.astype(np.int64)
        comm = (x @ z.T + z @ x.T) % 2
        if comm.any():
            raise OracleError("generators do not commute")
        if _rank(np.hstack([self.x, self.z])) != self.n:
            raise OracleError("generators are not independent")

    # -- comparison -----------------------------------------------------

    def canonical(self) -> StabilizerTableau:
        """Labels sorted, generators in reduced row-echelon form.

        Two tableaux describe the same state iff their canonical forms agree.
        """
        order = sorted(range(self.n), key=lambda i: self.labels[i])
        labels = tuple(self.labels[i] for i in order)
        x = self.x[:, order].copy()
        z = self.z[:, order].copy()
        r = self.r.copy()
        _rref(x, z, r)
        return StabilizerTableau(labels, x, z, r)

    def same_state(self, other: StabilizerTableau) -> bool:
        if set(self.labels) != set(other.labels):
            return False
        a, b = self.canonical(), other.canonical()
        return (
            np.array_equal(a.x, b.x) and np.array_equal(a.z, b.z) and np.array_equal(a.r, b.r)
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, StabilizerTableau):
            return NotImplemented
        return self.same_state(other)

    __hash__ = None

    def pauli_sign(self, paulis: Mapping) -> int | None:
        """Sign with which a Pauli string lies in the stabilizer group.

        ``paulis`` maps labels to ``"X"``/``"Y"``/``"Z"``.  Returns +1 or -1,
        or ``None`` when neither sign is a stabilizer.
        """
        px = np.zeros(self.n, dtype=np.uint8)
        pz = np.zeros(self.n, dtype=np.uint8)
        for q, p in paulis.items():
            j = self.index(q)
            px[j], pz[j] = PAULI_BITS[p]
        return self._sign_of(px, pz)

    def _sign_of(self, px: np.ndarray, pz: np.ndarray) -> int | None:
        x, z, r, pivots = self._echelon()
        resid_x, resid_z = px.copy(), pz.copy()
        ax = np.zeros(self.n, dtype=np.uint8)
        az = np.zeros(self.n, dtype=np.uint8)
        ar = 0
        for i, col in enumerate(pivots):
            bit = resid_x[col] if col < self.n else resid_z[col - self.n]
            if bit:
                ax, az, ar = _mul(ax, az, ar, x[i], z[i], r[i])
                resid_x ^= x[i]
                resid_z ^= z[i]
        if resid_x.any() or resid_z.any():
            return None
        return -1 if ar else 1

    def _echelon(self):
        cache = self.__dict__.get("_echelon_cache")
        if cache is None:
            x, z, r = self.x.copy(), self.z.copy(), self.r.copy()
            pivots = _rref(x, z, r)
            cache = (x, z, r, pivots)
            object.__setattr__(self, "_echelon_cache", cache)
        return cache

    def to_statevector(self) -> np.ndarray:
        """Dense state (qubit 0 of ``labels`` is the most significant bit)."""
        if self.n > 12:
            raise OracleBudgetExceeded("dense conversion limited to 12 qubits")
        dim = 2 ** self.n
        proj = np.eye(dim, dtype=complex)
        for i in range(self.n):
            p = _pauli_matrix(self.x[i], self.z[i], self.r[i])
            proj = proj @ (np.eye(dim) + p) / 2
        for k in range(dim):
            vec = proj[:, k]
            norm = np.linalg.norm(vec)
            if norm > 1e-9:
                return vec / norm
        raise OracleError("empty stabilizer space")


def _pauli_matrix(xrow, zrow, sign) -> np.ndarray:
    mats = {
        (0, 0): np.eye(2),
        (1, 0): np.array([[0, 1], [1, 0]]),
        (0, 1): np.array([[1, 0], [0, -1]]),
        (1, 1): np.array([[0, -1j], [1j, 0]]),
    }
    out = np.array([[1.0 + 0j]])
    for a, b in zip(xrow, zrow):
        out = np.kron(out, mats[int(a), int(b)])
    return -out if sign else out


def _rank(m: np.ndarray) -> int:
    m = m.copy() % 2
    rank = 0
    rows, cols = m.shape
    for c in range(cols):
        piv = next((i for i in range(rank, rows) if m[i, c]), None)
        if piv is None:
            continue
        m[[rank, piv]] = m[[piv, rank]]
        for i in range(rows):
            if i != rank and m[i, c]:
                m[i] ^= m[rank]
        rank += 1
    return rank


def _rref(x: np.ndarray, z: np.ndarray, r: np.ndarray) -> list[int]:
    """In-place row reduction over columns ``[x | z]``; returns pivot columns."""
    n = x.shape[0]
    row = 0
    pivots = []
    for col in range(2 * n):
        bits = x[:, col] if col < n else z[:, col - n]
        cand = [i for i in range(row, n) if bits[i]]
        if not cand:
            continue
        piv = cand[0]
        if piv != row:
            for arr in (x, z, r):
                arr[[row, piv]] = arr[[piv, row]]
        for i in range(n):
            if i != row and (x[i, col] if col < n else z[i, col - n]):
                x[i], z[i], r[i] = _mul(x[row], z[row], r[row], x[i], z[i], r[i])
        pivots.append(col)
        row += 1
        if row == n:
            break
    return pivots


# -- construction -----------------------------------------------------------


def empty_tableau() -> StabilizerTableau:
    return StabilizerTableau((), np.zeros((0, 0)), np.zeros((0, 0)), np.zeros(0))


def tableau_from_graph(g: SimpleGraph, order: Iterable | None = None) -> StabilizerTableau:
    """Graph state ``|G>``: generators ``X_a prod_{b in N_a} Z_b``."""
    labels = tuple(order) if order is not None else tuple(sorted(g.vertices))
    if set(labels) != set(g.vertices):
        raise OracleError("label order does not match graph vertices")
    n = len(labels)
    idx = {v: i for i, v in enumerate(labels)}
    x = np.eye(n, dtype=np.uint8)
    z = np.zeros((n, n), dtype=np.uint8)
    for a, b in g.edges:
        z[idx[a], idx[b]] = 1
        z[idx[b], idx[a]] = 1
    return StabilizerTableau(labels, x, z, np.zeros(n, dtype=np.uint8))


def tableau_from_state(g: SimpleGraph, frame: LocalCliffordFrame) -> StabilizerTableau:
    """The physical state ``(prod_v C_v)|G>`` for a graph plus Clifford frame."""
    t = tableau_from_graph(g)
    for v in frame:
        t = apply_local_clifford(t, v, frame[v])
    return t


def add_plus(t: StabilizerTableau, label) -> StabilizerTableau:
    """Append a fresh qubit in ``|+>``."""
    if label in t.labels:
        raise OracleError(f"qubit {label!r} already present")
    n = t.n
    x = np.zeros((n + 1, n + 1), dtype=np.uint8)
    z = np.zeros((n + 1, n + 1), dtype=np.uint8)
    x[:n, :n] = t.x
    z[:n, :n] = t.z
    x[n, n] = 1
    r = np.append(t.r, 0)
    return StabilizerTableau(t.labels + (label,), x, z, r)


def drop_qubit(t: StabilizerTableau, label) -> StabilizerTableau:
    """Remove a qubit that is in a product state with the rest."""
    j = t.index(label)
    x, z, r = t.x.copy(), t.z.copy(), t.r.copy()
    rows = [i for i in range(t.n) if x[i, j] or z[i, j]]
    if not rows:
        raise OracleError(f"qubit {label!r} carries no stabilizer")
    k = rows[0]
    pk = (x[k, j], z[k, j])
    for i in rows[1:]:
        if (x[i, j], z[i, j]) != pk:
            raise OracleError(f"qubit {label!r} is entangled; cannot drop")
        x[i], z[i], r[i] = _mul(x[k], z[k], r[k], x[i], z[i], r[i])
    keep_rows = [i for i in range(t.n) if i != k]
    keep_cols = [c for c in range(t.n) if c != j]
    return StabilizerTableau(
        tuple(t.labels[c] for c in keep_cols),
        x[np.ix_(keep_rows, keep_cols)],
        z[np.ix_(keep_rows, keep_cols)],
        r[keep_rows],
    )


# -- gates --------------------------------------------------------------------


def apply_cz(t: StabilizerTableau, a, b) -> StabilizerTableau:
    i, j = t.index(a), t.index(b)
    if i == j:
        raise OracleError("CZ needs two distinct qubits")
    x, z, r = t.x.copy(), t.z.copy(), t.r.copy()
    r ^= x[:, i] & x[:, j] & (z[:, i] ^ z[:, j])
    z[:, i] ^= x[:, j]
    z[:, j] ^= x[:, i]
    return StabilizerTableau(t.labels, x, z, r)


def _clifford_lookup(c: Clifford1):
    nx = np.zeros(4, dtype=np.uint8)
    nz = np.zeros(4, dtype=np.uint8)
    flip = np.zeros(4, dtype=np.uint8)
    for p in "IXYZ":
        bx, bz = PAULI_BITS[p]
        q, s = c.image(p)
        code = bx + 2 * bz
        nx[code], nz[code] = PAULI_BITS[q]
        flip[code] = s < 0
    return nx, nz, flip


_LOOKUP = {c: _clifford_lookup(c) for c in clifford.CLIFFORDS}


def apply_local_clifford(t: StabilizerTableau, a, c: Clifford1) -> StabilizerTableau:
    j = t.index(a)
    nx, nz, flip = _LOOKUP[c]
    code = t.x[:, j] + 2 * t.z[:, j]
    x, z, r = t.x.copy(), t.z.copy(), t.r.copy()
    x[:, j] = nx[code]
    z[:, j] = nz[code]
    r ^= flip[code]
    return StabilizerTableau(t.labels, x, z, r)


def apply_lc_unitary(t: StabilizerTableau, a, neighbors: Iterable) -> StabilizerTableau:
    """``exp(-i pi/4 X_a) prod_b exp(i pi/4 Z_b)``: local complementation at ``a``."""
    t = apply_local_clifford(t, a, clifford.SQRT_X)
    for b in neighbors:
        t = apply_local_clifford(t, b, clifford.SQRT_Z)
    return t


def measure_pauli(
    t: StabilizerTableau,
    qubit,
    basis: str,
    forced_outcome: int | None = None,
    rng: np.random.Generator | None = None,
    drop: bool = True,
) -> tuple[StabilizerTableau, MeasurementRecord]:
    """Destructively measure ``qubit`` in the X, Y or Z basis.

    The measured qubit is removed from the returned tableau unless ``drop``
    is false.  A forced outcome of probability zero raises
    :class:`ImpossibleOutcome`.
    """
    if forced_outcome not in (None, 1, -1):
        raise ValueError(f"forced outcome must be +1, -1 or None, got {forced_outcome!r}")
    j = t.index(qubit)
    px, pz = PAULI_BITS[basis]
    anti = np.flatnonzero((t.x[:, j] & pz) ^ (t.z[:, j] & px))
    x, z, r = t.x.copy(), t.z.copy(), t.r.copy()
    if anti.size:
        k = anti[0]
        for i in anti[1:]:
            x[i], z[i], r[i] = _mul(x[k], z[k], r[k], x[i], z[i], r[i])
        if forced_outcome is None:
            rng = rng if rng is not None else np.random.default_rng()
            outcome = 1 if rng.random() < 0.5 else -1
        else:
            outcome = forced_outcome
        x[k] = 0
        z[k] = 0
        x[k, j], z[k, j] = px, pz
        r[k] = outcome < 0
        out = StabilizerTableau(t.labels, x, z, r)
        deterministic = False
    else:
        px_row = np.zeros(t.n, dtype=np.uint8)
        pz_row = np.zeros(t.n, dtype=np.uint8)
        px_row[j], pz_row[j] = px, pz
        outcome = t._sign_of(px_row, pz_row)
        if forced_outcome is not None and forced_outcome != outcome:
            raise ImpossibleOutcome(
                f"{basis}-measurement of {qubit!r} is deterministic with outcome {outcome:+d}"
            )
        out = t
        deterministic = True
    if drop:
        out = drop_qubit(out, qubit)
    return out, MeasurementRecord(qubit, basis, outcome, deterministic)


# -- corrections ---------------------------------------------------------------

_UNSIGNED = {}
for _cls in clifford.by_symplectic_class():
    _ix, _iz = _cls
    _iy = ({"X", "Y", "Z"} - {_ix, _iz}).pop()
    _UNSIGNED[_cls] = {
        (0, 0): (0, 0),
        (1, 0): PAULI_BITS[_ix],
        (0, 1): PAULI_BITS[_iz],
        (1, 1): PAULI_BITS[_iy],
    }
_CLASSES = sorted(_UNSIGNED)
_PAULI_CLIFFORD = {
    (0, 0): clifford.I,
    (1, 0): clifford.X,
    (0, 1): clifford.Z,
    (1, 1): clifford.Y,
}


def _bitmask(m: np.ndarray) -> int:
    return int.from_bytes(np.packbits(m.astype(np.uint8).ravel()).tobytes(), "big")


def apply_frame(t: StabilizerTableau, frame: Mapping | LocalCliffordFrame) -> StabilizerTableau:
    items = frame.entries.items() if isinstance(frame, LocalCliffordFrame) else frame.items()
    for v, c in items:
        t = apply_local_clifford(t, v, c)
    return t


def find_correction(
    t_actual: StabilizerTableau,
    g_target: SimpleGraph,
    support: Iterable,
    max_support: int = MAX_SUPPORT,
    hint: Mapping | None = None,
) -> LocalCliffordFrame:
    """Single-qubit Cliffords on ``support`` taking ``t_actual`` to ``|g_target>``.

    The search is exhaustive over all ``24**k`` assignments: the Pauli-free
    part (6 choices per qubit) is matched meet-in-the-middle on the
    commutation pattern, and the remaining Pauli part is solved as a linear
    system over GF(2).  ``hint`` is tried first.  Raises
    :class:`NotEquivalent` when no assignment exists.
    """
    support = sorted(set(support))
    if len(support) > max_support:
        raise SearchBudgetExceeded(f"support of size {len(support)} exceeds {max_support}")
    if set(t_actual.labels) != set(g_target.vertices):
        raise NotEquivalent("qubit sets differ")
    if not set(support) <= set(t_actual.labels):
        raise OracleError("support outside the tableau")
    target = tableau_from_graph(g_target, order=t_actual.labels)
    if t_actual.same_state(target):
        return LocalCliffordFrame()
    if hint:
        frame = LocalCliffordFrame(dict(hint))
        if set(frame.entries) <= set(support) and apply_frame(t_actual, frame).same_state(target):
            return frame

    n = t_actual.n
    col = {q: t_actual.index(q) for q in support}
    kx = target.x.astype(np.uint8)
    kz = target.z.astype(np.uint8)
    gx, gz = t_actual.x, t_actual.z

    # commutation matrix C[a, m] between (transformed) target generator a and actual generator m
    def contribution(j: int, mx: np.ndarray, mz: np.ndarray) -> np.ndarray:
        return (np.outer(mx, gz[:, j]) ^ np.outer(mz, gx[:, j])).astype(np.uint8)

    outside = [j for j in range(n) if t_actual.labels[j] not in col]
    base = np.zeros((n, n), dtype=np.uint8)
    for j in outside:
        base ^= contribution(j, kx[:, j], kz[:, j])
    masks = {}
    for q in support:
        j = col[q]
        masks[q] = []
        for cls in _CLASSES:
            table = _UNSIGNED[cls]
            mx = np.array([table[int(a), int(b)][0] for a, b in zip(kx[:, j], kz[:, j])], dtype=np.uint8)
            mz = np.array([table[int(a), int(b)][1] for a, b in zip(kx[:, j], kz[:, j])], dtype=np.uint8)
            masks[q].append(_bitmask(contribution(j, mx, mz)))
    c0 = _bitmask(base)

    half = len(support) // 2
    left, right = support[:half], support[half:]
    table_left: dict[int, list[tuple[int, ...]]] = {}
    for combo in product(range(6), repeat=len(left)):
        acc = 0
        for q, k in zip(left, combo):
            acc ^= masks[q][k]
        table_left.setdefault(acc, []).append(combo)
    for combo_r in product(range(6), repeat=len(right)):
        acc = c0
        for q, k in zip(right, combo_r):
            acc ^= masks[q][k]
        for combo_l in table_left.get(acc, ()):
            classes = dict(zip(left, combo_l)) | dict(zip(right, combo_r))
            frame = _solve_pauli_part(t_actual, target, support, classes)
            if frame is not None:
                return frame
    raise NotEquivalent("no local Clifford on the support reaches the target state")


def _solve_pauli_part(t_actual, target, support, classes) -> LocalCliffordFrame | None:
    n = t_actual.n
    reps = {q: clifford.by_symplectic_class()[_CLASSES[k]][0] for q, k in classes.items()}
    qx = np.zeros((n, n), dtype=np.uint8)
    qz = np.zeros((n, n), dtype=np.uint8)
    rhs = np.zeros(n, dtype=np.uint8)
    for a in range(n):
        eps = 1
        for j, q in enumerate(t_actual.labels):
            p = clifford.BITS_PAULI[int(target.x[a, j]), int(target.z[a, j])]
            if q in reps:
                p, s = reps[q].image(p)
                eps *= s
            qx[a, j], qz[a, j] = PAULI_BITS[p]
        sign = t_actual._sign_of(qx[a], qz[a])
        if sign is None:
            return None
        rhs[a] = (eps * sign) < 0
    # unknowns: (p_x, p_z) per support qubit; <P, Q_a> = sum p_x qz + p_z qx
    cols = [t_actual.index(q) for q in support]
    k = len(support)
    mat = np.zeros((n, 2 * k + 1), dtype=np.uint8)
    for i, j in enumerate(cols):
        mat[:, i] = qz[:, j]
        mat[:, k + i] = qx[:, j]
    mat[:, -1] = rhs
    sol = _gf2_solve(mat)
    if sol is None:
        return None
    frame = {}
    for i, q in enumerate(support):
        pauli = _PAULI_CLIFFORD[int(sol[i]), int(sol[k + i])]
        g = reps[q].then(pauli)
        frame[q] = g.inverse()
    out = LocalCliffordFrame(frame)
    if not apply_frame(t_actual, out).same_state(target):
        raise OracleError("internal error: correction failed re-verification")
    return out


def _gf2_solve(aug: np.ndarray) -> np.ndarray | None:
    m = aug.copy()
    rows, cols = m.shape
    nvar = cols - 1
    row = 0
    pivots = []
    for c in range(nvar):
        piv = next((i for i in range(row, rows) if m[i, c]), None)
        if piv is None:
            continue
        m[[row, piv]] = m[[piv, row]]
        for i in range(rows):
            if i != row and m[i, c]:
                m[i] ^= m[row]
        pivots.append(c)
        row += 1
    if any(m[i, -1] and not m[i, :-1].any() for i in range(rows)):
        return None
    sol = np.zeros(nvar, dtype=np.uint8)
    for i, c in enumerate(pivots):
        sol[c] = m[i, -1]
    return sol


# -- rewrite certification ------------------------------------------------------------

# (kind, outcome, degree) -> correction Cliffords in sorted-support order
_CORRECTION_MEMO: dict[tuple, tuple[Clifford1, ...]] = {}


@dataclass(frozen=True)
class Rewrite:
    """A graph-core rewrite: ``lc``, ``z``, ``y`` on one vertex or ``toggle`` on two."""

    kind: str
    vertices: tuple

    def __post_init__(self) -> None:
        arity = {"lc": 1, "z": 1, "y": 1, "toggle": 2}
        if arity.get(self.kind) != len(self.vertices):
            raise ValueError(f"bad rewrite {self.kind!r} on {self.vertices!r}")

    @classmethod
    def coerce(cls, op) -> Rewrite:
        if isinstance(op, Rewrite):
            return op
        kind, *vs = op
        return cls(kind, tuple(vs))

    def apply(self, g: SimpleGraph) -> SimpleGraph:
        fn = {
            "lc": gc.local_complement,
            "z": gc.z_measure_rewrite,
            "y": gc.y_measure_rewrite,
            "toggle": gc.toggle_edge,
        }[self.kind]
        return fn(g, *self.vertices)


def verify_rewrite(
    g_before: SimpleGraph,
    op,
    g_after: SimpleGraph | None = None,
    use_memo: bool = True,
) -> bool:
    """Check a rewrite against the physical operation it stands for.

    The physical operation (CZ, the local-complementation unitary, or a
    destructive Pauli measurement in every outcome branch) is run on
    ``|g_before>``; the result must equal ``|g_after>`` exactly after some
    single-qubit correction on the affected neighbourhood.  ``g_after``
    defaults to the graph-core rewrite result.
    """
    if len(g_before) > MAX_QUBITS:
        raise OracleBudgetExceeded(f"{len(g_before)} qubits exceeds the {MAX_QUBITS}-qubit oracle")
    op = Rewrite.coerce(op)
    if g_after is None:
        g_after = op.apply(g_before)
    t0 = tableau_from_graph(g_before)
    a = op.vertices[0]
    nb = sorted(gc.neighborhood(g_before, a))
    if op.kind == "toggle":
        branches = [(None, apply_cz(t0, *op.vertices))]
        support = sorted(op.vertices)
    elif op.kind == "lc":
        branches = [(None, apply_lc_unitary(t0, a, nb))]
        support = sorted([a, *nb])
    else:
        branches = []
        for outcome in (1, -1):
            try:
                t1, rec = measure_pauli(t0, a, op.kind.upper(), forced_outcome=outcome)
            except ImpossibleOutcome:
                continue
            branches.append((rec.outcome, t1))
        support = nb
    for outcome, t1 in branches:
        key = (op.kind, outcome, len(support))
        hint = None
        if use_memo and key in _CORRECTION_MEMO:
            hint = dict(zip(support, _CORRECTION_MEMO[key]))
        try:
            frame = find_correction(t1, g_after, support, hint=hint)
        except NotEquivalent:
            return False
        if use_memo:
            _CORRECTION_MEMO[key] = tuple(frame[q] for q in support)
    return True
