"""The 24-element single-qubit Clifford group (modulo global phase).

Each element is stored by its conjugation action on the Paulis: ``C X C^dag``
and ``C Z C^dag`` are signed Paulis, which fixes ``C`` up to a phase.  The
canonical name spells this out, e.g. ``"+Z+X"`` is the Hadamard.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

PAULI_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
BITS_PAULI = {v: k for k, v in PAULI_BITS.items()}

_MAT = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# (P, Q) -> (k, R) with P @ Q = i**k R
_PRODUCT = {}
for _p in "IXYZ":
    for _q in "IXYZ":
        _m = _MAT[_p] @ _MAT[_q]
        for _r in "IXYZ":
            for _k in range(4):
                if np.allclose(_m, (1j ** _k) * _MAT[_r]):
                    _PRODUCT[_p, _q] = (_k, _r)


def pauli_product(p: str, q: str) -> tuple[int, str]:
    """Return ``(k, r)`` such that ``p * q == i**k * r`` for single-qubit Paulis."""
    return _PRODUCT[p, q]


@dataclass(frozen=True)
class Clifford1:
    """A single-qubit Clifford up to global phase.

    ``x_image`` and ``z_image`` are ``(pauli, sign)`` pairs giving
    ``C X C^dag`` and ``C Z C^dag``.
    """

    x_image: tuple[str, int]
    z_image: tuple[str, int]
    y_image: tuple[str, int] = field(init=False, compare=False)

    def __post_init__(self) -> None:
        (px, sx), (pz, sz) = self.x_image, self.z_image
        if px == pz or "I" in (px, pz) or sx not in (1, -1) or sz not in (1, -1):
            raise ValueError(f"not a Clifford: X->{self.x_image}, Z->{self.z_image}")
        # Y = i X Z, so C Y C^dag = i (C X C^dag)(C Z C^dag)
        k, r = pauli_product(px, pz)
        phase = (1j ** (k + 1)) * sx * sz
        object.__setattr__(self, "y_image", (r, int(round(phase.real))))

    @property
    def name(self) -> str:
        (px, sx), (pz, sz) = self.x_image, self.z_image
        return f"{'+' if sx > 0 else '-'}{px}{'+' if sz > 0 else '-'}{pz}"

    def __repr__(self) -> str:
        return f"Clifford1({self.name})"

    def image(self, pauli: str) -> tuple[str, int]:
        """Conjugate a single-qubit Pauli label; returns ``(pauli, sign)``."""
        if pauli == "I":
            return ("I", 1)
        return {"X": self.x_image, "Y": self.y_image, "Z": self.z_image}[pauli]

    @property
    def symplectic_class(self) -> tuple[str, str]:
        """The unsigned action, one of 6 permutations of X, Y, Z."""
        return (self.x_image[0], self.z_image[0])

    @property
    def is_identity(self) -> bool:
        return self.x_image == ("X", 1) and self.z_image == ("Z", 1)

    @property
    def is_pauli(self) -> bool:
        return self.symplectic_class == ("X", "Z")

    @property
    def is_diagonal(self) -> bool:
        """True when the Clifford commutes with Z (and hence with CZ)."""
        return self.z_image == ("Z", 1)

    def then(self, other: Clifford1) -> Clifford1:
        """The Clifford ``other * self``: apply ``self`` first, then ``other``."""
        return _compose(other, self)

    def __matmul__(self, other: Clifford1) -> Clifford1:
        # operator order: (A @ B) applies B first
        return _compose(self, other)

    def inverse(self) -> Clifford1:
        return _INVERSE[self]

    def matrix(self) -> np.ndarray:
        """A 2x2 unitary representative (global phase arbitrary)."""
        return _MATRIX[self]

    @classmethod
    def from_matrix(cls, u: np.ndarray) -> Clifford1:
        u = np.asarray(u, dtype=complex)
        images = []
        for p in ("X", "Z"):
            conj = u @ _MAT[p] @ u.conj().T
            for r in "XYZ":
                for s in (1, -1):
                    if np.allclose(conj, s * _MAT[r], atol=1e-9):
                        images.append((r, s))
        if len(images) != 2:
            raise ValueError("matrix is not a single-qubit Clifford")
        return cls(images[0], images[1])

    @classmethod
    def from_name(cls, name: str) -> Clifford1:
        name = ALIASES.get(name, name)
        if len(name) != 4:
            raise ValueError(f"unknown Clifford name {name!r}")
        sign = {"+": 1, "-": -1}
        return cls((name[1], sign[name[0]]), (name[3], sign[name[2]]))


def _compose(a: Clifford1, b: Clifford1) -> Clifford1:
    def img(p: str) -> tuple[str, int]:
        q, s = b.image(p)
        r, t = a.image(q)
        return (r, s * t)

    return Clifford1(img("X"), img("Z"))


def _build_group() -> tuple[list[Clifford1], dict[Clifford1, np.ndarray]]:
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    s = np.array([[1, 0], [0, 1j]], dtype=complex)
    frontier = [np.eye(2, dtype=complex)]
    mats: dict[Clifford1, np.ndarray] = {}
    while frontier:
        nxt = []
        for m in frontier:
            c = Clifford1.from_matrix(m)
            if c in mats:
                continue
            mats[c] = m
            nxt.extend([h @ m, s @ m])
        frontier = nxt
    group = sorted(mats, key=lambda c: c.name)
    return group, mats


CLIFFORDS, _MATRIX = _build_group()
_INVERSE = {a: b for a in CLIFFORDS for b in CLIFFORDS if (a @ b).is_identity}

I = Clifford1(("X", 1), ("Z", 1))
X = Clifford1(("X", 1), ("Z", -1))
Y = Clifford1(("X", -1), ("Z", -1))
Z = Clifford1(("X", -1), ("Z", 1))
H = Clifford1(("Z", 1), ("X", 1))
S = Clifford1(("Y", 1), ("Z", 1))
SDG = S.inverse()
# exp(-i pi/4 X) and exp(+i pi/4 Z), the two factors of the local complementation unitary
SQRT_X = Clifford1.from_matrix(np.cos(np.pi / 4) * _MAT["I"] - 1j * np.sin(np.pi / 4) * _MAT["X"])
SQRT_Z = Clifford1.from_matrix(np.cos(np.pi / 4) * _MAT["I"] + 1j * np.sin(np.pi / 4) * _MAT["Z"])

ALIASES = {
    "I": I.name,
    "X": X.name,
    "Y": Y.name,
    "Z": Z.name,
    "H": H.name,
    "S": S.name,
    "SDG": SDG.name,
    "SQRT_X": SQRT_X.name,
    "SQRT_X_DG": SQRT_X.inverse().name,
    "SQRT_Z": SQRT_Z.name,
    "SQRT_Z_DG": SQRT_Z.inverse().name,
}


@lru_cache(maxsize=None)
def by_symplectic_class() -> dict[tuple[str, str], list[Clifford1]]:
    """Group the 24 Cliffords into 6 cosets of the Pauli group."""
    out: dict[tuple[str, str], list[Clifford1]] = {}
    for c in CLIFFORDS:
        out.setdefault(c.symplectic_class, []).append(c)
    return out
