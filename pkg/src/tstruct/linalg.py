"""Exact dense linear algebra over a prime field or the rationals.

Matrices are numpy arrays: ``int64`` residues for small primes, ``object``
arrays of :class:`fractions.Fraction` (or Python ints) otherwise.  Every
routine returns freshly reduced arrays; nothing here ever touches floats.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

_SMALL_PRIME = 1 << 24


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class Field:
    """Coefficient field: ``Field(p)`` is F_p, ``Field(None)`` is Q."""

    p: int | None = 2

    def __post_init__(self):
        if self.p is not None and not _is_prime(self.p):
            raise ValueError(f"field characteristic {self.p} is not prime")

    @classmethod
    def parse(cls, spec: str) -> "Field":
        spec = spec.strip()
        if spec in ("Q", "QQ"):
            return cls(None)
        if spec == "F2":
            return cls(2)
        if spec.startswith("Fp:"):
            return cls(int(spec[3:]))
        if spec.startswith("F") and spec[1:].isdigit():
            return cls(int(spec[1:]))
        raise ValueError(f"unknown field {spec!r}")

    @property
    def name(self) -> str:
        if self.p is None:
            return "Q"
        return "F2" if self.p == 2 else f"Fp:{self.p}"

    @property
    def dtype(self):
        if self.p is not None and self.p < _SMALL_PRIME:
            return np.int64
        return object

    # -- construction -------------------------------------------------------

    def reduce(self, a) -> np.ndarray:
        a = np.asarray(a)
        if self.p is None:
            if a.dtype != object:
                a = a.astype(object)
            return a
        if self.dtype is object:
            return np.vectorize(lambda v: int(v) % self.p, otypes=[object])(a) if a.size else a.astype(object)
        return np.mod(a.astype(np.int64), self.p)

    def matrix(self, rows, shape: tuple[int, int] | None = None) -> np.ndarray:
        if self.p is None:
            conv = lambda v: Fraction(v) if isinstance(v, str) else (v if isinstance(v, Fraction) else Fraction(int(v)))
            a = np.array([[conv(v) for v in row] for row in rows], dtype=object)
        else:
            a = np.array([[_int_entry(v) for v in row] for row in rows], dtype=object)
        if shape is not None:
            a = a.reshape(shape)
        elif a.ndim != 2:
            a = a.reshape(len(rows), 0)
        return self.reduce(a)

    def zeros(self, m: int, n: int) -> np.ndarray:
        if self.dtype is object:
            a = np.empty((m, n), dtype=object)
            a.fill(Fraction(0) if self.p is None else 0)
            return a
        return np.zeros((m, n), dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        a = self.zeros(n, n)
        for i in range(n):
            a[i, i] = Fraction(1) if self.p is None else 1
        return a

    def random(self, rng, m: int, n: int) -> np.ndarray:
        if self.p is None:
            vals = [[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(m)]
            return np.array(vals, dtype=object).reshape(m, n)
        vals = [[rng.randrange(self.p) for _ in range(n)] for _ in range(m)]
        return self.reduce(np.array(vals, dtype=np.int64).reshape(m, n))

    # -- arithmetic ---------------------------------------------------------

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[1] == 0 or a.shape[0] == 0 or b.shape[1] == 0:
            return self.zeros(a.shape[0], b.shape[1])
        return self.reduce(a @ b)

    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.reduce(a + b)

    def sub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.reduce(a - b)

    def neg(self, a: np.ndarray) -> np.ndarray:
        return self.reduce(-a)

    def scale(self, c: int, a: np.ndarray) -> np.ndarray:
        return self.reduce(a * c)

    def kron(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        m, n = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
        if m == 0 or n == 0:
            return self.zeros(m, n)
        return self.reduce(np.kron(a, b))

    def inv_scalar(self, x):
        if self.p is None:
            return Fraction(1) / x
        return pow(int(x), self.p - 2, self.p)

    def is_zero(self, a: np.ndarray) -> bool:
        return a.size == 0 or not np.any(a != 0)

    def equal(self, a: np.ndarray, b: np.ndarray) -> bool:
        return a.shape == b.shape and (a.size == 0 or bool(np.all(a == b)))

    # -- elimination --------------------------------------------------------

    def rref(self, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form and pivot columns."""
        r = self.reduce(np.array(a, copy=True))
        if r.dtype == object:
            r = r.copy()
        m, n = r.shape
        pivots: list[int] = []
        row = 0
        for col in range(n):
            if row == m:
                break
            nz = np.nonzero(r[row:, col] != 0)[0]
            if nz.size == 0:
                continue
            piv = row + int(nz[0])
            if piv != row:
                r[[row, piv]] = r[[piv, row]]
            r[row] = self.reduce(r[row] * self.inv_scalar(r[row, col]))
            others = np.nonzero(r[:, col] != 0)[0]
            others = others[others != row]
            if others.size:
                r[others] = self.reduce(r[others] - np.outer(r[others, col], r[row]))
            pivots.append(col)
            row += 1
        return r, pivots

    def rank(self, a: np.ndarray) -> int:
        if a.size == 0:
            return 0
        return len(self.rref(a)[1])

    def nullspace(self, a: np.ndarray) -> np.ndarray:
        """Columns form a basis of ``{v : a v = 0}``."""
        m, n = a.shape
        if m == 0 or n == 0:
            return self.eye(n)
        r, pivots = self.rref(a)
        free = [c for c in range(n) if c not in pivots]
        basis = self.zeros(n, len(free))
        for j, f in enumerate(free):
            basis[f, j] = 1
            for i, pc in enumerate(pivots):
                basis[pc, j] = -r[i, f]
        return self.reduce(basis)

    def colspace(self, a: np.ndarray) -> np.ndarray:
        """Columns of ``a`` forming a basis of its column space."""
        if a.size == 0:
            return self.zeros(a.shape[0], 0)
        _, pivots = self.rref(a)
        return a[:, pivots]

    def left_kernel(self, a: np.ndarray) -> np.ndarray:
        """Rows form a basis of ``{y : y a = 0}``; a surjection with kernel ``im a``."""
        return self.nullspace(a.T).T.copy()

    def solve(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Some ``x`` with ``a x = b``; raises ``ValueError`` if none exists."""
        m, n = a.shape
        k = b.shape[1]
        if m == 0:
            return self.zeros(n, k)
        aug = np.concatenate([self.reduce(a), self.reduce(b)], axis=1)
        r, pivots = self.rref(aug)
        if any(pc >= n for pc in pivots):
            raise ValueError("inconsistent linear system")
        x = self.zeros(n, k)
        for i, pc in enumerate(pivots):
            x[pc] = r[i, n:]
        return self.reduce(x)

    def left_inverse(self, a: np.ndarray) -> np.ndarray:
        """``l`` with ``l a = I`` for ``a`` of full column rank."""
        return self.solve(a.T, self.eye(a.shape[1])).T.copy()

    def right_inverse(self, a: np.ndarray) -> np.ndarray:
        """``s`` with ``a s = I`` for ``a`` of full row rank."""
        return self.solve(a, self.eye(a.shape[0]))


def _int_entry(v) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
        raise ValueError(f"matrix entry {v!r} is not an integer")
    return int(v)


F2 = Field(2)
QQ = Field(None)
