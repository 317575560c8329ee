"""2x2 matrices over Z_m and the quaternion/matrix isomorphism for odd m.

For an odd prime power m pick u, v with u^2 + v^2 = -1 mod m; then

    1 -> I,   i -> [[u, v], [v, -u]],   j -> [[0, -1], [1, 0]],   k -> i*j

extends linearly to a ring isomorphism Z_m[i,j,k] -> M_2(Z_m).  The module
also holds the left-action orbit reduction over Z_p and a homogeneous
linear solver over Z_m used for annihilators.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .errors import ModulusMismatchError, NotAUnitError
from .lipschitz import LipschitzQuat
from .ring_core import RingSpec, crt_join_values, factorize


@dataclass(frozen=True)
class Mat2:
    """``[[e11, e12], [e21, e22]]`` over Z_m."""

    e11: int
    e12: int
    e21: int
    e22: int
    spec: RingSpec

    def __post_init__(self) -> None:
        m = self.spec.n
        for name in ("e11", "e12", "e21", "e22"):
            object.__setattr__(self, name, int(getattr(self, name)) % m)

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]], m: int) -> Mat2:
        (a, b), (c, d) = rows
        return cls(a, b, c, d, factorize(m))

    @classmethod
    def from_code(cls, code: int, spec: RingSpec) -> Mat2:
        m = spec.n
        return cls(code % m, code // m % m, code // m**2 % m, code // m**3 % m, spec)

    @classmethod
    def identity(cls, spec: RingSpec) -> Mat2:
        return cls(1, 0, 0, 1, spec)

    @classmethod
    def zero(cls, spec: RingSpec) -> Mat2:
        return cls(0, 0, 0, 0, spec)

    @property
    def m(self) -> int:
        return self.spec.n

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.e11, self.e12, self.e21, self.e22)

    @property
    def code(self) -> int:
        m = self.spec.n
        return self.e11 + m * (self.e12 + m * (self.e21 + m * self.e22))

    def is_zero(self) -> bool:
        return self.entries == (0, 0, 0, 0)

    def _check(self, other: Mat2) -> None:
        if self.spec.n != other.spec.n:
            raise ModulusMismatchError(self.spec.n, other.spec.n)

    def __add__(self, other: Mat2) -> Mat2:
        self._check(other)
        return Mat2(*(x + y for x, y in zip(self.entries, other.entries)), self.spec)

    def __sub__(self, other: Mat2) -> Mat2:
        self._check(other)
        return Mat2(*(x - y for x, y in zip(self.entries, other.entries)), self.spec)

    def __neg__(self) -> Mat2:
        return Mat2(*(-x for x in self.entries), self.spec)

    def __mul__(self, other: Mat2 | int) -> Mat2:
        if isinstance(other, int):
            return Mat2(*(other * x for x in self.entries), self.spec)
        self._check(other)
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return Mat2(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h, self.spec)

    def __rmul__(self, other: int) -> Mat2:
        return self * other

    def det(self) -> int:
        return (self.e11 * self.e22 - self.e12 * self.e21) % self.m

    def is_unit(self) -> bool:
        return gcd(self.det(), self.m) == 1

    def inverse(self) -> Mat2:
        d = self.det()
        g = gcd(d, self.m)
        if g != 1:
            raise NotAUnitError(self, self.m, g)
        di = pow(d, -1, self.m)
        return Mat2(self.e22 * di, -self.e12 * di, -self.e21 * di, self.e11 * di, self.spec)

    def __str__(self) -> str:
        return f"[[{self.e11},{self.e12}],[{self.e21},{self.e22}]]"


def mat_add(x: Mat2, y: Mat2) -> Mat2:
    return x + y


def mat_mul(x: Mat2, y: Mat2) -> Mat2:
    return x * y


def det(x: Mat2) -> int:
    return x.det()


def is_unit(x: Mat2) -> bool:
    return x.is_unit()


def mat_array(m: int) -> np.ndarray:
    """All m**4 matrices as ``(m**4, 4)`` rows ``(e11, e12, e21, e22)`` in code order."""
    codes = np.arange(m**4, dtype=np.int64)
    return np.stack([codes % m, codes // m % m, codes // m**2 % m, codes // m**3 % m], axis=-1)


def mmul_array(x: np.ndarray, y: np.ndarray, m: int) -> np.ndarray:
    a, b, c, d = (x[..., i] for i in range(4))
    e, f, g, h = (y[..., i] for i in range(4))
    return np.mod(np.stack([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h], axis=-1), m)


def det_array(x: np.ndarray, m: int) -> np.ndarray:
    return np.mod(x[..., 0] * x[..., 3] - x[..., 1] * x[..., 2], m)


def count_zero_divisors(m: int) -> int:
    """Exhaustive count of non-invertible matrices in M_2(Z_m), zero included."""
    dets = det_array(mat_array(m), m)
    return int((np.gcd(dets, m) != 1).sum())


def zero_divisor_count_prediction(p: int, alpha: int) -> int:
    """Closed-form count of zero divisors (zero included) in M_2(Z_{p^alpha})."""
    if p == 2 or not factorize(p).is_prime_power or factorize(p).factors[0][1] != 1:
        raise ValueError(f"p must be an odd prime, got {p}")
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    return p ** (4 * alpha - 1) + p ** (4 * alpha - 2) - p ** (4 * alpha - 3)


# ---------------------------------------------------------------------------
# isomorphism with Z_m[i,j,k]


@dataclass(frozen=True)
class IsoWitness:
    p: int
    alpha: int
    u: int
    v: int

    def __post_init__(self) -> None:
        if self.p == 2:
            raise ValueError("the matrix isomorphism needs an odd prime")
        m = self.modulus
        object.__setattr__(self, "u", self.u % m)
        object.__setattr__(self, "v", self.v % m)
        if (self.u**2 + self.v**2 + 1) % m:
            raise ValueError(f"u^2 + v^2 != -1 mod {m} for (u, v) = ({self.u}, {self.v})")

    @property
    def modulus(self) -> int:
        return self.p**self.alpha


def find_uv(p: int, alpha: int = 1) -> IsoWitness:
    """Solve u^2 + v^2 = -1 mod p^alpha.

    Brute force mod p, then Hensel-lift u with v fixed (or v with u fixed
    when 2u is not invertible).
    """
    spec = factorize(p)
    if p == 2 or spec.factors != ((p, 1),):
        raise ValueError(f"p must be an odd prime, got {p}")
    sol = next(((u, v) for u in range(p) for v in range(p) if (u * u + v * v + 1) % p == 0), None)
    if sol is None:  # pragma: no cover - every odd prime has a solution
        raise RuntimeError(f"no solution of u^2 + v^2 = -1 mod {p}")
    u, v = sol
    swap = u % p == 0
    if swap:
        u, v = v, u
    if u % p == 0:  # pragma: no cover - u = v = 0 cannot satisfy the congruence
        raise RuntimeError(f"internal error: degenerate solution mod {p}")
    mod = p
    for _ in range(alpha - 1):
        mod *= p
        f = u * u + v * v + 1
        u = (u - f * pow(2 * u, -1, mod)) % mod
    if swap:
        u, v = v, u
    return IsoWitness(p, alpha, u, v)


def _odd_witness(spec: RingSpec, w: IsoWitness) -> None:
    if spec.n % 2 == 0:
        raise ValueError("Z_n[i,j,k] is not a matrix ring for even n")
    if spec.n != w.modulus:
        raise ModulusMismatchError(spec.n, w.modulus)


def quat_to_mat(z: LipschitzQuat, w: IsoWitness) -> Mat2:
    _odd_witness(z.spec, w)
    a, b, c, d = z.components
    u, v = w.u, w.v
    return Mat2(a + b * u + d * v, b * v - c - d * u, b * v + c - d * u, a - b * u - d * v, z.spec)


def mat_to_quat(x: Mat2, w: IsoWitness) -> LipschitzQuat:
    _odd_witness(x.spec, w)
    m = x.m
    half = pow(2, -1, m)
    e11, e12, e21, e22 = x.entries
    s = (e11 - e22) * half  # b*u + d*v
    t = (e12 + e21) * half  # b*v - d*u
    return LipschitzQuat(
        (e11 + e22) * half,
        -w.u * s - w.v * t,
        (e21 - e12) * half,
        -w.v * s + w.u * t,
        x.spec,
    )


def quat_to_mat_array(z: np.ndarray, w: IsoWitness) -> np.ndarray:
    a, b, c, d = (z[..., i] for i in range(4))
    u, v = w.u, w.v
    out = np.stack([a + b * u + d * v, b * v - c - d * u, b * v + c - d * u, a - b * u - d * v], axis=-1)
    return np.mod(out, w.modulus)


# ---------------------------------------------------------------------------
# left-action orbits over Z_p


@dataclass(frozen=True)
class OrbitRep:
    """``row`` means [[1, a], [0, 0]]; ``e22`` means [[0, 0], [0, 1]]."""

    kind: str
    a: int | None
    p: int

    def matrix(self) -> Mat2:
        spec = factorize(self.p)
        if self.kind == "e22":
            return Mat2(0, 0, 0, 1, spec)
        return Mat2(1, self.a or 0, 0, 0, spec)


def _require_prime(m: int) -> None:
    if factorize(m).factors != ((m, 1),):
        raise ValueError(f"{m} is not prime")


def _require_zero_divisor(x: Mat2) -> None:
    if x.is_zero():
        raise ValueError("zero matrix is not a vertex")
    if x.is_unit():
        raise ValueError(f"{x} is invertible")


def orbit_reps(p: int) -> list[OrbitRep]:
    _require_prime(p)
    return [OrbitRep("row", a, p) for a in range(p)] + [OrbitRep("e22", None, p)]


def orbit_reduce(x: Mat2) -> tuple[Mat2, OrbitRep]:
    """Row-reduce a nonzero singular matrix over Z_p.

    Returns ``(U, rep)`` with U invertible and ``U * x == rep.matrix()``.
    """
    _require_prime(x.m)
    _require_zero_divisor(x)
    p, spec = x.m, x.spec
    u = Mat2.identity(spec)
    y = x
    if y.e11 == 0 and y.e21 != 0:
        swap = Mat2(0, 1, 1, 0, spec)
        u, y = swap * u, swap * y
    if y.e11 != 0 and y.e21 != 0:
        elim = Mat2(1, 0, -y.e21 * pow(y.e11, -1, p), 1, spec)
        u, y = elim * u, elim * y
    alpha, beta, gamma = y.e11, y.e12, y.e22
    if alpha:
        ai = pow(alpha, -1, p)
        step = Mat2(ai, 0, 0, ai, spec)
        rep = OrbitRep("row", beta * ai % p, p)
    elif gamma:
        # y = [[0, beta], [0, gamma]]: clear the top row, then scale
        gi = pow(gamma, -1, p)
        step = Mat2(1, -beta * gi, 0, gi, spec)
        rep = OrbitRep("e22", None, p)
    else:
        # y = [[0, beta], [0, 0]]: move the row down and scale
        step = Mat2(0, 1, pow(beta, -1, p), 0, spec)
        rep = OrbitRep("e22", None, p)
    return step * u, rep


def orbit_of(x: Mat2) -> OrbitRep:
    return orbit_reduce(x)[1]


# ---------------------------------------------------------------------------
# homogeneous linear systems and annihilators


def _solve_prime_power(a: list[list[int]], p: int, alpha: int) -> list[tuple[int, ...]]:
    """All x with A x = 0 over Z_{p^alpha}, via a Smith-style diagonalisation."""
    m = p**alpha
    rows, cols = len(a), len(a[0])
    mat = [[x % m for x in row] for row in a]
    q = [[int(i == j) for j in range(cols)] for i in range(cols)]  # column transform

    def val(x: int) -> int:
        if x % m == 0:
            return alpha
        k = 0
        while x % p == 0:
            x //= p
            k += 1
        return k

    pivots = []
    for r in range(min(rows, cols)):
        best = None
        for i in range(r, rows):
            for j in range(r, cols):
                v = val(mat[i][j])
                if v < alpha and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        v, bi, bj = best
        mat[r], mat[bi] = mat[bi], mat[r]
        for row in mat:
            row[r], row[bj] = row[bj], row[r]
        for row in q:
            row[r], row[bj] = row[bj], row[r]
        unit = mat[r][r] // p**v
        ui = pow(unit, -1, m)
        mat[r] = [x * ui % m for x in mat[r]]
        pv = p**v
        for i in range(rows):
            if i != r and mat[i][r]:
                f = mat[i][r] // pv
                mat[i] = [(x - f * y) % m for x, y in zip(mat[i], mat[r])]
        for j in range(cols):
            if j != r and mat[r][j]:
                f = mat[r][j] // pv
                for row in mat:
                    row[j] = (row[j] - f * row[r]) % m
                for row in q:
                    row[j] = (row[j] - f * row[r]) % m
        pivots.append(v)

    choices = []
    for j in range(cols):
        if j < len(pivots):
            step = p ** (alpha - pivots[j])
            choices.append(range(0, m, step))
        else:
            choices.append(range(m))
    sols = set()
    for y in product(*choices):
        sols.add(tuple(sum(q[i][j] * y[j] for j in range(cols)) % m for i in range(cols)))
    return sorted(sols)


def solve_homogeneous(a: Sequence[Sequence[int]], m: int) -> list[tuple[int, ...]]:
    """Sorted list of all solutions of ``A x = 0`` over Z_m."""
    spec = factorize(m)
    parts = [_solve_prime_power([list(r) for r in a], p, al) for p, al in spec.factors]
    if len(parts) == 1:
        return parts[0]
    cols = len(a[0])
    out = {
        tuple(crt_join_values([s[i] for s in combo], m) for i in range(cols))
        for combo in product(*parts)
    }
    return sorted(out)


def _right_system(x: Mat2) -> list[list[int]]:
    # x * Y = 0 with Y = (y11, y12, y21, y22)
    a, b, c, d = x.entries
    return [[a, 0, b, 0], [0, a, 0, b], [c, 0, d, 0], [0, c, 0, d]]


def _left_system(x: Mat2) -> list[list[int]]:
    # Y * x = 0
    a, b, c, d = x.entries
    return [[a, c, 0, 0], [b, d, 0, 0], [0, 0, a, c], [0, 0, b, d]]


def ann_right(x: Mat2) -> frozenset[Mat2]:
    """``{Y : x Y = 0}``."""
    _require_zero_divisor(x)
    return frozenset(Mat2(*y, x.spec) for y in solve_homogeneous(_right_system(x), x.m))


def ann_left(x: Mat2) -> frozenset[Mat2]:
    """``{Y : Y x = 0}``."""
    _require_zero_divisor(x)
    return frozenset(Mat2(*y, x.spec) for y in solve_homogeneous(_left_system(x), x.m))


def right_orbit_reps(p: int) -> list[Mat2]:
    """Representatives [[1,0],[b,0]] and [[0,0],[0,1]] of the right action."""
    spec = factorize(p)
    return [Mat2(1, 0, b, 0, spec) for b in range(p)] + [Mat2(0, 0, 0, 1, spec)]


def nonzero_zero_divisors(m: int) -> Iterable[Mat2]:
    spec = factorize(m)
    arr = mat_array(m)
    mask = np.gcd(det_array(arr, m), m) != 1
    mask[0] = False
    for code in np.flatnonzero(mask):
        yield Mat2.from_code(int(code), spec)
