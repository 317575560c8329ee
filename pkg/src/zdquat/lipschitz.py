"""The ring Z_n[i,j,k] of Lipschitz quaternions modulo n.

Elements are identified everywhere by their canonical code
``a + b*n + c*n**2 + d*n**3``.  Besides scalar arithmetic on
:class:`LipschitzQuat`, the module has vectorized helpers working on
``(N, 4)`` integer arrays, which the scans and the graph builder use.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import gcd
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceededError, ModulusMismatchError, NotAUnitError, RingTooLargeError
from .ring_core import Residue, RingSpec, crt_join_values, factorize

DEFAULT_ELEMENT_BUDGET = 2**24
DEFAULT_PAIR_BUDGET = 2**24
DEFAULT_TRIPLE_BUDGET = 4**4


class ElementClass(enum.Enum):
    ZERO = "zero"
    UNIT = "unit"
    ZERO_DIVISOR = "zero-divisor"


@dataclass(frozen=True)
class LipschitzQuat:
    """``a + b i + c j + d k`` with coefficients reduced mod ``spec.n``."""

    a: int
    b: int
    c: int
    d: int
    spec: RingSpec

    def __post_init__(self) -> None:
        n = self.spec.n
        for name in "abcd":
            object.__setattr__(self, name, int(getattr(self, name)) % n)

    @classmethod
    def of(cls, a: int, b: int, c: int, d: int, n: int) -> LipschitzQuat:
        return cls(a, b, c, d, factorize(n))

    @classmethod
    def from_code(cls, code: int, spec: RingSpec) -> LipschitzQuat:
        n = spec.n
        return cls(code % n, code // n % n, code // n**2 % n, code // n**3 % n, spec)

    @classmethod
    def scalar(cls, a: int, spec: RingSpec) -> LipschitzQuat:
        return cls(a, 0, 0, 0, spec)

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def components(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def residues(self) -> tuple[Residue, ...]:
        return tuple(Residue(x, self.spec) for x in self.components)

    @property
    def code(self) -> int:
        n = self.spec.n
        return self.a + n * (self.b + n * (self.c + n * self.d))

    def is_zero(self) -> bool:
        return self.components == (0, 0, 0, 0)

    def _check(self, other: LipschitzQuat) -> None:
        if self.spec.n != other.spec.n:
            raise ModulusMismatchError(self.spec.n, other.spec.n)

    def __add__(self, other: LipschitzQuat) -> LipschitzQuat:
        self._check(other)
        return LipschitzQuat(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d, self.spec)

    def __sub__(self, other: LipschitzQuat) -> LipschitzQuat:
        self._check(other)
        return LipschitzQuat(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d, self.spec)

    def __neg__(self) -> LipschitzQuat:
        return LipschitzQuat(-self.a, -self.b, -self.c, -self.d, self.spec)

    def __mul__(self, other: LipschitzQuat | int) -> LipschitzQuat:
        if isinstance(other, int):
            return LipschitzQuat(other * self.a, other * self.b, other * self.c, other * self.d, self.spec)
        self._check(other)
        a1, b1, c1, d1 = self.components
        a2, b2, c2, d2 = other.components
        return LipschitzQuat(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
            self.spec,
        )

    def __rmul__(self, other: int) -> LipschitzQuat:
        return self * other

    def conj(self) -> LipschitzQuat:
        return LipschitzQuat(self.a, -self.b, -self.c, -self.d, self.spec)

    def norm(self) -> Residue:
        return Residue(self.a**2 + self.b**2 + self.c**2 + self.d**2, self.spec)

    def __str__(self) -> str:
        return f"{self.a}+{self.b}i+{self.c}j+{self.d}k"


def quat_add(z: LipschitzQuat, w: LipschitzQuat) -> LipschitzQuat:
    return z + w


def quat_mul(z: LipschitzQuat, w: LipschitzQuat) -> LipschitzQuat:
    return z * w


def quat_conj(z: LipschitzQuat) -> LipschitzQuat:
    return z.conj()


def norm(z: LipschitzQuat) -> Residue:
    return z.norm()


def re_inner(z: LipschitzQuat, w: LipschitzQuat) -> Residue:
    """Real part of ``z * conj(w)``, i.e. the componentwise dot product."""
    z._check(w)
    return Residue(sum(x * y for x, y in zip(z.components, w.components)), z.spec)


def classify(z: LipschitzQuat) -> ElementClass:
    if z.is_zero():
        return ElementClass.ZERO
    if z.norm().is_unit():
        return ElementClass.UNIT
    return ElementClass.ZERO_DIVISOR


def inverse(z: LipschitzQuat) -> LipschitzQuat:
    """Two-sided inverse ``conj(z) * norm(z)^-1``."""
    nz = z.norm()
    g = gcd(nz.value, z.n)
    if g != 1:
        raise NotAUnitError(z, z.n, g)
    return z.conj() * pow(nz.value, -1, z.n)


# ---------------------------------------------------------------------------
# vectorized helpers


def element_array(n: int) -> np.ndarray:
    """All n**4 elements as an ``(n**4, 4)`` int64 array in code order."""
    codes = np.arange(n**4, dtype=np.int64)
    return codes_to_array(codes, n)


def codes_to_array(codes: np.ndarray | Sequence[int], n: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    return np.stack([codes % n, codes // n % n, codes // n**2 % n, codes // n**3 % n], axis=-1)


def array_to_codes(arr: np.ndarray, n: int) -> np.ndarray:
    arr = np.asarray(arr, dtype=np.int64)
    return arr[..., 0] + n * (arr[..., 1] + n * (arr[..., 2] + n * arr[..., 3]))


def qmul_array(x: np.ndarray, y: np.ndarray, n: int) -> np.ndarray:
    """Broadcasting product ``x * y`` of quaternion arrays, reduced mod n."""
    a1, b1, c1, d1 = (x[..., i] for i in range(4))
    a2, b2, c2, d2 = (y[..., i] for i in range(4))
    out = np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )
    return np.mod(out, n)


def left_mult_matrices(x: np.ndarray) -> np.ndarray:
    """``(N, 4, 4)`` matrices L with ``x * y == L @ y`` (before reduction)."""
    a, b, c, d = (x[..., i] for i in range(4))
    return np.stack(
        [
            np.stack([a, -b, -c, -d], axis=-1),
            np.stack([b, a, -d, c], axis=-1),
            np.stack([c, d, a, -b], axis=-1),
            np.stack([d, -c, b, a], axis=-1),
        ],
        axis=-2,
    )


def norms_array(x: np.ndarray, n: int) -> np.ndarray:
    return np.mod((x.astype(np.int64) ** 2).sum(axis=-1), n)


def class_labels(spec: RingSpec, budget: int = DEFAULT_ELEMENT_BUDGET) -> np.ndarray:
    """Per-code class label: 0 zero, 1 unit, 2 zero divisor."""
    size = spec.n**4
    if size > budget:
        raise RingTooLargeError(spec.n, size, budget)
    norms = norms_array(element_array(spec.n), spec.n)
    labels = np.where(np.gcd(norms, spec.n) == 1, 1, 2).astype(np.int8)
    labels[0] = 0
    return labels


_LABEL = {ElementClass.ZERO: 0, ElementClass.UNIT: 1, ElementClass.ZERO_DIVISOR: 2}


def class_codes(spec: RingSpec, cls: ElementClass, budget: int = DEFAULT_ELEMENT_BUDGET) -> np.ndarray:
    """Sorted codes of every element of the requested class."""
    return np.flatnonzero(class_labels(spec, budget) == _LABEL[cls]).astype(np.int64)


def enumerate_class(
    spec: RingSpec, cls: ElementClass, budget: int = DEFAULT_ELEMENT_BUDGET
) -> Iterator[LipschitzQuat]:
    for code in class_codes(spec, cls, budget):
        yield LipschitzQuat.from_code(int(code), spec)


def zero_product_matrix(x: np.ndarray, y: np.ndarray, n: int, chunk: int = 256) -> np.ndarray:
    """Boolean matrix ``Z[i, j] = (x[i] * y[j] == 0)``.

    Products are formed as float64 matrix products, exact while
    ``4 * n**2 < 2**53``.
    """
    lm = left_mult_matrices(x).astype(np.float64)
    yt = np.ascontiguousarray(y.T, dtype=np.float64)
    out = np.empty((len(x), len(y)), dtype=bool)
    for s in range(0, len(x), chunk):
        block = lm[s : s + chunk]
        prod = (block.reshape(-1, 4) @ yt).reshape(len(block), 4, len(y))
        out[s : s + chunk] = (np.fmod(prod, n) == 0).all(axis=1)
    return out


# ---------------------------------------------------------------------------
# structural scans


def nilradical_member_2t(z: LipschitzQuat) -> bool:
    """Membership in the nilradical of Z_{2^t}[i,j,k] (norm is even)."""
    if not z.spec.is_power_of_two:
        raise ValueError(f"n = {z.n} is not a power of two")
    return z.norm().value % 2 == 0


@dataclass(frozen=True)
class ParityReport:
    w: tuple[int, int, int, int]
    norm: int
    mod4_ok: bool
    mod8_ok: bool

    @property
    def ok(self) -> bool:
        return self.mod4_ok and self.mod8_ok


def parity_lemma_check(w: Sequence[int]) -> ParityReport:
    """Check both parity statements for one integer quaternion.

    norm = 0 mod 4 must force all components to share a parity, and
    norm = 0 mod 8 must force them all even.
    """
    comps = tuple(int(x) for x in w)
    if len(comps) != 4:
        raise ValueError("expected four integer components")
    nrm = sum(x * x for x in comps)
    parities = {x % 2 for x in comps}
    mod4_ok = nrm % 4 != 0 or len(parities) == 1
    mod8_ok = nrm % 8 != 0 or parities == {0}
    return ParityReport(comps, nrm, mod4_ok, mod8_ok)  # type: ignore[arg-type]


def parity_window_scan(window: int = 8) -> list[ParityReport]:
    """Counterexamples to either parity statement with components in [0, window)."""
    failures = []
    for code in range(window**4):
        w = (code % window, code // window % window, code // window**2 % window, code // window**3)
        report = parity_lemma_check(w)
        if not report.ok:
            failures.append(report)
    return failures


def _zero_divisors(spec: RingSpec, budget: int) -> tuple[np.ndarray, np.ndarray]:
    codes = class_codes(spec, ElementClass.ZERO_DIVISOR, budget)
    return codes, codes_to_array(codes, spec.n)


def reversibility_scan(
    spec: RingSpec,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
    element_budget: int = DEFAULT_ELEMENT_BUDGET,
) -> tuple[LipschitzQuat, LipschitzQuat] | None:
    """First pair (z, w) in code order with z*w = 0 but w*z != 0, else None."""
    codes, arr = _zero_divisors(spec, element_budget)
    pairs = len(codes) ** 2
    if pairs > pair_budget:
        raise BudgetExceededError(f"reversibility scan (n={spec.n})", pairs, pair_budget)
    zero = zero_product_matrix(arr, arr, spec.n)
    bad = zero & ~zero.T
    if not bad.any():
        return None
    i, j = np.unravel_index(int(np.argmax(bad)), bad.shape)
    return LipschitzQuat.from_code(int(codes[i]), spec), LipschitzQuat.from_code(int(codes[j]), spec)


def symmetry_scan(
    spec: RingSpec, triple_budget: int = DEFAULT_TRIPLE_BUDGET
) -> tuple[LipschitzQuat, LipschitzQuat, LipschitzQuat] | None:
    """First triple (a, b, c) of nonzero elements with abc = 0 and acb != 0.

    ``triple_budget`` bounds the ring size n**4.  The scan runs over every
    nonzero a, b, c, so ``None`` means the ring is symmetric.
    """
    n = spec.n
    if n**4 > triple_budget:
        raise BudgetExceededError(f"symmetry scan (n={n})", n**4, triple_budget, "ring size n^4")
    elems = element_array(n)[1:]
    # a must be a zero divisor unless the ring fails to be reversible, but
    # scanning all of it keeps the verdict unconditional
    for ia in range(len(elems)):
        a = elems[ia]
        ax = qmul_array(a, elems, n)
        # row x of ax_y_zero is (a*x)*y == 0; reading it as [b, c] gives
        # abc and transposed as [c, b] gives acb
        ax_y_zero = zero_product_matrix(ax, elems, n)
        abc_zero, acb_zero = ax_y_zero, ax_y_zero
        hit = abc_zero & ~acb_zero.T
        if hit.any():
            ib, ic = np.unravel_index(int(np.argmax(hit)), hit.shape)
            return tuple(LipschitzQuat.from_code(ix + 1, spec) for ix in (ia, int(ib), int(ic)))  # type: ignore[return-value]
    return None


def quat_crt_split(z: LipschitzQuat) -> list[LipschitzQuat]:
    return [LipschitzQuat(*z.components, factorize(q)) for q in z.spec.prime_powers]


def quat_crt_join(parts: Sequence[LipschitzQuat], spec: RingSpec) -> LipschitzQuat:
    expected = spec.prime_powers
    if len(parts) != len(expected):
        raise ValueError(f"expected {len(expected)} parts for n={spec.n}, got {len(parts)}")
    for part, q in zip(parts, expected):
        if part.n != q:
            raise ModulusMismatchError(part.n, q)
    comps = [crt_join_values([p.components[i] for p in parts], spec.n) for i in range(4)]
    return LipschitzQuat(*comps, spec)
