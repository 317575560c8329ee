"""Element oracles: the minimal ring interface the graph engine needs.

An oracle knows how many elements its ring has, which codes are nonzero
zero divisors, how to turn codes into coordinate arrays, and how to decide
``x * y == 0`` for whole blocks of element pairs at once.
"""

from __future__ import annotations

from functools import cached_property
from itertools import permutations
from typing import Protocol

import numpy as np

from .errors import RingTooLargeError
from .lipschitz import DEFAULT_ELEMENT_BUDGET, ElementClass, class_codes, codes_to_array, zero_product_matrix
from .ring_core import RingSpec, factorize


class ElementOracle(Protocol):
    name: str

    @property
    def order(self) -> int: ...

    def vertex_codes(self) -> np.ndarray: ...

    def coords(self, codes: np.ndarray) -> np.ndarray: ...

    def zero_products(self, x: np.ndarray, y: np.ndarray) -> np.ndarray: ...

    def label(self, code: int) -> str: ...


class QuaternionRing:
    """Z_n[i,j,k]."""

    def __init__(self, spec: RingSpec | int, element_budget: int = DEFAULT_ELEMENT_BUDGET) -> None:
        self.spec = factorize(spec) if isinstance(spec, int) else spec
        self.element_budget = element_budget
        self.name = f"Z_{self.spec.n}[i,j,k]"

    @property
    def order(self) -> int:
        return self.spec.n**4

    @cached_property
    def _vertices(self) -> np.ndarray:
        return class_codes(self.spec, ElementClass.ZERO_DIVISOR, self.element_budget)

    def vertex_codes(self) -> np.ndarray:
        return self._vertices

    def coords(self, codes: np.ndarray) -> np.ndarray:
        return codes_to_array(codes, self.spec.n)

    def zero_products(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return zero_product_matrix(x, y, self.spec.n)

    def label(self, code: int) -> str:
        a, b, c, d = (int(t) for t in self.coords(np.array([code]))[0])
        return f"{a}+{b}i+{c}j+{d}k"


def _det_mod(mats: np.ndarray, size: int, m: int) -> np.ndarray:
    # Leibniz expansion; sizes here are 2 or 3
    total = np.zeros(mats.shape[0], dtype=np.int64)
    for perm in permutations(range(size)):
        sign = 1
        for i in range(size):
            for j in range(i + 1, size):
                if perm[i] > perm[j]:
                    sign = -sign
        term = np.ones(mats.shape[0], dtype=np.int64)
        for r in range(size):
            term = term * mats[:, r, perm[r]] % m
        total = (total + sign * term) % m
    return total


class MatrixRing:
    """M_size(Z_m); codes are base-m digits of the entries in row-major order."""

    def __init__(self, size: int, m: int, element_budget: int = DEFAULT_ELEMENT_BUDGET) -> None:
        if size < 1:
            raise ValueError("matrix size must be positive")
        self.size = size
        self.m = m
        self.spec = factorize(m)
        self.element_budget = element_budget
        self.name = f"M_{size}(Z_{m})"

    @property
    def order(self) -> int:
        return self.m ** (self.size**2)

    @cached_property
    def _vertices(self) -> np.ndarray:
        if self.order > self.element_budget:
            raise RingTooLargeError(self.m, self.order, self.element_budget)
        codes = np.arange(self.order, dtype=np.int64)
        mats = self.coords(codes).reshape(-1, self.size, self.size)
        dets = _det_mod(mats, self.size, self.m)
        mask = np.gcd(dets, self.m) != 1
        mask[0] = False
        return codes[mask]

    def vertex_codes(self) -> np.ndarray:
        return self._vertices

    def coords(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        digits = [codes // self.m**k % self.m for k in range(self.size**2)]
        return np.stack(digits, axis=-1)

    def zero_products(self, x: np.ndarray, y: np.ndarray, chunk: int = 256) -> np.ndarray:
        s = self.size
        xm = x.reshape(-1, s, s).astype(np.float64)
        ym = y.reshape(-1, s, s).astype(np.float64)
        # (x @ y)[r, c] = sum_k x[r, k] y[k, c]; stack y as (s, s * len(y))
        yflat = np.ascontiguousarray(ym.transpose(1, 0, 2).reshape(s, -1))
        out = np.empty((len(xm), len(ym)), dtype=bool)
        for start in range(0, len(xm), chunk):
            block = xm[start : start + chunk]
            prod = (block.reshape(-1, s) @ yflat).reshape(len(block), s, len(ym), s)
            out[start : start + chunk] = (np.fmod(prod, self.m) == 0).all(axis=(1, 3))
        return out

    def label(self, code: int) -> str:
        flat = [int(t) for t in self.coords(np.array([code]))[0]]
        rows = [flat[r * self.size : (r + 1) * self.size] for r in range(self.size)]
        return "[" + ",".join("[" + ",".join(map(str, r)) + "]" for r in rows) + "]"
