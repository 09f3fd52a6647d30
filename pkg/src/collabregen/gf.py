"""Exact arithmetic over binary extension fields GF(2^m).

Elements are polynomial-basis bit vectors reduced modulo a fixed primitive
polynomial per field size, so bit patterns are reproducible across runs.
Includes dense matrices over a field (Gaussian elimination solve) and
Reed-Solomon codes with joint erasure/error decoding by exhaustive
interpolation over message-sized subsets, certified against the distance
bound n_s + 2*n_b <= n - kappa.

Everything here is pure and deterministic; fields and elements are
immutable and freely shareable across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Optional, Sequence

# One primitive polynomial per supported m; x is a generator of the
# multiplicative group for each of these.
PRIMITIVE_POLYNOMIALS: dict[int, int] = {
    2: 0b111,              # x^2 + x + 1
    3: 0b1011,             # x^3 + x + 1
    4: 0b10011,            # x^4 + x + 1
    5: 0b100101,           # x^5 + x^2 + 1
    6: 0b1000011,          # x^6 + x + 1
    7: 0b10001001,         # x^7 + x^3 + 1
    8: 0x11D,              # x^8 + x^4 + x^3 + x^2 + 1
    9: 0x211,              # x^9 + x^4 + 1
    10: 0x409,             # x^10 + x^3 + 1
    11: 0x805,             # x^11 + x^2 + 1
    12: 0x1053,            # x^12 + x^6 + x^4 + x + 1
    13: 0x201B,            # x^13 + x^4 + x^3 + x + 1
    14: 0x4443,            # x^14 + x^10 + x^6 + x + 1
    15: 0x8003,            # x^15 + x + 1
    16: 0x1100B,           # x^16 + x^12 + x^3 + x + 1
}

# Exhaustive-subset decoding is meant for desk-scale codes; beyond this
# many subsets we refuse rather than silently hang.
_MAX_DECODE_SUBSETS = 200_000


class FieldMismatchError(ValueError):
    """Operands belong to different fields."""


class SingularMatrixError(ArithmeticError):
    """Linear solve hit a singular system."""


class DecodeError(Exception):
    """Base class for Reed-Solomon decoding failures."""


class InsufficientSymbolsError(DecodeError):
    """Fewer symbols available than the code dimension."""


class DecodeAmbiguityError(DecodeError):
    """No candidate message is certified within the distance bound."""


_FIELD_CACHE: dict[int, "GF"] = {}


class GF:
    """The field GF(2^m) with log/exp tables; one shared instance per m."""

    __slots__ = ("m", "order", "poly", "_exp", "_log")

    def __init__(self, m: int):
        if not 2 <= m <= 16:
            raise ValueError(f"field exponent m={m} outside supported range 2..16")
        self.m = m
        self.order = 1 << m
        self.poly = PRIMITIVE_POLYNOMIALS[m]
        size = self.order - 1
        exp = [0] * (2 * size)
        log = [0] * self.order
        x = 1
        for i in range(size):
            exp[i] = x
            exp[i + size] = x
            log[x] = i
            x <<= 1
            if x & self.order:
                x ^= self.poly
        self._exp = exp
        self._log = log

    def __repr__(self) -> str:
        return f"GF(2^{self.m})"

    # --- int-level arithmetic (values in 0..2^m-1) ---

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return self._exp[self.order - 1 - self._log[a]]

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by field zero")
        if a == 0:
            return 0
        return self._exp[(self._log[a] - self._log[b]) % (self.order - 1)]

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("0 cannot be raised to a negative power")
            return 0
        return self._exp[(self._log[a] * e) % (self.order - 1)]

    # --- element helpers ---

    def element(self, value: int) -> "FieldElement":
        return FieldElement(value, self)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(1, self)

    @property
    def generator(self) -> "FieldElement":
        """The class of x, a multiplicative generator for our polynomials."""
        return FieldElement(2, self)

    def elements(self) -> Iterable["FieldElement"]:
        return (FieldElement(v, self) for v in range(self.order))


def field(m: int) -> GF:
    """Shared GF(2^m) instance for the given exponent."""
    f = _FIELD_CACHE.get(m)
    if f is None:
        f = GF(m)
        _FIELD_CACHE[m] = f
    return f


@dataclass(frozen=True, slots=True)
class FieldElement:
    """A value of GF(2^m), tagged with its field."""

    value: int
    field: GF

    def __post_init__(self):
        if not 0 <= self.value < self.field.order:
            raise ValueError(f"value {self.value} outside GF(2^{self.field.m})")

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if other.field is not self.field:
            raise FieldMismatchError(
                f"mixed fields GF(2^{self.field.m}) and GF(2^{other.field.m})"
            )

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.value ^ other.value, self.field)

    __sub__ = __add__  # characteristic 2

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field.mul(self.value, other.value), self.field)

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field.div(self.value, other.value), self.field)

    def __pow__(self, e: int) -> "FieldElement":
        return FieldElement(self.field.pow(self.value, e), self.field)

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"GF(2^{self.field.m}):{self.value}"


def gf_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    """Product of two elements of the same field."""
    return a * b


def gf_inv(a: FieldElement) -> FieldElement:
    """Multiplicative inverse; raises ZeroDivisionError on the zero element."""
    return a.inverse()


class FieldMatrix:
    """Dense row-major matrix over a single GF(2^m)."""

    __slots__ = ("field", "rows", "cols", "_data")

    def __init__(self, field_: GF, rows: int, cols: int, data: Sequence[int]):
        if rows <= 0 or cols <= 0:
            raise ValueError("matrix dimensions must be positive")
        if len(data) != rows * cols:
            raise ValueError("entry count does not match dimensions")
        for v in data:
            if not 0 <= v < field_.order:
                raise ValueError(f"entry {v} outside GF(2^{field_.m})")
        self.field = field_
        self.rows = rows
        self.cols = cols
        self._data = list(data)

    # --- construction ---

    @classmethod
    def from_rows(cls, field_: GF, rows: Sequence[Sequence[FieldElement | int]]) -> "FieldMatrix":
        flat: list[int] = []
        width = len(rows[0])
        for row in rows:
            if len(row) != width:
                raise ValueError("ragged rows")
            for x in row:
                if isinstance(x, FieldElement):
                    if x.field is not field_:
                        raise FieldMismatchError("entry from a different field")
                    flat.append(x.value)
                else:
                    flat.append(int(x))
        return cls(field_, len(rows), width, flat)

    @classmethod
    def identity(cls, field_: GF, n: int) -> "FieldMatrix":
        data = [0] * (n * n)
        for i in range(n):
            data[i * n + i] = 1
        return cls(field_, n, n, data)

    @classmethod
    def vandermonde(cls, points: Sequence[FieldElement], nrows: int) -> "FieldMatrix":
        """Rows are successive powers: entry (j, i) = points[i]**j."""
        if not points:
            raise ValueError("need at least one evaluation point")
        f = points[0].field
        data: list[int] = []
        for j in range(nrows):
            for p in points:
                if p.field is not f:
                    raise FieldMismatchError("points from different fields")
                data.append(f.pow(p.value, j))
        return cls(f, nrows, len(points), data)

    # --- access ---

    def entry(self, i: int, j: int) -> FieldElement:
        return FieldElement(self._data[i * self.cols + j], self.field)

    @property
    def entries(self) -> tuple[FieldElement, ...]:
        return tuple(FieldElement(v, self.field) for v in self._data)

    def int_rows(self) -> list[list[int]]:
        c = self.cols
        return [self._data[i * c:(i + 1) * c] for i in range(self.rows)]

    def row(self, i: int) -> tuple[FieldElement, ...]:
        c = self.cols
        return tuple(FieldElement(v, self.field) for v in self._data[i * c:(i + 1) * c])

    def column(self, j: int) -> tuple[FieldElement, ...]:
        return tuple(
            FieldElement(self._data[i * self.cols + j], self.field) for i in range(self.rows)
        )

    def take_columns(self, idx: Sequence[int]) -> "FieldMatrix":
        data = [self._data[i * self.cols + j] for i in range(self.rows) for j in idx]
        return FieldMatrix(self.field, self.rows, len(idx), data)

    def transpose(self) -> "FieldMatrix":
        data = [self._data[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)]
        return FieldMatrix(self.field, self.cols, self.rows, data)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return (
            self.field is other.field
            and self.rows == other.rows
            and self.cols == other.cols
            and self._data == other._data
        )

    def __repr__(self) -> str:
        return f"FieldMatrix(GF(2^{self.field.m}), {self.rows}x{self.cols})"

    # --- arithmetic ---

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        if other.field is not self.field:
            raise FieldMismatchError("matrix product across fields")
        if self.cols != other.rows:
            raise ValueError("inner dimensions do not match")
        f = self.field
        a, b = self._data, other._data
        n, k, m = self.rows, self.cols, other.cols
        out = [0] * (n * m)
        for i in range(n):
            arow = a[i * k:(i + 1) * k]
            for j in range(m):
                acc = 0
                for s in range(k):
                    av = arow[s]
                    if av:
                        bv = b[s * m + j]
                        if bv:
                            acc ^= f.mul(av, bv)
                out[i * m + j] = acc
        return FieldMatrix(f, n, m, out)

    def solve(self, rhs: "FieldMatrix") -> "FieldMatrix":
        """Solve self @ X = rhs by Gauss-Jordan with first-nonzero pivoting."""
        if self.rows != self.cols:
            raise ValueError("solve requires a square matrix")
        if rhs.field is not self.field:
            raise FieldMismatchError("right-hand side from a different field")
        if rhs.rows != self.rows:
            raise ValueError("right-hand side row count does not match")
        f = self.field
        n, w = self.rows, rhs.cols
        aug = [
            self._data[i * n:(i + 1) * n] + rhs._data[i * w:(i + 1) * w]
            for i in range(n)
        ]
        for col in range(n):
            pivot = next((r for r in range(col, n) if aug[r][col]), None)
            if pivot is None:
                raise SingularMatrixError(f"singular at column {col}")
            if pivot != col:
                aug[col], aug[pivot] = aug[pivot], aug[col]
            inv_p = f.inv(aug[col][col])
            aug[col] = [f.mul(inv_p, v) for v in aug[col]]
            prow = aug[col]
            for r in range(n):
                if r != col and aug[r][col]:
                    factor = aug[r][col]
                    aug[r] = [v ^ f.mul(factor, pv) for v, pv in zip(aug[r], prow)]
        data = [aug[i][n + j] for i in range(n) for j in range(w)]
        return FieldMatrix(f, n, w, data)

    def inverse(self) -> "FieldMatrix":
        return self.solve(FieldMatrix.identity(self.field, self.rows))


def mat_solve(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    """Solve A @ X = B over the matrices' common field."""
    return a.solve(b)


# --- Reed-Solomon codes ---

ERASED: Optional[FieldElement] = None  # marker accepted in received sequences


@dataclass(frozen=True)
class RsCode:
    """An (n, kappa) Reed-Solomon code given by distinct evaluation points.

    Codeword symbol i is the message polynomial evaluated at point i; the
    generator matrix is the kappa x n Vandermonde matrix of the points, so
    any kappa columns are invertible.
    """

    field: GF
    n: int
    kappa: int
    evaluation_points: tuple[FieldElement, ...]

    def __post_init__(self):
        if not 0 < self.kappa < self.n:
            raise ValueError("need 0 < kappa < n")
        if self.n > self.field.order:
            raise ValueError("code length exceeds field size")
        if len(self.evaluation_points) != self.n:
            raise ValueError("need exactly n evaluation points")
        values = [p.value for p in self.evaluation_points]
        if len(set(values)) != self.n:
            raise ValueError("evaluation points must be distinct")
        for p in self.evaluation_points:
            if p.field is not self.field:
                raise FieldMismatchError("evaluation point from a different field")

    @classmethod
    def with_power_points(cls, field_: GF, n: int, kappa: int, first_power: int = 0) -> "RsCode":
        """Evaluation points w^first_power, w^(first_power+1), ... for generator w."""
        if n > field_.order - 1:
            raise ValueError("power points require n <= 2^m - 1")
        w = field_.generator
        points = tuple(w ** (first_power + i) for i in range(n))
        return cls(field_, n, kappa, points)

    def generator_matrix(self) -> FieldMatrix:
        return FieldMatrix.vandermonde(self.evaluation_points, self.kappa)

    def column(self, position: int) -> tuple[FieldElement, ...]:
        """Column of the generator matrix at a 0-based codeword position."""
        x = self.evaluation_points[position]
        return tuple(x ** j for j in range(self.kappa))

    def encode(self, message: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
        if len(message) != self.kappa:
            raise ValueError(f"message must have {self.kappa} symbols")
        f = self.field
        msg = [m.value for m in message]
        out = []
        for p in self.evaluation_points:
            acc = 0
            xp = 1
            for coeff in msg:
                if coeff:
                    acc ^= f.mul(coeff, xp)
                xp = f.mul(xp, p.value)
            out.append(FieldElement(acc, f))
        return tuple(out)


def rs_encode(code: RsCode, message: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
    return code.encode(message)


def rs_decode(
    code: RsCode,
    received: Iterable[tuple[int, Optional[FieldElement]]],
) -> tuple[FieldElement, ...]:
    """Decode erasures and errors by exhaustive subset interpolation.

    ``received`` lists (position, symbol) pairs; a symbol of ``ERASED``
    (None) or an absent position counts as an erasure.  Every
    kappa-subset of the available symbols is interpolated; a candidate is
    accepted only if it is certified, i.e. the implied erasure/error
    counts satisfy n_s + 2*n_b <= n - kappa, which makes it unique.  With
    no certified candidate a DecodeAmbiguityError is raised, so a
    corruption beyond the bound is flagged rather than silently decoded.
    """
    f = code.field
    seen: dict[int, int] = {}
    for pos, sym in received:
        if not 0 <= pos < code.n:
            raise ValueError(f"position {pos} outside code length {code.n}")
        if sym is None:
            continue
        if sym.field is not f:
            raise FieldMismatchError("received symbol from a different field")
        if pos in seen:
            raise ValueError(f"duplicate position {pos}")
        seen[pos] = sym.value
    avail = sorted(seen.items())
    kappa = code.kappa
    if len(avail) < kappa:
        raise InsufficientSymbolsError(
            f"{len(avail)} symbols available, need at least {kappa}"
        )
    if comb(len(avail), kappa) > _MAX_DECODE_SUBSETS:
        raise ValueError("code too large for exhaustive subset decoding")

    n_s = code.n - len(avail)
    radius = code.n - kappa
    points = [p.value for p in code.evaluation_points]

    candidates: dict[tuple[int, ...], int] = {}
    for subset in combinations(avail, kappa):
        msg = _interpolate(f, [(points[pos], val) for pos, val in subset])
        if msg is not None:
            candidates[msg] = candidates.get(msg, 0) + 1

    certified: list[tuple[int, ...]] = []
    for msg in candidates:
        word = code.encode([FieldElement(v, f) for v in msg])
        errs = sum(1 for pos, val in avail if word[pos].value != val)
        if n_s + 2 * errs <= radius:
            certified.append(msg)
    if len(certified) == 1:
        return tuple(FieldElement(v, f) for v in certified[0])
    if len(certified) > 1:  # impossible for a true RS code; guard anyway
        raise DecodeAmbiguityError("multiple certified candidates")
    raise DecodeAmbiguityError(
        f"no candidate within n_s + 2*n_b <= {radius} "
        f"(n_s={n_s}, {len(candidates)} subset solutions)"
    )


def _interpolate(f: GF, pairs: Sequence[tuple[int, int]]) -> Optional[tuple[int, ...]]:
    """Coefficients of the unique degree < len(pairs) polynomial, or None."""
    k = len(pairs)
    n = k
    aug = []
    for x, y in pairs:
        row = [0] * (n + 1)
        xp = 1
        for j in range(n):
            row[j] = xp
            xp = f.mul(xp, x)
        row[n] = y
        aug.append(row)
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col]), None)
        if pivot is None:
            return None  # duplicate points; cannot happen for distinct x
        if pivot != col:
            aug[col], aug[pivot] = aug[pivot], aug[col]
        inv_p = f.inv(aug[col][col])
        aug[col] = [f.mul(inv_p, v) for v in aug[col]]
        prow = aug[col]
        for r in range(n):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [v ^ f.mul(factor, pv) for v, pv in zip(aug[r], prow)]
    return tuple(aug[i][n] for i in range(n))
