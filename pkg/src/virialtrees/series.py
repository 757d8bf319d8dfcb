"""Truncated formal power series over exact rationals, Bell polynomials and
the tree generating functions.

A ``PowerSeries`` of order ``K`` knows its coefficients of degree 0..K;
everything beyond is unknown (not zero), and arithmetic never reports more
than its inputs determine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

Number = int | Fraction


class PowerSeries:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Number]):
        if not coeffs:
            raise ValueError("a power series needs at least its constant term")
        self.coeffs = tuple(Fraction(c) for c in coeffs)

    # construction ---------------------------------------------------------
    @classmethod
    def from_function(cls, f: Callable[[int], Number], order: int) -> "PowerSeries":
        return cls([f(k) for k in range(order + 1)])

    @classmethod
    def z(cls, order: int) -> "PowerSeries":
        if order < 1:
            raise ValueError("z needs order >= 1")
        return cls([0, 1] + [0] * (order - 1))

    @classmethod
    def constant(cls, c: Number, order: int) -> "PowerSeries":
        return cls([c] + [0] * order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        if not 0 <= k <= self.order:
            raise IndexError(f"degree {k} is beyond the truncation order {self.order}")
        return self.coeffs[k]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coeffs)

    def truncate(self, order: int) -> "PowerSeries":
        if order > self.order:
            raise ValueError(f"cannot extend a series of order {self.order} to {order}")
        return PowerSeries(self.coeffs[:order + 1])

    def __eq__(self, other) -> bool:
        if isinstance(other, PowerSeries):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"PowerSeries({[str(c) for c in self.coeffs]})"

    def first_mismatch(self, other: "PowerSeries", through: int | None = None) -> int | None:
        """Lowest degree where the two series differ (within their common order)."""
        top = min(self.order, other.order)
        if through is not None:
            if through > top:
                raise ValueError(f"cannot compare through degree {through}; common order is {top}")
            top = through
        for k in range(top + 1):
            if self.coeffs[k] != other.coeffs[k]:
                return k
        return None

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "PowerSeries":
        if isinstance(other, PowerSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return PowerSeries.constant(other, self.order)
        raise TypeError(f"cannot combine PowerSeries with {type(other).__name__}")

    def __add__(self, other):
        o = self._coerce(other)
        k = min(self.order, o.order)
        return PowerSeries([a + b for a, b in zip(self.coeffs[:k + 1], o.coeffs[:k + 1])])

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries([-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return PowerSeries([a * other for a in self.coeffs])
        o = self._coerce(other)
        k = min(self.order, o.order)
        a, b = self.coeffs, o.coeffs
        return PowerSeries([sum(a[i] * b[d - i] for i in range(d + 1)) for d in range(k + 1)])

    __rmul__ = __mul__

    def reciprocal(self) -> "PowerSeries":
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("series with zero constant term has no reciprocal")
        out = [1 / a[0]]
        for d in range(1, self.order + 1):
            out.append(-sum(a[i] * out[d - i] for i in range(1, d + 1)) / a[0])
        return PowerSeries(out)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return PowerSeries([a / Fraction(other) for a in self.coeffs])
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def __pow__(self, r):
        if isinstance(r, int) and r >= 0:
            result = PowerSeries.constant(1, self.order)
            base = self
            while r:
                if r & 1:
                    result = result * base
                base = base * base
                r >>= 1
            return result
        if isinstance(r, int):
            return (self ** -r).reciprocal()
        # f**r for rational r via g' f = r f' g, which needs f(0) = 1
        r = Fraction(r)
        a = self.coeffs
        if a[0] != 1:
            raise ValueError("non-integer powers need constant term 1")
        g = [Fraction(1)]
        for d in range(1, self.order + 1):
            g.append(sum(((r + 1) * k - d) * a[k] * g[d - k] for k in range(1, d + 1)) / d)
        return PowerSeries(g)

    def compose(self, inner: "PowerSeries") -> "PowerSeries":
        """self(inner(z)); ``inner`` must have zero constant term."""
        if inner.coeffs[0] != 0:
            raise ValueError("composition needs an inner series with zero constant term")
        k = min(self.order, inner.order)
        inner = inner.truncate(k)
        result = PowerSeries.constant(self.coeffs[k], k)
        for c in reversed(self.coeffs[:k]):
            result = result * inner + c
        return result

    def derive(self) -> "PowerSeries":
        if self.order < 1:
            raise ValueError("derivative of an order-0 series is undetermined")
        return PowerSeries([k * self.coeffs[k] for k in range(1, self.order + 1)])

    def integrate(self, constant: Number = 0) -> "PowerSeries":
        return PowerSeries([constant] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    def euler(self) -> "PowerSeries":
        """z d/dz, keeping the order."""
        return PowerSeries([k * c for k, c in enumerate(self.coeffs)])

    def exp(self) -> "PowerSeries":
        a = self.coeffs
        if a[0] != 0:
            raise ValueError("exp needs zero constant term for exact coefficients")
        g = [Fraction(1)]
        for d in range(1, self.order + 1):
            g.append(sum(k * a[k] * g[d - k] for k in range(1, d + 1)) / d)
        return PowerSeries(g)


def format_series(ps: PowerSeries, var: str = "z") -> str:
    """Degree-ascending ``c_k z^k`` lines with exact fractions (zero terms skipped)."""
    lines = []
    for k, c in enumerate(ps.coeffs):
        if c == 0:
            continue
        lines.append(str(c) if k == 0 else f"{c} {var}" if k == 1 else f"{c} {var}^{k}")
    lines.append(f"+ O({var}^{ps.order + 1})")
    return "\n".join(lines)


# ----------------------------------------------------------------- scalars

def falling_factorial(x: Number, k: int) -> Fraction:
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = Fraction(1)
    for i in range(k):
        out *= x - i
    return out


def gen_binomial(x: Number, k: int) -> Fraction:
    """Binomial coefficient extended to any rational upper argument."""
    return falling_factorial(x, k) / math.factorial(k)


def _partitions_with_parts(n: int, k: int, largest: int | None = None) -> Iterator[list[int]]:
    """Partitions of n into exactly k parts, parts non-increasing and <= largest."""
    largest = n if largest is None else largest
    if k == 0:
        if n == 0:
            yield []
        return
    for first in range(min(n - k + 1, largest), 0, -1):
        if first * k < n:
            break
        for rest in _partitions_with_parts(n - first, k - 1, first):
            yield [first] + rest


def bell_partial(n: int, k: int, xs: Sequence[Number]) -> Fraction:
    """Partial Bell polynomial B_{n,k}(x_1, ..., x_{n-k+1}) by its explicit sum."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    if len(xs) < n - k + 1:
        raise ValueError(f"B_{{{n},{k}}} needs at least {n - k + 1} arguments")
    total = Fraction(0)
    for parts in _partitions_with_parts(n, k):
        mult: dict[int, int] = {}
        for p in parts:
            mult[p] = mult.get(p, 0) + 1
        term = Fraction(math.factorial(n))
        for i, ki in mult.items():
            term *= (Fraction(xs[i - 1]) / math.factorial(i)) ** ki / math.factorial(ki)
        total += term
    return total


def potential_polynomial(n: int, r: Number, xs: Sequence[Number]) -> Fraction:
    """P_n^{(r)}(x_1..x_n) = sum_k r^(falling k) B_{n,k}(xs)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return sum((falling_factorial(r, k) * bell_partial(n, k, xs) for k in range(1, n + 1)), Fraction(0))


def _check_cluster_list(b: Sequence[Number], n: int) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(b) < n + 1:
        raise ValueError(f"need b_1 .. b_{n + 1}, got {len(b)} values")
    if Fraction(b[0]) != 1:
        raise ValueError(f"cluster coefficients must be normalized to b_1 = 1, got {b[0]}")


def lagrange_virial(b: Sequence[Number], n: int) -> Fraction:
    """beta_{n+1} from b = (b_1, b_2, ...) through sum_k C(-n,k) k! B_{n,k}(b_2, ..., b_{n+1})."""
    _check_cluster_list(b, n)
    xs = [Fraction(x) for x in b[1:n + 1]]
    return sum((gen_binomial(-n, k) * math.factorial(k) * bell_partial(n, k, xs) for k in range(1, n + 1)),
               Fraction(0))


def reversion_oracle(b: Sequence[Number], n: int) -> Fraction:
    """beta_{n+1} by inverting rho(z) and substituting into p(z), truncated at degree n+1."""
    _check_cluster_list(b, n)
    order = n + 1
    bs = [Fraction(x) for x in b[:order]]
    pressure = PowerSeries([0] + [bk / math.factorial(k) for k, bk in enumerate(bs, 1)])
    # rho = z + sum_{k>=2} b_k z^k/(k-1)!; solve z = rho - that tail by iteration
    tail = PowerSeries([0, 0] + [bk / math.factorial(k - 1) for k, bk in enumerate(bs[1:], 2)])
    rho = PowerSeries.z(order)
    z = rho
    for _ in range(order):
        z = rho - tail.compose(z)
    return pressure.compose(z)[order] * math.factorial(order)


# ------------------------------------------------------ tree generating fns

def rooted_tree_series(order: int) -> PowerSeries:
    """T•(z) = sum n^(n-1) z^n / n!."""
    return PowerSeries([0] + [Fraction(k ** (k - 1), math.factorial(k)) for k in range(1, order + 1)])


def tree_series(order: int) -> PowerSeries:
    """T(z) = sum n^(n-2) z^n / n! (Cayley)."""
    return PowerSeries([0] + [Fraction(k ** (k - 1), k * math.factorial(k)) for k in range(1, order + 1)])


def t1_series(order: int) -> PowerSeries:
    """Non-splittable tree series: z + sum_{n>=1} n^n z^(n+1) / (n+1)!."""
    if order < 1:
        raise ValueError("order must be >= 1")
    return PowerSeries([0, 1] + [Fraction(k ** k, math.factorial(k + 1)) for k in range(1, order)])


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    passed: bool
    checked_through: int
    first_failure: int | None = None

    def line(self) -> str:
        status = "pass" if self.passed else f"FAIL at degree {self.first_failure}"
        return f"{self.name}: {status} (through degree {self.checked_through})"


IDENTITY_NAMES = (
    "dissymmetry: T* - T*^2/2 = T",
    "doubly rooted: T** = T*/(1 - T*)",
    "functional equation: T* = z exp(T*)",
    "second derivative: T'' = T'^2/(1 - z T')",
    "T1 = 1 - 1/T'",
    "T1' = 1/(1 - T*)",
    "T1'(s e^-s) = 1/(1 - s)",
    "T1(s e^-s) = 1 - e^-s",
)


def identity_suite(order: int, t1: PowerSeries | None = None) -> list[IdentityCheck]:
    """Check the tree generating-function identities coefficientwise through ``order``.

    ``t1`` replaces the built-in non-splittable series (for negative
    controls); it needs order >= ``order + 1``.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    work = order + 2
    rooted = rooted_tree_series(work)
    trees = tree_series(work)
    t1 = t1_series(work) if t1 is None else t1
    if t1.order < order + 1:
        raise ValueError(f"supplied T1 has order {t1.order}; need at least {order + 1}")
    z = PowerSeries.z(work)
    d1 = trees.derive()
    d2 = d1.derive()
    s_exp = z * (-z).exp()  # s e^{-s}, as a series in s
    t1p = t1.derive()

    pairs = [
        (rooted - rooted * rooted / 2, trees),
        (rooted.euler(), rooted / (1 - rooted)),
        (rooted, z * rooted.exp()),
        (d2, d1 * d1 / (1 - z * d1)),
        (t1, 1 - 1 / d1),
        (t1p, 1 / (1 - rooted)),
        (t1p.compose(s_exp), 1 / (1 - z)),
        (t1.compose(s_exp), 1 - (-z).exp()),
    ]
    out = []
    for name, (lhs, rhs) in zip(IDENTITY_NAMES, pairs):
        bad = lhs.first_mismatch(rhs, through=order)
        out.append(IdentityCheck(name, bad is None, order, bad))
    return out


def perturbed_t1(order: int, degree: int, delta: Number = 1) -> PowerSeries:
    """T1 through ``order`` with the coefficient at ``degree`` shifted by ``delta``."""
    coeffs = list(t1_series(order).coeffs)
    coeffs[degree] += delta
    return PowerSeries(coeffs)


def binomial_identity_check(n: int, m: int) -> bool:
    """sum_{k=1}^m C(-n,k) C(m-1,k-1) == (-1)^m C(n,m), exactly."""
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got n={n}, m={m}")
    lhs = sum((gen_binomial(-n, k) * math.comb(m - 1, k - 1) for k in range(1, m + 1)), Fraction(0))
    return lhs == (-1) ** m * math.comb(n, m)
