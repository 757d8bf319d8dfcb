"""Numerical lower bounds on the virial convergence radius.

Everything runs in numpy ``longdouble`` (80-bit extended on x86) and is
rounded to float only on output.  The solvers are plain bracketed bisection
carried to the precision limit of the type.

For stability factor u:

* c(u) is the smallest positive root of  u c T1'(u c) - T1(u c) = u  on (0, 1/(e u));
* t(u) is the root in (0, 1) of  e^{-t} / (1 - t) = 1 + u;
* alpha(u) is the root in (0, 1) of  alpha e^{-alpha} = 1 / ((1 + u) e);
* the radius coefficient is  c / (1 + T1(u c) / u)  and must equal alpha(u).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, asdict

import numpy as np

LD = np.longdouble
_E = np.exp(LD(1))
# series tail target used inside the solvers; well below longdouble spacing near 1
_SOLVER_SERIES_TOL = 1e-24
_MAX_TERMS = 50_000_000

# Published comparison values at u = 1, shown next to the computed ones.
GROENEVELD_ANCHOR_U1 = 0.237961
LEBOWITZ_PENROSE_ANCHOR_U1 = 0.144766998


class BracketError(RuntimeError):
    pass


class EquivalenceError(RuntimeError):
    """radius_coeff and alpha disagree beyond tolerance."""


def _terms_needed(r: float, tol: float) -> int:
    # a_n = n^n x^n / n! <= (e x)^n = r^n and consecutive ratios stay below r,
    # so the tail after N terms is at most r^(N+1) / (1 - r)
    if r == 0:
        return 1
    n = math.ceil(math.log(tol * (1 - r)) / math.log(r)) + 2
    return max(n, 4)


def _t1_pair(x, tol: float) -> tuple:
    """(T1(x), T1'(x)) in longdouble for 0 <= x < 1/e."""
    x = LD(x)
    if x < 0:
        raise ValueError("T1 is evaluated on [0, 1/e) only")
    r = x * _E
    if r >= 1:
        raise ValueError(f"x = {float(x)!r} is outside the disc of convergence (|x| < 1/e)")
    if x == 0:
        return LD(0), LD(1)
    count = _terms_needed(float(r), tol)
    if count > _MAX_TERMS:
        raise ValueError(f"x = {float(x)!r} is too close to 1/e ({count} terms needed)")
    m = np.arange(1, count, dtype=LD)
    ratios = np.empty(count, dtype=LD)
    ratios[0] = x
    ratios[1:] = x * np.exp(m * np.log1p(1 / m))  # a_{m+1}/a_m = x (1 + 1/m)^m
    a = np.cumprod(ratios)  # a_n = n^n x^n / n!, n = 1..count
    n = np.arange(1, count + 1, dtype=LD)
    # T1 = x + sum_n a_n x/(n+1);  T1' = 1 + sum_n a_n
    t1 = x + np.sum(a[::-1] * x / (n[::-1] + 1))
    t1p = 1 + np.sum(a[::-1])
    return t1, t1p


def t1_eval(x: float, tol: float = 1e-16) -> float:
    """T1(x) = x + sum n^n x^(n+1)/(n+1)!, tail below ``tol``."""
    return float(_t1_pair(x, tol)[0])


def t1_prime_eval(x: float, tol: float = 1e-16) -> float:
    return float(_t1_pair(x, tol)[1])


def _bisect(f, lo, hi):
    """Root of an increasing f on (lo, hi), to the last representable bit."""
    lo, hi = LD(lo), LD(hi)
    while True:
        mid = (lo + hi) / 2
        if mid <= lo or mid >= hi:
            break
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return lo if abs(f(lo)) <= abs(f(hi)) else hi


def _c_equation(u):
    u = LD(u)

    def f(c):
        t1, t1p = _t1_pair(u * c, _SOLVER_SERIES_TOL)
        return u * c * t1p - t1 - u
    return f


def _t_equation(u):
    u = LD(u)
    return lambda t: np.exp(-t) / (1 - t) - (1 + u)


def _alpha_equation(u):
    target = 1 / ((1 + LD(u)) * _E)
    # alpha e^{-alpha} increases on (0, 1)
    return lambda a: a * np.exp(-a) - target


def _check_u(u: float) -> None:
    if not u > 0 or not math.isfinite(u):
        raise ValueError(f"u must be positive and finite, got {u!r}")


def _solve_c(u: float):
    _check_u(u)
    f = _c_equation(u)
    lo, hi = LD(0), 1 / (_E * LD(u))
    if f(lo) >= 0:
        raise BracketError(f"c-equation not negative at c = 0 for u = {u}")
    # f grows without bound at the disc edge; probe inward until positive
    probe = hi * (1 - LD(2) ** -10)
    while f(probe) <= 0:
        probe = probe + (hi - probe) / 2
        if hi - probe < hi * LD(1e-15):
            raise BracketError(f"c-equation has no sign change below 1/(e u) for u = {u}")
    root = _bisect(f, lo, probe)
    return root, f(root)


def _solve_t(u: float):
    _check_u(u)
    f = _t_equation(u)
    # f(0) = -u < 0 and f -> +inf as t -> 1
    root = _bisect(f, 0, 1)
    return root, f(root)


def _solve_alpha(u: float):
    _check_u(u)
    f = _alpha_equation(u)
    root = _bisect(f, 0, 1)
    return root, f(root)


def solve_c(u: float, tol: float = 1e-13) -> float:
    c, res = _solve_c(u)
    if not abs(res) <= tol:
        raise ArithmeticError(f"c-equation residual {float(res):.3e} exceeds {tol:g} at u = {u}")
    return float(c)


def solve_t(u: float, tol: float = 1e-13) -> float:
    t, res = _solve_t(u)
    if not abs(res) <= tol:
        raise ArithmeticError(f"t-equation residual {float(res):.3e} exceeds {tol:g} at u = {u}")
    return float(t)


def solve_alpha(u: float, tol: float = 1e-13) -> float:
    a, res = _solve_alpha(u)
    if not abs(res) <= tol:
        raise ArithmeticError(f"alpha-equation residual {float(res):.3e} exceeds {tol:g} at u = {u}")
    return float(a)


@dataclass(frozen=True)
class BoundResult:
    u: float
    t: float
    c: float
    alpha: float
    radius_coeff: float
    residual_c: float
    residual_alpha: float
    residual_t: float
    equivalence_gap: float

    CSV_FIELDS = ("u", "t", "c", "alpha", "radius_coeff", "residual_c", "residual_alpha")

    def csv_row(self) -> list[str]:
        return [fmt15(getattr(self, k)) for k in self.CSV_FIELDS]

    def line(self) -> str:
        return ("u={u} t={t} c={c} alpha={alpha} radius_coeff={radius_coeff} "
                "residual_c={residual_c} residual_alpha={residual_alpha} gap={equivalence_gap}").format(
            **{k: fmt15(v) for k, v in asdict(self).items()})


def fmt15(x: float) -> str:
    """Fixed 15-significant-digit scientific notation."""
    return f"{x:.14e}"


def _radius_ld(u: float):
    c, res_c = _solve_c(u)
    t1, _ = _t1_pair(LD(u) * c, _SOLVER_SERIES_TOL)
    return c, res_c, c / (1 + t1 / LD(u)), t1


def radius_bound(u: float, tol: float = 1e-13) -> BoundResult:
    """Radius coefficient with all roots, residuals and the alpha cross-check.

    Raises ``EquivalenceError`` when |radius_coeff - alpha| > 10 tol.
    """
    c, res_c, radius, _ = _radius_ld(u)
    t, res_t = _solve_t(u)
    alpha, res_a = _solve_alpha(u)
    gap = abs(radius - alpha)
    result = BoundResult(float(u), float(t), float(c), float(alpha), float(radius),
                         float(res_c), float(res_a), float(res_t), float(gap))
    if not gap <= 10 * tol:
        raise EquivalenceError(f"radius_coeff {float(radius)!r} vs alpha {float(alpha)!r} at u = {u}: gap {float(gap):.3e}")
    return result


@dataclass(frozen=True)
class VirialBoundRow:
    n: int
    bound: float


def virial_bound_table(u: float, C: float, nmax: int) -> list[VirialBoundRow]:
    """Upper bounds on |beta_{n+1}|/(n+1)!: C^n/(n+1) ((1 + T1(uc)/u)/c)^n."""
    _check_u(u)
    if not C > 0:
        raise ValueError("C must be positive")
    c, _, _, t1 = _radius_ld(u)
    ratio = LD(C) * (1 + t1 / LD(u)) / c
    return [VirialBoundRow(n, float(ratio ** n / (n + 1))) for n in range(1, nmax + 1)]


def log_grid(u_min: float, u_max: float, steps: int) -> list[float]:
    if not 0 < u_min <= u_max:
        raise ValueError("need 0 < u_min <= u_max")
    if steps < 1 or (steps == 1 and u_min != u_max):
        raise ValueError("steps must be >= 2 for a nontrivial range")
    if steps == 1:
        return [float(u_min)]
    return [float(x) for x in np.geomspace(u_min, u_max, steps)]


def read_lp_table(text: str) -> dict[float, float]:
    """CSV with columns u, lp_bound (header required)."""
    reader = csv.DictReader(io.StringIO(text))
    if not reader.fieldnames or not {"u", "lp_bound"} <= set(reader.fieldnames):
        raise ValueError("LP table needs columns 'u' and 'lp_bound'")
    return {float(row["u"]): float(row["lp_bound"]) for row in reader if row["lp_bound"].strip()}


def _lookup(table: dict[float, float], u: float) -> float | None:
    for key, value in table.items():
        if math.isclose(key, u, rel_tol=1e-9):
            return value
    return None


def curve_rows(u_min: float, u_max: float, steps: int, lp_table: dict[float, float] | None = None,
               tol: float = 1e-13) -> list[tuple[float, float, float | None]]:
    """(u, groeneveld_bound, lp_bound-or-None) over a log grid; each point is
    checked against alpha(u) by ``radius_bound``."""
    anchors = {1.0: LEBOWITZ_PENROSE_ANCHOR_U1}
    if lp_table:
        anchors.update(lp_table)
    rows = []
    for u in log_grid(u_min, u_max, steps):
        radius = radius_bound(u, tol).radius_coeff
        rows.append((u, radius, _lookup(anchors, u)))
    return rows


def curve_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["u", "groeneveld_bound", "lp_bound"])
    for u, g, lp in rows:
        writer.writerow([fmt15(u), fmt15(g), "" if lp is None else fmt15(lp)])
    return buf.getvalue()


def bounds_csv(results: list[BoundResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BoundResult.CSV_FIELDS)
    writer.writerows(r.csv_row() for r in results)
    return buf.getvalue()
