"""Cluster and virial coefficients by independent exact routes.

* ``graph+bell``: b_n summed over connected graphs, beta via Bell polynomials.
* ``graph+reversion``: same b_n, beta by series reversion.
* ``penrose-trees``: b_n and beta from weighted Penrose trees only, with
  beta_{n+1} = sum_m (-1)^m C(n, m) W_m(n+1), W_m the weighted sum over
  m-splittable trees on [n+1].

Conventions: p = sum b_n z^n / n!, p = sum beta_n rho^n / n!, b_1 = beta_1 = 1.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .graphcore import CapExceededError, LabeledGraph, connected_masks
from .models import WeightModel
from .models import graph_weight_sum, tree_weight
from .penrose import penrose_completion
from .series import PowerSeries, lagrange_virial, reversion_oracle
from .splitting import tree_splittabilities

ROUTES = {"bell": "graph+bell", "reversion": "graph+reversion", "trees": "penrose-trees"}


def _check_cap(model: WeightModel, nmax: int) -> None:
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    if nmax > model.max_n:
        raise CapExceededError(f"{model.name} coefficients are supported for n <= {model.max_n}, got {nmax}")


# ------------------------------------------------------------ graph route

@lru_cache(maxsize=None)
def cluster_coefficient(model: WeightModel, n: int) -> Fraction:
    """b_n = sum over connected graphs on [n] of the pinned graph weight."""
    _check_cap(model, n)
    masks = connected_masks(n)
    if model.kind == "onepoint":
        signs = 1 - 2 * (np.bitwise_count(masks).astype(np.int64) & 1)
        return Fraction(int(signs.sum()))
    return sum((graph_weight_sum(model, LabeledGraph(n, m)) for m in masks.tolist()), Fraction(0))


def cluster_coefficients(model: WeightModel, nmax: int) -> list[Fraction]:
    """[b_1, ..., b_nmax]."""
    _check_cap(model, nmax)
    return [cluster_coefficient(model, n) for n in range(1, nmax + 1)]


def virial_from_cluster(b: list[Fraction], nmax: int, method: str = "bell") -> list[Fraction]:
    invert = {"bell": lagrange_virial, "reversion": reversion_oracle}[method]
    return [Fraction(1)] + [invert(b, n) for n in range(1, nmax)]


def virial_via_bell(model: WeightModel, nmax: int) -> list[Fraction]:
    """[beta_1, ..., beta_nmax] through the Bell-polynomial inversion."""
    return virial_from_cluster(cluster_coefficients(model, nmax), nmax, "bell")


def virial_via_reversion(model: WeightModel, nmax: int) -> list[Fraction]:
    return virial_from_cluster(cluster_coefficients(model, nmax), nmax, "reversion")


# ------------------------------------------------------------- tree route

@lru_cache(maxsize=None)
def weighted_splittable_sums(model: WeightModel, n: int) -> dict[int, Fraction]:
    """m -> sum of tree weights over m-splittable trees on [n]."""
    _check_cap(model, n)
    if n == 1:
        return {}
    out: dict[int, Fraction] = {}
    for tree, m in tree_splittabilities(n):
        w = tree_weight(model, tree, penrose_completion(tree).extra)
        out[m] = out.get(m, Fraction(0)) + w
    return dict(sorted(out.items()))


def cluster_coefficients_via_trees(model: WeightModel, nmax: int) -> list[Fraction]:
    """b_n as the sum of tree weights over all trees on [n]."""
    _check_cap(model, nmax)
    return [Fraction(1)] + [sum(weighted_splittable_sums(model, n).values(), Fraction(0))
                            for n in range(2, nmax + 1)]


def virial_via_trees(model: WeightModel, nmax: int) -> list[Fraction]:
    _check_cap(model, nmax)
    out = [Fraction(1)]
    for n in range(1, nmax):
        sums = weighted_splittable_sums(model, n + 1)
        out.append(sum(((-1) ** m * math.comb(n, m) * w for m, w in sums.items()), Fraction(0)))
    return out


def t1_weighted_series(model: WeightModel, order: int) -> PowerSeries:
    """sum_k z^k/k! * (weighted sum over non-splittable trees on [k+1])."""
    _check_cap(model, order + 1)
    return PowerSeries([0] + [weighted_splittable_sums(model, k + 1).get(1, Fraction(0)) / math.factorial(k)
                              for k in range(1, order + 1)])


def virial_via_tree_series(model: WeightModel, nmax: int) -> list[Fraction]:
    """beta_{n+1} = n! [z^n] (1 - T1w)^n."""
    _check_cap(model, nmax)
    if nmax == 1:
        return [Fraction(1)]
    t1w = t1_weighted_series(model, nmax - 1)
    return [Fraction(1)] + [math.factorial(n) * ((1 - t1w) ** n)[n] for n in range(1, nmax)]


def weighted_splittable_consistency(model: WeightModel, n: int, m: int | None = None) -> bool:
    """W_m(n) == (n-1)! [z^(n-1)] T1w^m for the given m (default: every m in 1..n-1)."""
    _check_cap(model, n)
    if n < 2:
        raise ValueError("need n >= 2")
    ms = range(1, n) if m is None else [m]
    t1w = t1_weighted_series(model, n - 1)
    sums = weighted_splittable_sums(model, n)
    for k in ms:
        if not 1 <= k <= n - 1:
            raise ValueError(f"m must lie in 1..{n - 1}")
        if sums.get(k, Fraction(0)) != math.factorial(n - 1) * (t1w ** k)[n - 1]:
            return False
    return True


# ------------------------------------------------------------------ table

def _fmt_fraction(x: Fraction) -> str:
    return str(x)


@dataclass
class CoefficientTable:
    model: str
    nmax: int
    route: str
    b: list[Fraction]
    beta: list[Fraction]
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.b and self.b[0] != 1:
            raise ValueError("b_1 must be 1")
        if len(self.b) != self.nmax or len(self.beta) != self.nmax:
            raise ValueError("table length must equal nmax")

    def agrees_with(self, other: "CoefficientTable") -> bool:
        return self.model == other.model and self.b == other.b and self.beta == other.beta

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "nmax": self.nmax,
            "route": self.route,
            "b": [_fmt_fraction(x) for x in self.b],
            "beta": [_fmt_fraction(x) for x in self.beta],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "CoefficientTable":
        return cls(data["model"], int(data["nmax"]), data["route"],
                   [Fraction(x) for x in data["b"]], [Fraction(x) for x in data["beta"]])

    def csv_rows(self) -> list[list[str]]:
        rows = []
        for n, (bn, betan) in enumerate(zip(self.b, self.beta), 1):
            rows.append([self.model, self.route, str(n), str(bn), str(betan),
                         f"{float(bn):.15g}", f"{float(betan):.15g}"])
        return rows

    CSV_HEADER = ["model", "route", "n", "b_n", "beta_n", "b_n_lossy_decimal", "beta_n_lossy_decimal"]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.CSV_HEADER)
        writer.writerows(self.csv_rows())
        return buf.getvalue()


def compute_table(model: WeightModel, nmax: int, route: str) -> CoefficientTable:
    """Table for route ``bell``, ``reversion`` or ``trees``."""
    if route not in ROUTES:
        raise ValueError(f"unknown route {route!r}; choose from {sorted(ROUTES)}")
    if route == "trees":
        b = cluster_coefficients_via_trees(model, nmax)
        beta = virial_via_trees(model, nmax)
    else:
        b = cluster_coefficients(model, nmax)
        beta = virial_from_cluster(b, nmax, route)
    return CoefficientTable(model.name, nmax, ROUTES[route], b, beta)


def tables_agree(tables: list[CoefficientTable]) -> bool:
    return all(tables[0].agrees_with(t) for t in tables[1:])
