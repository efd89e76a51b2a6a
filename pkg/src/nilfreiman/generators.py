"""Instance generators for the test corpus."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

import numpy as np

from .finset import SymSet, power
from .ratlinalg import coord_dim, coord_index
from .subalg import Subalgebra, lie_closure
from .unigroup import NilVec, check_n

KINDS = ("heisenberg_box", "unitri_box", "word_ball", "central_interval", "random_subset", "custom_file")


def _box_rows(lengths) -> np.ndarray:
    axes = [np.arange(-L, L + 1, dtype=np.int64) for L in lengths]
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=1)


def unitri_box(n: int, lengths) -> SymSet:
    """Integer unitriangular matrices with |entry q| <= lengths[q] (graded order), symmetrized."""
    check_n(n)
    lengths = [int(L) for L in lengths]
    if len(lengths) != coord_dim(n):
        raise ValueError(f"unitri_box for n={n} needs {coord_dim(n)} side lengths, got {len(lengths)}")
    if any(L < 0 for L in lengths):
        raise ValueError("side lengths must be non-negative")
    return SymSet(n, _box_rows(lengths)).symmetrized()


def raw_box_size(lengths) -> int:
    size = 1
    for L in lengths:
        size *= 2 * int(L) + 1
    return size


def heisenberg_box(L1: int, L2: int, L3: int) -> SymSet:
    """|a| <= L1 at (1,2), |b| <= L2 at (2,3), |c| <= L3 at (1,3); returned as S u S^-1."""
    return unitri_box(3, (L1, L2, L3))


def central_interval(L: int, n: int = 3) -> SymSet:
    """{z^c : |c| <= L} with z the elementary matrix at the corner (1, n)."""
    if L < 0:
        raise ValueError("L must be non-negative")
    lengths = [0] * coord_dim(n)
    lengths[coord_index(n)[(0, n - 1)]] = L
    return unitri_box(n, lengths)


def elementary_generators(n: int) -> SymSet:
    """{id} u {I +- E_(i,i+1)}."""
    check_n(n)
    rows = [[0] * coord_dim(n)]
    for i in range(n - 1):
        for s in (1, -1):
            r = [0] * coord_dim(n)
            r[i] = s  # the superdiagonal coordinates come first in graded order
            rows.append(r)
    return SymSet(n, np.asarray(rows, dtype=np.int64))


def word_ball(n: int, r: int) -> SymSet:
    """All products of at most r elementary generators I +- E_(i,i+1)."""
    if r < 0:
        raise ValueError("radius must be non-negative")
    if r == 0:
        return SymSet.identity(check_n(n))
    return power(elementary_generators(n), r)


def random_subset(n: int, size: int, radius: int, seed: int) -> SymSet:
    """Symmetrized random sample of ``size`` distinct integer elements with |entries| <= radius."""
    rng = random.Random(seed)
    m = coord_dim(n)
    pool = list(itertools.product(range(-radius, radius + 1), repeat=m))
    pick = rng.sample(pool, min(size, len(pool)))
    return SymSet(n, np.asarray(pick, dtype=np.int64).reshape(-1, m)).symmetrized()


def random_subalgebra(n: int, rng: random.Random, max_gens: int = 2, radius: int = 2) -> Subalgebra:
    """Lie closure of one or more random small-integer vectors; may be zero or full."""
    m = coord_dim(n)
    gens = [NilVec(n, tuple(rng.randint(-radius, radius) for _ in range(m))) for _ in range(rng.randint(1, max_gens))]
    return lie_closure(gens, n)


@dataclass(frozen=True)
class InstanceSpec:
    kind: str
    params: tuple = ()
    n: int = 3
    seed: int = 0
    path: str | None = field(default=None)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown instance kind {self.kind!r}; choose from {KINDS}")
        if any(int(p) < 0 for p in self.params):
            raise ValueError("instance parameters must be non-negative")

    @property
    def name(self) -> str:
        if self.kind == "custom_file":
            return f"custom_file({self.path})"
        args = ",".join(str(p) for p in self.params)
        if self.kind in ("unitri_box", "word_ball") or (self.kind == "central_interval" and self.n != 3):
            args = f"n={self.n};{args}"
        if self.kind == "random_subset":
            args = f"n={self.n};{args};seed={self.seed}"
        return f"{self.kind}({args})"

    @property
    def slug(self) -> str:
        """File-name friendly form of :attr:`name`."""
        out = self.name
        for a, b in (("(", "_"), (")", ""), (",", "_"), (";", "_"), ("=", "")):
            out = out.replace(a, b)
        return out

    def raw_size(self) -> int | None:
        """Size of the coordinate box before symmetrization, for box kinds."""
        p = [int(x) for x in self.params]
        if self.kind in ("heisenberg_box", "unitri_box", "central_interval"):
            return raw_box_size(p)
        return None

    def build(self) -> SymSet:
        p = [int(x) for x in self.params]
        if self.kind == "heisenberg_box":
            if len(p) != 3:
                raise ValueError("heisenberg_box takes three side lengths")
            return heisenberg_box(*p)
        if self.kind == "unitri_box":
            return unitri_box(self.n, p)
        if self.kind == "word_ball":
            if len(p) != 1:
                raise ValueError("word_ball takes one radius")
            return word_ball(self.n, p[0])
        if self.kind == "central_interval":
            if len(p) != 1:
                raise ValueError("central_interval takes one half-length")
            return central_interval(p[0], self.n)
        if self.kind == "random_subset":
            if len(p) != 2:
                raise ValueError("random_subset takes (size, radius)")
            return random_subset(self.n, p[0], p[1], self.seed)
        import json

        with open(self.path) as fh:
            return SymSet.from_json(json.load(fh))

    @classmethod
    def parse(cls, text: str) -> "InstanceSpec":
        """Parse names like ``heisenberg_box(2,2,8)`` or ``word_ball(n=3;4)``."""
        text = text.strip()
        kind, _, rest = text.partition("(")
        if not rest.endswith(")"):
            raise ValueError(f"cannot parse instance {text!r}")
        body = rest[:-1]
        n, seed, params = 3, 0, []
        for part in filter(None, body.replace(";", ",").split(",")):
            part = part.strip()
            if part.startswith("n="):
                n = int(part[2:])
            elif part.startswith("seed="):
                seed = int(part[5:])
            else:
                params.append(int(part))
        if kind == "custom_file":
            return cls(kind, (), path=body)
        return cls(kind, tuple(params), n=n, seed=seed)


CORPUS = (
    InstanceSpec("central_interval", (5,)),
    InstanceSpec("heisenberg_box", (1, 1, 2)),
    InstanceSpec("heisenberg_box", (2, 2, 8)),
    InstanceSpec("heisenberg_box", (3, 3, 12)),
    InstanceSpec("word_ball", (3,), n=3),
    InstanceSpec("word_ball", (4,), n=3),
    InstanceSpec("unitri_box", (1, 1, 1, 0, 0, 1), n=4),
)

GOLDEN = (
    InstanceSpec("central_interval", (5,)),
    InstanceSpec("heisenberg_box", (2, 2, 8)),
    InstanceSpec("word_ball", (4,), n=3),
)
