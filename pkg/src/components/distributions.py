"""
Analytic synthetic distributions D = (mu, eta) with exact support geometry.

Supports are finite unions of points, segments and circles with uniform
marginals; the line distribution (uniform on [0, 1] with eta(x) = x) is the
only distribution whose eta is not piecewise constant.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence, Tuple
import logging
import math
import re

import numpy as np
from scipy import integrate

from src.entity.config_entity import CertificationConfig
from src.exception.exception import (
    EmptySupportSet,
    InvalidParameter,
    QueryOutsideSupport,
)
from src.utils.common import make_rng

logger = logging.getLogger(__name__)

ON_SUPPORT_TOL = 1e-9


def as_point(x, dim: int = None) -> np.ndarray:
    """Coerce ``x`` to a finite float vector, optionally of a fixed dimension."""
    point = np.atleast_1d(np.asarray(x, dtype=float)).reshape(-1)
    if dim is not None and point.shape[0] != dim:
        raise InvalidParameter(f"expected a point of dimension {dim}, got {point.shape[0]}")
    if not np.all(np.isfinite(point)):
        raise InvalidParameter(f"point has non-finite coordinates: {point}")
    return point


def as_points(xs, dim: int) -> np.ndarray:
    """Coerce ``xs`` to an (m, dim) float array."""
    points = np.asarray(xs, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, dim) if dim > 1 else points.reshape(-1, 1)
    if points.ndim != 2 or points.shape[1] != dim:
        raise InvalidParameter(f"expected points of shape (m, {dim}), got {points.shape}")
    return points


@dataclass(frozen=True)
class SinglePoint:
    center: Tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def length(self) -> float:
        return 0.0

    def distance(self, xs: np.ndarray) -> np.ndarray:
        return np.linalg.norm(xs - np.asarray(self.center), axis=1)

    def project(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.center, dtype=float)

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        return np.tile(np.asarray(self.center, dtype=float), (m, 1))

    def ball_length(self, x: np.ndarray, r: float) -> float:
        # counting measure; only used when a support holds nothing but points
        return 1.0 if np.linalg.norm(x - np.asarray(self.center)) <= r else 0.0

    def farthest(self, x: np.ndarray) -> float:
        return float(np.linalg.norm(x - np.asarray(self.center)))

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        c = np.asarray(self.center, dtype=float)
        return c, c

    def skeleton(self, m: int) -> np.ndarray:
        return np.asarray(self.center, dtype=float).reshape(1, -1)

    def to_text(self) -> str:
        return f"point({_fmt(self.center)})"


@dataclass(frozen=True)
class Segment:
    a: Tuple[float, ...]
    b: Tuple[float, ...]

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise InvalidParameter("segment endpoints differ in dimension")
        if np.allclose(self.a, self.b, rtol=0.0, atol=0.0):
            raise InvalidParameter("segment endpoints must differ")

    @property
    def dim(self) -> int:
        return len(self.a)

    @property
    def length(self) -> float:
        return float(np.linalg.norm(np.subtract(self.b, self.a)))

    def _closest(self, xs: np.ndarray) -> np.ndarray:
        a = np.asarray(self.a, dtype=float)
        ab = np.asarray(self.b, dtype=float) - a
        t = np.clip((xs - a) @ ab / (ab @ ab), 0.0, 1.0)
        return a + t[:, None] * ab

    def distance(self, xs: np.ndarray) -> np.ndarray:
        return np.linalg.norm(xs - self._closest(xs), axis=1)

    def project(self, x: np.ndarray) -> np.ndarray:
        return self._closest(x.reshape(1, -1))[0]

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        a = np.asarray(self.a, dtype=float)
        t = rng.random(m)
        return a + t[:, None] * (np.asarray(self.b, dtype=float) - a)

    def ball_length(self, x: np.ndarray, r: float) -> float:
        a = np.asarray(self.a, dtype=float)
        ab = np.asarray(self.b, dtype=float) - a
        ax = a - x
        qa, qb, qc = ab @ ab, 2.0 * (ax @ ab), ax @ ax - r * r
        disc = qb * qb - 4.0 * qa * qc
        if disc <= 0.0:
            return 0.0
        root = math.sqrt(disc)
        lo = max((-qb - root) / (2.0 * qa), 0.0)
        hi = min((-qb + root) / (2.0 * qa), 1.0)
        return max(hi - lo, 0.0) * self.length

    def farthest(self, x: np.ndarray) -> float:
        return float(max(np.linalg.norm(x - np.asarray(self.a)), np.linalg.norm(x - np.asarray(self.b))))

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        a, b = np.asarray(self.a, dtype=float), np.asarray(self.b, dtype=float)
        return np.minimum(a, b), np.maximum(a, b)

    def skeleton(self, m: int) -> np.ndarray:
        a = np.asarray(self.a, dtype=float)
        t = np.linspace(0.0, 1.0, max(m, 2))
        return a + t[:, None] * (np.asarray(self.b, dtype=float) - a)

    def to_text(self) -> str:
        return f"segment({_fmt(self.a)};{_fmt(self.b)})"


@dataclass(frozen=True)
class Circle:
    center: Tuple[float, float]
    radius: float

    def __post_init__(self):
        if len(self.center) != 2:
            raise InvalidParameter("circles are only defined in the plane")
        if not self.radius > 0:
            raise InvalidParameter(f"circle radius must be positive, got {self.radius}")

    @property
    def dim(self) -> int:
        return 2

    @property
    def length(self) -> float:
        return 2.0 * math.pi * self.radius

    def distance(self, xs: np.ndarray) -> np.ndarray:
        return np.abs(np.linalg.norm(xs - np.asarray(self.center), axis=1) - self.radius)

    def project(self, x: np.ndarray) -> np.ndarray:
        c = np.asarray(self.center, dtype=float)
        offset = x - c
        norm = np.linalg.norm(offset)
        if norm == 0.0:
            return c + np.array([self.radius, 0.0])
        return c + self.radius * offset / norm

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        theta = rng.random(m) * 2.0 * math.pi
        c = np.asarray(self.center, dtype=float)
        return c + self.radius * np.column_stack([np.cos(theta), np.sin(theta)])

    def ball_length(self, x: np.ndarray, r: float) -> float:
        delta = float(np.linalg.norm(x - np.asarray(self.center)))
        big_r = self.radius
        if delta == 0.0:
            return self.length if r >= big_r else 0.0
        cos_half = (delta * delta + big_r * big_r - r * r) / (2.0 * delta * big_r)
        if cos_half >= 1.0:
            return 0.0
        if cos_half <= -1.0:
            return self.length
        return 2.0 * big_r * math.acos(cos_half)

    def farthest(self, x: np.ndarray) -> float:
        return float(np.linalg.norm(x - np.asarray(self.center)) + self.radius)

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        c = np.asarray(self.center, dtype=float)
        return c - self.radius, c + self.radius

    def skeleton(self, m: int) -> np.ndarray:
        theta = np.linspace(0.0, 2.0 * math.pi, max(m, 3), endpoint=False)
        c = np.asarray(self.center, dtype=float)
        return c + self.radius * np.column_stack([np.cos(theta), np.sin(theta)])

    def to_text(self) -> str:
        return f"circle({_fmt(self.center)};{self.radius!r})"


def _fmt(coords: Sequence[float]) -> str:
    return ",".join(repr(float(c)) for c in coords)


@dataclass(frozen=True)
class SupportSet:
    """Finite union of primitives carrying the uniform (length) measure."""
    primitives: Tuple = ()

    def __post_init__(self):
        dims = {p.dim for p in self.primitives}
        if len(dims) > 1:
            raise InvalidParameter(f"primitives of mixed dimension: {sorted(dims)}")

    @property
    def is_empty(self) -> bool:
        return len(self.primitives) == 0

    @property
    def dim(self) -> int:
        return self.primitives[0].dim if self.primitives else 0

    @property
    def total_length(self) -> float:
        return float(sum(p.length for p in self.primitives))

    def union(self, other: "SupportSet") -> "SupportSet":
        return SupportSet(self.primitives + other.primitives)

    def _weights(self) -> np.ndarray:
        lengths = np.array([p.length for p in self.primitives], dtype=float)
        if lengths.sum() > 0:
            return lengths / lengths.sum()
        return np.full(len(self.primitives), 1.0 / len(self.primitives))

    def distance(self, xs) -> np.ndarray:
        """Exact Euclidean distance from every row of ``xs`` to the union."""
        if self.is_empty:
            raise EmptySupportSet("distance requested to an empty support set")
        xs = as_points(xs, self.dim)
        return np.min(np.stack([p.distance(xs) for p in self.primitives]), axis=0)

    def contains(self, xs, tol: float = ON_SUPPORT_TOL) -> np.ndarray:
        if self.is_empty:
            return np.zeros(np.asarray(xs).shape[0], dtype=bool)
        return self.distance(xs) <= tol

    def nearest_point(self, x: np.ndarray) -> np.ndarray:
        if self.is_empty:
            raise EmptySupportSet("nearest point requested on an empty support set")
        candidates = [p.project(x) for p in self.primitives]
        gaps = [np.linalg.norm(x - c) for c in candidates]
        return candidates[int(np.argmin(gaps))]

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        if self.is_empty:
            raise EmptySupportSet("cannot sample from an empty support set")
        out = np.empty((m, self.dim))
        if len(self.primitives) == 1:
            out[:] = self.primitives[0].sample(rng, m)
            return out
        which = rng.choice(len(self.primitives), size=m, p=self._weights())
        for j, primitive in enumerate(self.primitives):
            mask = which == j
            if mask.any():
                out[mask] = primitive.sample(rng, int(mask.sum()))
        return out

    def ball_fraction(self, x: np.ndarray, r: float) -> float:
        """Share of this set's uniform measure inside the closed ball B(x, r)."""
        if self.is_empty:
            return 0.0
        total = self.total_length
        if total > 0:
            return min(sum(p.ball_length(x, r) for p in self.primitives if p.length > 0) / total, 1.0)
        return sum(p.ball_length(x, r) for p in self.primitives) / len(self.primitives)

    def farthest(self, x: np.ndarray) -> float:
        return max(p.farthest(x) for p in self.primitives)

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        los, his = zip(*(p.bounds() for p in self.primitives))
        return np.min(los, axis=0), np.max(his, axis=0)

    def skeleton(self, m: int) -> np.ndarray:
        """Deterministic points spread over every primitive."""
        return np.vstack([p.skeleton(m) for p in self.primitives])

    def to_text(self) -> str:
        return " + ".join(p.to_text() for p in self.primitives)


class SupportKind(str, Enum):
    POS = "pos"
    NEG = "neg"
    HALF = "half"
    NEG_AND_HALF = "neg_and_half"
    POS_AND_HALF = "pos_and_half"


class EtaKind(str, Enum):
    IDENTITY = "identity"
    PIECEWISE = "piecewise"


@dataclass(frozen=True)
class DataDistribution:
    """
    D = (mu, eta) built from three support sets.

    ``pos_support``, ``neg_support`` and ``half_support`` hold mu+, mu- and
    mu^{1/2}; the unions needed by the different conventions are exposed
    through :meth:`support`. On piecewise distributions mu^{1/2} only fixes
    eta = 1/2 and the neighbourhood labels: it carries no sampling mass, so
    ``sample`` and ``ball_mass`` see mu+ and mu- alone.
    """
    pos_support: SupportSet
    neg_support: SupportSet
    half_support: SupportSet = field(default_factory=SupportSet)
    pos_weight: float = 0.5
    label_noise: float = 0.0
    eta_kind: EtaKind = EtaKind.PIECEWISE
    name: str = "custom"

    def __post_init__(self):
        if not 0.0 <= self.pos_weight <= 1.0:
            raise InvalidParameter(f"pos_weight must lie in [0, 1], got {self.pos_weight}")
        if not 0.0 <= self.label_noise < 0.5:
            raise InvalidParameter(f"label_noise must lie in [0, 0.5), got {self.label_noise}")
        if self.pos_support.is_empty and self.half_support.is_empty:
            raise InvalidParameter("distribution has no positive or half support")
        if self.neg_support.is_empty and self.half_support.is_empty:
            raise InvalidParameter("distribution has no negative or half support")
        # samples are drawn from pos_support and neg_support only
        if self.pos_weight > 0 and self.pos_support.is_empty:
            raise InvalidParameter(f"pos_weight {self.pos_weight} needs a non-empty positive support")
        if self.neg_weight > 0 and self.neg_support.is_empty:
            raise InvalidParameter(f"negative weight {self.neg_weight} needs a non-empty negative support")
        dims = {s.dim for s in (self.pos_support, self.neg_support, self.half_support) if not s.is_empty}
        if len(dims) != 1:
            raise InvalidParameter(f"supports disagree on dimension: {sorted(dims)}")
        if self.eta_kind == EtaKind.PIECEWISE:
            self._check_disjoint()

    def _check_disjoint(self):
        sets = [s for s in (self.pos_support, self.neg_support, self.half_support) if not s.is_empty]
        for i, first in enumerate(sets):
            for second in sets[i + 1:]:
                if np.any(second.contains(first.skeleton(512))) or np.any(first.contains(second.skeleton(512))):
                    raise InvalidParameter("support sets must be pairwise disjoint")

    @property
    def dim(self) -> int:
        for s in (self.pos_support, self.neg_support, self.half_support):
            if not s.is_empty:
                return s.dim
        return 0

    @property
    def neg_weight(self) -> float:
        return 1.0 - self.pos_weight

    def support(self, which: SupportKind) -> SupportSet:
        which = SupportKind(which)
        if which == SupportKind.POS:
            return self.pos_support
        if which == SupportKind.NEG:
            return self.neg_support
        if which == SupportKind.HALF:
            return self.half_support
        if which == SupportKind.NEG_AND_HALF:
            return self.neg_support.union(self.half_support)
        return self.pos_support.union(self.half_support)

    def support_distance(self, which: SupportKind, x) -> float:
        """Exact distance from ``x`` to the named union of supports."""
        return float(self.support(which).distance(as_point(x, self.dim).reshape(1, -1))[0])

    def support_distances(self, which: SupportKind, xs) -> np.ndarray:
        return self.support(which).distance(xs)

    def neighbor_bayes_labels(self, xs) -> np.ndarray:
        """
        Label of the nearer support: +1 iff rho(x, mu+ u mu^{1/2}) <= rho(x, mu-).

        Raises:
            EmptySupportSet: one side of the comparison is empty.
        """
        xs = as_points(xs, self.dim)
        to_pos = self.support(SupportKind.POS_AND_HALF).distance(xs)
        to_neg = self.support(SupportKind.NEG).distance(xs)
        return np.where(to_pos <= to_neg + CertificationConfig().TIE_TOL, 1, -1)

    def on_support(self, x) -> bool:
        x = as_point(x, self.dim)
        if self.eta_kind == EtaKind.IDENTITY:
            return bool(0.0 <= x[0] <= 1.0)
        row = x.reshape(1, -1)
        return any(bool(s.contains(row)[0]) for s in (self.pos_support, self.neg_support, self.half_support)
                   if not s.is_empty)

    def eta(self, x) -> float:
        """
        P(y = +1 | x).

        Raises:
            QueryOutsideSupport: when eta is undefined at ``x``.
        """
        x = as_point(x, self.dim)
        if self.eta_kind == EtaKind.IDENTITY:
            if not 0.0 <= x[0] <= 1.0:
                raise QueryOutsideSupport(f"eta(x) = x is only defined on [0, 1], got {x[0]}")
            return float(x[0])
        row = x.reshape(1, -1)
        if not self.half_support.is_empty and self.half_support.contains(row)[0]:
            return 0.5
        if not self.pos_support.is_empty and self.pos_support.contains(row)[0]:
            return 1.0 - self.label_noise
        if not self.neg_support.is_empty and self.neg_support.contains(row)[0]:
            return self.label_noise
        raise QueryOutsideSupport(f"eta is undefined off the support, got x = {x.tolist()}")

    def bayes_label(self, x) -> int:
        return 1 if self.eta(x) >= 0.5 else -1

    def bayes_accuracy(self) -> float:
        if self.eta_kind == EtaKind.IDENTITY:
            value, _ = integrate.quad(lambda t: max(t, 1.0 - t), 0.0, 1.0, points=[0.5])
            return float(value)
        return 1.0 - self.label_noise

    def ball_mass(self, x, r: float) -> float:
        """mu(B(x, r)) for the closed ball."""
        x = as_point(x, self.dim)
        if r < 0:
            return 0.0
        if self.eta_kind == EtaKind.IDENTITY:
            return float(max(min(x[0] + r, 1.0) - max(x[0] - r, 0.0), 0.0))
        return (self.pos_weight * self.pos_support.ball_fraction(x, r)
                + self.neg_weight * self.neg_support.ball_fraction(x, r))

    def farthest_support(self, x) -> float:
        x = as_point(x, self.dim)
        return max(s.farthest(x) for s in (self.pos_support, self.neg_support) if not s.is_empty)

    def domain_box(self) -> Tuple[np.ndarray, np.ndarray]:
        """Axis-aligned box covering every support set."""
        boxes = [s.bounds() for s in (self.pos_support, self.neg_support, self.half_support) if not s.is_empty]
        return np.min([b[0] for b in boxes], axis=0), np.max([b[1] for b in boxes], axis=0)

    def sample(self, n: int, seed: int) -> "Dataset":
        """
        Draw n labelled samples i.i.d. from D.

        Deterministic given ``seed``; the Philox stream is consumed in a fixed
        order (locations, labels, tie-break keys).
        """
        if n < 0:
            raise InvalidParameter(f"sample size must be non-negative, got {n}")
        rng = make_rng(seed)
        d = self.dim
        if self.eta_kind == EtaKind.IDENTITY:
            xs = rng.random(n).reshape(n, 1)
            ys = np.where(rng.random(n) < xs[:, 0], 1, -1)
        else:
            from_pos = rng.random(n) < self.pos_weight
            xs = np.empty((n, d))
            k = int(from_pos.sum())
            if k:
                xs[from_pos] = self.pos_support.sample(rng, k)
            if n - k:
                xs[~from_pos] = self.neg_support.sample(rng, n - k)
            base = np.where(from_pos, 1, -1)
            flipped = rng.random(n) < self.label_noise
            ys = np.where(flipped, -base, base)
        keys = rng.random(n)
        while np.unique(keys).size < n:
            keys = rng.random(n)
        return Dataset(xs, ys.astype(np.int8), seed, keys)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Ordered labelled samples with per-sample tie-break keys."""
    X: np.ndarray
    y: np.ndarray
    seed: int
    tiebreak_keys: np.ndarray

    def __post_init__(self):
        if len(self.X) != len(self.y) or len(self.y) != len(self.tiebreak_keys):
            raise InvalidParameter("X, y and tiebreak_keys must have equal length")
        if len(self.y) and not np.all(np.isin(self.y, (-1, 1))):
            raise InvalidParameter("labels must be +1 or -1")
        for array in (self.X, self.y, self.tiebreak_keys):
            array.flags.writeable = False

    def __len__(self):
        return len(self.y)

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    @classmethod
    def from_arrays(cls, X, y, seed: int = 0, tiebreak_keys=None) -> "Dataset":
        """Build a dataset from explicit arrays; keys default to a seeded draw."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        y = np.asarray(y, dtype=np.int8)
        if tiebreak_keys is None:
            rng = make_rng(seed)
            tiebreak_keys = rng.random(len(y))
            while np.unique(tiebreak_keys).size < len(y):
                tiebreak_keys = rng.random(len(y))
        return cls(X.copy(), y.copy(), seed, np.asarray(tiebreak_keys, dtype=float).copy())

    def with_labels(self, y) -> "Dataset":
        """Same locations and keys, new labels."""
        return Dataset(self.X.copy(), np.asarray(y, dtype=np.int8).copy(), self.seed, self.tiebreak_keys.copy())


def make_line_distribution() -> DataDistribution:
    """mu = Uniform[0, 1], eta(x) = x."""
    return DataDistribution(
        pos_support=SupportSet((Segment((0.5,), (1.0,)),)),
        neg_support=SupportSet((Segment((0.0,), (0.5,)),)),
        half_support=SupportSet((SinglePoint((0.5,)),)),
        pos_weight=0.5,
        label_noise=0.0,
        eta_kind=EtaKind.IDENTITY,
        name="line",
    )


def make_two_circles_distribution() -> DataDistribution:
    """Unit circle (+, weight 0.7) around a small offset circle (-, weight 0.3), noise 0.2."""
    return DataDistribution(
        pos_support=SupportSet((Circle((0.0, 0.0), 1.0),)),
        neg_support=SupportSet((Circle((0.5, 0.0), 0.2),)),
        pos_weight=0.7,
        label_noise=0.2,
        name="two_circles",
    )


def make_two_segments_distribution(pos=(0.0, 0.3), neg=(0.7, 1.0), noise=0.1, pos_weight=0.5) -> DataDistribution:
    return DataDistribution(
        pos_support=SupportSet((Segment((pos[0],), (pos[1],)),)),
        neg_support=SupportSet((Segment((neg[0],), (neg[1],)),)),
        pos_weight=pos_weight,
        label_noise=noise,
        name="two_segments",
    )


_PRIMITIVE = re.compile(r"^\s*(point|segment|circle)\s*\((.*)\)\s*$")


def parse_support(text: str) -> SupportSet:
    """
    Parse ``point(x1,x2) + segment(a1,a2;b1,b2) + circle(cx,cy;r)``.

    The empty string is the empty support set.
    """
    text = text.strip()
    if not text:
        return SupportSet()
    primitives = []
    for chunk in text.split("+"):
        match = _PRIMITIVE.match(chunk)
        if not match:
            raise InvalidParameter(f"cannot parse support primitive '{chunk.strip()}'")
        kind, body = match.groups()
        try:
            parts = [tuple(float(v) for v in part.split(",")) for part in body.split(";")]
        except ValueError as e:
            raise InvalidParameter(f"non-numeric coordinate in '{chunk.strip()}'") from e
        if kind == "point" and len(parts) == 1:
            primitives.append(SinglePoint(parts[0]))
        elif kind == "segment" and len(parts) == 2:
            primitives.append(Segment(parts[0], parts[1]))
        elif kind == "circle" and len(parts) == 2 and len(parts[1]) == 1:
            primitives.append(Circle(parts[0], parts[1][0]))
        else:
            raise InvalidParameter(f"wrong number of arguments in '{chunk.strip()}'")
    return SupportSet(tuple(primitives))


def make_distribution(kind: str, pos: str = "", neg: str = "", half: str = "",
                      pos_weight: float = 0.5, noise: float = 0.0) -> DataDistribution:
    """Build a distribution from the config keys ``distribution.*``."""
    if kind == "line":
        return make_line_distribution()
    if kind == "two_circles":
        return make_two_circles_distribution()
    if kind == "supports":
        return DataDistribution(
            pos_support=parse_support(pos),
            neg_support=parse_support(neg),
            half_support=parse_support(half),
            pos_weight=pos_weight,
            label_noise=noise,
            name="supports",
        )
    raise InvalidParameter(f"unknown distribution kind '{kind}'")
