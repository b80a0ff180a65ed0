"""Sampling distributions with closed-form central moments.

The simulation harness draws from these and scores estimators against the
closed forms. Exponential central moments come from the derangement
numbers: mu_k = D(k) / rate**k. ``Exponential(2)`` therefore has
mu_2..mu_8 = 0.25, 0.25, 0.5625, 1.375, 4.140625, 14.484375, 57.94140625.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exact import FiniteDistribution
from .kernels import K_MAX


@lru_cache(maxsize=None)
def derangement(k: int) -> int:
    """Number of fixed-point-free permutations of k items."""
    if k < 0:
        raise ValueError("derangement index must be nonnegative")
    if k == 0:
        return 1
    if k == 1:
        return 0
    return (k - 1) * (derangement(k - 1) + derangement(k - 2))


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream: (seed, stream path) -> generator.

    Uses the counter-based Philox generator keyed through a seed sequence,
    so any (seed, stream) pair yields the same draws on every run and under
    any parallel schedule. Streams with distinct paths are independent.
    """

    seed: int
    stream: tuple[int, ...] = ()

    def child(self, *path: int) -> "RngStream":
        return RngStream(self.seed, self.stream + path)

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.stream)
        return np.random.Generator(np.random.Philox(ss))


class DistributionSpec:
    """A named sampling distribution paired with exact central moments."""

    def __init__(self, kind: str, **params):
        if kind == "exponential":
            rate = float(params.pop("rate"))
            if rate <= 0:
                raise ValueError("exponential rate must be positive")
            self.rate = rate
        elif kind == "normal":
            self.mean_param = float(params.pop("mean"))
            sd = float(params.pop("sd"))
            if sd <= 0:
                raise ValueError("normal sd must be positive")
            self.sd = sd
        elif kind == "finite":
            dist = params.pop("dist")
            if not isinstance(dist, FiniteDistribution):
                raise ValueError("finite specs wrap a FiniteDistribution")
            self.dist = dist
        else:
            raise ValueError(f"unknown distribution kind {kind!r}")
        if params:
            raise ValueError(f"unexpected parameters: {sorted(params)}")
        self.kind = kind

    @classmethod
    def exponential(cls, rate: float) -> "DistributionSpec":
        return cls("exponential", rate=rate)

    @classmethod
    def normal(cls, mean: float, sd: float) -> "DistributionSpec":
        return cls("normal", mean=mean, sd=sd)

    @classmethod
    def finite(cls, dist: FiniteDistribution) -> "DistributionSpec":
        return cls("finite", dist=dist)

    def label(self) -> str:
        if self.kind == "exponential":
            return f"exp:{self.rate:g}"
        if self.kind == "normal":
            return f"normal:{self.mean_param:g},{self.sd:g}"
        return f"finite[{len(self.dist)} atoms]"

    def mean(self) -> float:
        if self.kind == "exponential":
            return 1.0 / self.rate
        if self.kind == "normal":
            return self.mean_param
        return self.dist.mean()

    def true_central_moment(self, k: int) -> float:
        """Closed-form k-th central moment."""
        if k < 1:
            raise ValueError("moment order must be >= 1")
        if k > 2 * K_MAX:
            raise ValueError(f"closed forms provided up to order {2 * K_MAX}")
        if k == 1:
            return 0.0
        if self.kind == "exponential":
            return derangement(k) / self.rate**k
        if self.kind == "normal":
            if k % 2:
                return 0.0
            # (k-1)!! * sd^k
            return self.sd**k * math.prod(range(k - 1, 0, -2))
        return self.dist.central_moment(k)

    def sample(self, gen: np.random.Generator, n: int) -> np.ndarray:
        """Draw n i.i.d. values using the supplied generator."""
        if n < 1:
            raise ValueError("sample size must be >= 1")
        if self.kind == "exponential":
            return gen.exponential(scale=1.0 / self.rate, size=n)
        if self.kind == "normal":
            return gen.normal(self.mean_param, self.sd, size=n)
        return gen.choice(self.dist.support, size=n, p=self.dist.weights)


def load_finite_json(path: str) -> FiniteDistribution:
    """Read a finite distribution from {"support": [...], "weights": [...]}."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict) or "support" not in payload:
        raise ValueError(f"{path}: expected an object with a 'support' array")
    return FiniteDistribution(payload["support"], payload.get("weights"))


def parse_distribution(text: str) -> DistributionSpec:
    """Parse CLI distribution specs: exp:RATE, normal:MEAN,SD, finite:@FILE."""
    kind, sep, rest = text.partition(":")
    kind = kind.strip().lower()
    if not sep:
        raise ValueError(f"malformed distribution spec {text!r}")
    try:
        if kind == "exp":
            return DistributionSpec.exponential(float(rest))
        if kind == "normal":
            mean_s, sd_s = rest.split(",")
            return DistributionSpec.normal(float(mean_s), float(sd_s))
        if kind == "finite":
            if not rest.startswith("@"):
                raise ValueError("finite specs take a JSON file: finite:@dist.json")
            return DistributionSpec.finite(load_finite_json(rest[1:]))
    except (ValueError, OSError) as exc:
        raise ValueError(f"malformed distribution spec {text!r}: {exc}") from exc
    raise ValueError(f"unknown distribution kind {kind!r} (use exp, normal or finite)")
