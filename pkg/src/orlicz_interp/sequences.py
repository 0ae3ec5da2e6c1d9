"""Finitely supported sequences, the modular, Luxemburg norm, and a
brute-force dual-norm oracle for small supports."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Tuple

import numpy as np

from .functions import OrliczFunction

__all__ = ["FiniteSequence", "modular", "luxemburg_norm", "dual_norm_oracle"]


@dataclass(frozen=True)
class FiniteSequence:
    """A finitely supported complex sequence indexed by positive integers.

    Zero entries are dropped at construction; every stored value is nonzero
    and finite.
    """

    entries: Mapping[int, complex]
    _abs_cache: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        clean = {}
        for n, v in self.entries.items():
            n = int(n)
            v = complex(v)
            if n < 1:
                raise ValueError(f"index {n} is not a positive integer")
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"non-finite entry at index {n}")
            if v != 0:
                clean[n] = v
        object.__setattr__(self, "entries", dict(sorted(clean.items())))
        object.__setattr__(self, "_abs_cache", None)

    # -- constructors --------------------------------------------------------

    @classmethod
    def _trusted(cls, entries: Dict[int, complex]) -> "FiniteSequence":
        """Internal constructor for entries already known to be clean."""
        out = object.__new__(cls)
        object.__setattr__(out, "entries", entries)
        object.__setattr__(out, "_abs_cache", None)
        return out

    @staticmethod
    def from_values(values: Iterable[complex], start: int = 1) -> "FiniteSequence":
        return FiniteSequence({start + i: v for i, v in enumerate(values)})

    @staticmethod
    def unit(n: int) -> "FiniteSequence":
        """The basis vector e_n."""
        return FiniteSequence({n: 1.0})

    @staticmethod
    def flat(n: int) -> "FiniteSequence":
        """s_n = n^(-1/2) * (e_1 + ... + e_n), a unit vector of l2."""
        v = complex(1.0 / math.sqrt(n))
        return FiniteSequence._trusted(dict.fromkeys(range(1, n + 1), v))

    # -- basic structure -----------------------------------------------------

    @property
    def support_size(self) -> int:
        return len(self.entries)

    def indices(self) -> list[int]:
        return sorted(self.entries.keys())

    def __getitem__(self, n: int) -> complex:
        return self.entries.get(n, 0.0 + 0.0j)

    def abs_values(self) -> Tuple[np.ndarray, np.ndarray]:
        """(unique absolute values, multiplicities) over the support."""
        if self._abs_cache is None:
            mags = np.abs(np.array(list(self.entries.values()), dtype=complex))
            vals, counts = np.unique(mags, return_counts=True)
            object.__setattr__(self, "_abs_cache", (vals, counts))
        return self._abs_cache

    def sup_norm(self) -> float:
        if not self.entries:
            return 0.0
        return float(max(abs(v) for v in self.entries.values()))

    def lp_norm(self, p: float) -> float:
        if not self.entries:
            return 0.0
        mags = np.abs(np.array(list(self.entries.values()), dtype=complex))
        if math.isinf(p):
            return float(mags.max())
        return float((mags ** p).sum() ** (1.0 / p))

    # -- algebra -------------------------------------------------------------

    def scale(self, lam: complex) -> "FiniteSequence":
        lam = complex(lam)
        if lam == 0:
            return FiniteSequence._trusted({})
        return FiniteSequence._trusted(
            {n: lam * v for n, v in self.entries.items()})

    def add(self, other: "FiniteSequence") -> "FiniteSequence":
        out = dict(self.entries)
        for n, v in other.entries.items():
            out[n] = out.get(n, 0.0) + v
        return FiniteSequence._trusted({n: v for n, v in out.items() if v != 0})

    def sub(self, other: "FiniteSequence") -> "FiniteSequence":
        return self.add(other.scale(-1.0))

    def multiply(self, other: "FiniteSequence") -> "FiniteSequence":
        """Pointwise product; support shrinks to the intersection."""
        get = other.entries.get
        out = {n: v * get(n, 0.0) for n, v in self.entries.items()}
        return FiniteSequence._trusted({n: v for n, v in out.items() if v != 0})

    def real_part(self) -> "FiniteSequence":
        return FiniteSequence._trusted(
            {n: complex(v.real) for n, v in self.entries.items()
             if v.real != 0.0})

    def imag_part(self) -> "FiniteSequence":
        return FiniteSequence._trusted(
            {n: complex(v.imag) for n, v in self.entries.items()
             if v.imag != 0.0})

    # -- serialization -------------------------------------------------------

    def to_triples(self) -> list[list[float]]:
        return [[n, v.real, v.imag] for n, v in sorted(self.entries.items())]

    @staticmethod
    def from_triples(triples: Iterable[Iterable[float]]) -> "FiniteSequence":
        return FiniteSequence({int(n): complex(re, im) for n, re, im in triples})

    def to_json(self) -> str:
        return json.dumps(self.to_triples())

    @staticmethod
    def from_json(text: str) -> "FiniteSequence":
        return FiniteSequence.from_triples(json.loads(text))


def modular(phi: OrliczFunction, x: FiniteSequence, rho: float) -> float:
    """sum over the support of phi(|x(n)| / rho)."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    vals, counts = x.abs_values()
    if len(vals) == 0:
        return 0.0
    return float(np.dot(counts.astype(float), phi.evaluate_many(vals / rho)))


_NORM_REL_TOL = 1e-13
_NORM_MAX_ITER = 240


def luxemburg_norm(phi: OrliczFunction, x: FiniteSequence) -> float:
    """inf{rho > 0 : modular(phi, x, rho) <= 1}, by bisection on rho.

    The bracket grows/shrinks by doubling from the sup norm, which always
    brackets for a convex modular on finite support.  The returned rho makes
    the modular equal to 1 to well below the 1e-6 contract.
    """
    if x.support_size == 0:
        return 0.0
    hi = x.sup_norm()
    it = 0
    while modular(phi, x, hi) > 1.0:
        hi *= 2.0
        it += 1
        if it > 2000:
            raise RuntimeError("norm bracket expansion failed upward")
    lo = hi
    while modular(phi, x, lo) <= 1.0:
        lo *= 0.5
        it += 1
        if lo == 0.0 or it > 4000:
            # modular stays <= 1 for every rho > 0; infimum is 0
            return 0.0
    for _ in range(_NORM_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if modular(phi, x, mid) > 1.0:
            lo = mid
        else:
            hi = mid
        if (hi - lo) <= _NORM_REL_TOL * hi:
            return hi
    raise RuntimeError("luxemburg norm bisection did not converge")


def _norm_of_direction(phi: OrliczFunction, d: np.ndarray) -> float:
    seq = FiniteSequence({i + 1: float(v) for i, v in enumerate(d) if v != 0})
    return luxemburg_norm(phi, seq)


def dual_norm_oracle(phi: OrliczFunction, y: FiniteSequence,
                     ball_samples: int = 12, seed: int = 0) -> float:
    """Lower estimate of the Koethe dual norm sup_{||x||_phi <= 1} sum |y x|.

    Brute force on the support of y: seeded directions plus random restarts,
    each refined by multiplicative coordinate ascent of
    f(d) = sum(|y| d) / ||d||_phi over positive directions d.
    """
    if y.support_size > 8:
        raise ValueError("dual_norm_oracle is capped at support size 8")
    if y.support_size == 0:
        return 0.0
    w = np.abs(np.array(list(y.entries.values()), dtype=complex)).astype(float)
    m = len(w)
    rng = np.random.default_rng(seed)

    def objective(d: np.ndarray) -> float:
        nrm = _norm_of_direction(phi, d)
        if nrm == 0:
            return 0.0
        return float(np.dot(w, d) / nrm)

    starts = [w ** theta for theta in (0.5, 1.0, 2.0, 3.0)]
    starts.append(np.ones(m))
    for _ in range(max(ball_samples - len(starts), 0)):
        starts.append(rng.dirichlet(np.ones(m)) + 1e-6)

    best = 0.0
    for d0 in starts:
        d = d0 / d0.max()
        val = objective(d)
        step = 0.5
        for _ in range(60):
            improved = False
            for i in range(m):
                for factor in (1.0 + step, 1.0 / (1.0 + step)):
                    trial = d.copy()
                    trial[i] *= factor
                    tval = objective(trial)
                    if tval > val:
                        d, val, improved = trial, tval, True
            if not improved:
                step *= 0.5
                if step < 1e-7:
                    break
        best = max(best, val)
    return best
