"""Orlicz function germs: evaluation, monotone inversion, conjugation, diagnostics.

An Orlicz function here is a germ on [0, t0] together with its tangent-line
continuation beyond t0.  All inversions run in log coordinates so that
arguments as small as 1e-120 resolve without underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "OrliczFunction",
    "ValidationReport",
    "Delta2Report",
    "make_function",
    "power",
    "power_log",
    "phi0",
    "phi1",
    "phi2",
    "psi1",
    "psi2",
    "tabulated",
    "conjugate",
    "validate",
    "delta2_probe",
]

# Floor for log-domain brackets: exp(-745) is the smallest positive double.
_LOG_T_FLOOR = -740.0
_BISECT_TOL = 1e-13
_BISECT_MAX_ITER = 260


class BracketError(RuntimeError):
    """Monotone solve could not bracket the requested value."""


def _bisect_increasing(f: Callable[[float], float], target: float,
                       lo: float, hi: float,
                       tol: float = _BISECT_TOL,
                       max_iter: int = _BISECT_MAX_ITER) -> float:
    """Solve f(x) = target for increasing f on [lo, hi] by bisection."""
    flo, fhi = f(lo), f(hi)
    if flo > target or fhi < target:
        raise BracketError(
            f"target {target!r} outside bracket values [{flo!r}, {fhi!r}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class OrliczFunction:
    """A germ on [0, t0] with tangent-line extension beyond t0.

    The germ callable must satisfy germ(0) = 0 and be evaluable on (0, t0].
    ``log_germ`` maps log t -> log germ(t) and exists so that evaluation stays
    accurate far below the underflow threshold of the linear formula.
    """

    label: str
    kind: str
    params: dict
    t0: float
    germ: Callable[[float], float] = field(repr=False)
    log_germ: Callable[[float], float] = field(repr=False)
    extension_slope: float = field(default=math.nan)
    # log-domain inverse fast path (closed form), set for power germs
    _log_inverse_exact: Optional[Callable[[float], float]] = field(
        default=None, repr=False)
    # vectorized log-germ (array of log t -> array of log phi), optional
    _vec_log_germ: Optional[Callable[[np.ndarray], np.ndarray]] = field(
        default=None, repr=False)

    def __post_init__(self):
        if not (self.t0 > 0):
            raise ValueError("t0 must be positive")
        if math.isnan(self.extension_slope):
            object.__setattr__(self, "extension_slope",
                               self._right_slope_at_t0())

    # -- evaluation ---------------------------------------------------------

    def _right_slope_at_t0(self) -> float:
        if math.isinf(self.t0):
            return math.inf
        h = self.t0 * 1e-7
        return (self.germ(self.t0) - self.germ(self.t0 - h)) / h

    def value_at_t0(self) -> float:
        return math.inf if math.isinf(self.t0) else self.germ(self.t0)

    def evaluate(self, t: float) -> float:
        """phi(t): germ below t0, tangent line above."""
        t = float(t)
        if not math.isfinite(t):
            raise ValueError(f"non-finite argument {t!r}")
        if t < 0:
            raise ValueError(f"negative argument {t!r}")
        if t == 0.0:
            return 0.0
        if t <= self.t0:
            return self.germ(t)
        return self.germ(self.t0) + self.extension_slope * (t - self.t0)

    def log_evaluate(self, log_t: float) -> float:
        """log phi(exp(log_t)), computed without underflow."""
        log_t = float(log_t)
        if log_t <= (math.log(self.t0) if math.isfinite(self.t0) else math.inf):
            return self.log_germ(log_t)
        t = math.exp(log_t)
        return math.log(self.evaluate(t))

    def evaluate_many(self, ts: np.ndarray) -> np.ndarray:
        """Vectorized evaluate over an array of nonnegative arguments."""
        ts = np.asarray(ts, dtype=float)
        out = np.zeros(ts.shape)
        pos = ts > 0.0
        germ_mask = pos & (ts <= self.t0)
        ext_mask = pos & ~germ_mask
        if np.any(germ_mask):
            tg = ts[germ_mask]
            if self._vec_log_germ is not None:
                out[germ_mask] = np.exp(self._vec_log_germ(np.log(tg)))
            else:
                out[germ_mask] = [self.germ(float(t)) for t in tg]
        if np.any(ext_mask):
            out[ext_mask] = (self.value_at_t0()
                             + self.extension_slope * (ts[ext_mask] - self.t0))
        return out

    # -- inversion ----------------------------------------------------------

    def inverse(self, s: float) -> float:
        """The t with phi(t) = s, for the extended function."""
        s = float(s)
        if not math.isfinite(s) or s < 0:
            raise ValueError(f"invalid argument {s!r}")
        if s == 0.0:
            return 0.0
        if math.isfinite(self.t0) and s > self.value_at_t0():
            return self.t0 + (s - self.value_at_t0()) / self.extension_slope
        return math.exp(self.log_inverse(math.log(s)))

    def log_inverse(self, log_s: float) -> float:
        """log of inverse(exp(log_s)), solved entirely in log coordinates."""
        log_s = float(log_s)
        if not math.isfinite(log_s):
            raise ValueError(f"non-finite argument {log_s!r}")
        if math.isfinite(self.t0):
            log_t0 = math.log(self.t0)
            # threshold through the same path as the bisection bracket top,
            # so no target can fall between the two
            log_cap = self.log_germ(log_t0)
            if log_s > log_cap:
                # tangent-line region; guard against overflow of exp(log_s)
                if log_s > 700.0:
                    return log_s - math.log(self.extension_slope)
                s = math.exp(log_s)
                return math.log(self.t0 + max(s - self.value_at_t0(), 0.0)
                                / self.extension_slope)
        if self._log_inverse_exact is not None:
            return self._log_inverse_exact(log_s)
        hi = math.log(self.t0) if math.isfinite(self.t0) else 700.0
        if not math.isfinite(self.t0):
            # expand upward until the germ exceeds the target
            hi = 1.0
            while self.log_germ(hi) < log_s:
                hi += 80.0
                if hi > 1e5:
                    raise BracketError("inverse bracket expansion failed (hi)")
        lo = hi - 80.0
        while self.log_germ(lo) > log_s:
            lo -= 160.0
            if lo < _LOG_T_FLOOR * 4:
                raise BracketError("inverse bracket expansion failed (lo)")
        return _bisect_increasing(self.log_germ, log_s, lo, hi, tol=1e-14)


# -- registry germs ---------------------------------------------------------


def power(p: float, label: Optional[str] = None) -> OrliczFunction:
    """t**p on all of [0, inf); no extension is ever used."""
    if p < 1:
        raise ValueError("power exponent must be >= 1 for convexity")
    return OrliczFunction(
        label=label or f"power[p={p:g}]",
        kind="power",
        params={"p": float(p)},
        t0=math.inf,
        germ=lambda t, p=p: t ** p,
        log_germ=lambda lt, p=p: p * lt,
        extension_slope=math.inf,
        _log_inverse_exact=lambda ls, p=p: ls / p,
        _vec_log_germ=lambda lt, p=p: p * lt,
    )


def _power_log_convexity_threshold(p: float, q: float) -> float:
    """Largest L = -log t at which scale*t^p*|log t|^q stops being convex.

    Second derivative has sign of p(p-1)L^2 - q(2p-1)L + q(q-1); the
    relevant root is the larger one.
    """
    a, b, c = p * (p - 1), -q * (2 * p - 1), q * (q - 1)
    if a == 0:
        return c / -b if b != 0 else 0.0
    disc = b * b - 4 * a * c
    if disc <= 0:
        return 0.0
    return (-b + math.sqrt(disc)) / (2 * a)


def power_log(p: float, q: float, scale: float,
              t0: Optional[float] = None,
              label: Optional[str] = None) -> OrliczFunction:
    """scale * t**p * |log t|**q on [0, t0].

    The default t0 sits below the convexity threshold of the germ.
    """
    if p <= 1 or q <= 0 or scale <= 0:
        raise ValueError("power_log requires p > 1, q > 0, scale > 0")
    if t0 is None:
        t0 = math.exp(-(_power_log_convexity_threshold(p, q) + 0.27))
    if t0 >= 1.0:
        raise ValueError("power_log germ needs t0 < 1 so |log t| = -log t")
    log_scale = math.log(scale)

    def germ(t, p=p, q=q, scale=scale):
        return scale * t ** p * abs(math.log(t)) ** q

    def log_germ(lt, p=p, q=q, log_scale=log_scale):
        return log_scale + p * lt + q * math.log(-lt)

    return OrliczFunction(
        label=label or f"power-log[p={p:g},q={q:g},scale={scale:g}]",
        kind="power-log",
        params={"p": float(p), "q": float(q), "scale": float(scale),
                "t0": float(t0)},
        t0=t0,
        germ=germ,
        log_germ=log_germ,
        _vec_log_germ=lambda lt, p=p, q=q, ls=log_scale: ls + p * lt
        + q * np.log(-lt),
    )


def phi0() -> OrliczFunction:
    """The identity germ t (generates the l1-type space)."""
    return power(1.0, label="phi0")


# Convexity of the phi1 germ fails above exp(-(3+sqrt(3))); e^-5 has margin.
_PHI1_T0 = math.exp(-5.0)


def phi1() -> OrliczFunction:
    """5^-2 t^2 |log t|^4 on [0, e^-5]."""
    return power_log(2.0, 4.0, 0.04, t0=_PHI1_T0, label="phi1")


def _phi2_core(t: float) -> float:
    # 2t + 2 sqrt(1-t) - 2 rewritten as 2t sqrt(1-t)/(1 + sqrt(1-t)),
    # which has no cancellation for small t
    w = math.sqrt(1.0 - t)
    return 2.0 * t * w / (1.0 + w)


def _phi2_exponent(t: float) -> float:
    # -2 + 2 sqrt(1-t) = -2t/(1 + sqrt(1-t)), cancellation-free
    return -2.0 * t / (1.0 + math.sqrt(1.0 - t))


def _phi2_germ(t: float) -> float:
    return math.exp(_phi2_exponent(t)) * _phi2_core(t) ** 2 / 25.0


def _phi2_log_germ(lt: float) -> float:
    t = math.exp(lt)
    w = math.sqrt(1.0 - t)
    # log core = log(2t) + log w - log(1+w), exact in log coordinates
    log_core = math.log(2.0) + lt + math.log(w) - math.log1p(w)
    return _phi2_exponent(t) + 2.0 * log_core - math.log(25.0)


def _phi2_vec_log_germ(lt: np.ndarray) -> np.ndarray:
    t = np.exp(lt)
    w = np.sqrt(1.0 - t)
    log_core = math.log(2.0) + lt + np.log(w) - np.log1p(w)
    return -2.0 * t / (1.0 + w) + 2.0 * log_core - math.log(25.0)


def phi2(t0: float = 0.1) -> OrliczFunction:
    """5^-2 e^(-2+2 sqrt(1-t)) (2t + 2 sqrt(1-t) - 2)^2 on [0, t0]."""
    return OrliczFunction(
        label="phi2", kind="phi2", params={"t0": float(t0)}, t0=t0,
        germ=_phi2_germ, log_germ=_phi2_log_germ,
        _vec_log_germ=_phi2_vec_log_germ,
    )


def _psi1_germ(t: float) -> float:
    return t * math.log(t) ** 2


def psi1(t0: float = 0.1) -> OrliczFunction:
    """t |log t|^2 on [0, t0].  Increasing there but concave: kept in the
    registry for identity checks, expected to fail convexity validation."""
    return OrliczFunction(
        label="psi1", kind="psi1", params={"t0": float(t0)}, t0=t0,
        germ=_psi1_germ,
        log_germ=lambda lt: lt + 2.0 * math.log(-lt),
        _vec_log_germ=lambda lt: lt + 2.0 * np.log(-lt),
    )


def _psi2_germ(s: float) -> float:
    # r = -1 + sqrt(1-s) = -s/(1 + sqrt(1-s)), cancellation-free
    r = -s / (1.0 + math.sqrt(1.0 - s))
    return math.exp(r) * (s - r * r)


def _psi2_log_germ(ls: float) -> float:
    s = math.exp(ls)
    r = -s / (1.0 + math.sqrt(1.0 - s))
    # s - r^2 = s (1 - s/(1+sqrt(1-s))^2); the inner ratio stays below 1/4
    # on the germ domain
    return ls + math.log1p(-r * r / s) + r


def _psi2_vec_log_germ(ls: np.ndarray) -> np.ndarray:
    s = np.exp(ls)
    r = -s / (1.0 + np.sqrt(1.0 - s))
    return ls + np.log1p(-np.divide(r * r, np.maximum(s, 1e-320))) + r


def psi2(t0: float = 0.1) -> OrliczFunction:
    """e^(-1+sqrt(1-s)) (s - (-1+sqrt(1-s))^2) on [0, t0]."""
    return OrliczFunction(
        label="psi2", kind="psi2", params={"t0": float(t0)}, t0=t0,
        germ=_psi2_germ, log_germ=_psi2_log_germ,
        _vec_log_germ=_psi2_vec_log_germ,
    )


def tabulated(points: Sequence[Sequence[float]],
              label: Optional[str] = None) -> OrliczFunction:
    """Monotone germ through (t, phi(t)) pairs, interpolated in log-log."""
    from scipy.interpolate import PchipInterpolator

    pts = sorted((float(t), float(v)) for t, v in points)
    if len(pts) < 2:
        raise ValueError("tabulated germ needs at least two points")
    ts = np.array([t for t, _ in pts])
    vs = np.array([v for _, v in pts])
    if np.any(ts <= 0) or np.any(vs <= 0):
        raise ValueError("tabulated points must be strictly positive")
    if np.any(np.diff(vs) <= 0):
        raise ValueError("tabulated values must be strictly increasing")
    interp = PchipInterpolator(np.log(ts), np.log(vs), extrapolate=True)

    def log_germ(lt, interp=interp):
        return float(interp(lt))

    return OrliczFunction(
        label=label or f"tabulated[{len(pts)} pts]",
        kind="tabulated",
        params={"points": [[t, v] for t, v in pts]},
        t0=float(ts[-1]),
        germ=lambda t: math.exp(log_germ(math.log(t))),
        log_germ=log_germ,
        _vec_log_germ=lambda lt, interp=interp: np.asarray(interp(lt)),
    )


_NAMED = {"phi0": phi0, "phi1": phi1, "phi2": phi2, "psi1": psi1, "psi2": psi2}


def make_function(config: dict) -> OrliczFunction:
    """Build a registry function from a JSON-style parameter object."""
    if "kind" not in config:
        raise ValueError("function config needs a 'kind' field")
    kind = config["kind"]
    if kind == "power":
        return power(config["p"])
    if kind == "power-log":
        return power_log(config["p"], config["q"], config["scale"],
                         t0=config.get("t0"))
    if kind == "tabulated":
        return tabulated(config["points"])
    if kind in _NAMED:
        return _NAMED[kind]()
    raise ValueError(f"unknown function kind {kind!r}")


def function_config(phi: OrliczFunction) -> dict:
    """JSON-style parameter object reproducing the registry function."""
    if phi.label in _NAMED:
        return {"kind": phi.label}
    cfg = {"kind": phi.kind}
    cfg.update(phi.params)
    return cfg


# -- validation -------------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    label: str
    passed: bool
    zero_at_zero: float
    worst_monotonicity: float   # most negative forward difference, relative
    worst_convexity: float      # most positive midpoint-convexity excess, rel.
    worst_positivity: float     # smallest germ value on the grid
    extension_jump: float       # relative germ/extension mismatch at t0

    def violations(self) -> list[str]:
        out = []
        if self.zero_at_zero != 0.0:
            out.append("germ(0) != 0")
        if self.worst_monotonicity < -_VALIDATE_TOL:
            out.append("decreasing on grid")
        if self.worst_convexity > _VALIDATE_TOL:
            out.append("midpoint convexity fails")
        if self.worst_positivity <= 0.0:
            out.append("degenerate (non-positive) germ value")
        if self.extension_jump > 1e-6:
            out.append("extension discontinuous at t0")
        return out


_VALIDATE_TOL = 1e-9


def validate(phi: OrliczFunction, grid_size: int = 64) -> ValidationReport:
    """Check the Orlicz axioms on a log-spaced grid over (0, t0].

    Returns a report; never raises on violations.
    """
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    hi = phi.t0 if math.isfinite(phi.t0) else 1e6
    grid = np.exp(np.linspace(math.log(hi) - 36.0, math.log(hi), grid_size))
    vals = np.array([phi.evaluate(t) for t in grid])

    diffs = np.diff(vals)
    scale = np.maximum(vals[1:], 1e-300)
    worst_mono = float(np.min(diffs / scale)) if len(diffs) else 0.0

    # midpoint convexity: phi((a+b)/2) <= (phi(a)+phi(b))/2
    mids = 0.5 * (grid[:-1] + grid[1:])
    mid_vals = np.array([phi.evaluate(t) for t in mids])
    chord = 0.5 * (vals[:-1] + vals[1:])
    conv_excess = (mid_vals - chord) / np.maximum(chord, 1e-300)
    worst_conv = float(np.max(conv_excess)) if len(conv_excess) else 0.0

    worst_pos = float(np.min(vals))

    if math.isfinite(phi.t0):
        eps = phi.t0 * 1e-9
        below = phi.evaluate(phi.t0)
        above = phi.evaluate(phi.t0 * (1 + 1e-9)) - phi.extension_slope * (
            phi.t0 * (1 + 1e-9) - phi.t0)
        ext_jump = abs(above - below) / max(abs(below), 1e-300)
        del eps
    else:
        ext_jump = 0.0

    zero = phi.evaluate(0.0)
    passed = (zero == 0.0 and worst_mono >= -_VALIDATE_TOL
              and worst_conv <= _VALIDATE_TOL and worst_pos > 0.0
              and ext_jump <= 1e-6)
    return ValidationReport(
        label=phi.label, passed=passed, zero_at_zero=zero,
        worst_monotonicity=worst_mono, worst_convexity=worst_conv,
        worst_positivity=worst_pos, extension_jump=ext_jump)


# -- Delta-2 probe ----------------------------------------------------------


@dataclass(frozen=True)
class Delta2Report:
    label: str
    sup_ratio: float
    grid: list  # (t, ratio) samples


def delta2_probe(phi: OrliczFunction, n_samples: int = 200) -> Delta2Report:
    """Sample phi(2t)/phi(t) on a log grid down to 1e-100.

    Reports the finite-grid supremum; makes no claim about the true limsup.
    """
    hi = phi.t0 / 2 if math.isfinite(phi.t0) else 1.0
    ts = np.exp(np.linspace(math.log(1e-100), math.log(hi), n_samples))
    samples = []
    for t in ts:
        lt = math.log(t)
        ratio = math.exp(phi.log_evaluate(lt + math.log(2.0))
                         - phi.log_evaluate(lt))
        samples.append((float(t), float(ratio)))
    sup = max(r for _, r in samples)
    return Delta2Report(label=phi.label, sup_ratio=sup, grid=samples)


# -- Legendre-Fenchel conjugation -------------------------------------------

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f: Callable[[float], float], lo: float, hi: float,
                rtol: float = 1e-12, max_iter: int = 200) -> tuple[float, float]:
    """Golden-section maximum of f on [lo, hi]; returns (argmax, max)."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
        if b - a <= rtol * max(abs(a), abs(b), 1e-30):
            break
    x = 0.5 * (a + b)
    return x, f(x)


def legendre_transform(f: Callable[[float], float], y: float,
                       x_hi: float, n_scan: int = 240) -> tuple[float, float]:
    """sup_x (x*y - f(x)) over (0, x_hi], robust to non-concave inner problems.

    First halves down from x_hi to find the region where the objective is
    positive (f(x)/x below y), then scans a log grid through it and refines
    the best bracket by golden section.  Returns (value, argmax); the value
    is clipped at 0, the supremum's limit as x -> 0.
    """
    if y <= 0.0:
        return 0.0, 0.0

    def g(x):
        return x * y - f(x)

    x_top = x_hi
    while x_top > 1e-300 and f(x_top) / x_top > y:
        x_top *= 0.5
    if x_top <= 1e-300:
        # the conjugate value is below double-precision resolution
        return 0.0, 0.0
    x_top = min(2.0 * x_top, x_hi)

    xs = np.exp(np.linspace(math.log(x_top) - 30.0, math.log(x_top), n_scan))
    vals = np.array([g(x) for x in xs])
    k = int(np.argmax(vals))
    lo = xs[max(k - 1, 0)]
    hi = xs[min(k + 1, len(xs) - 1)]
    x_star, v_star = _golden_max(g, lo, hi)
    if v_star <= 0.0:
        return 0.0, 0.0
    return v_star, x_star


def conjugate(phi: OrliczFunction, label: Optional[str] = None) -> OrliczFunction:
    """Numerical Legendre-Fenchel conjugate of the extended function.

    Each value is a fresh inner maximization (no global tabulation).  For a
    germ with a finite tangent slope m the conjugate is finite on [0, m) and
    jumps to infinity at m; the germ is capped just under m and continued
    with a steep affine piece that stands in for the jump, which keeps
    Luxemburg norms of the conjugate honest near the cap.
    """
    m = phi.extension_slope
    if math.isfinite(m):
        if m <= 0:
            raise ValueError("conjugate needs a strictly increasing input")
        t0_star = 0.999 * m
    else:
        t0_star = 1e8

    def maximizer_cap(y: float) -> float:
        if math.isfinite(phi.t0):
            return phi.t0
        # double until the secant slope beyond x exceeds y
        x = 1.0
        while phi.evaluate(2 * x) - phi.evaluate(x) < x * y:
            x *= 2.0
            if x > 1e200:
                raise BracketError("conjugate inner sup appears to diverge")
        return 2 * x

    def germ(y: float) -> float:
        val, _ = legendre_transform(phi.evaluate, y, maximizer_cap(y))
        return val

    def log_germ(ly: float) -> float:
        v = germ(math.exp(ly))
        if v <= 0.0:
            return -math.inf
        return math.log(v)

    slope = math.nan
    if math.isfinite(m):
        cap_value = germ(t0_star)
        tangent = (cap_value - germ(t0_star * (1 - 1e-7))) / (t0_star * 1e-7)
        slope = max(tangent, 1e9 * max(cap_value, 1e-300) / t0_star)

    return OrliczFunction(
        label=label or f"conj({phi.label})",
        kind="conjugate",
        params={"of": phi.label},
        t0=t0_star,
        germ=germ,
        log_germ=log_germ,
        extension_slope=slope,
    )
