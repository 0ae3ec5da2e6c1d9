"""Command-line front end: norms, conjugates, interpolation, derivations,
example tables, and a self-check battery.  All outputs are deterministic
CSV/JSON keyed by explicit seeds."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import functions as fn
from .sequences import FiniteSequence, luxemburg_norm, modular
from .interpolation import (
    Arc,
    FiniteFamily,
    centralizer_defect,
    derivation,
    derivation_via_arc_integrals,
    harmonic_measure,
    herglotz_prime,
    interpolated_function,
    interpolated_inverse,
    iz_quadrature_check,
)
from .example import (
    divergence_report,
    example_family,
    sandwich_check,
    witness_row,
)

DEFAULT_SEED = 20240901


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v)
                              for v in row))
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_family(spec: str) -> FiniteFamily:
    if spec == "paper":
        return example_family()
    path = Path(spec)
    if not path.exists():
        raise ValueError(f"family file not found: {spec}")
    try:
        config = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed family JSON in {spec}: {exc}") from exc
    if "pieces" not in config:
        raise ValueError("family config missing field 'pieces'")
    for i, piece in enumerate(config["pieces"]):
        for key in ("function", "arc"):
            if key not in piece:
                raise ValueError(f"family piece {i} missing field '{key}'")
    return FiniteFamily.from_config(config)


def _parse_z(text: str) -> complex:
    parts = text.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"cannot parse z from {text!r}; use RE or RE,IM")


def _parse_x(spec: str, seed: int) -> FiniteSequence:
    if spec.startswith("sn:"):
        return FiniteSequence.flat(int(spec[3:]))
    if spec.startswith("e:"):
        return FiniteSequence.unit(int(spec[2:]))
    if spec.startswith("file:"):
        return FiniteSequence.from_json(Path(spec[5:]).read_text())
    if spec.startswith("random:"):
        m = int(spec[7:])
        rng = np.random.default_rng(seed)
        return FiniteSequence.from_values(
            rng.normal(size=m) + 1j * rng.normal(size=m))
    raise ValueError(f"cannot parse x spec {spec!r}; "
                     "use sn:N, e:N, random:N or file:PATH")


def _parse_grid(spec: str) -> np.ndarray:
    try:
        lo, hi, count = spec.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError as exc:
        raise ValueError(f"cannot parse grid {spec!r}; use LO:HI:COUNT") from exc
    if not (0 < lo < hi) or count < 2:
        raise ValueError(f"invalid grid bounds in {spec!r}")
    return np.exp(np.linspace(math.log(lo), math.log(hi), count))


def _parse_function(text: str) -> fn.OrliczFunction:
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed function JSON: {exc}") from exc
    return fn.make_function(config)


# -- commands ----------------------------------------------------------------


def _cmd_norm(args) -> int:
    if args.function:
        phi = _parse_function(args.function)
    else:
        family = _load_family(args.family)
        phi = interpolated_function(family, _parse_z(args.z))
    x = _parse_x(args.x, args.seed)
    value = luxemburg_norm(phi, x)
    rows = [("norm", value), ("support_size", x.support_size)]
    if value > 0:
        rows.append(("modular_at_norm", modular(phi, x, value)))
    _write_csv(args.out, ["quantity", "value"], rows)
    return 0


def _cmd_conjugate(args) -> int:
    phi = _parse_function(args.function)
    conj = fn.conjugate(phi)
    grid = _parse_grid(args.grid)
    rows = [(float(y), conj.evaluate(float(y))) for y in grid]
    _write_csv(args.out, ["y", "conjugate"], rows)
    return 0


def _cmd_interpolate(args) -> int:
    family = _load_family(args.family)
    z = _parse_z(args.z)
    grid = _parse_grid(args.grid)
    rows = [(float(s), interpolated_inverse(family, z, float(s)))
            for s in grid]
    _write_csv(args.out, ["s", "inverse"], rows)
    return 0


def _cmd_derive(args) -> int:
    family = _load_family(args.family)
    z = _parse_z(args.z)
    x = _parse_x(args.x, args.seed)
    rep = derivation(family, z, x)
    rows = []
    for n in rep.omega.indices():
        rows.append((n, rep.omega[n].real, rep.omega[n].imag,
                     rep.omega1[n].real, rep.omega2[n].real))
    _write_csv(args.out, ["n", "re_omega", "im_omega", "re_omega1",
                          "re_omega2"], rows)
    return 0


def _cmd_defect(args) -> int:
    family = _load_family(args.family)
    z = _parse_z(args.z)
    rng = np.random.default_rng(args.seed)
    rows = []
    for trial in range(args.trials):
        m = int(rng.integers(2, args.support + 1))
        x = FiniteSequence.from_values(
            rng.normal(size=m) + 1j * rng.normal(size=m))
        u = FiniteSequence.from_values(
            rng.uniform(0.1, 1.0, size=m)
            * np.exp(2j * math.pi * rng.uniform(size=m)))
        rows.append((trial, centralizer_defect(family, z, x, u)))
    _write_csv(args.out, ["trial", "defect"], rows)
    return 0


def _cmd_example(args) -> int:
    if args.table == "witness":
        ns = [int(v) for v in args.n.split(",")]
        rows = []
        for n in ns:
            w = witness_row(n)
            rows.append((w.n, w.A_n, w.B_n, w.omega_check))
        _write_csv(args.out, ["n", "A_n", "B_n", "omega_check"], rows)
        return 0
    if args.table == "divergence":
        ns = [int(float(v)) for v in args.n.split(",")]
        gammas = [float(v) for v in args.gamma.split(",")]
        rep = divergence_report(ns, gammas)
        rows = []
        for g in gammas:
            for (n, _, _), val in zip(rep.rows, rep.gamma_rows[g]):
                rows.append((n, float(g), val))
        _write_csv(args.out, ["n", "gamma", "value"], rows)
        return 0
    if args.table == "sandwich":
        grid = _parse_grid(args.grid)
        rows = [(r.t, r.lower_margin, r.upper_margin)
                for r in sandwich_check(grid)]
        _write_csv(args.out, ["t", "lower_margin", "upper_margin"], rows)
        return 0
    raise ValueError(f"unknown example table {args.table!r}")


def _check_battery(seed: int) -> list[tuple[str, bool, float]]:
    """Fast invariant battery: (name, passed, metric) rows."""
    rng = np.random.default_rng(seed)
    results = []

    def record(name, passed, metric):
        results.append((name, bool(passed), float(metric)))

    # inverse round trip on registry germs
    worst = 0.0
    for phi in [fn.power(1.5), fn.power(2), fn.phi1(), fn.phi2()]:
        cap = phi.value_at_t0() if math.isfinite(phi.t0) else 10.0
        for s in np.exp(np.linspace(math.log(1e-30), math.log(0.9 * cap), 12)):
            back = phi.evaluate(phi.inverse(float(s)))
            worst = max(worst, abs(back - s) / s)
    record("inverse_round_trip", worst < 1e-9, worst)

    # Young's inequality for a numeric conjugate pair
    phi = fn.phi1()
    conj = fn.conjugate(phi)
    gap = 0.0
    for _ in range(40):
        t = math.exp(rng.uniform(math.log(1e-8), math.log(phi.t0)))
        s = math.exp(rng.uniform(math.log(1e-8),
                                 math.log(0.9 * phi.extension_slope)))
        gap = min(gap, phi.evaluate(t) + conj.evaluate(s) - t * s)
    record("young_inequality", gap >= -1e-12, gap)

    # norm homogeneity and modular at the norm
    worst = 0.0
    worst_mod = 0.0
    for _ in range(10):
        m = int(rng.integers(2, 22))
        x = FiniteSequence.from_values(
            rng.normal(size=m) + 1j * rng.normal(size=m))
        lam = complex(*rng.normal(size=2))
        a = luxemburg_norm(phi, x.scale(lam))
        b = abs(lam) * luxemburg_norm(phi, x)
        worst = max(worst, abs(a - b) / b)
        worst_mod = max(worst_mod,
                        abs(modular(phi, x, luxemburg_norm(phi, x)) - 1.0))
    record("norm_homogeneity", worst < 1e-10, worst)
    record("modular_at_norm", worst_mod < 1e-6, worst_mod)

    # harmonic measure partition of unity and psi' cancellation
    fam = example_family()
    worst_mu, worst_psi = 0.0, 0.0
    for _ in range(4):
        z = complex(*rng.uniform(-0.6, 0.6, size=2))
        worst_mu = max(worst_mu, abs(sum(
            harmonic_measure(z, arc) for arc in fam.arcs) - 1.0))
        worst_psi = max(worst_psi, abs(sum(
            herglotz_prime(z, arc) for arc in fam.arcs)))
    record("harmonic_measure_sum", worst_mu < 1e-10, worst_mu)
    record("herglotz_prime_sum", worst_psi < 1e-10, worst_psi)

    # product vs quadrature for the interpolated inverse
    z = complex(0.3, 0.2)
    prod, quadval = iz_quadrature_check(fam, z, 1e-4)
    rel = abs(prod - quadval) / prod
    record("iz_product_vs_quadrature", rel < 1e-8, rel)

    # derivation closed form vs arc-integral form
    x = FiniteSequence.from_values(rng.normal(size=12)
                                   + 1j * rng.normal(size=12))
    omega = derivation(fam, z, x).omega
    omega_int = derivation_via_arc_integrals(fam, z, x)
    dev = max(abs(omega[n] - omega_int[n]) for n in x.indices())
    record("derivation_two_paths", dev < 1e-9, dev)

    # unit vector norms do not depend on the index
    f0 = interpolated_function(fam, 0.0)
    norms = [luxemburg_norm(f0, FiniteSequence.unit(n)) for n in (1, 7, 120)]
    spread = max(norms) - min(norms)
    record("unit_vector_norm_constant", spread < 1e-12, spread)

    return results


def _cmd_check(args) -> int:
    results = _check_battery(args.seed)
    width = max(len(name) for name, _, _ in results)
    ok = True
    for name, passed, metric in results:
        status = "PASS" if passed else "FAIL"
        print(f"{status}  {name:<{width}}  {metric:.3e}")
        ok = ok and passed
    return 0 if ok else 2


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="orlicz-interp",
                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", default=None, help="output CSV path (default stdout)")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help="seed for any randomized step")

    p = sub.add_parser("norm", help="Luxemburg norm of a sequence")
    p.add_argument("--function", help="function JSON, e.g. '{\"kind\":\"power\",\"p\":2}'")
    p.add_argument("--family", default="paper")
    p.add_argument("--z", default="0")
    p.add_argument("--x", required=True, help="sn:N | e:N | random:N | file:PATH")
    add_common(p)
    p.set_defaults(func=_cmd_norm)

    p = sub.add_parser("conjugate", help="numeric convex conjugate on a grid")
    p.add_argument("--function", required=True)
    p.add_argument("--grid", default="1e-6:0.1:25", help="LO:HI:COUNT, log spaced")
    add_common(p)
    p.set_defaults(func=_cmd_conjugate)

    p = sub.add_parser("interpolate", help="interpolated inverse on a grid")
    p.add_argument("--family", default="paper")
    p.add_argument("--z", default="0")
    p.add_argument("--grid", default="1e-12:1e-3:25")
    add_common(p)
    p.set_defaults(func=_cmd_interpolate)

    p = sub.add_parser("derive", help="derivation report as CSV")
    p.add_argument("--family", default="paper")
    p.add_argument("--z", default="0")
    p.add_argument("--x", required=True)
    add_common(p)
    p.set_defaults(func=_cmd_derive)

    p = sub.add_parser("defect", help="centralizer defect trials")
    p.add_argument("--family", default="paper")
    p.add_argument("--z", default="0")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--support", type=int, default=64)
    add_common(p)
    p.set_defaults(func=_cmd_defect)

    p = sub.add_parser("example", help="witness / divergence / sandwich tables")
    p.add_argument("--table", required=True,
                   choices=["witness", "divergence", "sandwich"])
    p.add_argument("--n", default="100,10000",
                   help="comma list of n values")
    p.add_argument("--gamma", default="-2,-1,-0.3333333333333333,0,"
                   "0.3333333333333333,0.5,1,2")
    p.add_argument("--grid", default="1e-12:1e-2:50")
    add_common(p)
    p.set_defaults(func=_cmd_example)

    p = sub.add_parser("check", help="run the invariant battery")
    add_common(p)
    p.set_defaults(func=_cmd_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
