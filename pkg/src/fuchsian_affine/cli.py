"""Command-line front end: run a verification or experiment, write a JSON
summary and a CSV table, exit 0 iff every assertion holds.

Settings come from built-in defaults, then an optional JSON file given by
--config, then command-line flags (flags win). Randomized commands require
--seed (or "seed" in the config file).

CSV columns
  flatness   n, basepoint, step, residual, residual_half_step, ratio
  rep-check  index, n, trace, character, rel_error
  margulis   word, mu, mu_hp, mu_inverse_hp, parity_residual
  obstruct   word, mu
  survey     word, length, integral_f, mu_direct, mu_integral
  symmetry   index, f, f_beta, residual
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__

COMMANDS = ("flatness", "rep-check", "margulis", "obstruct", "survey", "symmetry")
RANDOMIZED = {"rep-check", "margulis", "obstruct", "symmetry"}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    n: int = 1
    group: str = "schottky"
    t: float = 2.0
    separation: float = 1.0
    maxlen: int = 2
    words: list = field(default_factory=list)
    seed: int | None = None
    step: float = 1e-3
    side: float = 0.5
    count: int = 50
    depth: int = 6
    seed_degree: int = 1
    seed_center: list = field(default_factory=lambda: [0.3, 0.2])
    samples: int = 10_000
    mc_samples: int = 100_000
    translations: str = "random"
    stop_early: bool = True
    nodes_per_unit: int = 250
    out: str = "."

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not 1 <= self.n <= 8:
            raise ConfigError("n must be in 1..8")
        if self.group not in ("schottky", "genus2"):
            raise ConfigError("group must be 'schottky' or 'genus2'")
        if self.t <= 0 or self.separation <= 0:
            raise ConfigError("t and separation must be positive")
        if not 1 <= self.maxlen <= 12:
            raise ConfigError("maxlen must be in 1..12")
        if not 0 < self.step <= 0.1:
            raise ConfigError("step must be in (0, 0.1]")
        if not 0 < self.side <= 2:
            raise ConfigError("side must be in (0, 2]")
        if not 1 <= self.depth <= 8:
            raise ConfigError("depth must be in 1..8")
        if self.seed_degree < 0:
            raise ConfigError("seed_degree must be >= 0")
        if len(self.seed_center) != 2 or np.hypot(*self.seed_center) >= 1:
            raise ConfigError("seed_center must be [re, im] inside the unit disk")
        if self.count < 1 or self.samples < 2 or self.mc_samples < 2 or self.nodes_per_unit < 10:
            raise ConfigError("counts must be positive")
        if self.translations not in ("zero", "random"):
            raise ConfigError("translations must be 'zero' or 'random'")
        if self.command in RANDOMIZED and self.seed is None:
            raise ConfigError(f"command {self.command!r} needs a seed")
        for w in self.words:
            if not isinstance(w, list) or not all(isinstance(x, int) and x != 0 for x in w):
                raise ConfigError(f"bad word {w!r}")
        return self

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(doc) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        try:
            return cls(**doc).validate()
        except TypeError as e:
            raise ConfigError(str(e)) from e


def _parse_word(s: str) -> list:
    try:
        w = [int(x) for x in s.replace(",", " ").split()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad word {s!r}") from e
    if not w or 0 in w:
        raise argparse.ArgumentTypeError(f"bad word {s!r}")
    return w


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fuchsian-affine", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="JSON file with settings; flags override it")
        s.add_argument("--out", help="output directory")
        s.add_argument("--seed", type=int)
        s.add_argument("--n", type=int)
        s.add_argument("--group", choices=["schottky", "genus2"])
        s.add_argument("--t", type=float, help="Schottky translation length")
        s.add_argument("--separation", type=float)
        s.add_argument("--maxlen", type=int)
        s.add_argument("--word", dest="words", action="append", type=_parse_word,
                       help="word as signed generator indices, e.g. '1 -2' (repeatable)")
        s.add_argument("--step", type=float)
        s.add_argument("--side", type=float)
        s.add_argument("--count", type=int)
        s.add_argument("--depth", type=int)
        s.add_argument("--seed-degree", dest="seed_degree", type=int)
        s.add_argument("--seed-center", dest="seed_center", type=float, nargs=2)
        s.add_argument("--samples", type=int)
        s.add_argument("--mc-samples", dest="mc_samples", type=int)
        s.add_argument("--translations", choices=["zero", "random"])
        s.add_argument("--no-stop-early", dest="stop_early", action="store_false", default=None)
        s.add_argument("--nodes-per-unit", dest="nodes_per_unit", type=int)
    return p


def load_config(argv) -> ExperimentConfig:
    args = build_parser().parse_args(argv)
    doc = {}
    if args.config:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config: {e}") from e
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        doc.pop("command", None)
    for k, v in vars(args).items():
        if k != "config" and v is not None:
            doc[k] = list(v) if k == "seed_center" else v
    doc["command"] = args.command
    return ExperimentConfig.from_dict(doc)


# ---------------------------------------------------------------- commands


class _Checks:
    def __init__(self):
        self.items = []

    def add(self, name: str, value: float, tol: float, passed: bool | None = None, kind: str = "<="):
        ok = bool(value <= tol) if passed is None else bool(passed)
        self.items.append({"name": name, "value": float(value), "tolerance": tol, "kind": kind, "passed": ok})

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.items)


def _group(cfg):
    from .fuchsian import genus2_group, schottky_group

    return genus2_group() if cfg.group == "genus2" else schottky_group(cfg.t, cfg.separation)


def _words(cfg, grp):
    from .fuchsian import enumerate_conjugacy_classes

    return [tuple(w) for w in cfg.words] if cfg.words else enumerate_conjugacy_classes(grp, cfg.maxlen)


def _fmt_word(w) -> str:
    return " ".join(str(x) for x in w)


def cmd_flatness(cfg, checks):
    from .halfplane import geodesic_square, regular_polygon_area
    from .flatbundle import flatness_residual

    rows = [["n", "basepoint", "step", "residual", "residual_half_step", "ratio"]]
    worst, worst_ratio = 0.0, np.inf
    for z0 in (1j, 0.5 + 2j, -1 + 0.7j):
        loop = geodesic_square(z0, cfg.side)
        r1 = flatness_residual(cfg.n, loop, cfg.step)
        # the step-halving ratio is read in extended precision (path and state),
        # since for small n the residual at half step is near double rounding
        loop_ld = geodesic_square(z0, cfg.side, dtype=np.longdouble)
        r1l = flatness_residual(cfg.n, loop_ld, cfg.step, dtype=np.longdouble)
        r2 = flatness_residual(cfg.n, loop_ld, cfg.step / 2, dtype=np.longdouble)
        worst = max(worst, r1)
        worst_ratio = min(worst_ratio, float(r1l / r2))
        rows.append([cfg.n, repr(z0), cfg.step, repr(r1), repr(r2), repr(r1l / r2)])
    checks.add("max_residual", worst, 1e-6)
    checks.add("halving_ratio", worst_ratio, 8.0, worst_ratio >= 8.0, ">=")
    loop = geodesic_square(1j, cfg.side)
    ctrl = flatness_residual(1, loop, cfg.step, levi_civita_only=True)
    area = regular_polygon_area(cfg.side)
    checks.add("control_relative_to_area", abs(ctrl - area) / area, 0.1)
    return rows, {"control_residual": ctrl, "area": area}


def cmd_rep_check(cfg, checks):
    from .halfplane import axis_data, random_hyperbolic
    from .flatbundle import holonomy_rep
    from .symrep import character

    rng = np.random.default_rng(cfg.seed)
    rows = [["index", "n", "trace", "character", "rel_error"]]
    worst = 0.0
    for i in range(cfg.count):
        g = random_hyperbolic(rng)
        # the trace is a class function; evaluating on the axis avoids the
        # cancellation of entries of size exp(n * distance) seen far from it
        foot = complex(axis_data(g).geodesic(1j).start)
        tr = holonomy_rep(g, cfg.n, basepoint=foot).trace
        ch = character(g, cfg.n)
        err = abs(tr - ch) / abs(ch)
        worst = max(worst, err)
        rows.append([i, cfg.n, repr(tr), repr(ch), repr(err)])
    checks.add("trace_vs_character", worst, 1e-6)
    return rows, {}


def _translations(cfg, grp, rng):
    N = 2 * cfg.n + 1
    if cfg.translations == "zero":
        return [np.zeros(N) for _ in range(grp.rank)]
    return [rng.normal(size=N) for _ in range(grp.rank)]


def cmd_margulis(cfg, checks):
    from .fuchsian import inverse_word
    from .margulis import SymPowerModel, cocycle_extend, margulis_invariant, margulis_invariant_hp

    grp = _group(cfg)
    rng = np.random.default_rng(cfg.seed)
    model = SymPowerModel(cfg.n)
    tr = _translations(cfg, grp, rng)
    sign = 1 if cfg.n % 2 == 1 else -1
    rows = [["word", "mu", "mu_hp", "mu_inverse_hp", "parity_residual"]]
    worst = 0.0
    for w in _words(cfg, grp):
        mu = margulis_invariant(cocycle_extend(grp, model, tr, w))
        a = margulis_invariant_hp(grp, tr, w, model)
        b = margulis_invariant_hp(grp, tr, inverse_word(w), model)
        res = abs(b - sign * a)
        worst = max(worst, res)
        rows.append([_fmt_word(w), repr(mu), repr(a), repr(b), repr(res)])
    checks.add("inverse_parity", worst, 1e-8)
    return rows, {"parity": "mu(g^-1) = mu(g)" if sign == 1 else "mu(g^-1) = -mu(g)"}


def cmd_obstruct(cfg, checks):
    from .margulis import SymPowerModel, cocycle_extend, margulis_invariant, properness_obstruction

    grp = _group(cfg)
    rng = np.random.default_rng(cfg.seed)
    model = SymPowerModel(cfg.n)
    tr = _translations(cfg, grp, rng)
    words = _words(cfg, grp)
    rows = [["word", "mu"]]
    for w in words:
        rows.append([_fmt_word(w), repr(margulis_invariant(cocycle_extend(grp, model, tr, w)))])
    cert = properness_obstruction(grp, tr, words, model=model)
    extra = {"certificate": None if cert is None else cert.to_dict(),
             "verdict": "obstructed" if cert is not None else "inconclusive"}
    if cert is not None:
        checks.add("verdict_consistent", 0.0, 0.0, cert.general_position and cert.mu1 * cert.mu2 <= 0, "bool")
    if cfg.translations == "zero":
        checks.add("zero_translations_obstructed", 0.0, 0.0, cert is not None, "bool")
    return rows, extra


def _omega(cfg, grp, depth=None):
    from .cocycle import poincare_qdiff

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return poincare_qdiff(grp, cfg.n + 1, cfg.seed_degree, depth or cfg.depth, complex(*cfg.seed_center))


def cmd_survey(cfg, checks):
    from .cocycle import geodesic_sign_survey

    if cfg.n % 2 == 0:
        raise ConfigError("survey needs odd n (q = n + 1 even)")
    grp = _group(cfg)
    omega = _omega(cfg, grp)
    res = geodesic_sign_survey(grp, omega, cfg.n, cfg.maxlen, stop_when_both_signs=cfg.stop_early,
                               nodes_per_unit=cfg.nodes_per_unit)
    rows = [["word", "length", "integral_f", "mu_direct", "mu_integral"]]
    rows += [r.row() for r in res.reports]
    gap = max((abs(r.mu_direct - r.mu_integral) for r in res.reports), default=0.0)
    checks.add("mu_direct_vs_integral", gap, 1e-3)
    checks.add("both_signs", 0.0, 0.0, res.both_signs, "bool")
    return rows, {"positive_word": res.positive_word, "negative_word": res.negative_word,
                  "classes_scanned": len(res.reports)}


def cmd_symmetry(cfg, checks):
    from .cocycle import f_values, monte_carlo_mean, sample_unit_tangents

    if cfg.n % 2 == 0:
        raise ConfigError("symmetry needs odd n (q = n + 1 even)")
    if cfg.group != "genus2":
        raise ConfigError("symmetry sampling needs the genus2 group")
    grp = _group(cfg)
    omega = _omega(cfg, grp)
    rng = np.random.default_rng(cfg.seed)
    z, dirs = sample_unit_tangents(grp, rng, cfg.samples)
    q = omega.q
    f = f_values(omega, z, dirs, automorphic=False)
    fb = f_values(omega, z, dirs * np.exp(1j * np.pi / q), automorphic=False)
    res = np.abs(fb + f)
    rows = [["index", "f", "f_beta", "residual"]]
    rows += [[i, repr(a), repr(b), repr(r)] for i, (a, b, r) in enumerate(zip(f, fb, res))]
    checks.add("beta_antisymmetry", float(res.max()), 1e-12)
    mc = _omega(cfg, grp, depth=min(cfg.depth, 4))
    mean, se = monte_carlo_mean(mc, rng, cfg.mc_samples)
    checks.add("mean_within_3_stderr", abs(mean) / se, 3.0)
    return rows, {"mean": mean, "stderr": se}


HANDLERS = {
    "flatness": cmd_flatness,
    "rep-check": cmd_rep_check,
    "margulis": cmd_margulis,
    "obstruct": cmd_obstruct,
    "survey": cmd_survey,
    "symmetry": cmd_symmetry,
}


def run(cfg: ExperimentConfig) -> int:
    """Run one command; write summary.json and <command>.csv into cfg.out."""
    checks = _Checks()
    rows, extra = HANDLERS[cfg.command](cfg, checks)
    summary = {
        "tool": "fuchsian-affine",
        "version": __version__,
        "config": json.loads(cfg.to_json()),
        "assertions": checks.items,
        "passed": checks.passed,
        **{k: v for k, v in extra.items()},
    }
    import csv
    import io

    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    os.makedirs(cfg.out, exist_ok=True)
    stem = cfg.command.replace("-", "_")
    with open(os.path.join(cfg.out, f"{stem}.csv"), "w") as fh:
        fh.write(buf.getvalue())
    with open(os.path.join(cfg.out, f"{stem}_summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, default=list)
    print(json.dumps({"command": cfg.command, "passed": checks.passed,
                      "assertions": {c["name"]: c["passed"] for c in checks.items}}))
    return 0 if checks.passed else 1


def main(argv=None) -> int:
    try:
        cfg = load_config(argv)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
