"""Command-line entry point: JSON run configs in, CSV/JSON/SVG out.

Exit codes: 2 config/schema violation, 3 runtime invariant violation,
4 I/O failure.  Identical configs produce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__

COMMANDS = ("sample", "decompose", "explore", "cross", "couple-test", "stability", "conditions")

_SCHEMA: dict[str, set[str]] = {
    "common": {"command", "seed", "out", "threads", "n", "domain"},
    "sample": {"model", "count", "burn_in", "thin", "render"},
    "decompose": {"config_file", "edges", "render"},
    "explore": {"edges", "gamma", "render"},
    "cross": {"model", "annulus", "replicas"},
    "couple-test": set(),
    "stability": {"annulus", "replicas", "t", "r_values", "n_values", "mode"},
    "conditions": {"replicas", "n_small"},
}


class ConfigError(ValueError):
    pass


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as ex:
        raise ConfigError(f"cannot read config: {ex}") from ex
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    cmd = cfg.get("command")
    if cmd not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}, got {cmd!r}")
    allowed = _SCHEMA["common"] | _SCHEMA[cmd]
    unknown = set(cfg) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return cfg


def _annulus_from(cfg: dict):
    from .annuli import PolyAnnulus

    spec = cfg.get("annulus", {"inner": [0.375, 0.375, 0.625, 0.625],
                               "outer": [0.25, 0.25, 0.75, 0.75]})
    inner = [Fraction(str(c)) for c in spec["inner"]]
    outer = [Fraction(str(c)) for c in spec["outer"]]
    return PolyAnnulus.rect_pair(tuple(inner), tuple(outer))


def _domain_from(cfg: dict):
    dom = cfg.get("domain", [0, 0, 1, 1])
    if isinstance(dom[0], list):
        return [tuple(Fraction(str(c)) for c in p) for p in dom]
    return tuple(Fraction(str(c)) for c in dom)


def _header_lines(cfg: dict) -> list[str]:
    resolved = json.dumps(cfg, sort_keys=True)
    return [f"# loopcross {__version__}", f"# config {resolved}"]


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as ex:
        raise IOError(f"cannot write {path}: {ex}") from ex


def _csv(path: Path, cfg: dict, header: list[str], rows: list[list]) -> None:
    lines = _header_lines(cfg)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _write_text(path, "\n".join(lines) + "\n")


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def run(cfg: dict, out_dir: str, threads: int = 1) -> int:
    out = Path(out_dir)
    cmd = cfg["command"]
    seed = int(cfg.get("seed", 0))
    n = int(cfg.get("n", 16))
    if cmd == "sample":
        _cmd_sample(cfg, out, seed, n, threads)
    elif cmd == "decompose":
        _cmd_decompose(cfg, out, n)
    elif cmd == "explore":
        _cmd_explore(cfg, out, n)
    elif cmd == "cross":
        _cmd_cross(cfg, out, seed, n, threads)
    elif cmd == "couple-test":
        _cmd_couple_test(cfg, out)
    elif cmd == "stability":
        _cmd_stability(cfg, out, seed, threads)
    elif cmd == "conditions":
        _cmd_conditions(cfg, out, seed, n, threads)
    return 0


def _cmd_sample(cfg: dict, out: Path, seed: int, n: int, threads: int) -> None:
    from .experiments import _samples_for_model
    from .percolation import config_to_bytes
    from .svg import render_config

    model = cfg.get("model", {"type": "ising_interface"})
    count = int(cfg.get("count", 1))
    samples = _samples_for_model(model, n, count, seed, threads, _domain_from(cfg))
    rows = []
    for i, s in enumerate(samples):
        path = out / f"sample_{i:04d}.cfg"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(config_to_bytes(s))
        if cfg.get("render"):
            _write_text(out / f"sample_{i:04d}.svg", render_config(s, n))
        rows.append([i, len(s.open_edges), path.name])
    _csv(out / "samples.csv", cfg, ["replica", "open_edges", "file"], rows)


def _edges_from(cfg: dict, n: int):
    from .lattice import GridGeometry, block, certify_disc, edge
    from .percolation import Config, config_from_bytes

    if "config_file" in cfg:
        return config_from_bytes(Path(cfg["config_file"]).read_bytes()), None
    disc = certify_disc(block(GridGeometry(n), 0, 0, 2 * n, 2 * n))
    edges = frozenset(edge(tuple(e[0]), tuple(e[1])) for e in cfg["edges"])
    return Config(disc.graph, edges), disc


def _cmd_decompose(cfg: dict, out: Path, n: int) -> None:
    from .lattice import certify_disc
    from .loopdecomp import decompose
    from .svg import render_decomposition

    k, disc = _edges_from(cfg, n)
    if disc is None:
        disc = certify_disc(k.support)
    dec = decompose(k, disc)
    payload = {
        "n": n,
        "max_level": dec.max_level,
        "loops": [{"level": ll.level, "orientation": ll.orientation.value,
                   "vertices": [list(v) for v in ll.loop.vertices]}
                  for ll in dec.loops],
    }
    _write_text(out / "loops.json", json.dumps(payload, indent=1, sort_keys=True) + "\n")
    if cfg.get("render"):
        _write_text(out / "loops.svg", render_decomposition(dec, disc))


def _cmd_explore(cfg: dict, out: Path, n: int) -> None:
    from .lattice import certify_disc, make_loop
    from .exploration import explore_outside, unexplored_discs
    from .svg import render_exploration

    k, disc = _edges_from(cfg, n)
    if disc is None:
        disc = certify_disc(k.support)
    gamma = make_loop([tuple(v) for v in cfg["gamma"]])
    x = explore_outside(k, gamma, disc)
    pieces = unexplored_discs(x, disc)
    payload = {
        "region_vertices": sorted(map(list, x.region.vertices)),
        "open_state_edges": sorted([list(map(list, e)) for e in x.state.open_edges]),
        "unexplored_discs": [sorted(map(list, p.graph.vertices)) for p in pieces],
    }
    _write_text(out / "exploration.json", json.dumps(payload, indent=1, sort_keys=True) + "\n")
    if cfg.get("render"):
        _write_text(out / "exploration.svg", render_exploration(x, disc))


def _cmd_cross(cfg: dict, out: Path, seed: int, n: int, threads: int) -> None:
    from .experiments import estimate_crossing_prob

    model = cfg.get("model", {"type": "ising_interface"})
    annulus = _annulus_from(cfg)
    replicas = int(cfg.get("replicas", 1000))
    est = estimate_crossing_prob(model, annulus, n, replicas, seed, threads,
                                 _domain_from(cfg))
    _csv(out / "crossing.csv", cfg,
         ["experiment", "n", "annulus", "value", "stderr", "replicas", "seed"],
         [["cross", n, _annulus_label(annulus), est.value, est.stderr, replicas, seed]])


def _annulus_label(a) -> str:
    ir = "/".join(str(c) for c in a.inner_rect())
    orr = "/".join(str(c) for c in a.outer_rect())
    return f"[{ir}]-[{orr}]"


def _cmd_couple_test(cfg: dict, out: Path) -> None:
    from .lattice import GridGeometry, Subgraph, block, certify_disc, edge
    from .models import (critical_constants, enumerate_current_trace, enumerate_ht_law,
                         overlay_law)

    cc = critical_constants()
    g = GridGeometry(1)
    rows = []
    single = Subgraph(g, frozenset([(0, 0), (2, 0)]), frozenset([edge((0, 0), (2, 0))]))
    square = certify_disc(block(g, 0, 0, 2, 2)).graph
    for name, sub in (("single_edge", single), ("square_2x2", square)):
        trace = enumerate_current_trace(sub, n_max=8)
        coupled = overlay_law(enumerate_ht_law(sub), cc.t_c)
        rows.append([name, len(sub.edges), coupled.tv(trace.law), trace.truncation_tail])
    _csv(out / "couple_test.csv", cfg,
         ["graph", "edges", "tv_coupled_vs_trace", "per_edge_truncation_tail"], rows)


def _cmd_stability(cfg: dict, out: Path, seed: int, threads: int) -> None:
    from .experiments import stability_gap, symdiff_crossing
    from .models import critical_constants

    annulus = _annulus_from(cfg)
    replicas = int(cfg.get("replicas", 1000))
    t = cfg.get("t")
    t = critical_constants().t_c if t is None else float(t)
    n_values = [int(v) for v in cfg.get("n_values", [16, 32, 64])]
    mode = cfg.get("mode", "symdiff")
    rows = []
    for n in n_values:
        if mode == "symdiff":
            est = symdiff_crossing(annulus, n, replicas, seed, t, threads)
            rows.append(["symdiff", n, _annulus_label(annulus), "", t,
                         est.value, est.stderr, replicas, seed])
        else:
            for r in cfg.get("r_values", [Fraction(1, 32)]):
                est = stability_gap(annulus, Fraction(str(r)), n, replicas, seed, t, threads)
                rows.append(["stability_gap", n, _annulus_label(annulus), str(r), t,
                             est.value, est.stderr, replicas, seed])
    _csv(out / "stability.csv", cfg,
         ["experiment", "n", "annulus", "r", "t", "value", "stderr", "replicas", "seed"], rows)


def _cmd_conditions(cfg: dict, out: Path, seed: int, n: int, threads: int) -> None:
    from .experiments import condition_suite

    replicas = int(cfg.get("replicas", 400))
    report = condition_suite(int(cfg.get("n_small", 2)), n, replicas, seed, threads)
    rows = [["markov_exact_tv", "", "", report.markov_exact_tv, 0.0, "", seed],
            ["markov_float_tv", "", "", report.markov_float_tv, 0.0, "", seed]]
    for eps, est in report.crossing_approx_table:
        rows.append(["crossing_approx", n, eps, est.value, est.stderr, est.replicas, seed])
    for name, r, est in report.boundary_conn_table:
        rows.append([f"boundary_conn_{name}", n, r, est.value, est.stderr, est.replicas, seed])
    _csv(out / "conditions.csv", cfg,
         ["experiment", "n", "param", "value", "stderr", "replicas", "seed"], rows)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="loopcross")
    parser.add_argument("--config", required=True, help="JSON run config")
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--out", default="out")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as ex:
        print(f"config error: {ex}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg["seed"] = args.seed
    try:
        return run(cfg, args.out, args.threads)
    except IOError as ex:
        print(f"io error: {ex}", file=sys.stderr)
        return 4
    except ConfigError as ex:
        print(f"config error: {ex}", file=sys.stderr)
        return 2
    except Exception as ex:  # invariant violations
        print(f"runtime error: {type(ex).__name__}: {ex}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
