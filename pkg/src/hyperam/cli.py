"""``hyperam`` command line: run an experiment config and write its artifacts.

Exit status is 0 on success, 1 when an ``[expect]`` assertion (or a verify
check) does not hold, and 2 for usage or config errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import imaging
from .config import Config, ConfigError, load_config, preset_names
from .dynamics import build_graph, classify, export_dot, write_attractor_csv
from .rcnn import MemorySet, Network, RunResult, UpdateMode, write_energy_csv, write_run_metadata
from .verify import CHECKS, run_checks

EXIT_OK, EXIT_EXPECT, EXIT_USAGE = 0, 1, 2
MONOTONE_TOL = 1e-10
COMMANDS = {
    "dynamics": "dynamics",
    "energy-trace": "energy_trace",
    "image-recall": "image_recall",
    "verify": "verify",
}


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperam", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="config file, or the name of a bundled preset")
        p.add_argument("--out", type=Path, default=Path("hyperam-out"), help="output directory")
        p.add_argument("--seed", type=_u64, default=None, help="override the config's seed")
        if name == "verify":
            p.add_argument("--check", action="append", default=None, metavar="NAME", help="run only this check (repeatable)")
            p.add_argument("--samples", type=int, default=None, help="override the sample count")
    return parser


def _stem(cfg: Config) -> str:
    source = cfg.source
    return source.split(":", 1)[1] if source.startswith("preset:") else Path(source).stem


def _labels(values) -> str:
    return "{" + ", ".join(str(v + 1) for v in values) + "}" if len(values) else "{}"


def _int_set(cfg: Config, key: str) -> set[int] | None:
    raw = cfg.get("expect", key)
    if raw is None:
        return None
    if raw.lower() == "none":
        return set()
    try:
        return {int(v) - 1 for v in raw.split(",") if v.strip()}
    except ValueError:
        raise cfg.error(f"'{key}' must list 1-based state indices or 'none'", "expect", key) from None


class _Expectations:
    def __init__(self):
        self.lines: list[str] = []
        self.failed = 0

    def check(self, label: str, ok: bool, detail: str = "") -> None:
        self.failed += not ok
        self.lines.append(f"expect {label}: {'ok' if ok else 'FAILED'}" + (f" ({detail})" if detail else ""))


# -- dynamics ---------------------------------------------------------------


def cmd_dynamics(cfg: Config, out: Path, seed: int | None) -> int:
    algebra, tau, act = cfg.algebra(), cfg.involution(), cfg.activation()
    if act.dim is not None and act.dim != algebra.dim:
        raise cfg.error(f"activation {act.kind.value} needs a {act.dim}-dimensional algebra", "activation", "kind")
    if not act.is_finite:
        raise cfg.error("exhaustive dynamics needs a finite codomain", "activation", "kind")
    memories = cfg.memories(algebra.dim)
    self_form = act.codomain(algebra.dim).max_self_form(algebra, tau)
    net_cfg = cfg.network(cfg.excitation(memories.N, self_form))
    try:
        graph = build_graph(net_cfg, memories)
    except ValueError as exc:
        raise cfg.error(str(exc), "memories") from None
    result = classify(graph)

    name = _stem(cfg)
    echo = cfg.echo() + [f"resolved.{k} = {v}" for k, v in net_cfg.describe().items()]
    out.mkdir(parents=True, exist_ok=True)
    for mode in ("sync", "async"):
        (out / f"{name}_{mode}.dot").write_text(export_dot(graph, mode, comment="\n".join(echo)))
    csv = write_attractor_csv(out / f"{name}_attractors.csv", graph, result)
    Path(str(csv) + ".meta.txt").write_text("\n".join(echo) + "\n")

    cycles = [list(c) for c in result.cycles]
    async_cycles = [list(c) for c in result.async_cycles]
    report = [
        f"states: {len(graph)}",
        f"memories: {_labels(graph.memory_indices)}",
        f"fixed points: {_labels(result.fixed_points)}",
        f"spurious: {_labels(result.spurious)}",
        f"sync cycles: {[[k + 1 for k in c] for c in cycles]}",
        f"async fixed points: {_labels(result.async_fixed_points)}",
        f"async cycles: {[[k + 1 for k in c] for c in async_cycles]}",
    ]

    exp = _Expectations()
    fixed = _int_set(cfg, "fixed_points")
    if fixed is not None:
        exp.check("fixed_points", set(result.fixed_points) == fixed and set(result.async_fixed_points) == fixed)
    spurious = _int_set(cfg, "spurious")
    if spurious is not None:
        exp.check("spurious", set(result.spurious) == spurious)
    count = cfg.get_int("expect", "cycles")
    if count is not None:
        exp.check("cycles", len(cycles) == count and len(async_cycles) == count)
    members = _int_set(cfg, "cycle_contains")
    if members is not None:
        exp.check(
            "cycle_contains",
            any(members <= set(c) for c in cycles) and any(members <= set(c) for c in async_cycles),
        )
    if cfg.get_bool("expect", "all_converge"):
        exp.check("all_converge", not cycles and not async_cycles)
    not_fixed = _int_set(cfg, "not_fixed")
    if not_fixed is not None:
        exp.check("not_fixed", not (not_fixed & (set(result.fixed_points) | set(result.async_fixed_points))))

    print("\n".join(report + exp.lines))
    return EXIT_EXPECT if exp.failed else EXIT_OK


# -- energy traces ----------------------------------------------------------


def monotone(result: RunResult, tol: float = MONOTONE_TOL) -> bool:
    """Energy decreases across every recorded step that changed a neuron."""
    e = result.energies
    steps = np.diff(e)
    changed = np.asarray(result.changes[: len(steps)]) > 0
    return bool(np.all(steps[changed] < tol))


def cmd_energy_trace(cfg: Config, out: Path, seed: int | None) -> int:
    sec = "experiment"
    n = cfg.get_int(sec, "N", required=True)
    p = cfg.get_int(sec, "P", required=True)
    runs = cfg.get_int(sec, "runs", 1)
    seed = cfg.get_int(sec, "seed", 0) if seed is None else seed
    for key, value in (("N", n), ("P", p)):
        if value < 1:
            raise cfg.error(f"'{key}' must be positive", sec, key)
    if runs < 0:
        raise cfg.error("'runs' must be non-negative", sec, "runs")

    algebra, tau, act = cfg.algebra(), cfg.involution(), cfg.activation()
    alphabet = act.codomain(algebra.dim)
    excitation = cfg.excitation(n, alphabet.max_self_form(algebra, tau))
    modes = cfg.update_modes()
    configs = {m: cfg.network(excitation, m) for m in modes}

    name = _stem(cfg)
    out.mkdir(parents=True, exist_ok=True)
    echo = {"config": "; ".join(cfg.echo()), "seed": str(seed)}
    all_results: list[list[RunResult]] = []
    for r in range(runs):
        rng = np.random.default_rng(seed + r)
        memories = MemorySet(alphabet.sample(rng, (p, n)))
        x0 = alphabet.sample(rng, (n,))
        results = [Network(configs[m], memories).run(x0) for m in modes]
        all_results.append(results)
        path = write_energy_csv(out / f"{name}_run{r:03d}.csv", results)
        write_run_metadata(Path(str(path) + ".meta.txt"), configs[modes[0]], results, {**echo, "run": str(r)})

    report = []
    for k, mode in enumerate(modes):
        res = [rr[k] for rr in all_results]
        conv = sum(r.converged for r in res)
        mono = sum(monotone(r) for r in res)
        report.append(f"{mode}: converged {conv}/{runs}, monotone {mono}/{runs}")
    earlier = None
    if "synchronous" in modes and "asynchronous" in modes:
        s, a = modes.index("synchronous"), modes.index("asynchronous")
        earlier = sum(rr[a].settle_time < rr[s].settle_time for rr in all_results)
        report.append(f"asynchronous settled earlier in {earlier}/{runs} runs")

    exp = _Expectations()
    flat = [r for rr in all_results for r in rr]
    want = cfg.get("expect", "converged")
    if want is not None:
        conv = sum(r.converged for r in flat)
        checks = {"all": conv == len(flat), "not_all": conv < len(flat), "none": conv == 0}
        if want not in checks:
            raise cfg.error("'converged' must be all, not_all or none", "expect", "converged")
        exp.check(f"converged = {want}", checks[want], f"{conv}/{len(flat)} runs converged")
    if cfg.get_bool("expect", "monotone"):
        exp.check("monotone", all(monotone(r) for r in flat))
    want = cfg.get("expect", "async_earlier")
    if want is not None:
        if want != "majority":
            raise cfg.error("'async_earlier' must be 'majority'", "expect", "async_earlier")
        if earlier is None:
            raise cfg.error("'async_earlier' needs both update modes", "expect", "async_earlier")
        exp.check("async_earlier", 2 * earlier > runs, f"{earlier}/{runs}")

    print("\n".join(report + exp.lines))
    return EXIT_EXPECT if exp.failed else EXIT_OK


# -- image recall -----------------------------------------------------------


def _images(cfg: Config) -> list[imaging.GrayImage]:
    sec = "images"
    source = cfg.get(sec, "source", "synthetic")
    if source == "synthetic":
        kind = cfg.get(sec, "kind", "smooth")
        if kind not in ("uniform", "smooth"):
            raise cfg.error("'kind' must be uniform or smooth", sec, "kind")
        return imaging.synthetic_images(
            cfg.get_int(sec, "count", 20),
            cfg.get_int(sec, "width", 32),
            cfg.get_int(sec, "height", 32),
            seed=cfg.get_int(sec, "seed", 0),
            kind=kind,
        )
    directory = Path(source)
    if not directory.is_absolute() and not cfg.source.startswith("preset:"):
        directory = Path(cfg.source).parent / directory
    try:
        return imaging.load_images(directory)
    except (OSError, ValueError) as exc:
        raise cfg.error(str(exc), sec, "source") from None


def cmd_image_recall(cfg: Config, out: Path, seed: int | None) -> int:
    sec = "experiment"
    names = cfg.get_list(sec, "codecs", [c.value for c in imaging.Codec])
    try:
        codecs = [imaging.Codec(c) for c in names]
    except ValueError:
        raise cfg.error(f"codecs must be among {[c.value for c in imaging.Codec]}", sec, "codecs") from None
    levels = cfg.get_float_list(sec, "noise_levels", required=True)
    trials = cfg.get_int(sec, "trials", 30)
    seed = cfg.get_int(sec, "seed", 0) if seed is None else seed
    modes = cfg.update_modes()
    a = cfg.get_float("excitation", "a", 20.0)
    max_sweeps = cfg.get_int("network", "max_sweeps", 100)
    images = _images(cfg)

    rows = []
    for codec in codecs:
        rows += imaging.recall_experiment(codec, images, levels, trials, seed, modes=modes, a=a, max_sweeps=max_sweeps)
    name = _stem(cfg)
    out.mkdir(parents=True, exist_ok=True)
    path = imaging.write_recall_csv(out / f"{name}_recall.csv", rows)
    Path(str(path) + ".meta.txt").write_text("\n".join(cfg.echo() + [f"seed = {seed}", f"images = {len(images)}"]) + "\n")

    table = {(r.codec, r.mode, r.noise_stdev): r.successes for r in rows}
    report = [f"{r.codec:16s} {r.mode:13s} sigma={r.noise_stdev:<6g} {r.successes}/{r.trials}" for r in rows]
    exp = _Expectations()
    slack = cfg.get_int("expect", "slack", 0)
    ordering = cfg.get("expect", "ordering")
    if ordering is not None:
        try:
            better, worse = (imaging.Codec(v.strip()).value for v in ordering.split(">="))
        except ValueError:
            raise cfg.error("'ordering' must read 'codec >= codec'", "expect", "ordering") from None
        bad = [
            f"{m} sigma={s:g}"
            for m in modes
            for s in levels
            if (better, m, s) in table and table[(better, m, s)] + slack < table[(worse, m, s)]
        ]
        exp.check(f"{better} >= {worse}", not bad, ", ".join(bad))
    target = cfg.get("expect", "async_not_worse")
    if target is not None:
        if set(modes) != {"synchronous", "asynchronous"}:
            raise cfg.error("'async_not_worse' needs both update modes", "expect", "async_not_worse")
        sync = np.mean([table[(target, "synchronous", s)] for s in levels])
        asyn = np.mean([table[(target, "asynchronous", s)] for s in levels])
        exp.check(f"async {target} >= sync", asyn + slack >= sync, f"mean {asyn:.2f} vs {sync:.2f}")

    print("\n".join(report + exp.lines))
    return EXIT_EXPECT if exp.failed else EXIT_OK


# -- verify -----------------------------------------------------------------


def cmd_verify(cfg: Config, out: Path, seed: int | None, checks=None, samples=None) -> int:
    sec = "experiment"
    seed = cfg.get_int(sec, "seed", 0) if seed is None else seed
    samples = cfg.get_int(sec, "samples", 1000) if samples is None else samples
    if samples < 1:
        raise cfg.error("'samples' must be positive", sec, "samples")
    if checks is None:
        listed = cfg.get_list(sec, "checks", ["all"])
        checks = None if listed == ["all"] else listed
        bad = [c for c in checks or [] if c not in CHECKS]
        if bad:
            raise cfg.error(f"unknown check(s): {', '.join(bad)}", sec, "checks")
    results = run_checks(checks, samples, seed)
    lines = [r.line() for r in results]
    failed = [r.name for r in results if not r.ok]
    lines.append(f"{len(results) - len(failed)}/{len(results)} checks as expected")
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{_stem(cfg)}_report.txt").write_text(
        "\n".join([f"# {line}" for line in cfg.echo() + [f"seed = {seed}", f"samples = {samples}"]] + lines) + "\n"
    )
    print("\n".join(lines))
    return EXIT_EXPECT if failed else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    kind = COMMANDS[args.command]
    if args.command == "verify" and args.check:
        unknown = [c for c in args.check if c not in CHECKS]
        if unknown:
            parser.error(f"unknown check(s): {', '.join(unknown)}; available: {', '.join(CHECKS)}")
    try:
        cfg = load_config(args.config)
        declared = cfg.get("experiment", "kind")
        if declared is not None and declared != kind:
            raise cfg.error(f"config is for '{declared}', not '{kind}'", "experiment", "kind")
        if kind == "dynamics":
            return cmd_dynamics(cfg, args.out, args.seed)
        if kind == "energy_trace":
            return cmd_energy_trace(cfg, args.out, args.seed)
        if kind == "image_recall":
            return cmd_image_recall(cfg, args.out, args.seed)
        return cmd_verify(cfg, args.out, args.seed, args.check, args.samples)
    except ConfigError as exc:
        print(f"hyperam: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
