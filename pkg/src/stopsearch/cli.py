"""Command-line front end.

    stopsearch sse    --code builtin:golay23 --frame --t 4
    stopsearch tse    --code builtin:tanner155 --k 2 --t 8 --block-shift 31
    stopsearch bound  --code builtin:c1 --bit 2 --eps 0.1
    stopsearch mc     --code builtin:c1 --eps 0.1,0.2 --trials 100000 --seed 1
    stopsearch oracle --code file.alist --t 6
    stopsearch verify --code file.alist --set 2,3,4

Bit and set indices given on the command line are 1-based unless
``--index-base 0`` is passed; indices inside JSON reports are always
0-based.  Every report embeds the configuration that produced it, and
``--config report.json`` re-runs that configuration.

Exit status: 0 success, 2 bad input, 3 budget exhausted (a partial report
is still written), 4 internal invariant violation.  Errors go to stderr
as ``error[input]: ...``, ``error[budget]: ...`` or ``error[invariant]: ...``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import exhaust, simulate, tanner
from .booltree import InvariantViolation
from .exhaust import PartitionEvent, SearchLimits
from .kernels import BACKEND

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_INVARIANT = 0, 2, 3, 4
COMMANDS = ("sse", "tse", "bound", "mc", "oracle", "verify")
WORKERS_ENV = "STOPSEARCH_WORKERS"
# fields that legitimately differ between two runs of the same config
VOLATILE = ("runtime_s",)


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    code: str
    frame: bool = False
    bits: list = field(default_factory=list)  # 0-based
    limits: dict = field(default_factory=lambda: SearchLimits().to_json())
    k: int | None = None
    eps: list = field(default_factory=list)
    partition: list | str | None = None  # event list (0-based) or "default"
    pattern: list = field(default_factory=list)  # 0-based, for verify
    kind: str = "stopping"
    trials: int | None = None
    errors: int | None = None
    seed: int = 0
    workers: int = 1
    block_shift: int | None = None  # quasi-cyclic block size, for tse
    format: str = "json"
    version: int = SCHEMA_VERSION

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.k is not None and self.command not in ("tse", "oracle"):
            raise InputError("--k only applies to tse and oracle")
        if self.command == "tse" and (self.k is None or self.k < 0):
            raise InputError("tse needs --k >= 0")
        if self.command in ("sse", "bound") and self.frame == bool(self.bits):
            raise InputError("give exactly one of --frame or --bit")
        if self.command == "bound" and not self.eps:
            raise InputError("bound needs --eps")
        if self.command == "mc":
            if not self.eps:
                raise InputError("mc needs --eps")
            if (self.trials is None) == (self.errors is None):
                raise InputError("mc needs exactly one of --trials or --errors")
        if self.command == "verify" and not self.pattern:
            raise InputError("verify needs --set")
        if self.partition is not None and self.command not in ("sse", "bound"):
            raise InputError("--partition only applies to sse and bound")
        if any(not 0 <= e <= 1 for e in self.eps):
            raise InputError("eps values must lie in [0, 1]")
        if self.block_shift is not None and self.command != "tse":
            raise InputError("--block-shift only applies to tse")
        if self.workers < 1:
            raise InputError("--workers must be positive")
        if self.format not in ("json", "csv", "text"):
            raise InputError(f"unknown format {self.format!r}")

    def search_limits(self) -> SearchLimits:
        try:
            return SearchLimits(**self.limits)
        except (TypeError, ValueError) as e:
            raise InputError(f"bad limits: {e}") from None


# ---------------------------------------------------------------------------
# inputs

def load_code(source: str, seed: int) -> tanner.SparseParityCheck:
    """``builtin:NAME[:p1,p2,...]`` or a path to an alist file."""
    if source.startswith("builtin:"):
        parts = source.split(":")
        name = parts[1]
        params = parts[2].split(",") if len(parts) > 2 and parts[2] else []
        kw = {}
        if name == "tanner155" and "right" in params:
            kw["right_shift"] = True
            params = []
        try:
            return tanner.builtin_code(name, params, seed, **kw)
        except (ValueError, TypeError) as e:
            raise InputError(str(e)) from None
    try:
        with open(source) as fh:
            return tanner.parse_alist(fh.read())
    except OSError as e:
        raise InputError(f"cannot read {source}: {e.strerror}") from None
    except tanner.AlistError as e:
        raise InputError(f"{source}: {e}") from None


def _ints(text: str, base: int, what: str) -> list:
    try:
        vals = [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise InputError(f"{what} must be a comma-separated list of integers") from None
    if any(v < base for v in vals):
        raise InputError(f"{what} indices are {base}-based")
    return [v - base for v in vals]


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise InputError("--eps must be a comma-separated list of numbers") from None


def load_partition(path: str, base: int) -> list:
    """A JSON list of ``{"one": [...], "zero": [...]}`` events."""
    try:
        with open(path) as fh:
            data = json.load(fh)
        return [{"one": [int(i) - base for i in ev.get("one", [])],
                 "zero": [int(i) - base for i in ev.get("zero", [])]} for ev in data]
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    except (ValueError, TypeError, AttributeError) as e:
        raise InputError(f"bad partition file {path}: {e}") from None


def _check_index(H, idx: list, what: str) -> None:
    for i in idx:
        if not 0 <= i < H.n:
            raise InputError(f"{what} index {i} out of range for n = {H.n}")


# ---------------------------------------------------------------------------
# execution

def _bit_job(args):
    H, bit, limits, bounds, eps = args
    return exhaust.sse_bit(H, bit, limits, bounds=bounds, eps_grid=eps)


def _partition_events(cfg: RunConfig, H, scope):
    if cfg.partition is None:
        return None
    if cfg.partition == "default":
        return exhaust.default_partition(H, scope)
    return [PartitionEvent(frozenset(e["one"]), frozenset(e["zero"])) for e in cfg.partition]


def _search(cfg: RunConfig, H, bounds: bool) -> list:
    limits = cfg.search_limits()
    eps = list(cfg.eps)
    scopes = ["frame"] if cfg.frame else list(cfg.bits)
    if cfg.partition is not None:
        out = []
        for s in scopes:
            try:
                out.append(exhaust.composite_sse(H, s, _partition_events(cfg, H, s), limits, bounds, eps))
            except (ValueError, IndexError) as e:
                raise InputError(str(e)) from None
        return out
    if cfg.frame:
        return [exhaust.sse_frame(H, limits, bounds=bounds, eps_grid=eps)]
    jobs = [(H, b, limits, bounds, eps) for b in scopes]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(_bit_job, jobs))
    return [_bit_job(j) for j in jobs]


def execute(cfg: RunConfig) -> tuple[dict, int]:
    """Run one configuration; returns the report and the exit status."""
    cfg.validate()
    H = load_code(cfg.code, cfg.seed)
    _check_index(H, cfg.bits, "bit")
    _check_index(H, cfg.pattern, "set")
    report = {"version": SCHEMA_VERSION, "config": asdict(cfg), "code": {
        "n": H.n, "m": H.m, "checksum": H.checksum()}, "backend": BACKEND}
    status = EXIT_OK
    cmd = cfg.command
    if cmd in ("sse", "bound"):
        reps = _search(cfg, H, bounds=cmd == "bound")
        report["results"] = [r.to_json() for r in reps]
        if cmd == "bound":
            for r, res in zip(reps, report["results"]):
                res["lb_points"] = [[e, float(r.lb_curve(Fraction(e)))] if r.lb_curve is not None else [e, 0.0]
                                    for e in cfg.eps]
        if not all(r.exhaustive for r in reps):
            status = EXIT_BUDGET
    elif cmd == "tse":
        try:
            sym = [tanner.block_shift(H.n, cfg.block_shift)] if cfg.block_shift else []
            r = exhaust.ktse(H, cfg.k, cfg.search_limits(), symmetry=sym)
        except ValueError as e:
            raise InputError(str(e)) from None
        report["results"] = [r.to_json()]
        if not r.exhaustive:
            status = EXIT_BUDGET
    elif cmd == "oracle":
        limits = cfg.search_limits()
        kind = "trapping" if cfg.k else cfg.kind
        out = []
        for b in (cfg.bits or [None]):
            try:
                size, sets = simulate.brute_force_patterns(H, limits.t, kind, b, cfg.k or 0)
            except ValueError as e:
                raise InputError(str(e)) from None
            out.append({"scope": "frame" if b is None else f"bit:{b}", "w_min": size,
                        "count": len(sets), "sets": [list(s) for s in sets], "exhaustive": True})
        report["results"] = out
    elif cmd == "mc":
        out = []
        for e in cfg.eps:
            est = simulate.mc_run(H, e, trials=cfg.trials, errors=cfg.errors, seed=cfg.seed)
            out.append(est.to_json())
        report["results"] = out
    elif cmd == "verify":
        pc = tanner.classify_pattern(H, cfg.pattern)
        report["results"] = [dict(pc.to_json(), set=sorted(cfg.pattern))]
    return report, status


# ---------------------------------------------------------------------------
# output

def _strip_volatile(obj):
    if isinstance(obj, dict):
        return {k: _strip_volatile(v) for k, v in obj.items() if k not in VOLATILE}
    if isinstance(obj, list):
        return [_strip_volatile(v) for v in obj]
    return obj


def comparable(report: dict) -> dict:
    """The report without fields that change from run to run."""
    return _strip_volatile(report)


def render(report: dict, fmt: str) -> str:
    cmd = report["config"]["command"]
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt == "text":
        if cmd == "verify":
            return "\n".join(report["results"][0]["memberships"]) + "\n"
        lines = []
        for r in report["results"]:
            lines.append(f"{r.get('scope', '')} w_min={r.get('w_min')} count={r.get('count')} "
                         f"exhaustive={str(r.get('exhaustive')).lower()}")
        return "\n".join(lines) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if cmd == "bound":
        w.writerow(["scope", "eps", "lb", "ub", "w_min", "exhaustive"])
        for r in report["results"]:
            lbs = dict((e, v) for e, v in r["lb_points"])
            for e, ub in r["ub_points"]:
                w.writerow([r["scope"], e, repr(lbs.get(e, 0.0)), repr(ub), r["w_min"], r["exhaustive"]])
    elif cmd == "mc":
        w.writerow(["eps", "trials", "frame_errors", "fer", "fer_ci95", "seed"])
        for r in report["results"]:
            w.writerow([r["eps"], r["trials"], r["frame_errors"], repr(r["fer"]), repr(r["fer_ci95"]), r["seed"]])
    elif cmd == "verify":
        w.writerow(["kind", "size", "degree_one_checks", "odd_degree_checks"])
        for r in report["results"]:
            w.writerow([r["kind"], r["size"], r["degree_one_checks"], r["odd_degree_checks"]])
    else:
        w.writerow(["scope", "w_min", "exhaustive", "set"])
        for r in report["results"]:
            for s in r["sets"] or [[]]:
                w.writerow([r["scope"], r["w_min"], r["exhaustive"], " ".join(map(str, s))])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stopsearch", description="Stopping-set and trapping-set exhaustion.")
    p.add_argument("command", choices=COMMANDS, nargs="?")
    p.add_argument("--config", help="re-run the configuration embedded in a report")
    p.add_argument("--code", help="builtin:NAME[:params] or an alist path")
    p.add_argument("--frame", action="store_true")
    p.add_argument("--bit", help="bit index, comma list, or 'all'")
    p.add_argument("--t", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--eps")
    p.add_argument("--set", dest="pattern")
    p.add_argument("--partition", help="JSON event file or 'default'")
    p.add_argument("--kind", choices=("stopping", "codeword", "trapping"), default="stopping")
    p.add_argument("--trials", type=int)
    p.add_argument("--errors", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--node-budget", type=int)
    p.add_argument("--count-cap", type=int)
    p.add_argument("--time-budget", type=float)
    p.add_argument("--index-base", type=int, choices=(0, 1), default=1)
    p.add_argument("--workers", type=int)
    p.add_argument("--block-shift", type=int, help="tse: use the cyclic shift inside blocks of this size")
    p.add_argument("--format", choices=("json", "csv", "text"))
    p.add_argument("--out")
    return p


def config_from_args(ns) -> RunConfig:
    if ns.config:
        try:
            with open(ns.config) as fh:
                data = json.load(fh)
            data = data.get("config", data)
            cfg = RunConfig(**data)
        except OSError as e:
            raise InputError(f"cannot read {ns.config}: {e.strerror}") from None
        except (ValueError, TypeError) as e:
            raise InputError(f"bad config in {ns.config}: {e}") from None
        if ns.format:
            cfg.format = ns.format
        return cfg
    if not ns.command or not ns.code:
        raise InputError("need a command and --code (or --config)")
    base = ns.index_base
    limits = SearchLimits().to_json()
    for key, val in (("t", ns.t), ("node_budget", ns.node_budget), ("count_cap", ns.count_cap),
                     ("time_budget", ns.time_budget)):
        if val is not None:
            limits[key] = val
    bits = []
    if ns.bit:
        if ns.bit == "all":
            H = load_code(ns.code, ns.seed)
            bits = list(H.free)
        else:
            bits = _ints(ns.bit, base, "--bit")
    partition = None
    if ns.partition:
        partition = "default" if ns.partition == "default" else load_partition(ns.partition, base)
    workers = ns.workers if ns.workers is not None else int(os.environ.get(WORKERS_ENV, "1") or 1)
    fmt = ns.format or {"bound": "csv", "mc": "csv", "verify": "text"}.get(ns.command, "json")
    return RunConfig(command=ns.command, code=ns.code, frame=ns.frame, bits=bits, limits=limits,
                     k=ns.k, eps=_floats(ns.eps) if ns.eps else [], partition=partition,
                     pattern=_ints(ns.pattern, base, "--set") if ns.pattern else [], kind=ns.kind,
                     trials=ns.trials, errors=ns.errors, seed=ns.seed, workers=workers,
                     block_shift=ns.block_shift, format=fmt)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        report, status = execute(cfg)
    except InputError as e:
        print(f"error[input]: {e}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantViolation as e:
        print(f"error[invariant]: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    text = render(report, cfg.format)
    if ns.out:
        with open(ns.out, "w") as fh:
            fh.write(text)
        if cfg.format != "json":
            # keep the full report next to the table so the run can be repeated
            with open(ns.out + ".json", "w") as fh:
                fh.write(render(report, "json"))
    else:
        sys.stdout.write(text)
    if status == EXIT_BUDGET:
        print("error[budget]: search stopped before it was exhaustive; the report is partial", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
