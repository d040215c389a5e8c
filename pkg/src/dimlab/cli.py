"""Command-line front end: set generation, estimation runs, and check batteries.

Reports are plain JSON and CSV. Every run echoes the tool version and the
exact configuration before computing, and the report digest (which excludes
wall-clock timings) is byte-stable for a fixed config and seed.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import assouad as asd
from . import theorems
from .capacity import estimate_profile
from .covering import ScaleGrid, estimate_box_dim, estimate_intermediate_dim
from .errors import ConfigError, DimlabError, NumericError
from .pointset import (
    IfsSpec,
    PointCloud,
    embed,
    gen_ifs,
    gen_log_set,
    gen_sequence_set,
    middle_third_cantor,
    product,
    read_cloud_csv,
    single_point,
    unit_interval_grid,
    write_cloud_csv,
)
from .stochastic import project, sample_fbm, sample_grassmannian

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


# ---------------------------------------------------------------------------
# Set construction from config specs
# ---------------------------------------------------------------------------

_SET_KEYS = {
    "point": {"dim"},
    "interval": {"step_exp"},
    "fp": {"p", "n"},
    "logset": {"n"},
    "cantor": {"depth"},
    "cantor_product": {"depth"},
    "product": {"a", "b"},
    "embed": {"base", "dim"},
    "csv": {"path"},
}


def build_set(spec: dict) -> PointCloud:
    """Materialize a generator spec like {"kind": "fp", "p": 1, "n": 10000}."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"set spec must be a dict with a 'kind': {spec!r}")
    kind = spec["kind"]
    if kind not in _SET_KEYS:
        raise ConfigError(f"unknown set kind {kind!r}")
    extra = set(spec) - _SET_KEYS[kind] - {"kind"}
    if extra:
        raise ConfigError(f"unknown keys {sorted(extra)} in set spec {kind!r}")
    if kind == "point":
        return single_point([0.0] * int(spec.get("dim", 1)))
    if kind == "interval":
        return unit_interval_grid(2.0 ** -int(spec.get("step_exp", 10)))
    if kind == "fp":
        return gen_sequence_set(float(spec.get("p", 1.0)), int(spec.get("n", 10000)))
    if kind == "logset":
        return gen_log_set(int(spec.get("n", 10000)))
    if kind == "cantor":
        return middle_third_cantor(int(spec.get("depth", 8)))
    if kind == "cantor_product":
        c = middle_third_cantor(int(spec.get("depth", 5)))
        return product(c, c)
    if kind == "product":
        return product(build_set(spec["a"]), build_set(spec["b"]))
    if kind == "embed":
        return embed(build_set(spec["base"]), int(spec["dim"]))
    return read_cloud_csv(spec["path"])


def build_grid(e: PointCloud, theta: float = 1.0, k_min: float | None = None,
               k_max: float | None = None, half_octave: bool = False) -> ScaleGrid:
    """Dyadic grid for a cloud; explicit bounds win, otherwise the default
    margin rule applies, with half-octave steps whenever the window would
    otherwise be too short."""
    if k_max is None:
        hard = math.floor(math.log2(1.0 / e.resolution))
        k_max = hard - 2
    if k_min is None:
        k_min = 6 if k_max >= 9 else max(1.0, k_max - 3.5)
    if k_max - k_min < 3 or half_octave:
        ks = np.arange(float(k_min), float(k_max) + 1e-9, 0.5)
    else:
        ks = np.arange(float(k_min), float(k_max) + 1e-9, 1.0)
    if len(ks) < 4:
        raise ConfigError(f"grid [{k_min}, {k_max}] has fewer than 4 scales")
    return ScaleGrid(tuple(2.0 ** -k for k in ks), theta=theta)


# ---------------------------------------------------------------------------
# Experiment configuration
# ---------------------------------------------------------------------------

_TOP_KEYS = {"seed", "jobs", "out_dir", "slacks", "sets", "checks"}
_CHECK_KEYS = {
    "banaji": {"set", "theta", "k_min", "k_max"},
    "profile_ratio": {"set", "s", "t", "theta", "k_min", "k_max"},
    "assouad_bound": {"set", "t", "theta", "alpha", "k_min", "k_max"},
    "angelini": {"set", "theta_list", "k_min", "k_max"},
    "projection_profile": {"set", "m", "theta", "n_dirs", "k_min", "k_max",
                           "half_octave", "profile_k_min", "profile_k_max"},
    "marstrand": {"set", "m", "theta_list", "n_dirs", "k_min", "k_max", "half_octave"},
    "fbm": {"set", "alpha", "m", "theta", "n_seeds", "k_min", "k_max"},
    "exceptional_frequency": {"set", "m", "theta", "lam", "n_dirs", "max_frequency",
                              "k_min", "k_max"},
}


def default_config() -> dict:
    """The bundled check battery: small canonical sets, every check kind."""
    return {
        "seed": 0,
        "jobs": 1,
        "out_dir": "dimlab_out",
        "slacks": {},
        "sets": {
            "interval": {"kind": "interval", "step_exp": 12},
            "interval2d": {"kind": "embed", "base": {"kind": "interval", "step_exp": 10}, "dim": 2},
            "cantor": {"kind": "cantor", "depth": 10},
            "f1": {"kind": "fp", "p": 1.0, "n": 2000},
            "cc": {"kind": "cantor_product", "depth": 5},
        },
        "checks": [
            {"check": "banaji", "set": "f1", "theta": 0.5, "k_max": 14},
            {"check": "banaji", "set": "cantor", "theta": 0.5},
            {"check": "profile_ratio", "set": "f1", "s": 1.0, "t": 0.5, "theta": 0.5, "k_max": 14},
            {"check": "angelini", "set": "cantor", "theta_list": [0.3, 0.6, 1.0]},
            {"check": "projection_profile", "set": "cc", "m": 1, "theta": 1.0, "n_dirs": 12,
             "k_min": 2.5, "k_max": 5.5, "half_octave": True,
             "profile_k_min": 3.5, "profile_k_max": 6.5},
            {"check": "marstrand", "set": "cc", "m": 1, "theta_list": [1.0, 0.6, 0.3], "n_dirs": 8,
             "k_min": 2.5, "k_max": 5.5, "half_octave": True},
            {"check": "fbm", "set": "interval", "alpha": 0.5, "m": 1, "theta": 1.0,
             "n_seeds": 4, "k_max": 10},
            {"check": "assouad_bound", "set": "f1", "t": 0.25, "theta": 0.5, "alpha": 0.6,
             "k_max": 14},
            {"check": "exceptional_frequency", "set": "interval2d", "m": 1, "theta": 1.0,
             "lam": 0.5, "n_dirs": 16, "max_frequency": 0.1},
        ],
    }


def load_config(path: str | None) -> dict:
    cfg = default_config()
    if path is None:
        return cfg
    try:
        user = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    if not isinstance(user, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(user) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg.update(user)
    _validate_config(cfg)
    return cfg


def _validate_config(cfg: dict) -> None:
    if not isinstance(cfg["sets"], dict) or not cfg["sets"]:
        raise ConfigError("'sets' must be a non-empty object")
    for name, spec in cfg["sets"].items():
        if not isinstance(spec, dict) or "kind" not in spec:
            raise ConfigError(f"set {name!r} must be an object with a 'kind'")
        if spec["kind"] not in _SET_KEYS:
            raise ConfigError(f"set {name!r}: unknown kind {spec['kind']!r}")
    if not isinstance(cfg["checks"], list):
        raise ConfigError("'checks' must be a list")
    for entry in cfg["checks"]:
        if not isinstance(entry, dict) or "check" not in entry:
            raise ConfigError(f"check entry must be an object with 'check': {entry!r}")
        kind = entry["check"]
        if kind not in _CHECK_KEYS:
            raise ConfigError(f"unknown check kind {kind!r}")
        extra = set(entry) - _CHECK_KEYS[kind] - {"check", "slack"}
        if extra:
            raise ConfigError(f"check {kind!r}: unknown keys {sorted(extra)}")
        if entry.get("set") not in cfg["sets"]:
            raise ConfigError(f"check {kind!r} references unknown set {entry.get('set')!r}")
    if not isinstance(cfg["slacks"], dict):
        raise ConfigError("'slacks' must be an object")


# ---------------------------------------------------------------------------
# Check battery
# ---------------------------------------------------------------------------

def _grid_for(entry: dict, cloud: PointCloud, theta: float) -> ScaleGrid:
    return build_grid(cloud, theta=theta, k_min=entry.get("k_min"), k_max=entry.get("k_max"),
                      half_octave=entry.get("half_octave", False))


_VERDICT_NAMES = {
    "banaji": "banaji_bound",
    "profile_ratio": "profile_ratio_bound",
    "assouad_bound": "profile_assouad_bound",
    "angelini": "angelini_constancy",
    "projection_profile": "projection_profile",
    "marstrand": "marstrand_quasi",
    "fbm": "fbm_image",
    "exceptional_frequency": "exceptional_frequency",
}


def run_check(entry: dict, cloud: PointCloud, seed: int, jobs: int,
              slack_overrides: dict) -> theorems.CheckVerdict:
    kind = entry["check"]
    slack = entry.get("slack")
    if slack is None:
        slack = slack_overrides.get(kind, slack_overrides.get(_VERDICT_NAMES[kind]))
    kw = {} if slack is None else {"slack": float(slack)}
    if kind == "banaji":
        grid = _grid_for(entry, cloud, entry.get("theta", 0.5))
        return theorems.check_banaji(cloud, float(entry.get("theta", 0.5)), grid=grid, **kw)
    if kind == "profile_ratio":
        grid = _grid_for(entry, cloud, entry.get("theta", 0.5))
        return theorems.check_profile_ratio_bound(
            cloud, float(entry.get("s", 1.0)), float(entry.get("t", 0.5)),
            float(entry.get("theta", 0.5)), grid=grid, **kw)
    if kind == "assouad_bound":
        grid = _grid_for(entry, cloud, entry.get("theta", 0.5))
        return theorems.check_profile_assouad_bound(
            cloud, float(entry.get("t", 0.5)), float(entry.get("theta", 0.5)),
            float(entry.get("alpha", 0.6)), grid=grid, **kw)
    if kind == "angelini":
        thetas = [float(t) for t in entry.get("theta_list", [0.3, 0.6, 1.0])]
        grid = _grid_for(entry, cloud, 1.0)
        return theorems.check_angelini(cloud, thetas, grid=grid, **kw)
    if kind == "projection_profile":
        theta = float(entry.get("theta", 1.0))
        grid = _grid_for(entry, cloud, theta)
        pk_min, pk_max = entry.get("profile_k_min"), entry.get("profile_k_max")
        if pk_min is not None or pk_max is not None:
            pgrid = build_grid(cloud, theta=theta, k_min=pk_min, k_max=pk_max,
                               half_octave=True)
        else:
            pgrid = None
        return theorems.check_projection_profile(
            cloud, int(entry.get("m", 1)), theta, int(entry.get("n_dirs", 12)),
            grid=grid, profile_grid=pgrid, seed=seed, jobs=jobs, **kw)
    if kind == "marstrand":
        thetas = [float(t) for t in entry.get("theta_list", [1.0, 0.6, 0.3])]
        grid = _grid_for(entry, cloud, thetas[0])
        return theorems.check_marstrand_quasi(
            cloud, int(entry.get("m", 1)), thetas, int(entry.get("n_dirs", 8)),
            seed=seed, grid=grid, jobs=jobs)
    if kind == "fbm":
        theta = float(entry.get("theta", 1.0))
        grid = _grid_for(entry, cloud, theta)
        return theorems.check_fbm(
            cloud, float(entry.get("alpha", 0.5)), int(entry.get("m", 1)), theta,
            int(entry.get("n_seeds", 4)), grid=grid, seed=seed, jobs=jobs, **kw)
    if kind == "exceptional_frequency":
        theta = float(entry.get("theta", 1.0))
        grid = _grid_for(entry, cloud, theta)
        freq = theorems.exceptional_frequency(
            cloud, int(entry.get("m", 1)), theta, float(entry.get("lam", 0.5)),
            int(entry.get("n_dirs", 16)), seed=seed, grid=grid, jobs=jobs)
        inputs = theorems._inputs("exceptional_frequency", cloud, seed=seed,
                                  m=entry.get("m", 1), theta=theta,
                                  lam=entry.get("lam", 0.5))
        return theorems._make_verdict(
            "exceptional_frequency", inputs, "equality", lhs=freq, rhs=0.0,
            slack=float(entry.get("max_frequency", 0.1)),
            notes=(f"fraction of directions below lam={entry.get('lam', 0.5)}",))
    raise ConfigError(f"unknown check kind {kind!r}")


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def report_digest(report: dict) -> str:
    """Digest of the report body, excluding timings and the output location:
    the same config and seed must reproduce the same digest wherever the
    report lands."""
    body = {k: v for k, v in report.items() if k not in ("timings", "digest")}
    if "config" in body:
        body = dict(body)
        body["config"] = {k: v for k, v in body["config"].items() if k != "out_dir"}
    return hashlib.sha256(_canonical_json(body).encode()).hexdigest()


def run_battery(cfg: dict, out_dir: Path) -> tuple[dict, int]:
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {"version": __version__, "config": cfg}
    (out_dir / "manifest.json").write_text(_canonical_json(manifest) + "\n")
    seed = int(cfg["seed"])
    jobs = int(cfg["jobs"])
    clouds = {name: build_set(spec) for name, spec in cfg["sets"].items()}
    verdicts = []
    timings = {}
    for idx, entry in enumerate(cfg["checks"]):
        t0 = time.perf_counter()
        verdict = run_check(entry, clouds[entry["set"]], seed, jobs, cfg["slacks"])
        timings[f"check_{idx}_{verdict.name}"] = time.perf_counter() - t0
        verdicts.append(verdict)
        _write_samples_csv(out_dir / f"samples_{idx}_{verdict.name}.csv", verdict)
    report = {
        "version": __version__,
        "config": cfg,
        "verdicts": [v.to_dict() for v in verdicts],
    }
    report["digest"] = report_digest(report)
    report["timings"] = timings
    (out_dir / "report.json").write_text(json.dumps(report, sort_keys=True, indent=1) + "\n")
    failed = [v for v in verdicts if v.applicable and not v.passed]
    return report, (EXIT_CHECK_FAILED if failed else EXIT_OK)


def _write_samples_csv(path: Path, verdict: theorems.CheckVerdict) -> None:
    rows = verdict.samples
    if not rows:
        return
    keys = sorted({k for row in rows for k in row})
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=keys)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in keys})


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _resolve_seed(args_seed: int | None, config_seed: int | None = None) -> int:
    if args_seed is not None:
        return args_seed
    if config_seed is not None:
        return config_seed
    env = os.environ.get("DIMLAB_SEED")
    return int(env) if env else 0


def cmd_gen(args) -> int:
    if args.generator == "fp":
        cloud = gen_sequence_set(args.p, args.n)
    elif args.generator == "logset":
        cloud = gen_log_set(args.n)
    elif args.generator == "ifs-cantor":
        cloud = middle_third_cantor(args.depth)
    elif args.generator == "interval":
        cloud = unit_interval_grid(2.0 ** -args.step_exp)
    elif args.generator == "point":
        cloud = single_point([0.0] * args.dim)
    elif args.generator == "product":
        cloud = product(read_cloud_csv(args.inputs[0]), read_cloud_csv(args.inputs[1]))
    else:  # pragma: no cover
        raise ConfigError(f"unknown generator {args.generator!r}")
    csv_path, meta_path = write_cloud_csv(cloud, args.out)
    print(f"wrote {csv_path} ({cloud.size} points) and {meta_path}")
    return EXIT_OK


def _estimate_report(args, name: str, est, extra: dict | None = None) -> int:
    out_dir = Path(args.out or "dimlab_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    body = {"version": __version__, "command": name, "cloud": str(args.cloud),
            "estimate": est.to_dict()}
    if extra:
        body.update(extra)
    body["digest"] = report_digest(body)
    path = out_dir / f"{name}_report.json"
    path.write_text(json.dumps(body, sort_keys=True, indent=1) + "\n")
    print(f"{name}: value={est.value:.6f} mode={est.mode} -> {path}")
    if args.dump:
        dump_path = out_dir / f"{name}_scales.csv"
        _dump_estimate_csv(dump_path, name, est, extra or {})
        print(f"dump -> {dump_path}")
    return EXIT_OK


def _dump_estimate_csv(path: Path, name: str, est, extra: dict) -> None:
    diag = est.diagnostics
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        if name == "profile":
            writer.writerow(["t", "theta", "s", "r", "capacity", "gap", "exponent"])
            for r, cap, gap, ex in zip(diag.scales, diag.quantities, diag.gaps, diag.exponents):
                writer.writerow([extra.get("t"), extra.get("theta"), est.value, r, cap, gap, ex])
        elif name == "assouad":
            writer.writerow(["alpha", "R", "r", "max_count", "slope"])
            for row in diag.table:
                writer.writerow([row.get("alpha", ""), row["R"], row["r"],
                                 row["count"], row["exponent"]])
        else:
            writer.writerow(["s", "r", "cover_sum", "exponent"])
            for r, q, ex in zip(diag.scales, diag.quantities, diag.exponents):
                writer.writerow([est.value, r, q, ex])


def cmd_boxdim(args) -> int:
    cloud = read_cloud_csv(args.cloud)
    grid = build_grid(cloud, 1.0, args.k_min, args.k_max, args.half_octave)
    est = estimate_box_dim(cloud, grid, mode=args.mode)
    return _estimate_report(args, "boxdim", est)


def cmd_intdim(args) -> int:
    cloud = read_cloud_csv(args.cloud)
    grid = build_grid(cloud, args.theta, args.k_min, args.k_max, args.half_octave)
    est = estimate_intermediate_dim(cloud, args.theta, grid, mode=args.mode)
    return _estimate_report(args, "intdim", est, {"theta": args.theta})


def cmd_profile(args) -> int:
    cloud = read_cloud_csv(args.cloud)
    grid = build_grid(cloud, args.theta, args.k_min, args.k_max, args.half_octave)
    est = estimate_profile(cloud, args.t, args.theta, grid, mode=args.mode)
    return _estimate_report(args, "profile", est, {"theta": args.theta, "t": args.t})


def cmd_assouad(args) -> int:
    cloud = read_cloud_csv(args.cloud)
    est = asd.estimate_assouad(cloud, theorems.default_scale_pairs(cloud))
    alphas = ([float(a) for a in args.alphas.split(",")] if args.alphas
              else asd.usable_alphas(cloud))
    quasi = asd.estimate_quasi_assouad(cloud, alphas)
    extra = {"alphas": alphas, "quasi_assouad": quasi.to_dict()}
    return _estimate_report(args, "assouad", est, extra)


def cmd_project(args) -> int:
    cloud = read_cloud_csv(args.cloud)
    seed = _resolve_seed(args.seed)
    basis = sample_grassmannian(cloud.dim, args.m, seed)
    out = project(cloud, basis)
    csv_path, meta_path = write_cloud_csv(out, args.out or "projected")
    print(f"wrote {csv_path} and {meta_path}")
    if args.dump_basis:
        stem = Path(args.out or "projected")
        basis_path = stem.with_suffix("").parent / (stem.stem + ".basis.csv")
        np.savetxt(basis_path, basis.matrix, delimiter=",", fmt="%.17g")
        print(f"basis -> {basis_path}")
    return EXIT_OK


def cmd_fbm(args) -> int:
    cloud = read_cloud_csv(args.cloud)
    seed = _resolve_seed(args.seed)
    sample = sample_fbm(cloud, args.alpha, args.m, seed)
    csv_path, meta_path = write_cloud_csv(sample.image, args.out or "fbm_image")
    print(f"wrote {csv_path} and {meta_path} (alpha={args.alpha}, m={args.m}, seed={seed})")
    return EXIT_OK


def cmd_check(args, slack_overrides: dict) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    elif os.environ.get("DIMLAB_SEED"):
        cfg["seed"] = int(os.environ["DIMLAB_SEED"])
    if args.jobs is not None:
        cfg["jobs"] = args.jobs
    if args.out is not None:
        cfg["out_dir"] = args.out
    cfg["slacks"].update(slack_overrides)
    report, code = run_battery(cfg, Path(cfg["out_dir"]))
    n_fail = sum(1 for v in report["verdicts"] if v["applicable"] and not v["passed"])
    n_na = sum(1 for v in report["verdicts"] if not v["applicable"])
    print(f"checks: {len(report['verdicts'])} total, {n_fail} failed, "
          f"{n_na} not applicable; digest {report['digest'][:16]}")
    for v in report["verdicts"]:
        state = "n/a " if not v["applicable"] else ("PASS" if v["passed"] else "FAIL")
        print(f"  [{state}] {v['name']} ({v['inputs']['cloud']}): "
              f"lhs={v['lhs']:.4f} rhs={v['rhs']:.4f} slack={v['slack']:.3f}")
    return code


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _extract_slack_flags(argv: list[str]) -> tuple[list[str], dict]:
    """Pull --slack-<name>=<value> (or the two-token form) out of argv."""
    rest: list[str] = []
    overrides: dict[str, float] = {}
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg.startswith("--slack-"):
            body = arg[len("--slack-"):]
            if "=" in body:
                name, value = body.split("=", 1)
            else:
                name = body
                i += 1
                if i >= len(argv):
                    raise ConfigError(f"--slack-{name} needs a value")
                value = argv[i]
            try:
                overrides[name.replace("-", "_")] = float(value)
            except ValueError as exc:
                raise ConfigError(f"bad slack value for {name!r}: {value!r}") from exc
        else:
            rest.append(arg)
        i += 1
    return rest, overrides


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=None, help="output directory or file stem")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--jobs", type=int, default=None)
    parser.add_argument("--dump", action="store_true", help="write per-scale CSV alongside")


def _add_grid_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k-min", type=float, default=None)
    parser.add_argument("--k-max", type=float, default=None)
    parser.add_argument("--half-octave", action="store_true")
    parser.add_argument("--mode", choices=("slope", "lower", "upper"), default="slope")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dimlab",
                                     description="fractal dimension laboratory")
    parser.add_argument("--version", action="version", version=f"dimlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a canonical set as CSV + metadata")
    gsub = p.add_subparsers(dest="generator", required=True)
    g = gsub.add_parser("fp")
    g.add_argument("--p", type=float, default=1.0)
    g.add_argument("--n", type=int, default=10000)
    g = gsub.add_parser("logset")
    g.add_argument("--n", type=int, default=10000)
    g = gsub.add_parser("ifs-cantor")
    g.add_argument("--depth", type=int, default=8)
    g = gsub.add_parser("interval")
    g.add_argument("--step-exp", type=int, default=10)
    g = gsub.add_parser("point")
    g.add_argument("--dim", type=int, default=1)
    g = gsub.add_parser("product")
    g.add_argument("inputs", nargs=2)
    for name in ("fp", "logset", "ifs-cantor", "interval", "point", "product"):
        gsub.choices[name].add_argument("--out", default="cloud")

    p = sub.add_parser("boxdim", help="box-counting dimension estimate")
    p.add_argument("cloud")
    _add_common(p)
    _add_grid_args(p)

    p = sub.add_parser("intdim", help="intermediate dimension estimate")
    p.add_argument("cloud")
    p.add_argument("--theta", type=float, default=0.5)
    _add_common(p)
    _add_grid_args(p)

    p = sub.add_parser("profile", help="capacity dimension profile estimate")
    p.add_argument("cloud")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--theta", type=float, default=0.5)
    _add_common(p)
    _add_grid_args(p)

    p = sub.add_parser("assouad", help="Assouad dimension and quasi-Assouad estimates")
    p.add_argument("cloud")
    p.add_argument("--alphas", default=None, help="comma-separated alpha grid")
    _add_common(p)

    p = sub.add_parser("project", help="project a cloud onto a Haar-random subspace")
    p.add_argument("cloud")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--dump-basis", action="store_true")
    _add_common(p)

    p = sub.add_parser("fbm", help="fractional Brownian image of a cloud")
    p.add_argument("cloud")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--m", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("check", help="run the configured checker battery")
    p.add_argument("config", nargs="?", default=None)
    _add_common(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv, slack_overrides = _extract_slack_flags(argv)
        parser = make_parser()
        args = parser.parse_args(argv)
        if args.command == "gen":
            return cmd_gen(args)
        if args.command == "boxdim":
            return cmd_boxdim(args)
        if args.command == "intdim":
            return cmd_intdim(args)
        if args.command == "profile":
            return cmd_profile(args)
        if args.command == "assouad":
            return cmd_assouad(args)
        if args.command == "project":
            return cmd_project(args)
        if args.command == "fbm":
            return cmd_fbm(args)
        if args.command == "check":
            return cmd_check(args, slack_overrides)
        raise ConfigError(f"unknown command {args.command!r}")  # pragma: no cover
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DimlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
