"""Command-line driver: parameter sweeps with deterministic seeds and CSV/JSON artifacts.

Output is byte-identical for identical (config, seed) pairs: grids are
evaluated in order, floats are written with shortest round-trip repr, CSV
uses comma separators with LF endings, and all randomness flows from the
top-level seed through named per-stage substreams.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import zlib
from dataclasses import asdict

import numpy as np

from . import channel, energetics, register, thermo
from .linalg import matrix_to_json
from .register import parse_scalar

UNITALITY_THRESHOLD = 1e-10
CROOKS_THRESHOLD = 1e-10
ENTROPY_FLOOR = -1e-12
MAX_ANCILLAS = 11

_REQUIRED = object()


class DimensionCapError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _emit_error("invalid_config", message)
        raise SystemExit(2)


def _emit_error(code: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": code, "message": message}) + "\n")


def parse_grid(text) -> list[float]:
    """Grid syntax "start:end:count" (inclusive endpoints), comma list, or scalar."""
    s = str(text).strip()
    if ":" in s:
        parts = s.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be start:end:count, got {text!r}")
        start, end, count = parse_scalar(parts[0]), parse_scalar(parts[1]), int(parts[2])
        if count < 1:
            raise ValueError(f"grid count must be >= 1, got {count}")
        if count == 1:
            return [start]
        return [float(x) for x in np.linspace(start, end, count)]
    if "," in s:
        return [parse_scalar(tok) for tok in s.split(",") if tok.strip()]
    return [parse_scalar(s)]


def stage_rng(seed: int, stage: str) -> np.random.Generator:
    """Named substream of the top-level seed; adding a stage never perturbs others."""
    tag = zlib.crc32(stage.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence([int(seed) % 2**64, tag]))


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {_fmt(k) if isinstance(k, float) else str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.floating):
        return _jsonable(float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _resolve_output(path: str) -> str:
    outdir = os.environ.get("DQC1LAB_OUTDIR")
    if outdir and path not in ("-",) and not os.path.isabs(path):
        os.makedirs(outdir, exist_ok=True)
        return os.path.join(outdir, path)
    return path


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(_resolve_output(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_json(path: str, obj) -> None:
    _write_text(path, json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def _write_csv(path: str, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    _write_text(path, "\n".join(lines) + "\n")


def _check_n(n: int) -> int:
    if n > MAX_ANCILLAS:
        raise DimensionCapError(
            f"dimension cap: n={n} exceeds the dense-matrix limit of {MAX_ANCILLAS} ancillas"
        )
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return n


def _family_ancillas(family: str) -> int | None:
    """Ancilla count implied by a family string, without building the matrix."""
    parts = family.split(":")
    kind = parts[0].strip().lower()
    if kind == "iswap":
        return 2
    if kind in ("identity", "haar") and len(parts) >= 2:
        try:
            return int(parts[1])
        except ValueError:
            return None
    return None


def _resolve_unitary(cfg) -> tuple[np.ndarray, int]:
    if cfg.family and cfg.matrix:
        raise ValueError("give either --family or --matrix, not both")
    if cfg.family:
        implied = _family_ancillas(cfg.family)
        if implied is not None:
            _check_n(implied)
        u, n = register.named_unitary(cfg.family)
    elif cfg.matrix:
        u = register.load_target_unitary(cfg.matrix)
        side = u.shape[0]
        n = int(round(math.log2(side)))
        if 2**n != side:
            raise ValueError(f"matrix side {side} is not a power of two")
    else:
        raise ValueError("a unitary source is required (--family or --matrix)")
    if cfg.n is not None and int(cfg.n) != n:
        raise ValueError(f"--n {cfg.n} does not match the source's ancilla count {n}")
    _check_n(n)
    return u, n


def _iter_iswap(cfg):
    """Yield (theta, U, n) cells for a theta sweep; matrix sources yield one cell."""
    if cfg.family and cfg.family.split(":")[0].strip().lower() == "iswap":
        if cfg.n is not None and int(cfg.n) != 2:
            raise ValueError(f"--n {cfg.n} does not match the iswap family (n=2)")
        thetas = parse_grid(cfg.theta_grid) if cfg.theta_grid else None
        if thetas is None:
            parts = cfg.family.split(":")
            thetas = [parse_scalar(parts[1])] if len(parts) == 2 else [0.0]
        for theta in thetas:
            yield theta, register.iswap(theta), 2
        return
    u, n = _resolve_unitary(cfg)
    yield 0.0, u, n


def _alphas(cfg, default=(1.0,)) -> list[float]:
    if cfg.alpha_grid:
        return parse_grid(cfg.alpha_grid)
    if cfg.alpha is not None:
        return [float(cfg.alpha)]
    return list(default)


def cmd_simulate(cfg) -> int:
    u, n = _resolve_unitary(cfg)
    alpha, omega = float(cfg.alpha if cfg.alpha is not None else 1.0), float(cfg.omega)
    trace_u = complex(np.trace(u))
    mu = {
        basis: register.mu_of(register.trace_estimation_unitary(u, basis), n)
        for basis in (register.BASIS_Z, register.BASIS_Y)
    }
    ch = channel.trace_estimation_channel(u)
    final_state = ch.apply(register.logical_state(alpha))
    ok = (
        abs(mu["z"] - trace_u.real / 2**n) <= 1e-12
        and abs(mu["y"] - trace_u.imag / 2**n) <= 1e-12
    )
    _write_json(
        cfg.output,
        {
            "n": n,
            "alpha": alpha,
            "omega": omega,
            "trace": {"re": trace_u.real, "im": trace_u.imag},
            "mu": mu,
            "p_zero": {b: register.p_zero(mu[b], alpha) for b in mu},
            "final_logical_state": matrix_to_json(final_state),
            "mu_consistent": ok,
        },
    )
    return 0 if ok else 1


def cmd_sample(cfg) -> int:
    u, n = _resolve_unitary(cfg)
    spec = register.RegisterSpec(
        n=n, alpha=float(cfg.alpha if cfg.alpha is not None else 1.0), omega=float(cfg.omega)
    )
    rng = stage_rng(cfg.seed, "sample")
    est = register.sample_trace(spec, u, cfg.basis, int(cfg.shots), rng)
    payload = asdict(est)
    payload.update({"n": n, "alpha": spec.alpha, "seed": int(cfg.seed)})
    _write_json(cfg.output, payload)
    return 0


def cmd_kraus(cfg) -> int:
    u, _ = _resolve_unitary(cfg)
    ks = channel.trace_estimation_channel(u).kraus()
    payload = [
        dict(matrix_to_json(op), label=list(label))
        for op, label in zip(ks.operators, ks.labels)
    ]
    _write_json(cfg.output, payload)
    return 0


def cmd_choi(cfg) -> int:
    u, _ = _resolve_unitary(cfg)
    choi = channel.choi_numeric(channel.trace_estimation_channel(u))
    _write_json(cfg.output, matrix_to_json(choi.matrix))
    return 0


def cmd_work_dist(cfg) -> int:
    alphas = _alphas(cfg)
    omega = float(cfg.omega)
    cells = list(_iter_iswap(cfg))
    if cfg.output == "-" and len(alphas) > 1:
        raise ValueError("work-dist with multiple alphas needs a file --output")
    header = ["alpha", "theta", "work", "probability"]
    for alpha in alphas:
        rows = []
        for theta, u, n in cells:
            ch = channel.trace_estimation_channel(u)
            dist = thermo.work_distribution(alpha, omega, ch)
            rows.extend((alpha, theta, w, p) for w, p in dist.points)
        path = cfg.output
        if len(alphas) > 1:
            base, ext = os.path.splitext(cfg.output)
            path = f"{base}_alpha{alpha:g}{ext or '.csv'}"
        _write_csv(path, header, rows)
    return 0


def cmd_entropy_sweep(cfg) -> int:
    alphas = parse_grid(cfg.alpha_grid) if cfg.alpha_grid else [a / 50.0 for a in range(51)]
    ts = parse_grid(cfg.t_grid) if cfg.t_grid else [x for x in np.linspace(-1, 1, 101)]
    rows = []
    floor_ok = True
    for alpha in alphas:
        for t in ts:
            ds = energetics.delta_entropy_logical(alpha, t)
            floor_ok = floor_ok and ds >= ENTROPY_FLOOR
            rows.append((alpha, float(t), ds))
    _write_csv(cfg.output, ["alpha", "t", "delta_S_C"], rows)
    return 0 if floor_ok else 1


def cmd_crooks_check(cfg) -> int:
    alphas = _alphas(cfg, default=(0.5,))
    omega = float(cfg.omega)
    reports = []
    worst = 0.0
    for alpha in alphas:
        for theta, u, n in _iter_iswap(cfg):
            rep = thermo.crooks_check(alpha, omega, channel.trace_estimation_channel(u))
            item = asdict(rep)
            item["theta"] = theta
            reports.append(item)
            if rep.status == "ok":
                worst = max(worst, rep.max_ratio_deviation)
    payload = {
        "reports": reports,
        "max_ratio_deviation": worst,
        "threshold": CROOKS_THRESHOLD,
        "pass": worst <= CROOKS_THRESHOLD,
    }
    _write_json(cfg.output, payload)
    return 0 if payload["pass"] else 1


def cmd_energetics(cfg) -> int:
    alphas = _alphas(cfg)
    omega = float(cfg.omega)
    cells = list(_iter_iswap(cfg))
    if len(alphas) == 1 and len(cells) == 1:
        theta, u, n = cells[0]
        spec = register.RegisterSpec(n=n, alpha=alphas[0], omega=omega)
        report = energetics.energetics_report(spec, u)
        payload = asdict(report)
        payload["input"] = {
            "n": n,
            "alpha": alphas[0],
            "omega": omega,
            "theta": theta,
            "ancilla_freqs": list(spec.ancilla_freqs),
        }
        _write_json(cfg.output, payload)
        return 0
    rows = []
    for alpha in alphas:
        for theta, u, n in cells:
            spec = register.RegisterSpec(n=n, alpha=alpha, omega=omega)
            rep = energetics.energetics_report(spec, u)
            rows.append((alpha, theta, rep.delta_S_C, rep.delta_E_C, rep.mutual_info, rep.sigma_A))
    _write_csv(cfg.output, ["alpha", "theta", "delta_S_C", "delta_E_C", "mutual_info", "sigma_A"], rows)
    return 0


def cmd_unitality_scan(cfg) -> int:
    n = _check_n(int(cfg.n if cfg.n is not None else 2))
    samples = int(cfg.samples)
    if samples < 1:
        raise ValueError(f"--samples must be >= 1, got {samples}")
    rng = stage_rng(cfg.seed, "unitality-scan")
    defects = []
    from .linalg import haar_unitary

    for _ in range(samples):
        v = haar_unitary(2 ** (n + 1), rng)
        ch = channel.DQC1Channel(dilation_unitary=v, n=n)
        defects.append(channel.unitality_defect(ch.kraus()))
    stats = {
        "samples": samples,
        "n": n,
        "seed": int(cfg.seed),
        "max_defect": max(defects),
        "mean_defect": sum(defects) / samples,
        "threshold": UNITALITY_THRESHOLD,
        "pass": max(defects) <= UNITALITY_THRESHOLD,
    }
    if cfg.format == "csv":
        _write_csv(cfg.output, ["sample", "defect"], list(enumerate(defects)))
    else:
        _write_json(cfg.output, stats)
    return 0 if stats["pass"] else 1


_COMMANDS = {
    "simulate": cmd_simulate,
    "sample": cmd_sample,
    "kraus": cmd_kraus,
    "choi": cmd_choi,
    "work-dist": cmd_work_dist,
    "entropy-sweep": cmd_entropy_sweep,
    "crooks-check": cmd_crooks_check,
    "energetics": cmd_energetics,
    "unitality-scan": cmd_unitality_scan,
}

_DEFAULTS = {
    "family": None,
    "matrix": None,
    "alpha": None,
    "alpha_grid": None,
    "theta_grid": None,
    "t_grid": None,
    "n": None,
    "omega": 1.0,
    "shots": 1000,
    "samples": 50,
    "basis": "z",
    "seed": 0,
    "output": "-",
    "format": "json",
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="dqc1lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--family", help="named unitary family, e.g. iswap:pi, identity:3, haar:2:7")
        p.add_argument("--matrix", help="path to a Matrix JSON file holding the target unitary")
        p.add_argument("--alpha", type=float)
        p.add_argument("--alpha-grid", dest="alpha_grid")
        p.add_argument("--theta-grid", dest="theta_grid")
        p.add_argument("--t-grid", dest="t_grid")
        p.add_argument("--n", type=int)
        p.add_argument("--omega", type=float)
        p.add_argument("--shots", type=int)
        p.add_argument("--samples", type=int)
        p.add_argument("--basis", choices=["z", "y"])
        p.add_argument("--seed", type=int)
        p.add_argument("--output", "-o")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--config", help="JSON config mirroring the flags; flags take precedence")
    return parser


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    file_cfg = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        if not isinstance(file_cfg, dict):
            raise ValueError("config file must hold a JSON object")
    merged = argparse.Namespace(command=args.command)
    for key, default in _DEFAULTS.items():
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            value = cli_value
        elif key in file_cfg:
            value = file_cfg[key]
        elif key.replace("_", "-") in file_cfg:
            value = file_cfg[key.replace("_", "-")]
        else:
            value = default
        setattr(merged, key, value)
    return merged


_GRID_FLAGS = {"--alpha-grid", "--theta-grid", "--t-grid"}


def _join_grid_values(argv: list[str]) -> list[str]:
    """Fold "--t-grid -1:1:101" into "--t-grid=-1:1:101" so argparse accepts it."""
    out = []
    skip = False
    for idx, token in enumerate(argv):
        if skip:
            skip = False
            continue
        nxt = argv[idx + 1] if idx + 1 < len(argv) else None
        if token in _GRID_FLAGS and nxt is not None and nxt.startswith("-") and ":" in nxt:
            out.append(f"{token}={nxt}")
            skip = True
        else:
            out.append(token)
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    args = _build_parser().parse_args(_join_grid_values(argv))
    try:
        cfg = _merge_config(args)
        if cfg.n is not None:
            _check_n(int(cfg.n))
        return _COMMANDS[args.command](cfg)
    except DimensionCapError as exc:
        _emit_error("dimension_cap", str(exc))
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        _emit_error("invalid_config", str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
