"""Config-driven command-line interface.

One declarative TOML file describes a run (noise, state set, ansatz,
optimizer, seeds, output paths); subcommands tie the library modules into
the experiment pipelines and persist JSON reports, CSV trajectories /
sweeps, and QASM circuits.  Exit codes: 0 success, 2 config error,
3 numeric failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

try:
    import tomllib
except ModuleNotFoundError:  # python 3.10
    import tomli as tomllib

import numpy as np

from .ansatz import (
    BoundCircuit,
    QasmParseError,
    build_layout,
    circuit_from_json,

    export_qasm,
    parse_qasm,
)
from .channels import CompositeNoise, noise_from_config, noise_to_config
from .codes import num_errors, potential_distance, standard_encoder
from .designs import haar_sample, two_design, weighted
from .loss import dloss
from .train import (
    OptimConfig,
    TrainReport,
    train_encoding,
    train_recovery,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

class ConfigError(Exception):
    """Invalid or malformed run configuration."""

# Allowed keys per section; unknown sections or keys are rejected.
_SCHEMA = {
    "": {"schema_version"},
    "noise": {"kind", "p", "c", "gamma", "t1_us", "t2_us", "t_us", "gate_noise_p"},
    "stateset": {"kind", "k", "haar_count", "haar_seed", "weights"},
    "ansatz": {"n", "depth_blocks", "layout", "custom_edges", "single_gate", "two_gate"},
    "optimizer": {
        "epochs", "iters_per_epoch", "history_size", "grad_step",
        "convergence_tol", "line_search_max_evals",
    },
    "train": {"seeds", "seed_count", "eval_haar_count", "eval_seed", "init_scale"},
    "recovery": {"encoder", "depth_blocks", "r", "mode", "seed"},
    "evaluate": {"circuit", "k", "estimators", "sweep_key", "sweep_values"},
    "distance": {"circuit", "k", "eps", "probe_p"},
    "baseline": {"k"},
    "output": {"dir"},
}

def load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: TOML parse error: {exc}") from exc
    for section, content in doc.items():
        if not isinstance(content, dict):
            if section not in _SCHEMA[""]:
                raise ConfigError(f"{path}: unknown top-level key {section!r}")
            continue
        if section not in _SCHEMA:
            raise ConfigError(f"{path}: unknown section [{section}]")
        unknown = set(content) - _SCHEMA[section]
        if unknown:
            raise ConfigError(
                f"{path}: unknown key(s) {sorted(unknown)} in section [{section}]"
            )
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"{path}: unsupported schema_version {version}")
    return doc

def _require(cfg: dict, section: str) -> dict:
    if section not in cfg:
        raise ConfigError(f"missing required section [{section}]")
    return cfg[section]

def _noise(cfg: dict) -> CompositeNoise:
    try:
        return noise_from_config(_require(cfg, "noise"))
    except ValueError as exc:
        raise ConfigError(f"[noise]: {exc}") from exc

def _stateset(cfg: dict, default_k: int = 1):
    sec = cfg.get("stateset", {})
    k = int(sec.get("k", default_k))
    kind = sec.get("kind", "two_design")
    try:
        if kind == "two_design":
            return two_design(k)
        if kind == "weighted_two_design":
            if "weights" not in sec:
                raise ConfigError("[stateset]: weighted_two_design needs a weights list")
            return weighted(two_design(k), np.asarray(sec["weights"], dtype=float))
        if kind == "haar_sample":
            return haar_sample(k, int(sec.get("haar_count", 1000)), int(sec.get("haar_seed", 7)))
    except ValueError as exc:
        raise ConfigError(f"[stateset]: {exc}") from exc
    raise ConfigError(f"[stateset]: unknown kind {kind!r}")

def _optim(cfg: dict, recovery: bool = False) -> OptimConfig:
    sec = dict(cfg.get("optimizer", {}))
    if recovery:
        sec.setdefault("epochs", 50)
    try:
        return OptimConfig(**sec)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[optimizer]: {exc}") from exc

def _estimators(tokens, default_haar_seed: int = 7):
    """Parse estimator tokens: 'two_design' or 'haar:COUNT:SEED'."""
    out = []
    for tok in tokens:
        if tok == "two_design":
            out.append(("two_design", None, None))
        elif tok.startswith("haar"):
            parts = tok.split(":")
            count = int(parts[1]) if len(parts) > 1 else 1000
            seed = int(parts[2]) if len(parts) > 2 else default_haar_seed
            out.append(("haar", count, seed))
        else:
            raise ConfigError(f"unknown estimator {tok!r}")
    return out

def _estimator_set(spec, k):
    kind, count, seed = spec
    if kind == "two_design":
        return two_design(k)
    return haar_sample(k, count, seed)

def load_circuit_file(path: str) -> BoundCircuit:
    """Load a circuit from ansatz JSON or a QASM 2.0 subset file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        ansatz, params = circuit_from_json(text)
        if params is None:
            raise ConfigError(f"{path}: circuit has unbound parameters")
        return BoundCircuit(ansatz, params)
    return parse_qasm(text)

def _resolve_circuit(token: str, k_hint: int | None = None):
    """Circuit reference: 'identity', 'code:NAME', or a file path.

    Returns (encoder-or-None, n-or-None, k).
    """
    if token == "identity":
        k = 1 if k_hint is None else k_hint
        return None, k, k
    if token.startswith("code:"):
        name = token.split(":", 1)[1]
        code = standard_encoder(name)
        return code.circuit, code.n, code.k
    circuit = load_circuit_file(token)
    k = 1 if k_hint is None else k_hint
    return circuit, circuit.ansatz.n, k

def _out_dir(cfg: dict, args) -> str:
    out = args.out or cfg.get("output", {}).get("dir") or os.environ.get("DISTQEC_OUT")
    if out is None:
        out = os.path.join("runs", args.command.replace("-", "_"))
    os.makedirs(out, exist_ok=True)
    return out

def _report_pair(encoder, noise, k, estimators, workers):
    blocks = {}
    for spec in estimators:
        sset = _estimator_set(spec, k)
        name = spec[0] if spec[0] != "haar" else f"haar:{spec[1]}:{spec[2]}"
        blocks[name] = json.loads(dloss(sset, encoder, noise, workers=workers).to_json())
    return blocks

def _write_trajectory(path: str, trajectory):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "loss"])
        for i, value in enumerate(trajectory):
            writer.writerow([i, repr(float(value))])

def cmd_baseline(cfg: dict, args) -> int:
    noise = _noise(cfg)
    k = int(cfg.get("baseline", {}).get("k", cfg.get("stateset", {}).get("k", 1)))
    estimators = _estimators(args.estimator or ["two_design", "haar:1000:7"])
    blocks = _report_pair(None, noise, k, estimators, args.workers)
    doc = {"command": "baseline", "k": k, "noise": noise_to_config(noise), "reports": blocks}
    print(json.dumps(doc, indent=2))
    out = args.out or cfg.get("output", {}).get("dir")
    if out:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, "baseline.json"), "w", encoding="utf-8") as fh:
            fh.write(json.dumps(doc, indent=2))
    return EXIT_OK

def cmd_train_encoding(cfg: dict, args) -> int:
    noise = _noise(cfg)
    stateset = _stateset(cfg)
    ans = _require(cfg, "ansatz")
    train_sec = cfg.get("train", {})
    n = int(ans["n"])
    layout = build_layout(ans.get("layout", "full"), n, ans.get("custom_edges"))
    if args.seed_override is not None:
        seeds = [args.seed_override]
    elif "seeds" in train_sec:
        seeds = [int(s) for s in train_sec["seeds"]]
    else:
        seeds = list(range(int(train_sec.get("seed_count", 20))))
    report = train_encoding(
        n=n,
        k=stateset.k,
        depth_blocks=int(ans["depth_blocks"]),
        layout=layout,
        noise=noise,
        stateset=stateset,
        seeds=seeds,
        cfg=_optim(cfg),
        single_gate_kind=ans.get("single_gate", "rzyz"),
        two_gate_kind=ans.get("two_gate", "cz"),
        init_scale=float(train_sec.get("init_scale", np.pi)),
        eval_haar_count=int(train_sec.get("eval_haar_count", 1000)),
        eval_seed=int(train_sec.get("eval_seed", 1905)),
        workers=args.workers,
    )
    out = _out_dir(cfg, args)
    with open(os.path.join(out, "report.json"), "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
    _write_trajectory(os.path.join(out, "trajectory.csv"), report.loss_trajectory)
    qasm = export_qasm(report.ansatz, report.params,
                       note=f"noise: {json.dumps(noise_to_config(noise))}")
    with open(os.path.join(out, "circuit.qasm"), "w", encoding="utf-8") as fh:
        fh.write(qasm)
    summary = {
        "command": "train-encoding",
        "best_seed": report.best_seed,
        "d_worst_haar": report.final["haar"].d_worst,
        "d_avg_haar": report.final["haar"].d_avg,
        "d_worst_two_design": report.final["two_design"].d_worst,
        "wall_time_s": round(report.wall_time, 3),
        "out_dir": out,
    }
    print(json.dumps(summary, indent=2))
    return EXIT_OK

def cmd_train_recovery(cfg: dict, args) -> int:
    noise = _noise(cfg)
    stateset = _stateset(cfg)
    rec = _require(cfg, "recovery")
    token = rec.get("encoder", "identity")
    if token.endswith(".json") and not token.startswith("code:"):
        try:
            with open(token, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError:
            raise
        try:
            encoder = TrainReport.from_json(text).circuit
        except (KeyError, ValueError):
            ansatz, params = circuit_from_json(text)
            if params is None:
                raise ConfigError(f"{token}: circuit has unbound parameters")
            encoder = BoundCircuit(ansatz, params)
    else:
        encoder, _, _ = _resolve_circuit(token, stateset.k)
        if encoder is None:
            encoder = np.eye(2**stateset.k, dtype=complex)
    seed = args.seed_override if args.seed_override is not None else int(rec.get("seed", 0))
    report = train_recovery(
        encoding=encoder,
        recovery_depth=int(rec.get("depth_blocks", 200)),
        r=int(rec.get("r", 0)),
        noise=noise,
        stateset=stateset,
        cfg=_optim(cfg, recovery=True),
        mode=rec.get("mode", "recovery_only"),
        recovery_seed=seed,
    )
    out = _out_dir(cfg, args)
    with open(os.path.join(out, "report.json"), "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
    _write_trajectory(os.path.join(out, "trajectory.csv"), report.loss_trajectory)
    with open(os.path.join(out, "recovery.qasm"), "w", encoding="utf-8") as fh:
        fh.write(export_qasm(report.ansatz, report.params,
                             note=f"noise: {json.dumps(noise_to_config(noise))}"))
    fid = report.final["fidelity"]
    summary = {
        "command": "train-recovery",
        "mode": report.mode,
        "f_avg": fid.f_avg,
        "f_worst": fid.f_worst,
        "encoder_d_worst_haar": report.final["encoder_haar"].d_worst,
        "wall_time_s": round(report.wall_time, 3),
        "out_dir": out,
    }
    print(json.dumps(summary, indent=2))
    return EXIT_OK

def cmd_distance(cfg: dict, args) -> int:
    sec = cfg.get("distance", {}) if cfg else {}
    token = args.circuit or sec.get("circuit")
    if not token:
        raise ConfigError("distance needs a circuit (--circuit or [distance].circuit)")
    k = args.k if args.k is not None else int(sec.get("k", 1))
    eps = args.eps if args.eps is not None else float(sec.get("eps", 0.0))
    probe_p = float(sec.get("probe_p", 0.5))
    circuit, n, k = _resolve_circuit(token, k)
    if circuit is None:
        raise ConfigError("the identity circuit is not a code; supply a real encoder")
    from .codes import CodeSpec

    code = CodeSpec(name=str(token), n=n, k=k, claimed_distance=None, circuit=circuit)
    d_star, per_weight = potential_distance(code, eps=eps, probe_p=probe_p)
    doc = {
        "command": "distance",
        "circuit": str(token),
        "n": n,
        "k": k,
        "eps": eps,
        "d_star": d_star,
        "per_weight_max_loss": {str(w): v for w, v in per_weight.items()},
        "errors_probed": {str(w): num_errors(n, w) for w in per_weight},
    }
    print(json.dumps(doc, indent=2))
    out = args.out or cfg.get("output", {}).get("dir")
    if out:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, "distance.json"), "w", encoding="utf-8") as fh:
            fh.write(json.dumps(doc, indent=2))
    return EXIT_OK

def _sweep_noise(base: dict, key: str, value: float) -> CompositeNoise:
    cfg = dict(base)
    cfg[key] = value
    return noise_from_config(cfg)

def cmd_evaluate(cfg: dict, args) -> int:
    sec = _require(cfg, "evaluate")
    noise_cfg = _require(cfg, "noise")
    k_hint = sec.get("k")
    circuit, _, k = _resolve_circuit(sec.get("circuit", "identity"),
                                     None if k_hint is None else int(k_hint))
    estimators = _estimators(args.estimator or sec.get("estimators", ["two_design"]))
    out = _out_dir(cfg, args)
    if "sweep_key" in sec:
        key = sec["sweep_key"]
        values = [float(v) for v in sec.get("sweep_values", [])]
        if not values:
            raise ConfigError("[evaluate]: sweep_key set but sweep_values empty")
        try:
            sweep_noises = [_sweep_noise(noise_cfg, key, v) for v in values]
        except ValueError as exc:
            raise ConfigError(f"[evaluate]: bad sweep point: {exc}") from exc
        rows = []
        for value, noise in zip(values, sweep_noises):
            for spec in estimators:
                sset = _estimator_set(spec, k)
                name = spec[0] if spec[0] != "haar" else f"haar:{spec[1]}:{spec[2]}"
                rep = dloss(sset, circuit, noise, workers=args.workers)
                rows.append([key, repr(value), name, repr(rep.d_avg), repr(rep.d_worst)])
        path = os.path.join(out, "sweep.csv")
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["sweep_key", "value", "estimator", "d_avg", "d_worst"])
            writer.writerows(rows)
        print(json.dumps({"command": "evaluate", "sweep_rows": len(rows), "csv": path}, indent=2))
        return EXIT_OK
    noise = noise_from_config(noise_cfg)
    blocks = _report_pair(circuit, noise, k, estimators, args.workers)
    doc = {"command": "evaluate", "k": k, "noise": noise_cfg, "reports": blocks}
    with open(os.path.join(out, "evaluate.json"), "w", encoding="utf-8") as fh:
        fh.write(json.dumps(doc, indent=2))
    print(json.dumps(doc, indent=2))
    return EXIT_OK

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distqec",
        description="Learn and evaluate noise-tailored quantum error-correction encodings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config in (
        ("baseline", True),
        ("train-encoding", True),
        ("train-recovery", True),
        ("distance", False),
        ("evaluate", True),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=needs_config, help="run configuration (TOML)")
        p.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                       help="parallel workers for seeds / pair evaluation")
        p.add_argument("--out", default=None, help="output directory override")
        p.add_argument("--seed-override", type=int, default=None,
                       help="replace the configured seed (list) with this one seed")
        p.add_argument("--estimator", action="append", default=None,
                       help="estimator override: two_design or haar:COUNT:SEED")
        if name == "distance":
            p.add_argument("--circuit", default=None,
                           help="circuit file (.json/.qasm) or code:NAME")
            p.add_argument("--eps", type=float, default=None,
                           help="approximate-probe threshold (0 = exact)")
            p.add_argument("--k", type=int, default=None, help="logical qubit count")
    return parser

_COMMANDS = {
    "baseline": cmd_baseline,
    "train-encoding": cmd_train_encoding,
    "train-recovery": cmd_train_recovery,
    "distance": cmd_distance,
    "evaluate": cmd_evaluate,
}

def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else {}
        return _COMMANDS[args.command](cfg, args)
    except (ConfigError, QasmParseError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

if __name__ == "__main__":
    sys.exit(main())
