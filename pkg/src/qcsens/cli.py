"""The ``qcsens`` command: sweeps, one-off readings, and report tables.

Five subcommands share one measurement schema so their outputs can be piped
into each other and into the plotting package:

* ``perturb``      — random perturbation sweep over a circuit grid
* ``train``        — classifier training sweep with per-iteration readings
* ``sensitivity``  — a single (θ, δ) pair, printed as one row
* ``welch``        — ensemble spread report
* ``compare-bound``— ratio table from a previously written row file

Everything is deterministic under ``--seed``; rerunning a command with the
same arguments reproduces its output byte for byte.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .ansatz import AnsatzConfig, EntanglerKind, RotationKind
from .experiments import (
    COMPARE_COLUMNS,
    CSV_COLUMNS,
    ENTANGLER_PANELS,
    ROTATION_PANELS,
    SUMMARY_COLUMNS,
    ExperimentRow,
    PerturbationSpec,
    compare_bound,
    config_grid,
    read_rows_csv,
    run_perturbation,
    run_training,
    summarize_training,
    write_rows_csv,
    write_rows_json,
)
from .sensitivity import channel_sensitivity
from .training import TrainHyper, load_dataset_csv
from .welch import (
    WELCH_COLUMNS,
    ansatz_state_ensemble,
    basis_ensemble,
    haar_ensemble,
    welch_report,
)

DESK_QUBITS = (1, 2, 3)
DESK_LAYERS = (1, 2, 3)
PAPER_QUBITS = (1, 2, 3, 4)
PAPER_LAYERS = (1, 2, 3, 4, 5)


def parse_range(text: str) -> tuple[int, ...]:
    """``A..B`` (inclusive) or a single integer ``N``."""
    lo, sep, hi = text.partition("..")
    try:
        first = int(lo)
        last = int(hi) if sep else first
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected N or A..B, got {text!r}") from exc
    if first > last:
        raise argparse.ArgumentTypeError(f"range {text!r} is empty")
    return tuple(range(first, last + 1))


def _panel_parser(kind, allow_empty: bool):
    def parse(text: str):
        panels = []
        for chunk in text.split(","):
            if allow_empty and chunk == "none":
                panels.append(())
                continue
            try:
                panels.append(tuple(kind(tok) for tok in chunk.split("+")))
            except ValueError as exc:
                raise argparse.ArgumentTypeError(f"bad gate set {chunk!r}") from exc
        return tuple(panels)

    return parse


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from exc


def _add_grid_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--qubits", type=parse_range, metavar="A..B", help="qubit counts to sweep")
    p.add_argument("--layers", type=parse_range, metavar="A..B", help="layer counts to sweep")
    p.add_argument(
        "--rotations",
        type=_panel_parser(RotationKind, allow_empty=False),
        metavar="SETS",
        help="comma-separated rotation sets, e.g. 'rx+ry,rz' (default: all panels)",
    )
    p.add_argument(
        "--entanglers",
        type=_panel_parser(EntanglerKind, allow_empty=True),
        metavar="SETS",
        help="comma-separated entangler sets ('none' for bare rotations)",
    )


def _add_io_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--output", type=Path, help="write here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _emit(ns, rows, metadata, columns=CSV_COLUMNS) -> None:
    write = write_rows_json if ns.format == "json" else write_rows_csv
    write(ns.output if ns.output else sys.stdout, rows, metadata, columns)


def _base_metadata(command: str) -> dict[str, str]:
    return {"tool": f"qcsens {__version__}", "command": command}


def perturbation_spec_from_args(ns) -> PerturbationSpec:
    if ns.paper_scale:
        qubits = ns.qubits or PAPER_QUBITS
        layers = ns.layers or PAPER_LAYERS
    else:
        qubits = ns.qubits or DESK_QUBITS
        layers = ns.layers or DESK_LAYERS
    return PerturbationSpec(
        qubits=qubits,
        layers=layers,
        rotation_panels=ns.rotations or ROTATION_PANELS,
        entangler_panels=ns.entanglers or ENTANGLER_PANELS,
        fraction=ns.fraction,
        scales=ns.scales,
        samples_per_param=ns.samples_per_param,
        seed=ns.seed,
    )


def _cmd_perturb(ns) -> None:
    spec = perturbation_spec_from_args(ns)
    rows = run_perturbation(spec)
    meta = _base_metadata("perturb")
    meta.update(
        seed=str(spec.seed),
        fraction=repr(spec.fraction),
        scales=",".join(repr(s) for s in spec.scales),
        samples_per_param=(
            f"{spec.samples_per_param} per circuit parameter "
            "(each config/scale cell emits samples_per_param x P rows)"
        ),
        configs=str(len(config_grid(spec))),
    )
    _emit(ns, rows, meta)


def _kinds_text(kinds) -> str:
    return "+".join(k.value for k in kinds)


def _cmd_train(ns) -> None:
    qubits = ns.qubits or (2,)
    layers = ns.layers or (1,)
    rotations = ns.rotations or ((RotationKind.RX, RotationKind.RY),)
    entanglers = ns.entanglers or ((EntanglerKind.CNOT,),)
    runs = ns.runs if ns.runs is not None else (50 if ns.paper_scale else 5)
    if len(ns.betas) != 2:
        raise ValueError("--betas takes exactly two values")
    configs = [
        AnsatzConfig(n, layer_count, rot, ent)
        for n in qubits
        for layer_count in layers
        for rot in rotations
        for ent in entanglers
    ]
    encodings = ("amplitude", "angle") if ns.encoding == "both" else (ns.encoding,)
    hyper = TrainHyper(
        learning_rate=ns.lr,
        beta1=ns.betas[0],
        beta2=ns.betas[1],
        epsilon=ns.eps,
        iterations=ns.iters,
    )
    datasets = [(path.stem, load_dataset_csv(path)) for path in ns.dataset]
    rows = run_training(configs, datasets, encodings, hyper, runs, ns.seed)
    meta = _base_metadata("train")
    meta.update(
        seed=str(ns.seed),
        runs=str(runs),
        iterations=str(hyper.iterations),
        lr=repr(hyper.learning_rate),
        betas=f"{hyper.beta1!r},{hyper.beta2!r}",
        eps=repr(hyper.epsilon),
        datasets="+".join(name for name, _ in datasets),
        encodings="+".join(encodings),
    )
    _emit(ns, rows, meta)
    if ns.output:
        summary = summarize_training(rows)
        summary_path = ns.output.with_name(ns.output.stem + ".summary" + ns.output.suffix)
        meta_summary = dict(meta, command="train-summary")
        write = write_rows_json if ns.format == "json" else write_rows_csv
        write(summary_path, summary, meta_summary, SUMMARY_COLUMNS)


def _cmd_sensitivity(ns) -> None:
    cfg = AnsatzConfig.from_text(ns.config)
    rec = channel_sensitivity(cfg, ns.theta, ns.delta)
    row = ExperimentRow(
        kind="sensitivity",
        config=cfg.to_text(),
        n=cfg.qubits,
        L=cfg.layers,
        rotations=_kinds_text(cfg.rotations),
        entanglers=_kinds_text(cfg.entanglers),
        n_params=cfg.param_count,
        params_per_layer=len(cfg.rotations),
        scale=None,
        dataset=None,
        encoding=None,
        run=None,
        index=0,
        seed=ns.seed,
        delta_abs_sum=rec.delta_abs_sum,
        bound=rec.bound,
        cs_opdiff=rec.cs_opdiff,
        cs_opdiff_gauged=rec.cs_opdiff_gauged,
        cs_channel=rec.cs_channel,
        spectral_diff=rec.spectral_diff,
        loss=None,
        mean_abs_rel_change=None,
        frac_params_changed=None,
    )
    meta = _base_metadata("sensitivity")
    meta["config"] = cfg.to_text()
    _emit(ns, [row], meta)


def _cmd_welch(ns) -> None:
    if ns.ensemble == "haar":
        ensemble = haar_ensemble(ns.dim, ns.count, ns.seed)
    elif ns.ensemble == "basis":
        ensemble = basis_ensemble(ns.dim)
    else:
        if ns.config is None:
            raise ValueError("--config is required for the ansatz ensemble")
        cfg = AnsatzConfig.from_text(ns.config)
        ensemble = ansatz_state_ensemble(cfg, ns.count, ns.seed)
    rows = welch_report(ensemble, ns.t_max)
    meta = _base_metadata("welch")
    meta.update(ensemble=ensemble.provenance, seed=str(ns.seed))
    _emit(ns, rows, meta, WELCH_COLUMNS)


def _cmd_compare_bound(ns) -> None:
    source_meta, rows = read_rows_csv(ns.input)
    table = compare_bound(rows)
    meta = _base_metadata("compare-bound")
    meta.update(input=str(ns.input), source_seed=source_meta.get("seed", ""))
    _emit(ns, table, meta, COMPARE_COLUMNS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcsens",
        description="Parameter-perturbation sensitivity studies of layered circuits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("perturb", help="random perturbation sweep over a circuit grid")
    _add_grid_flags(p)
    p.add_argument("--fraction", type=float, default=0.95, help="share of parameters to nudge")
    p.add_argument(
        "--scales", type=_float_list, default=(0.01, 0.005, 0.001), metavar="T,T,...",
        help="relative perturbation sizes",
    )
    p.add_argument("--samples-per-param", type=int, default=100)
    p.add_argument(
        "--paper-scale", action="store_true",
        help="full study grid (4 qubits, 5 layers) instead of the desk-size default",
    )
    _add_io_flags(p)
    p.set_defaults(handler=_cmd_perturb)

    p = sub.add_parser("train", help="classifier training sweep with sensitivity readings")
    _add_grid_flags(p)
    p.add_argument("--dataset", type=Path, action="append", required=True, help="labelled CSV (repeatable)")
    p.add_argument("--encoding", choices=("amplitude", "angle", "both"), default="amplitude")
    p.add_argument("--runs", type=int, help="independent restarts (default 5, 50 at paper scale)")
    p.add_argument("--iters", type=int, default=150)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--betas", type=_float_list, default=(0.9, 0.99), metavar="B1,B2")
    p.add_argument("--eps", type=float, default=1e-8)
    p.add_argument("--paper-scale", action="store_true", help="50 runs instead of 5")
    _add_io_flags(p)
    p.set_defaults(handler=_cmd_train)

    p = sub.add_parser("sensitivity", help="evaluate a single (θ, θ+δ) circuit pair")
    p.add_argument("--config", required=True, help="circuit text, e.g. 'n=2,L=1,rot=rx+ry,ent=cnot'")
    p.add_argument("--theta", type=_float_list, required=True, metavar="T,T,...")
    p.add_argument("--delta", type=_float_list, required=True, metavar="D,D,...")
    _add_io_flags(p)
    p.set_defaults(handler=_cmd_sensitivity)

    p = sub.add_parser("welch", help="ensemble spread report")
    p.add_argument("--ensemble", choices=("haar", "basis", "ansatz"), default="haar")
    p.add_argument("--dim", type=int, default=2, help="state dimension (haar/basis)")
    p.add_argument("--count", type=int, default=200, help="ensemble size (haar/ansatz)")
    p.add_argument("--t-max", type=int, default=4, dest="t_max")
    p.add_argument("--config", help="circuit text for the ansatz ensemble")
    _add_io_flags(p)
    p.set_defaults(handler=_cmd_welch)

    p = sub.add_parser("compare-bound", help="ratio table from a written row file")
    p.add_argument("--input", type=Path, required=True, help="rows CSV from perturb/train")
    _add_io_flags(p)
    p.set_defaults(handler=_cmd_compare_bound)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        ns.handler(ns)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
