"""Command-line interface.

Subcommands: train, depth, lut, recl, compress, report.  Options may come
from a flat key=value config file (--config) and are overridable by flags.
Exit codes: 0 success, 2 configuration/parse error, 3 runtime error.
"""

import argparse
import sys
from dataclasses import replace

import numpy as np

from .admm import ADMMConfig, BaselineMode, baseline_compress, run_cqcp_admm, vanilla_train
from .errors import ConfigError, ParseError
from .experiment import (ExperimentConfig, emit_report, encoding_spec,
                         format_report, resolve_circuit, resolve_dataset,
                         run_experiment)
from .lut import build_lut
from .recl import reconstruct_lut
from .training import TrainConfig, init_params, loss_and_accuracy
from .transpile import DEFAULT_BASIS, build_depth_table, tcd

def _parse_bool(s) -> bool:
    return str(s).lower() in ("1", "true", "yes")


def _parse_methods(s) -> tuple:
    return tuple(m.strip() for m in s.split(",") if m.strip())


_TRAIN_KEYS = {"lr": ("learning_rate", float), "epochs": ("epochs", int),
               "batch_size": ("batch_size", int), "momentum": ("momentum", float)}
_ADMM_KEYS = {"ratio": ("target_ratio", float), "rho": ("rho", float),
              "alpha": ("alpha", float), "zeta": ("zeta", float),
              "max_iters": ("max_iters", int), "epochs_per_iter": ("epochs_per_iter", int),
              "retrain_epochs": ("retrain_epochs", int),
              "scaled_lambda": ("scaled_lambda_distance", _parse_bool)}
_TOP_KEYS = {"dataset": str, "circuit": str, "seed": int, "encoding": str,
             "orientation": str, "n_classes": int, "noise_p": float, "shots": int,
             "out": str, "csv_pool": _parse_bool, "methods": _parse_methods}


def read_config_file(path) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"expected key=value, got {line!r}", lineno)
            key, val = (p.strip() for p in line.split("=", 1))
            if key not in _TOP_KEYS and key not in _TRAIN_KEYS and key not in _ADMM_KEYS:
                raise ParseError(f"unknown config key {key!r}", lineno)
            values[key] = val
    return values


def build_config(args) -> ExperimentConfig:
    values = read_config_file(args.config) if args.config else {}
    for key in list(_TOP_KEYS) + list(_TRAIN_KEYS) + list(_ADMM_KEYS):
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag

    train_kwargs, admm_kwargs, top_kwargs = {}, {}, {}
    for key, val in values.items():
        if key in _TRAIN_KEYS:
            name, conv = _TRAIN_KEYS[key]
            train_kwargs[name] = conv(val)
        elif key in _ADMM_KEYS:
            name, conv = _ADMM_KEYS[key]
            admm_kwargs[name] = conv(val)
        else:
            top_kwargs[key] = _TOP_KEYS[key](val)
    cfg = ExperimentConfig(train=TrainConfig(**train_kwargs), admm=ADMMConfig(**admm_kwargs),
                           **top_kwargs)
    return replace(cfg, train=replace(cfg.train, seed=cfg.seed))


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--dataset", help="syn4 | syn16 | csv:<path>")
    p.add_argument("--circuit", help="syn4 | syn16 | path to a .circ file")
    p.add_argument("--seed", type=int)
    p.add_argument("--encoding", choices=("angle", "amplitude"))
    p.add_argument("--orientation", choices=("speedup", "ratio"))
    p.add_argument("--n-classes", dest="n_classes", type=int)
    p.add_argument("--csv-pool", dest="csv_pool", action="store_const", const="true")
    p.add_argument("--lr", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--momentum", type=float)
    p.add_argument("--ratio", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--zeta", type=float)
    p.add_argument("--max-iters", dest="max_iters", type=int)
    p.add_argument("--epochs-per-iter", dest="epochs_per_iter", type=int)
    p.add_argument("--retrain-epochs", dest="retrain_epochs", type=int)
    p.add_argument("--scaled-lambda", dest="scaled_lambda", action="store_const", const="true")
    p.add_argument("--noise-p", dest="noise_p", type=float)
    p.add_argument("--shots", type=int)
    p.add_argument("--out")


def _load_params(path, circuit, cfg):
    if path:
        return np.loadtxt(path, ndmin=1)
    return None


def cmd_train(args) -> int:
    cfg = build_config(args)
    dataset, circuit = resolve_dataset(cfg), resolve_circuit(cfg)
    encoding = encoding_spec(cfg)
    params = vanilla_train(circuit, dataset, cfg.train, encoding)
    train_loss, train_acc = loss_and_accuracy(circuit, params, dataset.train, encoding)
    test_loss, test_acc = loss_and_accuracy(circuit, params, dataset.test, encoding)
    depth = tcd(circuit, params)
    print(f"train loss {train_loss:.4f} acc {train_acc:.3f} | "
          f"test loss {test_loss:.4f} acc {test_acc:.3f} | tcd {depth}")
    if args.save:
        np.savetxt(args.save, params)
        print(f"saved parameters to {args.save}")
    return 0


def cmd_depth(args) -> int:
    cfg = build_config(args)
    table = build_depth_table(DEFAULT_BASIS)
    from .transpile import PARAM_CLASSES
    print("gate " + " ".join(PARAM_CLASSES))
    for name, row in table.rows():
        print(name + " " + " ".join(str(d) for d in row))
    if args.circuit or args.config:
        circuit = resolve_circuit(cfg)
        params = _load_params(args.params, circuit, cfg)
        if params is None:
            params = init_params(circuit, cfg.train)
        print(f"circuit {cfg.circuit}: tcd {tcd(circuit, params)}")
    return 0


def cmd_lut(args) -> int:
    cfg = build_config(args)
    circuit = resolve_circuit(cfg)
    lut = build_lut(circuit, DEFAULT_BASIS)
    text = lut.write_csv_text()
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def cmd_recl(args) -> int:
    cfg = build_config(args)
    dataset, circuit = resolve_dataset(cfg), resolve_circuit(cfg)
    encoding = encoding_spec(cfg)
    params = _load_params(args.params, circuit, cfg)
    if params is None:
        params = vanilla_train(circuit, dataset, cfg.train, encoding)
    lut = build_lut(circuit, DEFAULT_BASIS)
    recon = reconstruct_lut(circuit, params, lut, dataset.train, encoding,
                            DEFAULT_BASIS, cfg.orientation)
    lines = ["gate_index,kind,level,depth,metric"]
    for gi in sorted(recon.levels):
        lv = recon.levels[gi]
        vals = ";".join(f"{v:.10g}" for v in lv.value)
        lines.append(f"{gi},{circuit.layers[gi].kind.value},{vals},{lv.depth},"
                     f"{recon.metrics[gi]!r}")
    text = "\n".join(lines) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def cmd_compress(args) -> int:
    cfg = build_config(args)
    dataset, circuit = resolve_dataset(cfg), resolve_circuit(cfg)
    encoding = encoding_spec(cfg)
    lut = build_lut(circuit, DEFAULT_BASIS)
    warm = vanilla_train(circuit, dataset, cfg.train, encoding)
    vanilla_tcd = tcd(circuit, warm)
    _, vanilla_acc = loss_and_accuracy(circuit, warm, dataset.test, encoding)
    if args.method == "CompVQC":
        result = run_cqcp_admm(circuit, dataset, lut, cfg.admm, cfg.train, encoding,
                               DEFAULT_BASIS, warm_theta=warm, orientation=cfg.orientation)
    else:
        result = baseline_compress(BaselineMode(args.method), circuit, dataset, lut,
                                   cfg.admm, cfg.train, encoding, DEFAULT_BASIS,
                                   warm_theta=warm, orientation=cfg.orientation)
    _, acc = loss_and_accuracy(circuit, result.params, dataset.test, encoding)
    depth = tcd(circuit, result.params)
    print(f"vanilla: acc {vanilla_acc:.3f} tcd {vanilla_tcd}")
    print(f"{args.method}: acc {acc:.3f} ({acc - vanilla_acc:+.3f}) tcd {depth} "
          f"({vanilla_tcd / max(depth, 1):.2f}x) masked {result.mask.count} "
          f"converged {result.converged}")
    for rec in result.records:
        print(f"  iter {rec.r}: loss {rec.loss:.4f} acc {rec.acc:.3f} tcd {rec.tcd} "
              f"gap {rec.theta_z_gap:.2e}")
    if args.save:
        np.savetxt(args.save, result.params)
    return 0


def cmd_report(args) -> int:
    cfg = build_config(args)
    report = run_experiment(cfg)
    fmts = ("table", "csv", "json") if args.format == "all" else (args.format,)
    if cfg.out:
        for fmt in fmts:
            ext = {"table": "txt", "csv": "csv", "json": "json"}[fmt]
            emit_report(report, fmt, f"{cfg.out}.{ext}")
            print(f"wrote {cfg.out}.{ext}")
    else:
        for fmt in fmts:
            print(format_report(report, fmt), end="")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vqcompress",
                                     description="Compilation-aware compression of "
                                                 "variational quantum classifiers")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train the uncompressed circuit")
    _add_common(p)
    p.add_argument("--save", help="write trained parameters to a file")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("depth", help="print the standalone depth table and circuit TCD")
    _add_common(p)
    p.add_argument("--params", help="parameter file for the circuit TCD")
    p.set_defaults(func=cmd_depth)

    p = sub.add_parser("lut", help="emit the compression-level table as CSV")
    _add_common(p)
    p.set_defaults(func=cmd_lut)

    p = sub.add_parser("recl", help="emit the per-gate reconstructed levels as CSV")
    _add_common(p)
    p.add_argument("--params", help="trained parameter file (otherwise trains first)")
    p.set_defaults(func=cmd_recl)

    p = sub.add_parser("compress", help="run one compression method end to end")
    _add_common(p)
    p.add_argument("--method", default="CompVQC",
                   choices=("CompVQC", "ZeroOnlyPruning", "PruneOnly", "QuantOnly"))
    p.add_argument("--save", help="write compressed parameters to a file")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("report", help="run the requested methods and emit a report")
    _add_common(p)
    p.add_argument("--methods", help="comma-separated subset of "
                                     "Vanilla,ZeroOnlyPruning,PruneOnly,QuantOnly,CompVQC")
    p.add_argument("--format", default="table", choices=("table", "csv", "json", "all"))
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParseError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure in any module
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
