"""Command-line interface.

Every command is a pure function of its inputs and the global flags; all
randomness derives from ``--seed`` (see :mod:`permcipher.seeding`).
Exit codes: 0 success, 1 validation or input error, 2 infeasible calibration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from itertools import combinations
from pathlib import Path

import numpy as np

from . import __version__
from .attack import distance_linkage, rank_linkage, shuffle_records
from .calibrate import synthesize_keys
from .errors import CalibrationError, CipherError
from .emulators import MethodConfig, mask, profile_keys
from .fileio import (
    RunConfig,
    curves_to_csv,
    dataset_to_csv,
    format_number,
    linkage_report_csv,
    load_dataset,
    load_keys,
    parse_menu,
    report_to_dict,
    save_keys,
)
from .metrics import absolute_displacement, alpha_grid, power_mean, relative_displacement
from .perm import KeyGroup
from .ranks import encrypt, extract_key_group, ranks, residual_noise, reverse_map
from .seeding import stage_rng

log = logging.getLogger("permcipher")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _run_config(args) -> RunConfig:
    return RunConfig(args.seed, args.epsilon, args.alpha_min, args.alpha_max, args.alpha_step, args.normalize)


def _grids(cfg: RunConfig) -> tuple[np.ndarray, np.ndarray]:
    risk = alpha_grid(cfg.alpha_min, min(cfg.alpha_max, 1.0), cfg.alpha_step) if cfg.alpha_min <= 1 else np.array([])
    loss = alpha_grid(max(cfg.alpha_min, 1.0), cfg.alpha_max, cfg.alpha_step) if cfg.alpha_max >= 1 else np.array([])
    return risk, loss


def _keys_for(args) -> tuple[KeyGroup, list[str]]:
    if args.keys:
        K = load_keys(args.keys)
        return K, [f"X{j + 1}" for j in range(K.p)]
    if not (args.original and args.masked):
        raise CipherError("give either --keys or both --original and --masked")
    X, Y = load_dataset(args.original), load_dataset(args.masked)
    return extract_key_group(X, Y, args.epsilon), list(X.column_names)


def cmd_ranks(args) -> int:
    D = load_dataset(args.input)
    R = np.column_stack([ranks(D.column(j), args.direction).ranks for j in range(D.p)])
    _emit(dataset_to_csv(D.with_values(R)), args.output)
    return 0


def cmd_reverse_map(args) -> int:
    X, Y = load_dataset(args.original), load_dataset(args.masked)
    _emit(dataset_to_csv(reverse_map(X, Y)), args.output)
    if args.noise:
        Path(args.noise).write_text(dataset_to_csv(X.with_values(residual_noise(X, Y).entries)), encoding="utf-8")
    return 0


def cmd_extract_keys(args) -> int:
    X, Y = load_dataset(args.original), load_dataset(args.masked)
    save_keys(extract_key_group(X, Y, args.epsilon), args.output, matrix=args.matrix)
    return 0


def cmd_encrypt(args) -> int:
    X = load_dataset(args.input)
    _emit(dataset_to_csv(encrypt(X, load_keys(args.keys))), args.output)
    return 0


def cmd_metrics(args) -> int:
    K, names = _keys_for(args)
    eps, norm = args.epsilon, args.normalize
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "attribute_or_pair", "alpha", "value"])
    for j, k in enumerate(K):
        dist = absolute_displacement(k, eps, norm)
        for a in args.risk_alpha:
            w.writerow(["risk", names[j], format_number(a), repr(power_mean(dist, a))])
    for a_idx, b_idx in combinations(range(K.p), 2):
        dist = relative_displacement(K[a_idx], K[b_idx], eps, norm)
        for a in args.loss_alpha:
            w.writerow(["information-loss", f"{names[a_idx]}|{names[b_idx]}", format_number(a), repr(power_mean(dist, a))])
    _emit(buf.getvalue(), args.output)
    return 0


def cmd_curves(args) -> int:
    cfg = _run_config(args)
    K, names = _keys_for(args)
    risk_grid, loss_grid = _grids(cfg)
    risk, loss = profile_keys(K, names, risk_grid, loss_grid if K.p > 1 else None, cfg.epsilon, cfg.normalize)
    curves = list(risk.values()) + (list(loss.values()) if loss_grid.size else [])
    _emit(curves_to_csv(curves), args.output)
    return 0


def cmd_calibrate(args) -> int:
    menu, diags = parse_menu(args.menu)
    for d in diags:
        log.warning("%s [%s] %s", d.severity, d.code, d.message)
    status = 0
    try:
        K, report = synthesize_keys(menu, args.seed, args.budget, args.epsilon, args.restarts)
    except CalibrationError as exc:
        log.error("%s", exc)
        report, K, status = exc.report, None, 2
    if K is not None:
        save_keys(K, args.output, matrix=args.matrix)
    if args.report and report is not None:
        Path(args.report).write_text(json.dumps(report_to_dict(report), indent=2) + "\n", encoding="utf-8")
    return status


def _method_config(args, seed: int) -> MethodConfig:
    if args.method == "rank-swap":
        return MethodConfig.rank_swap(args.swap_pct, seed)
    if args.method == "additive-noise":
        return MethodConfig.additive(args.noise_ratio, seed)
    return MethodConfig.multiplicative(args.mult_lo, args.mult_hi, seed)


def cmd_emulate(args) -> int:
    cfg = _run_config(args)
    X = load_dataset(args.input)
    Y = mask(X, _method_config(args, cfg.seed))
    _emit(dataset_to_csv(Y), args.output)
    K = extract_key_group(X, Y, cfg.epsilon)
    if args.keys:
        save_keys(K, args.keys)
    if args.curves:
        risk_grid, loss_grid = _grids(cfg)
        risk, loss = profile_keys(K, X.column_names, risk_grid, loss_grid if X.p > 1 else None, cfg.epsilon, cfg.normalize)
        curves = list(risk.values()) + (list(loss.values()) if loss_grid.size else [])
        Path(args.curves).write_text(curves_to_csv(curves), encoding="utf-8")
    return 0


def cmd_attack(args) -> int:
    X = load_dataset(args.original)
    releases = []
    if args.masked:
        releases.append(("given", load_dataset(args.masked)))
    if args.keys:
        releases.append(("keys", encrypt(X, load_keys(args.keys))))
    if args.emulate:
        releases += [
            ("rank-swap", mask(X, MethodConfig.rank_swap(args.swap_pct, args.seed))),
            ("additive-noise", mask(X, MethodConfig.additive(args.noise_ratio, args.seed))),
            ("multiplicative-noise", mask(X, MethodConfig.multiplicative(args.mult_lo, args.mult_hi, args.seed))),
        ]
    if not releases:
        raise CipherError("nothing to attack: give --masked, --keys or --emulate")
    rows = []
    for name, Y in releases:
        for run in range(args.runs):
            Ys, truth = shuffle_records(Y, stage_rng(args.seed, "attack", run))
            for linker, label in ((rank_linkage, "rank"), (distance_linkage, "distance")):
                res = linker(X, Ys, args.strategy, truth)
                rows.append({"masking": name, "method": label, "strategy": args.strategy, "seed": args.seed, "correct_rate": res.correct_rate})
    _emit(linkage_report_csv(rows), args.output)
    return 0


def cmd_menu_check(args) -> int:
    _, diags = parse_menu(args.menu)
    for d in diags:
        print(f"{d.severity}\t{d.code}\t{d.message}")
    if not diags:
        print("ok")
    return 1 if any(d.severity == "error" for d in diags) else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=0, help="root seed for every stochastic stage")
    g.add_argument("--epsilon", type=float, default=1e-6, help="floor for zero displacements")
    g.add_argument("--alpha-min", type=float, default=-5.0)
    g.add_argument("--alpha-max", type=float, default=5.0)
    g.add_argument("--alpha-step", type=float, default=0.01)
    g.add_argument("--normalize", action="store_true", help="divide distances by n-1")
    g.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="permcipher", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=func)
        return p

    p = add("ranks", cmd_ranks, "rank every attribute")
    p.add_argument("input")
    p.add_argument("--direction", choices=["ascending", "descending"], default="descending")
    p.add_argument("-o", "--output")

    p = add("reverse-map", cmd_reverse_map, "original values in masked rank order")
    p.add_argument("original")
    p.add_argument("masked")
    p.add_argument("-o", "--output")
    p.add_argument("--noise", help="also write the residual noise E = Y - Z here")

    p = add("extract-keys", cmd_extract_keys, "recover the key group from an (original, masked) pair")
    p.add_argument("original")
    p.add_argument("masked")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--matrix", action="store_true", help="include dense 0/1 matrices")

    p = add("encrypt", cmd_encrypt, "apply a key group to a dataset")
    p.add_argument("input")
    p.add_argument("--keys", required=True)
    p.add_argument("-o", "--output")

    def key_source(p):
        p.add_argument("--keys")
        p.add_argument("--original")
        p.add_argument("--masked")
        p.add_argument("-o", "--output")

    p = add("metrics", cmd_metrics, "power means at chosen aversion levels")
    key_source(p)
    p.add_argument("--risk-alpha", type=float, nargs="*", default=[-1.0, 0.0, 1.0])
    p.add_argument("--loss-alpha", type=float, nargs="*", default=[1.0, 2.0])

    p = add("curves", cmd_curves, "risk and information-loss curves over the alpha grid")
    key_source(p)

    p = add("calibrate", cmd_calibrate, "synthesize keys from a permutation menu")
    p.add_argument("menu")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--report")
    p.add_argument("--matrix", action="store_true")

    def method_opts(p):
        p.add_argument("--swap-pct", type=float, default=0.30)
        p.add_argument("--noise-ratio", type=float, default=0.5)
        p.add_argument("--mult-lo", type=float, default=0.75)
        p.add_argument("--mult-hi", type=float, default=1.25)

    p = add("emulate", cmd_emulate, "mask with a classical method and measure its menu")
    p.add_argument("input")
    p.add_argument("--method", choices=["rank-swap", "additive-noise", "multiplicative-noise"], required=True)
    method_opts(p)
    p.add_argument("-o", "--output")
    p.add_argument("--keys")
    p.add_argument("--curves")

    p = add("attack", cmd_attack, "rank- and distance-based linkage by a maximum-knowledge attacker")
    p.add_argument("original")
    p.add_argument("--masked")
    p.add_argument("--keys")
    p.add_argument("--emulate", action="store_true", help="attack all three emulated methods")
    method_opts(p)
    p.add_argument("--strategy", choices=["greedy", "optimal-assignment"], default="greedy")
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("-o", "--output")

    p = add("menu-check", cmd_menu_check, "report contradictions in a permutation menu")
    p.add_argument("menu")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        _run_config(args)
        return args.func(args)
    except (CipherError, OSError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
