"""Command-line front end.

Exit codes: 0 success (including rank-deficient channels, which produce a
degradation report), 2 malformed input, 3 unphysical state, 4 internal
numerical failure.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__, _tolerances, measures, protocol, states, tomography
from .exceptions import (
    DimensionError,
    QITransferError,
    RankDeficientError,
    StateFormatError,
    UnphysicalStateError,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PHYSICS = 3
EXIT_NUMERIC = 4

DEFAULT_SWEEP_INPUT = (0.3, -0.4, 0.5)

SWEEP_COLUMNS = [
    "x",
    "rank",
    "discord",
    "concurrence",
    "reconstruction_error",
    "cond",
    "equal_prob_flag",
    "noise_gain",
]
TRANSMIT_COLUMNS = [
    "outcome",
    "status",
    "probability",
    "s1",
    "s2",
    "s3",
    "c1",
    "c2",
    "c3",
    "cond",
    "det_t",
    "noise_gain",
]


class InputError(Exception):
    pass


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        return obj if math.isfinite(obj) else None
    if isinstance(obj, protocol.BellOutcome):
        return str(obj)
    return obj


def _fmt(value):
    # repr() is the shortest string that round-trips a double exactly
    if value is None:
        return "undefined"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def metadata(command, seed=None):
    meta = {
        "tool": "qitransfer",
        "version": __version__,
        "command": command,
        "numpy": np.__version__,
        "tolerances": _tolerances.as_dict(),
    }
    if seed is not None:
        meta["seed"] = seed
        meta["generator"] = tomography.GENERATOR
    return meta


def _write_text(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def write_json(payload, out):
    _write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=False) + "\n", out)


def write_csv(columns, rows, out, meta):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    _write_text(buf.getvalue(), out)
    if out not in (None, "-"):
        write_json(meta, out + ".meta.json")


def _load(path, qubits, what):
    try:
        state = states.load_state(path)
    except OSError as exc:
        raise InputError(f"{what}: cannot read {path}: {exc.strerror}") from exc
    except StateFormatError as exc:
        where = f" (line {exc.line})" if exc.line else ""
        fld = f" field '{exc.field}'" if exc.field else ""
        raise InputError(f"{what}: {path}{where}{fld}: {exc}") from exc
    if state.qubits != qubits:
        raise InputError(f"{what}: {path} holds a {state.qubits}-qubit state, expected {qubits}")
    return state


# --- serializers -------------------------------------------------------------

def classification_dict(cls):
    basis = cls.basis
    return {
        "rank": cls.rank,
        "affine_dim": cls.affine_dim,
        "singular_values": cls.singular_values,
        "pseudo_mixture": {
            "weights_sum": float(np.sum(basis.weights)) if basis.terms else None,
            "terms": [
                {
                    "p": t.p,
                    "alpha_a": t.alpha_a,
                    "alpha_b": t.alpha_b,
                    "physical_a": t.physical_a,
                    "physical_b": t.physical_b,
                }
                for t in basis.terms
            ],
            "raw_terms": [{"d": t.d, "u": t.u, "w": t.w} for t in basis.raw_terms],
        },
    }


def transmission_dict(record):
    outcomes = []
    for rep in record.reports:
        outcomes.append(
            {
                "outcome": str(rep.outcome),
                "status": rep.status,
                "probability": rep.probability,
                "s": None if rep.collapse is None else rep.collapse.s,
                "reconstructed": rep.reconstructed,
                "cond": rep.cond,
                "det_t": rep.det_t,
                "noise_gain": rep.noise_gain,
                "min_norm": rep.min_norm,
                "pure_candidates": rep.pure_candidates,
                "message": rep.message,
            }
        )
    degraded = any(rep.status != "ok" for rep in record.reports)
    return {
        "status": "degraded" if degraded else "ok",
        "input_bloch": record.input_bloch,
        "correlation": record.correlation,
        "classification": classification_dict(record.classification),
        "det_r": record.det_r,
        "det_identity_residual": record.det_identity_residual(),
        "max_reconstruction_error": record.max_error(),
        "outcomes": outcomes,
    }


def _transmission_rows(record):
    rows = []
    for rep in record.reports:
        s = [None] * 3 if rep.collapse is None else list(rep.collapse.s)
        c = [None] * 3 if rep.reconstructed is None else list(rep.reconstructed)
        rows.append(
            {
                "outcome": str(rep.outcome),
                "status": rep.status,
                "probability": rep.probability,
                "s1": s[0],
                "s2": s[1],
                "s3": s[2],
                "c1": c[0],
                "c2": c[1],
                "c3": c[2],
                "cond": rep.cond,
                "det_t": rep.det_t,
                "noise_gain": rep.noise_gain,
            }
        )
    return rows


# --- commands ----------------------------------------------------------------

def cmd_transmit(args):
    rho_c = _load(args.input_c, 1, "--input-c")
    rho_ab = _load(args.channel, 2, "--channel")
    record = protocol.transmit(rho_c, rho_ab)
    meta = metadata("transmit")
    if args.format == "csv":
        write_csv(TRANSMIT_COLUMNS, _transmission_rows(record), args.out, meta)
    else:
        write_json({"metadata": meta, "result": transmission_dict(record)}, args.out)
    return EXIT_OK


def sweep_row(x, bloch=DEFAULT_SWEEP_INPUT):
    channel = states.werner(x)
    rho_c = states.PauliVector.from_bloch(bloch).to_density()
    record = protocol.transmit(rho_c, channel)
    probs = np.array([rep.probability for rep in record.reports])
    conds = [rep.cond for rep in record.reports if rep.cond is not None]
    gains = [rep.noise_gain for rep in record.reports if rep.noise_gain is not None]
    full = record.full_rank and len(conds) == 4
    return {
        "x": float(x),
        "rank": record.classification.rank,
        "discord": measures.discord(channel).discord,
        "concurrence": measures.concurrence(channel).concurrence,
        "reconstruction_error": record.max_error() if full else None,
        "cond": max(conds) if full else None,
        "equal_prob_flag": bool(
            states.is_security_form(channel) and np.all(np.abs(probs - 0.25) <= 1e-10)
        ),
        "noise_gain": max(gains) if full else None,
    }


def cmd_sweep_werner(args):
    if args.points < 2:
        raise InputError("--points must be at least 2")
    if not 0.0 <= args.start <= args.stop <= 1.0:
        raise InputError("sweep range must satisfy 0 <= start <= stop <= 1")
    bloch = DEFAULT_SWEEP_INPUT
    if args.input_c:
        bloch = tuple(states.to_bloch(_load(args.input_c, 1, "--input-c")))
    grid = np.linspace(args.start, args.stop, args.points)
    rows = [sweep_row(x, bloch) for x in grid]
    meta = metadata("sweep-werner")
    meta["grid"] = {"start": args.start, "stop": args.stop, "points": args.points}
    meta["input_bloch"] = list(bloch)
    write_csv(SWEEP_COLUMNS, rows, args.out, meta)
    return EXIT_OK


def cmd_discord(args):
    rho_ab = _load(args.channel, 2, "--channel")
    res = measures.discord(rho_ab, side=args.side)
    payload = {
        "discord": res.discord,
        "classical_correlation": res.classical_correlation,
        "mutual_information": res.mutual_information,
        "optimal_measurement": {
            "theta": res.optimal_measurement[0],
            "phi": res.optimal_measurement[1],
        },
        "optimizer_evals": res.optimizer_evals,
        "side": res.side,
        "concurrence": measures.concurrence(rho_ab).concurrence,
    }
    write_json({"metadata": metadata("discord"), "result": payload}, args.out)
    return EXIT_OK


def cmd_rank(args):
    rho_ab = _load(args.channel, 2, "--channel")
    cls = protocol.rank_classify(states.as_correlation(rho_ab))
    write_json({"metadata": metadata("rank"), "result": classification_dict(cls)}, args.out)
    return EXIT_OK


def cmd_security(args):
    rho_ab = _load(args.channel, 2, "--channel")
    r = states.as_correlation(rho_ab)
    payload = {
        "security_form": states.is_security_form(r),
        "marginal_a": r.marginal_a,
        "marginal_b": r.marginal_b,
        "lambda": r.block,
    }
    write_json({"metadata": metadata("security"), "result": payload}, args.out)
    return EXIT_OK


def cmd_tomography(args):
    rho_c = _load(args.input_c, 1, "--input-c")
    rho_ab = _load(args.channel, 2, "--channel")
    try:
        outcome = protocol.BellOutcome.coerce(args.outcome)
    except ValueError as exc:
        raise InputError(f"--outcome: {exc}") from exc
    if args.shots < 3:
        raise InputError("--shots must be at least 3 (one per axis)")
    meta = metadata("tomography", seed=args.seed)
    try:
        est = tomography.remote_tomography(rho_c, rho_ab, outcome, args.shots, args.seed)
    except RankDeficientError as exc:
        payload = {
            "status": "degraded",
            "message": str(exc),
            "classification": classification_dict(exc.classification),
        }
        write_json({"metadata": meta, "result": payload}, args.out)
        return EXIT_OK
    truth = states.to_bloch(rho_c)
    payload = {
        "status": "ok",
        "outcome": str(est.outcome),
        "probability": est.probability,
        "shots": args.shots,
        "seed": args.seed,
        "records": [
            {"axis": rec.axis, "shots": rec.shots, "plus_counts": rec.plus_counts, "seed": rec.seed}
            for rec in est.records
        ],
        "s_hat": est.s_hat,
        "s_stderr": est.s_stderr,
        "c_hat": est.c_hat,
        "c_cov": est.c_cov,
        "input_bloch": truth,
        "error_norm": float(np.linalg.norm(est.c_hat - truth)),
    }
    write_json({"metadata": meta, "result": payload}, args.out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qitransfer",
        description="Quantum information transmission through two-qubit channels.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transmit", help="collapse and reconstruct for all four Bell outcomes")
    p.add_argument("--input-c", required=True, help="JSON file with the input qubit")
    p.add_argument("--channel", required=True, help="JSON file with the two-qubit channel")
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_transmit)

    p = sub.add_parser("sweep-werner", help="rank, discord and concurrence over Werner states")
    p.add_argument("--points", type=int, default=21)
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--stop", type=float, default=1.0)
    p.add_argument("--input-c", default=None, help="fixed test input (default Bloch 0.3,-0.4,0.5)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep_werner)

    p = sub.add_parser("discord", help="quantum discord of a channel")
    p.add_argument("--channel", required=True)
    p.add_argument("--side", choices=("A", "B"), default="A")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_discord)

    p = sub.add_parser("rank", help="correlation-matrix rank and pseudo-mixture")
    p.add_argument("--channel", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("security", help="check the equal-probability channel form")
    p.add_argument("--channel", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_security)

    p = sub.add_parser("tomography", help="finite-shot remote tomography")
    p.add_argument("--input-c", required=True)
    p.add_argument("--channel", required=True)
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--outcome", default="00", help="two bits mn, e.g. 01")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_tomography)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (StateFormatError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UnphysicalStateError as exc:
        print(f"unphysical state: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except (QITransferError, np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
