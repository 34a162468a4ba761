"""Command-line entry point for building, searching, and simulating
stacked codes.

Subcommands: params, distance, search, simulate, pseudothreshold,
export, decode.  Every flag has a config-file equivalent (a JSON object
keyed by flag destination names, passed via --config); explicit flags
override config values.  All randomness flows from one --seed; each
subsystem derives its own stream by hashing a label, so adding a stage
never perturbs another's stream.  Runs that write files also write a
manifest with a sha256 digest of every output.

Exit codes: 0 success, 2 invalid input, 3 budget exhausted with a
partial result written.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
import warnings
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import codes as codes_mod
from .circuits import NOISE_KINDS, NoiseModel, build_circuit
from .codes import (
    CodeSpec,
    CommutatorViolation,
    build_code,
    classify_parity,
    code_spec_to_dict,
    load_code_spec,
    logical_qubits_from_quotient,
    seed_stabilizer_support,
    write_alist,
    write_dense,
)
from .decoder import Decoder, DecoderConfig
from .distance import (
    BudgetExceeded,
    NotFoundBelow,
    distance_exact,
    distance_randomized,
)
from .groupalg import SpecError
from .search import SearchHit, SearchSpace, enumerate_candidates, evaluate
from .sim import read_detector_model, read_samples, sample, derive_detector_model, summarize

try:
    from importlib.metadata import version as _pkg_version

    VERSION = _pkg_version("stackcodes")
except Exception:  # pragma: no cover - source tree without install metadata
    VERSION = "unknown"


def derive_seed(seed: int, label: str) -> int:
    """Stable per-subsystem seed from the user-visible seed and a label."""
    digest = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def _sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(
    manifest_path, subcommand: str, args: argparse.Namespace, outputs, started: float
) -> None:
    """Record the run: full config echo, seed, version, wall clock, and a
    content digest for every file the run wrote."""
    config = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("cmd", "func", "_started")
    }
    doc = {
        "subcommand": subcommand,
        "config": config,
        "seed": getattr(args, "seed", None),
        "version": VERSION,
        "wall_clock_seconds": time.time() - started,
        "outputs": {str(p): _sha256_file(p) for p in outputs},
    }
    Path(manifest_path).write_text(json.dumps(doc, indent=2, default=str) + "\n")


def _manifest_path(args, primary_out) -> Path:
    if getattr(args, "manifest", None):
        return Path(args.manifest)
    return Path(str(primary_out) + ".manifest.json")


def _load_spec_verbose(path) -> CodeSpec:
    """Load a spec file, surfacing exponent-reduction warnings on stderr."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        spec = load_code_spec(path)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return spec


def _distance_for(code, iters: int, seed: int):
    """Exact distance when affordable, else a randomized upper bound."""
    try:
        return distance_exact(code)
    except BudgetExceeded:
        return distance_randomized(code, iters=iters, seed=seed)


def _decoder_config(args) -> DecoderConfig:
    return DecoderConfig(
        bp_iters=args.bp_iters,
        bp_variant=args.bp_variant,
        bp_schedule=args.bp_schedule,
        ms_scale=args.ms_scale,
        osd_order=args.osd_order,
    )


def _add_decoder_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bp-iters", type=int, default=30)
    p.add_argument("--bp-variant", default="min-sum", choices=["min-sum", "product-sum"])
    p.add_argument("--bp-schedule", default="serial", choices=["serial", "flooding"])
    p.add_argument("--ms-scale", type=float, default=0.8)
    p.add_argument("--osd-order", type=int, default=10)


def _fmt(x: float) -> str:
    return f"{x:.10g}"


# ---------------------------------------------------------------------------
# Subcommands.


def cmd_params(args) -> int:
    spec = _load_spec_verbose(args.spec_file)
    code = build_code(spec)
    parity = classify_parity(code)
    res = _distance_for(code, args.distance_iters, derive_seed(args.seed, "distance"))
    d_note = "" if res.exact else " (upper bound)"
    merit = code.k * res.d_upper**2 / code.n
    lines = [
        f"[[{code.n},{code.k},{res.d_upper}]] {parity}",
        f"label: {spec.label()}",
        f"family: {spec.family}  lattice: {spec.lattice.l} x {spec.lattice.m}"
        + (f"  gamma: {spec.lattice.twist}" if spec.lattice.twist else ""),
        f"distance: {res.d_upper}{d_note}  effort: {res.effort}",
        f"figure of merit kd^2/n: {merit:.1f}",
    ]
    if spec.translation_type:
        k_quot = logical_qubits_from_quotient(spec)
        status = "ok" if k_quot == code.k else f"MISMATCH (rank gives {code.k})"
        lines.insert(2, f"k cross-check (quotient ring): {k_quot} {status}")
    report = "\n".join(lines)
    print(report)
    if args.out:
        Path(args.out).write_text(report + "\n")
        write_manifest(
            _manifest_path(args, args.out), "params", args, [args.out], args._started
        )
    return 0


def cmd_distance(args) -> int:
    spec = _load_spec_verbose(args.spec_file)
    code = build_code(spec)
    if args.method == "exact":
        res = distance_exact(code, w_max=args.w_max)
    elif args.method == "randomized":
        res = distance_randomized(
            code, iters=args.iters, seed=derive_seed(args.seed, "distance")
        )
    else:
        res = _distance_for(code, args.iters, derive_seed(args.seed, "distance"))
    if isinstance(res, NotFoundBelow):
        doc = {"d": None, "exact": True, "note": f"no logical of weight <= {res.w_max}"}
    else:
        doc = {
            "d": res.d_upper,
            "exact": res.exact,
            "witness_weight": int(res.witness.sum()),
            "effort": res.effort,
        }
    text = json.dumps(doc, indent=2)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
        write_manifest(
            _manifest_path(args, args.out), "distance", args, [args.out], args._started
        )
    return 0


def _hit_to_dict(hit: SearchHit) -> dict:
    return {
        "spec": code_spec_to_dict(hit.spec),
        "n": hit.n,
        "k": hit.k,
        "d_upper": hit.d_upper,
        "exact": hit.exact,
        "parity": hit.parity,
        "merit": [hit.figure_of_merit.numerator, hit.figure_of_merit.denominator],
    }


def cmd_search(args) -> int:
    space = SearchSpace(
        family=args.family,
        l_values=tuple(args.l),
        m_values=tuple(args.m),
        gamma_values=tuple(args.gamma),
        terms=args.terms,
        parity=args.parity,
        budget=args.budget,
        seed=derive_seed(args.seed, "search"),
    )
    checkpoint = Path(args.checkpoint or str(args.out) + ".checkpoint.json")
    start_cursor = 0
    frontier: list[SearchHit] = []
    if args.resume and checkpoint.exists():
        state = json.loads(checkpoint.read_text())
        start_cursor = state["cursor"]
        frontier = [
            SearchHit(
                spec=codes_mod.code_spec_from_dict(h["spec"]),
                n=h["n"],
                k=h["k"],
                d_upper=h["d_upper"],
                exact=h["exact"],
                parity=h["parity"],
            )
            for h in state["frontier"]
        ]

    def save_checkpoint(cursor: int) -> None:
        checkpoint.write_text(
            json.dumps(
                {"cursor": cursor, "frontier": [_hit_to_dict(h) for h in frontier]},
                indent=2,
            )
            + "\n"
        )

    emitted = 0
    for cursor, spec in enumerate(enumerate_candidates(space)):
        emitted += 1
        if cursor < start_cursor:
            continue
        if len(frontier) >= args.top:
            code = build_code_or_none(spec)
            if code is None or code.k == 0:
                save_checkpoint(cursor + 1)
                continue
            ceiling = Fraction(code.k * args.plausible_d**2, code.n)
            if ceiling <= frontier[-1].figure_of_merit:
                save_checkpoint(cursor + 1)
                continue
        hit = evaluate(
            spec,
            distance_iters=args.distance_iters,
            seed=derive_seed(args.seed, "search-distance"),
        )
        if hit is not None and (space.parity == "any" or hit.parity == space.parity):
            frontier.append(hit)
            frontier.sort(key=lambda h: (-h.figure_of_merit, h.n))
            del frontier[args.top :]
        save_checkpoint(cursor + 1)
    with open(args.out, "w") as fh:
        for hit in frontier:
            fh.write(json.dumps(_hit_to_dict(hit)) + "\n")
    save_checkpoint(emitted)
    write_manifest(
        _manifest_path(args, args.out),
        "search",
        args,
        [args.out, checkpoint],
        args._started,
    )
    if args.budget and emitted >= args.budget:
        print(
            f"budget of {args.budget} candidates exhausted; partial frontier written",
            file=sys.stderr,
        )
        return 3
    return 0


def build_code_or_none(spec: CodeSpec):
    try:
        return build_code(spec)
    except CommutatorViolation:
        return None


def cmd_simulate(args) -> int:
    spec = _load_spec_verbose(args.spec_file)
    code = build_code(spec)
    for p in args.p:
        if not 0.0 <= p <= 1.0:
            raise SpecError(f"physical error rate {p} outside [0, 1]")
    rounds = args.rounds
    if rounds is None:
        res = _distance_for(
            code, args.distance_iters, derive_seed(args.seed, "distance")
        )
        rounds = res.d_upper
    config = _decoder_config(args)
    rows = []
    for i, p in enumerate(args.p):
        noise = NoiseModel(args.noise, p)
        r = 1 if args.noise == "code-capacity" else rounds
        circuit = build_circuit(code, noise, rounds=r, basis=args.basis)
        if p == 0.0:
            result = summarize(args.shots, 0, r)
        else:
            det, obs = sample(
                circuit, args.shots, seed=derive_seed(args.seed, f"sim:{i}")
            )
            model = derive_detector_model(circuit)
            pred, valid = Decoder(model, config).decode_batch(det)
            failures = int(((pred != obs).any(axis=1) | ~valid).sum())
            result = summarize(args.shots, failures, r)
        grey = 1.0 - (1.0 - p) ** code.k
        rows.append(
            [
                _fmt(p),
                str(result.n_sample),
                str(result.n_error),
                _fmt(result.p_l),
                _fmt(result.lfr),
                _fmt(result.sigma_lfr),
                _fmt(grey),
            ]
        )
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["p", "shots", "failures", "P_L", "LFR", "sigma_LFR", "grey_line"])
        writer.writerows(rows)
    write_manifest(
        _manifest_path(args, args.out), "simulate", args, [args.out], args._started
    )
    return 0


def cmd_pseudothreshold(args) -> int:
    with open(args.csv_file, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if len(rows) < 2:
        raise SpecError("need at least two grid points")
    ps = np.array([float(r["p"]) for r in rows])
    lfr = np.array([float(r["LFR"]) for r in rows])
    grey = np.array([float(r["grey_line"]) for r in rows])
    if not (np.diff(ps) > 0).all():
        raise SpecError("p column must be strictly increasing")
    # A p = 0 row carries no crossing information; drop it before the
    # log-log analysis.
    keep = ps > 0
    ps, lfr, grey = ps[keep], lfr[keep], grey[keep]
    if len(ps) < 2:
        raise SpecError("need at least two grid points with p > 0")
    # Work in log-log space; clip zero LFRs so the sign of the gap is
    # still meaningful (an LFR of zero is certainly below the grey line).
    diff = np.log(np.clip(lfr, 1e-15, None)) - np.log(grey)
    crossings = []
    for i in range(len(ps)):
        if diff[i] == 0.0:
            crossings.append(float(ps[i]))
        elif i + 1 < len(ps) and diff[i] != 0.0 and diff[i + 1] != 0.0:
            if (diff[i] < 0) != (diff[i + 1] < 0):
                frac = -diff[i] / (diff[i + 1] - diff[i])
                logp = math.log(ps[i]) + frac * (math.log(ps[i + 1]) - math.log(ps[i]))
                crossings.append(float(math.exp(logp)))
    if crossings:
        doc = {"p0": crossings[0], "crossings": crossings}
        print(f"pseudo-threshold p0 = {crossings[0]:.6g}")
        if len(crossings) > 1:
            print(f"multiple crossings: {[f'{c:.6g}' for c in crossings]}")
    else:
        doc = {"p0": None, "crossings": []}
        print("no crossing in range")
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
        write_manifest(
            _manifest_path(args, args.out),
            "pseudothreshold",
            args,
            [args.out],
            args._started,
        )
    return 0


def cmd_export(args) -> int:
    spec = _load_spec_verbose(args.spec_file)
    if args.what == "check-matrix":
        code = build_code(spec)
        if args.format == "alist":
            write_alist(code.H, args.out)
        else:
            write_dense(code.H, args.out)
    else:
        sites = seed_stabilizer_support(spec)
        Path(args.out).write_text(
            json.dumps([list(s) for s in sites], indent=2) + "\n"
        )
    write_manifest(
        _manifest_path(args, args.out), "export", args, [args.out], args._started
    )
    return 0


def cmd_decode(args) -> int:
    model = read_detector_model(args.model)
    det, obs = read_samples(args.samples)
    pred, valid = Decoder(model, _decoder_config(args)).decode_batch(det)
    failures = int(((pred != obs).any(axis=1) | ~valid).sum())
    result = summarize(det.shape[0], failures, args.rounds)
    doc = {
        "shots": result.n_sample,
        "failures": result.n_error,
        "P_L": result.p_l,
        "LFR": result.lfr,
        "sigma_LFR": result.sigma_lfr,
        "valid_fraction": float(valid.mean()),
    }
    text = json.dumps(doc, indent=2)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
        write_manifest(
            _manifest_path(args, args.out), "decode", args, [args.out], args._started
        )
    return 0


# ---------------------------------------------------------------------------
# Parser assembly.


def build_parser():
    parser = argparse.ArgumentParser(
        prog="stackcodes",
        description="Self-dual stacked CSS codes: build, search, simulate.",
    )
    subs = parser.add_subparsers(dest="cmd", required=True)
    by_name = {}

    def sub(name, func, **kwargs):
        p = subs.add_parser(name, **kwargs)
        p.set_defaults(func=func)
        p.add_argument("--config", help="JSON file of flag defaults")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--manifest", help="manifest path (default <out>.manifest.json)")
        by_name[name] = p
        return p

    p = sub("params", cmd_params, help="report [[n,k,d]], parity, and merit")
    p.add_argument("spec_file")
    p.add_argument("--distance-iters", type=int, default=200)
    p.add_argument("--out")

    p = sub("distance", cmd_distance, help="distance of one code")
    p.add_argument("spec_file")
    p.add_argument("--method", default="auto", choices=["auto", "exact", "randomized"])
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--w-max", type=int)
    p.add_argument("--out")

    p = sub("search", cmd_search, help="rank candidates by kd^2/n")
    p.add_argument("--family")
    p.add_argument("--l", type=int, nargs="+", default=[])
    p.add_argument("--m", type=int, nargs="+", default=[1])
    p.add_argument("--gamma", type=int, nargs="+", default=[0])
    p.add_argument("--terms", type=int, default=2)
    p.add_argument("--parity", default="any", choices=["any", "odd", "even"])
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--distance-iters", type=int, default=100)
    p.add_argument("--plausible-d", type=int, default=20)
    p.add_argument("--checkpoint")
    p.add_argument("--resume", action="store_true")
    p.add_argument("--out")

    p = sub("simulate", cmd_simulate, help="memory-experiment failure curve")
    p.add_argument("spec_file")
    p.add_argument("--noise", choices=list(NOISE_KINDS))
    p.add_argument("--p", type=float, nargs="+")
    p.add_argument("--shots", type=int)
    p.add_argument("--rounds", type=int, help="default: the code distance")
    p.add_argument("--basis", default="z", choices=["z", "x"])
    p.add_argument("--distance-iters", type=int, default=200)
    _add_decoder_flags(p)
    p.add_argument("--out")

    p = sub("pseudothreshold", cmd_pseudothreshold, help="grey-line crossing")
    p.add_argument("csv_file")
    p.add_argument("--out")

    p = sub("export", cmd_export, help="write matrices or seed supports")
    p.add_argument("spec_file")
    p.add_argument("--what", default="check-matrix", choices=["check-matrix", "seed-support"])
    p.add_argument("--format", default="alist", choices=["alist", "dense"])
    p.add_argument("--out")

    p = sub("decode", cmd_decode, help="decode stored samples against a model")
    p.add_argument("--model")
    p.add_argument("--samples")
    p.add_argument("--rounds", type=int, default=1)
    _add_decoder_flags(p)
    p.add_argument("--out")

    return parser, by_name


def main(argv=None) -> int:
    started = time.time()
    parser, by_name = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            cfg = json.loads(Path(args.config).read_text())
            known = {a.dest for a in by_name[args.cmd]._actions}
            bad = set(cfg) - known
            if bad:
                raise SpecError(f"unknown config keys: {sorted(bad)}")
            by_name[args.cmd].set_defaults(**cfg)
            args = parser.parse_args(argv)
        required = {
            "search": ("family", "out"),
            "simulate": ("noise", "p", "shots", "out"),
            "export": ("out",),
            "decode": ("model", "samples"),
        }
        for dest in required.get(args.cmd, ()):
            if getattr(args, dest) is None:
                raise SpecError(f"missing required option --{dest.replace('_', '-')}")
        args._started = started
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 3
    except (
        SpecError,
        CommutatorViolation,
        ValueError,
        KeyError,
        OSError,
        json.JSONDecodeError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
