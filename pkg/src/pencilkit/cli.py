"""Command-line interface tying the analysis modules together.

Subcommands: analyze, spectra, chains, approx, distance, dh-check,
simulate, examples.  All numeric output uses 17 significant digits and
deterministic ordering, so identical inputs give byte-identical output.
Exit codes: 0 success, 1 verdict failure in ``examples run``, 2 input
error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import approx as approxmod
from . import chains as chainsmod
from . import dh as dhmod
from . import fixtures as fixturesmod
from . import odae, sections, serialize, spectra

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_INPUT = 2


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


class CLIError(Exception):
    """Input error; reported and mapped to exit code 2."""


def _load(path: str):
    if not os.path.exists(path):
        raise CLIError(f"{path}: file not found")
    try:
        return serialize.load_pencil(path)
    except serialize.FormatError as exc:
        raise CLIError(str(exc)) from exc


def _fixture_data(name: str, seed: int = 0, **params) -> dict:
    try:
        fx = fixturesmod.get_fixture(name)
    except KeyError as exc:
        raise CLIError(str(exc)) from exc
    merged = {**fx.default_params, **params}
    if "seed" in fx.default_params:
        merged["seed"] = seed
    return fx.build(**merged)


def _target_pencil(args, seed: int = 0):
    """Pencil from --fixture or from a JSON path, with its caveat notes."""
    if getattr(args, "fixture", None):
        data = _fixture_data(args.fixture, seed=seed)
        if "pencil" not in data:
            raise CLIError(f"fixture {args.fixture!r} is caveat-only and builds no pencil")
        return data["pencil"], tuple(data.get("notes", ()))
    if getattr(args, "pencil", None):
        return _load(args.pencil), ()
    raise CLIError("either a pencil JSON path or --fixture is required")


def _parse_complex_list(text: str) -> list[complex]:
    out = []
    for item in text.split(","):
        item = item.strip().replace("i", "j")
        try:
            out.append(complex(item))
        except ValueError as exc:
            raise CLIError(f"bad complex number {item!r}") from exc
    if not out:
        raise CLIError("empty probe list")
    return out


def _parse_int_list(text: str) -> list[int]:
    try:
        vals = [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise CLIError(f"bad integer list {text!r}") from exc
    if not vals:
        raise CLIError("empty integer list")
    return vals


def _emit(lines, out_path: str | None):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_analyze(args) -> int:
    p, notes = _target_pencil(args, args.seed)
    s = sections.section(p, args.n)
    lines = [
        f"window n={args.n}: {s.shape[0]}x{s.shape[1]} section "
        f"({s.window_in.space.kind} -> {s.window_out.space.kind})"
    ]
    for note in notes:
        lines.append(f"note: {note}")
    for lam in (0.0, 1.0, 1.0j, spectra.INFINITY):
        pc = spectra.classify_point(s, lam)
        label = "inf" if lam == spectra.INFINITY else f"{complex(lam).real:g}{complex(lam).imag:+g}i"
        lines.append(
            f"lambda={label}: sigma_min={_fmt(pc.sigma_min)} verdict={pc.verdict}"
        )
    cert = sections.distance_to_singularity_bound(s)
    lines.append(f"stacked sigma_min certificate: {_fmt(cert.value)}")
    rep = chainsmod.extract_right_chain(s)
    if rep is None:
        lines.append("right singular chain: none (section is regular)")
    else:
        lines.append(f"right singular chain: minimal index {rep.minimal_index}")
    if p.dh is not None:
        drep = dhmod.dh_classify(s, p.dh)
        lines.append(
            "dh: structure "
            + ("ok" if drep.diagnostics.structure_ok else "VIOLATED")
            + f", common kernel dim {drep.common_kernel_dim}, "
            + f"classification {drep.classification}"
        )
    lines.append("verdicts describe the chosen section, not the infinite object")
    _emit(lines, args.out)
    return EXIT_OK


def _cmd_spectra(args) -> int:
    p, notes = _target_pencil(args, args.seed)
    s = sections.section(p, args.n)
    try:
        rect = tuple(float(x) for x in args.rect.split(","))
        steps = tuple(int(x) for x in args.steps.split(","))
        if len(rect) != 4 or len(steps) != 2:
            raise ValueError
    except ValueError as exc:
        raise CLIError("--rect needs 4 reals and --steps 2 integers") from exc
    grid = spectra.spectra_grid(s, rect, steps)
    lines = [f"# note: {n}" for n in notes]
    lines.append("re,im,sigma_min,sigma_min_adjoint,verdict")
    for re, im, sv, sva, verdict in grid.rows():
        lines.append(f"{_fmt(re)},{_fmt(im)},{_fmt(sv)},{_fmt(sva)},{verdict}")
    _emit(lines, args.out)
    return EXIT_OK


def _cmd_chains(args) -> int:
    p, notes = _target_pencil(args, args.seed)
    s = sections.section(p, args.n)
    report: dict = {"window_n": args.n, "notes": list(notes)}
    for side, extract in (
        ("right", chainsmod.extract_right_chain),
        ("left", chainsmod.extract_left_chain),
    ):
        rep = extract(s, args.tol)
        if rep is None:
            report[side] = None
            continue
        entry = rep.to_json()
        poly = chainsmod.chain_to_polynomial(rep)
        entry["verify_residual"] = chainsmod.verify_singular_polynomial(
            s if side == "right" else s, poly, side=side
        )
        report[side] = entry
    _emit([json.dumps(report, sort_keys=True)], args.out)
    return EXIT_OK


def _cmd_approx(args) -> int:
    data = _fixture_data(args.fixture, seed=args.seed)
    if "sequence" not in data:
        raise CLIError(f"fixture {args.fixture!r} provides no polynomial sequence")
    seq = data["sequence"]
    probes = _parse_complex_list(args.probes)
    n_values = _parse_int_list(args.n_values)
    gram = approxmod.gram_lower_bound(seq, n_values)
    lmin = dict(zip(gram.n_values, gram.lambda_min))
    lines = ["n,probe_re,probe_im,fwd_residual,rev_residual,p_norm,revp_norm,gram_lambda_min"]
    if "pencil" in data:
        rows = approxmod.sequence_residuals(data["pencil"], seq, probes, n_values)
        for r in rows:
            lines.append(
                ",".join(
                    [
                        str(r.n),
                        _fmt(r.probe.real),
                        _fmt(r.probe.imag),
                        _fmt(r.forward),
                        _fmt(r.reverse),
                        _fmt(r.p_norm),
                        _fmt(r.revp_norm),
                        _fmt(lmin[r.n]),
                    ]
                )
            )
    else:
        for n in n_values:
            poly = seq(n)
            for lam in probes:
                lines.append(
                    ",".join(
                        [
                            str(n),
                            _fmt(lam.real),
                            _fmt(lam.imag),
                            "",
                            "",
                            _fmt(np.sqrt(sum(abs(c) ** 2 for c in poly.evaluate(lam).values()))),
                            _fmt(np.sqrt(sum(abs(c) ** 2 for c in poly.reversal().evaluate(lam).values()))),
                            _fmt(lmin[n]),
                        ]
                    )
                )
    _emit(lines, args.out)
    return EXIT_OK


def _witness_support_center(cert, window) -> float:
    w = np.abs(cert.witness) ** 2
    total = float(w.sum())
    if total == 0:
        return 0.0
    idx = np.asarray(window.indices, dtype=float)
    return float((idx * w).sum() / total)


def _cmd_distance(args) -> int:
    p, notes = _target_pencil(args, args.seed)
    lines = [f"# note: {n}" for n in notes]
    lines.append("n,stacked_sigma_min,witness_support_center")
    for n in _parse_int_list(args.sections):
        s = sections.section(p, n)
        cert = sections.distance_to_singularity_bound(s)
        lines.append(
            f"{n},{_fmt(cert.value)},{_fmt(_witness_support_center(cert, s.window_in))}"
        )
    _emit(lines, args.out)
    return EXIT_OK


def _cmd_dh_check(args) -> int:
    p, notes = _target_pencil(args, args.seed)
    data = _fixture_data(args.fixture, seed=args.seed) if args.fixture else {}
    target = data.get("dh_pencil", p) if args.use_companion else p
    if target.dh is None:
        raise CLIError("pencil carries no dissipative-Hamiltonian metadata")
    s = sections.section(target, args.n)
    rep = dhmod.dh_classify(s, target.dh)
    lines = [f"note: {n}" for n in notes]
    d = rep.diagnostics
    lines += [
        f"structure: {'ok' if d.structure_ok else 'VIOLATED'}",
        f"  Q*E selfadjoint defect : {_fmt(d.qe_selfadjoint_defect)}",
        f"  Q*E smallest eigenvalue: {_fmt(d.qe_min_eig)}",
        f"  sym(B) largest eigenvalue: {_fmt(d.b_sym_max_eig)}",
        f"  sigma_min(Q)           : {_fmt(d.q_sigma_min)}",
    ]
    if d.j_skew_defect is not None:
        lines.append(f"  J skew defect          : {_fmt(d.j_skew_defect)}")
    if d.r_min_eig is not None:
        lines.append(f"  R smallest eigenvalue  : {_fmt(d.r_min_eig)}")
    lines += [
        f"common kernel dimension: {rep.common_kernel_dim}",
        f"stacked sigma_min      : {_fmt(rep.stacked_sigma_min)}",
        "probe sigma_min:",
    ]
    for lam, sv in rep.probe_sigma_min:
        lines.append(f"  {_fmt(lam.real)}{lam.imag:+.17g}i : {_fmt(sv)}")
    lines += [
        f"classification: {rep.classification}",
        "maximal dissipativity is automatic in finite dimensions (reported, not tested)",
    ]
    _emit(lines, args.out)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    data = _fixture_data(args.fixture, seed=args.seed)
    t_grid = np.linspace(0.0, args.t_max, args.samples)
    p = data.get("pencil")
    if "generator" in data:
        traj = odae.series_solution(p, data["generator"], t_grid, order=args.order)
        odae.mild_residual(p, traj)
        pbe = ham = None
    elif args.fixture == "poroelasticity_template":
        dim = data["dim"]
        x0 = np.cos(np.arange(dim, dtype=float) + 1.0)
        traj = fixturesmod.integrator_trajectory(data, t_grid, x0)
        odae.mild_residual(p, traj, tol=1e-8)
        pbe, ham = odae.power_balance_residual(p, traj)
    else:
        raise CLIError(f"fixture {args.fixture!r} has no simulation recipe")
    w = args.window
    header = ["t"]
    header += [f"x{j}_re" for j in range(1, w + 1)] + [f"x{j}_im" for j in range(1, w + 1)]
    header += ["residual_classical", "residual_mild", "residual_pbe", "hamiltonian"]
    lines = [",".join(header)]
    for i, t in enumerate(traj.times):
        state = traj.states[i]
        row = [_fmt(float(t))]
        row += [_fmt(complex(state.get(j, 0.0)).real) for j in range(1, w + 1)]
        row += [_fmt(complex(state.get(j, 0.0)).imag) for j in range(1, w + 1)]
        rc = traj.residual_classical[i] if traj.residual_classical is not None else float("nan")
        rm = traj.residual_mild[i] if traj.residual_mild is not None else float("nan")
        row.append(_fmt(float(rc)))
        row.append(_fmt(float(rm)))
        row.append(_fmt(float(pbe[i])) if pbe is not None else "nan")
        row.append(_fmt(float(ham[i])) if ham is not None else "nan")
        lines.append(",".join(row))
    _emit(lines, args.out)
    return EXIT_OK


def _cmd_examples(args) -> int:
    if args.action == "list":
        lines = []
        for name in fixturesmod.fixture_names():
            fx = fixturesmod.get_fixture(name)
            tag = " (caveat-only)" if fx.caveat_only else ""
            lines.append(f"{name}{tag}: {fx.description}")
        _emit(lines, args.out)
        return EXIT_OK
    # run
    if args.all:
        names = fixturesmod.fixture_names()
    elif args.name:
        names = [args.name]
    else:
        raise CLIError("examples run needs a fixture name or --all")
    lines = []
    any_failed = False
    for name in names:
        lines.append(f"== {name} ==")
        try:
            results = fixturesmod.run_fixture(name, **_seed_param(name, args.seed))
        except KeyError as exc:
            raise CLIError(str(exc)) from exc
        for res in results:
            status = "pass" if res.passed else "FAIL"
            any_failed = any_failed or not res.passed
            lines.append(f"  [{status}] {res.name}: {res.detail}")
    lines.append("overall: " + ("FAIL" if any_failed else "pass"))
    _emit(lines, args.out)
    return EXIT_VERDICT if any_failed else EXIT_OK


def _seed_param(name: str, seed: int) -> dict:
    fx = fixturesmod.get_fixture(name)
    return {"seed": seed} if "seed" in fx.default_params else {}


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pencilkit",
        description="spectral analysis of operator pencils and their differential-algebraic equations",
    )
    ap.add_argument("--seed", type=int, default=0, help="seed for all randomness (default 0)")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_target(sp, pencil_positional=True):
        if pencil_positional:
            sp.add_argument("pencil", nargs="?", help="pencil description (JSON)")
        sp.add_argument("--fixture", help="use a named fixture instead of a JSON file")
        sp.add_argument("--n", type=int, default=8, help="section window size (default 8)")
        sp.add_argument("--out", help="write output to a file instead of stdout")

    sp = sub.add_parser("analyze", help="structure and classification summary")
    add_target(sp)

    sp = sub.add_parser("spectra", help="sigma_min classification grid (CSV)")
    add_target(sp)
    sp.add_argument("--rect", default="-2,2,-2,2", help="re_min,re_max,im_min,im_max")
    sp.add_argument("--steps", default="9,9", help="n_re,n_im (>= 2 each)")

    sp = sub.add_parser("chains", help="singular chain extraction report (JSON)")
    add_target(sp)
    sp.add_argument("--tol", type=float, default=1e-10)

    sp = sub.add_parser("approx", help="approximate polynomial sequence residuals (CSV)")
    sp.add_argument("--fixture", required=True)
    sp.add_argument("--probes", default="0,1,-1,1+1i")
    sp.add_argument("--n-values", default="1,2,3,4,5,6", dest="n_values")
    sp.add_argument("--out")

    sp = sub.add_parser("distance", help="stacked sigma_min sweep over sections (CSV)")
    add_target(sp)
    sp.add_argument("--sections", default="2,4,8,16")

    sp = sub.add_parser("dh-check", help="dissipative-Hamiltonian structure report")
    add_target(sp)
    sp.add_argument(
        "--use-companion",
        action="store_true",
        help="use the fixture's dissipative companion pencil when it has one",
    )

    sp = sub.add_parser("simulate", help="trajectory with residual columns (CSV)")
    sp.add_argument("--fixture", required=True)
    sp.add_argument("--order", type=int, default=10, help="series truncation order")
    sp.add_argument("--t-max", type=float, default=1.0, dest="t_max")
    sp.add_argument("--samples", type=int, default=11)
    sp.add_argument("--window", type=int, default=8, help="state coordinates to print")
    sp.add_argument("--out")

    sp = sub.add_parser("examples", help="list fixtures or run their check suites")
    sp.add_argument("action", choices=["list", "run"])
    sp.add_argument("name", nargs="?", help="fixture name for `run`")
    sp.add_argument("--all", action="store_true", help="run every fixture")
    sp.add_argument("--out")

    return ap


_COMMANDS = {
    "analyze": _cmd_analyze,
    "spectra": _cmd_spectra,
    "chains": _cmd_chains,
    "approx": _cmd_approx,
    "distance": _cmd_distance,
    "dh-check": _cmd_dh_check,
    "simulate": _cmd_simulate,
    "examples": _cmd_examples,
}


def main(argv: list[str] | None = None) -> int:
    threads = os.environ.get("PENCILKIT_THREADS")
    if threads:
        # best effort: cap BLAS parallelism for libraries loaded later
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
