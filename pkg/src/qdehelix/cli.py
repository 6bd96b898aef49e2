"""``qde`` command-line interface.

Subcommands: ``monodromy``, ``verify``, ``orbit``, ``grassmannian``.
Exit codes: 0 success, 2 input/admissibility, 3 match failure,
4 numeric/precision, 5 internal.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from math import comb

import numpy as np

from .braid_orbit import orbit_match
from .errors import ArgumentError, NotFoundError, QDEError
from .frobenius_p import (SmallQHPoint, default_direction, raw_canonical_coordinates,
                          require_admissible)
from .ktheory_gamma import ExceptionalBasis, predicted_collection, structure_sheaf
from .precision import get_backend
from .qde_engine import IntegratorConfig, monodromy_data
from .reports import Report, RunConfig, error_object, versions
from .satake_g import (gram_wedge_identity, grassmannian_direct, grassmannian_monodromy,
                       satake_matrices)

EXIT_OK, EXIT_INPUT, EXIT_MATCH, EXIT_NUMERIC, EXIT_INTERNAL = 0, 2, 3, 4, 5
DEFAULT_TOL = {"monodromy": 1e-8, "verify": 1e-6, "orbit": 1e-6, "grassmannian": 1e-6}


def p_labels(n: int) -> list[str]:
    return ["1"] + [f"H^{j}" if j > 1 else "H" for j in range(1, n)]


def g_labels(k: int, n: int) -> list[str]:
    from .satake_g import schubert_basis
    return ["s(" + ",".join(str(x) for x in lab) + ")" for lab in schubert_basis(k, n).labels]


def resolve_phi(cfg: RunConfig) -> float:
    if cfg.phi is not None:
        return float(cfg.phi)
    pref = math.pi / (2 * cfg.n)
    if cfg.space == "P":
        return default_direction(raw_canonical_coordinates(SmallQHPoint(cfg.n, cfg.t)), pref)
    u = satake_matrices(cfg.k, cfg.n, cfg.t).u_G
    return default_direction(u, pref)


def _integrator(cfg: RunConfig) -> IntegratorConfig:
    return IntegratorConfig(formal_order=cfg.formal_order)


def _finite_max(vals) -> float:
    vals = [float(v) for v in vals]
    return max(vals) if vals else 0.0


def _add_monodromy(rep: Report, data, prefix: str = ""):
    rep.add_matrix(prefix + "S", data.S)
    rep.add_matrix(prefix + "C", data.C)
    rep.add_matrix(prefix + "M0", data.M0)
    rep.add_matrix(prefix + "mu", np.asarray(data.mu, dtype=complex))
    rep.add_integer_matrix(prefix + "R", data.R)
    rep.add_integer_matrix(prefix + "eta", data.eta)
    for key, v in data.residuals.items():
        rep.residuals[prefix + key] = float(v)


def _p_data(cfg: RunConfig, phi: float):
    point = SmallQHPoint(cfg.n, cfg.t)
    if cfg.n > 1:
        require_admissible(phi, raw_canonical_coordinates(point))
    return monodromy_data(point, phi, cfg.signs, _integrator(cfg), get_backend(),
                          q_order=cfg.q_order, z_order=cfg.z_order)


def _g_data(cfg: RunConfig, phi: float, route: str = "compound"):
    fn = grassmannian_monodromy if route == "compound" else grassmannian_direct
    kw = {"q_order": cfg.q_order, "z_order": cfg.z_order} if route == "compound" else {}
    return fn(cfg.k, cfg.n, cfg.t, phi, _integrator(cfg), cfg.signs, get_backend(), **kw)


def _reference_basis(n: int) -> ExceptionalBasis:
    return ExceptionalBasis([structure_sheaf(1)]) if n == 1 else predicted_collection(n)


def _match_dict(m) -> dict:
    return {"word": str(m.word), "length": len(m.word), "signs": list(m.signs),
            "helix_shift": m.helix_shift, "residual": m.residual, "residual_S": m.residual_S,
            "residual_C": m.residual_C, "candidates": m.candidates,
            "basis": None if m.basis is None else m.basis.labels}


def _precision_floor(rep: Report) -> float:
    return _finite_max(v for k, v in rep.residuals.items() if k.endswith(("const1", "const2", "const3")))


def cmd_monodromy(cfg: RunConfig, rep: Report) -> int:
    phi = resolve_phi(cfg)
    rep.diagnostics["phi"] = phi
    if cfg.space == "P":
        data = _p_data(cfg, phi)
        rep.basis_labels = p_labels(cfg.n)
    else:
        res = _g_data(cfg, phi)
        data = res.monodromy
        rep.basis_labels = g_labels(cfg.k, cfg.n)
    _add_monodromy(rep, data)
    rep.diagnostics.update({k: v for k, v in data.diagnostics.items() if not isinstance(v, np.ndarray)})
    rep.diagnostics["order_permutation"] = [int(i) for i in data.order_permutation]
    worst = _finite_max(data.residuals.values())
    rep.diagnostics["max_residual"] = worst
    return EXIT_OK if worst < cfg.tol else EXIT_NUMERIC


def _verify_p(cfg: RunConfig, rep: Report, S, C, prefix: str = "") -> tuple:
    basis = _reference_basis(cfg.n)
    hel = range(cfg.helix_range[0], cfg.helix_range[1] + 1)
    m = orbit_match(S, C, basis, depth=cfg.orbit_depth, tol=cfg.tol, helix_range=hel,
                    permutations=cfg.permutations)
    gram = np.array(m.basis.gram, dtype=object)
    D = np.diag(np.array(m.signs, dtype=object))
    signed = D @ gram @ D
    rep.add_integer_matrix(prefix + "gram", gram)
    rep.add_integer_matrix(prefix + "gram_signed", signed)
    return m, signed


def _rounded_inverse_check(S) -> tuple[np.ndarray, float]:
    Si = np.linalg.inv(np.asarray(S, dtype=complex))
    R = np.rint(Si.real).astype(np.int64)
    dev = float(np.abs(Si - R).max())
    return R.astype(object), dev


def cmd_verify(cfg: RunConfig, rep: Report) -> int:
    phi = resolve_phi(cfg)
    rep.diagnostics["phi"] = phi
    if cfg.space == "P":
        data = _p_data(cfg, phi)
        rep.basis_labels = p_labels(cfg.n)
        _add_monodromy(rep, data)
        S, C = data.S, data.C
        prefix = ""
    else:
        res = _g_data(cfg, phi)
        data = res.monodromy
        rep.basis_labels = g_labels(cfg.k, cfg.n)
        _add_monodromy(rep, data)
        _add_monodromy(rep, res.projective, "P_")
        S, C = res.projective.S, res.projective.C
        prefix = "P_"
    floor = _precision_floor(rep)
    rep.diagnostics["precision_floor"] = floor
    try:
        m, signed = _verify_p(cfg, rep, S, C, prefix)
    except NotFoundError as exc:
        if cfg.tol <= floor:
            exc.args = (f"{exc.args[0]}; requested tol {cfg.tol:.3g} is at or below the numerical floor "
                        f"{floor:.3g} of the computed monodromy data (binary64 constraint residuals); "
                        "raise tol or set QDE_PRECISION=mp:<digits>",)
            rep.diagnostics["precision_floor_note"] = "requested tolerance below the precision floor"
        raise
    rep.match = _match_dict(m)
    ok = True
    if cfg.space == "P":
        R, dev = _rounded_inverse_check(S)
        exact = bool(np.array_equal(R, signed))
    else:
        gram_G = gram_wedge_identity(signed, cfg.k)
        rep.add_integer_matrix("gram_G", gram_G)
        R, dev = _rounded_inverse_check(data.S)
        exact = bool(np.array_equal(R, gram_G))
        rep.match["gram_G_equals_wedge_gram_P"] = exact
    rep.add_integer_matrix("round_S_inverse", R)
    rep.residuals["S_inverse_rounding"] = dev
    rep.match["gram_exact"] = exact
    ok = exact and dev < cfg.tol
    return EXIT_OK if ok else EXIT_MATCH


def cmd_orbit(cfg: RunConfig, rep: Report, source: Report | None) -> int:
    if source is not None:
        prefix = "P_" if "P_S" in source.matrices else ""
        S, C = source.matrix(prefix + "S"), source.matrix(prefix + "C")
        rep.diagnostics["input"] = source.command
        rep.basis_labels = p_labels(S.shape[0])
        cfg.n = S.shape[0]
    else:
        phi = resolve_phi(RunConfig(space="P", n=cfg.n, t=cfg.t, phi=cfg.phi))
        rep.diagnostics["phi"] = phi
        data = _p_data(cfg, phi)
        rep.basis_labels = p_labels(cfg.n)
        _add_monodromy(rep, data)
        S, C = data.S, data.C
    m, _ = _verify_p(cfg, rep, S, C)
    rep.match = _match_dict(m)
    return EXIT_OK


def cmd_grassmannian(cfg: RunConfig, rep: Report, route: str) -> int:
    if cfg.space != "G":
        raise ArgumentError("the grassmannian subcommand needs --space G")
    phi = resolve_phi(cfg)
    rep.diagnostics["phi"] = phi
    rep.basis_labels = g_labels(cfg.k, cfg.n)
    worst = 0.0
    results = {}
    for r in (("compound", "direct") if route == "both" else (route,)):
        res = _g_data(cfg, phi, r)
        results[r] = res.monodromy
        _add_monodromy(rep, res.monodromy, "" if route != "both" else r + "_")
        worst = max(worst, _finite_max(res.monodromy.residuals.values()))
        if res.projective is not None:
            rep.add_matrix("P_S", res.projective.S)
            rep.add_matrix("P_C", res.projective.C)
    if route == "both":
        a, b = results["compound"], results["direct"]
        rep.residuals["S_direct_vs_compound"] = float(np.abs(a.S - b.S).max())
        rep.residuals["C_direct_vs_compound"] = float(np.abs(a.C - b.C).max())
        worst = max(worst, rep.residuals["S_direct_vs_compound"], rep.residuals["C_direct_vs_compound"])
    rep.diagnostics["max_residual"] = worst
    rep.diagnostics["dimension"] = comb(cfg.n, cfg.k)
    return EXIT_OK if worst < cfg.tol else EXIT_NUMERIC


def _complex_arg(text: str) -> complex:
    text = text.strip()
    if "," in text:
        re, im = text.split(",", 1)
        return complex(float(re), float(im))
    try:
        return complex(text.replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _signs_arg(text: str) -> tuple:
    vals = [s for s in text.replace(",", " ").split() if s]
    out = []
    for s in vals:
        if s in ("+", "+1", "1"):
            out.append(1)
        elif s in ("-", "-1"):
            out.append(-1)
        else:
            raise argparse.ArgumentTypeError(f"bad sign {s!r}")
    return tuple(out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qde", description="Stokes and central connection matrices of "
                                     "quantum differential equations of projective spaces and Grassmannians.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--space", choices=["P", "G"], default="P")
        p.add_argument("--n", type=int, default=3, help="ambient dimension n (P^{n-1} or G(k, n))")
        p.add_argument("--k", type=int, default=2, help="Grassmannian rank k (ignored for P)")
        p.add_argument("--t", type=_complex_arg, default=0j, help="small quantum parameter t (e.g. 0.1 or 0.1,0.2)")
        p.add_argument("--phi", type=float, default=None, help="direction of the oriented line; default admissible")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--q-order", type=int, default=None)
        p.add_argument("--z-order", type=int, default=None)
        p.add_argument("--formal-order", type=int, default=None)
        p.add_argument("--orbit-depth", type=int, default=6)
        p.add_argument("--signs", type=_signs_arg, default=None, help="column signs of Psi, e.g. '+,-,+'")
        p.add_argument("--helix", type=int, nargs=2, default=(-2, 2), metavar=("LO", "HI"))
        p.add_argument("--permutations", action="store_true", help="also search basis reorderings")
        p.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--timing", action="store_true", help="include wall-clock timings in the report")
        p.add_argument("--quiet", "-q", action="store_true")

    p = sub.add_parser("monodromy", help="compute (S, C, M0) and the constraint residuals")
    common(p)
    p = sub.add_parser("verify", help="match computed (S, C) against the exceptional-collection prediction")
    common(p)
    p = sub.add_parser("orbit", help="braid-orbit search, optionally on matrices from a saved report")
    common(p)
    p.add_argument("--input", default=None, help="JSON report produced by another subcommand")
    p = sub.add_parser("grassmannian", help="Grassmannian data by the compound route, the direct route or both")
    common(p)
    p.add_argument("--route", choices=["compound", "direct", "both"], default="compound")
    return parser


def _config(args) -> RunConfig:
    k = args.k if args.space == "G" else 1
    tol = args.tol if args.tol is not None else DEFAULT_TOL[args.command]
    return RunConfig(space=args.space, n=args.n, k=k, t=args.t, phi=args.phi, tol=tol,
                     q_order=args.q_order, z_order=args.z_order, formal_order=args.formal_order,
                     orbit_depth=args.orbit_depth, output_path=args.output, format=args.format,
                     signs=args.signs, helix_range=tuple(args.helix), permutations=args.permutations)


def run(argv=None) -> tuple[int, Report]:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "grassmannian" and args.space == "P":
        args.space = "G"
    rep = Report(command=args.command, config={})
    t0 = time.perf_counter()
    try:
        cfg = _config(args)
        rep.config = cfg.echo()
        rep.versions = versions()
        if args.command == "monodromy":
            code = cmd_monodromy(cfg, rep)
        elif args.command == "verify":
            code = cmd_verify(cfg, rep)
        elif args.command == "orbit":
            source = None
            if args.input:
                with open(args.input, encoding="utf-8") as fh:
                    source = Report.from_json(fh.read())
            code = cmd_orbit(cfg, rep, source)
        else:
            code = cmd_grassmannian(cfg, rep, args.route)
    except QDEError as exc:
        code = exc.exit_code
        rep.error = error_object(exc)
    except (OSError, ValueError) as exc:
        code = EXIT_INPUT
        rep.error = {"type": type(exc).__name__, "message": str(exc), "exit_code": code}
    except Exception as exc:  # noqa: BLE001
        code = EXIT_INTERNAL
        rep.error = {"type": type(exc).__name__, "message": str(exc), "exit_code": code}
    rep.exit_code = code
    rep.status = "ok" if code == 0 else ("error" if rep.error else "fail")
    if args.timing:
        rep.timing = {"wall_seconds": time.perf_counter() - t0}
    text = rep.to_json() if args.format == "json" else rep.to_csv()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not args.quiet:
        msg = f"qde {args.command}: {rep.status} (exit {code})"
        if rep.error:
            msg += f": {rep.error['type']}: {rep.error['message']}"
        print(msg, file=sys.stderr)
    return code, rep


def main(argv=None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
