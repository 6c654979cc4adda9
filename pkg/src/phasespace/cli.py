"""Command-line interface.

Every subcommand validates its inputs, writes its outputs atomically and
places a run manifest (``<output>.manifest.json``) next to each output
file. Failures print a JSON object ``{"error": ..., "message": ...}`` on
standard error and exit with status 2 (invalid input) or 1 (a computed
tolerance check failed).

Relative output paths are resolved against ``$PHASESPACE_OUTPUT_DIR`` when
that variable is set.
"""
from __future__ import annotations

import argparse
import inspect
import json
import math
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import composite, correspondence, hw, io, metrics, moyal, spin, tomography, wootters
from .errors import PhaseSpaceError, ValidationError
from .quadrature import SphereGrid, sphere_quadrature
from .states import BUILTINS
from .types import KernelSpec, SampledFunction

OUTPUT_ENV = "PHASESPACE_OUTPUT_DIR"
OUTPUT_FLAGS = ("--out", "--report")


class CommandError(Exception):
    """A computed check failed (exit status 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # pragma: no cover - exercised through main
        _emit_error("UsageError", message)
        raise SystemExit(2)


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, Path):
        return str(obj)
    return obj


def _dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=1) + "\n"


def _resolve_out(path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    base = os.environ.get(OUTPUT_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


# ---------------------------------------------------------------------------
# argument helpers


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _state(arg: str, **defaults) -> np.ndarray:
    """A state from a JSON file, or a built-in given as ``name[:key=value,...]``."""
    if Path(arg).exists():
        return io.load_state(arg)
    name, _, rest = arg.partition(":")
    if name not in BUILTINS:
        raise ValidationError(f"state {arg!r} is neither a file nor a built-in "
                              f"({', '.join(sorted(BUILTINS))})")
    params = {}
    for item in filter(None, rest.split(",")):
        k, eq, v = item.partition("=")
        if not eq:
            raise ValidationError(f"state parameter {item!r} must be key=value")
        params[k.strip()] = _parse_value(v.strip())
    accepted = inspect.signature(BUILTINS[name]).parameters
    for k, v in defaults.items():
        if v is not None and k in accepted and k not in params:
            params[k] = v
    return io.load_state({"kind": name, "params": params})


def _grid_shape(text: str | None):
    if text is None:
        return None
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise ValidationError(f"grid must look like 16x32, got {text!r}") from None


def _sphere_grid(j: float, text: str | None) -> SphereGrid:
    shape = _grid_shape(text)
    if shape is None:
        return spin.spin_grid(j)
    return sphere_quadrature(0, total_measure=2 * j + 1, n_theta=shape[0], n_phi=shape[1])


def _qp_points(text: str | None, extent: float):
    nq, np_ = _grid_shape(text) or (61, 61)
    q = np.linspace(-extent, extent, nq)
    p = np.linspace(-extent, extent, np_)
    Q, P = np.meshgrid(q, p, indexing="ij")
    return Q.ravel(), P.ravel()


def _spec(args, s: float) -> KernelSpec:
    fam = args.family
    if fam == "su2":
        return KernelSpec.su2(args.j, s)
    if fam == "wootters":
        return KernelSpec.wootters(s)
    if fam == "sun":
        return KernelSpec.sun(args.n, s)
    return KernelSpec.hw(args.cutoff, s)


# ---------------------------------------------------------------------------
# subcommands; each returns (primary JSON payload or None, {role: path})


def cmd_kernel_verify(args):
    spec = _spec(args, args.s)
    rep = correspondence.verify_stratonovich_weyl(
        spec, trials=args.trials, seed=args.seed, mode=args.mode, samples=args.samples)
    payload = rep.to_dict()
    if not rep.passed:
        raise CommandError(("axiom residuals exceed tolerance", payload))
    return payload, {}


def cmd_eval(args):
    what = args.what
    out = _resolve_out(args.out)
    s = {"wigner": 0.0, "qfunc": -1.0, "weyl": None}[what]
    fam = args.family
    if fam == "su2":
        sysm = spin.spin_system(args.j)
        rho = _state(args.state, j=args.j)
        grid = _sphere_grid(sysm.j, args.grid)
        if what == "weyl":
            vals = np.array([spin.weyl(sysm, rho, (ph, th, 0.0)) for th, ph in zip(grid.theta, grid.phi)])
        elif what == "qfunc":
            vals = spin.q_function(sysm, rho, grid).values
        else:
            vals = spin.evaluate(sysm, rho, 0.0, grid, check_degree=False).values
        cols = {"theta": grid.theta, "phi": grid.phi, "weight": grid.weights, "value": vals}
    elif fam == "hw":
        space = hw.fock_space(args.cutoff)
        rho = _state(args.state, n_max=args.cutoff)
        Q, P = _qp_points(args.grid, args.extent)
        alpha = (Q + 1j * P) / math.sqrt(2)
        if what == "weyl":
            vals = np.array([hw.characteristic(space, rho, a) for a in alpha])
        elif what == "qfunc":
            vals = hw.husimi_q(space, rho, alpha)
        else:
            vals = hw.wigner(space, rho, alpha).values
        cols = {"q": Q, "p": P, "value": vals}
    elif fam == "wootters":
        rho = _state(args.state, j=0.5)
        f = wootters.discrete_weyl(rho) if what == "weyl" else wootters.discrete_wigner(rho, s)
        pts = wootters.LATTICE
        cols = {"z": [p.z for p in pts], "x": [p.x for p in pts],
                "value": np.array(f.as_sequence())}
    else:
        raise ValidationError(f"{what} eval supports su2, hw and wootters")
    if out is None:
        raise ValidationError("--out is required")
    io.write_csv(out, cols)
    return None, {"out": out}


def _grid_from_columns(cols) -> SphereGrid:
    th, ph = cols["theta"], cols["phi"]
    nt, nphi = np.unique(th).size, np.unique(ph).size
    if nt * nphi != th.size:
        raise ValidationError("sphere samples must form a product grid")
    exact = min(2 * nt - 1, nphi - 1)
    return SphereGrid(th, ph, cols["weight"], exact, (nt, nphi))


def cmd_transform(args):
    cols = io.read_csv(args.infile)
    src = _spec(args, args.from_s)
    dst = src.with_s(args.to_s)
    if "value" not in cols:
        raise ValidationError("input CSV needs a value column")
    if args.family == "su2":
        if "weight" not in cols:
            raise ValidationError("su2 input needs theta, phi, weight and value columns")
        grid = _grid_from_columns(cols)
    else:
        grid = None
    vals = cols["value"]
    if args.family == "wootters":
        vals = np.real(vals).reshape(2, 2)
    F = SampledFunction(vals, src, grid)
    G = correspondence.generalized_fourier(F, dst)
    cols = dict(cols)
    cols["value"] = np.asarray(G.values).ravel()
    out = _resolve_out(args.out)
    io.write_csv(out, cols)
    return None, {"out": out}


def cmd_slice(args):
    n = args.qubits
    rho = _state(args.state, n=n)
    specs = [KernelSpec.su2(0.5)] * n
    m = args.points
    if args.kind == "equal-angle":
        nt, nphi = _grid_shape(args.grid) or (19, 37)
        T, P = np.meshgrid(np.linspace(0, math.pi, nt), np.linspace(0, 2 * math.pi, nphi), indexing="ij")
        grid = {"theta": T.ravel(), "phi": P.ravel()}
        F = composite.slice_evaluate(rho, specs, composite.SliceSpec.equal_angle(n), grid)
    elif args.kind == "equatorial":
        grid = {"phi": 2 * math.pi * np.arange(m) / m}
        F = composite.slice_evaluate(rho, specs, composite.SliceSpec.equatorial(n), grid)
    else:
        if n != 2:
            raise ValidationError("axis-pair slices take two qubits")
        n1, n2 = _grid_shape(args.grid) or (37, 37)
        T1, T2 = np.meshgrid(np.linspace(-math.pi, math.pi, n1), np.linspace(-math.pi, math.pi, n2),
                             indexing="ij")
        grid = {"theta1": T1.ravel(), "theta2": T2.ravel()}
        F = composite.slice_evaluate(rho, specs, composite.SliceSpec.axis_pair(), grid)
    out = _resolve_out(args.out)
    io.write_csv(out, {**F.grid, "value": F.values})
    return None, {"out": out}


def cmd_metrics(args):
    kind = args.kind
    fam = args.family
    rho = _state(args.state, j=args.j)
    rho2 = _state(args.state2, j=args.j) if args.state2 else None
    result = {"metric": kind, "family": fam}
    if fam == "wootters":
        W = wootters.discrete_wigner(rho)
        if kind == "purity":
            value = metrics.purity(W)
        elif kind == "fidelity":
            value = metrics.fidelity_ps(W, wootters.discrete_wigner(_need(rho2)))
        elif kind == "negativity":
            value = metrics.negativity_volume(W)
        else:
            raise ValidationError(f"{kind} is not available for the lattice")
    elif fam == "su2":
        sysm = spin.spin_system(args.j)
        grid = spin.spin_grid(sysm.j)
        W = spin.evaluate(sysm, rho, 0.0, grid)
        if kind == "purity":
            value = metrics.purity(W)
        elif kind == "fidelity":
            value = metrics.fidelity_ps(spin.evaluate(sysm, rho, args.s, grid),
                                        spin.evaluate(sysm, _need(rho2), -args.s, grid))
        elif kind == "trace-distance":
            value = metrics.trace_distance_qubit(rho, _need(rho2))
        elif kind == "negativity":
            value = metrics.negativity_volume_spin(rho, sysm.j)
        elif kind == "wehrl":
            fine = spin.spin_grid(sysm.j, L=4 * int(round(2 * sysm.j)) + 120)
            value = metrics.wehrl_entropy(spin.q_function(sysm, rho, fine))
        else:
            value = metrics.expectation_from_moments(W, args.which)
            result["which"] = args.which
    else:
        raise ValidationError("metrics support the su2 and wootters families")
    result["value"] = float(value)
    return result, {}


def _need(x):
    if x is None:
        raise ValidationError("--state2 is required for this metric")
    return x


def cmd_dfe(args):
    target = _state(args.target)
    rho = _state(args.state)
    run = metrics.dfe_sample(target, rho, args.samples, args.seed, shots=args.shots,
                             target_name=args.target)
    return run.to_dict(), {}


def cmd_reconstruct(args):
    cols = io.read_csv(args.samples)
    for c in ("theta", "phi", "value"):
        if c not in cols:
            raise ValidationError(f"samples CSV lacks the {c} column")
    net = SphereGrid(cols["theta"], cols["phi"], np.ones(cols["theta"].size), 0)
    coeffs, rho, rep = tomography.reconstruct_from_grid(args.j, np.real(cols["value"]), args.s, net)
    out = _resolve_out(args.out)
    files = {}
    if out is not None:
        io.save_state(out, rho)
        files["out"] = out
    report = rep.to_dict()
    report["coefficients"] = [[l, m, c.real, c.imag] for (l, m), c in coeffs.as_dict().items()]
    rpath = _resolve_out(args.report)
    if rpath is not None:
        io.atomic_write(rpath, _dumps(report).encode())
        files["report"] = rpath
    return report, files


def _hamiltonian(args, grid):
    h = args.hamiltonian
    if h == "harmonic":
        return moyal.harmonic(grid)
    if h == "linear":
        return moyal.linear(grid)
    if h == "quartic":
        return moyal.quartic(grid)
    if not args.hamiltonian_file:
        raise ValidationError("--hamiltonian file needs --hamiltonian-file")
    doc = json.loads(Path(args.hamiltonian_file).read_text())
    try:
        terms = {(int(a), int(b)): float(c) for a, b, c in doc["terms"]}
    except (KeyError, TypeError, ValueError):
        raise ValidationError('hamiltonian file must hold {"terms": [[a, b, coeff], ...]}') from None
    return moyal.GridFunction.polynomial(grid, terms)


def cmd_evolve(args):
    n = _grid_shape(args.grid) or (128, 128)
    grid = moyal.PhaseGrid(-args.extent, args.extent, -args.extent, args.extent, n[0], n[1], args.hbar)
    rho = _state(args.state, n_max=args.cutoff)
    W0 = moyal.wigner_from_operator(grid, rho)
    H = _hamiltonian(args, grid)
    dt = args.dt if args.dt is not None else 0.9 * moyal.step_bound(H)
    W = moyal.evolve(W0, H, dt, args.steps)
    out = _resolve_out(args.out)
    io.save_snapshot(out, W)
    files = {"out": out}
    if args.csv:
        cpath = _resolve_out(args.csv)
        io.gridfunction_to_csv(cpath, W)
        files["csv"] = cpath
    return {k: v for k, v in W.meta.items()}, files


def cmd_rerun(args):
    man = json.loads(Path(args.manifest).read_text())
    argv = list(man["command"])
    expected = man["outputs"]
    with tempfile.TemporaryDirectory() as tmp:
        remap = {}
        for i, tok in enumerate(argv[:-1]):
            if tok in OUTPUT_FLAGS + ("--csv",):
                new = str(Path(tmp) / Path(argv[i + 1]).name)
                remap[new] = argv[i + 1]
                argv[i + 1] = new
        env_dir = os.environ.pop(OUTPUT_ENV, None)
        try:
            code = main(argv, _manifest=False)
        finally:
            if env_dir is not None:
                os.environ[OUTPUT_ENV] = env_dir
        got = {}
        for new, old in remap.items():
            key = next((k for k in expected if Path(k).name == Path(old).name), old)
            got[key] = io.sha256_file(new) if Path(new).exists() else None
    match = code == 0 and all(got.get(k) == v for k, v in expected.items())
    result = {"reproduced": match, "expected": expected, "observed": got}
    if not match:
        raise CommandError(("rerun hashes differ", result))
    return result, {}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="phasespace", description="Phase-space kernels, functions and dynamics.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--threads", type=int, default=None, help="cap on BLAS/FFT threads")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def family_args(sp, families):
        sp.add_argument("--family", choices=families, required=True)
        sp.add_argument("--j", type=float, default=0.5)
        sp.add_argument("--n", type=int, default=3, help="SU(N) dimension")
        sp.add_argument("--cutoff", type=int, default=40, help="Fock cutoff n_max")

    k = sub.add_parser("kernel").add_subparsers(dest="action", required=True, parser_class=_Parser)
    kv = k.add_parser("verify")
    family_args(kv, ["hw", "su2", "wootters", "sun"])
    kv.add_argument("--s", type=float, default=0.0)
    kv.add_argument("--seed", type=int, default=0)
    kv.add_argument("--trials", type=int, default=10)
    kv.add_argument("--mode", choices=["moment", "monte-carlo"], default="moment")
    kv.add_argument("--samples", type=int, default=2_000_000)
    kv.add_argument("--out")
    kv.set_defaults(func=cmd_kernel_verify)

    for what in ("wigner", "qfunc", "weyl"):
        ev = sub.add_parser(what).add_subparsers(dest="action", required=True, parser_class=_Parser)
        e = ev.add_parser("eval")
        family_args(e, ["su2", "hw", "wootters"])
        e.add_argument("--state", required=True)
        e.add_argument("--grid", help="NTHETAxNPHI (spin) or NQxNP (hw)")
        e.add_argument("--extent", type=float, default=5.0)
        e.add_argument("--out", required=True)
        e.set_defaults(func=cmd_eval, what=what)

    t = sub.add_parser("transform")
    family_args(t, ["su2", "wootters", "sun"])
    t.add_argument("--from-s", type=float, required=True)
    t.add_argument("--to-s", type=float, required=True)
    t.add_argument("--in", dest="infile", required=True)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_transform)

    sl = sub.add_parser("slice")
    sl.add_argument("kind", choices=["equal-angle", "equatorial", "axis-pair"])
    sl.add_argument("--state", required=True)
    sl.add_argument("--qubits", type=int, required=True)
    sl.add_argument("--points", type=int, default=720)
    sl.add_argument("--grid")
    sl.add_argument("--out", required=True)
    sl.set_defaults(func=cmd_slice)

    m = sub.add_parser("metrics")
    m.add_argument("kind", choices=["purity", "fidelity", "trace-distance", "negativity", "wehrl", "expect"])
    family_args(m, ["su2", "wootters"])
    m.add_argument("--state", required=True)
    m.add_argument("--state2")
    m.add_argument("--s", type=float, default=0.0)
    m.add_argument("--which", choices=["Jx", "Jy", "Jz"], default="Jz")
    m.add_argument("--out")
    m.set_defaults(func=cmd_metrics)

    d = sub.add_parser("dfe")
    d.add_argument("--target", required=True)
    d.add_argument("--state", required=True)
    d.add_argument("--samples", type=int, default=100_000)
    d.add_argument("--seed", type=int, required=True)
    d.add_argument("--shots", type=int)
    d.add_argument("--out")
    d.set_defaults(func=cmd_dfe)

    r = sub.add_parser("reconstruct")
    r.add_argument("--j", type=float, required=True)
    r.add_argument("--samples", required=True)
    r.add_argument("--s", type=float, default=0.0)
    r.add_argument("--out")
    r.add_argument("--report")
    r.set_defaults(func=cmd_reconstruct)

    ev = sub.add_parser("evolve")
    ev.add_argument("--hamiltonian", choices=["harmonic", "linear", "quartic", "file"], required=True)
    ev.add_argument("--hamiltonian-file")
    ev.add_argument("--state", required=True)
    ev.add_argument("--cutoff", type=int, default=40)
    ev.add_argument("--grid", default="128x128")
    ev.add_argument("--extent", type=float, default=8.0)
    ev.add_argument("--hbar", type=float, default=1.0)
    ev.add_argument("--dt", type=float)
    ev.add_argument("--steps", type=int, required=True)
    ev.add_argument("--out", required=True)
    ev.add_argument("--csv")
    ev.set_defaults(func=cmd_evolve)

    rr = sub.add_parser("rerun")
    rr.add_argument("manifest")
    rr.set_defaults(func=cmd_rerun)
    return p


def _write_manifest(argv, args, files: dict, wall: float) -> None:
    params = {k: v for k, v in vars(args).items() if k != "func"}
    outputs = {str(p): io.sha256_file(p) for p in files.values()}
    doc = {"command": list(argv), "parameters": params, "seed": params.get("seed"),
           "version": __version__, "wall_time": wall, "outputs": outputs}
    text = _dumps(doc).encode()
    for p in files.values():
        io.atomic_write(Path(str(p) + ".manifest.json"), text)


def _run(args, argv, manifest: bool) -> int:
    t0 = time.perf_counter()
    payload, files = args.func(args)
    files = dict(files)
    if payload is not None:
        text = _dumps(payload)
        sys.stdout.write(text)
        json_out = getattr(args, "out", None) if args.func in _JSON_OUT else None
        if json_out:
            path = _resolve_out(json_out)
            io.atomic_write(path, text.encode())
            files["out"] = path
    if manifest and files:
        _write_manifest(argv, args, files, time.perf_counter() - t0)
    return 0


_JSON_OUT = {cmd_kernel_verify, cmd_metrics, cmd_dfe}


def main(argv=None, _manifest: bool = True) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.threads:
            from threadpoolctl import threadpool_limits

            with threadpool_limits(limits=args.threads):
                return _run(args, argv, _manifest)
        return _run(args, argv, _manifest)
    except CommandError as exc:
        message, detail = exc.args[0]
        sys.stdout.write(_dumps(detail))
        if args.func in _JSON_OUT and getattr(args, "out", None):
            io.atomic_write(_resolve_out(args.out), _dumps(detail).encode())
        _emit_error("ToleranceError", message)
        return 1
    except (PhaseSpaceError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 2


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
