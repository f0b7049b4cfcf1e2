"""Command-line interface: exponent sweeps, reference depolarizing curves, bound tables, simulations, verification.

Exit codes: 0 pass, 2 verification failure, 3 spec error, 4 budget error.
"""

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import codes, exponents, gf, inequalities
from .channels import (
    CQChannel,
    DepolarizingSpec,
    JointCQState,
    bsc,
    depolarizing_channel,
    depolarizing_environment_channel,
    tensor_power_channel,
    uniform,
)
from .errors import BudgetExceeded, QWiretapError, SpecParseError
from .quantities import shannon_entropy

EXIT_OK, EXIT_FAIL, EXIT_SPEC, EXIT_BUDGET = 0, 2, 3, 4
LN2 = math.log(2)


@dataclass
class RunConfig:
    command: str
    config: str = None
    out: str = None
    units: str = "nats"
    seed: int = 0
    grid: int = exponents.S_GRID
    tol: float = None
    list_only: bool = False
    spec: dict = field(default_factory=dict)

    @property
    def scale(self):
        """Multiply nats by this to present in the chosen unit."""
        return 1 / LN2 if self.units == "bits" else 1.0


# ---------------------------------------------------------------- spec parsing


def load_spec(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecParseError(f"cannot read {path}: {exc.strerror}", where=path) from None
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(exc.msg, where=f"{path}:{exc.lineno}:{exc.colno}") from None
    if not isinstance(spec, dict):
        raise SpecParseError("top level must be an object", where=path)
    return spec


def _field(spec, key, where, default=...):
    if key in spec:
        return spec[key]
    if default is ...:
        raise SpecParseError(f"missing field '{key}'", where=where)
    return default


def parse_matrix(obj, where):
    try:
        if isinstance(obj, dict):
            re = np.asarray(_field(obj, "real", where), dtype=float)
            im = np.asarray(obj.get("imag", np.zeros_like(re)), dtype=float)
            if re.shape != im.shape:
                raise SpecParseError("real and imag parts differ in shape", where=where)
            return re + 1j * im
        return np.asarray(obj, dtype=float).astype(complex)
    except (TypeError, ValueError):
        raise SpecParseError("matrix entries must be numbers", where=where) from None


def parse_vector(obj, where):
    try:
        v = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        raise SpecParseError("vector entries must be numbers", where=where) from None
    if v.ndim != 1:
        raise SpecParseError("expected a flat list", where=where)
    return v


def parse_channel(spec, where="channel"):
    """explicit | classical | bsc | depolarizing, optionally raised to a tensor power."""
    if not isinstance(spec, dict):
        raise SpecParseError("channel spec must be an object", where=where)
    kind = _field(spec, "type", where)
    try:
        if kind == "explicit":
            outs = _field(spec, "outputs", where)
            W = CQChannel(np.stack([parse_matrix(m, f"{where}.outputs[{i}]") for i, m in enumerate(outs)]))
        elif kind == "classical":
            W = CQChannel.classical(np.asarray(_field(spec, "matrix", where), dtype=float))
        elif kind == "bsc":
            W = bsc(float(_field(spec, "eps", where)))
        elif kind == "depolarizing":
            W = depolarizing_side(parse_depolarizing(spec, where), spec.get("side", "eve"), where)
        else:
            raise SpecParseError(f"unknown channel type '{kind}'", where=f"{where}.type")
    except SpecParseError:
        raise
    except (QWiretapError, ValueError, TypeError) as exc:
        raise SpecParseError(str(exc), where=where) from None
    n = int(spec.get("power", 1))
    if n > 1:
        W = tensor_power_channel(W, n)
    return W


def parse_depolarizing(spec, where):
    d = int(_field(spec, "d", where))
    if "pxz" in spec:
        return DepolarizingSpec(d, np.asarray(spec["pxz"], dtype=float))
    px = parse_vector(_field(spec, "px", where), f"{where}.px")
    pz = parse_vector(spec["pz"], f"{where}.pz") if "pz" in spec else None
    return DepolarizingSpec.independent(px, pz)


def depolarizing_side(dspec, side, where):
    if side == "eve":
        return depolarizing_environment_channel(dspec)
    if side == "bob":
        d = dspec.d
        return CQChannel(np.stack([depolarizing_channel(dspec, np.diag(np.eye(d)[j]).astype(complex))
                                   for j in range(d)]))
    raise SpecParseError(f"unknown side '{side}'", where=f"{where}.side")


def parse_dist(obj, n, where):
    if obj is None:
        return uniform(n)
    v = parse_vector(obj, where)
    if v.size != n or np.any(v < -1e-12) or abs(v.sum() - 1) > 1e-10:
        raise SpecParseError(f"expected a distribution on {n} letters", where=where)
    return np.clip(v, 0, None)


def parse_rates(obj, where):
    if isinstance(obj, dict):
        start, stop, step = (float(_field(obj, k, where)) for k in ("start", "stop", "step"))
        count = int(round((stop - start) / step)) + 1
        return start + step * np.arange(count)
    return parse_vector(obj, where)


# ---------------------------------------------------------------- output


def fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def write_csv(header, rows, footer=()):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(x) for x in row) + "\n")
    for line in footer:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def write_json(obj):
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------- commands


def _curve_rows(cfg, W, p, rates_nats):
    curves = exponents.exponent_curves(W, p, rates_nats, grid=cfg.grid)
    k = cfg.scale
    rows = []
    for i, R in enumerate(rates_nats):
        rows.append([R * k, curves["e_psi"].values[i] * k, curves["e_phi"].values[i] * k,
                     curves["half_e_psi"].values[i] * k, curves["two_e_phi"].values[i] * k,
                     curves["e_psi"].optimizing_s[i], curves["e_phi"].optimizing_s[i]])
    return curves, rows


def _curve_header(units):
    return [f"R_{units}", f"e_psi_{units}", f"e_phi_{units}", f"half_e_psi_{units}",
            f"two_e_phi_{units}", "s_e_psi", "s_e_phi"]


def cmd_exponents(cfg):
    spec = cfg.spec
    W = parse_channel(_field(spec, "channel", "spec"))
    p = parse_dist(spec.get("input"), W.alphabet_size, "input")
    rates = parse_rates(_field(spec, "rates", "spec"), "rates") / cfg.scale
    if np.any(rates < 0):
        raise SpecParseError("rates must be non-negative", where="rates")
    _, rows = _curve_rows(cfg, W, p, rates)
    return write_csv(_curve_header(cfg.units), rows), EXIT_OK


FIG1_PX = (0.9, 0.1)


def cmd_fig1(cfg):
    spec = cfg.spec
    px = parse_vector(spec.get("px", FIG1_PX), "px")
    start, stop, step = spec.get("start", 0.47), spec.get("stop", 1.0), spec.get("step", 0.005)
    rates_bits = start + step * np.arange(int(round((stop - start) / step)) + 1)
    dspec = DepolarizingSpec.independent(px)
    W = depolarizing_environment_channel(dspec)
    p = uniform(dspec.d)
    curves, rows = _curve_rows(cfg, W, p, rates_bits * LN2)
    ep, ef = curves["e_psi"].values, curves["e_phi"].values
    slack = 1e-9
    ordering = bool(np.all(ep / 2 <= ef + slack) and np.all(ef <= ep + slack) and np.all(ep <= 2 * ef + slack))
    monotone = all(bool(np.all(np.diff(c.values) >= -slack)) for c in curves.values())
    H_bits = shannon_entropy(px) / LN2
    ev = exponents.ExponentEvaluator(W, p, cfg.grid)
    at_H = max(ev.e_psi(H_bits * LN2)[0], ev.e_phi(H_bits * LN2)[0] * 2) / LN2
    vanish = at_H <= 1e-3
    verdict = "pass" if ordering and monotone and vanish else "fail"
    footer = [
        f"H_bits={H_bits:.6f}",
        f"max_curve_at_H_bits={at_H:.3e}",
        f"ordering half_e_psi<=e_phi<=e_psi<=two_e_phi: {'pass' if ordering else 'fail'}",
        f"non_decreasing: {'pass' if monotone else 'fail'}",
        f"verdict: {verdict}",
    ]
    return write_csv(_curve_header(cfg.units), rows, footer), EXIT_OK if verdict == "pass" else EXIT_FAIL


def cmd_bounds(cfg):
    spec = cfg.spec
    WB = parse_channel(_field(spec, "bob", "spec"), "bob")
    WE = parse_channel(_field(spec, "eve", "spec"), "eve")
    p = parse_dist(spec.get("input"), WB.alphabet_size, "input")
    M = int(_field(spec, "M", "spec"))
    if "Q" in spec:
        Q = parse_dist(spec["Q"], len(spec["Q"]), "Q")
    else:
        Q = uniform(int(spec.get("L", 1)))
    ns = [int(n) for n in spec.get("n", [1])]
    expurgated = bool(spec.get("expurgated", False))
    k = cfg.scale
    rows = []
    for n in ns:
        if n == 1:
            b = exponents.finite_n_bounds(M, Q, WB, WE, p, expurgated, grid=cfg.grid)
        else:
            b = exponents.iid_bounds(n, M, Q, WB, WE, p, expurgated, grid=cfg.grid)
        eq = exponents.iid_equivocation_bound(n, Q, WE, p, grid=cfg.grid)
        rows.append([n, b.eps_bound, b.eps_s, b.info_bound * k, b.info_s, b.d1_bound, b.d1_s,
                     eq[0] * k, eq[1]])
    u = cfg.units
    header = ["n", "eps_bound", "s_eps", f"info_bound_{u}", "s_info", "d1_bound", "s_d1",
              f"equivocation_bound_{u}", "s_equivocation"]
    return write_csv(header, rows), EXIT_OK


def _ensemble_by_name(name, q, k, l):
    table = {
        "toeplitz_submodule": gf.toeplitz_submodule_ensemble,
        "field_multiplier": gf.field_multiplier_ensemble,
        "toeplitz_injective": gf.toeplitz_injective_ensemble,
        "all_injective": gf.all_injective_ensemble,
    }
    if name not in table:
        raise SpecParseError(f"unknown ensemble '{name}'", where="ensemble")
    return table[name](q, k, l)


def _simulate(cfg):
    spec = cfg.spec
    kind = _field(spec, "experiment", "spec")
    s_grid = tuple(float(s) for s in spec.get("s_grid", (0.25, 0.5, 0.75, 1.0)))
    tol = cfg.tol if cfg.tol is not None else 1e-10
    if kind in codes.RESOLVABILITY_KINDS:
        W = parse_channel(_field(spec, "channel", "spec"))
        if kind == "codebook":
            PA = parse_vector(_field(spec, "PA", "spec"), "PA")
            params = {"PA": parse_dist(PA, PA.size, "PA"), "p": parse_dist(spec.get("p"), W.alphabet_size, "p")}
        else:
            q, kk, l = (int(_field(spec, f, "spec")) for f in ("q", "k", "l"))
            if W.alphabet_size != q**kk:
                raise SpecParseError(f"channel alphabet must have q^k = {q**kk} letters", where="channel")
            default = "toeplitz_submodule" if kind == "submodule" else "field_multiplier"
            params = {"q": q, "k": kk, "ensemble": _ensemble_by_name(spec.get("ensemble", default), q, kk, l)}
            if kind == "injective":
                PA = parse_vector(_field(spec, "PA", "spec"), "PA")
                params["PA"] = parse_dist(PA, q**l, "PA")
        return codes.resolvability_experiment(kind, W, params, s_grid, spec.get("mode", "auto"),
                                              int(spec.get("trials", codes.MC_MIN_TRIALS)), cfg.seed, tol=tol)
    if kind == "privacy":
        st = _field(spec, "state", "spec")
        probs = parse_vector(_field(st, "probs", "state"), "state.probs")
        states = np.stack([parse_matrix(m, f"state.states[{i}]") for i, m in enumerate(_field(st, "states", "state"))])
        try:
            state = JointCQState(probs, states)
        except QWiretapError as exc:
            raise SpecParseError(str(exc), where="state") from None
        sig = spec.get("sigma", "marginal")
        sigma = state.quantum_marginal() if sig == "marginal" else parse_matrix(sig, "sigma")
        fam_spec = dict(_field(spec, "family", "spec"))
        fam = gf.hash_family(fam_spec.pop("kind", "partition_permutation"), **fam_spec)
        return codes.privacy_amp_experiment(state, fam, sigma, tuple(spec.get("s_grid", (0.5, 1.0))), tol=tol)
    if kind == "random_code":
        W = parse_channel(_field(spec, "channel", "spec"))
        Q = parse_vector(_field(spec, "Q", "spec"), "Q")
        return codes.random_code_ensemble(W, int(_field(spec, "M", "spec")), parse_dist(Q, Q.size, "Q"),
                                          parse_dist(spec.get("p"), W.alphabet_size, "p"), s_grid, tol=tol)
    if kind == "coset_code":
        WB = parse_channel(_field(spec, "bob", "spec"), "bob")
        WE = parse_channel(_field(spec, "eve", "spec"), "eve")
        q, kk, l1, l2 = (int(_field(spec, f, "spec")) for f in ("q", "k", "l1", "l2"))
        if WB.alphabet_size != q**kk:
            raise SpecParseError(f"channel alphabet must have q^k = {q**kk} letters", where="bob")
        return codes.coset_code_experiment(WB, WE, q, kk, l1, l2, tol=tol)
    raise SpecParseError(f"unknown experiment '{kind}'", where="experiment")


def cmd_simulate(cfg):
    report = _simulate(cfg)
    failed = report.hard and not report.passed
    return write_json(report.as_dict()), EXIT_FAIL if failed else EXIT_OK


def cmd_verify(cfg):
    if cfg.list_only:
        lines = [f"{name}\t{tag}" for name, (_, tag) in inequalities.SUITES.items()]
        return "\n".join(lines) + "\n", EXIT_OK
    spec = cfg.spec
    tol = cfg.tol if cfg.tol is not None else 1e-8
    results = inequalities.run_suites(seed=cfg.seed, instances=int(spec.get("instances", 100)),
                                      tol=tol, names=spec.get("suites"), counts=spec.get("counts"))
    report = {"seed": cfg.seed, "tol": tol, "suites": [r.as_dict() for r in results],
              "passed": all(r.passed for r in results)}
    return write_json(report), EXIT_OK if report["passed"] else EXIT_FAIL


COMMANDS = {
    "exponents": cmd_exponents,
    "fig1": cmd_fig1,
    "bounds": cmd_bounds,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="qwiretap", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="JSON spec file")
    ap.add_argument("--out", help="output path (default stdout)")
    ap.add_argument("--units", choices=("bits", "nats"), default=None)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--grid", type=int, default=exponents.S_GRID, help="points on the s grid")
    ap.add_argument("--tol", type=float, default=None, help="verification tolerance")
    ap.add_argument("--list", action="store_true", help="list verification suites and exit")
    return ap


def run(argv=None):
    """Returns (text, exit code) without touching stdout."""
    args = build_parser().parse_args(argv)
    units = args.units or ("bits" if args.command == "fig1" else "nats")
    cfg = RunConfig(args.command, args.config, args.out, units, args.seed, args.grid, args.tol, args.list)
    try:
        cfg.spec = load_spec(cfg.config)
        return COMMANDS[cfg.command](cfg)
    except SpecParseError as exc:
        return f"spec error: {exc}\n", EXIT_SPEC
    except BudgetExceeded as exc:
        return f"budget exceeded: {exc}\n", EXIT_BUDGET
    except (QWiretapError, ValueError, KeyError, TypeError) as exc:
        return f"spec error: {type(exc).__name__}: {exc}\n", EXIT_SPEC


def main(argv=None):
    text, code = run(argv)
    args = build_parser().parse_args(argv)
    if code in (EXIT_SPEC, EXIT_BUDGET):
        sys.stderr.write(text)
    elif args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
