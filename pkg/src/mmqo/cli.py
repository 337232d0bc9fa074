"""Batch command-line front end.

Subcommands dispatch to the library and write deterministic JSON or CSV.
Exit codes: 0 success, 1 domain error (machine-readable JSON on stderr),
2 usage error.
"""

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import channels, decomp, detection, gaussian, metrology, modal, \
    nongauss, sources
from .errors import BadRange, MmqoError, OracleFailure, TooManyModes
from .serialize import (
    array_to_json,
    csv_lines,
    dumps,
    json_to_cmat,
    json_to_cvec,
    json_to_state,
    state_to_json,
)

log = logging.getLogger("mmqo")


@dataclass
class Scenario:
    """Common run context resolved from the global flags."""
    out_path: str | None
    fmt: str
    tolerance: float | None
    seed: int


class UsageError(Exception):
    pass


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError("cannot read %s: %s" % (path, exc)) from exc
    except json.JSONDecodeError as exc:
        raise UsageError("cannot parse %s: %s" % (path, exc)) from exc


def _load_state(path):
    return json_to_state(_load_json(path))


def _parse_vector(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError("mode vector must be JSON: %s" % exc) from exc
    return json_to_cvec(data)


def _parse_floats(text):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise UsageError("expected comma-separated numbers, got %r"
                         % text) from exc


# -----------------------------------------------------------------------------------
# Subcommand handlers: each returns (json_payload, csv_payload|None)
# -----------------------------------------------------------------------------------

def _cmd_decompose(args, ctx):
    st = _load_state(args.in_path)
    wf = decomp.williamson(st.cov)
    bm = decomp.bloch_messiah(decomp.symplectic_inverse(wf.S_prime))
    coh = gaussian.cov_to_coherency(st)
    pm = decomp.principal_modes(coh)
    sep = decomp.intrinsic_separation(st)
    payload = {
        "n_modes": st.n_modes,
        "purity": gaussian.purity(st),
        "WilliamsonFactors": {
            "S_prime": array_to_json(wf.S_prime),
            "kappas": array_to_json(wf.kappas),
        },
        "BlochMessiahFactors": {
            "O1": array_to_json(bm.O1),
            "K": array_to_json(bm.K),
            "O2": array_to_json(bm.O2),
        },
        "PrincipalModes": {
            "basis": array_to_json(pm.basis),
            "occupations": array_to_json(pm.occupations),
            "rank": pm.rank,
            "effective_mode_number": decomp.effective_mode_number(coh)
            if np.trace(coh).real > 1e-12 else None,
        },
        "IntrinsicSeparation": {
            "gamma_s": array_to_json(sep.gamma_s),
            "gamma_c": array_to_json(sep.gamma_c),
            "sigmas": array_to_json(sep.sigmas),
            "kappas": array_to_json(sep.kappas),
        },
    }
    return payload, None


def _cmd_source(args, ctx):
    if args.kind == "pdc":
        data = _load_json(args.g_path)
        g = json_to_cmat(data["g"] if isinstance(data, dict) else data)
        res = sources.pdc_supermodes(g, args.gain)
        payload = {
            "lambdas": array_to_json(res.lambdas),
            "sigmas": array_to_json(res.sigmas),
            "basis": array_to_json(res.basis),
            "state": state_to_json(res.state),
            "symplectic": array_to_json(res.symplectic),
        }
        return payload, None
    if args.kind == "spopo":
        lambdas = _parse_floats(args.lambdas)
        vals = sources.spopo_squeezing(np.array(lambdas), args.r)
        rows = [(i, lambdas[i], vals[i]) for i in range(len(lambdas))]
        payload = {"r": args.r, "delta_x2": array_to_json(vals)}
        return payload, (["index", "lambda", "delta_x2"], rows)
    # cluster source
    v = json_to_cmat(_load_json(args.v_path)["v"]).real
    sigma = _parse_floats(args.sigma)
    sigma = sigma[0] if len(sigma) == 1 else np.array(sigma)
    res = sources.cluster_state(v, sigma)
    nc = sources.nullifier_covariance(res.state, v)
    payload = {
        "state": state_to_json(res.state),
        "unitary": array_to_json(sources.cluster_unitary(v)),
        "nullifier_variances": array_to_json(np.diag(nc)),
    }
    return payload, None


def _cmd_channel(args, ctx):
    st = _load_state(args.in_path)
    out = channels.gaussian_channel(st, args.gain, kappa_env=args.env_kappa)
    return state_to_json(out), None


def _cmd_detect(args, ctx):
    if args.mode == "homodyne":
        st = _load_state(args.in_path)
        lo = _parse_vector(args.lo)
        var = detection.homodyne_variance(st, lo, args.phi)
        return {"variance": var}, None
    if args.mode == "schedule":
        sched = detection.homodyne_schedule(args.modes)
        keys = [_schedule_key(label, phi) for label, _, phi in sched]
        return {"n_modes": args.modes, "keys": keys}, None
    if args.mode == "reconstruct":
        table = _load_json(args.table)
        n_modes = int(table["n_modes"])
        variances = table["variances"]

        def oracle(lo, phi):
            key = _lo_key(lo, phi, n_modes)
            if key not in variances:
                raise OracleFailure("measurement table is missing an entry",
                                    key=key)
            return float(variances[key])

        cov = detection.reconstruct_covariance(oracle, n_modes)
        return {"cov": array_to_json(cov)}, None
    # hom
    if args.p is None and args.overlap is None:
        raise UsageError("detect hom needs --overlap or --p/--overlaps")
    if args.p is not None:
        if args.overlaps is None:
            raise UsageError("--p requires --overlaps")
        p = np.array(_parse_floats(args.p))
        overlaps = json_to_cmat(_load_json(args.overlaps)["overlaps"])
        g2 = detection.hom_schmidt(p, overlaps)
    else:
        overlap = complex(*(_parse_floats(args.overlap) + [0.0])[:2])
        if args.coherent:
            g2 = detection.hom_coherent(overlap, args.phi)
        else:
            g2 = detection.hom_single_photon(overlap, args.phi)
    return {"g2": g2}, None


def _schedule_key(label, phi):
    deg = int(round(math.degrees(phi)))
    if label[0] == "m":
        return "m:%d:%d" % (label[1], deg)
    return "%s:%d,%d:%d" % (label[0], label[1], label[2], deg)


def _lo_key(lo, phi, n_modes):
    """Map a schedule LO vector back to its table key."""
    deg = int(round(math.degrees(phi)))
    nz = np.nonzero(np.abs(lo) > 1e-12)[0]
    if nz.size == 1:
        return "m:%d:%d" % (nz[0], deg)
    kind = "i" if abs(lo[nz[1]].imag) > 1e-12 else "s"
    return "%s:%d,%d:%d" % (kind, nz[0], nz[1], deg)


def _cmd_degauss(args, ctx):
    st = _load_state(args.in_path)
    g = _parse_vector(args.mode_vec)
    p = nongauss.photon_operation(st, g, args.sign)
    origin = nongauss.wigner_origin_sign(p)
    zero = np.zeros(2 * st.n_modes)
    payload = {
        "value_at_origin": nongauss.wigner_eval_nongauss(p, zero),
        "origin_sign": origin.label,
        "origin_indicator": origin.value,
    }
    if args.negativity:
        if st.n_modes > 2:
            raise TooManyModes(
                "log-negativity integration supports 1 or 2 modes",
                n_modes=st.n_modes)
        payload["log_negativity"] = nongauss.wigner_log_negativity(
            lambda pts: nongauss.wigner_eval_nongauss(p, pts), st.n_modes)
    return payload, None


def _build_metrology_model(name, photons):
    if name == "mz":
        return metrology.mz_model(photons)
    if name == "phase":
        return metrology.phase_model(photons)
    return metrology.displacement_model(photons)


def _squeezed_cov_in_mode(u_det, var_db):
    """Covariance with 10^(-db/10) X-variance in the u_det mode."""
    n = u_det.size
    u_ext = modal.extend_to_basis(u_det)
    o = modal.unitary_to_orthogonal(u_ext)
    var = 10.0 ** (-var_db / 10.0)
    d = np.ones(2 * n)
    d[0] = var
    d[n] = 1.0 / var
    return o.T @ np.diag(d) @ o


def _cmd_metrology(args, ctx):
    model = _build_metrology_model(args.model, args.photons)
    u_det, a0 = metrology.detection_mode(model)
    n = u_det.size
    cov_coherent = np.eye(2 * n)
    bound_coherent = metrology.qcr_bound(model, cov_coherent)
    payload = {
        "model": args.model,
        "n_photons": args.photons,
        "a0": a0,
        "u_det": array_to_json(u_det),
        "bound_coherent": bound_coherent,
    }
    if args.squeeze_db is not None:
        cov = _squeezed_cov_in_mode(u_det, args.squeeze_db)
        bound = metrology.qcr_bound(model, cov)
        payload["squeeze_db"] = args.squeeze_db
        payload["bound_squeezed"] = bound
        payload["improvement"] = bound_coherent / bound
    return payload, None


def _cmd_cluster(args, ctx):
    v = json_to_cmat(_load_json(args.v_path)["v"]).real
    sigma = _parse_floats(args.sigma)
    sigma = sigma[0] if len(sigma) == 1 else np.array(sigma)
    res = sources.cluster_state(v, sigma)
    st = res.state
    if args.loss is not None:
        st = channels.gaussian_channel(st, args.loss)
    nc = sources.nullifier_covariance(st, v)
    u = sources.cluster_unitary(v)
    residual = float(np.max(np.abs(u.real - v @ u.imag)))
    payload = {
        "nullifier_variances": array_to_json(np.diag(nc)),
        "nullifier_cov": array_to_json(nc),
        "unitary_residual": residual,
    }
    return payload, None


# -----------------------------------------------------------------------------------
# Sweeps
# -----------------------------------------------------------------------------------

def _sweep_values(start, stop, step):
    if not (np.isfinite(start) and np.isfinite(stop) and np.isfinite(step)):
        raise BadRange("sweep range must be finite",
                       start=start, stop=stop, step=step)
    if step <= 0 or stop < start:
        raise BadRange("sweep needs stop >= start and step > 0",
                       start=start, stop=stop, step=step)
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def _epr_state(sigma2):
    """Two squeezers (X variances sigma2, 1/sigma2) mixed on a balanced
    splitter; the (X1+X2) and (P1-P2) combinations both have variance
    sigma2."""
    cov0 = np.diag([sigma2, 1.0 / sigma2, 1.0 / sigma2, sigma2])
    st = gaussian.GaussianState(np.zeros(4), cov0)
    u = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    o = modal.unitary_to_orthogonal(u)
    return gaussian.apply_symplectic(st, o)


def _cmd_sweep(args, ctx):
    values = _sweep_values(args.start, args.stop, args.step)
    if args.scenario == "duan-gain":
        st0 = _epr_state(args.sigma2)
        rows = []
        for gain in values:
            out = channels.gaussian_channel(st0, gain)
            res = channels.duan_mancini(out, 0, 1, signs=(1, -1))
            rows.append((gain, res.product, res.entangled))
        return (["gain", "duan_product", "entangled"], rows)
    if args.scenario == "spopo-r":
        lambdas = np.array(_parse_floats(args.lambdas))
        header = ["r"] + ["delta_x2_%d" % i for i in range(lambdas.size)]
        rows = []
        for r in values:
            vals = sources.spopo_squeezing(lambdas, r)
            rows.append((r,) + tuple(vals))
        return (header, rows)
    if args.scenario == "hom-phi":
        overlap = complex(*(_parse_floats(args.overlap) + [0.0])[:2])
        rows = [(phi, detection.hom_single_photon(overlap, phi))
                for phi in values]
        return (["phi", "g2"], rows)
    # qcr-budget: values are log10 of the photon budget
    model_a0 = 2.0  # Mach-Zehnder scaling factor
    rows = []
    for exp10 in values:
        n_total = 10.0 ** exp10
        r_opt, bound = _optimal_budget_split(model_a0, n_total)
        rows.append((n_total, r_opt, bound))
    return (["n_photons", "squeeze_r", "bound"], rows)


def _optimal_budget_split(a0, n_total):
    """Split a photon budget between the mean field and squeezing of the
    detection mode; minimize a0 e^-r / (2 sqrt(N - sinh^2 r))."""

    def bound(r):
        n_mean = n_total - math.sinh(r) ** 2
        if n_mean <= 0:
            return float("inf")
        return a0 * math.exp(-r) / (2.0 * math.sqrt(n_mean))

    r_hi = math.asinh(math.sqrt(n_total * (1.0 - 1e-12)))
    lo, hi = 0.0, r_hi
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - golden * (hi - lo)
    d = lo + golden * (hi - lo)
    fc, fd = bound(c), bound(d)
    while hi - lo > 1e-10 * max(1.0, r_hi):
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - golden * (hi - lo)
            fc = bound(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + golden * (hi - lo)
            fd = bound(d)
    r = 0.5 * (lo + hi)
    return r, bound(r)


# -----------------------------------------------------------------------------------
# Parser and dispatch
# -----------------------------------------------------------------------------------

def build_parser():
    # shared flags accepted after any (sub)command
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", dest="out_path", default=None,
                        help="output file (default: stdout)")
    common.add_argument("--format", dest="fmt", choices=["json", "csv"],
                        default=None, help="output format")
    common.add_argument("--tolerance", type=float, default=None,
                        help="override default numerical tolerance")
    common.add_argument("--seed", type=int, default=42,
                        help="seed for any sampled quantities")

    p = argparse.ArgumentParser(
        prog="mmqo",
        description="Multimode Gaussian quantum optics toolbox")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", parents=[common],
                       help="all factorizations of a state")
    d.add_argument("--in", dest="in_path", required=True)
    d.set_defaults(func=_cmd_decompose)

    s = sub.add_parser("source", help="model a multimode source")
    ssub = s.add_subparsers(dest="kind", required=True)
    sp = ssub.add_parser("pdc", parents=[common])
    sp.add_argument("--g", dest="g_path", required=True,
                    help="joint two-photon matrix JSON")
    sp.add_argument("--gain", type=float, required=True)
    sp.set_defaults(func=_cmd_source)
    so = ssub.add_parser("spopo", parents=[common])
    so.add_argument("--lambdas", required=True)
    so.add_argument("--r", type=float, required=True)
    so.set_defaults(func=_cmd_source)
    sc = ssub.add_parser("cluster", parents=[common])
    sc.add_argument("--v", dest="v_path", required=True,
                    help="adjacency matrix JSON {\"v\": [[...]]}")
    sc.add_argument("--sigma", required=True)
    sc.set_defaults(func=_cmd_source)

    c = sub.add_parser("channel", parents=[common],
                       help="Gaussian gain/loss channel")
    c.add_argument("--in", dest="in_path", required=True)
    c.add_argument("--gain", type=float, required=True)
    c.add_argument("--env-kappa", dest="env_kappa", type=float, default=1.0)
    c.set_defaults(func=_cmd_channel)

    de = sub.add_parser("detect", help="measurement models")
    desub = de.add_subparsers(dest="mode", required=True)
    dh = desub.add_parser("homodyne", parents=[common])
    dh.add_argument("--in", dest="in_path", required=True)
    dh.add_argument("--lo", required=True, help="LO mode vector JSON")
    dh.add_argument("--phi", type=float, default=0.0)
    dh.set_defaults(func=_cmd_detect)
    dsch = desub.add_parser("schedule", parents=[common])
    dsch.add_argument("--modes", type=int, required=True)
    dsch.set_defaults(func=_cmd_detect)
    dr = desub.add_parser("reconstruct", parents=[common])
    dr.add_argument("--table", required=True,
                    help="measured-variance table JSON")
    dr.set_defaults(func=_cmd_detect)
    dm = desub.add_parser("hom", parents=[common])
    dm.add_argument("--overlap", default=None)
    dm.add_argument("--phi", type=float, default=0.0)
    dm.add_argument("--coherent", action="store_true",
                    help="coherent-pulse variant (phi read as psi)")
    dm.add_argument("--p", default=None, help="Schmidt weights")
    dm.add_argument("--overlaps", default=None,
                    help="Schmidt overlap matrix JSON")
    dm.set_defaults(func=_cmd_detect)

    dg = sub.add_parser("degauss", parents=[common],
                        help="photon addition/subtraction")
    dg.add_argument("--in", dest="in_path", required=True)
    dg.add_argument("--sign", choices=["add", "subtract"], required=True)
    dg.add_argument("--mode", dest="mode_vec", required=True)
    dg.add_argument("--negativity", action="store_true")
    dg.set_defaults(func=_cmd_degauss)

    m = sub.add_parser("metrology", parents=[common],
                       help="Cramér-Rao bound evaluation")
    m.add_argument("--model", choices=sorted(metrology.BUILTIN_MODELS),
                   required=True)
    m.add_argument("--photons", type=float, required=True)
    m.add_argument("--squeeze-db", dest="squeeze_db", type=float,
                   default=None)
    m.set_defaults(func=_cmd_metrology)

    cl = sub.add_parser("cluster", parents=[common],
                        help="cluster-state nullifier report")
    cl.add_argument("--v", dest="v_path", required=True)
    cl.add_argument("--sigma", required=True)
    cl.add_argument("--loss", type=float, default=None,
                    help="apply a loss channel with this gain before "
                         "reading nullifiers")
    cl.set_defaults(func=_cmd_cluster)

    sw = sub.add_parser("sweep", parents=[common],
                        help="one-parameter sweeps, CSV output")
    sw.add_argument("--scenario", required=True,
                    choices=["duan-gain", "spopo-r", "hom-phi", "qcr-budget"])
    sw.add_argument("--start", type=float, required=True)
    sw.add_argument("--stop", type=float, required=True)
    sw.add_argument("--step", type=float, required=True)
    sw.add_argument("--sigma2", type=float, default=1e-6,
                    help="squeezed variance of the EPR probe (duan-gain)")
    sw.add_argument("--lambdas", default="1.0,0.5",
                    help="gain eigenvalues (spopo-r)")
    sw.add_argument("--overlap", default="1.0", help="mode overlap (hom-phi)")
    sw.set_defaults(func=_cmd_sweep, sweep=True)

    return p


def _configure_logging():
    level = os.environ.get("MMQO_LOG", "").strip().lower()
    levels = {"debug": logging.DEBUG, "info": logging.INFO,
              "warning": logging.WARNING, "error": logging.ERROR}
    if level in levels:
        logging.basicConfig(level=levels[level],
                            format="%(name)s %(levelname)s %(message)s")


def _write(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    ctx = Scenario(out_path=args.out_path, fmt=args.fmt,
                   tolerance=args.tolerance, seed=args.seed)
    try:
        if getattr(args, "sweep", False):
            header, rows = _cmd_sweep(args, ctx)
            if ctx.fmt == "json":
                payload = {"header": header,
                           "rows": [list(r) for r in rows]}
                _write(dumps(payload) + "\n", ctx.out_path)
            else:
                _write(csv_lines(header, rows), ctx.out_path)
            return 0
        payload, csv_payload = args.func(args, ctx)
        fmt = ctx.fmt or ("csv" if csv_payload is not None else "json")
        if fmt == "csv":
            if csv_payload is None:
                raise UsageError("this subcommand has no CSV form")
            _write(csv_lines(*csv_payload), ctx.out_path)
        else:
            _write(dumps(payload) + "\n", ctx.out_path)
        return 0
    except UsageError as exc:
        sys.stderr.write(dumps({"code": "UsageError",
                                "message": str(exc), "context": {}}) + "\n")
        return 2
    except MmqoError as exc:
        log.info("domain error: %s", exc.code)
        sys.stderr.write(dumps({"code": exc.code, "message": exc.message,
                                "context": exc.context}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
