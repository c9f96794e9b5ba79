"""Batch command-line front end.

Subcommands:

  basis      orthonormality residuals, tabulated values, or Fourier-pair
             residuals for a basis family
  solve-fl   one fractional-Laplacian solve, solution written as a
             SpectralField CSV (plus an error row when the truth is known)
  evolve     Crank-Nicolson evolution of a Gaussian beam, profile CSVs at
             the requested times plus the Gram-norm history
  eigen      Schrodinger eigenvalues (Coulomb or rational power potential)
  converge   sweeps: fl over K, eigen over K, or tdse over dt

Every command reads a plain ``key = value`` config file (``#`` comments
allowed; unknown keys rejected), writes CSVs under ``--out``, and embeds
the config hash in each file so runs are attributable.  Exit code 0 on
success, 2 on configuration errors, 1 on runtime failures, with a
machine-readable error line on stderr.
"""

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import eigen_solver, fl_solver, muntz_basis, tdse_solver
from .ghf_basis import (BasisSpec, SpectralField, Truncation, aghf_radial, fourier_axis,
                        ghf_radial, numeric_fourier)
from .harmonics import harmonic_dim
from .specfun import kummer_1f1, radial_rule

__all__ = ["main", "parse_config", "ConfigError"]


class ConfigError(ValueError):
    pass


def _parse_value(raw, kind):
    raw = raw.strip()
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            if raw.lower() in ("true", "yes", "1", "on"):
                return True
            if raw.lower() in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        if kind == "str":
            return raw
        if kind == "int-list":
            return [int(tok) for tok in raw.split(",") if tok.strip()]
        if kind == "float-list":
            return [float(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse {raw!r} as {kind}") from exc
    raise ConfigError(f"unknown schema kind {kind}")


def parse_config(path, schema):
    """Read ``key = value`` lines and validate against ``schema``.

    ``schema`` maps key -> (kind, default) with default ``...`` marking a
    required key.  Unknown keys are rejected.
    """
    text = Path(path).read_text()
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, raw = (tok.strip() for tok in stripped.split("=", 1))
        if key not in schema:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = _parse_value(raw, schema[key][0])
    for key, (kind, default) in schema.items():
        if key not in values:
            if default is ...:
                raise ConfigError(f"{path}: missing required key {key!r}")
            values[key] = default
    values["_hash"] = hashlib.sha256(text.encode()).hexdigest()
    return values


def _writer(out_dir, name, command, cfg_hash):
    path = Path(out_dir) / name
    fh = open(path, "w", newline="")
    fh.write(f"# hermspec {command}\n")
    fh.write(f"# config-sha256={cfg_hash}\n")
    return fh, csv.writer(fh, lineterminator="\n")


def _fmt(x):
    return repr(float(x))


# ---------------------------------------------------------------------------
# basis
# ---------------------------------------------------------------------------

_BASIS_SCHEMA = {
    "task": ("str", "gram"),
    "family": ("str", "ghf"),
    "d": ("int", ...),
    "param": ("float", ...),
    "nmax": ("int", 4),
    "kmax": ("int", 8),
    "quad_size": ("int", 0),
    "r_max": ("float", 6.0),
    "r_points": ("int", 1),
    "extent": ("float", 12.0),
    "step": ("float", 0.05),
    "xi_max": ("float", 8.0),
}


def _gram_residuals(family, d, param, nmax, kmax, quad_size=0):
    """Max |Gram - I| per (n, ell) block, radial x sphere quadrature."""
    quad = quad_size or (2 * kmax + 16)
    mu_weight = param if family == "ghf" else 0.0
    rows = []
    for n in range(nmax + 1):
        if harmonic_dim(d, n) == 0:
            continue
        rule = radial_rule(d, n, mu_weight, quad)
        if family == "ghf":
            table = ghf_radial(param, d, n, kmax, rule.nodes)
        else:
            table = aghf_radial(param, d, n, kmax, rule.nodes)
        # the rule's weight carries r^{2n}; the tables do too, so divide once
        scaled = np.exp(rule.log_weights + rule.nodes ** 2 - 2 * n * np.log(rule.nodes))
        gram = (table * scaled) @ table.T
        resid = np.max(np.abs(gram - np.eye(kmax + 1)))
        for ell in range(1, harmonic_dim(d, n) + 1):
            rows.append((n, ell, resid))
    return rows


def _cmd_basis(cfg, out_dir):
    family, d, param = cfg["family"], cfg["d"], cfg["param"]
    if family not in ("ghf", "aghf"):
        raise ConfigError("basis family must be ghf or aghf")
    task = cfg["task"]
    if task == "gram":
        if family == "aghf":
            raise ConfigError("gram task applies to the ghf family; use task=fourier "
                              "for the adjoint pair")
        rows = _gram_residuals(family, d, param, cfg["nmax"], cfg["kmax"], cfg["quad_size"])
        fh, wr = _writer(out_dir, "gram.csv", "basis", cfg["_hash"])
        with fh:
            wr.writerow(["n", "ell", "max_abs_residual"])
            for n, ell, resid in rows:
                wr.writerow([n, ell, _fmt(resid)])
        return
    if task == "values":
        r = np.linspace(0.0, cfg["r_max"], cfg["r_points"])
        fh, wr = _writer(out_dir, "values.csv", "basis", cfg["_hash"])
        with fh:
            wr.writerow(["n", "ell", "k", "r", "radial_value"])
            for n in range(cfg["nmax"] + 1):
                if harmonic_dim(d, n) == 0:
                    continue
                if family == "ghf":
                    table = ghf_radial(param, d, n, cfg["kmax"], r)
                else:
                    table = aghf_radial(param, d, n, cfg["kmax"], r)
                for ell in range(1, harmonic_dim(d, n) + 1):
                    for k in range(cfg["kmax"] + 1):
                        for ri, vi in zip(r, table[k]):
                            wr.writerow([n, ell, k, _fmt(ri), _fmt(vi)])
        return
    if task == "fourier":
        if d not in (1, 2):
            raise ConfigError("fourier task supports d = 1, 2")
        rows = _fourier_residuals(d, param, cfg["nmax"], cfg["kmax"],
                                  cfg["extent"], cfg["step"], cfg["xi_max"])
        fh, wr = _writer(out_dir, "fourier.csv", "basis", cfg["_hash"])
        with fh:
            wr.writerow(["n", "ell", "k", "max_abs_residual"])
            for row in rows:
                wr.writerow(list(row[:3]) + [_fmt(row[3])])
        return
    raise ConfigError(f"unknown basis task {task!r}")


def _fourier_residuals(d, mu, nmax, kmax, extent, step, xi_max):
    """max_xi |F[Hcheck](xi) - (-i)^(n+2k) Hhat(xi)| per member."""
    axis = fourier_axis(extent, step)
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    pts = np.column_stack([g.ravel() for g in grids])
    spec_a = BasisSpec("aghf", d, mu)
    spec_g = BasisSpec("ghf", d, mu)
    out = []
    from .ghf_basis import aghf_eval, ghf_eval, BasisIndex
    for n in range(nmax + 1):
        if harmonic_dim(d, n) == 0:
            continue
        for ell in range(1, harmonic_dim(d, n) + 1):
            for k in range(kmax + 1):
                idx = BasisIndex(k, ell, n)
                samples = aghf_eval(spec_a, idx, pts).reshape(grids[0].shape)
                xi, transform = numeric_fourier(samples, extent, step)
                keep = np.abs(xi) <= xi_max
                xgrids = np.meshgrid(*([xi[keep]] * d), indexing="ij")
                xpts = np.column_stack([g.ravel() for g in xgrids])
                target = (-1j) ** (n + 2 * k) * ghf_eval(spec_g, idx, xpts)
                view = transform[np.ix_(*([keep] * d))].ravel()
                out.append((n, ell, k, float(np.max(np.abs(view - target)))))
    return out


# ---------------------------------------------------------------------------
# solve-fl
# ---------------------------------------------------------------------------

_FL_SCHEMA = {
    "d": ("int", ...),
    "s": ("float", ...),
    "gamma": ("float", 1.0),
    "source": ("str", "exp"),
    "r_exponent": ("float", 2.0),
    "N": ("int", 10),
    "K": ("int", ...),
    "quad_size": ("int", 0),
    "lattice_extent": ("float", 6.0),
    "lattice_step": ("float", 0.25),
}


def _fl_problem(cfg, K=None):
    return fl_solver.FLProblem(
        d=cfg["d"], s=cfg["s"], gamma=cfg["gamma"], source=cfg["source"],
        N=cfg["N"], K=cfg["K"] if K is None else K,
        r_exponent=cfg["r_exponent"], quad_size=cfg["quad_size"] or None)


def _fl_errors(field, exact, lattice):
    diff = field.evaluate(lattice) - exact(lattice)
    step = abs(lattice[1][-1] - lattice[0][-1])
    return (float(np.max(np.abs(diff))),
            float(math.sqrt(step ** field.spec.d * np.sum(np.abs(diff) ** 2))))


def _cmd_solve_fl(cfg, out_dir):
    problem = _fl_problem(cfg)
    t0 = time.perf_counter()
    field = fl_solver.solve(problem)
    seconds = time.perf_counter() - t0
    with open(Path(out_dir) / "solution.csv", "w", newline="") as fh:
        fh.write(f"# hermspec solve-fl\n# config-sha256={cfg['_hash']}\n")
        field.to_csv(fh)
    src = fl_solver.manufactured_source(cfg["source"], cfg["d"], cfg["s"],
                                        cfg["gamma"], cfg["r_exponent"])
    if src.exact is not None:
        lattice = fl_solver.default_lattice(cfg["d"], cfg["lattice_extent"],
                                            cfg["lattice_step"])
        max_err, l2_err = _fl_errors(field, src.exact, lattice)
        fh, wr = _writer(out_dir, "error.csv", "solve-fl", cfg["_hash"])
        with fh:
            wr.writerow(["K", "max_error", "l2_error", "seconds"])
            wr.writerow([problem.K, _fmt(max_err), _fmt(l2_err), _fmt(seconds)])


# ---------------------------------------------------------------------------
# evolve
# ---------------------------------------------------------------------------

_EVOLVE_SCHEMA = {
    "d": ("int", 2),
    "s": ("float", ...),
    "mu": ("float", ...),
    "gamma": ("float", 1.0),
    "dt": ("float", ...),
    "t_end": ("float", ...),
    "sigma": ("float", 1.0),
    "chirp": ("float", 1.0),
    "N": ("int", 10),
    "K": ("int", ...),
    "quad_size": ("int", 0),
    "record": ("float-list", []),
    "lattice_extent": ("float", 6.0),
    "lattice_step": ("float", 0.25),
}


def _cmd_evolve(cfg, out_dir):
    sigma, chirp = cfg["sigma"], cfg["chirp"]

    def psi0(pts):
        pts = np.atleast_2d(pts)
        r = np.linalg.norm(pts, axis=1)
        return np.exp(-sigma * r * r - 1j * chirp * r)

    record = tuple(cfg["record"]) or (cfg["t_end"],)
    problem = tdse_solver.TDSEProblem(
        s=cfg["s"], mu=cfg["mu"], gamma=cfg["gamma"], dt=cfg["dt"],
        t_end=cfg["t_end"], psi0=psi0, N=cfg["N"], K=cfg["K"], d=cfg["d"],
        record_times=record, quad_size=cfg["quad_size"] or None, psi0_radial=True)
    result = tdse_solver.run(problem)
    lattice = fl_solver.default_lattice(cfg["d"], cfg["lattice_extent"],
                                        cfg["lattice_step"])
    for t, state in zip(result.times, result.fields):
        tag = ("%g" % t).replace(".", "p").replace("-", "m")
        fh, wr = _writer(out_dir, f"psi_t{tag}.csv", "evolve", cfg["_hash"])
        with fh:
            wr.writerow([f"x{i + 1}" for i in range(cfg["d"])] + ["re", "im", "abs2"])
            vals = state.evaluate(lattice)
            for row, v in zip(lattice, vals):
                wr.writerow([_fmt(c) for c in row]
                            + [_fmt(v.real), _fmt(v.imag), _fmt(abs(v) ** 2)])
    fh, wr = _writer(out_dir, "norms.csv", "evolve", cfg["_hash"])
    with fh:
        wr.writerow(["step", "t", "gram_norm_sq"])
        for i, (t, q) in enumerate(zip(result.t_grid, result.gram_norms)):
            wr.writerow([i, _fmt(t), _fmt(q)])


# ---------------------------------------------------------------------------
# eigen
# ---------------------------------------------------------------------------

_EIGEN_SCHEMA = {
    "d": ("int", ...),
    "potential": ("str", "coulomb"),
    "Z": ("float", ...),
    "p": ("int", 1),
    "q": ("int", 0),
    "kappa": ("float", 4.0),
    "N": ("int", 4),
    "K": ("int", ...),
    "count": ("int", 10),
    "ref_factor": ("int", 4),
    "dump_blocks": ("bool", False),
}


def _eigen_problem(cfg, K=None):
    return eigen_solver.EigenProblem(
        d=cfg["d"], kind=cfg["potential"], Z=cfg["Z"], N=cfg["N"],
        K=cfg["K"] if K is None else K, count=cfg["count"],
        kappa=cfg["kappa"], p=cfg["p"], q=cfg["q"])


def _eigen_reference(problem, cfg):
    if problem.kind == "coulomb":
        ref, i = [], 1
        while len(ref) < problem.count:
            lam, mult, _ = eigen_solver.exact_coulomb(problem.d, problem.Z, i)
            ref.extend([lam] * mult)
            i += 1
        return np.array(ref[:problem.count])
    return eigen_solver.reference_eigenvalues(problem, cfg["ref_factor"])[:problem.count]


def _cmd_eigen(cfg, out_dir):
    problem = _eigen_problem(cfg)
    result = eigen_solver.solve_eigs(problem)
    reference = _eigen_reference(problem, cfg)
    fh, wr = _writer(out_dir, "eigenvalues.csv", "eigen", cfg["_hash"])
    with fh:
        wr.writerow(["rank", "n", "ell", "eigenvalue", "abs_error_vs_reference"])
        for rank, (value, n, ell) in enumerate(result.entries):
            err = abs(value - reference[rank]) if rank < reference.size else float("nan")
            wr.writerow([rank, n, ell, _fmt(value), _fmt(err)])
    if cfg["dump_blocks"]:
        if problem.kind == "coulomb":
            S, M, _ = eigen_solver.assemble_coulomb(problem)
        else:
            S, M = eigen_solver.assemble_fractional(problem)
        for n in S:
            muntz_basis.write_block_triplets(S[n], Path(out_dir) / f"S_n{n}.csv")
            muntz_basis.write_block_triplets(M[n], Path(out_dir) / f"M_n{n}.csv")


# ---------------------------------------------------------------------------
# converge
# ---------------------------------------------------------------------------

_CONVERGE_SCHEMA = {
    "problem": ("str", ...),
    "K_list": ("int-list", []),
    "dt_list": ("float-list", []),
    "reference_K": ("int", 80),
    "reference_N": ("int", 20),
    # fl + shared keys
    "d": ("int", 2),
    "s": ("float", 0.5),
    "gamma": ("float", 1.0),
    "source": ("str", "exp"),
    "r_exponent": ("float", 2.0),
    "N": ("int", 10),
    "K": ("int", 40),
    "quad_size": ("int", 0),
    "lattice_extent": ("float", 6.0),
    "lattice_step": ("float", 0.25),
    # eigen keys
    "potential": ("str", "coulomb"),
    "Z": ("float", -1.0),
    "p": ("int", 1),
    "q": ("int", 0),
    "kappa": ("float", 4.0),
    "count": ("int", 10),
    "ref_factor": ("int", 4),
    # tdse keys
    "mu": ("float", 0.5),
    "t_end": ("float", 1.0),
}


def _run_sweep(points, worker, threads):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(worker, points))
    return [worker(p) for p in points]


def _cmd_converge(cfg, out_dir, threads):
    kind = cfg["problem"]
    if kind == "fl":
        if not cfg["K_list"]:
            raise ConfigError("converge fl needs K_list")
        lattice = fl_solver.default_lattice(cfg["d"], cfg["lattice_extent"],
                                            cfg["lattice_step"])
        src = fl_solver.manufactured_source(cfg["source"], cfg["d"], cfg["s"],
                                            cfg["gamma"], cfg["r_exponent"])
        if src.exact is not None:
            exact = src.exact
        else:
            ref_cfg = dict(cfg, N=cfg["reference_N"])
            reference = fl_solver.solve(_fl_problem(ref_cfg, K=cfg["reference_K"]))
            ref_vals = reference.evaluate(lattice)
            exact = lambda pts: ref_vals  # noqa: E731  (fixed lattice)

        def worker(K):
            t0 = time.perf_counter()
            field = fl_solver.solve(_fl_problem(cfg, K=K))
            seconds = time.perf_counter() - t0
            max_err, l2_err = _fl_errors(field, exact, lattice)
            return K, max_err, l2_err, seconds

        rows = _run_sweep(cfg["K_list"], worker, threads)
        fh, wr = _writer(out_dir, "converge_fl.csv", "converge", cfg["_hash"])
        with fh:
            wr.writerow(["K", "max_error", "l2_error", "seconds"])
            for K, e1, e2, sec in rows:
                wr.writerow([K, _fmt(e1), _fmt(e2), _fmt(sec)])
        return
    if kind == "eigen":
        if not cfg["K_list"]:
            raise ConfigError("converge eigen needs K_list")
        reference = _eigen_reference(_eigen_problem(cfg, K=max(cfg["K_list"])), cfg)

        def worker(K):
            t0 = time.perf_counter()
            values = eigen_solver.solve_eigs(_eigen_problem(cfg, K=K)).values
            seconds = time.perf_counter() - t0
            m = min(values.size, reference.size)
            return K, float(np.max(np.abs(values[:m] - reference[:m]))), seconds

        rows = _run_sweep(cfg["K_list"], worker, threads)
        fh, wr = _writer(out_dir, "converge_eigen.csv", "converge", cfg["_hash"])
        with fh:
            wr.writerow(["K", "max_abs_error", "seconds"])
            for K, err, sec in rows:
                wr.writerow([K, _fmt(err), _fmt(sec)])
        return
    if kind == "tdse-dt":
        if not cfg["dt_list"]:
            raise ConfigError("converge tdse-dt needs dt_list")
        lattice = fl_solver.default_lattice(cfg["d"], cfg["lattice_extent"],
                                            cfg["lattice_step"])

        def worker(dt):
            t0 = time.perf_counter()
            err = _tdse_manufactured_error(cfg, dt, lattice)
            return dt, err, time.perf_counter() - t0

        rows = _run_sweep(cfg["dt_list"], worker, threads)
        slope = _loglog_slope([r[0] for r in rows], [r[1] for r in rows])
        fh, wr = _writer(out_dir, "converge_tdse.csv", "converge", cfg["_hash"])
        with fh:
            wr.writerow(["dt", "max_error", "seconds"])
            for dt, err, sec in rows:
                wr.writerow([_fmt(dt), _fmt(err), _fmt(sec)])
            fh.write(f"# fitted_slope={_fmt(slope)}\n")
        return
    raise ConfigError(f"unknown converge problem {kind!r}")


def _loglog_slope(xs, ys):
    lx, ly = np.log(np.asarray(xs)), np.log(np.asarray(ys))
    return float(np.polyfit(lx, ly, 1)[0])


def manufactured_tdse(cfg, dt):
    """Problem with exact solution psi = e^{-|x|^2 - t} and matching source."""
    s, mu, gamma, d = cfg["s"], cfg["mu"], cfg["gamma"], cfg["d"]
    lap_c = math.exp(2 * s * math.log(2.0) + math.lgamma(s + 0.5 * d)
                     - math.lgamma(0.5 * d))

    def psi0(pts):
        return np.exp(-fl_solver._sq_norm(pts)) + 0.0j

    def smooth_part(pts):
        rho = fl_solver._sq_norm(pts)
        frac = lap_c * kummer_1f1(s + 0.5 * d, 0.5 * d, -rho)
        return -1j * np.exp(-rho) - 0.5 * frac

    def potential_factor(pts):
        # smooth factor of the -gamma^2/2 |x|^{2 mu} psi term; the power
        # itself lives in the projection weight
        return -0.5 * gamma ** 2 * np.exp(-fl_solver._sq_norm(pts))

    decay = lambda t: math.exp(-t)  # noqa: E731
    source = tdse_solver.SeparableSource([decay, decay], [smooth_part, potential_factor],
                                         radial=True, weights=[0.0, mu])
    return tdse_solver.TDSEProblem(
        s=s, mu=mu, gamma=gamma, dt=dt, t_end=cfg["t_end"], psi0=psi0,
        N=cfg["N"], K=cfg["K"], d=d, source=source,
        record_times=(cfg["t_end"],), quad_size=cfg["quad_size"] or None,
        psi0_radial=True)


def _tdse_manufactured_error(cfg, dt, lattice):
    result = tdse_solver.run(manufactured_tdse(cfg, dt))
    final = result.fields[-1].evaluate(lattice)
    rho = fl_solver._sq_norm(lattice)
    exact = np.exp(-rho - cfg["t_end"])
    return float(np.max(np.abs(final - exact)))


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

_COMMANDS = {
    "basis": (_BASIS_SCHEMA, lambda cfg, out, threads: _cmd_basis(cfg, out)),
    "solve-fl": (_FL_SCHEMA, lambda cfg, out, threads: _cmd_solve_fl(cfg, out)),
    "evolve": (_EVOLVE_SCHEMA, lambda cfg, out, threads: _cmd_evolve(cfg, out)),
    "eigen": (_EIGEN_SCHEMA, lambda cfg, out, threads: _cmd_eigen(cfg, out)),
    "converge": (_CONVERGE_SCHEMA, _cmd_converge),
}


def main(argv=None):
    parser = argparse.ArgumentParser(prog="hermspec",
                                     description="generalised Hermite spectral solvers")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)
    schema, runner = _COMMANDS[args.command]
    try:
        cfg = parse_config(args.config, schema)
    except (ConfigError, OSError) as exc:
        print("hermspec-error: " + json.dumps({"stage": "config", "message": str(exc)}),
              file=sys.stderr)
        return 2
    if args.threads < 1:
        print("hermspec-error: " + json.dumps({"stage": "config",
                                               "message": "--threads must be >= 1"}),
              file=sys.stderr)
        return 2
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        runner(cfg, out_dir, args.threads)
    except ConfigError as exc:
        print("hermspec-error: " + json.dumps({"stage": "config", "message": str(exc)}),
              file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - reported as a machine-readable line
        print("hermspec-error: " + json.dumps({"stage": "runtime",
                                               "message": f"{type(exc).__name__}: {exc}"}),
              file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
