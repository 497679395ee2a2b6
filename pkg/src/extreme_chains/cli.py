"""Batch experiment runner: ``extreme-chains run --config FILE --out DIR``.

A run is described by one JSON config (kind, kernel/scheme ids with parameter
maps, grids, horizon, path count, and a mandatory master seed), writes CSV
artifacts plus a manifest, and is byte-deterministic for a given seed no
matter how many workers execute it: work is split into a fixed set of tasks,
each with a seed derived from (master seed, task index), and results are
assembled in task order.
"""

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache

import numpy as np

from . import diagnostics, kernels, norming, tailchain
from .errors import ExtremeChainsError, ValidationError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

_KINDS = ("simulate", "converge", "figure1", "hidden", "negdep", "chi")
_N_CHUNKS = 8   # fixed path-partition count; independent of worker count


def _rng_for(seed, *key):
    return np.random.default_rng(np.random.SeedSequence(
        entropy=int(seed), spawn_key=tuple(int(k) for k in key)))


@lru_cache(maxsize=32)
def _kernel_from_json(spec_json):
    spec = json.loads(spec_json)
    kid = spec.pop("id")
    return kernels.make_kernel(kid, **spec)


def _build_kernel(spec):
    if not isinstance(spec, dict) or "id" not in spec:
        raise ValidationError("kernel spec must be a mapping with an 'id'")
    return _kernel_from_json(json.dumps(spec, sort_keys=True))


def _build_scheme(spec):
    if not isinstance(spec, dict) or "id" not in spec:
        raise ValidationError("scheme spec must be a mapping with an 'id'")
    spec = dict(spec)
    return norming.make_norming(spec.pop("id"), **spec)


def _build_law(spec):
    if not isinstance(spec, dict) or "id" not in spec:
        raise ValidationError("limit law spec must be a mapping with an 'id'")
    spec = dict(spec)
    return norming.limit_law(spec.pop("id"), **spec)


def _require(config, *names):
    for name in names:
        if name not in config:
            raise ValidationError(f"config is missing required field '{name}'")


# ---------------------------------------------------------------------------
# task bodies (top-level so a process pool can pickle them)
# ---------------------------------------------------------------------------

def _task_simulate_chunk(args):
    config, chunk = args
    kern = _build_kernel(config["kernel"])
    n = config["n_paths"]
    counts = [n // _N_CHUNKS + (1 if i < n % _N_CHUNKS else 0)
              for i in range(_N_CHUNKS)]
    rng = _rng_for(config["seed"], 1, chunk)
    init = (diagnostics.FixedX0(config["init"]["x0"]) if "x0" in config["init"]
            else diagnostics.Exceedance(config["init"]["u"]))
    X = diagnostics.conditional_forward_sim(
        kern, kern.stationary_law, init, config["horizon"], counts[chunk], rng)
    return X


def _task_converge_row(args):
    config, j = args
    kern = _build_kernel(config["kernel"])
    scheme = _build_scheme(config["scheme"])
    law = _build_law(config["limit_law"])
    v = float(config["v_grid"][j])
    table = diagnostics.convergence_table(
        kern, scheme, law, config.get("t", 1), [v], config["n_paths"],
        seed=_derived_seed(config["seed"], 2, j),
        atom_cut=config.get("atom_cut", 20.0))
    return table.rows[0]


def _derived_seed(seed, *key):
    return int(_rng_for(seed, *key).integers(0, 2 ** 63 - 1))


_FIG1_CHAINS = ("i", "ii", "iii", "iv")


def _figure1_kernel_scheme(config, tag):
    gamma = config.get("gamma", 0.152)
    phi = config.get("phi", 0.8)
    rho = config.get("rho", 0.8)
    if tag == "i":
        kern = {"id": "bev_logistic", "gamma": gamma}
        scheme = norming.make_norming("ht_canonical", alpha=1.0, beta=0.0)
        law = norming.limit_law("bev_logistic", gamma=gamma)
    elif tag == "ii":
        kern = {"id": "inverted_bev_logistic", "gamma": gamma}
        scheme = norming.make_norming("ht_canonical", alpha=0.0, beta=1.0 - gamma)
        law = norming.limit_law("inverted_bev_logistic", gamma=gamma)
    elif tag == "iii":
        kern = {"id": "expar", "phi": phi}
        scheme = norming.make_norming("ht_canonical", alpha=phi, beta=0.0)
        law = None    # no limiting kernel is available for this chain
    else:
        kern = {"id": "gaussian_copula", "rho": rho, "margin": "exponential"}
        scheme = norming.make_norming("ht_canonical", alpha=rho * rho, beta=0.5)
        law = norming.limit_law("gaussian_exponential", rho=rho)
    return kern, scheme, law


def _task_figure1_chain(args):
    config, idx = args
    tag = _FIG1_CHAINS[idx]
    kern_spec, scheme, law = _figure1_kernel_scheme(config, tag)
    kern = _build_kernel(kern_spec)
    x0 = config.get("x0", 10.0)
    T = config.get("horizon", 15)
    n = config.get("n_paths", 10_000)
    rng = _rng_for(config["seed"], 3, idx, 0)
    X = diagnostics.conditional_forward_sim(
        kern, kern.stationary_law, diagnostics.FixedX0(x0), T, n, rng)
    env_actual = diagnostics.quantile_envelope(X[:, 1:], source="actual", t_start=1)
    env_tc = None
    if law is not None:
        upd = norming.update_functions(scheme)
        rng_tc = _rng_for(config["seed"], 3, idx, 1)
        if upd.scale_only:
            paths = tailchain.simulate_nonneg_tail_chain(upd, law, T, n, rng_tc)
        else:
            paths = tailchain.simulate_tail_chain(upd, law, T, n, rng_tc)
        xtc = tailchain.reconstruct_paths(x0, scheme, paths.M)
        env_tc = diagnostics.quantile_envelope(xtc, source="tailchain", t_start=1)
    return tag, env_actual, env_tc


def _task_hidden_chunk(args):
    config, chunk = args
    n = config["n_paths"]
    counts = [n // _N_CHUNKS + (1 if i < n % _N_CHUNKS else 0)
              for i in range(_N_CHUNKS)]
    rng = _rng_for(config["seed"], 4, chunk)
    T = config["horizon"]
    example = config["example"]
    params = config.get("params", {})
    m = counts[chunk]
    if example == "asym_logistic":
        return tailchain.hidden_asym_logistic(
            params.get("phi1", 0.5), params.get("phi2", 0.5),
            params.get("nu", 0.152), T, m, rng)
    if example == "rootzen_smith":
        return tailchain.hidden_rootzen_smith(T, m, rng)
    if example == "arch":
        return tailchain.hidden_arch(
            params.get("theta0", 1.0), params.get("theta1", 0.7), T, m, rng)
    if example == "ht_mixture":
        g1 = _build_law(params["g1"])
        g2 = _build_law(params["g2"])
        return tailchain.hidden_ht_mixture(
            params.get("lam", 0.5),
            (params["alpha1"], params["beta1"], g1),
            (params["alpha2"], params["beta2"], g2), T, m, rng)
    raise ValidationError(f"unknown hidden example '{example}'")


def _task_chi_row(args):
    config, j = args
    kern = _build_kernel(config["kernel"])
    u = float(config["u_grid"][j])
    rows = diagnostics.chi_estimate(
        kern, kern.stationary_law, config.get("t", 1), [u],
        config["n_paths"], seed=_derived_seed(config["seed"], 5, j))
    return rows[0]


def _task_negdep(args):
    config, _ = args
    rho = config.get("rho", -0.8)
    kern = _build_kernel({"id": "gaussian_copula", "rho": rho, "margin": "laplace"})
    x0 = config.get("x0", 20.0)
    T = config.get("horizon", 3)
    n = config.get("n_paths", 100_000)
    rng = _rng_for(config["seed"], 6, 0)
    X = diagnostics.conditional_forward_sim(
        kern, kern.stationary_law, diagnostics.FixedX0(x0), T, n, rng)
    rows = []
    for t in range(1, T + 1):
        frac = float(np.mean(np.sign(X[:, t]) == (-1.0) ** t))
        rows.append((t, frac))
    return rows


# ---------------------------------------------------------------------------
# experiment drivers
# ---------------------------------------------------------------------------

def _run_tasks(fn, arglist, workers):
    if workers <= 1 or len(arglist) <= 1:
        return [fn(a) for a in arglist]
    with ProcessPoolExecutor(max_workers=min(workers, len(arglist))) as pool:
        return list(pool.map(fn, arglist))


def _write_paths_csv(path, chunks):
    rows = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path", "t", "value"])
        pid = 0
        for X in chunks:
            for i in range(X.shape[0]):
                for t in range(X.shape[1]):
                    writer.writerow([pid, t, repr(float(X[i, t]))])
                    rows += 1
                pid += 1
    return rows


def _run_simulate(config, out_dir, workers):
    _require(config, "kernel", "init", "horizon", "n_paths")
    chunks = _run_tasks(_task_simulate_chunk,
                        [(config, c) for c in range(_N_CHUNKS)], workers)
    path = os.path.join(out_dir, "paths.csv")
    rows = _write_paths_csv(path, chunks)
    return [(path, rows)]


def _run_converge(config, out_dir, workers):
    _require(config, "kernel", "scheme", "limit_law", "v_grid", "n_paths")
    rows = _run_tasks(_task_converge_row,
                      [(config, j) for j in range(len(config["v_grid"]))],
                      workers)
    path = os.path.join(out_dir, "convergence.csv")
    table = diagnostics.ConvergenceTable(
        config["kernel"]["id"], config["scheme"]["id"], config.get("t", 1), rows)
    table.to_csv(path)
    # jointly report the norming remainder decay on the same threshold grid
    scheme = _build_scheme(config["scheme"])
    r_rows = norming.remainder_table(scheme, [config.get("t", 1)],
                                     config["v_grid"])
    r_path = os.path.join(out_dir, "remainders.csv")
    norming.remainder_table_to_csv(r_path, r_rows)
    return [(path, len(rows)), (r_path, len(r_rows))]


def _run_figure1(config, out_dir, workers):
    _require(config, "n_paths")
    results = _run_tasks(_task_figure1_chain,
                         [(config, i) for i in range(4)], workers)
    outputs = []
    for tag, env_actual, env_tc in results:
        path = os.path.join(out_dir, f"chain_{tag}.csv")
        env_actual.to_csv(path, mode="w", header=True)
        rows = len(env_actual.t)
        if env_tc is not None:
            env_tc.to_csv(path, mode="a", header=False)
            rows += len(env_tc.t)
        outputs.append((path, rows))
    return outputs


def _run_hidden(config, out_dir, workers):
    _require(config, "example", "horizon", "n_paths")
    chunks = _run_tasks(_task_hidden_chunk,
                        [(config, c) for c in range(_N_CHUNKS)], workers)
    path = os.path.join(out_dir, "hidden_paths.csv")
    rows = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path", "t", "value", "regime", "is_changepoint"])
        pid = 0
        for h in chunks:
            for i in range(h.n_paths):
                for t in range(h.horizon):
                    writer.writerow([pid, t + 1, repr(float(h.M[i, t])),
                                     int(h.regime[i, t]),
                                     int(h.is_changepoint[i, t])])
                    rows += 1
                pid += 1
    return [(path, rows)]


def _run_negdep(config, out_dir, workers):
    rows = _run_tasks(_task_negdep, [(config, 0)], workers)[0]
    path = os.path.join(out_dir, "negdep_signs.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "sign_match_freq"])
        for t, frac in rows:
            writer.writerow([t, repr(frac)])
    return [(path, len(rows))]


def _run_chi(config, out_dir, workers):
    _require(config, "kernel", "u_grid", "n_paths")
    rows = _run_tasks(_task_chi_row,
                      [(config, j) for j in range(len(config["u_grid"]))],
                      workers)
    path = os.path.join(out_dir, "chi.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["u", "estimate", "n_exceed", "n", "flagged"])
        for r in rows:
            writer.writerow([repr(r.u), repr(r.estimate), r.n_exceed, r.n,
                             int(r.flagged)])
    return [(path, len(rows))]


_RUNNERS = {
    "simulate": _run_simulate,
    "converge": _run_converge,
    "figure1": _run_figure1,
    "hidden": _run_hidden,
    "negdep": _run_negdep,
    "chi": _run_chi,
}


def emit_manifest(config, outputs, out_dir, wall_time):
    """Write manifest.json listing every artifact with its row count."""
    import scipy
    from . import __version__
    manifest = {
        "config": config,
        "outputs": [{"file": os.path.basename(p), "rows": r} for p, r in outputs],
        "versions": {
            "extreme_chains": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": sys.version.split()[0],
        },
        "wall_time_s": wall_time,
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def run_experiment(config, out_dir, workers=1):
    """Validate and execute one experiment config; returns output list."""
    if not isinstance(config, dict):
        raise ValidationError("config must be a JSON object")
    _require(config, "kind", "seed")
    kind = config["kind"]
    if kind not in _KINDS:
        raise ValidationError(f"unknown experiment kind '{kind}'; known: {_KINDS}")
    if not isinstance(config["seed"], int):
        raise ValidationError("seed must be an integer")
    os.makedirs(out_dir, exist_ok=True)
    start = time.time()
    outputs = _RUNNERS[kind](config, out_dir, workers)
    emit_manifest(config, outputs, out_dir, time.time() - start)
    return outputs


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="extreme-chains",
        description="Reproducible experiments on extreme events of Markov chains")
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run one experiment config")
    runp.add_argument("--config", required=True, help="JSON config file")
    runp.add_argument("--out", required=True, help="output directory")
    runp.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                      help="parallel workers (output is identical regardless)")
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": str(exc), "category": "config"}),
              file=sys.stderr)
        return EXIT_CONFIG
    try:
        run_experiment(config, args.out, workers=args.workers)
    except ValidationError as exc:
        print(json.dumps({"error": str(exc), "category": "config"}),
              file=sys.stderr)
        return EXIT_CONFIG
    except ExtremeChainsError as exc:
        print(json.dumps({"error": str(exc), "category": "numeric"}),
              file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(json.dumps({"error": str(exc), "category": "io"}),
              file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
