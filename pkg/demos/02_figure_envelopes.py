"""Envelope study for four chains started from the common extreme x0 = 10.

Reproduces the four-panel comparison: per-step 2.5%/mean/97.5% envelopes of
the actual chain against the reconstruction a_t(x0) + b_t(x0) M_t from the
simulated limit process.  Chain (iii) has no known limiting kernel, so only
its actual envelopes appear.  Writes the same CSVs the command-line runner
produces and prints a compact table.
"""

from extreme_chains import cli

SEED = 99
X0, HORIZON, N = 10.0, 15, 10_000

chains = {
    "i":   "logistic BEV (asymptotically dependent)",
    "ii":  "inverted logistic BEV",
    "iii": "exponential autoregression (no limit kernel known)",
    "iv":  "Gaussian copula",
}

for idx, tag in enumerate(("i", "ii", "iii", "iv")):
    config = {"seed": SEED, "x0": X0, "horizon": HORIZON, "n_paths": N}
    _, env_actual, env_tc = cli._task_figure1_chain((config, idx))
    print(f"--- chain ({tag}): {chains[tag]} ---")
    print(f"{'t':>3} {'actual q025':>12} {'actual mean':>12} {'actual q975':>12}"
          f" {'tc mean':>9}")
    for j in range(5):
        tc = f"{env_tc.mean[j]:9.3f}" if env_tc is not None else "      --"
        print(f"{j + 1:3d} {env_actual.q025[j]:12.3f} {env_actual.mean[j]:12.3f}"
              f" {env_actual.q975[j]:12.3f} {tc}")
    print()

print("Reading the table:")
print(" * chain (i) hovers near 10 for several steps: extremes persist;")
print(" * chains (ii)-(iv) decay toward the body at their alpha rates, and")
print("   the tail-chain envelopes track the first few steps;")
print(" * for (iv) the approximation sits visibly below the actual mean at")
print("   t = 1 (about 0.8 on this scale): the documented slow convergence.")
