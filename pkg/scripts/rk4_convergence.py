"""Fourth-order convergence of RK4 towards the closed-form state.

At the oracle's default step (1e-4 / Omega) the truncation error is already
below round-off, so the order is measured on coarse step counts.
"""

import numpy as np

from lambda_metrology import model
from lambda_metrology.model import LambdaParams

params = LambdaParams(omega_R1=0.8, omega_R2=1.4, phi1=0.3, phi2=-0.7, psi=1.2, theta=1.0)
t = 15.0
H = model.interaction_hamiltonian(params)
exact = model.slow_amplitudes(params, t)

prev = None
print(f"{'steps':>6s} {'max error':>12s} {'order':>6s}")
for n in (50, 100, 200, 400, 800, 1600):
    phi = model.rk4_propagate(lambda s: H, model.initial_state(params), t, n)
    err = float(np.max(np.abs(phi - exact)))
    order = "" if prev is None else f"{np.log2(prev / err):6.2f}"
    print(f"{n:6d} {err:12.3e} {order:>6s}")
    prev = err

oracle = model.evolve_numeric_oracle(params, t).amplitudes
print(f"\ndefault oracle step: max error {np.max(np.abs(oracle - model.evolve(params, t).amplitudes)):.3e}")
