"""Compiled Euler-Maruyama kernel for the built-in network field.

Optional: everything here degrades to the pure-python integrator loop when
numba is unavailable.  The kernel must remain arithmetically identical to
``integrate._euler_maruyama_python`` (same update order, same noise layout).
"""

from __future__ import annotations

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def em_network_chunk(z, u, omega, a, eta, B, C, kappa, c, dt, sq_eps,
                         xi, step0, k_sample, out):
        """Advance the network by xi.shape[0] Euler-Maruyama steps in place.

        z, u        -- current state (mutated)
        xi          -- (m, 2n) standard normals; columns [0:n] perturb x,
                       [n:2n] perturb y, each scaled by sq_eps = eps*sqrt(dt)
        step0       -- global index of the first step in this chunk (0-based)
        k_sample    -- write a sample row every k_sample steps
        out         -- (n_samples+1, 3n) output buffer; row g/k_sample is
                       written after global step g
        """
        m = xi.shape[0]
        n = z.shape[0]
        r2 = np.empty(n)
        dz = np.empty(n, dtype=np.complex128)
        for i in range(m):
            # all increments are evaluated on the pre-step state
            for j in range(n):
                r2[j] = z[j].real * z[j].real + z[j].imag * z[j].imag
            for j in range(n):
                acc = 0.0 + 0.0j
                for l in range(n):
                    acc += c[j, l] * z[l]
                dz[j] = ((u[j] + 1j * omega) * z[j] + B * z[j] * r2[j]
                         + C * z[j] * r2[j] * r2[j] + kappa * acc)
            for j in range(n):
                z[j] = z[j] + dt * dz[j] + sq_eps * (xi[i, j] + 1j * xi[i, n + j])
                u[j] = u[j] + dt * (eta * (a - r2[j]))
            g = step0 + i + 1
            if g % k_sample == 0:
                row = g // k_sample
                for j in range(n):
                    out[row, j] = z[j].real
                    out[row, n + j] = z[j].imag
                    out[row, 2 * n + j] = u[j]

else:  # pragma: no cover

    em_network_chunk = None
