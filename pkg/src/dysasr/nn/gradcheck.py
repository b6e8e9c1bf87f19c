"""Finite-difference verification of analytic gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import Network


@dataclass
class GradCheckReport:
    max_rel_error: float
    n_checked: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_rel_error < self.tol


def grad_check(
    net: Network,
    x: np.ndarray,
    targets: np.ndarray,
    tol: float = 1e-4,
    eps: float = 1e-4,
    max_params_per_array: int | None = None,
    seed: int = 0,
) -> GradCheckReport:
    """Compare analytic gradients against central finite differences.

    The network is cast to float64 first. With `max_params_per_array` set,
    only a random subset of each parameter array is probed (for larger nets).
    """
    net64 = net.astype(np.float64)
    x = np.asarray(x, dtype=np.float64)
    net64.backprop(x, targets)
    analytic = [g.copy() for g in net64.grads()]
    params = net64.params()

    rng = np.random.default_rng(seed)
    max_rel = 0.0
    checked = 0
    for p, g in zip(params, analytic):
        flat_p = p.reshape(-1)
        flat_g = g.reshape(-1)
        idx = np.arange(flat_p.size)
        if max_params_per_array is not None and flat_p.size > max_params_per_array:
            idx = rng.choice(flat_p.size, size=max_params_per_array, replace=False)
        for i in idx:
            orig = flat_p[i]
            flat_p[i] = orig + eps
            up = net64.loss_value(net64.forward(x), targets)
            flat_p[i] = orig - eps
            down = net64.loss_value(net64.forward(x), targets)
            flat_p[i] = orig
            fd = (up - down) / (2.0 * eps)
            # floor the denominator so near-zero gradients (where relative
            # error is ill-conditioned) are compared on an absolute scale
            denom = max(abs(fd) + abs(flat_g[i]), 1e-6)
            max_rel = max(max_rel, abs(fd - flat_g[i]) / denom)
            checked += 1
    return GradCheckReport(max_rel_error=max_rel, n_checked=checked, tol=tol)
