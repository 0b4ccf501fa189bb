"""Three gradient routes and why the adjoint one trains the models.

The parameter-shift rule is exact but costs two circuit runs per parameter;
the adjoint sweep costs two passes total.  Finite differences are kept as a
dumb cross-check.  All three must agree to high precision.
"""
import time

import numpy as np

from tnqc import BlockKind, build_mera, encode_features, make_head
from tnqc.gradients import loss_and_grad_adjoint, loss_and_grad_fd, loss_and_grad_shift

rng = np.random.default_rng(7)
template = build_mera(BlockKind.GENERAL_SU4)
params = rng.uniform(0, 2 * np.pi, template.n_params)
state = encode_features(rng.uniform(0, 1, 8))
label = 2

for loss_name in ("mse_binary", "ce_amplitude"):
    head = make_head(loss_name, template, 4)

    tic = time.perf_counter()
    loss_adj, grad_adj = loss_and_grad_adjoint(head, params, state, label)
    t_adj = time.perf_counter() - tic

    tic = time.perf_counter()
    loss_shift, grad_shift = loss_and_grad_shift(head, params, state, label)
    t_shift = time.perf_counter() - tic

    _, grad_fd = loss_and_grad_fd(head, params, state, label, step=1e-4)

    print(f"{loss_name}: loss {loss_adj:.6f} (shift route {loss_shift:.6f})")
    print(f"  max |adjoint - shift| = {np.abs(grad_adj - grad_shift).max():.2e}")
    print(f"  max |adjoint - fd|    = {np.abs(grad_adj - grad_fd).max():.2e}")
    print(
        f"  adjoint {1e3 * t_adj:.1f} ms vs shift {1e3 * t_shift:.1f} ms "
        f"for {template.n_params} parameters"
    )
