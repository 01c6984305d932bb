"""randmatch: generative training by optimal-assignment matching of random features.

Subpackages group by concern: exact transport (`ot`), assignment solvers
(`assign`), plug-in estimators (`estimators`), frozen random feature maps
(`features`), the trainable generator (`nets`), the training loop (`train`),
dataset handling (`data`), evaluation (`metrics`), and the CLI (`cli`).
Solver inner loops live in `_kernels` with a compiled and a pure backend.
"""

from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
