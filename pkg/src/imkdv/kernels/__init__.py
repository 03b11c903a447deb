"""Kernel backend selection.

The compiled extension is preferred; the numpy fallback is used when the
extension is missing or when IMKDV_PURE_KERNELS is set (any nonempty
value).  Both backends implement the same API and are compared bitwise in
the test suite and timed in benchmarks/bench_kernels.py.
"""

import os

from . import _pure

if os.environ.get("IMKDV_PURE_KERNELS"):
    _backend = _pure
else:
    try:
        from . import _speed as _backend
    except ImportError:
        _backend = _pure

backend_name = _backend.name
m4_lattice = _backend.m4_lattice
lam4_m4 = _backend.lam4_m4
lam6_m4rho = _backend.lam6_m4rho
