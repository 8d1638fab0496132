import os
import subprocess
import sys

import numpy as np
import pytest

from cvrl import _kernels
from cvrl.gaussian import GaussianParams, _bargmann, params_to_moments


def _coeffs(p):
    m = params_to_moments(p)
    A, b, scale = _bargmann(m.mu, m.V)
    return (complex(A[0, 0]), complex(A[0, 1]), complex(A[1, 1]),
            complex(b[0]), complex(b[1]), complex(scale))


def test_python_backend_always_available():
    assert "python" in _kernels.IMPLEMENTATIONS
    assert _kernels.BACKEND in _kernels.IMPLEMENTATIONS


@pytest.mark.parametrize("N", [1, 2, 7, 50])
def test_backends_bitwise_close(N):
    if "cython" not in _kernels.IMPLEMENTATIONS:
        pytest.skip("compiled kernel not built")
    c = _coeffs(GaussianParams(0.8, 0.6, 2.0, (1.2, -0.3)))
    a = _kernels.IMPLEMENTATIONS["python"](*c, N)
    b = _kernels.IMPLEMENTATIONS["cython"](*c, N)
    assert a.shape == b.shape == (N, N)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-16)


def test_vacuum_block_is_projector():
    for kern in _kernels.IMPLEMENTATIONS.values():
        M = kern(*_coeffs(GaussianParams()), 5)
        expected = np.zeros((5, 5))
        expected[0, 0] = 1
        np.testing.assert_allclose(M, expected, atol=1e-15)


def test_pure_python_switch():
    code = "from cvrl import _kernels; print(_kernels.BACKEND)"
    env = dict(os.environ, CVRL_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True)
    assert out.stdout.strip() == "python"
