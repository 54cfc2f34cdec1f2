import os
import subprocess
import sys

import pytest

from rbtensor import _backend


def test_available_lists_python():
    assert "python" in _backend.available()


def test_use_restores(rng):
    before = _backend.name()
    with _backend.use("python"):
        assert _backend.name() == "python"
    assert _backend.name() == before
    with pytest.raises(ValueError):
        _backend.set_backend("fortran")
    with pytest.raises(ValueError):
        _backend.set_workers(0)


@pytest.mark.parametrize("choice", ["python", "nonexistent"])
def test_env_selection(choice):
    env = dict(os.environ, RBTENSOR_BACKEND=choice)
    proc = subprocess.run([sys.executable, "-c", "from rbtensor import _backend; print(_backend.name())"],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 0
    if choice == "python":
        assert proc.stdout.strip() == "python"
    else:
        assert "unavailable" in proc.stderr


def test_fallback_when_extension_missing():
    code = ("import sys; sys.modules['rbtensor._ckernels'] = None\n"
            "from rbtensor import _backend, decomp\n"
            "from rbtensor.tensor import RBTensor\n"
            "import numpy as np\n"
            "decomp.ht_svd(RBTensor.random((3, 3, 2), np.random.default_rng(0)))\n"
            "print(_backend.available())")
    proc = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == "['python']"
