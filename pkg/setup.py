"""Build script for the optional compiled kernels.

The Cython extension is skipped when Cython is unavailable; the package then
runs on the numpy fallback in ``rbtensor._pykernels``.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("RBTENSOR_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext = Extension(
            "rbtensor._ckernels",
            ["src/rbtensor/_ckernels.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
        )
        ext_modules = cythonize(
            [ext],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )

setup(ext_modules=ext_modules)
