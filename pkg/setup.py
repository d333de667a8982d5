import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # no Cython: the pure-Python kernels are used
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("BGPWAVE_NO_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "bgpwave._core",
                ["src/bgpwave/_core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
