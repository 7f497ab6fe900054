"""Build script: compiles the optional Cython scan kernels.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile only costs speed, never functionality.
"""

import numpy as np
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/ipo_rl/kernels/_scan.pyx",
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-env dependent
    print(f"warning: skipping Cython extension build ({exc}); "
          "pure-python kernels will be used")

setup(
    ext_modules=ext_modules,
    include_dirs=[np.get_include()],
)
