from setuptools import Extension, setup

import numpy as np

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "tprod._kernels",
                ["src/tprod/_kernels.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Without Cython the package still works through the NumPy fallback
    # selected at import time in tprod.backend.
    ext_modules = []

setup(ext_modules=ext_modules)
