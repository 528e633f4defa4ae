import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("RBOLT_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("rbolt._kernels", ["src/rbolt/_kernels.pyx"], include_dirs=[np.get_include()])],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
