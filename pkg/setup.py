import os

from setuptools import setup
from setuptools.extension import Extension

ext_modules = []
if not os.environ.get("RANDMATCH_NO_EXT"):
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "randmatch._kernels._speedups",
                ["src/randmatch/_kernels/_speedups.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
