import os

import numpy as np
from setuptools import Extension, setup

# GLANDEVAL_NO_EXT=1 installs without the compiled kernels; the package then
# uses the numpy fallback backend at import time.
ext_modules = []
if not os.environ.get("GLANDEVAL_NO_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "glandeval._kernels._speedups",
                sources=["src/glandeval/_kernels/_speedups.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
