"""Build script for the optional compiled Monte Carlo kernel.

The package works without the extension (a NumPy fallback is selected at
import time); building it just makes the simulation oracle faster.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "sispfd._kernels._mc_cython",
                ["src/sispfd/_kernels/_mc_cython.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
