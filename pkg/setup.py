"""Build script: compiles the optional numeric kernel extension.

The package works without the extension (a NumPy/SciPy fallback is
selected at import time); building it just makes value iteration and
DTMC solving much faster on large state spaces.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "riskctl._kernels._speedups",
                ["src/riskctl/_kernels/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
