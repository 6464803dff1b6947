"""Build script: compiles the optional Cython kernel core.

The package works without the extension (gridfreq._kernels falls back to
vectorized numpy), so any failure here is non-fatal by design: comment out
the ext_modules line and reinstall to get a pure-Python build.
"""

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "gridfreq._kernels._core",
        ["src/gridfreq/_kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
