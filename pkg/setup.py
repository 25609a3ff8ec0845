"""Build hook for the optional compiled kernels.

The extension is optional: when Cython or a C compiler is unavailable the
package installs without it and ``specset.kernels`` falls back to numpy.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("SPECSET_NO_EXTENSION") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "specset._kernels",
                    ["src/specset/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
