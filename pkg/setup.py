"""Build script: compiles the Cython integrator kernels when a toolchain is
available.  If Cython or a C compiler is missing the package still installs
and falls back to the pure-Python kernels at import time."""

from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "sircap._kernels",
                ["src/sircap/_kernels.pyx"],
                # -ffp-contract=off keeps the compiled arithmetic bit-identical
                # to the pure-Python fallback (no FMA contraction).
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
