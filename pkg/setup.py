"""Build the optional Cython crossing kernel.

If Cython or a C compiler is unavailable the package installs without it
and falls back to the pure-Python kernel at import time.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy  # noqa: F401
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension(
            "hocpoles._kernel",
            ["src/hocpoles/_kernel.pyx"],
            # no fused multiply-add: the compiled kernel must match Python bit for bit
            extra_compile_args=["-O3", "-ffp-contract=off"],
        )],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
