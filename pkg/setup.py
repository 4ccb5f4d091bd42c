"""Build script: compiles the optional Cython spreading kernel.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so any build failure here downgrades to a warning
instead of aborting the install.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build extensions, but never fail the whole install over them."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - toolchain dependent
            warnings.warn(f"compiled kernel skipped ({exc}); using pure-Python backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - toolchain dependent
            warnings.warn(f"compiled kernel skipped ({exc}); using pure-Python backend")


def _extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError as exc:  # pragma: no cover
        warnings.warn(f"cython/numpy unavailable ({exc}); using pure-Python backend")
        return []
    ext = Extension(
        "hypermine._kernels._sir_cy",
        ["src/hypermine/_kernels/_sir_cy.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
