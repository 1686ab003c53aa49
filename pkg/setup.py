"""Builds the optional C speedups extension.

The package is fully functional without it: invoiceval.kernels falls back to
the pure-Python implementations when the extension is missing or fails to
build. Set INVOICEVAL_PURE=1 to skip the extension build entirely.
"""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext
from setuptools.errors import CCompilerError, ExecError, PlatformError


def _extensions():
    if os.environ.get("INVOICEVAL_PURE"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [Extension("invoiceval._speedups", ["src/invoiceval/_speedups.pyx"])],
        language_level=3,
    )


class OptionalBuildExt(build_ext):
    """build_ext that degrades to the pure-Python fallback on compiler failure."""

    def run(self):
        try:
            super().run()
        except PlatformError as exc:
            self._skip(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except (CCompilerError, ExecError, OSError) as exc:
            self._skip(exc)

    @staticmethod
    def _skip(exc):
        print(f"warning: C extension build failed ({exc}); "
              "using pure-Python kernels", file=sys.stderr)


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
