"""Build the optional Cython kernel.

The package works without it; ``refund_annuity.kernels`` falls back to the
pure-Python implementation when the extension is missing.
"""
import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Keep going when the C compiler is unavailable or fails."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        sys.stderr.write(
            "warning: Cython kernel not built (%s); "
            "the pure-Python kernel will be used\n" % exc
        )


def extensions():
    if os.environ.get("REFUND_ANNUITY_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "refund_annuity._kernels",
        ["src/refund_annuity/_kernels.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize(
        [ext],
        compiler_directives=dict(
            language_level=3,
            boundscheck=False,
            wraparound=False,
            cdivision=True,
            embedsignature=True,
        ),
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
