"""Build hook for the optional compiled GF(2)[x] kernel.

The package works without it: ``rackrepair.gf2x`` falls back to the pure
Python kernel when the extension is missing.  Set RACKREPAIR_NO_EXT=1 to
skip the build.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("RACKREPAIR_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("rackrepair._gf2x", ["src/rackrepair/_gf2x.pyx"],
                       extra_compile_args=["-O3"])],
            language_level=3,
        )

setup(ext_modules=ext_modules)
