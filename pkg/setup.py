import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ANISOCOUNT_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "anisocount._kernels",
                    ["src/anisocount/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        # Pure-Python fallback is selected at import time when the
        # compiled kernels are unavailable.
        ext_modules = []

setup(ext_modules=ext_modules)
