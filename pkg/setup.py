"""Builds the optional compiled kernel extension.

The package works without it: scmp.kernels falls back to the pure-Python
implementation when the extension is missing (see SCMP_KERNELS).
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "scmp._kernels",
                ["src/scmp/_kernels.pyx"],
                # keep IEEE per-operation semantics so both backends agree
                # (no FMA contraction, no sincos() substitution)
                extra_compile_args=["-O2", "-ffp-contract=off", "-fno-builtin-sin", "-fno-builtin-cos", "-fno-builtin-sincos"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
