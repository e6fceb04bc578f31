"""Build script for the compiled merge kernels.

The extension is optional at runtime: cfx._backend falls back to the pure
numpy implementation when the compiled module is absent.  -ffp-contract=off
keeps the C arithmetic bit-identical to numpy's (no fused multiply-add), so
both backends produce byte-identical output files.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    extensions = []
else:
    extensions = cythonize(
        [
            Extension(
                "cfx._kernels",
                ["src/cfx/_kernels.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level="3",
    )

setup(ext_modules=extensions)
