import numpy as np
from setuptools import Extension, setup

# The compiled kernels are optional: essumm.kernels falls back to the numpy
# implementation when the extension is absent (see benchmarks/bench_kernels.py
# for the speed comparison).
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "essumm._ckernels",
                sources=["src/essumm/_ckernels.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level="3",
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
