import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "gaussmem._kernels",
        ["src/gaussmem/_kernels.pyx"],
        include_dirs=[np.get_include()],
        # no fp contraction: the pure-Python fallback must match bit-for-bit
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
